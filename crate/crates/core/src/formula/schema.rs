//! Formula schemas: finite height, pretransitivity and the lexicographic
//! interaction axioms.

use super::Formula;
use crate::{Error, ModalityAlphabet, Result};

/// `B_0 = ⊥`, `B_h = p_h → □(◊p_h ∨ B_{h−1})` over a single modality.
pub fn b_formula(h: usize, modality: &str) -> Formula {
    (1..=h).fold(Formula::Bottom, |prev, i| {
        let p = Formula::var(i as u32);
        Formula::implies(
            p.clone(),
            Formula::boxed(modality, Formula::or(Formula::diamond(modality, p), prev)),
        )
    })
}

/// `B^{[m]}_h = p_h → □_A^{≤m}(◊_A^{≤m} p_h ∨ B^{[m]}_{h−1})`, `B^{[m]}_0 = ⊥`.
pub fn b_m_formula(h: usize, m: usize, alphabet: &ModalityAlphabet) -> Result<Formula> {
    if alphabet.is_empty() {
        return Err(Error::EmptyAlphabet);
    }
    Ok((1..=h).fold(Formula::Bottom, |prev, i| {
        let p = Formula::var(i as u32);
        Formula::implies(
            p.clone(),
            Formula::box_upto(
                alphabet,
                m,
                Formula::or(Formula::diamond_upto(alphabet, m, p), prev),
            ),
        )
    }))
}

/// `◊_A^{m+1} p0 → ◊_A^{≤m} p0`.
pub fn pretransitivity_axiom(m: usize, alphabet: &ModalityAlphabet) -> Result<Formula> {
    if alphabet.is_empty() {
        return Err(Error::EmptyAlphabet);
    }
    let p = Formula::var(0);
    Ok(Formula::implies(
        Formula::diamond_any_pow(alphabet, m + 1, p.clone()),
        Formula::diamond_upto(alphabet, m, p),
    ))
}

/// For each vertical `v` and horizontal `h` (in that lexicographic order):
/// `◊_h◊_v p → ◊_v p`, `◊_v◊_h p → ◊_v p`, `◊_v p → □_h◊_v p`.
pub fn phi_axioms(vertical: &ModalityAlphabet, horizontal: &ModalityAlphabet) -> Result<Vec<Formula>> {
    if vertical.is_empty() || horizontal.is_empty() {
        return Err(Error::EmptyAlphabet);
    }
    vertical.disjoint_union(horizontal)?;
    let p = Formula::var(0);
    let mut out = Vec::with_capacity(3 * vertical.len() * horizontal.len());
    for v in vertical.names() {
        let dv = Formula::diamond(v, p.clone());
        for h in horizontal.names() {
            out.push(Formula::implies(Formula::diamond(h, dv.clone()), dv.clone()));
            out.push(Formula::implies(
                Formula::diamond(v, Formula::diamond(h, p.clone())),
                dv.clone(),
            ));
            out.push(Formula::implies(dv.clone(), Formula::boxed(h, dv.clone())));
        }
    }
    Ok(out)
}
