use std::sync::Arc;

use super::Formula;
use crate::{Error, ModalityAlphabet, Result};

/// `(◊ψ)^r = ◊ψ^r ∨ ψ^r`; homomorphic on the Boolean core.
///
/// `F ⊨ φ^r` iff `F^r ⊨ φ`.
pub fn reflexive_translate(phi: &Formula) -> Formula {
    match phi {
        Formula::Bottom | Formula::Var(_) => phi.clone(),
        Formula::Implies(a, b) => Formula::implies(reflexive_translate(a), reflexive_translate(b)),
        Formula::Diamond(m, a) => {
            let inner = reflexive_translate(a);
            Formula::or(Formula::Diamond(m.clone(), Arc::new(inner.clone())), inner)
        }
    }
}

/// Relativization to `ξ`: `(◊ψ)^ξ = ◊(ξ ∧ ψ^ξ)`, fixing `⊥` and variables.
pub fn relativize(phi: &Formula, xi: &Formula) -> Formula {
    match phi {
        Formula::Bottom | Formula::Var(_) => phi.clone(),
        Formula::Implies(a, b) => Formula::implies(relativize(a, xi), relativize(b, xi)),
        Formula::Diamond(m, a) => Formula::Diamond(
            m.clone(),
            Arc::new(Formula::and(xi.clone(), relativize(a, xi))),
        ),
    }
}

/// `φ^{[m]}`: every diamond of a unimodal formula replaced with `◊_A^{≤m}`.
pub fn m_translate(phi: &Formula, m: usize, alphabet: &ModalityAlphabet) -> Result<Formula> {
    if alphabet.is_empty() {
        return Err(Error::EmptyAlphabet);
    }
    let mods = phi.modalities();
    if mods.len() > 1 {
        return Err(Error::NotUnimodal(
            mods.into_iter().collect::<Vec<_>>().join(","),
        ));
    }
    fn go(phi: &Formula, m: usize, alphabet: &ModalityAlphabet) -> Formula {
        match phi {
            Formula::Bottom | Formula::Var(_) => phi.clone(),
            Formula::Implies(a, b) => Formula::implies(go(a, m, alphabet), go(b, m, alphabet)),
            Formula::Diamond(_, a) => Formula::diamond_upto(alphabet, m, go(a, m, alphabet)),
        }
    }
    Ok(go(phi, m, alphabet))
}
