//! Sums of frames over an index frame, lexicographic sums, transfer of
//! tuned partitions to sums, p-morphisms, and the rooted cover of a frame
//! whose vertical and horizontal relations interact lexicographically.

use std::fmt;

use crate::frame::resolve_all;
use crate::partition::{coarsest_tuned_refinement, tuning_violation, Partition};
use crate::{Error, Frame, ModalityAlphabet, Relation, Result, WorldSet};

/// A frame built from an index frame and one summand per index world.
/// Summand `i` occupies the contiguous range `layout[i]` of the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumFrame {
    pub frame: Frame,
    pub index_of: Vec<usize>,
    pub inner_of: Vec<usize>,
    pub layout: Vec<std::ops::Range<usize>>,
    index: Frame,
    summands: Vec<Frame>,
}

impl SumFrame {
    pub fn index(&self) -> &Frame {
        &self.index
    }

    pub fn summands(&self) -> &[Frame] {
        &self.summands
    }

    /// Global world of `(i, a)`.
    pub fn world(&self, i: usize, a: usize) -> usize {
        assert!(a < self.layout[i].len(), "world {a} outside summand {i}");
        self.layout[i].start + a
    }

    /// The summands laid side by side with no edges between them, over the
    /// summand alphabet.
    pub fn disjoint_part(&self) -> Frame {
        let n = self.index_of.len();
        let relations = (0..self.summands.first().map_or(0, |s| s.alphabet().len()))
            .map(|m| {
                let mut r = Relation::empty(n);
                for (i, s) in self.summands.iter().enumerate() {
                    for (a, b) in s.relation(m).pairs() {
                        r.insert(self.world(i, a), self.world(i, b));
                    }
                }
                r
            })
            .collect();
        let alphabet = self
            .summands
            .first()
            .map_or_else(|| self.frame.alphabet().clone(), |s| s.alphabet().clone());
        Frame::new(alphabet, n, relations).expect("summand relations stay in range")
    }
}

fn check_alphabet(expected: &ModalityAlphabet, found: &ModalityAlphabet) -> Result<()> {
    if expected != found {
        return Err(Error::AlphabetMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        });
    }
    Ok(())
}

fn layout_of(summands: &[Frame]) -> (Vec<usize>, Vec<usize>, Vec<std::ops::Range<usize>>) {
    let mut index_of = Vec::new();
    let mut inner_of = Vec::new();
    let mut layout = Vec::with_capacity(summands.len());
    for (i, s) in summands.iter().enumerate() {
        let start = index_of.len();
        for a in 0..s.size() {
            index_of.push(i);
            inner_of.push(a);
        }
        layout.push(start..index_of.len());
    }
    (index_of, inner_of, layout)
}

/// The disjoint sum: block-diagonal relations, summands numbered in order.
pub fn disjoint_sum(frames: &[Frame]) -> Result<SumFrame> {
    let alphabet = frames
        .first()
        .map_or_else(|| ModalityAlphabet::of(&[]), |f| f.alphabet().clone());
    sum_over_index(&Frame::discrete(alphabet, frames.len()), frames)
}

/// `ΣI`: `(i,a) R (j,b)` iff `i = j ∧ a R_i b` or `i ≠ j ∧ i S j`.
pub fn sum_over_index(index: &Frame, summands: &[Frame]) -> Result<SumFrame> {
    if summands.len() != index.size() {
        return Err(Error::ArityMismatch {
            expected: index.size(),
            found: summands.len(),
        });
    }
    for s in summands {
        check_alphabet(index.alphabet(), s.alphabet())?;
    }
    let (index_of, inner_of, layout) = layout_of(summands);
    let n = index_of.len();
    let relations = index
        .relations()
        .iter()
        .enumerate()
        .map(|(m, s_rel)| {
            Relation::from_fn(n, |x, y| {
                let (i, j) = (index_of[x], index_of[y]);
                if i == j {
                    summands[i].relation(m).contains(inner_of[x], inner_of[y])
                } else {
                    s_rel.contains(i, j)
                }
            })
        })
        .collect();
    Ok(SumFrame {
        frame: Frame::new(index.alphabet().clone(), n, relations)?,
        index_of,
        inner_of,
        layout,
        index: index.clone(),
        summands: summands.to_vec(),
    })
}

/// The lexicographic sum over `A ∪ B`: vertical `(i,a) S (j,b)` iff `i S j`,
/// horizontal `(i,a) R (j,b)` iff `i = j ∧ a R_i b`. The index is over `A`,
/// every summand over `B`; the result's alphabet lists `A` then `B`.
pub fn lex_sum(index: &Frame, summands: &[Frame]) -> Result<SumFrame> {
    if summands.len() != index.size() {
        return Err(Error::ArityMismatch {
            expected: index.size(),
            found: summands.len(),
        });
    }
    let horizontal = match summands.first() {
        Some(s) => s.alphabet().clone(),
        None => return lex_sum_empty(index),
    };
    for s in summands {
        check_alphabet(&horizontal, s.alphabet())?;
    }
    let alphabet = index.alphabet().disjoint_union(&horizontal)?;
    let (index_of, inner_of, layout) = layout_of(summands);
    let n = index_of.len();
    let mut relations: Vec<Relation> = index
        .relations()
        .iter()
        .map(|s| Relation::from_fn(n, |x, y| s.contains(index_of[x], index_of[y])))
        .collect();
    relations.extend((0..horizontal.len()).map(|m| {
        Relation::from_fn(n, |x, y| {
            index_of[x] == index_of[y] && summands[index_of[x]].relation(m).contains(inner_of[x], inner_of[y])
        })
    }));
    Ok(SumFrame {
        frame: Frame::new(alphabet, n, relations)?,
        index_of,
        inner_of,
        layout,
        index: index.clone(),
        summands: summands.to_vec(),
    })
}

fn lex_sum_empty(index: &Frame) -> Result<SumFrame> {
    Ok(SumFrame {
        frame: Frame::discrete(index.alphabet().clone(), 0),
        index_of: Vec::new(),
        inner_of: Vec::new(),
        layout: Vec::new(),
        index: index.clone(),
        summands: Vec::new(),
    })
}

/// The lexicographic sum presented as an ordinary sum over `A ∪ B`: the
/// index gets empty `B`-relations, and summand `i` gets `X_i × X_i` for each
/// `A`-modality looping at `i` (empty otherwise).
pub fn lex_as_sum(index: &Frame, summands: &[Frame]) -> Result<SumFrame> {
    if summands.len() != index.size() {
        return Err(Error::ArityMismatch {
            expected: index.size(),
            found: summands.len(),
        });
    }
    let horizontal = match summands.first() {
        Some(s) => s.alphabet().clone(),
        None => return lex_sum_empty(index),
    };
    for s in summands {
        check_alphabet(&horizontal, s.alphabet())?;
    }
    let alphabet = index.alphabet().disjoint_union(&horizontal)?;
    let y = index.size();
    let mut idx_rel: Vec<Relation> = index.relations().to_vec();
    idx_rel.extend((0..horizontal.len()).map(|_| Relation::empty(y)));
    let expanded_index = Frame::new(alphabet.clone(), y, idx_rel)?;
    let expanded: Vec<Frame> = summands
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut rels: Vec<Relation> = index
                .relations()
                .iter()
                .map(|r| {
                    if r.contains(i, i) {
                        Relation::full(s.size())
                    } else {
                        Relation::empty(s.size())
                    }
                })
                .collect();
            rels.extend(s.relations().iter().cloned());
            Frame::new(alphabet.clone(), s.size(), rels)
        })
        .collect::<Result<_>>()?;
    sum_over_index(&expanded_index, &expanded)
}

/// The t-profile of each index world: the set of `v`-blocks meeting its
/// summand.
pub fn t_profiles(s: &SumFrame, v: &Partition) -> Result<Vec<WorldSet>> {
    if v.universe() != s.frame.size() {
        return Err(Error::SizeMismatch {
            left: s.frame.size(),
            right: v.universe(),
        });
    }
    Ok(s
        .layout
        .iter()
        .map(|range| WorldSet::from_worlds(v.len(), range.clone().map(|x| v.class_of(x))))
        .collect())
}

/// The partition of the index induced by equal t-profiles.
pub fn t_profile_partition(s: &SumFrame, v: &Partition) -> Result<Partition> {
    Ok(Partition::from_labels(&t_profiles(s, v)?))
}

/// Intersects `v` (a partition of the sum) with the pullback of `u` (a
/// partition of the index): `(i,a) ~ (i',a')` iff they are `v`-equivalent
/// and `i ~_u i'`.
///
/// Requires `v` tuned in the disjoint part of `s`, `u` tuned in the
/// irreflexive part of the index, and `u` refining the t-profile partition.
/// The result is tuned in `s.frame` and has at most `|v|·|u|` blocks.
pub fn transfer_partition(s: &SumFrame, v: &Partition, u: &Partition) -> Result<Partition> {
    let n = s.frame.size();
    if v.universe() != n {
        return Err(Error::SizeMismatch {
            left: n,
            right: v.universe(),
        });
    }
    if u.universe() != s.index.size() {
        return Err(Error::SizeMismatch {
            left: s.index.size(),
            right: u.universe(),
        });
    }
    if let Some(w) = tuning_violation(&s.disjoint_part(), v)? {
        return Err(Error::Precondition(format!(
            "v is not tuned in the disjoint sum: world {} in block {} misses block {} (modality {})",
            w.world, w.from_block, w.to_block, w.modality
        )));
    }
    if let Some(w) = tuning_violation(&s.index.irreflexive_part(), u)? {
        return Err(Error::Precondition(format!(
            "u is not tuned in the index: world {} in block {} misses block {} (modality {})",
            w.world, w.from_block, w.to_block, w.modality
        )));
    }
    let t = t_profiles(s, v)?;
    for i in 0..u.universe() {
        for j in u.block_of(i).iter() {
            if t[i] != t[j] {
                return Err(Error::Precondition(format!(
                    "u does not refine the t-profile partition: index worlds {i} and {j} share a block but meet different v-blocks"
                )));
            }
        }
    }
    let labels: Vec<(usize, usize)> = (0..n)
        .map(|x| (v.class_of(x), u.class_of(s.index_of[x])))
        .collect();
    let out = Partition::from_labels(&labels);
    debug_assert!(out.len() <= v.len() * u.len());
    debug_assert!(tuning_violation(&s.frame, &out)?.is_none());
    Ok(out)
}

/// Each stage of the staged transfer construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transfer {
    /// Coarsest refinement of the base partition tuned in the disjoint part.
    pub v: Partition,
    pub t_partition: Partition,
    /// Coarsest refinement of the t-profile partition tuned in the
    /// irreflexive index.
    pub u: Partition,
    pub s: Partition,
}

/// Refines `v0` in the disjoint part, builds t-profiles, refines them in
/// the index and intersects.
pub fn transfer(s: &SumFrame, v0: &Partition) -> Result<Transfer> {
    let v = coarsest_tuned_refinement(&s.disjoint_part(), v0)?;
    let t_partition = t_profile_partition(s, &v)?;
    let u = coarsest_tuned_refinement(&s.index.irreflexive_part(), &t_partition)?;
    let out = transfer_partition(s, &v, &u)?;
    Ok(Transfer {
        v,
        t_partition,
        u,
        s: out,
    })
}

/// A total map between the worlds of two frames over the same modalities
/// (possibly listed in different orders).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldMap {
    pub domain: Frame,
    pub codomain: Frame,
    pub map: Vec<usize>,
}

impl WorldMap {
    pub fn new(domain: Frame, codomain: Frame, map: Vec<usize>) -> Result<WorldMap> {
        if map.len() != domain.size() {
            return Err(Error::SizeMismatch {
                left: domain.size(),
                right: map.len(),
            });
        }
        if let Some(&b) = map.iter().find(|&&b| b >= codomain.size()) {
            return Err(Error::WorldOutOfRange {
                world: b,
                n: codomain.size(),
            });
        }
        let same = domain.alphabet().len() == codomain.alphabet().len()
            && domain.alphabet().names().iter().all(|m| codomain.alphabet().contains(m));
        if !same {
            return Err(Error::AlphabetMismatch {
                expected: domain.alphabet().to_string(),
                found: codomain.alphabet().to_string(),
            });
        }
        Ok(WorldMap {
            domain,
            codomain,
            map,
        })
    }

    pub fn identity(f: &Frame) -> WorldMap {
        WorldMap {
            domain: f.clone(),
            codomain: f.clone(),
            map: (0..f.size()).collect(),
        }
    }

    pub fn is_surjective(&self) -> bool {
        let hit = WorldSet::from_worlds(self.codomain.size(), self.map.iter().copied());
        hit.is_full()
    }
}

/// Why a map is not a p-morphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PmorphismViolation {
    /// `a R b` but not `f(a) S f(b)`.
    Forth { modality: String, a: usize, b: usize },
    /// `f(a) S u` but no `R`-successor of `a` maps to `u`.
    Lift { modality: String, a: usize, u: usize },
}

impl fmt::Display for PmorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PmorphismViolation::Forth { modality, a, b } => {
                write!(f, "forth fails for {modality}: {a} -> {b} is not preserved")
            }
            PmorphismViolation::Lift { modality, a, u } => {
                write!(f, "lift fails for {modality}: no successor of {a} maps to {u}")
            }
        }
    }
}

/// First failure of the forth or lift condition, modality by modality.
pub fn pmorphism_violation(m: &WorldMap) -> Option<PmorphismViolation> {
    let cod = resolve_all(m.codomain.alphabet(), m.domain.alphabet()).expect("checked by WorldMap::new");
    for (dm, &cm) in cod.iter().enumerate() {
        let r = m.domain.relation(dm);
        let s = m.codomain.relation(cm);
        let name = m.domain.alphabet().names()[dm].clone();
        for (a, b) in r.pairs() {
            if !s.contains(m.map[a], m.map[b]) {
                return Some(PmorphismViolation::Forth { modality: name, a, b });
            }
        }
        for a in 0..m.domain.size() {
            let images = WorldSet::from_worlds(m.codomain.size(), r.successors(a).iter().map(|b| m.map[b]));
            if let Some(u) = s.successors(m.map[a]).difference(&images).first() {
                return Some(PmorphismViolation::Lift { modality: name, a, u });
            }
        }
    }
    None
}

pub fn is_pmorphism(m: &WorldMap) -> bool {
    pmorphism_violation(m).is_none()
}

/// Which of the three lexicographic interaction inclusions fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiCondition {
    /// `R_h ∘ R_v ⊆ R_v`
    HorizontalThenVertical,
    /// `R_v ∘ R_h ⊆ R_v`
    VerticalThenHorizontal,
    /// `R_h⁻¹ ∘ R_v ⊆ R_v`
    ConverseHorizontalThenVertical,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiViolation {
    pub condition: PhiCondition,
    pub vertical: String,
    pub horizontal: String,
    /// A pair in the composite but not in `R_v`.
    pub pair: (usize, usize),
}

impl fmt::Display for PhiViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (v, h) = (&self.vertical, &self.horizontal);
        let lhs = match self.condition {
            PhiCondition::HorizontalThenVertical => format!("{h};{v}"),
            PhiCondition::VerticalThenHorizontal => format!("{v};{h}"),
            PhiCondition::ConverseHorizontalThenVertical => format!("{h}^-1;{v}"),
        };
        write!(f, "({}, {}) is in {lhs} but not in {v}", self.pair.0, self.pair.1)
    }
}

fn check_split(f: &Frame, vertical: &ModalityAlphabet, horizontal: &ModalityAlphabet) -> Result<(Vec<usize>, Vec<usize>)> {
    let joint = vertical.disjoint_union(horizontal)?;
    if joint.len() != f.alphabet().len() {
        return Err(Error::AlphabetMismatch {
            expected: f.alphabet().to_string(),
            found: joint.to_string(),
        });
    }
    Ok((resolve_all(f.alphabet(), vertical)?, resolve_all(f.alphabet(), horizontal)?))
}

/// First failing inclusion over all vertical/horizontal pairs, or `None`
/// when all hold. `vertical` and `horizontal` must partition the alphabet.
pub fn phi_violation(f: &Frame, vertical: &ModalityAlphabet, horizontal: &ModalityAlphabet) -> Result<Option<PhiViolation>> {
    let (vs, hs) = check_split(f, vertical, horizontal)?;
    for (&vi, vname) in vs.iter().zip(vertical.names()) {
        let rv = f.relation(vi);
        for (&hi, hname) in hs.iter().zip(horizontal.names()) {
            let rh = f.relation(hi);
            let checks = [
                (PhiCondition::HorizontalThenVertical, rh.compose(rv)?),
                (PhiCondition::VerticalThenHorizontal, rv.compose(rh)?),
                (PhiCondition::ConverseHorizontalThenVertical, rh.converse().compose(rv)?),
            ];
            for (condition, lhs) in checks {
                if let Some(pair) = lhs.pairs().find(|&(a, b)| !rv.contains(a, b)) {
                    return Ok(Some(PhiViolation {
                        condition,
                        vertical: vname.clone(),
                        horizontal: hname.clone(),
                        pair,
                    }));
                }
            }
        }
    }
    Ok(None)
}

pub fn phi_conditions(f: &Frame, vertical: &ModalityAlphabet, horizontal: &ModalityAlphabet) -> Result<bool> {
    Ok(phi_violation(f, vertical, horizontal)?.is_none())
}

fn union_of(f: &Frame, idx: &[usize]) -> Relation {
    let mut acc = Relation::empty(f.size());
    for &i in idx {
        acc = acc.union(f.relation(i)).expect("same universe");
    }
    acc
}

/// Whether `(V ∪ H)* = V* ∘ H*` for the unions of the vertical and the
/// horizontal relations.
pub fn star_factorizes(f: &Frame, vertical: &ModalityAlphabet, horizontal: &ModalityAlphabet) -> Result<bool> {
    let (vs, hs) = check_split(f, vertical, horizontal)?;
    let v = union_of(f, &vs);
    let h = union_of(f, &hs);
    let lhs = v.union(&h)?.star();
    let rhs = v.star().compose(&h.star())?;
    Ok(lhs == rhs)
}

/// Least world whose cone is the whole frame.
pub fn find_root(f: &Frame) -> Option<usize> {
    let reach = f.union_relation().star();
    (0..f.size()).find(|&a| reach.successors(a).is_full())
}

/// The cover of a rooted frame together with its verification results.
#[derive(Debug, Clone)]
pub struct Cover {
    /// Lexicographic sum of the vertical cone of the root with the
    /// horizontal cones of its worlds.
    pub cover: SumFrame,
    /// Projection `(i, a) ↦ a` onto the original frame.
    pub map: WorldMap,
    pub pmorphism: Option<PmorphismViolation>,
    pub surjective: bool,
    pub star_factorizes: bool,
}

impl Cover {
    pub fn verified(&self) -> bool {
        self.pmorphism.is_none() && self.surjective && self.star_factorizes
    }
}

/// Builds the cover of `f` at `root`: the index is the vertical frame
/// restricted to `V*(root)`, summand `i` is the horizontal frame restricted
/// to `H*(i)`, and every `(i, a)` maps to `a`.
pub fn oplus_cover(f: &Frame, vertical: &ModalityAlphabet, horizontal: &ModalityAlphabet, root: usize) -> Result<Cover> {
    let (vs, hs) = check_split(f, vertical, horizontal)?;
    if root >= f.size() {
        return Err(Error::WorldOutOfRange {
            world: root,
            n: f.size(),
        });
    }
    if let Some(w) = phi_violation(f, vertical, horizontal)? {
        return Err(Error::Precondition(format!("interaction condition fails: {w}")));
    }
    if !f.union_relation().star().successors(root).is_full() {
        return Err(Error::NotARoot(root));
    }
    let v_star = union_of(f, &vs).star();
    let h_star = union_of(f, &hs).star();
    let vframe = f.project(vertical)?;
    let hframe = f.project(horizontal)?;
    let (index, index_map) = vframe.restriction(v_star.successors(root))?;
    let mut index_worlds = vec![0; index.size()];
    for (old, new) in index_map.iter().enumerate() {
        if let Some(new) = new {
            index_worlds[*new] = old;
        }
    }
    let mut summands = Vec::with_capacity(index.size());
    let mut inner_worlds = Vec::with_capacity(index.size());
    for &i in &index_worlds {
        let cone = h_star.successors(i);
        summands.push(hframe.restriction(cone)?.0);
        inner_worlds.push(cone.to_vec());
    }
    let cover = lex_sum(&index, &summands)?;
    let map: Vec<usize> = (0..cover.frame.size())
        .map(|x| inner_worlds[cover.index_of[x]][cover.inner_of[x]])
        .collect();
    let map = WorldMap::new(cover.frame.clone(), f.clone(), map)?;
    Ok(Cover {
        pmorphism: pmorphism_violation(&map),
        surjective: map.is_surjective(),
        star_factorizes: star_factorizes(f, vertical, horizontal)?,
        cover,
        map,
    })
}
