//! Partitions of a frame's domain, tuned-ness, coarsest tuned refinement,
//! and the correspondence between tuned partitions and finite subalgebras
//! of the complex algebra.
//!
//! A partition `U` is tuned in `F` when, for every relation `R` of `F` and
//! all blocks `U, V`, some `a ∈ U` having an `R`-successor in `V` forces
//! every `a ∈ U` to have one. Tuned partitions are exactly the atom sets of
//! finite subalgebras of `Alg(F)`, so the coarsest tuned refinement of the
//! partition induced by `P_0..P_{k-1}` has `log2 |⟨P⟩|` blocks.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::frame::group_by_key;
use crate::{Error, Exec, Frame, Result, WorldSet};

/// A partition of `0..n` in canonical form: blocks numbered in order of
/// their least element.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    n: usize,
    class_of: Vec<usize>,
    blocks: Vec<WorldSet>,
}

impl Partition {
    /// Builds the partition whose classes are the worlds with equal labels.
    pub fn from_labels<K: std::hash::Hash + Eq>(labels: &[K]) -> Partition {
        let class_of = group_by_key(labels);
        Self::from_canonical_ids(class_of)
    }

    fn from_canonical_ids(class_of: Vec<usize>) -> Partition {
        let n = class_of.len();
        let count = class_of.iter().map(|&c| c + 1).max().unwrap_or(0);
        let mut blocks = vec![WorldSet::empty(n); count];
        for (a, &c) in class_of.iter().enumerate() {
            blocks[c].insert(a);
        }
        Partition {
            n,
            class_of,
            blocks,
        }
    }

    /// Validates that `blocks` are nonempty, disjoint and cover `0..n`.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Partition> {
        let mut label = vec![usize::MAX; n];
        for (i, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Invalid(format!("block {i} is empty")));
            }
            for &a in block {
                if a >= n {
                    return Err(Error::WorldOutOfRange { world: a, n });
                }
                if label[a] != usize::MAX {
                    return Err(Error::Invalid(format!("world {a} occurs in two blocks")));
                }
                label[a] = i;
            }
        }
        if let Some(a) = label.iter().position(|&l| l == usize::MAX) {
            return Err(Error::Invalid(format!("world {a} is not covered")));
        }
        Ok(Partition::from_labels(&label))
    }

    /// The one-block partition (empty when `n = 0`).
    pub fn trivial(n: usize) -> Partition {
        Partition::from_canonical_ids(vec![0; n])
    }

    pub fn discrete(n: usize) -> Partition {
        Partition::from_canonical_ids((0..n).collect())
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[WorldSet] {
        &self.blocks
    }

    pub fn class_of(&self, a: usize) -> usize {
        self.class_of[a]
    }

    pub fn labels(&self) -> &[usize] {
        &self.class_of
    }

    pub fn block_of(&self, a: usize) -> &WorldSet {
        &self.blocks[self.class_of[a]]
    }

    pub fn same_block(&self, a: usize, b: usize) -> bool {
        self.class_of[a] == self.class_of[b]
    }

    pub fn to_vecs(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(WorldSet::to_vec).collect()
    }

    /// Common refinement: `a ~ b` iff both partitions relate them.
    pub fn meet(&self, other: &Partition) -> Result<Partition> {
        check_size(self.n, other.n)?;
        let labels: Vec<(usize, usize)> = (0..self.n)
            .map(|a| (self.class_of[a], other.class_of[a]))
            .collect();
        Ok(Partition::from_labels(&labels))
    }
}

fn check_size(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::SizeMismatch { left, right });
    }
    Ok(())
}

impl fmt::Display for Partition {
    /// `0,1|2` style: blocks separated by `|`, worlds by `,`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            for (j, a) in b.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition({self})")
    }
}

impl Partition {
    /// Parses the `0,1|2` notation; the domain size is inferred as one more
    /// than the largest world. The empty string is the partition of `∅`.
    pub fn parse(text: &str) -> Result<Partition> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Partition::trivial(0));
        }
        let mut blocks = Vec::new();
        for part in text.split('|') {
            let mut block = Vec::new();
            for w in part.split(',') {
                let w = w.trim();
                let a = w
                    .parse::<usize>()
                    .map_err(|_| Error::Invalid(format!("bad world `{w}` in partition")))?;
                block.push(a);
            }
            blocks.push(block);
        }
        let n = blocks.iter().flatten().map(|&a| a + 1).max().unwrap_or(0);
        Partition::from_blocks(n, &blocks)
    }

    /// Like [`Partition::parse`] but against a known domain size.
    pub fn parse_for(text: &str, n: usize) -> Result<Partition> {
        let p = Partition::parse(text)?;
        if p.n != n {
            return Err(Error::Invalid(format!(
                "partition covers 0..{} but the frame has {n} worlds",
                p.n
            )));
        }
        Ok(p)
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Partition> {
        Partition::parse(s)
    }
}

/// Partition induced by a family of sets: `a ~ b` iff they belong to the
/// same members of `sets`.
pub fn induced_partition(n: usize, sets: &[WorldSet]) -> Result<Partition> {
    for s in sets {
        check_size(n, s.universe())?;
    }
    let profiles: Vec<Vec<bool>> = (0..n)
        .map(|a| sets.iter().map(|s| s.contains(a)).collect())
        .collect();
    Ok(Partition::from_labels(&profiles))
}

/// `u` refines `v`: every block of `v` is a union of blocks of `u`.
pub fn refines(u: &Partition, v: &Partition) -> Result<bool> {
    check_size(u.n, v.n)?;
    Ok(u.blocks
        .iter()
        .all(|b| b.iter().all(|a| v.class_of[a] == v.class_of[b.first().unwrap()])))
}

/// A block pair and world violating tuned-ness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuneViolation {
    pub modality: usize,
    /// Block index of `world`.
    pub from_block: usize,
    /// Block reached from some member of `from_block` but not from `world`.
    pub to_block: usize,
    pub world: usize,
}

/// Per-world set of blocks reached through `r`, as a bitset over block ids.
fn reached_blocks(f: &Frame, modality: usize, u: &Partition, a: usize) -> WorldSet {
    let mut out = WorldSet::empty(u.len());
    for b in f.relation(modality).successors(a) {
        out.insert(u.class_of[b]);
    }
    out
}

/// First violation of tuned-ness, scanning modalities, blocks and worlds in
/// increasing order.
pub fn tuning_violation(f: &Frame, u: &Partition) -> Result<Option<TuneViolation>> {
    check_size(f.size(), u.n)?;
    for m in 0..f.alphabet().len() {
        for (i, block) in u.blocks.iter().enumerate() {
            let per_world: Vec<(usize, WorldSet)> = block
                .iter()
                .map(|a| (a, reached_blocks(f, m, u, a)))
                .collect();
            let mut any = WorldSet::empty(u.len());
            for (_, r) in &per_world {
                any.union_with(r);
            }
            for (a, r) in &per_world {
                if let Some(v) = any.difference(r).first() {
                    return Ok(Some(TuneViolation {
                        modality: m,
                        from_block: i,
                        to_block: v,
                        world: *a,
                    }));
                }
            }
        }
    }
    Ok(None)
}

pub fn is_tuned(f: &Frame, u: &Partition) -> Result<bool> {
    Ok(tuning_violation(f, u)?.is_none())
}

/// The coarsest refinement of `v` that is tuned in `f`.
pub fn coarsest_tuned_refinement(f: &Frame, v: &Partition) -> Result<Partition> {
    coarsest_tuned_refinement_with(f, v, Exec::default())
}

/// Frames below this size refine sequentially regardless of `exec`.
const PARALLEL_REFINE_THRESHOLD: usize = 512;

/// Synchronous splitting rounds: each world's signature is its current
/// block plus, per modality, the set of blocks it reaches. Rounds stop when
/// the block count is stable.
pub fn coarsest_tuned_refinement_with(f: &Frame, v: &Partition, exec: Exec) -> Result<Partition> {
    check_size(f.size(), v.n)?;
    let n = f.size();
    let mods = f.alphabet().len();
    let exec = if n < PARALLEL_REFINE_THRESHOLD {
        Exec::Sequential
    } else {
        exec
    };
    let mut cur = v.clone();
    loop {
        let sigs: Vec<(usize, Vec<WorldSet>)> = exec.map_range(n, |a| {
            (
                cur.class_of[a],
                (0..mods).map(|m| reached_blocks(f, m, &cur, a)).collect(),
            )
        });
        let next = Partition::from_labels(&sigs);
        if next.len() == cur.len() {
            return Ok(next);
        }
        cur = next;
    }
}

/// A family of subsets of `0..n`.
#[derive(Clone, PartialEq, Eq)]
pub struct SubsetFamily {
    n: usize,
    members: BTreeSet<WorldSet>,
}

impl SubsetFamily {
    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: &WorldSet) -> bool {
        self.members.contains(s)
    }

    pub fn members(&self) -> impl Iterator<Item = &WorldSet> {
        self.members.iter()
    }

    pub fn is_subfamily_of(&self, other: &SubsetFamily) -> bool {
        self.members.is_subset(&other.members)
    }

    /// Minimal nonempty members, ordered by least element.
    pub fn atoms(&self) -> Vec<WorldSet> {
        let nonempty: Vec<&WorldSet> = self.members.iter().filter(|s| !s.is_empty()).collect();
        let mut atoms: Vec<WorldSet> = nonempty
            .iter()
            .filter(|s| !nonempty.iter().any(|t| t != *s && t.is_subset(s)))
            .map(|s| (*s).clone())
            .collect();
        atoms.sort_by_key(|s| s.first());
        atoms
    }

    /// Whether the family is closed under complement, union and every
    /// preimage operator of `f`.
    pub fn is_subalgebra_of(&self, f: &Frame) -> bool {
        let full = WorldSet::full(self.n);
        if !self.members.contains(&WorldSet::empty(self.n)) || !self.members.contains(&full) {
            return false;
        }
        self.members.iter().all(|x| {
            self.members.contains(&x.complement())
                && f.relations().iter().all(|r| self.members.contains(&r.preimage(x)))
                && self.members.iter().all(|y| self.members.contains(&x.union(y)))
        })
    }
}

impl fmt::Debug for SubsetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members.iter()).finish()
    }
}

/// The subalgebra of `Alg(f)` generated by `generators`: the least family
/// containing them and `∅`, closed under complement, union and
/// `R^{-1}[·]` for every relation. Worklist closure, exponential in the
/// worst case.
pub fn subalgebra_closure(f: &Frame, generators: &[WorldSet]) -> Result<SubsetFamily> {
    let n = f.size();
    for g in generators {
        check_size(n, g.universe())?;
    }
    let mut members: BTreeSet<WorldSet> = BTreeSet::new();
    let mut queue: VecDeque<WorldSet> = VecDeque::new();
    let add = |s: WorldSet, members: &mut BTreeSet<WorldSet>, queue: &mut VecDeque<WorldSet>| {
        if members.insert(s.clone()) {
            queue.push_back(s);
        }
    };
    add(WorldSet::empty(n), &mut members, &mut queue);
    for g in generators {
        add(g.clone(), &mut members, &mut queue);
    }
    while let Some(x) = queue.pop_front() {
        let mut fresh = vec![x.complement()];
        fresh.extend(f.relations().iter().map(|r| r.preimage(&x)));
        fresh.extend(members.iter().map(|y| x.union(y)));
        for s in fresh {
            add(s, &mut members, &mut queue);
        }
    }
    Ok(SubsetFamily { n, members })
}

/// All unions of blocks of `u`; `2^{|u|}` members.
pub fn subalgebra_from_partition(u: &Partition) -> SubsetFamily {
    assert!(u.len() < 32, "2^{} block unions is too many to list", u.len());
    let mut members = BTreeSet::new();
    for mask in 0u64..(1u64 << u.len()) {
        let mut s = WorldSet::empty(u.n);
        for (i, b) in u.blocks.iter().enumerate() {
            if mask >> i & 1 == 1 {
                s.union_with(b);
            }
        }
        members.insert(s);
    }
    SubsetFamily { n: u.n, members }
}

/// Number of partitions of an `n`-set into at most `max_blocks` blocks.
pub fn count_partitions(n: usize, max_blocks: usize) -> u128 {
    // Stirling numbers of the second kind, row by row.
    let mut row = vec![1u128];
    for i in 1..=n {
        let mut next = vec![0u128; i + 1];
        for (j, slot) in next.iter_mut().enumerate().skip(1) {
            let stay = if j < i { (j as u128).saturating_mul(row[j]) } else { 0 };
            *slot = stay.saturating_add(row[j - 1]);
        }
        row = next;
    }
    row.iter().take(max_blocks + 1).fold(0u128, |a, &b| a.saturating_add(b))
}

/// Every partition of `0..n` into at most `max_blocks` blocks, via
/// restricted growth strings in lexicographic order.
pub fn enumerate_partitions(n: usize, max_blocks: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    if n == 0 {
        out.push(Partition::trivial(0));
        return out;
    }
    if max_blocks == 0 {
        return out;
    }
    let mut rgs = vec![0usize; n];
    fn go(i: usize, used: usize, rgs: &mut Vec<usize>, max_blocks: usize, out: &mut Vec<Partition>) {
        if i == rgs.len() {
            out.push(Partition::from_canonical_ids(rgs.clone()));
            return;
        }
        for c in 0..=used.min(max_blocks - 1) {
            rgs[i] = c;
            go(i + 1, used.max(c + 1), rgs, max_blocks, out);
        }
    }
    go(1, 1, &mut rgs, max_blocks, &mut out);
    out
}

/// Default candidate budget for [`tunability_profile`].
pub const DEFAULT_PROFILE_BUDGET: u128 = 1_000_000;

/// Largest coarsest tuned refinement over all partitions with at most `2^k`
/// blocks.
pub fn tunability_profile(f: &Frame, k: u32, budget: u128) -> Result<usize> {
    tunability_profile_with(f, k, budget, Exec::default())
}

pub fn tunability_profile_with(f: &Frame, k: u32, budget: u128, exec: Exec) -> Result<usize> {
    let n = f.size();
    let max_blocks = if k >= usize::BITS - 1 {
        usize::MAX
    } else {
        1usize << k
    }
    .min(n.max(1));
    let needed = count_partitions(n, max_blocks);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let parts = enumerate_partitions(n, max_blocks);
    let sizes = exec.map(&parts, |v| {
        coarsest_tuned_refinement_with(f, v, Exec::Sequential).map(|u| u.len())
    });
    sizes
        .into_iter()
        .try_fold(0, |acc, s| Ok(acc.max(s?)))
}

/// Block-count histogram helper for reports.
pub fn block_sizes(u: &Partition) -> HashMap<usize, usize> {
    let mut out = HashMap::new();
    for b in u.blocks() {
        *out.entry(b.len()).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{ModalityAlphabet, Relation};

    fn uni(n: usize, pairs: &[(usize, usize)]) -> Frame {
        Frame::unimodal("a", Relation::from_pairs(n, pairs.iter().copied()))
    }

    fn ws(n: usize, xs: &[usize]) -> WorldSet {
        WorldSet::from_worlds(n, xs.iter().copied())
    }

    #[test]
    fn canonical_form() {
        let p = Partition::from_labels(&['x', 'y', 'x', 'z']);
        assert_eq!(p.to_vecs(), vec![vec![0, 2], vec![1], vec![3]]);
        assert_eq!(p.to_string(), "0,2|1|3");
        assert_eq!(Partition::parse("3|1|0,2").unwrap(), p);
        assert!(Partition::parse("0,1|1").is_err());
        assert!(Partition::parse("0|2").is_err());
        assert!(Partition::parse_for("0|1", 3).is_err());
        assert_eq!(Partition::parse("").unwrap().len(), 0);
    }

    #[test]
    fn induced_partition_examples() {
        assert_eq!(
            induced_partition(3, &[ws(3, &[0, 1])]).unwrap().to_vecs(),
            vec![vec![0, 1], vec![2]]
        );
        assert_eq!(induced_partition(3, &[]).unwrap().to_vecs(), vec![vec![0, 1, 2]]);
        assert_eq!(
            induced_partition(2, &[ws(2, &[0]), ws(2, &[1])]).unwrap(),
            Partition::discrete(2)
        );
    }

    #[test]
    fn refines_examples() {
        let fine = Partition::discrete(2);
        let coarse = Partition::trivial(2);
        assert!(refines(&fine, &coarse).unwrap());
        assert!(!refines(&coarse, &fine).unwrap());
        assert!(refines(&fine, &fine).unwrap());
        assert!(refines(&Partition::trivial(3), &Partition::discrete(2)).is_err());
    }

    #[test]
    fn is_tuned_examples() {
        let f = uni(2, &[(0, 1)]);
        assert!(is_tuned(&f, &Partition::discrete(2)).unwrap());
        let w = tuning_violation(&f, &Partition::trivial(2)).unwrap().unwrap();
        assert_eq!(
            w,
            TuneViolation {
                modality: 0,
                from_block: 0,
                to_block: 0,
                world: 1
            }
        );
        let full = Frame::unimodal("a", Relation::full(4));
        for p in enumerate_partitions(4, 4) {
            assert!(is_tuned(&full, &p).unwrap());
        }
    }

    #[test]
    fn coarsest_refinement_examples() {
        let f = uni(2, &[(0, 1)]);
        assert_eq!(
            coarsest_tuned_refinement(&f, &Partition::trivial(2)).unwrap(),
            Partition::discrete(2)
        );
        let full = Frame::unimodal("a", Relation::full(2));
        assert_eq!(
            coarsest_tuned_refinement(&full, &Partition::trivial(2)).unwrap(),
            Partition::trivial(2)
        );
        let chain = uni(3, &[(0, 1), (1, 2)]);
        assert_eq!(
            coarsest_tuned_refinement(&chain, &Partition::trivial(3)).unwrap(),
            Partition::discrete(3)
        );
    }

    #[test]
    fn parallel_refinement_matches_sequential() {
        let n = 700;
        let f = Frame::unimodal("a", Relation::from_pairs(n, (0..n).map(|a| (a, (a * 7 + 3) % n))));
        let v = induced_partition(n, &[WorldSet::from_worlds(n, (0..n).filter(|a| a % 5 == 0))]).unwrap();
        let seq = coarsest_tuned_refinement_with(&f, &v, Exec::Sequential).unwrap();
        let par = coarsest_tuned_refinement_with(&f, &v, Exec::Parallel).unwrap();
        assert_eq!(seq, par);
        assert!(is_tuned(&f, &seq).unwrap());
    }

    #[test]
    fn closure_examples() {
        let f = uni(2, &[(0, 1)]);
        let c = subalgebra_closure(&f, &[]).unwrap();
        assert_eq!(c.len(), 4);
        let full = Frame::unimodal("a", Relation::full(2));
        let c = subalgebra_closure(&full, &[]).unwrap();
        assert_eq!(c.members().cloned().collect::<Vec<_>>(), vec![ws(2, &[]), ws(2, &[0, 1])]);
        let singletons: Vec<WorldSet> = (0..3).map(|a| WorldSet::singleton(3, a)).collect();
        assert_eq!(subalgebra_closure(&uni(3, &[]), &singletons).unwrap().len(), 8);
    }

    #[test]
    fn closure_is_subalgebra() {
        let f = Frame::new(
            ModalityAlphabet::of(&["a", "b"]),
            4,
            vec![
                Relation::from_pairs(4, [(0, 1), (1, 2)]),
                Relation::from_pairs(4, [(3, 3), (2, 0)]),
            ],
        )
        .unwrap();
        let c = subalgebra_closure(&f, &[ws(4, &[1])]).unwrap();
        assert!(c.is_subalgebra_of(&f));
    }

    #[test]
    fn from_partition_examples() {
        assert_eq!(subalgebra_from_partition(&Partition::discrete(2)).len(), 4);
        let t = subalgebra_from_partition(&Partition::trivial(2));
        assert_eq!(t.members().cloned().collect::<Vec<_>>(), vec![ws(2, &[]), ws(2, &[0, 1])]);
        let e = subalgebra_from_partition(&Partition::trivial(0));
        assert_eq!(e.len(), 1);
    }

    #[test]
    fn partition_counts() {
        // Bell numbers
        let bell = [1u128, 1, 2, 5, 15, 52, 203, 877, 4140];
        for (n, &b) in bell.iter().enumerate() {
            assert_eq!(count_partitions(n, n), b);
            assert_eq!(enumerate_partitions(n, n.max(1)).len() as u128, b);
        }
        assert_eq!(count_partitions(4, 2), 8);
        assert_eq!(enumerate_partitions(4, 2).len(), 8);
    }

    #[test]
    fn profile_examples() {
        let full = Frame::unimodal("a", Relation::full(5));
        for k in 0..4u32 {
            assert_eq!(
                tunability_profile(&full, k, DEFAULT_PROFILE_BUDGET).unwrap(),
                (1usize << k).min(5)
            );
        }
        assert_eq!(tunability_profile(&uni(2, &[(0, 1)]), 0, 100).unwrap(), 2);
        assert_eq!(tunability_profile(&uni(0, &[]), 3, 100).unwrap(), 0);
        assert!(matches!(
            tunability_profile(&uni(10, &[]), 4, 10),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
