//! Finite multimodal Kripke frames and their structural invariants
//! (skeleton, height, pretransitivity degree).

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::{Error, Relation, Result, WorldSet};

/// Ordered, duplicate-free list of modality names. The position of a name
/// is the index of its relation in every frame over this alphabet.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModalityAlphabet {
    names: Arc<[String]>,
}

pub(crate) fn valid_modality_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl ModalityAlphabet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, name) in names.iter().enumerate() {
            if !valid_modality_name(name) {
                return Err(Error::InvalidModalityName(name.clone()));
            }
            if names[..i].contains(name) {
                return Err(Error::DuplicateModality(name.clone()));
            }
        }
        Ok(ModalityAlphabet {
            names: names.into(),
        })
    }

    /// Convenience for literals in tests and examples; panics on bad names.
    pub fn of(names: &[&str]) -> Self {
        Self::new(names.iter().copied()).expect("valid alphabet")
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn resolve(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownModality(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    /// Concatenation of two disjoint alphabets.
    pub fn disjoint_union(&self, other: &ModalityAlphabet) -> Result<ModalityAlphabet> {
        if let Some(shared) = self.names.iter().find(|n| other.contains(n)) {
            return Err(Error::OverlappingAlphabets(shared.clone()));
        }
        ModalityAlphabet::new(self.names.iter().chain(other.names.iter()).cloned())
    }
}

impl fmt::Debug for ModalityAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names.iter()).finish()
    }
}

impl fmt::Display for ModalityAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.names.join(","))
    }
}

/// A finite `A`-frame: worlds `0..n` and one relation per modality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    alphabet: ModalityAlphabet,
    n: usize,
    relations: Vec<Relation>,
}

impl Frame {
    pub fn new(alphabet: ModalityAlphabet, n: usize, relations: Vec<Relation>) -> Result<Self> {
        if relations.len() != alphabet.len() {
            return Err(Error::ArityMismatch {
                expected: alphabet.len(),
                found: relations.len(),
            });
        }
        for r in &relations {
            if r.universe() != n {
                return Err(Error::SizeMismatch {
                    left: n,
                    right: r.universe(),
                });
            }
        }
        Ok(Frame {
            alphabet,
            n,
            relations,
        })
    }

    /// All relations empty.
    pub fn discrete(alphabet: ModalityAlphabet, n: usize) -> Self {
        let relations = vec![Relation::empty(n); alphabet.len()];
        Frame {
            alphabet,
            n,
            relations,
        }
    }

    /// Unimodal frame over the alphabet `{name}`.
    pub fn unimodal(name: &str, relation: Relation) -> Self {
        let n = relation.universe();
        Frame::new(ModalityAlphabet::of(&[name]), n, vec![relation]).expect("consistent")
    }

    pub fn alphabet(&self) -> &ModalityAlphabet {
        &self.alphabet
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    #[inline]
    pub fn relation(&self, idx: usize) -> &Relation {
        &self.relations[idx]
    }

    pub fn relation_named(&self, name: &str) -> Result<&Relation> {
        Ok(&self.relations[self.alphabet.resolve(name)?])
    }

    pub fn domain(&self) -> WorldSet {
        WorldSet::full(self.n)
    }

    /// Replaces one relation, keeping everything else.
    pub fn with_relation(&self, idx: usize, relation: Relation) -> Result<Frame> {
        let mut relations = self.relations.clone();
        if relation.universe() != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: relation.universe(),
            });
        }
        relations[idx] = relation;
        Frame::new(self.alphabet.clone(), self.n, relations)
    }

    /// The same frame with its relations permuted into `order`, which must
    /// name exactly the modalities of this frame.
    pub fn reorder(&self, order: &ModalityAlphabet) -> Result<Frame> {
        if order.len() != self.alphabet.len() {
            return Err(Error::AlphabetMismatch {
                expected: self.alphabet.to_string(),
                found: order.to_string(),
            });
        }
        let relations = order
            .names()
            .iter()
            .map(|name| self.relation_named(name).cloned())
            .collect::<Result<Vec<_>>>()?;
        Frame::new(order.clone(), self.n, relations)
    }

    /// The subframe on the modalities of `sub`, in that order.
    pub fn project(&self, sub: &ModalityAlphabet) -> Result<Frame> {
        let relations = sub
            .names()
            .iter()
            .map(|name| self.relation_named(name).cloned())
            .collect::<Result<Vec<_>>>()?;
        Frame::new(sub.clone(), self.n, relations)
    }

    /// `R_F`, the union of all relations.
    pub fn union_relation(&self) -> Relation {
        let mut acc = Relation::empty(self.n);
        for r in &self.relations {
            acc = acc.union(r).expect("same universe");
        }
        acc
    }

    /// `F^r`: every relation joined with the diagonal.
    pub fn reflexive_closure(&self) -> Frame {
        self.map_relations(Relation::reflexive_closure)
    }

    /// Every relation with the diagonal removed.
    pub fn irreflexive_part(&self) -> Frame {
        self.map_relations(Relation::irreflexive_part)
    }

    fn map_relations(&self, f: impl Fn(&Relation) -> Relation) -> Frame {
        Frame {
            alphabet: self.alphabet.clone(),
            n: self.n,
            relations: self.relations.iter().map(f).collect(),
        }
    }

    /// `F↾Y`. Worlds of `ys` are renumbered in increasing order; the second
    /// component maps each old world to its new index.
    pub fn restriction(&self, ys: &WorldSet) -> Result<(Frame, Vec<Option<usize>>)> {
        if ys.universe() != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: ys.universe(),
            });
        }
        let keep = ys.to_vec();
        let mut index = vec![None; self.n];
        for (i, &a) in keep.iter().enumerate() {
            index[a] = Some(i);
        }
        let relations = self.relations.iter().map(|r| r.induced(&keep)).collect();
        Ok((
            Frame {
                alphabet: self.alphabet.clone(),
                n: keep.len(),
                relations,
            },
            index,
        ))
    }

    /// The cone `F↑a = F↾R*_F(a)`.
    pub fn cone(&self, a: usize) -> Result<(Frame, Vec<Option<usize>>)> {
        if a >= self.n {
            return Err(Error::WorldOutOfRange { world: a, n: self.n });
        }
        let reach = self.union_relation().star().successors(a).clone();
        self.restriction(&reach)
    }

    pub fn skeleton(&self) -> Skeleton {
        Skeleton::of_preorder(&self.union_relation().star())
    }

    pub fn height(&self) -> usize {
        self.skeleton().height()
    }

    /// Least `m` with `R_F^{m+1} ⊆ R_F^{≤m}`.
    pub fn transitivity_degree(&self) -> usize {
        transitivity_degree(&self.union_relation())
    }
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("Frame");
        d.field("worlds", &self.n);
        for (name, r) in self.alphabet.names().iter().zip(&self.relations) {
            d.field(name, r);
        }
        d.finish()
    }
}

/// Least `m` such that `r^{m+1} ⊆ r^{≤m}`; at most `n²` since `r^{≤m}`
/// grows strictly until it stabilizes.
pub fn transitivity_degree(r: &Relation) -> usize {
    let n = r.universe();
    let mut upto = Relation::diagonal(n);
    let mut next = r.clone();
    let mut m = 0;
    loop {
        if next.is_subset(&upto) {
            return m;
        }
        upto = upto.union(&next).expect("same universe");
        next = next.compose(r).expect("same universe");
        m += 1;
    }
}

/// Clusters of a preorder and the strict order between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    /// Clusters, ordered by least element.
    pub clusters: Vec<WorldSet>,
    /// `cluster_of[a]` indexes `clusters`.
    pub cluster_of: Vec<usize>,
    /// Pairs `(i, j)`, `i != j`, with cluster `i` below cluster `j`.
    pub order: Vec<(usize, usize)>,
}

impl Skeleton {
    /// Skeleton of a reflexive-transitive relation.
    pub fn of_preorder(star: &Relation) -> Skeleton {
        let n = star.universe();
        let conv = star.converse();
        let mut cluster_of = vec![usize::MAX; n];
        let mut clusters = Vec::new();
        for a in 0..n {
            if cluster_of[a] != usize::MAX {
                continue;
            }
            let c = star.successors(a).intersection(conv.successors(a));
            for b in &c {
                cluster_of[b] = clusters.len();
            }
            clusters.push(c);
        }
        let mut order = Vec::new();
        for (i, ci) in clusters.iter().enumerate() {
            let rep = ci.first().expect("clusters are nonempty");
            for (j, cj) in clusters.iter().enumerate() {
                if i != j && star.successors(rep).intersects(cj) {
                    order.push((i, j));
                }
            }
        }
        Skeleton {
            clusters,
            cluster_of,
            order,
        }
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Number of clusters in a longest chain; 0 when there are no clusters.
    pub fn height(&self) -> usize {
        let k = self.clusters.len();
        let mut above: Vec<Vec<usize>> = vec![Vec::new(); k];
        for &(i, j) in &self.order {
            above[i].push(j);
        }
        let mut memo = vec![0usize; k];
        fn longest(i: usize, above: &[Vec<usize>], memo: &mut [usize]) -> usize {
            if memo[i] != 0 {
                return memo[i];
            }
            let best = above[i]
                .iter()
                .map(|&j| longest(j, above, memo))
                .max()
                .unwrap_or(0);
            memo[i] = best + 1;
            memo[i]
        }
        (0..k).map(|i| longest(i, &above, &mut memo)).max().unwrap_or(0)
    }

    /// Clusters that reach no other cluster.
    pub fn maximal(&self) -> Vec<bool> {
        let mut max = vec![true; self.clusters.len()];
        for &(i, _) in &self.order {
            max[i] = false;
        }
        max
    }
}

/// A cluster of `(r↾V)*` on `V`, flagged when it reaches no other cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub worlds: WorldSet,
    pub maximal: bool,
}

/// Clusters of the preorder `(r ∩ V×V)*` on `V`, ordered by least element.
pub fn clusters_of(r: &Relation, restricted_to: &WorldSet) -> Result<Vec<Cluster>> {
    if restricted_to.universe() != r.universe() {
        return Err(Error::SizeMismatch {
            left: r.universe(),
            right: restricted_to.universe(),
        });
    }
    let keep = restricted_to.to_vec();
    let local = r.induced(&keep).star();
    let sk = Skeleton::of_preorder(&local);
    let maximal = sk.maximal();
    let n = r.universe();
    Ok(sk
        .clusters
        .iter()
        .zip(maximal)
        .map(|(c, maximal)| Cluster {
            worlds: WorldSet::from_worlds(n, c.iter().map(|i| keep[i])),
            maximal,
        })
        .collect())
}

/// Index of each name of `names` in `alphabet`.
pub(crate) fn resolve_all(alphabet: &ModalityAlphabet, names: &ModalityAlphabet) -> Result<Vec<usize>> {
    names.names().iter().map(|n| alphabet.resolve(n)).collect()
}

/// Groups world indices by key, preserving first-occurrence order.
pub(crate) fn group_by_key<K: std::hash::Hash + Eq>(keys: &[K]) -> Vec<usize> {
    let mut ids: HashMap<&K, usize> = HashMap::new();
    keys.iter()
        .map(|k| {
            let next = ids.len();
            *ids.entry(k).or_insert(next)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni(n: usize, pairs: &[(usize, usize)]) -> Frame {
        Frame::unimodal("a", Relation::from_pairs(n, pairs.iter().copied()))
    }

    #[test]
    fn reflexive_closure_examples() {
        let f = uni(2, &[(0, 1)]);
        assert_eq!(f.reflexive_closure(), uni(2, &[(0, 0), (0, 1), (1, 1)]));
        let r = f.reflexive_closure();
        assert_eq!(r.reflexive_closure(), r);
        assert_eq!(
            Frame::discrete(ModalityAlphabet::of(&["a", "b"]), 3).reflexive_closure(),
            Frame::new(
                ModalityAlphabet::of(&["a", "b"]),
                3,
                vec![Relation::diagonal(3), Relation::diagonal(3)]
            )
            .unwrap()
        );
    }

    #[test]
    fn irreflexive_part_examples() {
        assert_eq!(
            uni(2, &[(0, 0), (0, 1), (1, 1)]).irreflexive_part(),
            uni(2, &[(0, 1)])
        );
        assert_eq!(uni(2, &[(0, 1)]).irreflexive_part(), uni(2, &[(0, 1)]));
        assert_eq!(uni(3, &[(0, 0), (1, 1), (2, 2)]).irreflexive_part(), uni(3, &[]));
    }

    #[test]
    fn restriction_examples() {
        let chain = uni(3, &[(0, 1), (1, 2)]);
        let (sub, idx) = chain.restriction(&WorldSet::from_worlds(3, [0, 2])).unwrap();
        assert_eq!(sub, uni(2, &[]));
        assert_eq!(idx, vec![Some(0), None, Some(1)]);
        let (same, _) = chain.restriction(&chain.domain()).unwrap();
        assert_eq!(same, chain);
        let full = Frame::unimodal("a", Relation::full(3));
        let (sub, _) = full.restriction(&WorldSet::from_worlds(3, [1, 2])).unwrap();
        assert_eq!(sub, Frame::unimodal("a", Relation::full(2)));
        assert!(chain.restriction(&WorldSet::empty(4)).is_err());
    }

    #[test]
    fn union_relation_examples() {
        let f = Frame::new(
            ModalityAlphabet::of(&["a", "b"]),
            2,
            vec![
                Relation::from_pairs(2, [(0, 1)]),
                Relation::from_pairs(2, [(1, 0)]),
            ],
        )
        .unwrap();
        assert_eq!(f.union_relation(), Relation::from_pairs(2, [(0, 1), (1, 0)]));
        assert_eq!(uni(2, &[(0, 1)]).union_relation(), Relation::from_pairs(2, [(0, 1)]));
        assert!(Frame::discrete(ModalityAlphabet::of(&["a", "b"]), 3)
            .union_relation()
            .is_empty());
    }

    #[test]
    fn skeleton_examples() {
        let sk = Frame::unimodal("a", Relation::full(2)).skeleton();
        assert_eq!(sk.clusters, vec![WorldSet::full(2)]);
        assert!(sk.order.is_empty());

        let sk = uni(3, &[(0, 1), (1, 2)]).skeleton();
        assert_eq!(sk.len(), 3);
        assert_eq!(sk.order, vec![(0, 1), (0, 2), (1, 2)]);

        let sk = uni(2, &[(0, 0), (1, 1)]).skeleton();
        assert_eq!(sk.len(), 2);
        assert!(sk.order.is_empty());
    }

    #[test]
    fn height_examples() {
        let rt_chain = uni(3, &[(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)]);
        assert_eq!(rt_chain.height(), 3);
        assert_eq!(Frame::unimodal("a", Relation::full(5)).height(), 1);
        assert_eq!(uni(0, &[]).height(), 0);
    }

    #[test]
    fn transitivity_degree_examples() {
        assert_eq!(uni(3, &[]).transitivity_degree(), 0);
        assert_eq!(uni(3, &[(0, 1), (1, 2)]).transitivity_degree(), 2);
        let rt_chain = uni(3, &[(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)]);
        assert_eq!(rt_chain.transitivity_degree(), 1);
        assert_eq!(uni(0, &[]).transitivity_degree(), 0);
    }

    #[test]
    fn clusters_of_examples() {
        let r = Relation::from_pairs(2, [(0, 1), (1, 0)]);
        assert_eq!(
            clusters_of(&r, &WorldSet::full(2)).unwrap(),
            vec![Cluster {
                worlds: WorldSet::full(2),
                maximal: true
            }]
        );
        let r = Relation::from_pairs(2, [(0, 1)]);
        let cs = clusters_of(&r, &WorldSet::full(2)).unwrap();
        assert_eq!(cs.len(), 2);
        assert_eq!((cs[0].worlds.to_vec(), cs[0].maximal), (vec![0], false));
        assert_eq!((cs[1].worlds.to_vec(), cs[1].maximal), (vec![1], true));
        assert!(clusters_of(&r, &WorldSet::empty(2)).unwrap().is_empty());
    }

    #[test]
    fn clusters_respect_restriction() {
        // 0 -> 1 -> 2 -> 0 but with 1 removed nothing is mutually reachable
        let r = Relation::from_pairs(3, [(0, 1), (1, 2), (2, 0)]);
        let cs = clusters_of(&r, &WorldSet::from_worlds(3, [0, 2])).unwrap();
        assert_eq!(cs.len(), 2);
        assert!(!cs[1].maximal);
        assert!(cs[0].maximal);
    }

    #[test]
    fn alphabet_validation() {
        assert!(matches!(
            ModalityAlphabet::new(["a", "a"]),
            Err(Error::DuplicateModality(_))
        ));
        assert!(ModalityAlphabet::new(["1x"]).is_err());
        assert!(ModalityAlphabet::new(Vec::<String>::new()).unwrap().is_empty());
        let ab = ModalityAlphabet::of(&["a"]).disjoint_union(&ModalityAlphabet::of(&["b"]));
        assert_eq!(ab.unwrap(), ModalityAlphabet::of(&["a", "b"]));
    }
}
