//! Binary relations on `0..n` as bit matrices (one successor row per world).

use std::fmt;

use crate::{Error, Result, WorldSet};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    n: usize,
    rows: Vec<WorldSet>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation {
            n,
            rows: vec![WorldSet::empty(n); n],
        }
    }

    pub fn full(n: usize) -> Self {
        Relation {
            n,
            rows: vec![WorldSet::full(n); n],
        }
    }

    pub fn diagonal(n: usize) -> Self {
        let mut r = Self::empty(n);
        for a in 0..n {
            r.insert(a, a);
        }
        r
    }

    /// Panics on out-of-range endpoints; see [`Relation::try_from_pairs`].
    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(n: usize, pairs: I) -> Self {
        let mut r = Self::empty(n);
        for (a, b) in pairs {
            r.insert(a, b);
        }
        r
    }

    pub fn try_from_pairs<I: IntoIterator<Item = (usize, usize)>>(
        n: usize,
        pairs: I,
    ) -> Result<Self> {
        let mut r = Self::empty(n);
        for (a, b) in pairs {
            for w in [a, b] {
                if w >= n {
                    return Err(Error::WorldOutOfRange { world: w, n });
                }
            }
            r.insert(a, b);
        }
        Ok(r)
    }

    /// Builds `{(a, b) | a, b in 0..n, pred(a, b)}`.
    pub fn from_fn(n: usize, mut pred: impl FnMut(usize, usize) -> bool) -> Self {
        let mut r = Self::empty(n);
        for a in 0..n {
            for b in 0..n {
                if pred(a, b) {
                    r.insert(a, b);
                }
            }
        }
        r
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn contains(&self, a: usize, b: usize) -> bool {
        a < self.n && self.rows[a].contains(b)
    }

    #[inline]
    pub fn insert(&mut self, a: usize, b: usize) {
        self.rows[a].insert(b);
    }

    pub fn remove(&mut self, a: usize, b: usize) {
        if a < self.n {
            self.rows[a].remove(b);
        }
    }

    /// `R(a)`, the successors of `a`.
    #[inline]
    pub fn successors(&self, a: usize) -> &WorldSet {
        &self.rows[a]
    }

    pub fn rows(&self) -> &[WorldSet] {
        &self.rows
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(a, row)| row.iter().map(move |b| (a, b)))
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(WorldSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(WorldSet::is_empty)
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.rows.iter().zip(&other.rows).all(|(a, b)| a.is_subset(b))
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|a| self.contains(a, a))
    }

    fn check_same(&self, other: &Relation) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub fn union(&self, other: &Relation) -> Result<Relation> {
        self.check_same(other)?;
        Ok(Relation {
            n: self.n,
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.union(b))
                .collect(),
        })
    }

    pub fn intersection(&self, other: &Relation) -> Result<Relation> {
        self.check_same(other)?;
        Ok(Relation {
            n: self.n,
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.intersection(b))
                .collect(),
        })
    }

    /// Left-to-right composition: `(a, c)` is in `self ∘ other` iff
    /// `a self b` and `b other c` for some `b`.
    pub fn compose(&self, other: &Relation) -> Result<Relation> {
        self.check_same(other)?;
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out = WorldSet::empty(self.n);
                for b in row {
                    out.union_with(&other.rows[b]);
                }
                out
            })
            .collect();
        Ok(Relation { n: self.n, rows })
    }

    pub fn converse(&self) -> Relation {
        let mut r = Relation::empty(self.n);
        for (a, b) in self.pairs() {
            r.insert(b, a);
        }
        r
    }

    /// Reflexive-transitive closure `R*`, by Warshall's algorithm on rows.
    pub fn star(&self) -> Relation {
        let mut r = self.reflexive_closure();
        for k in 0..self.n {
            let row_k = r.rows[k].clone();
            for a in 0..self.n {
                if r.rows[a].contains(k) {
                    r.rows[a].union_with(&row_k);
                }
            }
        }
        r
    }

    /// Transitive closure `R⁺` (no diagonal added).
    pub fn transitive_closure(&self) -> Relation {
        let mut r = self.clone();
        for k in 0..self.n {
            let row_k = r.rows[k].clone();
            for a in 0..self.n {
                if r.rows[a].contains(k) {
                    r.rows[a].union_with(&row_k);
                }
            }
        }
        r
    }

    pub fn reflexive_closure(&self) -> Relation {
        let mut r = self.clone();
        for a in 0..self.n {
            r.insert(a, a);
        }
        r
    }

    pub fn irreflexive_part(&self) -> Relation {
        let mut r = self.clone();
        for a in 0..self.n {
            r.remove(a, a);
        }
        r
    }

    /// `R^i`, with `R^0` the diagonal.
    pub fn power(&self, i: usize) -> Relation {
        let mut p = Relation::diagonal(self.n);
        for _ in 0..i {
            p = p.compose(self).expect("same universe");
        }
        p
    }

    /// `R^{≤m} = R^0 ∪ R^1 ∪ … ∪ R^m`.
    pub fn up_to_power(&self, m: usize) -> Relation {
        let mut acc = Relation::diagonal(self.n);
        let mut p = Relation::diagonal(self.n);
        for _ in 0..m {
            p = p.compose(self).expect("same universe");
            for (a, row) in acc.rows.iter_mut().zip(&p.rows) {
                a.union_with(row);
            }
        }
        acc
    }

    /// `R^{-1}[Y] = {a | ∃b ∈ Y. a R b}`.
    pub fn preimage(&self, ys: &WorldSet) -> WorldSet {
        let mut out = WorldSet::empty(self.n);
        for (a, row) in self.rows.iter().enumerate() {
            if row.intersects(ys) {
                out.insert(a);
            }
        }
        out
    }

    /// `R[Y] = ⋃_{a ∈ Y} R(a)`.
    pub fn image(&self, ys: &WorldSet) -> WorldSet {
        let mut out = WorldSet::empty(self.n);
        for a in ys {
            out.union_with(&self.rows[a]);
        }
        out
    }

    /// `R ∩ (Y × Y)`, keeping the ambient numbering.
    pub fn restrict_to(&self, ys: &WorldSet) -> Relation {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(a, row)| {
                if ys.contains(a) {
                    row.intersection(ys)
                } else {
                    WorldSet::empty(self.n)
                }
            })
            .collect();
        Relation { n: self.n, rows }
    }

    /// Renumbers along `keep` (ascending old worlds become `0..keep.len()`).
    pub fn induced(&self, keep: &[usize]) -> Relation {
        let mut r = Relation::empty(keep.len());
        for (i, &a) in keep.iter().enumerate() {
            for (j, &b) in keep.iter().enumerate() {
                if self.contains(a, b) {
                    r.insert(i, j);
                }
            }
        }
        r
    }

    /// Successor masks for `n <= 64`, used by the fast evaluator.
    pub(crate) fn masks(&self) -> Vec<u64> {
        self.rows.iter().map(WorldSet::mask).collect()
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

/// Free-function form of [`Relation::compose`].
pub fn compose(r: &Relation, s: &Relation) -> Result<Relation> {
    r.compose(s)
}

/// Free-function form of [`Relation::star`].
pub fn star(r: &Relation) -> Relation {
    r.star()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(n: usize, pairs: &[(usize, usize)]) -> Relation {
        Relation::from_pairs(n, pairs.iter().copied())
    }

    #[test]
    fn compose_examples() {
        assert_eq!(
            compose(&rel(3, &[(0, 1)]), &rel(3, &[(1, 2)])).unwrap(),
            rel(3, &[(0, 2)])
        );
        assert!(compose(&Relation::empty(3), &Relation::full(3))
            .unwrap()
            .is_empty());
        let chain = rel(3, &[(0, 1), (1, 2)]);
        assert_eq!(chain.compose(&chain).unwrap(), rel(3, &[(0, 2)]));
    }

    #[test]
    fn compose_size_mismatch() {
        assert_eq!(
            Relation::empty(2).compose(&Relation::empty(3)),
            Err(Error::SizeMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn star_examples() {
        assert_eq!(Relation::empty(2).star(), Relation::diagonal(2));
        assert_eq!(
            rel(3, &[(0, 1), (1, 2)]).star(),
            rel(3, &[(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)])
        );
        assert_eq!(Relation::full(2).star(), Relation::full(2));
    }

    #[test]
    fn powers() {
        let chain = rel(3, &[(0, 1), (1, 2)]);
        assert_eq!(chain.power(0), Relation::diagonal(3));
        assert_eq!(chain.power(2), rel(3, &[(0, 2)]));
        assert!(chain.power(3).is_empty());
        assert_eq!(chain.up_to_power(2), chain.star());
    }

    #[test]
    fn preimage_and_image() {
        let r = rel(3, &[(0, 1), (2, 1)]);
        let y = WorldSet::singleton(3, 1);
        assert_eq!(r.preimage(&y).to_vec(), vec![0, 2]);
        assert_eq!(r.image(&WorldSet::singleton(3, 0)).to_vec(), vec![1]);
        assert_eq!(r.converse(), rel(3, &[(1, 0), (1, 2)]));
    }

    #[test]
    fn wide_relations() {
        let n = 100;
        let r = Relation::from_pairs(n, (0..n - 1).map(|a| (a, a + 1)));
        let s = r.star();
        assert!(s.contains(0, 99));
        assert!(!s.contains(99, 0));
        assert_eq!(s.len(), n * (n + 1) / 2);
    }
}
