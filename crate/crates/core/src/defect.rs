//! Defects and the `Q`, `E`, `S` construction.
//!
//! Given a frame `F`, a designated relation `R` and generator sets
//! `P_0..P_{k-1}`, let `G` be `F` with `R` replaced by its reflexive
//! closure. The construction finds three more sets `Q`, `E`, `S` such that
//! the subalgebra of `Alg(F)` generated by the `P_i` lies inside the
//! subalgebra of `Alg(G)` generated by the `P_i` together with `Q`, `E`,
//! `S`. Partitions are always computed in `G`; defects always against the
//! original `R`.

use serde::Serialize;

use crate::partition::{is_tuned, subalgebra_closure, Partition};
use crate::semantics::{theta_partition, Model};
use crate::{clusters_of, Error, Frame, Relation, Result, WorldSet};

/// `Def(U)`: empty when `r` has no edge inside `u`, otherwise the members
/// of `u` with no `r`-successor in `u`.
pub fn defects(r: &Relation, u: &WorldSet) -> WorldSet {
    let n = u.universe();
    let mut internal = false;
    let mut out = WorldSet::empty(n);
    for c in u.iter() {
        if r.successors(c).intersects(u) {
            internal = true;
        } else {
            out.insert(c);
        }
    }
    if internal {
        out
    } else {
        WorldSet::empty(n)
    }
}

/// One refinement stage: the partition `~_n` and its defect set `Q_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    pub partition: Partition,
    pub defects: WorldSet,
}

/// A distinct class occurring in some stage partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassInfo {
    pub worlds: WorldSet,
    /// Stages whose partition contains this class.
    pub stages: std::ops::Range<usize>,
    pub defects: WorldSet,
    /// Classes `V ⊋ U` with an `R`-edge from `U` into `Def(V)`, innermost
    /// first.
    pub sigma_up: Vec<usize>,
}

impl ClassInfo {
    pub fn is_defective(&self) -> bool {
        !self.defects.is_empty()
    }

    /// The unique stage of a defective class.
    pub fn index(&self) -> Option<usize> {
        self.is_defective().then_some(self.stages.start)
    }

    pub fn rank(&self) -> usize {
        self.sigma_up.len()
    }
}

/// Per defective class: `V̄ = (V ∖ Q_{ind V}) ∩ Q` and the maximal clusters
/// of `(V̄, (R↾V̄)*)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefectiveClass {
    pub class: usize,
    pub vbar: WorldSet,
    pub top_clusters: Vec<WorldSet>,
}

/// The full record of one run of the construction.
#[derive(Debug, Clone)]
pub struct QesTrace {
    pub frame: Frame,
    pub companion: Frame,
    pub designated: usize,
    pub generators: Vec<WorldSet>,
    /// Stages `0..=N`; the last one has no defects.
    pub stages: Vec<Stage>,
    pub q: WorldSet,
    pub index: Vec<Option<usize>>,
    pub rank: Vec<Option<usize>>,
    pub e: WorldSet,
    /// The family of all stage classes, ordered by first stage then least
    /// element.
    pub classes: Vec<ClassInfo>,
    pub defective: Vec<DefectiveClass>,
    /// Maximal clusters with more than one world, over all defective classes.
    pub clusters: Vec<WorldSet>,
    pub clusters_min: Vec<usize>,
    pub clusters_0: Vec<usize>,
    pub clusters_1: Vec<usize>,
    pub t_plus: WorldSet,
    pub t_minus: WorldSet,
    pub s_plus: WorldSet,
    pub s_minus: WorldSet,
    pub s: WorldSet,
}

impl QesTrace {
    /// `N`, the first stage with no defects.
    pub fn n_final(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn relation(&self) -> &Relation {
        self.frame.relation(self.designated)
    }

    pub fn final_partition(&self) -> &Partition {
        &self.stages.last().expect("at least one stage").partition
    }

    /// The generators of the enlarged subalgebra: `P_0..P_{k-1}, Q, E, S`.
    pub fn extended_generators(&self) -> Vec<WorldSet> {
        let mut out = self.generators.clone();
        out.extend([self.q.clone(), self.e.clone(), self.s.clone()]);
        out
    }
}

/// Runs the construction for one designated modality.
pub fn run_qes(f: &Frame, designated: &str, generators: &[WorldSet]) -> Result<QesTrace> {
    let d = f.alphabet().resolve(designated)?;
    run_qes_at(f, d, generators)
}

pub fn run_qes_at(f: &Frame, designated: usize, generators: &[WorldSet]) -> Result<QesTrace> {
    let n = f.size();
    if designated >= f.alphabet().len() {
        return Err(Error::Invalid(format!("no modality with index {designated}")));
    }
    for g in generators {
        if g.universe() != n {
            return Err(Error::SizeMismatch {
                left: n,
                right: g.universe(),
            });
        }
    }
    let r = f.relation(designated).clone();
    let g = f.with_relation(designated, r.reflexive_closure())?;

    let mut stages: Vec<Stage> = Vec::new();
    let mut valuation = generators.to_vec();
    loop {
        let partition = theta_partition(&Model::new(g.clone(), valuation.clone())?);
        let mut qn = WorldSet::empty(n);
        for b in partition.blocks() {
            qn.union_with(&defects(&r, b));
        }
        let done = qn.is_empty();
        valuation.push(qn.clone());
        stages.push(Stage {
            partition,
            defects: qn,
        });
        if done {
            break;
        }
        if stages.len() > n + 1 {
            return Err(Error::Invalid("defect stages failed to terminate".into()));
        }
    }

    let mut q = WorldSet::empty(n);
    let mut index = vec![None; n];
    for (i, st) in stages.iter().enumerate() {
        q.union_with(&st.defects);
        for a in st.defects.iter() {
            index[a] = Some(i);
        }
    }

    let classes = class_family(&r, &stages);
    let class_at = |stage: usize, a: usize| -> usize {
        let set = stages[stage].partition.block_of(a);
        classes
            .iter()
            .position(|c| &c.worlds == set)
            .expect("every stage class is recorded")
    };

    let mut rank = vec![None; n];
    let mut e = WorldSet::empty(n);
    for a in q.iter() {
        let rk = classes[class_at(index[a].expect("a is in Q"), a)].rank();
        rank[a] = Some(rk);
        if rk.is_multiple_of(2) {
            e.insert(a);
        }
    }

    let mut defective = Vec::new();
    let mut clusters: Vec<WorldSet> = Vec::new();
    for (ci, c) in classes.iter().enumerate() {
        let Some(ind) = c.index() else { continue };
        let vbar = c.worlds.difference(&stages[ind].defects).intersection(&q);
        let top_clusters: Vec<WorldSet> = clusters_of(&r, &vbar)?
            .into_iter()
            .filter(|cl| cl.maximal)
            .map(|cl| cl.worlds)
            .collect();
        for cl in &top_clusters {
            if cl.len() > 1 && !clusters.contains(cl) {
                clusters.push(cl.clone());
            }
        }
        defective.push(DefectiveClass {
            class: ci,
            vbar,
            top_clusters,
        });
    }
    clusters.sort_by_key(|c| (c.first(), c.len()));

    let clusters_min: Vec<usize> = (0..clusters.len())
        .filter(|&i| {
            !clusters
                .iter()
                .enumerate()
                .any(|(j, c)| j != i && c.is_subset(&clusters[i]))
        })
        .collect();
    let (clusters_0, clusters_1): (Vec<usize>, Vec<usize>) = (0..clusters.len())
        .partition(|&i| clusters_min.iter().any(|&m| clusters[m].is_subset(&clusters[i])));

    let mut t_plus = WorldSet::empty(n);
    let mut t_minus = WorldSet::empty(n);
    for &m in &clusters_min {
        let mut it = clusters[m].iter();
        t_plus.insert(it.next().expect("clusters have two worlds"));
        t_minus.insert(it.next().expect("clusters have two worlds"));
    }
    let upper: Vec<WorldSet> = clusters_1.iter().map(|&i| clusters[i].clone()).collect();
    let (s_plus, s_minus) = choose_s_pairs(n, &upper)?;
    let s = t_plus.union(&s_plus);

    Ok(QesTrace {
        frame: f.clone(),
        companion: g,
        designated,
        generators: generators.to_vec(),
        stages,
        q,
        index,
        rank,
        e,
        classes,
        defective,
        clusters,
        clusters_min,
        clusters_0,
        clusters_1,
        t_plus,
        t_minus,
        s_plus,
        s_minus,
        s,
    })
}

fn class_family(r: &Relation, stages: &[Stage]) -> Vec<ClassInfo> {
    let mut classes: Vec<ClassInfo> = Vec::new();
    for (i, st) in stages.iter().enumerate() {
        for b in st.partition.blocks() {
            match classes.iter_mut().find(|c| &c.worlds == b) {
                Some(c) => c.stages.end = i + 1,
                None => classes.push(ClassInfo {
                    worlds: b.clone(),
                    stages: i..i + 1,
                    defects: defects(r, b),
                    sigma_up: Vec::new(),
                }),
            }
        }
    }
    let reach_into = |u: &WorldSet, target: &WorldSet| u.iter().any(|a| r.successors(a).intersects(target));
    for i in 0..classes.len() {
        let u = &classes[i].worlds;
        let mut up: Vec<usize> = (0..classes.len())
            .filter(|&j| {
                let v = &classes[j].worlds;
                u.is_subset(v) && u != v && reach_into(u, &classes[j].defects)
            })
            .collect();
        // supersets form a chain; innermost has the fewest worlds
        up.sort_by_key(|&j| classes[j].worlds.len());
        classes[i].sigma_up = up;
    }
    classes
}

/// Picks two worlds `a⁺(C)`, `a⁻(C)` in each cluster of a laminar family,
/// outermost clusters first, avoiding the worlds picked for strictly
/// larger clusters. Returns `(S⁺, S⁻)`.
///
/// On the family of non-minimal-rooted clusters of a finite trace this is
/// always empty; it fails when a cluster has too few fresh worlds.
pub fn choose_s_pairs(n: usize, clusters: &[WorldSet]) -> Result<(WorldSet, WorldSet)> {
    let depth = |c: &WorldSet| {
        clusters
            .iter()
            .filter(|d| c.is_subset(d) && c != *d)
            .count()
    };
    let mut order: Vec<usize> = (0..clusters.len()).collect();
    order.sort_by_key(|&i| depth(&clusters[i]));
    let mut picked: Vec<Option<(usize, usize)>> = vec![None; clusters.len()];
    for &i in &order {
        let c = &clusters[i];
        let mut used = WorldSet::empty(n);
        for (j, d) in clusters.iter().enumerate() {
            if c.is_subset(d) && c != d {
                let (p, m) = picked[j].expect("larger clusters are handled first");
                used.insert(p);
                used.insert(m);
            }
        }
        let avail = c.difference(&used);
        let mut fresh = avail.iter();
        match (fresh.next(), fresh.next()) {
            (Some(p), Some(m)) => picked[i] = Some((p, m)),
            _ => {
                return Err(Error::Precondition(format!(
                    "cluster {c} has fewer than two worlds outside the larger clusters' picks"
                )))
            }
        }
    }
    let mut plus = WorldSet::empty(n);
    let mut minus = WorldSet::empty(n);
    for (p, m) in picked.into_iter().flatten() {
        plus.insert(p);
        minus.insert(m);
    }
    Ok((plus, minus))
}

/// A world where membership in `Q_n` disagrees with the three-part
/// reachability condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MainClaimViolation {
    pub class: Vec<usize>,
    pub index: usize,
    pub world: usize,
    pub in_stage_defects: bool,
}

fn homogeneous(reach: &WorldSet, s: &WorldSet) -> bool {
    reach.is_subset(s) || !reach.intersects(s)
}

/// For each defective class `V` with index `n` and each `a ∈ V`:
/// `a ∈ Q_n` iff `R_V*(a) ⊆ Q` and `R_V*(a)` lies inside or outside `E`,
/// and inside or outside `S`.
pub fn main_claim_violation(t: &QesTrace) -> Option<MainClaimViolation> {
    let r = t.relation();
    for c in t.classes.iter().filter(|c| c.is_defective()) {
        let n = c.stages.start;
        let reach_v = r.restrict_to(&c.worlds).star();
        for a in c.worlds.iter() {
            let reach = reach_v.successors(a);
            let rhs = reach.is_subset(&t.q) && homogeneous(reach, &t.e) && homogeneous(reach, &t.s);
            let lhs = t.stages[n].defects.contains(a);
            if lhs != rhs {
                return Some(MainClaimViolation {
                    class: c.worlds.to_vec(),
                    index: n,
                    world: a,
                    in_stage_defects: lhs,
                });
            }
        }
    }
    None
}

pub fn verify_main_claim(t: &QesTrace) -> bool {
    main_claim_violation(t).is_none()
}

/// The subalgebra of `Alg(F)` generated by the `P_i` is inside the
/// subalgebra of `Alg(G)` generated by the `P_i`, `Q`, `E` and `S`.
pub fn verify_embedding(t: &QesTrace) -> bool {
    let small = subalgebra_closure(&t.frame, &t.generators).expect("generators match the frame");
    let big = subalgebra_closure(&t.companion, &t.extended_generators()).expect("generators match the frame");
    small.is_subfamily_of(&big)
}

/// `~_N` has no defective class and is tuned in `F` itself.
pub fn verify_final_partition(t: &QesTrace) -> bool {
    let p = t.final_partition();
    p.blocks().iter().all(|b| defects(t.relation(), b).is_empty())
        && is_tuned(&t.frame, p).expect("partition matches the frame")
}

/// Structural properties every finished trace must satisfy. Returns a
/// description of each failure.
pub fn invariant_violations(t: &QesTrace) -> Vec<String> {
    let mut out = Vec::new();
    let n = t.frame.size();
    if t.n_final() > n {
        out.push(format!("N = {} exceeds the domain size {n}", t.n_final()));
    }
    if !t.final_partition().blocks().is_empty() && !t.stages.last().unwrap().defects.is_empty() {
        out.push("the last stage has defects".into());
    }
    for w in t.stages.windows(2) {
        if !crate::partition::refines(&w[1].partition, &w[0].partition).unwrap_or(false) {
            out.push(format!(
                "stage partition {} does not refine {}",
                w[1].partition, w[0].partition
            ));
        }
    }
    for (i, a) in t.stages.iter().enumerate() {
        for (j, b) in t.stages.iter().enumerate().skip(i + 1) {
            if a.defects.intersects(&b.defects) {
                out.push(format!("defect sets of stages {i} and {j} overlap"));
            }
        }
    }
    // defects detach: later classes of a defect stay inside Def(U) and are
    // not defective
    let r = t.relation();
    for (i, st) in t.stages.iter().enumerate() {
        for u in st.partition.blocks() {
            let du = defects(r, u);
            for a in du.iter() {
                for later in &t.stages[i + 1..] {
                    let cls = later.partition.block_of(a);
                    if !cls.is_subset(&du) || !defects(r, cls).is_empty() {
                        out.push(format!("class of defect {a} after stage {i} does not detach"));
                    }
                }
            }
        }
    }
    // rank laddering
    for c in t.classes.iter().filter(|c| c.is_defective()) {
        let rv = c.rank();
        for a in c.worlds.intersection(&t.q).iter() {
            let ra = t.rank[a].expect("worlds of Q have ranks");
            if ra < rv {
                out.push(format!("world {a} has rank {ra} below its class rank {rv}"));
            }
            if ra > rv {
                let ok = r
                    .successors(a)
                    .intersection(&c.worlds)
                    .intersection(&t.q)
                    .iter()
                    .any(|b| t.rank[b] == Some(ra - 1));
                if !ok {
                    out.push(format!("world {a} of rank {ra} has no successor of rank {}", ra - 1));
                }
            }
        }
    }
    for (i, c) in t.clusters.iter().enumerate() {
        for d in &t.clusters[i + 1..] {
            if !(c.is_subset(d) || d.is_subset(c) || !c.intersects(d)) {
                out.push(format!("clusters {c} and {d} overlap without nesting"));
            }
        }
        if !c.intersects(&t.s) || c.is_subset(&t.s) {
            out.push(format!("cluster {c} is not split by S"));
        }
    }
    if !t.clusters_1.is_empty() {
        out.push("clusters without a minimal cluster below them on a finite frame".into());
    }
    out
}

/// Runs the construction once per modality. Step `i` designates modality
/// `i` in the frame whose earlier modalities are already reflexively
/// closed, and feeds `Q`, `E`, `S` of every step into the next one's
/// generators, ending with `k + 3·|A|` generators for `F^r`.
#[derive(Debug, Clone)]
pub struct QesChain {
    pub traces: Vec<QesTrace>,
    pub generators: Vec<WorldSet>,
}

pub fn run_qes_all(f: &Frame, generators: &[WorldSet]) -> Result<QesChain> {
    let mut frame = f.clone();
    let mut gens = generators.to_vec();
    let mut traces = Vec::with_capacity(f.alphabet().len());
    for d in 0..f.alphabet().len() {
        let t = run_qes_at(&frame, d, &gens)?;
        gens = t.extended_generators();
        frame = t.companion.clone();
        traces.push(t);
    }
    Ok(QesChain {
        traces,
        generators: gens,
    })
}

impl QesChain {
    /// The subalgebra of `Alg(F)` generated by the original generators is
    /// inside the subalgebra of `Alg(F^r)` generated by the final ones.
    pub fn verify_embedding(&self, f: &Frame, generators: &[WorldSet]) -> Result<bool> {
        let small = subalgebra_closure(f, generators)?;
        let big = subalgebra_closure(&f.reflexive_closure(), &self.generators)?;
        Ok(small.is_subfamily_of(&big))
    }
}

/// JSON view of a trace. Field order is fixed, so the output is
/// byte-stable.
#[derive(Debug, Clone, Serialize)]
pub struct QesReport {
    pub modality: String,
    pub worlds: usize,
    pub generators: Vec<Vec<usize>>,
    pub stages: Vec<StageReport>,
    #[serde(rename = "N")]
    pub n_final: usize,
    #[serde(rename = "Q")]
    pub q: Vec<usize>,
    pub index: Vec<Option<usize>>,
    pub rank: Vec<Option<usize>>,
    #[serde(rename = "E")]
    pub e: Vec<usize>,
    pub classes: Vec<ClassReport>,
    pub clusters: Vec<Vec<usize>>,
    pub clusters_min: Vec<usize>,
    pub clusters_0: Vec<usize>,
    pub clusters_1: Vec<usize>,
    pub t_plus: Vec<usize>,
    pub t_minus: Vec<usize>,
    pub s_plus: Vec<usize>,
    pub s_minus: Vec<usize>,
    #[serde(rename = "S")]
    pub s: Vec<usize>,
    pub verdicts: Verdicts,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageReport {
    pub partition: String,
    pub defects: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassReport {
    pub worlds: Vec<usize>,
    pub first_stage: usize,
    pub last_stage: usize,
    pub defects: Vec<usize>,
    pub sigma_up: Vec<usize>,
    pub rank: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdicts {
    pub main_claim: bool,
    pub main_claim_witness: Option<MainClaimViolation>,
    pub embedding: bool,
    pub final_partition: bool,
    pub invariants: Vec<String>,
}

impl Verdicts {
    pub fn all_pass(&self) -> bool {
        self.main_claim && self.embedding && self.final_partition && self.invariants.is_empty()
    }
}

impl QesTrace {
    pub fn report(&self) -> QesReport {
        let witness = main_claim_violation(self);
        QesReport {
            modality: self.frame.alphabet().names()[self.designated].clone(),
            worlds: self.frame.size(),
            generators: self.generators.iter().map(WorldSet::to_vec).collect(),
            stages: self
                .stages
                .iter()
                .map(|s| StageReport {
                    partition: s.partition.to_string(),
                    defects: s.defects.to_vec(),
                })
                .collect(),
            n_final: self.n_final(),
            q: self.q.to_vec(),
            index: self.index.clone(),
            rank: self.rank.clone(),
            e: self.e.to_vec(),
            classes: self
                .classes
                .iter()
                .map(|c| ClassReport {
                    worlds: c.worlds.to_vec(),
                    first_stage: c.stages.start,
                    last_stage: c.stages.end - 1,
                    defects: c.defects.to_vec(),
                    sigma_up: c.sigma_up.clone(),
                    rank: c.rank(),
                })
                .collect(),
            clusters: self.clusters.iter().map(WorldSet::to_vec).collect(),
            clusters_min: self.clusters_min.clone(),
            clusters_0: self.clusters_0.clone(),
            clusters_1: self.clusters_1.clone(),
            t_plus: self.t_plus.to_vec(),
            t_minus: self.t_minus.to_vec(),
            s_plus: self.s_plus.to_vec(),
            s_minus: self.s_minus.to_vec(),
            s: self.s.to_vec(),
            verdicts: Verdicts {
                main_claim: witness.is_none(),
                main_claim_witness: witness,
                embedding: verify_embedding(self),
                final_partition: verify_final_partition(self),
                invariants: invariant_violations(self),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni(n: usize, pairs: &[(usize, usize)]) -> Frame {
        Frame::unimodal("a", Relation::from_pairs(n, pairs.iter().copied()))
    }

    fn ws(n: usize, xs: &[usize]) -> WorldSet {
        WorldSet::from_worlds(n, xs.iter().copied())
    }

    #[test]
    fn defects_examples() {
        let r = Relation::from_pairs(2, [(0, 1)]);
        assert_eq!(defects(&r, &ws(2, &[0, 1])), ws(2, &[1]));
        assert_eq!(defects(&r, &ws(2, &[1])), ws(2, &[]));
        let refl = Relation::diagonal(3);
        assert_eq!(defects(&refl, &ws(3, &[0, 1, 2])), ws(3, &[]));
    }

    #[test]
    fn two_chain_trace() {
        let t = run_qes(&uni(2, &[(0, 1)]), "a", &[]).unwrap();
        assert_eq!(t.stages.len(), 2);
        assert_eq!(t.stages[0].partition, Partition::trivial(2));
        assert_eq!(t.stages[0].defects, ws(2, &[1]));
        assert_eq!(t.stages[1].partition, Partition::discrete(2));
        assert!(t.stages[1].defects.is_empty());
        assert_eq!(t.n_final(), 1);
        assert_eq!(t.q, ws(2, &[1]));
        assert_eq!(t.rank, vec![None, Some(0)]);
        assert_eq!(t.e, ws(2, &[1]));
        assert!(t.clusters.is_empty());
        assert!(t.s.is_empty());
        assert!(verify_main_claim(&t));
        assert!(verify_embedding(&t));
        assert!(verify_final_partition(&t));
        assert!(invariant_violations(&t).is_empty());
    }

    #[test]
    fn reflexive_frame_has_no_defects() {
        let t = run_qes(&uni(3, &[(0, 0), (1, 1), (2, 2), (0, 1)]), "a", &[]).unwrap();
        assert_eq!(t.n_final(), 0);
        assert!(t.q.is_empty() && t.e.is_empty() && t.s.is_empty());
        assert!(verify_main_claim(&t) && verify_embedding(&t) && verify_final_partition(&t));
    }

    #[test]
    fn three_cycle_invariants() {
        let t = run_qes(&uni(3, &[(0, 1), (1, 2), (2, 0)]), "a", &[]).unwrap();
        assert!(invariant_violations(&t).is_empty(), "{:?}", invariant_violations(&t));
        assert!(verify_final_partition(&t));
    }

    #[test]
    fn unknown_modality() {
        assert_eq!(
            run_qes(&uni(1, &[]), "b", &[]).unwrap_err(),
            Error::UnknownModality("b".into())
        );
    }

    #[test]
    fn s_pairs_on_laminar_family() {
        let outer = ws(8, &[0, 1, 2, 3, 4, 5]);
        let inner = ws(8, &[0, 1, 2, 3]);
        let other = ws(8, &[6, 7]);
        let (plus, minus) = choose_s_pairs(8, &[inner.clone(), outer.clone(), other.clone()]).unwrap();
        assert_eq!(plus, ws(8, &[0, 2, 6]));
        assert_eq!(minus, ws(8, &[1, 3, 7]));
        for c in [&inner, &outer, &other] {
            assert!(c.intersects(&plus) && c.intersects(&minus));
        }
        assert!(!plus.intersects(&minus));
        // an inner cluster with nothing fresh left
        let tight = ws(8, &[0, 1, 2]);
        assert!(choose_s_pairs(8, &[tight, outer]).is_err());
        assert_eq!(choose_s_pairs(4, &[]).unwrap(), (ws(4, &[]), ws(4, &[])));
    }

    #[test]
    fn chain_over_two_modalities() {
        let f = Frame::new(
            crate::ModalityAlphabet::of(&["a", "b"]),
            3,
            vec![
                Relation::from_pairs(3, [(0, 1), (1, 2)]),
                Relation::from_pairs(3, [(2, 0)]),
            ],
        )
        .unwrap();
        let gens = [ws(3, &[0])];
        let chain = run_qes_all(&f, &gens).unwrap();
        assert_eq!(chain.generators.len(), 1 + 3 * 2);
        assert!(chain.verify_embedding(&f, &gens).unwrap());
        for t in &chain.traces {
            assert!(verify_main_claim(t) && verify_embedding(t) && verify_final_partition(t));
        }
    }
}
