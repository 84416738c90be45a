//! Brute-force reference implementations over plain `BTreeSet`s.
//!
//! Nothing here calls into the library's algorithms; frames and formulas
//! are only read through their public data.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use kframe::{Formula, Frame, Partition, WorldSet};

pub type Set = BTreeSet<usize>;
pub type Rel = BTreeSet<(usize, usize)>;
pub type Blocks = BTreeSet<Set>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OFrame {
    pub n: usize,
    pub names: Vec<String>,
    pub rels: BTreeMap<String, Rel>,
}

impl OFrame {
    pub fn of(f: &Frame) -> OFrame {
        let names = f.alphabet().names().to_vec();
        let rels = names
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), f.relation(i).pairs().collect()))
            .collect();
        OFrame { n: f.size(), names, rels }
    }

    pub fn rel(&self, m: &str) -> &Rel {
        &self.rels[m]
    }

    pub fn union(&self) -> Rel {
        self.rels.values().flatten().copied().collect()
    }

    pub fn with(&self, m: &str, r: Rel) -> OFrame {
        let mut out = self.clone();
        out.rels.insert(m.to_string(), r);
        out
    }

    pub fn reflexive(&self) -> OFrame {
        let mut out = self.clone();
        for r in out.rels.values_mut() {
            r.extend((0..self.n).map(|a| (a, a)));
        }
        out
    }

    /// The subframe on `ys`, renumbered in increasing order.
    pub fn restrict(&self, ys: &Set) -> OFrame {
        let pos: BTreeMap<usize, usize> = ys.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let rels = self
            .rels
            .iter()
            .map(|(m, r)| {
                let kept = r
                    .iter()
                    .filter_map(|(a, b)| Some((*pos.get(a)?, *pos.get(b)?)))
                    .collect();
                (m.clone(), kept)
            })
            .collect();
        OFrame {
            n: ys.len(),
            names: self.names.clone(),
            rels,
        }
    }
}

pub fn set_of(s: &WorldSet) -> Set {
    s.iter().collect()
}

pub fn rel_of(r: &kframe::Relation) -> Rel {
    r.pairs().collect()
}

pub fn blocks_of(p: &Partition) -> Blocks {
    p.blocks().iter().map(set_of).collect()
}

pub fn all(n: usize) -> Set {
    (0..n).collect()
}

pub fn diagonal(n: usize) -> Rel {
    (0..n).map(|a| (a, a)).collect()
}

pub fn full(n: usize) -> Rel {
    (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect()
}

/// Left-to-right composition, by enumerating all triples.
pub fn compose(r: &Rel, s: &Rel, n: usize) -> Rel {
    let mut out = Rel::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if r.contains(&(a, b)) && s.contains(&(b, c)) {
                    out.insert((a, c));
                }
            }
        }
    }
    out
}

/// Reflexive-transitive closure by composing until nothing changes.
pub fn star(r: &Rel, n: usize) -> Rel {
    let mut cur: Rel = diagonal(n).union(r).copied().collect();
    loop {
        let next: Rel = cur.union(&compose(&cur, r, n)).copied().collect();
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

pub fn power(r: &Rel, i: usize, n: usize) -> Rel {
    (0..i).fold(diagonal(n), |acc, _| compose(&acc, r, n))
}

pub fn upto(r: &Rel, m: usize, n: usize) -> Rel {
    (0..=m).flat_map(|i| power(r, i, n)).collect()
}

/// Least `m` with `r^{m+1} ⊆ r^0 ∪ … ∪ r^m`.
pub fn degree(r: &Rel, n: usize) -> usize {
    (0..)
        .find(|&m| power(r, m + 1, n).is_subset(&upto(r, m, n)))
        .expect("finite relations are pretransitive")
}

pub fn image(r: &Rel, a: usize) -> Set {
    r.iter().filter(|(x, _)| *x == a).map(|&(_, y)| y).collect()
}

pub fn preimage(r: &Rel, ys: &Set) -> Set {
    r.iter().filter(|(_, y)| ys.contains(y)).map(|&(x, _)| x).collect()
}

/// Clusters of `star(r)` on `n` worlds with a flag for "nothing strictly
/// above".
pub fn clusters(r: &Rel, n: usize) -> Vec<(Set, bool)> {
    let s = star(r, n);
    let mut seen = Set::new();
    let mut out = Vec::new();
    for a in 0..n {
        if seen.contains(&a) {
            continue;
        }
        let c: Set = (0..n).filter(|&b| s.contains(&(a, b)) && s.contains(&(b, a))).collect();
        seen.extend(c.iter().copied());
        out.push(c);
    }
    out.iter()
        .map(|c| {
            let a = *c.iter().next().unwrap();
            let top = (0..n).all(|b| !s.contains(&(a, b)) || c.contains(&b));
            (c.clone(), top)
        })
        .collect()
}

/// Longest chain of clusters, by depth-first search over reachability.
pub fn height(r: &Rel, n: usize) -> usize {
    let s = star(r, n);
    let cs: Vec<Set> = clusters(r, n).into_iter().map(|(c, _)| c).collect();
    fn longest(i: usize, cs: &[Set], s: &Rel, memo: &mut Vec<Option<usize>>) -> usize {
        if let Some(v) = memo[i] {
            return v;
        }
        let a = *cs[i].iter().next().unwrap();
        let best = (0..cs.len())
            .filter(|&j| j != i && s.contains(&(a, *cs[j].iter().next().unwrap())))
            .map(|j| longest(j, cs, s, memo))
            .max()
            .unwrap_or(0);
        memo[i] = Some(best + 1);
        best + 1
    }
    let mut memo = vec![None; cs.len()];
    (0..cs.len()).map(|i| longest(i, &cs, &s, &mut memo)).max().unwrap_or(0)
}

// ---- semantics ----

pub fn eval(f: &OFrame, val: &BTreeMap<u32, Set>, phi: &Formula) -> Set {
    match phi {
        Formula::Bottom => Set::new(),
        Formula::Var(i) => val.get(i).cloned().unwrap_or_default(),
        Formula::Implies(a, b) => {
            let (x, y) = (eval(f, val, a), eval(f, val, b));
            (0..f.n).filter(|w| !x.contains(w) || y.contains(w)).collect()
        }
        Formula::Diamond(m, a) => preimage(f.rel(m), &eval(f, val, a)),
    }
}

pub fn subsets(n: usize) -> impl Iterator<Item = Set> {
    (0..1u64 << n).map(move |mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
}

/// Every assignment of subsets to `vars`.
pub fn valuations(n: usize, vars: &[u32]) -> Vec<BTreeMap<u32, Set>> {
    let mut out = vec![BTreeMap::new()];
    for &v in vars {
        out = out
            .into_iter()
            .flat_map(|base| {
                subsets(n).map(move |s| {
                    let mut m = base.clone();
                    m.insert(v, s);
                    m
                })
            })
            .collect();
    }
    out
}

pub fn valid(f: &OFrame, phi: &Formula) -> bool {
    let vars: Vec<u32> = phi.variables().into_iter().collect();
    let everything = all(f.n);
    valuations(f.n, &vars).iter().all(|v| eval(f, v, phi) == everything)
}

pub fn subframe_valid(f: &OFrame, phi: &Formula) -> bool {
    subsets(f.n).all(|ys| valid(&f.restrict(&ys), phi))
}

/// The partition of worlds by the extensions of all formulas built from
/// `⊥`, the variables, `¬`, `∧` and every diamond, grown one depth level
/// at a time until no new extension appears.
pub fn extension_partition(f: &OFrame, sets: &[Set]) -> Blocks {
    let mut known: BTreeSet<Set> = BTreeSet::new();
    known.insert(Set::new());
    known.extend(sets.iter().cloned());
    loop {
        let level: Vec<Set> = known.iter().cloned().collect();
        let mut next = known.clone();
        for x in &level {
            next.insert(all(f.n).difference(x).copied().collect());
            for y in &level {
                next.insert(x.intersection(y).copied().collect());
            }
            for r in f.rels.values() {
                next.insert(preimage(r, x));
            }
        }
        if next == known {
            break;
        }
        known = next;
    }
    let mut blocks: BTreeMap<Vec<bool>, Set> = BTreeMap::new();
    for a in 0..f.n {
        let profile: Vec<bool> = known.iter().map(|s| s.contains(&a)).collect();
        blocks.entry(profile).or_default().insert(a);
    }
    blocks.into_values().collect()
}

// ---- partitions ----

/// All partitions of `0..n`, by placing each world in an existing block or
/// a new one.
pub fn partitions(n: usize) -> Vec<Vec<Set>> {
    let mut out: Vec<Vec<Set>> = vec![Vec::new()];
    for a in 0..n {
        let mut next = Vec::new();
        for p in &out {
            for i in 0..p.len() {
                let mut q = p.clone();
                q[i].insert(a);
                next.push(q);
            }
            let mut q = p.clone();
            q.push([a].into_iter().collect());
            next.push(q);
        }
        out = next;
    }
    out
}

pub fn refines(u: &[Set], v: &[Set]) -> bool {
    u.iter().all(|b| v.iter().any(|c| b.is_subset(c)))
}

/// Definition of tuned: within each block, either every world or no world
/// reaches a given block.
pub fn tuned(f: &OFrame, blocks: &[Set]) -> bool {
    f.rels.values().all(|r| {
        blocks.iter().all(|u| {
            blocks.iter().all(|v| {
                let reaches = |a: &usize| image(r, *a).intersection(v).next().is_some();
                u.iter().all(reaches) || !u.iter().any(reaches)
            })
        })
    })
}

/// The tuned refinement of `v` refined by every other tuned refinement,
/// found by enumerating all partitions.
pub fn coarsest_tuned(f: &OFrame, v: &[Set]) -> Blocks {
    let candidates: Vec<Vec<Set>> = partitions(f.n)
        .into_iter()
        .filter(|p| refines(p, v) && tuned(f, p))
        .collect();
    let best = candidates
        .iter()
        .find(|p| candidates.iter().all(|q| refines(q, p)))
        .expect("a coarsest tuned refinement exists");
    best.iter().cloned().collect()
}

/// Subalgebra generated by `gens`: saturate under complement, union and
/// every preimage with a worklist.
pub fn closure(f: &OFrame, gens: &[Set]) -> BTreeSet<Set> {
    let mut fam: BTreeSet<Set> = BTreeSet::new();
    let mut work: Vec<Set> = vec![Set::new(), all(f.n)];
    work.extend(gens.iter().cloned());
    while let Some(x) = work.pop() {
        if !fam.insert(x.clone()) {
            continue;
        }
        work.push(all(f.n).difference(&x).copied().collect());
        for r in f.rels.values() {
            work.push(preimage(r, &x));
        }
        let members: Vec<Set> = fam.iter().cloned().collect();
        for y in members {
            work.push(x.union(&y).copied().collect());
        }
    }
    fam
}

pub fn atoms(fam: &BTreeSet<Set>) -> Blocks {
    fam.iter()
        .filter(|x| !x.is_empty() && fam.iter().all(|y| y.is_empty() || !y.is_subset(x) || y == *x))
        .cloned()
        .collect()
}

// ---- sums and maps ----

/// Worlds `(i, a)` numbered contiguously in index order.
pub fn layout(sizes: &[usize]) -> Vec<(usize, usize)> {
    sizes.iter().enumerate().flat_map(|(i, &k)| (0..k).map(move |a| (i, a))).collect()
}

pub fn sum(index: &OFrame, summands: &[OFrame]) -> OFrame {
    let ws = layout(&summands.iter().map(|s| s.n).collect::<Vec<_>>());
    let rels = index
        .names
        .iter()
        .map(|m| {
            let mut r = Rel::new();
            for (x, &(i, a)) in ws.iter().enumerate() {
                for (y, &(j, b)) in ws.iter().enumerate() {
                    let edge = if i == j {
                        summands[i].rel(m).contains(&(a, b))
                    } else {
                        index.rel(m).contains(&(i, j))
                    };
                    if edge {
                        r.insert((x, y));
                    }
                }
            }
            (m.clone(), r)
        })
        .collect();
    OFrame {
        n: ws.len(),
        names: index.names.clone(),
        rels,
    }
}

pub fn lex(index: &OFrame, summands: &[OFrame]) -> OFrame {
    let ws = layout(&summands.iter().map(|s| s.n).collect::<Vec<_>>());
    let mut rels = BTreeMap::new();
    let mut names = index.names.clone();
    for m in &index.names {
        let r: Rel = (0..ws.len())
            .flat_map(|x| (0..ws.len()).map(move |y| (x, y)))
            .filter(|&(x, y)| index.rel(m).contains(&(ws[x].0, ws[y].0)))
            .collect();
        rels.insert(m.clone(), r);
    }
    if let Some(first) = summands.first() {
        for m in &first.names {
            names.push(m.clone());
            let r: Rel = (0..ws.len())
                .flat_map(|x| (0..ws.len()).map(move |y| (x, y)))
                .filter(|&(x, y)| ws[x].0 == ws[y].0 && summands[ws[x].0].rel(m).contains(&(ws[x].1, ws[y].1)))
                .collect();
            rels.insert(m.clone(), r);
        }
    }
    OFrame { n: ws.len(), names, rels }
}

/// Forth and lift conditions for every modality.
pub fn pmorphism(dom: &OFrame, cod: &OFrame, map: &[usize]) -> bool {
    dom.names.iter().all(|m| {
        let (r, s) = (dom.rel(m), cod.rel(m));
        let forth = r.iter().all(|&(a, b)| s.contains(&(map[a], map[b])));
        let lift = (0..dom.n).all(|a| {
            image(s, map[a])
                .iter()
                .all(|&u| image(r, a).iter().any(|&b| map[b] == u))
        });
        forth && lift
    })
}

pub fn surjective(map: &[usize], n: usize) -> bool {
    (0..n).all(|u| map.contains(&u))
}

fn union_over(f: &OFrame, names: &[&str]) -> Rel {
    names.iter().flat_map(|m| f.rel(m).iter().copied()).collect()
}

/// `H;V ⊆ V`, `V;H ⊆ V` and `H⁻¹;V ⊆ V` for each vertical `v` and
/// horizontal `h`.
pub fn phi_conditions(f: &OFrame, vertical: &[&str], horizontal: &[&str]) -> bool {
    vertical.iter().all(|v| {
        horizontal.iter().all(|h| {
            let (rv, rh) = (f.rel(v), f.rel(h));
            let conv: Rel = rh.iter().map(|&(a, b)| (b, a)).collect();
            compose(rh, rv, f.n).is_subset(rv)
                && compose(rv, rh, f.n).is_subset(rv)
                && compose(&conv, rv, f.n).is_subset(rv)
        })
    })
}

/// `(V ∪ H)* = V* ; H*`.
pub fn star_identity(f: &OFrame, vertical: &[&str], horizontal: &[&str]) -> bool {
    let v = union_over(f, vertical);
    let h = union_over(f, horizontal);
    let vh: Rel = v.union(&h).copied().collect();
    star(&vh, f.n) == compose(&star(&v, f.n), &star(&h, f.n), f.n)
}

// ---- defects ----

pub fn defects(r: &Rel, u: &Set) -> Set {
    let internal = r.iter().any(|(a, b)| u.contains(a) && u.contains(b));
    if !internal {
        return Set::new();
    }
    u.iter()
        .copied()
        .filter(|&c| !u.iter().any(|d| r.contains(&(c, *d))))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OTrace {
    pub stages: Vec<(Blocks, Set)>,
    pub q: Set,
    pub index: BTreeMap<usize, usize>,
    pub rank: BTreeMap<usize, usize>,
    pub e: Set,
    pub clusters: BTreeSet<Set>,
    pub clusters_min: BTreeSet<Set>,
    pub t_plus: Set,
    pub t_minus: Set,
    pub s: Set,
    pub companion: OFrame,
}

/// The construction read straight off its definition.
pub fn qes(f: &OFrame, designated: &str, gens: &[Set]) -> OTrace {
    let r = f.rel(designated).clone();
    let g = f.with(designated, r.union(&diagonal(f.n)).copied().collect());
    let mut sets = gens.to_vec();
    let mut stages: Vec<(Blocks, Set)> = Vec::new();
    loop {
        let p = extension_partition(&g, &sets);
        let qn: Set = p.iter().flat_map(|b| defects(&r, b)).collect();
        stages.push((p, qn.clone()));
        if qn.is_empty() {
            break;
        }
        assert!(stages.len() <= f.n + 1, "stages do not terminate");
        sets.push(qn);
    }
    let mut q = Set::new();
    let mut index = BTreeMap::new();
    for (i, (_, qn)) in stages.iter().enumerate() {
        for &a in qn {
            q.insert(a);
            index.insert(a, i);
        }
    }
    // the family of all stage classes
    let family: BTreeSet<Set> = stages.iter().flat_map(|(p, _)| p.iter().cloned()).collect();
    let sigma_up = |u: &Set| -> usize {
        family
            .iter()
            .filter(|v| u.is_subset(v) && u != *v)
            .filter(|v| {
                let dv = defects(&r, v);
                u.iter().any(|a| dv.iter().any(|b| r.contains(&(*a, *b))))
            })
            .count()
    };
    let mut rank = BTreeMap::new();
    for &a in &q {
        let class = stages[index[&a]].0.iter().find(|b| b.contains(&a)).unwrap();
        rank.insert(a, sigma_up(class));
    }
    let e: Set = q.iter().copied().filter(|a| rank[a] % 2 == 0).collect();

    let mut cl = BTreeSet::new();
    for v in family.iter().filter(|v| !defects(&r, v).is_empty()) {
        let ind = (0..stages.len()).find(|&i| stages[i].0.contains(v)).unwrap();
        let vbar: Set = v.difference(&stages[ind].1).copied().filter(|a| q.contains(a)).collect();
        let local: Rel = r.iter().copied().filter(|(a, b)| vbar.contains(a) && vbar.contains(b)).collect();
        for (c, top) in clusters(&local, f.n) {
            if top && c.is_subset(&vbar) && c.len() > 1 {
                cl.insert(c);
            }
        }
    }
    let clusters_min: BTreeSet<Set> = cl
        .iter()
        .filter(|c| !cl.iter().any(|d| d != *c && d.is_subset(c)))
        .cloned()
        .collect();
    let mut t_plus = Set::new();
    let mut t_minus = Set::new();
    for c in &clusters_min {
        let mut it = c.iter();
        t_plus.insert(*it.next().unwrap());
        t_minus.insert(*it.next().unwrap());
    }
    // every finite cluster sits above a minimal one, so S is T⁺
    let s = t_plus.clone();
    OTrace {
        stages,
        q,
        index,
        rank,
        e,
        clusters: cl,
        clusters_min,
        t_plus,
        t_minus,
        s,
        companion: g,
    }
}
