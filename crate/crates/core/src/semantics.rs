//! Kripke models, formula evaluation and frame validity.
//!
//! Validity is decided exactly by enumerating every valuation of the
//! variables that occur in the formula. The formula is first compiled to a
//! hash-consed DAG so shared subformulas are evaluated once per valuation,
//! and each valuation is evaluated on `u64` world masks when the frame has
//! at most 64 worlds.

use std::collections::HashMap;

use crate::formula::{relativize, Formula};
use crate::partition::{coarsest_tuned_refinement, induced_partition, Partition};
use crate::{Error, Exec, Frame, ModalityAlphabet, Result, WorldSet};

/// Default bound on `n · k` for valuation enumeration.
pub const DEFAULT_CAP: usize = 22;

/// Enumeration never goes beyond `2^63` valuations, whatever the cap.
const HARD_CAP: usize = 63;

/// A frame together with a valuation of `p_0 .. p_{k-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    frame: Frame,
    valuation: Vec<WorldSet>,
}

impl Model {
    pub fn new(frame: Frame, valuation: Vec<WorldSet>) -> Result<Model> {
        for s in &valuation {
            if s.universe() != frame.size() {
                return Err(Error::SizeMismatch {
                    left: frame.size(),
                    right: s.universe(),
                });
            }
        }
        Ok(Model { frame, valuation })
    }

    /// The model with `k` variables, all false everywhere.
    pub fn empty_valuation(frame: Frame, k: usize) -> Model {
        let n = frame.size();
        Model {
            frame,
            valuation: vec![WorldSet::empty(n); k],
        }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn valuation(&self) -> &[WorldSet] {
        &self.valuation
    }

    /// Number of variables.
    pub fn k(&self) -> usize {
        self.valuation.len()
    }

    /// The submodel on `ys` with the index map old world → new world.
    pub fn restriction(&self, ys: &WorldSet) -> Result<(Model, Vec<Option<usize>>)> {
        let (frame, map) = self.frame.restriction(ys)?;
        let m = frame.size();
        let valuation = self
            .valuation
            .iter()
            .map(|s| {
                WorldSet::from_worlds(m, s.iter().filter_map(|a| map[a]))
            })
            .collect();
        Ok((Model { frame, valuation }, map))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Op {
    Bottom,
    Var(usize),
    Implies(usize, usize),
    Diamond(usize, usize),
}

/// A formula compiled against a frame's alphabet: a topologically ordered
/// DAG with structurally equal subformulas merged.
#[derive(Debug, Clone)]
pub struct Compiled {
    ops: Vec<Op>,
    /// Variable index for each `Op::Var` slot.
    vars: Vec<u32>,
}

impl Compiled {
    pub fn new(phi: &Formula, alphabet: &ModalityAlphabet) -> Result<Compiled> {
        let mut c = Compiler {
            alphabet,
            ops: Vec::new(),
            interned: HashMap::new(),
            seen: HashMap::new(),
            vars: Vec::new(),
        };
        c.node(phi)?;
        Ok(Compiled {
            ops: c.ops,
            vars: c.vars,
        })
    }

    /// Distinct variables, in slot order.
    pub fn variables(&self) -> &[u32] {
        &self.vars
    }

    /// Number of distinct subformulas.
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Evaluates on a frame of at most 64 worlds with one mask per slot.
    fn eval_masks(&self, rels: &[Vec<u64>], full: u64, slots: &[u64], buf: &mut Vec<u64>) -> u64 {
        buf.clear();
        for op in &self.ops {
            let v = match *op {
                Op::Bottom => 0,
                Op::Var(s) => slots[s],
                Op::Implies(a, b) => (!buf[a] | buf[b]) & full,
                Op::Diamond(m, a) => {
                    let x = buf[a];
                    let mut out = 0u64;
                    if x != 0 {
                        for (w, row) in rels[m].iter().enumerate() {
                            if row & x != 0 {
                                out |= 1 << w;
                            }
                        }
                    }
                    out
                }
            };
            buf.push(v);
        }
        *buf.last().expect("compiled formula is never empty")
    }

    fn eval_sets(&self, f: &Frame, slots: &[WorldSet]) -> WorldSet {
        let n = f.size();
        let mut buf: Vec<WorldSet> = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let v = match *op {
                Op::Bottom => WorldSet::empty(n),
                Op::Var(s) => slots[s].clone(),
                Op::Implies(a, b) => buf[a].complement().union(&buf[b]),
                Op::Diamond(m, a) => f.relation(m).preimage(&buf[a]),
            };
            buf.push(v);
        }
        buf.pop().expect("compiled formula is never empty")
    }
}

struct Compiler<'a> {
    alphabet: &'a ModalityAlphabet,
    ops: Vec<Op>,
    interned: HashMap<Op, usize>,
    seen: HashMap<*const Formula, usize>,
    vars: Vec<u32>,
}

impl Compiler<'_> {
    fn node(&mut self, phi: &Formula) -> Result<usize> {
        let key = phi as *const Formula;
        if let Some(&id) = self.seen.get(&key) {
            return Ok(id);
        }
        let op = match phi {
            Formula::Bottom => Op::Bottom,
            Formula::Var(i) => {
                let slot = match self.vars.iter().position(|v| v == i) {
                    Some(s) => s,
                    None => {
                        self.vars.push(*i);
                        self.vars.len() - 1
                    }
                };
                Op::Var(slot)
            }
            Formula::Implies(a, b) => {
                let a = self.node(a)?;
                let b = self.node(b)?;
                Op::Implies(a, b)
            }
            Formula::Diamond(m, a) => {
                let m = self.alphabet.resolve(m)?;
                Op::Diamond(m, self.node(a)?)
            }
        };
        let id = match self.interned.get(&op) {
            Some(&id) => id,
            None => {
                self.ops.push(op);
                self.interned.insert(op, self.ops.len() - 1);
                self.ops.len() - 1
            }
        };
        self.seen.insert(key, id);
        Ok(id)
    }
}

/// The extension `θ̄(φ)`: worlds of `m` where `phi` holds.
pub fn evaluate(m: &Model, phi: &Formula) -> Result<WorldSet> {
    let c = Compiled::new(phi, m.frame.alphabet())?;
    let k = m.k();
    let mut slots = Vec::with_capacity(c.vars.len());
    for &v in &c.vars {
        match m.valuation.get(v as usize) {
            Some(s) => slots.push(s.clone()),
            None => return Err(Error::VariableOutOfRange { var: v, k }),
        }
    }
    Ok(c.eval_sets(&m.frame, &slots))
}

/// `F ⊨ φ`: `phi` holds everywhere under every valuation of its variables.
pub fn valid_on_frame(f: &Frame, phi: &Formula, cap: usize) -> Result<bool> {
    valid_on_frame_with(f, phi, cap, Exec::default())
}

pub fn valid_on_frame_with(f: &Frame, phi: &Formula, cap: usize, exec: Exec) -> Result<bool> {
    Ok(refuting_valuation_with(f, phi, cap, exec)?.is_none())
}

/// A valuation (pairs of variable index and extension) under which `phi`
/// fails somewhere, or `None` when `phi` is valid on `f`.
pub fn refuting_valuation(f: &Frame, phi: &Formula, cap: usize) -> Result<Option<Vec<(u32, WorldSet)>>> {
    refuting_valuation_with(f, phi, cap, Exec::default())
}

const CHUNK: u64 = 1 << 12;

pub fn refuting_valuation_with(
    f: &Frame,
    phi: &Formula,
    cap: usize,
    exec: Exec,
) -> Result<Option<Vec<(u32, WorldSet)>>> {
    let c = Compiled::new(phi, f.alphabet())?;
    let n = f.size();
    let k = c.vars.len();
    let needed = n * k;
    if needed > cap {
        return Err(Error::CapExceeded { needed, cap });
    }
    if needed > HARD_CAP {
        return Err(Error::CapExceeded {
            needed,
            cap: HARD_CAP,
        });
    }
    if k == 0 {
        let ext = c.eval_sets(f, &[]);
        return Ok((!ext.is_full()).then(Vec::new));
    }
    // n * k ≤ 63 with k ≥ 1, so every world set fits in a u64.
    let rels: Vec<Vec<u64>> = f.relations().iter().map(|r| r.masks()).collect();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let total = 1u64 << needed;
    let hit = exec.find_in_chunks(total, CHUNK, |lo, hi| {
        let mut slots = vec![0u64; k];
        let mut buf = Vec::with_capacity(c.ops.len());
        (lo..hi).find(|&i| {
            for (j, s) in slots.iter_mut().enumerate() {
                *s = (i >> (j * n)) & full;
            }
            c.eval_masks(&rels, full, &slots, &mut buf) != full
        })
    });
    Ok(hit.map(|i| {
        c.vars
            .iter()
            .enumerate()
            .map(|(j, &v)| (v, WorldSet::from_mask(n, (i >> (j * n)) & full)))
            .collect()
    }))
}

/// The partition `~_θ` of worlds agreeing on every formula in the model's
/// variables: the coarsest tuned refinement of the valuation-induced
/// partition.
pub fn theta_partition(m: &Model) -> Partition {
    let v = induced_partition(m.frame.size(), &m.valuation).expect("model sets match the frame");
    coarsest_tuned_refinement(&m.frame, &v).expect("partition matches the frame")
}

/// `phi` is valid on every subframe `F↾Y`, `Y ⊆ X`. The cost bound checked
/// against `cap` is `n + n·k`: `2^n` subsets, each with at most `2^{n·k}`
/// valuations.
pub fn subframe_validity(f: &Frame, phi: &Formula, cap: usize) -> Result<bool> {
    subframe_validity_with(f, phi, cap, Exec::default())
}

pub fn subframe_validity_with(f: &Frame, phi: &Formula, cap: usize, exec: Exec) -> Result<bool> {
    // fail early on unknown modalities
    Compiled::new(phi, f.alphabet())?;
    let n = f.size();
    let k = phi.variables().len();
    let needed = n + n * k;
    if needed > cap {
        return Err(Error::CapExceeded { needed, cap });
    }
    if needed > HARD_CAP {
        return Err(Error::CapExceeded {
            needed,
            cap: HARD_CAP,
        });
    }
    for y in 0..(1u64 << n) {
        let (sub, _) = f.restriction(&WorldSet::from_mask(n, y))?;
        if !valid_on_frame_with(&sub, phi, usize::MAX, exec)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Both sides of the relativized box check at one world.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoxReach {
    /// `M, a ⊨ (□^{≤m} φ)^ξ`.
    pub relativized: bool,
    /// `R_V^*(a) ⊆ θ̄(φ)` with `V = θ̄(ξ)`.
    pub direct: bool,
}

impl BoxReach {
    pub fn agrees(&self) -> bool {
        self.relativized == self.direct
    }
}

/// Evaluates `(□^{≤mm} φ)^ξ` at `a` and compares it with reachability inside
/// `V = θ̄(ξ)`. The box is taken over the first modality of the frame.
pub fn relativized_box_reach(m: &Model, xi: &Formula, phi: &Formula, mm: usize, a: usize) -> Result<BoxReach> {
    let alphabet = m.frame.alphabet();
    let first = alphabet.names().first().ok_or(Error::EmptyAlphabet)?;
    if !phi.modalities().is_empty() {
        return Err(Error::Precondition("phi must be modal-free".into()));
    }
    if a >= m.frame.size() {
        return Err(Error::WorldOutOfRange {
            world: a,
            n: m.frame.size(),
        });
    }
    let v = evaluate(m, xi)?;
    if !v.contains(a) {
        return Err(Error::OutsideRelativization { world: a });
    }
    let boxed = Formula::box_upto(&ModalityAlphabet::of(&[first.as_str()]), mm, phi.clone());
    let relativized = evaluate(m, &relativize(&boxed, xi))?.contains(a);
    let ext = evaluate(m, phi)?;
    let reach = m.frame.relation(0).restrict_to(&v).star();
    let direct = reach.successors(a).is_subset(&ext);
    Ok(BoxReach { relativized, direct })
}
