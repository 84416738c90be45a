use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::{random_formula, random_frame, random_partition, random_set, ExperimentConfig};
use crate::defect::{invariant_violations, main_claim_violation, run_qes_all, run_qes_at, verify_embedding, verify_final_partition};
use crate::formula::{b_formula, b_m_formula, pretransitivity_axiom, reflexive_translate, relativize};
use crate::io::{frame_to_value, valuation_to_value};
use crate::partition::{
    coarsest_tuned_refinement, enumerate_partitions, induced_partition, is_tuned, refines, subalgebra_closure,
};
use crate::semantics::{evaluate, relativized_box_reach, subframe_validity, valid_on_frame_with, Model};
use crate::sums::{
    find_root, lex_as_sum, lex_sum, oplus_cover, phi_violation, pmorphism_violation, star_factorizes, sum_over_index,
    transfer,
};
use crate::{Error, Exec, Formula, Frame, ModalityAlphabet, Result};

/// Most witnesses kept per property.
const WITNESS_LIMIT: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub name: String,
    pub checked: usize,
    pub passed: usize,
    pub failed: usize,
    /// Instances the property did not apply to or that exceeded the cap.
    pub skipped: usize,
    pub witnesses: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub frames: usize,
    pub passed: bool,
    pub properties: Vec<PropertyReport>,
    pub warnings: Vec<String>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

enum Outcome {
    Pass,
    Fail(Value),
    Skip,
}

/// Outcomes recorded while checking one frame.
pub struct Checks {
    results: Vec<(&'static str, Outcome)>,
}

impl Checks {
    /// Records `ok`; `witness` is only built on failure.
    pub fn check(&mut self, property: &'static str, ok: bool, witness: impl FnOnce() -> Value) {
        let outcome = if ok { Outcome::Pass } else { Outcome::Fail(witness()) };
        self.results.push((property, outcome));
    }

    pub fn skip(&mut self, property: &'static str) {
        self.results.push((property, Outcome::Skip));
    }

    /// Records a fallible check; a cap or budget overrun counts as skipped,
    /// any other error as a failure.
    pub fn check_result(&mut self, property: &'static str, r: Result<bool>, witness: impl FnOnce() -> Value) {
        match r {
            Ok(ok) => self.check(property, ok, witness),
            Err(Error::CapExceeded { .. } | Error::BudgetExceeded { .. }) => self.skip(property),
            Err(e) => {
                let mut w = witness();
                if let Value::Object(m) = &mut w {
                    m.insert("error".into(), Value::from(e.to_string()));
                }
                self.results.push((property, Outcome::Fail(w)));
            }
        }
    }
}

/// Runs `check` on every frame (in parallel under `exec`) and merges the
/// outcomes by frame index. Properties are reported in the order given.
pub fn run_checks<F>(
    suite: &str,
    properties: &[&'static str],
    frames: &[Frame],
    cfg: &ExperimentConfig,
    exec: Exec,
    check: F,
) -> SuiteReport
where
    F: Fn(&Frame, &mut ChaCha8Rng, &mut Checks) + Sync + Send,
{
    let indexed: Vec<(usize, &Frame)> = frames.iter().enumerate().collect();
    let per_frame = exec.map(&indexed, |&(i, f)| {
        let mut rng = cfg.rng(i as u64 + 1);
        let mut checks = Checks { results: Vec::new() };
        check(f, &mut rng, &mut checks);
        (i, checks.results)
    });
    let mut reports: Vec<PropertyReport> = properties
        .iter()
        .map(|p| PropertyReport {
            name: p.to_string(),
            checked: 0,
            passed: 0,
            failed: 0,
            skipped: 0,
            witnesses: Vec::new(),
        })
        .collect();
    for (i, results) in per_frame {
        for (prop, outcome) in results {
            let r = match reports.iter_mut().find(|r| r.name == prop) {
                Some(r) => r,
                None => {
                    reports.push(PropertyReport {
                        name: prop.to_string(),
                        checked: 0,
                        passed: 0,
                        failed: 0,
                        skipped: 0,
                        witnesses: Vec::new(),
                    });
                    reports.last_mut().unwrap()
                }
            };
            match outcome {
                Outcome::Pass => {
                    r.checked += 1;
                    r.passed += 1;
                }
                Outcome::Fail(mut w) => {
                    r.checked += 1;
                    r.failed += 1;
                    if r.witnesses.len() < WITNESS_LIMIT {
                        if let Value::Object(m) = &mut w {
                            m.insert("frame_index".into(), Value::from(i));
                        }
                        r.witnesses.push(w);
                    }
                }
                Outcome::Skip => r.skipped += 1,
            }
        }
    }
    let mut warnings = Vec::new();
    if frames.is_empty() {
        warnings.push("no frames generated; every property holds vacuously".into());
    }
    for r in &reports {
        if r.checked == 0 && !frames.is_empty() {
            warnings.push(format!("property `{}` was never checked", r.name));
        }
    }
    SuiteReport {
        suite: suite.to_string(),
        seed: cfg.seed,
        frames: frames.len(),
        passed: reports.iter().all(|r| r.failed == 0),
        properties: reports,
        warnings,
    }
}

type SuiteFn = fn(&Frame, &mut ChaCha8Rng, &ExperimentConfig, Exec, &mut Checks);

struct SuiteDef {
    name: &'static str,
    properties: &'static [&'static str],
    run: SuiteFn,
}

const SUITE_DEFS: &[SuiteDef] = &[
    SuiteDef {
        name: "refinement",
        properties: &["tuned-refinement", "closure-size", "atoms-are-blocks", "coarsest"],
        run: refinement,
    },
    SuiteDef {
        name: "correspondence",
        properties: &["pretransitivity", "height-bm", "height-b"],
        run: correspondence,
    },
    SuiteDef {
        name: "relativization",
        properties: &["relativized-truth", "subframe-validity", "box-reach"],
        run: relativization,
    },
    SuiteDef {
        name: "reflexive",
        properties: &["reflexive-translation"],
        run: reflexive,
    },
    SuiteDef {
        name: "sums",
        properties: &["index-reflexivity", "lex-as-sum", "lex-phi-conditions"],
        run: sums,
    },
    SuiteDef {
        name: "transfer",
        properties: &["transfer-tuned", "transfer-bound", "transfer-refines"],
        run: transfer_suite,
    },
    SuiteDef {
        name: "cover",
        properties: &["star-factorization", "cover", "pmorphic-validity"],
        run: cover,
    },
    SuiteDef {
        name: "qes",
        properties: &["invariants", "main-claim", "embedding", "final-partition", "chain-embedding"],
        run: qes,
    },
];

/// Names accepted by [`run_suite`].
pub const SUITES: &[&str] = &[
    "refinement",
    "correspondence",
    "relativization",
    "reflexive",
    "sums",
    "transfer",
    "cover",
    "qes",
];

/// Generates frames from `cfg` and runs the named suite on them.
pub fn run_suite(name: &str, cfg: &ExperimentConfig, exec: Exec) -> Result<SuiteReport> {
    let frames = super::generate_frames(cfg)?;
    run_suite_on(name, &frames, cfg, exec)
}

pub fn run_suite_on(name: &str, frames: &[Frame], cfg: &ExperimentConfig, exec: Exec) -> Result<SuiteReport> {
    let def = SUITE_DEFS
        .iter()
        .find(|d| d.name == name)
        .ok_or_else(|| Error::Invalid(format!("unknown suite `{name}`; expected one of {}", SUITES.join(", "))))?;
    // frames are already spread over workers; keep inner loops sequential
    let inner = Exec::Sequential;
    Ok(run_checks(def.name, def.properties, frames, cfg, exec, |f, rng, checks| {
        (def.run)(f, rng, cfg, inner, checks)
    }))
}

fn random_sets(rng: &mut ChaCha8Rng, n: usize, bound: usize) -> Vec<crate::WorldSet> {
    let k = rng.gen_range(0..=bound);
    (0..k).map(|_| random_set(rng, n)).collect()
}

fn sets_value(sets: &[crate::WorldSet]) -> Value {
    valuation_to_value(sets)
}

fn refinement(f: &Frame, rng: &mut ChaCha8Rng, cfg: &ExperimentConfig, _: Exec, checks: &mut Checks) {
    let n = f.size();
    let sets = random_sets(rng, n, cfg.variable_bound);
    let v = induced_partition(n, &sets).expect("sizes agree");
    let u = coarsest_tuned_refinement(f, &v).expect("sizes agree");
    let w = || json!({"frame": frame_to_value(f), "sets": sets_value(&sets), "refinement": u.to_string()});
    checks.check(
        "tuned-refinement",
        is_tuned(f, &u).unwrap() && refines(&u, &v).unwrap(),
        w,
    );
    if u.len() < 20 {
        let closure = subalgebra_closure(f, &sets).expect("sizes agree");
        checks.check("closure-size", closure.len() == 1 << u.len(), w);
        checks.check("atoms-are-blocks", closure.atoms() == u.blocks(), w);
    } else {
        checks.skip("closure-size");
        checks.skip("atoms-are-blocks");
    }
    if n <= 5 {
        let ok = enumerate_partitions(n, n.max(1))
            .iter()
            .filter(|p| refines(p, &v).unwrap() && is_tuned(f, p).unwrap())
            .all(|p| refines(p, &u).unwrap());
        checks.check("coarsest", ok, w);
    } else {
        checks.skip("coarsest");
    }
}

fn correspondence(f: &Frame, _: &mut ChaCha8Rng, cfg: &ExperimentConfig, exec: Exec, checks: &mut Checks) {
    let alphabet = f.alphabet();
    let degree = f.transitivity_degree();
    let height = f.height();
    for m in 0..=3 {
        let phi = pretransitivity_axiom(m, alphabet).expect("nonempty alphabet");
        let valid = valid_on_frame_with(f, &phi, cfg.cap, exec);
        checks.check_result("pretransitivity", valid.map(|v| v == (degree <= m)), || {
            json!({"frame": frame_to_value(f), "m": m, "degree": degree})
        });
    }
    for m in degree..=3 {
        for h in 0..=3 {
            let phi = b_m_formula(h, m, alphabet).expect("nonempty alphabet");
            let valid = valid_on_frame_with(f, &phi, cfg.cap, exec);
            checks.check_result("height-bm", valid.map(|v| v == (height <= h)), || {
                json!({"frame": frame_to_value(f), "m": m, "h": h, "height": height})
            });
        }
    }
    let name = &alphabet.names()[0];
    let t = Frame::unimodal(name, f.relation(0).transitive_closure());
    let th = t.height();
    for h in 0..=3 {
        let valid = valid_on_frame_with(&t, &b_formula(h, name), cfg.cap, exec);
        checks.check_result("height-b", valid.map(|v| v == (th <= h)), || {
            json!({"frame": frame_to_value(&t), "h": h, "height": th})
        });
    }
}

fn relativization(f: &Frame, rng: &mut ChaCha8Rng, cfg: &ExperimentConfig, exec: Exec, checks: &mut Checks) {
    let n = f.size();
    let alphabet = f.alphabet();
    let k = cfg.variable_bound as u32;
    for _ in 0..cfg.formulas_per_frame {
        let valuation: Vec<_> = (0..k).map(|_| random_set(rng, n)).collect();
        let model = Model::new(f.clone(), valuation.clone()).expect("sizes agree");
        let xi = random_formula(rng, k, cfg.depth_bound.min(2), alphabet);
        let phi = random_formula(rng, k, cfg.depth_bound, alphabet);
        let w = || {
            json!({"frame": frame_to_value(f), "valuation": sets_value(&valuation),
                   "xi": xi.to_string(), "phi": phi.to_string()})
        };
        let v = evaluate(&model, &xi).expect("formula fits the model");
        let (sub, map) = model.restriction(&v).expect("subset of the domain");
        let inside = evaluate(&sub, &phi).expect("formula fits the model");
        let outside = evaluate(&model, &relativize(&phi, &xi)).expect("formula fits the model");
        let ok = v.iter().all(|a| inside.contains(map[a].expect("a is kept")) == outside.contains(a));
        checks.check("relativized-truth", ok, w);

        let body = random_formula(rng, k, 0, alphabet);
        if let Some(a) = v.first() {
            let r = relativized_box_reach(&model, &xi, &body, n, a).map(|r| r.agrees());
            checks.check_result("box-reach", r, || {
                json!({"frame": frame_to_value(f), "valuation": sets_value(&valuation),
                       "xi": xi.to_string(), "phi": body.to_string(), "world": a})
            });
        } else {
            checks.skip("box-reach");
        }
    }
    if n <= 4 {
        for _ in 0..cfg.formulas_per_frame {
            let phi = random_formula(rng, k.min(2), cfg.depth_bound, alphabet);
            let q = Formula::var(phi.variables().last().map_or(0, |v| v + 1));
            let lhs = Formula::implies(q.clone(), relativize(&phi, &q));
            let r = (|| {
                let a = valid_on_frame_with(f, &lhs, cfg.cap, exec)?;
                let b = subframe_validity(f, &phi, cfg.cap)?;
                Ok(a == b)
            })();
            checks.check_result("subframe-validity", r, || {
                json!({"frame": frame_to_value(f), "phi": phi.to_string()})
            });
        }
    } else {
        checks.skip("subframe-validity");
    }
}

fn reflexive(f: &Frame, rng: &mut ChaCha8Rng, cfg: &ExperimentConfig, exec: Exec, checks: &mut Checks) {
    let fr = f.reflexive_closure();
    let k = cfg.variable_bound.min(2) as u32;
    for _ in 0..cfg.formulas_per_frame {
        let phi = random_formula(rng, k, cfg.depth_bound, f.alphabet());
        let r = (|| {
            let a = valid_on_frame_with(f, &reflexive_translate(&phi), cfg.cap, exec)?;
            let b = valid_on_frame_with(&fr, &phi, cfg.cap, exec)?;
            Ok(a == b)
        })();
        checks.check_result("reflexive-translation", r, || {
            json!({"frame": frame_to_value(f), "phi": phi.to_string()})
        });
    }
}

fn summands_for(rng: &mut ChaCha8Rng, count: usize, alphabet: &ModalityAlphabet, cfg: &ExperimentConfig) -> Vec<Frame> {
    let bound = cfg.world_bound.min(3);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(0..=bound);
            random_frame(rng, n, alphabet, cfg.density)
        })
        .collect()
}

fn frames_value(frames: &[Frame]) -> Value {
    Value::from(frames.iter().map(frame_to_value).collect::<Vec<_>>())
}

fn sums(f: &Frame, rng: &mut ChaCha8Rng, cfg: &ExperimentConfig, _: Exec, checks: &mut Checks) {
    let summands = summands_for(rng, f.size(), f.alphabet(), cfg);
    let base = sum_over_index(f, &summands).expect("alphabets agree").frame;
    let r1 = sum_over_index(&f.reflexive_closure(), &summands).expect("alphabets agree").frame;
    let r2 = sum_over_index(&f.irreflexive_part(), &summands).expect("alphabets agree").frame;
    checks.check("index-reflexivity", base == r1 && base == r2, || {
        json!({"index": frame_to_value(f), "summands": frames_value(&summands)})
    });

    let horizontal = ModalityAlphabet::of(&["h", "k"]);
    let horizontal = ModalityAlphabet::new(horizontal.names()[..rng.gen_range(1..=2)].to_vec()).unwrap();
    let inner = summands_for(rng, f.size(), &horizontal, cfg);
    let w = || json!({"index": frame_to_value(f), "summands": frames_value(&inner)});
    let lex = lex_sum(f, &inner).expect("disjoint alphabets");
    let enc = lex_as_sum(f, &inner).expect("disjoint alphabets");
    checks.check("lex-as-sum", lex.frame == enc.frame, w);
    let ok = phi_violation(&lex.frame, f.alphabet(), &horizontal).map(|v| v.is_none());
    checks.check_result("lex-phi-conditions", ok, w);
}

fn transfer_suite(f: &Frame, rng: &mut ChaCha8Rng, cfg: &ExperimentConfig, _: Exec, checks: &mut Checks) {
    let summands = summands_for(rng, f.size(), f.alphabet(), cfg);
    let s = sum_over_index(f, &summands).expect("alphabets agree");
    let n = s.frame.size();
    let v0 = if rng.gen_bool(0.5) {
        induced_partition(n, &random_sets(rng, n, cfg.variable_bound)).unwrap()
    } else {
        random_partition(rng, n)
    };
    let w = || json!({"index": frame_to_value(f), "summands": frames_value(&summands), "v0": v0.to_string()});
    match transfer(&s, &v0) {
        Ok(t) => {
            checks.check("transfer-tuned", is_tuned(&s.frame, &t.s).unwrap(), w);
            checks.check("transfer-bound", t.s.len() <= t.v.len() * t.u.len(), w);
            checks.check("transfer-refines", refines(&t.s, &v0).unwrap(), w);
        }
        Err(e) => {
            let mut wv = w();
            wv["error"] = Value::from(e.to_string());
            checks.check("transfer-tuned", false, || wv);
        }
    }
}

fn cover(f: &Frame, rng: &mut ChaCha8Rng, cfg: &ExperimentConfig, exec: Exec, checks: &mut Checks) {
    let mut candidates: Vec<(Frame, ModalityAlphabet, ModalityAlphabet)> = Vec::new();
    if f.alphabet().len() >= 2 {
        let names = f.alphabet().names();
        let v = ModalityAlphabet::new(names[..1].to_vec()).unwrap();
        let h = ModalityAlphabet::new(names[1..].to_vec()).unwrap();
        candidates.push((f.clone(), v, h));
    }
    // a constructed lexicographic sum over a small index
    let v = ModalityAlphabet::of(&["v"]);
    let h = ModalityAlphabet::of(&["h"]);
    let idx_n = rng.gen_range(1..=cfg.world_bound.min(3));
    let index = random_frame(rng, idx_n, &v, cfg.density);
    let inner: Vec<Frame> = (0..idx_n)
        .map(|_| {
            let n = rng.gen_range(1..=cfg.world_bound.min(3));
            random_frame(rng, n, &h, cfg.density)
        })
        .collect();
    candidates.push((lex_sum(&index, &inner).expect("disjoint").frame, v, h));

    for (g, v, h) in candidates {
        let phi_ok = phi_violation(&g, &v, &h).expect("split is valid").is_none();
        if !phi_ok {
            checks.skip("star-factorization");
            checks.skip("cover");
            continue;
        }
        checks.check("star-factorization", star_factorizes(&g, &v, &h).unwrap(), || {
            json!({"frame": frame_to_value(&g)})
        });
        let Some(root) = find_root(&g) else {
            checks.skip("cover");
            continue;
        };
        let c = match oplus_cover(&g, &v, &h, root) {
            Ok(c) => c,
            Err(e) => {
                checks.check("cover", false, || json!({"frame": frame_to_value(&g), "error": e.to_string()}));
                continue;
            }
        };
        checks.check("cover", c.verified(), || {
            json!({"frame": frame_to_value(&g), "root": root,
                   "pmorphism": pmorphism_violation(&c.map).map(|p| p.to_string()),
                   "surjective": c.surjective})
        });
        let dom = c.map.domain.reorder(g.alphabet()).expect("same modalities");
        for _ in 0..cfg.formulas_per_frame {
            let phi = random_formula(rng, 1, cfg.depth_bound, g.alphabet());
            let r = (|| {
                let on_cover = valid_on_frame_with(&dom, &phi, cfg.cap, exec)?;
                let on_image = valid_on_frame_with(&g, &phi, cfg.cap, exec)?;
                Ok(!on_cover || on_image)
            })();
            checks.check_result("pmorphic-validity", r, || {
                json!({"frame": frame_to_value(&g), "cover": frame_to_value(&dom), "phi": phi.to_string()})
            });
        }
    }
}

fn qes(f: &Frame, rng: &mut ChaCha8Rng, cfg: &ExperimentConfig, _: Exec, checks: &mut Checks) {
    let gens = random_sets(rng, f.size(), cfg.variable_bound);
    let designated = rng.gen_range(0..f.alphabet().len());
    let w = || json!({"frame": frame_to_value(f), "designated": designated, "generators": sets_value(&gens)});
    let t = match run_qes_at(f, designated, &gens) {
        Ok(t) => t,
        Err(e) => {
            let mut wv = w();
            wv["error"] = Value::from(e.to_string());
            checks.check("invariants", false, || wv);
            return;
        }
    };
    let inv = invariant_violations(&t);
    checks.check("invariants", inv.is_empty(), || {
        let mut wv = w();
        wv["violations"] = Value::from(inv.clone());
        wv
    });
    let mc = main_claim_violation(&t);
    checks.check("main-claim", mc.is_none(), || {
        let mut wv = w();
        wv["violation"] = serde_json::to_value(&mc).unwrap();
        wv
    });
    checks.check("embedding", verify_embedding(&t), w);
    checks.check("final-partition", verify_final_partition(&t), w);
    if f.alphabet().len() > 1 {
        let ok = run_qes_all(f, &gens).and_then(|c| c.verify_embedding(f, &gens));
        checks.check_result("chain-embedding", ok, w);
    } else {
        checks.skip("chain-embedding");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            frame_count: 15,
            world_bound: 4,
            formulas_per_frame: 2,
            ..Default::default()
        }
    }

    #[test]
    fn every_suite_passes_on_a_small_batch() {
        for name in SUITES {
            let r = run_suite(name, &small(), Exec::default()).unwrap();
            assert!(r.passed, "{}", r.to_json());
        }
    }

    #[test]
    fn reports_are_stable() {
        let a = run_suite("refinement", &small(), Exec::Parallel).unwrap();
        let b = run_suite("refinement", &small(), Exec::Sequential).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn corrupted_oracle_is_caught() {
        let cfg = small();
        let frames = super::super::generate_frames(&cfg).unwrap();
        // "oracle" that believes every closure has 2^(blocks+1) members
        let r = run_checks("broken", &["closure-size"], &frames, &cfg, Exec::Sequential, |f, _, checks| {
            let u = coarsest_tuned_refinement(f, &crate::Partition::trivial(f.size())).unwrap();
            let c = subalgebra_closure(f, &[]).unwrap();
            checks.check("closure-size", c.len() == 1 << (u.len() + 1), || {
                json!({"frame": frame_to_value(f)})
            });
        });
        assert!(!r.passed);
        assert_eq!(r.properties[0].failed, frames.len());
        assert!(!r.properties[0].witnesses.is_empty());
        assert!(r.properties[0].witnesses[0]["frame"]["worlds"].is_u64());
    }

    #[test]
    fn empty_batch_passes_with_warning() {
        let cfg = ExperimentConfig {
            frame_count: 0,
            ..Default::default()
        };
        let r = run_suite("qes", &cfg, Exec::default()).unwrap();
        assert!(r.passed);
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", &small(), Exec::default()).is_err());
    }
}
