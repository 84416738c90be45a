use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use kframe::defect::{run_qes, run_qes_all, QesReport};
use kframe::experiment::{run_suite, ExperimentConfig, SuiteReport, SUITES};
use kframe::formula::{m_translate, reflexive_translate, relativize};
use kframe::partition::{coarsest_tuned_refinement, induced_partition, is_tuned};
use kframe::semantics::{evaluate, refuting_valuation_with};
use kframe::sums::{find_root, lex_sum, oplus_cover, phi_violation, star_factorizes, sum_over_index, transfer, SumFrame};
use kframe::{io, Error, Exec, ModalityAlphabet, Model, Partition, WorldSet};
use serde_json::{json, Value};

use crate::{input, Command, Mode, Outcome, SuiteArgs};

pub struct Ctx {
    pub seed: u64,
    pub cap: usize,
}

fn report(json: Value, text: String) -> Outcome {
    Outcome { json, text, ok: true }
}

fn partition_value(p: &Partition) -> Value {
    json!({ "text": p.to_string(), "blocks": p.to_vecs() })
}

pub fn run(ctx: &Ctx, cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Parse { formulas } => {
            let phis = input::formulas(&formulas)?;
            let mut text = String::new();
            let items: Vec<Value> = phis
                .iter()
                .map(|phi| {
                    let _ = writeln!(text, "{phi}");
                    json!({
                        "formula": phi.to_string(),
                        "depth": phi.depth(),
                        "size": phi.size(),
                        "variables": phi.variables(),
                        "modalities": phi.modalities(),
                    })
                })
                .collect();
            Ok(report(Value::from(items), text))
        }
        Command::Modelcheck { frame, val, formulas } => {
            let f = input::frame(&frame)?;
            let sets = io::valuation_from_json(&input::read(&val)?, f.size())?;
            let model = Model::new(f, sets)?;
            let mut text = String::new();
            let mut items = Vec::new();
            for phi in input::formulas(&formulas)? {
                let ext = evaluate(&model, &phi)?;
                let _ = writeln!(text, "{phi}: {ext}");
                items.push(json!({ "formula": phi.to_string(), "worlds": ext.to_vec() }));
            }
            Ok(report(Value::from(items), text))
        }
        Command::Valid { frame, formulas } => {
            let f = input::frame(&frame)?;
            let mut text = String::new();
            let mut items = Vec::new();
            for phi in input::formulas(&formulas)? {
                let refutation = refuting_valuation_with(&f, &phi, ctx.cap, Exec::Parallel)?;
                let valuation = refutation.as_ref().map(|r| {
                    let sets: serde_json::Map<String, Value> =
                        r.iter().map(|(i, s)| (format!("p{i}"), Value::from(s.to_vec()))).collect();
                    Value::Object(sets)
                });
                match &refutation {
                    None => {
                        let _ = writeln!(text, "{phi}: valid");
                    }
                    Some(r) => {
                        let shown: Vec<String> = r.iter().map(|(i, s)| format!("p{i}={s}")).collect();
                        let _ = writeln!(text, "{phi}: refuted by {}", shown.join(" "));
                    }
                }
                items.push(json!({
                    "formula": phi.to_string(),
                    "valid": refutation.is_none(),
                    "refuting_valuation": valuation,
                }));
            }
            Ok(report(Value::from(items), text))
        }
        Command::Refine { frame, partition, val } => {
            let f = input::frame(&frame)?;
            let n = f.size();
            let start = match (partition, val) {
                (Some(p), _) => Partition::parse_for(&p, n)?,
                (None, Some(path)) => induced_partition(n, &io::valuation_from_json(&input::read(&path)?, n)?)?,
                (None, None) => Partition::trivial(n),
            };
            let refined = coarsest_tuned_refinement(&f, &start)?;
            let was_tuned = is_tuned(&f, &start)?;
            let text = format!(
                "refined: {refined}\nblocks: {}\nalready tuned: {was_tuned}\n",
                refined.len()
            );
            Ok(report(
                json!({
                    "input": partition_value(&start),
                    "refined": partition_value(&refined),
                    "already_tuned": was_tuned,
                }),
                text,
            ))
        }
        Command::Height { frame } => {
            let h = input::frame(&frame)?.height();
            Ok(report(json!({ "height": h }), format!("{h}\n")))
        }
        Command::Degree { frame } => {
            let d = input::frame(&frame)?.transitivity_degree();
            Ok(report(json!({ "degree": d }), format!("{d}\n")))
        }
        Command::Skeleton { frame } => {
            let sk = input::frame(&frame)?.skeleton();
            let mut text = String::new();
            for (i, c) in sk.clusters.iter().enumerate() {
                let above: Vec<String> =
                    sk.order.iter().filter(|(a, _)| *a == i).map(|(_, b)| b.to_string()).collect();
                let _ = writeln!(text, "{i}: {c} below [{}]", above.join(","));
            }
            let _ = writeln!(text, "height: {}", sk.height());
            Ok(report(
                json!({
                    "clusters": sk.clusters.iter().map(WorldSet::to_vec).collect::<Vec<_>>(),
                    "order": sk.order,
                    "height": sk.height(),
                }),
                text,
            ))
        }
        Command::Sum { index, summands, out, map } => {
            let s = sum_over_index(&input::frame(&index)?, &input::frames(&summands)?)?;
            emit_sum(&s, out.as_deref(), map.as_deref())
        }
        Command::Lexsum {
            index,
            summands,
            split,
            product,
            out,
            map,
        } => {
            let index = input::frame(&index)?;
            let mut summands = input::frames(&summands)?;
            if product {
                if summands.len() != 1 {
                    bail!("--product takes exactly one summand");
                }
                summands = vec![summands[0].clone(); index.size()];
            }
            if let Some(text) = split {
                let (v, h) = input::split(&text)?;
                check_same(&v, index.alphabet(), "index")?;
                if let Some(first) = summands.first() {
                    check_same(&h, first.alphabet(), "summand")?;
                }
            }
            emit_sum(&lex_sum(&index, &summands)?, out.as_deref(), map.as_deref())
        }
        Command::Transfer {
            index,
            summands,
            partition,
        } => {
            let s = sum_over_index(&input::frame(&index)?, &input::frames(&summands)?)?;
            let n = s.frame.size();
            let v0 = match partition {
                Some(p) => Partition::parse_for(&p, n)?,
                None => Partition::trivial(n),
            };
            let t = transfer(&s, &v0)?;
            let tuned = is_tuned(&s.frame, &t.s)?;
            let bound = t.s.len() <= t.v.len() * t.u.len();
            let text = format!(
                "v: {}\nt-profiles: {}\nu: {}\nS: {}\ntuned: {tuned}\n|S| = {} <= |v|*|u| = {}: {bound}\n",
                t.v,
                t.t_partition,
                t.u,
                t.s,
                t.s.len(),
                t.v.len() * t.u.len()
            );
            Ok(Outcome {
                json: json!({
                    "v0": partition_value(&v0),
                    "v": partition_value(&t.v),
                    "t_partition": partition_value(&t.t_partition),
                    "u": partition_value(&t.u),
                    "S": partition_value(&t.s),
                    "tuned": tuned,
                    "bound": bound,
                }),
                text,
                ok: tuned && bound,
            })
        }
        Command::Cover {
            frame,
            split,
            root,
            out,
            map,
        } => {
            let f = input::frame(&frame)?;
            let (v, h) = input::split(&split)?;
            let root = match root {
                Some(r) => r,
                None => find_root(&f).ok_or(Error::NoRoot)?,
            };
            let c = oplus_cover(&f, &v, &h, root)?;
            if let Some(path) = &out {
                input::write(path, &io::frame_to_json(&c.cover.frame))?;
            }
            if let Some(path) = &map {
                input::write(path, &io::map_to_json(&c.map.map))?;
            }
            let pm = c.pmorphism.as_ref().map(ToString::to_string);
            let text = format!(
                "root: {root}\ncover worlds: {}\nmap: {:?}\np-morphism: {}\nsurjective: {}\nstar factorization: {}\n",
                c.cover.frame.size(),
                c.map.map,
                pm.as_deref().unwrap_or("yes"),
                c.surjective,
                c.star_factorizes
            );
            Ok(Outcome {
                json: json!({
                    "root": root,
                    "frame": io::frame_to_value(&c.cover.frame),
                    "map": c.map.map,
                    "pmorphism": c.pmorphism.is_none(),
                    "pmorphism_witness": pm,
                    "surjective": c.surjective,
                    "star_factorizes": c.star_factorizes,
                }),
                text,
                ok: c.verified(),
            })
        }
        Command::PhiCheck { frame, split } => {
            let f = input::frame(&frame)?;
            let (v, h) = input::split(&split)?;
            let w = phi_violation(&f, &v, &h)?;
            let fact = star_factorizes(&f, &v, &h)?;
            let witness = w.as_ref().map(ToString::to_string);
            let text = format!(
                "conditions: {}\nstar factorization: {fact}\n",
                witness.as_deref().map_or("hold".to_string(), |w| format!("fail, {w}"))
            );
            Ok(report(
                json!({
                    "conditions": w.is_none(),
                    "witness": witness,
                    "star_factorizes": fact,
                }),
                text,
            ))
        }
        Command::Translate {
            mode,
            formulas,
            xi,
            m,
            alphabet,
        } => {
            let phis = input::formulas(&formulas)?;
            let xi = xi.as_deref().map(input::formula).transpose()?;
            let mut out = Vec::new();
            for phi in &phis {
                let t = match mode {
                    Mode::Reflexive => reflexive_translate(phi),
                    Mode::Relativize => relativize(phi, xi.as_ref().context("--mode relativize needs --xi")?),
                    Mode::M => {
                        let m = m.context("--mode m needs --m")?;
                        let alphabet = match &alphabet {
                            Some(list) => input::alphabet(list)?,
                            None => ModalityAlphabet::new(phi.modalities())?,
                        };
                        m_translate(phi, m, &alphabet)?
                    }
                };
                out.push(t.to_string());
            }
            let text = out.iter().map(|t| format!("{t}\n")).collect();
            Ok(report(Value::from(out), text))
        }
        Command::Qes {
            frame,
            modality,
            generators,
            all,
        } => {
            let f = input::frame(&frame)?;
            let gens = match &generators {
                Some(path) => io::valuation_from_json(&input::read(path)?, f.size())?,
                None => Vec::new(),
            };
            if all {
                let chain = run_qes_all(&f, &gens)?;
                let reports: Vec<QesReport> = chain.traces.iter().map(|t| t.report()).collect();
                let embedded = chain.verify_embedding(&f, &gens)?;
                let mut text: String = reports.iter().map(qes_text).collect();
                let _ = writeln!(text, "chain embedding: {embedded}");
                let ok = embedded && reports.iter().all(|r| r.verdicts.all_pass());
                return Ok(Outcome {
                    json: json!({ "traces": reports, "embedding": embedded }),
                    text,
                    ok,
                });
            }
            let name = match modality {
                Some(m) => m,
                None if f.alphabet().len() == 1 => f.alphabet().names()[0].clone(),
                None => bail!("frame has several modalities; pick one with --modality"),
            };
            let r = run_qes(&f, &name, &gens)?.report();
            Ok(Outcome {
                text: qes_text(&r),
                ok: r.verdicts.all_pass(),
                json: serde_json::to_value(&r)?,
            })
        }
        Command::Suite(args) => suite(ctx, args),
    }
}

fn check_same(expected: &ModalityAlphabet, found: &ModalityAlphabet, what: &str) -> Result<()> {
    let mut a = expected.names().to_vec();
    let mut b = found.names().to_vec();
    a.sort();
    b.sort();
    if a != b {
        bail!("split names [{}] but the {what} alphabet is [{}]", a.join(","), b.join(","));
    }
    Ok(())
}

fn emit_sum(s: &SumFrame, out: Option<&std::path::Path>, map: Option<&std::path::Path>) -> Result<Outcome> {
    let frame = io::frame_to_json(&s.frame);
    if let Some(path) = map {
        input::write(path, &io::map_to_json(&s.index_of))?;
    }
    let text = match out {
        Some(path) => {
            input::write(path, &frame)?;
            format!("wrote {} worlds to {}\n", s.frame.size(), path.display())
        }
        None => frame,
    };
    Ok(report(
        json!({ "frame": io::frame_to_value(&s.frame), "map": s.index_of }),
        text,
    ))
}

fn qes_text(r: &QesReport) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "modality {} on {} worlds", r.modality, r.worlds);
    for (i, s) in r.stages.iter().enumerate() {
        let _ = writeln!(t, "  stage {i}: {}  defects {:?}", s.partition, s.defects);
    }
    let _ = writeln!(t, "  N = {}", r.n_final);
    let _ = writeln!(t, "  Q = {:?}", r.q);
    let _ = writeln!(t, "  E = {:?}", r.e);
    let _ = writeln!(t, "  T+ = {:?}  T- = {:?}", r.t_plus, r.t_minus);
    let _ = writeln!(t, "  S = {:?}", r.s);
    let v = &r.verdicts;
    let _ = writeln!(
        t,
        "  main claim: {}  embedding: {}  final partition: {}  invariants: {}",
        v.main_claim,
        v.embedding,
        v.final_partition,
        if v.invariants.is_empty() { "ok".to_string() } else { v.invariants.join("; ") }
    );
    t
}

fn suite(ctx: &Ctx, a: SuiteArgs) -> Result<Outcome> {
    let mut cfg: ExperimentConfig = match &a.config {
        Some(path) => serde_json::from_str(&input::read(path)?).with_context(|| format!("in {}", path.display()))?,
        None => ExperimentConfig::default(),
    };
    cfg.seed = ctx.seed;
    cfg.cap = ctx.cap;
    let overrides = [
        (a.frames, &mut cfg.frame_count),
        (a.world_bound, &mut cfg.world_bound),
        (a.modality_bound, &mut cfg.modality_bound),
        (a.variable_bound, &mut cfg.variable_bound),
        (a.depth_bound, &mut cfg.depth_bound),
    ];
    for (flag, slot) in overrides {
        if let Some(v) = flag {
            *slot = v;
        }
    }
    if let Some(d) = a.density {
        cfg.density = d;
    }
    let exec = if a.sequential { Exec::Sequential } else { Exec::Parallel };
    let names: Vec<&str> = if a.name == "all" { SUITES.to_vec() } else { vec![a.name.as_str()] };
    let reports = names
        .iter()
        .map(|n| run_suite(n, &cfg, exec))
        .collect::<kframe::Result<Vec<SuiteReport>>>()?;
    let mut text = String::new();
    for r in &reports {
        let _ = writeln!(text, "suite {}: {}", r.suite, if r.passed { "pass" } else { "FAIL" });
        for p in &r.properties {
            let _ = writeln!(
                text,
                "  {:<22} checked {:>5}  passed {:>5}  failed {:>3}  skipped {:>3}",
                p.name, p.checked, p.passed, p.failed, p.skipped
            );
        }
        for w in &r.warnings {
            let _ = writeln!(text, "  warning: {w}");
        }
    }
    let ok = reports.iter().all(|r| r.passed);
    let json = if reports.len() == 1 {
        serde_json::to_value(&reports[0])?
    } else {
        serde_json::to_value(&reports)?
    };
    Ok(Outcome { json, text, ok })
}
