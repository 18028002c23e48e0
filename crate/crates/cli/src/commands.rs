//! Subcommand bodies. Each writes JSON lines (or CSV) to `out` and returns
//! whether every expectation it checks held.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use lindyn_core::criteria::{evaluate, CriterionKind, CriterionVerdict, TrimPolicy};
use lindyn_core::dynamics::orbit_trace;
use lindyn_core::funcspace::GridFunction;
use lindyn_core::measure::{adjoint_criterion, measure_approximant, measure_errors, AtomTrim};
use lindyn_core::porosity::{
    build_gamma, build_h, build_script_e, corollary_check, corollary_g, gamma_membership, porosity_probe, random_partner,
    random_scene, GammaSet, ProbeBudget,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Experiment, Scene, SpaceKind};
use crate::registry::{lookup, run_example, Row, EXAMPLE_IDS};

fn emit(out: &mut dyn Write, line: &Value) -> Result<()> {
    writeln!(out, "{line}")?;
    Ok(())
}

/// Writes `lines` to `<dir>/<name>` when an output directory is configured.
fn save(dir: Option<&Path>, name: &str, body: &[u8]) -> Result<()> {
    if let Some(dir) = dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(name);
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn jsonl(lines: &[Value]) -> Vec<u8> {
    let mut s = String::new();
    for l in lines {
        s.push_str(&l.to_string());
        s.push('\n');
    }
    s.into_bytes()
}

fn summary(v: &CriterionVerdict, operator: &str) -> Value {
    json!({
        "operator": operator,
        "kind": v.kind,
        "status": v.status,
        "first_hit": v.first_hit(),
        "min_q": v.min_q(),
        "horizon": v.horizon,
        "tol": v.tol,
    })
}

/// Criterion kinds applicable in a space.
pub fn kinds_for(space: &SpaceKind) -> Vec<CriterionKind> {
    use CriterionKind::*;
    match space {
        SpaceKind::L2 => vec![SupercyclicSolid, CesaroSolid, HypercyclicSolid],
        SpaceKind::C0 => vec![SupercyclicC0, CesaroC0],
        SpaceKind::Segal { .. } => vec![SupercyclicSegal, CesaroSegal],
    }
}

pub fn classify(exp: &Experiment, out: &mut dyn Write) -> Result<bool> {
    let c = &exp.config;
    let window = exp.window()?;
    let verdicts: Vec<CriterionVerdict> = kinds_for(&c.space)
        .par_iter()
        .map(|&kind| {
            let (n, tol) = if kind.is_cesaro() || kind == CriterionKind::HypercyclicSolid {
                (c.slow_horizon, c.slow_tol)
            } else {
                (c.horizon, c.tol)
            };
            evaluate(kind, &exp.operator, &window, n, tol, &TrimPolicy::OFF)
        })
        .collect::<lindyn_core::Result<_>>()?;
    let mut trace = Vec::new();
    for v in &verdicts {
        emit(out, &summary(v, &exp.operator_name))?;
        trace.extend(v.json_lines(json!({"operator": exp.operator_name, "window": c.window})));
    }
    save(c.out.as_deref(), "classify.jsonl", &jsonl(&trace))?;
    Ok(true)
}

pub fn orbit(exp: &Experiment, out: &mut dyn Write) -> Result<bool> {
    let c = &exp.config;
    let f = c.orbit.seed_fn.sample(exp.grid);
    let horizon = c.orbit.horizon.unwrap_or(c.horizon);
    let kind = exp.norm_kind();
    let targets: Vec<GridFunction> = c.orbit.targets.iter().map(|t| t.sample(exp.grid)).collect();
    let mut body = Vec::new();
    if targets.is_empty() {
        orbit_trace(&exp.operator, &f, horizon, &kind, None)?.write_csv(&mut body)?;
    } else {
        for (i, g) in targets.iter().enumerate() {
            let mut part = Vec::new();
            orbit_trace(&exp.operator, &f, horizon, &kind, Some(g))?.write_csv(&mut part)?;
            if i > 0 {
                // keep a single header
                let cut = part.iter().position(|&b| b == b'\n').map_or(0, |p| p + 1);
                part.drain(..cut);
            }
            body.extend(part);
        }
    }
    out.write_all(&body)?;
    save(c.out.as_deref(), "orbit.csv", &body)?;
    Ok(true)
}

pub fn porosity(exp: &Experiment, out: &mut dyn Write) -> Result<bool> {
    let c = &exp.config;
    let p = &c.porosity;
    let mut lines = Vec::new();
    let pass = match p.scene {
        Scene::Corollary => {
            // the check needs every integer up to the horizon on the grid
            let half = exp.grid.half_width().max(p.horizon as f64);
            let grid = lindyn_core::funcspace::Grid::new(half, exp.grid.step())?;
            let cg = corollary_g(&exp.operator, grid);
            let f = cg.gamma.g().clone();
            let min = corollary_check(&exp.operator, &cg.gamma, &f, p.horizon)?;
            lines.push(json!({
                "scene": "corollary",
                "operator": exp.operator_name,
                "horizon": p.horizon,
                "min_norm": min,
                "warning": cg.warning,
                "pass": min >= 1.0,
            }));
            min >= 1.0
        }
        Scene::Theorem => {
            let results: Vec<(Value, Vec<Value>, bool)> = (0..p.scenes)
                .into_par_iter()
                .map(|i| theorem_scene(exp, c.seed.wrapping_add(i)))
                .collect::<Result<_>>()?;
            let mut all = true;
            for (head, records, ok) in results {
                lines.push(head);
                lines.extend(records);
                all &= ok;
            }
            all
        }
        Scene::Singleton => {
            let x = GridFunction::zeros(exp.grid);
            let member = |z: &GridFunction| z.is_zero();
            let budget = ProbeBudget {
                outer: p.outer,
                inner: p.inner,
            };
            let outcome = porosity_probe(&member, &x, p.lambda, p.delta, budget, c.seed);
            let found = outcome.witness.is_some();
            lines.push(json!({"scene": "singleton", "witness": found, "pass": found}));
            lines.extend(outcome.records.iter().map(|r| serde_json::to_value(r).expect("plain record")));
            found
        }
    };
    for l in &lines {
        emit(out, l)?;
    }
    save(c.out.as_deref(), "porosity.jsonl", &jsonl(&lines))?;
    Ok(pass)
}

/// Constructions on one random scene, then a probe of `Gamma_g` at a point
/// well inside it.
fn theorem_scene(exp: &Experiment, seed: u64) -> Result<(Value, Vec<Value>, bool)> {
    let p = &exp.config.porosity;
    let s = random_scene(exp.grid, seed)?;
    let q = &s.params;
    let h = build_h(&s.g, q.n_cut, q.delta, q.beta);
    let e = build_script_e(&s.k, &s.f, &h, &s.g, q)?;
    let v = random_partner(&s, &e, seed ^ 0x5eed, 0.9)?;
    let gamma = build_gamma(&e, &v, &s.f, &s.g, &h, q)?;
    let set = GammaSet::new(s.g.clone())?;
    let nested = gamma_membership(&h, &set)?;
    let x = s.g.scale(Complex64::new(1.0 / (0.9 * p.lambda), 0.0));
    let member = |z: &GridFunction| gamma_membership(z, &set).unwrap_or(false);
    let budget = ProbeBudget {
        outer: p.outer,
        inner: p.inner,
    };
    let outcome = porosity_probe(&member, &x, p.lambda, p.delta, budget, seed);
    let ok = nested && outcome.witness.is_none();
    let head = json!({
        "scene": "theorem",
        "seed": seed,
        "n_cut": q.n_cut,
        "params": q,
        "gamma_distance": gamma.sub(&v)?.sup_norm(),
        "contracts": "ok",
        "witness": outcome.witness.is_some(),
        "pass": ok,
    });
    let records = outcome.records.iter().map(|r| serde_json::to_value(r).expect("plain record")).collect();
    Ok((head, records, ok))
}

pub fn adjoint(exp: &Experiment, out: &mut dyn Write) -> Result<bool> {
    let c = &exp.config;
    let a = &c.adjoint;
    let window = lindyn_core::criteria::CompactWindow::interval(a.window, exp.grid.per_unit());
    let mut lines = Vec::new();
    for (kind, n, tol) in [
        (CriterionKind::AdjointSuper, c.horizon, c.tol),
        (CriterionKind::AdjointCesaro, c.slow_horizon, c.slow_tol),
    ] {
        let v = adjoint_criterion(kind, &exp.operator, &a.mu, &a.nu, &window, n, tol, &TrimPolicy::OFF)?;
        let mut line = summary(&v, &exp.operator_name);
        if kind == CriterionKind::AdjointSuper {
            if let Some(w) = v.witness.last() {
                let ap = measure_approximant(&exp.operator, &a.mu, &a.nu, w.n, &AtomTrim::default())?;
                let (e1, e2) = measure_errors(&exp.operator, &ap, &a.mu, &a.nu);
                line["approximant"] = json!({"n": w.n, "lambda": ap.lambda, "tv_error_source": e1, "tv_error_target": e2});
            }
        }
        lines.push(line);
    }
    for l in &lines {
        emit(out, l)?;
    }
    save(c.out.as_deref(), "adjoint.jsonl", &jsonl(&lines))?;
    Ok(true)
}

fn status_name(s: lindyn_core::criteria::Status) -> String {
    serde_json::to_value(s).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

/// Unknown ids are reported as `Err(id)` before anything runs.
pub fn resolve_ids(ids: &[String]) -> std::result::Result<Vec<&'static str>, String> {
    if ids.is_empty() || ids.iter().any(|i| i == "all") {
        return Ok(EXAMPLE_IDS.to_vec());
    }
    ids.iter()
        .map(|i| EXAMPLE_IDS.iter().copied().find(|e| e == i).ok_or_else(|| i.clone()))
        .collect()
}

pub fn examples(ids: &[&'static str], out_dir: Option<&Path>, out: &mut dyn Write) -> Result<bool> {
    let mut rows: Vec<Row> = Vec::new();
    for id in ids {
        let ex = lookup(id).expect("resolved id");
        rows.extend(run_example(&ex)?);
    }
    writeln!(out, "{:<8} {:<28} {:<28} {:<28} {:>10} result", "example", "check", "expected", "observed", "first_n")?;
    for r in &rows {
        writeln!(
            out,
            "{:<8} {:<28} {:<28} {:<28} {:>10} {}",
            r.id,
            r.check,
            status_name(r.expected),
            status_name(r.observed),
            r.first_hit.map_or("-".to_owned(), |n| n.to_string()),
            if r.pass { "PASS" } else { "FAIL" }
        )?;
    }
    let lines: Vec<Value> = rows.iter().map(|r| serde_json::to_value(r).expect("plain row")).collect();
    save(out_dir, "examples.jsonl", &jsonl(&lines))?;
    Ok(rows.iter().all(|r| r.pass))
}
