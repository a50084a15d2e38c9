//! One function per subcommand. Building inputs from the config is a usage
//! error; a computation that fails at run time marks its case as failed.

use std::path::Path;
use std::time::Instant;

use orlicz::auxlemmas::{lemma2_check, lemma7_transfer, random_transfer_pairs};
use orlicz::besov::{verify_comparison, verify_lemma1};
use orlicz::conditions::{kolyada_sup, theorem2_condition1};
use orlicz::extrapolation::{admissible_gamma, sobolev_profile, theorem9_criterion};
use orlicz::luxemburg::{norm_seq, norm_trig};
use orlicz::sampling::{orlicz_batch, orlicz_preconditions};
use orlicz::young::log_grid;
use orlicz::{
    BallPair, BesovParams, BoundProfile, CoefficientLaw, Convergence, NormOptions, SamplingSummary, TrigPoly,
    VerificationReport, Weight, YoungFunction, YoungSpec,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{
    BallCase, BesovCase, ConditionCase, Expect, ExtrapolateCase, LuxemburgCase, RunConfig, TransferCase,
};
use crate::output::{num, Observed, Outcome, Record, Table};
use crate::UsageError;

fn usage<E: std::fmt::Display>(id: &str) -> impl FnOnce(E) -> UsageError + '_ {
    move |e| UsageError(format!("case {id}: {e}"))
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed().as_secs_f64() * 1e3)
}

fn young(id: &str, spec: &YoungSpec) -> Result<YoungFunction, UsageError> {
    YoungFunction::from_spec(spec).map_err(usage(id))
}

fn error_record(id: &str, expect: Expect, err: orlicz::Error, wall: f64) -> Record {
    Record::new(id, expect, Observed::Fail, json!({ "error": err.to_string() }), Some(wall))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn nonempty<T>(cases: &[T], section: &str) -> Result<(), UsageError> {
    if cases.is_empty() {
        Err(UsageError(format!("config has no [[{section}]] cases")))
    } else {
        Ok(())
    }
}

/// Supermultiplicativity constant that is known to work for the built-in
/// families: C = r for the three-branch example, 1 for powers.
pub fn default_constant(phi: &YoungFunction) -> Option<f64> {
    match phi.spec() {
        YoungSpec::Section7 { .. } => phi.section7_constants().map(|c| c.r),
        YoungSpec::Power { .. } => Some(1.0),
        _ => None,
    }
}

/// Generic plot table with one row per inequality of each report.
fn inequality_table(items: &[(String, &VerificationReport)]) -> Table {
    let mut t = Table::new(&["id", "check", "inequality", "lhs", "rhs", "rel_tol", "holds"]);
    for (id, rep) in items {
        for ineq in &rep.inequalities {
            t.push(vec![
                id.clone(),
                rep.check.clone(),
                ineq.name.clone(),
                num(ineq.lhs),
                num(ineq.rhs),
                num(ineq.rel_tol),
                ineq.holds().to_string(),
            ]);
        }
    }
    t
}

pub fn luxemburg(cfg: &RunConfig) -> Result<Outcome, UsageError> {
    nonempty(&cfg.luxemburg, "luxemburg")?;
    let prepared: Vec<(&LuxemburgCase, YoungFunction, Option<TrigPoly>)> = cfg
        .luxemburg
        .iter()
        .map(|c| {
            let phi = young(&c.id, &c.phi)?;
            let poly = c.polynomial.as_ref().map(TrigPoly::from_json).transpose().map_err(usage(&c.id))?;
            Ok((c, phi, poly))
        })
        .collect::<Result<_, UsageError>>()?;
    let results: Vec<_> = prepared
        .par_iter()
        .map(|(c, phi, poly)| {
            let (est, wall) = timed(|| match (poly, &c.values) {
                (Some(f), _) => norm_trig(phi, f, &c.norm),
                (None, Some(x)) => {
                    orlicz::NormEstimate { value: norm_seq(phi, x), grid: 0, last_change: 0.0, converged: true }
                }
                (None, None) => unreachable!("validated"),
            });
            let mut rep = VerificationReport::new("luxemburg-norm", to_value(c), "relative tolerance from the case");
            if let Some(want) = c.expected {
                rep.push(orlicz::Inequality::new("|value - expected|", (est.value - want).abs(), c.rel_tol * want.abs(), 0.0));
            }
            rep.quantity("value", est.value);
            rep.quantity("grid", est.grid as f64);
            rep.quantity("last_change", est.last_change);
            rep.quantity("converged", if est.converged { 1.0 } else { 0.0 });
            (rep, est, wall)
        })
        .collect();
    let mut table = Table::new(&["id", "kind", "value", "expected", "grid", "converged", "passed"]);
    let mut records = Vec::new();
    for ((c, _, poly), (rep, est, wall)) in prepared.iter().zip(results) {
        let observed = Observed::from_pass(rep.passed && est.value.is_finite());
        let rec = Record::new(&c.id, c.expect, observed, to_value(&rep), Some(wall));
        table.push(vec![
            c.id.clone(),
            if poly.is_some() { "polynomial" } else { "sequence" }.into(),
            num(est.value),
            c.expected.map(num).unwrap_or_default(),
            est.grid.to_string(),
            est.converged.to_string(),
            rec.passed.to_string(),
        ]);
        records.push(rec);
    }
    Ok(Outcome { records, table, summary: vec![], extra_files: vec![] })
}

pub fn besov(cfg: &RunConfig) -> Result<Outcome, UsageError> {
    nonempty(&cfg.besov, "besov")?;
    let prepared: Vec<(&BesovCase, BesovParams, TrigPoly)> = cfg
        .besov
        .iter()
        .map(|c| {
            let phi = young(&c.id, &c.phi)?;
            let psi = Weight::from_spec(c.psi.clone()).map_err(usage(&c.id))?;
            let params = BesovParams::new(phi, psi, c.n_max).map_err(usage(&c.id))?;
            let f = TrigPoly::from_json(&c.polynomial).map_err(usage(&c.id))?;
            Ok((c, params, f))
        })
        .collect::<Result<_, UsageError>>()?;
    let results: Vec<_> = prepared
        .par_iter()
        .map(|(c, params, f)| {
            timed(|| {
                let cmp = verify_comparison(f, params)?;
                let sandwich = c.sandwich.then(|| verify_lemma1(f, params));
                Ok::<_, orlicz::Error>((cmp, sandwich))
            })
        })
        .collect();
    let mut table = Table::new(&["id", "classical", "tilde", "ratio", "max_level_ratio", "passed"]);
    let mut records = Vec::new();
    for ((c, _, _), (res, wall)) in prepared.iter().zip(results) {
        let rec = match res {
            Ok((cmp, sandwich)) => {
                let passed = cmp.passed && sandwich.as_ref().is_none_or(|s| s.passed);
                let q = &cmp.quantities;
                let report = json!({ "comparison": cmp, "sandwich": sandwich });
                table.push(vec![
                    c.id.clone(),
                    num(q["classical"]),
                    num(q["tilde"]),
                    num(q["ratio"]),
                    num(q["max_level_ratio"]),
                    (Observed::from_pass(passed).meets(c.expect)).to_string(),
                ]);
                Record::new(&c.id, c.expect, Observed::from_pass(passed), report, Some(wall))
            }
            Err(e) => error_record(&c.id, c.expect, e, wall),
        };
        records.push(rec);
    }
    Ok(Outcome { records, table, summary: vec![], extra_files: vec![] })
}

fn s_grid(c: &ConditionCase) -> Result<Vec<f64>, UsageError> {
    if let Some(g) = &c.s_grid {
        if g.is_empty() || g.iter().any(|&s| !(s >= 1.0 && s.is_finite())) {
            return Err(UsageError(format!("case {}: s_grid needs finite values >= 1", c.id)));
        }
        return Ok(g.clone());
    }
    if !(c.s_max > 1.0) || c.points_per_decade == 0 {
        return Err(UsageError(format!("case {}: need s_max > 1 and points_per_decade >= 1", c.id)));
    }
    let n = (c.s_max.log10() * c.points_per_decade as f64).ceil() as usize + 1;
    Ok(log_grid(1.0, c.s_max, n.max(2)))
}

pub fn conditions(cfg: &RunConfig) -> Result<Outcome, UsageError> {
    nonempty(&cfg.conditions, "conditions")?;
    let prepared: Vec<(&ConditionCase, YoungFunction, Option<Weight>, Vec<f64>)> = cfg
        .conditions
        .iter()
        .map(|c| {
            let phi = young(&c.id, &c.phi)?;
            let psi = c.psi.clone().map(Weight::from_spec).transpose().map_err(usage(&c.id))?;
            Ok((c, phi, psi, s_grid(c)?))
        })
        .collect::<Result<_, UsageError>>()?;
    let results: Vec<_> = prepared
        .par_iter()
        .map(|(c, phi, psi, grid)| {
            timed(|| match psi {
                Some(psi) => kolyada_sup(phi, psi, c.d, grid, &c.tail),
                None => theorem2_condition1(phi, grid, &c.tail),
            })
        })
        .collect();
    let mut table =
        Table::new(&["id", "s", "first_term", "second_term", "tail_bound", "total", "diverged", "cap_reached"]);
    let mut records = Vec::new();
    let mut evaluations = Vec::new();
    let mut classes = serde_json::Map::new();
    for ((c, _, psi, _), (res, wall)) in prepared.iter().zip(results) {
        let rec = match res {
            Ok(sup) => {
                for e in &sup.evaluations {
                    table.push(vec![
                        c.id.clone(),
                        num(e.s),
                        num(e.first_term),
                        num(e.second_term),
                        num(e.tail_bound),
                        num(e.total),
                        e.diverged.to_string(),
                        e.cap_reached.to_string(),
                    ]);
                    let mut v = to_value(e);
                    v["case"] = json!(c.id);
                    evaluations.push(v);
                }
                let observed = if sup.bounded { Observed::Pass } else { Observed::Divergent };
                classes.insert(c.id.clone(), json!(if sup.bounded { "bounded" } else { "divergent" }));
                let route = if psi.is_some() { "weighted" } else { "direct" };
                let report = json!({ "inputs": c, "route": route, "result": sup });
                Record::new(&c.id, c.expect, observed, report, Some(wall))
            }
            Err(e) => error_record(&c.id, c.expect, e, wall),
        };
        records.push(rec);
    }
    Ok(Outcome {
        records,
        table,
        summary: vec![("classification", Value::Object(classes))],
        extra_files: vec![("evaluations", Value::Array(evaluations))],
    })
}

pub struct SamplingRequest {
    pub phi: YoungSpec,
    pub constant: Option<f64>,
    pub level: u32,
    pub trials: u64,
    pub seed: u64,
    pub law: CoefficientLaw,
    pub norm: NormOptions,
}

pub fn sampling(req: &SamplingRequest) -> Result<Outcome, UsageError> {
    let phi = young("verify-sampling", &req.phi)?;
    let c = match req.constant.or_else(|| default_constant(&phi)) {
        Some(c) => c,
        None => return Err(UsageError("no default constant for this Young function; pass --constant".into())),
    };
    orlicz::trig::Frame::new(req.level).map_err(|e| UsageError(format!("--level: {e}")))?;
    let (rows, wall) = timed(|| orlicz_batch(req.level, req.trials, &phi, c, req.law, req.seed, &req.norm));
    let rows = rows.map_err(|e| UsageError(e.to_string()))?;
    let (sup, inv) = orlicz_preconditions(&phi, c).map_err(|e| UsageError(e.to_string()))?;
    let mut table = Table::new(&[
        "check", "level", "seed", "trial", "candidate", "lhs", "rhs", "ratio", "bound", "passed", "supported",
    ]);
    let per_row = wall / rows.len().max(1) as f64;
    let mut records = Vec::new();
    for r in &rows {
        table.push(vec![
            r.check.clone(),
            r.level.to_string(),
            r.seed.to_string(),
            r.trial.to_string(),
            r.candidate.clone(),
            num(r.lhs),
            num(r.rhs),
            num(r.ratio),
            num(r.bound),
            r.passed.to_string(),
            r.supported.to_string(),
        ]);
        let id = format!("trial-{}", r.trial);
        records.push(Record::new(&id, Expect::Pass, Observed::from_pass(r.passed), to_value(r), Some(per_row)));
    }
    let summary = SamplingSummary::from_rows(&rows);
    let inputs = json!({
        "phi": req.phi, "constant": c, "level": req.level, "trials": req.trials,
        "seed": req.seed, "law": req.law, "norm": req.norm,
    });
    Ok(Outcome {
        records,
        table,
        summary: vec![("inputs", inputs), ("sampling", to_value(&summary))],
        extra_files: vec![("preconditions", json!([sup, inv]))],
    })
}

pub fn lemmas(cfg: &RunConfig) -> Result<Outcome, UsageError> {
    if cfg.balls.is_empty() && cfg.transfer.is_empty() {
        return Err(UsageError("config has no [[balls]] or [[transfer]] cases".into()));
    }
    let balls: Vec<(&BallCase, BallPair)> = cfg
        .balls
        .iter()
        .map(|c| Ok((c, BallPair::new(c.d, c.r, c.alpha).map_err(usage(&c.id))?)))
        .collect::<Result<_, UsageError>>()?;
    let transfers: Vec<(&TransferCase, YoungFunction, f64)> = cfg
        .transfer
        .iter()
        .map(|c| {
            let phi = young(&c.id, &c.phi)?;
            let k = c
                .c
                .or_else(|| default_constant(&phi))
                .ok_or_else(|| UsageError(format!("case {}: no default constant, set c", c.id)))?;
            Ok((c, phi, k))
        })
        .collect::<Result<_, UsageError>>()?;
    let ball_results: Vec<_> = balls.par_iter().map(|(c, bp)| timed(|| lemma2_check(bp, c.method))).collect();
    let transfer_results: Vec<_> = transfers
        .par_iter()
        .map(|(c, phi, k)| timed(|| lemma7_transfer(phi, *k, &random_transfer_pairs(phi, c.pairs, c.seed))))
        .collect();
    let mut records = Vec::new();
    let mut reports = Vec::new();
    let cases = balls
        .iter()
        .map(|(c, _)| (c.id.as_str(), c.expect))
        .chain(transfers.iter().map(|(c, _, _)| (c.id.as_str(), c.expect)));
    for ((id, expect), (res, wall)) in cases.zip(ball_results.into_iter().chain(transfer_results)) {
        match res {
            Ok(rep) => {
                records.push(Record::new(id, expect, Observed::from_pass(rep.passed), to_value(&rep), Some(wall)));
                reports.push((id.to_string(), rep));
            }
            Err(e) => records.push(error_record(id, expect, e, wall)),
        }
    }
    let refs: Vec<(String, &VerificationReport)> = reports.iter().map(|(id, r)| (id.clone(), r)).collect();
    Ok(Outcome { records, table: inequality_table(&refs), summary: vec![], extra_files: vec![] })
}

pub fn extrapolate(cases: &[ExtrapolateCase]) -> Result<Outcome, UsageError> {
    nonempty(cases, "extrapolate")?;
    let prepared: Vec<(&ExtrapolateCase, BoundProfile, Value)> = cases
        .iter()
        .map(|c| {
            if let (Some(d), Some(k), Some(p)) = (c.d, c.k, c.p) {
                let ag = admissible_gamma(d, k, p).map_err(usage(&c.id))?;
                let profile = sobolev_profile(d, k, p).map_err(usage(&c.id))?;
                Ok((c, profile, json!({ "p0": ag.p0, "gamma_min": ag.gamma_min, "target": ag.target })))
            } else {
                let pc = c.profile.as_ref().expect("validated");
                let profile = BoundProfile::new(pc.q, pc.eps, pc.f, pc.endpoint_exponent).map_err(usage(&c.id))?;
                Ok((c, profile, json!({})))
            }
        })
        .collect::<Result<_, UsageError>>()?;
    let results: Vec<_> =
        prepared.par_iter().map(|(c, profile, _)| timed(|| theorem9_criterion(profile, c.alpha))).collect();
    let mut table = Table::new(&["id", "d", "k", "p", "alpha", "p0", "gamma_min", "integral", "class", "passed"]);
    let mut records = Vec::new();
    let mut outputs = Vec::new();
    for ((c, profile, gamma), (res, wall)) in prepared.iter().zip(results) {
        let rec = match res {
            Ok(crit) => {
                let observed = match crit.integral.class {
                    Convergence::Convergent => Observed::Pass,
                    Convergence::Divergent => Observed::Divergent,
                    Convergence::Indeterminate => Observed::Indeterminate,
                };
                let mut out = json!({
                    "id": c.id,
                    "inputs": c,
                    "profile": profile,
                    "integral": crit.integral,
                    "induced_phi": crit.target,
                });
                if let Value::Object(extra) = gamma {
                    for (k, v) in extra {
                        out[k] = v.clone();
                    }
                }
                let opt = |v: Option<String>| v.unwrap_or_default();
                let rec = Record::new(&c.id, c.expect, observed, out.clone(), Some(wall));
                table.push(vec![
                    c.id.clone(),
                    opt(c.d.map(|v| v.to_string())),
                    opt(c.k.map(|v| v.to_string())),
                    opt(c.p.map(num)),
                    num(c.alpha),
                    opt(gamma.get("p0").and_then(Value::as_f64).map(num)),
                    opt(gamma.get("gamma_min").and_then(Value::as_f64).map(num)),
                    num(crit.integral.value),
                    to_value(&crit.integral.class).as_str().unwrap_or_default().to_string(),
                    rec.passed.to_string(),
                ]);
                outputs.push(out);
                rec
            }
            Err(e) => error_record(&c.id, c.expect, e, wall),
        };
        records.push(rec);
    }
    Ok(Outcome { records, table, summary: vec![], extra_files: vec![("results", Value::Array(outputs))] })
}

/// Aggregates the summaries found in `dir` into `report.json` and `report.csv`.
pub fn report(dir: &Path) -> Result<bool, UsageError> {
    let entries = std::fs::read_dir(dir).map_err(|e| UsageError(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.ends_with(".summary.json")))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(UsageError(format!("no *.summary.json files in {}", dir.display())));
    }
    let mut summaries = Vec::new();
    let mut table = Table::new(&["subcommand", "cases", "passed", "failed", "all_passed"]);
    for p in &paths {
        let text = std::fs::read_to_string(p).map_err(|e| UsageError(format!("{}: {e}", p.display())))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| UsageError(format!("{}: {e}", p.display())))?;
        let field = |k: &str| v.get(k).map(|x| x.to_string()).unwrap_or_default();
        let name = v.get("subcommand").and_then(Value::as_str).unwrap_or_default().to_string();
        table.push(vec![name, field("cases"), field("passed"), field("failed"), field("all_passed")]);
        summaries.push(v);
    }
    let all = summaries.iter().all(|s| s.get("all_passed") == Some(&Value::Bool(true)));
    let out = json!({ "all_passed": all, "summaries": summaries });
    let path = dir.join("report.json");
    std::fs::write(&path, serde_json::to_string_pretty(&out).expect("json") + "\n")
        .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    crate::output::write_csv(&dir.join("report.csv"), &table).map_err(UsageError)?;
    Ok(all)
}
