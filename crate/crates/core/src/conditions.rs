//! Integral embedding conditions: evaluation at a point s, sup over an
//! s-grid with a growth diagnostic, and the pointwise hypotheses.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::quad::{integrate, QuadOptions};
use crate::report::ConditionReport;
use crate::weight::Weight;
use crate::young::YoungFunction;

/// Relative-slope threshold below which a sweep is classified bounded.
pub const BOUNDED_SLOPE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TailOptions {
    /// Chunk width in ln t (ln 10: one decade of t).
    pub chunk: f64,
    /// Stop once two consecutive chunks fall below this fraction of the total.
    pub chunk_rel: f64,
    /// ... and the extrapolated tail falls below this fraction.
    pub tail_rel: f64,
    /// Chunk ratio at or above which the integrand counts as not decaying.
    pub stall_ratio: f64,
    /// Consecutive stalled chunks that establish divergence.
    pub stall_chunks: usize,
    /// Largest ln t integrated past the lower limit.
    pub max_span: f64,
    pub quad: QuadOptions,
}

impl Default for TailOptions {
    fn default() -> Self {
        Self {
            chunk: std::f64::consts::LN_10,
            chunk_rel: 1e-8,
            tail_rel: 1e-6,
            stall_ratio: 0.999,
            stall_chunks: 20,
            max_span: 2e4,
            quad: QuadOptions { abs_tol: 0.0, rel_tol: 1e-13, max_intervals: 200 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailIntegral {
    #[serde(with = "crate::report::float")]
    pub value: f64,
    #[serde(with = "crate::report::float")]
    pub tail_bound: f64,
    pub chunks: usize,
    pub diverged: bool,
    pub cap_reached: bool,
}

/// ∫_a^∞ g(L) dL for a positive integrand, chunk by chunk. The dropped
/// tail is estimated as c·ρ/(1−ρ) from the last chunk c and the last chunk
/// ratio ρ, which bounds the tail when chunk ratios do not increase.
pub fn tail_integral<G: Fn(f64) -> f64>(g: G, a: f64, opts: &TailOptions) -> TailIntegral {
    let mut total = 0.0;
    let mut prev = f64::NAN;
    let mut small_run = 0;
    let mut stalled = 0;
    let mut lo = a;
    let mut chunks = 0;
    let mut ratio = f64::NAN;
    let mut last = 0.0;
    while lo - a < opts.max_span {
        let hi = lo + opts.chunk;
        let mut q = opts.quad;
        q.abs_tol = 1e-15 * total;
        let c = integrate(&g, lo, hi, &q).value;
        chunks += 1;
        if !c.is_finite() || !(total + c).is_finite() {
            return TailIntegral { value: f64::INFINITY, tail_bound: f64::INFINITY, chunks, diverged: true, cap_reached: false };
        }
        total += c;
        if prev > 0.0 {
            ratio = c / prev;
            if ratio >= opts.stall_ratio {
                stalled += 1;
                if stalled >= opts.stall_chunks {
                    return TailIntegral { value: f64::INFINITY, tail_bound: f64::INFINITY, chunks, diverged: true, cap_reached: false };
                }
            } else {
                stalled = 0;
            }
        }
        small_run = if c < opts.chunk_rel * total { small_run + 1 } else { 0 };
        prev = c;
        last = c;
        lo = hi;
        if total == 0.0 && chunks >= 2 {
            return TailIntegral { value: 0.0, tail_bound: 0.0, chunks, diverged: false, cap_reached: false };
        }
        if small_run >= 2 && ratio < 1.0 {
            let tail = last * ratio / (1.0 - ratio);
            if tail < opts.tail_rel * total {
                return TailIntegral { value: total, tail_bound: tail, chunks, diverged: false, cap_reached: false };
            }
        }
    }
    let tail = if ratio < 1.0 { last * ratio / (1.0 - ratio) } else { f64::INFINITY };
    TailIntegral { value: total, tail_bound: tail, chunks, diverged: false, cap_reached: true }
}

/// ∫_a^b g over chunks of the same width as the tail integrator.
fn finite_integral<G: Fn(f64) -> f64>(g: G, a: f64, b: f64, opts: &TailOptions) -> f64 {
    let mut total = 0.0;
    let mut lo = a;
    while lo < b {
        let hi = (lo + opts.chunk).min(b);
        total += integrate(&g, lo, hi, &opts.quad).value;
        lo = hi;
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionEvaluation {
    pub s: f64,
    pub first_term: f64,
    #[serde(with = "crate::report::float")]
    pub second_term: f64,
    #[serde(with = "crate::report::float")]
    pub tail_bound: f64,
    #[serde(with = "crate::report::float")]
    pub total: f64,
    pub diverged: bool,
    pub cap_reached: bool,
}

impl ConditionEvaluation {
    fn new(s: f64, first: f64, second: TailIntegral) -> Self {
        Self {
            s,
            first_term: first,
            second_term: second.value,
            tail_bound: second.tail_bound,
            total: first + second.value,
            diverged: second.diverged,
            cap_reached: second.cap_reached,
        }
    }
}

fn check_s(s: f64) -> Result<f64> {
    if !(s >= 1.0) || !s.is_finite() {
        return Err(invalid(format!("s must be finite and at least 1, got {s}")));
    }
    Ok(s.ln())
}

/// s^{d−1}/Φ⁻¹(s^d) ∫₁^s Ψ(t)/t dt + ∫_s^∞ Ψ(t) s^{d−1} / (Φ⁻¹(t s^{d−1}) t) dt,
/// integrated in L = ln t.
pub fn kolyada_eval(phi: &YoungFunction, psi: &Weight, d: u32, s: f64, opts: &TailOptions) -> Result<ConditionEvaluation> {
    if d < 1 {
        return Err(invalid("dimension must be at least 1"));
    }
    let ls = check_s(s)?;
    let dm1 = (d - 1) as f64 * ls;
    let pre = dm1 - phi.ln_inverse(d as f64 * ls);
    let first = finite_integral(|l| (psi.ln_eval(l) + pre).exp(), 0.0, ls, opts);
    let second = tail_integral(|l| (psi.ln_eval(l) + dm1 - phi.ln_inverse(l + dm1)).exp(), ls, opts);
    Ok(ConditionEvaluation::new(s, first, second))
}

/// The two-dimensional condition written directly with Φ⁻¹(t²)/t²:
/// s/Φ⁻¹(s²) ∫₁^s Φ⁻¹(t²)/t² dt + ∫_s^∞ Φ⁻¹(t²) s / (t² Φ⁻¹(ts)) dt.
pub fn direct_condition_eval(phi: &YoungFunction, s: f64, opts: &TailOptions) -> Result<ConditionEvaluation> {
    let ls = check_s(s)?;
    let pre = ls - phi.ln_inverse(2.0 * ls);
    // dt = t dL
    let first = finite_integral(|l| (phi.ln_inverse(2.0 * l) - 2.0 * l + l + pre).exp(), 0.0, ls, opts);
    let second = tail_integral(|l| (phi.ln_inverse(2.0 * l) + ls - 2.0 * l - phi.ln_inverse(l + ls) + l).exp(), ls, opts);
    Ok(ConditionEvaluation::new(s, first, second))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupResult {
    #[serde(with = "crate::report::float")]
    pub sup: f64,
    pub witness: f64,
    pub evaluations: Vec<ConditionEvaluation>,
    /// Least-squares slope of total against ln s over the top decade.
    pub slope: f64,
    /// slope divided by the mean total over the top decade.
    pub relative_slope: f64,
    pub bounded: bool,
}

fn summarize(evaluations: Vec<ConditionEvaluation>) -> SupResult {
    let mut sup = f64::NEG_INFINITY;
    let mut witness = f64::NAN;
    for e in &evaluations {
        if e.total > sup || e.total.is_nan() {
            sup = e.total;
            witness = e.s;
        }
    }
    let s_max = evaluations.iter().map(|e| e.s).fold(f64::NEG_INFINITY, f64::max);
    let top: Vec<(f64, f64)> =
        evaluations.iter().filter(|e| e.s >= s_max / 10.0 * (1.0 - 1e-12)).map(|e| (e.s.ln(), e.total)).collect();
    let (slope, mean) = least_squares_slope(&top);
    let relative_slope = if mean > 0.0 { slope / mean } else { 0.0 };
    let finite = evaluations.iter().all(|e| e.total.is_finite() && !e.diverged);
    SupResult { sup, witness, evaluations, slope, relative_slope, bounded: finite && relative_slope < BOUNDED_SLOPE }
}

/// (slope, mean of y); slope 0 for fewer than two distinct x.
fn least_squares_slope(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    if pts.is_empty() {
        return (0.0, 0.0);
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        (0.0, my)
    } else {
        (sxy / sxx, my)
    }
}

fn check_grid(s_grid: &[f64]) -> Result<()> {
    if s_grid.is_empty() {
        return Err(crate::error::Error::Empty("s grid"));
    }
    Ok(())
}

/// Sup of the condition over an s-grid; bounded iff every evaluation is
/// finite and the relative slope over the top decade is below 0.01.
pub fn kolyada_sup(phi: &YoungFunction, psi: &Weight, d: u32, s_grid: &[f64], opts: &TailOptions) -> Result<SupResult> {
    check_grid(s_grid)?;
    let evals: Result<Vec<_>> = s_grid.par_iter().map(|&s| kolyada_eval(phi, psi, d, s, opts)).collect();
    Ok(summarize(evals?))
}

pub fn theorem2_condition1(phi: &YoungFunction, s_grid: &[f64], opts: &TailOptions) -> Result<SupResult> {
    check_grid(s_grid)?;
    let evals: Result<Vec<_>> = s_grid.par_iter().map(|&s| direct_condition_eval(phi, s, opts)).collect();
    Ok(summarize(evals?))
}

/// 1/t ≤ Ψ(t)/Φ⁻¹(t²); margin t Ψ(t)/Φ⁻¹(t²) − 1.
pub fn theorem8_hypothesis(phi: &YoungFunction, psi: &Weight, t_grid: &[f64]) -> ConditionReport {
    let tested: Vec<Vec<f64>> = t_grid.iter().map(|&t| vec![t]).collect();
    let margins: Vec<f64> = t_grid
        .iter()
        .map(|&t| {
            let lt = t.ln();
            (lt + psi.ln_eval(lt) - phi.ln_inverse(2.0 * lt)).exp() - 1.0
        })
        .collect();
    ConditionReport::from_margins("weight-lower-bound", tested, &margins, 1e-12)
}

/// Pointwise sufficient condition for L_{d/(d−1)} ⊂ L_Φ: Φ(t) ≤ a t^{d/(d−1)} + b.
/// Informative only; margin (a t^{d/(d−1)} + b)/Φ(t) − 1.
pub fn embedding_hypothesis(phi: &YoungFunction, d: u32, a: f64, b: f64, grid: &[f64]) -> Result<ConditionReport> {
    if d < 2 {
        return Err(invalid("the embedding hypothesis needs d ≥ 2"));
    }
    let q = d as f64 / (d as f64 - 1.0);
    let tested: Vec<Vec<f64>> = grid.iter().map(|&t| vec![t]).collect();
    let margins: Vec<f64> = grid.iter().map(|&t| (a * t.powf(q) + b) / phi.eval(t) - 1.0).collect();
    Ok(ConditionReport::from_margins("embedding-pointwise", tested, &margins, 1e-12))
}
