//! Extrapolation of ℓ_p bounds that blow up at an endpoint: bucket
//! decomposition, endpoint-weighted integrals with a convergence classifier,
//! the sequence-space chain, and the Sobolev embedding profile.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::report::{Inequality, VerificationReport};
use crate::special::zeta_1p;
use crate::young::{YoungFunction, YoungSpec};

/// Decay ratio of successive refinement decades below which an endpoint
/// integral counts as convergent (its reciprocal marks divergence).
pub const DECAY_RATIO: f64 = 0.95;
const MAX_DECADES: usize = 250;

/// A bound p ↦ f(p) on (q, q + ε), evaluated through the offset x = p − q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ProfileFn {
    Constant { value: f64 },
    /// scale · x^exponent.
    EndpointPower { scale: f64, exponent: f64 },
    /// c^p ζ(p); the ℓ_p norm to the p of (c/k)_k. Needs q = 1.
    ScaledZeta { c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundProfile {
    pub q: f64,
    pub eps: f64,
    pub f: ProfileFn,
    /// Known blow-up rate β: f(p)(p − q)^β stays bounded near q.
    pub endpoint_exponent: Option<f64>,
}

impl BoundProfile {
    pub fn new(q: f64, eps: f64, f: ProfileFn, endpoint_exponent: Option<f64>) -> Result<Self> {
        if !(q >= 1.0 && q.is_finite()) {
            return Err(invalid(format!("left endpoint must be at least 1, got {q}")));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(invalid(format!("interval length must be positive, got {eps}")));
        }
        if matches!(f, ProfileFn::ScaledZeta { .. }) && q != 1.0 {
            return Err(invalid("the ζ profile is anchored at q = 1"));
        }
        Ok(Self { q, eps, f, endpoint_exponent })
    }

    /// f(q + x).
    pub fn eval_offset(&self, x: f64) -> f64 {
        match self.f {
            ProfileFn::Constant { value } => value,
            ProfileFn::EndpointPower { scale, exponent } => scale * x.powf(exponent),
            ProfileFn::ScaledZeta { c } => c.powf(self.q + x) * zeta_1p(x),
        }
    }

    pub fn eval(&self, p: f64) -> f64 {
        self.eval_offset(p - self.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convergence {
    Convergent,
    Divergent,
    /// Decay ratio within [0.95, 1/0.95]: too close to the borderline to call.
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointIntegral {
    #[serde(with = "crate::report::float")]
    pub value: f64,
    #[serde(with = "crate::report::float")]
    pub tail_estimate: f64,
    pub decades: usize,
    #[serde(with = "crate::report::float")]
    pub last_ratio: f64,
    pub class: Convergence,
}

fn classify(ratio: f64) -> Convergence {
    if ratio < DECAY_RATIO {
        Convergence::Convergent
    } else if ratio > 1.0 / DECAY_RATIO {
        Convergence::Divergent
    } else {
        Convergence::Indeterminate
    }
}

/// ∫₀^ε g(x) x^α dx for α > −1, refined decade by decade toward x = 0.
/// On each decade [a, b] the substitution u = x^{α+1} turns the weight into
/// du/(α+1).
pub fn endpoint_integral<G: Fn(f64) -> f64>(g: G, eps: f64, alpha: f64) -> Result<EndpointIntegral> {
    if !(alpha > -1.0) {
        return Err(invalid(format!("weight exponent must exceed −1, got {alpha}")));
    }
    let a1 = alpha + 1.0;
    let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-13, max_intervals: 200 };
    let mut total = 0.0;
    let mut prev = f64::NAN;
    let mut ratio = f64::NAN;
    let mut below = 0;
    let mut above = 0;
    let mut b = eps;
    let mut decades = 0;
    let mut last = 0.0;
    while decades < MAX_DECADES {
        let a = b / 10.0;
        let (ua, ub) = (a.powf(a1), b.powf(a1));
        let c = integrate(|u: f64| g(u.powf(1.0 / a1)), ua, ub, &opts).value / a1;
        decades += 1;
        if !c.is_finite() || !(total + c).is_finite() {
            return Ok(EndpointIntegral {
                value: f64::INFINITY,
                tail_estimate: f64::INFINITY,
                decades,
                last_ratio: f64::INFINITY,
                class: Convergence::Divergent,
            });
        }
        total += c;
        if prev == 0.0 && c == 0.0 {
            return Ok(EndpointIntegral { value: total, tail_estimate: 0.0, decades, last_ratio: 0.0, class: Convergence::Convergent });
        }
        if prev.is_finite() && prev != 0.0 {
            ratio = c / prev;
            below = if ratio < DECAY_RATIO { below + 1 } else { 0 };
            above = if ratio > 1.0 / DECAY_RATIO { above + 1 } else { 0 };
        }
        prev = c;
        last = c;
        b = a;
        if below >= 3 && c.abs() < 1e-15 * total.abs() {
            break;
        }
        if above >= 5 {
            return Ok(EndpointIntegral {
                value: f64::INFINITY,
                tail_estimate: f64::INFINITY,
                decades,
                last_ratio: ratio,
                class: Convergence::Divergent,
            });
        }
    }
    let class = classify(ratio);
    let (value, tail) = match class {
        Convergence::Convergent => (total, last * ratio / (1.0 - ratio)),
        Convergence::Divergent => (f64::INFINITY, f64::INFINITY),
        Convergence::Indeterminate => (total, f64::INFINITY),
    };
    Ok(EndpointIntegral { value, tail_estimate: tail, decades, last_ratio: ratio, class })
}

/// ∫_q^{q+ε} f(p)(p − q)^α dp.
pub fn weighted_integral(profile: &BoundProfile, alpha: f64) -> Result<EndpointIntegral> {
    endpoint_integral(|x| profile.eval_offset(x), profile.eps, alpha)
}

/// Entries of a nonnegative sequence sorted into K_n = (1/n, 1/(n−1)], n ≥ 3,
/// after scaling so that the largest entry is below 1/2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketDecomposition {
    pub counts: BTreeMap<u64, usize>,
    pub normalization: f64,
    pub zeros: usize,
}

/// The bucket index n with v ∈ (1/n, 1/(n−1)].
pub fn bucket_index(v: f64) -> u64 {
    let mut n = ((1.0 / v).floor() as u64 + 1).max(2);
    while n > 2 && v > 1.0 / (n - 1) as f64 {
        n -= 1;
    }
    while v <= 1.0 / n as f64 {
        n += 1;
    }
    n
}

/// Scales x (only if needed) so that max x < 1/2 and buckets the entries.
pub fn bucket(x: &[f64]) -> Result<BucketDecomposition> {
    if x.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(invalid("bucket decomposition needs finite nonnegative entries"));
    }
    let max = x.iter().copied().fold(0.0, f64::max);
    let limit = 0.5 - 1e-12;
    let normalization = if max > limit { limit / max } else { 1.0 };
    let mut counts = BTreeMap::new();
    let mut zeros = 0;
    for &v in x {
        if v == 0.0 {
            zeros += 1;
            continue;
        }
        *counts.entry(bucket_index(v * normalization)).or_insert(0) += 1;
    }
    Ok(BucketDecomposition { counts, normalization, zeros })
}

impl BucketDecomposition {
    /// (Σ #K_n n^{−p}, Σ #K_n (n−1)^{−p}): bounds on ‖normalized x‖_p^p.
    pub fn power_sum_bounds(&self, p: f64) -> (f64, f64) {
        let lo = self.counts.iter().map(|(&n, &c)| c as f64 * (n as f64).powf(-p)).sum();
        let hi = self.counts.iter().map(|(&n, &c)| c as f64 * ((n - 1) as f64).powf(-p)).sum();
        (lo, hi)
    }
}

/// ∫₀^X e^{−s} s^α ds by quadrature in u = s^{α+1}.
pub fn lower_gamma_integral(alpha: f64, x: f64) -> f64 {
    let a1 = alpha + 1.0;
    let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-14, max_intervals: 500 };
    integrate(|u: f64| (-u.powf(1.0 / a1)).exp(), 0.0, x.powf(a1), &opts).value / a1
}

/// Φ(x) = x^q / |ln x|^{α+1} on (0, 1/2].
pub fn log_refined(x: f64, q: f64, alpha: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.powf(q) / x.ln().abs().powf(alpha + 1.0)
    }
}

fn hypothesis_grid(profile: &BoundProfile) -> Vec<f64> {
    let mut grid: Vec<f64> = (1..=50).map(|i| profile.q + profile.eps * i as f64 / 50.0).collect();
    grid.extend((1..=8).map(|j| profile.q + profile.eps * 10f64.powi(-j)));
    grid
}

/// The sequence-space extrapolation chain for a finite sequence x with
/// ‖x‖_p^p ≤ f(p) on (q, q + ε): after normalization,
/// γ-factor · Σ_n #K_n n^{−q} (ln n)^{−(α+1)} ≤ ∫ λ^p f(p) (p − q)^α dp.
pub fn lemma8_verify(x: &[f64], profile: &BoundProfile, alpha: f64) -> Result<VerificationReport> {
    if !(alpha > -1.0) {
        return Err(invalid(format!("weight exponent must exceed −1, got {alpha}")));
    }
    for p in hypothesis_grid(profile) {
        let lhs: f64 = x.iter().map(|v| v.abs().powf(p)).sum();
        let rhs = profile.eval(p);
        if lhs > rhs * (1.0 + 1e-12) {
            return Err(Error::HypothesisFailed { p, lhs, rhs });
        }
    }
    let buckets = bucket(&x.iter().map(|v| v.abs()).collect::<Vec<_>>())?;
    let lam = buckets.normalization;
    let q = profile.q;
    let gamma = lower_gamma_integral(alpha, profile.eps * std::f64::consts::LN_2);
    let bucket_sum: f64 = buckets
        .counts
        .iter()
        .map(|(&n, &c)| c as f64 * (n as f64).powf(-q) * (n as f64).ln().powf(-(alpha + 1.0)))
        .sum();
    let integral = endpoint_integral(|t| lam.powf(q + t) * profile.eval_offset(t), profile.eps, alpha)?;
    let modular: f64 = x.iter().map(|v| log_refined(v.abs() * lam, q, alpha)).sum();
    let mut rep = VerificationReport::new(
        "sequence-extrapolation",
        serde_json::json!({ "x_len": x.len(), "profile": profile, "alpha": alpha }),
        "relative 1e-9; endpoint classifier ratio 0.95",
    );
    rep.push(Inequality::new("gamma * bucket sum <= weighted integral", gamma * bucket_sum, integral.value, 1e-9));
    rep.quantity("gamma_factor", gamma);
    rep.quantity("bucket_sum", bucket_sum);
    rep.quantity("weighted_integral", integral.value);
    rep.quantity("integral_divergent", if integral.class == Convergence::Divergent { 1.0 } else { 0.0 });
    rep.quantity("normalization", lam);
    rep.quantity("modular", modular);
    Ok(rep)
}

/// Growth of the modular partial sums Σ_{k≤N} Φ(x_k), Φ(x) = x^q/|ln x|^{α+1},
/// for a decreasing sequence given by its terms k ↦ x_k (k ≥ 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    /// Fitted β in S(N) ≈ A Λ^β + B with Λ = |ln x_N|.
    pub exponent: f64,
    /// (N, S(N)) at the dyadic block ends.
    pub partial_sums: Vec<(u64, f64)>,
}

/// Fits β from dyadic blocks: the block sum over its Λ-width estimates
/// dS/dΛ ≈ Aβ Λ^{β−1}, and the slope of its logarithm against ln Λ is β − 1.
pub fn modular_growth<X: Fn(u64) -> f64>(x: X, q: f64, alpha: f64, first_block: u32, last_block: u32) -> Result<GrowthFit> {
    if last_block < first_block + 2 || last_block > 40 {
        return Err(invalid("need at least three dyadic blocks and at most 2^40 terms"));
    }
    let mut partial = Vec::new();
    let mut s = 0.0;
    let mut pts = Vec::new();
    let mut k = 1u64;
    for j in 0..=last_block {
        let end = 1u64 << (j + 1);
        let mut block = 0.0;
        while k < end {
            block += log_refined(x(k), q, alpha);
            k += 1;
        }
        s += block;
        partial.push((end - 1, s));
        if j >= first_block {
            let start = 1u64 << j;
            let (l0, l1) = (x(start).ln().abs(), x(end - 1).ln().abs());
            if l1 > l0 && block > 0.0 {
                pts.push((((l0 * l1).sqrt()).ln(), (block / (l1 - l0)).ln()));
            }
        }
    }
    if pts.len() < 2 {
        return Err(invalid("sequence does not decrease across the fitted blocks"));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(GrowthFit { exponent: sxy / sxx + 1.0, partial_sums: partial })
}

/// π_{v,1}(W^{k,p} → L_s) ≲ (v − p0)^{1−2/p} on (p0, 2), p0 = max{2d/(2k+d), p}.
pub fn sobolev_profile(d: u32, k: u32, p: f64) -> Result<BoundProfile> {
    let p0 = sobolev_p0(d, k, p)?;
    BoundProfile::new(p0, 2.0 - p0, ProfileFn::EndpointPower { scale: 1.0, exponent: 1.0 - 2.0 / p }, Some(2.0 / p - 1.0))
}

fn sobolev_p0(d: u32, k: u32, p: f64) -> Result<f64> {
    if d < 2 || k < 1 || k >= d {
        return Err(invalid(format!("need d ≥ 2 and 1 ≤ k ≤ d − 1, got d={d}, k={k}")));
    }
    if !(1.0..2.0).contains(&p) || p >= d as f64 / k as f64 {
        return Err(invalid(format!("need 1 ≤ p < 2 and p < d/k, got p={p}")));
    }
    let p0 = (2.0 * d as f64 / (2.0 * k as f64 + d as f64)).max(p);
    if p0 >= 2.0 {
        return Err(invalid("the profile interval (p0, 2) is empty"));
    }
    Ok(p0)
}

/// Target exponent of the Sobolev embedding: 1/s = 1/p − k/d.
pub fn sobolev_target(d: u32, k: u32, p: f64) -> Result<f64> {
    sobolev_p0(d, k, p)?;
    Ok(1.0 / (1.0 / p - k as f64 / d as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleGamma {
    pub p0: f64,
    pub gamma_min: f64,
    pub target: f64,
}

/// γ_min = p0(2/p − 1): the Sobolev embedding is (Φ,1)-summing for
/// Φ(x) = x^{p0}/|ln x|^γ with γ > γ_min.
pub fn admissible_gamma(d: u32, k: u32, p: f64) -> Result<AdmissibleGamma> {
    let p0 = sobolev_p0(d, k, p)?;
    Ok(AdmissibleGamma { p0, gamma_min: p0 * (2.0 / p - 1.0), target: sobolev_target(d, k, p)? })
}

/// ∫_{v1}^{v2} π(v)^v (v − v1)^α dv.
pub fn summing_integral(profile: &BoundProfile, alpha: f64) -> Result<EndpointIntegral> {
    let q = profile.q;
    endpoint_integral(|x| profile.eval_offset(x).powf(q + x), profile.eps, alpha)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummingCriterion {
    pub integral: EndpointIntegral,
    /// x^{v1}/|ln x|^{α+1} as a Young-function config.
    pub target: YoungSpec,
}

pub fn theorem9_criterion(profile: &BoundProfile, alpha: f64) -> Result<SummingCriterion> {
    let integral = summing_integral(profile, alpha)?;
    let target = YoungFunction::logpower(profile.q, alpha + 1.0)?.spec().clone();
    Ok(SummingCriterion { integral, target })
}

/// Weight exponent where the classifier of the Theorem-9 integral switches
/// from divergent to convergent, by bisection on [lo, hi].
pub fn numeric_transition(profile: &BoundProfile, lo: f64, hi: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    if summing_integral(profile, lo)?.class != Convergence::Divergent
        || summing_integral(profile, hi)?.class != Convergence::Convergent
    {
        return Err(Error::NoBracket(format!("classifier does not switch on [{lo}, {hi}]")));
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        match summing_integral(profile, mid)?.class {
            Convergence::Convergent => hi = mid,
            Convergence::Divergent => lo = mid,
            Convergence::Indeterminate => return Ok(mid),
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(f: ProfileFn) -> BoundProfile {
        BoundProfile::new(1.0, 1.0, f, None).unwrap()
    }

    #[test]
    fn closed_form_integrals() {
        let r = weighted_integral(&unit(ProfileFn::Constant { value: 1.0 }), -0.5).unwrap();
        assert_eq!(r.class, Convergence::Convergent);
        assert!((r.value - 2.0).abs() < 1e-12, "{}", r.value);
        let r = weighted_integral(&unit(ProfileFn::EndpointPower { scale: 1.0, exponent: -1.0 }), 0.5).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        assert!(weighted_integral(&unit(ProfileFn::Constant { value: 1.0 }), -1.0).is_err());
    }

    #[test]
    fn zeta_integral_against_midpoint_rule() {
        let prof = unit(ProfileFn::ScaledZeta { c: 1.0 });
        let got = weighted_integral(&prof, 0.5).unwrap();
        // ∫₀¹ ζ(1+x) x^{1/2} dx = ∫₀¹ (ζ(1+x) − 1/x) x^{1/2} dx + 2, the first part by midpoints
        let n = 2000;
        let h = 1.0 / n as f64;
        let smooth: f64 = (0..n)
            .map(|i| {
                let x = (i as f64 + 0.5) * h;
                let m = 2000.0f64;
                let zeta: f64 = (1..2000).map(|k| (k as f64).powf(-1.0 - x)).sum::<f64>()
                    + m.powf(-x) / x
                    + 0.5 * m.powf(-1.0 - x);
                (zeta - 1.0 / x) * x.sqrt() * h
            })
            .sum();
        let oracle = smooth + 2.0;
        assert!((got.value - oracle).abs() < 1e-4, "{} vs {oracle}", got.value);
        let neg = weighted_integral(&prof, -0.5).unwrap();
        assert_eq!(neg.class, Convergence::Divergent);
    }

    #[test]
    fn bucket_convention() {
        let b = bucket(&[1.0 / 3.0, 1.0 / 5.0]).unwrap();
        assert_eq!(b.normalization, 1.0);
        assert_eq!(b.counts, BTreeMap::from([(4, 1), (6, 1)]));
        let b = bucket(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(b.counts, BTreeMap::from([(3, 3)]));
        assert!(bucket(&[-1.0]).is_err());
        let b = bucket(&[0.0, 0.1]).unwrap();
        assert_eq!(b.zeros, 1);
        assert_eq!(b.counts, BTreeMap::from([(11, 1)]));
    }

    #[test]
    fn gamma_factor_series() {
        // γ(a, x) = x^a e^{−x} Σ x^n / (a(a+1)…(a+n))
        for (alpha, x) in [(0.5, 0.3), (-0.5, 0.7), (2.0, 1.5)] {
            let a: f64 = alpha + 1.0;
            let mut term = 1.0 / a;
            let mut sum = term;
            for n in 1..80 {
                term *= x / (a + n as f64);
                sum += term;
            }
            let want = x.powf(a) * (-x).exp() * sum;
            assert!((lower_gamma_integral(alpha, x) - want).abs() < 1e-13 * want);
        }
    }

    #[test]
    fn geometric_chain() {
        let x: Vec<f64> = (1..=60).map(|k| 0.5f64.powi(k)).collect();
        let rep = lemma8_verify(&x, &unit(ProfileFn::Constant { value: 1.0 }), 0.5).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.quantities["integral_divergent"], 0.0);
        // Σ 2^{−k}/(k ln 2)^{1.5}, first term dominant
        let m = rep.quantities["modular"];
        assert!(m > 0.5 / 2f64.ln().powf(1.5) * 0.99 && m < 2.0);
    }

    #[test]
    fn hypothesis_failure_has_witness() {
        let x = [0.9, 0.9];
        match lemma8_verify(&x, &unit(ProfileFn::Constant { value: 1.0 }), 0.5) {
            Err(Error::HypothesisFailed { lhs, rhs, .. }) => assert!(lhs > rhs),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn harmonic_growth() {
        let c = 0.4;
        let fit = modular_growth(|k| c / k as f64, 1.0, -0.5, 4, 22).unwrap();
        assert!((fit.exponent - 0.5).abs() < 0.05, "{}", fit.exponent);
        let fit = modular_growth(|k| c / k as f64, 1.0, 0.5, 4, 22).unwrap();
        assert!((fit.exponent + 0.5).abs() < 0.05, "{}", fit.exponent);
    }

    #[test]
    fn sobolev_substitutions() {
        let g = admissible_gamma(2, 1, 1.0).unwrap();
        assert_eq!((g.p0, g.gamma_min, g.target), (1.0, 1.0, 2.0));
        let g = admissible_gamma(3, 1, 1.0).unwrap();
        assert!((g.p0 - 1.2).abs() < 1e-15 && (g.gamma_min - 1.2).abs() < 1e-15);
        let prof = sobolev_profile(2, 1, 1.0).unwrap();
        assert_eq!(prof.endpoint_exponent, Some(1.0));
        assert!(sobolev_profile(2, 2, 1.0).is_err());
        assert!(sobolev_profile(3, 1, 2.0).is_err());
    }

    #[test]
    fn summing_classifier() {
        let prof = sobolev_profile(2, 1, 1.0).unwrap();
        // transition at α = γ_min − 1 = 0
        assert_eq!(summing_integral(&prof, 0.2).unwrap().class, Convergence::Convergent);
        assert_eq!(summing_integral(&prof, -0.2).unwrap().class, Convergence::Divergent);
        assert_eq!(summing_integral(&prof, 0.0).unwrap().class, Convergence::Indeterminate);
        let t = numeric_transition(&prof, -0.5, 0.5).unwrap();
        assert!(t.abs() < 0.05, "{t}");
        let k = theorem9_criterion(&BoundProfile::new(1.0, 1.0, ProfileFn::Constant { value: 1.0 }, None).unwrap(), 0.0)
            .unwrap();
        assert!((k.integral.value - 1.0).abs() < 1e-12);
        let k = theorem9_criterion(&prof, 0.5).unwrap();
        assert!(k.integral.value.is_finite());
        assert_eq!(k.target, YoungSpec::Logpower { p0: 1.0, gamma: 1.5 });
        assert!(theorem9_criterion(&prof, -1.0).is_err());
    }
}
