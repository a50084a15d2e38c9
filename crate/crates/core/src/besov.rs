//! Integral moduli of continuity, Besov–Orlicz norms, the best
//! approximation quantity and the comparison checks between the norms.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::luxemburg::{norm_trig, NormOptions};
use crate::quad::gk21;
use crate::report::{Inequality, VerificationReport};
use crate::trig::{dyadic_piece, TrigPoly};
use crate::weight::Weight;
use crate::young::YoungFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusOptions {
    pub angles: usize,
    pub radii: usize,
    pub norm: NormOptions,
}

impl Default for ModulusOptions {
    fn default() -> Self {
        Self { angles: 64, radii: 8, norm: NormOptions { max_doublings: 0, ..NormOptions::default() } }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub phi: YoungFunction,
    pub psi: Weight,
    /// Last dyadic level of the classical sum.
    pub n_max: u32,
    pub modulus: ModulusOptions,
    pub norm: NormOptions,
}

impl BesovParams {
    pub fn new(phi: YoungFunction, psi: Weight, n_max: u32) -> Result<Self> {
        if n_max < 2 {
            return Err(invalid(format!("truncation level must be at least 2, got {n_max}")));
        }
        Ok(Self { phi, psi, n_max, modulus: ModulusOptions::default(), norm: NormOptions::default() })
    }
}

fn shift_norm(f: &TrigPoly, phi: &YoungFunction, opts: &NormOptions, hx: f64, hy: f64) -> f64 {
    norm_trig(phi, &f.difference(hx, hy), opts).value
}

/// ω_Φ(f, t) = sup_{|h| ≤ t} ‖f(· + h) − f‖_{L_Φ}, maximized over a polar
/// grid of shifts that includes the circle |h| = t, then refined locally
/// around the best grid point.
pub fn modulus(f: &TrigPoly, t: f64, phi: &YoungFunction, opts: &ModulusOptions) -> f64 {
    if f.is_zero() || t <= 0.0 {
        return 0.0;
    }
    let t = t.min(PI);
    let radii = opts.radii.max(1);
    let angles = opts.angles.max(4);
    let eval = |rho: f64, th: f64| -> f64 {
        if f.dim() == 1 {
            shift_norm(f, phi, &opts.norm, rho * th.cos().signum(), 0.0)
        } else {
            shift_norm(f, phi, &opts.norm, rho * th.cos(), rho * th.sin())
        }
    };
    // in 1-D the angle only selects the sign of the shift
    let angle_count = if f.dim() == 1 { 2 } else { angles };
    let dth = 2.0 * PI / angle_count as f64;
    let drho = t / radii as f64;
    let mut best = (0.0, t, 0.0);
    for j in 1..=radii {
        let rho = drho * j as f64;
        for a in 0..angle_count {
            let th = dth * a as f64;
            let v = eval(rho, th);
            if v > best.0 {
                best = (v, rho, th);
            }
        }
    }
    // local refinement: shrinking pattern search, radius capped at t
    let (mut v, mut rho, mut th) = best;
    let mut step_r = 0.5 * drho;
    let mut step_a = if f.dim() == 1 { 0.0 } else { 0.5 * dth };
    for _ in 0..30 {
        let mut improved = false;
        for (dr, da) in [(step_r, 0.0), (-step_r, 0.0), (0.0, step_a), (0.0, -step_a)] {
            if dr == 0.0 && da == 0.0 {
                continue;
            }
            let r2 = (rho + dr).min(t);
            if r2 <= 0.0 {
                continue;
            }
            let w = eval(r2, th + da);
            if w > v {
                v = w;
                rho = r2;
                th += da;
                improved = true;
            }
        }
        if !improved {
            step_r *= 0.5;
            step_a *= 0.5;
            if step_r < 1e-10 * t && step_a < 1e-10 {
                break;
            }
        }
    }
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesovValue {
    pub value: f64,
    pub lphi: f64,
    /// Level terms, index n.
    pub terms: Vec<f64>,
    /// Last term of the truncated sum; an estimate of the dropped tail.
    pub tail_estimate: f64,
}

/// ‖f‖_{L_Φ} + Σ_{n=0}^{N} Ψ(2ⁿ) ω_Φ(f, 2⁻ⁿ).
pub fn besov_norm_classical(f: &TrigPoly, params: &BesovParams) -> BesovValue {
    let lphi = norm_trig(&params.phi, f, &params.norm).value;
    let terms: Vec<f64> = (0..=params.n_max)
        .map(|n| {
            let t = 0.5f64.powi(n as i32);
            params.psi.eval(1.0 / t) * modulus(f, t, &params.phi, &params.modulus)
        })
        .collect();
    let tail_estimate = *terms.last().expect("n_max ≥ 2");
    BesovValue { value: lphi + terms.iter().sum::<f64>(), lphi, terms, tail_estimate }
}

/// Levels n where g_n * f can be nonzero: everything below the first n ≥ 4
/// with 2^{n−3} ≥ deg f (the hole of ĝ_n then covers the spectrum of f).
pub fn active_levels(f: &TrigPoly) -> u32 {
    let d = f.degree() as u64;
    let mut n = 4u32;
    while (1u64 << (n - 3)) < d {
        n += 1;
    }
    n
}

/// ‖f‖_{L_Φ} + Σ_n Ψ(2ⁿ) ‖g_n * f‖_{L_Φ}; the sum is finite for
/// polynomials, so no truncation error.
pub fn besov_norm_tilde(f: &TrigPoly, params: &BesovParams) -> Result<BesovValue> {
    if f.dim() != 2 {
        return Err(Error::DimensionMismatch(f.dim(), 2));
    }
    let lphi = norm_trig(&params.phi, f, &params.norm).value;
    let mut terms = Vec::new();
    for n in 0..active_levels(f) {
        let gf = dyadic_piece(f, n as i32)?;
        let v = if gf.is_zero() { 0.0 } else { norm_trig(&params.phi, &gf, &params.norm).value };
        terms.push(params.psi.eval((n as f64).exp2()) * v);
    }
    Ok(BesovValue { value: lphi + terms.iter().sum::<f64>(), lphi, terms, tail_estimate: 0.0 })
}

/// (‖f‖_{L_p}^q + Σ_n 2^{qns} ‖g_n * f‖_{L_p}^q)^{1/q}.
pub fn besov_tilde_spq(f: &TrigPoly, s: f64, p: f64, q: f64, norm: &NormOptions) -> Result<f64> {
    if f.dim() != 2 {
        return Err(Error::DimensionMismatch(f.dim(), 2));
    }
    if !(q > 0.0) {
        return Err(invalid(format!("q must be positive, got {q}")));
    }
    let phi = YoungFunction::power(p)?;
    let mut acc = norm_trig(&phi, f, norm).value.powf(q);
    for n in 0..active_levels(f) {
        let gf = dyadic_piece(f, n as i32)?;
        if !gf.is_zero() {
            acc += (q * n as f64 * s).exp2() * norm_trig(&phi, &gf, norm).value.powf(q);
        }
    }
    Ok(acc.powf(1.0 / q))
}

/// Smooth multipliers φ_m with φ̂_m(k,l) = η(k/m, l/m) exp(−(k²+l²)/m²).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MultiplierFamily;

impl MultiplierFamily {
    /// η₁(u) = exp(1 − 1/(1 − u²)) on (−1, 1), zero outside; η₁(0) = 1.
    pub fn bump(u: f64) -> f64 {
        if u.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - u * u)).exp()
        }
    }

    /// ψ̂(x, y) = η₁(x) η₁(y) exp(−(x² + y²)).
    pub fn psi_hat(x: f64, y: f64) -> f64 {
        Self::bump(x) * Self::bump(y) * (-(x * x + y * y)).exp()
    }

    pub fn coefficient(m: f64, k: i64, l: i64) -> f64 {
        Self::psi_hat(k as f64 / m, l as f64 / m)
    }

    /// φ_m as a polynomial; support inside (−m, m)².
    pub fn polynomial(m: f64) -> Result<TrigPoly> {
        if !(m > 0.0) {
            return Err(invalid(format!("multiplier scale must be positive, got {m}")));
        }
        let r = m.ceil() as i64;
        let mut items = Vec::new();
        for k in -r..=r {
            for l in -r..=r {
                let c = Self::coefficient(m, k, l);
                if c != 0.0 {
                    items.push(((k, l), Complex64::new(c, 0.0)));
                }
            }
        }
        TrigPoly::from_coefficients(2, items)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestApprox {
    /// ‖f − φ_m * f‖_{L_Φ}, an upper bound for E_Φ(f, m).
    pub upper: f64,
    /// Exact E for Φ(t) = t²: the ℓ₂ mass of coefficients outside [−m, m]².
    pub exact_l2: Option<f64>,
}

/// Bounds for the best approximation of f by polynomials with spectrum in
/// [−m, m]². Real m is allowed (level 2 of the comparison uses m = 1/2).
pub fn best_approx_e(f: &TrigPoly, m: f64, phi: &YoungFunction, norm: &NormOptions) -> Result<BestApprox> {
    if f.dim() != 2 {
        return Err(Error::DimensionMismatch(f.dim(), 2));
    }
    if !(m > 0.0) {
        return Err(invalid(format!("m must be positive, got {m}")));
    }
    let residual = f.map_coefficients(|(k, l), c| c * (1.0 - MultiplierFamily::coefficient(m, k, l)));
    let upper = norm_trig(phi, &residual, norm).value;
    let exact_l2 = if matches!(phi.spec(), crate::young::YoungSpec::Power { p } if *p == 2.0) {
        let outside: f64 = f
            .coefficients()
            .filter(|&((k, l), _)| k.abs() as f64 > m || l.abs() as f64 > m)
            .map(|(_, c)| c.norm_sqr())
            .sum();
        Some(outside.sqrt())
    } else {
        None
    };
    Ok(BestApprox { upper, exact_l2 })
}

/// ∫ over [a, b] in u = ln t of Ψ(t) ω(f, c/t), one Kronrod panel per
/// dyadic piece.
fn dyadic_sum_integral(f: &TrigPoly, params: &BesovParams, c: f64, levels: u32) -> f64 {
    let mut total = 0.0;
    let ln2 = std::f64::consts::LN_2;
    for n in 0..levels {
        let a = n as f64 * ln2;
        let (v, _) = gk21(
            &mut |u: f64| params.psi.eval(u.exp()) * modulus(f, c * (-u).exp(), &params.phi, &params.modulus),
            a,
            a + ln2,
        );
        total += v;
    }
    total
}

/// (1/2)∫₁^{2^N} Ψ(t)/t ω(f, 1/(2t)) dt ≤ Σ_{n≤N} Ψ(2ⁿ)ω(f,2⁻ⁿ) ≤ 2∫₁^{2^{N+1}} Ψ(t)/t ω(f, 2/t) dt.
pub fn verify_lemma1(f: &TrigPoly, params: &BesovParams) -> VerificationReport {
    let n = params.n_max;
    let lower = 0.5 * dyadic_sum_integral(f, params, 0.5, n);
    let sum: f64 = besov_norm_classical(f, params).terms.iter().sum();
    let upper = 2.0 * dyadic_sum_integral(f, params, 2.0, n + 1);
    let mut rep = VerificationReport::new(
        "dyadic-sum-sandwich",
        serde_json::json!({ "f": f.to_json(), "phi": params.phi, "psi": params.psi, "n_max": n }),
        "relative 1e-9 for quadrature and modulus search",
    );
    rep.push(Inequality::new("lower integral <= dyadic sum", lower, sum, 1e-9));
    rep.push(Inequality::new("dyadic sum <= upper integral", sum, upper, 1e-9));
    rep.quantity("lower", lower);
    rep.quantity("sum", sum);
    rep.quantity("upper", upper);
    rep
}

/// Per level n ≥ 2: ‖g_n * f‖ ≤ 36 ‖f − φ_m * f‖ with m = 2^{n−3}; also
/// reports the ratio of the two Besov–Orlicz norms.
pub fn verify_comparison(f: &TrigPoly, params: &BesovParams) -> Result<VerificationReport> {
    let tilde = besov_norm_tilde(f, params)?;
    let classical = besov_norm_classical(f, params);
    let mut rep = VerificationReport::new(
        "norm-comparison",
        serde_json::json!({ "f": f.to_json(), "phi": params.phi, "psi": params.psi, "n_max": params.n_max }),
        "constant 36 from the convolution estimate; relative 1e-9",
    );
    let mut worst: f64 = 0.0;
    for n in 2..active_levels(f) {
        let gf = dyadic_piece(f, n as i32)?;
        let lhs = if gf.is_zero() { 0.0 } else { norm_trig(&params.phi, &gf, &params.norm).value };
        let m = (n as f64 - 3.0).exp2();
        let e = best_approx_e(f, m, &params.phi, &params.norm)?.upper;
        rep.push(Inequality::new(format!("level {n}"), lhs, 36.0 * e, 1e-9));
        if e > 0.0 {
            worst = worst.max(lhs / e);
        }
    }
    rep.quantity("tilde", tilde.value);
    rep.quantity("classical", classical.value);
    rep.quantity("ratio", if classical.value > 0.0 { tilde.value / classical.value } else { f64::NAN });
    rep.quantity("max_level_ratio", worst);
    Ok(rep)
}
