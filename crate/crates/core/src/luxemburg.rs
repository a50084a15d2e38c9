//! Luxemburg norms of finite sequences and of sampled periodic functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{Inequality, VerificationReport};
use crate::roots::illinois;
use crate::trig::TrigPoly;
use crate::young::{check_sqrt_concavity, log_grid, YoungFunction, YoungSpec};

/// One rung of a λ ladder: the modular of x/λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModularValue {
    pub lambda: f64,
    pub modular: f64,
}

/// weight · Σ Φ(|x_i| / λ).
pub fn modular(phi: &YoungFunction, abs: &[f64], weight: f64, lambda: f64) -> f64 {
    weight * abs.iter().map(|&a| phi.eval(a / lambda)).sum::<f64>()
}

pub fn modular_ladder(phi: &YoungFunction, x: &[f64], lambdas: &[f64]) -> Vec<ModularValue> {
    let abs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    lambdas.iter().map(|&lambda| ModularValue { lambda, modular: modular(phi, &abs, 1.0, lambda) }).collect()
}

/// Solves weight · Σ Φ(|x_i|/λ) = 1 for λ.
fn solve_unit_modular(phi: &YoungFunction, abs: &[f64], weight: f64) -> f64 {
    let max = abs.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    let n = abs.len() as f64;
    // only nonzero entries matter; keep the slice short for the hot loop
    let nz: Vec<f64> = abs.iter().copied().filter(|&a| a > 0.0).collect();
    let g = |lambda: f64| modular(phi, &nz, weight, lambda) - 1.0;
    let mut lo = max / phi.inverse(n.max(1.0 / weight));
    let mut hi = max / phi.inverse(weight.min(1.0 / n));
    for _ in 0..2000 {
        if g(lo) >= 0.0 {
            break;
        }
        lo *= 0.5;
    }
    for _ in 0..2000 {
        if g(hi) <= 0.0 {
            break;
        }
        hi *= 2.0;
    }
    // the a priori bracket spans many decades; narrow it geometrically first
    while hi > 1.01 * lo {
        let mid = (lo * hi).sqrt();
        if g(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    illinois(g, lo, hi, 1e-15).unwrap_or(0.5 * (lo + hi))
}

/// Luxemburg norm in ℓ_Φ: the λ with Σ Φ(|x_i|/λ) = 1 (0 for x = 0).
pub fn norm_seq(phi: &YoungFunction, x: &[f64]) -> f64 {
    let abs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    solve_unit_modular(phi, &abs, 1.0)
}

/// Luxemburg norm in L_Φ of the torus with normalized measure, from values
/// on a uniform grid (rectangle rule, exact for periodic trigonometric data
/// up to aliasing).
pub fn norm_fun(phi: &YoungFunction, samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty("sample grid"));
    }
    let abs: Vec<f64> = samples.iter().map(|v| v.abs()).collect();
    Ok(solve_unit_modular(phi, &abs, 1.0 / samples.len() as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NormOptions {
    /// Grid points per axis per unit of coordinate degree.
    pub oversample: usize,
    /// Stop doubling once the norm moves less than this, relatively.
    pub rel_tol: f64,
    pub max_doublings: usize,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self { oversample: 8, rel_tol: 1e-9, max_doublings: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    /// Points per axis of the finest grid used.
    pub grid: usize,
    /// Relative change across the last doubling.
    pub last_change: f64,
    pub converged: bool,
}

/// Grid size per axis for a polynomial of the given coordinate degree.
pub fn grid_size(degree: usize, oversample: usize) -> usize {
    (oversample * (degree + 1)).max(8)
}

/// Luxemburg norm of a trigonometric polynomial, with grid doubling until
/// the value settles or the doubling budget is spent. For Φ(t) = t² the
/// value is the coefficient ℓ₂ norm.
pub fn norm_trig(phi: &YoungFunction, f: &TrigPoly, opts: &NormOptions) -> NormEstimate {
    if f.is_zero() {
        return NormEstimate { value: 0.0, grid: 0, last_change: 0.0, converged: true };
    }
    if matches!(phi.spec(), YoungSpec::Power { p } if *p == 2.0) {
        // Parseval
        return NormEstimate { value: f.l2_norm_sq().sqrt(), grid: 0, last_change: 0.0, converged: true };
    }
    let mut n = grid_size(f.degree(), opts.oversample);
    let mut value = norm_fun(phi, &f.abs_on_grid(n)).expect("grid is nonempty");
    let mut change = f64::INFINITY;
    for _ in 0..opts.max_doublings {
        n *= 2;
        let next = norm_fun(phi, &f.abs_on_grid(n)).expect("grid is nonempty");
        change = (next - value).abs() / next;
        value = next;
        if change < opts.rel_tol {
            break;
        }
    }
    NormEstimate { value, grid: n, last_change: change, converged: change < opts.rel_tol }
}

/// ‖x‖₂ ≤ ‖x‖_Φ, the embedding of ℓ_Φ into ℓ₂.
pub fn embed_l2_check(phi: &YoungFunction, x: &[f64]) -> VerificationReport {
    let l2 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let lphi = norm_seq(phi, x);
    let mut rep = VerificationReport::new(
        "embed-l2",
        serde_json::json!({ "phi": phi, "x": x }),
        "relative 1e-12 for the Luxemburg solve",
    );
    rep.push(Inequality::new("l2 <= l_phi", l2, lphi, 1e-12));
    let pre = check_sqrt_concavity(phi, &log_grid(1e-8, 1e8, 321));
    rep.quantity("l2", l2);
    rep.quantity("l_phi", lphi);
    rep.quantity("sqrt_concavity_precondition", if pre.passed { 1.0 } else { 0.0 });
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn euclidean_and_zero() {
        let p2 = YoungFunction::power(2.0).unwrap();
        assert!((norm_seq(&p2, &[3.0, 4.0]) - 5.0).abs() < 1e-13);
        assert_eq!(norm_seq(&p2, &[0.0, 0.0, 0.0]), 0.0);
        assert_eq!(norm_seq(&p2, &[]), 0.0);
    }

    #[test]
    fn logpower_against_lambda_scan() {
        let phi = YoungFunction::logpower(1.0, 1.0).unwrap();
        let x = [0.1, 0.2, 0.05];
        let got = norm_seq(&phi, &x);
        // scan λ over [max, Σ/Φ⁻¹(1)] at 1e6 resolution, take the first with modular ≤ 1
        let lo = 0.2;
        let hi = 0.35 / phi.inverse(1.0);
        let steps = 1_000_000;
        let mut found = hi;
        for i in 0..=steps {
            let lam = lo + (hi - lo) * i as f64 / steps as f64;
            if x.iter().map(|&a| phi.eval(a / lam)).sum::<f64>() <= 1.0 {
                found = lam;
                break;
            }
        }
        assert!((got - found).abs() <= (hi - lo) / steps as f64 * 1.01, "{got} vs {found}");
    }

    #[test]
    fn constant_function() {
        for phi in [YoungFunction::power(3.0).unwrap(), YoungFunction::section7(0.05).unwrap()] {
            let v = norm_fun(&phi, &[2.0; 17]).unwrap();
            assert!((v - 2.0 / phi.inverse(1.0)).abs() < 1e-12);
        }
        assert!(norm_fun(&YoungFunction::power(2.0).unwrap(), &[]).is_err());
    }

    #[test]
    fn half_indicator_and_cos4() {
        let p2 = YoungFunction::power(2.0).unwrap();
        let ind: Vec<f64> = (0..1000).map(|i| if i < 500 { 1.0 } else { 0.0 }).collect();
        assert!((norm_fun(&p2, &ind).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        let p4 = YoungFunction::power(4.0).unwrap();
        let n = 64;
        let cos: Vec<f64> = (0..n).map(|j| (2.0 * std::f64::consts::PI * j as f64 / n as f64).cos()).collect();
        assert!((norm_fun(&p4, &cos).unwrap() - 0.375f64.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn unit_modular_at_the_norm() {
        let phi = YoungFunction::section7(0.05).unwrap();
        let x = [1e-3, 0.5, 2.0, 7.0, 1e-9];
        let n = norm_seq(&phi, &x);
        let m: f64 = x.iter().map(|&a| phi.eval(a / n)).sum();
        assert!((m - 1.0).abs() < 1e-9);
        let ladder = modular_ladder(&phi, &x, &[0.5 * n, n, 2.0 * n]);
        assert!(ladder.windows(2).all(|w| w[1].modular <= w[0].modular));
    }

    #[test]
    fn norm_trig_of_single_harmonic() {
        let f = TrigPoly::from_coefficients(1, [((3, 0), Complex64::new(0.0, 2.0))]).unwrap();
        let est = norm_trig(&YoungFunction::power(2.0).unwrap(), &f, &NormOptions::default());
        assert!((est.value - 2.0).abs() < 1e-12);
        assert!(est.converged);
    }

    #[test]
    fn norm_trig_grid_route_agrees_with_parseval() {
        let f = TrigPoly::from_coefficients(
            2,
            [((3, 1), Complex64::new(0.0, 2.0)), ((-2, 5), Complex64::new(1.0, -1.0)), ((0, 0), Complex64::new(0.5, 0.0))],
        )
        .unwrap();
        let p2 = YoungFunction::power(2.0).unwrap();
        let fast = norm_trig(&p2, &f, &NormOptions::default()).value;
        let grid = norm_fun(&p2, &f.abs_on_grid(grid_size(f.degree(), 8))).unwrap();
        assert!((fast - grid).abs() < 1e-12 * fast);
        let p3 = YoungFunction::power(3.0).unwrap();
        let est = norm_trig(&p3, &f, &NormOptions::default());
        let direct = (f.abs_on_grid(512).iter().map(|a| a.powi(3)).sum::<f64>() / (512.0 * 512.0)).cbrt();
        assert!((est.value - direct).abs() < 1e-9 * direct);
    }

    #[test]
    fn l2_embedding() {
        let p2 = YoungFunction::power(2.0).unwrap();
        let r = embed_l2_check(&p2, &[1.0, -2.0, 0.5]);
        assert!(r.passed && r.worst_margin().abs() < 1e-12);
        let s7 = YoungFunction::section7(0.05).unwrap();
        let r = embed_l2_check(&s7, &[1.0, 0.0, 0.0]);
        assert!(r.passed);
        assert_eq!(r.quantities["sqrt_concavity_precondition"], 1.0);
    }
}
