//! Auxiliary checks: the measure of the symmetric difference of two shifted
//! balls, and the transfer from inverse to forward supermultiplicativity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::report::{Inequality, VerificationReport};
use crate::special::unit_ball_volume;
use crate::young::YoungFunction;

/// Two closed balls of radius r in ℝ^d with centers at distance 2α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallPair {
    pub d: u32,
    pub r: f64,
    pub alpha: f64,
}

impl BallPair {
    pub fn new(d: u32, r: f64, alpha: f64) -> Result<Self> {
        if d == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid(format!("radius must be positive, got {r}")));
        }
        if !(0.0..r).contains(&alpha) {
            return Err(invalid(format!("offset must lie in [0, r), got {alpha}")));
        }
        Ok(Self { d, r, alpha })
    }

    pub fn unit_volume(&self) -> f64 {
        unit_ball_volume(self.d)
    }

    /// V_d r^{d−1} α.
    pub fn lower_bound(&self) -> f64 {
        self.unit_volume() * self.r.powi(self.d as i32 - 1) * self.alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum SymmdiffMethod {
    Exact1d,
    Exact2dLens,
    MonteCarlo { seed: u64, samples: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    pub value: f64,
    pub std_error: f64,
}

/// Area of the intersection of two discs of radius r at center distance D.
pub fn lens_area(r: f64, dist: f64) -> f64 {
    if dist >= 2.0 * r {
        return 0.0;
    }
    2.0 * r * r * (dist / (2.0 * r)).acos() - 0.5 * dist * (4.0 * r * r - dist * dist).sqrt()
}

pub fn symmdiff_measure(bp: &BallPair, method: SymmdiffMethod) -> Result<Measure> {
    match method {
        SymmdiffMethod::Exact1d => {
            if bp.d != 1 {
                return Err(invalid("exact interval formula needs d = 1"));
            }
            Ok(Measure { value: 4.0 * bp.alpha, std_error: 0.0 })
        }
        SymmdiffMethod::Exact2dLens => {
            if bp.d != 2 {
                return Err(invalid("lens formula needs d = 2"));
            }
            let disc = std::f64::consts::PI * bp.r * bp.r;
            Ok(Measure { value: 2.0 * (disc - lens_area(bp.r, 2.0 * bp.alpha)), std_error: 0.0 })
        }
        SymmdiffMethod::MonteCarlo { seed, samples } => monte_carlo(bp, seed, samples),
    }
}

/// Strata per axis: about 4096 cells in total.
fn strata_per_axis(d: u32) -> u64 {
    ((4096f64).powf(1.0 / d as f64).floor() as u64).max(1)
}

/// Stratified sampling of the bounding box of the union; every cell has its
/// own stream of the seeded generator and cells are merged in index order.
fn monte_carlo(bp: &BallPair, seed: u64, samples: u64) -> Result<Measure> {
    let d = bp.d as usize;
    let m = strata_per_axis(bp.d);
    let cells = m.pow(bp.d);
    let per_cell = samples / cells;
    if per_cell < 2 {
        return Err(invalid(format!("need at least {} samples for {cells} strata", 2 * cells)));
    }
    let (r, a) = (bp.r, bp.alpha);
    let lo: Vec<f64> = (0..d).map(|i| if i == 0 { -a - r } else { -r }).collect();
    let width: Vec<f64> = (0..d).map(|i| if i == 0 { 2.0 * (a + r) } else { 2.0 * r } / m as f64).collect();
    let cell_volume: f64 = width.iter().product();
    let r2 = r * r;
    let parts: Vec<(f64, f64)> = (0..cells)
        .into_par_iter()
        .map(|cell| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(cell);
            let mut origin = vec![0.0; d];
            let mut idx = cell;
            for i in 0..d {
                origin[i] = lo[i] + (idx % m) as f64 * width[i];
                idx /= m;
            }
            let mut hits = 0u64;
            let mut p = vec![0.0; d];
            for _ in 0..per_cell {
                for i in 0..d {
                    p[i] = origin[i] + rng.random::<f64>() * width[i];
                }
                let rest: f64 = p[1..].iter().map(|v| v * v).sum();
                let in_left = (p[0] + a).powi(2) + rest <= r2;
                let in_right = (p[0] - a).powi(2) + rest <= r2;
                if in_left != in_right {
                    hits += 1;
                }
            }
            let frac = hits as f64 / per_cell as f64;
            let var = frac * (1.0 - frac) / (per_cell - 1) as f64;
            (cell_volume * frac, cell_volume * cell_volume * var)
        })
        .collect();
    let value = parts.iter().map(|p| p.0).sum();
    let std_error = parts.iter().map(|p| p.1).sum::<f64>().sqrt();
    Ok(Measure { value, std_error })
}

/// measure(B Δ B′) ≥ V_d r^{d−1} α; a Monte Carlo value passes within three
/// standard errors.
pub fn lemma2_check(bp: &BallPair, method: SymmdiffMethod) -> Result<VerificationReport> {
    let m = symmdiff_measure(bp, method)?;
    let mut rep = VerificationReport::new(
        "ball-symmetric-difference",
        serde_json::json!({ "pair": bp, "method": method }),
        "exact: relative 1e-12; Monte Carlo: 3 standard errors",
    );
    let bound = bp.lower_bound();
    rep.push(Inequality::new("V_d r^(d-1) alpha <= measure", bound, m.value + 3.0 * m.std_error, 1e-12));
    rep.quantity("measure", m.value);
    rep.quantity("std_error", m.std_error);
    rep.quantity("bound", bound);
    rep.quantity("margin", m.value - bound);
    Ok(rep)
}

/// For pairs 0 < x < Φ(1) < y with Φ⁻¹(x)Φ⁻¹(y) ≥ 1: whenever
/// Φ⁻¹(xy) ≤ CΦ⁻¹(x)Φ⁻¹(y), also Φ(a)Φ(b) ≤ Φ(Cab) with a = Φ⁻¹(x), b = Φ⁻¹(y).
pub fn lemma7_transfer(phi: &YoungFunction, c: f64, pairs: &[(f64, f64)]) -> Result<VerificationReport> {
    if !(c >= 1.0 && c.is_finite()) {
        return Err(invalid(format!("constant must be at least 1, got {c}")));
    }
    let one = phi.eval(1.0);
    let lc = c.ln();
    let mut held = 0usize;
    let mut violations = 0usize;
    let mut worst = f64::INFINITY;
    for &(x, y) in pairs {
        if !(x > 0.0 && x < one && one < y && y.is_finite()) {
            return Err(invalid(format!("pair ({x}, {y}) must satisfy 0 < x < Φ(1) < y")));
        }
        let (la, lb) = (phi.ln_inverse(x.ln()), phi.ln_inverse(y.ln()));
        if la + lb < -1e-12 {
            return Err(invalid(format!("pair ({x}, {y}) has Φ⁻¹(x)Φ⁻¹(y) < 1")));
        }
        let hypothesis = phi.ln_inverse(x.ln() + y.ln()) <= lc + la + lb + 1e-12;
        if !hypothesis {
            continue;
        }
        held += 1;
        // ln Φ(Cab) − ln(Φ(a)Φ(b)), with Φ(a)Φ(b) = xy
        let margin = phi.ln_eval(lc + la + lb) - (x.ln() + y.ln());
        worst = worst.min(margin);
        if margin < -1e-12 {
            violations += 1;
        }
    }
    let mut rep = VerificationReport::new(
        "inverse-to-forward-transfer",
        serde_json::json!({ "phi": phi, "c": c, "pairs": pairs.len() }),
        "absolute 1e-12 in log space",
    );
    rep.push(Inequality::new("implication violations", violations as f64, 0.0, 0.0));
    rep.quantity("pairs", pairs.len() as f64);
    rep.quantity("hypothesis_held", held as f64);
    rep.quantity("worst_log_margin", worst);
    Ok(rep)
}

/// Random pairs (Φ(a), Φ(b)) with a log-uniform in [1e−6, 1) and
/// ab log-uniform in [1, 1e6].
pub fn random_transfer_pairs(phi: &YoungFunction, count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = 1e6f64.ln();
    (0..count)
        .map(|_| {
            let a = (-span * rng.random::<f64>()).exp().min(1.0 - 1e-9);
            let b = (span * rng.random::<f64>()).exp() / a;
            (phi.eval(a), phi.eval(b))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exact_values() {
        let bp = BallPair::new(1, 1.0, 0.3).unwrap();
        assert!((symmdiff_measure(&bp, SymmdiffMethod::Exact1d).unwrap().value - 1.2).abs() < 1e-15);
        let bp = BallPair::new(2, 1.0, 0.5).unwrap();
        let want = 2.0 * PI - 2.0 * (2.0 * 0.5f64.acos() - 0.5 * 3f64.sqrt());
        assert!((symmdiff_measure(&bp, SymmdiffMethod::Exact2dLens).unwrap().value - want).abs() < 1e-14);
        let zero = BallPair::new(2, 1.0, 0.0).unwrap();
        assert!(symmdiff_measure(&zero, SymmdiffMethod::Exact2dLens).unwrap().value.abs() < 1e-14);
        assert!(BallPair::new(2, 1.0, 1.0).is_err());
        assert!(symmdiff_measure(&bp, SymmdiffMethod::Exact1d).is_err());
    }

    #[test]
    fn monte_carlo_matches_lens() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for i in 0..5 {
            let r = 0.5 + 2.0 * rng.random::<f64>();
            let a = r * rng.random::<f64>() * 0.99;
            let bp = BallPair::new(2, r, a).unwrap();
            let exact = symmdiff_measure(&bp, SymmdiffMethod::Exact2dLens).unwrap().value;
            let mc = symmdiff_measure(&bp, SymmdiffMethod::MonteCarlo { seed: i, samples: 200_000 }).unwrap();
            assert!((mc.value - exact).abs() <= 4.0 * mc.std_error, "{} vs {exact} ± {}", mc.value, mc.std_error);
        }
    }

    #[test]
    fn three_dimensional_lens() {
        // symmetric difference = 2(4π/3 r³ − π(4r + D)(2r − D)²/12)
        let bp = BallPair::new(3, 1.0, 0.5).unwrap();
        let dist = 1.0;
        let want = 2.0 * (4.0 * PI / 3.0 - PI * (4.0 + dist) * (2.0 - dist).powi(2) / 12.0);
        let mc = symmdiff_measure(&bp, SymmdiffMethod::MonteCarlo { seed: 1, samples: 400_000 }).unwrap();
        assert!((mc.value - want).abs() <= 4.0 * mc.std_error);
        let rep = lemma2_check(&bp, SymmdiffMethod::MonteCarlo { seed: 1, samples: 400_000 }).unwrap();
        assert!(rep.passed);
        let again = lemma2_check(&bp, SymmdiffMethod::MonteCarlo { seed: 1, samples: 400_000 }).unwrap();
        assert_eq!(serde_json::to_string(&rep).unwrap(), serde_json::to_string(&again).unwrap());
    }

    #[test]
    fn ball_bound_exact_cases() {
        let rep = lemma2_check(&BallPair::new(2, 1.0, 0.5).unwrap(), SymmdiffMethod::Exact2dLens).unwrap();
        assert!(rep.passed && rep.quantities["margin"] > 2.0);
        let rep = lemma2_check(&BallPair::new(1, 2.0, 0.0).unwrap(), SymmdiffMethod::Exact1d).unwrap();
        assert!(rep.passed);
    }

    #[test]
    fn transfer_lemma() {
        let p3 = YoungFunction::power(3.0).unwrap();
        let pairs = random_transfer_pairs(&p3, 30, 2);
        let rep = lemma7_transfer(&p3, 1.0, &pairs).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.quantities["hypothesis_held"], 30.0);
        assert!(rep.quantities["worst_log_margin"].abs() < 1e-9);
        let s7 = YoungFunction::section7(0.05).unwrap();
        let c = s7.section7_constants().unwrap().r;
        let rep = lemma7_transfer(&s7, c, &random_transfer_pairs(&s7, 100, 3)).unwrap();
        assert!(rep.passed);
        // Φ⁻¹(x)Φ⁻¹(y) = 0.5 · 1.5 < 1
        assert!(lemma7_transfer(&p3, 1.0, &[(0.125, 3.375)]).is_err());
    }
}
