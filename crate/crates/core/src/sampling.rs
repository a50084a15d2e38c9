//! Sampling inequalities: the classical one-dimensional grid inequality,
//! the Orlicz frame inequality with constant 24C², the ℓ₂ lower bound on a
//! frame, and the end-to-end chain that combines them.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::besov::active_levels;
use crate::error::{invalid, Result};
use crate::luxemburg::{norm_seq, norm_trig, NormOptions};
use crate::report::{ConditionReport, Inequality, VerificationReport};
use crate::trig::{dyadic_piece, sample_on_grid, Frame, TrigPoly};
use crate::weight::Weight;
use crate::young::{admissible_pairs, check_inverse_product, check_supermultiplicativity, log_grid, YoungFunction};

/// Relative slack in every sampling pass flag.
pub const SAMPLING_SLACK: f64 = 1e-9;
/// Default constant for the ℓ₂ lower bound on a frame.
pub const DEFAULT_L2_CONSTANT: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientLaw {
    /// Real and imaginary parts independent N(0, 1/2), so E|c|² = 1.
    Gaussian,
    /// |c| = 1 with a uniform random phase.
    Unimodular,
}

impl CoefficientLaw {
    fn draw<R: Rng>(self, rng: &mut R) -> Complex64 {
        match self {
            CoefficientLaw::Gaussian => {
                let nd = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid σ");
                Complex64::new(nd.sample(rng), nd.sample(rng))
            }
            CoefficientLaw::Unimodular => Complex64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU),
        }
    }
}

/// Generator for trial `trial` of a batch seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Random polynomial with one coefficient at every point of the frame of level n.
pub fn random_poly_on_frame(n: u32, seed: u64, law: CoefficientLaw) -> Result<TrigPoly> {
    let fr = Frame::new(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(poly_on_frame(&fr, &mut rng, law))
}

fn poly_on_frame<R: Rng>(fr: &Frame, rng: &mut R, law: CoefficientLaw) -> TrigPoly {
    let items: Vec<_> = fr.points.iter().map(|&i| (i, law.draw(rng))).collect();
    TrigPoly::from_coefficients(2, items).expect("two-dimensional")
}

/// Random polynomial with coefficients on [−degree, degree] (per axis in 2-D).
pub fn random_poly<R: Rng>(dim: u8, degree: usize, rng: &mut R, law: CoefficientLaw) -> Result<TrigPoly> {
    let d = degree as i64;
    let items: Vec<_> = match dim {
        1 => (-d..=d).map(|k| ((k, 0), law.draw(rng))).collect(),
        2 => (-d..=d).flat_map(|k| (-d..=d).map(move |l| (k, l))).map(|i| (i, law.draw(rng))).collect(),
        _ => return Err(invalid(format!("dimension must be 1 or 2, got {dim}"))),
    };
    TrigPoly::from_coefficients(dim, items)
}

/// One row of a sampling batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingCheck {
    pub check: String,
    pub level: u32,
    pub seed: u64,
    pub trial: u64,
    /// "random" or "extremal".
    pub candidate: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Empirical constant: lhs divided by rhs without the theoretical bound.
    pub ratio: f64,
    pub bound: f64,
    pub passed: bool,
    /// The Young-function hypotheses held for the supplied constant.
    pub supported: bool,
}

impl SamplingCheck {
    fn new(check: &str, level: u32, lhs: f64, scale: f64, bound: f64) -> Self {
        let rhs = bound * scale;
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / scale };
        Self {
            check: check.to_string(),
            level,
            seed: 0,
            trial: 0,
            candidate: "random".to_string(),
            lhs,
            rhs,
            ratio,
            bound,
            passed: lhs <= rhs * (1.0 + SAMPLING_SLACK),
            supported: true,
        }
    }

    fn tagged(mut self, seed: u64, trial: u64, candidate: &str) -> Self {
        self.seed = seed;
        self.trial = trial;
        self.candidate = candidate.to_string();
        self
    }
}

/// Mean of Φ(|g|) over n uniform points.
fn grid_modular(phi: &YoungFunction, g: &TrigPoly, n: usize) -> f64 {
    let v = g.abs_on_grid(n);
    v.iter().map(|&a| phi.eval(a)).sum::<f64>() / n as f64
}

/// (1/(2n+1)) Σ Φ(|g(2π(k+n)/(2n+1))|/3) ≤ (1/2π)∫Φ(|g|), for deg g ≤ n.
/// The integral uses an oversampled rectangle rule, doubled until it settles.
pub fn classical_check_1d(g: &TrigPoly, n: usize, phi: &YoungFunction) -> Result<SamplingCheck> {
    if g.dim() != 1 {
        return Err(invalid("classical sampling check needs a one-dimensional polynomial"));
    }
    if g.degree() > n {
        return Err(invalid(format!("degree {} exceeds the grid order {n}", g.degree())));
    }
    let m = 2 * n + 1;
    // k + n runs over 0..2n, so these are the points 2πj/(2n+1)
    let lhs = g.abs_on_grid(m).iter().map(|&a| phi.eval(a / 3.0)).sum::<f64>() / m as f64;
    let mut pts = 8 * (n + 1);
    let mut rhs = grid_modular(phi, g, pts);
    for _ in 0..6 {
        pts *= 2;
        let next = grid_modular(phi, g, pts);
        let settled = (next - rhs).abs() <= 1e-12 * next.abs();
        rhs = next;
        if settled {
            break;
        }
    }
    Ok(SamplingCheck::new("classical-1d", n as u32, lhs, rhs, 1.0))
}

/// Bound 24C² of the frame inequality.
pub fn orlicz_bound(c: f64) -> f64 {
    24.0 * c * c
}

/// Supermultiplicativity and inverse-product hypotheses with constant C,
/// on the default grids.
pub fn orlicz_preconditions(phi: &YoungFunction, c: f64) -> Result<(ConditionReport, ConditionReport)> {
    let pairs = admissible_pairs(1e-12, 0.999, 60, 1e12, 60);
    let sup = check_supermultiplicativity(phi, c, &pairs)?;
    let inv = check_inverse_product(phi, c, &log_grid(1e-12, 1e12, 241))?;
    Ok((sup, inv))
}

/// ‖(f)‖_{ℓ_Φ} ≤ 24C² Φ⁻¹(ω_n) ‖f‖_{L_Φ} for supp f̂ inside the frame.
/// The ratio is ‖(f)‖_{ℓ_Φ} / (Φ⁻¹(ω_n)‖f‖_{L_Φ}).
pub fn orlicz_sampling_check(
    f: &TrigPoly,
    fr: &Frame,
    phi: &YoungFunction,
    c: f64,
    supported: bool,
    norm: &NormOptions,
) -> Result<SamplingCheck> {
    fr.check_support(f)?;
    let abs: Vec<f64> = sample_on_grid(f, fr)?.iter().map(|z| z.norm()).collect();
    let lhs = norm_seq(phi, &abs);
    let lphi = norm_trig(phi, f, norm).value;
    let scale = phi.inverse(fr.cardinality as f64) * lphi;
    let mut row = SamplingCheck::new("orlicz-frame", fr.level, lhs, scale, orlicz_bound(c));
    row.supported = supported;
    Ok(row)
}

/// ‖f‖_{L₂} ≤ K ω_n^{−1/2} ‖(f)‖_{ℓ₂} on the frame of level n.
pub fn l2_sampling_lower(f: &TrigPoly, fr: &Frame, k: f64) -> Result<SamplingCheck> {
    let lhs = f.l2_norm_sq().sqrt();
    let l2: f64 = sample_on_grid(f, fr)?.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let scale = l2 / (fr.cardinality as f64).sqrt();
    Ok(SamplingCheck::new("l2-frame", fr.level, lhs, scale, k))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingSummary {
    pub checks: usize,
    pub violations: usize,
    pub max_ratio: f64,
    pub bound: f64,
    pub supported: bool,
    pub passed: bool,
}

impl SamplingSummary {
    pub fn from_rows(rows: &[SamplingCheck]) -> Self {
        let violations = rows.iter().filter(|r| !r.passed).count();
        Self {
            checks: rows.len(),
            violations,
            max_ratio: rows.iter().map(|r| r.ratio).fold(0.0, f64::max),
            bound: rows.first().map_or(f64::NAN, |r| r.bound),
            supported: rows.iter().all(|r| r.supported),
            passed: violations == 0 && !rows.is_empty(),
        }
    }
}

/// Random one-dimensional polynomials of random degree in 1..=max_degree.
pub fn classical_batch(trials: u64, max_degree: usize, phi: &YoungFunction, seed: u64) -> Result<Vec<SamplingCheck>> {
    if max_degree == 0 {
        return Err(invalid("maximal degree must be positive"));
    }
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let deg = rng.random_range(1..=max_degree);
            let law = if t % 2 == 0 { CoefficientLaw::Gaussian } else { CoefficientLaw::Unimodular };
            let g = random_poly(1, deg, &mut rng, law)?;
            Ok(classical_check_1d(&g, deg, phi)?.tagged(seed, t, "random"))
        })
        .collect()
}

/// Frame-inequality batch: one extremal single-coefficient candidate
/// followed by `trials` random polynomials on the frame.
pub fn orlicz_batch(
    n: u32,
    trials: u64,
    phi: &YoungFunction,
    c: f64,
    law: CoefficientLaw,
    seed: u64,
    norm: &NormOptions,
) -> Result<Vec<SamplingCheck>> {
    let fr = Frame::new(n)?;
    let (sup, inv) = orlicz_preconditions(phi, c)?;
    let supported = sup.passed && inv.passed;
    let corner = fr.half_width();
    let single = TrigPoly::from_coefficients(2, [((corner, corner), Complex64::new(1.0, 0.0))])?;
    let mut rows = vec![orlicz_sampling_check(&single, &fr, phi, c, supported, norm)?.tagged(seed, 0, "extremal")];
    let random: Result<Vec<_>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let f = poly_on_frame(&fr, &mut trial_rng(seed, t + 1), law);
            Ok(orlicz_sampling_check(&f, &fr, phi, c, supported, norm)?.tagged(seed, t + 1, "random"))
        })
        .collect();
    rows.extend(random?);
    Ok(rows)
}

/// ℓ₂ lower-bound batch on the frame of level n.
pub fn l2_batch(n: u32, trials: u64, k: f64, law: CoefficientLaw, seed: u64) -> Result<Vec<SamplingCheck>> {
    let fr = Frame::new(n)?;
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let f = poly_on_frame(&fr, &mut trial_rng(seed, t), law);
            Ok(l2_sampling_lower(&f, &fr, k)?.tagged(seed, t, "random"))
        })
        .collect()
}

/// Lattice points of (−2ⁿ, 2ⁿ)² outside [−2^{n−3}, 2^{n−3}]², for any n ≥ 0.
pub fn frame_cardinality(n: u32) -> usize {
    let side = (2usize << n) - 1;
    let hole = if n >= 3 { 2 * (1usize << (n - 3)) + 1 } else { 1 };
    side * side - hole * hole
}

/// (Σ_n ‖g_n*f‖²_{L₂})^{1/2} ≤ 24C² Σ_n Ψ(√ω_n) ‖g_n*f‖_{L_Φ}, over the
/// levels where g_n*f can be nonzero. Empty frames (n = 0) count as ω = 1.
pub fn sampling_chain(f: &TrigPoly, phi: &YoungFunction, psi: &Weight, c: f64, norm: &NormOptions) -> Result<VerificationReport> {
    let levels = active_levels(f);
    let mut l2_sq = 0.0;
    let mut weighted = 0.0;
    let mut rep = VerificationReport::new(
        "sampling-chain",
        serde_json::json!({ "phi": phi, "psi": psi, "c": c, "f": f.to_json(), "norm": norm }),
        "relative 1e-9 on the final inequality",
    );
    for n in 0..=levels {
        let piece = dyadic_piece(f, n as i32)?;
        if piece.is_zero() {
            continue;
        }
        let omega = frame_cardinality(n).max(1) as f64;
        let l2 = piece.l2_norm_sq();
        let lphi = norm_trig(phi, &piece, norm).value;
        l2_sq += l2;
        weighted += psi.eval(omega.sqrt()) * lphi;
        rep.quantity(&format!("level_{n}_l2"), l2.sqrt());
        rep.quantity(&format!("level_{n}_l_phi"), lphi);
    }
    let lhs = l2_sq.sqrt();
    let rhs = orlicz_bound(c) * weighted;
    rep.quantity("lhs", lhs);
    rep.quantity("weighted_sum", weighted);
    rep.quantity("ratio", if lhs == 0.0 { 0.0 } else { lhs / weighted });
    rep.push(Inequality::new("l2 pieces <= 24C^2 weighted L_phi pieces", lhs, rhs, SAMPLING_SLACK));
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trig::fejer;

    #[test]
    fn frame_sizes() {
        for n in 3..=7 {
            assert_eq!(frame_cardinality(n), Frame::new(n).unwrap().cardinality);
        }
        assert_eq!(frame_cardinality(0), 0);
        assert_eq!(frame_cardinality(2), 48);
    }

    #[test]
    fn constant_and_fejer_classical() {
        let phi = YoungFunction::power(2.0).unwrap();
        let g = TrigPoly::constant(1, 2.0);
        let r = classical_check_1d(&g, 0, &phi).unwrap();
        assert!((r.lhs - phi.eval(2.0 / 3.0)).abs() < 1e-14 && (r.rhs - 4.0).abs() < 1e-12 && r.passed);
        let f4 = fejer(4);
        let r = classical_check_1d(&f4, 4, &phi).unwrap();
        // mean of |F_4|² is Σ (1 − |k|/5)² = 1 + 2(0.64 + 0.36 + 0.16 + 0.04) = 3.4
        assert!((r.rhs - 3.4).abs() < 1e-12);
        assert!(r.passed);
        assert!(classical_check_1d(&f4, 3, &phi).is_err());
    }

    #[test]
    fn classical_batches_pass() {
        for phi in [YoungFunction::power(1.5).unwrap(), YoungFunction::section7(0.05).unwrap()] {
            let rows = classical_batch(20, 64, &phi, 11).unwrap();
            assert!(SamplingSummary::from_rows(&rows).passed);
        }
    }

    #[test]
    fn seeded_generation() {
        let a = random_poly_on_frame(4, 5, CoefficientLaw::Gaussian).unwrap();
        let b = random_poly_on_frame(4, 5, CoefficientLaw::Gaussian).unwrap();
        assert_eq!(a, b);
        let fr = Frame::new(4).unwrap();
        assert!(fr.check_support(&a).is_ok());
        assert_eq!(a.len(), fr.cardinality);
        let u = random_poly_on_frame(3, 1, CoefficientLaw::Unimodular).unwrap();
        assert!(u.coefficients().all(|(_, c)| (c.norm() - 1.0).abs() < 1e-14));
    }

    #[test]
    fn gaussian_energy() {
        let fr = Frame::new(3).unwrap();
        let mean: f64 =
            (0..100).map(|s| random_poly_on_frame(3, s, CoefficientLaw::Gaussian).unwrap().l2_norm_sq()).sum::<f64>() / 100.0;
        let want = fr.cardinality as f64;
        assert!((mean - want).abs() < 0.1 * want, "{mean} vs {want}");
    }

    #[test]
    fn single_harmonic_ratios() {
        let fr = Frame::new(3).unwrap();
        let f = TrigPoly::from_coefficients(2, [((7, -2), Complex64::new(0.0, 3.0))]).unwrap();
        let p2 = YoungFunction::power(2.0).unwrap();
        let r = orlicz_sampling_check(&f, &fr, &p2, 1.0, true, &NormOptions::default()).unwrap();
        // |f| ≡ 3: ‖(f)‖ = 3√ω, ‖f‖ = 3, Φ⁻¹(ω) = √ω
        assert!((r.ratio - 1.0).abs() < 1e-12 && r.passed);
        let l2 = l2_sampling_lower(&f, &fr, 2.0).unwrap();
        assert!((l2.ratio - 1.0).abs() < 1e-12 && l2.passed);
        let zero = l2_sampling_lower(&TrigPoly::zero(2).unwrap(), &fr, 2.0).unwrap();
        assert!(zero.passed && zero.lhs == 0.0 && zero.rhs == 0.0);
        let outside = TrigPoly::from_coefficients(2, [((0, 0), Complex64::new(1.0, 0.0))]).unwrap();
        assert!(orlicz_sampling_check(&outside, &fr, &p2, 1.0, true, &NormOptions::default()).is_err());
    }

    #[test]
    fn section7_frame_batch() {
        let phi = YoungFunction::section7(0.05).unwrap();
        let c = phi.section7_constants().unwrap().r;
        let norm = NormOptions { max_doublings: 0, ..NormOptions::default() };
        let rows = orlicz_batch(3, 4, &phi, c, CoefficientLaw::Gaussian, 3, &norm).unwrap();
        let s = SamplingSummary::from_rows(&rows);
        assert!(s.passed && s.supported);
        assert!(s.max_ratio >= rows[0].ratio);
        // weaker constant: the hypotheses fail, the row is still computed
        let rows = orlicz_batch(3, 1, &phi, 1.0, CoefficientLaw::Gaussian, 3, &norm).unwrap();
        assert!(!rows[0].supported);
    }

    #[test]
    fn chain_holds() {
        let phi = YoungFunction::section7(0.05).unwrap();
        let psi = Weight::inverse_square_over_t(&phi, 1.0).unwrap();
        let c = phi.section7_constants().unwrap().r;
        let mut rng = trial_rng(9, 0);
        let f = random_poly(2, 12, &mut rng, CoefficientLaw::Gaussian).unwrap();
        let norm = NormOptions { max_doublings: 0, ..NormOptions::default() };
        let rep = sampling_chain(&f, &phi, &psi, c, &norm).unwrap();
        assert!(rep.passed);
        // pieces telescope to 2f in L₂ only loosely; each level is present
        assert!(rep.quantities.contains_key("level_0_l2"));
    }
}
