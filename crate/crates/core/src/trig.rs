//! Trigonometric polynomials on T and T², Fejér kernels, the dyadic
//! f_k / g_k decomposition and the sampling frames.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Lattice index; the second component is 0 for one-dimensional data.
pub type Index = (i64, i64);

/// Finite Fourier series Σ c(k,l) e^{i(kx+ly)} (or Σ c(k) e^{ikx} in 1-D).
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    dim: u8,
    coeffs: BTreeMap<Index, Complex64>,
}

/// Serialized form: `{"dim": d, "coefficients": [[k, l, re, im], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPolyJson {
    pub dim: u8,
    pub coefficients: Vec<(i64, i64, f64, f64)>,
}

impl TrigPoly {
    pub fn zero(dim: u8) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(invalid(format!("dimension must be 1 or 2, got {dim}")));
        }
        Ok(Self { dim, coeffs: BTreeMap::new() })
    }

    /// Builds a polynomial from (index, coefficient) pairs; repeated indices
    /// accumulate and exact zeros are dropped.
    pub fn from_coefficients<I: IntoIterator<Item = (Index, Complex64)>>(dim: u8, items: I) -> Result<Self> {
        let mut p = Self::zero(dim)?;
        for ((k, l), c) in items {
            if dim == 1 && l != 0 {
                return Err(invalid(format!("1-D polynomial has a second index {l}")));
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(invalid(format!("non-finite coefficient at ({k}, {l})")));
            }
            *p.coeffs.entry((k, l)).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        p.coeffs.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        Ok(p)
    }

    pub fn constant(dim: u8, c: f64) -> Self {
        Self::from_coefficients(dim, [((0, 0), Complex64::new(c, 0.0))]).expect("valid dimension")
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    pub fn coeff(&self, k: i64, l: i64) -> Complex64 {
        self.coeffs.get(&(k, l)).copied().unwrap_or_default()
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (Index, Complex64)> + '_ {
        self.coeffs.iter().map(|(&i, &c)| (i, c))
    }

    pub fn support(&self) -> BTreeSet<Index> {
        self.coeffs.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest |k| or |l| in the support (coordinate degree).
    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|&(k, l)| k.unsigned_abs().max(l.unsigned_abs())).max().unwrap_or(0) as usize
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        self.coeffs.iter().map(|(&(k, l), &c)| c * Complex64::from_polar(1.0, k as f64 * x + l as f64 * y)).sum()
    }

    pub fn map_coefficients<F: FnMut(Index, Complex64) -> Complex64>(&self, mut f: F) -> Self {
        let items: Vec<_> = self.coefficients().map(|(i, c)| (i, f(i, c))).collect();
        Self::from_coefficients(self.dim, items).expect("same dimension")
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map_coefficients(|_, c| c * s)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let items = self.coefficients().chain(other.coefficients());
        Self::from_coefficients(self.dim, items.collect::<Vec<_>>())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Translate: f(· + h). Coefficient c_k picks up the phase e^{i k·h}.
    pub fn shift(&self, hx: f64, hy: f64) -> Self {
        self.map_coefficients(|(k, l), c| c * Complex64::from_polar(1.0, k as f64 * hx + l as f64 * hy))
    }

    /// f(· + h) − f, with e^{iθ} − 1 = 2i sin(θ/2) e^{iθ/2} to avoid
    /// cancellation for small shifts.
    pub fn difference(&self, hx: f64, hy: f64) -> Self {
        self.map_coefficients(|(k, l), c| {
            let th = k as f64 * hx + l as f64 * hy;
            c * Complex64::new(0.0, 2.0 * (0.5 * th).sin()) * Complex64::from_polar(1.0, 0.5 * th)
        })
    }

    /// Squared L₂ norm for the normalized measure (Parseval).
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    /// Values on the uniform grid x_j = 2πj/n (per axis), row-major with the
    /// first coordinate slowest: index `jx * n + jy` in 2-D.
    pub fn eval_grid(&self, n: usize) -> Vec<Complex64> {
        assert!(n > 0);
        let total = if self.dim == 1 { n } else { n * n };
        if self.coeffs.is_empty() {
            return vec![Complex64::default(); total];
        }
        if total >= 4 * self.coeffs.len() {
            self.eval_grid_fft(n)
        } else {
            self.eval_grid_direct(n)
        }
    }

    /// Grid values by direct summation; the reference for `eval_grid`.
    pub fn eval_grid_direct(&self, n: usize) -> Vec<Complex64> {
        let step = 2.0 * PI / n as f64;
        if self.dim == 1 {
            (0..n).map(|j| self.eval(step * j as f64, 0.0)).collect()
        } else {
            let mut out = Vec::with_capacity(n * n);
            for jx in 0..n {
                for jy in 0..n {
                    out.push(self.eval(step * jx as f64, step * jy as f64));
                }
            }
            out
        }
    }

    fn eval_grid_fft(&self, n: usize) -> Vec<Complex64> {
        let ni = n as i64;
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_inverse(n);
        if self.dim == 1 {
            let mut buf = vec![Complex64::default(); n];
            for (&(k, _), &c) in &self.coeffs {
                buf[k.rem_euclid(ni) as usize] += c;
            }
            fft.process(&mut buf);
            return buf;
        }
        let mut buf = vec![Complex64::default(); n * n];
        for (&(k, l), &c) in &self.coeffs {
            buf[k.rem_euclid(ni) as usize * n + l.rem_euclid(ni) as usize] += c;
        }
        // rows (second coordinate) are contiguous
        fft.process(&mut buf);
        let mut col = vec![Complex64::default(); n];
        for jy in 0..n {
            for jx in 0..n {
                col[jx] = buf[jx * n + jy];
            }
            fft.process(&mut col);
            for jx in 0..n {
                buf[jx * n + jy] = col[jx];
            }
        }
        buf
    }

    pub fn abs_on_grid(&self, n: usize) -> Vec<f64> {
        self.eval_grid(n).into_iter().map(|z| z.norm()).collect()
    }

    pub fn to_json(&self) -> TrigPolyJson {
        TrigPolyJson { dim: self.dim, coefficients: self.coefficients().map(|((k, l), c)| (k, l, c.re, c.im)).collect() }
    }

    pub fn from_json(j: &TrigPolyJson) -> Result<Self> {
        Self::from_coefficients(j.dim, j.coefficients.iter().map(|&(k, l, re, im)| ((k, l), Complex64::new(re, im))))
    }

    /// One `k l re im` line per coefficient, full round-trip precision.
    pub fn to_text(&self) -> String {
        let mut s = format!("# dim {}\n", self.dim);
        for ((k, l), c) in self.coefficients() {
            s.push_str(&format!("{k} {l} {:?} {:?}\n", c.re, c.im));
        }
        s
    }

    /// Parses the text format; the dimension comes from a `# dim d` header
    /// (default 2). Other `#` lines and blank lines are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut dim = 2u8;
        let mut items = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(d) = rest.trim().strip_prefix("dim") {
                    dim = d.trim().parse().map_err(|_| invalid(format!("line {}: bad dim", no + 1)))?;
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 {
                return Err(invalid(format!("line {}: expected `k l re im`", no + 1)));
            }
            let bad = |_| invalid(format!("line {}: cannot parse number", no + 1));
            let k: i64 = parts[0].parse().map_err(bad)?;
            let l: i64 = parts[1].parse().map_err(bad)?;
            let re: f64 = parts[2].parse().map_err(|_| invalid(format!("line {}: bad real part", no + 1)))?;
            let im: f64 = parts[3].parse().map_err(|_| invalid(format!("line {}: bad imaginary part", no + 1)))?;
            items.push(((k, l), Complex64::new(re, im)));
        }
        Self::from_coefficients(dim, items)
    }
}

/// One-dimensional Fejér kernel F_n with coefficients 1 − |k|/(n+1).
pub fn fejer(n: usize) -> TrigPoly {
    let n = n as i64;
    let items = (-n..=n).map(|k| ((k, 0), Complex64::new(1.0 - k.abs() as f64 / (n + 1) as f64, 0.0)));
    TrigPoly::from_coefficients(1, items.collect::<Vec<_>>()).expect("1-D")
}

/// Two-dimensional Fejér kernel F_{m,n}(x, y) = F_m(x) F_n(y).
pub fn fejer2(m: usize, n: usize) -> TrigPoly {
    let a = fejer(m);
    let b = fejer(n);
    let mut items = Vec::new();
    for ((k, _), ck) in a.coefficients() {
        for ((l, _), cl) in b.coefficients() {
            items.push(((k, l), ck * cl));
        }
    }
    TrigPoly::from_coefficients(2, items).expect("2-D")
}

/// Per-axis coefficient of f_k: the Fejér triangle of F_{2^k−1} shifted by
/// −2^k, 0 and 2^k and summed. Equals 1 on [−2^k, 2^k].
pub fn axis_factor(k: u32, m: i64) -> f64 {
    let w = 1i64 << k;
    let tri = |m: i64| (1.0 - m.abs() as f64 / w as f64).max(0.0);
    tri(m) + tri(m - w) + tri(m + w)
}

/// f_k for k ≥ −1: f_{−1} = f_0 = F_{0,0}; for k ≥ 1 the tensor square of
/// F_{2^k−1}(x)(e^{−i2^k x} + 1 + e^{i2^k x}).
pub fn build_f(k: i32) -> Result<TrigPoly> {
    if k < -1 {
        return Err(invalid(format!("f_k is defined for k ≥ −1, got {k}")));
    }
    if k <= 0 {
        return Ok(TrigPoly::constant(2, 1.0));
    }
    let k = k as u32;
    let reach = (1i64 << (k + 1)) - 1;
    let axis: Vec<(i64, f64)> = (-reach..=reach).map(|m| (m, axis_factor(k, m))).filter(|&(_, v)| v != 0.0).collect();
    let mut items = Vec::with_capacity(axis.len() * axis.len());
    for &(a, va) in &axis {
        for &(b, vb) in &axis {
            items.push(((a, b), Complex64::new(va * vb, 0.0)));
        }
    }
    TrigPoly::from_coefficients(2, items)
}

/// g_0 = f_{−1}, g_1 = f_0, g_{k+1} = f_k − f_{k−2}.
pub fn build_g(k: i32) -> Result<TrigPoly> {
    match k {
        k if k < 0 => Err(invalid(format!("g_k is defined for k ≥ 0, got {k}"))),
        0 => build_f(-1),
        1 => build_f(0),
        k => build_f(k - 1)?.sub(&build_f(k - 3)?),
    }
}

/// Exact support of ĝ_k (the set G_k of the decomposition).
pub fn g_support(k: i32) -> Result<BTreeSet<Index>> {
    Ok(build_g(k)?.support())
}

/// Multiplies coefficients (convolution on the torus, normalized measure).
pub fn convolve(g: &TrigPoly, f: &TrigPoly) -> Result<TrigPoly> {
    if g.dim != f.dim {
        return Err(Error::DimensionMismatch(g.dim, f.dim));
    }
    let (small, large) = if g.len() <= f.len() { (g, f) } else { (f, g) };
    let items: Vec<_> = small
        .coefficients()
        .filter_map(|(i, c)| large.coeffs.get(&i).map(|&d| (i, c * d)))
        .collect();
    TrigPoly::from_coefficients(g.dim, items)
}

/// Sampling frame of level n ≥ 3: the lattice points of (−2ⁿ, 2ⁿ)² outside
/// the hole [−2^{n−3}, 2^{n−3}]², with the uniform grid of 2^{n+1} − 1
/// points per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub level: u32,
    pub points: Vec<Index>,
    pub cardinality: usize,
    /// Points per axis, 2^{n+1} − 1.
    pub grid: usize,
    pub hole: i64,
}

impl Frame {
    pub fn new(n: u32) -> Result<Self> {
        if !(3..=20).contains(&n) {
            return Err(invalid(format!("frame level must be in 3..=20, got {n}")));
        }
        let half = (1i64 << n) - 1;
        let hole = 1i64 << (n - 3);
        let mut points = Vec::new();
        for k in -half..=half {
            for l in -half..=half {
                if k.abs() > hole || l.abs() > hole {
                    points.push((k, l));
                }
            }
        }
        let cardinality = points.len();
        Ok(Self { level: n, points, cardinality, grid: (2usize << n) - 1, hole })
    }

    pub fn half_width(&self) -> i64 {
        (1i64 << self.level) - 1
    }

    pub fn contains(&self, (k, l): Index) -> bool {
        let half = self.half_width();
        k.abs() <= half && l.abs() <= half && (k.abs() > self.hole || l.abs() > self.hole)
    }

    /// Grid coordinate 2π(k + 2ⁿ − 1)/(2^{n+1} − 1).
    pub fn coordinate(&self, k: i64) -> f64 {
        2.0 * PI * (k + self.half_width()) as f64 / self.grid as f64
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.grid as f64
    }

    /// The frame (as a set) contains every coefficient of `f`.
    pub fn check_support(&self, f: &TrigPoly) -> Result<()> {
        match f.coefficients().find(|&(i, _)| !self.contains(i)) {
            Some(((k, l), _)) => Err(Error::SupportViolation(k, l)),
            None => Ok(()),
        }
    }
}

pub fn frame(n: u32) -> Result<Frame> {
    Frame::new(n)
}

/// Values f(x_k, y_l) for (k, l) in the frame, in frame order.
pub fn sample_on_grid(f: &TrigPoly, fr: &Frame) -> Result<Vec<Complex64>> {
    if f.dim != 2 {
        return Err(Error::DimensionMismatch(f.dim, 2));
    }
    let n = fr.grid;
    let half = fr.half_width();
    let vals = f.eval_grid(n);
    Ok(fr
        .points
        .iter()
        .map(|&(k, l)| vals[(k + half) as usize * n + (l + half) as usize])
        .collect())
}

/// For every lattice point in [−r, r]², the number of levels n ≤ max_level
/// with ĝ_n nonzero there.
pub fn coverage_counts(r: i64, max_level: i32) -> Result<BTreeMap<Index, usize>> {
    let mut counts = BTreeMap::new();
    for n in 0..=max_level {
        for (k, l) in g_support(n)? {
            if k.abs() <= r && l.abs() <= r {
                *counts.entry((k, l)).or_insert(0) += 1;
            }
        }
    }
    Ok(counts)
}

/// f̂_k at a lattice point, without building f_k.
pub fn f_coefficient(k: i32, (a, b): Index) -> f64 {
    if k <= 0 {
        return if a == 0 && b == 0 { 1.0 } else { 0.0 };
    }
    axis_factor(k as u32, a) * axis_factor(k as u32, b)
}

/// ĝ_n at a lattice point (n ≥ 0).
pub fn g_coefficient(n: i32, i: Index) -> f64 {
    match n {
        0 => f_coefficient(-1, i),
        1 => f_coefficient(0, i),
        n => f_coefficient(n - 1, i) - f_coefficient(n - 3, i),
    }
}

/// g_n * f for a 2-D polynomial, touching only the coefficients of f.
pub fn dyadic_piece(f: &TrigPoly, n: i32) -> Result<TrigPoly> {
    if n < 0 {
        return Err(invalid(format!("g_k is defined for k ≥ 0, got {n}")));
    }
    if f.dim != 2 {
        return Err(Error::DimensionMismatch(f.dim, 2));
    }
    Ok(f.map_coefficients(|i, c| c * g_coefficient(n, i)))
}

/// ‖f‖_{L₁} by the rectangle rule on an n-point grid per axis.
pub fn l1_norm(f: &TrigPoly, n: usize) -> f64 {
    let v = f.abs_on_grid(n);
    v.iter().sum::<f64>() / v.len() as f64
}
