//! Young functions: evaluation, inversion and structural checks.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::report::ConditionReport;
use crate::roots::guarded_newton;

/// Serializable description of a Young function, matching the config format
/// `{"kind": "...", "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum YoungSpec {
    Power { p: f64 },
    Logpower { p0: f64, gamma: f64 },
    Section7 { alpha: f64 },
    /// Knots `(t, Φ(t))` of a convex piecewise-linear function through the
    /// origin, extended linearly past the last knot.
    Tabulated { breakpoints: Vec<(f64, f64)> },
}

/// Derived constants of the three-branch example function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Section7Constants {
    pub alpha: f64,
    /// r = exp(2e²), the two branch points are 1/r and r.
    pub r: f64,
    pub ln_r: f64,
    /// α·ln√r / ln ln√r, the exponent at both branch points.
    pub c: f64,
    pub p: f64,
    pub q: f64,
}

impl Section7Constants {
    pub fn new(alpha: f64) -> Self {
        let e2 = std::f64::consts::E * std::f64::consts::E;
        let ln_r = 2.0 * e2;
        let r = ln_r.exp();
        // ln√r = e², ln ln√r = 2
        let c = alpha * e2 / 2.0;
        let p = (r * (-c).exp() - c.exp() / r) / (r - 1.0 / r);
        // r e^{-c} - p r, rearranged to avoid cancellation
        let q = 2.0 * r * c.sinh() / (r * r - 1.0);
        Self { alpha, r, ln_r, c, p, q }
    }

    /// ln Φ⁻¹(e^u).
    fn ln_inverse(&self, u: f64) -> f64 {
        if u < -self.ln_r {
            let y = -0.5 * u;
            u + self.alpha * y / y.ln()
        } else if u < self.ln_r {
            (self.p * u.exp() + self.q).ln()
        } else {
            let y = 0.5 * u;
            u - self.alpha * y / y.ln()
        }
    }

    /// Solves ln Φ⁻¹(e^u) = lt for u on one of the outer branches.
    fn outer_branch_solve(&self, lt: f64, left: bool) -> f64 {
        let a = self.alpha;
        let g = |u: f64| {
            let y = if left { -0.5 * u } else { 0.5 * u };
            let ly = y.ln();
            let shift = a * y / ly;
            let val = if left { u + shift } else { u - shift };
            let der = 1.0 - 0.5 * a * (ly - 1.0) / (ly * ly);
            (val - lt, der)
        };
        let k = 1.0 / (1.0 - 0.25 * a);
        if left {
            let hi = lt.min(-self.ln_r);
            let lo = (lt * k).min(hi);
            guarded_newton(g, lo, hi, lt, 1e-16)
        } else {
            let lo = lt.max(self.ln_r);
            let hi = (lt * k).max(lo);
            guarded_newton(g, lo, hi, lt, 1e-16)
        }
    }

    fn ln_eval(&self, lt: f64) -> f64 {
        // branch boundaries in t: Φ⁻¹(1/r) = e^c / r and Φ⁻¹(r) = r e^{-c}
        let lt_lo = self.c - self.ln_r;
        let lt_hi = self.ln_r - self.c;
        if lt <= lt_lo {
            self.outer_branch_solve(lt, true)
        } else if lt >= lt_hi {
            self.outer_branch_solve(lt, false)
        } else {
            ((lt.exp() - self.q) / self.p).ln()
        }
    }

    fn eval(&self, t: f64) -> f64 {
        let lt_lo = self.c - self.ln_r;
        let lt_hi = self.ln_r - self.c;
        let lt = t.ln();
        if lt > lt_lo && lt < lt_hi {
            (t - self.q) / self.p
        } else {
            self.ln_eval(lt).exp()
        }
    }

    fn inverse(&self, u: f64) -> f64 {
        if u >= 1.0 / self.r && u < self.r {
            self.p * u + self.q
        } else {
            self.ln_inverse(u.ln()).exp()
        }
    }

    /// Second derivative of x ↦ (Φ⁻¹(x))² from the closed forms on each
    /// smooth branch. At the two branch points the one-sided value from the
    /// right is returned.
    pub fn sq_inverse_second_derivative(&self, x: f64) -> f64 {
        let a = self.alpha;
        if x < 1.0 / self.r {
            let y = -0.5 * x.ln();
            let l = y.ln();
            (2.0 * a * y / l).exp()
                * (2.0
                    + a * (-3.0 * (l - 1.0) / (l * l) + (2.0 - l) / (2.0 * l.powi(3) * y)
                        + a * (l - 1.0).powi(2) / l.powi(4)))
        } else if x < self.r {
            2.0 * self.p * self.p
        } else {
            let y = 0.5 * x.ln();
            let l = y.ln();
            (-2.0 * a * y / l).exp()
                * (2.0
                    + a * (-3.0 * (l - 1.0) / (l * l) + (l - 2.0) / (2.0 * l.powi(3) * y)
                        + a * (l - 1.0).powi(2) / l.powi(4)))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Power { p: f64 },
    LogPower { p0: f64, gamma: f64, value: f64, slope: f64 },
    Section7(Section7Constants),
    Tabulated { knots: Vec<(f64, f64)> },
}

/// Switch point past which the log-power family is extended affinely.
pub const LOGPOWER_SWITCH: f64 = 0.5;

/// A Young function Φ together with its inverse Φ⁻¹.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "YoungSpec", into = "YoungSpec")]
pub struct YoungFunction {
    spec: YoungSpec,
    kind: Kind,
}

impl TryFrom<YoungSpec> for YoungFunction {
    type Error = crate::error::Error;
    fn try_from(spec: YoungSpec) -> Result<Self> {
        Self::from_spec(&spec)
    }
}

impl From<YoungFunction> for YoungSpec {
    fn from(y: YoungFunction) -> Self {
        y.spec
    }
}

impl YoungFunction {
    pub fn from_spec(spec: &YoungSpec) -> Result<Self> {
        match *spec {
            YoungSpec::Power { p } => Self::power(p),
            YoungSpec::Logpower { p0, gamma } => Self::logpower(p0, gamma),
            YoungSpec::Section7 { alpha } => Self::section7(alpha),
            YoungSpec::Tabulated { ref breakpoints } => Self::tabulated(breakpoints.clone()),
        }
    }

    pub fn power(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(invalid(format!("power exponent must exceed 1, got {p}")));
        }
        Ok(Self { spec: YoungSpec::Power { p }, kind: Kind::Power { p } })
    }

    /// Φ(t) = t^{p0} / |ln t|^γ on (0, 1/2], continued by its tangent line.
    pub fn logpower(p0: f64, gamma: f64) -> Result<Self> {
        if !(p0 >= 1.0) || !p0.is_finite() {
            return Err(invalid(format!("log-power exponent p0 must be at least 1, got {p0}")));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(invalid(format!("log-power γ must be positive, got {gamma}")));
        }
        let s = LOGPOWER_SWITCH;
        let l = s.ln();
        let value = s.powf(p0) / (-l).powf(gamma);
        let slope = value * (p0 - gamma / l) / s;
        Ok(Self { spec: YoungSpec::Logpower { p0, gamma }, kind: Kind::LogPower { p0, gamma, value, slope } })
    }

    pub fn section7(alpha: f64) -> Result<Self> {
        let bound = (-2.0f64).exp();
        if !(alpha > 0.0 && alpha < bound) {
            return Err(invalid(format!("α must lie in (0, e⁻²), got {alpha}")));
        }
        Ok(Self { spec: YoungSpec::Section7 { alpha }, kind: Kind::Section7(Section7Constants::new(alpha)) })
    }

    pub fn tabulated(breakpoints: Vec<(f64, f64)>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(invalid("tabulated Young function needs at least one knot"));
        }
        let mut knots = vec![(0.0, 0.0)];
        knots.extend(breakpoints.iter().copied());
        let mut last_slope = 0.0;
        for w in knots.windows(2) {
            let (t0, u0) = w[0];
            let (t1, u1) = w[1];
            if !(t1 > t0 && u1 > u0) || !t1.is_finite() || !u1.is_finite() {
                return Err(invalid(format!("knots must increase strictly: ({t0}, {u0}) then ({t1}, {u1})")));
            }
            let slope = (u1 - u0) / (t1 - t0);
            if slope < last_slope * (1.0 - 1e-12) {
                return Err(invalid(format!("knots are not convex at t = {t0}")));
            }
            last_slope = slope;
        }
        Ok(Self { spec: YoungSpec::Tabulated { breakpoints }, kind: Kind::Tabulated { knots } })
    }

    pub fn spec(&self) -> &YoungSpec {
        &self.spec
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            Kind::Power { .. } => "power",
            Kind::LogPower { .. } => "logpower",
            Kind::Section7(_) => "section7",
            Kind::Tabulated { .. } => "tabulated",
        }
    }

    /// Interval of t on which Φ is given by its defining closed form; outside
    /// it the value comes from an extension or a numeric inversion.
    pub fn domain_hint(&self) -> (f64, f64) {
        match &self.kind {
            Kind::Power { .. } => (0.0, f64::INFINITY),
            Kind::LogPower { .. } => (0.0, LOGPOWER_SWITCH),
            Kind::Section7(c) => (c.c.exp() / c.r, c.r * (-c.c).exp()),
            Kind::Tabulated { knots } => (0.0, knots.last().map_or(0.0, |k| k.0)),
        }
    }

    pub fn section7_constants(&self) -> Option<&Section7Constants> {
        match &self.kind {
            Kind::Section7(c) => Some(c),
            _ => None,
        }
    }

    /// Φ(t) for t ≥ 0.
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            Kind::Power { p } => t.powf(*p),
            Kind::LogPower { p0, gamma, value, slope } => {
                if t <= LOGPOWER_SWITCH {
                    t.powf(*p0) / (-t.ln()).powf(*gamma)
                } else {
                    value + slope * (t - LOGPOWER_SWITCH)
                }
            }
            Kind::Section7(c) => c.eval(t),
            Kind::Tabulated { knots } => tab_eval(knots, t),
        }
    }

    /// Φ⁻¹(u) for u ≥ 0.
    pub fn inverse(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            Kind::Power { p } => u.powf(1.0 / p),
            Kind::LogPower { value, slope, .. } => {
                if u <= *value {
                    self.ln_inverse(u.ln()).exp()
                } else {
                    LOGPOWER_SWITCH + (u - value) / slope
                }
            }
            Kind::Section7(c) => c.inverse(u),
            Kind::Tabulated { knots } => tab_inverse(knots, u),
        }
    }

    /// ln Φ(e^{lt}), usable far outside the range of `f64` arguments.
    pub fn ln_eval(&self, lt: f64) -> f64 {
        match &self.kind {
            Kind::Power { p } => p * lt,
            Kind::LogPower { p0, gamma, .. } if lt <= LOGPOWER_SWITCH.ln() => p0 * lt - gamma * (-lt).ln(),
            Kind::Section7(c) => c.ln_eval(lt),
            _ => self.eval(lt.exp()).ln(),
        }
    }

    /// ln Φ⁻¹(e^{lu}).
    pub fn ln_inverse(&self, lu: f64) -> f64 {
        match &self.kind {
            Kind::Power { p } => lu / p,
            Kind::LogPower { p0, gamma, value, .. } if lu <= value.ln() => {
                // h(l) = p0 l - γ ln(-l) is increasing on l < 0
                let g = |l: f64| (p0 * l - gamma * (-l).ln() - lu, p0 - gamma / l);
                let hi = LOGPOWER_SWITCH.ln();
                let lo = (lu / p0).min(-1.0) - 1.0;
                guarded_newton(g, lo, hi, (lu / p0).clamp(lo, hi), 1e-16)
            }
            Kind::Section7(c) => c.ln_inverse(lu),
            _ => self.inverse(lu.exp()).ln(),
        }
    }

    /// Right derivative Φ'(t).
    pub fn derivative(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Power { p } => p * t.powf(p - 1.0),
            Kind::LogPower { p0, gamma, slope, .. } => {
                if t <= 0.0 {
                    0.0
                } else if t < LOGPOWER_SWITCH {
                    let l = t.ln();
                    self.eval(t) * (p0 - gamma / l) / t
                } else {
                    *slope
                }
            }
            Kind::Section7(c) => {
                // Φ' = 1 / (Φ⁻¹)'(Φ(t))
                let u = self.eval(t);
                if u <= 0.0 {
                    return 0.0;
                }
                let lu = u.ln();
                let a = c.alpha;
                let dinv = if u < 1.0 / c.r {
                    let y = -0.5 * lu;
                    let ly = y.ln();
                    c.ln_inverse(lu).exp() / u * (1.0 - 0.5 * a * (ly - 1.0) / (ly * ly))
                } else if u < c.r {
                    c.p
                } else {
                    let y = 0.5 * lu;
                    let ly = y.ln();
                    c.ln_inverse(lu).exp() / u * (1.0 - 0.5 * a * (ly - 1.0) / (ly * ly))
                };
                1.0 / dinv
            }
            Kind::Tabulated { knots } => {
                let i = knots.partition_point(|k| k.0 <= t).clamp(1, knots.len() - 1);
                let (t0, u0) = knots[i - 1];
                let (t1, u1) = knots[i];
                (u1 - u0) / (t1 - t0)
            }
        }
    }
}

fn tab_eval(knots: &[(f64, f64)], t: f64) -> f64 {
    let n = knots.len();
    let i = knots.partition_point(|k| k.0 <= t).clamp(1, n - 1);
    let (t0, u0) = knots[i - 1];
    let (t1, u1) = knots[i];
    u0 + (u1 - u0) * (t - t0) / (t1 - t0)
}

fn tab_inverse(knots: &[(f64, f64)], u: f64) -> f64 {
    let n = knots.len();
    let i = knots.partition_point(|k| k.1 <= u).clamp(1, n - 1);
    let (t0, u0) = knots[i - 1];
    let (t1, u1) = knots[i];
    t0 + (t1 - t0) * (u - u0) / (u1 - u0)
}

/// Geometric grid of `n` points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && n >= 1);
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Largest |Φ(Φ⁻¹(u))/u − 1| over the grid.
pub fn roundtrip_error(phi: &YoungFunction, grid: &[f64]) -> f64 {
    grid.iter().map(|&u| (phi.eval(phi.inverse(u)) / u - 1.0).abs()).fold(0.0, f64::max)
}

/// Convexity on a grid: consecutive chord slopes must not decrease. Margin
/// per interior point is (s₂ − s₁)/max(|s₁|,|s₂|), so it is scale free.
pub fn check_convexity(phi: &YoungFunction, grid: &[f64], tolerance: f64) -> ConditionReport {
    let vals: Vec<f64> = grid.iter().map(|&t| phi.eval(t)).collect();
    let mut tested = Vec::new();
    let mut margins = Vec::new();
    for i in 1..grid.len().saturating_sub(1) {
        let s1 = (vals[i] - vals[i - 1]) / (grid[i] - grid[i - 1]);
        let s2 = (vals[i + 1] - vals[i]) / (grid[i + 1] - grid[i]);
        let scale = s1.abs().max(s2.abs()).max(f64::MIN_POSITIVE);
        tested.push(vec![grid[i - 1], grid[i], grid[i + 1]]);
        margins.push((s2 - s1) / scale);
    }
    ConditionReport::from_margins("convexity", tested, &margins, tolerance)
}

/// Midpoint concavity of x ↦ Φ(√x) on adjacent grid pairs (a, b): margin is
/// Φ(√((a+b)/2)) / ((Φ(√a)+Φ(√b))/2) − 1.
pub fn check_sqrt_concavity(phi: &YoungFunction, grid: &[f64]) -> ConditionReport {
    let mut tested = Vec::new();
    let mut margins = Vec::new();
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        let lhs = phi.eval((0.5 * (a + b)).sqrt());
        let rhs = 0.5 * (phi.eval(a.sqrt()) + phi.eval(b.sqrt()));
        tested.push(vec![a, b]);
        margins.push(lhs / rhs - 1.0);
    }
    ConditionReport::from_margins("sqrt-concavity", tested, &margins, 1e-12)
}

/// Positivity of the closed-form second derivative of (Φ⁻¹)² for the
/// three-branch example, at every grid point.
pub fn check_sq_inverse_curvature(phi: &YoungFunction, grid: &[f64]) -> Result<ConditionReport> {
    let c = phi.section7_constants().ok_or_else(|| invalid("curvature formulas exist for the section7 kind only"))?;
    let tested: Vec<Vec<f64>> = grid.iter().map(|&x| vec![x]).collect();
    let margins: Vec<f64> = grid.iter().map(|&x| c.sq_inverse_second_derivative(x)).collect();
    Ok(ConditionReport::from_margins("sq-inverse-curvature", tested, &margins, 0.0))
}

/// Admissible pairs 0 < a < 1 ≤ ab < b: `a` on a geometric grid in
/// [a_min, a_max] and the product ab on a geometric grid in [1, prod_max].
pub fn admissible_pairs(a_min: f64, a_max: f64, n_a: usize, prod_max: f64, n_prod: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n_a * n_prod);
    for &a in &log_grid(a_min, a_max, n_a) {
        for &m in &log_grid(1.0, prod_max, n_prod) {
            out.push((a, m / a));
        }
    }
    out
}

/// Restricted supermultiplicativity Φ(a)Φ(b) ≤ Φ(Cab). Margin is the log
/// ratio ln Φ(Cab) − ln Φ(a) − ln Φ(b), computed in log space so that large
/// C·a·b cannot overflow.
pub fn check_supermultiplicativity(phi: &YoungFunction, c: f64, pairs: &[(f64, f64)]) -> Result<ConditionReport> {
    if !(c >= 1.0) {
        return Err(invalid(format!("constant C must be at least 1, got {c}")));
    }
    let mut tested = Vec::with_capacity(pairs.len());
    let mut margins = Vec::with_capacity(pairs.len());
    for &(a, b) in pairs {
        if !(a > 0.0 && a < 1.0 && a * b >= 1.0 * (1.0 - 1e-15) && a * b < b) {
            return Err(invalid(format!("pair ({a}, {b}) violates 0 < a < 1 ≤ ab < b")));
        }
        let (la, lb) = (a.ln(), b.ln());
        let lhs = phi.ln_eval(la) + phi.ln_eval(lb);
        let rhs = phi.ln_eval(c.ln() + la + lb);
        tested.push(vec![a, b]);
        margins.push(rhs - lhs);
    }
    Ok(ConditionReport::from_margins("supermultiplicativity", tested, &margins, 1e-12))
}

/// 1 ≤ C Φ⁻¹(x) Φ⁻¹(1/x); margin is C Φ⁻¹(x) Φ⁻¹(1/x) − 1.
pub fn check_inverse_product(phi: &YoungFunction, c: f64, grid: &[f64]) -> Result<ConditionReport> {
    if !(c >= 1.0) {
        return Err(invalid(format!("constant C must be at least 1, got {c}")));
    }
    let tested: Vec<Vec<f64>> = grid.iter().map(|&x| vec![x]).collect();
    let margins: Vec<f64> = grid
        .iter()
        .map(|&x| {
            let lx = x.ln();
            (c.ln() + phi.ln_inverse(lx) + phi.ln_inverse(-lx)).exp() - 1.0
        })
        .collect();
    Ok(ConditionReport::from_margins("inverse-product", tested, &margins, 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn power_closed_forms() {
        let phi = YoungFunction::power(2.0).unwrap();
        assert_eq!(phi.eval(3.0), 9.0);
        assert_eq!(phi.inverse(4.0), 2.0);
        let phi = YoungFunction::power(1.5).unwrap();
        assert!(close(phi.eval(phi.inverse(7.0)), 7.0, 1e-10));
        assert!(YoungFunction::power(1.0).is_err());
        assert!(YoungFunction::power(0.5).is_err());
    }

    #[test]
    fn logpower_values() {
        let phi = YoungFunction::logpower(1.0, 1.0).unwrap();
        let e = std::f64::consts::E;
        assert!(close(phi.eval(1.0 / e), 1.0 / e, 1e-15));
        assert_eq!(phi.eval(0.0), 0.0);
        let phi = YoungFunction::logpower(1.2, 1.3).unwrap();
        assert!(close(phi.inverse(phi.eval(0.3)), 0.3, 1e-12));
        assert!(YoungFunction::logpower(0.9, 1.0).is_err());
        assert!(YoungFunction::logpower(1.0, 0.0).is_err());
    }

    #[test]
    fn logpower_inverse_against_scan() {
        // independent oracle: scan t on a fine grid and interpolate
        let phi = YoungFunction::logpower(1.2, 1.3).unwrap();
        let target = phi.eval(0.3);
        let n = 1_000_000;
        let mut prev = (0.0, 0.0);
        let mut found = f64::NAN;
        for i in 1..=n {
            let t = 0.5 * i as f64 / n as f64;
            let v = t.powf(1.2) / (-t.ln()).powf(1.3);
            if v >= target {
                found = prev.0 + (t - prev.0) * (target - prev.1) / (v - prev.1);
                break;
            }
            prev = (t, v);
        }
        assert!((phi.inverse(target) - found).abs() < 1e-9);
    }

    #[test]
    fn logpower_extension_is_continuous_and_convex() {
        let phi = YoungFunction::logpower(1.0, 1.0).unwrap();
        let s = LOGPOWER_SWITCH;
        assert!(close(phi.eval(s + 1e-12), phi.eval(s), 1e-10));
        let rep = check_convexity(&phi, &log_grid(1e-6, 10.0, 2000), 1e-9);
        assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn section7_constants() {
        let c = Section7Constants::new(0.05);
        let e = std::f64::consts::E;
        assert!(close(c.r, (2.0 * e * e).exp(), 1e-14));
        assert!((c.r - 2618500.01351046770).abs() < 1e-6);
        assert!(c.p > 1.0 / (2.0 * e) && c.p < 1.0);
        assert!(c.q > 0.0 && c.q <= 10.0 / c.r * c.p);
        assert!(close(c.p, 0.831331703037835975, 1e-12));
        assert!(close(c.q, 1.4189711002984e-7, 1e-9));
        assert!(c.alpha * c.ln_r / c.ln_r.ln() <= 1.0);
    }

    #[test]
    fn section7_inverse_is_continuous() {
        let phi = YoungFunction::section7(0.05).unwrap();
        let c = *phi.section7_constants().unwrap();
        for &x in &[1.0 / c.r, c.r] {
            let left = phi.inverse(x * (1.0 - 1e-15));
            let right = phi.inverse(x);
            assert!(close(left, right, 1e-12), "{x}: {left} vs {right}");
        }
        let x = c.r * c.r;
        assert!(close(phi.inverse(x) * phi.inverse(1.0 / x), 1.0, 1e-12));
    }

    #[test]
    fn section7_rejects_bad_alpha() {
        assert!(YoungFunction::section7(0.0).is_err());
        assert!(YoungFunction::section7(0.2).is_err());
    }

    #[test]
    fn roundtrip_all_kinds() {
        let grid = log_grid(1e-12, 1e12, 1000);
        let kinds = [
            YoungFunction::power(1.5).unwrap(),
            YoungFunction::power(3.0).unwrap(),
            YoungFunction::logpower(1.0, 1.0).unwrap(),
            YoungFunction::logpower(1.2, 1.5).unwrap(),
            YoungFunction::section7(0.05).unwrap(),
            YoungFunction::section7(0.1).unwrap(),
            YoungFunction::tabulated(vec![(1.0, 0.5), (2.0, 2.0), (3.0, 5.0)]).unwrap(),
        ];
        for phi in &kinds {
            let e = roundtrip_error(phi, &grid);
            assert!(e <= 1e-9, "{}: {e}", phi.kind_name());
        }
    }

    #[test]
    fn section7_far_arguments_in_log_space() {
        let phi = YoungFunction::section7(0.05).unwrap();
        for &lt in &[-2000.0, -50.0, 50.0, 2000.0] {
            let lu = phi.ln_eval(lt);
            assert!((phi.ln_inverse(lu) - lt).abs() < 1e-12 * lt.abs());
        }
    }

    #[test]
    fn convexity_all_kinds() {
        let grid = log_grid(1e-8, 1e8, 3000);
        for phi in [
            YoungFunction::power(1.5).unwrap(),
            YoungFunction::logpower(1.0, 2.0).unwrap(),
            YoungFunction::section7(0.05).unwrap(),
        ] {
            let rep = check_convexity(&phi, &grid, 1e-9);
            assert!(rep.passed, "{} {:?}", phi.kind_name(), rep.witness);
        }
    }

    #[test]
    fn phi_over_t_tends_to_zero() {
        let p2 = YoungFunction::power(2.0).unwrap();
        assert!(p2.eval(1e-8) / 1e-8 < 1e-4);
        for phi in [
            YoungFunction::power(1.5).unwrap(),
            YoungFunction::logpower(1.0, 1.0).unwrap(),
            YoungFunction::section7(0.05).unwrap(),
        ] {
            let ladder: Vec<f64> = [1e-4, 1e-8, 1e-16, 1e-64].iter().map(|&t| phi.eval(t) / t).collect();
            assert!(ladder.windows(2).all(|w| w[1] < w[0]), "{} {ladder:?}", phi.kind_name());
        }
    }

    #[test]
    fn tabulated_validation() {
        assert!(YoungFunction::tabulated(vec![]).is_err());
        assert!(YoungFunction::tabulated(vec![(1.0, 2.0), (2.0, 3.0)]).is_err());
        let phi = YoungFunction::tabulated(vec![(1.0, 1.0), (2.0, 3.0)]).unwrap();
        assert_eq!(phi.eval(0.5), 0.5);
        assert_eq!(phi.eval(3.0), 5.0);
        assert_eq!(phi.inverse(5.0), 3.0);
    }

    #[test]
    fn spec_round_trip_json() {
        let phi = YoungFunction::section7(0.05).unwrap();
        let s = serde_json::to_string(&phi).unwrap();
        assert_eq!(s, r#"{"kind":"section7","params":{"alpha":0.05}}"#);
        let back: YoungFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, phi);
        assert!(serde_json::from_str::<YoungFunction>(r#"{"kind":"power","params":{"p":0.5}}"#).is_err());
    }

    #[test]
    fn sqrt_concavity_examples() {
        let grid = log_grid(1e-8, 1e8, 400);
        let r = check_sqrt_concavity(&YoungFunction::power(2.0).unwrap(), &grid);
        assert!(r.passed && r.worst_margin.abs() < 1e-14);
        let r = check_sqrt_concavity(&YoungFunction::power(3.0).unwrap(), &grid);
        assert!(!r.passed);
        let r = check_sqrt_concavity(&YoungFunction::section7(0.05).unwrap(), &grid);
        assert!(r.passed, "{:?} {}", r.witness, r.worst_margin);
    }

    #[test]
    fn curvature_formula_matches_finite_differences() {
        let phi = YoungFunction::section7(0.05).unwrap();
        let c = *phi.section7_constants().unwrap();
        let f = |x: f64| phi.inverse(x).powi(2);
        for &x in &[1e-12, 1e-9, 1e-7, 1.0, 1e3, 1e8, 1e11] {
            let h = x * 1e-3;
            let fd = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
            let exact = c.sq_inverse_second_derivative(x);
            assert!(close(fd, exact, 1e-4), "{x}: {fd} vs {exact}");
        }
        assert!(close(c.sq_inverse_second_derivative(1e-9), 3.05819616, 1e-8));
        assert!(close(c.sq_inverse_second_derivative(1e9), 1.26057085, 1e-8));
    }

    #[test]
    fn supermultiplicativity_examples() {
        let pairs = admissible_pairs(1e-6, 0.9, 20, 1e6, 20);
        let r = check_supermultiplicativity(&YoungFunction::power(2.5).unwrap(), 1.0, &pairs).unwrap();
        assert!(r.passed && r.worst_margin.abs() < 1e-9);
        let phi = YoungFunction::section7(0.05).unwrap();
        let c = phi.section7_constants().unwrap().r;
        let pairs = admissible_pairs(1e-12, 0.999, 40, 1e12, 40);
        let r = check_supermultiplicativity(&phi, c, &pairs).unwrap();
        assert!(r.passed, "{:?} {}", r.witness, r.worst_margin);
        assert!(check_supermultiplicativity(&phi, c, &[(2.0, 3.0)]).is_err());
        assert!(check_supermultiplicativity(&phi, 0.5, &pairs).is_err());
    }

    #[test]
    fn inverse_product_examples() {
        let grid = log_grid(1e-6, 1e6, 101);
        let r = check_inverse_product(&YoungFunction::power(3.0).unwrap(), 1.0, &grid).unwrap();
        assert!(r.passed && r.worst_margin.abs() < 1e-12);
        let phi = YoungFunction::section7(0.05).unwrap();
        let rr = phi.section7_constants().unwrap().r;
        let r = check_inverse_product(&phi, 1.0, &log_grid(rr * rr, rr.powi(4), 50)).unwrap();
        assert!(r.passed && r.worst_margin.abs() < 1e-12);
        let r = check_inverse_product(&phi, rr, &log_grid(1e-20, 1e20, 400)).unwrap();
        assert!(r.passed);
        let r = check_inverse_product(&YoungFunction::logpower(1.2, 1.5).unwrap(), 4.0, &grid).unwrap();
        assert!(r.worst_margin.is_finite());
    }
}
