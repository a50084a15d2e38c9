//! Special functions needed by the checks.

use std::f64::consts::PI;

// B_{2j}/(2j)! for j = 1..=7
const BERNOULLI_OVER_FACTORIAL: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
];

/// ζ(1 + t) for t > 0 by Euler–Maclaurin summation. Taking the offset t
/// keeps full relative accuracy near the pole.
pub fn zeta_1p(t: f64) -> f64 {
    if !(t > 0.0) {
        return f64::NAN;
    }
    let s = 1.0 + t;
    const N: usize = 12;
    let nf = N as f64;
    let mut sum: f64 = (1..N).map(|k| (k as f64).powf(-s)).sum();
    // N^{1−s}/(s−1) + N^{−s}/2
    sum += (-t * nf.ln()).exp() / t + 0.5 * nf.powf(-s);
    // Σ B_{2j}/(2j)! · s(s+1)…(s+2j−2) · N^{−s−2j+1}
    let mut rising = s;
    let mut power = nf.powf(-s - 1.0);
    for (j, b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        sum += b * rising * power;
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        power /= nf * nf;
    }
    sum
}

pub fn zeta(s: f64) -> f64 {
    zeta_1p(s - 1.0)
}

/// Volume of the unit ball in ℝ^d: V_0 = 1, V_1 = 2, V_d = 2π/d · V_{d−2}.
pub fn unit_ball_volume(d: u32) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        d => 2.0 * PI / d as f64 * unit_ball_volume(d - 2),
    }
}
