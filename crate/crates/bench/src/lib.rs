//! Shared inputs for the benchmarks in `benches/`.

use orlicz::sampling::random_poly_on_frame;
use orlicz::{CoefficientLaw, TrigPoly, Weight, YoungFunction};

pub const SEED: u64 = 20240531;

pub fn example_phi() -> YoungFunction {
    YoungFunction::section7(0.05).expect("valid α")
}

pub fn example_weight() -> Weight {
    Weight::inverse_square_over_t(&example_phi(), 1.0).expect("valid weight")
}

pub fn frame_poly(level: u32) -> TrigPoly {
    random_poly_on_frame(level, SEED, CoefficientLaw::Gaussian).expect("valid level")
}

/// Deterministic sequence with entries of mixed sign and size.
pub fn sequence(len: usize) -> Vec<f64> {
    (0..len).map(|i| ((i as f64 + 1.0) * 0.7).sin() * (1.0 + i as f64).sqrt()).collect()
}
