//! Shared fixtures for the criterion benchmarks.

use ctn_core::clifford::random_clifford;
use ctn_core::experiments::realization_rng;
use ctn_core::{Cooler, CoolingPolicy, CtnState, Pauli, TruncationPolicy};
use rand::Rng;

/// A doped state after `t` T gates with exact+heuristic cooling.
pub fn doped_state(n: usize, t: usize, seed: u64) -> CtnState {
    let mut rng = realization_rng(seed, 0);
    let cooler = Cooler::new(CoolingPolicy::exact_then_heuristic(2, 2).expect("valid policy")).expect("table builds");
    let mut state = CtnState::new(n, TruncationPolicy::exact()).expect("n >= 2");
    for _ in 0..t {
        state.apply_clifford(&random_clifford(n, &mut rng)).expect("sizes match");
        let site = rng.gen_range(0..n);
        state.apply_rotation(std::f64::consts::FRAC_PI_4, Pauli::Z, site, &cooler).expect("valid rotation");
    }
    state
}
