//! Shared inputs for the benchmarks in `benches/`.

use std::sync::Arc;

use arsel_core::ProcessSpec;

/// A path from the `m = 5` design.
pub fn mdep_path(n: usize, run_id: u64) -> Vec<f64> {
    Arc::new(ProcessSpec::mdep_design(5).expect("valid design"))
        .simulate(n, 1, run_id)
        .expect("simulation succeeds")
        .values()
        .to_vec()
}
