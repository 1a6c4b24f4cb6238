//! Shared fixtures for the criterion benchmarks.

use loynes::{sample_dm1, sample_two_state, Dm1Spec, Trace, TwoStateSpec};

/// D/M/1 increments at the reference load `alpha = 1`, `beta = 10/11`.
pub fn dm1_trace(n: usize, seed: u64) -> Trace {
    sample_dm1(&Dm1Spec::new(1.0, 10.0 / 11.0, n, seed)).expect("valid spec")
}

/// Two-state chain with `alpha = 1/16`, `beta = 3/16`.
pub fn two_state_trace(n: usize, seed: u64) -> Trace {
    sample_two_state(&TwoStateSpec::new(1.0 / 16.0, 3.0 / 16.0, n, seed)).expect("valid spec")
}
