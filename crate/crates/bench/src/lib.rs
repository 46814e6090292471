//! Shared fixtures for the benchmarks.

use bnsl::reference::{alarm, learning_test};
use bnsl::Dataset;

/// The six-node reference network, 5000 rows.
pub fn small() -> Dataset {
    learning_test(5000, 1).expect("reference sample")
}

/// The 37-node ALARM network, `n` rows.
pub fn large(n: usize) -> Dataset {
    alarm(n, 1).expect("alarm sample")
}
