//! Tuner-produced parameter sets shipped with the crate.
//!
//! The JSON files under `params/` are outputs of `mcan tune` (seed 0,
//! default configuration); regenerate them with the CLI after changing the
//! dynamics.

use crate::tuning::Genome;

/// Tuned genome for the 2D multiscale stack.
pub fn genome_2d() -> Genome {
    parse(include_str!("../params/genome_2d.json"))
}

/// Tuned genome for the 360-neuron head-direction ring.
pub fn genome_1d() -> Genome {
    parse(include_str!("../params/genome_1d.json"))
}

/// Tuned genome for the equal-neuron single-scale baseline.
pub fn genome_single() -> Genome {
    parse(include_str!("../params/genome_single.json"))
}

fn parse(json: &str) -> Genome {
    serde_json::from_str(json).expect("shipped genome files are valid")
}
