//! Seeded Monte Carlo sweeps with closed-form overlays.
//!
//! A [`SweepSpec`] describes a grid of network configurations; [`run`]
//! produces one [`SweepRecord`] per measured or computed point. Output for a
//! given spec is byte-identical across runs and thread counts unless timing
//! is switched on.

mod record;
mod runners;
mod spec;
pub mod stats;
pub mod svg;

pub use record::{to_csv_string, write_csv, SweepRecord, HEADER};
pub use runners::{
    hnn_neurons_for_memory, learn_random, random_pattern, run, run_accept, run_capacity,
    run_density, run_hopfield_baseline, run_ratio, run_retrieval, stream,
    theory_capacity_messages, EXHAUSTIVE_MAX_BITS,
};
pub use spec::{parse_sweep_file, preset, ExperimentKind, SweepSpec, PRESETS};
