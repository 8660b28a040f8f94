//! One measured or computed point of a sweep, and its CSV form.

use std::io::Write;

use serde::Serialize;

use super::spec::ExperimentKind;
use super::stats::{wilson_half_width, within_wilson, Z95};
use crate::error::Result;

/// A row of sweep output. Field order is the CSV column order.
///
/// Simulated rows carry `trials`, `successes`, `estimate` and the 95% Wilson
/// half-width; formula-only rows have `trials = 0` and leave those empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub experiment: ExperimentKind,
    pub quantity: &'static str,
    pub clusters: Option<usize>,
    pub fanals: Option<usize>,
    pub neurons: usize,
    pub messages: u64,
    pub erased: Option<usize>,
    pub iterations: Option<usize>,
    pub sigma: Option<i64>,
    pub gamma: Option<u32>,
    pub trials: u64,
    pub successes: u64,
    pub estimate: Option<f64>,
    pub half_width: Option<f64>,
    pub theory: Option<f64>,
    pub density: Option<f64>,
    /// Quantity computed from `estimate`, such as a ratio or a capacity in bits.
    pub derived: Option<f64>,
    pub derived_theory: Option<f64>,
    pub memory_bits: Option<f64>,
    pub wall_ms: Option<u64>,
}

impl SweepRecord {
    pub(crate) fn new(experiment: ExperimentKind, quantity: &'static str, neurons: usize) -> Self {
        Self {
            experiment,
            quantity,
            clusters: None,
            fanals: None,
            neurons,
            messages: 0,
            erased: None,
            iterations: None,
            sigma: None,
            gamma: None,
            trials: 0,
            successes: 0,
            estimate: None,
            half_width: None,
            theory: None,
            density: None,
            derived: None,
            derived_theory: None,
            memory_bits: None,
            wall_ms: None,
        }
    }

    pub(crate) fn topology(mut self, clusters: usize, fanals: usize) -> Self {
        self.clusters = Some(clusters);
        self.fanals = Some(fanals);
        self
    }

    /// Sets the counts and the estimate and half-width derived from them.
    pub(crate) fn counts(mut self, successes: u64, trials: u64) -> Self {
        self.trials = trials;
        self.successes = successes;
        if trials > 0 {
            self.estimate = Some(successes as f64 / trials as f64);
            self.half_width = Some(wilson_half_width(successes, trials, Z95));
        }
        self
    }

    /// True if the theory value lies inside the Wilson interval at `z`.
    /// Rows without a simulation or a theory value count as consistent.
    pub fn consistent_with_theory(&self, z: f64) -> bool {
        match self.theory {
            Some(t) if self.trials > 0 => within_wilson(self.successes, self.trials, t, z),
            _ => true,
        }
    }
}

/// Writes records as CSV with a header row.
pub fn write_csv<W: Write>(records: &[SweepRecord], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    if records.is_empty() {
        wtr.write_record(HEADER)?;
    }
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Renders records as a CSV string.
pub fn to_csv_string(records: &[SweepRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

pub const HEADER: [&str; 20] = [
    "experiment",
    "quantity",
    "clusters",
    "fanals",
    "neurons",
    "messages",
    "erased",
    "iterations",
    "sigma",
    "gamma",
    "trials",
    "successes",
    "estimate",
    "half_width",
    "theory",
    "density",
    "derived",
    "derived_theory",
    "memory_bits",
    "wall_ms",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_matches_fields() {
        let r = SweepRecord::new(ExperimentKind::Density, "density", 256)
            .topology(4, 64)
            .counts(1, 4);
        let text = to_csv_string(&[r]).unwrap();
        let first = text.lines().next().unwrap();
        assert_eq!(first, HEADER.join(","));
        assert_eq!(to_csv_string(&[]).unwrap().trim_end(), HEADER.join(","));
    }

    #[test]
    fn counts_fill_estimate() {
        let r = SweepRecord::new(ExperimentKind::Accept, "accept", 256).counts(10, 100);
        assert_eq!(r.estimate, Some(0.1));
        let hw = r.half_width.unwrap();
        assert!((hw - 0.0596).abs() < 1e-3, "{hw}");
        let mut r = r;
        r.theory = Some(0.11);
        assert!(r.consistent_with_theory(3.0));
        r.theory = Some(0.3);
        assert!(!r.consistent_with_theory(3.0));
        let empty = SweepRecord::new(ExperimentKind::Accept, "accept", 256).counts(0, 0);
        assert_eq!(empty.estimate, None);
    }
}
