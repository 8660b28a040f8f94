//! Sweep descriptions and the config file that holds them.
//!
//! A sweep file is a set of named sections, one sweep each:
//!
//! ```toml
//! [retrieval_small]
//! experiment = "retrieval"
//! clusters = 4
//! fanals = 128
//! messages = [500, 1000, 2000]
//! erased = 1
//! iterations = 1
//! trials = 2000
//! seed = 7
//! ```
//!
//! Grid keys accept a single value or a list.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Density,
    Accept,
    Ratio,
    Retrieval,
    Capacity,
    HopfieldBaseline,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::Density,
        ExperimentKind::Accept,
        ExperimentKind::Ratio,
        ExperimentKind::Retrieval,
        ExperimentKind::Capacity,
        ExperimentKind::HopfieldBaseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Density => "density",
            ExperimentKind::Accept => "accept",
            ExperimentKind::Ratio => "ratio",
            ExperimentKind::Retrieval => "retrieval",
            ExperimentKind::Capacity => "capacity",
            ExperimentKind::HopfieldBaseline => "hopfield_baseline",
        }
    }

    /// Stable id mixed into every random stream of the experiment.
    pub(crate) fn stream_id(self) -> u64 {
        match self {
            ExperimentKind::Density => 1,
            ExperimentKind::Accept => 2,
            ExperimentKind::Ratio => 3,
            ExperimentKind::Retrieval => 4,
            ExperimentKind::Capacity => 5,
            ExperimentKind::HopfieldBaseline => 6,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Format(format!("unknown experiment {s:?}")))
    }
}

/// One Monte Carlo sweep.
///
/// Grid points are the cartesian product of `clusters × fanals × messages`
/// (or `neurons × messages` for the Hopfield baseline). `iterations` is an
/// inner dimension: all iteration counts of a point share the same network
/// and the same probes.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub experiment: ExperimentKind,
    pub clusters: Vec<usize>,
    pub fanals: Vec<usize>,
    pub messages: Vec<u64>,
    /// Erased clusters per retrieval probe (`c_e`).
    pub erased: usize,
    pub gamma: u32,
    /// Activation threshold; `None` picks `c` for classification sweeps and 0 otherwise.
    pub sigma: Option<i64>,
    pub iterations: Vec<usize>,
    /// Probes per grid point. For `density` and `hopfield_baseline` this is
    /// the number of independently learnt networks instead.
    pub trials: u64,
    pub seed: u64,
    /// Target retrieval error for `capacity`.
    pub target_error: f64,
    /// Network sizes for `hopfield_baseline`.
    pub neurons: Vec<usize>,
    /// Fill the `wall_ms` column. Off by default so output is reproducible byte for byte.
    pub timing: bool,
}

impl SweepSpec {
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            clusters: vec![4],
            fanals: vec![64],
            messages: vec![1000],
            erased: 1,
            gamma: 1,
            sigma: None,
            iterations: vec![1],
            trials: 2000,
            seed: 1,
            target_error: 0.01,
            neurons: vec![740],
            timing: false,
        }
    }

    /// Threshold used for a network with `clusters` clusters.
    pub fn sigma_for(&self, clusters: usize) -> i64 {
        self.sigma.unwrap_or(match self.experiment {
            ExperimentKind::Accept | ExperimentKind::Ratio => clusters as i64,
            _ => 0,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Format(format!("{}: {msg}", self.experiment)));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.messages.is_empty() && self.experiment != ExperimentKind::Capacity {
            return bad("messages grid is empty".into());
        }
        if self.iterations.is_empty() || self.iterations.contains(&0) {
            return bad("iterations must be a non-empty list of positive counts".into());
        }
        if self.experiment == ExperimentKind::HopfieldBaseline {
            if self.neurons.is_empty() || self.neurons.iter().any(|&n| n < 2) {
                return bad("neurons grid must be non-empty with n >= 2".into());
            }
            return Ok(());
        }
        if self.clusters.is_empty() || self.fanals.is_empty() {
            return bad("topology grid is empty".into());
        }
        for &c in &self.clusters {
            for &l in &self.fanals {
                crate::clique::ClusterTopology::new(c, l)
                    .map_err(|e| Error::Format(format!("{}: {e}", self.experiment)))?;
            }
        }
        if matches!(
            self.experiment,
            ExperimentKind::Retrieval | ExperimentKind::Capacity
        ) {
            if self.messages.contains(&0) {
                return bad("retrieval needs at least one learnt message per point".into());
            }
            let min_c = *self.clusters.iter().min().unwrap();
            if self.erased == 0 || self.erased >= min_c {
                return bad(format!(
                    "erased clusters must satisfy 1 <= c_e < c (c_e={}, smallest c={min_c})",
                    self.erased
                ));
            }
        }
        if self.experiment == ExperimentKind::Capacity
            && !(self.target_error > 0.0 && self.target_error < 1.0)
        {
            return bad("target_error must be in (0,1)".into());
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SectionFile {
    experiment: ExperimentKind,
    clusters: Option<OneOrMany<usize>>,
    fanals: Option<OneOrMany<usize>>,
    messages: Option<OneOrMany<u64>>,
    erased: Option<usize>,
    gamma: Option<u32>,
    sigma: Option<i64>,
    iterations: Option<OneOrMany<usize>>,
    trials: Option<u64>,
    seed: Option<u64>,
    target_error: Option<f64>,
    neurons: Option<OneOrMany<usize>>,
    timing: Option<bool>,
}

impl From<SectionFile> for SweepSpec {
    fn from(f: SectionFile) -> Self {
        let mut s = SweepSpec::new(f.experiment);
        if let Some(v) = f.clusters {
            s.clusters = v.into_vec();
        }
        if let Some(v) = f.fanals {
            s.fanals = v.into_vec();
        }
        if let Some(v) = f.messages {
            s.messages = v.into_vec();
        }
        if let Some(v) = f.iterations {
            s.iterations = v.into_vec();
        }
        if let Some(v) = f.neurons {
            s.neurons = v.into_vec();
        }
        s.erased = f.erased.unwrap_or(s.erased);
        s.gamma = f.gamma.unwrap_or(s.gamma);
        s.sigma = f.sigma.or(s.sigma);
        s.trials = f.trials.unwrap_or(s.trials);
        s.seed = f.seed.unwrap_or(s.seed);
        s.target_error = f.target_error.unwrap_or(s.target_error);
        s.timing = f.timing.unwrap_or(s.timing);
        s
    }
}

/// Parses a sweep file into `(section name, spec)` pairs in file order.
pub fn parse_sweep_file(text: &str) -> Result<Vec<(String, SweepSpec)>> {
    let table: toml::Table =
        toml::from_str(text).map_err(|e| Error::Format(format!("sweep file: {e}")))?;
    let mut out = Vec::new();
    for (name, value) in table {
        let section: SectionFile = value
            .try_into()
            .map_err(|e| Error::Format(format!("section [{name}]: {e}")))?;
        let spec = SweepSpec::from(section);
        spec.validate()
            .map_err(|e| Error::Format(format!("section [{name}]: {e}")))?;
        out.push((name, spec));
    }
    if out.is_empty() {
        return Err(Error::Format("sweep file has no sections".into()));
    }
    Ok(out)
}

/// Built-in sweeps. Desk-scale by default; `full` switches to clusters of
/// up to 512 fanals and more trials where the runtime allows.
pub fn preset(name: &str, full: bool) -> Result<Vec<(String, SweepSpec)>> {
    use ExperimentKind::*;
    let mut out = Vec::new();
    match name {
        "density" => {
            let sizes: &[usize] = if full { &[64, 128, 256, 512] } else { &[64, 128, 256] };
            for &l in sizes {
                let mut s = SweepSpec::new(Density);
                s.fanals = vec![l];
                let l2 = (l * l) as u64;
                s.messages = vec![0, l2 / 32, l2 / 16, l2 / 8, l2 / 4, 3 * l2 / 8, l2 / 2];
                s.trials = if full && l == 512 { 200 } else { 2000 };
                out.push((format!("density_l{l}"), s));
            }
        }
        "accept" => {
            let l = if full { 512 } else { 64 };
            let mut s = SweepSpec::new(Accept);
            s.clusters = vec![4, 6, 8];
            s.fanals = vec![l];
            s.messages = load_grid(l, &[0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5]);
            s.trials = 20_000;
            out.push(("accept".into(), s));
        }
        "ratio" => {
            let mut s = SweepSpec::new(Ratio);
            s.clusters = vec![4, 6, 8];
            s.fanals = if full { vec![256, 512] } else { vec![64, 128] };
            let base = s.fanals[0];
            s.messages = load_grid(base, &[0.5, 1.0, 1.5, 2.0]);
            s.trials = 20_000;
            out.push(("ratio".into(), s));
        }
        "retrieval" => {
            let l = if full { 512 } else { 128 };
            let mut s = SweepSpec::new(Retrieval);
            s.clusters = vec![4];
            s.fanals = vec![l];
            s.messages = load_grid(l, &[0.01, 0.02, 0.04, 0.08, 0.12, 0.16, 0.2]);
            s.erased = 1;
            s.trials = 5000;
            out.push(("retrieval_ce1".into(), s));
        }
        "retrieval_iter" => {
            let mut s = SweepSpec::new(Retrieval);
            s.clusters = vec![8];
            s.fanals = vec![256];
            s.messages = vec![5000, 10_000, 15_000, 20_000, 25_000];
            s.erased = 4;
            s.iterations = vec![1, 4];
            s.trials = if full { 10_000 } else { 2000 };
            out.push(("retrieval_ce4".into(), s));
        }
        "capacity" => {
            let mut s = SweepSpec::new(Capacity);
            s.clusters = vec![8];
            s.fanals = if full { vec![32, 64, 128, 256, 512] } else { vec![32, 64, 128, 256] };
            s.messages = Vec::new();
            s.erased = 1;
            s.trials = 2000;
            s.target_error = 0.01;
            out.push(("capacity".into(), s));
        }
        "hopfield" => {
            for (n, m) in [(740usize, 56u64), (790, 60)] {
                let mut s = SweepSpec::new(HopfieldBaseline);
                s.neurons = vec![n];
                s.messages = vec![m];
                s.trials = if full { 200 } else { 40 };
                out.push((format!("hopfield_n{n}"), s));
            }
        }
        other => {
            return Err(Error::Format(format!(
                "unknown preset {other:?} ({})",
                PRESETS.join(", ")
            )))
        }
    }
    Ok(out)
}

pub const PRESETS: [&str; 7] = [
    "density",
    "accept",
    "ratio",
    "retrieval",
    "retrieval_iter",
    "capacity",
    "hopfield",
];

/// Message counts `f · l²` for each load factor `f`.
fn load_grid(l: usize, loads: &[f64]) -> Vec<u64> {
    loads
        .iter()
        .map(|f| (f * (l * l) as f64).round() as u64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_sections_in_order() {
        let text = r#"
[b_second]
experiment = "retrieval"
clusters = [4, 6]
fanals = 128
messages = [500, 1000]
erased = 1
iterations = [1, 4]
trials = 300
seed = 9

[a_first]
experiment = "density"
messages = 0
"#;
        let specs = parse_sweep_file(text).unwrap();
        assert_eq!(specs[0].0, "b_second");
        assert_eq!(specs[1].0, "a_first");
        let s = &specs[0].1;
        assert_eq!(s.experiment, ExperimentKind::Retrieval);
        assert_eq!(s.clusters, vec![4, 6]);
        assert_eq!(s.fanals, vec![128]);
        assert_eq!(s.iterations, vec![1, 4]);
        assert_eq!(s.trials, 300);
        assert_eq!(s.seed, 9);
        assert_eq!(specs[1].1.messages, vec![0]);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(parse_sweep_file("").is_err());
        assert!(parse_sweep_file("[x]\nexperiment = \"nope\"\n").is_err());
        assert!(parse_sweep_file("[x]\nexperiment = \"density\"\nbogus = 1\n").is_err());
        assert!(parse_sweep_file("[x]\nexperiment = \"density\"\ntrials = 0\n").is_err());
        assert!(parse_sweep_file("[x]\nexperiment = \"density\"\nfanals = 12\n").is_err());
        assert!(parse_sweep_file("[x]\nexperiment = \"density\"\nmessages = []\n").is_err());
        assert!(parse_sweep_file("[x]\nexperiment = \"retrieval\"\nerased = 4\n").is_err());
    }

    #[test]
    fn presets_validate() {
        for name in PRESETS {
            for full in [false, true] {
                for (_, s) in preset(name, full).unwrap() {
                    s.validate().unwrap();
                }
            }
        }
        assert!(preset("nope", false).is_err());
    }

    #[test]
    fn sigma_defaults() {
        assert_eq!(SweepSpec::new(ExperimentKind::Accept).sigma_for(6), 6);
        assert_eq!(SweepSpec::new(ExperimentKind::Retrieval).sigma_for(6), 0);
    }
}
