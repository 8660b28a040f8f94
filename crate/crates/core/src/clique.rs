//! The clustered clique network.
//!
//! `n = c·l` binary fanals are split into `c` clusters of `l` fanals each. A
//! message of `k = c·κ` bits (with `κ = log2 l`) selects one fanal per cluster,
//! and learning it fully interconnects those `c` fanals. Connections are
//! binary and never link two fanals of the same cluster.
//!
//! Retrieval runs the iterative message-passing loop: every fanal sums the
//! signals it receives from active fanals of other clusters plus a memory
//! term `γ·v` for its own activity, then each cluster keeps only the fanals
//! reaching its maximum score (if that maximum reaches the threshold `σ`).

use std::fmt;

use crate::error::{Error, Result};

/// Shape of a clustered network: `c` clusters of `l` fanals, `l` a power of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClusterTopology {
    clusters: usize,
    fanals: usize,
    bits_per_cluster: u32,
}

impl ClusterTopology {
    /// Validates and builds a topology. `clusters ≥ 2`; `fanals ≥ 2` and an
    /// exact power of two.
    pub fn new(clusters: usize, fanals: usize) -> Result<Self> {
        if clusters < 2 {
            return Err(Error::Topology(format!(
                "need at least 2 clusters, got {clusters}"
            )));
        }
        if fanals < 2 || !fanals.is_power_of_two() {
            return Err(Error::Topology(format!(
                "fanals per cluster must be a power of two >= 2, got {fanals}"
            )));
        }
        if fanals > 1 << 24 {
            return Err(Error::Topology(format!("cluster size {fanals} is too large")));
        }
        Ok(Self {
            clusters,
            fanals,
            bits_per_cluster: fanals.trailing_zeros(),
        })
    }

    /// Number of clusters `c`.
    pub fn clusters(&self) -> usize {
        self.clusters
    }

    /// Fanals per cluster `l`.
    pub fn fanals(&self) -> usize {
        self.fanals
    }

    /// Bits carried by one cluster, `κ = log2 l`.
    pub fn bits_per_cluster(&self) -> u32 {
        self.bits_per_cluster
    }

    /// Total number of fanals `n = c·l`.
    pub fn neurons(&self) -> usize {
        self.clusters * self.fanals
    }

    /// Message length `k = c·κ` in bits.
    pub fn message_bits(&self) -> usize {
        self.clusters * self.bits_per_cluster as usize
    }

    /// Number of unordered cluster pairs, `c(c−1)/2`; also the edge count of one clique.
    pub fn cluster_pairs(&self) -> usize {
        self.clusters * (self.clusters - 1) / 2
    }

    /// Maximum number of inter-cluster connections, `(c−1)n²/(2c)`.
    pub fn max_edges(&self) -> u64 {
        self.cluster_pairs() as u64 * (self.fanals as u64).pow(2)
    }

    /// Maps a message onto its fanal pattern: chunk `i` read as an unsigned
    /// big-endian integer is the fanal index in cluster `i`.
    pub fn pattern_of(&self, message: &Message) -> Result<FanalPattern> {
        if message.len() != self.message_bits() {
            return Err(Error::size(self.message_bits(), message.len()));
        }
        let kappa = self.bits_per_cluster as usize;
        let fanals = message
            .bits
            .chunks(kappa)
            .map(|chunk| Some(chunk.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32)))
            .collect();
        Ok(FanalPattern { fanals })
    }

    /// Inverse of [`pattern_of`](Self::pattern_of). Fails if any cluster is erased.
    pub fn message_of(&self, pattern: &FanalPattern) -> Result<Message> {
        self.check_pattern(pattern)?;
        let erased = pattern.erased_count();
        if erased > 0 {
            return Err(Error::Erased(erased));
        }
        let kappa = self.bits_per_cluster;
        let mut bits = Vec::with_capacity(self.message_bits());
        for fanal in pattern.fanals.iter().flatten() {
            bits.extend((0..kappa).rev().map(|shift| (fanal >> shift) & 1 == 1));
        }
        Ok(Message { bits })
    }

    /// Checks entry count and index bounds of a pattern against this topology.
    pub fn check_pattern(&self, pattern: &FanalPattern) -> Result<()> {
        if pattern.len() != self.clusters {
            return Err(Error::size(self.clusters, pattern.len()));
        }
        for (cluster, fanal) in pattern.fanals.iter().enumerate() {
            if let Some(f) = fanal {
                if *f as usize >= self.fanals {
                    return Err(Error::Range(format!(
                        "fanal {f} in cluster {cluster} exceeds cluster size {}",
                        self.fanals
                    )));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for ClusterTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c={} l={}", self.clusters, self.fanals)
    }
}

/// A binary message, most significant bit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Message {
    bits: Vec<bool>,
}

impl Message {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Parses a string of `0`/`1` characters, ignoring spaces and underscores.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .filter(|c| !matches!(c, ' ' | '_'))
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Format(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<_>>()?;
        Ok(Self { bits })
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            bits: vec![false; len],
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Parses a big-endian hex string holding exactly `bits` bits. The string
    /// must have `⌈bits/4⌉` digits; unused high bits of the first digit must be zero.
    pub fn from_hex(hex: &str, bits: usize) -> Result<Self> {
        let digits = bits.div_ceil(4);
        if hex.len() != digits {
            return Err(Error::Format(format!(
                "expected {digits} hex digits for a {bits}-bit message, got {}",
                hex.len()
            )));
        }
        let mut out = Vec::with_capacity(digits * 4);
        for ch in hex.chars() {
            let v = ch
                .to_digit(16)
                .ok_or_else(|| Error::Format(format!("invalid hex digit {ch:?}")))?;
            out.extend((0..4).rev().map(|s| (v >> s) & 1 == 1));
        }
        let pad = digits * 4 - bits;
        if out[..pad].iter().any(|&b| b) {
            return Err(Error::Format(format!(
                "hex value exceeds {bits} bits (leading padding must be zero)"
            )));
        }
        out.drain(..pad);
        Ok(Self { bits: out })
    }

    /// Lowercase big-endian hex, left-padded with zero bits to a multiple of 4.
    pub fn to_hex(&self) -> String {
        let pad = self.bits.len().div_ceil(4) * 4 - self.bits.len();
        let padded: Vec<bool> = std::iter::repeat_n(false, pad)
            .chain(self.bits.iter().copied())
            .collect();
        padded
            .chunks(4)
            .map(|nib| {
                let v = nib.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32);
                char::from_digit(v, 16).unwrap()
            })
            .collect()
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// One fanal index per cluster, or `None` for an erased cluster.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FanalPattern {
    fanals: Vec<Option<u32>>,
}

impl FanalPattern {
    pub fn new(fanals: Vec<Option<u32>>) -> Self {
        Self { fanals }
    }

    /// A pattern without erasures.
    pub fn full(fanals: &[u32]) -> Self {
        Self {
            fanals: fanals.iter().map(|&f| Some(f)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.fanals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fanals.is_empty()
    }

    pub fn get(&self, cluster: usize) -> Option<u32> {
        self.fanals.get(cluster).copied().flatten()
    }

    pub fn entries(&self) -> &[Option<u32>] {
        &self.fanals
    }

    /// Marks a cluster as carrying no information.
    pub fn erase(&mut self, cluster: usize) {
        self.fanals[cluster] = None;
    }

    /// Number of erased clusters, `c_e`.
    pub fn erased_count(&self) -> usize {
        self.fanals.iter().filter(|f| f.is_none()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.erased_count() == 0
    }
}

/// Parameters of the global decoding loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeParams {
    /// Memory-effect weight a fanal adds to its own score when active.
    pub gamma: u32,
    /// Minimum cluster maximum for any of its fanals to activate.
    pub sigma: i64,
    /// Iteration cap, at least 1.
    pub max_iters: usize,
    /// Stop as soon as the active sets no longer change.
    pub stop_on_fixed_point: bool,
}

impl Default for DecodeParams {
    fn default() -> Self {
        Self::retrieval(1)
    }
}

impl DecodeParams {
    /// Associative-memory setting: `σ = 0`, `γ = 1`.
    pub fn retrieval(max_iters: usize) -> Self {
        Self {
            gamma: 1,
            sigma: 0,
            max_iters,
            stop_on_fixed_point: true,
        }
    }

    /// Classification setting: `σ = c`, `γ = 1`, a single iteration.
    pub fn classification(clusters: usize) -> Self {
        Self {
            gamma: 1,
            sigma: clusters as i64,
            max_iters: 1,
            stop_on_fixed_point: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Range("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

/// Final state of one cluster after decoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClusterState {
    /// Exactly one active fanal.
    Unique(u32),
    /// Two or more fanals tied at the cluster maximum.
    Ambiguous(Vec<u32>),
    /// No fanal reached the threshold.
    Silent,
}

/// Result of [`CliqueNetwork::decode`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub clusters: Vec<ClusterState>,
    pub iterations: usize,
}

impl DecodeOutcome {
    /// The decoded pattern, with non-unique clusters reported as erased.
    pub fn pattern(&self) -> FanalPattern {
        FanalPattern::new(
            self.clusters
                .iter()
                .map(|s| match s {
                    ClusterState::Unique(f) => Some(*f),
                    _ => None,
                })
                .collect(),
        )
    }

    /// True if every cluster is uniquely active.
    pub fn is_unique(&self) -> bool {
        self.clusters
            .iter()
            .all(|s| matches!(s, ClusterState::Unique(_)))
    }

    /// True if every cluster is uniquely active at the fanal given by `expected`.
    pub fn matches(&self, expected: &FanalPattern) -> bool {
        self.clusters.len() == expected.len()
            && self
                .clusters
                .iter()
                .zip(expected.entries())
                .all(|(s, e)| matches!((s, e), (ClusterState::Unique(a), Some(b)) if a == b))
    }

    pub fn any_ambiguous(&self) -> bool {
        self.clusters
            .iter()
            .any(|s| matches!(s, ClusterState::Ambiguous(_)))
    }

    pub fn any_silent(&self) -> bool {
        self.clusters.iter().any(|s| matches!(s, ClusterState::Silent))
    }
}

/// Binary, symmetric, inter-cluster adjacency learned from messages.
///
/// Each fanal owns a bit row over all `n` fanals, so both `(a, b)` and
/// `(b, a)` are stored. Bits inside a fanal's own cluster stay zero.
#[derive(Clone, PartialEq, Eq)]
pub struct CliqueNetwork {
    topology: ClusterTopology,
    words_per_row: usize,
    rows: Vec<u64>,
    edges: u64,
    learned_count: u64,
}

impl fmt::Debug for CliqueNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CliqueNetwork")
            .field("topology", &self.topology)
            .field("edges", &self.edges)
            .field("learned_count", &self.learned_count)
            .finish()
    }
}

impl CliqueNetwork {
    /// An empty network with no connections.
    pub fn new(topology: ClusterTopology) -> Self {
        let n = topology.neurons();
        let words_per_row = n.div_ceil(64);
        Self {
            topology,
            words_per_row,
            rows: vec![0; n * words_per_row],
            edges: 0,
            learned_count: 0,
        }
    }

    pub fn topology(&self) -> &ClusterTopology {
        &self.topology
    }

    /// Number of accepted `learn` calls, duplicates included.
    pub fn learned_count(&self) -> u64 {
        self.learned_count
    }

    pub(crate) fn set_learned_count(&mut self, count: u64) {
        self.learned_count = count;
    }

    /// Number of undirected connections present.
    pub fn edge_count(&self) -> u64 {
        self.edges
    }

    /// Fraction of the possible inter-cluster connections that exist.
    pub fn density(&self) -> f64 {
        self.edges as f64 / self.topology.max_edges() as f64
    }

    #[inline]
    fn id(&self, cluster: usize, fanal: u32) -> usize {
        cluster * self.topology.fanals + fanal as usize
    }

    #[inline]
    fn row(&self, id: usize) -> &[u64] {
        &self.rows[id * self.words_per_row..(id + 1) * self.words_per_row]
    }

    #[inline]
    fn bit(&self, a: usize, b: usize) -> bool {
        self.rows[a * self.words_per_row + b / 64] >> (b % 64) & 1 == 1
    }

    /// Whether fanal `f1` of cluster `c1` is connected to fanal `f2` of cluster `c2`.
    /// Always false inside a single cluster.
    pub fn has_edge(&self, c1: usize, f1: u32, c2: usize, f2: u32) -> bool {
        if c1 == c2 {
            return false;
        }
        self.bit(self.id(c1, f1), self.id(c2, f2))
    }

    /// Sets a connection; returns true if it was new. Panics on intra-cluster pairs.
    pub(crate) fn connect(&mut self, c1: usize, f1: u32, c2: usize, f2: u32) -> bool {
        assert_ne!(c1, c2, "intra-cluster connection");
        let (a, b) = (self.id(c1, f1), self.id(c2, f2));
        let w = self.words_per_row;
        let mask_b = 1u64 << (b % 64);
        if self.rows[a * w + b / 64] & mask_b != 0 {
            return false;
        }
        self.rows[a * w + b / 64] |= mask_b;
        self.rows[b * w + a / 64] |= 1u64 << (a % 64);
        self.edges += 1;
        true
    }

    /// Learns a message by printing its clique into the network.
    pub fn learn(&mut self, message: &Message) -> Result<()> {
        let pattern = self.topology.pattern_of(message)?;
        self.learn_pattern(&pattern)
    }

    /// Learns a complete fanal pattern. Existing connections are left unchanged.
    pub fn learn_pattern(&mut self, pattern: &FanalPattern) -> Result<()> {
        self.topology.check_pattern(pattern)?;
        let erased = pattern.erased_count();
        if erased > 0 {
            return Err(Error::Erased(erased));
        }
        let fanals: Vec<u32> = pattern.entries().iter().flatten().copied().collect();
        self.learn_fanals(&fanals);
        Ok(())
    }

    /// Learns one fanal index per cluster, already known to be in range.
    pub(crate) fn learn_fanals(&mut self, fanals: &[u32]) {
        debug_assert_eq!(fanals.len(), self.topology.clusters);
        for c1 in 0..fanals.len() {
            for c2 in c1 + 1..fanals.len() {
                self.connect(c1, fanals[c1], c2, fanals[c2]);
            }
        }
        self.learned_count += 1;
    }

    /// True if every pair of entries in a complete pattern is connected.
    pub fn is_clique(&self, pattern: &FanalPattern) -> Result<bool> {
        self.topology.check_pattern(pattern)?;
        let erased = pattern.erased_count();
        if erased > 0 {
            return Err(Error::Erased(erased));
        }
        let f = pattern.entries();
        for c1 in 0..f.len() {
            for c2 in c1 + 1..f.len() {
                if !self.has_edge(c1, f[c1].unwrap(), c2, f[c2].unwrap()) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Fanals of other clusters connected to fanal `fanal` of `cluster`, as
    /// `(cluster, fanal)` pairs in ascending order.
    pub fn neighbors(&self, cluster: usize, fanal: u32) -> Vec<(usize, u32)> {
        let l = self.topology.fanals;
        let mut out = Vec::new();
        for_each_bit(self.row(self.id(cluster, fanal)), |b| {
            out.push((b / l, (b % l) as u32));
        });
        out
    }

    /// Scores every fanal from an active set: the number of active fanals of
    /// other clusters it is connected to, plus `gamma` if it is itself active.
    pub fn scores(&self, active: &ActiveSet, gamma: u32) -> Vec<u32> {
        let mut scores = vec![0u32; self.topology.neurons()];
        self.accumulate_scores(active, gamma, &mut scores);
        scores
    }

    fn accumulate_scores(&self, active: &ActiveSet, gamma: u32, scores: &mut [u32]) {
        scores.fill(0);
        for_each_bit(&active.words, |a| {
            for_each_bit(self.row(a), |b| scores[b] += 1);
            scores[a] += gamma;
        });
    }

    /// Runs the global decoding loop from an input pattern. Erased clusters
    /// start with no active fanal.
    ///
    /// All clusters update synchronously from the previous iteration's
    /// active sets. A cluster activates the fanals attaining its maximum
    /// score when that maximum is positive and at least `sigma`.
    pub fn decode(&self, input: &FanalPattern, params: &DecodeParams) -> Result<DecodeOutcome> {
        params.validate()?;
        let active = ActiveSet::from_pattern(&self.topology, input)?;
        Ok(self.decode_active(active, params))
    }

    /// Like [`decode`](Self::decode) but starting from an arbitrary active set.
    pub fn decode_active(&self, mut active: ActiveSet, params: &DecodeParams) -> DecodeOutcome {
        let l = self.topology.fanals;
        let mut scores = vec![0u32; self.topology.neurons()];
        let mut iterations = 0;
        for _ in 0..params.max_iters.max(1) {
            iterations += 1;
            self.accumulate_scores(&active, params.gamma, &mut scores);
            let mut next = ActiveSet::empty(&self.topology);
            for (cluster, chunk) in scores.chunks(l).enumerate() {
                for f in cluster_winners(chunk, params.sigma) {
                    next.insert(cluster * l + f);
                }
            }
            let fixed = next == active;
            active = next;
            if fixed && params.stop_on_fixed_point {
                break;
            }
        }
        DecodeOutcome {
            clusters: active.cluster_states(&self.topology),
            iterations,
        }
    }

    /// True if decoding the message's own pattern returns it unchanged, every
    /// cluster uniquely active at its input fanal.
    pub fn is_accepted(&self, message: &Message, params: &DecodeParams) -> Result<bool> {
        let pattern = self.topology.pattern_of(message)?;
        self.is_pattern_accepted(&pattern, params)
    }

    pub fn is_pattern_accepted(&self, pattern: &FanalPattern, params: &DecodeParams) -> Result<bool> {
        let erased = pattern.erased_count();
        if erased > 0 {
            return Err(Error::Erased(erased));
        }
        Ok(self.decode(pattern, params)?.matches(pattern))
    }
}

/// Winners of one cluster under the positive-score rule used in global decoding.
fn cluster_winners(scores: &[u32], sigma: i64) -> impl Iterator<Item = usize> + '_ {
    let max = scores.iter().copied().max().unwrap_or(0);
    let on = max > 0 && i64::from(max) >= sigma;
    scores
        .iter()
        .enumerate()
        .filter(move |&(_, &s)| on && s == max)
        .map(|(i, _)| i)
}

#[inline]
fn for_each_bit(words: &[u64], mut f: impl FnMut(usize)) {
    for (wi, &word) in words.iter().enumerate() {
        let mut w = word;
        while w != 0 {
            let tz = w.trailing_zeros() as usize;
            f(wi * 64 + tz);
            w &= w - 1;
        }
    }
}

/// Bitmap of active fanals over the whole network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveSet {
    words: Vec<u64>,
}

impl ActiveSet {
    pub fn empty(topology: &ClusterTopology) -> Self {
        Self {
            words: vec![0; topology.neurons().div_ceil(64)],
        }
    }

    pub fn from_pattern(topology: &ClusterTopology, pattern: &FanalPattern) -> Result<Self> {
        topology.check_pattern(pattern)?;
        let mut set = Self::empty(topology);
        for (cluster, f) in pattern.entries().iter().enumerate() {
            if let Some(f) = f {
                set.insert(cluster * topology.fanals() + *f as usize);
            }
        }
        Ok(set)
    }

    /// Activates the fanal with global index `cluster·l + fanal`.
    pub fn insert(&mut self, id: usize) {
        self.words[id / 64] |= 1 << (id % 64);
    }

    pub fn contains(&self, id: usize) -> bool {
        self.words[id / 64] >> (id % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn cluster_states(&self, topology: &ClusterTopology) -> Vec<ClusterState> {
        let l = topology.fanals();
        let mut members: Vec<Vec<u32>> = vec![Vec::new(); topology.clusters()];
        for_each_bit(&self.words, |id| members[id / l].push((id % l) as u32));
        members
            .into_iter()
            .map(|m| match m.len() {
                0 => ClusterState::Silent,
                1 => ClusterState::Unique(m[0]),
                _ => ClusterState::Ambiguous(m),
            })
            .collect()
    }
}
