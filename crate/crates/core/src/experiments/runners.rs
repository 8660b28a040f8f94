//! Monte Carlo runners, one per experiment kind.
//!
//! Each grid point builds its network once from its own random stream; each
//! trial then draws from a stream keyed by its index, so the counts do not
//! depend on how rayon splits the work.

use std::collections::HashSet;
use std::time::Instant;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::record::SweepRecord;
use super::spec::{ExperimentKind, SweepSpec};
use crate::analysis;
use crate::clique::{CliqueNetwork, ClusterTopology, DecodeParams, FanalPattern};
use crate::error::{Error, Result};
use crate::hopfield::{self, HopfieldNetwork, DEFAULT_MAX_ITERS};

/// Index of the stream that builds a grid point's network.
const NETWORK_STREAM: u64 = u64::MAX;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Random stream for `(seed, experiment, point, index)`.
pub fn stream(seed: u64, experiment: ExperimentKind, point: u64, index: u64) -> ChaCha8Rng {
    let mut h = splitmix64(seed);
    for part in [experiment.stream_id(), point, index] {
        h = splitmix64(h ^ part);
    }
    ChaCha8Rng::seed_from_u64(h)
}

/// Uniform random complete pattern, equivalent to a uniform random message.
pub fn random_pattern<R: Rng + ?Sized>(rng: &mut R, topology: &ClusterTopology) -> FanalPattern {
    let l = topology.fanals() as u32;
    FanalPattern::new(
        (0..topology.clusters())
            .map(|_| Some(rng.gen_range(0..l)))
            .collect(),
    )
}

/// Learns `m` random messages and returns the network with the learnt patterns.
pub fn learn_random<R: Rng + ?Sized>(
    rng: &mut R,
    topology: ClusterTopology,
    m: u64,
) -> (CliqueNetwork, Vec<FanalPattern>) {
    let mut net = CliqueNetwork::new(topology);
    let mut learnt = Vec::with_capacity(m as usize);
    for _ in 0..m {
        let p = random_pattern(rng, &topology);
        net.learn_pattern(&p).expect("random pattern fits its topology");
        learnt.push(p);
    }
    (net, learnt)
}

/// Counts the trials in `0..trials` for which `f` is true.
fn count_parallel(trials: u64, f: impl Fn(u64) -> bool + Sync) -> u64 {
    (0..trials).into_par_iter().filter(|&t| f(t)).count() as u64
}

/// Sums per-trial count vectors of length `len`.
fn sum_parallel(trials: u64, len: usize, f: impl Fn(u64) -> Vec<u64> + Sync) -> Vec<u64> {
    (0..trials)
        .into_par_iter()
        .map(&f)
        .reduce(
            || vec![0; len],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

struct Point {
    index: u64,
    topology: ClusterTopology,
    messages: u64,
}

fn clique_points(spec: &SweepSpec) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for &c in &spec.clusters {
        for &l in &spec.fanals {
            let topology = ClusterTopology::new(c, l)?;
            for &m in &spec.messages {
                out.push(Point {
                    index: out.len() as u64,
                    topology,
                    messages: m,
                });
            }
        }
    }
    Ok(out)
}

fn base_record(spec: &SweepSpec, quantity: &'static str, point: &Point) -> SweepRecord {
    let t = &point.topology;
    let mut r = SweepRecord::new(spec.experiment, quantity, t.neurons()).topology(t.clusters(), t.fanals());
    r.messages = point.messages;
    r
}

fn decode_params(spec: &SweepSpec, clusters: usize, iterations: usize) -> DecodeParams {
    DecodeParams {
        gamma: spec.gamma,
        sigma: spec.sigma_for(clusters),
        max_iters: iterations,
        stop_on_fixed_point: true,
    }
}

fn elapsed_ms(spec: &SweepSpec, start: Instant) -> Option<u64> {
    spec.timing.then(|| start.elapsed().as_millis() as u64)
}

/// Runs any sweep.
pub fn run(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    spec.validate()?;
    match spec.experiment {
        ExperimentKind::Density => run_density(spec),
        ExperimentKind::Accept => run_accept(spec),
        ExperimentKind::Ratio => run_ratio(spec),
        ExperimentKind::Retrieval => run_retrieval(spec),
        ExperimentKind::Capacity => run_capacity(spec),
        ExperimentKind::HopfieldBaseline => run_hopfield_baseline(spec),
    }
}

fn expect_kind(spec: &SweepSpec, kind: ExperimentKind) -> Result<()> {
    if spec.experiment != kind {
        return Err(Error::Precondition(format!(
            "spec is for {}, runner is for {kind}",
            spec.experiment
        )));
    }
    spec.validate()
}

/// Density after learning: `trials` independent networks per point, every
/// possible connection counted as one Bernoulli slot.
pub fn run_density(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    expect_kind(spec, ExperimentKind::Density)?;
    let mut out = Vec::new();
    for point in clique_points(spec)? {
        let start = Instant::now();
        let topo = point.topology;
        let edges: u64 = (0..spec.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = stream(spec.seed, spec.experiment, point.index, t);
                let mut net = CliqueNetwork::new(topo);
                let l = topo.fanals() as u32;
                let mut fanals = vec![0u32; topo.clusters()];
                for _ in 0..point.messages {
                    fanals.iter_mut().for_each(|f| *f = rng.gen_range(0..l));
                    net.learn_fanals(&fanals);
                }
                net.edge_count()
            })
            .sum();
        let slots = spec.trials * topo.max_edges();
        let mut r = base_record(spec, "density", &point).counts(edges, slots);
        r.theory = Some(analysis::expected_density(point.messages as f64, topo.fanals() as f64));
        r.density = r.estimate;
        r.wall_ms = elapsed_ms(spec, start);
        out.push(r);
    }
    Ok(out)
}

/// Acceptance counts shared by the accept and ratio sweeps.
struct AcceptPoint {
    net: CliqueNetwork,
    learnt: Vec<FanalPattern>,
    /// `(iterations, accepted random probes)`.
    accepted: Vec<(usize, u64)>,
}

/// Learns the point's messages and counts accepted random probes. With
/// `unlearnt_only`, probes equal to a learnt message are redrawn so the rate
/// estimates acceptance of messages outside the learnt set.
fn measure_accept(spec: &SweepSpec, point: &Point, unlearnt_only: bool) -> Result<AcceptPoint> {
    let mut rng = stream(spec.seed, spec.experiment, point.index, NETWORK_STREAM);
    let (net, learnt) = learn_random(&mut rng, point.topology, point.messages);
    let c = point.topology.clusters();
    let learnt_set: HashSet<&FanalPattern> = learnt.iter().collect();
    let all_learnt = (learnt_set.len() as f64) >= (point.topology.fanals() as f64).powi(c as i32);
    let exclude = unlearnt_only && !all_learnt;
    let accepted = spec
        .iterations
        .iter()
        .map(|&it| {
            let params = decode_params(spec, c, it);
            let n = count_parallel(spec.trials, |t| {
                let mut rng = stream(spec.seed, spec.experiment, point.index, t);
                let mut probe = random_pattern(&mut rng, &point.topology);
                while exclude && learnt_set.contains(&probe) {
                    probe = random_pattern(&mut rng, &point.topology);
                }
                net.is_pattern_accepted(&probe, &params).expect("complete probe")
            });
            (it, n)
        })
        .collect();
    Ok(AcceptPoint { net, learnt, accepted })
}

fn learnt_accept_record(spec: &SweepSpec, point: &Point, m: &AcceptPoint, it: usize) -> SweepRecord {
    let params = decode_params(spec, point.topology.clusters(), it);
    let ok = m
        .learnt
        .par_iter()
        .filter(|p| m.net.is_pattern_accepted(p, &params).expect("complete pattern"))
        .count() as u64;
    let mut r = base_record(spec, "learnt_accept", point).counts(ok, m.learnt.len() as u64);
    r.iterations = Some(it);
    r.sigma = Some(params.sigma);
    r.gamma = Some(params.gamma);
    r.theory = Some(1.0);
    r.density = Some(m.net.density());
    r
}

/// Probability that a uniform random unlearnt message is accepted, with the
/// learnt messages' own acceptance reported on a separate row.
pub fn run_accept(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    expect_kind(spec, ExperimentKind::Accept)?;
    let mut out = Vec::new();
    for point in clique_points(spec)? {
        let start = Instant::now();
        let m = measure_accept(spec, &point, true)?;
        let c = point.topology.clusters();
        let d = m.net.density();
        for &(it, accepted) in &m.accepted {
            let mut r = base_record(spec, "accept", &point).counts(accepted, spec.trials);
            r.iterations = Some(it);
            r.sigma = Some(spec.sigma_for(c));
            r.gamma = Some(spec.gamma);
            r.theory = Some(analysis::accept_prob(d, c));
            r.density = Some(d);
            r.wall_ms = elapsed_ms(spec, start);
            out.push(r);
            if !m.learnt.is_empty() {
                out.push(learnt_accept_record(spec, &point, &m, it));
            }
        }
    }
    Ok(out)
}

/// Largest message length for which the ratio sweep also enumerates every message.
pub const EXHAUSTIVE_MAX_BITS: usize = 20;

/// Ratio of unlearnt accepted messages to learnt ones, estimated from the
/// acceptance rate. Small networks are also enumerated exhaustively.
pub fn run_ratio(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    expect_kind(spec, ExperimentKind::Ratio)?;
    let mut out = Vec::new();
    for point in clique_points(spec)? {
        let start = Instant::now();
        let m = measure_accept(spec, &point, false)?;
        let topo = point.topology;
        let (c, k) = (topo.clusters(), topo.message_bits());
        let d = m.net.density();
        let msgs = point.messages as f64;
        for &(it, accepted) in &m.accepted {
            let mut r = base_record(spec, "ratio", &point).counts(accepted, spec.trials);
            r.iterations = Some(it);
            r.sigma = Some(spec.sigma_for(c));
            r.gamma = Some(spec.gamma);
            let theory = analysis::accept_prob(d, c);
            r.theory = Some(theory);
            r.density = Some(d);
            r.derived = Some(analysis::spurious_ratio(k, r.estimate.unwrap_or(0.0), msgs));
            r.derived_theory = Some(analysis::spurious_ratio(k, theory, msgs));
            r.wall_ms = elapsed_ms(spec, start);
            out.push(r);
            if k <= EXHAUSTIVE_MAX_BITS {
                out.push(exhaustive_ratio_record(spec, &point, &m, it));
            }
        }
    }
    Ok(out)
}

fn exhaustive_ratio_record(spec: &SweepSpec, point: &Point, m: &AcceptPoint, it: usize) -> SweepRecord {
    let topo = point.topology;
    let (c, l) = (topo.clusters(), topo.fanals() as u64);
    let params = decode_params(spec, c, it);
    let total = l.pow(c as u32);
    let accepted = count_parallel(total, |mut code| {
        let mut fanals = vec![None; c];
        for slot in fanals.iter_mut().rev() {
            *slot = Some((code % l) as u32);
            code /= l;
        }
        m.net
            .is_pattern_accepted(&FanalPattern::new(fanals), &params)
            .expect("complete pattern")
    });
    let mut distinct = m.learnt.clone();
    distinct.sort_by(|a, b| a.entries().cmp(b.entries()));
    distinct.dedup();
    let mut r = base_record(spec, "ratio_exhaustive", point).counts(accepted, total);
    r.iterations = Some(it);
    r.sigma = Some(params.sigma);
    r.gamma = Some(params.gamma);
    r.density = Some(m.net.density());
    if !distinct.is_empty() {
        let e = distinct.len() as f64;
        r.derived = Some((accepted as f64 - e) / e);
    }
    r
}

/// Picks a learnt message and erases `erased` distinct clusters, both uniformly.
fn retrieval_probe<R: Rng + ?Sized>(
    rng: &mut R,
    learnt: &[FanalPattern],
    erased: usize,
) -> (usize, FanalPattern) {
    let which = rng.gen_range(0..learnt.len());
    let mut probe = learnt[which].clone();
    for cluster in index::sample(rng, probe.len(), erased) {
        probe.erase(cluster);
    }
    (which, probe)
}

/// Retrieval errors over `trials` probes of `net`, one count per iteration budget.
fn retrieval_errors(
    spec: &SweepSpec,
    point_index: u64,
    net: &CliqueNetwork,
    learnt: &[FanalPattern],
    iterations: &[usize],
) -> Vec<u64> {
    let c = net.topology().clusters();
    let params: Vec<DecodeParams> = iterations.iter().map(|&it| decode_params(spec, c, it)).collect();
    sum_parallel(spec.trials, iterations.len(), |t| {
        let mut rng = stream(spec.seed, spec.experiment, point_index, t);
        let (which, probe) = retrieval_probe(&mut rng, learnt, spec.erased);
        params
            .iter()
            .map(|p| {
                let outcome = net.decode(&probe, p).expect("probe fits topology");
                u64::from(!outcome.matches(&learnt[which]))
            })
            .collect()
    })
}

/// Probability of failing to complete a learnt message with `erased` clusters missing.
pub fn run_retrieval(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    expect_kind(spec, ExperimentKind::Retrieval)?;
    let mut out = Vec::new();
    for point in clique_points(spec)? {
        let start = Instant::now();
        let topo = point.topology;
        let mut rng = stream(spec.seed, spec.experiment, point.index, NETWORK_STREAM);
        let (net, learnt) = learn_random(&mut rng, topo, point.messages);
        let errors = retrieval_errors(spec, point.index, &net, &learnt, &spec.iterations);
        let d = net.density();
        let c = topo.clusters();
        for (&it, &e) in spec.iterations.iter().zip(&errors) {
            let mut r = base_record(spec, "retrieval_error", &point).counts(e, spec.trials);
            r.erased = Some(spec.erased);
            r.iterations = Some(it);
            r.sigma = Some(spec.sigma_for(c));
            r.gamma = Some(spec.gamma);
            r.density = Some(d);
            if it == 1 && spec.gamma >= 1 && spec.sigma_for(c) <= 0 {
                r.theory = Some(analysis::retrieval_error_at_density(d, topo.fanals(), c, spec.erased));
            }
            r.wall_ms = elapsed_ms(spec, start);
            out.push(r);
        }
    }
    Ok(out)
}

/// Largest real `m` with predicted single-iteration error at most `p0`.
pub fn theory_capacity_messages(l: usize, c: usize, c_e: usize, p0: f64) -> Result<f64> {
    let err = |m: f64| analysis::retrieval_error(m, l, c, c_e);
    let (mut lo, mut hi) = (0.0f64, (l * l) as f64);
    while err(hi)? <= p0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if err(mid)? <= p0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Number of Hopfield neurons whose connection memory equals `bits`.
pub fn hnn_neurons_for_memory(bits: f64) -> Result<f64> {
    let (mut lo, mut hi) = (2.0f64, 4.0f64);
    while hopfield::hnn_max_memory_bits(hi)? < bits {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hopfield::hnn_max_memory_bits(mid)? < bits {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Largest message count whose measured retrieval error stays at or below
/// the target, found by bisection over prefixes of one message sequence.
pub fn run_capacity(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    expect_kind(spec, ExperimentKind::Capacity)?;
    let mut out = Vec::new();
    let mut index = 0u64;
    for &c in &spec.clusters {
        for &l in &spec.fanals {
            let start = Instant::now();
            let topo = ClusterTopology::new(c, l)?;
            let point_index = index;
            index += 1;
            let mut rng = stream(spec.seed, spec.experiment, point_index, NETWORK_STREAM);
            let mut sequence: Vec<FanalPattern> = Vec::new();
            let it = spec.iterations[0];
            let mut measure = |m: u64| {
                while (sequence.len() as u64) < m {
                    sequence.push(random_pattern(&mut rng, &topo));
                }
                let mut net = CliqueNetwork::new(topo);
                for p in &sequence[..m as usize] {
                    net.learn_pattern(p).expect("random pattern fits its topology");
                }
                let e = retrieval_errors(spec, point_index, &net, &sequence[..m as usize], &[it])[0];
                (e, net.density())
            };
            let passes = |e: u64| (e as f64) <= spec.target_error * spec.trials as f64;

            let theory_m = theory_capacity_messages(l, c, spec.erased, spec.target_error)?;
            let (mut lo, mut lo_meas) = (1u64, measure(1));
            let mut hi = (theory_m as u64).max(2);
            loop {
                let meas = measure(hi);
                if !passes(meas.0) {
                    break;
                }
                (lo, lo_meas) = (hi, meas);
                hi *= 2;
            }
            while hi - lo > 1 && hi - lo > lo / 1000 {
                let mid = lo + (hi - lo) / 2;
                let meas = measure(mid);
                if passes(meas.0) {
                    (lo, lo_meas) = (mid, meas);
                } else {
                    hi = mid;
                }
            }

            let k = topo.message_bits() as f64;
            let memory = topo.max_edges() as f64;
            let mut r = SweepRecord::new(spec.experiment, "capacity", topo.neurons())
                .topology(c, l)
                .counts(lo_meas.0, spec.trials);
            r.messages = lo;
            r.erased = Some(spec.erased);
            r.iterations = Some(it);
            r.sigma = Some(spec.sigma_for(c));
            r.gamma = Some(spec.gamma);
            r.theory = Some(analysis::retrieval_error(lo as f64, l, c, spec.erased)?);
            r.density = Some(lo_meas.1);
            r.derived = Some(lo as f64 * k);
            r.derived_theory = Some(theory_m * k);
            r.memory_bits = Some(memory);
            r.wall_ms = elapsed_ms(spec, start);
            out.push(r);

            let n_h = hnn_neurons_for_memory(memory)?;
            let mut h = SweepRecord::new(spec.experiment, "hnn_capacity", n_h.round() as usize);
            h.messages = hopfield::hnn_diversity(n_h)?.round() as u64;
            h.derived = Some(hopfield::hnn_capacity(n_h)?);
            h.memory_bits = Some(memory);
            out.push(h);
        }
    }
    Ok(out)
}

/// Random `±1` vector of length `n`.
fn random_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<i8> {
    (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect()
}

/// Hopfield baseline: `trials` networks per `(n, M)`, each checked for
/// (a) learnt messages that are not fixed points and (b) recall failures
/// from probes whose half of the coordinates were redrawn uniformly.
pub fn run_hopfield_baseline(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    expect_kind(spec, ExperimentKind::HopfieldBaseline)?;
    let mut out = Vec::new();
    let mut index = 0u64;
    for &n in &spec.neurons {
        for &m in &spec.messages {
            let start = Instant::now();
            let point_index = index;
            index += 1;
            let counts = sum_parallel(spec.trials, 2, |t| {
                let mut rng = stream(spec.seed, spec.experiment, point_index, t);
                let messages: Vec<Vec<i8>> = (0..m).map(|_| random_state(&mut rng, n)).collect();
                let mut net = HopfieldNetwork::new(n).expect("n validated");
                net.learn(&messages).expect("states are valid");
                let mut unstable = 0;
                let mut failed = 0;
                for d in &messages {
                    unstable += u64::from(!net.is_stable(d).expect("valid state"));
                    let mut probe = d.clone();
                    for i in index::sample(&mut rng, n, n / 2) {
                        probe[i] = if rng.gen::<bool>() { 1 } else { -1 };
                    }
                    let recall = net.recall(&probe, DEFAULT_MAX_ITERS).expect("valid state");
                    failed += u64::from(recall.state != *d);
                }
                vec![unstable, failed]
            });
            let total = spec.trials * m;
            let wall = elapsed_ms(spec, start);
            for (quantity, count) in [("instability", counts[0]), ("recall_error", counts[1])] {
                let mut r = SweepRecord::new(spec.experiment, quantity, n).counts(count, total);
                r.messages = m;
                r.wall_ms = wall;
                out.push(r);
            }
            let nf = n as f64;
            let mut div = SweepRecord::new(spec.experiment, "hnn_diversity", n);
            div.messages = m;
            div.derived = Some(hopfield::hnn_diversity(nf)?);
            out.push(div);
            let mut cap = SweepRecord::new(spec.experiment, "hnn_capacity", n);
            cap.messages = m;
            cap.derived = Some(hopfield::hnn_capacity(nf)?);
            cap.memory_bits = Some(hopfield::hnn_max_memory_bits(nf)?);
            out.push(cap);
        }
    }
    Ok(out)
}
