//! Acceptance suite. Each criterion prints one `PASS`/`FAIL` line; the
//! process exits non-zero if any criterion fails.

use std::cell::OnceCell;
use std::process::ExitCode;
use std::time::Instant;

use cliquenet::analysis;
use cliquenet::experiments::{preset, run, ExperimentKind, SweepRecord, SweepSpec};
use cliquenet::hopfield::{self, HopfieldNetwork, DEFAULT_MAX_ITERS};
use cliquenet::wta::{max2, max_tree, max_tree_circuit, soft_ml_decode, Codebook, SoftMLDecoder, SoftSymbol};
use cliquenet::{CliqueNetwork, ClusterTopology, DecodeParams, FanalPattern, Message};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 1;
const Z: f64 = 3.0;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

/// Wilson score interval, kept separate from the library's statistics code.
fn wilson(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (centre - half, centre + half)
}

fn within(successes: u64, trials: u64, value: f64) -> bool {
    let (lo, hi) = wilson(successes, trials, Z);
    lo - 1e-12 <= value && value <= hi + 1e-12
}

/// `(1 − x)^m` by repeated multiplication.
fn complement_power(x: f64, m: u64) -> f64 {
    (0..m).fold(1.0, |acc, _| acc * (1.0 - x))
}

fn density_oracle(m: u64, l: usize) -> f64 {
    1.0 - complement_power(1.0 / (l * l) as f64, m)
}

fn accept_oracle(d: f64, c: usize) -> f64 {
    (0..c * (c - 1) / 2).fold(1.0, |acc, _| acc * d)
}

/// Single-iteration error: some wrong fanal in an erased cluster is linked to
/// every known fanal.
fn retrieval_oracle(d: f64, l: usize, c: usize, c_e: usize) -> f64 {
    let spurious = (0..c - c_e).fold(1.0, |acc, _| acc * d);
    1.0 - complement_power(spurious, (c_e * (l - 1)) as u64)
}

fn sigmas(r: &SweepRecord, theory: f64) -> f64 {
    let p = r.successes as f64 / r.trials as f64;
    let sd = (theory * (1.0 - theory) / r.trials as f64).sqrt();
    if sd == 0.0 {
        0.0
    } else {
        (p - theory) / sd
    }
}

fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ (stream << 32))
}

fn density_law() -> Verdict {
    let specs = preset("density", false).unwrap();
    let networks = specs.iter().map(|(_, s)| s.trials).min().unwrap();
    let records: Vec<SweepRecord> = specs
        .into_iter()
        .flat_map(|(_, mut spec)| {
            spec.seed = SEED;
            run(&spec).unwrap()
        })
        .collect();
    let ok = records
        .iter()
        .filter(|r| within(r.successes, r.trials, density_oracle(r.messages, r.fanals.unwrap())))
        .count();
    let frac = ok as f64 / records.len() as f64;
    verdict(
        frac >= 0.95,
        format!("{ok}/{} grid points within 3 sigma, {networks} networks per point", records.len()),
    )
}

fn zero_first_kind_error() -> Verdict {
    let mut rng = rng(2);
    let mut failures = 0u64;
    let mut checked = 0u64;
    for _ in 0..50 {
        let c = rng.gen_range(2..=8);
        let l = 1usize << rng.gen_range(1..=8);
        let m = rng.gen_range(1..=(2 * l * l).min(4000));
        let topo = ClusterTopology::new(c, l).unwrap();
        let mut net = CliqueNetwork::new(topo);
        let learnt: Vec<FanalPattern> = (0..m)
            .map(|_| FanalPattern::full(&(0..c).map(|_| rng.gen_range(0..l as u32)).collect::<Vec<_>>()))
            .collect();
        for p in &learnt {
            net.learn_pattern(p).unwrap();
        }
        let params = DecodeParams::classification(c);
        for p in &learnt {
            checked += 1;
            failures += u64::from(!net.is_pattern_accepted(p, &params).unwrap());
        }
    }
    verdict(
        failures == 0,
        format!("{failures} rejected out of {checked} learnt messages over 50 networks"),
    )
}

fn classification_law() -> Verdict {
    let mut spec = SweepSpec::new(ExperimentKind::Accept);
    spec.clusters = vec![4, 6];
    spec.fanals = vec![64];
    spec.messages = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5]
        .iter()
        .map(|f| (f * 4096.0) as u64)
        .collect();
    spec.trials = 20_000;
    spec.seed = SEED;
    let records: Vec<SweepRecord> = run(&spec)
        .unwrap()
        .into_iter()
        .filter(|r| r.quantity == "accept")
        .collect();
    let mut worst = Vec::new();
    for r in &records {
        let theory = accept_oracle(r.density.unwrap(), r.clusters.unwrap());
        if !within(r.successes, r.trials, theory) {
            worst.push(format!(
                "c={} M={} {:.5} vs {:.5} ({:+.1} sigma)",
                r.clusters.unwrap(),
                r.messages,
                r.successes as f64 / r.trials as f64,
                theory,
                sigmas(r, theory)
            ));
        }
    }
    let ok = records.len() - worst.len();
    let mut detail = format!("{ok}/{} grid points within 3 sigma", records.len());
    if !worst.is_empty() {
        detail += &format!("; outside: {}", worst.join(", "));
    }
    verdict(worst.is_empty(), detail)
}

fn retrieval_law() -> Verdict {
    let (_, mut spec) = preset("retrieval", false).unwrap().remove(0);
    spec.seed = SEED;
    assert_eq!((spec.clusters.as_slice(), spec.fanals.as_slice(), spec.erased), (&[4][..], &[128][..], 1));
    let records = run(&spec).unwrap();
    let mut outside = Vec::new();
    for r in &records {
        let theory = retrieval_oracle(r.density.unwrap(), 128, 4, 1);
        if !within(r.successes, r.trials, theory) {
            outside.push(format!(
                "M={} {:.4} vs {:.4} ({:+.1} sigma)",
                r.messages,
                r.successes as f64 / r.trials as f64,
                theory,
                sigmas(r, theory)
            ));
        }
    }

    let mut spot = SweepSpec::new(ExperimentKind::Retrieval);
    spot.clusters = vec![4];
    spot.fanals = vec![512];
    spot.messages = vec![10_000];
    spot.erased = 1;
    spot.trials = 5000;
    spot.seed = SEED;
    let s = &run(&spot).unwrap()[0];
    let spot_theory = retrieval_oracle(density_oracle(10_000, 512), 512, 4, 1);
    let spot_ok = within(s.successes, s.trials, spot_theory);

    let ok = records.len() - outside.len();
    let mut detail = format!(
        "l=128 grid {ok}/{} within 3 sigma; spot check {:.4} vs {:.4} {}",
        records.len(),
        s.successes as f64 / s.trials as f64,
        spot_theory,
        if spot_ok { "ok" } else { "outside" }
    );
    if !outside.is_empty() {
        detail += &format!("; outside: {}", outside.join(", "));
    }
    verdict(outside.is_empty() && spot_ok, detail)
}

/// Shared run for the iterative retrieval criteria.
fn iterative_retrieval() -> Vec<SweepRecord> {
    let mut spec = SweepSpec::new(ExperimentKind::Retrieval);
    spec.clusters = vec![8];
    spec.fanals = vec![256];
    spec.messages = vec![5000, 10_000, 15_000, 20_000, 25_000];
    spec.erased = 4;
    spec.iterations = vec![1, 4];
    spec.sigma = Some(0);
    spec.gamma = 1;
    spec.trials = 10_000;
    spec.seed = SEED;
    run(&spec).unwrap()
}

fn error_at(records: &[SweepRecord], m: u64, iterations: usize) -> f64 {
    let r = records
        .iter()
        .find(|r| r.messages == m && r.iterations == Some(iterations))
        .unwrap();
    r.successes as f64 / r.trials as f64
}

fn headline_error(records: &[SweepRecord]) -> Verdict {
    let e = error_at(records, 15_000, 4);
    verdict(
        (e - 0.02).abs() <= 0.01,
        format!("retrieval error {:.2}% at M=15000 after 4 iterations, 10000 trials", 100.0 * e),
    )
}

fn iteration_benefit(records: &[SweepRecord]) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for m in [5000, 10_000, 15_000, 20_000, 25_000] {
        let (one, four) = (error_at(records, m, 1), error_at(records, m, 4));
        pass &= four < one;
        parts.push(format!("M={m} {four:.4}<{one:.4}"));
    }
    verdict(pass, parts.join(", "))
}

fn formula_values() -> Verdict {
    let mut bad = Vec::new();
    let mut check = |name: &str, value: f64, ok: bool| {
        if !ok {
            bad.push(format!("{name}={value}"));
        }
    };
    let m2048 = analysis::max_ordered_messages(2048, 4).unwrap();
    check("max_ordered_messages(2048,4)", m2048, (4.3e4..=4.5e4).contains(&m2048));
    let m8192 = analysis::max_ordered_messages(8192, 4).unwrap();
    check("max_ordered_messages(8192,4)", m8192, (5.6e5..=5.8e5).contains(&m8192));
    let c = analysis::c_opt(2048, 0.25).unwrap();
    check("c_opt(2048,0.25)", c as f64, c == 8);
    let div = hopfield::hnn_diversity(740.0).unwrap();
    check("hnn_diversity(740)", div, div.round() == 56.0);
    let cap = hopfield::hnn_capacity(740.0).unwrap();
    check("hnn_capacity(740)", cap, (4.0e4..=4.2e4).contains(&cap));
    let eff = hopfield::hnn_efficiency(1000.0).unwrap();
    check("hnn_efficiency(1000)", eff, (eff / 0.02 - 1.0).abs() <= 0.1);
    let mem = analysis::clique_memory_bits(2048, 8).unwrap();
    check("clique_memory_bits(2048,8)", mem, mem == 1_835_008.0);
    let pass = bad.is_empty();
    verdict(
        pass,
        if pass {
            format!("7 values in range (bound {m2048:.0} and {m8192:.0}, hnn capacity {cap:.0}, efficiency {eff:.4})")
        } else {
            format!("out of range: {}", bad.join(", "))
        },
    )
}

/// Consensus of every codeword with maximum correlation, erasing disagreements.
fn consensus_oracle(words: &[Vec<i8>], input: &[i8]) -> (Vec<usize>, Vec<SoftSymbol>) {
    let scores: Vec<i64> = words
        .iter()
        .map(|w| w.iter().zip(input).map(|(&a, &b)| i64::from(a) * i64::from(b)).sum())
        .collect();
    let best = *scores.iter().max().unwrap();
    let winners: Vec<usize> = (0..words.len()).filter(|&j| scores[j] == best).collect();
    let symbols = (0..input.len())
        .map(|i| {
            let first = words[winners[0]][i];
            if winners.iter().any(|&j| words[j][i] != first) {
                SoftSymbol::Erased
            } else if first == 1 {
                SoftSymbol::Plus
            } else {
                SoftSymbol::Minus
            }
        })
        .collect();
    (winners, symbols)
}

fn ternary_inputs(kappa: usize) -> impl Iterator<Item = Vec<i8>> {
    (0..3usize.pow(kappa as u32)).map(move |mut code| {
        (0..kappa)
            .map(|_| {
                let v = (code % 3) as i8 - 1;
                code /= 3;
                v
            })
            .collect()
    })
}

fn soft_ml_equivalence() -> Verdict {
    let mut rng = rng(8);
    let mut mismatches = 0u64;
    let mut inputs = 0u64;
    let mut codebooks: Vec<Vec<Vec<i8>>> = Vec::new();
    codebooks.push(
        ["+++-", "--++", "-+-+", "----", "-++-", "+-+-"]
            .iter()
            .map(|w| w.chars().map(|c| if c == '+' { 1 } else { -1 }).collect())
            .collect(),
    );
    codebooks.push(vec![vec![-1, -1, 1], vec![-1, 1, 1]]);
    while codebooks.len() < 202 {
        let kappa = rng.gen_range(1..=8);
        let size = rng.gen_range(1..=32.min(1 << kappa));
        let mut all: Vec<u32> = (0..1u32 << kappa).collect();
        all.shuffle(&mut rng);
        codebooks.push(
            all[..size]
                .iter()
                .map(|&bits| (0..kappa).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).collect())
                .collect(),
        );
    }
    for words in &codebooks {
        let kappa = words[0].len();
        let decoder = SoftMLDecoder::new(Codebook::new(words.clone()).unwrap());
        for input in ternary_inputs(kappa) {
            inputs += 1;
            let out = soft_ml_decode(&decoder, &input, i64::MIN).unwrap();
            let (winners, symbols) = consensus_oracle(words, &input);
            mismatches += u64::from(out.winners != winners || out.symbols != symbols);
        }
    }

    let six = SoftMLDecoder::new(Codebook::new(codebooks[0].clone()).unwrap());
    let six_out = soft_ml_decode(&six, &[1, 1, 1, -1], 0).unwrap();
    let six_ok = six_out.winners == [0] && six_out.v_max == 4 && six_out.to_string() == "+++-";
    let pair = SoftMLDecoder::new(Codebook::new(codebooks[1].clone()).unwrap());
    let pair_ok = soft_ml_decode(&pair, &[-1, 0, 1], 0).unwrap().to_string() == "-X+";

    verdict(
        mismatches == 0 && six_ok && pair_ok,
        format!(
            "{mismatches} mismatches over {inputs} inputs of {} codebooks; six-word example {}; split pair {}",
            codebooks.len(),
            if six_ok { "ok" } else { "wrong" },
            if pair_ok { "ok" } else { "wrong" },
        ),
    )
}

fn max_selector() -> Verdict {
    let mut rng = rng(9);
    let mut mismatches = 0u64;
    for _ in 0..100_000 {
        let len = 1usize << rng.gen_range(0..=7);
        let mut values: Vec<f64> = (0..len)
            .map(|_| rng.gen_range(-(1i64 << 30)..=1 << 30) as f64 / 1024.0)
            .collect();
        let anchor = rng.gen_range(0..len);
        values[anchor] = values[anchor].abs();
        let linear = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let pair = max2(values[0], values[len - 1]) == values[0].max(values[len - 1]);
        let tree = max_tree(&values).unwrap() == linear;
        let circuit = max_tree_circuit(&values).unwrap() == linear;
        mismatches += u64::from(!(pair && tree && circuit));
    }
    verdict(mismatches == 0, format!("{mismatches} mismatches over 100000 inputs"))
}

fn order_independence_and_round_trips() -> Verdict {
    let mut rng = rng(10);
    let topo = ClusterTopology::new(8, 64).unwrap();
    let mut messages: Vec<Message> = (0..500)
        .map(|_| Message::from_bits((0..topo.message_bits()).map(|_| rng.gen()).collect()))
        .collect();
    let build = |ms: &[Message]| {
        let mut net = CliqueNetwork::new(topo);
        for m in ms {
            net.learn(m).unwrap();
        }
        net
    };
    let reference = build(&messages);
    let mut permuted_equal = 0;
    for _ in 0..100 {
        messages.shuffle(&mut rng);
        permuted_equal += usize::from(build(&messages) == reference);
    }

    let bytes = reference.to_snapshot_bytes();
    let from_bytes = CliqueNetwork::from_snapshot_bytes(&bytes).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("net.gbcn");
    reference.save(&path).unwrap();
    let from_file = CliqueNetwork::load(&path).unwrap();
    let snapshot_ok = from_bytes == reference && from_file == reference && from_file.to_snapshot_bytes() == bytes;

    let patterns_ok = messages.iter().all(|m| {
        let p = topo.pattern_of(m).unwrap();
        topo.message_of(&p).unwrap() == *m
            && Message::from_hex(&m.to_hex(), m.len()).unwrap() == *m
            && reference.is_clique(&p).unwrap()
    });

    verdict(
        permuted_equal == 100 && snapshot_ok && patterns_ok,
        format!(
            "{permuted_equal}/100 permutations identical; snapshot {}; message round trips {}",
            if snapshot_ok { "bit-exact" } else { "differs" },
            if patterns_ok { "exact" } else { "differ" }
        ),
    )
}

fn hopfield_sanity() -> Verdict {
    let mut rng = rng(11);
    let mut unstable = 0;
    for _ in 0..200 {
        let n = rng.gen_range(2..=800);
        let v: Vec<i8> = (0..n).map(|_| if rng.gen() { 1 } else { -1 }).collect();
        let mut net = HopfieldNetwork::new(n).unwrap();
        net.learn(&[&v]).unwrap();
        let recall = net.recall(&v, DEFAULT_MAX_ITERS).unwrap();
        unstable += usize::from(!net.is_stable(&v).unwrap() || recall.state != v);
    }

    let (_, mut spec) = preset("hopfield", false).unwrap().remove(0);
    spec.seed = SEED;
    assert_eq!((spec.neurons.as_slice(), spec.messages.as_slice()), (&[740][..], &[56][..]));
    let records = run(&spec).unwrap();
    let rate = |q: &str| {
        let r = records.iter().find(|r| r.quantity == q).unwrap();
        r.successes as f64 / r.trials as f64
    };
    let (instability, recall) = (rate("instability"), rate("recall_error"));
    let near = |e: f64| (e - 0.09).abs() <= 0.05;
    verdict(
        unstable == 0 && (near(instability) || near(recall)),
        format!(
            "single message stable in {}/200 networks; n=740 M=56: instability {:.1}%, recall error {:.1}%",
            200 - unstable,
            100.0 * instability,
            100.0 * recall
        ),
    )
}

type Check<'a> = Box<dyn Fn() -> Verdict + 'a>;

fn main() -> ExitCode {
    let iterative = OnceCell::new();
    let criteria: Vec<(&str, Check)> = vec![
        ("density law", Box::new(density_law)),
        ("zero first-kind error", Box::new(zero_first_kind_error)),
        ("classification law", Box::new(classification_law)),
        ("single-iteration retrieval law", Box::new(retrieval_law)),
        (
            "headline retrieval error",
            Box::new(|| headline_error(iterative.get_or_init(iterative_retrieval))),
        ),
        (
            "iteration benefit",
            Box::new(|| iteration_benefit(iterative.get_or_init(iterative_retrieval))),
        ),
        ("formula spot values", Box::new(formula_values)),
        ("soft decoder oracle equivalence", Box::new(soft_ml_equivalence)),
        ("max selector", Box::new(max_selector)),
        ("order independence and round trips", Box::new(order_independence_and_round_trips)),
        ("hopfield baseline", Box::new(hopfield_sanity)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let v = check();
        failed += usize::from(!v.pass);
        println!(
            "criterion {:>2}: {} {name}: {} [{:.1}s]",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
