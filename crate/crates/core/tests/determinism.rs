use cliquenet::experiments::{run, to_csv_string, ExperimentKind, SweepSpec};

fn csv_with_threads(spec: &SweepSpec, threads: usize) -> String {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| to_csv_string(&run(spec).unwrap()).unwrap())
}

fn specs() -> Vec<SweepSpec> {
    let mut out = Vec::new();
    for kind in [
        ExperimentKind::Density,
        ExperimentKind::Accept,
        ExperimentKind::Ratio,
        ExperimentKind::Retrieval,
        ExperimentKind::Capacity,
        ExperimentKind::HopfieldBaseline,
    ] {
        let mut s = SweepSpec::new(kind);
        s.clusters = vec![3, 4];
        s.fanals = vec![16];
        s.messages = vec![20, 60];
        s.iterations = vec![1, 3];
        s.trials = 300;
        s.seed = 42;
        s.neurons = vec![40];
        s.target_error = 0.05;
        match kind {
            ExperimentKind::Capacity => s.messages.clear(),
            ExperimentKind::HopfieldBaseline => {
                s.messages = vec![3];
                s.trials = 20;
            }
            _ => {}
        }
        out.push(s);
    }
    out
}

#[test]
fn output_does_not_depend_on_thread_count() {
    for spec in specs() {
        let one = csv_with_threads(&spec, 1);
        let four = csv_with_threads(&spec, 4);
        assert_eq!(one, four, "{}", spec.experiment);
        assert!(one.lines().count() > 1, "{}", spec.experiment);
    }
}

#[test]
fn seed_changes_the_sample() {
    let mut spec = specs().remove(3);
    let a = csv_with_threads(&spec, 2);
    spec.seed += 1;
    assert_ne!(a, csv_with_threads(&spec, 2));
}
