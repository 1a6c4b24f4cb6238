use loynes::{
    load_trace, sample_dm1, sample_finite_markov, sample_two_state, save_trace, Dm1Spec,
    ProcessSpec, SquareMatrix, Trace, TraceKind, TwoStateSpec,
};
use proptest::prelude::*;

fn transition_counts(values: &[f64]) -> [[f64; 2]; 2] {
    let idx = |v: f64| usize::from(v > 0.0);
    let mut c = [[0.0; 2]; 2];
    for w in values.windows(2) {
        c[idx(w[0])][idx(w[1])] += 1.0;
    }
    c
}

#[test]
fn two_state_occupancy_is_stationary() {
    let (alpha, beta) = (1.0 / 16.0, 3.0 / 16.0);
    let n = 100_000;
    let t = sample_two_state(&TwoStateSpec::new(alpha, beta, n, 2024)).unwrap();
    let p = alpha / (alpha + beta);
    let frac = t.values().iter().filter(|v| **v > 0.0).count() as f64 / n as f64;
    // asymptotic variance of a two-state occupancy mean carries (1+l)/(1-l),
    // l = 1 - alpha - beta the second eigenvalue
    let l = 1.0 - alpha - beta;
    let se = (p * (1.0 - p) / n as f64 * (1.0 + l) / (1.0 - l)).sqrt();
    assert!(
        (frac - p).abs() < 4.0 * se,
        "occupancy {frac} vs {p}, se {se}"
    );
}

#[test]
fn two_state_exit_probability_matches_beta() {
    let t = sample_two_state(&TwoStateSpec::new(1.0 / 16.0, 3.0 / 16.0, 100_000, 5)).unwrap();
    let c = transition_counts(t.values());
    let from_plus = c[1][0] + c[1][1];
    let p_hat = c[1][0] / from_plus;
    let beta = 3.0 / 16.0;
    let sigma = (beta * (1.0 - beta) / from_plus).sqrt();
    assert!(
        (p_hat - beta).abs() < 3.0 * sigma,
        "{p_hat} vs {beta} (sigma {sigma})"
    );
}

#[test]
fn two_state_and_finite_markov_agree_in_distribution() {
    let spec = TwoStateSpec::new(1.0 / 16.0, 3.0 / 16.0, 100_000, 10);
    let a = sample_two_state(&spec).unwrap();
    let mut embedded = spec.as_finite_markov();
    embedded.seed = 11;
    let b = sample_finite_markov(&embedded).unwrap();
    let (ca, cb) = (transition_counts(a.values()), transition_counts(b.values()));
    // Pearson chi-square of homogeneity, one 2x2 table per source state
    let mut chi2 = 0.0;
    for s in 0..2 {
        let table = [ca[s], cb[s]];
        let total: f64 = table.iter().flatten().sum();
        for row in table.iter() {
            let row_total: f64 = row.iter().sum();
            for (col, observed) in row.iter().enumerate() {
                let col_total = table[0][col] + table[1][col];
                let expected = row_total * col_total / total;
                chi2 += (observed - expected).powi(2) / expected;
            }
        }
    }
    // 2 degrees of freedom, 0.999 quantile
    assert!(chi2 < 13.82, "chi-square {chi2}");
}

#[test]
fn dm1_mean_and_tail() {
    let t = sample_dm1(&Dm1Spec::new(1.0, 10.0 / 11.0, 100_000, 42)).unwrap();
    let n = t.len() as f64;
    let mean = t.values().iter().sum::<f64>() / n;
    assert!((mean - (1.0 - 1.1)).abs() < 0.02, "mean {mean}");
    // P(X > x) = exp(-alpha (x + 1/beta)); x = 0.9 gives exp(-2)
    let tail = t.values().iter().filter(|v| **v > 0.9).count() as f64 / n;
    assert!((tail - (-2.0f64).exp()).abs() < 0.005, "tail {tail}");
    assert!(t.values().iter().all(|v| *v >= -1.1));
}

#[test]
fn samplers_are_deterministic() {
    let specs = [
        ProcessSpec::TwoState(TwoStateSpec::new(0.1, 0.3, 5000, 8)),
        ProcessSpec::Dm1(Dm1Spec::new(2.0, 1.0, 5000, 8)),
        ProcessSpec::FiniteMarkov(loynes::FiniteMarkovSpec {
            transition: SquareMatrix::from_rows(vec![
                vec![0.5, 0.25, 0.25],
                vec![0.1, 0.8, 0.1],
                vec![0.3, 0.3, 0.4],
            ])
            .unwrap(),
            values: vec![-2.0, -0.5, 1.5],
            init: None,
            n: 5000,
            seed: 8,
            warmup: 0,
        }),
    ];
    for spec in &specs {
        let a = spec.sample().unwrap();
        let b = std::thread::spawn({
            let spec = spec.clone();
            move || spec.sample().unwrap()
        })
        .join()
        .unwrap();
        assert_eq!(a.values(), b.values());
        assert_ne!(
            a.values(),
            spec.with_run(5000, 9).sample().unwrap().values()
        );
    }
}

#[test]
fn finite_markov_values_stay_in_support() {
    let spec = loynes::FiniteMarkovSpec {
        transition: SquareMatrix::from_rows(vec![
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
        ])
        .unwrap(),
        values: vec![-1.0, 0.5, 3.0],
        init: None,
        n: 300,
        seed: 1,
        warmup: 0,
    };
    let t = sample_finite_markov(&spec).unwrap();
    assert!(t.values().iter().all(|v| spec.values.contains(v)));
    // deterministic cycle: each value is followed by the next one in the cycle
    for w in t.values().windows(2) {
        let i = spec.values.iter().position(|v| *v == w[0]).unwrap();
        assert_eq!(w[1], spec.values[(i + 1) % 3]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn save_then_load_is_identity(values in proptest::collection::vec(-1e6f64..1e6, 1..200)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        let trace = Trace::increments(values.clone()).unwrap();
        save_trace(&trace, &path).unwrap();
        let back = load_trace(&path, TraceKind::Increments).unwrap();
        prop_assert_eq!(back.values(), &values[..]);
    }
}
