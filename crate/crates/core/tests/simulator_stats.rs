use netentropy::channel::{connection_probability, transition_matrix, DEFAULT_SYMBOL_RATE};
use netentropy::entropy::{pair_count, EdgeModel};
use netentropy::simulator::{
    edge_averaged_transition_frequencies, export_snapshots, mean_edge_count, simulate_pinned,
    Initialization,
};
use netentropy::{
    empirical_block_entropy, empirical_transition_frequencies, simulate, stationarity_check,
    ChannelParams, Domain, LinkState, SimConfig,
};

fn paper(eta: f64) -> ChannelParams {
    ChannelParams::new(0.7, eta, 500.0, DEFAULT_SYMBOL_RATE).unwrap()
}

#[test]
fn pinned_edge_on_fraction_obeys_markov_clt() {
    let params = paper(2.0).with_nu(20_000.0);
    let r = 0.7;
    let cfg = SimConfig::new(2, 100_000, 400, 5, Domain::square(), params).unwrap();
    let ens = simulate_pinned(&cfg, r).unwrap();
    let p = connection_probability(r, &params).unwrap();
    let m = transition_matrix(r, &params).unwrap();
    let lambda = 1.0 - m.p01 - m.p10;
    let steps = (cfg.t_steps * cfg.trials) as f64;
    let sigma = (p * (1.0 - p) * (1.0 + lambda) / (1.0 - lambda) / steps).sqrt();
    let on = ens.trials.iter().map(|t| t.on_fraction(0)).sum::<f64>() / cfg.trials as f64;
    assert!(
        (on - p).abs() < 3.0 * sigma,
        "{on} vs {p} (sigma {sigma:.2e})"
    );
}

#[test]
fn pinned_transition_frequencies_match_matrix() {
    let params = paper(3.0);
    for (k, r) in [0.2, 0.7, 1.2].into_iter().enumerate() {
        let cfg = SimConfig::new(2, 20_000, 500, 10 + k as u64, Domain::square(), params).unwrap();
        let freq = empirical_transition_frequencies(&simulate_pinned(&cfg, r).unwrap()).unwrap();
        let m = transition_matrix(r, &params).unwrap();
        for a in LinkState::BOTH {
            let row = freq.row(a).unwrap();
            let se = freq.flip_std_err[a.index()].unwrap();
            let expected = m.flip(a);
            let got = row[1 - a.index()];
            assert!(
                (got - expected).abs() < 3.0 * se,
                "r={r} {a:?}: {got} vs {expected} (se {se:.2e})"
            );
        }
    }
}

#[test]
fn edge_averaged_frequencies_at_fixed_distance() {
    let params = paper(3.0).with_nu(5_000.0);
    let r = 0.6;
    let cfg = SimConfig::new(2, 50_000, 400, 12, Domain::square(), params).unwrap();
    let ens = simulate_pinned(&cfg, r).unwrap();
    let freq = edge_averaged_transition_frequencies(&ens).unwrap();
    let m = transition_matrix(r, &params).unwrap();
    assert_eq!(freq.skipped, [0, 0]);
    assert_eq!(freq.used, [400, 400]);
    for a in LinkState::BOTH {
        let got = freq.row(a).unwrap()[1 - a.index()];
        let se = freq.flip_std_err[a.index()].unwrap();
        assert!(
            (got - m.flip(a)).abs() < 3.0 * se,
            "{a:?}: {got} vs {} (se {se:.2e})",
            m.flip(a)
        );
    }
}

#[test]
fn mean_edge_count_matches_averaged_probability() {
    for (k, domain) in Domain::all().into_iter().enumerate() {
        let params = paper(2.0 + k as f64);
        let cfg = SimConfig::new(50, 10, 2000, 31 + k as u64, domain, params).unwrap();
        let (mean, se) = mean_edge_count(&simulate(&cfg).unwrap());
        let expected = pair_count(50) as f64
            * EdgeModel::with_defaults(domain, params)
                .unwrap()
                .averaged_edge_probability();
        assert!(
            (mean - expected).abs() < 3.0 * se,
            "{domain}: {mean} vs {expected} (se {se:.3})"
        );
    }
}

#[test]
fn block_entropies_match_oracle() {
    // fast fading so that multi-step patterns are well populated
    let params = paper(2.0).with_nu(50_000.0);
    let domain = Domain::square();
    let cfg = SimConfig::new(2, 4, 1_000_000, 77, domain, params).unwrap();
    let ens = simulate(&cfg).unwrap();
    let oracle = EdgeModel::with_defaults(domain, params)
        .unwrap()
        .block_entropy_oracle(4)
        .unwrap();
    for t in 1..=4 {
        let est = empirical_block_entropy(&ens, t).unwrap();
        assert!(est.warning.is_none());
        let delta = (est.miller_madow - oracle.block_at(t)).abs();
        assert!(
            delta < 3.0 * est.std_err + est.bias,
            "t={t}: {} vs {} (se {:.2e})",
            est.miller_madow,
            oracle.block_at(t),
            est.std_err
        );
    }
}

#[test]
fn pooled_frequencies_match_state_weighted_matrix() {
    let params = paper(2.0).with_nu(20_000.0);
    let domain = Domain::disk();
    let cfg = SimConfig::new(2, 200, 200_000, 3, domain, params).unwrap();
    let freq = empirical_transition_frequencies(&simulate(&cfg).unwrap()).unwrap();
    let expected = EdgeModel::with_defaults(domain, params)
        .unwrap()
        .state_weighted_transition_matrix();
    for a in LinkState::BOTH {
        let got = freq.row(a).unwrap()[1 - a.index()];
        let want = expected[a.index()][1 - a.index()];
        let se = freq.flip_std_err[a.index()].unwrap();
        assert!(
            (got - want).abs() < 3.0 * se,
            "{a:?}: {got} vs {want} (se {se:.2e})"
        );
    }
}

#[test]
fn stationarity_check_separates_initializations() {
    let params = paper(2.0).with_nu(5_000.0);
    let cfg = SimConfig::new(20, 200, 200, 9, Domain::square(), params).unwrap();
    let stationary = stationarity_check(&simulate(&cfg).unwrap()).unwrap();
    assert!(stationary.stationary, "max |z| = {}", stationary.max_abs_z);
    let cold =
        stationarity_check(&simulate(&cfg.with_init(Initialization::AllOff)).unwrap()).unwrap();
    assert!(!cold.stationary);
    assert_eq!(cold.densities[0], 0.0);
}

#[test]
fn runs_are_deterministic_across_thread_counts() {
    let cfg = SimConfig::new(
        12,
        300,
        16,
        2024,
        Domain::triangle(),
        paper(4.0).with_nu(2_000.0),
    )
    .unwrap();
    let export = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let ens = pool.install(|| simulate(&cfg).unwrap());
        let mut buf = Vec::new();
        export_snapshots(&ens, &mut buf).unwrap();
        (ens, buf)
    };
    let (a, bytes_a) = export(1);
    let (b, bytes_b) = export(4);
    assert_eq!(a, b);
    assert_eq!(bytes_a, bytes_b);
    let other = simulate(&SimConfig { seed: 2025, ..cfg }).unwrap();
    assert_ne!(a, other);
}

#[test]
fn snapshots_are_simple_undirected_graphs() {
    let cfg = SimConfig::new(15, 20, 3, 1, Domain::disk(), paper(3.0)).unwrap();
    for trial in simulate(&cfg).unwrap().trials {
        for step in 0..cfg.t_steps {
            let s = trial.snapshot(step);
            assert!(s.is_symmetric() && s.has_empty_diagonal());
            assert_eq!(s.edge_count() as u64, trial.on_counts()[step]);
        }
    }
}

#[test]
fn export_has_one_row_per_edge_and_step() {
    let cfg = SimConfig::new(4, 3, 2, 8, Domain::square(), paper(2.0)).unwrap();
    let mut buf = Vec::new();
    export_snapshots(&simulate(&cfg).unwrap(), &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "trial,step,edge_i,edge_j,state");
    assert_eq!(lines.len(), 1 + 2 * 3 * 6);
    assert!(lines[1].starts_with("0,0,0,1,"));
}
