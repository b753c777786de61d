use synclouvain::bench_gen::{generate, inter_edge_fraction, inter_strength_fraction, BenchSpec};
use synclouvain::metrics::nmi;
use synclouvain::{run, RunConfig};

#[test]
fn table_parameters_give_expected_mean_degree() {
    let a = generate(&BenchSpec {
        seed: 1,
        ..BenchSpec::default()
    })
    .unwrap();
    let b = generate(&BenchSpec {
        seed: 2,
        ..BenchSpec::default()
    })
    .unwrap();
    assert_ne!(a.graph, b.graph);
    for pg in [&a, &b] {
        let mean = pg.graph.edge_count() as f64 / pg.graph.node_count() as f64;
        assert!((45.0..=55.0).contains(&mean), "{mean}");
    }
}

#[test]
fn mixing_matches_parameters() {
    for (mu_t, mu_w) in [(0.2, 0.1), (0.5, 0.3), (0.8, 0.6)] {
        let (mut topo, mut weight) = (0.0, 0.0);
        for seed in 0..20 {
            let pg = generate(&BenchSpec {
                mu_t,
                mu_w,
                seed,
                ..BenchSpec::default()
            })
            .unwrap();
            topo += inter_edge_fraction(&pg.graph, &pg.truth) / 20.0;
            weight += inter_strength_fraction(&pg.graph, &pg.truth) / 20.0;
        }
        assert!((topo - mu_t).abs() <= 0.05, "{mu_t}: {topo}");
        assert!((weight - mu_w).abs() <= 0.05, "{mu_w}: {weight}");
    }
}

#[test]
fn heavier_mixing_is_harder_to_recover() {
    for seed in [1, 2] {
        let score = |mu_t: f64, mu_w: f64| {
            let spec = BenchSpec {
                nodes: 300,
                mu_t,
                mu_w,
                seed,
                ..BenchSpec::default()
            };
            let pg = generate(&spec).unwrap();
            let h = run(
                &pg.graph,
                &RunConfig {
                    seed,
                    ..RunConfig::default()
                },
            )
            .unwrap();
            nmi(&h.flat, &pg.truth).unwrap()
        };
        let (easy, hard) = (score(0.2, 0.1), score(0.9, 0.8));
        assert!(hard < easy, "seed {seed}: {hard} vs {easy}");
    }
}
