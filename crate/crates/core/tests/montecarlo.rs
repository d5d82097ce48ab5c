use sonde_cp::analytic::{cp_control, cp_noise_only};
use sonde_cp::channel::AttenuationMode;
use sonde_cp::montecarlo::{
    estimate_cp, estimate_cp_grid, EmptyNetworkPolicy, InterferenceField, McConfig,
};
use sonde_cp::{NetworkParams, SpatialCase};

fn mc(n_trials: usize, seed: u64) -> McConfig {
    McConfig {
        n_trials,
        seed,
        ..McConfig::default()
    }
}

#[test]
fn lone_node_matches_noise_only_integral() {
    let p = NetworkParams {
        lambda_n: 0.0,
        ..NetworkParams::default()
    };
    let n = 100_000;
    for (mode, t) in [
        (AttenuationMode::DbExact, 110.0),
        (AttenuationMode::PaperLinear, 155.0),
    ] {
        for case in [SpatialCase::Case1, SpatialCase::Case2] {
            let oracle = cp_noise_only(&case, &p, t, mode, &cp_control()).unwrap();
            assert!(oracle > 0.05 && oracle < 0.95, "{mode} {case}: {oracle}");
            let cfg = McConfig {
                mode,
                min_nodes_policy: EmptyNetworkPolicy::ForceSingle,
                ..mc(n, 5)
            };
            let est = estimate_cp(&case, &p, t, &cfg).unwrap().cp;
            let se = (oracle * (1.0 - oracle) / n as f64).sqrt();
            assert!(
                (est - oracle).abs() < 3.0 * se,
                "{mode} {case}: {est} vs {oracle}"
            );
        }
    }
}

#[test]
fn degenerate_mixture_matches_case1() {
    let p = NetworkParams::default();
    let n = 20_000;
    let a = estimate_cp(
        &SpatialCase::Case3 { p1: 1.0, p2: 0.0 },
        &p,
        -20.0,
        &mc(n, 1),
    )
    .unwrap()
    .cp;
    let b = estimate_cp(&SpatialCase::Case1, &p, -20.0, &mc(n, 2))
        .unwrap()
        .cp;
    let pooled = 0.5 * (a + b);
    let z = (a - b) / (pooled * (1.0 - pooled) * 2.0 / n as f64).sqrt();
    assert!(z.abs() < 2.576, "z = {z} ({a} vs {b})");
}

#[test]
fn batches_are_unbiased() {
    let p = NetworkParams::default();
    let t = -30.0;
    let whole = estimate_cp(&SpatialCase::Case2, &p, t, &mc(20_000, 1))
        .unwrap()
        .cp;
    let batches: Vec<f64> = (0..50)
        .map(|b| {
            estimate_cp(&SpatialCase::Case2, &p, t, &mc(1_000, 100 + b))
                .unwrap()
                .cp
        })
        .collect();
    let mean = batches.iter().sum::<f64>() / 50.0;
    let var = batches.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 49.0;
    let se = (var / 50.0).sqrt();
    assert!(
        (mean - whole).abs() < 3.0 * se,
        "{mean} vs {whole} (se {se})"
    );
}

#[test]
fn thread_count_does_not_change_estimates() {
    let p = NetworkParams::default();
    let ts = [-40.0, -20.0, 0.0];
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_cp_grid(&SpatialCase::case3(&p), &p, &ts, &mc(3_000, 9)).unwrap())
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn annulus_field_runs_and_is_seeded() {
    let p = NetworkParams::default();
    let cfg = McConfig {
        field: InterferenceField::Annulus,
        ..mc(2_000, 4)
    };
    let a = estimate_cp(&SpatialCase::Case1, &p, -10.0, &cfg).unwrap();
    let b = estimate_cp(&SpatialCase::Case1, &p, -10.0, &cfg).unwrap();
    assert_eq!(a, b);
    assert!((0.0..=1.0).contains(&a.cp));
}
