use sonde_cp::analytic::{
    cp_control, cp_exact_with_mode, cp_upper_bound_with_mode, laplace_interference,
};
use sonde_cp::channel::AttenuationMode;
use sonde_cp::quadrature::{quad_integrate, QuadratureControl};
use sonde_cp::{cp_exact, cp_upper_bound, NetworkParams, SpatialCase};

const MODES: [AttenuationMode; 2] = [AttenuationMode::PaperLinear, AttenuationMode::DbExact];

fn ctl() -> QuadratureControl {
    cp_control()
}

#[test]
fn laplace_trivial_limits() {
    let p = NetworkParams::default();
    for mode in MODES {
        for case in [SpatialCase::Case1, SpatialCase::Case2] {
            assert_eq!(
                laplace_interference(0.0, 10.0, &case, &p, mode, &ctl()).unwrap(),
                1.0
            );
            let quiet = NetworkParams { lambda_n: 0.0, ..p };
            assert_eq!(
                laplace_interference(5.0, 10.0, &case, &quiet, mode, &ctl()).unwrap(),
                1.0
            );
        }
    }
}

#[test]
fn laplace_nonincreasing_in_s() {
    let p = NetworkParams::default();
    for mode in MODES {
        let mut prev = 1.0;
        for k in -6..=8 {
            let s = 10f64.powi(k);
            let v = laplace_interference(s, 12.0, &SpatialCase::Case1, &p, mode, &ctl()).unwrap();
            assert!(v > 0.0 && v <= prev + 1e-9, "{mode} s={s}: {v} > {prev}");
            prev = v;
        }
    }
}

#[test]
fn laplace_rejects_bad_inputs() {
    let p = NetworkParams::default();
    let m = AttenuationMode::PaperLinear;
    assert!(laplace_interference(-1.0, 10.0, &SpatialCase::Case1, &p, m, &ctl()).is_err());
    assert!(laplace_interference(1.0, 1.0, &SpatialCase::Case1, &p, m, &ctl()).is_err());
    assert!(laplace_interference(1.0, 99.0, &SpatialCase::Case1, &p, m, &ctl()).is_err());
}

// A thin altitude band pins interferers to one altitude: the rain term vanishes
// and the Laplace transform collapses to a 1D integral over x.
#[test]
fn degenerate_altitude_band() {
    let p = NetworkParams {
        h_min_km: 20.0 - 1e-6,
        h_max_km: 20.0,
        ..NetworkParams::default()
    };
    let (s, l) = (500.0, 21.0);
    let x_max = p.h_max_km.hypot(p.r_max_km);
    let mu = p.mu;
    let oracle = quad_integrate(
        |x| x * s / (s + mu * x.powf(p.alpha)),
        l,
        x_max,
        &QuadratureControl::new(1e-12, 1e-12, 200).unwrap(),
    )
    .unwrap()
    .value;
    let oracle = (-2.0 * std::f64::consts::PI * p.lambda_n * oracle).exp();
    let got = laplace_interference(
        s,
        l,
        &SpatialCase::Case2,
        &p,
        AttenuationMode::DbExact,
        &ctl(),
    )
    .unwrap();
    assert!((got - oracle).abs() < 1e-4, "{got} vs {oracle}");
    // Read as a linear divisor the band's gain is unbounded, so every interferer wins.
    let linear = laplace_interference(
        s,
        l,
        &SpatialCase::Case2,
        &p,
        AttenuationMode::PaperLinear,
        &ctl(),
    )
    .unwrap();
    let all = (-std::f64::consts::PI * p.lambda_n * (x_max * x_max - l * l)).exp();
    assert!((linear - all).abs() < 1e-4, "{linear} vs {all}");
}

#[test]
fn tiny_threshold_connects() {
    let p = NetworkParams::default();
    for mode in MODES {
        for case in [SpatialCase::Case1, SpatialCase::Case2] {
            let r = cp_exact_with_mode(&case, &p, -200.0, mode, &ctl()).unwrap();
            assert!((r.cp - 1.0).abs() < 1e-3, "{mode} {case}: {}", r.cp);
        }
    }
}

#[test]
fn bound_without_interference_or_noise_is_one() {
    let p = NetworkParams {
        lambda_n: 0.0,
        ..NetworkParams::default()
    };
    for t in [-40.0, -10.0, 0.0] {
        let r = cp_upper_bound(&SpatialCase::Case2, &p, t, &ctl()).unwrap();
        assert!((r.cp - 1.0).abs() < 1e-9, "{t}: {}", r.cp);
    }
}

#[test]
fn bound_dominates_exact() {
    let p = NetworkParams::default();
    for mode in MODES {
        for t in [-40.0, -20.0, -6.0] {
            let e = cp_exact_with_mode(&SpatialCase::Case1, &p, t, mode, &ctl()).unwrap();
            let b = cp_upper_bound_with_mode(&SpatialCase::Case1, &p, t, mode, &ctl()).unwrap();
            assert!(b.cp >= e.cp - 1e-9, "{mode} {t}: {} < {}", b.cp, e.cp);
        }
    }
}

#[test]
fn result_fields_are_sane() {
    let p = NetworkParams::default();
    let r = cp_exact(&SpatialCase::Case1, &p, -20.0, &ctl()).unwrap();
    assert!((0.0..=1.0).contains(&r.cp));
    assert!(r.error_estimate >= 0.0 && r.error_estimate < 1e-5);
    assert!(!r.metadata.is_empty());
}

#[test]
fn mixture_identity() {
    let p = NetworkParams::default();
    let t = -20.0;
    let c1 = cp_exact(&SpatialCase::Case1, &p, t, &ctl()).unwrap().cp;
    let c2 = cp_exact(&SpatialCase::Case2, &p, t, &ctl()).unwrap().cp;
    for (p1, p2) in [(1.0, 0.0), (0.5, 0.5), (0.3, 0.7)] {
        let c3 = cp_exact(&SpatialCase::Case3 { p1, p2 }, &p, t, &ctl())
            .unwrap()
            .cp;
        assert!(
            (c3 - (p1 * c1 + p2 * c2)).abs() < 2.0 * ctl().abs_tol,
            "{p1}"
        );
    }
}

#[test]
fn nonincreasing_in_threshold_and_density() {
    let p = NetworkParams::default();
    let dense = NetworkParams {
        lambda_n: 0.05,
        ..p
    };
    let mut prev = 1.0;
    for t in [-40.0, -30.0, -20.0, -10.0, 0.0] {
        let v = cp_exact(&SpatialCase::Case1, &p, t, &ctl()).unwrap().cp;
        let d = cp_exact(&SpatialCase::Case1, &dense, t, &ctl()).unwrap().cp;
        assert!(v <= prev + 1e-9, "{t}");
        assert!(d <= v + 1e-9, "{t}: {d} > {v}");
        prev = v;
    }
}

#[test]
fn nondecreasing_in_path_loss_exponent() {
    let p = NetworkParams::default();
    let steep = NetworkParams { alpha: 4.0, ..p };
    for t in [-30.0, -10.0] {
        let a2 = cp_exact(&SpatialCase::Case1, &p, t, &ctl()).unwrap().cp;
        let a4 = cp_exact(&SpatialCase::Case1, &steep, t, &ctl()).unwrap().cp;
        assert!(a4 >= a2 - 1e-9, "{t}: {a4} < {a2}");
    }
}

#[test]
fn invalid_threshold_rejected() {
    let p = NetworkParams::default();
    assert!(cp_exact(&SpatialCase::Case1, &p, f64::NAN, &ctl()).is_err());
    assert!(cp_exact(&SpatialCase::Case1, &p, 1e6, &ctl()).is_err());
}
