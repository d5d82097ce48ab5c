use sonde_cp::experiment::dist::{argmax, trapezoid};
use sonde_cp::experiment::emit_distribution_tables;
use sonde_cp::{NetworkParams, SpatialCase};

#[test]
fn tables_are_densities() {
    let p = NetworkParams::default();
    for case in [
        SpatialCase::Case1,
        SpatialCase::Case2,
        SpatialCase::case3(&p),
    ] {
        let t = emit_distribution_tables(&case, &p, 401).unwrap();
        let pdf: Vec<(f64, f64)> = t.distance.iter().map(|r| (r.l, r.pdf_closed)).collect();
        assert!(pdf.iter().all(|&(_, v)| v >= 0.0));
        assert!(t.altitude.iter().all(|&(_, v)| v >= 0.0));
        assert!(
            (trapezoid(&pdf) - 1.0).abs() < 1e-3,
            "{case}: {}",
            trapezoid(&pdf)
        );
        assert!((trapezoid(&t.altitude) - 1.0).abs() < 1e-3, "{case}");
        for r in &t.distance {
            assert!((r.cdf_closed - r.cdf_oracle).abs() < 1e-6);
            assert!((r.pdf_closed - r.pdf_oracle).abs() < 1e-5);
        }
    }
}

#[test]
fn peaks_separate_the_cases() {
    let p = NetworkParams::default();
    let peak = |case| {
        let t = emit_distribution_tables(&case, &p, 201).unwrap();
        (
            argmax(t.distance.iter().map(|r| (r.l, r.pdf_closed))),
            argmax(t.altitude.iter().copied()),
        )
    };
    let (l1, h1) = peak(SpatialCase::Case1);
    let (l2, h2) = peak(SpatialCase::Case2);
    assert!(l2 - l1 > 3.0, "{l1} {l2}");
    assert!(h2 - h1 > 3.0, "{h1} {h2}");
}

#[test]
fn tiny_grid_rejected() {
    let p = NetworkParams::default();
    assert!(emit_distribution_tables(&SpatialCase::Case1, &p, 1).is_err());
}
