//! Tables of the slant-distance and altitude laws for plotting.

use std::io::Write;

use crate::error::{Error, Result};
use crate::geometry::components;
use crate::params::{NetworkParams, SpatialCase};
use crate::propagation::{
    closed_cdf, closed_pdf, distance_support, numeric_cdf, numeric_pdf, oracle_control,
    SeriesControl,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceRow {
    pub l: f64,
    pub pdf_closed: f64,
    pub pdf_oracle: f64,
    pub cdf_closed: f64,
    pub cdf_oracle: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistTables {
    pub distance: Vec<DistanceRow>,
    /// `(h, vertical_pdf)`.
    pub altitude: Vec<(f64, f64)>,
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

pub fn emit_distribution_tables(
    case: &SpatialCase,
    params: &NetworkParams,
    grid_size: usize,
) -> Result<DistTables> {
    if grid_size < 2 {
        return Err(Error::InvalidSweep("grid size must be >= 2".into()));
    }
    let series = SeriesControl::default();
    let ctl = oracle_control();
    let (lo, hi) = distance_support(case, params)?;
    let distance = grid(lo, hi, grid_size)
        .into_iter()
        .map(|l| {
            Ok(DistanceRow {
                l,
                pdf_closed: closed_pdf(case, l, params, &series)?.value,
                pdf_oracle: numeric_pdf(case, l, params, &ctl)?.value,
                cdf_closed: closed_cdf(case, l, params, &series)?.value,
                cdf_oracle: numeric_cdf(case, l, params, &ctl)?.value,
            })
        })
        .collect::<Result<_>>()?;
    let parts = components(case, params)?;
    let h_lo = parts
        .iter()
        .map(|(_, l)| l.h_range().0)
        .fold(f64::INFINITY, f64::min);
    let h_hi = parts.iter().map(|(_, l)| l.h_range().1).fold(0.0, f64::max);
    let altitude = grid(h_lo, h_hi, grid_size)
        .into_iter()
        .map(|h| (h, parts.iter().map(|(w, l)| w * l.vertical_pdf(h)).sum()))
        .collect();
    Ok(DistTables { distance, altitude })
}

/// Abscissa of the largest value in `(x, y)` pairs.
pub fn argmax(points: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    points
        .into_iter()
        .fold((f64::NAN, f64::NEG_INFINITY), |best, p| {
            if p.1 > best.1 {
                p
            } else {
                best
            }
        })
        .0
}

/// Trapezoid rule over `(x, y)` pairs.
pub fn trapezoid(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum()
}

pub fn write_distance_table<W: Write>(rows: &[DistanceRow], mut out: W) -> Result<()> {
    writeln!(out, "l,pdf_closed,pdf_oracle,cdf_closed,cdf_oracle")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.l, r.pdf_closed, r.pdf_oracle, r.cdf_closed, r.cdf_oracle
        )?;
    }
    Ok(())
}

pub fn write_altitude_table<W: Write>(rows: &[(f64, f64)], mut out: W) -> Result<()> {
    writeln!(out, "h,vertical_pdf")?;
    for (h, v) in rows {
        writeln!(out, "{h},{v}")?;
    }
    Ok(())
}
