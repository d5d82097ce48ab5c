//! Adaptive Gauss–Kronrod (G10/K21) quadrature.
//!
//! Globally adaptive bisection in the QUADPACK `qag` style: the panel with the
//! largest error estimate is split until the summed estimate meets
//! `max(abs_tol, rel_tol * |I|)`. Nodes are interior only, so integrable
//! endpoint singularities are never evaluated.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureControl {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureControl {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureControl {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let c = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::param("quad_tol", "tolerances must be > 0"));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::param("max_subdivisions", "must be >= 1"));
        }
        Ok(())
    }

    /// Control for an integral nested inside one governed by `self`.
    pub fn inner(&self) -> Self {
        Self {
            abs_tol: self.abs_tol / 10.0,
            rel_tol: self.rel_tol / 10.0,
            max_subdivisions: self.max_subdivisions,
        }
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

/// Integral estimate with its absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
}

impl Quad {
    pub const ZERO: Quad = Quad {
        value: 0.0,
        error: 0.0,
    };
}

impl std::ops::Add for Quad {
    type Output = Quad;
    fn add(self, rhs: Quad) -> Quad {
        Quad {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
        }
    }
}

// Kronrod abscissae on [-1, 1] (positive half, centre last) and weights.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_096_584,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_146,
];

/// One 21-point Kronrod panel with its embedded 10-point Gauss error estimate.
fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Quad {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut resk = WGK[10] * fc;
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Quad { value, error: err }
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    q: Quad,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.q.error == other.q.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.q.error.total_cmp(&other.q.error)
    }
}

/// Integrate `f` over `[lower, upper]`.
///
/// A reversed interval integrates with the sign flipped; an empty one returns zero.
pub fn quad_integrate<F>(f: F, lower: f64, upper: f64, control: &QuadratureControl) -> Result<Quad>
where
    F: FnMut(f64) -> f64,
{
    quad_integrate_points(f, &[lower, upper], control)
}

/// Integrate over consecutive panels `points[0]..points[1]..`, useful when the
/// integrand has known kinks. Points must be sorted ascending.
pub fn quad_integrate_points<F>(
    mut f: F,
    points: &[f64],
    control: &QuadratureControl,
) -> Result<Quad>
where
    F: FnMut(f64) -> f64,
{
    if points.len() < 2 {
        return Ok(Quad::ZERO);
    }
    let (first, last) = (points[0], points[points.len() - 1]);
    if !first.is_finite() || !last.is_finite() {
        return Err(Error::domain(
            "integration limit",
            first,
            f64::MIN,
            f64::MAX,
        ));
    }
    if first > last {
        let mut rev: Vec<f64> = points.to_vec();
        rev.reverse();
        let q = quad_integrate_points(f, &rev, control)?;
        return Ok(Quad {
            value: -q.value,
            error: q.error,
        });
    }

    let mut heap = BinaryHeap::with_capacity(control.max_subdivisions + points.len());
    let mut total = Quad::ZERO;
    for w in points.windows(2) {
        if w[1] > w[0] {
            let q = gk21(&mut f, w[0], w[1]);
            total = total + q;
            heap.push(Panel {
                a: w[0],
                b: w[1],
                q,
            });
        }
    }
    // Panels too narrow to split further; their error is final.
    let mut frozen_error = 0.0;
    let mut splits = 0;
    loop {
        let tol = control.abs_tol.max(control.rel_tol * total.value.abs());
        if !total.value.is_finite() {
            return Err(Error::Convergence {
                estimate: total.value,
                error_estimate: f64::INFINITY,
            });
        }
        if total.error <= tol {
            return Ok(total);
        }
        if splits >= control.max_subdivisions {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 4.0 * f64::EPSILON * mid.abs()
        {
            frozen_error += worst.q.error;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let left = gk21(&mut f, worst.a, mid);
        let right = gk21(&mut f, mid, worst.b);
        total.value += left.value + right.value - worst.q.value;
        total.error += left.error + right.error - worst.q.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            q: left,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            q: right,
        });
        splits += 1;
    }
    // Resum to shed drift from the incremental updates.
    let value: f64 = heap.iter().map(|p| p.q.value).sum::<f64>();
    let error: f64 = heap.iter().map(|p| p.q.error).sum::<f64>() + frozen_error;
    let tol = control.abs_tol.max(control.rel_tol * value.abs());
    if error <= tol && value.is_finite() {
        return Ok(Quad { value, error });
    }
    Err(Error::Convergence {
        estimate: value,
        error_estimate: error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ctl(tol: f64) -> QuadratureControl {
        QuadratureControl {
            abs_tol: tol,
            rel_tol: tol,
            max_subdivisions: 200,
        }
    }

    #[test]
    fn constant() {
        let q = quad_integrate(|_| 1.0, 0.0, 1.0, &ctl(1e-12)).unwrap();
        assert!((q.value - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn sine_over_half_period() {
        let q = quad_integrate(f64::sin, 0.0, PI, &ctl(1e-12)).unwrap();
        assert!((q.value - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn inverse_sqrt_endpoint_singularity() {
        let c = QuadratureControl {
            abs_tol: 1e-8,
            rel_tol: 1e-8,
            max_subdivisions: 500,
        };
        let q = quad_integrate(|x| x.powf(-0.5), 0.0, 1.0, &c).unwrap();
        assert!((q.value - 2.0).abs() < 1e-6, "{q:?}");
        assert!(q.error >= 0.0);
    }

    #[test]
    fn error_estimate_bounds_true_error() {
        for &(a, b) in &[(0.0, 1.0), (-2.0, 3.0), (1.0, 10.0)] {
            let exact = (b as f64).exp() - (a as f64).exp();
            let q = quad_integrate(f64::exp, a, b, &ctl(1e-10)).unwrap();
            assert!((q.value - exact).abs() <= q.error.max(1e-13 * exact.abs()));
        }
    }

    #[test]
    fn reversed_and_empty_intervals() {
        let q = quad_integrate(|x| x, 1.0, 0.0, &ctl(1e-12)).unwrap();
        assert!((q.value + 0.5).abs() < 1e-14);
        let z = quad_integrate(|x| x, 2.0, 2.0, &ctl(1e-12)).unwrap();
        assert_eq!(z.value, 0.0);
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let c = QuadratureControl {
            abs_tol: 1e-15,
            rel_tol: 1e-15,
            max_subdivisions: 1,
        };
        match quad_integrate(|x: f64| (1.0 / x).sin(), 1e-3, 1.0, &c) {
            Err(Error::Convergence {
                estimate,
                error_estimate,
            }) => {
                assert!(estimate.is_finite());
                assert!(error_estimate > 1e-15);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn breakpoints_handle_kinks() {
        let q = quad_integrate_points(|x: f64| x.abs(), &[-1.0, 0.0, 2.0], &ctl(1e-13)).unwrap();
        assert!((q.value - 2.5).abs() < 1e-13);
    }

    #[test]
    fn deterministic() {
        let f = |x: f64| (x * x).cos() * (-x).exp();
        let a = quad_integrate(f, 0.0, 7.0, &ctl(1e-10)).unwrap();
        let b = quad_integrate(f, 0.0, 7.0, &ctl(1e-10)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_control_rejected() {
        assert!(QuadratureControl::new(0.0, 1e-6, 10).is_err());
        assert!(QuadratureControl::new(1e-6, 1e-6, 0).is_err());
    }
}
