//! Horizontal, vertical and joint 3D placement laws, and samplers for them.
//!
//! A radiosonde sits at horizontal radius `r` and vertical distance `h` below
//! the receiver, which is the origin. Cases 1 and 2 are product laws over
//! the box `[0, R_max] x [H_min, H_max]`. Case 3 mixes them. The spherical
//! baseline spreads nodes uniformly through the lower hemisphere of a given
//! radius, cut off at `h >= H_min`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::params::{NetworkParams, SpatialCase};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HorizontalModel {
    /// Trajectory radii uniform over the disk: `F(r) = (r / R_max)^2`.
    Circular,
    /// Nearest-point distance of a planar PPP, truncated to `[0, R_max]`.
    Irregular,
}

/// One horizontal law with its parameters bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HorizontalLaw {
    Circular { r_max: f64 },
    Irregular { density: f64, r_max: f64 },
}

impl HorizontalLaw {
    pub fn new(model: HorizontalModel, params: &NetworkParams) -> Result<Self> {
        match model {
            HorizontalModel::Circular => Ok(HorizontalLaw::Circular {
                r_max: params.r_max_km,
            }),
            HorizontalModel::Irregular => {
                if params.lambda_n <= 0.0 {
                    return Err(Error::DegenerateDensity(params.lambda_n));
                }
                Ok(HorizontalLaw::Irregular {
                    density: params.lambda_n,
                    r_max: params.r_max_km,
                })
            }
        }
    }

    pub fn r_max(&self) -> f64 {
        match *self {
            HorizontalLaw::Circular { r_max } | HorizontalLaw::Irregular { r_max, .. } => r_max,
        }
    }

    /// CDF, clamped to 0 and 1 outside `[0, R_max]`.
    pub fn cdf(&self, r: f64) -> f64 {
        let r_max = self.r_max();
        if r <= 0.0 {
            return 0.0;
        }
        if r >= r_max {
            return 1.0;
        }
        match *self {
            HorizontalLaw::Circular { r_max } => (r / r_max).powi(2),
            HorizontalLaw::Irregular { density, r_max } => {
                (-PI * density * r * r).exp_m1() / (-PI * density * r_max * r_max).exp_m1()
            }
        }
    }

    /// Density, zero outside `[0, R_max]`.
    pub fn pdf(&self, r: f64) -> f64 {
        let r_max = self.r_max();
        if !(0.0..=r_max).contains(&r) {
            return 0.0;
        }
        match *self {
            HorizontalLaw::Circular { r_max } => 2.0 * r / (r_max * r_max),
            HorizontalLaw::Irregular { density, r_max } => {
                let k = PI * density;
                2.0 * k * r * (-k * r * r).exp() / -(-k * r_max * r_max).exp_m1()
            }
        }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            HorizontalLaw::Circular { r_max } => r_max * u.sqrt(),
            HorizontalLaw::Irregular { density, r_max } => {
                let k = PI * density;
                let r2 = -(u * (-k * r_max * r_max).exp_m1()).ln_1p() / k;
                r2.max(0.0).sqrt().min(r_max)
            }
        }
    }
}

fn check_radius(r: f64, params: &NetworkParams) -> Result<()> {
    if !(0.0..=params.r_max_km).contains(&r) {
        return Err(Error::domain("r", r, 0.0, params.r_max_km));
    }
    Ok(())
}

/// CDF of the horizontal distance under `model`.
pub fn horizontal_cdf(model: HorizontalModel, r: f64, params: &NetworkParams) -> Result<f64> {
    check_radius(r, params)?;
    Ok(HorizontalLaw::new(model, params)?.cdf(r))
}

/// Density of the horizontal distance under `model` (1/km).
pub fn horizontal_pdf(model: HorizontalModel, r: f64, params: &NetworkParams) -> Result<f64> {
    check_radius(r, params)?;
    Ok(HorizontalLaw::new(model, params)?.pdf(r))
}

/// Weibull law renormalised to the altitude band `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedWeibull {
    shape: f64,
    scale: f64,
    lo: f64,
    hi: f64,
    // (lo / scale)^shape
    z_lo: f64,
    // Mass of the untruncated law inside [lo, hi], divided by exp(-z_lo).
    rel_mass: f64,
}

impl TruncatedWeibull {
    pub fn new(shape: f64, scale: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(shape > 0.0) {
            return Err(Error::param("k_s", "shape must be > 0"));
        }
        if !(scale > 0.0) {
            return Err(Error::param("lambda_s", "scale must be > 0"));
        }
        if !(lo >= 0.0 && hi > lo) {
            return Err(Error::param(
                "h_max_km",
                "truncation band must be non-empty",
            ));
        }
        let z_lo = (lo / scale).powf(shape);
        let z_hi = (hi / scale).powf(shape);
        let rel_mass = -(-(z_hi - z_lo)).exp_m1();
        if !(rel_mass > 0.0) {
            return Err(Error::param(
                "lambda_s",
                "Weibull law puts no mass inside the altitude band",
            ));
        }
        Ok(Self {
            shape,
            scale,
            lo,
            hi,
            z_lo,
            rel_mass,
        })
    }

    /// Case 1 altitude law of `params`.
    pub fn case1(params: &NetworkParams) -> Result<Self> {
        Self::new(
            params.k_s_case1,
            params.lambda_s_case1,
            params.h_min_km,
            params.h_max_km,
        )
    }

    /// Case 2 altitude law of `params`.
    pub fn case2(params: &NetworkParams) -> Result<Self> {
        Self::new(
            params.k_s_case2,
            params.lambda_s_case2,
            params.h_min_km,
            params.h_max_km,
        )
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Normaliser `exp(-(lo/scale)^k) - exp(-(hi/scale)^k)`.
    pub fn normaliser(&self) -> f64 {
        (-self.z_lo).exp() * self.rel_mass
    }

    /// Density, zero outside the band.
    pub fn pdf(&self, h: f64) -> f64 {
        if !(self.lo..=self.hi).contains(&h) {
            return 0.0;
        }
        let x = h / self.scale;
        let z = x.powf(self.shape);
        // exp(-z) / normaliser, folded so neither factor underflows alone.
        self.shape / self.scale * x.powf(self.shape - 1.0) * (self.z_lo - z).exp() / self.rel_mass
    }

    pub fn cdf(&self, h: f64) -> f64 {
        if h <= self.lo {
            return 0.0;
        }
        if h >= self.hi {
            return 1.0;
        }
        let z = (h / self.scale).powf(self.shape);
        -(-(z - self.z_lo)).exp_m1() / self.rel_mass
    }

    pub fn quantile(&self, u: f64) -> f64 {
        let dz = -(-u * self.rel_mass).ln_1p();
        let h = self.scale * (self.z_lo + dz).powf(1.0 / self.shape);
        h.clamp(self.lo, self.hi)
    }
}

/// Density of the altitude `h` under `law`, erroring outside the band.
pub fn vertical_pdf(h: f64, law: &TruncatedWeibull) -> Result<f64> {
    let (lo, hi) = law.bounds();
    if !(lo..=hi).contains(&h) {
        return Err(Error::domain("h", h, lo, hi));
    }
    Ok(law.pdf(h))
}

/// Uniform law on `{r^2 + h^2 <= radius^2, h >= h_min}` in cylindrical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hemisphere {
    radius: f64,
    h_min: f64,
    volume: f64,
}

impl Hemisphere {
    pub fn new(radius: f64, h_min: f64) -> Result<Self> {
        if !(radius > h_min && h_min >= 0.0) {
            return Err(Error::param(
                "sphere_radius_km",
                format!("must exceed h_min_km = {h_min}"),
            ));
        }
        let volume =
            PI * (radius * radius * (radius - h_min) - (radius.powi(3) - h_min.powi(3)) / 3.0);
        Ok(Self {
            radius,
            h_min,
            volume,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Volume of the truncated region.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Volume of the full lower hemisphere.
    pub fn hemisphere_volume(&self) -> f64 {
        2.0 / 3.0 * PI * self.radius.powi(3)
    }

    pub fn r_upper(&self, h: f64) -> f64 {
        (self.radius * self.radius - h * h).max(0.0).sqrt()
    }

    pub fn joint_pdf(&self, r: f64, h: f64) -> f64 {
        if h < self.h_min || r < 0.0 || r * r + h * h > self.radius * self.radius {
            return 0.0;
        }
        2.0 * PI * r / self.volume
    }

    pub fn vertical_pdf(&self, h: f64) -> f64 {
        if !(self.h_min..=self.radius).contains(&h) {
            return 0.0;
        }
        PI * (self.radius * self.radius - h * h) / self.volume
    }

    pub fn vertical_cdf(&self, h: f64) -> f64 {
        if h <= self.h_min {
            return 0.0;
        }
        if h >= self.radius {
            return 1.0;
        }
        let rho2 = self.radius * self.radius;
        PI * (rho2 * (h - self.h_min) - (h.powi(3) - self.h_min.powi(3)) / 3.0) / self.volume
    }

    /// Inverse of [`Hemisphere::vertical_cdf`] by safeguarded Newton iteration.
    pub fn vertical_quantile(&self, u: f64) -> f64 {
        let (mut lo, mut hi) = (self.h_min, self.radius);
        let mut h = self.h_min + u * (self.radius - self.h_min);
        for _ in 0..100 {
            let g = self.vertical_cdf(h) - u;
            if g.abs() < 1e-15 {
                break;
            }
            if g > 0.0 {
                hi = h;
            } else {
                lo = h;
            }
            let d = self.vertical_pdf(h);
            let newton = h - g / d;
            h = if d > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-14 * self.radius {
                break;
            }
        }
        h
    }
}

/// A single (non-mixture) joint placement law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Law {
    Product {
        horizontal: HorizontalLaw,
        vertical: TruncatedWeibull,
    },
    Hemisphere(Hemisphere),
}

impl Law {
    pub fn case1(params: &NetworkParams) -> Result<Self> {
        // lambda_n = 0 takes the small-density limit of the irregular law, the uniform disk.
        let horizontal = if params.lambda_n > 0.0 {
            HorizontalLaw::new(HorizontalModel::Irregular, params)?
        } else {
            HorizontalLaw::new(HorizontalModel::Circular, params)?
        };
        Ok(Law::Product {
            horizontal,
            vertical: TruncatedWeibull::case1(params)?,
        })
    }

    pub fn case2(params: &NetworkParams) -> Result<Self> {
        Ok(Law::Product {
            horizontal: HorizontalLaw::new(HorizontalModel::Circular, params)?,
            vertical: TruncatedWeibull::case2(params)?,
        })
    }

    /// Altitude range of the support.
    pub fn h_range(&self) -> (f64, f64) {
        match self {
            Law::Product { vertical, .. } => vertical.bounds(),
            Law::Hemisphere(s) => (s.h_min, s.radius),
        }
    }

    /// Largest horizontal radius in the support at altitude `h`.
    pub fn r_upper(&self, h: f64) -> f64 {
        match self {
            Law::Product { horizontal, .. } => horizontal.r_max(),
            Law::Hemisphere(s) => s.r_upper(h),
        }
    }

    /// Largest slant distance in the support.
    pub fn l_max(&self) -> f64 {
        match self {
            Law::Product {
                horizontal,
                vertical,
            } => vertical.bounds().1.hypot(horizontal.r_max()),
            Law::Hemisphere(s) => s.radius,
        }
    }

    pub fn joint_pdf(&self, r: f64, h: f64) -> f64 {
        match self {
            Law::Product {
                horizontal,
                vertical,
            } => horizontal.pdf(r) * vertical.pdf(h),
            Law::Hemisphere(s) => s.joint_pdf(r, h),
        }
    }

    pub fn vertical_pdf(&self, h: f64) -> f64 {
        match self {
            Law::Product { vertical, .. } => vertical.pdf(h),
            Law::Hemisphere(s) => s.vertical_pdf(h),
        }
    }

    pub fn vertical_cdf(&self, h: f64) -> f64 {
        match self {
            Law::Product { vertical, .. } => vertical.cdf(h),
            Law::Hemisphere(s) => s.vertical_cdf(h),
        }
    }

    /// Marginal CDF of the horizontal radius.
    pub fn horizontal_cdf(&self, r: f64) -> f64 {
        match self {
            Law::Product { horizontal, .. } => horizontal.cdf(r),
            Law::Hemisphere(s) => {
                // P[R <= r] = 1 - (1/V) * ∫ π (ρ² - h² - r²) dh over h where that is positive.
                if r <= 0.0 {
                    return 0.0;
                }
                let rho2 = s.radius * s.radius;
                let top = (rho2 - r * r).max(0.0).sqrt();
                if top <= s.h_min {
                    return 1.0;
                }
                let c = rho2 - r * r;
                let outside = PI * (c * (top - s.h_min) - (top.powi(3) - s.h_min.powi(3)) / 3.0);
                1.0 - outside / s.volume
            }
        }
    }

    pub fn vertical_quantile(&self, u: f64) -> f64 {
        match self {
            Law::Product { vertical, .. } => vertical.quantile(u),
            Law::Hemisphere(s) => s.vertical_quantile(u),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Placement {
        match self {
            Law::Product {
                horizontal,
                vertical,
            } => {
                let r = horizontal.quantile(rng.random::<f64>());
                let h = vertical.quantile(rng.random::<f64>());
                Placement::new(r, h)
            }
            Law::Hemisphere(s) => {
                let h = s.vertical_quantile(rng.random::<f64>());
                let r = s.r_upper(h) * rng.random::<f64>().sqrt();
                Placement::new(r, h)
            }
        }
    }
}

/// The single laws making up `case`, with their mixture weights.
pub fn components(case: &SpatialCase, params: &NetworkParams) -> Result<Vec<(f64, Law)>> {
    case.validate(params)?;
    Ok(match *case {
        SpatialCase::Case1 => vec![(1.0, Law::case1(params)?)],
        SpatialCase::Case2 => vec![(1.0, Law::case2(params)?)],
        SpatialCase::Case3 { p1, p2 } => {
            vec![(p1, Law::case1(params)?), (p2, Law::case2(params)?)]
        }
        SpatialCase::SphericalBaseline { radius_km } => {
            vec![(
                1.0,
                Law::Hemisphere(Hemisphere::new(radius_km, params.h_min_km)?),
            )]
        }
    })
}

/// One radiosonde position relative to the receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    pub r_km: f64,
    pub h_km: f64,
    pub l_km: f64,
    pub sin_theta: f64,
}

impl Placement {
    pub fn new(r_km: f64, h_km: f64) -> Self {
        let l_km = r_km.hypot(h_km);
        Self {
            r_km,
            h_km,
            l_km,
            sin_theta: h_km / l_km,
        }
    }
}

/// Joint density of `(r, h)` in 1/km², zero outside the support.
pub fn joint_pdf(case: &SpatialCase, r: f64, h: f64, params: &NetworkParams) -> f64 {
    match components(case, params) {
        Ok(parts) => parts.iter().map(|(w, law)| w * law.joint_pdf(r, h)).sum(),
        Err(_) => 0.0,
    }
}

/// Sampler for one case with its laws bound once.
#[derive(Debug, Clone)]
pub struct PlacementSampler {
    parts: Vec<(f64, Law)>,
    volume: f64,
}

impl PlacementSampler {
    pub fn new(case: &SpatialCase, params: &NetworkParams) -> Result<Self> {
        params.validate()?;
        let parts = components(case, params)?;
        let volume = match (case, &parts[0].1) {
            (SpatialCase::SphericalBaseline { .. }, Law::Hemisphere(s)) => s.hemisphere_volume(),
            _ => params.cylinder_volume(),
        };
        Ok(Self { parts, volume })
    }

    /// Volume whose Poisson count sets the network size.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Placement {
        self.sample_labelled(rng).1
    }

    /// Placement together with the component law it came from.
    pub fn sample_labelled<R: Rng + ?Sized>(&self, rng: &mut R) -> (&Law, Placement) {
        if self.parts.len() == 1 {
            let law = &self.parts[0].1;
            return (law, law.sample(rng));
        }
        // Mixture: draw the case label first.
        let u: f64 = rng.random();
        let law = if u < self.parts[0].0 {
            &self.parts[0].1
        } else {
            &self.parts[1].1
        };
        (law, law.sample(rng))
    }

    /// Draw the node count and every placement.
    pub fn sample_network<R: Rng + ?Sized>(&self, lambda_n: f64, rng: &mut R) -> Vec<Placement> {
        let n = poisson_count(lambda_n * self.volume, rng);
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

pub(crate) fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if !(mean > 0.0) {
        return 0;
    }
    let dist = Poisson::new(mean).expect("positive finite Poisson mean");
    let n: f64 = dist.sample(rng);
    n as usize
}

/// Draw one placement from the joint law of `case`.
pub fn sample_placement<R: Rng + ?Sized>(
    case: &SpatialCase,
    params: &NetworkParams,
    rng: &mut R,
) -> Result<Placement> {
    Ok(PlacementSampler::new(case, params)?.sample(rng))
}

/// Draw a whole network: a Poisson count over the case's volume, then i.i.d. placements.
pub fn sample_network<R: Rng + ?Sized>(
    case: &SpatialCase,
    params: &NetworkParams,
    rng: &mut R,
) -> Result<Vec<Placement>> {
    Ok(PlacementSampler::new(case, params)?.sample_network(params.lambda_n, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{quad_integrate, QuadratureControl};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p() -> NetworkParams {
        NetworkParams::default()
    }

    #[test]
    fn circular_cdf_quarter_at_half_radius() {
        let v = horizontal_cdf(HorizontalModel::Circular, 10.0, &p()).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn irregular_cdf_normalised_at_rmax() {
        let v = horizontal_cdf(HorizontalModel::Irregular, 20.0, &p()).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn irregular_cdf_direct_value() {
        // (1 - e^{-π}) / (1 - e^{-4π})
        let expect = (1.0 - (-PI).exp()) / (1.0 - (-4.0 * PI).exp());
        let v = horizontal_cdf(HorizontalModel::Irregular, 10.0, &p()).unwrap();
        assert!((v - expect).abs() < 1e-14);
        assert!((v - 0.9568).abs() < 5e-5);
    }

    #[test]
    fn circular_pdf_at_rmax() {
        let v = horizontal_pdf(HorizontalModel::Circular, 20.0, &p()).unwrap();
        assert!((v - 0.1).abs() < 1e-15);
    }

    #[test]
    fn irregular_pdf_matches_cdf_difference() {
        let step = 1e-4;
        let fd = (horizontal_cdf(HorizontalModel::Irregular, 10.0 + step, &p()).unwrap()
            - horizontal_cdf(HorizontalModel::Irregular, 10.0 - step, &p()).unwrap())
            / (2.0 * step);
        let v = horizontal_pdf(HorizontalModel::Irregular, 10.0, &p()).unwrap();
        assert!((v - fd).abs() < 1e-6);
    }

    #[test]
    fn horizontal_errors() {
        assert!(matches!(
            horizontal_cdf(HorizontalModel::Circular, 21.0, &p()),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            horizontal_pdf(HorizontalModel::Circular, -0.1, &p()),
            Err(Error::Domain { .. })
        ));
        let zero = NetworkParams {
            lambda_n: 0.0,
            ..p()
        };
        assert!(matches!(
            horizontal_cdf(HorizontalModel::Irregular, 1.0, &zero),
            Err(Error::DegenerateDensity(_))
        ));
    }

    #[test]
    fn vertical_pdf_case1_at_floor() {
        let law = TruncatedWeibull::case1(&p()).unwrap();
        let v = vertical_pdf(5.0, &law).unwrap();
        assert!((v - 0.5 / (1.0 - (-7.5f64).exp())).abs() < 1e-14);
        assert!((v - 0.50027).abs() < 1e-5);
        assert!(vertical_pdf(4.9, &law).is_err());
        assert!(vertical_pdf(20.1, &law).is_err());
    }

    #[test]
    fn case1_vertical_is_the_exponential_profile() {
        let law = TruncatedWeibull::case1(&p()).unwrap();
        let norm = (-2.5f64).exp() - (-10.0f64).exp();
        for i in 0..=150 {
            let h = 5.0 + 0.1 * i as f64;
            let expo = 0.5 * (-h / 2.0).exp() / norm;
            assert!((law.pdf(h) - expo).abs() < 1e-12 * expo.max(1.0));
        }
    }

    #[test]
    fn vertical_quantile_inverts_cdf() {
        for law in [
            TruncatedWeibull::case1(&p()).unwrap(),
            TruncatedWeibull::case2(&p()).unwrap(),
        ] {
            for i in 1..100 {
                let u = i as f64 / 100.0;
                assert!((law.cdf(law.quantile(u)) - u).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hemisphere_vertical_quantile_inverts_cdf() {
        let s = Hemisphere::new(p().default_sphere_radius(), 5.0).unwrap();
        for i in 1..100 {
            let u = i as f64 / 100.0;
            assert!((s.vertical_cdf(s.vertical_quantile(u)) - u).abs() < 1e-12);
        }
    }

    #[test]
    fn joint_pdf_zero_outside_box() {
        for case in [
            SpatialCase::Case1,
            SpatialCase::Case2,
            SpatialCase::case3(&p()),
        ] {
            assert_eq!(joint_pdf(&case, 21.0, 10.0, &p()), 0.0);
            assert_eq!(joint_pdf(&case, 10.0, 4.0, &p()), 0.0);
            assert_eq!(joint_pdf(&case, 10.0, 20.5, &p()), 0.0);
            assert_eq!(joint_pdf(&case, -1.0, 10.0, &p()), 0.0);
        }
    }

    #[test]
    fn case3_degenerate_weight_is_case1() {
        let c3 = SpatialCase::Case3 { p1: 1.0, p2: 0.0 };
        for (r, h) in [(0.5, 5.1), (10.0, 12.0), (19.0, 19.9)] {
            assert_eq!(
                joint_pdf(&c3, r, h, &p()),
                joint_pdf(&SpatialCase::Case1, r, h, &p())
            );
        }
    }

    #[test]
    fn joint_pdfs_integrate_to_one() {
        let ctl = QuadratureControl {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 200,
        };
        for case in [
            SpatialCase::Case1,
            SpatialCase::Case2,
            SpatialCase::case3(&p()),
            SpatialCase::sphere(&p()),
        ] {
            let parts = components(&case, &p()).unwrap();
            let mut total = 0.0;
            for (w, law) in &parts {
                let (h_lo, h_hi) = law.h_range();
                let q = quad_integrate(
                    |h| {
                        quad_integrate(|r| law.joint_pdf(r, h), 0.0, law.r_upper(h), &ctl.inner())
                            .unwrap()
                            .value
                    },
                    h_lo,
                    h_hi,
                    &ctl,
                )
                .unwrap();
                total += w * q.value;
            }
            assert!((total - 1.0).abs() < 1e-8, "{case}: {total}");
        }
    }

    #[test]
    fn samples_respect_support_and_seed() {
        let params = p();
        for case in [
            SpatialCase::Case1,
            SpatialCase::Case2,
            SpatialCase::case3(&params),
            SpatialCase::sphere(&params),
        ] {
            let s = PlacementSampler::new(&case, &params).unwrap();
            let mut a = ChaCha8Rng::seed_from_u64(9);
            let mut b = ChaCha8Rng::seed_from_u64(9);
            for _ in 0..2000 {
                let x = s.sample(&mut a);
                assert_eq!(x, s.sample(&mut b));
                assert!(x.h_km >= params.h_min_km && x.r_km >= 0.0);
                assert!(
                    ((x.l_km * x.l_km) - (x.r_km * x.r_km + x.h_km * x.h_km)).abs()
                        <= 1e-12 * x.l_km * x.l_km
                );
                assert!(x.sin_theta > 0.0 && x.sin_theta <= 1.0);
                if let SpatialCase::SphericalBaseline { radius_km } = case {
                    assert!(x.l_km <= radius_km * (1.0 + 1e-12));
                } else {
                    assert!(x.r_km <= params.r_max_km && x.h_km <= params.h_max_km);
                }
            }
        }
    }

    #[test]
    fn empty_network_at_zero_density() {
        let params = NetworkParams {
            lambda_n: 0.0,
            ..p()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert!(sample_network(&SpatialCase::Case1, &params, &mut rng)
                .unwrap()
                .is_empty());
        }
    }

    #[test]
    fn sphere_volume_is_hemisphere() {
        let params = p();
        let s = PlacementSampler::new(&SpatialCase::sphere(&params), &params).unwrap();
        let rho = params.default_sphere_radius();
        assert!((s.volume() - 2.0 / 3.0 * PI * rho.powi(3)).abs() < 1e-9);
    }
}
