//! Network configuration and the spatial case selector.
//!
//! Every physical scalar the models consume lives in [`NetworkParams`]. Powers
//! are configured in dB(m) and converted to linear Watts on access; all model
//! arithmetic downstream happens in linear units.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Tolerance on `p1 + p2 = 1`.
pub const MIXTURE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    /// Node density per km³. The horizontal intensity of the irregular law uses the same scalar.
    pub lambda_n: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Power-control factor in `[0, 1]`.
    pub epsilon: f64,
    /// Rayleigh fading rate; mean fading gain is `1 / mu`.
    pub mu: f64,
    pub p_t_dbm: f64,
    pub g_t_db: f64,
    pub g_r_db: f64,
    /// Receiver noise power over the whole band.
    pub sigma2_dbm: f64,
    pub f_ghz: f64,
    pub rain_rate_mm_h: f64,
    /// Distance correction factor applied to the rain path.
    pub r_corr: f64,
    pub r_max_km: f64,
    pub h_min_km: f64,
    pub h_max_km: f64,
    /// Truncated-Weibull altitude law of Case 1 (shape 1 gives the exponential profile).
    pub k_s_case1: f64,
    pub lambda_s_case1: f64,
    /// Truncated-Weibull altitude law of Case 2.
    pub k_s_case2: f64,
    pub lambda_s_case2: f64,
    /// Case 3 mixture weights.
    pub p1: f64,
    pub p2: f64,
}

impl Default for NetworkParams {
    fn default() -> Self {
        Self {
            lambda_n: 0.01,
            alpha: 2.0,
            epsilon: 0.0,
            mu: 1.0,
            p_t_dbm: 33.0,
            g_t_db: 2.0,
            g_r_db: 2.0,
            sigma2_dbm: noise_dbm(-174.0, 10e6),
            f_ghz: 0.4,
            rain_rate_mm_h: 50.0,
            r_corr: 1.0,
            r_max_km: 20.0,
            h_min_km: 5.0,
            h_max_km: 20.0,
            k_s_case1: 1.0,
            lambda_s_case1: 2.0,
            k_s_case2: 6.0,
            lambda_s_case2: 15.0,
            p1: 0.5,
            p2: 0.5,
        }
    }
}

/// Thermal noise in dBm for a spectral density (dBm/Hz) over `bandwidth_hz`.
pub fn noise_dbm(density_dbm_hz: f64, bandwidth_hz: f64) -> f64 {
    density_dbm_hz + 10.0 * bandwidth_hz.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

impl NetworkParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("lambda_n", self.lambda_n),
            ("alpha", self.alpha),
            ("epsilon", self.epsilon),
            ("mu", self.mu),
            ("p_t_dbm", self.p_t_dbm),
            ("g_t_db", self.g_t_db),
            ("g_r_db", self.g_r_db),
            ("sigma2_dbm", self.sigma2_dbm),
            ("f_ghz", self.f_ghz),
            ("rain_rate_mm_h", self.rain_rate_mm_h),
            ("r_corr", self.r_corr),
            ("r_max_km", self.r_max_km),
            ("h_min_km", self.h_min_km),
            ("h_max_km", self.h_max_km),
            ("k_s_case1", self.k_s_case1),
            ("lambda_s_case1", self.lambda_s_case1),
            ("k_s_case2", self.k_s_case2),
            ("lambda_s_case2", self.lambda_s_case2),
            ("p1", self.p1),
            ("p2", self.p2),
        ];
        for (key, v) in finite {
            if !v.is_finite() {
                return Err(Error::param(key, format!("must be finite, got {v}")));
            }
        }
        if self.h_min_km <= 0.0 {
            return Err(Error::param("h_min_km", "must be > 0"));
        }
        if self.h_max_km <= self.h_min_km {
            return Err(Error::param("h_max_km", "must exceed h_min_km"));
        }
        if self.r_max_km <= 0.0 {
            return Err(Error::param("r_max_km", "must be > 0"));
        }
        if self.lambda_n < 0.0 {
            return Err(Error::param("lambda_n", "must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::param("epsilon", "must lie in [0, 1]"));
        }
        if self.mu <= 0.0 {
            return Err(Error::param("mu", "must be > 0"));
        }
        if self.alpha <= 0.0 {
            return Err(Error::param("alpha", "must be > 0"));
        }
        if self.f_ghz <= 0.0 {
            return Err(Error::param("f_ghz", "must be > 0"));
        }
        if self.rain_rate_mm_h < 0.0 {
            return Err(Error::param("rain_rate_mm_h", "must be >= 0"));
        }
        if self.r_corr <= 0.0 {
            return Err(Error::param("r_corr", "must be > 0"));
        }
        for (key, v) in [
            ("k_s_case1", self.k_s_case1),
            ("lambda_s_case1", self.lambda_s_case1),
            ("k_s_case2", self.k_s_case2),
            ("lambda_s_case2", self.lambda_s_case2),
        ] {
            if v <= 0.0 {
                return Err(Error::param(key, "must be > 0"));
            }
        }
        check_mixture(self.p1, self.p2)
    }

    pub fn p_t_watts(&self) -> f64 {
        dbm_to_watts(self.p_t_dbm)
    }

    pub fn sigma2_watts(&self) -> f64 {
        dbm_to_watts(self.sigma2_dbm)
    }

    /// Combined linear antenna gain `g_t * g_r`.
    pub fn antenna_gain(&self) -> f64 {
        db_to_linear(self.g_t_db + self.g_r_db)
    }

    /// Largest slant distance reachable inside the placement box.
    pub fn l_max_km(&self) -> f64 {
        self.h_max_km.hypot(self.r_max_km)
    }

    /// Radius of the spherical baseline when none is given explicitly.
    pub fn default_sphere_radius(&self) -> f64 {
        self.l_max_km()
    }

    /// Volume of the cylinder `[0, R_max] x [H_min, H_max]` that hosts the Poisson count.
    pub fn cylinder_volume(&self) -> f64 {
        std::f64::consts::PI * self.r_max_km.powi(2) * (self.h_max_km - self.h_min_km)
    }

    /// Configuration keys in a fixed order, paired with their current values.
    pub fn entries(&self) -> [(&'static str, f64); 20] {
        [
            ("lambda_n", self.lambda_n),
            ("alpha", self.alpha),
            ("epsilon", self.epsilon),
            ("mu", self.mu),
            ("p_t_dbm", self.p_t_dbm),
            ("g_t_db", self.g_t_db),
            ("g_r_db", self.g_r_db),
            ("sigma2_dbm", self.sigma2_dbm),
            ("f_ghz", self.f_ghz),
            ("rain_rate_mm_h", self.rain_rate_mm_h),
            ("r_corr", self.r_corr),
            ("r_max_km", self.r_max_km),
            ("h_min_km", self.h_min_km),
            ("h_max_km", self.h_max_km),
            ("k_s_case1", self.k_s_case1),
            ("lambda_s_case1", self.lambda_s_case1),
            ("k_s_case2", self.k_s_case2),
            ("lambda_s_case2", self.lambda_s_case2),
            ("p1", self.p1),
            ("p2", self.p2),
        ]
    }

    /// Set a field by its configuration key. Returns `false` for unknown keys.
    pub fn set(&mut self, key: &str, value: f64) -> bool {
        let slot = match key {
            "lambda_n" => &mut self.lambda_n,
            "alpha" => &mut self.alpha,
            "epsilon" => &mut self.epsilon,
            "mu" => &mut self.mu,
            "p_t_dbm" => &mut self.p_t_dbm,
            "g_t_db" => &mut self.g_t_db,
            "g_r_db" => &mut self.g_r_db,
            "sigma2_dbm" => &mut self.sigma2_dbm,
            "f_ghz" => &mut self.f_ghz,
            "rain_rate_mm_h" => &mut self.rain_rate_mm_h,
            "r_corr" => &mut self.r_corr,
            "r_max_km" => &mut self.r_max_km,
            "h_min_km" => &mut self.h_min_km,
            "h_max_km" => &mut self.h_max_km,
            "k_s_case1" => &mut self.k_s_case1,
            "lambda_s_case1" => &mut self.lambda_s_case1,
            "k_s_case2" => &mut self.k_s_case2,
            "lambda_s_case2" => &mut self.lambda_s_case2,
            "p1" => &mut self.p1,
            "p2" => &mut self.p2,
            _ => return false,
        };
        *slot = value;
        true
    }
}

fn check_mixture(p1: f64, p2: f64) -> Result<()> {
    if p1 < 0.0 || p2 < 0.0 {
        return Err(Error::param("p1", "mixture weights must be >= 0"));
    }
    if (p1 + p2 - 1.0).abs() > MIXTURE_TOL {
        return Err(Error::param(
            "p2",
            format!("p1 + p2 must equal 1, got {}", p1 + p2),
        ));
    }
    Ok(())
}

/// Which joint placement law is active.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpatialCase {
    /// Irregular horizontal motion with an exponential-like altitude profile.
    Case1,
    /// Circular horizontal motion with a peaked altitude profile.
    Case2,
    /// Mixture `p1 * Case1 + p2 * Case2`.
    Case3 { p1: f64, p2: f64 },
    /// Nodes uniform in the lower hemisphere around the receiver, truncated to `h >= h_min`.
    SphericalBaseline { radius_km: f64 },
}

impl SpatialCase {
    /// Case 3 with the mixture weights carried by `params`.
    pub fn case3(params: &NetworkParams) -> Self {
        SpatialCase::Case3 {
            p1: params.p1,
            p2: params.p2,
        }
    }

    /// Spherical baseline with the default radius for `params`.
    pub fn sphere(params: &NetworkParams) -> Self {
        SpatialCase::SphericalBaseline {
            radius_km: params.default_sphere_radius(),
        }
    }

    pub fn validate(&self, params: &NetworkParams) -> Result<()> {
        match *self {
            SpatialCase::Case3 { p1, p2 } => check_mixture(p1, p2),
            SpatialCase::SphericalBaseline { radius_km } => {
                if !(radius_km > params.h_min_km) || !radius_km.is_finite() {
                    Err(Error::param(
                        "sphere_radius_km",
                        format!("must exceed h_min_km = {}", params.h_min_km),
                    ))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Short label used in CSV output.
    pub fn label(&self) -> &'static str {
        match self {
            SpatialCase::Case1 => "case1",
            SpatialCase::Case2 => "case2",
            SpatialCase::Case3 { .. } => "case3",
            SpatialCase::SphericalBaseline { .. } => "sphere",
        }
    }
}

impl fmt::Display for SpatialCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Case names as they appear on the command line and in sweep specs. The
/// weights of `case3` and the sphere radius are bound later from the params.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseName {
    Case1,
    Case2,
    Case3,
    Sphere,
}

impl CaseName {
    pub fn bind(self, params: &NetworkParams, sphere_radius_km: Option<f64>) -> SpatialCase {
        match self {
            CaseName::Case1 => SpatialCase::Case1,
            CaseName::Case2 => SpatialCase::Case2,
            CaseName::Case3 => SpatialCase::case3(params),
            CaseName::Sphere => SpatialCase::SphericalBaseline {
                radius_km: sphere_radius_km.unwrap_or_else(|| params.default_sphere_radius()),
            },
        }
    }
}

impl FromStr for CaseName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "case1" | "1" => Ok(CaseName::Case1),
            "case2" | "2" => Ok(CaseName::Case2),
            "case3" | "3" => Ok(CaseName::Case3),
            "sphere" | "spherical" => Ok(CaseName::Sphere),
            other => Err(format!("unknown case `{other}` (case1|case2|case3|sphere)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        NetworkParams::default().validate().unwrap();
    }

    #[test]
    fn noise_floor_matches_thermal_density() {
        let p = NetworkParams::default();
        assert!((p.sigma2_dbm + 104.0).abs() < 1e-12);
        let w = p.sigma2_watts();
        assert!((w - 3.981_071_705_534_97e-14).abs() / w < 1e-12);
    }

    #[test]
    fn rejects_inverted_altitudes() {
        let p = NetworkParams {
            h_max_km: 4.0,
            ..Default::default()
        };
        assert!(matches!(
            p.validate(),
            Err(Error::InvalidParam {
                key: "h_max_km",
                ..
            })
        ));
    }

    #[test]
    fn rejects_bad_mixture() {
        let p = NetworkParams {
            p1: 0.6,
            p2: 0.6,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let ok = NetworkParams {
            p1: 0.3,
            p2: 0.7,
            ..Default::default()
        };
        ok.validate().unwrap();
    }

    #[test]
    fn sphere_radius_must_clear_floor() {
        let p = NetworkParams::default();
        assert!(SpatialCase::SphericalBaseline { radius_km: 4.0 }
            .validate(&p)
            .is_err());
        SpatialCase::sphere(&p).validate(&p).unwrap();
    }

    #[test]
    fn set_and_entries_cover_the_same_keys() {
        let mut p = NetworkParams::default();
        for (i, (key, _)) in NetworkParams::default().entries().iter().enumerate() {
            assert!(p.set(key, i as f64 + 0.5), "{key}");
        }
        for (i, (_, v)) in p.entries().iter().enumerate() {
            assert_eq!(*v, i as f64 + 0.5);
        }
        assert!(!p.set("nope", 1.0));
    }
}
