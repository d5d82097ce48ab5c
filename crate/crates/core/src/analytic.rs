//! Analytic connection probability.
//!
//! Conditioned on the target at `(r, h)` with slant distance `l`, the success
//! probability under Rayleigh fading is `exp(-s * sigma'^2) * L_I(s)`, where
//! `s = mu * T / G(l, h)` and `G` is the normalised link gain. The interference
//! Laplace transform comes from the PGFL of a planar PPP of interferers beyond
//! `l`, each at an independent altitude drawn from the case's vertical law.
//! The CP averages this over the joint placement law.

use std::f64::consts::PI;
use std::fmt;

use crate::channel::{itu_coefficients, specific_attenuation, threshold_linear, AttenuationMode};
use crate::error::{Error, Result};
use crate::geometry::{components, Law};
use crate::params::{NetworkParams, SpatialCase};
use crate::quadrature::{quad_integrate, Quad, QuadratureControl};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Analytic,
    UpperBound,
    MonteCarlo,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::UpperBound => "upper_bound",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "analytic" | "exact" => Ok(Method::Analytic),
            "upper_bound" | "bound" => Ok(Method::UpperBound),
            "monte_carlo" | "mc" => Ok(Method::MonteCarlo),
            other => Err(format!(
                "unknown method `{other}` (analytic|upper_bound|monte_carlo)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CpResult {
    pub cp: f64,
    pub method: Method,
    /// Quadrature error bound, or the 95% CI half-width for Monte Carlo.
    pub error_estimate: f64,
    /// Notes on fallbacks and settings used.
    pub metadata: Vec<String>,
}

impl CpResult {
    pub fn ci(&self) -> (f64, f64) {
        (
            (self.cp - self.error_estimate).max(0.0),
            (self.cp + self.error_estimate).min(1.0),
        )
    }
}

/// Normalised link gain `G(l, h)` with constant factors folded into the noise term.
#[derive(Debug, Clone, Copy)]
struct Gain {
    mode: AttenuationMode,
    alpha: f64,
    epsilon: f64,
    h_min: f64,
    rain_db_per_km: f64,
    /// Noise over the constant power factor.
    sigma2_norm: f64,
}

impl Gain {
    fn new(params: &NetworkParams, mode: AttenuationMode) -> Self {
        let rain = params.r_corr
            * specific_attenuation(&itu_coefficients(params.f_ghz), params.rain_rate_mm_h);
        let eirp = params.p_t_watts() * params.antenna_gain();
        let sigma2_norm = match mode {
            AttenuationMode::PaperLinear => params.sigma2_watts() * rain / eirp,
            AttenuationMode::DbExact => params.sigma2_watts() / eirp,
        };
        Self {
            mode,
            alpha: params.alpha,
            epsilon: params.epsilon,
            h_min: params.h_min_km,
            rain_db_per_km: rain,
            sigma2_norm,
        }
    }

    /// Inverse gain `1 / G(l, h)`; zero where the gain is unbounded.
    fn inverse(&self, l: f64, h: f64) -> f64 {
        let d = h - self.h_min;
        match self.mode {
            AttenuationMode::PaperLinear => {
                l.powf(self.alpha + 1.0) * d / h.powf(self.alpha * self.epsilon + 1.0)
            }
            AttenuationMode::DbExact => {
                let db = self.rain_db_per_km * d * l / h;
                l.powf(self.alpha) / h.powf(self.alpha * self.epsilon) * 10f64.powf(db / 10.0)
            }
        }
    }
}

/// Vertical law of interferers, possibly a mixture.
struct Interferers<'a> {
    parts: &'a [(f64, Law)],
    y_lo: f64,
    y_hi: f64,
    x_max: f64,
}

impl<'a> Interferers<'a> {
    fn new(parts: &'a [(f64, Law)]) -> Self {
        let y_lo = parts
            .iter()
            .map(|(_, l)| l.h_range().0)
            .fold(f64::INFINITY, f64::min);
        let y_hi = parts.iter().map(|(_, l)| l.h_range().1).fold(0.0, f64::max);
        let x_max = parts.iter().map(|(_, l)| l.l_max()).fold(0.0, f64::max);
        Self {
            parts,
            y_lo,
            y_hi,
            x_max,
        }
    }

    fn pdf(&self, y: f64) -> f64 {
        self.parts.iter().map(|(w, l)| w * l.vertical_pdf(y)).sum()
    }
}

// Width in log units of the altitude substitution y = y_lo + e^v below y_hi - y_lo.
const LOG_SPAN: f64 = 30.0;

/// `2 * pi * lambda * integral_l^x_max (1 - E[mu / (mu + s * G(x, Y))]) x dx`.
fn laplace_exponent(
    s: f64,
    l: f64,
    lambda: f64,
    mu: f64,
    gain: &Gain,
    intf: &Interferers,
    control: &QuadratureControl,
) -> Result<Quad> {
    if s == 0.0 || lambda == 0.0 || l >= intf.x_max {
        return Ok(Quad::ZERO);
    }
    let inner = control.inner();
    let v_hi = (intf.y_hi - intf.y_lo).ln();
    let v_lo = v_hi - LOG_SPAN;
    let mut failure = None;
    let q = quad_integrate(
        |x| {
            let r = quad_integrate(
                |v| {
                    let e = v.exp();
                    let y = intf.y_lo + e;
                    let inv = gain.inverse(x, y);
                    // s*G / (mu + s*G), written with the inverse gain so G = inf gives 1.
                    let frac = s / (s + mu * inv);
                    intf.pdf(y) * frac * e
                },
                v_lo,
                v_hi,
                &inner,
            );
            match r {
                Ok(q) => x * q.value,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        l,
        intf.x_max,
        control,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let q = q?;
    let k = 2.0 * PI * lambda;
    Ok(Quad {
        value: k * q.value,
        error: k * q.error,
    })
}

/// Laplace transform of the normalised interference seen by a target at slant distance `l_tr`.
pub fn laplace_interference(
    s: f64,
    l_tr: f64,
    case: &SpatialCase,
    params: &NetworkParams,
    mode: AttenuationMode,
    control: &QuadratureControl,
) -> Result<f64> {
    params.validate()?;
    control.validate()?;
    if !(s >= 0.0) {
        return Err(Error::param("s", format!("must be >= 0, got {s}")));
    }
    let parts = components(case, params)?;
    let intf = Interferers::new(&parts);
    if !(intf.y_lo..=intf.x_max).contains(&l_tr) {
        return Err(Error::domain("l_tr", l_tr, intf.y_lo, intf.x_max));
    }
    let gain = Gain::new(params, mode);
    let e = laplace_exponent(s, l_tr, params.lambda_n, params.mu, &gain, &intf, control)?;
    Ok((-e.value).exp())
}

fn cp_single(
    law: &Law,
    params: &NetworkParams,
    t_lin: f64,
    gain: &Gain,
    with_noise: bool,
    control: &QuadratureControl,
) -> Result<Quad> {
    let parts = [(1.0, *law)];
    let intf = Interferers::new(&parts);
    let (h_lo, h_hi) = law.h_range();
    let r_ctl = control.inner();
    let lap_ctl = r_ctl.inner();
    let mu = params.mu;
    let mut failure = None;
    // h = h_lo + e^w resolves the layer near h_lo where the target's gain blows up.
    let w_hi = (h_hi - h_lo).ln();
    let q = quad_integrate(
        |w| {
            let e = w.exp();
            let h = h_lo + e;
            let r = quad_integrate(
                |r| {
                    let f = law.joint_pdf(r, h);
                    if f == 0.0 {
                        return 0.0;
                    }
                    let l = r.hypot(h);
                    let s = mu * t_lin * gain.inverse(l, h);
                    let noise = if with_noise {
                        s * gain.sigma2_norm
                    } else {
                        0.0
                    };
                    match laplace_exponent(s, l, params.lambda_n, mu, gain, &intf, &lap_ctl) {
                        Ok(e) => f * (-(noise + e.value)).exp(),
                        Err(e) => {
                            failure.get_or_insert(e);
                            f64::NAN
                        }
                    }
                },
                0.0,
                law.r_upper(h),
                &r_ctl,
            );
            match r {
                Ok(q) => q.value * e,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        w_hi - LOG_SPAN,
        w_hi,
        control,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    q
}

fn cp_analytic(
    case: &SpatialCase,
    params: &NetworkParams,
    t_s_db: f64,
    mode: AttenuationMode,
    with_noise: bool,
    control: &QuadratureControl,
) -> Result<CpResult> {
    params.validate()?;
    control.validate()?;
    let t_lin = threshold_linear(t_s_db);
    if !(t_lin > 0.0 && t_lin.is_finite()) {
        return Err(Error::domain(
            "t_s (linear)",
            t_lin,
            f64::MIN_POSITIVE,
            f64::MAX,
        ));
    }
    let parts = components(case, params)?;
    let gain = Gain::new(params, mode);
    let mut cp = 0.0;
    let mut err = 0.0;
    for (w, law) in &parts {
        if *w == 0.0 {
            continue;
        }
        let q = cp_single(law, params, t_lin, &gain, with_noise, control)?;
        cp += w * q.value;
        err += w * q.error;
    }
    Ok(CpResult {
        cp: cp.clamp(0.0, 1.0),
        method: if with_noise {
            Method::Analytic
        } else {
            Method::UpperBound
        },
        error_estimate: err,
        metadata: vec![format!("atten_mode={mode}")],
    })
}

/// CP with noise, attenuation read as a linear divisor.
pub fn cp_exact(
    case: &SpatialCase,
    params: &NetworkParams,
    t_s_db: f64,
    control: &QuadratureControl,
) -> Result<CpResult> {
    cp_analytic(
        case,
        params,
        t_s_db,
        AttenuationMode::PaperLinear,
        true,
        control,
    )
}

/// Noise-free CP, an upper bound on [`cp_exact`].
pub fn cp_upper_bound(
    case: &SpatialCase,
    params: &NetworkParams,
    t_s_db: f64,
    control: &QuadratureControl,
) -> Result<CpResult> {
    cp_analytic(
        case,
        params,
        t_s_db,
        AttenuationMode::PaperLinear,
        false,
        control,
    )
}

pub fn cp_exact_with_mode(
    case: &SpatialCase,
    params: &NetworkParams,
    t_s_db: f64,
    mode: AttenuationMode,
    control: &QuadratureControl,
) -> Result<CpResult> {
    cp_analytic(case, params, t_s_db, mode, true, control)
}

pub fn cp_upper_bound_with_mode(
    case: &SpatialCase,
    params: &NetworkParams,
    t_s_db: f64,
    mode: AttenuationMode,
    control: &QuadratureControl,
) -> Result<CpResult> {
    cp_analytic(case, params, t_s_db, mode, false, control)
}

/// Noise-only CP (interference term set to one), the oracle for an interference-free network.
pub fn cp_noise_only(
    case: &SpatialCase,
    params: &NetworkParams,
    t_s_db: f64,
    mode: AttenuationMode,
    control: &QuadratureControl,
) -> Result<f64> {
    let quiet = NetworkParams {
        lambda_n: 0.0,
        ..*params
    };
    // Keep the placement law of the original density.
    params.validate()?;
    let t_lin = threshold_linear(t_s_db);
    let parts = components(case, params)?;
    let gain = Gain::new(params, mode);
    let mut cp = 0.0;
    for (w, law) in &parts {
        cp += w * cp_single(law, &quiet, t_lin, &gain, true, control)?.value;
    }
    Ok(cp)
}

/// Default control for CP integrals.
pub fn cp_control() -> QuadratureControl {
    QuadratureControl {
        abs_tol: 1e-6,
        rel_tol: 1e-6,
        max_subdivisions: 200,
    }
}
