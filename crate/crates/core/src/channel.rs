//! Rain attenuation, path loss with altitude power control, Rayleigh fading
//! and SINR. All power arithmetic is in linear Watts.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};

use crate::geometry::Placement;
use crate::params::{db_to_linear, NetworkParams};

/// Smallest attenuation divisor in [`AttenuationMode::PaperLinear`].
pub const PAPER_LINEAR_FLOOR: f64 = 1e-6;

static FLOOR_WARNED: AtomicBool = AtomicBool::new(false);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ItuCoefficients {
    pub a_coef: f64,
    pub b_coef: f64,
}

/// Power-law rain coefficients at carrier frequency `f_ghz`.
pub fn itu_coefficients(f_ghz: f64) -> ItuCoefficients {
    let lf = f_ghz.log10();
    ItuCoefficients {
        a_coef: 2.5292e-7 * f_ghz.powf(5.8688 - 1.2697 * lf),
        b_coef: 2.2698 - 1.2145 * lf + 0.2293 * lf * lf,
    }
}

/// Specific attenuation in dB/km.
pub fn specific_attenuation(coefs: &ItuCoefficients, rain_rate_mm_h: f64) -> f64 {
    if rain_rate_mm_h <= 0.0 {
        return 0.0;
    }
    coefs.a_coef * rain_rate_mm_h.powf(coefs.b_coef)
}

/// Path length through the rain layer below the receiver, km.
pub fn slant_distance(placement: &Placement, h_min_km: f64) -> f64 {
    (placement.h_km - h_min_km) / placement.sin_theta
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AttenuationMode {
    /// `r * gamma_R * d_s` used directly as a linear divisor.
    #[default]
    PaperLinear,
    /// `10^(r * gamma_R * d_s / 10)`, the dB value converted properly.
    DbExact,
}

impl AttenuationMode {
    pub fn label(&self) -> &'static str {
        match self {
            AttenuationMode::PaperLinear => "paper-linear",
            AttenuationMode::DbExact => "db-exact",
        }
    }
}

impl fmt::Display for AttenuationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for AttenuationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "paper-linear" | "paper_linear" | "linear" => Ok(AttenuationMode::PaperLinear),
            "db-exact" | "db_exact" | "db" => Ok(AttenuationMode::DbExact),
            other => Err(format!(
                "unknown attenuation mode `{other}` (paper-linear|db-exact)"
            )),
        }
    }
}

/// Per-parameter-set constants of the link budget, bound once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub mode: AttenuationMode,
    /// `r_corr * gamma_R`, dB/km.
    pub rain_db_per_km: f64,
    /// `P_t * g_t * g_r`, Watts.
    pub eirp_w: f64,
    pub sigma2_w: f64,
    alpha: f64,
    epsilon: f64,
    h_min: f64,
}

impl LinkBudget {
    pub fn new(params: &NetworkParams, mode: AttenuationMode) -> Self {
        let gamma = specific_attenuation(&itu_coefficients(params.f_ghz), params.rain_rate_mm_h);
        Self {
            mode,
            rain_db_per_km: params.r_corr * gamma,
            eirp_w: params.p_t_watts() * params.antenna_gain(),
            sigma2_w: params.sigma2_watts(),
            alpha: params.alpha,
            epsilon: params.epsilon,
            h_min: params.h_min_km,
        }
    }

    pub fn attenuation(&self, placement: &Placement) -> f64 {
        self.attenuation_lh(placement.l_km, placement.h_km)
    }

    /// Attenuation for a link at slant distance `l` and altitude offset `h`.
    pub fn attenuation_lh(&self, l: f64, h: f64) -> f64 {
        let db = self.rain_db_per_km * (h - self.h_min) * l / h;
        match self.mode {
            AttenuationMode::DbExact => 10f64.powf(db / 10.0),
            AttenuationMode::PaperLinear => {
                if db > PAPER_LINEAR_FLOOR {
                    db
                } else {
                    if !FLOOR_WARNED.swap(true, Ordering::Relaxed) {
                        log::warn!(
                            "rain attenuation {db:e} at or below floor; clamped to {PAPER_LINEAR_FLOOR:e}"
                        );
                    }
                    PAPER_LINEAR_FLOOR
                }
            }
        }
    }

    /// `l^-alpha * h^(alpha*epsilon)`.
    pub fn path_gain(&self, placement: &Placement) -> f64 {
        self.path_gain_lh(placement.l_km, placement.h_km)
    }

    pub fn path_gain_lh(&self, l: f64, h: f64) -> f64 {
        l.powf(-self.alpha) * h.powf(self.alpha * self.epsilon)
    }

    pub fn received_power(&self, placement: &Placement, fading_g: f64) -> f64 {
        self.received_power_lh(placement.l_km, placement.h_km, fading_g)
    }

    pub fn received_power_lh(&self, l: f64, h: f64, fading_g: f64) -> f64 {
        self.eirp_w * fading_g * self.path_gain_lh(l, h) / self.attenuation_lh(l, h)
    }

    pub fn realize(&self, placement: &Placement, fading_g: f64) -> ChannelRealization {
        let attenuation_a = self.attenuation(placement);
        ChannelRealization {
            fading_g,
            attenuation_a,
            rx_power_w: self.eirp_w * fading_g * self.path_gain(placement) / attenuation_a,
        }
    }
}

/// One link's fading draw, attenuation and resulting received power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRealization {
    pub fading_g: f64,
    pub attenuation_a: f64,
    pub rx_power_w: f64,
}

/// Attenuation divisor for a link under `mode`.
pub fn rain_attenuation(
    placement: &Placement,
    params: &NetworkParams,
    mode: AttenuationMode,
) -> f64 {
    LinkBudget::new(params, mode).attenuation(placement)
}

/// Received power in Watts for fading gain `fading_g`.
pub fn received_power(
    placement: &Placement,
    fading_g: f64,
    params: &NetworkParams,
    mode: AttenuationMode,
) -> f64 {
    LinkBudget::new(params, mode).received_power(placement, fading_g)
}

pub fn sinr(tr: &ChannelRealization, interferers: &[ChannelRealization], sigma2_w: f64) -> f64 {
    let interference: f64 = interferers.iter().map(|c| c.rx_power_w).sum();
    tr.rx_power_w / (sigma2_w + interference)
}

/// Threshold in dB to a linear ratio.
pub fn threshold_linear(t_s_db: f64) -> f64 {
    db_to_linear(t_s_db)
}
