//! Monte Carlo CP estimator.
//!
//! Each trial draws a Poisson network, picks a target uniformly among the
//! nodes, treats every other node as an interferer, draws Rayleigh fading
//! per link and records the target's SINR. One SINR draw is compared against
//! every requested threshold, so estimates over a threshold grid share their
//! randomness and are monotone in the threshold.
//!
//! Trial `i` always uses stream `i` of a ChaCha8 generator keyed by the seed,
//! which makes results independent of thread count and scheduling.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;

use crate::analytic::{CpResult, Method};
use crate::channel::{threshold_linear, AttenuationMode, LinkBudget};
use crate::error::{Error, Result};
use crate::geometry::{poisson_count, PlacementSampler};
use crate::params::{NetworkParams, SpatialCase};

/// Which nodes interfere with the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterferenceField {
    /// Every other node of the sampled network.
    #[default]
    Network,
    /// A planar Poisson field of density `lambda_n` over slant distances
    /// `[l_tr, L_max]`, altitudes drawn independently from the target's
    /// vertical law. This is the field the analytic Laplace term integrates.
    Annulus,
}

impl FromStr for InterferenceField {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "network" => Ok(InterferenceField::Network),
            "annulus" => Ok(InterferenceField::Annulus),
            other => Err(format!(
                "unknown interference field `{other}` (network|annulus)"
            )),
        }
    }
}

/// What a trial does when the Poisson draw yields no nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmptyNetworkPolicy {
    /// Redraw the network until it has a node (conditions on non-emptiness).
    #[default]
    Resample,
    /// Place a single target with no interferers.
    ForceSingle,
}

impl FromStr for EmptyNetworkPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "resample" => Ok(EmptyNetworkPolicy::Resample),
            "force-single" | "force_single" | "single" => Ok(EmptyNetworkPolicy::ForceSingle),
            other => Err(format!(
                "unknown empty-network policy `{other}` (resample|force-single)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub n_trials: usize,
    pub seed: u64,
    pub mode: AttenuationMode,
    pub min_nodes_policy: EmptyNetworkPolicy,
    pub field: InterferenceField,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_trials: 20_000,
            seed: 1,
            mode: AttenuationMode::PaperLinear,
            min_nodes_policy: EmptyNetworkPolicy::Resample,
            field: InterferenceField::Network,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trials < 1 {
            return Err(Error::param("trials", "must be >= 1"));
        }
        Ok(())
    }
}

/// Generator for trial `index` under master `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Sampler and link budget for one (case, params, mode), bound once per run.
#[derive(Debug, Clone)]
pub struct TrialSetup {
    sampler: PlacementSampler,
    budget: LinkBudget,
    fading: Exp<f64>,
    lambda_n: f64,
    policy: EmptyNetworkPolicy,
    field: InterferenceField,
}

impl TrialSetup {
    pub fn new(
        case: &SpatialCase,
        params: &NetworkParams,
        mode: AttenuationMode,
        policy: EmptyNetworkPolicy,
    ) -> Result<Self> {
        Self::with_field(case, params, mode, policy, InterferenceField::Network)
    }

    pub fn with_field(
        case: &SpatialCase,
        params: &NetworkParams,
        mode: AttenuationMode,
        policy: EmptyNetworkPolicy,
        field: InterferenceField,
    ) -> Result<Self> {
        params.validate()?;
        let fading = Exp::new(params.mu).map_err(|e| Error::param("mu", e.to_string()))?;
        Ok(Self {
            sampler: PlacementSampler::new(case, params)?,
            budget: LinkBudget::new(params, mode),
            fading,
            lambda_n: params.lambda_n,
            policy,
            field,
        })
    }

    /// SINR of a uniformly chosen target in one sampled network.
    pub fn sinr<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.field {
            InterferenceField::Network => self.network_sinr(rng),
            InterferenceField::Annulus => self.annulus_sinr(rng),
        }
    }

    fn annulus_sinr<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (law, tr) = self.sampler.sample_labelled(rng);
        let signal = self.budget.received_power(&tr, self.fading.sample(rng));
        let (l, x_max) = (tr.l_km, law.l_max());
        let span = (x_max * x_max - l * l).max(0.0);
        let n = poisson_count(self.lambda_n * PI * span, rng);
        let mut interference = 0.0;
        for _ in 0..n {
            let x = (l * l + rng.random::<f64>() * span).sqrt();
            let y = law.vertical_quantile(rng.random::<f64>());
            interference += self.budget.received_power_lh(x, y, self.fading.sample(rng));
        }
        signal / (self.budget.sigma2_w + interference)
    }

    fn network_sinr<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut nodes = self.sampler.sample_network(self.lambda_n, rng);
        if nodes.is_empty() {
            let resample = self.policy == EmptyNetworkPolicy::Resample
                && self.lambda_n * self.sampler.volume() > 0.0;
            if resample {
                while nodes.is_empty() {
                    nodes = self.sampler.sample_network(self.lambda_n, rng);
                }
            } else {
                nodes.push(self.sampler.sample(rng));
            }
        }
        let tr = rng.random_range(0..nodes.len());
        let mut signal = 0.0;
        let mut interference = 0.0;
        for (i, x) in nodes.iter().enumerate() {
            let g = self.fading.sample(rng);
            let p = self.budget.received_power(x, g);
            if i == tr {
                signal = p;
            } else {
                interference += p;
            }
        }
        signal / (self.budget.sigma2_w + interference)
    }
}

/// One trial's success indicator at threshold `t_s_db`.
pub fn run_trial<R: Rng + ?Sized>(
    case: &SpatialCase,
    params: &NetworkParams,
    t_s_db: f64,
    mode: AttenuationMode,
    policy: EmptyNetworkPolicy,
    rng: &mut R,
) -> Result<bool> {
    let setup = TrialSetup::new(case, params, mode, policy)?;
    Ok(setup.sinr(rng) > threshold_linear(t_s_db))
}

fn binomial_result(successes: u64, n: usize, mc: &McConfig) -> CpResult {
    let p = successes as f64 / n as f64;
    CpResult {
        cp: p,
        method: Method::MonteCarlo,
        error_estimate: 1.96 * (p * (1.0 - p) / n as f64).sqrt(),
        metadata: vec![
            format!("trials={n}"),
            format!("seed={}", mc.seed),
            format!("atten_mode={}", mc.mode),
            format!("field={:?}", mc.field),
        ],
    }
}

/// CP estimates at every threshold in `t_s_db`, from one set of trials.
pub fn estimate_cp_grid(
    case: &SpatialCase,
    params: &NetworkParams,
    t_s_db: &[f64],
    mc: &McConfig,
) -> Result<Vec<CpResult>> {
    mc.validate()?;
    let setup = TrialSetup::with_field(case, params, mc.mode, mc.min_nodes_policy, mc.field)?;
    let thresholds: Vec<f64> = t_s_db.iter().map(|&t| threshold_linear(t)).collect();
    let counts = (0..mc.n_trials as u64)
        .into_par_iter()
        .fold(
            || vec![0u64; thresholds.len()],
            |mut acc, i| {
                let s = setup.sinr(&mut trial_rng(mc.seed, i));
                for (c, t) in acc.iter_mut().zip(&thresholds) {
                    if s > *t {
                        *c += 1;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; thresholds.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(counts
        .into_iter()
        .map(|c| binomial_result(c, mc.n_trials, mc))
        .collect())
}

/// CP estimate with a 95% normal-approximation interval.
pub fn estimate_cp(
    case: &SpatialCase,
    params: &NetworkParams,
    t_s_db: f64,
    mc: &McConfig,
) -> Result<CpResult> {
    Ok(estimate_cp_grid(case, params, &[t_s_db], mc)?.remove(0))
}
