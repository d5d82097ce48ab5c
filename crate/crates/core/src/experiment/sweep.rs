//! Parameter sweeps over (case, method, lambda_n, alpha, epsilon, T_s).

use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::analytic::{cp_exact_with_mode, cp_upper_bound_with_mode, CpResult, Method};
use crate::channel::AttenuationMode;
use crate::error::{Error, Result};
use crate::montecarlo::{estimate_cp_grid, McConfig};
use crate::params::{CaseName, NetworkParams};
use crate::quadrature::QuadratureControl;

/// Threshold grid `[-40 : 2 : 0]` dB.
pub fn default_ts_grid() -> Vec<f64> {
    (0..=20).map(|i| -40.0 + 2.0 * i as f64).collect()
}

/// Parse `start:step:stop` or a comma list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = |what: &str| Error::InvalidSweep(format!("grid `{text}`: {what}"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let nums: Vec<f64> = parts
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad("not a number")))
            .collect::<Result<_>>()?;
        let (start, step, stop) = (nums[0], nums[1], nums[2]);
        if !(step != 0.0) || (stop - start) / step < 0.0 {
            return Err(bad("step does not reach stop"));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| start + step * i as f64).collect());
    }
    let out: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad("not a number")))
        .collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(bad("empty"));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub cases: Vec<CaseName>,
    pub ts_db: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub methods: Vec<Method>,
    pub mode: AttenuationMode,
    pub mc: McConfig,
    pub sphere_radius_km: Option<f64>,
    pub quad: QuadratureControl,
}

impl SweepSpec {
    /// Single-point grid at the values carried by `params`.
    pub fn at(params: &NetworkParams, cases: Vec<CaseName>, methods: Vec<Method>) -> Self {
        Self {
            cases,
            ts_db: default_ts_grid(),
            lambdas: vec![params.lambda_n],
            alphas: vec![params.alpha],
            epsilons: vec![params.epsilon],
            methods,
            mode: AttenuationMode::PaperLinear,
            mc: McConfig::default(),
            sphere_radius_km: None,
            quad: crate::analytic::cp_control(),
        }
    }

    pub fn preset(name: &str, params: &NetworkParams) -> Result<Self> {
        let all = vec![CaseName::Case1, CaseName::Case2, CaseName::Case3];
        let both = vec![Method::Analytic, Method::MonteCarlo];
        let mut spec = Self::at(params, all, both);
        match name {
            "fig-lambda" => spec.lambdas = vec![0.01, 0.05],
            "fig-alpha" => spec.alphas = vec![2.0, 4.0],
            "fig-epsilon" => spec.epsilons = vec![0.0, 0.5],
            "fig-sphere" => {
                spec.cases = vec![CaseName::Case3, CaseName::Sphere];
                spec.lambdas = vec![0.01, 0.05];
            }
            other => {
                return Err(Error::InvalidSweep(format!(
                    "unknown preset `{other}` (fig-lambda|fig-alpha|fig-epsilon|fig-sphere)"
                )))
            }
        }
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let empty = |what: &str| Err(Error::InvalidSweep(format!("{what} must be non-empty")));
        if self.cases.is_empty() {
            return empty("case list");
        }
        if self.ts_db.is_empty() {
            return empty("threshold grid");
        }
        if self.lambdas.is_empty() || self.alphas.is_empty() || self.epsilons.is_empty() {
            return empty("parameter grids");
        }
        if self.methods.is_empty() {
            return empty("method set");
        }
        if self.ts_db.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidSweep("thresholds must be finite".into()));
        }
        self.mc.validate()?;
        self.quad.validate()
    }

    /// Parameter points in output order.
    pub fn points(&self, params: &NetworkParams) -> Vec<(CaseName, Method, NetworkParams)> {
        let mut out = Vec::new();
        for &case in &self.cases {
            for &method in &self.methods {
                for &lambda_n in &self.lambdas {
                    for &alpha in &self.alphas {
                        for &epsilon in &self.epsilons {
                            let p = NetworkParams {
                                lambda_n,
                                alpha,
                                epsilon,
                                ..*params
                            };
                            out.push((case, method, p));
                        }
                    }
                }
            }
        }
        out
    }
}

impl FromStr for CaseList {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        s.split(',')
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map(CaseList)
    }
}

/// Comma-separated case names.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseList(pub Vec<CaseName>);

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub case: String,
    pub method: Method,
    pub ts_db: f64,
    pub lambda_n: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub cp: f64,
    pub err_or_ci: f64,
    pub seed: Option<u64>,
}

pub const CSV_HEADER: &str = "case,method,ts_db,lambda_n,alpha,epsilon,cp,err_or_ci,seed";

impl Row {
    pub fn csv(&self) -> String {
        let seed = self.seed.map(|s| s.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.case,
            self.method,
            self.ts_db,
            self.lambda_n,
            self.alpha,
            self.epsilon,
            self.cp,
            self.err_or_ci,
            seed
        )
    }
}

/// CP at every threshold of `ts_db` for one parameter point.
pub fn evaluate_point(
    case: CaseName,
    method: Method,
    params: &NetworkParams,
    spec: &SweepSpec,
) -> Result<Vec<CpResult>> {
    let bound = case.bind(params, spec.sphere_radius_km);
    match method {
        Method::MonteCarlo => {
            let mc = McConfig {
                mode: spec.mode,
                ..spec.mc
            };
            estimate_cp_grid(&bound, params, &spec.ts_db, &mc)
        }
        Method::Analytic => spec
            .ts_db
            .iter()
            .map(|&t| cp_exact_with_mode(&bound, params, t, spec.mode, &spec.quad))
            .collect(),
        Method::UpperBound => spec
            .ts_db
            .iter()
            .map(|&t| cp_upper_bound_with_mode(&bound, params, t, spec.mode, &spec.quad))
            .collect(),
    }
}

/// All rows of the sweep, in grid order.
pub fn run_sweep(spec: &SweepSpec, params: &NetworkParams) -> Result<Vec<Row>> {
    spec.validate()?;
    params.validate()?;
    let points = spec.points(params);
    let results: Vec<Result<Vec<Row>>> = points
        .par_iter()
        .map(|(case, method, p)| {
            let label = case.bind(p, spec.sphere_radius_km).label().to_string();
            let seed = (*method == Method::MonteCarlo).then_some(spec.mc.seed);
            let res = evaluate_point(*case, *method, p, spec)?;
            Ok(spec
                .ts_db
                .iter()
                .zip(res)
                .map(|(&ts_db, r)| Row {
                    case: label.clone(),
                    method: *method,
                    ts_db,
                    lambda_n: p.lambda_n,
                    alpha: p.alpha,
                    epsilon: p.epsilon,
                    cp: r.cp,
                    err_or_ci: r.error_estimate,
                    seed,
                })
                .collect())
        })
        .collect();
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

pub fn write_rows<W: Write>(rows: &[Row], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.csv())?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub method: Method,
    pub ts_db: f64,
    pub lambda_n: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub cp_case3: f64,
    pub cp_sphere: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub rows: Vec<CompareRow>,
    /// Share of grid points with `cp_case3 >= cp_sphere`.
    pub case3_ge_fraction: f64,
}

/// Case 3 against the spherical baseline at every grid point of `spec`.
pub fn compare_models(spec: &SweepSpec, params: &NetworkParams) -> Result<Comparison> {
    let spec = SweepSpec {
        cases: vec![CaseName::Case3, CaseName::Sphere],
        ..spec.clone()
    };
    let rows = run_sweep(&spec, params)?;
    let half = rows.len() / 2;
    let (c3, sp) = rows.split_at(half);
    let out: Vec<CompareRow> = c3
        .iter()
        .zip(sp)
        .map(|(a, b)| CompareRow {
            method: a.method,
            ts_db: a.ts_db,
            lambda_n: a.lambda_n,
            alpha: a.alpha,
            epsilon: a.epsilon,
            cp_case3: a.cp,
            cp_sphere: b.cp,
            delta: a.cp - b.cp,
        })
        .collect();
    let ge = out.iter().filter(|r| r.delta >= 0.0).count();
    Ok(Comparison {
        case3_ge_fraction: ge as f64 / out.len() as f64,
        rows: out,
    })
}

pub fn write_comparison<W: Write>(cmp: &Comparison, mut out: W) -> Result<()> {
    writeln!(
        out,
        "method,ts_db,lambda_n,alpha,epsilon,cp_case3,cp_sphere,delta"
    )?;
    for r in &cmp.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.method, r.ts_db, r.lambda_n, r.alpha, r.epsilon, r.cp_case3, r.cp_sphere, r.delta
        )?;
    }
    writeln!(out, "# case3_ge_sphere_fraction={}", cmp.case3_ge_fraction)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("-40:2:0").unwrap(), default_ts_grid());
        assert_eq!(parse_grid("-40, -20,0").unwrap(), vec![-40.0, -20.0, 0.0]);
        assert_eq!(parse_grid("0:-5:-10").unwrap(), vec![0.0, -5.0, -10.0]);
        assert!(parse_grid("0:0:1").is_err());
        assert!(parse_grid("0:1:-1").is_err());
        assert!(parse_grid("a,b").is_err());
    }

    #[test]
    fn fig_lambda_cardinality() {
        let p = NetworkParams::default();
        let spec = SweepSpec::preset("fig-lambda", &p).unwrap();
        let n = spec.points(&p).len() * spec.ts_db.len();
        assert_eq!(n, 3 * 2 * 21 * 2);
    }

    #[test]
    fn empty_methods_rejected() {
        let p = NetworkParams::default();
        let mut spec = SweepSpec::preset("fig-alpha", &p).unwrap();
        spec.methods.clear();
        assert!(matches!(run_sweep(&spec, &p), Err(Error::InvalidSweep(_))));
        assert!(SweepSpec::preset("fig-nope", &p).is_err());
    }

    #[test]
    fn case_list_parses() {
        let l: CaseList = "case1,sphere".parse().unwrap();
        assert_eq!(l.0, vec![CaseName::Case1, CaseName::Sphere]);
        assert!("case9".parse::<CaseList>().is_err());
    }
}
