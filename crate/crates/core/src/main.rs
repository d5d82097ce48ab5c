use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sonde_cp::analytic::Method;
use sonde_cp::channel::AttenuationMode;
use sonde_cp::experiment::dist::{write_altitude_table, write_distance_table};
use sonde_cp::experiment::sweep::{default_ts_grid, write_comparison, write_rows, CaseList};
use sonde_cp::experiment::{
    compare_models, emit_distribution_tables, load_config, parse_grid, run_sweep, SweepSpec,
};
use sonde_cp::montecarlo::{EmptyNetworkPolicy, InterferenceField, McConfig};
use sonde_cp::{CaseName, Error, NetworkParams, Result};

/// Uplink connection probability of a 3D radiosonde network.
#[derive(Parser, Debug)]
#[command(name = "sondecp", version)]
struct Cli {
    /// key = value parameter file; flags override it.
    #[arg(long, global = true, env = "SONDECP_CONFIG")]
    config: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct ParamFlags {
    #[arg(long, allow_negative_numbers = true)]
    lambda_n: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    /// Case 3 weight of Case 1; the Case 2 weight becomes 1 - p1.
    #[arg(long, allow_negative_numbers = true)]
    p1: Option<f64>,
    /// Rain rate in mm/h.
    #[arg(long, allow_negative_numbers = true)]
    rain_rate: Option<f64>,
    #[arg(long, default_value = "paper-linear")]
    atten_mode: AttenuationMode,
    /// Spherical baseline radius in km.
    #[arg(long, allow_negative_numbers = true)]
    sphere_radius: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct McFlags {
    #[arg(long, default_value_t = 20_000)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// What to do with an empty network: resample | force-single.
    #[arg(long, default_value = "resample")]
    empty_policy: EmptyNetworkPolicy,
    /// Interferers: network (all other nodes) | annulus (the analytic field).
    #[arg(long, default_value = "network")]
    field: InterferenceField,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// CP at a single threshold.
    Cp {
        #[arg(long, default_value = "case1")]
        case: CaseName,
        #[arg(long, default_value_t = -40.0, allow_hyphen_values = true)]
        ts_db: f64,
        /// analytic | upper_bound | monte_carlo
        #[arg(long, default_value = "analytic")]
        method: Method,
        #[command(flatten)]
        params: ParamFlags,
        #[command(flatten)]
        mc: McFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep a grid of cases, methods, thresholds and parameters.
    Sweep {
        /// fig-lambda | fig-alpha | fig-epsilon | fig-sphere
        #[arg(long)]
        preset: Option<String>,
        /// Comma-separated cases (case1,case2,case3,sphere).
        #[arg(long)]
        case: Option<CaseList>,
        /// Threshold grid, `start:step:stop` or a comma list (dB).
        #[arg(long, allow_hyphen_values = true)]
        ts_db: Option<String>,
        /// Comma-separated methods.
        #[arg(long)]
        methods: Option<String>,
        #[command(flatten)]
        params: ParamFlags,
        #[command(flatten)]
        mc: McFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Case 3 against the spherical baseline.
    Compare {
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        ts_db: Option<String>,
        #[arg(long)]
        methods: Option<String>,
        #[command(flatten)]
        params: ParamFlags,
        #[command(flatten)]
        mc: McFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Slant-distance and altitude law tables.
    Dist {
        #[arg(long, default_value = "case1")]
        case: CaseName,
        #[arg(long, default_value_t = 101)]
        grid_size: usize,
        #[command(flatten)]
        params: ParamFlags,
        /// Distance table path (stdout if absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Altitude table path (appended to stdout if absent).
        #[arg(long)]
        out_h: Option<PathBuf>,
    },
    /// Monte Carlo estimates over a threshold grid.
    Mc {
        #[arg(long, default_value = "case1")]
        case: CaseName,
        #[arg(long, allow_hyphen_values = true)]
        ts_db: Option<String>,
        #[command(flatten)]
        params: ParamFlags,
        #[command(flatten)]
        mc: McFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn base_params(config: Option<&Path>, flags: &ParamFlags) -> Result<NetworkParams> {
    let mut p = match config {
        Some(path) => load_config(path)?,
        None => NetworkParams::default(),
    };
    if let Some(v) = flags.lambda_n {
        p.lambda_n = v;
    }
    if let Some(v) = flags.alpha {
        p.alpha = v;
    }
    if let Some(v) = flags.epsilon {
        p.epsilon = v;
    }
    if let Some(v) = flags.p1 {
        p.p1 = v;
        p.p2 = 1.0 - v;
    }
    if let Some(v) = flags.rain_rate {
        p.rain_rate_mm_h = v;
    }
    p.validate()?;
    Ok(p)
}

fn mc_config(flags: &McFlags, mode: AttenuationMode) -> McConfig {
    McConfig {
        n_trials: flags.trials,
        seed: flags.seed,
        mode,
        min_nodes_policy: flags.empty_policy,
        field: flags.field,
    }
}

fn parse_methods(text: &str) -> Result<Vec<Method>> {
    text.split(',')
        .map(|m| {
            m.parse::<Method>()
                .map_err(|e| Error::InvalidSweep(format!("--methods: {e}")))
        })
        .collect()
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn grid_spec(
    preset: Option<&str>,
    params: &NetworkParams,
    flags: &ParamFlags,
    mc: &McFlags,
    ts_db: Option<&str>,
    methods: Option<&str>,
) -> Result<SweepSpec> {
    let mut spec = match preset {
        Some(name) => SweepSpec::preset(name, params)?,
        None => SweepSpec::at(params, vec![CaseName::Case1], vec![Method::Analytic]),
    };
    spec.ts_db = match ts_db {
        Some(g) => parse_grid(g).map_err(|e| match e {
            Error::InvalidSweep(m) => Error::InvalidSweep(format!("--ts-db: {m}")),
            other => other,
        })?,
        None => default_ts_grid(),
    };
    if let Some(m) = methods {
        spec.methods = parse_methods(m)?;
    }
    spec.mode = flags.atten_mode;
    spec.mc = mc_config(mc, flags.atten_mode);
    spec.sphere_radius_km = flags.sphere_radius;
    Ok(spec)
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidParam {
                key: "threads",
                reason: e.to_string(),
            })?;
    }
    let config = cli.config.as_deref();
    match &cli.cmd {
        Cmd::Cp {
            case,
            ts_db,
            method,
            params,
            mc,
            out,
        } => {
            let p = base_params(config, params)?;
            let mut spec = grid_spec(None, &p, params, mc, None, None)?;
            spec.cases = vec![*case];
            spec.methods = vec![*method];
            spec.ts_db = vec![*ts_db];
            write_rows(&run_sweep(&spec, &p)?, output(out.as_deref())?)
        }
        Cmd::Sweep {
            preset,
            case,
            ts_db,
            methods,
            params,
            mc,
            out,
        } => {
            let p = base_params(config, params)?;
            let mut spec = grid_spec(
                preset.as_deref(),
                &p,
                params,
                mc,
                ts_db.as_deref(),
                methods.as_deref(),
            )?;
            if let Some(c) = case {
                spec.cases = c.0.clone();
            }
            write_rows(&run_sweep(&spec, &p)?, output(out.as_deref())?)
        }
        Cmd::Compare {
            preset,
            ts_db,
            methods,
            params,
            mc,
            out,
        } => {
            let p = base_params(config, params)?;
            let spec = grid_spec(
                preset.as_deref(),
                &p,
                params,
                mc,
                ts_db.as_deref(),
                methods.as_deref(),
            )?;
            let cmp = compare_models(&spec, &p)?;
            eprintln!(
                "case3 >= sphere at {} of grid points",
                cmp.case3_ge_fraction
            );
            write_comparison(&cmp, output(out.as_deref())?)
        }
        Cmd::Dist {
            case,
            grid_size,
            params,
            out,
            out_h,
        } => {
            let p = base_params(config, params)?;
            let tables =
                emit_distribution_tables(&case.bind(&p, params.sphere_radius), &p, *grid_size)?;
            let mut w = output(out.as_deref())?;
            write_distance_table(&tables.distance, &mut w)?;
            match out_h {
                Some(path) => write_altitude_table(&tables.altitude, output(Some(path))?),
                None => {
                    writeln!(w)?;
                    write_altitude_table(&tables.altitude, w)
                }
            }
        }
        Cmd::Mc {
            case,
            ts_db,
            params,
            mc,
            out,
        } => {
            let p = base_params(config, params)?;
            let mut spec = grid_spec(None, &p, params, mc, ts_db.as_deref(), Some("monte_carlo"))?;
            spec.cases = vec![*case];
            write_rows(&run_sweep(&spec, &p)?, output(out.as_deref())?)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Convergence { .. } | Error::SeriesNotConverged { .. } => 3,
        Error::Io(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
