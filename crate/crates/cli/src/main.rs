use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use drharmonic_cli::{load_config, run_checks, ExitStatus, RunConfig, RunOptions};
use drharmonic_cli::{DEFAULT_OUT_DIR, OUT_DIR_ENV};
use drharmonic::jacobi::spherical_phi;
use drharmonic::radial::{
    export_spectral, import_radial, spectral_grid, spherical_transform, CALIBRATION_LAMBDA_MAX,
    HELD_OUT_PROFILES, REFERENCE_PROFILE,
};
use drharmonic::{derive_params, DrParams};

/// Spherical analysis on Damek–Ricci spaces and audits of the
/// Titchmarsh-type inequalities.
///
/// Exit status: 0 all checks pass, 1 bad usage or config, 2 some check
/// fails, 3 some check is inconclusive and none fails, 4 output I/O error.
#[derive(Parser)]
#[command(name = "drharmonic", version)]
struct Cli {
    /// TOML run description.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output_dir` and $DRHARMONIC_OUT_DIR.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Multiplies every check tolerance.
    #[arg(long, global = true, default_value_t = 1.0)]
    tol_scale: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the derived constants of a space as JSON.
    Params(SpaceArgs),
    /// Tabulate φ_λ(t).
    Phi {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        lambda: f64,
        /// Comma-separated radii.
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
    },
    /// Spherical transform of a built-in or imported radial profile.
    Transform {
        #[command(flatten)]
        space: SpaceArgs,
        /// One of gauss, gauss_narrow, t2_gauss, bump6.
        #[arg(long, conflicts_with = "input")]
        profile: Option<String>,
        /// Radial samples in the exchange format.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        lambda_max: Option<f64>,
        #[arg(long)]
        panel_width: Option<f64>,
        /// Destination; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the checks listed in --config.
    Check,
}

#[derive(clap::Args)]
struct SpaceArgs {
    #[arg(long, requires = "k")]
    m: Option<u32>,
    #[arg(long, requires = "m")]
    k: Option<u32>,
}

#[derive(Debug)]
struct Failure {
    status: ExitStatus,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        status: ExitStatus::Config,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(s) => ExitCode::from(s.code()),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.status.code())
        }
    }
}

/// Stdout write that tolerates a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn load(cli: &Cli) -> Result<Option<RunConfig>, Failure> {
    match &cli.config {
        Some(p) => load_config(p).map(Some).map_err(|e| usage(e.to_string())),
        None => Ok(None),
    }
}

fn space(args: &SpaceArgs, cfg: Option<&RunConfig>) -> Result<DrParams, Failure> {
    match (args.m, args.k, cfg) {
        (Some(m), Some(k), _) => derive_params(m, k).map_err(|e| usage(format!("--m/--k: {e}"))),
        (_, _, Some(c)) => Ok(c.params.clone()),
        _ => Err(usage("give --m and --k, or --config")),
    }
}

fn dispatch(cli: Cli) -> Result<ExitStatus, Failure> {
    if !(cli.tol_scale > 0.0 && cli.tol_scale.is_finite()) {
        return Err(usage(format!("--tol-scale must be positive, got {}", cli.tol_scale)));
    }
    if cli.jobs == Some(0) {
        return Err(usage("--jobs must be at least 1"));
    }
    let cfg = load(&cli)?;
    match &cli.command {
        Command::Params(s) => {
            let p = space(s, cfg.as_ref())?;
            let json = serde_json::to_string_pretty(&p).map_err(|e| usage(e.to_string()))?;
            emit(&format!("{json}\n"));
            Ok(ExitStatus::Pass)
        }
        Command::Phi { space: s, lambda, t } => {
            let p = space(s, cfg.as_ref())?;
            let mut text = String::from("t,phi,method,est_error\n");
            for &ti in t {
                let e = spherical_phi(&p, *lambda, ti).map_err(|e| Failure {
                    status: ExitStatus::Fail,
                    message: format!("phi at t = {ti}: {e}"),
                })?;
                let method = serde_json::to_value(e.method)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default();
                text.push_str(&format!(
                    "{:.16e},{:.16e},{method},{:.3e}\n",
                    e.t, e.value, e.est_error
                ));
            }
            emit(&text);
            Ok(ExitStatus::Pass)
        }
        Command::Transform {
            space: s,
            profile,
            input,
            lambda_max,
            panel_width,
            output,
        } => {
            let p = space(s, cfg.as_ref())?;
            let grids = cfg.as_ref().map(|c| c.file.grids);
            let f = match (profile, input) {
                (_, Some(path)) => {
                    let text = fs::read_to_string(path)
                        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
                    import_radial(&p, &text).map_err(|e| usage(format!("{}: {e}", path.display())))?
                }
                (name, None) => {
                    let name = name.as_deref().unwrap_or(REFERENCE_PROFILE.name);
                    let tp = std::iter::once(&REFERENCE_PROFILE)
                        .chain(HELD_OUT_PROFILES.iter())
                        .find(|tp| tp.name == name)
                        .ok_or_else(|| usage(format!("unknown --profile `{name}`")))?;
                    tp.radial(&p).map_err(|e| usage(e.to_string()))?
                }
            };
            let lmax = lambda_max
                .or(grids.map(|g| g.lambda_max))
                .unwrap_or(CALIBRATION_LAMBDA_MAX);
            let width = panel_width
                .or(grids.map(|g| g.lambda_panel_width))
                .unwrap_or(0.5);
            let lgrid = spectral_grid(lmax, width).map_err(|e| usage(e.to_string()))?;
            let g = spherical_transform(&p, &f, &lgrid).map_err(|e| Failure {
                status: ExitStatus::Fail,
                message: e.to_string(),
            })?;
            let text = export_spectral(&p, &g);
            match output {
                Some(path) => fs::write(path, text).map_err(|e| Failure {
                    status: ExitStatus::Io,
                    message: format!("{}: {e}", path.display()),
                })?,
                None => emit(&text),
            }
            Ok(ExitStatus::Pass)
        }
        Command::Check => {
            let cfg = cfg.ok_or_else(|| usage("check needs --config"))?;
            let out_dir = cli
                .out
                .clone()
                .or_else(|| cfg.file.output_dir.clone())
                .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
            let opts = RunOptions {
                out_dir,
                jobs: cli.jobs,
                tol_scale: cli.tol_scale,
            };
            let outcome = run_checks(&cfg, &opts);
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            for c in &outcome.checks {
                match &c.error {
                    Some(e) => eprintln!("{:<20} {} ({e})", c.name.canonical(), c.report.verdict.as_str()),
                    None => eprintln!("{:<20} {}", c.name.canonical(), c.report.verdict.as_str()),
                }
            }
            if let Some(e) = &outcome.io_error {
                eprintln!("error: {e}");
            }
            Ok(outcome.status)
        }
    }
}
