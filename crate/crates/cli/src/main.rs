//! `polyliouville` command-line interface.

mod commands;
mod output;
mod run_config;

use clap::{Args, Parser, Subcommand};
use commands::Failure;
use output::Output;
use run_config::{Overrides, RunConfig};
use serde_json::{json, Map, Value};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "polyliouville", version, about = "Concentrating solutions of polyharmonic Liouville problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensional constants for the configured orders.
    Constants(Common),
    /// Green function table and Robin function samples.
    Green(Common),
    /// Landscape and minimum of the reduced functional phi_k.
    Phi(Common),
    /// Ansatz error norms over the eps sweep, plus an ansatz dump.
    Residual(Common),
    /// Energy of the ansatz against its predicted expansion.
    Energy(Common),
    /// Sphere spectral table and numerical kernel count.
    Spectra(Common),
    /// Full Lyapunov-Schmidt construction of a solution.
    Solve(Common),
    /// Critical level of phi_k from a linking configuration.
    Linking(Common),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Constants(_) => "constants",
            Command::Green(_) => "green",
            Command::Phi(_) => "phi",
            Command::Residual(_) => "residual",
            Command::Energy(_) => "energy",
            Command::Spectra(_) => "spectra",
            Command::Solve(_) => "solve",
            Command::Linking(_) => "linking",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Constants(c)
            | Command::Green(c)
            | Command::Phi(c)
            | Command::Residual(c)
            | Command::Energy(c)
            | Command::Spectra(c)
            | Command::Solve(c)
            | Command::Linking(c) => c,
        }
    }
}

#[derive(Args, Clone)]
struct Common {
    /// JSON run configuration (unknown keys are rejected).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated list of eps values.
    #[arg(long, value_delimiter = ',')]
    eps_sweep: Option<Vec<f64>>,
    /// Built-in preset: disc-k1, disc-k2, square-k1, ball4-k1.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    /// Operator order.
    #[arg(long)]
    m: Option<u32>,
    /// Largest order in the spectral table.
    #[arg(long)]
    m_max: Option<u32>,
    /// Largest spherical-harmonic degree in the spectral table.
    #[arg(long)]
    k_max: Option<u32>,
    #[arg(long)]
    tol_multiplier: Option<f64>,
    #[arg(long)]
    tol_gradient: Option<f64>,
    #[arg(long)]
    tol_fixed_point: Option<f64>,
    #[arg(long)]
    tol_max_fixed_point_iterations: Option<usize>,
    #[arg(long)]
    tol_search_gradient: Option<f64>,
    #[arg(long)]
    tol_search_gradient_grid: Option<f64>,
    #[arg(long)]
    tol_degenerate: Option<f64>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        let mut tol = Map::new();
        let mut put = |k: &str, v: Option<Value>| {
            if let Some(v) = v {
                tol.insert(k.to_string(), v);
            }
        };
        put("multiplier", self.tol_multiplier.map(|v| json!(v)));
        put("gradient", self.tol_gradient.map(|v| json!(v)));
        put("fixed_point", self.tol_fixed_point.map(|v| json!(v)));
        put("max_fixed_point_iterations", self.tol_max_fixed_point_iterations.map(|v| json!(v)));
        put("search_gradient", self.tol_search_gradient.map(|v| json!(v)));
        put("search_gradient_grid", self.tol_search_gradient_grid.map(|v| json!(v)));
        put("degenerate", self.tol_degenerate.map(|v| json!(v)));
        Overrides {
            seed: self.seed,
            eps_sweep: self.eps_sweep.clone(),
            eps: self.eps,
            m: self.m,
            m_max: self.m_max,
            k_max: self.k_max,
            tolerances: tol,
        }
    }

    fn resolve(&self) -> Result<RunConfig, String> {
        let text = match &self.config {
            Some(p) => Some(std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?),
            None => None,
        };
        run_config::resolve(self.preset.as_deref(), text.as_deref(), &self.overrides())
    }
}

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERIC: u8 = 2;

fn run(command: &Command) -> Result<(), u8> {
    let start = Instant::now();
    let common = command.common();
    let cfg = common.resolve().map_err(|e| {
        eprintln!("error: {e}");
        EXIT_CONFIG
    })?;
    let mut out = Output::new(&common.out, cfg.output.digits).map_err(|e| {
        eprintln!("error: cannot create {}: {e}", common.out.display());
        EXIT_CONFIG
    })?;
    let result = match command {
        Command::Constants(_) => commands::constants(&cfg, &mut out),
        Command::Green(_) => commands::green(&cfg, &mut out),
        Command::Phi(_) => commands::phi(&cfg, &mut out),
        Command::Residual(_) => commands::residual(&cfg, &mut out),
        Command::Energy(_) => commands::energy(&cfg, &mut out),
        Command::Spectra(_) => commands::spectra(&cfg, &mut out),
        Command::Solve(_) => commands::solve(&cfg, &mut out),
        Command::Linking(_) => commands::linking(&cfg, &mut out),
    };
    let code = match result {
        Ok(()) => 0,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            EXIT_CONFIG
        }
        Err(Failure::Numeric { message, diagnostic }) => {
            eprintln!("numeric failure: {message}");
            let doc = json!({"command": command.name(), "error": message, "details": diagnostic});
            if let Err(e) = out.json("diagnostic.json", &doc) {
                eprintln!("error: cannot write diagnostic: {e}");
            }
            EXIT_NUMERIC
        }
    };
    let manifest = json!({
        "command": command.name(),
        "resolved_config": serde_json::to_value(&cfg).unwrap_or(Value::Null),
        "files": out.files(),
        "wall_time_s": start.elapsed().as_secs_f64(),
        "versions": {
            "polyliouville": polyliouville::VERSION,
            "polyliouville-cli": env!("CARGO_PKG_VERSION"),
        },
        "exit_code": code,
    });
    if let Err(e) = out.json_exact("manifest.json", &manifest) {
        eprintln!("error: cannot write manifest: {e}");
        return Err(EXIT_CONFIG);
    }
    if code == 0 {
        Ok(())
    } else {
        Err(code)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}
