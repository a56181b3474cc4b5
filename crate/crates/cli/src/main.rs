mod reference;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mirrorpf_core::exact::{parse_rational, Rational};
use mirrorpf_core::mirror::{DEFAULT_DEPTH, DEFAULT_ORDER};
use mirrorpf_core::multipoly::{FamilySpec, NVARS};
use mirrorpf_core::Error;
use num_traits::Zero;
use serde_json::json;

use report::Failure;

/// Picard-Fuchs operators, mirror maps and instanton numbers for
/// one-parameter Calabi-Yau hypersurface families.
#[derive(Parser, Debug)]
#[command(name = "mirrorpf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone)]
enum Command {
    /// Reduction coefficients, operator coefficients and the singular point.
    Derive(#[command(flatten)] RunArgs),
    /// Instanton numbers n_0..n_depth.
    Curves(#[command(flatten)] RunArgs),
    /// Run every consistency check and report pass/fail per check.
    Verify(#[command(flatten)] RunArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Derive(_) => "derive",
            Command::Curves(_) => "curves",
            Command::Verify(_) => "verify",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Derive(a) | Command::Curves(a) | Command::Verify(a) => a,
        }
    }
}

#[derive(clap::Args, Debug, Clone)]
struct RunArgs {
    /// Built-in family: k5, k6, k8, k10 or all.
    #[arg(long, conflicts_with = "weights")]
    family: Option<FamilyArg>,
    /// Explicit weights, comma separated and non-increasing (e.g. 2,1,1,1,1).
    #[arg(long, value_parser = parse_weights)]
    weights: Option<Weights>,
    /// Truncation order of every power series.
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    order: usize,
    /// Number of q-coefficients after the constant term.
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    depth: usize,
    /// Override for the second integration constant (default k^-k).
    #[arg(long, value_parser = parse_c2)]
    c2: Option<Rational>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    K5,
    K6,
    K8,
    K10,
    All,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
struct Weights([u32; NVARS]);

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
    Text,
}

impl Format {
    fn extension(&self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Tsv => "tsv",
            Format::Text => "txt",
        }
    }
}

fn parse_weights(s: &str) -> Result<Weights, String> {
    let parts: Vec<u32> = s
        .split(',')
        .map(|p| p.trim().parse::<u32>().map_err(|e| format!("bad weight {p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let arr: [u32; NVARS] = parts
        .try_into()
        .map_err(|v: Vec<u32>| format!("expected {NVARS} weights, got {}", v.len()))?;
    Ok(Weights(arr))
}

fn parse_c2(s: &str) -> Result<Rational, String> {
    let q = parse_rational(s).map_err(|e| e.to_string())?;
    if q.is_zero() {
        return Err("c2 must be nonzero".into());
    }
    Ok(q)
}

/// Environment variable naming a directory for output files when `--output` is absent.
const OUTPUT_DIR_ENV: &str = "MIRRORPF_OUTPUT_DIR";

pub struct RunConfig {
    pub families: Vec<FamilySpec>,
    pub order: usize,
    pub depth: usize,
    pub c2: Option<Rational>,
    pub format: Format,
}

fn build_config(args: &RunArgs) -> Result<(RunConfig, String), Failure> {
    let (families, label) = match (args.family, args.weights) {
        (_, Some(Weights(w))) => {
            let spec = FamilySpec::new(w).map_err(|e| Failure::input(e, None))?;
            let label = format!("k{}", spec.k());
            (vec![spec], label)
        }
        (Some(FamilyArg::All) | None, None) => (FamilySpec::builtins().to_vec(), "all".to_string()),
        (Some(f), None) => {
            let k = match f {
                FamilyArg::K5 => 5,
                FamilyArg::K6 => 6,
                FamilyArg::K8 => 8,
                FamilyArg::K10 => 10,
                FamilyArg::All => unreachable!(),
            };
            (vec![FamilySpec::builtin(k).expect("built-in family")], format!("k{k}"))
        }
    };
    if args.depth >= args.order {
        return Err(Failure::input(
            Error::OrderExhausted {
                requested: args.depth,
                valid: args.order,
            },
            None,
        ));
    }
    let config = RunConfig {
        families,
        order: args.order,
        depth: args.depth,
        c2: args.c2.clone(),
        format: args.format,
    };
    Ok((config, label))
}

fn output_path(command: &Command, label: &str) -> Option<PathBuf> {
    let args = command.args();
    if let Some(p) = &args.output {
        return Some(p.clone());
    }
    let dir = std::env::var_os(OUTPUT_DIR_ENV).filter(|d| !d.is_empty())?;
    Some(PathBuf::from(dir).join(format!("{}-{}.{}", command.name(), label, args.format.extension())))
}

fn emit(text: &str, path: Option<PathBuf>) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Internal(json!({"error": "Io", "message": e.to_string()}));
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(io)?;
            }
            std::fs::write(&p, text).map_err(io)
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(io)?;
            out.flush().map_err(io)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let (config, label) = build_config(cli.command.args())?;
    let (text, verdict) = match cli.command {
        Command::Derive(_) => (report::derive(&config)?, Ok(())),
        Command::Curves(_) => (report::curves(&config)?, Ok(())),
        Command::Verify(_) => report::verify(&config)?,
    };
    emit(&text, output_path(&cli.command, &label))?;
    verdict
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, body) = f.into_parts();
            if let Some(body) = body {
                eprintln!("{body}");
            }
            ExitCode::from(code)
        }
    }
}
