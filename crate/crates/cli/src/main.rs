use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kcc_cli::config::{apply, parse_config, ConfigError, ExperimentConfig, Group};
use kcc_cli::{run_experiment, CliError, EXIT_CONFIG, EXIT_INVARIANT, EXIT_OK};

#[derive(Parser, Debug)]
#[command(name = "kcc", version, about = "Kolmogorov consistency violation in non-Markovian qubit dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        exec: Exec,
    },
    /// Run the acceptance suite and print one line per criterion.
    Check {
        /// Only run these criterion ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
    /// Decay rates and cumulative areas.
    Rates(GroupArgs),
    /// Consistency violation at (t1, t2).
    Viol(GroupArgs),
    /// RHP and BLP measures with the violation sandwich.
    Nonmarkov(GroupArgs),
    /// Entropy, heat and entropy production trajectories.
    Thermo(GroupArgs),
    /// Leggett-Garg correlators and Kirkwood-Dirac interference.
    Witnesses(GroupArgs),
}

#[derive(Args, Debug)]
struct Exec {
    /// Output directory, overriding `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for the sweep (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct GroupArgs {
    /// Optional config file providing the base parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Parameter override, repeatable, e.g. `--set t1=10 --set omega_c=linspace(1,5,5)`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(flatten)]
    exec: Exec,
}

fn load(path: &PathBuf) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        line: 0,
        key: "--config".into(),
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    Ok(parse_config(&text)?)
}

fn group_config(group: Group, args: &GroupArgs) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => load(path)?,
        None => ExperimentConfig::default(),
    };
    for item in &args.set {
        let flag_error = |message: String| ConfigError { line: 0, key: item.clone(), message };
        let (key, value) = item.split_once('=').ok_or_else(|| flag_error("expected KEY=VALUE".into()))?;
        apply(&mut cfg, key.trim(), value.trim()).map_err(flag_error)?;
    }
    cfg.outputs = vec![group];
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cfg: ExperimentConfig, exec: &Exec) -> Result<i32, CliError> {
    let dir = exec.out.clone().unwrap_or_else(|| cfg.out_dir.clone());
    let report = run_experiment(&cfg, exec.jobs)?;
    report.write(&dir)?;
    println!(
        "{} sweep points, {} files in {}, {} numeric errors, {} invariant failures",
        report.points,
        report.files.len(),
        dir.display(),
        report.numeric_errors,
        report.invariant_failures
    );
    Ok(report.exit_code())
}

fn check(only: &[u8]) -> i32 {
    let ids: Vec<u8> = if only.is_empty() { (1..=12).collect() } else { only.to_vec() };
    let mut all_pass = true;
    for id in ids {
        if !(1..=12).contains(&id) {
            eprintln!("unknown criterion {id}");
            return EXIT_CONFIG;
        }
        let r = kcc_validation::run_criterion(id);
        all_pass &= r.passed;
        println!("{r}");
    }
    if all_pass {
        EXIT_OK
    } else {
        EXIT_INVARIANT
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    let (group, args) = match cli.command {
        Command::Run { config, exec } => return execute(load(&config)?, &exec),
        Command::Check { only } => return Ok(check(&only)),
        Command::Rates(a) => (Group::Rates, a),
        Command::Viol(a) => (Group::Viol, a),
        Command::Nonmarkov(a) => (Group::Nonmarkov, a),
        Command::Thermo(a) => (Group::Thermo, a),
        Command::Witnesses(a) => (Group::Witnesses, a),
    };
    execute(group_config(group, &args)?, &args.exec)
}

fn main() -> ExitCode {
    let code = match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
