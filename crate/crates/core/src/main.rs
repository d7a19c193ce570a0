use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mpqc::backend::BackendKind;
use mpqc::circuit::Circuit;
use mpqc::harness::{parse_prep, run_experiment, scenario, write_reports, ComparisonMode, ExperimentSpec, HarnessError};
use mpqc::netsim::NetworkConfig;

#[derive(Parser)]
#[command(name = "mpqc", about = "Simulated verifiable multiparty quantum computation")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a canned scenario or a circuit file.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, conflicts_with = "circuit", required_unless_present = "circuit")]
    scenario: Option<String>,
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    /// First seed; `--seeds` consecutive seeds are run.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long)]
    backend: Option<BackendKind>,
    #[arg(long)]
    level: Option<u32>,
    /// `steane` or a code description file.
    #[arg(long)]
    code: Option<String>,
    #[arg(long)]
    adversary: Option<String>,
    #[arg(long)]
    adv_seed: Option<u64>,
    /// Comma-separated node ids.
    #[arg(long, value_delimiter = ',')]
    corrupt: Option<Vec<usize>>,
    /// Comma-separated input states (0, 1, +, -, +i, m); defaults to |0⟩ everywhere.
    #[arg(long, value_delimiter = ',')]
    inputs: Option<Vec<String>>,
    #[arg(long, default_value = "mpqc-out")]
    out: PathBuf,
}

fn build_spec(a: &RunArgs) -> Result<ExperimentSpec, HarnessError> {
    let mut spec = match (&a.scenario, &a.circuit) {
        (Some(name), _) => scenario(name)?,
        (None, Some(path)) => {
            let circuit = Circuit::parse(&std::fs::read_to_string(path)?)?;
            ExperimentSpec {
                scenario: path.display().to_string(),
                config: NetworkConfig::new(7, 2, 0, BackendKind::Frame),
                inputs: vec![mpqc::backend::register::Prep::Zero; circuit.inputs],
                circuit,
                adversary: "honest".into(),
                corrupt: None,
                adv_seed: 0,
                seeds: vec![0],
                mode: ComparisonMode::VsIdealOracle,
                s_values: vec![],
            }
        }
        (None, None) => unreachable!("clap requires one of --scenario or --circuit"),
    };
    if let Some(n) = a.n {
        spec.config.n = n;
    }
    if let Some(s) = a.s {
        spec.config.s = s;
        spec.s_values.clear();
    }
    if let Some(b) = a.backend {
        spec.config.backend = b;
    }
    if let Some(l) = a.level {
        spec.config.level = l;
    }
    if let Some(c) = &a.code {
        spec.config.code = c.clone();
    }
    if a.seed.is_some() || a.seeds.is_some() {
        let first = a.seed.unwrap_or(0);
        spec.seeds = (first..first + a.seeds.unwrap_or(1)).collect();
    }
    if let Some(adv) = &a.adversary {
        spec.adversary = adv.clone();
    }
    if let Some(s) = a.adv_seed {
        spec.adv_seed = s;
    }
    if let Some(c) = &a.corrupt {
        spec.corrupt = Some(c.iter().copied().collect::<BTreeSet<_>>());
    }
    if let Some(inputs) = &a.inputs {
        spec.inputs = inputs.iter().map(|s| parse_prep(s)).collect::<Result<_, _>>()?;
    }
    Ok(spec)
}

fn main() -> ExitCode {
    let Cmd::Run(args) = Cli::parse().cmd;
    let result = build_spec(&args).and_then(|spec| {
        let report = run_experiment(&spec)?;
        write_reports(&report, &args.out)?;
        Ok(report)
    });
    match result {
        Ok(report) => {
            print!("{}", report.table());
            println!("reports written to {}", args.out.display());
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
