use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sbc_lab::compare::compare;
use sbc_lab::config::{apply_override, split_assignment, RunSpec};
use sbc_lab::output::Table;
use sbc_lab::run::{run_all, thread_cap};
use sbc_lab::scenario::scenario;
use sbc_lab::LabError;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "sbc-lab", version, about = "Adaptive subsystem-based control simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a config file or built-in scenarios.
    Run(RunArgs),
    /// Print the spec of a built-in scenario.
    Scenario { name: String },
    /// Per-channel max |a - b| of two trace CSVs.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = f64::NEG_INFINITY)]
        from: f64,
        #[arg(long, default_value_t = f64::INFINITY)]
        to: f64,
    },
}

#[derive(Parser)]
struct RunArgs {
    #[arg(long, conflicts_with = "scenario")]
    config: Option<PathBuf>,
    /// c1, c2 or c3; repeat to run several in parallel.
    #[arg(long)]
    scenario: Vec<String>,
    /// Override a spec field, e.g. `controller.adapt.0.rho=500`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (one subdirectory per scenario when several run).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    plots: bool,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long, value_enum)]
    integrator: Option<IntegratorArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum IntegratorArg {
    Euler,
    Rk4,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Scenario { name } => scenario(&name).map(|s| println!("{}", s.to_json())),
        Command::Compare { a, b, from, to } => compare_files(&a, &b, from, to),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn report(e: &LabError) {
    eprintln!("{}", json!({ "error": e.category(), "message": e.to_string() }));
}

fn run(args: RunArgs) -> Result<(), LabError> {
    let mut docs: Vec<(String, Value)> = match (&args.config, args.scenario.is_empty()) {
        (Some(path), _) => vec![(path.display().to_string(), RunSpec::load(path)?)],
        (None, false) => args.scenario.iter().map(|n| Ok((n.clone(), scenario(n)?.to_value()))).collect::<Result<_, LabError>>()?,
        (None, true) => return Err(LabError::Config("run needs --config or --scenario".into())),
    };
    let mut sets: Vec<(String, String)> = Vec::new();
    for s in &args.set {
        let (k, v) = split_assignment(s)?;
        sets.push((k.into(), v.into()));
    }
    if let Some(dt) = args.dt {
        sets.push(("sim.dt".into(), dt.to_string()));
    }
    if let Some(d) = args.duration {
        sets.push(("sim.duration".into(), d.to_string()));
    }
    if let Some(i) = args.integrator {
        sets.push(("sim.integrator".into(), match i {
            IntegratorArg::Euler => "euler",
            IntegratorArg::Rk4 => "rk4",
        }.into()));
    }
    if args.plots {
        sets.push(("output.plots".into(), "true".into()));
    }
    let several = docs.len() > 1;
    let mut jobs = Vec::new();
    let mut names = Vec::new();
    for (name, doc) in &mut docs {
        for (k, v) in &sets {
            apply_override(doc, k, v)?;
        }
        let spec = RunSpec::from_value(doc.clone())?;
        spec.prepare()?;
        let dir = match &args.out {
            Some(out) if several => out.join(&*name),
            Some(out) => out.clone(),
            None => PathBuf::from(&spec.output.dir),
        };
        let plots = spec.output.plots;
        names.push((name.clone(), dir.clone()));
        jobs.push((spec, dir, plots));
    }

    let mut worst: Option<LabError> = None;
    for ((name, dir), result) in names.iter().zip(run_all(&jobs, thread_cap())) {
        match result {
            Ok(out) => println!("{}", json!({ "run": name, "dir": dir, "metrics": out.metrics })),
            Err(e) => {
                if several {
                    report(&e);
                }
                if worst.as_ref().is_none_or(|w| e.exit_code() > w.exit_code()) {
                    worst = Some(e);
                }
            }
        }
    }
    worst.map_or(Ok(()), Err)
}

fn compare_files(a: &PathBuf, b: &PathBuf, from: f64, to: f64) -> Result<(), LabError> {
    let read = |p: &PathBuf| std::fs::read_to_string(p).map_err(|source| LabError::Io { path: p.clone(), source });
    let ta = Table::from_csv(&read(a)?)?;
    let tb = Table::from_csv(&read(b)?)?;
    let d = compare(&ta, &tb, from, to)?;
    let channels: serde_json::Map<String, Value> = d.channels.iter().map(|(c, v)| (c.clone(), json!(v))).collect();
    println!("{}", json!({ "samples": d.samples, "max_abs_diff": channels }));
    Ok(())
}
