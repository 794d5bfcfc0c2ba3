//! Command-line driver: run one experiment from a config file or scenario
//! preset, a refinement study, or a sweep over a directory of config files.
//! Exit code 0 means every gate passed; 1 is a gate failure or blow-up;
//! config and I/O problems exit with 2.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use bbmb::harness::{
    self, parse_config, refinement_study, ExperimentSpec, Scenario, SweepItem,
};

#[derive(Parser, Debug)]
#[command(
    name = "simulate",
    about = "BBM-Burgers rarefaction laboratory",
    arg_required_else_help = true
)]
struct Cli {
    /// Config file of key=value lines (optional when --scenario or --sweep
    /// is given).
    config: Option<PathBuf>,

    /// CSV output path (overrides the config's output_path).
    #[arg(long)]
    output: Option<PathBuf>,

    /// Final time (overrides the config's t_end).
    #[arg(long = "t-end")]
    t_end: Option<f64>,

    /// Number of grid points (overrides the config's n_points).
    #[arg(long = "grid-n")]
    grid_n: Option<usize>,

    /// Scenario preset: thm1_1 .. thm1_6 or custom.
    #[arg(long)]
    scenario: Option<String>,

    /// Run a refinement study with this many halvings (>= 2) instead of a
    /// single experiment.
    #[arg(long)]
    refine: Option<usize>,

    /// Run every *.cfg file in this directory as an independent experiment
    /// and write a sweep index.
    #[arg(long)]
    sweep: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: &Cli) -> bbmb::Result<bool> {
    if let Some(dir) = &cli.sweep {
        return run_sweep(dir);
    }
    let spec = resolve_spec(cli)?;
    if let Some(levels) = cli.refine {
        let table = refinement_study(&spec, levels)?;
        print!("{}", table.render());
        let ok = table.monotone();
        println!("# refinement: {}", if ok { "PASS" } else { "FAIL" });
        return Ok(ok);
    }
    let outcome = harness::run_experiment(&spec)?;
    for gate in &outcome.gates {
        println!(
            "gate {}: {} ({})",
            gate.name,
            if gate.passed { "PASS" } else { "FAIL" },
            gate.detail
        );
    }
    println!(
        "{}: {} -> {}",
        spec.scenario.name(),
        if outcome.passed() { "PASS" } else { "FAIL" },
        spec.output_path.display()
    );
    Ok(outcome.passed())
}

/// Build the spec from the config file and/or flags; flags win over file keys.
fn resolve_spec(cli: &Cli) -> bbmb::Result<ExperimentSpec> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path)?,
        None => String::new(),
    };
    if cli.config.is_none() && cli.scenario.is_none() {
        return Err(bbmb::Error::contract(
            "provide a config file, --scenario, or --sweep",
        ));
    }
    let mut overrides = Vec::new();
    if let Some(scenario) = &cli.scenario {
        if Scenario::from_name(scenario).is_none() {
            return Err(bbmb::Error::contract(format!(
                "unknown scenario '{scenario}'"
            )));
        }
        overrides.push(("scenario", scenario.clone()));
    }
    if let Some(t_end) = cli.t_end {
        overrides.push(("t_end", t_end.to_string()));
    }
    if let Some(n) = cli.grid_n {
        overrides.push(("n_points", n.to_string()));
    }
    if let Some(path) = &cli.output {
        overrides.push(("output_path", path.display().to_string()));
    }
    parse_config(&apply_overrides(&text, &overrides))
}

/// Replace (or append) `key=value` lines so flag overrides pass through the
/// same parser and validation as file keys.
fn apply_overrides(text: &str, overrides: &[(&str, String)]) -> String {
    let mut out = String::new();
    for line in text.lines() {
        let key = line
            .split('#')
            .next()
            .unwrap_or("")
            .split('=')
            .next()
            .map(str::trim)
            .unwrap_or("");
        if overrides.iter().any(|(k, _)| *k == key) {
            continue;
        }
        out.push_str(line);
        out.push('\n');
    }
    for (key, value) in overrides {
        out.push_str(&format!("{key}={value}\n"));
    }
    out
}

fn run_sweep(dir: &Path) -> bbmb::Result<bool> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|e| e == "cfg").unwrap_or(false))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(bbmb::Error::contract(format!(
            "no .cfg files found in {}",
            dir.display()
        )));
    }
    let mut items = Vec::new();
    for path in &files {
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let text = std::fs::read_to_string(path)?;
        match parse_config(&text) {
            Ok(mut spec) => {
                // keep per-experiment CSVs next to their configs unless the
                // config named a path explicitly
                let default_name = PathBuf::from(format!("{}.csv", spec.scenario.name()));
                if spec.output_path == default_name {
                    spec.output_path = dir.join(format!("{label}.csv"));
                }
                items.push(SweepItem::Valid {
                    label,
                    spec: Box::new(spec),
                });
            }
            Err(e) => items.push(SweepItem::Invalid {
                label,
                reason: e.to_string(),
            }),
        }
    }
    let index = dir.join("sweep_index.csv");
    let summary = harness::sweep(items, &index)?;
    for e in &summary.entries {
        let status = match e.passed {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "ERROR",
        };
        println!("{}: {status}", e.label);
    }
    println!("index -> {}", index.display());
    Ok(summary.all_passed())
}
