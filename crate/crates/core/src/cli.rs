//! `civicroute` command line: simulate, compare policies, generate networks.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 runtime error.
//! Only the summary table goes to stdout; all data goes to files.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::registry::REGISTRY;
use crate::report::{comparison_csv, metrics_csv, segments_csv, RunSummary};
use crate::scenario::{build_grid, build_random_geometric, PolicySpec, Scenario};
use crate::sim::{run_policy, RunOutput};
use crate::spatial::Bounds;

pub const OUT_ENV: &str = "CIVICROUTE_DEFAULT_OUT";

#[derive(Debug, Parser)]
#[command(name = "civicroute", version, about = "Routing simulator for societal proxy metrics")]
pub struct Cli {
    /// Print the documented scenario defaults and exit.
    #[arg(long)]
    pub print_defaults: bool,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario under its own policy.
    Simulate(SimulateArgs),
    /// Run several policies on identical inputs and report deltas against a baseline.
    Compare(CompareArgs),
    /// Write a synthetic network file.
    GenerateNetwork(GenerateArgs),
    /// List the feature/metric taxonomy.
    Registry,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, env = OUT_ENV, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Comma-separated policy names (scenario `[policies]` or built-ins).
    #[arg(long, value_delimiter = ',', required = true)]
    pub policies: Vec<String>,
    #[arg(long)]
    pub baseline: String,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, env = OUT_ENV, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NetworkKind {
    Grid,
    Geometric,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: NetworkKind,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    #[arg(long, default_value_t = 100.0)]
    pub edge_length: f64,
    #[arg(long, default_value_t = 10.0)]
    pub edge_time: f64,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub radius: Option<f64>,
    /// min_x,min_y,max_x,max_y
    #[arg(long, value_delimiter = ',', num_args = 4, default_value = "0,0,1000,1000")]
    pub bounds: Vec<f64>,
    #[arg(long, default_value_t = crate::scenario::DEFAULT_SPEED_MPS)]
    pub speed: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{rendered}");
            } else {
                let _ = write!(stderr, "{rendered}");
            }
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_config() {
                1
            } else {
                2
            }
        }
    }
}

pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    if cli.print_defaults {
        for (key, value) in Scenario::defaults() {
            writeln!(stdout, "{key} = {value}").map_err(|e| Error::io("<stdout>", e))?;
        }
        return Ok(());
    }
    match cli.command {
        Some(Command::Simulate(args)) => cmd_simulate(&args, stdout),
        Some(Command::Compare(args)) => cmd_compare(&args, stdout),
        Some(Command::GenerateNetwork(args)) => cmd_generate_network(&args, stdout),
        Some(Command::Registry) => {
            let mut table = format!("{:<22} {:<15} {:<24} {}\n", "component", "stage", "feature", "metric");
            for e in &REGISTRY {
                table.push_str(&format!(
                    "{:<22} {:<15} {:<24} {}\n",
                    e.component.label(),
                    e.stage.label(),
                    e.feature,
                    e.metric.unwrap_or("-")
                ));
            }
            write!(stdout, "{table}").map_err(|e| Error::io("<stdout>", e))
        }
        None => Err(Error::Usage(
            "no command given; see `civicroute --help`".into(),
        )),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn scenario_hash(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::Config(format!("cannot read scenario file {}: {e}", path.display())))?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

fn run_meta(
    scenario: &Scenario,
    scenario_path: &Path,
    hash: &str,
    seed: u64,
    seed_overridden: bool,
    policy_name: &str,
    policy: &PolicySpec,
) -> String {
    let mut lines = vec![
        format!("civicroute_version = {}", env!("CARGO_PKG_VERSION")),
        format!("scenario = {}", scenario.name),
        format!("scenario_file = {}", scenario_path.display()),
        format!("scenario_sha256 = {hash}"),
        format!("seed = {seed}"),
        format!(
            "seed_source = {}",
            if seed_overridden { "command_line" } else { "scenario" }
        ),
        format!("epochs = {}", scenario.epochs),
        format!("policy = {policy_name}"),
        format!("policy.model = {}", policy.model().label()),
        format!("food.semantics = {}", scenario.food.semantics.label()),
        format!("food.threshold_k = {}", scenario.food.threshold_k),
        format!("eta_network_state = live_qualities_at_epoch_end"),
        format!("wear.epsilon = {}", scenario.wear.epsilon),
        format!("wear.quality_floor = {}", scenario.wear.quality_floor),
        format!("wear.wear_coefficient = {}", scenario.wear.wear_coefficient),
        format!("wear.repair_mode = immediate_reset"),
        format!("pollution.min_distance = {}", scenario.pollution.min_distance),
        format!("pollution.sample_spacing = {}", scenario.pollution.sample_spacing),
        format!("demand.origin = {}", scenario.demand.origin.label()),
        format!("demand.destination = {}", scenario.demand.destination.label()),
        format!("demand.p_good = {}", scenario.demand.p_good),
        format!("demand.trips_per_epoch = {}", scenario.demand.trips_per_epoch),
    ];
    lines.push(String::new());
    lines.join("\n")
}

fn write_run(dir: &Path, output: &RunOutput, meta: &str) -> Result<()> {
    create_dir(dir)?;
    write_file(&dir.join("metrics.csv"), &metrics_csv(&output.reports))?;
    write_file(&dir.join("segments.csv"), &segments_csv(&output.segments))?;
    write_file(&dir.join("run.meta"), meta)
}

fn summary_table(rows: &[(String, RunSummary)]) -> String {
    let mut out = format!(
        "{:<20} {:>10} {:>16} {:>14} {:>10}\n",
        "policy", "final_eta", "total_exposure", "mean_time_s", "repairs"
    );
    for (name, s) in rows {
        out.push_str(&format!(
            "{:<20} {:>10.4} {:>16.6e} {:>14.3} {:>10}\n",
            name, s.final_eta, s.total_pollution_exposure, s.mean_travel_time, s.repair_count
        ));
    }
    out
}

pub fn cmd_simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    let scenario = Scenario::load(&args.scenario)?;
    let hash = scenario_hash(&args.scenario)?;
    let seed = args.seed.unwrap_or(scenario.seed);
    let output = run_policy(&scenario, &scenario.policy, scenario.epochs, seed)?;
    let meta = run_meta(
        &scenario,
        &args.scenario,
        &hash,
        seed,
        args.seed.is_some(),
        "scenario",
        &scenario.policy,
    );
    write_run(&args.out, &output, &meta)?;
    let rows = vec![(
        scenario.policy.model().label().to_string(),
        RunSummary::from_reports(&output.reports),
    )];
    write!(stdout, "{}", summary_table(&rows)).map_err(|e| Error::io("<stdout>", e))
}

fn valid_policy_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

pub fn cmd_compare(args: &CompareArgs, stdout: &mut dyn Write) -> Result<()> {
    let names = &args.policies;
    if names.len() < 2 {
        return Err(Error::Usage("compare needs at least two policies".into()));
    }
    for (i, name) in names.iter().enumerate() {
        if !valid_policy_name(name) {
            return Err(Error::Usage(format!("invalid policy name `{name}`")));
        }
        if names[..i].contains(name) {
            return Err(Error::Usage(format!("policy `{name}` listed twice")));
        }
    }
    if !names.contains(&args.baseline) {
        return Err(Error::Usage(format!(
            "baseline `{}` is not among the listed policies",
            args.baseline
        )));
    }
    let scenario = Scenario::load(&args.scenario)?;
    let hash = scenario_hash(&args.scenario)?;
    let seed = args.seed.unwrap_or(scenario.seed);
    let policies = names
        .iter()
        .map(|n| scenario.policy_named(n))
        .collect::<Result<Vec<_>>>()?;

    let outputs = Execution::default().map(&policies, |p| {
        run_policy(&scenario, p, scenario.epochs, seed)
    });
    let mut rows = Vec::with_capacity(names.len());
    for ((name, policy), output) in names.iter().zip(&policies).zip(outputs) {
        let output = output?;
        let meta = run_meta(&scenario, &args.scenario, &hash, seed, args.seed.is_some(), name, policy);
        write_run(&args.out.join(name), &output, &meta)?;
        rows.push((name.clone(), RunSummary::from_reports(&output.reports)));
    }
    let csv = comparison_csv(&rows, &args.baseline)
        .ok_or_else(|| Error::Internal("baseline vanished".into()))?;
    write_file(&args.out.join("comparison.csv"), &csv)?;
    write!(stdout, "{}", summary_table(&rows)).map_err(|e| Error::io("<stdout>", e))
}

pub fn cmd_generate_network(args: &GenerateArgs, stdout: &mut dyn Write) -> Result<()> {
    let network = match args.kind {
        NetworkKind::Grid => {
            let (rows, cols) = args
                .rows
                .zip(args.cols)
                .ok_or_else(|| Error::Usage("grid needs --rows and --cols".into()))?;
            build_grid(rows, cols, args.edge_length, args.edge_time)?
        }
        NetworkKind::Geometric => {
            let (n, radius) = args
                .n
                .zip(args.radius)
                .ok_or_else(|| Error::Usage("geometric needs --n and --radius".into()))?;
            let b: [f64; 4] = args
                .bounds
                .as_slice()
                .try_into()
                .map_err(|_| Error::Usage("--bounds takes four numbers".into()))?;
            build_random_geometric(n, radius, &Bounds::from(b), args.speed, args.seed)?
        }
    };
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    network.save(&args.out)?;
    writeln!(
        stdout,
        "{} nodes, {} segments -> {}",
        network.node_count(),
        network.segment_count(),
        args.out.display()
    )
    .map_err(|e| Error::io("<stdout>", e))
}
