//! `wsn`: run a simulated sensor-network scenario and write its metrics
//! report, compare two reports, or generate a traffic file.
//!
//! Exit status is 0 on success, 1 on invalid input and 2 when a run fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wsn_core::harness::{
    compare_runs, format_traffic, generate_traffic, parse_traffic, run_scenario, HarnessError,
    MetricsReport, Scenario, ScenarioError, TrafficPlan, DEFAULT_TRAFFIC_COUNT,
};
use wsn_core::kernel::NodeId;
use wsn_core::simnet::Topology;

#[derive(Parser)]
#[command(name = "wsn", version, about = "Sensor-network scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its report.
    Run(RunArgs),
    /// Compare two reports produced from the same traffic.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Write the comparison here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write random traffic for a topology.
    Traffic(TrafficArgs),
}

#[derive(clap::Args)]
struct TrafficArgs {
    #[arg(long)]
    topology: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TRAFFIC_COUNT)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Time of the first message, leaving room for routes to form.
    #[arg(long, default_value_t = 3000)]
    start: u64,
    #[arg(long, default_value_t = 25)]
    interval: u64,
    #[arg(long, default_value_t = 16)]
    len: usize,
    /// Send every message to this node.
    #[arg(long)]
    sink: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Topology file.
    #[arg(long)]
    topology: PathBuf,
    /// flood, tree, dsdv or dsr.
    #[arg(long)]
    algo: String,
    /// none, identity or xor.
    #[arg(long, default_value = "none")]
    crypto: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Simulated run length in milliseconds.
    #[arg(long)]
    duration: u64,
    /// Traffic file with `at_ms src dst payload_len` lines.
    #[arg(long)]
    traffic: PathBuf,
    /// Sink node for tree routing.
    #[arg(long)]
    sink: Option<u64>,
    /// Report file (JSON).
    #[arg(long)]
    out: PathBuf,
    /// Also write one CSV row per message.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Also write the full event trace.
    #[arg(long)]
    trace: Option<PathBuf>,
}

fn read(path: &Path, field: &'static str) -> Result<String, HarnessError> {
    fs::read_to_string(path)
        .map_err(|e| ScenarioError::new(field, format!("{}: {e}", path.display())).into())
}

fn write(path: &Path, text: &str) -> Result<(), HarnessError> {
    fs::write(path, text).map_err(|e| HarnessError::Runtime(format!("{}: {e}", path.display())))
}

fn load_topology(path: &Path) -> Result<Topology, HarnessError> {
    read(path, "topology")?
        .parse()
        .map_err(|e| ScenarioError::new("topology", format!("{e}")).into())
}

fn run(args: RunArgs) -> Result<(), HarnessError> {
    let topology = load_topology(&args.topology)?;
    let scenario = Scenario {
        topology_name: args.topology.display().to_string(),
        topology,
        algorithm: args.algo.parse()?,
        crypto: args.crypto.parse()?,
        seed: args.seed,
        duration_ms: args.duration,
        traffic: parse_traffic(&read(&args.traffic, "traffic")?)?,
        sink: args.sink.map(NodeId),
    };
    let output = run_scenario(&scenario)?;
    write(&args.out, &output.report.to_json())?;
    if let Some(csv) = &args.csv {
        write(csv, &output.report.messages_csv())?;
    }
    if let Some(trace) = &args.trace {
        write(trace, &output.trace.render())?;
    }
    let r = &output.report;
    println!(
        "{} delivered {}/{} (ratio {:.3}), {} radio transmissions",
        r.algorithm,
        r.delivered,
        r.sent,
        r.delivery_ratio,
        r.total_transmissions()
    );
    Ok(())
}

fn load_report(path: &Path) -> Result<MetricsReport, HarnessError> {
    MetricsReport::from_json(&read(path, "report")?)
        .map_err(|e| ScenarioError::new("report", format!("{}: {e}", path.display())).into())
}

fn compare(a: &Path, b: &Path, out: Option<&Path>) -> Result<(), HarnessError> {
    let comparison = compare_runs(&load_report(a)?, &load_report(b)?)?;
    let text = comparison.to_json();
    match out {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn traffic(args: TrafficArgs) -> Result<(), HarnessError> {
    let plan = TrafficPlan {
        count: args.count,
        start_ms: args.start,
        interval_ms: args.interval,
        payload_len: args.len,
        sink: args.sink.map(NodeId),
    };
    let items = generate_traffic(&load_topology(&args.topology)?, &plan, args.seed)?;
    write(&args.out, &format_traffic(&items))?;
    match items.last() {
        Some(last) => println!("{} messages, last at {} ms", items.len(), last.at_ms),
        None => println!("0 messages"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Compare { a, b, out } => compare(&a, &b, out.as_deref()),
        Command::Traffic(args) => traffic(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wsn: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
