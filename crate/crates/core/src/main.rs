use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use resilient_sdn::experiments::{replay, run_monte_carlo, simulate_scenario, ExperimentConfig, Scheme, SpliceMode};
use resilient_sdn::failure::RegionalFailure;
use resilient_sdn::mrc::{emit_backup_topologies, generate_backup_topologies, parse_backup_topologies, verify_mrc_constraints};
use resilient_sdn::topology::{emit_topology, generate_random_planar, load_topology, DeploymentArea};
use resilient_sdn::Point;

#[derive(Parser)]
#[command(name = "resilient-sdn", version, about = "Regional-failure recovery for SDN: topologies, backups, simulation and sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random connected planar topology.
    GenTopo {
        #[arg(long, default_value_t = 50)]
        nodes: usize,
        #[arg(long, default_value_t = 120)]
        links: usize,
        #[arg(long, default_value_t = 1200.0)]
        width: f64,
        #[arg(long, default_value_t = 1200.0)]
        height: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate k backup topologies for a topology file.
    GenBackups {
        #[arg(long)]
        topology: PathBuf,
        #[arg(short, long)]
        k: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Simulate one failure and print flow and splice logs.
    Simulate {
        #[arg(long)]
        topology: PathBuf,
        /// Backup topology file; generated from --k when absent.
        #[arg(long)]
        backups: Option<PathBuf>,
        #[arg(short, long, default_value_t = 6)]
        k: usize,
        #[arg(long, default_value = "SDN-FRRD")]
        scheme: Scheme,
        /// Failure as `x,y,radius`.
        #[arg(long, value_parser = parse_failure)]
        failure: RegionalFailure,
        #[arg(long, default_value_t = 50.0)]
        r_a: f64,
        #[arg(long, default_value_t = 150.0)]
        r_b: f64,
        /// Use hop-count splicing instead of load-aware splicing.
        #[arg(long)]
        shortest_splice: bool,
    },
    /// Run a Monte Carlo sweep and write CSV plus the failure log.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        failure_log: Option<PathBuf>,
    },
    /// Re-run a sweep from a recorded failure log.
    Replay {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        failure_log: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn parse_failure(s: &str) -> Result<RegionalFailure, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    match v.as_slice() {
        [x, y, r] => RegionalFailure::new(Point::new(*x, *y), *r).map_err(|e| e.to_string()),
        _ => Err("expected x,y,radius".into()),
    }
}

fn write_out(path: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::GenTopo { nodes, links, width, height, seed, output } => {
            let g = generate_random_planar(nodes, links, DeploymentArea::new(width, height)?, seed)?;
            write_out(output.as_ref(), &emit_topology(&g))?;
        }
        Command::GenBackups { topology, k, output } => {
            let g = Arc::new(load_topology(fs::File::open(topology)?)?);
            let bts = generate_backup_topologies(g, k)?;
            write_out(output.as_ref(), &emit_backup_topologies(&bts))?;
        }
        Command::Simulate { topology, backups, k, scheme, failure, r_a, r_b, shortest_splice } => {
            let g = Arc::new(load_topology(fs::File::open(topology)?)?);
            let bts = match backups {
                Some(p) => {
                    let bts = parse_backup_topologies(g, &fs::read_to_string(p)?)?;
                    if let Some(v) = verify_mrc_constraints(&bts).first() {
                        return Err(format!("backup topologies violate {v}").into());
                    }
                    bts
                }
                None => generate_backup_topologies(g, k)?,
            };
            let mode = if shortest_splice { SpliceMode::Shortest } else { SpliceMode::LoadAware };
            let (sg, res) = simulate_scenario(&bts, scheme, &failure, r_a, r_b, mode)?;
            print!("{}", res.log());
            let c = &res.counts;
            println!(
                "# destroyed nodes {} links {}; recoverable {} requests {} local {} escalated {} spliced {} unspliceable {} ml {}",
                sg.destroyed_nodes().len(),
                sg.destroyed_links().len(),
                c.recoverable,
                c.requests(),
                c.locally_recovered,
                c.escalated,
                c.spliced_ok,
                c.unspliceable,
                res.ml
            );
        }
        Command::Experiment { config, csv, failure_log } => {
            let cfg = ExperimentConfig::parse(&fs::read_to_string(config)?)?;
            let report = run_monte_carlo(&cfg)?;
            write_out(csv.as_ref(), &report.to_csv())?;
            if let Some(p) = failure_log {
                fs::write(p, report.failure_log())?;
            }
        }
        Command::Replay { config, failure_log, csv } => {
            let cfg = ExperimentConfig::parse(&fs::read_to_string(config)?)?;
            let report = replay(&cfg, &fs::read_to_string(failure_log)?)?;
            write_out(csv.as_ref(), &report.to_csv())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
