use std::path::PathBuf;
use std::process::ExitCode;

use capbound::verify::{self, Suite, DEFAULT_SEED};
use capbound_cli::sweep::{csv_string, render_svg, run_sweep, sibling};
use capbound_cli::{evaluate, parse_channel, parse_seed, Grid, Measure, Preset, Request, SweepConfig};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "capbound", version, about = "Semidefinite upper bounds on bipartite channel capacities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one bound for one channel and print it as JSON.
    Bound {
        /// Channel spec as inline JSON, or @path to a JSON file.
        #[arg(long)]
        channel: String,
        #[arg(long, value_enum, default_value = "c_beta")]
        measure: Measure,
        #[arg(long, default_value_t = capbound::bounds::DEFAULT_ELL)]
        ell: u32,
        /// Use the channel's symmetry group (upsilon_geo only).
        #[arg(long)]
        symmetric: bool,
        /// Report wall-clock time instead of 0.
        #[arg(long)]
        timing: bool,
    },
    /// Sweep a one-parameter channel family and write CSV.
    Sweep {
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        channel: Option<String>,
        /// start:stop:count
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        grid: Option<Grid>,
        #[arg(long, value_enum, default_value = "upsilon_geo", conflicts_with = "preset")]
        measure: Measure,
        #[arg(long, default_value_t = capbound::bounds::DEFAULT_ELL, conflicts_with = "preset")]
        ell: u32,
        #[arg(long, conflicts_with = "preset")]
        symmetric: bool,
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        /// CSV destination; stdout when absent (presets default to <name>.csv).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Accepted for uniformity; sweeps are deterministic.
        #[arg(long, value_parser = parse_seed)]
        seed: Option<u64>,
        #[arg(long)]
        timing: bool,
    },
    /// Run a property-check suite.
    Verify {
        /// linalg, channels, divergences, sdp, bounds, symmetry or all
        suite: Suite,
        #[arg(long, value_parser = parse_seed, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    // usage errors count as bad input
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Bound { channel, measure, ell, symmetric, timing } => {
            let family = match parse_channel(&channel) {
                Ok(f) => f,
                Err(e) => return fail(&e),
            };
            let mut r = match evaluate(&family, &Request { measure, ell, symmetric }) {
                Ok(r) => r,
                Err(e) => return fail(&e.to_string()),
            };
            if !timing {
                r.wall_ms = 0;
            }
            println!("{}", serde_json::to_string_pretty(&r).expect("serializable result"));
            if r.status.is_solved() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Command::Sweep { channel, grid, measure, ell, symmetric, preset, out, svg, seed: _, timing } => {
            let (cfg, title, out) = match preset {
                Some(p) => (p.config(), p.title().to_string(), Some(out.unwrap_or_else(|| format!("{}.csv", p.name()).into()))),
                None => {
                    let family = match parse_channel(channel.as_deref().expect("required by clap")) {
                        Ok(f) => f,
                        Err(e) => return fail(&e),
                    };
                    let title = family.describe();
                    let grid = grid.expect("required by clap");
                    (SweepConfig { channel: family, grid, request: Request { measure, ell, symmetric } }, title, out)
                }
            };
            let rows = match run_sweep(&cfg, timing) {
                Ok(r) => r,
                Err(e) => return fail(&e),
            };
            let extra = preset.and_then(|p| p.extra_series(&cfg.grid));
            let text = csv_string(&rows);
            match &out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &text) {
                        return fail(&format!("cannot write {}: {e}", path.display()));
                    }
                    if let Some(extra) = &extra {
                        let side = sibling(path, "holevo");
                        if let Err(e) = std::fs::write(&side, csv_string(extra)) {
                            return fail(&format!("cannot write {}: {e}", side.display()));
                        }
                    }
                }
                None => print!("{text}"),
            }
            if let Some(path) = svg {
                if let Err(e) = std::fs::write(&path, render_svg(&title, &rows, extra.as_deref())) {
                    return fail(&format!("cannot write {}: {e}", path.display()));
                }
            }
            let failed = rows.iter().filter(|r| !r.solved()).count();
            if failed > 0 {
                eprintln!("{failed} of {} grid points did not solve", rows.len());
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Command::Verify { suite, seed } => {
            let outcomes = verify::run(suite, seed);
            for o in &outcomes {
                println!("{o}");
            }
            if outcomes.iter().all(|o| o.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn fail(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::FAILURE
}
