use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use helmsweep::cli;
use helmsweep::config::{Mode, RunConfig};
use helmsweep::render::RenderMode;
use helmsweep::study::StudyGrid;
use helmsweep::{Error, Exec, PadeProvider, Result};

#[derive(Parser)]
#[command(name = "helmsweep", version, about = "Helmholtz solves by one-way sweeps with a two-way correction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print rotated Padé coefficients as CSV.
    Pade {
        /// Exponent: 0.5, -0.5, 0.25 or -0.25.
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 45.0)]
        theta_deg: f64,
        #[arg(long, default_value = "classical")]
        provider: String,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve one configuration and write fields plus residuals.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the output directory of the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the mode of the config (one-way or two-way).
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        sequential: bool,
    },
    /// Residual of a stored field against the configured medium.
    Residual {
        field: PathBuf,
        #[arg(long)]
        config: PathBuf,
    },
    /// Residual table over frequencies and Padé orders.
    Convergence {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated, e.g. `20pi,40pi,80pi,160pi`.
        #[arg(long)]
        omegas: Option<String>,
        /// Comma-separated, e.g. `3,4,5,6`.
        #[arg(long)]
        orders: Option<String>,
        /// Concurrent cells; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Render a stored field as a grayscale PGM image.
    Render {
        field: PathBuf,
        #[arg(long, default_value = "real")]
        mode: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<()> {
    let exec = Exec::default();
    match cli.command {
        Command::Pade { gamma, order, theta_deg, provider, out } => {
            let provider = PadeProvider::parse(&provider)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown provider `{provider}`")))?;
            let csv = cli::cmd_pade(gamma, order, theta_deg, provider)?;
            match out {
                Some(path) => std::fs::write(path, csv)?,
                None => print!("{csv}"),
            }
        }
        Command::Solve { config, out, mode, sequential } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(out) = out {
                cfg.output_dir = out;
            }
            if let Some(mode) = mode {
                cfg.mode = Mode::parse(&mode).ok_or_else(|| Error::InvalidArgument(format!("unknown mode `{mode}`")))?;
            }
            let exec = if sequential { Exec::Sequential } else { exec };
            let res = cli::cmd_solve(&cfg, exec)?;
            println!("u_one residual {:.4}%", res.one_way.percent());
            if let Some(r) = res.two_way {
                println!("u_two residual {:.4}%", r.percent());
            }
            for f in res.files {
                println!("wrote {}", f.display());
            }
        }
        Command::Residual { field, config } => {
            let cfg = RunConfig::load(&config)?;
            let r = cli::cmd_residual(&cfg, &field, exec)?;
            println!("{}", helmsweep::residual::ResidualReport::CSV_HEADER);
            println!("{}", r.csv_row());
        }
        Command::Convergence { config, out, omegas, orders, jobs } => {
            let cfg = RunConfig::load(&config)?;
            let mut grid = StudyGrid::default();
            if let Some(s) = omegas {
                grid.omegas = cli::parse_omegas(&s)?;
            }
            if let Some(s) = orders {
                grid.orders = cli::parse_orders(&s)?;
            }
            let result = cli::cmd_convergence(&cfg, &grid, jobs, &out, exec)?;
            print!("{}", result.table_csv());
        }
        Command::Render { field, mode, out } => {
            let mode = RenderMode::parse(&mode).ok_or_else(|| Error::InvalidArgument(format!("unknown render mode `{mode}`")))?;
            cli::cmd_render(&field, mode, &out, exec)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
