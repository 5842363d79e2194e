//! Command implementations behind the `helmsweep` binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::{Mode, RunConfig};
use crate::error::{Error, Result};
use crate::field::Field2D;
use crate::medium::dirichlet_profile;
use crate::pade::{Exponent, PadeCoefficients, PadeProvider};
use crate::par::Exec;
use crate::render::{render, RenderMode};
use crate::residual::{relative_residual, ResidualReport};
use crate::study::{run_study, StudyGrid, StudyResult};
use crate::sweep::Sweeper;

pub const CONFIG_ECHO: &str = "config.ini";

/// Coefficient dump for one exponent, rotated by `theta_deg`.
pub fn cmd_pade(gamma: f64, order: usize, theta_deg: f64, provider: PadeProvider) -> Result<String> {
    let exponent = Exponent::from_value(gamma)?;
    let base = match provider {
        PadeProvider::Classical => PadeCoefficients::generate_classical(exponent, order)?,
        PadeProvider::Table => PadeCoefficients::load_table(exponent, order)?,
    };
    if !(0.0..=90.0).contains(&theta_deg) {
        return Err(Error::InvalidArgument(format!("theta_deg must lie in [0, 90], got {theta_deg}")));
    }
    Ok(base.rotate(theta_deg.to_radians())?.to_csv())
}

#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub files: Vec<PathBuf>,
    pub one_way: ResidualReport,
    pub two_way: Option<ResidualReport>,
}

fn echo_config(cfg: &RunConfig, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(CONFIG_ECHO);
    fs::write(&path, cfg.to_string())?;
    Ok(path)
}

fn labelled(mut report: ResidualReport, cfg: &RunConfig) -> ResidualReport {
    report.pade_order = cfg.pade_terms;
    report.theta_deg = cfg.theta_deg;
    report
}

/// Solve one configuration and write `u_one.cfld` (and `u_two.cfld`),
/// `residual.csv` and the echoed config into `cfg.output_dir`. With
/// `write_csv` the fields and the medium are also dumped as CSV.
pub fn cmd_solve(cfg: &RunConfig, exec: Exec) -> Result<SolveOutput> {
    cfg.validate()?;
    let dir = cfg.output_dir.clone();
    let mut files = vec![echo_config(cfg, &dir)?];
    let medium = cfg.build_medium()?;
    let sweeper = Sweeper::new(&medium, cfg.omega, cfg.build_pade()?).with_exec(exec, Exec::Sequential);
    let boundary = dirichlet_profile(&medium.domain.ys(), cfg.omega);
    if cfg.write_csv {
        let path = dir.join("medium.csv");
        medium.write_csv(&path)?;
        files.push(path);
    }

    let mut outputs: Vec<(&str, Field2D)> = Vec::new();
    match cfg.mode {
        Mode::OneWay => outputs.push(("u_one", sweeper.one_way(&boundary)?.field)),
        Mode::TwoWay => {
            let sol = sweeper.two_way(&boundary)?;
            outputs.push(("u_one", sol.one_way));
            outputs.push(("u_two", sol.two_way));
        }
    }

    let mut reports = Vec::new();
    for (name, field) in &outputs {
        let path = dir.join(format!("{name}.cfld"));
        field.write(&path, cfg.omega)?;
        files.push(path);
        if cfg.write_csv {
            let path = dir.join(format!("{name}.csv"));
            field.write_csv(&path)?;
            files.push(path);
        }
        let report = relative_residual(&medium, &sweeper.slowness, cfg.omega, field, None, exec)?;
        reports.push(labelled(report, cfg));
    }

    let path = dir.join("residual.csv");
    let mut f = fs::File::create(&path)?;
    writeln!(f, "field,{}", ResidualReport::CSV_HEADER)?;
    for ((name, _), r) in outputs.iter().zip(&reports) {
        writeln!(f, "{name},{}", r.csv_row())?;
    }
    files.push(path);

    let mut reports = reports.into_iter();
    Ok(SolveOutput {
        files,
        one_way: reports.next().expect("one-way report"),
        two_way: reports.next(),
    })
}

/// Residual of a stored field against the medium described by `cfg`.
/// The frequency stored in the file takes precedence over `cfg.omega`.
pub fn cmd_residual(cfg: &RunConfig, field_path: &Path, exec: Exec) -> Result<ResidualReport> {
    let (field, omega) = Field2D::read(field_path)?;
    let mut cfg = cfg.clone();
    cfg.omega = omega;
    cfg.validate()?;
    let medium = cfg.build_medium()?;
    let (a, b) = (&medium.domain, &field.domain);
    let close = |p: f64, q: f64| (p - q).abs() <= 1e-12 * p.abs().max(q.abs()).max(1.0);
    if a.nx != b.nx || a.ny != b.ny || !close(a.dx, b.dx) || !close(a.dy, b.dy) || !close(a.x0, b.x0) || !close(a.y0, b.y0) {
        return Err(Error::Shape {
            expected: format!("{}x{} grid of the configured medium", a.nx, a.ny),
            got: format!("{}x{} grid in {}", b.nx, b.ny, field_path.display()),
        });
    }
    let report = relative_residual(&medium, &medium.slowness(), omega, &field, None, exec)?;
    Ok(labelled(report, &cfg))
}

/// Run the study and write `convergence.csv`, `table.csv`, per-cell CSVs
/// under `cells/` and the echoed base config into `out`.
pub fn cmd_convergence(base: &RunConfig, grid: &StudyGrid, jobs: usize, out: &Path, exec: Exec) -> Result<StudyResult> {
    let mut probe = base.clone();
    for &omega in &grid.omegas {
        for &m in &grid.orders {
            probe.omega = omega;
            probe.pade_terms = m;
            probe.validate()?;
        }
    }
    echo_config(base, out)?;
    let result = run_study(base, grid, jobs, exec, Some(&out.join("cells")))?;
    fs::write(out.join("convergence.csv"), result.reports_csv())?;
    fs::write(out.join("table.csv"), result.table_csv())?;
    Ok(result)
}

pub fn cmd_render(field_path: &Path, mode: RenderMode, out: &Path, exec: Exec) -> Result<()> {
    let (field, _) = Field2D::read(field_path)?;
    render(&field, mode, exec)?.write(out)
}

/// Comma-separated frequencies, each optionally with a `pi` suffix.
pub fn parse_omegas(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            crate::config::parse_real(t)
                .filter(|w| *w > 0.0)
                .ok_or_else(|| Error::InvalidArgument(format!("bad frequency `{}`", t.trim())))
        })
        .collect()
}

pub fn parse_orders(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad Padé order `{}`", t.trim())))
        })
        .collect()
}
