//! Residual convergence study over a grid of frequencies and Padé orders.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::medium::dirichlet_profile;
use crate::par::{with_jobs, Exec};
use crate::residual::{observed_order, relative_residual, ResidualReport};
use crate::sweep::Sweeper;

/// Frequency multiples of π used when none are given.
pub const DEFAULT_OMEGA_MULTIPLES: [f64; 4] = [20.0, 40.0, 80.0, 160.0];
pub const DEFAULT_ORDERS: [usize; 4] = [3, 4, 5, 6];

#[derive(Debug, Clone, PartialEq)]
pub struct StudyGrid {
    pub omegas: Vec<f64>,
    pub orders: Vec<usize>,
}

impl Default for StudyGrid {
    fn default() -> Self {
        Self {
            omegas: DEFAULT_OMEGA_MULTIPLES.iter().map(|m| m * std::f64::consts::PI).collect(),
            orders: DEFAULT_ORDERS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult {
    pub grid: StudyGrid,
    /// `cells[r][c]`: order `orders[r]`, frequency `omegas[c]`.
    pub cells: Vec<Vec<ResidualReport>>,
    /// One slope per order; `None` with fewer than two frequencies.
    pub row_orders: Vec<Option<f64>>,
    /// Slope along `(orders[k], omegas[k])`; `None` with fewer than two pairs.
    pub diagonal_order: Option<f64>,
}

/// Two-way solve plus residual of `u_two` for one configuration.
pub fn run_cell(cfg: &RunConfig, exec: Exec) -> Result<ResidualReport> {
    cfg.validate()?;
    let medium = cfg.build_medium()?;
    let pade = cfg.build_pade()?;
    let sweeper = Sweeper::new(&medium, cfg.omega, pade).with_exec(exec, Exec::Sequential);
    let boundary = dirichlet_profile(&medium.domain.ys(), cfg.omega);
    let solution = sweeper.two_way(&boundary)?;
    let mut report = relative_residual(&medium, &sweeper.slowness, cfg.omega, &solution.two_way, None, exec)?;
    report.pade_order = cfg.pade_terms;
    report.theta_deg = cfg.theta_deg;
    Ok(report)
}

fn slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    observed_order(points).ok()
}

/// Run every cell of `grid` with settings taken from `base`.
///
/// Cells run concurrently on at most `jobs` workers (`0` = all cores). When
/// `cell_dir` is given each finished cell is written there immediately as a
/// one-row CSV.
pub fn run_study(
    base: &RunConfig,
    grid: &StudyGrid,
    jobs: usize,
    exec: Exec,
    cell_dir: Option<&Path>,
) -> Result<StudyResult> {
    if grid.omegas.is_empty() || grid.orders.is_empty() {
        return Err(Error::InvalidArgument("study grid needs at least one frequency and one order".into()));
    }
    if let Some(dir) = cell_dir {
        fs::create_dir_all(dir)?;
    }
    let cols = grid.omegas.len();
    let n = grid.orders.len() * cols;
    let cells = with_jobs(jobs, || {
        exec.try_map_range(n, |k| {
            let mut cfg = base.clone();
            cfg.pade_terms = grid.orders[k / cols];
            cfg.omega = grid.omegas[k % cols];
            let report = run_cell(&cfg, exec)?;
            if let Some(dir) = cell_dir {
                let path = dir.join(format!("cell_M{}_w{:.6}.csv", cfg.pade_terms, cfg.omega));
                let mut f = fs::File::create(path)?;
                writeln!(f, "{}", ResidualReport::CSV_HEADER)?;
                writeln!(f, "{}", report.csv_row())?;
            }
            Ok::<_, Error>(report)
        })
    })?;

    let cells: Vec<Vec<ResidualReport>> = cells.chunks(cols).map(|c| c.to_vec()).collect();
    let row_orders: Vec<Option<f64>> = cells
        .iter()
        .map(|row| slope(&row.iter().map(|r| (r.omega, r.relative_residual)).collect::<Vec<_>>()))
        .collect();
    let diag: Vec<(f64, f64)> = (0..cells.len().min(cols))
        .map(|k| (cells[k][k].omega, cells[k][k].relative_residual))
        .collect();
    let mut cells = cells;
    for (row, order) in cells.iter_mut().zip(&row_orders) {
        for r in row.iter_mut() {
            r.observed_order = *order;
        }
    }
    Ok(StudyResult {
        grid: grid.clone(),
        cells,
        row_orders,
        diagonal_order: slope(&diag),
    })
}

impl StudyResult {
    /// Every cell as a [`ResidualReport`] CSV row, row-major.
    pub fn reports_csv(&self) -> String {
        let mut s = String::from(ResidualReport::CSV_HEADER);
        s.push('\n');
        for r in self.cells.iter().flatten() {
            s.push_str(&r.csv_row());
            s.push('\n');
        }
        s
    }

    /// Residual matrix in percent with the observed order per row and the
    /// diagonal order as a final line.
    pub fn table_csv(&self) -> String {
        let fmt_order = |o: Option<f64>| o.map(|v| format!("{v:.4}")).unwrap_or_default();
        let mut s = String::from("M");
        for w in &self.grid.omegas {
            s.push_str(&format!(",omega={w:.6}"));
        }
        s.push_str(",observed_order\n");
        for ((m, row), order) in self.grid.orders.iter().zip(&self.cells).zip(&self.row_orders) {
            s.push_str(&m.to_string());
            for r in row {
                s.push_str(&format!(",{:.6}", r.percent()));
            }
            s.push_str(&format!(",{}\n", fmt_order(*order)));
        }
        s.push_str(&format!("diagonal{},{}\n", ",".repeat(self.grid.omegas.len()), fmt_order(self.diagonal_order)));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::MediumKind;
    use std::f64::consts::PI;

    fn tiny() -> RunConfig {
        let mut cfg = RunConfig::with_omega(4.0 * PI);
        cfg.medium = MediumKind::Homogeneous;
        cfg.ppw_x = 8;
        cfg.ppw_y = 6;
        cfg
    }

    #[test]
    fn grid_shape_and_orders() {
        let grid = StudyGrid { omegas: vec![4.0 * PI, 8.0 * PI], orders: vec![2, 3] };
        let res = run_study(&tiny(), &grid, 2, Exec::Parallel, None).unwrap();
        assert_eq!(res.cells.len(), 2);
        assert!(res.cells.iter().all(|r| r.len() == 2));
        assert_eq!(res.cells[1][0].pade_order, 3);
        assert_eq!(res.cells[1][1].omega, 8.0 * PI);
        assert!(res.row_orders.iter().all(|o| o.is_some()));
        assert!(res.diagonal_order.is_some());
        let table = res.table_csv();
        assert_eq!(table.lines().count(), 4);
        assert!(table.lines().last().unwrap().starts_with("diagonal,,,"));
    }

    #[test]
    fn single_point_has_no_orders() {
        let grid = StudyGrid { omegas: vec![4.0 * PI], orders: vec![2] };
        let res = run_study(&tiny(), &grid, 1, Exec::Sequential, None).unwrap();
        assert_eq!(res.row_orders, vec![None]);
        assert_eq!(res.diagonal_order, None);
        assert!(res.table_csv().lines().nth(1).unwrap().ends_with(','));
    }

    #[test]
    fn reruns_are_bitwise_identical_across_policies() {
        let grid = StudyGrid { omegas: vec![4.0 * PI, 6.0 * PI], orders: vec![2] };
        let a = run_study(&tiny(), &grid, 1, Exec::Sequential, None).unwrap();
        let b = run_study(&tiny(), &grid, 3, Exec::Parallel, None).unwrap();
        assert_eq!(a.reports_csv(), b.reports_csv());
        assert_eq!(a, b);
    }
}
