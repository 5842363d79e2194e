//! Computational grid, material fields and boundary data.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Background wavespeed used to size the grid.
pub const C0: f64 = 1.0;
/// Side length of the square test domain.
pub const SIDE: f64 = 1.0;

/// Node-centred Cartesian grid. Node `(i, j)` sits at `(x0 + i dx, y0 + j dy)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec {
    pub x0: f64,
    pub y0: f64,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
}

impl DomainSpec {
    /// `[-lx/2, lx/2] x [-ly/2, ly/2]` sampled with `nx x ny` nodes including both ends.
    pub fn centered(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 3x3 nodes, got {nx}x{ny}"
            )));
        }
        if !(lx > 0.0 && ly > 0.0) {
            return Err(Error::InvalidArgument("domain lengths must be positive".into()));
        }
        Ok(Self {
            x0: -lx / 2.0,
            y0: -ly / 2.0,
            nx,
            ny,
            dx: lx / (nx - 1) as f64,
            dy: ly / (ny - 1) as f64,
        })
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.dy
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny).map(|j| self.y(j)).collect()
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    /// Marching length `x_{nx-1} - x_0`.
    pub fn length_x(&self) -> f64 {
        (self.nx - 1) as f64 * self.dx
    }
}

/// Number of nodes resolving `ppw` points per background wavelength over `length`.
pub fn nodes_for(omega: f64, ppw: usize, length: f64) -> usize {
    let wavelengths = length * omega / (2.0 * PI * C0);
    // the tolerance absorbs rounding in products like 36 * (120π / 2π)
    (ppw as f64 * wavelengths - 1e-9).ceil().max(2.0) as usize + 1
}

#[derive(Debug, Clone, PartialEq)]
pub struct Medium {
    pub domain: DomainSpec,
    pub c: Vec<f64>,
    pub a_damp: Vec<f64>,
    pub a_frac: Vec<f64>,
    pub alpha: f64,
    pub beta: Vec<f64>,
}

/// Smoothed Heaviside step `1 / (1 + e^{-800 s})`.
pub fn smooth_step(s: f64) -> f64 {
    1.0 / (1.0 + (-800.0 * s).exp())
}

/// Wavespeed with the circular inclusion: `1 + H(0.1 - r)`.
pub fn inclusion_speed(x: f64, y: f64) -> f64 {
    1.0 + smooth_step(0.1 - x.hypot(y))
}

/// Sponge strength: `0.2 (|y| - 0.3)` beyond `|y| = 0.3`, zero inside.
pub fn sponge(y: f64) -> f64 {
    if y.abs() > 0.3 {
        0.2 * (y.abs() - 0.3)
    } else {
        0.0
    }
}

/// Uniform attenuation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Attenuation {
    pub a_damp: f64,
    pub a_frac: f64,
    pub alpha: f64,
}

impl Default for Attenuation {
    fn default() -> Self {
        Self {
            a_damp: 0.01,
            a_frac: 10.0,
            alpha: 0.5,
        }
    }
}

impl Attenuation {
    pub fn none() -> Self {
        Self {
            a_damp: 0.0,
            a_frac: 0.0,
            alpha: 0.5,
        }
    }
}

impl Medium {
    /// Sample `speed` and `beta` on the grid with uniform attenuation.
    pub fn from_fn(
        domain: DomainSpec,
        attenuation: Attenuation,
        speed: impl Fn(f64, f64) -> f64,
        beta: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let Attenuation { a_damp, a_frac, alpha } = attenuation;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if a_damp < 0.0 || a_frac < 0.0 {
            return Err(Error::InvalidArgument("attenuation coefficients must be >= 0".into()));
        }
        let n = domain.len();
        let mut c = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for i in 0..domain.nx {
            let x = domain.x(i);
            for j in 0..domain.ny {
                let y = domain.y(j);
                let cv = speed(x, y);
                let bv = beta(x, y);
                if !(cv > 0.0) || !(bv >= 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "invalid medium at ({x}, {y}): c = {cv}, beta = {bv}"
                    )));
                }
                c.push(cv);
                b.push(bv);
            }
        }
        Ok(Self {
            domain,
            c,
            a_damp: vec![a_damp; n],
            a_frac: vec![a_frac; n],
            alpha,
            beta: b,
        })
    }

    /// The inclusion experiment on the unit square with the top/bottom sponge.
    pub fn inclusion(omega: f64, ppw_x: usize, ppw_y: usize, attenuation: Attenuation) -> Result<Self> {
        let domain = unit_domain(omega, ppw_x, ppw_y)?;
        Self::from_fn(domain, attenuation, inclusion_speed, |_, y| sponge(y))
    }

    /// Same grid and sponge as [`Medium::inclusion`] with `c = 1` everywhere.
    pub fn homogeneous(
        omega: f64,
        ppw_x: usize,
        ppw_y: usize,
        attenuation: Attenuation,
    ) -> Result<Self> {
        let domain = unit_domain(omega, ppw_x, ppw_y)?;
        Self::from_fn(domain, attenuation, |_, _| 1.0, |_, y| sponge(y))
    }

    /// CSV with header `x,y,c,beta`, one row per node.
    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        use std::io::Write;
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "x,y,c,beta")?;
        let d = &self.domain;
        for i in 0..d.nx {
            for j in 0..d.ny {
                let k = d.index(i, j);
                writeln!(w, "{},{},{},{}", d.x(i), d.y(j), self.c[k], self.beta[k])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn c_min(&self) -> f64 {
        self.c.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Complex slowness `(1 + iβ) / (c sqrt(1 + β²))`.
    pub fn slowness(&self) -> ComplexSlowness {
        ComplexSlowness {
            s: self
                .c
                .iter()
                .zip(&self.beta)
                .map(|(&c, &b)| slowness_at(c, b))
                .collect(),
        }
    }
}

fn unit_domain(omega: f64, ppw_x: usize, ppw_y: usize) -> Result<DomainSpec> {
    if !(omega > 0.0) {
        return Err(Error::InvalidArgument(format!("omega must be positive, got {omega}")));
    }
    if ppw_x < 4 || ppw_y < 4 {
        return Err(Error::InvalidArgument("points per wavelength must be at least 4".into()));
    }
    DomainSpec::centered(
        SIDE,
        SIDE,
        nodes_for(omega, ppw_x, SIDE),
        nodes_for(omega, ppw_y, SIDE),
    )
}

pub fn slowness_at(c: f64, beta: f64) -> Complex64 {
    if beta == 0.0 {
        Complex64::new(1.0 / c, 0.0)
    } else {
        Complex64::new(1.0, beta) / (c * (1.0 + beta * beta).sqrt())
    }
}

/// Pointwise complex slowness; the sponge-modified wavenumber is `ω s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSlowness {
    pub s: Vec<Complex64>,
}

/// Left-boundary Dirichlet profile `e^{-i ω L / (2 c0)} e^{-200 y²}`.
pub fn dirichlet_profile(ys: &[f64], omega: f64) -> Vec<Complex64> {
    let phase = Complex64::from_polar(1.0, -omega / C0 * SIDE / 2.0);
    ys.iter().map(|&y| phase * (-200.0 * y * y).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusion_and_background_speeds() {
        assert!((inclusion_speed(0.0, 0.0) - 2.0).abs() < 1e-6);
        assert!((inclusion_speed(0.4, 0.4) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn grid_counts_follow_points_per_wavelength() {
        let m = Medium::inclusion(120.0 * PI, 36, 12, Attenuation::default()).unwrap();
        assert_eq!(m.domain.nx - 1, 2160);
        assert_eq!(m.domain.ny - 1, 720);
        assert!((m.domain.x(m.domain.nx - 1) - 0.5).abs() < 1e-12);
        assert_eq!(nodes_for(160.0 * PI, 36, 1.0), 2881);
        assert_eq!(nodes_for(160.0 * PI, 12, 1.0), 961);
    }

    #[test]
    fn sponge_profile() {
        assert!((sponge(0.4) - 0.02).abs() < 1e-15);
        assert_eq!(sponge(0.3), 0.0);
        assert_eq!(sponge(-0.45), sponge(0.45));
        let m = Medium::inclusion(20.0 * PI, 36, 12, Attenuation::default()).unwrap();
        let d = m.domain;
        for i in [0, d.nx / 2, d.nx - 1] {
            for j in 0..d.ny {
                assert_eq!(m.beta[d.index(i, j)], m.beta[d.index(0, j)]);
                assert!((m.beta[d.index(i, j)] - m.beta[d.index(i, d.ny - 1 - j)]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn slowness_examples() {
        assert_eq!(slowness_at(1.0, 0.0), Complex64::new(1.0, 0.0));
        assert_eq!(slowness_at(2.0, 0.0), Complex64::new(0.5, 0.0));
        let s = slowness_at(1.0, 0.02);
        assert!((s.re - 0.99980).abs() < 1e-5);
        assert!((s.im - 0.019996).abs() < 1e-6);
        let m = Medium::inclusion(20.0 * PI, 36, 12, Attenuation::default()).unwrap();
        let sl = m.slowness();
        for ((s, &c), &b) in sl.s.iter().zip(&m.c).zip(&m.beta) {
            assert!(s.re > 0.0 && s.im >= 0.0);
            if b == 0.0 {
                assert_eq!(*s, Complex64::new(1.0 / c, 0.0));
            }
        }
    }

    #[test]
    fn speed_is_resolved_at_the_finest_grid() {
        // |∇c| <= 800/4 for the logistic step
        let m = Medium::inclusion(160.0 * PI, 36, 12, Attenuation::default()).unwrap();
        let d = m.domain;
        let bound = 200.0 * d.dx * 1.0001;
        let mut worst: f64 = 0.0;
        for i in 0..d.nx - 1 {
            for j in 0..d.ny {
                worst = worst.max((m.c[d.index(i + 1, j)] - m.c[d.index(i, j)]).abs());
            }
        }
        assert!(worst <= bound, "{worst} > {bound}");
    }

    #[test]
    fn boundary_profile() {
        let u = dirichlet_profile(&[0.0, 0.5, -0.2, 0.2], 2.0 * PI);
        assert!((u[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((u[1].norm() - (-50.0f64).exp()).abs() < 1e-30);
        assert_eq!(u[2], u[3]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Medium::inclusion(-1.0, 36, 12, Attenuation::default()).is_err());
        assert!(Medium::inclusion(10.0, 3, 12, Attenuation::default()).is_err());
        let bad = Attenuation { alpha: 1.0, ..Attenuation::default() };
        assert!(Medium::inclusion(10.0, 36, 12, bad).is_err());
    }
}
