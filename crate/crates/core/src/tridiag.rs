//! Complex tridiagonal systems: Thomas elimination and its cyclic extension.

use num_complex::Complex64;

use crate::error::{Error, Result};

const PIVOT_FLOOR: f64 = 1e-300;

/// `sub[j]` couples row `j + 1` to column `j`; `sup[j]` couples row `j` to column `j + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub sub: Vec<Complex64>,
    pub diag: Vec<Complex64>,
    pub sup: Vec<Complex64>,
}

impl TridiagonalSystem {
    pub fn new(sub: Vec<Complex64>, diag: Vec<Complex64>, sup: Vec<Complex64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 || sub.len() + 1 != n || sup.len() + 1 != n {
            return Err(Error::Shape {
                expected: format!("diagonals of length ({}, {n}, {})", n.saturating_sub(1), n.saturating_sub(1)),
                got: format!("({}, {n}, {})", sub.len(), sup.len()),
            });
        }
        Ok(Self { sub, diag, sup })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.len();
        (0..n)
            .map(|j| {
                let mut v = self.diag[j] * x[j];
                if j > 0 {
                    v += self.sub[j - 1] * x[j - 1];
                }
                if j + 1 < n {
                    v += self.sup[j] * x[j + 1];
                }
                v
            })
            .collect()
    }

    pub fn factor(&self) -> Result<ThomasFactors> {
        let n = self.len();
        let mut inv_pivot = Vec::with_capacity(n);
        let mut upper = Vec::with_capacity(n.saturating_sub(1));
        let mut pivot = self.diag[0];
        for j in 0..n {
            if j > 0 {
                pivot = self.diag[j] - self.sub[j - 1] * upper[j - 1];
            }
            if !(pivot.norm() > PIVOT_FLOOR) || !pivot.is_finite() {
                return Err(Error::ZeroPivot { row: j });
            }
            let inv = pivot.inv();
            inv_pivot.push(inv);
            if j + 1 < n {
                upper.push(self.sup[j] * inv);
            }
        }
        Ok(ThomasFactors {
            sub: self.sub.clone(),
            inv_pivot,
            upper,
        })
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        let f = self.factor()?;
        let mut x = rhs.to_vec();
        f.solve_in_place(&mut x);
        Ok(x)
    }
}

/// LU factors of a tridiagonal matrix (no pivoting).
#[derive(Debug, Clone)]
pub struct ThomasFactors {
    sub: Vec<Complex64>,
    inv_pivot: Vec<Complex64>,
    upper: Vec<Complex64>,
}

impl ThomasFactors {
    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    pub fn solve_in_place(&self, x: &mut [Complex64]) {
        let n = self.len();
        x[0] *= self.inv_pivot[0];
        for j in 1..n {
            x[j] = (x[j] - self.sub[j - 1] * x[j - 1]) * self.inv_pivot[j];
        }
        for j in (0..n - 1).rev() {
            x[j] -= self.upper[j] * x[j + 1];
        }
    }
}

/// Tridiagonal matrix plus the two corner entries of a periodic stencil:
/// `corner_low` at `(n-1, 0)` and `corner_high` at `(0, n-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicSystem {
    pub band: TridiagonalSystem,
    pub corner_low: Complex64,
    pub corner_high: Complex64,
}

impl CyclicSystem {
    pub fn mul(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.band.len();
        let mut y = self.band.mul(x);
        y[n - 1] += self.corner_low * x[0];
        y[0] += self.corner_high * x[n - 1];
        y
    }

    /// Sherman–Morrison factorization around the band part.
    pub fn factor(&self) -> Result<CyclicFactors> {
        let n = self.band.len();
        if n < 3 {
            return Err(Error::InvalidArgument("cyclic systems need at least 3 rows".into()));
        }
        let gamma = -self.band.diag[0];
        let mut modified = self.band.clone();
        modified.diag[0] -= gamma;
        modified.diag[n - 1] -= self.corner_low * self.corner_high / gamma;
        let lu = modified.factor()?;
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        z[0] = gamma;
        z[n - 1] = self.corner_low;
        lu.solve_in_place(&mut z);
        let v_last = self.corner_high / gamma;
        let denom = Complex64::new(1.0, 0.0) + z[0] + v_last * z[n - 1];
        if !(denom.norm() > PIVOT_FLOOR) {
            return Err(Error::ZeroPivot { row: n - 1 });
        }
        Ok(CyclicFactors {
            lu,
            z,
            v_last,
            inv_denom: denom.inv(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct CyclicFactors {
    lu: ThomasFactors,
    z: Vec<Complex64>,
    v_last: Complex64,
    inv_denom: Complex64,
}

impl CyclicFactors {
    pub fn solve_in_place(&self, x: &mut [Complex64]) {
        self.lu.solve_in_place(x);
        let n = x.len();
        let t = (x[0] + self.v_last * x[n - 1]) * self.inv_denom;
        for (xi, zi) in x.iter_mut().zip(&self.z) {
            *xi -= t * zi;
        }
    }
}

/// Either factorization, so banks can hold wall-closed and periodic operators alike.
#[derive(Debug, Clone)]
pub enum Factorization {
    Band(ThomasFactors),
    Cyclic(CyclicFactors),
}

impl Factorization {
    pub fn solve_in_place(&self, x: &mut [Complex64]) {
        match self {
            Factorization::Band(f) => f.solve_in_place(x),
            Factorization::Cyclic(f) => f.solve_in_place(x),
        }
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel_residual(a: &[Complex64], b: &[Complex64]) -> f64 {
        let num = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        let den = b.iter().map(|x| x.norm()).fold(0.0, f64::max);
        num / den
    }

    #[test]
    fn identity_leaves_rhs_unchanged() {
        let n = 7;
        let sys = TridiagonalSystem::new(vec![c(0.0, 0.0); n - 1], vec![c(1.0, 0.0); n], vec![c(0.0, 0.0); n - 1]).unwrap();
        let rhs: Vec<_> = (0..n).map(|j| c(j as f64, -(j as f64))).collect();
        assert_eq!(sys.solve(&rhs).unwrap(), rhs);
    }

    #[test]
    fn discrete_laplacian_eigenvector() {
        let n = 40;
        let sys = TridiagonalSystem::new(vec![c(-1.0, 0.0); n - 1], vec![c(2.0, 0.0); n], vec![c(-1.0, 0.0); n - 1]).unwrap();
        let rhs: Vec<_> = (1..=n).map(|j| c((PI * j as f64 / (n + 1) as f64).sin(), 0.0)).collect();
        let lambda = 2.0 - 2.0 * (PI / (n + 1) as f64).cos();
        let x = sys.solve(&rhs).unwrap();
        for (xi, ri) in x.iter().zip(&rhs) {
            assert!((xi - ri / lambda).norm() < 1e-10 * (1.0 / lambda));
        }
    }

    #[test]
    fn zero_pivot_is_reported() {
        let sys = TridiagonalSystem::new(vec![c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0)]).unwrap();
        assert!(matches!(sys.factor(), Err(Error::ZeroPivot { row: 0 })));
        assert!(TridiagonalSystem::new(vec![], vec![c(1.0, 0.0); 2], vec![]).is_err());
    }

    #[test]
    fn cyclic_solve_matches_circulant_eigenvalue() {
        let n = 32;
        let k = 5.0;
        let sys = CyclicSystem {
            band: TridiagonalSystem::new(vec![c(-1.0, 0.0); n - 1], vec![c(3.0, 0.5); n], vec![c(-1.0, 0.0); n - 1]).unwrap(),
            corner_low: c(-1.0, 0.0),
            corner_high: c(-1.0, 0.0),
        };
        let theta = 2.0 * PI * k / n as f64;
        let rhs: Vec<_> = (0..n).map(|j| Complex64::from_polar(1.0, theta * j as f64)).collect();
        let eig = c(3.0, 0.5) - 2.0 * theta.cos();
        let x = Factorization::Cyclic(sys.factor().unwrap()).solve(&rhs);
        for (xi, ri) in x.iter().zip(&rhs) {
            assert!((xi - ri / eig).norm() < 1e-13);
        }
    }

    fn dominant_system(seed: Vec<(f64, f64, f64, f64, f64, f64)>) -> (TridiagonalSystem, Vec<Complex64>) {
        let n = seed.len();
        let sub: Vec<_> = seed.iter().skip(1).map(|s| c(s.0, s.1)).collect();
        let sup: Vec<_> = seed.iter().take(n - 1).map(|s| c(s.2, s.3)).collect();
        let diag: Vec<_> = seed
            .iter()
            .map(|s| {
                let d = c(s.4, s.5);
                d + d.unscale(d.norm().max(1e-3)) * 5.0
            })
            .collect();
        let rhs = seed.iter().map(|s| c(s.1 - s.4, s.0 + s.5)).collect();
        (TridiagonalSystem { sub, diag, sup }, rhs)
    }

    proptest! {
        #[test]
        fn round_trip_on_dominant_systems(
            seed in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 3..200)
        ) {
            let (sys, rhs) = dominant_system(seed);
            prop_assume!(rhs.iter().any(|r| r.norm() > 1e-6));
            let x = sys.solve(&rhs).unwrap();
            prop_assert!(rel_residual(&sys.mul(&x), &rhs) <= 1e-10);

            let n = sys.len();
            let cyc = CyclicSystem { band: sys, corner_low: c(0.3, -0.2), corner_high: c(-0.1, 0.4) };
            let y = Factorization::Cyclic(cyc.factor().unwrap()).solve(&rhs);
            prop_assert!(rel_residual(&cyc.mul(&y), &rhs) <= 1e-10);
            prop_assert_eq!(y.len(), n);
        }
    }
}
