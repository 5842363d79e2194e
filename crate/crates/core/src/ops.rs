//! Transverse pseudo-differential operators at a single marching station.
//!
//! Every symbol used by the sweep is a rational function of `σ⊥²` in
//! partial-fraction form. Its operator is realized as
//!
//! ```text
//! Op(a0 - Σ k² a_m / (k² b_m + σ⊥²)) u = a0 u - Σ k² a_m w_m,   (k² b_m - D_yy) w_m = u
//! ```
//!
//! with `k = ω s(y)` and `D_yy` the second-order centred difference. The
//! numerator is applied after the inverse (`Op(a) Op(b)^-1`); the commutator
//! between the two is dropped. Under the `e^{-iωt}` convention the forward
//! symbols are
//!
//! ```text
//! λ1⁺  = iωs P_{1/2}(z)
//! λ̃0⁺  = -(a / 2s) P_{-1/2}(z)
//! λβ⁺  = -(aα / 2s) (-iω)^{α-1} P_{-1/2}(z)
//! g±   = (ωs)^{±1/2} P_{±1/4}(z),          z = -σ⊥² / (ωs)²
//! ```
//!
//! and every backward symbol is the exact negation of its forward partner.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::Result;
use crate::pade::{PadeCoefficients, PadeSet};
use crate::par::Exec;
use crate::tridiag::{CyclicSystem, Factorization, TridiagonalSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

/// Which integrating factor: `g⁺ = (iλ1⁺)^{1/2}` or `g⁻ = (iλ1⁺)^{-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorSign {
    Plus,
    Minus,
}

/// Closure of the transverse second difference at `y = y_min, y_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Closure {
    /// Ghost node eliminated with the first-order absorbing condition `∂_n w = i k w`.
    #[default]
    Robin,
    /// Periodic wrap; used by the constant-medium harnesses.
    Periodic,
}

/// Pointwise medium data on one transverse line.
#[derive(Debug, Clone, PartialEq)]
pub struct StationData {
    pub omega: f64,
    pub dy: f64,
    pub slowness: Vec<Complex64>,
    pub a_damp: Vec<f64>,
    pub a_frac: Vec<f64>,
    pub alpha: f64,
}

impl StationData {
    /// Constant medium on `ny` points.
    pub fn uniform(
        omega: f64,
        dy: f64,
        ny: usize,
        slowness: Complex64,
        a_damp: f64,
        a_frac: f64,
        alpha: f64,
    ) -> Self {
        Self {
            omega,
            dy,
            slowness: vec![slowness; ny],
            a_damp: vec![a_damp; ny],
            a_frac: vec![a_frac; ny],
            alpha,
        }
    }

    pub fn len(&self) -> usize {
        self.slowness.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slowness.is_empty()
    }
}

/// Which operators a bank should factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BankParts {
    pub lambda: bool,
    pub g_plus: bool,
    pub g_minus: bool,
}

impl BankParts {
    pub const ALL: BankParts = BankParts { lambda: true, g_plus: true, g_minus: true };
    pub const LAMBDA: BankParts = BankParts { lambda: true, g_plus: false, g_minus: false };

    pub fn factor(sign: FactorSign) -> Self {
        BankParts {
            lambda: false,
            g_plus: sign == FactorSign::Plus,
            g_minus: sign == FactorSign::Minus,
        }
    }
}

/// `u ↦ a0 u - Σ k² a_m (k² b_m - D_yy)^{-1} u` with prefactored systems.
#[derive(Debug, Clone)]
pub struct RationalOperator {
    a0: Complex64,
    residues: Vec<Complex64>,
    systems: Vec<Factorization>,
    k2: Arc<Vec<Complex64>>,
}

/// Matrix of `k² b - D_yy` under the given closure.
pub fn shifted_laplacian(
    k2: &[Complex64],
    shift: Complex64,
    dy: f64,
    wall_k: (Complex64, Complex64),
    closure: Closure,
) -> ShiftedLaplacian {
    let n = k2.len();
    let inv = 1.0 / (dy * dy);
    let off = Complex64::new(-inv, 0.0);
    let mut diag: Vec<Complex64> = k2.iter().map(|&k| k * shift + 2.0 * inv).collect();
    let band = |diag| TridiagonalSystem {
        sub: vec![off; n - 1],
        diag,
        sup: vec![off; n - 1],
    };
    match closure {
        Closure::Robin => {
            // ghost w_{-1} = (1 + i k dy) w_0, likewise at the top wall
            let i = Complex64::i();
            diag[0] = k2[0] * shift + (1.0 - i * wall_k.0 * dy) * inv;
            diag[n - 1] = k2[n - 1] * shift + (1.0 - i * wall_k.1 * dy) * inv;
            ShiftedLaplacian::Band(band(diag))
        }
        Closure::Periodic => ShiftedLaplacian::Cyclic(CyclicSystem {
            band: band(diag),
            corner_low: off,
            corner_high: off,
        }),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ShiftedLaplacian {
    Band(TridiagonalSystem),
    Cyclic(CyclicSystem),
}

impl ShiftedLaplacian {
    pub fn factor(&self) -> Result<Factorization> {
        Ok(match self {
            ShiftedLaplacian::Band(s) => Factorization::Band(s.factor()?),
            ShiftedLaplacian::Cyclic(s) => Factorization::Cyclic(s.factor()?),
        })
    }

    pub fn mul(&self, x: &[Complex64]) -> Vec<Complex64> {
        match self {
            ShiftedLaplacian::Band(s) => s.mul(x),
            ShiftedLaplacian::Cyclic(s) => s.mul(x),
        }
    }
}

impl RationalOperator {
    pub fn assemble(
        coeffs: &PadeCoefficients,
        k2: Arc<Vec<Complex64>>,
        dy: f64,
        wall_k: (Complex64, Complex64),
        closure: Closure,
        exec: Exec,
    ) -> Result<Self> {
        let systems = exec.try_map_range(coeffs.terms.len(), |m| {
            shifted_laplacian(&k2, coeffs.terms[m].b, dy, wall_k, closure).factor()
        })?;
        Ok(Self {
            a0: coeffs.a0,
            residues: coeffs.terms.iter().map(|t| t.a).collect(),
            systems,
            k2,
        })
    }

    pub fn apply(&self, u: &[Complex64], exec: Exec) -> Vec<Complex64> {
        let solves = exec.map_range(self.systems.len(), |m| self.systems[m].solve(u));
        let mut out: Vec<Complex64> = u.iter().map(|&v| self.a0 * v).collect();
        for (a, w) in self.residues.iter().zip(&solves) {
            for ((o, &k2), &wj) in out.iter_mut().zip(self.k2.iter()).zip(w) {
                *o -= k2 * a * wj;
            }
        }
        out
    }
}

/// All transverse operators needed at one marching station.
#[derive(Debug, Clone)]
pub struct SymbolBank {
    pub station: usize,
    exec: Exec,
    sqrt_mult: Vec<Complex64>,
    damp_mult: Vec<Complex64>,
    frac_mult: Vec<Complex64>,
    g_mult: Vec<Complex64>,
    sqrt: Option<RationalOperator>,
    inv_sqrt: Option<RationalOperator>,
    quarter: Option<RationalOperator>,
    inv_quarter: Option<RationalOperator>,
}

/// `(-iω)^{α-1}` on the principal branch.
pub fn fractional_factor(omega: f64, alpha: f64) -> Complex64 {
    Complex64::new(0.0, -omega).powf(alpha - 1.0)
}

impl SymbolBank {
    pub fn assemble(
        station: usize,
        data: &StationData,
        pade: &PadeSet,
        closure: Closure,
        parts: BankParts,
        exec: Exec,
    ) -> Result<Self> {
        let omega = data.omega;
        let n = data.len();
        let k2 = Arc::new(data.slowness.iter().map(|s| (omega * s).powi(2)).collect::<Vec<_>>());
        let wall_k = (omega * data.slowness[0], omega * data.slowness[n - 1]);
        let build = |coeffs: &PadeCoefficients, wanted: bool| -> Result<Option<RationalOperator>> {
            if !wanted {
                return Ok(None);
            }
            RationalOperator::assemble(coeffs, Arc::clone(&k2), data.dy, wall_k, closure, exec).map(Some)
        };

        let i = Complex64::i();
        let frac = fractional_factor(omega, data.alpha);
        let inv_s: Vec<Complex64> = data.slowness.iter().map(|s| s.inv()).collect();
        Ok(Self {
            station,
            exec,
            sqrt_mult: data.slowness.iter().map(|&s| i * omega * s).collect(),
            damp_mult: inv_s.iter().zip(&data.a_damp).map(|(&r, &a)| -(a / 2.0) * r).collect(),
            frac_mult: inv_s
                .iter()
                .zip(&data.a_frac)
                .map(|(&r, &a)| -(a / 2.0) * r * frac)
                .collect(),
            g_mult: data.slowness.iter().map(|&s| (omega * s).sqrt()).collect(),
            sqrt: build(&pade.half, parts.lambda)?,
            inv_sqrt: build(&pade.neg_half, parts.lambda)?,
            quarter: build(&pade.quarter, parts.g_plus)?,
            inv_quarter: build(&pade.neg_quarter, parts.g_minus)?,
        })
    }

    pub fn len(&self) -> usize {
        self.sqrt_mult.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sqrt_mult.is_empty()
    }

    fn part<'a>(op: &'a Option<RationalOperator>, name: &str) -> &'a RationalOperator {
        op.as_ref()
            .unwrap_or_else(|| panic!("symbol bank was assembled without the {name} operator"))
    }

    fn finish(dir: Direction, mut out: Vec<Complex64>) -> Vec<Complex64> {
        if dir == Direction::Backward {
            out.iter_mut().for_each(|v| *v = -*v);
        }
        out
    }

    /// `Op(λ1±) u`.
    pub fn apply_sqrt_symbol(&self, dir: Direction, u: &[Complex64]) -> Vec<Complex64> {
        let r = Self::part(&self.sqrt, "square-root").apply(u, self.exec);
        let out = r.iter().zip(&self.sqrt_mult).map(|(v, m)| v * m).collect();
        Self::finish(dir, out)
    }

    /// `Op(λ̃0±) u`, the damping part of the order-zero symbol.
    pub fn apply_order0_symbol(&self, dir: Direction, u: &[Complex64]) -> Vec<Complex64> {
        let r = Self::part(&self.inv_sqrt, "inverse square-root").apply(u, self.exec);
        let out = r.iter().zip(&self.damp_mult).map(|(v, m)| v * m).collect();
        Self::finish(dir, out)
    }

    /// `Op(λβ±) u`, the fractional-attenuation symbol.
    pub fn apply_frac_symbol(&self, dir: Direction, u: &[Complex64]) -> Vec<Complex64> {
        let r = Self::part(&self.inv_sqrt, "inverse square-root").apply(u, self.exec);
        let out = r.iter().zip(&self.frac_mult).map(|(v, m)| v * m).collect();
        Self::finish(dir, out)
    }

    /// `Op(g±) u`.
    pub fn apply_g(&self, sign: FactorSign, u: &[Complex64]) -> Vec<Complex64> {
        match sign {
            FactorSign::Plus => {
                let r = Self::part(&self.quarter, "quarter-power").apply(u, self.exec);
                r.iter().zip(&self.g_mult).map(|(v, m)| v * m).collect()
            }
            FactorSign::Minus => {
                let r = Self::part(&self.inv_quarter, "inverse quarter-power").apply(u, self.exec);
                r.iter().zip(&self.g_mult).map(|(v, m)| v / m).collect()
            }
        }
    }

    /// `Op(λ1 + λ̃0 + λβ) u` for the given direction.
    pub fn apply_lambda(&self, dir: Direction, u: &[Complex64]) -> Vec<Complex64> {
        let sqrt = Self::part(&self.sqrt, "square-root");
        let inv_sqrt = Self::part(&self.inv_sqrt, "inverse square-root");
        let mut pair = self.exec.map_range(2, |k| {
            if k == 0 {
                sqrt.apply(u, self.exec)
            } else {
                inv_sqrt.apply(u, self.exec)
            }
        });
        let attn = pair.pop().expect("two results");
        let prop = pair.pop().expect("two results");
        let out = (0..self.len())
            .map(|j| {
                prop[j] * self.sqrt_mult[j] + attn[j] * self.damp_mult[j] + attn[j] * self.frac_mult[j]
            })
            .collect();
        Self::finish(dir, out)
    }
}
