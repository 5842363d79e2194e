//! Partial-fraction Padé approximants of `(1 + z)^γ`.
//!
//! An approximant of order `M` is stored as
//!
//! ```text
//! P(z) = a0 + Σ_{m=1..M} a_m / (z - b_m)
//! ```
//!
//! Two providers exist: [`PadeCoefficients::generate_classical`] builds the
//! Taylor-matched `[M/M]` approximant from scratch, and
//! [`PadeCoefficients::load_table`] returns the published four-digit
//! coefficient tables for `M <= 4`. Either can be rotated onto a tilted
//! branch cut with [`PadeCoefficients::rotate`], which moves every pole off
//! the real axis.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest order accepted by the classical generator.
pub const MAX_CLASSICAL_ORDER: usize = 8;
/// Largest order present in the published tables.
pub const MAX_TABLE_ORDER: usize = 4;

const POLE_SEPARATION: f64 = 1e-8;
const POLE_PROXIMITY: f64 = 1e-14;

/// Exponent of the approximated power `(1 + z)^γ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exponent {
    Half,
    NegHalf,
    Quarter,
    NegQuarter,
}

impl Exponent {
    pub const ALL: [Exponent; 4] = [
        Exponent::Half,
        Exponent::NegHalf,
        Exponent::Quarter,
        Exponent::NegQuarter,
    ];

    pub fn value(self) -> f64 {
        match self {
            Exponent::Half => 0.5,
            Exponent::NegHalf => -0.5,
            Exponent::Quarter => 0.25,
            Exponent::NegQuarter => -0.25,
        }
    }

    pub fn from_value(g: f64) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| (e.value() - g).abs() < 1e-12)
            .ok_or_else(|| Error::InvalidArgument(format!("gamma {g} is not one of ±1/2, ±1/4")))
    }

    /// `(1 + z)^γ` on the principal branch.
    pub fn power(self, z: Complex64) -> Complex64 {
        (Complex64::new(1.0, 0.0) + z).powf(self.value())
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Exponent::Half => "1/2",
            Exponent::NegHalf => "-1/2",
            Exponent::Quarter => "1/4",
            Exponent::NegQuarter => "-1/4",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClassicalGenerated,
    PublishedTable,
}

/// One partial-fraction term `a / (z - b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PadeTerm {
    pub a: Complex64,
    pub b: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PadeCoefficients {
    pub gamma: Exponent,
    pub theta: f64,
    pub a0: Complex64,
    pub terms: Vec<PadeTerm>,
    pub provenance: Provenance,
}

/// Taylor-matched `[M/M]` rational approximant in polynomial form.
///
/// `numerator[k]` and `denominator[k]` multiply `z^k`; `denominator[0] == 1`.
/// Accepts any real exponent so that polynomial fixed points such as `γ = 1`
/// can serve as oracles.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalPade {
    pub numerator: Vec<f64>,
    pub denominator: Vec<f64>,
}

/// Taylor coefficients of `(1 + z)^γ` up to and including `z^n`.
pub fn binomial_series(gamma: f64, n: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(n + 1);
    c.push(1.0);
    for k in 1..=n {
        let prev = c[k - 1];
        c.push(prev * (gamma - (k - 1) as f64) / k as f64);
    }
    c
}

impl RationalPade {
    pub fn taylor_matched(gamma: f64, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument("Padé order must be positive".into()));
        }
        let m = order;
        let c = binomial_series(gamma, 2 * m);
        // Σ_{j=1..M} q_j c_{k-j} = -c_k for k = M+1..2M
        let hankel = DMatrix::from_fn(m, m, |r, j| {
            let idx = m + 1 + r - (j + 1);
            c[idx]
        });
        let rhs = DVector::from_fn(m, |r, _| -c[m + 1 + r]);
        let lu = hankel.lu();
        let q = lu.solve(&rhs).ok_or(Error::SingularHankel { order })?;
        if q.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularHankel { order });
        }
        let mut denominator = Vec::with_capacity(m + 1);
        denominator.push(1.0);
        denominator.extend(q.iter().copied());
        let numerator = (0..=m)
            .map(|k| (0..=k).map(|j| denominator[j] * c[k - j]).sum())
            .collect();
        Ok(Self {
            numerator,
            denominator,
        })
    }

    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        horner(&self.numerator, z) / horner(&self.denominator, z)
    }
}

fn horner<T>(coeffs: &[f64], z: T) -> T
where
    T: Copy + std::ops::Mul<Output = T> + std::ops::Add<f64, Output = T> + From<f64>,
{
    coeffs
        .iter()
        .rev()
        .fold(T::from(0.0), |acc, &c| acc * z + c)
}

fn horner_c(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    // value and derivative
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Roots of a real polynomial (ascending coefficients) via the companion matrix,
/// each polished by a few Newton steps.
fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let companion = DMatrix::from_fn(n, n, |r, col| {
        if r == 0 {
            -coeffs[n - 1 - col] / lead
        } else if col + 1 == r {
            1.0
        } else {
            0.0
        }
    });
    let mut roots: Vec<Complex64> = companion.complex_eigenvalues().iter().copied().collect();
    for root in roots.iter_mut() {
        for _ in 0..8 {
            let (p, dp) = horner_c(coeffs, *root);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            *root -= step;
            if step.norm() <= 1e-16 * root.norm().max(1.0) {
                break;
            }
        }
    }
    roots
}

impl PadeCoefficients {
    pub fn order(&self) -> usize {
        self.terms.len()
    }

    pub fn is_rotated(&self) -> bool {
        self.theta != 0.0
    }

    /// Classical Taylor-matched `[M/M]` approximant in partial-fraction form.
    pub fn generate_classical(gamma: Exponent, order: usize) -> Result<Self> {
        if !(1..=MAX_CLASSICAL_ORDER).contains(&order) {
            return Err(Error::InvalidArgument(format!(
                "classical Padé order must be in 1..={MAX_CLASSICAL_ORDER}, got {order}"
            )));
        }
        let rational = RationalPade::taylor_matched(gamma.value(), order)?;
        let q = &rational.denominator;
        let p = &rational.numerator;
        if q[order].abs() < 1e-300 {
            return Err(Error::SingularHankel { order });
        }

        let mut poles = polynomial_roots(q);
        for b in poles.iter_mut() {
            if b.im.abs() <= 1e-10 * b.norm().max(1.0) {
                b.im = 0.0;
            }
        }
        poles.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        for i in 0..poles.len() {
            for j in (i + 1)..poles.len() {
                let gap = (poles[i] - poles[j]).norm();
                if gap < POLE_SEPARATION {
                    return Err(Error::NonSimplePoles { i: i + 1, j: j + 1, gap });
                }
            }
        }

        let terms = poles
            .into_iter()
            .map(|b| {
                let (pv, _) = horner_c(p, b);
                let (_, dq) = horner_c(q, b);
                let a = pv / dq;
                let a = if b.im == 0.0 { Complex64::new(a.re, 0.0) } else { a };
                PadeTerm { a, b }
            })
            .collect();

        Ok(Self {
            gamma,
            theta: 0.0,
            a0: Complex64::new(p[order] / q[order], 0.0),
            terms,
            provenance: Provenance::ClassicalGenerated,
        })
    }

    /// Published real-valued coefficients (four to five significant digits).
    pub fn load_table(gamma: Exponent, order: usize) -> Result<Self> {
        if !(1..=MAX_TABLE_ORDER).contains(&order) {
            return Err(Error::InvalidArgument(format!(
                "tabulated Padé coefficients exist only for M in 1..={MAX_TABLE_ORDER}, got {order}"
            )));
        }
        let row = &tables::rows(gamma)[order - 1];
        let terms = (0..order)
            .map(|m| PadeTerm {
                a: Complex64::new(row.a[m], 0.0),
                b: Complex64::new(row.b[m], 0.0),
            })
            .collect();
        Ok(Self {
            gamma,
            theta: 0.0,
            a0: Complex64::new(row.a0, 0.0),
            terms,
            provenance: Provenance::PublishedTable,
        })
    }

    /// Rotate the branch cut of the approximant by `theta` radians.
    pub fn rotate(&self, theta: f64) -> Result<Self> {
        if self.is_rotated() {
            return Err(Error::AlreadyRotated { theta: self.theta });
        }
        if !(0.0..=PI / 2.0).contains(&theta) {
            return Err(Error::InvalidArgument(format!(
                "rotation angle must lie in [0, pi/2], got {theta}"
            )));
        }
        let g = self.gamma.value();
        let phase0 = Complex64::from_polar(1.0, theta * g);
        let phase_a = Complex64::from_polar(1.0, theta * (1.0 + g));
        let phase_b = Complex64::from_polar(1.0, theta);
        let one = Complex64::new(1.0, 0.0);
        Ok(Self {
            gamma: self.gamma,
            theta,
            a0: self.a0 * phase0,
            terms: self
                .terms
                .iter()
                .map(|t| PadeTerm {
                    a: t.a * phase_a,
                    b: (one + t.b) * phase_b - one,
                })
                .collect(),
            provenance: self.provenance,
        })
    }

    /// `a0 + Σ a_m / (z - b_m)`.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = self.a0;
        for (index, t) in self.terms.iter().enumerate() {
            let d = z - t.b;
            let dist = d.norm();
            if dist < POLE_PROXIMITY {
                return Err(Error::PoleProximity {
                    z: z.to_string(),
                    index: index + 1,
                    dist,
                });
            }
            acc += t.a / d;
        }
        Ok(acc)
    }

    /// Value at the origin, `a0 - Σ a_m / b_m`.
    pub fn value_at_origin(&self) -> Complex64 {
        self.terms.iter().fold(self.a0, |acc, t| acc - t.a / t.b)
    }

    /// Largest deviation from `(1 + z)^γ` over `n` uniform samples of `[zmin, zmax]`.
    pub fn error_scan(&self, gamma: Exponent, zmin: f64, zmax: f64, n: usize) -> Result<f64> {
        if zmin <= -1.0 {
            return Err(Error::Domain { value: zmin });
        }
        if n == 0 || zmax < zmin {
            return Err(Error::InvalidArgument(format!(
                "empty scan [{zmin}, {zmax}] with {n} samples"
            )));
        }
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let z = if n == 1 {
                zmin
            } else {
                zmin + (zmax - zmin) * k as f64 / (n - 1) as f64
            };
            let exact = (1.0 + z).powf(gamma.value());
            let approx = self.evaluate(Complex64::new(z, 0.0))?;
            worst = worst.max((approx - exact).norm());
        }
        Ok(worst)
    }

    /// CSV rows `gamma,M,theta_deg,m,re_a,im_a,re_b,im_b`; row `m = 0` carries `a0`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("gamma,M,theta_deg,m,re_a,im_a,re_b,im_b\n");
        let head = format!("{},{},{}", self.gamma.value(), self.order(), self.theta.to_degrees());
        out.push_str(&format!("{head},0,{:e},{:e},,\n", self.a0.re, self.a0.im));
        for (m, t) in self.terms.iter().enumerate() {
            out.push_str(&format!(
                "{head},{},{:e},{:e},{:e},{:e}\n",
                m + 1,
                t.a.re,
                t.a.im,
                t.b.re,
                t.b.im
            ));
        }
        out
    }
}

/// Coefficient families for the four exponents used by the transverse operators.
#[derive(Debug, Clone, PartialEq)]
pub struct PadeSet {
    pub half: PadeCoefficients,
    pub neg_half: PadeCoefficients,
    pub quarter: PadeCoefficients,
    pub neg_quarter: PadeCoefficients,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PadeProvider {
    #[default]
    Classical,
    Table,
}

impl PadeProvider {
    pub fn name(self) -> &'static str {
        match self {
            PadeProvider::Classical => "classical",
            PadeProvider::Table => "table",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "classical" => Some(PadeProvider::Classical),
            "table" => Some(PadeProvider::Table),
            _ => None,
        }
    }
}

impl PadeSet {
    pub fn build(provider: PadeProvider, order: usize, theta: f64) -> Result<Self> {
        let make = |g| -> Result<PadeCoefficients> {
            let base = match provider {
                PadeProvider::Classical => PadeCoefficients::generate_classical(g, order)?,
                PadeProvider::Table => PadeCoefficients::load_table(g, order)?,
            };
            base.rotate(theta)
        };
        Ok(Self {
            half: make(Exponent::Half)?,
            neg_half: make(Exponent::NegHalf)?,
            quarter: make(Exponent::Quarter)?,
            neg_quarter: make(Exponent::NegQuarter)?,
        })
    }

    pub fn order(&self) -> usize {
        self.half.order()
    }
}

mod tables {
    use super::Exponent;

    pub struct Row {
        pub a0: f64,
        pub a: &'static [f64],
        pub b: &'static [f64],
    }

    const HALF: [Row; 4] = [
        Row { a0: 2.8889, a: &[-7.1358], b: &[-3.7778] },
        Row { a0: 4.7738, a: &[-34.5138, -0.2786], b: &[-9.6264, -1.4778] },
        Row {
            a0: 6.7228,
            a: &[-98.1129, -1.0233, -0.0723],
            b: &[-18.7042, -2.4499, -1.2139],
        },
        Row {
            a0: 8.6939,
            a: &[-213.677, -2.4055, -0.2410, -0.0303],
            b: &[-31.0166, -3.8025, -1.6590, -1.1242],
        },
    ];

    const NEG_HALF: [Row; 4] = [
        Row { a0: 0.3590, a: &[0.8218], b: &[-1.2821] },
        Row { a0: 0.2114, a: &[1.0955, 0.4181], b: &[-2.6945, -1.0944] },
        Row {
            a0: 0.1493,
            a: &[1.4521, 0.4474, 0.2885],
            b: &[-4.9532, -1.5846, -1.0480],
        },
        Row {
            a0: 0.1152,
            a: &[1.8313, 0.5184, 0.2862, 0.2219],
            b: &[-8.0266, -2.3254, -1.3120, -1.0292],
        },
    ];

    const QUARTER: [Row; 4] = [
        Row { a0: 1.6239, a: &[-1.5572], b: &[-2.4957] },
        Row { a0: 2.0906, a: &[-5.8925, -0.1638], b: &[-6.0834, -1.3433] },
        Row {
            a0: 2.4805,
            a: &[-14.0723, -0.4809, -0.0572],
            b: &[-11.6531, -2.1510, -1.1613],
        },
        Row {
            a0: 2.8202,
            a: &[-26.8939, -0.9694, -0.1539, -0.0284],
            b: &[-19.2030, -3.2899, -1.5524, -1.0952],
        },
    ];

    const NEG_QUARTER: [Row; 4] = [
        Row { a0: 0.6213, a: &[0.5737], b: &[-1.5149] },
        Row { a0: 0.4794, a: &[1.1826, 0.1945], b: &[-3.3516, -1.1593] },
        Row {
            a0: 0.4035,
            a: &[1.9393, 0.3201, 0.1095],
            b: &[-6.2432, -1.7354, -1.0796],
        },
        Row {
            a0: 0.3547,
            a: &[2.8260, 0.4555, 0.1670, 0.0734],
            b: &[-10.1697, -2.5810, -1.3816, -1.0481],
        },
    ];

    pub fn rows(gamma: Exponent) -> &'static [Row; 4] {
        match gamma {
            Exponent::Half => &HALF,
            Exponent::NegHalf => &NEG_HALF,
            Exponent::Quarter => &QUARTER,
            Exponent::NegQuarter => &NEG_QUARTER,
        }
    }
}
