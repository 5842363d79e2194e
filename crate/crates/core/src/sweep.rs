//! Heun marching of the one-way equations and the two-way correction.
//!
//! The fields actually marched are the transformed `ũ = Op(g⁺) u` and
//! `ṽ = Op(g⁻) v`, which absorbs the amplitude term `∂x ln (iλ1⁺)^{∓1/2}` of the
//! order-zero symbol. Physical fields are recovered station by station with
//! the reciprocal factor.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{l2, Field2D};
use crate::medium::{ComplexSlowness, Medium};
use crate::ops::{BankParts, Closure, Direction, FactorSign, StationData, SymbolBank};
use crate::pade::PadeSet;
use crate::par::Exec;
use crate::residual::apply_helmholtz;

/// Slice norms above this multiple of the data scale abort the march.
pub const GROWTH_LIMIT: f64 = 1e6;

/// A family of transverse operators indexed by marching station.
pub trait StationOperator: Sync {
    type Bank: Send;

    fn assemble(&self, station: usize) -> Result<Self::Bank>;

    fn apply(&self, bank: &Self::Bank, dir: Direction, u: &[Complex64]) -> Vec<Complex64>;
}

/// Heun predictor–corrector for `∂x u - Op(λ) u = F`.
///
/// Forward marches start at station 0, backward marches at `nx - 1` with a
/// negative step. Every station is stored.
pub fn heun_march<P: StationOperator>(
    op: &P,
    dir: Direction,
    domain: crate::medium::DomainSpec,
    source: Option<&Field2D>,
    initial: &[Complex64],
) -> Result<Field2D> {
    let (nx, ny) = (domain.nx, domain.ny);
    if initial.len() != ny {
        return Err(Error::Shape {
            expected: format!("initial slice of {ny} values"),
            got: initial.len().to_string(),
        });
    }
    if let Some(f) = source {
        if f.domain.nx != nx || f.domain.ny != ny {
            return Err(Error::Shape {
                expected: format!("{nx}x{ny} source"),
                got: format!("{}x{}", f.domain.nx, f.domain.ny),
            });
        }
    }
    let station = |k: usize| match dir {
        Direction::Forward => k,
        Direction::Backward => nx - 1 - k,
    };
    let h = dir.sign() * domain.dx;
    let src_max = source.map_or(0.0, |f| (0..nx).map(|i| l2(f.row(i))).fold(0.0, f64::max));
    let scale = l2(initial).max(src_max * domain.length_x());

    let mut out = Field2D::zeros(domain);
    out.row_mut(station(0)).copy_from_slice(initial);
    let mut prev_bank = op.assemble(station(0))?;
    let add_source = |v: &mut Vec<Complex64>, i: usize| {
        if let Some(f) = source {
            v.iter_mut().zip(f.row(i)).for_each(|(a, b)| *a += b);
        }
    };

    for k in 1..nx {
        let (ip, ic) = (station(k - 1), station(k));
        let u_prev = out.row(ip).to_vec();

        let mut p = op.apply(&prev_bank, dir, &u_prev);
        add_source(&mut p, ip);
        let u_aux: Vec<Complex64> = u_prev.iter().zip(&p).map(|(u, p)| u + h * p).collect();

        let bank = op.assemble(ic)?;
        let mut q = op.apply(&bank, dir, &u_aux);
        add_source(&mut q, ic);

        let next = out.row_mut(ic);
        for (((n, u), p), q) in next.iter_mut().zip(&u_prev).zip(&p).zip(&q) {
            *n = u + h * (p + q) * 0.5;
        }
        let norm = l2(next);
        if !norm.is_finite() {
            return Err(Error::Instability {
                station: ic,
                reason: "non-finite values".into(),
            });
        }
        if scale > 0.0 && norm > GROWTH_LIMIT * scale {
            return Err(Error::Instability {
                station: ic,
                reason: format!("slice norm {norm:e} exceeds {GROWTH_LIMIT:e} x data scale {scale:e}"),
            });
        }
        prev_bank = bank;
    }
    Ok(out)
}

/// Constant scalar symbol `λ⁺ = value`, `λ⁻ = -value`; a test harness for the marcher.
#[derive(Debug, Clone, Copy)]
pub struct ScalarSymbol(pub Complex64);

impl StationOperator for ScalarSymbol {
    type Bank = ();

    fn assemble(&self, _station: usize) -> Result<()> {
        Ok(())
    }

    fn apply(&self, _bank: &(), dir: Direction, u: &[Complex64]) -> Vec<Complex64> {
        let l = self.0 * dir.sign();
        u.iter().map(|v| v * l).collect()
    }
}

/// Everything a sweep needs besides the boundary data.
#[derive(Debug, Clone)]
pub struct Sweeper<'a> {
    pub medium: &'a Medium,
    pub slowness: ComplexSlowness,
    pub omega: f64,
    pub pade: PadeSet,
    pub closure: Closure,
    /// Policy for loops over stations (recovery, sources, Helmholtz).
    pub exec: Exec,
    /// Policy inside one bank (Padé terms).
    pub bank_exec: Exec,
}

impl<'a> Sweeper<'a> {
    pub fn new(medium: &'a Medium, omega: f64, pade: PadeSet) -> Self {
        Self {
            medium,
            slowness: medium.slowness(),
            omega,
            pade,
            closure: Closure::Robin,
            exec: Exec::default(),
            bank_exec: Exec::Sequential,
        }
    }

    pub fn with_closure(mut self, closure: Closure) -> Self {
        self.closure = closure;
        self
    }

    pub fn with_exec(mut self, exec: Exec, bank_exec: Exec) -> Self {
        self.exec = exec;
        self.bank_exec = bank_exec;
        self
    }

    pub fn station_data(&self, i: usize) -> StationData {
        let d = self.medium.domain;
        let range = i * d.ny..(i + 1) * d.ny;
        StationData {
            omega: self.omega,
            dy: d.dy,
            slowness: self.slowness.s[range.clone()].to_vec(),
            a_damp: self.medium.a_damp[range.clone()].to_vec(),
            a_frac: self.medium.a_frac[range].to_vec(),
            alpha: self.medium.alpha,
        }
    }

    pub fn bank(&self, i: usize, parts: BankParts) -> Result<SymbolBank> {
        SymbolBank::assemble(i, &self.station_data(i), &self.pade, self.closure, parts, self.bank_exec)
    }

    /// Apply `Op(g±)` at every station.
    pub fn transform(&self, field: &Field2D, sign: FactorSign) -> Result<Field2D> {
        let d = field.domain;
        let rows = self.exec.try_map_range(d.nx, |i| {
            let bank = self.bank(i, BankParts::factor(sign))?;
            Ok::<_, Error>(bank.apply_g(sign, field.row(i)))
        })?;
        Field2D::from_values(d, rows.concat())
    }

    /// Forward one-way solution for Dirichlet data `boundary` at `x = x0`.
    pub fn one_way(&self, boundary: &[Complex64]) -> Result<OneWaySolution> {
        let bank0 = self.bank(0, BankParts::factor(FactorSign::Plus))?;
        let start = bank0.apply_g(FactorSign::Plus, boundary);
        let tilde = heun_march(self, Direction::Forward, self.medium.domain, None, &start)?;
        let mut field = self.transform(&tilde, FactorSign::Minus)?;
        // the Dirichlet column is data, not a recovered quantity
        field.row_mut(0).copy_from_slice(boundary);
        Ok(OneWaySolution { tilde, field })
    }

    /// One-way solution plus the reflection-correcting backward/forward pair.
    pub fn two_way(&self, boundary: &[Complex64]) -> Result<TwoWaySolution> {
        let one = self.one_way(boundary)?;
        let domain = self.medium.domain;
        let hu = apply_helmholtz(self.medium, &self.slowness, self.omega, &one.field, self.exec)?;
        let source = hu.scale(Complex64::new(-1.0, 0.0));

        let back_src = self.transform(&source, FactorSign::Minus)?;
        let zero = vec![Complex64::new(0.0, 0.0); domain.ny];
        let v_tilde = heun_march(self, Direction::Backward, domain, Some(&back_src), &zero)?;
        let v = self.transform(&v_tilde, FactorSign::Plus)?;

        let fwd_src = self.transform(&v, FactorSign::Plus)?;
        let u_tilde = heun_march(self, Direction::Forward, domain, Some(&fwd_src), &zero)?;
        let mut correction = self.transform(&u_tilde, FactorSign::Minus)?;
        correction.row_mut(0).fill(Complex64::new(0.0, 0.0));

        let two_way = one.field.add(&correction)?;
        Ok(TwoWaySolution {
            one_way: one.field,
            reflected: v,
            correction,
            two_way,
        })
    }
}

impl StationOperator for Sweeper<'_> {
    type Bank = SymbolBank;

    fn assemble(&self, station: usize) -> Result<SymbolBank> {
        self.bank(station, BankParts::LAMBDA)
    }

    fn apply(&self, bank: &SymbolBank, dir: Direction, u: &[Complex64]) -> Vec<Complex64> {
        bank.apply_lambda(dir, u)
    }
}

#[derive(Debug, Clone)]
pub struct OneWaySolution {
    /// Marched field `ũ = Op(g⁺) u`.
    pub tilde: Field2D,
    /// Physical field `u`.
    pub field: Field2D,
}

#[derive(Debug, Clone)]
pub struct TwoWaySolution {
    pub one_way: Field2D,
    /// Backward field `v`.
    pub reflected: Field2D,
    /// Forward response `u` to `v`; zero on the Dirichlet column.
    pub correction: Field2D,
    pub two_way: Field2D,
}
