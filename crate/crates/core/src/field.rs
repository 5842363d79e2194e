//! Complex fields on the grid and the `CFLD` binary file format.
//!
//! `CFLD` layout, little-endian:
//!
//! | bytes | content                                   |
//! |-------|-------------------------------------------|
//! | 4     | magic `CFLD`                              |
//! | 4     | `u32` version (= 1)                       |
//! | 8     | `u32 nx`, `u32 ny`                        |
//! | 32    | `f64 x0, y0, dx, dy`                      |
//! | 8     | `f64 omega`                               |
//! | 16·N  | `nx·ny` pairs `(re: f64, im: f64)`, x-index outer |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::medium::DomainSpec;

pub const MAGIC: &[u8; 4] = b"CFLD";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 4 + 4 + 8 + 32 + 8;

/// One transverse line `u(x_station, ·)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransverseField {
    pub station: usize,
    pub values: Vec<Complex64>,
}

impl TransverseField {
    pub fn new(station: usize, values: Vec<Complex64>) -> Self {
        Self { station, values }
    }

    pub fn norm(&self) -> f64 {
        l2(&self.values)
    }
}

pub fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Complex grid function, row-major with the x-index outer.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub domain: DomainSpec,
    pub values: Vec<Complex64>,
}

impl Field2D {
    pub fn zeros(domain: DomainSpec) -> Self {
        Self {
            domain,
            values: vec![Complex64::new(0.0, 0.0); domain.len()],
        }
    }

    pub fn from_values(domain: DomainSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::Shape {
                expected: format!("{} values", domain.len()),
                got: format!("{}", values.len()),
            });
        }
        Ok(Self { domain, values })
    }

    pub fn from_fn(domain: DomainSpec, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(domain.len());
        for i in 0..domain.nx {
            for j in 0..domain.ny {
                values.push(f(domain.x(i), domain.y(j)));
            }
        }
        Self { domain, values }
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        let ny = self.domain.ny;
        &self.values[i * ny..(i + 1) * ny]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        let ny = self.domain.ny;
        &mut self.values[i * ny..(i + 1) * ny]
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.domain.index(i, j)]
    }

    pub fn norm(&self) -> f64 {
        l2(&self.values)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            domain: self.domain,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn check_same_grid(&self, other: &Field2D) -> Result<()> {
        if self.domain.nx != other.domain.nx || self.domain.ny != other.domain.ny {
            return Err(Error::Shape {
                expected: format!("{}x{}", self.domain.nx, self.domain.ny),
                got: format!("{}x{}", other.domain.nx, other.domain.ny),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Field2D) -> Result<Field2D> {
        self.check_same_grid(other)?;
        Ok(Self {
            domain: self.domain,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Field2D) -> Result<Field2D> {
        self.check_same_grid(other)?;
        Ok(Self {
            domain: self.domain,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn to_bytes(&self, omega: f64) -> Vec<u8> {
        let d = &self.domain;
        let mut out = Vec::with_capacity(HEADER_LEN + 16 * self.values.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(d.nx as u32).to_le_bytes());
        out.extend_from_slice(&(d.ny as u32).to_le_bytes());
        for v in [d.x0, d.y0, d.dx, d.dy, omega] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for z in &self.values {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
        out
    }

    /// Parse a `CFLD` buffer; `path` only labels errors.
    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<(Field2D, f64)> {
        let bad = |reason: String| Error::Format {
            path: path.to_path_buf(),
            reason,
        };
        if bytes.len() < HEADER_LEN {
            return Err(bad(format!("truncated header ({} bytes)", bytes.len())));
        }
        if &bytes[0..4] != MAGIC {
            return Err(bad("missing CFLD magic".into()));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
        let version = u32_at(4);
        if version != VERSION {
            return Err(bad(format!("unsupported version {version}")));
        }
        let nx = u32_at(8) as usize;
        let ny = u32_at(12) as usize;
        let domain = DomainSpec {
            x0: f64_at(16),
            y0: f64_at(24),
            nx,
            ny,
            dx: f64_at(32),
            dy: f64_at(40),
        };
        let omega = f64_at(48);
        let expected = HEADER_LEN + 16 * nx * ny;
        if bytes.len() != expected {
            return Err(bad(format!(
                "payload holds {} bytes, expected {expected}",
                bytes.len()
            )));
        }
        let values = bytes[HEADER_LEN..]
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[0..8].try_into().expect("8 bytes")),
                    f64::from_le_bytes(c[8..16].try_into().expect("8 bytes")),
                )
            })
            .collect();
        Ok((Field2D { domain, values }, omega))
    }

    pub fn write(&self, path: &Path, omega: f64) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(&self.to_bytes(omega))?;
        w.flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<(Field2D, f64)> {
        let mut bytes = Vec::new();
        BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes, path)
    }

    /// CSV with header `x,y,re,im`, one row per node.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "x,y,re,im")?;
        let d = &self.domain;
        for i in 0..d.nx {
            for j in 0..d.ny {
                let z = self.at(i, j);
                writeln!(w, "{},{},{},{}", d.x(i), d.y(j), z.re, z.im)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
