//! 8-bit grayscale (binary PGM, `P5`) images of complex fields.
//!
//! Image rows run along `y` (top row = largest `y`) and columns along `x`,
//! so propagation is left to right.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::Field2D;
use crate::par::Exec;
use crate::residual::fft2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderMode {
    Real,
    Abs,
    /// `log10(1 + |û|)` of the DFT with the zero frequency at the centre.
    Fft,
}

impl RenderMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "real" => Some(RenderMode::Real),
            "abs" => Some(RenderMode::Abs),
            "fft" => Some(RenderMode::Fft),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn at(&self, col: usize, row: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(&self.to_pgm())?;
        w.flush()?;
        Ok(())
    }
}

/// Scalar image values laid out as `[row][col]` with rows along `y`.
fn scalar_plane(field: &Field2D, mode: RenderMode, exec: Exec) -> (usize, usize, Vec<f64>) {
    let (nx, ny) = (field.domain.nx, field.domain.ny);
    let mut plane = vec![0.0; nx * ny];
    match mode {
        RenderMode::Real | RenderMode::Abs => {
            for i in 0..nx {
                for j in 0..ny {
                    let v = field.at(i, j);
                    let s = if mode == RenderMode::Real { v.re } else { v.norm() };
                    plane[(ny - 1 - j) * nx + i] = s;
                }
            }
        }
        RenderMode::Fft => {
            let spec = fft2(field, exec);
            // shift so that mode 0 lands at index floor(n/2)
            for mx in 0..nx {
                for my in 0..ny {
                    let col = (mx + nx / 2) % nx;
                    let row_y = (my + ny / 2) % ny;
                    plane[(ny - 1 - row_y) * nx + col] = spec[mx * ny + my].norm().ln_1p() / std::f64::consts::LN_10;
                }
            }
        }
    }
    (nx, ny, plane)
}

/// Linear min–max mapping to 0..=255; a constant image maps to mid-gray.
pub fn render(field: &Field2D, mode: RenderMode, exec: Exec) -> Result<GrayImage> {
    let (width, height, plane) = scalar_plane(field, mode, exec);
    if plane.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("field contains non-finite values".into()));
    }
    let lo = plane.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = plane.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let pixels = plane
        .iter()
        .map(|&v| {
            if span <= f64::EPSILON * hi.abs().max(lo.abs()).max(f64::MIN_POSITIVE) {
                128
            } else {
                (255.0 * (v - lo) / span).round().clamp(0.0, 255.0) as u8
            }
        })
        .collect();
    Ok(GrayImage { width, height, pixels })
}
