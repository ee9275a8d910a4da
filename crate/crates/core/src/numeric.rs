//! Spectral parameter, integer powers and deterministic reductions.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Below this modulus `z^2` is treated as hitting `0` or `1`.
pub const SINGULAR_EPS: f64 = 1e-12;

/// Largest admissible `depth * |ln |z||`; beyond it powers leave the double range.
pub const MAX_LOG_MAGNITUDE: f64 = 600.0;

/// The complex parameter `z` of the Poisson kernel `x -> z^<x, ω>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParam(Complex64);

impl SpectralParam {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() <= SINGULAR_EPS {
            return Err(Error::ZeroParameter);
        }
        Ok(SpectralParam(z))
    }

    pub fn real(re: f64) -> Result<Self> {
        Self::new(Complex64::new(re, 0.0))
    }

    #[inline]
    pub fn value(self) -> Complex64 {
        self.0
    }

    /// Rejects parameters with `z^2` in `{0, 1}`; the boundary value map divides by `z^2 - 1`.
    pub fn require_invertible(self) -> Result<Self> {
        let z2 = self.0 * self.0;
        if z2.norm() <= SINGULAR_EPS || (z2 - 1.0).norm() <= SINGULAR_EPS {
            return Err(Error::ForbiddenParameter(self.0));
        }
        Ok(self)
    }

    /// Table of `z^k` for `|k| <= depth`, failing fast when it would overflow.
    pub fn powers(self, depth: usize) -> Result<PowerTable> {
        let log = self.0.norm().ln().abs();
        if depth as f64 * log > MAX_LOG_MAGNITUDE {
            return Err(Error::Overflow {
                modulus: self.0.norm(),
                depth,
            });
        }
        let pos = (0..=depth).map(|k| self.0.powi(k as i32)).collect();
        let neg = (0..=depth).map(|k| self.0.powi(-(k as i32))).collect();
        Ok(PowerTable { pos, neg })
    }
}

/// Integer powers `z^k`, each computed by exponentiation by squaring.
#[derive(Debug, Clone)]
pub struct PowerTable {
    pos: Vec<Complex64>,
    neg: Vec<Complex64>,
}

impl PowerTable {
    #[inline]
    pub fn pow(&self, k: i64) -> Complex64 {
        if k >= 0 {
            self.pos[k as usize]
        } else {
            self.neg[(-k) as usize]
        }
    }

    pub fn max_exponent(&self) -> usize {
        self.pos.len() - 1
    }
}

/// Pairwise (cascade) summation; the reduction tree depends only on the length.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        values
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &v| acc + v)
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

/// Decimal rendering with 17 significant digits; parses back to the same double.
pub fn format_f64(x: f64) -> String {
    format!("{:.16e}", x)
}

pub(crate) fn parse_f64(token: &str, line: usize) -> Result<f64> {
    token
        .parse::<f64>()
        .map_err(|e| Error::parse(line, format!("bad number {token:?}: {e}")))
}

pub(crate) fn parse_usize(token: &str, line: usize) -> Result<usize> {
    token
        .parse::<usize>()
        .map_err(|e| Error::parse(line, format!("bad integer {token:?}: {e}")))
}
