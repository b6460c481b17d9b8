//! Truncated Taylor series with complex coefficients.
//!
//! A [`TaylorPoly`] models an element of H²(D) by its Taylor coefficients up to
//! a hard degree cap. Every operation that could push mass above the cap either
//! fails with [`Error::BudgetExceeded`] or, for the explicitly truncating
//! variants, reports what was dropped.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Coefficient vector `coeffs[j]` of `z^j`, with `coeffs.len() <= cap + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorPoly {
    coeffs: Vec<C64>,
    cap: usize,
}

impl TaylorPoly {
    /// Builds a polynomial; nonzero coefficients above `cap` are rejected.
    pub fn new(mut coeffs: Vec<C64>, cap: usize) -> Result<Self> {
        if coeffs.len() > cap + 1 {
            if let Some(pos) = coeffs.iter().rposition(|c| c.norm_sqr() > 0.0) {
                if pos > cap {
                    return Err(Error::BudgetExceeded { needed: pos, cap });
                }
            }
            coeffs.truncate(cap + 1);
        }
        Ok(Self { coeffs, cap })
    }

    pub(crate) fn clear(&mut self, j: usize) {
        if let Some(c) = self.coeffs.get_mut(j) {
            *c = ZERO;
        }
    }

    pub fn from_real(coeffs: &[f64], cap: usize) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect(), cap)
    }

    pub fn zero(cap: usize) -> Self {
        Self {
            coeffs: Vec::new(),
            cap,
        }
    }

    pub fn constant(c: C64, cap: usize) -> Self {
        Self {
            coeffs: vec![c],
            cap,
        }
    }

    /// `z^k`.
    pub fn monomial(k: usize, cap: usize) -> Result<Self> {
        if k > cap {
            return Err(Error::BudgetExceeded { needed: k, cap });
        }
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = ONE;
        Ok(Self { coeffs, cap })
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Stored coefficients (may be shorter than `cap + 1`).
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    pub fn coeff(&self, j: usize) -> C64 {
        self.coeffs.get(j).copied().unwrap_or(ZERO)
    }

    /// Highest index carrying a nonzero coefficient, `None` for the zero series.
    pub fn deg(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| c.norm_sqr() > 0.0)
    }

    /// Highest index whose coefficient exceeds `tol` in magnitude.
    pub fn effective_deg(&self, tol: f64) -> Option<usize> {
        self.coeffs.iter().rposition(|c| c.norm() > tol)
    }

    pub fn is_zero(&self) -> bool {
        self.deg().is_none()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `Σ_j f_j · conj(g_j)`; shorter operands are zero padded.
    pub fn inner(&self, other: &Self) -> C64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    /// `S^k f = z^k f`.
    pub fn shift_pow(&self, k: usize) -> Result<Self> {
        let Some(d) = self.deg() else {
            return Ok(Self::zero(self.cap));
        };
        if d + k > self.cap {
            return Err(Error::BudgetExceeded {
                needed: d + k,
                cap: self.cap,
            });
        }
        let mut coeffs = vec![ZERO; k];
        coeffs.extend_from_slice(&self.coeffs[..=d]);
        Ok(Self {
            coeffs,
            cap: self.cap,
        })
    }

    /// `(S*)^k f`: drops the first `k` coefficients.
    pub fn coshift_pow(&self, k: usize) -> Self {
        let coeffs = self.coeffs.iter().skip(k).copied().collect();
        Self {
            coeffs,
            cap: self.cap,
        }
    }

    /// Exact Cauchy product; the result inherits the larger cap.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let cap = self.cap.max(other.cap);
        let (Some(da), Some(db)) = (self.deg(), other.deg()) else {
            return Ok(Self::zero(cap));
        };
        if da + db > cap {
            return Err(Error::BudgetExceeded {
                needed: da + db,
                cap,
            });
        }
        Ok(self.mul_truncated(other, cap))
    }

    /// Cauchy product keeping only coefficients up to `cap`.
    pub fn mul_truncated(&self, other: &Self, cap: usize) -> Self {
        let (Some(da), Some(db)) = (self.deg(), other.deg()) else {
            return Self::zero(cap);
        };
        let top = (da + db).min(cap);
        let mut coeffs = vec![ZERO; top + 1];
        for (i, a) in self.coeffs[..=da].iter().enumerate() {
            if i > top {
                break;
            }
            if a.norm_sqr() == 0.0 {
                continue;
            }
            for (j, b) in other.coeffs[..=db].iter().enumerate() {
                if i + j > top {
                    break;
                }
                coeffs[i + j] += a * b;
            }
        }
        Self { coeffs, cap }
    }

    pub fn scale(&self, a: C64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
            cap: self.cap,
        }
    }

    /// `self += a · x`. The cap grows to the larger of the two.
    pub fn axpy(&mut self, a: C64, x: &Self) {
        self.cap = self.cap.max(x.cap);
        if self.coeffs.len() < x.coeffs.len() {
            self.coeffs.resize(x.coeffs.len(), ZERO);
        }
        for (s, v) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *s += a * v;
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(ONE, other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-ONE, other);
        out
    }

    /// Re-caps the series, failing if nonzero mass lies above the new cap.
    pub fn with_cap(&self, cap: usize) -> Result<Self> {
        Self::new(self.coeffs.clone(), cap)
    }

    /// Keeps coefficients up to `cap` and returns the norm of what was dropped.
    pub fn truncate(&self, cap: usize) -> (Self, f64) {
        let keep = self.coeffs.len().min(cap + 1);
        let tail: f64 = self.coeffs[keep..].iter().map(|c| c.norm_sqr()).sum();
        (
            Self {
                coeffs: self.coeffs[..keep].to_vec(),
                cap,
            },
            tail.sqrt(),
        )
    }

    /// Horner evaluation at a point of the closed disc.
    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|j| (self.coeff(j) - other.coeff(j)).norm())
            .fold(0.0, f64::max)
    }

    /// Coefficients of `z^j` for `j` in `0..=cap` as a dense vector.
    pub fn dense(&self) -> Vec<C64> {
        let mut v = self.coeffs.clone();
        v.resize(self.cap + 1, ZERO);
        v
    }
}

pub fn inner_product(f: &TaylorPoly, g: &TaylorPoly) -> C64 {
    f.inner(g)
}

pub fn shift_pow(f: &TaylorPoly, k: usize) -> Result<TaylorPoly> {
    f.shift_pow(k)
}

pub fn coshift_pow(f: &TaylorPoly, k: usize) -> TaylorPoly {
    f.coshift_pow(k)
}

pub fn mul(f: &TaylorPoly, g: &TaylorPoly) -> Result<TaylorPoly> {
    f.mul(g)
}
