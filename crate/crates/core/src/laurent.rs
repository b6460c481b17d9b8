//! Matrices of Laurent polynomials, read as functions on the unit circle.
//!
//! These carry the inner matrices `Θ`, the block matrices `Σ_{m,γ}^k`, and the
//! boundary products `Θ*ΣΘ` whose analyticity decides invariance.

use std::fmt;

use crate::error::{Error, Result};
use crate::series::{TaylorPoly, C64, ONE, ZERO};
use crate::veclift::VectorPoly;

/// `Σ_e c_e z^e` for `e` in `lo .. lo + coeffs.len()`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LaurentPoly {
    lo: i64,
    coeffs: Vec<C64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(lo: i64, coeffs: Vec<C64>) -> Self {
        Self { lo, coeffs }.trimmed()
    }

    pub fn constant(c: C64) -> Self {
        Self::new(0, vec![c])
    }

    pub fn monomial(exponent: i64, c: C64) -> Self {
        Self::new(exponent, vec![c])
    }

    pub fn from_taylor(f: &TaylorPoly) -> Self {
        Self::new(0, f.coeffs().to_vec())
    }

    fn trimmed(mut self) -> Self {
        let Some(last) = self.coeffs.iter().rposition(|c| c.norm_sqr() > 0.0) else {
            return Self::default();
        };
        self.coeffs.truncate(last + 1);
        let first = self.coeffs.iter().position(|c| c.norm_sqr() > 0.0).unwrap();
        self.coeffs.drain(..first);
        self.lo += first as i64;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, e: i64) -> C64 {
        let i = e - self.lo;
        if i < 0 {
            return ZERO;
        }
        self.coeffs.get(i as usize).copied().unwrap_or(ZERO)
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn min_index(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.lo)
    }

    pub fn max_index(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.lo + self.coeffs.len() as i64 - 1)
    }

    /// Nonzero `(exponent, coefficient)` pairs in ascending order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm_sqr() > 0.0)
            .map(move |(i, c)| (self.lo + i as i64, *c))
    }

    /// Largest magnitude among coefficients of negative index.
    pub fn max_negative(&self) -> f64 {
        self.terms()
            .filter(|(e, _)| *e < 0)
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::new(self.lo + other.lo, coeffs)
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let lo = self.lo.min(other.lo);
        let hi = self.max_index().unwrap().max(other.max_index().unwrap());
        let coeffs = (lo..=hi).map(|e| self.coeff(e) + other.coeff(e)).collect();
        Self::new(lo, coeffs)
    }

    pub fn scale(&self, a: C64) -> Self {
        Self::new(self.lo, self.coeffs.iter().map(|c| c * a).collect())
    }

    /// Boundary conjugate: `conj(p(ζ))` for `|ζ| = 1`.
    pub fn conj_on_circle(&self) -> Self {
        let Some(hi) = self.max_index() else {
            return Self::zero();
        };
        let coeffs = self.coeffs.iter().rev().map(|c| c.conj()).collect();
        Self::new(-hi, coeffs)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.terms().map(|(e, c)| c * z.powi(e as i32)).sum()
    }

    /// Drops negative indices and re-caps as a Taylor series.
    pub fn analytic_part(&self, cap: usize) -> Result<TaylorPoly> {
        let Some(hi) = self.max_index() else {
            return Ok(TaylorPoly::zero(cap));
        };
        if hi < 0 {
            return Ok(TaylorPoly::zero(cap));
        }
        let coeffs = (0..=hi).map(|e| self.coeff(e)).collect();
        TaylorPoly::new(coeffs, cap)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let lo = self.min_index().into_iter().chain(other.min_index()).min();
        let hi = self.max_index().into_iter().chain(other.max_index()).max();
        match (lo, hi) {
            (Some(lo), Some(hi)) => (lo..=hi)
                .map(|e| (self.coeff(e) - other.coeff(e)).norm())
                .fold(0.0, f64::max),
            _ => 0.0,
        }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coef = if c.im == 0.0 {
                format!("{}", c.re)
            } else {
                format!("({}{:+}i)", c.re, c.im)
            };
            match e {
                0 => write!(f, "{coef}")?,
                1 => write!(f, "{coef}z")?,
                _ => write!(f, "{coef}z^{e}")?,
            }
        }
        Ok(())
    }
}

/// Outcome of an analyticity test with its falsification evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticityReport {
    pub analytic: bool,
    /// Largest magnitude over all negative-index coefficients.
    pub witness: f64,
    /// `(row, col, exponent)` of that coefficient, if any is nonzero.
    pub location: Option<(usize, usize, i64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerReport {
    pub inner: bool,
    /// Max coefficient deviation of `Θ*Θ` from the constant identity.
    pub deviation: f64,
}

/// Row-major matrix of Laurent polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<LaurentPoly>,
}

impl LaurentMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<LaurentPoly>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![LaurentPoly::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            out.set(i, i, LaurentPoly::constant(ONE));
        }
        out
    }

    /// Constant matrix from row slices.
    pub fn constant(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged constant matrix".into()));
        }
        let entries = rows
            .iter()
            .flatten()
            .map(|&v| LaurentPoly::constant(v))
            .collect();
        Self::new(r, c, entries)
    }

    pub fn diag(entries: Vec<LaurentPoly>) -> Self {
        let n = entries.len();
        let mut out = Self::zeros(n, n);
        for (i, e) in entries.into_iter().enumerate() {
            out.set(i, i, e);
        }
        out
    }

    /// Column vector from Taylor series.
    pub fn column(entries: &[TaylorPoly]) -> Self {
        Self {
            rows: entries.len(),
            cols: 1,
            entries: entries.iter().map(LaurentPoly::from_taylor).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: LaurentPoly) {
        self.entries[i * self.cols + j] = p;
    }

    /// Largest `|exponent|` over all entries.
    pub fn band(&self) -> i64 {
        self.entries
            .iter()
            .flat_map(|p| p.min_index().into_iter().chain(p.max_index()))
            .map(i64::abs)
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, a: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|p| p.scale(a)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("matrix difference".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(&b.scale(-ONE)))
            .collect();
        Self::new(self.rows, self.cols, entries)
    }

    /// Boundary adjoint: transpose with each entry conjugated on the circle.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.entry(i, j).conj_on_circle());
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = LaurentPoly::zero();
                for t in 0..self.cols {
                    let a = self.entry(i, t);
                    let b = other.entry(t, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// True iff every negative-index coefficient is at most `tol` in magnitude.
    pub fn is_analytic(&self, tol: f64) -> AnalyticityReport {
        let mut witness = 0.0;
        let mut location = None;
        for i in 0..self.rows {
            for j in 0..self.cols {
                for (e, c) in self.entry(i, j).terms().filter(|(e, _)| *e < 0) {
                    if c.norm() > witness {
                        witness = c.norm();
                        location = Some((i, j, e));
                    }
                }
            }
        }
        AnalyticityReport {
            analytic: witness <= tol,
            witness,
            location,
        }
    }

    /// `Θ*Θ = I` as Laurent series. `Θ` itself must be analytic.
    pub fn is_inner(&self, tol: f64) -> Result<InnerReport> {
        let own = self.is_analytic(tol);
        if !own.analytic {
            return Err(Error::NotAnalytic {
                witness: own.witness,
            });
        }
        let gram = self.adjoint().matmul(self)?;
        let identity = Self::identity(self.cols);
        let deviation = gram.max_abs_diff(&identity);
        Ok(InnerReport {
            inner: deviation <= tol,
            deviation,
        })
    }

    /// Right-multiplies by a constant matrix.
    pub fn mul_constant_right(&self, v: &[Vec<C64>]) -> Result<Self> {
        self.matmul(&Self::constant(v)?)
    }

    /// Analytic action on a vector of series; the output keeps `F`'s cap.
    pub fn apply(&self, f: &VectorPoly) -> Result<VectorPoly> {
        let report = self.is_analytic(0.0);
        if !report.analytic {
            return Err(Error::NotAnalytic {
                witness: report.witness,
            });
        }
        if f.arity() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix applied to arity {}",
                self.rows,
                self.cols,
                f.arity()
            )));
        }
        let cap = f.cap();
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = TaylorPoly::zero(cap);
            for j in 0..self.cols {
                let a = self.entry(i, j).analytic_part(cap.max(self.band() as usize))?;
                acc.axpy(ONE, &a.mul(f.component(j))?.with_cap(cap)?);
            }
            out.push(acc.with_cap(cap)?);
        }
        VectorPoly::new(out)
    }

    /// Analytic Toeplitz compression of the adjoint: `P_+(A* F)`, exact.
    pub fn apply_adjoint_toeplitz(&self, f: &VectorPoly) -> Result<VectorPoly> {
        if f.arity() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "adjoint of {}x{} matrix applied to arity {}",
                self.rows,
                self.cols,
                f.arity()
            )));
        }
        let cap = f.cap();
        let mut out = Vec::with_capacity(self.cols);
        for i in 0..self.cols {
            let mut acc = LaurentPoly::zero();
            for j in 0..self.rows {
                let conj = self.entry(j, i).conj_on_circle();
                acc = acc.add(&conj.mul(&LaurentPoly::from_taylor(f.component(j))));
            }
            out.push(acc.analytic_part(cap)?);
        }
        VectorPoly::new(out)
    }

    /// Pointwise value on the plane (`z ≠ 0` when negative indices occur).
    pub fn eval(&self, z: C64) -> Vec<C64> {
        self.entries.iter().map(|p| p.eval(z)).collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }

    /// Squared coefficient norm summed over all entries.
    pub fn coeff_norm_sqr(&self) -> f64 {
        self.entries
            .iter()
            .flat_map(|p| p.terms())
            .map(|(_, c)| c.norm_sqr())
            .sum()
    }
}

impl fmt::Display for LaurentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| self.entry(i, j).to_string())
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `Σ_{m,γ}^k`: `z^{k+1} I_γ` in the top-right block, `z^k I_{m−γ}` bottom-left.
pub fn build_sigma(m: usize, gamma: usize, k: usize) -> Result<LaurentMatrix> {
    if m < 2 || gamma == 0 || gamma >= m || k == 0 {
        return Err(Error::ParamOutOfRange(format!(
            "sigma needs m >= 2, 1 <= gamma < m, k >= 1 (got m={m}, gamma={gamma}, k={k})"
        )));
    }
    let mut out = LaurentMatrix::zeros(m, m);
    for i in 0..gamma {
        out.set(i, m - gamma + i, LaurentPoly::monomial(k as i64 + 1, ONE));
    }
    for i in 0..m - gamma {
        out.set(gamma + i, i, LaurentPoly::monomial(k as i64, ONE));
    }
    Ok(out)
}
