//! Vector-valued truncated series and the interleaving lift
//! `T_m(f_0, …, f_{m-1}) = Σ_l z^l f_l(z^m)`.
//!
//! The lift is pure index arithmetic: coefficient `j` of component `l` lands at
//! index `m·j + l` of the scalar series. It is an exact isometry and carries the
//! vector shift `S` to the scalar power `S^m`.

use crate::error::{Error, Result};
use crate::series::{TaylorPoly, C64, ONE, ZERO};

/// An `m`-tuple of series sharing one cap.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorPoly {
    components: Vec<TaylorPoly>,
    cap: usize,
}

impl VectorPoly {
    pub fn new(components: Vec<TaylorPoly>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::ParamOutOfRange("vector arity must be >= 1".into()));
        };
        let cap = first.cap();
        if components.iter().any(|c| c.cap() != cap) {
            return Err(Error::DimensionMismatch(
                "vector components must share one cap".into(),
            ));
        }
        Ok(Self { components, cap })
    }

    pub fn zero(arity: usize, cap: usize) -> Self {
        Self {
            components: vec![TaylorPoly::zero(cap); arity.max(1)],
            cap,
        }
    }

    /// `z^degree · δ_component`.
    pub fn unit(arity: usize, cap: usize, component: usize, degree: usize) -> Result<Self> {
        let mut v = Self::zero(arity, cap);
        v.components[component] = TaylorPoly::monomial(degree, cap)?;
        Ok(v)
    }

    /// Constant vector with the given entries.
    pub fn constant(values: &[C64], cap: usize) -> Self {
        Self {
            components: values
                .iter()
                .map(|&c| TaylorPoly::constant(c, cap))
                .collect(),
            cap,
        }
    }

    pub(crate) fn clear(&mut self, component: usize, index: usize) {
        self.components[component].clear(index);
    }

    pub fn arity(&self) -> usize {
        self.components.len()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn components(&self) -> &[TaylorPoly] {
        &self.components
    }

    pub fn component(&self, l: usize) -> &TaylorPoly {
        &self.components[l]
    }

    pub fn into_components(self) -> Vec<TaylorPoly> {
        self.components
    }

    pub fn deg(&self) -> Option<usize> {
        self.components.iter().filter_map(TaylorPoly::deg).max()
    }

    /// Summed in the interleaved order of `T_m`, so the lift preserves the
    /// computed norm bit for bit.
    pub fn norm_sqr(&self) -> f64 {
        let len = self.components.iter().map(|c| c.coeffs().len()).max().unwrap_or(0);
        let mut acc = 0.0;
        for j in 0..len {
            for c in &self.components {
                acc += c.coeff(j).norm_sqr();
            }
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.inner(b))
            .sum()
    }

    pub fn shift_pow(&self, k: usize) -> Result<Self> {
        let components = self
            .components
            .iter()
            .map(|c| c.shift_pow(k))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            components,
            cap: self.cap,
        })
    }

    pub fn coshift_pow(&self, k: usize) -> Self {
        Self {
            components: self.components.iter().map(|c| c.coshift_pow(k)).collect(),
            cap: self.cap,
        }
    }

    pub fn scale(&self, a: C64) -> Self {
        Self {
            components: self.components.iter().map(|c| c.scale(a)).collect(),
            cap: self.cap,
        }
    }

    pub fn axpy(&mut self, a: C64, x: &Self) {
        self.cap = self.cap.max(x.cap);
        for (s, v) in self.components.iter_mut().zip(&x.components) {
            s.axpy(a, v);
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-ONE, other);
        out
    }

    pub fn with_cap(&self, cap: usize) -> Result<Self> {
        let components = self
            .components
            .iter()
            .map(|c| c.with_cap(cap))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { components, cap })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}

/// Component cap that lifts into a scalar workspace of cap `scalar_cap`
/// without losing or overflowing any index.
pub fn component_cap(scalar_cap: usize, m: usize) -> usize {
    ((scalar_cap + 1) / m).saturating_sub(1)
}

/// `T_m(F) = Σ_l z^l F_l(z^m)` into a scalar series of cap `out_cap`.
pub fn t_m_apply(f: &VectorPoly, out_cap: usize) -> Result<TaylorPoly> {
    let m = f.arity();
    let mut needed = 0usize;
    for (l, c) in f.components.iter().enumerate() {
        if let Some(d) = c.deg() {
            needed = needed.max(m * d + l);
        }
    }
    if needed > out_cap {
        return Err(Error::BudgetExceeded {
            needed,
            cap: out_cap,
        });
    }
    let mut coeffs = vec![ZERO; needed + 1];
    for (l, c) in f.components.iter().enumerate() {
        for (j, v) in c.coeffs().iter().enumerate() {
            if m * j + l <= needed {
                coeffs[m * j + l] = *v;
            }
        }
    }
    TaylorPoly::new(coeffs, out_cap)
}

/// De-interleaves `f` into `m` components of cap `⌊cap/m⌋`.
pub fn t_m_invert(f: &TaylorPoly, m: usize) -> Result<VectorPoly> {
    if m == 0 {
        return Err(Error::ParamOutOfRange("lift arity must be >= 1".into()));
    }
    let cap = f.cap() / m;
    let mut parts = vec![Vec::new(); m];
    for (i, v) in f.coeffs().iter().enumerate() {
        let (j, l) = (i / m, i % m);
        let part = &mut parts[l];
        if part.len() <= j {
            part.resize(j + 1, ZERO);
        }
        part[j] = *v;
    }
    let components = parts
        .into_iter()
        .map(|p| TaylorPoly::new(p, cap))
        .collect::<Result<Vec<_>>>()?;
    VectorPoly::new(components)
}

/// `‖T_m(S F) − S^m T_m(F)‖` in a scalar workspace of cap `out_cap`.
pub fn check_shift_diagram(f: &VectorPoly, out_cap: usize) -> Result<f64> {
    let m = f.arity();
    let grown = f.with_cap(f.cap() + 1)?;
    let left = t_m_apply(&grown.shift_pow(1)?, out_cap)?;
    let right = t_m_apply(f, out_cap)?.shift_pow(m)?;
    Ok(left.sub(&right).norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[f64], cap: usize) -> TaylorPoly {
        TaylorPoly::from_real(c, cap).unwrap()
    }

    fn v(parts: &[&[f64]], cap: usize) -> VectorPoly {
        VectorPoly::new(parts.iter().map(|c| p(c, cap)).collect()).unwrap()
    }

    #[test]
    fn lift_examples() {
        let one_plus_z = t_m_apply(&v(&[&[1.0], &[1.0]], 8), 16).unwrap();
        assert_eq!(one_plus_z.max_abs_diff(&p(&[1.0, 1.0], 16)), 0.0);

        let g = t_m_apply(&v(&[&[1.0, 4.0], &[7.0]], 8), 16).unwrap();
        assert_eq!(g.max_abs_diff(&p(&[1.0, 7.0, 4.0], 16)), 0.0);

        let h = t_m_apply(&v(&[&[1.0], &[0.0, 1.0], &[0.0, 1.0]], 8), 16).unwrap();
        assert_eq!(h.max_abs_diff(&p(&[1.0, 0.0, 0.0, 0.0, 1.0, 1.0], 16)), 0.0);
    }

    #[test]
    fn invert_examples() {
        let a = t_m_invert(&p(&[1.0, 1.0], 8), 2).unwrap();
        assert_eq!(a.max_abs_diff(&v(&[&[1.0], &[1.0]], 4)), 0.0);

        let b = t_m_invert(&p(&[1.0, 7.0, 4.0], 8), 2).unwrap();
        assert_eq!(b.max_abs_diff(&v(&[&[1.0, 4.0], &[7.0]], 4)), 0.0);

        let c = t_m_invert(&TaylorPoly::monomial(5, 8).unwrap(), 3).unwrap();
        assert_eq!(c.max_abs_diff(&v(&[&[], &[], &[0.0, 1.0]], 2)), 0.0);
    }

    #[test]
    fn lift_budget() {
        let f = v(&[&[0.0, 0.0, 1.0], &[]], 4);
        assert!(t_m_apply(&f, 3).is_err());
        assert!(t_m_apply(&f, 4).is_ok());
    }

    #[test]
    fn shift_diagram_examples() {
        assert_eq!(check_shift_diagram(&v(&[&[1.0], &[1.0]], 8), 32).unwrap(), 0.0);
        assert_eq!(
            check_shift_diagram(&v(&[&[0.0, 1.0], &[], &[1.0]], 8), 32).unwrap(),
            0.0
        );
    }

    #[test]
    fn component_cap_is_bijective_window() {
        assert_eq!(component_cap(11, 3), 3);
        assert_eq!(component_cap(12, 3), 3);
        assert_eq!(component_cap(63, 2), 31);
    }
}
