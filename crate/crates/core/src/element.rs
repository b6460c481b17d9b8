//! Common surface for scalar and vector Hardy-space elements, so that span
//! frames, projections and invariance checks work on either.

use crate::error::Result;
use crate::series::{TaylorPoly, C64};
use crate::veclift::VectorPoly;

pub trait HardyElement: Clone + Send + Sync + std::fmt::Debug {
    fn arity(&self) -> usize;
    fn cap(&self) -> usize;
    fn zero_like(&self) -> Self;
    /// `z^degree δ_component` in the same workspace.
    fn unit_like(&self, component: usize, degree: usize) -> Result<Self>;
    fn inner(&self, other: &Self) -> C64;
    fn axpy(&mut self, a: C64, x: &Self);
    fn scale(&self, a: C64) -> Self;
    fn coeff(&self, component: usize, index: usize) -> C64;
    fn shift_pow(&self, k: usize) -> Result<Self>;
    fn coshift_pow(&self, k: usize) -> Self;
    /// Sets one coefficient to exactly zero.
    fn clear(&mut self, component: usize, index: usize);
    /// Drops coefficients above `cap` and moves to that cap.
    fn truncated(&self, cap: usize) -> Self;
    /// Coefficients as `[component][index]`, trailing zeros trimmed.
    fn coefficient_lists(&self) -> Vec<Vec<C64>>;

    fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }
}

impl HardyElement for TaylorPoly {
    fn arity(&self) -> usize {
        1
    }
    fn cap(&self) -> usize {
        TaylorPoly::cap(self)
    }
    fn zero_like(&self) -> Self {
        TaylorPoly::zero(TaylorPoly::cap(self))
    }
    fn unit_like(&self, _component: usize, degree: usize) -> Result<Self> {
        TaylorPoly::monomial(degree, TaylorPoly::cap(self))
    }
    fn inner(&self, other: &Self) -> C64 {
        TaylorPoly::inner(self, other)
    }
    fn axpy(&mut self, a: C64, x: &Self) {
        TaylorPoly::axpy(self, a, x)
    }
    fn scale(&self, a: C64) -> Self {
        TaylorPoly::scale(self, a)
    }
    fn coeff(&self, _component: usize, index: usize) -> C64 {
        TaylorPoly::coeff(self, index)
    }
    fn shift_pow(&self, k: usize) -> Result<Self> {
        TaylorPoly::shift_pow(self, k)
    }
    fn coshift_pow(&self, k: usize) -> Self {
        TaylorPoly::coshift_pow(self, k)
    }
    fn clear(&mut self, _component: usize, index: usize) {
        TaylorPoly::clear(self, index)
    }
    fn truncated(&self, cap: usize) -> Self {
        self.truncate(cap).0
    }
    fn coefficient_lists(&self) -> Vec<Vec<C64>> {
        vec![trimmed(self)]
    }
}

impl HardyElement for VectorPoly {
    fn arity(&self) -> usize {
        VectorPoly::arity(self)
    }
    fn cap(&self) -> usize {
        VectorPoly::cap(self)
    }
    fn zero_like(&self) -> Self {
        VectorPoly::zero(VectorPoly::arity(self), VectorPoly::cap(self))
    }
    fn unit_like(&self, component: usize, degree: usize) -> Result<Self> {
        VectorPoly::unit(VectorPoly::arity(self), VectorPoly::cap(self), component, degree)
    }
    fn inner(&self, other: &Self) -> C64 {
        VectorPoly::inner(self, other)
    }
    fn axpy(&mut self, a: C64, x: &Self) {
        VectorPoly::axpy(self, a, x)
    }
    fn scale(&self, a: C64) -> Self {
        VectorPoly::scale(self, a)
    }
    fn coeff(&self, component: usize, index: usize) -> C64 {
        self.component(component).coeff(index)
    }
    fn shift_pow(&self, k: usize) -> Result<Self> {
        VectorPoly::shift_pow(self, k)
    }
    fn coshift_pow(&self, k: usize) -> Self {
        VectorPoly::coshift_pow(self, k)
    }
    fn clear(&mut self, component: usize, index: usize) {
        VectorPoly::clear(self, component, index)
    }
    fn truncated(&self, cap: usize) -> Self {
        let comps = self.components().iter().map(|c| c.truncate(cap).0).collect();
        VectorPoly::new(comps).expect("components share the new cap")
    }
    fn coefficient_lists(&self) -> Vec<Vec<C64>> {
        self.components().iter().map(trimmed).collect()
    }
}

fn trimmed(p: &TaylorPoly) -> Vec<C64> {
    match p.deg() {
        Some(d) => p.coeffs()[..=d].to_vec(),
        None => Vec::new(),
    }
}
