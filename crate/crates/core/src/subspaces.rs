//! Finite models of closed subspaces of H².
//!
//! [`SpanSubspace`] keeps an orthonormal frame of a degree-capped span;
//! [`MonomialSubspace`] describes spans of monomials `z^e` for `e` in a set
//! closed under a numerical semigroup, decided exactly up to a cap.

use std::collections::BTreeSet;

use crate::element::HardyElement;
use crate::error::{Error, Result};
use crate::series::{TaylorPoly, C64, ONE};

pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Orthonormal frame for the span of a list of generators.
#[derive(Debug, Clone)]
pub struct SpanSubspace<E: HardyElement> {
    generators: Vec<E>,
    frame: Vec<E>,
    dropped: Vec<usize>,
    origin: E,
    rank_tol: f64,
}

impl<E: HardyElement> SpanSubspace<E> {
    /// Modified Gram–Schmidt in input order. A generator whose residual falls
    /// below `rank_tol` times the largest generator norm is dropped and listed
    /// in [`dropped`](Self::dropped).
    pub fn orthonormalize(generators: Vec<E>, rank_tol: f64) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(Error::EmptyInput);
        };
        let (arity, cap) = (first.arity(), first.cap());
        if generators
            .iter()
            .any(|g| g.arity() != arity || g.cap() != cap)
        {
            return Err(Error::DimensionMismatch(
                "generators must share arity and cap".into(),
            ));
        }
        let origin = first.zero_like();
        let scale = generators.iter().map(E::norm).fold(0.0, f64::max);
        let threshold = rank_tol * scale;
        let mut frame: Vec<E> = Vec::new();
        let mut dropped = Vec::new();
        for (i, g) in generators.iter().enumerate() {
            let mut r = g.clone();
            orthogonalize(&mut r, &frame);
            orthogonalize(&mut r, &frame);
            let n = r.norm();
            if n <= threshold || n == 0.0 {
                dropped.push(i);
            } else {
                frame.push(r.scale(C64::new(1.0 / n, 0.0)));
            }
        }
        Ok(Self {
            generators,
            frame,
            dropped,
            origin,
            rank_tol,
        })
    }

    /// The zero subspace of the workspace that `template` lives in.
    pub fn zero(template: &E, rank_tol: f64) -> Self {
        Self {
            generators: Vec::new(),
            frame: Vec::new(),
            dropped: Vec::new(),
            origin: template.zero_like(),
            rank_tol,
        }
    }

    /// Wraps vectors already known to be orthonormal.
    fn from_frame(frame: Vec<E>, origin: E, rank_tol: f64) -> Self {
        Self {
            generators: frame.clone(),
            frame,
            dropped: Vec::new(),
            origin,
            rank_tol,
        }
    }

    pub fn dim(&self) -> usize {
        self.frame.len()
    }

    pub fn is_zero(&self) -> bool {
        self.frame.is_empty()
    }

    pub fn frame(&self) -> &[E] {
        &self.frame
    }

    pub fn generators(&self) -> &[E] {
        &self.generators
    }

    /// Input positions of generators removed as linearly dependent.
    pub fn dropped(&self) -> &[usize] {
        &self.dropped
    }

    pub fn arity(&self) -> usize {
        self.origin.arity()
    }

    pub fn cap(&self) -> usize {
        self.origin.cap()
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    /// A zero element of the workspace.
    pub fn origin(&self) -> &E {
        &self.origin
    }

    /// `(P_M f, ‖f − P_M f‖)`.
    pub fn project(&self, f: &E) -> (E, f64) {
        let mut p = self.origin.clone();
        for u in &self.frame {
            p.axpy(f.inner(u), u);
        }
        let mut r = f.clone();
        r.axpy(-ONE, &p);
        let residual = r.norm();
        (p, residual)
    }

    pub fn residual(&self, f: &E) -> f64 {
        self.project(f).1
    }

    pub fn contains(&self, f: &E, tol: f64) -> bool {
        self.residual(f) <= tol
    }

    /// `{g ∈ M : ⟨g, v⟩ = 0 for every listed v}`, computed as
    /// `M ⊖ span{P_M v}`.
    pub fn orthogonal_within(&self, vectors: &[E]) -> Self {
        let probes: Vec<E> = vectors.iter().map(|v| self.project(v).0).collect();
        let removed = pivoted_basis(probes, &[], None, self.rank_tol);
        let count = self.dim().saturating_sub(removed.len());
        let kept = pivoted_basis(self.frame.clone(), &removed, Some(count), 0.0);
        Self::from_frame(kept, self.origin.clone(), self.rank_tol)
    }

    /// `{g ∈ M : coefficient (component, index) of g vanishes for every listed
    /// coordinate}`. Coordinates above the cap are ignored. The listed
    /// coefficients of the result are exact zeros, not round-off.
    pub fn annihilate(&self, coords: &[(usize, usize)]) -> Result<Self> {
        let coords: Vec<_> = coords
            .iter()
            .copied()
            .filter(|&(_, index)| index <= self.cap())
            .collect();
        let units = coords
            .iter()
            .map(|&(component, index)| self.origin.unit_like(component, index))
            .collect::<Result<Vec<_>>>()?;
        let mut out = self.orthogonal_within(&units);
        for v in out.frame.iter_mut().chain(out.generators.iter_mut()) {
            for &(component, index) in &coords {
                v.clear(component, index);
            }
        }
        Ok(out)
    }

    /// `M ∩ S^k H²`: members whose first `k` coefficients vanish in every
    /// component.
    pub fn intersect_shifted(&self, k: usize) -> Result<Self> {
        let coords: Vec<_> = (0..self.arity())
            .flat_map(|c| (0..k.min(self.cap() + 1)).map(move |i| (c, i)))
            .collect();
        self.annihilate(&coords)
    }

    /// Members whose coefficients above `degree` vanish in every component.
    pub fn restrict_degree(&self, degree: usize) -> Result<Self> {
        let coords: Vec<_> = (0..self.arity())
            .flat_map(|c| (degree + 1..=self.cap()).map(move |i| (c, i)))
            .collect();
        self.annihilate(&coords)
    }

    /// `M ⊖ N` for `N ⊆ M`; the result has dimension `dim M − dim N` exactly.
    pub fn ortho_complement_within(&self, sub: &Self) -> Result<Self> {
        for v in &sub.frame {
            let r = self.residual(v);
            if r > self.rank_tol.max(sub.rank_tol) {
                return Err(Error::NotASubspaceOf { residual: r });
            }
        }
        let count = self.dim().saturating_sub(sub.dim());
        let kept = pivoted_basis(self.frame.clone(), &sub.frame, Some(count), 0.0);
        Ok(Self::from_frame(kept, self.origin.clone(), self.rank_tol))
    }

    /// Moves to a smaller cap, dropping whatever lies above it. Meant for
    /// spaces already restricted to that degree.
    pub fn recapped(&self, cap: usize) -> Result<Self> {
        let origin = self.origin.truncated(cap);
        if self.frame.is_empty() {
            return Ok(Self::zero(&origin, self.rank_tol));
        }
        let gens = self.frame.iter().map(|u| u.truncated(cap)).collect();
        Self::orthonormalize(gens, self.rank_tol)
    }

    /// Orthogonal complement of `M` inside the whole capped workspace.
    pub fn complement_in_workspace(&self) -> Result<Self> {
        let mut units = Vec::new();
        for c in 0..self.arity() {
            for i in 0..=self.cap() {
                units.push(self.origin.unit_like(c, i)?);
            }
        }
        let count = units.len().saturating_sub(self.dim());
        let kept = pivoted_basis(units, &self.frame, Some(count), 0.0);
        Ok(Self::from_frame(kept, self.origin.clone(), self.rank_tol))
    }

    /// Gram matrix `⟨f_i, f_j⟩` of a list of elements.
    pub fn gram(elements: &[E]) -> Vec<Vec<C64>> {
        elements
            .iter()
            .map(|a| elements.iter().map(|b| a.inner(b)).collect())
            .collect()
    }

    /// Max deviation of the frame's Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = Self::gram(&self.frame);
        let mut worst: f64 = 0.0;
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = if i == j { ONE } else { C64::new(0.0, 0.0) };
                worst = worst.max((v - target).norm());
            }
        }
        worst
    }
}

/// Subtracts the components of `r` along an orthonormal list.
pub(crate) fn orthogonalize<E: HardyElement>(r: &mut E, basis: &[E]) {
    for u in basis {
        let c = r.inner(u);
        r.axpy(-c, u);
    }
}

/// Column-pivoted Gram–Schmidt: orthogonalizes `candidates` against the
/// orthonormal list `against`, then repeatedly takes the candidate with the
/// largest residual. Stops after `count` picks, or when the best residual is
/// at most `tol`. Ties go to the lowest index.
pub(crate) fn pivoted_basis<E: HardyElement>(
    mut candidates: Vec<E>,
    against: &[E],
    count: Option<usize>,
    tol: f64,
) -> Vec<E> {
    for c in candidates.iter_mut() {
        orthogonalize(c, against);
        orthogonalize(c, against);
    }
    let limit = count.unwrap_or(candidates.len()).min(candidates.len());
    let mut picked: Vec<E> = Vec::with_capacity(limit);
    let mut used = vec![false; candidates.len()];
    while picked.len() < limit {
        let mut best = None;
        let mut best_norm = -1.0;
        for (i, c) in candidates.iter().enumerate() {
            if used[i] {
                continue;
            }
            let n = c.norm();
            if n > best_norm {
                best_norm = n;
                best = Some(i);
            }
        }
        let Some(i) = best else { break };
        if best_norm <= tol || best_norm == 0.0 {
            break;
        }
        used[i] = true;
        let mut u = candidates[i].clone();
        orthogonalize(&mut u, against);
        orthogonalize(&mut u, &picked);
        let n = u.norm();
        if n == 0.0 {
            continue;
        }
        let u = u.scale(C64::new(1.0 / n, 0.0));
        for (j, c) in candidates.iter_mut().enumerate() {
            if !used[j] {
                let coef = c.inner(&u);
                c.axpy(-coef, &u);
            }
        }
        picked.push(u);
    }
    picked
}

/// Span of `z^e` for exponents in the semigroup generated by
/// `semigroup_generators` (always containing 0) plus `exceptional`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialSubspace {
    generators: Vec<usize>,
    exceptional: BTreeSet<usize>,
    cap: usize,
    members: Vec<bool>,
}

impl MonomialSubspace {
    pub fn new(generators: &[usize], exceptional: &[usize], cap: usize) -> Result<Self> {
        if generators.contains(&0) {
            return Err(Error::ParamOutOfRange(
                "semigroup generators must be positive".into(),
            ));
        }
        let mut gens = generators.to_vec();
        gens.sort_unstable();
        gens.dedup();
        let mut members = vec![false; cap + 1];
        members[0] = true;
        for e in 1..=cap {
            members[e] = gens.iter().any(|&g| g <= e && members[e - g]);
        }
        let exceptional: BTreeSet<usize> = exceptional.iter().copied().collect();
        for &e in &exceptional {
            if e > cap {
                return Err(Error::OutOfCap { exponent: e, cap });
            }
            members[e] = true;
        }
        Ok(Self {
            generators: gens,
            exceptional,
            cap,
            members,
        })
    }

    pub fn semigroup_generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn exceptional(&self) -> &BTreeSet<usize> {
        &self.exceptional
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn membership(&self, e: usize) -> Result<bool> {
        self.members
            .get(e)
            .copied()
            .ok_or(Error::OutOfCap {
                exponent: e,
                cap: self.cap,
            })
    }

    /// Member exponents in ascending order.
    pub fn exponents(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(e, _)| e)
    }

    /// The same space as a capped span frame.
    pub fn to_span(&self, rank_tol: f64) -> Result<SpanSubspace<TaylorPoly>> {
        let gens = self
            .exponents()
            .map(|e| TaylorPoly::monomial(e, self.cap))
            .collect::<Result<Vec<_>>>()?;
        SpanSubspace::orthonormalize(gens, rank_tol)
    }
}

/// Either description of a scalar subspace.
#[derive(Debug, Clone)]
pub enum SubspaceModel {
    Span(SpanSubspace<TaylorPoly>),
    Monomial(MonomialSubspace),
}

impl SubspaceModel {
    pub fn cap(&self) -> usize {
        match self {
            Self::Span(s) => s.cap(),
            Self::Monomial(m) => m.cap(),
        }
    }

    /// The span form, converting a monomial set if needed.
    pub fn to_span(&self, rank_tol: f64) -> Result<SpanSubspace<TaylorPoly>> {
        match self {
            Self::Span(s) => Ok(s.clone()),
            Self::Monomial(m) => m.to_span(rank_tol),
        }
    }
}

pub fn orthonormalize<E: HardyElement>(generators: Vec<E>) -> Result<SpanSubspace<E>> {
    SpanSubspace::orthonormalize(generators, DEFAULT_RANK_TOL)
}

pub fn monomial_membership(e: usize, m: &MonomialSubspace) -> Result<bool> {
    m.membership(e)
}
