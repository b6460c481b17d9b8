//! Finite Blaschke products, their Toeplitz operators, the model space
//! `K_B = H² ⊖ B H²`, Wold coordinates and the unitary `U`.
//!
//! `U` goes from scalar to vector functions: `B^i e_j ↦ z^i δ_j`. Composing with
//! the lift gives `T_m U`, which intertwines `T_Bⁿ` with `S^{mn}`.

use crate::error::{Error, Result};
use crate::series::{TaylorPoly, C64, ONE, ZERO};
use crate::subspaces::SpanSubspace;
use crate::veclift::{t_m_apply, t_m_invert, VectorPoly};

const UNIMODULAR_TOL: f64 = 1e-14;
const DISC_MARGIN: f64 = 1e-12;
/// Relative tail mass tolerated by [`Toeplitz::apply`] beyond the output cap.
pub const TAIL_TOL: f64 = 1e-10;

/// `λ Π (z − a_j)/(1 − ā_j z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    lambda: C64,
    zeros: Vec<C64>,
}

/// A truncated expansion together with a bound on what was cut off.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub series: TaylorPoly,
    pub tail_bound: f64,
}

impl BlaschkeProduct {
    pub fn new(lambda: C64, zeros: Vec<C64>) -> Result<Self> {
        if (lambda.norm() - 1.0).abs() > UNIMODULAR_TOL {
            return Err(Error::ParamOutOfRange(format!(
                "|lambda| = {} is not 1",
                lambda.norm()
            )));
        }
        if zeros.is_empty() {
            return Err(Error::ParamOutOfRange(
                "a Blaschke product needs at least one zero".into(),
            ));
        }
        for (index, a) in zeros.iter().enumerate() {
            if a.norm() >= 1.0 - DISC_MARGIN {
                return Err(Error::ZeroOnCircle {
                    index,
                    modulus: a.norm(),
                });
            }
        }
        Ok(Self { lambda, zeros })
    }

    /// `z^m`.
    pub fn monomial(m: usize) -> Result<Self> {
        Self::new(ONE, vec![ZERO; m])
    }

    pub fn lambda(&self) -> C64 {
        self.lambda
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// True when every zero sits at the origin, so `B = λ z^m`.
    pub fn is_monomial(&self) -> bool {
        self.zeros.iter().all(|a| a.norm_sqr() == 0.0)
    }

    /// `Bⁿ`, with the zero list repeated block by block.
    pub fn power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ParamOutOfRange("power must be >= 1".into()));
        }
        let zeros = (0..n).flat_map(|_| self.zeros.iter().copied()).collect();
        Ok(Self {
            lambda: self.lambda.powu(n as u32),
            zeros,
        })
    }

    fn max_modulus(&self) -> f64 {
        self.zeros.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.zeros
            .iter()
            .fold(self.lambda, |acc, a| acc * (z - a) / (ONE - a.conj() * z))
    }

    /// Coefficients `0..len` of `B`.
    fn coefficients(&self, len: usize) -> Vec<C64> {
        let mut acc = vec![ZERO; len];
        if len == 0 {
            return acc;
        }
        acc[0] = self.lambda;
        for &a in &self.zeros {
            acc = convolve(&acc, &factor_series(a, len), len);
        }
        acc
    }

    /// Estimated ℓ² mass of the coefficients of index `> reach`.
    fn remainder_estimate(&self, reach: usize) -> f64 {
        let r = self.max_modulus();
        if r == 0.0 {
            return 0.0;
        }
        let n = self.degree() as f64;
        let reach = reach as f64;
        let est = (reach + n).powf(n) * r.powf(reach - n + 1.0) / (1.0 - r);
        est.min(1.0)
    }

    /// Taylor expansion through degree `cap`, with tail bound
    /// `max |a_j|^{cap − m + 1}`.
    pub fn taylor_expand(&self, cap: usize) -> Result<Expansion> {
        let m = self.degree();
        if cap < m {
            return Err(Error::BudgetExceeded { needed: m, cap });
        }
        let series = TaylorPoly::new(self.coefficients(cap + 1), cap)?;
        let tail_bound = self.max_modulus().powi((cap - m + 1) as i32);
        Ok(Expansion { series, tail_bound })
    }
}

/// Coefficients of `(z − a)/(1 − ā z)`: `−a`, then `ā^{k−1}(1 − |a|²)`.
fn factor_series(a: C64, len: usize) -> Vec<C64> {
    let mut out = vec![ZERO; len];
    if len == 0 {
        return out;
    }
    out[0] = -a;
    let w = 1.0 - a.norm_sqr();
    let mut p = ONE;
    for c in out.iter_mut().skip(1) {
        *c = p * w;
        p *= a.conj();
    }
    out
}

/// Coefficients of the normalized reproducing kernel `√(1−|a|²)/(1 − ā z)`.
fn kernel_series(a: C64, len: usize) -> Vec<C64> {
    let s = (1.0 - a.norm_sqr()).sqrt();
    let mut p = C64::new(s, 0.0);
    (0..len)
        .map(|_| {
            let c = p;
            p *= a.conj();
            c
        })
        .collect()
}

fn convolve(a: &[C64], b: &[C64], len: usize) -> Vec<C64> {
    let mut out = vec![ZERO; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == ZERO {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `T_{Bⁿ}` on a workspace of cap `cap`, holding `Bⁿ` well past the cap so
/// products can report what they lose.
#[derive(Debug, Clone)]
pub struct Toeplitz {
    power: BlaschkeProduct,
    n: usize,
    cap: usize,
    coeffs: Vec<C64>,
    remainder: f64,
}

impl Toeplitz {
    pub fn new(b: &BlaschkeProduct, n: usize, cap: usize) -> Result<Self> {
        let power = b.power(n)?;
        let reach = 2 * cap + power.degree() + 64;
        let coeffs = power.coefficients(reach + 1);
        let remainder = power.remainder_estimate(reach);
        Ok(Self {
            power,
            n,
            cap,
            coeffs,
            remainder,
        })
    }

    pub fn symbol(&self) -> &BlaschkeProduct {
        &self.power
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn check_cap(&self, f: &TaylorPoly) -> Result<()> {
        if f.cap() > self.cap {
            return Err(Error::DimensionMismatch(format!(
                "operator built for cap {}, element has cap {}",
                self.cap,
                f.cap()
            )));
        }
        Ok(())
    }

    /// `‖Σ_{k>s} b_k z^k‖` for the coefficients `b_k` of `Bⁿ`.
    pub fn tail_beyond(&self, s: usize) -> f64 {
        let held: f64 = self
            .coeffs
            .iter()
            .skip(s + 1)
            .map(|c| c.norm_sqr())
            .sum();
        held.sqrt() + self.remainder
    }

    /// `Bⁿ f` cut at `f`'s cap, with the norm of the discarded part.
    pub fn apply_truncated(&self, f: &TaylorPoly) -> Result<(TaylorPoly, f64)> {
        self.check_cap(f)?;
        let cap = f.cap();
        let d = f.deg().unwrap_or(0);
        let len = d + self.coeffs.len();
        let full = convolve(f.coeffs(), &self.coeffs, len);
        let tail: f64 = full.iter().skip(cap + 1).map(|c| c.norm_sqr()).sum();
        let l1: f64 = f.coeffs().iter().map(|c| c.norm()).sum();
        let kept = TaylorPoly::new(full[..=cap.min(len - 1)].to_vec(), cap)?;
        Ok((kept, tail.sqrt() + self.remainder * l1))
    }

    /// `Bⁿ f`; refuses when the part beyond the cap is not negligible.
    pub fn apply(&self, f: &TaylorPoly) -> Result<TaylorPoly> {
        let (g, tail) = self.apply_truncated(f)?;
        let exact_zero = self.power.is_monomial() && tail == 0.0;
        if !exact_zero && tail > TAIL_TOL * f.norm().max(f64::MIN_POSITIVE) {
            let needed = f.deg().unwrap_or(0) + self.needed_reach();
            return Err(Error::BudgetExceeded {
                needed: needed.max(f.cap() + 1),
                cap: f.cap(),
            });
        }
        Ok(g)
    }

    fn needed_reach(&self) -> usize {
        (0..self.coeffs.len())
            .find(|&s| self.tail_beyond(s) <= TAIL_TOL)
            .unwrap_or(self.coeffs.len())
    }

    /// `(Bⁿ)* f`: coefficient `j` is `Σ_k conj(b_k) f_{j+k}`. Exact.
    pub fn apply_adjoint(&self, f: &TaylorPoly) -> Result<TaylorPoly> {
        self.check_cap(f)?;
        let c = f.coeffs();
        let out: Vec<C64> = (0..c.len())
            .map(|j| {
                c[j..]
                    .iter()
                    .zip(&self.coeffs)
                    .map(|(x, b)| x * b.conj())
                    .sum()
            })
            .collect();
        TaylorPoly::new(out, f.cap())
    }

    /// Largest `d` such that every `u` of degree `≤ d` loses at most
    /// `tol·‖u‖` when `Bⁿu` is cut at `cap`.
    pub fn safe_degree(&self, cap: usize, tol: f64) -> Option<usize> {
        if self.power.is_monomial() {
            return cap.checked_sub(self.power.degree());
        }
        let mut acc = 0.0;
        let mut best = None;
        for d in 0..=cap {
            let t = self.tail_beyond(cap - d);
            acc += t * t;
            if acc.sqrt() > tol {
                break;
            }
            best = Some(d);
        }
        best
    }
}

/// `T_{Bⁿ} f` or its adjoint.
pub fn toeplitz_apply(
    b: &BlaschkeProduct,
    n: usize,
    adjoint: bool,
    f: &TaylorPoly,
) -> Result<TaylorPoly> {
    let t = Toeplitz::new(b, n, f.cap())?;
    if adjoint {
        t.apply_adjoint(f)
    } else {
        t.apply(f)
    }
}

/// Takenaka–Malmquist basis of `K_B`, in the order of the zero list:
/// `e_j = √(1−|a_j|²)/(1 − ā_j z) · Π_{i<j} (z − a_i)/(1 − ā_i z)`.
pub fn model_basis(b: &BlaschkeProduct, cap: usize) -> Result<Vec<TaylorPoly>> {
    let len = cap + 1;
    let mut prefix = vec![ZERO; len];
    prefix[0] = ONE;
    let mut out = Vec::with_capacity(b.degree());
    for &a in b.zeros() {
        let e = convolve(&prefix, &kernel_series(a, len), len);
        out.push(TaylorPoly::new(e, cap)?);
        prefix = convolve(&prefix, &factor_series(a, len), len);
    }
    Ok(out)
}

/// Layer vectors `B^i e_j` for `i < depth`, cut at `cap`.
///
/// Cutting commutes with multiplication by `B`, so every stored coefficient is
/// exact; only the mass above the cap is missing.
#[derive(Debug, Clone)]
pub struct WoldFrame {
    blaschke: BlaschkeProduct,
    cap: usize,
    layers: Vec<Vec<TaylorPoly>>,
}

impl WoldFrame {
    pub fn new(b: &BlaschkeProduct, cap: usize, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::ParamOutOfRange("Wold depth must be >= 1".into()));
        }
        let bs = b.coefficients(cap + 1);
        let mut layer = model_basis(b, cap)?;
        let mut layers = Vec::with_capacity(depth);
        for _ in 0..depth {
            let next = layer
                .iter()
                .map(|e| TaylorPoly::new(convolve(e.coeffs(), &bs, cap + 1), cap))
                .collect::<Result<Vec<_>>>()?;
            layers.push(layer);
            layer = next;
        }
        Ok(Self {
            blaschke: b.clone(),
            cap,
            layers,
        })
    }

    /// Smallest depth whose layers capture every `z^t`, `t ≤ cap`, up to
    /// `tol` in norm.
    pub fn with_auto_depth(b: &BlaschkeProduct, cap: usize, tol: f64) -> Result<Self> {
        let max_depth = cap + 1;
        let full = Self::new(b, cap, max_depth)?;
        let mut covered = vec![0.0; cap + 1];
        for (i, layer) in full.layers.iter().enumerate() {
            for e in layer {
                for (t, c) in e.coeffs().iter().enumerate() {
                    covered[t] += c.norm_sqr();
                }
            }
            let worst = covered
                .iter()
                .map(|s| (1.0 - s).max(0.0).sqrt())
                .fold(0.0, f64::max);
            if worst <= tol {
                return Self::new(b, cap, i + 1);
            }
        }
        Ok(full)
    }

    pub fn blaschke(&self) -> &BlaschkeProduct {
        &self.blaschke
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// `m`, the number of model-space vectors per layer.
    pub fn arity(&self) -> usize {
        self.blaschke.degree()
    }

    pub fn model_basis(&self) -> &[TaylorPoly] {
        &self.layers[0]
    }

    /// `B^i e_j` cut at the cap.
    pub fn layer_vector(&self, i: usize, j: usize) -> &TaylorPoly {
        &self.layers[i][j]
    }

    /// Cap of the scalar workspace that `T_m U` lands in.
    pub fn lifted_cap(&self) -> usize {
        self.arity() * self.depth() - 1
    }

    /// Wold coordinates `⟨f, B^i e_j⟩` and the residual `‖f − Σ c B^i e_j‖`
    /// measured on coefficients up to the cap. For `f` in the capped space it
    /// vanishes exactly when `f` lies in the span of the layers.
    pub fn coordinates(&self, f: &TaylorPoly) -> Result<(VectorPoly, f64)> {
        if f.cap() > self.cap {
            return Err(Error::DimensionMismatch(format!(
                "frame built for cap {}, element has cap {}",
                self.cap,
                f.cap()
            )));
        }
        let m = self.arity();
        let mut parts = vec![vec![ZERO; self.depth()]; m];
        for (i, layer) in self.layers.iter().enumerate() {
            for (j, e) in layer.iter().enumerate() {
                parts[j][i] = f.inner(e);
            }
        }
        let comps = parts
            .into_iter()
            .map(|p| TaylorPoly::new(p, self.depth() - 1))
            .collect::<Result<Vec<_>>>()?;
        let coords = VectorPoly::new(comps)?;
        let residual = f.with_cap(self.cap)?.sub(&self.reassemble(&coords)?).norm();
        Ok((coords, residual))
    }

    /// Reassembles `Σ F_j[i] B^i e_j`.
    pub fn reassemble(&self, f: &VectorPoly) -> Result<TaylorPoly> {
        if f.arity() != self.arity() {
            return Err(Error::DimensionMismatch(format!(
                "frame arity {}, vector arity {}",
                self.arity(),
                f.arity()
            )));
        }
        let mut out = TaylorPoly::zero(self.cap);
        for (j, comp) in f.components().iter().enumerate() {
            for (i, &c) in comp.coeffs().iter().enumerate() {
                if c == ZERO {
                    continue;
                }
                if i >= self.depth() {
                    return Err(Error::BudgetExceeded {
                        needed: i,
                        cap: self.depth() - 1,
                    });
                }
                out.axpy(c, &self.layers[i][j]);
            }
        }
        Ok(out)
    }
}

/// Forward `U`: scalar to vector Wold coordinates.
pub fn u_apply(f: &TaylorPoly, w: &WoldFrame, tol: f64) -> Result<VectorPoly> {
    let (v, residual) = w.coordinates(f)?;
    if residual > tol {
        return Err(Error::DepthExhausted { residual });
    }
    Ok(v)
}

/// `U*`: vector coordinates back to a scalar series.
pub fn u_invert(f: &VectorPoly, w: &WoldFrame) -> Result<TaylorPoly> {
    w.reassemble(f)
}

/// `‖S^{mn} T_m U f − T_m U T_Bⁿ f‖`.
pub fn check_conjugation(
    b: &BlaschkeProduct,
    n: usize,
    f: &TaylorPoly,
    w: &WoldFrame,
    tol: f64,
) -> Result<f64> {
    let m = b.degree();
    let out_cap = m * (w.depth() + n) - 1;
    let left = t_m_apply(&u_apply(f, w, tol)?, out_cap)?.shift_pow(m * n)?;
    let moved = Toeplitz::new(b, n, w.cap())?.apply(&f.with_cap(w.cap())?)?;
    let right = t_m_apply(&u_apply(&moved, w, tol)?, out_cap)?;
    Ok(left.sub(&right).norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `T_m U`: Toeplitz picture to shift picture.
    ToShift,
    /// `U* T_m^{-1}`: shift picture to Toeplitz picture.
    ToToeplitz,
}

/// Image of `M` under `T_m U` or its inverse, frame by frame.
pub fn transfer_subspace(
    space: &SpanSubspace<TaylorPoly>,
    w: &WoldFrame,
    direction: Direction,
    tol: f64,
) -> Result<SpanSubspace<TaylorPoly>> {
    let m = w.arity();
    let target_cap = match direction {
        Direction::ToShift => w.lifted_cap(),
        Direction::ToToeplitz => w.cap(),
    };
    let images = crate::par::map(space.frame(), |f| match direction {
        Direction::ToShift => t_m_apply(&u_apply(f, w, tol)?, target_cap),
        Direction::ToToeplitz => u_invert(&t_m_invert(f, m)?, w),
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    if images.is_empty() {
        return Ok(SpanSubspace::zero(
            &TaylorPoly::zero(target_cap),
            space.rank_tol(),
        ));
    }
    SpanSubspace::orthonormalize(images, space.rank_tol())
}

/// `max_t ||Bⁿ(e^{it})| − 1|` over `samples` equispaced points.
pub fn boundary_deviation(b: &BlaschkeProduct, n: usize, samples: usize) -> Result<f64> {
    let p = b.power(n)?;
    Ok((0..samples)
        .map(|s| {
            let t = 2.0 * std::f64::consts::PI * s as f64 / samples as f64;
            (p.eval(C64::from_polar(1.0, t)).norm() - 1.0).abs()
        })
        .fold(0.0, f64::max))
}
