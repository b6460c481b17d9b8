//! The refined Hitt algorithm for nearly `(S^m)*`-invariant subspaces.
//!
//! A member `f` is peeled as `f_j = A(j)·E_m + S^m f_{j+1}`, giving
//! `f = Φ(z^m)·E_m` with `Φ = Σ_l A(l) z^l`. The map `J_m: f ↦ Φ` is an
//! isometry onto an `S*`-invariant `K`, which is then tested against a
//! candidate inner `Θ`.

use crate::element::HardyElement;
use crate::error::{Error, Result};
use crate::invariance::{
    check_shift_invariance, sigma_product, InvarianceReport, ShiftCondition, SigmaProduct, Stage,
};
use crate::laurent::{build_sigma, LaurentMatrix};
use crate::par;
use crate::series::{TaylorPoly, C64, ZERO};
use crate::subspaces::SpanSubspace;
use crate::veclift::VectorPoly;
use crate::Tolerances;

/// `E_m = (e_0, …, e_{m−1})ᵀ`; degenerate entries are exact zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelColumn {
    entries: Vec<TaylorPoly>,
    degenerate: Vec<bool>,
}

impl KernelColumn {
    pub fn m(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[TaylorPoly] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> &TaylorPoly {
        &self.entries[i]
    }

    pub fn degeneracy_flags(&self) -> &[bool] {
        &self.degenerate
    }

    pub fn is_degenerate(&self, i: usize) -> bool {
        self.degenerate[i]
    }

    pub fn cap(&self) -> usize {
        self.entries[0].cap()
    }

    /// `Φ(z^m)·E_m = Σ_i Φ_i(z^m) e_i(z)`, cut at the kernel cap.
    pub fn synthesize(&self, phi: &VectorPoly) -> Result<TaylorPoly> {
        if phi.arity() != self.m() {
            return Err(Error::DimensionMismatch(format!(
                "kernel column has {} entries, vector has arity {}",
                self.m(),
                phi.arity()
            )));
        }
        let m = self.m();
        let cap = self.cap();
        let mut out = TaylorPoly::zero(cap);
        for (i, e) in self.entries.iter().enumerate() {
            if self.degenerate[i] {
                continue;
            }
            for (l, &a) in phi.component(i).coeffs().iter().enumerate() {
                if a == ZERO || m * l > cap {
                    continue;
                }
                out.axpy(a, &e.shift_pow_within(m * l));
            }
        }
        Ok(out)
    }

    /// Entrywise max coefficient distance to `expected`.
    pub fn entry_errors(&self, expected: &[TaylorPoly]) -> Vec<f64> {
        self.entries
            .iter()
            .zip(expected)
            .map(|(a, b)| a.max_abs_diff(b))
            .collect()
    }
}

trait ShiftWithin {
    fn shift_pow_within(&self, k: usize) -> Self;
}

impl ShiftWithin for TaylorPoly {
    /// `z^k f` with everything above the cap dropped.
    fn shift_pow_within(&self, k: usize) -> Self {
        let cap = self.cap();
        let mut c = vec![ZERO; k.min(cap + 1)];
        c.extend(self.coeffs().iter().take((cap + 1).saturating_sub(k)));
        TaylorPoly::new(c, cap).expect("kept within cap")
    }
}

/// Makes the first coefficient above `tol` real positive.
fn fix_phase(f: TaylorPoly, tol: f64) -> TaylorPoly {
    match f.coeffs().iter().find(|c| c.norm() > tol) {
        Some(c) => f.scale(c.conj() / c.norm()),
        None => f,
    }
}

/// Gram–Schmidt on `P_M z^i`, `i = 0..m`, in index order.
///
/// `P_M z^i` equals the projection onto `X_m = M ⊖ (M ∩ S^m H²)` because
/// `z^i ⊥ S^m H²`.
pub fn extract_kernels(space: &SpanSubspace<TaylorPoly>, m: usize) -> Result<KernelColumn> {
    if m < 2 {
        return Err(Error::ParamOutOfRange("kernel column needs m >= 2".into()));
    }
    let cap = space.cap();
    let tol = space.rank_tol();
    let mut entries: Vec<TaylorPoly> = Vec::with_capacity(m);
    let mut degenerate = Vec::with_capacity(m);
    for i in 0..m {
        let zi = if i <= cap {
            TaylorPoly::monomial(i, cap)?
        } else {
            TaylorPoly::zero(cap)
        };
        let mut v = space.project(&zi).0;
        for _ in 0..2 {
            for (e, deg) in entries.iter().zip(&degenerate) {
                if !deg {
                    let c = v.inner(e);
                    v.axpy(-c, e);
                }
            }
        }
        let n = v.norm();
        if n <= tol {
            entries.push(TaylorPoly::zero(cap));
            degenerate.push(true);
        } else {
            entries.push(fix_phase(v.scale(C64::new(1.0 / n, 0.0)), tol));
            degenerate.push(false);
        }
    }
    Ok(KernelColumn {
        entries,
        degenerate,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// Row `l` of the coefficient table is `A(l)`.
    pub phi: VectorPoly,
    /// `‖f − Φ(z^m) E_m‖`.
    pub residual: f64,
    /// `‖f‖² − Σ_l |A(l)|²`.
    pub parseval_defect: f64,
    pub iterations: usize,
}

pub fn default_max_iter(cap: usize, m: usize) -> usize {
    cap / m + 2
}

/// Peels `f` against `E_m`: `x_j = Σ_i ⟨f_j, e_i⟩ e_i`,
/// `f_{j+1} = (S^m)*(f_j − x_j)`, until `‖f_j‖ < tol` or `z^{mj}` passes the
/// cap. An iterate leaving `M`
/// means `M` is not nearly `(S^m)*`-invariant and ends the loop.
pub fn hitt_decompose(
    f: &TaylorPoly,
    space: &SpanSubspace<TaylorPoly>,
    kernels: &KernelColumn,
    m: usize,
    max_iter: usize,
    tol: f64,
) -> Result<Decomposition> {
    if kernels.m() != m {
        return Err(Error::DimensionMismatch(format!(
            "kernel column has {} entries, m = {m}",
            kernels.m()
        )));
    }
    let start = space.residual(f);
    if start > tol {
        return Err(Error::NotAMember { residual: start });
    }
    let vcap = f.cap() / m;
    let mut rows: Vec<Vec<C64>> = vec![Vec::new(); m];
    let mut fj = f.clone();
    let mut iterations = 0;
    // Once `z^{mj} f_j` lies beyond the cap the truncated expansion is exact;
    // whatever mass `f_j` still carries shows up as the Parseval defect.
    while fj.norm() >= tol && m * iterations <= f.cap() {
        if iterations >= max_iter {
            return Err(Error::NoConvergence {
                iterations,
                residual: fj.norm(),
            });
        }
        let mut rest = fj.clone();
        for (i, e) in kernels.entries.iter().enumerate() {
            let a = if kernels.degenerate[i] {
                ZERO
            } else {
                fj.inner(e)
            };
            rows[i].push(a);
            if a != ZERO {
                rest.axpy(-a, e);
            }
        }
        fj = rest.coshift_pow(m);
        iterations += 1;
        let drift = space.residual(&fj);
        if drift > tol {
            return Err(Error::NoConvergence {
                iterations,
                residual: drift,
            });
        }
    }
    let comps = rows
        .into_iter()
        .map(|mut r| {
            r.truncate(vcap + 1);
            TaylorPoly::new(r, vcap)
        })
        .collect::<Result<Vec<_>>>()?;
    let phi = VectorPoly::new(comps)?;
    let rebuilt = kernels.synthesize(&phi)?;
    let residual = f.sub(&rebuilt).norm();
    let parseval_defect = f.norm_sqr() - phi.norm_sqr();
    if residual > tol {
        return Err(Error::NoConvergence {
            iterations,
            residual,
        });
    }
    Ok(Decomposition {
        phi,
        residual,
        parseval_defect,
        iterations,
    })
}

/// `J_m` evaluated on a frame of `M`.
#[derive(Debug, Clone)]
pub struct JMap {
    pub kernels: KernelColumn,
    /// One decomposition per frame vector of `M`, in frame order.
    pub decompositions: Vec<Decomposition>,
    /// `K = span J_m(M)`, with `dim K = dim M`.
    pub space: SpanSubspace<VectorPoly>,
    /// `max |⟨Φ_a, Φ_b⟩ − ⟨f_a, f_b⟩|` over frame pairs.
    pub gram_defect: f64,
    /// `S*`-invariance of `K`, verified rather than assumed.
    pub coshift: InvarianceReport,
}

impl JMap {
    /// `K` plus every `z^j δ_i` for degenerate `i`: components where `E_m`
    /// vanishes are unconstrained by `M`.
    pub fn augmented(&self) -> Result<SpanSubspace<VectorPoly>> {
        let mut gens: Vec<VectorPoly> = self.space.frame().to_vec();
        let origin = self.space.origin();
        for (i, &d) in self.kernels.degeneracy_flags().iter().enumerate() {
            if d {
                for j in 0..=origin.cap() {
                    gens.push(origin.unit_like(i, j)?);
                }
            }
        }
        if gens.is_empty() {
            return Ok(self.space.clone());
        }
        SpanSubspace::orthonormalize(gens, self.space.rank_tol())
    }
}

pub fn build_j_map(space: &SpanSubspace<TaylorPoly>, m: usize, tol: f64) -> Result<JMap> {
    let kernels = extract_kernels(space, m)?;
    let max_iter = default_max_iter(space.cap(), m);
    let decompositions = par::map(space.frame(), |f| {
        hitt_decompose(f, space, &kernels, m, max_iter, tol)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let origin = VectorPoly::zero(m, space.cap() / m);
    let images: Vec<VectorPoly> = decompositions.iter().map(|d| d.phi.clone()).collect();
    let mut gram_defect: f64 = 0.0;
    for (a, (fa, pa)) in space.frame().iter().zip(&images).enumerate() {
        for (fb, pb) in space.frame()[a..].iter().zip(&images[a..]) {
            gram_defect = gram_defect.max((pa.inner(pb) - fa.inner(fb)).norm());
        }
    }
    let k = if images.is_empty() {
        SpanSubspace::zero(&origin, space.rank_tol())
    } else {
        SpanSubspace::orthonormalize(images, space.rank_tol())?
    };
    let coshift = check_shift_invariance(&k, 1, true, tol)?;
    Ok(JMap {
        kernels,
        decompositions,
        space: k,
        gram_defect,
        coshift,
    })
}

#[derive(Debug, Clone)]
pub struct CertifyReport {
    pub stages: Vec<Stage>,
    pub products: Vec<SigmaProduct>,
    /// Absent when the decomposition itself failed.
    pub j_map: Option<JMap>,
    pub passed: bool,
}

/// `‖P_+(Θ* v)‖`, which vanishes exactly when `v ⊥ Θ H²`.
fn range_overlap(theta: &LaurentMatrix, v: &VectorPoly) -> Result<f64> {
    let cap = v.cap() + theta.band().max(0) as usize;
    Ok(theta.apply_adjoint_toeplitz(&v.with_cap(cap)?)?.norm())
}

/// Checks `Θ` against `M`: inner, `Θ*ΣΘ` analytic, `J_m(M) ⊆ K_Θ`,
/// `P_+(Σ*Φ) ⊥ Θ H²` for each decomposed frame member, and `S*`-invariance
/// of `K`.
pub fn certify_theta(
    space: &SpanSubspace<TaylorPoly>,
    m: usize,
    conditions: &[ShiftCondition],
    theta: &LaurentMatrix,
    tol: &Tolerances,
) -> Result<CertifyReport> {
    if theta.rows() != m {
        return Err(Error::DimensionMismatch(format!(
            "theta has {} rows, m = {m}",
            theta.rows()
        )));
    }
    if conditions.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut stages = Vec::new();
    let inner = theta.is_inner(tol.analyticity)?;
    stages.push(Stage {
        name: "inner".into(),
        passed: inner.inner,
        value: inner.deviation,
        invariance: None,
    });
    let products = conditions
        .iter()
        .map(|&c| sigma_product(theta, m, c, tol.analyticity))
        .collect::<Result<Vec<_>>>()?;
    for p in &products {
        stages.push(Stage {
            name: format!(
                "analytic Theta* Sigma({m},{},{}) Theta",
                p.condition.gamma, p.condition.k
            ),
            passed: p.analyticity.analytic,
            value: p.analyticity.witness,
            invariance: None,
        });
    }
    let j_map = match build_j_map(space, m, tol.membership) {
        Ok(j) => j,
        Err(Error::NoConvergence {
            iterations,
            residual,
        }) => {
            stages.push(Stage {
                name: format!("hitt decomposition (stopped after {iterations} steps)"),
                passed: false,
                value: residual,
                invariance: None,
            });
            return Ok(CertifyReport {
                stages,
                products,
                j_map: None,
                passed: false,
            });
        }
        Err(e) => return Err(e),
    };
    let worst_decomp = j_map
        .decompositions
        .iter()
        .map(|d| d.residual.max(d.parseval_defect.abs()))
        .fold(0.0, f64::max);
    stages.push(Stage {
        name: "hitt decomposition".into(),
        passed: worst_decomp <= tol.membership && j_map.gram_defect <= tol.membership,
        value: worst_decomp.max(j_map.gram_defect),
        invariance: None,
    });

    let overlaps = par::map(j_map.space.frame(), |k| range_overlap(theta, k))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let worst = overlaps.iter().copied().fold(0.0, f64::max);
    stages.push(Stage {
        name: "J(M) inside K_Theta".into(),
        passed: worst <= tol.membership,
        value: worst,
        invariance: None,
    });

    for c in conditions {
        let sigma = build_sigma(m, c.gamma, c.k)?;
        let overlaps = par::map(&j_map.decompositions, |d| {
            let moved = sigma.apply_adjoint_toeplitz(&d.phi)?;
            range_overlap(theta, &moved)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let worst = overlaps.iter().copied().fold(0.0, f64::max);
        stages.push(Stage {
            name: format!("Sigma({m},{},{})* Phi orthogonal to Theta H2", c.gamma, c.k),
            passed: worst <= tol.membership,
            value: worst,
            invariance: None,
        });
    }

    stages.push(Stage {
        name: "K invariant under S*".into(),
        passed: j_map.coshift.verdict.passed(),
        value: j_map.coshift.max_residual,
        invariance: Some(j_map.coshift.clone()),
    });
    let passed = stages.iter().all(|s| s.passed);
    Ok(CertifyReport {
        stages,
        products,
        j_map: Some(j_map),
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::LaurentPoly;

    const CAP: usize = 16;

    fn p(c: &[f64]) -> TaylorPoly {
        TaylorPoly::from_real(c, CAP).unwrap()
    }

    fn span(gens: &[&[f64]]) -> SpanSubspace<TaylorPoly> {
        SpanSubspace::orthonormalize(gens.iter().map(|g| p(g)).collect(), 1e-9).unwrap()
    }

    fn example1() -> SpanSubspace<TaylorPoly> {
        span(&[&[1.0, 1.0], &[0.0, 0.0, 1.0, 1.0]])
    }

    fn example2() -> SpanSubspace<TaylorPoly> {
        span(&[&[1.0, 1.0, 1.0], &[0.0, 1.0, 2.0]])
    }

    fn scaled(c: &[f64], s: f64) -> TaylorPoly {
        p(c).scale(C64::new(1.0 / s, 0.0))
    }

    #[test]
    fn kernels_example1() {
        let e = extract_kernels(&example1(), 2).unwrap();
        assert!(e.entry(0).max_abs_diff(&scaled(&[1.0, 1.0], 2f64.sqrt())) < 1e-12);
        assert!(e.is_degenerate(1));
        assert!(e.entry(1).is_zero());
    }

    #[test]
    fn kernels_example2() {
        let e = extract_kernels(&example2(), 2).unwrap();
        let e0 = scaled(&[5.0, 2.0, -1.0], 30f64.sqrt());
        let e1 = scaled(&[0.0, 1.0, 2.0], 5f64.sqrt());
        assert!(e.entry(0).max_abs_diff(&e0) < 1e-12);
        assert!(e.entry(1).max_abs_diff(&e1) < 1e-12);
    }

    #[test]
    fn kernels_example3() {
        let m = span(&[&[1.0, 1.0], &[0.0, 1.0, 1.0], &[0.0, 0.0, 0.0, 1.0, 1.0]]);
        let e = extract_kernels(&m, 2).unwrap();
        let e0 = scaled(&[2.0, 1.0, -1.0], 6f64.sqrt());
        let e1 = scaled(&[0.0, 1.0, 1.0], 2f64.sqrt());
        assert!(e.entry(0).max_abs_diff(&e0) < 1e-12);
        assert!(e.entry(1).max_abs_diff(&e1) < 1e-12);
    }

    #[test]
    fn decompose_example1() {
        let m = example1();
        let e = extract_kernels(&m, 2).unwrap();
        let f = p(&[1.0, 1.0, 1.0, 1.0]);
        let d = hitt_decompose(&f, &m, &e, 2, default_max_iter(CAP, 2), 1e-10).unwrap();
        let r2 = 2f64.sqrt();
        let want = VectorPoly::new(vec![
            TaylorPoly::from_real(&[r2, r2], CAP / 2).unwrap(),
            TaylorPoly::zero(CAP / 2),
        ])
        .unwrap();
        assert!(d.phi.max_abs_diff(&want) < 1e-12);
        assert!(d.residual < 1e-12 && d.parseval_defect.abs() < 1e-12);
        assert_eq!(d.iterations, 2);
    }

    #[test]
    fn decompose_kernel_entries() {
        let m = example2();
        let e = extract_kernels(&m, 2).unwrap();
        for i in 0..2 {
            let d = hitt_decompose(e.entry(i), &m, &e, 2, 10, 1e-10).unwrap();
            let unit = VectorPoly::unit(2, CAP / 2, i, 0).unwrap();
            assert!(d.phi.max_abs_diff(&unit) < 1e-12, "{i}");
            assert_eq!(d.iterations, 1);
        }
    }

    #[test]
    fn decompose_rejects_outsiders() {
        let m = example1();
        let e = extract_kernels(&m, 2).unwrap();
        let f = p(&[0.0, 1.0]);
        assert!(matches!(
            hitt_decompose(&f, &m, &e, 2, 10, 1e-10),
            Err(Error::NotAMember { .. })
        ));
    }

    #[test]
    fn decompose_detects_non_near_invariance() {
        // z²(1+z) ∈ M but (S²)*(…) = 1+z ∉ M = span{z²(1+z), z⁵}.
        let m = span(&[&[0.0, 0.0, 1.0, 1.0], &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0]]);
        let e = extract_kernels(&m, 2).unwrap();
        let f = m.frame()[0].clone();
        assert!(matches!(
            hitt_decompose(&f, &m, &e, 2, 10, 1e-10),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn j_map_examples() {
        let j = build_j_map(&example2(), 2, 1e-10).unwrap();
        assert_eq!(j.space.dim(), 2);
        for i in 0..2 {
            let unit = VectorPoly::unit(2, CAP / 2, i, 0).unwrap();
            assert!(j.space.residual(&unit) < 1e-12);
        }
        assert!(j.gram_defect < 1e-12);
        assert!(j.coshift.verdict.passed());

        let j = build_j_map(&example1(), 2, 1e-10).unwrap();
        assert_eq!(j.space.dim(), 2);
        assert!(j.space.residual(&VectorPoly::unit(2, CAP / 2, 0, 1).unwrap()) < 1e-12);
        assert_eq!(j.augmented().unwrap().dim(), 2 + CAP / 2 + 1);

        let zero = SpanSubspace::zero(&TaylorPoly::zero(CAP), 1e-9);
        assert!(build_j_map(&zero, 2, 1e-10).unwrap().space.is_zero());
    }

    fn z(e: i64, c: f64) -> LaurentPoly {
        LaurentPoly::monomial(e, C64::new(c, 0.0))
    }

    #[test]
    fn certify_examples() {
        let tol = Tolerances::default();
        let c = [ShiftCondition { gamma: 1, k: 1 }];
        let theta = LaurentMatrix::new(2, 1, vec![z(2, 1.0), LaurentPoly::zero()]).unwrap();
        let r = certify_theta(&example1(), 2, &c, &theta, &tol).unwrap();
        assert!(r.passed, "{:#?}", r.stages);
        assert!(r.products[0].product.entry(0, 0).is_zero());

        let s = 0.5f64.sqrt();
        let theta = LaurentMatrix::new(2, 1, vec![z(1, s), z(1, s)]).unwrap();
        let r = certify_theta(&example2(), 2, &c, &theta, &tol).unwrap();
        assert!(r.passed, "{:#?}", r.stages);
        let prod = r.products[0].product.entry(0, 0);
        assert!((prod.coeff(1) - C64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((prod.coeff(2) - C64::new(0.5, 0.0)).norm() < 1e-15);

        let r = certify_theta(&example2(), 2, &c, &LaurentMatrix::identity(2), &tol).unwrap();
        assert!(!r.passed);
        let stage = r.stages.iter().find(|s| s.name == "J(M) inside K_Theta").unwrap();
        assert!(!stage.passed);
    }
}
