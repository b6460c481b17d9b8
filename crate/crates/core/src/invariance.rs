//! Definition-based invariance and near-invariance checks, and the pipeline
//! that tests an inner `Θ` against both shift conditions.
//!
//! Verdicts on span frames hold at truncation: only the part of `M` whose image
//! stays inside the cap is tested, and the rest is reported as untested.

use std::fmt;

use crate::blaschke::{model_basis, BlaschkeProduct, Toeplitz};
use crate::element::HardyElement;
use crate::error::{Error, Result};
use crate::laurent::{build_sigma, AnalyticityReport, LaurentMatrix};
use crate::par;
use crate::series::{TaylorPoly, C64, ONE, ZERO};
use crate::subspaces::{MonomialSubspace, SpanSubspace, SubspaceModel, DEFAULT_RANK_TOL};
use crate::veclift::{component_cap, t_m_apply, VectorPoly};
use crate::Tolerances;

/// Operators acting on scalar H².
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorSpec {
    ShiftPow(usize),
    CoshiftPow(usize),
    Toeplitz { symbol: BlaschkeProduct, n: usize },
    ToeplitzAdjoint { symbol: BlaschkeProduct, n: usize },
}

impl OperatorSpec {
    pub fn validate(&self) -> Result<()> {
        let p = match self {
            Self::ShiftPow(k) | Self::CoshiftPow(k) => *k,
            Self::Toeplitz { n, .. } | Self::ToeplitzAdjoint { n, .. } => *n,
        };
        if p == 0 {
            return Err(Error::ParamOutOfRange(format!(
                "operator power must be >= 1 in {self}"
            )));
        }
        Ok(())
    }

    pub fn is_adjoint(&self) -> bool {
        matches!(self, Self::CoshiftPow(_) | Self::ToeplitzAdjoint { .. })
    }

    pub fn adjoint(&self) -> Self {
        match self.clone() {
            Self::ShiftPow(k) => Self::CoshiftPow(k),
            Self::CoshiftPow(k) => Self::ShiftPow(k),
            Self::Toeplitz { symbol, n } => Self::ToeplitzAdjoint { symbol, n },
            Self::ToeplitzAdjoint { symbol, n } => Self::Toeplitz { symbol, n },
        }
    }
}

impl fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ShiftPow(k) => write!(f, "S^{k}"),
            Self::CoshiftPow(k) => write!(f, "(S^{k})*"),
            Self::Toeplitz { n, .. } => write!(f, "T_B^{n}"),
            Self::ToeplitzAdjoint { n, .. } => write!(f, "(T_B^{n})*"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Self::Pass
        } else {
            Self::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Self::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
        })
    }
}

/// An element whose image leaves the subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// Coefficients as `[component][index]`.
    pub element: Vec<Vec<C64>>,
    pub image: Vec<Vec<C64>>,
    /// Distance of the image from the subspace.
    pub residual: f64,
    /// For monomial spaces: the exponent and where the operator sends it.
    pub exponents: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub operator: String,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    /// Worst membership residual over the tested part.
    pub max_residual: f64,
    pub tested_dim: usize,
    /// Dimension of the part excluded because its image would leave the cap.
    pub untested_dim: usize,
    /// For near-invariance: dimension of `M ∩ T(H²)`.
    pub intersection_dim: Option<usize>,
    pub cap: usize,
}

/// Tests `op(u) ∈ M` for every frame vector `u` of `band ⊆ M`.
pub fn check_band_with<E, F>(
    space: &SpanSubspace<E>,
    band: &SpanSubspace<E>,
    operator: String,
    apply: F,
    tol: f64,
) -> Result<InvarianceReport>
where
    E: HardyElement,
    F: Fn(&E) -> Result<E> + Sync + Send,
{
    let images = par::map(band.frame(), |u| {
        let img = apply(u)?;
        let r = space.residual(&img);
        Ok((img, r))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut worst: Option<usize> = None;
    let mut max_residual: f64 = 0.0;
    for (i, (_, r)) in images.iter().enumerate() {
        if *r > max_residual {
            max_residual = *r;
            worst = Some(i);
        }
    }
    let verdict = Verdict::from_pass(max_residual <= tol);
    let witness = match (verdict, worst) {
        (Verdict::Fail, Some(i)) => Some(Witness {
            element: band.frame()[i].coefficient_lists(),
            image: images[i].0.coefficient_lists(),
            residual: images[i].1,
            exponents: None,
        }),
        _ => None,
    };
    Ok(InvarianceReport {
        operator,
        verdict,
        witness,
        max_residual,
        tested_dim: band.dim(),
        untested_dim: space.dim().saturating_sub(band.dim()),
        intersection_dim: None,
        cap: space.cap(),
    })
}

/// `S^k` or `(S^k)*` invariance of a span of scalar or vector elements.
pub fn check_shift_invariance<E: HardyElement>(
    space: &SpanSubspace<E>,
    k: usize,
    adjoint: bool,
    tol: f64,
) -> Result<InvarianceReport> {
    if k == 0 {
        return Err(Error::ParamOutOfRange("shift power must be >= 1".into()));
    }
    let cap = space.cap();
    if adjoint {
        let label = format!("(S^{k})*");
        return check_band_with(space, space, label, |u| Ok(u.coshift_pow(k)), tol);
    }
    let band = match cap.checked_sub(k) {
        Some(d) => space.restrict_degree(d)?,
        None => SpanSubspace::zero(space.origin(), space.rank_tol()),
    };
    if band.is_zero() && !space.is_zero() {
        return Err(Error::BudgetExceeded {
            needed: cap + k,
            cap,
        });
    }
    check_band_with(space, &band, format!("S^{k}"), |u| u.shift_pow(k), tol)
}

/// Exponent `e` as a coefficient list.
fn monomial_lists(e: usize) -> Vec<Vec<C64>> {
    let mut v = vec![ZERO; e + 1];
    v[e] = ONE;
    vec![v]
}

/// Walks the exponent set, sending each tested `e` to `target(e)`; `None` means
/// the image is zero. Exponents with `skip(e)` are untested.
fn monomial_check(
    m: &MonomialSubspace,
    operator: String,
    skip: impl Fn(usize) -> bool,
    target: impl Fn(usize) -> Option<usize>,
) -> Result<InvarianceReport> {
    let mut tested = 0;
    let mut untested = 0;
    let mut witness = None;
    for e in m.exponents() {
        if skip(e) {
            untested += 1;
            continue;
        }
        tested += 1;
        let Some(t) = target(e) else { continue };
        if witness.is_none() && !m.membership(t)? {
            witness = Some(Witness {
                element: monomial_lists(e),
                image: monomial_lists(t),
                residual: 1.0,
                exponents: Some((e, t)),
            });
        }
    }
    let verdict = Verdict::from_pass(witness.is_none());
    Ok(InvarianceReport {
        operator,
        verdict,
        max_residual: if witness.is_some() { 1.0 } else { 0.0 },
        witness,
        tested_dim: tested,
        untested_dim: untested,
        intersection_dim: None,
        cap: m.cap(),
    })
}

fn span_of(model: &SubspaceModel) -> Result<SpanSubspace<TaylorPoly>> {
    model.to_span(DEFAULT_RANK_TOL)
}

/// `op(M) ⊆ M`, judged on the part of `M` whose image fits under the cap.
pub fn check_invariance(
    model: &SubspaceModel,
    op: &OperatorSpec,
    tol: f64,
) -> Result<InvarianceReport> {
    op.validate()?;
    let label = op.to_string();
    match (model, op) {
        (SubspaceModel::Monomial(m), OperatorSpec::ShiftPow(k)) => {
            let cap = m.cap();
            let report = monomial_check(m, label, |e| e + k > cap, |e| Some(e + k))?;
            if report.tested_dim == 0 {
                return Err(Error::BudgetExceeded {
                    needed: *k,
                    cap,
                });
            }
            Ok(report)
        }
        (SubspaceModel::Monomial(m), OperatorSpec::CoshiftPow(k)) => {
            monomial_check(m, label, |_| false, |e| e.checked_sub(*k))
        }
        (_, OperatorSpec::ShiftPow(k)) => check_shift_invariance(&span_of(model)?, *k, false, tol),
        (_, OperatorSpec::CoshiftPow(k)) => check_shift_invariance(&span_of(model)?, *k, true, tol),
        (_, OperatorSpec::Toeplitz { symbol, n }) => {
            let space = span_of(model)?;
            let t = Toeplitz::new(symbol, *n, space.cap())?;
            let band = match t.safe_degree(space.cap(), tol * 1e-2) {
                Some(d) => space.restrict_degree(d)?,
                None => SpanSubspace::zero(space.origin(), space.rank_tol()),
            };
            if band.is_zero() && !space.is_zero() {
                return Err(Error::BudgetExceeded {
                    needed: space.cap() + symbol.degree() * n,
                    cap: space.cap(),
                });
            }
            check_band_with(&space, &band, label, |u| Ok(t.apply_truncated(u)?.0), tol)
        }
        (_, OperatorSpec::ToeplitzAdjoint { symbol, n }) => {
            let space = span_of(model)?;
            let t = Toeplitz::new(symbol, *n, space.cap())?;
            check_band_with(&space, &space, label, |u| t.apply_adjoint(u), tol)
        }
    }
}

/// Invariance tested on a caller-chosen `band ⊆ M`. Images are cut at the cap,
/// so the verdict is the one for the truncated operator on that band.
pub fn check_invariance_on_band(
    space: &SpanSubspace<TaylorPoly>,
    band: &SpanSubspace<TaylorPoly>,
    op: &OperatorSpec,
    tol: f64,
) -> Result<InvarianceReport> {
    op.validate()?;
    for u in band.frame() {
        let r = space.residual(u);
        if r > tol {
            return Err(Error::NotASubspaceOf { residual: r });
        }
    }
    let cap = space.cap();
    let label = op.to_string();
    match op {
        OperatorSpec::ShiftPow(k) => {
            check_band_with(space, band, label, |u| Ok(u.shift_pow_truncated(*k)), tol)
        }
        OperatorSpec::CoshiftPow(k) => {
            check_band_with(space, band, label, |u| Ok(u.coshift_pow(*k)), tol)
        }
        OperatorSpec::Toeplitz { symbol, n } => {
            let t = Toeplitz::new(symbol, *n, cap)?;
            check_band_with(space, band, label, |u| Ok(t.apply_truncated(u)?.0), tol)
        }
        OperatorSpec::ToeplitzAdjoint { symbol, n } => {
            let t = Toeplitz::new(symbol, *n, cap)?;
            check_band_with(space, band, label, |u| t.apply_adjoint(u), tol)
        }
    }
}

trait ShiftTruncated {
    fn shift_pow_truncated(&self, k: usize) -> Self;
}

impl ShiftTruncated for TaylorPoly {
    fn shift_pow_truncated(&self, k: usize) -> Self {
        let cap = self.cap();
        let mut c = vec![ZERO; k];
        c.extend_from_slice(self.coeffs());
        TaylorPoly::new(c, cap + k)
            .map(|p| p.truncate(cap).0)
            .expect("grown cap holds the shifted series")
    }
}

/// `(S^k)*` near-invariance of a span: `f ∈ M ∩ S^k H² ⇒ (S^k)* f ∈ M`.
pub fn check_shift_near_invariance<E: HardyElement>(
    space: &SpanSubspace<E>,
    k: usize,
    tol: f64,
) -> Result<InvarianceReport> {
    if k == 0 {
        return Err(Error::ParamOutOfRange("shift power must be >= 1".into()));
    }
    let meet = space.intersect_shifted(k)?;
    let mut report = check_band_with(
        space,
        &meet,
        format!("(S^{k})*"),
        |u| Ok(u.coshift_pow(k)),
        tol,
    )?;
    report.tested_dim = meet.dim();
    report.untested_dim = 0;
    report.intersection_dim = Some(meet.dim());
    Ok(report)
}

/// `M` nearly `op`-invariant: `f ∈ M ∩ T(H²) ⇒ op f ∈ M` where `op = T*`.
///
/// For a shift-type `op` the range of `T = op*` is all of H², so the question
/// reduces to plain invariance.
pub fn check_near_invariance(
    model: &SubspaceModel,
    op: &OperatorSpec,
    tol: f64,
) -> Result<InvarianceReport> {
    op.validate()?;
    if !op.is_adjoint() {
        let mut report = check_invariance(model, op, tol)?;
        report.intersection_dim = Some(report.tested_dim + report.untested_dim);
        return Ok(report);
    }
    let label = op.to_string();
    match (model, op) {
        (SubspaceModel::Monomial(m), OperatorSpec::CoshiftPow(k)) => {
            let mut report = monomial_check(m, label, |e| e < *k, |e| Some(e - k))?;
            report.intersection_dim = Some(report.tested_dim);
            report.untested_dim = 0;
            Ok(report)
        }
        (_, OperatorSpec::CoshiftPow(k)) => check_shift_near_invariance(&span_of(model)?, *k, tol),
        (_, OperatorSpec::ToeplitzAdjoint { symbol, n }) => {
            let space = span_of(model)?;
            let power = symbol.power(*n)?;
            let kernel = model_basis(&power, space.cap())?;
            let meet = space.orthogonal_within(&kernel);
            let t = Toeplitz::new(symbol, *n, space.cap())?;
            let mut report = check_band_with(&space, &meet, label, |u| t.apply_adjoint(u), tol)?;
            report.untested_dim = 0;
            report.intersection_dim = Some(meet.dim());
            Ok(report)
        }
        _ => unreachable!("non-adjoint operators handled above"),
    }
}

/// Highest scalar index reached by lifting vectors of arity `m` whose
/// components stop at `component_cap(cap, m)`.
pub fn lift_window(cap: usize, m: usize) -> usize {
    m * (component_cap(cap, m) + 1) - 1
}

fn require_lift_shape(theta: &LaurentMatrix, m: usize, tol: f64) -> Result<()> {
    if m < 2 {
        return Err(Error::ParamOutOfRange("lift arity m must be >= 2".into()));
    }
    if theta.rows() != m {
        return Err(Error::DimensionMismatch(format!(
            "theta has {} rows, lift arity is {m}",
            theta.rows()
        )));
    }
    let a = theta.is_analytic(tol);
    if !a.analytic {
        return Err(Error::NotAnalytic { witness: a.witness });
    }
    Ok(())
}

/// `Θ z^j δ_col`, keeping indices up to `vcap`.
fn theta_column_shifted(theta: &LaurentMatrix, col: usize, j: usize, vcap: usize) -> Result<VectorPoly> {
    let comps = (0..theta.rows())
        .map(|r| {
            let mut c = vec![ZERO; vcap + 1];
            for (e, v) in theta.entry(r, col).terms() {
                if e < 0 {
                    continue;
                }
                let idx = e as usize + j;
                if idx <= vcap {
                    c[idx] = v;
                }
            }
            TaylorPoly::new(c, vcap)
        })
        .collect::<Result<Vec<_>>>()?;
    VectorPoly::new(comps)
}

fn theta_degree(theta: &LaurentMatrix) -> usize {
    let mut d = 0;
    for i in 0..theta.rows() {
        for j in 0..theta.cols() {
            if let Some(e) = theta.entry(i, j).max_index() {
                d = d.max(e.max(0) as usize);
            }
        }
    }
    d
}

/// `Θ H² ∩ P_N` in the vector workspace of cap `N = component_cap(cap, m)`.
///
/// Built from `Θ z^j δ_i` for all `j ≤ N` in a workspace wide enough to hold
/// them, then restricted to degree `N`, so combinations whose top terms cancel
/// are kept.
pub fn build_theta_range_vector(
    theta: &LaurentMatrix,
    m: usize,
    cap: usize,
) -> Result<SpanSubspace<VectorPoly>> {
    let tol = Tolerances::default();
    require_lift_shape(theta, m, tol.analyticity)?;
    let vcap = component_cap(cap, m);
    let wide = vcap + theta_degree(theta);
    let gens: Vec<VectorPoly> = (0..theta.cols())
        .flat_map(|i| (0..=vcap).map(move |j| (i, j)))
        .map(|(i, j)| theta_column_shifted(theta, i, j, wide))
        .collect::<Result<_>>()?;
    let origin = VectorPoly::zero(m, vcap);
    if gens.is_empty() {
        return Ok(SpanSubspace::zero(&origin, tol.rank));
    }
    let all = SpanSubspace::orthonormalize(gens, tol.rank)?;
    let low = all.restrict_degree(vcap)?;
    if low.is_zero() {
        return Ok(SpanSubspace::zero(&origin, tol.rank));
    }
    low.recapped(vcap)
}

fn lift_space(
    space: &SpanSubspace<VectorPoly>,
    cap: usize,
    m: usize,
) -> Result<SpanSubspace<TaylorPoly>> {
    let window = lift_window(cap, m);
    let gens = space
        .frame()
        .iter()
        .map(|v| t_m_apply(v, window))
        .collect::<Result<Vec<_>>>()?;
    if gens.is_empty() {
        return Ok(SpanSubspace::zero(&TaylorPoly::zero(window), space.rank_tol()));
    }
    SpanSubspace::orthonormalize(gens, space.rank_tol())
}

/// `T_m(Θ H²)` at truncation; the scalar cap is [`lift_window`]`(cap, m)`.
pub fn build_theta_range(
    theta: &LaurentMatrix,
    m: usize,
    cap: usize,
) -> Result<SpanSubspace<TaylorPoly>> {
    lift_space(&build_theta_range_vector(theta, m, cap)?, cap, m)
}

/// `K_Θ ∩ P_N = P_N ⊖ span{Θ z^j δ_i cut at N}`, which is exact because
/// `⟨g, Θ z^j δ_i⟩` only sees coefficients up to `N` when `g ∈ P_N`.
pub fn build_model_space_vector(
    theta: &LaurentMatrix,
    m: usize,
    cap: usize,
) -> Result<SpanSubspace<VectorPoly>> {
    let tol = Tolerances::default();
    require_lift_shape(theta, m, tol.analyticity)?;
    let vcap = component_cap(cap, m);
    let gens: Vec<VectorPoly> = (0..theta.cols())
        .flat_map(|i| (0..=vcap).map(move |j| (i, j)))
        .map(|(i, j)| theta_column_shifted(theta, i, j, vcap))
        .collect::<Result<_>>()?;
    let origin = VectorPoly::zero(m, vcap);
    let range = if gens.is_empty() {
        SpanSubspace::zero(&origin, tol.rank)
    } else {
        SpanSubspace::orthonormalize(gens, tol.rank)?
    };
    range.complement_in_workspace()
}

/// `T_m(K_Θ)` at truncation; the scalar cap is [`lift_window`]`(cap, m)`.
pub fn build_model_space(
    theta: &LaurentMatrix,
    m: usize,
    cap: usize,
) -> Result<SpanSubspace<TaylorPoly>> {
    lift_space(&build_model_space_vector(theta, m, cap)?, cap, m)
}

/// One `(γ, k)` condition, i.e. invariance under `S^{km+γ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftCondition {
    pub gamma: usize,
    pub k: usize,
}

impl ShiftCondition {
    pub fn power(&self, m: usize) -> usize {
        self.k * m + self.gamma
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub name: String,
    pub passed: bool,
    /// Deviation, witness magnitude or worst residual, depending on the stage.
    pub value: f64,
    pub invariance: Option<InvarianceReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaProduct {
    pub condition: ShiftCondition,
    /// `Θ* Σ Θ`.
    pub product: LaurentMatrix,
    pub analyticity: AnalyticityReport,
    /// `‖(I − ΘΘ*) Σ Θ‖` in coefficient norm. Zero exactly when `ΣΘ` maps
    /// into the range of `Θ` pointwise on the circle.
    pub range_inclusion: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    pub m: usize,
    pub cap: usize,
    pub stages: Vec<Stage>,
    pub products: Vec<SigmaProduct>,
    pub passed: bool,
}

/// `Θ* Σ_{m,γ}^k Θ` with its analyticity test and range-inclusion defect.
pub fn sigma_product(
    theta: &LaurentMatrix,
    m: usize,
    condition: ShiftCondition,
    tol: f64,
) -> Result<SigmaProduct> {
    let sigma = build_sigma(m, condition.gamma, condition.k)?;
    let st = sigma.matmul(theta)?;
    let product = theta.adjoint().matmul(&st)?;
    let analyticity = product.is_analytic(tol);
    let projector = theta.matmul(&theta.adjoint())?;
    let defect = LaurentMatrix::identity(m).sub(&projector)?.matmul(&st)?;
    Ok(SigmaProduct {
        condition,
        product,
        analyticity,
        range_inclusion: defect.coeff_norm_sqr().sqrt(),
    })
}

/// Inner test, `Θ*ΣΘ` analyticity for every condition, invariance of
/// `T_m(ΘH²)` under `S^m` and every `S^{km+γ}`, and invariance of `T_m(K_Θ)`
/// under the adjoints.
pub fn verify_theorem_pipeline(
    theta: &LaurentMatrix,
    m: usize,
    conditions: &[ShiftCondition],
    cap: usize,
    tol: &Tolerances,
) -> Result<PipelineReport> {
    require_lift_shape(theta, m, tol.analyticity)?;
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
    let mut powers = vec![m];
    for c in conditions {
        let s = c.power(m);
        if !powers.contains(&s) {
            powers.push(s);
        }
    }
    let range = build_theta_range(theta, m, cap)?;
    let model = build_model_space(theta, m, cap)?;
    let checks: Vec<(bool, usize)> = powers
        .iter()
        .map(|&s| (false, s))
        .chain(powers.iter().map(|&s| (true, s)))
        .collect();
    let reports = par::map(&checks, |&(adjoint, s)| {
        if adjoint {
            check_shift_invariance(&model, s, true, tol.membership)
        } else {
            check_shift_invariance(&range, s, false, tol.membership)
        }
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    for (&(adjoint, s), r) in checks.iter().zip(reports) {
        let name = if adjoint {
            format!("model space invariant under (S^{s})*")
        } else {
            format!("range invariant under S^{s}")
        };
        stages.push(Stage {
            name,
            passed: r.verdict.passed(),
            value: r.max_residual,
            invariance: Some(r),
        });
    }
    let passed = stages.iter().all(|s| s.passed);
    Ok(PipelineReport {
        m,
        cap,
        stages,
        products,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::LaurentPoly;

    const TOL: f64 = 1e-8;

    fn p(c: &[f64], cap: usize) -> TaylorPoly {
        TaylorPoly::from_real(c, cap).unwrap()
    }

    fn span(gens: Vec<TaylorPoly>) -> SubspaceModel {
        SubspaceModel::Span(SpanSubspace::orthonormalize(gens, 1e-9).unwrap())
    }

    fn z(e: i64, c: f64) -> LaurentPoly {
        LaurentPoly::monomial(e, C64::new(c, 0.0))
    }

    fn m1() -> SubspaceModel {
        SubspaceModel::Monomial(MonomialSubspace::new(&[2, 3], &[], 40).unwrap())
    }

    fn m2() -> SubspaceModel {
        SubspaceModel::Monomial(MonomialSubspace::new(&[3, 5], &[], 40).unwrap())
    }

    fn verdict(m: &SubspaceModel, op: OperatorSpec) -> Verdict {
        check_invariance(m, &op, TOL).unwrap().verdict
    }

    #[test]
    fn monomial_examples() {
        use OperatorSpec::ShiftPow as S;
        assert_eq!(verdict(&m1(), S(2)), Verdict::Pass);
        assert_eq!(verdict(&m1(), S(3)), Verdict::Pass);
        let r = check_invariance(&m1(), &S(1), TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.witness.unwrap().exponents, Some((0, 1)));
        for k in [1, 2, 4, 7] {
            assert_eq!(verdict(&m2(), S(k)), Verdict::Fail, "S^{k}");
        }
        for k in [3, 5] {
            assert_eq!(verdict(&m2(), S(k)), Verdict::Pass, "S^{k}");
        }
    }

    /// `{(1+2z) f(z²)}` capped: generators `(1+2z) z^{2j}`.
    fn odd_even(cap: usize) -> SubspaceModel {
        let gens = (0..)
            .map(|j| 2 * j)
            .take_while(|&e| e < cap)
            .map(|e| p(&[1.0, 2.0], cap).shift_pow(e).unwrap())
            .collect();
        span(gens)
    }

    #[test]
    fn odd_even_span() {
        let m = odd_even(31);
        let r = check_invariance(&m, &OperatorSpec::ShiftPow(1), TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.witness.unwrap().residual > 0.1);
        assert_eq!(verdict(&m, OperatorSpec::ShiftPow(2)), Verdict::Pass);
        // z³(1+2z) = z(1+2z)·z² is odd-leading, so S³ does not preserve M.
        assert_eq!(verdict(&m, OperatorSpec::ShiftPow(3)), Verdict::Fail);
    }

    #[test]
    fn beurling_space() {
        let cap = 24;
        let gens = (2..=cap).map(|e| TaylorPoly::monomial(e, cap).unwrap()).collect();
        let m = span(gens);
        for k in 1..6 {
            let r = check_invariance(&m, &OperatorSpec::ShiftPow(k), TOL).unwrap();
            assert_eq!(r.verdict, Verdict::Pass);
            assert_eq!(r.untested_dim, k);
        }
    }

    #[test]
    fn budget_only_without_band() {
        let m = span(vec![TaylorPoly::monomial(4, 5).unwrap()]);
        assert!(matches!(
            check_invariance(&m, &OperatorSpec::ShiftPow(2), TOL),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn near_invariance_examples() {
        let cap = 16;
        let m = span(vec![p(&[1.0, 1.0], cap), p(&[0.0, 0.0, 1.0, 1.0], cap)]);
        let r = check_near_invariance(&m, &OperatorSpec::CoshiftPow(2), TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.intersection_dim, Some(1));
        let r = check_near_invariance(&m, &OperatorSpec::CoshiftPow(3), TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.intersection_dim, Some(0));
        let r = check_near_invariance(&m, &OperatorSpec::CoshiftPow(1), TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let w = r.witness.unwrap();
        let want = p(&[0.0, 0.0, 1.0, 1.0], cap).scale(C64::new(0.5f64.sqrt(), 0.0));
        let got = TaylorPoly::new(w.element[0].clone(), cap).unwrap();
        let phase = got.coeff(2) / want.coeff(2);
        assert!(got.max_abs_diff(&want.scale(phase)) < 1e-12);
    }

    #[test]
    fn monomial_near_invariance() {
        let r = check_near_invariance(&m1(), &OperatorSpec::CoshiftPow(2), TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.witness.unwrap().exponents, Some((3, 1)));
        let r = check_near_invariance(&m2(), &OperatorSpec::CoshiftPow(3), TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn toeplitz_monomial_symbol_matches_shift() {
        let z2 = BlaschkeProduct::monomial(2).unwrap();
        let t = OperatorSpec::Toeplitz { symbol: z2.clone(), n: 1 };
        assert_eq!(verdict(&m1(), t.clone()), Verdict::Pass);
        let t3 = OperatorSpec::Toeplitz {
            symbol: BlaschkeProduct::monomial(1).unwrap(),
            n: 1,
        };
        assert_eq!(verdict(&m1(), t3), Verdict::Fail);
        let adj = OperatorSpec::ToeplitzAdjoint { symbol: z2, n: 1 };
        let a = check_near_invariance(&m1(), &adj, TOL).unwrap();
        let b = check_near_invariance(&m1(), &OperatorSpec::CoshiftPow(2), TOL).unwrap();
        assert_eq!(a.verdict, b.verdict);
    }

    #[test]
    fn theta_range_examples() {
        let theta = LaurentMatrix::new(2, 1, vec![z(2, 1.0), LaurentPoly::zero()]).unwrap();
        let r = build_theta_range(&theta, 2, 23).unwrap();
        // T₂(z^{2+j}, 0) = z^{2(2+j)}, j = 0..=9
        assert_eq!(r.dim(), 10);
        for j in 0..10 {
            assert!(r.residual(&TaylorPoly::monomial(2 * (2 + j), 23).unwrap()) < 1e-12);
        }
        let full = build_theta_range(&LaurentMatrix::identity(2), 2, 23).unwrap();
        assert_eq!(full.dim(), 24);
    }

    #[test]
    fn theta_range_keeps_cancelling_combinations() {
        // Columns (1+z, 1−z)/2 and (1−z, 1+z)/2: their sum is constant.
        let h = C64::new(0.5, 0.0);
        let e = |a: f64, b: f64| LaurentPoly::new(0, vec![h * a, h * b]);
        let theta =
            LaurentMatrix::new(2, 2, vec![e(1.0, 1.0), e(1.0, -1.0), e(1.0, -1.0), e(1.0, 1.0)])
                .unwrap();
        assert!(theta.is_inner(1e-12).unwrap().inner);
        // Θ = P + zQ with complementary projections: Θg ∈ P_5 iff the top
        // coefficient of g lies in ran P, so the dimension is 2·6 − 1, one more
        // than the shifted columns alone give.
        let r = build_theta_range_vector(&theta, 2, 11).unwrap();
        assert_eq!(r.dim(), 11);
        let top = VectorPoly::new(vec![TaylorPoly::monomial(5, 5).unwrap(); 2]).unwrap();
        assert!(r.residual(&top) < 1e-12);
    }

    #[test]
    fn model_space_examples() {
        let theta = LaurentMatrix::new(2, 1, vec![z(2, 1.0), LaurentPoly::zero()]).unwrap();
        let k = build_model_space(&theta, 2, 23).unwrap();
        for v in [0usize, 2] {
            assert!(k.residual(&TaylorPoly::monomial(v, 23).unwrap()) < 1e-12);
        }
        for odd in (1..24).step_by(2) {
            assert!(k.residual(&TaylorPoly::monomial(odd, 23).unwrap()) < 1e-12);
        }
        assert_eq!(k.dim(), 2 + 12);

        assert!(build_model_space(&LaurentMatrix::identity(3), 3, 23)
            .unwrap()
            .is_zero());

        let theta = LaurentMatrix::diag(vec![z(0, 1.0), z(1, 1.0), z(1, 1.0)]);
        let k = build_model_space(&theta, 3, 47).unwrap();
        assert_eq!(k.dim(), 2);
        assert!(k.residual(&TaylorPoly::monomial(1, 47).unwrap()) < 1e-12);
        assert!(k.residual(&TaylorPoly::monomial(2, 47).unwrap()) < 1e-12);
    }

    #[test]
    fn pipeline_families() {
        let tol = Tolerances::default();
        let c = [ShiftCondition { gamma: 1, k: 1 }];
        let theta = LaurentMatrix::diag(vec![z(2, 1.0), z(1, 1.0)]);
        let r = verify_theorem_pipeline(&theta, 2, &c, 31, &tol).unwrap();
        assert!(r.passed, "{:#?}", r.stages);

        let theta = LaurentMatrix::diag(vec![z(4, 1.0), z(1, 1.0)]);
        let r = verify_theorem_pipeline(&theta, 2, &c, 31, &tol).unwrap();
        assert!(!r.passed);
        assert!(!r.stages[1].passed);
    }

    #[test]
    fn pipeline_diag_one_z_z() {
        let tol = Tolerances::default();
        let theta = LaurentMatrix::diag(vec![z(0, 1.0), z(1, 1.0), z(1, 1.0)]);
        let c = [
            ShiftCondition { gamma: 1, k: 1 },
            ShiftCondition { gamma: 2, k: 1 },
        ];
        let r = verify_theorem_pipeline(&theta, 3, &c, 47, &tol).unwrap();
        assert!(r.passed, "{:#?}", r.stages);
        assert_eq!(r.stages.len(), 1 + 2 + 3 + 3);
    }

    #[test]
    fn pipeline_rank_one_constant() {
        let tol = Tolerances::default();
        let s = 5f64.sqrt();
        let theta = LaurentMatrix::new(2, 1, vec![z(0, 1.0 / s), z(0, 2.0 / s)]).unwrap();
        let r = verify_theorem_pipeline(&theta, 2, &[ShiftCondition { gamma: 1, k: 1 }], 31, &tol)
            .unwrap();
        assert!(r.stages[0].passed && r.stages[1].passed);
        let s3 = r.stages.iter().find(|s| s.name == "range invariant under S^3").unwrap();
        assert!(!s3.passed);
        assert!(r.products[0].range_inclusion > 0.1);
    }
}
