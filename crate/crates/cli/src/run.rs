//! Task execution. Tasks run independently and the report keeps task order.

use shiftinv_core::blaschke::{
    check_conjugation, transfer_subspace, BlaschkeProduct, Direction, WoldFrame,
};
use shiftinv_core::error::Error;
use shiftinv_core::invariance::{
    check_invariance, check_invariance_on_band, check_near_invariance, verify_theorem_pipeline,
    ShiftCondition,
};
use shiftinv_core::{
    build_j_map, build_sigma, certify_theta, extract_kernels, par, LaurentMatrix, OperatorSpec,
    SpanSubspace, SubspaceModel, TaylorPoly, Tolerances,
};

use crate::problem::{Claim, Picture, Problem, Task};
use crate::report::*;

/// Kernel entries count as matching an expected value below this error.
pub const KERNEL_MATCH_TOL: f64 = 1e-10;

/// Coverage required of an automatically sized Wold frame.
pub const WOLD_TOL: f64 = 1e-10;

pub fn run(problem: &Problem) -> Report {
    let tol = problem.tol;
    let tasks: Vec<TaskReport> = par::map(&problem.tasks, |(kind, name, task)| {
        let (status, error, result) = match run_task(task, &tol) {
            Ok((status, result)) => (status, None, Some(result)),
            Err(e) => (Status::Error, Some(e.to_string()), None),
        };
        TaskReport {
            index: 0,
            kind: kind.clone(),
            name: name.clone(),
            status,
            error,
            result,
        }
    })
    .into_iter()
    .enumerate()
    .map(|(i, mut t)| {
        t.index = i;
        t
    })
    .collect();
    let mut summary = Summary {
        total: tasks.len(),
        ..Summary::default()
    };
    for t in &tasks {
        match t.status {
            Status::Pass => summary.passed += 1,
            Status::Fail => summary.failed += 1,
            Status::Error => summary.errors += 1,
        }
    }
    Report {
        cap: problem.cap,
        tolerances: TolOut {
            membership: sig(tol.membership),
            rank: sig(tol.rank),
            analyticity: sig(tol.analyticity),
        },
        tasks,
        summary,
    }
}

fn run_task(task: &Task, tol: &Tolerances) -> Result<(Status, TaskResult), Error> {
    match task {
        Task::Invariance {
            near,
            model,
            operators,
            claims,
        } => invariance(*near, model, operators, claims.as_deref(), tol),
        Task::Theta {
            theta,
            m,
            conditions,
            cap,
            claim,
        } => {
            let r = verify_theorem_pipeline(theta, *m, conditions, *cap, tol)?;
            let claim = claim.map(|c| Status::from_pass(c == Claim::Pass));
            let verdict = Status::from_pass(r.passed);
            Ok((
                Status::from_pass(claim.is_none_or(|c| c == verdict)),
                TaskResult::Theta(ThetaResult {
                    m: r.m,
                    cap: r.cap,
                    stages: r.stages.iter().map(StageOut::from).collect(),
                    products: r.products.iter().map(ProductOut::from).collect(),
                    claim,
                    agrees_with_claim: claim.map(|c| c == verdict),
                }),
            ))
        }
        Task::Hitt {
            space,
            m,
            expected,
            certify,
        } => hitt(space, *m, expected.as_deref(), certify.as_ref(), tol),
        Task::Transfer {
            space,
            symbol,
            n,
            depth,
            picture,
        } => transfer(space, symbol, *n, *depth, *picture, tol),
        Task::Sigma { m, gamma, k } => {
            let s = build_sigma(*m, *gamma, *k)?;
            let inner = s.is_inner(1e-14)?;
            Ok((
                Status::from_pass(inner.inner),
                TaskResult::Sigma(SigmaResult {
                    m: *m,
                    gamma: *gamma,
                    k: *k,
                    sigma: matrix_out(&s),
                    inner: inner.inner,
                    deviation: sig(inner.deviation),
                }),
            ))
        }
    }
}

fn invariance(
    near: bool,
    model: &SubspaceModel,
    operators: &[OperatorSpec],
    claims: Option<&[Claim]>,
    tol: &Tolerances,
) -> Result<(Status, TaskResult), Error> {
    let reports = par::map(operators, |op| {
        if near {
            check_near_invariance(model, op, tol.membership)
        } else {
            check_invariance(model, op, tol.membership)
        }
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let checks: Vec<CheckOut> = reports
        .iter()
        .enumerate()
        .map(|(i, r)| CheckOut::new(r, claims.map(|c| c[i])))
        .collect();
    // With claims the task asserts the claimed verdicts, otherwise invariance.
    let pass = match claims {
        Some(_) => checks.iter().all(|c| c.agrees_with_claim == Some(true)),
        None => checks.iter().all(|c| c.verdict == Status::Pass),
    };
    Ok((
        Status::from_pass(pass),
        TaskResult::Invariance(InvarianceResult {
            model: match model {
                SubspaceModel::Span(_) => "span",
                SubspaceModel::Monomial(_) => "monomial",
            },
            checks,
        }),
    ))
}

fn hitt(
    space: &SpanSubspace<TaylorPoly>,
    m: usize,
    expected: Option<&[TaylorPoly]>,
    certify: Option<&(LaurentMatrix, Vec<ShiftCondition>)>,
    tol: &Tolerances,
) -> Result<(Status, TaskResult), Error> {
    let kernels = extract_kernels(space, m)?;
    let errors = expected.map(|e| kernels.entry_errors(e));
    let kernel_out = kernels
        .entries()
        .iter()
        .enumerate()
        .map(|(i, e)| KernelOut {
            coeffs: poly_list(e),
            degenerate: kernels.is_degenerate(i),
            expected_error: errors.as_ref().map(|v| sig(v[i])),
            matches_expected: errors.as_ref().map(|v| v[i] < KERNEL_MATCH_TOL),
        })
        .collect();
    let (j_map, certification) = match certify {
        Some((theta, conds)) => {
            let c = certify_theta(space, m, conds, theta, tol)?;
            let out = CertificationOut {
                passed: c.passed,
                stages: c.stages.iter().map(StageOut::from).collect(),
                products: c.products.iter().map(ProductOut::from).collect(),
            };
            (c.j_map.ok_or(None), Some(out))
        }
        None => match build_j_map(space, m, tol.membership) {
            Ok(j) => (Ok(j), None),
            Err(e @ Error::NoConvergence { .. }) => (Err(Some(e.to_string())), None),
            Err(e) => return Err(e),
        },
    };
    let mut result = HittResult {
        m,
        dim: space.dim(),
        cap: space.cap(),
        kernels: kernel_out,
        decomposition_error: None,
        decompositions: Vec::new(),
        gram_defect: None,
        k_coshift: None,
        certification,
    };
    let pass = match j_map {
        Ok(j) => {
            result.decompositions = j
                .decompositions
                .iter()
                .map(|d| DecompositionOut {
                    phi: d.phi.components().iter().map(poly_list).collect(),
                    residual: sig(d.residual),
                    parseval_defect: sig(d.parseval_defect),
                    iterations: d.iterations,
                })
                .collect();
            result.gram_defect = Some(sig(j.gram_defect));
            result.k_coshift = Some(CheckOut::new(&j.coshift, None));
            j.gram_defect <= tol.membership
                && j.coshift.verdict.passed()
                && errors.as_ref().is_none_or(|v| v.iter().all(|&e| e < KERNEL_MATCH_TOL))
                && result.certification.as_ref().is_none_or(|c| c.passed)
        }
        Err(message) => {
            result.decomposition_error =
                Some(message.unwrap_or_else(|| "decomposition did not converge".into()));
            false
        }
    };
    Ok((Status::from_pass(pass), TaskResult::Hitt(Box::new(result))))
}

fn transfer(
    space: &SpanSubspace<TaylorPoly>,
    symbol: &BlaschkeProduct,
    n: usize,
    depth: Option<usize>,
    picture: Picture,
    tol: &Tolerances,
) -> Result<(Status, TaskResult), Error> {
    let m = symbol.degree();
    let s = m * n;
    let t = tol.membership;
    let (toeplitz, shift, w) = match picture {
        Picture::Toeplitz => {
            let w = match depth {
                Some(d) => WoldFrame::new(symbol, space.cap(), d)?,
                None => WoldFrame::with_auto_depth(symbol, space.cap(), WOLD_TOL)?,
            };
            let shift = transfer_subspace(space, &w, Direction::ToShift, t)?;
            (space.clone(), shift, w)
        }
        Picture::Shift => {
            let d = match depth {
                Some(d) => d,
                None => space.cap() / m + 1,
            };
            let toeplitz_cap = 2 * space.cap().max(d * m) + 64;
            let w = WoldFrame::new(symbol, toeplitz_cap, d)?;
            let window = w.lifted_cap();
            let gens = space
                .frame()
                .iter()
                .map(|f| f.with_cap(window))
                .collect::<Result<Vec<_>, _>>()?;
            let shift = SpanSubspace::orthonormalize(gens, space.rank_tol())?;
            let toeplitz = transfer_subspace(&shift, &w, Direction::ToToeplitz, t)?;
            (toeplitz, shift, w)
        }
    };
    let window = w.lifted_cap();
    let band = match window.checked_sub(s) {
        Some(d) => shift.restrict_degree(d)?,
        None => SpanSubspace::zero(shift.origin(), shift.rank_tol()),
    };
    let toeplitz_band = transfer_subspace(&band, &w, Direction::ToToeplitz, t)?;

    let shift_model = SubspaceModel::Span(shift.clone());
    let toeplitz_model = SubspaceModel::Span(toeplitz.clone());
    let forward = OperatorSpec::Toeplitz {
        symbol: symbol.clone(),
        n,
    };
    let backward = OperatorSpec::ToeplitzAdjoint {
        symbol: symbol.clone(),
        n,
    };
    let shift_inv = check_invariance(&shift_model, &OperatorSpec::ShiftPow(s), t)?;
    let toeplitz_inv = check_invariance_on_band(&toeplitz, &toeplitz_band, &forward, t)?;
    let shift_near = check_near_invariance(&shift_model, &OperatorSpec::CoshiftPow(s), t)?;
    let toeplitz_near = check_near_invariance(&toeplitz_model, &backward, t)?;
    let conjugation = par::map(toeplitz_band.frame(), |f| check_conjugation(symbol, n, f, &w, t))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let agree = shift_inv.verdict == toeplitz_inv.verdict && shift_near.verdict == toeplitz_near.verdict;
    let pass = agree && conjugation <= t;
    Ok((
        Status::from_pass(pass),
        TaskResult::Transfer(Box::new(TransferResult {
            m,
            n,
            depth: w.depth(),
            toeplitz_cap: w.cap(),
            shift_window: window,
            dim: toeplitz.dim(),
            shift_invariance: CheckOut::new(&shift_inv, None),
            toeplitz_invariance: CheckOut::new(&toeplitz_inv, None),
            shift_near_invariance: CheckOut::new(&shift_near, None),
            toeplitz_near_invariance: CheckOut::new(&toeplitz_near, None),
            conjugation_residual: sig(conjugation),
            verdicts_agree: agree,
        })),
    ))
}
