use proptest::prelude::*;
use shiftinv_core::hitt::{build_j_map, default_max_iter, extract_kernels, hitt_decompose};
use shiftinv_core::invariance::{
    check_invariance, check_near_invariance, verify_theorem_pipeline, OperatorSpec, ShiftCondition,
};
use shiftinv_core::laurent::{build_sigma, LaurentMatrix, LaurentPoly};
use shiftinv_core::subspaces::{MonomialSubspace, SpanSubspace, SubspaceModel};
use shiftinv_core::veclift::{t_m_apply, t_m_invert, VectorPoly};
use shiftinv_core::{TaylorPoly, Tolerances, C64};

const CASES: u32 = 256;

fn cfg() -> ProptestConfig {
    ProptestConfig::with_cases(CASES)
}

fn coeffs(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|v| v.into_iter().map(|(a, b)| C64::new(a, b)).collect())
}

fn poly(max_deg: usize, cap: usize) -> impl Strategy<Value = TaylorPoly> {
    coeffs(1..=max_deg + 1).prop_map(move |c| TaylorPoly::new(c, cap).unwrap())
}

fn span(cap: usize, max_deg: usize, max_gens: usize) -> impl Strategy<Value = Vec<TaylorPoly>> {
    prop::collection::vec(poly(max_deg, cap), 1..=max_gens)
}

fn laurent(band: i64) -> impl Strategy<Value = LaurentPoly> {
    coeffs(1..=(2 * band + 1) as usize).prop_map(move |c| LaurentPoly::new(-band, c))
}

fn lmatrix(r: usize, c: usize) -> impl Strategy<Value = LaurentMatrix> {
    prop::collection::vec(laurent(4), r * c).prop_map(move |e| LaurentMatrix::new(r, c, e).unwrap())
}

/// `e^{iφ} [[α, −β̄], [β, ᾱ]]` with `|α|² + |β|² = 1`.
fn unitary2() -> impl Strategy<Value = Vec<Vec<C64>>> {
    (0.0f64..6.3, 0.0f64..6.3, 0.0f64..6.3, 0.0f64..1.58).prop_map(|(phi, a, b, t)| {
        let alpha = C64::from_polar(t.cos(), a);
        let beta = C64::from_polar(t.sin(), b);
        let w = C64::from_polar(1.0, phi);
        vec![vec![w * alpha, -w * beta.conj()], vec![w * beta, w * alpha.conj()]]
    })
}

fn z(e: i64) -> LaurentPoly {
    LaurentPoly::monomial(e, C64::new(1.0, 0.0))
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn norm_agrees_with_self_inner(f in poly(30, 40)) {
        let ip = f.inner(&f);
        prop_assert!((f.norm_sqr() - ip.re).abs() < 1e-12);
        prop_assert!(ip.im.abs() < 1e-14);
    }

    #[test]
    fn shift_is_adjoint_to_coshift(f in poly(20, 40), g in poly(40, 40), k in 0usize..=20) {
        let lhs = f.shift_pow(k).unwrap().inner(&g);
        let rhs = f.inner(&g.coshift_pow(k));
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn product_commutes_and_associates(f in poly(10, 40), g in poly(10, 40), h in poly(10, 40)) {
        prop_assert!(f.mul(&g).unwrap().max_abs_diff(&g.mul(&f).unwrap()) < 1e-12);
        let left = f.mul(&g).unwrap().mul(&h).unwrap();
        let right = f.mul(&g.mul(&h).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right) < 1e-12);
    }

    #[test]
    fn lift_is_isometric_and_bijective(m in 1usize..=5, parts in prop::collection::vec(coeffs(1..=8), 5)) {
        let comps: Vec<TaylorPoly> = parts[..m].iter().map(|c| TaylorPoly::new(c.clone(), 7).unwrap()).collect();
        let f = VectorPoly::new(comps).unwrap();
        let out_cap = 8 * m - 1;
        let lifted = t_m_apply(&f, out_cap).unwrap();
        prop_assert!((lifted.norm() - f.norm()).abs() < 1e-12);
        let back = t_m_invert(&lifted, m).unwrap();
        prop_assert_eq!(back.max_abs_diff(&f), 0.0);
        prop_assert_eq!(t_m_apply(&back, out_cap).unwrap().max_abs_diff(&lifted), 0.0);
    }

    #[test]
    fn sigma_acts_as_power_shift(
        m in 2usize..=5,
        gamma_seed in 0usize..5,
        k in 1usize..=3,
        parts in prop::collection::vec(coeffs(1..=6), 5),
    ) {
        let gamma = 1 + gamma_seed % (m - 1);
        let cap = 10;
        let comps: Vec<TaylorPoly> = parts[..m].iter().map(|c| TaylorPoly::new(c.clone(), cap).unwrap()).collect();
        let f = VectorPoly::new(comps).unwrap();
        let sigma = build_sigma(m, gamma, k).unwrap();
        let out_cap = m * (cap + 1) - 1;
        let left = t_m_apply(&sigma.apply(&f).unwrap(), out_cap).unwrap();
        let right = t_m_apply(&f, out_cap).unwrap().shift_pow(k * m + gamma).unwrap();
        prop_assert!(left.max_abs_diff(&right) < 1e-12);
    }

    #[test]
    fn adjoint_is_involutive_and_reverses_products(a in lmatrix(2, 3), b in lmatrix(3, 2)) {
        prop_assert_eq!(a.adjoint().adjoint().max_abs_diff(&a), 0.0);
        let ab = a.matmul(&b).unwrap().adjoint();
        let ba = b.adjoint().matmul(&a.adjoint()).unwrap();
        prop_assert!(ab.max_abs_diff(&ba) < 1e-12);
    }

    #[test]
    fn frames_are_orthonormal(gens in span(30, 20, 8)) {
        let m = SpanSubspace::orthonormalize(gens.clone(), 1e-9).unwrap();
        prop_assert!(m.orthonormality_defect() < 1e-12);
        prop_assert_eq!(m.dim() + m.dropped().len(), gens.len());
        for g in &gens {
            prop_assert!(m.residual(g) < 1e-8 * g.norm().max(1.0));
        }
    }

    #[test]
    fn projection_is_idempotent_and_contractive(gens in span(30, 20, 6), f in poly(30, 30)) {
        let m = SpanSubspace::orthonormalize(gens, 1e-9).unwrap();
        let (p, _) = m.project(&f);
        let (pp, _) = m.project(&p);
        prop_assert!(pp.sub(&p).norm() < 1e-12);
        prop_assert!(p.norm() <= f.norm() + 1e-12);
    }

    #[test]
    fn rank_accounting(gens in span(24, 16, 7), k in 1usize..=10) {
        let m = SpanSubspace::orthonormalize(gens, 1e-9).unwrap();
        let meet = m.intersect_shifted(k).unwrap();
        let rest = m.ortho_complement_within(&meet).unwrap();
        prop_assert_eq!(m.dim(), meet.dim() + rest.dim());
    }

    #[test]
    fn semigroup_membership_matches_enumeration(a in 1usize..12, b in 1usize..12) {
        prop_assume!(gcd(a, b) == 1);
        let cap = 80;
        let m = MonomialSubspace::new(&[a, b], &[], cap).unwrap();
        for e in 0..=cap {
            let brute = (0..=e / a).any(|x| (e - a * x) % b == 0);
            prop_assert_eq!(m.membership(e).unwrap(), brute);
        }
    }

    #[test]
    fn monomial_verdicts_match_enumeration(
        gens in prop::collection::vec(1usize..9, 1..=3),
        exceptional in prop::collection::vec(0usize..12, 0..=3),
        k in 1usize..=5,
    ) {
        let cap = 40;
        let m = MonomialSubspace::new(&gens, &exceptional, cap).unwrap();
        let inside = |e: usize| m.membership(e).unwrap();
        let model = SubspaceModel::Monomial(m.clone());

        let fail = (0..=cap).find(|&e| inside(e) && e >= k && !inside(e - k));
        let near = check_near_invariance(&model, &OperatorSpec::CoshiftPow(k), 1e-8).unwrap();
        prop_assert_eq!(near.verdict.passed(), fail.is_none());
        prop_assert_eq!(near.witness.and_then(|w| w.exponents), fail.map(|e| (e, e - k)));

        let fail = (0..=cap - k).find(|&e| inside(e) && !inside(e + k));
        let inv = check_invariance(&model, &OperatorSpec::ShiftPow(k), 1e-8).unwrap();
        prop_assert_eq!(inv.verdict.passed(), fail.is_none());
        prop_assert_eq!(inv.witness.and_then(|w| w.exponents), fail.map(|e| (e, e + k)));
    }

    #[test]
    fn span_and_monomial_models_agree(
        gens in prop::collection::vec(1usize..9, 1..=3),
        exceptional in prop::collection::vec(0usize..12, 0..=3),
        k in 1usize..=5,
    ) {
        let m = MonomialSubspace::new(&gens, &exceptional, 30).unwrap();
        let span = SubspaceModel::Span(m.to_span(1e-9).unwrap());
        let mono = SubspaceModel::Monomial(m);
        let op = OperatorSpec::CoshiftPow(k);
        prop_assert_eq!(
            check_near_invariance(&mono, &op, 1e-8).unwrap().verdict,
            check_near_invariance(&span, &op, 1e-8).unwrap().verdict
        );
    }

    #[test]
    fn near_invariance_witnesses_break_invariance(gens in span(16, 8, 4), k in 1usize..=4) {
        let m = SpanSubspace::orthonormalize(gens, 1e-9).unwrap();
        let model = SubspaceModel::Span(m.clone());
        let op = OperatorSpec::CoshiftPow(k);
        let near = check_near_invariance(&model, &op, 1e-8).unwrap();
        let inv = check_invariance(&model, &op, 1e-8).unwrap();
        if inv.verdict.passed() {
            prop_assert!(near.verdict.passed());
        }
        if let Some(w) = near.witness {
            let element = TaylorPoly::new(w.element[0].clone(), 16).unwrap();
            prop_assert!(m.residual(&element) < 1e-8);
            for i in 0..k {
                prop_assert!(element.coeff(i).norm() < 1e-8);
            }
            prop_assert!((m.residual(&element.coshift_pow(k)) - w.residual).abs() < 1e-10);
            prop_assert!(!inv.verdict.passed());
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// `span{z^{mj} g_i : j ≤ depth}`, nearly `(S^m)*`-invariant when the first
/// `m` coefficients of the `g_i` are independent.
fn shift_tower(g: &[TaylorPoly], m: usize, depth: usize) -> SpanSubspace<TaylorPoly> {
    let gens = (0..=depth)
        .flat_map(|j| g.iter().map(move |p| p.shift_pow(m * j).unwrap()))
        .collect();
    SpanSubspace::orthonormalize(gens, 1e-9).unwrap()
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn hitt_reconstructs_tower_members(
        m in 2usize..=3,
        raw in prop::collection::vec(coeffs(1..=5), 1..=2),
        depth in 1usize..=4,
    ) {
        let cap = m * depth + 5;
        let g: Vec<TaylorPoly> = raw.iter().map(|c| TaylorPoly::new(c.clone(), cap).unwrap()).collect();
        let space = shift_tower(&g, m, depth);
        let e = extract_kernels(&space, m).unwrap();
        for f in space.frame() {
            let d = hitt_decompose(f, &space, &e, m, default_max_iter(cap, m), 1e-8).unwrap();
            prop_assert!(d.residual < 1e-8);
            prop_assert!(d.parseval_defect > -1e-8);
        }
    }

    #[test]
    fn hitt_parseval_on_block_towers(
        m in 2usize..=4,
        raw in prop::collection::vec(coeffs(1..=4), 1..=3),
        depth in 0usize..=5,
    ) {
        let cap = m * (depth + 1) - 1;
        let g: Vec<TaylorPoly> = raw
            .iter()
            .map(|c| TaylorPoly::new(c[..c.len().min(m)].to_vec(), cap).unwrap())
            .collect();
        let space = shift_tower(&g, m, depth);
        let e = extract_kernels(&space, m).unwrap();
        for f in space.frame() {
            let d = hitt_decompose(f, &space, &e, m, default_max_iter(cap, m), 1e-8).unwrap();
            prop_assert!(d.residual < 1e-8);
            prop_assert!(d.parseval_defect.abs() < 1e-8);
        }
        let j = build_j_map(&space, m, 1e-8).unwrap();
        prop_assert!(j.gram_defect < 1e-8);
    }

    #[test]
    fn pipeline_verdicts_ignore_unitary_right_factor(u in unitary2(), top in 1i64..=5) {
        let theta = LaurentMatrix::diag(vec![z(top), z(1)]);
        let rotated = theta.mul_constant_right(&u).unwrap();
        let conds = [ShiftCondition { gamma: 1, k: 1 }];
        let tol = Tolerances::default();
        let a = verify_theorem_pipeline(&theta, 2, &conds, 15, &tol).unwrap();
        let b = verify_theorem_pipeline(&rotated, 2, &conds, 15, &tol).unwrap();
        prop_assert_eq!(a.passed, b.passed);
        let flags = |r: &shiftinv_core::invariance::PipelineReport| {
            r.stages.iter().map(|s| (s.name.clone(), s.passed)).collect::<Vec<_>>()
        };
        prop_assert_eq!(flags(&a), flags(&b));
    }
}

#[test]
fn every_sigma_is_inner() {
    for m in 2..=6 {
        for gamma in 1..m {
            for k in 1..=3 {
                let s = build_sigma(m, gamma, k).unwrap();
                assert!(s.is_inner(1e-14).unwrap().inner, "m={m} γ={gamma} k={k}");
            }
        }
    }
}
