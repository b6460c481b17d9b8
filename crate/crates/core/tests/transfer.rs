//! The Toeplitz picture under `T_B^n` against the shift picture under
//! `S^{mn}`, through `T_m U`, for `B` with zeros `{0, 1/2}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shiftinv_core::blaschke::{
    boundary_deviation, check_conjugation, transfer_subspace, u_apply, BlaschkeProduct, Direction,
    WoldFrame,
};
use shiftinv_core::invariance::{check_invariance, check_invariance_on_band, check_near_invariance};
use shiftinv_core::{OperatorSpec, SpanSubspace, SubspaceModel, TaylorPoly, VectorPoly, C64};

const CAP: usize = 128;
const DEPTH: usize = 12;
const TOL: f64 = 1e-8;

fn blaschke() -> BlaschkeProduct {
    BlaschkeProduct::new(C64::new(1.0, 0.0), vec![C64::new(0.0, 0.0), C64::new(0.5, 0.0)]).unwrap()
}

fn random_poly(rng: &mut ChaCha8Rng, lo: usize, hi: usize, cap: usize) -> TaylorPoly {
    let mut c = vec![C64::new(0.0, 0.0); hi + 1];
    for v in c.iter_mut().skip(lo) {
        *v = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    TaylorPoly::new(c, cap).unwrap()
}

/// Shift-picture subspaces of `P_window`: generic spans, towers
/// `span{z^{sj} h}` filling the window, tails `span{z^t : t ≥ s}`, and
/// towers with one foreign vector.
fn shift_side(rng: &mut ChaCha8Rng, kind: usize, s: usize, window: usize) -> SpanSubspace<TaylorPoly> {
    let gens: Vec<TaylorPoly> = match kind {
        0 => (0..rng.random_range(1..=4))
            .map(|_| {
                let hi = rng.random_range(0..=window);
                random_poly(rng, 0, hi, window)
            })
            .collect(),
        1 | 3 => {
            let hs: Vec<TaylorPoly> = (0..rng.random_range(1..=2))
                .map(|_| {
                    let hi = rng.random_range(0..s.max(2));
                    random_poly(rng, 0, hi, window)
                })
                .collect();
            let mut g = Vec::new();
            for h in &hs {
                let d = h.deg().unwrap_or(0);
                let mut j = 0;
                while s * j + d <= window {
                    g.push(h.shift_pow(s * j).unwrap());
                    j += 1;
                }
            }
            if kind == 3 {
                let hi = rng.random_range(window / 2..=window);
                g.push(random_poly(rng, 0, hi, window));
            }
            g
        }
        _ => {
            let lo = rng.random_range(0..=window / 2);
            (lo..=window).map(|t| TaylorPoly::monomial(t, window).unwrap()).collect()
        }
    };
    SpanSubspace::orthonormalize(gens, 1e-9).unwrap()
}

#[test]
fn expansions_are_unimodular_on_the_circle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let zeros: Vec<C64> = (0..rng.random_range(1..=4))
            .map(|_| C64::from_polar(rng.random_range(0.0..0.7), rng.random_range(0.0..6.3)))
            .collect();
        let b = BlaschkeProduct::new(C64::from_polar(1.0, rng.random_range(0.0..6.3)), zeros).unwrap();
        for n in 1..=3 {
            assert!(boundary_deviation(&b, n, 128).unwrap() < 1e-9);
            let e = b.power(n).unwrap().taylor_expand(400).unwrap();
            assert!(e.tail_bound < 1e-12);
            for t in 0..128 {
                let z = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * t as f64 / 128.0);
                assert!((e.series.eval(z).norm() - 1.0).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn u_preserves_gram_matrices() {
    let b = blaschke();
    let w = WoldFrame::new(&b, CAP, DEPTH).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let fs: Vec<TaylorPoly> = (0..8)
        .map(|_| {
            let mut f = TaylorPoly::zero(CAP);
            for i in 0..DEPTH {
                for j in 0..2 {
                    let c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    f.axpy(c, w.layer_vector(i, j));
                }
            }
            f
        })
        .collect();
    let us: Vec<_> = fs.iter().map(|f| u_apply(f, &w, 1e-10).unwrap()).collect();
    for a in 0..fs.len() {
        for c in 0..fs.len() {
            let before = fs[a].inner(&fs[c]);
            let after = us[a].inner(&us[c]);
            assert!((before - after).norm() < 1e-8);
        }
    }
    for f in &fs {
        for n in 1..=2 {
            // Keep `T_B^n g` inside the covered layers.
            let (low, _) = w.coordinates(f).unwrap();
            let cut: Vec<TaylorPoly> = low
                .components()
                .iter()
                .map(|c| c.truncate(DEPTH - 1 - n).0.with_cap(DEPTH - 1).unwrap())
                .collect();
            let g = w.reassemble(&VectorPoly::new(cut).unwrap()).unwrap();
            assert!(check_conjugation(&b, n, &g, &w, 1e-10).unwrap() < 1e-8);
        }
    }
}

#[test]
fn invariance_verdicts_transfer() {
    let b = blaschke();
    let w = WoldFrame::new(&b, CAP, DEPTH).unwrap();
    let window = w.lifted_cap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut seen = [0usize; 2];
    for case in 0..20 {
        for n in 1..=2 {
            let s = 2 * n;
            let shift = shift_side(&mut rng, case % 4, s, window);
            let band = shift.restrict_degree(window - s).unwrap();
            let toeplitz = transfer_subspace(&shift, &w, Direction::ToToeplitz, TOL).unwrap();
            let toeplitz_band = transfer_subspace(&band, &w, Direction::ToToeplitz, TOL).unwrap();

            let by_shift =
                check_invariance(&SubspaceModel::Span(shift.clone()), &OperatorSpec::ShiftPow(s), TOL).unwrap();
            let op = OperatorSpec::Toeplitz { symbol: b.clone(), n };
            let by_toeplitz = check_invariance_on_band(&toeplitz, &toeplitz_band, &op, TOL).unwrap();
            assert_eq!(
                by_shift.verdict, by_toeplitz.verdict,
                "case {case}, n = {n}: S^{s} residual {}, T_B^{n} residual {}",
                by_shift.max_residual, by_toeplitz.max_residual
            );
            assert_eq!(by_shift.tested_dim, by_toeplitz.tested_dim);
            seen[usize::from(by_shift.verdict.passed())] += 1;
        }
    }
    assert!(seen[0] > 0 && seen[1] > 0, "both verdicts occur: {seen:?}");
}

#[test]
fn near_invariance_verdicts_transfer() {
    let b = blaschke();
    let w = WoldFrame::new(&b, CAP, DEPTH).unwrap();
    let window = w.lifted_cap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut seen = [0usize; 2];
    for case in 0..20 {
        for n in 1..=2 {
            let s = 2 * n;
            let shift = shift_side(&mut rng, case % 4, s, window);
            let toeplitz = transfer_subspace(&shift, &w, Direction::ToToeplitz, TOL).unwrap();
            let by_shift =
                check_near_invariance(&SubspaceModel::Span(shift), &OperatorSpec::CoshiftPow(s), TOL).unwrap();
            let op = OperatorSpec::ToeplitzAdjoint { symbol: b.clone(), n };
            let by_toeplitz = check_near_invariance(&SubspaceModel::Span(toeplitz), &op, TOL).unwrap();
            assert_eq!(
                by_shift.verdict, by_toeplitz.verdict,
                "case {case}, n = {n}: (S^{s})* residual {}, (T_B^{n})* residual {}",
                by_shift.max_residual, by_toeplitz.max_residual
            );
            assert_eq!(by_shift.intersection_dim, by_toeplitz.intersection_dim);
            seen[usize::from(by_shift.verdict.passed())] += 1;
        }
    }
    assert!(seen[0] > 0 && seen[1] > 0, "both verdicts occur: {seen:?}");
}
