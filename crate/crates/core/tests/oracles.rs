//! Library operators checked against independent dense or brute-force oracles.

mod common;

use common::*;
use paco::patch_grid::oracle::dense_projection_oracle;
use paco::solver::{
    admm_solve, dykstra_project, ladmm_solve, BoxProjector, ConsensusProjector, DctWeightedL1, WeightedL1,
};
use paco::{soft_threshold, Dictionary, OrthoDct, PatchMatrix, PenaltySchedule, SignalConstraint, StopCriteria};
use rand::Rng;

#[test]
fn consensus_projection_matches_dense_oracle() {
    let mut r = rng(11);
    for grid in random_grids(25, 1) {
        let p = dense_projection_oracle(&grid).unwrap();
        let y = random_patches(&grid, 1.0, &mut r);
        let fast = grid.project_consensus(&y).unwrap();
        let dense = p.matvec(y.as_slice());
        let err = fast.as_slice().iter().zip(&dense).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{:?}: {err}", grid.patch_shape());
    }
}

#[test]
fn dense_projector_is_symmetric_idempotent_with_trace_n() {
    for grid in random_grids(25, 2) {
        let p = dense_projection_oracle(&grid).unwrap();
        let pp = p.matmul(&p);
        let pt = p.transpose();
        for k in 0..p.data.len() {
            assert!((p.data[k] - pt.data[k]).abs() < 1e-10);
            assert!((p.data[k] - pp.data[k]).abs() < 1e-10);
        }
        assert!((p.trace() - grid.signal_len() as f64).abs() < 1e-6);
    }
}

#[test]
fn dct_matches_kronecker_cosine_matrix() {
    let mut r = rng(3);
    for shape in [vec![8], vec![16, 16], vec![4, 8, 8], vec![3, 5], vec![64], vec![100], vec![40, 3]] {
        let dct = OrthoDct::new(&shape).unwrap();
        let dense = dense_dct(&shape);
        let m = dense.rows;
        let x: Vec<f64> = (0..m).map(|_| r.random_range(-1.0..1.0)).collect();
        let mut fwd = x.clone();
        dct.forward_column(&mut fwd);
        let expect = dense.matvec(&x);
        let err = fwd.iter().zip(&expect).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{shape:?} forward {err}");
        let mut inv = x.clone();
        dct.inverse_column(&mut inv);
        let expect = dense.transpose().matvec(&x);
        let err = inv.iter().zip(&expect).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{shape:?} inverse {err}");
    }
}

#[test]
fn soft_threshold_matches_grid_search() {
    let mut r = rng(4);
    for _ in 0..200 {
        let (a, w, lambda) = (r.random_range(-5.0..5.0), r.random_range(0.0..2.0), r.random_range(0.01..3.0));
        let fast = soft_threshold(&PatchMatrix::from_vec(1, 1, vec![a]).unwrap(), &[w], lambda);
        let slow = prox_grid_search(a, w, lambda, 1e-4);
        assert!((fast.as_slice()[0] - slow).abs() <= 1e-4, "a={a} w={w} λ={lambda}");
    }
}

fn tiny_parts(t: &TinyProblem) -> (ConsensusProjector<'_>, PenaltySchedule, StopCriteria) {
    let constraint = SignalConstraint::observed(&t.mask, &t.known).unwrap();
    (
        ConsensusProjector::new(&t.grid, constraint),
        PenaltySchedule::frozen(PenaltySchedule::DEFAULT_KAPPA, 1.0).unwrap(),
        StopCriteria::new(500, 1e-10).unwrap(),
    )
}

fn free_samples(t: &TinyProblem, z: &PatchMatrix) -> [f64; 2] {
    let s = t.grid.stitch_samples(z).unwrap();
    [s[1], s[2]]
}

#[test]
fn tiny_fixture_minimum_is_sharp() {
    let t = TinyProblem::new();
    let [a, b] = t.brute_force();
    let f0 = t.objective(a, b);
    for k in 0..32 {
        let th = std::f64::consts::TAU * k as f64 / 32.0;
        assert!(t.objective(a + 1e-2 * th.cos(), b + 1e-2 * th.sin()) > f0 + 1e-5);
    }
}

#[test]
fn admm_and_ladmm_match_brute_force() {
    let t = TinyProblem::new();
    let oracle = t.brute_force();
    let (proj, sched, stop) = tiny_parts(&t);
    let dct = OrthoDct::new(&[3]).unwrap();
    let prior = DctWeightedL1 { dct: dct.clone(), weights: t.weights.clone() };

    let admm = admm_solve(&prior, &proj, &t.init(), sched.clone(), stop).unwrap();
    let ident = Dictionary::identity(3).unwrap();
    let ladmm_i = ladmm_solve(&prior, &proj, &ident, &t.init(), sched.clone(), stop, None).unwrap();
    let dct_dict = Dictionary::orthonormal_dct(&[3]).unwrap();
    let coeffs = dct.forward(&t.init()).unwrap();
    let l1 = WeightedL1 { weights: t.weights.clone() };
    let ladmm_d = ladmm_solve(&l1, &proj, &dct_dict, &coeffs, sched, stop, None).unwrap();

    for (name, out) in [("admm", &admm), ("ladmm-identity", &ladmm_i), ("ladmm-dct", &ladmm_d)] {
        let z = free_samples(&t, &out.solution);
        assert!((z[0] - oracle[0]).abs() < 1e-4 && (z[1] - oracle[1]).abs() < 1e-4, "{name}: {z:?} vs {oracle:?}");
        assert!(out.trace.len() <= 500);
        assert!(out.trace.last().unwrap().constraint_violation < 1e-6, "{name}");
    }
}

#[test]
fn dykstra_box_consensus_matches_qp() {
    let t = TinyProblem::new();
    let mut r = rng(6);
    for _ in 0..10 {
        let y = random_patches(&t.grid, 1.5, &mut r);
        let consensus = ConsensusProjector::consensus(&t.grid);
        let cube = BoxProjector { lo: 0.0, hi: 1.0 };
        let out = dykstra_project(&consensus, &cube, &y, 100_000, 1e-14).unwrap();
        let qp = box_consensus_qp(&t.grid, &y, 0.0, 1.0);
        assert!(out.projection.max_abs_diff(&qp) < 1e-6, "{}", out.projection.max_abs_diff(&qp));
    }
}

#[test]
fn ladmm_agrees_with_admm_on_tiny_fixture() {
    let t = TinyProblem::new();
    let (proj, sched, stop) = tiny_parts(&t);
    let dct = OrthoDct::new(&[3]).unwrap();
    let prior = DctWeightedL1 { dct: dct.clone(), weights: t.weights.clone() };
    let admm = admm_solve(&prior, &proj, &t.init(), sched.clone(), stop).unwrap();

    let ident = Dictionary::identity(3).unwrap();
    let ladmm_i = ladmm_solve(&prior, &proj, &ident, &t.init(), sched.clone(), stop, None).unwrap();
    assert!(ladmm_i.solution.max_abs_diff(&admm.solution) < 1e-8);

    let l1 = WeightedL1 { weights: t.weights.clone() };
    let dct_dict = Dictionary::orthonormal_dct(&[3]).unwrap();
    let coeffs = dct.forward(&t.init()).unwrap();
    let ladmm_d = ladmm_solve(&l1, &proj, &dct_dict, &coeffs, sched, stop, Some(1.0)).unwrap();
    assert!(ladmm_d.solution.max_abs_diff(&admm.solution) < 1e-6);
}
