//! Spectral operators against direct quadrature of their integral kernels.

mod common;

use std::f64::consts::PI;

use common::{cot_moment, derivative_energy, hilbert_pv, max_abs, velocity_log_kernel, TrigPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wall1d::diagnostics::compute_h1;
use wall1d::models::ModelState;
use wall1d::norms::vk_norm;
use wall1d::spectral::{
    derivative, eval_at_point, hilbert_transform, resample, velocity_from_vorticity, Field, Layout, PeriodicGrid,
};

fn rel_err(got: &[f64], want: &[f64]) -> f64 {
    let diff: Vec<f64> = got.iter().zip(want).map(|(a, b)| a - b).collect();
    max_abs(&diff) / max_abs(want).max(1e-300)
}

#[test]
fn hilbert_matches_principal_value_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [32, 64, 128] {
        for trial in 0..100 {
            let length = [PI, 2.0 * PI, 10.0][trial % 3];
            let layout = if trial % 2 == 0 { Layout::Midpoint } else { Layout::Node };
            let grid = PeriodicGrid::new(n, length, layout).unwrap();
            let bandwidth = rng.gen_range(1..n / 2);
            let p = TrigPoly::random(&mut rng, length, bandwidth);
            let h = hilbert_transform(&p.field(grid)).unwrap();
            let want: Vec<f64> = grid.points().iter().map(|&z| hilbert_pv(&p, z, 4 * n)).collect();
            let err = rel_err(h.values(), &want);
            assert!(err < 1e-8, "N = {n} trial {trial}: relative error {err:e}");
        }
    }
}

#[test]
fn hilbert_of_sine_is_minus_cosine() {
    let grid = PeriodicGrid::new(64, 2.0 * PI, Layout::Midpoint).unwrap();
    let h = hilbert_transform(&Field::from_fn(grid, f64::sin)).unwrap();
    let want: Vec<f64> = grid.points().iter().map(|z| -z.cos()).collect();
    assert!(rel_err(h.values(), &want) < 1e-14);
}

#[test]
fn velocity_matches_log_kernel_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (length, layout) in [(2.0 * PI, Layout::Midpoint), (10.0, Layout::Node), (PI, Layout::Midpoint)] {
        let grid = PeriodicGrid::new(32, length, layout).unwrap();
        let p = TrigPoly::random(&mut rng, length, 6);
        let v = velocity_from_vorticity(&p.field(grid)).unwrap();
        let want: Vec<f64> = grid.points().iter().map(|&z| velocity_log_kernel(&p, z, 20_000)).collect();
        let err = rel_err(v.values(), &want);
        assert!(err < 1e-5, "L = {length}: relative error {err:e}");
    }
}

#[test]
fn h1_matches_cotangent_moment() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for length in [PI, 2.0 * PI, 10.0] {
        let grid = PeriodicGrid::new(128, length, Layout::Midpoint).unwrap();
        let mut p = TrigPoly::random(&mut rng, length, 12);
        for t in &mut p.terms {
            t.1 = 0.0;
        }
        let omega = p.field(grid);
        let state = ModelState::new(Field::zeros(grid), omega, 0.0).unwrap();
        let want = cot_moment(&p, 4096);
        let got = compute_h1(&state).unwrap();
        assert!((got - want).abs() < 1e-10 * want.abs().max(1.0), "L = {length}: {got} vs {want}");
    }
}

#[test]
fn parseval_matches_trapezoid_energy() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for trial in 0..30 {
        let length = [PI, 2.0 * PI, 10.0][trial % 3];
        let grid = PeriodicGrid::new(64, length, Layout::Midpoint).unwrap();
        let bandwidth = rng.gen_range(1..16);
        let p = TrigPoly::random(&mut rng, length, bandwidth);
        let f = p.field(grid);
        for k in 0..=3u32 {
            let got = vk_norm(&f, k).unwrap();
            let want = derivative_energy(&p, k, 256).sqrt();
            assert!((got - want).abs() < 1e-10 * want, "trial {trial} k {k}: {got} vs {want}");
        }
    }
}

#[test]
fn derivatives_match_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for layout in [Layout::Node, Layout::Midpoint] {
        let grid = PeriodicGrid::new(64, 10.0, layout).unwrap();
        let p = TrigPoly::random(&mut rng, 10.0, 20);
        let f = p.field(grid);
        for order in 1..=4u32 {
            let d = derivative(&f, order).unwrap();
            let want: Vec<f64> = grid.points().iter().map(|&z| p.eval_derivative(z, order)).collect();
            let err = rel_err(d.values(), &want);
            assert!(err < 1e-11, "order {order}: relative error {err:e}");
        }
    }
}

#[test]
fn interpolant_and_resampling_reproduce_the_polynomial() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let grid = PeriodicGrid::new(64, 2.0 * PI, Layout::Midpoint).unwrap();
    let p = TrigPoly::random(&mut rng, 2.0 * PI, 25);
    let f = p.field(grid);
    for _ in 0..50 {
        let z = rng.gen_range(-10.0..10.0);
        assert!((eval_at_point(&f, z) - p.eval(z)).abs() < 1e-12);
    }
    for layout in [Layout::Node, Layout::Midpoint] {
        let fine = grid.refined(4).unwrap().with_layout(layout);
        let r = resample(&f, fine).unwrap();
        let want: Vec<f64> = fine.points().iter().map(|&z| p.eval(z)).collect();
        assert!(rel_err(r.values(), &want) < 1e-12);
    }
}
