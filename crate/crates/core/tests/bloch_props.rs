use std::f64::consts::PI;

use nhwind::bloch::{mat_norm, mat_vec, pair, vec_norm, SIGMA_X, SIGMA_Z};
use nhwind::{eig2, Band, BlochModel, EigenSystem2, Error, Gauge, Mat2, C64};
use proptest::prelude::*;

const GRID: usize = 1024;

fn residual(h: &Mat2, e: C64, u: &[C64; 2]) -> f64 {
    let hu = mat_vec(h, u);
    vec_norm(&[hu[0] - e * u[0], hu[1] - e * u[1]]) / vec_norm(u)
}

fn check_residuals(h: &Mat2, sys: &EigenSystem2) {
    let scale = mat_norm(h);
    for band in [Band::Plus, Band::Minus] {
        let r = residual(h, sys.energy(band), &sys.right(band));
        assert!(r <= 1e-12 * scale, "right residual {r:e} for {band:?}");
        // left: lᵀ H = E lᵀ, i.e. Hᵀ l = E l
        let ht = [[h[0][0], h[1][0]], [h[0][1], h[1][1]]];
        let r = residual(&ht, sys.energy(band), &sys.left(band));
        assert!(r <= 1e-12 * scale, "left residual {r:e} for {band:?}");
    }
}

fn grid() -> impl Iterator<Item = f64> {
    (0..GRID).map(|i| 2.0 * PI * i as f64 / GRID as f64)
}

#[test]
fn lee_residuals_on_grid() {
    let model = BlochModel::lee(0.52, 0.5, 1.0);
    for gauge in Gauge::ALL {
        for k in grid() {
            let h = model.hk(k);
            let sys = eig2(&h, gauge).unwrap();
            check_residuals(&h, &sys);
        }
    }
}

#[test]
fn demo_residuals_on_grid() {
    let model = BlochModel::demo();
    for gauge in [Gauge::FirstComponentOne, Gauge::SecondComponentOne] {
        for k in grid() {
            let h = model.hk(k);
            let sys = eig2(&h, gauge).unwrap();
            check_residuals(&h, &sys);
        }
    }
}

#[test]
fn demo_rejects_transpose_gauge() {
    let h = BlochModel::demo().hk(0.3);
    assert!(matches!(eig2(&h, Gauge::Transpose), Err(Error::TransposeGauge { .. })));
}

#[test]
fn fourier_blocks_reproduce_x_sigma_x_plus_z_sigma_z() {
    let (v, r, gamma) = (0.52, 0.5, 1.0);
    let model = BlochModel::lee(v, r, gamma);
    for k in grid() {
        let x = C64::new(v + r * k.cos(), 0.0);
        let z = C64::new(r * k.sin(), gamma / 2.0);
        let h = model.hk(k);
        for i in 0..2 {
            for j in 0..2 {
                let expected = SIGMA_X[i][j] * x + SIGMA_Z[i][j] * z;
                assert!((h[i][j] - expected).norm() <= 1e-14, "k = {k}");
            }
        }
    }
}

#[test]
fn biorthogonal_in_inverse_gauges() {
    let model = BlochModel::lee(0.52, 0.5, 1.0);
    for gauge in [Gauge::FirstComponentOne, Gauge::SecondComponentOne] {
        for k in grid() {
            let sys = eig2(&model.hk(k), gauge).unwrap();
            if (sys.e_plus - sys.e_minus).norm() <= 1e-8 {
                continue;
            }
            for a in [Band::Plus, Band::Minus] {
                for b in [Band::Plus, Band::Minus] {
                    let want = if a == b { 1.0 } else { 0.0 };
                    let got = pair(&sys.left(a), &sys.right(b));
                    assert!((got - want).norm() <= 1e-10, "k = {k}, {a:?}/{b:?}: {got}");
                }
            }
        }
    }
}

#[test]
fn hermitian_limit_is_real_with_conjugate_left_vectors() {
    let model = BlochModel::lee(0.52, 0.5, 0.0);
    for k in grid() {
        let sys = eig2(&model.hk(k), Gauge::FirstComponentOne).unwrap();
        for band in [Band::Plus, Band::Minus] {
            assert!(sys.energy(band).im.abs() <= 1e-12);
            // l ∝ conj(u): the 2x2 determinant of (l, conj u) vanishes
            let (l, u) = (sys.left(band), sys.right(band));
            let det = l[0] * u[1].conj() - l[1] * u[0].conj();
            assert!(det.norm() <= 1e-12 * vec_norm(&l) * vec_norm(&u));
        }
    }
}

#[test]
fn first_gauge_pins_first_component_exactly() {
    let model = BlochModel::lee(0.52, 0.5, 1.0);
    for k in grid() {
        let sys = eig2(&model.hk(k), Gauge::FirstComponentOne).unwrap();
        assert_eq!(sys.u_plus[0], C64::new(1.0, 0.0));
        assert_eq!(sys.u_minus[0], C64::new(1.0, 0.0));
    }
}

fn complex() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| C64::new(re, im))
}

proptest! {
    #[test]
    fn generic_matrices_satisfy_residual_bound(
        a in complex(), b in complex(), c in complex(), d in complex()
    ) {
        let h = [[a, b], [c, d]];
        for gauge in [Gauge::FirstComponentOne, Gauge::SecondComponentOne] {
            match eig2(&h, gauge) {
                Ok(sys) => check_residuals(&h, &sys),
                Err(Error::GaugeSingular { .. }) | Err(Error::Defective { .. }) => {}
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }
    }

    #[test]
    fn lee_family_residuals(
        v in 0.0..1.5f64, r in 0.0..1.5f64, gamma in 0.0..2.0f64, k in 0.0..(2.0 * PI)
    ) {
        let h = BlochModel::lee(v, r, gamma).hk(k);
        match eig2(&h, Gauge::Transpose) {
            Ok(sys) => check_residuals(&h, &sys),
            Err(Error::GaugeSingular { .. }) | Err(Error::Defective { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}
