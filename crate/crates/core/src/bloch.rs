//! Two-band Bloch Hamiltonians and their closed-form eigensystems.
//!
//! A model is stored as three 2x2 Fourier blocks,
//!
//! ```text
//! H(k) = T₋ e^{-ik} + T₀ + T₊ e^{+ik}
//! ```
//!
//! so that the same data drives both the momentum-space analysis and the
//! real-space chain construction in [`crate::lattice`].

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat2 = [[C64; 2]; 2];
pub type Vec2 = [C64; 2];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

pub const SIGMA_0: Mat2 = [[ONE, ZERO], [ZERO, ONE]];
pub const SIGMA_X: Mat2 = [[ZERO, ONE], [ONE, ZERO]];
pub const SIGMA_Y: Mat2 = [[ZERO, C64::new(0.0, -1.0)], [I, ZERO]];
pub const SIGMA_Z: Mat2 = [[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]];

/// Relative size below which the gauge-fixed eigenvector component counts as zero.
pub const GAUGE_SINGULAR_TOL: f64 = 1e-12;
/// Minimum singular-value ratio of the eigenvector matrix before it is declared defective.
pub const DEFECTIVE_TOL: f64 = 1e-10;

pub(crate) fn mat_zero() -> Mat2 {
    [[ZERO; 2]; 2]
}

pub(crate) fn mat_add(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = mat_zero();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][j] + b[i][j];
        }
    }
    out
}

pub(crate) fn mat_scale(a: &Mat2, s: C64) -> Mat2 {
    let mut out = *a;
    for row in out.iter_mut() {
        for x in row.iter_mut() {
            *x *= s;
        }
    }
    out
}

pub(crate) fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = mat_zero();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub(crate) fn mat_adjoint(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

pub fn mat_vec(a: &Mat2, v: &Vec2) -> Vec2 {
    [
        a[0][0] * v[0] + a[0][1] * v[1],
        a[1][0] * v[0] + a[1][1] * v[1],
    ]
}

/// Frobenius norm.
pub fn mat_norm(a: &Mat2) -> f64 {
    a.iter().flatten().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_norm(v: &Vec2) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

/// Bilinear pairing `<<l|u>` (no complex conjugation).
pub fn pair(l: &Vec2, u: &Vec2) -> C64 {
    l[0] * u[0] + l[1] * u[1]
}

/// Two-band Bloch Hamiltonian given by its nearest-cell Fourier blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct BlochModel {
    /// Coefficient of `e^{-ik}`; the sub-diagonal block of the real-space chain.
    pub hop_minus: Mat2,
    pub hop_zero: Mat2,
    /// Coefficient of `e^{+ik}`; the super-diagonal block of the real-space chain.
    pub hop_plus: Mat2,
    pub label: String,
}

impl BlochModel {
    pub fn new(hop_minus: Mat2, hop_zero: Mat2, hop_plus: Mat2, label: impl Into<String>) -> Self {
        Self {
            hop_minus,
            hop_zero,
            hop_plus,
            label: label.into(),
        }
    }

    /// `H(k) = x(k) σx + z(k) σz` with `x = v + r cos k` and `z = r sin k + iγ/2`.
    ///
    /// The PT-symmetric chain whose bands braid for `|v - r| < γ/2`.
    pub fn lee(v: f64, r: f64, gamma: f64) -> Self {
        let half_r = C64::new(r / 2.0, 0.0);
        let hop_zero = mat_add(
            &mat_scale(&SIGMA_X, C64::new(v, 0.0)),
            &mat_scale(&SIGMA_Z, C64::new(0.0, gamma / 2.0)),
        );
        // cos k σx + sin k σz = ½(σx - iσz) e^{ik} + ½(σx + iσz) e^{-ik}
        let hop_plus = mat_add(
            &mat_scale(&SIGMA_X, half_r),
            &mat_scale(&SIGMA_Z, -I * half_r),
        );
        let hop_minus = mat_add(
            &mat_scale(&SIGMA_X, half_r),
            &mat_scale(&SIGMA_Z, I * half_r),
        );
        Self::new(
            hop_minus,
            hop_zero,
            hop_plus,
            format!("lee(v={v}, r={r}, gamma={gamma})"),
        )
    }

    /// `H(k) = cos k σx + sin k σy`.
    pub fn demo() -> Self {
        let half = C64::new(0.5, 0.0);
        let hop_plus = mat_add(&mat_scale(&SIGMA_X, half), &mat_scale(&SIGMA_Y, -I * half));
        let hop_minus = mat_add(&mat_scale(&SIGMA_X, half), &mat_scale(&SIGMA_Y, I * half));
        Self::new(hop_minus, mat_zero(), hop_plus, "demo")
    }

    /// A k-independent model, `H(k) = h` for every k.
    pub fn constant(h: Mat2) -> Self {
        Self::new(mat_zero(), h, mat_zero(), "constant")
    }

    pub fn hk(&self, k: f64) -> Mat2 {
        let ep = C64::from_polar(1.0, k);
        let em = ep.conj();
        mat_add(
            &mat_add(&mat_scale(&self.hop_minus, em), &self.hop_zero),
            &mat_scale(&self.hop_plus, ep),
        )
    }

    /// `∂H/∂k`.
    pub fn dhk(&self, k: f64) -> Mat2 {
        let ep = C64::from_polar(1.0, k);
        let em = ep.conj();
        mat_add(
            &mat_scale(&self.hop_minus, -I * em),
            &mat_scale(&self.hop_plus, I * ep),
        )
    }

    /// The same model after the unitary basis change `U = (1 + iσx)/√2`,
    /// which maps `σz -> σy` and leaves `σx` fixed.
    ///
    /// For the Lee model this is the chiral (off-diagonal) form
    /// `H = x σx + z σy`, in which a first-component gauge stays regular
    /// even when `x(k)` changes sign.
    pub fn chiral_basis(&self) -> Self {
        let u = chiral_rotation();
        let ud = mat_adjoint(&u);
        let conj = |m: &Mat2| mat_mul(&mat_mul(&u, m), &ud);
        Self::new(
            conj(&self.hop_minus),
            conj(&self.hop_zero),
            conj(&self.hop_plus),
            format!("{} [chiral basis]", self.label),
        )
    }
}

pub(crate) fn chiral_rotation() -> Mat2 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    mat_scale(&mat_add(&SIGMA_0, &mat_scale(&SIGMA_X, I)), C64::new(s, 0.0))
}

/// How the eigenvector scale is fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gauge {
    /// `u = (1, ·)`; left vectors are rows of the inverse eigenvector matrix.
    FirstComponentOne,
    /// `u = (·, 1)`; left vectors are rows of the inverse eigenvector matrix.
    SecondComponentOne,
    /// `u = (1, ·)` with the left vector taken as `uᵀ`. Only valid for
    /// complex-symmetric Hamiltonians.
    Transpose,
}

impl Gauge {
    pub const ALL: [Gauge; 3] = [
        Gauge::FirstComponentOne,
        Gauge::SecondComponentOne,
        Gauge::Transpose,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Gauge::FirstComponentOne => "first",
            Gauge::SecondComponentOne => "second",
            Gauge::Transpose => "transpose",
        }
    }

    /// Index of the eigenvector component pinned to 1.
    pub fn fixed_component(self) -> usize {
        match self {
            Gauge::FirstComponentOne | Gauge::Transpose => 0,
            Gauge::SecondComponentOne => 1,
        }
    }
}

impl fmt::Display for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Gauge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(Gauge::FirstComponentOne),
            "second" => Ok(Gauge::SecondComponentOne),
            "transpose" => Ok(Gauge::Transpose),
            other => Err(Error::InvalidParameter(format!("unknown gauge '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Band {
    Plus,
    Minus,
}

impl Band {
    pub fn other(self) -> Band {
        match self {
            Band::Plus => Band::Minus,
            Band::Minus => Band::Plus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Band::Plus => "plus",
            Band::Minus => "minus",
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Eigenvalues with right and left eigenvectors of a 2x2 matrix in a declared gauge.
///
/// `Plus` is the `+` branch of the principal square root, `E± = tr/2 ± √q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenSystem2 {
    pub e_plus: C64,
    pub e_minus: C64,
    pub u_plus: Vec2,
    pub u_minus: Vec2,
    pub l_plus: Vec2,
    pub l_minus: Vec2,
    pub gauge: Gauge,
}

impl EigenSystem2 {
    pub fn energy(&self, band: Band) -> C64 {
        match band {
            Band::Plus => self.e_plus,
            Band::Minus => self.e_minus,
        }
    }

    pub fn right(&self, band: Band) -> Vec2 {
        match band {
            Band::Plus => self.u_plus,
            Band::Minus => self.u_minus,
        }
    }

    pub fn left(&self, band: Band) -> Vec2 {
        match band {
            Band::Plus => self.l_plus,
            Band::Minus => self.l_minus,
        }
    }
}

/// Unnormalized right eigenvector of `h` for eigenvalue `e`, built from
/// whichever row of `h - e` is better conditioned.
pub(crate) fn raw_eigenvector(h: &Mat2, e: C64) -> Vec2 {
    let [[a, b], [c, d]] = *h;
    let from_row0 = [b, e - a];
    let from_row1 = [e - d, c];
    if vec_norm(&from_row0) >= vec_norm(&from_row1) {
        from_row0
    } else {
        from_row1
    }
}

/// `(E₊, E₋)` on the principal branch of the square root.
pub fn eigenvalues2(h: &Mat2) -> (C64, C64) {
    let [[a, b], [c, d]] = *h;
    let half_trace = (a + d) * 0.5;
    let half_diff = (a - d) * 0.5;
    let s = (half_diff * half_diff + b * c).sqrt();
    (half_trace + s, half_trace - s)
}

fn fix_gauge(raw: Vec2, gauge: Gauge) -> Result<Vec2> {
    let fixed = gauge.fixed_component();
    let norm = vec_norm(&raw);
    let magnitude = if norm > 0.0 { raw[fixed].norm() / norm } else { 0.0 };
    if magnitude < GAUGE_SINGULAR_TOL {
        return Err(Error::GaugeSingular {
            gauge: gauge.name(),
            k: f64::NAN,
            magnitude,
        });
    }
    let scale = raw[fixed].inv();
    let mut u = [raw[0] * scale, raw[1] * scale];
    u[fixed] = ONE;
    Ok(u)
}

/// Closed-form eigensystem of a 2x2 complex matrix.
///
/// Errors with [`Error::Defective`] at (numerical) exceptional points and with
/// [`Error::GaugeSingular`] when the requested gauge cannot be imposed. The
/// gauge is never switched silently.
pub fn eig2(h: &Mat2, gauge: Gauge) -> Result<EigenSystem2> {
    let h_norm = mat_norm(h);
    let (e_plus, e_minus) = eigenvalues2(h);

    let [[a, b], [c, d]] = *h;
    let scalar = (a - d).norm() + b.norm() + c.norm() <= 1e-14 * h_norm;
    let (raw_plus, raw_minus) = if scalar {
        // every vector is an eigenvector of a multiple of the identity
        ([ONE, ZERO], [ZERO, ONE])
    } else {
        (raw_eigenvector(h, e_plus), raw_eigenvector(h, e_minus))
    };

    let ratio = condition_ratio(&raw_plus, &raw_minus);
    if ratio < DEFECTIVE_TOL {
        return Err(Error::Defective {
            ratio,
            threshold: DEFECTIVE_TOL,
        });
    }

    let u_plus = fix_gauge(raw_plus, gauge)?;
    let u_minus = fix_gauge(raw_minus, gauge)?;

    let (l_plus, l_minus) = match gauge {
        Gauge::Transpose => {
            let asymmetry = (b - c).norm();
            if asymmetry > 1e-12 * h_norm.max(f64::MIN_POSITIVE) {
                return Err(Error::TransposeGauge {
                    k: f64::NAN,
                    asymmetry,
                });
            }
            (u_plus, u_minus)
        }
        _ => {
            let det = u_plus[0] * u_minus[1] - u_minus[0] * u_plus[1];
            let inv = det.inv();
            (
                [u_minus[1] * inv, -u_minus[0] * inv],
                [-u_plus[1] * inv, u_plus[0] * inv],
            )
        }
    };

    Ok(EigenSystem2 {
        e_plus,
        e_minus,
        u_plus,
        u_minus,
        l_plus,
        l_minus,
        gauge,
    })
}

/// `σ_min / σ_max` of the matrix whose columns are the unit-normalized inputs.
fn condition_ratio(p: &Vec2, q: &Vec2) -> f64 {
    let np = vec_norm(p);
    let nq = vec_norm(q);
    if np == 0.0 || nq == 0.0 {
        return 0.0;
    }
    let p = [p[0] / np, p[1] / np];
    let q = [q[0] / nq, q[1] / nq];
    let overlap = (p[0].conj() * q[0] + p[1].conj() * q[1]).norm();
    let det = (p[0] * q[1] - q[0] * p[1]).norm();
    // σ_max σ_min = |det|, σ_max² = 1 + |<p, q>|
    det / (1.0 + overlap)
}

impl Error {
    /// Attach the momentum at which a per-k failure occurred.
    pub fn at_k(self, k: f64) -> Self {
        match self {
            Error::GaugeSingular {
                gauge, magnitude, ..
            } => Error::GaugeSingular {
                gauge,
                k,
                magnitude,
            },
            Error::TransposeGauge { asymmetry, .. } => Error::TransposeGauge { k, asymmetry },
            other => other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn assert_mat_close(a: &Mat2, b: &Mat2, tol: f64) {
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (a[i][j] - b[i][j]).norm() <= tol,
                    "entry ({i},{j}): {} vs {}",
                    a[i][j],
                    b[i][j]
                );
            }
        }
    }

    #[test]
    fn lee_hk_at_zero() {
        let h = BlochModel::lee(0.52, 0.5, 1.0).hk(0.0);
        let expected = [[c(0.0, 0.5), c(1.02, 0.0)], [c(1.02, 0.0), c(0.0, -0.5)]];
        assert_mat_close(&h, &expected, 1e-15);
    }

    #[test]
    fn demo_hk_at_zero() {
        let h = BlochModel::demo().hk(0.0);
        assert_mat_close(&h, &SIGMA_X, 1e-15);
    }

    #[test]
    fn hermitian_lee_at_pi() {
        let h = BlochModel::lee(0.52, 0.5, 0.0).hk(PI);
        let expected = [[ZERO, c(0.02, 0.0)], [c(0.02, 0.0), ZERO]];
        assert_mat_close(&h, &expected, 1e-15);
    }

    #[test]
    fn lee_blocks_reproduce_pauli_form() {
        let (v, r, gamma) = (0.52, 0.5, 1.0);
        let model = BlochModel::lee(v, r, gamma);
        for i in 0..1024 {
            let k = 2.0 * PI * i as f64 / 1024.0;
            let x = C64::new(v + r * k.cos(), 0.0);
            let z = C64::new(r * k.sin(), gamma / 2.0);
            let expected = mat_add(&mat_scale(&SIGMA_X, x), &mat_scale(&SIGMA_Z, z));
            assert_mat_close(&model.hk(k), &expected, 1e-14);
        }
    }

    #[test]
    fn dhk_matches_central_difference() {
        let model = BlochModel::lee(0.3, 0.7, 0.4);
        let step = 1e-5;
        for &k in &[0.0, 0.7, 2.0, 4.4] {
            let fd = mat_scale(
                &mat_add(&model.hk(k + step), &mat_scale(&model.hk(k - step), -ONE)),
                c(0.5 / step, 0.0),
            );
            assert_mat_close(&model.dhk(k), &fd, 1e-9);
        }
    }

    #[test]
    fn chiral_rotation_maps_sigma_z_to_sigma_y() {
        let u = chiral_rotation();
        let rotated = mat_mul(&mat_mul(&u, &SIGMA_Z), &mat_adjoint(&u));
        assert_mat_close(&rotated, &SIGMA_Y, 1e-15);
        let rotated_x = mat_mul(&mat_mul(&u, &SIGMA_X), &mat_adjoint(&u));
        assert_mat_close(&rotated_x, &SIGMA_X, 1e-15);
    }

    #[test]
    fn hermitian_symmetric_matrix_eigenvectors() {
        let h = [[ZERO, c(1.02, 0.0)], [c(1.02, 0.0), ZERO]];
        let es = eig2(&h, Gauge::FirstComponentOne).unwrap();
        assert_abs_diff_eq!(es.e_plus.re, 1.02, epsilon = 1e-15);
        assert_abs_diff_eq!(es.e_minus.re, -1.02, epsilon = 1e-15);
        assert_eq!(es.u_plus[0], ONE);
        assert_abs_diff_eq!(es.u_plus[1].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(es.u_minus[1].re, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn lee_eigenvector_matches_general_solver() {
        let h = BlochModel::lee(0.52, 0.5, 1.0).hk(0.0);
        let es = eig2(&h, Gauge::FirstComponentOne).unwrap();
        let e = C64::new(0.7904, 0.0).sqrt();
        assert!((es.e_plus - e).norm() < 1e-14);
        assert!((es.u_plus[1] - (e - c(0.0, 0.5)) / 1.02).norm() < 1e-14);

        // oracle: general-purpose dense eigensolver
        let m = faer::Mat::<C64>::from_fn(2, 2, |i, j| h[i][j]);
        let eig = m.eigen().unwrap();
        let (vals, vecs) = (eig.S(), eig.U());
        let idx = (0..2)
            .min_by(|&i, &j| {
                (vals[i] - e)
                    .norm()
                    .partial_cmp(&(vals[j] - e).norm())
                    .unwrap()
            })
            .unwrap();
        assert!((vals[idx] - e).norm() < 1e-12);
        let ratio = vecs[(1, idx)] / vecs[(0, idx)];
        assert!((ratio - es.u_plus[1]).norm() < 1e-12);
    }

    #[test]
    fn jordan_block_is_defective() {
        let h = [[ZERO, ZERO], [ONE, ZERO]];
        assert!(matches!(
            eig2(&h, Gauge::FirstComponentOne),
            Err(Error::Defective { .. })
        ));
    }

    #[test]
    fn vanishing_fixed_component_is_singular() {
        // x(k) = 0: the eigenvector of the -z eigenvalue is (0, 1)
        let h = [[c(0.3, 0.0), ZERO], [ZERO, c(-0.3, 0.0)]];
        let err = eig2(&h, Gauge::FirstComponentOne).unwrap_err();
        assert!(matches!(err, Error::GaugeSingular { .. }));
        assert!(eig2(&h, Gauge::SecondComponentOne).is_err());
    }

    #[test]
    fn transpose_gauge_rejects_asymmetric_matrix() {
        let h = BlochModel::demo().hk(0.4);
        let err = eig2(&h, Gauge::Transpose).unwrap_err().at_k(0.4);
        assert!(matches!(err, Error::TransposeGauge { k, .. } if k == 0.4));
    }

    #[test]
    fn transpose_gauge_left_is_transpose() {
        let h = BlochModel::lee(0.52, 0.5, 1.0).hk(1.3);
        let es = eig2(&h, Gauge::Transpose).unwrap();
        assert_eq!(es.l_plus, es.u_plus);
        assert_eq!(es.l_minus, es.u_minus);
        // still a genuine left eigenvector because H is symmetric
        let lh = [
            es.l_plus[0] * h[0][0] + es.l_plus[1] * h[1][0],
            es.l_plus[0] * h[0][1] + es.l_plus[1] * h[1][1],
        ];
        for i in 0..2 {
            assert!((lh[i] - es.e_plus * es.l_plus[i]).norm() < 1e-13);
        }
    }

    #[test]
    fn gauges_parse_and_print() {
        for g in Gauge::ALL {
            assert_eq!(g.name().parse::<Gauge>().unwrap(), g);
        }
        assert!("diagonal".parse::<Gauge>().is_err());
    }

    #[test]
    fn scalar_matrix_uses_canonical_basis() {
        let h = mat_scale(&SIGMA_0, c(0.5, 0.1));
        let es = eig2(&h, Gauge::FirstComponentOne);
        // (0, 1) cannot have its first component pinned
        assert!(matches!(es, Err(Error::GaugeSingular { .. })));
        let zero = eig2(&mat_zero(), Gauge::FirstComponentOne);
        assert!(zero.is_err());
    }
}
