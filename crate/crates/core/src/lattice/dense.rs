//! Dense non-Hermitian eigendecomposition with left and right eigenvectors.
//!
//! The matrix is first balanced by a power-of-two diagonal similarity
//! `B = D⁻¹ H D` (no permutations), then handed to faer's complex
//! Hessenberg/Schur eigensolver running sequentially. Eigenvalues are
//! invariant under the scaling; right eigenvectors are mapped back as `x = D y`.

use std::cmp::Ordering;

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::linalg::solvers::DenseSolveCore;
use faer::{Mat, MatRef, Par};

use crate::bloch::C64;
use super::banded;
use crate::error::{Error, Result};

/// Residual bound `‖Hv - λv‖ ≤ RESIDUAL_TOL·‖H‖₁` for unit `v`.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Maximum eigenvalue distance between a right and a left partner.
pub const MATCH_TOL: f64 = 1e-8;

const RADIX: f64 = 2.0;

/// Diagonal similarity applied before the QR iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct Balancing {
    /// `D_ii`; all ones when balancing changed nothing.
    pub scaling: Vec<f64>,
    pub sweeps: usize,
}

impl Balancing {
    pub fn is_identity(&self) -> bool {
        self.scaling.iter().all(|&d| d == 1.0)
    }

    /// `max D / min D`.
    pub fn condition(&self) -> f64 {
        let max = self.scaling.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.scaling.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }
}

/// Right eigenpairs of a dense matrix, sorted by `(Re λ, Im λ)`.
#[derive(Clone, Debug)]
pub struct DenseEigen {
    pub eigenvalues: Vec<C64>,
    /// Unit-norm right eigenvectors, one per column.
    pub vectors: Mat<C64>,
    pub balancing: Balancing,
    /// `max_i ‖Hvᵢ - λᵢvᵢ‖ / ‖H‖₁`.
    pub max_residual: f64,
}

/// Maximum absolute column sum.
pub fn norm_one(h: MatRef<'_, C64>) -> f64 {
    (0..h.ncols())
        .map(|j| (0..h.nrows()).map(|i| h[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Parlett–Reinsch scaling: returns `D⁻¹ H D` and `D`.
pub fn balance(h: MatRef<'_, C64>) -> (Mat<C64>, Balancing) {
    let n = h.nrows();
    let mut b = h.to_owned();
    let mut scaling = vec![1.0; n];
    let mut sweeps = 0;
    loop {
        sweeps += 1;
        let mut converged = true;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += b[(j, i)].norm_sqr();
                    row += b[(i, j)].norm_sqr();
                }
            }
            let (mut c, mut r) = (col.sqrt(), row.sqrt());
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let total = c + r;
            let mut f = 1.0;
            let g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX;
                r /= RADIX;
            }
            let g = r * RADIX;
            while c >= g {
                f /= RADIX;
                c /= RADIX;
                r *= RADIX;
            }
            if c + r < 0.95 * total {
                converged = false;
                scaling[i] *= f;
                for j in 0..n {
                    b[(i, j)] /= f;
                    b[(j, i)] *= f;
                }
            }
        }
        if converged || sweeps >= 100 {
            break;
        }
    }
    (b, Balancing { scaling, sweeps })
}

fn compare_eigenvalues(a: &C64, b: &C64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Raw eigendecomposition of `h` (no balancing, no sorting).
fn evd_raw(h: MatRef<'_, C64>) -> Result<(Vec<C64>, Mat<C64>)> {
    let n = h.nrows();
    let mut s = faer::diag::Diag::<C64>::zeros(n);
    let mut u = Mat::<C64>::zeros(n, n);
    let par = Par::Seq;
    let mut mem = MemBuffer::new(evd::evd_scratch::<C64>(
        n,
        ComputeEigenvectors::No,
        ComputeEigenvectors::Yes,
        par,
        Default::default(),
    ));
    evd::evd_cplx(
        h,
        s.as_mut(),
        None,
        Some(u.as_mut()),
        par,
        MemStack::new(&mut mem),
        Default::default(),
    )
    .map_err(|_| Error::SolverFailure {
        dim: n,
        norm: norm_one(h),
    })?;
    let values = (0..n).map(|i| s[i]).collect();
    Ok((values, u))
}

fn normalize_columns(m: &mut Mat<C64>) {
    for j in 0..m.ncols() {
        let mut col: Vec<C64> = (0..m.nrows()).map(|i| m[(i, j)]).collect();
        banded::normalize(&mut col);
        for (i, z) in col.into_iter().enumerate() {
            m[(i, j)] = z;
        }
    }
}

/// Recomputes columns whose Schur back-substitution overflowed.
fn repair_columns(h: MatRef<'_, C64>, values: &[C64], vecs: &mut Mat<C64>) -> usize {
    let scale = norm_one(h);
    let band = banded::bandwidths(h);
    let mut repaired = 0;
    for (j, &lambda) in values.iter().enumerate() {
        if vecs.col(j).is_all_finite() {
            continue;
        }
        let v = banded::inverse_iteration(h, band, lambda, scale, RESIDUAL_TOL * 1e-3);
        for (i, z) in v.into_iter().enumerate() {
            vecs[(i, j)] = z;
        }
        repaired += 1;
    }
    repaired
}

/// Balanced eigendecomposition with eigenvectors mapped back to `h`'s basis,
/// unsorted.
fn balanced_evd(h: MatRef<'_, C64>) -> Result<(Vec<C64>, Mat<C64>, Balancing)> {
    let (b, balancing) = balance(h);
    if b.as_ref().is_all_finite() {
        let (values, mut vecs) = evd_raw(b.as_ref())?;
        repair_columns(b.as_ref(), &values, &mut vecs);
        for (i, d) in balancing.scaling.iter().enumerate() {
            for j in 0..vecs.ncols() {
                vecs[(i, j)] *= *d;
            }
        }
        normalize_columns(&mut vecs);
        Ok((values, vecs, balancing))
    } else {
        Err(Error::SolverFailure {
            dim: h.nrows(),
            norm: norm_one(h),
        })
    }
}

fn residual(h: MatRef<'_, C64>, lambda: C64, v: faer::ColRef<'_, C64>) -> f64 {
    let hv = h * v;
    (0..v.nrows())
        .map(|i| (hv[i] - lambda * v[i]).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Full eigendecomposition of a square complex matrix.
///
/// Output is sorted by `(Re λ, Im λ)` ascending; every pair satisfies the
/// residual bound [`RESIDUAL_TOL`] or the call fails with
/// [`Error::SolverFailure`].
pub fn eig_dense(h: MatRef<'_, C64>) -> Result<DenseEigen> {
    let n = h.nrows();
    if n != h.ncols() {
        return Err(Error::InvalidParameter(format!(
            "matrix must be square, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    if !h.is_all_finite() {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    let scale = norm_one(h);
    let (values, vecs, balancing) = balanced_evd(h)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| compare_eigenvalues(&values[a], &values[b]));
    let eigenvalues: Vec<C64> = order.iter().map(|&i| values[i]).collect();
    let vectors = Mat::from_fn(n, n, |i, j| vecs[(i, order[j])]);

    let max_residual = (0..n)
        .map(|j| residual(h, eigenvalues[j], vectors.col(j)))
        .fold(0.0, |acc, r| if r.is_nan() { f64::NAN } else { acc.max(r) })
        / scale.max(f64::MIN_POSITIVE);
    if max_residual.is_nan() || max_residual > RESIDUAL_TOL {
        return Err(Error::SolverFailure { dim: n, norm: scale });
    }
    Ok(DenseEigen {
        eigenvalues,
        vectors,
        balancing,
        max_residual,
    })
}

/// Left eigenvectors `lᵢᵀ H = λᵢ lᵢᵀ`, returned as columns and biorthonormal
/// to `right.vectors` under the bilinear pairing: `lᵢᵀ vⱼ = δᵢⱼ`.
///
/// They are the right eigenvectors of `Hᵀ`, paired with `right` by eigenvalue.
/// Eigenvalues closer than [`MATCH_TOL`] form clusters that are
/// biorthonormalized as blocks. Strongly non-normal matrices can have a
/// transpose whose computed spectrum is far off (QR is not symmetric under
/// transposition); clusters left without partners are then filled by inverse
/// iteration on `Hᵀ - λI` at the eigenvalues of `right`.
pub fn left_vectors(h: MatRef<'_, C64>, right: &DenseEigen) -> Result<Mat<C64>> {
    let n = h.nrows();
    let scale = norm_one(h);
    let ht = h.transpose().to_owned();
    let (values_t, vecs_t, _) = balanced_evd(ht.as_ref())?;
    let lambda = &right.eigenvalues;

    let roots = clusters(lambda);

    // each left eigenvalue joins the cluster of its nearest right eigenvalue
    let mut left_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (t, mu) in values_t.iter().enumerate() {
        let (nearest, distance) = lambda
            .iter()
            .enumerate()
            .map(|(i, l)| (i, (l - mu).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty spectrum");
        if distance <= MATCH_TOL {
            left_of[roots[nearest]].push(t);
        }
    }

    let band = banded::bandwidths(ht.as_ref());
    let mut left = Mat::<C64>::zeros(n, n);
    for root in 0..n {
        let members: Vec<usize> = (0..n).filter(|&i| roots[i] == root).collect();
        if members.is_empty() {
            continue;
        }
        let m = members.len();
        let partners: Vec<Vec<C64>> = if left_of[root].len() == m {
            left_of[root]
                .iter()
                .map(|&t| (0..n).map(|i| vecs_t[(i, t)]).collect())
                .collect()
        } else {
            let shift = members.iter().map(|&i| lambda[i]).sum::<C64>() / m as f64;
            let basis = banded::subspace_iteration(ht.as_ref(), band, shift, scale, RESIDUAL_TOL * 1e-3, m);
            let r = banded::block_residual(ht.as_ref(), band.0, band.1, &basis);
            if r.is_nan() || r > RESIDUAL_TOL * scale {
                return Err(Error::MatchFailure {
                    index: members[0],
                    distance: r / scale.max(f64::MIN_POSITIVE),
                    tolerance: RESIDUAL_TOL,
                });
            }
            basis
        };
        // overlap M = Yᵀ V, then L = Y M⁻ᵀ gives Lᵀ V = I on the block
        let overlap = Mat::from_fn(m, m, |a, b| {
            let v = right.vectors.col(members[b]);
            (0..n).map(|i| partners[a][i] * v[i]).sum::<C64>()
        });
        let inv = overlap.partial_piv_lu().inverse();
        if !inv.as_ref().is_all_finite() {
            return Err(Error::MatchFailure {
                index: members[0],
                distance: 0.0,
                tolerance: MATCH_TOL,
            });
        }
        for (b, &col) in members.iter().enumerate() {
            for i in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for (a, y) in partners.iter().enumerate() {
                    acc += y[i] * inv[(b, a)];
                }
                left[(i, col)] = acc;
            }
        }
    }
    Ok(left)
}

/// Single-linkage clusters of eigenvalues closer than [`MATCH_TOL`]; entry
/// `i` is the smallest index of `i`'s cluster.
fn clusters(lambda: &[C64]) -> Vec<usize> {
    let n = lambda.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(c: &mut [usize], i: usize) -> usize {
        let mut root = i;
        while c[root] != root {
            root = c[root];
        }
        let mut i = i;
        while c[i] != root {
            let next = c[i];
            c[i] = root;
            i = next;
        }
        root
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (lambda[i] - lambda[j]).norm() <= MATCH_TOL {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    (0..n).map(|i| find(&mut parent, i)).collect()
}

/// `σ_min / σ_max` of the matrix whose columns are the unit-normalized eigenvectors.
///
/// 1 for a normal matrix; values below `1e-8` flag a (nearly) defective spectrum.
pub fn defectiveness(vectors: MatRef<'_, C64>) -> Result<f64> {
    let mut v = vectors.to_owned();
    normalize_columns(&mut v);
    let sv = v.singular_values().map_err(|_| Error::SolverFailure {
        dim: v.nrows(),
        norm: norm_one(v.as_ref()),
    })?;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(if max > 0.0 { min / max } else { 0.0 })
}
