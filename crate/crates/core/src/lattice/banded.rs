//! Banded LU and inverse iteration.
//!
//! Used to recover eigenvectors whose back-substitution in the Schur basis
//! overflowed. Strongly non-normal chains have eigenvectors growing like
//! `|β|^N` across the lattice, so both substitutions rescale on the fly.

use faer::MatRef;

use crate::bloch::C64;

const RESCALE_AT: f64 = 1e150;

/// `(lower, upper)` bandwidths of `h`.
pub fn bandwidths(h: MatRef<'_, C64>) -> (usize, usize) {
    let (mut kl, mut ku) = (0, 0);
    for j in 0..h.ncols() {
        for i in 0..h.nrows() {
            if h[(i, j)] != C64::new(0.0, 0.0) {
                if i > j {
                    kl = kl.max(i - j);
                } else {
                    ku = ku.max(j - i);
                }
            }
        }
    }
    (kl, ku)
}

/// LU factors of a banded matrix with partial pivoting.
///
/// Row `i` stores columns `i - kl ..= i + kl + ku`; pivoting widens the upper
/// band of `U` to `kl + ku`.
struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<C64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    fn get(&self, i: usize, j: usize) -> C64 {
        self.data[self.idx(i, j)]
    }

    fn hi(&self, k: usize) -> usize {
        (k + self.kl + self.ku).min(self.n - 1)
    }

    /// Factors `h - shift·I`. Exactly singular pivots are replaced by
    /// `floor` so the shift may be an exact eigenvalue.
    fn factor(h: MatRef<'_, C64>, kl: usize, ku: usize, shift: C64, floor: f64) -> Self {
        let n = h.nrows();
        let width = 2 * kl + ku + 1;
        let mut lu = BandedLu {
            n,
            kl,
            ku,
            width,
            data: vec![C64::new(0.0, 0.0); n * width],
            pivots: vec![0; n],
        };
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let hi = (i + ku).min(n - 1);
            for j in lo..=hi {
                let value = if i == j { h[(i, j)] - shift } else { h[(i, j)] };
                let at = lu.idx(i, j);
                lu.data[at] = value;
            }
        }
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let p = (k..=last)
                .max_by(|&a, &b| lu.get(a, k).norm().total_cmp(&lu.get(b, k).norm()))
                .unwrap_or(k);
            lu.pivots[k] = p;
            let hi = lu.hi(k);
            if p != k {
                for j in k..=hi {
                    let (a, b) = (lu.idx(k, j), lu.idx(p, j));
                    lu.data.swap(a, b);
                }
            }
            let d = lu.idx(k, k);
            if lu.data[d].norm() < floor {
                lu.data[d] = C64::new(floor, 0.0);
            }
            let pivot = lu.data[d];
            for i in (k + 1)..=last {
                let at = lu.idx(i, k);
                let m = lu.data[at] / pivot;
                lu.data[at] = m;
                if m != C64::new(0.0, 0.0) {
                    for j in (k + 1)..=hi {
                        let u = lu.get(k, j);
                        let t = lu.idx(i, j);
                        lu.data[t] -= m * u;
                    }
                }
            }
        }
        lu
    }

    /// Solves in place up to a positive scale factor.
    fn solve_scaled(&self, b: &mut [C64]) {
        let n = self.n;
        for k in 0..n {
            let p = self.pivots[k];
            b.swap(k, p);
            let bk = b[k];
            for i in (k + 1)..=(k + self.kl).min(n - 1) {
                b[i] -= self.get(i, k) * bk;
            }
            if bk.norm() > RESCALE_AT {
                b.iter_mut().for_each(|x| *x /= RESCALE_AT);
            }
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            for j in (i + 1)..=self.hi(i) {
                acc -= self.get(i, j) * b[j];
            }
            b[i] = acc / self.get(i, i);
            if b[i].norm() > RESCALE_AT {
                b.iter_mut().for_each(|x| *x /= RESCALE_AT);
            }
        }
    }
}

/// Divides by the largest modulus first so huge or tiny vectors normalize cleanly.
pub fn normalize(v: &mut [C64]) {
    let peak = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak > 0.0 && peak.is_finite() {
        v.iter_mut().for_each(|z| *z /= peak);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
    }
}

/// Unit eigenvector for `lambda` by inverse iteration on `h - λI`.
///
/// `band` comes from [`bandwidths`] and `scale` is `‖h‖₁`; iteration stops
/// once the residual drops below `tol·scale`, after at most four solves.
pub fn inverse_iteration(
    h: MatRef<'_, C64>,
    band: (usize, usize),
    lambda: C64,
    scale: f64,
    tol: f64,
) -> Vec<C64> {
    let mut basis = subspace_iteration(h, band, lambda, scale, tol, 1);
    basis.pop().expect("one vector requested")
}

/// Orthonormal basis of the `m`-dimensional invariant subspace of `h` whose
/// eigenvalues lie nearest `shift`, by block inverse iteration.
///
/// For a cluster of nearly equal eigenvalues this is better posed than one
/// eigenvector at a time: near a coalescence the individual eigenvectors are
/// almost parallel while the subspace stays well defined.
pub fn subspace_iteration(
    h: MatRef<'_, C64>,
    band: (usize, usize),
    shift: C64,
    scale: f64,
    tol: f64,
    m: usize,
) -> Vec<Vec<C64>> {
    let n = h.nrows();
    let (kl, ku) = band;
    let floor = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
    let lu = BandedLu::factor(h, kl, ku, shift, floor);
    // fixed, generic start vectors
    let mut basis: Vec<Vec<C64>> = (0..m)
        .map(|c| {
            let phase = 0.618_033_988_749_895 * (c + 1) as f64;
            (0..n)
                .map(|i| C64::new(1.0 + (i as f64 * phase).fract(), (i as f64 * phase * 0.5).fract()))
                .collect()
        })
        .collect();
    orthonormalize(&mut basis);
    for _ in 0..4 {
        for v in basis.iter_mut() {
            lu.solve_scaled(v);
            normalize(v);
        }
        orthonormalize(&mut basis);
        if block_residual(h, kl, ku, &basis) <= tol * scale {
            break;
        }
    }
    basis
}

/// Modified Gram–Schmidt, applied twice for stability.
fn orthonormalize(basis: &mut [Vec<C64>]) {
    for _ in 0..2 {
        for j in 0..basis.len() {
            let (done, rest) = basis.split_at_mut(j);
            let v = &mut rest[0];
            for q in done.iter() {
                let c: C64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                v.iter_mut().zip(q).for_each(|(x, a)| *x -= c * a);
            }
            normalize(v);
        }
    }
}

fn banded_apply(h: MatRef<'_, C64>, kl: usize, ku: usize, v: &[C64]) -> Vec<C64> {
    let n = h.nrows();
    (0..n)
        .map(|i| {
            let band = i.saturating_sub(kl)..=(i + ku).min(n - 1);
            band.map(|j| h[(i, j)] * v[j]).sum()
        })
        .collect()
}

/// `‖H Q - Q (Qᴴ H Q)‖_F` for an orthonormal basis `Q`.
pub fn block_residual(h: MatRef<'_, C64>, kl: usize, ku: usize, basis: &[Vec<C64>]) -> f64 {
    let hq: Vec<Vec<C64>> = basis.iter().map(|q| banded_apply(h, kl, ku, q)).collect();
    let mut total = 0.0;
    for hv in &hq {
        let mut r = hv.clone();
        for q in basis {
            let c: C64 = q.iter().zip(hv).map(|(a, b)| a.conj() * b).sum();
            r.iter_mut().zip(q).for_each(|(x, a)| *x -= c * a);
        }
        total += r.iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    total.sqrt()
}

#[cfg(test)]
fn residual(h: MatRef<'_, C64>, lambda: C64, v: &[C64]) -> f64 {
    let (kl, ku) = bandwidths(h);
    let hv = banded_apply(h, kl, ku, v);
    hv.iter().zip(v).map(|(a, b)| (a - lambda * b).norm_sqr()).sum::<f64>().sqrt()
}
