//! Finite chains built from Bloch blocks, their dense spectra and
//! localization diagnostics.

mod banded;
pub mod dense;

use std::fmt;
use std::str::FromStr;

use faer::{Mat, MatRef};
use rayon::prelude::*;

use crate::bloch::{BlochModel, C64};
use crate::error::{Error, Result};

pub use dense::{balance, defectiveness, eig_dense, left_vectors, Balancing, DenseEigen};

/// States with IPR above this count as localized (and may be edge modes).
pub const LOCALIZED_IPR: f64 = 0.1;
/// Extended states have IPR below `EXTENDED_IPR_FACTOR / (2N)`.
pub const EXTENDED_IPR_FACTOR: f64 = 3.0;
/// Midgap threshold for edge modes, relative to the spectral radius.
pub const MIDGAP_FRACTION: f64 = 1e-3;
/// At most this many midgap edge modes are removed before measuring the gap.
pub const MAX_EDGE_MODES: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    Open,
    Periodic,
}

impl BoundaryCondition {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryCondition::Open => "open",
            BoundaryCondition::Periodic => "periodic",
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "open" => Ok(BoundaryCondition::Open),
            "periodic" => Ok(BoundaryCondition::Periodic),
            other => Err(Error::InvalidParameter(format!(
                "unknown boundary condition '{other}'"
            ))),
        }
    }
}

/// Block-tridiagonal real-space Hamiltonian of `n_cells` unit cells.
///
/// Cell `n` couples to `n + 1` through `hop_plus` (super-diagonal block) and
/// to `n - 1` through `hop_minus`, so a Bloch wave `e^{ikn} φ` sees `H(k)`.
/// Periodic chains wrap cell `N` back to cell 1.
pub fn build_chain(model: &BlochModel, n_cells: usize, bc: BoundaryCondition) -> Result<Mat<C64>> {
    if n_cells < 1 {
        return Err(Error::InvalidParameter("n_cells must be at least 1".into()));
    }
    let dim = 2 * n_cells;
    let mut h = Mat::<C64>::zeros(dim, dim);
    let mut add_block = |row: usize, col: usize, block: &[[C64; 2]; 2]| {
        for i in 0..2 {
            for j in 0..2 {
                h[(2 * row + i, 2 * col + j)] += block[i][j];
            }
        }
    };
    for n in 0..n_cells {
        add_block(n, n, &model.hop_zero);
        if n + 1 < n_cells {
            add_block(n, n + 1, &model.hop_plus);
            add_block(n + 1, n, &model.hop_minus);
        }
    }
    if bc == BoundaryCondition::Periodic {
        // for N = 1 both corners land on the diagonal: H = H(k = 0)
        add_block(n_cells - 1, 0, &model.hop_plus);
        add_block(0, n_cells - 1, &model.hop_minus);
    }
    Ok(h)
}

/// `Σ|ψⱼ|⁴ / (Σ|ψⱼ|²)²`; scale invariant, in `[1/len, 1]`.
pub fn ipr(psi: &[C64]) -> f64 {
    // divide by the peak first: skin-localized vectors overflow |ψ|⁴
    let peak = psi.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let (mut p2, mut p4) = (0.0, 0.0);
    for x in psi {
        let w = (x / peak).norm_sqr();
        p2 += w;
        p4 += w * w;
    }
    p4 / (p2 * p2)
}

fn column(m: MatRef<'_, C64>, j: usize) -> Vec<C64> {
    (0..m.nrows()).map(|i| m[(i, j)]).collect()
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveOptions {
    pub left: bool,
    pub defectiveness: bool,
}

/// Spectrum of a finite chain.
#[derive(Clone, Debug)]
pub struct ChainSpectrum {
    pub n_cells: usize,
    pub bc: BoundaryCondition,
    /// Sorted by `(Re λ, Im λ)`.
    pub eigenvalues: Vec<C64>,
    /// Unit-norm right eigenvectors, one column per eigenvalue.
    pub right_vectors: Mat<C64>,
    /// Left eigenvectors biorthonormal to `right_vectors`, when requested.
    pub left_vectors: Option<Mat<C64>>,
    pub iprs: Vec<f64>,
    pub left_iprs: Option<Vec<f64>>,
    pub max_abs_imag: f64,
    pub gap: Gap,
    pub defectiveness: Option<f64>,
    pub balancing: Balancing,
    pub max_residual: f64,
}

impl ChainSpectrum {
    pub fn solve(
        model: &BlochModel,
        n_cells: usize,
        bc: BoundaryCondition,
        options: SolveOptions,
    ) -> Result<Self> {
        let h = build_chain(model, n_cells, bc)?;
        Self::from_matrix(h.as_ref(), n_cells, bc, options)
    }

    pub fn from_matrix(
        h: MatRef<'_, C64>,
        n_cells: usize,
        bc: BoundaryCondition,
        options: SolveOptions,
    ) -> Result<Self> {
        let right = eig_dense(h)?;
        let dim = right.eigenvalues.len();
        let iprs: Vec<f64> = (0..dim).map(|j| ipr(&column(right.vectors.as_ref(), j))).collect();
        let (left, left_iprs) = if options.left {
            let l = left_vectors(h, &right)?;
            let li = (0..dim).map(|j| ipr(&column(l.as_ref(), j))).collect();
            (Some(l), Some(li))
        } else {
            (None, None)
        };
        let defect = if options.defectiveness {
            Some(defectiveness(right.vectors.as_ref())?)
        } else {
            None
        };
        let max_abs_imag = right.eigenvalues.iter().map(|l| l.im.abs()).fold(0.0, f64::max);
        let gap = spectral_gap(&right.eigenvalues, &iprs);
        Ok(Self {
            n_cells,
            bc,
            eigenvalues: right.eigenvalues,
            right_vectors: right.vectors,
            left_vectors: left,
            iprs,
            left_iprs,
            max_abs_imag,
            gap,
            defectiveness: defect,
            balancing: right.balancing,
            max_residual: right.max_residual,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn median_ipr(&self) -> f64 {
        median(&self.iprs)
    }

    pub fn median_left_ipr(&self) -> Option<f64> {
        self.left_iprs.as_deref().map(median)
    }

    /// Fraction of eigenvalues with `|Im λ| > threshold`.
    pub fn complex_fraction(&self, threshold: f64) -> f64 {
        let count = self.eigenvalues.iter().filter(|l| l.im.abs() > threshold).count();
        count as f64 / self.dim() as f64
    }

    pub fn right(&self, j: usize) -> Vec<C64> {
        column(self.right_vectors.as_ref(), j)
    }

    pub fn left(&self, j: usize) -> Option<Vec<C64>> {
        self.left_vectors.as_ref().map(|l| column(l.as_ref(), j))
    }
}

/// Real-part gap of a (possibly complex) spectrum after removing midgap edge modes.
#[derive(Clone, Debug, PartialEq)]
pub struct Gap {
    /// Smallest positive real part minus largest negative real part; 0 when
    /// either side is empty.
    pub value: f64,
    /// Indices (into the sorted spectrum) excluded as edge modes.
    pub edge_modes: Vec<usize>,
    pub midgap_threshold: f64,
}

/// Remove up to [`MAX_EDGE_MODES`] states with `|λ|` below the midgap
/// threshold and IPR above [`LOCALIZED_IPR`], then measure the real-part gap.
pub fn spectral_gap(eigenvalues: &[C64], iprs: &[f64]) -> Gap {
    let radius = eigenvalues.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let midgap_threshold = MIDGAP_FRACTION * radius;
    let mut candidates: Vec<usize> = (0..eigenvalues.len())
        .filter(|&i| eigenvalues[i].norm() < midgap_threshold && iprs[i] > LOCALIZED_IPR)
        .collect();
    candidates.sort_by(|&a, &b| eigenvalues[a].norm().total_cmp(&eigenvalues[b].norm()));
    candidates.truncate(MAX_EDGE_MODES);
    candidates.sort_unstable();

    let (mut pos, mut neg) = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, l) in eigenvalues.iter().enumerate() {
        if candidates.binary_search(&i).is_ok() {
            continue;
        }
        if l.re > 0.0 {
            pos = pos.min(l.re);
        } else if l.re < 0.0 {
            neg = neg.max(l.re);
        }
    }
    let value = if pos.is_finite() && neg.is_finite() { pos - neg } else { 0.0 };
    Gap {
        value,
        edge_modes: candidates,
        midgap_threshold,
    }
}

/// Summary of one chain length in a finite-size scan.
#[derive(Clone, Debug)]
pub struct ScanRow {
    pub n_cells: usize,
    pub bc: BoundaryCondition,
    pub eigenvalues: Vec<C64>,
    pub max_abs_imag: f64,
    pub gap: f64,
    pub edge_modes: usize,
    pub median_ipr: f64,
}

impl From<ChainSpectrum> for ScanRow {
    fn from(s: ChainSpectrum) -> Self {
        let median_ipr = s.median_ipr();
        Self {
            n_cells: s.n_cells,
            bc: s.bc,
            max_abs_imag: s.max_abs_imag,
            gap: s.gap.value,
            edge_modes: s.gap.edge_modes.len(),
            median_ipr,
            eigenvalues: s.eigenvalues,
        }
    }
}

/// Solve one chain per entry of `n_list`, independently and in parallel.
/// Rows come back in the order of `n_list`.
pub fn spectrum_scan(
    model: &BlochModel,
    n_list: &[usize],
    bc: BoundaryCondition,
) -> Result<Vec<ScanRow>> {
    n_list
        .par_iter()
        .map(|&n| ChainSpectrum::solve(model, n, bc, SolveOptions::default()).map(ScanRow::from))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Localization {
    Extended,
    Intermediate,
    Localized,
}

impl Localization {
    pub fn classify(ipr: f64, dim: usize) -> Self {
        if ipr < EXTENDED_IPR_FACTOR / dim as f64 {
            Localization::Extended
        } else if ipr > LOCALIZED_IPR {
            Localization::Localized
        } else {
            Localization::Intermediate
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Localization::Extended => "extended",
            Localization::Intermediate => "intermediate",
            Localization::Localized => "localized",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateProfile {
    pub eigenvalue: C64,
    /// `|ψⱼ|²` per site, normalized to sum to 1.
    pub density: Vec<f64>,
    pub ipr: f64,
    pub class: Localization,
}

pub fn state_profile(eigenvalue: C64, psi: &[C64]) -> StateProfile {
    let peak = psi.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let total: f64 = psi.iter().map(|x| (x / peak).norm_sqr()).sum();
    let density: Vec<f64> = psi.iter().map(|x| (x / peak).norm_sqr() / total).collect();
    let ipr = density.iter().map(|p| p * p).sum();
    StateProfile {
        eigenvalue,
        class: Localization::classify(ipr, psi.len()),
        density,
        ipr,
    }
}

/// Site-resolved densities for every right eigenvector, and for every left
/// eigenvector when the spectrum carries them.
pub fn localization_profile(spectrum: &ChainSpectrum) -> (Vec<StateProfile>, Option<Vec<StateProfile>>) {
    let right = (0..spectrum.dim())
        .map(|j| state_profile(spectrum.eigenvalues[j], &spectrum.right(j)))
        .collect();
    let left = spectrum.left_vectors.as_ref().map(|_| {
        (0..spectrum.dim())
            .map(|j| state_profile(spectrum.eigenvalues[j], &spectrum.left(j).expect("left vectors present")))
            .collect()
    });
    (right, left)
}
