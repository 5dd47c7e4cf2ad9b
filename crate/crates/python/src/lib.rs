//! Python bindings: `import nhwind`.
//!
//! Complex numbers cross as Python `complex`; matrices and vector sets as
//! nested lists (row-major, one inner list per row or per vector).

use nhwind as core;
use nhwind::{faer, Band, BoundaryCondition, Gauge, C64};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(nhwind, NhwindError, PyException, "Base class for nhwind failures.");
create_exception!(nhwind, GaugeError, NhwindError, "Gauge-fixed component vanishes, or transpose gauge on a non-symmetric model.");
create_exception!(nhwind, TrackingError, NhwindError, "Ambiguous branch tracking, no closure, or a 4pi loop was required.");
create_exception!(nhwind, SolverError, NhwindError, "Eigensolver failure, left/right pairing failure, or defective matrix.");

fn to_py(e: core::Error) -> PyErr {
    use core::Error::*;
    let msg = e.to_string();
    match e {
        GaugeSingular { .. } | TransposeGauge { .. } => GaugeError::new_err(msg),
        AmbiguousTracking { .. } | NoClosure { .. } | NotFourPiLoop => TrackingError::new_err(msg),
        Defective { .. } | MatchFailure { .. } | SolverFailure { .. } => SolverError::new_err(msg),
        InvalidParameter(_) => PyValueError::new_err(msg),
    }
}

fn parse<T: std::str::FromStr<Err = core::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(to_py)
}

fn band(s: &str) -> PyResult<Band> {
    match s {
        "plus" => Ok(Band::Plus),
        "minus" => Ok(Band::Minus),
        other => Err(PyValueError::new_err(format!("band must be 'plus' or 'minus', got '{other}'"))),
    }
}

fn bc(s: &str) -> PyResult<BoundaryCondition> {
    match s {
        "open" => Ok(BoundaryCondition::Open),
        "periodic" => Ok(BoundaryCondition::Periodic),
        other => Err(PyValueError::new_err(format!("bc must be 'open' or 'periodic', got '{other}'"))),
    }
}

fn rows(m: faer::MatRef<'_, C64>) -> Vec<Vec<C64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn columns(m: faer::MatRef<'_, C64>) -> Vec<Vec<C64>> {
    rows(m.transpose())
}

/// Two-band Bloch Hamiltonian with nearest-cell hoppings.
#[pyclass(name = "BlochModel", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyBlochModel(core::BlochModel);

#[pymethods]
impl PyBlochModel {
    /// H(k) = (v + r cos k) sx + (r sin k + i gamma/2) sz
    #[staticmethod]
    #[pyo3(signature = (v = 0.52, r = 0.5, gamma = 1.0))]
    fn lee(v: f64, r: f64, gamma: f64) -> Self {
        Self(core::BlochModel::lee(v, r, gamma))
    }

    /// H(k) = cos k sx + sin k sy
    #[staticmethod]
    fn demo() -> Self {
        Self(core::BlochModel::demo())
    }

    fn chiral_basis(&self) -> Self {
        Self(self.0.chiral_basis())
    }

    fn hk(&self, k: f64) -> [[C64; 2]; 2] {
        self.0.hk(k)
    }

    #[getter]
    fn label(&self) -> String {
        self.0.label.clone()
    }

    fn __repr__(&self) -> String {
        format!("BlochModel({})", self.0.label)
    }
}

/// Branch-tracked eigen-data around one closed loop.
#[pyclass(name = "LoopTrajectory", frozen)]
struct PyLoopTrajectory(core::LoopTrajectory);

#[pymethods]
impl PyLoopTrajectory {
    /// Loop length in units of 2pi (1 or 2).
    #[getter]
    fn zones(&self) -> usize {
        self.0.period.zones()
    }

    #[getter]
    fn gauge(&self) -> &'static str {
        self.0.gauge.name()
    }

    #[getter]
    fn k_grid(&self) -> Vec<f64> {
        self.0.k_grid.clone()
    }

    #[getter]
    fn energies(&self) -> Vec<C64> {
        self.0.energies.clone()
    }

    #[getter]
    fn other_energies(&self) -> Vec<C64> {
        self.0.other_energies.clone()
    }

    #[getter]
    fn states(&self) -> Vec<[C64; 2]> {
        self.0.states.clone()
    }

    #[getter]
    fn left_states(&self) -> Vec<[C64; 2]> {
        self.0.left_states.clone()
    }

    #[getter]
    fn closure_mismatch(&self) -> f64 {
        self.0.closure_mismatch
    }

    /// Raw loop integral of <<l|d_k u>> / <<l|u>>.
    fn loop_integral(&self) -> C64 {
        core::loop_integral(&self.0)
    }

    /// gamma_B = -i times the raw loop integral.
    fn berry_phase(&self) -> C64 {
        core::berry_phase(&self.0)
    }

    fn winding_number(&self) -> C64 {
        core::winding_number(core::berry_phase(&self.0))
    }

    /// Winding divided by the zone-crossing factor A.
    fn winding_lee(&self, a: f64) -> PyResult<C64> {
        core::winding_lee(&self.0, a).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyfunction]
#[pyo3(signature = (model, band = "plus", gauge = "transpose", grid = core::DEFAULT_GRID))]
fn loop_period(model: &PyBlochModel, band: &str, gauge: &str, grid: usize) -> PyResult<PyLoopTrajectory> {
    let traj = core::loop_period(&model.0, self::band(band)?, parse::<Gauge>(gauge)?, grid).map_err(to_py)?;
    Ok(PyLoopTrajectory(traj))
}

/// Per-band winding over one zone; deliberately gauge dependent.
#[pyfunction]
#[pyo3(signature = (model, band = "plus", gauge = "transpose", grid = core::DEFAULT_GRID))]
fn band_winding(model: &PyBlochModel, band: &str, gauge: &str, grid: usize) -> PyResult<C64> {
    core::band_winding(&model.0, self::band(band)?, parse(gauge)?, grid).map_err(to_py)
}

/// (w_plus, w_minus) in one gauge.
#[pyfunction]
#[pyo3(signature = (model, gauge = "transpose", grid = core::DEFAULT_GRID))]
fn band_windings(model: &PyBlochModel, gauge: &str, grid: usize) -> PyResult<(C64, C64)> {
    let bw = core::band_windings(&model.0, parse(gauge)?, grid).map_err(to_py)?;
    Ok((bw.w_plus, bw.w_minus))
}

/// Halves of the 4pi loop: (w_plus, w_minus, w_total, w_loop).
#[pyfunction]
#[pyo3(signature = (model, gauge = "transpose", grid = core::DEFAULT_GRID))]
fn split_check(model: &PyBlochModel, gauge: &str, grid: usize) -> PyResult<(C64, C64, C64, C64)> {
    let s = core::split_check(&model.0, parse(gauge)?, grid).map_err(to_py)?;
    Ok((s.w_plus, s.w_minus, s.w_total, s.w_loop))
}

#[pyclass(name = "WindingReport", frozen, get_all)]
struct PyWindingReport {
    model: String,
    gauge: &'static str,
    grid_size: usize,
    zones: usize,
    loop_integral: C64,
    gamma_b: C64,
    w: C64,
    zone_factor: f64,
    w_lee: C64,
    w_plus: Option<C64>,
    w_minus: Option<C64>,
}

#[pymethods]
impl PyWindingReport {
    fn __repr__(&self) -> String {
        format!("WindingReport(w={:.9}, w_lee={:.9}, zones={})", self.w, self.w_lee, self.zones)
    }
}

#[pyfunction]
#[pyo3(signature = (model, gauge = "transpose", grid = core::DEFAULT_GRID, zone_factor = 2.0, with_bands = false))]
fn winding_report(
    model: &PyBlochModel,
    gauge: &str,
    grid: usize,
    zone_factor: f64,
    with_bands: bool,
) -> PyResult<PyWindingReport> {
    let r = core::winding_report(&model.0, parse(gauge)?, grid, zone_factor, with_bands).map_err(to_py)?;
    Ok(PyWindingReport {
        model: r.model,
        gauge: r.gauge.name(),
        grid_size: r.grid_size,
        zones: r.period.zones(),
        loop_integral: r.loop_integral,
        gamma_b: r.gamma_b,
        w: r.w,
        zone_factor: r.zone_factor,
        w_lee: r.w_lee,
        w_plus: r.w_plus,
        w_minus: r.w_minus,
    })
}

/// Real-space Hamiltonian as a list of rows.
#[pyfunction]
#[pyo3(signature = (model, n_cells, bc = "open"))]
fn build_chain(model: &PyBlochModel, n_cells: usize, bc: &str) -> PyResult<Vec<Vec<C64>>> {
    let h = core::build_chain(&model.0, n_cells, self::bc(bc)?).map_err(to_py)?;
    Ok(rows(h.as_ref()))
}

/// (density per site, ipr, class) of one eigenvector.
type Profile = (Vec<f64>, f64, &'static str);
/// (n_cells, max_abs_imag, gap, edge_modes, median_ipr).
type ScanSummary = (usize, f64, f64, usize, f64);

/// Dense spectrum of a finite chain, sorted by (Re, Im).
#[pyclass(name = "ChainSpectrum", frozen)]
struct PyChainSpectrum(core::ChainSpectrum);

#[pymethods]
impl PyChainSpectrum {
    #[staticmethod]
    #[pyo3(signature = (model, n_cells, bc = "open", left = false, defectiveness = false))]
    fn solve(
        py: Python<'_>,
        model: &PyBlochModel,
        n_cells: usize,
        bc: &str,
        left: bool,
        defectiveness: bool,
    ) -> PyResult<Self> {
        let opts = core::SolveOptions { left, defectiveness };
        let bc = self::bc(bc)?;
        // the dense solve can take tens of seconds; release the interpreter
        let s = py
            .detach(|| core::ChainSpectrum::solve(&model.0, n_cells, bc, opts))
            .map_err(to_py)?;
        Ok(Self(s))
    }

    #[getter]
    fn n_cells(&self) -> usize {
        self.0.n_cells
    }

    #[getter]
    fn bc(&self) -> &'static str {
        self.0.bc.name()
    }

    #[getter]
    fn eigenvalues(&self) -> Vec<C64> {
        self.0.eigenvalues.clone()
    }

    /// One list per eigenvector, in eigenvalue order.
    #[getter]
    fn right_vectors(&self) -> Vec<Vec<C64>> {
        columns(self.0.right_vectors.as_ref())
    }

    #[getter]
    fn left_vectors(&self) -> Option<Vec<Vec<C64>>> {
        self.0.left_vectors.as_ref().map(|l| columns(l.as_ref()))
    }

    #[getter]
    fn iprs(&self) -> Vec<f64> {
        self.0.iprs.clone()
    }

    #[getter]
    fn left_iprs(&self) -> Option<Vec<f64>> {
        self.0.left_iprs.clone()
    }

    #[getter]
    fn max_abs_imag(&self) -> f64 {
        self.0.max_abs_imag
    }

    #[getter]
    fn gap(&self) -> f64 {
        self.0.gap.value
    }

    #[getter]
    fn edge_modes(&self) -> Vec<usize> {
        self.0.gap.edge_modes.clone()
    }

    #[getter]
    fn defectiveness(&self) -> Option<f64> {
        self.0.defectiveness
    }

    #[getter]
    fn max_residual(&self) -> f64 {
        self.0.max_residual
    }

    #[getter]
    fn balancing(&self) -> Vec<f64> {
        self.0.balancing.scaling.clone()
    }

    fn median_ipr(&self) -> f64 {
        self.0.median_ipr()
    }

    fn median_left_ipr(&self) -> Option<f64> {
        self.0.median_left_ipr()
    }

    fn complex_fraction(&self, threshold: f64) -> f64 {
        self.0.complex_fraction(threshold)
    }

    /// Per-state (density, ipr, class) for right vectors, and for left
    /// vectors when they were computed.
    fn localization(&self) -> (Vec<Profile>, Option<Vec<Profile>>) {
        let flat = |ps: Vec<core::lattice::StateProfile>| {
            ps.into_iter().map(|p| (p.density, p.ipr, p.class.name())).collect::<Vec<_>>()
        };
        let (right, left) = core::localization_profile(&self.0);
        (flat(right), left.map(flat))
    }

    fn __len__(&self) -> usize {
        self.0.dim()
    }

    fn __repr__(&self) -> String {
        format!(
            "ChainSpectrum(N={}, bc={}, gap={:.6}, max_abs_imag={:.3e})",
            self.0.n_cells,
            self.0.bc.name(),
            self.0.gap.value,
            self.0.max_abs_imag
        )
    }
}

/// One summary row per chain length, in the given order.
#[pyfunction]
#[pyo3(signature = (model, n_list, bc = "open"))]
fn spectrum_scan(py: Python<'_>, model: &PyBlochModel, n_list: Vec<usize>, bc: &str) -> PyResult<Vec<ScanSummary>> {
    let bc = self::bc(bc)?;
    let rows = py.detach(|| core::spectrum_scan(&model.0, &n_list, bc)).map_err(to_py)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.n_cells, r.max_abs_imag, r.gap, r.edge_modes, r.median_ipr))
        .collect())
}

#[pymodule(name = "nhwind")]
fn nhwind_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PyBlochModel>()?;
    m.add_class::<PyLoopTrajectory>()?;
    m.add_class::<PyWindingReport>()?;
    m.add_class::<PyChainSpectrum>()?;
    m.add_function(wrap_pyfunction!(loop_period, m)?)?;
    m.add_function(wrap_pyfunction!(band_winding, m)?)?;
    m.add_function(wrap_pyfunction!(band_windings, m)?)?;
    m.add_function(wrap_pyfunction!(split_check, m)?)?;
    m.add_function(wrap_pyfunction!(winding_report, m)?)?;
    m.add_function(wrap_pyfunction!(build_chain, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_scan, m)?)?;
    m.add("NhwindError", py.get_type::<NhwindError>())?;
    m.add("GaugeError", py.get_type::<GaugeError>())?;
    m.add("TrackingError", py.get_type::<TrackingError>())?;
    m.add("SolverError", py.get_type::<SolverError>())?;
    m.add("DEFAULT_GRID", core::DEFAULT_GRID)?;
    Ok(())
}
