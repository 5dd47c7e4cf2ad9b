//! Winding numbers and finite-size spectra of non-Hermitian two-band chains.
//!
//! * [`bloch`]: two-band Bloch Hamiltonians and their closed-form eigensystems
//!   in explicit gauges.
//! * [`berry`]: continuous branch tracking around k-loops (detecting the 4π
//!   braid), biorthogonal Berry phases and the winding-number variants.
//! * [`lattice`]: real-space chains under open and periodic boundaries, dense
//!   left/right eigendecomposition, gap and IPR diagnostics.

pub mod berry;
pub mod bloch;
pub mod error;
pub mod lattice;

pub use berry::{
    band_winding, band_windings, berry_phase, loop_integral, loop_period, split_check,
    winding_lee, winding_number, winding_report, BandWindings, LoopPeriod, LoopTrajectory,
    SplitCheck, WindingReport, DEFAULT_GRID,
};
pub use bloch::{eig2, Band, BlochModel, EigenSystem2, Gauge, Mat2, Vec2, C64};
pub use error::{Error, Result};
pub use lattice::{
    build_chain, localization_profile, spectrum_scan, BoundaryCondition, ChainSpectrum,
    Localization, ScanRow, SolveOptions,
};

pub use faer;
