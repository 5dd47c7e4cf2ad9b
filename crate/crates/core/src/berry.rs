//! Branch tracking around k-loops and biorthogonal Berry phases.
//!
//! Conventions used throughout:
//!
//! * the Berry connection is `A(k) = -i <<l|∂ₖu> / <<l|u>`, where `<<l|` is the
//!   left eigenvector selected by the gauge (bilinear pairing, no conjugation);
//! * the Berry phase of a closed loop is `γ_B = ∮ A(k) dk`, so
//!   `γ_B = -i ∮ <<l|∂ₖu>/<<l|u> dk`;
//! * the winding number is `w = γ_B / π` whatever the loop length, and the
//!   per-zone normalized value is `w / A` for a zone-crossing factor `A`;
//! * per-band values are `w± = (1/π) ∫₀^{2π} A±(k) dk`, so that a 4π loop
//!   starting on the `+` band satisfies `w = w₊ + w₋`.
//!
//! The raw loop integral `∮ <<l|∂ₖu>/<<l|u> dk` is exposed as
//! [`loop_integral`] so that either sign convention can be recovered.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use crate::bloch::{eig2, pair, vec_norm, Band, BlochModel, EigenSystem2, Gauge, Vec2, C64};
use crate::error::{Error, Result};

/// Samples per 2π used when no grid is requested.
pub const DEFAULT_GRID: usize = 8192;
/// Free-component mismatch below which a tracked state counts as returned.
pub const CLOSURE_TOL: f64 = 1e-8;
/// Candidate branches closer than this (in energy and overlap) cannot be told apart.
pub const TIE_TOL: f64 = 1e-10;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LoopPeriod {
    TwoPi,
    FourPi,
}

impl LoopPeriod {
    /// Number of Brillouin zones swept by the loop.
    pub fn zones(self) -> usize {
        match self {
            LoopPeriod::TwoPi => 1,
            LoopPeriod::FourPi => 2,
        }
    }

    pub fn length(self) -> f64 {
        2.0 * PI * self.zones() as f64
    }
}

impl fmt::Display for LoopPeriod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoopPeriod::TwoPi => f.write_str("2pi"),
            LoopPeriod::FourPi => f.write_str("4pi"),
        }
    }
}

/// How `∂ₖu` is evaluated inside the Berry-phase integrand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Derivative {
    /// Closed-form derivative of the gauge-fixed free component.
    Analytic,
    /// Fourth-order central differences along the sampled loop.
    FiniteDifference,
}

/// One eigenstate followed continuously around a closed loop in k.
#[derive(Clone, Debug)]
pub struct LoopTrajectory {
    pub model: BlochModel,
    pub period: LoopPeriod,
    pub start_band: Band,
    pub gauge: Gauge,
    /// Samples per 2π.
    pub grid_size: usize,
    /// `k_i = i·2π/grid_size` for `i` in `0..grid_size·zones`.
    pub k_grid: Vec<f64>,
    pub energies: Vec<C64>,
    pub states: Vec<Vec2>,
    pub left_states: Vec<Vec2>,
    /// Principal-root branch the tracked state sits on at each sample.
    pub branches: Vec<Band>,
    /// Energy of the untracked branch at each sample.
    pub other_energies: Vec<C64>,
    /// Free-component mismatch between the state at `k = P` and at `k = 0`.
    pub closure_mismatch: f64,
}

impl LoopTrajectory {
    pub fn len(&self) -> usize {
        self.k_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_grid.is_empty()
    }

    pub fn step(&self) -> f64 {
        2.0 * PI / self.grid_size as f64
    }
}

/// Samples of a tracked branch on `k_i = i·h`, `i = 0..=steps` (endpoint included).
struct Track {
    k: Vec<f64>,
    energies: Vec<C64>,
    other_energies: Vec<C64>,
    states: Vec<Vec2>,
    left_states: Vec<Vec2>,
    branches: Vec<Band>,
}

impl Track {
    fn with_capacity(n: usize) -> Self {
        Self {
            k: Vec::with_capacity(n),
            energies: Vec::with_capacity(n),
            other_energies: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            left_states: Vec::with_capacity(n),
            branches: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, k: f64, es: &EigenSystem2, branch: Band) {
        self.k.push(k);
        self.energies.push(es.energy(branch));
        self.other_energies.push(es.energy(branch.other()));
        self.states.push(es.right(branch));
        self.left_states.push(es.left(branch));
        self.branches.push(branch);
    }
}

fn check_grid(grid_size: usize) -> Result<()> {
    if grid_size < 8 {
        return Err(Error::InvalidParameter(format!(
            "grid_size must be at least 8, got {grid_size}"
        )));
    }
    Ok(())
}

fn eig_at(model: &BlochModel, k: f64, gauge: Gauge) -> Result<EigenSystem2> {
    eig2(&model.hk(k), gauge).map_err(|e| e.at_k(k))
}

/// Free (non-pinned) component of a gauge-fixed state.
fn free_component(u: &Vec2, gauge: Gauge) -> C64 {
    u[1 - gauge.fixed_component()]
}

/// A zero of the pinned component between two samples appears as a pole of the
/// free component. Locate it by linear interpolation of `1/free` and reject
/// the grid if the pole lies within one step of the real k axis.
fn check_pole_between(k: f64, prev: &Vec2, next: &Vec2, gauge: Gauge, step: f64) -> Result<()> {
    let (a, b) = (free_component(prev, gauge), free_component(next, gauge));
    if a == C64::new(0.0, 0.0) || b == C64::new(0.0, 0.0) {
        return Ok(());
    }
    let (ga, gb) = (a.inv(), b.inv());
    let delta = gb - ga;
    if delta.norm() == 0.0 {
        return Ok(());
    }
    // zero of the interpolant at k + tau·step
    let tau = -ga / delta;
    if (0.0..=1.0).contains(&tau.re) && tau.im.abs() < 1.0 {
        let magnitude = (ga + delta * tau.re).norm();
        return Err(Error::GaugeSingular {
            gauge: gauge.name(),
            k: k + tau.re * step,
            magnitude,
        });
    }
    Ok(())
}

/// Follow `start_band` from `k = 0` for `steps` steps of `2π/grid_size`.
fn track(
    model: &BlochModel,
    start_band: Band,
    gauge: Gauge,
    grid_size: usize,
    steps: usize,
) -> Result<Track> {
    let step = 2.0 * PI / grid_size as f64;
    let mut out = Track::with_capacity(steps + 1);
    let es0 = eig_at(model, 0.0, gauge)?;
    out.push(0.0, &es0, start_band);

    let mut branch = start_band;
    let mut prev = es0;
    for i in 1..=steps {
        let k = i as f64 * step;
        let es = eig_at(model, k, gauge)?;
        let e_prev = prev.energy(branch);
        let d_plus = (es.e_plus - e_prev).norm();
        let d_minus = (es.e_minus - e_prev).norm();
        let next = if (d_plus - d_minus).abs() > TIE_TOL {
            if d_plus < d_minus {
                Band::Plus
            } else {
                Band::Minus
            }
        } else {
            let l_prev = prev.left(branch);
            let overlap = |b: Band| {
                let u = es.right(b);
                pair(&l_prev, &u).norm() / vec_norm(&u)
            };
            let (o_plus, o_minus) = (overlap(Band::Plus), overlap(Band::Minus));
            if (o_plus - o_minus).abs() <= TIE_TOL {
                return Err(Error::AmbiguousTracking {
                    k,
                    tolerance: TIE_TOL,
                });
            }
            if o_plus > o_minus {
                Band::Plus
            } else {
                Band::Minus
            }
        };
        check_pole_between(
            k - step,
            &prev.right(branch),
            &es.right(next),
            gauge,
            step,
        )?;
        out.push(k, &es, next);
        branch = next;
        prev = es;
    }
    Ok(out)
}

fn state_mismatch(a: &Vec2, b: &Vec2) -> f64 {
    let diff = [a[0] - b[0], a[1] - b[1]];
    vec_norm(&diff) / vec_norm(b).max(1.0)
}

/// Detect whether `start_band` returns to itself after 2π or only after 4π,
/// and return the trajectory over that closed loop.
pub fn loop_period(
    model: &BlochModel,
    start_band: Band,
    gauge: Gauge,
    grid_size: usize,
) -> Result<LoopTrajectory> {
    check_grid(grid_size)?;
    let mut samples = track(model, start_band, gauge, grid_size, 2 * grid_size)?;
    let start = samples.states[0];

    let mismatch_2pi = state_mismatch(&samples.states[grid_size], &start);
    let (period, mismatch) = if mismatch_2pi <= CLOSURE_TOL {
        (LoopPeriod::TwoPi, mismatch_2pi)
    } else {
        let mismatch_4pi = state_mismatch(&samples.states[2 * grid_size], &start);
        if mismatch_4pi > CLOSURE_TOL {
            return Err(Error::NoClosure {
                mismatch: mismatch_4pi,
            });
        }
        (LoopPeriod::FourPi, mismatch_4pi)
    };

    let n = grid_size * period.zones();
    samples.k.truncate(n);
    samples.energies.truncate(n);
    samples.other_energies.truncate(n);
    samples.states.truncate(n);
    samples.left_states.truncate(n);
    samples.branches.truncate(n);

    Ok(LoopTrajectory {
        model: model.clone(),
        period,
        start_band,
        gauge,
        grid_size,
        k_grid: samples.k,
        energies: samples.energies,
        states: samples.states,
        left_states: samples.left_states,
        branches: samples.branches,
        other_energies: samples.other_energies,
        closure_mismatch: mismatch,
    })
}

/// Analytic `∂ₖu` of the gauge-fixed eigenvector on `branch` at `k`.
///
/// With `E = tr/2 ± √q`, `q = ((a-d)/2)² + bc`, the free component is
/// `(E - a)/b` or `c/(E - d)` (first component pinned) and the reciprocal
/// forms when the second component is pinned; the row with the larger pivot
/// is differentiated, matching the choice made by [`eig2`].
pub fn state_derivative(model: &BlochModel, k: f64, branch: Band, gauge: Gauge) -> Vec2 {
    let h = model.hk(k);
    let dh = model.dhk(k);
    let [[a, b], [c, d]] = h;
    let [[da, db], [dc, dd]] = dh;

    let half_diff = (a - d) * 0.5;
    let q = half_diff * half_diff + b * c;
    let dq = half_diff * (da - dd) + db * c + b * dc;
    let s = q.sqrt();
    let sign = match branch {
        Band::Plus => 1.0,
        Band::Minus => -1.0,
    };
    let e = (a + d) * 0.5 + s * sign;
    let de = (da + dd) * 0.5 + dq / (s * 2.0) * sign;

    let row0 = vec_norm(&[b, e - a]) >= vec_norm(&[e - d, c]);
    let zero = C64::new(0.0, 0.0);
    // quotient rule for n/m
    let quotient = |n: C64, dn: C64, m: C64, dm: C64| (dn * m - n * dm) / (m * m);
    match gauge {
        Gauge::FirstComponentOne | Gauge::Transpose => {
            let dt = if row0 {
                quotient(e - a, de - da, b, db)
            } else {
                quotient(c, dc, e - d, de - dd)
            };
            [zero, dt]
        }
        Gauge::SecondComponentOne => {
            let dp = if row0 {
                quotient(b, db, e - a, de - da)
            } else {
                quotient(e - d, de - dd, c, dc)
            };
            [dp, zero]
        }
    }
}

fn integrand(l: &Vec2, u: &Vec2, du: &Vec2) -> C64 {
    pair(l, du) / pair(l, u)
}

/// `<<l|∂ₖu>/<<l|u>` at every sample of the loop.
fn loop_integrand(traj: &LoopTrajectory, derivative: Derivative) -> Vec<C64> {
    let n = traj.len();
    let h = traj.step();
    (0..n)
        .map(|i| {
            let du = match derivative {
                Derivative::Analytic => {
                    state_derivative(&traj.model, traj.k_grid[i], traj.branches[i], traj.gauge)
                }
                Derivative::FiniteDifference => {
                    let at = |offset: isize| traj.states[(i as isize + offset).rem_euclid(n as isize) as usize];
                    let (m2, m1, p1, p2) = (at(-2), at(-1), at(1), at(2));
                    let mut du = [C64::new(0.0, 0.0); 2];
                    for c in 0..2 {
                        du[c] = (-p2[c] + p1[c] * 8.0 - m1[c] * 8.0 + m2[c]) / (12.0 * h);
                    }
                    du
                }
            };
            integrand(&traj.left_states[i], &traj.states[i], &du)
        })
        .collect()
}

/// `∮ <<l|∂ₖu>/<<l|u> dk` by the periodic trapezoid rule.
pub fn loop_integral(traj: &LoopTrajectory) -> C64 {
    loop_integral_with(traj, Derivative::Analytic)
}

pub fn loop_integral_with(traj: &LoopTrajectory, derivative: Derivative) -> C64 {
    let f = loop_integrand(traj, derivative);
    f.iter().sum::<C64>() * traj.step()
}

/// `γ_B = ∮ A(k) dk` over the closed loop of `traj`.
pub fn berry_phase(traj: &LoopTrajectory) -> C64 {
    -I * loop_integral(traj)
}

pub fn berry_phase_with(traj: &LoopTrajectory, derivative: Derivative) -> C64 {
    -I * loop_integral_with(traj, derivative)
}

/// `w = γ_B / π`, independent of the loop length.
pub fn winding_number(gamma_b: C64) -> C64 {
    gamma_b / PI
}

fn check_zone_factor(zone_factor: f64) -> Result<()> {
    if zone_factor == 0.0 || !zone_factor.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "zone-crossing factor must be finite and nonzero, got {zone_factor}"
        )));
    }
    Ok(())
}

/// Winding divided by the number of Brillouin zones `zone_factor` the loop
/// is taken to cross.
pub fn winding_lee(traj: &LoopTrajectory, zone_factor: f64) -> Result<C64> {
    check_zone_factor(zone_factor)?;
    Ok(winding_number(berry_phase(traj)) / zone_factor)
}

/// Trapezoid rule on `f_0..=f_m` with spacing `h`.
fn trapezoid_open(f: &[C64], h: f64) -> C64 {
    let m = f.len() - 1;
    let interior: C64 = f[1..m].iter().sum();
    (interior + (f[0] + f[m]) * 0.5) * h
}

/// `(1/π) ∫₀^{2π} A(k) dk` for one band, followed continuously from `k = 0`.
///
/// Not gauge invariant: the band generally does not close on itself.
pub fn band_winding(model: &BlochModel, band: Band, gauge: Gauge, grid_size: usize) -> Result<C64> {
    check_grid(grid_size)?;
    let samples = track(model, band, gauge, grid_size, grid_size)?;
    let f: Vec<C64> = (0..samples.k.len())
        .map(|i| {
            let du = state_derivative(model, samples.k[i], samples.branches[i], gauge);
            integrand(&samples.left_states[i], &samples.states[i], &du)
        })
        .collect();
    let integral = trapezoid_open(&f, 2.0 * PI / grid_size as f64);
    Ok(-I * integral / PI)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BandWindings {
    pub gauge: Gauge,
    pub w_plus: C64,
    pub w_minus: C64,
}

impl BandWindings {
    pub fn sum(&self) -> C64 {
        self.w_plus + self.w_minus
    }
}

pub fn band_windings(model: &BlochModel, gauge: Gauge, grid_size: usize) -> Result<BandWindings> {
    Ok(BandWindings {
        gauge,
        w_plus: band_winding(model, Band::Plus, gauge, grid_size)?,
        w_minus: band_winding(model, Band::Minus, gauge, grid_size)?,
    })
}

/// Per-band windings in each of `gauges`, evaluated independently in parallel.
pub fn band_windings_by_gauge(
    model: &BlochModel,
    gauges: &[Gauge],
    grid_size: usize,
) -> Vec<Result<BandWindings>> {
    gauges
        .par_iter()
        .map(|&g| band_windings(model, g, grid_size))
        .collect()
}

/// The 4π loop split at its 2π midpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitCheck {
    pub gauge: Gauge,
    /// First half of the loop, `k ∈ [0, 2π]`, starting on the `+` band.
    pub w_plus: C64,
    /// Second half, `k ∈ [2π, 4π]`, where the state sits on the `-` band.
    pub w_minus: C64,
    pub w_total: C64,
    /// Winding of the whole loop computed in one pass.
    pub w_loop: C64,
}

pub fn split_check(model: &BlochModel, gauge: Gauge, grid_size: usize) -> Result<SplitCheck> {
    let traj = loop_period(model, Band::Plus, gauge, grid_size)?;
    if traj.period != LoopPeriod::FourPi {
        return Err(Error::NotFourPiLoop);
    }
    let mut f = loop_integrand(&traj, Derivative::Analytic);
    // close the loop: sample 2·grid is sample 0
    f.push(f[0]);
    let h = traj.step();
    let m = grid_size;
    let w_plus = -I * trapezoid_open(&f[..=m], h) / PI;
    let w_minus = -I * trapezoid_open(&f[m..], h) / PI;
    let w_loop = winding_number(berry_phase(&traj));
    let w_total = w_plus + w_minus;
    debug_assert!((w_total - w_loop).norm() <= 1e-8);
    Ok(SplitCheck {
        gauge,
        w_plus,
        w_minus,
        w_total,
        w_loop,
    })
}

/// Everything computed about one closed loop.
#[derive(Clone, Debug, PartialEq)]
pub struct WindingReport {
    pub model: String,
    pub gauge: Gauge,
    pub grid_size: usize,
    pub period: LoopPeriod,
    /// Raw `∮ <<l|∂ₖu>/<<l|u> dk`.
    pub loop_integral: C64,
    pub gamma_b: C64,
    pub w: C64,
    /// Zone-crossing factor used for `w_lee`.
    pub zone_factor: f64,
    pub w_lee: C64,
    pub w_plus: Option<C64>,
    pub w_minus: Option<C64>,
}

impl WindingReport {
    /// True when `w` is real and integer to `tol`.
    pub fn is_quantized(&self, tol: f64) -> bool {
        self.w.im.abs() <= tol && (self.w.re - self.w.re.round()).abs() <= tol
    }
}

pub fn winding_report(
    model: &BlochModel,
    gauge: Gauge,
    grid_size: usize,
    zone_factor: f64,
    with_bands: bool,
) -> Result<WindingReport> {
    check_zone_factor(zone_factor)?;
    let traj = loop_period(model, Band::Plus, gauge, grid_size)?;
    let integral = loop_integral(&traj);
    let gamma_b = -I * integral;
    let w = winding_number(gamma_b);
    let (w_plus, w_minus) = if with_bands {
        let bw = band_windings(model, gauge, grid_size)?;
        (Some(bw.w_plus), Some(bw.w_minus))
    } else {
        (None, None)
    };
    Ok(WindingReport {
        model: model.label.clone(),
        gauge,
        grid_size,
        period: traj.period,
        loop_integral: integral,
        gamma_b,
        w,
        zone_factor,
        w_lee: w / zone_factor,
        w_plus,
        w_minus,
    })
}
