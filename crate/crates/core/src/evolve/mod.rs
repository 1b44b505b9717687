//! One-dimensional time evolution of wave packets.
//!
//! Three schemes share the grid, packet and trajectory types:
//!
//! | scheme                | fields                | method                               |
//! |-----------------------|-----------------------|--------------------------------------|
//! | [`evolve_spin0`]      | φ, ∂ₜφ                | leapfrog, minimal-coupling potential |
//! | [`evolve_photon`]     | E_z, H_y (staggered)  | Yee leapfrog, ε(x) = n(x)²           |
//! | [`evolve_dkp_free`]   | full spinor, periodic | spectral implicit midpoint           |
//!
//! Scattering runs use the scalar and Maxwell component equations. The full
//! first-order spinor is evolved only without a potential, as a cross-check.

mod dkp;
mod measure;
mod photon;
mod spin0;

pub use dkp::{constraint_residual, evolve_dkp_free, plane_wave_state};
pub use measure::{
    continuity_residual, density, density_flux, measure_rt, spin0_dkp_residual, spin0_spinors,
    split_norm, total_flux, DensityFlux,
};
pub use photon::evolve_photon;
pub use spin0::{evolve_spin0, Spin0Options, Stencil};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::algebra::RepKind;
use crate::error::{Error, Result};

/// Minimum samples per carrier wavelength.
pub const MIN_POINTS_PER_WAVELENGTH: f64 = 16.0;

/// Fraction of the reference norm allowed near the step when measuring.
pub const SEPARATION_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid1D {
    pub x_min: f64,
    pub dx: f64,
    pub n_points: usize,
    pub dt: f64,
}

impl Grid1D {
    pub fn new(x_min: f64, dx: f64, n_points: usize, dt: f64) -> Result<Self> {
        if !(dx > 0.0) {
            return Err(Error::InvalidParameter {
                name: "grid.dx",
                reason: format!("must be > 0, got {dx}"),
            });
        }
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter {
                name: "grid.dt",
                reason: format!("must be > 0, got {dt}"),
            });
        }
        if n_points < 16 {
            return Err(Error::InvalidParameter {
                name: "grid.n",
                reason: format!("must be >= 16, got {n_points}"),
            });
        }
        Ok(Grid1D {
            x_min,
            dx,
            n_points,
            dt,
        })
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.n_points - 1)
    }

    pub fn length(&self) -> f64 {
        self.n_points as f64 * self.dx
    }

    pub fn courant(&self) -> f64 {
        self.dt / self.dx
    }

    /// FFT-ordered wavenumbers 2πq/L, q = 0, 1, …, −1.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points;
        let l = self.length();
        (0..n)
            .map(|q| {
                let q = if q <= n / 2 {
                    q as f64
                } else {
                    q as f64 - n as f64
                };
                2.0 * std::f64::consts::PI * q / l
            })
            .collect()
    }

    pub fn steps_to(&self, t_final: f64) -> usize {
        (t_final / self.dt).round() as usize
    }
}

/// Step shape shared by potentials and refractive-index profiles.
///
/// Rises from 0 to 1 across `x_step`: a tanh ramp of the given width, or a
/// hard step (value 1 from `x_step` on) for width 0.
fn step_shape(x: f64, x_step: f64, width: f64) -> f64 {
    if width > 0.0 {
        0.5 * (1.0 + ((x - x_step) / width).tanh())
    } else if x >= x_step {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialProfile {
    pub v0: f64,
    pub x_step: f64,
    pub smoothing_width: f64,
}

impl PotentialProfile {
    pub fn new(v0: f64, x_step: f64, smoothing_width: f64) -> Result<Self> {
        if !(smoothing_width >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "potential.width",
                reason: format!("must be >= 0, got {smoothing_width}"),
            });
        }
        Ok(PotentialProfile {
            v0,
            x_step,
            smoothing_width,
        })
    }

    pub fn free() -> Self {
        PotentialProfile {
            v0: 0.0,
            x_step: 0.0,
            smoothing_width: 0.0,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        if self.v0 == 0.0 {
            return 0.0;
        }
        self.v0 * step_shape(x, self.x_step, self.smoothing_width)
    }
}

/// Refractive index rising from 1 to `n_right` across the step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndexProfile {
    pub n_right: f64,
    pub x_step: f64,
    pub smoothing_width: f64,
}

impl IndexProfile {
    pub fn new(n_right: f64, x_step: f64, smoothing_width: f64) -> Result<Self> {
        if !(n_right > 0.0) {
            return Err(Error::InvalidIndex(n_right));
        }
        if !(smoothing_width >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "potential.width",
                reason: format!("must be >= 0, got {smoothing_width}"),
            });
        }
        Ok(IndexProfile {
            n_right,
            x_step,
            smoothing_width,
        })
    }

    pub fn index(&self, x: f64) -> f64 {
        1.0 + (self.n_right - 1.0) * step_shape(x, self.x_step, self.smoothing_width)
    }

    pub fn permittivity(&self, x: f64) -> f64 {
        self.index(x).powi(2)
    }

    pub fn max_index(&self) -> f64 {
        self.n_right.max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PacketSpec {
    pub x_center: f64,
    /// Standard deviation of |φ|², i.e. amplitude `exp(−(x−x0)²/4σ²)`.
    pub sigma: f64,
    pub k_center: f64,
    /// Value of the conserved norm at t = 0.
    pub norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FieldKind {
    /// components: φ, ∂ₜφ
    Spin0Kg,
    /// components: E_z at nodes, H_y at x + dx/2 and t − dt/2
    PhotonFdtd,
    /// components: the spinor, one array per slot
    DkpFree(RepKind),
}

impl FieldKind {
    pub fn component_labels(&self) -> Vec<String> {
        match self {
            FieldKind::Spin0Kg => vec!["phi".into(), "dphi_dt".into()],
            FieldKind::PhotonFdtd => vec!["Ez".into(), "Hy".into()],
            FieldKind::DkpFree(rep) => rep.slot_labels().iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub kind: FieldKind,
    pub t: f64,
    pub components: Vec<Vec<Complex64>>,
    /// Scalar field one time step earlier, when known exactly (leapfrog start).
    pub previous: Option<Vec<Complex64>>,
    pub mass: f64,
}

impl FieldState {
    pub fn n_points(&self) -> usize {
        self.components.first().map_or(0, Vec::len)
    }

    pub fn zeros(kind: FieldKind, n: usize, mass: f64) -> Self {
        let ncomp = match kind {
            FieldKind::Spin0Kg | FieldKind::PhotonFdtd => 2,
            FieldKind::DkpFree(rep) => rep.dim(),
        };
        FieldState {
            kind,
            t: 0.0,
            components: vec![vec![Complex64::new(0.0, 0.0); n]; ncomp],
            previous: None,
            mass,
        }
    }
}

/// Medium the trajectory was evolved in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Medium {
    Potential(PotentialProfile),
    Index(IndexProfile),
    Periodic,
}

impl Medium {
    pub fn split(&self) -> Option<f64> {
        match self {
            Medium::Potential(p) => Some(p.x_step),
            Medium::Index(p) => Some(p.x_step),
            Medium::Periodic => None,
        }
    }

    /// Whether the medium differs across its split point.
    pub fn has_step(&self) -> bool {
        match self {
            Medium::Potential(p) => p.v0 != 0.0,
            Medium::Index(p) => p.n_right != 1.0,
            Medium::Periodic => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxSample {
    pub t: f64,
    /// Conserved norm left of the split.
    pub left: f64,
    pub right: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: Grid1D,
    pub medium: Medium,
    pub mass: f64,
    /// Initial state, every `snap_every`-th step, and the final state.
    pub snapshots: Vec<FieldState>,
    pub reference_norm: f64,
    pub history: Vec<FluxSample>,
}

impl Trajectory {
    pub fn final_state(&self) -> &FieldState {
        self.snapshots
            .last()
            .expect("trajectory always holds the initial state")
    }

    pub fn kind(&self) -> FieldKind {
        self.snapshots[0].kind
    }
}

/// Sampled Gaussian packet `exp(−(x−x0)²/4σ²) e^{ikx}`.
fn gaussian(grid: &Grid1D, spec: &PacketSpec) -> Vec<Complex64> {
    (0..grid.n_points)
        .map(|j| {
            let d = grid.x(j) - spec.x_center;
            Complex64::from_polar(
                (-d * d / (4.0 * spec.sigma * spec.sigma)).exp(),
                spec.k_center * grid.x(j),
            )
        })
        .collect()
}

pub(crate) fn fft(data: &mut [Complex64]) {
    FftPlanner::new().plan_fft_forward(data.len()).process(data);
}

pub(crate) fn ifft(data: &mut [Complex64]) {
    let n = data.len();
    FftPlanner::new().plan_fft_inverse(n).process(data);
    let s = 1.0 / n as f64;
    for z in data.iter_mut() {
        *z *= s;
    }
}

/// Applies a per-mode factor to a sampled field.
pub(crate) fn spectral_map(
    field: &[Complex64],
    factor: impl Fn(usize) -> Complex64,
) -> Vec<Complex64> {
    let mut buf = field.to_vec();
    fft(&mut buf);
    for (q, z) in buf.iter_mut().enumerate() {
        *z *= factor(q);
    }
    ifft(&mut buf);
    buf
}

fn check_packet(grid: &Grid1D, spec: &PacketSpec, medium: &Medium) -> Result<()> {
    if !(spec.sigma > 0.0) {
        return Err(Error::InvalidParameter {
            name: "packet.sigma",
            reason: format!("must be > 0, got {}", spec.sigma),
        });
    }
    if !(spec.norm > 0.0) {
        return Err(Error::InvalidParameter {
            name: "packet.norm",
            reason: format!("must be > 0, got {}", spec.norm),
        });
    }
    if spec.k_center != 0.0 {
        let ppw = 2.0 * std::f64::consts::PI / (spec.k_center.abs() * grid.dx);
        if ppw < MIN_POINTS_PER_WAVELENGTH {
            return Err(Error::UnderResolved {
                points_per_wavelength: ppw,
            });
        }
    }
    let lo = spec.x_center - 5.0 * spec.sigma;
    let hi = spec.x_center + 5.0 * spec.sigma;
    if lo < grid.x_min || hi > grid.x_max() {
        return Err(Error::PacketOutOfBounds(format!(
            "packet spans [{lo}, {hi}], grid spans [{}, {}]",
            grid.x_min,
            grid.x_max()
        )));
    }
    if let (true, Some(x_step)) = (medium.has_step(), medium.split()) {
        if hi >= x_step {
            return Err(Error::PacketOutOfBounds(format!(
                "packet edge x0 + 5σ = {hi} must lie left of the step at {x_step}"
            )));
        }
    }
    Ok(())
}

/// Builds a packet moving in the direction of `k_center`, normalized so the
/// conserved density integrates to `spec.norm`.
///
/// Every Fourier mode is put on the scheme's own discrete dispersion branch,
/// so the packet starts without a counter-propagating remnant.
pub fn init_packet(
    grid: &Grid1D,
    spec: &PacketSpec,
    kind: FieldKind,
    medium: &Medium,
    mass: f64,
) -> Result<FieldState> {
    check_packet(grid, spec, medium)?;
    // the initial data uses the scheme's dispersion, which is undefined past the stability limit
    let mut state = match kind {
        FieldKind::Spin0Kg => {
            spin0::courant_check(grid, mass, Stencil::Compact)?;
            spin0::init(grid, spec, mass, Stencil::Compact)
        }
        FieldKind::PhotonFdtd => {
            let vacuum = IndexProfile::new(1.0, 0.0, 0.0)?;
            photon::courant_check(
                grid,
                match medium {
                    Medium::Index(p) => p,
                    _ => &vacuum,
                },
            )?;
            photon::init(grid, spec)
        }
        FieldKind::DkpFree(rep) => dkp::init(grid, spec, rep, mass)?,
    };
    let norm = measure::total_norm(&state, grid, medium);
    if !(norm > 0.0) {
        return Err(Error::InvalidParameter {
            name: "packet",
            reason: "packet has zero norm on this grid".into(),
        });
    }
    let s = (spec.norm / norm).sqrt();
    for c in state.components.iter_mut().chain(state.previous.iter_mut()) {
        for z in c.iter_mut() {
            *z *= s;
        }
    }
    Ok(state)
}

/// Scalar packet for the leapfrog with a chosen spatial stencil.
pub fn init_spin0_packet(
    grid: &Grid1D,
    spec: &PacketSpec,
    mass: f64,
    stencil: Stencil,
    medium: &Medium,
) -> Result<FieldState> {
    check_packet(grid, spec, medium)?;
    spin0::courant_check(grid, mass, stencil)?;
    let mut state = spin0::init(grid, spec, mass, stencil);
    let norm = measure::total_norm(&state, grid, medium);
    let s = (spec.norm / norm).sqrt();
    for c in state.components.iter_mut().chain(state.previous.iter_mut()) {
        for z in c.iter_mut() {
            *z *= s;
        }
    }
    Ok(state)
}

pub(crate) fn record(
    snapshots: &mut Vec<FieldState>,
    history: &mut Vec<FluxSample>,
    state: FieldState,
    grid: &Grid1D,
    medium: &Medium,
) {
    let split = medium.split().unwrap_or(grid.x_min + 0.5 * grid.length());
    let (left, right) = measure::split_norm(&state, grid, medium, split);
    history.push(FluxSample {
        t: state.t,
        left,
        right,
    });
    snapshots.push(state);
}
