//! Scalar field in a static potential, `(i∂ₜ − V)²φ = (−∂ₓ² + m²)φ`, i.e.
//! `φ̈ + 2iVφ̇ = φ'' − (m² − V²)φ`.
//!
//! Leapfrog in time; the first-order `φ̇` term (and the sponge damping) is
//! centered over three levels and solved for the new level point by point:
//!
//! `(1 + c dt) φⁿ⁺¹ = 2φⁿ − (1 − c dt) φⁿ⁻¹ + dt² (Lφⁿ − (m² − V²) φⁿ)`,
//! `c = iV + σ_sponge`.

use num_complex::Complex64;
use serde::Serialize;

use super::{
    gaussian, measure, record, spectral_map, FieldKind, FieldState, Grid1D, Medium, PacketSpec,
    PotentialProfile, Trajectory, SEPARATION_TOL,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Stencil {
    /// `(φⱼ₊₁ − 2φⱼ + φⱼ₋₁)/dx²`
    #[default]
    Compact,
    /// `(φⱼ₊₂ − 2φⱼ + φⱼ₋₂)/4dx²`, the square of the centered first difference
    Wide,
}

impl Stencil {
    /// Symbol of −L at wavenumber κ.
    pub fn symbol(self, kappa: f64, dx: f64) -> f64 {
        match self {
            Stencil::Compact => (2.0 * (0.5 * kappa * dx).sin() / dx).powi(2),
            Stencil::Wide => ((kappa * dx).sin() / dx).powi(2),
        }
    }

    /// Largest value of the symbol.
    fn symbol_max(self, dx: f64) -> f64 {
        match self {
            Stencil::Compact => 4.0 / (dx * dx),
            Stencil::Wide => 1.0 / (dx * dx),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spin0Options {
    pub stencil: Stencil,
    /// Absorbing layer width at each end (0 disables).
    pub sponge_width: f64,
    pub sponge_strength: f64,
    /// Keep every n-th step (0 keeps only the initial and final states).
    pub snap_every: usize,
    /// Fail with NotSeparated if the packet still straddles the step at the end.
    pub require_separation: bool,
}

impl Default for Spin0Options {
    fn default() -> Self {
        Spin0Options {
            stencil: Stencil::Compact,
            sponge_width: 0.0,
            sponge_strength: 2.0,
            snap_every: 0,
            require_separation: true,
        }
    }
}

pub(crate) fn courant_check(grid: &Grid1D, mass: f64, stencil: Stencil) -> Result<()> {
    let lhs = grid.dt * grid.dt * (stencil.symbol_max(grid.dx) + mass * mass) / 4.0;
    if lhs > 1.0 {
        return Err(Error::CourantViolation(format!(
            "dt²(max|L| + m²)/4 = {lhs:.4} exceeds 1 (dt = {}, dx = {})",
            grid.dt, grid.dx
        )));
    }
    Ok(())
}

pub(crate) fn init(grid: &Grid1D, spec: &PacketSpec, mass: f64, stencil: Stencil) -> FieldState {
    let phi = gaussian(grid, spec);
    let kappa = grid.wavenumbers();
    let dt = grid.dt;
    // positive root of (2 − 2cos ωdt)/dt² = symbol + m²
    let omega: Vec<f64> = kappa
        .iter()
        .map(|&k| {
            let c = 1.0 - 0.5 * dt * dt * (stencil.symbol(k, grid.dx) + mass * mass);
            c.clamp(-1.0, 1.0).acos() / dt
        })
        .collect();
    let prev = spectral_map(&phi, |q| Complex64::from_polar(1.0, omega[q] * dt));
    let vel = spectral_map(&phi, |q| Complex64::new(0.0, -(omega[q] * dt).sin() / dt));
    FieldState {
        kind: FieldKind::Spin0Kg,
        t: 0.0,
        components: vec![phi, vel],
        previous: Some(prev),
        mass,
    }
}

struct Stepper {
    coupling: Vec<Complex64>,
    potential_sq: Vec<f64>,
    mass_sq: f64,
    dt: f64,
    inv_dx2: f64,
    stencil: Stencil,
}

impl Stepper {
    fn new(grid: &Grid1D, potential: &PotentialProfile, mass: f64, opts: &Spin0Options) -> Self {
        let n = grid.n_points;
        let sponge = |j: usize| {
            if opts.sponge_width <= 0.0 {
                return 0.0;
            }
            let d = (grid.x(j) - grid.x_min).min(grid.x_max() - grid.x(j));
            if d >= opts.sponge_width {
                0.0
            } else {
                opts.sponge_strength * ((opts.sponge_width - d) / opts.sponge_width).powi(2)
            }
        };
        let v: Vec<f64> = (0..n).map(|j| potential.value(grid.x(j))).collect();
        Stepper {
            coupling: (0..n).map(|j| Complex64::new(sponge(j), v[j])).collect(),
            potential_sq: v.iter().map(|v| v * v).collect(),
            mass_sq: mass * mass,
            dt: grid.dt,
            inv_dx2: 1.0 / (grid.dx * grid.dx),
            stencil: opts.stencil,
        }
    }

    fn laplacian(&self, phi: &[Complex64], j: usize) -> Complex64 {
        let n = phi.len();
        let at = |i: isize| {
            if i < 0 || i >= n as isize {
                Complex64::new(0.0, 0.0)
            } else {
                phi[i as usize]
            }
        };
        let j = j as isize;
        match self.stencil {
            Stencil::Compact => (at(j + 1) - phi[j as usize] * 2.0 + at(j - 1)) * self.inv_dx2,
            Stencil::Wide => {
                (at(j + 2) - phi[j as usize] * 2.0 + at(j - 2)) * (0.25 * self.inv_dx2)
            }
        }
    }

    fn step(&self, prev: &[Complex64], cur: &[Complex64], next: &mut [Complex64]) {
        let dt = self.dt;
        for j in 0..cur.len() {
            let c = self.coupling[j] * dt;
            let force = self.laplacian(cur, j) - cur[j] * (self.mass_sq - self.potential_sq[j]);
            next[j] = (cur[j] * 2.0 - prev[j] * (1.0 - c) + force * (dt * dt)) / (1.0 + c);
        }
    }

    /// `φⁿ⁻¹` from `(φ, φ̇)` by a second-order Taylor step backwards.
    fn taylor_previous(&self, phi: &[Complex64], vel: &[Complex64]) -> Vec<Complex64> {
        let dt = self.dt;
        (0..phi.len())
            .map(|j| {
                let accel = self.laplacian(phi, j)
                    - phi[j] * (self.mass_sq - self.potential_sq[j])
                    - vel[j] * self.coupling[j] * 2.0;
                phi[j] - vel[j] * dt + accel * (0.5 * dt * dt)
            })
            .collect()
    }
}

/// Evolves a scalar packet to `t_final` through the potential.
pub fn evolve_spin0(
    state: &FieldState,
    grid: &Grid1D,
    potential: &PotentialProfile,
    t_final: f64,
    opts: &Spin0Options,
) -> Result<Trajectory> {
    if state.kind != FieldKind::Spin0Kg {
        return Err(Error::InvalidParameter {
            name: "state",
            reason: "evolve_spin0 needs a scalar (phi, dphi/dt) state".into(),
        });
    }
    if state.n_points() != grid.n_points {
        return Err(Error::DimensionMismatch {
            expected: grid.n_points,
            got: state.n_points(),
        });
    }
    let mass = state.mass;
    courant_check(grid, mass, opts.stencil)?;
    let medium = Medium::Potential(*potential);
    let stepper = Stepper::new(grid, potential, mass, opts);
    let steps = grid.steps_to(t_final);
    let dt = grid.dt;

    let mut cur = state.components[0].clone();
    let mut prev = match &state.previous {
        Some(p) => p.clone(),
        None => stepper.taylor_previous(&cur, &state.components[1]),
    };
    let mut next = vec![Complex64::new(0.0, 0.0); grid.n_points];

    let reference_norm = measure::total_norm(state, grid, &medium);
    let mut snapshots = Vec::new();
    let mut history = Vec::new();
    record(&mut snapshots, &mut history, state.clone(), grid, &medium);

    for n in 0..=steps {
        stepper.step(&prev, &cur, &mut next);
        let due = opts.snap_every > 0 && n > 0 && n % opts.snap_every == 0;
        if n == steps || due {
            let vel = cur
                .iter()
                .zip(&prev)
                .zip(&next)
                .map(|((_, p), nx)| (nx - p) / (2.0 * dt))
                .collect();
            let snap = FieldState {
                kind: FieldKind::Spin0Kg,
                t: state.t + n as f64 * dt,
                components: vec![cur.clone(), vel],
                previous: Some(prev.clone()),
                mass,
            };
            record(&mut snapshots, &mut history, snap, grid, &medium);
        }
        if n == steps {
            break;
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }

    let traj = Trajectory {
        grid: *grid,
        medium,
        mass,
        snapshots,
        reference_norm,
        history,
    };
    if opts.require_separation && potential.v0 != 0.0 {
        let window = separation_window(grid, potential.smoothing_width);
        let frac = measure::window_fraction(&traj, potential.x_step, window);
        if frac > SEPARATION_TOL {
            return Err(Error::NotSeparated(format!(
                "{frac:.3e} of the norm lies within {window} of the step at t = {}",
                traj.final_state().t
            )));
        }
    }
    Ok(traj)
}

pub(crate) fn separation_window(grid: &Grid1D, width: f64) -> f64 {
    (10.0 * grid.dx).max(3.0 * width)
}

/// One leapfrog step from `(prev, cur)` without sponges, for diagnostics.
pub(crate) fn bare_step(
    grid: &Grid1D,
    potential: &PotentialProfile,
    mass: f64,
    prev: &[Complex64],
    cur: &[Complex64],
) -> Vec<Complex64> {
    let stepper = Stepper::new(grid, potential, mass, &Spin0Options::default());
    let mut next = vec![Complex64::new(0.0, 0.0); cur.len()];
    stepper.step(prev, cur, &mut next);
    next
}
