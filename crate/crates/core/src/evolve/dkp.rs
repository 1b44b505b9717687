//! Free first-order evolution `i∂ₜψ = (−iβ̃¹∂ₓ − mβ₀)ψ` on a periodic grid.
//!
//! `∂ₓ` is the centered difference, diagonal in Fourier space with symbol
//! `i·sin(κdx)/dx`. Each mode is advanced by the implicit midpoint (Cayley)
//! map `(1 + iHdt/2)⁻¹(1 − iHdt/2)`, which is unitary because H is
//! Hermitian, so `Σψ†ψ dx` is conserved to rounding.

use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{
    gaussian, measure, record, FieldKind, FieldState, Grid1D, Medium, PacketSpec, Trajectory,
};
use crate::algebra::{derived_unchecked, BetaSet, CMatrix, RepKind};
use crate::error::{Error, Result};

/// Tolerance on the constraint for initial data.
pub const INITIAL_CONSTRAINT_TOL: f64 = 1e-10;
/// Tolerance on the constraint at the end of a run.
pub const FINAL_CONSTRAINT_TOL: f64 = 1e-8;

fn centered_symbol(kappa: f64, dx: f64) -> f64 {
    (kappa * dx).sin() / dx
}

/// Positive-frequency eigenvector of H at discrete wavenumber `p`.
fn mode_vector(rep: RepKind, p: f64, mass: f64) -> Vec<Complex64> {
    let w = (p * p + mass * mass).sqrt();
    let z = Complex64::new(0.0, 0.0);
    match rep {
        RepKind::Spin0 => vec![
            Complex64::from(p),
            z,
            z,
            Complex64::new(0.0, -w),
            Complex64::from(mass),
        ],
        RepKind::Spin1 => {
            let mut u = vec![z; 10];
            u[2] = Complex64::from(1.0);
            u[4] = Complex64::from(-p / w);
            u[8] = Complex64::from(mass / w);
            u
        }
    }
}

pub(crate) fn check_mass(rep: RepKind, mass: f64) -> Result<()> {
    if !(mass > 0.0) {
        return Err(Error::InvalidParameter {
            name: "mass",
            reason: format!("free {rep} evolution needs mass > 0, got {mass}"),
        });
    }
    Ok(())
}

pub(crate) fn init(
    grid: &Grid1D,
    spec: &PacketSpec,
    rep: RepKind,
    mass: f64,
) -> Result<FieldState> {
    check_mass(rep, mass)?;
    let mut phi = gaussian(grid, spec);
    let ffts = Ffts::new(grid.n_points);
    ffts.forward(&mut phi);
    let kappa = grid.wavenumbers();
    let mut comps = vec![vec![Complex64::new(0.0, 0.0); grid.n_points]; rep.dim()];
    for (q, amp) in phi.iter().enumerate() {
        let u = mode_vector(rep, centered_symbol(kappa[q], grid.dx), mass);
        for (c, uc) in u.iter().enumerate() {
            comps[c][q] = amp * uc;
        }
    }
    for c in comps.iter_mut() {
        ffts.inverse(c);
    }
    Ok(FieldState {
        kind: FieldKind::DkpFree(rep),
        t: 0.0,
        components: comps,
        previous: None,
        mass,
    })
}

/// `u e^{iκx}` with `κ = 2πq/L`, an exact positive-frequency eigenstate of
/// the discrete Hamiltonian.
pub fn plane_wave_state(grid: &Grid1D, rep: RepKind, mass: f64, q: i64) -> Result<FieldState> {
    check_mass(rep, mass)?;
    let kappa = 2.0 * std::f64::consts::PI * q as f64 / grid.length();
    let u = mode_vector(rep, centered_symbol(kappa, grid.dx), mass);
    let comps = u
        .iter()
        .map(|uc| {
            (0..grid.n_points)
                .map(|j| uc * Complex64::from_polar(1.0, kappa * grid.x(j)))
                .collect()
        })
        .collect();
    Ok(FieldState {
        kind: FieldKind::DkpFree(rep),
        t: 0.0,
        components: comps,
        previous: None,
        mass,
    })
}

struct Ffts {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl Ffts {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Ffts {
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
            scale: 1.0 / n as f64,
        }
    }

    fn forward(&self, v: &mut [Complex64]) {
        self.fwd.process(v);
    }

    fn inverse(&self, v: &mut [Complex64]) {
        self.inv.process(v);
        for z in v.iter_mut() {
            *z *= self.scale;
        }
    }
}

/// Schrödinger-form Hamiltonian at discrete wavenumber `p`.
fn hamiltonian(b: &BetaSet, beta_tilde1: &CMatrix, p: f64, mass: f64) -> CMatrix {
    beta_tilde1 * Complex64::from(p) - b.lower(0) * Complex64::from(mass)
}

/// `max_j ‖(1 − β₀²)(iβ¹Dψ + mψ)_j‖ / (max(1, m) · max_j ‖ψ_j‖)` with D the
/// periodic centered difference.
pub fn constraint_residual(state: &FieldState, grid: &Grid1D, b: &BetaSet) -> f64 {
    let n = state.n_points();
    let dim = state.components.len();
    if dim != b.dim() || n == 0 {
        return f64::INFINITY;
    }
    let b0 = b.lower(0);
    let proj = CMatrix::identity(dim, dim) - b0 * b0;
    let op_d = &proj * b.upper(1) * Complex64::i();
    let op_m = &proj * Complex64::from(state.mass);
    let at = |j: usize| DVector::from_iterator(dim, state.components.iter().map(|c| c[j]));
    let mut worst = 0.0_f64;
    let mut size = 0.0_f64;
    for j in 0..n {
        let d = (at((j + 1) % n) - at((j + n - 1) % n)) / Complex64::from(2.0 * grid.dx);
        let psi = at(j);
        let r = &op_d * d + &op_m * &psi;
        worst = worst.max(r.norm());
        size = size.max(psi.norm());
    }
    if size == 0.0 {
        0.0
    } else {
        worst / (size * state.mass.max(1.0))
    }
}

/// Evolves the full spinor without a potential on a periodic grid.
pub fn evolve_dkp_free(
    state: &FieldState,
    grid: &Grid1D,
    b: &BetaSet,
    mass: f64,
    t_final: f64,
    snap_every: usize,
) -> Result<Trajectory> {
    let rep = match state.kind {
        FieldKind::DkpFree(rep) if rep == b.rep() => rep,
        _ => {
            return Err(Error::InvalidParameter {
                name: "state",
                reason: format!("evolve_dkp_free needs a {} spinor state", b.rep()),
            })
        }
    };
    check_mass(rep, mass)?;
    let n = grid.n_points;
    if state.n_points() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: state.n_points(),
        });
    }
    if grid.dt * (1.0 / grid.dx + mass) > 2.0 {
        // the Cayley map is stable for any dt; this bounds the phase error per step
        return Err(Error::CourantViolation(format!(
            "dt·(1/dx + m) = {:.3} exceeds 2",
            grid.dt * (1.0 / grid.dx + mass)
        )));
    }
    let mut st = state.clone();
    st.mass = mass;
    let residual = constraint_residual(&st, grid, b);
    if residual > INITIAL_CONSTRAINT_TOL {
        return Err(Error::ConstraintViolated {
            residual,
            tolerance: INITIAL_CONSTRAINT_TOL,
        });
    }

    let dim = rep.dim();
    let bt1 = derived_unchecked(b).beta_tilde[0].clone();
    let half = Complex64::new(0.0, 0.5 * grid.dt);
    let id = CMatrix::identity(dim, dim);
    let propagators: Vec<CMatrix> = grid
        .wavenumbers()
        .iter()
        .map(|&k| {
            let h = hamiltonian(b, &bt1, centered_symbol(k, grid.dx), mass);
            let lhs = &id + &h * half;
            let rhs = &id - &h * half;
            lhs.lu()
                .solve(&rhs)
                .expect("1 + iHdt/2 is invertible for Hermitian H")
        })
        .collect();

    let ffts = Ffts::new(n);
    let mut modes = st.components.clone();
    for c in modes.iter_mut() {
        ffts.forward(c);
    }

    let medium = Medium::Periodic;
    let reference_norm = measure::total_norm(&st, grid, &medium);
    let mut snapshots = Vec::new();
    let mut history = Vec::new();
    record(&mut snapshots, &mut history, st.clone(), grid, &medium);

    let steps = grid.steps_to(t_final);
    let mut v = DVector::<Complex64>::zeros(dim);
    for step in 1..=steps {
        for (q, u) in propagators.iter().enumerate() {
            for c in 0..dim {
                v[c] = modes[c][q];
            }
            let w = u * &v;
            for c in 0..dim {
                modes[c][q] = w[c];
            }
        }
        let due = snap_every > 0 && step % snap_every == 0;
        if step == steps || due {
            let mut comps = modes.clone();
            for c in comps.iter_mut() {
                ffts.inverse(c);
            }
            let snap = FieldState {
                kind: FieldKind::DkpFree(rep),
                t: st.t + step as f64 * grid.dt,
                components: comps,
                previous: None,
                mass,
            };
            record(&mut snapshots, &mut history, snap, grid, &medium);
        }
    }

    let traj = Trajectory {
        grid: *grid,
        medium,
        mass,
        snapshots,
        reference_norm,
        history,
    };
    let residual = constraint_residual(traj.final_state(), grid, b);
    if residual > FINAL_CONSTRAINT_TOL {
        return Err(Error::ConstraintViolated {
            residual,
            tolerance: FINAL_CONSTRAINT_TOL,
        });
    }
    Ok(traj)
}
