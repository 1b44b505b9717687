//! Norm bookkeeping, reflection/transmission and continuity diagnostics.

use nalgebra::DVector;
use num_complex::Complex64;

use super::spin0::bare_step;
use super::{FieldKind, FieldState, Grid1D, Medium, PotentialProfile, Trajectory, SEPARATION_TOL};
use crate::algebra::{build_representation, derived_unchecked, BetaSet, CMatrix, RepKind};
use crate::error::{Error, Result};

fn potential_at(medium: &Medium, x: f64) -> f64 {
    match medium {
        Medium::Potential(p) => p.value(x),
        _ => 0.0,
    }
}

/// Conserved density at each node.
///
/// Scalar: `|φ̇|² + |δ⁺φ|² + (m² − V²)|φ|²`, which equals ψ†ψ wherever V = 0.
/// Photon: `(ε E_z² + H_y²)/2`, with H_y from the half cell to the right.
/// Spinor: ψ†ψ.
pub fn density(state: &FieldState, grid: &Grid1D, medium: &Medium) -> Vec<f64> {
    let n = state.n_points();
    match state.kind {
        FieldKind::Spin0Kg => {
            let (phi, vel) = (&state.components[0], &state.components[1]);
            let m2 = state.mass * state.mass;
            (0..n)
                .map(|j| {
                    let grad = if j + 1 < n {
                        (phi[j + 1] - phi[j]).norm_sqr() / (grid.dx * grid.dx)
                    } else {
                        0.0
                    };
                    let v = potential_at(medium, grid.x(j));
                    vel[j].norm_sqr() + grad + (m2 - v * v) * phi[j].norm_sqr()
                })
                .collect()
        }
        FieldKind::PhotonFdtd => {
            let (e, h) = (&state.components[0], &state.components[1]);
            (0..n)
                .map(|j| {
                    let eps = match medium {
                        Medium::Index(p) => p.permittivity(grid.x(j)),
                        _ => 1.0,
                    };
                    0.5 * (eps * e[j].norm_sqr() + h[j].norm_sqr())
                })
                .collect()
        }
        FieldKind::DkpFree(_) => (0..n)
            .map(|j| state.components.iter().map(|c| c[j].norm_sqr()).sum())
            .collect(),
    }
}

pub(crate) fn total_norm(state: &FieldState, grid: &Grid1D, medium: &Medium) -> f64 {
    density(state, grid, medium).iter().sum::<f64>() * grid.dx
}

/// Norm left and right of `split`.
pub fn split_norm(state: &FieldState, grid: &Grid1D, medium: &Medium, split: f64) -> (f64, f64) {
    let mut left = 0.0;
    let mut right = 0.0;
    for (j, r) in density(state, grid, medium).into_iter().enumerate() {
        if grid.x(j) < split {
            left += r;
        } else {
            right += r;
        }
    }
    (left * grid.dx, right * grid.dx)
}

/// Fraction of the reference norm within `half_width` of `x` at the end.
pub(crate) fn window_fraction(traj: &Trajectory, x: f64, half_width: f64) -> f64 {
    let rho = density(traj.final_state(), &traj.grid, &traj.medium);
    let inside: f64 = rho
        .iter()
        .enumerate()
        .filter(|(j, _)| (traj.grid.x(*j) - x).abs() < half_width)
        .map(|(_, r)| r.abs())
        .sum();
    inside * traj.grid.dx / traj.reference_norm
}

/// `(R, T)` as the final norm left and right of `x_split` over the initial norm.
pub fn measure_rt(traj: &Trajectory, x_split: f64) -> Result<(f64, f64)> {
    let window = (10.0 * traj.grid.dx).max(match traj.medium {
        Medium::Potential(p) => 3.0 * p.smoothing_width,
        Medium::Index(p) => 3.0 * p.smoothing_width,
        Medium::Periodic => 0.0,
    });
    let frac = window_fraction(traj, x_split, window);
    if frac > SEPARATION_TOL {
        return Err(Error::NotSeparated(format!(
            "{frac:.3e} of the norm lies within {window} of x = {x_split}"
        )));
    }
    let (left, right) = split_norm(traj.final_state(), &traj.grid, &traj.medium, x_split);
    Ok((left / traj.reference_norm, right / traj.reference_norm))
}

/// Density ψ†ψ and flux ψ†β̃¹ψ at each node.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityFlux {
    pub rho: Vec<f64>,
    pub flux: Vec<f64>,
}

fn spinor_at(state: &FieldState, j: usize) -> DVector<Complex64> {
    DVector::from_iterator(
        state.components.len(),
        state.components.iter().map(|c| c[j]),
    )
}

/// Scalar trajectory as five-component spinors
/// `(−iDφ, 0, 0, (∂ₜ + iV)φ, mφ)` with D the centered difference.
pub fn spin0_spinors(
    state: &FieldState,
    grid: &Grid1D,
    medium: &Medium,
) -> Vec<DVector<Complex64>> {
    let (phi, vel) = (&state.components[0], &state.components[1]);
    let n = phi.len();
    let z = Complex64::new(0.0, 0.0);
    (0..n)
        .map(|j| {
            let up = if j + 1 < n { phi[j + 1] } else { z };
            let down = if j > 0 { phi[j - 1] } else { z };
            let d = (up - down) / (2.0 * grid.dx);
            let v = potential_at(medium, grid.x(j));
            DVector::from_vec(vec![
                -Complex64::i() * d,
                z,
                z,
                vel[j] + Complex64::i() * v * phi[j],
                phi[j] * state.mass,
            ])
        })
        .collect()
}

/// Density and x-flux of any field state; `b` supplies β̃¹ for spinor states.
pub fn density_flux(
    state: &FieldState,
    grid: &Grid1D,
    medium: &Medium,
    b: &BetaSet,
) -> DensityFlux {
    let n = state.n_points();
    let from_spinors = |psis: Vec<DVector<Complex64>>, bt1: &CMatrix| DensityFlux {
        rho: psis.iter().map(|p| p.norm_squared()).collect(),
        flux: psis.iter().map(|p| p.dotc(&(bt1 * p)).re).collect(),
    };
    match state.kind {
        FieldKind::Spin0Kg => {
            let b0 = build_representation(RepKind::Spin0);
            let bt1 = derived_unchecked(&b0).beta_tilde[0].clone();
            from_spinors(spin0_spinors(state, grid, medium), &bt1)
        }
        FieldKind::PhotonFdtd => {
            let (e, h) = (&state.components[0], &state.components[1]);
            let h_node = |j: usize| {
                let left = if j > 0 { h[j - 1].re } else { 0.0 };
                0.5 * (left + h[j].re)
            };
            let eps = |j: usize| match medium {
                Medium::Index(p) => p.permittivity(grid.x(j)),
                _ => 1.0,
            };
            DensityFlux {
                rho: (0..n)
                    .map(|j| 0.5 * (eps(j) * e[j].re * e[j].re + h_node(j).powi(2)))
                    .collect(),
                flux: (0..n).map(|j| -e[j].re * h_node(j)).collect(),
            }
        }
        FieldKind::DkpFree(_) => {
            let bt1 = derived_unchecked(b).beta_tilde[0].clone();
            from_spinors((0..n).map(|j| spinor_at(state, j)).collect(), &bt1)
        }
    }
}

/// Total x-flux `Σ Sₓ dx`.
pub fn total_flux(state: &FieldState, grid: &Grid1D, medium: &Medium, b: &BetaSet) -> f64 {
    density_flux(state, grid, medium, b)
        .flux
        .iter()
        .sum::<f64>()
        * grid.dx
}

/// max over consecutive snapshot pairs and grid points of
/// `|(ρᵇ − ρᵃ)/Δt + (J̄ⱼ₊₁ − J̄ⱼ₋₁)/2dx|` with `J̄ = (Jᵃ + Jᵇ)/2`.
///
/// Periodic trajectories wrap; others skip the two end points. Scalar runs
/// are checked only where the potential vanishes.
pub fn continuity_residual(traj: &Trajectory, b: &BetaSet) -> f64 {
    let grid = &traj.grid;
    let n = grid.n_points;
    let periodic = matches!(traj.medium, Medium::Periodic);
    let fields: Vec<DensityFlux> = traj
        .snapshots
        .iter()
        .map(|s| density_flux(s, grid, &traj.medium, b))
        .collect();
    let mut worst = 0.0_f64;
    for (pair, snaps) in fields.windows(2).zip(traj.snapshots.windows(2)) {
        let dt = snaps[1].t - snaps[0].t;
        if dt <= 0.0 {
            continue;
        }
        let jbar = |j: usize| 0.5 * (pair[0].flux[j] + pair[1].flux[j]);
        let range: Box<dyn Iterator<Item = usize>> = if periodic {
            Box::new(0..n)
        } else {
            Box::new(1..n - 1)
        };
        for j in range {
            let (up, down) = ((j + 1) % n, (j + n - 1) % n);
            if [down, j, up]
                .iter()
                .any(|&i| potential_at(&traj.medium, grid.x(i)).abs() > 1e-15)
            {
                continue;
            }
            let r =
                (pair[1].rho[j] - pair[0].rho[j]) / dt + (jbar(up) - jbar(down)) / (2.0 * grid.dx);
            worst = worst.max(r.abs());
        }
    }
    worst
}

/// First-order equation residual of the scalar state rebuilt on a staggered
/// lattice, over nodes where the potential vanishes.
///
/// `ψ₀ = −iδ⁺φ` sits at half cells, `ψ₃ = δₜφ` at half steps, `ψ₄ = mφ` at
/// nodes; with these placements every row of `(iβ^μ∂_μ + m)ψ = 0` is a
/// difference identity or the leapfrog update itself. Needs the previous
/// time level.
pub fn spin0_dkp_residual(
    state: &FieldState,
    grid: &Grid1D,
    potential: &PotentialProfile,
) -> Result<f64> {
    let prev = state.previous.as_ref().ok_or(Error::InvalidParameter {
        name: "state",
        reason: "staggered reconstruction needs the previous time level".into(),
    })?;
    let phi = &state.components[0];
    let m = state.mass;
    let next = bare_step(grid, potential, m, prev, phi);
    let (dt, dx) = (grid.dt, grid.dx);
    let i = Complex64::i();
    let n = phi.len();
    let free = |j: usize| potential.value(grid.x(j)).abs() <= 1e-15;

    let psi0 = |j: usize| -i * (phi[j + 1] - phi[j]) / dx;
    let psi3_next = |j: usize| (next[j] - phi[j]) / dt;
    let psi3_prev = |j: usize| (phi[j] - prev[j]) / dt;

    let mut worst = 0.0_f64;
    let mut size = 0.0_f64;
    for j in 1..n - 1 {
        if !(free(j - 1) && free(j) && free(j + 1)) {
            continue;
        }
        // row 0 at j + 1/2: i∂ₓψ₄ + mψ₀
        let r0 = i * m * (phi[j + 1] - phi[j]) / dx + psi0(j) * m;
        // row 3 at n + 1/2: −∂ₜψ₄ + mψ₃
        let r3 = -(next[j] - phi[j]) * m / dt + psi3_next(j) * m;
        // row 4 at (j, n): ∂ₜψ₃ − i∂ₓψ₀ + mψ₄
        let r4 = (psi3_next(j) - psi3_prev(j)) / dt - i * (psi0(j) - psi0(j - 1)) / dx
            + phi[j] * (m * m);
        worst = worst.max(r0.norm()).max(r3.norm()).max(r4.norm());
        size = size
            .max(psi0(j).norm())
            .max(psi3_next(j).norm())
            .max((phi[j] * m).norm());
    }
    Ok(if size == 0.0 {
        0.0
    } else {
        worst / (size * m.max(1.0))
    })
}
