//! Yee scheme for `ε ∂ₜE_z = ∂ₓH_y`, `∂ₜH_y = ∂ₓE_z`.
//!
//! `E_z` lives on nodes at integer time levels, `H_y` half a cell to the
//! right and half a step earlier. The end nodes of `E_z` are held at zero.

use num_complex::Complex64;

use super::spin0::separation_window;
use super::{
    gaussian, measure, record, spectral_map, FieldKind, FieldState, Grid1D, IndexProfile, Medium,
    PacketSpec, Trajectory, SEPARATION_TOL,
};
use crate::error::{Error, Result};

pub(crate) fn courant_check(grid: &Grid1D, index: &IndexProfile) -> Result<()> {
    let limit = 1.0 / index.max_index();
    if grid.courant() > limit {
        return Err(Error::CourantViolation(format!(
            "dt/dx = {:.4} exceeds 1/max(n) = {limit:.4}",
            grid.courant()
        )));
    }
    Ok(())
}

/// Real packet `G(x) cos(kx)` travelling in the direction of `k_center`.
pub(crate) fn init(grid: &Grid1D, spec: &PacketSpec) -> FieldState {
    let e: Vec<Complex64> = gaussian(grid, spec)
        .into_iter()
        .map(|z| Complex64::new(z.re, 0.0))
        .collect();
    let s = if spec.k_center < 0.0 { -1.0 } else { 1.0 };
    let (dt, dx) = (grid.dt, grid.dx);
    let kappa = grid.wavenumbers();
    // ω odd in κ, so every mode travels the same way and the field stays real
    let h = spectral_map(&e, |q| {
        let w = s * 2.0 / dt * ((dt / dx) * (0.5 * kappa[q] * dx).sin()).asin();
        Complex64::from_polar(-s, 0.5 * kappa[q] * dx + 0.5 * w * dt)
    });
    let mut h: Vec<Complex64> = h.into_iter().map(|z| Complex64::new(z.re, 0.0)).collect();
    if let Some(last) = h.last_mut() {
        *last = Complex64::new(0.0, 0.0);
    }
    FieldState {
        kind: FieldKind::PhotonFdtd,
        t: 0.0,
        components: vec![e, h],
        previous: None,
        mass: 0.0,
    }
}

/// Evolves an (E_z, H_y) packet to `t_final` through the index profile.
pub fn evolve_photon(
    state: &FieldState,
    grid: &Grid1D,
    index: &IndexProfile,
    t_final: f64,
    sponge_width: f64,
    snap_every: usize,
) -> Result<Trajectory> {
    if state.kind != FieldKind::PhotonFdtd {
        return Err(Error::InvalidParameter {
            name: "state",
            reason: "evolve_photon needs an (Ez, Hy) state".into(),
        });
    }
    let n = grid.n_points;
    if state.n_points() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: state.n_points(),
        });
    }
    courant_check(grid, index)?;
    let medium = Medium::Index(*index);
    let (dt, dx) = (grid.dt, grid.dx);
    let e_coef: Vec<f64> = (0..n)
        .map(|j| dt / (index.permittivity(grid.x(j)) * dx))
        .collect();
    let h_coef = dt / dx;
    let damping: Vec<f64> = (0..n)
        .map(|j| {
            if sponge_width <= 0.0 {
                return 1.0;
            }
            let d = (grid.x(j) - grid.x_min).min(grid.x_max() - grid.x(j));
            if d >= sponge_width {
                1.0
            } else {
                (-2.0 * ((sponge_width - d) / sponge_width).powi(2) * dt).exp()
            }
        })
        .collect();

    let mut e: Vec<f64> = state.components[0].iter().map(|z| z.re).collect();
    let mut h: Vec<f64> = state.components[1].iter().map(|z| z.re).collect();
    e[0] = 0.0;
    e[n - 1] = 0.0;
    h[n - 1] = 0.0;

    let reference_norm = measure::total_norm(state, grid, &medium);
    let mut snapshots = Vec::new();
    let mut history = Vec::new();
    record(&mut snapshots, &mut history, state.clone(), grid, &medium);

    let steps = grid.steps_to(t_final);
    for step in 1..=steps {
        for j in 0..n - 1 {
            h[j] = (h[j] + h_coef * (e[j + 1] - e[j])) * damping[j];
        }
        for j in 1..n - 1 {
            e[j] = (e[j] + e_coef[j] * (h[j] - h[j - 1])) * damping[j];
        }
        let due = snap_every > 0 && step % snap_every == 0;
        if step == steps || due {
            let to_c = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            let snap = FieldState {
                kind: FieldKind::PhotonFdtd,
                t: state.t + step as f64 * dt,
                components: vec![to_c(&e), to_c(&h)],
                previous: None,
                mass: 0.0,
            };
            record(&mut snapshots, &mut history, snap, grid, &medium);
        }
    }

    let traj = Trajectory {
        grid: *grid,
        medium,
        mass: 0.0,
        snapshots,
        reference_norm,
        history,
    };
    if index.n_right != 1.0 {
        let window = separation_window(grid, index.smoothing_width);
        let frac = measure::window_fraction(&traj, index.x_step, window);
        if frac > SEPARATION_TOL {
            return Err(Error::NotSeparated(format!(
                "{frac:.3e} of the field energy lies within {window} of the interface"
            )));
        }
    }
    Ok(traj)
}
