use dkp_core::algebra::{build_representation, RepKind};
use dkp_core::evolve::*;
use dkp_core::scatter::{solve, Barrier, Particle, StepProblem};
use num_complex::Complex64;

const K_C: f64 = 1.2;
const SIGMA: f64 = 12.5;

fn scattering_grid(n: usize) -> Grid1D {
    let dx = 400.0 / (n as f64 - 1.0);
    Grid1D::new(-200.0, dx, n, 0.5 * dx).unwrap()
}

fn packet() -> PacketSpec {
    PacketSpec {
        x_center: -70.0,
        sigma: SIGMA,
        k_center: K_C,
        norm: 1.0,
    }
}

fn spin0_rt(n: usize, v0: f64) -> (f64, f64) {
    let grid = scattering_grid(n);
    let pot = PotentialProfile::new(v0, 0.0, 0.0).unwrap();
    let st = init_packet(
        &grid,
        &packet(),
        FieldKind::Spin0Kg,
        &Medium::Potential(pot),
        1.0,
    )
    .unwrap();
    let traj = evolve_spin0(&st, &grid, &pot, 190.0, &Spin0Options::default()).unwrap();
    measure_rt(&traj, 0.0).unwrap()
}

/// Sharp-step amplitude ratio for a scalar of unit mass, with k′ chosen by
/// the group velocity in the right region.
fn step_reflection(k: f64, v0: f64) -> f64 {
    let k0 = (k * k + 1.0).sqrt();
    let e = k0 - v0;
    let d = e * e - 1.0;
    let kp = if d < 0.0 {
        Complex64::new(0.0, (-d).sqrt())
    } else {
        Complex64::from(d.sqrt() * e.signum())
    };
    ((k - kp) / (k + kp)).norm_sqr()
}

/// Reflection averaged over the packet spectrum, weighted by incident energy.
fn packet_reflection(v0: f64) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..=20_000 {
        let k = K_C - 0.3 + 0.6 * i as f64 / 20_000.0;
        let w = (-2.0 * SIGMA * SIGMA * (k - K_C).powi(2)).exp() * (k * k + 1.0);
        num += w * step_reflection(k, v0);
        den += w;
    }
    num / den
}

#[test]
fn transmitting_step_matches_carrier_reflection() {
    let k0 = (K_C * K_C + 1.0).sqrt();
    let analytic = solve(&StepProblem::new(
        Particle::Spin0Massive,
        k0,
        1.0,
        Barrier::Potential(-1.0),
    ))
    .unwrap()
    .r;
    let (r, t) = spin0_rt(8192, -1.0);
    assert!(
        ((r - analytic) / analytic).abs() < 0.01,
        "R = {r}, analytic {analytic}"
    );
    assert!((r + t - 1.0).abs() <= 2e-3);
}

#[test]
fn evanescent_step_reflects_totally() {
    let (r, t) = spin0_rt(8192, 1.2);
    assert!((r - 1.0).abs() < 0.01, "R = {r}");
    assert!((r + t - 1.0).abs() <= 2e-3);
}

#[test]
fn weak_step_matches_packet_averaged_reflection() {
    let oracle = packet_reflection(0.3);
    let (r, t) = spin0_rt(8192, 0.3);
    assert!(
        ((r - oracle) / oracle).abs() < 0.01,
        "R = {r}, oracle {oracle}"
    );
    assert!(r <= 1.0 + 2e-3);
    assert!((r + t - 1.0).abs() <= 2e-3);
}

#[test]
fn reflection_error_falls_under_refinement() {
    let oracle = packet_reflection(0.3);
    let coarse = (spin0_rt(2048, 0.3).0 - oracle).abs();
    let fine = (spin0_rt(4096, 0.3).0 - oracle).abs();
    assert!(coarse / fine >= 3.0, "coarse {coarse:.3e}, fine {fine:.3e}");
}

#[test]
fn klein_zone_packet_follows_charge_current_ratio() {
    let oracle = packet_reflection(4.0);
    assert!(oracle > 1.0);
    let grid = scattering_grid(8192);
    let pot = PotentialProfile::new(4.0, 0.0, 0.0).unwrap();
    let st = init_packet(
        &grid,
        &packet(),
        FieldKind::Spin0Kg,
        &Medium::Potential(pot),
        1.0,
    )
    .unwrap();
    let traj = evolve_spin0(&st, &grid, &pot, 190.0, &Spin0Options::default()).unwrap();
    let (r, t) = measure_rt(&traj, 0.0).unwrap();
    assert!(
        ((r - oracle) / oracle).abs() < 0.01,
        "R = {r}, oracle {oracle}"
    );
    assert!(t < 0.0);
}

fn photon_rt(n2: f64) -> (f64, f64) {
    let base = scattering_grid(8192);
    let grid = Grid1D::new(base.x_min, base.dx, base.n_points, 0.5 * base.dx / n2).unwrap();
    let index = IndexProfile::new(n2, 0.0, 0.0).unwrap();
    let st = init_packet(
        &grid,
        &packet(),
        FieldKind::PhotonFdtd,
        &Medium::Index(index),
        0.0,
    )
    .unwrap();
    let traj = evolve_photon(&st, &grid, &index, 150.0, 0.0, 0).unwrap();
    measure_rt(&traj, 0.0).unwrap()
}

#[test]
fn photon_glass_interface_reflects_four_percent() {
    let (r, t) = photon_rt(1.5);
    assert!((r - 0.04).abs() <= 0.005, "R = {r}");
    assert!((r + t - 1.0).abs() <= 2e-3);
}

#[test]
fn smooth_interface_suppresses_reflection() {
    let grid = scattering_grid(8192);
    let index = IndexProfile::new(1.5, 0.0, 2.0 / K_C).unwrap();
    let st = init_packet(
        &grid,
        &packet(),
        FieldKind::PhotonFdtd,
        &Medium::Index(index),
        0.0,
    )
    .unwrap();
    let traj = evolve_photon(&st, &grid, &index, 150.0, 0.0, 0).unwrap();
    let (r, _) = measure_rt(&traj, 0.0).unwrap();
    assert!(r < 0.01, "R = {r}");
}

fn periodic_grid(n: usize, dx: f64, dt: f64) -> Grid1D {
    Grid1D::new(0.0, dx, n, dt).unwrap()
}

fn periodic_packet(grid: &Grid1D, rep: RepKind, sigma: f64, k: f64) -> FieldState {
    let spec = PacketSpec {
        x_center: 0.5 * grid.length(),
        sigma,
        k_center: k,
        norm: 1.0,
    };
    init_packet(grid, &spec, FieldKind::DkpFree(rep), &Medium::Periodic, 1.0).unwrap()
}

fn max_abs_diff(a: &[Vec<Complex64>], b: &[Vec<Complex64>], phase: Complex64) -> (f64, f64) {
    let mut diff = 0.0_f64;
    let mut size = 0.0_f64;
    for (ca, cb) in a.iter().zip(b) {
        for (x, y) in ca.iter().zip(cb) {
            diff = diff.max((x - y * phase).norm());
            size = size.max(y.norm());
        }
    }
    (diff, size)
}

#[test]
fn plane_wave_advances_by_its_discrete_frequency() {
    for rep in [RepKind::Spin0, RepKind::Spin1] {
        let b = build_representation(rep);
        let grid = periodic_grid(16, 0.5, 5e-5);
        let st = plane_wave_state(&grid, rep, 1.0, 1).unwrap();
        let kappa = 2.0 * std::f64::consts::PI / grid.length();
        let p = (kappa * grid.dx).sin() / grid.dx;
        let omega = (p * p + 1.0).sqrt();
        let period = 2.0 * std::f64::consts::PI / omega;
        let traj = evolve_dkp_free(&st, &grid, &b, 1.0, period, 0).unwrap();
        let end = traj.final_state();
        let phase = Complex64::from_polar(1.0, -omega * end.t);
        let (diff, size) = max_abs_diff(&end.components, &st.components, phase);
        assert!(diff / size <= 1e-8, "{rep}: {:.3e}", diff / size);
    }
}

#[test]
fn free_spinor_norm_is_conserved() {
    for rep in [RepKind::Spin0, RepKind::Spin1] {
        let b = build_representation(rep);
        let grid = periodic_grid(512, 0.1, 0.01);
        let st = periodic_packet(&grid, rep, 4.0, 1.5);
        let traj = evolve_dkp_free(&st, &grid, &b, 1.0, 100.0, 0).unwrap();
        let last = traj.history.last().unwrap();
        let drift = ((last.left + last.right) / traj.reference_norm - 1.0).abs();
        assert_eq!(grid.steps_to(100.0), 10_000);
        assert!(drift <= 1e-8, "{rep}: drift {drift:.3e}");
        assert!(constraint_residual(traj.final_state(), &grid, &b) <= 1e-8);
    }
}

fn continuity_at(n: usize, dx: f64, dt: f64) -> f64 {
    let b = build_representation(RepKind::Spin0);
    let grid = periodic_grid(n, dx, dt);
    let st = periodic_packet(&grid, RepKind::Spin0, 4.0, 1.0);
    let traj = evolve_dkp_free(&st, &grid, &b, 1.0, 2.0, 1).unwrap();
    continuity_residual(&traj, &b)
}

#[test]
fn continuity_residual_converges_at_second_order() {
    let coarse = continuity_at(256, 0.2, 0.02);
    let fine = continuity_at(512, 0.1, 0.01);
    let ratio = coarse / fine;
    assert!((ratio - 4.0).abs() <= 0.5, "ratio {ratio}");
}

#[test]
fn continuity_residual_vanishes_for_zero_field() {
    let b = build_representation(RepKind::Spin1);
    let grid = periodic_grid(32, 0.5, 0.05);
    let st = FieldState::zeros(FieldKind::DkpFree(RepKind::Spin1), 32, 1.0);
    let traj = evolve_dkp_free(&st, &grid, &b, 1.0, 0.5, 1).unwrap();
    assert_eq!(continuity_residual(&traj, &b), 0.0);
}

#[test]
fn continuity_residual_is_negligible_for_plane_wave() {
    for rep in [RepKind::Spin0, RepKind::Spin1] {
        let b = build_representation(rep);
        let grid = periodic_grid(64, 0.25, 0.01);
        let st = plane_wave_state(&grid, rep, 1.0, 3).unwrap();
        let traj = evolve_dkp_free(&st, &grid, &b, 1.0, 1.0, 1).unwrap();
        assert!(continuity_residual(&traj, &b) <= 1e-8);
    }
}

#[test]
fn spinor_and_scalar_evolutions_agree() {
    let (n, dx, dt, t_final) = (1024, 0.1, 2.5e-4, 5.0);
    let grid = periodic_grid(n, dx, dt);
    let spec = PacketSpec {
        x_center: 0.5 * grid.length(),
        sigma: 5.0,
        k_center: 1.0,
        norm: 1.0,
    };
    let scalar = init_spin0_packet(
        &grid,
        &spec,
        1.0,
        Stencil::Wide,
        &Medium::Potential(PotentialProfile::free()),
    )
    .unwrap();
    let b = build_representation(RepKind::Spin0);
    let mut spinor = periodic_packet(&grid, RepKind::Spin0, 5.0, 1.0);
    // both carry the same Gaussian in φ; fix the overall scale from t = 0
    let (num, den) = scalar.components[0]
        .iter()
        .zip(&spinor.components[4])
        .fold((Complex64::new(0.0, 0.0), 0.0), |(n, d), (a, s)| {
            (n + a * s.conj(), d + s.norm_sqr())
        });
    let scale = num / den;
    for c in spinor.components.iter_mut() {
        for z in c.iter_mut() {
            *z *= scale;
        }
    }

    let opts = Spin0Options {
        stencil: Stencil::Wide,
        ..Spin0Options::default()
    };
    let kg = evolve_spin0(&scalar, &grid, &PotentialProfile::free(), t_final, &opts).unwrap();
    let dkp = evolve_dkp_free(&spinor, &grid, &b, 1.0, t_final, 0).unwrap();
    let phi_kg = &kg.final_state().components[0];
    let phi_dkp = &dkp.final_state().components[4];
    let diff = phi_kg
        .iter()
        .zip(phi_dkp)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let size = phi_kg.iter().map(|a| a.norm()).fold(0.0, f64::max);
    assert!(
        diff / size <= 1e-6,
        "relative difference {:.3e}",
        diff / size
    );
}

#[test]
fn scalar_trajectory_rebuilds_a_first_order_solution() {
    let grid = scattering_grid(4096);
    let pot = PotentialProfile::new(-1.0, 0.0, 0.0).unwrap();
    let st = init_packet(
        &grid,
        &packet(),
        FieldKind::Spin0Kg,
        &Medium::Potential(pot),
        1.0,
    )
    .unwrap();
    let opts = Spin0Options {
        snap_every: 500,
        ..Spin0Options::default()
    };
    let traj = evolve_spin0(&st, &grid, &pot, 190.0, &opts).unwrap();
    assert!(traj.snapshots.len() > 3);
    for snap in &traj.snapshots[1..] {
        let r = spin0_dkp_residual(snap, &grid, &pot).unwrap();
        assert!(r <= 1e-8, "t = {}: {r:.3e}", snap.t);
    }
}

#[test]
fn scalar_flux_continuity_holds_in_free_space() {
    let grid = Grid1D::new(-60.0, 0.05, 2401, 0.025).unwrap();
    let spec = PacketSpec {
        x_center: -20.0,
        sigma: 6.0,
        k_center: 1.0,
        norm: 1.0,
    };
    let free = PotentialProfile::free();
    let st = init_packet(
        &grid,
        &spec,
        FieldKind::Spin0Kg,
        &Medium::Potential(free),
        1.0,
    )
    .unwrap();
    let opts = Spin0Options {
        snap_every: 1,
        ..Spin0Options::default()
    };
    let traj = evolve_spin0(&st, &grid, &free, 2.0, &opts).unwrap();
    let b = build_representation(RepKind::Spin0);
    let peak = traj.snapshots[0].components[0]
        .iter()
        .map(|z| z.norm_sqr())
        .fold(0.0, f64::max);
    assert!(continuity_residual(&traj, &b) <= 1e-2 * peak);
}
