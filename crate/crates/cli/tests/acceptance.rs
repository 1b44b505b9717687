//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so every line prints even when everything passes.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use dkp_cli::persist::{read_manifest, verify_outputs};
use dkp_core::algebra::{build_representation, identity_checks, RepKind};
use dkp_core::currents::{current_j, current_s, CurrentKind};
use dkp_core::evolve::{
    continuity_residual, evolve_dkp_free, init_packet, FieldKind, Grid1D, Medium, PacketSpec,
};
use dkp_core::planewave::{
    photon_planewave, residual_first_order, residual_secondary, spin0_planewave, spin1_planewave,
    Branch, Direction, Kinematics, Spinor, WaveKind,
};
use dkp_core::scatter::{
    kg_transmitted_spinor, solve, solve_dirac_contrast, solve_kg_contrast, solve_with_current,
    step_waves, Barrier, Particle, StepProblem,
};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = std::result::Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn within(elapsed: Duration, limit: Duration, detail: String) -> Check {
    ensure(
        elapsed < limit,
        format!(
            "{detail}; {:.3} s (limit {:.0} s)",
            elapsed.as_secs_f64(),
            limit.as_secs_f64()
        ),
    )
}

fn algebra_suite() -> Check {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    let mut count = 0;
    for rep in [RepKind::Spin0, RepKind::Spin1] {
        for check in identity_checks(&build_representation(rep)) {
            if check.residual > 1e-13 {
                return Err(format!(
                    "{rep}: {} residual {:e}",
                    check.identity, check.residual
                ));
            }
            worst = worst.max(check.residual);
            count += 1;
        }
    }
    within(
        start.elapsed(),
        Duration::from_secs(1),
        format!("{count} identities, worst residual {worst:.1e}"),
    )
}

fn planewave_suite() -> Check {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(2);
    let b0 = build_representation(RepKind::Spin0);
    let b1 = build_representation(RepKind::Spin1);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let m = rng.gen_range(0.1..5.0);
        let k0 = m + rng.gen_range(0.01..5.0);
        let kin = Kinematics::from_dispersion(m, k0, 0.0, Branch::Positive);
        let a = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        for (dir, kind) in [
            (Direction::PlusX, WaveKind::Incident),
            (Direction::MinusX, WaveKind::Reflected),
        ] {
            let waves = [
                (
                    &b0,
                    spin0_planewave(a, &kin, dir).map_err(|e| e.to_string())?,
                ),
                (
                    &b1,
                    spin1_planewave(a, 0.7, &kin, 1.0, kind).map_err(|e| e.to_string())?,
                ),
                (
                    &b1,
                    photon_planewave(1.3, k0, k0, 0.4, kind, 1.0).map_err(|e| e.to_string())?,
                ),
            ];
            for (b, w) in waves {
                let s = residual_secondary(b, &w).map_err(|e| e.to_string())?;
                let r = residual_first_order(b, &w).map_err(|e| e.to_string())?;
                let here = r
                    .max(s.derivative_identity)
                    .max(s.constraint)
                    .max(s.mass_shell);
                if here > 1e-12 {
                    return Err(format!("m = {m}, k0 = {k0}: residual {here:e}"));
                }
                worst = worst.max(here);
            }
        }
    }
    within(
        start.elapsed(),
        Duration::from_secs(1),
        format!("100 (m, k0) points x 6 waves, worst residual {worst:.1e}"),
    )
}

fn spin1_massive() -> Check {
    let spin1 = |eps: f64| {
        solve(&StepProblem::new(
            Particle::Spin1Massive,
            2.0,
            1.0,
            Barrier::Epsilon(eps),
        ))
        .map_err(|e| e.to_string())
    };
    for (eps, expected) in [
        (1.0, 0.0),
        (4.0, 1.0 / 9.0),
        (100.0, (9.0f64 / 11.0).powi(2)),
    ] {
        let s = spin1(eps)?;
        if (s.r - expected).abs() > 1e-12 || s.current_used != CurrentKind::SCurrent {
            return Err(format!(
                "eps = {eps}: R = {} ({}), expected {expected}",
                s.r, s.current_used
            ));
        }
    }
    let mut rng = StdRng::seed_from_u64(3);
    for i in 0..10_000 {
        // half uniform, half log-uniform over (0, 1e6]
        let eps = if i % 2 == 0 {
            1e6 * (1.0 - rng.gen::<f64>())
        } else {
            10f64.powf(rng.gen_range(-6.0..6.0))
        };
        let s = spin1(eps)?;
        if !(s.r < 1.0) {
            return Err(format!("eps = {eps}: R = {}", s.r));
        }
    }
    Ok("R(1, 4, 100) = 0, 1/9, (9/11)^2; R < 1 on 10^4 random eps".into())
}

fn spin0_ratio() -> Check {
    let mut rng = StdRng::seed_from_u64(4);
    let mut worst = 0.0_f64;
    for _ in 0..10_000 {
        let q = 10f64.powf(rng.gen_range(-4.0..4.0));
        let real = StepProblem::new(Particle::Spin0Massive, 1.7, 1.0, Barrier::Ratio(c(q, 0.0)));
        let s = solve(&real).map_err(|e| e.to_string())?;
        let expected = (1.0 - q) / (1.0 + q);
        let err = (s.b_over_a - expected).norm();
        worst = worst.max(err);
        if err > 1e-12 || !(s.r < 1.0) {
            return Err(format!(
                "k'/k = {q}: B/A = {}, expected {expected}",
                s.b_over_a
            ));
        }
        let imag = StepProblem::new(Particle::Spin0Massive, 1.7, 1.0, Barrier::Ratio(c(0.0, q)));
        let s = solve(&imag).map_err(|e| e.to_string())?;
        let residual = step_waves(&imag)
            .map_err(|e| e.to_string())?
            .matching_residual();
        if (s.b_over_a.norm() - 1.0).abs() > 1e-12 || residual > 1e-12 {
            return Err(format!("k'/k = {q}i: |B/A| = {}", s.b_over_a.norm()));
        }
    }
    Ok(format!(
        "10^4 real and 10^4 imaginary ratios; worst |B/A - (1-q)/(1+q)| = {worst:.1e}"
    ))
}

fn photon_fresnel() -> Check {
    let mut rng = StdRng::seed_from_u64(5);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let n = 100.0 * (1.0 - rng.gen::<f64>());
        let p = StepProblem::new(Particle::Photon, 2.0, 0.0, Barrier::Ratio(c(n, 0.0)));
        let fresnel = ((1.0 - n) / (1.0 + n)).powi(2);
        let s = solve(&p).map_err(|e| e.to_string())?;
        let poynting = solve_with_current(&p, CurrentKind::Poynting).map_err(|e| e.to_string())?;
        let err = (s.r - fresnel).abs().max((poynting.r - fresnel).abs());
        worst = worst.max(err);
        if err > 1e-12 {
            return Err(format!(
                "n = {n}: R = {}, Poynting R = {}, Fresnel {fresnel}",
                s.r, poynting.r
            ));
        }
    }
    Ok(format!(
        "10^3 random n, worst deviation from Fresnel {worst:.1e}"
    ))
}

fn klein_contrast() -> Check {
    let dirac = StepProblem::new(Particle::DiracContrast, 2.5, 1.0, Barrier::Potential(10.0))
        .with_branch(Branch::Positive);
    let d = solve_dirac_contrast(&dirac).map_err(|e| e.to_string())?;
    if !(d.r > 1.0) || (d.r + d.t - 1.0).abs() > 1e-12 {
        return Err(format!("Dirac R = {}, T = {}", d.r, d.t));
    }

    let kg = StepProblem::new(Particle::KGContrast, 1.5, 1.0, Barrier::Potential(4.0))
        .with_branch(Branch::Negative);
    let s = solve_kg_contrast(&kg).map_err(|e| e.to_string())?;
    if !(s.r > 1.0) || s.current_used != CurrentKind::JCurrent {
        return Err(format!("KG R_j = {} ({})", s.r, s.current_used));
    }
    let b = build_representation(RepKind::Spin0);
    let kin = Kinematics::from_dispersion(1.0, 1.5, 0.0, Branch::Positive);
    let inc = spin0_planewave(c(1.0, 0.0), &kin, Direction::PlusX).map_err(|e| e.to_string())?;
    let refl = spin0_planewave(s.b_over_a, &kin, Direction::MinusX).map_err(|e| e.to_string())?;
    let trans = kg_transmitted_spinor(&kg, s.c_over_a).map_err(|e| e.to_string())?;
    let mut min_s0 = f64::INFINITY;
    for i in 0..2000 {
        let x = -10.0 + 0.01 * i as f64;
        for t in [0.0, 0.7, 2.1] {
            let psi = if x < 0.0 {
                inc.at(x, t) + refl.at(x, t)
            } else {
                trans.at(x, t)
            };
            min_s0 = min_s0.min(current_s(&psi, &b).map_err(|e| e.to_string())?.0);
        }
    }
    ensure(
        min_s0 >= 0.0,
        format!(
            "Dirac R = {:.6}, R + T - 1 = {:.1e}; KG R_j = {:.6}, min S0 over 6000 samples = {min_s0:.3e}",
            d.r,
            d.r + d.t - 1.0,
            s.r
        ),
    )
}

fn dkp() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_dkp"))
}

/// Runs the binary and returns the run directory it reports.
fn run_cli(runs: &Path, args: &[&str]) -> std::result::Result<PathBuf, String> {
    let out = Command::new(dkp())
        .arg("--runs-dir")
        .arg(runs)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    let stderr = String::from_utf8_lossy(&out.stderr);
    if !out.status.success() {
        return Err(format!("dkp {}: {stderr}", args.join(" ")));
    }
    stderr
        .lines()
        .find_map(|l| l.strip_prefix("run directory: "))
        .map(PathBuf::from)
        .ok_or_else(|| format!("no run directory reported: {stderr}"))
}

fn summary(run: &Path) -> std::result::Result<serde_json::Value, String> {
    let text = std::fs::read(run.join("summary.json")).map_err(|e| e.to_string())?;
    serde_json::from_slice(&text).map_err(|e| e.to_string())
}

/// Sharp-step reflection of a unit-mass scalar at wavenumber k.
fn step_reflection(k: f64, v0: f64) -> f64 {
    let k0 = (k * k + 1.0).sqrt();
    let e = k0 - v0;
    let d = e * e - 1.0;
    let kp = if d < 0.0 {
        c(0.0, (-d).sqrt())
    } else {
        c(d.sqrt() * e.signum(), 0.0)
    };
    ((k - kp) / (k + kp)).norm_sqr()
}

/// The same, averaged over a Gaussian packet spectrum weighted by energy.
fn packet_reflection(k_c: f64, sigma: f64, v0: f64) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..=20_000 {
        let k = k_c - 0.3 + 0.6 * i as f64 / 20_000.0;
        let w = (-2.0 * sigma * sigma * (k - k_c).powi(2)).exp() * (k * k + 1.0);
        num += w * step_reflection(k, v0);
        den += w;
    }
    num / den
}

fn packet_runs() -> Check {
    let runs = tempfile::tempdir().map_err(|e| e.to_string())?;
    let n = 8192;
    let dx = 400.0 / (n as f64 - 1.0);
    let (k, sigma) = (1.2, 12.5);
    let grid: Vec<String> = vec![
        "grid.xmin=-200".into(),
        format!("grid.dx={dx}"),
        format!("grid.n={n}"),
        "packet.x0=-70".into(),
        format!("packet.sigma={sigma}"),
        format!("packet.k={k}"),
        "potential.x_step=0".into(),
        "potential.width=0".into(),
    ];
    let limit = Duration::from_secs(60);
    let mut lines = Vec::new();
    let mut ok = true;

    let evolve =
        |particle: &str, v0: f64, t_final: f64| -> std::result::Result<(f64, Duration), String> {
            let mut args = vec!["evolve".to_string(), "--particle".into(), particle.into()];
            for kv in grid.iter().cloned().chain([
                format!("potential.V0={v0}"),
                format!("run.t_final={t_final}"),
            ]) {
                args.push("--set".into());
                args.push(kv);
            }
            let start = Instant::now();
            let argv: Vec<&str> = args.iter().map(String::as_str).collect();
            let run = run_cli(runs.path(), &argv)?;
            let elapsed = start.elapsed();
            let r = summary(&run)?["R_num"]
                .as_f64()
                .ok_or("summary has no R_num")?;
            Ok((r, elapsed))
        };

    let transmitting = step_reflection(k, -1.0);
    let (r, dt) = evolve("spin0", -1.0, 190.0)?;
    let rel = (r - transmitting).abs() / transmitting;
    ok &= rel < 0.01 && dt < limit;
    lines.push(format!(
        "spin0 V0=-1: R = {r:.5} vs {transmitting:.5} ({:.2}%, {:.1} s)",
        100.0 * rel,
        dt.as_secs_f64()
    ));

    let averaged = packet_reflection(k, sigma, 0.3);
    let (r, dt) = evolve("spin0", 0.3, 190.0)?;
    let rel = (r - averaged).abs() / averaged;
    ok &= rel < 0.01 && dt < limit;
    lines.push(format!(
        "spin0 V0=0.3: R = {r:.5} vs packet-averaged {averaged:.5} ({:.2}%, carrier {:.5}, {:.1} s)",
        100.0 * rel,
        step_reflection(k, 0.3),
        dt.as_secs_f64()
    ));

    let (r, dt) = evolve("spin0", 1.2, 190.0)?;
    ok &= (r - 1.0).abs() < 0.01 && dt < limit;
    lines.push(format!(
        "spin0 V0=1.2 (evanescent): R = {r:.5} ({:.1} s)",
        dt.as_secs_f64()
    ));

    let (r, dt) = evolve("photon", 0.5, 150.0)?;
    ok &= (r - 0.04).abs() <= 0.005 && dt < limit;
    lines.push(format!(
        "photon n=1.5: R = {r:.5} vs 0.04 ({:.1} s)",
        dt.as_secs_f64()
    ));

    ensure(ok, lines.join("; "))
}

fn conservation() -> Check {
    let mut lines = Vec::new();
    for rep in [RepKind::Spin0, RepKind::Spin1] {
        let b = build_representation(rep);
        let grid = Grid1D::new(0.0, 0.1, 512, 0.01).map_err(|e| e.to_string())?;
        let spec = PacketSpec {
            x_center: 0.5 * grid.length(),
            sigma: 4.0,
            k_center: 1.5,
            norm: 1.0,
        };
        let st = init_packet(
            &grid,
            &spec,
            FieldKind::DkpFree(rep),
            &Medium::Periodic,
            1.0,
        )
        .map_err(|e| e.to_string())?;
        let t_final = 100.0;
        if grid.steps_to(t_final) != 10_000 {
            return Err(format!("{} steps", grid.steps_to(t_final)));
        }
        let traj = evolve_dkp_free(&st, &grid, &b, 1.0, t_final, 0).map_err(|e| e.to_string())?;
        let last = traj.history.last().ok_or("empty history")?;
        let drift = ((last.left + last.right) / traj.reference_norm - 1.0).abs();
        if drift > 1e-8 {
            return Err(format!("{rep}: norm drift {drift:e} over 10^4 steps"));
        }
        lines.push(format!("{rep} drift {drift:.1e}"));
    }

    let residual = |n: usize, dx: f64, dt: f64| -> std::result::Result<f64, String> {
        let b = build_representation(RepKind::Spin0);
        let grid = Grid1D::new(0.0, dx, n, dt).map_err(|e| e.to_string())?;
        let spec = PacketSpec {
            x_center: 0.5 * grid.length(),
            sigma: 4.0,
            k_center: 1.0,
            norm: 1.0,
        };
        let st = init_packet(
            &grid,
            &spec,
            FieldKind::DkpFree(RepKind::Spin0),
            &Medium::Periodic,
            1.0,
        )
        .map_err(|e| e.to_string())?;
        let traj = evolve_dkp_free(&st, &grid, &b, 1.0, 2.0, 1).map_err(|e| e.to_string())?;
        Ok(continuity_residual(&traj, &b))
    };
    let coarse = residual(256, 0.2, 0.02)?;
    let fine = residual(512, 0.1, 0.01)?;
    let ratio = coarse / fine;
    lines.push(format!(
        "continuity residual {coarse:.2e} -> {fine:.2e}, ratio {ratio:.3}"
    ));
    ensure((ratio - 4.0).abs() <= 0.5, lines.join("; "))
}

fn j0_fixture() -> Check {
    // positive-frequency spin-0 wave with k = m = 1, k0 = sqrt 2, at x = t = 0
    let w = 2f64.sqrt();
    let fixture = Spinor::from_vec(vec![
        c(1.0, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
        c(0.0, -w),
        c(1.0, 0.0),
    ]);
    let b0 = build_representation(RepKind::Spin0);
    let j = current_j(&fixture, &b0).map_err(|e| e.to_string())?;
    let expected = -2.0 * w;
    if (j[0] - expected).abs() > 1e-14 {
        return Err(format!("fixture j0 = {}, stored value {expected}", j[0]));
    }

    let mut rng = StdRng::seed_from_u64(9);
    let b1 = build_representation(RepKind::Spin1);
    let mut min_s0 = f64::INFINITY;
    for i in 0..1_000_000 {
        let (b, dim) = if i % 2 == 0 { (&b0, 5) } else { (&b1, 10) };
        let psi = Spinor::from_iterator(
            dim,
            (0..dim).map(|_| c(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0))),
        );
        let s0 = current_s(&psi, b).map_err(|e| e.to_string())?.0;
        min_s0 = min_s0.min(s0);
        if s0 < 0.0 {
            return Err(format!("S0 = {s0} for {psi:?}"));
        }
    }
    Ok(format!(
        "fixture j0 = {:.6} < 0; min S0 over 10^6 random spinors = {min_s0:.3e}",
        j[0]
    ))
}

fn outputs(run: &Path) -> std::result::Result<BTreeMap<String, Vec<u8>>, String> {
    let manifest = read_manifest(run).map_err(|e| e.to_string())?;
    verify_outputs(run, &manifest).map_err(|e| e.to_string())?;
    manifest
        .outputs
        .iter()
        .map(|o| {
            std::fs::read(run.join(&o.path))
                .map(|b| (o.path.clone(), b))
                .map_err(|e| e.to_string())
        })
        .collect()
}

fn determinism() -> Check {
    let runs = tempfile::tempdir().map_err(|e| e.to_string())?;
    let commands: [&[&str]; 7] = [
        &["scatter", "--particle", "spin1", "--eps", "4"],
        &[
            "sweep",
            "--particle",
            "spin1",
            "--param",
            "eps",
            "--from",
            "0.01",
            "--to",
            "100",
            "--steps",
            "100",
        ],
        &[
            "currents",
            "--particle",
            "spin0",
            "--k0",
            "2",
            "--x",
            "0.3",
            "--t",
            "1.1",
        ],
        &["verify-algebra"],
        &["dump-rep", "--rep", "spin1"],
        &[
            "evolve",
            "--particle",
            "spin0",
            "--set",
            "grid.xmin=-40",
            "--set",
            "grid.dx=0.05",
            "--set",
            "grid.n=1601",
            "--set",
            "packet.x0=-20",
            "--set",
            "packet.sigma=3",
            "--set",
            "packet.k=1.5",
            "--set",
            "potential.V0=-1",
            "--set",
            "run.t_final=40",
            "--set",
            "run.snap_every=100",
        ],
        &[
            "evolve",
            "--particle",
            "dkp-free",
            "--rep",
            "spin1",
            "--set",
            "grid.xmin=0",
            "--set",
            "grid.dx=0.1",
            "--set",
            "grid.n=256",
            "--set",
            "grid.dt=0.01",
            "--set",
            "packet.x0=12.8",
            "--set",
            "packet.sigma=2",
            "--set",
            "packet.k=1",
            "--set",
            "run.t_final=2",
            "--set",
            "run.snap_every=50",
        ],
    ];
    let mut files = 0;
    for args in commands {
        let first = outputs(&run_cli(runs.path(), args)?)?;
        let second = outputs(&run_cli(runs.path(), args)?)?;
        if first.is_empty() || first != second {
            return Err(format!("dkp {} produced differing outputs", args.join(" ")));
        }
        files += first.len();
    }
    Ok(format!(
        "7 commands run twice, {files} output files byte-identical"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("algebra identities", algebra_suite),
        ("plane-wave residuals", planewave_suite),
        ("spin-1 massive step", spin1_massive),
        ("spin-0 amplitude ratio", spin0_ratio),
        ("photon Fresnel", photon_fresnel),
        ("Klein-paradox contrast", klein_contrast),
        ("wave-packet reflection", packet_runs),
        ("conservation", conservation),
        ("j0 witness and S0 positivity", j0_fixture),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of 10 criteria pass", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
