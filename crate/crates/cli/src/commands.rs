//! Parameter resolution and dispatch for every subcommand.

use std::path::{Path, PathBuf};

use dkp_core::algebra::{
    build_derived, build_representation, check_hermiticity, format_matrix, identity_checks,
    projector_rank, BetaSet, CMatrix, IdentityCheck, RepKind,
};
use dkp_core::currents::{CurrentKind, CurrentSample};
use dkp_core::evolve::{
    continuity_residual, density_flux, evolve_dkp_free, evolve_photon, evolve_spin0, init_packet,
    measure_rt, FieldKind, Grid1D, IndexProfile, Medium, PacketSpec, PotentialProfile,
    Spin0Options, Trajectory,
};
use dkp_core::planewave::{
    photon_planewave, spin0_planewave, spin1_planewave, Branch, Direction, Kinematics, WaveKind,
};
use dkp_core::scatter::{
    classify_regime, solve, solve_with_current, sweep, Barrier, Particle, Regime, ScatterSolution,
    StepProblem, SweepParam,
};
use num_complex::Complex64;
use serde::Serialize;

use crate::args::{Cli, Command, Common, ProblemArgs};
use crate::config::{get, get_or, require, resolve, KeySet, ParamMap};
use crate::persist::{json_bytes, num, RunDir, RunStatus};
use crate::plot::{emit_plot_data, PlotKind};
use crate::{CliError, Result};

const PROBLEM_KEYS: &[&str] = &[
    "particle", "k0", "mass", "V", "eps", "ratio", "branch", "current",
];
const POTENTIAL_ALIAS: &[(&str, &str)] = &[("potential.V0", "V"), ("V0", "V")];

const SCATTER: KeySet = KeySet {
    keys: PROBLEM_KEYS,
    aliases: POTENTIAL_ALIAS,
};
const SWEEP: KeySet = KeySet {
    keys: &[
        "particle", "k0", "mass", "V", "eps", "ratio", "branch", "param", "from", "to", "steps",
        "out",
    ],
    aliases: POTENTIAL_ALIAS,
};
pub const EVOLVE_CONFIG_KEYS: &[&str] = &[
    "grid.xmin",
    "grid.dx",
    "grid.n",
    "grid.dt",
    "packet.x0",
    "packet.sigma",
    "packet.k",
    "potential.V0",
    "potential.x_step",
    "potential.width",
    "run.t_final",
    "run.snap_every",
];
const EVOLVE: KeySet = KeySet {
    keys: &[
        "grid.xmin",
        "grid.dx",
        "grid.n",
        "grid.dt",
        "packet.x0",
        "packet.sigma",
        "packet.k",
        "potential.V0",
        "potential.x_step",
        "potential.width",
        "run.t_final",
        "run.snap_every",
        "particle",
        "mass",
        "rep",
    ],
    aliases: &[],
};
const CURRENTS: KeySet = KeySet {
    keys: &[
        "particle",
        "k0",
        "mass",
        "V",
        "direction",
        "amp_re",
        "amp_im",
        "x",
        "t",
    ],
    aliases: &[],
};
const DUMP: KeySet = KeySet {
    keys: &["rep", "matrix"],
    aliases: &[],
};
const VERIFY: KeySet = KeySet {
    keys: &["rep"],
    aliases: &[],
};
const PLOT: KeySet = KeySet {
    keys: &["run", "kind", "t", "out"],
    aliases: &[],
};

fn s<T: ToString>(v: Option<T>) -> Option<String> {
    v.map(|x| x.to_string())
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum EvolveParticle {
    Spin0,
    Photon,
    DkpFree(RepKind),
}

#[derive(Debug, Clone)]
struct EvolveJob {
    particle: EvolveParticle,
    x_min: f64,
    dx: f64,
    n: usize,
    dt: f64,
    packet: PacketSpec,
    v0: f64,
    x_step: f64,
    width: f64,
    t_final: f64,
    snap_every: usize,
    mass: f64,
}

#[derive(Debug, Clone)]
enum Job {
    DumpRep {
        rep: RepKind,
        matrix: String,
    },
    Verify {
        reps: Vec<RepKind>,
    },
    Currents {
        particle: Particle,
        psi_spec: WaveSpec,
    },
    Scatter {
        problem: StepProblem,
        current: Option<CurrentKind>,
    },
    Sweep {
        template: StepProblem,
        param: SweepParam,
        from: f64,
        to: f64,
        steps: usize,
        out: Option<PathBuf>,
    },
    Evolve(EvolveJob),
    Plot {
        run: PathBuf,
        kind: PlotKind,
        t: Option<f64>,
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy)]
struct WaveSpec {
    k0: f64,
    mass: f64,
    v: f64,
    direction: Direction,
    amplitude: Complex64,
    x: f64,
    t: f64,
}

/// A resolved, validated request.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub command: &'static str,
    pub echo: ParamMap,
    job: Job,
}

fn problem_flags(p: &ProblemArgs) -> Vec<(&'static str, Option<String>)> {
    vec![
        ("particle", p.particle.clone()),
        ("k0", s(p.k0)),
        ("mass", s(p.mass)),
        ("V", s(p.v)),
        ("eps", s(p.eps)),
        ("ratio", s(p.ratio)),
        ("branch", p.branch.clone()),
    ]
}

fn resolve_common(
    c: &Common,
    flags: Vec<(&str, Option<String>)>,
    keys: &KeySet,
) -> Result<ParamMap> {
    resolve(c.config.as_deref(), &c.set, flags, keys)
}

fn barrier_from(map: &ParamMap, sweep_param: Option<SweepParam>) -> Result<Barrier> {
    let v: Option<f64> = get(map, "V")?;
    let eps: Option<f64> = get(map, "eps")?;
    let ratio: Option<f64> = get(map, "ratio")?;
    match (v, eps, ratio) {
        (Some(v), None, None) => Ok(Barrier::Potential(v)),
        (None, Some(e), None) => Ok(Barrier::Epsilon(e)),
        (None, None, Some(r)) => Ok(Barrier::Ratio(Complex64::from(r))),
        (None, None, None) => match sweep_param {
            Some(SweepParam::V) => Ok(Barrier::Potential(0.0)),
            Some(SweepParam::Eps) => Ok(Barrier::Epsilon(1.0)),
            Some(SweepParam::Ratio) => Ok(Barrier::Ratio(Complex64::from(1.0))),
            _ => Err(usage("give one of V, eps or ratio")),
        },
        _ => Err(usage("give only one of V, eps or ratio")),
    }
}

fn problem_from(map: &mut ParamMap, sweep_param: Option<SweepParam>) -> Result<StepProblem> {
    let particle: Particle = require(map, "particle")?;
    let default_mass = if particle == Particle::Photon {
        0.0
    } else {
        1.0
    };
    let mass = get_or(map, "mass", default_mass)?;
    let k0 = get_or(map, "k0", 2.0)?;
    let barrier = barrier_from(map, sweep_param)?;
    let branch: Branch = match get(map, "branch")? {
        Some(b) => b,
        None => {
            map.insert("branch".into(), "pos".into());
            Branch::Positive
        }
    };
    Ok(StepProblem::new(particle, k0, mass, barrier).with_branch(branch))
}

fn evolve_job(map: &mut ParamMap) -> Result<EvolveJob> {
    let particle = match require::<String>(map, "particle")?.as_str() {
        "spin0" => EvolveParticle::Spin0,
        "photon" => EvolveParticle::Photon,
        "dkp-free" => {
            let rep: RepKind = get_or_with(map, "rep", RepKind::Spin0, "spin0")?;
            EvolveParticle::DkpFree(rep)
        }
        other => {
            return Err(usage(format!(
                "unknown evolve particle '{other}' (expected spin0, photon or dkp-free)"
            )))
        }
    };
    let default_mass = if particle == EvolveParticle::Photon {
        0.0
    } else {
        1.0
    };
    let mass = get_or(map, "mass", default_mass)?;
    let x_min = require(map, "grid.xmin")?;
    let dx: f64 = require(map, "grid.dx")?;
    let n = require(map, "grid.n")?;
    let x0 = require(map, "packet.x0")?;
    let sigma = require(map, "packet.sigma")?;
    let k: f64 = require(map, "packet.k")?;
    let v0: f64 = get_or(map, "potential.V0", 0.0)?;
    let x_step = get_or(map, "potential.x_step", 0.0)?;
    let width = get_or(
        map,
        "potential.width",
        if k != 0.0 { 2.0 / k.abs() } else { 0.0 },
    )?;
    let max_index = if particle == EvolveParticle::Photon {
        (1.0 + v0).max(1.0)
    } else {
        1.0
    };
    let dt = get_or(map, "grid.dt", 0.5 * dx / max_index)?;
    let t_final = require(map, "run.t_final")?;
    let snap_every = get_or(map, "run.snap_every", 0usize)?;
    Ok(EvolveJob {
        particle,
        x_min,
        dx,
        n,
        dt,
        packet: PacketSpec {
            x_center: x0,
            sigma,
            k_center: k,
            norm: 1.0,
        },
        v0,
        x_step,
        width,
        t_final,
        snap_every,
        mass,
    })
}

fn get_or_with<T: std::str::FromStr>(
    map: &mut ParamMap,
    key: &str,
    default: T,
    label: &str,
) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    match get(map, key)? {
        Some(v) => Ok(v),
        None => {
            map.insert(key.into(), label.into());
            Ok(default)
        }
    }
}

fn parse_direction(v: &str) -> Result<Direction> {
    match v {
        "plus" | "+" | "+x" => Ok(Direction::PlusX),
        "minus" | "-" | "-x" => Ok(Direction::MinusX),
        other => Err(usage(format!(
            "unknown direction '{other}' (expected plus or minus)"
        ))),
    }
}

/// Resolves parameters and validates them; usage errors surface here.
pub fn prepare(command: &Command) -> Result<Prepared> {
    let (name, mut map, keys_used) = match command {
        Command::DumpRep(a) => (
            "dump-rep",
            resolve_common(
                &a.common,
                vec![("rep", a.rep.clone()), ("matrix", a.matrix.clone())],
                &DUMP,
            )?,
            (),
        ),
        Command::VerifyAlgebra(a) => (
            "verify-algebra",
            resolve_common(&a.common, vec![("rep", a.rep.clone())], &VERIFY)?,
            (),
        ),
        Command::Currents(a) => (
            "currents",
            resolve_common(
                &a.common,
                vec![
                    ("particle", a.particle.clone()),
                    ("k0", s(a.k0)),
                    ("mass", s(a.mass)),
                    ("V", s(a.v)),
                    ("direction", a.direction.clone()),
                    ("amp_re", s(a.amp_re)),
                    ("amp_im", s(a.amp_im)),
                    ("x", s(a.x)),
                    ("t", s(a.t)),
                ],
                &CURRENTS,
            )?,
            (),
        ),
        Command::Scatter(a) => {
            let mut flags = problem_flags(&a.problem);
            flags.push(("current", a.problem.current.clone()));
            ("scatter", resolve_common(&a.common, flags, &SCATTER)?, ())
        }
        Command::Sweep(a) => {
            if a.problem.current.is_some() {
                return Err(usage(
                    "sweep uses each particle's own current; drop --current",
                ));
            }
            let mut flags = problem_flags(&a.problem);
            flags.extend([
                ("param", a.param.clone()),
                ("from", s(a.from)),
                ("to", s(a.to)),
                ("steps", s(a.steps)),
                ("out", a.out.as_ref().map(|p| p.display().to_string())),
            ]);
            ("sweep", resolve_common(&a.common, flags, &SWEEP)?, ())
        }
        Command::Evolve(a) => (
            "evolve",
            resolve_common(
                &a.common,
                vec![
                    ("particle", a.particle.clone()),
                    ("mass", s(a.mass)),
                    ("rep", a.rep.clone()),
                ],
                &EVOLVE,
            )?,
            (),
        ),
        Command::PlotData(a) => (
            "plot-data",
            resolve_common(
                &a.common,
                vec![
                    ("run", a.run.as_ref().map(|p| p.display().to_string())),
                    ("kind", a.kind.clone()),
                    ("t", s(a.t)),
                    ("out", a.out.as_ref().map(|p| p.display().to_string())),
                ],
                &PLOT,
            )?,
            (),
        ),
    };
    let () = keys_used;

    let job = match command {
        Command::DumpRep(_) => {
            let rep = require(&map, "rep")?;
            let matrix = get_or(&mut map, "matrix", "all".to_string())?;
            Job::DumpRep { rep, matrix }
        }
        Command::VerifyAlgebra(_) => {
            let which = get_or(&mut map, "rep", "both".to_string())?;
            let reps = match which.as_str() {
                "both" => vec![RepKind::Spin0, RepKind::Spin1],
                r => vec![r.parse().map_err(usage)?],
            };
            Job::Verify { reps }
        }
        Command::Currents(_) => {
            let particle: Particle = require(&map, "particle")?;
            if !matches!(
                particle,
                Particle::Spin0Massive | Particle::Spin1Massive | Particle::Photon
            ) {
                return Err(usage("currents takes particle spin0, spin1 or photon"));
            }
            let default_mass = if particle == Particle::Photon {
                0.0
            } else {
                1.0
            };
            let mass = get_or(&mut map, "mass", default_mass)?;
            let k0 = get_or(&mut map, "k0", 2.0)?;
            let v = get_or(&mut map, "V", 0.0)?;
            if v != 0.0 && particle != Particle::Spin0Massive {
                return Err(usage("V applies to spin0 waves only"));
            }
            let direction = parse_direction(&get_or(&mut map, "direction", "plus".to_string())?)?;
            let amplitude = Complex64::new(
                get_or(&mut map, "amp_re", 1.0)?,
                get_or(&mut map, "amp_im", 0.0)?,
            );
            let x = get_or(&mut map, "x", 0.0)?;
            let t = get_or(&mut map, "t", 0.0)?;
            Job::Currents {
                particle,
                psi_spec: WaveSpec {
                    k0,
                    mass,
                    v,
                    direction,
                    amplitude,
                    x,
                    t,
                },
            }
        }
        Command::Scatter(_) => {
            let problem = problem_from(&mut map, None)?;
            let current = get(&map, "current")?;
            Job::Scatter { problem, current }
        }
        Command::Sweep(_) => {
            let param: SweepParam = require(&map, "param")?;
            let template = problem_from(&mut map, Some(param))?;
            let from = require(&map, "from")?;
            let to = require(&map, "to")?;
            let steps: usize = require(&map, "steps")?;
            if steps < 2 {
                return Err(usage(format!("steps must be >= 2, got {steps}")));
            }
            let out = get::<String>(&map, "out")?.map(PathBuf::from);
            Job::Sweep {
                template,
                param,
                from,
                to,
                steps,
                out,
            }
        }
        Command::Evolve(_) => Job::Evolve(evolve_job(&mut map)?),
        Command::PlotData(_) => {
            let run = PathBuf::from(require::<String>(&map, "run")?);
            let kind = require(&map, "kind")?;
            let t = get(&map, "t")?;
            let out = get::<String>(&map, "out")?.map(PathBuf::from);
            Job::Plot { run, kind, t, out }
        }
    };
    Ok(Prepared {
        command: name,
        echo: map,
        job,
    })
}

/// Runs the CLI and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let prepared = match prepare(&cli.command) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let mut dir = match RunDir::create(&cli.runs_dir, prepared.command, &prepared.echo) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let outcome = execute(&prepared.job, &mut dir);
    let (status, code) = match &outcome {
        Ok(stdout) => {
            print!("{stdout}");
            (RunStatus::Ok, 0)
        }
        Err(e) => {
            eprintln!("error: {e}");
            (
                RunStatus::Error {
                    code: e.exit_code(),
                    message: e.to_string(),
                },
                e.exit_code(),
            )
        }
    };
    let path = dir.path.clone();
    match dir.finish(prepared.echo, status) {
        Ok(_) => {
            eprintln!("run directory: {}", path.display());
            code
        }
        Err(e) => {
            eprintln!("error: could not write manifest: {e}");
            1
        }
    }
}

fn execute(job: &Job, dir: &mut RunDir) -> Result<String> {
    match job {
        Job::DumpRep { rep, matrix } => dump_rep(*rep, matrix, dir),
        Job::Verify { reps } => verify(reps, dir),
        Job::Currents { particle, psi_spec } => currents(*particle, psi_spec, dir),
        Job::Scatter { problem, current } => scatter(problem, *current, dir),
        Job::Sweep {
            template,
            param,
            from,
            to,
            steps,
            out,
        } => run_sweep(template, *param, *from, *to, *steps, out.as_deref(), dir),
        Job::Evolve(job) => evolve(job, dir),
        Job::Plot { run, kind, t, out } => {
            let bytes = emit_plot_data(run, *kind, *t)?;
            dir.write(&format!("plot_{}.csv", kind.name()), &bytes)?;
            if let Some(out) = out {
                dir.write_external(out, &bytes)?;
            }
            Ok(String::from_utf8_lossy(&bytes).into_owned())
        }
    }
}

/// Named matrices of a representation; β with lower index.
pub fn named_matrices(rep: RepKind) -> Result<Vec<(String, CMatrix)>> {
    let b = build_representation(rep);
    let d = build_derived(&b)?;
    let mut out: Vec<_> = (0..4)
        .map(|mu| (format!("beta{mu}"), b.lower(mu).clone()))
        .collect();
    out.push(("eta0".into(), d.eta0.clone()));
    for (i, m) in d.beta_tilde.iter().enumerate() {
        out.push((format!("beta_tilde{}", i + 1), m.clone()));
    }
    if let Some(g) = d.gamma {
        out.push(("gamma".into(), g));
    }
    Ok(out)
}

fn dump_rep(rep: RepKind, matrix: &str, dir: &mut RunDir) -> Result<String> {
    let all = named_matrices(rep)?;
    let text = if matrix == "all" {
        all.iter()
            .map(|(name, m)| format!("# {rep} {name}\n{}", format_matrix(m)))
            .collect::<Vec<_>>()
            .join("\n")
    } else {
        let (_, m) = all.iter().find(|(n, _)| n == matrix).ok_or_else(|| {
            CliError::Failed(format!(
                "no matrix '{matrix}' for {rep} (available: all, {})",
                all.iter()
                    .map(|(n, _)| n.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            ))
        })?;
        format_matrix(m)
    };
    let name = if matrix == "all" {
        format!("{rep}.txt")
    } else {
        format!("{rep}_{matrix}.txt")
    };
    dir.write(&name, text.as_bytes())?;
    Ok(text)
}

#[derive(Serialize)]
struct VerifyEntry {
    #[serde(flatten)]
    check: IdentityCheck,
    passes: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    identities: Vec<VerifyEntry>,
    gamma_rank: Option<usize>,
    all_pass: bool,
}

fn verify(reps: &[RepKind], dir: &mut RunDir) -> Result<String> {
    let mut identities = Vec::new();
    let mut gamma_rank = None;
    let mut text = String::new();
    for &rep in reps {
        let b = build_representation(rep);
        let herm = check_hermiticity(&b);
        for check in identity_checks(&b) {
            let passes = check.passes();
            text.push_str(&format!(
                "{rep}\t{}\t{:.3e}\t{}\n",
                check.identity,
                check.residual,
                if passes { "ok" } else { "FAIL" }
            ));
            identities.push(VerifyEntry { check, passes });
        }
        if !herm.all_ok() {
            text.push_str(&format!("{rep}\tflagged beta: {:?}\n", herm.flagged()));
        }
        if let Some(g) = build_derived(&b).ok().and_then(|d| d.gamma) {
            let r = projector_rank(&g);
            text.push_str(&format!("{rep}\tgamma rank\t{r}\n"));
            gamma_rank = Some(r);
        }
    }
    let all_pass = identities.iter().all(|e| e.passes);
    let report = VerifyReport {
        identities,
        gamma_rank,
        all_pass,
    };
    dir.write("verify_algebra.json", &json_bytes(&report)?)?;
    if !all_pass {
        return Err(CliError::Failed(format!(
            "algebra identities fail:\n{text}"
        )));
    }
    Ok(text)
}

fn currents(particle: Particle, w: &WaveSpec, dir: &mut RunDir) -> Result<String> {
    let kind = match w.direction {
        Direction::PlusX => WaveKind::Incident,
        Direction::MinusX => WaveKind::Reflected,
    };
    let (rep, wave) = match particle {
        Particle::Spin0Massive => {
            let kin = Kinematics::from_dispersion(w.mass, w.k0, w.v, Branch::Positive);
            (
                RepKind::Spin0,
                spin0_planewave(w.amplitude, &kin, w.direction)?,
            )
        }
        Particle::Spin1Massive => {
            let kin = Kinematics::from_dispersion(w.mass, w.k0, 0.0, Branch::Positive);
            (
                RepKind::Spin1,
                spin1_planewave(w.amplitude, 1.0, &kin, 1.0, kind)?,
            )
        }
        _ => {
            let mut p = photon_planewave(1.0, w.k0, w.k0, 0.0, kind, 1.0)?;
            p.amplitude *= w.amplitude;
            (RepKind::Spin1, p)
        }
    };
    let b = build_representation(rep);
    let sample = CurrentSample::of(&wave.at(w.x, w.t), &b, Some((w.x, w.t)))?;
    let bytes = json_bytes(&sample)?;
    dir.write("currents.json", &bytes)?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

#[derive(Serialize)]
struct ScatterSummary<'a> {
    problem: &'a StepProblem,
    #[serde(flatten)]
    solution: &'a ScatterSolution,
}

fn scatter(
    problem: &StepProblem,
    current: Option<CurrentKind>,
    dir: &mut RunDir,
) -> Result<String> {
    let solution = match current {
        Some(c) => solve_with_current(problem, c)?,
        None => solve(problem)?,
    };
    let bytes = json_bytes(&ScatterSummary {
        problem,
        solution: &solution,
    })?;
    dir.write("summary.json", &bytes)?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

pub const SWEEP_HEADER: [&str; 6] = ["param", "BoverA_re", "BoverA_im", "R", "T", "regime"];

fn run_sweep(
    template: &StepProblem,
    param: SweepParam,
    from: f64,
    to: f64,
    steps: usize,
    out: Option<&Path>,
    dir: &mut RunDir,
) -> Result<String> {
    let rows = sweep(template, param, from, to, steps)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_HEADER)?;
    let mut failed = 0;
    for row in &rows {
        match &row.result {
            Ok(s) => w.write_record([
                num(row.param),
                num(s.b_over_a.re),
                num(s.b_over_a.im),
                num(s.r),
                num(s.t),
                s.regime.to_string(),
            ])?,
            Err(e) => {
                failed += 1;
                w.write_record([
                    num(row.param),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    format!("error: {e}"),
                ])?
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Data(e.to_string()))?;
    dir.write("sweep.csv", &bytes)?;
    if let Some(out) = out {
        dir.write_external(out, &bytes)?;
    }
    Ok(format!(
        "{} rows over {} in [{from}, {to}], {failed} with errors\n",
        rows.len(),
        param.name()
    ))
}

#[derive(Serialize)]
struct EvolveSummary {
    particle: String,
    scheme: &'static str,
    steps: usize,
    t_final: f64,
    #[serde(rename = "R_num")]
    r_num: Option<f64>,
    #[serde(rename = "T_num")]
    t_num: Option<f64>,
    norm_drift: f64,
    continuity_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    regime: Option<Regime>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'static str>,
}

fn evolve(job: &EvolveJob, dir: &mut RunDir) -> Result<String> {
    let grid = Grid1D::new(job.x_min, job.dx, job.n, job.dt)?;
    let (traj, b, scheme, condition, regime) = match job.particle {
        EvolveParticle::Spin0 => {
            let pot = PotentialProfile::new(job.v0, job.x_step, job.width)?;
            let st = init_packet(
                &grid,
                &job.packet,
                FieldKind::Spin0Kg,
                &Medium::Potential(pot),
                job.mass,
            )?;
            let opts = Spin0Options {
                snap_every: job.snap_every,
                require_separation: pot.v0 != 0.0,
                ..Spin0Options::default()
            };
            let k0 = (job.packet.k_center.powi(2) + job.mass * job.mass).sqrt();
            let traj = evolve_spin0(&st, &grid, &pot, job.t_final, &opts)?;
            (
                traj,
                build_representation(RepKind::Spin0),
                "scalar leapfrog, minimal coupling",
                "dt^2 (4/dx^2 + m^2) / 4 <= 1",
                Some(classify_regime(k0, job.mass, job.v0)),
            )
        }
        EvolveParticle::Photon => {
            let index = IndexProfile::new(1.0 + job.v0, job.x_step, job.width)?;
            let st = init_packet(
                &grid,
                &job.packet,
                FieldKind::PhotonFdtd,
                &Medium::Index(index),
                0.0,
            )?;
            let traj = evolve_photon(&st, &grid, &index, job.t_final, 0.0, job.snap_every)?;
            (
                traj,
                build_representation(RepKind::Spin1),
                "Yee staggered leapfrog",
                "dt/dx <= 1/max(n)",
                None,
            )
        }
        EvolveParticle::DkpFree(rep) => {
            let b = build_representation(rep);
            let st = init_packet(
                &grid,
                &job.packet,
                FieldKind::DkpFree(rep),
                &Medium::Periodic,
                job.mass,
            )?;
            let traj = evolve_dkp_free(&st, &grid, &b, job.mass, job.t_final, job.snap_every)?;
            (
                traj,
                b,
                "periodic spectral implicit midpoint",
                "dt (1/dx + m) <= 2",
                None,
            )
        }
    };
    dir.details.insert("scheme".into(), scheme.into());
    dir.details
        .insert("courant_number".into(), grid.courant().into());
    dir.details
        .insert("stability_condition".into(), condition.into());

    let (r_num, t_num) = match traj.medium {
        Medium::Periodic => (None, None),
        m if m.has_step() => {
            let (r, t) = measure_rt(&traj, job.x_step)?;
            (Some(r), Some(t))
        }
        _ => match measure_rt(&traj, job.x_step) {
            Ok((r, t)) => (Some(r), Some(t)),
            Err(_) => (None, None),
        },
    };
    let last = traj
        .history
        .last()
        .expect("trajectory keeps its final state");
    let norm_drift = (last.left + last.right) / traj.reference_norm - 1.0;
    let klein = regime == Some(Regime::KleinZone);
    let summary = EvolveSummary {
        particle: match job.particle {
            EvolveParticle::Spin0 => "spin0".into(),
            EvolveParticle::Photon => "photon".into(),
            EvolveParticle::DkpFree(rep) => format!("dkp-free/{rep}"),
        },
        scheme,
        steps: grid.steps_to(job.t_final),
        t_final: traj.final_state().t,
        r_num,
        t_num,
        norm_drift,
        continuity_residual: continuity_residual(&traj, &b),
        regime,
        note: klein.then_some("step exceeds k0 + m: exploratory run, the below-pair-threshold reading of R does not apply"),
    };

    dir.write("snapshots.csv", &snapshots_csv(&traj, &b)?)?;
    dir.write("flux.csv", &flux_csv(&traj)?)?;
    let bytes = json_bytes(&summary)?;
    dir.write("summary.json", &bytes)?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

fn snapshots_csv(traj: &Trajectory, b: &BetaSet) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let labels = traj.kind().component_labels();
    let mut header = vec!["t".to_string(), "x".to_string()];
    for l in &labels {
        header.push(format!("{l}_re"));
        header.push(format!("{l}_im"));
    }
    header.push("S0".into());
    header.push("Sx".into());
    w.write_record(&header)?;
    for snap in &traj.snapshots {
        let df = density_flux(snap, &traj.grid, &traj.medium, b);
        for j in 0..traj.grid.n_points {
            let mut rec = Vec::with_capacity(header.len());
            rec.push(num(snap.t));
            rec.push(num(traj.grid.x(j)));
            for c in &snap.components {
                rec.push(num(c[j].re));
                rec.push(num(c[j].im));
            }
            rec.push(num(df.rho[j]));
            rec.push(num(df.flux[j]));
            w.write_record(&rec)?;
        }
    }
    w.into_inner().map_err(|e| CliError::Data(e.to_string()))
}

fn flux_csv(traj: &Trajectory) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "S0_left", "S0_right"])?;
    for h in &traj.history {
        w.write_record([num(h.t), num(h.left), num(h.right)])?;
    }
    w.into_inner().map_err(|e| CliError::Data(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn prep(argv: &[&str]) -> Result<Prepared> {
        let cli = Cli::try_parse_from(argv).expect("argv parses");
        prepare(&cli.command)
    }

    #[test]
    fn spin1_eps_resolves_with_defaults() {
        let p = prep(&["dkp", "scatter", "--particle", "spin1", "--eps", "4"]).unwrap();
        assert_eq!(p.echo["particle"], "spin1");
        assert_eq!(p.echo["eps"], "4");
        assert_eq!(p.echo["mass"], "1");
        match p.job {
            Job::Scatter { problem, .. } => {
                assert_eq!(problem.particle, Particle::Spin1Massive);
                assert_eq!(problem.barrier, Barrier::Epsilon(4.0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn flag_overrides_config_potential() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.txt");
        std::fs::write(&cfg, "particle = spin0\npotential.V0 = 1\n").unwrap();
        let p = prep(&[
            "dkp",
            "scatter",
            "--config",
            cfg.to_str().unwrap(),
            "--V",
            "2",
        ])
        .unwrap();
        assert_eq!(p.echo["V"], "2");
    }

    #[test]
    fn misspelt_key_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.txt");
        std::fs::write(&cfg, "potental.V0 = 1\n").unwrap();
        let err = prep(&[
            "dkp",
            "evolve",
            "--particle",
            "spin0",
            "--config",
            cfg.to_str().unwrap(),
        ])
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("potental.V0"));
    }

    #[test]
    fn two_barriers_rejected() {
        let err = prep(&[
            "dkp",
            "scatter",
            "--particle",
            "spin0",
            "--V",
            "1",
            "--ratio",
            "2",
        ])
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn evolve_defaults_are_echoed() {
        let p = prep(&[
            "dkp",
            "evolve",
            "--particle",
            "photon",
            "--set",
            "grid.xmin=-10",
            "--set",
            "grid.dx=0.1",
            "--set",
            "grid.n=200",
            "--set",
            "packet.x0=-5",
            "--set",
            "packet.sigma=1",
            "--set",
            "packet.k=4",
            "--set",
            "potential.V0=0.5",
            "--set",
            "run.t_final=1",
        ])
        .unwrap();
        assert_eq!(p.echo["potential.width"], "0.5");
        assert_eq!(p.echo["mass"], "0");
        let dt: f64 = p.echo["grid.dt"].parse().unwrap();
        assert!((dt - 0.5 * 0.1 / 1.5).abs() < 1e-15);
    }

    #[test]
    fn every_evolve_config_key_is_accepted() {
        let text: String = EVOLVE_CONFIG_KEYS
            .iter()
            .map(|k| format!("{k} = 1\n"))
            .collect();
        assert!(crate::config::parse_config_text(&text, &EVOLVE).is_ok());
    }

    #[test]
    fn named_matrices_cover_both_reps() {
        assert_eq!(named_matrices(RepKind::Spin0).unwrap().len(), 8);
        assert_eq!(named_matrices(RepKind::Spin1).unwrap().len(), 9);
    }
}
