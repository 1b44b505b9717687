//! Closed-form reflection from a step at x = 0.
//!
//! The incident wave travels in +x through a field-free region. The far side
//! is described by the ratio `r = k'/k` of wavenumbers at unchanged
//! frequency, obtained either directly, from a dielectric constant
//! (`r = √ε`) or from a scalar potential through minimal coupling
//! (`k' = ±sqrt((k0 - V)^2 - m^2)`).
//!
//! Boson solvers build the three plane-wave spinors, check that they match
//! component by component at the step, and take R and T as flux ratios of
//! those spinors. The Dirac and Klein-Gordon solvers exist for contrast:
//! with the appropriate region-2 branch they reflect more than they receive.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{build_representation, RepKind};
use crate::currents::{flux_x, CurrentKind};
use crate::error::{Error, Result};
use crate::planewave::{
    dispersion, photon_planewave, spin0_planewave, spin1_from_region, Branch, Direction,
    Kinematics, PlaneWaveSolution, WaveKind,
};

/// Bound on |Ψ_inc + Ψ_ref − Ψ_trans| at the step, relative to the incident spinor.
pub const MATCHING_TOL: f64 = 1e-12;

const DEGENERATE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Particle {
    #[serde(rename = "spin0")]
    Spin0Massive,
    #[serde(rename = "spin1")]
    Spin1Massive,
    #[serde(rename = "photon")]
    Photon,
    #[serde(rename = "dirac")]
    DiracContrast,
    #[serde(rename = "kg")]
    KGContrast,
}

impl Particle {
    pub fn name(self) -> &'static str {
        match self {
            Particle::Spin0Massive => "spin0",
            Particle::Spin1Massive => "spin1",
            Particle::Photon => "photon",
            Particle::DiracContrast => "dirac",
            Particle::KGContrast => "kg",
        }
    }

    pub fn is_boson_kdp(self) -> bool {
        matches!(
            self,
            Particle::Spin0Massive | Particle::Spin1Massive | Particle::Photon
        )
    }
}

impl std::fmt::Display for Particle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Particle {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "spin0" => Ok(Particle::Spin0Massive),
            "spin1" => Ok(Particle::Spin1Massive),
            "photon" => Ok(Particle::Photon),
            "dirac" => Ok(Particle::DiracContrast),
            "kg" => Ok(Particle::KGContrast),
            other => Err(format!(
                "unknown particle '{other}' (expected spin0, spin1, photon, dirac or kg)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Barrier {
    Potential(f64),
    Epsilon(f64),
    Ratio(Complex64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepProblem {
    pub particle: Particle,
    pub k0: f64,
    pub mass: f64,
    pub barrier: Barrier,
    /// Sign of a real region-2 wavenumber; only the contrast solvers use it.
    pub branch: Branch,
}

impl StepProblem {
    pub fn new(particle: Particle, k0: f64, mass: f64, barrier: Barrier) -> Self {
        StepProblem {
            particle,
            k0,
            mass,
            barrier,
            branch: Branch::Positive,
        }
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    fn check_incident(&self) -> Result<f64> {
        if !(self.mass >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "mass",
                reason: format!("must be >= 0, got {}", self.mass),
            });
        }
        if !(self.k0 > self.mass) {
            return Err(Error::OffShell {
                k0: self.k0,
                mass: self.mass,
            });
        }
        Ok((self.k0 * self.k0 - self.mass * self.mass).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Transmitting,
    Evanescent,
    KleinZone,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Transmitting => "transmitting",
            Regime::Evanescent => "evanescent",
            Regime::KleinZone => "klein_zone",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatterSolution {
    pub b_over_a: Complex64,
    pub c_over_a: Complex64,
    #[serde(rename = "R")]
    pub r: f64,
    /// Transmitted over incident flux, signed.
    #[serde(rename = "T")]
    pub t: f64,
    pub regime: Regime,
    pub current_used: CurrentKind,
    /// Reflection under the S-current when `current_used` is something else.
    #[serde(rename = "R_S", skip_serializing_if = "Option::is_none")]
    pub r_s: Option<f64>,
    pub k: f64,
    pub k_prime: Complex64,
    pub matching_residual: f64,
}

/// Incident, reflected and transmitted spinors of a boson step problem.
#[derive(Debug, Clone, PartialEq)]
pub struct StepWaves {
    pub incident: PlaneWaveSolution,
    pub reflected: PlaneWaveSolution,
    pub transmitted: PlaneWaveSolution,
}

impl StepWaves {
    /// max component of |Ψ_inc + Ψ_ref − Ψ_trans| at x = 0, t = 0, over max |Ψ_inc|.
    pub fn matching_residual(&self) -> f64 {
        let d = &self.incident.amplitude + &self.reflected.amplitude - &self.transmitted.amplitude;
        let amax = |v: &crate::planewave::Spinor| v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        amax(&d) / amax(&self.incident.amplitude).max(f64::MIN_POSITIVE)
    }
}

/// Regime of a scalar-potential step.
///
/// Ties on the threshold `(k0 - V)^2 = m^2` count as evanescent.
pub fn classify_regime(k0: f64, mass: f64, potential: f64) -> Regime {
    let kinetic = k0 - potential;
    if kinetic * kinetic > mass * mass {
        if k0 > potential {
            Regime::Transmitting
        } else {
            Regime::KleinZone
        }
    } else {
        Regime::Evanescent
    }
}

fn regime_of(p: &StepProblem, ratio: Complex64) -> Regime {
    match p.barrier {
        Barrier::Potential(v) => classify_regime(p.k0, p.mass, v),
        _ if ratio.re == 0.0 && ratio.im != 0.0 => Regime::Evanescent,
        _ => Regime::Transmitting,
    }
}

/// The problem's regime.
pub fn classify_problem(p: &StepProblem) -> Regime {
    match p.barrier {
        Barrier::Potential(v) => classify_regime(p.k0, p.mass, v),
        Barrier::Epsilon(e) if e < 0.0 => Regime::Evanescent,
        Barrier::Epsilon(_) => Regime::Transmitting,
        Barrier::Ratio(r) => regime_of(p, r),
    }
}

/// `ε = (k'/k)^2` with `k'` from minimal coupling; negative below threshold.
pub fn epsilon_from_potential(k0: f64, mass: f64, potential: f64) -> f64 {
    let kinetic = k0 - potential;
    (kinetic * kinetic - mass * mass) / (k0 * k0 - mass * mass)
}

fn sqrt_signed(x: f64) -> Complex64 {
    if x >= 0.0 {
        Complex64::new(x.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-x).sqrt())
    }
}

/// Region ratio for the frequency-matched boson solvers.
fn boson_ratio(p: &StepProblem, k: f64) -> Result<Complex64> {
    match p.barrier {
        Barrier::Ratio(r) => Ok(r),
        Barrier::Epsilon(e) if e < 0.0 => Err(Error::InvalidParameter {
            name: "eps",
            reason: format!("must be >= 0, got {e}"),
        }),
        Barrier::Epsilon(e) => Ok(Complex64::from(e.sqrt())),
        Barrier::Potential(v) => Ok(dispersion(p.mass, p.k0, v, Branch::Positive) / k),
    }
}

fn amplitudes(r: Complex64) -> Result<(Complex64, Complex64)> {
    let one = Complex64::new(1.0, 0.0);
    let den = one + r;
    if den.norm() < DEGENERATE_TOL {
        return Err(Error::DegenerateBarrier(format!("1 + k'/k = {den}")));
    }
    Ok(((one - r) / den, Complex64::from(2.0) / den))
}

fn fluxes(waves: &StepWaves, rep: RepKind, which: CurrentKind) -> Result<(f64, f64)> {
    let b = build_representation(rep);
    let inc = flux_x(&waves.incident, &b, which)?;
    if inc.abs() < crate::currents::MIN_FLUX {
        return Err(Error::ZeroIncidentFlux { flux: inc });
    }
    let refl = flux_x(&waves.reflected, &b, which)?;
    let trans = flux_x(&waves.transmitted, &b, which)?;
    Ok((refl.abs() / inc.abs(), trans / inc))
}

fn check_matching(residual: f64) -> Result<()> {
    if residual > MATCHING_TOL {
        return Err(Error::ConstraintViolated {
            residual,
            tolerance: MATCHING_TOL,
        });
    }
    Ok(())
}

fn spin0_waves(p: &StepProblem) -> Result<(StepWaves, Complex64, Complex64, f64, Complex64)> {
    let k = p.check_incident()?;
    let r = boson_ratio(p, k)?;
    let (b, c) = amplitudes(r)?;
    let kin = Kinematics::from_dispersion(p.mass, p.k0, 0.0, Branch::Positive);
    let far = Kinematics::frequency_matched(p.mass, p.k0, r * k);
    let one = Complex64::new(1.0, 0.0);
    let waves = StepWaves {
        incident: spin0_planewave(one, &kin, Direction::PlusX)?,
        reflected: spin0_planewave(b, &kin, Direction::MinusX)?,
        transmitted: spin0_planewave(c, &far, Direction::PlusX)?,
    };
    Ok((waves, b, c, k, r))
}

/// Spin-0 step: `A + B = C`, `A − B = (k'/k) C`, and the frequency slot
/// `k0 (A + B) = k0' C`, consistent because the frequency is unchanged.
pub fn solve_spin0(p: &StepProblem) -> Result<ScatterSolution> {
    solve_spin0_with(p, CurrentKind::SCurrent)
}

fn solve_spin0_with(p: &StepProblem, which: CurrentKind) -> Result<ScatterSolution> {
    expect_particle(p, Particle::Spin0Massive)?;
    if which == CurrentKind::Poynting {
        return Err(unsupported_current(p, which));
    }
    let (waves, b, c, k, r) = spin0_waves(p)?;
    let residual = waves.matching_residual();
    check_matching(residual)?;
    let (refl, trans) = fluxes(&waves, RepKind::Spin0, which)?;
    Ok(ScatterSolution {
        b_over_a: b,
        c_over_a: c,
        r: refl,
        t: trans,
        regime: regime_of(p, r),
        current_used: which,
        r_s: None,
        k,
        k_prime: r * k,
        matching_residual: residual,
    })
}

/// Constructed spinors of a boson problem, for independent flux checks.
pub fn step_waves(p: &StepProblem) -> Result<StepWaves> {
    match p.particle {
        Particle::Spin0Massive => Ok(spin0_waves(p)?.0),
        Particle::Spin1Massive => Ok(spin1_waves(p)?.0),
        Particle::Photon => Ok(photon_waves(p)?.0),
        other => Err(Error::InvalidBarrier {
            particle: other.name(),
            reason: "contrast solvers have no KDP spinors".into(),
        }),
    }
}

fn spin1_waves(p: &StepProblem) -> Result<(StepWaves, Complex64, Complex64, f64, Complex64)> {
    let k = p.check_incident()?;
    if p.mass == 0.0 {
        return Err(Error::InvalidParameter {
            name: "mass",
            reason: "massive spin-1 step needs mass > 0; use the photon solver".into(),
        });
    }
    let n = match p.barrier {
        Barrier::Potential(v) => sqrt_signed(epsilon_from_potential(p.k0, p.mass, v)),
        _ => boson_ratio(p, k)?,
    };
    let (b, c) = amplitudes(n)?;
    let kin = Kinematics::from_dispersion(p.mass, p.k0, 0.0, Branch::Positive);
    let far = Kinematics::frequency_matched(p.mass, p.k0, n * k);
    let one = Complex64::new(1.0, 0.0);
    let waves = StepWaves {
        incident: spin1_from_region(one, 1.0, &kin, Direction::PlusX)?,
        reflected: spin1_from_region(b, 1.0, &kin, Direction::MinusX)?,
        transmitted: spin1_from_region(c, 1.0, &far, Direction::PlusX)?,
    };
    Ok((waves, b, c, k, n))
}

/// Massive spin-1 step: `A + B = C`, `A − B = √ε C`.
pub fn solve_spin1_massive(p: &StepProblem) -> Result<ScatterSolution> {
    solve_spin1_with(p, CurrentKind::SCurrent)
}

fn solve_spin1_with(p: &StepProblem, which: CurrentKind) -> Result<ScatterSolution> {
    expect_particle(p, Particle::Spin1Massive)?;
    let (waves, b, c, k, n) = spin1_waves(p)?;
    let residual = waves.matching_residual();
    check_matching(residual)?;
    let (refl, trans) = fluxes(&waves, RepKind::Spin1, which)?;
    Ok(ScatterSolution {
        b_over_a: b,
        c_over_a: c,
        r: refl,
        t: trans,
        regime: regime_of(p, n),
        current_used: which,
        r_s: None,
        k,
        k_prime: n * k,
        matching_residual: residual,
    })
}

fn photon_index(p: &StepProblem) -> Result<f64> {
    let n = match p.barrier {
        Barrier::Potential(_) => {
            return Err(Error::InvalidBarrier {
                particle: "photon",
                reason: "a scalar potential does not couple to a neutral photon; use eps or ratio"
                    .into(),
            })
        }
        Barrier::Epsilon(e) => e.sqrt(),
        Barrier::Ratio(r) if r.im != 0.0 => {
            return Err(Error::InvalidBarrier {
                particle: "photon",
                reason: format!("index ratio must be real, got {r}"),
            })
        }
        Barrier::Ratio(r) => r.re,
    };
    if !(n > 0.0) {
        return Err(Error::InvalidIndex(n));
    }
    Ok(n)
}

fn photon_waves(p: &StepProblem) -> Result<(StepWaves, f64, f64)> {
    if p.mass != 0.0 {
        return Err(Error::InvalidParameter {
            name: "mass",
            reason: format!("photon mass must be 0, got {}", p.mass),
        });
    }
    if !(p.k0 > 0.0) {
        return Err(Error::OffShell {
            k0: p.k0,
            mass: 0.0,
        });
    }
    let n = photon_index(p)?;
    // E_i − E_r = E_t with E_r measured against the reflected wave's own sign
    let b = (n - 1.0) / (n + 1.0);
    let c = 2.0 / (n + 1.0);
    let (w, k) = (p.k0, p.k0);
    let waves = StepWaves {
        incident: photon_planewave(1.0, w, k, 0.0, WaveKind::Incident, 1.0)?,
        reflected: photon_planewave(1.0, w, k, 0.0, WaveKind::Reflected, -b)?,
        transmitted: photon_planewave(1.0, w, n * k, 0.0, WaveKind::Transmitted, c)?,
    };
    Ok((waves, b, n))
}

/// Photon step with index ratio `n = k'/k`: `R = ((n − 1)/(n + 1))^2`.
pub fn solve_photon(p: &StepProblem) -> Result<ScatterSolution> {
    expect_particle(p, Particle::Photon)?;
    let (waves, b, n) = photon_waves(p)?;
    let residual = waves.matching_residual();
    check_matching(residual)?;
    let (refl, trans) = fluxes(&waves, RepKind::Spin1, CurrentKind::Poynting)?;
    Ok(ScatterSolution {
        b_over_a: Complex64::from(b),
        c_over_a: Complex64::from(2.0 / (n + 1.0)),
        r: refl,
        t: trans,
        regime: Regime::Transmitting,
        current_used: CurrentKind::Poynting,
        r_s: None,
        k: p.k0,
        k_prime: Complex64::from(n * p.k0),
        matching_residual: residual,
    })
}

fn contrast_potential(p: &StepProblem) -> Result<f64> {
    match p.barrier {
        Barrier::Potential(v) => Ok(v),
        _ => Err(Error::InvalidBarrier {
            particle: p.particle.name(),
            reason: "contrast solvers take a scalar potential V".into(),
        }),
    }
}

/// One-dimensional Dirac step with `α = σ_x`, `β = σ_z`.
///
/// Region spinors are `(1, p/(E + m))` with `E = k0 − V`; matching both
/// components gives `A + B = C`, `A − B = κ C` with
/// `κ = k'(k0 + m) / (k (k0 − V + m))`. The current is `ψ†σ_xψ`.
pub fn solve_dirac_contrast(p: &StepProblem) -> Result<ScatterSolution> {
    expect_particle(p, Particle::DiracContrast)?;
    if !(p.mass > 0.0) {
        return Err(Error::InvalidParameter {
            name: "mass",
            reason: "Dirac contrast needs mass > 0".into(),
        });
    }
    let k = p.check_incident()?;
    let v = contrast_potential(p)?;
    let kp = dispersion(p.mass, p.k0, v, p.branch);
    let lower = p.k0 - v + p.mass;
    if lower.abs() < DEGENERATE_TOL {
        return Err(Error::DegenerateBarrier("k0 − V + m = 0".into()));
    }
    let kappa = kp * (p.k0 + p.mass) / (k * lower);
    let (b, c) = amplitudes(kappa)?;

    let one = Complex64::new(1.0, 0.0);
    let lower_inc = k / (p.k0 + p.mass);
    let inc = [one, Complex64::from(lower_inc)];
    let refl = [b, b * -lower_inc];
    let trans = [c, c * kp / lower];
    let residual = (0..2)
        .map(|i| (inc[i] + refl[i] - trans[i]).norm())
        .fold(0.0, f64::max)
        / lower_inc.max(1.0);
    check_matching(residual)?;

    let flux = |s: [Complex64; 2]| 2.0 * (s[0].conj() * s[1]).re;
    let fi = flux(inc);
    Ok(ScatterSolution {
        b_over_a: b,
        c_over_a: c,
        r: flux(refl).abs() / fi,
        t: flux(trans) / fi,
        regime: classify_regime(p.k0, p.mass, v),
        current_used: CurrentKind::JCurrent,
        r_s: None,
        k,
        k_prime: kp,
        matching_residual: residual,
    })
}

/// Klein-Gordon step under minimal coupling, `φ` and `φ'` continuous:
/// `B/A = (k − k')/(k + k')`, `C/A = 2k/(k + k')`.
///
/// R and T use the charge current `Im(φ*∂ₓφ)`; `r_s` is the reflection
/// under the S-current of the equivalent five-component state.
pub fn solve_kg_contrast(p: &StepProblem) -> Result<ScatterSolution> {
    expect_particle(p, Particle::KGContrast)?;
    let k = p.check_incident()?;
    let v = contrast_potential(p)?;
    let kp = dispersion(p.mass, p.k0, v, p.branch);
    let den = kp + k;
    if den.norm() < DEGENERATE_TOL {
        return Err(Error::DegenerateBarrier("k + k' = 0".into()));
    }
    let b = (Complex64::from(k) - kp) / den;
    let c = Complex64::from(2.0 * k) / den;
    let i = Complex64::i();
    let residual = ((1.0 + b - c).norm()).max((i * k * (1.0 - b) - i * kp * c).norm() / k.max(1.0));
    check_matching(residual)?;

    let r_j = b.norm_sqr();
    let t_j = kp.re / k * c.norm_sqr();

    // S-current ratio on the region-1 five-component spinors
    let kin = Kinematics::from_dispersion(p.mass, p.k0, 0.0, Branch::Positive);
    let rep = build_representation(RepKind::Spin0);
    let one = Complex64::new(1.0, 0.0);
    let si = flux_x(
        &spin0_planewave(one, &kin, Direction::PlusX)?,
        &rep,
        CurrentKind::SCurrent,
    )?;
    let sr = flux_x(
        &spin0_planewave(b, &kin, Direction::MinusX)?,
        &rep,
        CurrentKind::SCurrent,
    )?;

    Ok(ScatterSolution {
        b_over_a: b,
        c_over_a: c,
        r: r_j,
        t: t_j,
        regime: classify_regime(p.k0, p.mass, v),
        current_used: CurrentKind::JCurrent,
        r_s: Some(sr.abs() / si.abs()),
        k,
        k_prime: kp,
        matching_residual: residual,
    })
}

/// Five-component spinor of the Klein-Gordon transmitted wave, with the
/// kinetic frequency `k0 − V` in the time-derivative slot.
pub fn kg_transmitted_spinor(p: &StepProblem, c: Complex64) -> Result<PlaneWaveSolution> {
    let v = contrast_potential(p)?;
    let kin = Kinematics::from_dispersion(p.mass, p.k0, v, p.branch);
    spin0_planewave(c, &kin, Direction::PlusX)
}

fn expect_particle(p: &StepProblem, want: Particle) -> Result<()> {
    if p.particle != want {
        return Err(Error::InvalidParameter {
            name: "particle",
            reason: format!("expected {want}, got {}", p.particle),
        });
    }
    Ok(())
}

fn unsupported_current(p: &StepProblem, which: CurrentKind) -> Error {
    Error::InvalidParameter {
        name: "current",
        reason: format!("{which} current is not available for {}", p.particle),
    }
}

/// Dispatches on the particle with its natural current.
pub fn solve(p: &StepProblem) -> Result<ScatterSolution> {
    match p.particle {
        Particle::Spin0Massive => solve_spin0(p),
        Particle::Spin1Massive => solve_spin1_massive(p),
        Particle::Photon => solve_photon(p),
        Particle::DiracContrast => solve_dirac_contrast(p),
        Particle::KGContrast => solve_kg_contrast(p),
    }
}

/// Dispatches with an explicitly requested current.
pub fn solve_with_current(p: &StepProblem, which: CurrentKind) -> Result<ScatterSolution> {
    match (p.particle, which) {
        (Particle::Spin0Massive, _) => solve_spin0_with(p, which),
        (Particle::Spin1Massive, _) => solve_spin1_with(p, which),
        (Particle::Photon, CurrentKind::Poynting) => solve_photon(p),
        (Particle::DiracContrast | Particle::KGContrast, CurrentKind::JCurrent) => solve(p),
        (Particle::KGContrast, CurrentKind::SCurrent) => {
            let mut s = solve_kg_contrast(p)?;
            let r_s = s.r_s.take().unwrap_or(s.r);
            s.r_s = Some(s.r);
            s.r = r_s;
            s.t = 1.0 - r_s;
            s.current_used = CurrentKind::SCurrent;
            Ok(s)
        }
        _ => Err(unsupported_current(p, which)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepParam {
    K0,
    Mass,
    V,
    Eps,
    Ratio,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::K0 => "k0",
            SweepParam::Mass => "mass",
            SweepParam::V => "V",
            SweepParam::Eps => "eps",
            SweepParam::Ratio => "ratio",
        }
    }

    pub fn apply(self, template: &StepProblem, value: f64) -> StepProblem {
        let mut p = *template;
        match self {
            SweepParam::K0 => p.k0 = value,
            SweepParam::Mass => p.mass = value,
            SweepParam::V => p.barrier = Barrier::Potential(value),
            SweepParam::Eps => p.barrier = Barrier::Epsilon(value),
            SweepParam::Ratio => p.barrier = Barrier::Ratio(Complex64::from(value)),
        }
        p
    }
}

impl std::str::FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "k0" => Ok(SweepParam::K0),
            "mass" => Ok(SweepParam::Mass),
            "V" => Ok(SweepParam::V),
            "eps" => Ok(SweepParam::Eps),
            "ratio" => Ok(SweepParam::Ratio),
            other => Err(format!(
                "unknown sweep parameter '{other}' (expected k0, mass, V, eps or ratio)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub result: Result<ScatterSolution>,
}

/// Evenly spaced sweep, endpoints included; rows stay in grid order.
pub fn sweep(
    template: &StepProblem,
    param: SweepParam,
    from: f64,
    to: f64,
    steps: usize,
) -> Result<Vec<SweepRow>> {
    if steps < 2 {
        return Err(Error::InvalidParameter {
            name: "steps",
            reason: format!("must be >= 2, got {steps}"),
        });
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .into_par_iter()
        .map(|i| {
            let value = if i == steps - 1 {
                to
            } else {
                from + (to - from) * (i as f64 / last)
            };
            SweepRow {
                param: value,
                result: solve(&param.apply(template, value)),
            }
        })
        .collect())
}
