//! Exact plane-wave solutions of the first-order equation.
//!
//! Every wave here has space-time dependence `e^{-i(ω t - p x)}` along the x
//! axis, so `∂_μ → -i p_μ` with `p_μ = (ω, -p, 0, 0)` and the first-order
//! equation `(iβ^μ∂_μ + m)ψ = 0` becomes `(β^μ p_μ + m) u = 0`.
//!
//! `ω` is the frequency carried by the spinor slots. For on-shell waves in
//! a region with scalar potential `V` it is the kinetic energy `k0 - V`. For
//! frequency-matched waves (a region described only by its wavenumber, the
//! way the step solvers parameterize the far side of the step) it is `k0`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{BetaSet, CMatrix, RepKind};
use crate::error::{Error, Result};

pub type Spinor = DVector<Complex64>;

/// Relative tolerance for the dispersion invariant.
pub const DISPERSION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    PlusX,
    MinusX,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::PlusX => 1.0,
            Direction::MinusX => -1.0,
        }
    }
}

/// Sign of a real region wavenumber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Branch {
    #[default]
    Positive,
    Negative,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Positive => 1.0,
            Branch::Negative => -1.0,
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "pos" | "positive" | "+" => Ok(Branch::Positive),
            "neg" | "negative" | "-" => Ok(Branch::Negative),
            other => Err(format!("unknown branch '{other}' (expected pos or neg)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WaveKind {
    Incident,
    Reflected,
    Transmitted,
}

impl WaveKind {
    pub fn direction(self) -> Direction {
        match self {
            WaveKind::Reflected => Direction::MinusX,
            WaveKind::Incident | WaveKind::Transmitted => Direction::PlusX,
        }
    }
}

/// Wavenumber with `(k0 - V)^2 = k^2 + m^2`.
///
/// Propagating solutions carry the sign of `branch`; below threshold the
/// result is `+i·sqrt(m^2 - (k0 - V)^2)`, which decays toward +x.
pub fn dispersion(mass: f64, k0: f64, potential: f64, branch: Branch) -> Complex64 {
    let kinetic = k0 - potential;
    let k2 = kinetic * kinetic - mass * mass;
    if k2 >= 0.0 {
        Complex64::new(branch.sign() * k2.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-k2).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shell {
    /// `k` obeys the dispersion relation of the region.
    OnShell,
    /// `k` was set by a barrier parameter at fixed frequency `k0`.
    FrequencyMatched,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kinematics {
    pub mass: f64,
    pub k0: f64,
    pub k: Complex64,
    pub potential: f64,
    pub shell: Shell,
}

impl Kinematics {
    /// On-shell kinematics; rejects data violating the dispersion relation.
    pub fn new(mass: f64, k0: f64, k: Complex64, potential: f64) -> Result<Self> {
        if mass < 0.0 {
            return Err(Error::InvalidParameter {
                name: "mass",
                reason: format!("must be >= 0, got {mass}"),
            });
        }
        let kin = Kinematics {
            mass,
            k0,
            k,
            potential,
            shell: Shell::OnShell,
        };
        let r = kin.dispersion_residual();
        if r > DISPERSION_TOL {
            return Err(Error::DispersionViolation { residual: r });
        }
        Ok(kin)
    }

    pub fn from_dispersion(mass: f64, k0: f64, potential: f64, branch: Branch) -> Self {
        Kinematics {
            mass,
            k0,
            k: dispersion(mass, k0, potential, branch),
            potential,
            shell: Shell::OnShell,
        }
    }

    /// A region described by its wavenumber at unchanged frequency `k0`.
    pub fn frequency_matched(mass: f64, k0: f64, k: Complex64) -> Self {
        Kinematics {
            mass,
            k0,
            k,
            potential: 0.0,
            shell: Shell::FrequencyMatched,
        }
    }

    pub fn slot_frequency(&self) -> f64 {
        self.k0 - self.potential
    }

    /// `|(k0 - V)^2 - k^2 - m^2|` relative to the largest term.
    pub fn dispersion_residual(&self) -> f64 {
        let w = self.slot_frequency();
        let lhs = Complex64::from(w * w) - self.k * self.k - self.mass * self.mass;
        let scale = (w * w)
            .max(self.k.norm_sqr() + self.mass * self.mass)
            .max(1.0);
        lhs.norm() / scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlaneWaveSolution {
    pub rep: RepKind,
    pub amplitude: Spinor,
    pub kin: Kinematics,
    pub scalar_amplitude: Complex64,
    pub direction: Direction,
    /// Photon phases φ (incident/reflected) or χ (transmitted); zero otherwise.
    pub phase: f64,
    pub massless: bool,
}

impl PlaneWaveSolution {
    /// Signed spatial wavenumber `p` in `e^{-i(ωt - p x)}`.
    pub fn wavenumber(&self) -> Complex64 {
        self.kin.k * self.direction.sign()
    }

    /// Covariant four-momentum `(ω, -p, 0, 0)`.
    pub fn momentum_lower(&self) -> [Complex64; 4] {
        [
            Complex64::from(self.kin.slot_frequency()),
            -self.wavenumber(),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]
    }

    /// Spinor value at (x, t).
    pub fn at(&self, x: f64, t: f64) -> Spinor {
        let w = self.kin.slot_frequency();
        let phase = (Complex64::i() * (self.wavenumber() * x - w * t)).exp();
        &self.amplitude * phase
    }

    /// (E_z, H_y) slots of a spin-1 or photon spinor.
    pub fn field_pair(&self) -> Option<(Complex64, Complex64)> {
        match self.rep {
            RepKind::Spin1 => Some((self.amplitude[2], self.amplitude[4])),
            RepKind::Spin0 => None,
        }
    }
}

fn check_shell(kin: &Kinematics) -> Result<()> {
    if kin.shell == Shell::OnShell {
        let r = kin.dispersion_residual();
        if r > DISPERSION_TOL {
            return Err(Error::DispersionViolation { residual: r });
        }
    }
    Ok(())
}

/// `a·(±k, 0, 0, -iω, m)` with the k-slot sign following `direction`.
pub fn spin0_planewave(
    a: Complex64,
    kin: &Kinematics,
    direction: Direction,
) -> Result<PlaneWaveSolution> {
    check_shell(kin)?;
    let p = kin.k * direction.sign();
    let w = kin.slot_frequency();
    let zero = Complex64::new(0.0, 0.0);
    let u = Spinor::from_vec(vec![
        p,
        zero,
        zero,
        Complex64::new(0.0, -w),
        Complex64::from(kin.mass),
    ]) * a;
    Ok(PlaneWaveSolution {
        rep: RepKind::Spin0,
        amplitude: u,
        kin: *kin,
        scalar_amplitude: a,
        direction,
        phase: 0.0,
        massless: false,
    })
}

/// Transverse spin-1 wave polarized along z.
///
/// `kin` describes the incident region. Transmitted waves use `k' = √ε·k` at
/// the same frequency. The spinor is `scalar/√m · (E3, H2, p3)` with
/// `E3 = e0`, `H2 = -(p/ω)·e0`, `p3 = (m/ω)·e0`; dividing H2 by the
/// incident admittance `k/ω` gives the field pairs (e0, -e0), (e0, e0),
/// (e0, -√ε·e0) for incident, reflected and transmitted waves.
pub fn spin1_planewave(
    scalar: Complex64,
    e0: f64,
    kin: &Kinematics,
    eps: f64,
    kind: WaveKind,
) -> Result<PlaneWaveSolution> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "eps",
            reason: format!("must be >= 0, got {eps}"),
        });
    }
    if !(kin.mass > 0.0) {
        return Err(Error::InvalidParameter {
            name: "mass",
            reason: "massive spin-1 wave needs mass > 0".into(),
        });
    }
    check_shell(kin)?;
    let region = match kind {
        WaveKind::Transmitted if eps != 1.0 => {
            Kinematics::frequency_matched(kin.mass, kin.slot_frequency(), kin.k * eps.sqrt())
        }
        _ => *kin,
    };
    spin1_from_region(scalar, e0, &region, kind.direction())
}

pub(crate) fn spin1_from_region(
    scalar: Complex64,
    e0: f64,
    region: &Kinematics,
    direction: Direction,
) -> Result<PlaneWaveSolution> {
    let w = region.slot_frequency();
    if w == 0.0 {
        return Err(Error::InvalidParameter {
            name: "k0",
            reason: "spin-1 field normalization needs nonzero frequency".into(),
        });
    }
    let p = region.k * direction.sign();
    let norm = scalar / region.mass.sqrt() * e0;
    let mut u = Spinor::zeros(10);
    u[2] = norm;
    u[4] = -p / w * norm;
    u[8] = norm * (region.mass / w);
    Ok(PlaneWaveSolution {
        rep: RepKind::Spin1,
        amplitude: u,
        kin: *region,
        scalar_amplitude: scalar,
        direction,
        phase: 0.0,
        massless: false,
    })
}

/// Photon wave in the projected 10-component layout `γψ = (0,0,E_z,0,H_y,0,…)`
/// with `H_y = -(p/ω) E_z` and `E_z = amplitude_factor·e0·e^{-iφ}`.
pub fn photon_planewave(
    e0: f64,
    omega: f64,
    k: f64,
    phase: f64,
    kind: WaveKind,
    amplitude_factor: f64,
) -> Result<PlaneWaveSolution> {
    if !(omega > 0.0) {
        return Err(Error::InvalidParameter {
            name: "omega",
            reason: format!("must be > 0, got {omega}"),
        });
    }
    let direction = kind.direction();
    let p = k * direction.sign();
    let ez = Complex64::from_polar(amplitude_factor * e0, -phase);
    let mut u = Spinor::zeros(10);
    u[2] = ez;
    u[4] = ez * (-p / omega);
    Ok(PlaneWaveSolution {
        rep: RepKind::Spin1,
        amplitude: u,
        kin: Kinematics::frequency_matched(0.0, omega, Complex64::from(k)),
        scalar_amplitude: Complex64::from(amplitude_factor),
        direction,
        phase,
        massless: true,
    })
}

fn rel(v: &Spinor, scale: f64) -> f64 {
    if scale == 0.0 {
        v.norm()
    } else {
        v.norm() / scale
    }
}

fn projected(p: &PlaneWaveSolution) -> Spinor {
    // γ keeps the six field-strength slots
    let mut g = p.amplitude.clone();
    for s in 6..10 {
        g[s] = Complex64::new(0.0, 0.0);
    }
    g
}

/// `‖(β^μ p_μ + m) u‖ / ‖u‖`; for photons `‖β^μ p_μ (γu)‖ / ‖γu‖`.
pub fn residual_first_order(b: &BetaSet, p: &PlaneWaveSolution) -> Result<f64> {
    check_dim(b, &p.amplitude)?;
    let op = b.contract(p.momentum_lower());
    if p.massless {
        let g = projected(p);
        return Ok(rel(&(&op * &g), g.norm()));
    }
    let n = b.dim();
    let full = op + CMatrix::identity(n, n) * Complex64::from(p.kin.mass);
    Ok(rel(&(&full * &p.amplitude), p.amplitude.norm()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondaryResiduals {
    /// max_ν ‖(β^ρ p_ρ) β_ν u − p_ν u‖ / ‖u‖ (applied to γu for photons)
    pub derivative_identity: f64,
    /// ‖(1 − β₀²)(β^i p_i + m) u‖ / ‖u‖
    pub constraint: f64,
    /// |p_μ p^μ − m²|
    pub mass_shell: f64,
}

pub fn residual_secondary(b: &BetaSet, p: &PlaneWaveSolution) -> Result<SecondaryResiduals> {
    check_dim(b, &p.amplitude)?;
    let n = b.dim();
    let mom = p.momentum_lower();
    let slash = b.contract(mom);
    let u = if p.massless {
        projected(p)
    } else {
        p.amplitude.clone()
    };
    let scale = u.norm();

    let mut derivative_identity = 0.0_f64;
    for (nu, p_nu) in mom.iter().enumerate() {
        let lhs = &slash * (b.lower(nu) * &u) - &u * *p_nu;
        derivative_identity = derivative_identity.max(rel(&lhs, scale));
    }

    let b0 = b.lower(0);
    let proj = CMatrix::identity(n, n) - b0 * b0;
    let mut spatial = b.contract([Complex64::new(0.0, 0.0), mom[1], mom[2], mom[3]]);
    if !p.massless {
        spatial += CMatrix::identity(n, n) * Complex64::from(p.kin.mass);
    }
    let constraint = rel(&(proj * spatial * &u), scale);

    let w = mom[0];
    let square = w * w - mom[1] * mom[1] - mom[2] * mom[2] - mom[3] * mom[3];
    let m = if p.massless { 0.0 } else { p.kin.mass };
    let mass_shell = (square - m * m).norm();

    Ok(SecondaryResiduals {
        derivative_identity,
        constraint,
        mass_shell,
    })
}

pub(crate) fn check_dim(b: &BetaSet, psi: &Spinor) -> Result<()> {
    if psi.len() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: b.dim(),
            got: psi.len(),
        });
    }
    Ok(())
}
