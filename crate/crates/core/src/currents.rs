//! Conserved currents: the charge-type `j^μ = ψ†η₀β^μψ`, the energy-flow
//! current `(S₀, Sⁱ) = (ψ†ψ, ψ†β̃ⁱψ)` and the photon Poynting vector.
//!
//! `j⁰` takes both signs; `S₀` never does.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{derived_unchecked, BetaSet};
use crate::error::{Error, Result};
use crate::planewave::{check_dim, PlaneWaveSolution, Spinor};

/// Incident fluxes below this magnitude cannot normalize a ratio.
pub const MIN_FLUX: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurrentKind {
    #[serde(rename = "S")]
    SCurrent,
    #[serde(rename = "j")]
    JCurrent,
    #[serde(rename = "poynting")]
    Poynting,
}

impl std::fmt::Display for CurrentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CurrentKind::SCurrent => "S",
            CurrentKind::JCurrent => "j",
            CurrentKind::Poynting => "poynting",
        })
    }
}

impl std::str::FromStr for CurrentKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "S" => Ok(CurrentKind::SCurrent),
            "j" => Ok(CurrentKind::JCurrent),
            "poynting" => Ok(CurrentKind::Poynting),
            other => Err(format!(
                "unknown current '{other}' (expected S, j or poynting)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurrentSample {
    pub j: [f64; 4],
    #[serde(rename = "S0")]
    pub s0: f64,
    #[serde(rename = "S")]
    pub s: [f64; 3],
    /// (x, t) the spinor was sampled at, if known
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at: Option<(f64, f64)>,
}

impl CurrentSample {
    pub fn of(psi: &Spinor, b: &BetaSet, at: Option<(f64, f64)>) -> Result<Self> {
        let j = current_j(psi, b)?;
        let (s0, s) = current_s(psi, b)?;
        Ok(CurrentSample { j, s0, s, at })
    }
}

fn quad(psi: &Spinor, m: &crate::algebra::CMatrix) -> Complex64 {
    psi.dotc(&(m * psi))
}

/// `j^μ = ψ†η₀β^μψ` (upper index).
pub fn current_j(psi: &Spinor, b: &BetaSet) -> Result<[f64; 4]> {
    check_dim(b, psi)?;
    let eta0 = derived_unchecked(b).eta0;
    // η₀β^μ is Hermitian, so the imaginary part is rounding only
    Ok([0, 1, 2, 3].map(|mu| quad(psi, &(&eta0 * b.upper(mu))).re))
}

/// `(ψ†ψ, ψ†β̃ⁱψ)`.
pub fn current_s(psi: &Spinor, b: &BetaSet) -> Result<(f64, [f64; 3])> {
    check_dim(b, psi)?;
    let d = derived_unchecked(b);
    let s0 = psi.norm_squared();
    Ok((s0, [0, 1, 2].map(|i| quad(psi, &d.beta_tilde[i]).re)))
}

/// `E × H` for `E = (0, 0, ez)`, `H = (0, hy, 0)`.
pub fn poynting(ez: f64, hy: f64) -> [f64; 3] {
    [-ez * hy, 0.0, 0.0]
}

/// Cycle-averaged x-flux `-Re(E_z H_y*)` of complex field amplitudes.
pub fn poynting_complex(ez: Complex64, hy: Complex64) -> f64 {
    -(ez * hy.conj()).re
}

/// Signed x-flux of a plane wave under the chosen current, at x = 0, t = 0.
pub fn flux_x(w: &PlaneWaveSolution, b: &BetaSet, which: CurrentKind) -> Result<f64> {
    match which {
        CurrentKind::SCurrent => Ok(current_s(&w.amplitude, b)?.1[0]),
        CurrentKind::JCurrent => Ok(current_j(&w.amplitude, b)?[1]),
        CurrentKind::Poynting => {
            let (ez, hy) = w.field_pair().ok_or(Error::InvalidParameter {
                name: "current",
                reason: "Poynting flux needs a spin-1 field layout".into(),
            })?;
            Ok(poynting_complex(ez, hy))
        }
    }
}

/// `|flux(reflected)| / |flux(incident)|`.
pub fn flux_ratio(
    reflected: &PlaneWaveSolution,
    incident: &PlaneWaveSolution,
    b: &BetaSet,
    which: CurrentKind,
) -> Result<f64> {
    if reflected.rep != incident.rep {
        return Err(Error::DimensionMismatch {
            expected: incident.rep.dim(),
            got: reflected.rep.dim(),
        });
    }
    let inc = flux_x(incident, b, which)?;
    if inc.abs() < MIN_FLUX {
        return Err(Error::ZeroIncidentFlux { flux: inc });
    }
    Ok(flux_x(reflected, b, which)?.abs() / inc.abs())
}
