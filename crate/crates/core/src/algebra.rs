//! Kemmer-Duffin-Petiau matrix representations.
//!
//! Two nontrivial irreducible representations of the trilinear algebra
//!
//!   β_μ β_ν β_λ + β_λ β_ν β_μ = β_μ g_νλ + β_λ g_νμ,   g = diag(+1, −1, −1, −1)
//!
//! are built here: the 5×5 (spin 0) and the 10×10 (spin 1). Matrices are
//! stored with lower indices; `β^0 = β_0` and `β^i = −β_i`. β_0 is Hermitian
//! and the β_i are anti-Hermitian.
//!
//! Component layouts:
//!
//! | rep   | slots                                                  |
//! |-------|--------------------------------------------------------|
//! | Spin0 | (φ₁, φ₂, φ₃, φ₀, φ)                                    |
//! | Spin1 | (E₁, E₂, E₃, H₁, H₂, H₃, p₁, p₂, p₃, p₄)               |
//!
//! For a positive-frequency plane wave `e^{-i(k₀t - k·x)}` the spin-0 spinor
//! is `(k₁, k₂, k₃, -i k₀, m)`, and the spin-1 spinor polarized along z and
//! moving along x has `E₃ = k₀ a`, `H₂ = -k a`, `p₃ = m a`. Slots 1–6 of the
//! spin-1 layout are field-strength-like and slots 7–10 potential-like.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Metric signature (+, −, −, −).
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Max-entry tolerance for algebraic identities. All entries are 0, ±1, ±i.
pub const IDENTITY_TOL: f64 = 1e-13;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RepKind {
    Spin0,
    Spin1,
}

impl RepKind {
    pub fn dim(self) -> usize {
        match self {
            RepKind::Spin0 => 5,
            RepKind::Spin1 => 10,
        }
    }

    pub fn slot_labels(self) -> &'static [&'static str] {
        match self {
            RepKind::Spin0 => &["phi1", "phi2", "phi3", "phi0", "phi"],
            RepKind::Spin1 => &["E1", "E2", "E3", "H1", "H2", "H3", "p1", "p2", "p3", "p4"],
        }
    }
}

impl std::fmt::Display for RepKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RepKind::Spin0 => f.write_str("spin0"),
            RepKind::Spin1 => f.write_str("spin1"),
        }
    }
}

impl std::str::FromStr for RepKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "spin0" => Ok(RepKind::Spin0),
            "spin1" => Ok(RepKind::Spin1),
            other => Err(format!(
                "unknown representation '{other}' (expected spin0 or spin1)"
            )),
        }
    }
}

/// The four β matrices of one representation (lower index).
#[derive(Debug, Clone, PartialEq)]
pub struct BetaSet {
    rep: RepKind,
    lower: [CMatrix; 4],
}

impl BetaSet {
    /// Wraps arbitrary matrices, e.g. to probe the identity checks with a
    /// deliberately broken set. Only dimensions are validated.
    pub fn from_lower(rep: RepKind, lower: [CMatrix; 4]) -> Result<Self> {
        let n = rep.dim();
        for m in &lower {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: m.nrows().max(m.ncols()),
                });
            }
        }
        Ok(BetaSet { rep, lower })
    }

    pub fn rep(&self) -> RepKind {
        self.rep
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    /// β_μ
    pub fn lower(&self, mu: usize) -> &CMatrix {
        &self.lower[mu]
    }

    /// β^μ = g^{μμ} β_μ
    pub fn upper(&self, mu: usize) -> CMatrix {
        &self.lower[mu] * Complex64::from(METRIC[mu])
    }

    pub fn into_lower(self) -> [CMatrix; 4] {
        self.lower
    }

    /// β^μ p_μ for a covariant four-vector `p_lower`.
    pub fn contract(&self, p_lower: [Complex64; 4]) -> CMatrix {
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for (mu, p) in p_lower.iter().enumerate() {
            out += self.upper(mu) * *p;
        }
        out
    }
}

fn unit(n: usize, entries: &[(usize, usize, Complex64)]) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for &(r, c, v) in entries {
        m[(r, c)] += v;
    }
    m
}

fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

pub fn build_representation(kind: RepKind) -> BetaSet {
    let lower = match kind {
        RepKind::Spin0 => {
            // φ₀ ↔ φ couples through β₀, φᵢ ↔ φ through βᵢ.
            let b0 = unit(5, &[(3, 4, I), (4, 3, -I)]);
            let bi = |i: usize| unit(5, &[(i, 4, -ONE), (4, i, ONE)]);
            [b0, bi(0), bi(1), bi(2)]
        }
        RepKind::Spin1 => {
            let b0 = unit(
                10,
                &[
                    (0, 6, -ONE),
                    (6, 0, -ONE),
                    (1, 7, -ONE),
                    (7, 1, -ONE),
                    (2, 8, -ONE),
                    (8, 2, -ONE),
                ],
            );
            let bj = |j: usize| {
                let mut entries = vec![(j, 9, ONE), (9, j, -ONE)];
                for a in 0..3 {
                    for b in 0..3 {
                        let e = levi_civita(j, a, b);
                        if e != 0.0 {
                            entries.push((3 + a, 6 + b, Complex64::from(e)));
                            entries.push((6 + b, 3 + a, Complex64::from(-e)));
                        }
                    }
                }
                unit(10, &entries)
            };
            [b0, bj(0), bj(1), bj(2)]
        }
    };
    BetaSet { rep: kind, lower }
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Max over all 64 index triples of the trilinear identity residual.
#[allow(clippy::needless_range_loop)]
pub fn trilinear_residual(b: &BetaSet) -> f64 {
    let mut worst = 0.0_f64;
    for mu in 0..4 {
        for nu in 0..4 {
            for lam in 0..4 {
                let (bm, bn, bl) = (b.lower(mu), b.lower(nu), b.lower(lam));
                let mut lhs = bm * bn * bl + bl * bn * bm;
                if nu == lam {
                    lhs -= bm * Complex64::from(METRIC[nu]);
                }
                if nu == mu {
                    lhs -= bl * Complex64::from(METRIC[nu]);
                }
                worst = worst.max(max_abs(&lhs));
            }
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Symmetry {
    Hermitian,
    AntiHermitian,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HermiticityEntry {
    pub mu: usize,
    pub expected: Symmetry,
    pub residual: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HermiticityReport {
    pub entries: Vec<HermiticityEntry>,
}

impl HermiticityReport {
    pub fn all_ok(&self) -> bool {
        self.entries.iter().all(|e| e.ok)
    }

    pub fn flagged(&self) -> Vec<usize> {
        self.entries
            .iter()
            .filter(|e| !e.ok)
            .map(|e| e.mu)
            .collect()
    }
}

/// ‖β₀ − β₀†‖ and ‖βᵢ + βᵢ†‖ per matrix.
pub fn check_hermiticity(b: &BetaSet) -> HermiticityReport {
    let entries = (0..4)
        .map(|mu| {
            let m = b.lower(mu);
            let adj = m.adjoint();
            let (expected, residual) = if mu == 0 {
                (Symmetry::Hermitian, max_abs(&(m - adj)))
            } else {
                (Symmetry::AntiHermitian, max_abs(&(m + adj)))
            };
            HermiticityEntry {
                mu,
                expected,
                residual,
                ok: residual <= IDENTITY_TOL,
            }
        })
        .collect();
    HermiticityReport { entries }
}

/// η₀, the Schrödinger-form generators β̃ⁱ and (spin 1) the massless projector γ.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedMatrices {
    pub eta0: CMatrix,
    /// β̃ⁱ = β₀βⁱ − βⁱβ₀ (upper spatial index), so that
    /// `i∂ₜψ = (−i β̃ⁱ ∂ᵢ − m β₀) ψ` and `Sⁱ = ψ† β̃ⁱ ψ` is the flux along +xⁱ.
    /// The lower-index commutator β₀βᵢ − βᵢβ₀ is −β̃ⁱ.
    pub beta_tilde: [CMatrix; 3],
    pub gamma: Option<CMatrix>,
}

/// One named identity and its max-entry residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub rep: RepKind,
    pub identity: &'static str,
    pub residual: f64,
}

impl IdentityCheck {
    pub fn passes(&self) -> bool {
        self.residual <= IDENTITY_TOL
    }
}

pub(crate) fn derived_unchecked(b: &BetaSet) -> DerivedMatrices {
    let n = b.dim();
    let id = CMatrix::identity(n, n);
    let b0 = b.lower(0);
    let eta0 = b0 * b0 * Complex64::from(2.0) - &id;
    let beta_tilde = [1, 2, 3].map(|i| {
        let up = b.upper(i);
        b0 * &up - &up * b0
    });
    let gamma = match b.rep() {
        RepKind::Spin0 => None,
        RepKind::Spin1 => {
            let mut g = CMatrix::zeros(n, n);
            for s in 0..6 {
                g[(s, s)] = ONE;
            }
            Some(g)
        }
    };
    DerivedMatrices {
        eta0,
        beta_tilde,
        gamma,
    }
}

/// Every algebraic identity the representation must satisfy, with residuals.
pub fn identity_checks(b: &BetaSet) -> Vec<IdentityCheck> {
    let d = derived_unchecked(b);
    let n = b.dim();
    let id = CMatrix::identity(n, n);
    let rep = b.rep();
    let mut out = Vec::new();
    let mut push = |identity: &'static str, residual: f64| {
        out.push(IdentityCheck {
            rep,
            identity,
            residual,
        })
    };

    push("trilinear (64 triples)", trilinear_residual(b));
    push(
        "beta0^3 = beta0",
        max_abs(&(b.lower(0) * b.lower(0) * b.lower(0) - b.lower(0))),
    );
    push("eta0^2 = 1", max_abs(&(&d.eta0 * &d.eta0 - &id)));
    push(
        "eta0 beta0 = beta0",
        max_abs(&(&d.eta0 * b.lower(0) - b.lower(0))),
    );
    push(
        "beta0 eta0 = beta0",
        max_abs(&(b.lower(0) * &d.eta0 - b.lower(0))),
    );
    let anti = (1..4)
        .map(|i| max_abs(&(&d.eta0 * b.lower(i) + b.lower(i) * &d.eta0)))
        .fold(0.0, f64::max);
    push("eta0 beta_i + beta_i eta0 = 0", anti);
    let herm = check_hermiticity(b)
        .entries
        .iter()
        .map(|e| e.residual)
        .fold(0.0, f64::max);
    push("beta0 Hermitian, beta_i anti-Hermitian", herm);
    let bt = d
        .beta_tilde
        .iter()
        .map(|m| max_abs(&(m - m.adjoint())))
        .fold(0.0, f64::max);
    push("beta_tilde_i Hermitian", bt);
    if let Some(g) = &d.gamma {
        push("gamma^2 = gamma", max_abs(&(g * g - g)));
        let anti = (0..4)
            .map(|mu| max_abs(&(g * b.lower(mu) + b.lower(mu) * g - b.lower(mu))))
            .fold(0.0, f64::max);
        push("gamma beta_mu + beta_mu gamma = beta_mu", anti);
    }
    out
}

/// Builds the derived matrices, refusing representations that break any identity.
pub fn build_derived(b: &BetaSet) -> Result<DerivedMatrices> {
    if let Some(bad) = identity_checks(b).into_iter().find(|c| !c.passes()) {
        return Err(Error::AlgebraViolation {
            identity: bad.identity,
            residual: bad.residual,
            tolerance: IDENTITY_TOL,
        });
    }
    Ok(derived_unchecked(b))
}

/// Trace of a projector, i.e. its rank.
pub fn projector_rank(p: &CMatrix) -> usize {
    p.trace().re.round() as usize
}

fn format_real(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}

/// One complex entry as `a+bi`.
pub fn format_complex(z: Complex64) -> String {
    let re = format_real(z.re);
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    if im < 0.0 {
        format!("{re}-{}i", format_real(-im))
    } else {
        format!("{re}+{}i", format_real(im))
    }
}

/// Row-major plain-text dump, one entry per cell separated by spaces.
pub fn format_matrix(m: &CMatrix) -> String {
    let mut s = String::new();
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| format_complex(m[(r, c)])).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}
