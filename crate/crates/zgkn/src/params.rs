//! Physical inputs, admissibility rules and the spectroscopic dictionary.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Fine-structure constant used to convert a charge number `Z` into `γ = −Zα`.
pub const ALPHA_S: f64 = 0.0072973525693;

/// Upper bound on the ring radius for which existence and uniqueness are proved.
pub fn a_max() -> f64 {
    1.0 - std::f64::consts::FRAC_1_SQRT_2
}

/// Ring radius `a`, coupling `γ < 0` and azimuthal half-integer `κ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub a: f64,
    pub gamma: f64,
    pub kappa: f64,
}

impl ModelParams {
    pub fn new(a: f64, gamma: f64, kappa: f64) -> Self {
        Self { a, gamma, kappa }
    }

    /// Builds parameters from a nuclear charge number, `γ = −Z·α`.
    pub fn from_z(a: f64, z: f64, kappa: f64) -> Self {
        Self::new(a, -z * ALPHA_S, kappa)
    }

    /// `Z = −γ/α`.
    pub fn z(&self) -> f64 {
        -self.gamma / ALPHA_S
    }

    /// `a < 1 − 1/√2` and `−½ < γ < 0`.
    pub fn in_guaranteed_region(&self) -> bool {
        self.a > 0.0 && self.a < a_max() && self.gamma > -0.5 && self.gamma < 0.0
    }

    pub fn kappa_sign(&self) -> f64 {
        self.kappa.signum()
    }
}

/// Returns true when `2κ` is an odd integer.
pub fn is_half_integer(kappa: f64) -> bool {
    let twice = 2.0 * kappa;
    kappa.is_finite() && twice == twice.round() && (twice.round() as i64).rem_euclid(2) == 1
}

/// Winding numbers of the angular and radial connectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WindingTarget {
    pub n_theta: i64,
    pub n_omega: i64,
}

impl WindingTarget {
    pub fn new(n_theta: i64, n_omega: i64) -> Self {
        Self { n_theta, n_omega }
    }

    /// `N_Θ ≥ 0` needs `N_Ω ≥ 0`; `N_Θ ≤ −1` needs `N_Ω ≥ 1`.
    pub fn is_admissible(&self) -> bool {
        if self.n_theta >= 0 {
            self.n_omega >= 0
        } else {
            self.n_omega >= 1
        }
    }

    /// The integer `N` of the dictionary: `N_Θ + 1` for `N_Θ ≥ 0`, else `N_Θ`.
    pub fn big_n(&self) -> i64 {
        theta_winding_to_n(self.n_theta)
    }
}

pub fn theta_winding_to_n(n_theta: i64) -> i64 {
    if n_theta >= 0 {
        n_theta + 1
    } else {
        n_theta
    }
}

pub fn n_to_theta_winding(n: i64) -> i64 {
    if n >= 1 {
        n - 1
    } else {
        n
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub accepted: bool,
    pub reasons: Vec<String>,
    pub in_guaranteed_region: bool,
}

/// Checks the inputs of a bound-state solve. Never fails; rejection reasons
/// are collected in the report.
pub fn validate(params: &ModelParams, target: WindingTarget) -> Admissibility {
    let mut reasons = Vec::new();
    if !(params.a > 0.0) {
        reasons.push(format!("ring radius must be positive (a = {})", params.a));
    }
    if !(params.gamma < 0.0) {
        reasons.push(format!("coupling must be negative (gamma = {})", params.gamma));
    }
    if params.kappa == 0.0 || !is_half_integer(params.kappa) {
        reasons.push(format!("kappa must be a nonzero half-integer (kappa = {})", params.kappa));
    }
    if !target.is_admissible() {
        if target.n_theta >= 0 {
            reasons.push(format!(
                "no bound states with n_omega <= -1 (n_omega = {})",
                target.n_omega
            ));
        } else {
            reasons.push(format!(
                "for n_theta <= -1 need n_omega >= 1 (n_omega = {})",
                target.n_omega
            ));
        }
    }
    Admissibility {
        accepted: reasons.is_empty(),
        reasons,
        in_guaranteed_region: params.in_guaranteed_region(),
    }
}

/// Hydrogenic quantum numbers attached to a winding triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectroLabel {
    pub n: u32,
    pub ell: u32,
    pub j: f64,
    pub m_j: f64,
    pub k: i64,
    #[serde(rename = "M")]
    pub big_m: u32,
    #[serde(rename = "N")]
    pub big_n: i64,
}

const ORBITAL_LETTERS: &[char] = &['s', 'p', 'd', 'f', 'g', 'h', 'i', 'k', 'l', 'm'];

impl SpectroLabel {
    /// Inverts the dictionary back to winding numbers.
    pub fn winding_target(&self) -> WindingTarget {
        WindingTarget::new(n_to_theta_winding(self.big_n), self.big_m as i64)
    }

    pub fn orbital_letter(&self) -> char {
        ORBITAL_LETTERS.get(self.ell as usize).copied().unwrap_or('?')
    }
}

impl fmt::Display for SpectroLabel {
    /// `nℓ_j` in ASCII, e.g. `2p1/2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let twice_j = (2.0 * self.j).round() as i64;
        write!(f, "{}{}{}/2", self.n, self.orbital_letter(), twice_j)
    }
}

/// `k = −N − sgn(N)(|κ| − ½)`.
pub fn spin_orbit_k(big_n: i64, kappa: f64) -> i64 {
    let s = big_n.signum();
    let half_shift = (kappa.abs() - 0.5).round() as i64;
    -big_n - s * half_shift
}

/// Maps `(N_Θ, N_Ω, κ)` to `(n, ℓ, j, m_j, k, M)`.
pub fn spectroscopic_label(target: WindingTarget, kappa: f64) -> Result<SpectroLabel> {
    if !target.is_admissible() {
        return Err(Error::Inadmissible(format!(
            "winding pair ({}, {}) has no bound state",
            target.n_theta, target.n_omega
        )));
    }
    if kappa == 0.0 || !is_half_integer(kappa) {
        return Err(Error::Inadmissible(format!("kappa = {kappa} is not a nonzero half-integer")));
    }
    let big_n = target.big_n();
    let k = spin_orbit_k(big_n, kappa);
    let big_m = target.n_omega;
    if k > 0 && big_m == 0 {
        return Err(Error::Inadmissible("k > 0 with M = 0 is excluded".into()));
    }
    let abs_k = k.unsigned_abs() as u32;
    let j = abs_k as f64 - 0.5;
    let ell = (j + 0.5 * k.signum() as f64).round() as u32;
    Ok(SpectroLabel {
        n: big_m as u32 + abs_k,
        ell,
        j,
        m_j: kappa,
        k,
        big_m: big_m as u32,
        big_n,
    })
}
