//! Joint fixed-point iteration for the pair `(E★, λ★)`.
//!
//! The map `ϕ(E) = E_{N_Ω}(λ_{N_Θ}(E))` is a contraction whenever the angular
//! eigenvalue moves slower than `a` in `E` and the radial eigenvalue moves
//! slower than `1/a` in λ. Iterating it from a Sommerfeld start converges in a
//! handful of steps for small `a`.

use serde::Serialize;

use crate::cylinder::ConnectorResult;
use crate::omega_system::{find_e, OmegaSystem, E_CEIL, E_FLOOR};
use crate::oracles::{sommerfeld_energy, SommerfeldIndex};
use crate::params::{spectroscopic_label, validate, ModelParams, SpectroLabel, WindingTarget};
use crate::theta_system::{find_lambda_with_margin, ThetaSystem, BRACKET_MARGIN};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveOptions {
    /// Outer tolerance on successive energy iterates.
    pub tol: f64,
    /// Bisection tolerance of the inner connector searches.
    pub inner_tol: f64,
    pub max_iter: usize,
    /// Relative widening of the angular theorem bracket.
    pub theta_margin: f64,
    pub e_floor: f64,
    pub e_ceil: f64,
    /// Starting energy; the Sommerfeld value is used when `None`.
    pub initial_energy: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            inner_tol: 1e-9,
            max_iter: 60,
            theta_margin: BRACKET_MARGIN,
            e_floor: E_FLOOR,
            e_ceil: E_CEIL,
            initial_energy: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Convergence {
    pub iterations: usize,
    /// `|E_{k+1} − E_k|` at the last iteration.
    pub delta_e: f64,
    /// `|λ_{k+1} − λ_k|` at the last iteration.
    pub delta_lambda: f64,
    /// Largest observed ratio of successive energy updates.
    pub contraction_ratio: Option<f64>,
    /// `|λ_{N_Θ}(E★) − λ★|`.
    pub residual_lambda: f64,
    /// `|E_{N_Ω}(λ_{N_Θ}(E★)) − E★|`.
    pub residual_e: f64,
    /// Whether the widened-bracket retry was needed.
    pub retried: bool,
}

/// A converged bound state with the connectors that certify it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundState {
    pub energy: f64,
    pub lambda: f64,
    pub params: ModelParams,
    pub target: WindingTarget,
    pub label: SpectroLabel,
    pub convergence: Convergence,
    pub in_guaranteed_region: bool,
    /// Angular connector at `E★`.
    #[serde(skip)]
    pub theta: ConnectorResult,
    /// Radial connector at `λ★`.
    #[serde(skip)]
    pub omega: ConnectorResult,
}

impl BoundState {
    /// Energy of the partner state in the negative continuum gap.
    pub fn mirror_energy(&self) -> f64 {
        -self.energy
    }
}

/// Sommerfeld energy for the label, or `0.5` when `|γ| ≥ 1` or the formula does not apply.
pub fn initial_energy(params: &ModelParams, label: &SpectroLabel) -> f64 {
    if params.gamma.abs() >= 1.0 {
        return 0.5;
    }
    match SommerfeldIndex::new(label.big_m, label.k, params.gamma) {
        Ok(idx) => sommerfeld_energy(&idx),
        Err(_) => 0.5,
    }
}

struct Inner<'a> {
    params: &'a ModelParams,
    target: WindingTarget,
    opts: &'a SolveOptions,
    margin: f64,
}

impl Inner<'_> {
    fn lambda(&self, energy: f64) -> Result<ConnectorResult> {
        let ctx = ThetaSystem::new(self.params, energy);
        find_lambda_with_margin(&ctx, self.target.n_theta, self.opts.inner_tol, self.margin)
    }

    fn energy(&self, lambda: f64) -> Result<ConnectorResult> {
        let ctx = OmegaSystem::new(self.params, lambda).with_search_interval(self.opts.e_floor, self.opts.e_ceil);
        find_e(&ctx, self.target.n_omega, self.opts.inner_tol)
    }

    fn phi(&self, energy: f64) -> Result<(ConnectorResult, ConnectorResult)> {
        let th = self.lambda(energy)?;
        let om = self.energy(th.mu_star)?;
        Ok((th, om))
    }

    fn iterate(&self, e0: f64) -> Result<BoundState> {
        let label = spectroscopic_label(self.target, self.params.kappa)?;
        let mut energy = e0;
        let mut lambda_prev: Option<f64> = None;
        let mut delta_prev: Option<f64> = None;
        let mut ratio: Option<f64> = None;
        for it in 1..=self.opts.max_iter {
            let (th, om) = self.phi(energy)?;
            let lambda = th.mu_star;
            let next = om.mu_star;
            let delta_e = (next - energy).abs();
            let delta_lambda = lambda_prev.map_or(f64::NAN, |l| (lambda - l).abs());
            if let Some(d) = delta_prev {
                // ratios below the inner tolerance are noise
                if d > 10.0 * self.opts.inner_tol {
                    let r = delta_e / d;
                    ratio = Some(ratio.map_or(r, |q: f64| q.max(r)));
                }
            }
            if delta_e <= self.opts.tol {
                let (th_v, om_v) = self.phi(next)?;
                return Ok(BoundState {
                    energy: next,
                    lambda,
                    params: *self.params,
                    target: self.target,
                    label,
                    convergence: Convergence {
                        iterations: it,
                        delta_e,
                        delta_lambda,
                        contraction_ratio: ratio,
                        residual_lambda: (th_v.mu_star - lambda).abs(),
                        residual_e: (om_v.mu_star - next).abs(),
                        retried: false,
                    },
                    in_guaranteed_region: self.params.in_guaranteed_region(),
                    theta: th_v,
                    omega: om_v,
                });
            }
            energy = next;
            lambda_prev = Some(lambda);
            delta_prev = Some(delta_e);
            if it == self.opts.max_iter {
                return Err(Error::NotConverged {
                    iterations: it,
                    delta_e,
                    last_energy: energy,
                    last_lambda: lambda,
                });
            }
        }
        Err(Error::NotConverged { iterations: 0, delta_e: f64::NAN, last_energy: e0, last_lambda: f64::NAN })
    }
}

/// Solves for the bound state with windings `target`.
pub fn solve_pair(params: &ModelParams, target: WindingTarget, opts: &SolveOptions) -> Result<BoundState> {
    let check = validate(params, target);
    if !check.accepted {
        return Err(Error::Inadmissible(check.reasons.join("; ")));
    }
    if !(opts.tol > 0.0 && opts.inner_tol > 0.0 && opts.max_iter > 0) {
        return Err(Error::InvalidArgument("tolerances and max_iter must be positive".into()));
    }
    let label = spectroscopic_label(target, params.kappa)?;
    let e0 = opts.initial_energy.unwrap_or_else(|| initial_energy(params, &label));
    let inner = Inner { params, target, opts, margin: opts.theta_margin };
    match inner.iterate(e0) {
        Ok(s) => Ok(s),
        Err(e @ (Error::Inadmissible(_) | Error::InvalidArgument(_))) => Err(e),
        Err(e) if params.in_guaranteed_region() => Err(e),
        Err(_) => {
            let wide = Inner { margin: 2.0 * opts.theta_margin.max(BRACKET_MARGIN), ..inner };
            let mut s = wide.iterate(e0)?;
            s.convergence.retried = true;
            Ok(s)
        }
    }
}

/// Finite-difference slope `|ϕ(E + δ) − ϕ(E)|/δ` of the fixed-point map.
pub fn contraction_probe(
    params: &ModelParams,
    target: WindingTarget,
    e_probe: f64,
    delta: f64,
    opts: &SolveOptions,
) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::InvalidArgument("probe step must be nonzero".into()));
    }
    let e1 = e_probe + delta;
    if !(e_probe > 0.0 && e_probe < 1.0 && e1 > 0.0 && e1 < 1.0) {
        return Err(Error::InvalidArgument(format!("probe points {e_probe}, {e1} outside (0, 1)")));
    }
    let inner = Inner { params, target, opts, margin: opts.theta_margin };
    let (_, a) = inner.phi(e_probe)?;
    let (_, b) = inner.phi(e1)?;
    Ok((b.mu_star - a.mu_star).abs() / delta.abs())
}

/// Finite-difference `dλ_{N_Θ}/dE` at `energy`.
pub fn lambda_slope(params: &ModelParams, n_theta: i64, energy: f64, delta: f64, tol: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::InvalidArgument("probe step must be nonzero".into()));
    }
    let at = |e: f64| find_lambda_with_margin(&ThetaSystem::new(params, e), n_theta, tol, BRACKET_MARGIN);
    Ok((at(energy + delta)?.mu_star - at(energy)?.mu_star) / delta)
}

/// Finite-difference `dE_{N_Ω}/dλ` at `lambda`.
pub fn energy_slope(params: &ModelParams, n_omega: i64, lambda: f64, delta: f64, tol: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::InvalidArgument("probe step must be nonzero".into()));
    }
    let at = |l: f64| find_e(&OmegaSystem::new(params, l), n_omega, tol);
    Ok((at(lambda + delta)?.mu_star - at(lambda)?.mu_star) / delta)
}
