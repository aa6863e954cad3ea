//! The angular Prüfer flow on `[0, π] × S¹` and the search for `λ_N(E)`.
//!
//! In the regularized time τ (with `dθ/dτ = sin θ`) the flow is
//!
//! ```text
//! θ̇ = sin θ
//! Θ̇ = −2a sin θ cos θ cos Θ + 2aE sin²θ sin Θ − 2κ sin Θ + 2λ sin θ
//! ```
//!
//! Both boundary equilibria are hyperbolic saddles. The family parameter is
//! λ itself, and windings grow as λ decreases.

use std::f64::consts::PI;

use serde::Serialize;

use crate::cylinder::{find_connector, ConnectorResult, CylinderField, Orientation, BoundaryEquilibria};
use crate::params::{theta_winding_to_n, ModelParams};
use crate::{Error, Result};

/// Default relative widening of the theorem brackets.
pub const BRACKET_MARGIN: f64 = 0.05;

/// Angular flow at fixed `(a, κ, E)`; the parameter is λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaSystem {
    pub a: f64,
    pub kappa: f64,
    pub energy: f64,
}

/// The angular flow is fully determined by its context.
pub type ThetaContext = ThetaSystem;

impl ThetaSystem {
    pub fn new(params: &ModelParams, energy: f64) -> Self {
        Self { a: params.a, kappa: params.kappa, energy }
    }

    /// Context from raw values; `a = 0` is allowed here (the flat-space limit).
    pub fn with_values(a: f64, kappa: f64, energy: f64) -> Self {
        Self { a, kappa, energy }
    }
}

/// Right-hand side `(dθ/dτ, dΘ/dτ)`.
pub fn theta_rhs(state: [f64; 2], ctx: &ThetaContext, lambda: f64) -> [f64; 2] {
    let (st, ct) = state[0].sin_cos();
    let (sy, cy) = state[1].sin_cos();
    let a = ctx.a;
    [
        st,
        -2.0 * a * st * ct * cy + 2.0 * a * ctx.energy * st * st * sy - 2.0 * ctx.kappa * sy
            + 2.0 * lambda * st,
    ]
}

/// Equilibria, eigenvalues and manifold slope at the boundary saddles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddleData {
    pub equilibria: BoundaryEquilibria,
    /// Base of the fundamental domain.
    pub y0: f64,
    /// Eigenvalues at `S⁻`: `{1, −2κ}` for κ > 0, `{1, 2κ}` for κ < 0.
    pub left_eigenvalues: [f64; 2],
    /// Eigenvalues at `S⁺`.
    pub right_eigenvalues: [f64; 2],
    /// Slope `b` of the unstable tangent `(1, b)` at `S⁻`; the stable tangent
    /// at `S⁺` has the same slope.
    pub slope: f64,
}

fn equilibria_for(kappa: f64) -> (BoundaryEquilibria, f64) {
    if kappa > 0.0 {
        (BoundaryEquilibria { s_minus: 0.0, n_minus: -PI, s_plus: -PI, n_plus: 0.0 }, -PI)
    } else {
        (BoundaryEquilibria { s_minus: PI, n_minus: 0.0, s_plus: 0.0, n_plus: PI }, 0.0)
    }
}

fn slope_for(ctx: &ThetaContext, lambda: f64) -> f64 {
    if ctx.kappa > 0.0 {
        (lambda - ctx.a) / (0.5 + ctx.kappa)
    } else {
        (lambda + ctx.a) / (0.5 - ctx.kappa)
    }
}

pub fn saddle_data(ctx: &ThetaContext, lambda: f64) -> Result<SaddleData> {
    if ctx.kappa == 0.0 {
        return Err(Error::InvalidArgument("kappa must be nonzero".into()));
    }
    let (equilibria, y0) = equilibria_for(ctx.kappa);
    let k2 = 2.0 * ctx.kappa.abs();
    Ok(SaddleData {
        equilibria,
        y0,
        left_eigenvalues: [1.0, -k2],
        right_eigenvalues: [-1.0, k2],
        slope: slope_for(ctx, lambda),
    })
}

impl CylinderField for ThetaSystem {
    fn x_bounds(&self) -> (f64, f64) {
        (0.0, PI)
    }

    fn f(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= PI {
            0.0
        } else {
            x.sin()
        }
    }

    fn g(&self, x: f64, y: f64, mu: f64) -> f64 {
        theta_rhs([x, y], self, mu)[1]
    }

    fn y0(&self) -> f64 {
        equilibria_for(self.kappa).1
    }

    fn orientation(&self) -> Orientation {
        Orientation::Decreasing
    }

    fn equilibria(&self, _mu: f64) -> BoundaryEquilibria {
        equilibria_for(self.kappa).0
    }

    fn unstable_tangent(&self, mu: f64) -> [f64; 2] {
        let b = slope_for(self, mu);
        let n = (1.0 + b * b).sqrt();
        [1.0 / n, b / n]
    }

    fn stable_tangent(&self, mu: f64) -> [f64; 2] {
        let b = slope_for(self, mu);
        let n = (1.0 + b * b).sqrt();
        [-1.0 / n, -b / n]
    }

    fn attests_heteroclinic(&self) -> bool {
        self.a > 0.0 && (0.0..=1.0).contains(&self.energy)
    }
}

/// The theorem interval for `−λ_{N_Θ}` as an interval in λ, before widening.
///
/// For κ < 0 and `N_Θ ≥ 0` the inner bound is `½ − κ`. The line `Θ = π − θ`
/// is only an orbit at `E = 1`; for `E < 1` the term `2a(E − 1) sin³θ` pushes
/// the flow downward across it, so the sharper `½ − κ + a` can fail (at
/// `a = 0.2, E = 0.9` the connector sits at `−λ ≈ 1.187`). Dropping the
/// `2a cos²θ + 2aE sin²θ ≥ 0` terms instead gives a barrier for all `E ∈ [0, 1]`.
pub fn theorem_bracket(ctx: &ThetaContext, n_theta: i64) -> (f64, f64) {
    let a = ctx.a;
    let k = ctx.kappa;
    let m = (2 * n_theta + 1) as f64;
    // bounds on −λ
    let (lo, hi) = match (n_theta >= 0, k > 0.0) {
        (true, true) => (0.5 + k - a, m * (0.5 + k) + 2.0 * a),
        (true, false) => (0.5 - k, m * (0.5 - k) + 2.0 * a),
        (false, true) => (m * (0.5 + k) - 2.0 * a, -0.5 - k + a),
        (false, false) => (m * (0.5 - k) - 2.0 * a, -0.5 + k + a),
    };
    (-hi, -lo)
}

/// Theorem bracket widened by `margin` times its width (at least `margin`) on each end.
pub fn lambda_bracket_with_margin(ctx: &ThetaContext, n_theta: i64, margin: f64) -> (f64, f64) {
    let (lo, hi) = theorem_bracket(ctx, n_theta);
    let pad = margin * (hi - lo).max(1.0);
    (lo - pad, hi + pad)
}

pub fn lambda_bracket(ctx: &ThetaContext, n_theta: i64) -> (f64, f64) {
    lambda_bracket_with_margin(ctx, n_theta, BRACKET_MARGIN)
}

/// Locates `λ_{N_Θ}(E)`, the angular eigenvalue whose connector has winding `N_Θ`.
pub fn find_lambda(ctx: &ThetaContext, n_theta: i64, tol: f64) -> Result<ConnectorResult> {
    find_lambda_with_margin(ctx, n_theta, tol, BRACKET_MARGIN)
}

pub fn find_lambda_with_margin(ctx: &ThetaContext, n_theta: i64, tol: f64, margin: f64) -> Result<ConnectorResult> {
    if ctx.kappa == 0.0 {
        return Err(Error::InvalidArgument("kappa must be nonzero".into()));
    }
    if !(0.0..=1.0).contains(&ctx.energy) {
        return Err(Error::InvalidArgument(format!("energy {} outside [0, 1]", ctx.energy)));
    }
    let bracket = lambda_bracket_with_margin(ctx, n_theta, margin);
    find_connector(ctx, n_theta, bracket, tol)
}

/// Lifted angle `Θ(π)` of the connector with dictionary index `N`.
pub fn terminal_lift(big_n: i64, kappa: f64) -> f64 {
    let s = big_n.signum() as f64;
    let base = -s * (big_n.abs() - 1) as f64 * 2.0 * PI;
    if kappa > 0.0 {
        base - s * PI
    } else {
        base + PI - s * PI
    }
}

/// Terminal lift expected for the connector with winding `N_Θ`.
pub fn terminal_lift_for_winding(n_theta: i64, kappa: f64) -> f64 {
    terminal_lift(theta_winding_to_n(n_theta), kappa)
}
