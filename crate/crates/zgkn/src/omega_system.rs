//! The radial Prüfer flow and the search for `E_N(λ)`.
//!
//! On the compactified cylinder `[−π/2, π/2] × S¹` (with `r = a tan ξ`) the flow is
//!
//! ```text
//! ξ̇ = cos²ξ
//! Ω̇ = 2a sin ξ cos Ω + 2λ cos ξ sin Ω + 2γ sin ξ cos ξ + 2κ cos²ξ − 2aE
//! ```
//!
//! and in the radial coordinate it reads
//!
//! ```text
//! dΩ/dr = 2(r/ϖ) cos Ω + 2(λ/ϖ) sin Ω + 2(aκ + γr)/ϖ² − 2E,   ϖ = √(r² + a²).
//! ```
//!
//! The boundary equilibria are saddle-nodes. Their approach rate in τ is
//! proportional to `a`, so orbits are integrated in `r` over a finite window
//! `[−R, R]` whose size is set by the decay length `1/√(1−E²)`. The family
//! parameter is `E`, and windings grow with `E`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::cylinder::{
    classify_left, classify_right, find_connector, BoundaryEquilibria, ConnectorResult,
    CylinderField, Direction, Orbit, OrbitSample, Orientation, TWO_PI,
};
use crate::integrator::{Options, Stepper};
use crate::params::ModelParams;
use crate::{Error, Result};

pub const E_FLOOR: f64 = 1e-6;
pub const E_CEIL: f64 = 1.0 - 1e-6;

/// Radial flow at fixed `(a, γ, κ, λ)`; the parameter is `E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmegaSystem {
    pub a: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub lambda: f64,
    /// Lower end of the energy search interval.
    pub e_floor: f64,
    /// Upper end of the energy search interval.
    pub e_ceil: f64,
}

pub type OmegaContext = OmegaSystem;

impl OmegaSystem {
    pub fn new(params: &ModelParams, lambda: f64) -> Self {
        Self {
            a: params.a,
            gamma: params.gamma,
            kappa: params.kappa,
            lambda,
            e_floor: E_FLOOR,
            e_ceil: E_CEIL,
        }
    }

    pub fn with_search_interval(mut self, e_floor: f64, e_ceil: f64) -> Self {
        self.e_floor = e_floor;
        self.e_ceil = e_ceil;
        self
    }

    /// Whether λ satisfies the sign-appropriate bound that guarantees connectors.
    pub fn lambda_admissible(&self) -> bool {
        let k = self.kappa.abs();
        if self.lambda < 0.0 {
            self.lambda <= -0.5 - k + self.a
        } else {
            self.lambda >= 0.5 + k - self.a
        }
    }

    /// Half-width of the radial integration window, `max(50, 50/√(1−E²))`.
    pub fn r_max(energy: f64) -> f64 {
        let eta = (1.0 - energy * energy).max(0.0).sqrt();
        (50.0 / eta).max(50.0)
    }

    /// Radius where the two center manifolds are compared.
    pub fn match_radius(&self, energy: f64) -> f64 {
        (1.0 / eta(energy)).max(10.0 * self.a).min(Self::r_max(energy))
    }
}

/// `(dξ/dτ, dΩ/dτ)`.
pub fn omega_rhs_tau(state: [f64; 2], ctx: &OmegaContext, energy: f64) -> [f64; 2] {
    let (sx, cx) = state[0].sin_cos();
    let (so, co) = state[1].sin_cos();
    let a = ctx.a;
    [
        cx * cx,
        2.0 * a * sx * co + 2.0 * ctx.lambda * cx * so + 2.0 * ctx.gamma * sx * cx
            + 2.0 * ctx.kappa * cx * cx
            - 2.0 * a * energy,
    ]
}

/// `dΩ/dr`.
pub fn omega_rhs_r(r: f64, omega: f64, ctx: &OmegaContext, energy: f64) -> f64 {
    let w2 = r * r + ctx.a * ctx.a;
    let w = w2.sqrt();
    let (so, co) = omega.sin_cos();
    2.0 * (r / w) * co + 2.0 * (ctx.lambda / w) * so + 2.0 * (ctx.a * ctx.kappa + ctx.gamma * r) / w2
        - 2.0 * energy
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddleNodeData {
    pub equilibria: BoundaryEquilibria,
    pub y0: f64,
    /// `{0, −2a√(1−E²)}` at `S⁻`.
    pub left_eigenvalues: [f64; 2],
    /// `{0, 2a√(1−E²)}` at `S⁺`.
    pub right_eigenvalues: [f64; 2],
    /// Slope of the zero-eigenvalue direction `(1, m)` at `S⁻`.
    pub center_slope: f64,
    /// Slope of the zero-eigenvalue direction at `S⁺`.
    pub right_center_slope: f64,
}

fn equilibria_at(energy: f64) -> BoundaryEquilibria {
    let c = energy.clamp(-1.0, 1.0).acos();
    BoundaryEquilibria { s_minus: -PI + c, n_minus: -PI - c, s_plus: -c, n_plus: c }
}

fn eta(energy: f64) -> f64 {
    (1.0 - energy * energy).max(0.0).sqrt()
}

fn left_slope(ctx: &OmegaContext, energy: f64) -> f64 {
    let h = eta(energy);
    (-ctx.gamma - ctx.lambda * h) / (ctx.a * h)
}

fn right_slope(ctx: &OmegaContext, energy: f64) -> f64 {
    let h = eta(energy);
    (ctx.gamma - ctx.lambda * h) / (ctx.a * h)
}

pub fn saddle_node_data(ctx: &OmegaContext, energy: f64) -> Result<SaddleNodeData> {
    if !(energy > 0.0 && energy < 1.0) {
        return Err(Error::InvalidArgument(format!("energy {energy} outside (0, 1)")));
    }
    let rate = 2.0 * ctx.a * eta(energy);
    Ok(SaddleNodeData {
        equilibria: equilibria_at(energy),
        y0: -1.5 * PI,
        left_eigenvalues: [0.0, -rate],
        right_eigenvalues: [0.0, rate],
        center_slope: left_slope(ctx, energy),
        right_center_slope: right_slope(ctx, energy),
    })
}

fn unit(slope: f64, sign: f64) -> [f64; 2] {
    let n = (1.0 + slope * slope).sqrt();
    [sign / n, sign * slope / n]
}

impl OmegaSystem {
    /// Integrates the r-form from `r_start` to `r_end` and returns the samples
    /// (ordered by increasing r) and the final lift.
    fn trace_r(&self, energy: f64, r_start: f64, omega_start: f64, r_end: f64) -> Result<(Vec<OrbitSample>, f64)> {
        if !(energy > 0.0 && energy < 1.0) {
            return Err(Error::InvalidArgument(format!("energy {energy} outside (0, 1)")));
        }
        let a = self.a;
        let rhs = |r: f64, y: &[f64; 1]| [omega_rhs_r(r, y[0], self, energy)];
        let mut stepper = Stepper::new(rhs, r_start, [omega_start], Options::default())
            .with_step_cap(move |r, _| 0.5 * (r * r + a * a).sqrt());
        let sample = |r: f64, y: f64| {
            let w2 = r * r + a * a;
            OrbitSample {
                tau: r / a,
                x: (r / a).atan(),
                y,
                slope: omega_rhs_r(r, y, self, energy) * w2 / a,
            }
        };
        let mut samples = vec![sample(r_start, omega_start)];
        stepper.advance_to(r_end, |r, y| {
            samples.push(sample(r, y[0]));
            true
        })?;
        if r_end < r_start {
            samples.reverse();
        }
        samples.dedup_by(|later, kept| later.x <= kept.x);
        Ok((samples, stepper.y()[0]))
    }
}

impl CylinderField for OmegaSystem {
    fn x_bounds(&self) -> (f64, f64) {
        (-FRAC_PI_2, FRAC_PI_2)
    }

    fn f(&self, x: f64) -> f64 {
        if x <= -FRAC_PI_2 || x >= FRAC_PI_2 {
            0.0
        } else {
            let c = x.cos();
            c * c
        }
    }

    fn g(&self, x: f64, y: f64, mu: f64) -> f64 {
        let x = x.clamp(-FRAC_PI_2, FRAC_PI_2);
        // cos(±π/2) is not exactly zero in floating point
        let (sx, cx) = if x.abs() == FRAC_PI_2 { (x.signum(), 0.0) } else { x.sin_cos() };
        let (so, co) = y.sin_cos();
        2.0 * self.a * sx * co + 2.0 * self.lambda * cx * so + 2.0 * self.gamma * sx * cx
            + 2.0 * self.kappa * cx * cx
            - 2.0 * self.a * mu
    }

    fn y0(&self) -> f64 {
        -1.5 * PI
    }

    fn orientation(&self) -> Orientation {
        Orientation::Increasing
    }

    fn equilibria(&self, mu: f64) -> BoundaryEquilibria {
        equilibria_at(mu)
    }

    fn unstable_tangent(&self, mu: f64) -> [f64; 2] {
        unit(left_slope(self, mu), 1.0)
    }

    fn stable_tangent(&self, mu: f64) -> [f64; 2] {
        unit(right_slope(self, mu), -1.0)
    }

    /// Center manifold of `S⁻`, followed in r from `−R` to `R`.
    fn trace_unstable(&self, mu: f64) -> Result<Orbit> {
        let r_max = Self::r_max(mu);
        let h = eta(mu);
        let eq = equilibria_at(mu);
        let start = eq.s_minus + (-self.gamma - self.lambda * h) / (h * r_max);
        let (samples, end) = self.trace_r(mu, -r_max, start, r_max)?;
        let x_end = (r_max / self.a).atan();
        Ok(Orbit {
            samples,
            direction: Direction::Forward,
            origin_shift: 0,
            terminal: Some(classify_right(self, mu, x_end, end)),
        })
    }

    /// Center manifold of `S⁺ − 2π·shift`, followed in r from `R` back to `−R`.
    fn trace_stable(&self, mu: f64, shift: i64) -> Result<Orbit> {
        let r_max = Self::r_max(mu);
        let h = eta(mu);
        let eq = equilibria_at(mu);
        let start = eq.s_plus - TWO_PI * shift as f64 + (self.lambda * h - self.gamma) / (h * r_max);
        let (samples, end) = self.trace_r(mu, r_max, start, -r_max)?;
        let x_end = (-r_max / self.a).atan();
        Ok(Orbit {
            samples,
            direction: Direction::Backward,
            origin_shift: shift,
            terminal: Some(classify_left(self, mu, x_end, end)),
        })
    }

    fn area_chart(&self, s: &OrbitSample) -> (f64, f64) {
        let r = self.a * s.tau;
        let w2 = r * r + self.a * self.a;
        (r, s.slope * self.a / w2)
    }

    /// Joined at `r_m = max(1/η, 10a)`: past the ring, where the backward
    /// stable manifold is still contracting and the forward shot has not yet
    /// separated from the connector.
    fn match_point(&self, mu: f64) -> f64 {
        (self.match_radius(mu) / self.a).atan()
    }

    fn area_window(&self, mu: f64) -> (f64, f64) {
        let rm = self.match_radius(mu);
        (0.1 * rm, rm)
    }

    fn attests_heteroclinic(&self) -> bool {
        self.a > 0.0 && self.a < crate::params::a_max() && self.gamma > -0.5 && self.gamma < 0.0
    }
}

/// Locates `E_{N_Ω}(λ)`, the energy whose radial connector has winding `N_Ω`.
pub fn find_e(ctx: &OmegaContext, n_omega: i64, tol: f64) -> Result<ConnectorResult> {
    if n_omega < 0 {
        return Err(Error::Inadmissible(format!("no radial connectors with winding {n_omega} < 0")));
    }
    if ctx.lambda > 0.0 && n_omega < 1 {
        return Err(Error::Inadmissible(
            "for lambda > 0 the radial winding is at least 1".into(),
        ));
    }
    find_connector(ctx, n_omega, (ctx.e_floor, ctx.e_ceil), tol)
}

/// Largest `Ω̇` found on the horizontal barrier line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BarrierReport {
    /// `π/2` for λ < 0, `−π/2` for λ > 0.
    pub line: f64,
    pub max_rate: f64,
    pub xi_at_max: f64,
    pub holds: bool,
    pub lambda_admissible: bool,
}

/// Samples `Ω̇` along `Ω = π/2` (λ < 0) or `Ω = −π/2` (λ > 0) on a uniform ξ grid.
pub fn barrier_check(ctx: &OmegaContext, energy: f64, grid: usize) -> BarrierReport {
    let line = if ctx.lambda < 0.0 { FRAC_PI_2 } else { -FRAC_PI_2 };
    let grid = grid.max(2);
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..grid {
        let xi = -FRAC_PI_2 + PI * i as f64 / (grid - 1) as f64;
        let v = ctx.g(xi, line, energy);
        if v > best.0 {
            best = (v, xi);
        }
    }
    BarrierReport {
        line,
        max_rate: best.0,
        xi_at_max: best.1,
        holds: best.0 < 0.0,
        lambda_admissible: ctx.lambda_admissible(),
    }
}

/// Lifted angle `Ω(∞) = −2πM − arccos E` of a radial connector.
pub fn terminal_lift(n_omega: i64, energy: f64) -> f64 {
    -TWO_PI * n_omega as f64 - energy.acos()
}
