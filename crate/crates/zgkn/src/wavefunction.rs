//! Amplitudes `R(r)`, `S(θ)` recovered from the phases of a bound state.
//!
//! The amplitude equations
//!
//! ```text
//! d ln R/dr = (r/ϖ) sin Ω − (λ/ϖ) cos Ω
//! d ln S/dθ = −a cos θ sin Θ − (aE sin θ − κ/sin θ) cos Θ
//! ```
//!
//! are integrated together with their phase equations, restarting the phase
//! from the connector at every stored orbit sample so that the unstable
//! directions of the phase flow never have room to grow.
//!
//! Normalization uses `dr` on both sheets and `sin θ dθ` on `[0, π]`, each
//! factor normalized separately. The spinor density is `|Ψ|² = 2R²S²`; the
//! `density` column is taken on the equatorial slice `θ = π/2`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::cylinder::{CylinderField, Orbit, TWO_PI};
use crate::integrator::{Options, Stepper};
use crate::omega_system::{omega_rhs_r, OmegaSystem};
use crate::solver::BoundState;
use crate::theta_system::ThetaSystem;
use crate::{Error, Result};

/// Angular distance from the poles below which `S` follows its power law.
pub const POLE_CUTOFF: f64 = 1e-3;

/// Phase, log-amplitude and its derivative sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmplitudeSamples {
    pub grid: Vec<f64>,
    pub phase: Vec<f64>,
    /// Log-amplitude, zero at the grid point nearest the reference position.
    pub ln_amp: Vec<f64>,
    pub d_ln_amp: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveProfile {
    pub energy: f64,
    pub lambda: f64,
    pub r: Vec<f64>,
    pub big_r: Vec<f64>,
    pub omega: Vec<f64>,
    pub theta: Vec<f64>,
    pub s: Vec<f64>,
    pub big_theta: Vec<f64>,
    /// `2R(r)²S(π/2)²`.
    pub density: Vec<f64>,
    /// `∫R² dr` of the unnormalized amplitude (with `R(0) = 1`).
    pub radial_norm: f64,
    /// `∫S² sin θ dθ` of the unnormalized amplitude (with `S(π/2) = 1`).
    pub angular_norm: f64,
    /// Location of the largest density on `r > 0`.
    pub peak_r: f64,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    if !grid.windows(2).all(|w| w[1] > w[0]) || !grid.iter().all(|g| g.is_finite()) {
        return Err(Error::InvalidArgument("grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// Walks the orbit segments that overlap the grid and integrates
/// `(phase, ln amplitude)` across each one from the stored phase sample.
fn integrate_along(
    nodes: &[(f64, f64)],
    grid: &[f64],
    phase_rhs: impl Fn(f64, f64) -> f64,
    ln_rhs: impl Fn(f64, f64) -> f64,
    cap: impl Fn(f64) -> f64,
    reference: f64,
) -> Result<AmplitudeSamples> {
    check_grid(grid)?;
    let (first, last) = (nodes[0].0, nodes[nodes.len() - 1].0);
    if grid[0] < first || grid[grid.len() - 1] > last {
        return Err(Error::InvalidArgument(format!(
            "grid [{}, {}] is not covered by the orbit [{first}, {last}]",
            grid[0],
            grid[grid.len() - 1]
        )));
    }
    let mut phase = Vec::with_capacity(grid.len());
    let mut ln_amp = Vec::with_capacity(grid.len());
    let mut gi = 0;
    let mut acc = 0.0;
    let start = nodes.partition_point(|n| n.0 <= grid[0]).saturating_sub(1);
    for w in nodes[start..].windows(2) {
        if gi == grid.len() {
            break;
        }
        let (s0, y0) = w[0];
        let s1 = w[1].0;
        let rhs = |s: f64, y: &[f64; 2]| [phase_rhs(s, y[0]), ln_rhs(s, y[0])];
        let mut stepper = Stepper::new(rhs, s0, [y0, acc], Options::default()).with_step_cap(|s, _| cap(s));
        while gi < grid.len() && grid[gi] < s1 {
            stepper.advance_to(grid[gi], |_, _| true)?;
            phase.push(stepper.y()[0]);
            ln_amp.push(stepper.y()[1]);
            gi += 1;
        }
        stepper.advance_to(s1, |_, _| true)?;
        acc = stepper.y()[1];
    }
    if gi < grid.len() {
        // remaining grid points coincide with the last node
        while gi < grid.len() {
            phase.push(nodes[nodes.len() - 1].1);
            ln_amp.push(acc);
            gi += 1;
        }
    }
    let iref = (0..grid.len())
        .min_by(|&i, &j| (grid[i] - reference).abs().total_cmp(&(grid[j] - reference).abs()))
        .expect("nonempty grid");
    let base = ln_amp[iref];
    for v in &mut ln_amp {
        *v -= base;
    }
    let d_ln_amp = grid.iter().zip(&phase).map(|(&s, &p)| ln_rhs(s, p)).collect();
    Ok(AmplitudeSamples { grid: grid.to_vec(), phase, ln_amp, d_ln_amp })
}

/// `d ln R/dr`.
pub fn ln_r_rhs(r: f64, omega: f64, a: f64, lambda: f64) -> f64 {
    let w = (r * r + a * a).sqrt();
    let (so, co) = omega.sin_cos();
    (r / w) * so - (lambda / w) * co
}

/// `d ln S/dθ`.
pub fn ln_s_rhs(theta: f64, big_theta: f64, ctx: &ThetaSystem) -> f64 {
    let (st, ct) = theta.sin_cos();
    let (sy, cy) = big_theta.sin_cos();
    -ctx.a * ct * sy - (ctx.a * ctx.energy * st - ctx.kappa / st) * cy
}

/// `d Θ/dθ`.
fn theta_phase_rhs(theta: f64, big_theta: f64, ctx: &ThetaSystem, lambda: f64) -> f64 {
    let (st, ct) = theta.sin_cos();
    let (sy, cy) = big_theta.sin_cos();
    -2.0 * ctx.a * ct * cy + 2.0 * (ctx.a * ctx.energy * st - ctx.kappa / st) * sy + 2.0 * lambda
}

/// `ln R` on `grid` along a radial connector orbit (samples carry `τ = r/a`).
pub fn integrate_ln_r(ctx: &OmegaSystem, energy: f64, orbit: &Orbit, grid: &[f64]) -> Result<AmplitudeSamples> {
    if orbit.samples.len() < 2 {
        return Err(Error::InvalidArgument("orbit has fewer than two samples".into()));
    }
    let a = ctx.a;
    let nodes: Vec<(f64, f64)> = orbit.samples.iter().map(|s| (a * s.tau, s.y)).collect();
    integrate_along(
        &nodes,
        grid,
        |r, om| omega_rhs_r(r, om, ctx, energy),
        |r, om| ln_r_rhs(r, om, a, ctx.lambda),
        |r| 0.5 * (r * r + a * a).sqrt(),
        0.0,
    )
}

/// `ln S` on `grid ⊂ (0, π)` along an angular connector orbit.
pub fn integrate_ln_s(ctx: &ThetaSystem, lambda: f64, orbit: &Orbit, grid: &[f64]) -> Result<AmplitudeSamples> {
    if orbit.samples.len() < 2 {
        return Err(Error::InvalidArgument("orbit has fewer than two samples".into()));
    }
    let nodes: Vec<(f64, f64)> = orbit.samples.iter().map(|s| (s.x, s.y)).collect();
    integrate_along(
        &nodes,
        grid,
        |t, y| theta_phase_rhs(t, y, ctx, lambda),
        |t, y| ln_s_rhs(t, y, ctx),
        |t| 0.25 * t.sin().max(1e-12),
        FRAC_PI_2,
    )
}

/// Symmetric radial grid with `2n + 1` points on `[−50/η, 50/η]`, clustered near `r = 0`
/// on the ring scale `a`.
pub fn radial_grid(a: f64, energy: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("grid size must be positive".into()));
    }
    let eta = (1.0 - energy * energy).sqrt();
    if !(eta > 0.0) || !(a > 0.0) {
        return Err(Error::InvalidArgument(format!("need 0 < E < 1 and a > 0 (E = {energy}, a = {a})")));
    }
    let extent = 50.0 / eta;
    let ratio = 1.0 + extent / a;
    let half: Vec<f64> = (1..=n).map(|j| a * (ratio.powf(j as f64 / n as f64) - 1.0)).collect();
    let mut g: Vec<f64> = half.iter().rev().map(|r| -r).collect();
    g.push(0.0);
    g.extend(half);
    Ok(g)
}

/// Interior angular grid: `2n − 1` uniform points on `[ε, π − ε]`, centered on `π/2`.
pub fn angular_grid(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument("angular grid needs n >= 2".into()));
    }
    let m = 2 * n - 1;
    let h = (PI - 2.0 * POLE_CUTOFF) / (m - 1) as f64;
    Ok((0..m).map(|i| if i == n - 1 { FRAC_PI_2 } else { POLE_CUTOFF + h * i as f64 }).collect())
}

/// `∫ f` from samples of `ln f` and `d ln f`, by the end-corrected trapezoid
/// rule (exact for cubics).
fn integrate_exp(x: &[f64], ln_f: &[f64], d_ln_f: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..x.len().saturating_sub(1) {
        let h = x[i + 1] - x[i];
        let (f0, f1) = (ln_f[i].exp(), ln_f[i + 1].exp());
        let (d0, d1) = (f0 * d_ln_f[i], f1 * d_ln_f[i + 1]);
        total += 0.5 * h * (f0 + f1) + h * h / 12.0 * (d0 - d1);
    }
    total
}

fn peak_location(r: &[f64], ln_r: &[f64]) -> f64 {
    let mut best = None;
    for i in 0..r.len() {
        if r[i] > 0.0 && best.is_none_or(|j: usize| ln_r[i] > ln_r[j]) {
            best = Some(i);
        }
    }
    let Some(i) = best else { return f64::NAN };
    if i == 0 || i + 1 >= r.len() || r[i - 1] <= 0.0 {
        return r[i];
    }
    // vertex of the parabola through three neighbours
    let (x0, x1, x2) = (r[i - 1], r[i], r[i + 1]);
    let (y0, y1, y2) = (ln_r[i - 1], ln_r[i], ln_r[i + 1]);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let c2 = (d12 - d01) / (x2 - x0);
    if c2 >= 0.0 {
        return x1;
    }
    let c1 = d01 - c2 * (x0 + x1);
    (-c1 / (2.0 * c2)).clamp(x0, x2)
}

/// Normalizes the amplitudes and forms the equatorial density.
pub fn assemble_density(
    energy: f64,
    lambda: f64,
    kappa: f64,
    pole_phases: (f64, f64),
    radial: &AmplitudeSamples,
    angular: &AmplitudeSamples,
) -> Result<WaveProfile> {
    let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
    if !finite(&radial.ln_amp) || !finite(&angular.ln_amp) || !finite(&radial.d_ln_amp) || !finite(&angular.d_ln_amp) {
        return Err(Error::NonFinite { t: f64::NAN, last_good: Vec::new() });
    }
    let radial_norm = integrate_exp(
        &radial.grid,
        &radial.ln_amp.iter().map(|v| 2.0 * v).collect::<Vec<_>>(),
        &radial.d_ln_amp.iter().map(|v| 2.0 * v).collect::<Vec<_>>(),
    );

    // S² sin θ on the interior, power law `S ∝ sin^{|κ|}` toward both poles
    let t = &angular.grid;
    let ln_w: Vec<f64> = t.iter().zip(&angular.ln_amp).map(|(&th, &l)| 2.0 * l + th.sin().ln()).collect();
    let d_ln_w: Vec<f64> =
        t.iter().zip(&angular.d_ln_amp).map(|(&th, &d)| 2.0 * d + th.cos() / th.sin()).collect();
    let p = kappa.abs();
    let tail = |theta_end: f64, ln_s_end: f64| {
        let e = theta_end.min(PI - theta_end);
        (2.0 * ln_s_end).exp() * e * e / (2.0 * p + 2.0)
    };
    let n = t.len();
    let angular_norm = integrate_exp(t, &ln_w, &d_ln_w)
        + tail(t[0], angular.ln_amp[0])
        + tail(t[n - 1], angular.ln_amp[n - 1]);

    let big_r: Vec<f64> = radial.ln_amp.iter().map(|l| l.exp() / radial_norm.sqrt()).collect();
    let mut theta = vec![0.0];
    theta.extend_from_slice(t);
    theta.push(PI);
    let mut s = vec![0.0];
    s.extend(angular.ln_amp.iter().map(|l| l.exp() / angular_norm.sqrt()));
    s.push(0.0);
    let mut big_theta = vec![pole_phases.0];
    big_theta.extend_from_slice(&angular.phase);
    big_theta.push(pole_phases.1);

    let mid = t.iter().position(|&x| x == FRAC_PI_2).unwrap_or(n / 2);
    let s_eq = angular.ln_amp[mid].exp() / angular_norm.sqrt();
    let density: Vec<f64> = big_r.iter().map(|r| 2.0 * r * r * s_eq * s_eq).collect();
    let peak_r = peak_location(&radial.grid, &radial.ln_amp);
    if !finite(&density) {
        return Err(Error::NonFinite { t: f64::NAN, last_good: Vec::new() });
    }
    Ok(WaveProfile {
        energy,
        lambda,
        r: radial.grid.clone(),
        big_r,
        omega: radial.phase.clone(),
        theta,
        s,
        big_theta,
        density,
        radial_norm,
        angular_norm,
        peak_r,
    })
}

/// Radial profile on `2n + 1` points and angular profile on `2n + 1` points
/// (the poles included).
pub fn wave_profile(state: &BoundState, n: usize) -> Result<WaveProfile> {
    let omega_ctx = OmegaSystem::new(&state.params, state.lambda);
    let theta_ctx = ThetaSystem::new(&state.params, state.energy);
    let rg = radial_grid(state.params.a, state.energy, n)?;
    let tg = angular_grid(n)?;
    let radial = integrate_ln_r(&omega_ctx, state.energy, &state.omega.orbit, &rg)?;
    let angular = integrate_ln_s(&theta_ctx, state.lambda, &state.theta.orbit, &tg)?;
    let eq = theta_ctx.equilibria(state.lambda);
    let poles = (eq.s_minus, eq.s_plus - TWO_PI * state.target.n_theta as f64);
    assemble_density(state.energy, state.lambda, state.params.kappa, poles, &radial, &angular)
}
