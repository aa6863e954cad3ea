//! Flows on a finite cylinder `[x₋, x₊] × S¹`.
//!
//! A field is described by an axis speed `f(x)` that vanishes exactly at the
//! two boundary circles and an angular speed `g(x, y, μ)`. Each boundary
//! circle carries a saddle `S` and a node `N`. Trajectories are followed on
//! the universal cover (no reduction of `y` mod 2π), so the lift shift at
//! which the unstable manifold of `S⁻` arrives on the right boundary is an
//! integer: the winding number. Connectors `S⁻ → S⁺ − 2πk` are located by
//! bisection on the family parameter, using that the terminal lift is
//! monotone in `μ`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::integrator::{Options, Stepper};
use crate::{Error, Result};

pub const TWO_PI: f64 = 2.0 * PI;

/// Distance from the saddle at which manifolds are launched.
pub const LAUNCH_OFFSET: f64 = 1e-6;
/// Width of the band next to the boundary in which orbits are classified.
pub const TERMINAL_BAND: f64 = 1e-3;

/// How winding numbers respond to an increase of the field's own parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orientation {
    /// Winding is nondecreasing in the field parameter.
    Increasing,
    /// Winding is nonincreasing in the field parameter.
    Decreasing,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Increasing => 1.0,
            Orientation::Decreasing => -1.0,
        }
    }
}

/// Angular positions of the four boundary equilibria in the fundamental domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryEquilibria {
    pub s_minus: f64,
    pub n_minus: f64,
    pub s_plus: f64,
    pub n_plus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EquilibriumKind {
    SMinus,
    NMinus,
    SPlus,
    NPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// Unstable manifold of the left saddle, integrated forward.
    Forward,
    /// Stable manifold of a right saddle lift, integrated backward.
    Backward,
}

/// A boundary equilibrium lift `e − 2π·shift` and how close the orbit came to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Terminal {
    pub kind: EquilibriumKind,
    pub shift: i64,
    /// Final lifted angle of the orbit.
    pub lift: f64,
    /// Final axis coordinate of the orbit.
    pub x: f64,
    /// |lift − (e − 2π·shift)|.
    pub snap_distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitSample {
    pub tau: f64,
    pub x: f64,
    pub y: f64,
    /// dy/dx along the orbit.
    pub slope: f64,
}

/// A lifted trajectory. Samples are stored with `x` strictly increasing
/// regardless of the integration direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Orbit {
    pub samples: Vec<OrbitSample>,
    pub direction: Direction,
    /// Lift shift of the equilibrium the orbit was launched from.
    pub origin_shift: i64,
    pub terminal: Option<Terminal>,
}

impl Orbit {
    /// Final lifted angle reached by the integration.
    pub fn end_lift(&self) -> Option<f64> {
        self.terminal.map(|t| t.lift)
    }

    /// Largest jump in the lift between consecutive samples.
    pub fn max_lift_jump(&self) -> f64 {
        self.samples.windows(2).map(|w| (w[1].y - w[0].y).abs()).fold(0.0, f64::max)
    }

    pub fn x_strictly_increasing(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].x > w[0].x)
    }

    /// Lift at axis position `x` by cubic Hermite interpolation of the samples.
    pub fn y_at(&self, x: f64) -> Option<f64> {
        let xs: Vec<f64> = self.samples.iter().map(|s| s.x).collect();
        let ys: Vec<f64> = self.samples.iter().map(|s| s.y).collect();
        let ds: Vec<f64> = self.samples.iter().map(|s| s.slope).collect();
        Hermite::new(&xs, &ys, &ds).eval(x)
    }
}

/// A connector parameter with the orbit computed there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectorResult {
    pub mu_star: f64,
    /// Unstable manifold up to the matching point, continued by the stable
    /// manifold of the target saddle lift.
    pub orbit: Orbit,
    /// Lift difference of the two manifolds at the matching point.
    pub matching_gap: f64,
    /// Where the plain forward shot at `mu_star` ended.
    pub shot_terminal: Option<Terminal>,
    pub winding: i64,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// A two-dimensional flow on a finite cylinder with a one-parameter family.
pub trait CylinderField: Sync {
    fn x_bounds(&self) -> (f64, f64);
    /// Axis speed, zero on both boundaries and positive inside.
    fn f(&self, x: f64) -> f64;
    /// Angular speed.
    fn g(&self, x: f64, y: f64, mu: f64) -> f64;
    /// Base `y₀` of the fundamental domain `[y₀, y₀ + 2π)`.
    fn y0(&self) -> f64;
    fn orientation(&self) -> Orientation;
    fn equilibria(&self, mu: f64) -> BoundaryEquilibria;
    /// Unit tangent of the unstable manifold at `S⁻`, pointing into the interior.
    fn unstable_tangent(&self, mu: f64) -> [f64; 2];
    /// Unit tangent of the stable manifold at `S⁺`, pointing into the interior.
    fn stable_tangent(&self, mu: f64) -> [f64; 2];

    /// Time span for τ-integration.
    fn span(&self) -> f64 {
        60.0
    }

    fn integrator_options(&self) -> Options {
        Options::default()
    }

    /// Unstable manifold of `S⁻` in the fundamental domain.
    fn trace_unstable(&self, mu: f64) -> Result<Orbit> {
        integrate_unstable(self, mu, self.unstable_tangent(mu), LAUNCH_OFFSET, self.span())
    }

    /// Stable manifold of `S⁺ − 2π·shift`, integrated backward.
    fn trace_stable(&self, mu: f64, shift: i64) -> Result<Orbit> {
        integrate_stable(self, mu, shift, self.stable_tangent(mu), LAUNCH_OFFSET, self.span())
    }

    /// Coordinate and slope used when integrating the signed area.
    fn area_chart(&self, s: &OrbitSample) -> (f64, f64) {
        (s.x, s.slope)
    }

    /// Axis position where unstable and stable manifolds are joined.
    fn match_point(&self, _mu: f64) -> f64 {
        let (lo, hi) = self.x_bounds();
        0.5 * (lo + hi)
    }

    /// Range of the area coordinate over which the signed area is evaluated.
    fn area_window(&self, _mu: f64) -> (f64, f64) {
        let (lo, hi) = self.x_bounds();
        (lo + TERMINAL_BAND, hi - TERMINAL_BAND)
    }

    /// True when the parameters in use imply that every non-boundary orbit
    /// is heteroclinic (assumption (e)); this cannot be sampled.
    fn attests_heteroclinic(&self) -> bool {
        false
    }
}

fn snap(
    lift: f64,
    x: f64,
    candidates: [(EquilibriumKind, f64); 2],
) -> Terminal {
    let mut best: Option<Terminal> = None;
    for (kind, e) in candidates {
        let shift = ((e - lift) / TWO_PI).round() as i64;
        let d = (lift - (e - TWO_PI * shift as f64)).abs();
        if best.is_none_or(|b| d < b.snap_distance) {
            best = Some(Terminal { kind, shift, lift, x, snap_distance: d });
        }
    }
    best.expect("two candidates")
}

/// Classifies the right end of an orbit by the nearest of `S⁺ − 2πk`, `N⁺ − 2πk`.
pub fn classify_right<F: CylinderField + ?Sized>(field: &F, mu: f64, x: f64, lift: f64) -> Terminal {
    let eq = field.equilibria(mu);
    snap(lift, x, [(EquilibriumKind::SPlus, eq.s_plus), (EquilibriumKind::NPlus, eq.n_plus)])
}

/// Classifies the left end of an orbit by the nearest of `S⁻ − 2πk`, `N⁻ − 2πk`.
pub fn classify_left<F: CylinderField + ?Sized>(field: &F, mu: f64, x: f64, lift: f64) -> Terminal {
    let eq = field.equilibria(mu);
    snap(lift, x, [(EquilibriumKind::SMinus, eq.s_minus), (EquilibriumKind::NMinus, eq.n_minus)])
}

fn slope_of<F: CylinderField + ?Sized>(field: &F, x: f64, y: f64, mu: f64) -> f64 {
    let fx = field.f(x);
    if fx > 0.0 {
        field.g(x, y, mu) / fx
    } else {
        f64::NAN
    }
}

fn trace_tau<F: CylinderField + ?Sized>(
    field: &F,
    mu: f64,
    start: [f64; 2],
    t_end: f64,
) -> Result<(Vec<OrbitSample>, [f64; 2])> {
    let (x_lo, x_hi) = field.x_bounds();
    if !(start[0] > x_lo && start[0] < x_hi) {
        return Err(Error::InvalidArgument(format!(
            "launch point x = {} is not inside ({x_lo}, {x_hi})",
            start[0]
        )));
    }
    let rhs = |_t: f64, s: &[f64; 2]| [field.f(s[0]), field.g(s[0], s[1], mu)];
    let mut stepper = Stepper::new(rhs, 0.0, start, field.integrator_options());
    let mut samples = vec![OrbitSample {
        tau: 0.0,
        x: start[0],
        y: start[1],
        slope: slope_of(field, start[0], start[1], mu),
    }];
    let forward = t_end > 0.0;
    stepper.advance_to(t_end, |t, s| {
        let last = samples.last().expect("nonempty");
        let moved = if forward { s[0] > last.x } else { s[0] < last.x };
        if moved && s[0] > x_lo && s[0] < x_hi {
            samples.push(OrbitSample { tau: t, x: s[0], y: s[1], slope: slope_of(field, s[0], s[1], mu) });
        }
        true
    })?;
    Ok((samples, *stepper.y()))
}

/// Integrates the unstable manifold of `S⁻` launched at `S⁻ + offset·direction`
/// over `τ ∈ [0, span]` and classifies where it lands on the right boundary.
pub fn integrate_unstable<F: CylinderField + ?Sized>(
    field: &F,
    mu: f64,
    direction: [f64; 2],
    offset: f64,
    span: f64,
) -> Result<Orbit> {
    if offset == 0.0 {
        return Err(Error::StartAtEquilibrium);
    }
    if !(offset > 0.0) {
        return Err(Error::InvalidArgument(format!("offset must be positive, got {offset}")));
    }
    let (x_lo, x_hi) = field.x_bounds();
    let eq = field.equilibria(mu);
    let start = [x_lo + offset * direction[0], eq.s_minus + offset * direction[1]];
    let (samples, end) = trace_tau(field, mu, start, span)?;
    if end[0] < x_hi - TERMINAL_BAND {
        return Err(Error::Unclassified { x: end[0], x_plus: x_hi });
    }
    Ok(Orbit {
        samples,
        direction: Direction::Forward,
        origin_shift: 0,
        terminal: Some(classify_right(field, mu, end[0], end[1])),
    })
}

/// Integrates the stable manifold of `S⁺ − 2π·shift` backward in τ and
/// classifies where it lands on the left boundary.
pub fn integrate_stable<F: CylinderField + ?Sized>(
    field: &F,
    mu: f64,
    shift: i64,
    direction: [f64; 2],
    offset: f64,
    span: f64,
) -> Result<Orbit> {
    if offset == 0.0 {
        return Err(Error::StartAtEquilibrium);
    }
    if !(offset > 0.0) {
        return Err(Error::InvalidArgument(format!("offset must be positive, got {offset}")));
    }
    let (x_lo, x_hi) = field.x_bounds();
    let eq = field.equilibria(mu);
    let start = [
        x_hi + offset * direction[0],
        eq.s_plus - TWO_PI * shift as f64 + offset * direction[1],
    ];
    let (mut samples, end) = trace_tau(field, mu, start, -span)?;
    if end[0] > x_lo + TERMINAL_BAND {
        return Err(Error::Unclassified { x: end[0], x_plus: x_lo });
    }
    samples.reverse();
    Ok(Orbit {
        samples,
        direction: Direction::Backward,
        origin_shift: shift,
        terminal: Some(classify_left(field, mu, end[0], end[1])),
    })
}

/// Winding number of a classified orbit: the lift shift of its right end
/// minus the lift shift of its left end.
pub fn winding_of(orbit: &Orbit) -> Result<i64> {
    let t = orbit.terminal.ok_or(Error::Unclassified { x: f64::NAN, x_plus: f64::NAN })?;
    Ok(match orbit.direction {
        Direction::Forward => t.shift - orbit.origin_shift,
        Direction::Backward => orbit.origin_shift - t.shift,
    })
}

/// True when the unstable manifold at `mu` lands strictly below `S⁺ − 2π·target`,
/// i.e. its winding is at least `target + 1`.
fn passes_target<F: CylinderField + ?Sized>(field: &F, orbit: &Orbit, mu: f64, target: i64) -> Result<bool> {
    let lift = orbit.end_lift().ok_or(Error::Unclassified { x: f64::NAN, x_plus: f64::NAN })?;
    let s_plus = field.equilibria(mu).s_plus;
    Ok(lift < s_plus - TWO_PI * target as f64)
}

/// Bisection budget for a bracket of the given width.
pub fn bisection_budget(width: f64, tol: f64) -> usize {
    ((width / tol).log2().ceil().max(0.0) as usize) + 2
}

/// Locates the parameter at which the winding of the unstable manifold jumps
/// from `target` to `target + 1` inside `bracket = (lo, hi)`.
pub fn find_connector<F: CylinderField + ?Sized>(
    field: &F,
    target_winding: i64,
    bracket: (f64, f64),
    tol: f64,
) -> Result<ConnectorResult> {
    let (lo, hi) = bracket;
    if !(lo < hi) || !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("bad bracket [{lo}, {hi}] or tol {tol}")));
    }
    // Work in s = ±μ so that the winding is nondecreasing in s.
    let sgn = field.orientation().sign();
    let (mut s_lo, mut s_hi) = if sgn > 0.0 { (lo, hi) } else { (-hi, -lo) };
    let eval = |s: f64| -> Result<(Orbit, bool)> {
        let mu = sgn * s;
        let orbit = field.trace_unstable(mu)?;
        let pass = passes_target(field, &orbit, mu, target_winding)?;
        Ok((orbit, pass))
    };
    let (orbit_lo, pass_lo) = eval(s_lo)?;
    let (orbit_hi, pass_hi) = eval(s_hi)?;
    if pass_lo || !pass_hi {
        return Err(Error::NoJump {
            lo,
            hi,
            w_lo: winding_of(if sgn > 0.0 { &orbit_lo } else { &orbit_hi })?,
            w_hi: winding_of(if sgn > 0.0 { &orbit_hi } else { &orbit_lo })?,
            target: target_winding,
        });
    }
    let budget = bisection_budget(s_hi - s_lo, tol);
    let mut iterations = 0;
    while s_hi - s_lo > tol {
        if iterations >= budget {
            return Err(Error::BisectionBudget(budget));
        }
        let mid = 0.5 * (s_lo + s_hi);
        if mid <= s_lo || mid >= s_hi {
            break;
        }
        let (_, pass) = eval(mid)?;
        if pass {
            s_hi = mid;
        } else {
            s_lo = mid;
        }
        iterations += 1;
    }
    let s_star = 0.5 * (s_lo + s_hi);
    let mu_star = sgn * s_star;
    let (orbit, matching_gap, shot_terminal) = glue_connector(field, mu_star, target_winding)?;
    let final_bracket = if sgn > 0.0 { (s_lo, s_hi) } else { (-s_hi, -s_lo) };
    Ok(ConnectorResult {
        mu_star,
        orbit,
        matching_gap,
        shot_terminal,
        winding: target_winding,
        bracket: final_bracket,
        iterations,
    })
}

/// Joins the unstable manifold of `S⁻` and the stable manifold of
/// `S⁺ − 2π·target` at the field's matching point. The returned orbit ends at
/// that saddle lift, offset by the matching gap.
pub fn glue_connector<F: CylinderField + ?Sized>(
    field: &F,
    mu: f64,
    target_winding: i64,
) -> Result<(Orbit, f64, Option<Terminal>)> {
    let unstable = field.trace_unstable(mu)?;
    let stable = field.trace_stable(mu, target_winding)?;
    let xm = field.match_point(mu);
    let (yu, ys) = match (unstable.y_at(xm), stable.y_at(xm)) {
        (Some(u), Some(s)) => (u, s),
        _ => return Err(Error::NoOverlap),
    };
    let gap = yu - ys;
    let mut samples: Vec<OrbitSample> = unstable.samples.iter().filter(|s| s.x <= xm).copied().collect();
    samples.extend(stable.samples.iter().filter(|s| s.x > xm).map(|s| OrbitSample { y: s.y + gap, ..*s }));
    let (_, x_hi) = field.x_bounds();
    let target = field.equilibria(mu).s_plus - TWO_PI * target_winding as f64;
    let terminal = Terminal {
        kind: EquilibriumKind::SPlus,
        shift: target_winding,
        lift: target + gap,
        x: x_hi,
        snap_distance: gap.abs(),
    };
    let orbit = Orbit { samples, direction: Direction::Forward, origin_shift: 0, terminal: Some(terminal) };
    Ok((orbit, gap, unstable.terminal))
}

/// Piecewise cubic Hermite interpolant through samples with known slopes.
pub struct Hermite<'a> {
    xs: &'a [f64],
    ys: &'a [f64],
    ds: &'a [f64],
}

impl<'a> Hermite<'a> {
    pub fn new(xs: &'a [f64], ys: &'a [f64], ds: &'a [f64]) -> Self {
        Self { xs, ys, ds }
    }

    pub fn eval(&self, x: f64) -> Option<f64> {
        let n = self.xs.len();
        if n == 0 || x < self.xs[0] || x > self.xs[n - 1] {
            return None;
        }
        if n == 1 {
            return Some(self.ys[0]);
        }
        let i = match self.xs.partition_point(|&v| v <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (d0, d1) = (self.ds[i], self.ds[i + 1]);
        if !(d0.is_finite() && d1.is_finite()) {
            return Some(y0 + t * (y1 - y0));
        }
        let t2 = t * t;
        let t3 = t2 * t;
        Some(
            (2.0 * t3 - 3.0 * t2 + 1.0) * y0
                + (t3 - 2.0 * t2 + t) * h * d0
                + (-2.0 * t3 + 3.0 * t2) * y1
                + (t3 - t2) * h * d1,
        )
    }
}

/// `∫ (y⁺ − y⁻)` over the overlap of the unstable manifold of `S⁻` and the
/// stable manifold of `S⁺ − 2π·target`, restricted to the field's area window.
/// Positive when the unstable manifold passes below the stable one.
pub fn signed_area<F: CylinderField + ?Sized>(field: &F, mu: f64, target_winding: i64) -> Result<f64> {
    let unstable = field.trace_unstable(mu)?;
    let stable = field.trace_stable(mu, target_winding)?;
    let chart = |o: &Orbit| -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut cs = Vec::with_capacity(o.samples.len());
        let mut ys = Vec::with_capacity(o.samples.len());
        let mut ds = Vec::with_capacity(o.samples.len());
        for s in &o.samples {
            let (c, d) = field.area_chart(s);
            if cs.last().is_none_or(|&last| c > last) {
                cs.push(c);
                ys.push(s.y);
                ds.push(d);
            }
        }
        (cs, ys, ds)
    };
    let (cu, yu, du) = chart(&unstable);
    let (cs, ys, ds) = chart(&stable);
    if cu.len() < 2 || cs.len() < 2 {
        return Err(Error::NoOverlap);
    }
    let (w_lo, w_hi) = field.area_window(mu);
    let lo = cu[0].max(cs[0]).max(w_lo);
    let hi = cu[cu.len() - 1].min(cs[cs.len() - 1]).min(w_hi);
    if !(lo < hi) {
        return Err(Error::NoOverlap);
    }
    let hu = Hermite::new(&cu, &yu, &du);
    let hs = Hermite::new(&cs, &ys, &ds);
    let mut nodes: Vec<f64> = cu
        .iter()
        .chain(cs.iter())
        .copied()
        .filter(|&c| c > lo && c < hi)
        .collect();
    nodes.push(lo);
    nodes.push(hi);
    nodes.sort_by(|a, b| a.partial_cmp(b).expect("finite nodes"));
    nodes.dedup();
    let diff = |c: f64| hs.eval(c).unwrap_or(f64::NAN) - hu.eval(c).unwrap_or(f64::NAN);
    let mut area = 0.0;
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        let m = 0.5 * (a + b);
        area += (b - a) / 6.0 * (diff(a) + 4.0 * diff(m) + diff(b));
    }
    if !area.is_finite() {
        return Err(Error::NoOverlap);
    }
    Ok(area)
}

/// Outcome of one sampled assumption check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn pass(detail: impl Into<String>) -> Self {
        Self { passed: true, detail: detail.into() }
    }
    fn fail(detail: impl Into<String>) -> Self {
        Self { passed: false, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub mu: f64,
    pub a_axis_speed: CheckOutcome,
    pub b_boundary_equilibria: CheckOutcome,
    pub c_fundamental_domain: CheckOutcome,
    pub d_monotone_in_mu: CheckOutcome,
    /// Not sampled; reflects the field's attestation.
    pub e_heteroclinic: CheckOutcome,
}

impl AssumptionReport {
    pub fn all_sampled_pass(&self) -> bool {
        self.a_axis_speed.passed
            && self.b_boundary_equilibria.passed
            && self.c_fundamental_domain.passed
            && self.d_monotone_in_mu.passed
    }
}

/// Zeros of `g` on one boundary circle and the sign of `∂g/∂y` at each.
fn boundary_roots<F: CylinderField + ?Sized>(field: &F, x: f64, mu: f64, ny: usize) -> Vec<(f64, f64)> {
    let y0 = field.y0();
    let g = |y: f64| field.g(x, y, mu);
    let h = TWO_PI / ny as f64;
    let mut roots = Vec::new();
    // sample slightly off the domain base so an equilibrium on y₀ is bracketed
    let base = y0 - 0.5 * h;
    for i in 0..ny {
        let (mut a, mut b) = (base + i as f64 * h, base + (i + 1) as f64 * h);
        let (mut ga, gb) = (g(a), g(b));
        if ga == 0.0 {
            roots.push(a);
            continue;
        }
        if ga * gb >= 0.0 {
            continue;
        }
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            let gm = g(m);
            if gm == 0.0 || (b - a) < 1e-14 {
                a = m;
                b = m;
                break;
            }
            if ga * gm < 0.0 {
                b = m;
            } else {
                a = m;
                ga = gm;
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots
        .into_iter()
        .map(|y| {
            let d = 1e-6;
            let dg = (g(y + d) - g(y - d)) / (2.0 * d);
            let wrapped = y0 + (y - y0).rem_euclid(TWO_PI);
            (wrapped, dg)
        })
        .collect()
}

fn same_angle(a: f64, b: f64, tol: f64) -> bool {
    let d = (a - b).rem_euclid(TWO_PI);
    d.min(TWO_PI - d) < tol
}

/// Samples assumptions (a)-(d) at parameter `mu`; (e) is reported from the
/// field's attestation.
pub fn check_assumptions<F: CylinderField + ?Sized>(field: &F, mu: f64, nx: usize, ny: usize) -> AssumptionReport {
    let (x_lo, x_hi) = field.x_bounds();
    let nx = nx.max(3);
    let ny = ny.max(8);

    // (a)
    let a_check = {
        let (f_lo, f_hi) = (field.f(x_lo), field.f(x_hi));
        let zero_tol = 1e-12;
        if f_lo.abs() > zero_tol {
            CheckOutcome::fail(format!("f(x-) = {f_lo} is not zero at x- = {x_lo}"))
        } else if f_hi.abs() > zero_tol {
            CheckOutcome::fail(format!("f(x+) = {f_hi} is not zero at x+ = {x_hi}"))
        } else {
            let bad = (1..nx)
                .map(|i| x_lo + (x_hi - x_lo) * i as f64 / nx as f64)
                .find(|&x| !(field.f(x) > 0.0));
            match bad {
                Some(x) => CheckOutcome::fail(format!("f({x}) = {} is not positive", field.f(x))),
                None => CheckOutcome::pass(format!("f vanishes at both ends and is positive at {} interior points", nx - 1)),
            }
        }
    };

    // (b)
    let eq = field.equilibria(mu);
    let b_check = {
        let left = boundary_roots(field, x_lo, mu, ny);
        let right = boundary_roots(field, x_hi, mu, ny);
        let mut problems = Vec::new();
        if left.len() != 2 {
            problems.push(format!("{} equilibria on the left circle", left.len()));
        }
        if right.len() != 2 {
            problems.push(format!("{} equilibria on the right circle", right.len()));
        }
        let expect = [
            (&left, eq.s_minus, -1.0, "S-"),
            (&left, eq.n_minus, 1.0, "N-"),
            (&right, eq.s_plus, 1.0, "S+"),
            (&right, eq.n_plus, -1.0, "N+"),
        ];
        for (roots, e, sign, name) in expect {
            match roots.iter().find(|(y, _)| same_angle(*y, e, 1e-6)) {
                None => problems.push(format!("{name} = {e} not found among boundary zeros")),
                Some((_, dg)) if dg * sign <= 0.0 => {
                    problems.push(format!("dg/dy at {name} has the wrong sign ({dg})"))
                }
                _ => {}
            }
        }
        if problems.is_empty() {
            CheckOutcome::pass("two equilibria per boundary circle with the expected stability")
        } else {
            CheckOutcome::fail(problems.join("; "))
        }
    };

    // (c)
    let c_check = {
        let y0 = field.y0();
        let inside = |v: f64| v >= y0 && v < y0 + TWO_PI;
        let ok_left = inside(eq.n_minus) && inside(eq.s_minus) && eq.n_minus < eq.s_minus;
        let ok_right = inside(eq.s_plus) && inside(eq.n_plus) && eq.s_plus < eq.n_plus;
        if ok_left && ok_right {
            CheckOutcome::pass(format!("y0 = {y0} <= n- < s- and y0 <= s+ < n+ within one period"))
        } else {
            CheckOutcome::fail(format!("ordering violated: {eq:?} with y0 = {y0}"))
        }
    };

    // (d): ∂g/∂μ ≤ 0 where μ is oriented so that windings increase with it.
    let d_check = {
        let sgn = field.orientation().sign();
        let dmu = 1e-6 * mu.abs().max(1.0);
        let mut worst: Option<(f64, f64, f64)> = None;
        for i in 0..=nx {
            let x = x_lo + (x_hi - x_lo) * i as f64 / nx as f64;
            for j in 0..ny {
                let y = field.y0() + TWO_PI * j as f64 / ny as f64;
                let d = sgn * (field.g(x, y, mu + dmu) - field.g(x, y, mu - dmu)) / (2.0 * dmu);
                if worst.is_none_or(|w| d > w.2) {
                    worst = Some((x, y, d));
                }
            }
        }
        let (x, y, d) = worst.expect("nonempty grid");
        if d <= 1e-9 {
            CheckOutcome::pass(format!("max dg/dmu = {d:e} at ({x}, {y})"))
        } else {
            CheckOutcome::fail(format!("dg/dmu = {d:e} > 0 at ({x}, {y})"))
        }
    };

    let e_check = if field.attests_heteroclinic() {
        CheckOutcome::pass("guaranteed by the configured parameter hypotheses (not sampled)")
    } else {
        CheckOutcome::fail("not attested for these parameters (not sampled)")
    };

    AssumptionReport {
        mu,
        a_axis_speed: a_check,
        b_boundary_equilibria: b_check,
        c_fundamental_domain: c_check,
        d_monotone_in_mu: d_check,
        e_heteroclinic: e_check,
    }
}
