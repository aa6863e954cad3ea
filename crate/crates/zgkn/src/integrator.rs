//! Dormand-Prince 5(4) embedded Runge-Kutta integrator with adaptive steps.
//!
//! The stepper keeps its state between calls so a trajectory can be advanced
//! through a list of output points without restarting the step-size control.

use crate::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th and 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    /// Largest allowed |h|.
    pub h_max: f64,
    /// Initial |h|; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub max_steps: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, h_max: f64::INFINITY, h_init: None, max_steps: 2_000_000 }
    }
}

type StepCap<'a, const N: usize> = Box<dyn Fn(f64, &[f64; N]) -> f64 + 'a>;

/// Adaptive integrator for `y' = f(t, y)` with `y ∈ ℝᴺ`, forward or backward in `t`.
pub struct Stepper<'a, const N: usize, F>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    f: F,
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    opts: Options,
    cap: Option<StepCap<'a, N>>,
    steps: usize,
    evals: usize,
}

fn rms<const N: usize>(v: &[f64; N]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / N as f64).sqrt()
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        if *c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

fn all_finite<const N: usize>(v: &[f64; N]) -> bool {
    v.iter().all(|x| x.is_finite())
}

impl<'a, const N: usize, F> Stepper<'a, N, F>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(f: F, t0: f64, y0: [f64; N], opts: Options) -> Self {
        let k1 = f(t0, &y0);
        Self { f, t: t0, y: y0, k1, h: 0.0, opts, cap: None, steps: 0, evals: 1 }
    }

    /// Adds a state-dependent bound on |h| (used to keep steps below the local length scale).
    pub fn with_step_cap(mut self, cap: impl Fn(f64, &[f64; N]) -> f64 + 'a) -> Self {
        self.cap = Some(Box::new(cap));
        self
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    /// Current derivative `f(t, y)`.
    pub fn dydt(&self) -> &[f64; N] {
        &self.k1
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn evals(&self) -> usize {
        self.evals
    }

    fn scale(&self, a: &[f64; N], b: &[f64; N]) -> [f64; N] {
        let mut sc = [0.0; N];
        for i in 0..N {
            sc[i] = self.opts.atol + self.opts.rtol * a[i].abs().max(b[i].abs());
        }
        sc
    }

    fn max_abs_step(&self) -> f64 {
        let mut m = self.opts.h_max;
        if let Some(cap) = &self.cap {
            m = m.min(cap(self.t, &self.y));
        }
        m
    }

    fn initial_step(&mut self, dir: f64) -> f64 {
        if let Some(h) = self.opts.h_init {
            return h;
        }
        let sc = self.scale(&self.y, &self.y);
        let mut ys = [0.0; N];
        let mut fs = [0.0; N];
        for i in 0..N {
            ys[i] = self.y[i] / sc[i];
            fs[i] = self.k1[i] / sc[i];
        }
        let d0 = rms(&ys);
        let d1 = rms(&fs);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(self.max_abs_step());
        let y1 = axpy(&self.y, dir * h0, &[(1.0, &self.k1)]);
        let f1 = (self.f)(self.t + dir * h0, &y1);
        self.evals += 1;
        let mut df = [0.0; N];
        for i in 0..N {
            df[i] = (f1[i] - self.k1[i]) / sc[i];
        }
        let d2 = rms(&df) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1)
    }

    /// Takes one accepted step toward `t_end` without passing it.
    pub fn step_toward(&mut self, t_end: f64) -> Result<()> {
        let span = t_end - self.t;
        if span == 0.0 {
            return Ok(());
        }
        let dir = span.signum();
        if self.h == 0.0 {
            self.h = self.initial_step(dir);
        }
        let mut h_abs = self.h.abs().min(self.max_abs_step());
        let mut rejected = false;
        loop {
            if self.steps >= self.opts.max_steps {
                return Err(Error::StepBudget(self.opts.max_steps));
            }
            let last = h_abs >= span.abs();
            if last {
                h_abs = span.abs();
            }
            if h_abs < 1e-14 * self.t.abs().max(1e-10) {
                return Err(Error::StepUnderflow { t: self.t, y: self.y.to_vec() });
            }
            let h = dir * h_abs;
            let t = self.t;
            let y = &self.y;
            let k1 = &self.k1;
            let k2 = (self.f)(t + C2 * h, &axpy(y, h, &[(A21, k1)]));
            let k3 = (self.f)(t + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]));
            let k4 = (self.f)(t + C4 * h, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
            let k5 = (self.f)(
                t + C5 * h,
                &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = (self.f)(
                t + h,
                &axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            );
            let y_new = axpy(y, h, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let t_new = if last { t_end } else { t + h };
            let k7 = (self.f)(t_new, &y_new);
            self.evals += 6;

            if !all_finite(&y_new) || !all_finite(&k7) {
                h_abs *= 0.25;
                rejected = true;
                if h_abs < 1e-14 * self.t.abs().max(1e-10) {
                    return Err(Error::NonFinite { t: self.t, last_good: self.y.to_vec() });
                }
                continue;
            }

            let mut err = [0.0; N];
            for i in 0..N {
                err[i] = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            }
            let sc = self.scale(y, &y_new);
            for i in 0..N {
                err[i] /= sc[i];
            }
            let e = rms(&err);
            if e <= 1.0 {
                let mut fac = if e == 0.0 { FAC_MAX } else { SAFETY * e.powf(-0.2) };
                fac = fac.clamp(FAC_MIN, FAC_MAX);
                if rejected {
                    fac = fac.min(1.0);
                }
                self.t = t_new;
                self.y = y_new;
                self.k1 = k7;
                self.steps += 1;
                // keep the proposed size even when the last step was clipped to t_end
                let proposed = if last { self.h.abs().max(h_abs) } else { h_abs * fac };
                self.h = dir * proposed;
                return Ok(());
            }
            let fac = (SAFETY * e.powf(-0.2)).clamp(FAC_MIN, 1.0);
            h_abs *= fac;
            rejected = true;
        }
    }

    /// Advances to `t_end`, calling `observe` after every accepted step.
    /// Returns `Ok(false)` when the observer asked to stop early.
    pub fn advance_to(
        &mut self,
        t_end: f64,
        mut observe: impl FnMut(f64, &[f64; N]) -> bool,
    ) -> Result<bool> {
        while self.t != t_end {
            self.step_toward(t_end)?;
            if !observe(self.t, &self.y) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let mut s = Stepper::new(|_t, y: &[f64; 1]| [-y[0]], 0.0, [1.0], Options::default());
        s.advance_to(5.0, |_, _| true).unwrap();
        assert!((s.y()[0] - (-5.0f64).exp()).abs() < 1e-10);
        assert_eq!(s.t(), 5.0);
    }

    #[test]
    fn harmonic_oscillator_backward() {
        let f = |_t, y: &[f64; 2]| [y[1], -y[0]];
        let mut s = Stepper::new(f, 0.0, [0.0, 1.0], Options::default());
        s.advance_to(-3.0, |_, _| true).unwrap();
        assert!((s.y()[0] - (-3.0f64).sin()).abs() < 1e-9);
        assert!((s.y()[1] - (-3.0f64).cos()).abs() < 1e-9);
    }

    #[test]
    fn observer_can_stop() {
        let mut s = Stepper::new(|_t, _y: &[f64; 1]| [1.0], 0.0, [0.0], Options::default());
        let done = s.advance_to(10.0, |t, _| t < 1e-3).unwrap();
        assert!(!done);
        assert!(s.t() < 10.0);
    }

    #[test]
    fn step_cap_is_respected() {
        let opts = Options { h_max: 0.1, ..Options::default() };
        let mut s = Stepper::new(|_t, _y: &[f64; 1]| [0.0], 0.0, [1.0], opts);
        let mut last = 0.0;
        s.advance_to(1.0, |t, _| {
            assert!(t - last <= 0.1 + 1e-15);
            last = t;
            true
        })
        .unwrap();
    }

    #[test]
    fn blow_up_is_reported() {
        let mut s = Stepper::new(|_t, y: &[f64; 1]| [y[0] * y[0]], 0.0, [1.0], Options::default());
        assert!(s.advance_to(2.0, |_, _| true).is_err());
    }
}
