//! Closed-form reference values for the flat-space (`a → 0`) limit and the
//! small-`a` expansion of the angular eigenvalue.

use std::f64::consts::PI;

use serde::Serialize;

use crate::{Error, Result};

/// Index `(M, k)` of a Coulomb-Dirac level at coupling γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SommerfeldIndex {
    #[serde(rename = "M")]
    pub big_m: u32,
    pub k: i64,
    pub gamma: f64,
}

impl SommerfeldIndex {
    pub fn new(big_m: u32, k: i64, gamma: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be nonzero".into()));
        }
        if k > 0 && big_m == 0 {
            return Err(Error::Inadmissible("k > 0 with M = 0 is excluded".into()));
        }
        if !(gamma < 0.0) || !((k * k) as f64 > gamma * gamma) {
            return Err(Error::InvalidArgument(format!("need gamma < 0 and k^2 > gamma^2 (gamma = {gamma})")));
        }
        Ok(Self { big_m, k, gamma })
    }

    /// `ρ = √(k² − γ²)`.
    pub fn rho(&self) -> f64 {
        ((self.k * self.k) as f64 - self.gamma * self.gamma).sqrt()
    }

    pub fn n(&self) -> u32 {
        self.big_m + self.k.unsigned_abs() as u32
    }

    /// `η = √(1 − E²) = |γ|/√((M + ρ)² + γ²)`, free of the cancellation near E = 1.
    pub fn eta(&self) -> f64 {
        let d = self.big_m as f64 + self.rho();
        -self.gamma / d.hypot(self.gamma)
    }

    /// `μ = M/(k + γ/η)`, with `γ/η = −√((M + ρ)² + γ²)`.
    fn mu(&self) -> f64 {
        if self.big_m == 0 {
            return 0.0;
        }
        let d = self.big_m as f64 + self.rho();
        self.big_m as f64 / (self.k as f64 - d.hypot(self.gamma))
    }
}

/// `E = 1/√(1 + γ²/(M + √(k² − γ²))²)`.
pub fn sommerfeld_energy(idx: &SommerfeldIndex) -> f64 {
    let d = idx.big_m as f64 + idx.rho();
    1.0 / (1.0 + idx.gamma * idx.gamma / (d * d)).sqrt()
}

/// Checked version taking raw integers.
pub fn sommerfeld(big_m: u32, k: i64, gamma: f64) -> Result<f64> {
    Ok(sommerfeld_energy(&SommerfeldIndex::new(big_m, k, gamma)?))
}

/// Angular eigenvalue of the flat-space limit, `k = −sgn(N)(|N| + |κ| − ½)`.
pub fn a0_angular_k(big_n: i64, kappa: f64) -> Result<i64> {
    if big_n == 0 {
        return Err(Error::InvalidArgument("N must be nonzero".into()));
    }
    let shift = (kappa.abs() - 0.5).round() as i64;
    Ok(-big_n.signum() * (big_n.abs() + shift))
}

/// Jacobi polynomial `P_n^{(α,β)}(x)` by the three-term recurrence.
pub fn jacobi_p(n: usize, alpha: f64, beta: f64, x: f64) -> f64 {
    let p0 = 1.0;
    if n == 0 {
        return p0;
    }
    let ab = alpha + beta;
    let p1 = (alpha + 1.0) + 0.5 * (ab + 2.0) * (x - 1.0);
    let (mut pm, mut p) = (p0, p1);
    for m in 1..n {
        let m = m as f64;
        let c = 2.0 * m + ab;
        let a1 = 2.0 * (m + 1.0) * (m + ab + 1.0) * c;
        let a2 = (c + 1.0) * (alpha * alpha - beta * beta);
        let a3 = c * (c + 1.0) * (c + 2.0);
        let a4 = 2.0 * (m + alpha) * (m + beta) * (c + 2.0);
        let next = ((a2 + a3 * x) * p - a4 * pm) / a1;
        pm = p;
        p = next;
    }
    p
}

/// `d/dx P_n^{(α,β)}(x) = ½(n + α + β + 1) P_{n−1}^{(α+1,β+1)}(x)`.
pub fn jacobi_p_prime(n: usize, alpha: f64, beta: f64, x: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    0.5 * (n as f64 + alpha + beta + 1.0) * jacobi_p(n - 1, alpha + 1.0, beta + 1.0, x)
}

/// Bisection refinement of a sign change of `f` in `[a, b]`.
fn refine_root(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fa < 0.0) == (fm < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Sign changes of `f` on `(lo, hi)` sampled at `n` uniform intervals, refined by bisection.
fn isolate_roots(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / n as f64;
    let mut roots = Vec::new();
    let mut x0 = lo;
    let mut f0 = f(x0);
    for i in 1..=n {
        let x1 = if i == n { hi } else { lo + i as f64 * h };
        let f1 = f(x1);
        if f0 != 0.0 && f1 != 0.0 && (f0 < 0.0) != (f1 < 0.0) {
            roots.push(refine_root(f, x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

/// Flat-space angular connector `Θ_{N,κ}(θ)` built from Jacobi polynomials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiConnector {
    pub big_n: i64,
    pub kappa: f64,
    degree: usize,
    alpha_num: f64,
    beta_num: f64,
    alpha_den: f64,
    beta_den: f64,
    base: f64,
    /// Interior roots of the denominator (in θ) with the lift correction applied after each.
    jumps: Vec<(f64, f64)>,
}

impl JacobiConnector {
    pub fn new(big_n: i64, kappa: f64) -> Result<Self> {
        if big_n == 0 {
            return Err(Error::InvalidArgument("N must be nonzero".into()));
        }
        if kappa == 0.0 {
            return Err(Error::InvalidArgument("kappa must be nonzero".into()));
        }
        let k = kappa.abs();
        let (p, m) = (k + 0.5, k - 0.5);
        // κ < 0 solutions are the |κ| ones rotated by π
        let (alpha_num, beta_num, alpha_den, beta_den, base) = (p, m, m, p, if kappa > 0.0 { 0.0 } else { PI });
        let mut c = Self {
            big_n,
            kappa,
            degree: (big_n.abs() - 1) as usize,
            alpha_num,
            beta_num,
            alpha_den,
            beta_den,
            base,
            jumps: Vec::new(),
        };
        let den = |t: f64| jacobi_p(c.degree, c.alpha_den, c.beta_den, t.cos());
        let roots = isolate_roots(&den, 0.0, PI, 4000 * (c.degree + 1));
        let s = big_n.signum() as f64;
        let mut jumps = Vec::with_capacity(roots.len());
        for t in roots {
            let (num, _, dden) = c.parts(t);
            // the principal arctangent jumps by −π·sgn(num·den′) across the root
            let phi_fix = -PI * (num * dden).signum();
            jumps.push((t, -2.0 * s * phi_fix));
        }
        c.jumps = jumps;
        Ok(c)
    }

    /// Numerator, denominator and denominator derivative of the arctangent argument.
    fn parts(&self, theta: f64) -> (f64, f64, f64) {
        let x = theta.cos();
        let (sh, ch) = (0.5 * theta).sin_cos();
        let pn = jacobi_p(self.degree, self.alpha_num, self.beta_num, x);
        let pd = jacobi_p(self.degree, self.alpha_den, self.beta_den, x);
        let pd_prime = jacobi_p_prime(self.degree, self.alpha_den, self.beta_den, x);
        let d = pd * ch;
        let d_theta = -pd_prime * theta.sin() * ch - 0.5 * pd * sh;
        (pn * sh, d, d_theta)
    }

    /// Lifted `Θ(θ)`, continuous on `[0, π]`.
    pub fn value(&self, theta: f64) -> Result<f64> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidArgument(format!("theta = {theta} outside [0, pi]")));
        }
        let s = self.big_n.signum() as f64;
        let (num, den, _) = self.parts(theta);
        let principal = if theta == PI {
            // cos(θ/2) → 0⁺, so the ratio diverges with the sign of num·P_den(−1)
            let pd = jacobi_p(self.degree, self.alpha_den, self.beta_den, -1.0);
            0.5 * PI * (num * pd).signum()
        } else if den == 0.0 {
            0.5 * PI * num.signum()
        } else {
            (num / den).atan()
        };
        let shift: f64 = self.jumps.iter().filter(|(t, _)| theta > *t).map(|(_, j)| j).sum();
        Ok(self.base - 2.0 * s * principal + shift)
    }

    /// `dΘ/dθ` in closed form.
    pub fn slope(&self, theta: f64) -> f64 {
        let s = self.big_n.signum() as f64;
        let x = theta.cos();
        let (sh, ch) = (0.5 * theta).sin_cos();
        let st = theta.sin();
        let pn = jacobi_p(self.degree, self.alpha_num, self.beta_num, x);
        let pn_prime = jacobi_p_prime(self.degree, self.alpha_num, self.beta_num, x);
        let (num, den, d_den) = self.parts(theta);
        let d_num = -pn_prime * st * sh + 0.5 * pn * ch;
        -2.0 * s * (d_num * den - num * d_den) / (num * num + den * den)
    }

    /// Number of interior roots of the denominator polynomial.
    pub fn branch_count(&self) -> usize {
        self.jumps.len()
    }

    /// Lift corrections applied at the denominator roots.
    pub fn branch_jumps(&self) -> Vec<f64> {
        self.jumps.iter().map(|(_, j)| *j).collect()
    }
}

/// `Θ_{N,κ}(θ)`.
pub fn jacobi_theta_connector(big_n: i64, kappa: f64, theta: f64) -> Result<f64> {
    JacobiConnector::new(big_n, kappa)?.value(theta)
}

/// Terminating Kummer series `F(−m, b, x)` for integer `m ≥ 0`.
pub fn kummer_terminating(m: u32, b: f64, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 0..m {
        let j = j as f64;
        term *= (-(m as f64) + j) / ((b + j) * (j + 1.0)) * x;
        sum += term;
    }
    sum
}

/// Coefficients of `F(−m, b, x)` in powers of x.
fn kummer_coefficients(m: u32, b: f64) -> Vec<f64> {
    let mut c = Vec::with_capacity(m as usize + 1);
    let mut term = 1.0;
    c.push(term);
    for j in 0..m {
        let j = j as f64;
        term *= (-(m as f64) + j) / ((b + j) * (j + 1.0));
        c.push(term);
    }
    c
}

/// Flat-space radial Prüfer angle `Ω(r)` for `r ≥ 0` built from the
/// hypergeometric form of the Coulomb-Dirac eigenfunctions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GordonProfile {
    pub index: SommerfeldIndex,
    pub energy: f64,
    pub rho: f64,
    pub eta: f64,
    /// Ratio `c₁/c₂ = M/(k + γ/η)`.
    pub mu: f64,
    base: f64,
    /// Positive roots of the denominator (in r) and the lift correction after each.
    jumps: Vec<(f64, f64)>,
    /// Distance between the formula at r = 0 and the prescribed initial branch, mod 2π.
    pub initial_mismatch: f64,
}

impl GordonProfile {
    pub fn new(index: SommerfeldIndex) -> Result<Self> {
        let energy = sommerfeld_energy(&index);
        let eta = index.eta();
        let rho = index.rho();
        let mu = index.mu();
        let mut g = Self { index, energy, rho, eta, mu, base: 0.0, jumps: Vec::new(), initial_mismatch: 0.0 };

        let target0 = {
            let s = (-index.gamma / index.k as f64).asin();
            if index.k < 0 {
                s
            } else {
                -PI - s
            }
        };
        let principal0 = g.principal(0.0);
        let diff = target0 - principal0;
        let turns = (diff / (2.0 * PI)).round();
        g.base = 2.0 * PI * turns;
        g.initial_mismatch = (diff - g.base).abs();

        let b = 2.0 * rho + 1.0;
        let poly = denominator_polynomial(index.big_m, b, mu);
        let bound = root_bound(&poly);
        let roots_x = isolate_roots(&|x| eval_poly(&poly, x), 0.0, bound, 4000 * (index.big_m as usize + 1));
        for x in roots_x {
            let r = x / (2.0 * eta);
            let (num, _, d_den) = g.parts(r);
            let fix = -2.0 * PI * (num * d_den).signum();
            g.jumps.push((r, fix));
        }
        Ok(g)
    }

    /// Numerator `q(μF₁ − F₀)`, denominator `μF₁ + F₀` and `d(den)/dr`.
    fn parts(&self, r: f64) -> (f64, f64, f64) {
        let (num, den, _, d_den) = self.parts_with_derivatives(r);
        (num, den, d_den)
    }

    fn parts_with_derivatives(&self, r: f64) -> (f64, f64, f64, f64) {
        let m = self.index.big_m;
        let b = 2.0 * self.rho + 1.0;
        let x = 2.0 * self.eta * r;
        let q = self.eta / (1.0 + self.energy);
        let f0 = kummer_terminating(m, b, x);
        let df0 = if m == 0 { 0.0 } else { -(m as f64) / b * kummer_terminating(m - 1, b + 1.0, x) };
        let (f1, df1) = if m == 0 {
            (0.0, 0.0)
        } else {
            let f1 = kummer_terminating(m - 1, b, x);
            let df1 = if m == 1 {
                0.0
            } else {
                -((m - 1) as f64) / b * kummer_terminating(m - 2, b + 1.0, x)
            };
            (f1, df1)
        };
        let dxdr = 2.0 * self.eta;
        let num = q * (self.mu * f1 - f0);
        let den = self.mu * f1 + f0;
        let d_num = q * (self.mu * df1 - df0) * dxdr;
        let d_den = (self.mu * df1 + df0) * dxdr;
        (num, den, d_num, d_den)
    }

    fn principal(&self, r: f64) -> f64 {
        let (num, den, _) = self.parts(r);
        if den == 0.0 {
            PI * num.signum()
        } else {
            2.0 * (num / den).atan()
        }
    }

    /// Lifted `Ω(r)` for `r ≥ 0`.
    pub fn value(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::InvalidArgument(format!("r = {r} must be nonnegative")));
        }
        let shift: f64 = self.jumps.iter().filter(|(t, _)| r > *t).map(|(_, j)| j).sum();
        Ok(self.base + self.principal(r) + shift)
    }

    /// `dΩ/dr` in closed form.
    pub fn slope(&self, r: f64) -> f64 {
        let (num, den, d_num, d_den) = self.parts_with_derivatives(r);
        2.0 * (d_num * den - num * d_den) / (num * num + den * den)
    }

    /// `Ω(∞)` implied by the lift bookkeeping.
    pub fn limit_at_infinity(&self) -> f64 {
        let q = self.eta / (1.0 + self.energy);
        let shift: f64 = self.jumps.iter().map(|(_, j)| j).sum();
        self.base - 2.0 * q.atan() + shift
    }

    pub fn branch_jumps(&self) -> Vec<f64> {
        self.jumps.iter().map(|(_, j)| *j).collect()
    }
}

/// `Ω(r)` of the flat-space radial connector.
pub fn gordon_omega_profile(idx: &SommerfeldIndex, r: f64) -> Result<f64> {
    GordonProfile::new(*idx)?.value(r)
}

/// Coefficients of `μF(−M+1, b, x) + F(−M, b, x)`.
fn denominator_polynomial(big_m: u32, b: f64, mu: f64) -> Vec<f64> {
    let mut c = kummer_coefficients(big_m, b);
    if big_m > 0 {
        for (j, v) in kummer_coefficients(big_m - 1, b).into_iter().enumerate() {
            c[j] += mu * v;
        }
    }
    c
}

fn eval_poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * x + v)
}

/// Fujiwara's bound `2·max_j |c_{n−j}/c_n|^{1/j}` on every root modulus, padded by 10%
/// so a root never sits on the end of the search interval.
fn root_bound(c: &[f64]) -> f64 {
    let n = c.len() - 1;
    if n == 0 {
        return 1.0;
    }
    let lead = c[n].abs();
    let mut m: f64 = 0.0;
    for j in 1..=n {
        let mut q = (c[n - j] / lead).abs().powf(1.0 / j as f64);
        if j == n {
            q *= 0.5f64.powf(1.0 / n as f64);
        }
        m = m.max(q);
    }
    2.2 * m
}

/// Positive roots of the radial denominator polynomial, counted on a grid
/// refined until two successive counts agree.
pub fn count_denominator_roots(idx: &SommerfeldIndex) -> Result<usize> {
    let m = idx.big_m;
    let poly = denominator_polynomial(m, 2.0 * idx.rho() + 1.0, idx.mu());
    let bound = root_bound(&poly);
    let f = |x: f64| eval_poly(&poly, x);
    let mut n = 256 * (m as usize + 1);
    let mut last = isolate_roots(&f, 0.0, bound, n).len();
    const MAX_REFINE: usize = 12;
    for _ in 0..MAX_REFINE {
        n *= 2;
        let count = isolate_roots(&f, 0.0, bound, n).len();
        if count == last {
            return Ok(count);
        }
        last = count;
    }
    Err(Error::RootCluster(MAX_REFINE))
}

/// The six printed coefficients `c_{m,n}` (m + n ≤ 2) of the double series for λ.
pub fn bsw_coefficients(kappa: f64, big_n: i64) -> Result<[[f64; 3]; 3]> {
    let k = a0_angular_k(big_n, kappa)? as f64;
    let p = 2.0 * k + 1.0;
    let m = 2.0 * k - 1.0;
    let kk = 4.0 * kappa * kappa;
    let mut c = [[0.0; 3]; 3];
    c[0][0] = k;
    c[1][0] = -kappa / p;
    c[0][1] = -kappa / m;
    c[2][0] = (p * p - kk) / (4.0 * p * p * p);
    c[1][1] = 0.0;
    c[0][2] = (m * m - kk) / (4.0 * m * m * m);
    Ok(c)
}

/// Which expansion variables the six coefficients multiply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BswConvention {
    /// `α = aE − a`, `β = aE + a`, as the coefficients are usually quoted.
    Printed,
    /// `α = aE + a`, `β = aE − a`. Flipping the signs of `a` and `E` in the
    /// source ansatz (on top of the sign of κ) maps `am → −am` with `aE`
    /// fixed, which swaps the two variables. This is the form that agrees
    /// with the angular flow used here.
    SignCorrected,
}

/// Second-order small-`a` series with the printed variables `α = aE − a`, `β = aE + a`.
pub fn bsw_lambda(kappa: f64, big_n: i64, a: f64, energy: f64) -> Result<f64> {
    bsw_lambda_with(BswConvention::Printed, kappa, big_n, a, energy)
}

pub fn bsw_lambda_with(convention: BswConvention, kappa: f64, big_n: i64, a: f64, energy: f64) -> Result<f64> {
    let c = bsw_coefficients(kappa, big_n)?;
    let (nu, mu) = (a * energy, a);
    let (alpha, beta) = match convention {
        BswConvention::Printed => (nu - mu, nu + mu),
        BswConvention::SignCorrected => (nu + mu, nu - mu),
    };
    let mut sum = 0.0;
    for (m, row) in c.iter().enumerate() {
        for (n, v) in row.iter().enumerate() {
            if m + n <= 2 {
                sum += v * alpha.powi(m as i32) * beta.powi(n as i32);
            }
        }
    }
    Ok(sum)
}
