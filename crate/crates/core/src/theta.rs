//! Jacobi theta functions with rigorous truncation bounds.
//!
//! `θ(z, τ) = Σ_m exp(πi m² τ + 2πi m z)` and its variant with
//! characteristics `θ_{a,b}(z, τ) = Σ_m exp(πi τ (m+a)² + 2πi (m+a)(z+b))`.
//!
//! The series is truncated symmetrically at `|m + a| ≤ M`. For `τ = x + iy`
//! and `z + b = u + iv` every discarded term has modulus at most
//! `exp(-πy n² + 2π n |v|)` with `n > M`, and consecutive moduli shrink by at
//! least `r_M = exp(-πy(2M+1) + 2π|v|)` once `M ≥ |v|/y`. Both tails together
//! are therefore bounded by
//!
//! ```text
//! 2 · exp(-πy M² + 2π M |v|) / (1 - r_M)
//! ```
//!
//! and `M` is the smallest integer making this at most `tol`.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::{LN_2, PI};
use thiserror::Error;

/// Default absolute truncation tolerance.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Hard cap on the number of summed terms.
pub const TERM_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThetaError {
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("tau must lie in the upper half plane, got Im(tau) = {0}")]
    NotUpperHalfPlane(f64),
    #[error("tolerance {tol:e} not reached within {cap} terms (|Im z| = {imag_z}, Im tau = {imag_tau})")]
    TermCap {
        tol: f64,
        cap: usize,
        imag_z: f64,
        imag_tau: f64,
    },
    #[error("root of psi not bracketed on ({lo}, {hi})")]
    NotBracketed { lo: f64, hi: f64 },
}

/// A point `τ` of the upper half plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpperHalfPoint {
    re: f64,
    im: f64,
}

impl UpperHalfPoint {
    pub fn new(re: f64, im: f64) -> Result<Self, ThetaError> {
        if !(im > 0.0) || !im.is_finite() || !re.is_finite() {
            return Err(ThetaError::NotUpperHalfPlane(im));
        }
        Ok(Self { re, im })
    }

    /// The purely imaginary point `it`.
    pub fn imaginary(t: f64) -> Result<Self, ThetaError> {
        Self::new(0.0, t)
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// A truncated theta series together with its error budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaValue {
    pub value: Complex64,
    /// Bound on the modulus of the discarded series remainder.
    pub tail_bound: f64,
    /// Estimate of floating-point accumulation error in the retained terms.
    pub rounding_bound: f64,
    pub terms_used: usize,
}

impl ThetaValue {
    /// Total bound on `|value - exact|`.
    pub fn error_bound(&self) -> f64 {
        self.tail_bound + self.rounding_bound
    }
}

/// Characteristics `(a, b)` of `θ_{a,b}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Characteristics {
    pub a: f64,
    pub b: f64,
}

impl Characteristics {
    pub const ZERO: Self = Self { a: 0.0, b: 0.0 };

    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }
}

/// Restriction of the summation index `m` to one parity class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// Natural log of the two-sided tail bound at radius `m`, or `None` when
/// the geometric comparison does not apply yet.
fn log_tail_bound(y: f64, v: f64, m: f64) -> Option<f64> {
    let log_ratio = -PI * y * (2.0 * m + 1.0) + 2.0 * PI * v;
    if log_ratio >= 0.0 || m * y < v {
        return None;
    }
    let log_first = -PI * y * m * m + 2.0 * PI * m * v;
    Some(LN_2 + log_first - (-log_ratio.exp()).ln_1p())
}

/// Smallest truncation radius `M` meeting `tol`, with the attained bound.
pub fn truncation_radius(tau: UpperHalfPoint, imag_shift: f64, tol: f64) -> Result<(u64, f64), ThetaError> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(ThetaError::BadTolerance(tol));
    }
    let y = tau.im();
    let v = imag_shift.abs();
    let log_tol = tol.ln();
    let mut m = (v / y).ceil() as u64;
    loop {
        if 2 * m as usize + 1 > TERM_CAP {
            return Err(ThetaError::TermCap {
                tol,
                cap: TERM_CAP,
                imag_z: imag_shift,
                imag_tau: y,
            });
        }
        if let Some(lb) = log_tail_bound(y, v, m as f64) {
            if lb <= log_tol {
                return Ok((m, lb.exp()));
            }
        }
        m += 1;
    }
}

/// Sums `θ_{a,b}` over `|m + a| ≤ radius`, optionally restricted by parity of `m`.
///
/// Returns the value, the number of terms, and the rounding estimate. Used by
/// the bounded evaluators and directly by tests that compare radii.
pub fn partial_sum(
    ch: Characteristics,
    parity: Option<Parity>,
    z: Complex64,
    tau: UpperHalfPoint,
    radius: f64,
) -> (Complex64, usize, f64) {
    let lo = (-radius - ch.a).ceil() as i64;
    let hi = (radius - ch.a).floor() as i64;
    let (x, y) = (tau.re(), tau.im());
    let u = z.re + ch.b;
    let v = z.im;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut max_arg: f64 = 0.0;
    let mut count = 0usize;
    for m in lo..=hi {
        match parity {
            Some(Parity::Even) if m.rem_euclid(2) != 0 => continue,
            Some(Parity::Odd) if m.rem_euclid(2) != 1 => continue,
            _ => {}
        }
        let n = m as f64 + ch.a;
        let log_mod = -PI * y * n * n - 2.0 * PI * n * v;
        let phase = PI * x * n * n + 2.0 * PI * n * u;
        let term = Complex64::from_polar(log_mod.exp(), phase);
        sum += term;
        abs_sum += term.norm();
        max_arg = max_arg.max(phase.abs() + log_mod.abs());
        count += 1;
    }
    let rounding = f64::EPSILON * abs_sum * (count as f64 + 4.0 + max_arg);
    (sum, count, rounding)
}

/// `θ(z, τ)` within absolute tolerance `tol`.
pub fn eval_theta(z: Complex64, tau: UpperHalfPoint, tol: f64) -> Result<ThetaValue, ThetaError> {
    eval_theta_char(Characteristics::ZERO, z, tau, tol)
}

/// `θ_{a,b}(z, τ)` within absolute tolerance `tol`.
pub fn eval_theta_char(
    ch: Characteristics,
    z: Complex64,
    tau: UpperHalfPoint,
    tol: f64,
) -> Result<ThetaValue, ThetaError> {
    eval_restricted(ch, None, z, tau, tol)
}

/// Parity-restricted `θ_{a,b}`: the sum over even (or odd) `m` only.
pub fn eval_theta_parity(
    parity: Parity,
    ch: Characteristics,
    z: Complex64,
    tau: UpperHalfPoint,
    tol: f64,
) -> Result<ThetaValue, ThetaError> {
    eval_restricted(ch, Some(parity), z, tau, tol)
}

fn eval_restricted(
    ch: Characteristics,
    parity: Option<Parity>,
    z: Complex64,
    tau: UpperHalfPoint,
    tol: f64,
) -> Result<ThetaValue, ThetaError> {
    let (radius, tail_bound) = truncation_radius(tau, z.im, tol)?;
    let (value, terms_used, rounding_bound) = partial_sum(ch, parity, z, tau, radius as f64);
    Ok(ThetaValue {
        value,
        tail_bound,
        rounding_bound,
        terms_used,
    })
}

/// Tolerance used internally where theta values feed further arithmetic.
pub(crate) const INNER_TOL: f64 = 1e-17;

/// `θ(z, it)` value only, at the internal tolerance.
pub(crate) fn theta_it(z: Complex64, t: f64) -> Result<Complex64, ThetaError> {
    Ok(eval_theta(z, UpperHalfPoint::imaginary(t)?, INNER_TOL)?.value)
}

/// `θ_{a,b}(z, it)` value only, at the internal tolerance.
pub(crate) fn theta_char_it(a: f64, b: f64, z: Complex64, t: f64) -> Result<Complex64, ThetaError> {
    Ok(eval_theta_char(Characteristics::new(a, b), z, UpperHalfPoint::imaginary(t)?, INNER_TOL)?.value)
}

/// `θ^{odd}(z, it)` value only, at the internal tolerance.
pub(crate) fn theta_odd_it(z: Complex64, t: f64) -> Result<Complex64, ThetaError> {
    Ok(eval_theta_parity(Parity::Odd, Characteristics::ZERO, z, UpperHalfPoint::imaginary(t)?, INNER_TOL)?.value)
}

/// `(c(t), C(t)) = (θ(1/2, it), θ(0, it))`, the minimum and maximum of
/// `x ↦ θ(x, it)` on the real line.
pub fn extreme_values(t: f64) -> Result<(f64, f64), ThetaError> {
    let c = theta_it(Complex64::new(0.5, 0.0), t)?.re;
    let big_c = theta_it(Complex64::new(0.0, 0.0), t)?.re;
    Ok((c, big_c))
}

/// Minimum of `θ(x, it)` over `x = k/points`, `k = 0..=points`, and `x = 1/2`.
pub fn theta_grid_min(t: f64, points: usize) -> Result<f64, ThetaError> {
    let mut best = theta_it(Complex64::new(0.5, 0.0), t)?.re;
    for k in 0..=points {
        let x = k as f64 / points as f64;
        best = best.min(theta_it(Complex64::new(x, 0.0), t)?.re);
    }
    Ok(best)
}

/// The quantities bounding `C(t)(C(t) - 1)/c(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundFunctions {
    pub t: f64,
    /// `r = e^{-πt}`.
    pub r: f64,
    pub c: f64,
    #[serde(rename = "C")]
    pub big_c: f64,
    /// `h(t) = exp(4r/((1-r)(1-r²)))`, bounding `C/c`.
    pub h: f64,
    /// `g(r) = 2r/(1-r³) · h`, bounding `C(C-1)/c`.
    pub g: f64,
    /// `φ(r) = 4r/((1-r)(1-r³)) + ln 2 + ln(r/(1-r³))`.
    pub phi: f64,
    /// `x = 1/r`, the point where `ψ(x) = φ(r)`.
    pub psi_domain_point: f64,
}

pub fn h_of_r(r: f64) -> f64 {
    (4.0 * r / ((1.0 - r) * (1.0 - r * r))).exp()
}

pub fn g_of_r(r: f64) -> f64 {
    2.0 * r / (1.0 - r.powi(3)) * h_of_r(r)
}

pub fn phi_of_r(r: f64) -> f64 {
    let r3 = 1.0 - r.powi(3);
    4.0 * r / ((1.0 - r) * r3) + LN_2 + (r / r3).ln()
}

pub fn psi(x: f64) -> f64 {
    let x3 = x.powi(3) - 1.0;
    4.0 * x.powi(3) / ((x - 1.0) * x3) + LN_2 + 2.0 * x.ln() - x3.ln()
}

pub fn bound_suite(t: f64) -> Result<BoundFunctions, ThetaError> {
    let (c, big_c) = extreme_values(t)?;
    let r = (-PI * t).exp();
    Ok(BoundFunctions {
        t,
        r,
        c,
        big_c,
        h: h_of_r(r),
        g: g_of_r(r),
        phi: phi_of_r(r),
        psi_domain_point: 1.0 / r,
    })
}

/// Root `x0` of `ψ` and `t0 = ln(x0)/π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Threshold {
    pub x0: f64,
    pub t0: f64,
}

/// Bisection for `ψ(x) = 0` on `(1, 20)` to absolute width `1e-10`.
pub fn find_threshold() -> Result<Threshold, ThetaError> {
    let (mut lo, mut hi) = (1.0_f64, 20.0_f64);
    if !(psi(lo + 1e-6) > 0.0 && psi(hi) < 0.0) {
        return Err(ThetaError::NotBracketed { lo, hi });
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if psi(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x0 = 0.5 * (lo + hi);
    Ok(Threshold { x0, t0: x0.ln() / PI })
}

/// `θ(z, τ)` from the infinite product, truncated once factors reach 1 to
/// machine precision. Used as an independent route to the series.
pub fn theta_product(z: Complex64, tau: UpperHalfPoint) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let tau = tau.to_complex();
    let nome = (i * PI * tau).exp();
    let w = (2.0 * PI * i * z).exp();
    let mut prod = Complex64::new(1.0, 0.0);
    let mut m = 1;
    loop {
        let q2m = nome.powi(2 * m);
        let q2m1 = nome.powi(2 * m - 1);
        prod *= (Complex64::new(1.0, 0.0) - q2m) * (1.0 + q2m1 * w) * (1.0 + q2m1 / w);
        if q2m1.norm() * (w.norm() + 1.0 / w.norm()) < 1e-18 {
            break;
        }
        m += 1;
    }
    prod
}

/// Which sampled points enter each classical identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalSamples {
    /// `α` values for `θ(0, iα) = α^{-1/2} θ(0, i/α)`.
    pub modular_alphas: Vec<f64>,
    /// `(x, t)` points for `θ(x/(it), i/t) = √t e^{πx²/t} θ(x, it)`.
    pub transform_points: Vec<(f64, f64)>,
    /// `(x, y, t)` points for the product expansion at `z = x + iy`, `τ = it`.
    pub product_points: Vec<(f64, f64, f64)>,
    /// `(x, q)` points for `θ(z + ilq/2, iq/2) = e^{πql²/2 - 2πilz} θ(z, iq/2)`, `l ∈ -2..=2`.
    pub quasi_points: Vec<(f64, f64)>,
    /// `t` values for Jacobi's quartic identity.
    pub jacobi_ts: Vec<f64>,
    /// Samples for `θ(0,it)² < θ(0,it) + θ(1/2,it)`.
    pub abstract_ts: Vec<f64>,
    /// Samples for `C(t)(C(t) - 1) < c(t)`.
    pub ratio_ts: Vec<f64>,
}

/// `n` uniform points `lo + (hi - lo) k/n`, `k = 1..=n`.
pub fn left_open_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect()
}

impl Default for ClassicalSamples {
    fn default() -> Self {
        let xs = [0.0, 0.1, 0.25, 0.4, 0.7];
        let ts = [0.3, 0.7, 1.0, 1.7, 3.0];
        let transform_points = xs.iter().flat_map(|&x| ts.iter().map(move |&t| (x, t))).collect();
        Self {
            modular_alphas: vec![0.3, 0.7, 1.6],
            transform_points,
            product_points: vec![(0.1, 0.0, 1.0), (0.37, 0.2, 1.0), (0.25, -0.3, 0.6), (0.8, 0.1, 2.5)],
            quasi_points: vec![(0.1, 2.0), (0.37, 3.0), (0.8, 4.0)],
            jacobi_ts: vec![1.0, 0.5, 2.0],
            abstract_ts: left_open_grid(0.5, 5.0, 200),
            ratio_ts: left_open_grid(0.527, 5.0, 200),
        }
    }
}

/// Worst relative residual of one identity over its samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub name: String,
    pub max_residual: f64,
    pub tol: f64,
    pub passed: bool,
    pub worst_sample: String,
}

/// Outcome of a strict inequality at every sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub name: String,
    pub samples: usize,
    pub holds_everywhere: bool,
    /// Smallest value of `rhs - lhs` seen.
    pub min_margin: f64,
    pub failing_samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalReport {
    pub identities: Vec<IdentityResidual>,
    pub inequalities: Vec<InequalityCheck>,
}

impl ClassicalReport {
    pub fn passed(&self) -> bool {
        self.identities.iter().all(|r| r.passed) && self.inequalities.iter().all(|r| r.holds_everywhere)
    }
}

pub(crate) fn rel_residual(lhs: Complex64, rhs: Complex64) -> f64 {
    let scale = lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE);
    (lhs - rhs).norm() / scale
}

pub(crate) struct Worst {
    name: String,
    tol: f64,
    max: f64,
    at: String,
}

impl Worst {
    pub(crate) fn new(name: impl Into<String>, tol: f64) -> Self {
        Self {
            name: name.into(),
            tol,
            max: 0.0,
            at: String::new(),
        }
    }

    pub(crate) fn record(&mut self, residual: f64, at: impl FnOnce() -> String) {
        if residual > self.max || residual.is_nan() || self.at.is_empty() {
            if residual > self.max || residual.is_nan() {
                self.max = if residual.is_nan() { f64::INFINITY } else { residual };
            }
            self.at = at();
        }
    }

    pub(crate) fn finish(self) -> IdentityResidual {
        IdentityResidual {
            name: self.name,
            max_residual: self.max,
            tol: self.tol,
            passed: self.max <= self.tol,
            worst_sample: self.at,
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn inequality(name: &str, ts: &[f64], margin: impl Fn(f64) -> Result<f64, ThetaError>) -> Result<InequalityCheck, ThetaError> {
    let mut min_margin = f64::INFINITY;
    let mut failing = Vec::new();
    for &t in ts {
        let m = margin(t)?;
        min_margin = min_margin.min(m);
        if !(m > 0.0) {
            failing.push(t);
        }
    }
    Ok(InequalityCheck {
        name: name.to_string(),
        samples: ts.len(),
        holds_everywhere: failing.is_empty(),
        min_margin,
        failing_samples: failing,
    })
}

/// Evaluates the classical theta identities and the two scalar inequalities.
pub fn check_classical_identities(samples: &ClassicalSamples, tol: f64) -> Result<ClassicalReport, ThetaError> {
    let zero = c(0.0, 0.0);
    let mut identities = Vec::new();

    let mut w = Worst::new("modularity theta(0,i a) = a^-1/2 theta(0,i/a)", tol);
    for &a in &samples.modular_alphas {
        let lhs = theta_it(zero, a)?;
        let rhs = theta_it(zero, 1.0 / a)? / a.sqrt();
        w.record(rel_residual(lhs, rhs), || format!("alpha={a}"));
    }
    identities.push(w.finish());

    let mut w = Worst::new("transformation theta(x/(it), i/t) = sqrt(t) e^(pi x^2/t) theta(x,it)", tol);
    for &(x, t) in &samples.transform_points {
        let lhs = theta_it(c(0.0, -x / t), 1.0 / t)?;
        let rhs = t.sqrt() * (PI * x * x / t).exp() * theta_it(c(x, 0.0), t)?;
        w.record(rel_residual(lhs, rhs), || format!("x={x}, t={t}"));
    }
    identities.push(w.finish());

    let mut w = Worst::new("product expansion", tol);
    for &(x, y, t) in &samples.product_points {
        let tau = UpperHalfPoint::imaginary(t)?;
        let z = c(x, y);
        let lhs = eval_theta(z, tau, INNER_TOL)?.value;
        w.record(rel_residual(lhs, theta_product(z, tau)), || format!("z={x}+{y}i, t={t}"));
    }
    identities.push(w.finish());

    let mut w = Worst::new("quasi-periodicity theta(z + ilq/2, iq/2)", tol);
    for &(x, q) in &samples.quasi_points {
        for l in -2i32..=2 {
            let z = c(x, 0.0);
            let lf = l as f64;
            let lhs = theta_it(z + c(0.0, lf * q / 2.0), q / 2.0)?;
            let factor = (c(PI * q * lf * lf / 2.0, 0.0) - c(0.0, 2.0 * PI * lf) * z).exp();
            w.record(rel_residual(lhs, factor * theta_it(z, q / 2.0)?), || format!("x={x}, q={q}, l={l}"));
        }
    }
    identities.push(w.finish());

    let mut w = Worst::new("Jacobi quartic identity", tol);
    for &t in &samples.jacobi_ts {
        let t00 = theta_it(zero, t)?;
        let t01 = theta_char_it(0.0, 0.5, zero, t)?;
        let t10 = theta_char_it(0.5, 0.0, zero, t)?;
        w.record(rel_residual(t00.powi(4), t01.powi(4) + t10.powi(4)), || format!("t={t}"));
    }
    identities.push(w.finish());

    let mut w = Worst::new("theta(1/2,i) = 2^-1/4 theta(0,i)", tol);
    let lhs = theta_it(c(0.5, 0.0), 1.0)?;
    w.record(rel_residual(lhs, theta_it(zero, 1.0)? * 2f64.powf(-0.25)), || "t=1".into());
    identities.push(w.finish());

    let inequalities = vec![
        inequality("theta(0,it)^2 < theta(0,it) + theta(1/2,it)", &samples.abstract_ts, |t| {
            let (small, big) = extreme_values(t)?;
            Ok(big + small - big * big)
        })?,
        inequality("C(t)(C(t)-1) < c(t)", &samples.ratio_ts, |t| {
            let (small, big) = extreme_values(t)?;
            Ok(small - big * (big - 1.0))
        })?,
    ];
    Ok(ClassicalReport {
        identities,
        inequalities,
    })
}
