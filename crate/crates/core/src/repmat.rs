//! Finite-dimensional representations of the rotation algebra at rational
//! `α = p/q`, Harper spectra and norms, and a truncated Gaussian operator on `ℓ²(Z)`.
//!
//! `π_{t1,t2}(u) = M1 = e^{2πit1} S` with `S e_k = e_{k+1 mod q}`, and
//! `π_{t1,t2}(v) = M2 = e^{2πit2} diag(ω^{-k})` with `ω = e^{2πip/q}`, so that
//! `M1 M2 = ω M2 M1`, matching `uv = ρvu`.

use crate::nctorus::{Mode, NcPoly};
use crate::theta::{extreme_values, theta_it, ThetaError};
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_integer::Integer;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

pub type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RepError {
    #[error("gcd({p}, {q}) != 1")]
    NotCoprime { p: i64, q: i64 },
    #[error("q must be at least 1, got {0}")]
    BadDimension(i64),
    #[error("polynomial is not in float mode at alpha = {p}/{q}")]
    ParameterMismatch { p: i64, q: i64 },
    #[error("parameter out of range: {0}")]
    OutOfRange(&'static str),
    #[error(transparent)]
    Theta(#[from] ThetaError),
}

fn cis(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

/// The representation `π_{t1,t2}` of the rotation algebra at `α = p/q`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistedRep {
    pub p: i64,
    pub q: i64,
    pub t1: f64,
    pub t2: f64,
    pub m1: CMatrix,
    pub m2: CMatrix,
}

pub fn build_rep(p: i64, q: i64, t1: f64, t2: f64) -> Result<TwistedRep, RepError> {
    if q < 1 {
        return Err(RepError::BadDimension(q));
    }
    if p.gcd(&q) != 1 {
        return Err(RepError::NotCoprime { p, q });
    }
    let n = q as usize;
    let m1 = monomial_matrix(p, q, t1, t2, 1, 0);
    let m2 = monomial_matrix(p, q, t1, t2, 0, 1);
    debug_assert_eq!(m1.nrows(), n);
    Ok(TwistedRep { p, q, t1, t2, m1, m2 })
}

/// `π_{t1,t2}(u^n v^m)`: entry `(k+n mod q, k)` equals `e^{2πi(n t1 + m t2)} ω^{-km}`.
pub fn monomial_matrix(p: i64, q: i64, t1: f64, t2: f64, n: i64, m: i64) -> CMatrix {
    let dim = q as usize;
    let mut out = CMatrix::zeros(dim, dim);
    let base = 2.0 * PI * (n as f64 * t1 + m as f64 * t2);
    for k in 0..q {
        let row = (k + n).rem_euclid(q) as usize;
        let phase = base - 2.0 * PI * ((p * k * m).rem_euclid(q)) as f64 / q as f64;
        out[(row, k as usize)] = cis(phase);
    }
    out
}

impl TwistedRep {
    pub fn dim(&self) -> usize {
        self.q as usize
    }

    pub fn alpha(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    pub fn monomial(&self, n: i64, m: i64) -> CMatrix {
        monomial_matrix(self.p, self.q, self.t1, self.t2, n, m)
    }

    /// The same representation with twists shifted by `(c1, c2)`.
    pub fn shifted(&self, c1: f64, c2: f64) -> Self {
        build_rep(self.p, self.q, self.t1 + c1, self.t2 + c2).expect("parameters already validated")
    }
}

/// Image of a float-mode polynomial at `α = p/q`.
pub fn represent(x: &NcPoly, rep: &TwistedRep) -> Result<CMatrix, RepError> {
    match x.mode() {
        Mode::Float { alpha } if (alpha - rep.alpha()).abs() <= 1e-12 => {}
        _ => return Err(RepError::ParameterMismatch { p: rep.p, q: rep.q }),
    }
    let q = rep.q;
    let dim = rep.dim();
    let mut out = CMatrix::zeros(dim, dim);
    for (&(n, m), c) in x.terms() {
        let c = c.as_float().expect("float mode");
        let base = 2.0 * PI * (n as f64 * rep.t1 + m as f64 * rep.t2);
        for k in 0..q {
            let row = (k + n).rem_euclid(q) as usize;
            let phase = base - 2.0 * PI * ((rep.p * k * m).rem_euclid(q)) as f64 / q as f64;
            out[(row, k as usize)] += c * cis(phase);
        }
    }
    Ok(out)
}

/// `π_{t1,t2}(u + u* + (λ/2)(v + v*))`, assembled directly.
pub fn harper_matrix(rep: &TwistedRep, lambda: f64) -> CMatrix {
    let q = rep.q;
    let dim = rep.dim();
    let mut h = CMatrix::zeros(dim, dim);
    let hop = cis(2.0 * PI * rep.t1);
    for k in 0..dim {
        let next = (k + 1) % dim;
        h[(next, k)] += hop;
        h[(k, next)] += hop.conj();
        let angle = 2.0 * PI * (rep.t2 - (rep.p * k as i64).rem_euclid(q) as f64 / q as f64);
        h[(k, k)] += Complex64::new(lambda * angle.cos(), 0.0);
    }
    h
}

/// Sorted eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn harper_eigs(p: i64, q: i64, lambda: f64, t1: f64, t2: f64) -> Vec<f64> {
    let rep = build_rep(p, q, t1, t2).expect("validated by caller");
    hermitian_eigenvalues(&harper_matrix(&rep, lambda))
}

/// Golden-section maximization of `f` on `[lo, hi]` to bracket width `tol`.
fn golden_max(f: &mut impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximizes `f(t1, t2)` over a `grid × grid` scan of `[0, 1/q)²` followed by
/// coordinate-wise golden-section refinement around the best cell.
fn scan_and_refine(q: i64, grid: usize, tol: f64, mut f: impl FnMut(f64, f64) -> f64) -> (f64, f64, f64) {
    let cell = 1.0 / (q as f64 * grid as f64);
    let mut best = (0.0, 0.0, f64::NEG_INFINITY);
    for i in 0..grid {
        for j in 0..grid {
            let (t1, t2) = (i as f64 * cell, j as f64 * cell);
            let v = f(t1, t2);
            if v > best.2 {
                best = (t1, t2, v);
            }
        }
    }
    let (mut t1, mut t2, mut value) = best;
    for _ in 0..2 {
        let (x, v) = golden_max(&mut |x| f(x, t2), t1 - cell, t1 + cell, tol);
        if v > value {
            t1 = x;
            value = v;
        }
        let (y, v) = golden_max(&mut |y| f(t1, y), t2 - cell, t2 + cell, tol);
        if v > value {
            t2 = y;
            value = v;
        }
    }
    (t1, t2, value)
}

pub const NORM_GRID: usize = 64;
pub const NORM_TOL: f64 = 1e-7;

/// `‖H_{p/q,λ}‖`: the largest eigenvalue modulus over all twists.
pub fn harper_norm(p: i64, q: i64, lambda: f64) -> Result<f64, RepError> {
    harper_norm_with(p, q, lambda, NORM_GRID, NORM_TOL)
}

pub fn harper_norm_with(p: i64, q: i64, lambda: f64, grid: usize, tol: f64) -> Result<f64, RepError> {
    build_rep(p, q, 0.0, 0.0)?;
    if !(lambda > 0.0) {
        return Err(RepError::OutOfRange("lambda must be positive"));
    }
    let (_, _, value) = scan_and_refine(q, grid.max(2), tol, |t1, t2| {
        let ev = harper_eigs(p, q, lambda, t1, t2);
        ev[0].abs().max(ev[ev.len() - 1].abs())
    });
    Ok(value)
}

/// Union of spectral bands over all twists.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumEstimate {
    pub bands: Vec<(f64, f64)>,
    pub grid_resolution: usize,
    pub refinement_tolerance: f64,
}

impl SpectrumEstimate {
    pub fn scaled(&self, factor: f64) -> Self {
        let mut bands: Vec<(f64, f64)> = self
            .bands
            .iter()
            .map(|&(a, b)| if factor >= 0.0 { (a * factor, b * factor) } else { (b * factor, a * factor) })
            .collect();
        bands.sort_by(|x, y| x.0.total_cmp(&y.0));
        Self { bands, ..self.clone() }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.bands.iter().any(|&(a, b)| a <= x && x <= b)
    }

    fn distance(&self, x: f64) -> f64 {
        self.bands
            .iter()
            .map(|&(a, b)| if x < a { a - x } else if x > b { x - b } else { 0.0 })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Bands `[min_j, max_j]` of the `j`-th eigenvalue over the twist torus.
///
/// Each edge found on the `grid × grid` scan is refined by golden-section
/// search; bands closer than `10 · tol` are merged.
pub fn spectrum(p: i64, q: i64, lambda: f64, grid: usize, tol: f64) -> Result<SpectrumEstimate, RepError> {
    build_rep(p, q, 0.0, 0.0)?;
    if grid < 2 {
        return Err(RepError::OutOfRange("grid must be at least 2"));
    }
    let dim = q as usize;
    let mut raw = Vec::with_capacity(dim);
    for j in 0..dim {
        let (_, _, hi) = scan_and_refine(q, grid, tol, |t1, t2| harper_eigs(p, q, lambda, t1, t2)[j]);
        let (_, _, neg_lo) = scan_and_refine(q, grid, tol, |t1, t2| -harper_eigs(p, q, lambda, t1, t2)[j]);
        raw.push((-neg_lo, hi));
    }
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut bands: Vec<(f64, f64)> = Vec::new();
    for (a, b) in raw {
        match bands.last_mut() {
            Some(last) if a <= last.1 + 10.0 * tol => last.1 = last.1.max(b),
            _ => bands.push((a, b)),
        }
    }
    Ok(SpectrumEstimate { bands, grid_resolution: grid, refinement_tolerance: tol })
}

/// Hausdorff distance between two finite unions of closed intervals.
pub fn hausdorff(a: &SpectrumEstimate, b: &SpectrumEstimate) -> f64 {
    fn one_sided(a: &SpectrumEstimate, b: &SpectrumEstimate) -> f64 {
        // The farthest point of A from B is an endpoint of A or the point of A
        // nearest a gap midpoint of B.
        let mut candidates: Vec<f64> = a.bands.iter().flat_map(|&(x, y)| [x, y]).collect();
        for w in b.bands.windows(2) {
            let mid = 0.5 * (w[0].1 + w[1].0);
            for &(x, y) in &a.bands {
                candidates.push(mid.clamp(x, y));
            }
        }
        candidates.into_iter().map(|x| b.distance(x)).fold(0.0, f64::max)
    }
    one_sided(a, b).max(one_sided(b, a))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityCheck {
    pub p: i64,
    pub q: i64,
    pub lambda: f64,
    pub residual: f64,
    pub direct: SpectrumEstimate,
    pub dual_scaled: SpectrumEstimate,
}

/// Compares `spec H_{α,λ}` with `(λ/2) spec H_{α,4/λ}`.
pub fn check_duality(p: i64, q: i64, lambda: f64, grid: usize, tol: f64) -> Result<DualityCheck, RepError> {
    if !(lambda > 0.0) {
        return Err(RepError::OutOfRange("lambda must be positive"));
    }
    let direct = spectrum(p, q, lambda, grid, tol)?;
    let dual_scaled = if lambda == 2.0 {
        direct.clone()
    } else {
        spectrum(p, q, 4.0 / lambda, grid, tol)?.scaled(lambda / 2.0)
    };
    let residual = hausdorff(&direct, &dual_scaled);
    Ok(DualityCheck { p, q, lambda, residual, direct, dual_scaled })
}

/// Matrix `⟨a ξ_k, ξ_l⟩ = (1/√2) e^{-π(l-k)²/(2α)} θ(-(l+k)/(2α), i/(2α))`, `|k|, |l| ≤ K`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedHeisenberg {
    pub alpha: f64,
    pub k: usize,
    pub matrix: DMatrix<f64>,
    pub min_singular_value: f64,
}

pub fn truncated_heisenberg(alpha: f64, k: usize) -> Result<TruncatedHeisenberg, RepError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(RepError::OutOfRange("alpha must lie in (0, 1)"));
    }
    if k < 8 {
        return Err(RepError::OutOfRange("K must be at least 8"));
    }
    let dim = 2 * k + 1;
    let t = 1.0 / (2.0 * alpha);
    let ki = k as i64;
    // β indexed by m = l + k.
    let beta: Vec<f64> = (-2 * ki..=2 * ki)
        .map(|m| theta_it(Complex64::new(-(m as f64) * t, 0.0), t).map(|z| z.re))
        .collect::<Result<_, _>>()?;
    let mut matrix = DMatrix::<f64>::zeros(dim, dim);
    for (li, l) in (-ki..=ki).enumerate() {
        for (kj, kk) in (-ki..=ki).enumerate() {
            let d = (l - kk) as f64;
            let a = (-PI * d * d * t).exp();
            matrix[(li, kj)] = a * beta[(l + kk + 2 * ki) as usize] / 2f64.sqrt();
        }
    }
    let sv = matrix.clone().singular_values();
    let min_singular_value = sv.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(TruncatedHeisenberg { alpha, k, matrix, min_singular_value })
}

/// `(c, C)` bounds for the diagonal of [`truncated_heisenberg`], divided by `√2`.
pub fn heisenberg_diagonal_bounds(alpha: f64) -> Result<(f64, f64), RepError> {
    let (c, big) = extreme_values(1.0 / (2.0 * alpha))?;
    Ok((c / 2f64.sqrt(), big / 2f64.sqrt()))
}

/// Twist-grid average of `(1/q) tr π_{t1,t2}(x)` on an `n × n` grid of `[0,1)²`.
pub fn averaged_trace(x: &NcPoly, p: i64, q: i64, n: usize) -> Result<Complex64, RepError> {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let rep = build_rep(p, q, i as f64 / n as f64, j as f64 / n as f64)?;
            acc += represent(x, &rep)?.trace() / q as f64;
        }
    }
    Ok(acc / (n * n) as f64)
}

/// Frobenius norm.
pub fn fro(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
