//! The σ-invariant projection `e` of trace `1/q` in the rotation algebra at
//! `α = 1/q`: torus symbols, Fourier coefficients, closed matrix formulas in
//! the twisted representations, norm lower bounds, partition identities,
//! the invertibility criteria, and the theta identities that follow from `e² = e`.
//!
//! Throughout, `Θ(z) = θ(z, iq/2)` and `ρ = e^{2πi/q}`.
//!
//! `e = (1/q) Σ_n α_n v^{n2} u^{n1}` with
//!
//! ```text
//! α_n = e^{-π|n|²/(2q) + πi n1 n2/q} ∫_{[0,1]²} N(t1 - (n1+in2)/2, t2 - (n2+in1)/2) / N(t1, t2) dt
//! ```
//!
//! where `N = Θ(z1)Θ(z2)` for even `q` and `N = Θ(z1)Θ(z2) - 2Θ^{odd}(z1)Θ^{odd}(z2)` for odd `q`.
//! Invariance `σ(e) = e` is equivalent to `α_{-n2,n1} = ρ^{-n1 n2} α_{n1,n2}`.

use crate::nctorus::{AlgebraError, Mode, NcPoly, PhaseScalar};
use crate::repmat::{build_rep, represent, CMatrix, RepError};
use crate::theta::{
    extreme_values, g_of_r, h_of_r, rel_residual, theta_char_it, theta_it, theta_odd_it, IdentityResidual, ThetaError,
    Worst,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProjectorError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("denominator symbol vanishes at twist ({t1}, {t2})")]
    DenominatorVanishes { t1: f64, t2: f64 },
    #[error("alternative forms of phi0 disagree: {primary} vs {alternative}")]
    PhiFormsDisagree { primary: f64, alternative: f64 },
    #[error("not supported: {0}")]
    NotSupported(&'static str),
    #[error("generator matrix does not have a scalar q-th power")]
    NotScalarPower,
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

type Result<T> = std::result::Result<T, ProjectorError>;

fn cis(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_q(q: i64) -> Result<()> {
    if q < 2 {
        return Err(ProjectorError::InvalidParameter(format!("q must be at least 2, got {q}")));
    }
    Ok(())
}

/// `(1/√2) e^{-π(m1²+m2²)/(2α) - πi m1 m2/α}`, the Fourier coefficients of `⟨f, f⟩` for the Gaussian `f`.
pub fn gaussian_coeff(m1: i64, m2: i64, alpha: f64) -> Complex64 {
    let (m1, m2) = (m1 as f64, m2 as f64);
    FRAC_1_SQRT_2 * Complex64::from_polar((-PI * (m1 * m1 + m2 * m2) / (2.0 * alpha)).exp(), -PI * m1 * m2 / alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolVariant {
    Even,
    Odd,
    Shifted,
    ShiftedOdd,
}

/// A function on the torus `[0,1)²`, evaluated at `(e^{2πit1}, e^{2πit2})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TorusSymbol {
    pub q: i64,
    pub variant: SymbolVariant,
    pub shift: Option<(i64, i64)>,
}

/// `N(z1, z2)`, the symbol numerator at complex arguments.
fn symbol_numerator(q: i64, z1: Complex64, z2: Complex64) -> Result<Complex64> {
    let t = q as f64 / 2.0;
    let even = theta_it(z1, t)? * theta_it(z2, t)?;
    if q % 2 == 0 {
        return Ok(even);
    }
    Ok(even - 2.0 * theta_odd_it(z1, t)? * theta_odd_it(z2, t)?)
}

fn shift_point(n1: i64, n2: i64) -> (Complex64, Complex64) {
    (c(n1 as f64, n2 as f64) / 2.0, c(n2 as f64, n1 as f64) / 2.0)
}

impl TorusSymbol {
    pub fn base(q: i64) -> Result<Self> {
        check_q(q)?;
        let variant = if q % 2 == 0 { SymbolVariant::Even } else { SymbolVariant::Odd };
        Ok(Self { q, variant, shift: None })
    }

    pub fn shifted(q: i64, n1: i64, n2: i64) -> Result<Self> {
        check_q(q)?;
        let variant = if q % 2 == 0 { SymbolVariant::Shifted } else { SymbolVariant::ShiftedOdd };
        Ok(Self { q, variant, shift: Some((n1, n2)) })
    }

    pub fn eval(&self, t1: f64, t2: f64) -> Result<Complex64> {
        match self.shift {
            None => Ok(FRAC_1_SQRT_2 * symbol_numerator(self.q, c(t1, 0.0), c(t2, 0.0))?),
            Some((n1, n2)) => {
                let (w1, w2) = shift_point(n1, n2);
                symbol_numerator(self.q, t1 - w1, t2 - w2)
            }
        }
    }
}

/// The symbol `a` of `⟨f, f⟩` on the torus; real and positive.
pub fn symbol_a(q: i64, t1: f64, t2: f64) -> Result<Complex64> {
    TorusSymbol::base(q)?.eval(t1, t2)
}

/// The symbol `a^{(n1,n2)}`; with no shift it equals `√2 a`.
pub fn symbol_a_shifted(n1: i64, n2: i64, q: i64, t1: f64, t2: f64) -> Result<Complex64> {
    TorusSymbol::shifted(q, n1, n2)?.eval(t1, t2)
}

fn coefficient_prefactor(q: i64, n1: i64, n2: i64) -> Complex64 {
    let (n1, n2, qf) = (n1 as f64, n2 as f64, q as f64);
    Complex64::from_polar((-PI * (n1 * n1 + n2 * n2) / (2.0 * qf)).exp(), PI * n1 * n2 / qf)
}

/// Trapezoid quadrature of the coefficient integrals on a fixed grid.
///
/// For even `q` the integrand factorizes and each integral is a product of
/// two one-dimensional means.
#[derive(Debug, Clone)]
pub struct CoefficientQuadrature {
    q: i64,
    grid: usize,
    nodes: Vec<f64>,
    theta: Vec<Complex64>,
    /// `N(t_i, t_j)`, odd `q` only.
    denom: Vec<Complex64>,
}

pub const DEFAULT_QUAD_GRID: usize = 128;

impl CoefficientQuadrature {
    pub fn new(q: i64, grid: usize) -> Result<Self> {
        check_q(q)?;
        if grid < 64 || !grid.is_power_of_two() {
            return Err(ProjectorError::InvalidParameter(format!("grid must be a power of 2 and at least 64, got {grid}")));
        }
        let nodes: Vec<f64> = (0..grid).map(|i| i as f64 / grid as f64).collect();
        let t = q as f64 / 2.0;
        let theta = nodes.iter().map(|&x| theta_it(c(x, 0.0), t)).collect::<std::result::Result<Vec<_>, _>>()?;
        let mut denom = Vec::new();
        if q % 2 == 1 {
            let odd = nodes.iter().map(|&x| theta_odd_it(c(x, 0.0), t)).collect::<std::result::Result<Vec<_>, _>>()?;
            for i in 0..grid {
                for j in 0..grid {
                    denom.push(theta[i] * theta[j] - 2.0 * odd[i] * odd[j]);
                }
            }
        }
        Ok(Self { q, grid, nodes, theta, denom })
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    /// `α_{n1,n2}`.
    pub fn coefficient(&self, n1: i64, n2: i64) -> Result<Complex64> {
        let t = self.q as f64 / 2.0;
        let (w1, w2) = shift_point(n1, n2);
        let g = self.grid as f64;
        let shifted = |w: Complex64| -> Result<Vec<Complex64>> {
            Ok(self.nodes.iter().map(|&x| theta_it(x - w, t)).collect::<std::result::Result<Vec<_>, _>>()?)
        };
        let a1 = shifted(w1)?;
        let a2 = shifted(w2)?;
        let integral = if self.q % 2 == 0 {
            let m1: Complex64 = a1.iter().zip(&self.theta).map(|(x, y)| x / y).sum::<Complex64>() / g;
            let m2: Complex64 = a2.iter().zip(&self.theta).map(|(x, y)| x / y).sum::<Complex64>() / g;
            m1 * m2
        } else {
            let odd = |w: Complex64| -> Result<Vec<Complex64>> {
                Ok(self.nodes.iter().map(|&x| theta_odd_it(x - w, t)).collect::<std::result::Result<Vec<_>, _>>()?)
            };
            let b1 = odd(w1)?;
            let b2 = odd(w2)?;
            let mut acc = c(0.0, 0.0);
            for i in 0..self.grid {
                for j in 0..self.grid {
                    acc += (a1[i] * a2[j] - 2.0 * b1[i] * b2[j]) / self.denom[i * self.grid + j];
                }
            }
            acc / (g * g)
        };
        Ok(coefficient_prefactor(self.q, n1, n2) * integral)
    }
}

/// `α_{n1,n2}` by trapezoid quadrature on a `grid × grid` mesh.
pub fn fourier_coeff_alpha(n1: i64, n2: i64, q: i64, grid: usize) -> Result<Complex64> {
    CoefficientQuadrature::new(q, grid)?.coefficient(n1, n2)
}

/// Index set `max(|n1|, |n2|) ≤ n`.
fn box_indices(n: i64) -> impl Iterator<Item = (i64, i64)> {
    (-n..=n).flat_map(move |a| (-n..=n).map(move |b| (a, b)))
}

#[derive(Debug, Clone)]
pub struct ProjectionSeries {
    pub q: i64,
    pub n: i64,
    pub grid: usize,
    /// Float-mode polynomial at `α = 1/q`.
    pub poly: NcPoly,
    /// `Σ |α_n|/q` over the shell `n < max(|n1|,|n2|) ≤ 2n`.
    pub tail_mass: f64,
}

/// `e` truncated to `max(|n1|, |n2|) ≤ n`, as a polynomial in normal order `u^{n1} v^{n2}`.
pub fn projection_series(q: i64, n: i64) -> Result<ProjectionSeries> {
    projection_series_with(q, n, DEFAULT_QUAD_GRID)
}

pub fn projection_series_with(q: i64, n: i64, grid: usize) -> Result<ProjectionSeries> {
    check_q(q)?;
    if n < 2 * q {
        return Err(ProjectorError::InvalidParameter(format!("truncation {n} is below 2q = {}", 2 * q)));
    }
    let quad = CoefficientQuadrature::new(q, grid)?;
    let mode = Mode::float(1.0 / q as f64);
    let qf = q as f64;
    let mut terms = Vec::new();
    for (n1, n2) in box_indices(n) {
        // v^{n2} u^{n1} = ρ^{-n1 n2} u^{n1} v^{n2}
        let phase = cis(-2.0 * PI * ((n1 * n2).rem_euclid(q)) as f64 / qf);
        let value = quad.coefficient(n1, n2)? * phase / qf;
        terms.push(((n1, n2), PhaseScalar::Float(value)));
    }
    let poly = NcPoly::from_terms(mode, terms)?;
    let mut tail_mass = 0.0;
    for (n1, n2) in box_indices(2 * n) {
        if n1.abs().max(n2.abs()) > n {
            tail_mass += quad.coefficient(n1, n2)?.norm() / qf;
        }
    }
    Ok(ProjectionSeries { q, n, grid, poly, tail_mass })
}

fn matrix_power(m: &CMatrix, k: usize) -> CMatrix {
    let mut out = CMatrix::identity(m.nrows(), m.ncols());
    for _ in 0..k {
        out = &out * m;
    }
    out
}

/// `U^k` for a unitary `U` and any integer `k`.
fn unitary_power(m: &CMatrix, k: i64) -> CMatrix {
    let p = matrix_power(m, k.unsigned_abs() as usize);
    if k < 0 {
        p.adjoint()
    } else {
        p
    }
}

/// Splits a unitary `A` with `A^q = λ I` as `A = e^{2πit} Ũ` with `Ũ^q = I`; returns `(t, Ũ)`.
fn split_twist(a: &CMatrix, q: i64) -> Result<(f64, CMatrix)> {
    let power = matrix_power(a, q as usize);
    let lambda = power[(0, 0)];
    let scalar = CMatrix::identity(a.nrows(), a.ncols()) * lambda;
    if (power - scalar).iter().map(|x| x.norm()).fold(0.0, f64::max) > 1e-9 || (lambda.norm() - 1.0).abs() > 1e-9 {
        return Err(ProjectorError::NotScalarPower);
    }
    let t = lambda.arg() / (2.0 * PI * q as f64);
    Ok((t, a * cis(-2.0 * PI * t)))
}

/// `θ^{(Q)}_{a/Q, b}(U, iy) = Σ_m e^{-πy(m+a/Q)² + 2πi(m+a/Q)b} U^{Qm+a}` summed directly over `|m| ≤ radius`.
pub fn operator_theta_direct(big_q: i64, a: i64, b: f64, y: f64, u: &CMatrix, radius: i64) -> CMatrix {
    let mut out = CMatrix::zeros(u.nrows(), u.ncols());
    let qf = big_q as f64;
    for m in -radius..=radius {
        let x = m as f64 + a as f64 / qf;
        let coeff = Complex64::from_polar((-PI * y * x * x).exp(), 2.0 * PI * x * b);
        out += unitary_power(u, big_q * m + a) * coeff;
    }
    out
}

/// The same series collapsed in a representation where `U = e^{2πit} Ũ`, `Ũ^q = I` and `q | Q`:
/// it equals `θ_{a/Q, b}(Q t, iy) Ũ^{a mod q}`. Returns the scalar factor.
fn operator_theta_scalar(big_q: i64, a: i64, b: f64, y: f64, t: f64) -> Result<Complex64> {
    Ok(theta_char_it(a as f64 / big_q as f64, b, c(big_q as f64 * t, 0.0), y)?)
}

/// The operator series in its collapsed form, for comparison with [`operator_theta_direct`].
pub fn operator_theta_collapsed(q: i64, big_q: i64, a: i64, b: f64, y: f64, u: &CMatrix) -> Result<CMatrix> {
    if big_q % q != 0 {
        return Err(ProjectorError::InvalidParameter(format!("{q} does not divide {big_q}")));
    }
    let (t, reduced) = split_twist(u, q)?;
    Ok(matrix_power(&reduced, a.rem_euclid(q) as usize) * operator_theta_scalar(big_q, a, b, y, t)?)
}

/// Evaluates the closed formula for `e` on generator images `A1 = π(u)`, `A2 = π(v)` with
/// `A1 A2 = ρ A2 A1` and `A1^q`, `A2^q` scalar.
///
/// Even `q`:
/// ```text
/// Σ_{r,s} e^{-πirs/q} θ_{s/q,r/2}(q t2, iq/2) θ_{r/q,s/2}(q t1, iq/2) Ũ2^s Ũ1^r / (q Θ(q t2) Θ(q t1))
/// ```
/// Odd `q`, with `T = 2iq` and `ε ∈ {0,1}²`:
/// ```text
/// Σ_{r,s} e^{-πirs/q} Σ_ε (-1)^{ε1ε2} θ_{(s+qε2)/2q, r}(2q t2, T) θ_{(r+qε1)/2q, s}(2q t1, T) Ũ2^s Ũ1^r / (q D)
/// D = Σ_ε (-1)^{ε1ε2} θ_{ε2/2, 0}(2q t2, T) θ_{ε1/2, 0}(2q t1, T)
/// ```
pub fn projection_from_generators(q: i64, a1: &CMatrix, a2: &CMatrix) -> Result<CMatrix> {
    check_q(q)?;
    let (t1, u1) = split_twist(a1, q)?;
    let (t2, u2) = split_twist(a2, q)?;
    let dim = a1.nrows();
    let qf = q as f64;
    let mut u1_pows = vec![CMatrix::identity(dim, dim)];
    let mut u2_pows = vec![CMatrix::identity(dim, dim)];
    for k in 1..q as usize {
        u1_pows.push(&u1_pows[k - 1] * &u1);
        u2_pows.push(&u2_pows[k - 1] * &u2);
    }
    let sign = |e1: i64, e2: i64| if e1 * e2 == 1 { -1.0 } else { 1.0 };
    let (coeff, denom): (Box<dyn Fn(i64, i64) -> Result<Complex64>>, Complex64) = if q % 2 == 0 {
        let y = qf / 2.0;
        let den = qf * theta_it(c(qf * t2, 0.0), y)? * theta_it(c(qf * t1, 0.0), y)?;
        let f = move |r: i64, s: i64| -> Result<Complex64> {
            Ok(operator_theta_scalar(q, s, r as f64 / 2.0, y, t2)? * operator_theta_scalar(q, r, s as f64 / 2.0, y, t1)?)
        };
        (Box::new(f), den)
    } else {
        let big_q = 2 * q;
        let y = 2.0 * qf;
        let mut den = c(0.0, 0.0);
        for e1 in 0..2 {
            for e2 in 0..2 {
                den += sign(e1, e2) * operator_theta_scalar(big_q, q * e2, 0.0, y, t2)? * operator_theta_scalar(big_q, q * e1, 0.0, y, t1)?;
            }
        }
        let f = move |r: i64, s: i64| -> Result<Complex64> {
            let mut acc = c(0.0, 0.0);
            for e1 in 0..2 {
                for e2 in 0..2 {
                    acc += sign(e1, e2)
                        * operator_theta_scalar(big_q, s + q * e2, r as f64, y, t2)?
                        * operator_theta_scalar(big_q, r + q * e1, s as f64, y, t1)?;
                }
            }
            Ok(acc)
        };
        (Box::new(f), qf * den)
    };
    if !(denom.norm() > 1e-300) || !denom.is_finite() {
        return Err(ProjectorError::DenominatorVanishes { t1, t2 });
    }
    let mut out = CMatrix::zeros(dim, dim);
    for s in 0..q {
        let mut inner = CMatrix::zeros(dim, dim);
        for r in 0..q {
            let k = coeff(r, s)? * cis(-PI * (r * s) as f64 / qf);
            inner += &u1_pows[r as usize] * k;
        }
        out += &u2_pows[s as usize] * inner;
    }
    Ok(out / denom)
}

/// `π_{t1,t2}(e)` in the representation of `α = 1/q`.
pub fn projection_matrix(q: i64, t1: f64, t2: f64) -> Result<CMatrix> {
    check_q(q)?;
    let rep = build_rep(1, q, t1, t2)?;
    projection_from_generators(q, &rep.m1, &rep.m2)
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionCheck {
    pub q: i64,
    pub t1: f64,
    pub t2: f64,
    /// `‖e² - e‖₂`
    pub idempotency: f64,
    /// `‖e - e*‖₂`
    pub self_adjointness: f64,
    /// `|tr(e) - 1/q|` with the normalized trace.
    pub trace_deviation: f64,
}

pub fn check_projection(q: i64, t1: f64, t2: f64) -> Result<ProjectionCheck> {
    let e = projection_matrix(q, t1, t2)?;
    let qf = q as f64;
    Ok(ProjectionCheck {
        q,
        t1,
        t2,
        idempotency: spectral_norm(&(&e * &e - &e)),
        self_adjointness: spectral_norm(&(&e - e.adjoint())),
        trace_deviation: (e.trace() / qf - 1.0 / qf).norm(),
    })
}

/// Worst residuals of [`check_projection`] over the twist grid `(i/grid, j/grid)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionSweep {
    pub q: i64,
    pub grid: usize,
    pub max_idempotency: f64,
    pub max_self_adjointness: f64,
    pub max_trace_deviation: f64,
    pub checks: Vec<ProjectionCheck>,
}

pub fn projection_sweep(q: i64, grid: usize) -> Result<ProjectionSweep> {
    if grid < 1 {
        return Err(ProjectorError::InvalidParameter("twist grid must be positive".into()));
    }
    let mut checks = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        for j in 0..grid {
            checks.push(check_projection(q, i as f64 / grid as f64, j as f64 / grid as f64)?);
        }
    }
    let max = |f: fn(&ProjectionCheck) -> f64| checks.iter().map(f).fold(0.0, f64::max);
    Ok(ProjectionSweep {
        q,
        grid,
        max_idempotency: max(|c| c.idempotency),
        max_self_adjointness: max(|c| c.self_adjointness),
        max_trace_deviation: max(|c| c.trace_deviation),
        checks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiBounds {
    pub q: i64,
    pub parity: Parity,
    /// `φ0(1/q)` or `φ1(1/q)`.
    pub value: f64,
    /// Even `q`: the form with characteristics `θ_{0,1/2}` and `θ_{t,0}` at `τ = i/(2t)`.
    pub alternative: Option<f64>,
    /// Even `q`: `4 θ(t, 2it) θ(1/2, i/(2t)) / (θ(0, 2it) θ(0, i/(2t)))`.
    pub dual_form: Option<f64>,
}

/// `φ0(x) = 4 e^{-πx/2} θ(i/2, τ) θ(1/2, τ) / θ(0, τ)²` with `τ = i/(2x)`.
pub fn phi_even(x: f64) -> Result<f64> {
    check_x(x)?;
    let y = 1.0 / (2.0 * x);
    let v = 4.0 * (-PI * x / 2.0).exp() * theta_it(c(0.0, 0.5), y)? * theta_it(c(0.5, 0.0), y)? / theta_it(c(0.0, 0.0), y)?.powi(2);
    Ok(v.re)
}

/// `φ1(x) = 4 e^{-πx/2} (θθ - 2θ^{odd}θ^{odd})(i/2, 1/2) / (θ(0)² - 2θ^{odd}(0)²)` with `τ = i/(2x)`.
pub fn phi_odd(x: f64) -> Result<f64> {
    check_x(x)?;
    let y = 1.0 / (2.0 * x);
    let (zi, zh, z0) = (c(0.0, 0.5), c(0.5, 0.0), c(0.0, 0.0));
    let num = theta_it(zi, y)? * theta_it(zh, y)? - 2.0 * theta_odd_it(zi, y)? * theta_odd_it(zh, y)?;
    let den = theta_it(z0, y)?.powi(2) - 2.0 * theta_odd_it(z0, y)?.powi(2);
    Ok((4.0 * (-PI * x / 2.0).exp() * num / den).re)
}

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(ProjectorError::InvalidParameter(format!("x must be positive, got {x}")));
    }
    Ok(())
}

fn phi_even_characteristics(x: f64) -> Result<f64> {
    let y = 1.0 / (2.0 * x);
    let z = c(0.0, 0.0);
    Ok((4.0 * theta_char_it(0.0, 0.5, z, y)? * theta_char_it(x, 0.0, z, y)? / theta_it(z, y)?.powi(2)).re)
}

fn phi_even_dual(x: f64) -> Result<f64> {
    let (y, yd) = (1.0 / (2.0 * x), 2.0 * x);
    let z = c(0.0, 0.0);
    Ok((4.0 * theta_it(c(x, 0.0), yd)? * theta_it(c(0.5, 0.0), y)? / (theta_it(z, yd)? * theta_it(z, y)?)).re)
}

/// Lower bound for `‖H_{1/q}‖` with `λ = 2`.
pub fn phi_bounds(q: i64) -> Result<PhiBounds> {
    check_q(q)?;
    let x = 1.0 / q as f64;
    if q % 2 == 1 {
        return Ok(PhiBounds { q, parity: Parity::Odd, value: phi_odd(x)?, alternative: None, dual_form: None });
    }
    let value = phi_even(x)?;
    let alternative = phi_even_characteristics(x)?;
    let dual_form = phi_even_dual(x)?;
    for other in [alternative, dual_form] {
        if (other - value).abs() > 1e-10 {
            return Err(ProjectorError::PhiFormsDisagree { primary: value, alternative: other });
        }
    }
    Ok(PhiBounds { q, parity: Parity::Even, value, alternative: Some(alternative), dual_form: Some(dual_form) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompressionBound {
    pub q: i64,
    pub grid: usize,
    /// `F(1,1)/G(1,1)`
    pub at_one: f64,
    /// `max |F/G|` over `(e^{2πi j/grid}, e^{2πi k/grid})`
    pub sup_norm: f64,
    pub argmax: (f64, f64),
}

/// The symbol `F/G` of the compression `e H e` for even `q`, `λ = 2`.
///
/// ```text
/// F(z1,z2) = e^{-π/(2q)} Σ_m e^{-πq(m1²+m2²)/2} (2cosh(πm2)(-1)^{m1} + 2cosh(πm1)(-1)^{m2}) z1^{m1} z2^{m2}
/// G(z1,z2) = Σ_m e^{-πq(m1²+m2²)/2} z1^{m1} z2^{m2}
/// ```
/// Both factor into one-variable series.
pub fn compression_bound(q: i64, grid: usize) -> Result<CompressionBound> {
    check_q(q)?;
    if q % 2 == 1 {
        return Err(ProjectorError::NotSupported("compression bound for odd q"));
    }
    if grid < 1 {
        return Err(ProjectorError::InvalidParameter("grid must be positive".into()));
    }
    let qf = q as f64;
    let radius = 12i64;
    let series = |x: f64, weight: &dyn Fn(i64) -> f64| -> Complex64 {
        (-radius..=radius).map(|m| weight(m) * (-PI * qf * (m * m) as f64 / 2.0).exp() * cis(2.0 * PI * m as f64 * x)).sum()
    };
    let alt = |m: i64| if m % 2 == 0 { 1.0 } else { -1.0 };
    let cosh = |m: i64| 2.0 * (PI * m as f64).cosh();
    let one = |_: i64| 1.0;
    let ratio = |x1: f64, x2: f64| -> Complex64 {
        let (a1, a2) = (series(x1, &alt), series(x2, &alt));
        let (c1, c2) = (series(x1, &cosh), series(x2, &cosh));
        let g = series(x1, &one) * series(x2, &one);
        (-PI / (2.0 * qf)).exp() * (a1 * c2 + c1 * a2) / g
    };
    let at_one = ratio(0.0, 0.0).re;
    let mut sup_norm = f64::NEG_INFINITY;
    let mut argmax = (0.0, 0.0);
    for j in 0..grid {
        for k in 0..grid {
            let (x1, x2) = (j as f64 / grid as f64, k as f64 / grid as f64);
            let v = ratio(x1, x2).norm();
            if v > sup_norm {
                sup_norm = v;
                argmax = (x1, x2);
            }
        }
    }
    Ok(CompressionBound { q, grid, at_one, sup_norm, argmax })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionReport {
    pub q: i64,
    pub grid: usize,
    pub identities: Vec<IdentityResidual>,
}

impl PartitionReport {
    pub fn passed(&self) -> bool {
        self.identities.iter().all(|r| r.passed)
    }
}

fn residual_vs_identity(m: &CMatrix, k: f64) -> f64 {
    spectral_norm(&(m - CMatrix::identity(m.nrows(), m.ncols()) * c(k, 0.0)))
}

/// Partition identities on a `4 × 4` twist grid: all `q` get
/// `Σ_{c ∈ {0..q-1}²} π_{t + c/q}(e) = q I`; `q = 2` also gets
/// `e + ρ(e) = I` with `ρ(u) = -v`, `ρ(v) = -u`, and `Σ_{c ∈ {0,1/2}²} π_{t+c}(e) = 2 I`.
pub fn partition_checks(q: i64) -> Result<PartitionReport> {
    partition_checks_with(q, 4, 1e-9, 1e-8)
}

pub fn partition_checks_with(q: i64, grid: usize, tol_pair: f64, tol_sum: f64) -> Result<PartitionReport> {
    check_q(q)?;
    let qf = q as f64;
    let twists: Vec<(f64, f64)> =
        (0..grid).flat_map(|i| (0..grid).map(move |j| (i as f64 / grid as f64, j as f64 / grid as f64))).collect();
    let at = |t1: f64, t2: f64| move || format!("t=({t1}, {t2})");
    let mut out = Vec::new();
    if q == 2 {
        let mut pair = Worst::new("e + rho(e) = 1", tol_pair);
        let mut quarter = Worst::new("sum of e over half-period twists = 2", tol_pair);
        for &(t1, t2) in &twists {
            let rep = build_rep(1, 2, t1, t2)?;
            let e = projection_from_generators(2, &rep.m1, &rep.m2)?;
            let flipped = projection_from_generators(2, &(-&rep.m2), &(-&rep.m1))?;
            pair.record(residual_vs_identity(&(&e + flipped), 1.0), at(t1, t2));
            let mut sum = CMatrix::zeros(2, 2);
            for (c1, c2) in [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.5, 0.5)] {
                sum += projection_matrix(2, t1 + c1, t2 + c2)?;
            }
            quarter.record(residual_vs_identity(&sum, 2.0), at(t1, t2));
        }
        out.push(pair.finish());
        out.push(quarter.finish());
    }
    let mut full = Worst::new("sum of e over 1/q twists = q", tol_sum);
    for &(t1, t2) in &twists {
        let mut sum = CMatrix::zeros(q as usize, q as usize);
        for c1 in 0..q {
            for c2 in 0..q {
                sum += projection_matrix(q, t1 + c1 as f64 / qf, t2 + c2 as f64 / qf)?;
            }
        }
        full.record(residual_vs_identity(&sum, qf), at(t1, t2));
    }
    out.push(full.finish());
    Ok(PartitionReport { q, grid, identities: out })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaIdentityReport {
    pub samples: usize,
    pub seed: u64,
    pub identities: Vec<IdentityResidual>,
}

impl ThetaIdentityReport {
    pub fn passed(&self) -> bool {
        self.identities.iter().all(|r| r.passed)
    }
}

pub const THETA_IDENTITY_SEED: u64 = 0x7e7a;

/// Theta identities implied by `τ(e²) = τ(e)` at even `q`, the `q = 2` special case at
/// `τ = i`, and Riemann's relation at `τ = i` as a baseline, each at `samples` random points.
pub fn theta_identity_checks(qs: &[i64], samples: usize, tol: f64) -> Result<ThetaIdentityReport> {
    if !(tol > 0.0) {
        return Err(ProjectorError::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    if let Some(&q) = qs.iter().find(|&&q| q < 2 || q % 2 != 0) {
        return Err(ProjectorError::InvalidParameter(format!("q must be even and at least 2, got {q}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(THETA_IDENTITY_SEED);
    let mut out = Vec::new();
    let r = |z: f64| c(z, 0.0);
    for &q in qs {
        let y = q as f64 / 2.0;
        let qf = q as f64;
        let mut w37 = Worst::new(format!("trace of e^2, q={q}"), tol);
        let mut w38 = Worst::new(format!("reflected trace of e^2, q={q}"), tol);
        for _ in 0..samples {
            let (t1, t2): (f64, f64) = (rng.random(), rng.random());
            let rhs = qf * theta_it(r(t1), y)?.powi(2) * theta_it(r(t2), y)?.powi(2);
            let mut lhs37 = c(0.0, 0.0);
            let mut lhs38 = c(0.0, 0.0);
            for m in 0..q {
                for n in 0..q {
                    let (nq, m2, mq, n2) = (n as f64 / qf, m as f64 / 2.0, m as f64 / qf, n as f64 / 2.0);
                    let phase = cis(-4.0 * PI * (m * n) as f64 / qf);
                    let a = theta_char_it(nq, m2, r(t1), y)?;
                    let b = theta_char_it(mq, n2, r(t2), y)?;
                    lhs37 += phase * theta_char_it(-nq, -m2, r(t1), y)? * a * theta_char_it(-mq, -n2, r(t2), y)? * b;
                    lhs38 += phase * a * theta_char_it(nq, m2, r(-t1), y)? * b * theta_char_it(mq, n2, r(-t2), y)?;
                }
            }
            w37.record(rel_residual(lhs37, rhs), || format!("t=({t1}, {t2})"));
            w38.record(rel_residual(lhs38, rhs), || format!("t=({t1}, {t2})"));
        }
        out.push(w37.finish());
        out.push(w38.finish());
    }

    let th = |a: f64, b: f64, x: f64| theta_char_it(a, b, r(x), 1.0);
    let mut w39 = Worst::new("q=2 identity at tau=i", tol);
    for _ in 0..samples {
        let (x, u): (f64, f64) = (rng.random(), rng.random());
        let lhs = th(0.0, 0.5, x)?.powi(2) * th(0.5, 0.0, u)?.powi(2)
            + th(0.5, 0.0, x)?.powi(2) * th(0.0, 0.5, u)?.powi(2)
            + th(0.5, 0.5, x)?.powi(2) * th(0.5, 0.5, u)?.powi(2);
        let rhs = th(0.0, 0.0, x)?.powi(2) * th(0.0, 0.0, u)?.powi(2);
        w39.record(rel_residual(lhs, rhs), || format!("(x,u)=({x}, {u})"));
    }
    out.push(w39.finish());

    let mut a1 = Worst::new("Riemann relation, first equality, tau=i", tol);
    let mut a2 = Worst::new("Riemann relation, second equality, tau=i", tol);
    for _ in 0..samples {
        let (x, u): (f64, f64) = (rng.random(), rng.random());
        let left = th(0.0, 0.0, x)?.powi(2) * th(0.0, 0.0, u)?.powi(2) + th(0.5, 0.5, x)?.powi(2) * th(0.5, 0.5, u)?.powi(2);
        let mid = th(0.0, 0.5, x)?.powi(2) * th(0.0, 0.5, u)?.powi(2) + th(0.5, 0.0, x)?.powi(2) * th(0.5, 0.0, u)?.powi(2);
        let right = th(0.0, 0.0, x + u)? * th(0.0, 0.0, x - u)? * th(0.0, 0.0, 0.0)?.powi(2);
        a1.record(rel_residual(left, mid), || format!("(x,u)=({x}, {u})"));
        a2.record(rel_residual(mid, right), || format!("(x,u)=({x}, {u})"));
    }
    out.push(a1.finish());
    out.push(a2.finish());
    Ok(ThetaIdentityReport { samples, seed: THETA_IDENTITY_SEED, identities: out })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    InvertibleCriterionMet,
    CriterionNotMet,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    AlphaOutOfRange,
    QTooSmall,
    NotCoprime,
    GammaZero,
    GammaOutOfRange,
    NoResidueWitness,
    BoundNotBelowOne,
}

/// Constants and verdict of a sufficient invertibility criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub alpha: f64,
    pub p: Option<i64>,
    pub q: Option<i64>,
    /// `θ(1/2, it)` at `t = 1/(2α)`
    pub c: Option<f64>,
    /// `θ(0, it)` at `t = 1/(2α)`
    #[serde(rename = "C")]
    pub big_c: Option<f64>,
    pub h: Option<f64>,
    pub g: Option<f64>,
    /// The quantity that must be below 1.
    pub s: Option<f64>,
    pub r: Option<f64>,
    /// `α - p/q`, or `p/q - α` when mirrored.
    pub gamma: Option<f64>,
    pub mirrored: bool,
    /// `p0` with `p0² ≡ p`, or `p1` with `-p1² ≡ p` when mirrored, modulo `q`.
    pub residue_witness: Option<i64>,
    pub verdict: Verdict,
    pub reason: Option<Reason>,
    /// `qα - p`, or `p - qα` when mirrored.
    pub trace: Option<f64>,
}

impl BoundReport {
    fn empty(alpha: f64) -> Self {
        Self {
            alpha,
            p: None,
            q: None,
            c: None,
            big_c: None,
            h: None,
            g: None,
            s: None,
            r: None,
            gamma: None,
            mirrored: false,
            residue_witness: None,
            verdict: Verdict::NotApplicable,
            reason: None,
            trace: None,
        }
    }

    fn reject(mut self, verdict: Verdict, reason: Reason) -> Self {
        self.verdict = verdict;
        self.reason = Some(reason);
        self
    }
}

/// `θ(0, it) - 1 = 2 Σ_{m ≥ 1} e^{-πtm²}`, without cancellation.
fn theta_zero_minus_one(t: f64) -> f64 {
    let mut acc = 0.0;
    for m in 1..10_000i64 {
        let term = (-PI * t * (m * m) as f64).exp();
        acc += term;
        if term < 1e-18 * acc {
            break;
        }
    }
    2.0 * acc
}

/// Invertibility of the Gaussian frame operator at `α`: met iff `C(C - 1)/c < 1` at `t = 1/(2α)`.
pub fn invertibility_alpha(alpha: f64) -> Result<BoundReport> {
    let mut rep = BoundReport::empty(alpha);
    if !(alpha > 0.0 && alpha < 1.0) {
        return Ok(rep.reject(Verdict::NotApplicable, Reason::AlphaOutOfRange));
    }
    let t = 1.0 / (2.0 * alpha);
    let (small, big) = extreme_values(t)?;
    let bound = big * theta_zero_minus_one(t) / small;
    rep.c = Some(small);
    rep.big_c = Some(big);
    rep.s = Some(bound);
    if bound < 1.0 {
        rep.verdict = Verdict::InvertibleCriterionMet;
        Ok(rep)
    } else {
        Ok(rep.reject(Verdict::CriterionNotMet, Reason::BoundNotBelowOne))
    }
}

/// Criterion for a projection of trace `qα - p` (or `p - qα`) near `p/q`.
pub fn invertibility_pq(p: i64, q: i64, alpha: f64) -> Result<BoundReport> {
    let mut rep = BoundReport::empty(alpha);
    rep.p = Some(p);
    rep.q = Some(q);
    if q < 2 {
        return Ok(rep.reject(Verdict::NotApplicable, Reason::QTooSmall));
    }
    if num_integer::gcd(p, q) != 1 {
        return Ok(rep.reject(Verdict::NotApplicable, Reason::NotCoprime));
    }
    let qf = q as f64;
    let diff = alpha - p as f64 / qf;
    if diff == 0.0 {
        return Ok(rep.reject(Verdict::NotApplicable, Reason::GammaZero));
    }
    let mirrored = diff < 0.0;
    let gamma = diff.abs();
    rep.mirrored = mirrored;
    rep.gamma = Some(gamma);
    let target = p.rem_euclid(q);
    rep.residue_witness = (0..q).find(|&x| {
        let sq = (x * x).rem_euclid(q);
        if mirrored {
            (-sq).rem_euclid(q) == target
        } else {
            sq == target
        }
    });
    let r = (-PI / (2.0 * qf * qf * gamma)).exp();
    let g = g_of_r(r);
    rep.r = Some(r);
    rep.h = Some(h_of_r(r));
    rep.g = Some(g);
    rep.s = Some(g);
    if rep.residue_witness.is_none() {
        return Ok(rep.reject(Verdict::NotApplicable, Reason::NoResidueWitness));
    }
    if !(gamma < 0.948 / (qf * qf)) {
        return Ok(rep.reject(Verdict::NotApplicable, Reason::GammaOutOfRange));
    }
    if !(g < 1.0) {
        return Ok(rep.reject(Verdict::CriterionNotMet, Reason::BoundNotBelowOne));
    }
    rep.verdict = Verdict::InvertibleCriterionMet;
    rep.trace = Some(if mirrored { p as f64 - qf * alpha } else { qf * alpha - p as f64 });
    Ok(rep)
}

/// `‖A - B‖` entrywise maximum, for comparing routes to the same matrix.
pub fn max_entry_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// `π_{t1,t2}` of a truncated series, for comparison with [`projection_matrix`].
pub fn represent_series(series: &ProjectionSeries, t1: f64, t2: f64) -> Result<CMatrix> {
    let rep = build_rep(1, series.q, t1, t2)?;
    Ok(represent(&series.poly, &rep)?)
}
