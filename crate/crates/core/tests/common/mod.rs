//! Independent reference computations used by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

pub type Mat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn cis(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

/// `Σ_{|m| ≤ radius} e^{πiτ(m+a)² + 2πi(m+a)(z+b)}`, optionally keeping only odd or even `m`.
pub fn theta_direct(a: f64, b: f64, z: Complex64, tau: Complex64, radius: i64, parity: Option<i64>) -> Complex64 {
    let i = c(0.0, 1.0);
    (-radius..=radius)
        .filter(|m| parity.is_none_or(|p| m.rem_euclid(2) == p))
        .map(|m| {
            let n = m as f64 + a;
            (i * PI * tau * n * n + 2.0 * i * PI * n * (z + b)).exp()
        })
        .sum()
}

pub fn theta0(z: Complex64, tau: Complex64) -> Complex64 {
    theta_direct(0.0, 0.0, z, tau, 80, None)
}

/// Trapezoid rule for `∫_R e^{-πs²} e^{-π(s + m2/√α)²} e^{2πi s m1/√α} ds` on `[-12, 12]`.
pub fn gaussian_integral(m1: i64, m2: i64, alpha: f64) -> Complex64 {
    let ra = alpha.sqrt();
    let shift = m2 as f64 / ra;
    let freq = m1 as f64 / ra;
    let (lo, hi, n) = (-12.0 - shift.abs(), 12.0 + shift.abs(), 20_000);
    let h = (hi - lo) / n as f64;
    (0..=n)
        .map(|k| {
            let s = lo + k as f64 * h;
            let w = if k == 0 || k == n { 0.5 } else { 1.0 };
            w * (-PI * s * s - PI * (s + shift).powi(2)).exp() * cis(2.0 * PI * s * freq)
        })
        .sum::<Complex64>()
        * h
}

/// `a(e^{2πit1}, e^{2πit2})` as the truncated double Fourier series of the Gaussian coefficients at `α = 1/q`.
pub fn symbol_direct(q: i64, t1: f64, t2: f64) -> Complex64 {
    let alpha = 1.0 / q as f64;
    let mut acc = c(0.0, 0.0);
    for m1 in -20i64..=20 {
        for m2 in -20i64..=20 {
            let (a, b) = (m1 as f64, m2 as f64);
            let coeff = std::f64::consts::FRAC_1_SQRT_2
                * Complex64::from_polar((-PI * (a * a + b * b) / (2.0 * alpha)).exp(), -PI * a * b / alpha);
            acc += coeff * cis(2.0 * PI * (a * t1 + b * t2));
        }
    }
    acc
}

/// `Σ_{r,s} e^{-π(r²+s²)/(2α) - πirs/α - πi(n1+in2)(r+is)} e^{2πi(r t1 + s t2)}` at `α = 1/q`.
pub fn shifted_symbol_direct(n1: i64, n2: i64, q: i64, t1: f64, t2: f64) -> Complex64 {
    let qf = q as f64;
    let i = c(0.0, 1.0);
    let nn = c(n1 as f64, n2 as f64);
    let mut acc = c(0.0, 0.0);
    for r in -20i64..=20 {
        for s in -20i64..=20 {
            let (rf, sf) = (r as f64, s as f64);
            let expo = -PI * qf * (rf * rf + sf * sf) / 2.0 - i * PI * qf * rf * sf - i * PI * nn * c(rf, sf)
                + 2.0 * PI * i * (rf * t1 + sf * t2);
            acc += expo.exp();
        }
    }
    acc
}

/// Untwisted shift `S e_k = e_{k+1}` and clock `D = diag(ω^{-k})`, `ω = e^{2πi/q}`.
pub fn shift_and_clock(q: usize) -> (Mat, Mat) {
    let mut s = Mat::zeros(q, q);
    let mut d = Mat::zeros(q, q);
    for k in 0..q {
        s[((k + 1) % q, k)] = c(1.0, 0.0);
        d[(k, k)] = cis(-2.0 * PI * k as f64 / q as f64);
    }
    (s, d)
}

pub fn mat_pow(m: &Mat, k: usize) -> Mat {
    (0..k).fold(Mat::identity(m.nrows(), m.ncols()), |acc, _| acc * m)
}

/// `α_n = mean_t tr((D^s S^r)* π_t(e)) e^{-2πi t·n}` with `(r, s) = n mod q`, over a `grid × grid` twist mesh.
pub fn matrix_side_coefficient(q: i64, n1: i64, n2: i64, grid: usize, e: impl Fn(f64, f64) -> Mat) -> Complex64 {
    let (s, d) = shift_and_clock(q as usize);
    let basis = mat_pow(&d, n2.rem_euclid(q) as usize) * mat_pow(&s, n1.rem_euclid(q) as usize);
    let basis_adj = basis.adjoint();
    let mut acc = c(0.0, 0.0);
    for i in 0..grid {
        for j in 0..grid {
            let (t1, t2) = (i as f64 / grid as f64, j as f64 / grid as f64);
            acc += (&basis_adj * e(t1, t2)).trace() * cis(-2.0 * PI * (t1 * n1 as f64 + t2 * n2 as f64));
        }
    }
    acc / (grid * grid) as f64
}

/// Harper matrix `M1 + M1* + (λ/2)(M2 + M2*)` built from scratch.
pub fn harper_direct(p: i64, q: usize, t1: f64, t2: f64, lambda: f64) -> Mat {
    let mut h = Mat::zeros(q, q);
    for k in 0..q {
        h[((k + 1) % q, k)] += cis(2.0 * PI * t1);
        h[(k, (k + 1) % q)] += cis(-2.0 * PI * t1);
        h[(k, k)] += c(lambda * (2.0 * PI * (t2 - (p * k as i64) as f64 / q as f64)).cos(), 0.0);
    }
    h
}

pub fn max_diff(a: &Mat, b: &Mat) -> f64 {
    (a - b).iter().map(|x| x.norm()).fold(0.0, f64::max)
}
