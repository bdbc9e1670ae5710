//! Normal-ordered Laurent polynomials `Σ a_{n,m} u^n v^m` with `uv = ρvu`.

use super::scalar::{gauss, gauss_to_c64, GaussRat, RatFunc, ZeroDivision};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("coefficient modes differ: {0:?} vs {1:?}")]
    ModeMismatch(Mode, Mode),
    #[error("operation needs float coefficients")]
    NeedsFloat,
    #[error("operation needs exact coefficients")]
    NeedsExact,
    #[error("matrix [[{a}, {b}], [{c}, {d}]] has determinant {det}, expected 1")]
    NotUnimodular { a: i64, b: i64, c: i64, d: i64, det: i64 },
    #[error("division by a non-scalar or vanishing element")]
    Division,
}

impl From<ZeroDivision> for AlgebraError {
    fn from(_: ZeroDivision) -> Self {
        AlgebraError::Division
    }
}

/// How coefficients are represented.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// Rational functions of the formal unit `s = ρ^{1/2}`.
    Exact,
    /// Complex doubles at a concrete `α`, with `s = e^{πiα}`.
    Float { alpha: f64 },
}

impl Mode {
    pub fn float(alpha: f64) -> Self {
        Mode::Float { alpha }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PhaseScalar {
    Exact(RatFunc),
    Float(Complex64),
}

impl PhaseScalar {
    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Exact => PhaseScalar::Exact(RatFunc::zero()),
            Mode::Float { .. } => PhaseScalar::Float(Complex64::new(0.0, 0.0)),
        }
    }

    pub fn one(mode: Mode) -> Self {
        Self::from_gauss(mode, &gauss(1, 0))
    }

    pub fn from_gauss(mode: Mode, c: &GaussRat) -> Self {
        match mode {
            Mode::Exact => PhaseScalar::Exact(RatFunc::constant(c.clone())),
            Mode::Float { .. } => PhaseScalar::Float(gauss_to_c64(c)),
        }
    }

    pub fn integer(mode: Mode, n: i64) -> Self {
        Self::from_gauss(mode, &gauss(n, 0))
    }

    /// `s^k = ρ^{k/2}`.
    pub fn s_pow(mode: Mode, k: i64) -> Self {
        match mode {
            Mode::Exact => PhaseScalar::Exact(RatFunc::s_pow(k)),
            Mode::Float { alpha } => PhaseScalar::Float(Complex64::from_polar(1.0, PI * alpha * k as f64)),
        }
    }

    /// Converts an exact scalar to the given mode.
    pub fn from_ratfunc(mode: Mode, x: &RatFunc) -> Result<Self, ZeroDivision> {
        match mode {
            Mode::Exact => Ok(PhaseScalar::Exact(x.clone())),
            Mode::Float { alpha } => Ok(PhaseScalar::Float(x.eval_c64(Complex64::from_polar(1.0, PI * alpha))?)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            PhaseScalar::Exact(x) => x.is_zero(),
            PhaseScalar::Float(x) => x.re == 0.0 && x.im == 0.0,
        }
    }

    pub fn as_exact(&self) -> Option<&RatFunc> {
        match self {
            PhaseScalar::Exact(x) => Some(x),
            PhaseScalar::Float(_) => None,
        }
    }

    pub fn as_float(&self) -> Option<Complex64> {
        match self {
            PhaseScalar::Float(x) => Some(*x),
            PhaseScalar::Exact(_) => None,
        }
    }

    fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (PhaseScalar::Exact(a), PhaseScalar::Exact(b)) => PhaseScalar::Exact(a.add(b)),
            (PhaseScalar::Float(a), PhaseScalar::Float(b)) => PhaseScalar::Float(a + b),
            _ => unreachable!("modes checked by the caller"),
        }
    }

    fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (PhaseScalar::Exact(a), PhaseScalar::Exact(b)) => PhaseScalar::Exact(a.mul(b)),
            (PhaseScalar::Float(a), PhaseScalar::Float(b)) => PhaseScalar::Float(a * b),
            _ => unreachable!("modes checked by the caller"),
        }
    }

    fn neg(&self) -> Self {
        match self {
            PhaseScalar::Exact(a) => PhaseScalar::Exact(a.neg()),
            PhaseScalar::Float(a) => PhaseScalar::Float(-a),
        }
    }

    fn conj(&self) -> Self {
        match self {
            PhaseScalar::Exact(a) => PhaseScalar::Exact(a.conj()),
            PhaseScalar::Float(a) => PhaseScalar::Float(a.conj()),
        }
    }

    fn inv(&self) -> Result<Self, ZeroDivision> {
        match self {
            PhaseScalar::Exact(a) => Ok(PhaseScalar::Exact(a.inv()?)),
            PhaseScalar::Float(a) if a.norm() > 0.0 => Ok(PhaseScalar::Float(a.inv())),
            PhaseScalar::Float(_) => Err(ZeroDivision),
        }
    }

    /// Multiplication by `s^k` without building the power.
    fn shift(&self, k: i64, mode: Mode) -> Self {
        match (self, mode) {
            (PhaseScalar::Exact(a), _) => PhaseScalar::Exact(a.shift(k)),
            (PhaseScalar::Float(a), Mode::Float { alpha }) => {
                PhaseScalar::Float(a * Complex64::from_polar(1.0, PI * alpha * k as f64))
            }
            (PhaseScalar::Float(_), Mode::Exact) => unreachable!("modes checked by the caller"),
        }
    }
}

impl fmt::Display for PhaseScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseScalar::Exact(x) => write!(f, "{x}"),
            PhaseScalar::Float(z) => write!(f, "({:.12e} + {:.12e}*i)", z.re, z.im),
        }
    }
}

/// An integer matrix `[[a, b], [c, d]]` of determinant one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SL2Matrix {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl SL2Matrix {
    pub const IDENTITY: Self = Self { a: 1, b: 0, c: 0, d: 1 };
    /// The Fourier automorphism: `u ↦ v`, `v ↦ u^{-1}`.
    pub const FOURIER: Self = Self { a: 0, b: 1, c: -1, d: 0 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, AlgebraError> {
        let det = a * d - b * c;
        if det != 1 {
            return Err(AlgebraError::NotUnimodular { a, b, c, d, det });
        }
        Ok(Self { a, b, c, d })
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

/// `Σ a_{n,m} u^n v^m` with no zero coefficient stored.
#[derive(Debug, Clone, PartialEq)]
pub struct NcPoly {
    mode: Mode,
    terms: BTreeMap<(i64, i64), PhaseScalar>,
}

impl NcPoly {
    pub fn zero(mode: Mode) -> Self {
        Self { mode, terms: BTreeMap::new() }
    }

    pub fn unit(mode: Mode) -> Self {
        Self::monomial(mode, 0, 0)
    }

    /// `u^n v^m`.
    pub fn monomial(mode: Mode, n: i64, m: i64) -> Self {
        Self::term(PhaseScalar::one(mode), n, m).with_mode(mode)
    }

    pub fn u(mode: Mode) -> Self {
        Self::monomial(mode, 1, 0)
    }

    pub fn v(mode: Mode) -> Self {
        Self::monomial(mode, 0, 1)
    }

    pub fn scalar(c: PhaseScalar, mode: Mode) -> Self {
        Self::term(c, 0, 0).with_mode(mode)
    }

    fn term(c: PhaseScalar, n: i64, m: i64) -> Self {
        let mode = match &c {
            PhaseScalar::Exact(_) => Mode::Exact,
            PhaseScalar::Float(_) => Mode::Float { alpha: f64::NAN },
        };
        let mut p = Self::zero(mode);
        if !c.is_zero() {
            p.terms.insert((n, m), c);
        }
        p
    }

    fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    /// Builds a polynomial from `((n, m), coefficient)` pairs; repeated keys add up.
    pub fn from_terms(mode: Mode, terms: impl IntoIterator<Item = ((i64, i64), PhaseScalar)>) -> Result<Self, AlgebraError> {
        let mut p = Self::zero(mode);
        for (key, c) in terms {
            check_scalar(mode, &c)?;
            p.accumulate(key, c);
        }
        Ok(p)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &PhaseScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, n: i64, m: i64) -> PhaseScalar {
        self.terms.get(&(n, m)).cloned().unwrap_or_else(|| PhaseScalar::zero(self.mode))
    }

    fn accumulate(&mut self, key: (i64, i64), c: PhaseScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(slot) => {
                let sum = slot.add(&c);
                if sum.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *slot = sum;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    fn same_mode(&self, other: &Self) -> Result<(), AlgebraError> {
        let ok = match (self.mode, other.mode) {
            (Mode::Exact, Mode::Exact) => true,
            (Mode::Float { alpha: a }, Mode::Float { alpha: b }) => a == b,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(AlgebraError::ModeMismatch(self.mode, other.mode))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_mode(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.accumulate(*k, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self { mode: self.mode, terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect() }
    }

    pub fn scale(&self, c: &PhaseScalar) -> Result<Self, AlgebraError> {
        check_scalar(self.mode, c)?;
        if c.is_zero() {
            return Ok(Self::zero(self.mode));
        }
        let terms = self
            .terms
            .iter()
            .map(|(k, a)| (*k, a.mul(c)))
            .filter(|(_, a)| !a.is_zero())
            .collect();
        Ok(Self { mode: self.mode, terms })
    }

    /// Multiplication by `s^k`.
    pub fn shift_phase(&self, k: i64) -> Self {
        let terms = self.terms.iter().map(|(key, a)| (*key, a.shift(k, self.mode))).collect();
        Self { mode: self.mode, terms }
    }

    /// Normal-ordered product: `(u^n v^m)(u^k v^l) = s^{-2mk} u^{n+k} v^{m+l}`.
    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_mode(other)?;
        let mut out = Self::zero(self.mode);
        for (&(n, m), a) in &self.terms {
            for (&(k, l), b) in &other.terms {
                out.accumulate((n + k, m + l), a.mul(b).shift(-2 * m * k, self.mode));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<Self, AlgebraError> {
        let mut acc = Self::unit(self.mode);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `(a u^n v^m)* = conj(a) s^{-2nm} u^{-n} v^{-m}`.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.mode);
        for (&(n, m), a) in &self.terms {
            out.accumulate((-n, -m), a.conj().shift(-2 * n * m, self.mode));
        }
        out
    }

    /// The canonical trace: the coefficient of `u^0 v^0`.
    pub fn trace(&self) -> PhaseScalar {
        self.coeff(0, 0)
    }

    /// The automorphism `u ↦ u^a v^b`, `v ↦ u^c v^d`.
    ///
    /// `σ_X(u^n v^m) = (u^a v^b)^n (u^c v^d)^m
    ///              = s^{-ab n(n-1) - cd m(m-1) - 2nm bc} u^{na+mc} v^{nb+md}`.
    pub fn apply_sl2(&self, x: &SL2Matrix) -> Self {
        let [a, b, c, d] = x.entries();
        let mut out = Self::zero(self.mode);
        for (&(n, m), coeff) in &self.terms {
            let phase = -a * b * n * (n - 1) - c * d * m * (m - 1) - 2 * n * m * b * c;
            out.accumulate((n * a + m * c, n * b + m * d), coeff.shift(phase, self.mode));
        }
        out
    }

    pub fn sigma(&self) -> Self {
        self.apply_sl2(&SL2Matrix::FOURIER)
    }

    /// `E(x) = (x + σx + σ²x + σ³x)/4`.
    pub fn expectation(&self) -> Self {
        let mut acc = self.clone();
        let mut cur = self.clone();
        for _ in 0..3 {
            cur = cur.sigma();
            acc = acc.add(&cur).expect("same mode");
        }
        let quarter = PhaseScalar::from_gauss(self.mode, &super::scalar::gauss_ratio((1, 4), (0, 1)));
        acc.scale(&quarter).expect("same mode")
    }

    /// Scales `u^n v^m` by `e^{2πi(n s1 + m s2)}`, the dual action of the torus.
    pub fn twist(&self, s1: f64, s2: f64) -> Result<Self, AlgebraError> {
        if !matches!(self.mode, Mode::Float { .. }) {
            return Err(AlgebraError::NeedsFloat);
        }
        let terms = self
            .terms
            .iter()
            .map(|(&(n, m), c)| {
                let ph = Complex64::from_polar(1.0, 2.0 * PI * (n as f64 * s1 + m as f64 * s2));
                ((n, m), PhaseScalar::Float(c.as_float().expect("float mode") * ph))
            })
            .collect();
        Ok(Self { mode: self.mode, terms })
    }

    /// Substitutes `s = e^{πiα}` in every coefficient.
    pub fn to_float(&self, alpha: f64) -> Result<Self, AlgebraError> {
        let mode = Mode::Float { alpha };
        match self.mode {
            Mode::Float { alpha: a } if a == alpha => return Ok(self.clone()),
            Mode::Float { .. } => return Err(AlgebraError::NeedsExact),
            Mode::Exact => {}
        }
        let mut out = Self::zero(mode);
        for (k, c) in &self.terms {
            let x = c.as_exact().expect("exact mode");
            out.accumulate(*k, PhaseScalar::from_ratfunc(mode, x)?);
        }
        Ok(out)
    }

    /// Substitutes an exact value `s = s0 ∈ Q(i)` in every coefficient.
    ///
    /// Coefficients of the result are constants. Products of specialized
    /// polynomials still carry formal phases, so specialize again after
    /// multiplying: specialization is a ring homomorphism, hence
    /// `spec(x·y) = spec(spec(x)·spec(y))`.
    pub fn specialize(&self, s0: &GaussRat) -> Result<Self, AlgebraError> {
        if self.mode != Mode::Exact {
            return Err(AlgebraError::NeedsExact);
        }
        let mut out = Self::zero(Mode::Exact);
        for (k, c) in &self.terms {
            let value = c.as_exact().expect("exact mode").eval_exact(s0)?;
            out.accumulate(*k, PhaseScalar::Exact(RatFunc::constant(value)));
        }
        Ok(out)
    }

    /// The scalar value if this polynomial is a multiple of the unit.
    pub fn as_scalar(&self) -> Option<PhaseScalar> {
        match self.terms.len() {
            0 => Some(PhaseScalar::zero(self.mode)),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    /// Division by an element that is a nonzero multiple of the unit.
    pub fn div_scalar(&self, divisor: &Self) -> Result<Self, AlgebraError> {
        self.same_mode(divisor)?;
        let c = divisor.as_scalar().ok_or(AlgebraError::Division)?;
        self.scale(&c.inv()?)
    }

    /// Sum of coefficient moduli (float mode) as a crude size measure.
    pub fn l1_norm(&self) -> Result<f64, AlgebraError> {
        self.terms
            .values()
            .map(|c| c.as_float().map(|z| z.norm()).ok_or(AlgebraError::NeedsFloat))
            .sum()
    }

    /// Largest coefficient modulus of `self - other` (float mode).
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, AlgebraError> {
        let diff = self.sub(other)?;
        diff.terms
            .values()
            .map(|c| c.as_float().map(|z| z.norm()).ok_or(AlgebraError::NeedsFloat))
            .try_fold(0.0_f64, |acc, x| x.map(|x| acc.max(x)))
    }
}

fn check_scalar(mode: Mode, c: &PhaseScalar) -> Result<(), AlgebraError> {
    match (mode, c) {
        (Mode::Exact, PhaseScalar::Exact(_)) | (Mode::Float { .. }, PhaseScalar::Float(_)) => Ok(()),
        (Mode::Exact, PhaseScalar::Float(_)) => Err(AlgebraError::NeedsExact),
        (Mode::Float { .. }, PhaseScalar::Exact(_)) => Err(AlgebraError::NeedsFloat),
    }
}

impl fmt::Display for NcPoly {
    /// Written in the CLI expression syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (&(n, m), c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let mono = match (n, m) {
                (0, 0) => String::new(),
                (n, 0) => format!("u^{n}"),
                (0, m) => format!("v^{m}"),
                (n, m) => format!("u^{n} v^{m}"),
            };
            if mono.is_empty() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{mono}")?;
            }
        }
        Ok(())
    }
}

/// `[n, m] = ρ^{-nm/2}(u^n v^m + u^{-n} v^{-m})`.
pub fn bracket(mode: Mode, n: i64, m: i64) -> NcPoly {
    NcPoly::monomial(mode, n, m)
        .add(&NcPoly::monomial(mode, -n, -m))
        .expect("same mode")
        .shift_phase(-n * m)
}

/// `{n, m} = [n, m] + [-m, n]`.
pub fn curly(mode: Mode, n: i64, m: i64) -> NcPoly {
    bracket(mode, n, m).add(&bracket(mode, -m, n)).expect("same mode")
}

/// The Harper element `u + u* + (λ/2)(v + v*)` with rational `λ = num/den`.
pub fn harper_exact(lambda_num: i64, lambda_den: i64) -> NcPoly {
    let mode = Mode::Exact;
    let half = PhaseScalar::from_gauss(mode, &super::scalar::gauss_ratio((lambda_num, 2 * lambda_den), (0, 1)));
    bracket(mode, 1, 0).add(&bracket(mode, 0, 1).scale(&half).expect("same mode")).expect("same mode")
}

/// The Harper element at float `α` and `λ`.
pub fn harper_float(alpha: f64, lambda: f64) -> NcPoly {
    let mode = Mode::Float { alpha };
    let half = PhaseScalar::Float(Complex64::new(lambda / 2.0, 0.0));
    bracket(mode, 1, 0).add(&bracket(mode, 0, 1).scale(&half).expect("same mode")).expect("same mode")
}
