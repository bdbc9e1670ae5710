//! Exact coefficients: rational functions in a formal unit `s` over `Q(i)`.
//!
//! `s` stands for `ρ^{1/2} = e^{πiα}`, so every half-integer power of `ρ`
//! is a monomial and the bracket identities become polynomial identities.

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::str::FromStr;

/// Gaussian rational `a + bi` with `a, b ∈ Q`.
pub type GaussRat = Complex<BigRational>;

pub fn gauss(re: i64, im: i64) -> GaussRat {
    Complex::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
}

pub fn gauss_ratio(re: (i64, i64), im: (i64, i64)) -> GaussRat {
    let r = |(n, d): (i64, i64)| BigRational::new(BigInt::from(n), BigInt::from(d));
    Complex::new(r(re), r(im))
}

/// Parses a decimal literal such as `0.25` or `-3` into an exact rational.
pub fn rational_from_decimal(text: &str) -> Option<BigRational> {
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let value = BigRational::new(numer, denom);
    Some(if neg { -value } else { value })
}

fn rat_to_f64(x: &BigRational) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

pub fn gauss_to_c64(x: &GaussRat) -> Complex64 {
    Complex64::new(rat_to_f64(&x.re), rat_to_f64(&x.im))
}

fn fmt_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Gaussian rational in the CLI syntax: `3`, `-1/2`, `(1/2)*i`, `(1 + 2*i)`.
pub fn fmt_gauss(x: &GaussRat) -> String {
    let wrap = |r: &BigRational| {
        let s = fmt_rational(r);
        if r.is_integer() {
            s
        } else {
            format!("({s})")
        }
    };
    let im_part = |r: &BigRational| {
        if r.is_one() {
            "i".to_string()
        } else if (-r).is_one() {
            "-i".to_string()
        } else {
            format!("{}*i", wrap(r))
        }
    };
    match (x.re.is_zero(), x.im.is_zero()) {
        (_, true) => fmt_rational(&x.re),
        (true, false) => im_part(&x.im),
        (false, false) => {
            let sign = if x.im.is_negative() { "-" } else { "+" };
            format!("({} {} {})", fmt_rational(&x.re), sign, im_part(&x.im.abs()))
        }
    }
}

/// `Σ_k c_k s^k`, stored from the lowest nonzero power upward.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    low: i64,
    coeffs: Vec<GaussRat>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self { low: 0, coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(gauss(1, 0))
    }

    pub fn constant(c: GaussRat) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: GaussRat, power: i64) -> Self {
        Self::from_coeffs(power, vec![c])
    }

    /// `s^k`.
    pub fn s_pow(power: i64) -> Self {
        Self::monomial(gauss(1, 0), power)
    }

    pub fn from_coeffs(low: i64, coeffs: Vec<GaussRat>) -> Self {
        let mut p = Self { low, coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        let lead_zeros = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead_zeros > 0 {
            self.coeffs.drain(..lead_zeros);
            self.low += lead_zeros as i64;
        }
        if self.coeffs.is_empty() {
            self.low = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.low == 0 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Lowest power with a nonzero coefficient (0 for the zero polynomial).
    pub fn low_degree(&self) -> i64 {
        self.low
    }

    pub fn high_degree(&self) -> i64 {
        self.low + self.coeffs.len() as i64 - 1
    }

    /// `(power, coefficient)` pairs in increasing power.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &GaussRat)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(k, c)| (self.low + k as i64, c))
    }

    pub fn coeff(&self, power: i64) -> GaussRat {
        let k = power - self.low;
        if k < 0 || k >= self.coeffs.len() as i64 {
            GaussRat::zero()
        } else {
            self.coeffs[k as usize].clone()
        }
    }

    pub fn leading(&self) -> Option<&GaussRat> {
        self.coeffs.last()
    }

    /// Multiplication by `s^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self { low: self.low + k, coeffs: self.coeffs.clone() }
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        Self::from_coeffs(self.low, self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let low = self.low.min(other.low);
        let high = self.high_degree().max(other.high_degree());
        let coeffs = (low..=high).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Self::from_coeffs(low, coeffs)
    }

    pub fn neg(&self) -> Self {
        Self { low: self.low, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![GaussRat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::from_coeffs(self.low + other.low, coeffs)
    }

    /// The involution `s ↦ s^{-1}` combined with complex conjugation of coefficients.
    pub fn conj(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let coeffs = self.coeffs.iter().rev().map(|c| c.conj()).collect();
        Self { low: -self.high_degree(), coeffs }
    }

    pub fn eval_c64(&self, s: Complex64) -> Complex64 {
        self.terms().map(|(k, c)| gauss_to_c64(c) * s.powi(k as i32)).sum()
    }

    /// Exact evaluation at a nonzero Gaussian rational.
    pub fn eval_exact(&self, s: &GaussRat) -> GaussRat {
        let inv = GaussRat::one() / s;
        let mut acc = GaussRat::zero();
        for (k, c) in self.terms() {
            let base = if k < 0 { &inv } else { s };
            acc += c * num_traits::pow(base.clone(), k.unsigned_abs() as usize);
        }
        acc
    }
}

/// Division with remainder of ordinary polynomials stored low power first.
fn poly_divrem(num: &[GaussRat], den: &[GaussRat]) -> (Vec<GaussRat>, Vec<GaussRat>) {
    let mut rem = num.to_vec();
    let dl = den.len();
    if rem.len() < dl {
        return (Vec::new(), rem);
    }
    let lead_inv = GaussRat::one() / den[dl - 1].clone();
    let mut quot = vec![GaussRat::zero(); rem.len() - dl + 1];
    for k in (0..quot.len()).rev() {
        let c = &rem[k + dl - 1] * &lead_inv;
        if !c.is_zero() {
            for (j, d) in den.iter().enumerate() {
                rem[k + j] -= &c * d;
            }
        }
        quot[k] = c;
    }
    rem.truncate(dl - 1);
    while rem.last().is_some_and(Zero::is_zero) {
        rem.pop();
    }
    (quot, rem)
}

fn poly_gcd(a: &[GaussRat], b: &[GaussRat]) -> Vec<GaussRat> {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    while !y.is_empty() {
        let (_, r) = poly_divrem(&x, &y);
        x = y;
        y = r;
    }
    if let Some(lead) = x.last().cloned() {
        for c in &mut x {
            *c = &*c / &lead;
        }
    }
    x
}

/// Error raised when a rational function is divided by zero or evaluated at a pole.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("division by a vanishing scalar")]
pub struct ZeroDivision;

/// `num / den` in canonical form: `den` has lowest power 0, is monic in its
/// highest power, and shares no nontrivial factor with `num`. Equal
/// rational functions therefore have equal representations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RatFunc {
    pub fn zero() -> Self {
        Self { num: LaurentPoly::zero(), den: LaurentPoly::one() }
    }

    pub fn one() -> Self {
        Self::from_poly(LaurentPoly::one())
    }

    pub fn from_poly(num: LaurentPoly) -> Self {
        Self { num, den: LaurentPoly::one() }
    }

    pub fn constant(c: GaussRat) -> Self {
        Self::from_poly(LaurentPoly::constant(c))
    }

    pub fn integer(n: i64) -> Self {
        Self::constant(gauss(n, 0))
    }

    pub fn s_pow(k: i64) -> Self {
        Self::from_poly(LaurentPoly::s_pow(k))
    }

    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, ZeroDivision> {
        if den.is_zero() {
            return Err(ZeroDivision);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let shift = den.low_degree();
        let (mut num, mut den) = (num.shift(-shift), den.shift(-shift));
        if den.high_degree() > 0 {
            let num_low = num.low_degree();
            let g = poly_gcd(&num.coeffs, &den.coeffs);
            if g.len() > 1 {
                num = LaurentPoly::from_coeffs(num_low, poly_divrem(&num.coeffs, &g).0);
                den = LaurentPoly::from_coeffs(0, poly_divrem(&den.coeffs, &g).0);
            }
        }
        let lead = den.leading().cloned().ok_or(ZeroDivision)?;
        if !lead.is_one() {
            let inv = GaussRat::one() / lead;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(Self { num, den })
    }

    pub fn numer(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denom(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The value if this is a constant (no dependence on `s`).
    pub fn as_constant(&self) -> Option<GaussRat> {
        if self.is_zero() {
            return Some(GaussRat::zero());
        }
        (self.den.is_one() && self.num.low_degree() == 0 && self.num.high_degree() == 0).then(|| self.num.coeff(0))
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return Self::new(self.num.add(&other.num), self.den.clone()).expect("nonzero denominator");
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        Self::new(num, self.den.mul(&other.den)).expect("nonzero denominator")
    }

    pub fn neg(&self) -> Self {
        Self { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return Self::from_poly(self.num.mul(&other.num));
        }
        Self::new(self.num.mul(&other.num), self.den.mul(&other.den)).expect("nonzero denominator")
    }

    /// Multiplication by `s^k`; stays canonical without reduction.
    pub fn shift(&self, k: i64) -> Self {
        Self { num: self.num.shift(k), den: self.den.clone() }
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<Self, ZeroDivision> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &Self) -> Result<Self, ZeroDivision> {
        Ok(self.mul(&other.inv()?))
    }

    /// Complex conjugate at `|s| = 1`: conjugate coefficients and send `s ↦ s^{-1}`.
    pub fn conj(&self) -> Self {
        if self.den.is_one() {
            return Self::from_poly(self.num.conj());
        }
        Self::new(self.num.conj(), self.den.conj()).expect("nonzero denominator")
    }

    /// Value at a complex `s`, refusing points where the denominator is
    /// numerically zero.
    pub fn eval_c64(&self, s: Complex64) -> Result<Complex64, ZeroDivision> {
        let d = self.den.eval_c64(s);
        let scale: f64 = self.den.terms().map(|(_, c)| gauss_to_c64(c).norm()).sum::<f64>().max(1.0);
        if d.norm() <= 1e-12 * scale {
            return Err(ZeroDivision);
        }
        Ok(self.num.eval_c64(s) / d)
    }

    /// Exact value at a nonzero Gaussian rational `s`.
    pub fn eval_exact(&self, s: &GaussRat) -> Result<GaussRat, ZeroDivision> {
        let d = self.den.eval_exact(s);
        if d.is_zero() {
            return Err(ZeroDivision);
        }
        Ok(self.num.eval_exact(s) / d)
    }
}

fn fmt_laurent(p: &LaurentPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, c) in p.terms() {
        let neg_real = c.im.is_zero() && c.re.is_negative();
        let mag = if neg_real { -c.clone() } else { c.clone() };
        let sep = match (out.is_empty(), neg_real) {
            (true, true) => "-",
            (true, false) => "",
            (false, true) => " - ",
            (false, false) => " + ",
        };
        out.push_str(sep);
        let power = if k == 0 { String::new() } else { format!("rho^({k}/2)") };
        match (mag.is_one(), power.is_empty()) {
            (true, true) => out.push('1'),
            (true, false) => out.push_str(&power),
            (false, true) => out.push_str(&fmt_gauss(&mag)),
            (false, false) => {
                out.push_str(&fmt_gauss(&mag));
                out.push('*');
                out.push_str(&power);
            }
        }
    }
    out
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_laurent(self))
    }
}

impl fmt::Display for RatFunc {
    /// Written in the CLI scalar syntax, e.g. `(rho^(1/2) - rho^(-1/2))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "({})", self.num)
        } else {
            write!(f, "(({}) / ({}))", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s_plus_inv() -> RatFunc {
        RatFunc::s_pow(1).add(&RatFunc::s_pow(-1))
    }

    #[test]
    fn canonical_form_is_syntactic() {
        // (s^2 - 1)/(s - 1) = s + 1
        let a = RatFunc::new(
            LaurentPoly::from_coeffs(0, vec![gauss(-1, 0), gauss(0, 0), gauss(1, 0)]),
            LaurentPoly::from_coeffs(0, vec![gauss(-1, 0), gauss(1, 0)]),
        )
        .unwrap();
        let b = RatFunc::from_poly(LaurentPoly::from_coeffs(0, vec![gauss(1, 0), gauss(1, 0)]));
        assert_eq!(a, b);
        let x = s_plus_inv();
        assert_eq!(x.inv().unwrap().mul(&x), RatFunc::one());
        let y = RatFunc::new(LaurentPoly::s_pow(3), LaurentPoly::from_coeffs(2, vec![gauss(0, 2), gauss(2, 0)])).unwrap();
        assert_eq!(y.denom().low_degree(), 0);
        assert!(y.denom().leading().unwrap().is_one());
    }

    #[test]
    fn conjugation_is_an_involution_matching_evaluation() {
        let x = RatFunc::new(
            LaurentPoly::from_coeffs(-1, vec![gauss(1, 2), gauss(0, 0), gauss(3, -1)]),
            LaurentPoly::from_coeffs(0, vec![gauss(2, 0), gauss(0, 1)]),
        )
        .unwrap();
        assert_eq!(x.conj().conj(), x);
        let s = Complex64::from_polar(1.0, 0.77);
        let lhs = x.conj().eval_c64(s).unwrap();
        let rhs = x.eval_c64(s).unwrap().conj();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn exact_evaluation_and_poles() {
        let x = s_plus_inv();
        assert!(x.eval_exact(&gauss(0, 1)).unwrap().is_zero());
        assert!(x.inv().unwrap().eval_exact(&gauss(0, 1)).is_err());
        assert!(x.inv().unwrap().eval_c64(Complex64::new(0.0, 1.0)).is_err());
        assert_eq!(x.eval_exact(&gauss(2, 0)).unwrap(), gauss_ratio((5, 2), (0, 1)));
    }

    #[test]
    fn decimal_literals() {
        assert_eq!(rational_from_decimal("0.25").unwrap(), BigRational::new(1.into(), 4.into()));
        assert_eq!(rational_from_decimal("-3").unwrap(), BigRational::from_integer((-3).into()));
        assert!(rational_from_decimal("1e3").is_none());
    }

    #[test]
    fn display_syntax() {
        assert_eq!(s_plus_inv().to_string(), "(rho^(-1/2) + rho^(1/2))");
        assert_eq!(fmt_gauss(&gauss_ratio((1, 2), (-3, 4))), "(1/2 - (3/4)*i)");
        assert_eq!(fmt_gauss(&gauss(0, -1)), "-i");
    }
}
