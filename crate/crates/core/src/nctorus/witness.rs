//! Explicit expressions for `{n, m}` in the *-algebra generated by `{1,0}` and `{2,0}`.
//!
//! The construction is the constructive induction:
//!
//! 1. `{1,0}² = {2,0} + {0,0} + (s + s⁻¹){1,1}` gives `{1,1}`.
//! 2. For `k ≥ 2` the products `{k-1,0}{1,1}` and `{1,1}{k-1,0}` give the
//!    linear system
//!    `s^{k-1}{k,1} + s^{1-k}{1,k} = P`, `s^{1-k}{k,1} + s^{k-1}{1,k} = Q`
//!    with determinant `s^{2(k-1)} - s^{-2(k-1)}`.
//! 3. `{k,0}{1,0} = {k+1,0} + {k-1,0} + s^k{k,1} + s^{-k}{1,k}` gives `{k+1,0}`.
//! 4. For `n, m ≥ 2`, `{n-1,m-1}{1,1} = s^{n-m}{n,m} + s^{m-n}{n-2,m-2}
//!    + s^{n+m-2}{n-2,m} + s^{2-n-m}{n,m-2}` gives `{n,m}` with a unit pivot.
//!
//! Every division is recorded in a `Scale` node with a label naming the
//! step, so a failed numeric evaluation can say which pivot vanished.

use super::poly::{curly, AlgebraError, Mode, NcPoly, PhaseScalar};
use super::scalar::{GaussRat, RatFunc};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WitnessError {
    #[error("negative index ({0}, {1}); witnesses are built for n, m >= 0")]
    NegativeIndex(i64, i64),
    #[error("denominator of step `{origin}` vanishes at the requested specialization")]
    DenominatorVanishes { origin: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug)]
pub enum ExprNode {
    /// `{1,0} = u + u⁻¹ + v + v⁻¹`.
    Gen1,
    /// `{2,0} = u² + u⁻² + v² + v⁻²`.
    Gen2,
    Unit,
    Add(Expr, Expr),
    Mul(Expr, Expr),
    Scale { factor: RatFunc, child: Expr, origin: String },
    Adjoint(Expr),
}

/// Shared expression DAG; clones are cheap and keep node identity.
#[derive(Debug, Clone)]
pub struct Expr(Arc<ExprNode>);

impl Expr {
    fn node(n: ExprNode) -> Self {
        Expr(Arc::new(n))
    }

    pub fn gen1() -> Self {
        Self::node(ExprNode::Gen1)
    }

    pub fn gen2() -> Self {
        Self::node(ExprNode::Gen2)
    }

    pub fn unit() -> Self {
        Self::node(ExprNode::Unit)
    }

    pub fn add(&self, other: &Expr) -> Self {
        Self::node(ExprNode::Add(self.clone(), other.clone()))
    }

    pub fn mul(&self, other: &Expr) -> Self {
        Self::node(ExprNode::Mul(self.clone(), other.clone()))
    }

    pub fn scale(&self, factor: RatFunc, origin: impl Into<String>) -> Self {
        Self::node(ExprNode::Scale { factor, child: self.clone(), origin: origin.into() })
    }

    pub fn adjoint(&self) -> Self {
        Self::node(ExprNode::Adjoint(self.clone()))
    }

    pub fn sub(&self, other: &Expr, origin: &str) -> Self {
        self.add(&other.scale(RatFunc::integer(-1), origin))
    }

    pub fn kind(&self) -> &ExprNode {
        &self.0
    }

    fn key(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn ptr_eq(&self, other: &Expr) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Number of distinct nodes in the DAG.
    pub fn node_count(&self) -> usize {
        fn walk(e: &Expr, seen: &mut std::collections::HashSet<usize>) {
            if !seen.insert(e.key()) {
                return;
            }
            match e.kind() {
                ExprNode::Add(a, b) | ExprNode::Mul(a, b) => {
                    walk(a, seen);
                    walk(b, seen);
                }
                ExprNode::Scale { child, .. } | ExprNode::Adjoint(child) => walk(child, seen),
                _ => {}
            }
        }
        let mut seen = std::collections::HashSet::new();
        walk(self, &mut seen);
        seen.len()
    }
}

/// Where an expression is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalTarget {
    /// Over the rational-function field in `s`.
    Formal,
    /// Exactly at `s = s0 ∈ Q(i)`, e.g. `s0 = i` for `α = 1/2`.
    AtUnit(GaussRat),
    /// In floating point at `s = e^{πiα}`.
    Float { alpha: f64 },
}

impl EvalTarget {
    fn mode(&self) -> Mode {
        match self {
            EvalTarget::Float { alpha } => Mode::Float { alpha: *alpha },
            _ => Mode::Exact,
        }
    }

    fn factor(&self, f: &RatFunc, origin: &str) -> Result<PhaseScalar, WitnessError> {
        let vanish = || WitnessError::DenominatorVanishes { origin: origin.to_string() };
        match self {
            EvalTarget::Formal => Ok(PhaseScalar::Exact(f.clone())),
            EvalTarget::AtUnit(s0) => Ok(PhaseScalar::Exact(RatFunc::constant(f.eval_exact(s0).map_err(|_| vanish())?))),
            EvalTarget::Float { alpha } => {
                let s = num_complex::Complex64::from_polar(1.0, PI * alpha);
                Ok(PhaseScalar::Float(f.eval_c64(s).map_err(|_| vanish())?))
            }
        }
    }

    fn finish(&self, p: NcPoly) -> Result<NcPoly, WitnessError> {
        match self {
            EvalTarget::AtUnit(s0) => Ok(p.specialize(s0)?),
            _ => Ok(p),
        }
    }
}

/// Evaluates an expression; shared subexpressions are computed once.
pub fn eval_expr(tree: &Expr, target: &EvalTarget) -> Result<NcPoly, WitnessError> {
    let mut memo = HashMap::new();
    eval_memo(tree, target, &mut memo)
}

fn eval_memo(e: &Expr, target: &EvalTarget, memo: &mut HashMap<usize, NcPoly>) -> Result<NcPoly, WitnessError> {
    if let Some(p) = memo.get(&e.key()) {
        return Ok(p.clone());
    }
    let mode = target.mode();
    let value = match e.kind() {
        ExprNode::Gen1 => target.finish(curly(mode, 1, 0))?,
        ExprNode::Gen2 => target.finish(curly(mode, 2, 0))?,
        ExprNode::Unit => NcPoly::unit(mode),
        ExprNode::Add(a, b) => {
            let (a, b) = (eval_memo(a, target, memo)?, eval_memo(b, target, memo)?);
            a.add(&b)?
        }
        ExprNode::Mul(a, b) => {
            let (a, b) = (eval_memo(a, target, memo)?, eval_memo(b, target, memo)?);
            target.finish(a.mul(&b)?)?
        }
        ExprNode::Scale { factor, child, origin } => {
            let c = target.factor(factor, origin)?;
            eval_memo(child, target, memo)?.scale(&c)?
        }
        ExprNode::Adjoint(a) => target.finish(eval_memo(a, target, memo)?.adjoint())?,
    };
    memo.insert(e.key(), value.clone());
    Ok(value)
}

/// An expression for `{n, m}` plus the named intermediate steps.
#[derive(Debug, Clone)]
pub struct GenerationWitness {
    pub target: (i64, i64),
    pub root: Expr,
    /// `(name, expression)` in dependency order; names are `c{n}_{m}`.
    pub steps: Vec<(String, Expr)>,
}

/// Representative of `{n, m}` under `{n,m} = {-m,n} = {-n,-m} = {m,-n}`:
/// either `(0, 0)` or the rotation with `n > 0`, `m ≥ 0`.
pub fn canonical_index(n: i64, m: i64) -> (i64, i64) {
    let mut p = (n, m);
    for _ in 0..4 {
        if p == (0, 0) || (p.0 > 0 && p.1 >= 0) {
            return p;
        }
        p = (-p.1, p.0);
    }
    unreachable!("one rotation lies in the first quadrant")
}

struct Builder {
    memo: HashMap<(i64, i64), Expr>,
    order: Vec<((i64, i64), Expr)>,
}

fn s(k: i64) -> RatFunc {
    RatFunc::s_pow(k)
}

impl Builder {
    fn new() -> Self {
        let mut b = Self { memo: HashMap::new(), order: Vec::new() };
        b.store((0, 0), Expr::unit().scale(RatFunc::integer(4), "{0,0} = 4"));
        b.store((1, 0), Expr::gen1());
        b.store((2, 0), Expr::gen2());
        b
    }

    fn store(&mut self, key: (i64, i64), e: Expr) -> Expr {
        self.memo.insert(key, e.clone());
        self.order.push((key, e.clone()));
        e
    }

    fn get(&mut self, n: i64, m: i64) -> Expr {
        let key = canonical_index(n, m);
        if let Some(e) = self.memo.get(&key) {
            return e.clone();
        }
        let e = self.build(key);
        match self.memo.get(&key) {
            Some(stored) => stored.clone(),
            None => self.store(key, e),
        }
    }

    fn build(&mut self, (n, m): (i64, i64)) -> Expr {
        match (n, m) {
            (1, 1) => {
                let label = "{1,1} from {1,0}^2 = {2,0} + {0,0} + (s + 1/s){1,1}";
                let g1 = self.get(1, 0);
                let rest = g1.mul(&g1).sub(&self.get(2, 0), label).sub(&self.get(0, 0), label);
                let pivot = s(1).add(&s(-1));
                rest.scale(pivot.inv().expect("nonzero"), label)
            }
            (k, 0) => {
                // {k-1,0}{1,0} = {k,0} + {k-2,0} + s^{k-1}{k-1,1} + s^{1-k}{1,k-1}
                let label = format!("{{{k},0}} from {{{},0}}{{1,0}}", k - 1);
                let prod = self.get(k - 1, 0).mul(&self.get(1, 0));
                let a = self.get(k - 1, 1).scale(s(k - 1), label.clone());
                let b = self.get(1, k - 1).scale(s(1 - k), label.clone());
                prod.sub(&self.get(k - 2, 0), &label).sub(&a, &label).sub(&b, &label)
            }
            (k, 1) | (1, k) => {
                let (x, y) = self.pair(k);
                if m == 1 {
                    x
                } else {
                    y
                }
            }
            (n, m) => {
                let label = format!("{{{n},{m}}} from {{{},{}}}{{1,1}}", n - 1, m - 1);
                let prod = self.get(n - 1, m - 1).mul(&self.get(1, 1));
                let r1 = self.get(n - 2, m - 2).scale(s(m - n), label.clone());
                let r2 = self.get(n - 2, m).scale(s(n + m - 2), label.clone());
                let r3 = self.get(n, m - 2).scale(s(2 - n - m), label.clone());
                prod.sub(&r1, &label).sub(&r2, &label).sub(&r3, &label).scale(s(m - n), label)
            }
        }
    }

    /// Solves for `({k,1}, {1,k})`, `k ≥ 2`, and stores the partner.
    fn pair(&mut self, k: i64) -> (Expr, Expr) {
        let label = format!("{{{k},1}} and {{1,{k}}} from {{{},0}}{{1,1}}, {{1,1}}{{{},0}}", k - 1, k - 1);
        let prev = self.get(k - 1, 0);
        let one_one = self.get(1, 1);
        let low_a = self.get(1, k - 2);
        let low_b = self.get(k - 2, 1);
        let (a, b) = (s(k - 1), s(1 - k));
        // P = s^{k-1}X + s^{1-k}Y, Q = s^{1-k}X + s^{k-1}Y
        let p = prev
            .mul(&one_one)
            .sub(&low_a.scale(b.clone(), label.clone()), &label)
            .sub(&low_b.scale(a.clone(), label.clone()), &label);
        let q = one_one
            .mul(&prev)
            .sub(&low_a.scale(a.clone(), label.clone()), &label)
            .sub(&low_b.scale(b.clone(), label.clone()), &label);
        let det_inv = a.mul(&a).sub(&b.mul(&b)).inv().expect("nonzero determinant");
        let x = p
            .scale(a.clone(), label.clone())
            .sub(&q.scale(b.clone(), label.clone()), &label)
            .scale(det_inv.clone(), label.clone());
        let y = q
            .scale(a, label.clone())
            .sub(&p.scale(b, label.clone()), &label)
            .scale(det_inv, label.clone());
        let (kx, ky) = (canonical_index(k, 1), canonical_index(1, k));
        if !self.memo.contains_key(&kx) {
            self.store(kx, x.clone());
        }
        if !self.memo.contains_key(&ky) {
            self.store(ky, y.clone());
        }
        (self.memo[&kx].clone(), self.memo[&ky].clone())
    }
}

/// Builds an expression over `{1,0}`, `{2,0}` that equals `{n, m}` as a
/// rational-function identity.
pub fn generation_witness(n: i64, m: i64) -> Result<GenerationWitness, WitnessError> {
    if n < 0 || m < 0 {
        return Err(WitnessError::NegativeIndex(n, m));
    }
    let mut b = Builder::new();
    let root = b.get(n, m);
    let steps = b.order.into_iter().map(|((n, m), e)| (format!("c{n}_{m}"), e)).collect();
    Ok(GenerationWitness { target: (n, m), root, steps })
}

/// Determinant of the coefficient matrix of `({m+1,1}, {1,m+1})` in the two
/// expansions of `{m+1,0}{1,0}` and `{m,0}{1,1}`, read off the general
/// product formula for `{n,m}{k,l}`.
pub fn band_pivot(m: i64) -> RatFunc {
    // In {n,m}{k,l} the terms {n-l, m+k} and {n+l, m-k} carry s^{nk+ml} and s^{-nk-ml}.
    // {m+1,0}{1,0}: {m+1,1} with s^{m+1}, {m+1,-1} = {1,m+1} with s^{-(m+1)}.
    let (a11, a12) = (s(m + 1), s(-(m + 1)));
    // {m,0}{1,1}: {m+1,1} with s^m, {m+1,-1} = {1,m+1} with s^{-m}.
    let (a21, a22) = (s(m), s(-m));
    a11.mul(&a22).sub(&a12.mul(&a21))
}

impl GenerationWitness {
    /// The witness as a program in the CLI expression syntax.
    pub fn to_program(&self) -> String {
        let mut names: Vec<(Expr, String)> = Vec::new();
        let mut out = String::new();
        for (name, e) in &self.steps {
            let rhs = match e.kind() {
                ExprNode::Gen1 => "u + u^-1 + v + v^-1".to_string(),
                ExprNode::Gen2 => "u^2 + u^-2 + v^2 + v^-2".to_string(),
                _ => render(e, &names, true),
            };
            let _ = writeln!(out, "{name} = {rhs};");
            names.push((e.clone(), name.clone()));
        }
        let (n, m) = canonical_index(self.target.0, self.target.1);
        let _ = write!(out, "c{n}_{m}");
        out
    }
}

fn render(e: &Expr, names: &[(Expr, String)], top: bool) -> String {
    if !top {
        if let Some((_, name)) = names.iter().find(|(x, _)| x.ptr_eq(e)) {
            return name.clone();
        }
    }
    match e.kind() {
        ExprNode::Gen1 => "(u + u^-1 + v + v^-1)".into(),
        ExprNode::Gen2 => "(u^2 + u^-2 + v^2 + v^-2)".into(),
        ExprNode::Unit => "1".into(),
        ExprNode::Add(a, b) => format!("({} + {})", render(a, names, false), render(b, names, false)),
        ExprNode::Mul(a, b) => format!("{}*{}", render(a, names, false), render(b, names, false)),
        ExprNode::Scale { factor, child, .. } => {
            let inner = render(child, names, false);
            if factor.is_polynomial() {
                format!("{factor}*{inner}")
            } else {
                let num = RatFunc::from_poly(factor.numer().clone());
                let den = RatFunc::from_poly(factor.denom().clone());
                format!("({num}*{inner} / {den})")
            }
        }
        ExprNode::Adjoint(a) => format!("adj({})", render(a, names, false)),
    }
}
