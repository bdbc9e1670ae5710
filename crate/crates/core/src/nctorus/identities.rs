//! Exact verification of the bracket algebra over the rational-function ring.

use super::poly::{bracket, curly, Mode, NcPoly};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityTally {
    pub name: &'static str,
    pub checked: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BracketReport {
    pub range: i64,
    pub identities: Vec<IdentityTally>,
}

impl BracketReport {
    pub fn passed(&self) -> bool {
        self.identities.iter().all(|t| t.failures.is_empty())
    }
}

fn tally(name: &'static str) -> IdentityTally {
    IdentityTally { name, checked: 0, failures: Vec::new() }
}

fn record(t: &mut IdentityTally, ok: bool, at: impl FnOnce() -> String) {
    t.checked += 1;
    if !ok {
        t.failures.push(at());
    }
}

fn plus(a: NcPoly, b: NcPoly) -> NcPoly {
    a.add(&b).expect("exact mode")
}

/// Checks, for all indices with absolute value at most `range`:
///
/// * `[n,m]* = [n,m] = [-n,-m]`
/// * `[n,m][k,l] = s^{nl-mk}[n+k,m+l] + s^{mk-nl}[n-k,m-l]`
/// * `{n,m}* = {n,m} = {-m,n} = {-n,-m} = {m,-n}`
/// * `{n,m}{k,l} = s^{nl-mk}{n+k,m+l} + s^{mk-nl}{n-k,m-l} + s^{nk+ml}{n-l,m+k} + s^{-nk-ml}{n+l,m-k}`
pub fn check_bracket_identities(range: i64) -> BracketReport {
    let r = range.max(0);
    let ex = Mode::Exact;
    let idx: Vec<i64> = (-r..=r).collect();
    let brackets: std::collections::HashMap<(i64, i64), NcPoly> = (-2 * r..=2 * r)
        .flat_map(|n| (-2 * r..=2 * r).map(move |m| (n, m)))
        .map(|(n, m)| ((n, m), bracket(ex, n, m)))
        .collect();
    let curlies: std::collections::HashMap<(i64, i64), NcPoly> = brackets
        .keys()
        .map(|&(n, m)| ((n, m), curly(ex, n, m)))
        .collect();
    let b = |n: i64, m: i64| &brackets[&(n, m)];
    let c = |n: i64, m: i64| &curlies[&(n, m)];

    let mut a1 = tally("[n,m]* = [n,m] = [-n,-m]");
    let mut a3 = tally("{n,m}* = {n,m} = {-m,n} = {-n,-m} = {m,-n}");
    for &n in &idx {
        for &m in &idx {
            let x = b(n, m);
            record(&mut a1, x.adjoint() == *x && x == b(-n, -m), || format!("(n,m)=({n},{m})"));
            let y = c(n, m);
            let ok = y.adjoint() == *y && y == c(-m, n) && y == c(-n, -m) && y == c(m, -n);
            record(&mut a3, ok, || format!("(n,m)=({n},{m})"));
        }
    }

    let mut a2 = tally("[n,m][k,l] expansion");
    let mut a4 = tally("{n,m}{k,l} expansion");
    for &n in &idx {
        for &m in &idx {
            for &k in &idx {
                for &l in &idx {
                    let at = || format!("(n,m,k,l)=({n},{m},{k},{l})");
                    let lhs = b(n, m).mul(b(k, l)).expect("exact mode");
                    let rhs = plus(b(n + k, m + l).shift_phase(n * l - m * k), b(n - k, m - l).shift_phase(m * k - n * l));
                    record(&mut a2, lhs == rhs, at);

                    let lhs = c(n, m).mul(c(k, l)).expect("exact mode");
                    let rhs = plus(
                        plus(c(n + k, m + l).shift_phase(n * l - m * k), c(n - k, m - l).shift_phase(m * k - n * l)),
                        plus(c(n - l, m + k).shift_phase(n * k + m * l), c(n + l, m - k).shift_phase(-n * k - m * l)),
                    );
                    record(&mut a4, lhs == rhs, at);
                }
            }
        }
    }
    BracketReport { range, identities: vec![a1, a2, a3, a4] }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_hold_up_to_three() {
        let report = check_bracket_identities(3);
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.identities[1].checked, 7usize.pow(4));
    }

    #[test]
    fn broken_expansion_is_detected() {
        // Dropping a phase must break the product formula.
        let ex = Mode::Exact;
        let lhs = curly(ex, 1, 0).mul(&curly(ex, 1, 0)).unwrap();
        let wrong = plus(plus(curly(ex, 2, 0), curly(ex, 0, 0)), plus(curly(ex, 0, 1), curly(ex, 2, -1)));
        assert_ne!(lhs, wrong);
    }
}
