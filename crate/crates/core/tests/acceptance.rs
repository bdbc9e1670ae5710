//! One line per acceptance criterion; exits nonzero if any criterion fails.

mod common;

use std::f64::consts::SQRT_2;
use std::time::Instant;
use theta_torus::nctorus::{
    check_bracket_identities, curly, eval_expr, gauss, generation_witness, harper_exact, EvalTarget, Mode, NcPoly, PhaseScalar,
};
use theta_torus::projector::{
    invertibility_alpha, invertibility_pq, partition_checks, phi_bounds, projection_matrix, projection_series, projection_series_with,
    projection_sweep, represent_series, theta_identity_checks, CoefficientQuadrature, Reason, Verdict,
};
use theta_torus::repmat::{check_duality, harper_norm, truncated_heisenberg};
use theta_torus::theta::{check_classical_identities, find_threshold, ClassicalSamples};

const TABLE: [(i64, f64, f64); 16] = [
    (2, 2.82842, 2.82842),
    (3, 2.73205, 2.73205),
    (4, 2.82842, 2.78648),
    (5, 2.96645, 2.94109),
    (6, 3.09557, 3.08292),
    (7, 3.20330, 3.19690),
    (8, 3.29066, 3.28709),
    (9, 3.36165, 3.35943),
    (10, 3.42005, 3.41855),
    (11, 3.46880, 3.46771),
    (12, 3.51004, 3.50922),
    (13, 3.54537, 3.54473),
    (50, 3.87630, 3.87628),
    (51, 3.87869, 3.87867),
    (100, 3.93766, 3.93765),
    (101, 3.93827, 3.93827),
];

struct Outcome {
    id: &'static str,
    passed: bool,
    detail: String,
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (mut worst_norm, mut worst_phi) = (0.0f64, 0.0f64);
    let mut rows = Vec::new();
    for &(q, norm_ref, phi_ref) in &TABLE {
        let norm = harper_norm(1, q, 2.0).expect("norm");
        let phi = phi_bounds(q).expect("phi").value;
        worst_norm = worst_norm.max((norm - norm_ref).abs());
        worst_phi = worst_phi.max((phi - phi_ref).abs());
        rows.push(format!("q={q}:{norm:.5}/{phi:.5}"));
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        id: "1 table reproduction",
        passed: worst_norm <= 5e-5 && worst_phi <= 5e-5,
        detail: format!("max |norm-table|={worst_norm:.2e}, max |phi-table|={worst_phi:.2e} (tol 5e-5), {secs:.1}s; {}", rows.join(" ")),
    }
}

fn criterion_2() -> Outcome {
    let d2 = (harper_norm(1, 2, 2.0).expect("norm") - 2.0 * SQRT_2).abs();
    let d3 = (harper_norm(1, 3, 2.0).expect("norm") - (1.0 + 3f64.sqrt())).abs();
    let ex = Mode::Exact;
    let h = harper_exact(2, 1);
    let i = gauss(0, 1);
    let lhs = h.mul(&h).unwrap().specialize(&i).unwrap();
    let rhs = NcPoly::unit(ex).scale(&PhaseScalar::integer(ex, 4)).unwrap().add(&curly(ex, 2, 0)).unwrap().specialize(&i).unwrap();
    let exact = lhs == rhs;
    Outcome {
        id: "2 exact anchors",
        passed: d2 <= 1e-8 && d3 <= 1e-6 && exact,
        detail: format!("|norm(1/2)-2sqrt2|={d2:.2e} (tol 1e-8), |norm(1/3)-(1+sqrt3)|={d3:.2e} (tol 1e-6), H^2 = 4 + {{2,0}} at alpha=1/2: {exact}"),
    }
}

fn criterion_3() -> Outcome {
    let t = find_threshold().expect("threshold");
    let (dx, dt) = ((t.x0 - 5.2254).abs(), (t.t0 - 0.52633).abs());
    Outcome {
        id: "3 thresholds",
        passed: dx <= 2e-4 && dt <= 1e-5,
        detail: format!("x0={:.7} (5.2254 +- 2e-4), t0={:.7} (0.52633 +- 1e-5)", t.x0, t.t0),
    }
}

fn criterion_4() -> Outcome {
    let classical = check_classical_identities(&ClassicalSamples::default(), 1e-10).expect("classical");
    let twists = theta_identity_checks(&[2, 4, 6], 20, 1e-10).expect("twist identities");
    let q2 = theta_identity_checks(&[], 100, 1e-10).expect("q=2 identity");
    let riemann = theta_identity_checks(&[], 10, 1e-10).expect("riemann");
    let mut rows: Vec<_> = classical.identities.clone();
    rows.extend(twists.identities.iter().filter(|r| r.name.starts_with("reflected")).cloned());
    rows.extend(q2.identities.iter().filter(|r| r.name.starts_with("q=2")).cloned());
    rows.extend(riemann.identities.iter().filter(|r| r.name.starts_with("Riemann")).cloned());
    let worst = rows.iter().map(|r| r.max_residual).fold(0.0, f64::max);
    let failing: Vec<_> = rows.iter().filter(|r| !r.passed).map(|r| r.name.clone()).collect();
    let ineq: Vec<_> = classical
        .inequalities
        .iter()
        .map(|c| format!("{}: {}/{} samples, min margin {:.3e}", c.name, c.samples - c.failing_samples.len(), c.samples, c.min_margin))
        .collect();
    let ineq_ok = classical.inequalities.iter().all(|c| c.holds_everywhere);
    Outcome {
        id: "4 theta identity suite",
        passed: failing.is_empty() && ineq_ok,
        detail: format!("{} identities, worst residual {worst:.2e} (tol 1e-10), failing {:?}; {}", rows.len(), failing, ineq.join("; ")),
    }
}

fn criterion_5() -> Outcome {
    let (mut idem, mut adj, mut tr) = (0.0f64, 0.0f64, 0.0f64);
    for q in 2..=10 {
        let s = projection_sweep(q, 8).expect("sweep");
        idem = idem.max(s.max_idempotency);
        adj = adj.max(s.max_self_adjointness);
        tr = tr.max(s.max_trace_deviation);
    }
    Outcome {
        id: "5 projection suite",
        passed: idem <= 1e-9 && adj <= 1e-12 && tr <= 1e-9,
        detail: format!("q=2..10, 8x8 twists: |e^2-e|={idem:.2e} (1e-9), |e-e*|={adj:.2e} (1e-12), |tr e-1/q|={tr:.2e} (1e-9)"),
    }
}

fn criterion_6() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for q in 2..=5 {
        let rep = partition_checks(q).expect("partition");
        for r in &rep.identities {
            ok &= r.passed;
            parts.push(format!("q={q} {}: {:.2e} (tol {:.0e})", r.name, r.max_residual, r.tol));
        }
    }
    Outcome { id: "6 partition identities", passed: ok, detail: parts.join("; ") }
}

fn series_gap(q: i64, n: i64) -> f64 {
    let series = projection_series(q, n).expect("series");
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let (t1, t2) = (i as f64 / 4.0, j as f64 / 4.0);
            let a = represent_series(&series, t1, t2).expect("represent");
            let b = projection_matrix(q, t1, t2).expect("matrix");
            worst = worst.max(common::max_diff(&a, &b));
        }
    }
    worst
}

fn criterion_7() -> (Outcome, String) {
    let gaps: Vec<(i64, f64)> = [2, 3].iter().map(|&q| (q, series_gap(q, 8))).collect();
    let mut coeff_gap = 0.0f64;
    for q in [2i64, 3] {
        let quad = CoefficientQuadrature::new(q, 128).expect("quadrature");
        for n1 in -4i64..=4 {
            for n2 in -4i64..=4 {
                let got = quad.coefficient(n1, n2).expect("coefficient");
                let want = common::matrix_side_coefficient(q, n1, n2, 32, |t1, t2| projection_matrix(q, t1, t2).unwrap());
                coeff_gap = coeff_gap.max((got - want).norm());
            }
        }
    }
    let series_ok = gaps.iter().all(|&(_, g)| g <= 1e-6);
    let outcome = Outcome {
        id: "7 consistency triangle",
        passed: series_ok && coeff_gap <= 1e-8,
        detail: format!(
            "series N=8 vs closed form on 4x4 twists: {} (tol 1e-6); coefficients vs matrix Fourier transform, |n|<=4: {coeff_gap:.2e} (tol 1e-8)",
            gaps.iter().map(|(q, g)| format!("q={q} {g:.2e}")).collect::<Vec<_>>().join(", ")
        ),
    };
    let companion: Vec<_> = [2i64, 3]
        .iter()
        .map(|&q| {
            let series = projection_series_with(q, 12, 64).expect("series");
            let mut worst = 0.0f64;
            for i in 0..4 {
                for j in 0..4 {
                    let (t1, t2) = (i as f64 / 4.0, j as f64 / 4.0);
                    let a = represent_series(&series, t1, t2).unwrap();
                    worst = worst.max(common::max_diff(&a, &projection_matrix(q, t1, t2).unwrap()));
                }
            }
            format!("q={q} {worst:.2e}")
        })
        .collect();
    (outcome, format!("note 7: truncation N=12 on the same grid gives {}", companion.join(", ")))
}

fn criterion_8() -> Outcome {
    let report = check_bracket_identities(5);
    let checked: usize = report.identities.iter().map(|t| t.checked).sum();
    let mut witness_failures = Vec::new();
    let mut count = 0;
    for n in 0..=6i64 {
        for m in 0..=(6 - n) {
            count += 1;
            let w = generation_witness(n, m).expect("witness");
            let value = eval_expr(&w.root, &EvalTarget::Formal).expect("evaluation");
            if value != curly(Mode::Exact, n, m) {
                witness_failures.push((n, m));
            }
        }
    }
    Outcome {
        id: "8 exact symbolic suite",
        passed: report.passed() && witness_failures.is_empty(),
        detail: format!(
            "bracket identities up to 5: {checked} checks, passed={}; {count} witnesses with n+m<=6, failures {:?}",
            report.passed(),
            witness_failures
        ),
    }
}

fn criterion_9() -> Outcome {
    let alphas = [0.1, 0.5, 0.9, 0.948];
    let reports: Vec<_> = alphas.iter().map(|&a| invertibility_alpha(a).expect("alpha report")).collect();
    let alpha_ok = reports.iter().all(|r| r.verdict == Verdict::InvertibleCriterionMet);
    let a = invertibility_pq(1, 2, 0.6).expect("pq");
    let b = invertibility_pq(2, 3, 0.7).expect("pq");
    let c = invertibility_pq(1, 3, 1.0 / 3.0 + 0.05).expect("pq");
    let pq_ok = a.verdict == Verdict::InvertibleCriterionMet
        && a.trace.is_some_and(|t| (t - 0.2).abs() < 1e-12)
        && b.verdict == Verdict::NotApplicable
        && b.reason == Some(Reason::NoResidueWitness)
        && c.verdict == Verdict::InvertibleCriterionMet;
    Outcome {
        id: "9 criterion checks",
        passed: alpha_ok && pq_ok,
        detail: format!(
            "alpha bounds {}; (1,2,0.6): {:?} trace {:?}; (2,3): {:?} {:?}; (1,3,1/3+0.05): {:?}",
            alphas.iter().zip(&reports).map(|(a, r)| format!("{a}:{:.3e}", r.s.unwrap_or(f64::NAN))).collect::<Vec<_>>().join(" "),
            a.verdict,
            a.trace,
            b.verdict,
            b.reason,
            c.verdict
        ),
    }
}

fn criterion_10() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for &(p, q, lambda) in &[(1i64, 3i64, 1.0), (1, 5, 3.0), (2, 5, 1.5)] {
        let d = check_duality(p, q, lambda, 64, 1e-5).expect("duality");
        ok &= d.residual <= 1e-4;
        parts.push(format!("({p},{q},{lambda}) {:.2e}", d.residual));
    }
    let fixed = check_duality(1, 3, 2.0, 64, 1e-5).expect("duality");
    ok &= fixed.residual == 0.0;
    Outcome {
        id: "10 duality",
        passed: ok,
        detail: format!("residuals {} (tol 1e-4); lambda=2 residual {}", parts.join(", "), fixed.residual),
    }
}

fn criterion_11() -> Outcome {
    let a = truncated_heisenberg(0.7, 64).expect("K=64").min_singular_value;
    let b = truncated_heisenberg(0.7, 128).expect("K=128").min_singular_value;
    let variation = (a - b).abs() / a.max(b);
    Outcome {
        id: "11 truncated operator stability",
        passed: a > 0.0 && b > 0.0 && variation < 0.01,
        detail: format!("min singular value K=64 {a:.10}, K=128 {b:.10}, relative change {variation:.2e} (< 1e-2)"),
    }
}

fn main() {
    let (seventh, note) = criterion_7();
    let outcomes = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        seventh,
        criterion_8(),
        criterion_9(),
        criterion_10(),
        criterion_11(),
    ];
    for o in &outcomes {
        println!("[{}] criterion {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.id, o.detail);
    }
    println!("{note}");
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("{passed}/{} criteria passed", outcomes.len());
    if passed != outcomes.len() {
        std::process::exit(1);
    }
}
