//! Acceptance criteria AC1-AC9 at their pinned tolerances.
//!
//! Prints one PASS/FAIL line per criterion and exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use besselkit_core::audit::{
    audit_combinator, audit_convolution_theorem, audit_eigenfunction, audit_growth_bound, audit_homogeneity,
    audit_iterated_e, audit_kernel_composition, audit_order_reduction, audit_powerlaw_transform, audit_product_constant,
    audit_s_composition, audit_shift_commutativity, audit_shift_identity, audit_shift_mass, audit_shift_symmetry,
    audit_shift_unit, audit_weak_solution, convolution_budget, powerlaw_budget, weak_pairing, weak_test_functions,
    AuditReport, WeakKind,
};
use besselkit_core::kernels::SignatureSplit;
use besselkit_core::{QuadSpec, Result, WeightVector};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn w(v: &[f64]) -> WeightVector {
    WeightVector::new(v.to_vec()).expect("valid weights")
}

fn split(p: usize, q: usize) -> SignatureSplit {
    SignatureSplit::new(p, q).expect("valid split")
}

fn worst(reports: &[AuditReport]) -> f64 {
    reports.iter().map(|r| r.residual).fold(0.0, f64::max)
}

fn ac1() -> Result<Outcome> {
    let grid: Vec<f64> = (0..20).map(|i| 0.1 + 4.9 * (i as f64 + 0.5) / 20.0).collect();
    let r = audit_eigenfunction(&[0.6, 1.0, 1.5], &[0.5, 1.0, 2.0], &grid)?;
    Ok(Outcome::new(r.residual <= 1e-6, format!("max |B j + y^2 j| = {:.2e} (tol 1e-6)", r.residual)))
}

fn ac2() -> Result<Outcome> {
    let spec = QuadSpec::default();
    assert!(spec.nodes_per_axis >= 32);
    let mut unit = Vec::new();
    let mut identity = Vec::new();
    for v in [w(&[0.5]), w(&[1.0, 2.5]), w(&[0.6, 0.9, 1.7])] {
        unit.push(audit_shift_unit(&v, &spec)?);
        identity.push(audit_shift_identity(&v, &spec)?);
    }
    let (outer, inner) = convolution_budget();
    let mut sym = Vec::new();
    let mut mass = Vec::new();
    let mut comm = Vec::new();
    for v1 in [0.5, 1.0, 1.5] {
        sym.push(audit_shift_symmetry(v1, &outer)?);
        mass.push(audit_shift_mass(v1, &outer)?);
        comm.push(audit_shift_commutativity(v1, &outer, &inner)?);
    }
    let pass = worst(&unit) <= 1e-10
        && identity.iter().all(|r| r.pass)
        && worst(&sym) <= 1e-6
        && worst(&mass) <= 1e-6
        && worst(&comm) <= 1e-6;
    Ok(Outcome::new(
        pass,
        format!(
            "(a) {:.1e}  (b) {:.1e} monotone={}  (c) {:.1e}  (d) {:.1e}  (e) {:.1e}",
            worst(&unit),
            worst(&identity),
            identity.iter().all(|r| r.pass),
            worst(&sym),
            worst(&mass),
            worst(&comm)
        ),
    ))
}

fn ac3() -> Result<Outcome> {
    let (outer, inner) = convolution_budget();
    let mut pass = true;
    let mut parts = Vec::new();
    for v1 in [0.5, 1.0] {
        let reports = audit_convolution_theorem(v1, &outer, &inner)?;
        let stated = &reports[0];
        let scaled = &reports[1];
        pass &= stated.residual <= 1e-4;
        parts.push(format!(
            "v={v1}: rel err {:.1e}, F(f*g)/(Ff Fg) = {:.7}, with 1/C_v factor {:.1e}",
            stated.residual,
            stated.ratio.unwrap_or(f64::NAN),
            scaled.residual
        ));
    }
    Ok(Outcome::new(pass, parts.join("; ")))
}

fn ac4() -> Result<Outcome> {
    let spec = powerlaw_budget();
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in [1.2, 1.5] {
        let r = audit_powerlaw_transform(alpha, 0.5, &spec)?;
        pass &= r.residual <= 1e-3;
        parts.push(format!("alpha={alpha}: {:.1e}", r.residual));
    }
    Ok(Outcome::new(pass, format!("{} (tol 1e-3)", parts.join(", "))))
}

fn ac5() -> Result<Outcome> {
    let v = w(&[0.6, 0.7, 1.3]);
    let s = split(1, 2);
    let mut euler = 0.0f64;
    let mut slope = 0.0f64;
    let mut normalized = true;
    for k in [1, 2] {
        for r in audit_homogeneity(k, &v, &s)? {
            normalized &= r.notes.iter().all(|n| !n.contains("degenerate"));
            if r.identity_id.starts_with("lemma5-euler") {
                euler = euler.max(r.residual);
            } else {
                slope = slope.max(r.residual);
            }
        }
    }
    let pass = euler <= 1e-8 && slope <= 1e-6 && normalized;
    Ok(Outcome::new(pass, format!("S and R, k=1,2: Euler {euler:.1e} (tol 1e-8), slope {slope:.1e} (tol 1e-6)")))
}

fn ac6() -> Result<Outcome> {
    let v = w(&[0.5, 0.5]);
    let spec = QuadSpec::default();
    let kind = WeakKind::LaplaceBessel { k: 1 };
    let tests = weak_test_functions(2)?;
    let r = audit_weak_solution(kind, &tests, &v, &spec, "lemma2-weak")?;
    let base = weak_pairing(kind, &tests[0], &v, &spec)? / tests[0].value_at_origin();
    let wide = tests[0].rescaled(2.0);
    let stretched = weak_pairing(kind, &wide, &v, &spec)? / wide.value_at_origin();
    let width = (stretched - base).abs() / base.abs();
    let pass = r.residual <= 1e-2 && width <= 1e-2;
    Ok(Outcome::new(
        pass,
        format!("spread {:.1e}, width change {width:.1e} (tol 1e-2); ratio {:.12}", r.residual, r.ratio.unwrap_or(f64::NAN)),
    ))
}

fn ac7() -> Result<Outcome> {
    let mut failures = 0usize;
    let mut checks = 0usize;
    let mut signs = Vec::new();
    for (v, s) in [(w(&[0.5, 0.5, 0.5]), split(2, 1)), (w(&[0.6, 0.7, 1.3]), split(1, 2))] {
        for k in 1..=3 {
            let mut reports = vec![audit_product_constant(k, &v, &s)?, audit_order_reduction(k, &v, &s)?];
            let e = audit_iterated_e(k, &v)?;
            signs.push(e.notes[0].clone());
            reports.push(e);
            for m in 1..=3 {
                reports.push(audit_s_composition(k, m, &v)?);
                reports.push(audit_kernel_composition(k, m, &v, &s)?);
            }
            checks += reports.len();
            failures += reports.iter().filter(|r| r.residual != 0.0).count();
        }
    }
    Ok(Outcome::new(failures == 0, format!("{checks} exact checks, {failures} mismatches")))
}

fn ac8() -> Result<Outcome> {
    let v = w(&[0.5, 0.5, 0.5]);
    let s = split(2, 1);
    let mut pass = true;
    let mut parts = Vec::new();
    for k in [1usize, 2] {
        let reports = audit_growth_bound(k, &v, &s)?;
        let growth = reports.iter().find(|r| r.identity_id == "eq16-growth").expect("growth report");
        let printed = reports.iter().find(|r| r.identity_id == "eq16-printed-exponent").expect("printed report");
        let decay = reports.iter().find(|r| r.identity_id == "theorem4-decay").expect("decay report");
        let bound = decay.empirical_bound.unwrap_or(f64::NAN);
        let flagged = printed.notes.iter().any(|n| n.contains("displayed exponent 2k"));
        pass &= growth.pass && decay.pass && bound.is_finite() && flagged;
        parts.push(format!(
            "k={k}: slope {:.4} (4k={}), decay {:.4}, M={bound:.3e}, printed 2k={} flagged={flagged}",
            growth.fitted_exponent.unwrap_or(f64::NAN),
            4 * k,
            decay.fitted_exponent.unwrap_or(f64::NAN),
            2 * k
        ));
    }
    Ok(Outcome::new(pass, parts.join("; ")))
}

fn ac9() -> Result<Outcome> {
    let v = w(&[0.5, 0.5, 0.5]);
    let s = split(2, 1);
    let mut mismatches = 0.0;
    for (k, m) in [(2, 0), (3, 2), (1, 2)] {
        mismatches += audit_combinator(k, m, &v, &s)?.residual;
    }
    Ok(Outcome::new(mismatches == 0.0, format!("(2,0) (3,2) (1,2): {mismatches} structural mismatches")))
}

fn main() -> ExitCode {
    let criteria: [(&str, &str, Duration, fn() -> Result<Outcome>); 9] = [
        ("AC1", "eigenfunction identity", Duration::from_secs(5), ac1),
        ("AC2", "shift properties (a)-(e)", Duration::from_secs(120), ac2),
        ("AC3", "convolution theorem, v in {1/2, 1}", Duration::from_secs(60), ac3),
        ("AC4", "power-law transform, v = 1/2", Duration::from_secs(120), ac4),
        ("AC5", "homogeneity and Euler relation", Duration::from_secs(300), ac5),
        ("AC6", "weak elementary solution", Duration::from_secs(300), ac6),
        ("AC7", "Fourier-domain exactness", Duration::from_secs(300), ac7),
        ("AC8", "growth exponents", Duration::from_secs(300), ac8),
        ("AC9", "solution combinator structure", Duration::from_secs(300), ac9),
    ];
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let pass = outcome.pass && in_time;
        if !pass {
            failed += 1;
        }
        let timing = if in_time { String::new() } else { format!(" [over the {}s budget]", budget.as_secs()) };
        println!(
            "{id} {} {name}: {} ({:.2}s){timing}",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
