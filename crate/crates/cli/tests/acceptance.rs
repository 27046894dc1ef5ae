//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test -p hyperlab-cli --test acceptance -- --nocapture`.

use std::process::Command;
use std::time::{Duration, Instant};

use hyperlab::cases::negative_energy_counterexample;
use hyperlab::linalg;
use hyperlab::verify::{run_suite, Check, CheckKind, SuiteReport, VerifyOptions};
use hyperlab::{
    contract_symbol, real_root_count, skyrme_symbol, FieldJet, Matrix, Poly, SearchConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    id: usize,
    title: &'static str,
    passed: bool,
    elapsed: Duration,
    detail: String,
}

fn suite(name: &str, opts: &VerifyOptions) -> SuiteReport {
    run_suite(name, opts).unwrap_or_else(|e| panic!("suite {name}: {e}"))
}

fn check<'a>(r: &'a SuiteReport, name: &str) -> &'a Check {
    r.checks
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("check {name} missing from suite {}", r.suite))
}

/// Passed, and asserted at exactly the stated tolerance.
fn within(r: &SuiteReport, name: &str, tol: f64) -> bool {
    let c = check(r, name);
    c.passed && c.tolerance == tol && c.value <= tol
}

fn criterion(
    id: usize,
    title: &'static str,
    budget: Option<Duration>,
    f: impl FnOnce() -> (bool, String),
) -> Outcome {
    let start = Instant::now();
    let (ok, detail) = f();
    let elapsed = start.elapsed();
    let in_budget = budget.is_none_or(|b| elapsed <= b);
    Outcome {
        id,
        title,
        passed: ok && in_budget,
        elapsed,
        detail: if in_budget {
            detail
        } else {
            format!("{detail}; over budget {budget:?}")
        },
    }
}

fn symbol_table() -> (bool, String) {
    let adapted = FieldJet::adapted(&[1.5, 0.5, 2.0, 0.0], 4).unwrap();
    let f3 = linalg::unit(4, 3);
    let table = adapted.in_target_basis(&contract_symbol(
        &skyrme_symbol(&adapted.jet, 0.5, 0.5),
        &f3,
        &f3,
    ));
    let expected = [5.25, 2.75, -1.0, 3.0];
    let mut dev = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let e = if i == j { expected[i] } else { 0.0 };
            dev = dev.max((table[(i, j)] - e).abs());
        }
    }
    let r = suite("symbol-table", &VerifyOptions::default());
    let ok = dev <= 1e-8
        && within(&r, "skyrme-symbol-table", 1e-8)
        && within(&r, "skyrme-symbol-table-n4", 1e-8)
        && within(&r, "skyrme-symbol-table-fd", 1e-6)
        && within(&r, "skyrme-cross-block", 1e-8);
    (
        ok,
        format!(
            "closed-form deviation {dev:.1e}, FD deviation {:.1e}",
            check(&r, "skyrme-symbol-table-fd").value
        ),
    )
}

fn grid() -> (bool, String) {
    let r = suite("grid", &VerifyOptions::default());
    let g = check(&r, "skyrme-regime-grid");
    let sharp = check(&r, "skyrme-sharpened-point");
    (
        r.passed && g.value == 1.0,
        format!("{}; {}", g.detail, sharp.detail),
    )
}

fn counterexample() -> (bool, String) {
    let c = negative_energy_counterexample(0.01, &SearchConfig::default()).unwrap();
    let direct =
        c.all_pass() && (c.energy_density + 0.02).abs() <= 1e-10 && c.observer_margin > 0.0;
    let r = suite("counterexample", &VerifyOptions::default());
    let ok = direct
        && r.passed
        && within(&r, "counterexample-mtilde-contraction", 1e-12)
        && within(&r, "counterexample-energy-density", 1e-10);
    (
        ok,
        format!(
            "m00 {:?}, observer margin {:.4}, contraction {:.1e}, energy density {}",
            c.m00, c.observer_margin, c.mtilde_contraction, c.energy_density
        ),
    )
}

fn dec() -> (bool, String) {
    let r = suite("dec", &VerifyOptions::default());
    let c = check(&r, "dec-suite");
    (
        c.passed && c.tolerance == 1e-9 && r.options.samples >= 500,
        format!(
            "worst normalized violation {:.2e} over 6 models x 500 jets",
            c.value
        ),
    )
}

fn vanishing() -> (bool, String) {
    let r = suite("vanishing", &VerifyOptions::default());
    let c = check(&r, "rank-vanishing");
    (
        within(&r, "rank-vanishing", 1e-10),
        format!("{}; worst {:.1e}", c.detail, c.value),
    )
}

fn oracles() -> (bool, String) {
    let r = suite("oracles", &VerifyOptions::default());
    let ok = within(&r, "oracle-newton-sigmas", 1e-10)
        && within(&r, "oracle-stress-sigma-fd", 1e-6)
        && within(&r, "oracle-skyrme-symbol-fd", 1e-6)
        && r.checks.iter().all(|c| c.detail.starts_with("500 jets"));
    let values: Vec<String> = r
        .checks
        .iter()
        .map(|c| format!("{} {:.1e}", c.name, c.value))
        .collect();
    (ok, values.join(", "))
}

/// Real eigenvalues of the companion matrix, or `None` when roots are too
/// close to each other or to the real axis to call.
fn companion_real_roots(p: &Poly) -> Option<usize> {
    let n = p.degree();
    let lead = p.leading();
    let c = Matrix::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -p.coeffs[i] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let roots = c.complex_eigenvalues();
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() < 1e-6 {
                return None;
            }
        }
    }
    if roots.iter().any(|z| z.im != 0.0 && z.im.abs() < 1e-6) {
        return None;
    }
    Some(roots.iter().filter(|z| z.im == 0.0).count())
}

fn sturm() -> (bool, String) {
    let r = suite("sturm", &VerifyOptions::default());
    let roots = check(&r, "skyrme-det-poly-roots");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut compared, mut mismatched) = (0, 0);
    for _ in 0..1000 {
        let deg = rng.random_range(1..=8);
        let mut coeffs: Vec<f64> = (0..=deg).map(|_| rng.random_range(-3.0..3.0)).collect();
        coeffs[deg] = rng.random_range(0.5..3.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
        let p = Poly::new(coeffs);
        if let Some(real) = companion_real_roots(&p) {
            compared += 1;
            if real_root_count(&p).unwrap().sturm_count != real {
                mismatched += 1;
            }
        }
    }
    (
        r.passed
            && roots.value <= 4.0
            && check(&r, "sturm-constructed-roots")
                .detail
                .starts_with("1000")
            && compared >= 900
            && mismatched == 0,
        format!(
            "{compared} companion comparisons, {mismatched} mismatches; {}",
            roots.detail
        ),
    )
}

fn canonical_stress() -> (bool, String) {
    let r = suite("canonical-stress", &VerifyOptions::default());
    let archive =
        std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("noether-sigma2-report.json");
    let report = check(&r, "noether-sigma2-report");
    let archived = std::fs::write(&archive, serde_json::to_string_pretty(report).unwrap()).is_ok();
    (
        within(&r, "noether-wave-map", 1e-8) && archived,
        format!(
            "j=1 residual {:.1e}; j=2 archived at {}",
            check(&r, "noether-wave-map").value,
            archive.display()
        ),
    )
}

fn fluid() -> (bool, String) {
    let r = suite("fluid", &VerifyOptions::default());
    (
        check(&r, "fluid-power-law-window").passed,
        check(&r, "fluid-power-law-window").detail.clone(),
    )
}

/// Every deviation check, with the perturbation that moves it: the
/// contraction and the vanishing checks are quadratic in the input error.
const NEGATIVE_CONTROL: [(&str, &str, f64); 12] = [
    ("symbol-table", "skyrme-symbol-table", 1e-13),
    ("symbol-table", "skyrme-symbol-table-n4", 1e-13),
    ("symbol-table", "skyrme-symbol-table-fd", 1e-13),
    ("symbol-table", "skyrme-cross-block", 1e-13),
    ("counterexample", "counterexample-mtilde-contraction", 1e-8),
    ("counterexample", "counterexample-energy-density", 1e-13),
    ("counterexample", "counterexample-unperturbed-margin", 1e-13),
    ("vanishing", "rank-vanishing", 1e-6),
    ("oracles", "oracle-newton-sigmas", 1e-13),
    ("oracles", "oracle-stress-sigma-fd", 1e-13),
    ("oracles", "oracle-skyrme-symbol-fd", 1e-13),
    ("canonical-stress", "noether-wave-map", 1e-13),
];

fn hyperlab(args: &[&str]) -> Option<i32> {
    Command::new(env!("CARGO_BIN_EXE_hyperlab"))
        .args(args)
        .output()
        .expect("binary runs")
        .status
        .code()
}

fn negative_control() -> (bool, String) {
    let mut failures = Vec::new();
    let mut covered = std::collections::BTreeSet::new();
    let mut deviation_names = std::collections::BTreeSet::new();
    for (group, name, perturb) in NEGATIVE_CONTROL {
        let base = VerifyOptions {
            samples: 50,
            perturb,
            ..VerifyOptions::default()
        };
        let loose = suite(group, &base);
        deviation_names.extend(
            loose
                .checks
                .iter()
                .filter(|c| c.kind == CheckKind::Deviation)
                .map(|c| c.name.clone()),
        );
        let tight = suite(
            group,
            &VerifyOptions {
                tol_factor: 1e-6,
                tighten: Some(name.into()),
                ..base
            },
        );
        if !check(&loose, name).passed || check(&tight, name).passed || tight.passed {
            failures.push(name);
        }
        covered.insert(name.to_string());
    }
    let args = [
        "verify",
        "--suite",
        "symbol-table",
        "--samples",
        "50",
        "--perturb",
        "1e-13",
    ];
    let exit_loose = hyperlab(&args);
    let mut tight_args = args.to_vec();
    tight_args.extend(["--tighten", "skyrme-symbol-table", "--tol", "1e-6"]);
    let exit_tight = hyperlab(&tight_args);
    let exit_threshold = hyperlab(&["verify", "--suite", "grid", "--threshold", "2"]);
    let ok = failures.is_empty()
        && covered == deviation_names
        && exit_loose == Some(0)
        && exit_tight == Some(1)
        && exit_threshold == Some(1);
    (
        ok,
        format!(
            "{} tightened checks fail ({} did not); binary exits {exit_loose:?} -> {exit_tight:?}, corrupted threshold -> {exit_threshold:?}",
            covered.len() - failures.len(),
            failures.len()
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let s = Duration::from_secs;
    let outcomes = [
        criterion(1, "skyrme symbol table", Some(s(1)), symbol_table),
        criterion(2, "skyrme regime grid", Some(s(30)), grid),
        criterion(
            3,
            "negative-energy counterexample",
            Some(s(1)),
            counterexample,
        ),
        criterion(4, "DEC suite", Some(s(10)), dec),
        criterion(5, "rank vanishing", None, vanishing),
        criterion(6, "oracle equivalences", None, oracles),
        criterion(7, "Sturm machinery", None, sturm),
        criterion(8, "canonical stress", None, canonical_stress),
        criterion(9, "fluid causality window", None, fluid),
        criterion(10, "negative control", None, negative_control),
    ];
    for o in &outcomes {
        println!(
            "{} criterion {:>2} {:<32} {:>8.3}s  {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.title,
            o.elapsed.as_secs_f64(),
            o.detail
        );
    }
    let total: Duration = outcomes.iter().map(|o| o.elapsed).sum();
    println!("total {:.2}s", total.as_secs_f64());
    let failed: Vec<usize> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.id)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
