//! Named verification suites. Each check carries a value, a tolerance and a
//! pass flag so a runner can print a table and fail loudly.
//!
//! Two knobs exist for negative controls. `tol_factor` multiplies the
//! tolerance of every deviation check (or only the one named by `tighten`),
//! and `perturb` shifts the inputs of the computed side of each comparison
//! while the reference keeps the unperturbed input.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cases::counterexample::{negative_energy_counterexample, UNPERTURBED_OBSERVER_MARGIN};
use crate::cases::equivalence::stress_equivalence;
use crate::cases::fluid::{fluid_causality_check, power_law, tachyonic_fluid_demo};
use crate::cases::skyrme::{classify_point, product_grid, skyrme_verify_grid_with_threshold};
use crate::dec::check_dec;
use crate::error::{Error, Result};
use crate::hyperbolicity::{
    hyperbolic_direction_test, observer_margin, real_root_count, symbol_det_poly, DirectionVerdict,
    Poly, SearchConfig,
};
use crate::linalg::{self, Matrix, Vector};
use crate::models::LagrangianModel;
use crate::sampling::{low_rank_jet, random_jet};
use crate::stress::{stress_energy, stress_energy_fd, stress_energy_sigma};
use crate::symbol::{
    canonical_stress_noether, contract_symbol, principal_symbol_fd, skyrme_symbol,
};
use crate::tensor::{newton_sigma_oracle, strain_invariants, FieldJet};

pub const SUITES: [&str; 13] = [
    "paper",
    "skyrme",
    "counterexample",
    "fluid",
    "stress",
    "all",
    "symbol-table",
    "grid",
    "dec",
    "vanishing",
    "oracles",
    "sturm",
    "canonical-stress",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// Nonnegative discrepancy that must not exceed the tolerance.
    Deviation,
    /// Signed quantity that must not exceed the tolerance; typically far
    /// below it, so tightening does not flip it.
    Margin,
    /// Boolean outcome.
    Flag,
    /// Recorded without an assertion.
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyOptions {
    pub tol_factor: f64,
    /// Restrict `tol_factor` to the named check.
    pub tighten: Option<String>,
    pub perturb: f64,
    /// Replaces `c1/c2` when predicting Skyrme regimes.
    pub threshold: Option<f64>,
    pub samples: usize,
    pub seed: u64,
    pub search: SearchConfig,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tol_factor: 1.0,
            tighten: None,
            perturb: 0.0,
            threshold: None,
            samples: 500,
            seed: 20_240_601,
            search: SearchConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub options: VerifyOptions,
    pub checks: Vec<Check>,
    pub passed: bool,
}

struct Ctx<'a> {
    opts: &'a VerifyOptions,
    out: Vec<Check>,
}

impl Ctx<'_> {
    fn tol(&self, name: &str, base: f64) -> f64 {
        match &self.opts.tighten {
            Some(t) if t != name => base,
            _ => base * self.opts.tol_factor,
        }
    }

    fn deviation(&mut self, name: &str, value: f64, base_tol: f64, detail: String) {
        let tolerance = self.tol(name, base_tol);
        self.out.push(Check {
            name: name.into(),
            kind: CheckKind::Deviation,
            passed: value.is_finite() && value <= tolerance,
            value,
            tolerance,
            detail,
        });
    }

    fn margin(&mut self, name: &str, value: f64, bound: f64, detail: String) {
        self.out.push(Check {
            name: name.into(),
            kind: CheckKind::Margin,
            passed: value.is_finite() && value <= bound,
            value,
            tolerance: bound,
            detail,
        });
    }

    fn flag(&mut self, name: &str, ok: bool, value: f64, detail: String) {
        self.out.push(Check {
            name: name.into(),
            kind: CheckKind::Flag,
            passed: ok,
            value,
            tolerance: 0.0,
            detail,
        });
    }

    fn info(&mut self, name: &str, value: f64, detail: String) {
        self.out.push(Check {
            name: name.into(),
            kind: CheckKind::Info,
            passed: true,
            value,
            tolerance: f64::NAN,
            detail,
        });
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.opts.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    /// Adds `perturb · (k + 1)` to the entry with linear index `k`.
    fn shift(&self, m: &Matrix) -> Matrix {
        let mut out = m.clone();
        for (k, x) in out.iter_mut().enumerate() {
            *x += self.opts.perturb * (k + 1) as f64;
        }
        out
    }
}

/// `m(f_3, f_3)` in the `f'` basis for `L = ½σ_1 + ½σ_2 + s`.
fn m33_expected(l: &[f64], target_dim: usize) -> Matrix {
    let sq: Vec<f64> = l.iter().map(|x| x * x).collect();
    let mut diag = vec![
        1.0 + sq[1] + sq[2],
        1.0 - sq[0] + sq[2],
        1.0 - sq[0] + sq[1],
    ];
    if target_dim == 4 {
        diag.push(1.0 - sq[0] + sq[1] + sq[2]);
    } else {
        diag.push(0.0);
    }
    Matrix::from_diagonal(&Vector::from_vec(diag))
}

fn symbol_table(cx: &mut Ctx) -> Result<()> {
    let lambdas = [1.5, 0.5, 2.0, 0.0];
    let f3 = linalg::unit(4, 3);
    for (name, n) in [("skyrme-symbol-table", 3), ("skyrme-symbol-table-n4", 4)] {
        let mut shifted = lambdas;
        shifted[0] += cx.opts.perturb;
        let adapted = FieldJet::adapted(&shifted, n)?;
        let sym = skyrme_symbol(&adapted.jet, 0.5, 0.5);
        let table = adapted.in_target_basis(&contract_symbol(&sym, &f3, &f3));
        let expected = m33_expected(&lambdas, n);
        let dev = linalg::max_abs(&(&table - &expected));
        cx.deviation(
            name,
            dev,
            1e-8,
            format!("diag {:?}", table.diagonal().as_slice()),
        );
        if n == 3 {
            let fd =
                principal_symbol_fd(&LagrangianModel::Skyrme { c1: 0.5, c2: 0.5 }, &adapted.jet)?;
            let fd_table = adapted.in_target_basis(&contract_symbol(&fd, &f3, &f3));
            let dev = linalg::max_abs(&(&fd_table - &expected));
            cx.deviation(
                "skyrme-symbol-table-fd",
                dev,
                1e-6,
                "difference-quotient symbol".into(),
            );
        }
    }
    // cross block m(f_3, f_0) with λ_3 ≠ 0: the symmetric part of −λ_3λ_0 f'_3⊗f'_0
    let l = [1.2, 0.0, 2.0, 1.0];
    let mut shifted = l;
    shifted[3] += cx.opts.perturb;
    let adapted = FieldJet::adapted(&shifted, 3)?;
    let sym = skyrme_symbol(&adapted.jet, 0.5, 0.5);
    let cross = adapted.in_target_basis(&contract_symbol(
        &sym,
        &linalg::unit(4, 3),
        &linalg::unit(4, 0),
    ));
    let mut expected = Matrix::zeros(4, 4);
    expected[(3, 0)] = -0.5 * l[3] * l[0];
    expected[(0, 3)] = -0.5 * l[3] * l[0];
    cx.deviation(
        "skyrme-cross-block",
        linalg::max_abs(&(&cross - &expected)),
        1e-8,
        format!("m(f3,f0)[3][0] = {}", cross[(3, 0)]),
    );
    Ok(())
}

fn regime_grid(cx: &mut Ctx) -> Result<()> {
    let mut grid = product_grid(&[0.0, 0.5, 1.5, 2.0, 3.0]);
    grid.push(vec![1.1, 2.0, 3.0, 0.0]);
    grid.push(vec![1.2, 0.0, 2.0, 1.0]);
    let threshold = cx.opts.threshold.unwrap_or(1.0);
    let report = skyrme_verify_grid_with_threshold(&grid, 0.5, 0.5, threshold, &cx.opts.search)?;
    cx.flag(
        "skyrme-regime-grid",
        report.points.len() >= 100 && report.mismatches.is_empty(),
        report.agreement,
        format!(
            "{} points, {} mismatches, {} skipped",
            report.points.len(),
            report.mismatches.len(),
            report.skipped.len()
        ),
    );
    let sharp = report
        .points
        .iter()
        .find(|p| p.lambdas == [1.1, 2.0, 3.0, 0.0])
        .ok_or_else(|| {
            Error::InvalidArgument("sharpened point fell in the threshold band".into())
        })?;
    cx.flag(
        "skyrme-sharpened-point",
        sharp.classified == "ultrahyperbolic" && !sharp.crutchfield_bell_breakdown,
        sharp.observer_margin.unwrap_or(f64::NAN),
        format!("(1.1, 2, 3, 0) classified {}", sharp.classified),
    );
    Ok(())
}

fn threshold_scan(cx: &mut Ctx) -> Result<()> {
    let threshold = cx.opts.threshold.unwrap_or(1.0);
    let mut flips_ok = true;
    let mut n = 0;
    for k in 0..=20 {
        if k == 10 {
            continue;
        }
        let l0 = 0.1 * k as f64;
        let p = classify_point(
            &[l0, 0.5, 1.0, 0.0],
            0.5,
            0.5,
            threshold,
            3,
            &cx.opts.search,
        )?;
        let expect = if l0 * l0 < threshold {
            "regularly-hyperbolic"
        } else {
            "ultrahyperbolic"
        };
        flips_ok &= p.classified == expect;
        n += 1;
    }
    cx.flag(
        "threshold-scan-flip",
        flips_ok,
        n as f64,
        "lambda0 in [0, 2] step 0.1".into(),
    );
    Ok(())
}

fn counterexample(cx: &mut Ctx) -> Result<()> {
    let eps = 0.01;
    let r = negative_energy_counterexample(eps + cx.opts.perturb, &cx.opts.search)?;
    cx.flag(
        "counterexample-m00-negative",
        r.m00 == crate::hyperbolicity::Definiteness::NegDef,
        -1.0 - eps,
        format!("{:?}", r.m00),
    );
    cx.margin(
        "counterexample-observer-margin",
        -r.observer_margin,
        0.0,
        format!("min eig at dt annihilator {}", r.observer_margin),
    );
    // contraction of the shifted data against m̃
    let data = cx.shift(&crate::cases::counterexample::rotation_data());
    let mt = crate::cases::counterexample::mtilde();
    let mut c = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            let block = contract_symbol(&mt, &linalg::unit(3, a), &linalg::unit(3, b));
            let pa: Vector = data.row(a).transpose();
            let pb: Vector = data.row(b).transpose();
            c += pa.dot(&(block * pb));
        }
    }
    cx.deviation(
        "counterexample-mtilde-contraction",
        c.abs(),
        1e-12,
        format!("{c}"),
    );
    cx.deviation(
        "counterexample-energy-density",
        (r.energy_density + 2.0 * eps).abs(),
        1e-10,
        format!("E = {}", r.energy_density),
    );
    let r0 = negative_energy_counterexample(cx.opts.perturb, &cx.opts.search)?;
    cx.deviation(
        "counterexample-unperturbed-margin",
        (r0.observer_margin - UNPERTURBED_OBSERVER_MARGIN).abs(),
        1e-9,
        format!("{}", r0.observer_margin),
    );
    let too_large = matches!(
        negative_energy_counterexample(10.0, &cx.opts.search),
        Err(Error::EpsilonTooLarge { .. })
    );
    cx.flag(
        "counterexample-epsilon-too-large",
        too_large,
        10.0,
        "epsilon = 10".into(),
    );
    Ok(())
}

fn random_dims<R: Rng>(rng: &mut R) -> (usize, usize) {
    (rng.random_range(2..=4), rng.random_range(1..=4))
}

/// Random or tachyonic adapted jets for the DEC suite.
fn dec_jet<R: Rng>(rng: &mut R, k: usize) -> FieldJet {
    if k % 5 == 4 {
        let l0 = rng.random_range(0.0..3.0);
        let l = [
            l0,
            rng.random_range(0.0..2.0),
            rng.random_range(0.0..2.0),
            0.0,
        ];
        let mut jet = FieldJet::adapted(&l, 3).expect("rank constraint holds").jet;
        jet.s = rng.random::<f64>();
        jet
    } else {
        let nt = rng.random_range(3..=4);
        random_jet(rng, 4, nt, 0.6)
    }
}

/// Largest of `−T(X,X)/‖T‖` and `(T∘g⁻¹∘T)(X,X)/‖T‖²` over samples, or
/// `None` when `‖T‖ ≤ vanish`, i.e. `T` is zero up to roundoff.
pub fn dec_violation(
    t: &crate::stress::StressEnergy,
    jet: &FieldJet,
    vanish: f64,
    samples: usize,
    seed: u64,
) -> Result<Option<f64>> {
    let norm = t.norm();
    if norm <= vanish {
        return Ok(None);
    }
    let r = check_dec(t, &jet.g, samples, seed)?;
    Ok(Some(
        (-r.worst_energy / norm).max(r.worst_causality / (norm * norm)),
    ))
}

/// `1e-10 ‖g‖ max(1, ‖D‖)^N`: below this a stress tensor built from the
/// invariants is indistinguishable from zero.
pub fn vanishing_scale(jet: &FieldJet) -> f64 {
    let d = linalg::spectral_norm(&strain_invariants(jet).strain).max(1.0);
    1e-10 * linalg::spectral_norm(jet.g.components()) * d.powi(jet.base_dim() as i32)
}

fn dec_models() -> Vec<(&'static str, LagrangianModel)> {
    vec![
        ("sigma1", LagrangianModel::sigma(1)),
        ("sigma2", LagrangianModel::sigma(2)),
        ("sigma3", LagrangianModel::sigma(3)),
        ("skyrme", LagrangianModel::Skyrme { c1: 0.5, c2: 0.5 }),
        ("born-infeld", LagrangianModel::BornInfeld { b: 2.0 }),
        (
            "sqrt-fluid",
            LagrangianModel::Fluid {
                index: 3,
                offset: 2.0,
                exponent: 0.5,
            },
        ),
    ]
}

fn dec_suite(cx: &mut Ctx) -> Result<()> {
    let mut worst = f64::NEG_INFINITY;
    let mut detail = Vec::new();
    for (i, (name, model)) in dec_models().into_iter().enumerate() {
        let mut rng = cx.rng(100 + i as u64);
        let mut used = 0;
        let mut skipped = 0;
        let mut k = 0;
        let mut model_worst = f64::NEG_INFINITY;
        let mut vanishing = 0;
        while used < cx.opts.samples {
            let jet = dec_jet(&mut rng, k);
            k += 1;
            let t = match stress_energy(&model, &jet) {
                Ok(t) => t,
                Err(Error::Domain(_)) => {
                    skipped += 1;
                    if skipped > 20 * cx.opts.samples {
                        return Err(Error::Domain(format!("{name}: no jets in domain")));
                    }
                    continue;
                }
                Err(e) => return Err(e),
            };
            match dec_violation(&t, &jet, vanishing_scale(&jet), 64, k as u64)? {
                Some(v) => model_worst = model_worst.max(v),
                None => vanishing += 1,
            }
            used += 1;
        }
        worst = worst.max(model_worst);
        detail.push(format!(
            "{name}: {model_worst:.3e} ({vanishing} vanishing, {skipped} out of domain)"
        ));
    }
    cx.margin("dec-suite", worst, 1e-9, detail.join("; "));
    Ok(())
}

fn rank_vanishing(cx: &mut Ctx) -> Result<()> {
    let mut rng = cx.rng(200);
    let mut worst = 0.0f64;
    let count = (cx.opts.samples * 2 / 5).max(1);
    for _ in 0..count {
        let nt = rng.random_range(2..=4);
        let rank = rng.random_range(1..nt.min(4));
        let jet = low_rank_jet(&mut rng, 4, nt, rank, 0.8);
        let shifted = jet.with_dphi(cx.shift(&jet.dphi));
        let d = strain_invariants(&jet).strain;
        let dn = linalg::spectral_norm(&d).max(1.0);
        for j in (rank + 1)..=4 {
            let t = stress_energy_sigma(&shifted, j)?;
            let scale = linalg::spectral_norm(jet.g.components()) * dn.powi(j as i32);
            worst = worst.max(t.norm() / scale);
        }
    }
    cx.deviation(
        "rank-vanishing",
        worst,
        1e-10,
        format!("{count} low-rank jets"),
    );
    Ok(())
}

fn oracles(cx: &mut Ctx) -> Result<()> {
    let mut rng = cx.rng(300);
    let (mut newton, mut fd, mut sym_dev) = (0.0f64, 0.0f64, 0.0f64);
    let skyrme = LagrangianModel::Skyrme { c1: 0.5, c2: 0.5 };
    for _ in 0..cx.opts.samples {
        let (nb, nt) = random_dims(&mut rng);
        let jet = random_jet(&mut rng, nb, nt, 0.6);
        let shifted = jet.with_dphi(cx.shift(&jet.dphi));
        let strain = strain_invariants(&jet);
        let oracle = newton_sigma_oracle(&strain_invariants(&shifted).strain);
        let dn = linalg::spectral_norm(&strain.strain).max(1.0);
        for j in 1..=nb {
            let dev = (strain.sigmas[j] - oracle[j]).abs() / dn.powi(j as i32);
            newton = newton.max(dev);
        }
        for j in 1..=nb.min(3) {
            let exact = stress_energy_sigma(&jet, j)?;
            let diff = stress_energy_fd(&LagrangianModel::sigma(j), &shifted)?;
            let scale = exact
                .norm()
                .max(linalg::spectral_norm(jet.g.components()) * 1e-3 * dn.powi(j as i32));
            fd = fd.max((exact.components - diff.components).norm() / scale);
        }
        let closed = skyrme_symbol(&jet, 0.5, 0.5);
        let diff = principal_symbol_fd(&skyrme, &shifted)?;
        sym_dev = sym_dev.max(closed.distance(&diff) / closed.max_abs());
    }
    let n = cx.opts.samples;
    cx.deviation("oracle-newton-sigmas", newton, 1e-10, format!("{n} jets"));
    cx.deviation(
        "oracle-stress-sigma-fd",
        fd,
        1e-6,
        format!("{n} jets, j <= 3"),
    );
    cx.deviation(
        "oracle-skyrme-symbol-fd",
        sym_dev,
        1e-6,
        format!("{n} jets"),
    );
    Ok(())
}

fn sturm(cx: &mut Ctx) -> Result<()> {
    let mut rng = cx.rng(400);
    let mut mismatches = 0;
    let count = 2 * cx.opts.samples;
    for _ in 0..count {
        let (p, distinct, real_rooted) = constructed_polynomial(&mut rng);
        let c = real_root_count(&p)?;
        if c.sturm_count != distinct
            || c.all_real_rooted != real_rooted
            || c.positive_count > c.descartes_bound
        {
            mismatches += 1;
        }
    }
    cx.flag(
        "sturm-constructed-roots",
        mismatches == 0,
        mismatches as f64,
        format!("{count} polynomials with known roots"),
    );

    // λ_1² < λ_0² − 1 < λ_2², λ_3 = 0
    let adapted = FieldJet::adapted(&[1.5, 0.5, 2.0, 0.0], 3)?;
    let sym = skyrme_symbol(&adapted.jet, 0.5, 0.5);
    let f0 = linalg::unit(4, 0);
    let f3 = linalg::unit(4, 3);
    let m = symbol_det_poly(&sym, &f3, &f0);
    let c = real_root_count(&m)?;
    let ok = m.degree() == 6 && m.coeffs[0] < 0.0 && m.leading() < 0.0 && c.sturm_count <= 4;
    cx.flag(
        "skyrme-det-poly-roots",
        ok,
        c.sturm_count as f64,
        format!(
            "degree {}, M(0) = {:.4}, leading {:.4}, {} distinct real roots",
            m.degree(),
            m.coeffs[0],
            m.leading(),
            c.sturm_count
        ),
    );
    let v = hyperbolic_direction_test(&sym, &f3, 64, cx.opts.seed)?;
    cx.flag(
        "skyrme-f3-not-hyperbolic",
        matches!(v, DirectionVerdict::CounterexampleZeta { .. }),
        0.0,
        "hyperbolic direction test at f3".into(),
    );
    Ok(())
}

/// Product of linear factors at multiples of 1/8 (some repeated) and
/// irreducible quadratics; returns the polynomial, its distinct real root
/// count and whether every root is real.
pub fn constructed_polynomial<R: Rng>(rng: &mut R) -> (Poly, usize, bool) {
    let mut roots: Vec<f64> = Vec::new();
    let n_real = rng.random_range(0..=6);
    for _ in 0..n_real {
        roots.push(rng.random_range(-16..=16) as f64 / 8.0);
    }
    let mut p = Poly::from_roots(&roots);
    let mut degree = roots.len();
    let mut complex = 0;
    while degree < 8 && rng.random_bool(0.4) {
        let re = rng.random_range(-8..=8) as f64 / 8.0;
        let im = rng.random_range(1..=8) as f64 / 8.0;
        p = p.mul(&Poly::new(vec![re * re + im * im, -2.0 * re, 1.0]));
        degree += 2;
        complex += 1;
    }
    if degree == 0 {
        p = Poly::new(vec![rng.random_range(1..=4) as f64]);
    }
    let lead = if rng.random_bool(0.5) { 1.0 } else { -0.5 };
    roots.sort_by(f64::total_cmp);
    roots.dedup();
    (p.scale(lead), roots.len(), complex == 0)
}

fn noether_stress(cx: &mut Ctx) -> Result<()> {
    let mut rng = cx.rng(500);
    let mut worst = 0.0f64;
    let mut jets = Vec::new();
    for _ in 0..cx.opts.samples {
        let (nb, nt) = random_dims(&mut rng);
        let jet = random_jet(&mut rng, nb, nt, 0.6);
        let t = stress_energy_sigma(&jet, 1)?;
        let expected = jet.g.inverse() * t.components * 2.0;
        let shifted = jet.with_dphi(cx.shift(&jet.dphi));
        let q = canonical_stress_noether(&LagrangianModel::WaveMap, &shifted)?;
        worst = worst.max((q.components - &expected).norm() / expected.norm().max(1.0));
        if nb == 4 && nt >= 2 && jets.len() < 50 {
            jets.push(jet);
        }
    }
    cx.deviation(
        "noether-wave-map",
        worst,
        1e-8,
        format!("{} jets", cx.opts.samples),
    );
    if !jets.is_empty() {
        let r = stress_equivalence(2, &jets)?;
        cx.info(
            "noether-sigma2-report",
            r.z_form.max_relative_residual,
            format!(
                "noether ratio {:?} (residual {:.2e}); z-form ratio {:?} (residual {:.2e})",
                r.noether.ratio,
                r.noether.max_relative_residual,
                r.z_form.ratio,
                r.z_form.max_relative_residual
            ),
        );
    }
    Ok(())
}

fn fluid(cx: &mut Ctx) -> Result<()> {
    let mut wrong = Vec::new();
    for k in 1..=30 {
        let p = 0.05 * k as f64;
        for sigma in [0.25, 1.0, 4.0] {
            let r = fluid_causality_check(&power_law(p), 1, sigma)?;
            let interior = p > 0.5 + 1e-9 && p < 1.0 - 1e-9;
            let at_half = (p - 0.5).abs() < 1e-9;
            let at_one = (p - 1.0).abs() < 1e-9;
            let ok = r.causal_and_hyperbolic() == interior
                && (!at_half || r.marginal)
                && (!at_one || !r.concave_ok);
            if !ok {
                wrong.push(format!("p={p:.2} sigma={sigma}"));
            }
        }
    }
    cx.flag(
        "fluid-power-law-window",
        wrong.is_empty(),
        wrong.len() as f64,
        if wrong.is_empty() {
            "causal and hyperbolic exactly for 1/2 < p < 1".into()
        } else {
            wrong.join(", ")
        },
    );
    let demo = tachyonic_fluid_demo(2.0, 1000, &cx.opts.search)?;
    cx.flag(
        "tachyonic-fluid-dec",
        demo.dec.holds,
        demo.dec.worst_energy,
        "L = sqrt(2 + sigma3)".into(),
    );
    cx.flag(
        "tachyonic-fluid-breakdown",
        !demo.classification.verdict.is_regularly_hyperbolic(),
        demo.classification.observer_margin.unwrap_or(f64::NAN),
        demo.classification.verdict.label().into(),
    );
    Ok(())
}

fn skyrme_observer_witness(cx: &mut Ctx) -> Result<()> {
    let mut l = [1.5, 0.5, 2.0, 0.0];
    l[0] += cx.opts.perturb;
    let adapted = FieldJet::adapted(&l, 3)?;
    let sym = skyrme_symbol(&adapted.jet, 0.5, 0.5);
    let obs = observer_margin(&sym, &adapted.jet.g, &linalg::unit(4, 0), &cx.opts.search)?;
    cx.margin(
        "skyrme-observer-violation",
        obs.min_eig + 1.0,
        1e-8,
        format!("min eig {} at X = e0", obs.min_eig),
    );
    Ok(())
}

type CheckFn = fn(&mut Ctx) -> Result<()>;

fn suite_fns(name: &str) -> Option<Vec<CheckFn>> {
    let paper: Vec<CheckFn> = vec![
        symbol_table,
        regime_grid,
        counterexample,
        dec_suite,
        rank_vanishing,
        oracles,
        sturm,
        noether_stress,
        fluid,
    ];
    Some(match name {
        "paper" => paper,
        "skyrme" => vec![
            symbol_table,
            skyrme_observer_witness,
            regime_grid,
            threshold_scan,
        ],
        "counterexample" => vec![counterexample],
        "fluid" => vec![fluid],
        "stress" => vec![dec_suite, rank_vanishing, oracles, noether_stress],
        "symbol-table" => vec![symbol_table],
        "grid" => vec![regime_grid, threshold_scan],
        "dec" => vec![dec_suite],
        "vanishing" => vec![rank_vanishing],
        "oracles" => vec![oracles],
        "sturm" => vec![sturm],
        "canonical-stress" => vec![noether_stress],
        "all" => {
            let mut all = paper;
            all.push(skyrme_observer_witness);
            all.push(threshold_scan);
            all
        }
        _ => return None,
    })
}

/// Runs a named suite.
pub fn run_suite(name: &str, opts: &VerifyOptions) -> Result<SuiteReport> {
    let fns = suite_fns(name).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "unknown suite '{name}', expected one of {SUITES:?}"
        ))
    })?;
    if !(opts.tol_factor > 0.0) || !opts.perturb.is_finite() {
        return Err(Error::InvalidArgument(
            "tol factor must be positive, perturbation finite".into(),
        ));
    }
    opts.search.validate()?;
    let mut cx = Ctx {
        opts,
        out: Vec::new(),
    };
    for f in fns {
        f(&mut cx)?;
    }
    let passed = cx.out.iter().all(|c| c.passed);
    Ok(SuiteReport {
        suite: name.into(),
        options: opts.clone(),
        checks: cx.out,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert!(matches!(
            run_suite("nosuch", &VerifyOptions::default()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn counterexample_suite_passes() {
        let r = run_suite("counterexample", &VerifyOptions::default()).unwrap();
        assert!(r.passed, "{:#?}", r.checks);
    }

    #[test]
    fn constructed_polynomials_have_expected_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let (p, distinct, _) = constructed_polynomial(&mut rng);
            assert!(p.degree() <= 8);
            assert!(distinct <= p.degree());
        }
    }
}
