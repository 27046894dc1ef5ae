use std::collections::BTreeMap;
use std::time::Instant;

use hyperlab::hyperbolicity::classify_with_hint;
use hyperlab::hyperbolicity::{pencil_imaginary_excess, PENCIL_REAL_TOLERANCE};
use hyperlab::linalg;
use hyperlab::verify::vanishing_scale;
use hyperlab::{
    adapted_frame, check_dec, hyperbolic_direction_test, principal_symbol_fd, real_root_count,
    skyrme_symbol, strain_invariants, stress_energy, symbol_det_poly, ClassificationReport,
    DecReport, DirectionVerdict, FieldJet, FrameKind, LagrangianModel, Matrix, ModelSpec, Poly,
    PrincipalSymbol, RootCount, Vector, Verdict,
};
use serde::Serialize;

use crate::config::{build_jet, AnalysisConfig, CheckName};
use crate::error::CliResult;

/// Transverse directions tried by the direction test beyond the axes.
const TRANSVERSE_SAMPLES: usize = 16;

#[derive(Debug, Serialize)]
pub struct Invariants {
    /// `σ_1, …, σ_N`.
    pub sigmas: Vec<f64>,
    pub rank: usize,
    pub lagrangian: f64,
}

#[derive(Debug, Serialize)]
pub struct StressReport {
    pub components: Vec<Vec<f64>>,
    pub norm: f64,
    /// Zero up to roundoff.
    pub vanishing: bool,
}

#[derive(Debug, Serialize)]
pub struct DecSection {
    #[serde(flatten)]
    pub report: DecReport,
    /// `T` vanishes, so the condition holds trivially.
    pub vanishing: bool,
}

#[derive(Debug, Serialize)]
pub struct SymbolReport {
    pub source: &'static str,
    pub max_abs: f64,
    pub asymmetry: f64,
    /// `m(dt, dt)` for the coordinate time covector.
    pub time_block: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
pub struct Margins {
    pub time: f64,
    pub observer: Option<f64>,
}

#[derive(Debug, Default, Serialize)]
pub struct Witnesses {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_covector: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_vector: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violating_eta: Option<Vec<f64>>,
}

#[derive(Debug, Serialize)]
pub struct DetPolyReport {
    pub eta: Vec<f64>,
    pub zeta: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub roots: RootCount,
    /// Largest relative imaginary part among the pencil eigenvalues.
    pub pencil_imaginary_excess: Option<f64>,
    /// Sturm count on the coefficients, or the pencil eigenvalues when
    /// roundoff has split a multiple root.
    pub all_real_rooted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<DirectionVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction_error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub config: AnalysisConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariants: Option<Invariants>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stress_energy: Option<StressReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dec: Option<DecSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbol: Option<SymbolReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<ClassificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margins: Option<Margins>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Witnesses>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub det_poly: Option<DetPolyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

fn rows(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Closed form for Skyrme, finite differences otherwise.
pub fn symbol_for(
    spec: &ModelSpec,
    model: &LagrangianModel,
    jet: &FieldJet,
) -> CliResult<(PrincipalSymbol, &'static str)> {
    Ok(match spec {
        ModelSpec::Skyrme { c1, c2 } => (skyrme_symbol(jet, *c1, *c2), "closed-form"),
        _ => (principal_symbol_fd(model, jet)?, "finite-difference"),
    })
}

/// Timelike eigenvector of the strain, when the frame is generic.
pub fn observer_hint(jet: &FieldJet) -> Option<Vector> {
    let frame = adapted_frame(jet, 1e-9).ok()?;
    (frame.kind == FrameKind::Generic).then(|| frame.vectors[0].clone())
}

fn witnesses(v: &Verdict) -> Witnesses {
    match v {
        Verdict::RegularlyHyperbolic {
            t_covector,
            x_vector,
            ..
        } => Witnesses {
            t_covector: Some(t_covector.clone()),
            x_vector: Some(x_vector.clone()),
            violating_eta: None,
        },
        Verdict::EllipticType { .. } => Witnesses::default(),
        Verdict::UltrahyperbolicType {
            t_covector,
            worst_x,
            violating_eta,
            ..
        } => Witnesses {
            t_covector: Some(t_covector.clone()),
            x_vector: Some(worst_x.clone()),
            violating_eta: Some(violating_eta.clone()),
        },
    }
}

/// The coordinate axis least aligned with `η`, made orthogonal to it.
fn transverse_axis(eta: &Vector) -> Vector {
    let e = eta.normalize();
    (0..eta.len())
        .map(|k| {
            let u = linalg::unit(eta.len(), k);
            &u - &e * e[k]
        })
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("nonempty dimension")
        .normalize()
}

fn det_poly(
    sym: &PrincipalSymbol,
    jet: &FieldJet,
    report: Option<&ClassificationReport>,
    seed: u64,
) -> CliResult<DetPolyReport> {
    let eta = match report.map(|r| &r.verdict) {
        Some(Verdict::RegularlyHyperbolic { t_covector, .. })
        | Some(Verdict::UltrahyperbolicType { t_covector, .. }) => {
            Vector::from_vec(t_covector.clone())
        }
        _ => jet.g.time_covector(),
    };
    let zeta = transverse_axis(&eta);
    let poly: Poly = symbol_det_poly(sym, &zeta, &eta);
    let roots = real_root_count(&poly)?;
    let excess = pencil_imaginary_excess(sym, &zeta, &eta);
    let all_real_rooted =
        roots.all_real_rooted || excess.is_some_and(|x| x <= PENCIL_REAL_TOLERANCE);
    let (direction, direction_error) =
        match hyperbolic_direction_test(sym, &eta, TRANSVERSE_SAMPLES, seed) {
            Ok(d) => (Some(d), None),
            Err(e) => (None, Some(e.to_string())),
        };
    Ok(DetPolyReport {
        eta: eta.iter().copied().collect(),
        zeta: zeta.iter().copied().collect(),
        coefficients: poly.coeffs,
        roots,
        pencil_imaginary_excess: excess,
        all_real_rooted,
        direction,
        direction_error,
    })
}

pub fn analyze(cfg: &AnalysisConfig, timings: bool) -> CliResult<AnalysisReport> {
    let mut clock = BTreeMap::new();
    let mut lap = {
        let mut last = Instant::now();
        move |name: &str, clock: &mut BTreeMap<String, f64>| {
            let now = Instant::now();
            clock.insert(name.to_string(), (now - last).as_secs_f64() * 1e3);
            last = now;
        }
    };
    let (jet, _) = build_jet(cfg)?;
    let model = LagrangianModel::from_spec(&cfg.model)?;
    let mut out = AnalysisReport {
        config: cfg.clone(),
        invariants: None,
        stress_energy: None,
        dec: None,
        symbol: None,
        classification: None,
        verdict: None,
        margins: None,
        witnesses: None,
        det_poly: None,
        timings_ms: None,
    };

    if cfg.wants(CheckName::Invariants) {
        let strain = strain_invariants(&jet);
        out.invariants = Some(Invariants {
            lagrangian: model.value(jet.s, &strain.sigmas[1..])?,
            sigmas: strain.sigmas[1..].to_vec(),
            rank: strain.rank,
        });
        lap("invariants", &mut clock);
    }

    if cfg.wants(CheckName::StressEnergy) || cfg.wants(CheckName::Dec) {
        let t = stress_energy(&model, &jet)?;
        let norm = t.norm();
        let vanishing = norm <= vanishing_scale(&jet);
        if cfg.wants(CheckName::StressEnergy) {
            out.stress_energy = Some(StressReport {
                components: rows(&t.components),
                norm,
                vanishing,
            });
        }
        if cfg.wants(CheckName::Dec) {
            let mut report = check_dec(&t, &jet.g, cfg.dec_samples, cfg.seed)?;
            report.holds |= vanishing;
            out.dec = Some(DecSection { report, vanishing });
        }
        lap("stress_energy", &mut clock);
    }

    let needs_symbol = [CheckName::Symbol, CheckName::Classify, CheckName::DetPoly]
        .iter()
        .any(|&c| cfg.wants(c));
    if needs_symbol {
        let (sym, source) = symbol_for(&cfg.model, &model, &jet)?;
        lap("symbol", &mut clock);
        if cfg.wants(CheckName::Symbol) {
            let dt = jet.g.time_covector();
            out.symbol = Some(SymbolReport {
                source,
                max_abs: sym.max_abs(),
                asymmetry: sym.asymmetry(),
                time_block: rows(&hyperlab::symbol::quadratic_block(&sym, &dt)),
            });
        }
        if cfg.wants(CheckName::Classify) {
            let hint = observer_hint(&jet);
            let report = classify_with_hint(&sym, &jet.g, hint.as_ref(), &cfg.search);
            out.verdict = Some(report.verdict.label().to_string());
            out.margins = Some(Margins {
                time: report.time_margin,
                observer: report.observer_margin,
            });
            out.witnesses = Some(witnesses(&report.verdict));
            out.classification = Some(report);
            lap("classify", &mut clock);
        }
        if cfg.wants(CheckName::DetPoly) {
            out.det_poly = Some(det_poly(&sym, &jet, out.classification.as_ref(), cfg.seed)?);
            lap("det_poly", &mut clock);
        }
    }

    if timings {
        out.timings_ms = Some(clock);
    }
    Ok(out)
}
