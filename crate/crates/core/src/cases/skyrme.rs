//! Skyrme regimes: prediction from the strain eigenvalues and numerical
//! classification on adapted-frame jets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolicity::{classify_with_hint, SearchConfig, Verdict};
use crate::linalg::Vector;
use crate::symbol::skyrme_symbol;
use crate::tensor::{adapted_frame, FieldJet, FrameKind};

/// Half-width of the band around the threshold excluded from grids.
pub const THRESHOLD_BAND: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SkyrmePrediction {
    RhTimelikeKernel,
    RhDegenerateKernel,
    RhSubcriticalEigenvalue,
    BreakdownUltrahyperbolic,
    /// On the threshold surface; no verdict.
    Marginal,
}

impl SkyrmePrediction {
    /// Expected classifier label, `None` when marginal.
    pub fn expected_label(self) -> Option<&'static str> {
        match self {
            Self::RhTimelikeKernel | Self::RhDegenerateKernel | Self::RhSubcriticalEigenvalue => {
                Some("regularly-hyperbolic")
            }
            Self::BreakdownUltrahyperbolic => Some("ultrahyperbolic"),
            Self::Marginal => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkyrmeRegime {
    pub lambdas: Vec<f64>,
    pub threshold: f64,
    pub predicted: SkyrmePrediction,
    /// `λ_0² > 1 + λ_1² + λ_2² + λ_3²`, the older sufficient condition for
    /// breakdown.
    pub crutchfield_bell_breakdown: bool,
}

/// Regime of `L = c1 σ_1 + c2 σ_2 + s` at adapted-frame eigenvalues
/// `(λ_0, …)`, with threshold `λ_0² = c1/c2`.
pub fn skyrme_predict(
    lambdas: &[f64],
    c1: f64,
    c2: f64,
    target_dim: usize,
) -> Result<SkyrmeRegime> {
    if !(c1 > 0.0 && c2 > 0.0) {
        return Err(Error::InvalidArgument("c1 and c2 must be positive".into()));
    }
    FieldJet::adapted(lambdas, target_dim)?;
    Ok(predict_from_threshold(lambdas, c1 / c2))
}

/// Prediction against an explicit threshold.
pub fn predict_from_threshold(lambdas: &[f64], threshold: f64) -> SkyrmeRegime {
    let l0sq = lambdas[0] * lambdas[0];
    let predicted = if lambdas[0] == 0.0 {
        SkyrmePrediction::RhTimelikeKernel
    } else if (l0sq - threshold).abs() <= 1e-12 * threshold {
        SkyrmePrediction::Marginal
    } else if l0sq < threshold {
        SkyrmePrediction::RhSubcriticalEigenvalue
    } else {
        SkyrmePrediction::BreakdownUltrahyperbolic
    };
    let spatial: f64 = lambdas[1..].iter().map(|l| l * l).sum();
    SkyrmeRegime {
        lambdas: lambdas.to_vec(),
        threshold,
        predicted,
        crutchfield_bell_breakdown: l0sq > 1.0 + spatial,
    }
}

/// Prediction for an arbitrary jet, through its adapted frame.
pub fn skyrme_predict_jet(jet: &FieldJet, c1: f64, c2: f64, tol: f64) -> Result<SkyrmePrediction> {
    let frame = adapted_frame(jet, tol)?;
    if frame.kind == FrameKind::DegenerateKernel {
        return Ok(SkyrmePrediction::RhDegenerateKernel);
    }
    let lambdas: Vec<f64> = frame.lambdas_sq.iter().map(|l| l.max(0.0).sqrt()).collect();
    let mut r = predict_from_threshold(&lambdas, c1 / c2).predicted;
    if frame.lambdas_sq[0] <= tol * frame.lambdas_sq.iter().fold(1.0f64, |a, b| a.max(*b)) {
        r = SkyrmePrediction::RhTimelikeKernel;
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub lambdas: Vec<f64>,
    pub predicted: SkyrmePrediction,
    pub classified: String,
    pub agrees: bool,
    pub time_margin: f64,
    pub observer_margin: Option<f64>,
    pub crutchfield_bell_breakdown: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub c1: f64,
    pub c2: f64,
    pub threshold: f64,
    pub points: Vec<GridPoint>,
    /// Points dropped for lying in the threshold band or violating the
    /// rank constraint.
    pub skipped: Vec<Vec<f64>>,
    pub agreement: f64,
    pub mismatches: Vec<GridPoint>,
}

/// Classifies one adapted-frame point against a threshold.
pub fn classify_point(
    lambdas: &[f64],
    c1: f64,
    c2: f64,
    threshold: f64,
    target_dim: usize,
    search: &SearchConfig,
) -> Result<GridPoint> {
    let adapted = FieldJet::adapted(lambdas, target_dim)?;
    let regime = predict_from_threshold(lambdas, threshold);
    let sym = skyrme_symbol(&adapted.jet, c1, c2);
    let e0 = Vector::from_fn(lambdas.len(), |i, _| if i == 0 { 1.0 } else { 0.0 });
    let report = classify_with_hint(&sym, &adapted.jet.g, Some(&e0), search);
    let classified = report.verdict.label().to_string();
    let agrees = regime.predicted.expected_label() == Some(classified.as_str());
    Ok(GridPoint {
        lambdas: lambdas.to_vec(),
        predicted: regime.predicted,
        classified,
        agrees,
        time_margin: report.time_margin,
        observer_margin: report.observer_margin,
        crutchfield_bell_breakdown: regime.crutchfield_bell_breakdown,
    })
}

/// Classifies every grid point and compares with the prediction. Points are
/// evaluated in parallel and reported in input order.
pub fn skyrme_verify_grid(
    grid: &[Vec<f64>],
    c1: f64,
    c2: f64,
    search: &SearchConfig,
) -> Result<GridReport> {
    skyrme_verify_grid_with_threshold(grid, c1, c2, c1 / c2, search)
}

/// As [`skyrme_verify_grid`] but predicting with an arbitrary threshold.
pub fn skyrme_verify_grid_with_threshold(
    grid: &[Vec<f64>],
    c1: f64,
    c2: f64,
    threshold: f64,
    search: &SearchConfig,
) -> Result<GridReport> {
    if !(c1 > 0.0 && c2 > 0.0) {
        return Err(Error::InvalidArgument("c1 and c2 must be positive".into()));
    }
    let target_dim = 3;
    let (kept, skipped): (Vec<&Vec<f64>>, Vec<&Vec<f64>>) = grid.iter().partition(|l| {
        let in_band = l[0] != 0.0 && (l[0] * l[0] - threshold).abs() < THRESHOLD_BAND;
        !in_band && FieldJet::adapted(l, target_dim).is_ok()
    });
    let points: Vec<GridPoint> = kept
        .par_iter()
        .map(|l| classify_point(l, c1, c2, threshold, target_dim, search))
        .collect::<Result<_>>()?;
    let agreeing = points.iter().filter(|p| p.agrees).count();
    let agreement = if points.is_empty() {
        1.0
    } else {
        agreeing as f64 / points.len() as f64
    };
    let mismatches = points.iter().filter(|p| !p.agrees).cloned().collect();
    Ok(GridReport {
        c1,
        c2,
        threshold,
        points,
        skipped: skipped.into_iter().cloned().collect(),
        agreement,
        mismatches,
    })
}

/// Cartesian product grid with `λ_3 = 0`.
pub fn product_grid(values: &[f64]) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for &a in values {
        for &b in values {
            for &c in values {
                out.push(vec![a, b, c, 0.0]);
            }
        }
    }
    out
}

/// Extract the violating covector of an ultrahyperbolic verdict.
pub fn violating_eta(verdict: &Verdict) -> Option<Vector> {
    match verdict {
        Verdict::UltrahyperbolicType { violating_eta, .. } => {
            Some(Vector::from_column_slice(violating_eta))
        }
        _ => None,
    }
}
