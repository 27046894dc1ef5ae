//! Definiteness tests, time-function and observer searches, breakdown
//! classification, and real-rootedness of the determinant symbol.
//!
//! A symbol is regularly hyperbolic when some covector `t` makes `m(t,t)`
//! negative definite and some vector `X` makes `m(η,η)` positive definite
//! for every nonzero `η` with `η(X) = 0`. Both quantifiers are searched
//! numerically, so "found" answers are certified while "not found" answers
//! are qualified by the search resolution recorded in the report.

mod det;
mod exact;
mod poly;
mod search;

pub use det::{
    hyperbolic_direction_test, pencil_imaginary_excess, symbol_det_poly, DirectionVerdict,
    PENCIL_REAL_TOLERANCE,
};
pub use poly::{poly_gcd, real_root_count, square_free_part, Poly, RootCount, SturmChain};
pub use search::{maximize_on_sphere, sphere_points, SphereMax};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::symbol::{quadratic_block, PrincipalSymbol};
use crate::tensor::BaseMetric;

/// Default relative tolerance for definiteness decisions.
pub const DEFINITENESS_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Definiteness {
    PosDef,
    NegDef,
    PosSemi,
    NegSemi,
    Indefinite,
    Zero,
}

/// Classifies a symmetric matrix by the signs of its eigenvalues relative to
/// `tol · ‖mat‖`.
pub fn definiteness(mat: &Matrix, tol: f64) -> Result<Definiteness> {
    let scale = linalg::max_abs(mat);
    let asym = linalg::asymmetry(mat);
    if asym > tol.max(1e-12) * scale {
        return Err(Error::AsymmetricInput { asymmetry: asym });
    }
    let ev = linalg::sym_eigenvalues(&linalg::symmetrize(mat));
    let norm = ev.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if norm == 0.0 {
        return Ok(Definiteness::Zero);
    }
    let thr = tol * norm;
    let lo = ev[0];
    let hi = ev[ev.len() - 1];
    Ok(if lo > thr {
        Definiteness::PosDef
    } else if hi < -thr {
        Definiteness::NegDef
    } else if lo >= -thr && hi > thr {
        Definiteness::PosSemi
    } else if hi <= thr && lo < -thr {
        Definiteness::NegSemi
    } else if lo >= -thr && hi <= thr {
        Definiteness::Zero
    } else {
        Definiteness::Indefinite
    })
}

/// Resolution of the quantifier searches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    /// Sphere points scanned per search.
    pub n_dirs: usize,
    /// Coordinate-ascent sweeps after the scan.
    pub refine_iters: usize,
    /// Largest rapidity of candidate observers.
    pub rapidity_max: f64,
    pub rapidity_step: f64,
    /// Spatial directions per nonzero rapidity.
    pub spatial_dirs: usize,
    /// Relative definiteness tolerance.
    pub tol: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            n_dirs: 2048,
            refine_iters: 50,
            rapidity_max: 3.0,
            rapidity_step: 0.25,
            spatial_dirs: 64,
            tol: DEFINITENESS_TOLERANCE,
            seed: 0x5eed,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_dirs == 0 || self.spatial_dirs == 0 {
            return Err(Error::InvalidArgument(
                "n_dirs and spatial_dirs must be positive".into(),
            ));
        }
        if !(self.tol > 0.0) || !(self.rapidity_max >= 0.0) || !(self.rapidity_step > 0.0) {
            return Err(Error::InvalidArgument(
                "tol and rapidity_step must be positive, rapidity_max nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// Same search with `factor` times the sphere resolution.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            n_dirs: self.n_dirs * factor,
            spatial_dirs: self.spatial_dirs * factor,
            refine_iters: self.refine_iters * factor,
            ..self.clone()
        }
    }

    fn screening(&self) -> Self {
        Self {
            n_dirs: (self.n_dirs / 8).max(16),
            refine_iters: self.refine_iters.min(10),
            ..self.clone()
        }
    }
}

/// Componentwise scale used to make margins relative.
pub fn symbol_scale(sym: &PrincipalSymbol) -> f64 {
    sym.max_abs()
}

fn max_eig(m: &Matrix) -> f64 {
    *linalg::sym_eigenvalues(m).last().expect("nonempty")
}

fn min_eig(m: &Matrix) -> f64 {
    linalg::sym_eigenvalues(m)[0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeFunctionSearch {
    /// Certified covector with `m(ξ,ξ)` negative definite.
    pub xi: Option<Vec<f64>>,
    /// Best `−λ_max(m(ξ,ξ))` over unit `ξ`.
    pub margin: f64,
    pub best_xi: Vec<f64>,
    pub evaluations: usize,
}

/// Searches for a unit covector `ξ` with `m(ξ,ξ)` negative definite.
pub fn find_time_function(sym: &PrincipalSymbol, search: &SearchConfig) -> TimeFunctionSearch {
    let dim = sym.base_dim();
    let thr = search.tol * symbol_scale(sym);
    let grid = sphere_points(dim, search.n_dirs, search.seed);
    let best = maximize_on_sphere(dim, &grid, search.refine_iters, Some(thr), |xi| {
        -max_eig(&quadratic_block(sym, xi))
    });
    let best_xi: Vec<f64> = best.point.iter().copied().collect();
    TimeFunctionSearch {
        xi: (best.value > thr && thr >= 0.0).then(|| best_xi.clone()),
        margin: best.value,
        best_xi,
        evaluations: best.evaluations,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObserverMargin {
    /// Smallest eigenvalue of `m(η,η)` over unit `η` with `η(X) = 0`.
    pub min_eig: f64,
    pub argmin_eta: Vec<f64>,
    pub evaluations: usize,
}

impl ObserverMargin {
    pub fn definiteness(&self, sym: &PrincipalSymbol, tol: f64) -> Definiteness {
        let thr = tol * symbol_scale(sym);
        if self.min_eig > thr {
            Definiteness::PosDef
        } else if self.min_eig >= -thr {
            Definiteness::PosSemi
        } else {
            Definiteness::Indefinite
        }
    }
}

fn observer_search(
    sym: &PrincipalSymbol,
    x: &Vector,
    search: &SearchConfig,
    stop_on_violation: bool,
) -> Result<ObserverMargin> {
    if x.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let basis = linalg::orthogonal_complement(x);
    let dim = basis.ncols();
    let thr = search.tol * symbol_scale(sym);
    let grid = sphere_points(dim, search.n_dirs, search.seed);
    let stop = stop_on_violation.then_some(thr);
    let best = maximize_on_sphere(dim, &grid, search.refine_iters, stop, |u| {
        -min_eig(&quadratic_block(sym, &(&basis * u)))
    });
    Ok(ObserverMargin {
        min_eig: -best.value,
        argmin_eta: (&basis * &best.point).iter().copied().collect(),
        evaluations: best.evaluations,
    })
}

/// Minimizes the smallest eigenvalue of `m(η,η)` over the annihilator of
/// `X`.
pub fn observer_margin(
    sym: &PrincipalSymbol,
    g: &BaseMetric,
    x: &Vector,
    search: &SearchConfig,
) -> Result<ObserverMargin> {
    if x.len() != g.dim() || x.len() != sym.base_dim() {
        return Err(Error::DimensionMismatch(
            "observer has the wrong dimension".into(),
        ));
    }
    observer_search(sym, x, search, false)
}

/// Candidate observers: rest frame, then every rapidity on the grid in
/// `spatial_dirs` directions of the `g`-orthonormal frame.
pub fn observer_candidates(g: &BaseMetric, search: &SearchConfig) -> Vec<Vector> {
    let frame = g.orthonormal_frame();
    let spatial = g.dim() - 1;
    let dirs = sphere_points(spatial, search.spatial_dirs, search.seed ^ 0x0b5e);
    let mut out = vec![frame.column(0).into_owned()];
    let steps = (search.rapidity_max / search.rapidity_step + 1e-9).floor() as usize;
    for k in 1..=steps {
        let r = k as f64 * search.rapidity_step;
        for d in &dirs {
            let mut comps = Vector::zeros(spatial + 1);
            comps[0] = r.cosh();
            for i in 0..spatial {
                comps[i + 1] = r.sinh() * d[i];
            }
            // spatial directions cover half the sphere in low dimension
            for sign in [1.0, -1.0] {
                if spatial > 2 && sign < 0.0 {
                    continue;
                }
                let mut c = comps.clone();
                for i in 1..=spatial {
                    c[i] *= sign;
                }
                let v = &frame * c;
                out.push(v.normalize());
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verdict {
    RegularlyHyperbolic {
        t_covector: Vec<f64>,
        x_vector: Vec<f64>,
        time_margin: f64,
        observer_margin: f64,
    },
    EllipticType {
        /// Best `−λ_max(m(ξ,ξ))` found; not positive.
        max_negativity_found: f64,
    },
    UltrahyperbolicType {
        t_covector: Vec<f64>,
        time_margin: f64,
        /// Candidate observer with the largest margin.
        worst_x: Vec<f64>,
        violating_eta: Vec<f64>,
        observer_margin: f64,
        /// The best margin is zero within tolerance.
        semidefinite: bool,
    },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Self::RegularlyHyperbolic { .. } => "regularly-hyperbolic",
            Self::EllipticType { .. } => "elliptic",
            Self::UltrahyperbolicType { .. } => "ultrahyperbolic",
        }
    }

    pub fn is_regularly_hyperbolic(&self) -> bool {
        matches!(self, Self::RegularlyHyperbolic { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    pub resolution: SearchConfig,
    /// Best time-function margin found.
    pub time_margin: f64,
    /// Observer margin of the reported `X`, when a time function exists.
    pub observer_margin: Option<f64>,
    pub candidates_tried: usize,
    pub scale: f64,
}

/// Classifies without an observer hint.
pub fn classify(
    sym: &PrincipalSymbol,
    g: &BaseMetric,
    search: &SearchConfig,
) -> ClassificationReport {
    classify_with_hint(sym, g, None, search)
}

/// Classifies the symbol. A supplied hint (typically the timelike
/// eigenvector of the strain) is tried before the rapidity grid.
pub fn classify_with_hint(
    sym: &PrincipalSymbol,
    g: &BaseMetric,
    hint: Option<&Vector>,
    search: &SearchConfig,
) -> ClassificationReport {
    let scale = symbol_scale(sym);
    let time = find_time_function(sym, search);
    let Some(xi) = time.xi.clone() else {
        return ClassificationReport {
            verdict: Verdict::EllipticType {
                max_negativity_found: time.margin,
            },
            resolution: search.clone(),
            time_margin: time.margin,
            observer_margin: None,
            candidates_tried: 0,
            scale,
        };
    };
    let thr = search.tol * scale;
    let screen = search.screening();
    let mut candidates: Vec<Vector> = hint
        .filter(|h| h.len() == g.dim() && h.norm() > 0.0)
        .map(|h| h.normalize())
        .into_iter()
        .collect();
    candidates.extend(observer_candidates(g, search));
    let mut best: Option<(usize, f64)> = None;
    let mut tried = 0;
    let orient = |x: &Vector| {
        let xi = Vector::from_column_slice(&xi);
        let s = if xi.dot(x) < 0.0 { -1.0 } else { 1.0 };
        (xi * s).iter().copied().collect::<Vec<f64>>()
    };
    for (k, x) in candidates.iter().enumerate() {
        tried += 1;
        let Ok(quick) = observer_search(sym, x, &screen, true) else {
            continue;
        };
        if best.is_none_or(|(_, m)| quick.min_eig > m) {
            best = Some((k, quick.min_eig));
        }
        if quick.min_eig <= thr {
            continue;
        }
        let Ok(full) = observer_search(sym, x, search, true) else {
            continue;
        };
        if full.min_eig > thr {
            return ClassificationReport {
                verdict: Verdict::RegularlyHyperbolic {
                    t_covector: orient(x),
                    x_vector: x.iter().copied().collect(),
                    time_margin: time.margin,
                    observer_margin: full.min_eig,
                },
                resolution: search.clone(),
                time_margin: time.margin,
                observer_margin: Some(full.min_eig),
                candidates_tried: tried,
                scale,
            };
        }
        best = Some((k, full.min_eig));
    }
    let (k, _) = best.unwrap_or((0, f64::NEG_INFINITY));
    let x = &candidates[k];
    let detail = observer_search(sym, x, search, false).unwrap_or(ObserverMargin {
        min_eig: f64::NEG_INFINITY,
        argmin_eta: vec![0.0; g.dim()],
        evaluations: 0,
    });
    ClassificationReport {
        verdict: Verdict::UltrahyperbolicType {
            t_covector: orient(x),
            time_margin: time.margin,
            worst_x: x.iter().copied().collect(),
            violating_eta: detail.argmin_eta,
            observer_margin: detail.min_eig,
            semidefinite: detail.min_eig.abs() <= thr,
        },
        resolution: search.clone(),
        time_margin: time.margin,
        observer_margin: Some(detail.min_eig),
        candidates_tried: tried,
        scale,
    }
}

/// Rechecks a regularly hyperbolic verdict at a finer resolution.
pub fn reverify(
    sym: &PrincipalSymbol,
    g: &BaseMetric,
    report: &ClassificationReport,
    factor: usize,
) -> Result<bool> {
    let Verdict::RegularlyHyperbolic {
        t_covector,
        x_vector,
        ..
    } = &report.verdict
    else {
        return Ok(false);
    };
    let tol = report.resolution.tol;
    let t = Vector::from_column_slice(t_covector);
    let time_ok = definiteness(&quadratic_block(sym, &t), tol)? == Definiteness::NegDef;
    let fine = report.resolution.refined(factor);
    let x = Vector::from_column_slice(x_vector);
    let obs = observer_margin(sym, g, &x, &fine)?;
    Ok(time_ok && obs.min_eig > tol * symbol_scale(sym))
}
