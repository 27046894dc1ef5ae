//! Fluid-type Lagrangians `L(σ_n)`: the tachyonic example and the causality
//! inequalities `0 > 2σ L'' > −L'`.

use serde::{Deserialize, Serialize};

use crate::dec::{check_dec, DecReport};
use crate::error::{Error, Result};
use crate::hyperbolicity::{classify_with_hint, ClassificationReport, SearchConfig};
use crate::linalg::{self, Matrix};
use crate::models::LagrangianModel;
use crate::stress::stress_energy;
use crate::symbol::principal_symbol_fd;
use crate::tensor::{strain_invariants, BaseMetric, FieldJet, TargetMetric};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TachyonicFluidReport {
    pub b: f64,
    pub sigmas: Vec<f64>,
    pub stress_energy: Vec<Vec<f64>>,
    pub dec: DecReport,
    pub classification: ClassificationReport,
    /// DEC holds while the symbol is not regularly hyperbolic.
    pub dec_without_hyperbolicity: bool,
}

/// The map `(t,x,y,z) ↦ (t,x,y)` into flat `R³`, for which `σ_3 = −1`.
pub fn tachyonic_jet() -> FieldJet {
    let mut dphi = Matrix::zeros(4, 3);
    for k in 0..3 {
        dphi[(k, k)] = 1.0;
    }
    FieldJet::new(
        BaseMetric::minkowski(4),
        TargetMetric::identity(3),
        dphi,
        0.0,
    )
    .expect("valid jet")
}

/// `L = √(b + σ_3)` at [`tachyonic_jet`].
pub fn tachyonic_fluid_demo(
    b: f64,
    dec_samples: usize,
    search: &SearchConfig,
) -> Result<TachyonicFluidReport> {
    let jet = tachyonic_jet();
    let model = LagrangianModel::Fluid {
        index: 3,
        offset: b,
        exponent: 0.5,
    };
    let t = stress_energy(&model, &jet)?;
    let dec = check_dec(&t, &jet.g, dec_samples, search.seed)?;
    let sym = principal_symbol_fd(&model, &jet)?;
    let e0 = linalg::unit(4, 0);
    let classification = classify_with_hint(&sym, &jet.g, Some(&e0), search);
    let dec_without_hyperbolicity = dec.holds && !classification.verdict.is_regularly_hyperbolic();
    Ok(TachyonicFluidReport {
        b,
        sigmas: strain_invariants(&jet).sigmas,
        stress_energy: linalg::rows(&t.components),
        dec,
        classification,
        dec_without_hyperbolicity,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluidCausality {
    pub sigma: f64,
    pub first: f64,
    pub second: f64,
    /// `2σL'' < 0`: sound speed below light speed.
    pub concave_ok: bool,
    /// `2σL'' > −L'`: hyperbolicity.
    pub hyperbolic_ok: bool,
    /// `2σL'' = −L'` within rounding.
    pub marginal: bool,
}

impl FluidCausality {
    pub fn causal_and_hyperbolic(&self) -> bool {
        self.concave_ok && self.hyperbolic_ok
    }
}

/// Evaluates both inequalities for `L` as a function of `σ_index` at
/// `σ_index = sigma`, other invariants zero.
pub fn fluid_causality_check(
    model: &LagrangianModel,
    index: usize,
    sigma: f64,
) -> Result<FluidCausality> {
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    if index == 0 {
        return Err(Error::InvalidArgument("invariant index starts at 1".into()));
    }
    let mut sig = vec![0.0; index];
    sig[index - 1] = sigma;
    let e = model.eval(0.0, &sig)?;
    let first = e.grad[index - 1];
    let second = e.hessian[(index - 1, index - 1)];
    let lhs = 2.0 * sigma * second;
    let tol = 1e-12 * first.abs().max(lhs.abs());
    let marginal = (lhs + first).abs() <= tol;
    Ok(FluidCausality {
        sigma,
        first,
        second,
        concave_ok: lhs < -tol,
        hyperbolic_ok: lhs > -first + tol,
        marginal,
    })
}

/// Power law `L = σ^p`.
pub fn power_law(p: f64) -> LagrangianModel {
    LagrangianModel::Fluid {
        index: 1,
        offset: 0.0,
        exponent: p,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_examples() {
        let r = fluid_causality_check(&power_law(0.75), 1, 1.0).unwrap();
        assert!(r.causal_and_hyperbolic());
        assert!((2.0 * r.second + 0.375).abs() < 1e-15);
        let r = fluid_causality_check(&power_law(0.5), 1, 1.0).unwrap();
        assert!(r.marginal && !r.hyperbolic_ok && r.concave_ok);
        let r = fluid_causality_check(&power_law(1.0), 1, 1.0).unwrap();
        assert!(!r.concave_ok);
    }

    #[test]
    fn tachyonic_fluid() {
        let r = tachyonic_fluid_demo(2.0, 500, &SearchConfig::default()).unwrap();
        assert!((r.sigmas[3] + 1.0).abs() < 1e-15);
        assert!(r.dec.holds, "{:?}", r.dec);
        assert!(
            r.dec_without_hyperbolicity,
            "{:?}",
            r.classification.verdict
        );
        assert!(matches!(
            tachyonic_fluid_demo(0.5, 10, &SearchConfig::default()),
            Err(Error::Domain(_))
        ));
    }
}
