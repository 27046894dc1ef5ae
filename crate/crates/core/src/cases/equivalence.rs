//! Comparison of `g⁻¹ ∘ T` with the Noether canonical stress and with the
//! symbol-built `Q[φ]` for `L = σ_j`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::models::LagrangianModel;
use crate::stress::stress_energy_sigma;
use crate::symbol::{canonical_stress_linearized, canonical_stress_noether, principal_symbol_fd};
use crate::tensor::FieldJet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    /// Least-squares constant `r` in `Q ≈ r · g⁻¹∘T`; `None` when every
    /// `T` vanishes.
    pub ratio: Option<f64>,
    /// `max ‖Q − r g⁻¹∘T‖ / max(‖Q‖, ‖r g⁻¹∘T‖)` over jets, ignoring jets
    /// where both are below `1e-8` of the largest.
    pub max_relative_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressEquivalence {
    pub j: usize,
    pub jets: usize,
    pub noether: Comparison,
    pub z_form: Comparison,
    /// Largest `‖g⁻¹∘T‖` seen, to tell an all-zero sample apart.
    pub max_stress_norm: f64,
}

fn compare(pairs: &[(Matrix, Matrix)]) -> Comparison {
    let num: f64 = pairs.iter().map(|(t, q)| t.dot(q)).sum();
    let den: f64 = pairs.iter().map(|(t, _)| t.norm_squared()).sum();
    if den == 0.0 {
        let worst = pairs.iter().map(|(_, q)| q.norm()).fold(0.0, f64::max);
        return Comparison {
            ratio: None,
            max_relative_residual: worst,
        };
    }
    let r = num / den;
    let largest = pairs
        .iter()
        .map(|(t, q)| q.norm().max((t * r).norm()))
        .fold(0.0, f64::max);
    let worst = pairs
        .iter()
        .map(|(t, q)| {
            let scaled = t * r;
            let scale = q.norm().max(scaled.norm());
            if scale <= 1e-8 * largest {
                0.0
            } else {
                (q - scaled).norm() / scale
            }
        })
        .fold(0.0, f64::max);
    Comparison {
        ratio: Some(r),
        max_relative_residual: worst,
    }
}

pub fn stress_equivalence(j: usize, jets: &[FieldJet]) -> Result<StressEquivalence> {
    let model = LagrangianModel::sigma(j);
    let mut noether = Vec::with_capacity(jets.len());
    let mut z_form = Vec::with_capacity(jets.len());
    let mut max_norm = 0.0f64;
    for jet in jets {
        if j == 0 || j > jet.base_dim() {
            return Err(Error::InvalidArgument(format!(
                "sigma index {j} outside 1..={}",
                jet.base_dim()
            )));
        }
        let t = stress_energy_sigma(jet, j)?;
        let mixed = jet.g.inverse() * &t.components;
        max_norm = max_norm.max(mixed.norm());
        let qn = canonical_stress_noether(&model, jet)?.components;
        let sym = principal_symbol_fd(&model, jet)?;
        let qz = canonical_stress_linearized(&sym, &jet.dphi)?.components;
        noether.push((mixed.clone(), qn));
        z_form.push((mixed, qz));
    }
    Ok(StressEquivalence {
        j,
        jets: jets.len(),
        noether: compare(&noether),
        z_form: compare(&z_form),
        max_stress_norm: max_norm,
    })
}
