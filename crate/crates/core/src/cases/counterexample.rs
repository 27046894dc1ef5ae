//! A regularly hyperbolic constant-coefficient system on `R^{1+2}` with a
//! two-dimensional target whose canonical energy density is pointwise
//! negative for some data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolicity::{definiteness, observer_margin, Definiteness, SearchConfig};
use crate::linalg::{self, Matrix, Vector};
use crate::symbol::{contract_symbol, energy_density, PrincipalSymbol};
use crate::tensor::BaseMetric;

/// Minimum of the smallest eigenvalue of `m̃(η,η)` over unit spatial `η`.
/// Brute-forced over 10⁴ angles and refined; it is `1/3`.
pub const UNPERTURBED_OBSERVER_MARGIN: f64 = 1.0 / 3.0;

/// The unperturbed symbol `m̃`.
pub fn mtilde() -> PrincipalSymbol {
    let z = Matrix::zeros(2, 2);
    let m00 = -Matrix::identity(2, 2);
    let m11 = Matrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]);
    let m22 = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 2.0]);
    let m12 = Matrix::from_element(2, 2, 1.0);
    PrincipalSymbol::from_blocks(&[
        vec![m00, z.clone(), z.clone()],
        vec![z.clone(), m11, m12.clone()],
        vec![z, m12, m22],
    ])
    .expect("blocks are consistent")
}

/// `m = m̃ − ε δ^{ab} δ_AB`.
pub fn perturbed(epsilon: f64) -> PrincipalSymbol {
    let id =
        PrincipalSymbol::semilinear(&Matrix::identity(3, 3), &Matrix::identity(2, 2), -epsilon);
    mtilde().add(&id).expect("same dimensions")
}

/// Gradient of the data `ψ¹ = y`, `ψ² = −x`, `∂_tψ = 0`: rows `(t, x, y)`.
pub fn rotation_data() -> Matrix {
    Matrix::from_row_slice(3, 2, &[0.0, 0.0, 0.0, -1.0, 1.0, 0.0])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativeEnergyCounterexample {
    pub epsilon: f64,
    pub m00: Definiteness,
    pub observer_margin: f64,
    pub mtilde_contraction: f64,
    pub energy_density: f64,
    pub expected_energy_density: f64,
}

impl NegativeEnergyCounterexample {
    pub fn all_pass(&self) -> bool {
        self.m00 == Definiteness::NegDef
            && self.observer_margin > 0.0
            && self.mtilde_contraction.abs() <= 1e-12
            && (self.energy_density - self.expected_energy_density).abs() <= 1e-10
    }
}

pub fn negative_energy_counterexample(
    epsilon: f64,
    search: &SearchConfig,
) -> Result<NegativeEnergyCounterexample> {
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidArgument("epsilon must be nonnegative".into()));
    }
    let sym = perturbed(epsilon);
    let m00 = definiteness(&sym.block(0, 0), search.tol)?;
    let g = BaseMetric::minkowski(3);
    let dt = linalg::unit(3, 0);
    let obs = observer_margin(&sym, &g, &dt, search)?;
    if obs.min_eig <= search.tol * sym.max_abs() {
        return Err(Error::EpsilonTooLarge {
            epsilon,
            margin: obs.min_eig,
        });
    }
    let data = rotation_data();
    let mt = mtilde();
    let mut contraction = 0.0;
    for a in 0..3 {
        let ea = linalg::unit(3, a);
        for b in 0..3 {
            let block = contract_symbol(&mt, &ea, &linalg::unit(3, b));
            let pa: Vector = data.row(a).transpose();
            let pb: Vector = data.row(b).transpose();
            contraction += pa.dot(&(block * pb));
        }
    }
    let e = energy_density(&sym, &data, &dt, &dt)?;
    Ok(NegativeEnergyCounterexample {
        epsilon,
        m00,
        observer_margin: obs.min_eig,
        mtilde_contraction: contraction,
        energy_density: e,
        expected_energy_density: -2.0 * epsilon,
    })
}

/// Smallest eigenvalue of `m̃(η,η)` on `n_angles` equally spaced unit
/// spatial covectors.
pub fn brute_force_margin(n_angles: usize) -> f64 {
    let mt = mtilde();
    (0..n_angles)
        .map(|k| {
            let th = std::f64::consts::PI * k as f64 / n_angles as f64;
            let eta = Vector::from_vec(vec![0.0, th.cos(), th.sin()]);
            linalg::sym_eigenvalues(&contract_symbol(&mt, &eta, &eta))[0]
        })
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_one_hundredth() {
        let r = negative_energy_counterexample(0.01, &SearchConfig::default()).unwrap();
        assert!(r.all_pass(), "{r:?}");
        assert!((r.energy_density + 0.02).abs() < 1e-10);
        assert!((r.observer_margin - (UNPERTURBED_OBSERVER_MARGIN - 0.01)).abs() < 1e-9);
    }

    #[test]
    fn unperturbed_margin_matches_brute_force() {
        let coarse = brute_force_margin(10_000);
        assert!(coarse >= UNPERTURBED_OBSERVER_MARGIN - 1e-12);
        assert!(coarse - UNPERTURBED_OBSERVER_MARGIN < 1e-7);
        let r = negative_energy_counterexample(0.0, &SearchConfig::default()).unwrap();
        assert!((r.observer_margin - UNPERTURBED_OBSERVER_MARGIN).abs() < 1e-9);
        assert_eq!(r.energy_density, 0.0);
    }

    #[test]
    fn large_epsilon_rejected() {
        assert!(matches!(
            negative_energy_counterexample(10.0, &SearchConfig::default()),
            Err(Error::EpsilonTooLarge { .. })
        ));
    }
}
