//! Einstein–Hilbert stress-energy `T = δL/δg⁻¹ - ½ L g`.
//!
//! Three routes are provided:
//! * [`stress_energy_fd`] differences `L` in the components of `g⁻¹`;
//! * [`stress_energy_sigma`] evaluates the antisymmetrized contraction for
//!   `L = σ_j` directly;
//! * [`stress_energy`] assembles a general model from the `σ_j` pieces by the
//!   chain rule, `T = Σ ∂_jL · δσ_j/δg⁻¹ - ½ L g`.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::models::LagrangianModel;
use crate::tensor::{char_poly_sigmas, pullback_metric, strain_invariants, FieldJet};

/// Ratio between `σ_j` and the raw generalized-Kronecker contraction
/// `δ^{c_1…c_j}_{b_1…b_j} D^{b_1}_{c_1} ⋯ D^{b_j}_{c_j}`, indexed by `j`.
/// Fixed by matching [`stress_energy_fd`] (it is `1/j!`).
pub const SIGMA_CONTRACTION_NORMALIZATION: [f64; 9] = [
    1.0,
    1.0,
    1.0 / 2.0,
    1.0 / 6.0,
    1.0 / 24.0,
    1.0 / 120.0,
    1.0 / 720.0,
    1.0 / 5040.0,
    1.0 / 40320.0,
];

/// Step used when differencing in `g⁻¹`.
pub const METRIC_FD_STEP: f64 = 1e-5;

/// Symmetric `T_ab` with lower indices.
#[derive(Debug, Clone, PartialEq)]
pub struct StressEnergy {
    pub components: Matrix,
}

impl StressEnergy {
    pub fn norm(&self) -> f64 {
        linalg::spectral_norm(&self.components)
    }

    /// Mixed form `g⁻¹ ∘ T`, i.e. `T^c_d`.
    pub fn raised(&self, jet: &FieldJet) -> Matrix {
        jet.g.inverse() * &self.components
    }
}

fn lagrangian_at_inverse(
    model: &LagrangianModel,
    jet: &FieldJet,
    pullback: &Matrix,
    inv: &Matrix,
) -> Result<f64> {
    let ev = linalg::sym_eigenvalues(inv);
    let negative = ev.iter().filter(|&&x| x < 0.0).count();
    if negative != 1 || ev.contains(&0.0) {
        return Err(Error::Domain(
            "perturbed metric lost Lorentzian signature".into(),
        ));
    }
    let sig = char_poly_sigmas(&(inv * pullback));
    model.value(jet.s, &sig[1..])
}

/// Central differences in each component of `g^{ab}`; off-diagonal pairs are
/// moved together by `±h/2`.
pub fn stress_energy_fd(model: &LagrangianModel, jet: &FieldJet) -> Result<StressEnergy> {
    model.check_jet_domain(jet)?;
    let n = jet.base_dim();
    let pullback = pullback_metric(jet);
    let inv = jet.g.inverse();
    let h = METRIC_FD_STEP * linalg::max_abs(inv).max(1.0);
    let l0 = lagrangian_at_inverse(model, jet, &pullback, inv)?;
    let mut t = Matrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let mut bump = Matrix::zeros(n, n);
            if a == b {
                bump[(a, a)] = h;
            } else {
                bump[(a, b)] = 0.5 * h;
                bump[(b, a)] = 0.5 * h;
            }
            let up = lagrangian_at_inverse(model, jet, &pullback, &(inv + &bump))?;
            let down = lagrangian_at_inverse(model, jet, &pullback, &(inv - &bump))?;
            let d = (up - down) / (2.0 * h);
            t[(a, b)] = d;
            t[(b, a)] = d;
        }
    }
    t -= jet.g.components() * (0.5 * l0);
    Ok(StressEnergy { components: t })
}

/// Heap's algorithm: all permutations of `0..k` with their signs.
fn signed_permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut c = vec![0usize; k];
    let mut sign = 1.0;
    out.push((perm.clone(), sign));
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            sign = -sign;
            out.push((perm.clone(), sign));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Ordered tuples of `len` distinct indices from `0..n`.
fn distinct_tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for t in &out {
            for i in 0..n {
                if !t.contains(&i) {
                    let mut u = t.clone();
                    u.push(i);
                    next.push(u);
                }
            }
        }
        out = next;
    }
    out
}

/// `A^c_x = Σ δ^{c c_2…c_j}_{x b_2…b_j} D^{b_2}_{c_2} ⋯ D^{b_j}_{c_j}`.
///
/// The generalized Kronecker symbol is nonzero only when the lower indices
/// are distinct and the upper ones permute them.
pub fn antisymmetrized_contraction(d: &Matrix, j: usize) -> Matrix {
    let n = d.nrows();
    let mut a = Matrix::zeros(n, n);
    if j == 0 || j > n {
        return a;
    }
    let perms = signed_permutations(j);
    for lower in distinct_tuples(n, j) {
        let x = lower[0];
        for (perm, sign) in &perms {
            // upper index c_i = lower[perm[i]]
            let mut prod = *sign;
            for i in 1..j {
                prod *= d[(lower[i], lower[perm[i]])];
                if prod == 0.0 {
                    break;
                }
            }
            a[(lower[perm[0]], x)] += prod;
        }
    }
    a
}

/// Raw variational derivative of the contraction for `σ_j`, before
/// normalization.
fn sigma_variation_raw(pullback: &Matrix, strain: &Matrix, j: usize) -> (Matrix, f64) {
    let a = antisymmetrized_contraction(strain, j);
    let raw = (strain * &a).trace();
    // ∂/∂g^{xy} of the contraction is j (P A)_{yx}
    let var = linalg::symmetrize(&((pullback * &a).transpose() * j as f64));
    (var, raw)
}

fn normalization(j: usize) -> Result<f64> {
    SIGMA_CONTRACTION_NORMALIZATION
        .get(j)
        .copied()
        .ok_or_else(|| Error::InvalidArgument(format!("sigma index {j} beyond supported range")))
}

/// `δσ_j/δg⁻¹` as a lower-index symmetric tensor.
pub fn sigma_variation(jet: &FieldJet, j: usize) -> Result<Matrix> {
    let strain = strain_invariants(jet);
    let (var, _) = sigma_variation_raw(&strain.pullback, &strain.strain, j);
    Ok(var * normalization(j)?)
}

/// Stress-energy of `L = σ_j` from the explicit antisymmetrized contraction.
pub fn stress_energy_sigma(jet: &FieldJet, j: usize) -> Result<StressEnergy> {
    let n = jet.base_dim();
    if j == 0 || j > n {
        return Err(Error::InvalidArgument(format!(
            "sigma index {j} outside 1..={n}"
        )));
    }
    let strain = strain_invariants(jet);
    let (var, raw) = sigma_variation_raw(&strain.pullback, &strain.strain, j);
    let c = normalization(j)?;
    let t = (var - jet.g.components() * (0.5 * raw)) * c;
    Ok(StressEnergy { components: t })
}

/// Stress-energy of a general model via the chain rule over the `σ_j`.
pub fn stress_energy(model: &LagrangianModel, jet: &FieldJet) -> Result<StressEnergy> {
    model.check_jet_domain(jet)?;
    let strain = strain_invariants(jet);
    let eval = model.eval(jet.s, &strain.sigmas[1..])?;
    let n = jet.base_dim();
    let mut t = jet.g.components() * (-0.5 * eval.value);
    for j in 1..=n {
        let w = eval.grad[j - 1];
        if w == 0.0 {
            continue;
        }
        let (var, _) = sigma_variation_raw(&strain.pullback, &strain.strain, j);
        t += var * (w * normalization(j)?);
    }
    Ok(StressEnergy { components: t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{BaseMetric, TargetMetric};

    fn jet_x_only() -> FieldJet {
        let mut dphi = Matrix::zeros(4, 3);
        dphi[(1, 0)] = 1.0;
        FieldJet::new(
            BaseMetric::minkowski(4),
            TargetMetric::identity(3),
            dphi,
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn permutations_have_correct_count_and_parity() {
        let p = signed_permutations(4);
        assert_eq!(p.len(), 24);
        assert_eq!(p.iter().filter(|(_, s)| *s > 0.0).count(), 12);
    }

    #[test]
    fn wave_map_closed_form() {
        let jet = jet_x_only();
        let t = stress_energy_fd(&LagrangianModel::WaveMap, &jet).unwrap();
        let p = pullback_metric(&jet);
        let expected = &p - jet.g.components() * 0.5;
        assert!((t.components.clone() - &expected).norm() < 1e-9);
        assert!((t.components[(0, 0)] - 0.5).abs() < 1e-9);
        let exact = stress_energy_sigma(&jet, 1).unwrap();
        assert!((exact.components - expected).norm() < 1e-14);
    }

    #[test]
    fn pure_mass_term() {
        let mut jet = jet_x_only();
        jet.s = 0.7;
        let model = LagrangianModel::SigmaCombo {
            coeffs: vec![],
            c_s: 1.0,
        };
        let t = stress_energy_fd(&model, &jet).unwrap();
        let expected = jet.g.components() * (-0.35);
        assert!((t.components - &expected).norm() < 1e-10);
        let t = stress_energy(&model, &jet).unwrap();
        assert!((t.components - expected).norm() < 1e-15);
    }

    #[test]
    fn zero_map_gives_zero() {
        let jet = jet_x_only().with_dphi(Matrix::zeros(4, 3));
        for model in [
            LagrangianModel::WaveMap,
            LagrangianModel::Skyrme { c1: 0.5, c2: 0.5 },
        ] {
            assert!(stress_energy_fd(&model, &jet).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn normalization_matches_difference_oracle() {
        // regression for the frozen constants
        let dphi = Matrix::from_row_slice(
            4,
            4,
            &[
                0.3, -0.2, 0.5, 0.1, 0.7, 0.4, -0.3, 0.2, -0.1, 0.6, 0.2, -0.4, 0.5, 0.1, 0.3, 0.8,
            ],
        );
        let jet = FieldJet::new(
            BaseMetric::minkowski(4),
            TargetMetric::identity(4),
            dphi,
            0.0,
        )
        .unwrap();
        for j in 1..=4 {
            let fd = stress_energy_fd(&LagrangianModel::sigma(j), &jet).unwrap();
            let strain = strain_invariants(&jet);
            let (var, raw) = sigma_variation_raw(&strain.pullback, &strain.strain, j);
            let raw_t = var - jet.g.components() * (0.5 * raw);
            let fitted = fd.components.dot(&raw_t) / raw_t.norm_squared();
            assert!(
                (fitted - SIGMA_CONTRACTION_NORMALIZATION[j]).abs() < 1e-7 * fitted.abs(),
                "j={j} fitted {fitted}"
            );
        }
    }

    #[test]
    fn sigma_index_out_of_range() {
        assert!(stress_energy_sigma(&jet_x_only(), 0).is_err());
        assert!(stress_energy_sigma(&jet_x_only(), 5).is_err());
    }
}
