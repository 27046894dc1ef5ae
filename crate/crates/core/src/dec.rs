//! Sampled dominant energy condition and the sufficient conditions on `L`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::models::LagrangianModel;
use crate::stress::StressEnergy;
use crate::tensor::BaseMetric;

/// Largest rapidity of sampled observers.
pub const MAX_RAPIDITY: f64 = 10.0;
/// Relative tolerance of both DEC inequalities.
pub const DEC_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecReport {
    pub holds: bool,
    /// Minimum of `T(X,X)` over samples.
    pub worst_energy: f64,
    /// Maximum of `(T ∘ g⁻¹ ∘ T)(X,X)` over samples.
    pub worst_causality: f64,
    pub witness_x: Option<Vec<f64>>,
    pub samples_used: usize,
    pub tolerance: f64,
}

/// Unit timelike vector with the given rapidity and spatial direction,
/// expressed in the frame and scaled to Euclidean unit length.
fn observer(frame: &Matrix, rapidity: f64, dir: &Vector) -> Vector {
    let n = frame.nrows();
    let mut comps = Vector::zeros(n);
    comps[0] = rapidity.cosh();
    let sh = rapidity.sinh();
    for k in 1..n {
        comps[k] = sh * dir[k - 1];
    }
    let comps = &comps / comps.norm();
    frame * comps
}

fn spatial_direction<R: Rng>(rng: &mut R, dim: usize) -> Vector {
    loop {
        let v = Vector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}

/// Timelike observers for [`check_dec`]: half on a rapidity grid with
/// random directions, half with uniformly drawn rapidity.
pub fn sample_observers(g: &BaseMetric, n_samples: usize, seed: u64) -> Vec<Vector> {
    let frame = g.orthonormal_frame();
    let spatial = g.dim() - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = n_samples.div_ceil(2);
    let mut out = Vec::with_capacity(n_samples);
    for k in 0..grid {
        let r = if grid > 1 {
            MAX_RAPIDITY * k as f64 / (grid - 1) as f64
        } else {
            0.0
        };
        let dir = spatial_direction(&mut rng, spatial);
        out.push(observer(&frame, r, &dir));
    }
    while out.len() < n_samples {
        let r = rng.random_range(0.0..=MAX_RAPIDITY);
        let dir = spatial_direction(&mut rng, spatial);
        out.push(observer(&frame, r, &dir));
    }
    out
}

/// Sampled check of `T(X,X) ≥ 0` and `(T ∘ g⁻¹ ∘ T)(X,X) ≤ 0` over future
/// timelike `X`. Tolerances scale with `‖T‖` and `‖T‖²` respectively.
pub fn check_dec(
    t: &StressEnergy,
    g: &BaseMetric,
    n_samples: usize,
    seed: u64,
) -> Result<DecReport> {
    check_dec_with_tol(t, g, n_samples, seed, DEC_TOLERANCE)
}

pub fn check_dec_with_tol(
    t: &StressEnergy,
    g: &BaseMetric,
    n_samples: usize,
    seed: u64,
    tol: f64,
) -> Result<DecReport> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument(
            "n_samples must be at least 1".into(),
        ));
    }
    if t.components.nrows() != g.dim() {
        return Err(Error::DimensionMismatch(
            "stress-energy and metric dimensions differ".into(),
        ));
    }
    let tm = &t.components;
    let norm = t.norm();
    let mut worst_energy = f64::INFINITY;
    let mut worst_causality = f64::NEG_INFINITY;
    let mut witness = None;
    let energy_tol = tol * norm;
    let causal_tol = tol * norm * norm;
    for x in sample_observers(g, n_samples, seed) {
        let tx = tm * &x;
        let energy = x.dot(&tx);
        let flux = tx.dot(&(g.inverse() * &tx));
        if witness.is_none() && (energy < -energy_tol || flux > causal_tol) {
            witness = Some(x.iter().copied().collect());
        }
        worst_energy = worst_energy.min(energy);
        worst_causality = worst_causality.max(flux);
    }
    Ok(DecReport {
        holds: witness.is_none(),
        worst_energy,
        worst_causality,
        witness_x: witness,
        samples_used: n_samples,
        tolerance: tol,
    })
}

/// Sampling box for [`check_sufficient_conditions`]: ranges for `s` and for
/// each `σ_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeBox {
    pub s: (f64, f64),
    pub sigmas: Vec<(f64, f64)>,
}

impl ProbeBox {
    pub fn uniform(dim: usize, lo: f64, hi: f64) -> Self {
        Self {
            s: (0.0, hi.max(0.0)),
            sigmas: vec![(lo, hi); dim],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SufficientConditions {
    pub nondecreasing: bool,
    pub concave: bool,
    pub nonneg_at_zero: bool,
    pub probes: usize,
}

impl SufficientConditions {
    pub fn all(&self) -> bool {
        self.nondecreasing && self.concave && self.nonneg_at_zero
    }
}

/// Sampled certificate that `L` has nonnegative partials, is concave in
/// `(s, σ)`, and satisfies `L(0) ≥ 0`. The box corners are always probed.
pub fn check_sufficient_conditions(
    model: &LagrangianModel,
    probe: &ProbeBox,
    k_probes: usize,
    seed: u64,
) -> Result<SufficientConditions> {
    const TOL: f64 = 1e-9;
    let dim = probe.sigmas.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<(f64, Vec<f64>)> = Vec::new();
    for corner in 0..(1usize << dim.min(10)) {
        let sig = (0..dim)
            .map(|j| {
                let (lo, hi) = probe.sigmas[j];
                if corner >> j & 1 == 1 {
                    hi
                } else {
                    lo
                }
            })
            .collect();
        points.push((probe.s.0, sig));
    }
    for _ in 0..k_probes {
        let s = lerp(probe.s, rng.random());
        let sig = probe
            .sigmas
            .iter()
            .map(|&r| lerp(r, rng.random()))
            .collect();
        points.push((s, sig));
    }
    let mut nondecreasing = true;
    let mut concave = true;
    for (s, sig) in &points {
        let e = model.eval(*s, sig)?;
        let scale = e
            .grad
            .iter()
            .fold(e.grad_s.abs(), |a, g| a.max(g.abs()))
            .max(1.0);
        if e.grad_s < -TOL * scale || e.grad.iter().any(|&g| g < -TOL * scale) {
            nondecreasing = false;
        }
        let top = linalg::sym_eigenvalues(&e.hessian)
            .last()
            .copied()
            .unwrap_or(0.0);
        if top > TOL * linalg::max_abs(&e.hessian).max(1.0) {
            concave = false;
        }
    }
    let l0 = model.value(0.0, &vec![0.0; dim])?;
    Ok(SufficientConditions {
        nondecreasing,
        concave,
        nonneg_at_zero: l0 >= -TOL,
        probes: points.len(),
    })
}

fn lerp((lo, hi): (f64, f64), t: f64) -> f64 {
    lo + (hi - lo) * t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::CustomLagrangian;
    use std::sync::Arc;

    #[test]
    fn observers_are_unit_future_timelike() {
        let g = BaseMetric::minkowski(4);
        for x in sample_observers(&g, 50, 3) {
            assert!(g.inner(&x, &x) < 0.0);
            assert!(x[0] > 0.0);
            assert!((x.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mass_term_holds() {
        let g = BaseMetric::minkowski(4);
        let t = StressEnergy {
            components: g.components() * -0.5,
        };
        let r = check_dec(&t, &g, 200, 1).unwrap();
        assert!(r.holds);
        assert!(r.worst_energy > 0.0);
    }

    #[test]
    fn negative_energy_is_violated() {
        let g = BaseMetric::minkowski(4);
        let mut c = Matrix::zeros(4, 4);
        c[(0, 0)] = -1.0;
        let r = check_dec(&StressEnergy { components: c }, &g, 100, 1).unwrap();
        assert!(!r.holds);
        let w = r.witness_x.unwrap();
        assert!(
            (w[0] - 1.0).abs() < 1e-12,
            "first grid sample is the rest frame"
        );
    }

    #[test]
    fn zero_tensor_holds() {
        let g = BaseMetric::minkowski(3);
        let r = check_dec(
            &StressEnergy {
                components: Matrix::zeros(3, 3),
            },
            &g,
            10,
            0,
        )
        .unwrap();
        assert!(r.holds);
    }

    #[test]
    fn sufficient_conditions_catalog() {
        let sk = LagrangianModel::Skyrme { c1: 0.5, c2: 0.5 };
        let r = check_sufficient_conditions(&sk, &ProbeBox::uniform(4, -3.0, 3.0), 100, 0).unwrap();
        assert!(r.all());
        let bi = LagrangianModel::BornInfeld { b: 2.0 };
        let r = check_sufficient_conditions(&bi, &ProbeBox::uniform(4, -0.5, 3.0), 100, 0).unwrap();
        assert!(r.all());
        let sq = LagrangianModel::Custom(CustomLagrangian {
            name: "square".into(),
            value: Arc::new(|_, x| Ok(x[0] * x[0])),
            gradient: None,
        });
        let r = check_sufficient_conditions(&sq, &ProbeBox::uniform(4, 0.0, 2.0), 20, 0).unwrap();
        assert!(!r.concave);
        assert!(r.nondecreasing && r.nonneg_at_zero);
    }
}
