//! Seeded random metrics, jets and isometries for property checks.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, Matrix, Vector};
use crate::tensor::{BaseMetric, FieldJet, TargetMetric};

fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| {
        scale * rng.sample::<f64, _>(StandardNormal)
    })
}

/// `Aᵀ diag(-a_0, a_1, …) A` with `A` a perturbation of the identity.
pub fn random_lorentzian<R: Rng>(rng: &mut R, dim: usize) -> BaseMetric {
    loop {
        let a = Matrix::identity(dim, dim) + gaussian_matrix(rng, dim, dim, 0.3);
        let mut d = Matrix::identity(dim, dim);
        for k in 0..dim {
            let w = rng.random_range(0.5..2.0);
            d[(k, k)] = if k == 0 { -w } else { w };
        }
        let m = a.transpose() * d * a;
        let eig = linalg::sym_eigenvalues(&m);
        let smallest = eig.iter().fold(f64::INFINITY, |acc, x| acc.min(x.abs()));
        if smallest < 0.05 * linalg::max_abs(&m) {
            continue;
        }
        if let Ok(g) = BaseMetric::new(m) {
            return g;
        }
    }
}

pub fn random_spd<R: Rng>(rng: &mut R, dim: usize) -> TargetMetric {
    let b = gaussian_matrix(rng, dim, dim, 0.5);
    TargetMetric::new(b.transpose() * b + Matrix::identity(dim, dim) * 0.5)
        .expect("shifted Gram matrix is positive definite")
}

pub fn random_dphi<R: Rng>(rng: &mut R, base: usize, target: usize, scale: f64) -> Matrix {
    gaussian_matrix(rng, base, target, scale)
}

/// Random metrics, Jacobian with entries of size `scale`, and `s ∈ [0,1)`.
pub fn random_jet<R: Rng>(rng: &mut R, base: usize, target: usize, scale: f64) -> FieldJet {
    let g = random_lorentzian(rng, base);
    let h = random_spd(rng, target);
    let dphi = random_dphi(rng, base, target, scale);
    let s = rng.random::<f64>();
    FieldJet::new(g, h, dphi, s).expect("sampled jet is valid")
}

/// Jet whose Jacobian has rank exactly `rank` (generically).
pub fn low_rank_jet<R: Rng>(
    rng: &mut R,
    base: usize,
    target: usize,
    rank: usize,
    scale: f64,
) -> FieldJet {
    let u = gaussian_matrix(rng, base, rank, scale);
    let v = gaussian_matrix(rng, rank, target, 1.0);
    let g = random_lorentzian(rng, base);
    let h = random_spd(rng, target);
    FieldJet::new(g, h, u * v, 0.0).expect("sampled jet is valid")
}

/// Lorentz transformation of Minkowski space: a rotation followed by a boost
/// of rapidity up to `max_rapidity`.
pub fn random_lorentz<R: Rng>(rng: &mut R, dim: usize, max_rapidity: f64) -> Matrix {
    let spatial = dim - 1;
    let q = gaussian_matrix(rng, spatial, spatial, 1.0).qr().q();
    let mut rot = Matrix::identity(dim, dim);
    rot.view_mut((1, 1), (spatial, spatial)).copy_from(&q);
    let mut dir = Vector::from_fn(spatial, |_, _| rng.sample::<f64, _>(StandardNormal));
    let n = dir.norm();
    if n < 1e-9 {
        return rot;
    }
    dir /= n;
    let r = rng.random_range(0.0..=max_rapidity);
    let mut boost = Matrix::identity(dim, dim);
    boost[(0, 0)] = r.cosh();
    for i in 0..spatial {
        boost[(0, i + 1)] = r.sinh() * dir[i];
        boost[(i + 1, 0)] = r.sinh() * dir[i];
        for j in 0..spatial {
            boost[(i + 1, j + 1)] += (r.cosh() - 1.0) * dir[i] * dir[j];
        }
    }
    boost * rot
}

/// Isometry `Λ` of `g` (`Λᵀ g Λ = g`) conjugated from a Minkowski one.
pub fn random_isometry<R: Rng>(rng: &mut R, g: &BaseMetric, max_rapidity: f64) -> Matrix {
    let e = g.orthonormal_frame();
    let l = random_lorentz(rng, g.dim(), max_rapidity);
    let e_inv = e.clone().try_inverse().expect("frame is invertible");
    e * l * e_inv
}

/// Orthogonal map of `(R^n, h)`: `Rᵀ h R = h`.
pub fn random_target_isometry<R: Rng>(rng: &mut R, h: &TargetMetric) -> Matrix {
    let (vals, vecs) = linalg::sym_eigen_sorted(h.components());
    let sqrt = Matrix::from_diagonal(&Vector::from_iterator(
        vals.len(),
        vals.iter().map(|v| v.sqrt()),
    ));
    let half = &vecs * &sqrt * vecs.transpose();
    let half_inv = half.clone().try_inverse().expect("h is positive definite");
    let n = h.dim();
    let q = gaussian_matrix(rng, n, n, 1.0).qr().q();
    half_inv * q * half
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn isometries_preserve_metrics() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = random_lorentzian(&mut rng, 4);
        let l = random_isometry(&mut rng, &g, 2.0);
        let gc = g.components();
        assert!((l.transpose() * gc * &l - gc).norm() < 1e-9 * gc.norm() * l.norm_squared());
        let h = random_spd(&mut rng, 3);
        let r = random_target_isometry(&mut rng, &h);
        let hc = h.components();
        assert!((r.transpose() * hc * &r - hc).norm() < 1e-10);
    }

    #[test]
    fn low_rank_has_requested_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let jet = low_rank_jet(&mut rng, 4, 4, 2, 1.0);
        assert_eq!(jet.rank(), 2);
    }
}
