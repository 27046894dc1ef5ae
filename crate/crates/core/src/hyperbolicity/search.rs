//! Deterministic direction searches on unit spheres.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::Vector;

/// Unit vectors covering the sphere in `dim` dimensions. Antipodal points
/// are redundant for quadratic objectives, so low dimensions cover half the
/// sphere.
pub fn sphere_points(dim: usize, n: usize, seed: u64) -> Vec<Vector> {
    let n = n.max(1);
    match dim {
        0 => Vec::new(),
        1 => vec![Vector::from_element(1, 1.0)],
        2 => (0..n)
            .map(|k| {
                let th = std::f64::consts::PI * k as f64 / n as f64;
                Vector::from_vec(vec![th.cos(), th.sin()])
            })
            .collect(),
        3 => fibonacci_sphere(n),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out: Vec<Vector> = Vec::with_capacity(n + 2 * dim);
            for k in 0..dim {
                let mut e = Vector::zeros(dim);
                e[k] = 1.0;
                out.push(e.clone());
                out.push(-e);
            }
            while out.len() < n + 2 * dim {
                let v = Vector::from_fn(dim, |_, _| StandardNormal.sample(&mut rng));
                let norm: f64 = v.norm();
                if norm > 1e-8 {
                    out.push(v / norm);
                }
            }
            out
        }
    }
}

fn fibonacci_sphere(n: usize) -> Vec<Vector> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            Vector::from_vec(vec![z, r * phi.cos(), r * phi.sin()])
        })
        .collect()
}

/// Outcome of a maximization over the sphere.
#[derive(Debug, Clone)]
pub struct SphereMax {
    pub point: Vector,
    pub value: f64,
    pub evaluations: usize,
}

/// Maximizes `f` over unit vectors: grid scan followed by coordinate ascent
/// with step halving. Stops as soon as a value above `stop_above` is seen.
pub fn maximize_on_sphere(
    dim: usize,
    grid: &[Vector],
    refine_iters: usize,
    stop_above: Option<f64>,
    mut f: impl FnMut(&Vector) -> f64,
) -> SphereMax {
    let mut best = SphereMax {
        point: grid.first().cloned().unwrap_or_else(|| Vector::zeros(dim)),
        value: f64::NEG_INFINITY,
        evaluations: 0,
    };
    let hit = |v: f64| stop_above.is_some_and(|t| v > t);
    for p in grid {
        let v = f(p);
        best.evaluations += 1;
        if v > best.value {
            best.value = v;
            best.point = p.clone();
        }
        if hit(v) {
            return best;
        }
    }
    if dim < 2 {
        return best;
    }
    let mut step = (4.0 / grid.len().max(1) as f64)
        .powf(1.0 / (dim - 1) as f64)
        .min(0.5);
    for _ in 0..refine_iters {
        let mut improved = false;
        for k in 0..dim {
            for sign in [1.0, -1.0] {
                let mut y = best.point.clone();
                y[k] += sign * step;
                let norm = y.norm();
                if norm < 1e-12 {
                    continue;
                }
                y /= norm;
                let v = f(&y);
                best.evaluations += 1;
                if v > best.value {
                    best.value = v;
                    best.point = y;
                    improved = true;
                    if hit(v) {
                        return best;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-12 {
                break;
            }
        }
    }
    best
}
