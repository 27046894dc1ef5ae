//! Determinant symbol `M(s) = det m(ζ + sη, ζ + sη)` and hyperbolic
//! directions.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::poly::{real_root_count, Poly, RootCount, TRIM_TOLERANCE};
use crate::error::{Error, Result};
use crate::linalg::{self, Vector};
use crate::symbol::{contract_symbol, quadratic_block, PrincipalSymbol};

/// Coefficients of `M(s)` from interpolation at `2n + 1` Chebyshev nodes.
pub fn symbol_det_poly(sym: &PrincipalSymbol, zeta: &Vector, eta: &Vector) -> Poly {
    let n = sym.target_dim();
    let deg = 2 * n;
    let nodes: Vec<f64> = (0..=deg)
        .map(|k| (std::f64::consts::PI * (k as f64 + 0.5) / (deg + 1) as f64).cos())
        .collect();
    let values: Vec<f64> = nodes
        .iter()
        .map(|&s| quadratic_block(sym, &(zeta + eta * s)).determinant())
        .collect();
    let vander = DMatrix::from_fn(deg + 1, deg + 1, |i, j| nodes[i].powi(j as i32));
    let coeffs = vander
        .lu()
        .solve(&Vector::from_vec(values))
        .expect("Chebyshev Vandermonde matrix is invertible");
    Poly::new(coeffs.iter().copied().collect()).trimmed(TRIM_TOLERANCE)
}

/// Relative imaginary part below which a pencil eigenvalue counts as real.
pub const PENCIL_REAL_TOLERANCE: f64 = 1e-7;

/// Largest `|Im λ| / (1 + |λ|)` over the roots of `det(A + sB + s²C)` with
/// `A = m(ζ,ζ)`, `B = 2 sym m(ζ,η)`, `C = m(η,η)` invertible, from the
/// companion linearization. Semisimple multiple roots stay well
/// conditioned here, unlike in the coefficients of `M(s)`.
pub fn pencil_imaginary_excess(sym: &PrincipalSymbol, zeta: &Vector, eta: &Vector) -> Option<f64> {
    let n = sym.target_dim();
    let a = quadratic_block(sym, zeta);
    let b = linalg::symmetrize(&contract_symbol(sym, zeta, eta)) * 2.0;
    let c_inv = quadratic_block(sym, eta).try_inverse()?;
    let mut comp = DMatrix::zeros(2 * n, 2 * n);
    comp.view_mut((0, n), (n, n)).fill_with_identity();
    comp.view_mut((n, 0), (n, n)).copy_from(&(-(&c_inv * a)));
    comp.view_mut((n, n), (n, n)).copy_from(&(-(c_inv * b)));
    Some(
        comp.complex_eigenvalues()
            .iter()
            .map(|z| z.im.abs() / (1.0 + z.norm()))
            .fold(0.0, f64::max),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DirectionVerdict {
    AllRealRooted {
        tested: usize,
    },
    CounterexampleZeta {
        zeta: Vec<f64>,
        poly: Poly,
        roots: RootCount,
        tested: usize,
    },
}

/// Tests whether `η` is a hyperbolic direction: `M(s)` must have only real
/// roots for every transverse `ζ`. The coordinate axes (made orthogonal to
/// `η`) are tried first, then `n_transverse` random directions.
///
/// Interpolation noise splits multiple real roots of `M(s)` into close
/// complex pairs, so a Sturm failure is confirmed against the pencil
/// eigenvalues before `ζ` is reported.
pub fn hyperbolic_direction_test(
    sym: &PrincipalSymbol,
    eta: &Vector,
    n_transverse: usize,
    seed: u64,
) -> Result<DirectionVerdict> {
    let dim = sym.base_dim();
    if eta.len() != dim {
        return Err(Error::DimensionMismatch(
            "eta has the wrong dimension".into(),
        ));
    }
    let enorm = eta.norm();
    if enorm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let e = eta / enorm;
    let mee = quadratic_block(sym, &e);
    let ev = linalg::sym_eigenvalues(&mee);
    let big = ev.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let small = ev.iter().fold(f64::INFINITY, |a, x| a.min(x.abs()));
    if big == 0.0 || small <= 1e-10 * big {
        return Err(Error::DegenerateDirection {
            det: mee.determinant(),
        });
    }
    let project = |v: Vector| {
        let w = &v - &e * e.dot(&v);
        let n = w.norm();
        (n > 1e-8).then(|| w / n)
    };
    let mut zetas: Vec<Vector> = (0..dim)
        .filter_map(|k| project(linalg::unit(dim, k)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while zetas.len() < dim + n_transverse {
        let v = Vector::from_fn(dim, |_, _| StandardNormal.sample(&mut rng));
        if let Some(z) = project(v) {
            zetas.push(z);
        }
    }
    for (k, zeta) in zetas.iter().enumerate() {
        let poly = symbol_det_poly(sym, zeta, &e);
        if poly.is_zero() {
            continue;
        }
        let roots = real_root_count(&poly)?;
        let genuine =
            || pencil_imaginary_excess(sym, zeta, &e).is_none_or(|x| x > PENCIL_REAL_TOLERANCE);
        if !roots.all_real_rooted && genuine() {
            return Ok(DirectionVerdict::CounterexampleZeta {
                zeta: zeta.iter().copied().collect(),
                poly,
                roots,
                tested: k + 1,
            });
        }
    }
    Ok(DirectionVerdict::AllRealRooted {
        tested: zetas.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn wave_1_1() -> PrincipalSymbol {
        PrincipalSymbol::scalar(&Matrix::from_row_slice(2, 2, &[-2.0, 0.0, 0.0, 2.0]))
    }

    #[test]
    fn wave_det_poly() {
        let p = symbol_det_poly(&wave_1_1(), &linalg::unit(2, 1), &linalg::unit(2, 0));
        assert_eq!(p.degree(), 2);
        assert!((p.coeffs[0] - 2.0).abs() < 1e-12 && (p.coeffs[2] + 2.0).abs() < 1e-12);
        assert!(p.coeffs[1].abs() < 1e-12);
        let c = symbol_det_poly(&wave_1_1(), &linalg::unit(2, 1), &Vector::zeros(2));
        assert_eq!(c.degree(), 0);
    }

    #[test]
    fn wave_has_hyperbolic_time_direction() {
        let v = hyperbolic_direction_test(&wave_1_1(), &linalg::unit(2, 0), 50, 1).unwrap();
        assert!(matches!(v, DirectionVerdict::AllRealRooted { .. }));
    }

    #[test]
    fn ultrahyperbolic_has_none() {
        let sym = PrincipalSymbol::scalar(&Matrix::from_diagonal(&Vector::from_vec(vec![
            -1.0, -1.0, 1.0, 1.0,
        ])));
        let v = hyperbolic_direction_test(&sym, &linalg::unit(4, 0), 50, 1).unwrap();
        assert!(matches!(v, DirectionVerdict::CounterexampleZeta { .. }));
    }

    #[test]
    fn semilinear_multiple_roots_count_as_real() {
        use crate::sampling::{random_lorentzian, random_spd};
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 2..=4 {
            let g = random_lorentzian(&mut rng, 4);
            let h = random_spd(&mut rng, n);
            let sym = PrincipalSymbol::semilinear(&g.inverse(), h.components(), 1.0);
            let v = hyperbolic_direction_test(&sym, &g.time_covector(), 32, 2).unwrap();
            assert!(matches!(v, DirectionVerdict::AllRealRooted { .. }), "{v:?}");
        }
    }

    #[test]
    fn degenerate_direction_rejected() {
        let sym =
            PrincipalSymbol::scalar(&Matrix::from_diagonal(&Vector::from_vec(vec![-1.0, 0.0])));
        let r = hyperbolic_direction_test(&sym, &linalg::unit(2, 1), 5, 1);
        assert!(matches!(r, Err(Error::DegenerateDirection { .. })));
    }
}
