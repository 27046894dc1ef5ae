//! Pointwise multilinear algebra: metrics, field jets, the strain tensor
//! `D = g⁻¹ ∘ φ*h` and its invariants, adapted frames and causal characters.
//!
//! All quantities live at a single point of the base manifold. A [`FieldJet`]
//! carries the base metric, the target metric, the Jacobian `dφ` (row `a`,
//! column `A` holds `∂_a φ^A`) and the scalar `s`.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};

/// Relative singular-value cutoff used to decide the rank of `dφ`.
pub const RANK_TOLERANCE: f64 = 1e-9;

/// Lorentzian metric `g_ab` with signature `(-,+,…,+)` and its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseMetric {
    g: Matrix,
    inv: Matrix,
}

impl BaseMetric {
    pub fn new(g: Matrix) -> Result<Self> {
        let n = g.nrows();
        if n < 2 || g.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "base metric must be square with dimension >= 2, got {}x{}",
                g.nrows(),
                g.ncols()
            )));
        }
        let scale = linalg::max_abs(&g).max(f64::MIN_POSITIVE);
        let asym = linalg::asymmetry(&g);
        if asym > 1e-12 * scale {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        let g = linalg::symmetrize(&g);
        let ev = linalg::sym_eigenvalues(&g);
        let emax = ev.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        let zero = ev.iter().filter(|&&x| x.abs() <= 1e-12 * emax).count();
        let negative = ev.iter().filter(|&&x| x < -1e-12 * emax).count();
        if negative != 1 || zero != 0 {
            return Err(Error::NotLorentzian { negative, zero });
        }
        let inv = g
            .clone()
            .try_inverse()
            .ok_or(Error::NotLorentzian { negative, zero: 1 })?;
        let inv = linalg::symmetrize(&inv);
        let residual = (&g * &inv - Matrix::identity(n, n)).norm();
        let cond = linalg::spectral_norm(&g) * linalg::spectral_norm(&inv);
        if residual > 1e-12 * cond.max(1.0) * n as f64 {
            return Err(Error::NotLorentzian { negative, zero: 1 });
        }
        Ok(Self { g, inv })
    }

    /// Flat metric `diag(-1, 1, …, 1)`.
    pub fn minkowski(dim: usize) -> Self {
        let g = linalg::minkowski(dim);
        Self { inv: g.clone(), g }
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn components(&self) -> &Matrix {
        &self.g
    }

    pub fn inverse(&self) -> &Matrix {
        &self.inv
    }

    pub fn inner(&self, u: &Vector, v: &Vector) -> f64 {
        u.dot(&(&self.g * v))
    }

    /// `g`-orthonormal frame as the columns of the returned matrix; column 0
    /// is the unit timelike vector. On Minkowski this is the identity.
    pub fn orthonormal_frame(&self) -> Matrix {
        let n = self.dim();
        let (vals, vecs) = linalg::sym_eigen_sorted(&self.g);
        let mut e0: Vector = vecs.column(0).into_owned() / vals[0].abs().sqrt();
        let lead = e0.iamax();
        if e0[lead] < 0.0 {
            e0 = -e0;
        }
        let mut frame = vec![e0.clone()];
        for k in 0..n {
            let mut w = linalg::unit(n, k);
            let c0 = self.inner(&w, &e0);
            w += &e0 * c0;
            for e in frame.iter().skip(1) {
                let c = self.inner(&w, e);
                w -= e * c;
            }
            let q = self.inner(&w, &w);
            if q > 1e-10 {
                frame.push(w / q.sqrt());
            }
            if frame.len() == n {
                break;
            }
        }
        let mut out = Matrix::zeros(n, n);
        for (k, e) in frame.iter().enumerate() {
            out.set_column(k, e);
        }
        out
    }

    /// Unit timelike covector `f_0` dual to the first frame vector.
    pub fn time_covector(&self) -> Vector {
        let frame = self.orthonormal_frame();
        let dual = frame.try_inverse().expect("frame is invertible");
        dual.row(0).transpose()
    }
}

/// Riemannian metric `h_AB` on the target.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetMetric {
    h: Matrix,
}

impl TargetMetric {
    pub fn new(h: Matrix) -> Result<Self> {
        let n = h.nrows();
        if n < 1 || h.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "target metric must be square, got {}x{}",
                h.nrows(),
                h.ncols()
            )));
        }
        let scale = linalg::max_abs(&h).max(f64::MIN_POSITIVE);
        let asym = linalg::asymmetry(&h);
        if asym > 1e-12 * scale {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        let h = linalg::symmetrize(&h);
        let min_eigenvalue = linalg::sym_eigenvalues(&h)[0];
        if min_eigenvalue <= 0.0 {
            return Err(Error::NotPositiveDefinite { min_eigenvalue });
        }
        Ok(Self { h })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            h: Matrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn components(&self) -> &Matrix {
        &self.h
    }
}

/// First-order data of a map at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldJet {
    pub g: BaseMetric,
    pub h: TargetMetric,
    /// `(m+1) × n`, entry `(a, A) = ∂_a φ^A`.
    pub dphi: Matrix,
    pub s: f64,
}

impl FieldJet {
    pub fn new(g: BaseMetric, h: TargetMetric, dphi: Matrix, s: f64) -> Result<Self> {
        if dphi.nrows() != g.dim() || dphi.ncols() != h.dim() {
            return Err(Error::DimensionMismatch(format!(
                "dphi is {}x{} but metrics have dimensions {} and {}",
                dphi.nrows(),
                dphi.ncols(),
                g.dim(),
                h.dim()
            )));
        }
        if !(s >= 0.0) {
            return Err(Error::NegativeScalar(s));
        }
        if dphi.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("dphi has non-finite entries".into()));
        }
        Ok(Self { g, h, dphi, s })
    }

    /// Jet on flat `R^{1+m}` with `h = I_n` and `dφ = Σ λ_i f_i ⊗ e'_i`.
    ///
    /// Target vectors `e'_i` are assigned the standard basis in order to the
    /// nonzero `λ_i`; zero `λ_i` get `e'_i = 0` until the nonzero ones are
    /// exhausted, after which remaining basis vectors are handed out so that
    /// with `n = m+1` every `e'_i` is a unit vector.
    pub fn adapted(lambdas: &[f64], target_dim: usize) -> Result<AdaptedJet> {
        let dim = lambdas.len();
        if dim < 2 || target_dim < 1 {
            return Err(Error::DimensionMismatch(
                "need at least 2 lambdas and n >= 1".into(),
            ));
        }
        if lambdas.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(Error::InvalidArgument(
                "lambdas must be finite and nonnegative".into(),
            ));
        }
        let nonzero = lambdas.iter().filter(|&&l| l != 0.0).count();
        if nonzero > target_dim {
            return Err(Error::RankConstraintViolation {
                nonzero,
                target_dim,
            });
        }
        let mut spare = target_dim - nonzero;
        let mut next = 0usize;
        let mut basis = Vec::with_capacity(dim);
        for &l in lambdas {
            if l != 0.0 || spare > 0 {
                if l == 0.0 {
                    spare -= 1;
                }
                basis.push(Some(linalg::unit(target_dim, next)));
                next += 1;
            } else {
                basis.push(None);
            }
        }
        let mut dphi = Matrix::zeros(dim, target_dim);
        for (i, (&l, b)) in lambdas.iter().zip(&basis).enumerate() {
            if let Some(b) = b {
                dphi.row_mut(i).copy_from(&(b * l).transpose());
            }
        }
        let jet = FieldJet::new(
            BaseMetric::minkowski(dim),
            TargetMetric::identity(target_dim),
            dphi,
            0.0,
        )?;
        Ok(AdaptedJet {
            jet,
            target_basis: basis,
        })
    }

    pub fn base_dim(&self) -> usize {
        self.g.dim()
    }

    pub fn target_dim(&self) -> usize {
        self.h.dim()
    }

    pub fn with_dphi(&self, dphi: Matrix) -> Self {
        Self {
            dphi,
            ..self.clone()
        }
    }

    pub fn rank(&self) -> usize {
        linalg::numerical_rank(&self.dphi, RANK_TOLERANCE)
    }
}

/// A jet built in a frame adapted to `dφ`, together with the target unit
/// vectors `e'_i` (`None` where `e'_i` vanishes).
#[derive(Debug, Clone)]
pub struct AdaptedJet {
    pub jet: FieldJet,
    pub target_basis: Vec<Option<Vector>>,
}

impl AdaptedJet {
    /// Expresses an `n×n` target bilinear form in the `f'` co-basis:
    /// entry `(i, j)` is `B(e'_i, e'_j)`, zero where either vector vanishes.
    pub fn in_target_basis(&self, form: &Matrix) -> Matrix {
        let k = self.target_basis.len();
        Matrix::from_fn(k, k, |i, j| {
            match (&self.target_basis[i], &self.target_basis[j]) {
                (Some(u), Some(v)) => u.dot(&(form * v)),
                _ => 0.0,
            }
        })
    }
}

/// Pullback, strain and invariants at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct StrainData {
    pub pullback: Matrix,
    pub strain: Matrix,
    /// `σ_0, …, σ_{m+1}`.
    pub sigmas: Vec<f64>,
    pub rank: usize,
}

/// `φ*h = dφ · h · dφᵀ`.
pub fn pullback_metric(jet: &FieldJet) -> Matrix {
    linalg::symmetrize(&(&jet.dphi * jet.h.components() * jet.dphi.transpose()))
}

/// Characteristic-polynomial coefficients of `a`, returned as the elementary
/// symmetric functions `σ_0 … σ_N` of its eigenvalues (Faddeev–LeVerrier).
pub fn char_poly_sigmas(a: &Matrix) -> Vec<f64> {
    let n = a.nrows();
    let mut sigmas = vec![0.0; n + 1];
    sigmas[0] = 1.0;
    // c_{n-k} = coefficient of λ^{n-k} in det(λI - A) = (-1)^k σ_k
    let mut m = Matrix::identity(n, n);
    let mut c = 1.0;
    for k in 1..=n {
        if k > 1 {
            m = a * &m + Matrix::identity(n, n) * c;
        }
        let am = a * &m;
        c = -am.trace() / k as f64;
        sigmas[k] = if k % 2 == 0 { c } else { -c };
    }
    sigmas
}

/// Independent route to the `σ_j` through power sums and Newton's identities.
pub fn newton_sigma_oracle(a: &Matrix) -> Vec<f64> {
    let n = a.nrows();
    let mut power = Matrix::identity(n, n);
    let mut p = vec![0.0; n + 1];
    for pk in p.iter_mut().skip(1) {
        power = &power * a;
        *pk = power.trace();
    }
    let mut sigmas = vec![0.0; n + 1];
    sigmas[0] = 1.0;
    for j in 1..=n {
        let mut acc = 0.0;
        for i in 1..=j {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * sigmas[j - i] * p[i];
        }
        sigmas[j] = acc / j as f64;
    }
    sigmas
}

/// Strain tensor and its invariants. Invariants above the rank of `dφ` are
/// set to exactly zero.
pub fn strain_invariants(jet: &FieldJet) -> StrainData {
    let pullback = pullback_metric(jet);
    let strain = jet.g.inverse() * &pullback;
    let mut sigmas = char_poly_sigmas(&strain);
    let rank = jet.rank();
    for s in sigmas.iter_mut().skip(rank + 1) {
        *s = 0.0;
    }
    StrainData {
        pullback,
        strain,
        sigmas,
        rank,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrameKind {
    Generic,
    /// No timelike eigenvector of `D`: the kernel of `dφ` is null (or the
    /// eigenstructure is complex/defective). Only detected, not normalized.
    DegenerateKernel,
}

/// `g`-orthonormal frame diagonalizing `φ*h`. Empty for
/// [`FrameKind::DegenerateKernel`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedFrame {
    pub vectors: Vec<Vector>,
    pub lambdas_sq: Vec<f64>,
    pub kind: FrameKind,
}

impl AdaptedFrame {
    /// Dual covectors `f_i` with `f_i(e_j) = δ_ij`.
    pub fn covectors(&self) -> Vec<Vector> {
        let n = self.vectors.len();
        if n == 0 {
            return Vec::new();
        }
        let mut e = Matrix::zeros(n, n);
        for (k, v) in self.vectors.iter().enumerate() {
            e.set_column(k, v);
        }
        let dual = e.try_inverse().expect("adapted frame is invertible");
        (0..n).map(|i| dual.row(i).transpose()).collect()
    }
}

/// Simultaneous diagonalization of `g` and `φ*h`.
///
/// Looks for a timelike eigenvector of the `g`-self-adjoint operator `D`; its
/// `g`-orthogonal complement is spacelike and `D`-invariant, so the remaining
/// frame comes from a symmetric eigenproblem there. Spatial frame vectors are
/// ordered by the coordinate axis they are most aligned with, then by
/// descending `λ²`.
pub fn adapted_frame(jet: &FieldJet, tol: f64) -> Result<AdaptedFrame> {
    let n = jet.base_dim();
    let g = &jet.g;
    let strain = strain_invariants(jet);
    let d = &strain.strain;
    let p = &strain.pullback;
    let reference = g.orthonormal_frame();
    let scale = linalg::spectral_norm(d);

    let e0 = if scale == 0.0 {
        reference.column(0).into_owned()
    } else {
        let eig_tol = 1e-6 * scale;
        let eigenvalues: Vec<Complex<f64>> = d.complex_eigenvalues().iter().copied().collect();
        let mut reals: Vec<f64> = Vec::new();
        for z in &eigenvalues {
            if z.im.abs() <= eig_tol && !reals.iter().any(|r| (r - z.re).abs() <= eig_tol) {
                reals.push(z.re);
            }
        }
        let gnorm = linalg::spectral_norm(g.components());
        let mut best: Option<(f64, Vector)> = None;
        for &mu in &reals {
            let shifted = d - Matrix::identity(n, n) * mu;
            let w = linalg::null_space(&shifted, eig_tol);
            if w.ncols() == 0 {
                continue;
            }
            let gram = w.transpose() * g.components() * &w;
            let (vals, vecs) = linalg::sym_eigen_sorted(&gram);
            let w_norm = (w.transpose() * &w).trace().max(1.0);
            if vals[0] < -tol.max(1e-12) * gnorm * w_norm {
                let cand = &w * vecs.column(0);
                if best.as_ref().map_or(true, |(v, _)| vals[0] < *v) {
                    best = Some((vals[0], cand));
                }
            }
        }
        match best {
            None => {
                return Ok(AdaptedFrame {
                    vectors: Vec::new(),
                    lambdas_sq: Vec::new(),
                    kind: FrameKind::DegenerateKernel,
                })
            }
            Some((_, v)) => {
                let q = g.inner(&v, &v);
                let mut v = v / (-q).sqrt();
                if g.inner(&v, &reference.column(0).into_owned()) > 0.0 {
                    v = -v;
                }
                v
            }
        }
    };

    // g-orthonormal basis of the complement of e0
    let mut spatial: Vec<Vector> = Vec::with_capacity(n - 1);
    for k in 1..n {
        let mut w = reference.column(k).into_owned();
        let c0 = g.inner(&w, &e0);
        w += &e0 * c0;
        for e in &spatial {
            let c = g.inner(&w, e);
            w -= e * c;
        }
        let q = g.inner(&w, &w);
        if q <= 0.0 {
            return Err(Error::DefectiveFrame { residual: q.abs() });
        }
        spatial.push(w / q.sqrt());
    }
    let mut b = Matrix::zeros(n, n - 1);
    for (k, e) in spatial.iter().enumerate() {
        b.set_column(k, e);
    }
    let restricted = b.transpose() * p * &b;
    let (vals, vecs) = linalg::sym_eigen_sorted(&restricted);
    let mut pairs: Vec<(f64, Vector)> = (0..n - 1)
        .map(|k| {
            let mut v: Vector = &b * vecs.column(k);
            let lead = v.iamax();
            if v[lead] < 0.0 {
                v = -v;
            }
            (vals[k].max(0.0), v)
        })
        .collect();
    pairs.sort_by(|(la, va), (lb, vb)| {
        va.iamax()
            .cmp(&vb.iamax())
            .then(lb.total_cmp(la))
            .then_with(|| {
                va.iter()
                    .zip(vb.iter())
                    .map(|(x, y)| y.total_cmp(x))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    });

    let mut vectors = vec![e0.clone()];
    let mut lambdas_sq = vec![p.dot(&(&e0 * e0.transpose())).max(0.0)];
    for (l, v) in pairs {
        lambdas_sq.push(l);
        vectors.push(v);
    }

    let mut e = Matrix::zeros(n, n);
    for (k, v) in vectors.iter().enumerate() {
        e.set_column(k, v);
    }
    let eta = linalg::minkowski(n);
    let ortho = (e.transpose() * g.components() * &e - eta).norm();
    let diag = Matrix::from_diagonal(&Vector::from_vec(lambdas_sq.clone()));
    let pscale = linalg::spectral_norm(p).max(1.0);
    let diag_res = (e.transpose() * p * &e - diag).norm() / pscale;
    let residual = ortho.max(diag_res);
    if residual > tol.max(1e-9) * 10.0 * n as f64 {
        return Err(Error::DefectiveFrame { residual });
    }
    Ok(AdaptedFrame {
        vectors,
        lambdas_sq,
        kind: FrameKind::Generic,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CausalCharacter {
    Timelike,
    Null,
    Spacelike,
}

/// Sign of `g(v, v)` relative to `tol · ‖g‖ · |v|²`.
pub fn causal_character(g: &BaseMetric, v: &Vector, tol: f64) -> Result<CausalCharacter> {
    let vv = v.norm_squared();
    if vv == 0.0 {
        return Err(Error::ZeroVector);
    }
    let q = g.inner(v, v);
    let band = tol * linalg::spectral_norm(g.components()) * vv;
    Ok(if q < -band {
        CausalCharacter::Timelike
    } else if q > band {
        CausalCharacter::Spacelike
    } else {
        CausalCharacter::Null
    })
}
