//! Principal symbol `m^{ab}_{AB}`, the `Z` tensor and canonical stresses.
//!
//! The symbol is the raw second derivative of `L` with respect to the
//! entries of `dφ`, symmetrized in the base indices. Both target indices are
//! lower.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::models::LagrangianModel;
use crate::tensor::{char_poly_sigmas, pullback_metric, FieldJet};

/// Relative step for the symbol Hessian.
pub const SYMBOL_FD_STEP: f64 = 1e-4;
/// Relative step for first derivatives in `dφ`.
pub const GRADIENT_FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrincipalSymbol {
    base_dim: usize,
    target_dim: usize,
    /// Row-major `[a][b][A][B]`.
    data: Vec<f64>,
}

impl PrincipalSymbol {
    pub fn zeros(base_dim: usize, target_dim: usize) -> Self {
        Self {
            base_dim,
            target_dim,
            data: vec![0.0; base_dim * base_dim * target_dim * target_dim],
        }
    }

    pub fn from_fn(
        base_dim: usize,
        target_dim: usize,
        mut f: impl FnMut(usize, usize, usize, usize) -> f64,
    ) -> Self {
        let mut s = Self::zeros(base_dim, target_dim);
        for a in 0..base_dim {
            for b in 0..base_dim {
                for aa in 0..target_dim {
                    for bb in 0..target_dim {
                        let i = s.index(a, b, aa, bb);
                        s.data[i] = f(a, b, aa, bb);
                    }
                }
            }
        }
        s
    }

    /// Assemble from `n×n` blocks `m^{ab}`; `blocks[a][b]` must be given for
    /// every pair.
    pub fn from_blocks(blocks: &[Vec<Matrix>]) -> Result<Self> {
        let base_dim = blocks.len();
        let target_dim = blocks
            .first()
            .and_then(|r| r.first())
            .map(|m| m.nrows())
            .ok_or_else(|| Error::DimensionMismatch("empty block array".into()))?;
        for row in blocks {
            if row.len() != base_dim
                || row
                    .iter()
                    .any(|m| m.nrows() != target_dim || m.ncols() != target_dim)
            {
                return Err(Error::DimensionMismatch("ragged symbol blocks".into()));
            }
        }
        Ok(Self::from_fn(base_dim, target_dim, |a, b, aa, bb| {
            blocks[a][b][(aa, bb)]
        }))
    }

    /// Scalar-target symbol `m^{ab}` (target dimension 1).
    pub fn scalar(m: &Matrix) -> Self {
        Self::from_fn(m.nrows(), 1, |a, b, _, _| m[(a, b)])
    }

    /// `c · g^{ab} h_AB`, the semilinear symbol.
    pub fn semilinear(g_inv: &Matrix, h: &Matrix, c: f64) -> Self {
        Self::from_fn(g_inv.nrows(), h.nrows(), |a, b, aa, bb| {
            c * g_inv[(a, b)] * h[(aa, bb)]
        })
    }

    fn index(&self, a: usize, b: usize, aa: usize, bb: usize) -> usize {
        ((a * self.base_dim + b) * self.target_dim + aa) * self.target_dim + bb
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn get(&self, a: usize, b: usize, aa: usize, bb: usize) -> f64 {
        self.data[self.index(a, b, aa, bb)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// The `n×n` block `m^{ab}`.
    pub fn block(&self, a: usize, b: usize) -> Matrix {
        Matrix::from_fn(self.target_dim, self.target_dim, |i, j| {
            self.get(a, b, i, j)
        })
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            base_dim: self.base_dim,
            target_dim: self.target_dim,
            data: self.data.iter().map(|x| c * x).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.base_dim != other.base_dim || self.target_dim != other.target_dim {
            return Err(Error::DimensionMismatch("symbol dimensions differ".into()));
        }
        Ok(Self {
            base_dim: self.base_dim,
            target_dim: self.target_dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| x + y)
                .collect(),
        })
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
    }

    /// Largest deviation from `(ab)` and `(AB)` symmetry.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..self.base_dim {
            for b in 0..self.base_dim {
                for aa in 0..self.target_dim {
                    for bb in 0..self.target_dim {
                        let v = self.get(a, b, aa, bb);
                        worst = worst
                            .max((v - self.get(b, a, aa, bb)).abs())
                            .max((v - self.get(a, b, bb, aa)).abs());
                    }
                }
            }
        }
        worst
    }

    /// Maximum componentwise difference.
    pub fn distance(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()))
    }
}

fn lagrangian_of_dphi(model: &LagrangianModel, jet: &FieldJet, dphi: &Matrix) -> Result<f64> {
    let p = dphi * jet.h.components() * dphi.transpose();
    let sig = char_poly_sigmas(&(jet.g.inverse() * p));
    model.value(jet.s, &sig[1..])
}

/// Central-difference Hessian of `L` in the entries of `dφ`, symmetrized in
/// the base indices.
pub fn principal_symbol_fd(model: &LagrangianModel, jet: &FieldJet) -> Result<PrincipalSymbol> {
    model.check_jet_domain(jet)?;
    let nb = jet.base_dim();
    let nt = jet.target_dim();
    let vars = nb * nt;
    let h = SYMBOL_FD_STEP * jet.dphi.norm().max(1.0);
    let mut x = jet.dphi.clone();
    let f0 = lagrangian_of_dphi(model, jet, &x)?;
    let mut hess = Matrix::zeros(vars, vars);
    let pos = |k: usize| (k / nt, k % nt);
    for i in 0..vars {
        let pi = pos(i);
        let xi = x[pi];
        x[pi] = xi + h;
        let up = lagrangian_of_dphi(model, jet, &x)?;
        x[pi] = xi - h;
        let down = lagrangian_of_dphi(model, jet, &x)?;
        x[pi] = xi;
        hess[(i, i)] = (up - 2.0 * f0 + down) / (h * h);
        for j in (i + 1)..vars {
            let pj = pos(j);
            let xj = x[pj];
            let mut corner = |di: f64, dj: f64| {
                x[pi] = xi + di;
                x[pj] = xj + dj;
                let v = lagrangian_of_dphi(model, jet, &x);
                x[pi] = xi;
                x[pj] = xj;
                v
            };
            let v =
                (corner(h, h)? - corner(h, -h)? - corner(-h, h)? + corner(-h, -h)?) / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Ok(PrincipalSymbol::from_fn(nb, nt, |a, b, aa, bb| {
        0.5 * (hess[(a * nt + aa, b * nt + bb)] + hess[(b * nt + aa, a * nt + bb)])
    }))
}

/// Closed-form symbol of `L = c1 σ_1 + c2 σ_2 + s`.
pub fn skyrme_symbol(jet: &FieldJet, c1: f64, c2: f64) -> PrincipalSymbol {
    let gi = jet.g.inverse();
    let h = jet.h.components();
    let p = pullback_metric(jet);
    let fh = &jet.dphi * h;
    let f = gi * &fh;
    let s = fh.transpose() * gi * &fh;
    let gpg = gi * &p * gi;
    let sigma1 = (gi * &p).trace();
    PrincipalSymbol::from_fn(jet.base_dim(), jet.target_dim(), |a, b, aa, bb| {
        let gh = gi[(a, b)] * h[(aa, bb)];
        let quartic = gh * sigma1 + 0.5 * (f[(a, aa)] * f[(b, bb)] + f[(b, aa)] * f[(a, bb)])
            - gi[(a, b)] * s[(aa, bb)]
            - h[(aa, bb)] * gpg[(a, b)];
        2.0 * c1 * gh + 2.0 * c2 * quartic
    })
}

/// `m^{ab}_{AB} ξ_a η_b`.
pub fn contract_symbol(sym: &PrincipalSymbol, xi: &Vector, eta: &Vector) -> Matrix {
    let n = sym.target_dim();
    let mut out = Matrix::zeros(n, n);
    for a in 0..sym.base_dim() {
        if xi[a] == 0.0 {
            continue;
        }
        for b in 0..sym.base_dim() {
            let w = xi[a] * eta[b];
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += w * sym.get(a, b, i, j);
                }
            }
        }
    }
    out
}

/// `Z^{ab}_{AB}|^c_d = m^{ab}_{AB} δ^c_d − m^{cb}_{AB} δ^a_d − m^{ac}_{AB} δ^b_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZTensor {
    base_dim: usize,
    target_dim: usize,
    /// Row-major `[a][b][A][B][c][d]`.
    data: Vec<f64>,
}

impl ZTensor {
    fn index(&self, a: usize, b: usize, aa: usize, bb: usize, c: usize, d: usize) -> usize {
        let (nb, nt) = (self.base_dim, self.target_dim);
        ((((a * nb + b) * nt + aa) * nt + bb) * nb + c) * nb + d
    }

    pub fn get(&self, a: usize, b: usize, aa: usize, bb: usize, c: usize, d: usize) -> f64 {
        self.data[self.index(a, b, aa, bb, c, d)]
    }

    /// Trace over `c = d` for a fixed `(a, b, A, B)`.
    pub fn trace(&self, a: usize, b: usize, aa: usize, bb: usize) -> f64 {
        (0..self.base_dim)
            .map(|c| self.get(a, b, aa, bb, c, c))
            .sum()
    }

    /// `−Z^{ab}_{AB}|^c_d ∂_aψ^A ∂_bψ^B`.
    pub fn contract(&self, dpsi: &Matrix) -> Matrix {
        let (nb, nt) = (self.base_dim, self.target_dim);
        let mut q = Matrix::zeros(nb, nb);
        for a in 0..nb {
            for b in 0..nb {
                for aa in 0..nt {
                    for bb in 0..nt {
                        let w = dpsi[(a, aa)] * dpsi[(b, bb)];
                        if w == 0.0 {
                            continue;
                        }
                        for c in 0..nb {
                            for d in 0..nb {
                                q[(c, d)] -= w * self.get(a, b, aa, bb, c, d);
                            }
                        }
                    }
                }
            }
        }
        q
    }
}

pub fn z_tensor(sym: &PrincipalSymbol) -> ZTensor {
    let (nb, nt) = (sym.base_dim(), sym.target_dim());
    let mut z = ZTensor {
        base_dim: nb,
        target_dim: nt,
        data: vec![0.0; nb.pow(4) * nt * nt],
    };
    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    for a in 0..nb {
        for b in 0..nb {
            for aa in 0..nt {
                for bb in 0..nt {
                    for c in 0..nb {
                        for d in 0..nb {
                            let v = sym.get(a, b, aa, bb) * delta(c, d)
                                - sym.get(c, b, aa, bb) * delta(a, d)
                                - sym.get(a, c, aa, bb) * delta(b, d);
                            let i = z.index(a, b, aa, bb, c, d);
                            z.data[i] = v;
                        }
                    }
                }
            }
        }
    }
    z
}

/// Mixed-index `Q^c_d` (row `c`, column `d`).
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalStress {
    pub components: Matrix,
}

/// `Q[ψ]^c_d = −Z^{ab}_{AB}|^c_d ∂_aψ^A ∂_bψ^B`.
pub fn canonical_stress_linearized(
    sym: &PrincipalSymbol,
    dpsi: &Matrix,
) -> Result<CanonicalStress> {
    if dpsi.nrows() != sym.base_dim() || dpsi.ncols() != sym.target_dim() {
        return Err(Error::DimensionMismatch(format!(
            "dpsi is {}x{}, symbol expects {}x{}",
            dpsi.nrows(),
            dpsi.ncols(),
            sym.base_dim(),
            sym.target_dim()
        )));
    }
    Ok(CanonicalStress {
        components: z_tensor(sym).contract(dpsi),
    })
}

/// `∂L/∂(∂_cφ^A)` by central differences.
pub fn lagrangian_gradient_dphi(model: &LagrangianModel, jet: &FieldJet) -> Result<Matrix> {
    let h = GRADIENT_FD_STEP * jet.dphi.norm().max(1.0);
    let mut x = jet.dphi.clone();
    let mut grad = Matrix::zeros(x.nrows(), x.ncols());
    for c in 0..x.nrows() {
        for aa in 0..x.ncols() {
            let x0 = x[(c, aa)];
            x[(c, aa)] = x0 + h;
            let up = lagrangian_of_dphi(model, jet, &x)?;
            x[(c, aa)] = x0 - h;
            let down = lagrangian_of_dphi(model, jet, &x)?;
            x[(c, aa)] = x0;
            grad[(c, aa)] = (up - down) / (2.0 * h);
        }
    }
    Ok(grad)
}

/// Noether form `T̃^c_d = (∂L/∂(∂_cφ^A)) ∂_dφ^A − δ^c_d L`.
pub fn canonical_stress_noether(
    model: &LagrangianModel,
    jet: &FieldJet,
) -> Result<CanonicalStress> {
    model.check_jet_domain(jet)?;
    let l = lagrangian_of_dphi(model, jet, &jet.dphi)?;
    let grad = lagrangian_gradient_dphi(model, jet)?;
    let n = jet.base_dim();
    let t = grad * jet.dphi.transpose() - Matrix::identity(n, n) * l;
    Ok(CanonicalStress { components: t })
}

/// `E = −Q^c_d X^d t_c`, positive for the standard wave equation.
pub fn energy_density(
    sym: &PrincipalSymbol,
    dpsi: &Matrix,
    t_covector: &Vector,
    x: &Vector,
) -> Result<f64> {
    if t_covector.dot(x) <= 0.0 {
        return Err(Error::InvalidArgument("t(X) must be positive".into()));
    }
    let q = canonical_stress_linearized(sym, dpsi)?;
    Ok(-t_covector.dot(&(q.components * x)))
}

/// Relative size of the part of `sym` violating `(ab)`/`(AB)` symmetry.
pub fn relative_asymmetry(sym: &PrincipalSymbol) -> f64 {
    sym.asymmetry() / sym.max_abs().max(f64::MIN_POSITIVE)
}

/// `m(ξ,ξ)` symmetrized, for definiteness tests.
pub fn quadratic_block(sym: &PrincipalSymbol, xi: &Vector) -> Matrix {
    linalg::symmetrize(&contract_symbol(sym, xi, xi))
}
