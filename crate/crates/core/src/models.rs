//! Lagrangian functions `L(s, σ_1, …, σ_{m+1})` and their partials.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::tensor::{char_poly_sigmas, pullback_metric, FieldJet};

/// Number of intermediate scalings of `dφ` checked by the Born–Infeld
/// domain homotopy.
pub const HOMOTOPY_STEPS: usize = 8;

pub type ValueFn = dyn Fn(f64, &[f64]) -> Result<f64> + Send + Sync;
pub type GradientFn = dyn Fn(f64, &[f64]) -> Result<Vec<f64>> + Send + Sync;

/// User-supplied Lagrangian. Without an analytic gradient, partials are
/// taken by central differences.
#[derive(Clone)]
pub struct CustomLagrangian {
    pub name: String,
    pub value: Arc<ValueFn>,
    pub gradient: Option<Arc<GradientFn>>,
}

impl fmt::Debug for CustomLagrangian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomLagrangian")
            .field("name", &self.name)
            .field("analytic_gradient", &self.gradient.is_some())
            .finish()
    }
}

/// Serializable parameters of the built-in catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    WaveMap,
    Skyrme {
        #[serde(default = "half")]
        c1: f64,
        #[serde(default = "half")]
        c2: f64,
    },
    BornInfeld {
        #[serde(default = "two")]
        b: f64,
    },
    Membrane,
    Fluid {
        #[serde(default = "three")]
        index: usize,
        #[serde(default)]
        offset: f64,
        #[serde(default = "half")]
        exponent: f64,
    },
    SigmaCombo {
        coeffs: Vec<f64>,
        #[serde(default)]
        c_s: f64,
    },
}

fn half() -> f64 {
    0.5
}
fn two() -> f64 {
    2.0
}
fn three() -> usize {
    3
}

/// A Lagrangian depending on the field only through `s` and the strain
/// invariants.
#[derive(Debug, Clone)]
pub enum LagrangianModel {
    /// `L = σ_1`.
    WaveMap,
    /// `L = c1 σ_1 + c2 σ_2 + s`.
    Skyrme {
        c1: f64,
        c2: f64,
    },
    /// `L = sqrt(det(b I + D)) - sqrt(b^{m+1})`.
    BornInfeld {
        b: f64,
    },
    /// `L = sqrt(1 + σ_1)`.
    Membrane,
    /// `L = (offset + σ_index)^exponent`.
    Fluid {
        index: usize,
        offset: f64,
        exponent: f64,
    },
    /// `L = c_s s + Σ c_j σ_j`; `coeffs[j-1]` multiplies `σ_j`.
    SigmaCombo {
        coeffs: Vec<f64>,
        c_s: f64,
    },
    Custom(CustomLagrangian),
}

/// Value and partial derivatives of a model at `(s, σ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelEval {
    pub value: f64,
    /// `∂L/∂σ_j`, index `j-1`.
    pub grad: Vec<f64>,
    pub grad_s: f64,
    /// `∂²L/∂σ_i∂σ_j`.
    pub hessian: Matrix,
}

impl LagrangianModel {
    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        Ok(match spec {
            ModelSpec::WaveMap => Self::WaveMap,
            ModelSpec::Skyrme { c1, c2 } => {
                positive("c1", *c1)?;
                positive("c2", *c2)?;
                Self::Skyrme { c1: *c1, c2: *c2 }
            }
            ModelSpec::BornInfeld { b } => {
                positive("b", *b)?;
                Self::BornInfeld { b: *b }
            }
            ModelSpec::Membrane => Self::Membrane,
            ModelSpec::Fluid {
                index,
                offset,
                exponent,
            } => {
                if *index == 0 {
                    return Err(Error::InvalidArgument("fluid index starts at 1".into()));
                }
                positive("exponent", *exponent)?;
                Self::Fluid {
                    index: *index,
                    offset: *offset,
                    exponent: *exponent,
                }
            }
            ModelSpec::SigmaCombo { coeffs, c_s } => {
                if coeffs
                    .iter()
                    .chain(std::iter::once(c_s))
                    .any(|c| !(*c >= 0.0))
                {
                    return Err(Error::InvalidArgument(
                        "sigma-combo coefficients must be >= 0".into(),
                    ));
                }
                Self::SigmaCombo {
                    coeffs: coeffs.clone(),
                    c_s: *c_s,
                }
            }
        })
    }

    /// Catalog lookup with default parameters.
    pub fn from_name(name: &str) -> Result<Self> {
        let spec = match name {
            "wave-map" => ModelSpec::WaveMap,
            "skyrme" => ModelSpec::Skyrme { c1: 0.5, c2: 0.5 },
            "born-infeld" => ModelSpec::BornInfeld { b: 2.0 },
            "membrane" => ModelSpec::Membrane,
            "fluid" => ModelSpec::Fluid {
                index: 3,
                offset: 2.0,
                exponent: 0.5,
            },
            "sigma-combo" => ModelSpec::SigmaCombo {
                coeffs: vec![1.0],
                c_s: 0.0,
            },
            other => return Err(Error::InvalidArgument(format!("unknown model '{other}'"))),
        };
        Self::from_spec(&spec)
    }

    /// `L = σ_j`.
    pub fn sigma(j: usize) -> Self {
        let mut coeffs = vec![0.0; j];
        coeffs[j - 1] = 1.0;
        Self::SigmaCombo { coeffs, c_s: 0.0 }
    }

    pub fn name(&self) -> String {
        match self {
            Self::WaveMap => "wave-map".into(),
            Self::Skyrme { .. } => "skyrme".into(),
            Self::BornInfeld { .. } => "born-infeld".into(),
            Self::Membrane => "membrane".into(),
            Self::Fluid { .. } => "fluid".into(),
            Self::SigmaCombo { .. } => "sigma-combo".into(),
            Self::Custom(c) => c.name.clone(),
        }
    }

    /// Value only; cheaper than [`Self::eval`] and used by the differencing
    /// oracles.
    pub fn value(&self, s: f64, sigmas: &[f64]) -> Result<f64> {
        let at = |j: usize| sigmas.get(j - 1).copied().unwrap_or(0.0);
        match self {
            Self::WaveMap => Ok(at(1)),
            Self::Skyrme { c1, c2 } => Ok(c1 * at(1) + c2 * at(2) + s),
            Self::BornInfeld { b } => {
                let q = born_infeld_det(*b, sigmas);
                if q <= 0.0 {
                    return Err(Error::Domain(format!("det(b I + D) = {q} <= 0")));
                }
                Ok(q.sqrt() - b.powi(sigmas.len() as i32).sqrt())
            }
            Self::Membrane => {
                let q = 1.0 + at(1);
                if q <= 0.0 {
                    return Err(Error::Domain(format!("1 + sigma_1 = {q} <= 0")));
                }
                Ok(q.sqrt())
            }
            Self::Fluid {
                index,
                offset,
                exponent,
            } => {
                let base = offset + at(*index);
                check_fluid_base(base, *exponent)?;
                Ok(base.powf(*exponent))
            }
            Self::SigmaCombo { coeffs, c_s } => Ok(c_s * s
                + coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * at(k + 1))
                    .sum::<f64>()),
            Self::Custom(c) => (c.value)(s, sigmas),
        }
    }

    /// Value, gradient and Hessian in the invariants.
    pub fn eval(&self, s: f64, sigmas: &[f64]) -> Result<ModelEval> {
        let n = sigmas.len();
        let value = self.value(s, sigmas)?;
        let mut grad = vec![0.0; n];
        let mut hessian = Matrix::zeros(n, n);
        let mut grad_s = 0.0;
        match self {
            Self::WaveMap => {
                if n >= 1 {
                    grad[0] = 1.0;
                }
            }
            Self::Skyrme { c1, c2 } => {
                if n >= 1 {
                    grad[0] = *c1;
                }
                if n >= 2 {
                    grad[1] = *c2;
                }
                grad_s = 1.0;
            }
            Self::BornInfeld { b } => {
                let q = born_infeld_det(*b, sigmas);
                let root = q.sqrt();
                let w: Vec<f64> = (1..=n).map(|j| b.powi((n - j) as i32)).collect();
                for i in 0..n {
                    grad[i] = w[i] / (2.0 * root);
                    for j in 0..n {
                        hessian[(i, j)] = -w[i] * w[j] / (4.0 * q * root);
                    }
                }
            }
            Self::Membrane => {
                let q = 1.0 + sigmas.first().copied().unwrap_or(0.0);
                if n >= 1 {
                    grad[0] = 0.5 / q.sqrt();
                    hessian[(0, 0)] = -0.25 / (q * q.sqrt());
                }
            }
            Self::Fluid {
                index,
                offset,
                exponent,
            } => {
                if *index <= n {
                    let base = offset + sigmas[index - 1];
                    let p = *exponent;
                    grad[index - 1] = p * base.powf(p - 1.0);
                    hessian[(index - 1, index - 1)] = p * (p - 1.0) * base.powf(p - 2.0);
                }
            }
            Self::SigmaCombo { coeffs, c_s } => {
                for (k, c) in coeffs.iter().enumerate().take(n) {
                    grad[k] = *c;
                }
                grad_s = *c_s;
            }
            Self::Custom(c) => {
                let (gs, gr) = match &c.gradient {
                    Some(gf) => {
                        let gr = gf(s, sigmas)?;
                        let hs = 1e-5 * s.abs().max(1.0);
                        let gs = (c.value.as_ref()(s + hs, sigmas)?
                            - c.value.as_ref()(s - hs, sigmas)?)
                            / (2.0 * hs);
                        (gs, gr)
                    }
                    None => fd_gradient(c.value.as_ref(), s, sigmas)?,
                };
                grad = gr;
                grad_s = gs;
                hessian = fd_hessian(c, s, sigmas)?;
            }
        }
        Ok(ModelEval {
            value,
            grad,
            grad_s,
            hessian,
        })
    }

    /// Domain check that needs the full jet. Born–Infeld additionally
    /// requires the positive-determinant component connected to `dφ = 0`,
    /// tested along the scalings `k/8 · dφ`.
    pub fn check_jet_domain(&self, jet: &FieldJet) -> Result<()> {
        if let Self::BornInfeld { b } = self {
            let n = jet.base_dim();
            let p = pullback_metric(jet);
            for k in 1..=HOMOTOPY_STEPS {
                let t = k as f64 / HOMOTOPY_STEPS as f64;
                let d = jet.g.inverse() * &p * (t * t);
                let sig = char_poly_sigmas(&d);
                let q = born_infeld_det(*b, &sig[1..]);
                if q <= 0.0 {
                    return Err(Error::Domain(format!(
                        "det(b I + D) = {q} <= 0 at homotopy step {k}/{HOMOTOPY_STEPS} (dim {n})"
                    )));
                }
            }
        }
        let sig = crate::tensor::strain_invariants(jet).sigmas;
        self.value(jet.s, &sig[1..]).map(|_| ())
    }
}

/// `det(b I + D) = Σ_j b^{N-j} σ_j` with `σ_0 = 1`.
fn born_infeld_det(b: f64, sigmas: &[f64]) -> f64 {
    let n = sigmas.len();
    let mut q = b.powi(n as i32);
    for (k, s) in sigmas.iter().enumerate() {
        q += b.powi((n - k - 1) as i32) * s;
    }
    q
}

fn check_fluid_base(base: f64, exponent: f64) -> Result<()> {
    let integral = exponent.fract() == 0.0 && exponent >= 1.0;
    if !integral && base <= 0.0 {
        return Err(Error::Domain(format!(
            "fluid base offset + sigma = {base} <= 0"
        )));
    }
    Ok(())
}

fn fd_step(x: f64) -> f64 {
    1e-5 * x.abs().max(1.0)
}

fn fd_gradient(f: &ValueFn, s: f64, sigmas: &[f64]) -> Result<(f64, Vec<f64>)> {
    let hs = fd_step(s);
    let gs = (f(s + hs, sigmas)? - f(s - hs, sigmas)?) / (2.0 * hs);
    let mut grad = Vec::with_capacity(sigmas.len());
    let mut x = sigmas.to_vec();
    for j in 0..sigmas.len() {
        let h = fd_step(sigmas[j]);
        x[j] = sigmas[j] + h;
        let up = f(s, &x)?;
        x[j] = sigmas[j] - h;
        let down = f(s, &x)?;
        x[j] = sigmas[j];
        grad.push((up - down) / (2.0 * h));
    }
    Ok((gs, grad))
}

fn fd_hessian(c: &CustomLagrangian, s: f64, sigmas: &[f64]) -> Result<Matrix> {
    let n = sigmas.len();
    let mut hess = Matrix::zeros(n, n);
    let mut x = sigmas.to_vec();
    if let Some(gf) = &c.gradient {
        for j in 0..n {
            let h = fd_step(sigmas[j]);
            x[j] = sigmas[j] + h;
            let up = gf(s, &x)?;
            x[j] = sigmas[j] - h;
            let down = gf(s, &x)?;
            x[j] = sigmas[j];
            for i in 0..n {
                hess[(i, j)] = (up[i] - down[i]) / (2.0 * h);
            }
        }
        return Ok(crate::linalg::symmetrize(&hess));
    }
    let f = c.value.as_ref();
    let f0 = f(s, sigmas)?;
    for i in 0..n {
        let hi = fd_step(sigmas[i]);
        for j in i..n {
            let hj = fd_step(sigmas[j]);
            let v = if i == j {
                x[i] = sigmas[i] + hi;
                let up = f(s, &x)?;
                x[i] = sigmas[i] - hi;
                let down = f(s, &x)?;
                x[i] = sigmas[i];
                (up - 2.0 * f0 + down) / (hi * hi)
            } else {
                let mut corner = |di: f64, dj: f64| {
                    x[i] = sigmas[i] + di;
                    x[j] = sigmas[j] + dj;
                    let v = f(s, &x);
                    x[i] = sigmas[i];
                    x[j] = sigmas[j];
                    v
                };
                (corner(hi, hj)? - corner(hi, -hj)? - corner(-hi, hj)? + corner(-hi, -hj)?)
                    / (4.0 * hi * hj)
            };
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Ok(hess)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wave_map_eval() {
        let e = LagrangianModel::WaveMap
            .eval(0.0, &[1.0, -1.0, -1.0, 0.0])
            .unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.grad, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn skyrme_value() {
        let m = LagrangianModel::Skyrme { c1: 0.5, c2: 0.5 };
        assert_eq!(m.value(0.0, &[2.0, 3.0, 0.0, 0.0]).unwrap(), 2.5);
    }

    #[test]
    fn membrane_domain() {
        let err = LagrangianModel::Membrane
            .eval(0.0, &[-2.0, 0.0])
            .unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn analytic_partials_match_differences() {
        let sig = [0.3, -0.2, 0.1, 0.05];
        let models = [
            LagrangianModel::BornInfeld { b: 2.0 },
            LagrangianModel::Membrane,
            LagrangianModel::Fluid {
                index: 3,
                offset: 2.0,
                exponent: 0.5,
            },
            LagrangianModel::Skyrme { c1: 0.5, c2: 0.5 },
        ];
        for m in models {
            let e = m.eval(0.4, &sig).unwrap();
            let probe = m.clone();
            let custom = LagrangianModel::Custom(CustomLagrangian {
                name: "probe".into(),
                value: Arc::new(move |s, x| probe.value(s, x)),
                gradient: None,
            });
            let fd = custom.eval(0.4, &sig).unwrap();
            for j in 0..4 {
                assert!(
                    (e.grad[j] - fd.grad[j]).abs() <= 1e-6 * e.grad[j].abs().max(1.0),
                    "{m:?}"
                );
                for i in 0..4 {
                    let a = e.hessian[(i, j)];
                    assert!(
                        (a - fd.hessian[(i, j)]).abs() <= 1e-4 * a.abs().max(0.1),
                        "{m:?}"
                    );
                }
            }
            assert!((e.grad_s - fd.grad_s).abs() < 1e-8);
        }
    }

    #[test]
    fn born_infeld_zero_at_origin() {
        let m = LagrangianModel::BornInfeld { b: 2.0 };
        assert!(m.value(0.0, &[0.0; 4]).unwrap().abs() < 1e-15);
        assert!(m.value(0.0, &[-100.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn catalog_names_round_trip() {
        for name in [
            "wave-map",
            "skyrme",
            "born-infeld",
            "membrane",
            "fluid",
            "sigma-combo",
        ] {
            assert_eq!(LagrangianModel::from_name(name).unwrap().name(), name);
        }
        assert!(LagrangianModel::from_name("nope").is_err());
    }

    #[test]
    fn spec_json_surface() {
        let ok: ModelSpec =
            serde_json::from_str(r#"{"name":"skyrme","c1":1.0,"c2":0.25}"#).unwrap();
        assert_eq!(ok, ModelSpec::Skyrme { c1: 1.0, c2: 0.25 });
        let dflt: ModelSpec = serde_json::from_str(r#"{"name":"born-infeld"}"#).unwrap();
        assert_eq!(dflt, ModelSpec::BornInfeld { b: 2.0 });
        assert!(serde_json::from_str::<ModelSpec>(r#"{"name":"skyrme","c3":1.0}"#).is_err());
        assert!(serde_json::from_str::<ModelSpec>(r#"{"name":"tachyon"}"#).is_err());
    }
}
