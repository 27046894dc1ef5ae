//! Real polynomials, Sturm chains and real-root counting.

use serde::{Deserialize, Serialize};

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::exact::{self, RatPoly};
use crate::error::{Error, Result};

/// Relative cutoff below which trailing coefficients are dropped.
pub const TRIM_TOLERANCE: f64 = 1e-10;

/// Polynomial with coefficients in ascending order of degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    pub coeffs: Vec<f64>,
}

impl Poly {
    /// Drops exact trailing zeros.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    /// `Π (s - r_i)`.
    pub fn from_roots(roots: &[f64]) -> Self {
        roots.iter().fold(Self::new(vec![1.0]), |p, &r| {
            p.mul(&Self::new(vec![-r, 1.0]))
        })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().expect("never empty")
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::new(vec![0.0]);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let at = |p: &Self, k: usize| p.coeffs.get(k).copied().unwrap_or(0.0);
        Self::new((0..n).map(|k| at(self, k) - at(other, k)).collect())
    }

    /// Drops trailing coefficients below `rel` times the largest one.
    pub fn trimmed(&self, rel: f64) -> Self {
        let cut = rel * self.max_abs();
        let mut c = self.coeffs.clone();
        while c.len() > 1 && c.last().is_some_and(|x| x.abs() <= cut) {
            c.pop();
        }
        Self::new(c)
    }

    /// Scaled so the largest coefficient has magnitude 1.
    pub fn normalized(&self) -> Self {
        let m = self.max_abs();
        if m == 0.0 {
            self.clone()
        } else {
            self.scale(1.0 / m)
        }
    }

    /// Quotient and remainder of long division.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree();
        let lead = divisor.leading();
        if self.degree() < dd {
            return (Self::new(vec![0.0]), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0.0; self.degree() - dd + 1];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd] / lead;
            quot[k] = c;
            for (i, d) in divisor.coeffs.iter().enumerate() {
                rem[k + i] -= c * d;
            }
            rem[k + dd] = 0.0;
        }
        rem.truncate(dd.max(1));
        (Self::new(quot), Self::new(rem))
    }

    /// Coefficient sign changes, zeros skipped.
    pub fn sign_variations(&self) -> usize {
        count_variations(self.coeffs.iter().copied())
    }

    /// `1 + max |a_i / a_deg|`; every root lies inside `(-R, R)`.
    pub fn cauchy_bound(&self) -> f64 {
        let lead = self.leading();
        1.0 + self.coeffs[..self.degree()]
            .iter()
            .fold(0.0f64, |a, c| a.max((c / lead).abs()))
    }
}

fn count_variations(values: impl Iterator<Item = f64>) -> usize {
    let mut last = 0.0f64;
    let mut count = 0;
    for v in values {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

/// Monic greatest common divisor, computed exactly on the rational values
/// of the coefficients and rounded back.
pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    exact::gcd(&RatPoly::from_f64(a), &RatPoly::from_f64(b)).to_f64()
}

/// `p / gcd(p, p')`, the polynomial with the same roots all simple.
pub fn square_free_part(p: &Poly) -> Poly {
    exact::square_free(&RatPoly::from_f64(p)).to_f64()
}

/// Signed remainder sequence `p_0 = q, p_1 = q'`,
/// `p_{k-1} = quotients[k] · p_k − scales[k] · p_{k+1}`, built in exact
/// arithmetic and stored rounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SturmChain {
    pub polys: Vec<Poly>,
    pub quotients: Vec<Poly>,
    pub scales: Vec<f64>,
    pub degree: usize,
}

impl SturmChain {
    pub fn new(p: &Poly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let (polys, quotients, scales) = exact::sturm_chain(&RatPoly::from_f64(p));
        Ok(Self {
            polys: polys.iter().map(RatPoly::to_f64).collect(),
            quotients: quotients.iter().map(RatPoly::to_f64).collect(),
            scales: scales
                .iter()
                .map(|c| c.to_f64().unwrap_or(f64::NAN))
                .collect(),
            degree: p.degree(),
        })
    }

    /// Sign changes along the chain at `x`.
    pub fn variations_at(&self, x: f64) -> usize {
        count_variations(self.polys.iter().map(|p| p.eval(x)))
    }

    /// Sign changes at `+∞` (`positive`) or `−∞`.
    pub fn variations_at_infinity(&self, positive: bool) -> usize {
        count_variations(self.polys.iter().map(|p| {
            let odd = p.degree() % 2 == 1;
            if positive || !odd {
                p.leading()
            } else {
                -p.leading()
            }
        }))
    }

    /// Distinct real roots in `(a, b]`.
    pub fn count_in(&self, a: f64, b: f64) -> usize {
        self.variations_at(a).saturating_sub(self.variations_at(b))
    }

    pub fn distinct_real_roots(&self) -> usize {
        self.variations_at_infinity(false)
            .saturating_sub(self.variations_at_infinity(true))
    }

    /// Largest relative residual of `p_{k-1} − (q_k p_k − c_k p_{k+1})`.
    pub fn relation_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for k in 1..self.polys.len() - 1 {
            let rebuilt = self.quotients[k]
                .mul(&self.polys[k])
                .sub(&self.polys[k + 1].scale(self.scales[k]));
            let diff = self.polys[k - 1].sub(&rebuilt);
            worst = worst.max(diff.max_abs() / self.polys[k - 1].max_abs());
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootCount {
    /// Distinct real roots.
    pub sturm_count: usize,
    /// Distinct positive roots.
    pub positive_count: usize,
    /// Sign variations of the coefficients; bounds positive roots.
    pub descartes_bound: usize,
    pub degree: usize,
    pub square_free_degree: usize,
    pub cauchy_bound: f64,
    /// Every root is real, counted with multiplicity.
    pub all_real_rooted: bool,
}

/// Counts on the exact rational values of the coefficients.
pub fn real_root_count(p: &Poly) -> Result<RootCount> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (deflated, zeros) = RatPoly::from_f64(p).deflate_zero();
    let q = exact::square_free(&deflated);
    let (chain, _, _) = exact::sturm_chain(&q);
    let at = |x: Option<bool>| {
        exact::variations(chain.iter().map(|c| match x {
            Some(positive) => c.sign_at_infinity(positive),
            None => c.sign_at(&BigRational::zero()),
        }))
    };
    let at_zero = usize::from(zeros > 0);
    let plus = at(Some(true));
    let sturm_count = at(Some(false)).saturating_sub(plus) + at_zero;
    let positive_count = at(None).saturating_sub(plus);
    let square_free_degree = q.degree() + at_zero;
    Ok(RootCount {
        sturm_count,
        positive_count,
        descartes_bound: p.sign_variations(),
        degree: p.degree(),
        square_free_degree,
        cauchy_bound: p.cauchy_bound(),
        all_real_rooted: sturm_count == square_free_degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_counts() {
        let c = real_root_count(&Poly::new(vec![-1.0, 0.0, 1.0])).unwrap();
        assert_eq!(c.sturm_count, 2);
        assert!(c.all_real_rooted);
        let c = real_root_count(&Poly::new(vec![1.0, 0.0, 1.0])).unwrap();
        assert_eq!(c.sturm_count, 0);
        assert!(!c.all_real_rooted);
        assert!(matches!(
            real_root_count(&Poly::new(vec![0.0])),
            Err(Error::ZeroPolynomial)
        ));
    }

    #[test]
    fn repeated_roots_are_real_rooted() {
        let p = Poly::from_roots(&[1.0, 1.0, -0.5, 2.0, 2.0, 2.0]);
        let c = real_root_count(&p).unwrap();
        assert_eq!(c.sturm_count, 3);
        assert_eq!(c.square_free_degree, 3);
        assert!(c.all_real_rooted);
        assert_eq!(c.positive_count, 2);
    }

    #[test]
    fn root_at_zero() {
        let p = Poly::from_roots(&[0.0, 0.5, -1.0]);
        let c = real_root_count(&p).unwrap();
        assert_eq!((c.sturm_count, c.positive_count), (3, 1));
    }

    #[test]
    fn division_round_trip() {
        let a = Poly::new(vec![1.0, -2.0, 0.5, 3.0, 1.0]);
        let b = Poly::new(vec![0.5, 1.0, 2.0]);
        let (q, r) = a.div_rem(&b);
        assert!(q.mul(&b).sub(&a).sub(&r.scale(-1.0)).max_abs() < 1e-14);
        assert!(r.degree() < b.degree());
    }

    #[test]
    fn chain_relation_holds() {
        let p =
            Poly::from_roots(&[-1.5, -0.25, 0.5, 1.0, 3.0]).mul(&Poly::new(vec![1.0, 0.0, 1.0]));
        let chain = SturmChain::new(&p).unwrap();
        assert!(chain.relation_residual() < 1e-8);
        assert_eq!(chain.distinct_real_roots(), 5);
        assert_eq!(chain.count_in(-1.0, 1.0), 3);
    }

    #[test]
    fn cauchy_bound_encloses_roots() {
        let p = Poly::from_roots(&[-7.0, 0.125, 3.5]);
        assert!(p.cauchy_bound() > 7.0);
    }
}
