//! Rational polynomial arithmetic. Every finite `f64` is a dyadic rational,
//! so chains built here are exact for the given coefficients.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::poly::Poly;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RatPoly {
    /// Ascending; no trailing zeros except for the zero polynomial `[]`.
    c: Vec<BigRational>,
}

impl RatPoly {
    fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        Self { c }
    }

    pub(crate) fn from_f64(p: &Poly) -> Self {
        Self::new(
            p.coeffs
                .iter()
                .map(|&x| BigRational::from_float(x).expect("finite coefficient"))
                .collect(),
        )
    }

    pub(crate) fn to_f64(&self) -> Poly {
        if self.c.is_empty() {
            return Poly::new(vec![0.0]);
        }
        Poly::new(
            self.c
                .iter()
                .map(|x| x.to_f64().unwrap_or(f64::NAN))
                .collect(),
        )
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub(crate) fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    fn leading(&self) -> &BigRational {
        self.c.last().expect("nonzero polynomial")
    }

    pub(crate) fn max_abs(&self) -> BigRational {
        self.c
            .iter()
            .map(Signed::abs)
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    pub(crate) fn scale(&self, k: &BigRational) -> Self {
        Self::new(self.c.iter().map(|x| x * k).collect())
    }

    pub(crate) fn derivative(&self) -> Self {
        Self::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, x)| x * BigRational::from_integer(k.into()))
                .collect(),
        )
    }

    /// Divides out `x^k`; returns the quotient and `k`.
    pub(crate) fn deflate_zero(&self) -> (Self, usize) {
        let k = self.c.iter().take_while(|x| x.is_zero()).count();
        (Self::new(self.c[k..].to_vec()), k)
    }

    pub(crate) fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree();
        if self.is_zero() || self.degree() < dd {
            return (Self::new(Vec::new()), self.clone());
        }
        let lead = d.leading();
        let mut rem = self.c.clone();
        let mut quot = vec![BigRational::zero(); self.degree() - dd + 1];
        for k in (0..quot.len()).rev() {
            let q = &rem[k + dd] / lead;
            for (i, x) in d.c.iter().enumerate() {
                rem[k + i] -= &q * x;
            }
            quot[k] = q;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    fn monic(&self) -> Self {
        let inv = self.leading().recip();
        self.scale(&inv)
    }

    /// Sign of `p(x)`.
    pub(crate) fn sign_at(&self, x: &BigRational) -> Ordering {
        let v = self
            .c
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, a| acc * x + a);
        v.cmp(&BigRational::zero())
    }

    /// Sign of `p(x)` as `x → ±∞`.
    pub(crate) fn sign_at_infinity(&self, positive: bool) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        let s = self.leading().cmp(&BigRational::zero());
        if positive || self.degree().is_multiple_of(2) {
            s
        } else {
            s.reverse()
        }
    }
}

pub(crate) fn gcd(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let (_, r) = a.div_rem(&b);
        a = b;
        b = r;
    }
    if a.is_zero() {
        a
    } else {
        a.monic()
    }
}

/// `p / gcd(p, p')`.
pub(crate) fn square_free(p: &RatPoly) -> RatPoly {
    if p.degree() == 0 {
        return p.clone();
    }
    let g = gcd(p, &p.derivative());
    p.div_rem(&g).0
}

/// Chain `p_0 = p`, `p_1 = p'`, `p_{k+1} = −rem(p_{k−1}, p_k) / c_k` with
/// `c_k` the largest remainder coefficient; also returns quotients and `c_k`.
pub(crate) fn sturm_chain(p: &RatPoly) -> (Vec<RatPoly>, Vec<RatPoly>, Vec<BigRational>) {
    let mut polys = vec![p.clone()];
    let mut quotients = vec![RatPoly::new(Vec::new())];
    let mut scales = vec![BigRational::zero()];
    if p.degree() == 0 {
        return (polys, quotients, scales);
    }
    polys.push(p.derivative());
    loop {
        let k = polys.len() - 1;
        if polys[k].degree() == 0 {
            break;
        }
        let (q, r) = polys[k - 1].div_rem(&polys[k]);
        if r.is_zero() {
            break;
        }
        let c = r.max_abs();
        let next = r.scale(&(-c.recip()));
        quotients.push(q);
        scales.push(c);
        polys.push(next);
    }
    (polys, quotients, scales)
}

pub(crate) fn variations(signs: impl Iterator<Item = Ordering>) -> usize {
    let mut last = Ordering::Equal;
    let mut count = 0;
    for s in signs {
        if s == Ordering::Equal {
            continue;
        }
        if last != Ordering::Equal && s != last {
            count += 1;
        }
        last = s;
    }
    count
}
