//! Dense univariate polynomials with real coefficients.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Polynomial stored as ascending coefficients: `coeffs[j]` multiplies `x^j`.
///
/// Trailing (near-)zero coefficients are trimmed on construction so that the
/// leading coefficient is nonzero, except for the zero polynomial which is
/// kept as the single coefficient `[0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Real> Polynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == T::zero() {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(T::zero());
        }
        Polynomial { coeffs }
    }

    pub fn from_f64(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| T::of(c)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: vec![T::zero()] }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == T::zero()
    }

    pub fn leading(&self) -> T {
        *self.coeffs.last().unwrap()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: T) -> T {
        let mut acc = T::zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// j-th derivative; over-differentiation yields the zero polynomial.
    pub fn derivative(&self, j: usize) -> Polynomial<T> {
        if j == 0 {
            return self.clone();
        }
        if j > self.degree() {
            return Polynomial::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - j);
        for (k, &c) in self.coeffs.iter().enumerate().skip(j) {
            // falling factorial k (k-1) ... (k-j+1)
            let mut f = T::one();
            for i in 0..j {
                f = f * T::of_usize(k - i);
            }
            out.push(c * f);
        }
        Polynomial::new(out)
    }

    /// Taylor shift: returns q with q(x) = p(x + a).
    pub fn shifted(&self, a: T) -> Polynomial<T> {
        // synthetic division by (x - (-a)) repeated
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n.saturating_sub(1) {
            for k in (i..n - 1).rev() {
                let next = c[k + 1];
                c[k] = c[k] + next * a;
            }
        }
        Polynomial::new(c)
    }

    pub fn scale(&self, s: T) -> Polynomial<T> {
        Polynomial::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn add(&self, other: &Polynomial<T>) -> Polynomial<T> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![T::zero(); n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, &c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Polynomial::new(out)
    }

    pub fn mul(&self, other: &Polynomial<T>) -> Polynomial<T> {
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// Largest coefficient magnitude, used to scale tolerances.
    pub fn coeff_scale(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |m, &c| m.max(c.abs()))
    }

    /// Validates the domain-polynomial normal form: even degree >= 4 and a
    /// positive leading coefficient.
    pub fn validate_domain(&self) -> Result<()> {
        let d = self.degree();
        if d < 4 {
            return Err(Error::InvalidDomainPolynomial(format!(
                "degree {} < 4",
                d
            )));
        }
        if d % 2 != 0 {
            return Err(Error::InvalidDomainPolynomial(format!(
                "degree {} is odd",
                d
            )));
        }
        if self.leading() <= T::zero() {
            return Err(Error::InvalidDomainPolynomial(
                "leading coefficient is not positive".into(),
            ));
        }
        Ok(())
    }

    /// Half the degree of a valid domain polynomial.
    pub fn half_degree(&self) -> usize {
        self.degree() / 2
    }

    /// Maximal closed intervals on which p'' >= 0, endpoints at sign changes
    /// of p''. Infinite endpoints are represented by +/- infinity.
    pub fn convexity_intervals(&self) -> Vec<(T, T)> {
        let pdd = self.derivative(2);
        if pdd.is_zero() {
            // affine: convex everywhere
            return vec![(T::neg_infinity(), T::infinity())];
        }
        if pdd.degree() == 0 {
            return if pdd.coeffs[0] > T::zero() {
                vec![(T::neg_infinity(), T::infinity())]
            } else {
                vec![]
            };
        }
        let roots = crate::roots::real_roots(&pdd, T::of(1e-10)).expect("nonzero p''");
        // sign-change points: odd multiplicity roots
        let mut cuts: Vec<T> = Vec::new();
        for &(r, m) in roots.real_roots() {
            if m % 2 == 1 {
                cuts.push(r);
            }
        }
        let mut intervals = Vec::new();
        let probe = |a: T, b: T| -> T {
            // sample point interior to (a, b)
            if a.is_infinite() && b.is_infinite() {
                T::zero()
            } else if a.is_infinite() {
                b - T::one()
            } else if b.is_infinite() {
                a + T::one()
            } else {
                (a + b) * T::of(0.5)
            }
        };
        let mut lo = T::neg_infinity();
        for i in 0..=cuts.len() {
            let hi = if i < cuts.len() { cuts[i] } else { T::infinity() };
            if pdd.eval(probe(lo, hi)) >= T::zero() {
                intervals.push((lo, hi));
            }
            lo = hi;
        }
        // merge adjacent intervals sharing an endpoint (even-multiplicity
        // touching points do not split convexity regions)
        let mut merged: Vec<(T, T)> = Vec::new();
        for (a, b) in intervals {
            if let Some(last) = merged.last_mut() {
                if last.1 == a {
                    last.1 = b;
                    continue;
                }
            }
            merged.push((a, b));
        }
        merged
    }

    /// Maximal open intervals on which p'' < 0 (complement of the convexity
    /// intervals, clipped to where p'' is genuinely negative).
    pub fn concavity_intervals(&self) -> Vec<(T, T)> {
        let convex = self.convexity_intervals();
        if convex.is_empty() {
            return vec![(T::neg_infinity(), T::infinity())];
        }
        let mut out = Vec::new();
        if convex[0].0 > T::neg_infinity() {
            out.push((T::neg_infinity(), convex[0].0));
        }
        for w in convex.windows(2) {
            out.push((w[0].1, w[1].0));
        }
        if convex.last().unwrap().1 < T::infinity() {
            out.push((convex.last().unwrap().1, T::infinity()));
        }
        out
    }

    pub fn is_convex(&self) -> bool {
        self.concavity_intervals().is_empty()
    }
}

impl<T: Real> fmt::Display for Polynomial<T> {
    /// Comma-separated ascending coefficients, the CLI text format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", c)?;
        }
        Ok(())
    }
}

impl<T: Real> FromStr for Polynomial<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut coeffs = Vec::new();
        for tok in s.split(',') {
            let tok = tok.trim();
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::ParseError(format!("bad coefficient {:?}", tok)))?;
            coeffs.push(T::of(v));
        }
        if coeffs.is_empty() {
            return Err(Error::ParseError("empty coefficient list".into()));
        }
        Ok(Polynomial::new(coeffs))
    }
}
