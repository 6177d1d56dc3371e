//! Integer polynomials: exact division, content normalization and cyclotomic
//! polynomials.
//!
//! Used by the balance test to classify minimal annihilators of length
//! sequences: a sequence is eventually periodic exactly when its annihilator,
//! after stripping powers of `z`, divides some `1 − z^p`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A polynomial with integer coefficients, stored in ascending degree order.
/// The zero polynomial has no coefficients; otherwise the leading coefficient
/// is nonzero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    /// Build from ascending coefficients, trimming trailing zeros.
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPolynomial { coeffs: vec![BigInt::one()] }
    }

    /// The monomial `c·z^k`.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        if c.is_zero() {
            return IntPolynomial::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c;
        IntPolynomial { coeffs }
    }

    /// `1 − z^p`.
    pub fn one_minus_z_to(p: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); p + 1];
        coeffs[0] = BigInt::one();
        coeffs[p] = -BigInt::one();
        IntPolynomial::new(coeffs)
    }

    /// `z^p − 1`.
    pub fn z_to_minus_one(p: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); p + 1];
        coeffs[0] = -BigInt::one();
        coeffs[p] = BigInt::one();
        IntPolynomial::new(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        IntPolynomial::new(coeffs)
    }

    pub fn sub(&self, other: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - other.coeff(k)).collect();
        IntPolynomial::new(coeffs)
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || other.is_zero() {
            return IntPolynomial::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        IntPolynomial::new(coeffs)
    }

    /// The gcd of the coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        g
    }

    /// Divide out the content and normalize the leading coefficient to be
    /// positive. The zero polynomial is returned unchanged.
    pub fn primitive_part(&self) -> IntPolynomial {
        let g = self.content();
        if g.is_zero() {
            return self.clone();
        }
        let mut coeffs: Vec<BigInt> = self.coeffs.iter().map(|c| c / &g).collect();
        if coeffs.last().is_some_and(|c| c.is_negative()) {
            for c in &mut coeffs {
                *c = -&*c;
            }
        }
        IntPolynomial::new(coeffs)
    }

    /// Split `self = z^s · rest` with `rest(0) ≠ 0`; returns `(s, rest)`.
    /// The zero polynomial yields `(0, 0)`.
    pub fn strip_z_power(&self) -> (usize, IntPolynomial) {
        if self.is_zero() {
            return (0, IntPolynomial::zero());
        }
        let s = self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0);
        (s, IntPolynomial::new(self.coeffs[s..].to_vec()))
    }

    /// Exact division in ℤ[z]: returns the quotient if `divisor` divides
    /// `self` with an integer-coefficient quotient, else `None`.
    pub fn div_exact(&self, divisor: &IntPolynomial) -> Option<IntPolynomial> {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(IntPolynomial::zero());
        }
        let deg_n = self.degree().unwrap();
        let deg_d = divisor.degree().unwrap();
        if deg_n < deg_d {
            return None;
        }
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); deg_n - deg_d + 1];
        for k in (0..quot.len()).rev() {
            let top = rem[k + deg_d].clone();
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(&lead);
            if !r.is_zero() {
                return None;
            }
            quot[k] = q.clone();
            for (i, d) in divisor.coeffs.iter().enumerate() {
                rem[k + i] -= &q * d;
            }
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(IntPolynomial::new(quot))
    }

    /// Evaluate at an integer point.
    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

impl From<&[i64]> for IntPolynomial {
    fn from(coeffs: &[i64]) -> Self {
        IntPolynomial::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for k in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[k];
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "z")?,
                (1, false) => write!(f, "{mag}*z")?,
                (_, true) => write!(f, "z^{k}")?,
                (_, false) => write!(f, "{mag}*z^{k}")?,
            }
        }
        Ok(())
    }
}

/// Memoized supply of cyclotomic polynomials, computed by dividing `z^d − 1`
/// by the cyclotomic polynomials of the proper divisors of `d`.
#[derive(Default)]
pub struct CyclotomicTable {
    memo: HashMap<usize, IntPolynomial>,
}

impl CyclotomicTable {
    pub fn new() -> Self {
        CyclotomicTable::default()
    }

    /// The `d`-th cyclotomic polynomial.
    pub fn get(&mut self, d: usize) -> IntPolynomial {
        assert!(d >= 1, "cyclotomic index must be positive");
        if let Some(p) = self.memo.get(&d) {
            return p.clone();
        }
        let mut acc = IntPolynomial::z_to_minus_one(d);
        for e in 1..=d / 2 {
            if d % e == 0 {
                let phi_e = self.get(e);
                acc = acc
                    .div_exact(&phi_e)
                    .expect("cyclotomic polynomials divide z^d - 1 exactly");
            }
        }
        self.memo.insert(d, acc.clone());
        acc
    }
}

/// The `d`-th cyclotomic polynomial.
pub fn cyclotomic(d: usize) -> IntPolynomial {
    CyclotomicTable::new().get(d)
}
