//! Dense univariate polynomials over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::Rational;
use crate::error::{Error, Result};

/// Coefficients lowest degree first; the last stored coefficient is nonzero.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct UPoly {
    coeffs: Vec<Rational>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|&c| Rational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    /// `x - r`.
    pub fn linear_root(r: &Rational) -> Self {
        Self::new(vec![-r, Rational::one()])
    }

    /// Product of `x - r` over the given roots.
    pub fn from_roots(roots: &[Rational]) -> Self {
        roots
            .iter()
            .fold(Self::constant(Rational::one()), |acc, r| &acc * &Self::linear_root(r))
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Sign of the value at `x` as -1, 0 or +1.
    pub fn sign_at(&self, x: &Rational) -> i8 {
        let v = self.eval(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn derivative(&self) -> UPoly {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rational) -> UPoly {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Euclidean division; errors when `d` is zero.
    pub fn div_rem(&self, d: &UPoly) -> Result<(UPoly, UPoly)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((UPoly::zero(), self.clone()));
        }
        let inv = Rational::one() / d.lc();
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = &rem[k] * &inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                let t = &c * dc;
                rem[k - dd + j] -= t;
            }
            quot[k - dd] = c;
        }
        rem.truncate(dd);
        Ok((UPoly::new(quot), UPoly::new(rem)))
    }

    pub fn rem(&self, d: &UPoly) -> Result<UPoly> {
        Ok(self.div_rem(d)?.1)
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r.primitive();
        }
        a.monic()
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(Rational::one() / self.lc()))
    }

    /// Integer multiple with coprime coefficients and positive leading coefficient.
    pub fn primitive(&self) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in &self.coeffs {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut f = Rational::new(den_lcm, num_gcd);
        if self.lc().is_negative() {
            f = -f;
        }
        self.scale(&f)
    }

    /// `p / gcd(p, p')`, primitive: same real roots, each simple.
    pub fn square_free_part(&self) -> Result<UPoly> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial("square_free_part"));
        }
        if self.degree() == Some(0) {
            return Ok(UPoly::constant(Rational::one()));
        }
        let g = self.gcd(&self.derivative());
        let (q, _) = self.div_rem(&g)?;
        Ok(q.primitive())
    }

    /// Bound `B` with every real root in `(-B, B)`: `1 + max |a_i / a_d|`.
    pub fn cauchy_bound(&self) -> Rational {
        let lc = self.lc().abs();
        let n = self.coeffs.len().saturating_sub(1);
        let m = self.coeffs[..n]
            .iter()
            .map(|c| c.abs() / &lc)
            .max()
            .unwrap_or_else(Rational::zero);
        m + Rational::one()
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    f.write_str("x")?;
                    if k > 1 {
                        write!(f, "^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn zip_with(a: &UPoly, b: &UPoly, op: impl Fn(&Rational, &Rational) -> Rational) -> UPoly {
    let n = a.coeffs.len().max(b.coeffs.len());
    let zero = Rational::zero();
    UPoly::new(
        (0..n)
            .map(|i| {
                op(
                    a.coeffs.get(i).unwrap_or(&zero),
                    b.coeffs.get(i).unwrap_or(&zero),
                )
            })
            .collect(),
    )
}

impl Add for &UPoly {
    type Output = UPoly;
    fn add(self, rhs: &UPoly) -> UPoly {
        zip_with(self, rhs, |a, b| a + b)
    }
}

impl Sub for &UPoly {
    type Output = UPoly;
    fn sub(self, rhs: &UPoly) -> UPoly {
        zip_with(self, rhs, |a, b| a - b)
    }
}

impl Mul for &UPoly {
    type Output = UPoly;
    fn mul(self, rhs: &UPoly) -> UPoly {
        if self.is_zero() || rhs.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UPoly::new(out)
    }
}

impl Neg for &UPoly {
    type Output = UPoly;
    fn neg(self) -> UPoly {
        UPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}
