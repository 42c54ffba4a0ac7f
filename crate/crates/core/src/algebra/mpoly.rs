//! Sparse multivariate polynomials over the rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::{bits, Rational};
use super::upoly::UPoly;
use crate::error::{Error, Result};

/// Exponent vector, one entry per variable of the owning polynomial.
pub type Monomial = Vec<u32>;

/// A polynomial in variables `x0 .. x(nvars-1)`.
///
/// Terms live in a `BTreeMap` keyed by exponent vector, so two polynomials
/// over the same variable count are equal exactly when their maps are equal.
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    /// The polynomial `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable {i} out of range for {nvars} variables");
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Rational::one())
    }

    pub fn monomial(exps: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(exps.len());
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging repeats.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::VariableMismatch {
                    left: nvars,
                    right: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    /// Value of a constant polynomial, `None` if any variable occurs.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_constant() {
            Some(self.constant_term())
        } else {
            None
        }
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&vec![0; self.nvars])
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Leading term in lexicographic order with `x0` most significant.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    /// Highest-index variable that occurs, `None` for constants.
    pub fn main_var(&self) -> Option<usize> {
        (0..self.nvars).rev().find(|&v| self.uses_var(v))
    }

    pub fn max_coeff_bits(&self) -> u64 {
        self.terms.values().map(bits).max().unwrap_or(0)
    }

    fn check_vars(&self, other: &MPoly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VariableMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &MPoly) -> Result<MPoly> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &MPoly) -> Result<MPoly> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &MPoly) -> Result<MPoly> {
        self.check_vars(other)?;
        let mut out = MPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Monomial = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, a)| (e.clone(), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, mut k: u32) -> MPoly {
        let mut base = self.clone();
        let mut acc = MPoly::one(self.nvars);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.add_term(e2, c * Rational::from_integer(BigInt::from(e[var])));
        }
        out
    }

    /// Coefficients with respect to `var`, lowest power first. Each
    /// coefficient keeps the full variable count with `var` absent.
    pub fn coeffs_in(&self, var: usize) -> Vec<MPoly> {
        let d = self.degree_in(var) as usize;
        let mut out = vec![MPoly::zero(self.nvars); if self.is_zero() { 0 } else { d + 1 }];
        for (e, c) in &self.terms {
            let k = e[var] as usize;
            let mut e2 = e.clone();
            e2[var] = 0;
            out[k].terms.insert(e2, c.clone());
        }
        out
    }

    /// Inverse of [`MPoly::coeffs_in`].
    pub fn from_coeffs_in(nvars: usize, var: usize, coeffs: &[MPoly]) -> MPoly {
        let mut out = MPoly::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            for (e, a) in &c.terms {
                let mut e2 = e.clone();
                e2[var] += k as u32;
                out.add_term(e2, a.clone());
            }
        }
        out
    }

    pub fn leading_coeff_in(&self, var: usize) -> MPoly {
        self.coeffs_in(var).pop().unwrap_or_else(|| MPoly::zero(self.nvars))
    }

    /// Replaces `var` by the polynomial `value`.
    pub fn substitute(&self, var: usize, value: &MPoly) -> Result<MPoly> {
        self.check_vars(value)?;
        let coeffs = self.coeffs_in(var);
        let mut acc = MPoly::zero(self.nvars);
        for c in coeffs.iter().rev() {
            acc = &(&acc * value) + c;
        }
        Ok(acc)
    }

    /// Replaces `var` by a rational constant; the variable count is kept.
    pub fn specialize(&self, var: usize, value: &Rational) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        let mut powers: Vec<Rational> = vec![Rational::one()];
        for (e, c) in &self.terms {
            let k = e[var] as usize;
            while powers.len() <= k {
                let next = powers.last().unwrap() * value;
                powers.push(next);
            }
            let mut e2 = e.clone();
            e2[var] = 0;
            out.add_term(e2, c * &powers[k]);
        }
        out
    }

    /// Exact value at `point`, which must assign every variable that occurs.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        if let Some(v) = self.main_var() {
            if v >= point.len() {
                return Err(Error::MissingAssignment(v));
            }
        }
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            total += t;
        }
        Ok(total)
    }

    /// Exact quotient `self / d` when `d` divides `self`, otherwise `None`.
    pub fn div_exact(&self, d: &MPoly) -> Option<MPoly> {
        if d.is_zero() || self.nvars != d.nvars {
            return None;
        }
        let (dm, dc) = d.leading_term().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = MPoly::zero(self.nvars);
        while let Some((rm, rc)) = rem.leading_term() {
            if rm.iter().zip(&dm).any(|(a, b)| a < b) {
                return None;
            }
            let qm: Monomial = rm.iter().zip(&dm).map(|(a, b)| a - b).collect();
            let qc = rc / &dc;
            for (e, c) in &d.terms {
                let m: Monomial = e.iter().zip(&qm).map(|(a, b)| a + b).collect();
                rem.add_term(m, -(c * &qc));
            }
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Positive rational multiple with coprime integer coefficients.
    /// Signs are unchanged, so sign conditions on the result are equivalent.
    pub fn primitive_positive(&self) -> MPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let factor = Rational::new(den_lcm, num_gcd.abs());
        self.scale(&factor)
    }

    /// Primitive integer multiple with positive leading coefficient. Only the
    /// zero set is preserved; used to deduplicate projection factors.
    pub fn normalized(&self) -> MPoly {
        let p = self.primitive_positive();
        match p.leading_term() {
            Some((_, c)) if c.is_negative() => -&p,
            _ => p,
        }
    }

    /// Univariate view when only `var` occurs.
    pub fn to_upoly(&self, var: usize) -> Option<UPoly> {
        let coeffs = self.coeffs_in(var);
        let mut out = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            out.push(c.as_constant()?);
        }
        Some(UPoly::new(out))
    }

    pub fn from_upoly(nvars: usize, var: usize, p: &UPoly) -> MPoly {
        let mut out = MPoly::zero(nvars);
        for (k, c) in p.coeffs().iter().enumerate() {
            let mut e = vec![0; nvars];
            e[var] = k as u32;
            out.add_term(e, c.clone());
        }
        out
    }

    /// Re-embeds into `nvars` variables (must not drop an occurring variable).
    pub fn with_nvars(&self, nvars: usize) -> Result<MPoly> {
        if let Some(v) = self.main_var() {
            if v >= nvars {
                return Err(Error::VariableMismatch {
                    left: self.nvars,
                    right: nvars,
                });
            }
        }
        let mut out = MPoly::zero(nvars);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; nvars];
            for (i, &k) in e.iter().enumerate().take(nvars) {
                e2[i] = k;
            }
            out.terms.insert(e2, c.clone());
        }
        Ok(out)
    }

    /// Renames variables: `map[i]` is the new index of variable `i`, or
    /// `None` for a variable that must not occur.
    pub fn remap(&self, map: &[Option<usize>], nvars: usize) -> Result<MPoly> {
        let mut out = MPoly::zero(nvars);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; nvars];
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                match map.get(i).copied().flatten() {
                    Some(j) => e2[j] += k,
                    None => return Err(Error::MissingAssignment(i)),
                }
            }
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    /// Renders with the given variable names.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        Pretty { p: self, names }
    }
}

struct Pretty<'a> {
    p: &'a MPoly,
    names: &'a [String],
}

impl fmt::Display for Pretty<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.p.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let a = c.abs();
            let is_unit_monomial = e.iter().all(|&k| k == 0);
            if !a.is_one() || is_unit_monomial {
                write!(f, "{a}")?;
                if !is_unit_monomial {
                    f.write_str("*")?;
                }
            }
            let mut first = true;
            for (v, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                match self.names.get(v) {
                    Some(n) => f.write_str(n)?,
                    None => write!(f, "x{v}")?,
                }
                if k > 1 {
                    write!(f, "^{k}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&[]))
    }
}

// Operator forms panic on mismatched variable counts; use the `try_*`
// methods where the operands come from different sources.
impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        self.try_add(rhs).expect("MPoly add")
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        self.try_sub(rhs).expect("MPoly sub")
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        self.try_mul(rhs).expect("MPoly mul")
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Add for MPoly {
    type Output = MPoly;
    fn add(self, rhs: MPoly) -> MPoly {
        &self + &rhs
    }
}

impl Sub for MPoly {
    type Output = MPoly;
    fn sub(self, rhs: MPoly) -> MPoly {
        &self - &rhs
    }
}

impl Mul for MPoly {
    type Output = MPoly;
    fn mul(self, rhs: MPoly) -> MPoly {
        &self * &rhs
    }
}

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    fn q(i: usize) -> MPoly {
        MPoly::var(2, i)
    }

    fn c(v: Rational) -> MPoly {
        MPoly::constant(2, v)
    }

    #[test]
    fn monomial_product() {
        let sq = &q(0) * &q(0);
        assert_eq!(sq, MPoly::monomial(vec![2, 0], int(1)));
    }

    #[test]
    fn simplex_elimination_identity() {
        let sum = &q(0) + &q(1);
        let one_minus = &c(int(1)) - &q(0);
        assert_eq!(sum.substitute(1, &one_minus).unwrap(), MPoly::one(2));
    }

    #[test]
    fn power_rule() {
        let p = &(&q(0) * &q(0)) - &c(int(2));
        assert_eq!(p.derivative(0), q(0).scale(&int(2)));
    }

    #[test]
    fn eval_examples() {
        let x = MPoly::var(1, 0);
        let one = MPoly::one(1);
        let p = &(&(&x * &x) - &x.scale(&int(2))) + &one;
        assert_eq!(p.eval(&[int(1)]).unwrap(), int(0));

        let s = &(&c(int(1)) - &q(0)) - &q(1);
        assert_eq!(s.eval(&[rat(1, 3), rat(1, 3)]).unwrap(), rat(1, 3));

        let t = (&one - &x).pow(2);
        assert_eq!(t.eval(&[rat(3, 10)]).unwrap(), rat(49, 100));
    }

    #[test]
    fn eval_missing_assignment() {
        let s = &q(0) + &q(1);
        assert_eq!(s.eval(&[int(1)]), Err(Error::MissingAssignment(1)));
    }

    #[test]
    fn mismatched_orders_are_rejected() {
        let a = MPoly::var(1, 0);
        let b = MPoly::var(2, 1);
        assert!(matches!(
            a.try_add(&b),
            Err(Error::VariableMismatch { left: 1, right: 2 })
        ));
        assert!(a.try_mul(&b).is_err());
        assert!(a.substitute(0, &b).is_err());
    }

    #[test]
    fn exact_division() {
        let a = &q(0) - &q(1);
        let b = &(&q(0) + &q(1)) + &c(int(3));
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(prod.div_exact(&b), Some(a.clone()));
        assert_eq!(b.div_exact(&a), None);
    }

    #[test]
    fn coefficient_view_round_trips() {
        let p = &(&(&q(0) * &q(1)) * &q(1)) + &(&q(0) - &c(rat(1, 2)));
        let cs = p.coeffs_in(1);
        assert_eq!(cs.len(), 3);
        assert_eq!(cs[2], q(0));
        assert_eq!(MPoly::from_coeffs_in(2, 1, &cs), p);
    }

    #[test]
    fn normalization_keeps_zero_set() {
        let p = &q(0).scale(&rat(-2, 3)) + &c(rat(4, 9));
        let n = p.normalized();
        assert_eq!(n, &q(0).scale(&int(3)) - &c(int(2)));
        assert_eq!(p.primitive_positive(), &c(int(2)) - &q(0).scale(&int(3)));
    }

    #[test]
    fn display() {
        let p = &(&q(0) * &q(0)) - &q(1).scale(&rat(1, 2));
        let names = vec!["q1".to_string(), "q2".to_string()];
        assert_eq!(p.display_with(&names).to_string(), "q1^2 - 1/2*q2");
    }
}
