//! Real roots of univariate rational polynomials: Sturm chains, root
//! counting, isolation, refinement and exact sign determination at
//! real algebraic numbers.

use std::fmt;

use num_traits::Signed;

use crate::algebra::rational::{format_rational, midpoint, Rational};
use crate::algebra::UPoly;
use crate::error::{Error, Result};

/// Sturm chain `p, p', -rem(p, p'), ...` ending at the last nonzero remainder.
pub fn sturm_sequence(p: &UPoly) -> Result<Vec<UPoly>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial("sturm_sequence"));
    }
    let mut seq = vec![p.clone()];
    let mut b = p.derivative();
    while !b.is_zero() {
        let r = seq.last().unwrap().rem(&b)?;
        seq.push(b);
        b = -&r;
    }
    Ok(seq)
}

/// Sign variations of the chain at `x`, zeros skipped.
pub fn variations(seq: &[UPoly], x: &Rational) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for s in seq {
        let v = s.sign_at(x);
        if v != 0 {
            if last != 0 && v != last {
                count += 1;
            }
            last = v;
        }
    }
    count
}

/// Number of distinct real roots of `p` in the open interval `(a, b)`.
pub fn count_roots_in(p: &UPoly, a: &Rational, b: &Rational) -> Result<usize> {
    if a >= b {
        return Err(Error::InvalidInput(format!(
            "empty interval ({}, {})",
            format_rational(a),
            format_rational(b)
        )));
    }
    for x in [a, b] {
        if p.sign_at(x) == 0 {
            return Err(Error::RootAtEndpoint(format_rational(x)));
        }
    }
    let seq = sturm_sequence(p)?;
    Ok(variations(&seq, a) - variations(&seq, b))
}

/// A real root of a square-free rational polynomial.
///
/// Either `lo == hi` and the root is that rational, or `lo < hi`, the
/// polynomial is nonzero at both endpoints and has exactly one root
/// strictly between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraicNumber {
    poly: UPoly,
    lo: Rational,
    hi: Rational,
}

impl AlgebraicNumber {
    /// Checks the isolation invariant; `poly` is made square-free first.
    pub fn new(poly: &UPoly, lo: Rational, hi: Rational) -> Result<Self> {
        let poly = poly.square_free_part()?;
        if lo == hi {
            if poly.sign_at(&lo) != 0 {
                return Err(Error::InvalidInput("degenerate interval is not a root".into()));
            }
        } else if count_roots_in(&poly, &lo, &hi)? != 1 {
            return Err(Error::InvalidInput(
                "interval does not isolate exactly one root".into(),
            ));
        }
        Ok(AlgebraicNumber { poly, lo, hi })
    }

    pub fn from_rational(r: Rational) -> Self {
        AlgebraicNumber {
            poly: UPoly::linear_root(&r),
            lo: r.clone(),
            hi: r,
        }
    }

    pub fn poly(&self) -> &UPoly {
        &self.poly
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// The exact value when the isolating interval has collapsed to a point.
    pub fn as_rational(&self) -> Option<&Rational> {
        (self.lo == self.hi).then_some(&self.lo)
    }

    /// Does the closed isolating interval contain `x`?
    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// One bisection step; collapses to a point if the midpoint is the root.
    fn bisect(&mut self) {
        if self.lo == self.hi {
            return;
        }
        let mid = midpoint(&self.lo, &self.hi);
        let sm = self.poly.sign_at(&mid);
        if sm == 0 {
            self.lo = mid.clone();
            self.hi = mid;
        } else if sm == self.poly.sign_at(&self.lo) {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(r) => write!(f, "{}", format_rational(r)),
            None => write!(
                f,
                "root of {} in ({}, {})",
                self.poly,
                format_rational(&self.lo),
                format_rational(&self.hi)
            ),
        }
    }
}

/// Isolating intervals for the distinct real roots of `p`, sorted.
///
/// Bisection of the Cauchy interval driven by Sturm counts. A midpoint that
/// hits a root yields an exact rational root; the neighbouring intervals are
/// pulled away from it by halving offsets until they exclude it.
pub fn isolate_real_roots(p: &UPoly) -> Result<Vec<AlgebraicNumber>> {
    let sqf = p.square_free_part()?;
    if sqf.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let seq = sturm_sequence(&sqf)?;
    let bound = sqf.cauchy_bound().ceil();
    let lo = -bound.clone();
    let total = variations(&seq, &lo) - variations(&seq, &bound);
    let mut stack = vec![(lo, bound, total)];
    let mut out = Vec::new();
    while let Some((a, b, count)) = stack.pop() {
        if count == 0 {
            continue;
        }
        let mid = midpoint(&a, &b);
        let mid_is_root = sqf.sign_at(&mid) == 0;
        if count == 1 && !mid_is_root {
            out.push(AlgebraicNumber {
                poly: sqf.clone(),
                lo: a,
                hi: b,
            });
            continue;
        }
        if !mid_is_root {
            let vm = variations(&seq, &mid);
            stack.push((a.clone(), mid.clone(), variations(&seq, &a) - vm));
            stack.push((mid, b.clone(), vm - variations(&seq, &b)));
            continue;
        }
        out.push(AlgebraicNumber {
            poly: sqf.clone(),
            lo: mid.clone(),
            hi: mid.clone(),
        });
        if count == 1 {
            continue;
        }
        let mut eps = (&b - &a) / Rational::from_integer(4.into());
        loop {
            let l = &mid - &eps;
            let r = &mid + &eps;
            if sqf.sign_at(&l) != 0
                && sqf.sign_at(&r) != 0
                && variations(&seq, &l) - variations(&seq, &r) == 1
            {
                let va = variations(&seq, &a);
                let vl = variations(&seq, &l);
                let vr = variations(&seq, &r);
                let vb = variations(&seq, &b);
                stack.push((a.clone(), l, va - vl));
                stack.push((r, b.clone(), vr - vb));
                break;
            }
            eps /= Rational::from_integer(2.into());
        }
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    Ok(out)
}

/// Same root with an isolating interval no wider than `width`.
pub fn refine(alpha: &AlgebraicNumber, width: &Rational) -> Result<AlgebraicNumber> {
    if !width.is_positive() {
        return Err(Error::InvalidInput("refinement width must be positive".into()));
    }
    let mut a = alpha.clone();
    while &a.width() > width {
        a.bisect();
    }
    Ok(a)
}

/// Exact sign of `q(alpha)`.
///
/// Zero is detected through `gcd(q, poly)`; otherwise the interval is
/// refined until `q` has no root in it, and the sign is read at an endpoint.
pub fn sign_at(q: &UPoly, alpha: &AlgebraicNumber) -> Result<i8> {
    if q.is_zero() {
        return Err(Error::ZeroPolynomial("sign_at"));
    }
    if let Some(r) = alpha.as_rational() {
        return Ok(q.sign_at(r));
    }
    let g = q.gcd(&alpha.poly);
    if g.degree().unwrap_or(0) > 0 && count_roots_in(&g, &alpha.lo, &alpha.hi)? == 1 {
        return Ok(0);
    }
    let qs = q.square_free_part()?;
    let qseq = sturm_sequence(&qs)?;
    let mut a = alpha.clone();
    loop {
        if let Some(r) = a.as_rational() {
            return Ok(q.sign_at(r));
        }
        let (sl, sh) = (qs.sign_at(&a.lo), qs.sign_at(&a.hi));
        if sl != 0 && sh != 0 && variations(&qseq, &a.lo) == variations(&qseq, &a.hi) {
            return Ok(q.sign_at(&a.lo));
        }
        a.bisect();
    }
}
