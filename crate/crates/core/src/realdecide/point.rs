//! Sample points whose coordinates are rational or real algebraic over the
//! preceding coordinates, with exact sign evaluation of polynomials.
//!
//! Coordinate `v` is either a rational or the unique root of
//! `F(x0..x(v-1), xv)` (earlier coordinates substituted) in an open interval
//! `(lo, hi)` with `F` nonzero at both endpoints. The sign of `g` at the
//! point is the Tarski query of `g` against `F` on that interval: the
//! variation difference of the signed remainder sequence of `F` and
//! `F' * g`, whose entries are evaluated at rational endpoints and signed
//! recursively at the shorter point.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use crate::algebra::rational::{midpoint, sign as rsign, Rational};
use crate::algebra::{MPoly, UPoly};
use crate::error::Result;

/// A polynomial in one variable with coefficients in the lower variables,
/// lowest power first.
pub(crate) type Fiber = Vec<MPoly>;

#[derive(Clone, Debug)]
pub enum Coord {
    Rational(Rational),
    Algebraic(RootCoord),
}

#[derive(Clone, Debug)]
pub struct RootCoord {
    poly: MPoly,
    /// Sturm chain of `poly` over the earlier coordinates.
    chain: Vec<Fiber>,
    lo: Rational,
    hi: Rational,
}

impl Coord {
    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Coord::Rational(r) => Some(r),
            Coord::Algebraic(_) => None,
        }
    }

    /// Closed enclosing interval.
    pub fn bounds(&self) -> (Rational, Rational) {
        match self {
            Coord::Rational(r) => (r.clone(), r.clone()),
            Coord::Algebraic(a) => (a.lo.clone(), a.hi.clone()),
        }
    }
}

/// A root found while isolating over a point: exact, or isolated by `(lo, hi)`.
#[derive(Clone, Debug)]
pub enum FiberRoot {
    Exact(Rational),
    Isolated { lo: Rational, hi: Rational },
}

impl FiberRoot {
    fn left(&self) -> &Rational {
        match self {
            FiberRoot::Exact(r) => r,
            FiberRoot::Isolated { lo, .. } => lo,
        }
    }

    fn right(&self) -> &Rational {
        match self {
            FiberRoot::Exact(r) => r,
            FiberRoot::Isolated { hi, .. } => hi,
        }
    }

    fn is_exact(&self) -> bool {
        matches!(self, FiberRoot::Exact(_))
    }
}

/// Roots of the fiber polynomial together with what is needed to turn
/// them into coordinates.
pub struct FiberRoots {
    pub roots: Vec<FiberRoot>,
    poly: MPoly,
    chain: Vec<Fiber>,
}

impl FiberRoots {
    pub fn coord(&self, i: usize) -> Coord {
        match &self.roots[i] {
            FiberRoot::Exact(r) => Coord::Rational(r.clone()),
            FiberRoot::Isolated { lo, hi } => Coord::Algebraic(RootCoord {
                poly: self.poly.clone(),
                chain: self.chain.clone(),
                lo: lo.clone(),
                hi: hi.clone(),
            }),
        }
    }

    /// One rational per sector of the real line cut by the roots, in order.
    pub fn sector_samples(&self) -> Vec<Rational> {
        use crate::algebra::rational::simplest_between;
        let two = Rational::from_integer(2.into());
        let four = Rational::from_integer(4.into());
        let Some(first) = self.roots.first() else {
            return vec![Rational::zero()];
        };
        let mut out = Vec::with_capacity(self.roots.len() + 1);
        out.push(if first.is_exact() {
            (first.left() - Rational::one()).floor()
        } else {
            first.left().floor()
        });
        for w in self.roots.windows(2) {
            let (a, b) = (w[0].right(), w[1].left());
            let (lo, hi) = match (w[0].is_exact(), w[1].is_exact()) {
                (false, false) => (a.clone(), b.clone()),
                (true, false) => (midpoint(a, b), b.clone()),
                (false, true) => (a.clone(), midpoint(a, b)),
                (true, true) => ((a * &two + b + a) / &four, (b * &two + a + b) / &four),
            };
            out.push(simplest_between(&lo, &hi));
        }
        let last = self.roots.last().unwrap();
        out.push(if last.is_exact() {
            (last.right() + Rational::one()).ceil()
        } else {
            last.right().ceil()
        });
        out
    }
}

#[derive(Clone, Debug)]
struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    fn point(x: Rational) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
        }
    }

    fn add(&self, o: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    fn mul(&self, o: &Interval) -> Interval {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        Interval {
            lo: c.iter().min().unwrap().clone(),
            hi: c.iter().max().unwrap().clone(),
        }
    }

    fn pow(&self, k: u32) -> Interval {
        let a = num_traits::pow(self.lo.clone(), k as usize);
        let b = num_traits::pow(self.hi.clone(), k as usize);
        if k.is_multiple_of(2) && self.lo.is_negative() && self.hi.is_positive() {
            Interval {
                lo: Rational::zero(),
                hi: a.max(b),
            }
        } else if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    fn sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    fn magnitude(&self) -> Rational {
        self.lo.abs().max(self.hi.abs())
    }

    fn min_magnitude(&self) -> Rational {
        if self.lo.is_positive() {
            self.lo.clone()
        } else if self.hi.is_negative() {
            -self.hi.clone()
        } else {
            Rational::zero()
        }
    }
}

/// A sample point under construction, with memoized signs.
pub struct Point {
    nvars: usize,
    coords: Vec<Coord>,
    /// `cache[v]` holds signs of polynomials whose main variable is `v`.
    cache: Vec<HashMap<MPoly, i8>>,
}

impl Point {
    pub fn new(nvars: usize) -> Self {
        Point {
            nvars,
            coords: Vec::new(),
            cache: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    pub fn push(&mut self, c: Coord) {
        self.coords.push(c);
        self.cache.push(HashMap::new());
    }

    pub fn pop(&mut self) {
        self.coords.pop();
        self.cache.pop();
    }

    /// Every coordinate rational?
    pub fn rational_coords(&self) -> Option<Vec<Rational>> {
        self.coords
            .iter()
            .map(|c| c.as_rational().cloned())
            .collect()
    }

    /// Exact sign of `g` at the point; `g` may only use assigned variables.
    pub fn sign(&mut self, g: &MPoly) -> i8 {
        let Some(v) = g.main_var() else {
            return rsign(&g.constant_term());
        };
        assert!(v < self.coords.len(), "variable {v} is not assigned");
        if let Some(&s) = self.cache[v].get(g) {
            return s;
        }
        let s = match &self.coords[v] {
            Coord::Rational(c) => {
                let c = c.clone();
                self.sign(&g.specialize(v, &c))
            }
            Coord::Algebraic(_) => match self.interval_eval(g).sign() {
                Some(s) => s,
                None => self.tarski_query(v, g),
            },
        };
        self.cache[v].insert(g.clone(), s);
        s
    }

    fn interval_eval(&self, g: &MPoly) -> Interval {
        let boxes: Vec<Interval> = self
            .coords
            .iter()
            .map(|c| {
                let (lo, hi) = c.bounds();
                Interval { lo, hi }
            })
            .collect();
        let mut acc = Interval::point(Rational::zero());
        for (e, c) in g.terms() {
            let mut t = Interval::point(c.clone());
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(&boxes[v].pow(k));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    fn tarski_query(&mut self, v: usize, g: &MPoly) -> i8 {
        let Coord::Algebraic(root) = &self.coords[v] else {
            unreachable!()
        };
        let (f, lo, hi) = (root.poly.clone(), root.lo.clone(), root.hi.clone());
        let fg = &f.derivative(v) * g;
        let seq = self.remainder_chain(f.coeffs_in(v), fg.coeffs_in(v));
        let a = self.variations(&seq, &lo) as i64;
        let b = self.variations(&seq, &hi) as i64;
        let s = a - b;
        debug_assert!((-1..=1).contains(&s));
        s as i8
    }

    /// Drops leading coefficients that vanish at the point.
    fn effective(&mut self, mut f: Fiber) -> Fiber {
        while let Some(c) = f.last() {
            if self.sign(c) == 0 {
                f.pop();
            } else {
                break;
            }
        }
        f
    }

    /// Signed remainder sequence of `a`, `b` over the point: each next entry
    /// is a positive multiple of `-rem(prev2, prev1)`.
    fn remainder_chain(&mut self, a: Fiber, b: Fiber) -> Vec<Fiber> {
        let a = self.effective(a);
        let b = self.effective(b);
        let mut seq = vec![a];
        if b.is_empty() {
            return seq;
        }
        seq.push(b);
        loop {
            let n = seq.len();
            let (a, b) = (&seq[n - 2], &seq[n - 1]);
            if b.len() == 1 {
                break;
            }
            if a.len() < b.len() {
                // rem(a, b) = a
                let r: Fiber = a.iter().map(|c| -c).collect();
                seq.push(r);
                continue;
            }
            let e = (a.len() - b.len() + 1) as u32;
            let lb = b.last().unwrap().clone();
            let r = prem(a, b);
            let s = if e.is_multiple_of(2) { 1 } else { self.sign(&lb) };
            let r: Fiber = if s > 0 {
                r.iter().map(|c| -c).collect()
            } else {
                r
            };
            let r = content_free(self.effective(r));
            if r.is_empty() {
                break;
            }
            seq.push(r);
        }
        seq
    }

    fn value_at(&self, f: &Fiber, x: &Rational) -> MPoly {
        let mut acc = MPoly::zero(self.nvars);
        for c in f.iter().rev() {
            acc = &acc.scale(x) + c;
        }
        acc
    }

    fn variations(&mut self, seq: &[Fiber], x: &Rational) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for f in seq {
            let val = self.value_at(f, x);
            let s = self.sign(&val);
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// One bisection step on an algebraic coordinate. Only earlier
    /// coordinates are consulted, so cached signs stay valid.
    fn refine_coord(&mut self, v: usize) {
        let Coord::Algebraic(root) = &self.coords[v] else {
            return;
        };
        let mut root = root.clone();
        let mid = midpoint(&root.lo, &root.hi);
        let at_mid = root.poly.specialize(v, &mid);
        let next = if self.sign(&at_mid) == 0 {
            Coord::Rational(mid)
        } else {
            let left = self.variations(&root.chain, &root.lo) - self.variations(&root.chain, &mid);
            if left == 1 {
                root.hi = mid;
            } else {
                root.lo = mid;
            }
            Coord::Algebraic(root)
        };
        self.coords[v] = next;
    }

    /// Refines algebraic coordinates until the interval value of `g`
    /// excludes zero; `g` must be nonzero at the point.
    fn separate_from_zero(&mut self, g: &MPoly) -> Interval {
        loop {
            let iv = self.interval_eval(g);
            if iv.sign().is_some_and(|s| s != 0) {
                return iv;
            }
            for v in 0..self.coords.len() {
                self.refine_coord(v);
            }
        }
    }

    /// Real roots in `x(len)` of the product of the nonvanishing `polys`,
    /// specialized at this point.
    pub fn isolate_fiber(&mut self, polys: &[MPoly]) -> Result<FiberRoots> {
        let v = self.coords.len();
        if let Some(prefix) = self.rational_coords() {
            return Ok(self.isolate_rational_fiber(v, &prefix, polys));
        }
        let mut product = MPoly::one(self.nvars);
        for p in polys {
            let f = self.effective(p.coeffs_in(v));
            if f.len() >= 2 {
                product = &product * p;
            }
        }
        let fiber = self.effective(product.coeffs_in(v));
        let empty = FiberRoots {
            roots: Vec::new(),
            poly: product.clone(),
            chain: Vec::new(),
        };
        if fiber.len() < 2 {
            return Ok(empty);
        }
        let deriv: Fiber = fiber
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.scale(&Rational::from_integer(k.into())))
            .collect();
        let chain = self.remainder_chain(fiber.clone(), deriv);
        let lc = fiber.last().unwrap().clone();
        let lc_iv = self.separate_from_zero(&lc);
        let mut top = Rational::zero();
        for c in &fiber[..fiber.len() - 1] {
            top = top.max(self.interval_eval(c).magnitude());
        }
        let bound = (top / lc_iv.min_magnitude() + Rational::one()).ceil();
        let sign_of = |pt: &mut Point, x: &Rational| {
            let val = pt.value_at(&fiber, x);
            pt.sign(&val)
        };
        let roots = bisect_roots(self, &bound, &chain, sign_of, |pt, seq, x| {
            pt.variations(seq, x)
        });
        Ok(FiberRoots {
            roots,
            poly: product,
            chain,
        })
    }

    fn isolate_rational_fiber(&mut self, v: usize, prefix: &[Rational], polys: &[MPoly]) -> FiberRoots {
        let mut product = UPoly::constant(Rational::one());
        for p in polys {
            let mut q = p.clone();
            for (i, x) in prefix.iter().enumerate() {
                q = q.specialize(i, x);
            }
            let u = q.to_upoly(v).expect("only the fiber variable remains");
            if u.degree().unwrap_or(0) >= 1 {
                product = &product * &u;
            }
        }
        let sqf = if product.is_zero() {
            UPoly::constant(Rational::one())
        } else {
            product.square_free_part().expect("nonzero")
        };
        let poly = MPoly::from_upoly(self.nvars, v, &sqf);
        if sqf.degree().unwrap_or(0) == 0 {
            return FiberRoots {
                roots: Vec::new(),
                poly,
                chain: Vec::new(),
            };
        }
        let roots = super::sturm::isolate_real_roots(&sqf)
            .expect("nonzero")
            .into_iter()
            .map(|a| match a.as_rational() {
                Some(r) => FiberRoot::Exact(r.clone()),
                None => FiberRoot::Isolated {
                    lo: a.lo().clone(),
                    hi: a.hi().clone(),
                },
            })
            .collect();
        let chain = super::sturm::sturm_sequence(&sqf)
            .expect("nonzero")
            .iter()
            .map(|u| MPoly::from_upoly(self.nvars, v, u).coeffs_in(v))
            .collect();
        FiberRoots { roots, poly, chain }
    }
}

/// Bisection of `(-bound, bound)` driven by variation counts on `chain`.
fn bisect_roots(
    pt: &mut Point,
    bound: &Rational,
    chain: &[Fiber],
    mut sign_of: impl FnMut(&mut Point, &Rational) -> i8,
    mut vars: impl FnMut(&mut Point, &[Fiber], &Rational) -> usize,
) -> Vec<FiberRoot> {
    let lo = -bound.clone();
    let total = vars(pt, chain, &lo) - vars(pt, chain, bound);
    let mut stack = vec![(lo, bound.clone(), total)];
    let mut out = Vec::new();
    while let Some((a, b, count)) = stack.pop() {
        if count == 0 {
            continue;
        }
        let mid = midpoint(&a, &b);
        let mid_is_root = sign_of(pt, &mid) == 0;
        if count == 1 && !mid_is_root {
            out.push(FiberRoot::Isolated { lo: a, hi: b });
            continue;
        }
        if !mid_is_root {
            let vm = vars(pt, chain, &mid);
            let va = vars(pt, chain, &a);
            let vb = vars(pt, chain, &b);
            stack.push((a, mid.clone(), va - vm));
            stack.push((mid, b, vm - vb));
            continue;
        }
        out.push(FiberRoot::Exact(mid.clone()));
        if count == 1 {
            continue;
        }
        let mut eps = (&b - &a) / Rational::from_integer(4.into());
        loop {
            let l = &mid - &eps;
            let r = &mid + &eps;
            if sign_of(pt, &l) != 0 && sign_of(pt, &r) != 0 {
                let vl = vars(pt, chain, &l);
                let vr = vars(pt, chain, &r);
                if vl - vr == 1 {
                    let va = vars(pt, chain, &a);
                    let vb = vars(pt, chain, &b);
                    stack.push((a.clone(), l, va - vl));
                    stack.push((r, b.clone(), vr - vb));
                    break;
                }
            }
            eps /= Rational::from_integer(2.into());
        }
    }
    out.sort_by(|x, y| x.left().cmp(y.left()));
    out
}

fn prem(a: &Fiber, b: &Fiber) -> Fiber {
    let db = b.len() - 1;
    let lb = b[db].clone();
    let mut r = a.clone();
    let mut e = a.len() as i64 - b.len() as i64 + 1;
    while !r.is_empty() && r.len() >= b.len() {
        let lr = r.last().unwrap().clone();
        let k = r.len() - 1 - db;
        for c in r.iter_mut() {
            *c = &*c * &lb;
        }
        for (i, bc) in b.iter().enumerate() {
            r[i + k] = &r[i + k] - &(&lr * bc);
        }
        r.pop();
        while r.last().is_some_and(MPoly::is_zero) {
            r.pop();
        }
        e -= 1;
    }
    if e > 0 {
        let f = lb.pow(e as u32);
        for c in r.iter_mut() {
            *c = &*c * &f;
        }
    }
    r
}

/// Divides out the positive rational content shared by all coefficients.
fn content_free(f: Fiber) -> Fiber {
    use num_bigint::BigInt;
    use num_integer::Integer;
    let mut g = BigInt::zero();
    let mut l = BigInt::one();
    for c in &f {
        for (_, a) in c.terms() {
            g = g.gcd(a.numer());
            l = l.lcm(a.denom());
        }
    }
    if g.is_zero() {
        return f;
    }
    let s = Rational::new(l, g);
    f.iter().map(|c| c.scale(&s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    fn sqrt2_point(nvars: usize) -> Point {
        // x0 = sqrt(2) via the generic isolation path
        let mut pt = Point::new(nvars);
        let x = MPoly::var(nvars, 0);
        let f = &(&x * &x) - &MPoly::constant(nvars, int(2));
        let roots = pt.isolate_fiber(&[f]).unwrap();
        assert_eq!(roots.roots.len(), 2);
        pt.push(roots.coord(1));
        pt
    }

    #[test]
    fn signs_at_sqrt2() {
        let mut pt = sqrt2_point(2);
        let x = MPoly::var(2, 0);
        let two = MPoly::constant(2, int(2));
        assert_eq!(pt.sign(&(&(&x * &x) - &two)), 0);
        assert_eq!(pt.sign(&(&x.pow(3) - &MPoly::one(2))), 1);
        assert_eq!(pt.sign(&(&x - &MPoly::constant(2, rat(1415, 1000)))), -1);
        assert_eq!(pt.sign(&(&x - &MPoly::constant(2, rat(1414, 1000)))), 1);
    }

    #[test]
    fn lifting_over_an_algebraic_coordinate() {
        // over x0 = sqrt2, roots of x1^2 - x0 are +-2^(1/4)
        let mut pt = sqrt2_point(2);
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let f = &(&y * &y) - &x;
        let roots = pt.isolate_fiber(std::slice::from_ref(&f)).unwrap();
        assert_eq!(roots.roots.len(), 2);
        pt.push(roots.coord(1));
        assert_eq!(pt.sign(&f), 0);
        // y^4 - 2 vanishes at 2^(1/4)
        let g = &y.pow(4) - &MPoly::constant(2, int(2));
        assert_eq!(pt.sign(&g), 0);
        // y - x changes sign between 2^(1/4) ~ 1.189 and sqrt2 ~ 1.414
        assert_eq!(pt.sign(&(&y - &x)), -1);
        assert_eq!(pt.sign(&(&y - &MPoly::constant(2, rat(1189, 1000)))), 1);
        assert_eq!(pt.sign(&(&y - &MPoly::constant(2, rat(1190, 1000)))), -1);
    }

    #[test]
    fn fiber_with_vanishing_leading_coefficient() {
        // over x0 = 0, (x0*y - 1) is the constant -1: no roots
        let mut pt = Point::new(2);
        pt.push(Coord::Rational(int(0)));
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let f = &(&x * &y) - &MPoly::one(2);
        assert!(pt.isolate_fiber(&[f]).unwrap().roots.is_empty());
    }

    #[test]
    fn sector_samples_avoid_roots() {
        let mut pt = Point::new(1);
        let x = MPoly::var(1, 0);
        let f = &(&x * &x) - &x;
        let roots = pt.isolate_fiber(std::slice::from_ref(&f)).unwrap();
        let samples = roots.sector_samples();
        assert_eq!(samples.len(), 3);
        let u = f.to_upoly(0).unwrap();
        for s in &samples {
            assert_ne!(u.sign_at(s), 0);
        }
        assert!(samples[0] < int(0) && int(0) < samples[1]);
        assert!(samples[1] < int(1) && int(1) < samples[2]);
    }
}
