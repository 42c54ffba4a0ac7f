//! Root isolation by Descartes' rule of signs with bisection, on integer
//! polynomials. Used when lifting over rational points only needs sample
//! points between roots: it avoids the coefficient growth of remainder
//! sequences, which dominates at high degree.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::rational::simplest_between;
use crate::algebra::{Rational, UPoly};

type IntPoly = Vec<BigInt>;

/// Primitive integer multiple of `p` with positive leading coefficient.
fn to_integer(p: &UPoly) -> IntPoly {
    let lcm = p
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut out: IntPoly = p
        .coeffs()
        .iter()
        .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = out.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let neg = out.last().is_some_and(|c| c.is_negative());
    for c in &mut out {
        *c /= &g;
        if neg {
            *c = -&*c;
        }
    }
    out
}

fn sign(x: &BigInt) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Sign of `p(n/d)` by Horner on `d^deg p(n/d)`.
fn sign_at(p: &[BigInt], x: &Rational) -> i8 {
    let (n, d) = (x.numer(), x.denom());
    let mut acc = BigInt::zero();
    let mut dpow = BigInt::one();
    for c in p.iter().rev() {
        acc = acc * n + c * &dpow;
        dpow *= d;
    }
    sign(&acc)
}

fn derivative(p: &[BigInt]) -> IntPoly {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

fn taylor_shift_one(c: &mut [BigInt]) {
    let n = c.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let next = c[j + 1].clone();
            c[j] += next;
        }
    }
}

fn variations(c: &[BigInt]) -> usize {
    let mut count = 0;
    let mut last = 0;
    for x in c {
        let s = sign(x);
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Upper bound on the number of roots in `(0, 1)`, exact when 0 or 1.
fn descartes_bound(q: &[BigInt]) -> usize {
    let mut r: IntPoly = q.iter().rev().cloned().collect();
    taylor_shift_one(&mut r);
    variations(&r)
}

fn strip_twos(c: &mut [BigInt]) {
    let tz = c.iter().filter_map(|x| x.trailing_zeros()).min().unwrap_or(0);
    if tz > 0 {
        for x in c.iter_mut() {
            *x >>= tz;
        }
    }
}

/// Integer polynomial proportional to `p(a + (b - a) x)`.
fn compose_affine(p: &[BigInt], a: &Rational, b: &Rational) -> IntPoly {
    let w = b - a;
    // p(A/D + (B/D) x) * D^deg, Horner in integers
    let den = a.denom() * w.denom();
    let an = a.numer() * w.denom();
    let bn = w.numer() * a.denom();
    let mut acc: IntPoly = vec![p.last().cloned().unwrap_or_default()];
    let mut dpow = BigInt::one();
    for c in p.iter().rev().skip(1) {
        dpow *= &den;
        let mut next = vec![BigInt::zero(); acc.len() + 1];
        for (i, x) in acc.iter().enumerate() {
            next[i] += x * &an;
            next[i + 1] += x * &bn;
        }
        next[0] += c * &dpow;
        acc = next;
    }
    let g = acc.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if !g.is_zero() && !g.is_one() {
        acc.iter_mut().for_each(|c| *c /= &g);
    }
    acc
}

fn deflate_at_one(q: &mut IntPoly) {
    // synthetic division by (x - 1)
    let n = q.len();
    let mut out = vec![BigInt::zero(); n - 1];
    let mut carry = BigInt::zero();
    for i in (1..n).rev() {
        carry += &q[i];
        out[i - 1] = carry.clone();
    }
    *q = out;
}

const PRIMES: [u64; 4] = [2_305_843_009_213_693_951, 4_611_686_018_427_387_847, 1_000_000_007, 998_244_353];

fn mod_poly(p: &[BigInt], m: u64) -> Vec<u64> {
    let mb = BigInt::from(m);
    p.iter()
        .map(|c| c.mod_floor(&mb).to_u64().expect("reduced"))
        .collect()
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    r
}

fn trim(p: &mut Vec<u64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

/// Degree of `gcd(a, b)` over `Z/m` (m prime); `a`, `b` trimmed, nonzero.
fn gcd_degree_mod(mut a: Vec<u64>, mut b: Vec<u64>, m: u64) -> usize {
    while !b.is_empty() {
        let inv = powmod(*b.last().unwrap(), m - 2, m);
        while a.len() >= b.len() {
            let f = mulmod(*a.last().unwrap(), inv, m);
            let shift = a.len() - b.len();
            for (i, bc) in b.iter().enumerate() {
                let t = mulmod(f, *bc, m);
                a[i + shift] = (a[i + shift] + m - t) % m;
            }
            trim(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Square-free certificate: `p mod q` keeps its degree and is coprime to its
/// derivative for some prime `q`.
fn square_free_mod(p: &[BigInt]) -> bool {
    PRIMES.iter().any(|&m| {
        let mut a = mod_poly(p, m);
        trim(&mut a);
        if a.len() != p.len() {
            return false;
        }
        let mut da: Vec<u64> = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| mulmod(*c, i as u64 % m, m))
            .collect();
        trim(&mut da);
        !da.is_empty() && gcd_degree_mod(a, da, m) == 0
    })
}

fn square_free_integer(p: &UPoly) -> IntPoly {
    let ip = to_integer(p);
    if ip.len() <= 2 || square_free_mod(&ip) {
        return ip;
    }
    to_integer(&p.square_free_part().expect("nonzero"))
}

#[derive(Debug, Clone)]
enum Root {
    Exact(Rational),
    /// Exactly one root in `(lo, hi)`; `s_lo` is the sign just right of `lo`.
    Open { lo: Rational, hi: Rational, s_lo: i8 },
}

/// Roots of the square-free `p` in the open interval `(a, b)`.
fn isolate_open(p: &[BigInt], a: &Rational, b: &Rational) -> Vec<Root> {
    let mut q = compose_affine(p, a, b);
    while q.len() > 1 && q[0].is_zero() {
        q.remove(0);
    }
    if q.len() > 1 && q.iter().fold(BigInt::zero(), |s, c| s + c).is_zero() {
        deflate_at_one(&mut q);
    }
    let w = b - a;
    let at = |c: &BigInt, k: u32| a + &w * Rational::new(c.clone(), BigInt::one() << k);
    let mut out = Vec::new();
    let mut stack = vec![(q, BigInt::zero(), 0u32)];
    while let Some((q, c, k)) = stack.pop() {
        if q.len() <= 1 {
            continue;
        }
        match descartes_bound(&q) {
            0 => {}
            1 => {
                let lo = at(&c, k);
                let hi = at(&(&c + 1), k);
                let s_lo = match sign_at(p, &lo) {
                    0 => sign_at(&derivative(p), &lo),
                    s => s,
                };
                out.push(Root::Open { lo, hi, s_lo });
            }
            _ => {
                let d = q.len() - 1;
                let mut left: IntPoly = q
                    .iter()
                    .enumerate()
                    .map(|(i, x)| x << (d - i))
                    .collect();
                strip_twos(&mut left);
                let mut right = left.clone();
                taylor_shift_one(&mut right);
                let c2 = &c << 1;
                if right[0].is_zero() {
                    out.push(Root::Exact(at(&(&c2 + 1), k + 1)));
                    right.remove(0);
                }
                strip_twos(&mut right);
                stack.push((right, &c2 + 1, k + 1));
                stack.push((left, c2, k + 1));
            }
        }
    }
    out
}

fn refine(p: &[BigInt], r: &Root) -> Root {
    let Root::Open { lo, hi, s_lo } = r else {
        return r.clone();
    };
    let mid = (lo + hi) / Rational::from_integer(2.into());
    match sign_at(p, &mid) {
        0 => Root::Exact(mid),
        s if s == *s_lo => Root::Open {
            lo: mid,
            hi: hi.clone(),
            s_lo: *s_lo,
        },
        _ => Root::Open {
            lo: lo.clone(),
            hi: mid,
            s_lo: *s_lo,
        },
    }
}

struct Item {
    root: Root,
    /// Index into the polynomial list; `None` for the interval ends.
    poly: Option<usize>,
}

impl Item {
    fn lo(&self) -> &Rational {
        match &self.root {
            Root::Exact(r) => r,
            Root::Open { lo, .. } => lo,
        }
    }

    fn hi(&self) -> &Rational {
        match &self.root {
            Root::Exact(r) => r,
            Root::Open { hi, .. } => hi,
        }
    }
}

/// One rational point in each open interval into which the real roots of
/// `polys` cut `(lo, hi)`. Zero and constant polynomials are ignored.
pub(crate) fn sector_points(polys: &[UPoly], lo: &Rational, hi: &Rational) -> Vec<Rational> {
    if lo >= hi {
        return Vec::new();
    }
    let ints: Vec<IntPoly> = polys
        .iter()
        .filter(|p| p.degree().is_some_and(|d| d > 0))
        .map(square_free_integer)
        .collect();
    let mut items = vec![
        Item {
            root: Root::Exact(lo.clone()),
            poly: None,
        },
        Item {
            root: Root::Exact(hi.clone()),
            poly: None,
        },
    ];
    for (i, p) in ints.iter().enumerate() {
        items.extend(isolate_open(p, lo, hi).into_iter().map(|root| Item { root, poly: Some(i) }));
    }
    separate(&mut items, &ints, polys);

    let mut out = Vec::with_capacity(items.len() - 1);
    for pair in items.windows(2) {
        let (a, b) = (pair[0].hi(), pair[1].lo());
        let q = (b - a) / Rational::from_integer(4.into());
        out.push(simplest_between(&(a + &q), &(b - &q)));
    }
    out
}

/// Refines and deduplicates until consecutive items are strictly apart.
fn separate(items: &mut Vec<Item>, ints: &[IntPoly], polys: &[UPoly]) {
    let mut gcds: HashMap<(usize, usize), IntPoly> = HashMap::new();
    let nonconstant: Vec<&UPoly> = polys.iter().filter(|p| p.degree().is_some_and(|d| d > 0)).collect();
    loop {
        items.sort_by(|x, y| x.lo().cmp(y.lo()).then_with(|| x.hi().cmp(y.hi())));
        let Some(i) = (0..items.len() - 1).find(|&i| items[i].hi() >= items[i + 1].lo()) else {
            return;
        };
        let (x, y) = (items[i].root.clone(), items[i + 1].root.clone());
        let (px, py) = (items[i].poly, items[i + 1].poly);
        match (&x, &y) {
            (Root::Exact(_), Root::Exact(_)) => {
                // equal points; never drop an interval end
                let drop = if px.is_none() { i + 1 } else { i };
                items.remove(drop);
            }
            (Root::Exact(r), Root::Open { lo, hi, .. }) | (Root::Open { lo, hi, .. }, Root::Exact(r)) => {
                let (open, exact_poly) = if matches!(x, Root::Open { .. }) { (i, py) } else { (i + 1, px) };
                let q = items[open].poly.expect("open items come from polynomials");
                if exact_poly.is_some() && lo < r && r < hi && sign_at(&ints[q], r) == 0 {
                    items.remove(open);
                } else {
                    items[open].root = refine(&ints[q], &items[open].root);
                }
            }
            (Root::Open { .. }, Root::Open { .. }) => {
                let (px, py) = (px.expect("open"), py.expect("open"));
                let same = px != py && {
                    let key = (px.min(py), px.max(py));
                    let g = gcds
                        .entry(key)
                        .or_insert_with(|| {
                            // square-free, so a shared root always changes its sign
                            let g = nonconstant[key.0].gcd(nonconstant[key.1]);
                            to_integer(&g.square_free_part().expect("gcd of nonzero polynomials"))
                        });
                    let lo = items[i].lo().max(items[i + 1].lo());
                    let hi = items[i].hi().min(items[i + 1].hi());
                    g.len() > 1 && lo < hi && sign_at(g, lo) * sign_at(g, hi) < 0
                };
                if same {
                    items.remove(i + 1);
                } else {
                    items[i].root = refine(&ints[px], &x);
                    items[i + 1].root = refine(&ints[py], &y);
                }
            }
        }
    }
}
