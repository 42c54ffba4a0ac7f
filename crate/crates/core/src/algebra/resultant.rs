//! Eliminants of polynomials viewed as univariate in one variable with
//! polynomial coefficients: resultants, discriminants and principal
//! subresultant coefficients.

use num_traits::One;

use super::mpoly::MPoly;
use super::rational::Rational;
use crate::error::{Error, Result};

/// Coefficient list in the elimination variable, lowest power first.
type Coeffs = Vec<MPoly>;

fn trim(c: &mut Coeffs) {
    while c.last().is_some_and(MPoly::is_zero) {
        c.pop();
    }
}

fn deg(c: &Coeffs) -> usize {
    c.len() - 1
}

fn lc(c: &Coeffs) -> &MPoly {
    c.last().expect("nonzero polynomial")
}

/// Pseudo-remainder: `lc(b)^(deg a - deg b + 1) * a mod b`.
fn prem(a: &Coeffs, b: &Coeffs) -> Coeffs {
    let db = deg(b);
    let lb = lc(b).clone();
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
        debug_assert!(r.last().unwrap().is_zero());
        r.pop();
        trim(&mut r);
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

fn exact(a: &MPoly, d: &MPoly) -> MPoly {
    a.div_exact(d)
        .expect("subresultant division is exact in the coefficient ring")
}

/// Resultant with respect to `var`, computed by the subresultant
/// polynomial remainder sequence. Agrees with the Sylvester determinant.
pub fn resultant(p: &MPoly, q: &MPoly, var: usize) -> Result<MPoly> {
    if p.nvars() != q.nvars() {
        return Err(Error::VariableMismatch {
            left: p.nvars(),
            right: q.nvars(),
        });
    }
    if p.is_zero() || q.is_zero() {
        return Err(Error::ZeroPolynomial("resultant"));
    }
    let nvars = p.nvars();
    let mut a = p.coeffs_in(var);
    let mut b = q.coeffs_in(var);
    if deg(&a) == 0 {
        return Ok(a[0].pow(deg(&b) as u32));
    }
    if deg(&b) == 0 {
        return Ok(b[0].pow(deg(&a) as u32));
    }
    let mut s = 1i32;
    if deg(&a) < deg(&b) {
        if deg(&a) % 2 == 1 && deg(&b) % 2 == 1 {
            s = -s;
        }
        std::mem::swap(&mut a, &mut b);
    }
    let mut g = MPoly::one(nvars);
    let mut h = MPoly::one(nvars);
    loop {
        let (da, db) = (deg(&a), deg(&b));
        let delta = (da - db) as u32;
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
        let r = prem(&a, &b);
        if r.is_empty() {
            return Ok(MPoly::zero(nvars));
        }
        let divisor = &g * &h.pow(delta);
        a = b;
        b = r.iter().map(|c| exact(c, &divisor)).collect();
        g = lc(&a).clone();
        h = if delta == 0 {
            h
        } else {
            exact(&g.pow(delta), &h.pow(delta - 1))
        };
        if deg(&b) == 0 {
            let da = deg(&a) as u32;
            let out = exact(&lc(&b).pow(da), &h.pow(da - 1));
            return Ok(if s < 0 { -&out } else { out });
        }
    }
}

/// Fraction-free (Bareiss) determinant over the polynomial ring.
pub fn determinant(mut m: Vec<Vec<MPoly>>, nvars: usize) -> MPoly {
    let n = m.len();
    if n == 0 {
        return MPoly::one(nvars);
    }
    let mut negate = false;
    let mut prev = MPoly::one(nvars);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return MPoly::zero(nvars),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = exact(&t, &prev);
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -&d
    } else {
        d
    }
}

/// Square matrix whose determinant is the `j`-th principal subresultant
/// coefficient of `f`, `g` (`j = 0` gives the Sylvester matrix).
fn subresultant_matrix(f: &Coeffs, g: &Coeffs, j: usize, nvars: usize) -> Vec<Vec<MPoly>> {
    let (n, m) = (deg(f), deg(g));
    let size = m + n - 2 * j;
    let mut rows = Vec::with_capacity(size);
    let zero = MPoly::zero(nvars);
    let mut push_shifts = |c: &Coeffs, count: usize| {
        let d = deg(c);
        for shift in 0..count {
            let mut row = vec![zero.clone(); size];
            for (k, coeff) in c.iter().enumerate() {
                // column index counts from the highest power of the full band
                let col = shift + (d - k);
                if col < size {
                    row[col] = coeff.clone();
                }
            }
            rows.push(row);
        }
    };
    push_shifts(f, m - j);
    push_shifts(g, n - j);
    rows
}

/// Resultant as the determinant of the Sylvester matrix.
pub fn sylvester_resultant(p: &MPoly, q: &MPoly, var: usize) -> Result<MPoly> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::ZeroPolynomial("sylvester_resultant"));
    }
    let f = p.coeffs_in(var);
    let g = q.coeffs_in(var);
    Ok(determinant(subresultant_matrix(&f, &g, 0, p.nvars()), p.nvars()))
}

/// Principal subresultant coefficients `psc_0 .. psc_{min(deg)-1}`.
pub fn principal_subresultant_coeffs(p: &MPoly, q: &MPoly, var: usize) -> Result<Vec<MPoly>> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::ZeroPolynomial("principal_subresultant_coeffs"));
    }
    let f = p.coeffs_in(var);
    let g = q.coeffs_in(var);
    let k = deg(&f).min(deg(&g));
    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        let d = if j == 0 {
            resultant(p, q, var)?
        } else {
            determinant(subresultant_matrix(&f, &g, j, p.nvars()), p.nvars())
        };
        out.push(d);
    }
    Ok(out)
}

/// `(-1)^(d(d-1)/2) * res(p, dp/dvar) / lc(p)`.
pub fn discriminant(p: &MPoly, var: usize) -> Result<MPoly> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial("discriminant"));
    }
    let d = p.degree_in(var);
    if d == 0 {
        return Err(Error::ConstantPolynomial("discriminant"));
    }
    let r = resultant(p, &p.derivative(var), var)?;
    let q = exact(&r, &p.leading_coeff_in(var));
    let flip = (d as u64 * (d as u64 - 1) / 2) % 2 == 1;
    Ok(if flip { q.scale(&-Rational::one()) } else { q })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn x2() -> (MPoly, MPoly) {
        (MPoly::var(2, 0), MPoly::var(2, 1))
    }

    fn k(v: i64) -> MPoly {
        MPoly::constant(2, int(v))
    }

    #[test]
    fn resultant_examples() {
        let (x, _) = x2();
        let p = &(&x * &x) - &k(2);
        let q = &x - &k(1);
        assert_eq!(resultant(&p, &q, 0).unwrap(), k(-1));
        assert_eq!(resultant(&p, &p, 0).unwrap(), MPoly::zero(2));
    }

    #[test]
    fn linear_resultant_is_root_difference() {
        // variables: x (elimination), a, b
        let x = MPoly::var(3, 0);
        let a = MPoly::var(3, 1);
        let b = MPoly::var(3, 2);
        let r = resultant(&(&x - &a), &(&x - &b), 0).unwrap();
        // Sylvester determinant [[1, -a], [1, -b]] = a - b
        assert_eq!(r, &a - &b);
        assert_eq!(sylvester_resultant(&(&x - &a), &(&x - &b), 0).unwrap(), r);
    }

    #[test]
    fn zero_input_is_rejected() {
        let (x, _) = x2();
        assert_eq!(
            resultant(&x, &MPoly::zero(2), 0),
            Err(Error::ZeroPolynomial("resultant"))
        );
    }

    #[test]
    fn discriminant_examples() {
        let (x, y) = x2();
        let circle = &(&(&x * &x) + &(&y * &y)) - &k(1);
        assert_eq!(
            discriminant(&circle, 1).unwrap(),
            &k(4) - &(&x * &x).scale(&int(4))
        );
        let p = &(&x * &x) - &k(2);
        assert_eq!(discriminant(&p, 0).unwrap(), k(8));
        let sq = (&x - &k(1)).pow(2);
        assert_eq!(discriminant(&sq, 0).unwrap(), MPoly::zero(2));
        assert_eq!(
            discriminant(&k(3), 0),
            Err(Error::ConstantPolynomial("discriminant"))
        );
    }

    #[test]
    fn subresultant_route_matches_sylvester_determinant() {
        let (x, y) = x2();
        let f = &(&(&x.pow(3) * &y) - &(&x * &y.pow(2)).scale(&int(2))) + &k(5);
        let g = &(&(&x.pow(2) * &y.pow(2)) + &x.scale(&int(3))) - &y;
        for var in 0..2 {
            assert_eq!(
                resultant(&f, &g, var).unwrap(),
                sylvester_resultant(&f, &g, var).unwrap()
            );
            assert_eq!(
                resultant(&g, &f, var).unwrap(),
                sylvester_resultant(&g, &f, var).unwrap()
            );
        }
    }

    #[test]
    fn psc_of_common_factor() {
        // f = (x - y)(x + 1), g = (x - y)(x - 2): gcd has degree 1,
        // so psc_0 vanishes and psc_1 does not.
        let (x, y) = x2();
        let f = &(&x - &y) * &(&x + &k(1));
        let g = &(&x - &y) * &(&x - &k(2));
        let psc = principal_subresultant_coeffs(&f, &g, 0).unwrap();
        assert_eq!(psc.len(), 2);
        assert!(psc[0].is_zero());
        assert!(!psc[1].is_zero());
    }
}
