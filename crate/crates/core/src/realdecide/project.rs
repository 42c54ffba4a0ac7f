//! Collins projection: from polynomials in `x0..=xk` to a set in `x0..x(k-1)`
//! whose sign-invariant cells keep the real roots in `xk` of the inputs
//! delineable (continuous, non-crossing, constant in number).

use crate::algebra::{discriminant, principal_subresultant_coeffs, resultant, MPoly};
use crate::error::Result;

/// Successive reducta of `p` in `var` that still involve `var`.
fn reducta(p: &MPoly, var: usize) -> Vec<MPoly> {
    let mut out = Vec::new();
    let mut cur = p.clone();
    while cur.degree_in(var) >= 1 {
        let mut cs = cur.coeffs_in(var);
        out.push(cur);
        cs.pop();
        while cs.last().is_some_and(MPoly::is_zero) {
            cs.pop();
        }
        cur = MPoly::from_coeffs_in(p.nvars(), var, &cs);
    }
    out
}

fn push_unique(out: &mut Vec<MPoly>, p: MPoly) {
    if !p.is_zero() && !out.contains(&p) {
        out.push(p);
    }
}

/// Collins' full projection of `polys` with respect to `var`.
///
/// Contains every coefficient in `var` of each input, for every reductum
/// its discriminant and the principal subresultant coefficients with its
/// derivative, and for every pair of reducta of distinct inputs their
/// principal subresultant coefficients. Inputs free of `var` are passed
/// through unchanged. Zero polynomials are dropped; constants are kept.
pub fn cad_project(polys: &[MPoly], var: usize) -> Result<Vec<MPoly>> {
    let mut out = Vec::new();
    let mut with_var = Vec::new();
    for p in polys {
        if p.uses_var(var) {
            if !with_var.contains(p) {
                with_var.push(p.clone());
            }
        } else {
            push_unique(&mut out, p.clone());
        }
    }
    let reds: Vec<Vec<MPoly>> = with_var.iter().map(|p| reducta(p, var)).collect();
    for (p, rs) in with_var.iter().zip(&reds) {
        for c in p.coeffs_in(var) {
            push_unique(&mut out, c);
        }
        for r in rs {
            if r.degree_in(var) >= 2 {
                push_unique(&mut out, discriminant(r, var)?);
                let psc = principal_subresultant_coeffs(r, &r.derivative(var), var)?;
                for c in psc.into_iter().skip(1) {
                    push_unique(&mut out, c);
                }
            }
        }
    }
    for i in 0..with_var.len() {
        for j in i + 1..with_var.len() {
            for ri in &reds[i] {
                for rj in &reds[j] {
                    for c in principal_subresultant_coeffs(ri, rj, var)? {
                        push_unique(&mut out, c);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Projection that only keeps full-dimensional cells delineable: leading
/// coefficients, discriminants and pairwise resultants.
///
/// On an open set where all of these are nonzero, every input has constant
/// degree and only simple roots, so its real roots vary continuously and
/// never meet another input's. That is all sector sampling needs. Returns
/// `None` when an input is not square-free or two inputs share a factor
/// (a discriminant or resultant vanishes identically); the caller then
/// falls back to the full projection.
pub fn open_project(polys: &[MPoly], var: usize) -> Result<Option<Vec<MPoly>>> {
    let mut out = Vec::new();
    let mut with_var: Vec<&MPoly> = Vec::new();
    for p in polys {
        if p.uses_var(var) {
            if !with_var.contains(&p) {
                with_var.push(p);
            }
        } else {
            push_unique(&mut out, p.clone());
        }
    }
    for p in &with_var {
        push_unique(&mut out, p.leading_coeff_in(var));
        if p.degree_in(var) >= 2 {
            let d = discriminant(p, var)?;
            if d.is_zero() {
                return Ok(None);
            }
            push_unique(&mut out, d);
        }
    }
    for i in 0..with_var.len() {
        for j in i + 1..with_var.len() {
            let r = resultant(with_var[i], with_var[j], var)?;
            if r.is_zero() {
                return Ok(None);
            }
            push_unique(&mut out, r);
        }
    }
    Ok(Some(out))
}
