//! Projection, lifting and the linear-face case split.
//!
//! A closed linear condition `l >= 0` is split into `l > 0` or `l = 0`, and
//! linear equalities are eliminated by substitution. Each case is then
//! decided by cylindrical decomposition: project variables away from the
//! last one down, then lift sample points from `x0` upward. When every
//! remaining condition is strict the satisfying set is open, so only
//! sector (rational) samples are needed; otherwise section samples with
//! algebraic coordinates are lifted as well.

use num_traits::{One, Zero};

use super::descartes;
use super::point::{Coord, Point};
use super::project::{cad_project, open_project};
use super::{DecideStats, Limits, Relation, SignCondition, Status, System, Verdict};
use crate::algebra::rational::{sign, Rational};
use crate::algebra::{MPoly, UPoly};
use crate::error::{Error, Resource, Result};

/// Decides `s` with default resource limits.
pub fn decide_conjunction(s: &System) -> Result<Verdict> {
    decide_with(s, &Limits::default())
}

pub fn decide_with(s: &System, limits: &Limits) -> Result<Verdict> {
    let n = s.nvars();
    let mut stats = DecideStats::default();
    let unsat = |stats: DecideStats| Verdict {
        status: Status::Unsat,
        witness: None,
        stats,
    };

    let mut conds: Vec<SignCondition> = Vec::new();
    for c in s.conditions() {
        match c.poly.as_constant() {
            Some(v) if !c.relation.holds(sign(&v)) => return Ok(unsat(stats)),
            Some(_) => {}
            None => {
                let c = SignCondition::new(c.poly.primitive_positive(), c.relation);
                if !conds.contains(&c) {
                    conds.push(c);
                }
            }
        }
    }

    let is_linear = |c: &SignCondition| c.poly.total_degree() <= 1;
    let equalities: Vec<MPoly> = conds
        .iter()
        .filter(|c| c.relation == Relation::Eq && is_linear(c))
        .map(|c| c.poly.clone())
        .collect();
    let mut split: Vec<SignCondition> = conds
        .iter()
        .filter(|c| matches!(c.relation, Relation::Ge | Relation::Le) && is_linear(c))
        .cloned()
        .collect();
    let mut rest: Vec<SignCondition> = conds
        .iter()
        .filter(|c| !(is_linear(c) && matches!(c.relation, Relation::Eq | Relation::Ge | Relation::Le)))
        .cloned()
        .collect();
    if split.len() > limits.max_face_split {
        rest.append(&mut split);
    }

    let mut masks: Vec<u32> = (0..1u32 << split.len()).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));

    for mask in masks {
        stats.cases += 1;
        let mut eqs = equalities.clone();
        let mut others = rest.clone();
        for (i, c) in split.iter().enumerate() {
            if mask & (1 << i) != 0 {
                eqs.push(c.poly.clone());
            } else {
                let strict = match c.relation {
                    Relation::Ge => Relation::Gt,
                    _ => Relation::Lt,
                };
                others.push(SignCondition::new(c.poly.clone(), strict));
            }
        }
        let Some(sol) = LinearSolution::solve(n, &eqs) else {
            continue;
        };
        let Some(reduced) = sol.reduce(&others)? else {
            continue;
        };
        let found = lift_case(sol.free.len(), &reduced, limits, &mut stats)?;
        if let Some(point) = found {
            let witness = point.map(|w| sol.expand(&w));
            if let Some(w) = &witness {
                assert!(
                    s.holds_at(w)?,
                    "witness fails the system it was found for: {s}"
                );
            }
            return Ok(Verdict {
                status: Status::Sat,
                witness,
                stats,
            });
        }
    }
    Ok(unsat(stats))
}

/// Variables solved from linear equalities, each as an affine expression
/// in the free variables.
struct LinearSolution {
    nvars: usize,
    solved: Vec<(usize, MPoly)>,
    free: Vec<usize>,
}

impl LinearSolution {
    /// `None` when the equalities are inconsistent.
    fn solve(nvars: usize, eqs: &[MPoly]) -> Option<Self> {
        let mut solved: Vec<(usize, MPoly)> = Vec::new();
        for e in eqs {
            let mut e = e.clone();
            for (v, ex) in &solved {
                e = e.substitute(*v, ex).expect("same variable count");
            }
            let Some(p) = e.main_var() else {
                if e.is_zero() {
                    continue;
                }
                return None;
            };
            let a = e.coeffs_in(p)[1]
                .as_constant()
                .expect("linear condition");
            let rest = &e - &MPoly::var(nvars, p).scale(&a);
            let ex = rest.scale(&(-Rational::from_integer(1.into()) / a));
            for (_, old) in solved.iter_mut() {
                *old = old.substitute(p, &ex).expect("same variable count");
            }
            solved.push((p, ex));
        }
        let free = (0..nvars)
            .filter(|v| solved.iter().all(|(s, _)| s != v))
            .collect();
        Some(LinearSolution {
            nvars,
            solved,
            free,
        })
    }

    /// Substitutes and renames into the free variables; constant conditions
    /// are evaluated. `None` if one of them is false.
    fn reduce(&self, conds: &[SignCondition]) -> Result<Option<Vec<SignCondition>>> {
        let mut map = vec![None; self.nvars];
        for (i, &v) in self.free.iter().enumerate() {
            map[v] = Some(i);
        }
        let mut out = Vec::new();
        for c in conds {
            let mut p = c.poly.clone();
            for (v, ex) in &self.solved {
                p = p.substitute(*v, ex)?;
            }
            let p = p.remap(&map, self.free.len())?;
            match p.as_constant() {
                Some(v) => {
                    if !c.relation.holds(sign(&v)) {
                        return Ok(None);
                    }
                }
                None => {
                    let c = SignCondition::new(p.primitive_positive(), c.relation);
                    if !out.contains(&c) {
                        out.push(c);
                    }
                }
            }
        }
        Ok(Some(out))
    }

    fn expand(&self, free_values: &[Rational]) -> Vec<Rational> {
        let mut full = vec![Rational::zero(); self.nvars];
        for (i, &v) in self.free.iter().enumerate() {
            full[v] = free_values[i].clone();
        }
        for (v, ex) in &self.solved {
            full[*v] = ex.eval(&full).expect("full assignment");
        }
        full
    }
}

fn check_limits(p: &MPoly, limits: &Limits, stats: &mut DecideStats) -> Result<()> {
    let d = p.total_degree();
    let b = p.max_coeff_bits();
    stats.max_degree = stats.max_degree.max(d);
    stats.max_coeff_bits = stats.max_coeff_bits.max(b);
    if d > limits.max_degree {
        return Err(Error::ResourceExceeded {
            resource: Resource::Degree,
            limit: limits.max_degree as u64,
            observed: d as u64,
        });
    }
    if b > limits.max_bits {
        return Err(Error::ResourceExceeded {
            resource: Resource::CoefficientBits,
            limit: limits.max_bits,
            observed: b,
        });
    }
    Ok(())
}

/// Projection factors grouped by main variable.
///
/// Strict-only systems use the open-cell projection where it applies.
fn projection_levels(
    nvars: usize,
    conds: &[SignCondition],
    strict_only: bool,
    limits: &Limits,
    stats: &mut DecideStats,
) -> Result<Vec<Vec<MPoly>>> {
    let mut levels: Vec<Vec<MPoly>> = vec![Vec::new(); nvars];
    let insert = |p: MPoly, levels: &mut Vec<Vec<MPoly>>, stats: &mut DecideStats| -> Result<()> {
        if p.is_constant() {
            return Ok(());
        }
        let q = p.normalized();
        check_limits(&q, limits, stats)?;
        let v = q.main_var().expect("nonconstant");
        if !levels[v].contains(&q) {
            levels[v].push(q);
        }
        Ok(())
    };
    for c in conds {
        insert(c.poly.clone(), &mut levels, stats)?;
    }
    for v in (1..nvars).rev() {
        let open = if strict_only {
            open_project(&levels[v], v)?
        } else {
            None
        };
        let proj = match open {
            Some(p) => p,
            None => cad_project(&levels[v], v)?,
        };
        for p in proj {
            insert(p, &mut levels, stats)?;
        }
    }
    Ok(levels)
}

/// Outer `None`: no satisfying cell. Inner `None`: satisfiable, but the
/// sample found has an irrational coordinate.
fn lift_case(
    nvars: usize,
    conds: &[SignCondition],
    limits: &Limits,
    stats: &mut DecideStats,
) -> Result<Option<Option<Vec<Rational>>>> {
    if nvars == 0 {
        return Ok(Some(Some(Vec::new())));
    }
    let strict_only = conds.iter().all(|c| c.relation.is_strict());
    let levels = projection_levels(nvars, conds, strict_only, limits, stats)?;
    let mut by_level: Vec<Vec<SignCondition>> = vec![Vec::new(); nvars];
    for c in conds {
        by_level[c.poly.main_var().expect("nonconstant")].push(c.clone());
    }
    let mut lifter = Lifter {
        levels,
        conds: by_level,
        strict_only,
        limits,
        stats,
        point: Point::new(nvars),
    };
    if lifter.lift(0)? {
        Ok(Some(lifter.point.rational_coords()))
    } else {
        Ok(None)
    }
}

struct Lifter<'a> {
    levels: Vec<Vec<MPoly>>,
    conds: Vec<Vec<SignCondition>>,
    strict_only: bool,
    limits: &'a Limits,
    stats: &'a mut DecideStats,
    point: Point,
}

impl Lifter<'_> {
    fn lift(&mut self, v: usize) -> Result<bool> {
        if v == self.levels.len() {
            return Ok(true);
        }
        let candidates: Vec<Coord> = if self.strict_only {
            self.open_samples(v)?.into_iter().map(Coord::Rational).collect()
        } else {
            let roots = self.point.isolate_fiber(&self.levels[v])?;
            let mut c: Vec<Coord> = roots.sector_samples().into_iter().map(Coord::Rational).collect();
            c.extend((0..roots.roots.len()).map(|i| roots.coord(i)));
            c
        };
        for coord in candidates {
            self.stats.cells += 1;
            if self.stats.cells > self.limits.max_cells {
                return Err(Error::ResourceExceeded {
                    resource: Resource::Cells,
                    limit: self.limits.max_cells,
                    observed: self.stats.cells,
                });
            }
            self.point.push(coord);
            let conds = std::mem::take(&mut self.conds[v]);
            let ok = conds
                .iter()
                .all(|c| c.relation.holds(self.point.sign(&c.poly)));
            self.conds[v] = conds;
            if ok && self.lift(v + 1)? {
                return Ok(true);
            }
            self.point.pop();
        }
        Ok(false)
    }

    /// Sector samples over a rational prefix, only inside the open interval
    /// cut out by this level's linear conditions: with strict conditions
    /// every satisfying point lies there.
    fn open_samples(&mut self, v: usize) -> Result<Vec<Rational>> {
        let prefix = self
            .point
            .rational_coords()
            .expect("sector lifting keeps coordinates rational");
        let fiber = |p: &MPoly| -> UPoly {
            let mut q = p.clone();
            for (i, x) in prefix.iter().enumerate() {
                q = q.specialize(i, x);
            }
            q.to_upoly(v).expect("only the level variable is left")
        };
        let (mut lo, mut hi): (Option<Rational>, Option<Rational>) = (None, None);
        for c in &self.conds[v] {
            let u = fiber(&c.poly);
            match u.degree() {
                None | Some(0) => {
                    if !c.relation.holds(sign(&u.lc())) {
                        return Ok(Vec::new());
                    }
                }
                Some(1) if matches!(c.relation, Relation::Gt | Relation::Lt) => {
                    let r = -&u.coeffs()[0] / &u.coeffs()[1];
                    if (c.relation == Relation::Gt) == (u.lc() > Rational::zero()) {
                        lo = Some(lo.map_or(r.clone(), |l| l.max(r)));
                    } else {
                        hi = Some(hi.map_or(r.clone(), |h| h.min(r)));
                    }
                }
                _ => {}
            }
        }
        let polys: Vec<UPoly> = self.levels[v]
            .iter()
            .map(fiber)
            .filter(|u| u.degree().is_some_and(|d| d > 0))
            .collect();
        let bound = polys
            .iter()
            .map(UPoly::cauchy_bound)
            .fold(Rational::one(), |a, b| a.max(b));
        // every root lies strictly inside (-bound, bound)
        let one = Rational::one();
        let lo = match (lo, &hi) {
            (Some(l), _) => l,
            (None, Some(h)) => (-&bound - &one).min(h - &one),
            (None, None) => -&bound - &one,
        };
        let hi = hi.unwrap_or_else(|| (&bound + &one).max(&lo + &one));
        Ok(descartes::sector_points(&polys, &lo, &hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    fn vars(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("q{i}")).collect()
    }

    fn k(n: usize, c: Rational) -> MPoly {
        MPoly::constant(n, c)
    }

    fn cond(p: MPoly, r: Relation) -> SignCondition {
        SignCondition::new(p, r)
    }

    #[test]
    fn contradictory_strict_bounds() {
        let q = MPoly::var(1, 0);
        let s = System::new(
            vars(1),
            vec![
                cond(&q - &k(1, rat(1, 3)), Relation::Gt),
                cond(&k(1, rat(1, 3)) - &q, Relation::Gt),
            ],
        )
        .unwrap();
        assert_eq!(decide_conjunction(&s).unwrap().status, Status::Unsat);
    }

    #[test]
    fn open_interval_has_rational_witness() {
        let q = MPoly::var(1, 0);
        let s = System::new(
            vars(1),
            vec![
                cond(&q - &k(1, rat(1, 5)), Relation::Gt),
                cond(&k(1, rat(3, 8)) - &q, Relation::Gt),
                cond(q.clone(), Relation::Ge),
                cond(&k(1, int(1)) - &q, Relation::Ge),
            ],
        )
        .unwrap();
        let v = decide_conjunction(&s).unwrap();
        assert!(v.is_sat());
        let w = v.witness.unwrap();
        assert!(w[0] > rat(1, 5) && w[0] < rat(3, 8));
        assert!(s.holds_at(&w).unwrap());
    }

    #[test]
    fn circle_misses_half_plane() {
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let circle = &(&(&x * &x) + &(&y * &y)) - &k(2, int(1));
        let s = System::new(
            vars(2),
            vec![
                cond(circle.clone(), Relation::Eq),
                cond(&x - &k(2, int(2)), Relation::Ge),
            ],
        )
        .unwrap();
        assert_eq!(decide_conjunction(&s).unwrap().status, Status::Unsat);

        let s = System::new(
            vars(2),
            vec![
                cond(circle, Relation::Eq),
                cond(&x - &k(2, rat(1, 2)), Relation::Ge),
            ],
        )
        .unwrap();
        assert!(decide_conjunction(&s).unwrap().is_sat());
    }

    #[test]
    fn tangency_point_is_found_exactly() {
        // x^2 + y^2 <= 1 and x + y >= sqrt(2) meet only at (1/sqrt2, 1/sqrt2):
        // phrased without radicals as x = y, 2x^2 = 1, x > 0.
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let s = System::new(
            vars(2),
            vec![
                cond(&(&(&x * &x) + &(&y * &y)) - &k(2, int(1)), Relation::Eq),
                cond(&(&x * &y).scale(&int(2)) - &k(2, int(1)), Relation::Ge),
                cond(x.clone(), Relation::Gt),
            ],
        )
        .unwrap();
        let v = decide_conjunction(&s).unwrap();
        assert!(v.is_sat());
        assert!(v.witness.is_none(), "the only solution is irrational");

        // perturbing the product bound past 1/2 leaves nothing
        let s = System::new(
            vars(2),
            vec![
                cond(&(&(&x * &x) + &(&y * &y)) - &k(2, int(1)), Relation::Le),
                cond(&(&x * &y) - &k(2, rat(51, 100)), Relation::Ge),
            ],
        )
        .unwrap();
        assert_eq!(decide_conjunction(&s).unwrap().status, Status::Unsat);
    }

    #[test]
    fn linear_faces_give_rational_witnesses() {
        // q1 + q2 <= 1, q1 >= 0, q2 >= 0, q1*q2 <= 0, q1 - q2 > 1/2:
        // only the edge q2 = 0 with q1 in (1/2, 1] works.
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let s = System::new(
            vars(2),
            vec![
                cond(&(&k(2, int(1)) - &x) - &y, Relation::Ge),
                cond(x.clone(), Relation::Ge),
                cond(y.clone(), Relation::Ge),
                cond(&x * &y, Relation::Le),
                cond(&(&x - &y) - &k(2, rat(1, 2)), Relation::Gt),
            ],
        )
        .unwrap();
        let v = decide_conjunction(&s).unwrap();
        assert!(v.is_sat());
        let w = v.witness.expect("rational witness on the face");
        assert!(w[1].is_zero());
        assert!(s.holds_at(&w).unwrap());
    }

    #[test]
    fn cell_limit_is_enforced() {
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let s = System::new(
            vars(2),
            vec![cond(&(&(&x * &x) + &(&y * &y)) - &k(2, int(1)), Relation::Eq)],
        )
        .unwrap();
        let full = decide_conjunction(&s).unwrap();
        assert!(full.stats.cells > 1);
        let tight = Limits {
            max_cells: full.stats.cells - 1,
            ..Limits::default()
        };
        assert!(matches!(
            decide_with(&s, &tight),
            Err(Error::ResourceExceeded {
                resource: Resource::Cells,
                ..
            })
        ));
        let exact = Limits {
            max_cells: full.stats.cells,
            ..Limits::default()
        };
        assert_eq!(decide_with(&s, &exact).unwrap(), full);
    }

    fn strict_sat(n: usize, conds: &[SignCondition], open: bool) -> bool {
        let limits = Limits::default();
        let mut stats = DecideStats::default();
        let levels = projection_levels(n, conds, open, &limits, &mut stats).unwrap();
        let mut by_level = vec![Vec::new(); n];
        for c in conds {
            by_level[c.poly.main_var().unwrap()].push(c.clone());
        }
        let mut lifter = Lifter {
            levels,
            conds: by_level,
            strict_only: true,
            limits: &limits,
            stats: &mut stats,
            point: Point::new(n),
        };
        lifter.lift(0).unwrap()
    }

    #[test]
    fn open_projection_agrees_with_full_projection() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut sat = 0;
        for _ in 0..150 {
            let n = rng.gen_range(2..=3);
            let conds: Vec<SignCondition> = (0..rng.gen_range(2..=3))
                .map(|_| {
                    let mut p = k(n, int(rng.gen_range(-3..=3)));
                    for _ in 0..3 {
                        let exps: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=1)).collect();
                        let exps = if rng.gen_bool(0.3) {
                            let mut e = vec![0; n];
                            e[rng.gen_range(0..n)] = 2;
                            e
                        } else {
                            exps
                        };
                        p = &p + &MPoly::monomial(exps, int(rng.gen_range(-3..=3)));
                    }
                    let rel = if rng.gen_bool(0.5) { Relation::Gt } else { Relation::Lt };
                    cond(p, rel)
                })
                .filter(|c| !c.poly.is_constant())
                .collect();
            if conds.is_empty() {
                continue;
            }
            let open = strict_sat(n, &conds, true);
            assert_eq!(open, strict_sat(n, &conds, false), "{conds:?}");
            sat += open as usize;
        }
        assert!(sat > 10 && sat < 140, "{sat}");
    }
}
