//! Exact satisfiability of conjunctions of polynomial sign conditions over
//! the reals.

mod decide;
mod descartes;
pub mod point;
pub mod project;
pub mod sturm;

use std::fmt;

use crate::algebra::rational::{format_rational, Rational};
use crate::algebra::MPoly;
use crate::error::{Error, Result};

pub use decide::{decide_conjunction, decide_with};
pub use project::{cad_project, open_project};
pub use sturm::{count_roots_in, isolate_real_roots, refine, sign_at, sturm_sequence, AlgebraicNumber};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Gt,
    Ge,
    Eq,
    Ne,
    Lt,
    Le,
}

impl Relation {
    /// Does a value with this sign satisfy `value <rel> 0`?
    pub fn holds(self, sign: i8) -> bool {
        match self {
            Relation::Gt => sign > 0,
            Relation::Ge => sign >= 0,
            Relation::Eq => sign == 0,
            Relation::Ne => sign != 0,
            Relation::Lt => sign < 0,
            Relation::Le => sign <= 0,
        }
    }

    /// Satisfying set is open (no equality part).
    pub fn is_strict(self) -> bool {
        matches!(self, Relation::Gt | Relation::Lt | Relation::Ne)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Gt => ">",
            Relation::Ge => ">=",
            Relation::Eq => "=",
            Relation::Ne => "!=",
            Relation::Lt => "<",
            Relation::Le => "<=",
        }
    }
}

/// `poly <relation> 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignCondition {
    pub poly: MPoly,
    pub relation: Relation,
}

impl SignCondition {
    pub fn new(poly: MPoly, relation: Relation) -> Self {
        SignCondition { poly, relation }
    }

    pub fn holds_at(&self, point: &[Rational]) -> Result<bool> {
        let v = self.poly.eval(point)?;
        Ok(self.relation.holds(crate::algebra::rational::sign(&v)))
    }
}

/// A conjunction of sign conditions over named variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct System {
    variables: Vec<String>,
    conditions: Vec<SignCondition>,
}

impl System {
    pub fn new(variables: Vec<String>, conditions: Vec<SignCondition>) -> Result<Self> {
        for c in &conditions {
            if c.poly.nvars() != variables.len() {
                return Err(Error::VariableMismatch {
                    left: variables.len(),
                    right: c.poly.nvars(),
                });
            }
        }
        Ok(System {
            variables,
            conditions,
        })
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    pub fn conditions(&self) -> &[SignCondition] {
        &self.conditions
    }

    /// Bit-exact check of every condition at a rational point.
    pub fn holds_at(&self, point: &[Rational]) -> Result<bool> {
        for c in &self.conditions {
            if !c.holds_at(point)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.conditions.iter().enumerate() {
            if i > 0 {
                f.write_str(" ; ")?;
            }
            write!(
                f,
                "{} {} 0",
                c.poly.display_with(&self.variables),
                c.relation.symbol()
            )?;
        }
        Ok(())
    }
}

/// Resource budget for one decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    pub max_cells: u64,
    pub max_degree: u32,
    pub max_bits: u64,
    /// Closed linear conditions split into strict/equality faces; beyond
    /// this count they are lifted like any other condition.
    pub max_face_split: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_cells: 1_000_000,
            max_degree: 4096,
            max_bits: 1 << 22,
            max_face_split: 12,
        }
    }
}

/// Work counters of a decision.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DecideStats {
    /// Sample points visited during lifting, over all cases.
    pub cells: u64,
    /// Linear-face cases examined.
    pub cases: u64,
    /// Largest projection polynomial, by total degree.
    pub max_degree: u32,
    /// Largest numerator/denominator bit size among projection polynomials.
    pub max_coeff_bits: u64,
}

impl DecideStats {
    pub fn absorb(&mut self, o: &DecideStats) {
        self.cells += o.cells;
        self.cases += o.cases;
        self.max_degree = self.max_degree.max(o.max_degree);
        self.max_coeff_bits = self.max_coeff_bits.max(o.max_coeff_bits);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Sat,
    Unsat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    /// Rational satisfying point, when one was found.
    pub witness: Option<Vec<Rational>>,
    pub stats: DecideStats,
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        self.status == Status::Sat
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.status, &self.witness) {
            (Status::Unsat, _) => f.write_str("UNSAT"),
            (Status::Sat, None) => f.write_str("SAT"),
            (Status::Sat, Some(w)) => {
                let parts: Vec<String> = w.iter().map(format_rational).collect();
                write!(f, "SAT at ({})", parts.join(", "))
            }
        }
    }
}
