use std::fmt;

use thiserror::Error;

/// Budgeted quantities that can abort a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Resource {
    /// Sample points visited during cell lifting (per decided system).
    Cells,
    /// Total degree of a projection polynomial.
    Degree,
    /// Bit size of a numerator or denominator in a projection polynomial.
    CoefficientBits,
    /// Number of samples or learners an enumeration would produce.
    Enumeration,
    /// Closed linear conditions a decision may split into faces.
    FaceSplit,
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Resource::Cells => "cells",
            Resource::Degree => "degree",
            Resource::CoefficientBits => "coefficient-bits",
            Resource::Enumeration => "enumeration",
            Resource::FaceSplit => "face-split",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("variable order mismatch: {left} vs {right} variables")]
    VariableMismatch { left: usize, right: usize },

    #[error("no value assigned to variable {0}")]
    MissingAssignment(usize),

    #[error("{0}: zero polynomial")]
    ZeroPolynomial(&'static str),

    #[error("{0}: polynomial is constant in the elimination variable")]
    ConstantPolynomial(&'static str),

    #[error("interval endpoint {0} is a root; perturb the endpoint")]
    RootAtEndpoint(String),

    #[error("resource limit exceeded: {resource} reached {observed} (limit {limit})")]
    ResourceExceeded {
        resource: Resource,
        limit: u64,
        observed: u64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("scan stopped after m = {completed_through}: {source}")]
    ScanAborted {
        /// Largest sample size fully decided before the failure (0 if none).
        completed_through: usize,
        source: Box<Error>,
    },
}

impl Error {
    pub fn is_resource(&self) -> bool {
        match self {
            Error::ResourceExceeded { .. } => true,
            Error::ScanAborted { source, .. } => source.is_resource(),
            _ => false,
        }
    }

    /// The budget that ran out, looking through scan wrappers.
    pub fn resource(&self) -> Option<(Resource, u64, u64)> {
        match self {
            Error::ResourceExceeded {
                resource,
                limit,
                observed,
            } => Some((*resource, *limit, *observed)),
            Error::ScanAborted { source, .. } => source.resource(),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
