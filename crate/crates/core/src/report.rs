use std::fmt;

use crate::combinatorial::DeltaCertificate;
use crate::continuous::TauPair;
use crate::model::ServiceVector;
use crate::rational::Rational;

/// How much a reported result is backed by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    /// Optimal by a proved closed form.
    Proven,
    /// Built by the unproved duo-equidistant construction.
    Conjectured,
    /// An independent oracle reached the constructed value.
    Confirmed,
    /// An oracle found a strictly better point, rechecked exactly.
    Violated,
    /// The oracle did not settle the question.
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Proven => "PROVEN",
            Status::Conjectured => "CONJECTURED",
            Status::Confirmed => "CONFIRMED",
            Status::Violated => "VIOLATED",
            Status::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    /// Vectors with `m` entries `x` and one entry `r`.
    Combinatorial,
    /// Nonnegative vectors with total mass `w`.
    Continuous,
}

impl Domain {
    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Combinatorial => "combinatorial",
            Domain::Continuous => "continuous",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub domain: Domain,
    pub vector: ServiceVector,
    pub objective: Rational,
    /// Closed-form optimum when one is known for this regime.
    pub closed_form: Option<Rational>,
    pub status: Status,
    pub delta: Option<DeltaCertificate>,
    /// `tau(n, m)` and `tau(n, m + 1)`.
    pub tau: Option<(TauPair, TauPair)>,
    /// Which construction produced the vector.
    pub solver: &'static str,
}
