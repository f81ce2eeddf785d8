//! Closed-form solutions over the continuous set of nonnegative vectors with
//! total mass `w`.
//!
//! With `r = 0` the equidistant placement of `m` masses `x` is optimal. With
//! `r > 0` the solution is a superposition of two equidistant layers: `m`
//! masses of `y = x - r` and `m + 1` masses of `r`. Optimality of the
//! superposition is proved when `tau(n, m)` and `tau(n, m + 1)` share an
//! upper or a lower value, and conjectured otherwise.

use num_traits::{Signed, Zero};

use crate::combinatorial::{build_gamma_member, cumulative_positions};
use crate::error::{Error, Result};
use crate::model::{objective, Instance, ServiceVector};
use crate::rational::{from_usize, int, Rational};
use crate::report::{Domain, SolveReport, Status};

/// Largest and smallest gap of an equidistant placement of `m` masses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TauPair {
    /// `ceil((n+1)/(m+1))`
    pub upper: usize,
    /// `floor((n+1)/(m+1))`
    pub lower: usize,
}

pub fn tau(n: usize, m: usize) -> TauPair {
    TauPair {
        upper: (n + 1).div_ceil(m + 1),
        lower: (n + 1) / (m + 1),
    }
}

/// Which closed form covers an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `r = 0`: equidistant full masses.
    Integer,
    /// `r > 0` and the two tau pairs share a value.
    DuoProven,
    /// `r > 0`, no shared tau value.
    Conjectured,
}

pub fn regime(inst: &Instance) -> Regime {
    if inst.r().is_zero() {
        return Regime::Integer;
    }
    let (t1, t2) = (tau(inst.n(), inst.m()), tau(inst.n(), inst.m() + 1));
    if t1.upper == t2.upper || t1.lower == t2.lower {
        Regime::DuoProven
    } else {
        Regime::Conjectured
    }
}

/// `(tau_u - 1) * (x(n+1) - (w+x) tau_u / 2)` with `tau_u = tau(n, m).upper`.
pub fn closed_form_objective(inst: &Instance) -> Rational {
    let tu = from_usize(tau(inst.n(), inst.m()).upper);
    let x = inst.x();
    (&tu - int(1)) * (x * from_usize(inst.n() + 1) - (inst.w() + x) * &tu / int(2))
}

/// Optimal vector for `w = m*x`: a member of the family with widest gap
/// `tau_u`, checked against the closed form.
pub fn solve_continuous_integer(inst: &Instance) -> Result<SolveReport> {
    if !inst.r().is_zero() {
        return Err(Error::WrongBranch(
            "r > 0; use solve_continuous for the duo-equidistant branch".into(),
        ));
    }
    let t = tau(inst.n(), inst.m());
    let vector = build_gamma_member(inst, t.upper)?;
    let value = objective(vector.entries(), inst.x());
    let closed = closed_form_objective(inst);
    if value != closed {
        return Err(Error::Construction(format!(
            "equidistant vector misses the closed form for {inst}"
        )));
    }
    Ok(SolveReport {
        domain: Domain::Continuous,
        vector,
        objective: value,
        closed_form: Some(closed),
        status: Status::Proven,
        delta: None,
        tau: Some((t, tau(inst.n(), inst.m() + 1))),
        solver: "equidistant",
    })
}

/// Interleaved gap sequences for the `y` layer (`m + 1` gaps) and the `r`
/// layer (`m + 2` gaps), short gaps first. Accepts `0 <= m < n`.
pub fn canonical_gap_profiles(n: usize, m: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    if n == 0 || m >= n {
        return Err(Error::InvalidInput(format!(
            "gap profiles need 0 <= m < n, got n={n} m={m}"
        )));
    }
    let layer = |parts: usize| {
        let short = (n + 1) / parts;
        let count = parts * (1 + short) - n - 1;
        let mut gaps = vec![short; count];
        gaps.extend(std::iter::repeat_n(short + 1, parts - count));
        gaps
    };
    Ok((layer(m + 1), layer(m + 2)))
}

/// Partial sums of the `r`-layer gaps bracket those of the `y` layer:
/// `R(l) <= Y(l) <= R(l + 1)` for `1 <= l <= m + 1`.
pub fn interleaves(gaps_y: &[usize], gaps_r: &[usize]) -> bool {
    if gaps_r.len() != gaps_y.len() + 1 {
        return false;
    }
    let mut r_sum = gaps_r[0];
    let mut y_sum = 0;
    for l in 0..gaps_y.len() {
        y_sum += gaps_y[l];
        let r_next = r_sum + gaps_r[l + 1];
        if !(r_sum <= y_sum && y_sum <= r_next) {
            return false;
        }
        r_sum = r_next;
    }
    true
}

/// Two-layer solution `v_y + v_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuoSolution {
    /// `m` entries equal to `y`.
    pub v_y: ServiceVector,
    /// `m + 1` entries equal to `r`.
    pub v_r: ServiceVector,
    pub combined: ServiceVector,
    pub gaps_y: Vec<usize>,
    pub gaps_r: Vec<usize>,
}

fn layer_vector(n: usize, gaps: &[usize], value: &Rational) -> Vec<Rational> {
    let mut entries = vec![Rational::zero(); n];
    for p in cumulative_positions(gaps) {
        entries[p - 1] = value.clone();
    }
    entries
}

/// Superposes the canonical `y` and `r` layers.
pub fn build_duo(inst: &Instance) -> Result<DuoSolution> {
    if !inst.r().is_positive() {
        return Err(Error::WrongBranch("r = 0 has no remainder layer".into()));
    }
    let n = inst.n();
    let (gaps_y, gaps_r) = canonical_gap_profiles(n, inst.m())?;
    let y_layer = layer_vector(n, &gaps_y, &inst.y());
    let r_layer = layer_vector(n, &gaps_r, inst.r());
    let combined: Vec<Rational> = y_layer.iter().zip(&r_layer).map(|(a, b)| a + b).collect();
    if let Some(i) = combined.iter().position(|e| e > inst.x()) {
        return Err(Error::Construction(format!(
            "entry {} of the duo vector exceeds x for {inst}",
            i + 1
        )));
    }
    let combined = ServiceVector::new(combined)?;
    if combined.sum() != *inst.w() {
        return Err(Error::Construction(format!("duo vector mass differs from w for {inst}")));
    }
    Ok(DuoSolution {
        v_y: ServiceVector::new(y_layer)?,
        v_r: ServiceVector::new(r_layer)?,
        combined,
        gaps_y,
        gaps_r,
    })
}

/// Continuous solver: equidistant for `r = 0`, duo-equidistant otherwise,
/// with the optimality status made explicit.
pub fn solve_continuous(inst: &Instance) -> Result<SolveReport> {
    let regime = regime(inst);
    if regime == Regime::Integer {
        return solve_continuous_integer(inst);
    }
    let duo = build_duo(inst)?;
    let value = objective(duo.combined.entries(), inst.x());
    let (status, closed_form) = match regime {
        Regime::DuoProven => {
            let closed = closed_form_objective(inst);
            if value != closed {
                return Err(Error::Construction(format!(
                    "duo vector misses the closed form for {inst}"
                )));
            }
            (Status::Proven, Some(closed))
        }
        _ => (Status::Conjectured, None),
    };
    Ok(SolveReport {
        domain: Domain::Continuous,
        vector: duo.combined,
        objective: value,
        closed_form,
        status,
        delta: None,
        tau: Some((tau(inst.n(), inst.m()), tau(inst.n(), inst.m() + 1))),
        solver: "duo-equidistant",
    })
}
