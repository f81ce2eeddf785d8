//! Checks the duo-equidistant vector against independent oracles.
//!
//! A float oracle may only refute the construction after its point has been
//! rationalized and re-evaluated exactly; the lattice oracle is exact on its
//! own.

use num_traits::{Signed, Zero};

use crate::continuous::{regime, solve_continuous, Regime};
use crate::error::Result;
use crate::model::{objective, Instance};
use crate::oracle::grid::{binomial, duo_resolution, grid_search, lattice_minimum};
use crate::oracle::subgradient::{projected_subgradient, SubgradientConfig};
use crate::rational::{rationalize, to_f64, Rational};
use crate::report::Status;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub subgradient: SubgradientConfig,
    /// Largest oracle excess over the constructed value that still counts
    /// as agreement.
    pub agreement: f64,
    /// Lattice size up to which plain enumeration runs when the dynamic
    /// program does not apply; 0 disables the lattice oracle altogether.
    pub grid_cap: u128,
    /// Memo budget for the lattice dynamic program.
    pub lattice_states: usize,
    /// Lattice resolution; `None` picks the coarsest lattice containing the
    /// constructed vector.
    pub resolution: Option<usize>,
    /// Denominator cap when rationalizing a float minimizer.
    pub max_denominator: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            subgradient: SubgradientConfig::default(),
            agreement: 1e-6,
            grid_cap: 200_000,
            lattice_states: 20_000,
            resolution: None,
            max_denominator: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub instance: Instance,
    pub regime: Regime,
    pub constructed_objective: Rational,
    pub oracle_objective: f64,
    /// `oracle_objective - constructed_objective`.
    pub gap: f64,
    pub status: Status,
    pub oracle_minimizer: Vec<f64>,
    pub oracle_converged: bool,
    /// Exact lattice minimum and its resolution, when within `grid_cap`.
    pub grid: Option<(usize, Rational)>,
    /// Exact value at the rationalized oracle point, when a refutation was
    /// attempted.
    pub exact_recheck: Option<Rational>,
}

/// Rounds a float point to nearby rationals and rescales it to total mass
/// exactly `w`.
fn exact_point(point: &[f64], inst: &Instance, max_den: u64) -> Option<Vec<Rational>> {
    let mut entries: Vec<Rational> = point
        .iter()
        .map(|&p| {
            let q = rationalize(p, max_den);
            if q.is_negative() {
                Rational::zero()
            } else {
                q
            }
        })
        .collect();
    let mass = entries.iter().fold(Rational::zero(), |a, e| a + e);
    if mass.is_zero() {
        return None;
    }
    let scale = inst.w() / mass;
    for e in &mut entries {
        *e *= &scale;
    }
    Some(entries)
}

/// Compares the constructed continuous solution with the subgradient oracle
/// and, when small enough, the exact lattice oracle.
pub fn verify_conjecture(inst: &Instance, cfg: &VerifyConfig) -> Result<VerifyReport> {
    let constructed = solve_continuous(inst)?;
    let target = to_f64(&constructed.objective);
    let tolerance = cfg.subgradient.tolerance;

    let oracle = projected_subgradient(inst, &cfg.subgradient);
    let gap = oracle.value - target;

    let resolution = cfg.resolution.unwrap_or_else(|| duo_resolution(inst));
    let grid = if cfg.grid_cap == 0 {
        None
    } else if let Ok((_, best)) = lattice_minimum(inst, resolution, cfg.lattice_states) {
        Some((resolution, best))
    } else if binomial(resolution + inst.n() - 1, inst.n() - 1) <= cfg.grid_cap {
        Some((resolution, grid_search(inst, resolution, cfg.grid_cap)?.1))
    } else {
        None
    };

    let mut exact_recheck = None;
    let status = if grid.as_ref().is_some_and(|(_, g)| *g < constructed.objective) {
        Status::Violated
    } else if gap < -10.0 * tolerance {
        let value = exact_point(&oracle.point, inst, cfg.max_denominator)
            .map(|p| objective(&p, inst.x()));
        let refuted = value.as_ref().is_some_and(|v| *v < constructed.objective);
        exact_recheck = value;
        if refuted {
            Status::Violated
        } else {
            Status::Inconclusive
        }
    } else if gap >= -tolerance && gap <= cfg.agreement {
        Status::Confirmed
    } else {
        Status::Inconclusive
    };

    Ok(VerifyReport {
        instance: inst.clone(),
        regime: regime(inst),
        constructed_objective: constructed.objective,
        oracle_objective: oracle.value,
        gap,
        status,
        oracle_minimizer: oracle.point,
        oracle_converged: oracle.converged,
        grid,
        exact_recheck,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{parse_rational, rat};

    fn inst(n: usize, x: &str, w: &str) -> Instance {
        Instance::new(n, parse_rational(x).unwrap(), parse_rational(w).unwrap()).unwrap()
    }

    #[test]
    fn proven_regime_is_confirmed() {
        let rep = verify_conjecture(&inst(7, "1", "2.2"), &VerifyConfig::default()).unwrap();
        assert_eq!(rep.status, Status::Confirmed);
        assert!(rep.gap.abs() <= 1e-6);
        assert_eq!(rep.grid, Some((11, rat(32, 5))));
    }

    #[test]
    fn conjectured_regime_is_confirmed() {
        let rep = verify_conjecture(&inst(9, "1", "2.5"), &VerifyConfig::default()).unwrap();
        assert_eq!(rep.regime, Regime::Conjectured);
        assert_eq!(rep.status, Status::Confirmed, "{rep:?}");
    }

    #[test]
    fn integer_regime_is_confirmed() {
        let rep = verify_conjecture(&inst(8, "1", "3"), &VerifyConfig::default()).unwrap();
        assert_eq!(rep.status, Status::Confirmed);
        assert!(rep.gap.abs() <= 1e-6);
        assert_eq!(rep.constructed_objective, rat(6, 1));
    }

    #[test]
    fn starved_oracle_is_inconclusive() {
        let cfg = VerifyConfig {
            subgradient: SubgradientConfig {
                max_iters: 1,
                restarts: 1,
                ..Default::default()
            },
            grid_cap: 0,
            ..Default::default()
        };
        let rep = verify_conjecture(&inst(12, "1", "3.5"), &cfg).unwrap();
        assert_eq!(rep.status, Status::Inconclusive);
        assert!(!rep.oracle_converged);
    }

    #[test]
    fn float_noise_cannot_refute() {
        // a point that looks better in floats but is not exactly better
        let i = inst(7, "1", "2.2");
        let p = exact_point(&[0.0, 0.2, 0.8, 0.2, 0.8, 0.2, 0.0], &i, 1_000_000).unwrap();
        assert_eq!(objective(&p, i.x()), rat(32, 5));
    }
}
