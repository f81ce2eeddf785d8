use std::path::Path;

use extopt_core::continuous::tau;
use extopt_core::oracle::{brute_force_combinatorial, verify_conjecture, VerifyConfig, DEFAULT_BRUTE_FORCE_CAP};
use extopt_core::rational::from_usize;
use extopt_core::{format_rational, solve_combinatorial, solve_continuous, Domain, Error, Instance, Rational, Status};
use num_traits::{Signed, ToPrimitive};
use serde_json::{json, Value};

use crate::Failure;

pub const HEADER: [&str; 11] = [
    "n",
    "x",
    "w",
    "m",
    "r",
    "delta_star",
    "tau_u1",
    "tau_u2",
    "objective_closed",
    "objective_oracle",
    "status",
];

pub struct Plan {
    pub n_lo: usize,
    pub n_hi: usize,
    pub x: Rational,
    pub w_lo: Rational,
    pub w_hi: Rational,
    pub w_step: Rational,
    pub domain: Domain,
    /// Run an oracle on every row.
    pub oracle: Option<VerifyConfig>,
    pub cap: u128,
}

pub struct Row {
    inst: Instance,
    delta_star: usize,
    objective_closed: Rational,
    objective_oracle: Option<String>,
    status: Status,
}

impl Row {
    fn fields(&self) -> Vec<String> {
        let i = &self.inst;
        vec![
            i.n().to_string(),
            format_rational(i.x()),
            format_rational(i.w()),
            i.m().to_string(),
            format_rational(i.r()),
            self.delta_star.to_string(),
            tau(i.n(), i.m()).upper.to_string(),
            tau(i.n(), i.m() + 1).upper.to_string(),
            format_rational(&self.objective_closed),
            self.objective_oracle.clone().unwrap_or_default(),
            self.status.as_str().to_string(),
        ]
    }

    pub fn to_json(&self) -> Value {
        let mut obj = serde_json::Map::new();
        for (k, v) in HEADER.iter().zip(self.fields()) {
            obj.insert((*k).into(), json!(v));
        }
        Value::Object(obj)
    }
}

impl Plan {
    /// Instances in row order: `n` ascending, then `w` ascending. Points with
    /// `w >= n*x` are skipped.
    pub fn instances(&self) -> Result<Vec<Instance>, Failure> {
        if !self.w_step.is_positive() {
            return Err(Failure::usage("--w-step must be positive"));
        }
        if self.n_lo == 0 {
            return Err(Failure::usage("n must be at least 1"));
        }
        if self.n_lo > self.n_hi || self.w_lo > self.w_hi {
            return Ok(Vec::new());
        }
        let steps = ((&self.w_hi - &self.w_lo) / &self.w_step)
            .floor()
            .to_integer()
            .to_u128()
            .and_then(|s| s.checked_add(1))
            .unwrap_or(u128::MAX);
        let total = steps.saturating_mul((self.n_hi - self.n_lo + 1) as u128);
        if total > self.cap {
            return Err(Failure::usage(format!(
                "sweep covers {total} instances, above the cap of {}",
                self.cap
            )));
        }
        let mut out = Vec::new();
        for n in self.n_lo..=self.n_hi {
            let nx = &self.x * from_usize(n);
            for k in 0..steps {
                let w = &self.w_lo + &self.w_step * Rational::from_integer(k.into());
                if !w.is_positive() || w >= nx {
                    continue;
                }
                out.push(Instance::new(n, self.x.clone(), w).map_err(Failure::from)?);
            }
        }
        Ok(out)
    }

    pub fn row(&self, inst: Instance) -> Result<Row, Failure> {
        let comb = solve_combinatorial(&inst)?;
        let delta_star = comb.delta.as_ref().map_or(inst.n() + 1, |c| c.delta_star);
        let (objective_closed, objective_oracle, status) = match self.domain {
            Domain::Combinatorial => {
                let (oracle, status) = match &self.oracle {
                    None => (None, comb.status),
                    Some(_) => match brute_force_combinatorial(&inst, DEFAULT_BRUTE_FORCE_CAP) {
                        Ok((_, best)) => {
                            let status = if best == comb.objective {
                                Status::Confirmed
                            } else {
                                Status::Violated
                            };
                            (Some(format_rational(&best)), status)
                        }
                        Err(Error::SizeCap { .. }) => (None, Status::Inconclusive),
                        Err(e) => return Err(e.into()),
                    },
                };
                (comb.objective, oracle, status)
            }
            Domain::Continuous => {
                let cont = solve_continuous(&inst)?;
                match &self.oracle {
                    None => (cont.objective, None, cont.status),
                    Some(cfg) => {
                        let rep = verify_conjecture(&inst, cfg)?;
                        (cont.objective, Some(rep.oracle_objective.to_string()), rep.status)
                    }
                }
            }
        };
        Ok(Row {
            inst,
            delta_star,
            objective_closed,
            objective_oracle,
            status,
        })
    }
}

pub fn write_csv(path: &Path, rows: &[Row]) -> Result<(), Failure> {
    let unwritable = |e: csv::Error| Failure::usage(format!("cannot write {}: {e}", path.display()));
    let mut out = csv::Writer::from_path(path).map_err(unwritable)?;
    out.write_record(HEADER).map_err(unwritable)?;
    for row in rows {
        out.write_record(row.fields()).map_err(unwritable)?;
    }
    out.flush()
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

/// One status for the whole table.
pub fn overall(rows: &[Row], with_oracle: bool) -> Status {
    let has = |s: Status| rows.iter().any(|r| r.status == s);
    if has(Status::Violated) {
        Status::Violated
    } else if has(Status::Inconclusive) {
        Status::Inconclusive
    } else if with_oracle {
        Status::Confirmed
    } else if has(Status::Conjectured) {
        Status::Conjectured
    } else {
        Status::Proven
    }
}

pub fn summary(rows: &[Row], output: Option<&Path>) -> Value {
    let count = |s: Status| rows.iter().filter(|r| r.status == s).count();
    let by_status: serde_json::Map<String, Value> = [
        Status::Proven,
        Status::Conjectured,
        Status::Confirmed,
        Status::Violated,
        Status::Inconclusive,
    ]
    .into_iter()
    .filter(|s| count(*s) > 0)
    .map(|s| (s.as_str().to_string(), json!(count(s))))
    .collect();
    json!({
        "rows": rows.len(),
        "output": output.map(|p| p.display().to_string()),
        "by_status": by_status,
        "table": rows.iter().map(Row::to_json).collect::<Vec<_>>(),
    })
}
