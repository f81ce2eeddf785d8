//! JSON shapes for reports. Rationals are `"p/q"` strings; floats go through
//! serde_json, which prints the shortest decimal that round-trips.

use extopt_core::combinatorial::DeltaCertificate;
use extopt_core::continuous::Regime;
use extopt_core::oracle::VerifyReport;
use extopt_core::{format_rational, Instance, QueueParams, Rational, ServiceVector, SolveReport, Status};
use serde_json::{json, Map, Value};

pub const SCHEMA: &str = "extopt/1";

pub fn rational(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

pub fn vector(v: &ServiceVector) -> Value {
    Value::Array(v.entries().iter().map(rational).collect())
}

pub fn instance(inst: &Instance, queue: Option<&QueueParams>) -> Value {
    let mut obj = Map::new();
    obj.insert("n".into(), json!(inst.n()));
    obj.insert("x".into(), rational(inst.x()));
    obj.insert("w".into(), rational(inst.w()));
    if let Some(q) = queue {
        obj.insert(
            "queue".into(),
            json!({
                "lambda": rational(q.lambda()),
                "mu1": rational(q.mu1()),
                "mu2": rational(q.mu2()),
            }),
        );
    }
    Value::Object(obj)
}

fn certificate(c: &DeltaCertificate) -> Value {
    json!({
        "delta1": c.delta1,
        "delta2": c.delta2,
        "delta_star": c.delta_star,
        "a_delta1": rational(&c.a_delta1),
        "a_delta2": rational(&c.a_delta2),
        "delta_minus": rational(&c.delta_minus),
        "delta_plus": rational(&c.delta_plus),
        "linear_scan": c.linear_scan,
    })
}

pub fn regime(r: Regime) -> &'static str {
    match r {
        Regime::Integer => "integer",
        Regime::DuoProven => "duo-proven",
        Regime::Conjectured => "conjectured",
    }
}

pub fn solve_report(rep: &SolveReport) -> Value {
    json!({
        "domain": rep.domain.as_str(),
        "solver": rep.solver,
        "vector": vector(&rep.vector),
        "objective": rational(&rep.objective),
        "closed_form": rep.closed_form.as_ref().map(rational),
        "status": rep.status.as_str(),
        "delta": rep.delta.as_ref().map(certificate),
        "tau": rep.tau.map(|(a, b)| json!({
            "tau_u1": a.upper,
            "tau_l1": a.lower,
            "tau_u2": b.upper,
            "tau_l2": b.lower,
        })),
    })
}

pub fn verify_report(rep: &VerifyReport) -> Value {
    json!({
        "regime": regime(rep.regime),
        "constructed_objective": rational(&rep.constructed_objective),
        "oracle_objective": rep.oracle_objective,
        "gap": rep.gap,
        "status": rep.status.as_str(),
        "oracle_minimizer": rep.oracle_minimizer,
        "oracle_converged": rep.oracle_converged,
        "grid": rep.grid.as_ref().map(|(res, value)| json!({
            "resolution": res,
            "objective": rational(value),
        })),
        "exact_recheck": rep.exact_recheck.as_ref().map(rational),
    })
}

pub fn envelope(command: &str, instance: Value, status: Status, result: Value) -> Value {
    json!({
        "schema": SCHEMA,
        "versions": {
            "tool": env!("CARGO_PKG_VERSION"),
            "schema": SCHEMA,
        },
        "command": command,
        "instance": instance,
        "status": status.as_str(),
        "result": result,
    })
}
