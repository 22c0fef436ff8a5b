//! Convergence report JSON.

use serde_json::{json, Value};
use teichflow::flow::Report;

use crate::numfmt::round12;

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(round12(x))
    } else if x.is_infinite() {
        json!(if x > 0.0 { "inf" } else { "-inf" })
    } else {
        Value::Null
    }
}

pub fn report_json(r: &Report) -> Value {
    let limit = r.limit.as_ref().map_or(Value::Null, |l| {
        json!({
            "family": l.family().iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "values": l.values().iter().map(|v| num(*v)).collect::<Vec<_>>(),
        })
    });
    json!({
        "limit": limit,
        "rate": num(r.rate),
        "tol": num(r.tol),
        "window": r.window,
        "K": num(r.k),
        "target_distance": r.target_distance.map_or(Value::Null, num),
        "pass": r.pass,
        "C_hat": r.c_hat.map_or(Value::Null, num),
        "max_residual": num(r.max_residual),
    })
}

pub fn report_to_string(r: &Report) -> String {
    let mut s = serde_json::to_string_pretty(&report_json(r)).expect("json values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::default_earthquake;
    use teichflow::boundary::foliation_vec;
    use teichflow::flow::{convergence_report, run_flow};
    use teichflow::FoliationVector;

    #[test]
    fn report_shape() {
        let tr = run_flow(&default_earthquake()).unwrap();
        let target = foliation_vec(FoliationVector::new(1.0, 0.0).unwrap(), tr.family()).unwrap();
        let rep = convergence_report(&tr, Some(&target), 1e-2, 3).unwrap();
        let v = report_json(&rep);
        for key in ["limit", "rate", "tol", "window", "K", "pass", "target_distance", "C_hat"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["pass"], json!(true));
        let mut inf = rep.clone();
        inf.k = f64::INFINITY;
        inf.limit = None;
        let v = report_json(&inf);
        assert_eq!(v["K"], json!("inf"));
        assert_eq!(v["limit"], Value::Null);
    }
}
