//! Text and JSON renderings of a factorization.

use num_traits::One;
use serde_json::{json, Value};

use crate::bivariate::SparseBivariate;
use crate::cli_app::pipeline::{OutputFormat, RunReport};
use crate::exact_arith::Rat;
use crate::reconstruct::Factorization;

pub const JSON_SCHEMA: &str = "polyfactor/1";

/// `(q1) * (q2) * ...`, prefixed by the constant unless it is 1.
pub fn product_expression(fac: &Factorization) -> String {
    let mut parts: Vec<String> = Vec::new();
    if !fac.constant.is_one() {
        parts.push(if fac.constant.is_integer() {
            fac.constant.to_string()
        } else {
            format!("({})", fac.constant)
        });
    }
    parts.extend(fac.factors.iter().map(|q| format!("({q})")));
    parts.join(" * ")
}

fn rat_json(c: &Rat) -> Value {
    json!({"num": c.numer().to_string(), "den": c.denom().to_string()})
}

fn factor_json(q: &SparseBivariate) -> Value {
    let terms: Vec<Value> = q
        .terms()
        .map(|(m, c)| json!([c.numer().to_string(), c.denom().to_string(), m.m1, m.m2]))
        .collect();
    json!({"terms": terms})
}

pub fn to_json(fac: &Factorization, report: &RunReport) -> Value {
    json!({
        "schema": JSON_SCHEMA,
        "constant": rat_json(&fac.constant),
        "factors": fac.factors.iter().map(factor_json).collect::<Vec<_>>(),
        "report": {
            "s": report.s,
            "area": report.area.to_string(),
            "num_rays": report.num_rays,
            "num_facet_factors": report.num_facet_factors,
            "num_columns": report.num_columns,
            "probe": report.probe.as_str(),
            "seed": report.seed,
        },
    })
}

pub fn emit_output(fac: &Factorization, report: &RunReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => format!("f = {}\n", product_expression(fac)),
        OutputFormat::Json => {
            let mut s = serde_json::to_string(&to_json(fac, report)).expect("json values serialize");
            s.push('\n');
            s
        }
    }
}

/// Per-step timings, one `name: seconds` line each.
pub fn timing_lines(report: &RunReport) -> String {
    report
        .timings
        .iter()
        .map(|(name, t)| format!("{name}: {:.6}s\n", t.as_secs_f64()))
        .collect()
}
