//! Report serialization: a versioned JSON envelope and fixed-header CSV.

use serde::Serialize;

use crate::audit::AuditReport;
use crate::bounds::BoundReport;
use crate::counterexample::{CEReport, Estimate};
use crate::error::{Error, Result};
use crate::lemmacov::CovReport;
use crate::probcore::rational::{fmt_rational, to_f64};
use crate::probcore::Rational;

pub const SCHEMA: u32 = 1;
pub const TOOL: &str = "genbound";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub schema: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a C,
    pub result: &'a R,
    pub ok: bool,
}

pub fn envelope_json<C: Serialize, R: Serialize>(command: &str, config: &C, result: &R, ok: bool) -> Result<String> {
    let env = Envelope { schema: SCHEMA, tool: TOOL, version: VERSION, command, config, result, ok };
    let mut s = serde_json::to_string_pretty(&env).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn write_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn decimal(r: &Rational) -> String {
    to_f64(r).to_string()
}

pub const BOUND_HEADER: [&str; 6] = ["boundName", "lhs", "lhs_decimal", "rhs", "slack", "holds"];

fn bound_row(b: &BoundReport) -> Vec<String> {
    vec![
        b.name.clone(),
        b.lhs_exact.clone().unwrap_or_default(),
        b.lhs.to_string(),
        b.rhs.to_string(),
        b.slack.to_string(),
        b.holds.to_string(),
    ]
}

pub fn bounds_csv(bounds: &[BoundReport]) -> Result<String> {
    write_csv(&BOUND_HEADER, bounds.iter().map(bound_row))
}

/// Long format: one row per bound per audited setting.
pub fn audit_csv(a: &AuditReport) -> Result<String> {
    let mut header = vec!["seed"];
    header.extend(BOUND_HEADER);
    let rows = a.per_setting.iter().flat_map(|s| {
        s.bounds.iter().map(move |b| {
            let mut r = vec![s.seed.to_string()];
            r.extend(bound_row(b));
            r
        })
    });
    write_csv(&header, rows)
}

pub const COV_HEADER: [&str; 13] = [
    "n0",
    "n1",
    "n",
    "p_joint",
    "p_joint_decimal",
    "p_marg",
    "p_marg_decimal",
    "cov",
    "cov_decimal",
    "cov_ratio",
    "ratio_max",
    "ratio_max_decimal",
    "p_marg_sq",
];

pub fn cov_csv(rows: &[CovReport]) -> Result<String> {
    write_csv(
        &COV_HEADER,
        rows.iter().map(|r| {
            vec![
                r.n0.to_string(),
                r.n1.to_string(),
                r.n.to_string(),
                fmt_rational(r.p_joint.value()),
                decimal(r.p_joint.value()),
                fmt_rational(r.p_marg.value()),
                decimal(r.p_marg.value()),
                fmt_rational(&r.cov),
                decimal(&r.cov),
                r.cov_ratio.map(|x| x.to_string()).unwrap_or_default(),
                r.ratio_max.as_ref().map(fmt_rational).unwrap_or_default(),
                r.ratio_max.as_ref().map(decimal).unwrap_or_default(),
                fmt_rational(&r.p_marg_sq),
            ]
        }),
    )
}

pub const COUNTEREXAMPLE_HEADER: [&str; 5] = ["property", "quantity", "exact", "decimal", "holds"];

pub fn counterexample_csv(r: &CEReport) -> Result<String> {
    let mut rows = Vec::new();
    let mut push = |p: &str, q: &str, exact: Option<&Rational>, dec: f64, holds: bool| {
        rows.push(vec![
            p.to_string(),
            q.to_string(),
            exact.map(fmt_rational).unwrap_or_default(),
            dec.to_string(),
            holds.to_string(),
        ]);
    };
    let a = &r.prop_a;
    push("a", "kl_duplicate_free", None, a.kl_duplicate_free, a.holds);
    push("a", "duplicate_prob", Some(a.duplicate_prob.value()), a.duplicate_prob.to_f64(), a.holds);
    if let Some(b) = &r.prop_b {
        push("b", "max_sample_mi", None, b.max_sample_mi, b.holds);
    }
    let c = &r.prop_c;
    push("c", "expected_gap", c.expected_gap.as_ref(), c.estimate, c.holds);
    let d = &r.prop_d;
    let est = |e: &Estimate| (e.exact.as_ref().map(|p| p.value().clone()), e.value);
    for (q, e) in [
        ("risk_in_band", &d.risk_in_band),
        ("proof_event", &d.proof_event),
        ("one_sided_tail", &d.one_sided),
        ("absolute_tail", &d.absolute),
    ] {
        let (x, v) = est(e);
        push("d", q, x.as_ref(), v, d.holds);
    }
    if let Some(g2) = &r.expected_squared_gap {
        push("g2", "expected_squared_gap", Some(g2), to_f64(g2), true);
    }
    write_csv(&COUNTEREXAMPLE_HEADER, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::Term;
    use crate::probcore::rational::rational_from_i64;

    #[test]
    fn envelope_fields() {
        let s = envelope_json("x", &1, &vec![2], true).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["tool"], "genbound");
        assert_eq!(v["command"], "x");
        assert_eq!(v["ok"], true);
        assert!(s.ends_with('\n'));
    }

    #[test]
    fn bound_csv_has_fixed_header() {
        let b = BoundReport::new("b", "L", &rational_from_i64(1, 3), 0.5, None, vec![Term::new("t", 1.0)]);
        let s = bounds_csv(&[b]).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next().unwrap(), "boundName,lhs,lhs_decimal,rhs,slack,holds");
        assert!(lines.next().unwrap().starts_with("b,1/3,0.333"));
    }
}
