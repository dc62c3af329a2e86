//! Text and JSON renderings of verification reports.

use std::fmt::Write as _;

use pqnb_core::expr::ZeroVerdict;
use pqnb_core::structures::{Outcome, VerificationReport};
use serde_json::{json, Value};

fn witness_text(names: &[String], w: &[f64]) -> String {
    let parts: Vec<String> = w
        .iter()
        .enumerate()
        .map(|(i, v)| format!("{}={v}", names.get(i).map(String::as_str).unwrap_or("?")))
        .collect();
    format!("({})", parts.join(", "))
}

fn outcome_text(names: &[String], o: &Outcome) -> String {
    match o {
        Outcome::Verdict(ZeroVerdict::ZeroExact) => "exact".into(),
        Outcome::Verdict(ZeroVerdict::ZeroNumeric { max_residual }) => format!("numeric, max residual {max_residual:.3e}"),
        Outcome::Verdict(ZeroVerdict::NonZero { witness, residual }) => {
            format!("nonzero at {} (residual {residual:.3e})", witness_text(names, witness))
        }
        Outcome::Flag(true) => "holds".into(),
        Outcome::Flag(false) => "fails".into(),
        Outcome::Nested(r) => format!("{}/{} items", r.items.iter().filter(|i| i.outcome.passed()).count(), r.items.len()),
        Outcome::Error(e) => format!("error: {e}"),
    }
}

fn mark(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn render_into(out: &mut String, r: &VerificationReport, names: &[String], depth: usize) {
    let pad = "  ".repeat(depth);
    let passed = r.items.iter().filter(|i| i.outcome.passed()).count();
    let _ = writeln!(out, "{pad}{}: {} ({passed}/{})", r.title, mark(r.passed()), r.items.len());
    let width = r.items.iter().map(|i| i.label.len()).max().unwrap_or(0);
    for item in &r.items {
        let _ = writeln!(
            out,
            "{pad}  [{}] {:width$}  {}  -- {}",
            mark(item.outcome.passed()),
            item.label,
            item.anchor,
            outcome_text(names, &item.outcome),
        );
        if let Outcome::Nested(inner) = &item.outcome {
            render_into(out, inner, names, depth + 2);
        }
    }
}

/// Human-readable report; `names` labels witness coordinates.
pub fn render_text(r: &VerificationReport, names: &[String]) -> String {
    let mut out = String::new();
    render_into(&mut out, r, names, 0);
    let _ = writeln!(out, "seed: {:#x}", r.seed());
    out
}

fn outcome_json(names: &[String], o: &Outcome) -> Value {
    match o {
        Outcome::Verdict(ZeroVerdict::ZeroExact) => json!({ "verdict": "zero-exact" }),
        Outcome::Verdict(ZeroVerdict::ZeroNumeric { max_residual }) => {
            json!({ "verdict": "zero-numeric", "max_residual": max_residual })
        }
        Outcome::Verdict(ZeroVerdict::NonZero { witness, residual }) => {
            let point: serde_json::Map<String, Value> = witness
                .iter()
                .enumerate()
                .map(|(i, v)| (names.get(i).cloned().unwrap_or_else(|| format!("#{i}")), json!(v)))
                .collect();
            json!({ "verdict": "nonzero", "witness": point, "residual": residual })
        }
        Outcome::Flag(b) => json!({ "verdict": if *b { "holds" } else { "fails" } }),
        Outcome::Nested(r) => json!({ "verdict": "nested", "report": report_json(r, names) }),
        Outcome::Error(e) => json!({ "verdict": "error", "message": e }),
    }
}

/// Structured report. Field order is fixed, so equal inputs give
/// byte-identical output.
pub fn report_json(r: &VerificationReport, names: &[String]) -> Value {
    let items: Vec<Value> = r
        .items
        .iter()
        .map(|i| {
            json!({
                "label": i.label,
                "identity": i.anchor,
                "passed": i.outcome.passed(),
                "outcome": outcome_json(names, &i.outcome),
            })
        })
        .collect();
    json!({
        "title": r.title,
        "passed": r.passed(),
        "seed": r.seed(),
        "points": r.policy.points,
        "tolerance": r.policy.tolerance,
        "items": items,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use pqnb_core::expr::SamplingPolicy;

    #[test]
    fn renders_items_and_witness() {
        let mut r = VerificationReport::new("demo", &SamplingPolicy::default());
        r.push("a", "x = x", Outcome::Verdict(ZeroVerdict::ZeroExact));
        r.push(
            "b",
            "x = 0",
            Outcome::Verdict(ZeroVerdict::NonZero { witness: vec![0.5], residual: 0.25 }),
        );
        let names = vec!["x1".to_string()];
        let t = render_text(&r, &names);
        assert!(t.starts_with("demo: FAIL (1/2)"));
        assert!(t.contains("nonzero at (x1=0.5)"));
        let j = report_json(&r, &names);
        assert_eq!(j["items"][1]["outcome"]["witness"]["x1"], json!(0.5));
        assert_eq!(serde_json::to_string(&j).unwrap(), serde_json::to_string(&report_json(&r, &names)).unwrap());
    }
}
