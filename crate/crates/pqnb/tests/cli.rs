use std::path::PathBuf;
use std::process::{Command, Output};

use pqnb::format::parse_file;
use pqnb_core::gauge::structure_difference;

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn pqnb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pqnb")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn exit_codes() {
    assert_eq!(pqnb(&["check", &data("rescaled_identity.pqnb")]).status.code(), Some(0));
    let broken = pqnb(&["check", &data("rescaled_identity_broken.pqnb")]);
    assert_eq!(broken.status.code(), Some(1));
    assert!(stdout(&broken).contains("[FAIL] torsion"));

    let bad = tmp("bad.pqnb");
    std::fs::write(&bad, "manifold coords=x1,x2\nbivector P { [1,2] = \"x9\" }\n").unwrap();
    let o = pqnb(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("2:"));
    assert_eq!(pqnb(&["check", "/nonexistent.pqnb"]).status.code(), Some(2));
    assert_eq!(pqnb(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn kind_override_checks_less() {
    // the broken file still carries a Poisson bivector
    let o = pqnb(&["check", "--kind", "poisson", &data("rescaled_identity_broken.pqnb")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn gauge_and_inverse_round_trip() {
    let there = tmp("there.pqnb");
    let o = pqnb(&["gauge", &data("rescaled_identity.pqnb"), "-o", there.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));

    // append the negated gauge and send the result back
    let mut text = std::fs::read_to_string(&there).unwrap();
    text.push_str("gauge minusB { [2,3] = \"-1\" }\n");
    let with_inverse = tmp("with_inverse.pqnb");
    std::fs::write(&with_inverse, text).unwrap();
    let back = tmp("back.pqnb");
    let o = pqnb(&["gauge", with_inverse.to_str().unwrap(), "--form", "minusB", "-o", back.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));

    let orig = parse_file(&std::fs::read_to_string(data("rescaled_identity.pqnb")).unwrap()).unwrap();
    let back = parse_file(&std::fs::read_to_string(&back).unwrap()).unwrap();
    let diff = structure_difference(&orig.pqnb().unwrap(), &back.pqnb().unwrap());
    assert!(diff.iter().all(|d| d.is_zero()));
}

#[test]
fn gauge_output_rechecks() {
    let o = pqnb(&["gauge", &data("rescaled_identity.pqnb"), "--form", "B2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# pqnb: PASS"));
    let out = tmp("gauged.pqnb");
    std::fs::write(&out, &text).unwrap();
    assert_eq!(pqnb(&["check", out.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn gauge_of_failing_input_is_rejected_unless_trusted() {
    let o = pqnb(&["gauge", &data("rescaled_identity_broken.pqnb")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("failed: torsion"));
    assert_eq!(pqnb(&["--trust", "gauge", &data("rescaled_identity_broken.pqnb")]).status.code(), Some(0));
}

#[test]
fn compose_agrees() {
    let o = pqnb(&["compose", &data("rescaled_identity.pqnb")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("[PASS] composition"));
    assert_eq!(pqnb(&["compose", &data("poisson.pqnb")]).status.code(), Some(2));
}

#[test]
fn conformal_change() {
    let o = pqnb(&["conformal", &data("poisson.pqnb"), "--casimir", "x3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("exp(x3)"));
    let o = pqnb(&["conformal", &data("poisson.pqnb"), "--casimir", "x1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("nonzero x2 component"));
    for v in ["1", "2"] {
        let o = pqnb(&["conformal", &data("poisson.pqnb"), "--casimir", "x3", "--variant", v]);
        assert_eq!(o.status.code(), Some(0), "variant {v}: {}", stdout(&o));
    }
    assert_eq!(pqnb(&["conformal", &data("poisson.pqnb"), "--casimir", "x3", "--variant", "3"]).status.code(), Some(2));
}

#[test]
fn reduce_and_commute() {
    let out = tmp("reduced.pqnb");
    let o = pqnb(&["reduce", &data("block.pqnb"), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let reduced = parse_file(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(reduced.chart.coords(), ["q1", "q2"]);
    assert_eq!(pqnb(&["check", out.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(pqnb(&["commute", &data("block.pqnb")]).status.code(), Some(0));
    // no reduction block
    assert_eq!(pqnb(&["reduce", &data("rescaled_identity.pqnb")]).status.code(), Some(2));
}

#[test]
fn reduce_reports_failed_hypothesis() {
    let src = std::fs::read_to_string(data("block.pqnb")).unwrap().replace("define g = \"1 + c1^2\"", "define g = \"c1\"");
    let src = src
        .replace("\"-2*c1/f\"", "\"-1/f\"")
        .replace("\"4*c1*g/f\"", "\"2*c1/f\"");
    let f = tmp("linear.pqnb");
    std::fs::write(&f, src).unwrap();
    assert_eq!(pqnb(&["check", f.to_str().unwrap()]).status.code(), Some(0));
    let o = pqnb(&["reduce", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("failed: (iv)"));
}

#[test]
fn gc_commands() {
    assert_eq!(pqnb(&["check", &data("symplectic.pqnb")]).status.code(), Some(0));
    let o = pqnb(&["gauge", &data("symplectic.pqnb")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn json_report_is_deterministic() {
    let a = tmp("a.json");
    let b = tmp("b.json");
    for p in [&a, &b] {
        let o = pqnb(&["check", "--report", p.to_str().unwrap(), &data("rescaled_identity_broken.pqnb")]);
        assert_eq!(o.status.code(), Some(1));
    }
    let (ja, jb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ja, jb);
    let v: serde_json::Value = serde_json::from_slice(&ja).unwrap();
    assert_eq!(v["exit_code"], 1);
    let item = &v["reports"][0]["items"][5];
    assert_eq!(item["label"], "torsion");
    assert_eq!(item["outcome"]["verdict"], "nonzero");
    assert!(item["outcome"]["witness"]["x3"].is_number());

    let c = tmp("c.json");
    pqnb(&["check", "--seed", "7", "--report", c.to_str().unwrap(), &data("rescaled_identity_broken.pqnb")]);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&c).unwrap()).unwrap();
    assert_eq!(v["reports"][0]["seed"], 7);
}
