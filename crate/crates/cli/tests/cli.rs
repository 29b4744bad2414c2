use std::path::Path;
use std::process::{Command, Output};

fn ecfnorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecfnorm"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const NORMAL_20: &str = "x\n0.12\n-1.3\n0.45\n2.01\n-0.33\n0.9\n-0.71\n1.2\n-0.05\n0.66\n\
-1.8\n0.27\n-0.49\n1.05\n0.38\n-0.92\n0.14\n-0.21\n1.51\n-1.1\n";

#[test]
fn critvals_are_reproducible_and_monotone() {
    let args = [
        "critvals",
        "--m",
        "1",
        "--n",
        "20",
        "--alphas",
        "0.10,0.05,0.01",
        "--replicates",
        "1000",
        "--seed",
        "42",
    ];
    let a = ecfnorm(&args);
    let b = ecfnorm(&args);
    assert_eq!(a.stdout, b.stdout);
    let t = json(&a);
    let cv: Vec<f64> = t["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["critical_value"].as_f64().unwrap())
        .collect();
    assert_eq!(cv.len(), 3);
    assert!(cv[0] > cv[1] && cv[1] > cv[2], "{cv:?}");
    assert_eq!(t["built_at"], "2023-11-14T22:13:20Z");
}

#[test]
fn test_command_with_table() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "x.csv", NORMAL_20);
    let table = dir.path().join("t.json");
    let out = ecfnorm(&[
        "critvals",
        "--m",
        "1",
        "--n",
        "20",
        "--replicates",
        "2000",
        "--seed",
        "1",
        "--out",
        table.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let r = json(&ecfnorm(&[
        "test",
        "--input",
        &data,
        "--critvals",
        table.to_str().unwrap(),
        "--seed",
        "3",
    ]));
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["input"]["n"], 20);
    assert_eq!(r["input"]["header"][0], "x");
    assert_eq!(r["statistic"]["method"]["kind"], "closed-form");
    assert!(r["decision"] == "retain" || r["decision"] == "reject");
    assert!(r["critical_value"].as_f64().unwrap() > 0.0);
    assert!(r["p_value"].is_null());

    // Level missing from the table.
    let out = ecfnorm(&[
        "test",
        "--input",
        &data,
        "--critvals",
        table.to_str().unwrap(),
        "--alpha",
        "0.01",
    ]);
    assert_eq!(out.status.code(), Some(4));
    // Table for another sample size.
    let short = write(dir.path(), "short.csv", "1\n2\n3\n4\n5.5\n");
    let out = ecfnorm(&[
        "test",
        "--input",
        &short,
        "--critvals",
        table.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn test_command_with_simulated_calibration() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(
        dir.path(),
        "x.csv",
        "a;b\n1;2\n2;1.5\n3.5;4\n0.2;0.1\n1.1;-2\n-0.4;0.3\n2.2;2.9\n0.8;-0.5\n",
    );
    let r = json(&ecfnorm(&[
        "test",
        "-i",
        &data,
        "--delim",
        ";",
        "--replicates",
        "200",
        "--Q",
        "256",
        "--seed",
        "9",
    ]));
    assert_eq!(r["input"]["m"], 2);
    let p = r["p_value"].as_f64().unwrap();
    assert!(p > 0.0 && p <= 1.0);
    assert!(r["decision"].is_string());
    assert_eq!(r["calibration"]["source"], "simulated");
    assert!(r["warnings"]
        .as_array()
        .unwrap()
        .iter()
        .any(|w| w.as_str().unwrap().contains("small")));
}

#[test]
fn no_calibration_means_no_decision() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "x.csv", NORMAL_20);
    let out = ecfnorm(&["test", "--input", &data]);
    let r = json(&out);
    assert!(r["decision"].is_null());
    assert!(r["seed_from_entropy"].as_bool().unwrap());
}

#[test]
fn data_errors_exit_with_status_3() {
    let dir = tempfile::tempdir().unwrap();
    let constant = write(dir.path(), "c.csv", "5\n5\n5\n5\n");
    let out = ecfnorm(&["test", "--input", &constant, "--seed", "1"]);
    assert_eq!(out.status.code(), Some(3));
    let bad = write(dir.path(), "b.csv", "1,2\n3,oops\n");
    let out = ecfnorm(&["test", "--input", &bad, "--seed", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2, column 2"));
    let out = ecfnorm(&["test", "--input", "/nonexistent/file.csv"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_with_status_2() {
    assert_eq!(ecfnorm(&["test"]).status.code(), Some(2));
    let out = ecfnorm(&[
        "power", "--suite", "custom", "--alt", "Foo(1)", "--seed", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Foo"));
    let out = ecfnorm(&[
        "power",
        "--suite",
        "custom",
        "--alt",
        "BivN(0,0,1,1)",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = ecfnorm(&[
        "power",
        "--suite",
        "custom",
        "--alt",
        "t(3)",
        "--replicates",
        "0",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn power_writes_both_renderings() {
    let dir = tempfile::tempdir().unwrap();
    let alts = write(
        dir.path(),
        "alts.txt",
        "# custom list\nPearVII(10)\n\nt(5)\n",
    );
    let prefix = dir.path().join("study");
    let out = ecfnorm(&[
        "power",
        "--suite",
        "custom",
        "--alternatives",
        &alts,
        "--n",
        "20",
        "--replicates",
        "100",
        "--critval-replicates",
        "300",
        "--Q",
        "512",
        "--seed",
        "4",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let j: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("study.json")).unwrap())
            .unwrap();
    let rows = j["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["alternative"], "PearVII(10)");
    assert_eq!(rows[1]["m"], 1);
    let text = std::fs::read_to_string(dir.path().join("study.txt")).unwrap();
    assert!(text.contains("PearVII(10)") && text.contains("t(5)"));
}

#[test]
fn power_uses_supplied_tables() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("t.json");
    assert!(ecfnorm(&[
        "critvals",
        "--m",
        "1",
        "--n",
        "15",
        "--replicates",
        "500",
        "--seed",
        "8",
        "--out",
        table.to_str().unwrap(),
    ])
    .status
    .success());
    let args = [
        "power",
        "--suite",
        "custom",
        "--alt",
        "ChiSq(5)",
        "--n",
        "15",
        "--replicates",
        "100",
        "--critval-replicates",
        "0",
        "--critvals",
        table.to_str().unwrap(),
        "--seed",
        "8",
    ];
    let j = json(&ecfnorm(&args));
    assert_eq!(j["calibration"][0]["replicates"], 500);
    // Without a table and without simulation the lookup fails.
    let out = ecfnorm(&args[..args.len() - 4]);
    assert_eq!(out.status.code(), Some(4));
}
