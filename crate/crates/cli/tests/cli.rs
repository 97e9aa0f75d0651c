use std::fs;
use std::process::{Command, Output};

fn missmass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_missmass"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn constants_row() {
    let o = missmass(&["constants"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# missmass "));
    assert_eq!(
        lines.next().unwrap(),
        "x0,f_at_x0,c0,c0_over_4,eight_over_ln2"
    );
    let row: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((row[0] - 0.2356).abs() < 5e-4);
    assert!((row[2] - 7.6821).abs() < 5e-4);
    assert!((row[3] - 1.9205).abs() < 2e-4);
}

#[test]
fn bounds_emit_one_row_per_epsilon() {
    let o = missmass(&["bounds", "--n", "100", "--eps", "0.05,0.1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn oracle_lists_the_dependent_law() {
    let o = missmass(&["oracle", "--dist", "uniform:2", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<(f64, f64, String)> = stdout(&o)
        .lines()
        .filter(|l| l.ends_with(",dependent-enumeration"))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (
                f[0].parse().unwrap(),
                f[1].parse().unwrap(),
                f[2].to_string(),
            )
        })
        .collect();
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0].0, rows[0].1), (0.0, 0.5));
    assert_eq!((rows[1].0, rows[1].1), (0.5, 0.5));
    assert!(stdout(&o).contains("max_raw_tail_excess,6.25"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    fs::write(
        &cfg,
        r#"{"distribution":{"kind":"uniform","params":{"k":5}},"n":50,"trials":200,"seed":3,"epsilons":[0.1]}"#,
    )
    .unwrap();
    let o = missmass(&["simulate", "--config", cfg.to_str().unwrap(), "--n", "100"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let header = stdout(&o).lines().next().unwrap().to_string();
    assert!(header.contains(r#""n":100"#), "{header}");
    assert!(header.contains(r#""trials":200"#), "{header}");
}

#[test]
fn exit_codes_separate_failure_kinds() {
    let dir = tempfile::tempdir().unwrap();
    // usage: unknown flag, unknown config key, missing required value
    assert_eq!(missmass(&["verify", "--bogus"]).status.code(), Some(2));
    assert_eq!(missmass(&["bounds", "--n", "3"]).status.code(), Some(2));
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"n":5,"colour":"blue"}"#).unwrap();
    assert_eq!(
        missmass(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--dist",
            "uniform:2"
        ])
        .status
        .code(),
        Some(2)
    );
    // unreadable file
    let missing = dir.path().join("nope.json");
    assert_eq!(
        missmass(&["simulate", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );
    // parameter domain
    assert_eq!(
        missmass(&["oracle", "--dist", "uniform:0", "--n", "2"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        missmass(&["bounds", "--n", "0", "--eps", "0.1"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        missmass(&["oracle", "--dist", "uniform:40", "--n", "8"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        missmass(&[
            "simulate",
            "--dist",
            "uniform:3",
            "--n",
            "4",
            "--trials",
            "0"
        ])
        .status
        .code(),
        Some(4)
    );
}

#[test]
fn out_file_is_written_whole_or_not_at_all() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("c.csv");
    let o = missmass(&["constants", "--out", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(
        fs::read_to_string(&good).unwrap(),
        stdout(&missmass(&["constants"]))
    );

    let bad = dir.path().join("o.csv");
    let o = missmass(&[
        "oracle",
        "--dist",
        "uniform:40",
        "--n",
        "8",
        "--out",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(!bad.exists());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn verify_small_grid_and_evidence_label() {
    let o = missmass(&["verify", "--suite", "gprime"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("not a proof"));
    let o = missmass(&["verify", "--suite", "hs", "--grid", "51x41"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().skip(2).all(|l| l.ends_with(",true")));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "simulate",
        "--dist",
        "zipf:8:1.1",
        "--n",
        "12",
        "--trials",
        "5000",
        "--seed",
        "9",
        "--eps",
        "0.02,0.1",
    ];
    assert_eq!(missmass(&args).stdout, missmass(&args).stdout);
}
