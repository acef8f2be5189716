use std::process::{Command, Output};

use qcompare_cli::{Report, ScenarioFile};

fn qcompare(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcompare"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Report {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = qcompare(&full);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_str(&stdout(&out)).expect("valid report")
}

fn trine_file() -> String {
    format!("{}/../../scenarios/trine.json", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn dims_tables() {
    let Report::Dims(r) = json(&["dims", "--n", "4", "--d", "2"]) else {
        panic!()
    };
    let got: Vec<_> = r
        .rows
        .iter()
        .map(|x| (x.partition.clone(), x.dimension))
        .collect();
    assert_eq!(got, vec![(vec![4], 5), (vec![3, 1], 9), (vec![2, 2], 2)]);
    assert_eq!(r.total, 16);

    let Report::Dims(r) = json(&["dims", "--n", "3", "--d", "3"]) else {
        panic!()
    };
    assert!(r
        .rows
        .iter()
        .any(|x| x.partition == [1, 1, 1] && x.dimension == 1));

    let Report::Dims(r) = json(&["dims", "--n", "1", "--d", "5"]) else {
        panic!()
    };
    assert_eq!(r.rows.len(), 1);
    assert_eq!(
        (r.rows[0].partition.clone(), r.rows[0].dimension),
        (vec![1], 5)
    );
}

#[test]
fn universal_values() {
    for (n, want) in [("2", 0.25), ("3", 0.5)] {
        let Report::Universal(r) = json(&["universal", "--n", n, "--d", "2", "--trials", "5000"])
        else {
            panic!()
        };
        assert!((r.analytic - want).abs() < 1e-12);
        assert!((r.mc_estimate - want).abs() <= 5.0 * r.std_error);
    }
}

#[test]
fn discriminate_trine() {
    let Report::Discriminate(r) = json(&["discriminate", "--trials", "5000"]) else {
        panic!()
    };
    assert!((r.p_error.unwrap() - 0.25).abs() < 1e-10);
    let want = [1.0 / 12.0, -1.0 / 12.0, -1.0 / 12.0, -0.25];
    for (g, w) in r.eigenvalues.iter().zip(want) {
        assert!((g - w).abs() < 1e-10);
    }
    assert!((r.errorfree_plus_guess - 1.0 / 3.0).abs() < 1e-10);

    let Report::Discriminate(r) = json(&["discriminate", "--costs", "0,0,1,1", "--trials", "1000"])
    else {
        panic!()
    };
    assert!((r.bayes_cost.unwrap() - 0.25).abs() < 1e-10);

    // the shipped scenario file describes the same problem
    let file = trine_file();
    let Report::Discriminate(r) = json(&["discriminate", "--scenario", &file, "--trials", "1000"])
    else {
        panic!()
    };
    assert!((r.p_error.unwrap() - 0.25).abs() < 1e-10);
}

#[test]
fn multiport_reports() {
    let Report::Multiport(r) = json(&["multiport", "--n", "3", "--d", "2", "--trials", "500"])
    else {
        panic!()
    };
    for pp in &r.identical_distribution {
        let want = if pp.pattern == [1, 1, 1] {
            1.0 / 3.0
        } else {
            2.0 / 9.0
        };
        assert!((pp.probability - want).abs() < 1e-10);
    }
    assert_eq!(r.identical_distribution.len(), 4);
    let mut sorted = r.unambiguous_patterns.clone();
    sorted.sort();
    assert_eq!(sorted, r.unambiguous_patterns);

    let Report::Multiport(r) = json(&["multiport", "--n", "2", "--d", "2", "--trials", "20000"])
    else {
        panic!()
    };
    assert_eq!(r.unambiguous_patterns, vec![vec![1, 1]]);
    assert!((r.efficiency.estimate - 0.25).abs() <= 5.0 * r.efficiency.std_error);

    let Report::Multiport(r) = json(&["multiport", "--n", "4", "--d", "2", "--trials", "10"])
    else {
        panic!()
    };
    assert!(r.unambiguous_patterns.contains(&vec![1, 1, 1, 1]));
}

#[test]
fn json_round_trips() {
    let cases: [&[&str]; 4] = [
        &["dims", "--n", "5", "--d", "3"],
        &["universal", "--n", "3", "--d", "3", "--trials", "300"],
        &["discriminate", "--costs", "0,0,2,1", "--trials", "300"],
        &[
            "multiport",
            "--n",
            "3",
            "--d",
            "3",
            "--statistics",
            "fermion",
            "--threshold",
            "--trials",
            "50",
        ],
    ];
    for args in cases {
        let report = json(args);
        let text = serde_json::to_string(&report).unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report, "{args:?}");
    }
}

#[test]
fn runs_are_deterministic() {
    let args = [
        "universal",
        "--n",
        "3",
        "--d",
        "2",
        "--trials",
        "2000",
        "--seed",
        "9",
        "--format",
        "json",
    ];
    assert_eq!(stdout(&qcompare(&args)), stdout(&qcompare(&args)));
    let args = [
        "discriminate",
        "--trials",
        "2000",
        "--seed",
        "9",
        "--format",
        "csv",
    ];
    assert_eq!(stdout(&qcompare(&args)), stdout(&qcompare(&args)));
    let a = stdout(&qcompare(&[
        "universal",
        "--n",
        "3",
        "--d",
        "2",
        "--trials",
        "2000",
        "--seed",
        "10",
    ]));
    let b = stdout(&qcompare(&[
        "universal",
        "--n",
        "3",
        "--d",
        "2",
        "--trials",
        "2000",
        "--seed",
        "9",
    ]));
    assert_ne!(a, b);
}

#[test]
fn bad_input_exits_2() {
    let cases: [&[&str]; 7] = [
        &["dims", "--n", "14", "--d", "2"],
        &["multiport", "--n", "7", "--d", "2"],
        &["multiport", "--n", "3", "--d", "5"],
        &["universal", "--n", "2", "--d", "2", "--trials", "0"],
        &["discriminate", "--costs", "1,0,1,0.5"],
        &["discriminate", "--scenario", "/nonexistent/scenario.json"],
        &["dims", "--n", "two", "--d", "2"],
    ];
    for args in cases {
        assert_eq!(qcompare(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn malformed_and_degenerate_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p.to_string_lossy().into_owned()
    };
    let garbage = write("garbage.json", "{ not json");
    assert_eq!(
        qcompare(&["discriminate", "--scenario", &garbage])
            .status
            .code(),
        Some(2)
    );

    let bad_norm = serde_json::to_string(&ScenarioFile {
        states: vec![vec![[1.0, 0.0], [0.1, 0.0]]],
        priors: vec![1.0],
        n_systems: 2,
    })
    .unwrap();
    let bad_norm = write("norm.json", &bad_norm);
    assert_eq!(
        qcompare(&["discriminate", "--scenario", &bad_norm])
            .status
            .code(),
        Some(2)
    );

    // a single possible state: the systems are identical with certainty
    let single = serde_json::to_string(&ScenarioFile {
        states: vec![vec![[1.0, 0.0], [0.0, 0.0]]],
        priors: vec![1.0],
        n_systems: 2,
    })
    .unwrap();
    let single = write("single.json", &single);
    assert_eq!(
        qcompare(&["discriminate", "--scenario", &single])
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn reproduce_contract() {
    let out = qcompare(&["reproduce"]);
    let text = stdout(&out);
    let lines: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("PASS") || l.starts_with("FAIL"))
        .collect();
    assert!(lines.len() > 50);
    let all_pass = lines.iter().all(|l| l.starts_with("PASS"));
    assert_eq!(out.status.code(), Some(if all_pass { 0 } else { 1 }));
    for k in 1..=9 {
        assert!(
            lines.iter().any(|l| l.contains(&format!("[{k}]"))),
            "criterion {k} missing"
        );
    }
    assert_eq!(
        text,
        stdout(&qcompare(&["reproduce"])),
        "reproduce output must be stable"
    );

    let broken = qcompare(&["reproduce", "--inject-fault"]);
    assert_eq!(broken.status.code(), Some(1));
    let broken = stdout(&broken);
    for k in 1..=4 {
        assert!(
            broken
                .lines()
                .any(|l| l.starts_with(&format!("FAIL [{k}]"))),
            "criterion {k} did not catch the corrupted projector"
        );
    }
}
