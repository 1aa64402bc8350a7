use std::process::{Command, Output};

fn diskchaos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diskchaos"))
        .args(args)
        .output()
        .expect("spawn diskchaos")
}

fn diskchaos_threads(threads: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diskchaos"))
        .env("DISKCHAOS_THREADS", threads)
        .args(args)
        .output()
        .expect("spawn diskchaos")
}

#[test]
fn xi_table_shape() {
    let out = diskchaos(&["xi", "--s-min", "0", "--s-max", "8", "--samples", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,xi,xi_bound"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 1000);
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[999][0], 8.0);
    assert!(rows.iter().all(|r| r[1] >= 0.0 && r[1] <= r[2]));
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        &["pair", "--sx", "0.9", "--sy", "0.485786438"][..],
        &["scrambled", "--k", "6", "--format", "csv"],
        &["inverse-scan", "--pairs", "40", "--seed", "3"],
        &[
            "orbit", "--rho", "0.3", "--theta", "0.2", "--steps", "50", "--format", "json",
        ],
    ] {
        let a = diskchaos(args);
        let b = diskchaos(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["scrambled", "--k", "10"];
    let one = diskchaos_threads("1", &args);
    let four = diskchaos_threads("4", &args);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(diskchaos_threads("zero", &args).status.code(), Some(1));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("orbit.csv");
    let args = [
        "orbit", "--s0", "-1.5", "--theta", "0.7", "--steps", "100", "--stride", "7",
    ];
    let direct = diskchaos(&args);
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let written = diskchaos(&with_out);
    assert_eq!(written.status.code(), Some(0));
    assert!(written.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
    let text = String::from_utf8(direct.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("time,s,theta,rho,dist_from_start"));
    // samples 0, 7, ..., 98 plus the endpoint 100
    assert_eq!(text.lines().count(), 1 + 15 + 1);
}

#[test]
fn exit_codes() {
    assert_eq!(diskchaos(&["--help"]).status.code(), Some(0));
    assert_eq!(diskchaos(&["--version"]).status.code(), Some(0));
    assert_eq!(diskchaos(&["xi", "--samples", "nope"]).status.code(), Some(1));
    assert_eq!(
        diskchaos(&["orbit", "--rho", "1.5", "--steps", "3"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        diskchaos(&["orbit", "--rho", "0.5", "--steps", "10000001"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(diskchaos(&["scrambled", "--k", "1"]).status.code(), Some(1));
    assert_eq!(
        diskchaos(&["fastforward", "--s0", "0.5", "--exponent", "2000"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        diskchaos(&["pair", "--sx", "0.75", "--sy", "0.25"]).status.code(),
        Some(2)
    );
    assert_eq!(
        diskchaos(&["pair", "--sx", "0.3", "--sy", "0.3"]).status.code(),
        Some(3)
    );
    let strict = diskchaos(&["pair", "--sx", "0.9", "--sy", "0.485786438", "--eps-prox", "1e-9"]);
    assert_eq!(strict.status.code(), Some(3));
}

#[test]
fn fastforward_dyadic_time() {
    let out = diskchaos(&[
        "fastforward",
        "--s0",
        "0.25",
        "--theta",
        "0.1",
        "--exponent",
        "12",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "4095");
    let s: f64 = row[2].parse().unwrap();
    let theta: f64 = row[3].parse().unwrap();
    assert_eq!(s, 0.25 + 8192.0 - 2.0);
    // twelve dyadic blocks each contribute 0.25 turns
    assert!((theta - 0.1).abs() < 1e-12);
}
