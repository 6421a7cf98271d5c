use std::process::{Command, Output};

use icbox_cli::{read_csv, write_csv, ChshRow, SimulateRow, ThresholdRow};
use icbox_core::{SweepRecord, TSIRELSON_E};
use proptest::prelude::*;

fn icbox(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_icbox"))
        .args(args)
        .env_remove("ICBOX_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn sweep_grid_csv() {
    let o = icbox(&[
        "sweep", "--e-min", "0.70", "--e-max", "0.80", "--e-step", "0.02", "--n", "8",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("e_i,e_ii,n,i_lb,chain_bound,violates"));
    let rows: Vec<SweepRecord> = read_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        assert_eq!(r.n, 8);
        if r.e_i <= 0.70 {
            assert!(!r.violates);
        }
        if r.e_i >= 0.74 {
            assert!(r.violates);
        }
    }
}

#[test]
fn sweep_pr_box_point() {
    let o = icbox(&["sweep", "--e", "1", "--n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<SweepRecord> = read_csv(stdout(&o).as_bytes()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].i_lb, 2.0);
    assert!(rows[0].violates);
}

#[test]
fn sweep_sorted_by_depth_then_e() {
    let o = icbox(&[
        "sweep", "--e-min", "0.1", "--e-max", "0.9", "--e-step", "0.2", "--n", "1", "--n-max", "5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<SweepRecord> = read_csv(stdout(&o).as_bytes()).unwrap();
    assert_eq!(rows.len(), 25);
    assert!(rows.windows(2).all(|w| (w[0].n, w[0].e_i) < (w[1].n, w[1].e_i)));
}

#[test]
fn sweep_below_tsirelson_never_violates() {
    let e_max = TSIRELSON_E.to_string();
    let o = icbox(&[
        "sweep", "--e-min", "0", "--e-max", &e_max, "--e-step", "0.01", "--n", "1", "--n-max", "20",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<SweepRecord> = read_csv(stdout(&o).as_bytes()).unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| !r.violates));
}

#[test]
fn sweep_asymmetric_point_and_json() {
    let o = icbox(&[
        "sweep", "--ei", "0.75", "--eii", "0.75", "--n", "1", "--n-max", "4", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 4);
    assert_eq!(v["summary"]["first_violation"][0]["n"], 3);
    assert_eq!(v["summary"]["first_violation"][0]["n_star"], 3);
    assert!(v["config"].is_object());
}

#[test]
fn sweep_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let o = icbox(&["sweep", "--e", "0.5", "--n", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let rows: Vec<SweepRecord> = read_csv(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(rows.len(), 1);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["sweep"],
        vec!["sweep", "--e", "1.5"],
        vec!["sweep", "--e-min", "0.8", "--e-max", "0.7", "--e-step", "0.01"],
        vec!["sweep", "--e-min", "0.1", "--e-max", "0.7", "--e-step", "0"],
        vec!["sweep", "--e", "0.5", "--n", "0"],
        vec!["sweep", "--e", "0.5", "--ei", "0.3", "--eii", "0.2"],
        vec!["threshold", "--n", "5", "--n-max", "2"],
        vec!["frobnicate"],
        vec!["sweep", "--format", "xml", "--e", "0.5"],
    ] {
        let o = icbox(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(icbox(&["--help"]).status.code(), Some(0));
    assert_eq!(icbox(&["--version"]).status.code(), Some(0));
    assert_eq!(icbox(&["sweep", "--help"]).status.code(), Some(0));
}

#[test]
fn threshold_column_decreases() {
    let o = icbox(&["threshold", "--n", "1", "--n-max", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<ThresholdRow> = read_csv(stdout(&o).as_bytes()).unwrap();
    assert_eq!(rows.len(), 10);
    assert!(rows.windows(2).all(|w| w[1].e_star < w[0].e_star));
    assert!(rows.iter().all(|r| r.e_star > TSIRELSON_E));
    assert!((rows[0].e_star - 0.78).abs() < 0.01);
    assert!(rows[9].e_star - TSIRELSON_E < 0.02);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("0.7071067811865476"));
}

#[test]
fn simulate_pr_box_is_exact() {
    let o = icbox(&["simulate", "--e", "1", "--n", "1", "--trials", "2000", "--seed", "9"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<SimulateRow> = read_csv(stdout(&o).as_bytes()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.p_hat == 1.0 && r.successes == r.trials));
}

#[test]
fn simulate_passes_and_replays() {
    let args = [
        "simulate", "--e", "0.9", "--n", "2", "--trials", "20000", "--seed", "17", "--format", "json",
    ];
    let a = icbox(&args);
    let b = icbox(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["summary"]["verdict"]["pass"], true);
    assert_eq!(v["records"].as_array().unwrap().len(), 4);
}

#[test]
fn simulate_seed_from_env() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_icbox"))
            .args(["simulate", "--e", "0.6", "--n", "1", "--trials", "500"])
            .env("ICBOX_SEED", seed)
            .output()
            .unwrap()
    };
    let a = run("5");
    let b = icbox(&["simulate", "--e", "0.6", "--n", "1", "--trials", "500", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, run("6").stdout);
}

#[test]
fn simulate_mismatch_exits_three() {
    let o = icbox(&[
        "simulate",
        "--e",
        "0.9",
        "--n",
        "2",
        "--trials",
        "20000",
        "--reference-e",
        "0.7",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let o = icbox(&[
        "simulate",
        "--ei",
        "0.9",
        "--eii",
        "0.5",
        "--n",
        "2",
        "--trials",
        "20000",
        "--reference-ei",
        "0.5",
        "--reference-eii",
        "0.9",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn simulate_singlet_box() {
    let o = icbox(&["simulate", "--box", "singlet", "--n", "2", "--trials", "20000"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn simulate_resource_cap_exits_two() {
    let o = icbox(&["simulate", "--e", "0.9", "--n", "20", "--trials", "100000"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_passes() {
    let o = icbox(&["verify", "--states", "200", "--channels", "100"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 8);
    assert!(text.contains("singlet_chsh,true"));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("S = 3.414213562373"));
    assert!(!err.contains("FAIL"));
}

#[test]
fn chsh_landmarks() {
    for (e, s) in [("0.5", 3.0), ("1", 4.0), (&*TSIRELSON_E.to_string(), 2.0 + 2f64.sqrt())] {
        let o = icbox(&["chsh", "--e", e]);
        assert_eq!(o.status.code(), Some(0));
        let rows: Vec<ChshRow> = read_csv(stdout(&o).as_bytes()).unwrap();
        assert!((rows[0].s - s).abs() < 1e-9, "{e}: {}", rows[0].s);
    }
    let o = icbox(&["chsh", "--c", "1,1,1,-1"]);
    let rows: Vec<ChshRow> = read_csv(stdout(&o).as_bytes()).unwrap();
    assert_eq!(rows[0].s, 3.0);
    let o = icbox(&["chsh", "--c", "-1,1,1,1"]);
    let rows: Vec<ChshRow> = read_csv(stdout(&o).as_bytes()).unwrap();
    assert_eq!((rows[0].p_i, rows[0].s), (0.5, 3.0));
    assert_eq!(icbox(&["chsh", "--c", "1,1"]).status.code(), Some(1));
    assert_eq!(icbox(&["chsh", "--c", "1,1,1,2"]).status.code(), Some(1));
    let o = icbox(&["chsh", "--box", "singlet"]);
    let rows: Vec<ChshRow> = read_csv(stdout(&o).as_bytes()).unwrap();
    assert!((rows[0].s - (2.0 + 2f64.sqrt())).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sweep_csv_round_trips(
        points in prop::collection::vec((0.0..=1.0f64, 0.0..=1.0f64), 1..20),
        n in 1usize..40,
    ) {
        let records: Vec<SweepRecord> = points
            .iter()
            .map(|&(a, b)| SweepRecord::evaluate(a, b, n, 1))
            .collect();
        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        let back: Vec<SweepRecord> = read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back, records);
    }

    #[test]
    fn arbitrary_records_round_trip(
        e_i in any::<f64>().prop_filter("finite", |v| v.is_finite()),
        e_ii in any::<f64>().prop_filter("finite", |v| v.is_finite()),
        n in any::<usize>(),
        i_lb in any::<f64>().prop_filter("finite", |v| v.is_finite()),
        chain_bound in any::<f64>().prop_filter("finite", |v| v.is_finite()),
        violates in any::<bool>(),
    ) {
        let records = vec![SweepRecord { e_i, e_ii, n, i_lb, chain_bound, violates }];
        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        let back: Vec<SweepRecord> = read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back, records);
    }
}
