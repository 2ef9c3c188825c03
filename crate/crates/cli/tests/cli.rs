use std::process::{Command, Output};

fn iftr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iftr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(o: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let text = stdout(o);
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn rayleigh_amount_of_fading_is_one() {
    let o = iftr(&["aof", "--K", "0", "--m1", "1", "--m2", "1", "--delta", "0"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&o);
    assert_eq!(header, ["aof"]);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn csv_has_header_and_unix_newlines() {
    let o = iftr(&["pdf", "--points", "5", "--x-max", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("x,pdf_analytic\n"));
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().count(), 6);
    let stderr = String::from_utf8(o.stderr).unwrap();
    assert!(stderr.contains("residual_mass="));
}

#[test]
fn monte_carlo_column_tracks_the_density() {
    let o = iftr(&["cdf", "--points", "11", "--x-max", "3", "--mc", "--samples", "200000"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&o);
    assert_eq!(header, ["x", "cdf_analytic", "cdf_mc"]);
    for r in rows {
        let a: f64 = r[1].parse().unwrap();
        let m: f64 = r[2].parse().unwrap();
        assert!((a - m).abs() < 5e-3, "{r:?}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(iftr(&["capacity", "--delta", "1.5"]).status.code(), Some(2));
    assert_eq!(iftr(&["capacity", "--J", "0"]).status.code(), Some(2));
    assert_eq!(iftr(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(iftr(&["figure", "9"]).status.code(), Some(2));
    assert_eq!(iftr(&["aof", "--sweep", "R_th:0:1:3"]).status.code(), Some(2));
    assert_eq!(
        iftr(&["aof", "--out", "/nonexistent-dir/out.csv"]).status.code(),
        Some(4)
    );
    let bad = iftr(&["outage", "--gamma-th", "-1"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8(bad.stderr).unwrap().contains("gamma_th"));
}

#[test]
fn db_flag_converts_snr_inputs() {
    let lin = iftr(&["capacity", "--gamma-bar", "10"]);
    let db = iftr(&["capacity", "--gamma-bar", "10", "--db"]);
    let unset = iftr(&["capacity", "--db"]);
    let one = iftr(&["capacity"]);
    assert_eq!(stdout(&lin), stdout(&db));
    assert_eq!(stdout(&unset), stdout(&one));
}

#[test]
fn sweep_adds_leading_column() {
    let o = iftr(&["outage", "--sweep", "gamma_bar:0:20:3:db"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&o);
    assert_eq!(header, ["gamma_bar_db", "gamma_bar", "outage"]);
    assert_eq!(rows.len(), 3);
    let p: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(p[0] > p[1] && p[1] > p[2]);
}

#[test]
fn json_output_replays_identically() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let second = dir.path().join("second.json");
    let o = iftr(&[
        "simulate",
        "--samples",
        "20000",
        "--seed",
        "7",
        "--K",
        "3",
        "--format",
        "json",
        "--out",
        first.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = iftr(&[
        "--input",
        first.to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let a = std::fs::read_to_string(&first).unwrap();
    let b = std::fs::read_to_string(&second).unwrap();
    assert_eq!(a, b);
    let doc: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(doc["inputs"]["J"], 40);
    assert_eq!(doc["inputs"]["seed"], 7);
    assert!(doc["inputs"]["version"].is_string());
    assert!(doc["metadata"]["residual_mass"].is_number());
    let order = doc["column_order"].as_array().unwrap();
    for c in order {
        let len = doc["columns"][c.as_str().unwrap()].as_array().unwrap().len();
        assert_eq!(len, 6);
    }
}

#[test]
fn ks_table_is_five_by_three() {
    let o = iftr(&["ks-table", "--grid-points", "400"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&o);
    assert_eq!(header, ["K", "m1", "m2", "delta", "ks_J20", "ks_J30", "ks_J40"]);
    assert_eq!(rows.len(), 5);
    for r in &rows {
        let ks: Vec<f64> = r[4..].iter().map(|v| v.parse().unwrap()).collect();
        assert!(ks[0] > ks[1] && ks[1] > ks[2] && ks[2] > 0.0, "{r:?}");
    }
}

#[test]
fn figure_eight_has_exact_and_asymptotic_ber() {
    let o = iftr(&["figure", "8"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&o);
    assert_eq!(
        header,
        ["curve", "m1", "m2", "K", "delta", "gamma_bar_db", "gamma_bar", "ber", "ber_asymptotic"]
    );
    assert_eq!(rows.len(), 3 * 26);
    // at 50 dB the two columns coincide, and larger Δ gives a larger BER
    let last: Vec<&Vec<String>> = rows.iter().filter(|r| r[5] == "50").collect();
    assert_eq!(last.len(), 3);
    let mut prev = 0.0;
    for r in last {
        let exact: f64 = r[7].parse().unwrap();
        let asym: f64 = r[8].parse().unwrap();
        assert!((exact - asym).abs() / exact < 0.01, "{r:?}");
        assert!(exact > prev);
        prev = exact;
    }
}

#[test]
fn every_figure_runs() {
    for n in 1..=7 {
        let o = iftr(&["figure", &n.to_string()]);
        assert!(o.status.success(), "figure {n}");
        let (header, rows) = csv_rows(&o);
        assert_eq!(header[0], "curve");
        assert!(rows.len() > 20 && rows.iter().all(|r| r.len() == header.len()));
    }
}
