use std::path::PathBuf;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_zgkn");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn zgkn")
}

fn run_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(BIN).args(args).env(key, val).output().expect("spawn zgkn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Header and rows of a CSV document, skipping '#' lines.
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column<'a>(header: &[String], rows: &'a [Vec<String>], name: &str) -> Vec<&'a str> {
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[i].as_str()).collect()
}

fn floats(v: &[&str]) -> Vec<f64> {
    v.iter().map(|s| s.parse().unwrap()).collect()
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("zgkn-cli-{}-{name}", std::process::id()))
}

fn count_extrema(e: &[f64]) -> usize {
    e.windows(3).filter(|w| (w[1] - w[0]) * (w[2] - w[1]) < 0.0).count()
}

#[test]
fn solve_hydrogen() {
    let o = run(&["solve", "--a", "1e-4", "--Z", "1", "--kappa", "0.5", "--ntheta", "0", "--nomega", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (h, rows) = table(&stdout(&o));
    assert_eq!(rows.len(), 1);
    let e: f64 = column(&h, &rows, "E")[0].parse().unwrap();
    assert!((e - 0.9999734).abs() < 1e-6, "{e}");
    assert_eq!(column(&h, &rows, "label")[0], "1s1/2");
    assert_eq!(column(&h, &rows, "in_guaranteed_region")[0], "true");
}

#[test]
fn solve_errors() {
    let o = run(&["solve", "--a", "0.1", "--gamma", "-0.3", "--kappa", "0.5", "--ntheta", "-1", "--nomega", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("inadmissible"), "{}", stderr(&o));
    let o = run(&["solve"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage"), "{}", stderr(&o));
    let o = run(&["solve", "--a", "0.1", "--gamma", "-0.3", "--Z", "3", "--kappa", "0.5", "--ntheta", "0", "--nomega", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("wavefunction"));
}

#[test]
fn non_convergence_exits_two() {
    let o = run(&[
        "solve", "--a", "0.1", "--gamma", "-0.3", "--kappa", "0.5", "--ntheta", "0", "--nomega", "0", "--max-iter", "1",
        "--tol", "1e-14",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn oracle_examples() {
    let o = run(&["oracle", "sommerfeld", "--M", "0", "--k", "-1", "--gamma", "-0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let (h, rows) = table(&stdout(&o));
    let v: f64 = rows[0][h.len() - 1].parse().unwrap();
    assert!((v - 0.8660254).abs() < 1e-7, "{v}");

    let o = run(&["oracle", "bsw", "--kappa", "0.5", "--N", "1", "--a", "0.1", "--E", "0.5"]);
    let (h, rows) = table(&stdout(&o));
    let v: f64 = rows[0][h.len() - 1].parse().unwrap();
    assert!((v + 1.0016667).abs() < 1e-7, "{v}");

    let o = run(&["oracle", "k", "--N", "1", "--kappa", "0.5"]);
    let (h, rows) = table(&stdout(&o));
    assert_eq!(rows[0][h.len() - 1], "-1");

    let o = run(&["oracle", "sommerfeld", "--M", "0", "--k", "1", "--gamma", "-0.5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn label_rows() {
    let o = run(&["label", "--kappa", "-0.5", "--ntheta", "-1", "--nomega", "1"]);
    let (h, rows) = table(&stdout(&o));
    assert_eq!(column(&h, &rows, "label")[0], "2p1/2");
    let o = run(&["label", "--kappa", "0.5", "--ntheta", "-2", "--nomega", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn energy_falls_with_charge() {
    let o = run(&["scan", "--sweep", "Z", "--from", "10", "--to", "135", "--steps", "26", "--a", "0.05", "--kappa", "0.5", "--targets", "0:0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (h, rows) = table(&stdout(&o));
    assert_eq!(rows.len(), 26);
    assert!(column(&h, &rows, "converged").iter().all(|c| *c == "true"));
    let e = floats(&column(&h, &rows, "E"));
    assert!(e.windows(2).all(|w| w[1] < w[0]), "{e:?}");
}

#[test]
fn supercritical_energy_oscillates() {
    let o = run(&["scan", "--sweep", "Z", "--from", "140", "--to", "220", "--steps", "17", "--a", "0.05", "--kappa", "0.5", "--targets", "0:0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (h, rows) = table(&stdout(&o));
    assert!(column(&h, &rows, "converged").iter().all(|c| *c == "true"), "{}", stdout(&o));
    let e = floats(&column(&h, &rows, "E"));
    assert!(count_extrema(&e) >= 1, "{e:?}");
}

#[test]
fn excited_pair_approaches_sommerfeld() {
    let o = run(&[
        "scan", "--sweep", "a", "--from", "1e-3", "--to", "1e-1", "--steps", "3", "--log", "--Z", "50", "--kappa", "0.5",
        "--targets", "0:1,-1:1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (h, rows) = table(&stdout(&o));
    let e = floats(&column(&h, &rows, "E"));
    let g = -50.0 * zgkn::params::ALPHA_S;
    let som = zgkn::oracles::sommerfeld(1, -1, g).unwrap();
    let d2s: Vec<f64> = e.iter().step_by(2).map(|v| (v - som).abs()).collect();
    let d2p: Vec<f64> = e.iter().skip(1).step_by(2).map(|v| (v - som).abs()).collect();
    assert!(d2s[0] < d2s[1] && d2s[1] < d2s[2], "{d2s:?}");
    assert!(d2p[0] < d2p[1] && d2p[1] < d2p[2], "{d2p:?}");
}

#[test]
fn scan_keeps_going_past_failures() {
    let o = run(&["scan", "--sweep", "a", "--from", "0.05", "--to", "20", "--steps", "4", "--log", "--Z", "40", "--kappa", "0.5", "--targets", "0:0,-1:1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("did not converge"));
    let (h, rows) = table(&stdout(&o));
    assert_eq!(rows.len(), 8);
    let conv = column(&h, &rows, "converged");
    assert!(conv.contains(&"false") && conv.contains(&"true"));
    let err = column(&h, &rows, "error");
    for (c, e) in conv.iter().zip(&err) {
        assert_eq!(*c == "false", !e.is_empty());
    }
    // rows follow sweep order, targets inner
    let sv = floats(&column(&h, &rows, "sweep_value"));
    assert!(sv.windows(2).all(|w| w[1] >= w[0]));
    assert_eq!(column(&h, &rows, "n_theta"), vec!["0", "-1", "0", "-1", "0", "-1", "0", "-1"]);
}

#[test]
fn worker_count_does_not_change_output() {
    let args = ["scan", "--sweep", "gamma", "--from", "-0.1", "--to", "-0.45", "--steps", "8", "--a", "0.1", "--kappa", "-0.5", "--targets", "0:0,0:1"];
    let one = run_env(&args, "ZGKN_WORKERS", "1");
    let four = run_env(&args, "ZGKN_WORKERS", "4");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn wavefunction_output() {
    let args = ["wavefunction", "--a", "1e-4", "--Z", "1", "--kappa", "0.5", "--ntheta", "0", "--nomega", "0", "--points", "400"];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let (h, rows) = table(&text);
    assert_eq!(h, ["r", "R", "Omega", "theta", "S", "Theta", "density"]);
    let r = floats(&column(&h, &rows, "r"));
    let d = floats(&column(&h, &rows, "density"));
    let imax = (0..d.len()).max_by(|&i, &j| d[i].total_cmp(&d[j])).unwrap();
    let g = zgkn::params::ALPHA_S;
    let e: f64 = text.lines().find_map(|l| l.strip_prefix("# E=")).unwrap().parse().unwrap();
    let want = (1.0 - g * g).sqrt() / (1.0 - e * e).sqrt();
    assert!((r[imax].abs() - want).abs() < 0.05 * want, "{} vs {want}", r[imax]);
    assert_eq!(run(&args).stdout, o.stdout);
}

#[test]
fn kappa_sign_splits_energy() {
    let meta = |k: &str| -> f64 {
        let o = run(&["wavefunction", "--a", "0.05", "--Z", "40", "--kappa", k, "--ntheta", "0", "--nomega", "0", "--points", "50"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        stdout(&o).lines().find_map(|l| l.strip_prefix("# E=").map(|v| v.parse().unwrap())).unwrap()
    };
    let (p, m) = (meta("0.5"), meta("-0.5"));
    assert!((p - m).abs() > 1e-4, "{p} {m}");
}

#[test]
fn json_lines_and_output_file() {
    let path = scratch("solve.json");
    let o = run(&[
        "solve", "--a", "0.05", "--gamma", "-0.3", "--kappa", "0.5", "--ntheta", "0", "--nomega", "1", "--format", "json", "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1);
    let v: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(v["label"], "2s1/2");
    assert!(v["E"].as_f64().unwrap() > 0.9);
    assert!(lines[0].starts_with("{\"a\":"));
}

#[test]
fn config_file_is_merged_under_flags() {
    let path = scratch("recipe.cfg");
    std::fs::write(&path, "# ground state recipe\na = 0.05\nZ = 40\nkappa = 0.5\nntheta = 0\nnomega = 0\n").unwrap();
    let cfg = path.to_str().unwrap();
    let base = run(&["solve", "--config", cfg]);
    let flag = run(&["solve", "--a", "0.05", "--Z", "40", "--kappa", "0.5", "--ntheta", "0", "--nomega", "0"]);
    assert_eq!(base.status.code(), Some(0), "{}", stderr(&base));
    assert_eq!(base.stdout, flag.stdout);
    let over = run(&["solve", "--config", cfg, "--nomega", "1"]);
    let (h, rows) = table(&stdout(&over));
    assert_eq!(column(&h, &rows, "label")[0], "2s1/2");
    let clash = run(&["solve", "--config", cfg, "--gamma", "-0.3"]);
    assert_eq!(clash.status.code(), Some(0), "{}", stderr(&clash));
    let (h, rows) = table(&stdout(&clash));
    assert_eq!(column(&h, &rows, "gamma")[0], "-0.3");

    std::fs::write(&path, "a = 0.05\nbogus = 1\n").unwrap();
    let bad = run(&["solve", "--config", cfg]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("bogus"));
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn check_reports_assumptions() {
    let o = run(&["check", "--a", "0.1", "--gamma", "-0.3", "--kappa", "0.5", "--ntheta", "0", "--nomega", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (h, rows) = table(&stdout(&o));
    let sys = column(&h, &rows, "system");
    let check = column(&h, &rows, "check");
    let passed = column(&h, &rows, "passed");
    assert!(sys.contains(&"theta") && sys.contains(&"omega"));
    assert!(check.contains(&"barrier"));
    assert_eq!(check.iter().filter(|c| **c == "e").count(), 2);
    assert!(passed.iter().all(|p| *p == "true"), "{}", stdout(&o));
}
