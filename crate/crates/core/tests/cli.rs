use std::path::Path;
use std::process::{Command, Output};

fn genrose(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genrose"))
        .args(args)
        .env("GENROSE_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn moment_csv(args: &[&str]) -> Vec<(String, f64)> {
    let mut full = vec!["moment"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--format", "csv"]);
    let o = genrose(&full);
    assert!(o.status.success(), "{}", stderr(&o));
    stdout(&o)
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[1].parse().unwrap())
        })
        .collect()
}

fn field(rows: &[(String, f64)], name: &str) -> f64 {
    rows.iter().find(|(k, _)| k == name).unwrap().1
}

#[test]
fn moment_rounded_column() {
    let o = genrose(&["moment", "-0.7", "-0.7"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let m3 = text.lines().find(|l| l.starts_with("M3 ")).unwrap();
    assert!(m3.trim_end().ends_with("1.183"), "{m3}");
    assert!(m3.contains("1.18327217256"), "{m3}");
}

#[test]
fn moment_outside_domain() {
    let o = genrose(&["moment", "-0.5", "-0.7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("γ1 must lie in the open interval (−1, −1/2)"));
    let o = genrose(&["moment", "-0.9", "-0.7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("−3/2"));
}

#[test]
fn moment_amplitude_changes_only_raw_moments() {
    let unit = moment_csv(&["-0.55", "-0.55", "--amplitude", "1"]);
    let standard = moment_csv(&["-0.55", "-0.55"]);
    // with A = 1, μ2 is the bracket (α+2)^{-1}(2α+3)^{-1} D; its reciprocal is A(p)²
    let a = field(&standard, "amplitude");
    assert!((field(&unit, "mu2") * a * a - 1.0).abs() < 1e-10);
    assert_eq!(field(&unit, "M3"), field(&standard, "M3"));
    assert!((field(&standard, "mu2") - 1.0).abs() < 1e-11);
}

#[test]
fn moment_json() {
    let o = genrose(&["moment", "-0.6", "-0.7", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pair"]["gamma1"], -0.6);
    assert_eq!(v["mu1"], 0.0);
    assert!((v["mu2"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn table_hurst_and_alpha_agree() {
    let h = genrose(&["table", "--hurst", "0.9", "--format", "csv"]);
    let a = genrose(&["table", "--alpha", "-1.1", "--format", "csv"]);
    assert!(h.status.success() && a.status.success());
    assert_eq!(h.stdout, a.stdout);
}

#[test]
fn table_rows() {
    let o = genrose(&["table", "--hurst", "0.6", "--format", "csv"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "gamma1,gamma2,M3");
    assert_eq!(lines.len(), 11);
    let parse = |l: &str| -> Vec<f64> { l.split(',').map(|x| x.parse().unwrap()).collect() };
    let first = parse(lines[1]);
    let last = parse(lines[10]);
    assert!((first[0] + 0.7).abs() < 1e-15 && (first[2] - 1.183).abs() <= 1e-3);
    assert!((last[1] + 0.895).abs() < 1e-12 && (last[2] - 0.947).abs() <= 1e-3);

    let o = genrose(&["table", "--hurst", "0.8", "--format", "csv"]);
    let row = stdout(&o)
        .lines()
        .skip(1)
        .map(parse)
        .find(|r| (r[0] + 0.558).abs() < 5e-4)
        .unwrap();
    assert!((row[2] - 2.564).abs() <= 1e-3);
}

#[test]
fn table_errors() {
    assert_eq!(genrose(&["table", "--alpha", "-1.6"]).status.code(), Some(2));
    assert_eq!(genrose(&["table", "--hurst", "1.2"]).status.code(), Some(2));
    // exactly one of --hurst / --alpha
    assert!(!genrose(&["table"]).status.success());
    assert!(!genrose(&["table", "--hurst", "0.6", "--alpha", "-1.4"]).status.success());
}

#[test]
fn grid_cells_and_symmetry() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let o = genrose(&["grid", "--output", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut cells = std::collections::HashMap::new();
    for l in text.lines().skip(1) {
        let f: Vec<&str> = l.split(',').collect();
        let key = (f[0].to_string(), f[1].to_string());
        cells.insert(key, (f[2].to_string(), f[3] == "true"));
    }
    assert_eq!(cells.len(), 99 * 99);
    let get = |a: &str, b: &str| cells[&(a.to_string(), b.to_string())].clone();
    let (m3, inside) = get("-0.69999999999999996", "-0.69999999999999996");
    assert!(inside);
    assert!((m3.parse::<f64>().unwrap() - 1.183).abs() <= 1e-3);
    let (m3, inside) = get("-0.90000000000000002", "-0.69999999999999996");
    assert!(!inside && m3.is_empty());
    for ((a, b), (v, inside)) in &cells {
        let (w, inside2) = get(b, a);
        assert_eq!(*inside, inside2);
        if *inside {
            let (x, y): (f64, f64) = (v.parse().unwrap(), w.parse().unwrap());
            assert!((x - y).abs() <= 1e-12 * x.abs());
        }
    }
}

#[test]
fn grid_errors() {
    assert_eq!(genrose(&["grid", "--step", "0.3"]).status.code(), Some(2));
    let o = genrose(&["grid", "--step", "0.1", "--output", "/nonexistent-dir/grid.csv"]);
    assert_eq!(o.status.code(), Some(3));
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn plot_round_trips_cli_output() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("g.csv");
    let table = dir.path().join("t.csv");
    let svg = dir.path().join("p.svg");
    let svg_s = svg.to_str().unwrap();
    assert!(genrose(&["grid", "--step", "0.02", "-o", grid.to_str().unwrap()]).status.success());
    assert!(genrose(&["table", "--hurst", "0.6", "--format", "csv", "-o", table.to_str().unwrap()])
        .status
        .success());

    let o = genrose(&["plot", "--input", grid.to_str().unwrap(), "--kind", "contour", "-o", svg_s]);
    assert!(o.status.success(), "{}", stderr(&o));
    let contour = std::fs::read_to_string(&svg).unwrap();
    let boundary = contour.split(r#"<g class="boundary""#).nth(1).unwrap();
    assert_eq!(boundary.split("</g>").next().unwrap().matches("<line ").count(), 3);

    let o = genrose(&["plot", "--input", table.to_str().unwrap(), "-o", svg_s]);
    assert!(o.status.success());
    let line = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(line.matches("<circle").count(), 10);

    let o = genrose(&["plot", "--input", table.to_str().unwrap(), "--kind", "contour"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn plot_degenerate_and_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let outside = write(
        dir.path(),
        "outside.csv",
        "gamma1,gamma2,M3,inside\n-0.9,-0.9,,false\n-0.9,-0.8,,false\n",
    );
    let o = genrose(&["plot", "--input", &outside]);
    assert!(o.status.success());
    let svg = stdout(&o);
    assert!(svg.contains(r#"class="axes""#) && !svg.contains("class=\"level\""));

    let bad = write(dir.path(), "bad.csv", "gamma1,gamma2,M3\n-0.7,-0.7,1.183\n-0.6,oops,1\n");
    let o = genrose(&["plot", "--input", &bad]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("line 3"));

    let missing = dir.path().join("missing.csv");
    let o = genrose(&["plot", "--input", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_reports() {
    let o = genrose(&["verify", "lemmas", "--seed", "42", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 160);
    for c in checks {
        for key in ["check", "achieved_error", "tolerance", "pass"] {
            assert!(c.get(key).is_some());
        }
    }
    let again = genrose(&["verify", "lemmas", "--seed", "42", "--format", "json"]);
    assert_eq!(o.stdout, again.stdout);

    let o = genrose(&["verify", "pipeline", "--tolerance", "0", "--quadrature-tolerance", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("FAILED"));
}

#[test]
fn verify_mc_default_config() {
    let o = genrose(&["verify", "mc", "--seed", "1", "--format", "json"]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 3);
}

#[test]
fn outputs_are_byte_identical_across_thread_counts() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_genrose"))
            .args(["grid", "--step", "0.01"])
            .env("GENROSE_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("3"));
    assert_eq!(run("0"), run("1"));
}
