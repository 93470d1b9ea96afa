use std::path::{Path, PathBuf};

use clap::Parser;
use serde_json::Value;

use crate::cli::{run as run_cli, Cli};

struct Output {
    code: i32,
    stdout: String,
}

impl Output {
    fn success(&self) -> bool {
        self.code == 0
    }
}

/// Runs the command line in-process, capturing the primary output via `--out`
/// unless the arguments already name a destination.
fn run(args: &[&str]) -> Output {
    let dir = tempfile::tempdir().unwrap();
    let capture = dir.path().join("stdout");
    let mut argv = vec!["semiflat"];
    argv.extend_from_slice(args);
    if !args.contains(&"--out") {
        argv.extend(["--out", capture.to_str().unwrap()]);
    }
    let code = match Cli::try_parse_from(&argv) {
        Ok(cli) => run_cli(cli),
        Err(e) => e.exit_code(),
    };
    let stdout = std::fs::read_to_string(&capture).unwrap_or_default();
    Output { code, stdout }
}

fn stdout(o: &Output) -> String {
    o.stdout.clone()
}

fn json(o: &Output) -> Value {
    assert!(o.success(), "exit {}: {}", o.code, o.stdout);
    serde_json::from_str(&o.stdout).unwrap()
}

fn model_file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_examples() {
    let v = json(&run(&["classify", "1", "1", "0", "1"]));
    assert_eq!((v["type"].as_str(), v["order"].as_str(), v["bad_cycles"].as_u64()), (Some("I_1"), Some("inf"), Some(1)));
    let v = json(&run(&["classify", "1", "0", "0", "1"]));
    assert_eq!((v["type"].as_str(), v["bad_cycles"].as_u64()), (Some("I_0"), Some(2)));
    let v = json(&run(&["classify", "0", "1", "-1", "1"]));
    assert_eq!((v["type"].as_str(), v["order"].as_u64(), v["bad_cycles"].as_u64()), (Some("II"), Some(6), Some(0)));
    let v = json(&run(&["classify", "-1", "-3", "0", "-1"]));
    assert_eq!((v["type"].as_str(), v["invariant_rank"].as_u64()), (Some("I_3*"), Some(0)));
}

#[test]
fn classify_input_errors() {
    assert_eq!(run(&["classify", "1", "1", "1", "1"]).code, 2);
    assert_eq!(run(&["classify", "2", "1", "1", "1"]).code, 2);
    assert_eq!(run(&["classify", "1", "x", "0", "1"]).code, 2);
}

#[test]
fn table_dump_matches_checked_in_golden() {
    let golden = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/kodaira_table.csv")).unwrap();
    let o = run(&["table"]);
    assert!(o.success());
    assert_eq!(stdout(&o), golden);
    assert_eq!(stdout(&o).lines().count(), 15);
    let ii = stdout(&run(&["table", "--type", "II"]));
    assert_eq!(ii.lines().nth(1), Some("0,1 mod 3,II,+(0 1; -1 1),6,(1-z^(m/3))*z^(5/6),zeta3*(1-zeta3*z^(m/3))*z^(5/6),1,5/6,1/6"));
    let v = json(&run(&["table", "--type", "I_2*", "--format", "json"]));
    assert_eq!(v["rows"][0]["type"], "I_b*");
    assert_eq!(v["rows"][0]["order"], "inf");
}

#[test]
fn curvature_scan_header_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let m = model_file(dir.path(), "i1.model", "type = I_1\n");
    let args = ["scan", "curvature", "--model", s(&m), "--radii", "1e-2:1e-8:9:log"];
    let a = run(&args);
    assert!(a.success());
    assert!(stdout(&a).starts_with("r,z_abs,theta_sq,target,ratio\n"));
    let b = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| run(&args));
    assert_eq!(a.stdout, b.stdout);
    // 17 significant digits
    let first = stdout(&a).lines().nth(1).unwrap().split(',').nth(2).unwrap().to_string();
    let mantissa = first.split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17, "{first}");
}

#[test]
fn cone_angle_scan_checks() {
    let dir = tempfile::tempdir().unwrap();
    let ii = model_file(dir.path(), "ii.model", "type = II\npole_flag = minus-D\n");
    let o = run(&["scan", "cone-angle", "--model", s(&ii), "--radii", "1e-6:1e-8:3:log", "--check"]);
    assert_eq!(o.code, 0, "{}", o.stdout);
    let last = stdout(&o).lines().rfind(|l| !l.starts_with('#')).unwrap().to_string();
    let theta: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!((theta * 6.0 - 1.0).abs() < 0.02, "{theta}");

    // the incomplete I_1 end converges like 1 - 1/(2 log(1/r)), too slowly for the 2% check
    let i1 = model_file(dir.path(), "i1.model", "type = I_1\npole_flag = zero\n");
    let o = run(&["scan", "cone-angle", "--model", s(&i1), "--radii", "1e-6:1e-8:3:log", "--check"]);
    assert_eq!(o.code, 1);
    assert!(stdout(&o).contains("# check_theta=false"));
}

#[test]
fn alh_scan_reports_rate_and_target() {
    let dir = tempfile::tempdir().unwrap();
    let m = model_file(dir.path(), "alh.model", "type = I_0\ntau0_im = 1\ntau_slope_re = 0.25\n");
    let v = json(&run(&["scan", "alh", "--model", s(&m), "--radii", "7:56:16:log", "--format", "json", "--check"]));
    let (rate, target) = (v["rate"].as_f64().unwrap(), v["rate_target"].as_f64().unwrap());
    assert!((target - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    assert!((rate / target - 1.0).abs() < 0.05);
    assert_eq!(v["rows"].as_array().unwrap().len(), 16);
}

#[test]
fn scan_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let m = model_file(dir.path(), "i1.model", "type = I_1\n");
    for radii in ["1:1:5:log", "1e-2:1e-4:1:log", "-1:1:4:log", "1:2:3"] {
        assert_eq!(run(&["scan", "volume", "--model", s(&m), "--radii", radii]).code, 2, "{radii}");
    }
    let bad = model_file(dir.path(), "bad.model", "type = V\n");
    assert_eq!(run(&["scan", "volume", "--model", s(&bad), "--radii", "1e2:1e4:4:log"]).code, 2);
    assert_eq!(run(&["scan", "volume", "--model", "/nonexistent", "--radii", "1e2:1e4:4:log"]).code, 2);
    // injectivity needs an I_b end
    let ii = model_file(dir.path(), "ii.model", "type = II\n");
    assert_eq!(run(&["scan", "inj", "--model", s(&ii), "--radii", "1e2:1e4:4:log"]).code, 2);
}

#[test]
fn volume_and_inj_scans() {
    let dir = tempfile::tempdir().unwrap();
    let m = model_file(dir.path(), "i1.model", "type = I_1\n");
    let v = json(&run(&["scan", "volume", "--model", s(&m), "--radii", "1e2:1e6:16:log", "--format", "json", "--check"]));
    assert!((v["exponent"].as_f64().unwrap() - 4.0 / 3.0).abs() < 0.05);
    let v = json(&run(&["scan", "inj", "--model", s(&m), "--radii", "1e2:1e6:16:log", "--format", "json", "--check"]));
    assert!((v["shortest_vs_r"].as_f64().unwrap() + 1.0 / 3.0).abs() < 0.03);
}

#[test]
fn fiber_info_and_metric_eval() {
    let dir = tempfile::tempdir().unwrap();
    let m = model_file(dir.path(), "iv.model", "type = IV*\nm = 4\nepsilon = 0.5\n");
    let v = json(&run(&["fiber-info", "--model", s(&m)]));
    assert_eq!((v["type"].as_str(), v["order"].as_u64(), v["N"].as_u64()), (Some("IV*"), Some(3), Some(1)));
    assert_eq!(v["theta_complete"], "2/3");
    let v = json(&run(&["metric-eval", "--model", s(&m), "--z", "0.2,-0.1", "--w", "0.05,0.02", "--check"]));
    assert!((v["fiber_area"].as_f64().unwrap() / 0.5 - 1.0).abs() < 1e-14);
    assert!(v["kahler_residual"].as_f64().unwrap() < 1e-6);
    assert_eq!(v["checks_passed"], true);
    assert_eq!(run(&["metric-eval", "--model", s(&m), "--z", "abc"]).code, 2);
}

#[test]
fn ma_zero_fixture_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("u.grid");
    let v = json(&run(&["ma-solve", "--fixture", "zero", "--m", "1", "--n", "8", "--solution", s(&sol)]));
    assert_eq!(v["iterations"], 0);
    let bytes = std::fs::read(&sol).unwrap();
    assert_eq!(&bytes[..8], b"CMAGRID1");
    assert_eq!(bytes.len(), 32 + 8 * 64);
    assert!(bytes[32..].iter().all(|&b| b == 0));
    let side: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("u.grid.json")).unwrap()).unwrap();
    for k in ["residual_inf", "iterations", "positivity_margin"] {
        assert!(side.get(k).is_some(), "{k}");
    }
}

#[test]
fn ma_from_csv_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.csv");
    let mut text = String::from("x1,y1,value\n");
    for i in 0..8 {
        for j in 0..8 {
            let f = 0.1 * (std::f64::consts::TAU * i as f64 / 8.0).sin() * (std::f64::consts::TAU * j as f64 / 8.0).cos();
            text += &format!("{i},{j},{f:e}\n");
        }
    }
    std::fs::write(&input, text).unwrap();
    let out = dir.path().join("u.csv");
    let v = json(&run(&["ma-solve", "--input", s(&input), "--solution", s(&out), "--check"]));
    assert_eq!((v["m"].as_u64(), v["n"].as_u64()), (Some(1), Some(8)));
    assert!(v["residual_inf"].as_f64().unwrap() < 1e-10);
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("x1,y1,value\n"));
    std::fs::write(&input, "x1,y1,value\n0,0,1\n").unwrap();
    assert_eq!(run(&["ma-solve", "--input", s(&input)]).code, 2);
}

#[test]
fn ma_bound_and_manufactured_order() {
    let v = json(&run(&["ma-solve", "--fixture", "sinusoid", "--m", "2", "--n", "16", "--epsilon", "0.5", "--check"]));
    assert_eq!(v["bound_ok"], true);
    assert!(v["u_sup"].as_f64().unwrap() <= 2.0 * v["f_sup"].as_f64().unwrap());
    let v = json(&run(&["ma-solve", "--fixture", "manufactured", "--n", "16", "--check"]));
    assert!((v["order"].as_f64().unwrap() - 2.0).abs() < 0.2, "{v}");
}

#[test]
fn sobolev_probe_cli() {
    let o = run(&["sobolev-probe", "--beta", "4", "--alpha", "2", "--check"]);
    assert!(o.success());
    let text = stdout(&o);
    assert!(text.starts_with("profile,lambda,lhs,rhs,ratio\n"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 5 * 9);
    let v = json(&run(&["sobolev-probe", "--beta", "3", "--alpha", "1", "--profiles", "zero,tent", "--format", "json"]));
    assert_eq!(v["excluded"], "zero");
    assert_eq!(run(&["sobolev-probe", "--beta", "4", "--alpha", "5"]).code, 2);
    assert_eq!(run(&["sobolev-probe", "--beta", "4", "--alpha", "2", "--profiles", "spike"]).code, 2);
}

#[test]
fn verify_subset_json() {
    let o = run(&["verify", "--only", "1,13", "--json"]);
    assert!(o.success(), "{}", stdout(&o));
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["total"], 2);
    let c = &v["criteria"][0];
    for k in ["id", "name", "pass", "measured", "target", "tolerance", "seconds", "budget_seconds"] {
        assert!(c.get(k).is_some(), "{k}");
    }
    let lines = stdout(&run(&["verify", "--only", "9"]));
    assert!(lines.starts_with("[PASS]  9 weil-petersson"));
    assert_eq!(run(&["verify", "--only", "14"]).code, 2);
}

#[test]
fn output_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    assert!(run(&["table", "--out", s(&out)]).success());
    assert_eq!(std::fs::read_to_string(out).unwrap().lines().count(), 15);
    assert_eq!(run(&["table", "--out", "/nonexistent/dir/t.csv"]).code, 2);
}
