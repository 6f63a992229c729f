use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;

use floquet_cli::plot::{eigenvalue_svg, render_plots, HEIGHT, WIDTH};
use floquet_cli::{run, EXIT_INCONSISTENT, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};
use floquet_core::forced::{read_period_sup_csv, read_sweep_csv, read_trace_csv};
use floquet_core::stats::linear_fit;
use floquet_core::system::{builtin, serialize_system};
use floquet_core::{Matrix, System, C64};
use serde_json::Value;
use tempfile::TempDir;

fn floquet(dir: &Path, args: &[&str]) -> i32 {
    let mut argv = vec!["floquet", "--out-dir", dir.to_str().unwrap()];
    argv.extend_from_slice(args);
    run(&argv)
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(
                    p.strip_prefix(dir).unwrap().display().to_string(),
                    fs::read(&p).unwrap(),
                );
            }
        }
    }
    out
}

#[test]
fn analyze_hyperbolic() {
    let dir = TempDir::new().unwrap();
    assert_eq!(floquet(dir.path(), &["analyze", "hyperbolic-diag"]), EXIT_OK);
    let r = report(dir.path());
    assert_eq!(r["classification"], "Dichotomic");
    assert_eq!(r["eta"], 1);
    assert_eq!(r["projection"]["kind"], "dichotomy");
    assert!(dir.path().join("plots/eigenvalues.svg").exists());
}

#[test]
fn probe_scalar_zero() {
    let dir = TempDir::new().unwrap();
    assert_eq!(floquet(dir.path(), &["probe", "scalar-zero", "--mu", "0"]), EXIT_OK);
    let r = report(dir.path());
    assert_eq!(r["verdict"]["status"], "LinearGrowth");
    let sups =
        read_period_sup_csv(fs::File::open(dir.path().join("traces/probe_per_period_sup.csv")).unwrap()).unwrap();
    let pts: Vec<(f64, f64)> = sups.iter().enumerate().map(|(k, &s)| ((k + 1) as f64, s)).collect();
    let slope = linear_fit(&pts).slope;
    assert!((slope - 1.0).abs() < 1e-3, "{slope}");
    let svg = fs::read_to_string(dir.path().join("plots/probe_per_period_sup.svg")).unwrap();
    assert!(svg.contains("<polyline"));
}

#[test]
fn verify_rotation_all() {
    let dir = TempDir::new().unwrap();
    let code = floquet(dir.path(), &["verify", "rotation", "all"]);
    let r = report(dir.path());
    let theorems = r["theorems"].as_array().unwrap();
    let by_id = |id: &str| theorems.iter().find(|t| t["theorem_id"] == id).unwrap().clone();
    assert_eq!(by_id("T3_2")["outcome"], "Vacuous");
    assert_eq!(by_id("T3_3")["outcome"], "Vacuous");
    assert_eq!(by_id("T3_5")["outcome"], "Pass");
    let ex = by_id("Example3_6");
    for h in ex["hypotheses_status"].as_array().unwrap() {
        assert_eq!(h["holds"], true, "{h}");
    }
    // μ = 1 is resonant for q = 2π, so the reproduction is reported inconsistent.
    assert_eq!(ex["outcome"], "Fail");
    assert_eq!(code, EXIT_INCONSISTENT);
    assert_eq!(r["consistent"], false);
    for t in theorems {
        for a in t["artifacts"].as_array().unwrap() {
            assert!(dir.path().join(a.as_str().unwrap()).exists());
        }
    }
}

#[test]
fn verify_consistent_systems_exit_zero() {
    for (name, id) in [("hyperbolic-diag", "T3_2"), ("scalar-zero", "T3_3"), ("damped", "T3_5")] {
        let dir = TempDir::new().unwrap();
        assert_eq!(floquet(dir.path(), &["verify", name, id]), EXIT_OK, "{name} {id}");
        assert_eq!(report(dir.path())["consistent"], true);
    }
}

#[test]
fn emitted_csvs_parse_back() {
    let dir = TempDir::new().unwrap();
    assert_eq!(floquet(dir.path(), &["verify", "scalar-zero", "T3_5"]), EXIT_OK);
    assert_eq!(
        floquet(
            dir.path(),
            &["simulate", "hyperbolic-diag", "--b", "1,1", "--periods", "3"]
        ),
        EXIT_OK
    );
    assert_eq!(
        floquet(dir.path(), &["verify", "rotation", "Example3_6"]),
        EXIT_INCONSISTENT
    );
    let mut seen = 0;
    for e in fs::read_dir(dir.path().join("traces")).unwrap() {
        let p = e.unwrap().path();
        let text = fs::read_to_string(&p).unwrap();
        let header = text.lines().next().unwrap();
        match header {
            "mu,sup,verdict" => assert!(!read_sweep_csv(text.as_bytes()).unwrap().is_empty()),
            "n,sup" => assert!(!read_period_sup_csv(text.as_bytes()).unwrap().is_empty()),
            h if h.starts_with("t,re_x1,im_x1") => {
                let tr = read_trace_csv(text.as_bytes(), 1.0).unwrap();
                assert_eq!(tr.per_period_sup.len(), 3);
            }
            other => panic!("unexpected header {other} in {}", p.display()),
        }
        seen += 1;
    }
    assert!(seen > 10);
}

#[test]
fn outputs_are_byte_identical() {
    let runs: Vec<_> = (0..2)
        .map(|_| {
            let dir = TempDir::new().unwrap();
            assert_eq!(
                floquet(dir.path(), &["sweep", "hyperbolic-diag", "--periods", "30"]),
                EXIT_OK
            );
            assert_eq!(
                floquet(dir.path(), &["--seed", "7", "verify", "hyperbolic-diag", "T2_1_growth"]),
                EXIT_OK
            );
            assert_eq!(floquet(dir.path(), &["analyze", "rotation"]), EXIT_OK);
            let f = files(dir.path());
            (dir, f)
        })
        .collect();
    assert!(runs[0].1.len() >= 5);
    assert_eq!(runs[0].1, runs[1].1);
}

#[test]
fn rotation_eigenvalue_plot() {
    let dir = TempDir::new().unwrap();
    assert_eq!(floquet(dir.path(), &["analyze", "rotation"]), EXIT_OK);
    let svg = fs::read_to_string(dir.path().join("plots/eigenvalues.svg")).unwrap();
    assert!(svg.contains(&format!(r#"width="{WIDTH}" height="{HEIGHT}""#)));
    let markers: Vec<&str> = svg.lines().filter(|l| l.contains(r#"class="eig""#)).collect();
    assert_eq!(markers.len(), 2);
    assert_eq!(markers[0], markers[1]);
    let reference = eigenvalue_svg("x", &[(C64::new(1.0, 0.0), 2)]);
    let want: Vec<&str> = reference.lines().filter(|l| l.contains(r#"class="eig""#)).collect();
    assert_eq!(markers, want);
    assert!(svg.contains("|z| = 1"));
}

#[test]
fn empty_trace_list_is_an_error() {
    assert!(render_plots(&[]).is_err());
}

#[test]
fn usage_errors() {
    let dir = TempDir::new().unwrap();
    assert_eq!(floquet(dir.path(), &["nonsense"]), EXIT_USAGE);
    assert_eq!(floquet(dir.path(), &["analyze", "no-such-system"]), EXIT_USAGE);
    assert_eq!(
        floquet(dir.path(), &["probe", "hyperbolic-diag", "--b", "1"]),
        EXIT_USAGE
    );
    assert_eq!(floquet(dir.path(), &["verify", "damped", "T9_9"]), EXIT_USAGE);
    assert_eq!(floquet(dir.path(), &["--step", "0.5", "analyze", "damped"]), EXIT_USAGE);
    assert_eq!(
        floquet(dir.path(), &["--integrator", "euler", "analyze", "damped"]),
        EXIT_USAGE
    );
    assert_eq!(run(&["floquet", "--help"]), EXIT_OK);
}

fn write_system(dir: &Path, system: &System) -> String {
    let path = dir.join(format!("{}.toml", system.label));
    fs::write(&path, serialize_system(system, None).unwrap()).unwrap();
    path.display().to_string()
}

#[test]
fn numerical_failure_exit_code() {
    let dir = TempDir::new().unwrap();
    let stiff = System::constant("stiff", 1.0, Matrix::from_real_diagonal(&[5000.0, -1.0])).unwrap();
    let path = write_system(dir.path(), &stiff);
    assert_eq!(floquet(&dir.path().join("out"), &["analyze", &path]), EXIT_NUMERICAL);
}

#[test]
fn system_files_and_formats() {
    let dir = TempDir::new().unwrap();
    let sys = builtin::<f64>("switched").unwrap().system;
    let path = write_system(dir.path(), &sys);
    let out = dir.path().join("out");
    assert_eq!(floquet(&out, &["--format", "json", "analyze", &path]), EXIT_OK);
    let r = report(&out);
    assert_eq!(r["system"]["source"], "file");
    assert_eq!(r["classification"], "Dichotomic");
    assert!(!out.join("plots").exists());

    let out = dir.path().join("csv-only");
    assert_eq!(
        floquet(
            &out,
            &["--format", "csv", "probe", &path, "--mu", "-1.5", "--periods", "20"]
        ),
        EXIT_OK
    );
    assert!(!out.join("report.json").exists());
    assert!(out.join("traces/probe_per_period_sup.csv").exists());
}

#[test]
fn binary_env_out_dir_and_collision_warning() {
    let work = TempDir::new().unwrap();
    fs::write(work.path().join("damped"), "not a system").unwrap();
    let out = work.path().join("env-out");
    let o = Command::new(env!("CARGO_BIN_EXE_floquet"))
        .current_dir(work.path())
        .env("FLOQUET_OUT_DIR", &out)
        .args(["analyze", "damped"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    assert_eq!(report(&out)["classification"], "Stable");

    let o = Command::new(env!("CARGO_BIN_EXE_floquet"))
        .arg("list-examples")
        .output()
        .unwrap();
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), floquet_core::system::BUILTIN_NAMES.len());
    assert!(text.contains("rotation"));
}
