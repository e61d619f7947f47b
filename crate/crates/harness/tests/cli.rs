use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bnls_harness::series::read_series;

fn bnls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bnls"))
        .args(args)
        .output()
        .expect("spawn bnls")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn constant_lattice_run_keeps_sup_at_amplitude() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.cfg",
        "engine = lattice\nseed = 1\nrun.horizon = 5\nrun.samples = 10\n\
         data.kind = constant\ndata.amplitude = 0.75\nlattice.extent = 64\nlattice.dt = 0.05\n",
    );
    let out = dir.path().join("run");
    let o = bnls(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let series = read_series(&fs::read_to_string(out.join("series.csv")).unwrap()).unwrap();
    let sup = series.column("sup_abs").unwrap();
    assert_eq!(sup.len(), 11);
    for s in sup {
        assert!((s - 0.75).abs() < 1e-12, "sup {s}");
    }
    assert!(out.join("meta.json").exists());
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "r.cfg",
        "engine = lattice\nseed = 7\nrun.horizon = 2\nrun.samples = 8\n\
         data.kind = random_phase\nlattice.extent = 128\nlattice.dt = 0.05\n",
    );
    let csv = |name: &str| {
        let out = dir.path().join(name);
        let o = bnls(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        fs::read(out.join("series.csv")).unwrap()
    };
    assert_eq!(csv("a"), csv("b"));

    let other = dir.path().join("c");
    let o = bnls(&[
        "run",
        "--config",
        &cfg,
        "--out",
        other.to_str().unwrap(),
        "--seed",
        "8",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_ne!(csv("a"), fs::read(other.join("series.csv")).unwrap());
}

#[test]
fn bad_engine_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.cfg", "engine = warp\n");
    let o = bnls(&[
        "run",
        "--config",
        &cfg,
        "--out",
        dir.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("engine"), "{}", stderr(&o));
}

#[test]
fn unknown_key_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.cfg",
        "engine = lattice\nlattice.extnet = 5\n",
    );
    let o = bnls(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("lattice.extnet"));
}

#[test]
fn missing_config_file_exits_with_config_code() {
    let o = bnls(&["run", "--config", "/nonexistent/bnls.cfg"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn diverging_newton_exits_with_numerical_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "n.cfg",
        "engine = newton\nrun.horizon = 5\ndata.amplitudes = 3\n",
    );
    let o = bnls(&[
        "run",
        "--config",
        &cfg,
        "--out",
        dir.path().join("n").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn fit_reads_a_written_series() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("t,sup_abs\n");
    for i in 1..=20 {
        let t = i as f64;
        csv.push_str(&format!("{t},{}\n", 2.0 * t.sqrt()));
    }
    let input = dir.path().join("s.csv");
    fs::write(&input, csv).unwrap();
    let o = bnls(&[
        "fit",
        "--input",
        input.to_str().unwrap(),
        "--window",
        "2,20",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let slope: f64 = text.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((slope - 0.5).abs() < 1e-12, "{text}");
}

#[test]
fn export_kernel_round_trips_through_the_reader() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.csv");
    let o = bnls(&[
        "export-kernel",
        "--time",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let k = bnls_harness::series::read_kernel(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!((k.total_mass() - 1.0).abs() < 1e-12);
}

#[test]
fn accept_rejects_unknown_criterion() {
    let o = bnls(&["accept", "--only", "15"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn accept_single_criterion_prints_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let o = bnls(&["accept", "--only", "8", "--out", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().next().unwrap().starts_with("[PASS] C08"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(json["results"].as_array().unwrap().len(), 1);
}

#[test]
fn sweep_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.cfg",
        "engine = lattice\nrun.horizon = 1\nrun.samples = 4\nlattice.extent = 32\n\
         data.kind = random_phase\nsweep.r = 1, 2\nsweep.seed = 1, 2\n",
    );
    let out = dir.path().join("sweep");
    let o = bnls(&[
        "sweep",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--workers",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 5);
}
