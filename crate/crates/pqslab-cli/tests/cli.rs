//! End-to-end checks of the binary: determinism, round-trips, exit codes
//! and the figure artifacts.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_pqslab")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pqslab-cli-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn criteria_csv_roundtrips_and_is_deterministic() {
    let args = [
        "criteria",
        "--set",
        "state=ground",
        "--set",
        "number=poisson",
        "--set",
        "mean_n=30",
        "--set",
        "coupling_min=-0.005",
        "--set",
        "coupling_max=-0.06",
        "--set",
        "coupling_points=5",
        "--set",
        "offsets=0.7853981633974483,1.5707963267948966",
    ];
    let a = stdout_of(&args);
    let b = stdout_of(&args);
    assert_eq!(a, b, "criteria output must be byte-identical across runs");

    let mut lines = a.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "coupling");
    assert!(header.contains(&"e_ph"));
    assert!(header.contains(&"delta_phi_1"));
    let mut rows = 0;
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), header.len());
        for (name, cell) in header.iter().zip(&cells) {
            if cell.is_empty() || *name == "branch" {
                continue;
            }
            if matches!(
                *name,
                "entangled_modes" | "entangled_particles" | "subshot_all_angles"
            ) {
                assert!(*cell == "true" || *cell == "false");
            } else {
                let v: f64 = cell.parse().expect("float cell parses");
                // 17 significant digits round-trip exactly
                assert_eq!(format!("{v:.16e}"), *cell);
            }
        }
        rows += 1;
    }
    assert_eq!(rows, 5);
}

#[test]
fn criteria_json_matches_csv_values() {
    let base = [
        "--set",
        "state=coherent",
        "--set",
        "number=fixed",
        "--set",
        "n=60",
        "--set",
        "couplings=0",
    ];
    let csv = stdout_of(&[&["criteria"], &base[..]].concat());
    let json = stdout_of(&[&["criteria", "--format", "json"], &base[..]].concat());
    let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
    let e_ph_json = parsed[0]["e_ph"].as_f64().unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let cells: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == "e_ph").unwrap();
    let e_ph_csv: f64 = cells[idx].parse().unwrap();
    assert_eq!(e_ph_json, e_ph_csv);
    assert!((e_ph_csv - 0.5).abs() < 1e-10);
}

#[test]
fn figures_emit_csv_svg_meta() {
    let dir = tmp_dir("figures");
    let out = run(&[
        "figure",
        "fig4",
        "--set",
        "mean_n=30",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["fig4.csv", "fig4.svg", "fig4_meta.json"] {
        let path = dir.join(name);
        assert!(path.exists(), "{name} missing");
        assert!(std::fs::metadata(&path).unwrap().len() > 100);
    }
    let svg = std::fs::read_to_string(dir.join("fig4.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("<path"));
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("fig4_meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["figure"], "fig4");
    assert!(meta["x_axis"].as_str().unwrap().contains("offset"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn fig2_small_run_shows_immunity() {
    let dir = tmp_dir("fig2");
    let out = run(&[
        "figure",
        "fig2",
        "--set",
        "mean_n=24",
        "--set",
        "points=5",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("fig2.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let iph_f = header.iter().position(|h| *h == "e_ph_fixed").unwrap();
    let iph_p = header.iter().position(|h| *h == "e_ph_poisson").unwrap();
    for line in csv.lines().skip(1).filter(|l| l.starts_with("attractive")) {
        let cells: Vec<&str> = line.split(',').collect();
        let f: f64 = cells[iph_f].parse().unwrap();
        let p: f64 = cells[iph_p].parse().unwrap();
        assert!(f < 1.0, "attractive branch should witness entanglement");
        assert!((p - f).abs() / f < 0.25, "normalized criterion drifts: {f} vs {p}");
    }
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn estimate_json_is_seed_deterministic() {
    let args = [
        "estimate",
        "--seed",
        "7",
        "--shots",
        "400",
        "--trials",
        "120",
        "--set",
        "state=coherent",
        "--set",
        "number=poisson",
        "--set",
        "mean_n=25",
        "--set",
        "couplings=0",
        "--set",
        "phis=1.0471975511965976",
    ];
    let a = stdout_of(&args);
    let b = stdout_of(&args);
    assert_eq!(a, b, "fixed seed must give byte-identical reports");
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    let row = &v["rows"][0];
    let rms_norm = row["rms_normalized"].as_f64().unwrap();
    let analytic = row["analytic_delta_phi"].as_f64().unwrap();
    // SQL-level input: coarse agreement is enough at 400 shots x 120 trials
    assert!((rms_norm / analytic - 1.0).abs() < 0.5);
    // different seed changes the sampled numbers
    let mut args2: Vec<&str> = args.to_vec();
    args2[2] = "8";
    let c = stdout_of(&args2);
    assert_ne!(a, c);
}

#[test]
fn state_dump_matches_expected_shape() {
    let text = stdout_of(&["state", "--kind", "phase", "--n", "4"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let amps = v["amplitudes"].as_array().unwrap();
    assert_eq!(amps.len(), 5);
    for a in amps {
        assert!((a["abs2"].as_f64().unwrap() - 0.2).abs() < 1e-12);
    }
    // ground state at g = 0 is the binomial coherent profile
    let text = stdout_of(&["state", "--kind", "ground", "--n", "4", "--coupling", "0"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let amps = v["amplitudes"].as_array().unwrap();
    let want = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];
    for (a, w) in amps.iter().zip(want) {
        assert!((a["abs2"].as_f64().unwrap() - w).abs() < 1e-10);
    }
}

#[test]
fn exit_codes_follow_the_contract() {
    // unreadable config file -> 2
    let out = run(&["criteria", "--config", "/nonexistent/path.cfg"]);
    assert_eq!(out.status.code(), Some(2));
    // malformed config value -> 2
    let out = run(&["criteria", "--set", "mean_n=banana"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("mean_n"), "diagnostic names the field: {err}");
    // unknown state kind -> 2
    let out = run(&["state", "--kind", "bogus", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    // numerical failure: optimal PQS forced to non-convergence -> 3
    let out = run(&[
        "criteria",
        "--set",
        "state=pqs-optimal",
        "--set",
        "number=fixed",
        "--set",
        "n=40",
        "--set",
        "couplings=0",
        "--set",
        "pqs_tol=1e-300",
        "--set",
        "pqs_max_iters=1",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn thread_env_fallback_is_accepted() {
    let args = [
        "criteria",
        "--set",
        "state=coherent",
        "--set",
        "number=fixed",
        "--set",
        "n=30",
        "--set",
        "couplings=0",
    ];
    let with_env = Command::new(bin())
        .args(args)
        .env("PQSLAB_THREADS", "2")
        .output()
        .unwrap();
    assert!(with_env.status.success());
    let with_flag = Command::new(bin())
        .args(["--threads", "2"])
        .args(args)
        .output()
        .unwrap();
    assert!(with_flag.status.success());
    // thread count cannot change the numbers
    assert_eq!(with_env.stdout, with_flag.stdout);
    assert_eq!(with_env.stdout, stdout_of(&args).into_bytes());
}

#[test]
fn config_file_plus_override() {
    let dir = tmp_dir("config");
    let cfg_path: &Path = &dir.join("run.cfg");
    std::fs::write(
        cfg_path,
        "# demo sweep\nstate = coherent\nnumber = fixed\nn = 50\ncouplings = 0\n",
    )
    .unwrap();
    let a = stdout_of(&["criteria", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(a.lines().count(), 2);
    // override the sector size
    let b = stdout_of(&[
        "criteria",
        "--config",
        cfg_path.to_str().unwrap(),
        "--set",
        "n=80",
    ]);
    let mean_idx = 1; // mean_n column
    let cell = |text: &str| -> f64 {
        text.lines()
            .nth(1)
            .unwrap()
            .split(',')
            .nth(mean_idx)
            .unwrap()
            .parse()
            .unwrap()
    };
    assert_eq!(cell(&a), 50.0);
    assert_eq!(cell(&b), 80.0);
    let _ = std::fs::remove_dir_all(&dir);
}
