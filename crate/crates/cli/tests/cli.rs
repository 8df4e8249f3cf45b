//! End-to-end checks of the command-line surface: subcommands, file
//! outputs, exit codes and byte-level determinism.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_grover-sim"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("grover_cli_{tag}_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn help_lists_subcommands() {
    let out = bin().arg("--help").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in [
        "run",
        "ensemble",
        "phase-diagram",
        "husimi",
        "compare",
        "theory",
        "fit-r",
        "fig1",
        "fig2",
        "fig3",
        "fig4",
    ] {
        assert!(text.contains(sub), "missing subcommand {sub}");
    }
}

#[test]
fn run_writes_timeseries_and_sidecar() {
    let dir = temp_dir("run");
    let out = bin()
        .args([
            "run", "--lx", "2", "--ly", "2", "--eps", "1e-3", "--seed", "7", "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.join("timeseries_eps0.001_r0.csv")).unwrap();
    assert!(csv.starts_with("t,w_g,w_4,fidelity\n"));
    let sidecar = std::fs::read_to_string(dir.join("timeseries_eps0.001_r0.json")).unwrap();
    assert!(sidecar.contains("\"master_seed\": 7"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn dump_circuit_prints_gates() {
    let out = bin()
        .args(["run", "--lx", "2", "--ly", "2", "--dump-circuit"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("oracle 0\n"));
    assert!(text.contains("h 1"));
}

#[test]
fn realization_dump_round_trips_through_run() {
    let dir = temp_dir("reald");
    let out = bin()
        .args([
            "run",
            "--lx",
            "2",
            "--ly",
            "2",
            "--eps",
            "2e-3",
            "--dump-realization",
            "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let reali = dir.join("realization_eps0.002_r0.txt");
    assert!(reali.exists());
    // replay through --realization-file reproduces the same trajectory
    let replay_dir = temp_dir("reald2");
    let out = bin()
        .args([
            "run",
            "--lx",
            "2",
            "--ly",
            "2",
            "--eps",
            "2e-3",
            "--realization-file",
        ])
        .arg(&reali)
        .arg("--out")
        .arg(&replay_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let a = std::fs::read(dir.join("timeseries_eps0.002_r0.csv")).unwrap();
    let b = std::fs::read(replay_dir.join("timeseries_eps0.002_r0.csv")).unwrap();
    assert_eq!(a, b);
    std::fs::remove_dir_all(&dir).ok();
    std::fs::remove_dir_all(&replay_dir).ok();
}

#[test]
fn ensemble_outputs_are_deterministic() {
    let run = |tag: &str| {
        let dir = temp_dir(tag);
        let out = bin()
            .args([
                "ensemble",
                "--lx",
                "2",
                "--ly",
                "2",
                "--eps",
                "0,1e-3",
                "--realizations",
                "3",
                "--seed",
                "42",
                "--workers",
                if tag.ends_with('1') { "1" } else { "2" },
                "--out",
            ])
            .arg(&dir)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let bytes = std::fs::read(dir.join("ensemble_stats.csv")).unwrap();
        std::fs::remove_dir_all(&dir).ok();
        bytes
    };
    let a = run("det1");
    let b = run("det2");
    assert_eq!(a, b);
}

#[test]
fn ensemble_accepts_config_file() {
    let dir = temp_dir("cfgfile");
    let config = format!(
        r#"{{
  "l_x": 2, "l_y": 2,
  "tau": {{ "mode": "fixed", "value": 0 }},
  "epsilons": [0.0, 0.001],
  "realizations": 2,
  "master_seed": 9,
  "output_dir": "{}"
}}"#,
        dir.display()
    );
    let cfg_path = dir.join("experiment.json");
    std::fs::write(&cfg_path, config).unwrap();
    let out = bin()
        .args(["ensemble", "--config"])
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stats = std::fs::read_to_string(dir.join("ensemble_stats.csv")).unwrap();
    assert_eq!(stats.lines().count(), 3);
    // flags conflicting with the config file are rejected by the parser
    let out = bin()
        .args(["ensemble", "--config"])
        .arg(&cfg_path)
        .args(["--eps", "1e-3"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn theory_prints_table() {
    let out = bin()
        .args(["theory", "--lx", "3", "--ly", "4"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("epsilon,sigma,w_g_theory,eps_over_eps_c\n"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn config_errors_exit_2() {
    let out = bin()
        .args(["run", "--lx", "1", "--ly", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["ensemble", "--lx", "2", "--ly", "2", "--eps", "-1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn capacity_errors_exit_3() {
    let out = bin()
        .args(["run", "--lx", "5", "--ly", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn husimi_and_phase_diagram_write_grids() {
    let dir = temp_dir("grids");
    let out = bin()
        .args([
            "husimi", "--lx", "2", "--ly", "2", "--eps", "0", "--times", "0", "--ppm", "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.join("husimi_eps0_t0.csv").exists());
    assert!(dir.join("husimi_eps0_t0.ppm").exists());

    let out = bin()
        .args([
            "phase-diagram",
            "--lx",
            "2",
            "--ly",
            "2",
            "--eps-steps",
            "3",
            "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let pd = std::fs::read_to_string(dir.join("phase_diagram.csv")).unwrap();
    assert_eq!(pd.lines().count(), 2 + 3);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn fit_r_recovers_from_synthetic_table() {
    // synthesize an ensemble_stats.csv whose w_g_mean column follows the
    // closed form at R = 0.56 exactly
    let dir = temp_dir("fitr");
    let out = bin()
        .args(["theory", "--lx", "3", "--ly", "4", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let theory = std::fs::read_to_string(dir.join("theory.csv")).unwrap();
    let mut stats = String::from("epsilon,eps_over_eps_c,w_g_mean\n");
    for line in theory.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        stats.push_str(&format!("{},{},{}\n", cols[0], cols[3], cols[2]));
    }
    let stats_path = dir.join("ensemble_stats.csv");
    std::fs::write(&stats_path, stats).unwrap();
    let out = bin()
        .args(["fit-r", "--lx", "3", "--ly", "4", "--input"])
        .arg(&stats_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("R = 0.56"), "{text}");
    std::fs::remove_dir_all(&dir).ok();
}
