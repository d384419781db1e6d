//! End-to-end tests of the command-line surface: subcommands, config
//! files, flag overrides, exit codes and manifests.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_consensus-lab")
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "consensus-lab-cli-{}-{tag}",
        std::process::id()
    ));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn build_emits_matrix_and_descriptor() {
    let out = scratch("build");
    let status = Command::new(bin())
        .args([
            "build",
            "--family",
            "dense-periodic",
            "--r",
            "0.25",
            "--n",
            "8",
            "--out",
            out.to_str().unwrap(),
        ])
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out.join("dense_periodic_8_r0.25_laplacian.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9); // header + 8 rows
    let descriptor =
        std::fs::read_to_string(out.join("dense_periodic_8_r0.25_descriptor.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&descriptor).unwrap();
    assert_eq!(v["family"], "dense_periodic");
    assert_eq!(v["n_agents"], 8);
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn config_file_with_flag_override() {
    let out = scratch("config");
    std::fs::create_dir_all(&out).unwrap();
    let cfg = out.join("run.cfg");
    std::fs::write(&cfg, "family = path\nn = 64   # overridden below\n").unwrap();
    let status = Command::new(bin())
        .args([
            "spectrum",
            "--config",
            cfg.to_str().unwrap(),
            "--n",
            "6",
            "--plot",
            "false",
            "--out",
            out.to_str().unwrap(),
        ])
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join("path1d_6_unscaled_eigenvalues.csv").exists());
    assert!(!out.join("path1d_64_unscaled_eigenvalues.csv").exists());
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn exit_codes_by_error_class() {
    // validation errors -> 2
    let code = |args: &[&str]| {
        Command::new(bin())
            .args(args)
            .stdout(std::process::Stdio::null())
            .stderr(std::process::Stdio::null())
            .status()
            .unwrap()
            .code()
            .unwrap()
    };
    assert_eq!(code(&["unknown-subcommand"]), 2);
    assert_eq!(
        code(&["spectrum", "--family", "dense-periodic", "--r", "0.9", "--n", "10"]),
        2
    );
    assert_eq!(code(&["preset", "no-such-figure"]), 2);
    // degenerate radius caught by validation before any compute
    assert_eq!(
        code(&["spectrum", "--family", "dense-periodic", "--r", "0.01", "--n", "10"]),
        2
    );
    // numerical-class errors -> 3 (the cost study's conditioning guard)
    assert_eq!(
        code(&["control-cost", "--family", "path", "--n-list", "128", "--t-policy", "fixed:1"]),
        3
    );
    // io errors -> 4 (output dir cannot be created over an existing file)
    let blocker = std::env::temp_dir().join(format!("consensus-lab-blocker-{}", std::process::id()));
    std::fs::write(&blocker, b"file, not a dir").unwrap();
    assert_eq!(
        code(&["spectrum", "--family", "path", "--n", "4", "--out", blocker.to_str().unwrap()]),
        4
    );
    let _ = std::fs::remove_file(&blocker);
}

#[test]
fn validate_subcommand_reports_violations() {
    let output = Command::new(bin())
        .args([
            "validate",
            "--experiment",
            "simulate",
            "--family",
            "path",
            "--scaled",
            "true",
            "--n",
            "32",
            "--dt",
            "0.1",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("suggested dt"), "{stdout}");

    let ok = Command::new(bin())
        .args(["validate", "--family", "path", "--n", "8"])
        .output()
        .unwrap();
    assert!(ok.status.success());
}

#[test]
fn manifest_lists_outputs_with_hashes() {
    let out = scratch("manifest");
    let status = Command::new(bin())
        .args(["gap-study", "--family", "path", "--n-list", "4,8", "--out", out.to_str().unwrap()])
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap();
    assert!(status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap())
            .unwrap();
    let outputs = manifest["outputs"].as_array().unwrap();
    assert!(outputs.iter().any(|o| o["path"] == "gap_study.csv"));
    for o in outputs {
        assert_eq!(o["fnv1a64"].as_str().unwrap().len(), 16);
    }
    assert_eq!(manifest["config"]["experiment"], "gap-study");
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn mean_field_and_subordination_subcommands_run() {
    let out = scratch("mf");
    let status = Command::new(bin())
        .args([
            "mean-field",
            "--n-list",
            "8,16",
            "--n-ref",
            "128",
            "--t",
            "0.3",
            "--dt",
            "0.02",
            "--influence",
            "rational:1",
            "--plot",
            "false",
            "--out",
            out.to_str().unwrap(),
        ])
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out.join("mean_field.csv")).unwrap();
    assert!(csv.starts_with("n,distance\n"));
    assert_eq!(csv.lines().count(), 3);

    let out2 = scratch("sub2");
    let status = Command::new(bin())
        .args([
            "subordination",
            "--second-order",
            "true",
            "--m-quad",
            "24",
            "--dt",
            "0.02",
            "--out",
            out2.to_str().unwrap(),
        ])
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out2.join("kinetic_residual_summary.csv").exists());
    let _ = std::fs::remove_dir_all(&out);
    let _ = std::fs::remove_dir_all(&out2);
}

#[test]
fn fig5_tables_have_full_rows_and_zero_first_eigenvalue() {
    let out = scratch("fig5");
    let status = Command::new(bin())
        .args(["preset", "fig5", "--out", out.to_str().unwrap()])
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap();
    assert!(status.success());
    for scaling in ["unscaled", "scaled"] {
        let csv =
            std::fs::read_to_string(out.join(format!("fig5_path1d_100_{scaling}_eigenvalues.csv")))
                .unwrap();
        assert_eq!(csv.lines().count(), 101, "{scaling}: header plus 100 rows");
        let first = csv.lines().nth(1).unwrap();
        let lambda: f64 = first.split(',').nth(1).unwrap().parse().unwrap();
        assert!(lambda.abs() < 1e-9, "{scaling}: first eigenvalue {lambda}");
    }
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn simulate_second_order_emits_velocities() {
    let out = scratch("so");
    let status = Command::new(bin())
        .args([
            "simulate",
            "--kind",
            "second-order",
            "--family",
            "path",
            "--n",
            "6",
            "--t",
            "0.5",
            "--dt",
            "0.01",
            "--plot",
            "false",
            "--out",
            out.to_str().unwrap(),
        ])
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(
        out.join("second_order_path1d_6_unscaled_trajectory.csv"),
    )
    .unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.contains("v_1") && header.contains("x_6"), "{header}");
    let _ = std::fs::remove_dir_all(&out);
}
