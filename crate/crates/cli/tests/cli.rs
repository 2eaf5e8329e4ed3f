//! End-to-end tests of the `sopkit` binary: exit codes, config handling,
//! output formats, and manifest integrity.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sopkit_cli::manifest;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_sopkit")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn fresh_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sopkit-cli-{name}"));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read(dir: &Path, file: &str) -> String {
    std::fs::read_to_string(dir.join(file)).unwrap_or_else(|e| panic!("reading {file}: {e}"))
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|entry| {
            let entry = entry.unwrap();
            let name = entry.file_name().into_string().unwrap();
            let bytes = std::fs::read(entry.path()).unwrap();
            (name, bytes)
        })
        .collect();
    files.sort_by(|a, b| a.0.cmp(&b.0));
    files
}

#[test]
fn rerun_with_identical_config_and_seed_is_bit_identical() {
    for kind in ["project", "count-eigs"] {
        let dir = fresh_dir(&format!("rerun-{kind}"));
        let out = dir.to_str().unwrap();
        assert!(run(&[kind, "--seed", "9", "--out", out]).status.success());
        let first = snapshot(&dir);
        assert!(run(&[kind, "--seed", "9", "--out", out]).status.success());
        assert_eq!(first, snapshot(&dir), "{kind} re-run changed some output byte");
        manifest::load_and_verify(&dir).unwrap();
    }
}

#[test]
fn unknown_keys_and_kinds_exit_with_2() {
    let dir = fresh_dir("badcfg");
    let cfg = dir.join("bad.cfg");

    std::fs::write(&cfg, "[experiment]\nkind = train\n\n[train]\nwarp = 9\n").unwrap();
    let out = run(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key"));

    std::fs::write(&cfg, "[experiment]\nkind = warp\n").unwrap();
    assert_eq!(run(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));

    // config kind disagrees with the subcommand
    std::fs::write(&cfg, "[experiment]\nkind = train\n").unwrap();
    assert_eq!(run(&["possim", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));

    // bare run without a config has no kind to dispatch on
    assert_eq!(run(&["run"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_path_exits_with_2() {
    let dir = fresh_dir("unwritable");
    let file = dir.join("occupied");
    std::fs::write(&file, "plain file").unwrap();
    let out = run(&["project", "--out", file.join("sub").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unreachable_intensity_exits_with_3() {
    let dir = fresh_dir("vacuous");
    let cfg = dir.join("run.cfg");
    std::fs::write(
        &cfg,
        "[experiment]\nkind = sop-table\n\n[sop-table]\nsamples = 500\nintensities = 50\n",
    )
    .unwrap();
    let out = run(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("numerical"));
}

#[test]
fn run_dispatches_on_the_config_kind() {
    let dir = fresh_dir("dispatch");
    let cfg = dir.join("run.cfg");
    let out_dir = dir.join("out");
    std::fs::write(&cfg, "[experiment]\nkind = count-eigs\nseed = 3\n").unwrap();
    let out = run(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("counts.csv"));
    // the built-in pencil has one eigenvalue inside the unit circle
    let counts = read(&out_dir, "counts.csv");
    let row = counts.lines().nth(1).unwrap();
    assert_eq!(row.split(',').nth(3).unwrap(), "1");
    let resolved = read(&out_dir, "resolved.cfg");
    assert!(resolved.contains("kind = count-eigs"));
    assert!(resolved.contains("seed = 3"));
}

#[test]
fn zero_step_training_trace_is_header_plus_one_row() {
    let dir = fresh_dir("train0");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "[experiment]\nkind = train\n\n[train]\nsteps = 0\n").unwrap();
    let out_dir = dir.join("out");
    assert!(run(&[
        "train",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap()
    ])
    .status
    .success());
    let trace = read(&out_dir, "trace.csv");
    let lines: Vec<&str> = trace.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "iteration,avg_reward,q_error,avg_policy");
    let cells: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(cells[0], "0");
    // the zero-step policy is uniform over the 7 actions
    let policy = read(&out_dir, "policy.csv");
    assert_eq!(policy.lines().count(), 1 + 12 * 7);
    for line in policy.lines().skip(1) {
        let p: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!((p - 1.0 / 7.0).abs() < 1e-15);
    }
}

#[test]
fn trace_columns_roundtrip_losslessly() {
    let dir = fresh_dir("roundtrip");
    let out_dir = dir.join("out");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "[experiment]\nkind = train\n\n[train]\nsteps = 40\n").unwrap();
    assert!(run(&[
        "train",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "6",
        "--out",
        out_dir.to_str().unwrap()
    ])
    .status
    .success());
    let trace = read(&out_dir, "trace.csv");
    let lines: Vec<&str> = trace.lines().collect();
    assert_eq!(lines.len(), 42);
    for (i, line) in lines.iter().enumerate().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 4);
        assert_eq!(cells[0].parse::<usize>().unwrap(), i - 1);
        // shortest-roundtrip float formatting: parse then re-print is identity
        for cell in &cells[1..] {
            let value: f64 = cell.parse().unwrap();
            assert_eq!(&value.to_string(), cell);
        }
    }
}

#[test]
fn seed_flag_overrides_the_config_seed() {
    let dir = fresh_dir("seedflag");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "[experiment]\nkind = train\nseed = 1\n\n[train]\nsteps = 60\n").unwrap();
    let a = dir.join("a");
    let b = dir.join("b");
    let c = dir.join("c");
    for (out, seed) in [(&a, None), (&b, Some("4")), (&c, Some("1"))] {
        let mut args =
            vec!["train", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
        if let Some(s) = seed {
            args.extend(["--seed", s]);
        }
        assert!(run(&args).status.success());
    }
    assert_ne!(read(&a, "trace.csv"), read(&b, "trace.csv"));
    assert_eq!(read(&a, "trace.csv"), read(&c, "trace.csv"));
    assert!(read(&b, "resolved.cfg").contains("seed = 4"));
}

#[test]
fn tampered_outputs_fail_manifest_verification() {
    let dir = fresh_dir("tamper");
    let out_dir = dir.join("out");
    assert!(run(&["project", "--out", out_dir.to_str().unwrap()]).status.success());
    manifest::load_and_verify(&out_dir).unwrap();
    let victim = out_dir.join("projection.csv");
    let mut bytes = std::fs::read(&victim).unwrap();
    bytes.push(b'x');
    std::fs::write(&victim, bytes).unwrap();
    let err = manifest::load_and_verify(&out_dir).unwrap_err();
    assert!(err.to_string().contains("checksum mismatch"), "got: {err}");
}

#[test]
fn pencil_files_feed_the_eigenvalue_count() {
    use ndarray::Array2;
    use sopkit::pencil::{format_pencil, MatrixPencil};
    use sopkit::C;

    let dir = fresh_dir("pencilfile");
    let eigs = [C::new(0.3, 0.0), C::new(1.8, 0.5), C::new(-2.2, 0.0)];
    let mut b = Array2::from_elem((3, 3), C::new(0.0, 0.0));
    let mut a = Array2::from_elem((3, 3), C::new(0.0, 0.0));
    for i in 0..3 {
        b[[i, i]] = eigs[i];
        a[[i, i]] = C::new(1.0, 0.0);
    }
    let pencil = MatrixPencil::new(b, a).unwrap();
    let pencil_path = dir.join("pencil.txt");
    std::fs::write(&pencil_path, format_pencil(&pencil)).unwrap();

    let cfg = dir.join("run.cfg");
    std::fs::write(
        &cfg,
        format!(
            "[experiment]\nkind = count-eigs\n\n[count-eigs]\npencil_file = {}\nradius = 1.0\n",
            pencil_path.display()
        ),
    )
    .unwrap();
    let out_dir = dir.join("out");
    let out = run(&[
        "count-eigs",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    // only 0.3 sits inside the unit circle
    let counts = read(&out_dir, "counts.csv");
    assert_eq!(counts.lines().nth(1).unwrap().split(',').nth(3).unwrap(), "1");

    // a missing pencil file is a config error
    std::fs::write(
        &cfg,
        "[experiment]\nkind = count-eigs\n\n[count-eigs]\npencil_file = /nonexistent/p.txt\n",
    )
    .unwrap();
    let out = run(&[
        "count-eigs",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn complexity_ratios_are_finite_and_positive() {
    let dir = fresh_dir("ratios");
    let out_dir = dir.join("out");
    assert!(run(&["complexity-table", "--seed", "2", "--out", out_dir.to_str().unwrap()])
        .status
        .success());
    for file in ["complexity.csv", "accuracy.csv"] {
        let table = read(&out_dir, file);
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 4, "{file} should have a header and three checkpoints");
        let mut iterations = Vec::new();
        for line in &lines[1..] {
            let cells: Vec<&str> = line.split(',').collect();
            iterations.push(cells[0].parse::<usize>().unwrap());
            let ratio: f64 = cells[1].parse().unwrap();
            assert!(ratio.is_finite() && ratio > 0.0, "{file}: bad ratio {ratio}");
        }
        assert_eq!(iterations, vec![0, 50, 100]);
    }
}
