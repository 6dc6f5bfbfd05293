//! End-to-end runs of the `vfcp` binary.

use std::path::Path;
use std::process::{Command, Output};

fn vfcp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vfcp"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn vfcp")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = vfcp(dir, args);
    assert!(
        out.status.success(),
        "vfcp {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn value(report: &str, key: &str) -> String {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no `{key}` in:\n{report}"))
        .to_string()
}

#[test]
fn gen_compress_decompress_verify() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "gen",
            "--kind",
            "moving_vortex",
            "--dims",
            "64x64x16",
            "--seed",
            "1",
            "-o",
            "f",
        ],
    );
    for ext in ["f.u.f32", "f.v.f32", "f.json"] {
        assert!(d.join(ext).exists(), "{ext} missing");
    }
    let c = ok(
        d,
        &[
            "compress",
            "f",
            "-o",
            "f.vfcp",
            "--eps-rel",
            "0.01",
            "--predictor",
            "mop",
        ],
    );
    assert!(value(&c, "cr").parse::<f64>().unwrap() > 1.0);
    assert!(value(&c, "psnr").parse::<f64>().unwrap() > 20.0);
    ok(d, &["decompress", "f.vfcp", "-o", "g"]);
    let r = ok(d, &["verify", "f", "g", "--archive", "f.vfcp", "--check"]);
    assert_eq!(value(&r, "fc_t"), "0");
    assert_eq!(value(&r, "fc_s"), "0");
    assert_eq!(value(&r, "isomorphic"), "true");
    assert_eq!(value(&r, "cr"), value(&c, "cr"));
}

#[test]
fn predictor_comparison_on_translation() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "gen",
            "--kind",
            "translation",
            "--dims",
            "48x48x12",
            "--seed",
            "2",
            "-o",
            "f",
        ],
    );
    let cr = |p: &str| -> f64 {
        let out = ok(
            d,
            &[
                "compress",
                "f",
                "-o",
                &format!("{p}.vfcp"),
                "--eps-rel",
                "0.01",
                "--predictor",
                p,
                "--no-check",
            ],
        );
        value(&out, "cr").parse().unwrap()
    };
    let (l, s, m) = (cr("lorenzo"), cr("sl"), cr("mop"));
    assert!(s > l, "sl {s} lorenzo {l}");
    assert!(m >= 0.97 * l.max(s), "mop {m} lorenzo {l} sl {s}");
}

#[test]
fn truncated_archive_reports_stream_length() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "gen",
            "--kind",
            "vortex_pair",
            "--dims",
            "24x24x6",
            "-o",
            "f",
        ],
    );
    ok(
        d,
        &[
            "compress",
            "f",
            "-o",
            "f.vfcp",
            "--eps-abs",
            "0.01",
            "--no-check",
        ],
    );
    let bytes = std::fs::read(d.join("f.vfcp")).unwrap();
    std::fs::write(d.join("cut.vfcp"), &bytes[..bytes.len() - 10]).unwrap();
    let out = vfcp(d, &["decompress", "cut.vfcp", "-o", "g"]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    let line = err.lines().last().unwrap();
    assert!(
        line.starts_with("error\tcode=stream_length\tmessage="),
        "{line}"
    );
}

#[test]
fn errors_are_one_machine_readable_line() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = vfcp(d, &["compress", "missing", "-o", "x", "--eps-abs", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error\tcode=io\t"));

    ok(
        d,
        &["gen", "--kind", "translation", "--dims", "8x8x3", "-o", "f"],
    );
    let out = vfcp(d, &["compress", "f", "-o", "x", "--eps-abs", "-1"]);
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .starts_with("error\tcode=invalid_param\t"));
    let out = vfcp(
        d,
        &[
            "gen",
            "--kind",
            "moving_vortex",
            "--dims",
            "8x8x3",
            "--param",
            "core_radius=-2",
            "-o",
            "x",
        ],
    );
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .starts_with("error\tcode=invalid_param\t"));

    let out = vfcp(d, &["compress", "f", "-o", "x"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error\tcode=usage\t"), "{err}");
    assert!(vfcp(d, &["--help"]).status.success());
}

#[test]
fn verify_check_fails_on_changed_topology() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "gen",
            "--kind",
            "moving_vortex",
            "--dims",
            "16x16x4",
            "--seed",
            "1",
            "-o",
            "a",
        ],
    );
    ok(
        d,
        &[
            "gen",
            "--kind",
            "moving_vortex",
            "--dims",
            "16x16x4",
            "--seed",
            "1",
            "--param",
            "center=10,6",
            "-o",
            "b",
        ],
    );
    let out = vfcp(d, &["verify", "a", "b", "--check"]);
    assert_eq!(out.status.code(), Some(3));
    let report = String::from_utf8(out.stdout).unwrap();
    assert_eq!(value(&report, "isomorphic"), "false");
}

#[test]
fn track_and_stats_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "gen",
            "--kind",
            "vortex_pair",
            "--dims",
            "32x32x8",
            "--seed",
            "3",
            "-o",
            "f",
        ],
    );
    // two co-rotating vortices and the saddle between them
    let t = ok(d, &["track", "f", "-o", "traj.csv"]);
    assert_eq!(value(&t, "trajectories"), "3");
    let csv = std::fs::read_to_string(d.join("traj.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "component,point,x,y,t,loop");
    let comps: std::collections::BTreeSet<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(comps.len(), 3);

    let stdout = ok(d, &["track", "f"]);
    assert_eq!(stdout, csv);

    ok(
        d,
        &[
            "compress",
            "f",
            "-o",
            "f.vfcp",
            "--eps-rel",
            "0.01",
            "--no-check",
        ],
    );
    let s = ok(d, &["stats", "f.vfcp", "-o", "st"]);
    assert_eq!(value(&s, "overflow"), "0");
    for name in ["pmf.csv", "tail_ccdf.csv", "run_ccdf.csv"] {
        assert!(d.join("st").join(name).exists(), "{name}");
    }
    let pmf = std::fs::read_to_string(d.join("st/pmf.csv")).unwrap();
    let total: f64 = pmf
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with("overflow"))
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn config_file_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "gen",
            "--kind",
            "random_fourier",
            "--dims",
            "16x16x4",
            "--seed",
            "4",
            "-o",
            "f",
        ],
    );
    std::fs::write(
        d.join("c.json"),
        r#"{"backend": "identity", "predictor": "lorenzo"}"#,
    )
    .unwrap();
    let a = ok(
        d,
        &[
            "compress",
            "f",
            "-o",
            "a.vfcp",
            "--eps-rel",
            "0.05",
            "--config",
            "c.json",
            "--no-check",
        ],
    );
    let b = ok(
        d,
        &[
            "compress",
            "f",
            "-o",
            "b.vfcp",
            "--eps-rel",
            "0.05",
            "--predictor",
            "lorenzo",
            "--no-check",
        ],
    );
    let size = |r: &str| value(r, "bytes").parse::<usize>().unwrap();
    assert!(size(&a) > size(&b), "identity backend should be larger");
    assert_eq!(value(&a, "sl_blocks"), "0");
}
