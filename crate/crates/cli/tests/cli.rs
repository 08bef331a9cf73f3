use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn molcav(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_molcav"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn body(csv: &str) -> String {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}

#[test]
fn lists_all_presets() {
    let o = molcav(&["preset", "--list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for name in [
        "fig2-stability",
        "fig3-detuning",
        "fig4-distribution",
        "fig5-contours",
        "fig6-contrast",
        "fig6-threshold",
    ] {
        assert!(text.contains(name), "{name}");
    }
}

#[test]
fn sweep_output_is_independent_of_jobs() {
    let args = |jobs: &'static str| {
        vec![
            "sweep",
            "--axis",
            "Delta_c2:0:2.5:26",
            "--spin",
            "paired",
            "--outputs",
            "contrast",
            "--jobs",
            jobs,
        ]
    };
    let one = molcav(&args("1"));
    let many = molcav(&args("6"));
    assert!(one.status.success() && many.status.success());
    assert_eq!(stdout(&one), stdout(&many));
    let b = body(&stdout(&one));
    assert_eq!(b.lines().count(), 1 + 2 * 26);
    assert!(b.lines().next().unwrap().contains("C_a2B1_undefined"));
}

#[test]
fn preset_parts_go_to_separate_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested").join("fig3.csv");
    let o = molcav(&["preset", "fig3-detuning", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for part in ["fig3-delta-c1.csv", "fig3-delta-c2.csv"] {
        let text = fs::read_to_string(dir.path().join("nested").join(part)).unwrap();
        assert!(text.starts_with("# molcav "));
        assert!(text.contains("# preset = fig3-detuning/"));
        assert_eq!(body(&text).lines().count(), 1 + 3 * 301);
    }
}

#[test]
fn params_file_is_applied() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p.toml");
    fs::write(
        &file,
        "[physical]\nN = 80\nM = 40\n\n[normalized-overrides]\nDelta_c2 = 0.68\n",
    )
    .unwrap();
    let o = molcav(&[
        "--params",
        file.to_str().unwrap(),
        "point",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("\"status\": \"ok\""));
    assert!(text.contains("\"delta_c2\": 0.68"));
}

#[test]
fn dump_matrices_writes_both_blocks() {
    let o = molcav(&["dump-matrices", "--direction", "ccw"]);
    assert!(o.status.success());
    let b = body(&stdout(&o));
    let lines: Vec<&str> = b.lines().collect();
    assert_eq!(lines[0], "matrix,row,x1,y1,x2,y2,q1,p1,q2,p2");
    assert_eq!(lines.len(), 17);
    assert!(lines[1].starts_with("A,x1,-3.00000000000e-1,"));
    assert!(lines[16].starts_with("D,p2,"));
}

#[test]
fn covariances_can_be_dumped() {
    let dir = tempfile::tempdir().unwrap();
    let o = molcav(&[
        "sweep",
        "--axis",
        "E:10:16:3",
        "--dump-covariance",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v = fs::read_to_string(dir.path().join("row-000002.csv")).unwrap();
    assert_eq!(v.lines().count(), 8);
    assert_eq!(v.lines().next().unwrap().split(',').count(), 8);
}

#[test]
fn exit_codes() {
    // Config: bad axis, unknown preset, missing or invalid parameter file.
    assert_eq!(
        molcav(&["sweep", "--axis", "E:0:1:1"]).status.code(),
        Some(1)
    );
    assert_eq!(molcav(&["preset", "fig9"]).status.code(), Some(1));
    assert_eq!(
        molcav(&["--params", "/nonexistent.toml", "point"])
            .status
            .code(),
        Some(1)
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[physical]\nM = 120\n").unwrap();
    assert_eq!(
        molcav(&["--params", bad.to_str().unwrap(), "point"])
            .status
            .code(),
        Some(1)
    );

    // Runtime: points with M ≥ N are recorded, then reported.
    let out = dir.path().join("n.csv");
    let o = molcav(&[
        "sweep",
        "--axis",
        "N:40:60:3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.matches("invalid-parameter").count(), 2);

    // I/O: the output path runs through a regular file.
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let target = blocker.join("x.csv");
    let o = molcav(&[
        "sweep",
        "--axis",
        "E:0:1:2",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains(&Path::new("file").display().to_string()));
}
