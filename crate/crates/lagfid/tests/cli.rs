use std::path::Path;
use std::process::{Command, Output};

fn lagfid(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lagfid"));
    cmd.args(args).env_remove("LAGFID_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn data_lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

#[test]
fn trace_ortho_writes_self_describing_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let out = lagfid(
        &[
            "--command",
            "trace-ortho",
            "--k-min",
            "1",
            "--k-max",
            "6",
            "--out",
            path.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# lagfid "));
    assert!(text.contains("# command=trace-ortho"));
    assert!(text.contains("# k_max=6"));
    let data = data_lines(&path);
    assert_eq!(data[0], "k,alpha,trace,k_trace,predictor");
    assert_eq!(data.len(), 7);
    for (i, row) in data[1..].iter().enumerate() {
        let fields: Vec<f64> = row.split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields[0], (i + 1) as f64);
        let predictor = 2.0 / (std::f64::consts::PI * fields[1].sin());
        assert!((fields[4] - predictor).abs() < 1e-15);
        assert!((fields[3] - fields[0] * fields[2]).abs() < 1e-14);
    }
    assert!(stdout(&out).contains("6 rows written"));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = |p: &Path| {
        vec![
            "--command".to_string(),
            "fid-vs-subfid".into(),
            "--k-min".into(),
            "3".into(),
            "--k-max".into(),
            "12".into(),
            "--alpha-grid".into(),
            "pi/6:pi/2:3".into(),
            "--out".into(),
            p.to_str().unwrap().into(),
        ]
    };
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let run = |p: &Path, env: &[(&str, &str)]| {
        let owned = args(p);
        let refs: Vec<&str> = owned.iter().map(String::as_str).collect();
        assert_eq!(code(&lagfid(&refs, env)), 0);
    };
    run(&a, &[]);
    run(&b, &[("LAGFID_THREADS", "1")]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn acceptance_tagged_check_passes_at_k_50() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let out = lagfid(
        &[
            "--command",
            "subfid-ortho",
            "--k-min",
            "50",
            "--out",
            path.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("PASS k E at alpha = pi/2, k = 50"));
    assert_eq!(data_lines(&path).len(), 2);
}

#[test]
fn failing_check_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.csv");
    // three radial nodes cannot resolve the Gaussian, so the Egorov residual is large
    let out = lagfid(
        &[
            "--command",
            "egorov-check",
            "--k-min",
            "8",
            "--k-max",
            "8",
            "--alpha",
            "pi/3",
            "--c",
            "10",
            "--quad-radial",
            "3",
            "--out",
            path.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code(&out), 2, "{}", stdout(&out));
    assert!(stdout(&out).contains("FAIL"));
    assert!(path.exists());
}

#[test]
fn usage_errors_exit_with_one() {
    let cases: &[&[&str]] = &[
        &["--command", "no-such-command"],
        &["--command", "trace-ortho", "--k-max", "3000"],
        &["--command", "trace-ortho", "--alpha", "0.05"],
        &["--command", "trace-ortho", "--alpha", "2.0"],
        &["--command", "trace-ortho", "--alpha-grid", "0.2:pi/2"],
        &[
            "--command",
            "trace-ortho",
            "--alpha",
            "1",
            "--alpha-grid",
            "0.2:1:3",
        ],
        &["--command", "trace-ortho", "--k-min", "9", "--k-max", "3"],
        &["--command", "bound-chain", "--delta", "0.7"],
        &[
            "--command",
            "fid-alpha-sweep",
            "--k-min",
            "5",
            "--k-max",
            "5",
            "--alpha-grid",
            "0.3:1.2:4",
        ],
        &["--k-min", "3"],
    ];
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    for args in cases {
        let mut a: Vec<&str> = args.to_vec();
        a.extend(["--out", path.to_str().unwrap()]);
        let out = lagfid(&a, &[]);
        assert_eq!(
            code(&out),
            1,
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let out = lagfid(
        &[
            "--command",
            "trace-ortho",
            "--k-max",
            "2",
            "--out",
            path.to_str().unwrap(),
        ],
        &[("LAGFID_THREADS", "0")],
    );
    assert_eq!(code(&out), 1);
}

#[test]
fn unwritable_output_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let out = lagfid(
        &[
            "--command",
            "trace-ortho",
            "--k-max",
            "2",
            "--out",
            path.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write"));
}

#[test]
fn help_and_version_exit_with_zero() {
    for flag in ["--help", "--version"] {
        let out = lagfid(&[flag], &[]);
        assert_eq!(code(&out), 0);
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn fid_alpha_sweep_reports_fit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let out = lagfid(
        &[
            "--command",
            "fid-alpha-sweep",
            "--k-min",
            "20",
            "--k-max",
            "20",
            "--alpha-grid",
            "0.4:pi/2:5",
            "--out",
            path.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("note: k = 20: C = k F at pi/2"));
    let data = data_lines(&path);
    assert_eq!(
        data[0],
        "k,alpha,fidelity,k_fidelity,fit_c,predictor,residual"
    );
    let last: Vec<f64> = data[5].split(',').map(|f| f.parse().unwrap()).collect();
    assert_eq!(last[6], 0.0);
    assert_eq!(last[4], last[3]);
}
