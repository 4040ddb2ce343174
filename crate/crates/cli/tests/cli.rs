use std::path::Path;
use std::process::{Command, Output};

fn singmin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_singmin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn catenary_table_hits_cosh_at_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.csv");
    let o = singmin(&[
        "profile",
        "catenary",
        "--alpha",
        "1",
        "--z0",
        "1",
        "--xmax",
        "3",
        "--out",
        path_str(&f),
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let text = std::fs::read_to_string(&f).unwrap();
    assert!(text.starts_with("x,f,fp\n"));
    let row = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect::<Vec<_>>())
        .find(|r| r[0] == 1.0)
        .expect("row at x = 1");
    assert!((row[1] - 1.543_080_6).abs() < 1e-7, "{row:?}");
}

#[test]
fn h0_for_unit_circles_two_apart() {
    let o = singmin(&["threshold", "h0", "--m", "2", "--alpha", "1"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let v: f64 = out.trim().strip_prefix("h0 = ").unwrap().parse().unwrap();
    assert!((v - 1.508_80).abs() < 1e-3, "{out}");
}

#[test]
fn height_estimate_passes() {
    let o = singmin(&["verify", "height", "--alpha", "1", "--z0", "1", "--r", "2"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).trim_end().ends_with("PASS"));
}

#[test]
fn exit_codes() {
    // Bad usage and out-of-range parameters.
    assert_eq!(code(&singmin(&["profile", "catenary", "--alpha", "1", "--bogus"])), 2);
    assert_eq!(code(&singmin(&["profile", "catenary"])), 2);
    assert_eq!(code(&singmin(&["verify", "area-upper", "--alpha", "0.5"])), 2);
    assert_eq!(code(&singmin(&["solve", "graph", "--alpha", "1", "--grid", "5"])), 2);
    assert_eq!(code(&singmin(&["solve", "graph", "--alpha", "1", "--grid", "0"])), 2);
    assert_eq!(
        code(&singmin(&[
            "verify", "height", "--alpha", "1", "--r", "2", "--tol", "0"
        ])),
        2
    );
    assert_eq!(
        code(&singmin(&[
            "verify",
            "flux",
            "--alpha",
            "2",
            "--mesh",
            "/nonexistent.obj"
        ])),
        2
    );
    // No graph with α = 2 spans the unit circle at height 1: Newton fails.
    assert_eq!(
        code(&singmin(&[
            "solve", "graph", "--alpha", "2", "--c", "1", "--grid", "33"
        ])),
        3
    );
    // Coarse mesh against an unreachable flux tolerance.
    assert_eq!(
        code(&singmin(&[
            "verify",
            "flux",
            "--alpha",
            "2",
            "--grid",
            "16",
            "--flux-tol",
            "1e-6"
        ])),
        4
    );
    assert_eq!(code(&singmin(&["--help"])), 0);
}

#[test]
fn every_subcommand_documents_its_flags() {
    let subs: &[&[&str]] = &[
        &["profile", "catenary"],
        &["profile", "meridian"],
        &["profile", "winglike"],
        &["solve", "graph"],
        &["mesh", "revolve"],
        &["mesh", "extrude"],
        &["verify", "area-upper"],
        &["verify", "area-lower"],
        &["verify", "graph-area"],
        &["verify", "height"],
        &["verify", "flux"],
        &["verify", "extrema"],
        &["threshold", "h0"],
        &["threshold", "d0"],
        &["batch"],
    ];
    for sub in subs {
        let mut args = sub.to_vec();
        args.push("--help");
        let o = singmin(&args);
        assert_eq!(code(&o), 0, "{sub:?}");
        let help = stdout(&o);
        for line in help.lines().map(str::trim).filter(|l| l.starts_with("--")) {
            let flag = line.split_whitespace().next().unwrap();
            if flag == "--help" || flag == "--verbose" {
                continue;
            }
            let described = line.split_once("  ").map(|(_, d)| d.trim().len() > 5).unwrap_or(false);
            assert!(described, "{sub:?}: {line}");
        }
        // Value flags show a default, are required, or are optional by design.
        let usage = help.lines().find(|l| l.starts_with("Usage:")).unwrap();
        for line in help
            .lines()
            .map(str::trim)
            .filter(|l| l.starts_with("--") && l.contains('<'))
        {
            let flag = line.split_whitespace().next().unwrap();
            let optional = ["--out", "--obj", "--mesh", "--r", "--smin", "--jobs"].contains(&flag);
            assert!(
                line.contains("[default") || usage.contains(&format!("{flag} <")) || optional,
                "{sub:?}: {line}"
            );
        }
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<Vec<String>> = vec![
        vec!["profile", "meridian", "--alpha", "2", "--xmax", "2"],
        vec!["solve", "graph", "--alpha", "-2", "--grid", "33"],
        vec![
            "threshold",
            "d0",
            "--alpha",
            "1",
            "--R",
            "1",
            "--c",
            "2",
            "--grid",
            "24",
            "--jobs",
            "3",
        ],
        vec!["verify", "height", "--alpha", "0.5", "--r", "1.5"],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();
    for (k, case) in cases.iter().enumerate() {
        let mut files = Vec::new();
        for run in 0..2 {
            let p = dir.path().join(format!("{k}-{run}.csv"));
            let mut args: Vec<&str> = case.iter().map(String::as_str).collect();
            args.extend(["--out", path_str(&p)]);
            let o = singmin(&args);
            assert_eq!(code(&o), 0, "{case:?}: {}", stdout(&o));
            files.push(std::fs::read(&p).unwrap());
        }
        assert!(!files[0].is_empty());
        assert_eq!(files[0], files[1], "{case:?}");
    }
}

#[test]
fn mesh_export_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("g.obj");
    let o = singmin(&[
        "solve",
        "graph",
        "--alpha",
        "0.5",
        "--grid",
        "33",
        "--obj",
        path_str(&obj),
        "--out",
        path_str(&dir.path().join("g.csv")),
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    for check in ["extrema", "graph-area"] {
        let o = singmin(&["verify", check, "--alpha", "0.5", "--mesh", path_str(&obj)]);
        assert_eq!(code(&o), 0, "{check}: {}", stdout(&o));
    }
}

fn summary_rows(p: &Path) -> Vec<Vec<String>> {
    let mut rdr = csv::Reader::from_path(p).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["line", "command", "exit_code", "result"]
    );
    rdr.records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn batch_of_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let (file, summary) = (dir.path().join("empty.txt"), dir.path().join("summary.csv"));
    std::fs::write(&file, "").unwrap();
    let o = singmin(&["batch", path_str(&file), "--out", path_str(&summary)]);
    assert_eq!(code(&o), 0);
    assert!(summary_rows(&summary).is_empty());
}

#[test]
fn batch_propagates_worst_code() {
    let dir = tempfile::tempdir().unwrap();
    let (file, summary) = (dir.path().join("s.txt"), dir.path().join("summary.csv"));
    std::fs::write(
        &file,
        "# one passing, one failing bound\nverify height --alpha 1 --r 2\n\nverify flux --alpha 2 --grid 16 --flux-tol 1e-6\n",
    )
    .unwrap();
    let o = singmin(&["batch", path_str(&file), "--out", path_str(&summary)]);
    assert_eq!(code(&o), 4, "{}", stdout(&o));
    let rows = summary_rows(&summary);
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0][0].as_str(), rows[0][2].as_str()), ("2", "0"));
    assert_eq!((rows[1][0].as_str(), rows[1][2].as_str()), ("4", "4"));
}

#[test]
fn batch_keeps_input_order_with_parallel_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let (file, summary) = (dir.path().join("sweep.txt"), dir.path().join("summary.csv"));
    let ms: Vec<String> = (1..=10).map(|k| format!("{}", 0.25 * k as f64)).collect();
    let text: String = ms
        .iter()
        .map(|m| format!("threshold h0 --alpha 0.5 --m {m}\n"))
        .collect();
    std::fs::write(&file, text).unwrap();
    let o = singmin(&["batch", path_str(&file), "--jobs", "4", "--out", path_str(&summary)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let rows = summary_rows(&summary);
    assert_eq!(rows.len(), 10);
    let mut prev = 0.0;
    for (k, r) in rows.iter().enumerate() {
        assert_eq!(r[0], (k + 1).to_string());
        assert!(r[1].ends_with(&format!("--m {}", ms[k])));
        // h0 grows linearly with m.
        let v: f64 = r[3].strip_prefix("h0 = ").unwrap().parse().unwrap();
        assert!(v > prev);
        prev = v;
    }
    // Appending keeps the header single.
    let o = singmin(&["batch", path_str(&file), "--out", path_str(&summary)]);
    assert_eq!(code(&o), 0);
    assert_eq!(summary_rows(&summary).len(), 20);
}

#[test]
fn batch_errors() {
    assert_eq!(code(&singmin(&["batch", "/nonexistent/scenarios.txt"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.txt");
    std::fs::write(
        &file,
        "profile catenary --alpha 1 --out 'unterminated\nthreshold h0 --m 2 --alpha 1\n",
    )
    .unwrap();
    let o = singmin(&["batch", path_str(&file)]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("h0 = "));
}
