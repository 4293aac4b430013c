use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn egfrec(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_egfrec"))
        .args(args)
        .env("EGFREC_CACHE_DIR", cache)
        .env("EGFREC_NO_NETWORK", "1")
        .env_remove("EGFREC_MIRROR_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn exit_codes() {
    let cache = tempfile::tempdir().unwrap();
    let registry = cache.path().join("bad.toml");
    fs::write(&registry, "[[sequence]]\nid = 'A000045'\n").unwrap();
    let registry = registry.to_str().unwrap();
    let table: &[(&[&str], i32)] = &[
        (&["derive", "--seq", "A025166"], 0),
        (&["derive", "--g", "1", "--h", "x"], 0),
        (&["derive", "--g", "1/(1-2*x", "--h", "x"], 2),
        (&["derive", "--g", "1"], 2),
        (&["derive", "--seq", "A999999"], 2),
        (&["derive", "--seq", "A025163"], 2),
        (&["derive", "--g", "1/x", "--h", "0"], 2),
        (
            &["--offline", "check", "--seq", "A025166", "--terms", "300"],
            0,
        ),
        (
            &["--offline", "check", "--seq", "A025163", "--terms", "1000"],
            0,
        ),
        (
            &["--offline", "check", "--seq", "A025166", "--terms", "1"],
            2,
        ),
        (
            &[
                "--offline",
                "check",
                "--seq",
                "A025166",
                "--terms",
                "50",
                "--sources",
                "tea",
            ],
            2,
        ),
        (&["check", "--seq", "A025166", "--terms", "50"], 3),
        (
            &[
                "check",
                "--seq",
                "A025166",
                "--terms",
                "50",
                "--sources",
                "oracle,series",
            ],
            0,
        ),
        (&["series", "--g", "1", "--h", "x", "--n", "3"], 0),
        (&["series", "--g", "1/(1-x/2)", "--h", "0", "--n", "3"], 1),
        (&["series", "--seq", "A025166", "--n", "0"], 2),
        (&["--offline", "run", "--seq", "A025163", "--n", "20"], 0),
        (&["run", "--seq", "A025163", "--n", "20"], 3),
        (&["fetch", "--seq", "X1"], 2),
        (&["fetch", "--seq", "A025166"], 3),
        (&["--offline", "fetch", "--seq", "A000001"], 3),
        (&["--offline", "fetch", "--seq", "A025166"], 0),
        (&["--registry", registry, "derive", "--seq", "A025166"], 2),
        (&["bogus"], 2),
    ];
    for (args, code) in table {
        let out = egfrec(args, cache.path());
        assert_eq!(
            out.status.code(),
            Some(*code),
            "{args:?}\n{}{}",
            stdout(&out),
            stderr(&out)
        );
    }
}

#[test]
fn derive_registered() {
    let cache = tempfile::tempdir().unwrap();
    let out = stdout(&egfrec(&["derive", "--seq", "A025166"], cache.path()));
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines.contains(&"ODE:        (1 - 4*x + 4*x^2) * F'(x) = (1 - 4*x) * F(x)"));
    assert!(lines.contains(
        &"recurrence: a(n) + (-4*n + 3)*a(n-1) + (4*n^2 - 8*n + 4)*a(n-2) = 0 for n >= 2"
    ));
    assert!(
        lines.contains(&"factored:   a(n) + (-4*n + 3)*a(n-1) + 4*(n-1)^2*a(n-2) = 0 for n >= 2")
    );
    assert!(lines.contains(&"registered: MATCH"));
}

#[test]
fn derive_exponential() {
    let cache = tempfile::tempdir().unwrap();
    let out = stdout(&egfrec(&["derive", "--g", "1", "--h", "x"], cache.path()));
    assert!(out.contains("ODE:        F'(x) = F(x)\n"));
    assert!(out.contains("recurrence: a(n) - a(n-1) = 0 for n >= 1\n"));
}

#[test]
fn parse_error_reports_offset() {
    let cache = tempfile::tempdir().unwrap();
    let out = egfrec(&["derive", "--g", "1/(1-2*x", "--h", "x"], cache.path());
    assert!(stderr(&out).contains("offset 8"), "{}", stderr(&out));
}

#[test]
fn series_matches_fixture_prefix() {
    let cache = tempfile::tempdir().unwrap();
    let out = stdout(&egfrec(
        &["series", "--seq", "A025166", "--n", "11"],
        cache.path(),
    ));
    assert_eq!(
        out,
        "0 -1\n1 -1\n2 -1\n3 7\n4 127\n5 1711\n6 23231\n7 334391\n8 5144063\n9 84149983\n10 1446872959\n"
    );
    let out = stdout(&egfrec(
        &["series", "--g", "1", "--h", "x", "--n", "3"],
        cache.path(),
    ));
    assert_eq!(out, "0 1\n1 1\n2 1\n");
}

#[test]
fn non_integer_series_diagnostic() {
    let cache = tempfile::tempdir().unwrap();
    let out = egfrec(
        &["series", "--g", "1/(1-x/2)", "--h", "0", "--n", "3"],
        cache.path(),
    );
    assert_eq!(stdout(&out), "0 1\n");
    assert!(stderr(&out).contains("n = 1: n! * [x^n] F(x) = 1/2 is not an integer"));
}

#[test]
fn check_json_is_deterministic() {
    let cache = tempfile::tempdir().unwrap();
    let run = || {
        let out = egfrec(
            &[
                "--offline",
                "check",
                "--seq",
                "A025166",
                "--terms",
                "400",
                "--json",
            ],
            cache.path(),
        );
        assert_eq!(out.status.code(), Some(0));
        let mut v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        for step in v["steps"].as_array_mut().unwrap() {
            step["elapsed_us"] = 0.into();
        }
        v
    };
    let a = run();
    assert_eq!(a["overall"], "PASS");
    assert_eq!(a["steps"].as_array().unwrap().len(), 5);
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&run()).unwrap()
    );
}

#[test]
fn fetch_caches_mirror_download() {
    let cache = tempfile::tempdir().unwrap();
    let mirror = tempfile::tempdir().unwrap();
    fs::write(mirror.path().join("b025166.txt"), "0 -1\n1 -1\n2 -1\n3 7\n").unwrap();
    let fetch = |extra: &[&str]| {
        let mut args = vec![
            "--mirror-dir",
            mirror.path().to_str().unwrap(),
            "fetch",
            "--seq",
            "A025166",
        ];
        args.extend_from_slice(extra);
        let out = Command::new(env!("CARGO_BIN_EXE_egfrec"))
            .args(&args)
            .env("EGFREC_CACHE_DIR", cache.path())
            .env_remove("EGFREC_NO_NETWORK")
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        stdout(&out)
    };
    assert_eq!(
        fetch(&[]),
        "A025166: 4 terms, offset 0, n = 0..=3 (source: network)\n"
    );
    assert_eq!(
        fetch(&[]),
        "A025166: 4 terms, offset 0, n = 0..=3 (source: cache)\n"
    );
    assert!(fetch(&["--refresh"]).ends_with("(source: network)\n"));
    assert!(cache.path().join("b025166.txt").exists());
}

#[test]
fn run_prints_bfile_lines() {
    let cache = tempfile::tempdir().unwrap();
    let out = stdout(&egfrec(
        &["--offline", "run", "--seq", "A025163", "--n", "7"],
        cache.path(),
    ));
    assert_eq!(out, "0 0\n1 1\n2 6\n3 18\n4 20\n5 -90\n6 -588\n7 -1708\n");
}

#[test]
fn registry_extension_file() {
    let cache = tempfile::tempdir().unwrap();
    let path = cache.path().join("extra.toml");
    fs::write(
        &path,
        "[[sequence]]\nid = \"A000522\"\ng = \"1/(1-x)\"\nh = \"x\"\nrecurrence = [\"1\", \"-n-1\", \"n-1\"]\nvalid_from = 2\nseeds = [\"1\", \"2\"]\n",
    )
    .unwrap();
    let out = egfrec(
        &[
            "--registry",
            path.to_str().unwrap(),
            "derive",
            "--seq",
            "A000522",
        ],
        cache.path(),
    );
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}{}", stderr(&out));
    assert!(text.contains("registered: MATCH"), "{text}");
    let out = egfrec(
        &[
            "--registry",
            path.to_str().unwrap(),
            "run",
            "--seq",
            "A000522",
            "--n",
            "5",
        ],
        cache.path(),
    );
    assert_eq!(stdout(&out), "0 1\n1 2\n2 5\n3 16\n4 65\n5 326\n");
}
