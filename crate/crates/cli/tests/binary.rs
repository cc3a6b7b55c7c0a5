use std::process::{Command, Output};

fn frame_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frame-lab"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn exit_codes_follow_the_contract() {
    let cases: &[(&[&str], i32)] = &[
        (&["build", "--n", "7", "--k", "5"], 0),
        (&["verify", "--n-max", "6"], 0),
        (&["build", "--n", "6", "--k", "2"], 2),
        (
            &["spectrum", "--n", "6", "--k", "3", "--pattern", "xxxx--"],
            2,
        ),
        (
            &[
                "simulate",
                "--n",
                "6",
                "--k",
                "3",
                "--pattern",
                "x-x-x-",
                "--trials",
                "0",
            ],
            2,
        ),
        (
            &[
                "simulate",
                "--n",
                "6",
                "--k",
                "3",
                "--pattern",
                "x-x-x-",
                "--noise",
                "pink",
            ],
            2,
        ),
        (&["verify", "--n-max", "17"], 2),
        (&["search", "--n", "30", "--k", "5"], 3),
        (&["search", "--n", "6"], 2),
    ];
    for (args, code) in cases {
        let out = frame_lab(args);
        assert_eq!(
            out.status.code(),
            Some(*code),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        if *code != 0 {
            assert!(out.stdout.is_empty(), "{args:?}");
            assert!(!out.stderr.is_empty(), "{args:?}");
        }
    }
}

#[test]
fn out_file_matches_stdout() {
    let path = std::env::temp_dir().join(format!("frame-lab-binary-{}.csv", std::process::id()));
    let out = frame_lab(&[
        "search",
        "--n",
        "7",
        "--k",
        "5",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(std::fs::read(&path).unwrap(), out.stdout);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn envelope_shape() {
    let out = frame_lab(&["spectrum", "--n", "6", "--k", "3", "--pattern", "xx-x--"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["command"], "spectrum");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["inputs"]["pattern"], "xx-x--");
    assert_eq!(v["inputs"]["kind"], "real");
    let eig = v["results"]["eigenvalues"].as_array().unwrap();
    assert_eq!(eig.len(), 3);
}

#[test]
fn invalid_thread_setting_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_frame-lab"))
        .args(["build", "--n", "3", "--k", "3"])
        .env("FRAME_LAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
