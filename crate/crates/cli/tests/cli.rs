use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_latent-slice"));
    for (key, _) in std::env::vars() {
        if key.starts_with("LATENT_SLICE_") {
            cmd.env_remove(key);
        }
    }
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn csv_shape(path: &Path) -> (Vec<String>, usize) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    let rows: Vec<&str> = lines.collect();
    for row in &rows {
        assert_eq!(row.split(',').count(), header.len());
    }
    (header, rows.len())
}

#[test]
fn bimodal_writes_one_row_per_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "run",
        "--experiment",
        "bimodal",
        "--seed",
        "7",
        "--iters",
        "2000",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (header, rows) = csv_shape(&dir.path().join("bimodal.csv"));
    assert_eq!(header, ["iter", "y"]);
    assert_eq!(rows, 2000);
}

#[test]
fn gauss50_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "run",
        "--experiment",
        "gauss50",
        "--iters",
        "5000",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let (header, rows) = csv_shape(&dir.path().join("gauss50.csv"));
    assert_eq!(header.len(), 51);
    assert_eq!(rows, 5000);
}

#[test]
fn same_seed_gives_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = run(&[
            "run",
            "--experiment",
            "mdp",
            "--seed",
            "3",
            "--iters",
            "300",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    for file in ["mdp.csv", "mdp.summary.json"] {
        assert_eq!(
            fs::read(a.path().join(file)).unwrap(),
            fs::read(b.path().join(file)).unwrap()
        );
    }
}

#[test]
fn every_experiment_matches_its_schema() {
    let expected: [(&str, &str, usize); 11] = [
        ("bimodal", "y", 1),
        ("bivariate", "y1", 2),
        ("gauss50", "y1", 50),
        ("funnel", "v", 10),
        ("funnel-slice-baseline", "v", 10),
        ("mdp", "x_pred", 1),
        ("finite-mixture", "M", 1),
        ("gp", "f1", 100),
        ("gp-standard-ess", "f1", 100),
        ("state-space", "theta", 501),
        ("spike-slab", "beta1", 90),
    ];
    let dir = tempfile::tempdir().unwrap();
    for (name, first, width) in expected {
        let out = run(&[
            "run",
            "--experiment",
            name,
            "--iters",
            "60",
            "--burnin",
            "20",
            "--thin",
            "2",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let (header, rows) = csv_shape(&dir.path().join(format!("{name}.csv")));
        assert_eq!(header[0], "iter", "{name}");
        assert_eq!(header[1], first, "{name}");
        assert_eq!(header.len(), width + 1, "{name}");
        assert_eq!(rows, 20, "{name}");

        let summary: serde_json::Value = serde_json::from_str(
            &fs::read_to_string(dir.path().join(format!("{name}.summary.json"))).unwrap(),
        )
        .unwrap();
        assert_eq!(summary["schema_version"], 1);
        assert_eq!(summary["experiment"], name);
        assert_eq!(summary["n_kept"], 20);
        assert_eq!(summary["columns"].as_array().unwrap().len(), width);
        for key in [
            "seed",
            "chain",
            "n_iter",
            "burn_in",
            "thin",
            "summaries",
            "extra",
        ] {
            assert!(summary.get(key).is_some(), "{name} lacks {key}");
        }
    }
}

#[test]
fn list_is_complete_and_stable() {
    let a = run(&["list"]);
    let b = run(&["list"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let names: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with(' '))
        .map(|l| l.split_whitespace().next().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "bimodal",
            "bivariate",
            "gauss50",
            "funnel",
            "funnel-slice-baseline",
            "mdp",
            "finite-mixture",
            "gp",
            "gp-standard-ess",
            "state-space",
            "spike-slab"
        ]
    );
}

#[test]
fn db_check_exit_codes() {
    for k in ["1", "2", "3", "5"] {
        let out = run(&["db-check", "--k", k, "--states", "10", "--seed", "4"]);
        assert!(out.status.success());
        assert!(String::from_utf8_lossy(&out.stdout).contains("max residual"));
    }
    assert_eq!(run(&["db-check", "--k", "0"]).status.code(), Some(1));
}

#[test]
fn usage_and_runtime_exit_codes() {
    assert_eq!(run(&["run", "--experiment", "nope"]).status.code(), Some(1));
    assert_eq!(run(&["run"]).status.code(), Some(1));
    assert_eq!(
        run(&["run", "--experiment", "bimodal", "--iters", "x"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["run", "--experiment", "bimodal", "--thin", "0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = run(&[
        "run",
        "--experiment",
        "bimodal",
        "--iters",
        "10",
        "--out",
        blocker.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_environment_and_flags_layer() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("o");
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        format!(
            "experiment = \"bivariate\"\niters = 50\nseed = 9\nout = {:?}\n",
            out_dir.to_str().unwrap()
        ),
    )
    .unwrap();
    let out = run(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (_, rows) = csv_shape(&out_dir.join("bivariate.csv"));
    assert_eq!(rows, 50);
    let from_file = fs::read(out_dir.join("bivariate.csv")).unwrap();

    // The environment overrides the file and a flag overrides both.
    let out = bin()
        .args(["run", "--config", cfg.to_str().unwrap()])
        .env("LATENT_SLICE_ITERS", "30")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(csv_shape(&out_dir.join("bivariate.csv")).1, 30);
    let out = bin()
        .args(["run", "--config", cfg.to_str().unwrap(), "--iters", "40"])
        .env("LATENT_SLICE_ITERS", "30")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(csv_shape(&out_dir.join("bivariate.csv")).1, 40);

    let out = run(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--iters",
        "50",
        "--seed",
        "9",
    ]);
    assert!(out.status.success());
    assert_eq!(fs::read(out_dir.join("bivariate.csv")).unwrap(), from_file);

    fs::write(&cfg, "experiment = \"bivariate\"\nunknown = 1\n").unwrap();
    assert_eq!(
        run(&["run", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn chains_write_separate_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "run",
        "--experiment",
        "bivariate",
        "--iters",
        "200",
        "--chains",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let files: Vec<Vec<u8>> = (0..3)
        .map(|c| fs::read(dir.path().join(format!("bivariate.chain{c}.csv"))).unwrap())
        .collect();
    assert_ne!(files[0], files[1]);
    assert_ne!(files[1], files[2]);
    for c in 0..3 {
        assert!(dir
            .path()
            .join(format!("bivariate.chain{c}.summary.json"))
            .exists());
    }
}
