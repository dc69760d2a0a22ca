//! The command-line binary, run as a subprocess.

use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_onebit-ci"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn complexity_table_writes_csv_with_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.csv");
    let o = run(&["complexity-table", "--out", out.to_str().unwrap(), "--seed", "17"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert!(!text.contains('\r'));
    let comments: Vec<&str> = text.lines().filter(|l| l.starts_with('#')).collect();
    assert!(comments.iter().any(|l| l.starts_with("# config_hash: ")));
    assert!(comments.contains(&"# seed: 17"));
    assert!(comments.iter().any(|l| l.starts_with("# onebit-ci ")));
    assert!(comments.iter().any(|l| l.contains("18*Nt^2")));
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 5);
    assert!(data[0].starts_with("nt,k,n_max,exhaustive,ci_mapping,symbol_scaling"));
    // one summary line per row on stdout
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 4);
}

#[test]
fn missing_config_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eta.csv");
    let missing = dir.path().join("absent.toml");
    let o = run(&[
        "eta-table",
        "--config",
        missing.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("cannot read config file"));
    assert!(fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn malformed_config_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[ber\nnt = ").unwrap();
    let o = run(&["ber-sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("malformed config file"));

    fs::write(&cfg, "[ber]\nantennas = 4\n").unwrap();
    let o = run(&["ber-sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(6));
    assert!(stderr(&o).contains("invalid configuration"));
}

#[test]
fn unknown_command_and_bad_override() {
    let o = run(&["make-coffee"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["eta-table", "--set", "eta.k"]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stderr(&o).contains("--set"));
}

#[test]
fn experiment_and_output_failures() {
    let o = run(&["oracle-compare", "--set", "oracle.nt_list=[9]"]);
    assert_eq!(o.status.code(), Some(7));
    assert!(stderr(&o).contains("experiment failed"));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("no/such/dir/x.csv");
    let o = run(&["complexity-table", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(8));
    assert!(stderr(&o).contains("cannot write output"));
}

#[test]
fn ber_sweep_is_reproducible_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "seed = 3\n[ber]\nnt = 6\nk = 2\nsnr_db = [10, 0]\nframes = 30\nschemes = [\"quantized_zf\", \"symbol_scaling\"]\n",
    )
    .unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "2"] {
        let out = dir.path().join(format!("ber{workers}.csv"));
        let o = run(&[
            "ber-sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push(fs::read_to_string(out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let rows: Vec<&str> = outputs[0].lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "scheme,snr_db,bits,bit_errors,ber,frames,failures");
    assert!(rows[1].starts_with("quantized_zf,0,120,"));
    assert!(rows[2].starts_with("quantized_zf,10,120,"));
    assert!(rows[3].starts_with("symbol_scaling,0,"));
    assert!(outputs[0].contains("# seed: 3\n"));
}

#[test]
fn stdout_mode_prints_csv() {
    let o = run(&[
        "proposition-check",
        "--set",
        "proposition.trials=20",
        "--set",
        "proposition.massive_trials=5",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("check,nt,k,trials,passes,value,passed\n"));
    assert!(text.contains("sign_equivalence,8,2,20,20,1,true"));
    assert_eq!(stderr(&o).lines().count(), 3);
}
