use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn tiqflash(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tiqflash"))
        .args(args)
        .env_remove("TIQFLASH_PRESET_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Sizes the default 6-bit design into `dir/d.json`.
fn sized(dir: &TempDir) -> PathBuf {
    let d = dir.path().join("d.json");
    let o = tiqflash(&[
        "size",
        "-n",
        "6",
        "--vdd",
        "2.5",
        "--gain",
        "38.7",
        "-o",
        path_str(&d),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    d
}

#[test]
fn size_writes_63_designs() {
    let dir = TempDir::new().unwrap();
    let d = sized(&dir);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d).unwrap()).unwrap();
    assert_eq!(doc["designs"].as_array().unwrap().len(), 63);
    assert_eq!(doc["n_bits"], 6);
}

#[test]
fn size_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = std::fs::read(sized(&dir)).unwrap();
    let b = std::fs::read(sized(&dir)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn one_bit_is_rejected() {
    let o = tiqflash(&["size", "-n", "1", "--vdd", "2.5", "--gain", "38.7"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("error: resolution must be >= 2"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn missing_option_is_validation_error() {
    let o = tiqflash(&["size", "-n", "6", "--vdd", "2.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: "), "{}", stderr(&o));
}

#[test]
fn unknown_flag_exits_one() {
    let o = tiqflash(&["size", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error:"), "{}", stderr(&o));
}

#[test]
fn encode_stats_for_three_bits() {
    let o = tiqflash(&["encode", "-n", "3", "--stats"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("or depth  2\n"), "{s}");
    assert!(s.contains("or trees  3\n"), "{s}");
    assert_eq!(s.matches("3 OR2, depth 2").count(), 3, "{s}");
}

#[test]
fn encode_writes_parseable_netlist() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("e.fnet");
    let o = tiqflash(&["encode", "-n", "4", "-o", path_str(&f)]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&f).unwrap();
    let net = tiqflash::netlist_io::netlist_from_text(&text).unwrap();
    assert_eq!(net, tiqflash::codes::build_fat_tree(4).unwrap());
}

#[test]
fn simulate_ramp_staircase() {
    let dir = TempDir::new().unwrap();
    let d = sized(&dir);
    let t = dir.path().join("t.csv");
    let o = tiqflash(&[
        "simulate",
        "-d",
        path_str(&d),
        "--ramp",
        "--rate",
        "1e5",
        "--duration",
        "0.1",
        "-o",
        path_str(&t),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&t).unwrap();
    let codes: Vec<u32> = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(codes.len(), 10_001);
    assert_eq!((codes[0], *codes.last().unwrap()), (0, 63));
    assert!(codes.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn simulate_sine_and_ramp_conflict() {
    let dir = TempDir::new().unwrap();
    let d = sized(&dir);
    let args = [
        "simulate",
        "-d",
        path_str(&d),
        "--ramp",
        "--sine",
        "1e4,0.03,1.265",
        "--rate",
        "1e6",
        "--duration",
        "1e-4",
    ];
    let o = tiqflash(&args);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error:"));
}

#[test]
fn simulate_needs_a_stimulus() {
    let dir = TempDir::new().unwrap();
    let d = sized(&dir);
    let o = tiqflash(&[
        "simulate",
        "-d",
        path_str(&d),
        "--rate",
        "1e6",
        "--duration",
        "1e-4",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn simulate_stimulus_outside_rails() {
    let dir = TempDir::new().unwrap();
    let d = sized(&dir);
    let o = tiqflash(&[
        "simulate",
        "-d",
        path_str(&d),
        "--sine",
        "1e4,2,1.25",
        "--rate",
        "1e6",
        "--duration",
        "1e-4",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("rails"), "{}", stderr(&o));
}

#[test]
fn missing_design_file() {
    let o = tiqflash(&["netlist", "-d", "/nonexistent/d.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: cannot read"));
}

#[test]
fn malformed_design_names_path() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().join("bad.json");
    std::fs::write(
        &d,
        r#"{"n_bits": 2, "vdd": 2.5, "ladder": {"v_low": 1, "v_high": 1.5, "v_lsb": 0.25}}"#,
    )
    .unwrap();
    let o = tiqflash(&["netlist", "-d", path_str(&d)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("designs"), "{}", stderr(&o));
}

#[test]
fn unwritable_output_exits_two() {
    let o = tiqflash(&["encode", "-n", "3", "-o", "/nonexistent/dir/e.fnet"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: cannot write"));
}

#[test]
fn netlist_with_boosters() {
    let dir = TempDir::new().unwrap();
    let d = sized(&dir);
    let c = dir.path().join("bank.cir");
    let run = || {
        let o = tiqflash(&[
            "netlist",
            "-d",
            path_str(&d),
            "--boosters",
            "--model-card",
            "generic",
            "-o",
            path_str(&c),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        std::fs::read_to_string(&c).unwrap()
    };
    let a = run();
    assert_eq!(a.lines().filter(|l| l.starts_with('M')).count(), 504);
    assert_eq!(a.matches(".MODEL").count(), 2);
    assert!(a.ends_with(".END\n"));
    assert_eq!(run(), a);
}

#[test]
fn netlist_rejects_bad_model_name() {
    let dir = TempDir::new().unwrap();
    let d = sized(&dir);
    let o = tiqflash(&["netlist", "-d", path_str(&d), "--model-n", "bad name"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn analyze_json_and_csv() {
    let dir = TempDir::new().unwrap();
    let d = sized(&dir);
    let r = dir.path().join("r.json");
    let o = tiqflash(&[
        "analyze",
        "-d",
        path_str(&d),
        "--dnl",
        "--drift",
        "-20,25,120",
        "-o",
        path_str(&r),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&r).unwrap()).unwrap();
    assert_eq!(v["linearity"]["dnl"].as_array().unwrap().len(), 62);
    assert_eq!(v["drift"]["entries"].as_array().unwrap().len(), 3);
    assert!(v["linearity"]["max_abs_dnl"].as_f64().unwrap() <= 0.5);

    let c = dir.path().join("dnl.csv");
    let o = tiqflash(&["analyze", "-d", path_str(&d), "--dnl", "-o", path_str(&c)]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&c).unwrap();
    assert!(text.starts_with("index,transition_V,dnl_lsb,inl_lsb\n"));
    assert_eq!(text.lines().count(), 64);

    let o = tiqflash(&[
        "analyze",
        "-d",
        path_str(&d),
        "--dnl",
        "--drift",
        "25",
        "-o",
        path_str(&c),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn plots_from_each_source() {
    let dir = TempDir::new().unwrap();
    let d = sized(&dir);
    let t = dir.path().join("t.csv");
    let r = dir.path().join("r.json");
    let c = dir.path().join("drift.csv");
    let ok = |args: &[&str]| {
        let o = tiqflash(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
    };
    ok(&[
        "simulate",
        "-d",
        path_str(&d),
        "--sine",
        "1e4,0.034,1.265",
        "--rate",
        "2e6",
        "--duration",
        "1e-4",
        "-o",
        path_str(&t),
    ]);
    ok(&[
        "analyze",
        "-d",
        path_str(&d),
        "--dnl",
        "--drift",
        "-40,0,25,85",
        "-o",
        path_str(&r),
    ]);
    ok(&[
        "analyze",
        "-d",
        path_str(&d),
        "--drift",
        "-40,0,25,85",
        "-o",
        path_str(&c),
    ]);
    for (input, kind) in [(&t, "staircase"), (&r, "dnl"), (&r, "drift"), (&c, "drift")] {
        let out = dir.path().join(format!("{kind}.svg"));
        ok(&[
            "plot",
            "-i",
            path_str(input),
            "--kind",
            kind,
            "-o",
            path_str(&out),
        ]);
        let svg = std::fs::read_to_string(&out).unwrap();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }
    let o = tiqflash(&["plot", "-i", path_str(&r), "--kind", "staircase"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_file_with_override() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out = dir.path().join("d.json");
    let body = format!(
        r#"{{"bits": 4, "vdd": 2.5, "gain": 38.7, "output": "{}"}}"#,
        path_str(&out)
    );
    std::fs::write(&cfg, body).unwrap();

    let o = tiqflash(&["size", "--config", path_str(&cfg)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["designs"].as_array().unwrap().len(), 15);

    let o = tiqflash(&["size", "--config", path_str(&cfg), "-n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["designs"].as_array().unwrap().len(), 7);
}

#[test]
fn preset_directory() {
    let dir = TempDir::new().unwrap();
    let mut p = tiqflash::devices::DeviceParams::generic_025u();
    p.vtn = 0.5;
    std::fs::write(dir.path().join("slow.json"), p.to_json()).unwrap();
    let run = |env: Option<&Path>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_tiqflash"));
        cmd.args([
            "size", "-n", "3", "--vdd", "2.5", "--gain", "20", "--preset", "slow",
        ]);
        cmd.env_remove("TIQFLASH_PRESET_DIR");
        if let Some(e) = env {
            cmd.env("TIQFLASH_PRESET_DIR", e);
        }
        cmd.output().unwrap()
    };
    assert_eq!(run(None).status.code(), Some(1));
    let o = run(Some(dir.path()));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("\"designs\""));
}

#[test]
fn help_lists_every_flag() {
    let expected: [(&str, &[&str]); 6] = [
        (
            "size",
            &[
                "--bits",
                "--vdd",
                "--gain",
                "--preset",
                "--grid",
                "--length",
                "--center",
                "--tie-break",
                "--output",
                "--config",
            ],
        ),
        ("encode", &["--bits", "--fused", "--stats", "--output"]),
        (
            "simulate",
            &[
                "--design",
                "--sine",
                "--ramp",
                "--rate",
                "--duration",
                "--analog",
                "--preset",
                "--output",
            ],
        ),
        (
            "analyze",
            &["--design", "--dnl", "--drift", "--preset", "--output"],
        ),
        (
            "netlist",
            &[
                "--design",
                "--boosters",
                "--model-card",
                "--encoder",
                "--gate-style",
                "--model-n",
                "--model-p",
                "--output",
            ],
        ),
        ("plot", &["--input", "--kind", "--output"]),
    ];
    for (cmd, flags) in expected {
        let o = tiqflash(&[cmd, "--help"]);
        assert_eq!(o.status.code(), Some(0));
        let text = stdout(&o);
        for f in flags {
            assert!(text.contains(f), "{cmd} --help lacks {f}");
        }
    }
}

#[test]
fn every_subcommand_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let d = sized(&dir);
    let d = path_str(&d).to_owned();
    let trace = dir.path().join("trace.csv");
    let steps: Vec<(&str, Vec<&str>)> = vec![
        ("e.fnet", vec!["encode", "-n", "5", "--fused"]),
        (
            "t.csv",
            vec![
                "simulate",
                "-d",
                &d,
                "--sine",
                "1e4,0.03,1.265",
                "--rate",
                "1e6",
                "--duration",
                "2e-4",
            ],
        ),
        (
            "r.json",
            vec!["analyze", "-d", &d, "--dnl", "--drift", "0,50,100"],
        ),
        (
            "b.cir",
            vec!["netlist", "-d", &d, "--encoder", "--gate-style", "nand"],
        ),
    ];
    for (name, args) in &steps {
        let outs: Vec<Vec<u8>> = (0..2)
            .map(|k| {
                let out = dir.path().join(format!("{k}-{name}"));
                let mut full = args.clone();
                full.extend(["-o", path_str(&out)]);
                let o = tiqflash(&full);
                assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
                std::fs::read(out).unwrap()
            })
            .collect();
        assert_eq!(outs[0], outs[1], "{args:?}");
    }
    std::fs::copy(dir.path().join("0-t.csv"), &trace).unwrap();
    let svgs: Vec<String> = (0..2)
        .map(|_| {
            let o = tiqflash(&["plot", "-i", path_str(&trace), "--kind", "staircase"]);
            stdout(&o)
        })
        .collect();
    assert_eq!(svgs[0], svgs[1]);
}
