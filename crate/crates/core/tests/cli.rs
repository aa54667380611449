use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dpo_sim::harness::parse_config;
use dpo_sim::harness::provenance::{data_rows, ProvenanceHeader};

fn dpo_sim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpo-sim"))
        .args(args)
        .current_dir(dir)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn modes_reports_the_splitting() {
    let dir = tempfile::tempdir().unwrap();
    let out = dpo_sim(&["modes", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let line = stdout.lines().find(|l| l.starts_with("splitting_hz = ")).unwrap();
    let hz: f64 = line["splitting_hz = ".len()..].parse().unwrap();
    assert!((hz / 2960.0 - 1.0).abs() < 0.01, "{hz}");
    let csv = fs::read_to_string(dir.path().join("o/modes.csv")).unwrap();
    assert_eq!(
        data_rows(&csv)[0],
        "omega_s_hz,omega_r_hz,delta_hz,z0_m,xi_hz,splitting_hz"
    );
}

#[test]
fn crossing_csv_has_the_minimum_at_resonance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dpo_sim(&["crossing", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("o/spectrum.csv")).unwrap();
    let rows = data_rows(&csv);
    assert_eq!(rows[0], "delta_hz,branch0_hz,branch1_hz");
    let (delta, gap) = rows[1..]
        .iter()
        .map(|r| {
            let v: Vec<f64> = r.split(',').map(|x| x.parse().unwrap()).collect();
            (v[0], v[2] - v[1])
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert_eq!(delta, 0.0);
    assert!((gap / 2960.0 - 1.0).abs() < 0.01);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cases: Vec<(Vec<String>, i32)> = vec![
        (vec!["modes".into()], 0),
        (
            vec![
                "modes".into(),
                "--config".into(),
                write(d, "unknown.toml", "[trap]\nfreq_q = \"1 MHz\"\n"),
            ],
            2,
        ),
        (
            vec!["modes".into(), "--config".into(), write(d, "syntax.toml", "[trap\n")],
            2,
        ),
        (
            vec![
                "modes".into(),
                "--config".into(),
                write(d, "unit.toml", "[trap]\nfreq_x = \"1 ms\"\n"),
            ],
            2,
        ),
        (
            vec![
                "parity".into(),
                "--config".into(),
                write(
                    d,
                    "shots.toml",
                    "[state]\ndescriptor = \"fock:1\"\n[measurement]\nshots = -3\n",
                ),
            ],
            2,
        ),
        (vec!["modes".into(), "--config".into(), "missing.toml".into()], 2),
        (vec!["parity".into()], 2),
        (vec!["modes".into(), "--shots".into(), "0".into()], 2),
        (
            vec![
                "modes".into(),
                "--config".into(),
                write(d, "other.toml", "experiment = \"wigner\"\n"),
            ],
            2,
        ),
        (
            vec![
                "parity".into(),
                "--state".into(),
                "coherent:5".into(),
                "--dims".into(),
                "20x10".into(),
            ],
            3,
        ),
        (
            vec![
                "parity".into(),
                "--state".into(),
                "fock:30".into(),
                "--dims".into(),
                "20x10".into(),
            ],
            3,
        ),
    ];
    for (args, code) in cases {
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = dpo_sim(&argv, d);
        assert_eq!(
            out.status.code(),
            Some(code),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn config_error_kinds_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for (text, kind) in [
        ("[trap]\nfreq_q = \"1 MHz\"\n", "unknown_key"),
        ("[trap\n", "parse"),
        ("[trap]\nfreq_x = \"1 ms\"\n", "unit"),
        ("[measurement]\nshots = -3\n", "validation"),
    ] {
        let path = write(d, "c.toml", text);
        let out = dpo_sim(&["modes", "--config", &path], d);
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains(&format!("config error ({kind})")), "{err}");
    }
}

#[test]
fn reruns_are_byte_identical_and_hashed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = "experiment = \"wigner\"\n[simulation]\nradial_dim = 12\naxial_dim = 8\n[state]\ndescriptor = \"cat:1.0:pi:plus\"\n\
               [measurement]\nshots = 200\nseed = 11\n[wigner]\nextent = 1.5\npoints = 7\n";
    let path = write(d, "w.toml", cfg);
    let run = || {
        assert_eq!(
            dpo_sim(&["wigner", "--config", &path, "--out", "a"], d).status.code(),
            Some(0)
        );
        fs::read(d.join("a/wigner.csv")).unwrap()
    };
    let a = run();
    assert_eq!(a, run());

    let text = String::from_utf8(a).unwrap();
    let mut expected = parse_config(cfg, None).unwrap();
    expected.output = "a".into();
    assert_eq!(ProvenanceHeader::hash_of(&text), Some(expected.hash().as_str()));
    assert_eq!(
        data_rows(&text)[0],
        "re_alpha,im_alpha,p1_exact,p1_sampled,parity,wigner,stderr,flags"
    );
    assert_eq!(data_rows(&text).len(), 1 + 49);

    dpo_sim(&["wigner", "--config", &path, "--out", "c", "--seed", "12"], d);
    let c = fs::read_to_string(d.join("c/wigner.csv")).unwrap();
    assert_ne!(ProvenanceHeader::hash_of(&c), ProvenanceHeader::hash_of(&text));
    assert_ne!(data_rows(&c), data_rows(&text));
}

#[test]
fn oscillation_and_parity_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = dpo_sim(&["oscillate", "--out", "o", "--exact"], d);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(d.join("o/oscillation.csv")).unwrap();
    assert_eq!(
        data_rows(&csv)[0],
        "t_ms,p_radial,p_axial,p_radial_sampled,p_axial_sampled"
    );
    assert_eq!(data_rows(&csv).len(), 42);
    assert!(csv.lines().any(|l| l.starts_with("# fit: 296")));

    let out = dpo_sim(
        &["parity", "--out", "p", "--state", "fock:3", "--dims", "12x8", "--exact"],
        d,
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(d.join("p/parity.csv")).unwrap();
    let row: Vec<&str> = data_rows(&csv)[1].split(',').collect();
    let parity: f64 = row[5].parse().unwrap();
    assert!((parity + 1.0).abs() < 1e-6);
    let axial = fs::read_to_string(d.join("p/axial.csv")).unwrap();
    let p1: f64 = data_rows(&axial)[2].split(',').nth(1).unwrap().parse().unwrap();
    assert!(p1 > 0.99);
}

#[test]
fn convergence_report_for_the_gap() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let path = write(
        d,
        "c.toml",
        "[converge]\nobservable = \"gap\"\ndims = [\"6x4\", \"12x8\"]\n",
    );
    let out = dpo_sim(&["converge", "--config", &path, "--out", "o"], d);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(d.join("o/converge.csv")).unwrap();
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 5);
    assert!(rows[1..]
        .iter()
        .all(|r| r.ends_with(",true") && r.contains(",0.000000e0,")));
}
