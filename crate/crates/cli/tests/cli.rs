use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qfree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfree"))
        .args(args)
        .output()
        .expect("failed to run qfree")
}

fn data_rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("L,"))
        .map(str::to_owned)
        .collect()
}

#[test]
fn ed_heisenberg_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.csv");
    let o = qfree(&[
        "ed",
        "--model",
        "heisenberg",
        "--J",
        "1",
        "--sizes",
        "2:16:2",
        "--twist",
        "pbc",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 8);
    assert!(rows[0].starts_with("2,pbc,-1.5"));
}

#[test]
fn ed_single_ion_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = qfree(&[
        "ed",
        "--model",
        "single-ion",
        "--J",
        "1",
        "--D",
        "7.4",
        "--sizes",
        "2:8",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(data_rows(&out).len(), 7);
}

#[test]
fn odd_spin_half_size_is_a_validation_error() {
    let o = qfree(&["ed", "--model", "heisenberg", "--sizes", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("odd"));
}

#[test]
fn ed_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = qfree(&[
            "ed",
            "--model",
            "dimerized",
            "--delta",
            "0.048",
            "--sizes",
            "4:10:2",
            "--twist",
            "both",
            "--seed",
            "7",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn forward_row_count_and_constant_band() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.csv");
    let o = qfree(&[
        "forward",
        "--band",
        "massive-sine:J=1,m=0.1",
        "--statistics",
        "fermion",
        "--nu",
        "1",
        "--twist",
        "pbc",
        "--sizes",
        "1:64",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(data_rows(&out).len(), 64);

    let o = qfree(&[
        "forward",
        "--band",
        "constant:c=3",
        "--statistics",
        "boson",
        "--sizes",
        "1:5",
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for line in text.lines().filter(|l| l.contains(",pbc,")) {
        let mut f = line.split(',');
        let l: f64 = f.next().unwrap().parse().unwrap();
        let e: f64 = f.nth(1).unwrap().parse().unwrap();
        assert!((e / l - 1.5).abs() < 1e-15);
    }
}

#[test]
fn forward_then_reconstruct_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let energies = dir.path().join("e.csv");
    let band = dir.path().join("band.json");
    let samples = dir.path().join("band.csv");
    let o = qfree(&[
        "forward",
        "--band",
        "fourier:c0=1.2,a=0.3;-0.1;0.05;0.02",
        "--statistics",
        "fermion",
        "--nu",
        "2",
        "--sizes",
        "1:8",
        "--out",
        energies.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let o = qfree(&[
        "reconstruct",
        "--energies",
        energies.to_str().unwrap(),
        "--nu",
        "2",
        "--hypothesis",
        "fermion-pbc",
        "--out",
        band.to_str().unwrap(),
        "--samples",
        samples.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&band).unwrap()).unwrap();
    assert!((v["c0"].as_f64().unwrap() - 1.2).abs() < 1e-10);
    let expected = [0.3, -0.1, 0.05, 0.02, 0.0, 0.0, 0.0, 0.0];
    for (got, want) in v["coeffs"].as_array().unwrap().iter().zip(expected) {
        assert!((got.as_f64().unwrap() - want).abs() < 1e-10);
    }
    assert_eq!(v["admissible"], true);
    assert_eq!(fs::read_to_string(&samples).unwrap().lines().count(), 4097);
}

#[test]
fn reconstruct_auto_emits_four_bands() {
    let dir = tempfile::tempdir().unwrap();
    let energies = dir.path().join("e.csv");
    let o = qfree(&[
        "forward",
        "--band",
        "abs-sine:A=pi/2",
        "--statistics",
        "fermion",
        "--sizes",
        "2:20:2",
        "--out",
        energies.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let o = qfree(&["reconstruct", "--energies", energies.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let bands = v.as_array().unwrap();
    assert_eq!(bands.len(), 4);
    assert_eq!(bands[2]["hypothesis"]["statistics"], "fermion");
    assert_eq!(bands[2]["admissible"], true);
    assert_eq!(bands[0]["admissible"], false);
}

#[test]
fn reconstruct_requires_e_inf() {
    let dir = tempfile::tempdir().unwrap();
    let energies = dir.path().join("e.csv");
    fs::write(&energies, "L,twist,E_total\n1,pbc,-1.0\n2,pbc,-2.0\n").unwrap();
    let o = qfree(&["reconstruct", "--energies", energies.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    fs::write(&energies, "L,twist,E_total\n1,pbc,oops\n").unwrap();
    let o = qfree(&[
        "reconstruct",
        "--energies",
        energies.to_str().unwrap(),
        "--e-inf",
        "-1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn criterion_on_quasi_free_series() {
    let dir = tempfile::tempdir().unwrap();
    let energies = dir.path().join("e.csv");
    let mut text = String::new();
    for (twist, sizes) in [("pbc", "1:16"), ("abc", "1:8")] {
        let o = qfree(&[
            "forward",
            "--band",
            "massive-sine:J=1.3,m=0.2",
            "--statistics",
            "boson",
            "--nu",
            "2",
            "--twist",
            twist,
            "--sizes",
            sizes,
        ]);
        assert!(o.status.success());
        let out = String::from_utf8(o.stdout).unwrap();
        for line in out.lines().filter(|l| !l.starts_with('#')) {
            if line.starts_with("L,") && !text.is_empty() {
                continue;
            }
            text.push_str(line);
            text.push('\n');
        }
    }
    fs::write(&energies, text).unwrap();
    let o = qfree(&[
        "criterion",
        "--energies",
        energies.to_str().unwrap(),
        "--json",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["max_relative_defect"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn convergence_curve() {
    let o = qfree(&["convergence", "--mass", "0.1", "--sizes", "10:40:10"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("L,l2_sq_error"));
    let errs: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(errs.len(), 4);
    assert!(errs.windows(2).all(|w| w[1] < w[0]));

    let o = qfree(&[
        "convergence",
        "--band",
        "fourier:c0=0,a=1;0;0;0;0;0;0;0.5",
        "--sizes",
        "8:12",
    ]);
    let text = String::from_utf8(o.stdout).unwrap();
    for l in text.lines().skip(1) {
        let e: f64 = l.split(',').nth(1).unwrap().parse().unwrap();
        assert!(e < 1e-12);
    }
}

#[test]
fn kernel_tables() {
    let o = qfree(&["kernel", "--kind", "moebius", "--n", "10"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let mu: Vec<i64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(mu, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
    let o = qfree(&["kernel", "--kind", "mertens", "--n", "0"]);
    assert_eq!(o.status.code(), Some(2));
}
