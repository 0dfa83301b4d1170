use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn aucm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aucm"))
        .args(args)
        .env("AUCM_OUT_DIR", dir)
        .current_dir(dir)
        .output()
        .expect("run aucm")
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn machine_symmetric_plus_qubit() {
    let dir = tempfile::tempdir().unwrap();
    let out = aucm(
        dir.path(),
        &["machine", "--d", "2", "--sign", "+", "--coeffs", "1,1,1"],
    );
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("SPlus_central"), "{stdout}");
    let (header, rows) = csv_rows(&dir.path().join("machine_Uplus_d2_n3.csv"));
    let fi = header.iter().position(|c| c == "F_choi").unwrap();
    assert_eq!(rows.len(), 3);
    for row in &rows {
        assert!((num(&row[fi]) - 7.0 / 9.0).abs() < 1e-12);
    }
    assert!(dir
        .path()
        .join("machine_Uplus_d2_n3.csv.meta.json")
        .exists());
}

#[test]
fn boundary12_rows_and_symmetric_midpoint() {
    let dir = tempfile::tempdir().unwrap();
    assert!(aucm(dir.path(), &["boundary12", "--d", "2"])
        .status
        .success());
    let (_, rows) = csv_rows(&dir.path().join("boundary12_d2_r100.csv"));
    assert_eq!(rows.len(), 100);

    assert!(aucm(
        dir.path(),
        &["boundary12", "--d", "2", "--resolution", "101"]
    )
    .status
    .success());
    let (header, rows) = csv_rows(&dir.path().join("boundary12_d2_r101.csv"));
    let (a, b) = (
        header.iter().position(|c| c == "FA").unwrap(),
        header.iter().position(|c| c == "FB").unwrap(),
    );
    let mid = &rows[50];
    assert!((num(&mid[a]) - 5.0 / 6.0).abs() < 1e-12);
    assert!((num(&mid[b]) - 5.0 / 6.0).abs() < 1e-12);
}

#[test]
fn boundary13_header_and_empty_minus_surface() {
    let dir = tempfile::tempdir().unwrap();
    let out = aucm(
        dir.path(),
        &[
            "boundary13",
            "--d",
            "2",
            "--resolution",
            "20",
            "--surface",
            "minus",
        ],
    );
    assert!(out.status.success());
    assert!(!out.stderr.is_empty());
    let body = fs::read_to_string(dir.path().join("boundary13_minus_d2_r20.csv")).unwrap();
    assert_eq!(body, "x,y,z,fA,fB,fC,region\n");

    assert!(aucm(
        dir.path(),
        &["boundary13", "--d", "3", "--resolution", "12"]
    )
    .status
    .success());
    let (header, rows) = csv_rows(&dir.path().join("boundary13_hull_d3_r12.csv"));
    assert_eq!(header, ["x", "y", "z", "fA", "fB", "fC", "region"]);
    assert!(!rows.is_empty());
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for fmt in ["csv", "json"] {
        let path = dir.path().join(format!("b.{fmt}"));
        let p = path.to_str().unwrap();
        let args = [
            "--format",
            fmt,
            "--out",
            p,
            "boundary13",
            "--d",
            "3",
            "--resolution",
            "10",
        ];
        assert!(aucm(dir.path(), &args).status.success());
        let first = fs::read(&path).unwrap();
        assert!(aucm(dir.path(), &args).status.success());
        assert_eq!(first, fs::read(&path).unwrap());
    }
}

#[test]
fn csv_and_json_carry_the_same_values() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("e.csv");
    let j = dir.path().join("e.json");
    for (fmt, p) in [("csv", &c), ("json", &j)] {
        let args = [
            "--format",
            fmt,
            "--out",
            p.to_str().unwrap(),
            "banaszek",
            "--d",
            "3",
            "--resolution",
            "11",
        ];
        assert!(aucm(dir.path(), &args).status.success());
    }
    let (header, rows) = csv_rows(&c);
    let json: serde_json::Value = serde_json::from_slice(&fs::read(&j).unwrap()).unwrap();
    let records = json.as_array().unwrap();
    assert_eq!(records.len(), rows.len());
    for (row, rec) in rows.iter().zip(records) {
        for (col, cell) in header.iter().zip(row) {
            let v = &rec[col];
            if cell.is_empty() {
                assert!(v.is_null());
            } else if let Ok(x) = cell.parse::<f64>() {
                assert_eq!(v.as_f64().unwrap(), x, "{col}");
            } else {
                assert_eq!(v.as_str().unwrap(), cell);
            }
        }
    }
}

#[test]
fn invalid_configuration_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        aucm(dir.path(), &["boundary12", "--d", "9"]).status.code(),
        Some(1)
    );
    assert_eq!(
        aucm(dir.path(), &["machine", "--d", "2", "--sign", "x"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(aucm(dir.path(), &["nonsense"]).status.code(), Some(1));
}

#[test]
fn verify_passes_and_fails_on_tight_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let out = aucm(
        dir.path(),
        &["verify", "--d", "2", "--trials", "1000", "--seed", "7"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );

    let out = aucm(
        dir.path(),
        &[
            "verify",
            "--d",
            "2",
            "--trials",
            "10",
            "--seed",
            "7",
            "--resolution",
            "20",
            "--support-tol",
            "1e-12",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("support_vs_hull_mesh"));
}

#[test]
fn out_dir_variable_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("nested");
    let out = Command::new(env!("CARGO_BIN_EXE_aucm"))
        .args(["boundary12", "--d", "3", "--resolution", "5"])
        .env("AUCM_OUT_DIR", &target)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(target.join("boundary12_d3_r5.csv").exists());
    assert!(!dir.path().join("boundary12_d3_r5.csv").exists());
}

#[test]
fn qubit_mixture_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = aucm(
        dir.path(),
        &[
            "mix",
            "--d",
            "2",
            "--coeffs-g",
            "1,1",
            "--coeffs-b",
            "1,0",
            "--p",
            "0.5",
        ],
    );
    assert!(out.status.success());
    let (header, rows) = csv_rows(&dir.path().join("mix_d2.csv"));
    let col = |n: &str| header.iter().position(|c| c == n).unwrap();
    let b = &rows[1];
    assert!((num(&b[col("f_g")]) - 3.0).abs() < 1e-12);
    assert!((num(&b[col("f_b")]) - 1.0).abs() < 1e-12);
    assert!((num(&b[col("f_mix")]) - 2.0).abs() < 1e-12);
    let q = (2f64.sqrt() - 1.0) / (3f64.sqrt() - 1.0);
    assert!((num(&b[col("q")]) - q).abs() < 1e-12);
}
