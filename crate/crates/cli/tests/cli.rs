use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fock-toeplitz"))
}

struct Run {
    dir: TempDir,
}

impl Run {
    fn new() -> Self {
        Self {
            dir: TempDir::new().unwrap(),
        }
    }

    fn config(&self, text: &str) -> PathBuf {
        let p = self.dir.path().join("cfg.toml");
        fs::write(&p, text).unwrap();
        p
    }

    fn out(&self) -> PathBuf {
        self.dir.path().join("out")
    }

    fn exec(&self, cmd: &str, text: &str, extra: &[&str]) -> Output {
        let cfg = self.config(text);
        bin()
            .arg(cmd)
            .arg("--config")
            .arg(&cfg)
            .arg("--out")
            .arg(self.out())
            .arg("--quiet")
            .args(extra)
            .output()
            .unwrap()
    }

    fn json(&self, name: &str) -> Value {
        serde_json::from_str(&fs::read_to_string(self.out().join(name)).unwrap()).unwrap()
    }
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

/// (row, col) -> (re, im)
fn read_matrix(path: &Path) -> Vec<(usize, usize, f64, f64)> {
    let mut r = csv::Reader::from_path(path).unwrap();
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), ["row", "col", "re", "im"]);
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            (
                rec[0].parse().unwrap(),
                rec[1].parse().unwrap(),
                rec[2].parse().unwrap(),
                rec[3].parse().unwrap(),
            )
        })
        .collect()
}

const R2_VS_Z: &str = r#"
s_values = [0.0, 3.0]
N = 3
k_max = 0
j_max = 1
[u]
preset = "|z|^2"
[v]
preset = "z"
"#;

#[test]
fn missing_n_is_a_config_error() {
    let run = Run::new();
    let o = run.exec("matrix", "s_values = [0.0]\n[u]\npreset = \"1\"\n", &[]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("`N`"), "{}", stderr(&o));
}

#[test]
fn unreadable_config_is_a_config_error() {
    let o = bin().args(["matrix", "--config", "/nonexistent/cfg.toml"]).output().unwrap();
    assert_eq!(code(&o), 2);
    let o = bin().arg("matrix").output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let run = Run::new();
    let cfg = run.config(R2_VS_Z);
    for bad in ["0", "many"] {
        let o = bin()
            .args(["matrix", "--quiet", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(run.out())
            .env("FOCK_TOEPLITZ_THREADS", bad)
            .output()
            .unwrap();
        assert_eq!(code(&o), 2, "{bad}");
        assert!(stderr(&o).contains("FOCK_TOEPLITZ_THREADS"));
    }
}

#[test]
fn identity_matrix_for_constant_symbol() {
    let run = Run::new();
    let o = run.exec("matrix", "s_values = [0.0]\nN = 4\nk_max = 1\nj_max = 1\n[u]\npreset = \"1\"\n", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let m = read_matrix(&run.out().join("matrix_u_s0.csv"));
    assert_eq!(m.len(), 16);
    for (row, col, re, im) in m {
        let want = if row == col { 1.0 } else { 0.0 };
        assert!((re - want).abs() <= 1e-12 && im.abs() <= 1e-12, "({row},{col}) = {re}+{im}i");
    }
    let env = run.json("matrix_u_s0.json");
    assert_eq!(env["N"], 4);
    assert_eq!(env["s"], 0.0);
    assert_eq!(env["exact_band"], 0);
    assert_eq!(env["label"], "T[1]");
}

#[test]
fn radial_matrix_is_diagonal_with_known_eigenvalues() {
    let run = Run::new();
    let o = run.exec(
        "matrix",
        "s_values = [0.0]\nN = 3\nk_max = 0\nj_max = 1\n[u]\npreset = \"|z|^2\"\n",
        &["--format", "csv"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(!run.out().join("matrix_u_s0.json").exists());
    for (row, col, re, im) in read_matrix(&run.out().join("matrix_u_s0.csv")) {
        let want = if row == col { row as f64 + 1.0 } else { 0.0 };
        assert!((re - want).abs() <= 1e-10 && im.abs() <= 1e-10, "({row},{col}) = {re}");
    }
}

#[test]
fn commutator_residual_matches_closed_form() {
    let run = Run::new();
    let o = run.exec("commutator", R2_VS_Z, &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = run.json("commutator_summary.json");
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for (row, s) in rows.iter().zip([0.0f64, 3.0]) {
        assert_eq!(row["window"], 1);
        assert_eq!(row["at"], serde_json::json!([1, 0]));
        assert_eq!(row["commutes"], false);
        let r = row["residual"].as_f64().unwrap();
        assert!((r - (s + 1.0).sqrt()).abs() <= 1e-10, "s = {s}: {r}");
    }
    let env = run.json("commutator_s3.json");
    assert_eq!(env["window"], 1);
    assert_eq!(env["N"], 3);
}

fn verdict(run: &Run, file: &str) -> Value {
    run.json(file)["verdict"].clone()
}

#[test]
fn criterion_verdicts() {
    let radial = Run::new();
    let o = radial.exec(
        "criterion",
        "s_values = [0.5]\nN = 20\nk_max = 6\nj_max = 2\n[u]\npreset = \"|z|^2\"\n[v]\npreset = \"|z|^4\"\n",
        &[],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(verdict(&radial, "criterion_s0.5.json")["kind"], "consistent_radial");

    let constant = Run::new();
    let o = constant.exec(
        "criterion",
        "s_values = [1.0]\nN = 20\nk_max = 6\nj_max = 2\n[u]\npreset = \"1\"\n[v]\npreset = \"re_z\"\n",
        &[],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = verdict(&constant, "criterion_s1.json");
    assert_eq!(v["kind"], "inconclusive");
    assert!(v["reason"].as_str().unwrap().contains("u constant"), "{v}");

    let nonradial = Run::new();
    let o = nonradial.exec(
        "criterion",
        "s_values = [0.0]\nN = 20\nk_max = 6\nj_max = 2\n[u]\npreset = \"|z|^2\"\n[v]\npreset = \"z\"\n",
        &[],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = nonradial.json("criterion_s0.json");
    assert_eq!(report["verdict"]["kind"], "nonradial_mode_detected");
    assert_eq!(report["verdict"]["modes"], serde_json::json!([1]));
    assert!(nonradial.out().join("criterion_cells.csv").exists());
    assert_eq!(nonradial.json("probes.json")["kind"], "probe");
}

#[test]
fn criterion_rejects_nonradial_u() {
    let run = Run::new();
    let o = run.exec(
        "criterion",
        "s_values = [0.0]\nN = 20\n[u]\npreset = \"z\"\n[v]\npreset = \"|z|^2\"\n",
        &[],
    );
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("field `u`"), "{}", stderr(&o));
}

#[test]
fn decompose_recovers_modes() {
    let re_z = Run::new();
    let o = re_z.exec(
        "decompose",
        "s_values = [0.0]\nN = 8\nk_max = 1\nj_max = 3\n[u]\npreset = \"1\"\n[decompose]\nsymbol = { preset = \"re_z\" }\n",
        &[],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep = re_z.json("decompose.json");
    assert_eq!(rep["modes"], serde_json::json!([-1, 1]));
    assert!(rep["sample_max_error"].as_f64().unwrap() <= 1e-10);
    assert!(rep["l2_residual"][0]["value"].as_f64().unwrap() <= 1e-10);

    // feed the written samples back in through the CSV path
    let samples = re_z.out().join("samples.csv");
    let again = Run::new();
    let o = again.exec(
        "decompose",
        &format!(
            "s_values = [0.0]\nN = 8\nk_max = 1\nj_max = 3\n[u]\npreset = \"1\"\n[decompose]\nsamples = {:?}\n",
            samples.display().to_string()
        ),
        &[],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(again.json("decompose.json")["modes"], serde_json::json!([-1, 1]));

    let radial = Run::new();
    let o = radial.exec(
        "decompose",
        "s_values = [0.0]\nN = 8\nk_max = 1\nj_max = 3\n[u]\npreset = \"1\"\n[decompose]\nsymbol = { preset = \"exp(-|z|)\" }\n",
        &[],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(radial.json("decompose.json")["modes"], serde_json::json!([0]));
}

#[test]
fn decompose_needs_enough_angles() {
    let run = Run::new();
    let o = run.exec(
        "decompose",
        "s_values = [0.0]\nN = 8\nk_max = 1\nj_max = 2\n[u]\npreset = \"1\"\n[decompose]\nangles = 3\nsymbol = { preset = \"z\" }\n",
        &[],
    );
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("at least 6"), "{}", stderr(&o));
}

#[test]
fn json_is_byte_identical_across_runs_and_thread_counts() {
    let text = "s_values = [0.0, 1.5]\nN = 14\nk_max = 5\nj_max = 2\n[u]\npreset = \"1+|z|^2\"\n[v]\npreset = \"z^2\"\n";
    let mut outputs = Vec::new();
    for threads in ["1", "1", "4"] {
        let run = Run::new();
        let cfg = run.config(text);
        for cmd in ["matrix", "commutator", "criterion"] {
            let o = bin()
                .args([cmd, "--quiet", "--format", "json", "--config"])
                .arg(&cfg)
                .arg("--out")
                .arg(run.out())
                .env("FOCK_TOEPLITZ_THREADS", threads)
                .output()
                .unwrap();
            assert_eq!(code(&o), 0, "{}", stderr(&o));
        }
        let mut files: Vec<_> = fs::read_dir(run.out())
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        let contents: Vec<(String, Vec<u8>)> = files
            .iter()
            .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(p).unwrap()))
            .collect();
        assert!(contents.iter().all(|(n, _)| n.ends_with(".json")));
        outputs.push(contents);
    }
    assert!(outputs[0].len() >= 6);
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn selftest_passes() {
    let dir = TempDir::new().unwrap();
    let o = bin().args(["selftest", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("10 of 10 criteria passed"), "{stdout}");
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("selftest.json")).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 10);
}
