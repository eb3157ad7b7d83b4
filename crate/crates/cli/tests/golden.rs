//! Compares JSON reports for `golden/small.toml` with checked-in copies.
//! Regenerate with `UPDATE_GOLDEN=1 cargo test -p fock-toeplitz-cli --test golden`.

use std::fs;
use std::path::Path;
use std::process::Command;

#[test]
fn reports_match_golden_files() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let expected = root.join("expected");
    let tmp = tempfile::TempDir::new().unwrap();
    for cmd in ["matrix", "commutator", "criterion"] {
        let o = Command::new(env!("CARGO_BIN_EXE_fock-toeplitz"))
            .args([cmd, "--quiet", "--format", "json", "--config"])
            .arg(root.join("small.toml"))
            .arg("--out")
            .arg(tmp.path())
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let mut names: Vec<String> = fs::read_dir(tmp.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();

    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        let _ = fs::remove_dir_all(&expected);
        fs::create_dir_all(&expected).unwrap();
        for n in &names {
            fs::copy(tmp.path().join(n), expected.join(n)).unwrap();
        }
        return;
    }

    let mut want: Vec<String> = fs::read_dir(&expected)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    want.sort();
    assert_eq!(names, want);
    for n in &names {
        let got = fs::read_to_string(tmp.path().join(n)).unwrap();
        let exp = fs::read_to_string(expected.join(n)).unwrap();
        assert!(got == exp, "{n} differs from its golden copy");
    }
}
