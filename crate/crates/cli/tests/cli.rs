//! End-to-end tests of the `dessin` binary: subcommands, output files, and
//! the documented exit codes (0 pass, 1 verification failure, 2 input error,
//! 3 search budget exceeded).

use std::process::{Command, Output};

fn dessin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dessin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn find_q_prints_paper_values() {
    let out = dessin(&["find-q", "2,3,13"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("k = 156"));
    assert!(text.contains("q = 311"));
    assert!(text.contains("base genus = 15"));
}

#[test]
fn triple_info_classifies() {
    let out = dessin(&["triple-info", "2,3,13"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("maximal: yes"));
    let out = dessin(&["triple-info", "3,4,4"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("maximal: uncertified"));
}

#[test]
fn triple_info_with_classification_tables() {
    use std::io::Write;
    // build tiny checksummed tables: (3,4,4) non-maximal, (2,3,7) arithmetic
    let dir = tempfile::tempdir().unwrap();
    let write_table = |name: &str, body: &str| {
        use sha2_digest::sha256_hex;
        let hex = sha256_hex(body.as_bytes());
        let path = dir.path().join(name);
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "{body}checksum\t{hex}").unwrap();
        path
    };
    let singerman = write_table("singerman.tsv", "3\t4\t4\tcitation\n");
    let takeuchi = write_table("takeuchi.tsv", "2\t3\t7\tcitation\n");
    let out = dessin(&[
        "triple-info",
        "3,4,4",
        "--singerman",
        singerman.to_str().unwrap(),
        "--takeuchi",
        takeuchi.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("maximal: no"));
    assert!(text.contains("singerman-table"));

    // corrupt the checksum: input error
    std::fs::write(dir.path().join("singerman.tsv"), "3\t4\t4\tx\nchecksum\t00\n").unwrap();
    let out = dessin(&[
        "triple-info",
        "3,4,4",
        "--singerman",
        singerman.to_str().unwrap(),
        "--takeuchi",
        takeuchi.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

/// Minimal sha256 so the test can write valid table checksums without
/// depending on the library internals.
mod sha2_digest {
    pub fn sha256_hex(data: &[u8]) -> String {
        // tests may shell out instead of re-implementing a hash
        let out = std::process::Command::new("sha256sum")
            .stdin(std::process::Stdio::piped())
            .stdout(std::process::Stdio::piped())
            .spawn()
            .and_then(|mut child| {
                use std::io::Write;
                child.stdin.as_mut().unwrap().write_all(data)?;
                child.wait_with_output()
            })
            .expect("sha256sum available");
        String::from_utf8_lossy(&out.stdout)
            .split_whitespace()
            .next()
            .unwrap()
            .to_string()
    }
}

#[test]
fn psl2_triple_subcommand() {
    let out = dessin(&["psl2-triple", "23", "4", "6", "12"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("order 6072"));
}

#[test]
fn remark3_subcommand() {
    let out = dessin(&["remark3", "7,11,13"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("smallest such example"));
    // periods not coprime to 6: input error
    let out = dessin(&["remark3", "2,3,7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn remark4_subcommand() {
    let out = dessin(&["remark4", "7"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("orders (5, 6, 4)"));
    assert!(text.contains("degree 120"));
    // forcing the construction at p = 13 exceeds the cap
    let out = dessin(&["remark4", "13", "--construct"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn realize_emit_verify_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = dessin(&[
        "realize",
        "--group",
        "S3",
        "--triple",
        "2,4,9",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cert = out_dir.join("certificate.json");
    let dessin_file = out_dir.join("dessin.json");
    assert!(cert.exists() && dessin_file.exists());

    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&dessin_file).unwrap()).unwrap();
    assert_eq!(parsed["darts"], 432);
    assert_eq!(parsed["genus"], 31);

    let out = dessin(&[
        "verify",
        "--certificate",
        cert.to_str().unwrap(),
        "--dessin",
        dessin_file.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verification: pass"));

    // tamper with the dessin file: swap two sigma0 entries
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&dessin_file).unwrap()).unwrap();
    let arr = v["sigma0"].as_array_mut().unwrap();
    arr.swap(0, 1);
    std::fs::write(&dessin_file, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let out = dessin(&[
        "verify",
        "--certificate",
        cert.to_str().unwrap(),
        "--dessin",
        dessin_file.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn realize_stdout_emits_canonical_certificate() {
    let out = dessin(&["realize", "--group", "C2", "--triple", "4,6,12", "--stdout"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["cover"]["darts"], 48);
    assert_eq!(v["cover"]["genus_euler"], 13);
    // determinism: a second run prints identical bytes
    let again = dessin(&["realize", "--group", "C2", "--triple", "4,6,12", "--stdout"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn realize_accepts_group_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("klein.json");
    std::fs::write(
        &path,
        r#"{"degree": 4, "generators": [[1,0,3,2],[2,3,0,1]]}"#,
    )
    .unwrap();
    let out = dessin(&[
        "realize",
        "--group",
        path.to_str().unwrap(),
        "--triple",
        "4,6,12",
        "--stdout",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["group"]["order"], 4);
    assert_eq!(v["aut"]["order"], 4);
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(dessin(&["find-q", "2,3,6"]).status.code(), Some(2));
    assert_eq!(dessin(&["realize", "--group", "C0"]).status.code(), Some(2));
    assert_eq!(
        dessin(&["realize", "--group", "C3", "--triple", "3,4,4"])
            .status
            .code(),
        Some(2)
    );
    // pinned q that is not admissible
    assert_eq!(
        dessin(&["realize", "--group", "C2", "--triple", "4,6,12", "--q", "29"])
            .status
            .code(),
        Some(2)
    );
    // missing files
    assert_eq!(
        dessin(&["verify", "--certificate", "/no/such.json", "--dessin", "/no/such2.json"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn group_order_cap_exits_two() {
    let out = dessin(&["realize", "--group", "S5", "--max-group-order", "100"]);
    assert_eq!(out.status.code(), Some(2));
}
