use std::path::{Path, PathBuf};
use std::process::Command;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn hga_env(args: &[&str], env: &[(&str, &Path)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hga"));
    cmd.args(args).current_dir(fixtures());
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("run hga");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn hga(args: &[&str]) -> Run {
    hga_env(args, &[])
}

fn scratch_dir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("hga-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn tate_table_golden() {
    let r = hga(&["tate", "k.json", "k.json", "--from", "-8", "--to", "8"]);
    assert_eq!(r.code, 0);
    let want: String = (-8..=8).map(|i| format!("{i}\t1\n")).collect();
    assert_eq!(r.stdout, want);
}

#[test]
fn tate_json_golden() {
    let r = hga(&["--json", "tate", "k.json", "k.json", "--from", "-1", "--to", "1"]);
    assert_eq!(r.code, 0);
    let want = r#"{
  "kind": "tate",
  "rows": [
    {
      "degree": -1,
      "dim": 1
    },
    {
      "degree": 0,
      "dim": 1
    },
    {
      "degree": 1,
      "dim": 1
    }
  ],
  "window": [
    -1,
    1
  ]
}
"#;
    assert_eq!(r.stdout, want);
}

#[test]
fn ext_and_relext_tables() {
    assert_eq!(hga(&["ext", "k_ff.json", "k_ff.json", "--from", "0", "--to", "4"]).stdout, "0\t1\n1\t2\n2\t3\n3\t4\n4\t5\n");
    // S2 has a projective resolution of length one and Ext^1(S2, S1) = k
    assert_eq!(hga(&["ext", "s2.json", "s1.json", "--from", "0", "--to", "2"]).stdout, "0\t0\n1\t1\n2\t0\n");
    assert_eq!(hga(&["relext", "s2.json", "s1.json", "--from", "0", "--to", "2"]).stdout, "0\t0\n1\t1\n2\t0\n");
    assert_eq!(hga(&["tate", "s2.json", "s1.json", "--from", "-2", "--to", "2"]).stdout, "-2\t0\n-1\t0\n0\t0\n1\t0\n2\t0\n");
}

#[test]
fn dimensions() {
    assert_eq!(hga(&["gorenstein", "dual.json"]).stdout, "0\n");
    assert_eq!(hga(&["gorenstein", "tri2.json"]).stdout, "1\n");
    assert_eq!(hga(&["gorenstein", "tri2_f3.json"]).stdout, "1\n");
    let r = hga(&["gorenstein", "radical_square_zero.json", "--bound", "3"]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "NotWithin\n"));
    assert_eq!(hga(&["pd", "k.json"]).stdout, "inf\n");
    assert_eq!(hga(&["pd", "s2.json"]).stdout, "1\n");
    assert_eq!(hga(&["gpd", "k.json"]).stdout, "0\n");
    assert_eq!(hga(&["gpd", "zero.json"]).stdout, "-inf\n");
    assert_eq!(hga(&["gpd", "m_mixed.json"]).stdout, "1\n");
    assert_eq!(hga(&["pd", "m_mixed.json"]).stdout, "inf\n");
}

#[test]
fn check_algebra() {
    let r = hga(&["check-algebra", "ff.json"]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "p\t2\ndim\t4\ncommutative\ttrue\n"));
    assert_eq!(hga(&["check-algebra", "tri2.json"]).stdout, "p\t2\ndim\t3\ncommutative\tfalse\n");
}

#[test]
fn resolutions() {
    assert_eq!(hga(&["resolve", "k_ff.json", "--to", "3"]).stdout, "0\t1\n1\t2\n2\t3\n3\t4\n");
    // S1 is projective but not free, so the free ranks do not drop
    assert_eq!(hga(&["resolve", "s2.json", "--to", "3"]).stdout, "0\t1\n1\t2\n2\t2\n3\t2\n");
    // k over the dual numbers: T is A in every degree
    let r = hga(&["complete-resolve", "k.json", "--from", "-3", "--to", "3"]);
    assert_eq!(r.stdout, (-3..=3).map(|i| format!("{i}\t1\n")).collect::<String>());
    // a complex with finite projective dimension has contractible T
    let r = hga(&["complete-resolve", "two_term.json", "--from", "-2", "--to", "2"]);
    assert_eq!(r.stdout, "-2\t0\n-1\t0\n0\t1\n1\t1\n2\t0\n");
}

#[test]
fn long_exact_sequences() {
    let r = hga(&["les", "tate-first", "--ses", "ses_tri2.json", "--object", "s1.json", "--from", "-1", "--to", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.ends_with("exact\ttrue\n"));
    let r = hga(&["les", "tate-second", "--ses", "ses_dual.json", "--object", "k.json", "--from", "0", "--to", "1"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("Êxt(M,N)\t0\t1\tcut\nÊxt(M,N')\t0\t0\texact\n"), "{}", r.stdout);
    // 0 -> k -> A -> k -> 0 does not stay exact under Hom(k, -)
    let r = hga(&["les", "relative-second", "--ses", "ses_dual.json", "--object", "k.json", "--from", "0", "--to", "1"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("not proper"), "{}", r.stderr);
    let r = hga(&["les", "relative-first", "--ses", "ses_tri2.json", "--object", "s1.json", "--from", "0", "--to", "2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
}

#[test]
fn am_sequence_and_rigidity() {
    let r = hga(&["am-sequence", "m_mixed.json", "k1_mixed.json"]);
    assert_eq!(r.code, 0);
    assert_eq!(
        r.stdout,
        "gpd\t1\nExt_GP(M,N)\t1\t0\texact\nExt(M,N)\t1\t1\texact\nÊxt(M,N)\t1\t1\texact\nexact\ttrue\nsign\t1\ttrue\nholds\ttrue\n"
    );
    let r = hga(&["rigidity", "k.json"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("pd_finite\tfalse\n") && r.stdout.ends_with("consistent\ttrue\n"));
    let r = hga(&["rigidity", "s2.json", "--sample", "s1.json", "--sample", "p2.json"]);
    assert!(r.stdout.contains("pd_finite\ttrue\n") && r.stdout.ends_with("consistent\ttrue\n"));
}

#[test]
fn exit_codes() {
    // missing window
    assert_eq!(hga(&["tate", "k.json", "k.json"]).code, 2);
    assert_eq!(hga(&["tate", "k.json", "k.json", "--from", "2", "--to", "1"]).code, 2);
    assert_eq!(hga(&["no-such-command"]).code, 2);
    assert_eq!(hga(&["verify", "--suite", "gpd_pd", "--trials", "1"]).code, 2, "seed is mandatory");
    assert_eq!(hga(&["verify", "--suite", "nope", "--seed", "1"]).code, 2);
    let r = hga(&["check-algebra", "bad_mul.json"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("shape mismatch"), "{}", r.stderr);
    let r = hga(&["gpd", "bad_module.json"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("action[1]"), "{}", r.stderr);
    let r = hga(&["gpd", "bad_complex.json"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("degree 2"), "{}", r.stderr);
    assert_eq!(hga(&["gpd", "missing.json"]).code, 2);
}

#[test]
fn cache_reuses_windows_without_changing_output() {
    let dir = scratch_dir("cache");
    let env = [("HGA_CACHE_DIR", dir.as_path())];
    let plain = hga(&["--json", "resolve", "k_ff.json", "--to", "3"]).stdout;
    let first = hga_env(&["--json", "resolve", "k_ff.json", "--to", "3", "--cache"], &env);
    assert_eq!(first.stdout, plain, "{}", first.stderr);
    let entries: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(entries.len(), 1);
    let name = entries[0].file_name().unwrap().to_str().unwrap().to_string();
    assert_eq!(name.len(), 64 + ".json".len(), "sha-256 hex name");
    let second = hga_env(&["--json", "resolve", "k_ff.json", "--to", "3", "--cache"], &env);
    assert_eq!(second.stdout, plain);
    // a damaged entry is recomputed
    std::fs::write(&entries[0], "{").unwrap();
    assert_eq!(hga_env(&["--json", "resolve", "k_ff.json", "--to", "3", "--cache"], &env).stdout, plain);
    let ext = hga(&["ext", "k_ff.json", "k_ff.json", "--from", "0", "--to", "3"]).stdout;
    assert_eq!(hga_env(&["ext", "k_ff.json", "k_ff.json", "--from", "0", "--to", "3", "--cache"], &env).stdout, ext);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn verify_report_and_replay() {
    let dir = scratch_dir("verify");
    let report = dir.join("report.json");
    let args = ["verify", "--suite", "theta_vs_snake", "--seed", "7", "--trials", "10", "--report", report.to_str().unwrap()];
    let r = hga(&args);
    assert_eq!((r.code, r.stdout.as_str()), (0, "theta_vs_snake\t10\t0\n"));
    // no counterexamples, so nothing to replay
    let r = hga(&["replay", report.to_str().unwrap()]);
    assert_eq!((r.code, r.stdout.as_str()), (0, ""));
    let inst = hga_core::verify::instance("schanuel", 7, 0).unwrap();
    let path = dir.join("instance.json");
    std::fs::write(&path, serde_json::to_string(&inst).unwrap()).unwrap();
    let r = hga(&["replay", path.to_str().unwrap()]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "instance\tPASS\n"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn sequential_and_parallel_agree() {
    let args = ["--json", "verify", "--suite", "les", "--seed", "3", "--trials", "8"];
    let par = hga(&args).stdout;
    let seq: Vec<&str> = std::iter::once("--sequential").chain(args).collect();
    assert_eq!(hga(&seq).stdout, par);
}
