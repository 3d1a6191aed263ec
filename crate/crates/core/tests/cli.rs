use std::fs;
use std::path::PathBuf;
use std::process::Command;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn koszul(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_koszul")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("koszul-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Compare against `tests/golden/<name>.json`; set `KOSZUL_BLESS=1` to rewrite.
fn golden(name: &str, actual: &str) {
    let path = format!("{}/tests/golden/{name}.json", env!("CARGO_MANIFEST_DIR"));
    if std::env::var_os("KOSZUL_BLESS").is_some() {
        fs::write(&path, actual).unwrap();
    }
    let want = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    assert_eq!(actual, want, "structured output of {name} changed");
}

#[test]
fn made_modules_validate() {
    for kind in ["simple", "free", "syzygy-of-simple", "radical"] {
        let made = koszul(&["make", kind, "-r", "2", "-k", "2"]);
        assert_eq!(made.code, 0, "{}", made.stderr);
        let path = scratch(&format!("{kind}.mod"));
        fs::write(&path, &made.stdout).unwrap();
        let v = koszul(&["validate", path.to_str().unwrap()]);
        assert_eq!(v.code, 0, "{kind}: {}", v.stderr);
        assert!(v.stdout.starts_with("valid:"), "{}", v.stdout);
    }
}

#[test]
fn twist_round_trip() {
    let path = scratch("twist.mod");
    let up = koszul(&["make", "twist", "-k", "1", &data("simple_r2.mod")]);
    assert_eq!(up.code, 0, "{}", up.stderr);
    fs::write(&path, &up.stdout).unwrap();
    let down = koszul(&["make", "twist", "-k", "-1", path.to_str().unwrap()]);
    assert_eq!(down.stdout, fs::read_to_string(data("simple_r2.mod")).unwrap());
}

#[test]
fn human_verdicts() {
    let lf = koszul(&["locally-free", &data("linear_quotient_r1.mod")]);
    assert_eq!(lf.code, 0);
    assert!(lf.stdout.starts_with("not locally free"), "{}", lf.stdout);

    let k = koszul(&["koszul", &data("loewy2_r2.mod")]);
    assert_eq!(k.code, 0);
    assert_eq!(k.stdout, "not Koszul, witness k=1 (generator in degree 2)\n");

    let h = koszul(&["hilbert", &data("radical_shift1_r2.mod")]);
    assert_eq!(h.code, 0);
    assert!(h.stdout.contains("(n^2 + 5n + 6)/2"), "{}", h.stdout);
}

#[test]
fn exit_codes() {
    let missing_field = scratch("missing.mod");
    fs::write(&missing_field, "p = 5\n").unwrap();
    assert_eq!(koszul(&["validate", missing_field.to_str().unwrap()]).code, 2);
    assert_eq!(koszul(&["validate", &data("anticommute_fails.mod")]).code, 2);
    assert_eq!(koszul(&["locally-free", "--t-max", "0", &data("radical_shift1_r2.mod")]).code, 3);
    assert_eq!(koszul(&["locally-free", &data("loewy2_r2.mod")]).code, 4);
    assert_eq!(koszul(&["make", "syzygy-of-simple", "-k", "-1"]).code, 4);
    assert_eq!(koszul(&["no-such-command"]).code, 1);
}

#[test]
fn structured_output_is_deterministic() {
    let args = ["--format", "structured", "--seed", "3", "ar-seq", &data("simple_r2.mod")];
    let (a, b) = (koszul(&args), koszul(&args));
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn ar_seq_writes_three_files() {
    let dir = scratch("ar");
    let run = koszul(&["ar-seq", "--out", dir.to_str().unwrap(), &data("simple_r2.mod")]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    for term in ["left", "middle", "right"] {
        let v = koszul(&["validate", dir.join(format!("{term}.mod")).to_str().unwrap()]);
        assert_eq!(v.code, 0, "{term}: {}", v.stderr);
    }
}

#[test]
fn golden_structured_output() {
    let cases: [(&str, Vec<String>); 5] = [
        ("validate", vec!["validate".into(), data("simple_r2.mod")]),
        ("koszul", vec!["koszul".into(), data("loewy2_r2.mod")]),
        ("cohomology", vec!["cohomology".into(), "--twists".into(), "-3..3".into(), data("simple_r2.mod")]),
        ("locally_free_inconclusive", vec!["locally-free".into(), "--t-max".into(), "0".into(), data("radical_shift1_r2.mod")]),
        ("precondition_error", vec!["make".into(), "syzygy-of-simple".into(), "-k".into(), "-1".into()]),
    ];
    for (name, args) in cases {
        let mut full = vec!["--format", "structured"];
        full.extend(args.iter().map(String::as_str));
        let run = koszul(&full);
        let out = if run.stdout.is_empty() { run.stderr } else { run.stdout };
        golden(name, &out);
    }
}

#[test]
fn oracle_subcommand() {
    let run = koszul(&["oracle", "cech", "-r", "2", "-n", "-4", "-q", "2"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(run.stdout.contains('3'), "{}", run.stdout);
}
