mod common;

use std::path::Path;
use std::process::Command;

use common::{data, data_str};
use opcmlink::cli::{Dataset, EXIT_FAILURE, EXIT_OK, EXIT_USAGE};
use opcmlink::relational::{natural_join, AttributeSchema};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn opcmlink(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_opcmlink"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exited"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn hierarchy() -> String {
    data_str("postcode_hierarchy.json")
}

#[test]
fn check_laws_targets() {
    let post = format!("prefix:{}", data_str("post.txt"));
    for t in [
        post.as_str(),
        "possibility:3",
        "flat:3",
        "product:flat:2,flat:2",
    ] {
        let r = opcmlink(&["check-laws", t]);
        assert_eq!(r.code, EXIT_OK, "{t}: {}{}", r.stdout, r.stderr);
        assert!(r.stdout.contains("all laws hold"));
    }
    let groth = format!("groth:{}", data_str("ab.json"));
    let r = opcmlink(&["check-laws", &groth]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stdout);
    assert!(r.stdout.contains("⊞ equals natural join"));
}

#[test]
fn check_laws_possibility_opcm_from_codes() {
    let dir = tempfile::tempdir().unwrap();
    let codes = write(dir.path(), "post5.txt", "SA\nSA1\nSA2\nSA2 8\n");
    let r = opcmlink(&["check-laws", &format!("possibility-opcm:{codes}")]);
    assert_eq!(r.code, EXIT_OK, "{}{}", r.stdout, r.stderr);
}

#[test]
fn mutated_dump_fails_with_witness() {
    let dump = opcmlink(&[
        "check-laws",
        "--dump",
        &format!("prefix:{}", data_str("post.txt")),
    ]);
    assert_eq!(dump.code, EXIT_OK);
    let mut lines: Vec<String> = dump.stdout.lines().map(str::to_string).collect();
    // SA ⊕ SA1 = SA1 becomes SA ⊕ SA1 = SA2
    let i = lines
        .iter()
        .position(|l| l == "combine\tSA\tSA1\tSA1")
        .expect("entry present");
    lines[i] = "combine\tSA\tSA1\tSA2".into();
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "mutant.txt", &(lines.join("\n") + "\n"));
    let r = opcmlink(&["check-laws", &format!("table:{file}")]);
    assert_eq!(r.code, EXIT_FAILURE);
    assert!(
        r.stdout.contains("OPCM2 commutativity") && r.stdout.contains("FAIL"),
        "{}",
        r.stdout
    );
    assert!(r.stdout.contains("SA1"), "witness printed: {}", r.stdout);
    let json = opcmlink(&["check-laws", "--json", &format!("table:{file}")]);
    let v: serde_json::Value = serde_json::from_str(&json.stdout).unwrap();
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["verdict"] == "fail" && !c["witnesses"].as_array().unwrap().is_empty()));
}

#[test]
fn unknown_target_is_usage_error() {
    assert_eq!(opcmlink(&["check-laws", "lattice:3"]).code, EXIT_USAGE);
    assert_eq!(
        opcmlink(&["check-laws", "prefix:/no/such/file"]).code,
        EXIT_USAGE
    );
    assert_eq!(opcmlink(&["join", "only-one.csv"]).code, EXIT_USAGE);
}

#[test]
fn join_golden_and_file_output() {
    let r = opcmlink(&["join", &data_str("suspects.csv"), &data_str("owners.csv")]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(
        r.stdout,
        std::fs::read_to_string(data("suspects_owners.golden.csv")).unwrap()
    );
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    let r = opcmlink(&[
        "join",
        &data_str("suspects.csv"),
        &data_str("owners.csv"),
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.contains("join: 3 rows"), "{}", r.stdout);
    assert_eq!(
        std::fs::read(&out).unwrap(),
        std::fs::read(data("suspects_owners.golden.csv")).unwrap()
    );
}

#[test]
fn join_matches_library_natural_join() {
    let a = Dataset::load(&data("suspects.csv")).unwrap();
    let b = Dataset::load(&data("owners.csv")).unwrap();
    let mut domains: std::collections::BTreeMap<String, std::collections::BTreeSet<String>> =
        Default::default();
    for d in [&a, &b] {
        for (k, v) in d.observed() {
            domains.entry(k).or_default().extend(v);
        }
    }
    let schema = AttributeSchema::new(
        domains
            .into_iter()
            .map(|(k, v)| (k, v.into_iter().collect::<Vec<_>>())),
    )
    .unwrap();
    let j = natural_join(
        &a.to_relation(&schema).unwrap().0,
        &b.to_relation(&schema).unwrap().0,
    )
    .unwrap()
    .unwrap();
    let header: Vec<String> = ["suspect", "address", "owner"].map(String::from).to_vec();
    let expected = Dataset::from_relation(&j, &header).unwrap().to_csv();
    let r = opcmlink(&["join", &data_str("suspects.csv"), &data_str("owners.csv")]);
    assert_eq!(r.stdout, expected);
}

#[test]
fn inconsistent_join_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.csv", "k,x\n1,p\n");
    let b = write(dir.path(), "b.csv", "k,y\n2,q\n");
    let r = opcmlink(&["join", &a, &b]);
    assert_eq!(r.code, EXIT_FAILURE);
    assert!(r.stderr.contains("inconsistent: empty join"));
    assert!(r.stdout.is_empty());
}

#[test]
fn disjoint_join_is_cartesian() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.csv", "x\n1\n2\n3\n");
    let b = write(dir.path(), "b.csv", "y\np\nq\n");
    let r = opcmlink(&["join", &a, &b]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(r.stdout.lines().count(), 1 + 3 * 2);
    assert!(r.stderr.contains("join: 6 rows"));
}

#[test]
fn join_with_full_relation_pads() {
    let dir = tempfile::tempdir().unwrap();
    let schema = write(
        dir.path(),
        "s.json",
        r#"{"x": ["1", "2"], "y": ["p", "q"]}"#,
    );
    let a = write(dir.path(), "a.csv", "x\n1\n");
    let full = write(dir.path(), "full.csv", "x,y\n1,p\n1,q\n2,p\n2,q\n");
    let r = opcmlink(&["join", &a, &full, "--schema", &schema]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert_eq!(r.stdout, "x,y\n1,p\n1,q\n");
}

#[test]
fn join_collapses_duplicates() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.csv", "x\n1\n1\n");
    let b = write(dir.path(), "b.csv", "x,y\n1,p\n");
    let r = opcmlink(&["join", &a, &b]);
    assert_eq!(r.stdout, "x,y\n1,p\n");
    assert!(r.stderr.contains("1 duplicate rows collapsed"));
}

#[test]
fn generalize_fig1() {
    let r = opcmlink(&[
        "generalize",
        &data_str("fig1a.csv"),
        "--attr",
        "postcode",
        "--level",
        "sector",
        "--hierarchy",
        &hierarchy(),
        "--drop",
        "user",
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert_eq!(
        r.stdout,
        std::fs::read_to_string(data("fig1b.golden.csv")).unwrap()
    );
}

#[test]
fn generalize_leaf_and_root_levels() {
    let fig1a = data_str("fig1a.csv");
    let leaf = opcmlink(&[
        "generalize",
        &fig1a,
        "--attr",
        "postcode",
        "--level",
        "unit",
        "--hierarchy",
        &hierarchy(),
    ]);
    assert_eq!(
        leaf.stdout,
        std::fs::read_to_string(data("fig1a.csv")).unwrap()
    );
    let root = opcmlink(&[
        "generalize",
        &fig1a,
        "--attr",
        "postcode",
        "--level",
        "0",
        "--hierarchy",
        &hierarchy(),
    ]);
    assert_eq!(root.stdout, "user,postcode\n1,ε\n2,ε\n3,ε\n4,ε\n");
}

#[test]
fn generalize_uncovered_value_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "d.csv", "user,postcode\n1,SA2 8PP\n2,ZZ9 9ZZ\n");
    let r = opcmlink(&[
        "generalize",
        &f,
        "--attr",
        "postcode",
        "--level",
        "sector",
        "--hierarchy",
        &hierarchy(),
    ]);
    assert_eq!(r.code, EXIT_FAILURE);
    assert!(r.stderr.contains("ZZ9 9ZZ"));
    let r = opcmlink(&[
        "generalize",
        &f,
        "--attr",
        "postcode",
        "--level",
        "galaxy",
        "--hierarchy",
        &hierarchy(),
    ]);
    assert_eq!(r.code, EXIT_USAGE);
}

#[test]
fn freq_examples() {
    let h = hierarchy();
    let freq = |file: &str, code: &str| {
        opcmlink(&[
            "freq",
            file,
            "--attr",
            "postcode",
            "--at-least",
            code,
            "--hierarchy",
            &h,
        ])
    };
    let fig1a = data_str("fig1a.csv");
    let fig1b = data_str("fig1b.golden.csv");
    assert_eq!(freq(&fig1b, "SA2").stdout, "3/4 (0.75)\n");
    assert_eq!(freq(&fig1b, "ε").stdout, "1 (1)\n");
    assert_eq!(freq(&fig1a, "SA2 8PP").stdout, "1/4 (0.25)\n");
    assert_eq!(freq(&fig1b, "SA2 8PP").stdout, "0 (0)\n");
    let bad = freq(&fig1b, "SA9");
    assert_eq!(bad.code, EXIT_FAILURE);
    assert!(bad.stderr.contains("SA9"));
    let json = opcmlink(&[
        "freq",
        &fig1b,
        "--attr",
        "postcode",
        "--at-least",
        "SA2",
        "--hierarchy",
        &h,
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&json.stdout).unwrap();
    assert_eq!(v["probability"], "3/4");
    assert_eq!(v["matching"], 3);
}

#[test]
fn audit_examples() {
    let a = opcmlink(&["audit", &data_str("fig1a.csv"), "--quasi", "postcode"]);
    assert!(a.stdout.contains("unique rows: 4/4"), "{}", a.stdout);
    let b = opcmlink(&[
        "audit",
        &data_str("fig1b.golden.csv"),
        "--quasi",
        "postcode",
    ]);
    assert!(b.stdout.contains("unique rows: 1/4"));
    assert!(b.stdout.contains("size 1: 1 classes") && b.stdout.contains("size 3: 1 classes"));
    let dir = tempfile::tempdir().unwrap();
    let one = write(dir.path(), "one.csv", "user,postcode\n1,SA2 8PP\n");
    assert!(opcmlink(&["audit", &one, "--quasi", "postcode"])
        .stdout
        .contains("unique rows: 1/1"));
    let both = opcmlink(&[
        "audit",
        &data_str("fig1b.golden.csv"),
        "--quasi",
        "user,postcode",
    ]);
    assert!(both.stdout.contains("unique rows: 1/4"));
    assert_eq!(
        opcmlink(&["audit", &data_str("fig1a.csv"), "--quasi", "age"]).code,
        EXIT_USAGE
    );
}

#[test]
fn commands_are_deterministic() {
    let args = ["join", &data_str("suspects.csv"), &data_str("owners.csv")].map(String::from);
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let first = opcmlink(&args);
    for _ in 0..3 {
        let again = opcmlink(&args);
        assert_eq!(
            (again.stdout, again.stderr),
            (first.stdout.clone(), first.stderr.clone())
        );
    }
}
