use std::fs;
use std::path::Path;
use std::process::Command;

use negbio::bio::{oracle_authorize, Sidecar};
use negbio::synth::parse_templates;
use tempfile::TempDir;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn negbio_env(dir: &Path, args: &[&str], config: Option<&Path>) -> Out {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_negbio"));
    cmd.current_dir(dir).args(args).env_remove("NEGBIO_CONFIG");
    if let Some(c) = config {
        cmd.env("NEGBIO_CONFIG", c);
    }
    let out = cmd.output().unwrap();
    Out {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn negbio(dir: &Path, args: &[&str]) -> Out {
    negbio_env(dir, args, None)
}

fn ok(dir: &Path, args: &[&str]) -> Out {
    let out = negbio(dir, args);
    assert_eq!(out.code, 0, "{args:?}\n{}", out.stderr);
    out
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

/// refs.tpl (5 x 64 bits) and an authorization database over it.
fn toy(dir: &Path) {
    ok(
        dir,
        &[
            "gen", "--n", "64", "--N", "5", "--seed", "7", "--out", "refs.tpl",
        ],
    );
    ok(
        dir,
        &[
            "build",
            "--templates",
            "refs.tpl",
            "--L",
            "8",
            "--w",
            "3",
            "--m",
            "2",
            "--seed",
            "1",
            "--out",
            "db.ndb",
            "--family-out",
            "family.lsh",
        ],
    );
}

#[test]
fn gen_is_reproducible() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    ok(
        dir,
        &[
            "gen", "--n", "64", "--N", "5", "--seed", "7", "--out", "a.tpl",
        ],
    );
    ok(
        dir,
        &[
            "gen", "--n", "64", "--N", "5", "--seed", "7", "--out", "b.tpl",
        ],
    );
    let a = read(dir, "a.tpl");
    assert_eq!(a, read(dir, "b.tpl"));
    assert_eq!(a.lines().count(), 6);
    assert!(a.starts_with("TPL v1 n=64\n"));
    assert!(read(dir, "a.tpl.manifest").contains("rng=chacha8\n"));

    let bad = negbio(dir, &["gen", "--n", "0", "--N", "5", "--out", "c.tpl"]);
    assert_eq!(bad.code, 2);
    assert!(bad.stderr.starts_with("error:"));
    assert_eq!(negbio(dir, &["gen", "--bogus"]).code, 2);
    assert_eq!(negbio(dir, &["--help"]).code, 0);

    ok(
        dir,
        &[
            "gen",
            "--genuine-of",
            "a.tpl",
            "--epsilon",
            "0.1",
            "--out",
            "g.tpl",
        ],
    );
    let (_, g) = parse_templates(&read(dir, "g.tpl")).unwrap();
    assert_eq!(g.len(), 5);
}

#[test]
fn check_accepts_enrolled_and_matches_oracle() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    toy(dir);
    let out = ok(
        dir,
        &[
            "check", "--db", "db.ndb", "--query", "refs.tpl", "--index", "2", "--format", "machine",
        ],
    );
    assert_eq!(out.stdout, "ACCEPT 0,1\n");

    ok(
        dir,
        &[
            "gen",
            "--genuine-of",
            "refs.tpl",
            "--epsilon",
            "0.3",
            "--seed",
            "3",
            "--out",
            "noisy.tpl",
        ],
    );
    ok(
        dir,
        &[
            "gen",
            "--impostors",
            "--n",
            "64",
            "--N",
            "195",
            "--seed",
            "3",
            "--out",
            "imp.tpl",
        ],
    );
    let mut queries = read(dir, "noisy.tpl");
    queries.extend(
        read(dir, "imp.tpl")
            .lines()
            .skip(1)
            .map(|l| format!("{l}\n")),
    );
    fs::write(dir.join("queries.tpl"), &queries).unwrap();

    let check = negbio(
        dir,
        &[
            "check",
            "--db",
            "db.ndb",
            "--query",
            "queries.tpl",
            "--format",
            "machine",
        ],
    );
    let oracle = negbio(
        dir,
        &[
            "oracle",
            "--templates",
            "refs.tpl",
            "--query",
            "queries.tpl",
            "--params",
            "db.ndb.params",
            "--format",
            "machine",
        ],
    );
    let via_lsh = negbio(
        dir,
        &[
            "oracle",
            "--templates",
            "refs.tpl",
            "--query",
            "queries.tpl",
            "--lsh",
            "family.lsh",
            "--m",
            "2",
            "--format",
            "machine",
        ],
    );
    assert_eq!(check.stdout.lines().count(), 200);
    assert_eq!(check.stdout, oracle.stdout);
    assert_eq!(check.stdout, via_lsh.stdout);
    assert_eq!(check.code, oracle.code);

    let reject = check
        .stdout
        .lines()
        .position(|l| l == "REJECT")
        .expect("some query rejects");
    let idx = reject.to_string();
    let single = negbio(
        dir,
        &[
            "check",
            "--db",
            "db.ndb",
            "--query",
            "queries.tpl",
            "--index",
            &idx,
            "--format",
            "machine",
        ],
    );
    assert_eq!((single.code, single.stdout.as_str()), (1, "REJECT\n"));
    let human = negbio(
        dir,
        &[
            "check",
            "--db",
            "db.ndb",
            "--query",
            "queries.tpl",
            "--index",
            &idx,
        ],
    );
    assert!(
        human
            .stdout
            .starts_with("REJECT  (28 of 28 combinations tested)"),
        "{}",
        human.stdout
    );
}

#[test]
fn empty_enrollment_always_rejects() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    fs::write(dir.join("none.tpl"), "TPL v1 n=64\n").unwrap();
    ok(
        dir,
        &[
            "gen", "--n", "64", "--N", "20", "--seed", "2", "--out", "q.tpl",
        ],
    );
    let out = negbio(
        dir,
        &[
            "oracle",
            "--templates",
            "none.tpl",
            "--query",
            "q.tpl",
            "--L",
            "8",
            "--w",
            "3",
            "--m",
            "2",
            "--format",
            "machine",
        ],
    );
    assert_eq!(out.code, 1);
    assert!(out.stdout.lines().all(|l| l == "REJECT"));
    ok(
        dir,
        &[
            "build",
            "--templates",
            "none.tpl",
            "--L",
            "8",
            "--w",
            "3",
            "--m",
            "2",
            "--out",
            "db.ndb",
        ],
    );
    let out = negbio(
        dir,
        &[
            "check", "--db", "db.ndb", "--query", "q.tpl", "--format", "machine",
        ],
    );
    assert_eq!(out.code, 1);
    assert_eq!(out.stdout, "REJECT\n".repeat(20));
}

#[test]
fn iris_scale_build_is_refused() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    ok(
        dir,
        &["gen", "--n", "2048", "--N", "1", "--out", "iris.tpl"],
    );
    let out = negbio(
        dir,
        &[
            "build",
            "--templates",
            "iris.tpl",
            "--L",
            "128",
            "--w",
            "10",
            "--m",
            "4",
            "--out",
            "db.ndb",
        ],
    );
    assert_eq!(out.code, 3);
    assert!(out.stderr.contains("10668000 chains"), "{}", out.stderr);
    assert!(out.stderr.contains("predict"));
    assert!(!dir.join("db.ndb").exists());
    let small = negbio(
        dir,
        &[
            "build",
            "--templates",
            "iris.tpl",
            "--L",
            "16",
            "--w",
            "10",
            "--m",
            "2",
            "--budget",
            "100",
            "--out",
            "db.ndb",
        ],
    );
    assert_eq!(small.code, 3);
}

#[test]
fn enrollment_revocation_and_blacklist() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    toy(dir);
    let machine = ["--format", "machine"];
    let check = |args: &[&str]| {
        let mut a = vec!["check", "--db", "db.ndb"];
        a.extend_from_slice(args);
        a.extend_from_slice(&machine);
        negbio(dir, &a)
    };

    // enrollment
    ok(
        dir,
        &[
            "gen", "--n", "64", "--N", "1", "--seed", "99", "--out", "new.tpl",
        ],
    );
    ok(dir, &["enroll", "--db", "db.ndb", "--templates", "new.tpl"]);
    assert_eq!(check(&["--query", "new.tpl"]).stdout, "ACCEPT 0,1\n");
    assert_eq!(
        Sidecar::parse(&read(dir, "db.ndb.params"))
            .unwrap()
            .enrolled_count,
        6
    );

    // the same result as building from scratch
    let mut all = read(dir, "refs.tpl");
    all.push_str(read(dir, "new.tpl").lines().nth(1).unwrap());
    all.push('\n');
    fs::write(dir.join("all.tpl"), &all).unwrap();
    ok(
        dir,
        &[
            "build",
            "--templates",
            "all.tpl",
            "--L",
            "8",
            "--w",
            "3",
            "--m",
            "2",
            "--seed",
            "1",
            "--out",
            "fresh.ndb",
        ],
    );
    ok(
        dir,
        &[
            "gen", "--n", "64", "--N", "100", "--seed", "5", "--out", "q.tpl",
        ],
    );
    let a = check(&["--query", "q.tpl"]);
    let b = negbio(
        dir,
        &[
            "check",
            "--db",
            "fresh.ndb",
            "--query",
            "q.tpl",
            "--format",
            "machine",
        ],
    );
    assert_eq!(a.stdout, b.stdout);

    // revocation through a blacklist created from the main database
    let one = format!(
        "TPL v1 n=64\n{}\n",
        read(dir, "refs.tpl").lines().nth(3).unwrap()
    );
    fs::write(dir.join("revoked.tpl"), one).unwrap();
    assert_eq!(
        negbio(
            dir,
            &[
                "revoke",
                "--blacklist",
                "black.ndb",
                "--templates",
                "revoked.tpl"
            ]
        )
        .code,
        2
    );
    ok(
        dir,
        &[
            "revoke",
            "--blacklist",
            "black.ndb",
            "--templates",
            "revoked.tpl",
            "--main",
            "db.ndb",
        ],
    );
    assert_eq!(
        Sidecar::parse(&read(dir, "black.ndb.params"))
            .unwrap()
            .enrolled_count,
        1
    );

    assert_eq!(check(&["--query", "refs.tpl", "--index", "2"]).code, 0);
    let banned = check(&[
        "--query",
        "refs.tpl",
        "--index",
        "2",
        "--blacklist",
        "black.ndb",
    ]);
    assert_eq!((banned.code, banned.stdout.as_str()), (1, "REJECT\n"));

    // other users pass unless they share a chain with the revoked capture
    let (_, refs) = parse_templates(&read(dir, "refs.tpl")).unwrap();
    let params = Sidecar::parse(&read(dir, "db.ndb.params"))
        .unwrap()
        .params()
        .unwrap();
    for i in [0usize, 1, 3, 4] {
        let shared = oracle_authorize(&refs[2..3], params.family(), 2, &refs[i])
            .unwrap()
            .is_accept();
        let out = check(&[
            "--query",
            "refs.tpl",
            "--index",
            &i.to_string(),
            "--blacklist",
            "black.ndb",
        ]);
        assert_eq!(out.code, if shared { 1 } else { 0 }, "user {i}");
    }

    // a blacklist with other parameters is refused
    ok(
        dir,
        &[
            "build",
            "--templates",
            "refs.tpl",
            "--L",
            "8",
            "--w",
            "3",
            "--m",
            "2",
            "--seed",
            "2",
            "--out",
            "other.ndb",
        ],
    );
    let bad = check(&[
        "--query",
        "refs.tpl",
        "--index",
        "0",
        "--blacklist",
        "other.ndb",
    ]);
    assert_eq!(bad.code, 2);
}

#[test]
fn authentication_and_identification() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    ok(
        dir,
        &[
            "gen", "--n", "64", "--N", "5", "--seed", "7", "--out", "refs.tpl",
        ],
    );
    ok(
        dir,
        &[
            "build",
            "--auth",
            "--templates",
            "refs.tpl",
            "--L",
            "8",
            "--w",
            "3",
            "--m",
            "2",
            "--seed",
            "1",
            "--out",
            "auth.ndb",
        ],
    );
    assert!(read(dir, "auth.ndb").starts_with("NDB v1 l=12 tagged=1\n"));

    let auth = |claim: &str, index: &str| {
        negbio(
            dir,
            &[
                "auth", "--db", "auth.ndb", "--query", "refs.tpl", "--index", index, "--claim",
                claim, "--format", "machine",
            ],
        )
    };
    let out = auth("1", "1");
    assert_eq!((out.code, out.stdout.as_str()), (0, "ACCEPT 0,1\n"));
    assert_eq!(auth("9", "1").code, 4);
    assert_eq!(auth("x", "1").code, 2);

    let (_, refs) = parse_templates(&read(dir, "refs.tpl")).unwrap();
    let params = Sidecar::parse(&read(dir, "auth.ndb.params"))
        .unwrap()
        .params()
        .unwrap();
    for k in 0..5usize {
        let out = negbio(
            dir,
            &[
                "identify",
                "--db",
                "auth.ndb",
                "--query",
                "refs.tpl",
                "--index",
                &k.to_string(),
                "--format",
                "machine",
            ],
        );
        assert_eq!(out.code, 0);
        let expected: Vec<String> = (0..5)
            .filter(|&j| {
                oracle_authorize(&refs[j..j + 1], params.family(), 2, &refs[k])
                    .unwrap()
                    .is_accept()
            })
            .map(|j| j.to_string())
            .collect();
        assert!(expected.contains(&k.to_string()));
        assert_eq!(out.stdout, format!("IDENTIFIED {}\n", expected.join(",")));
        for claim in 0..5usize {
            let code = auth(&claim.to_string(), &k.to_string()).code;
            assert_eq!(
                code,
                if expected.contains(&claim.to_string()) {
                    0
                } else {
                    1
                }
            );
        }
    }

    ok(
        dir,
        &[
            "gen", "--n", "64", "--N", "1", "--seed", "42", "--out", "new.tpl",
        ],
    );
    let out = ok(
        dir,
        &[
            "enroll",
            "--db",
            "auth.ndb",
            "--templates",
            "new.tpl",
            "--format",
            "machine",
        ],
    );
    assert_eq!(out.stdout, "USER 5\n");
    let out = negbio(
        dir,
        &[
            "auth", "--db", "auth.ndb", "--query", "new.tpl", "--claim", "5",
        ],
    );
    assert_eq!(out.code, 0);

    // a tagged database is not an authorization database
    assert_eq!(
        negbio(dir, &["check", "--db", "auth.ndb", "--query", "refs.tpl"]).code,
        2
    );
    assert_eq!(
        negbio(
            dir,
            &[
                "build",
                "--auth",
                "--variant",
                "deterministic",
                "--templates",
                "refs.tpl",
                "--L",
                "8",
                "--w",
                "3",
                "--m",
                "2",
                "--out",
                "x.ndb"
            ]
        )
        .code,
        2
    );
}

#[test]
fn maintenance_keeps_verdicts() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    ok(
        dir,
        &[
            "gen", "--n", "64", "--N", "5", "--seed", "7", "--out", "refs.tpl",
        ],
    );
    ok(
        dir,
        &[
            "build",
            "--templates",
            "refs.tpl",
            "--L",
            "8",
            "--w",
            "3",
            "--m",
            "2",
            "--variant",
            "randomized",
            "--out",
            "db.ndb",
        ],
    );
    ok(
        dir,
        &[
            "build",
            "--auth",
            "--templates",
            "refs.tpl",
            "--L",
            "8",
            "--w",
            "3",
            "--m",
            "2",
            "--out",
            "auth.ndb",
        ],
    );
    ok(
        dir,
        &[
            "gen",
            "--genuine-of",
            "refs.tpl",
            "--epsilon",
            "0.25",
            "--out",
            "q1.tpl",
        ],
    );
    ok(
        dir,
        &[
            "gen",
            "--impostors",
            "--n",
            "64",
            "--N",
            "30",
            "--out",
            "q2.tpl",
        ],
    );
    let verdicts = |q: &str| {
        let a = negbio(
            dir,
            &[
                "check", "--db", "db.ndb", "--query", q, "--format", "machine",
            ],
        )
        .stdout;
        let b = negbio(
            dir,
            &[
                "identify", "--db", "auth.ndb", "--query", q, "--format", "machine",
            ],
        )
        .stdout;
        a + &b
    };
    let before = verdicts("q1.tpl") + &verdicts("q2.tpl");
    let original = read(dir, "db.ndb");

    ok(dir, &["cleanup", "--db", "db.ndb"]);
    ok(dir, &["cleanup", "--db", "auth.ndb"]);
    assert_eq!(verdicts("q1.tpl") + &verdicts("q2.tpl"), before);
    let cleaned = read(dir, "db.ndb");
    assert!(cleaned.lines().count() <= original.lines().count());

    ok(
        dir,
        &["morph", "--db", "db.ndb", "--rounds", "50", "--seed", "3"],
    );
    ok(
        dir,
        &["morph", "--db", "auth.ndb", "--rounds", "50", "--seed", "3"],
    );
    assert_eq!(verdicts("q1.tpl") + &verdicts("q2.tpl"), before);
    assert_ne!(read(dir, "db.ndb"), cleaned);
}

#[test]
fn flags_and_sidecar_must_agree() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    toy(dir);
    let same = negbio(
        dir,
        &[
            "check", "--db", "db.ndb", "--query", "refs.tpl", "--L", "8", "--seed", "1",
        ],
    );
    assert_eq!(same.code, 0);
    let clash = negbio(
        dir,
        &["check", "--db", "db.ndb", "--query", "refs.tpl", "--L", "9"],
    );
    assert_eq!(clash.code, 2);
    assert!(clash.stderr.contains("conflicts"), "{}", clash.stderr);

    // a sidecar that does not describe the database
    let side = read(dir, "db.ndb.params").replace("w=3", "w=4");
    fs::write(dir.join("db.ndb.params"), side).unwrap();
    assert_eq!(
        negbio(dir, &["check", "--db", "db.ndb", "--query", "refs.tpl"]).code,
        2
    );
    fs::write(dir.join("broken.ndb"), "NDB v1 l=12 tagged=0\n01*\n").unwrap();
    assert_eq!(negbio(dir, &["cleanup", "--db", "broken.ndb"]).code, 2);
}

#[test]
fn config_file_supplies_defaults() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    toy(dir);
    let config = dir.join("negbio.conf");
    fs::write(&config, "L=8\nw=3\nm=2\nseed=1\nformat=machine\n").unwrap();
    let out = negbio_env(
        dir,
        &["build", "--templates", "refs.tpl", "--out", "c.ndb"],
        Some(&config),
    );
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(read(dir, "c.ndb"), read(dir, "db.ndb"));
    assert_eq!(read(dir, "c.ndb.params"), read(dir, "db.ndb.params"));
    let out = negbio_env(
        dir,
        &[
            "check", "--db", "c.ndb", "--query", "refs.tpl", "--index", "0",
        ],
        Some(&config),
    );
    assert_eq!(out.stdout, "ACCEPT 0,1\n");

    fs::write(&config, "colour=blue\n").unwrap();
    assert_eq!(negbio_env(dir, &["predict"], Some(&config)).code, 2);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [a.path(), b.path()] {
        toy(dir);
        ok(
            dir,
            &[
                "build",
                "--templates",
                "refs.tpl",
                "--L",
                "8",
                "--w",
                "3",
                "--m",
                "2",
                "--variant",
                "randomized",
                "--build-seed",
                "4",
                "--out",
                "r.ndb",
            ],
        );
        ok(
            dir,
            &[
                "build",
                "--auth",
                "--templates",
                "refs.tpl",
                "--L",
                "8",
                "--w",
                "3",
                "--m",
                "2",
                "--out",
                "auth.ndb",
            ],
        );
        ok(
            dir,
            &["morph", "--db", "r.ndb", "--rounds", "20", "--seed", "1"],
        );
    }
    for name in [
        "refs.tpl",
        "refs.tpl.manifest",
        "db.ndb",
        "db.ndb.params",
        "family.lsh",
        "r.ndb",
        "auth.ndb",
        "auth.ndb.params",
    ] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
}

#[test]
fn predict_paper_example_matches_golden() {
    let tmp = TempDir::new().unwrap();
    let out = ok(tmp.path(), &["predict", "--paper-example"]);
    let golden = include_str!("golden/predict_paper_example.txt");
    assert_eq!(out.stdout, golden);

    let machine = ok(
        tmp.path(),
        &["predict", "--paper-example", "--format", "machine"],
    )
    .stdout;
    let blocks: Vec<&str> = machine.split("\n\n").collect();
    assert_eq!(blocks.len(), 3);
    let get = |block: &str, key: &str| -> f64 {
        let v = block
            .lines()
            .find_map(|l| l.strip_prefix(&format!("{key}=")))
            .unwrap();
        v.trim_start_matches("2^").parse().unwrap()
    };
    let first = blocks[0];
    assert!((0.0558..=0.0568).contains(&get(first, "p1")));
    assert!((0.0130..=0.0140).contains(&get(first, "p2")));
    assert!((0.064..=0.068).contains(&get(first, "P_fr")));
    assert!((0.093..=0.097).contains(&get(first, "P_fa")));
    assert!((get(first, "expansion_deterministic") - 25.5).abs() <= 0.1);
    assert!((get(first, "expansion_randomized") - 31.6).abs() <= 0.1);
    assert!((get(blocks[1], "system_false_member") - 0.99996).abs() < 1e-5);
    assert_eq!(get(blocks[2], "size_deterministic_bits"), 177_583_795_200.0);
    assert!((19.0..=22.0).contains(&get(blocks[2], "size_deterministic_GiB")));
}
