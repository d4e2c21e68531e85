use std::path::Path;
use std::process::{Command, Output};
use std::sync::OnceLock;

use tempfile::TempDir;

const SYN_EQ: &str = "vtam twins relation syn
sigma { int0: a/0 ; push: f/2 ; cint1: c/2 }
gamma { h/2 }
states { q r }
final { r }
rules {
  a -> q(bot) ;
  f(q(y1), q(y2)) -> q(h(y1,y2)) ;
  c(q(y1), q(y2)) -[eq]-> r(y1) ;
}
";

const SMALL_CNF: &str = "p cnf 3 3\n1 2 0\n-1 3 0\n-2 -3 0\n";

/// Input files shared by every test, written once.
fn fixtures() -> &'static Path {
    static DIR: OnceLock<TempDir> = OnceLock::new();
    DIR.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        for name in ["balanced", "redblack"] {
            let (a, _) = vtam::build_example(name).unwrap();
            std::fs::write(
                dir.path().join(format!("{name}.vtam")),
                vtam::print_vtam(&a),
            )
            .unwrap();
        }
        std::fs::write(dir.path().join("syn_eq.vtam"), SYN_EQ).unwrap();
        std::fs::write(dir.path().join("small.cnf"), SMALL_CNF).unwrap();
        dir
    })
    .path()
}

fn ex(name: &str) -> String {
    fixtures().join(name).to_string_lossy().into_owned()
}

fn vtam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vtam"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> Vec<String> {
    String::from_utf8_lossy(&o.stdout)
        .lines()
        .map(str::to_string)
        .collect()
}

#[test]
fn balanced_witness_and_member() {
    let o = vtam(&["empty", &ex("balanced.vtam"), "--witness"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), ["false", "a"]);
    let o = vtam(&["member", &ex("balanced.vtam"), "g2(g1(a,a),g0)"]);
    assert_eq!(code(&o), 0);
    let o = vtam(&[
        "member",
        &ex("balanced.vtam"),
        "g2(g1(a,g2(g1(a,a),g0)),g0)",
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn syntactic_equality_complement_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.vtam");
    let o = vtam(&[
        "bool",
        "--op",
        "complement",
        &ex("syn_eq.vtam"),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not effectively closed under complement"));
    assert!(o.stdout.is_empty());
    assert_eq!(code(&vtam(&["universal", &ex("syn_eq.vtam")])), 3);
}

#[test]
fn det_output_rechecks_and_is_equivalent() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.vtam");
    let o = vtam(&["det", &ex("redblack.vtam"), "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(vtam::load_vtam(&text).unwrap().is_deterministic());
    assert_eq!(code(&vtam(&["check", out.to_str().unwrap()])), 0);
    assert_eq!(
        code(&vtam(&[
            "include",
            out.to_str().unwrap(),
            &ex("redblack.vtam")
        ])),
        0
    );
    assert_eq!(
        code(&vtam(&[
            "include",
            &ex("redblack.vtam"),
            out.to_str().unwrap()
        ])),
        0
    );
}

#[test]
fn boolean_operations_write_automata() {
    let dir = tempfile::tempdir().unwrap();
    let u = dir.path().join("u.vtam");
    let i = dir.path().join("i.vtam");
    let c = dir.path().join("c.vtam");
    let bal = ex("balanced.vtam");
    assert_eq!(
        code(&vtam(&[
            "bool",
            "--op",
            "union",
            &bal,
            &bal,
            "-o",
            u.to_str().unwrap()
        ])),
        0
    );
    assert_eq!(
        code(&vtam(&[
            "bool",
            "--op",
            "inter",
            &bal,
            &bal,
            "-o",
            i.to_str().unwrap()
        ])),
        0
    );
    assert_eq!(
        code(&vtam(&[
            "bool",
            "--op",
            "complement",
            &bal,
            "-o",
            c.to_str().unwrap()
        ])),
        0
    );
    assert_eq!(
        code(&vtam(&[
            "bool",
            "--op",
            "union",
            &bal,
            "-o",
            u.to_str().unwrap()
        ])),
        2
    );
    let t = "g2(g1(a,a),g0)";
    assert_eq!(code(&vtam(&["member", u.to_str().unwrap(), t])), 0);
    assert_eq!(code(&vtam(&["member", i.to_str().unwrap(), t])), 0);
    assert_eq!(code(&vtam(&["member", c.to_str().unwrap(), t])), 1);
    assert_eq!(
        code(&vtam(&[
            "member",
            c.to_str().unwrap(),
            "g2(g1(a,g2(g1(a,a),g0)),g0)"
        ])),
        0
    );
}

#[test]
fn include_prints_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("c.vtam");
    vtam(&[
        "bool",
        "--op",
        "complement",
        &ex("balanced.vtam"),
        "-o",
        c.to_str().unwrap(),
    ]);
    let o = vtam(&["include", &ex("balanced.vtam"), c.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), ["false", "a"]);
}

#[test]
fn enum_lists_accepted_terms() {
    let o = vtam(&["enum", &ex("balanced.vtam"), "--max-size", "9"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), ["a", "g2(g1(a,a),g0)"]);
}

#[test]
fn memlang_writes_tree_automaton() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.ta");
    let o = vtam(&[
        "memlang",
        &ex("balanced.vtam"),
        "qf",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), ["true"]);
    let ta = vtam::parse_ta(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let yes = vtam::parse_term_free("f(f(bot,bot),bot)").unwrap();
    let no = vtam::parse_term_free("f(bot,f(bot,bot))").unwrap();
    assert!(ta.accepts(&yes) && !ta.accepts(&no));
    assert_eq!(code(&vtam(&["memlang", &ex("balanced.vtam"), "nope"])), 2);
}

#[test]
fn sat3_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = vtam(&["sat3", &ex("small.cnf"), "-o", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let files = stdout(&o);
    assert_eq!(files.len(), 2);
    let term = std::fs::read_to_string(&files[0]).unwrap();
    assert_eq!(code(&vtam(&["member", &files[1], term.trim()])), 0);

    let unsat = dir.path().join("unsat.cnf");
    std::fs::write(&unsat, "p cnf 1 2\n1 0\n-1 0\n").unwrap();
    let o = vtam(&[
        "sat3",
        unsat.to_str().unwrap(),
        "-o",
        dir.path().to_str().unwrap(),
    ]);
    let files = stdout(&o);
    let term = std::fs::read_to_string(&files[0]).unwrap();
    assert_eq!(code(&vtam(&["member", &files[1], term.trim()])), 1);
}

#[test]
fn example_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["balanced", "redblack", "powerlist"] {
        let o = vtam(&["example", name, "-o", dir.path().to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        let files = stdout(&o);
        assert_eq!(code(&vtam(&["check", &files[0]])), 0);
        assert!(vtam::parse_ta(&std::fs::read_to_string(&files[1]).unwrap()).is_ok());
    }
    assert_eq!(
        code(&vtam(&[
            "example",
            "nope",
            "-o",
            dir.path().to_str().unwrap()
        ])),
        2
    );
}

#[test]
fn error_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.vtam");
    std::fs::write(
        &bad,
        "vtam x relation none sigma { int0: a/0 ; pop11: p/2 } gamma { h/2 } states { q } final { q }
         rules { a -> q(bot) ; p(q(h(y11,y12)), q(y2)) -> q(y12) ; }",
    )
    .unwrap();
    let o = vtam(&["check", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("visibility"));
    assert_eq!(
        code(&vtam(&[
            "check",
            dir.path().join("missing").to_str().unwrap()
        ])),
        5
    );
    assert_eq!(code(&vtam(&["member", &ex("balanced.vtam"), "g2("])), 5);
    assert_eq!(code(&vtam(&["member", &ex("balanced.vtam"), "zz"])), 5);
    assert_eq!(
        code(&vtam(&["--budget", "1", "empty", &ex("redblack.vtam")])),
        4
    );
    assert_eq!(code(&vtam(&["check", &ex("syn_eq.vtam")])), 0);
    assert_eq!(code(&vtam(&["universal", &ex("balanced.vtam")])), 1);
    assert_eq!(stdout(&vtam(&["witness", &ex("syn_eq.vtam")])), ["c(a,a)"]);
}
