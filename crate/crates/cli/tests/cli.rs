mod support;

use std::process::Command;

fn kleene(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_kleene"))
        .args(args)
        .current_dir(support::workspace_root())
        .output()
        .unwrap()
}

fn stdout(args: &[&str]) -> String {
    String::from_utf8(kleene(args).stdout).unwrap()
}

#[test]
fn golden_files() {
    let (count, failures) = support::run_golden();
    assert!(count >= 20);
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn documented_examples() {
    assert_eq!(stdout(&["run", "(comp succ (succ))", "3", "--fuel", "100"]), "5\n");
    assert_eq!(stdout(&["decide", "scenarios/in_at_7.scn", "--x", "4"]), "IN @7\n");
    let q = stdout(&["quine", "--fuel", "100000"]);
    assert!(q.ends_with("phi_e(0) = e: OK\n"), "{q}");
    let e = q.lines().find_map(|l| l.strip_prefix("e = ")).unwrap();
    assert_eq!(stdout(&["run", e, "0", "--fuel", "100000"]).trim(), e);
}

#[test]
fn every_flag_is_in_help() {
    let flags: &[(&str, &[&str])] = &[
        ("run", &["--fuel"]),
        ("fixpoint", &["--fuel", "--grid"]),
        ("fixpoint-param", &["--fuel", "--grid", "--codes"]),
        ("quine", &["--fuel"]),
        ("totalize", &["--psi", "--delta", "--grid", "--stage", "--fuel", "--delta-fuel"]),
        ("uniform-totalize", &["--e", "--delta", "--grid", "--stage", "--fuel", "--delta-fuel"]),
        ("probe-fpf", &["--bound", "--stage", "--fuel"]),
        ("simulate", &["--x", "--trace", "--horizon"]),
        ("decide", &["--x", "--trace", "--horizon"]),
        ("validate", &["--x", "--horizon"]),
    ];
    let top = stdout(&["--help"]);
    for (cmd, fs) in flags {
        assert!(top.contains(cmd), "{cmd} missing from --help");
        let help = stdout(&[cmd, "--help"]);
        for f in *fs {
            assert!(help.contains(f), "{cmd} --help lacks {f}");
        }
    }
}

#[test]
fn exit_codes() {
    assert_eq!(kleene(&["nonsense"]).status.code(), Some(2));
    assert_eq!(kleene(&["run"]).status.code(), Some(2));
    assert_eq!(kleene(&["decide", "scenarios/missing.scn", "--x", "1"]).status.code(), Some(1));
    assert_eq!(kleene(&["encode", "(proj 1 3)"]).status.code(), Some(1));
    assert_eq!(kleene(&["decode", "12"]).status.code(), Some(0));
}

#[test]
fn encode_decode_roundtrip() {
    for prog in ["succ", "(comp (const 9) (succ))", "(mu (proj 2 1))", "(primrec zero 0 (proj 2 1))"] {
        let code = stdout(&["encode", prog]);
        assert_eq!(stdout(&["decode", code.trim()]).trim(), prog);
    }
}
