use std::process::{Command, Output};

fn loebarena(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_loebarena"));
    cmd.args(args).env_remove("LOEBARENA_THREADS");
    if let Some(t) = threads {
        cmd.env("LOEBARENA_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

#[test]
fn duel_prints_outcome() {
    let out = loebarena(&["duel", "CUPOD", "DB"], None);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "CUPOD vs DB: (D,D)\n");
}

#[test]
fn output_is_independent_of_thread_count() {
    let runs = [
        &["tournament", "CB, DB, CUPOD, DUPOC, PrudentBot", "--format", "json"][..],
        &["sample", "--q", "0.8", "--mode", "anti-comonotone", "--n", "20000", "--seed", "9"],
        &["bounded-duel", "CUPOD", "DB", "--enum", "lex", "--budget", "2"],
    ];
    for args in runs {
        let one = loebarena(args, Some("1"));
        let four = loebarena(args, Some("4"));
        assert!(one.status.success(), "{args:?}");
        assert_eq!(one.stdout, four.stdout, "{args:?}");
    }
}

#[test]
fn invalid_thread_count_is_a_usage_error() {
    let out = loebarena(&["duel", "CB", "DB"], Some("zero"));
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn exit_codes_follow_error_kind() {
    assert_eq!(loebarena(&["duel", "CB", "NoSuchBot"], None).status.code(), Some(2));
    assert_eq!(loebarena(&["eval", "p := p"], None).status.code(), Some(3));
    assert_eq!(loebarena(&["sample", "--q", "1.5"], None).status.code(), Some(2));
    assert_eq!(loebarena(&["frobnicate"], None).status.code(), Some(2));
}
