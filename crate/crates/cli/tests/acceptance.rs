//! One PASS/FAIL line per acceptance criterion.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use ncr_cli::suites::{self, SuiteConfig};
use ncr_core::granularity::{build_table, exact_g, exact_h, Padding};
use ncr_core::measures::lebesgue;
use ncr_core::selfmod::tk_enumerate;
use ncr_core::{concat_blocks, BitString, Dyadic};
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_ncr");

struct Board {
    failed: Vec<usize>,
}

impl Board {
    fn record(&mut self, n: usize, what: &str, ok: bool, note: String) {
        println!(
            "{} criterion {n:>2}: {what} [{note}]",
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            self.failed.push(n);
        }
    }
}

fn ncr(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(BIN).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn suite(name: &str) -> suites::SuiteReport {
    suites::run_suite(name, SuiteConfig::default()).expect("suite runs")
}

fn lebesgue_closed_forms() -> (bool, String) {
    let t = Instant::now();
    let mu = lebesgue();
    let h_ok = (0..=14).all(|l| exact_h(&*mu, l, 14).unwrap() == l as u64);
    let g_ok = (0..=12u64).all(|n| exact_g(&*mu, n, 14).unwrap() == n + 1);
    let secs = t.elapsed().as_secs_f64();
    (h_ok && g_ok && secs < 10.0, format!("{secs:.2}s < 10s"))
}

fn rea_worked_example() -> (bool, String) {
    let op = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/example_operator.json");
    let (code, out) = ncr(&[
        "rea",
        "demo",
        "--op",
        op.to_str().unwrap(),
        "--oracle",
        "ones",
        "--imax",
        "4",
    ]);
    let v: Value = serde_json::from_slice(&out).expect("json");
    let f: Vec<u64> = v["f"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap())
        .collect();
    let c: BitString = v["c"].as_str().unwrap().parse().unwrap();
    let blocks = concat_blocks(&[
        (true, 37),
        (false, 1),
        (true, 134),
        (false, 1),
        (false, 2),
        (true, 134),
        (false, 1),
        (true, 1),
    ]);
    (
        code == 0 && f[..4] == [37, 134, 1, 134] && blocks.is_prefix_of(&c),
        format!("f = {:?}", &f[..4]),
    )
}

fn tk_limit() -> (bool, String) {
    let table = build_table(&*lebesgue(), 64, 40).unwrap();
    let test = tk_enumerate(&table, 1, 10, Padding::Exact).unwrap();
    // geometric series: strings of length i padded to 3i+1
    let num: u64 = (0..=10u32).map(|i| 1u64 << (20 - 2 * i)).sum();
    let oracle = Dyadic::new(num.into(), 21);
    let sum = test.weight_sum();
    let gap = (&Dyadic::from_int(2) - &(sum.hi() * &Dyadic::from_int(3))).abs();
    (
        sum.is_exact() && *sum.hi() == oracle && gap < &Dyadic::pow2(-16) * &Dyadic::from_int(3),
        format!("sum = {}", sum.hi()),
    )
}

fn determinism() -> (bool, String) {
    let dir = std::env::temp_dir().join(format!("ncr-accept-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cover = dir.join("cover.json");
    let (_, bytes) = ncr(&[
        "test",
        "build-cover",
        "--level",
        "2",
        "--stream",
        "random:7",
        "--count",
        "6",
    ]);
    std::fs::write(&cover, &bytes).unwrap();
    let cover = cover.to_str().unwrap().to_string();
    let commands: Vec<Vec<&str>> = vec![
        vec!["table", "--measure", "split:7", "--depth", "12"],
        vec!["table", "--measure", "bernoulli:3/8", "--out", "csv"],
        vec![
            "test",
            "build-cover",
            "--level",
            "2",
            "--stream",
            "random:7",
            "--count",
            "6",
        ],
        vec!["test", "check-nesting", "--file", &cover],
        vec![
            "rea", "demo", "--oracle", "ones", "--imax", "4", "--out", "pretty",
        ],
        vec!["rea", "lift", "--oracle", "random:7"],
        vec!["selfmod", "build", "--stream", "random:7", "--blocks", "5"],
        vec!["selfmod", "tk", "--level", "2", "--max-len", "6"],
        vec!["selfmod", "failures", "--modulus", "exp", "--blocks", "2"],
        vec!["nscr", "classify", "--string", "100111"],
        vec!["verify", "--suite", "solovay", "--seed", "7"],
        vec![
            "verify",
            "--suite",
            "round-trips",
            "--seed",
            "7",
            "--cases",
            "20",
        ],
    ];
    let mut same = 0;
    for args in &commands {
        let a = ncr(args);
        let b = ncr(args);
        if a == b && !a.1.is_empty() {
            same += 1;
        }
    }
    std::fs::remove_dir_all(&dir).unwrap();
    (
        same == commands.len(),
        format!("{same}/{} commands byte-identical", commands.len()),
    )
}

#[test]
fn acceptance() {
    let mut board = Board { failed: Vec::new() };

    let (ok, note) = lebesgue_closed_forms();
    board.record(1, "Lebesgue h(l) = l, g(n) = n+1", ok, note);

    let r = suite("gh");
    board.record(
        2,
        "granularity laws on the measure corpus",
        r.passed,
        format!("{} violations", r.violations),
    );

    let r = suite("approx");
    board.record(
        3,
        "bounds on h_hat, g_hat and iterates",
        r.passed,
        format!("{} violations", r.violations),
    );

    let r = suite("solovay");
    board.record(
        4,
        "level-1 mass ratio below 2",
        r.passed,
        format!("{} violations", r.violations),
    );

    let r = suite("nesting");
    board.record(
        5,
        "level-4 covers nest to levels 3 and 2",
        r.passed,
        format!("{} violations", r.violations),
    );

    let (ok, note) = rea_worked_example();
    board.record(6, "rea demo reproduces the worked table", ok, note);

    let t = Instant::now();
    let r = suite("round-trips");
    let secs = t.elapsed().as_secs_f64();
    board.record(
        7,
        "decode round trips on 100 corpora each",
        r.passed && secs < 30.0,
        format!("{secs:.2}s < 30s"),
    );

    let r = suite("lift");
    board.record(
        8,
        "lifted cover certified at level 1 and covers C",
        r.passed,
        format!("{} violations", r.violations),
    );

    let r = suite("tk");
    let (ok, note) = tk_limit();
    board.record(
        9,
        "T_k partial sums within bound; Lebesgue k=1 near 2/3",
        r.passed && ok,
        note,
    );

    let r = suite("failures");
    board.record(
        10,
        "2^n modulus fails T_1 and T_2 with verified witnesses",
        r.passed,
        format!("{} violations", r.violations),
    );

    let (ok, note) = determinism();
    board.record(11, "CLI output byte-reproducible", ok, note);

    assert!(
        board.failed.is_empty(),
        "failed criteria: {:?}",
        board.failed
    );
}
