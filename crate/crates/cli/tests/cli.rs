use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn flowmc(args: &[&str], stdin: Option<&[u8]>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_flowmc"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or_default()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("flowmc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn switch_failure_instance_verifies() {
    let inst = flowmc(&["bench", "sf", "--n", "3"], None);
    assert_eq!(code(&inst), 0);
    let out = flowmc(&["check", "--engine", "explicit"], Some(&inst.stdout));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out).lines().next(), Some("verdict: verified"));
}

#[test]
fn update_pipeline_is_refuted_by_the_bounded_engine() {
    let inst = flowmc(&["bench", "rp", "--n1", "1", "--n2", "1", "--version", "U"], None);
    let out = flowmc(&["check", "--engine", "bmc", "--bound", "30"], Some(&inst.stdout));
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.starts_with("verdict: counterexample\n"));
    assert!(text.contains("oracle confirmed: true"), "{text}");
}

#[test]
fn bounded_engine_without_a_violation_is_inconclusive() {
    let inst = flowmc(&["bench", "sf", "--n", "2"], None);
    let out = flowmc(&["check", "--engine", "bmc", "--bound", "4"], Some(&inst.stdout));
    assert_eq!(code(&out), 2);
    assert_eq!(stdout(&out).trim(), "verdict: inconclusive");
}

#[test]
fn malformed_net_is_an_error() {
    let out = flowmc(&["check", "--formula", "A F a"], Some(b".place a init\n.transition t\n.flow t : a -> zz\n"));
    assert!(code(&out) > 2);
    assert!(stdout(&out).is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    let bad_formula = flowmc(&["check", "--formula", "A F ("], Some(b".place a init\n"));
    assert!(code(&bad_formula) > 2);
    let unknown_flag = flowmc(&["check", "--frobnicate"], None);
    assert!(code(&unknown_flag) > 2);
}

#[test]
fn formula_flag_overrides_the_instance() {
    let inst = flowmc(&["bench", "sf", "--n", "3"], None);
    let out = flowmc(&["check", "--formula", "A F p3"], Some(&inst.stdout));
    assert_eq!(code(&out), 1, "without fairness a flow can stay put");
}

#[test]
fn bench_output_is_deterministic_and_can_go_to_a_file() {
    let a = flowmc(&["bench", "ru", "--switches", "5", "--seed", "3", "--variant", "F"], None);
    let b = flowmc(&["bench", "ru", "--switches", "5", "--seed", "3", "--variant", "F"], None);
    assert_eq!(a.stdout, b.stdout);
    let path = std::env::temp_dir().join(format!("flowmc-cli-out-{}.net", std::process::id()));
    let c = flowmc(&["bench", "--out", path.to_str().unwrap(), "ru", "--switches", "5", "--seed", "3", "--variant", "F"], None);
    assert_eq!(code(&c), 0);
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
    let check = flowmc(&["check", "--net", path.to_str().unwrap()], None);
    assert_eq!(code(&check), 1);
    assert!(code(&flowmc(&["bench", "rp", "--n1", "1", "--n2", "1", "--version", "Z"], None)) > 2);
}

#[test]
fn transform_and_aiger_outputs() {
    let inst = flowmc(&["bench", "sf", "--n", "3"], None);
    let t = flowmc(&["transform"], Some(&inst.stdout));
    assert_eq!(code(&t), 0);
    let text = stdout(&t);
    assert!(text.contains(".place act@o init"), "{text}");
    assert!(text.lines().any(|l| l.starts_with("# ltl ")));
    let a = flowmc(&["aiger"], Some(&inst.stdout));
    let header: Vec<usize> = stdout(&a)
        .lines()
        .next()
        .unwrap()
        .split_whitespace()
        .skip(1)
        .map(|x| x.parse().unwrap())
        .collect();
    // M = I + L + A, and the reduced SF/3 net has 15 places, so 17 latches
    assert_eq!(header[0], header[1] + header[2] + header[4]);
    assert_eq!(header[2], 17);
}

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn encode(update: &str, requirement: &str) -> Output {
    let (top, cfg, upd) = (fixture("topology.txt"), fixture("config.txt"), fixture(update));
    let args = [
        "sdn", "encode", "--topology", &top, "--config", &cfg, "--update", &upd, "--requirement", requirement,
    ];
    flowmc(&args, None)
}

#[test]
fn sdn_encoding_of_the_motivating_example() {
    let wrong = encode("update_wrong_order.txt", "loop-freedom");
    assert_eq!(code(&wrong), 0, "{}", String::from_utf8_lossy(&wrong.stderr));
    assert!(stdout(&wrong).contains(".place update_start init"));
    assert_eq!(code(&flowmc(&["check"], Some(&wrong.stdout))), 1);
    for req in ["loop-freedom", "connectivity"] {
        let right = encode("update.txt", req);
        assert_eq!(code(&flowmc(&["check"], Some(&right.stdout))), 0, "{req}");
    }
}

#[test]
fn sdn_input_errors_are_reported() {
    let top = scratch("top.txt", "switches = {a, b};\nconnections = {a - c};\n");
    let cfg = fixture("config.txt");
    let out = flowmc(&["sdn", "encode", "--topology", top.to_str().unwrap(), "--config", &cfg], None);
    assert!(code(&out) > 2);
}

#[test]
fn report_is_a_sorted_tsv() {
    let out = flowmc(&["report", "--jobs", "3"], None);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "benchmark\tparams\t#S\t|P|\t|T|\t|phi|\t|P>|\t|T>|\t|phi'|\tlatches\tgates\tseconds\tengine\tverdict"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split('\t').collect()).collect();
    let keys: Vec<(&str, &str)> = rows.iter().map(|r| (r[0], r[1])).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    let sf3 = rows.iter().find(|r| r[0] == "SF" && r[1] == "3").unwrap();
    assert_eq!((sf3[3], sf3[4], sf3[13]), ("4", "5", "✓"));
    let u = rows.iter().find(|r| r[0] == "RP" && r[1] == "1/1/U").unwrap();
    assert_eq!((u[3], u[4], u[13]), ("6", "9", "✗"));
}
