use std::io::Write;
use std::process::{Command, Output, Stdio};

use fqx::fqop::{builtin, parse_operation};
use fqx::{BasisTag, Builtin};

fn fqx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fqx")).args(args).output().expect("run fqx")
}

fn fqx_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_fqx"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("run fqx");
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn builtin_osy_circular() {
    let o = fqx(&["builtin", "OSy", "--order", "2", "--basis", "circular"]);
    assert_eq!(code(&o), 0);
    let op = parse_operation(&stdout(&o)).unwrap();
    assert_eq!(op, builtin(Builtin::OSy, 2, BasisTag::Circular).unwrap());
    let want: Vec<_> = [0, 0, 0, 0, 0, 1, 1, 1].iter().map(|&x| fqx::rational::int(x)).collect();
    assert_eq!(op.table(0, 1), want);
}

#[test]
fn solve_base_system() {
    let o = fqx(&["solve", "sC+Opp+O2+CP", "--kind", "vectorial", "--order", "4"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let last = out.lines().last().unwrap();
    let row: Vec<&str> = last.split_whitespace().collect();
    assert_eq!(row, ["4", "|", "0", "0", "2", "12", "56"]);
}

#[test]
fn solve_records_are_thread_independent() {
    let a = fqx(&["--threads", "1", "solve", "Nat+vC+O2+CP", "--kind", "vectorial", "--order", "3", "--records"]);
    let b = fqx(&["--threads", "4", "solve", "Nat+vC+O2+CP", "--kind", "vectorial", "--order", "3", "--records"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("r=3 j=3 d="));
}

#[test]
fn compose_then_check_idempotent() {
    let c = fqx(&["compose", "OSy", "OSy", "--order", "3"]);
    assert_eq!(code(&c), 0);
    let o = fqx_stdin(&["check", "-", "Idempotent"], &c.stdout);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("holds up to order 3"));
}

#[test]
fn violated_property_exits_one() {
    let o = fqx(&["check", "Id", "Nat+CP"]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.contains("Nat: holds"));
    assert!(out.contains("CP: violated at order 1"));
}

#[test]
fn inconsistent_system_exits_one() {
    let o = fqx(&["solve", "vC+Pin(mixed,1,-,2)", "--kind", "vectorial", "--order", "1"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("inconsistent"));
}

#[test]
fn invert() {
    let o = fqx(&["invert", "Id", "--order", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(parse_operation(&stdout(&o)).unwrap(), builtin(Builtin::Id, 3, BasisTag::Mixed).unwrap());
    assert_eq!(code(&fqx(&["invert", "OSy"])), 1);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&fqx(&["solve", "Bogus", "--kind", "vectorial"])), 2);
    assert_eq!(code(&fqx(&["builtin", "Nope"])), 2);
    assert_eq!(code(&fqx(&["frobnicate"])), 2);
    assert_eq!(code(&fqx(&["check", "no/such/file", "Nat"])), 2);
    assert_eq!(code(&fqx(&["expand", "A1", "--kind", "vectorial"])), 2);
    assert_eq!(code(&fqx_stdin(&["transform", "-", "--to", "split"], b"kind=vectorial\nbogus\n")), 2);
}

#[test]
fn expand_and_transform() {
    let o = fqx(&["expand", "1/2*[A1,A2]", "--kind", "pseudoscalar", "--order", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(parse_operation(&stdout(&o)).unwrap(), builtin(Builtin::PseudoDet, 3, BasisTag::Mixed).unwrap());
    let t = fqx_stdin(&["transform", "-", "--to", "circular"], &o.stdout);
    let back = fqx_stdin(&["transform", "-", "--to", "mixed"], &t.stdout);
    assert_eq!(back.stdout, o.stdout);
}

#[test]
fn serialization_round_trip_through_files() {
    let dir = std::env::temp_dir().join(format!("fqx-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for name in ["One", "Id", "PseudoDet", "OSy", "OfSy", "AxisL"] {
        for order in 0..=3 {
            let o = fqx(&["builtin", name, "--order", &order.to_string(), "--basis", "split"]);
            assert_eq!(code(&o), 0);
            let path = dir.join(format!("{name}-{order}.fq"));
            std::fs::write(&path, &o.stdout).unwrap();
            let again = fqx(&["transform", path.to_str().unwrap(), "--to", "split"]);
            assert_eq!(again.stdout, o.stdout, "{name} at order {order}");
        }
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn quick_selftest_passes() {
    let o = fqx(&["selftest", "--quick"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains(" 0 failed"));
}
