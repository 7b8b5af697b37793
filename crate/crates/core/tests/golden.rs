use std::time::Instant;

#[test]
fn worked_examples() {
    let mut failed = Vec::new();
    for case in fqx::golden::cases() {
        let t = Instant::now();
        let res = (case.run)();
        println!("{:<48} {:>8.2?} {}", case.name, t.elapsed(), res.as_ref().err().map_or("ok", String::as_str));
        if res.is_err() {
            failed.push(case.name);
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
