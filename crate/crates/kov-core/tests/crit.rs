// temporary per-criterion runner
use kov_core::selftest::run_criterion;

fn check(id: u32) {
    let out = run_criterion(id, 20260809);
    eprintln!("[{}] {} ({} ms): {}", if out.passed { "PASS" } else { "FAIL" }, out.name, out.elapsed_ms, out.details);
    assert!(out.passed);
}

#[test] fn c1() { check(1) }
#[test] fn c2() { check(2) }
#[test] fn c5() { check(5) }
#[test] fn c6() { check(6) }
#[test] fn c7() { check(7) }
#[test] fn c8() { check(8) }
#[test] fn c9() { check(9) }
