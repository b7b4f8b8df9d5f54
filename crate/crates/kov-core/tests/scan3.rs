use kov_core::classify::*;
#[test]
fn scan_n3_full_box() {
    let t0 = std::time::Instant::now();
    let results = scan_sigma((-6, 3), (-6, 3), 3).unwrap();
    let hits: Vec<_> = results.iter().filter(|r| r.total_maximal == 3).map(|r| r.point.clone()).collect();
    eprintln!("n=3 box scan: {} points, {} hits, {:?}", results.len(), hits.len(), t0.elapsed());
    assert_eq!(hits.len(), 13);
}
