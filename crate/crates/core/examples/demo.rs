//! The full demo report, as printed by `flowlab demo`.

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(42);
    let report = flowlab::suite::demo(seed).expect("demo fixtures are well formed");
    for r in &report.records {
        println!("{:<8} {}", format!("{:?}", r.status).to_lowercase(), r.name);
    }
    let s = &report.summary;
    println!("{} checks: {} passed, {} failed, {} skipped", s.total, s.passed, s.failed, s.skipped);
}
