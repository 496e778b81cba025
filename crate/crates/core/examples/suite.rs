use std::time::Instant;

fn main() {
    let t = Instant::now();
    let r = qem_core::run_suite(&qem_core::SuiteConfig::default()).unwrap();
    for p in &r.properties {
        println!(
            "{:32} {:5} trials={:4} worst={:e} tol={:e}",
            p.name, p.passed, p.trials, p.worst_violation, p.tolerance
        );
    }
    println!("{:?}", t.elapsed());
}
