//! Runs the full acceptance matrix with the default seed and prints one line per
//! criterion. Exits nonzero if any criterion fails.

use std::time::Instant;

use snl_cli::acceptance::{criterion, NAMES};

fn main() {
    // `cargo test -- <filter>` passes the filter through; honour a criterion name
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (id, name) in NAMES.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = criterion(id, 0);
        ran += 1;
        failed += usize::from(!o.passed);
        println!(
            "{} {:>2} {:<12} {:>5} cases {:>3} failures {:>6.1}s  {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.name,
            o.cases,
            o.failures,
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
