//! Extra transmissions caused by one false positive on a background stream.
//!
//! Run with: `cargo run --release --example fp_cost`

use sensegate::expctl::{inject_fp_check, Positions};
use sensegate::gate::PeriodMode;

fn main() {
    let ks: Vec<Option<u32>> = std::iter::once(None).chain((2..=8).map(Some)).collect();
    let report = inject_fp_check(16, &ks, 10_000, &Positions::All, PeriodMode::Faithful).unwrap();

    print!("{:>4}", "N");
    for k in &ks {
        match k {
            None => print!(" {:>6}", "off"),
            Some(k) => print!(" {:>6}", format!("k={k}")),
        }
    }
    println!("   2N+1");
    for n in 1..=16u32 {
        print!("{n:>4}");
        for k in &ks {
            let e = report.entries.iter().find(|e| e.n == n && e.k == *k).unwrap();
            print!(" {:>6}", e.max_extra);
        }
        println!("   {:>4}", 2 * n + 1);
    }
    println!(
        "worst case: {} extra frames; within 2N+1 everywhere: {}",
        report.max_extra(),
        report.within_bound()
    );
}
