//! Decoding probability of DC, CC and OCC on a line of length 4, few trials.
//!
//! `cargo run --release --example sweep_fig2 -- 200` for a smoother curve.

use chunknet::experiment::{fig2, overhead, run_sweep, StopRule};

fn trials() -> u64 {
    std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(10)
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = fig2();
    cfg.stop_rule = StopRule::Fixed(trials());
    cfg.n_grid = vec![1056, 1120, 1184, 1248, 1312];
    cfg.master_seed = 2;
    let table = run_sweep(&cfg)?;
    print!("{:>6}", "n");
    for label in table.labels() {
        print!("{label:>12}");
    }
    println!();
    for &n in &cfg.n_grid {
        print!("{n:>6}");
        for label in table.labels() {
            let p = table.series(&label, cfg.l).into_iter().find(|r| r.n == n).map(|r| r.p_hat);
            print!("{:>12.2}", p.unwrap_or(f64::NAN));
        }
        println!();
    }
    for label in table.labels() {
        println!("{label}: overhead {:?}", overhead(&table, &label, cfg.l, 0.9));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
