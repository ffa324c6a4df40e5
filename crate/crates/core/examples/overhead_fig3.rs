//! CC against OCC with aperture 16 on a single link: overhead at p = 0.9.

use chunknet::experiment::{fig3, grid, overhead, run_sweep, StopRule};

fn trials() -> u64 {
    std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20)
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = fig3(1);
    cfg.stop_rule = StopRule::Fixed(trials());
    cfg.n_grid = grid(1280, 2304, 64);
    let table = run_sweep(&cfg)?;
    let cc = overhead(&table, "CC-q64", 1, 0.9);
    println!("CC-q64 overhead {cc:?}");
    for label in table.labels().into_iter().skip(1) {
        let o = overhead(&table, &label, 1, 0.9);
        let ratio = o.zip(cc).map(|(o, c)| o as f64 / c as f64);
        println!("{label:<16} overhead {o:?} ratio {ratio:.2?}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
