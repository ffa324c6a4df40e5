//! Full-rank failure of aperture-restricted random matrices against 2^-(n-k).

use chunknet::experiment::aperture_rank_experiment;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let k = 64;
    println!("{:<20} {:>4} {:>10} {:>10}", "code", "n-k", "failure", "2^-(n-k)");
    for (q, tau) in [(1, 1), (8, 4), (8, 1)] {
        for extra in [4, 8] {
            let r = aperture_rank_experiment(k, q, tau, k + extra, 4000, false, 7)?;
            println!(
                "{:<20} {extra:>4} {:>10.5} {:>10.5}",
                r.spec.label(),
                r.failure_rate(),
                r.reference()
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
