//! Capacity bounds for the three code families.

use chunknet::bounds::BoundQuery;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>5} {:>3} {:>5} {:>10} {:>10} {:>10}", "k", "l", "q", "dense", "chunked", "overlap");
    for (k, l, q) in [(1024, 1, 4), (1024, 2, 4), (1024, 4, 4), (4096, 4, 16), (1 << 16, 4, 64)] {
        let b = BoundQuery::new(k, l, q, 0.01);
        let (d, c, o) = (b.dense().n_min, b.chunked().n_min, b.overlapped().n_min);
        println!("{k:>5} {l:>3} {q:>5} {d:>10.1} {c:>10.1} {o:>10.1}");
        assert!(d < o && o < c);
    }
    let b = BoundQuery::new(1024, 4, 4, 0.01);
    println!("\n{}", b.overlapped());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
