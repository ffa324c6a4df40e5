//! Schedules on a line network and their min-cut capacity.

use chunknet::rng::{stream, streams};
use chunknet::schedule::{capacity_maxflow_oracle, generate_schedule, Schedule};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let text = "l=3\n1,1\n2,2\n1,3\n3,4\n2,5\n3,6\n1,7\n2,8\n";
    let s: Schedule = text.parse()?;
    println!("{} transmissions, capacity {}", s.len(), s.capacity());
    assert_eq!(s.capacity(), capacity_maxflow_oracle(&s));

    let mut rng = stream(42, streams::SCHEDULE);
    let r = generate_schedule(4, 20, &mut rng)?;
    println!(
        "random l=4 schedule: {} transmissions for capacity {} (per link {:?})",
        r.len(),
        r.capacity(),
        (1..=4).map(|i| r.link_count(i)).collect::<Vec<_>>()
    );
    assert_eq!(r.capacity(), 20);
    assert_eq!(capacity_maxflow_oracle(&r), 20);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
