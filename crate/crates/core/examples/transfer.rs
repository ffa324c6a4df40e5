//! One transfer of a real message over a random schedule, with both decoders.

use chunknet::code::{random_message, simulate};
use chunknet::rng::{stream, streams};
use chunknet::{decode_chunked, decode_global, generate_schedule, ChunkPolicy, CodeSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (k, l, n) = (256, 2, 400);
    let schedule = generate_schedule(l, n, &mut stream(1, streams::SCHEDULE))?;
    let message = random_message(k, 32, &mut stream(1, streams::MESSAGE));
    for spec in [
        CodeSpec::dense(k)?,
        CodeSpec::chunked(k, 8)?,
        CodeSpec::overlapped(k, 16, 4)?,
    ] {
        let report = simulate(
            &spec,
            &schedule,
            ChunkPolicy::UniformAll,
            Some(&message),
            &mut stream(1, streams::CODING),
        );
        let global = decode_global(&report);
        let chunked = decode_chunked(&report);
        println!(
            "{:<14} received {:>3} wasted {:>2} rank {:>3} global {} chunked {} ({} rounds)",
            spec.label(),
            report.packets.len(),
            report.wasted_slots,
            global.rank,
            global.success,
            chunked.success,
            chunked.rounds
        );
        if let Some(decoded) = global.message() {
            assert_eq!(decoded, message);
        }
        assert!(!chunked.success || global.success);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
