//! Terminal-side decoders.
//!
//! [`decode_global`] eliminates the full `k × m` matrix of received payload
//! vectors. [`decode_chunked`] only ever eliminates one chunk's `α`-wide
//! system at a time, substituting symbols already recovered through
//! overlapping chunks, and iterates until nothing new is learned.

use crate::code::TerminalReport;
use crate::gf2::{BinaryVector, Eliminator};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub success: bool,
    /// Matrix rank for [`decode_global`]; number of recovered symbols for
    /// [`decode_chunked`], which never exceeds the matrix rank.
    pub rank: usize,
    /// Symbols the decoder pinned down, as a length-`k` indicator.
    pub decoded: BinaryVector,
    /// Recovered symbol values (payload mode only), `None` where unknown.
    pub values: Option<Vec<Option<BinaryVector>>>,
    /// Passes of the chunked decoder that recovered something; 1 for global decoding.
    pub rounds: usize,
}

impl DecodeOutcome {
    /// The full message, when decoding succeeded in payload mode.
    pub fn message(&self) -> Option<Vec<BinaryVector>> {
        if !self.success {
            return None;
        }
        self.values.as_ref()?.iter().cloned().collect()
    }

    pub fn decoded_count(&self) -> usize {
        self.decoded.count_ones()
    }
}

fn symbol_width(report: &TerminalReport) -> usize {
    report
        .packets
        .first()
        .and_then(|p| p.info.as_ref())
        .map_or(0, BinaryVector::len)
}

/// Gaussian elimination over all received columns.
///
/// Succeeds iff the rank is `k`. On failure, symbols already determined by the
/// received equations are still reported in `decoded`.
pub fn decode_global(report: &TerminalReport) -> DecodeOutcome {
    let k = report.spec.k();
    let width = symbol_width(report);
    let payload = report.has_payload();
    let mut elim = Eliminator::new(k, width);
    for p in &report.packets {
        if elim.is_full() {
            break;
        }
        elim.insert(p.global_payload(&report.spec), p.info.clone());
    }
    let rank = elim.rank();
    let success = rank == k;
    let mut decoded = BinaryVector::zeros(k);
    let mut values = payload.then(|| vec![None; k]);
    if success && !payload {
        decoded = BinaryVector::from_words(k, vec![u64::MAX; k.div_ceil(64)]);
    } else {
        elim.reduce();
        for (i, v) in elim.pinned() {
            decoded.set(i, true);
            if let Some(vals) = values.as_mut() {
                vals[i] = Some(v.clone());
            }
        }
    }
    DecodeOutcome {
        success,
        rank,
        decoded,
        values,
        rounds: 1,
    }
}

/// Iterative per-chunk decoding with cross-chunk substitution.
///
/// Each pass visits chunks in index order. A chunk's equations are restricted to
/// its still-unknown symbols, eliminated locally, and every unknown the reduced
/// system pins down is marked decoded. Chunks whose known set has not changed
/// since their last visit are skipped, which does not alter the fixpoint or the
/// pass count. Stops when all symbols are known or a pass recovers nothing.
pub fn decode_chunked(report: &TerminalReport) -> DecodeOutcome {
    let spec = &report.spec;
    let (k, q, alpha) = (spec.k(), spec.q(), spec.aperture());
    let width = symbol_width(report);
    let payload = report.has_payload();

    let mut by_chunk: Vec<Vec<usize>> = vec![Vec::new(); q];
    for (i, p) in report.packets.iter().enumerate() {
        by_chunk[p.chunk].push(i);
    }

    let mut decoded = BinaryVector::zeros(k);
    let mut values: Vec<Option<BinaryVector>> = vec![None; k];
    let mut known = 0usize;
    let mut dirty: Vec<bool> = by_chunk.iter().map(|c| !c.is_empty()).collect();
    let mut rounds = 0;

    while known < k {
        let mut progress = false;
        for chunk in 0..q {
            if !dirty[chunk] {
                continue;
            }
            dirty[chunk] = false;
            let start = spec.chunk_start(chunk);
            let mut local_known = BinaryVector::zeros(alpha);
            for j in 0..alpha {
                if decoded.get((start + j) % k) {
                    local_known.set(j, true);
                }
            }
            let unknown = alpha - local_known.count_ones();
            if unknown == 0 {
                continue;
            }

            let mut elim = Eliminator::new(alpha, width);
            for &pi in &by_chunk[chunk] {
                let packet = &report.packets[pi];
                let mut coeffs = packet.coeffs.clone();
                let mut rhs = packet.info.clone();
                let hit = coeffs.and(&local_known).expect("aperture-length vectors");
                for j in hit.ones() {
                    coeffs.set(j, false);
                    if let Some(y) = rhs.as_mut() {
                        let v = values[(start + j) % k].as_ref().expect("decoded symbols carry values in payload mode");
                        y.xor_assign(v).expect("symbols share width");
                    }
                }
                elim.insert(coeffs, rhs);
                if elim.rank() == unknown {
                    break;
                }
            }
            elim.reduce();

            let newly: Vec<(usize, BinaryVector)> = elim.pinned().map(|(j, v)| (j, v.clone())).collect();
            for (j, v) in newly {
                let g = (start + j) % k;
                debug_assert!(!decoded.get(g));
                decoded.set(g, true);
                known += 1;
                if payload {
                    values[g] = Some(v);
                }
                progress = true;
                for other in spec.chunks_containing(g) {
                    if other != chunk && !by_chunk[other].is_empty() {
                        dirty[other] = true;
                    }
                }
            }
        }
        if !progress {
            break;
        }
        rounds += 1;
    }

    DecodeOutcome {
        success: known == k,
        rank: known,
        decoded,
        values: payload.then_some(values),
        rounds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{encode_symbol, random_message, simulate, ChunkPolicy, CodeSpec, Packet, TerminalReport};
    use crate::rng::stream;
    use crate::schedule::generate_schedule;

    fn bv(s: &str) -> BinaryVector {
        BinaryVector::parse_bits(s).unwrap()
    }

    fn report(spec: CodeSpec, packets: &[(usize, &str)], message: Option<&[BinaryVector]>) -> TerminalReport {
        let packets = packets
            .iter()
            .map(|&(chunk, c)| {
                let coeffs = bv(c);
                let info = message.map(|m| encode_symbol(m, &spec.lift(chunk, &coeffs)));
                Packet { chunk, coeffs, info }
            })
            .collect();
        TerminalReport { spec, packets, wasted_slots: 0 }
    }

    #[test]
    fn basis_columns_decode() {
        let spec = crate::code::CodeSpec::dense(4).unwrap();
        let r = report(spec, &[(0, "1000"), (0, "0100"), (0, "0010"), (0, "0001")], None);
        let out = decode_global(&r);
        assert!(out.success);
        assert_eq!(out.rank, 4);
    }

    #[test]
    fn too_few_columns_fail() {
        let spec = crate::code::CodeSpec::dense(4).unwrap();
        let r = report(spec, &[(0, "1100"), (0, "0110")], None);
        let out = decode_global(&r);
        assert!(!out.success);
        assert!(out.rank <= 2);
        assert!(!decode_chunked(&r).success);
    }

    #[test]
    fn disjoint_chunks_decode_in_one_round() {
        let spec = CodeSpec::chunked(4, 2).unwrap();
        let msg = random_message(4, 3, &mut stream(1, 2));
        let r = report(spec, &[(0, "11"), (1, "10"), (0, "01"), (1, "11")], Some(&msg));
        let out = decode_chunked(&r);
        assert!(out.success);
        assert_eq!(out.rounds, 1);
        assert_eq!(out.message().unwrap(), msg);
    }

    #[test]
    fn overlap_substitution_takes_two_rounds() {
        // k=8, q=4, tau=2: chunks {0..3}, {2..5}, {4..7}, {6,7,0,1}.
        // Chunk 0 is full rank; chunk 3 then resolves 6 and 7 through the
        // shared 0 and 1; chunk 2 needs 6 and 7, so only completes next pass.
        let spec = CodeSpec::overlapped(8, 4, 2).unwrap();
        let msg = random_message(8, 4, &mut stream(2, 2));
        let r = report(
            spec,
            &[
                (0, "1000"), (0, "1100"), (0, "0110"), (0, "0011"),
                (3, "1110"), (3, "0101"),
                (2, "1011"), (2, "0111"),
            ],
            Some(&msg),
        );
        let global = decode_global(&r);
        assert!(global.success);
        let out = decode_chunked(&r);
        assert!(out.success);
        assert_eq!(out.rounds, 2);
        assert_eq!(out.message().unwrap(), msg);
        assert_eq!(global.message().unwrap(), msg);
    }

    #[test]
    fn partial_forwarding_pins_unit_rows() {
        // Chunk 0 sees x0 and x1^x2 only: x0 is pinned even without full rank.
        let spec = CodeSpec::chunked(4, 1).unwrap();
        let r = report(spec, &[(0, "1000"), (0, "0110")], None);
        let out = decode_chunked(&r);
        assert!(!out.success);
        assert_eq!(out.decoded, bv("1000"));
    }

    #[test]
    fn global_can_succeed_where_chunked_is_stuck() {
        // Every chunk holds only two equations over four unknowns, none of them
        // unit, but together they span all eight symbols.
        let spec = CodeSpec::overlapped(8, 4, 2).unwrap();
        let r = report(
            spec,
            &[
                (0, "1100"), (0, "0110"),
                (1, "1100"), (1, "0110"),
                (2, "1100"), (2, "0110"),
                (3, "1100"), (3, "0111"),
            ],
            None,
        );
        let global = decode_global(&r);
        let chunked = decode_chunked(&r);
        assert!(global.success, "rank {}", global.rank);
        assert!(!chunked.success);
        assert_eq!(chunked.rank, 0);
    }

    #[test]
    fn dense_decoders_coincide() {
        for seed in 0..40 {
            let spec = CodeSpec::dense(16).unwrap();
            let n = 14 + (seed as usize % 6);
            let schedule = generate_schedule(2, n, &mut stream(seed, 0)).unwrap();
            let msg = random_message(16, 2, &mut stream(seed, 2));
            let r = simulate(&spec, &schedule, ChunkPolicy::UniformAll, Some(&msg), &mut stream(seed, 1));
            let (g, c) = (decode_global(&r), decode_chunked(&r));
            assert_eq!(g.success, c.success);
            assert_eq!(g.decoded, c.decoded);
            assert_eq!(g.values, c.values);
        }
    }

    #[test]
    fn chunked_is_sound_and_never_wrong() {
        for seed in 0..200 {
            let spec = [
                CodeSpec::chunked(32, 4).unwrap(),
                CodeSpec::overlapped(32, 8, 2).unwrap(),
                CodeSpec::overlapped(32, 16, 4).unwrap(),
            ][seed as usize % 3];
            let n = 30 + (seed as usize % 20);
            let schedule = generate_schedule(1 + (seed % 3) as u32, n, &mut stream(seed, 0)).unwrap();
            let msg = random_message(32, 3, &mut stream(seed, 2));
            let r = simulate(&spec, &schedule, ChunkPolicy::UniformAll, Some(&msg), &mut stream(seed, 1));
            let (g, c) = (decode_global(&r), decode_chunked(&r));
            if c.success {
                assert!(g.success);
                assert_eq!(c.message(), g.message());
            }
            assert!(c.rank <= g.rank);
            let vals = c.values.as_ref().unwrap();
            for i in c.decoded.ones() {
                assert_eq!(vals[i].as_ref().unwrap(), &msg[i]);
            }
            if g.success {
                assert_eq!(g.message().unwrap(), msg);
            }
        }
    }

    #[test]
    fn more_columns_never_lose_information() {
        for seed in 0..60 {
            let spec = CodeSpec::overlapped(32, 8, 2).unwrap();
            let schedule = generate_schedule(2, 40, &mut stream(seed, 0)).unwrap();
            let mut r = simulate(&spec, &schedule, ChunkPolicy::UniformAll, None, &mut stream(seed, 1));
            let full = (decode_global(&r), decode_chunked(&r));
            let cut = r.packets.len() * 2 / 3;
            r.packets.truncate(cut);
            let part = (decode_global(&r), decode_chunked(&r));
            assert!(part.0.rank <= full.0.rank);
            assert!(part.1.decoded.ones().all(|i| full.1.decoded.get(i)));
        }
    }
}
