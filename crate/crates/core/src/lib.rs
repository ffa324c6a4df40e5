//! Random linear network coding over line networks with arbitrary schedules.
//!
//! Three code families share one engine: dense codes, chunked codes with
//! disjoint chunks, and overlapped chunked codes whose chunks share symbols
//! with their neighbours in an end-around layout. The crate covers
//!
//! - [`gf2`]: packed GF(2) vectors, rank and solving,
//! - [`schedule`]: line-network schedules, min-cut capacity, random schedules,
//! - [`code`]: code layouts and the packet-level transfer simulation,
//! - [`decode`]: global and per-chunk terminal decoders,
//! - [`bounds`]: closed-form capacity bounds and condition diagnostics,
//! - [`experiment`]: seeded Monte-Carlo sweeps, CSV and SVG output.

pub mod bounds;
pub mod cli;
pub mod code;
pub mod decode;
pub mod experiment;
pub mod gf2;
pub mod rng;
pub mod schedule;

pub use code::{ChunkPolicy, CodeKind, CodeSpec, Packet, TerminalReport};
pub use decode::{decode_chunked, decode_global, DecodeOutcome};
pub use gf2::{BinaryMatrix, BinaryVector};
pub use schedule::{generate_schedule, Schedule, Transmission};
