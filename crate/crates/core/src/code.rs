//! Code families, chunk layout and the packet-level transfer simulation.
//!
//! The message has `k` symbols. A code with `q` chunks and overlap factor `τ`
//! uses stride `s = k/q` and aperture `α = τ·s`: chunk `ω` covers symbols
//! `(ω·s + j) mod k` for `j < α`, so neighbouring chunks share `γ = α − s`
//! symbols and the last chunk wraps around to the start of the message. With
//! `τ = 1` the chunks are disjoint blocks, and `q = 1` gives a single chunk
//! spanning the whole message (a dense code).
//!
//! Packets carry coefficient vectors in aperture-local coordinates. Only the
//! terminal lifts them into length-`k` payload vectors.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{xor_combine, xor_combine_packed, BinaryMatrix, BinaryVector};
use crate::rng::uniform_index;
use crate::schedule::Schedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeKind {
    #[serde(alias = "dc")]
    Dense,
    #[serde(alias = "cc")]
    Chunked,
    #[serde(alias = "occ")]
    Overlapped,
}

impl CodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Dense => "dense",
            Self::Chunked => "chunked",
            Self::Overlapped => "overlapped",
        }
    }
}

impl fmt::Display for CodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CodeKind {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dense" | "dc" => Ok(Self::Dense),
            "chunked" | "cc" => Ok(Self::Chunked),
            "overlapped" | "occ" => Ok(Self::Overlapped),
            _ => Err(SpecError::UnknownKind(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("k must be positive")]
    ZeroLength,
    #[error("chunk count q={q} must be positive and divide k={k}")]
    Indivisible { k: usize, q: usize },
    #[error("tau={tau} out of range 1..={max}")]
    TauOutOfRange { tau: usize, max: usize },
    #[error("{kind} codes require {requirement}")]
    KindMismatch { kind: CodeKind, requirement: &'static str },
    #[error("chunk {chunk} out of range for q={q}")]
    ChunkOutOfRange { chunk: usize, q: usize },
    #[error("unknown code kind `{0}`")]
    UnknownKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecWarning {
    /// `τ = q > 1`: every chunk spans the whole message.
    ChunksCoverMessage,
}

/// A validated code description. `s`, `α` and `γ` are derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeSpec {
    kind: CodeKind,
    k: usize,
    q: usize,
    tau: usize,
}

impl CodeSpec {
    pub fn new(kind: CodeKind, k: usize, q: usize, tau: usize) -> Result<Self, SpecError> {
        if k == 0 {
            return Err(SpecError::ZeroLength);
        }
        if q == 0 || !k.is_multiple_of(q) {
            return Err(SpecError::Indivisible { k, q });
        }
        match kind {
            CodeKind::Dense if q != 1 || tau != 1 => {
                return Err(SpecError::KindMismatch { kind, requirement: "q = 1 and tau = 1" })
            }
            CodeKind::Chunked if tau != 1 => {
                return Err(SpecError::KindMismatch { kind, requirement: "tau = 1" })
            }
            _ => {}
        }
        if tau == 0 || tau > q {
            return Err(SpecError::TauOutOfRange { tau, max: q });
        }
        Ok(Self { kind, k, q, tau })
    }

    pub fn dense(k: usize) -> Result<Self, SpecError> {
        Self::new(CodeKind::Dense, k, 1, 1)
    }

    pub fn chunked(k: usize, q: usize) -> Result<Self, SpecError> {
        Self::new(CodeKind::Chunked, k, q, 1)
    }

    pub fn overlapped(k: usize, q: usize, tau: usize) -> Result<Self, SpecError> {
        Self::new(CodeKind::Overlapped, k, q, tau)
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    /// `s = k / q`.
    pub fn stride(&self) -> usize {
        self.k / self.q
    }

    /// `α = τ · s`.
    pub fn aperture(&self) -> usize {
        self.tau * self.stride()
    }

    /// `γ = α − s`.
    pub fn overlap(&self) -> usize {
        self.aperture() - self.stride()
    }

    pub fn warning(&self) -> Option<SpecWarning> {
        (self.q > 1 && self.tau == self.q).then_some(SpecWarning::ChunksCoverMessage)
    }

    /// Short stable label, e.g. `DC`, `CC-q4`, `OCC-q256-t4`.
    pub fn label(&self) -> String {
        match self.kind {
            CodeKind::Dense => "DC".to_string(),
            CodeKind::Chunked => format!("CC-q{}", self.q),
            CodeKind::Overlapped => format!("OCC-q{}-t{}", self.q, self.tau),
        }
    }

    /// First symbol of chunk `chunk`; the support runs `α` symbols from here, wrapping.
    #[inline]
    pub fn chunk_start(&self, chunk: usize) -> usize {
        chunk * self.stride()
    }

    pub fn chunk_support(&self, chunk: usize) -> Result<Vec<usize>, SpecError> {
        if chunk >= self.q {
            return Err(SpecError::ChunkOutOfRange { chunk, q: self.q });
        }
        let start = self.chunk_start(chunk);
        Ok((0..self.aperture()).map(|j| (start + j) % self.k).collect())
    }

    /// Chunks whose support contains `symbol`.
    pub fn chunks_containing(&self, symbol: usize) -> impl Iterator<Item = usize> + '_ {
        let block = symbol / self.stride();
        (0..self.tau).map(move |t| (block + self.q - t) % self.q)
    }

    /// Lifts aperture-local coefficients of `chunk` to a length-`k` payload vector.
    pub fn lift(&self, chunk: usize, local: &BinaryVector) -> BinaryVector {
        let start = self.chunk_start(chunk);
        let mut global = BinaryVector::zeros(self.k);
        for j in local.ones() {
            global.set((start + j) % self.k, true);
        }
        global
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (k={}, q={}, tau={}, alpha={}, gamma={})",
            self.label(),
            self.k,
            self.q,
            self.tau,
            self.aperture(),
            self.overlap()
        )
    }
}

/// How a node picks the chunk for its next transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChunkPolicy {
    /// Uniform over all `q` chunks; an empty choice wastes the slot.
    #[default]
    UniformAll,
    /// Uniform over chunks the node holds packets for.
    UniformNonempty,
}

impl ChunkPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::UniformAll => "uniform-all",
            Self::UniformNonempty => "uniform-nonempty",
        }
    }
}

impl fmt::Display for ChunkPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChunkPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform-all" => Ok(Self::UniformAll),
            "uniform-nonempty" => Ok(Self::UniformNonempty),
            other => Err(format!("unknown policy `{other}`")),
        }
    }
}

/// A coded packet: chunk id, aperture-local coefficients and, in payload mode,
/// the coded symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet {
    pub chunk: usize,
    pub coeffs: BinaryVector,
    pub info: Option<BinaryVector>,
}

impl Packet {
    pub fn global_payload(&self, spec: &CodeSpec) -> BinaryVector {
        spec.lift(self.chunk, &self.coeffs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Source,
    Relay,
    Terminal,
}

/// Packets a node holds for one chunk, coefficients packed back to back.
#[derive(Debug, Clone, Default)]
struct ChunkBuffer {
    coeff_words: Vec<u64>,
    infos: Vec<BinaryVector>,
    len: usize,
}

/// What one node holds.
///
/// The source holds the message itself, so its chunk buffers are implicitly the
/// standard basis of each aperture and are not materialized.
#[derive(Debug, Clone)]
pub struct NodeState {
    role: Role,
    aperture: usize,
    stride_words: usize,
    buffers: Vec<ChunkBuffer>,
    /// Chunks with a non-empty buffer, in order of first arrival.
    nonempty: Vec<usize>,
}

impl NodeState {
    pub fn new(role: Role, spec: &CodeSpec) -> Self {
        let buffers = match role {
            Role::Source => Vec::new(),
            _ => vec![ChunkBuffer::default(); spec.q()],
        };
        Self {
            role,
            aperture: spec.aperture(),
            stride_words: spec.aperture().div_ceil(64),
            buffers,
            nonempty: Vec::new(),
        }
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn buffer_len(&self, chunk: usize) -> usize {
        self.buffers.get(chunk).map_or(0, |b| b.len)
    }

    /// The packets held for `chunk`, in arrival order.
    pub fn buffer(&self, chunk: usize) -> Vec<Packet> {
        let Some(b) = self.buffers.get(chunk) else {
            return Vec::new();
        };
        (0..b.len)
            .map(|i| Packet {
                chunk,
                coeffs: BinaryVector::from_words(
                    self.aperture,
                    b.coeff_words[i * self.stride_words..(i + 1) * self.stride_words].to_vec(),
                ),
                info: b.infos.get(i).cloned(),
            })
            .collect()
    }

    pub fn receive(&mut self, packet: Packet) {
        assert!(self.role != Role::Source, "the source does not receive");
        assert_eq!(packet.coeffs.len(), self.aperture, "packet aperture mismatch");
        let buf = &mut self.buffers[packet.chunk];
        if buf.len == 0 {
            self.nonempty.push(packet.chunk);
        }
        buf.coeff_words.extend_from_slice(packet.coeffs.words());
        if let Some(info) = packet.info {
            buf.infos.push(info);
        }
        buf.len += 1;
    }
}

/// Produces the node's next packet, or `None` for a wasted slot.
///
/// Draws, in order: one `next_u64` for the chunk choice, then (if a packet is
/// produced) one Bernoulli mask of `ceil(m / 64)` words, where `m` is `α` at the
/// source and the chunk's buffer length at a relay.
pub fn emit<R: RngCore + ?Sized>(
    state: &NodeState,
    spec: &CodeSpec,
    policy: ChunkPolicy,
    message: Option<&[BinaryVector]>,
    rng: &mut R,
) -> Option<Packet> {
    if state.role == Role::Source {
        let chunk = uniform_index(rng, spec.q());
        let coeffs = BinaryVector::random_bernoulli(spec.aperture(), rng);
        let info = message.map(|msg| {
            let start = spec.chunk_start(chunk);
            let mut acc = BinaryVector::zeros(msg[0].len());
            for j in coeffs.ones() {
                acc.xor_words_from(&msg[(start + j) % spec.k()], 0);
            }
            acc
        });
        return Some(Packet { chunk, coeffs, info });
    }

    let chunk = match policy {
        ChunkPolicy::UniformAll => uniform_index(rng, spec.q()),
        ChunkPolicy::UniformNonempty => {
            let pick = rng.next_u64();
            if state.nonempty.is_empty() {
                return None;
            }
            let i = ((u128::from(pick) * state.nonempty.len() as u128) >> 64) as usize;
            state.nonempty[i]
        }
    };
    let buf = &state.buffers[chunk];
    if buf.len == 0 {
        return None;
    }
    let mask = BinaryVector::random_bernoulli(buf.len, rng);
    let coeffs = xor_combine_packed(&buf.coeff_words, state.stride_words, state.aperture, &mask)
        .expect("buffer holds aperture-length vectors");
    let info = (!buf.infos.is_empty())
        .then(|| xor_combine(&buf.infos, &mask).expect("payload mode is uniform across packets"));
    Some(Packet { chunk, coeffs, info })
}

/// Everything the terminal received.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminalReport {
    pub spec: CodeSpec,
    /// Received packets in arrival order.
    pub packets: Vec<Packet>,
    /// Transmissions on the last link whose sender had nothing to send.
    pub wasted_slots: usize,
}

impl TerminalReport {
    /// The `k × m` matrix of global payload vectors, one column per packet.
    pub fn global_matrix(&self) -> BinaryMatrix {
        let columns = self.packets.iter().map(|p| p.global_payload(&self.spec)).collect();
        BinaryMatrix::from_columns(self.spec.k(), columns).expect("lifted columns have length k")
    }

    /// Coded symbols in arrival order, when the run carried payloads.
    pub fn symbols(&self) -> Option<Vec<BinaryVector>> {
        self.packets.iter().map(|p| p.info.clone()).collect()
    }

    pub fn has_payload(&self) -> bool {
        self.packets.first().is_some_and(|p| p.info.is_some())
    }
}

/// Runs one transfer over `schedule`.
///
/// Transmissions are processed in time order; for a transmission on link `i`,
/// node `v_{i-1}` emits and node `v_i` stores the packet. Passing a message
/// switches on payload mode; the rng draws are the same either way.
pub fn simulate<R: RngCore + ?Sized>(
    spec: &CodeSpec,
    schedule: &Schedule,
    policy: ChunkPolicy,
    message: Option<&[BinaryVector]>,
    rng: &mut R,
) -> TerminalReport {
    if let Some(msg) = message {
        assert_eq!(msg.len(), spec.k(), "message must have k symbols");
    }
    let l = schedule.length() as usize;
    let mut nodes: Vec<NodeState> = (0..l)
        .map(|i| NodeState::new(if i == 0 { Role::Source } else { Role::Relay }, spec))
        .collect();
    let mut packets = Vec::new();
    let mut wasted_slots = 0;
    for t in schedule.transmissions() {
        let link = t.link as usize;
        let sent = emit(&nodes[link - 1], spec, policy, message, rng);
        match (sent, link == l) {
            (Some(p), true) => packets.push(p),
            (Some(p), false) => nodes[link].receive(p),
            (None, true) => wasted_slots += 1,
            (None, false) => {}
        }
    }
    TerminalReport {
        spec: *spec,
        packets,
        wasted_slots,
    }
}

/// `k` random symbols of `width` bits.
pub fn random_message<R: RngCore + ?Sized>(k: usize, width: usize, rng: &mut R) -> Vec<BinaryVector> {
    (0..k).map(|_| BinaryVector::random_bernoulli(width, rng)).collect()
}

/// XOR of the message symbols selected by a global payload vector.
pub fn encode_symbol(message: &[BinaryVector], payload: &BinaryVector) -> BinaryVector {
    let mut acc = BinaryVector::zeros(message[0].len());
    for i in payload.ones() {
        acc.xor_words_from(&message[i], 0);
    }
    acc
}
