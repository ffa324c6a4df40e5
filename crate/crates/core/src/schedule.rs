//! Line-network schedules and their min-cut capacity.
//!
//! A line network of length `l` has nodes `v_0` (source) through `v_l`
//! (terminal); link `i` carries packets from `v_{i-1}` to `v_i`. A schedule
//! lists the successful transmissions, each an instant on one link. A unit of
//! flow is a chain of transmissions on links `1..=l` with strictly increasing
//! times, and the capacity is the largest number of link-disjoint chains.

use std::fmt;
use std::str::FromStr;

use petgraph::algo::ford_fulkerson;
use petgraph::graph::{DiGraph, NodeIndex};
use rand::RngCore;
use thiserror::Error;

use crate::rng::uniform_index;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transmission {
    /// Link index in `1..=l`.
    pub link: u32,
    pub time: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("line network length must be at least 1")]
    EmptyNetwork,
    #[error("link {link} out of range 1..={length}")]
    LinkOutOfRange { link: u32, length: u32 },
    #[error("times must be strictly ascending ({previous} then {time})")]
    Unsorted { previous: u64, time: u64 },
    #[error("gave up after {appended} transmissions without reaching capacity {target}")]
    GenerationCap { target: usize, appended: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("missing `l=<int>` header")]
    MissingHeader,
    #[error("malformed header")]
    BadHeader,
    #[error("malformed row, expected `link,time`")]
    BadRow,
    #[error("link out of range")]
    LinkOutOfRange,
    #[error("times not strictly ascending")]
    Unsorted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    length: u32,
    transmissions: Vec<Transmission>,
}

impl Schedule {
    pub fn new(length: u32, transmissions: Vec<Transmission>) -> Result<Self, ScheduleError> {
        if length == 0 {
            return Err(ScheduleError::EmptyNetwork);
        }
        for (i, t) in transmissions.iter().enumerate() {
            if t.link == 0 || t.link > length {
                return Err(ScheduleError::LinkOutOfRange { link: t.link, length });
            }
            if i > 0 && transmissions[i - 1].time >= t.time {
                return Err(ScheduleError::Unsorted {
                    previous: transmissions[i - 1].time,
                    time: t.time,
                });
            }
        }
        Ok(Self { length, transmissions })
    }

    /// Schedule from `(link, time)` pairs given in any order; times must be distinct.
    pub fn from_pairs(length: u32, pairs: &[(u32, u64)]) -> Result<Self, ScheduleError> {
        let mut tx: Vec<Transmission> = pairs.iter().map(|&(link, time)| Transmission { link, time }).collect();
        tx.sort_by_key(|t| t.time);
        Self::new(length, tx)
    }

    pub fn length(&self) -> u32 {
        self.length
    }

    pub fn transmissions(&self) -> &[Transmission] {
        &self.transmissions
    }

    pub fn len(&self) -> usize {
        self.transmissions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transmissions.is_empty()
    }

    pub fn link_count(&self, link: u32) -> usize {
        self.transmissions.iter().filter(|t| t.link == link).count()
    }

    /// Min-cut capacity by greedy chain matching.
    pub fn capacity(&self) -> usize {
        let mut tracker = CapacityTracker::new(self.length);
        for t in &self.transmissions {
            tracker.push(t.link);
        }
        tracker.capacity()
    }

    /// Per transmission, whether the greedy matching places it on a chain.
    pub fn matched(&self) -> Vec<bool> {
        let mut tracker = CapacityTracker::new(self.length);
        self.transmissions.iter().map(|t| tracker.push(t.link)).collect()
    }
}

/// Greedy capacity, updated one transmission at a time.
///
/// Transmissions must be pushed in time order. Matching a link-`i` transmission
/// to any earlier unconsumed arrival at `v_{i-1}` gives the same count as
/// layer-by-layer earliest-first matching, since only the number of waiting
/// arrivals matters when later transmissions are considered.
#[derive(Debug, Clone)]
pub struct CapacityTracker {
    /// `waiting[i]`: arrivals at `v_i` not yet forwarded, for relays `1..l`.
    waiting: Vec<usize>,
    delivered: usize,
}

impl CapacityTracker {
    pub fn new(length: u32) -> Self {
        Self {
            waiting: vec![0; length as usize],
            delivered: 0,
        }
    }

    /// Records the next transmission; returns whether it extends a chain.
    pub fn push(&mut self, link: u32) -> bool {
        let i = link as usize;
        let l = self.waiting.len();
        if i > 1 {
            if self.waiting[i - 1] == 0 {
                return false;
            }
            self.waiting[i - 1] -= 1;
        }
        if i == l {
            self.delivered += 1;
        } else {
            self.waiting[i] += 1;
        }
        true
    }

    pub fn capacity(&self) -> usize {
        self.delivered
    }
}

/// Max-flow over the explicit time-expanded graph.
///
/// Each node `v` gets one vertex per instant it sends or receives, chained by
/// memory edges of effectively infinite capacity; every transmission is a unit
/// traffic edge. Flow runs from `(v_0, 0)` to `(v_l, ∞)`. Meant for tests on
/// small schedules.
pub fn capacity_maxflow_oracle(schedule: &Schedule) -> usize {
    let l = schedule.length() as usize;
    let inf = schedule.len() as u64 + 1;
    let mut g: DiGraph<(), u64> = DiGraph::new();
    let source = g.add_node(());
    let sink = g.add_node(());
    // Last vertex in each node's memory chain.
    let mut tail: Vec<Option<NodeIndex>> = vec![None; l + 1];
    tail[0] = Some(source);

    let step = |g: &mut DiGraph<(), u64>, tail: &mut Vec<Option<NodeIndex>>, v: usize| {
        let here = g.add_node(());
        if let Some(prev) = tail[v] {
            g.add_edge(prev, here, inf);
        }
        tail[v] = Some(here);
        here
    };
    for t in schedule.transmissions() {
        let i = t.link as usize;
        let from = step(&mut g, &mut tail, i - 1);
        let to = step(&mut g, &mut tail, i);
        g.add_edge(from, to, 1);
    }
    if let Some(last) = tail[l] {
        g.add_edge(last, sink, inf);
    }
    let (flow, _) = ford_fulkerson(&g, source, sink);
    flow as usize
}

/// Random schedule whose capacity is exactly `target`.
///
/// Each tick appends a transmission at time `tick` on a link drawn uniformly
/// from `1..=l` (one rng draw per tick), stopping as soon as the capacity hits
/// `target`. Capacity rises by at most one per append, so it never overshoots.
pub fn generate_schedule<R: RngCore + ?Sized>(
    length: u32,
    target: usize,
    rng: &mut R,
) -> Result<Schedule, ScheduleError> {
    if length == 0 {
        return Err(ScheduleError::EmptyNetwork);
    }
    let cap = target.saturating_mul(1_000_000).max(1_000_000);
    let mut tracker = CapacityTracker::new(length);
    let mut transmissions = Vec::with_capacity(target * length as usize * 5 / 4);
    let mut tick = 0u64;
    while tracker.capacity() < target {
        if transmissions.len() >= cap {
            return Err(ScheduleError::GenerationCap {
                target,
                appended: transmissions.len(),
            });
        }
        let link = 1 + uniform_index(rng, length as usize) as u32;
        tracker.push(link);
        transmissions.push(Transmission { link, time: tick });
        tick += 1;
    }
    Ok(Schedule { length, transmissions })
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "l={}", self.length)?;
        for t in &self.transmissions {
            writeln!(f, "{},{}", t.link, t.time)?;
        }
        Ok(())
    }
}

impl FromStr for Schedule {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |line, kind| ParseError { line, kind };
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, text)| (i + 1, text.trim()))
            .filter(|(_, text)| !text.is_empty());
        let (hline, header) = lines.next().ok_or(err(1, ParseErrorKind::MissingHeader))?;
        let length: u32 = header
            .strip_prefix("l=")
            .ok_or(err(hline, ParseErrorKind::MissingHeader))?
            .trim()
            .parse()
            .ok()
            .filter(|&l| l >= 1)
            .ok_or(err(hline, ParseErrorKind::BadHeader))?;

        let mut transmissions: Vec<Transmission> = Vec::new();
        for (line, text) in lines {
            let (link, time) = text.split_once(',').ok_or(err(line, ParseErrorKind::BadRow))?;
            let link: u32 = link.trim().parse().map_err(|_| err(line, ParseErrorKind::BadRow))?;
            let time: u64 = time.trim().parse().map_err(|_| err(line, ParseErrorKind::BadRow))?;
            if link == 0 || link > length {
                return Err(err(line, ParseErrorKind::LinkOutOfRange));
            }
            if transmissions.last().is_some_and(|p| p.time >= time) {
                return Err(err(line, ParseErrorKind::Unsorted));
            }
            transmissions.push(Transmission { link, time });
        }
        Ok(Self { length, transmissions })
    }
}
