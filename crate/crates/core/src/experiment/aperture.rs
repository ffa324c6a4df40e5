use rayon::prelude::*;

use crate::bounds::conjecture_rank_failure_prob;
use crate::code::{CodeKind, CodeSpec, SpecError};
use crate::gf2::{BinaryVector, Eliminator};
use crate::rng::{derive_seed, stream, streams, uniform_index};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApertureResult {
    pub spec: CodeSpec,
    pub n: usize,
    pub trials: u64,
    pub full_rank: u64,
    /// Aperture chosen round-robin, so each appears `n/q` times when `q | n`.
    pub balanced: bool,
}

impl ApertureResult {
    pub fn failures(&self) -> u64 {
        self.trials - self.full_rank
    }

    pub fn full_rank_rate(&self) -> f64 {
        self.full_rank as f64 / self.trials as f64
    }

    pub fn failure_rate(&self) -> f64 {
        self.failures() as f64 / self.trials as f64
    }

    /// `2^{-(n-k)}`.
    pub fn reference(&self) -> f64 {
        conjecture_rank_failure_prob(self.spec.k(), self.n, None)
    }
}

/// The code family implied by `(q, τ)`: dense for `q = 1`, chunked for `τ = 1`.
pub fn aperture_spec(k: usize, q: usize, tau: usize) -> Result<CodeSpec, SpecError> {
    let kind = match (q, tau) {
        (1, _) => CodeKind::Dense,
        (_, 1) => CodeKind::Chunked,
        _ => CodeKind::Overlapped,
    };
    CodeSpec::new(kind, k, q, tau)
}

/// Rank of `n` random columns, each a Bernoulli vector on one aperture.
///
/// Returns how often the `k × n` matrix had full rank.
pub fn aperture_rank_experiment(
    k: usize,
    q: usize,
    tau: usize,
    n: usize,
    trials: u64,
    balanced: bool,
    seed: u64,
) -> Result<ApertureResult, SpecError> {
    let spec = aperture_spec(k, q, tau)?;
    let full_rank = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let s = derive_seed(&[seed, k as u64, q as u64, tau as u64, n as u64, u64::from(balanced), t]);
            let mut rng = stream(s, streams::APERTURE);
            let mut elim = Eliminator::new(k, 0);
            for j in 0..n {
                let chunk = if balanced { j % q } else { uniform_index(&mut rng, q) };
                let local = BinaryVector::random_bernoulli(spec.aperture(), &mut rng);
                elim.insert(spec.lift(chunk, &local), None);
                if elim.is_full() {
                    return true;
                }
            }
            false
        })
        .count() as u64;
    Ok(ApertureResult {
        spec,
        n,
        trials,
        full_rank,
        balanced,
    })
}
