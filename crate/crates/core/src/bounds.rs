//! Closed-form capacity bounds and asymptotic-condition diagnostics.
//!
//! Each bound is the capacity `n` that suffices for delivering `k` symbols with
//! failure probability at most `ε`, reported as a sum of named terms.
//! Logarithms default to base 2; [`BoundQuery::log_base`] can be changed to see
//! how sensitive the numbers are to that choice.

use std::fmt;

pub const DEFAULT_LOG_BASE: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundQuery {
    pub k: usize,
    pub l: usize,
    pub q: usize,
    pub tau: usize,
    pub eps: f64,
    pub log_base: f64,
}

impl BoundQuery {
    pub fn new(k: usize, l: usize, q: usize, eps: f64) -> Self {
        assert!(k >= 1 && l >= 1 && q >= 1, "k, l, q must be positive");
        assert!(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
        Self {
            k,
            l,
            q,
            tau: 1,
            eps,
            log_base: DEFAULT_LOG_BASE,
        }
    }

    /// Query with `ε = k^{-c}`.
    pub fn with_exponent(k: usize, l: usize, q: usize, c: f64) -> Self {
        Self::new(k, l, q, (k as f64).powf(-c))
    }

    pub fn tau(mut self, tau: usize) -> Self {
        self.tau = tau;
        self
    }

    pub fn log_base(mut self, base: f64) -> Self {
        self.log_base = base;
        self
    }

    fn log(&self, x: f64) -> f64 {
        x.ln() / self.log_base.ln()
    }

    fn kf(&self) -> f64 {
        self.k as f64
    }
    fn lf(&self) -> f64 {
        self.l as f64
    }
    fn qf(&self) -> f64 {
        self.q as f64
    }

    /// `log(kl/ε)`
    fn log_kl_eps(&self) -> f64 {
        self.log(self.kf() * self.lf() / self.eps)
    }

    /// `log(1/ε)`
    fn log_inv_eps(&self) -> f64 {
        self.log(1.0 / self.eps)
    }

    /// Dense code: `k + l·log(kl/ε) + log(1/ε) + l + 1`.
    pub fn dense(&self) -> BoundResult {
        BoundResult::new(
            "dense",
            vec![
                ("k", self.kf()),
                ("l*log(kl/eps)", self.lf() * self.log_kl_eps()),
                ("log(1/eps)", self.log_inv_eps()),
                ("l", self.lf()),
                ("1", 1.0),
            ],
        )
    }

    /// Chunked code: `k + ql·log(kl/ε) + q·log(1/ε) + q·log q + q`.
    pub fn chunked(&self) -> BoundResult {
        let q = self.qf();
        BoundResult::new(
            "chunked",
            vec![
                ("k", self.kf()),
                ("q*l*log(kl/eps)", q * self.lf() * self.log_kl_eps()),
                ("q*log(1/eps)", q * self.log_inv_eps()),
                ("q*log(q)", q * self.log(q)),
                ("q", q),
            ],
        )
    }

    /// Overlapped chunked code with `γ ≥ √k`:
    /// `k + ql·log(kl/ε) + ql + log(1/ε) + 1`.
    pub fn overlapped(&self) -> BoundResult {
        let q = self.qf();
        BoundResult::new(
            "overlapped",
            vec![
                ("k", self.kf()),
                ("q*l*log(kl/eps)", q * self.lf() * self.log_kl_eps()),
                ("q*l", q * self.lf()),
                ("log(1/eps)", self.log_inv_eps()),
                ("1", 1.0),
            ],
        )
        .with_conditions(self.condition_ratios(self.k))
    }

    /// Overlapped chunked code with `γ < √k`: `k + ql·log(kl/ε) + κ`, where `κ`
    /// is replaced by its upper bound `q·log(1/ε) + q·log q + q`. The bound on `κ`
    /// is tight for `τ = 1` and loosens as `τ` grows.
    pub fn overlapped_small_overlap(&self) -> BoundResult {
        let q = self.qf();
        let mut r = BoundResult::new(
            "overlapped-small-overlap",
            vec![
                ("k", self.kf()),
                ("q*l*log(kl/eps)", q * self.lf() * self.log_kl_eps()),
                ("kappa: q*log(1/eps)", q * self.log_inv_eps()),
                ("kappa: q*log(q)", q * self.log(q)),
                ("kappa: q", q),
            ],
        );
        r.notes.push(if self.tau == 1 {
            "kappa is an upper bound, tight for tau = 1"
        } else {
            "kappa is an upper bound, loose for tau > 1"
        });
        r
    }

    /// Single erasure channel, no relays.
    pub fn erasure(&self, kind: ErasureKind) -> BoundResult {
        match kind {
            ErasureKind::Dense => BoundResult::new(
                "erasure-dense",
                vec![("k", self.kf()), ("log(1/eps)", self.log_inv_eps())],
            ),
            ErasureKind::Chunked => {
                let q = self.qf();
                BoundResult::new(
                    "erasure-chunked",
                    vec![
                        ("k", self.kf()),
                        ("q*log(1/eps)", q * self.log_inv_eps()),
                        ("q*log(q)", q * self.log(q)),
                    ],
                )
            }
        }
    }

    /// Dense columns per chunk below which failure has probability at most `ε`:
    /// `n/q − l·(log(n/q) + log(1/ε) + log l + 1)`. Diagnostic only.
    pub fn chunk_dense_columns(&self, n: usize) -> f64 {
        let per = n as f64 / self.qf();
        per - self.lf() * (self.log(per) + self.log_inv_eps() + self.log(self.lf()) + 1.0)
    }

    /// Left side over right side for each asymptotic hypothesis, at capacity `n`.
    ///
    /// - `(1)` `l⁴q²·log(ln/ε)` vs `n`
    /// - `(2)` `q²·log(n/ε)` vs `n`
    /// - `(3)` `l⁴q²·log(kl/ε)` vs `k`
    /// - `(4)` `τ` vs `α / (l⁴q·log(kl/ε))`, with `α = τk/q`
    pub fn conditions(&self, n: usize) -> Vec<(&'static str, f64)> {
        self.condition_ratios(n)
    }

    fn condition_ratios(&self, n: usize) -> Vec<(&'static str, f64)> {
        let (l, q, nf) = (self.lf(), self.qf(), n as f64);
        let l4 = l.powi(4);
        let alpha = self.tau as f64 * self.kf() / q;
        vec![
            ("(1) l^4 q^2 log(ln/eps) / n", l4 * q * q * self.log(l * nf / self.eps) / nf),
            ("(2) q^2 log(n/eps) / n", q * q * self.log(nf / self.eps) / nf),
            ("(3) l^4 q^2 log(kl/eps) / k", l4 * q * q * self.log_kl_eps() / self.kf()),
            (
                "(4) tau l^4 q log(kl/eps) / alpha",
                self.tau as f64 * l4 * q * self.log_kl_eps() / alpha,
            ),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErasureKind {
    Dense,
    Chunked,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub name: &'static str,
    /// Sum of `terms`, accumulated left to right.
    pub n_min: f64,
    pub terms: Vec<(&'static str, f64)>,
    pub conditions: Vec<(&'static str, f64)>,
    pub notes: Vec<&'static str>,
}

impl BoundResult {
    fn new(name: &'static str, terms: Vec<(&'static str, f64)>) -> Self {
        let n_min = terms.iter().fold(0.0, |acc, (_, v)| acc + v);
        Self {
            name,
            n_min,
            terms,
            conditions: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn with_conditions(mut self, conditions: Vec<(&'static str, f64)>) -> Self {
        self.conditions = conditions;
        self
    }

    /// Overhead above `k` implied by the bound.
    pub fn overhead(&self) -> f64 {
        self.terms.iter().skip(1).fold(0.0, |acc, (_, v)| acc + v)
    }
}

impl fmt::Display for BoundResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<28} n_min = {:.3}", self.name, self.n_min)?;
        for (name, v) in &self.terms {
            writeln!(f, "    {name:<24} {v:>12.3}")?;
        }
        for (name, v) in &self.conditions {
            writeln!(f, "    {name:<36} ratio {v:.4}")?;
        }
        for note in &self.notes {
            writeln!(f, "    note: {note}")?;
        }
        Ok(())
    }
}

/// Guaranteed flow per chunk, `(1 − C·((l⁴q²/n)·log(ln/ε))^{1/4})·(n/q)`.
///
/// The constant `C` is not known; the value is indicative only and goes
/// negative wherever the asymptotic regime has not been reached.
pub fn chunk_flow_bound(n: usize, l: usize, q: usize, eps: f64, constant: f64) -> f64 {
    let (nf, lf, qf) = (n as f64, l as f64, q as f64);
    let inner = lf.powi(4) * qf * qf / nf * (lf * nf / eps).log2();
    (1.0 - constant * inner.powf(0.25)) * (nf / qf)
}

/// Rank-deficiency probability `2^{−(n−k)}` for a `k × n` matrix with
/// sufficiently wide apertures; with `eps` the exponent gains `log₂ ε`.
/// Returns 1 when `n ≤ k`.
pub fn conjecture_rank_failure_prob(k: usize, n: usize, eps: Option<f64>) -> f64 {
    if n <= k {
        return 1.0;
    }
    let mut exponent = -((n - k) as f64);
    if let Some(e) = eps {
        exponent += e.log2();
    }
    exponent.exp2().min(1.0)
}
