use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ConfigError, ExperimentConfig, Mode, StopRule};
use crate::code::{random_message, simulate, ChunkPolicy, CodeSpec};
use crate::decode::{decode_chunked, decode_global};
use crate::rng::{derive_seed, fnv1a, stream, streams};
use crate::schedule::generate_schedule;

/// Trials simulated per batch under the successes rule. Fixed so the stopping
/// trial does not depend on the worker count.
const BATCH: u64 = 256;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Inputs that determine one trial besides the trial index.
#[derive(Debug, Clone, Copy)]
pub struct TrialSetup {
    pub l: u32,
    pub policy: ChunkPolicy,
    pub mode: Mode,
    pub symbol_bits: usize,
    pub master_seed: u64,
}

impl TrialSetup {
    pub fn of(config: &ExperimentConfig) -> Self {
        Self {
            l: config.l,
            policy: config.policy,
            mode: config.mode,
            symbol_bits: config.symbol_bits,
            master_seed: config.master_seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub success: bool,
    pub chunked_success: bool,
    pub rank: usize,
    /// Payload mode: the globally decoded message matched; `None` otherwise.
    pub message_ok: Option<bool>,
    /// Chunked decoder only claimed true symbols and only succeeded when the
    /// global decoder did.
    pub chunked_sound: bool,
}

pub fn trial_seed(master_seed: u64, spec: &CodeSpec, n: usize, trial: u64) -> u64 {
    derive_seed(&[master_seed, fnv1a(&spec.label()), n as u64, trial])
}

/// One random schedule of capacity `n`, one transfer, both decoders.
pub fn run_trial(setup: &TrialSetup, spec: &CodeSpec, n: usize, trial: u64) -> TrialOutcome {
    let seed = trial_seed(setup.master_seed, spec, n, trial);
    let schedule = generate_schedule(setup.l, n, &mut stream(seed, streams::SCHEDULE))
        .expect("generation cap is far above any reachable need");
    let message = match setup.mode {
        Mode::Rank => None,
        Mode::Payload => Some(random_message(
            spec.k(),
            setup.symbol_bits,
            &mut stream(seed, streams::MESSAGE),
        )),
    };
    let report = simulate(
        spec,
        &schedule,
        setup.policy,
        message.as_deref(),
        &mut stream(seed, streams::CODING),
    );
    let global = decode_global(&report);
    // With a single chunk the chunked decoder is the global decoder.
    let chunked = if spec.q() == 1 { global.clone() } else { decode_chunked(&report) };
    let message_ok = message
        .as_ref()
        .filter(|_| global.success)
        .map(|m| global.message().as_deref() == Some(m.as_slice()));
    let mut chunked_sound = !chunked.success || global.success;
    if let (Some(m), Some(values)) = (&message, &chunked.values) {
        chunked_sound &= values
            .iter()
            .zip(m)
            .all(|(v, truth)| v.as_ref().is_none_or(|v| v == truth));
    }
    TrialOutcome {
        success: global.success,
        chunked_success: chunked.success,
        rank: global.rank,
        message_ok,
        chunked_sound,
    }
}

/// Result for one `(spec, n)` grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointEstimate {
    pub spec: CodeSpec,
    pub l: u32,
    pub policy: ChunkPolicy,
    pub n: usize,
    pub trials: u64,
    pub successes: u64,
    pub chunked_successes: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_terminal_rank: f64,
    pub seed: u64,
    /// The successes rule hit its trial cap first.
    pub capped: bool,
    /// Trials where a decoded message was wrong or the chunked decoder was unsound.
    pub anomalies: u64,
}

impl PointEstimate {
    pub fn label(&self) -> String {
        self.spec.label()
    }

    pub fn ci_half_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / 2.0
    }
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let (s, t) = (successes as f64, trials as f64);
    let p = s / t;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / t;
    let centre = (p + z2 / (2.0 * t)) / denom;
    let half = Z95 * (p * (1.0 - p) / t + z2 / (4.0 * t * t)).sqrt() / denom;
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

#[derive(Default)]
struct Tally {
    trials: u64,
    successes: u64,
    chunked: u64,
    rank_sum: u64,
    anomalies: u64,
}

impl Tally {
    fn add(&mut self, o: &TrialOutcome) {
        self.trials += 1;
        self.successes += u64::from(o.success);
        self.chunked += u64::from(o.chunked_success);
        self.rank_sum += o.rank as u64;
        self.anomalies += u64::from(o.message_ok == Some(false) || !o.chunked_sound);
    }

    fn merge(mut self, other: Self) -> Self {
        self.trials += other.trials;
        self.successes += other.successes;
        self.chunked += other.chunked;
        self.rank_sum += other.rank_sum;
        self.anomalies += other.anomalies;
        self
    }
}

fn point_on(setup: &TrialSetup, stop: StopRule, spec: &CodeSpec, n: usize) -> PointEstimate {
    let one = |t: u64| {
        let mut tally = Tally::default();
        tally.add(&run_trial(setup, spec, n, t));
        tally
    };
    let mut capped = false;
    let tally = match stop {
        StopRule::Fixed(trials) => (0..trials).into_par_iter().map(one).reduce(Tally::default, Tally::merge),
        StopRule::Successes { successes, cap } => {
            let mut tally = Tally::default();
            let mut next = 0;
            'outer: while next < cap {
                let end = (next + BATCH).min(cap);
                let batch: Vec<TrialOutcome> =
                    (next..end).into_par_iter().map(|t| run_trial(setup, spec, n, t)).collect();
                for o in &batch {
                    tally.add(o);
                    if tally.successes == successes {
                        break 'outer;
                    }
                }
                next = end;
            }
            capped = tally.successes < successes;
            tally
        }
    };
    let (ci_low, ci_high) = wilson_interval(tally.successes, tally.trials);
    PointEstimate {
        spec: *spec,
        l: setup.l,
        policy: setup.policy,
        n,
        trials: tally.trials,
        successes: tally.successes,
        chunked_successes: tally.chunked,
        p_hat: tally.successes as f64 / tally.trials.max(1) as f64,
        ci_low,
        ci_high,
        mean_terminal_rank: tally.rank_sum as f64 / tally.trials.max(1) as f64,
        seed: setup.master_seed,
        capped,
        anomalies: tally.anomalies,
    }
}

fn pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool")
}

/// Estimates the success probability of `spec` at capacity `n`.
pub fn run_point(config: &ExperimentConfig, spec: &CodeSpec, n: usize) -> PointEstimate {
    let setup = TrialSetup::of(config);
    pool(config.workers).install(|| point_on(&setup, config.stop_rule, spec, n))
}

/// Sweep results: the configurations that produced them and one row per
/// `(config, spec, n)`, ordered by config, then spec order, then `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub configs: Vec<ExperimentConfig>,
    pub rows: Vec<PointEstimate>,
}

pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepTable, ConfigError> {
    run_sweep_with_progress(config, |_| {})
}

/// Like [`run_sweep`], calling `progress` after each finished point.
pub fn run_sweep_with_progress(
    config: &ExperimentConfig,
    mut progress: impl FnMut(&PointEstimate),
) -> Result<SweepTable, ConfigError> {
    let specs = config.validate()?;
    let setup = TrialSetup::of(config);
    let pool = pool(config.workers);
    let mut rows = Vec::with_capacity(specs.len() * config.n_grid.len());
    for spec in &specs {
        for &n in &config.n_grid {
            let row = pool.install(|| point_on(&setup, config.stop_rule, spec, n));
            progress(&row);
            rows.push(row);
        }
    }
    Ok(SweepTable {
        configs: vec![config.clone()],
        rows,
    })
}

impl SweepTable {
    pub fn merge(tables: impl IntoIterator<Item = SweepTable>) -> SweepTable {
        let mut out = SweepTable {
            configs: Vec::new(),
            rows: Vec::new(),
        };
        for t in tables {
            out.configs.extend(t.configs);
            out.rows.extend(t.rows);
        }
        out
    }

    /// Rows of one code on one line length, ascending in `n`.
    pub fn series(&self, label: &str, l: u32) -> Vec<&PointEstimate> {
        self.rows.iter().filter(|r| r.l == l && r.label() == label).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            let label = r.label();
            if !out.contains(&label) {
                out.push(label);
            }
        }
        out
    }

    pub fn line_lengths(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self.rows.iter().map(|r| r.l).collect();
        out.dedup();
        out
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        for r in &self.rows {
            w.serialize(CsvRow::from(r))?;
        }
        if self.rows.is_empty() {
            w.write_record(CSV_HEADER)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    /// Sidecar metadata: estimator notes and the configurations.
    pub fn metadata(&self) -> String {
        let mut s = String::from("# chunknet sweep metadata\n");
        s.push_str("success = \"global rank equals k\"\n");
        s.push_str("chunked_success = \"per-chunk decoder recovered every symbol\"\n");
        s.push_str("ci = \"Wilson score, 95%\"\n");
        if self.configs.iter().any(|c| matches!(c.stop_rule, StopRule::Successes { .. })) {
            s.push_str(
                "estimator_note = \"successes rule: p_hat = successes / trials under negative-binomial \
                 sampling, biased upward for small success counts; capped rows stopped at the trial cap\"\n",
            );
        }
        for c in &self.configs {
            s.push_str("\n[[config]]\n");
            s.push_str(&c.to_toml());
        }
        s
    }

    /// Writes `path` and `path.meta.toml`.
    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        let with_path = |e: std::io::Error| std::io::Error::new(e.kind(), format!("{}: {e}", path.display()));
        let file = std::fs::File::create(path).map_err(with_path)?;
        self.write_csv(std::io::BufWriter::new(file))
            .map_err(|e| with_path(std::io::Error::other(e)))?;
        let meta = format!("{}.meta.toml", path.display());
        std::fs::write(&meta, self.metadata())
            .map_err(|e| std::io::Error::new(e.kind(), format!("{meta}: {e}")))
    }
}

pub const CSV_HEADER: [&str; 18] = [
    "code",
    "kind",
    "k",
    "l",
    "q",
    "tau",
    "alpha",
    "gamma",
    "policy",
    "n",
    "trials",
    "successes",
    "chunked_successes",
    "p_hat",
    "ci_low",
    "ci_high",
    "seed",
    "capped",
];

#[derive(Serialize)]
struct CsvRow {
    code: String,
    kind: &'static str,
    k: usize,
    l: u32,
    q: usize,
    tau: usize,
    alpha: usize,
    gamma: usize,
    policy: &'static str,
    n: usize,
    trials: u64,
    successes: u64,
    chunked_successes: u64,
    p_hat: String,
    ci_low: String,
    ci_high: String,
    seed: u64,
    capped: bool,
}

impl From<&PointEstimate> for CsvRow {
    fn from(r: &PointEstimate) -> Self {
        let s = &r.spec;
        Self {
            code: s.label(),
            kind: s.kind().as_str(),
            k: s.k(),
            l: r.l,
            q: s.q(),
            tau: s.tau(),
            alpha: s.aperture(),
            gamma: s.overlap(),
            policy: r.policy.as_str(),
            n: r.n,
            trials: r.trials,
            successes: r.successes,
            chunked_successes: r.chunked_successes,
            p_hat: format!("{:.6}", r.p_hat),
            ci_low: format!("{:.6}", r.ci_low),
            ci_high: format!("{:.6}", r.ci_high),
            seed: r.seed,
            capped: r.capped,
        }
    }
}

/// Smallest grid `n` with `p_hat ≥ p_star`, minus `k`; `None` if never reached.
pub fn overhead(table: &SweepTable, label: &str, l: u32, p_star: f64) -> Option<usize> {
    table
        .series(label, l)
        .into_iter()
        .find(|r| r.p_hat >= p_star)
        .map(|r| r.n.saturating_sub(r.spec.k()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::CodeDescriptor;

    fn small() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(
            16,
            2,
            vec![
                CodeDescriptor::dense(),
                CodeDescriptor::chunked(4),
                CodeDescriptor::overlapped(4, 2),
            ],
            vec![12, 16, 20, 24, 32],
        );
        cfg.stop_rule = StopRule::Fixed(200);
        cfg.master_seed = 7;
        cfg
    }

    #[test]
    fn wilson_contains_estimate() {
        for (s, t) in [(0, 10), (10, 10), (3, 10), (500, 1000), (1, 20000)] {
            let (lo, hi) = wilson_interval(s, t);
            let p = s as f64 / t as f64;
            assert!(lo <= p && p <= hi && lo >= 0.0 && hi <= 1.0);
        }
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    }

    #[test]
    fn below_k_never_succeeds() {
        let t = run_sweep(&small()).unwrap();
        for r in t.rows.iter().filter(|r| r.n < 16) {
            assert_eq!(r.successes, 0);
            assert_eq!(r.p_hat, 0.0);
        }
    }

    #[test]
    fn row_invariants() {
        let t = run_sweep(&small()).unwrap();
        assert_eq!(t.rows.len(), 15);
        for r in &t.rows {
            assert!(r.successes <= r.trials);
            assert!(r.chunked_successes <= r.successes);
            assert!(r.ci_low <= r.p_hat && r.p_hat <= r.ci_high);
            assert!(r.mean_terminal_rank <= r.n.min(16) as f64);
            assert_eq!(r.anomalies, 0);
        }
        let labels: Vec<_> = t.rows.iter().map(|r| (r.label(), r.n)).collect();
        assert_eq!(labels[0], ("DC".to_string(), 12));
        assert_eq!(labels[5], ("CC-q4".to_string(), 12));
    }

    #[test]
    fn workers_do_not_change_output() {
        let mut cfg = small();
        let one = run_sweep(&cfg).unwrap().to_csv_string();
        cfg.workers = 3;
        assert_eq!(run_sweep(&cfg).unwrap().to_csv_string(), one);
        cfg.stop_rule = StopRule::Successes { successes: 30, cap: 600 };
        let a = run_sweep(&cfg).unwrap().to_csv_string();
        cfg.workers = 1;
        assert_eq!(run_sweep(&cfg).unwrap().to_csv_string(), a);
    }

    #[test]
    fn payload_mode_matches_rank_mode() {
        let mut cfg = small();
        let setup_rank = TrialSetup::of(&cfg);
        cfg.mode = Mode::Payload;
        cfg.symbol_bits = 8;
        let setup_payload = TrialSetup::of(&cfg);
        for spec in cfg.specs().unwrap() {
            for t in 0..50 {
                let a = run_trial(&setup_rank, &spec, 20, t);
                let b = run_trial(&setup_payload, &spec, 20, t);
                assert_eq!((a.success, a.chunked_success, a.rank), (b.success, b.chunked_success, b.rank));
                assert_eq!(b.message_ok, b.success.then_some(true));
                assert!(b.chunked_sound);
            }
        }
    }

    #[test]
    fn successes_rule_stops_and_caps() {
        let mut cfg = small();
        cfg.stop_rule = StopRule::Successes { successes: 20, cap: 300 };
        let t = run_sweep(&cfg).unwrap();
        for r in &t.rows {
            if r.n < 16 {
                assert!(r.capped && r.trials == 300);
            } else if !r.capped {
                assert_eq!(r.successes, 20);
            }
        }
        assert!(t.metadata().contains("negative-binomial"));
    }

    #[test]
    fn csv_layout() {
        let t = run_sweep(&small()).unwrap();
        let csv = t.to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(csv.lines().count(), 16);
        assert!(!csv.contains('\r'));
        let first = lines.next().unwrap();
        assert!(first.starts_with("DC,dense,16,2,1,1,16,0,uniform-all,12,200,0,0,0.000000,"));
        let empty = SweepTable { configs: vec![], rows: vec![] };
        assert_eq!(empty.to_csv_string().trim_end(), CSV_HEADER.join(","));
    }

    #[test]
    fn overhead_lookup() {
        let t = run_sweep(&small()).unwrap();
        let dc = overhead(&t, "DC", 2, 0.5).unwrap();
        assert!(dc <= 16);
        assert_eq!(overhead(&t, "DC", 2, 1e-9).map(|o| o <= 8), Some(true));
        assert_eq!(overhead(&t, "DC", 3, 0.5), None);
        assert_eq!(overhead(&t, "CC-q4", 2, 1.0 + 1e-9), None);
    }
}
