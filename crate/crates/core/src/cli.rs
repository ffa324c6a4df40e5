//! Command-line front end behind the `chunknet` binary.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::bounds::{BoundQuery, BoundResult};
use crate::code::ChunkPolicy;
use crate::experiment::{
    aperture_rank_experiment, bound_markers, emit_plot, overhead, preset, run_sweep_with_progress,
    ExperimentConfig, Mode, StopRule, SweepTable,
};
use crate::schedule::{capacity_maxflow_oracle, Schedule};

#[derive(Debug, Parser)]
#[command(name = "chunknet", version, about = "Chunked network codes over line networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte-Carlo decoding-probability sweep.
    Sweep(SweepArgs),
    /// Evaluate the analytic capacity bounds.
    Bounds(BoundsArgs),
    /// Full-rank rate of random aperture-restricted matrices.
    Aperture(ApertureArgs),
    /// Min-cut capacity of a schedule file.
    Capacity(CapacityArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Built-in sweep: fig2 or fig3.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    pub preset: Option<String>,
    /// TOML file with the sweep definition.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Only run presets with this line length.
    #[arg(long)]
    pub l: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// CSV output; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// fixed:<T> or successes:<S>,<cap>.
    #[arg(long)]
    pub stop: Option<StopRule>,
    #[arg(long)]
    pub policy: Option<ChunkPolicy>,
    #[arg(long)]
    pub mode: Option<Mode>,
    /// Target probability for the overhead summary.
    #[arg(long, default_value_t = 0.9)]
    pub p_star: f64,
    #[arg(long, short)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub l: usize,
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    #[arg(long, default_value_t = 1)]
    pub tau: usize,
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    #[arg(long, default_value_t = crate::bounds::DEFAULT_LOG_BASE)]
    pub log_base: f64,
}

#[derive(Debug, Args)]
pub struct ApertureArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    #[arg(long, default_value_t = 1)]
    pub tau: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// Each aperture gets n/q columns instead of a uniform draw.
    #[arg(long)]
    pub balanced: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    #[arg(long)]
    pub schedule_file: PathBuf,
}

pub fn main() -> Result<()> {
    run(Cli::parse(), &mut std::io::stdout().lock())
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Sweep(a) => sweep(a, out),
        Command::Bounds(a) => bounds(a, out),
        Command::Aperture(a) => aperture(a, out),
        Command::Capacity(a) => capacity(a, out),
    }
}

fn sweep_configs(a: &SweepArgs) -> Result<Vec<ExperimentConfig>> {
    let mut configs = match (&a.preset, &a.config) {
        (Some(name), _) => preset(name)?,
        (None, Some(path)) => vec![ExperimentConfig::load(path)?],
        (None, None) => bail!("one of --preset or --config is required"),
    };
    if let Some(l) = a.l {
        configs.retain(|c| c.l == l);
        if configs.is_empty() {
            bail!("no configuration with l = {l}");
        }
    }
    let default_workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    for c in &mut configs {
        if let Some(s) = a.seed {
            c.master_seed = s;
        }
        if let Some(s) = a.stop {
            c.stop_rule = s;
        }
        if let Some(p) = a.policy {
            c.policy = p;
        }
        if let Some(m) = a.mode {
            c.mode = m;
        }
        c.workers = a.workers.unwrap_or(if a.preset.is_some() { default_workers } else { c.workers });
        c.validate()?;
    }
    Ok(configs)
}

fn sweep(a: SweepArgs, out: &mut dyn Write) -> Result<()> {
    let configs = sweep_configs(&a)?;
    let mut tables = Vec::new();
    for c in &configs {
        let t = run_sweep_with_progress(c, |r| {
            if !a.quiet {
                eprintln!(
                    "l={} {:<14} n={:<5} p={:.3} ({}/{})",
                    r.l,
                    r.label(),
                    r.n,
                    r.p_hat,
                    r.successes,
                    r.trials
                );
            }
        })?;
        tables.push(t);
    }
    let table = SweepTable::merge(tables);
    match &a.out {
        Some(path) => {
            table.save(path).with_context(|| format!("writing {}", path.display()))?;
            summarize(&table, a.p_star, out)?;
        }
        None => out.write_all(table.to_csv_string().as_bytes())?,
    }
    if let Some(path) = &a.plot {
        let svg = emit_plot(&table, &bound_markers(&table, 0.01))?;
        std::fs::write(path, svg).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn summarize(table: &SweepTable, p_star: f64, out: &mut dyn Write) -> Result<()> {
    for l in table.line_lengths() {
        for label in table.labels() {
            if table.series(&label, l).is_empty() {
                continue;
            }
            let o = overhead(table, &label, l, p_star)
                .map_or_else(|| "not reached".to_string(), |o| o.to_string());
            writeln!(out, "l={l} {label:<14} overhead at p>={p_star}: {o}")?;
        }
    }
    Ok(())
}

fn print_bound(r: &BoundResult, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "{r}")?;
    Ok(())
}

fn bounds(a: BoundsArgs, out: &mut dyn Write) -> Result<()> {
    if a.k == 0 || a.l == 0 || a.q == 0 {
        bail!("k, l and q must be positive");
    }
    if !(a.eps > 0.0 && a.eps < 1.0) {
        bail!("eps must lie in (0, 1)");
    }
    let q = BoundQuery::new(a.k, a.l, a.q, a.eps).tau(a.tau).log_base(a.log_base);
    print_bound(&q.dense(), out)?;
    print_bound(&q.chunked(), out)?;
    print_bound(&q.overlapped(), out)?;
    print_bound(&q.overlapped_small_overlap(), out)?;
    Ok(())
}

fn aperture(a: ApertureArgs, out: &mut dyn Write) -> Result<()> {
    let workers = a.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    let r = pool.install(|| aperture_rank_experiment(a.k, a.q, a.tau, a.n, a.trials, a.balanced, a.seed))?;
    writeln!(out, "code        {}", r.spec)?;
    writeln!(out, "n           {}", r.n)?;
    writeln!(out, "trials      {}", r.trials)?;
    writeln!(out, "full rank   {}", r.full_rank)?;
    writeln!(out, "failure     {:.6e}", r.failure_rate())?;
    writeln!(out, "2^-(n-k)    {:.6e}", r.reference())?;
    Ok(())
}

fn capacity(a: CapacityArgs, out: &mut dyn Write) -> Result<()> {
    let text = std::fs::read_to_string(&a.schedule_file)
        .with_context(|| format!("reading {}", a.schedule_file.display()))?;
    let s: Schedule = text
        .parse()
        .with_context(|| format!("parsing {}", a.schedule_file.display()))?;
    let c = s.capacity();
    debug_assert_eq!(c, capacity_maxflow_oracle(&s));
    writeln!(out, "l={} transmissions={} capacity={c}", s.length(), s.len())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<String> {
        let cli = Cli::try_parse_from(std::iter::once("chunknet").chain(args.iter().copied()))?;
        let mut buf = Vec::new();
        run(cli, &mut buf)?;
        Ok(String::from_utf8(buf)?)
    }

    #[test]
    fn bounds_command() {
        let s = run_args(&["bounds", "--k", "1024", "--l", "4", "--q", "4", "--eps", "0.01"]).unwrap();
        assert!(s.contains("n_min = 1110.219"), "{s}");
        assert!(s.contains("n_min = 1360.877"));
        assert!(s.contains("n_min = 1345.946"));
        assert!(run_args(&["bounds", "--k", "1024", "--l", "4", "--eps", "2"]).is_err());
    }

    #[test]
    fn capacity_command() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.txt");
        std::fs::write(&path, "l=2\n1,1\n2,2\n1,3\n2,4\n").unwrap();
        let s = run_args(&["capacity", "--schedule-file", path.to_str().unwrap()]).unwrap();
        assert_eq!(s.trim(), "l=2 transmissions=4 capacity=2");
        std::fs::write(&path, "l=2\n3,1\n").unwrap();
        let err = run_args(&["capacity", "--schedule-file", path.to_str().unwrap()]).unwrap_err();
        assert!(format!("{err:#}").contains("line 2"), "{err:#}");
    }

    #[test]
    fn aperture_command() {
        let s = run_args(&["aperture", "--k", "16", "--n", "20", "--trials", "200", "--workers", "1"]).unwrap();
        assert!(s.contains("trials      200"));
    }

    #[test]
    fn sweep_from_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.toml");
        std::fs::write(
            &cfg,
            "k = 8\nl = 2\nn_grid = [8, 12]\ncodes = [{ kind = \"cc\", q = 2 }]\nstop_rule = \"fixed:20\"\n",
        )
        .unwrap();
        let csv = run_args(&["sweep", "--config", cfg.to_str().unwrap(), "-q"]).unwrap();
        assert_eq!(csv.lines().count(), 3);
        let out = dir.path().join("o.csv");
        let plot = dir.path().join("o.svg");
        let s = run_args(&[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "-q",
            "--out",
            out.to_str().unwrap(),
            "--plot",
            plot.to_str().unwrap(),
            "--mode",
            "payload",
        ])
        .unwrap();
        assert!(s.contains("CC-q2"));
        assert!(std::fs::read_to_string(&out).unwrap().starts_with("code,kind,"));
        assert!(dir.path().join("o.csv.meta.toml").exists());
        assert!(std::fs::read_to_string(&plot).unwrap().starts_with("<svg"));
        std::fs::write(&cfg, "k = 8\nl = 2\nn_grid = [8]\ncodes = []\nbogus = 1\n").unwrap();
        assert!(run_args(&["sweep", "--config", cfg.to_str().unwrap()]).is_err());
    }

    #[test]
    fn sweep_requires_a_source() {
        assert!(run_args(&["sweep"]).is_err());
        assert!(run_args(&["sweep", "--preset", "fig9"]).is_err());
        assert!(run_args(&["sweep", "--preset", "fig2", "--stop", "fixed:0"]).is_err());
    }
}
