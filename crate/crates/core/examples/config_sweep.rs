//! A sweep described in TOML, written out as CSV, metadata and SVG.

use chunknet::experiment::{bound_markers, emit_plot, run_sweep, ExperimentConfig};

const CONFIG: &str = r#"
k = 64
l = 2
n_grid = [64, 68, 72, 76, 80, 88, 96]
codes = [
    { kind = "dense" },
    { kind = "chunked", q = 4 },
    { kind = "overlapped", q = 8, tau = 4 },
]
stop_rule = "successes:40,400"
mode = "payload"
symbol_bits = 16
master_seed = 11
workers = 2
"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig::from_toml(CONFIG)?;
    let table = run_sweep(&cfg)?;
    let dir = std::env::temp_dir().join("chunknet-config-sweep");
    std::fs::create_dir_all(&dir)?;
    let csv = dir.join("sweep.csv");
    table.save(&csv)?;
    let svg = emit_plot(&table, &bound_markers(&table, 0.01))?;
    std::fs::write(dir.join("sweep.svg"), svg)?;
    print!("{}", table.to_csv_string());
    println!("wrote {}", csv.display());
    assert!(table.rows.iter().all(|r| r.anomalies == 0));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
