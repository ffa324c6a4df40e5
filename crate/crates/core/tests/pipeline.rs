use chunknet::code::{random_message, simulate};
use chunknet::experiment::{run_point, run_sweep, CodeDescriptor, ExperimentConfig, StopRule};
use chunknet::rng::{stream, streams};
use chunknet::{decode_chunked, decode_global, generate_schedule, ChunkPolicy, CodeSpec};

fn config(l: u32) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(
        64,
        l,
        vec![
            CodeDescriptor::dense(),
            CodeDescriptor::chunked(4),
            CodeDescriptor::overlapped(8, 4),
        ],
        (56..=112).step_by(8).collect(),
    );
    cfg.stop_rule = StopRule::Fixed(300);
    cfg.master_seed = 3;
    cfg
}

#[test]
fn success_probability_trends_upward() {
    for l in [1, 3] {
        let t = run_sweep(&config(l)).unwrap();
        for label in t.labels() {
            let s = t.series(&label, l);
            for w in s.windows(2) {
                assert!(w[1].p_hat >= w[0].p_hat - 0.05, "{label} l={l} n={}", w[1].n);
            }
        }
    }
}

#[test]
fn rows_respect_counting_limits() {
    let t = run_sweep(&config(2)).unwrap();
    for r in &t.rows {
        assert!(r.mean_terminal_rank <= r.n.min(64) as f64 + 1e-9);
        assert!(r.chunked_successes <= r.successes);
        if r.n < 64 {
            assert_eq!(r.successes, 0);
        }
    }
}

#[test]
fn single_point_matches_sweep_row() {
    let cfg = config(2);
    let t = run_sweep(&cfg).unwrap();
    let spec = CodeSpec::overlapped(64, 8, 4).unwrap();
    let p = run_point(&cfg, &spec, 80);
    let row = t.rows.iter().find(|r| r.spec == spec && r.n == 80).unwrap();
    assert_eq!(&p, row);
}

#[test]
fn relay_chain_decodes_real_data() {
    let k = 48;
    for (i, spec) in [
        CodeSpec::dense(k).unwrap(),
        CodeSpec::chunked(k, 3).unwrap(),
        CodeSpec::overlapped(k, 6, 3).unwrap(),
    ]
    .iter()
    .enumerate()
    {
        let mut decoded = 0;
        for t in 0..60u64 {
            let seed = 100 * i as u64 + t;
            let sched = generate_schedule(3, 80, &mut stream(seed, streams::SCHEDULE)).unwrap();
            let msg = random_message(k, 24, &mut stream(seed, streams::MESSAGE));
            for policy in [ChunkPolicy::UniformAll, ChunkPolicy::UniformNonempty] {
                let rep = simulate(spec, &sched, policy, Some(&msg), &mut stream(seed, streams::CODING));
                let g = decode_global(&rep);
                let c = decode_chunked(&rep);
                if let Some(m) = g.message() {
                    assert_eq!(m, msg);
                    decoded += 1;
                }
                if let Some(m) = c.message() {
                    assert_eq!(m, msg);
                    assert!(g.success);
                }
                for (j, v) in c.values.unwrap().iter().enumerate() {
                    if let Some(v) = v {
                        assert_eq!(v, &msg[j]);
                    }
                }
            }
        }
        assert!(decoded > 0, "{}", spec.label());
    }
}
