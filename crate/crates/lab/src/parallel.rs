//! Concurrent sampling of flows. Results do not depend on the worker count.

use rayon::prelude::*;
use teichflow::flow::{build_schedule, FlowConfig, PreparedFlow};
use teichflow::{FlowTrace, Result};

/// Runs `cfg`, sampling on `threads` workers (`None`: rayon's default pool).
pub fn run_flow_parallel(cfg: &FlowConfig, threads: Option<usize>) -> Result<FlowTrace> {
    let s = cfg.schedule;
    let schedule = build_schedule(s.t0, s.ratio, s.count)?;
    let prepared = PreparedFlow::new(cfg)?;
    let sample_all = || schedule.par_iter().map(|&t| prepared.sample(t)).collect::<Result<Vec<_>>>();
    let samples = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(sample_all)?,
        None => sample_all()?,
    };
    prepared.assemble(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{default_earthquake, default_horocycle};
    use teichflow::flow::run_flow;

    #[test]
    fn matches_sequential() {
        for cfg in [default_earthquake(), default_horocycle()] {
            let seq = run_flow(&cfg).unwrap();
            for n in [1, 3, 8] {
                assert_eq!(run_flow_parallel(&cfg, Some(n)).unwrap(), seq);
            }
        }
    }
}
