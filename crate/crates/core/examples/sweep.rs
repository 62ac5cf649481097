//! Run a small parameter grid into a temporary directory and print the
//! resulting summary table.

use simbias::cli::{cmd_sweep, Normalization, SweepConfig};
use simbias::estimator::FitOptions;
use simbias::map_engine::{BoundaryPolicy, MapParams};

fn main() -> simbias::Result<()> {
    let out = tempfile::tempdir()?;
    let config = SweepConfig {
        mus: vec![1.0, 3.0, 3.99],
        epss: vec![0.0, 0.125],
        deltas: vec![0.0],
        skips: vec![0, 50],
        n: MapParams::DEFAULT_LEN,
        boundary_policy: BoundaryPolicy::Clamp,
        samples: 50_000,
        seed: 11,
        normalization: Normalization::Corpus,
        fit: FitOptions::default(),
    };
    let summary = cmd_sweep(&config, out.path(), None)?;
    print!("{}", std::fs::read_to_string(&summary.summary_path)?);
    eprintln!("{} cells, {} failed", summary.outcomes.len(), summary.failures());
    Ok(())
}
