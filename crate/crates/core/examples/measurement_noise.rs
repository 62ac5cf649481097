//! Show how measurement noise on the recorded values flattens the envelope.

use simbias::cli::{analyze_dataset, run_experiment, ExperimentConfig};
use simbias::estimator::FitOptions;
use simbias::map_engine::MapParams;

fn main() -> simbias::Result<()> {
    println!(
        "{:>6} {:>10} {:>12} {:>12}",
        "delta", "patterns", "slope log2", "slope log10"
    );
    for delta in [0.0, 0.01, 0.17, 0.45] {
        let params = MapParams::builder(1.0, 0.375).delta(delta).build()?;
        let (ds, _) = run_experiment(&ExperimentConfig::new(params).samples(200_000).seed(3))?;
        let r = analyze_dataset(&ds, &FitOptions::default(), None)?;
        println!(
            "{delta:>6} {:>10} {:>12.3} {:>12.3}",
            r.distinct_patterns,
            r.slope.unwrap_or(f64::NAN),
            r.slope_log10.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
