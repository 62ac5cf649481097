//! Sample the pattern distribution for one configuration, fit the upper
//! envelope of `log2 P` against `K~` and report bias metrics.
//!
//! ```text
//! cargo run --release --example simplicity_bias -- [mu] [eps] [skip] [samples]
//! ```

use simbias::cli::{analyze_dataset, run_experiment, ExperimentConfig};
use simbias::estimator::FitOptions;
use simbias::map_engine::MapParams;

fn main() -> simbias::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let mu: f64 = arg(0, "1.0").parse().expect("mu");
    let eps: f64 = arg(1, "0.375").parse().expect("eps");
    let skip: usize = arg(2, "0").parse().expect("skip");
    let samples: u64 = arg(3, "200000").parse().expect("samples");

    let params = MapParams::builder(mu, eps).transient_skip(skip).build()?;
    let (dataset, scale) = run_experiment(&ExperimentConfig::new(params).samples(samples).seed(1))?;
    let report = analyze_dataset(&dataset, &FitOptions::default(), None)?;

    println!("mu = {mu}, eps = {eps}, skip = {skip}, N = {samples}");
    println!("distinct patterns  {}", report.distinct_patterns);
    println!("entropy            {:.3} bits", report.entropy_bits);
    println!("max C_LZ (corpus)  {:.3}", scale.max_c);
    if let (Some(a), Some(b)) = (report.slope, report.slope_log10) {
        println!("envelope slope     {a:.3} per K~ (log2 P), {b:.3} (log10 P)");
    }
    if let Some(rho) = report.spearman_rho {
        println!("spearman(K~, logP) {rho:.3}");
    }
    println!("\nmost frequent patterns:");
    for row in dataset.rows.iter().take(8) {
        println!(
            "  {}  p = {:.2e}  K~ = {:5.2}",
            row.pattern, row.probability, row.k_tilde
        );
    }
    Ok(())
}
