//! Laplace's rule of succession against the algorithmic-probability
//! predictor for long runs of identical symbols.

use simbias::induction::{compare_predictors, find_transition_index, RunScenario};

fn main() -> simbias::Result<()> {
    let scenarios = [
        RunScenario::explicit(1000),
        RunScenario::power_tower(5),
        RunScenario::map_derived(2.5, -19728.0, 0.5),
    ];
    for scenario in &scenarios {
        let r = compare_predictors(scenario)?;
        println!("{:?}", r.scenario.run_length);
        println!("  run length          {}", r.run_length);
        println!(
            "  Laplace: next same  {:.10}   break {:.3e}",
            r.laplace_next_same, r.laplace_trend_break
        );
        println!(
            "  AP:      next same  {:.10}   break {:.3e}  (K = {:.1} bits)",
            r.ap_next_same, r.ap_trend_break, r.k_bits_used
        );
        if let Some(lb) = r.transition_lower_bound {
            println!(
                "  transition >= {lb}, exact {}",
                find_transition_index(2.5, -19728.0, 0.5)?
            );
        }
    }
    Ok(())
}
