//! Next-bit prediction after a long constant run: Laplace's rule of
//! succession against the algorithmic-probability predictor.
//!
//! After observing the same symbol `n` times, Laplace gives
//! `(n + 1) / (n + 2)` for another repeat, while the algorithmic-probability
//! predictor gives `1 - 2^-K(n)`. The two agree for typical `n` (where
//! `K(n) ~ log2 n`) and disagree sharply when `n` has a short description,
//! such as `m^m` or the index at which a logistic-map trajectory started at
//! a tiny `x0` first crosses 0.5.
//!
//! Every `K` used here drops the machine-dependent additive constant, so all
//! algorithmic-probability outputs hold only up to that constant.

use serde::{Deserialize, Serialize};

use crate::complexity::{integer_complexity_estimate, IntegerDescriptor, MapDescriptor};
use crate::error::{Error, Result};

/// Iteration budget for [`find_transition_index`].
pub const MAX_TRANSITION_STEPS: u64 = 1_000_000_000;

/// Below `10^LOG_DOMAIN_CEILING` the iteration runs in log space.
const LOG_DOMAIN_CEILING: f64 = -6.0;

const CAVEAT: &str = "algorithmic-probability values drop the O(1) additive constant in K; \
                      they hold only up to a machine-dependent constant";

/// Laplace's rule of succession, `(k_same + 1) / (n + 2)`.
pub fn laplace_predict(k_same: u128, n: u128) -> Result<f64> {
    if k_same > n {
        return Err(Error::Domain(format!("k_same = {k_same} exceeds n = {n}")));
    }
    Ok((k_same as f64 + 1.0) / (n as f64 + 2.0))
}

/// Algorithmic-probability confidence `1 - 2^-k_bits` that the run continues.
pub fn ap_predict(k_bits: f64) -> Result<f64> {
    if !(k_bits >= 0.0) {
        return Err(Error::Domain(format!("k_bits must be >= 0, got {k_bits}")));
    }
    Ok(1.0 - (-k_bits).exp2())
}

/// `ceil(ln(threshold / x0) / ln mu)`: steps needed if the map grew by
/// exactly `mu` per step, which it never exceeds from below.
pub fn transition_lower_bound(mu: f64, x0_log10: f64, threshold: f64) -> Result<u64> {
    check_transition_args(mu, x0_log10, threshold)?;
    let steps = (threshold.ln() - x0_log10 * std::f64::consts::LN_10) / mu.ln();
    Ok(steps.ceil().max(0.0) as u64)
}

fn check_transition_args(mu: f64, x0_log10: f64, threshold: f64) -> Result<()> {
    if !(mu > 1.0 && mu <= 4.0) {
        return Err(Error::Domain(format!("mu must lie in (1, 4], got {mu}")));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Domain(format!("threshold must lie in (0, 1), got {threshold}")));
    }
    if !(x0_log10 < threshold.log10()) {
        return Err(Error::Domain(format!(
            "x0 = 1e{x0_log10} must lie below the threshold {threshold}"
        )));
    }
    Ok(())
}

/// First iteration index `k >= 1` with `x_k >= threshold` for the
/// deterministic map started at `x0 = 10^x0_log10`.
///
/// While the state is below `1e-6` it is tracked as `L = ln x` with
/// `L <- ln mu + L + ln(1 - e^L)`; above that the ordinary update takes over.
pub fn find_transition_index(mu: f64, x0_log10: f64, threshold: f64) -> Result<u64> {
    check_transition_args(mu, x0_log10, threshold)?;
    transition_index(mu, x0_log10, threshold, LOG_DOMAIN_CEILING * std::f64::consts::LN_10)
}

/// Same as [`find_transition_index`] but iterating `ln x` all the way to the
/// threshold, whatever the starting point.
pub fn log_domain_transition_index(mu: f64, x0_log10: f64, threshold: f64) -> Result<u64> {
    check_transition_args(mu, x0_log10, threshold)?;
    transition_index(mu, x0_log10, threshold, threshold.ln())
}

fn transition_index(mu: f64, x0_log10: f64, threshold: f64, log_ceiling: f64) -> Result<u64> {
    let ln_mu = mu.ln();
    let mut k = 0u64;
    let mut log_x = x0_log10 * std::f64::consts::LN_10;
    while log_x < log_ceiling {
        let e = log_x.exp();
        let log1m = if e < 1e-12 { -e } else { (-e).ln_1p() };
        let next = ln_mu + log_x + log1m;
        k += 1;
        if next <= log_x || k >= MAX_TRANSITION_STEPS {
            return Err(non_convergence(mu, threshold));
        }
        log_x = next;
    }
    if log_x >= threshold.ln() {
        return Ok(k);
    }

    let mut x = if k == 0 { 10f64.powf(x0_log10) } else { log_x.exp() };
    while x < threshold {
        let next = mu * x * (1.0 - x);
        k += 1;
        if next == x || k >= MAX_TRANSITION_STEPS {
            // stuck on a fixed point below the threshold
            return Err(non_convergence(mu, threshold));
        }
        x = next;
    }
    Ok(k)
}

fn non_convergence(mu: f64, threshold: f64) -> Error {
    Error::Domain(format!(
        "trajectory never reaches {threshold} for mu = {mu} (fixed point {:.6})",
        1.0 - 1.0 / mu
    ))
}

/// How the length of the observed constant run is specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunLength {
    /// A run of `n` symbols, `n` assumed algorithmically typical.
    Explicit(u128),
    /// A run of `m^m` symbols.
    PowerTower(u64),
    /// A run of zeros that ends where the map first crosses `threshold`.
    MapDerived { mu: f64, x0_log10: f64, threshold: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunScenario {
    pub run_length: RunLength,
    /// The repeated symbol.
    pub observed_symbol: bool,
}

impl RunScenario {
    pub fn explicit(n: u128) -> Self {
        RunScenario {
            run_length: RunLength::Explicit(n),
            observed_symbol: true,
        }
    }

    pub fn power_tower(m: u64) -> Self {
        RunScenario {
            run_length: RunLength::PowerTower(m),
            observed_symbol: true,
        }
    }

    /// The run of zeros before the trajectory crosses `threshold`.
    pub fn map_derived(mu: f64, x0_log10: f64, threshold: f64) -> Self {
        RunScenario {
            run_length: RunLength::MapDerived {
                mu,
                x0_log10,
                threshold,
            },
            observed_symbol: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.run_length {
            RunLength::Explicit(n) if n < 1 => Err(Error::Config("explicit run length must be >= 1".into())),
            RunLength::PowerTower(m) if m < 2 => Err(Error::Config("power tower base must be >= 2".into())),
            RunLength::MapDerived {
                mu,
                x0_log10,
                threshold,
            } => check_transition_args(mu, x0_log10, threshold)
                .map_err(|e| Error::Config(format!("invalid map-derived scenario: {e}"))),
            _ => Ok(()),
        }
    }
}

/// Both predictions for one run.
///
/// `*_next_same` is the probability that the next symbol repeats the run;
/// `*_trend_break` is its complement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionReport {
    pub scenario: RunScenario,
    pub run_length: u128,
    pub laplace_next_same: f64,
    pub laplace_trend_break: f64,
    pub ap_next_same: f64,
    pub ap_trend_break: f64,
    pub k_bits_used: f64,
    /// Closed-form lower bound on the run length, map-derived runs only.
    pub transition_lower_bound: Option<u64>,
    pub notes: String,
}

pub fn compare_predictors(scenario: &RunScenario) -> Result<PredictionReport> {
    scenario.validate()?;
    let (run_length, descriptor, lower_bound) = match scenario.run_length {
        RunLength::Explicit(n) => (n, IntegerDescriptor::Typical(n), None),
        RunLength::PowerTower(m) => {
            let n = u32::try_from(m)
                .ok()
                .and_then(|e| (m as u128).checked_pow(e))
                .ok_or_else(|| Error::Domain(format!("{m}^{m} overflows 128 bits")))?;
            (n, IntegerDescriptor::PowerTower(m), None)
        }
        RunLength::MapDerived {
            mu,
            x0_log10,
            threshold,
        } => {
            let n_star = find_transition_index(mu, x0_log10, threshold)?;
            let desc = IntegerDescriptor::MapDerived(MapDescriptor { mu, x0_log10, eps: 0.0 });
            (
                n_star as u128,
                desc,
                Some(transition_lower_bound(mu, x0_log10, threshold)?),
            )
        }
    };
    let k_bits = integer_complexity_estimate(&descriptor)?;
    // the trend-break side is computed directly to keep precision for long runs
    let laplace_trend_break = 1.0 / (run_length as f64 + 2.0);
    let ap_trend_break = (-k_bits).exp2();
    Ok(PredictionReport {
        scenario: *scenario,
        run_length,
        laplace_next_same: laplace_predict(run_length, run_length)?,
        laplace_trend_break,
        ap_next_same: ap_predict(k_bits)?,
        ap_trend_break,
        k_bits_used: k_bits,
        transition_lower_bound: lower_bound,
        notes: CAVEAT.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Plain float iteration of the deterministic map.
    fn direct_transition(mu: f64, x0: f64, threshold: f64) -> u64 {
        let mut x = x0;
        let mut k = 0;
        while x < threshold {
            x = mu * x * (1.0 - x);
            k += 1;
        }
        k
    }

    #[test]
    fn laplace_examples() {
        assert_eq!(laplace_predict(3, 3).unwrap(), 0.8);
        assert_eq!(laplace_predict(0, 0).unwrap(), 0.5);
        let p = laplace_predict(50_000, 50_000).unwrap();
        assert_eq!(p, 50_001.0 / 50_002.0);
        assert!(p > 0.99998);
        assert!(laplace_predict(4, 3).is_err());
    }

    #[test]
    fn ap_examples() {
        assert_abs_diff_eq!(ap_predict(1000f64.log2()).unwrap(), 1.0 - 1.0 / 1000.0, epsilon = 1e-15);
        assert_eq!(ap_predict(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(ap_predict(5f64.log2()).unwrap(), 0.8, epsilon = 1e-15);
        assert!(ap_predict(-1.0).is_err());
    }

    #[test]
    fn one_step_transition() {
        assert_eq!(find_transition_index(2.5, 0.4f64.log10(), 0.5).unwrap(), 1);
    }

    #[test]
    fn astronomical_x0() {
        assert_eq!(transition_lower_bound(2.5, -19728.0, 0.5).unwrap(), 49_575);
        let n = find_transition_index(2.5, -19728.0, 0.5).unwrap();
        assert!((49_575..49_575 + 100).contains(&n), "{n}");
    }

    #[test]
    fn log_domain_agrees_with_direct_iteration() {
        for (exp, x0) in [(-3.0, 1e-3), (-6.0, 1e-6)] {
            let direct = direct_transition(2.5, x0, 0.5);
            assert_eq!(find_transition_index(2.5, exp, 0.5).unwrap(), direct);
            assert_eq!(log_domain_transition_index(2.5, exp, 0.5).unwrap(), direct);
        }
        // deep enough that the log phase runs for many steps
        for exp in [-7.0, -12.0, -30.0, -200.0] {
            let x0 = 10f64.powf(exp);
            assert_eq!(
                find_transition_index(2.5, exp, 0.5).unwrap(),
                direct_transition(2.5, x0, 0.5),
                "{exp}"
            );
        }
    }

    #[test]
    fn low_fixed_point_never_crosses() {
        assert!(matches!(find_transition_index(1.5, -3.0, 0.5), Err(Error::Domain(_))));
        assert!(find_transition_index(1.0, -3.0, 0.5).is_err());
        assert!(find_transition_index(2.5, 0.0, 0.5).is_err());
    }

    #[test]
    fn power_tower_report() {
        let r = compare_predictors(&RunScenario::power_tower(5)).unwrap();
        assert_eq!(r.run_length, 3125);
        assert_abs_diff_eq!(r.laplace_trend_break, 1.0 / 3127.0, epsilon = 1e-18);
        assert_abs_diff_eq!(r.ap_trend_break, 0.2, epsilon = 1e-15);
        assert!(r.ap_trend_break >= 100.0 * r.laplace_trend_break);
        assert!(r.notes.contains("O(1)"));
        assert!(compare_predictors(&RunScenario::power_tower(1)).is_err());
        assert!(compare_predictors(&RunScenario::power_tower(40)).is_err());
    }

    #[test]
    fn explicit_report_roughly_agrees() {
        let r = compare_predictors(&RunScenario::explicit(1000)).unwrap();
        assert_abs_diff_eq!(r.laplace_trend_break, 1.0 / 1002.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.ap_trend_break, 1.0 / 1000.0, epsilon = 1e-15);
        let ratio = r.ap_trend_break / r.laplace_trend_break;
        assert!((0.5..2.0).contains(&ratio));
    }

    #[test]
    fn map_derived_report() {
        let r = compare_predictors(&RunScenario::map_derived(2.5, -19728.0, 0.5)).unwrap();
        assert_eq!(r.transition_lower_bound, Some(49_575));
        assert!(r.ap_trend_break > 1.0 / r.run_length as f64);
        assert!(r.ap_trend_break > r.laplace_trend_break);
        assert!(r.laplace_next_same > 0.9999);
        assert!(!r.scenario.observed_symbol);
    }

    #[test]
    fn more_data_less_confidence() {
        // typical n = 1000 against the larger but simpler n' = 5^5 = 3125
        let typical = ap_predict(integer_complexity_estimate(&IntegerDescriptor::Typical(1000)).unwrap()).unwrap();
        let simple = ap_predict(integer_complexity_estimate(&IntegerDescriptor::PowerTower(5)).unwrap()).unwrap();
        assert!(typical > simple);
        assert!(laplace_predict(3125, 3125).unwrap() > laplace_predict(1000, 1000).unwrap());
    }

    proptest! {
        #[test]
        fn laplace_complementary(n in 0u128..1_000_000, frac in 0.0f64..=1.0) {
            let k = ((n as f64) * frac) as u128;
            let sum = laplace_predict(k, n).unwrap() + laplace_predict(n - k, n).unwrap();
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }

        #[test]
        fn predictors_monotone(a in 0.0f64..50.0, d in 0.01f64..10.0, n in 0u128..1_000_000) {
            prop_assert!(ap_predict(a + d).unwrap() > ap_predict(a).unwrap());
            prop_assert!(laplace_predict(n + 1, n + 1).unwrap() > laplace_predict(n, n).unwrap());
        }

        #[test]
        fn anti_monotone_confidence(n in 1000u128..1_000_000, m in 2u64..=9) {
            let mm = (m as u128).pow(m as u32);
            prop_assume!(mm > n && (m as f64).log2() < (n as f64).log2());
            let k_n = integer_complexity_estimate(&IntegerDescriptor::Typical(n)).unwrap();
            let k_m = integer_complexity_estimate(&IntegerDescriptor::PowerTower(m)).unwrap();
            prop_assert!(ap_predict(k_n).unwrap() > ap_predict(k_m).unwrap());
        }

        #[test]
        fn transition_at_least_lower_bound(mu in 2.05f64..3.0, exp in -300.0f64..-1.0) {
            let n = find_transition_index(mu, exp, 0.5).unwrap();
            prop_assert!(n >= transition_lower_bound(mu, exp, 0.5).unwrap());
        }
    }
}
