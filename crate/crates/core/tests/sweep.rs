//! Accuracy trends across sweep grids.

use regime_swk::cli::{cmd_sweep, DataSource, ExperimentConfig, H2Rule, SweepReport};
use regime_swk::synthgen::{gen_scenario, Scenario};

/// First seed whose `years`-year prefix holds a complete minority period.
fn seed_with_full_period(years: usize) -> u64 {
    (0u64..)
        .find(|&seed| {
            let ds = gen_scenario(Scenario::OneD, seed).unwrap().prefix_years(years).unwrap();
            let n = ds.truth.len();
            ds.periods.iter().any(|p| p.end - p.start == ds.spec.period_length && p.end <= n)
        })
        .unwrap()
}

fn sweep(scenario: Scenario, years: Option<usize>, data_seed: u64, h1: &[usize], h2: &[H2Rule], l: &[usize]) -> SweepReport {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(
        DataSource::Synthetic {
            scenario,
            seed: data_seed,
            years,
        },
        dir.path().join("sweep"),
    );
    cfg.h1 = h1.to_vec();
    cfg.h2 = h2.to_vec();
    cfg.l = l.to_vec();
    cmd_sweep(&cfg).unwrap()
}

fn median_at(report: &SweepReport, h1: usize, h2: usize, l: usize) -> f64 {
    report.cell(h1, h2, l).unwrap().row.ta_median.unwrap()
}

#[test]
fn median_accuracy_grows_with_window_size() {
    let pct = [H2Rule::Percent(20.0), H2Rule::Percent(30.0)];
    let report = sweep(Scenario::OneD, None, 0, &[20, 30, 35], &pct, &[1]);
    for rule in pct {
        let medians: Vec<f64> = [20, 30, 35]
            .iter()
            .map(|&h1| median_at(&report, h1, rule.resolve(h1).unwrap(), 1))
            .collect();
        assert!(medians.windows(2).all(|w| w[0] <= w[1]), "{rule}: {medians:?}");
    }
    for cell in &report.cells {
        let r = &cell.row;
        assert!(r.ta_median.unwrap() <= r.ta_max.unwrap());
        assert!(r.ta_metric_selected.unwrap() <= r.ta_max.unwrap());
    }
}

#[test]
fn two_directions_cannot_separate_correlation_regimes() {
    let report = sweep(Scenario::B, None, 0, &[60], &[H2Rule::Percent(20.0)], &[2, 4, 9]);
    let m2 = median_at(&report, 60, 12, 2);
    assert!(m2 < 0.65, "L=2 median {m2}");
    for l in [4, 9] {
        assert!(median_at(&report, 60, 12, l) > m2);
    }
}

#[test]
fn overlap_helps_small_datasets_most() {
    let rules = [H2Rule::Percent(100.0), H2Rule::Percent(20.0)];
    let gain = |years: Option<usize>, seed: u64| {
        let report = sweep(Scenario::OneD, years, seed, &[35], &rules, &[1]);
        median_at(&report, 35, 7, 1) - median_at(&report, 35, 35, 1)
    };
    let small = gain(Some(1), seed_with_full_period(1));
    let large = gain(None, 0);
    assert!(small > large, "1-year gain {small:.4}, 20-year gain {large:.4}");
}

#[test]
fn failed_cells_do_not_stop_the_sweep() {
    let report = sweep(Scenario::OneD, Some(1), seed_with_full_period(1), &[30, 1750], &[H2Rule::Absolute(30)], &[1]);
    let ok = report.cell(30, 30, 1).unwrap();
    assert!(ok.error.is_none() && ok.row.ta_median.is_some());
    let failed = report.cell(1750, 30, 1).unwrap();
    assert!(failed.row.ta_median.is_none());
    assert!(failed.error.as_deref().unwrap().contains("insufficient data"));
}
