use std::fs;

use proptest::prelude::*;
use ris_noma::output::{read_sweep, write_sweep, CsvRow, Stable};
use ris_noma::queue_sim::OracleRow;
use ris_noma::optimize::ConvergenceRow;
use ris_noma::sweep::{
    sweep_delay_ee, sweep_reliability_vs_beta, sweep_sjnr_vs_n, DelayEeRow, RelBetaRow, SjnrRow, ThresholdRow,
};
use ris_noma::ExperimentConfig;

fn header_line<R: CsvRow>() -> String {
    R::HEADER.join(",")
}

#[test]
fn golden_headers() {
    assert_eq!(
        header_line::<DelayEeRow>(),
        "arrival_rate_pps,blocklength,retransmissions,frame_duration_s,utilization,mean_delay_s,energy_efficiency_bits_per_j,reliability"
    );
    assert_eq!(
        header_line::<RelBetaRow>(),
        "elements,beta,sjnr_user1,sjnr_min,replica_success,reliability,meets_threshold"
    );
    assert_eq!(header_line::<ThresholdRow>(), "elements,beta_grid,beta_refined,reference_beta");
    assert_eq!(
        header_line::<SjnrRow>(),
        "elements,beta,sjnr_user1,sjnr_min,growth,feasible,reference_sjnr_user1"
    );
    assert_eq!(
        header_line::<ConvergenceRow>(),
        "generation,best_objective,mean_objective,feasible_fraction,best_violation"
    );
    assert_eq!(
        header_line::<OracleRow>(),
        "utilization,service_s,arrival_rate_pps,analytic_delay_s,simulated_delay_s,relative_error"
    );
}

#[test]
fn delay_ee_sweep_values_and_round_trip() {
    let cfg = ExperimentConfig::default();
    let result = sweep_delay_ee(&cfg).unwrap();
    let at = |rate: f64, nb: u32| result.rows.iter().find(|r| r.arrival_rate_pps == rate && r.blocklength == nb).unwrap();
    let d100 = at(100.0, 108).mean_delay_s.value().unwrap();
    let d1300 = at(1300.0, 108).mean_delay_s.value().unwrap();
    assert!((d100 - 6.51e-4).abs() / 6.51e-4 < 5e-3);
    assert!((d1300 - 2.1e-3).abs() / 2.1e-3 < 0.025);
    let unstable = result.rows.iter().filter(|r| r.mean_delay_s == Stable::Unstable).count();
    assert!(unstable > 0);
    assert!(result.rows.iter().all(|r| (r.utilization >= 1.0 - 1e-12) == (r.mean_delay_s == Stable::Unstable)));
    assert!(result
        .rows
        .windows(2)
        .all(|w| (w[0].arrival_rate_pps, w[0].blocklength) < (w[1].arrival_rate_pps, w[1].blocklength)));

    let dir = tempfile::tempdir().unwrap();
    let path = write_sweep(dir.path(), "delay_ee", &result).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.contains(",unstable,unstable,"));
    assert!(!text.contains('\r'));
    assert_eq!(read_sweep::<DelayEeRow>(dir.path(), "delay_ee").unwrap(), result);
}

#[test]
fn rel_beta_sweep_structure_and_round_trip() {
    let mut cfg = ExperimentConfig::default();
    cfg.sweep.rel_elements = vec![16, 4];
    cfg.sweep.beta_stop = 10.0;
    let (grid, thresholds) = sweep_reliability_vs_beta(&cfg).unwrap();
    assert_eq!(grid.rows.len(), 2 * 21);
    assert_eq!(grid.rows[0].elements, 4);
    let zero = grid.rows.iter().find(|r| r.beta == 0.0).unwrap();
    assert_eq!(zero.reliability, 0.0);
    for t in &thresholds.rows {
        let (g, b) = (t.beta_grid.unwrap(), t.beta_refined.unwrap());
        assert!(b <= g && g - b <= cfg.sweep.beta_step);
    }
    let dir = tempfile::tempdir().unwrap();
    write_sweep(dir.path(), "rel_beta", &grid).unwrap();
    write_sweep(dir.path(), "rel_beta_thresholds", &thresholds).unwrap();
    assert_eq!(read_sweep::<RelBetaRow>(dir.path(), "rel_beta").unwrap(), grid);
    assert_eq!(read_sweep::<ThresholdRow>(dir.path(), "rel_beta_thresholds").unwrap(), thresholds);
}

#[test]
fn sjnr_sweep_is_deterministic_and_round_trips() {
    let cfg = ExperimentConfig::default();
    let a = sweep_sjnr_vs_n(&cfg).unwrap();
    let b = sweep_sjnr_vs_n(&cfg).unwrap();
    assert_eq!(a.rows, b.rows);
    assert_eq!(a.rows.len(), 9);
    assert!(a.rows[0].growth.is_none() && a.rows[1..].iter().all(|r| r.growth.is_some()));
    let dir = tempfile::tempdir().unwrap();
    write_sweep(dir.path(), "sjnr_n", &a).unwrap();
    assert_eq!(read_sweep::<SjnrRow>(dir.path(), "sjnr_n").unwrap(), a);
}

#[test]
fn ga_policy_sjnr_sweep_runs_under_desk_cap() {
    let mut cfg = ExperimentConfig::default();
    cfg.sweep.policy = ris_noma::config::SweepPolicy::Ga;
    cfg.sweep.sjnr_elements = vec![4, 16];
    cfg.ga.population_size = Some(20);
    cfg.ga.max_generations = Some(3);
    let rows = sweep_sjnr_vs_n(&cfg).unwrap().rows;
    assert!(rows.iter().all(|r| r.feasible.is_some() && r.sjnr_user1 >= 0.0));
    cfg.sweep.sjnr_elements = vec![4, 100];
    assert!(sweep_sjnr_vs_n(&cfg).is_err());
}

proptest! {
    #[test]
    fn arbitrary_rows_round_trip(
        rate in 1e-3..1e6f64,
        nb in 1u32..100_000,
        delay in proptest::option::of(1e-9..10.0f64),
        eta in proptest::option::of(0.0..1e20f64),
        rel in 0.0..=1.0f64,
    ) {
        let row = DelayEeRow {
            arrival_rate_pps: rate,
            blocklength: nb,
            retransmissions: 3,
            frame_duration_s: rate.recip(),
            utilization: rate * 1e-3,
            mean_delay_s: delay.into(),
            energy_efficiency_bits_per_j: eta.into(),
            reliability: rel,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        ris_noma::output::write_csv(&path, std::slice::from_ref(&row)).unwrap();
        prop_assert_eq!(ris_noma::output::read_csv::<DelayEeRow>(&path).unwrap(), vec![row]);
    }
}
