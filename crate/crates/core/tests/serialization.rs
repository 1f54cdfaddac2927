//! Record-type serialization: JSON round trips are lossless and the CSV
//! rows parse back to the exact field values.

use pspin_core::experiments::{
    run_concentration, run_overlap_path, run_stability, ConcentrationConfig, PathConfig,
    Quantity, StabilityConfig,
};
use pspin_core::oracle::{chaos_check, ogp_scan, null_overlap_model};
use pspin_core::report::{
    path_csv_rows, stability_csv_rows, RunMetadata,
};
use pspin_core::schedules::{ScheduleConfig, TapConfig};
use pspin_core::tensor::{CouplingTensor, NormReport};

fn round_trip<T>(value: &T) -> T
where
    T: serde::Serialize + for<'de> serde::Deserialize<'de>,
{
    serde_json::from_str(&serde_json::to_string(value).unwrap()).unwrap()
}

fn tap_config(t: usize) -> ScheduleConfig {
    ScheduleConfig::Tap(TapConfig {
        beta: 1.5,
        q: 1.0,
        a: vec![0.1],
        t,
        m: 2.0,
        data_driven: false,
    })
}

#[test]
fn json_round_trips_are_lossless() {
    let stability = run_stability(&StabilityConfig {
        p: 3,
        n: 5,
        schedule: tap_config(2),
        pair_count: 2,
        tau_small: Some(0.1),
        seed: 1,
        c2_samples: 4,
    })
    .unwrap();
    for r in &stability.records {
        assert_eq!(&round_trip(r), r);
    }

    let path = run_overlap_path(&PathConfig {
        p: 3,
        n: 5,
        schedule: tap_config(2),
        delta: 0.5,
        seed: 2,
        mu_probe: Some(0.1),
    })
    .unwrap();
    for r in &path {
        assert_eq!(&round_trip(r), r);
    }

    let concentration = run_concentration(&ConcentrationConfig {
        quantity: Quantity::EtaN,
        p: 3,
        n_list: vec![5],
        replicas: 3,
        seed: 3,
        schedule: None,
    })
    .unwrap();
    for r in &concentration {
        assert_eq!(&round_trip(r), r);
    }

    let a = CouplingTensor::<f64>::sample_gaussian(3, 6, 4).unwrap();
    let ahat = CouplingTensor::<f64>::sample_gaussian(3, 6, 5).unwrap();
    let ogp = ogp_scan(&a, &ahat, &[0.0, 1.0], 0.05, 0.05, 0.02).unwrap();
    assert_eq!(round_trip(&ogp), ogp);

    let chaos = chaos_check::<f64>(3, 6, 4, 0.05, 6).unwrap();
    assert_eq!(round_trip(&chaos), chaos);

    let null = null_overlap_model(6, 4, 100, 7);
    assert_eq!(round_trip(&null), null);

    let norms = a.norms(2, 5, 8).unwrap();
    let norms_back: NormReport = round_trip(&norms);
    assert_eq!(norms_back, norms);

    let meta = RunMetadata::new(9, "{\"p\":3}");
    assert_eq!(round_trip(&meta), meta);
}

#[test]
fn csv_rows_parse_back_to_exact_values() {
    let outcome = run_stability(&StabilityConfig {
        p: 3,
        n: 5,
        schedule: tap_config(2),
        pair_count: 2,
        tau_small: Some(0.05),
        seed: 11,
        c2_samples: 4,
    })
    .unwrap();
    for (row, record) in stability_csv_rows(&outcome.records)
        .iter()
        .zip(outcome.records.iter())
    {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[0].parse::<usize>().unwrap(), record.pair);
        assert_eq!(fields[1].parse::<usize>().unwrap(), record.t);
        assert_eq!(fields[2].parse::<f64>().unwrap(), record.beta_n_t);
        assert_eq!(fields[3].parse::<f64>().unwrap(), record.v_dev_t);
        assert_eq!(fields[4].parse::<f64>().unwrap(), record.op_dist);
        assert_eq!(fields[5].parse::<f64>().unwrap(), record.bound);
        assert_eq!(fields[6].parse::<f64>().unwrap(), record.k);
    }

    let records = run_overlap_path(&PathConfig {
        p: 3,
        n: 5,
        schedule: tap_config(2),
        delta: 0.25,
        seed: 12,
        mu_probe: None,
    })
    .unwrap();
    for (row, record) in path_csv_rows(&records).iter().zip(records.iter()) {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[0].parse::<usize>().unwrap(), record.n);
        assert_eq!(fields[1].parse::<f64>().unwrap(), record.tau_n);
        assert_eq!(fields[2].parse::<f64>().unwrap(), record.overlap_n);
        assert_eq!(fields[3].parse::<f64>().unwrap(), record.energy_n);
        assert_eq!(fields[4].parse::<f64>().unwrap(), record.jump_n);
    }
}
