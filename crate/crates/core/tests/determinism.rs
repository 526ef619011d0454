use std::process::Command;

use fermibath::channel_maps::DEFAULT_TOL_SING;
use fermibath::scaling::{lambda_scan, scan_csv, sweep_csv, sweep_eta, GridPolicy, ScanMeasure};
use proptest::prelude::*;
use tempfile::tempdir;

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sweep_is_bitwise_stable_across_pools(
        half_sizes in prop::collection::vec(2usize..40, 2..6),
        lambda in 0.3f64..1.5,
        delta in 0.01f64..0.3,
        threads in 2usize..5,
    ) {
        let sizes: Vec<usize> = half_sizes.iter().map(|h| 2 * h).collect();
        let policy = GridPolicy { min_points: 256, ..GridPolicy::default() };
        let one = in_pool(1, || sweep_eta(&sizes, lambda, delta, &policy, DEFAULT_TOL_SING)).unwrap();
        let many = in_pool(threads, || sweep_eta(&sizes, lambda, delta, &policy, DEFAULT_TOL_SING)).unwrap();
        prop_assert_eq!(sweep_csv(&one), sweep_csv(&many));
    }

    #[test]
    fn lambda_scan_is_bitwise_stable_across_pools(
        lambdas in prop::collection::vec(0.2f64..1.6, 1..6),
        threads in 2usize..5,
    ) {
        let policy = GridPolicy { min_points: 256, ..GridPolicy::default() };
        for measure in [ScanMeasure::Eta, ScanMeasure::Witness] {
            let one = in_pool(1, || lambda_scan(&lambdas, 30, 0.05, measure, &policy, DEFAULT_TOL_SING)).unwrap();
            let many = in_pool(threads, || lambda_scan(&lambdas, 30, 0.05, measure, &policy, DEFAULT_TOL_SING)).unwrap();
            prop_assert_eq!(scan_csv(&one), scan_csv(&many));
        }
    }
}

#[test]
fn cli_output_ignores_worker_count() {
    let dir = tempdir().unwrap();
    let files = |workers: &str| -> Vec<String> {
        let out = dir.path().join(workers);
        let status = Command::new(env!("CARGO_BIN_EXE_fermibath"))
            .args(["scaling", "--sizes", "20,26,34,40", "--lambda", "0.99", "--delta", "0.01", "--onset"])
            .args(["--workers", workers, "-q", "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        ["sweep.csv", "onset.csv", "fit.csv", "scaling.svg"]
            .iter()
            .map(|f| std::fs::read_to_string(out.join(f)).unwrap())
            .collect()
    };
    assert_eq!(files("1"), files("3"));
}
