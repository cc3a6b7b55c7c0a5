use frame_lab::search::masks_with_popcount;
use frame_lab::{canonical_pattern, simulate, DedupMode, FrameSpec, NoiseModel, SimReport};

const SIGMA_Q2: f64 = 1e-2;
const TRIALS: usize = 100_000;

fn class_reports(n: usize, k: usize) -> Vec<SimReport> {
    let spec = FrameSpec::real(n, k).unwrap();
    let mut seen = Vec::new();
    let mut out = Vec::new();
    for p in masks_with_popcount(n, k) {
        let c = canonical_pattern(&p, DedupMode::Rotation);
        if seen.contains(&c) {
            continue;
        }
        seen.push(c.clone());
        let noise = NoiseModel::IidAdditive { sigma_q2: SIGMA_Q2 };
        out.push(simulate(&spec, &c, noise, 1.0, TRIALS, 17).unwrap());
    }
    out
}

#[test]
fn empirical_figures_within_three_standard_errors() {
    for (n, k) in [(6, 3), (7, 5)] {
        for r in class_reports(n, k) {
            assert!(
                (r.empirical_mse - r.predicted_mse).abs() <= 3.0 * r.mse_std_error,
                "{r:?}"
            );
            assert!(
                (r.empirical_sigma_y2 - r.predicted_sigma_y2).abs() <= 3.0 * r.sigma_y2_std_error,
                "{r:?}"
            );
        }
    }
}

#[test]
fn mse_does_not_depend_on_the_pattern() {
    for (n, k) in [(6, 3), (7, 5)] {
        let reports = class_reports(n, k);
        for a in &reports {
            for b in &reports {
                let combined = (a.mse_std_error.powi(2) + b.mse_std_error.powi(2)).sqrt();
                assert!((a.empirical_mse - b.empirical_mse).abs() <= 4.0 * combined);
            }
        }
        // ...while the codevector variance clearly does.
        let spread = reports
            .iter()
            .map(|r| r.empirical_sigma_y2)
            .fold(f64::NEG_INFINITY, f64::max)
            / reports
                .iter()
                .map(|r| r.empirical_sigma_y2)
                .fold(f64::INFINITY, f64::min);
        assert!(spread > 2.0);
    }
}
