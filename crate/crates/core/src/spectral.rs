//! Eigen-structure of subframes and the closed forms that predict it.
//!
//! For a subframe `G_k` (k rows of an `(n, k)` generator) the eigenvalues of
//! `G_k·G_kᴴ` control everything downstream: the codevector variance of the
//! systematic frame scales with `Σ 1/λ_i`, and `Π λ_i` has a closed form in
//! terms of the circular distances between the selected rows.

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::frame::{build_generator, extract_subframe, FrameSpec, PatternMask};
use crate::linalg::{eig_hermitian, ComplexMatrix, Spectrum, DEFAULT_HERMITIAN_TOL};
use crate::search::{enumerate_classes, masks_with_popcount, DedupMode};

/// `λ_max − λ_min` at or below this declares a tight frame.
pub const TIGHT_TOL: f64 = 1e-9;
/// Eigenvalues below this make `Σ 1/λ` unbounded.
pub const UNBOUNDED_EIGENVALUE: f64 = 1e-12;
/// Margin applied to the unit threshold in the extreme-eigenvalue checks.
pub const THEOREM_TOL: f64 = 1e-9;
/// Largest `n` for which the theorem-2 check walks every k-subset.
pub const EXHAUSTIVE_SUBSET_LIMIT: usize = 16;
/// Above this `n` the Vandermonde product is accumulated in log domain.
const LOG_DOMAIN_ABOVE: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub pattern: PatternMask,
    pub eigenvalues: Spectrum,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `Σ 1/λ_i`; `+∞` (serialized as `null`) when some eigenvalue vanishes.
    #[serde(serialize_with = "finite_or_null")]
    pub inv_sum: f64,
    pub product: f64,
    pub is_tight: bool,
    pub det_formula: f64,
}

impl SpectrumReport {
    pub fn is_bounded(&self) -> bool {
        self.inv_sum.is_finite()
    }

    pub fn k(&self) -> usize {
        self.eigenvalues.len()
    }
}

fn finite_or_null<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

/// Eigenvalues of `G_p·G_pᴴ` for the rows picked by `pattern` (any count),
/// with tiny negative rounding clamped to zero.
pub fn subframe_spectrum(g: &ComplexMatrix, pattern: &PatternMask) -> Result<Spectrum> {
    let sub = extract_subframe(g, pattern)?;
    Ok(eig_hermitian(&sub.gram_outer(), DEFAULT_HERMITIAN_TOL)?.clamp_nonnegative(1e-10))
}

pub fn spectrum_report(g: &ComplexMatrix, pattern: &PatternMask) -> Result<SpectrumReport> {
    let (n, k) = (g.rows(), g.cols());
    if pattern.len() != n || pattern.count() != k {
        return Err(Error::DimensionMismatch(format!(
            "pattern {pattern} must have length {n} with {k} data positions"
        )));
    }
    let eigenvalues = subframe_spectrum(g, pattern)?;
    let lambda_min = eigenvalues.min();
    let lambda_max = eigenvalues.max();
    let inv_sum = if lambda_min < UNBOUNDED_EIGENVALUE {
        f64::INFINITY
    } else {
        eigenvalues.values().iter().map(|v| 1.0 / v).sum()
    };
    let product = eigenvalues.product();
    let det_formula = vandermonde_det(n, k, &pattern.positions())?;
    Ok(SpectrumReport {
        pattern: pattern.clone(),
        lambda_min,
        lambda_max,
        inv_sum,
        product,
        is_tight: lambda_max - lambda_min <= TIGHT_TOL,
        det_formula,
        eigenvalues,
    })
}

/// `det(G_k·G_kᴴ)` from the selected 1-based rows alone:
/// `(1/k^k)·Π_{p<q} 4·sin²(π(q−p)/n)`.
pub fn vandermonde_det(n: usize, k: usize, rows: &[usize]) -> Result<f64> {
    if rows.len() != k || k == 0 {
        return Err(Error::InvalidSubset(format!(
            "expected {k} rows, got {}",
            rows.len()
        )));
    }
    let mut sorted = rows.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidSubset(format!("repeated row in {rows:?}")));
    }
    if sorted[0] == 0 || sorted[k - 1] > n {
        return Err(Error::InvalidSubset(format!(
            "rows {rows:?} outside 1..={n}"
        )));
    }
    let term = |p: usize, q: usize| {
        let s = (std::f64::consts::PI * (q - p) as f64 / n as f64).sin();
        4.0 * s * s
    };
    let pairs = sorted
        .iter()
        .enumerate()
        .flat_map(|(i, &p)| sorted[i + 1..].iter().map(move |&q| (p, q)));
    let kf = k as f64;
    if n > LOG_DOMAIN_ABOVE {
        let log: f64 = pairs.map(|(p, q)| term(p, q).ln()).sum::<f64>() - kf * kf.ln();
        Ok(log.exp())
    } else {
        Ok(pairs.map(|(p, q)| term(p, q)).product::<f64>() / kf.powi(k as i32))
    }
}

/// Both sides of `Π_{r=1}^{n−1} (sin²(πr/n))^{n−r} = n^n / 2^{n(n−1)}`, in log form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SineProductIdentity {
    pub n: usize,
    pub log_lhs: f64,
    pub log_rhs: f64,
}

impl SineProductIdentity {
    pub fn lhs(&self) -> f64 {
        self.log_lhs.exp()
    }

    pub fn rhs(&self) -> f64 {
        self.log_rhs.exp()
    }

    pub fn log_gap(&self) -> f64 {
        (self.log_lhs - self.log_rhs).abs()
    }
}

pub fn sine_product_identity(n: usize) -> Result<SineProductIdentity> {
    if n < 2 {
        return Err(Error::InvalidSize(format!(
            "identity needs n >= 2, got {n}"
        )));
    }
    let nf = n as f64;
    let log_lhs = (1..n)
        .map(|r| {
            let s = (std::f64::consts::PI * r as f64 / nf).sin();
            (n - r) as f64 * (s * s).ln()
        })
        .sum();
    let log_rhs = nf * nf.ln() - nf * (nf - 1.0) * std::f64::consts::LN_2;
    Ok(SineProductIdentity {
        n,
        log_lhs,
        log_rhs,
    })
}

/// Smallest eigenvalue of any row subframe is at most one, the largest at least one.
pub fn check_theorem1(g: &ComplexMatrix, pattern: &PatternMask) -> Result<bool> {
    let s = subframe_spectrum(g, pattern)?;
    Ok(s.min() <= 1.0 + THEOREM_TOL && s.max() >= 1.0 - THEOREM_TOL)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem2Check {
    pub n: usize,
    pub k: usize,
    /// `(n/k − 1)/⌊n/k⌋`
    pub bound: f64,
    pub max_lambda_min: f64,
    /// First subset (in enumeration order) attaining `max_lambda_min`.
    pub argmax: PatternMask,
    pub subsets_examined: usize,
    pub holds: bool,
}

/// Largest `λ_min(G_k·G_kᴴ)` over k-subsets when `k ∤ n`, against the bound.
///
/// Walks every k-subset up to `n = 16`, rotation classes beyond (the
/// spectrum is invariant under circular shifts of the rows).
pub fn check_theorem2(n: usize, k: usize) -> Result<Theorem2Check> {
    if k == 0 || k > n {
        return Err(Error::InvalidSpec(format!(
            "need 1 <= k <= n, got n={n}, k={k}"
        )));
    }
    if n.is_multiple_of(k) {
        return Err(Error::NotApplicable(format!(
            "n = {n} is a multiple of k = {k}; evenly spaced rows are tight"
        )));
    }
    // The subframe spectrum does not depend on the code kind or the band split.
    let spec = FrameSpec::complex(n, k)?;
    let g = build_generator(&spec)?;
    let masks: Vec<PatternMask> = if n <= EXHAUSTIVE_SUBSET_LIMIT {
        masks_with_popcount(n, k)
    } else {
        enumerate_classes(&spec, DedupMode::Rotation)?
    };
    let (max_lambda_min, at) = masks
        .par_iter()
        .enumerate()
        .map(|(i, m)| subframe_spectrum(&g, m).map(|s| (s.min(), i)))
        .try_reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| {
                // Larger value wins; equal values keep the earlier subset.
                Ok(match a.0.total_cmp(&b.0) {
                    std::cmp::Ordering::Less => b,
                    std::cmp::Ordering::Greater => a,
                    std::cmp::Ordering::Equal => {
                        if a.1 <= b.1 {
                            a
                        } else {
                            b
                        }
                    }
                })
            },
        )?;
    let ratio = n as f64 / k as f64;
    let bound = (ratio - 1.0) / (n / k) as f64;
    Ok(Theorem2Check {
        n,
        k,
        bound,
        max_lambda_min,
        argmax: masks[at].clone(),
        subsets_examined: masks.len(),
        holds: max_lambda_min <= bound + THEOREM_TOL && max_lambda_min < 1.0 - THEOREM_TOL,
    })
}

/// `σ_y² = σ_x²·(1/k)·Σ 1/λ_i` for the systematic frame behind `report`.
pub fn codevector_variance(report: &SpectrumReport, sigma_x2: f64) -> f64 {
    if sigma_x2 == 0.0 {
        return 0.0;
    }
    sigma_x2 * report.inv_sum / report.k() as f64
}

/// Reconstruction MSE `(k/n)·σ_q²`, the same for every systematic frame of the code.
pub fn predicted_mse(n: usize, k: usize, sigma_q2: f64) -> f64 {
    k as f64 / n as f64 * sigma_q2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::FrameSpec;

    fn report(n: usize, k: usize, pattern: &str) -> SpectrumReport {
        let g = build_generator(&FrameSpec::real(n, k).unwrap()).unwrap();
        spectrum_report(&g, &pattern.parse().unwrap()).unwrap()
    }

    #[test]
    fn table_rows_six_three() {
        let worst = report(6, 3, "xxx---");
        assert!((worst.lambda_min - 0.0572).abs() < 5e-5);
        assert!((worst.lambda_max - 1.9428).abs() < 5e-5);
        assert!((worst.inv_sum - 19.0).abs() < 5e-3);
        assert!((worst.product - 0.1111).abs() < 5e-3);
        assert!(!worst.is_tight);

        let best = report(6, 3, "x-x-x-");
        for v in best.eigenvalues.values() {
            assert!((v - 1.0).abs() < 1e-9);
        }
        assert!((best.inv_sum - 3.0).abs() < 1e-9);
        assert!((best.product - 1.0).abs() < 1e-9);
        assert!(best.is_tight);

        let mid = report(6, 3, "xx-x--");
        assert!((mid.product - 0.4444).abs() < 5e-5);
    }

    #[test]
    fn table_row_seven_five() {
        let r = report(7, 5, "xx-xx-x");
        assert!((r.lambda_min - 0.3110).abs() < 5e-5);
        assert!((r.lambda_max - 1.4).abs() < 5e-5);
        assert!((r.inv_sum - 7.40).abs() < 5e-3);
        assert!((r.product - 0.4173).abs() < 5e-5);
    }

    #[test]
    fn report_rejects_wrong_row_count() {
        let g = build_generator(&FrameSpec::real(6, 3).unwrap()).unwrap();
        let p: PatternMask = "xx----".parse().unwrap();
        assert!(matches!(
            spectrum_report(&g, &p),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn vandermonde_closed_forms() {
        assert!((vandermonde_det(6, 3, &[1, 3, 5]).unwrap() - 1.0).abs() < 1e-12);
        assert!((vandermonde_det(6, 3, &[1, 2, 3]).unwrap() - 1.0 / 9.0).abs() < 1e-12);
        assert!((vandermonde_det(9, 1, &[4]).unwrap() - 1.0).abs() < 1e-15);
        assert!(vandermonde_det(6, 3, &[1, 2]).is_err());
        assert!(vandermonde_det(6, 2, &[2, 2]).is_err());
        assert!(vandermonde_det(6, 2, &[0, 2]).is_err());
        assert!(vandermonde_det(6, 2, &[1, 7]).is_err());
    }

    #[test]
    fn vandermonde_log_domain_matches_direct() {
        // n = 24 goes through the log path; rows are every third row, so det = 1.
        let rows: Vec<usize> = (0..8).map(|i| 1 + 3 * i).collect();
        assert!((vandermonde_det(24, 8, &rows).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sine_identity_small() {
        let two = sine_product_identity(2).unwrap();
        assert!((two.lhs() - 1.0).abs() < 1e-15 && (two.rhs() - 1.0).abs() < 1e-15);
        let four = sine_product_identity(4).unwrap();
        assert!((four.lhs() - 1.0 / 16.0).abs() < 1e-15);
        assert!((four.rhs() - 1.0 / 16.0).abs() < 1e-15);
        assert!(sine_product_identity(32).unwrap().log_gap() <= 1e-9);
        assert!(sine_product_identity(1).is_err());
    }

    #[test]
    fn theorem1_edge_cases() {
        let g = build_generator(&FrameSpec::real(7, 5).unwrap()).unwrap();
        assert!(check_theorem1(&g, &"---x---".parse().unwrap()).unwrap());
        let full = PatternMask::full(7);
        let s = subframe_spectrum(&g, &full).unwrap();
        assert!((s.max() - 1.4).abs() < 1e-10);
        assert_eq!(s.min(), 0.0);
        assert!(check_theorem1(&g, &full).unwrap());
        for m in masks_with_popcount(7, 5) {
            assert!(check_theorem1(&g, &m).unwrap());
        }
    }

    #[test]
    fn theorem2_cases() {
        let t = check_theorem2(7, 5).unwrap();
        assert!((t.bound - 0.4).abs() < 1e-15);
        assert!((t.max_lambda_min - 0.3110).abs() < 5e-5);
        assert!(t.holds);
        assert!(matches!(check_theorem2(6, 3), Err(Error::NotApplicable(_))));
        let t53 = check_theorem2(5, 3).unwrap();
        assert_eq!(t53.subsets_examined, 10);
        assert!(t53.holds);
    }

    #[test]
    fn variance_and_mse() {
        let tight = report(6, 3, "x-x-x-");
        assert!((codevector_variance(&tight, 1.0) - 1.0).abs() < 1e-9);
        let worst = report(6, 3, "xxx---");
        assert!((codevector_variance(&worst, 1.0) - 19.0 / 3.0).abs() < 1e-8);
        assert_eq!(codevector_variance(&worst, 0.0), 0.0);
        assert_eq!(predicted_mse(6, 3, 1.0), 0.5);
        assert!((predicted_mse(7, 5, 1e-4) - 7.142857142857143e-5).abs() < 1e-18);
        assert_eq!(predicted_mse(7, 5, 0.0), 0.0);
    }

    #[test]
    fn unbounded_inv_sum_serializes_as_null() {
        let mut r = report(6, 3, "xxx---");
        r.inv_sum = f64::INFINITY;
        assert!(!r.is_bounded());
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"inv_sum\":null"));
        assert!(json.contains("\"pattern\":\"xxx---\""));
    }
}
