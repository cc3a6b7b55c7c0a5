//! Self-check suites over every code up to a given length.
//!
//! Each claim is evaluated for every `(n, k)` with `n <= n_max` and reports
//! its worst residual, so a failure points at the offending code directly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::{
    build_dft_matrix, build_generator, gram_entry_formula, FrameKind, FrameSpec, PatternMask,
};
use crate::linalg::{circulant_defect, determinant, ComplexMatrix};
use crate::search::{
    canonical_pattern, enumerate_classes, masks_with_popcount, rank_patterns, DedupMode,
    SearchResult,
};
use crate::spectral::{
    check_theorem2, sine_product_identity, subframe_spectrum, Theorem2Check, THEOREM_TOL, TIGHT_TOL,
};

pub const MAX_VERIFY_N: usize = 16;
/// Up to this length the extreme-eigenvalue claim visits every row subset;
/// beyond it, one subset per rotation class.
pub const EXHAUSTIVE_ROW_SUBSETS: usize = 10;

const STRUCTURE_TOL: f64 = 1e-10;
const UNITARY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-9;
const DET_REL_TOL: f64 = 1e-8;
const ARG_TOL: f64 = 1e-9;
const MAX_LISTED_FAILURES: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimResult {
    pub name: &'static str,
    pub description: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub worst_residual: f64,
    pub tolerance: f64,
    pub failures: Vec<String>,
}

struct Claim {
    name: &'static str,
    description: &'static str,
    tolerance: f64,
    cases: usize,
    worst: f64,
    failures: Vec<String>,
    failed: bool,
}

impl Claim {
    fn new(name: &'static str, description: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            description,
            tolerance,
            cases: 0,
            worst: 0.0,
            failures: Vec::new(),
            failed: false,
        }
    }

    /// Records a residual that must stay within the claim tolerance.
    fn residual(&mut self, value: f64, what: impl FnOnce() -> String) {
        self.cases += 1;
        if value.is_nan() || value > self.worst {
            self.worst = value;
        }
        if value.is_nan() || value > self.tolerance {
            self.fail(what);
        }
    }

    /// Records a pass/fail case whose residual is tracked separately.
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.fail(what);
        }
    }

    fn fail(&mut self, what: impl FnOnce() -> String) {
        self.failed = true;
        if self.failures.len() < MAX_LISTED_FAILURES {
            self.failures.push(what());
        }
    }

    fn finish(self) -> ClaimResult {
        ClaimResult {
            name: self.name,
            description: self.description,
            passed: !self.failed,
            cases: self.cases,
            worst_residual: self.worst,
            tolerance: self.tolerance,
            failures: self.failures,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub n_max: usize,
    pub all_passed: bool,
    pub claims: Vec<ClaimResult>,
    pub theorem2: Vec<Theorem2Check>,
}

impl VerifyReport {
    pub fn claim(&self, name: &str) -> Option<&ClaimResult> {
        self.claims.iter().find(|c| c.name == name)
    }
}

fn codes(n_max: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=n_max).flat_map(|n| (1..=n).map(move |k| (n, k)))
}

/// Specs of both kinds for `(n, k)`; the real one only where it exists.
fn specs_for(n: usize, k: usize) -> Vec<FrameSpec> {
    [FrameKind::Real, FrameKind::Complex]
        .into_iter()
        .filter_map(|kind| FrameSpec::new(n, k, kind).ok())
        .collect()
}

/// Row subsets of size `p` to test: all of them for small `n`, one per rotation class otherwise.
pub fn row_subsets(n: usize, p: usize) -> Result<Vec<PatternMask>> {
    if n <= EXHAUSTIVE_ROW_SUBSETS {
        Ok(masks_with_popcount(n, p))
    } else {
        enumerate_classes(&FrameSpec::complex(n, p)?, DedupMode::Rotation)
    }
}

/// Whether `pattern` is a rotation of every `(n/k)`-th row.
pub fn is_evenly_spaced(pattern: &PatternMask) -> bool {
    let (n, k) = (pattern.len(), pattern.count());
    k > 0
        && n % k == 0
        && PatternMask::evenly_spaced(n, k, 0)
            .map(|even| {
                canonical_pattern(&even, DedupMode::Rotation)
                    == canonical_pattern(pattern, DedupMode::Rotation)
            })
            .unwrap_or(false)
}

pub fn is_circularly_consecutive(pattern: &PatternMask) -> bool {
    let (n, k) = (pattern.len(), pattern.count());
    k > 0
        && PatternMask::consecutive(n, k, 0)
            .map(|c| {
                canonical_pattern(&c, DedupMode::Rotation)
                    == canonical_pattern(pattern, DedupMode::Rotation)
            })
            .unwrap_or(false)
}

pub fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Runs every claim for all codes with `n <= n_max`.
pub fn run_verification(n_max: usize) -> Result<VerifyReport> {
    if n_max == 0 || n_max > MAX_VERIFY_N {
        return Err(Error::InvalidSize(format!(
            "n_max must be in 1..={MAX_VERIFY_N}, got {n_max}"
        )));
    }

    let mut unitary = Claim::new("dft-unitary", "W^H W = I for every DFT size", UNITARY_TOL);
    let mut frame_bound = Claim::new(
        "frame-bound",
        "G^H G = (n/k) I for real and complex codes",
        STRUCTURE_TOL,
    );
    let mut lemma1 = Claim::new(
        "lemma1-structure",
        "G G^H is Toeplitz and circulant with unit diagonal, both kinds",
        STRUCTURE_TOL,
    );
    let mut entry_formula = Claim::new(
        "lemma1-entry-formula",
        "closed-form band sum reproduces every entry of G G^H",
        STRUCTURE_TOL,
    );
    let mut trace = Claim::new(
        "subframe-trace",
        "eigenvalues of every row subframe sum to its row count",
        TRACE_TOL,
    );
    let mut theorem1 = Claim::new(
        "theorem1",
        "every row subframe has lambda_min <= 1 <= lambda_max",
        THEOREM_TOL,
    );
    let mut theorem2 = Claim::new(
        "theorem2",
        "for k not dividing n, max lambda_min < 1 and <= (n/k - 1)/floor(n/k)",
        THEOREM_TOL,
    );
    let mut sine = Claim::new(
        "sine-product-identity",
        "product of sin^2 powers equals n^n / 2^(n(n-1))",
        1e-9,
    );
    let mut det = Claim::new(
        "determinant-agreement",
        "eigenvalue product, Vandermonde closed form and LU determinant agree",
        DET_REL_TOL,
    );
    let mut tight = Claim::new(
        "tight-existence",
        "a subframe is tight iff k divides n and its rows are evenly spaced",
        TIGHT_TOL,
    );
    let mut argminmax = Claim::new(
        "argmin-argmax",
        "classes minimizing sum 1/lambda are exactly those maximizing prod lambda",
        ARG_TOL,
    );
    let mut worst_consecutive = Claim::new(
        "worst-is-consecutive",
        "the largest sum 1/lambda belongs to circularly consecutive data positions",
        ARG_TOL,
    );
    let mut theorem2_checks = Vec::new();

    for n in 1..=n_max {
        let w = build_dft_matrix(n)?;
        let d = w
            .adjoint()
            .matmul(&w)?
            .max_abs_diff(&ComplexMatrix::identity(n));
        unitary.residual(d, || format!("n={n}: {d:e}"));
        if n >= 2 {
            let id = sine_product_identity(n)?;
            sine.residual(id.log_gap(), || {
                format!("n={n}: log gap {:e}", id.log_gap())
            });
        }
    }

    for (n, k) in codes(n_max) {
        for spec in specs_for(n, k) {
            let tag = || format!("({n},{k}) {}", spec.kind());
            let g = build_generator(&spec)?;
            let scaled = ComplexMatrix::identity(k).scale(n as f64 / k as f64);
            let fb = g.adjoint().matmul(&g)?.max_abs_diff(&scaled);
            frame_bound.residual(fb, || format!("{}: {fb:e}", tag()));

            let ggh = g.gram_outer();
            let circ = circulant_defect(&ggh)?;
            let diag = ggh
                .diagonal()
                .iter()
                .map(|z| (z - 1.0).norm())
                .fold(0.0, f64::max);
            let s = circ.max(diag);
            lemma1.residual(s, || format!("{}: {s:e}", tag()));

            let mut worst_entry = 0.0f64;
            for r in 1..=n {
                for c in 1..=n {
                    let e = (gram_entry_formula(&spec, r, c) - ggh[(r - 1, c - 1)].conj()).norm();
                    worst_entry = worst_entry.max(e);
                }
            }
            entry_formula.residual(worst_entry, || format!("{}: {worst_entry:e}", tag()));
        }

        // Subframe spectra do not depend on the kind; the complex code exists for every (n, k).
        let spec = FrameSpec::complex(n, k)?;
        let g = build_generator(&spec)?;
        for p in 1..=n {
            for mask in row_subsets(n, p)? {
                let s = subframe_spectrum(&g, &mask)?;
                let tr = (s.sum() - p as f64).abs();
                trace.residual(tr, || format!("({n},{k}) rows {mask}: {tr:e}"));
                let excess = (s.min() - 1.0).max(1.0 - s.max()).max(0.0);
                theorem1.residual(excess, || {
                    format!("({n},{k}) rows {mask}: min {} max {}", s.min(), s.max())
                });
            }
        }

        if n % k != 0 {
            let t = check_theorem2(n, k)?;
            theorem2.residual((t.max_lambda_min - t.bound).max(0.0), || {
                format!(
                    "({n},{k}): max lambda_min {} vs bound {}",
                    t.max_lambda_min, t.bound
                )
            });
            theorem2.check(t.holds, || {
                format!("({n},{k}): max lambda_min {} not below 1", t.max_lambda_min)
            });
            theorem2_checks.push(t);
        }

        let ranked = rank_patterns(&spec, DedupMode::Rotation)?;
        check_classes(
            &ranked,
            &g,
            &mut det,
            &mut tight,
            &mut argminmax,
            &mut worst_consecutive,
        )?;
    }

    let claims: Vec<ClaimResult> = [
        unitary,
        frame_bound,
        lemma1,
        entry_formula,
        trace,
        theorem1,
        theorem2,
        sine,
        det,
        tight,
        argminmax,
        worst_consecutive,
    ]
    .into_iter()
    .map(Claim::finish)
    .collect();
    Ok(VerifyReport {
        n_max,
        all_passed: claims.iter().all(|c| c.passed),
        claims,
        theorem2: theorem2_checks,
    })
}

fn check_classes(
    ranked: &SearchResult,
    g: &ComplexMatrix,
    det: &mut Claim,
    tight: &mut Claim,
    argminmax: &mut Claim,
    worst_consecutive: &mut Claim,
) -> Result<()> {
    let (n, k) = (ranked.spec.n(), ranked.spec.k());
    for class in &ranked.classes {
        let r = &class.report;
        let lu = determinant(&g.select_rows(&class.pattern.rows())?.gram_outer())?.re;
        let gap = relative_gap(r.product, r.det_formula).max(relative_gap(lu, r.det_formula));
        det.residual(gap, || {
            format!(
                "({n},{k}) {}: eig {} formula {} lu {lu}",
                class.pattern, r.product, r.det_formula
            )
        });

        let expect_tight = is_evenly_spaced(&class.pattern);
        tight.check(r.is_tight == expect_tight, || {
            format!(
                "({n},{k}) {}: tight={} spread {}",
                class.pattern,
                r.is_tight,
                r.lambda_max - r.lambda_min
            )
        });
    }

    let min_inv = ranked
        .classes
        .iter()
        .map(|c| c.report.inv_sum)
        .fold(f64::INFINITY, f64::min);
    let max_inv = ranked
        .classes
        .iter()
        .map(|c| c.report.inv_sum)
        .fold(f64::NEG_INFINITY, f64::max);
    let max_prod = ranked
        .classes
        .iter()
        .map(|c| c.report.product)
        .fold(f64::NEG_INFINITY, f64::max);
    let argmin: Vec<&PatternMask> = ranked
        .classes
        .iter()
        .filter(|c| c.report.inv_sum <= min_inv + ARG_TOL)
        .map(|c| &c.pattern)
        .collect();
    let argmax: Vec<&PatternMask> = ranked
        .classes
        .iter()
        .filter(|c| c.report.product >= max_prod - ARG_TOL)
        .map(|c| &c.pattern)
        .collect();
    let same = argmin.len() == argmax.len() && argmin.iter().all(|p| argmax.contains(p));
    argminmax.check(same, || {
        format!("({n},{k}): argmin {argmin:?} vs argmax {argmax:?}")
    });

    let worst: Vec<&PatternMask> = ranked
        .classes
        .iter()
        .filter(|c| relative_gap(c.report.inv_sum, max_inv) <= ARG_TOL)
        .map(|c| &c.pattern)
        .collect();
    worst_consecutive.check(worst.iter().all(|p| is_circularly_consecutive(p)), || {
        format!("({n},{k}): worst classes {worst:?}")
    });
    Ok(())
}
