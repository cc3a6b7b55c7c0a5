//! Codeword pattern enumeration and ranking.
//!
//! Patterns that differ by a circular shift give identical subframe spectra,
//! so the search works on equivalence classes (binary necklaces, or
//! bracelets when reversal is also folded in). Each class is represented by
//! its canonical form: the lexicographically smallest member when a data
//! position `x` sorts before a parity position `-`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{build_generator, FrameSpec, PatternMask};
use crate::spectral::{spectrum_report, SpectrumReport};

/// Largest codeword length accepted by the exhaustive search.
pub const MAX_SEARCH_N: usize = 28;
/// Up to this length classes come from bucketing all masks; above it, from
/// direct necklace generation.
pub const BUCKETING_LIMIT: usize = 20;
/// Relative tolerance under which two `Σ 1/λ` values count as a tie.
pub const RANK_TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DedupMode {
    #[default]
    Rotation,
    RotationAndReflection,
}

impl FromStr for DedupMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rotation" | "necklace" => Ok(Self::Rotation),
            "rotation-and-reflection" | "rotation-reflection" | "bracelet" => {
                Ok(Self::RotationAndReflection)
            }
            other => Err(Error::InvalidSpec(format!("unknown dedup mode {other:?}"))),
        }
    }
}

impl fmt::Display for DedupMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Rotation => "rotation",
            Self::RotationAndReflection => "rotation-and-reflection",
        })
    }
}

/// Order used for canonical forms and tie-breaks: `x` before `-`.
pub fn pattern_order(a: &PatternMask, b: &PatternMask) -> Ordering {
    b.bits().cmp(a.bits())
}

fn smallest<'a>(candidates: impl Iterator<Item = &'a PatternMask>) -> Option<&'a PatternMask> {
    candidates.min_by(|a, b| pattern_order(a, b))
}

pub fn canonical_pattern(pattern: &PatternMask, mode: DedupMode) -> PatternMask {
    let n = pattern.len();
    let mut members: Vec<PatternMask> = (0..n).map(|s| pattern.rotate(s)).collect();
    if mode == DedupMode::RotationAndReflection {
        let rev = pattern.reversed();
        members.extend((0..n).map(|s| rev.rotate(s)));
    }
    smallest(members.iter())
        .cloned()
        .expect("non-empty pattern")
}

/// Number of distinct masks in the class of `pattern`.
pub fn class_size(pattern: &PatternMask, mode: DedupMode) -> usize {
    let n = pattern.len();
    let mut members: BTreeSet<PatternMask> = (0..n).map(|s| pattern.rotate(s)).collect();
    if mode == DedupMode::RotationAndReflection {
        let rev = pattern.reversed();
        members.extend((0..n).map(|s| rev.rotate(s)));
    }
    members.len()
}

/// Every length-`n` mask with `k` data positions, in increasing bit order
/// (position 1 is the least significant bit).
pub fn masks_with_popcount(n: usize, k: usize) -> Vec<PatternMask> {
    assert!(n <= 63, "mask enumeration limited to 63 positions");
    if k > n {
        return Vec::new();
    }
    let to_mask =
        |v: u64| PatternMask::from_bits((0..n).map(|i| v >> i & 1 == 1).collect()).expect("n >= 1");
    if k == 0 {
        return vec![to_mask(0)];
    }
    let limit = 1u64 << n;
    let mut out = Vec::new();
    let mut v: u64 = (1u64 << k) - 1;
    while v < limit {
        out.push(to_mask(v));
        // Gosper's hack: next integer with the same popcount.
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    out
}

/// Canonical representatives with their class sizes, in canonical order.
pub fn enumerate_classes_with_sizes(
    spec: &FrameSpec,
    mode: DedupMode,
) -> Result<Vec<(PatternMask, usize)>> {
    let (n, k) = (spec.n(), spec.k());
    if n > MAX_SEARCH_N {
        return Err(Error::TooLarge(format!(
            "exhaustive search is limited to n <= {MAX_SEARCH_N}, got n = {n}"
        )));
    }
    if n <= BUCKETING_LIMIT {
        Ok(bucket_classes(n, k, mode))
    } else {
        Ok(necklaces(n, k)
            .into_iter()
            .filter(|m| mode == DedupMode::Rotation || canonical_pattern(m, mode) == *m)
            .map(|m| {
                let size = class_size(&m, mode);
                (m, size)
            })
            .collect())
    }
}

pub fn enumerate_classes(spec: &FrameSpec, mode: DedupMode) -> Result<Vec<PatternMask>> {
    Ok(enumerate_classes_with_sizes(spec, mode)?
        .into_iter()
        .map(|(m, _)| m)
        .collect())
}

fn bucket_classes(n: usize, k: usize, mode: DedupMode) -> Vec<(PatternMask, usize)> {
    let mut buckets: BTreeMap<Vec<bool>, usize> = BTreeMap::new();
    for m in masks_with_popcount(n, k) {
        *buckets
            .entry(canonical_pattern(&m, mode).bits().to_vec())
            .or_default() += 1;
    }
    // BTreeMap order on bits is the reverse of canonical order.
    buckets
        .into_iter()
        .rev()
        .map(|(bits, count)| (PatternMask::from_bits(bits).expect("n >= 1"), count))
        .collect()
}

/// Fixed-density binary necklaces of length `n` with `k` data positions,
/// generated in canonical order (FKM algorithm over `x < -`, pruned on the
/// number of parity symbols).
pub fn necklaces(n: usize, k: usize) -> Vec<PatternMask> {
    struct Gen {
        n: usize,
        parity: usize,
        a: Vec<u8>,
        out: Vec<PatternMask>,
    }

    impl Gen {
        fn run(&mut self, t: usize, p: usize, ones: usize) {
            if ones > self.parity || ones + (self.n + 1 - t) < self.parity {
                return;
            }
            if t > self.n {
                if self.n.is_multiple_of(p) {
                    let bits = self.a[1..].iter().map(|&s| s == 0).collect();
                    self.out.push(PatternMask::from_bits(bits).expect("n >= 1"));
                }
                return;
            }
            let prev = self.a[t - p];
            self.a[t] = prev;
            self.run(t + 1, p, ones + prev as usize);
            if prev == 0 {
                self.a[t] = 1;
                self.run(t + 1, t, ones + 1);
            }
        }
    }

    if k > n || n == 0 {
        return Vec::new();
    }
    let mut g = Gen {
        n,
        parity: n - k,
        a: vec![0; n + 1],
        out: Vec::new(),
    };
    g.run(1, 1, 0);
    g.out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternClass {
    pub pattern: PatternMask,
    pub class_size: usize,
    pub report: SpectrumReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub spec: FrameSpec,
    pub dedup_mode: DedupMode,
    /// Ranked by `Σ 1/λ` ascending; exact ties in canonical order.
    pub classes: Vec<PatternClass>,
    pub best: PatternMask,
    pub worst: PatternMask,
}

impl SearchResult {
    pub fn class(&self, pattern: &PatternMask) -> Option<&PatternClass> {
        let canonical = canonical_pattern(pattern, self.dedup_mode);
        self.classes.iter().find(|c| c.pattern == canonical)
    }

    pub fn best_class(&self) -> &PatternClass {
        self.class(&self.best).expect("best is one of the classes")
    }

    pub fn worst_class(&self) -> &PatternClass {
        self.class(&self.worst)
            .expect("worst is one of the classes")
    }

    pub fn total_masks(&self) -> usize {
        self.classes.iter().map(|c| c.class_size).sum()
    }
}

fn near(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= RANK_TIE_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Spectrum report for every class, with the best (smallest `Σ 1/λ`) and
/// worst (largest) classes picked out.
pub fn rank_patterns(spec: &FrameSpec, mode: DedupMode) -> Result<SearchResult> {
    let classes = enumerate_classes_with_sizes(spec, mode)?;
    let g = build_generator(spec)?;
    let mut ranked: Vec<PatternClass> = classes
        .into_par_iter()
        .map(|(pattern, class_size)| {
            spectrum_report(&g, &pattern).map(|report| PatternClass {
                pattern,
                class_size,
                report,
            })
        })
        .collect::<Result<_>>()?;

    // Classes arrive in canonical order, so the first near-extreme entry is
    // the lexicographically smallest one.
    let min = ranked
        .iter()
        .map(|c| c.report.inv_sum)
        .fold(f64::INFINITY, f64::min);
    let max = ranked
        .iter()
        .map(|c| c.report.inv_sum)
        .fold(f64::NEG_INFINITY, f64::max);
    let best = ranked
        .iter()
        .find(|c| near(c.report.inv_sum, min))
        .map(|c| c.pattern.clone())
        .expect("at least one class");
    let worst = ranked
        .iter()
        .find(|c| near(c.report.inv_sum, max))
        .map(|c| c.pattern.clone())
        .expect("at least one class");

    ranked.sort_by(|a, b| {
        a.report
            .inv_sum
            .total_cmp(&b.report.inv_sum)
            .then_with(|| pattern_order(&a.pattern, &b.pattern))
    });
    Ok(SearchResult {
        spec: *spec,
        dedup_mode: mode,
        classes: ranked,
        best,
        worst,
    })
}
