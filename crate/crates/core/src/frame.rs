//! BCH-DFT generator matrices, subframes and systematic frames.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inverse, Complex, ComplexMatrix};

/// Imaginary residue tolerated (and zeroed) on real constructions.
pub const REAL_RESIDUE_TOL: f64 = 1e-12;
/// Residue tolerated when forcing a real systematic frame.
pub const SYSTEMATIC_RESIDUE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameKind {
    Real,
    Complex,
}

impl FromStr for FrameKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "real" => Ok(Self::Real),
            "complex" => Ok(Self::Complex),
            other => Err(Error::InvalidSpec(format!("unknown frame kind {other:?}"))),
        }
    }
}

impl fmt::Display for FrameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Real => "real",
            Self::Complex => "complex",
        })
    }
}

/// Parameters of an `(n, k)` BCH-DFT code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrameSpec {
    n: usize,
    k: usize,
    kind: FrameKind,
    alpha_override: Option<usize>,
}

impl FrameSpec {
    pub fn new(n: usize, k: usize, kind: FrameKind) -> Result<Self> {
        Self::with_alpha(n, k, kind, None)
    }

    pub fn real(n: usize, k: usize) -> Result<Self> {
        Self::new(n, k, FrameKind::Real)
    }

    pub fn complex(n: usize, k: usize) -> Result<Self> {
        Self::new(n, k, FrameKind::Complex)
    }

    /// `alpha_override` sets the size of the leading identity block of Σ and
    /// is only accepted for complex codes.
    pub fn with_alpha(
        n: usize,
        k: usize,
        kind: FrameKind,
        alpha_override: Option<usize>,
    ) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidSpec(format!(
                "need 1 <= k <= n, got n={n}, k={k}"
            )));
        }
        if kind == FrameKind::Real {
            if n.is_multiple_of(2) && k.is_multiple_of(2) {
                return Err(Error::InvalidSpec(format!(
                    "real code ({n},{k}): n and k cannot be even simultaneously"
                )));
            }
            // With n odd the zero band is only conjugate-symmetric for odd k.
            if k.is_multiple_of(2) {
                return Err(Error::InvalidSpec(format!(
                    "real code ({n},{k}): k must be odd for a conjugate-symmetric spectral band"
                )));
            }
            if alpha_override.is_some() {
                return Err(Error::InvalidSpec(
                    "alpha override applies to complex codes only".into(),
                ));
            }
        }
        if let Some(a) = alpha_override {
            if a > k {
                return Err(Error::InvalidSpec(format!("alpha {a} exceeds k = {k}")));
            }
        }
        Ok(Self {
            n,
            k,
            kind,
            alpha_override,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> FrameKind {
        self.kind
    }

    pub fn alpha_override(&self) -> Option<usize> {
        self.alpha_override
    }

    /// Size of the leading identity block: `⌈n/2⌉ − ⌊(n−k)/2⌋` unless overridden.
    pub fn alpha(&self) -> usize {
        self.alpha_override
            .unwrap_or_else(|| self.n.div_ceil(2) - (self.n - self.k) / 2)
    }

    pub fn beta(&self) -> usize {
        self.k - self.alpha()
    }

    /// Σ row carrying data index `i` (0-based).
    fn sigma_row(&self, i: usize) -> usize {
        let alpha = self.alpha();
        if i < alpha {
            i
        } else {
            self.n - self.k + i
        }
    }
}

/// Which codeword positions carry data (systematic) samples.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct PatternMask {
    bits: Vec<bool>,
}

impl PatternMask {
    pub fn from_bits(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidPattern("empty pattern".into()));
        }
        Ok(Self { bits })
    }

    /// Mask of length `n` with the given 1-based positions set.
    pub fn from_indices(n: usize, positions: &[usize]) -> Result<Self> {
        let mut bits = vec![false; n];
        for &p in positions {
            if p == 0 || p > n {
                return Err(Error::IndexOutOfRange { index: p, n });
            }
            if bits[p - 1] {
                return Err(Error::InvalidPattern(format!("position {p} listed twice")));
            }
            bits[p - 1] = true;
        }
        Self::from_bits(bits)
    }

    /// Mask selecting the given 0-based rows.
    pub fn from_rows(n: usize, rows: &[usize]) -> Result<Self> {
        let one_based: Vec<usize> = rows.iter().map(|r| r + 1).collect();
        Self::from_indices(n, &one_based)
    }

    pub fn full(n: usize) -> Self {
        Self {
            bits: vec![true; n],
        }
    }

    /// Every `n/k`-th position starting at 0-based `offset`; needs `k | n`.
    pub fn evenly_spaced(n: usize, k: usize, offset: usize) -> Result<Self> {
        if k == 0 || k > n || !n.is_multiple_of(k) {
            return Err(Error::InvalidPattern(format!("{k} does not divide {n}")));
        }
        let step = n / k;
        let rows: Vec<usize> = (0..k).map(|i| (offset + i * step) % n).collect();
        Self::from_rows(n, &rows)
    }

    /// `k` circularly consecutive positions starting at 0-based `offset`.
    pub fn consecutive(n: usize, k: usize, offset: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidPattern(format!("cannot place {k} of {n}")));
        }
        let rows: Vec<usize> = (0..k).map(|i| (offset + i) % n).collect();
        Self::from_rows(n, &rows)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Selected rows, 0-based, ascending.
    pub fn rows(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    /// Selected positions, 1-based, ascending.
    pub fn positions(&self) -> Vec<usize> {
        self.rows().into_iter().map(|r| r + 1).collect()
    }

    /// Shifts every position `shift` places to the right, wrapping around.
    pub fn rotate(&self, shift: usize) -> Self {
        let n = self.bits.len();
        let mut bits = vec![false; n];
        for (i, &b) in self.bits.iter().enumerate() {
            bits[(i + shift) % n] = b;
        }
        Self { bits }
    }

    pub fn reversed(&self) -> Self {
        Self {
            bits: self.bits.iter().rev().copied().collect(),
        }
    }

    /// Fails unless the mask has length `n` and exactly `k` data positions.
    pub fn check_against(&self, spec: &FrameSpec) -> Result<()> {
        if self.len() != spec.n() {
            return Err(Error::InvalidPattern(format!(
                "pattern length {} does not match n = {}",
                self.len(),
                spec.n()
            )));
        }
        if self.count() != spec.k() {
            return Err(Error::InvalidPattern(format!(
                "pattern marks {} data positions, expected k = {}",
                self.count(),
                spec.k()
            )));
        }
        Ok(())
    }
}

impl FromStr for PatternMask {
    type Err = Error;

    /// `x` (or `×`) marks data, `-` marks parity; case-insensitive.
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|ch| match ch {
                'x' | 'X' | '×' => Ok(true),
                '-' => Ok(false),
                other => Err(Error::InvalidPattern(format!(
                    "unexpected character {other:?} in {s:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(bits)
    }
}

impl fmt::Display for PatternMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "x" } else { "-" })?;
        }
        Ok(())
    }
}

impl From<PatternMask> for String {
    fn from(p: PatternMask) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for PatternMask {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Unitary `n×n` IDFT matrix, entry `(m, p) = e^{j·2π·m·p/n} / √n`.
pub fn build_dft_matrix(n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidSize("DFT size must be positive".into()));
    }
    let norm = 1.0 / (n as f64).sqrt();
    Ok(ComplexMatrix::from_fn(n, n, |m, p| {
        // Reduce the exponent mod n first so large products keep full precision.
        let e = (m * p) % n;
        Complex::from_polar(norm, 2.0 * PI * e as f64 / n as f64)
    }))
}

/// `n×k` selector with `I_α` top-left and `I_β` bottom-right.
pub fn build_sigma(spec: &FrameSpec) -> ComplexMatrix {
    let mut sigma = ComplexMatrix::zeros(spec.n(), spec.k());
    for i in 0..spec.k() {
        sigma[(spec.sigma_row(i), i)] = Complex::new(1.0, 0.0);
    }
    sigma
}

/// Generator `G = √(n/k)·W_nᴴ·Σ·W_k` (real) or `√(n/k)·W_nᴴ·Σ` (complex).
pub fn build_generator(spec: &FrameSpec) -> Result<ComplexMatrix> {
    let scale = (spec.n() as f64 / spec.k() as f64).sqrt();
    let w_n_adj = build_dft_matrix(spec.n())?.adjoint();
    let inner = w_n_adj.matmul(&build_sigma(spec))?;
    match spec.kind() {
        FrameKind::Complex => Ok(inner.scale(scale)),
        FrameKind::Real => {
            let g = inner.matmul(&build_dft_matrix(spec.k())?)?.scale(scale);
            g.into_real(REAL_RESIDUE_TOL)
        }
    }
}

/// Rows of `g` marked by `pattern`, in order.
pub fn extract_subframe(g: &ComplexMatrix, pattern: &PatternMask) -> Result<ComplexMatrix> {
    if pattern.len() != g.rows() {
        return Err(Error::DimensionMismatch(format!(
            "pattern of length {} against {} rows",
            pattern.len(),
            g.rows()
        )));
    }
    if pattern.count() == 0 {
        return Err(Error::DimensionMismatch("pattern selects no rows".into()));
    }
    g.select_rows(&pattern.rows())
}

/// Systematic frame `G·G_k⁻¹`; its rows at the data positions form `I_k`.
pub fn build_systematic(g: &ComplexMatrix, pattern: &PatternMask) -> Result<ComplexMatrix> {
    if pattern.count() != g.cols() {
        return Err(Error::DimensionMismatch(format!(
            "pattern selects {} rows, a square subframe needs {}",
            pattern.count(),
            g.cols()
        )));
    }
    let gk = extract_subframe(g, pattern)?;
    let gk_inv = inverse(&gk).map_err(|e| match e {
        Error::Singular => Error::Internal(format!("subframe {pattern} is singular")),
        other => other,
    })?;
    let mut sys = g.matmul(&gk_inv)?;
    if g.max_imag() == 0.0 {
        sys = sys.into_real(SYSTEMATIC_RESIDUE_TOL)?;
    }
    Ok(sys)
}

/// `min(|q−p|, n−|q−p|)` for 1-based positions `p`, `q`.
pub fn circular_distance(p: usize, q: usize, n: usize) -> Result<usize> {
    for idx in [p, q] {
        if idx == 0 || idx > n {
            return Err(Error::IndexOutOfRange { index: idx, n });
        }
    }
    let d = p.abs_diff(q);
    Ok(d.min(n - d))
}

/// Closed form of the `(r, s)` entry (1-based) of the frame operator `G·Gᴴ`
/// as a sum over the retained spectral band. With the IDFT convention used
/// by [`build_dft_matrix`] this equals the complex conjugate of the computed
/// entry; the two coincide for real codes.
pub fn gram_entry_formula(spec: &FrameSpec, r: usize, s: usize) -> Complex {
    let n = spec.n();
    let theta = |x: usize| 2.0 * PI * (x as f64 - 1.0) / n as f64;
    let delta = theta(r) - theta(s);
    let band = (0..spec.alpha()).chain(n - spec.beta()..n);
    let sum: Complex = band
        .map(|m| Complex::from_polar(1.0, m as f64 * delta))
        .sum();
    sum / spec.k() as f64
}
