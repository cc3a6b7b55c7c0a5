//! Monte-Carlo check of quantized systematic-frame encoding.
//!
//! A source vector `x` is encoded as `y = G_sys·x`, perturbed by additive
//! noise and recovered with the pseudoinverse `(k/n)·G_k·Gᴴ`. The empirical
//! codevector variance and reconstruction error are compared with the
//! closed forms in [`crate::spectral`].
//!
//! Reproducibility: trials are split into fixed shards of
//! [`SHARD_TRIALS`]. Shard `i` draws from ChaCha20 seeded with `seed` on
//! stream `i`; Gaussian samples come from `rand_distr::StandardNormal`.
//! Shard sums are merged in shard order with compensated summation, so a
//! report depends only on its inputs, never on the worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{
    build_generator, build_systematic, extract_subframe, FrameKind, FrameSpec, PatternMask,
};
use crate::linalg::{Complex, ComplexMatrix};
use crate::spectral::{codevector_variance, predicted_mse, spectrum_report};

pub const SHARD_TRIALS: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NoiseModel {
    /// Independent zero-mean Gaussian noise of variance `sigma_q2` per component.
    IidAdditive { sigma_q2: f64 },
    /// Midrise uniform quantizer over `[-range, range]` with `2^bits` levels.
    UniformQuantizer { bits: u32, range: f64 },
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::IidAdditive { sigma_q2 } if !(sigma_q2.is_finite() && sigma_q2 >= 0.0) => Err(
                Error::InvalidModel(format!("sigma_q2 must be finite and >= 0, got {sigma_q2}")),
            ),
            Self::UniformQuantizer { bits, .. } if !(1..=52).contains(&bits) => Err(
                Error::InvalidModel(format!("bits must be in 1..=52, got {bits}")),
            ),
            Self::UniformQuantizer { range, .. } if !(range.is_finite() && range > 0.0) => Err(
                Error::InvalidModel(format!("range must be finite and > 0, got {range}")),
            ),
            _ => Ok(()),
        }
    }

    /// Quantizer step `2·range / 2^bits`.
    pub fn step(&self) -> Option<f64> {
        match *self {
            Self::UniformQuantizer { bits, range } => Some(2.0 * range / (1u64 << bits) as f64),
            Self::IidAdditive { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub trials: usize,
    pub seed: u64,
    pub empirical_sigma_y2: f64,
    pub predicted_sigma_y2: f64,
    pub sigma_y2_std_error: f64,
    pub empirical_mse: f64,
    pub predicted_mse: f64,
    pub mse_std_error: f64,
    /// Noise variance per codeword component: the model value for additive
    /// noise, the measured one for the quantizer.
    pub sigma_q2: f64,
}

/// Pseudoinverse of the systematic frame, `(k/n)·G_k·Gᴴ`.
pub fn reconstruction_operator(g: &ComplexMatrix, pattern: &PatternMask) -> Result<ComplexMatrix> {
    let (n, k) = (g.rows(), g.cols());
    if pattern.count() != k {
        return Err(Error::DimensionMismatch(format!(
            "pattern selects {} rows, expected {k}",
            pattern.count()
        )));
    }
    let gk = extract_subframe(g, pattern)?;
    Ok(gk.matmul(&g.adjoint())?.scale(k as f64 / n as f64))
}

/// Linear reconstruction `x̂ = (k/n)·G_k·Gᴴ·ŷ`.
pub fn reconstruct(
    g_sys: &ComplexMatrix,
    g: &ComplexMatrix,
    pattern: &PatternMask,
    y_hat: &[Complex],
) -> Result<Vec<Complex>> {
    if g_sys.rows() != g.rows() || g_sys.cols() != g.cols() {
        return Err(Error::DimensionMismatch(format!(
            "systematic frame {}x{} does not match generator {}x{}",
            g_sys.rows(),
            g_sys.cols(),
            g.rows(),
            g.cols()
        )));
    }
    if y_hat.len() != g.rows() {
        return Err(Error::DimensionMismatch(format!(
            "codeword of length {} for n = {}",
            y_hat.len(),
            g.rows()
        )));
    }
    reconstruction_operator(g, pattern)?.mul_vec(y_hat)
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    first: CompensatedSum,
    second: CompensatedSum,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.first.add(v);
        self.second.add(v * v);
    }

    fn merge(&mut self, other: &Self) {
        self.first.add(other.first.value());
        self.second.add(other.second.value());
    }

    /// Mean and standard error of the mean over `count` samples.
    fn mean_and_error(&self, count: usize) -> (f64, f64) {
        let c = count as f64;
        let mean = self.first.value() / c;
        if count < 2 {
            return (mean, 0.0);
        }
        let var = ((self.second.value() - c * mean * mean) / (c - 1.0)).max(0.0);
        (mean, (var / c).sqrt())
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct ShardStats {
    codeword_energy: Moments,
    error: Moments,
    noise: CompensatedSum,
}

struct Encoder {
    g_sys: ComplexMatrix,
    recon: ComplexMatrix,
    kind: FrameKind,
    noise: NoiseModel,
    sigma_x: f64,
}

impl Encoder {
    fn gaussian(&self, rng: &mut ChaCha20Rng, variance: f64) -> Complex {
        let z = |rng: &mut ChaCha20Rng| -> f64 { StandardNormal.sample(rng) };
        match self.kind {
            FrameKind::Real => Complex::new(variance.sqrt() * z(rng), 0.0),
            FrameKind::Complex => {
                let s = (variance / 2.0).sqrt();
                Complex::new(s * z(rng), s * z(rng))
            }
        }
    }

    fn perturb(&self, rng: &mut ChaCha20Rng, y: &[Complex]) -> Vec<Complex> {
        match self.noise {
            NoiseModel::IidAdditive { sigma_q2 } => y
                .iter()
                .map(|&v| v + self.gaussian(rng, sigma_q2))
                .collect(),
            NoiseModel::UniformQuantizer { range, .. } => {
                let step = self.noise.step().expect("quantizer step");
                let q = |v: f64| {
                    let level = (v / step).floor() + 0.5;
                    (level * step).clamp(-range + step / 2.0, range - step / 2.0)
                };
                y.iter()
                    .map(|v| match self.kind {
                        FrameKind::Real => Complex::new(q(v.re), 0.0),
                        FrameKind::Complex => Complex::new(q(v.re), q(v.im)),
                    })
                    .collect()
            }
        }
    }

    fn run_shard(&self, seed: u64, shard: usize, trials: usize) -> ShardStats {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(shard as u64);
        let (n, k) = (self.g_sys.rows(), self.g_sys.cols());
        let mut stats = ShardStats::default();
        let mut x = vec![Complex::new(0.0, 0.0); k];
        for _ in 0..trials {
            for xi in x.iter_mut() {
                *xi = self.gaussian(&mut rng, self.sigma_x * self.sigma_x);
            }
            let y = self.g_sys.mul_vec(&x).expect("dimensions fixed at setup");
            let y_hat = self.perturb(&mut rng, &y);
            let x_hat = self
                .recon
                .mul_vec(&y_hat)
                .expect("dimensions fixed at setup");

            let energy: f64 = y.iter().map(|v| v.norm_sqr()).sum();
            let err: f64 = x_hat.iter().zip(&x).map(|(a, b)| (a - b).norm_sqr()).sum();
            let noise: f64 = y_hat.iter().zip(&y).map(|(a, b)| (a - b).norm_sqr()).sum();
            stats.codeword_energy.push(energy / n as f64);
            stats.error.push(err / k as f64);
            stats.noise.add(noise / n as f64);
        }
        stats
    }
}

pub fn simulate(
    spec: &FrameSpec,
    pattern: &PatternMask,
    noise: NoiseModel,
    sigma_x2: f64,
    trials: usize,
    seed: u64,
) -> Result<SimReport> {
    noise.validate()?;
    if !(sigma_x2.is_finite() && sigma_x2 >= 0.0) {
        return Err(Error::InvalidModel(format!(
            "sigma_x2 must be finite and >= 0, got {sigma_x2}"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidModel("trials must be at least 1".into()));
    }
    pattern.check_against(spec)?;

    let g = build_generator(spec)?;
    let report = spectrum_report(&g, pattern)?;
    let encoder = Encoder {
        g_sys: build_systematic(&g, pattern)?,
        recon: reconstruction_operator(&g, pattern)?,
        kind: spec.kind(),
        noise,
        sigma_x: sigma_x2.sqrt(),
    };

    let shards = trials.div_ceil(SHARD_TRIALS);
    let per_shard: Vec<ShardStats> = (0..shards)
        .into_par_iter()
        .map(|i| {
            let len = SHARD_TRIALS.min(trials - i * SHARD_TRIALS);
            encoder.run_shard(seed, i, len)
        })
        .collect();

    let mut total = ShardStats::default();
    for s in &per_shard {
        total.codeword_energy.merge(&s.codeword_energy);
        total.error.merge(&s.error);
        total.noise.add(s.noise.value());
    }
    let (empirical_sigma_y2, sigma_y2_std_error) = total.codeword_energy.mean_and_error(trials);
    let (empirical_mse, mse_std_error) = total.error.mean_and_error(trials);
    let sigma_q2 = match noise {
        NoiseModel::IidAdditive { sigma_q2 } => sigma_q2,
        NoiseModel::UniformQuantizer { .. } => total.noise.value() / trials as f64,
    };

    Ok(SimReport {
        trials,
        seed,
        empirical_sigma_y2,
        predicted_sigma_y2: codevector_variance(&report, sigma_x2),
        sigma_y2_std_error,
        empirical_mse,
        predicted_mse: predicted_mse(spec.n(), spec.k(), sigma_q2),
        mse_std_error,
        sigma_q2,
    })
}
