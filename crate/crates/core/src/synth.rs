//! Seeded synthetic point clouds.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)`, which is
//! specified independently of platform and word size, so a given spec
//! produces the same points everywhere. Gaussian jitter uses `rand_distr`'s
//! ziggurat `Normal` on top of that stream.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Dataset;

/// Standard deviation of the jitter around the sine curve.
pub const CURVE_JITTER: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SyntheticKind {
    /// `J` evenly spaced points on the main diagonal; no randomness.
    Diagonal,
    /// A closed-form smooth curve with jitter, plus uniform outliers.
    SineCurve,
    Uniform,
    /// Two Gaussian blobs plus uniform outliers.
    TwoClusters,
}

impl FromStr for SyntheticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diagonal" => Ok(SyntheticKind::Diagonal),
            "sine-curve" | "sine" => Ok(SyntheticKind::SineCurve),
            "uniform" => Ok(SyntheticKind::Uniform),
            "two-clusters" => Ok(SyntheticKind::TwoClusters),
            other => Err(Error::InvalidConfig(format!(
                "unknown dataset kind '{other}' (expected diagonal, sine-curve, uniform, two-clusters)"
            ))),
        }
    }
}

impl fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SyntheticKind::Diagonal => "diagonal",
            SyntheticKind::SineCurve => "sine-curve",
            SyntheticKind::Uniform => "uniform",
            SyntheticKind::TwoClusters => "two-clusters",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub count: usize,
    pub dim: usize,
    /// Share of points drawn uniformly from the cube (ignored by
    /// `diagonal` and `uniform`).
    pub outlier_fraction: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn new(kind: SyntheticKind, count: usize, dim: usize) -> Self {
        SyntheticSpec {
            kind,
            count,
            dim,
            outlier_fraction: 0.0,
            seed: 0,
        }
    }

    pub fn outliers(mut self, fraction: f64) -> Self {
        self.outlier_fraction = fraction;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidConfig("point count must be at least 1".into()));
        }
        if self.dim == 0 {
            return Err(Error::InvalidConfig("dimension must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.outlier_fraction) {
            return Err(Error::InvalidConfig(format!(
                "outlier fraction {} not in [0, 1)",
                self.outlier_fraction
            )));
        }
        Ok(())
    }

    fn outlier_count(&self) -> usize {
        (self.outlier_fraction * self.count as f64).round() as usize
    }
}

/// Point on the reference curve at parameter `t ∈ [0, 1]`.
///
/// The first axis runs linearly over `[0.1, 0.9]`; axis `i ≥ 1` is
/// `0.5 + 0.3·sin(2πt + (i-1)π/2)`.
pub fn sine_curve_point(t: f64, dim: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(dim);
    p.push(0.1 + 0.8 * t);
    for i in 1..dim {
        let phase = (i - 1) as f64 * std::f64::consts::FRAC_PI_2;
        p.push(0.5 + 0.3 * (TAU * t + phase).sin());
    }
    p
}

fn uniform_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random::<f64>()).collect()
}

fn jittered(center: Vec<f64>, sigma: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let noise = Normal::new(0.0, sigma).expect("sigma is positive");
    center
        .into_iter()
        .map(|x| (x + noise.sample(rng)).clamp(0.0, 1.0))
        .collect()
}

/// Generates the dataset described by `spec`; the same spec always gives
/// the same points.
pub fn generate(spec: &SyntheticSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (j, n) = (spec.count, spec.dim);
    let points: Vec<Vec<f64>> = match spec.kind {
        SyntheticKind::Diagonal => (0..j)
            .map(|i| {
                let t = if j == 1 { 0.5 } else { i as f64 / (j - 1) as f64 };
                vec![t; n]
            })
            .collect(),
        SyntheticKind::Uniform => (0..j).map(|_| uniform_point(&mut rng, n)).collect(),
        SyntheticKind::SineCurve => {
            let outliers = spec.outlier_count();
            let mut pts: Vec<Vec<f64>> = (0..j - outliers)
                .map(|_| {
                    let t: f64 = rng.random();
                    jittered(sine_curve_point(t, n), CURVE_JITTER, &mut rng)
                })
                .collect();
            pts.extend((0..outliers).map(|_| uniform_point(&mut rng, n)));
            pts
        }
        SyntheticKind::TwoClusters => {
            let outliers = spec.outlier_count();
            let mut pts: Vec<Vec<f64>> = (0..j - outliers)
                .map(|i| {
                    let c = if i % 2 == 0 { 0.3 } else { 0.7 };
                    jittered(vec![c; n], 0.05, &mut rng)
                })
                .collect();
            pts.extend((0..outliers).map(|_| uniform_point(&mut rng, n)));
            pts
        }
    };
    Dataset::new(points)
}
