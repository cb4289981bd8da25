//! Minimal principal component analysis by power iteration with deflation.
//!
//! This is a baseline for timing comparisons and the projection used to plot
//! data with more than two dimensions.

use crate::error::{Error, Result};
use crate::geometry::Dataset;

const MAX_ITERATIONS: usize = 1000;
const CONVERGENCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalAxes {
    pub mean: Vec<f64>,
    /// Unit axes, strongest first.
    pub axes: Vec<Vec<f64>>,
    /// Sample variance along each axis, descending.
    pub variances: Vec<f64>,
    /// Power iterations spent across all axes.
    pub iterations: usize,
}

impl PrincipalAxes {
    /// Coordinates of `point` along each axis, relative to the mean.
    pub fn project(&self, point: &[f64]) -> Vec<f64> {
        self.axes
            .iter()
            .map(|axis| {
                axis.iter()
                    .zip(point.iter().zip(&self.mean))
                    .map(|(u, (x, m))| u * (x - m))
                    .sum()
            })
            .collect()
    }

    /// Inverse of [`PrincipalAxes::project`] on the span of the axes.
    pub fn reconstruct(&self, coords: &[f64]) -> Vec<f64> {
        let mut out = self.mean.clone();
        for (c, axis) in coords.iter().zip(&self.axes) {
            for (o, u) in out.iter_mut().zip(axis) {
                *o += c * u;
            }
        }
        out
    }
}

/// Sample mean and covariance (divisor `J - 1`), covariance row-major.
pub fn covariance(dataset: &Dataset) -> (Vec<f64>, Vec<f64>) {
    let n = dataset.dim();
    let j = dataset.len();
    let mut mean = vec![0.0; n];
    for p in dataset.points() {
        for (m, x) in mean.iter_mut().zip(p) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= j as f64;
    }
    let mut cov = vec![0.0; n * n];
    let mut centered = vec![0.0; n];
    for p in dataset.points() {
        for (c, (x, m)) in centered.iter_mut().zip(p.iter().zip(&mean)) {
            *c = x - m;
        }
        for r in 0..n {
            for c in r..n {
                cov[r * n + c] += centered[r] * centered[c];
            }
        }
    }
    let denom = (j.max(2) - 1) as f64;
    for r in 0..n {
        for c in r..n {
            cov[r * n + c] /= denom;
            cov[c * n + r] = cov[r * n + c];
        }
    }
    (mean, cov)
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

fn mat_vec(m: &[f64], v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n).map(|r| dot(&m[r * n..(r + 1) * n], v)).collect()
}

fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let d = dot(v, b);
        for (x, y) in v.iter_mut().zip(b) {
            *x -= d * y;
        }
    }
}

/// First standard basis vector with a usable component outside `basis`.
fn fallback_start(n: usize, basis: &[Vec<f64>]) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            orthogonalize(&mut e, basis);
            e
        })
        .max_by(|x, y| norm(x).total_cmp(&norm(y)))
        .expect("dimension is positive")
}

/// Flips `v` so its largest-magnitude component is positive.
fn canonical_sign(v: &mut [f64]) {
    let lead = v
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(0.0);
    if lead < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Top-`s` principal axes of the sample covariance.
pub fn pca_fit(dataset: &Dataset, s: usize) -> Result<PrincipalAxes> {
    let n = dataset.dim();
    if s < 1 || s > n {
        return Err(Error::InvalidDimension(s));
    }
    if dataset.len() < 2 {
        return Err(Error::DegenerateCovariance);
    }
    let (mean, cov) = covariance(dataset);
    let trace: f64 = (0..n).map(|i| cov[i * n + i]).sum();
    if trace <= 0.0 {
        return Err(Error::DegenerateCovariance);
    }

    let mut deflated = cov.clone();
    let mut axes: Vec<Vec<f64>> = Vec::with_capacity(s);
    let mut variances = Vec::with_capacity(s);
    let mut iterations = 0;

    for _ in 0..s {
        // Start from the strongest remaining column; it lies in the range of the matrix.
        let mut v = (0..n)
            .map(|c| (0..n).map(|r| deflated[r * n + c]).collect::<Vec<_>>())
            .max_by(|x, y| norm(x).total_cmp(&norm(y)))
            .expect("dimension is positive");
        orthogonalize(&mut v, &axes);
        if norm(&v) <= 1e-14 * trace {
            v = fallback_start(n, &axes);
        }
        let len = norm(&v);
        v.iter_mut().for_each(|x| *x /= len);

        for _ in 0..MAX_ITERATIONS {
            iterations += 1;
            let mut w = mat_vec(&deflated, &v);
            orthogonalize(&mut w, &axes);
            let len = norm(&w);
            // Remaining spectrum is numerically zero; any orthogonal v will do.
            if len <= 1e-14 * trace {
                break;
            }
            w.iter_mut().for_each(|x| *x /= len);
            if dot(&w, &v) < 0.0 {
                w.iter_mut().for_each(|x| *x = -*x);
            }
            let change = w
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            v = w;
            if change < CONVERGENCE {
                break;
            }
        }
        // Re-orthogonalize twice to keep the basis orthonormal to rounding.
        orthogonalize(&mut v, &axes);
        orthogonalize(&mut v, &axes);
        let len = norm(&v);
        v.iter_mut().for_each(|x| *x /= len);
        canonical_sign(&mut v);

        let variance = dot(&v, &mat_vec(&cov, &v)).max(0.0);
        for r in 0..n {
            for c in 0..n {
                deflated[r * n + c] -= variance * v[r] * v[c];
            }
        }
        axes.push(v);
        variances.push(variance);
    }

    let mut order: Vec<usize> = (0..s).collect();
    order.sort_by(|&x, &y| variances[y].total_cmp(&variances[x]));
    Ok(PrincipalAxes {
        mean,
        axes: order.iter().map(|&i| axes[i].clone()).collect(),
        variances: order.iter().map(|&i| variances[i]).collect(),
        iterations,
    })
}
