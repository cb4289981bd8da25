//! Wall-clock comparison of the grid scan against the PCA baseline on
//! seeded sine-curve data.

use std::fmt;
use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::error::Result;
use crate::pca::pca_fit;
use crate::scan::{scan, Density, ScanConfig};
use crate::synth::{generate, SyntheticKind, SyntheticSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Scan,
    Pca,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Scan => "scan",
            Method::Pca => "pca",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub method: Method,
    pub j: usize,
    pub n: usize,
    /// Median wall time over the configured runs.
    pub millis: f64,
    /// Final grid resolution for `scan`; total power iterations for `pca`.
    pub reached: u64,
    /// Worker threads available to the measured code.
    pub threads: usize,
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub runs: usize,
    /// Histogram counting on the rayon pool instead of a single thread.
    pub parallel: bool,
    pub outlier_fraction: f64,
    pub config: ScanConfig,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            runs: 3,
            parallel: false,
            outlier_fraction: 0.08,
            config: ScanConfig {
                volume_limit: 0.5,
                coverage_fraction: 0.9,
                density: Density::Fraction(0.005),
                ..ScanConfig::default()
            },
        }
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let mid = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[mid]
    } else {
        (xs[mid - 1] + xs[mid]) / 2.0
    }
}

fn time_ms<T>(f: impl FnOnce() -> T) -> (f64, T) {
    let start = Instant::now();
    let value = f();
    (start.elapsed().as_secs_f64() * 1e3, value)
}

/// Times `scan` only, median of `runs`, on the standard sine-curve dataset.
pub fn time_scan(j: usize, n: usize, seed: u64, options: &BenchOptions) -> Result<(f64, u32)> {
    let spec = SyntheticSpec::new(SyntheticKind::SineCurve, j, n)
        .outliers(options.outlier_fraction)
        .seed(seed);
    let dataset = generate(&spec)?;
    let config = ScanConfig {
        parallel: options.parallel,
        ..options.config.clone()
    };
    let mut times = Vec::with_capacity(options.runs);
    let mut reached = 0;
    for _ in 0..options.runs.max(1) {
        let (ms, outcome) = time_ms(|| scan(&dataset, &config));
        reached = outcome?.trace().last().map_or(0, |t| t.a);
        times.push(ms);
    }
    Ok((median(times), reached))
}

/// Runs both methods on one dataset per size.
pub fn run_bench(
    sizes: &[usize],
    n: usize,
    seed: u64,
    options: &BenchOptions,
) -> Result<Vec<BenchRecord>> {
    let threads = if options.parallel {
        rayon::current_num_threads()
    } else {
        1
    };
    let mut records = Vec::with_capacity(sizes.len() * 2);
    for &j in sizes {
        let (millis, a) = time_scan(j, n, seed, options)?;
        records.push(BenchRecord {
            method: Method::Scan,
            j,
            n,
            millis,
            reached: u64::from(a),
            threads,
        });

        let spec = SyntheticSpec::new(SyntheticKind::SineCurve, j, n)
            .outliers(options.outlier_fraction)
            .seed(seed);
        let dataset = generate(&spec)?;
        let s = n.min(2);
        let mut times = Vec::with_capacity(options.runs);
        let mut iterations = 0;
        for _ in 0..options.runs.max(1) {
            let (ms, fit) = time_ms(|| pca_fit(&dataset, s));
            iterations = fit?.iterations as u64;
            times.push(ms);
        }
        records.push(BenchRecord {
            method: Method::Pca,
            j,
            n,
            millis: median(times),
            reached: iterations,
            threads: 1,
        });
    }
    Ok(records)
}

/// `method,J,N,millis,reached,threads` table.
pub fn write_bench_csv<W: Write>(mut out: W, records: &[BenchRecord]) -> std::io::Result<()> {
    writeln!(out, "method,J,N,millis,reached,threads")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{:.3},{},{}",
            r.method, r.j, r.n, r.millis, r.reached, r.threads
        )?;
    }
    Ok(())
}
