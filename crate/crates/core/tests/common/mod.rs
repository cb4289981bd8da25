//! Oracles and invariant checks shared by the integration suites.
//!
//! Nothing here calls the code paths it is used to check: cell membership is
//! decided by interval search instead of `floor`, and eigenvalues come from
//! a cyclic Jacobi sweep instead of power iteration.

#![allow(dead_code)]

use gridscan_core::{
    build_chain, build_histogram, build_manifold, filter_cells, required_coverage,
    resolution_cap, scan, verify_found, CapPolicy, Dataset, Density, GridResolution, ScanConfig,
    ScanOutcome,
};
use proptest::prelude::*;

/// Whether `x` lies in interval `k` of `a`: `k <= x·a < k+1`, with the top
/// face belonging to the last interval.
pub fn in_interval(x: f64, k: u32, a: u32) -> bool {
    let s = x * f64::from(a);
    (f64::from(k) <= s && s < f64::from(k + 1)) || (k + 1 == a && s >= f64::from(a))
}

/// Dense count over all `a^N` cells, row-major with axis 0 most significant.
pub fn dense_counts(ds: &Dataset, a: u32) -> Vec<usize> {
    let n = ds.dim();
    let cells = (a as usize).pow(n as u32);
    let mut counts = vec![0usize; cells];
    for p in ds.points() {
        let mut flat = 0usize;
        for &x in p {
            let k = (0..a)
                .find(|&k| in_interval(x, k, a))
                .expect("every coordinate in [0,1] falls in some interval");
            flat = flat * a as usize + k as usize;
        }
        counts[flat] += 1;
    }
    counts
}

/// Unflattens a dense cell number back into per-axis coordinates.
pub fn unflatten(mut flat: usize, a: u32, n: usize) -> Vec<u32> {
    let mut coords = vec![0u32; n];
    for slot in coords.iter_mut().rev() {
        *slot = (flat % a as usize) as u32;
        flat /= a as usize;
    }
    coords
}

/// Compares the sparse histogram with the dense oracle cell by cell.
pub fn histogram_matches_dense(ds: &Dataset, a: u32) -> Result<(), String> {
    let hist = build_histogram(ds, GridResolution::new(a, ds.dim()).unwrap()).unwrap();
    let dense = dense_counts(ds, a);
    for (flat, &expected) in dense.iter().enumerate() {
        let idx = unflatten(flat, a, ds.dim());
        let got = hist.count(&idx);
        if got != expected {
            return Err(format!("cell {idx:?} at a={a}: sparse {got}, dense {expected}"));
        }
    }
    let occupied = dense.iter().filter(|&&c| c > 0).count();
    if occupied != hist.occupied() {
        return Err(format!(
            "occupied cells: sparse {}, dense {occupied}",
            hist.occupied()
        ));
    }
    Ok(())
}

/// Eigenvalues of a symmetric row-major matrix by cyclic Jacobi rotations,
/// descending.
pub fn jacobi_eigenvalues(matrix: &[f64], n: usize) -> Vec<f64> {
    let mut m = matrix.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| m[r * n + c] * m[r * n + c])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    eig
}

pub fn sine_config() -> ScanConfig {
    ScanConfig {
        volume_limit: 0.5,
        coverage_fraction: 0.9,
        density: Density::Fraction(0.005),
        ..ScanConfig::default()
    }
}

/// Coordinates biased toward cell faces so boundary handling gets exercised.
fn coordinate() -> impl Strategy<Value = f64> {
    prop_oneof![
        3 => 0.0..=1.0f64,
        1 => (0u32..=16).prop_map(|k| f64::from(k) / 16.0),
        1 => Just(1.0),
        1 => 0.2..0.3f64,
    ]
}

pub fn dataset_strategy(max_points: usize, max_dim: usize) -> impl Strategy<Value = Dataset> {
    (1..=max_dim).prop_flat_map(move |n| {
        prop::collection::vec(prop::collection::vec(coordinate(), n), 1..=max_points)
            .prop_map(|pts| Dataset::new(pts).unwrap())
    })
}

pub fn config_strategy() -> impl Strategy<Value = ScanConfig> {
    let density = prop_oneof![
        (1usize..=6).prop_map(Density::Absolute),
        (0.001..0.2f64).prop_map(Density::Fraction),
    ];
    let cap = prop_oneof![Just(CapPolicy::Full), Just(CapPolicy::Half)];
    (0.05..=1.0f64, 0.05..=1.0f64, density, cap).prop_map(
        |(volume_limit, coverage_fraction, density, a_cap)| ScanConfig {
            volume_limit,
            coverage_fraction,
            density,
            a_cap,
            a_start: 2,
            parallel: false,
        },
    )
}

fn permuted(ds: &Dataset) -> Dataset {
    let n = ds.len();
    // stride permutation with a stride coprime to n
    let stride = (1..=n).rev().find(|s| gcd(*s, n) == 1 && *s < n).unwrap_or(1);
    Dataset::new((0..n).map(|i| ds.point((i * stride) % n).to_vec()).collect()).unwrap()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Every scan-level invariant for one dataset and config.
pub fn check_scan_invariants(ds: &Dataset, cfg: &ScanConfig) -> Result<(), String> {
    let out = scan(ds, cfg).map_err(|e| e.to_string())?;
    let trace = out.trace();
    let n = ds.dim();
    let cap = resolution_cap(cfg, ds.len(), n);

    // termination: at most ceil(log2 cap) + 1 passes
    let bound = (f64::from(cap.max(1))).log2().ceil() as usize + 1;
    if trace.len() > bound {
        return Err(format!("{} passes exceed bound {bound}", trace.len()));
    }

    for (i, t) in trace.iter().enumerate() {
        // doubling schedule
        let expected_a = cfg.a_start << i;
        if t.a != expected_a {
            return Err(format!("pass {i} used a={}, expected {expected_a}", t.a));
        }
        // volume identity
        let cells = (f64::from(t.a)).powi(n as i32);
        if t.total_volume * cells != t.kept as f64 {
            return Err(format!(
                "volume {} * a^N {} != K {}",
                t.total_volume, cells, t.kept
            ));
        }
        // conservation
        let hist = build_histogram(ds, GridResolution::new(t.a, n).unwrap()).unwrap();
        if hist.total() != ds.len() {
            return Err(format!("counts sum to {} not {}", hist.total(), ds.len()));
        }
        if hist.iter().any(|(_, e)| e.count == 0 || e.count != e.members.len()) {
            return Err("histogram stores an empty or inconsistent cell".into());
        }
        // monotone filtering
        let mut prev = (usize::MAX, usize::MAX);
        for p in 1..=6 {
            let kept = filter_cells(&hist, p);
            if kept.len() > prev.0 || kept.covered() > prev.1 {
                return Err(format!("filtering not monotone at p={p}"));
            }
            if kept.cells().iter().any(|c| c.count < p) {
                return Err(format!("kept a cell below p={p}"));
            }
            prev = (kept.len(), kept.covered());
        }
    }

    if let ScanOutcome::Found { kept, .. } = &out {
        verify_found(ds, cfg, kept).map_err(|e| e.to_string())?;
        if kept.total_volume() >= cfg.volume_limit
            || kept.covered() < required_coverage(cfg, ds.len())
            || kept.is_empty()
        {
            return Err("found outcome violates its own conditions".into());
        }
        check_chain_invariants(kept)?;
    }

    // determinism, including under a permutation of the input order
    let again = scan(ds, cfg).map_err(|e| e.to_string())?;
    if again != out {
        return Err("two runs disagree".into());
    }
    let shuffled = scan(&permuted(ds), cfg).map_err(|e| e.to_string())?;
    if shuffled.trace() != out.trace() || shuffled.is_found() != out.is_found() {
        return Err("permuting the input changed the outcome".into());
    }
    if let (Some(a), Some(b)) = (out.kept(), shuffled.kept()) {
        if a != b {
            return Err("permuting the input changed the kept cells".into());
        }
        if build_chain(a).unwrap() != build_chain(b).unwrap() {
            return Err("permuting the input changed the chain".into());
        }
    }
    Ok(())
}

pub fn check_chain_invariants(kept: &gridscan_core::KeptCells) -> Result<(), String> {
    let chain = build_chain(kept).map_err(|e| e.to_string())?;
    let mut visited: Vec<_> = chain.cells().to_vec();
    visited.sort();
    let all: Vec<_> = kept.cells().iter().map(|c| c.index.clone()).collect();
    if visited != all {
        return Err("chain is not a permutation of the kept cells".into());
    }
    let k = chain.len();
    for s in 1..=4 {
        let m = build_manifold(&chain, s).map_err(|e| e.to_string())?;
        if m.simplices.len() != k.saturating_sub(s) {
            return Err(format!(
                "s={s}: {} simplices for K={k}",
                m.simplices.len()
            ));
        }
        for (i, simplex) in m.simplices.iter().enumerate() {
            if *simplex != (i..=i + s).collect::<Vec<_>>() {
                return Err(format!("s={s}: simplex {i} is {simplex:?}"));
            }
        }
    }
    // start is the center nearest the origin
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let first = norm(&chain.vertices()[0]);
    if kept.cells().iter().any(|c| norm(&c.center) < first - 1e-12) {
        return Err("chain does not start at the cell nearest the origin".into());
    }
    Ok(())
}

/// 2-D Gaussian centered at (0.5, 0.5) with standard deviations 0.05 along
/// `angle` (radians) and 0.005 across it. Draws falling outside the unit
/// square are redrawn.
pub fn anisotropic_gaussian(seed: u64, j: usize, angle: f64) -> Dataset {
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let (long, short) = (0.05, 0.005);
    let (c, s) = (angle.cos(), angle.sin());
    let mut pts = Vec::with_capacity(j);
    while pts.len() < j {
        let u: f64 = StandardNormal.sample(&mut rng);
        let v: f64 = StandardNormal.sample(&mut rng);
        let p = vec![0.5 + long * u * c - short * v * s, 0.5 + long * u * s + short * v * c];
        if p.iter().all(|x| (0.0..=1.0).contains(x)) {
            pts.push(p);
        }
    }
    Dataset::new(pts).unwrap()
}

/// Gaussian cloud in `n` dimensions with a random orthonormal frame and
/// well-separated standard deviations `0.08 / 1.6^k`.
pub fn separated_spectrum(seed: u64, n: usize, j: usize) -> Dataset {
    use rand::{Rng, SeedableRng};
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(n);
    while frame.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        for b in &frame {
            let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
        }
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-3 {
            frame.push(v.into_iter().map(|x| x / len).collect());
        }
    }
    let sigmas: Vec<f64> = (0..n).map(|k| 0.08 / 1.6f64.powi(k as i32)).collect();
    let mut pts = Vec::with_capacity(j);
    while pts.len() < j {
        let mut p = vec![0.5; n];
        for (axis, sigma) in frame.iter().zip(&sigmas) {
            let z: f64 = StandardNormal.sample(&mut rng);
            p.iter_mut().zip(axis).for_each(|(x, u)| *x += z * sigma * u);
        }
        if p.iter().all(|x| (0.0..=1.0).contains(x)) {
            pts.push(p);
        }
    }
    Dataset::new(pts).unwrap()
}

/// Angle in degrees between a fitted axis and the direction `angle`, sign-agnostic.
pub fn axis_error_degrees(axis: &[f64], angle: f64) -> f64 {
    let d = (axis[0] * angle.cos() + axis[1] * angle.sin()).abs().min(1.0);
    d.acos().to_degrees()
}

/// Largest relative gap between power-iteration variances and the Jacobi
/// eigenvalues of the same covariance.
pub fn pca_vs_jacobi(ds: &Dataset) -> f64 {
    let n = ds.dim();
    let (_, cov) = gridscan_core::pca::covariance(ds);
    let oracle = jacobi_eigenvalues(&cov, n);
    let fit = gridscan_core::pca_fit(ds, n).unwrap();
    fit.variances
        .iter()
        .zip(&oracle)
        .map(|(v, o)| (v - o).abs() / o.abs())
        .fold(0.0, f64::max)
}

pub const FOUND_ARGS: &[&str] = &[
    "scan", "--synthetic", "sine-curve", "--count", "308", "--outliers", "0.08", "--seed", "7",
    "--volume-limit", "0.5", "--no-timings",
];
pub const NOT_FOUND_ARGS: &[&str] = &[
    "scan", "--synthetic", "uniform", "--count", "235", "--seed", "7", "--volume-limit", "0.5",
    "--coverage", "0.8", "--density-abs", "4", "--no-timings",
];

pub fn gridscan(args: &[&str]) -> std::process::Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_gridscan"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn exit_code(args: &[&str]) -> i32 {
    gridscan(args).status.code().expect("exited normally")
}

fn golden_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Runs `args` twice with `--report` and compares both reports byte for byte
/// against `tests/golden/<name>`. `UPDATE_GOLDEN=1` rewrites the file.
pub fn check_golden(name: &str, args: &[&str], expected_code: i32) -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for run in 0..2 {
        let path = dir.path().join(format!("{run}.json"));
        let mut full = args.to_vec();
        let p = path.to_str().unwrap();
        full.extend(["--report", p]);
        let code = exit_code(&full);
        if code != expected_code {
            return Err(format!("{name}: exit {code}, expected {expected_code}"));
        }
        outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    if outputs[0] != outputs[1] {
        return Err(format!("{name}: two runs differ"));
    }
    let golden = golden_dir().join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&golden, &outputs[0]).map_err(|e| e.to_string())?;
    }
    let stored = std::fs::read(&golden).map_err(|e| format!("{}: {e}", golden.display()))?;
    if stored != outputs[0] {
        return Err(format!("{name}: report differs from golden file"));
    }
    Ok(())
}

/// Exit codes for success, a clean negative, bad usage and bad data.
pub fn check_exit_codes() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let ragged = dir.path().join("ragged.csv");
    std::fs::write(&ragged, "x,y\n0.1,0.2\n0.3\n").unwrap();
    let missing = dir.path().join("missing.csv");
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (FOUND_ARGS.to_vec(), 0),
        (NOT_FOUND_ARGS.to_vec(), 3),
        (vec!["scan", "--synthetic", "uniform", "--volume-limit", "0"], 1),
        (vec!["scan", "--synthetic", "uniform", "--coverage", "1.5"], 1),
        (vec!["scan"], 1),
        (vec!["frobnicate"], 1),
        (vec!["scan", "--input", ragged.to_str().unwrap()], 2),
        (vec!["scan", "--input", missing.to_str().unwrap()], 2),
    ];
    for (args, expected) in cases {
        let code = exit_code(&args);
        if code != expected {
            return Err(format!("{args:?}: exit {code}, expected {expected}"));
        }
    }
    Ok(())
}

/// Generated points written as CSV and JSON reload to identical scans.
pub fn check_ingestion_round_trip() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut reports = Vec::new();
    for ext in ["csv", "json"] {
        let data = dir.path().join(format!("points.{ext}"));
        let data = data.to_str().unwrap();
        let code = exit_code(&[
            "gen", "--kind", "sine-curve", "--count", "308", "--outliers", "0.08", "--seed", "7",
            "--output", data,
        ]);
        if code != 0 {
            return Err(format!("gen {ext}: exit {code}"));
        }
        let report = dir.path().join(format!("{ext}.json"));
        let code = exit_code(&[
            "scan", "--input", data, "--volume-limit", "0.5", "--no-timings", "--report",
            report.to_str().unwrap(),
        ]);
        if code != 0 {
            return Err(format!("scan {ext}: exit {code}"));
        }
        let text = std::fs::read_to_string(&report).map_err(|e| e.to_string())?;
        let parsed = gridscan_core::RunReport::from_json(&text).map_err(|e| e.to_string())?;
        reports.push(parsed);
    }
    if reports[0] != reports[1] {
        return Err("CSV and JSON inputs give different reports".into());
    }
    Ok(())
}
