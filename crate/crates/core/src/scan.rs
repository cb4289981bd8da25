//! The adaptive doubling scan: count points per cell, drop sparse cells,
//! then either refine the grid, give up, or accept the kept cells.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    build_histogram, build_histogram_parallel, cell_center, CellHistogram, CellIndex, Dataset,
    GridResolution,
};

/// Minimum-count threshold for keeping a cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Density {
    /// Fraction of the point count, rounded up to an integer.
    Fraction(f64),
    Absolute(usize),
}

/// Upper bound on the grid resolution `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapPolicy {
    /// `a <= J^(1/N)`
    Full,
    /// `a <= J^(1/(2N))`, trading resolution for speed.
    Half,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Kept cells must have total volume strictly below this.
    pub volume_limit: f64,
    /// Kept cells must hold at least this fraction of the points.
    pub coverage_fraction: f64,
    pub density: Density,
    pub a_cap: CapPolicy,
    pub a_start: u32,
    /// Build histograms on the rayon pool.
    #[serde(default)]
    pub parallel: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            volume_limit: 0.4,
            coverage_fraction: 0.9,
            density: Density::Fraction(0.005),
            a_cap: CapPolicy::Full,
            a_start: 2,
            parallel: false,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.volume_limit > 0.0 && self.volume_limit <= 1.0) {
            return bad(format!("volume limit {} not in (0, 1]", self.volume_limit));
        }
        if !(self.coverage_fraction > 0.0 && self.coverage_fraction <= 1.0) {
            return bad(format!(
                "coverage fraction {} not in (0, 1]",
                self.coverage_fraction
            ));
        }
        match self.density {
            Density::Fraction(f) if !(f > 0.0 && f < 1.0) => {
                return bad(format!("density fraction {f} not in (0, 1)"));
            }
            Density::Absolute(0) => return bad("absolute density must be at least 1".into()),
            _ => {}
        }
        if self.a_start < 2 {
            return bad(format!("starting resolution {} is below 2", self.a_start));
        }
        Ok(())
    }
}

/// `ceil(x)`, except that values within rounding noise of an integer snap to it.
fn ceil_snapped(x: f64) -> usize {
    let nearest = x.round();
    if (x - nearest).abs() <= 1e-9 * nearest.abs().max(1.0) {
        nearest as usize
    } else {
        x.ceil() as usize
    }
}

/// The integer density threshold `p` for a dataset of `j` points.
///
/// A fractional `f·J` that is not already an integer is rounded up; the
/// result is never below 1.
pub fn effective_p(config: &ScanConfig, j: usize) -> usize {
    match config.density {
        Density::Fraction(f) => ceil_snapped(f * j as f64).max(1),
        Density::Absolute(p) => p,
    }
}

/// Minimum number of points the kept cells must cover, `ceil(fraction·J)`.
pub fn required_coverage(config: &ScanConfig, j: usize) -> usize {
    ceil_snapped(config.coverage_fraction * j as f64)
}

/// `floor(j^(1/root))` using exact integer checks.
fn integer_root(j: usize, root: u32) -> u32 {
    let j = j as u128;
    let fits = |k: u128| k.checked_pow(root).is_some_and(|v| v <= j);
    let mut k = (j as f64).powf(1.0 / f64::from(root)).floor() as u128;
    while k > 0 && !fits(k) {
        k -= 1;
    }
    while fits(k + 1) {
        k += 1;
    }
    u32::try_from(k).unwrap_or(u32::MAX)
}

/// Largest admissible resolution for `j` points in `dim` dimensions.
pub fn resolution_cap(config: &ScanConfig, j: usize, dim: usize) -> u32 {
    let dim = u32::try_from(dim).unwrap_or(u32::MAX);
    let root = match config.a_cap {
        CapPolicy::Full => dim,
        CapPolicy::Half => dim.saturating_mul(2),
    };
    integer_root(j, root)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeptCell {
    pub index: CellIndex,
    pub center: Vec<f64>,
    pub count: usize,
}

/// Cells that survived the density filter at one resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct KeptCells {
    resolution: GridResolution,
    threshold: usize,
    cells: Vec<KeptCell>,
    covered: usize,
}

impl KeptCells {
    pub fn resolution(&self) -> GridResolution {
        self.resolution
    }

    /// The `p` that was used to filter.
    pub fn threshold(&self) -> usize {
        self.threshold
    }

    /// Kept cells, sorted by index.
    pub fn cells(&self) -> &[KeptCell] {
        &self.cells
    }

    /// `K`
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// `K / a^N`
    pub fn total_volume(&self) -> f64 {
        self.resolution.volume_of(self.cells.len())
    }

    /// Number of points inside kept cells.
    pub fn covered(&self) -> usize {
        self.covered
    }

    /// Builds a kept set from explicit cells, e.g. when reloading a report.
    pub fn from_cells(
        resolution: GridResolution,
        threshold: usize,
        mut cells: Vec<(CellIndex, usize)>,
    ) -> Result<Self> {
        cells.sort_by(|x, y| x.0.cmp(&y.0));
        let mut kept = Vec::with_capacity(cells.len());
        for (index, count) in cells {
            let center = cell_center(&index, resolution)?;
            kept.push(KeptCell {
                index,
                center,
                count,
            });
        }
        let covered = kept.iter().map(|c| c.count).sum();
        Ok(KeptCells {
            resolution,
            threshold,
            cells: kept,
            covered,
        })
    }
}

/// Keeps exactly the cells holding at least `p` points.
pub fn filter_cells(hist: &CellHistogram, p: usize) -> KeptCells {
    let resolution = hist.resolution();
    let r = resolution.side();
    let mut cells: Vec<KeptCell> = hist
        .iter()
        .filter(|(_, e)| e.count >= p)
        .map(|(index, e)| KeptCell {
            index: index.clone(),
            center: index
                .coords()
                .iter()
                .map(|&c| (f64::from(c) + 0.5) * r)
                .collect(),
            count: e.count,
        })
        .collect();
    cells.sort_by(|x, y| x.index.cmp(&y.index));
    let covered = cells.iter().map(|c| c.count).sum();
    KeptCells {
        resolution,
        threshold: p,
        cells,
        covered,
    }
}

/// One pass of the loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub a: u32,
    pub occupied: usize,
    pub kept: usize,
    pub total_volume: f64,
    pub covered: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NotFoundReason {
    /// Every cell fell below the density threshold.
    EmptyAfterFilter,
    /// The kept volume never dropped below the limit before `a` hit its cap.
    ResolutionCapExceeded,
    /// The volume test passed but too few points were covered.
    CoverageTooLow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScanOutcome {
    Found {
        kept: KeptCells,
        trace: Vec<TraceEntry>,
    },
    NotFound {
        reason: NotFoundReason,
        trace: Vec<TraceEntry>,
    },
}

impl ScanOutcome {
    pub fn trace(&self) -> &[TraceEntry] {
        match self {
            ScanOutcome::Found { trace, .. } | ScanOutcome::NotFound { trace, .. } => trace,
        }
    }

    pub fn kept(&self) -> Option<&KeptCells> {
        match self {
            ScanOutcome::Found { kept, .. } => Some(kept),
            ScanOutcome::NotFound { .. } => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, ScanOutcome::Found { .. })
    }
}

/// Runs the doubling loop starting from `config.a_start`.
///
/// At each resolution the cells with fewer than `p` points are dropped. An
/// empty remainder ends the scan. A kept volume at or above the limit doubles
/// `a`, unless that would pass the resolution cap. Otherwise the coverage test
/// decides between `Found` and `CoverageTooLow`.
pub fn scan(dataset: &Dataset, config: &ScanConfig) -> Result<ScanOutcome> {
    config.validate()?;
    let j = dataset.len();
    let dim = dataset.dim();
    let p = effective_p(config, j);
    let needed = required_coverage(config, j);
    let cap = resolution_cap(config, j, dim);

    let mut trace = Vec::new();
    let mut a = config.a_start;
    loop {
        let resolution = GridResolution::new(a, dim)?;
        let hist = if config.parallel {
            build_histogram_parallel(dataset, resolution)?
        } else {
            build_histogram(dataset, resolution)?
        };
        let kept = filter_cells(&hist, p);
        let volume = kept.total_volume();
        trace.push(TraceEntry {
            a,
            occupied: hist.occupied(),
            kept: kept.len(),
            total_volume: volume,
            covered: kept.covered(),
        });

        if kept.is_empty() {
            return Ok(ScanOutcome::NotFound {
                reason: NotFoundReason::EmptyAfterFilter,
                trace,
            });
        }
        // Only reachable on the first pass, when a_start already exceeds the cap.
        if a > cap {
            return Ok(ScanOutcome::NotFound {
                reason: NotFoundReason::ResolutionCapExceeded,
                trace,
            });
        }
        if volume >= config.volume_limit {
            match a.checked_mul(2).filter(|&next| next <= cap) {
                Some(next) => {
                    a = next;
                    continue;
                }
                None => {
                    return Ok(ScanOutcome::NotFound {
                        reason: NotFoundReason::ResolutionCapExceeded,
                        trace,
                    })
                }
            }
        }
        if kept.covered() < needed {
            return Ok(ScanOutcome::NotFound {
                reason: NotFoundReason::CoverageTooLow,
                trace,
            });
        }
        return Ok(ScanOutcome::Found { kept, trace });
    }
}

/// Re-checks a `Found` result against the raw points without the histogram.
///
/// Every kept cell is recounted by interval tests, then the threshold,
/// coverage and volume conditions are verified.
pub fn verify_found(dataset: &Dataset, config: &ScanConfig, kept: &KeptCells) -> Result<()> {
    let violation = |msg: String| Err(Error::CertificateViolation(msg));
    let resolution = kept.resolution();
    let a = f64::from(resolution.a());
    let p = effective_p(config, dataset.len());
    if kept.is_empty() {
        return violation("no kept cells".into());
    }

    let mut covered = 0;
    for cell in kept.cells() {
        let inside = |x: f64, k: u32| {
            let scaled = x * a;
            let last = k + 1 == resolution.a();
            f64::from(k) <= scaled && (scaled < f64::from(k + 1) || (last && x >= 1.0))
        };
        let count = dataset
            .points()
            .filter(|pt| pt.iter().zip(cell.index.coords()).all(|(&x, &k)| inside(x, k)))
            .count();
        if count != cell.count {
            return violation(format!(
                "cell {:?} recorded {} points, recount gives {count}",
                cell.index, cell.count
            ));
        }
        if count < p {
            return violation(format!("cell {:?} has {count} < p = {p}", cell.index));
        }
        covered += count;
    }

    let needed = required_coverage(config, dataset.len());
    if covered < needed {
        return violation(format!("covered {covered} < required {needed}"));
    }
    let volume = resolution.volume_of(kept.len());
    if volume >= config.volume_limit {
        return violation(format!(
            "volume {volume} is not below {}",
            config.volume_limit
        ));
    }
    Ok(())
}
