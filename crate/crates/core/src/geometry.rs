//! Point clouds normalized into the unit cube, and sparse cell bookkeeping
//! over a regular grid of `a` intervals per axis.

use std::borrow::Borrow;
use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed when checking that a coordinate lies in `[0, 1]`.
pub const DOMAIN_TOLERANCE: f64 = 1e-12;

/// A point cloud whose coordinates all lie in `[0, 1]`.
///
/// Points are stored row-major in a single buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    coords: Vec<f64>,
    dim: usize,
}

impl Dataset {
    /// Builds a dataset from points already inside the unit cube.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = check_shape(&points)?;
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            for (axis, &x) in p.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::InvalidCoordinate { point: i, axis });
                }
                if !(0.0..=1.0).contains(&x) {
                    return Err(Error::OutOfDomain { axis, value: x });
                }
                coords.push(x);
            }
        }
        Ok(Dataset { coords, dim })
    }

    /// Ambient dimension `N`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of points `J`.
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.points().map(<[f64]>::to_vec).collect()
    }
}

fn check_shape(points: &[Vec<f64>]) -> Result<usize> {
    let first = points.first().ok_or(Error::EmptyDataset)?;
    let dim = first.len();
    if dim == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
            line: Some(1),
        });
    }
    for (i, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.len(),
                line: Some(i + 1),
            });
        }
    }
    Ok(dim)
}

/// Per-axis affine map `x' = (x - offset) * scale` taking raw data into the unit cube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitCubeTransform {
    pub offset: Vec<f64>,
    pub scale: Vec<f64>,
}

impl UnitCubeTransform {
    pub fn apply(&self, raw: &[f64]) -> Vec<f64> {
        raw.iter()
            .zip(self.offset.iter().zip(&self.scale))
            .map(|(&x, (&o, &s))| ((x - o) * s).clamp(0.0, 1.0))
            .collect()
    }

    pub fn invert(&self, unit: &[f64]) -> Vec<f64> {
        unit.iter()
            .zip(self.offset.iter().zip(&self.scale))
            .map(|(&u, (&o, &s))| u / s + o)
            .collect()
    }
}

/// Rescales the bounding box of `raw` onto `[0, 1]^N`.
///
/// Axes with zero extent are sent to 0.5 with unit scale so the transform
/// stays invertible on the data.
pub fn normalize_to_unit_cube(raw: &[Vec<f64>]) -> Result<(Dataset, UnitCubeTransform)> {
    let dim = check_shape(raw)?;
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for (i, p) in raw.iter().enumerate() {
        for (axis, &x) in p.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::InvalidCoordinate { point: i, axis });
            }
            lo[axis] = lo[axis].min(x);
            hi[axis] = hi[axis].max(x);
        }
    }

    let mut offset = Vec::with_capacity(dim);
    let mut scale = Vec::with_capacity(dim);
    for axis in 0..dim {
        let extent = hi[axis] - lo[axis];
        if extent > 0.0 && extent.is_finite() {
            offset.push(lo[axis]);
            scale.push(1.0 / extent);
        } else {
            offset.push(lo[axis] - 0.5);
            scale.push(1.0);
        }
    }
    let transform = UnitCubeTransform { offset, scale };

    let mut coords = Vec::with_capacity(raw.len() * dim);
    for p in raw {
        coords.extend(transform.apply(p));
    }
    Ok((Dataset { coords, dim }, transform))
}

/// A grid of `a` equal intervals per axis over the unit cube in `dim` dimensions.
///
/// The side length is kept implicitly as `1/a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridResolution {
    a: u32,
    dim: usize,
}

impl GridResolution {
    pub fn new(a: u32, dim: usize) -> Result<Self> {
        if a == 0 {
            return Err(Error::InvalidConfig("resolution must be at least 1".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidConfig("dimension must be at least 1".into()));
        }
        Ok(GridResolution { a, dim })
    }

    /// Cells per axis.
    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Cell side `r = 1/a`.
    pub fn side(&self) -> f64 {
        1.0 / f64::from(self.a)
    }

    /// Total number of cells `a^N`, if it fits in a `u128`.
    pub fn cell_count(&self) -> Option<u128> {
        u128::from(self.a).checked_pow(u32::try_from(self.dim).ok()?)
    }

    /// Volume of `k` cells, `k / a^N`.
    pub fn volume_of(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        // Single rounding whenever a^N is exactly representable.
        if let Some(m) = self.cell_count().filter(|&m| m <= 1 << 53) {
            return k as f64 / m as f64;
        }
        let mut v = k as f64;
        let a = f64::from(self.a);
        for _ in 0..self.dim {
            v /= a;
        }
        v
    }
}

/// Integer coordinates of one grid cell, each in `[0, a-1]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CellIndex(Vec<u32>);

impl CellIndex {
    pub fn new(coords: Vec<u32>) -> Self {
        CellIndex(coords)
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn validate(&self, resolution: GridResolution) -> Result<()> {
        if self.0.len() != resolution.dim || self.0.iter().any(|&c| c >= resolution.a) {
            return Err(Error::InvalidIndex {
                index: self.0.clone(),
                a: resolution.a,
            });
        }
        Ok(())
    }
}

impl Borrow<[u32]> for CellIndex {
    fn borrow(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Debug for CellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[inline]
fn axis_cell(x: f64, axis: usize, a: u32) -> Result<u32> {
    if !(-DOMAIN_TOLERANCE..=1.0 + DOMAIN_TOLERANCE).contains(&x) {
        return Err(Error::OutOfDomain { axis, value: x });
    }
    let k = (x.clamp(0.0, 1.0) * f64::from(a)).floor() as u32;
    Ok(k.min(a - 1))
}

fn fill_cell(point: &[f64], a: u32, out: &mut [u32]) -> Result<()> {
    for (axis, (&x, slot)) in point.iter().zip(out.iter_mut()).enumerate() {
        *slot = axis_cell(x, axis, a)?;
    }
    Ok(())
}

/// The cell containing `point`: half-open intervals `[k/a, (k+1)/a)`, with
/// the upper face `1.0` folded into the last cell.
pub fn cell_of(point: &[f64], resolution: GridResolution) -> Result<CellIndex> {
    if point.len() != resolution.dim {
        return Err(Error::DimensionMismatch {
            expected: resolution.dim,
            found: point.len(),
            line: None,
        });
    }
    let mut coords = vec![0; resolution.dim];
    fill_cell(point, resolution.a, &mut coords)?;
    Ok(CellIndex(coords))
}

/// Center of a cell, `(index_i + 0.5) / a` on each axis.
pub fn cell_center(index: &CellIndex, resolution: GridResolution) -> Result<Vec<f64>> {
    index.validate(resolution)?;
    let r = resolution.side();
    Ok(index.0.iter().map(|&c| (f64::from(c) + 0.5) * r).collect())
}

/// Occupancy of one cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellEntry {
    pub count: usize,
    /// Ids of the points in this cell, ascending.
    pub members: Vec<usize>,
}

/// Sparse point counts per occupied cell at one resolution.
#[derive(Debug, Clone)]
pub struct CellHistogram {
    resolution: GridResolution,
    cells: HashMap<CellIndex, CellEntry>,
}

impl CellHistogram {
    pub fn resolution(&self) -> GridResolution {
        self.resolution
    }

    /// Number of occupied cells.
    pub fn occupied(&self) -> usize {
        self.cells.len()
    }

    pub fn get(&self, index: &[u32]) -> Option<&CellEntry> {
        self.cells.get(index)
    }

    /// Count in a cell; zero for unoccupied cells.
    pub fn count(&self, index: &[u32]) -> usize {
        self.get(index).map_or(0, |e| e.count)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CellIndex, &CellEntry)> {
        self.cells.iter()
    }

    /// Sum of all cell counts.
    pub fn total(&self) -> usize {
        self.cells.values().map(|e| e.count).sum()
    }

    /// Merges another partial histogram at the same resolution into this one.
    fn merge(mut self, other: CellHistogram) -> CellHistogram {
        for (index, entry) in other.cells {
            match self.cells.get_mut(&index) {
                Some(existing) => {
                    existing.count += entry.count;
                    existing.members.extend(entry.members);
                }
                None => {
                    self.cells.insert(index, entry);
                }
            }
        }
        self
    }
}

fn histogram_range(
    dataset: &Dataset,
    resolution: GridResolution,
    range: std::ops::Range<usize>,
) -> Result<CellHistogram> {
    let mut cells: HashMap<CellIndex, CellEntry> = HashMap::new();
    let mut buf = vec![0u32; resolution.dim];
    for id in range {
        fill_cell(dataset.point(id), resolution.a, &mut buf)?;
        match cells.get_mut(buf.as_slice()) {
            Some(entry) => {
                entry.count += 1;
                entry.members.push(id);
            }
            None => {
                cells.insert(
                    CellIndex(buf.clone()),
                    CellEntry {
                        count: 1,
                        members: vec![id],
                    },
                );
            }
        }
    }
    Ok(CellHistogram { resolution, cells })
}

fn check_dims(dataset: &Dataset, resolution: GridResolution) -> Result<()> {
    if dataset.dim() != resolution.dim {
        return Err(Error::DimensionMismatch {
            expected: resolution.dim,
            found: dataset.dim(),
            line: None,
        });
    }
    Ok(())
}

/// Counts points per occupied cell in a single pass, `O(J·N)`.
pub fn build_histogram(dataset: &Dataset, resolution: GridResolution) -> Result<CellHistogram> {
    check_dims(dataset, resolution)?;
    histogram_range(dataset, resolution, 0..dataset.len())
}

/// Same result as [`build_histogram`], with the point list split across the
/// rayon thread pool and the partial counts merged.
pub fn build_histogram_parallel(
    dataset: &Dataset,
    resolution: GridResolution,
) -> Result<CellHistogram> {
    check_dims(dataset, resolution)?;
    const CHUNK: usize = 8192;
    let n = dataset.len();
    let chunks: Vec<_> = (0..n.div_ceil(CHUNK))
        .map(|c| c * CHUNK..((c + 1) * CHUNK).min(n))
        .collect();
    let partials = chunks
        .into_par_iter()
        .map(|range| histogram_range(dataset, resolution, range))
        .collect::<Result<Vec<_>>>()?;
    let empty = CellHistogram {
        resolution,
        cells: HashMap::new(),
    };
    let mut merged = partials.into_iter().fold(empty, CellHistogram::merge);
    for entry in merged.cells.values_mut() {
        entry.members.sort_unstable();
    }
    Ok(merged)
}
