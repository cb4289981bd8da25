//! Piecewise-linear manifolds over kept cells: a greedy nearest-neighbour
//! chain of cell centers, and sliding windows of `s + 1` chain vertices as
//! the `s`-simplices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::CellIndex;
use crate::scan::KeptCells;

/// Distances closer than this are treated as equal.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Kept-cell centers in visiting order.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    vertices: Vec<Vec<f64>>,
    cells: Vec<CellIndex>,
}

impl Chain {
    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Cell of each vertex, aligned with [`Chain::vertices`].
    pub fn cells(&self) -> &[CellIndex] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// `s`-dimensional simplices over a chain. Each simplex lists `s + 1`
/// zero-based vertex positions in the chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiecewiseLinearManifold {
    pub dim: usize,
    pub simplices: Vec<Vec<usize>>,
}

fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

struct Walk {
    order: Vec<usize>,
    tied_steps: usize,
}

/// Picks the best candidate among `remaining` by distance to `from`;
/// near-equal distances go to the smallest cell index. Returns the position
/// in `remaining` and whether the minimum was shared.
fn closest(kept: &KeptCells, remaining: &[usize], from: &[f64]) -> (usize, bool) {
    let cells = kept.cells();
    let dists: Vec<f64> = remaining
        .iter()
        .map(|&i| distance(&cells[i].center, from))
        .collect();
    let min = dists.iter().copied().fold(f64::INFINITY, f64::min);
    let mut best: Option<usize> = None;
    let mut ties = 0;
    for (pos, &d) in dists.iter().enumerate() {
        if d - min <= TIE_TOLERANCE {
            ties += 1;
            let better = match best {
                None => true,
                Some(b) => cells[remaining[pos]].index < cells[remaining[b]].index,
            };
            if better {
                best = Some(pos);
            }
        }
    }
    (best.expect("remaining is non-empty"), ties > 1)
}

fn greedy_walk(kept: &KeptCells) -> Result<Walk> {
    if kept.is_empty() {
        return Err(Error::NoCellsKept);
    }
    let dim = kept.resolution().dim();
    let mut remaining: Vec<usize> = (0..kept.len()).collect();
    let mut order = Vec::with_capacity(kept.len());
    let mut tied_steps = 0;

    let mut from = vec![0.0; dim];
    while !remaining.is_empty() {
        let (pos, tied) = closest(kept, &remaining, &from);
        if tied {
            tied_steps += 1;
        }
        let next = remaining.swap_remove(pos);
        from.clone_from(&kept.cells()[next].center);
        order.push(next);
    }
    Ok(Walk { order, tied_steps })
}

/// Orders the kept centers greedily: start at the one closest to the origin,
/// then repeatedly step to the nearest unvisited center.
pub fn build_chain(kept: &KeptCells) -> Result<Chain> {
    let walk = greedy_walk(kept)?;
    let cells = kept.cells();
    Ok(Chain {
        vertices: walk.order.iter().map(|&i| cells[i].center.clone()).collect(),
        cells: walk.order.iter().map(|&i| cells[i].index.clone()).collect(),
    })
}

/// Number of greedy choices (including the starting cell) where two or more
/// candidates were equally close, i.e. where a different chain was possible.
pub fn count_tied_steps(kept: &KeptCells) -> usize {
    greedy_walk(kept).map_or(0, |w| w.tied_steps)
}

/// Windows of `s + 1` consecutive chain vertices: edges for `s = 1`,
/// triangles for `s = 2`. A chain of `s` or fewer vertices has no simplices.
pub fn build_manifold(chain: &Chain, s: usize) -> Result<PiecewiseLinearManifold> {
    if s < 1 {
        return Err(Error::InvalidDimension(s));
    }
    let k = chain.len();
    let simplices = (0..k.saturating_sub(s))
        .map(|start| (start..=start + s).collect())
        .collect();
    Ok(PiecewiseLinearManifold { dim: s, simplices })
}
