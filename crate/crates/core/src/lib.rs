//! Detects whether a point cloud concentrates near a low-dimensional
//! manifold by counting points on successively finer grids, and builds a
//! piecewise-linear model of that manifold when it does.
//!
//! The pipeline is:
//!
//! 1. [`normalize_to_unit_cube`] maps raw points into `[0, 1]^N`.
//! 2. [`scan`] doubles the grid resolution `a` from 2, keeping only cells
//!    with at least `p` points, until the kept volume drops below the limit
//!    (then coverage decides) or `a` passes its cap.
//! 3. [`build_chain`] and [`build_manifold`] join the kept cell centers into
//!    a polyline and its higher-dimensional windows.
//!
//! ```
//! use gridscan_core::{build_chain, generate, scan, ScanConfig, SyntheticKind, SyntheticSpec};
//!
//! let data = generate(&SyntheticSpec::new(SyntheticKind::Diagonal, 100, 2)).unwrap();
//! let config = ScanConfig { volume_limit: 0.5, ..ScanConfig::default() };
//! let outcome = scan(&data, &config).unwrap();
//! let kept = outcome.kept().expect("diagonal data lies on a line");
//! assert_eq!(kept.resolution().a(), 4);
//! assert_eq!(build_chain(kept).unwrap().len(), 4);
//! ```

pub mod bench;
mod error;
pub mod geometry;
pub mod io;
pub mod manifold;
pub mod pca;
pub mod plot;
pub mod report;
pub mod scan;
pub mod synth;

pub use bench::{run_bench, BenchOptions, BenchRecord, Method};
pub use error::{Error, Result};
pub use geometry::{
    build_histogram, build_histogram_parallel, cell_center, cell_of, normalize_to_unit_cube,
    CellEntry, CellHistogram, CellIndex, Dataset, GridResolution, UnitCubeTransform,
};
pub use io::{load_points, Header, PointFormat};
pub use manifold::{build_chain, build_manifold, count_tied_steps, Chain, PiecewiseLinearManifold};
pub use pca::{pca_fit, PrincipalAxes};
pub use plot::{emit_plot, render_svg};
pub use report::{emit_report, RunReport, Timings};
pub use scan::{
    effective_p, filter_cells, required_coverage, resolution_cap, scan, verify_found, CapPolicy,
    Density, KeptCell, KeptCells, NotFoundReason, ScanConfig, ScanOutcome, TraceEntry,
};
pub use synth::{generate, SyntheticKind, SyntheticSpec};
