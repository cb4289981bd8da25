//! JSON run reports.
//!
//! Schema version 1, keys in the order written below:
//!
//! ```text
//! {
//!   "schema_version": 1,
//!   "config":   { "scan": {volume_limit, coverage_fraction, density{kind,value},
//!                           a_cap, a_start, parallel},
//!                 "manifold_dim": s },
//!   "dataset":  { "size": J, "dim": N, "transform": {offset[], scale[]} | null },
//!   "outcome":  { "status": "found" | "not_found",
//!                 "reason": null | "empty_after_filter" | "resolution_cap_exceeded"
//!                           | "coverage_too_low",
//!                 "resolution": a | null, "effective_p", "required_coverage",
//!                 "resolution_cap", "kept", "total_volume", "covered" },
//!   "trace":    [ {a, occupied, kept, total_volume, covered}, ... ],
//!   "kept_cells": [ {index[], center[], count}, ... ] | null,
//!   "manifold": { "dim", "chain": [positions into kept_cells], "simplices": [[chain
//!                 positions]], "tied_steps" } | null,
//!   "timings_ms": { "load", "scan", "manifold" } | null
//! }
//! ```
//!
//! Every float is written in scientific notation with 17 significant
//! digits, so values reload bit-for-bit.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::geometry::{CellIndex, Dataset, GridResolution, UnitCubeTransform};
use crate::manifold::{build_chain, build_manifold, count_tied_steps};
use crate::scan::{
    effective_p, required_coverage, resolution_cap, KeptCells, NotFoundReason, ScanConfig,
    ScanOutcome, TraceEntry,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: ConfigEcho,
    pub dataset: DatasetSummary,
    pub outcome: OutcomeSummary,
    pub trace: Vec<TraceEntry>,
    pub kept_cells: Option<Vec<KeptCellRecord>>,
    pub manifold: Option<ManifoldRecord>,
    pub timings_ms: Option<Timings>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub scan: ScanConfig,
    pub manifold_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub size: usize,
    pub dim: usize,
    pub transform: Option<UnitCubeTransform>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Found,
    NotFound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeSummary {
    pub status: Status,
    pub reason: Option<NotFoundReason>,
    pub resolution: Option<u32>,
    pub effective_p: usize,
    pub required_coverage: usize,
    pub resolution_cap: u32,
    pub kept: usize,
    pub total_volume: f64,
    pub covered: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeptCellRecord {
    pub index: CellIndex,
    pub center: Vec<f64>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldRecord {
    pub dim: usize,
    pub chain: Vec<usize>,
    pub simplices: Vec<Vec<usize>>,
    pub tied_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Timings {
    pub load: f64,
    pub scan: f64,
    pub manifold: f64,
}

impl RunReport {
    /// Assembles a report, building the chain and `s`-manifold when the
    /// scan found something.
    pub fn new(
        config: &ScanConfig,
        manifold_dim: usize,
        dataset: &Dataset,
        transform: Option<&UnitCubeTransform>,
        outcome: &ScanOutcome,
    ) -> Result<Self> {
        let j = dataset.len();
        let trace = outcome.trace().to_vec();
        let last = trace.last();
        let (status, reason) = match outcome {
            ScanOutcome::Found { .. } => (Status::Found, None),
            ScanOutcome::NotFound { reason, .. } => (Status::NotFound, Some(*reason)),
        };
        let summary = OutcomeSummary {
            status,
            reason,
            resolution: outcome.kept().map(|k| k.resolution().a()),
            effective_p: effective_p(config, j),
            required_coverage: required_coverage(config, j),
            resolution_cap: resolution_cap(config, j, dataset.dim()),
            kept: last.map_or(0, |t| t.kept),
            total_volume: last.map_or(0.0, |t| t.total_volume),
            covered: last.map_or(0, |t| t.covered),
        };

        let (kept_cells, manifold) = match outcome.kept() {
            Some(kept) => {
                let chain = build_chain(kept)?;
                let simplices = build_manifold(&chain, manifold_dim)?.simplices;
                let position = |idx: &CellIndex| {
                    kept.cells()
                        .binary_search_by(|c| c.index.cmp(idx))
                        .expect("chain vertices are kept cells")
                };
                let record = ManifoldRecord {
                    dim: manifold_dim,
                    chain: chain.cells().iter().map(position).collect(),
                    simplices,
                    tied_steps: count_tied_steps(kept),
                };
                let cells = kept
                    .cells()
                    .iter()
                    .map(|c| KeptCellRecord {
                        index: c.index.clone(),
                        center: c.center.clone(),
                        count: c.count,
                    })
                    .collect();
                (Some(cells), Some(record))
            }
            None => (None, None),
        };

        Ok(RunReport {
            schema_version: SCHEMA_VERSION,
            config: ConfigEcho {
                scan: config.clone(),
                manifold_dim,
            },
            dataset: DatasetSummary {
                size: j,
                dim: dataset.dim(),
                transform: transform.cloned(),
            },
            outcome: summary,
            trace,
            kept_cells,
            manifold,
            timings_ms: None,
        })
    }

    pub fn with_timings(mut self, timings: Timings) -> Self {
        self.timings_ms = Some(timings);
        self
    }

    /// Drops the kept cells and manifold, leaving config, outcome and trace.
    pub fn trace_only(mut self) -> Self {
        self.kept_cells = None;
        self.manifold = None;
        self
    }

    /// Rebuilds the kept cells recorded in the report, if any.
    pub fn kept(&self) -> Result<Option<KeptCells>> {
        let (Some(cells), Some(a)) = (&self.kept_cells, self.outcome.resolution) else {
            return Ok(None);
        };
        let resolution = GridResolution::new(a, self.dataset.dim)?;
        let cells = cells.iter().map(|c| (c.index.clone(), c.count)).collect();
        KeptCells::from_cells(resolution, self.outcome.effective_p, cells).map(Some)
    }

    pub fn to_json(&self) -> String {
        let mut buf = Vec::new();
        let mut ser =
            serde_json::Serializer::with_formatter(&mut buf, PreciseFormatter::default());
        self.serialize(&mut ser)
            .expect("report serialization is infallible");
        buf.push(b'\n');
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: RunReport = serde_json::from_str(text)?;
        if report.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported report schema version {}",
                report.schema_version
            )));
        }
        Ok(report)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

pub fn emit_report(report: &RunReport, path: &Path) -> Result<()> {
    fs::write(path, report.to_json()).map_err(|e| Error::io(path, e))
}

/// Pretty printer that writes floats as `d.dddddddddddddddde±x`.
#[derive(Default)]
struct PreciseFormatter {
    inner: PrettyFormatter<'static>,
}

impl PreciseFormatter {
    fn write_float<W: ?Sized + Write>(writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }
}

impl Formatter for PreciseFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        Self::write_float(writer, value)
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        Self::write_float(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}
