//! SVG figures: data points in blue, kept cells as red squares, and the
//! chain as black line segments.
//!
//! Two-dimensional data is drawn in the unit square. Higher-dimensional data
//! is projected onto its first two principal axes; cells are then drawn as
//! squares of the cell side around their projected centers.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Dataset;
use crate::manifold::Chain;
use crate::pca::{pca_fit, PrincipalAxes};
use crate::scan::KeptCells;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 20.0;

enum Projection {
    Identity,
    FirstTwo,
    Principal(PrincipalAxes),
}

impl Projection {
    fn for_dataset(dataset: &Dataset) -> Self {
        match dataset.dim() {
            2 => Projection::Identity,
            1 => Projection::FirstTwo,
            _ => match pca_fit(dataset, 2) {
                Ok(axes) => Projection::Principal(axes),
                Err(_) => Projection::FirstTwo,
            },
        }
    }

    fn apply(&self, p: &[f64]) -> (f64, f64) {
        match self {
            Projection::Identity => (p[0], p[1]),
            Projection::FirstTwo => (p[0], p.get(1).copied().unwrap_or(0.5)),
            Projection::Principal(axes) => {
                let c = axes.project(p);
                (c[0], c[1])
            }
        }
    }
}

/// Affine map from plane coordinates onto the canvas, y pointing up.
struct Canvas {
    x0: f64,
    y0: f64,
    scale: f64,
}

impl Canvas {
    fn fit(xs: impl Iterator<Item = (f64, f64)>, unit_square: bool) -> Self {
        let span = SIZE - 2.0 * MARGIN;
        if unit_square {
            return Canvas {
                x0: 0.0,
                y0: 0.0,
                scale: span,
            };
        }
        let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for (x, y) in xs {
            lo_x = lo_x.min(x);
            lo_y = lo_y.min(y);
            hi_x = hi_x.max(x);
            hi_y = hi_y.max(y);
        }
        let extent = (hi_x - lo_x).max(hi_y - lo_y);
        let extent = if extent > 0.0 { extent } else { 1.0 };
        Canvas {
            x0: lo_x,
            y0: lo_y,
            scale: span / extent,
        }
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (
            MARGIN + (x - self.x0) * self.scale,
            SIZE - MARGIN - (y - self.y0) * self.scale,
        )
    }
}

/// Renders the figure as an SVG 1.1 document.
pub fn render_svg(dataset: &Dataset, kept: Option<&KeptCells>, chain: Option<&Chain>) -> String {
    let projection = Projection::for_dataset(dataset);
    let points: Vec<(f64, f64)> = dataset.points().map(|p| projection.apply(p)).collect();
    let centers: Vec<(f64, f64)> = kept
        .map(|k| k.cells().iter().map(|c| projection.apply(&c.center)).collect())
        .unwrap_or_default();
    let canvas = Canvas::fit(
        points.iter().chain(&centers).copied(),
        matches!(projection, Projection::Identity),
    );

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let (lo, hi) = (MARGIN, SIZE - MARGIN);
    let _ = writeln!(
        svg,
        r#"<path d="M {lo} {lo} H {hi} V {hi} H {lo} Z" fill="none" stroke="gray" stroke-width="1"/>"#
    );

    let _ = writeln!(svg, r#"<g id="points" fill="blue">"#);
    for &p in &points {
        let (x, y) = canvas.map(p);
        let _ = writeln!(svg, r#"<circle cx="{x:.3}" cy="{y:.3}" r="1.5"/>"#);
    }
    let _ = writeln!(svg, "</g>");

    if let Some(kept) = kept {
        let side = kept.resolution().side() * canvas.scale;
        let _ = writeln!(
            svg,
            r#"<g id="cells" fill="red" fill-opacity="0.25" stroke="red" stroke-width="1">"#
        );
        for &c in &centers {
            let (x, y) = canvas.map(c);
            let _ = writeln!(
                svg,
                r#"<rect x="{:.3}" y="{:.3}" width="{side:.3}" height="{side:.3}"/>"#,
                x - side / 2.0,
                y - side / 2.0
            );
        }
        let _ = writeln!(svg, "</g>");
    }

    if let Some(chain) = chain {
        let _ = writeln!(svg, r#"<g id="chain" stroke="black" stroke-width="1.5">"#);
        for pair in chain.vertices().windows(2) {
            let (x1, y1) = canvas.map(projection.apply(&pair[0]));
            let (x2, y2) = canvas.map(projection.apply(&pair[1]));
            let _ = writeln!(
                svg,
                r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"/>"#
            );
        }
        let _ = writeln!(svg, "</g>");
    }
    let _ = writeln!(svg, "</svg>");
    svg
}

pub fn emit_plot(
    dataset: &Dataset,
    kept: Option<&KeptCells>,
    chain: Option<&Chain>,
    path: &Path,
) -> Result<()> {
    fs::write(path, render_svg(dataset, kept, chain)).map_err(|e| Error::io(path, e))
}
