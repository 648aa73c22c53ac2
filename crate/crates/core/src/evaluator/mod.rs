//! Rule-based evaluator: recovers figure class, count, color and exception
//! status from an RGB image.

pub mod blur;
pub mod canny;
pub mod classify;
pub mod contours;
pub mod kmeans;
pub mod mask;
pub mod simplify;
pub mod skeleton;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::FigureClass;
use crate::raster::{RasterImage, Rgb};

pub use blur::{gaussian_blur, to_luma, GrayImage};
pub use canny::{canny_edges, EdgeMap};
pub use classify::{classify_component, ComponentKind};
pub use contours::{trace_contours, BorderType, Contour};
pub use kmeans::{dominant_colors, dominant_colors_lenient, kmeans_rgb, ColorCluster};
pub use mask::{BinaryMask, Pixel};
pub use simplify::simplify_dp;
pub use skeleton::SkeletonInfo;

use classify::{principal_angle_deg, refine_vertices, regularity, to_point, undirected_angle_diff};
use simplify::dp_closed_indices;

/// Smallest image side the pipeline accepts.
pub const MIN_IMAGE_SIDE: u32 = 16;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("bad blur kernel: {0}")]
    BadKernel(String),
    #[error("bad canny thresholds: need 0 <= low < high, got low={low} high={high}")]
    BadThresholds { low: f64, high: f64 },
    #[error("k-means needs k >= 2, got {0}")]
    BadClusterCount(usize),
    #[error("image has only {} distinct colors", clusters.len())]
    DegenerateInput { clusters: Vec<ColorCluster> },
    #[error("image is {width}x{height}; evaluator needs at least {MIN_IMAGE_SIDE}x{MIN_IMAGE_SIDE}")]
    ImageTooSmall { width: u32, height: u32 },
}

pub type Result<T> = std::result::Result<T, EvalError>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub blur_sigma: f64,
    pub blur_ksize: usize,
    pub canny_low: f64,
    pub canny_high: f64,
    pub dp_epsilon: f64,
    pub kmeans_k: usize,
    pub kmeans_seed: u64,
    /// Side-length coefficient of variation allowed for a regular polygon.
    pub reg_side_cv: f64,
    /// Largest interior-angle deviation allowed for a regular polygon.
    pub reg_angle_tol_deg: f64,
    pub color_linf_tol: f64,
    /// Smaller components are dropped as noise; smaller enclosed background
    /// pockets are filled.
    pub min_component_px: usize,
    /// Largest direction difference between strokes counted as parallel.
    pub parallel_tol_deg: f64,
    /// L∞ distance from the background color above which a pixel is figure.
    pub fg_contrast: f64,
}

impl EvalConfig {
    /// Defaults at 64 px with lengths scaled to `size`.
    pub fn for_canvas(size: u32) -> Self {
        let s = size as f64 / 64.0;
        EvalConfig {
            blur_sigma: 1.0,
            blur_ksize: 5,
            canny_low: 50.0,
            canny_high: 150.0,
            dp_epsilon: 2.0 * s,
            kmeans_k: 3,
            kmeans_seed: 0,
            reg_side_cv: 0.08,
            reg_angle_tol_deg: 10.0,
            color_linf_tol: 20.0,
            min_component_px: ((4.0 * s).round() as usize).max(2),
            parallel_tol_deg: 10.0,
            fg_contrast: 32.0,
        }
    }
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig::for_canvas(64)
    }
}

/// A figure class, or `Unknown` when nothing recognizable was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectedClass {
    ParallelLines,
    RegularPolygon,
    IrregularPolygon,
    Unknown,
}

impl DetectedClass {
    pub fn figure_class(self) -> Option<FigureClass> {
        match self {
            DetectedClass::ParallelLines => Some(FigureClass::ParallelLines),
            DetectedClass::RegularPolygon => Some(FigureClass::RegularPolygon),
            DetectedClass::IrregularPolygon => Some(FigureClass::IrregularPolygon),
            DetectedClass::Unknown => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self.figure_class() {
            Some(c) => c.as_str(),
            None => "unknown",
        }
    }
}

impl From<FigureClass> for DetectedClass {
    fn from(c: FigureClass) -> Self {
        match c {
            FigureClass::ParallelLines => DetectedClass::ParallelLines,
            FigureClass::RegularPolygon => DetectedClass::RegularPolygon,
            FigureClass::IrregularPolygon => DetectedClass::IrregularPolygon,
        }
    }
}

impl fmt::Display for DetectedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub detected_class: DetectedClass,
    pub detected_n: u32,
    pub regular: bool,
    pub dominant_rgb: Rgb,
    pub second_rgb: Rgb,
    pub free_edge_count: u32,
    pub exception: bool,
    pub notes: Vec<String>,
}

impl EvalReport {
    /// True when `rgb` lies within `tol` (L∞) of the dominant or the second
    /// dominant color.
    pub fn color_matches(&self, rgb: Rgb, tol: f64) -> bool {
        let linf = |c: Rgb| (0..3).map(|i| (c[i] as f64 - rgb[i] as f64).abs()).fold(0.0, f64::max);
        linf(self.dominant_rgb) <= tol || linf(self.second_rgb) <= tol
    }

    fn unknown(dominant_rgb: Rgb, second_rgb: Rgb) -> Self {
        EvalReport {
            detected_class: DetectedClass::Unknown,
            detected_n: 0,
            regular: false,
            dominant_rgb,
            second_rgb,
            free_edge_count: 0,
            exception: false,
            notes: Vec::new(),
        }
    }
}

/// One analysed stroke component.
#[derive(Clone, Debug)]
pub struct ComponentAnalysis {
    pub pixels: Vec<Pixel>,
    pub info: SkeletonInfo,
    pub kind: ComponentKind,
    /// Closed outer border in image coordinates.
    pub outer: Contour,
    /// Simplified stroke in image coordinates.
    pub simplified: Contour,
}

/// Figure pixels: those farther than `fg_contrast` (L∞) from the background
/// color.
pub fn foreground_mask(img: &RasterImage, background: [f64; 3], fg_contrast: f64) -> BinaryMask {
    BinaryMask::from_fn(img.width(), img.height(), |x, y| {
        let p = img.get(x, y);
        (0..3)
            .map(|i| (p[i] as f64 - background[i]).abs())
            .fold(0.0, f64::max)
            > fg_contrast
    })
}

fn shift(points: &[Pixel], by: Pixel) -> Vec<Pixel> {
    points.iter().map(|p| Pixel::new(p.x + by.x, p.y + by.y)).collect()
}

/// Topology and shape of one 8-connected stroke component.
pub fn analyze_component(pixels: &[Pixel], cfg: &EvalConfig) -> ComponentAnalysis {
    let (mut m, offset) = BinaryMask::crop(pixels);
    m.fill_small_holes(cfg.min_component_px);
    let borders = trace_contours(&m);
    let outer = borders
        .iter()
        .find(|c| c.border_type == BorderType::Outer)
        .cloned()
        .unwrap_or_else(|| Contour::closed(Vec::new()));
    let holes = borders.iter().filter(|c| c.border_type == BorderType::Hole).count() as u32;
    let skel = skeleton::prune_spurs(&skeleton::thin(&m), cfg.dp_epsilon.ceil() as usize);
    let (ends, branch_points) = skeleton::census(&skel);
    let info = SkeletonInfo {
        endpoints: ends.len() as u32,
        branch_points,
        holes,
    };
    let simplified = if ends.len() == 2 && holes == 0 {
        simplify_dp(&Contour::open(skeleton::walk_chain(&skel, ends[0])), cfg.dp_epsilon)
    } else {
        simplify_dp(&outer, cfg.dp_epsilon)
    };
    let kind = classify_component(&outer, &simplified, &info);
    ComponentAnalysis {
        pixels: pixels.to_vec(),
        info,
        kind,
        outer: Contour {
            points: shift(&outer.points, offset),
            ..outer
        },
        simplified: Contour {
            points: shift(&simplified.points, offset),
            ..simplified
        },
    }
}

/// Full pipeline on one image.
pub fn analyze_image(img: &RasterImage, cfg: &EvalConfig) -> Result<EvalReport> {
    let (w, h) = (img.width(), img.height());
    if w < MIN_IMAGE_SIDE || h < MIN_IMAGE_SIDE {
        return Err(EvalError::ImageTooSmall { width: w, height: h });
    }
    let clusters = dominant_colors_lenient(img, cfg.kmeans_k, cfg.kmeans_seed)?;
    let dominant = clusters[0].rgb();
    let second = clusters.get(1).map_or(dominant, |c| c.rgb());
    let mut report = EvalReport::unknown(dominant, second);

    let fg = foreground_mask(img, clusters[0].centroid, cfg.fg_contrast);
    let gray = blur::gaussian_blur(img, cfg.blur_sigma, cfg.blur_ksize)?;
    let edges = canny_edges(&gray, cfg.canny_low, cfg.canny_high)?;
    report.notes.push(format!("canny_edge_px={}", edges.count()));

    let comps: Vec<ComponentAnalysis> = fg
        .components()
        .into_iter()
        .filter(|c| c.len() >= cfg.min_component_px)
        .map(|c| analyze_component(&c, cfg))
        .collect();
    if comps.is_empty() {
        report.notes.push("empty".into());
        return Ok(report);
    }
    report.free_edge_count = comps.iter().map(|c| c.info.endpoints).sum();

    if comps.iter().any(|c| c.kind == ComponentKind::Exception) {
        report.exception = true;
        for (i, c) in comps.iter().enumerate() {
            if c.kind == ComponentKind::Exception {
                report.notes.push(format!(
                    "component {i}: endpoints={} branches={} holes={} vertices={}",
                    c.info.endpoints,
                    c.info.branch_points,
                    c.info.holes,
                    c.simplified.len()
                ));
            }
        }
        return Ok(report);
    }

    if comps.iter().all(|c| c.kind == ComponentKind::OpenSegment) {
        let angles: Vec<f64> = comps
            .iter()
            .map(|c| principal_angle_deg(&c.pixels).unwrap_or(0.0))
            .collect();
        let worst = angles
            .iter()
            .flat_map(|a| angles.iter().map(move |b| undirected_angle_diff(*a, *b)))
            .fold(0.0, f64::max);
        if worst > cfg.parallel_tol_deg {
            report.exception = true;
            report.notes.push(format!("strokes not parallel: spread {worst:.1} deg"));
            return Ok(report);
        }
        report.detected_class = DetectedClass::ParallelLines;
        report.detected_n = comps.len() as u32;
        return Ok(report);
    }

    if let [c] = comps.as_slice() {
        if let ComponentKind::ClosedRing(n) = c.kind {
            let pts: Vec<_> = c.outer.points.iter().copied().map(to_point).collect();
            let corners = dp_closed_indices(&pts, cfg.dp_epsilon);
            let vertices = refine_vertices(&c.outer.points, &corners, 0.75 * cfg.dp_epsilon);
            let (cv, dev) = regularity(&vertices);
            report.regular = cv <= cfg.reg_side_cv && dev <= cfg.reg_angle_tol_deg;
            report.detected_class = if report.regular {
                DetectedClass::RegularPolygon
            } else {
                DetectedClass::IrregularPolygon
            };
            report.detected_n = n;
            report.notes.push(format!("side_cv={cv:.4} angle_dev_deg={dev:.2}"));
            return Ok(report);
        }
    }

    report.exception = true;
    report.notes.push(format!("unexpected arrangement of {} components", comps.len()));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{synth_figure, GeometryParams, Palette};
    use crate::raster::{rasterize_figure, rasterize_segments, RasterConfig};

    fn render(class: FigureClass, n: u32, color: &str, seed: u64) -> RasterImage {
        let palette = Palette::default();
        let color = palette.get(color).unwrap().clone();
        let geom = synth_figure(class, n, 64, seed, &GeometryParams::for_canvas(64)).unwrap();
        rasterize_figure(&geom, &color, 64, &RasterConfig::for_canvas(64)).unwrap()
    }

    #[test]
    fn empty_image() {
        let r = analyze_image(&RasterImage::new(64, 64, [0, 0, 0]), &EvalConfig::default()).unwrap();
        assert_eq!(r.detected_class, DetectedClass::Unknown);
        assert_eq!(r.detected_n, 0);
        assert!(!r.exception);
        assert!(r.notes.iter().any(|n| n == "empty"));
    }

    #[test]
    fn too_small() {
        let e = analyze_image(&RasterImage::new(8, 8, [0, 0, 0]), &EvalConfig::default());
        assert!(matches!(e, Err(EvalError::ImageTooSmall { .. })));
    }

    #[test]
    fn green_hexagon() {
        let img = render(FigureClass::RegularPolygon, 6, "green", 3);
        let r = analyze_image(&img, &EvalConfig::default()).unwrap();
        assert_eq!(r.detected_class, DetectedClass::RegularPolygon, "{r:?}");
        assert_eq!(r.detected_n, 6);
        assert!(r.color_matches([0, 255, 0], 20.0));
    }

    #[test]
    fn five_red_lines() {
        let img = render(FigureClass::ParallelLines, 5, "red", 9);
        let r = analyze_image(&img, &EvalConfig::default()).unwrap();
        assert_eq!(r.detected_class, DetectedClass::ParallelLines, "{r:?}");
        assert_eq!(r.detected_n, 5);
        assert_eq!(r.free_edge_count, 10);
    }

    #[test]
    fn pentagram_is_exception() {
        use crate::geometry::{regular_polygon_vertices, Point, Segment};
        let v = regular_polygon_vertices(5, Point::new(32.0, 32.0), 24.0, 0.1);
        let star: Vec<Segment> = (0..5).map(|i| Segment::new(v[i], v[(i + 2) % 5])).collect();
        let img = rasterize_segments(&star, [255, 0, 0], 64, &RasterConfig::for_canvas(64)).unwrap();
        let r = analyze_image(&img, &EvalConfig::default()).unwrap();
        assert!(r.exception, "{r:?}");
        assert_eq!(r.detected_class, DetectedClass::Unknown);
    }

    #[test]
    fn open_chain_is_exception() {
        use crate::geometry::{Point, Segment};
        let p = [(10.0, 10.0), (50.0, 12.0), (52.0, 50.0), (14.0, 48.0)].map(|(x, y)| Point::new(x, y));
        let chain: Vec<Segment> = p.windows(2).map(|w| Segment::new(w[0], w[1])).collect();
        let img = rasterize_segments(&chain, [0, 0, 255], 64, &RasterConfig::for_canvas(64)).unwrap();
        let r = analyze_image(&img, &EvalConfig::default()).unwrap();
        assert!(r.exception, "{r:?}");
        assert_eq!(r.free_edge_count, 2);
    }
}
