//! Continuous-coordinate figure synthesis for the three figure classes.
//!
//! Geometry lives in canvas units (pixel centres at integer coordinates) and is
//! only quantized by the rasterizer. Every `synth_*` function is a pure function
//! of its arguments and seed.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("infeasible canvas: {0}")]
    InfeasibleCanvas(String),
    #[error("rejection budget of {attempts} attempts exceeded")]
    RejectionBudgetExceeded { attempts: u32 },
    #[error("figure needs at least 3 elements, got {0}")]
    TooFewElements(u32),
    #[error("geometry has {found} elements but spec asks for {expected}")]
    ArityMismatch { expected: u32, found: usize },
    #[error("geometry kind does not match figure class {0}")]
    ClassMismatch(FigureClass),
    #[error("unknown figure class '{0}'")]
    UnknownClass(String),
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn sub(self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }

    pub fn add(self, other: Point) -> Point {
        Point::new(self.x + other.x, self.y + other.y)
    }

    pub fn scale(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        self.sub(other).norm()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: Point,
    pub end: Point,
}

impl Segment {
    pub const fn new(start: Point, end: Point) -> Self {
        Segment { start, end }
    }

    pub fn length(&self) -> f64 {
        self.start.dist(self.end)
    }

    /// Unit direction from `start` to `end`; zero for a degenerate segment.
    pub fn direction(&self) -> Point {
        let d = self.end.sub(self.start);
        let len = d.norm();
        if len == 0.0 {
            Point::new(0.0, 0.0)
        } else {
            d.scale(1.0 / len)
        }
    }
}

/// The three figure classes of the dataset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureClass {
    ParallelLines,
    RegularPolygon,
    IrregularPolygon,
}

impl FigureClass {
    pub const ALL: [FigureClass; 3] = [
        FigureClass::ParallelLines,
        FigureClass::RegularPolygon,
        FigureClass::IrregularPolygon,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureClass::ParallelLines => "parallel_lines",
            FigureClass::RegularPolygon => "regular_polygon",
            FigureClass::IrregularPolygon => "irregular_polygon",
        }
    }

    /// Accepts the canonical snake_case names and the short forms
    /// `lines`, `regular` and `irregular`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "parallel_lines" | "lines" | "parallel" => Ok(FigureClass::ParallelLines),
            "regular_polygon" | "regular" => Ok(FigureClass::RegularPolygon),
            "irregular_polygon" | "irregular" => Ok(FigureClass::IrregularPolygon),
            _ => Err(GeometryError::UnknownClass(s.to_string())),
        }
    }

    pub fn is_polygon(self) -> bool {
        !matches!(self, FigureClass::ParallelLines)
    }
}

impl fmt::Display for FigureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FigureClass {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self> {
        FigureClass::parse(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaletteColor {
    pub name: String,
    pub rgb: [u8; 3],
}

impl PaletteColor {
    pub fn new(name: impl Into<String>, rgb: [u8; 3]) -> Self {
        PaletteColor {
            name: name.into(),
            rgb,
        }
    }
}

/// Named figure colors. Names are unique.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Palette(Vec<PaletteColor>);

impl Palette {
    pub fn new(colors: Vec<PaletteColor>) -> std::result::Result<Self, String> {
        for (i, c) in colors.iter().enumerate() {
            if c.name.trim().is_empty() {
                return Err("palette color with empty name".into());
            }
            if colors[..i].iter().any(|o| o.name == c.name) {
                return Err(format!("duplicate palette color '{}'", c.name));
            }
        }
        if colors.is_empty() {
            return Err("palette is empty".into());
        }
        Ok(Palette(colors))
    }

    pub fn get(&self, name: &str) -> Option<&PaletteColor> {
        self.0.iter().find(|c| c.name == name)
    }

    pub fn colors(&self) -> &[PaletteColor] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for Palette {
    /// Four saturated colors, pairwise far apart and far from black.
    fn default() -> Self {
        Palette(vec![
            PaletteColor::new("red", [255, 0, 0]),
            PaletteColor::new("green", [0, 255, 0]),
            PaletteColor::new("blue", [0, 0, 255]),
            PaletteColor::new("yellow", [255, 255, 0]),
        ])
    }
}

/// Symbolic description of one figure.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FigureSpec {
    pub class: FigureClass,
    pub n: u32,
    pub color: String,
    pub canvas: u32,
}

impl FigureSpec {
    pub fn new(class: FigureClass, n: u32, color: impl Into<String>, canvas: u32) -> Self {
        FigureSpec {
            class,
            n,
            color: color.into(),
            canvas,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum FigureGeometry {
    /// Disjoint straight segments.
    Lines(Vec<Segment>),
    /// Closed ring of vertices; the last vertex connects back to the first.
    Polygon(Vec<Point>),
}

impl FigureGeometry {
    pub fn arity(&self) -> usize {
        match self {
            FigureGeometry::Lines(s) => s.len(),
            FigureGeometry::Polygon(v) => v.len(),
        }
    }

    /// All straight edges of the figure, closing edge included for polygons.
    pub fn edges(&self) -> Vec<Segment> {
        match self {
            FigureGeometry::Lines(s) => s.clone(),
            FigureGeometry::Polygon(v) => polygon_edges(v),
        }
    }

    pub fn points(&self) -> Vec<Point> {
        match self {
            FigureGeometry::Lines(s) => s.iter().flat_map(|s| [s.start, s.end]).collect(),
            FigureGeometry::Polygon(v) => v.clone(),
        }
    }

    pub fn translate(&self, dx: f64, dy: f64) -> FigureGeometry {
        let d = Point::new(dx, dy);
        match self {
            FigureGeometry::Lines(s) => FigureGeometry::Lines(
                s.iter()
                    .map(|s| Segment::new(s.start.add(d), s.end.add(d)))
                    .collect(),
            ),
            FigureGeometry::Polygon(v) => {
                FigureGeometry::Polygon(v.iter().map(|p| p.add(d)).collect())
            }
        }
    }
}

/// Synthesis and validation knobs. Lengths are in canvas pixels;
/// [`GeometryParams::for_canvas`] scales the 64-pixel defaults linearly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeometryParams {
    pub margin: f64,
    /// Minimum clear distance between neighbouring parallel lines.
    pub gap_min: f64,
    pub stroke_width: f64,
    pub min_line_length: f64,
    /// Random common direction for parallel lines and random phase for
    /// polygons; when off lines are horizontal and polygons start at angle 0.
    pub random_rotation: bool,
    pub radius_min: f64,
    /// Lower bound of irregular vertex radii as a fraction of the maximum.
    pub radius_jitter: f64,
    pub irregular_cv_min: f64,
    /// An irregular polygon is rejected when every interior angle lies within
    /// this band of the regular interior angle.
    pub regular_angle_band_deg: f64,
    pub min_interior_angle_deg: f64,
    pub min_side: f64,
    /// Distance from every vertex to the chord joining its neighbours.
    pub min_vertex_offset: f64,
    /// Distance between every vertex and each edge not incident to it.
    pub min_clearance: f64,
    pub max_attempts: u32,
}

impl GeometryParams {
    pub fn for_canvas(canvas: u32) -> Self {
        let s = canvas as f64 / 64.0;
        GeometryParams {
            margin: 4.0 * s,
            gap_min: 4.0 * s,
            stroke_width: (canvas as f64 / 64.0).round().max(1.0),
            min_line_length: 16.0 * s,
            random_rotation: true,
            radius_min: 20.0 * s,
            radius_jitter: 0.4,
            irregular_cv_min: 0.1,
            regular_angle_band_deg: 5.0,
            min_interior_angle_deg: 40.0,
            min_side: 7.0 * s,
            min_vertex_offset: 4.0 * s,
            min_clearance: 4.0 * s,
            max_attempts: 1000,
        }
    }
}

impl Default for GeometryParams {
    fn default() -> Self {
        GeometryParams::for_canvas(64)
    }
}

/// A failed geometric invariant.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    OutsideCanvas { index: usize },
    NotParallel { a: usize, b: usize },
    SegmentsIntersect { a: usize, b: usize },
    GapTooSmall { a: usize, b: usize, distance: f64 },
    UnequalLengths,
    SegmentTooShort { index: usize },
    SideLengthVariance { ratio: f64 },
    RadiusVariance,
    SelfIntersection { a: usize, b: usize },
    TooRegularSides { cv: f64 },
    TooRegularAngles,
    SideTooShort { index: usize },
    FlatVertex { index: usize },
    SharpVertex { index: usize },
    EdgesTooClose { vertex: usize, edge: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutsideCanvas { index } => write!(f, "point {index} outside canvas margin"),
            Violation::NotParallel { a, b } => write!(f, "segments {a} and {b} not parallel"),
            Violation::SegmentsIntersect { a, b } => write!(f, "segments intersect ({a}, {b})"),
            Violation::GapTooSmall { a, b, distance } => {
                write!(f, "gap between segments {a} and {b} is {distance:.3}")
            }
            Violation::UnequalLengths => f.write_str("unequal segment lengths"),
            Violation::SegmentTooShort { index } => write!(f, "segment {index} too short"),
            Violation::SideLengthVariance { ratio } => {
                write!(f, "side-length variance (max/min = {ratio:.12})")
            }
            Violation::RadiusVariance => f.write_str("vertex radius variance"),
            Violation::SelfIntersection { a, b } => write!(f, "self-intersection of edges {a} and {b}"),
            Violation::TooRegularSides { cv } => write!(f, "side-length CV {cv:.4} below threshold"),
            Violation::TooRegularAngles => f.write_str("all angles near regular"),
            Violation::SideTooShort { index } => write!(f, "side {index} too short"),
            Violation::FlatVertex { index } => write!(f, "vertex {index} nearly flat"),
            Violation::SharpVertex { index } => write!(f, "vertex {index} too sharp"),
            Violation::EdgesTooClose { vertex, edge } => {
                write!(f, "vertex {vertex} too close to edge {edge}")
            }
        }
    }
}

const PARALLEL_TOL: f64 = 1e-9;
const REGULAR_REL_TOL: f64 = 1e-9;

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_count(n: u32) -> Result<()> {
    if n < 3 {
        Err(GeometryError::TooFewElements(n))
    } else {
        Ok(())
    }
}

/// `n` equal-length, pairwise-parallel, pairwise-disjoint segments.
pub fn synth_parallel_lines(
    n: u32,
    canvas: u32,
    seed: u64,
    params: &GeometryParams,
) -> Result<FigureGeometry> {
    check_count(n)?;
    let usable = canvas as f64 - 2.0 * params.margin;
    let pitch_min = params.gap_min + params.stroke_width;
    if n as f64 * pitch_min > usable {
        return Err(GeometryError::InfeasibleCanvas(format!(
            "{n} lines at pitch {pitch_min} need {} px, canvas offers {usable}",
            n as f64 * pitch_min
        )));
    }
    if params.min_line_length > usable {
        return Err(GeometryError::InfeasibleCanvas(format!(
            "minimum line length {} exceeds usable extent {usable}",
            params.min_line_length
        )));
    }
    let mut rng = rng_for(seed);
    let pitch_cap = (usable / n as f64).min(2.0 * pitch_min).max(pitch_min);

    for _ in 0..64 {
        let theta = if params.random_rotation {
            rng.gen_range(0.0..PI)
        } else {
            0.0
        };
        let pitch = if pitch_cap > pitch_min {
            rng.gen_range(pitch_min..=pitch_cap)
        } else {
            pitch_min
        };
        let width = (n - 1) as f64 * pitch;
        let (c, s) = (theta.cos().abs(), theta.sin().abs());
        let mut max_len = usable;
        if c > 1e-12 {
            max_len = max_len.min((usable - width * s) / c);
        }
        if s > 1e-12 {
            max_len = max_len.min((usable - width * c) / s);
        }
        if max_len < params.min_line_length {
            continue;
        }
        let len = if max_len > params.min_line_length {
            rng.gen_range(params.min_line_length..=max_len)
        } else {
            max_len
        };
        return Ok(place_lines(n, canvas, theta, pitch, len, params, &mut rng));
    }
    // Horizontal lines at minimum pitch always fit once the feasibility test passed.
    Ok(place_lines(
        n,
        canvas,
        0.0,
        pitch_min,
        params.min_line_length,
        params,
        &mut rng,
    ))
}

fn place_lines(
    n: u32,
    canvas: u32,
    theta: f64,
    pitch: f64,
    len: f64,
    params: &GeometryParams,
    rng: &mut ChaCha8Rng,
) -> FigureGeometry {
    let dir = Point::new(theta.cos(), theta.sin());
    let normal = Point::new(-theta.sin(), theta.cos());
    let width = (n - 1) as f64 * pitch;
    let half_w = 0.5 * (len * dir.x.abs() + width * normal.x.abs());
    let half_h = 0.5 * (len * dir.y.abs() + width * normal.y.abs());
    let lo = params.margin;
    let hi = canvas as f64 - params.margin;
    let cx = pick(rng, lo + half_w, hi - half_w);
    let cy = pick(rng, lo + half_h, hi - half_h);
    let center = Point::new(cx, cy);
    let segments = (0..n)
        .map(|k| {
            let offset = (k as f64 - (n - 1) as f64 / 2.0) * pitch;
            let mid = center.add(normal.scale(offset));
            Segment::new(mid.sub(dir.scale(len / 2.0)), mid.add(dir.scale(len / 2.0)))
        })
        .collect();
    FigureGeometry::Lines(segments)
}

fn pick(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.gen_range(lo..=hi)
    } else {
        0.5 * (lo + hi)
    }
}

/// Vertices `center + r·(cos, sin)(theta0 + 2πk/n)`.
pub fn regular_polygon_vertices(n: u32, center: Point, radius: f64, theta0: f64) -> Vec<Point> {
    (0..n)
        .map(|k| {
            let a = theta0 + 2.0 * PI * k as f64 / n as f64;
            Point::new(center.x + radius * a.cos(), center.y + radius * a.sin())
        })
        .collect()
}

pub fn synth_regular_polygon(
    n: u32,
    canvas: u32,
    seed: u64,
    params: &GeometryParams,
) -> Result<FigureGeometry> {
    check_count(n)?;
    let r_max = canvas as f64 / 2.0 - params.margin;
    if params.radius_min > r_max {
        return Err(GeometryError::InfeasibleCanvas(format!(
            "minimum radius {} exceeds available radius {r_max}",
            params.radius_min
        )));
    }
    let mut rng = rng_for(seed);
    let radius = pick(&mut rng, params.radius_min, r_max);
    let theta0 = if params.random_rotation {
        rng.gen_range(0.0..2.0 * PI / n as f64)
    } else {
        0.0
    };
    let lo = params.margin + radius;
    let hi = canvas as f64 - params.margin - radius;
    let center = Point::new(pick(&mut rng, lo, hi), pick(&mut rng, lo, hi));
    Ok(FigureGeometry::Polygon(regular_polygon_vertices(
        n, center, radius, theta0,
    )))
}

/// Rejection-sampled simple polygon with deliberately uneven sides: jittered
/// angles about a centre with jittered radii, regenerated until every
/// irregular-polygon invariant holds.
pub fn synth_irregular_polygon(
    n: u32,
    canvas: u32,
    seed: u64,
    params: &GeometryParams,
) -> Result<FigureGeometry> {
    check_count(n)?;
    let r_max = canvas as f64 / 2.0 - params.margin;
    if r_max <= params.min_side {
        return Err(GeometryError::InfeasibleCanvas(format!(
            "available radius {r_max} too small"
        )));
    }
    let mut rng = rng_for(seed);
    let step = 2.0 * PI / n as f64;
    let spec = FigureSpec::new(FigureClass::IrregularPolygon, n, "", canvas);
    for _ in 0..params.max_attempts {
        let theta0 = rng.gen_range(0.0..2.0 * PI);
        let verts: Vec<Point> = (0..n)
            .map(|k| {
                let a = theta0 + step * (k as f64 + rng.gen_range(-0.35..0.35));
                let r = r_max * rng.gen_range(params.radius_jitter..=1.0);
                Point::new(r * a.cos(), r * a.sin())
            })
            .collect();
        let (min_x, max_x, min_y, max_y) = bbox(&verts);
        let lo = params.margin;
        let hi = canvas as f64 - params.margin;
        let dx = pick(&mut rng, lo - min_x, hi - max_x);
        let dy = pick(&mut rng, lo - min_y, hi - max_y);
        let geom = FigureGeometry::Polygon(verts).translate(dx, dy);
        if irregular_violations(&spec, &geom, params).is_empty() {
            return Ok(geom);
        }
    }
    Err(GeometryError::RejectionBudgetExceeded {
        attempts: params.max_attempts,
    })
}

/// Dispatches to the class-specific synthesizer.
pub fn synth_figure(
    class: FigureClass,
    n: u32,
    canvas: u32,
    seed: u64,
    params: &GeometryParams,
) -> Result<FigureGeometry> {
    match class {
        FigureClass::ParallelLines => synth_parallel_lines(n, canvas, seed, params),
        FigureClass::RegularPolygon => synth_regular_polygon(n, canvas, seed, params),
        FigureClass::IrregularPolygon => synth_irregular_polygon(n, canvas, seed, params),
    }
}

fn bbox(points: &[Point]) -> (f64, f64, f64, f64) {
    points.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), p| (a.min(p.x), b.max(p.x), c.min(p.y), d.max(p.y)),
    )
}

/// Checks every invariant of `spec.class` against `geom`. An empty list means
/// the geometry is valid.
pub fn validate_geometry(
    spec: &FigureSpec,
    geom: &FigureGeometry,
    params: &GeometryParams,
) -> Result<Vec<Violation>> {
    if geom.arity() != spec.n as usize {
        return Err(GeometryError::ArityMismatch {
            expected: spec.n,
            found: geom.arity(),
        });
    }
    match (spec.class, geom) {
        (FigureClass::ParallelLines, FigureGeometry::Lines(segs)) => {
            Ok(line_violations(spec.canvas, segs, params))
        }
        (FigureClass::RegularPolygon, FigureGeometry::Polygon(v)) => {
            let mut out = canvas_violations(spec.canvas, v, params);
            out.extend(regular_violations(v));
            Ok(out)
        }
        (FigureClass::IrregularPolygon, FigureGeometry::Polygon(_)) => {
            Ok(irregular_violations(spec, geom, params))
        }
        (class, _) => Err(GeometryError::ClassMismatch(class)),
    }
}

fn canvas_violations(canvas: u32, points: &[Point], params: &GeometryParams) -> Vec<Violation> {
    let lo = params.margin - 1e-9;
    let hi = canvas as f64 - params.margin + 1e-9;
    points
        .iter()
        .enumerate()
        .filter(|(_, p)| p.x < lo || p.x > hi || p.y < lo || p.y > hi)
        .map(|(index, _)| Violation::OutsideCanvas { index })
        .collect()
}

fn line_violations(canvas: u32, segs: &[Segment], params: &GeometryParams) -> Vec<Violation> {
    let points: Vec<Point> = segs.iter().flat_map(|s| [s.start, s.end]).collect();
    let mut out: Vec<Violation> = canvas_violations(canvas, &points, params)
        .into_iter()
        .map(|v| match v {
            Violation::OutsideCanvas { index } => Violation::OutsideCanvas { index: index / 2 },
            other => other,
        })
        .collect();
    out.dedup();
    for (i, s) in segs.iter().enumerate() {
        if s.length() < params.min_line_length - 1e-9 {
            out.push(Violation::SegmentTooShort { index: i });
        }
    }
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            if segments_intersect(&segs[i], &segs[j]) {
                out.push(Violation::SegmentsIntersect { a: i, b: j });
                continue;
            }
            if segs[i].direction().cross(segs[j].direction()).abs() > PARALLEL_TOL {
                out.push(Violation::NotParallel { a: i, b: j });
            }
            let d = segment_distance(&segs[i], &segs[j]);
            if d < params.gap_min - 1e-9 {
                out.push(Violation::GapTooSmall {
                    a: i,
                    b: j,
                    distance: d,
                });
            }
        }
    }
    if let Some(first) = segs.first() {
        let l0 = first.length();
        if segs
            .iter()
            .any(|s| (s.length() - l0).abs() > REGULAR_REL_TOL * l0.max(1.0))
        {
            out.push(Violation::UnequalLengths);
        }
    }
    out
}

fn regular_violations(v: &[Point]) -> Vec<Violation> {
    let mut out = Vec::new();
    let sides = side_lengths(v);
    let (lo, hi) = min_max(&sides);
    if lo <= 0.0 || hi / lo - 1.0 > REGULAR_REL_TOL {
        out.push(Violation::SideLengthVariance { ratio: hi / lo });
    }
    let c = centroid(v);
    let radii: Vec<f64> = v.iter().map(|p| p.dist(c)).collect();
    let (rlo, rhi) = min_max(&radii);
    if rlo <= 0.0 || rhi / rlo - 1.0 > REGULAR_REL_TOL {
        out.push(Violation::RadiusVariance);
    }
    out
}

/// Irregular-polygon invariants: inside the margin, simple, no degenerate
/// vertices, and measurably irregular.
pub fn irregular_violations(
    spec: &FigureSpec,
    geom: &FigureGeometry,
    params: &GeometryParams,
) -> Vec<Violation> {
    let FigureGeometry::Polygon(v) = geom else {
        return vec![Violation::TooRegularAngles];
    };
    let mut out = canvas_violations(spec.canvas, v, params);
    let n = v.len();
    let edges = polygon_edges(v);
    for i in 0..n {
        for j in i + 1..n {
            if are_adjacent(i, j, n) {
                continue;
            }
            if segments_intersect(&edges[i], &edges[j]) {
                out.push(Violation::SelfIntersection { a: i, b: j });
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    let sides = side_lengths(v);
    for (i, s) in sides.iter().enumerate() {
        if *s < params.min_side {
            out.push(Violation::SideTooShort { index: i });
        }
    }
    let angles = interior_angles(v);
    let min_a = params.min_interior_angle_deg.to_radians();
    for (i, a) in angles.iter().enumerate() {
        if *a < min_a || *a > 2.0 * PI - min_a {
            out.push(Violation::SharpVertex { index: i });
        }
        let prev = v[(i + n - 1) % n];
        let next = v[(i + 1) % n];
        if point_segment_distance(v[i], &Segment::new(prev, next)) < params.min_vertex_offset {
            out.push(Violation::FlatVertex { index: i });
        }
    }
    for (k, p) in v.iter().enumerate() {
        for (e, edge) in edges.iter().enumerate() {
            // edge e joins vertex e and e+1
            if e == k || (e + 1) % n == k {
                continue;
            }
            if point_segment_distance(*p, edge) < params.min_clearance {
                out.push(Violation::EdgesTooClose { vertex: k, edge: e });
            }
        }
    }
    let cv = coefficient_of_variation(&sides);
    if cv < params.irregular_cv_min {
        out.push(Violation::TooRegularSides { cv });
    }
    let regular = PI * (n as f64 - 2.0) / n as f64;
    let band = params.regular_angle_band_deg.to_radians();
    if angles.iter().all(|a| (a - regular).abs() <= band) {
        out.push(Violation::TooRegularAngles);
    }
    out
}

fn are_adjacent(i: usize, j: usize, n: usize) -> bool {
    (i + 1) % n == j || (j + 1) % n == i
}

fn min_max(xs: &[f64]) -> (f64, f64) {
    xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    })
}

pub fn polygon_edges(v: &[Point]) -> Vec<Segment> {
    (0..v.len())
        .map(|i| Segment::new(v[i], v[(i + 1) % v.len()]))
        .collect()
}

pub fn side_lengths(v: &[Point]) -> Vec<f64> {
    polygon_edges(v).iter().map(Segment::length).collect()
}

/// Vertex average.
pub fn centroid(v: &[Point]) -> Point {
    let n = v.len().max(1) as f64;
    let s = v.iter().fold(Point::new(0.0, 0.0), |acc, p| acc.add(*p));
    s.scale(1.0 / n)
}

/// Shoelace signed area; positive for counter-clockwise rings in a y-up frame.
pub fn signed_area(v: &[Point]) -> f64 {
    polygon_edges(v)
        .iter()
        .map(|e| e.start.cross(e.end))
        .sum::<f64>()
        / 2.0
}

/// Interior angles in radians, in `(0, 2π)`, for a simple ring of either
/// orientation.
pub fn interior_angles(v: &[Point]) -> Vec<f64> {
    let n = v.len();
    let orient = signed_area(v).signum();
    (0..n)
        .map(|i| {
            let prev = v[(i + n - 1) % n];
            let next = v[(i + 1) % n];
            let a = prev.sub(v[i]);
            let b = next.sub(v[i]);
            let ang = a.cross(b).atan2(a.dot(b)); // signed angle from a to b
            let ccw = if ang < 0.0 { ang + 2.0 * PI } else { ang };
            if orient >= 0.0 {
                2.0 * PI - ccw
            } else {
                ccw
            }
        })
        .collect()
}

/// Population standard deviation over mean.
pub fn coefficient_of_variation(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return 0.0;
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean
}

fn orientation(a: Point, b: Point, c: Point) -> f64 {
    b.sub(a).cross(c.sub(a))
}

fn on_segment(p: Point, s: &Segment) -> bool {
    p.x >= s.start.x.min(s.end.x) - 1e-12
        && p.x <= s.start.x.max(s.end.x) + 1e-12
        && p.y >= s.start.y.min(s.end.y) - 1e-12
        && p.y <= s.start.y.max(s.end.y) + 1e-12
}

/// Closed-segment intersection test, touching and collinear overlap included.
pub fn segments_intersect(a: &Segment, b: &Segment) -> bool {
    let d1 = orientation(b.start, b.end, a.start);
    let d2 = orientation(b.start, b.end, a.end);
    let d3 = orientation(a.start, a.end, b.start);
    let d4 = orientation(a.start, a.end, b.end);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(a.start, b))
        || (d2 == 0.0 && on_segment(a.end, b))
        || (d3 == 0.0 && on_segment(b.start, a))
        || (d4 == 0.0 && on_segment(b.end, a))
}

pub fn point_segment_distance(p: Point, s: &Segment) -> f64 {
    let d = s.end.sub(s.start);
    let len2 = d.dot(d);
    if len2 == 0.0 {
        return p.dist(s.start);
    }
    let t = (p.sub(s.start).dot(d) / len2).clamp(0.0, 1.0);
    p.dist(s.start.add(d.scale(t)))
}

pub fn segment_distance(a: &Segment, b: &Segment) -> f64 {
    if segments_intersect(a, b) {
        return 0.0;
    }
    point_segment_distance(a.start, b)
        .min(point_segment_distance(a.end, b))
        .min(point_segment_distance(b.start, a))
        .min(point_segment_distance(b.end, a))
}
