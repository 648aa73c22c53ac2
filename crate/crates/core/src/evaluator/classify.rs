//! Per-component shape classification and polygon measurements.

use serde::{Deserialize, Serialize};

use crate::geometry::{coefficient_of_variation, interior_angles, side_lengths, Point};

use super::contours::Contour;
use super::mask::Pixel;
use super::skeleton::SkeletonInfo;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComponentKind {
    OpenSegment,
    ClosedRing(u32),
    Exception,
}

/// `outer` is the component's outer border, `simplified` the simplified
/// stroke: the open skeleton chain for stroke pieces with free ends, the
/// closed outer border for rings.
pub fn classify_component(outer: &Contour, simplified: &Contour, info: &SkeletonInfo) -> ComponentKind {
    if info.branch_points > 0 || outer.is_empty() {
        return ComponentKind::Exception;
    }
    match (info.endpoints, info.holes) {
        (2, 0) if !simplified.closed && simplified.len() == 2 => ComponentKind::OpenSegment,
        (0, 1) if simplified.closed && simplified.len() >= 3 => {
            ComponentKind::ClosedRing(simplified.len() as u32)
        }
        _ => ComponentKind::Exception,
    }
}

pub(crate) fn to_point(p: Pixel) -> Point {
    Point::new(p.x as f64, p.y as f64)
}

/// Least-squares line through `pts`: (centroid, unit direction).
pub fn fit_line(pts: &[Point]) -> Option<(Point, Point)> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let c = pts.iter().fold(Point::new(0.0, 0.0), |s, p| s.add(*p)).scale(1.0 / n);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in pts {
        let d = p.sub(c);
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    if sxx + syy <= 0.0 {
        return None;
    }
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    Some((c, Point::new(theta.cos(), theta.sin())))
}

/// Direction of the principal axis in degrees, in [0, 180).
pub fn principal_angle_deg(pts: &[Pixel]) -> Option<f64> {
    let pts: Vec<Point> = pts.iter().copied().map(to_point).collect();
    fit_line(&pts).map(|(_, d)| d.y.atan2(d.x).to_degrees().rem_euclid(180.0))
}

/// Smallest angle between two undirected directions, in degrees.
pub fn undirected_angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(180.0);
    d.min(180.0 - d)
}

fn intersect(a: (Point, Point), b: (Point, Point)) -> Option<Point> {
    let denom = a.1.cross(b.1);
    if denom.abs() < 1e-6 {
        return None;
    }
    let t = b.0.sub(a.0).cross(b.1) / denom;
    Some(a.0.add(a.1.scale(t)))
}

/// Sub-pixel polygon vertices. Each side between consecutive corner indices
/// of the closed `ring` gets a least-squares line (ignoring points within
/// `trim` of a corner) and adjacent lines are intersected. The fit is then
/// repeated with the ring points reassigned to the nearest refined side.
/// Corners whose neighbouring fits are missing or nearly parallel keep their
/// pixel position.
pub fn refine_vertices(ring: &[Pixel], corners: &[usize], trim: f64) -> Vec<Point> {
    let m = corners.len();
    let n = ring.len();
    let pts: Vec<Point> = ring.iter().copied().map(to_point).collect();
    let pixel_corners: Vec<Point> = corners.iter().map(|&i| pts[i]).collect();
    let lines: Vec<Option<(Point, Point)>> = (0..m)
        .map(|i| {
            let (a, b) = (corners[i], corners[(i + 1) % m]);
            let len = (b + n - a) % n;
            let span: Vec<Point> = (0..=len).map(|k| pts[(a + k) % n]).collect();
            let inner: Vec<Point> = span
                .iter()
                .copied()
                .filter(|p| p.dist(pts[a]) > trim && p.dist(pts[b]) > trim)
                .collect();
            if inner.len() >= 2 {
                fit_line(&inner)
            } else {
                fit_line(&span)
            }
        })
        .collect();
    let mut verts = intersect_all(&lines, &pixel_corners, trim);
    for _ in 0..3 {
        let lines: Vec<Option<(Point, Point)>> = (0..m)
            .map(|i| {
                let (a, b) = (verts[i], verts[(i + 1) % m]);
                let d = b.sub(a);
                let len = d.norm();
                if len <= 2.0 * trim {
                    return None;
                }
                let u = d.scale(1.0 / len);
                let side: Vec<Point> = pts
                    .iter()
                    .copied()
                    .filter(|p| {
                        let t = p.sub(a).dot(u);
                        t > trim && t < len - trim && p.sub(a).cross(u).abs() <= 1.5
                    })
                    .collect();
                fit_line(&side)
            })
            .collect();
        verts = intersect_all(&lines, &pixel_corners, trim);
    }
    verts
}

fn intersect_all(lines: &[Option<(Point, Point)>], fallback: &[Point], trim: f64) -> Vec<Point> {
    let m = lines.len();
    (0..m)
        .map(|i| {
            let corner = fallback[i];
            match (lines[(i + m - 1) % m], lines[i]) {
                (Some(a), Some(b)) => match intersect(a, b) {
                    Some(p) if p.dist(corner) <= 4.0 * trim.max(1.0) => p,
                    _ => corner,
                },
                _ => corner,
            }
        })
        .collect()
}

/// Side-length coefficient of variation and the largest deviation (degrees)
/// of any interior angle from the regular interior angle.
pub fn regularity(vertices: &[Point]) -> (f64, f64) {
    let n = vertices.len();
    if n < 3 {
        return (f64::INFINITY, f64::INFINITY);
    }
    let cv = coefficient_of_variation(&side_lengths(vertices));
    let regular = 180.0 * (n as f64 - 2.0) / n as f64;
    let dev = interior_angles(vertices)
        .into_iter()
        .map(|a| (a.to_degrees() - regular).abs())
        .fold(0.0, f64::max);
    (cv, dev)
}
