//! Douglas–Peucker polyline simplification for open chains and closed rings.

use crate::geometry::{point_segment_distance, Point, Segment};

use super::contours::Contour;
use super::mask::Pixel;

fn to_point(p: Pixel) -> Point {
    Point::new(p.x as f64, p.y as f64)
}

/// Kept indices of an open chain; both endpoints are always kept and every
/// dropped point is within `epsilon` of the kept polyline.
pub fn dp_indices(points: &[Point], epsilon: f64) -> Vec<usize> {
    let n = points.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut keep = vec![false; n];
    keep[0] = true;
    keep[n - 1] = true;
    let mut stack = vec![(0usize, n - 1)];
    while let Some((a, b)) = stack.pop() {
        if b <= a + 1 {
            continue;
        }
        let seg = Segment::new(points[a], points[b]);
        let (mut best, mut dmax) = (a, -1.0);
        for (i, p) in points.iter().enumerate().take(b).skip(a + 1) {
            let d = point_segment_distance(*p, &seg);
            if d > dmax {
                dmax = d;
                best = i;
            }
        }
        if dmax > epsilon {
            keep[best] = true;
            stack.push((a, best));
            stack.push((best, b));
        }
    }
    (0..n).filter(|&i| keep[i]).collect()
}

/// Kept indices of a closed ring, independent of where the ring starts and of
/// its direction (up to exact ties). The ring is split at the point farthest
/// from the centroid and the point farthest from that; each half is simplified
/// and then vertices are dropped while every original point they cover stays
/// within `epsilon` of the shortcut.
pub fn dp_closed_indices(points: &[Point], epsilon: f64) -> Vec<usize> {
    let n = points.len();
    if n <= 3 {
        return (0..n).collect();
    }
    let c = points
        .iter()
        .fold(Point::new(0.0, 0.0), |s, p| s.add(*p))
        .scale(1.0 / n as f64);
    let farthest_from = |q: Point| -> usize {
        let mut best = 0;
        for i in 1..n {
            let (di, db) = (points[i].dist(q), points[best].dist(q));
            let tie_break = (points[i].y, points[i].x) < (points[best].y, points[best].x);
            if di > db + 1e-12 || ((di - db).abs() <= 1e-12 && tie_break) {
                best = i;
            }
        }
        best
    };
    let a = farthest_from(c);
    let b = farthest_from(points[a]);
    if a == b {
        return vec![a];
    }
    let cyc = |from: usize, to: usize| -> Vec<usize> {
        let len = (to + n - from) % n;
        (0..=len).map(|k| (from + k) % n).collect()
    };
    let mut verts = Vec::new();
    for (from, to) in [(a, b), (b, a)] {
        let idx = cyc(from, to);
        let chain: Vec<Point> = idx.iter().map(|&i| points[i]).collect();
        let kept = dp_indices(&chain, epsilon);
        verts.extend(kept[..kept.len() - 1].iter().map(|&k| idx[k]));
    }

    // drop vertices whose whole span is within epsilon of the shortcut, or
    // replace two neighbours by the one point that covers both their spans
    let span_dev = |from: usize, via: usize, to: usize| -> f64 {
        let mut dev: f64 = 0.0;
        for (a, b) in [(from, via), (via, to)] {
            let seg = Segment::new(points[a], points[b]);
            for k in cyc(a, b) {
                dev = dev.max(point_segment_distance(points[k], &seg));
            }
        }
        dev
    };
    loop {
        let m = verts.len();
        if m <= 3 {
            break;
        }
        let mut best: Option<(usize, f64)> = None;
        for i in 0..m {
            let prev = verts[(i + m - 1) % m];
            let next = verts[(i + 1) % m];
            let seg = Segment::new(points[prev], points[next]);
            let dev = cyc(prev, next)
                .into_iter()
                .map(|k| point_segment_distance(points[k], &seg))
                .fold(0.0, f64::max);
            if dev <= epsilon && best.is_none_or(|(_, d)| dev < d) {
                best = Some((i, dev));
            }
        }
        if let Some((i, _)) = best {
            verts.remove(i);
            continue;
        }
        let mut merge: Option<(usize, usize, f64)> = None;
        for i in 0..m {
            let prev = verts[(i + m - 1) % m];
            let next = verts[(i + 2) % m];
            let seg = Segment::new(points[prev], points[next]);
            let span = cyc(prev, next);
            let via = span[1..span.len() - 1]
                .iter()
                .copied()
                .max_by(|&a, &b| {
                    point_segment_distance(points[a], &seg)
                        .partial_cmp(&point_segment_distance(points[b], &seg))
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then(b.cmp(&a))
                });
            let Some(via) = via else { continue };
            let dev = span_dev(prev, via, next);
            if dev <= epsilon && merge.is_none_or(|(_, _, d)| dev < d) {
                merge = Some((i, via, dev));
            }
        }
        match merge {
            Some((i, via, _)) => {
                verts[i] = via;
                verts.remove((i + 1) % m);
                verts.sort_unstable_by_key(|&v| (v + n - a) % n);
            }
            None => break,
        }
    }
    verts.sort_unstable();
    verts
}

/// Douglas–Peucker on a contour. Open chains keep both endpoints. Closed
/// chains repeat [`dp_closed_indices`] on its own output until nothing more
/// is dropped, so the result is a fixed point; if that drifts beyond
/// `epsilon` from the input the input is returned unchanged. Either way a
/// second call returns its argument. `epsilon == 0` returns the input.
pub fn simplify_dp(contour: &Contour, epsilon: f64) -> Contour {
    if epsilon <= 0.0 || contour.points.len() <= 2 {
        return contour.clone();
    }
    let pts: Vec<Point> = contour.points.iter().copied().map(to_point).collect();
    let idx = if contour.closed {
        let mut idx = dp_closed_indices(&pts, epsilon);
        loop {
            let sub: Vec<Point> = idx.iter().map(|&i| pts[i]).collect();
            let next = dp_closed_indices(&sub, epsilon);
            if next.len() == idx.len() {
                break;
            }
            idx = next.into_iter().map(|k| idx[k]).collect();
        }
        let kept: Vec<Pixel> = idx.iter().map(|&i| contour.points[i]).collect();
        if max_deviation(&contour.points, &kept, true) > epsilon {
            return contour.clone();
        }
        idx
    } else {
        dp_indices(&pts, epsilon)
    };
    Contour {
        points: idx.into_iter().map(|i| contour.points[i]).collect(),
        ..contour.clone()
    }
}

/// Largest distance from any input point to the simplified chain (ring when
/// `closed`). Used by tests and diagnostics.
pub fn max_deviation(original: &[Pixel], simplified: &[Pixel], closed: bool) -> f64 {
    let s: Vec<Point> = simplified.iter().copied().map(to_point).collect();
    let mut segs: Vec<Segment> = s.windows(2).map(|w| Segment::new(w[0], w[1])).collect();
    if closed && s.len() > 1 {
        segs.push(Segment::new(s[s.len() - 1], s[0]));
    }
    if segs.is_empty() {
        return original
            .iter()
            .map(|p| s.first().map_or(0.0, |q| to_point(*p).dist(*q)))
            .fold(0.0, f64::max);
    }
    original
        .iter()
        .map(|p| {
            segs.iter()
                .map(|seg| point_segment_distance(to_point(*p), seg))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::contours::trace_contours;
    use crate::evaluator::mask::BinaryMask;

    fn px(v: &[(i32, i32)]) -> Vec<Pixel> {
        v.iter().map(|&(x, y)| Pixel::new(x, y)).collect()
    }

    #[test]
    fn collinear_to_endpoints() {
        let c = Contour::open(px(&[(0, 0), (1, 0), (2, 0)]));
        assert_eq!(simplify_dp(&c, 0.1).points, px(&[(0, 0), (2, 0)]));
    }

    #[test]
    fn zero_epsilon_is_identity() {
        let c = Contour::open(px(&[(0, 0), (1, 0), (2, 0), (3, 1)]));
        assert_eq!(simplify_dp(&c, 0.0), c);
    }

    #[test]
    fn traced_square_ring_has_four_vertices() {
        let m = BinaryMask::from_fn(40, 40, |x, y| {
            ((x == 5 || x == 30) && (5..=30).contains(&y)) || ((y == 5 || y == 30) && (5..=30).contains(&x))
        });
        let outer = trace_contours(&m).into_iter().next().unwrap();
        let s = simplify_dp(&outer, 1.5);
        assert_eq!(s.points.len(), 4);
        assert!(max_deviation(&outer.points, &s.points, true) <= 1.5);
    }

    #[test]
    fn closed_is_start_and_direction_invariant() {
        let m = BinaryMask::from_fn(40, 40, |x, y| {
            let (x, y) = (x as i32, y as i32);
            (y == 8 && (8..=32).contains(&x)) || (x == 32 && (8..=28).contains(&y)) || (x - y == 4 && (8..=28).contains(&y) && x >= 12)
        });
        let outer = trace_contours(&m).into_iter().next().unwrap();
        let base = simplify_dp(&outer, 2.0).points.len();
        for shift in [1, 7, 19] {
            let mut p = outer.points.clone();
            let k = shift % p.len();
            p.rotate_left(k);
            assert_eq!(simplify_dp(&Contour::closed(p.clone()), 2.0).points.len(), base);
            p.reverse();
            assert_eq!(simplify_dp(&Contour::closed(p), 2.0).points.len(), base);
        }
    }
}
