//! Border following on binary masks (Suzuki–Abe topological border tracing).

use super::mask::{BinaryMask, Pixel};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BorderType {
    /// Between a component and the background surrounding it.
    Outer,
    /// Between a component and a background region it encloses.
    Hole,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Contour {
    pub points: Vec<Pixel>,
    pub closed: bool,
    pub border_type: BorderType,
    /// Index of the immediately enclosing border in the returned list.
    pub parent: Option<usize>,
}

impl Contour {
    pub fn open(points: Vec<Pixel>) -> Self {
        Contour {
            points,
            closed: false,
            border_type: BorderType::Outer,
            parent: None,
        }
    }

    pub fn closed(points: Vec<Pixel>) -> Self {
        Contour {
            points,
            closed: true,
            border_type: BorderType::Outer,
            parent: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

// Counter-clockwise on screen (y grows downward), starting east.
const DIRS: [(i32, i32); 8] = [
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

fn dir_index(dx: i32, dy: i32) -> usize {
    DIRS.iter()
        .position(|&d| d == (dx, dy))
        .expect("neighbour offset")
}

/// All outer and hole borders of the 8-connected foreground. Every component
/// yields exactly one outer border; every 4-connected background region it
/// encloses yields one hole border whose `parent` is that outer border.
pub fn trace_contours(mask: &BinaryMask) -> Vec<Contour> {
    let w = mask.width as i32 + 2;
    let h = mask.height as i32 + 2;
    let mut f = vec![0i32; (w * h) as usize];
    for y in 0..mask.height as i32 {
        for x in 0..mask.width as i32 {
            if mask.get(x, y) {
                f[((y + 1) * w + x + 1) as usize] = 1;
            }
        }
    }
    let at = |x: i32, y: i32| (y * w + x) as usize;

    let mut contours: Vec<Contour> = Vec::new();
    let mut nbd: i32 = 1;
    for y in 1..h - 1 {
        let mut lnbd: i32 = 1;
        for x in 1..w - 1 {
            let v = f[at(x, y)];
            if v == 0 {
                continue;
            }
            let start = if v == 1 && f[at(x - 1, y)] == 0 {
                Some((BorderType::Outer, (x - 1, y)))
            } else if v >= 1 && f[at(x + 1, y)] == 0 {
                if v > 1 {
                    lnbd = v;
                }
                Some((BorderType::Hole, (x + 1, y)))
            } else {
                None
            };

            if let Some((border_type, from)) = start {
                nbd += 1;
                let parent = if lnbd <= 1 {
                    None
                } else {
                    let li = (lnbd - 2) as usize;
                    if contours[li].border_type == border_type {
                        contours[li].parent
                    } else {
                        Some(li)
                    }
                };

                let mut points = Vec::new();
                let cur = (x, y);
                let d0 = dir_index(from.0 - x, from.1 - y);
                let first = (0..8).find_map(|k| {
                    let (dx, dy) = DIRS[(d0 + 8 - k) % 8];
                    (f[at(x + dx, y + dy)] != 0).then_some((x + dx, y + dy))
                });
                match first {
                    None => {
                        f[at(x, y)] = -nbd;
                        points.push(Pixel::new(x - 1, y - 1));
                    }
                    Some(p1) => {
                        let (mut p2, mut p3) = (p1, cur);
                        loop {
                            let d2 = dir_index(p2.0 - p3.0, p2.1 - p3.1);
                            let mut east_zero = false;
                            let mut p4 = p2;
                            for k in 1..=8 {
                                let d = (d2 + k) % 8;
                                let q = (p3.0 + DIRS[d].0, p3.1 + DIRS[d].1);
                                if f[at(q.0, q.1)] != 0 {
                                    p4 = q;
                                    break;
                                }
                                if d == 0 {
                                    east_zero = true;
                                }
                            }
                            if east_zero {
                                f[at(p3.0, p3.1)] = -nbd;
                            } else if f[at(p3.0, p3.1)] == 1 {
                                f[at(p3.0, p3.1)] = nbd;
                            }
                            points.push(Pixel::new(p3.0 - 1, p3.1 - 1));
                            if p4 == cur && p3 == p1 {
                                break;
                            }
                            p2 = p3;
                            p3 = p4;
                        }
                    }
                }
                contours.push(Contour {
                    points,
                    closed: true,
                    border_type,
                    parent,
                });
            }

            let v = f[at(x, y)];
            if v != 1 {
                lnbd = v.abs();
            }
        }
    }
    contours
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outer_count(c: &[Contour]) -> usize {
        c.iter().filter(|c| c.border_type == BorderType::Outer).count()
    }

    #[test]
    fn filled_square_one_outer() {
        let m = BinaryMask::from_fn(20, 20, |x, y| (5..15).contains(&x) && (5..15).contains(&y));
        let c = trace_contours(&m);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].border_type, BorderType::Outer);
        assert_eq!(c[0].points.len(), 36);
    }

    #[test]
    fn two_blobs() {
        let m = BinaryMask::from_fn(20, 20, |x, y| (x < 4 && y < 4) || (x > 10 && y > 10));
        assert_eq!(outer_count(&trace_contours(&m)), 2);
    }

    #[test]
    fn ring_has_hole_with_parent() {
        let m = BinaryMask::from_fn(12, 12, |x, y| {
            (2..10).contains(&x) && (2..10).contains(&y) && !((3..9).contains(&x) && (3..9).contains(&y))
        });
        let c = trace_contours(&m);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].border_type, BorderType::Outer);
        assert_eq!(c[1].border_type, BorderType::Hole);
        assert_eq!(c[1].parent, Some(0));
    }

    #[test]
    fn touching_frame_and_single_pixels() {
        let m = BinaryMask::from_fn(6, 6, |x, y| (x == 0 && y == 0) || (x == 5 && y == 5) || (x == 3 && y == 0));
        let c = trace_contours(&m);
        assert_eq!(outer_count(&c), 3);
        assert!(c.iter().all(|c| c.points.len() == 1));
    }

    #[test]
    fn chains_are_8_connected() {
        let m = BinaryMask::from_fn(30, 30, |x, y| ((x as i32 - 15).pow(2) + (y as i32 - 15).pow(2)) < 80);
        for c in trace_contours(&m) {
            for w in c.points.windows(2) {
                assert!(w[0].is_8_adjacent(w[1]));
            }
            let (a, b) = (c.points[0], *c.points.last().unwrap());
            assert!(a == b || a.is_8_adjacent(b));
        }
    }

    #[test]
    fn empty_mask() {
        assert!(trace_contours(&BinaryMask::new(8, 8)).is_empty());
    }
}
