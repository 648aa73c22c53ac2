//! Stroke thinning and the endpoint / branch census of a thinned stroke.

use serde::{Deserialize, Serialize};

use super::mask::{BinaryMask, Pixel};

/// Topology summary of one stroke component.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonInfo {
    /// Free stroke ends.
    pub endpoints: u32,
    /// Junctions where three or more stroke branches meet (clusters of
    /// junction pixels count once).
    pub branch_points: u32,
    /// Background regions enclosed by the component.
    pub holes: u32,
}

// P2..P9: N, NE, E, SE, S, SW, W, NW
const RING: [(i32, i32); 8] = [
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
];

fn ring(m: &BinaryMask, x: i32, y: i32) -> [bool; 8] {
    RING.map(|(dx, dy)| m.get(x + dx, y + dy))
}

fn neighbours(r: &[bool; 8]) -> u32 {
    r.iter().filter(|b| **b).count() as u32
}

/// 0→1 transitions around the ring; the number of 4-connected neighbour runs.
fn transitions(r: &[bool; 8]) -> u32 {
    (0..8).filter(|&i| !r[i] && r[(i + 1) % 8]).count() as u32
}

/// Zhang–Suen thinning followed by removal of staircase corners (pixels with
/// two mutually adjacent neighbours), which leaves an 8-thin skeleton with the
/// same topology.
pub fn thin(mask: &BinaryMask) -> BinaryMask {
    let mut m = mask.clone();
    let (w, h) = (m.width as i32, m.height as i32);
    loop {
        let mut changed = false;
        for pass in 0..2 {
            let mut kill = Vec::new();
            for y in 0..h {
                for x in 0..w {
                    if !m.get(x, y) {
                        continue;
                    }
                    let r = ring(&m, x, y);
                    let b = neighbours(&r);
                    if !(2..=6).contains(&b) || transitions(&r) != 1 {
                        continue;
                    }
                    let [p2, _, p4, _, p6, _, p8, _] = r;
                    let ok = if pass == 0 {
                        !(p2 && p4 && p6) && !(p4 && p6 && p8)
                    } else {
                        !(p2 && p4 && p8) && !(p2 && p6 && p8)
                    };
                    if ok {
                        kill.push((x, y));
                    }
                }
            }
            changed |= !kill.is_empty();
            for (x, y) in kill {
                m.set(x, y, false);
            }
        }
        if !changed {
            break;
        }
    }
    loop {
        let mut changed = false;
        for y in 0..h {
            for x in 0..w {
                if !m.get(x, y) {
                    continue;
                }
                let r = ring(&m, x, y);
                if neighbours(&r) == 2 && transitions(&r) == 1 {
                    // the two neighbours are consecutive in the ring; a
                    // diagonal + orthogonal pair stays connected without us
                    let i = (0..8).find(|&i| r[i]).unwrap();
                    let j = if r[(i + 1) % 8] { (i + 1) % 8 } else { (i + 7) % 8 };
                    let (a, b) = (RING[i], RING[j]);
                    if (a.0 - b.0).abs() <= 1 && (a.1 - b.1).abs() <= 1 && (a.0 == 0 || a.1 == 0) != (b.0 == 0 || b.1 == 0) {
                        // removing a corner whose neighbours lie on a 2-pixel
                        // tip would shorten a stroke end; only drop it when
                        // both neighbours continue elsewhere
                        let pa = Pixel::new(x + a.0, y + a.1);
                        let pb = Pixel::new(x + b.0, y + b.1);
                        if degree_without(&m, pa, (x, y)) >= 2 && degree_without(&m, pb, (x, y)) >= 2 {
                            m.set(x, y, false);
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    m
}

fn degree_without(m: &BinaryMask, p: Pixel, skip: (i32, i32)) -> u32 {
    RING.iter()
        .filter(|(dx, dy)| {
            let (x, y) = (p.x + dx, p.y + dy);
            (x, y) != skip && m.get(x, y)
        })
        .count() as u32
}

/// Removes side branches of at most `max_len` pixels that run from a free
/// end into a junction. Branch-free strokes are left alone.
pub fn prune_spurs(skel: &BinaryMask, max_len: usize) -> BinaryMask {
    let mut m = skel.clone();
    let ends: Vec<Pixel> = m.points().into_iter().filter(|p| is_endpoint(&m, *p)).collect();
    for e in ends {
        let mut path = vec![e];
        let mut prev = e;
        let mut cur = e;
        let reached_junction = loop {
            if path.len() > max_len {
                break false;
            }
            let next: Vec<Pixel> = RING
                .iter()
                .map(|(dx, dy)| Pixel::new(cur.x + dx, cur.y + dy))
                .filter(|p| m.get(p.x, p.y) && *p != prev && !path.contains(p))
                .collect();
            if next.is_empty() {
                break false;
            }
            if next.len() > 1 || next.iter().any(|p| is_junction(&m, *p)) {
                break true;
            }
            prev = cur;
            cur = next[0];
            path.push(cur);
        };
        if reached_junction {
            for p in &path {
                m.set(p.x, p.y, false);
            }
        }
    }
    m
}

pub fn is_endpoint(m: &BinaryMask, p: Pixel) -> bool {
    let r = ring(m, p.x, p.y);
    let b = neighbours(&r);
    b == 1 || (b == 2 && transitions(&r) == 1)
}

pub fn is_junction(m: &BinaryMask, p: Pixel) -> bool {
    transitions(&ring(m, p.x, p.y)) >= 3
}

/// Endpoint and branch census of a thinned mask; `holes` is left at zero.
pub fn census(skel: &BinaryMask) -> (Vec<Pixel>, u32) {
    let pts = skel.points();
    let ends: Vec<Pixel> = pts.iter().copied().filter(|p| is_endpoint(skel, *p)).collect();
    let junctions = BinaryMask::from_fn(skel.width, skel.height, |x, y| {
        skel.get(x as i32, y as i32) && is_junction(skel, Pixel::new(x as i32, y as i32))
    });
    let branch = junctions.components().len() as u32;
    (ends, branch)
}

/// Follows a branch-free stroke from `start` until it runs out of unvisited
/// pixels, preferring orthogonal steps.
pub fn walk_chain(skel: &BinaryMask, start: Pixel) -> Vec<Pixel> {
    let mut visited = BinaryMask::new(skel.width, skel.height);
    let mut chain = vec![start];
    visited.set(start.x, start.y, true);
    let mut cur = start;
    loop {
        let next = [(0, -1), (1, 0), (0, 1), (-1, 0), (1, -1), (1, 1), (-1, 1), (-1, -1)]
            .iter()
            .map(|(dx, dy)| Pixel::new(cur.x + dx, cur.y + dy))
            .find(|p| skel.get(p.x, p.y) && !visited.get(p.x, p.y));
        match next {
            Some(p) => {
                visited.set(p.x, p.y, true);
                chain.push(p);
                cur = p;
            }
            None => break,
        }
    }
    chain
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::bresenham;

    fn mask_from(pixels: &[(i64, i64)], size: u32) -> BinaryMask {
        let mut m = BinaryMask::new(size, size);
        for &(x, y) in pixels {
            m.set(x as i32, y as i32, true);
        }
        m
    }

    #[test]
    fn straight_line_has_two_ends() {
        let m = mask_from(&bresenham((3, 4), (25, 15)), 32);
        let s = thin(&m);
        let (ends, branch) = census(&s);
        assert_eq!(ends.len(), 2);
        assert_eq!(branch, 0);
        assert_eq!(walk_chain(&s, ends[0]).last(), Some(&ends[1]));
    }

    #[test]
    fn plus_has_one_branch() {
        let mut px = bresenham((2, 10), (18, 10));
        px.extend(bresenham((10, 2), (10, 18)));
        let (ends, branch) = census(&thin(&mask_from(&px, 24)));
        assert_eq!(ends.len(), 4);
        assert_eq!(branch, 1);
    }

    #[test]
    fn thick_line_thins_to_open_stroke() {
        let m = BinaryMask::from_fn(40, 12, |x, y| (4..36).contains(&x) && (4..7).contains(&y));
        let (ends, branch) = census(&thin(&m));
        assert_eq!(ends.len(), 2);
        assert_eq!(branch, 0);
    }
}
