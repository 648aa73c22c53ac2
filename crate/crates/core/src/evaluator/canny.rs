use std::collections::VecDeque;

use super::blur::GrayImage;
use super::mask::BinaryMask;
use super::{EvalError, Result};

pub type EdgeMap = BinaryMask;

/// 3×3 Sobel responses `(gx, gy)` with edge replication.
pub fn sobel(gray: &GrayImage) -> (Vec<f64>, Vec<f64>) {
    let (w, h) = (gray.width as i64, gray.height as i64);
    let mut gx = vec![0f64; (w * h) as usize];
    let mut gy = vec![0f64; (w * h) as usize];
    let p = |x: i64, y: i64| gray.get_clamped(x, y) as f64;
    for y in 0..h {
        for x in 0..w {
            let i = (y * w + x) as usize;
            gx[i] = (p(x + 1, y - 1) + 2.0 * p(x + 1, y) + p(x + 1, y + 1))
                - (p(x - 1, y - 1) + 2.0 * p(x - 1, y) + p(x - 1, y + 1));
            gy[i] = (p(x - 1, y + 1) + 2.0 * p(x, y + 1) + p(x + 1, y + 1))
                - (p(x - 1, y - 1) + 2.0 * p(x, y - 1) + p(x + 1, y - 1));
        }
    }
    (gx, gy)
}

pub fn gradient_magnitude(gray: &GrayImage) -> Vec<f64> {
    let (gx, gy) = sobel(gray);
    gx.iter().zip(&gy).map(|(a, b)| a.hypot(*b)).collect()
}

/// Sobel gradients, non-maximum suppression along the quantized gradient
/// direction, then hysteresis: weak pixels (>= `low`) survive only when
/// 8-connected through other survivors to a strong pixel (>= `high`).
pub fn canny_edges(gray: &GrayImage, low: f64, high: f64) -> Result<EdgeMap> {
    if !(low >= 0.0 && low < high) {
        return Err(EvalError::BadThresholds { low, high });
    }
    let (w, h) = (gray.width as i64, gray.height as i64);
    let (gx, gy) = sobel(gray);
    let mag: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| a.hypot(*b)).collect();
    let at = |x: i64, y: i64| -> f64 {
        if x < 0 || y < 0 || x >= w || y >= h {
            0.0
        } else {
            mag[(y * w + x) as usize]
        }
    };

    let mut thin = vec![0f64; mag.len()];
    for y in 0..h {
        for x in 0..w {
            let i = (y * w + x) as usize;
            let m = mag[i];
            if m < low || m == 0.0 {
                continue;
            }
            // angle in [0, 180)
            let mut ang = gy[i].atan2(gx[i]).to_degrees();
            if ang < 0.0 {
                ang += 180.0;
            }
            let (dx, dy) = if !(22.5..157.5).contains(&ang) {
                (1, 0)
            } else if ang < 67.5 {
                (1, 1)
            } else if ang < 112.5 {
                (0, 1)
            } else {
                (-1, 1)
            };
            // strict on the negative side so plateaus keep exactly one pixel
            if m > at(x - dx, y - dy) && m >= at(x + dx, y + dy) {
                thin[i] = m;
            }
        }
    }

    let mut edges = BinaryMask::new(gray.width, gray.height);
    let mut queue = VecDeque::new();
    for (i, &m) in thin.iter().enumerate() {
        if m >= high {
            edges.data[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = ((i as i64) % w, (i as i64) / w);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w || ny >= h {
                    continue;
                }
                let j = (ny * w + nx) as usize;
                if !edges.data[j] && thin[j] >= low {
                    edges.data[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_has_no_edges() {
        let g = GrayImage::new(32, 32, 128);
        assert_eq!(canny_edges(&g, 50.0, 150.0).unwrap().count(), 0);
    }

    #[test]
    fn vertical_step_gives_one_column() {
        let mut g = GrayImage::new(32, 32, 0);
        for y in 0..32 {
            for x in 16..32 {
                g.set(x, y, 255);
            }
        }
        let e = canny_edges(&g, 50.0, 150.0).unwrap();
        let cols: std::collections::BTreeSet<u32> =
            e.points().into_iter().map(|p| p.x as u32).collect();
        assert_eq!(cols.len(), 1);
        assert_eq!(e.count(), 32);
    }

    #[test]
    fn thresholds_validated() {
        let g = GrayImage::new(8, 8, 0);
        assert!(canny_edges(&g, 100.0, 50.0).is_err());
        assert!(canny_edges(&g, -1.0, 50.0).is_err());
    }
}
