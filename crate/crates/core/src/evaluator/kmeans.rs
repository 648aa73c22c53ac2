//! k-means over pixel RGB values.
//!
//! Runs on the color histogram (distinct colors weighted by pixel count),
//! which gives the same Lloyd iterates as clustering every pixel.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::raster::{RasterImage, Rgb};

use super::{EvalError, Result};

const MAX_ITERATIONS: usize = 50;
const CONVERGENCE_SHIFT: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub struct ColorCluster {
    pub centroid: [f64; 3],
    pub size: usize,
}

impl ColorCluster {
    pub fn rgb(&self) -> Rgb {
        self.centroid.map(|c| c.round().clamp(0.0, 255.0) as u8)
    }

    /// Chebyshev distance from the centroid to `c`.
    pub fn linf(&self, c: Rgb) -> f64 {
        (0..3)
            .map(|i| (self.centroid[i] - c[i] as f64).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct KMeansRun {
    /// Sorted by size, largest first.
    pub clusters: Vec<ColorCluster>,
    /// Within-cluster sum of squares after each assignment step.
    pub inertia: Vec<f64>,
    pub iterations: usize,
}

fn dist2(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3).map(|i| (a[i] - b[i]).powi(2)).sum()
}

fn histogram(img: &RasterImage) -> Vec<([f64; 3], usize)> {
    let mut h: BTreeMap<Rgb, usize> = BTreeMap::new();
    for p in img.pixels() {
        *h.entry(p).or_default() += 1;
    }
    h.into_iter()
        .map(|(c, n)| (c.map(|v| v as f64), n))
        .collect()
}

fn sort_clusters(clusters: &mut [ColorCluster]) {
    clusters.sort_by(|a, b| {
        b.size.cmp(&a.size).then_with(|| {
            a.centroid
                .partial_cmp(&b.centroid)
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
}

/// Full Lloyd run with k-means++ seeding. Fails with
/// [`EvalError::DegenerateInput`] when the image has fewer than `k` distinct
/// colors; the error carries those colors as clusters.
pub fn kmeans_rgb(img: &RasterImage, k: usize, seed: u64) -> Result<KMeansRun> {
    if k < 2 {
        return Err(EvalError::BadClusterCount(k));
    }
    let hist = histogram(img);
    if hist.len() < k {
        let mut clusters: Vec<ColorCluster> = hist
            .iter()
            .map(|&(c, n)| ColorCluster { centroid: c, size: n })
            .collect();
        sort_clusters(&mut clusters);
        return Err(EvalError::DegenerateInput { clusters });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total: usize = hist.iter().map(|h| h.1).sum();
    let mut centers: Vec<[f64; 3]> = Vec::with_capacity(k);
    let mut pick = rng.gen_range(0..total);
    let first = hist
        .iter()
        .find(|(_, n)| {
            if pick < *n {
                true
            } else {
                pick -= n;
                false
            }
        })
        .expect("weighted pick")
        .0;
    centers.push(first);
    while centers.len() < k {
        let weights: Vec<f64> = hist
            .iter()
            .map(|(c, n)| {
                *n as f64
                    * centers
                        .iter()
                        .map(|z| dist2(*c, *z))
                        .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let sum: f64 = weights.iter().sum();
        let next = if sum <= 0.0 {
            hist.iter()
                .find(|(c, _)| !centers.contains(c))
                .map(|h| h.0)
                .expect("k distinct colors")
        } else {
            let mut r = rng.gen_range(0.0..sum);
            let mut chosen = hist[hist.len() - 1].0;
            for (w, (c, _)) in weights.iter().zip(&hist) {
                if *w > 0.0 && r < *w {
                    chosen = *c;
                    break;
                }
                r -= w;
            }
            chosen
        };
        centers.push(next);
    }

    let mut inertia = Vec::new();
    let mut sizes = vec![0usize; k];
    let mut iterations = 0;
    for _ in 0..MAX_ITERATIONS {
        iterations += 1;
        let mut sums = vec![[0f64; 3]; k];
        sizes = vec![0usize; k];
        let mut sse = 0.0;
        for (c, n) in &hist {
            let (best, d) = centers
                .iter()
                .enumerate()
                .map(|(j, z)| (j, dist2(*c, *z)))
                .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
            sse += d * *n as f64;
            sizes[best] += n;
            for i in 0..3 {
                sums[best][i] += c[i] * *n as f64;
            }
        }
        inertia.push(sse);
        let mut shift: f64 = 0.0;
        for j in 0..k {
            if sizes[j] == 0 {
                continue;
            }
            let new = sums[j].map(|s| s / sizes[j] as f64);
            shift = shift.max(dist2(new, centers[j]).sqrt());
            centers[j] = new;
        }
        if shift < CONVERGENCE_SHIFT {
            break;
        }
    }

    let mut clusters: Vec<ColorCluster> = centers
        .into_iter()
        .zip(sizes)
        .map(|(centroid, size)| ColorCluster { centroid, size })
        .collect();
    sort_clusters(&mut clusters);
    Ok(KMeansRun {
        clusters,
        inertia,
        iterations,
    })
}

/// Clusters ordered by size, largest first. See [`kmeans_rgb`] for the
/// degenerate case.
pub fn dominant_colors(img: &RasterImage, k: usize, seed: u64) -> Result<Vec<ColorCluster>> {
    kmeans_rgb(img, k, seed).map(|r| r.clusters)
}

/// Like [`dominant_colors`] but falls back to the distinct colors when the
/// image has fewer than `k` of them.
pub fn dominant_colors_lenient(img: &RasterImage, k: usize, seed: u64) -> Result<Vec<ColorCluster>> {
    match dominant_colors(img, k, seed) {
        Err(EvalError::DegenerateInput { clusters }) => Ok(clusters),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solid_image_is_degenerate() {
        let img = RasterImage::new(10, 10, [0, 255, 0]);
        match dominant_colors(&img, 2, 0) {
            Err(EvalError::DegenerateInput { clusters }) => {
                assert_eq!(clusters.len(), 1);
                assert_eq!(clusters[0].rgb(), [0, 255, 0]);
                assert_eq!(clusters[0].size, 100);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn half_and_half() {
        let mut img = RasterImage::new(10, 10, [255, 0, 0]);
        for y in 0..10 {
            for x in 5..10 {
                img.set(x, y, [0, 0, 255]);
            }
        }
        let c = dominant_colors(&img, 2, 4).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].size, 50);
        assert_eq!(c[1].size, 50);
    }

    #[test]
    fn k_must_be_at_least_two() {
        let img = RasterImage::new(4, 4, [0, 0, 0]);
        assert!(matches!(dominant_colors(&img, 1, 0), Err(EvalError::BadClusterCount(1))));
    }
}
