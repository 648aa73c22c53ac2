use crate::raster::RasterImage;

use super::{EvalError, Result};

/// Single-channel 8-bit image, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, fill: u8) -> Self {
        GrayImage {
            width,
            height,
            pixels: vec![fill; width as usize * height as usize],
        }
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, v: u8) {
        self.pixels[y as usize * self.width as usize + x as usize] = v;
    }

    /// Edge-replicated access.
    pub fn get_clamped(&self, x: i64, y: i64) -> u8 {
        let x = x.clamp(0, self.width as i64 - 1) as u32;
        let y = y.clamp(0, self.height as i64 - 1) as u32;
        self.get(x, y)
    }
}

/// ITU-R BT.601 luma, rounded.
pub fn to_luma(img: &RasterImage) -> GrayImage {
    GrayImage {
        width: img.width(),
        height: img.height(),
        pixels: img
            .pixels()
            .map(|[r, g, b]| (0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64).round() as u8)
            .collect(),
    }
}

/// Normalized 1-D Gaussian taps.
pub fn gaussian_kernel(sigma: f64, ksize: usize) -> Result<Vec<f64>> {
    if ksize < 3 || ksize % 2 == 0 {
        return Err(EvalError::BadKernel(format!("ksize {ksize} must be odd and >= 3")));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(EvalError::BadKernel(format!("sigma {sigma} must be positive")));
    }
    let half = (ksize / 2) as i64;
    let taps: Vec<f64> = (-half..=half)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    Ok(taps.into_iter().map(|t| t / sum).collect())
}

/// Luma conversion followed by separable Gaussian smoothing with edge
/// replication at the borders.
pub fn gaussian_blur(img: &RasterImage, sigma: f64, ksize: usize) -> Result<GrayImage> {
    blur_gray(&to_luma(img), sigma, ksize)
}

pub fn blur_gray(gray: &GrayImage, sigma: f64, ksize: usize) -> Result<GrayImage> {
    let k = gaussian_kernel(sigma, ksize)?;
    let half = (ksize / 2) as i64;
    let (w, h) = (gray.width as usize, gray.height as usize);
    let mut tmp = vec![0f64; w * h];
    for y in 0..h {
        for x in 0..w {
            tmp[y * w + x] = k
                .iter()
                .enumerate()
                .map(|(i, kv)| kv * gray.get_clamped(x as i64 + i as i64 - half, y as i64) as f64)
                .sum();
        }
    }
    let mut out = GrayImage::new(gray.width, gray.height, 0);
    for y in 0..h {
        for x in 0..w {
            let v: f64 = k
                .iter()
                .enumerate()
                .map(|(i, kv)| {
                    let yy = (y as i64 + i as i64 - half).clamp(0, h as i64 - 1) as usize;
                    kv * tmp[yy * w + x]
                })
                .sum();
            out.pixels[y * w + x] = v.round().clamp(0.0, 255.0) as u8;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_image_unchanged() {
        let img = RasterImage::new(20, 20, [90, 90, 90]);
        for sigma in [0.5, 1.0, 3.0] {
            let g = gaussian_blur(&img, sigma, 5).unwrap();
            assert!(g.pixels.iter().all(|&p| p == 90));
        }
    }

    #[test]
    fn kernel_normalized() {
        let k = gaussian_kernel(1.0, 5).unwrap();
        assert!((k.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        assert!((k[0] - k[4]).abs() < 1e-15);
    }

    #[test]
    fn bad_kernels() {
        assert!(matches!(gaussian_kernel(1.0, 4), Err(EvalError::BadKernel(_))));
        assert!(matches!(gaussian_kernel(1.0, 1), Err(EvalError::BadKernel(_))));
        assert!(matches!(gaussian_kernel(0.0, 5), Err(EvalError::BadKernel(_))));
    }
}
