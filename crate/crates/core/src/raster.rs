//! Hard-edged RGB rasterization and lossless PNG persistence.

use std::collections::BTreeSet;
use std::io::Cursor;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{FigureGeometry, PaletteColor, Point, Segment};

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("point ({x:.3}, {y:.3}) outside {size}x{size} canvas")]
    OutOfCanvas { x: f64, y: f64, size: u32 },
    #[error("invalid image size {0}")]
    BadSize(u32),
    #[error("png decode failed: {0}")]
    Decode(String),
    #[error("png encode failed: {0}")]
    Encode(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = RasterError> = std::result::Result<T, E>;

pub type Rgb = [u8; 3];

/// 8-bit RGB canvas, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RasterImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: u32, height: u32, fill: Rgb) -> Self {
        let mut pixels = Vec::with_capacity(width as usize * height as usize * 3);
        for _ in 0..width as usize * height as usize {
            pixels.extend_from_slice(&fill);
        }
        RasterImage {
            width,
            height,
            pixels,
        }
    }

    /// Wraps raw RGB bytes; `None` when the length does not match.
    pub fn from_raw(width: u32, height: u32, pixels: Vec<u8>) -> Option<Self> {
        (pixels.len() == width as usize * height as usize * 3).then_some(RasterImage {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn as_raw(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> Rgb {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn set(&mut self, x: u32, y: u32, c: Rgb) {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        self.pixels[i..i + 3].copy_from_slice(&c);
    }

    pub fn pixels(&self) -> impl Iterator<Item = Rgb> + '_ {
        self.pixels.chunks_exact(3).map(|c| [c[0], c[1], c[2]])
    }

    pub fn distinct_colors(&self) -> BTreeSet<Rgb> {
        self.pixels().collect()
    }

    pub fn count_color(&self, c: Rgb) -> usize {
        self.pixels().filter(|p| *p == c).count()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RasterConfig {
    pub stroke_width: u32,
    pub antialias: bool,
    pub background: Rgb,
}

impl RasterConfig {
    /// One-pixel strokes at 64, `round(size / 64)` above.
    pub fn for_canvas(size: u32) -> Self {
        RasterConfig {
            stroke_width: ((size as f64 / 64.0).round() as u32).max(1),
            antialias: false,
            background: [0, 0, 0],
        }
    }
}

impl Default for RasterConfig {
    fn default() -> Self {
        RasterConfig::for_canvas(64)
    }
}

/// Renders every edge of `geom` in `color` on a `size`×`size` canvas.
pub fn rasterize_figure(
    geom: &FigureGeometry,
    color: &PaletteColor,
    size: u32,
    cfg: &RasterConfig,
) -> Result<RasterImage> {
    rasterize_segments(&geom.edges(), color.rgb, size, cfg)
}

pub fn rasterize_segments(
    segments: &[Segment],
    color: Rgb,
    size: u32,
    cfg: &RasterConfig,
) -> Result<RasterImage> {
    if size == 0 {
        return Err(RasterError::BadSize(size));
    }
    for s in segments {
        for p in [s.start, s.end] {
            if !(p.x >= 0.0 && p.x < size as f64 && p.y >= 0.0 && p.y < size as f64) {
                return Err(RasterError::OutOfCanvas {
                    x: p.x,
                    y: p.y,
                    size,
                });
            }
        }
    }
    let mut img = RasterImage::new(size, size, cfg.background);
    if cfg.antialias {
        let mut cover = vec![0f32; size as usize * size as usize];
        for s in segments {
            wu_line(s.start, s.end, size, &mut cover);
        }
        for (i, c) in cover.iter().enumerate() {
            if *c > 0.0 {
                let px = blend(cfg.background, color, c.min(1.0));
                img.set(i as u32 % size, i as u32 / size, px);
            }
        }
    } else {
        let w = cfg.stroke_width.max(1) as i64;
        let lo = -(w - 1) / 2;
        let hi = w / 2;
        for s in segments {
            for (x, y) in bresenham(pixel_of(s.start, size), pixel_of(s.end, size)) {
                for dy in lo..=hi {
                    for dx in lo..=hi {
                        let (px, py) = (x + dx, y + dy);
                        if px >= 0 && py >= 0 && px < size as i64 && py < size as i64 {
                            img.set(px as u32, py as u32, color);
                        }
                    }
                }
            }
        }
    }
    Ok(img)
}

fn pixel_of(p: Point, size: u32) -> (i64, i64) {
    let max = size as i64 - 1;
    (
        (p.x.round() as i64).min(max),
        (p.y.round() as i64).min(max),
    )
}

/// Integer midpoint line covering both endpoints, one pixel per major-axis step.
pub fn bresenham(from: (i64, i64), to: (i64, i64)) -> Vec<(i64, i64)> {
    let (mut x0, mut y0) = from;
    let (x1, y1) = to;
    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    let mut out = Vec::with_capacity((dx.max(-dy) + 1) as usize);
    loop {
        out.push((x0, y0));
        if x0 == x1 && y0 == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x0 += sx;
        }
        if e2 <= dx {
            err += dx;
            y0 += sy;
        }
    }
    out
}

fn blend(bg: Rgb, fg: Rgb, a: f32) -> Rgb {
    let mix = |b: u8, f: u8| (b as f32 + (f as f32 - b as f32) * a).round().clamp(0.0, 255.0) as u8;
    [mix(bg[0], fg[0]), mix(bg[1], fg[1]), mix(bg[2], fg[2])]
}

// Xiaolin Wu coverage, accumulated with max so shared vertices are not darkened twice.
fn wu_line(a: Point, b: Point, size: u32, cover: &mut [f32]) {
    let mut plot = |x: i64, y: i64, c: f64| {
        if x >= 0 && y >= 0 && x < size as i64 && y < size as i64 {
            let i = y as usize * size as usize + x as usize;
            cover[i] = cover[i].max(c as f32);
        }
    };
    let (mut x0, mut y0, mut x1, mut y1) = (a.x, a.y, b.x, b.y);
    let steep = (y1 - y0).abs() > (x1 - x0).abs();
    if steep {
        std::mem::swap(&mut x0, &mut y0);
        std::mem::swap(&mut x1, &mut y1);
    }
    if x0 > x1 {
        std::mem::swap(&mut x0, &mut x1);
        std::mem::swap(&mut y0, &mut y1);
    }
    let dx = x1 - x0;
    let gradient = if dx == 0.0 { 1.0 } else { (y1 - y0) / dx };
    let xs = x0.round() as i64;
    let xe = x1.round() as i64;
    let mut y = y0 + gradient * (xs as f64 - x0);
    for x in xs..=xe {
        let yf = y.floor();
        let frac = y - yf;
        let (p, q) = if steep {
            ((yf as i64, x), (yf as i64 + 1, x))
        } else {
            ((x, yf as i64), (x, yf as i64 + 1))
        };
        plot(p.0, p.1, 1.0 - frac);
        plot(q.0, q.1, frac);
        y += gradient;
    }
}

/// Encodes as PNG: RGB, 8-bit, non-interlaced.
pub fn encode_png(img: &RasterImage) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, img.width, img.height);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc
            .write_header()
            .map_err(|e| RasterError::Encode(e.to_string()))?;
        writer
            .write_image_data(&img.pixels)
            .map_err(|e| RasterError::Encode(e.to_string()))?;
        writer
            .finish()
            .map_err(|e| RasterError::Encode(e.to_string()))?;
    }
    Ok(out)
}

/// Decodes any 8/16-bit gray, gray-alpha, RGB, RGBA or palette PNG into RGB.
/// Alpha is dropped.
pub fn decode_png(bytes: &[u8]) -> Result<RasterImage> {
    let derr = |e: png::DecodingError| RasterError::Decode(e.to_string());
    let mut dec = png::Decoder::new(Cursor::new(bytes));
    dec.set_transformations(png::Transformations::normalize_to_color8());
    let mut reader = dec.read_info().map_err(derr)?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| RasterError::Decode("image too large".into()))?;
    let mut buf = vec![0u8; size];
    let info = reader.next_frame(&mut buf).map_err(derr)?;
    let (w, h) = (info.width, info.height);
    let data = &buf[..info.buffer_size()];
    let rgb: Vec<u8> = match info.color_type {
        png::ColorType::Rgb => data.to_vec(),
        png::ColorType::Rgba => data
            .chunks_exact(4)
            .flat_map(|c| [c[0], c[1], c[2]])
            .collect(),
        png::ColorType::Grayscale => data.iter().flat_map(|&g| [g, g, g]).collect(),
        png::ColorType::GrayscaleAlpha => data
            .chunks_exact(2)
            .flat_map(|c| [c[0], c[0], c[0]])
            .collect(),
        png::ColorType::Indexed => {
            return Err(RasterError::Decode("unexpanded palette image".into()))
        }
    };
    RasterImage::from_raw(w, h, rgb)
        .ok_or_else(|| RasterError::Decode("pixel buffer size mismatch".into()))
}

pub fn save_png(img: &RasterImage, path: &Path) -> Result<()> {
    std::fs::write(path, encode_png(img)?)?;
    Ok(())
}

pub fn load_png(path: &Path) -> Result<RasterImage> {
    decode_png(&std::fs::read(path)?)
}

/// `decode(encode(img))`.
pub fn image_roundtrip(img: &RasterImage) -> Result<RasterImage> {
    decode_png(&encode_png(img)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{synth_regular_polygon, GeometryParams};

    fn green() -> PaletteColor {
        PaletteColor::new("green", [0, 255, 0])
    }

    #[test]
    fn horizontal_segment_pixel_count() {
        let g = FigureGeometry::Lines(vec![Segment::new(
            Point::new(8.0, 32.0),
            Point::new(55.0, 32.0),
        )]);
        let img = rasterize_figure(&g, &green(), 64, &RasterConfig::default()).unwrap();
        assert_eq!(img.count_color([0, 255, 0]), 48);
        for y in 0..64 {
            for x in 0..64 {
                let lit = img.get(x, y) == [0, 255, 0];
                assert_eq!(lit, y == 32 && (8..=55).contains(&x));
            }
        }
    }

    #[test]
    fn empty_geometry_is_background() {
        let img = rasterize_figure(
            &FigureGeometry::Lines(vec![]),
            &green(),
            64,
            &RasterConfig::default(),
        )
        .unwrap();
        assert_eq!(img.distinct_colors().into_iter().collect::<Vec<_>>(), vec![[0, 0, 0]]);
    }

    #[test]
    fn rendering_is_deterministic_and_two_colored() {
        let g = synth_regular_polygon(7, 64, 9, &GeometryParams::default()).unwrap();
        let a = rasterize_figure(&g, &green(), 64, &RasterConfig::default()).unwrap();
        let b = rasterize_figure(&g, &green(), 64, &RasterConfig::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.distinct_colors().len(), 2);
    }

    #[test]
    fn out_of_canvas_rejected() {
        let g = FigureGeometry::Lines(vec![Segment::new(
            Point::new(-1.0, 3.0),
            Point::new(10.0, 3.0),
        )]);
        assert!(matches!(
            rasterize_figure(&g, &green(), 64, &RasterConfig::default()),
            Err(RasterError::OutOfCanvas { .. })
        ));
    }

    #[test]
    fn single_pixel_roundtrip() {
        let img = RasterImage::new(1, 1, [12, 34, 56]);
        assert_eq!(image_roundtrip(&img).unwrap(), img);
    }

    #[test]
    fn truncated_png_fails() {
        let img = RasterImage::new(64, 64, [1, 2, 3]);
        let bytes = encode_png(&img).unwrap();
        let cut = &bytes[..bytes.len() / 2];
        assert!(matches!(decode_png(cut), Err(RasterError::Decode(_))));
        assert!(decode_png(b"not a png").is_err());
    }

    #[test]
    fn antialias_blends() {
        let g = FigureGeometry::Lines(vec![Segment::new(
            Point::new(5.0, 5.3),
            Point::new(50.0, 40.7),
        )]);
        let cfg = RasterConfig {
            antialias: true,
            ..RasterConfig::default()
        };
        let img = rasterize_figure(&g, &green(), 64, &cfg).unwrap();
        assert!(img.distinct_colors().len() > 2);
    }

    #[test]
    fn thick_stroke_at_128() {
        let cfg = RasterConfig::for_canvas(128);
        assert_eq!(cfg.stroke_width, 2);
        let g = FigureGeometry::Lines(vec![Segment::new(
            Point::new(10.0, 60.0),
            Point::new(100.0, 60.0),
        )]);
        let img = rasterize_figure(&g, &green(), 128, &cfg).unwrap();
        assert_eq!(img.count_color([0, 255, 0]), 92 * 2);
    }
}
