use std::collections::VecDeque;

/// Integer pixel coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pixel {
    pub x: i32,
    pub y: i32,
}

impl Pixel {
    pub const fn new(x: i32, y: i32) -> Self {
        Pixel { x, y }
    }

    pub fn is_8_adjacent(self, other: Pixel) -> bool {
        self != other && (self.x - other.x).abs() <= 1 && (self.y - other.y).abs() <= 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMask {
    pub width: u32,
    pub height: u32,
    pub data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32) -> Self {
        BinaryMask {
            width,
            height,
            data: vec![false; width as usize * height as usize],
        }
    }

    pub fn from_fn(width: u32, height: u32, f: impl Fn(u32, u32) -> bool) -> Self {
        let mut m = BinaryMask::new(width, height);
        for y in 0..height {
            for x in 0..width {
                m.data[y as usize * width as usize + x as usize] = f(x, y);
            }
        }
        m
    }

    pub fn get(&self, x: i32, y: i32) -> bool {
        x >= 0
            && y >= 0
            && (x as u32) < self.width
            && (y as u32) < self.height
            && self.data[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: i32, y: i32, v: bool) {
        self.data[y as usize * self.width as usize + x as usize] = v;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|b| **b).count()
    }

    pub fn points(&self) -> Vec<Pixel> {
        (0..self.height as i32)
            .flat_map(|y| (0..self.width as i32).map(move |x| Pixel::new(x, y)))
            .filter(|p| self.get(p.x, p.y))
            .collect()
    }

    /// 8-connected foreground components in raster order of their first pixel.
    pub fn components(&self) -> Vec<Vec<Pixel>> {
        let mut seen = vec![false; self.data.len()];
        let mut out = Vec::new();
        let w = self.width as i32;
        for start in 0..self.data.len() {
            if !self.data[start] || seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                let p = Pixel::new(i as i32 % w, i as i32 / w);
                comp.push(p);
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        let (nx, ny) = (p.x + dx, p.y + dy);
                        if self.get(nx, ny) {
                            let j = (ny * w + nx) as usize;
                            if !seen[j] {
                                seen[j] = true;
                                queue.push_back(j);
                            }
                        }
                    }
                }
            }
            comp.sort_by_key(|p| (p.y, p.x));
            out.push(comp);
        }
        out
    }

    /// Fills 4-connected background pockets of fewer than `max_px` pixels
    /// that do not touch the image border.
    pub fn fill_small_holes(&mut self, max_px: usize) {
        let inverted = BinaryMask {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|b| !b).collect(),
        };
        let (w, h) = (self.width as i32, self.height as i32);
        for region in inverted.components_4() {
            let touches = region.iter().any(|p| p.x == 0 || p.y == 0 || p.x == w - 1 || p.y == h - 1);
            if !touches && region.len() < max_px {
                for p in region {
                    self.set(p.x, p.y, true);
                }
            }
        }
    }

    /// 4-connected foreground components.
    pub fn components_4(&self) -> Vec<Vec<Pixel>> {
        let mut seen = vec![false; self.data.len()];
        let mut out = Vec::new();
        let w = self.width as i32;
        for start in 0..self.data.len() {
            if !self.data[start] || seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                let p = Pixel::new(i as i32 % w, i as i32 / w);
                comp.push(p);
                for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    let (nx, ny) = (p.x + dx, p.y + dy);
                    if self.get(nx, ny) {
                        let j = (ny * w + nx) as usize;
                        if !seen[j] {
                            seen[j] = true;
                            queue.push_back(j);
                        }
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// Tight mask around `pixels` with a one-pixel empty frame; returns the
    /// mask and the offset to add to its coordinates.
    pub fn crop(pixels: &[Pixel]) -> (BinaryMask, Pixel) {
        let min_x = pixels.iter().map(|p| p.x).min().unwrap_or(0) - 1;
        let min_y = pixels.iter().map(|p| p.y).min().unwrap_or(0) - 1;
        let max_x = pixels.iter().map(|p| p.x).max().unwrap_or(0) + 1;
        let max_y = pixels.iter().map(|p| p.y).max().unwrap_or(0) + 1;
        let mut m = BinaryMask::new((max_x - min_x + 1) as u32, (max_y - min_y + 1) as u32);
        for p in pixels {
            m.set(p.x - min_x, p.y - min_y, true);
        }
        (m, Pixel::new(min_x, min_y))
    }
}
