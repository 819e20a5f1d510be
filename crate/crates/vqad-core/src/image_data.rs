//! In-memory image and mask buffers.
//!
//! Pixels are `f32` in `[0, 1]`, stored row-major as `(y, x, channel)`.
//! Masks are binary (`0`/`1`) with the same spatial shape as their image.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer {
    h: usize,
    w: usize,
    c: usize,
    data: Vec<f32>,
}

impl ImageBuffer {
    pub fn new(h: usize, w: usize, c: usize, data: Vec<f32>) -> Result<Self> {
        if h == 0 || w == 0 || c == 0 {
            return Err(Error::shape(format!("empty image shape {h}x{w}x{c}")));
        }
        if data.len() != h * w * c {
            return Err(Error::shape(format!(
                "pixel buffer length {} does not match {h}x{w}x{c}",
                data.len()
            )));
        }
        for &v in &data {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::data(format!("pixel value {v} outside [0, 1]")));
            }
        }
        Ok(Self { h, w, c, data })
    }

    pub fn zeros(h: usize, w: usize, c: usize) -> Self {
        Self { h, w, c, data: vec![0.0; h * w * c] }
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn width(&self) -> usize {
        self.w
    }

    pub fn channels(&self) -> usize {
        self.c
    }

    pub fn get(&self, y: usize, x: usize, ch: usize) -> f32 {
        self.data[(y * self.w + x) * self.c + ch]
    }

    pub fn set(&mut self, y: usize, x: usize, ch: usize, v: f32) {
        self.data[(y * self.w + x) * self.c + ch] = v;
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    /// Maximum over channels at one pixel.
    pub fn max_channel(&self, y: usize, x: usize) -> f32 {
        let base = (y * self.w + x) * self.c;
        self.data[base..base + self.c]
            .iter()
            .copied()
            .fold(f32::NEG_INFINITY, f32::max)
    }

    /// Bilinear resize with half-pixel centers and clamped borders.
    pub fn resize_bilinear(&self, h: usize, w: usize) -> Result<ImageBuffer> {
        if h == 0 || w == 0 {
            return Err(Error::shape("resize target must be non-empty".to_string()));
        }
        if h == self.h && w == self.w {
            return Ok(self.clone());
        }
        let sy = self.h as f32 / h as f32;
        let sx = self.w as f32 / w as f32;
        let mut out = vec![0.0f32; h * w * self.c];
        for y in 0..h {
            let fy = ((y as f32 + 0.5) * sy - 0.5).clamp(0.0, (self.h - 1) as f32);
            let y0 = fy.floor() as usize;
            let y1 = (y0 + 1).min(self.h - 1);
            let wy = fy - y0 as f32;
            for x in 0..w {
                let fx = ((x as f32 + 0.5) * sx - 0.5).clamp(0.0, (self.w - 1) as f32);
                let x0 = fx.floor() as usize;
                let x1 = (x0 + 1).min(self.w - 1);
                let wx = fx - x0 as f32;
                for ch in 0..self.c {
                    let p00 = self.get(y0, x0, ch);
                    let p01 = self.get(y0, x1, ch);
                    let p10 = self.get(y1, x0, ch);
                    let p11 = self.get(y1, x1, ch);
                    let top = p00 + (p01 - p00) * wx;
                    let bot = p10 + (p11 - p10) * wx;
                    out[(y * w + x) * self.c + ch] = (top + (bot - top) * wy).clamp(0.0, 1.0);
                }
            }
        }
        ImageBuffer::new(h, w, self.c, out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    h: usize,
    w: usize,
    data: Vec<u8>,
}

impl Mask {
    pub fn new(h: usize, w: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != h * w {
            return Err(Error::shape(format!(
                "mask buffer length {} does not match {h}x{w}",
                data.len()
            )));
        }
        if data.iter().any(|&v| v > 1) {
            return Err(Error::data("mask values must be 0 or 1".to_string()));
        }
        Ok(Self { h, w, data })
    }

    pub fn zeros(h: usize, w: usize) -> Self {
        Self { h, w, data: vec![0; h * w] }
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn width(&self) -> usize {
        self.w
    }

    pub fn get(&self, y: usize, x: usize) -> u8 {
        self.data[y * self.w + x]
    }

    pub fn set(&mut self, y: usize, x: usize, v: u8) {
        self.data[y * self.w + x] = v;
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.data
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().filter(|&&v| v == 1).count()
    }

    pub fn any(&self) -> bool {
        self.data.iter().any(|&v| v == 1)
    }

    /// Nearest-neighbor resize followed by re-binarization.
    pub fn resize_nearest(&self, h: usize, w: usize) -> Result<Mask> {
        if h == 0 || w == 0 {
            return Err(Error::shape("resize target must be non-empty".to_string()));
        }
        if h == self.h && w == self.w {
            return Ok(self.clone());
        }
        let sy = self.h as f32 / h as f32;
        let sx = self.w as f32 / w as f32;
        let mut out = vec![0u8; h * w];
        for y in 0..h {
            let src_y = (((y as f32 + 0.5) * sy - 0.5).round().max(0.0) as usize).min(self.h - 1);
            for x in 0..w {
                let src_x =
                    (((x as f32 + 0.5) * sx - 0.5).round().max(0.0) as usize).min(self.w - 1);
                out[y * w + x] = self.data[src_y * self.w + src_x];
            }
        }
        Mask::new(h, w, out)
    }
}

/// One image with an optional ground-truth anomaly mask.
#[derive(Debug, Clone)]
pub struct ImageSample {
    pub id: String,
    pub pixels: ImageBuffer,
    pub mask: Option<Mask>,
}

impl ImageSample {
    pub fn new(id: impl Into<String>, pixels: ImageBuffer, mask: Option<Mask>) -> Result<Self> {
        let id = id.into();
        if let Some(m) = &mask {
            if m.height() != pixels.height() || m.width() != pixels.width() {
                return Err(Error::data(format!(
                    "sample {id}: mask shape {}x{} does not match pixels {}x{}",
                    m.height(),
                    m.width(),
                    pixels.height(),
                    pixels.width()
                )));
            }
        }
        Ok(Self { id, pixels, mask })
    }
}
