use crate::error::{Error, Result};

pub const CHANNELS: usize = 3;

/// RGB image with values in [0, 1], stored row-major as HWC.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

/// Crop window in pixel coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CropRect {
    pub top: usize,
    pub left: usize,
    pub height: usize,
    pub width: usize,
}

impl CropRect {
    pub fn full(height: usize, width: usize) -> Self {
        CropRect {
            top: 0,
            left: 0,
            height,
            width,
        }
    }

    pub fn area(&self) -> usize {
        self.height * self.width
    }

    pub fn fits(&self, height: usize, width: usize) -> bool {
        self.height > 0 && self.width > 0 && self.top + self.height <= height && self.left + self.width <= width
    }
}

impl Image {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidParam(format!("image must be non-empty, got {height}x{width}")));
        }
        if data.len() != height * width * CHANNELS {
            return Err(Error::InvalidParam(format!(
                "{height}x{width}x{CHANNELS} image needs {} values, got {}",
                height * width * CHANNELS,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParam("image has non-finite values".into()));
        }
        Ok(Image { height, width, data })
    }

    pub fn filled(height: usize, width: usize, rgb: [f64; CHANNELS]) -> Result<Self> {
        let data = (0..height * width).flat_map(|_| rgb).collect();
        Image::new(height, width, data)
    }

    pub fn from_fn(height: usize, width: usize, f: impl Fn(usize, usize) -> [f64; CHANNELS]) -> Result<Self> {
        let mut data = Vec::with_capacity(height * width * CHANNELS);
        for y in 0..height {
            for x in 0..width {
                data.extend(f(y, x));
            }
        }
        Image::new(height, width, data)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn pixel(&self, y: usize, x: usize) -> [f64; CHANNELS] {
        let i = (y * self.width + x) * CHANNELS;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn crop(&self, rect: CropRect) -> Result<Image> {
        if !rect.fits(self.height, self.width) {
            return Err(Error::InvalidParam(format!(
                "crop {rect:?} lies outside a {}x{} image",
                self.height, self.width
            )));
        }
        let mut data = Vec::with_capacity(rect.area() * CHANNELS);
        for y in rect.top..rect.top + rect.height {
            let start = (y * self.width + rect.left) * CHANNELS;
            data.extend_from_slice(&self.data[start..start + rect.width * CHANNELS]);
        }
        Ok(Image {
            height: rect.height,
            width: rect.width,
            data,
        })
    }

    /// Bilinear resize with half-pixel centres and edge clamping.
    pub fn resize(&self, out_h: usize, out_w: usize) -> Result<Image> {
        if out_h == 0 || out_w == 0 {
            return Err(Error::InvalidParam("resize target must be non-empty".into()));
        }
        let ys: Vec<(usize, usize, f64)> = (0..out_h).map(|i| taps(i, out_h, self.height)).collect();
        let xs: Vec<(usize, usize, f64)> = (0..out_w).map(|j| taps(j, out_w, self.width)).collect();
        let mut data = Vec::with_capacity(out_h * out_w * CHANNELS);
        for &(y0, y1, wy) in &ys {
            for &(x0, x1, wx) in &xs {
                let (a, b, c, d) = (self.pixel(y0, x0), self.pixel(y0, x1), self.pixel(y1, x0), self.pixel(y1, x1));
                for ch in 0..CHANNELS {
                    let top = a[ch] + (b[ch] - a[ch]) * wx;
                    let bottom = c[ch] + (d[ch] - c[ch]) * wx;
                    data.push(top + (bottom - top) * wy);
                }
            }
        }
        Ok(Image {
            height: out_h,
            width: out_w,
            data,
        })
    }

    pub fn hflip(&self) -> Image {
        let mut data = Vec::with_capacity(self.data.len());
        for y in 0..self.height {
            for x in (0..self.width).rev() {
                data.extend(self.pixel(y, x));
            }
        }
        Image {
            height: self.height,
            width: self.width,
            data,
        }
    }
}

/// Source indices and weight of output coordinate `i`.
fn taps(i: usize, out: usize, inp: usize) -> (usize, usize, f64) {
    let src = ((i as f64 + 0.5) * inp as f64 / out as f64 - 0.5).clamp(0.0, (inp - 1) as f64);
    let lo = src.floor() as usize;
    let hi = (lo + 1).min(inp - 1);
    (lo, hi, src - lo as f64)
}
