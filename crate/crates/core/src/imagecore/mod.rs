//! Raster types, binarization, connected components and PGM I/O.
//!
//! Coordinates are `(x, y)` with `x` the column and `y` the row, origin at
//! the top-left corner. Pixel `(x, y)` covers the unit square
//! `[x, x + 1) × [y, y + 1)`; its center sits at `(x + 0.5, y + 0.5)`.

mod components;
mod pgm;
mod threshold;

pub use components::{connected_components, filter_min_area, Component};
pub use pgm::{read_binary_pgm, read_pgm, write_binary_pgm, write_pgm};
pub use threshold::{otsu_level, threshold, ThresholdMethod};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ImageError {
    #[error("image dimensions must be positive, got {width}x{height}")]
    EmptyDimensions { width: usize, height: usize },
    #[error("pixel buffer holds {actual} values, expected {expected}")]
    BufferSize { expected: usize, actual: usize },
    #[error("region {region:?} exceeds image bounds {width}x{height}")]
    OutOfBounds {
        region: AxisRect,
        width: usize,
        height: usize,
    },
    #[error("PGM format error at byte {offset}: {message}")]
    Format { offset: usize, message: String },
}

/// A zero-based pixel coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PixelPoint {
    pub x: usize,
    pub y: usize,
}

impl PixelPoint {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

/// An upright rectangle of pixels: top-left corner plus extent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AxisRect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl AxisRect {
    pub const fn new(x: usize, y: usize, w: usize, h: usize) -> Self {
        Self { x, y, w, h }
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }

    pub fn fits(&self, width: usize, height: usize) -> bool {
        self.w >= 1 && self.h >= 1 && self.x + self.w <= width && self.y + self.h <= height
    }

    pub fn contains(&self, p: PixelPoint) -> bool {
        p.x >= self.x && p.x < self.x + self.w && p.y >= self.y && p.y < self.y + self.h
    }
}

/// 8-bit monochrome image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyDimensions { width, height });
        }
        if data.len() != width * height {
            return Err(ImageError::BufferSize {
                expected: width * height,
                actual: data.len(),
            });
        }
        Ok(Self { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self, ImageError> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    pub fn as_raw(&self) -> &[u8] {
        &self.data
    }
}

/// Two-level image: `true` is white (foreground), `false` is black.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    pixels: Vec<bool>,
}

impl std::fmt::Debug for BinaryImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "BinaryImage({}x{}, {} white)",
            self.width,
            self.height,
            self.count_white()
        )
    }
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, pixels: Vec<bool>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyDimensions { width, height });
        }
        if pixels.len() != width * height {
            return Err(ImageError::BufferSize {
                expected: width * height,
                actual: pixels.len(),
            });
        }
        Ok(Self { width, height, pixels })
    }

    /// All-black image.
    ///
    /// # Panics
    /// If either dimension is zero.
    pub fn black(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        Self {
            width,
            height,
            pixels: vec![false; width * height],
        }
    }

    /// All-white image.
    ///
    /// # Panics
    /// If either dimension is zero.
    pub fn white(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        Self {
            width,
            height,
            pixels: vec![true; width * height],
        }
    }

    /// Builds an image from rows of `'#'` (white) and `'.'` (black).
    ///
    /// Handy for hand-drawn fixtures.
    pub fn from_ascii(rows: &[&str]) -> Result<Self, ImageError> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let mut pixels = Vec::with_capacity(width * height);
        for row in rows {
            if row.len() != width {
                return Err(ImageError::BufferSize {
                    expected: width * height,
                    actual: pixels.len() + row.len(),
                });
            }
            pixels.extend(row.bytes().map(|b| b == b'#'));
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn full_rect(&self) -> AxisRect {
        AxisRect::new(0, 0, self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.pixels[y * self.width + x]
    }

    /// Like [`get`](Self::get) but treats anything outside the image as black.
    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.pixels[y as usize * self.width + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.pixels[y * self.width + x] = value;
    }

    pub fn row(&self, y: usize) -> &[bool] {
        &self.pixels[y * self.width..(y + 1) * self.width]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.pixels
    }

    pub fn count_white(&self) -> usize {
        self.pixels.iter().filter(|&&p| p).count()
    }

    /// Number of white pixels inside `region`, or in the whole image when `None`.
    pub fn count_white_in(&self, region: Option<AxisRect>) -> Result<usize, ImageError> {
        let Some(r) = region else {
            return Ok(self.count_white());
        };
        self.check_region(r)?;
        Ok((r.y..r.y + r.h)
            .map(|y| self.row(y)[r.x..r.x + r.w].iter().filter(|&&p| p).count())
            .sum())
    }

    fn check_region(&self, r: AxisRect) -> Result<(), ImageError> {
        if r.fits(self.width, self.height) {
            Ok(())
        } else {
            Err(ImageError::OutOfBounds {
                region: r,
                width: self.width,
                height: self.height,
            })
        }
    }

    pub fn crop(&self, r: AxisRect) -> Result<BinaryImage, ImageError> {
        self.check_region(r)?;
        let mut pixels = Vec::with_capacity(r.area());
        for y in r.y..r.y + r.h {
            pixels.extend_from_slice(&self.row(y)[r.x..r.x + r.w]);
        }
        Ok(BinaryImage {
            width: r.w,
            height: r.h,
            pixels,
        })
    }

    /// Columns `[from, to)` over the full height.
    pub fn crop_columns(&self, from: usize, to: usize) -> Result<BinaryImage, ImageError> {
        self.crop(AxisRect::new(from, 0, to.saturating_sub(from), self.height))
    }

    /// Point reflection: `(x, y)` maps to `(w − 1 − x, h − 1 − y)`.
    pub fn rotate180(&self) -> BinaryImage {
        let mut pixels = self.pixels.clone();
        pixels.reverse();
        BinaryImage {
            width: self.width,
            height: self.height,
            pixels,
        }
    }

    /// Quarter turn clockwise on screen: `(x, y)` maps to `(h − 1 − y, x)`.
    pub fn rotate90(&self) -> BinaryImage {
        let (w, h) = (self.width, self.height);
        let mut pixels = vec![false; w * h];
        for y in 0..h {
            for x in 0..w {
                // new image is h wide, w tall
                pixels[x * h + (h - 1 - y)] = self.get(x, y);
            }
        }
        BinaryImage {
            width: h,
            height: w,
            pixels,
        }
    }

    /// Tight bounding rect of the white pixels, `None` if the image is black.
    pub fn white_bounds(&self) -> Option<AxisRect> {
        let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
        for y in 0..self.height {
            let row = self.row(y);
            if let Some(first) = row.iter().position(|&p| p) {
                let last = row.iter().rposition(|&p| p).unwrap_or(first);
                x0 = x0.min(first);
                x1 = x1.max(last);
                y0 = y0.min(y);
                y1 = y;
            }
        }
        (x0 != usize::MAX).then(|| AxisRect::new(x0, y0, x1 - x0 + 1, y1 - y0 + 1))
    }

    /// Pastes the white pixels of `src` with its top-left at `(x, y)`.
    pub fn or_at(&mut self, src: &BinaryImage, x: usize, y: usize) -> Result<(), ImageError> {
        self.check_region(AxisRect::new(x, y, src.width, src.height))?;
        for sy in 0..src.height {
            let dst = &mut self.pixels[(y + sy) * self.width + x..][..src.width];
            for (d, &s) in dst.iter_mut().zip(src.row(sy)) {
                *d |= s;
            }
        }
        Ok(())
    }

    /// Encodes white as 255 and black as 0.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.pixels.iter().map(|&p| if p { 255 } else { 0 }).collect(),
        }
    }
}

/// Free-function form of [`BinaryImage::count_white_in`].
pub fn count_white(img: &BinaryImage, region: Option<AxisRect>) -> Result<usize, ImageError> {
    img.count_white_in(region)
}

pub fn crop(img: &BinaryImage, region: AxisRect) -> Result<BinaryImage, ImageError> {
    img.crop(region)
}

pub fn rotate180(img: &BinaryImage) -> BinaryImage {
    img.rotate180()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn count_white_whole_and_region() {
        assert_eq!(count_white(&BinaryImage::black(10, 10), None).unwrap(), 0);
        let white = BinaryImage::white(10, 10);
        assert_eq!(count_white(&white, Some(AxisRect::new(0, 0, 5, 5))).unwrap(), 25);
        assert!(matches!(
            count_white(&white, Some(AxisRect::new(8, 0, 5, 5))),
            Err(ImageError::OutOfBounds { .. })
        ));
    }

    #[test]
    fn crop_identity_and_bounds() {
        let img = BinaryImage::from_ascii(&["#..#", ".##.", "#..."]).unwrap();
        assert_eq!(img.crop(img.full_rect()).unwrap(), img);
        let one = BinaryImage::white(3, 3).crop(AxisRect::new(0, 0, 1, 1)).unwrap();
        assert_eq!(one, BinaryImage::white(1, 1));
        assert!(img.crop(AxisRect::new(3, 0, 2, 1)).is_err());
        assert!(img.crop(AxisRect::new(0, 0, 0, 1)).is_err());
    }

    #[test]
    fn rotate180_maps_corner() {
        let mut img = BinaryImage::black(5, 5);
        img.set(0, 0, true);
        let r = img.rotate180();
        assert!(r.get(4, 4));
        assert_eq!(r.count_white(), 1);
        assert_eq!(r.rotate180(), img);
        let sym = BinaryImage::from_ascii(&["#..", ".#.", "..#"]).unwrap();
        assert_eq!(sym.rotate180(), sym);
    }

    #[test]
    fn rotate90_is_clockwise() {
        let img = BinaryImage::from_ascii(&["##.", "..."]).unwrap();
        let r = img.rotate90();
        assert_eq!((r.width(), r.height()), (2, 3));
        assert_eq!(r, BinaryImage::from_ascii(&[".#", ".#", ".."]).unwrap());
        assert_eq!(r.rotate90().rotate90().rotate90(), img);
    }

    #[test]
    fn white_bounds_tight() {
        let img = BinaryImage::from_ascii(&["....", ".#..", "..#.", "...."]).unwrap();
        assert_eq!(img.white_bounds(), Some(AxisRect::new(1, 1, 2, 2)));
        assert_eq!(BinaryImage::black(3, 3).white_bounds(), None);
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(BinaryImage::new(0, 3, vec![]).is_err());
        assert!(BinaryImage::new(2, 2, vec![true; 3]).is_err());
        assert!(GrayImage::new(2, 2, vec![0; 5]).is_err());
    }

    fn arb_image() -> impl Strategy<Value = BinaryImage> {
        (1usize..12, 1usize..12).prop_flat_map(|(w, h)| {
            proptest::collection::vec(any::<bool>(), w * h).prop_map(move |px| BinaryImage::new(w, h, px).unwrap())
        })
    }

    proptest! {
        #[test]
        fn rotate180_involution(img in arb_image()) {
            prop_assert_eq!(img.rotate180().rotate180(), img);
        }

        #[test]
        fn crop_count_matches_region_count(img in arb_image(), fx in 0.0f64..1.0, fy in 0.0f64..1.0) {
            let x = (fx * img.width() as f64) as usize;
            let y = (fy * img.height() as f64) as usize;
            let r = AxisRect::new(x, y, img.width() - x, img.height() - y);
            prop_assert_eq!(img.crop(r).unwrap().count_white(), img.count_white_in(Some(r)).unwrap());
        }
    }
}
