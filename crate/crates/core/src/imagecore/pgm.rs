//! Binary (P5) PGM, 8-bit only.
//!
//! The writer emits the canonical header `P5\n<w> <h>\n255\n`. The reader
//! accepts any whitespace between header tokens and `#` comments, as the
//! Netpbm format allows, followed by exactly one whitespace byte before the
//! raster.

use super::{BinaryImage, GrayImage, ImageError};

fn format_err(offset: usize, message: impl Into<String>) -> ImageError {
    ImageError::Format {
        offset,
        message: message.into(),
    }
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderReader<'_> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    /// Returns the value and the offset of its first digit.
    fn number(&mut self, what: &str) -> Result<(usize, usize), ImageError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(format_err(start, format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .map(|v| (v, start))
            .ok_or_else(|| format_err(start, format!("{what} out of range")))
    }
}

pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage, ImageError> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(format_err(0, "missing P5 magic"));
    }
    let mut hdr = HeaderReader { bytes, pos: 2 };
    let (width, _) = hdr.number("width")?;
    let (height, _) = hdr.number("height")?;
    let (maxval, maxval_at) = hdr.number("maxval")?;
    if maxval != 255 {
        return Err(format_err(
            maxval_at,
            format!("unsupported maxval {maxval}, only 255 is accepted"),
        ));
    }
    if width == 0 || height == 0 {
        return Err(format_err(maxval_at, "zero image dimension"));
    }
    match bytes.get(hdr.pos) {
        Some(b) if b.is_ascii_whitespace() => hdr.pos += 1,
        _ => return Err(format_err(hdr.pos, "expected whitespace after maxval")),
    }
    let need = width
        .checked_mul(height)
        .ok_or_else(|| format_err(0, "image dimensions overflow"))?;
    let payload = &bytes[hdr.pos..];
    if payload.len() < need {
        return Err(format_err(
            bytes.len(),
            format!("truncated raster: {} of {need} bytes", payload.len()),
        ));
    }
    if payload.len() > need {
        return Err(format_err(hdr.pos + need, "trailing bytes after raster"));
    }
    GrayImage::new(width, height, payload.to_vec())
}

pub fn write_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.as_raw());
    out
}

/// Reads a strictly two-valued PGM (0 = black, 255 = white).
pub fn read_binary_pgm(bytes: &[u8]) -> Result<BinaryImage, ImageError> {
    let gray = read_pgm(bytes)?;
    let raster_start = bytes.len() - gray.as_raw().len();
    if let Some(i) = gray.as_raw().iter().position(|&v| v != 0 && v != 255) {
        return Err(format_err(
            raster_start + i,
            format!("value {} is neither 0 nor 255", gray.as_raw()[i]),
        ));
    }
    let pixels = gray.as_raw().iter().map(|&v| v == 255).collect();
    BinaryImage::new(gray.width(), gray.height(), pixels)
}

pub fn write_binary_pgm(img: &BinaryImage) -> Vec<u8> {
    write_pgm(&img.to_gray())
}
