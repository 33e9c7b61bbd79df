//! Netpbm input, binarization and the sub-strip reshape.
//!
//! Only the binary netpbm variants are read: P4 (packed bitmap) and P5
//! (8/16-bit graymap). In a [`BinaryImage`] a 1 is an ink (dark) pixel.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// 8-bit grayscale raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    rows: usize,
    cols: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(rows: usize, cols: usize, pixels: Vec<u8>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidImage(format!("dimensions {rows}x{cols} must be positive")));
        }
        if pixels.len() != rows * cols {
            return Err(Error::InvalidImage(format!(
                "pixel buffer has {} entries, expected {}",
                pixels.len(),
                rows * cols
            )));
        }
        Ok(Self { rows, cols, pixels })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.cols + col]
    }

    /// Serialize as binary P5 with maxval 255.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.cols, self.rows).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }
}

/// Bilevel raster, row-major, 1 = ink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    rows: usize,
    cols: usize,
    bits: Vec<u8>,
}

impl BinaryImage {
    pub fn new(rows: usize, cols: usize, bits: Vec<u8>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidImage(format!("dimensions {rows}x{cols} must be positive")));
        }
        if bits.len() != rows * cols {
            return Err(Error::InvalidImage(format!(
                "bit buffer has {} entries, expected {}",
                bits.len(),
                rows * cols
            )));
        }
        if let Some(v) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidImage(format!("bit value {v} is not 0 or 1")));
        }
        Ok(Self { rows, cols, bits })
    }

    /// All-background image.
    pub fn blank(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![0; rows * cols])
    }

    /// Build from nested rows; every row must have the same length.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(Error::InvalidImage("ragged rows".into()));
        }
        let bits = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::new(rows.len(), cols, bits)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.bits[row * self.cols + col]
    }

    pub(crate) fn set(&mut self, row: usize, col: usize, v: u8) {
        self.bits[row * self.cols + col] = v;
    }

    pub fn ink_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// Coordinates `(row, col)` of every ink pixel in row-major order.
    pub fn ink_pixels(&self) -> Vec<(usize, usize)> {
        self.bits.iter().enumerate().filter(|(_, &b)| b == 1).map(|(i, _)| (i / self.cols, i % self.cols)).collect()
    }

    /// Ink as luminance 0, background as 255.
    pub fn to_gray(&self) -> GrayImage {
        let pixels = self.bits.iter().map(|&b| if b == 1 { 0 } else { 255 }).collect();
        GrayImage { rows: self.rows, cols: self.cols, pixels }
    }
}

struct HeaderReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::BadHeader(format!("{what} is missing or not numeric")));
        }
        let text = std::str::from_utf8(&self.data[start..self.pos]).expect("ascii digits");
        text.parse().map_err(|_| Error::BadHeader(format!("{what} {text} is out of range")))
    }

    /// The single whitespace byte separating header from raster.
    fn end_of_header(&mut self) -> Result<()> {
        match self.data.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => {
                self.pos += 1;
                Ok(())
            }
            Some(_) => Err(Error::BadHeader("expected whitespace after header".into())),
            None => Err(Error::TruncatedPayload { expected: 1, found: 0 }),
        }
    }
}

/// Decode a P4 or P5 netpbm stream into grayscale.
///
/// P5 samples are rescaled linearly (rounded) to 0..=255 when maxval is not
/// 255. P4 ink bits (1) become luminance 0 and background bits 255.
pub fn load_netpbm(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.len() < 2 {
        return Err(Error::BadMagic(String::from_utf8_lossy(bytes).into_owned()));
    }
    let magic = &bytes[..2];
    let bitmap = match magic {
        b"P4" => true,
        b"P5" => false,
        _ => return Err(Error::BadMagic(String::from_utf8_lossy(magic).into_owned())),
    };
    let mut hdr = HeaderReader { data: bytes, pos: 2 };
    let cols = hdr.number("width")?;
    let rows = hdr.number("height")?;
    if rows == 0 || cols == 0 {
        return Err(Error::BadHeader(format!("dimensions {cols}x{rows} must be positive")));
    }
    let maxval = if bitmap {
        1
    } else {
        let m = hdr.number("maxval")?;
        if m == 0 || m > 65535 {
            return Err(Error::BadHeader(format!("maxval {m} outside 1..=65535")));
        }
        m
    };
    hdr.end_of_header()?;
    let payload = &bytes[hdr.pos..];

    let pixels = if bitmap {
        let stride = cols.div_ceil(8);
        let expected = stride * rows;
        if payload.len() < expected {
            return Err(Error::TruncatedPayload { expected, found: payload.len() });
        }
        let mut px = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let line = &payload[r * stride..(r + 1) * stride];
            for c in 0..cols {
                let bit = (line[c / 8] >> (7 - (c % 8))) & 1;
                px.push(if bit == 1 { 0 } else { 255 });
            }
        }
        px
    } else {
        let wide = maxval > 255;
        let expected = rows * cols * if wide { 2 } else { 1 };
        if payload.len() < expected {
            return Err(Error::TruncatedPayload { expected, found: payload.len() });
        }
        let rescale = |v: usize| -> u8 {
            if maxval == 255 {
                v.min(255) as u8
            } else {
                ((v.min(maxval) * 255 + maxval / 2) / maxval) as u8
            }
        };
        if wide {
            payload[..expected].chunks_exact(2).map(|p| rescale(u16::from_be_bytes([p[0], p[1]]) as usize)).collect()
        } else {
            payload[..expected].iter().map(|&v| rescale(v as usize)).collect()
        }
    };
    GrayImage::new(rows, cols, pixels)
}

/// Binarization rule; pixels strictly darker than the threshold become ink.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Binarization {
    #[default]
    Otsu,
    Fixed(u8),
}

impl fmt::Display for Binarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binarization::Otsu => f.write_str("otsu"),
            Binarization::Fixed(t) => write!(f, "fixed:{t}"),
        }
    }
}

impl FromStr for Binarization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "otsu" {
            return Ok(Binarization::Otsu);
        }
        s.strip_prefix("fixed:")
            .and_then(|t| t.parse().ok())
            .map(Binarization::Fixed)
            .ok_or_else(|| Error::InvalidConfig(format!("binarization {s:?}; expected otsu or fixed:<0-255>")))
    }
}

/// Otsu's threshold over the 256-bin histogram.
///
/// Returns the effective threshold `T`: luminance `< T` is the dark class.
/// When several cuts reach the maximal inter-class variance, the middle of
/// the first run of maximal cuts is taken.
pub fn otsu_threshold(img: &GrayImage) -> Result<u8> {
    let mut hist = [0u64; 256];
    for &p in img.pixels() {
        hist[p as usize] += 1;
    }
    if let Some(v) = hist.iter().position(|&n| n as usize == img.pixels().len()) {
        return Err(Error::DegenerateHistogram(v as u8));
    }
    let total = img.pixels().len() as f64;
    let sum_all: f64 = hist.iter().enumerate().map(|(v, &n)| v as f64 * n as f64).sum();

    // between[k]: variance for the split {<= k} | {> k}
    let mut between = [0.0f64; 255];
    let (mut w0, mut sum0) = (0.0f64, 0.0f64);
    for k in 0..255 {
        w0 += hist[k] as f64;
        sum0 += k as f64 * hist[k] as f64;
        let w1 = total - w0;
        if w0 == 0.0 || w1 == 0.0 {
            continue;
        }
        let mu0 = sum0 / w0;
        let mu1 = (sum_all - sum0) / w1;
        between[k] = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    }
    let best = between.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = between.iter().position(|&v| v == best).expect("non-empty");
    let hi = lo + between[lo..].iter().take_while(|&&v| v == best).count() - 1;
    Ok(((lo + hi) / 2 + 1) as u8)
}

/// Convert to ink bits: 1 iff luminance is below the effective threshold.
pub fn binarize(img: &GrayImage, method: Binarization) -> Result<BinaryImage> {
    let threshold = match method {
        Binarization::Otsu => otsu_threshold(img)?,
        Binarization::Fixed(t) => t,
    };
    let bits = img.pixels().iter().map(|&p| u8::from(p < threshold)).collect();
    Ok(BinaryImage { rows: img.rows, cols: img.cols, bits })
}

/// Cut `m` into `floor(rows / height)` bands of `height` rows and lay them
/// side by side. Rows past the last full band are dropped.
pub fn reshape_strip(m: &BinaryImage, height: usize) -> Result<BinaryImage> {
    if height == 0 || height > m.rows {
        return Err(Error::BadHeight { height, rows: m.rows });
    }
    let bands = m.rows / height;
    let cols = bands * m.cols;
    let mut bits = Vec::with_capacity(height * cols);
    for r in 0..height {
        for band in 0..bands {
            let src = (band * height + r) * m.cols;
            bits.extend_from_slice(&m.bits[src..src + m.cols]);
        }
    }
    Ok(BinaryImage { rows: height, cols, bits })
}
