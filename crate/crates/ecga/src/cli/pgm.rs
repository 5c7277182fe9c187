//! Minimal PGM (portable graymap) reader, P2 and P5 variants, 8-bit only.
//! PGM is the one supported image container: its payload is exactly the
//! row-major pixel bytes that get hashed, with no compression or color
//! management to make the digest ambiguous.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(Error::CorruptImage(format!(
                "{}x{} header with {} pixel bytes",
                width,
                height,
                pixels.len()
            )));
        }
        Ok(ImageBuffer {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Row-major pixel bytes; this is exactly what gets hashed.
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }
}

/// Cursor over the header section: ASCII tokens separated by whitespace,
/// with `#` starting a comment that runs to end of line.
struct Tokens<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn skip_filler(&mut self) {
        while self.pos < self.data.len() {
            match self.data[self.pos] {
                b'#' => {
                    while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => return,
            }
        }
    }

    fn next_token(&mut self) -> Result<&'a str> {
        self.skip_filler();
        let start = self.pos;
        while self.pos < self.data.len()
            && !self.data[self.pos].is_ascii_whitespace()
            && self.data[self.pos] != b'#'
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::CorruptImage("unexpected end of header".into()));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .map_err(|_| Error::CorruptImage("non-ASCII header token".into()))
    }

    fn next_usize(&mut self, what: &str) -> Result<usize> {
        let tok = self.next_token()?;
        tok.parse()
            .map_err(|_| Error::CorruptImage(format!("bad {what}: {tok:?}")))
    }
}

/// Parses a PGM file (P5 binary or P2 ASCII, maxval 255).
pub fn read_pgm(path: &Path) -> Result<ImageBuffer> {
    parse_pgm(&fs::read(path)?)
}

pub fn parse_pgm(data: &[u8]) -> Result<ImageBuffer> {
    let mut t = Tokens { data, pos: 0 };
    let magic = t.next_token()?;
    let binary = match magic {
        "P5" => true,
        "P2" => false,
        other => return Err(Error::UnsupportedFormat(other.into())),
    };
    let width = t.next_usize("width")?;
    let height = t.next_usize("height")?;
    let maxval = t.next_usize("maxval")?;
    if maxval != 255 {
        return Err(Error::UnsupportedDepth(maxval as u32));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| Error::CorruptImage("dimension overflow".into()))?;

    let pixels = if binary {
        // Exactly one whitespace byte separates the header from the raster.
        if t.pos >= data.len() || !data[t.pos].is_ascii_whitespace() {
            return Err(Error::CorruptImage("missing raster separator".into()));
        }
        let start = t.pos + 1;
        let raster = data
            .get(start..start + count)
            .ok_or_else(|| Error::CorruptImage("truncated raster".into()))?;
        raster.to_vec()
    } else {
        let mut pixels = Vec::with_capacity(count);
        for _ in 0..count {
            let v = t
                .next_usize("pixel")
                .map_err(|_| Error::CorruptImage("truncated raster".into()))?;
            if v > maxval {
                return Err(Error::CorruptImage(format!("pixel {v} above maxval")));
            }
            pixels.push(v as u8);
        }
        pixels
    };
    ImageBuffer::new(width, height, pixels)
}
