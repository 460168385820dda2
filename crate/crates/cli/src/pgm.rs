//! Binary PGM (P5, maxval 255) grayscale images.

use std::path::Path;

use cheby_core::problems::GrayImage;

use crate::error::{CliError, Result};

/// Quantises `p` to a byte: clamp to `[0, 1]`, then `⌊255p + 1/2⌋`.
pub fn quantize(p: f64) -> u8 {
    let v = if p.is_nan() { 0.0 } else { p.clamp(0.0, 1.0) };
    (v * 255.0 + 0.5).floor() as u8
}

pub fn encode_pgm(image: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend(image.pixels.iter().map(|&p| quantize(p)));
    out
}

/// Reads the next header token, skipping whitespace and `#` comments.
fn next_token<'a>(data: &'a [u8], pos: &mut usize) -> Result<&'a [u8]> {
    loop {
        while *pos < data.len() && data[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < data.len() && data[*pos] == b'#' {
            while *pos < data.len() && data[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < data.len() && !data[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(CliError::Format("truncated header".into()));
    }
    Ok(&data[start..*pos])
}

fn header_number(data: &[u8], pos: &mut usize, what: &str) -> Result<usize> {
    let tok = next_token(data, pos)?;
    std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| CliError::Format(format!("invalid {what} in header")))
}

pub fn decode_pgm(data: &[u8]) -> Result<GrayImage> {
    let mut pos = 0;
    if next_token(data, &mut pos)? != b"P5" {
        return Err(CliError::Format("missing P5 magic number".into()));
    }
    let width = header_number(data, &mut pos, "width")?;
    let height = header_number(data, &mut pos, "height")?;
    let maxval = header_number(data, &mut pos, "maxval")?;
    if width == 0 || height == 0 {
        return Err(CliError::Format("image dimensions must be positive".into()));
    }
    if maxval != 255 {
        return Err(CliError::UnsupportedFormat(format!("maxval {maxval} (only 255 is supported)")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if pos >= data.len() || !data[pos].is_ascii_whitespace() {
        return Err(CliError::Format("missing raster separator".into()));
    }
    pos += 1;
    let raster = &data[pos..];
    let count = width * height;
    if raster.len() < count {
        return Err(CliError::Format(format!("raster has {} bytes, expected {count}", raster.len())));
    }
    let pixels = raster[..count].iter().map(|&b| b as f64 / 255.0).collect();
    Ok(GrayImage { width, height, pixels })
}

pub fn write_pgm(image: &GrayImage, path: &Path) -> Result<()> {
    std::fs::write(path, encode_pgm(image)).map_err(|e| CliError::io(path, e))
}

pub fn read_pgm(path: &Path) -> Result<GrayImage> {
    let data = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    decode_pgm(&data)
}
