//! Nonlinear blur: 7 × 7 convolution with zero padding followed by a sigmoid.

use crate::error::{CoreError, Result};
use crate::linalg::DenseMatrix;
use crate::map::{FixedPointMap, SimilarityCertificate};
use crate::rng::TrialRng;

use super::shrink::sigmoid;

/// Side length of the blur kernel.
pub const KERNEL_SIZE: usize = 7;
/// Kernel weight at the centre tap.
pub const KERNEL_CENTER: f64 = 1.5;
/// Kernel weight at every other tap.
pub const KERNEL_OFF: f64 = 0.1;

/// Row-major grayscale image.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(CoreError::InvalidInput("image dimensions must be positive".into()));
        }
        if pixels.len() != width * height {
            return Err(CoreError::DimensionError { expected: width * height, got: pixels.len() });
        }
        if pixels.iter().any(|p| !p.is_finite()) {
            return Err(CoreError::NonFiniteValue("image pixels"));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self { width, height, pixels: vec![value; width * height] }
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    /// `‖self − other‖² / (width·height)`.
    pub fn mean_squared_error(&self, other: &GrayImage) -> f64 {
        self.pixels.iter().zip(&other.pixels).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / self.len() as f64
    }
}

/// Handwriting-like test image in the style of a centred digit: three to
/// five thick anti-aliased pen strokes (straight segments and elliptical
/// arcs) confined to the central box that leaves a four-pixel margin,
/// intensities in `[0, 1]`.
pub fn synthetic_digit(width: usize, height: usize, seed: u64) -> GrayImage {
    const MARGIN: f64 = 4.0;
    const ARC_SEGMENTS: usize = 24;
    let mut rng = TrialRng::new(seed);
    let (lo_r, hi_r) = (MARGIN, (height as f64 - 1.0 - MARGIN).max(MARGIN));
    let (lo_c, hi_c) = (MARGIN, (width as f64 - 1.0 - MARGIN).max(MARGIN));
    let strokes = 3 + (rng.uniform() * 3.0) as usize;
    let radius = 1.0 + 0.6 * rng.uniform();
    // Each stroke is a polyline of (row, col) points.
    let mut polylines: Vec<Vec<(f64, f64)>> = Vec::with_capacity(strokes);
    for _ in 0..strokes {
        if rng.bernoulli(0.5) {
            let cr = lo_r + rng.uniform() * (hi_r - lo_r);
            let cc = lo_c + rng.uniform() * (hi_c - lo_c);
            let rr = 3.0 + 5.0 * rng.uniform();
            let rc = 3.0 + 5.0 * rng.uniform();
            let start = rng.uniform() * std::f64::consts::TAU;
            let sweep = std::f64::consts::PI * (1.0 + rng.uniform());
            let pts = (0..=ARC_SEGMENTS)
                .map(|i| {
                    let t = start + sweep * i as f64 / ARC_SEGMENTS as f64;
                    ((cr + rr * t.sin()).clamp(lo_r, hi_r), (cc + rc * t.cos()).clamp(lo_c, hi_c))
                })
                .collect();
            polylines.push(pts);
        } else {
            let p0 = (lo_r + rng.uniform() * (hi_r - lo_r), lo_c + rng.uniform() * (hi_c - lo_c));
            let p1 = (lo_r + rng.uniform() * (hi_r - lo_r), lo_c + rng.uniform() * (hi_c - lo_c));
            polylines.push(vec![p0, p1]);
        }
    }
    let mut pixels = vec![0.0; width * height];
    for row in 0..height {
        for col in 0..width {
            let p = (row as f64, col as f64);
            let d = polylines
                .iter()
                .flat_map(|line| line.windows(2).map(|w| segment_distance(p, w[0], w[1])))
                .fold(f64::INFINITY, f64::min);
            pixels[row * width + col] = (radius + 0.5 - d).clamp(0.0, 1.0);
        }
    }
    GrayImage { width, height, pixels }
}

/// Euclidean distance from `p` to the segment `[a, b]`.
fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dr, dc) = (b.0 - a.0, b.1 - a.1);
    let len2 = dr * dr + dc * dc;
    let t = if len2 > 0.0 { (((p.0 - a.0) * dr + (p.1 - a.1) * dc) / len2).clamp(0.0, 1.0) } else { 0.0 };
    ((p.0 - a.0 - t * dr).powi(2) + (p.1 - a.1 - t * dc).powi(2)).sqrt()
}

/// `x ↦ sigmoid(C·x)` on flattened `width × height` images, where `C` is the
/// zero-padded 7 × 7 convolution. The kernel is symmetric under reflection, so
/// `C` is a symmetric matrix and `J = diag(σ′(C·x))·C`.
#[derive(Debug, Clone)]
pub struct BlurOperator {
    width: usize,
    height: usize,
    kernel: [[f64; KERNEL_SIZE]; KERNEL_SIZE],
}

impl BlurOperator {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(CoreError::InvalidInput("image dimensions must be positive".into()));
        }
        let mut kernel = [[KERNEL_OFF; KERNEL_SIZE]; KERNEL_SIZE];
        kernel[KERNEL_SIZE / 2][KERNEL_SIZE / 2] = KERNEL_CENTER;
        Ok(Self { width, height, kernel })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// `C·x` by direct zero-padded convolution.
    pub fn convolve(&self, x: &[f64]) -> Vec<f64> {
        let half = (KERNEL_SIZE / 2) as isize;
        let (w, h) = (self.width as isize, self.height as isize);
        let mut out = vec![0.0; x.len()];
        for r in 0..h {
            for c in 0..w {
                let mut acc = 0.0;
                for (kr, krow) in self.kernel.iter().enumerate() {
                    let rr = r + kr as isize - half;
                    if rr < 0 || rr >= h {
                        continue;
                    }
                    for (kc, &k) in krow.iter().enumerate() {
                        let cc = c + kc as isize - half;
                        if cc >= 0 && cc < w {
                            acc += k * x[(rr * w + cc) as usize];
                        }
                    }
                }
                out[(r * w + c) as usize] = acc;
            }
        }
        out
    }

    /// Dense convolution matrix `C`.
    pub fn convolution_matrix(&self) -> DenseMatrix {
        let half = (KERNEL_SIZE / 2) as isize;
        let n = self.width * self.height;
        let w = self.width as isize;
        DenseMatrix::from_fn(n, n, |i, j| {
            let (ri, ci) = (i as isize / w, i as isize % w);
            let (rj, cj) = (j as isize / w, j as isize % w);
            let (dr, dc) = (rj - ri + half, cj - ci + half);
            if (0..KERNEL_SIZE as isize).contains(&dr) && (0..KERNEL_SIZE as isize).contains(&dc) {
                self.kernel[dr as usize][dc as usize]
            } else {
                0.0
            }
        })
    }

    /// Blurs an image of matching size.
    pub fn apply(&self, image: &GrayImage) -> Result<GrayImage> {
        let pixels = self.eval(&image.pixels)?;
        Ok(GrayImage { width: self.width, height: self.height, pixels })
    }

    fn slopes(&self, x: &[f64]) -> Vec<f64> {
        self.convolve(x)
            .into_iter()
            .map(|u| {
                let s = sigmoid(u);
                s * (1.0 - s)
            })
            .collect()
    }
}

/// `sigmoid(conv(image, K))` with the standard 7 × 7 kernel.
pub fn blur_forward(image: &GrayImage) -> Result<GrayImage> {
    BlurOperator::new(image.width, image.height)?.apply(image)
}

impl FixedPointMap for BlurOperator {
    fn dim(&self) -> usize {
        self.width * self.height
    }

    fn name(&self) -> &str {
        "blur"
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(self.convolve(x).into_iter().map(sigmoid).collect())
    }

    fn jacobian(&self, x: &[f64]) -> Option<DenseMatrix> {
        let q = self.slopes(x);
        Some(self.convolution_matrix().scale_rows_cols(&q, &vec![1.0; q.len()]))
    }

    fn similarity_certificate(&self, x: &[f64]) -> Option<SimilarityCertificate> {
        Some(SimilarityCertificate::diagonal_times_symmetric(self.slopes(x), self.convolution_matrix()))
    }
}
