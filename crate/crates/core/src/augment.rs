//! Image-space augmentation of encoded samples: random crop (resized back to
//! the source size), horizontal flip and Gaussian blur.
//!
//! Every stochastic step draws from an explicit RNG. [`replica_rng`] derives a
//! per-sample stream from `(seed, sample id, replica)`, so augmented corpora
//! are reproducible regardless of how samples are scheduled across workers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::spmf::{resize_image, round_half_up, EncodeError, RgbPixel, SpmfImage};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AugmentConfig {
    /// Side length of the crop relative to the image, in `(0, 1]`.
    pub crop_fraction: f64,
    pub flip_probability: f64,
    /// Blur strength in pixels; 0 disables blurring.
    pub gaussian_sigma: f64,
    pub seed: u64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            crop_fraction: 0.9,
            flip_probability: 0.5,
            gaussian_sigma: 0.5,
            seed: 0,
        }
    }
}

impl AugmentConfig {
    pub fn check(&self) -> Result<(), EncodeError> {
        if !(self.crop_fraction > 0.0 && self.crop_fraction <= 1.0) {
            return Err(EncodeError::Argument(format!(
                "crop_fraction must lie in (0, 1], got {}",
                self.crop_fraction
            )));
        }
        if !(0.0..=1.0).contains(&self.flip_probability) {
            return Err(EncodeError::Argument(format!(
                "flip_probability must lie in [0, 1], got {}",
                self.flip_probability
            )));
        }
        if !(self.gaussian_sigma >= 0.0 && self.gaussian_sigma.is_finite()) {
            return Err(EncodeError::Argument(format!(
                "gaussian_sigma must be finite and >= 0, got {}",
                self.gaussian_sigma
            )));
        }
        Ok(())
    }
}

/// RNG for one augmentation replica of one sample.
pub fn replica_rng(seed: u64, sample_id: &str, replica: u32) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update((sample_id.len() as u64).to_le_bytes());
    h.update(sample_id.as_bytes());
    h.update(replica.to_le_bytes());
    let digest = h.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

/// Crop size `ceil(fraction * W) x ceil(fraction * H)`, at least 1x1.
pub fn crop_dims(width: usize, height: usize, fraction: f64) -> (usize, usize) {
    // the tolerance keeps e.g. 0.9 * 10 = 9.000000000000002 from rounding up to 10
    let side = |n: usize| (((fraction * n as f64) - 1e-9).ceil() as usize).clamp(1, n.max(1));
    (side(width), side(height))
}

/// The `w x h` sub-rectangle whose top-left corner is `(x, y)`.
pub fn crop(
    img: &SpmfImage,
    x: usize,
    y: usize,
    w: usize,
    h: usize,
) -> Result<SpmfImage, EncodeError> {
    if w == 0 || h == 0 || x + w > img.width || y + h > img.height {
        return Err(EncodeError::Argument(format!(
            "crop {w}x{h} at ({x}, {y}) does not fit in {}x{}",
            img.width, img.height
        )));
    }
    let mut pixels = Vec::with_capacity(w * h);
    for row in y..y + h {
        let start = row * img.width + x;
        pixels.extend_from_slice(&img.pixels[start..start + w]);
    }
    let mut out = SpmfImage::from_pixels(w, h, pixels)?;
    out.provenance = img.provenance.clone();
    Ok(out)
}

/// Offset drawn uniformly for a crop of the configured fraction.
pub fn crop_offset(
    img: &SpmfImage,
    fraction: f64,
    rng: &mut impl Rng,
) -> (usize, usize, usize, usize) {
    let (cw, ch) = crop_dims(img.width, img.height, fraction);
    let x = rng.random_range(0..=img.width - cw);
    let y = rng.random_range(0..=img.height - ch);
    (x, y, cw, ch)
}

/// Random crop resized back to the source dimensions.
pub fn random_crop(
    img: &SpmfImage,
    cfg: &AugmentConfig,
    rng: &mut impl Rng,
) -> Result<SpmfImage, EncodeError> {
    cfg.check()?;
    if img.is_empty() {
        return Err(EncodeError::Argument("cannot crop an empty image".into()));
    }
    let (x, y, w, h) = crop_offset(img, cfg.crop_fraction, rng);
    let cropped = crop(img, x, y, w, h)?;
    resize_image(&cropped, img.width, img.height)
}

/// Mirrors columns: pixel `(x, y)` moves to `(W - 1 - x, y)`. On an SPMF
/// this reverses the time axis.
pub fn flip_horizontal(img: &SpmfImage) -> SpmfImage {
    let mut out = img.clone();
    for row in out.pixels.chunks_mut(img.width.max(1)) {
        row.reverse();
    }
    out
}

/// Normalized 1D Gaussian weights over `-ceil(3 sigma)..=ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return vec![1.0];
    }
    let radius = (3.0 * sigma).ceil() as i64;
    let w: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

/// Separable Gaussian blur with clamp-to-edge borders. Intermediate values
/// stay in floating point; only the final result is rounded.
pub fn gaussian_blur(img: &SpmfImage, sigma: f64) -> Result<SpmfImage, EncodeError> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(EncodeError::Argument(format!(
            "sigma must be finite and >= 0, got {sigma}"
        )));
    }
    if sigma == 0.0 || img.is_empty() {
        return Ok(img.clone());
    }
    let kernel = gaussian_kernel(sigma);
    let radius = (kernel.len() / 2) as isize;
    let (w, h) = (img.width as isize, img.height as isize);
    let clamp = |v: isize, n: isize| v.clamp(0, n - 1) as usize;

    let mut horiz = vec![[0.0f64; 3]; img.pixels.len()];
    for y in 0..h {
        for x in 0..w {
            let mut acc = [0.0; 3];
            for (k, wk) in kernel.iter().enumerate() {
                let p = img
                    .get(clamp(x + k as isize - radius, w), y as usize)
                    .channels();
                for c in 0..3 {
                    acc[c] += wk * f64::from(p[c]);
                }
            }
            horiz[(y * w + x) as usize] = acc;
        }
    }

    let mut out = img.clone();
    for y in 0..h {
        for x in 0..w {
            let mut acc = [0.0; 3];
            for (k, wk) in kernel.iter().enumerate() {
                let p = horiz[clamp(y + k as isize - radius, h) * img.width + x as usize];
                for c in 0..3 {
                    acc[c] += wk * p[c];
                }
            }
            out.set(
                x as usize,
                y as usize,
                RgbPixel::new(
                    round_half_up(acc[0]),
                    round_half_up(acc[1]),
                    round_half_up(acc[2]),
                ),
            );
        }
    }
    Ok(out)
}

/// One augmentation replica: random crop, flip with the configured
/// probability, then blur.
pub fn augment(
    img: &SpmfImage,
    cfg: &AugmentConfig,
    rng: &mut impl Rng,
) -> Result<SpmfImage, EncodeError> {
    let mut out = random_crop(img, cfg, rng)?;
    if rng.random_bool(cfg.flip_probability) {
        out = flip_horizontal(&out);
    }
    gaussian_blur(&out, cfg.gaussian_sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noise(w: usize, h: usize, seed: u64) -> SpmfImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pixels = (0..w * h)
            .map(|_| RgbPixel::new(rng.random(), rng.random(), rng.random()))
            .collect();
        SpmfImage::from_pixels(w, h, pixels).unwrap()
    }

    #[test]
    fn full_crop_is_identity() {
        let img = noise(20, 12, 1);
        let cfg = AugmentConfig {
            crop_fraction: 1.0,
            ..Default::default()
        };
        let out = random_crop(&img, &cfg, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn crop_window_indexing() {
        let img = noise(36, 36, 2);
        let c = crop(&img, 2, 2, 32, 32).unwrap();
        for y in 0..32 {
            for x in 0..32 {
                assert_eq!(c.get(x, y), img.get(x + 2, y + 2));
            }
        }
        assert!(crop(&img, 5, 0, 32, 32).is_err());
    }

    #[test]
    fn seeded_random_offset_selects_window() {
        let img = noise(36, 36, 3);
        let frac = 32.0 / 36.0;
        assert_eq!(crop_dims(36, 36, frac), (32, 32));
        // find a seed whose first draw lands on (2, 2)
        let seed = (0..10_000u64)
            .find(|s| {
                let (x, y, _, _) = crop_offset(&img, frac, &mut ChaCha8Rng::seed_from_u64(*s));
                (x, y) == (2, 2)
            })
            .expect("some seed draws (2, 2)");
        let (x, y, w, h) = crop_offset(&img, frac, &mut ChaCha8Rng::seed_from_u64(seed));
        let c = crop(&img, x, y, w, h).unwrap();
        assert_eq!(c.get(0, 0), img.get(2, 2));
        assert_eq!(c.get(31, 31), img.get(33, 33));
    }

    #[test]
    fn crop_dims_round_up() {
        assert_eq!(crop_dims(10, 10, 0.9), (9, 9));
        assert_eq!(crop_dims(32, 32, 0.9), (29, 29));
        assert_eq!(crop_dims(3, 1, 0.01), (1, 1));
    }

    #[test]
    fn random_crop_is_deterministic() {
        let img = noise(32, 32, 4);
        let cfg = AugmentConfig::default();
        let a = random_crop(&img, &cfg, &mut replica_rng(9, "s1", 0)).unwrap();
        let b = random_crop(&img, &cfg, &mut replica_rng(9, "s1", 0)).unwrap();
        assert_eq!(a, b);
        assert_eq!((a.width, a.height), (32, 32));
    }

    #[test]
    fn flips() {
        let img = noise(7, 5, 5);
        assert_eq!(flip_horizontal(&flip_horizontal(&img)), img);
        let col = noise(1, 6, 6);
        assert_eq!(flip_horizontal(&col), col);
        let (a, b) = (RgbPixel::new(1, 2, 3), RgbPixel::new(4, 5, 6));
        let ab = SpmfImage::from_pixels(2, 1, vec![a, b]).unwrap();
        assert_eq!(flip_horizontal(&ab).pixels, vec![b, a]);
    }

    #[test]
    fn blur_identity_and_constant() {
        let img = noise(9, 9, 7);
        assert_eq!(gaussian_blur(&img, 0.0).unwrap(), img);
        let c = SpmfImage::filled(10, 6, RgbPixel::new(10, 128, 250));
        for s in [0.3, 1.0, 2.5] {
            assert_eq!(gaussian_blur(&c, s).unwrap(), c);
        }
        assert!(gaussian_blur(&img, -1.0).is_err());
    }

    #[test]
    fn blur_impulse_matches_discrete_kernel() {
        // Kernel weights frozen from an independent evaluation of the
        // normalized 7-tap kernel: k(0)^2 * 255 = 40.606..., k(0)k(1) * 255 = 24.629...
        let mut img = SpmfImage::filled(9, 9, RgbPixel::default());
        img.set(4, 4, RgbPixel::new(255, 255, 255));
        let out = gaussian_blur(&img, 1.0).unwrap();
        assert_eq!(out.get(4, 4), RgbPixel::new(41, 41, 41));
        assert_eq!(out.get(5, 4), RgbPixel::new(25, 25, 25));
        assert_eq!(out.get(5, 5), RgbPixel::new(15, 15, 15));
        assert_eq!(gaussian_kernel(1.0).len(), 7);
    }

    #[test]
    fn augment_preserves_shape() {
        let img = noise(32, 32, 8);
        for r in 0..5 {
            let out =
                augment(&img, &AugmentConfig::default(), &mut replica_rng(1, "x", r)).unwrap();
            assert_eq!((out.width, out.height), (32, 32));
        }
    }

    #[test]
    fn config_validation() {
        let bad = AugmentConfig {
            crop_fraction: 0.0,
            ..Default::default()
        };
        assert!(bad.check().is_err());
        let bad = AugmentConfig {
            flip_probability: 1.5,
            ..Default::default()
        };
        assert!(bad.check().is_err());
    }
}
