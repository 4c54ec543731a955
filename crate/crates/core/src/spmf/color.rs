//! Quantization of distances and orientations to 8-bit RGB.

use serde::{Deserialize, Serialize};

use super::EncodeError;
use crate::skeleton::Joint3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RgbPixel {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl RgbPixel {
    #[inline]
    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Self { r, g, b }
    }

    #[inline]
    pub const fn channels(self) -> [u8; 3] {
        [self.r, self.g, self.b]
    }
}

impl From<[u8; 3]> for RgbPixel {
    fn from(c: [u8; 3]) -> Self {
        Self::new(c[0], c[1], c[2])
    }
}

/// Rounds half-up and saturates to `0..=255`.
#[inline]
pub fn round_half_up(x: f64) -> u8 {
    (x + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Number of palette entries.
pub const JET_LEVELS: usize = 256;

// Channel with center `c` in {1, 2, 3} at level `i`:
// 255 * clamp(1.5 - |4 i/255 - c|, 0, 1), rounded half-up.
// Every unclamped value is an exact .5 tie, so the integer form
// 383 - |4i - 255c| is used instead of floating point.
const fn jet_channel(i: usize, c: usize) -> u8 {
    let d = (4 * i) as i64 - (255 * c) as i64;
    let v = 383 - if d < 0 { -d } else { d };
    if v < 0 {
        0
    } else if v > 255 {
        255
    } else {
        v as u8
    }
}

const fn build_jet() -> [RgbPixel; JET_LEVELS] {
    let mut table = [RgbPixel::new(0, 0, 0); JET_LEVELS];
    let mut i = 0;
    while i < JET_LEVELS {
        table[i] = RgbPixel::new(jet_channel(i, 3), jet_channel(i, 2), jet_channel(i, 1));
        i += 1;
    }
    table
}

/// The 256-entry JET palette, dark blue at 0 through cyan, yellow and orange
/// to dark red at 255.
pub static JET: [RgbPixel; JET_LEVELS] = build_jet();

/// Palette index for `v` in `[0, 1]`: the nearest of the 256 levels, ties up.
#[inline]
pub fn jet_level(v: f64) -> usize {
    (v * 255.0 + 0.5).floor() as usize
}

/// Maps `v` in `[0, 1]` to its JET palette entry.
pub fn jet_color(v: f64) -> Result<RgbPixel, EncodeError> {
    if !(0.0..=1.0).contains(&v) {
        return Err(EncodeError::Argument(format!(
            "jet input must lie in [0, 1], got {v}"
        )));
    }
    Ok(JET[jet_level(v)])
}

/// Tolerance on `|u| - 1` accepted by [`orient_color`].
pub const UNIT_TOLERANCE: f64 = 1e-6;

/// Maps each component of a unit vector from `[-1, 1]` to `0..=255`
/// (x to red, y to green, z to blue).
pub fn orient_color(u: Joint3) -> Result<RgbPixel, EncodeError> {
    let n = u.norm();
    if n.is_nan() || (n - 1.0).abs() > UNIT_TOLERANCE {
        return Err(EncodeError::Argument(format!(
            "orientation must be a unit vector, norm is {n}"
        )));
    }
    Ok(orient_color_unchecked(u))
}

#[inline]
pub(crate) fn orient_color_unchecked(u: Joint3) -> RgbPixel {
    let q = |c: f64| round_half_up((c + 1.0) / 2.0 * 255.0);
    RgbPixel::new(q(u.x), q(u.y), q(u.z))
}

/// Color used when a column has no valid orientation at all: the image of
/// the zero vector under the orientation map.
pub const NEUTRAL_ORIENTATION: RgbPixel = RgbPixel::new(128, 128, 128);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_endpoints_and_midpoint() {
        assert_eq!(jet_color(0.0).unwrap(), RgbPixel::new(0, 0, 128));
        assert_eq!(jet_color(1.0).unwrap(), RgbPixel::new(128, 0, 0));
        // 0.5 is not one of the 256 levels; it rounds up to level 128.
        assert_eq!(jet_level(0.5), 128);
        assert_eq!(jet_color(0.5).unwrap(), RgbPixel::new(130, 255, 126));
        assert_eq!(
            jet_color(127.0 / 255.0).unwrap(),
            RgbPixel::new(126, 255, 130)
        );
    }

    #[test]
    fn jet_matches_exact_rational_samples() {
        // Frozen from an exact-fraction evaluation of the piecewise map.
        let expected = [
            (0, [0, 0, 128]),
            (1, [0, 0, 132]),
            (32, [0, 1, 255]),
            (96, [2, 255, 254]),
            (127, [126, 255, 130]),
            (128, [130, 255, 126]),
            (159, [254, 255, 2]),
            (223, [255, 1, 0]),
            (254, [132, 0, 0]),
            (255, [128, 0, 0]),
        ];
        for (i, rgb) in expected {
            assert_eq!(JET[i], RgbPixel::from(rgb), "level {i}");
        }
    }

    #[test]
    fn jet_palette_is_distinct_and_blue_to_red() {
        let mut seen = std::collections::HashSet::new();
        assert!(JET.iter().all(|p| seen.insert(*p)));
        assert!(JET[0].b > JET[0].r && JET[255].r > JET[255].b);
    }

    #[test]
    fn jet_rejects_out_of_range() {
        assert!(jet_color(-0.01).is_err());
        assert!(jet_color(1.01).is_err());
        assert!(jet_color(f64::NAN).is_err());
    }

    #[test]
    fn orientation_colors() {
        let c = |x, y, z| orient_color(Joint3::new(x, y, z)).unwrap();
        assert_eq!(c(1.0, 0.0, 0.0), RgbPixel::new(255, 128, 128));
        assert_eq!(c(0.0, -1.0, 0.0), RgbPixel::new(128, 0, 128));
        assert_eq!(c(0.0, 0.0, 1.0), RgbPixel::new(128, 128, 255));
        assert!(orient_color(Joint3::new(1.0, 1.0, 0.0)).is_err());
        assert!(orient_color(Joint3::new(0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn rounding_is_half_up() {
        assert_eq!(round_half_up(127.5), 128);
        assert_eq!(round_half_up(127.49), 127);
        assert_eq!(round_half_up(-3.0), 0);
        assert_eq!(round_half_up(300.0), 255);
    }
}
