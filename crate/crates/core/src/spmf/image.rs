use std::io::Cursor;
use std::path::Path;

use super::color::{round_half_up, RgbPixel};
use super::stats::DistanceStats;
use super::EncodeError;

/// Which sequence and normalization produced an image.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub sequence_id: String,
    pub stats: DistanceStats,
}

/// Row-major RGB image. Column `x` is one time step of the encoded sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct SpmfImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<RgbPixel>,
    pub provenance: Option<Provenance>,
}

impl SpmfImage {
    pub fn filled(width: usize, height: usize, p: RgbPixel) -> Self {
        Self {
            width,
            height,
            pixels: vec![p; width * height],
            provenance: None,
        }
    }

    pub fn from_pixels(
        width: usize,
        height: usize,
        pixels: Vec<RgbPixel>,
    ) -> Result<Self, EncodeError> {
        if pixels.len() != width * height {
            return Err(EncodeError::Argument(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
            provenance: None,
        })
    }

    pub fn from_rgb_bytes(width: usize, height: usize, bytes: &[u8]) -> Result<Self, EncodeError> {
        if bytes.len() != width * height * 3 {
            return Err(EncodeError::Argument(format!(
                "{} bytes for a {width}x{height} RGB image",
                bytes.len()
            )));
        }
        let pixels = bytes
            .chunks_exact(3)
            .map(|c| RgbPixel::new(c[0], c[1], c[2]))
            .collect();
        Self::from_pixels(width, height, pixels)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> RgbPixel {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, p: RgbPixel) {
        self.pixels[y * self.width + x] = p;
    }

    pub fn column(&self, x: usize) -> Vec<RgbPixel> {
        (0..self.height).map(|y| self.get(x, y)).collect()
    }

    pub fn to_rgb_bytes(&self) -> Vec<u8> {
        self.pixels.iter().flat_map(|p| p.channels()).collect()
    }

    /// Same size and pixels, ignoring provenance.
    pub fn same_pixels(&self, other: &SpmfImage) -> bool {
        self.width == other.width && self.height == other.height && self.pixels == other.pixels
    }

    /// 8-bit RGB PNG with fixed encoder settings, so equal images always
    /// produce equal bytes.
    pub fn encode_png(&self) -> Result<Vec<u8>, EncodeError> {
        let (w, h) = self.png_dims()?;
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, w, h);
            enc.set_color(png::ColorType::Rgb);
            enc.set_depth(png::BitDepth::Eight);
            enc.set_compression(png::Compression::Balanced);
            enc.set_filter(png::Filter::Adaptive);
            let mut writer = enc
                .write_header()
                .map_err(|e| EncodeError::Png(e.to_string()))?;
            writer
                .write_image_data(&self.to_rgb_bytes())
                .map_err(|e| EncodeError::Png(e.to_string()))?;
            writer
                .finish()
                .map_err(|e| EncodeError::Png(e.to_string()))?;
        }
        Ok(out)
    }

    pub fn write_png(&self, path: &Path) -> Result<(), EncodeError> {
        let bytes = self.encode_png()?;
        std::fs::write(path, bytes).map_err(|e| EncodeError::Io(format!("{}: {e}", path.display())))
    }

    /// Decodes an 8-bit RGB or RGBA PNG (alpha is dropped).
    pub fn decode_png(bytes: &[u8]) -> Result<Self, EncodeError> {
        let png_err = |e: png::DecodingError| EncodeError::Png(e.to_string());
        let decoder = png::Decoder::new(Cursor::new(bytes));
        let mut reader = decoder.read_info().map_err(png_err)?;
        let size = reader
            .output_buffer_size()
            .ok_or_else(|| EncodeError::Png("image too large".into()))?;
        let mut buf = vec![0; size];
        let info = reader.next_frame(&mut buf).map_err(png_err)?;
        if info.bit_depth != png::BitDepth::Eight {
            return Err(EncodeError::Png(format!(
                "unsupported bit depth {:?}",
                info.bit_depth
            )));
        }
        let (w, h) = (info.width as usize, info.height as usize);
        let data = &buf[..info.buffer_size()];
        let rgb: Vec<u8> = match info.color_type {
            png::ColorType::Rgb => data.to_vec(),
            png::ColorType::Rgba => data
                .chunks_exact(4)
                .flat_map(|c| [c[0], c[1], c[2]])
                .collect(),
            other => {
                return Err(EncodeError::Png(format!(
                    "unsupported color type {other:?}"
                )))
            }
        };
        Self::from_rgb_bytes(w, h, &rgb)
    }

    pub fn read_png(path: &Path) -> Result<Self, EncodeError> {
        let bytes =
            std::fs::read(path).map_err(|e| EncodeError::Io(format!("{}: {e}", path.display())))?;
        Self::decode_png(&bytes)
    }

    fn png_dims(&self) -> Result<(u32, u32), EncodeError> {
        if self.is_empty() {
            return Err(EncodeError::Argument("cannot encode an empty image".into()));
        }
        let w = u32::try_from(self.width).map_err(|_| EncodeError::Argument("width".into()))?;
        let h = u32::try_from(self.height).map_err(|_| EncodeError::Argument("height".into()))?;
        Ok((w, h))
    }
}

/// Default network input size.
pub const DEFAULT_SIZE: usize = 32;

/// Bilinear resize with pixel-center alignment: output pixel `x` samples
/// source coordinate `(x + 0.5) * src_w / out_w - 0.5`, clamped to the image.
/// Each channel is interpolated independently and rounded half-up.
pub fn resize_image(img: &SpmfImage, out_w: usize, out_h: usize) -> Result<SpmfImage, EncodeError> {
    if img.is_empty() || img.width == 0 || img.height == 0 {
        return Err(EncodeError::Argument("cannot resize an empty image".into()));
    }
    if out_w == 0 || out_h == 0 {
        return Err(EncodeError::Argument(format!(
            "target size must be at least 1x1, got {out_w}x{out_h}"
        )));
    }
    if (out_w, out_h) == (img.width, img.height) {
        return Ok(img.clone());
    }

    let taps = |out: usize, src: usize| -> Vec<(usize, usize, f64)> {
        (0..out)
            .map(|i| {
                let s =
                    ((i as f64 + 0.5) * src as f64 / out as f64 - 0.5).clamp(0.0, (src - 1) as f64);
                let i0 = s.floor() as usize;
                let i1 = (i0 + 1).min(src - 1);
                (i0, i1, s - i0 as f64)
            })
            .collect()
    };
    let xs = taps(out_w, img.width);
    let ys = taps(out_h, img.height);

    let mut pixels = Vec::with_capacity(out_w * out_h);
    for &(y0, y1, fy) in &ys {
        for &(x0, x1, fx) in &xs {
            let (p00, p10) = (img.get(x0, y0).channels(), img.get(x1, y0).channels());
            let (p01, p11) = (img.get(x0, y1).channels(), img.get(x1, y1).channels());
            let mut out = [0u8; 3];
            for c in 0..3 {
                let lerp = |a: u8, b: u8, f: f64| f64::from(a) + (f64::from(b) - f64::from(a)) * f;
                let top = lerp(p00[c], p10[c], fx);
                let bottom = lerp(p01[c], p11[c], fx);
                out[c] = round_half_up(top + (bottom - top) * fy);
            }
            pixels.push(RgbPixel::from(out));
        }
    }
    Ok(SpmfImage {
        width: out_w,
        height: out_h,
        pixels,
        provenance: img.provenance.clone(),
    })
}
