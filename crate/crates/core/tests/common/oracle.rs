//! Straight-line reference encoder. Works on plain arrays and shares no code
//! with the library.

pub type Rgb = [u8; 3];

fn half_up(x: f64) -> u8 {
    let r = (x + 0.5).floor();
    if r < 0.0 {
        0
    } else if r > 255.0 {
        255
    } else {
        r as u8
    }
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Palette entry `i` evaluated exactly. With v = i/255 the channel is
/// 255 * (1.5 - |4v - c|) = (765 - 2|4i - 255c|) / 2, so working in halves
/// keeps everything integral.
pub fn jet_entry(i: u32) -> Rgb {
    let channel = |c: i64| -> u8 {
        let halves = (765 - 2 * (4 * i as i64 - 255 * c).abs()).clamp(0, 510);
        // round half up of halves / 2
        ((halves + 1) / 2) as u8
    };
    [channel(3), channel(2), channel(1)]
}

pub fn jet_of_distance(d: f64, d_max: f64) -> Rgb {
    let mut v = d / d_max;
    if v > 1.0 {
        v = 1.0;
    }
    let level = (v * 255.0 + 0.5).floor() as u32;
    jet_entry(level)
}

/// `None` for coincident points.
pub fn orientation(a: [f64; 3], b: [f64; 3]) -> Option<Rgb> {
    let d = dist(a, b);
    if d == 0.0 {
        return None;
    }
    let mut out = [0u8; 3];
    for c in 0..3 {
        let u = (a[c] - b[c]) / d;
        out[c] = half_up((u + 1.0) / 2.0 * 255.0);
    }
    Some(out)
}

/// Nearest defined entry, searching outward; the lower index wins ties.
fn fill(seg: &[Option<Rgb>]) -> Vec<Rgb> {
    let n = seg.len();
    let mut out = Vec::new();
    for i in 0..n {
        let mut found = None;
        if let Some(p) = seg[i] {
            found = Some(p);
        }
        let mut off = 1;
        while found.is_none() && off < n {
            if i >= off {
                if let Some(p) = seg[i - off] {
                    found = Some(p);
                }
            }
            if found.is_none() && i + off < n {
                if let Some(p) = seg[i + off] {
                    found = Some(p);
                }
            }
            off += 1;
        }
        out.push(found.unwrap_or([128, 128, 128]));
    }
    out
}

fn pose_column(f: &[[f64; 3]], d_max: f64) -> Vec<Rgb> {
    let j = f.len();
    let mut dists = Vec::new();
    let mut orients = Vec::new();
    for a in 0..j {
        for b in 0..j {
            if a < b {
                dists.push(jet_of_distance(dist(f[a], f[b]), d_max));
                orients.push(orientation(f[a], f[b]));
            }
        }
    }
    dists.extend(fill(&orients));
    dists
}

fn motion_column(f0: &[[f64; 3]], f1: &[[f64; 3]], d_max: f64) -> Vec<Rgb> {
    let j = f0.len();
    let mut dists = Vec::new();
    let mut orients = Vec::new();
    for a in 0..j {
        for b in 0..j {
            dists.push(jet_of_distance(dist(f0[a], f1[b]), d_max));
            orients.push(orientation(f0[a], f1[b]));
        }
    }
    dists.extend(fill(&orients));
    dists
}

/// Width, height and row-major pixels of the encoded image.
pub fn encode(frames: &[Vec<[f64; 3]>], d_max: f64) -> (usize, usize, Vec<Rgb>) {
    let n = frames.len();
    let j = frames[0].len();
    let height = 2 * j * j;
    let mut columns: Vec<Vec<Rgb>> = Vec::new();
    for t in 0..n {
        columns.push(pose_column(&frames[t], d_max));
        if t + 1 < n {
            columns.push(motion_column(&frames[t], &frames[t + 1], d_max));
        }
    }
    for col in columns.iter_mut() {
        let last = *col.last().unwrap();
        while col.len() < height {
            col.push(last);
        }
    }
    let width = columns.len();
    let mut pixels = Vec::new();
    for y in 0..height {
        for x in 0..width {
            pixels.push(columns[x][y]);
        }
    }
    (width, height, pixels)
}

/// Largest within-frame pair distance.
pub fn max_pair_distance(frames: &[Vec<[f64; 3]>]) -> f64 {
    let mut m = 0.0f64;
    for f in frames {
        for a in 0..f.len() {
            for b in 0..f.len() {
                if a != b {
                    m = m.max(dist(f[a], f[b]));
                }
            }
        }
    }
    m
}
