//! Joint-pair distances and orientations, within a frame and across
//! consecutive frames.

use crate::skeleton::Joint3;

/// Euclidean distance between two joints of the same frame.
#[inline]
pub fn jjd(a: Joint3, b: Joint3) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    let dz = a.z - b.z;
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Unit vector `(a - b) / |a - b|`. Returns `None` for coincident joints,
/// which have no orientation.
///
/// Note the direction: the vector points from `b` towards `a`.
#[inline]
pub fn jjo(a: Joint3, b: Joint3) -> Option<Joint3> {
    let d = jjd(a, b);
    if d.is_nan() || d <= 0.0 {
        return None;
    }
    let u = Joint3::new((a.x - b.x) / d, (a.y - b.y) / d, (a.z - b.z) / d);
    u.is_finite().then_some(u)
}

/// Distance from joint `a` at frame `t` to joint `b` at frame `t + 1`.
///
/// Numerically identical to [`jjd`]; kept separate because its arguments are
/// not interchangeable: swapping the joint roles changes which frame each
/// joint is read from.
#[inline]
pub fn cross_jjd(a_t: Joint3, b_t1: Joint3) -> f64 {
    jjd(a_t, b_t1)
}

/// Orientation of `a_t - b_t1`, `None` when the two positions coincide.
#[inline]
pub fn cross_jjo(a_t: Joint3, b_t1: Joint3) -> Option<Joint3> {
    jjo(a_t, b_t1)
}
