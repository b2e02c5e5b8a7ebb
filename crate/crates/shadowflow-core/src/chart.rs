//! Chart points and small vector helpers.
//!
//! All positions live in a single normal chart around the curvature maximum
//! `x0 = 0`. Points are stored as fixed arrays of length [`DIM_MAX`]; for a
//! field of dimension `n < DIM_MAX` the trailing components must stay zero,
//! which keeps every vector operation below dimension-agnostic.

/// Largest supported chart dimension.
pub const DIM_MAX: usize = 5;

/// A chart point or tangent vector, zero-padded beyond the active dimension.
pub type Point = [f64; DIM_MAX];

pub const ZERO: Point = [0.0; DIM_MAX];

pub fn dot(a: &Point, b: &Point) -> f64 {
    let mut s = 0.0;
    for k in 0..DIM_MAX {
        s += a[k] * b[k];
    }
    s
}

pub fn norm2(a: &Point) -> f64 {
    dot(a, a)
}

pub fn norm(a: &Point) -> f64 {
    norm2(a).sqrt()
}

pub fn scaled(a: &Point, s: f64) -> Point {
    let mut out = *a;
    for k in 0..DIM_MAX {
        out[k] *= s;
    }
    out
}

pub fn sub(a: &Point, b: &Point) -> Point {
    let mut out = *a;
    for k in 0..DIM_MAX {
        out[k] -= b[k];
    }
    out
}

/// `acc += s * v`.
pub fn axpy(acc: &mut Point, s: f64, v: &Point) {
    for k in 0..DIM_MAX {
        acc[k] += s * v[k];
    }
}

pub fn distance(a: &Point, b: &Point) -> f64 {
    norm(&sub(a, b))
}

/// Builds a point from the first `dim` coordinates, padding with zeros.
pub fn from_coords(coords: &[f64]) -> Point {
    let mut p = ZERO;
    for (k, &c) in coords.iter().take(DIM_MAX).enumerate() {
        p[k] = c;
    }
    p
}

/// True when every component beyond `dim` vanishes.
pub fn padded_zero(a: &Point, dim: usize) -> bool {
    a[dim..].iter().all(|&c| c == 0.0)
}

pub fn is_finite(a: &Point) -> bool {
    a.iter().all(|c| c.is_finite())
}
