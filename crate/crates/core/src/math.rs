//! Float helpers that work without `std`.

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn powf(x: f64, e: f64) -> f64 {
    libm::pow(x, e)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn log10(x: f64) -> f64 {
    libm::log10(x)
}

/// `a < b`, with the strict side tightened by a slack scaled to `max(1, |b|)`.
#[inline]
pub fn strictly_less(a: f64, b: f64, slack: f64) -> bool {
    a < b - slack * b.abs().max(1.0)
}

/// `a <= b` up to an absolute slack.
#[inline]
pub fn at_most(a: f64, b: f64, slack: f64) -> bool {
    a <= b + slack
}

/// Start index of the last quarter of a sequence of length `len`.
#[inline]
pub fn tail_start(len: usize) -> usize {
    len - (len / 4).max(1).min(len)
}
