//! Unit helpers. Internal time unit is the microsecond.

use std::f64::consts::PI;

/// `2π × f MHz` expressed in rad/µs.
pub fn mhz(f: f64) -> f64 {
    2.0 * PI * f
}

/// `2π × f kHz` expressed in rad/µs.
pub fn khz(f: f64) -> f64 {
    2.0 * PI * f * 1e-3
}

/// Inverse of [`mhz`].
pub fn to_mhz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}
