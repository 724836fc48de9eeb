// SPDX-License-Identifier: Apache-2.0
//! Unit conversions. Internally every rate is in rad/s and every time in seconds.

use std::f64::consts::TAU;

/// Frequency in MHz (cycles) to angular frequency in rad/s.
pub fn mhz(f: f64) -> f64 {
    TAU * f * 1e6
}

pub fn khz(f: f64) -> f64 {
    TAU * f * 1e3
}

pub fn hz(f: f64) -> f64 {
    TAU * f
}

/// Angular frequency in rad/s back to MHz.
pub fn to_mhz(w: f64) -> f64 {
    w / (TAU * 1e6)
}

pub fn us(t: f64) -> f64 {
    t * 1e-6
}

pub fn ns(t: f64) -> f64 {
    t * 1e-9
}

pub fn to_us(t: f64) -> f64 {
    t * 1e6
}

pub fn to_ns(t: f64) -> f64 {
    t * 1e9
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        assert!((to_mhz(mhz(-1.0)) + 1.0).abs() < 1e-15);
        assert!((to_ns(ns(50.0)) - 50.0).abs() < 1e-12);
        assert!((to_us(us(2.5)) - 2.5).abs() < 1e-15);
        assert!((khz(2.0) - mhz(0.002)).abs() < 1e-9);
    }
}
