//! Scalar special functions.

/// Gaussian tail probability `Q(x) = erfc(x / sqrt 2) / 2`.
pub fn q(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Binomial coefficient as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Clamps a probability into `[0, 1]`, logging when it had to move.
pub fn clamp_probability(value: f64, what: &str) -> (f64, bool) {
    if (0.0..=1.0).contains(&value) {
        (value, false)
    } else {
        log::warn!("{what} = {value:e} outside [0, 1]; clamped");
        (value.clamp(0.0, 1.0), true)
    }
}
