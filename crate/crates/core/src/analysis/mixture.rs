//! Distribution of a sum of independent exponential variables with distinct means.
//!
//! The density has the closed form `sum_l nu_l / m_l * exp(-x / m_l)` with
//! product-of-ratios coefficients `nu_l`. Those coefficients alternate in sign
//! and grow quickly with the number of terms, so the closed form loses all
//! precision for small `x`, which is exactly the region that dominates error
//! rates at high SNR. Densities and distribution functions are therefore
//! evaluated by uniformization of the underlying pure-birth chain, a sum of
//! nonnegative terms. The closed forms remain available for comparison.

use crate::channel::ChannelProfile;
use crate::error::{Error, Result};

/// Relative gap below which two means are treated as equal.
pub const DEGENERACY_TOL: f64 = 1e-9;

// beyond this many uniformization steps the closed form is used instead
const MAX_STEPS: f64 = 20_000.0;

#[derive(Debug, Clone, PartialEq)]
pub struct FadingMixture {
    means: Vec<f64>,
    coefficients: Vec<f64>,
}

/// `nu_l = prod_{j != l} m_l / (m_l - m_j)`.
pub fn mixture_coefficients(means: &[f64]) -> Result<Vec<f64>> {
    check_means(means)?;
    Ok((0..means.len())
        .map(|l| {
            means
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != l)
                .map(|(_, &mj)| means[l] / (means[l] - mj))
                .product()
        })
        .collect())
}

fn check_means(means: &[f64]) -> Result<()> {
    if means.is_empty() {
        return Err(Error::Domain("mixture needs at least one mean".into()));
    }
    if let Some(bad) = means.iter().find(|m| !(**m > 0.0) || !m.is_finite()) {
        return Err(Error::Domain(format!(
            "mixture means must be positive, got {bad}"
        )));
    }
    for i in 0..means.len() {
        for j in i + 1..means.len() {
            let (a, b) = (means[i], means[j]);
            if (a - b).abs() <= DEGENERACY_TOL * a.max(b) {
                return Err(Error::Degenerate {
                    first: i,
                    second: j,
                    value: a,
                });
            }
        }
    }
    Ok(())
}

impl FadingMixture {
    pub fn new(means: Vec<f64>) -> Result<Self> {
        let coefficients = mixture_coefficients(&means)?;
        Ok(FadingMixture {
            means,
            coefficients,
        })
    }

    /// Mixture of the normalized channel gain `(1/N_t) sum alpha^2`. Zero-power
    /// paths never contribute and are dropped.
    pub fn from_profile(profile: &ChannelProfile) -> Result<Self> {
        Self::new(
            profile
                .harvest_means()
                .into_iter()
                .filter(|&m| m > 0.0)
                .collect(),
        )
    }

    /// Like [`FadingMixture::from_profile`] but separates equal means by a small
    /// deterministic relative offset.
    pub fn from_profile_jittered(profile: &ChannelProfile, rel: f64) -> Result<Self> {
        let mut means: Vec<f64> = profile
            .harvest_means()
            .into_iter()
            .filter(|&m| m > 0.0)
            .collect();
        for i in 0..means.len() {
            for j in 0..i {
                if (means[i] - means[j]).abs() <= rel * means[i].max(means[j]) {
                    means[i] *= 1.0 + rel * (i + 1) as f64;
                    break;
                }
            }
        }
        Self::new(means)
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.means.iter().sum()
    }

    pub fn max_mean(&self) -> f64 {
        self.means.iter().copied().fold(0.0, f64::max)
    }

    /// Same coefficients, means multiplied by `c` (the SNR-scale mixture).
    pub fn scaled(&self, c: f64) -> Self {
        FadingMixture {
            means: self.means.iter().map(|m| m * c).collect(),
            coefficients: self.coefficients.clone(),
        }
    }

    /// Closed-form density `sum nu_l / m_l exp(-x / m_l)`.
    pub fn pdf_closed(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        self.means
            .iter()
            .zip(&self.coefficients)
            .map(|(m, nu)| nu / m * (-x / m).exp())
            .sum()
    }

    /// Closed-form distribution function `sum nu_l (1 - exp(-x / m_l))`.
    pub fn cdf_closed(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.means
            .iter()
            .zip(&self.coefficients)
            .map(|(m, nu)| -nu * (-x / m).exp_m1())
            .sum()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        self.uniformized(x)
            .map_or_else(|| self.pdf_closed(x).max(0.0), |(pdf, _)| pdf)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.uniformized(x).map_or_else(
            || self.cdf_closed(x).clamp(0.0, 1.0),
            |(_, cdf)| cdf.min(1.0),
        )
    }

    // Pure-birth chain through the stages with rates 1/m_l, uniformized at the
    // largest rate q: the state after a Poisson(q x) number of jumps of the
    // substochastic matrix P = I + T/q. Returns (pdf, cdf).
    fn uniformized(&self, x: f64) -> Option<(f64, f64)> {
        let rates: Vec<f64> = self.means.iter().map(|m| 1.0 / m).collect();
        let q = rates.iter().copied().fold(0.0, f64::max);
        let u = q * x;
        let l = rates.len();
        let last_rate = rates[l - 1];
        if u > MAX_STEPS {
            return None;
        }
        if u == 0.0 {
            return Some((if l == 1 { last_rate } else { 0.0 }, 0.0));
        }
        let rho: Vec<f64> = rates.iter().map(|r| r / q).collect();
        let (lo, weights) = poisson_weights(u, l);

        // v[0..l] transient stages, v[l] absorbed
        let mut v = vec![0.0; l + 1];
        v[0] = 1.0;
        let (mut pdf, mut cdf) = (0.0, 0.0);
        for k in 0..lo + weights.len() {
            if k >= lo {
                let w = weights[k - lo];
                pdf += w * v[l - 1];
                cdf += w * v[l];
            }
            // one jump of the uniformized chain, in place from the back
            v[l] += rho[l - 1] * v[l - 1];
            for s in (1..l).rev() {
                v[s] = (1.0 - rho[s]) * v[s] + rho[s - 1] * v[s - 1];
            }
            v[0] *= 1.0 - rho[0];
        }
        Some((last_rate * pdf, cdf))
    }
}

// Poisson(u) probabilities on the range that matters for a chain with `stages`
// transient states, built by ratios outward from the mode and normalized by
// their own sum. Returns the first index and the weights.
fn poisson_weights(u: f64, stages: usize) -> (usize, Vec<f64>) {
    const CUT: f64 = 1e-20;
    let mode = u.floor() as usize;
    let mut down = Vec::new();
    let mut w = 1.0;
    let mut k = mode;
    while k > 0 {
        w *= k as f64 / u;
        if w < CUT {
            break;
        }
        down.push(w);
        k -= 1;
    }
    let lo = mode - down.len();
    let mut weights: Vec<f64> = down.into_iter().rev().collect();
    weights.push(1.0);
    // stages - 1 jumps are needed before any density appears
    let anchor = mode.max(stages - 1);
    let mut w = 1.0;
    let mut w_anchor = 1.0;
    let mut k = mode;
    loop {
        k += 1;
        w *= u / k as f64;
        if k == anchor {
            w_anchor = w;
        }
        if k > anchor && k > stages && (w < CUT * w_anchor || w == 0.0) {
            break;
        }
        weights.push(w);
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    (lo, weights)
}
