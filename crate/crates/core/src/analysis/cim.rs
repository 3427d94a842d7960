//! Error probability of the code-index (Walsh row) decision.

use crate::analysis::mixture::FadingMixture;
use crate::analysis::quadrature::{integrate_decaying, QuadOptions};
use crate::analysis::special::{binomial, clamp_probability};
use crate::error::Result;
use crate::params::SystemParams;

/// Moments of the matched and unmatched energy metrics, in units where `N0 = 1`
/// and the per-bit SNR is `gamma_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CimNoiseGeometry {
    pub gamma1: f64,
    pub eta1: f64,
    pub mu1: f64,
    pub sigma1_sq: f64,
    pub mu2: f64,
    pub sigma2_sq: f64,
}

impl CimNoiseGeometry {
    pub fn new(gamma_b: f64, params: &SystemParams) -> Self {
        let k = params.bits_per_frame() as f64;
        let (n, beta, phi) = (params.n as f64, params.beta as f64, params.phi);
        // E1 * sum(alpha^2) / N_t = K gamma_b / (2N) with N0 = 1
        let s = k * gamma_b / (2.0 * n);
        let mu2 = beta * n / 2.0;
        let sigma2_sq = beta * n * n / 2.0;
        let mu1 = phi * n * n * s + mu2;
        let sigma1_sq = 2.0 * phi * n.powi(3) * s + sigma2_sq;
        CimNoiseGeometry {
            gamma1: phi * k * gamma_b / (4.0 * phi * k * gamma_b + 2.0 * beta).sqrt(),
            eta1: 1.0 / (2.0 * phi * k * gamma_b / beta + 1.0).sqrt(),
            mu1,
            sigma1_sq,
            mu2,
            sigma2_sq,
        }
    }
}

/// Symbol error probability of the code index at instantaneous SNR `gamma_b`,
/// in the Taylor-bounded closed form.
pub fn cim_ser_conditional(gamma_b: f64, params: &SystemParams) -> f64 {
    let g = CimNoiseGeometry::new(gamma_b, params);
    let (g1, e1) = (g.gamma1, g.eta1);
    let n = params.n;
    let sum: f64 = (1..n)
        .map(|i| {
            let nf = i as f64;
            (-0.5f64).powi(i as i32 + 1) * binomial(n - 1, i) * e1 / (nf + e1)
                * (-(nf + e1 - e1 * e1) * g1 * g1 / (2.0 * (nf + e1))).exp()
        })
        .sum();
    clamp_probability(sum, "code-index SER").0
}

/// `N / (2 (N - 1))`, converting code-index symbol errors to bit errors.
pub fn cim_bit_factor(n: usize) -> f64 {
    n as f64 / (2.0 * (n as f64 - 1.0))
}

/// Average code-index bit error probability over the fading mixture at
/// `params.ebn0_db`. Returns the value and whether clamping was needed.
pub fn cim_ber_mixture(mixture: &FadingMixture, params: &SystemParams) -> Result<(f64, bool)> {
    let snr = params.ebn0_linear();
    if snr == f64::INFINITY {
        return Ok((0.0, false));
    }
    let avg = integrate_decaying(
        |x| cim_ser_conditional(x * snr, params) * mixture.pdf(x),
        mixture.max_mean(),
        QuadOptions::default(),
    )?;
    Ok(clamp_probability(
        cim_bit_factor(params.n) * avg.value,
        "code-index BER",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize) -> SystemParams {
        SystemParams {
            n,
            m: 4,
            phi: 0.5,
            beta: 160,
            ..Default::default()
        }
    }

    #[test]
    fn zero_snr_value() {
        // eta1 = 1, gamma1 = 0: sum (-1/2)^(n+1) C(N-1, n) / (n + 1)
        assert!((cim_ser_conditional(0.0, &p(2)) - 0.125).abs() < 1e-15);
        let expect = 0.25 * 3.0 / 2.0 - 0.125 * 3.0 / 3.0 + 0.0625 / 4.0;
        assert!((cim_ser_conditional(0.0, &p(4)) - expect).abs() < 1e-15);
    }

    #[test]
    fn vanishes_at_high_snr() {
        assert!(cim_ser_conditional(1e6, &p(4)) < 1e-300);
        let mut prev = 1.0;
        for g in [0.0, 0.5, 2.0, 10.0, 50.0, 200.0] {
            let v = cim_ser_conditional(g, &p(8));
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn geometry_ratios() {
        let params = p(4);
        let g = CimNoiseGeometry::new(37.0, &params);
        assert!(((g.mu1 - g.mu2) / g.sigma1_sq.sqrt() - g.gamma1).abs() < 1e-12);
        assert!(((g.sigma2_sq / g.sigma1_sq).sqrt() - g.eta1).abs() < 1e-12);
        assert!(g.eta1 > 0.0 && g.eta1 <= 1.0);
    }

    #[test]
    fn bit_factor() {
        assert_eq!(cim_bit_factor(2), 1.0);
        assert!((cim_bit_factor(4) - 2.0 / 3.0).abs() < 1e-15);
    }
}
