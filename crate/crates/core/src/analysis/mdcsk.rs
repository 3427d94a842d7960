//! Bit error probability of the differential M-ary data symbols.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::analysis::mixture::FadingMixture;
use crate::analysis::quadrature::{integrate_decaying, integrate_with_breaks, QuadOptions};
use crate::analysis::special::{clamp_probability, q};
use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Where the linear segment of the closed form meets the exact curve again.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinearAnchor {
    /// Zero crossing of the tangent at the origin, `x0 = N sqrt(2 pi beta) / A`.
    #[default]
    Tangent,
    /// The anchor as printed in the source derivation, `x0 = A / (4 N sqrt(2 pi beta))`.
    Printed,
}

impl std::str::FromStr for LinearAnchor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tangent" => Ok(LinearAnchor::Tangent),
            "printed" => Ok(LinearAnchor::Printed),
            other => Err(Error::Parse(format!("unknown anchor '{other}'"))),
        }
    }
}

/// Constants of the conditional error curve `Q(A x / sqrt(B x + C))` and of its
/// linearization `k x + 1/2` through `(x0, y0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MdcskGeometry {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub x0: f64,
    pub y0: f64,
    pub k: f64,
}

impl MdcskGeometry {
    pub fn new(params: &SystemParams, anchor: LinearAnchor) -> Self {
        let kb = params.bits_per_frame() as f64;
        let (n, beta, phi) = (params.n as f64, params.beta as f64, params.phi);
        let a = phi * kb * (PI / params.m as f64).sin();
        let b = 4.0 * phi * n * kb;
        let c = 4.0 * n * n * beta;
        let root = n * (2.0 * PI * beta).sqrt();
        let x0 = match anchor {
            LinearAnchor::Tangent => root / a,
            LinearAnchor::Printed => a / (4.0 * root),
        };
        let y0 = q(a * x0 / (b * x0 + c).sqrt());
        MdcskGeometry {
            a,
            b,
            c,
            x0,
            y0,
            k: (y0 - 0.5) / x0,
        }
    }

    /// `Q(A x / sqrt(B x + C))`
    pub fn curve(&self, gamma_b: f64) -> f64 {
        q(self.a * gamma_b / (self.b * gamma_b + self.c).sqrt())
    }

    /// Where the linear segment reaches zero.
    pub fn cutoff(&self) -> f64 {
        -0.5 / self.k
    }
}

/// `gamma = 2 phi K gamma_b / sqrt(2 phi N K gamma_b + N^2 beta)`
pub fn mdcsk_gamma(gamma_b: f64, params: &SystemParams) -> f64 {
    let kb = params.bits_per_frame() as f64;
    let (n, beta, phi) = (params.n as f64, params.beta as f64, params.phi);
    2.0 * phi * kb * gamma_b / (2.0 * phi * n * kb * gamma_b + n * n * beta).sqrt()
}

/// Symbol-to-bit prefactor. Binary DCSK has a single decision boundary, so its
/// symbol error is one tail rather than two.
pub fn mdcsk_prefactor(m: usize) -> f64 {
    if m == 2 {
        1.0
    } else {
        2.0 / (m as f64).log2()
    }
}

/// Conditional bit error at instantaneous SNR `gamma_b`.
pub fn mdcsk_ber_conditional(gamma_b: f64, params: &SystemParams) -> f64 {
    let s = (PI / params.m as f64).sin();
    mdcsk_prefactor(params.m) * q(mdcsk_gamma(gamma_b, params) * s / 2.0)
}

fn average<F: Fn(f64) -> f64>(mixture: &FadingMixture, f: F) -> Result<f64> {
    Ok(integrate_decaying(
        |x| f(x) * mixture.pdf(x),
        mixture.max_mean(),
        QuadOptions::default(),
    )?
    .value)
}

/// Fading-averaged data-bit error probability. Returns the value and whether
/// clamping was needed.
pub fn mdcsk_ber_mixture(mixture: &FadingMixture, params: &SystemParams) -> Result<(f64, bool)> {
    let snr = params.ebn0_linear();
    if snr == f64::INFINITY {
        return Ok((0.0, false));
    }
    let v = average(mixture, |x| mdcsk_ber_conditional(x * snr, params))?;
    Ok(clamp_probability(v, "data-symbol BER"))
}

/// Fading average of `prefactor * Q(A gamma_b / sqrt(B gamma_b + C))`, the
/// curve that the closed form linearizes.
pub fn mdcsk_ber_abc_mixture(mixture: &FadingMixture, params: &SystemParams) -> Result<f64> {
    let snr = params.ebn0_linear();
    if snr == f64::INFINITY {
        return Ok(0.0);
    }
    let g = MdcskGeometry::new(params, LinearAnchor::Tangent);
    let pre = mdcsk_prefactor(params.m);
    average(mixture, |x| pre * g.curve(x * snr))
}

/// Closed-form approximation
/// `prefactor * sum_l pi_l (k g_l (1 - exp(1 / (2 k g_l))) + 1/2)` with
/// `g_l` the per-path mean SNR.
///
/// When the alternating coefficients make the sum ill-conditioned the same
/// quantity, `E[(k gamma + 1/2) 1{gamma < -1/(2k)}]`, is integrated directly
/// against the stable mixture density.
pub fn mdcsk_ber_closed_mixture(
    mixture: &FadingMixture,
    params: &SystemParams,
    anchor: LinearAnchor,
) -> Result<(f64, bool)> {
    let snr = params.ebn0_linear();
    if snr == f64::INFINITY {
        return Ok((0.0, false));
    }
    let g = MdcskGeometry::new(params, anchor);
    let pre = mdcsk_prefactor(params.m);
    if snr == 0.0 {
        return Ok(clamp_probability(pre * 0.5, "closed-form BER"));
    }
    let k = g.k;
    let terms: Vec<f64> = mixture
        .means()
        .iter()
        .zip(mixture.coefficients())
        .map(|(m, pi)| {
            let gl = m * snr;
            pi * (-k * gl * (0.5 / (k * gl)).exp_m1() + 0.5)
        })
        .collect();
    let sum: f64 = terms.iter().sum();
    let spread: f64 = terms.iter().map(|t| t.abs()).sum();
    let value = if spread <= 1e6 * sum.abs() {
        sum
    } else {
        let cut = g.cutoff() / snr;
        let lin = |x: f64| (k * snr * x + 0.5) * mixture.pdf(x);
        let opts = QuadOptions {
            abs_tol: 1e-300,
            ..QuadOptions::default()
        };
        let points: Vec<f64> = std::iter::once(0.0)
            .chain((0..=30).rev().map(|j| cut * 0.5f64.powi(j)))
            .collect();
        integrate_with_breaks(lin, &points, opts)?.value
    };
    Ok(clamp_probability(pre * value, "closed-form BER"))
}
