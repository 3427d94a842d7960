//! Shortage probability, composite system BER and efficiency metrics.

use serde::{Deserialize, Serialize};

use crate::analysis::cim::cim_ber_mixture;
use crate::analysis::mdcsk::{
    mdcsk_ber_abc_mixture, mdcsk_ber_closed_mixture, mdcsk_ber_mixture, LinearAnchor,
};
use crate::analysis::mixture::FadingMixture;
use crate::analysis::special::clamp_probability;
use crate::channel::ChannelProfile;
use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Error rate charged to bits of a frame that could not be decoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShortageMode {
    /// Every bit of a shorted frame is wrong.
    #[default]
    Paper,
    /// Shorted frames are guessed, so half of their bits are wrong.
    Half,
}

impl ShortageMode {
    pub fn error_rate(self) -> f64 {
        match self {
            ShortageMode::Paper => 1.0,
            ShortageMode::Half => 0.5,
        }
    }
}

impl std::fmt::Display for ShortageMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ShortageMode::Paper => "paper",
            ShortageMode::Half => "half",
        })
    }
}

impl std::str::FromStr for ShortageMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(ShortageMode::Paper),
            "half" => Ok(ShortageMode::Half),
            other => Err(Error::Parse(format!("unknown shortage mode '{other}'"))),
        }
    }
}

/// Knobs of the theory evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryOptions {
    pub anchor: LinearAnchor,
    pub shortage_mode: ShortageMode,
    /// Relative separation applied to coincident path means; `None` rejects them.
    pub jitter: Option<f64>,
    /// Drop the shortage term entirely (no-harvesting baseline).
    pub shortage_enabled: bool,
}

impl Default for TheoryOptions {
    fn default() -> Self {
        TheoryOptions {
            anchor: LinearAnchor::Tangent,
            shortage_mode: ShortageMode::Paper,
            jitter: None,
            shortage_enabled: true,
        }
    }
}

/// All analytical quantities at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryPoint {
    pub ebn0_db: f64,
    pub p_shr: f64,
    pub p_b_cim: f64,
    pub p_b_mdcsk_integral: f64,
    pub p_b_mdcsk_closed: f64,
    /// Fading average of the curve the closed form linearizes.
    pub p_b_mdcsk_abc: f64,
    /// Bit error probability of a decoded frame.
    pub p_b: f64,
    pub p_sys: f64,
    pub se: f64,
    pub ee: f64,
    pub ee_conv: f64,
    /// Mean harvested power.
    pub harvest: f64,
    /// Some probability had to be clamped into `[0, 1]`.
    pub clamped: bool,
}

/// Mixture of `(1/N_t) sum alpha^2` for the first `params.nt` antennas of `profile`.
pub fn theory_mixture(
    profile: &ChannelProfile,
    params: &SystemParams,
    jitter: Option<f64>,
) -> Result<FadingMixture> {
    let profile = profile.truncated(params.nt)?;
    match jitter {
        Some(rel) => FadingMixture::from_profile_jittered(&profile, rel),
        None => FadingMixture::from_profile(&profile),
    }
}

/// Normalized-gain level below which the harvester falls short of `P_R`.
pub fn shortage_gain_threshold(params: &SystemParams, e1: f64) -> f64 {
    params.p_r / (2.0 * params.n as f64 * e1 * params.lambda * (1.0 - params.phi))
}

pub fn shortage_probability_mixture(
    mixture: &FadingMixture,
    params: &SystemParams,
    e1: f64,
) -> f64 {
    if params.p_r <= 0.0 {
        return 0.0;
    }
    if params.phi >= 1.0 || params.lambda <= 0.0 || e1 <= 0.0 {
        return 1.0;
    }
    mixture.cdf(shortage_gain_threshold(params, e1))
}

/// `Pr{P_h < P_R}` for Rayleigh taps with the profile's mean powers.
pub fn shortage_probability(
    profile: &ChannelProfile,
    params: &SystemParams,
    e1: f64,
) -> Result<f64> {
    Ok(shortage_probability_mixture(
        &theory_mixture(profile, params, None)?,
        params,
        e1,
    ))
}

pub fn cim_ber(profile: &ChannelProfile, params: &SystemParams) -> Result<f64> {
    Ok(cim_ber_mixture(&theory_mixture(profile, params, None)?, params)?.0)
}

pub fn mdcsk_ber_integral(profile: &ChannelProfile, params: &SystemParams) -> Result<f64> {
    Ok(mdcsk_ber_mixture(&theory_mixture(profile, params, None)?, params)?.0)
}

pub fn mdcsk_ber_closed(
    profile: &ChannelProfile,
    params: &SystemParams,
    anchor: LinearAnchor,
) -> Result<f64> {
    Ok(mdcsk_ber_closed_mixture(&theory_mixture(profile, params, None)?, params, anchor)?.0)
}

/// `(log2 N + N log2 M) / N`
pub fn spectral_efficiency(params: &SystemParams) -> f64 {
    params.bits_per_frame() as f64 / params.n as f64
}

/// Spectral efficiency of the carrier-index DCSK comparator, `(log2 N + N - 1) / (N + 1)`.
pub fn spectral_efficiency_ci(n: usize) -> f64 {
    ((n as f64).log2() + n as f64 - 1.0) / (n as f64 + 1.0)
}

/// `(log2 N + N log2 M) / (N (2 N E1 + P_R - P_h))`
pub fn energy_efficiency(params: &SystemParams, e1: f64, p_h: f64) -> Result<f64> {
    let denom = 2.0 * params.n as f64 * e1 + params.p_r - p_h;
    if !(denom > 0.0) {
        return Err(Error::Domain(format!(
            "power budget {denom} is not positive"
        )));
    }
    Ok(params.bits_per_frame() as f64 / (params.n as f64 * denom))
}

/// Energy efficiency without harvesting credit.
pub fn energy_efficiency_conv(params: &SystemParams, e1: f64) -> Result<f64> {
    energy_efficiency(params, e1, 0.0)
}

/// Mean harvested power `2 N E1 lambda (1 - phi) E[(1/N_t) sum alpha^2]`.
pub fn mean_harvested_power(mixture: &FadingMixture, params: &SystemParams, e1: f64) -> f64 {
    2.0 * params.n as f64 * e1 * params.lambda * (1.0 - params.phi) * mixture.mean()
}

/// `P_sys = (1 - P_shr) P_b + P_shr * e` where `P_b` weights the code-index and
/// data-symbol error rates by their share of the frame bits.
pub fn combine(
    params: &SystemParams,
    p_shr: f64,
    p_cim: f64,
    p_mdcsk: f64,
    mode: ShortageMode,
) -> (f64, f64) {
    let p_b = params.cim_weight() * p_cim + params.mdcsk_weight() * p_mdcsk;
    (p_b, (1.0 - p_shr) * p_b + p_shr * mode.error_rate())
}

pub fn system_ber_mixture(
    mixture: &FadingMixture,
    params: &SystemParams,
    e1: f64,
    opts: &TheoryOptions,
) -> Result<TheoryPoint> {
    params.validate()?;
    let p_shr = if opts.shortage_enabled {
        shortage_probability_mixture(mixture, params, e1)
    } else {
        0.0
    };
    let (p_cim, c1) = cim_ber_mixture(mixture, params)?;
    let (p_md, c2) = mdcsk_ber_mixture(mixture, params)?;
    let (p_closed, c3) = mdcsk_ber_closed_mixture(mixture, params, opts.anchor)?;
    let p_abc = mdcsk_ber_abc_mixture(mixture, params)?;
    let (p_b, p_sys) = combine(params, p_shr, p_cim, p_md, opts.shortage_mode);
    let (p_sys, c4) = clamp_probability(p_sys, "system BER");
    let harvest = if opts.shortage_enabled {
        mean_harvested_power(mixture, params, e1)
    } else {
        0.0
    };
    Ok(TheoryPoint {
        ebn0_db: params.ebn0_db,
        p_shr,
        p_b_cim: p_cim,
        p_b_mdcsk_integral: p_md,
        p_b_mdcsk_closed: p_closed,
        p_b_mdcsk_abc: p_abc,
        p_b,
        p_sys,
        se: spectral_efficiency(params),
        ee: energy_efficiency(params, e1, harvest)?,
        ee_conv: energy_efficiency_conv(params, e1)?,
        harvest,
        clamped: c1 || c2 || c3 || c4,
    })
}

/// Every analytical quantity for the first `params.nt` antennas of `profile`.
pub fn system_ber(
    profile: &ChannelProfile,
    params: &SystemParams,
    e1: f64,
    opts: &TheoryOptions,
) -> Result<TheoryPoint> {
    let mixture = theory_mixture(profile, params, opts.jitter)?;
    system_ber_mixture(&mixture, params, e1, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig4(n: usize, m: usize, ebn0_db: f64) -> SystemParams {
        SystemParams {
            n,
            m,
            nt: 2,
            beta: 160,
            phi: 0.5,
            lambda: 0.5,
            p_r: 2.0 * n as f64 * 80.0 / 100.0,
            ebn0_db,
        }
    }

    #[test]
    fn combine_rules() {
        let p = fig4(4, 4, 20.0);
        let (pb, ps) = combine(&p, 0.0, 0.01, 0.01, ShortageMode::Paper);
        assert!((pb - 0.01).abs() < 1e-15 && (ps - 0.01).abs() < 1e-15);
        assert_eq!(combine(&p, 1.0, 0.2, 0.3, ShortageMode::Paper).1, 1.0);
        assert_eq!(combine(&p, 1.0, 0.2, 0.3, ShortageMode::Half).1, 0.5);
        assert!((p.cim_weight() - 0.2).abs() < 1e-15);
        assert!((p.mdcsk_weight() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn efficiency_values() {
        let p = fig4(4, 4, 20.0);
        assert_eq!(spectral_efficiency(&p), 2.5);
        assert_eq!(spectral_efficiency(&fig4(8, 8, 20.0)), 3.375);
        assert_eq!(spectral_efficiency_ci(4), 1.0);
        let conv = energy_efficiency_conv(&p, 80.0).unwrap();
        assert!((conv - 10.0 / (4.0 * 646.4)).abs() < 1e-15);
        assert!(energy_efficiency(&p, 80.0, 10.0).unwrap() > conv);
        assert!(energy_efficiency(&p, 80.0, 1e4).is_err());
    }

    #[test]
    fn shortage_edges() {
        let profile = ChannelProfile::table1();
        let p = SystemParams {
            p_r: 0.0,
            ..fig4(4, 4, 20.0)
        };
        assert_eq!(shortage_probability(&profile, &p, 80.0).unwrap(), 0.0);
        let p = SystemParams {
            phi: 1.0,
            ..fig4(4, 4, 20.0)
        };
        assert_eq!(shortage_probability(&profile, &p, 80.0).unwrap(), 1.0);
    }

    #[test]
    fn shortage_matches_product_of_ratios_form() {
        let profile = ChannelProfile::table1();
        for nt in 1..=4 {
            for phi in [0.3, 0.5, 0.8, 0.95] {
                let p = SystemParams {
                    nt,
                    phi,
                    ..fig4(4, 4, 20.0)
                };
                let mix = theory_mixture(&profile, &p, None).unwrap();
                let th = shortage_gain_threshold(&p, 80.0);
                let printed: f64 = mix
                    .means()
                    .iter()
                    .zip(mix.coefficients())
                    .map(|(x, nu)| nu * (1.0 - (-th / x).exp()))
                    .sum();
                let stable = shortage_probability(&profile, &p, 80.0).unwrap();
                // the printed sum cancels at the 1e-13 level
                assert!(
                    (printed - stable).abs() < 1e-12 + 1e-9 * stable,
                    "{nt} {phi}: {printed} {stable}"
                );
            }
        }
    }

    #[test]
    fn reference_values() {
        let profile = ChannelProfile::table1();
        let opts = TheoryOptions::default();
        let t = system_ber(&profile, &fig4(4, 4, 20.0), 80.0, &opts).unwrap();
        assert!((t.p_sys / 2.887e-3 - 1.0).abs() < 2e-3, "{}", t.p_sys);
        assert!((t.p_shr / 8.35e-7 - 1.0).abs() < 2e-3, "{}", t.p_shr);
        let t = system_ber(&profile, &fig4(8, 8, 25.0), 80.0, &opts).unwrap();
        assert!((t.p_sys / 1.896e-4 - 1.0).abs() < 2e-3, "{}", t.p_sys);
        assert!(!t.clamped);
    }

    #[test]
    fn monotone_in_snr_without_clamping() {
        let profile = ChannelProfile::table1();
        let opts = TheoryOptions::default();
        for (n, m) in [(4, 4), (8, 8)] {
            for nt in 1..=4 {
                let mut prev = 1.0;
                for db in 0..=30 {
                    let p = SystemParams {
                        nt,
                        ..fig4(n, m, db as f64)
                    };
                    let t = system_ber(&profile, &p, 80.0, &opts).unwrap();
                    assert!(!t.clamped);
                    assert!(t.p_sys <= prev + 1e-15, "{n} {m} {nt} {db}");
                    prev = t.p_sys;
                }
            }
        }
    }
}
