//! Closed-form and numerically integrated error, shortage and efficiency expressions.

pub mod cim;
pub mod mdcsk;
pub mod mixture;
pub mod quadrature;
pub mod special;
pub mod system;

pub use cim::{cim_ber_mixture, cim_bit_factor, cim_ser_conditional, CimNoiseGeometry};
pub use mdcsk::{
    mdcsk_ber_abc_mixture, mdcsk_ber_closed_mixture, mdcsk_ber_conditional, mdcsk_ber_mixture,
    mdcsk_gamma, mdcsk_prefactor, LinearAnchor, MdcskGeometry,
};
pub use mixture::{mixture_coefficients, FadingMixture};
pub use special::q;
pub use system::{
    cim_ber, combine, energy_efficiency, energy_efficiency_conv, mdcsk_ber_closed,
    mdcsk_ber_integral, mean_harvested_power, shortage_gain_threshold, shortage_probability,
    shortage_probability_mixture, spectral_efficiency, spectral_efficiency_ci, system_ber,
    system_ber_mixture, theory_mixture, ShortageMode, TheoryOptions, TheoryPoint,
};
