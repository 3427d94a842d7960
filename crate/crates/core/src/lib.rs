//! Simulation and analysis of a code-index-modulated multicarrier M-ary DCSK
//! link with multiple transmit antennas and power-splitting energy harvesting.

pub mod analysis;
pub mod channel;
pub mod chaos;
pub mod constellation;
pub mod error;
pub mod harness;
pub mod hilbert;
pub mod params;
pub mod rx;
pub mod tx;
pub mod walsh;

pub use channel::{
    draw_realization, harvested_power, harvested_power_per_antenna, propagate, ChannelProfile,
    ChannelRealization, ChipHistory, Fading, PathSpec, ReceivedFrame,
};
pub use chaos::{generate_sequence, next_chip, ChaoticMap, ChaoticStream, ChipSequence, MapKind};
pub use constellation::{constellation, gray_decode, gray_encode, Constellation};
pub use error::{Error, Result};
pub use hilbert::{quadrature_companion, HilbertTransformer};
pub use params::SystemParams;
pub use rx::{
    check_shortage, cim_detect, demodulate_frame, mdcsk_decisions, mdcsk_detect, recover_reference,
    DecisionPair, Demodulation, Demodulator, EnergyMetrics, RecoveredReference, ReferenceMode,
    ShortageEvent,
};
pub use tx::{bits_to_symbols, modulate, symbols_to_bits, FrameSymbols, TxFrame};
pub use walsh::{walsh, WalshMatrix};
