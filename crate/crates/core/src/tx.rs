//! Transmitter: bit framing and baseband chip assembly.
//!
//! Every antenna sends the same frame. On subcarrier `i` of antenna `t` the
//! reference branch carries `w[S0][i] * c_x(t)` and the data branch carries
//! `a * c_x(t) + b * c_y(t)` for the constellation point `(a, b)` of `S_i`.
//! Both branches are scaled by `1/sqrt(N_t)`.

use crate::chaos::ChipSequence;
use crate::constellation::{gray_decode, gray_encode, Constellation};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::walsh::WalshMatrix;

/// Information carried by one frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameSymbols {
    /// Code index, selects Walsh row `s0`.
    pub s0: usize,
    /// One constellation index per subcarrier.
    pub s: Vec<usize>,
}

fn read_msb_first(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

fn write_msb_first(value: usize, width: usize, out: &mut Vec<bool>) {
    for shift in (0..width).rev() {
        out.push((value >> shift) & 1 == 1);
    }
}

/// Splits a frame of `log2 N + N log2 M` bits into the code index (natural
/// binary) and N Gray-labelled constellation indices.
pub fn bits_to_symbols(bits: &[bool], params: &SystemParams) -> Result<FrameSymbols> {
    let expected = params.bits_per_frame();
    if bits.len() != expected {
        return Err(Error::Framing(format!(
            "expected {expected} bits per frame, got {}",
            bits.len()
        )));
    }
    let (head, tail) = bits.split_at(params.cim_bits());
    let k = params.symbol_bits();
    let s0 = read_msb_first(head);
    let s = tail
        .chunks(k)
        .map(|g| gray_decode(read_msb_first(g)))
        .collect();
    Ok(FrameSymbols { s0, s })
}

/// Inverse of [`bits_to_symbols`].
pub fn symbols_to_bits(sym: &FrameSymbols, params: &SystemParams) -> Result<Vec<bool>> {
    if sym.s0 >= params.n {
        return Err(Error::Framing(format!(
            "code index {} out of range 0..{}",
            sym.s0, params.n
        )));
    }
    if sym.s.len() != params.n {
        return Err(Error::Framing(format!(
            "expected {} data symbols, got {}",
            params.n,
            sym.s.len()
        )));
    }
    if let Some(bad) = sym.s.iter().find(|&&v| v >= params.m) {
        return Err(Error::Framing(format!(
            "data symbol {bad} out of range 0..{}",
            params.m
        )));
    }
    let mut bits = Vec::with_capacity(params.bits_per_frame());
    write_msb_first(sym.s0, params.cim_bits(), &mut bits);
    for &v in &sym.s {
        write_msb_first(gray_encode(v), params.symbol_bits(), &mut bits);
    }
    Ok(bits)
}

/// Baseband chips of one frame for every antenna and subcarrier.
#[derive(Debug, Clone, PartialEq)]
pub struct TxFrame {
    nt: usize,
    n: usize,
    beta: usize,
    reference: Vec<f64>,
    data: Vec<f64>,
}

impl TxFrame {
    pub fn zeros(nt: usize, n: usize, beta: usize) -> Self {
        TxFrame {
            nt,
            n,
            beta,
            reference: vec![0.0; nt * n * beta],
            data: vec![0.0; nt * n * beta],
        }
    }

    pub fn antennas(&self) -> usize {
        self.nt
    }

    pub fn subcarriers(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> usize {
        self.beta
    }

    fn range(&self, antenna: usize, sub: usize) -> std::ops::Range<usize> {
        let start = (antenna * self.n + sub) * self.beta;
        start..start + self.beta
    }

    /// Reference (Walsh-coded) branch of `antenna` on subcarrier `sub`.
    pub fn reference(&self, antenna: usize, sub: usize) -> &[f64] {
        &self.reference[self.range(antenna, sub)]
    }

    /// Data (M-DCSK) branch of `antenna` on subcarrier `sub`.
    pub fn data(&self, antenna: usize, sub: usize) -> &[f64] {
        &self.data[self.range(antenna, sub)]
    }

    pub fn reference_mut(&mut self, antenna: usize, sub: usize) -> &mut [f64] {
        let r = self.range(antenna, sub);
        &mut self.reference[r]
    }

    pub fn data_mut(&mut self, antenna: usize, sub: usize) -> &mut [f64] {
        let r = self.range(antenna, sub);
        &mut self.data[r]
    }

    /// Sum of squared chips over antennas, subcarriers and both branches.
    pub fn energy(&self) -> f64 {
        self.reference.iter().chain(&self.data).map(|c| c * c).sum()
    }

    pub fn antenna_energy(&self, antenna: usize) -> f64 {
        (0..self.n)
            .map(|i| {
                self.reference(antenna, i)
                    .iter()
                    .chain(self.data(antenna, i))
                    .map(|c| c * c)
                    .sum::<f64>()
            })
            .sum()
    }
}

/// Assembles the chip matrix for one frame.
pub fn modulate(
    sym: &FrameSymbols,
    sequences: &[ChipSequence],
    walsh: &WalshMatrix,
    constellation: &Constellation,
    params: &SystemParams,
) -> Result<TxFrame> {
    let (nt, n, beta) = (params.nt, params.n, params.beta);
    if sequences.len() != nt {
        return Err(Error::Config(format!(
            "{} chip sequences for {nt} antennas",
            sequences.len()
        )));
    }
    if let Some(bad) = sequences
        .iter()
        .find(|s| s.len() != beta || s.quadrature.len() != beta)
    {
        return Err(Error::Config(format!(
            "chip sequence of length {} for beta {beta}",
            bad.len()
        )));
    }
    if walsh.order() != n {
        return Err(Error::Config(format!(
            "Walsh order {} for {n} subcarriers",
            walsh.order()
        )));
    }
    if constellation.order() != params.m {
        return Err(Error::Config(format!(
            "constellation order {} for M = {}",
            constellation.order(),
            params.m
        )));
    }
    if sym.s0 >= n || sym.s.len() != n || sym.s.iter().any(|&v| v >= params.m) {
        return Err(Error::Config(format!(
            "frame symbols out of range: {sym:?}"
        )));
    }

    let scale = 1.0 / (nt as f64).sqrt();
    let code = walsh.row(sym.s0);
    let mut frame = TxFrame::zeros(nt, n, beta);
    for (t, seq) in sequences.iter().enumerate() {
        for i in 0..n {
            let w = code[i] as f64 * scale;
            for (r, &c) in frame.reference_mut(t, i).iter_mut().zip(&seq.inphase) {
                *r = w * c;
            }
            let (a, b) = constellation.point(sym.s[i]);
            let (a, b) = (a * scale, b * scale);
            for ((d, &cx), &cy) in frame
                .data_mut(t, i)
                .iter_mut()
                .zip(&seq.inphase)
                .zip(&seq.quadrature)
            {
                *d = a * cx + b * cy;
            }
        }
    }
    Ok(frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::{generate_sequence, ChaoticMap, MapKind};
    use crate::constellation::constellation;
    use crate::walsh::walsh;
    use proptest::prelude::*;

    fn params(n: usize, m: usize, nt: usize) -> SystemParams {
        SystemParams {
            n,
            m,
            nt,
            ..Default::default()
        }
    }

    fn sequences(nt: usize, beta: usize) -> Vec<ChipSequence> {
        (0..nt)
            .map(|t| {
                generate_sequence(&ChaoticMap::for_antenna(MapKind::Logistic, t), beta).unwrap()
            })
            .collect()
    }

    #[test]
    fn all_zero_bits() {
        let p = params(4, 4, 1);
        let sym = bits_to_symbols(&[false; 10], &p).unwrap();
        assert_eq!(
            sym,
            FrameSymbols {
                s0: 0,
                s: vec![0; 4]
            }
        );
        assert_eq!(symbols_to_bits(&sym, &p).unwrap(), vec![false; 10]);
    }

    #[test]
    fn leading_ones_select_last_walsh_row() {
        let p = params(4, 4, 1);
        let mut bits = vec![false; 10];
        bits[0] = true;
        bits[1] = true;
        assert_eq!(bits_to_symbols(&bits, &p).unwrap().s0, 3);
        // Gray label 11 is index 2
        bits[2] = true;
        bits[3] = true;
        assert_eq!(bits_to_symbols(&bits, &p).unwrap().s[0], 2);
    }

    #[test]
    fn frame_lengths() {
        let p = params(8, 8, 1);
        assert!(bits_to_symbols(&[true; 27], &p).is_ok());
        assert!(matches!(
            bits_to_symbols(&[true; 26], &p),
            Err(Error::Framing(_))
        ));
    }

    #[test]
    fn exhaustive_round_trip() {
        let p = params(4, 4, 1);
        for v in 0..(1usize << 10) {
            let bits: Vec<bool> = (0..10).map(|k| (v >> (9 - k)) & 1 == 1).collect();
            let sym = bits_to_symbols(&bits, &p).unwrap();
            assert_eq!(symbols_to_bits(&sym, &p).unwrap(), bits);
        }
    }

    #[test]
    fn malformed_symbols() {
        let p = params(4, 4, 1);
        assert!(symbols_to_bits(
            &FrameSymbols {
                s0: 4,
                s: vec![0; 4]
            },
            &p
        )
        .is_err());
        assert!(symbols_to_bits(
            &FrameSymbols {
                s0: 0,
                s: vec![0, 0, 4, 0]
            },
            &p
        )
        .is_err());
        assert!(symbols_to_bits(
            &FrameSymbols {
                s0: 0,
                s: vec![0; 3]
            },
            &p
        )
        .is_err());
    }

    #[test]
    fn reference_branch_uses_first_walsh_row() {
        let p = params(2, 4, 1);
        let seqs = sequences(1, 160);
        let sym = FrameSymbols {
            s0: 0,
            s: vec![1, 3],
        };
        let f = modulate(
            &sym,
            &seqs,
            &walsh(2).unwrap(),
            &constellation(4).unwrap(),
            &p,
        )
        .unwrap();
        for i in 0..2 {
            assert_eq!(f.reference(0, i), seqs[0].inphase.as_slice());
        }
    }

    #[test]
    fn zero_angle_point_sends_inphase_chips() {
        let p = params(4, 4, 2);
        let seqs = sequences(2, 160);
        let sym = FrameSymbols {
            s0: 2,
            s: vec![0; 4],
        };
        let f = modulate(
            &sym,
            &seqs,
            &walsh(4).unwrap(),
            &constellation(4).unwrap(),
            &p,
        )
        .unwrap();
        let s = 1.0 / 2f64.sqrt();
        for t in 0..2 {
            for (d, c) in f.data(t, 1).iter().zip(&seqs[t].inphase) {
                assert_eq!(*d, c * s);
            }
        }
    }

    #[test]
    fn antenna_scaling() {
        let seqs = sequences(4, 160);
        let sym = FrameSymbols {
            s0: 1,
            s: vec![0, 1, 2, 3],
        };
        let w = walsh(4).unwrap();
        let c = constellation(4).unwrap();
        let one = modulate(&sym, &seqs[..1], &w, &c, &params(4, 4, 1)).unwrap();
        let four = modulate(&sym, &seqs, &w, &c, &params(4, 4, 4)).unwrap();
        assert!((four.antenna_energy(0) - one.antenna_energy(0) / 4.0).abs() < 1e-9);
        // total energy is independent of the antenna count up to sequence energies
        let e_seq: f64 = seqs.iter().map(|s| s.energy).sum::<f64>() / 4.0;
        assert!((four.energy() - 2.0 * 4.0 * e_seq).abs() / four.energy() < 0.05);
    }

    #[test]
    fn frame_energy_matches_budget() {
        let p = params(8, 8, 2);
        let seqs = sequences(2, 160);
        let sym = FrameSymbols {
            s0: 5,
            s: vec![0, 1, 2, 3, 4, 5, 6, 7],
        };
        let f = modulate(
            &sym,
            &seqs,
            &walsh(8).unwrap(),
            &constellation(8).unwrap(),
            &p,
        )
        .unwrap();
        let e1 = seqs.iter().map(|s| s.energy).sum::<f64>() / 2.0;
        assert!((f.energy() - 2.0 * 8.0 * e1).abs() / (2.0 * 8.0 * e1) < 0.05);
    }

    #[test]
    fn dimension_mismatch() {
        let p = params(4, 4, 2);
        let sym = FrameSymbols {
            s0: 0,
            s: vec![0; 4],
        };
        let err = modulate(
            &sym,
            &sequences(1, 160),
            &walsh(4).unwrap(),
            &constellation(4).unwrap(),
            &p,
        );
        assert!(matches!(err, Err(Error::Config(_))));
        let err = modulate(
            &sym,
            &sequences(2, 160),
            &walsh(8).unwrap(),
            &constellation(4).unwrap(),
            &p,
        );
        assert!(matches!(err, Err(Error::Config(_))));
    }

    proptest! {
        #[test]
        fn data_branch_is_linear_in_the_point(s in 0usize..8, seed in 0.05f64..0.95) {
            let p = params(2, 8, 1);
            let seq = vec![generate_sequence(&ChaoticMap::new(MapKind::Logistic, seed).unwrap(), 32).unwrap()];
            let p = SystemParams { beta: 32, ..p };
            let c = constellation(8).unwrap();
            let w = walsh(2).unwrap();
            let f = modulate(&FrameSymbols { s0: 0, s: vec![s, 0] }, &seq, &w, &c, &p).unwrap();
            let theta = c.angle(s);
            for k in 0..32 {
                let expect = theta.cos() * seq[0].inphase[k] + theta.sin() * seq[0].quadrature[k];
                prop_assert!((f.data(0, 0)[k] - expect).abs() < 1e-12);
            }
        }

        #[test]
        fn bits_round_trip(n_pow in 1u32..5, m_pow in 1u32..5, raw in proptest::collection::vec(any::<bool>(), 80)) {
            let p = params(1 << n_pow, 1 << m_pow, 1);
            let bits = &raw[..p.bits_per_frame().min(80)];
            prop_assume!(bits.len() == p.bits_per_frame());
            let sym = bits_to_symbols(bits, &p).unwrap();
            prop_assert_eq!(symbols_to_bits(&sym, &p).unwrap(), bits.to_vec());
        }
    }
}
