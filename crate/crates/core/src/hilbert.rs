//! Block discrete Hilbert transform.
//!
//! The quadrature companion of a real block is obtained in the DFT domain:
//! positive-frequency bins are multiplied by `-j`, negative-frequency bins by
//! `+j`, and the DC and Nyquist bins are zeroed.

use std::sync::Arc;

use rustfft::{num_complex::Complex, Fft, FftPlanner};

use crate::error::{Error, Result};

/// Reusable transformer for one block length. Holds the FFT plans and a work
/// buffer, so repeated calls do not re-plan.
pub struct HilbertTransformer {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    buffer: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
}

impl std::fmt::Debug for HilbertTransformer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HilbertTransformer")
            .field("len", &self.len)
            .finish()
    }
}

impl Clone for HilbertTransformer {
    fn clone(&self) -> Self {
        // plans are shared, buffers are per instance
        HilbertTransformer {
            len: self.len,
            forward: Arc::clone(&self.forward),
            inverse: Arc::clone(&self.inverse),
            buffer: vec![Complex::default(); self.len],
            scratch: vec![Complex::default(); self.scratch.len()],
        }
    }
}

impl HilbertTransformer {
    pub fn new(len: usize) -> Result<Self> {
        if len < 8 || !len.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "quadrature companion needs an even block length >= 8, got {len}"
            )));
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Ok(HilbertTransformer {
            len,
            forward,
            inverse,
            buffer: vec![Complex::default(); len],
            scratch: vec![Complex::default(); scratch_len],
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Writes the quadrature companion of `input` into `output`.
    pub fn transform_into(&mut self, input: &[f64], output: &mut [f64]) -> Result<()> {
        if input.len() != self.len || output.len() != self.len {
            return Err(Error::Config(format!(
                "block length mismatch: transformer {}, input {}, output {}",
                self.len,
                input.len(),
                output.len()
            )));
        }
        for (b, &x) in self.buffer.iter_mut().zip(input) {
            *b = Complex::new(x, 0.0);
        }
        self.forward
            .process_with_scratch(&mut self.buffer, &mut self.scratch);

        let half = self.len / 2;
        self.buffer[0] = Complex::default();
        self.buffer[half] = Complex::default();
        for b in &mut self.buffer[1..half] {
            // times -j
            *b = Complex::new(b.im, -b.re);
        }
        for b in &mut self.buffer[half + 1..] {
            // times +j
            *b = Complex::new(-b.im, b.re);
        }

        self.inverse
            .process_with_scratch(&mut self.buffer, &mut self.scratch);
        let scale = 1.0 / self.len as f64;
        for (o, b) in output.iter_mut().zip(&self.buffer) {
            *o = b.re * scale;
        }
        Ok(())
    }

    pub fn transform(&mut self, input: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; input.len()];
        self.transform_into(input, &mut out)?;
        Ok(out)
    }
}

/// One-shot discrete Hilbert transform of an even-length block (length >= 8).
pub fn quadrature_companion(inphase: &[f64]) -> Result<Vec<f64>> {
    HilbertTransformer::new(inphase.len())?.transform(inphase)
}
