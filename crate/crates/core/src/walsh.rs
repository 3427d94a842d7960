//! Sylvester-Hadamard (Walsh) code matrices.

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 64;

/// Square `{+1, -1}` matrix with mutually orthogonal rows. Row 0 is all `+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalshMatrix {
    order: usize,
    entries: Vec<i8>,
}

impl WalshMatrix {
    /// Sylvester construction; accepts any power of two including 1.
    pub(crate) fn sylvester(order: usize) -> Self {
        debug_assert!(order.is_power_of_two());
        let mut entries = vec![1i8];
        let mut size = 1;
        while size < order {
            let next = size * 2;
            let mut grown = vec![0i8; next * next];
            for r in 0..size {
                for c in 0..size {
                    let v = entries[r * size + c];
                    grown[r * next + c] = v;
                    grown[r * next + c + size] = v;
                    grown[(r + size) * next + c] = v;
                    grown[(r + size) * next + c + size] = -v;
                }
            }
            entries = grown;
            size = next;
        }
        WalshMatrix { order, entries }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn row(&self, j: usize) -> &[i8] {
        &self.entries[j * self.order..(j + 1) * self.order]
    }

    pub fn get(&self, j: usize, i: usize) -> i8 {
        self.entries[j * self.order + i]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i8]> {
        self.entries.chunks(self.order)
    }
}

/// Walsh matrix of the given order (a power of two in `2..=64`).
pub fn walsh(order: usize) -> Result<WalshMatrix> {
    if !order.is_power_of_two() || !(2..=MAX_ORDER).contains(&order) {
        return Err(Error::Config(format!(
            "Walsh order must be a power of two in 2..={MAX_ORDER}, got {order}"
        )));
    }
    Ok(WalshMatrix::sylvester(order))
}
