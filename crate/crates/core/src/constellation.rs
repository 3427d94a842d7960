//! M-ary DCSK constellation: M points on the unit circle.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    order: usize,
    points: Vec<(f64, f64)>,
}

impl Constellation {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.order.trailing_zeros() as usize
    }

    /// `(a_s, b_s)` for index `s`, the point at angle `2*pi*s/M`.
    pub fn point(&self, s: usize) -> (f64, f64) {
        self.points[s]
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn angle(&self, s: usize) -> f64 {
        2.0 * PI * s as f64 / self.order as f64
    }

    /// Index of the sector containing `angle`. Sector boundaries go to the
    /// smaller neighbouring index.
    pub fn nearest(&self, angle: f64) -> usize {
        let m = self.order as i64;
        let x = angle * self.order as f64 / (2.0 * PI) - 0.5;
        let upper = x.ceil();
        let s = if upper == x {
            // exactly on a boundary between x and x + 1
            let a = (x as i64).rem_euclid(m);
            let b = (x as i64 + 1).rem_euclid(m);
            a.min(b)
        } else {
            (upper as i64).rem_euclid(m)
        };
        s as usize
    }
}

/// Unit-circle constellation of order M in {2, 4, 8, 16}.
pub fn constellation(order: usize) -> Result<Constellation> {
    if !matches!(order, 2 | 4 | 8 | 16) {
        return Err(Error::Config(format!(
            "constellation order must be 2, 4, 8 or 16, got {order}"
        )));
    }
    let points = (0..order)
        .map(|s| {
            let theta = 2.0 * PI * s as f64 / order as f64;
            (theta.cos(), theta.sin())
        })
        .collect();
    Ok(Constellation { order, points })
}

/// Binary-reflected Gray label of index `s`.
pub fn gray_encode(s: usize) -> usize {
    s ^ (s >> 1)
}

/// Index whose Gray label is `g`.
pub fn gray_decode(mut g: usize) -> usize {
    let mut s = g;
    while g > 1 {
        g >>= 1;
        s ^= g;
    }
    s
}
