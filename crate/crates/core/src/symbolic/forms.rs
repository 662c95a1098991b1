//! Affine forms over the eight `κ_{yx.w}` cells.

use std::ops::{Add, Mul, Sub};

use super::KappaIntervals;
use crate::tables::cell_index;

/// `Σ coef[i] κ_i + constant`, with `κ` indexed by `cell_index`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaForm {
    pub coef: [f64; 8],
    pub constant: f64,
}

impl KappaForm {
    pub fn constant(v: f64) -> Self {
        Self {
            coef: [0.0; 8],
            constant: v,
        }
    }

    pub fn kappa(y: usize, x: usize, w: usize) -> Self {
        let mut f = Self::constant(0.0);
        f.coef[cell_index(y, x, w)] = 1.0;
        f
    }

    /// `χ_{x.w} = κ_{0x.w} + κ_{1x.w}`.
    pub fn chi(x: usize, w: usize) -> Self {
        Self::kappa(0, x, w) + Self::kappa(1, x, w)
    }

    /// `self / d`, or `None` when `d ≤ tol`.
    pub fn div(self, d: f64, tol: f64) -> Option<Self> {
        (d > tol).then(|| self * d.recip())
    }

    pub fn eval(&self, kappa: &[f64; 8]) -> f64 {
        self.constant + self.coef.iter().zip(kappa).map(|(c, k)| c * k).sum::<f64>()
    }

    /// Smallest value over the `κ` box.
    pub fn min_over(&self, k: &KappaIntervals) -> f64 {
        self.constant
            + (0..8)
                .map(|i| {
                    let c = self.coef[i];
                    if c >= 0.0 { c * k.lower[i] } else { c * k.upper[i] }
                })
                .sum::<f64>()
    }

    /// Largest value over the `κ` box.
    pub fn max_over(&self, k: &KappaIntervals) -> f64 {
        self.constant
            + (0..8)
                .map(|i| {
                    let c = self.coef[i];
                    if c >= 0.0 { c * k.upper[i] } else { c * k.lower[i] }
                })
                .sum::<f64>()
    }
}

impl Add for KappaForm {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.coef.iter_mut().zip(rhs.coef) {
            *a += b;
        }
        self.constant += rhs.constant;
        self
    }
}

impl Sub for KappaForm {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + rhs * -1.0
    }
}

impl Mul<f64> for KappaForm {
    type Output = Self;
    fn mul(mut self, s: f64) -> Self {
        self.coef.iter_mut().for_each(|c| *c *= s);
        self.constant *= s;
        self
    }
}
