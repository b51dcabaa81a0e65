//! Bessel functions of real order: J, Y, H^(1,2) for real argument, I for
//! complex argument, and the oscillatory amplitude pair a_±.

mod amplitude;
mod gamma;
mod bessel_i;
mod bessel_j;

pub use amplitude::{smooth_step, AmplitudePair};
pub use bessel_i::{
    bessel_i, bessel_i_asymptotic_scaled, bessel_i_scaled, bessel_i_seq_scaled,
    bessel_i_series_scaled, bessel_i_tail_bound_ln,
};
pub use bessel_j::{
    bessel_j, bessel_j_asymptotic, bessel_j_series, bessel_j_seq, bessel_jy, bessel_y,
    bessel_y_reflection, hankel_h, BesselJY,
};
pub use gamma::{gamma, ln_gamma};

use crate::{Error, Result};

/// Nonnegative real Bessel order.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, serde::Serialize, serde::Deserialize)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu < 0.0 {
            return Err(Error::Domain(format!("Bessel order must be finite and >= 0, got {nu}")));
        }
        Ok(BesselOrder(nu))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Which Hankel function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HankelKind {
    First,
    Second,
}
