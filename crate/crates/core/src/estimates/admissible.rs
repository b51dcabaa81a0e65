use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Space-time exponents (q, p) with dispersion parameter η and regularity s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissiblePair {
    pub q: f64,
    pub p: f64,
    pub eta: f64,
    pub s: f64,
}

impl AdmissiblePair {
    /// Validated pair; s is fixed by the scaling relation.
    pub fn new(q: f64, p: f64, eta: f64) -> Result<Self> {
        match admissible(q, p, eta) {
            (true, Some(s)) => Ok(AdmissiblePair { q, p, eta, s }),
            _ => Err(Error::Parameter(format!("(q, p, η) = ({q}, {p}, {eta}) is not admissible"))),
        }
    }
}

/// Checks 2/q + (1+η)/p ≤ (1+η)/2 and returns s = (2+η)/2 − 1/q − (2+η)/p.
/// q may be infinite; p must be finite and both at least 2.
pub fn admissible(q: f64, p: f64, eta: f64) -> (bool, Option<f64>) {
    if !(q >= 2.0 && p >= 2.0 && p.is_finite() && (0.0..=1.0).contains(&eta)) {
        return (false, None);
    }
    let lhs = 2.0 / q + (1.0 + eta) / p;
    if lhs > 0.5 * (1.0 + eta) + 1e-14 {
        return (false, None);
    }
    (true, Some(0.5 * (2.0 + eta) - 1.0 / q - (2.0 + eta) / p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        for eta in [0.0, 0.5, 1.0] {
            let (ok, s) = admissible(f64::INFINITY, 2.0, eta);
            assert!(ok && s.unwrap().abs() < 1e-15);
        }
        let (ok, s) = admissible(4.0, 4.0, 1.0);
        assert!(ok && (s.unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(admissible(2.0, 4.0, 0.0), (false, None));
        assert!(AdmissiblePair::new(2.0, 4.0, 0.0).is_err());
    }
}
