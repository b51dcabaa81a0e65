use std::f64::consts::PI;

use num_complex::Complex64;

use super::bessel_j::{bessel_j, hankel_h};
use super::HankelKind;

/// Smooth splitting of 2π·J_0(r) into outgoing and incoming oscillations,
/// a_+(r)e^{ir} + a_-(r)e^{-ir} = 2π·J_0(r).
///
/// For r ≥ `blend_point` the pair is π·H_0^{(1,2)}(r)e^{∓ir}; below
/// `blend_point/2` the incoming part vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePair {
    pub blend_point: f64,
}

impl Default for AmplitudePair {
    fn default() -> Self {
        AmplitudePair { blend_point: 1.0 }
    }
}

/// C^∞ step: 0 for u ≤ 0, 1 for u ≥ 1.
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / u).exp();
    let b = (-1.0 / (1.0 - u)).exp();
    a / (a + b)
}

impl AmplitudePair {
    fn blend(&self, r: f64) -> f64 {
        let lo = 0.5 * self.blend_point;
        smooth_step((r - lo) / (self.blend_point - lo))
    }

    pub fn a_minus(&self, r: f64) -> Complex64 {
        let chi = self.blend(r);
        if chi == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let h2 = hankel_h(HankelKind::Second, 0.0, r).expect("r > 0 on the blend support");
        h2 * Complex64::new(0.0, r).exp() * (PI * chi)
    }

    pub fn a_plus(&self, r: f64) -> Complex64 {
        let chi = self.blend(r);
        if chi == 1.0 {
            let h1 = hankel_h(HankelKind::First, 0.0, r).expect("r > 0 past the blend point");
            return h1 * Complex64::new(0.0, -r).exp() * PI;
        }
        let j0 = bessel_j(0.0, r).expect("r >= 0");
        let rest = Complex64::new(2.0 * PI * j0, 0.0) - self.a_minus(r) * Complex64::new(0.0, -r).exp();
        rest * Complex64::new(0.0, -r).exp()
    }

    /// a_± at complex ζ with |ζ| large and |arg ζ| < π/2, from the Hankel
    /// expansion (the blend is identically 1 there). None if it does not
    /// reach double precision.
    pub fn asymptotic_complex(kind: HankelKind, zeta: Complex64) -> Option<Complex64> {
        if zeta.re <= 0.0 {
            return None;
        }
        let rot = match kind {
            HankelKind::First => Complex64::i(),
            HankelKind::Second => -Complex64::i(),
        };
        let step = rot / zeta;
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        let mut prev = f64::INFINITY;
        for k in 1..200 {
            let odd = (2 * k - 1) as f64;
            term = term * step * (-odd * odd / (8.0 * k as f64));
            let mag = term.norm();
            if mag > prev {
                return None;
            }
            sum += term;
            if mag < 1e-17 * sum.norm() {
                let lead = (Complex64::new(2.0 / PI, 0.0) / zeta).sqrt() * PI;
                let quarter = Complex64::new(0.0, -PI / 4.0) * rot.im;
                return Some(lead * quarter.exp() * sum);
            }
            prev = mag;
        }
        None
    }

    /// a_+(r)e^{ir} + a_-(r)e^{-ir}.
    pub fn recombine(&self, r: f64) -> Complex64 {
        self.a_plus(r) * Complex64::new(0.0, r).exp() + self.a_minus(r) * Complex64::new(0.0, -r).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_recombines_to_bessel() {
        let pair = AmplitudePair::default();
        for r in [0.0, 0.1, 0.6, 0.8, 1.0, 10.0, 100.0] {
            let want = 2.0 * PI * bessel_j(0.0, r).unwrap();
            assert!((pair.recombine(r) - want).norm() < 1e-10, "r={r}");
        }
        assert_eq!(pair.a_minus(0.5), Complex64::new(0.0, 0.0));
        for r in [30.0, 100.0] {
            let z = Complex64::new(r, 0.0);
            let p = AmplitudePair::asymptotic_complex(HankelKind::First, z).unwrap();
            let m = AmplitudePair::asymptotic_complex(HankelKind::Second, z).unwrap();
            assert!((p - pair.a_plus(r)).norm() < 1e-14 && (m - pair.a_minus(r)).norm() < 1e-14);
        }
        let a100 = pair.a_plus(100.0).norm();
        let lead = (2.0 * PI / 100.0).sqrt();
        assert!(a100 > 0.9 * lead && a100 < 1.1 * lead);
    }
}
