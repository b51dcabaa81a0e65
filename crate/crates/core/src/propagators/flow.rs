use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Evolution equations, all as multipliers in the frequency λ of √L.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    /// e^{−itλ²}
    Schrodinger,
    /// e^{−tλ²}
    Heat,
    /// e^{itλ}
    HalfWave,
    /// e^{it√(1+λ²)}
    KleinGordon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowSpec {
    pub equation: Equation,
}

impl FlowSpec {
    pub fn new(equation: Equation) -> Self {
        FlowSpec { equation }
    }

    pub fn multiplier(&self, t: f64, lambda: f64) -> Complex64 {
        match self.equation {
            Equation::Schrodinger => Complex64::new(0.0, -t * lambda * lambda).exp(),
            Equation::Heat => Complex64::new((-t * lambda * lambda).exp(), 0.0),
            Equation::HalfWave => Complex64::new(0.0, t * lambda).exp(),
            Equation::KleinGordon => Complex64::new(0.0, t * (1.0 + lambda * lambda).sqrt()).exp(),
        }
    }

    /// Bound on |d arg(multiplier)/dλ| for λ ≤ lambda_max.
    pub fn phase_rate(&self, t: f64, lambda_max: f64) -> f64 {
        match self.equation {
            Equation::Schrodinger => 2.0 * t.abs() * lambda_max,
            Equation::Heat => 0.0,
            Equation::HalfWave | Equation::KleinGordon => t.abs(),
        }
    }

    /// Heat time T with multiplier e^{−Tλ²}, when the flow is of that form.
    pub fn heat_time(&self, t: f64) -> Option<Complex64> {
        match self.equation {
            Equation::Schrodinger => Some(Complex64::new(0.0, t)),
            Equation::Heat => Some(Complex64::new(t, 0.0)),
            _ => None,
        }
    }

    /// |multiplier| ≤ 1 with equality for the unitary flows.
    pub fn is_unitary(&self) -> bool {
        !matches!(self.equation, Equation::Heat)
    }
}
