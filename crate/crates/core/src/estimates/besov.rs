use crate::propagators::{FieldState, SpectralFilter};
use crate::transforms::DyadicWindow;
use crate::Result;

use super::norms::lp_norms;

/// Lowest band used when the data reach down to zero frequency.
const LOWEST_BAND: i32 = -6;

/// One Littlewood–Paley piece ‖φ_j(√L)f‖_{L¹}; `band` is None for the φ₀ lump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovPiece {
    pub band: Option<i32>,
    pub l1: f64,
}

/// Pieces entering the homogeneous (all bands) or inhomogeneous (φ₀ + bands j ≥ 1) norm.
pub fn besov_pieces(f: &FieldState, homogeneous: bool) -> Result<Vec<BesovPiece>> {
    let lo = f.components.iter().map(|c| c.datum.frequency_support().0).fold(f64::INFINITY, f64::min);
    let hi = f.bandwidth();
    let j_hi = (hi.log2() + 1.0).ceil() as i32 - 1;
    let j_lo = if lo > 0.0 { (lo.log2() - 1.0).floor() as i32 + 1 } else { LOWEST_BAND };
    let extent = f.reach(None, 0.0);
    let piece = |w: DyadicWindow| -> Result<f64> {
        let (w_lo, _) = w.support();
        let radius = extent + 96.0 / w_lo.max(0.5);
        Ok(lp_norms(f, None, &[0.0], SpectralFilter::Window(w), 1.0, Some(radius))?[0])
    };
    let mut out = Vec::new();
    if !homogeneous {
        out.push(BesovPiece { band: None, l1: piece(DyadicWindow::Low)? });
    }
    let start = if homogeneous { j_lo } else { j_lo.max(1) };
    for j in start..=j_hi {
        out.push(BesovPiece { band: Some(j), l1: piece(DyadicWindow::Band(j))? });
    }
    Ok(out)
}

/// Σ_j 2^{js}‖φ_j(√L)f‖_{L¹}, plus ‖φ₀(√L)f‖_{L¹} when inhomogeneous.
/// Data reaching zero frequency are cut at band −6 in the homogeneous sum.
pub fn besov_norm(f: &FieldState, s: f64, homogeneous: bool) -> Result<f64> {
    Ok(besov_pieces(f, homogeneous)?
        .iter()
        .map(|p| match p.band {
            Some(j) => 2f64.powf(j as f64 * s) * p.l1,
            None => p.l1,
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::FluxConfig;

    #[test]
    fn single_piece_and_dilation() {
        let flux = FluxConfig::constant(0.5);
        let f = FieldState::lp_random(&flux, 11, 2, 1).unwrap();
        let l1 = lp_norms(&f, None, &[0.0], SpectralFilter::None, 1.0, None).unwrap()[0];
        let norm = besov_norm(&f, 1.5, true).unwrap();
        let ratio = norm / (2f64.powf(3.0) * l1);
        assert!((1.0..=2.0).contains(&ratio), "ratio {ratio}");
        // u(x/2): L¹ grows by 4 and every band moves down by one
        let g = f.dilated(2.0).unwrap();
        let scaled = besov_norm(&g, 1.5, true).unwrap();
        let want = norm * 4.0 * 2f64.powf(-1.5);
        assert!((scaled - want).abs() < 0.1 * want, "{scaled} vs {want}");
    }
}
