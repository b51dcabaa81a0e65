use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{gamma, ln_gamma};
use crate::{Error, Result};

/// Modulus below which the ascending series is used.
const SERIES_RADIUS: f64 = 17.0;

fn check(nu: f64, z: Complex64) -> Result<()> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::Domain(format!("order must be >= 0, got {nu}")));
    }
    if z.re < 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("modified Bessel argument needs Re z >= 0, got {z}")));
    }
    Ok(())
}

/// e^{−Re z}·I_ν(z) by the ascending series.
pub fn bessel_i_series_scaled(nu: f64, z: Complex64) -> Complex64 {
    if z.norm() == 0.0 {
        return Complex64::new(if nu == 0.0 { 1.0 } else { 0.0 }, 0.0);
    }
    let half = z * 0.5;
    let mut term = if nu == 0.0 {
        Complex64::new((-z.re).exp(), 0.0)
    } else if nu < 20.0 {
        (half.ln() * nu - z.re).exp() / gamma(nu + 1.0)
    } else {
        (half.ln() * nu - z.re - ln_gamma(nu + 1.0)).exp()
    };
    let q = half * half;
    let qn = q.norm();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut m = 0.0;
    loop {
        sum += term;
        term = term * q / ((m + 1.0) * (m + 1.0 + nu));
        m += 1.0;
        if m * (m + nu) > qn && term.norm() <= 1e-18 * sum.norm().max(f64::MIN_POSITIVE) {
            return sum;
        }
        if term.norm() == 0.0 || m > 2000.0 {
            return sum;
        }
    }
}

/// e^{−Re z}·I_ν(z) by the two-exponential large-argument expansion, when it
/// converges to double precision.
pub fn bessel_i_asymptotic_scaled(nu: f64, z: Complex64) -> Option<Complex64> {
    let mu = 4.0 * nu * nu;
    let zi = z.inv();
    let mut s1 = Complex64::new(1.0, 0.0);
    let mut s2 = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut prev = f64::INFINITY;
    let mut k = 1usize;
    loop {
        let kk = k as f64;
        term = term * zi * ((mu - (2.0 * kk - 1.0).powi(2)) / (8.0 * kk));
        let mag = term.norm();
        if mag == 0.0 {
            break;
        }
        if mag > prev && mag > 1e-17 {
            return None;
        }
        s2 += term;
        if k % 2 == 1 {
            s1 -= term;
        } else {
            s1 += term;
        }
        if mag < 1e-17 {
            break;
        }
        prev = mag;
        k += 1;
        if k > 300 {
            return None;
        }
    }
    let root = (z * (2.0 * PI)).sqrt();
    let lead = Complex64::new(0.0, z.im).exp() * s1 / root;
    let sign = if z.im >= 0.0 { 1.0 } else { -1.0 };
    let phase = Complex64::new(0.0, sign * PI * (nu + 0.5)).exp();
    let sub = phase * (-z - z.re).exp() * s2 / root;
    Some(lead + sub)
}

fn base_scaled(nu: f64, z: Complex64) -> Complex64 {
    if z.norm() <= SERIES_RADIUS {
        return bessel_i_series_scaled(nu, z);
    }
    bessel_i_asymptotic_scaled(nu, z).unwrap_or_else(|| bessel_i_series_scaled(nu, z))
}

/// Backward-recurrence values f_n ∝ I_{ν0+n}(z) for n = 0..=n_keep (unnormalized).
fn miller(nu0: f64, z: Complex64, n_keep: usize) -> Vec<Complex64> {
    let az = z.norm();
    let top = (nu0 + n_keep as f64).max(az) + 7.0 * az.sqrt() + 30.0;
    let n_start = ((top - nu0).ceil() as usize).max(n_keep + 2);
    let two_over_z = z.inv() * 2.0;
    let mut out = vec![Complex64::new(0.0, 0.0); n_keep + 2];
    let mut f_next = Complex64::new(0.0, 0.0);
    let mut f = Complex64::new(1e-280, 0.0);
    for n in (1..=n_start).rev() {
        if n <= n_keep + 1 {
            out[n] = f;
        }
        let f_prev = two_over_z * (nu0 + n as f64) * f + f_next;
        f_next = f;
        f = f_prev;
        if f.norm() > 1e120 {
            f *= 1e-120;
            f_next *= 1e-120;
            for v in out.iter_mut() {
                *v *= 1e-120;
            }
        }
    }
    out[0] = f;
    out
}

/// a/b without forming |b|² (Miller values can be near the overflow range).
fn ratio(a: Complex64, b: Complex64) -> Complex64 {
    let m = b.norm();
    (a / m) * (b.conj() / m)
}

/// Normalizes a Miller sequence against direct values at orders ν0 and ν0+1.
fn normalize(nu0: f64, z: Complex64, seq: &mut [Complex64]) {
    let e0 = base_scaled(nu0, z);
    let e1 = base_scaled(nu0 + 1.0, z);
    let scale = if e0.norm() >= e1.norm() { ratio(e0, seq[0]) } else { ratio(e1, seq[1]) };
    for v in seq.iter_mut() {
        *v *= scale;
    }
}

/// e^{−Re z}·I_ν(z) for ν ≥ 0 and Re z ≥ 0.
pub fn bessel_i_scaled(nu: f64, z: Complex64) -> Result<Complex64> {
    check(nu, z)?;
    if z.norm() <= SERIES_RADIUS {
        return Ok(bessel_i_series_scaled(nu, z));
    }
    if let Some(v) = bessel_i_asymptotic_scaled(nu, z) {
        return Ok(v);
    }
    let n = nu.floor() as usize;
    let nu0 = nu - n as f64;
    let mut seq = miller(nu0, z, n.max(1));
    normalize(nu0, z, &mut seq);
    Ok(seq[n])
}

/// I_ν(z) for ν ≥ 0 and Re z ≥ 0 (unscaled; overflows for Re z beyond ~700).
pub fn bessel_i(nu: f64, z: Complex64) -> Result<Complex64> {
    Ok(bessel_i_scaled(nu, z)? * z.re.exp())
}

/// e^{−Re z}·I_{ν0+n}(z) for n = 0..=n_max.
pub fn bessel_i_seq_scaled(nu0: f64, z: Complex64, n_max: usize) -> Result<Vec<Complex64>> {
    check(nu0, z)?;
    if z.norm() == 0.0 {
        let mut v = vec![Complex64::new(0.0, 0.0); n_max + 1];
        if nu0 == 0.0 {
            v[0] = Complex64::new(1.0, 0.0);
        }
        return Ok(v);
    }
    let mut seq = miller(nu0, z, n_max.max(1));
    normalize(nu0, z, &mut seq);
    seq.truncate(n_max + 1);
    Ok(seq)
}

/// Natural log of the bound |I_ν(z)| ≤ (|z|/2)^ν/Γ(ν+1)·min(e^{|Re z|}, e^{|z|²/(4(ν+1))}).
pub fn bessel_i_tail_bound_ln(nu: f64, z: Complex64) -> f64 {
    let az = z.norm();
    if az == 0.0 {
        return if nu == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let growth = z.re.abs().min(az * az / (4.0 * (nu + 1.0)));
    nu * (0.5 * az).ln() - ln_gamma(nu + 1.0) + growth
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn scaled_values_match_reference() {
        // e^{-Re z} I_ν(z), 40-digit mpmath references
        let cases = [
            (0.3, c(3.0, -5.0), c(-0.039_974_256_759_197_463_64, 0.161_535_694_004_573_797_9)),
            (1.7, c(25.0, 10.0), c(-0.067_507_341_366_525_140_59, -0.028_846_193_607_080_375_63)),
            (40.5, c(60.0, -30.0), c(-8.259_734_524_855_019_302e-7, 3.504_177_043_026_948_059e-7)),
            (0.25, c(0.5, -20.0), c(0.112_778_179_434_919_709_2, -0.046_390_003_985_003_363_10)),
            (5.5, c(800.0, 100.0), c(0.011_454_787_790_354_480_43, -0.007_683_426_780_236_480_942)),
        ];
        for (nu, z, want) in cases {
            let got = bessel_i_scaled(nu, z).unwrap();
            assert!((got - want).norm() < 1e-11 * want.norm(), "nu={nu} z={z}: {got} vs {want}");
        }
    }

    #[test]
    fn half_order_closed_form() {
        let v = bessel_i(0.5, c(1.0, 0.0)).unwrap();
        let exact = (2.0 / PI).sqrt() * 1f64.sinh();
        assert!((v.re - exact).abs() < 1e-15);
        assert!((bessel_i(0.0, c(0.0, 0.0)).unwrap().re - 1.0).abs() == 0.0);
    }

    #[test]
    fn rejects_left_half_plane() {
        assert!(bessel_i(0.5, c(-1.0, 0.0)).is_err());
    }

    #[test]
    fn sequence_matches_pointwise() {
        for z in [c(2.0, -1.0), c(0.3, 12.0), c(40.0, -70.0), c(300.0, 0.0)] {
            let seq = bessel_i_seq_scaled(0.3, z, 60).unwrap();
            for (n, v) in seq.iter().enumerate() {
                let d = bessel_i_scaled(0.3 + n as f64, z).unwrap();
                assert!((v - d).norm() <= 1e-11 * d.norm().max(1e-300), "z={z} n={n}: {v} vs {d}");
            }
        }
    }
}
