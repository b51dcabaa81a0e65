//! Gauss-Legendre rules and adaptive Gauss-Kronrod integration.

use num_complex::Complex64;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Gauss-Legendre rule over the given panel breakpoints.
pub fn composite_rule(breaks: &[f64], per_panel: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(per_panel);
    let mut nodes = Vec::with_capacity((breaks.len().saturating_sub(1)) * per_panel);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (xi, wi) in gx.iter().zip(&gw) {
            nodes.push(mid + half * xi);
            weights.push(half * wi);
        }
    }
    (nodes, weights)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        rk += s * WGK[j];
        if j % 2 == 1 {
            rg += s * WG[j / 2];
        }
    }
    (rk * h, ((rk - rg) * h).norm())
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub panels: usize,
}

/// Adaptive Gauss-Kronrod (7/15) integration of a complex integrand on [a, b].
///
/// Panels are bisected, largest error first, until the summed error estimate
/// drops below `max(abs_tol, rel_tol * |value|)` or `max_panels` is reached.
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> QuadResult {
    integrate_breaks(f, &[a, b], abs_tol, rel_tol, max_panels)
}

/// Same as [`integrate`] but starting from a user-supplied panel partition.
pub fn integrate_breaks<F: Fn(f64) -> Complex64>(
    f: F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> QuadResult {
    let mut panels: Vec<(f64, f64, Complex64, f64)> = breaks
        .windows(2)
        .map(|p| {
            let (v, e) = gk15(&f, p[0], p[1]);
            (p[0], p[1], v, e)
        })
        .collect();
    loop {
        let value: Complex64 = panels.iter().map(|p| p.2).sum();
        let error: f64 = panels.iter().map(|p| p.3).sum();
        if error <= abs_tol.max(rel_tol * value.norm()) || panels.len() >= max_panels {
            return QuadResult { value, error, panels: panels.len() };
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (a, b, _, _) = panels[idx];
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            return QuadResult { value, error, panels: panels.len() };
        }
        let (v1, e1) = gk15(&f, a, m);
        let (v2, e2) = gk15(&f, m, b);
        panels[idx] = (a, m, v1, e1);
        panels.push((m, b, v2, e2));
    }
}

/// Adaptive integration of a real integrand.
pub fn integrate_real<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> (f64, f64) {
    let r = integrate(|x| Complex64::new(f(x), 0.0), a, b, abs_tol, rel_tol, max_panels);
    (r.value.re, r.error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        for n in [1usize, 2, 5, 16, 40] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg} q={q}");
            }
        }
    }

    #[test]
    fn kronrod_pair_integrates_smooth_functions() {
        let r = integrate(|x| Complex64::new(x.cos(), x.exp()), 0.0, 3.0, 1e-14, 1e-14, 200);
        assert_relative_eq!(r.value.re, 3f64.sin(), epsilon = 1e-13);
        assert_relative_eq!(r.value.im, 3f64.exp() - 1.0, epsilon = 1e-12);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let (v, _) = integrate_real(|x| x.sqrt().ln(), 0.0, 1.0, 1e-12, 1e-12, 500);
        assert_relative_eq!(v, -0.5, epsilon = 1e-10);
    }
}
