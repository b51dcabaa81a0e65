use num_complex::Complex64;

/// Dense complex Hermitian matrix in row-major order.
#[derive(Debug, Clone)]
pub struct HermitianMatrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn zeros(n: usize) -> Self {
        HermitianMatrix { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }
}

/// Cyclic Jacobi diagonalization. Returns eigenvalues (unsorted) and the
/// eigenvectors as columns of a row-major n×n matrix.
pub fn jacobi_eigen(mut a: HermitianMatrix) -> (Vec<f64>, Vec<Complex64>) {
    let n = a.n;
    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
    }
    let frob: f64 = a.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.get(p, q).norm_sqr();
            }
        }
        if off.sqrt() <= 1e-17 * frob.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                if mag < 1e-19 * (app.abs() + aqq.abs()) {
                    a.set(p, q, Complex64::new(0.0, 0.0));
                    a.set(q, p, Complex64::new(0.0, 0.0));
                    continue;
                }
                let phase = apq / mag;
                let zeta = (aqq - app) / (2.0 * mag);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let ph_c = phase.conj();
                // columns: A ← A W with W = [[c, s], [−s e^{−iφ}, c e^{−iφ}]]
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * c - akq * ph_c * s);
                    a.set(k, q, akp * s + akq * ph_c * c);
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * c - vkq * ph_c * s;
                    v[k * n + q] = vkp * s + vkq * ph_c * c;
                }
                // rows: A ← W^H A
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, apk * c - aqk * phase * s);
                    a.set(q, k, apk * s + aqk * phase * c);
                }
                a.set(p, q, Complex64::new(0.0, 0.0));
                a.set(q, p, Complex64::new(0.0, 0.0));
                let dp = a.get(p, p).re;
                let dq = a.get(q, q).re;
                a.set(p, p, Complex64::new(dp, 0.0));
                a.set(q, q, Complex64::new(dq, 0.0));
            }
        }
    }
    let eig = (0..n).map(|i| a.get(i, i).re).collect();
    (eig, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonalizes_small_hermitian() {
        let mut m = HermitianMatrix::zeros(3);
        let vals = [
            [(2.0, 0.0), (1.0, 1.0), (0.0, -0.5)],
            [(1.0, -1.0), (3.0, 0.0), (0.2, 0.0)],
            [(0.0, 0.5), (0.2, 0.0), (-1.0, 0.0)],
        ];
        for i in 0..3 {
            for j in 0..3 {
                m.set(i, j, Complex64::new(vals[i][j].0, vals[i][j].1));
            }
        }
        let (e, v) = jacobi_eigen(m.clone());
        // trace and A v = λ v
        assert!((e.iter().sum::<f64>() - 4.0).abs() < 1e-13);
        for k in 0..3 {
            for i in 0..3 {
                let mut av = Complex64::new(0.0, 0.0);
                for j in 0..3 {
                    av += m.get(i, j) * v[j * 3 + k];
                }
                assert!((av - v[i * 3 + k] * e[k]).norm() < 1e-13);
            }
        }
    }
}
