//! Dense complex LU factorization for the small systems that appear here
//! (dimension at most six).
//!
//! Solutions are polished by iterative refinement with a residual evaluated
//! in compensated (double-double) arithmetic, so cancellations between
//! large intermediate states survive to near full precision.

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct DenseLu {
    n: usize,
    a: Vec<Complex64>,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
}

const MAX_REFINEMENT_STEPS: usize = 4;

impl DenseLu {
    /// Factors the row-major `n x n` matrix `a`. Returns `None` on an exactly
    /// zero pivot.
    pub fn factor(n: usize, a: Vec<Complex64>) -> Option<Self> {
        assert_eq!(a.len(), n * n, "matrix storage does not match dimension");
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let pivot_row = (k..n)
                .max_by(|&i, &j| lu[i * n + k].norm().total_cmp(&lu[j * n + k].norm()))
                .expect("non-empty pivot range");
            if lu[pivot_row * n + k].norm() == 0.0 {
                return None;
            }
            if pivot_row != k {
                for j in 0..n {
                    lu.swap(k * n + j, pivot_row * n + j);
                }
                perm.swap(k, pivot_row);
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                for j in (k + 1)..n {
                    let upd = factor * lu[k * n + j];
                    lu[i * n + j] -= upd;
                }
            }
        }
        Some(Self { n, a, lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn solve_unrefined(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let upd = self.lu[i * n + j] * x[j];
                x[i] -= upd;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let upd = self.lu[i * n + j] * x[j];
                x[i] -= upd;
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }

    /// Solves `A x = b` with iterative refinement.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(b.len(), self.n);
        let mut x = self.solve_unrefined(b);
        for _ in 0..MAX_REFINEMENT_STEPS {
            let r = self.residual(&x, b);
            let dx = self.solve_unrefined(&r);
            let dx_norm = dx.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let x_norm = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for (xi, di) in x.iter_mut().zip(&dx) {
                *xi += di;
            }
            if dx_norm <= f64::EPSILON * x_norm {
                break;
            }
        }
        x
    }

    /// `b - A x`, accumulated in compensated arithmetic.
    pub fn residual(&self, x: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        (0..n)
            .map(|i| {
                let mut re = CompensatedSum::new(b[i].re);
                let mut im = CompensatedSum::new(b[i].im);
                for (j, &xj) in x.iter().enumerate().take(n) {
                    let a = self.a[i * n + j];
                    re.add_product(-a.re, xj.re);
                    re.add_product(a.im, xj.im);
                    im.add_product(-a.re, xj.im);
                    im.add_product(-a.im, xj.re);
                }
                Complex64::new(re.value(), im.value())
            })
            .collect()
    }

    /// 1-norm condition number `||A||_1 ||A^-1||_1`, from the explicit inverse.
    pub fn condition_1(&self) -> f64 {
        let n = self.n;
        let a_norm = (0..n)
            .map(|j| (0..n).map(|i| self.a[i * n + j].norm()).sum::<f64>())
            .fold(0.0, f64::max);
        let mut inv_norm: f64 = 0.0;
        for j in 0..n {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[j] = Complex64::new(1.0, 0.0);
            let col = self.solve_unrefined(&e);
            inv_norm = inv_norm.max(col.iter().map(|z| z.norm()).sum());
        }
        let cond = a_norm * inv_norm;
        if cond.is_finite() {
            cond
        } else {
            f64::INFINITY
        }
    }
}

/// Running sum with an error term (Ogita-Rump-Oishi `Dot2`).
struct CompensatedSum {
    sum: f64,
    err: f64,
}

impl CompensatedSum {
    fn new(start: f64) -> Self {
        Self {
            sum: start,
            err: 0.0,
        }
    }

    fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        let p_err = a.mul_add(b, -p);
        let s = self.sum + p;
        let bb = s - self.sum;
        let s_err = (self.sum - (s - bb)) + (p - bb);
        self.sum = s;
        self.err += p_err + s_err;
    }

    fn value(&self) -> f64 {
        self.sum + self.err
    }
}
