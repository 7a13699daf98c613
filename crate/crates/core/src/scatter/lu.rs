//! Dense LU factorization with partial pivoting for small complex systems.

use num_complex::Complex;

use super::real::{norm_sqr, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingularMatrix;

/// Row-major packed `L\U` factors and the row permutation.
#[derive(Debug, Clone)]
pub struct LuFactors<R: Real> {
    n: usize,
    lu: Vec<Complex<R>>,
    perm: Vec<usize>,
}

impl<R: Real> LuFactors<R> {
    /// Factors the `n x n` row-major matrix `a`. A pivot whose modulus falls
    /// at or below `pivot_tol` times the largest entry marks the matrix singular.
    pub fn factor(mut a: Vec<Complex<R>>, n: usize, pivot_tol: f64) -> Result<Self, SingularMatrix> {
        debug_assert_eq!(a.len(), n * n);
        let scale = a.iter().map(|z| norm_sqr(*z).to_f64()).fold(0.0, f64::max).sqrt();
        let threshold = pivot_tol * scale.max(f64::MIN_POSITIVE);
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let (mut best, mut best_mag) = (col, norm_sqr(a[col * n + col]));
            for row in (col + 1)..n {
                let mag = norm_sqr(a[row * n + col]);
                if mag > best_mag {
                    best = row;
                    best_mag = mag;
                }
            }
            if best_mag.to_f64().sqrt() <= threshold {
                return Err(SingularMatrix);
            }
            if best != col {
                for j in 0..n {
                    a.swap(col * n + j, best * n + j);
                }
                perm.swap(col, best);
            }
            let pivot = a[col * n + col];
            for row in (col + 1)..n {
                let factor = a[row * n + col] / pivot;
                a[row * n + col] = factor;
                if factor == Complex::new(R::zero(), R::zero()) {
                    continue;
                }
                for j in (col + 1)..n {
                    let u = a[col * n + j];
                    a[row * n + j] = a[row * n + j] - factor * u;
                }
            }
        }
        Ok(LuFactors { n, lu: a, perm })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Solves `A x = b`, overwriting `b` with `x`.
    pub fn solve_in_place(&self, b: &mut [Complex<R>]) {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        let mut x: Vec<Complex<R>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s = s - self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s = s - self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        b.copy_from_slice(&x);
    }

    pub fn solve(&self, b: &[Complex<R>]) -> Vec<Complex<R>> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
