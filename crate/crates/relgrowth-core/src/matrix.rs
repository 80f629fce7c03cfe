//! Dense complex matrices, sized for transfer matrices of desk-scale
//! automata (a few hundred vertices at most). Row-major storage, no
//! blocking, no SIMD; clarity over throughput.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Zero;
// f64 transcendentals are trait methods under no_std (inherent with std).
#[allow(unused_imports)]
use num_traits::Float;

/// Square complex matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![Complex64::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// `self * v` for a column vector.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        let n = self.dim;
        let mut out = vec![Complex64::zero(); n];
        for i in 0..n {
            let mut acc = Complex64::zero();
            for j in 0..n {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// `u^T * self` for a row vector (no conjugation).
    pub fn vec_mul(&self, u: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(u.len(), self.dim);
        let n = self.dim;
        let mut out = vec![Complex64::zero(); n];
        for i in 0..n {
            let a = u[i];
            if a.is_zero() {
                continue;
            }
            for j in 0..n {
                out[j] += a * self[(i, j)];
            }
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a -= b;
        }
        out
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Solve `(self - shift I) x = b` in place by LU with partial pivoting.
    /// Pivots that underflow are replaced by a small multiple of the matrix
    /// norm, which is what inverse iteration wants when the shift is an
    /// eigenvalue.
    pub fn solve_shifted(&self, shift: Complex64, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim;
        assert_eq!(b.len(), n);
        let mut lu = self.clone();
        for i in 0..n {
            lu[(i, i)] -= shift;
        }
        let scale = self.max_norm().max(shift.norm()).max(1e-300);
        let floor = scale * 1e-150;
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].norm();
            for r in k + 1..n {
                let v = lu[(r, k)].norm();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
            }
            if lu[(k, k)].norm() < floor {
                lu[(k, k)] = Complex64::new(floor, 0.0);
            }
            let piv = lu[(k, k)];
            for r in k + 1..n {
                let factor = lu[(r, k)] / piv;
                lu[(r, k)] = factor;
                if factor.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let v = lu[(k, j)];
                    lu[(r, j)] -= factor * v;
                }
            }
        }
        let mut x: Vec<Complex64> = perm.iter().map(|&i| b[i]).collect();
        for k in 1..n {
            for j in 0..k {
                let f = lu[(k, j)];
                let v = x[j];
                x[k] -= f * v;
            }
        }
        for k in (0..n).rev() {
            for j in k + 1..n {
                let f = lu[(k, j)];
                let v = x[j];
                x[k] -= f * v;
            }
            x[k] /= lu[(k, k)];
        }
        x
    }
}

impl core::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mul_against_hand_computation() {
        let a = CMatrix::from_fn(2, |i, j| c((i * 2 + j) as f64, 1.0));
        let b = CMatrix::identity(2);
        assert_eq!(a.mul(&b), a);
        let ab = a.mul(&a);
        // (0+i)(0+i)+(1+i)(2+i) = (-1) + (1+3i) = 0+... compute directly
        let expect00 = c(0.0, 1.0) * c(0.0, 1.0) + c(1.0, 1.0) * c(2.0, 1.0);
        assert!((ab[(0, 0)] - expect00).norm() < 1e-14);
    }

    #[test]
    fn solve_shifted_recovers_solution() {
        let a = CMatrix::from_fn(3, |i, j| {
            c(((i + 2) * (j + 1)) as f64, (i as f64) - (j as f64))
        });
        let x_true = vec![c(1.0, 0.5), c(-2.0, 1.0), c(0.25, -0.75)];
        let shift = c(0.3, -0.1);
        let mut shifted = a.clone();
        for i in 0..3 {
            shifted[(i, i)] -= shift;
        }
        let b = shifted.mul_vec(&x_true);
        let x = a.solve_shifted(shift, &b);
        for (got, want) in x.iter().zip(x_true.iter()) {
            assert!((got - want).norm() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn vec_mul_matches_transpose_action() {
        let a = CMatrix::from_fn(3, |i, j| c((i * 3 + j) as f64, (j as f64) * 0.5));
        let u = vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, -1.0)];
        let left = a.vec_mul(&u);
        let mut expect = [Complex64::zero(); 3];
        for j in 0..3 {
            for i in 0..3 {
                expect[j] += u[i] * a[(i, j)];
            }
        }
        for (l, e) in left.iter().zip(expect.iter()) {
            assert!((l - e).norm() < 1e-14);
        }
    }
}
