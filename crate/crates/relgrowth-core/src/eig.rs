//! Dense complex eigensolver: Householder reduction to Hessenberg form
//! followed by explicitly shifted QR with Givens rotations (Wilkinson
//! shift, exceptional shifts on stagnation). Eigenvectors of simple,
//! well-separated eigenvalues are recovered by inverse iteration.
//!
//! The matrices this crate feeds in are character-twisted 0/1 transfer
//! matrices of desk-scale automata, so there is no balancing step and no
//! attempt at level-3 performance.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Zero;
// f64 transcendentals are trait methods under no_std (inherent with std).
#[allow(unused_imports)]
use num_traits::Float;

use crate::matrix::CMatrix;

/// Iterations allowed per eigenvalue before giving up.
const MAX_ITER_PER_EIGENVALUE: usize = 60;

#[derive(Clone, Debug, PartialEq)]
pub enum EigError {
    /// QR iteration failed to deflate within the iteration budget.
    NoConvergence { remaining: usize },
    /// Inverse iteration could not produce a residual-certified eigenvector.
    VectorFailure {
        eigenvalue: Complex64,
        residual: f64,
    },
    /// Left/right eigenvectors are numerically orthogonal, so the spectral
    /// projection is not defined (eigenvalue is effectively defective).
    DefectivePair { eigenvalue: Complex64 },
}

impl core::fmt::Display for EigError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EigError::NoConvergence { remaining } => {
                write!(
                    f,
                    "QR iteration did not converge ({remaining} eigenvalues unresolved)"
                )
            }
            EigError::VectorFailure {
                eigenvalue,
                residual,
            } => write!(
                f,
                "inverse iteration failed for eigenvalue {eigenvalue} (residual {residual:.3e})"
            ),
            EigError::DefectivePair { eigenvalue } => {
                write!(
                    f,
                    "left/right eigenvectors orthogonal at eigenvalue {eigenvalue}"
                )
            }
        }
    }
}

impl core::error::Error for EigError {}

/// Reduce to upper Hessenberg form in place by Householder reflections.
fn hessenberg(h: &mut CMatrix) {
    let n = h.dim();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        // Householder vector annihilating column k below the subdiagonal.
        let mut norm_sq = 0.0;
        for i in k + 1..n {
            norm_sq += h[(i, k)].norm_sqr();
        }
        let norm = norm_sq.sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.is_zero() {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // Rows k+1.. : H <- H - 2 v (v^H H)
        for j in k..n {
            let mut dot = Complex64::zero();
            for i in k + 1..n {
                dot += v[i - (k + 1)].conj() * h[(i, j)];
            }
            let dot = dot * 2.0;
            for i in k + 1..n {
                let delta = v[i - (k + 1)] * dot;
                h[(i, j)] -= delta;
            }
        }
        // Columns k+1.. : H <- H - 2 (H v) v^H
        for i in 0..n {
            let mut dot = Complex64::zero();
            for j in k + 1..n {
                dot += h[(i, j)] * v[j - (k + 1)];
            }
            let dot = dot * 2.0;
            for j in k + 1..n {
                let delta = dot * v[j - (k + 1)].conj();
                h[(i, j)] -= delta;
            }
        }
        // Entries below the subdiagonal in column k are now zero by
        // construction; clear the roundoff.
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = Complex64::zero();
        }
    }
}

/// Complex Givens rotation (c real) with `G [f; g] = [r; 0]`.
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let fa = f.norm();
    let ga = g.norm();
    if ga == 0.0 {
        return (1.0, Complex64::zero());
    }
    if fa == 0.0 {
        return (0.0, g.conj() / ga);
    }
    let h = fa.hypot(ga);
    let c = fa / h;
    let s = (f / fa) * g.conj() / h;
    (c, s)
}

/// Eigenvalues of the trailing 2x2 of the active block; used for the
/// Wilkinson shift and for direct 2x2 deflation.
fn two_by_two_eigenvalues(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
) -> (Complex64, Complex64) {
    let mean = (a + d) * 0.5;
    let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * c).sqrt();
    (mean + disc, mean - disc)
}

/// All eigenvalues of a general complex matrix, unordered.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>, EigError> {
    let n = a.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![a[(0, 0)]]);
    }
    let mut h = a.clone();
    hessenberg(&mut h);
    let eps = f64::EPSILON;
    let hnorm = h.max_norm().max(1e-300);
    let mut eigs: Vec<Complex64> = Vec::with_capacity(n);
    let mut high = n - 1;
    let mut iter_count = 0usize;
    loop {
        // Deflation scan: find the start of the trailing unreduced block.
        let mut low = high;
        while low > 0 {
            let sub = h[(low, low - 1)].norm();
            let local = h[(low - 1, low - 1)].norm() + h[(low, low)].norm();
            let tol = if local > 0.0 {
                eps * local
            } else {
                eps * hnorm
            };
            if sub <= tol {
                h[(low, low - 1)] = Complex64::zero();
                break;
            }
            low -= 1;
        }
        if low == high {
            eigs.push(h[(high, high)]);
            if high == 0 {
                break;
            }
            high -= 1;
            iter_count = 0;
            continue;
        }
        if low + 1 == high {
            let (e1, e2) = two_by_two_eigenvalues(
                h[(low, low)],
                h[(low, high)],
                h[(high, low)],
                h[(high, high)],
            );
            eigs.push(e1);
            eigs.push(e2);
            if low == 0 {
                break;
            }
            high = low - 1;
            iter_count = 0;
            continue;
        }
        iter_count += 1;
        if iter_count > MAX_ITER_PER_EIGENVALUE {
            return Err(EigError::NoConvergence {
                remaining: high + 1,
            });
        }
        // Wilkinson shift from the trailing 2x2, exceptional shift when
        // progress stalls.
        let shift = if iter_count.is_multiple_of(12) {
            Complex64::new(
                h[(high, high - 1)].norm() + h[(high - 1, high - 2)].norm(),
                0.0,
            )
        } else {
            let (e1, e2) = two_by_two_eigenvalues(
                h[(high - 1, high - 1)],
                h[(high - 1, high)],
                h[(high, high - 1)],
                h[(high, high)],
            );
            let hd = h[(high, high)];
            if (e1 - hd).norm() <= (e2 - hd).norm() {
                e1
            } else {
                e2
            }
        };
        // Explicit shifted QR step on the active block low..=high.
        for i in low..=high {
            h[(i, i)] -= shift;
        }
        let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(high - low);
        for i in low..high {
            let (c, s) = givens(h[(i, i)], h[(i + 1, i)]);
            for j in i..=high {
                let top = h[(i, j)];
                let bot = h[(i + 1, j)];
                h[(i, j)] = c * top + s * bot;
                h[(i + 1, j)] = -s.conj() * top + c * bot;
            }
            h[(i + 1, i)] = Complex64::zero();
            rots.push((c, s));
        }
        for (idx, (c, s)) in rots.iter().enumerate() {
            let i = low + idx;
            let row_end = (i + 1).min(high);
            for r in low..=row_end {
                let left = h[(r, i)];
                let right = h[(r, i + 1)];
                h[(r, i)] = c * left + s.conj() * right;
                h[(r, i + 1)] = -s * left + c * right;
            }
        }
        for i in low..=high {
            h[(i, i)] += shift;
        }
    }
    debug_assert_eq!(eigs.len(), n);
    Ok(eigs)
}

/// Eigenvalues sorted by decreasing modulus, ties broken by argument.
pub fn eigenvalues_by_modulus(a: &CMatrix) -> Result<Vec<Complex64>, EigError> {
    let mut eigs = eigenvalues(a)?;
    eigs.sort_by(|x, y| {
        y.norm()
            .partial_cmp(&x.norm())
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(
                x.arg()
                    .partial_cmp(&y.arg())
                    .unwrap_or(core::cmp::Ordering::Equal),
            )
    });
    Ok(eigs)
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(a: &CMatrix) -> Result<f64, EigError> {
    Ok(eigenvalues(a)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
    norm
}

/// Deterministic pseudo-random start vectors for inverse-iteration retries.
fn splitmix_vector(n: usize, seed: u64) -> Vec<Complex64> {
    let mut state = seed;
    let mut next = || {
        state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    };
    let mut v = Vec::with_capacity(n);
    for _ in 0..n {
        let re = (next() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
        let im = (next() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
        v.push(Complex64::new(re, im));
    }
    v
}

/// Right eigenvector for a simple eigenvalue `mu`, by inverse iteration.
/// The residual `||A x - mu x||` is certified below `tol * ||A||`.
pub fn right_eigenvector(a: &CMatrix, mu: Complex64, tol: f64) -> Result<Vec<Complex64>, EigError> {
    let n = a.dim();
    let anorm = a.max_norm().max(1e-300);
    let mut best_residual = f64::INFINITY;
    for attempt in 0..4 {
        let mut x = if attempt == 0 {
            vec![Complex64::new(1.0, 0.0); n]
        } else {
            splitmix_vector(n, 0x5eed + attempt as u64)
        };
        normalize(&mut x);
        for _ in 0..5 {
            let mut y = a.solve_shifted(mu, &x);
            if normalize(&mut y) == 0.0 {
                break;
            }
            x = y;
            let ax = a.mul_vec(&x);
            let residual = ax
                .iter()
                .zip(x.iter())
                .map(|(axi, xi)| (axi - mu * xi).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if residual <= tol * anorm {
                return Ok(x);
            }
            best_residual = best_residual.min(residual);
        }
    }
    Err(EigError::VectorFailure {
        eigenvalue: mu,
        residual: best_residual,
    })
}

/// Left eigenvector `v` with `v^H A = mu v^H`, i.e. a right eigenvector of
/// the adjoint at the conjugate eigenvalue.
pub fn left_eigenvector(a: &CMatrix, mu: Complex64, tol: f64) -> Result<Vec<Complex64>, EigError> {
    right_eigenvector(&a.adjoint(), mu.conj(), tol)
}

/// Rank-one spectral projection `u v^H / (v^H u)` for a simple eigenvalue
/// with right eigenvector `u` and left eigenvector `v`.
pub fn spectral_projection(a: &CMatrix, mu: Complex64, tol: f64) -> Result<CMatrix, EigError> {
    let u = right_eigenvector(a, mu, tol)?;
    let v = left_eigenvector(a, mu, tol)?;
    let inner: Complex64 = v.iter().zip(u.iter()).map(|(vi, ui)| vi.conj() * ui).sum();
    if inner.norm() < 1e-12 {
        return Err(EigError::DefectivePair { eigenvalue: mu });
    }
    let n = a.dim();
    Ok(CMatrix::from_fn(n, |i, j| u[i] * v[j].conj() / inner))
}

/// Singular values by one-sided Jacobi (columns orthogonalized pairwise),
/// sorted descending. Small singular values come out with absolute accuracy
/// near machine epsilon times the matrix norm, which the rank tests need.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let n = a.dim();
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)]).collect())
        .collect();
    let eps = f64::EPSILON;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = Complex64::zero();
                for i in 0..n {
                    app += cols[p][i].norm_sqr();
                    aqq += cols[q][i].norm_sqr();
                    apq += cols[p][i].conj() * cols[q][i];
                }
                let denom = (app * aqq).sqrt();
                if denom == 0.0 || apq.norm() <= eps * denom {
                    continue;
                }
                off = off.max(apq.norm() / denom);
                // De-phase column q so the Gram cross term is real, then a
                // real Jacobi rotation diagonalizes the 2x2 Gram block.
                let dephase = (apq / apq.norm()).conj();
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = tau.signum_or_one() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let vp = cols[p][i];
                    let vq = dephase * cols[q][i];
                    cols[p][i] = c * vp - s * vq;
                    cols[q][i] = s * vp + c * vq;
                }
            }
        }
        if off <= eps * 4.0 {
            break;
        }
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap_or(core::cmp::Ordering::Equal));
    sv
}

trait SignumOrOne {
    fn signum_or_one(self) -> f64;
}

impl SignumOrOne for f64 {
    fn signum_or_one(self) -> f64 {
        if self >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }
}
