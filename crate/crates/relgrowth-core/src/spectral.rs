//! Character-twisted transfer matrices and their spectral data.
//!
//! For a torus point t, each masked matrix gets its surviving entries
//! multiplied by `e^{2 pi i <t, f(u,v)>}`. The twisted matrix has spectral
//! radius at most the growth rate, with equality exactly at the dual
//! points of the difference lattice; near those points the leading
//! eigenvalues form a rotation orbit `lambda_j(t) e^{2 pi i k/p}` of
//! simple eigenvalues, and the curvature of `log lambda_j` at the peak is
//! what drives the `n^{-nu/2}` power correction. This module computes the
//! twisted matrices, their radii and maximal eigendata, grid scans over
//! the torus, and finite-difference Hessians of the leading-eigenvalue
//! curve.
//!
//! Matrix-vector conventions: the initial-vertex row is propagated through
//! powers (`row^T C^n`), so `initial_mass(Q) = e_init^T Q 1` is the weight
//! the initial vertex places on an eigendirection.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Zero;
// f64 transcendentals are trait methods under no_std (inherent with std).
#[allow(unused_imports)]
use num_traits::Float;

use crate::automaton::Automaton;
use crate::components::{ComponentAnalysis, MaskedMatrix};
use crate::eig::{self, EigError};
use crate::matrix::CMatrix;
use crate::weights::EdgeWeighting;

#[derive(Clone, Debug, PartialEq)]
pub enum SpectralError {
    Eig(EigError),
    /// The p-th and (p+1)-th eigenvalue moduli are too close to separate
    /// the rotation orbit from the rest of the spectrum.
    DegenerateLeading {
        moduli: (f64, f64),
    },
    /// Two of the claimed-simple leading eigenvalues coincide.
    CoincidentLeading {
        value: Complex64,
    },
    /// A finite-difference stencil point lost the spectral gap.
    StencilGapCollapse {
        t: Vec<f64>,
    },
    GridTooSmall {
        grid: usize,
    },
}

impl core::fmt::Display for SpectralError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SpectralError::Eig(e) => write!(f, "{e}"),
            SpectralError::DegenerateLeading { moduli } => write!(
                f,
                "leading eigenvalue moduli {:.12} and {:.12} not separated",
                moduli.0, moduli.1
            ),
            SpectralError::CoincidentLeading { value } => {
                write!(f, "leading eigenvalues coincide at {value}")
            }
            SpectralError::StencilGapCollapse { t } => {
                write!(f, "spectral gap collapsed at stencil point {t:?}")
            }
            SpectralError::GridTooSmall { grid } => {
                write!(f, "grid {grid} too small (need at least 8)")
            }
        }
    }
}

impl core::error::Error for SpectralError {}

impl From<EigError> for SpectralError {
    fn from(e: EigError) -> Self {
        SpectralError::Eig(e)
    }
}

/// A masked matrix twisted by a character of `Z^nu`.
#[derive(Clone, Debug)]
pub struct WeightedMatrix {
    pub matrix: CMatrix,
    pub t: Vec<f64>,
    pub maximal_slot: usize,
}

/// Entrywise `e^{2 pi i <t, f(u,v)>}` on the surviving entries.
pub fn weighted_matrix(
    masked: &MaskedMatrix,
    weighting: &EdgeWeighting,
    t: &[f64],
) -> WeightedMatrix {
    debug_assert_eq!(t.len(), weighting.dim());
    let n = masked.dim();
    let mut matrix = CMatrix::zeros(n);
    for &(from, to, edge_index) in masked.kept_edges() {
        let angle = 2.0 * core::f64::consts::PI * weighting.pairing(edge_index, t);
        matrix[(from, to)] = Complex64::new(angle.cos(), angle.sin());
    }
    WeightedMatrix {
        matrix,
        t: t.to_vec(),
        maximal_slot: masked.maximal_slot,
    }
}

/// Largest eigenvalue modulus of the twisted matrix.
pub fn spectral_radius(m: &WeightedMatrix) -> Result<f64, SpectralError> {
    Ok(eig::spectral_radius(&m.matrix)?)
}

/// Maximal eigendata of a twisted matrix whose leading spectrum is a
/// rotation orbit of `period` simple eigenvalues.
#[derive(Clone, Debug)]
pub struct EigenData {
    /// The `period` leading eigenvalues, sorted by argument.
    pub eigenvalues: Vec<Complex64>,
    /// Common modulus of the leading orbit.
    pub modulus: f64,
    /// Orbit phase representative, argument reduced into [0, 2 pi/p).
    pub theta: f64,
    /// Modulus gap to the (p+1)-th eigenvalue.
    pub gap: f64,
    /// Rank-one spectral projections, one per leading eigenvalue.
    pub projections: Vec<CMatrix>,
    /// `e_init^T Q 1` per leading eigenvalue: the coefficient the
    /// expansion of initial-vertex path sums places on each eigenvalue.
    pub initial_mass: Vec<Complex64>,
}

/// Relative modulus separation below which the leading orbit is treated
/// as degenerate.
pub const DEFAULT_GAP_RTOL: f64 = 1e-6;

pub fn max_eigendata(
    m: &WeightedMatrix,
    period: usize,
    initial: usize,
    gap_rtol: f64,
) -> Result<EigenData, SpectralError> {
    let eigs = eig::eigenvalues_by_modulus(&m.matrix)?;
    assert!(period >= 1 && period <= eigs.len());
    let modulus = eigs[0].norm();
    let next_modulus = if eigs.len() > period {
        eigs[period].norm()
    } else {
        0.0
    };
    let gap = eigs[period - 1].norm() - next_modulus;
    if gap <= gap_rtol * modulus.max(1e-300) {
        return Err(SpectralError::DegenerateLeading {
            moduli: (eigs[period - 1].norm(), next_modulus),
        });
    }
    let mut leading: Vec<Complex64> = eigs[..period].to_vec();
    leading.sort_by(|x, y| {
        x.arg()
            .partial_cmp(&y.arg())
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    for pair in leading.windows(2) {
        if (pair[0] - pair[1]).norm() <= 1e-9 * modulus {
            return Err(SpectralError::CoincidentLeading { value: pair[0] });
        }
    }
    let two_pi_over_p = 2.0 * core::f64::consts::PI / period as f64;
    let theta = {
        let raw = positive_mod(leading[0].arg(), two_pi_over_p);
        // Collapse arguments within roundoff of the sector boundary.
        if two_pi_over_p - raw < 1e-12 {
            0.0
        } else {
            raw
        }
    };
    let mut projections = Vec::with_capacity(period);
    let mut initial_mass = Vec::with_capacity(period);
    for mu in &leading {
        let q = eig::spectral_projection(&m.matrix, *mu, 1e-10)?;
        let mass: Complex64 = (0..q.dim()).map(|j| q[(initial, j)]).sum();
        projections.push(q);
        initial_mass.push(mass);
    }
    Ok(EigenData {
        eigenvalues: leading,
        modulus,
        theta,
        gap,
        projections,
        initial_mass,
    })
}

/// Radii of every masked matrix over the uniform grid `(k/M)^nu`.
#[derive(Clone, Debug)]
pub struct SpectralScan {
    pub grid: usize,
    pub dim: usize,
    /// Grid indices in odometer order with per-mask radii.
    pub radii: Vec<(Vec<usize>, Vec<f64>)>,
    /// Grid indices where some mask reaches `lambda - near_tol`.
    pub near_maximal: Vec<Vec<usize>>,
    pub lambda: f64,
    pub near_tol: f64,
    pub max_radius: f64,
}

impl SpectralScan {
    /// Largest radius over grid points whose torus distance to every
    /// exclusion point is at least `cutoff`; the returned margin is
    /// `lambda` minus that. Euclidean distance on the flat torus.
    pub fn margin_outside(&self, exclusions: &[Vec<f64>], cutoff: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for (index, radii) in &self.radii {
            let t: Vec<f64> = index.iter().map(|&k| k as f64 / self.grid as f64).collect();
            let excluded = exclusions.iter().any(|e| torus_distance(&t, e) < cutoff);
            if !excluded {
                for &r in radii {
                    worst = worst.max(r);
                }
            }
        }
        self.lambda - worst
    }
}

fn positive_mod(x: f64, modulus: f64) -> f64 {
    let r = x % modulus;
    if r < 0.0 {
        r + modulus
    } else {
        r
    }
}

pub fn torus_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        let d = positive_mod(x - y, 1.0);
        let d = d.min(1.0 - d);
        sum += d * d;
    }
    sum.sqrt()
}

pub fn torus_scan(
    masked: &[MaskedMatrix],
    weighting: &EdgeWeighting,
    grid: usize,
    lambda: f64,
    near_tol: f64,
) -> Result<SpectralScan, SpectralError> {
    if grid < 8 {
        return Err(SpectralError::GridTooSmall { grid });
    }
    let dim = weighting.dim();
    let mut radii = Vec::new();
    let mut near_maximal = Vec::new();
    let mut max_radius: f64 = 0.0;
    let mut index = vec![0usize; dim];
    loop {
        let t: Vec<f64> = index.iter().map(|&k| k as f64 / grid as f64).collect();
        let mut here = Vec::with_capacity(masked.len());
        let mut best: f64 = 0.0;
        for mask in masked {
            let wm = weighted_matrix(mask, weighting, &t);
            let r = eig::spectral_radius(&wm.matrix)?;
            best = best.max(r);
            here.push(r);
        }
        max_radius = max_radius.max(best);
        if best >= lambda - near_tol {
            near_maximal.push(index.clone());
        }
        radii.push((index.clone(), here));
        let mut d = 0;
        loop {
            if d == dim {
                break;
            }
            index[d] += 1;
            if index[d] < grid {
                break;
            }
            index[d] = 0;
            d += 1;
        }
        if d == dim {
            break;
        }
    }
    Ok(SpectralScan {
        grid,
        dim,
        radii,
        near_maximal,
        lambda,
        near_tol,
        max_radius,
    })
}

/// Leading-eigenvalue curve data around a near-maximal point: stencil
/// values of `log lambda_j` and the central-difference Hessian, refined by
/// two step sizes.
#[derive(Clone, Debug)]
pub struct HessianData {
    pub t0: Vec<f64>,
    pub step: f64,
    /// Hessian of `log lambda_j` at t0 (Richardson-refined).
    pub hessian: Vec<Vec<f64>>,
    /// Largest entry disagreement between the two step sizes; values above
    /// 1e-3 mean the curvature estimate should not be trusted.
    pub refinement_disagreement: f64,
    /// Stencil values (offset in grid steps, log lambda).
    pub stencil: Vec<(Vec<i32>, f64)>,
}

impl HessianData {
    /// True when the two step sizes disagree enough that the curvature
    /// should not be trusted.
    pub fn flagged(&self) -> bool {
        self.refinement_disagreement > 1e-3
    }
}

/// `log` of the leading modulus, with a gap check relative to `period`.
fn log_leading_modulus(
    masked: &MaskedMatrix,
    weighting: &EdgeWeighting,
    t: &[f64],
    period: usize,
    gap_rtol: f64,
) -> Result<f64, SpectralError> {
    let wm = weighted_matrix(masked, weighting, t);
    let eigs = eig::eigenvalues_by_modulus(&wm.matrix)?;
    let modulus = eigs[0].norm();
    let next = if eigs.len() > period {
        eigs[period].norm()
    } else {
        0.0
    };
    if modulus - next <= gap_rtol * modulus.max(1e-300) {
        return Err(SpectralError::StencilGapCollapse { t: t.to_vec() });
    }
    Ok(modulus.ln())
}

pub fn lambda_curve_and_hessian(
    masked: &MaskedMatrix,
    weighting: &EdgeWeighting,
    t0: &[f64],
    step: f64,
    period: usize,
    gap_rtol: f64,
) -> Result<HessianData, SpectralError> {
    let dim = weighting.dim();
    debug_assert_eq!(t0.len(), dim);
    let mut stencil = Vec::new();
    let eval = |offsets: &[i32], h: f64| -> Result<f64, SpectralError> {
        let t: Vec<f64> = t0
            .iter()
            .zip(offsets.iter())
            .map(|(&base, &o)| base + o as f64 * h)
            .collect();
        log_leading_modulus(masked, weighting, &t, period, gap_rtol)
    };
    let hessian_at =
        |h: f64, stencil: &mut Vec<(Vec<i32>, f64)>| -> Result<Vec<Vec<f64>>, SpectralError> {
            let mut hess = vec![vec![0.0; dim]; dim];
            let center = eval(&vec![0; dim], h)?;
            stencil.push((vec![0; dim], center));
            for i in 0..dim {
                let mut plus = vec![0i32; dim];
                plus[i] = 1;
                let mut minus = vec![0i32; dim];
                minus[i] = -1;
                let fp = eval(&plus, h)?;
                let fm = eval(&minus, h)?;
                stencil.push((plus.clone(), fp));
                stencil.push((minus.clone(), fm));
                hess[i][i] = (fp - 2.0 * center + fm) / (h * h);
            }
            for i in 0..dim {
                for j in i + 1..dim {
                    let mut pp = vec![0i32; dim];
                    pp[i] = 1;
                    pp[j] = 1;
                    let mut pm = pp.clone();
                    pm[j] = -1;
                    let mut mp = pp.clone();
                    mp[i] = -1;
                    let mut mm = pp.clone();
                    mm[i] = -1;
                    mm[j] = -1;
                    let vpp = eval(&pp, h)?;
                    let vpm = eval(&pm, h)?;
                    let vmp = eval(&mp, h)?;
                    let vmm = eval(&mm, h)?;
                    stencil.push((pp, vpp));
                    stencil.push((pm, vpm));
                    stencil.push((mp, vmp));
                    stencil.push((mm, vmm));
                    let mixed = (vpp - vpm - vmp + vmm) / (4.0 * h * h);
                    hess[i][j] = mixed;
                    hess[j][i] = mixed;
                }
            }
            Ok(hess)
        };
    let coarse = hessian_at(step, &mut stencil)?;
    let fine = hessian_at(step / 2.0, &mut stencil)?;
    // Richardson for O(h^2) central differences.
    let mut hessian = vec![vec![0.0; dim]; dim];
    let mut disagreement: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            hessian[i][j] = (4.0 * fine[i][j] - coarse[i][j]) / 3.0;
            disagreement = disagreement.max((fine[i][j] - coarse[i][j]).abs());
        }
    }
    Ok(HessianData {
        t0: t0.to_vec(),
        step,
        hessian,
        refinement_disagreement: disagreement,
        stencil,
    })
}

/// Character sum over length-n paths from the initial vertex, via matrix
/// powers: the masked-matrix sums overcount paths avoiding every maximal
/// component once per extra mask, so that exact small sum is subtracted
/// back out.
pub fn character_sum_matrices(
    a: &Automaton,
    analysis: &ComponentAnalysis,
    masked: &[MaskedMatrix],
    weighting: &EdgeWeighting,
    t: &[f64],
    n: usize,
) -> Complex64 {
    let dim = a.vertex_count();
    let mut total = Complex64::zero();
    for mask in masked {
        let wm = weighted_matrix(mask, weighting, t);
        let mut row = vec![Complex64::zero(); dim];
        row[a.initial()] = Complex64::new(1.0, 0.0);
        for _ in 0..n {
            row = wm.matrix.vec_mul(&row);
        }
        total += row.iter().sum::<Complex64>();
    }
    let extra = masked.len() as f64 - 1.0;
    if extra > 0.0 {
        total -= avoiding_character_sum(a, analysis, weighting, t, n) * extra;
    }
    total
}

/// Exact character sum over length-n paths from the initial vertex that
/// never touch a maximal component.
fn avoiding_character_sum(
    a: &Automaton,
    analysis: &ComponentAnalysis,
    weighting: &EdgeWeighting,
    t: &[f64],
    n: usize,
) -> Complex64 {
    let dim = a.vertex_count();
    let mut in_maximal = vec![false; dim];
    for &mi in &analysis.maximal_indices {
        for &v in &analysis.components[mi].vertices {
            in_maximal[v] = true;
        }
    }
    let mut amp = vec![Complex64::zero(); dim];
    if in_maximal[a.initial()] {
        return Complex64::zero();
    }
    amp[a.initial()] = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        let mut next = vec![Complex64::zero(); dim];
        for (i, e) in a.edges().iter().enumerate() {
            if in_maximal[e.from] || in_maximal[e.to] {
                continue;
            }
            if amp[e.from].is_zero() {
                continue;
            }
            let angle = 2.0 * core::f64::consts::PI * weighting.pairing(i, t);
            next[e.to] += amp[e.from] * Complex64::new(angle.cos(), angle.sin());
        }
        amp = next;
    }
    amp.iter().sum()
}

/// Exact integer path count `<row_init A^n, 1>` for cross-checking the
/// weighted machinery at t = 0 against direct dynamic programming.
pub fn path_count_matrix_route(a: &Automaton, n: usize) -> f64 {
    let dim = a.vertex_count();
    let adj = a.adjacency();
    let m = CMatrix::from_fn(dim, |i, j| Complex64::new(adj[i * dim + j] as f64, 0.0));
    let mut row = vec![Complex64::zero(); dim];
    row[a.initial()] = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        row = m.vec_mul(&row);
    }
    row.iter().map(|z| z.re).sum()
}
