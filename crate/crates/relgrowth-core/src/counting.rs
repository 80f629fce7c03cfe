//! Exact weighted path counting.
//!
//! `N(n, w)` is the number of length-`n` paths from the initial vertex
//! whose edge weights sum to `w`. When the automaton enumerates a group
//! (one path per element, length = word length) and the weights come from
//! the quotient homomorphism, `N(n, 0)` is the number of sphere elements
//! lying in the kernel: the relative growth sequence.
//!
//! Counts are arbitrary-precision: totals grow like `lambda^n` and pass
//! 2^64 around n = 40 already for lambda = 3. The tables also evaluate
//! character sums `sum_w N(n,w) e^{2 pi i <t,w>}` and recover `N(n, 0)`
//! by uniform quadrature over the torus, which is exact for grids finer
//! than the trigonometric degree.

use alloc::vec;
use alloc::vec::Vec;
use hashbrown::HashMap;
use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
// f64 transcendentals are trait methods under no_std (inherent with std).
#[allow(unused_imports)]
use num_traits::Float;

use crate::automaton::Automaton;
use crate::weights::{EdgeWeighting, WeightError, WeightVec};

/// Resource limits for table construction.
#[derive(Clone, Copy, Debug)]
pub struct CountBudget {
    /// Cap on stored (weight, count) entries summed over all lengths.
    pub max_entries: usize,
}

impl Default for CountBudget {
    fn default() -> Self {
        // Roughly 2 GB of BigUint-backed entries.
        CountBudget {
            max_entries: 20_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CountError {
    /// Estimated or actual table size beyond the configured cap.
    BudgetExceeded {
        estimated_entries: u128,
        max_entries: usize,
        reached_length: Option<usize>,
    },
    Weight(WeightError),
}

impl core::fmt::Display for CountError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CountError::BudgetExceeded {
                estimated_entries,
                max_entries,
                reached_length,
            } => match reached_length {
                Some(n) => write!(
                    f,
                    "weight table budget exceeded at length {n} ({estimated_entries} entries, cap {max_entries})"
                ),
                None => write!(
                    f,
                    "estimated weight table size {estimated_entries} exceeds cap {max_entries}"
                ),
            },
            CountError::Weight(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for CountError {}

impl From<WeightError> for CountError {
    fn from(e: WeightError) -> Self {
        CountError::Weight(e)
    }
}

/// Exact counts `N(n, w)` for `n <= n_max`, plus totals `T(n)`.
#[derive(Clone, Debug)]
pub struct CountTable {
    dim: usize,
    max_edge_weight: i64,
    rows: Vec<HashMap<WeightVec, BigUint>>,
    totals: Vec<BigUint>,
}

impl CountTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_max(&self) -> usize {
        self.rows.len() - 1
    }

    /// Max-norm bound `F` on the edge weights used to build the table.
    pub fn max_edge_weight(&self) -> i64 {
        self.max_edge_weight
    }

    pub fn count(&self, n: usize, w: &WeightVec) -> BigUint {
        self.rows[n].get(w).cloned().unwrap_or_else(BigUint::zero)
    }

    pub fn zero_count(&self, n: usize) -> BigUint {
        self.count(n, &WeightVec::zero(self.dim))
    }

    pub fn total(&self, n: usize) -> &BigUint {
        &self.totals[n]
    }

    pub fn totals(&self) -> &[BigUint] {
        &self.totals
    }

    /// Row at length n, sorted by weight for deterministic output.
    pub fn sorted_row(&self, n: usize) -> Vec<(WeightVec, &BigUint)> {
        let mut row: Vec<(WeightVec, &BigUint)> =
            self.rows[n].iter().map(|(w, c)| (*w, c)).collect();
        row.sort_by_key(|(w, _)| *w);
        row
    }

    /// The relative growth sequence `n -> N(n, 0)`.
    pub fn zero_weight_sequence(&self) -> Vec<BigUint> {
        (0..=self.n_max()).map(|n| self.zero_count(n)).collect()
    }

    /// `sum_w N(n,w) e^{2 pi i <t, w>}`, the exact-table route.
    pub fn character_sum(&self, n: usize, t: &[f64]) -> Complex64 {
        debug_assert_eq!(t.len(), self.dim);
        let mut acc = Complex64::zero();
        for (w, count) in self.rows[n].iter() {
            let phase: f64 = w
                .coords()
                .iter()
                .zip(t.iter())
                .map(|(&c, &ti)| c as f64 * ti)
                .sum();
            let angle = 2.0 * core::f64::consts::PI * phase;
            let c = count.to_f64().unwrap_or(f64::INFINITY);
            acc += Complex64::new(angle.cos(), angle.sin()) * c;
        }
        acc
    }
}

/// Forward dynamic programming over (vertex, accumulated weight) states.
pub fn count_by_weight(
    a: &Automaton,
    weighting: &EdgeWeighting,
    n_max: usize,
    budget: &CountBudget,
) -> Result<CountTable, CountError> {
    let dim = weighting.dim();
    let f = weighting.max_abs().max(1) as u128;
    // Bounding-box estimate of the final row; the sparse table is smaller.
    let box_side = 2 * f * n_max as u128 + 1;
    let mut estimate: u128 = a.vertex_count() as u128;
    for _ in 0..dim {
        estimate = estimate.saturating_mul(box_side);
    }
    if estimate > budget.max_entries as u128 * 8 {
        return Err(CountError::BudgetExceeded {
            estimated_entries: estimate,
            max_entries: budget.max_entries,
            reached_length: None,
        });
    }

    // Per-edge weights grouped by source vertex.
    let n_vertices = a.vertex_count();
    let mut transitions: Vec<Vec<(usize, WeightVec)>> = vec![Vec::new(); n_vertices];
    for (i, e) in a.edges().iter().enumerate() {
        transitions[e.from].push((e.to, weighting.weight(i)));
    }

    let zero = WeightVec::zero(dim);
    let mut state: Vec<HashMap<WeightVec, BigUint>> = vec![HashMap::new(); n_vertices];
    state[a.initial()].insert(zero, BigUint::from(1u32));

    let mut rows: Vec<HashMap<WeightVec, BigUint>> = Vec::with_capacity(n_max + 1);
    let mut totals: Vec<BigUint> = Vec::with_capacity(n_max + 1);
    let mut stored_entries = 0usize;

    let aggregate_row = |state: &Vec<HashMap<WeightVec, BigUint>>| {
        let mut row: HashMap<WeightVec, BigUint> = HashMap::new();
        let mut total = BigUint::zero();
        for vertex_map in state {
            for (w, c) in vertex_map {
                total += c;
                *row.entry(*w).or_insert_with(BigUint::zero) += c;
            }
        }
        (row, total)
    };

    let (row0, total0) = aggregate_row(&state);
    stored_entries += row0.len();
    rows.push(row0);
    totals.push(total0);

    for n in 1..=n_max {
        let mut next: Vec<HashMap<WeightVec, BigUint>> = vec![HashMap::new(); n_vertices];
        for (u, vertex_map) in state.iter().enumerate() {
            if vertex_map.is_empty() {
                continue;
            }
            for (w, c) in vertex_map {
                for (to, ew) in &transitions[u] {
                    let nw = w.checked_add(ew)?;
                    *next[*to].entry(nw).or_insert_with(BigUint::zero) += c;
                }
            }
        }
        state = next;
        let (row, total) = aggregate_row(&state);
        stored_entries += row.len() + state.iter().map(|m| m.len()).sum::<usize>();
        if stored_entries > budget.max_entries {
            return Err(CountError::BudgetExceeded {
                estimated_entries: stored_entries as u128,
                max_entries: budget.max_entries,
                reached_length: Some(n),
            });
        }
        rows.push(row);
        totals.push(total);
    }

    Ok(CountTable {
        dim,
        max_edge_weight: weighting.max_abs(),
        rows,
        totals,
    })
}

/// The relative growth and totals sequences from a table.
pub fn relative_growth(table: &CountTable) -> (Vec<BigUint>, Vec<BigUint>) {
    (table.zero_weight_sequence(), table.totals.clone())
}

#[derive(Clone, Debug, PartialEq)]
pub enum FourierError {
    /// Grid too coarse for exact recovery; the minimal valid grid is
    /// reported.
    GridTooCoarse { grid: usize, minimal_valid: usize },
    /// Counts too large for exact rounding through f64 quadrature.
    PrecisionExceeded { length: usize },
}

impl core::fmt::Display for FourierError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FourierError::GridTooCoarse {
                grid,
                minimal_valid,
            } => write!(
                f,
                "grid {grid} too coarse for exact inversion; need at least {minimal_valid}"
            ),
            FourierError::PrecisionExceeded { length } => write!(
                f,
                "counts at length {length} exceed exact f64 range for quadrature rounding"
            ),
        }
    }
}

impl core::error::Error for FourierError {}

/// Exact zero-weight count by uniform quadrature of the character sum over
/// the `grid^dim` torus lattice. The character sum at length n is a
/// trigonometric polynomial of per-coordinate degree at most `F n`, so any
/// grid larger than twice that resolves it; the quadrature then equals
/// `N(n, 0)` up to roundoff, and the residual from the nearest integer is
/// returned alongside.
pub fn fourier_count(
    table: &CountTable,
    n: usize,
    grid: usize,
) -> Result<(BigUint, f64), FourierError> {
    let f = table.max_edge_weight().max(0) as usize;
    let minimal_valid = 2 * f * n + 1;
    if grid < minimal_valid {
        return Err(FourierError::GridTooCoarse {
            grid,
            minimal_valid,
        });
    }
    // Rounding to the nearest integer is meaningless once counts leave the
    // exact f64 range.
    if table.total(n).bits() > 52 {
        return Err(FourierError::PrecisionExceeded { length: n });
    }
    let dim = table.dim();
    // Grid points are rationals k/M, so each term is a power of the M-th
    // root of unity; index arithmetic avoids per-term trig.
    let mut roots = Vec::with_capacity(grid);
    for k in 0..grid {
        let angle = 2.0 * core::f64::consts::PI * k as f64 / grid as f64;
        roots.push(Complex64::new(angle.cos(), angle.sin()));
    }
    let row = table.sorted_row(n);
    let row_f64: Vec<(&WeightVec, f64)> = row
        .iter()
        .map(|(w, c)| (w, c.to_f64().unwrap_or(f64::INFINITY)))
        .collect();
    let mut acc = Complex64::zero();
    let mut point = vec![0usize; dim];
    loop {
        let mut sum = Complex64::zero();
        for (w, c) in &row_f64 {
            let mut idx: i64 = 0;
            for (d, &k) in point.iter().enumerate() {
                idx += (w.coords()[d] as i64) * k as i64;
            }
            let idx = idx.rem_euclid(grid as i64) as usize;
            sum += roots[idx] * *c;
        }
        acc += sum;
        // Odometer increment over the grid.
        let mut d = 0;
        loop {
            if d == dim {
                break;
            }
            point[d] += 1;
            if point[d] < grid {
                break;
            }
            point[d] = 0;
            d += 1;
        }
        if d == dim {
            break;
        }
    }
    let cells = (grid as f64).powi(dim as i32);
    let value = acc.re / cells;
    let rounded = value.round();
    let residual = (value - rounded).abs();
    let count = if rounded <= 0.0 {
        BigUint::zero()
    } else {
        BigUint::from(rounded as u64)
    };
    Ok((count, residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{fixtures, parse_automaton};
    use crate::weights::EdgeWeighting;

    pub(crate) fn table_for(text: &str, n_max: usize) -> (Automaton, EdgeWeighting, CountTable) {
        let parsed = parse_automaton(text).unwrap();
        let a = parsed.automaton;
        let w = EdgeWeighting::new(&a, parsed.homomorphism.as_ref().unwrap()).unwrap();
        let t = count_by_weight(&a, &w, n_max, &CountBudget::default()).unwrap();
        (a, w, t)
    }

    #[test]
    fn totals_match_free_group_formula() {
        let (_, _, t) = table_for(fixtures::F2_ABELIAN, 12);
        assert_eq!(t.total(0), &BigUint::from(1u32));
        for n in 1..=12usize {
            // 4 * 3^(n-1) reduced words of length n.
            let expect = BigUint::from(4u32) * BigUint::from(3u32).pow(n as u32 - 1);
            assert_eq!(t.total(n), &expect, "n = {n}");
        }
    }

    #[test]
    fn abelianized_zero_counts_start_at_four() {
        let (_, _, t) = table_for(fixtures::F2_ABELIAN, 8);
        // Identity at n = 0.
        assert_eq!(t.zero_count(0), BigUint::from(1u32));
        // No nontrivial relator is shorter than the commutator.
        for n in 1..=3usize {
            assert_eq!(t.zero_count(n), BigUint::zero(), "n = {n}");
        }
        // The eight length-4 commutator-type words.
        assert_eq!(t.zero_count(4), BigUint::from(8u32));
        // Parity: odd lengths cannot balance.
        for n in [1usize, 3, 5, 7] {
            assert_eq!(t.zero_count(n), BigUint::zero(), "n = {n}");
        }
    }

    #[test]
    fn rank1_small_counts() {
        let (_, _, t) = table_for(fixtures::F2_RANK1, 6);
        // Length 1: the two zero-weight letters b, B.
        assert_eq!(t.zero_count(1), BigUint::from(2u32));
        // Length 2: bb and BB only (bB and Bb are not reduced).
        assert_eq!(t.zero_count(2), BigUint::from(2u32));
    }

    #[test]
    fn partition_and_symmetry_invariants() {
        for text in [fixtures::F2_ABELIAN, fixtures::F2_RANK1] {
            let (_, _, t) = table_for(text, 10);
            for n in 0..=10usize {
                let sum: BigUint = t.rows[n].values().sum();
                assert_eq!(&sum, t.total(n), "partition at n = {n}");
                for (w, c) in t.rows[n].iter() {
                    assert_eq!(&t.count(n, &w.negated()), c, "symmetry at n = {n}, w = {w}");
                }
            }
        }
    }

    #[test]
    fn support_bound_respected() {
        let (_, w, t) = table_for(fixtures::F2_ABELIAN, 9);
        let f = w.max_abs();
        for n in 0..=9usize {
            for (weight, count) in t.rows[n].iter() {
                assert!(!count.is_zero());
                assert!(weight.max_abs() <= f * n as i64);
            }
        }
    }

    #[test]
    fn budget_rejects_oversized_request() {
        let parsed = parse_automaton(fixtures::F2_ABELIAN).unwrap();
        let a = parsed.automaton;
        let w = EdgeWeighting::new(&a, parsed.homomorphism.as_ref().unwrap()).unwrap();
        let tight = CountBudget { max_entries: 10 };
        match count_by_weight(&a, &w, 50, &tight) {
            Err(CountError::BudgetExceeded { .. }) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn character_sum_at_zero_is_total() {
        let (_, _, t) = table_for(fixtures::F2_ABELIAN, 8);
        for n in [0usize, 3, 8] {
            let s = t.character_sum(n, &[0.0, 0.0]);
            let total = t.total(n).to_f64().unwrap();
            assert!((s.re - total).abs() < 1e-9 * total.max(1.0));
            assert!(s.im.abs() < 1e-9 * total.max(1.0));
        }
    }

    #[test]
    fn character_sum_at_half_half_sees_parity() {
        let (_, _, t) = table_for(fixtures::F2_ABELIAN, 4);
        // Length-2 words all have even coordinate sum, so every phase is +1.
        let s = t.character_sum(2, &[0.5, 0.5]);
        assert!((s.re - 12.0).abs() < 1e-9, "{s}");
        // Length-1 words all have odd coordinate sum: every phase is -1.
        let s1 = t.character_sum(1, &[0.5, 0.5]);
        assert!((s1.re + 4.0).abs() < 1e-9, "{s1}");
    }

    #[test]
    fn fourier_count_matches_table() {
        let (_, _, t) = table_for(fixtures::F2_ABELIAN, 6);
        let (count, residual) = fourier_count(&t, 4, 16).unwrap();
        assert_eq!(count, BigUint::from(8u32));
        assert!(residual < 0.5);
        // n = 0 works on any grid >= 1.
        let (count0, _) = fourier_count(&t, 0, 1).unwrap();
        assert_eq!(count0, BigUint::from(1u32));
        // Rank-1 weighting at n = 6, grid 16 > 12.
        let (_, _, t1) = table_for(fixtures::F2_RANK1, 6);
        let (count6, residual6) = fourier_count(&t1, 6, 16).unwrap();
        assert_eq!(count6, t1.zero_count(6));
        assert!(residual6 < 0.5);
    }

    #[test]
    fn fourier_count_reports_minimal_grid() {
        let (_, _, t) = table_for(fixtures::F2_ABELIAN, 8);
        match fourier_count(&t, 8, 16) {
            Err(FourierError::GridTooCoarse { minimal_valid, .. }) => {
                assert_eq!(minimal_valid, 17);
            }
            other => panic!("expected GridTooCoarse, got {other:?}"),
        }
    }
}
