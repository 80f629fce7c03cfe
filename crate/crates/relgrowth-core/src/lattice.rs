//! Integer lattices generated by cycle weights.
//!
//! For a maximal component with period p, two lattices in `Z^nu` matter:
//! the group Gamma generated by all cycle weights, and the subgroup Delta
//! generated by differences of weights of equal-length cycles. Gamma/Delta
//! is cyclic, generated by the coset of `c = w(gamma) - w(gamma')` for any
//! cycle pair with length difference p; its order D, together with p,
//! controls which sphere radii can carry zero-weight elements. The dual
//! point set of Delta (the rational torus points pairing integrally with
//! every Delta vector) is exactly where the character-twisted transfer
//! matrix recovers the full spectral radius, which gives an independent
//! spectral cross-check on the whole computation.
//!
//! Lattices are kept in Hermite normal form: basis vectors are rows,
//! echelonized left to right, pivots positive, entries above each pivot
//! reduced into `[0, pivot)`. This form is unique per lattice, so equality
//! of lattices is equality of bases.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Zero;

use crate::automaton::Automaton;
use crate::components::ComponentAnalysis;
use crate::weights::{EdgeWeighting, WeightVec};

pub type TorusPoint = Vec<Ratio<i128>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeError {
    TrivialComponent {
        component: usize,
    },
    BaseNotInComponent {
        base: usize,
        component: usize,
    },
    WeightSetBudgetExceeded {
        budget: usize,
    },
    /// Delta kept changing up to the cutoff; manual cycle-length cutoff
    /// needed.
    NotStabilized {
        cutoff: usize,
    },
    /// rank(Gamma) < ambient dimension: the weighting cannot come from a
    /// surjective homomorphism with finite quotient data.
    RankDeficient {
        rank: usize,
        ambient: usize,
    },
    /// No finite k with k*c in Delta below the search bound.
    InfiniteIndex {
        bound: u64,
    },
    /// No two cycle lengths below the cutoff differ by the period, so no
    /// step class can be chosen.
    NoStepPair {
        cutoff: usize,
    },
    DualOfDeficientLattice {
        rank: usize,
        ambient: usize,
    },
}

impl core::fmt::Display for LatticeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            LatticeError::TrivialComponent { component } => {
                write!(f, "component {component} has no cycles")
            }
            LatticeError::BaseNotInComponent { base, component } => {
                write!(f, "base vertex {base} not in component {component}")
            }
            LatticeError::WeightSetBudgetExceeded { budget } => {
                write!(f, "cycle weight sets exceed budget {budget}")
            }
            LatticeError::NotStabilized { cutoff } => write!(
                f,
                "difference lattice did not stabilize by cycle length {cutoff}; supply a longer cutoff"
            ),
            LatticeError::RankDeficient { rank, ambient } => write!(
                f,
                "cycle-weight group has rank {rank} < {ambient}; weights do not span the quotient"
            ),
            LatticeError::InfiniteIndex { bound } => {
                write!(f, "no multiple of the step class falls in the difference lattice (searched to {bound})")
            }
            LatticeError::NoStepPair { cutoff } => {
                write!(f, "no cycle-length pair differing by the period below length {cutoff}")
            }
            LatticeError::DualOfDeficientLattice { rank, ambient } => write!(
                f,
                "dual point set of a rank-{rank} lattice in dimension {ambient} is infinite"
            ),
        }
    }
}

impl core::error::Error for LatticeError {}

/// Lattice in `Z^ambient`, stored as a canonical Hermite-normal-form row
/// basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerLattice {
    ambient: usize,
    basis: Vec<Vec<i128>>,
}

fn hnf_rows(ambient: usize, mut rows: Vec<Vec<i128>>) -> Vec<Vec<i128>> {
    rows.retain(|r| r.iter().any(|&x| x != 0));
    let mut rank = 0usize;
    for col in 0..ambient {
        // Clear column `col` below the current rank by gcd steps.
        loop {
            let mut pivot_row: Option<usize> = None;
            for (i, row) in rows.iter().enumerate().skip(rank) {
                if row[col] != 0 {
                    pivot_row = Some(match pivot_row {
                        Some(p) if rows[p][col].abs() <= row[col].abs() => p,
                        _ => i,
                    });
                }
            }
            let Some(p) = pivot_row else { break };
            rows.swap(rank, p);
            let mut any_left = false;
            for i in rank + 1..rows.len() {
                if rows[i][col] != 0 {
                    let q = rows[i][col].div_euclid(rows[rank][col]);
                    for k in 0..ambient {
                        let sub = q * rows[rank][k];
                        rows[i][k] -= sub;
                    }
                    if rows[i][col] != 0 {
                        any_left = true;
                    }
                }
            }
            if !any_left {
                break;
            }
        }
        if rank < rows.len() && rows[rank][col] != 0 {
            if rows[rank][col] < 0 {
                for k in 0..ambient {
                    rows[rank][k] = -rows[rank][k];
                }
            }
            // Reduce the entries above the pivot into [0, pivot).
            let pivot = rows[rank][col];
            for i in 0..rank {
                let q = rows[i][col].div_euclid(pivot);
                if q != 0 {
                    for k in 0..ambient {
                        let sub = q * rows[rank][k];
                        rows[i][k] -= sub;
                    }
                }
            }
            rank += 1;
        }
    }
    rows.truncate(rank);
    rows
}

impl IntegerLattice {
    pub fn zero(ambient: usize) -> Self {
        IntegerLattice {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn from_generators<I>(ambient: usize, generators: I) -> Self
    where
        I: IntoIterator<Item = Vec<i128>>,
    {
        let rows: Vec<Vec<i128>> = generators.into_iter().collect();
        for r in &rows {
            assert_eq!(r.len(), ambient);
        }
        IntegerLattice {
            ambient,
            basis: hnf_rows(ambient, rows),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<i128>] {
        &self.basis
    }

    /// Exact membership by reduction against the echelon basis.
    pub fn contains(&self, v: &[i128]) -> bool {
        debug_assert_eq!(v.len(), self.ambient);
        let mut rem: Vec<i128> = v.to_vec();
        for row in &self.basis {
            let col = row.iter().position(|&x| x != 0).unwrap();
            if rem[col] != 0 {
                let (q, r) = rem[col].div_rem(&row[col]);
                if r != 0 {
                    return false;
                }
                for k in 0..self.ambient {
                    rem[k] -= q * row[k];
                }
            }
        }
        rem.iter().all(|&x| x == 0)
    }

    /// Index `[Z^ambient : L]`: the product of HNF pivots, defined only
    /// for full-rank lattices.
    pub fn index_in_ambient(&self) -> Option<u128> {
        if self.rank() != self.ambient {
            return None;
        }
        let mut det: u128 = 1;
        for (i, row) in self.basis.iter().enumerate() {
            det *= row[i].unsigned_abs();
        }
        Some(det)
    }

    pub fn is_sublattice_of(&self, other: &IntegerLattice) -> bool {
        self.basis.iter().all(|row| other.contains(row))
    }
}

/// Resource cap for cycle-weight enumeration.
#[derive(Clone, Copy, Debug)]
pub struct LatticeBudget {
    pub max_weights: usize,
    /// Search bound for the order of the step class in Gamma/Delta.
    pub index_bound: u64,
}

impl Default for LatticeBudget {
    fn default() -> Self {
        LatticeBudget {
            max_weights: 5_000_000,
            index_bound: 1 << 20,
        }
    }
}

/// Weight sets of closed walks through `base` inside one component, for
/// every length up to `max_len`. Lengths with no closed walk are absent.
pub fn cycle_weight_data(
    a: &Automaton,
    weighting: &EdgeWeighting,
    analysis: &ComponentAnalysis,
    component: usize,
    base: usize,
    max_len: usize,
    budget: &LatticeBudget,
) -> Result<BTreeMap<usize, BTreeSet<WeightVec>>, LatticeError> {
    let comp = &analysis.components[component];
    if comp.is_trivial() {
        return Err(LatticeError::TrivialComponent { component });
    }
    if !comp.vertices.contains(&base) {
        return Err(LatticeError::BaseNotInComponent { base, component });
    }
    let in_comp: hashbrown::HashSet<usize> = comp.vertices.iter().copied().collect();
    // Edges internal to the component, with weights.
    let mut internal: Vec<(usize, usize, WeightVec)> = Vec::new();
    for (i, e) in a.edges().iter().enumerate() {
        if in_comp.contains(&e.from) && in_comp.contains(&e.to) {
            internal.push((e.from, e.to, weighting.weight(i)));
        }
    }
    let dim = weighting.dim();
    let mut state: BTreeMap<usize, BTreeSet<WeightVec>> = BTreeMap::new();
    state.entry(base).or_default().insert(WeightVec::zero(dim));
    let mut out: BTreeMap<usize, BTreeSet<WeightVec>> = BTreeMap::new();
    let mut stored = 0usize;
    for len in 1..=max_len {
        let mut next: BTreeMap<usize, BTreeSet<WeightVec>> = BTreeMap::new();
        for (from, to, ew) in &internal {
            if let Some(weights) = state.get(from) {
                for w in weights {
                    let nw =
                        w.checked_add(ew)
                            .map_err(|_| LatticeError::WeightSetBudgetExceeded {
                                budget: budget.max_weights,
                            })?;
                    next.entry(*to).or_default().insert(nw);
                }
            }
        }
        stored += next.values().map(|s| s.len()).sum::<usize>();
        if stored > budget.max_weights {
            return Err(LatticeError::WeightSetBudgetExceeded {
                budget: budget.max_weights,
            });
        }
        if let Some(at_base) = next.get(&base) {
            if !at_base.is_empty() {
                out.insert(len, at_base.clone());
            }
        }
        state = next;
    }
    Ok(out)
}

/// Union over all base vertices of the closed-walk weight sets.
fn all_cycle_weights(
    a: &Automaton,
    weighting: &EdgeWeighting,
    analysis: &ComponentAnalysis,
    component: usize,
    max_len: usize,
    budget: &LatticeBudget,
) -> Result<BTreeMap<usize, BTreeSet<WeightVec>>, LatticeError> {
    let comp = &analysis.components[component];
    let mut merged: BTreeMap<usize, BTreeSet<WeightVec>> = BTreeMap::new();
    for &base in &comp.vertices {
        let per_base = cycle_weight_data(a, weighting, analysis, component, base, max_len, budget)?;
        for (len, set) in per_base {
            merged.entry(len).or_default().extend(set);
        }
    }
    Ok(merged)
}

fn to_i128(w: &WeightVec) -> Vec<i128> {
    w.coords().iter().map(|&c| c as i128).collect()
}

/// Difference lattice from cycles of length at most `max_len`: generated
/// by `w - ref_l` over each length class, with `ref_l` the lexicographic
/// minimum of the class.
pub fn delta_lattice_with_cutoff(
    a: &Automaton,
    weighting: &EdgeWeighting,
    analysis: &ComponentAnalysis,
    component: usize,
    max_len: usize,
    budget: &LatticeBudget,
) -> Result<IntegerLattice, LatticeError> {
    let weights = all_cycle_weights(a, weighting, analysis, component, max_len, budget)?;
    let dim = weighting.dim();
    let mut generators: Vec<Vec<i128>> = Vec::new();
    for set in weights.values() {
        let reference = set.iter().next().expect("nonempty length class");
        let rv = to_i128(reference);
        for w in set.iter().skip(1) {
            let wv = to_i128(w);
            generators.push(wv.iter().zip(rv.iter()).map(|(x, y)| x - y).collect());
        }
    }
    Ok(IntegerLattice::from_generators(dim, generators))
}

fn gamma_lattice_with_cutoff(
    a: &Automaton,
    weighting: &EdgeWeighting,
    analysis: &ComponentAnalysis,
    component: usize,
    max_len: usize,
    budget: &LatticeBudget,
) -> Result<IntegerLattice, LatticeError> {
    let weights = all_cycle_weights(a, weighting, analysis, component, max_len, budget)?;
    let dim = weighting.dim();
    let generators = weights
        .values()
        .flat_map(|set| set.iter().map(to_i128))
        .collect::<Vec<_>>();
    Ok(IntegerLattice::from_generators(dim, generators))
}

/// Difference lattice with the stabilization rule: start the cycle-length
/// cutoff at `2 |V|`, step by `|V|`, accept once two consecutive cutoffs
/// agree, give up past `8 |V|`.
pub fn delta_lattice(
    a: &Automaton,
    weighting: &EdgeWeighting,
    analysis: &ComponentAnalysis,
    component: usize,
    budget: &LatticeBudget,
) -> Result<IntegerLattice, LatticeError> {
    let n = a.vertex_count();
    let mut cutoff = 2 * n;
    let mut current = delta_lattice_with_cutoff(a, weighting, analysis, component, cutoff, budget)?;
    while cutoff <= 8 * n {
        let next_cutoff = cutoff + n;
        let next =
            delta_lattice_with_cutoff(a, weighting, analysis, component, next_cutoff, budget)?;
        if next == current {
            return Ok(current);
        }
        current = next;
        cutoff = next_cutoff;
    }
    Err(LatticeError::NotStabilized { cutoff })
}

/// Quotient data of one maximal component.
#[derive(Clone, Debug)]
pub struct ComponentLattices {
    /// Index into the analysis' component list.
    pub component: usize,
    pub period: usize,
    pub gamma: IntegerLattice,
    pub delta: IntegerLattice,
    /// Difference of cycle weights with length difference `period`
    /// (lexicographically smallest qualifying pair).
    pub step_class: Vec<i128>,
    /// Order of the step class in Gamma/Delta.
    pub index: u64,
    /// Cycle-length cutoff at which the lattices stabilized.
    pub cutoff: usize,
}

/// Compute Gamma, Delta, the step class and its order for one maximal
/// component. Both lattices follow the stabilization rule jointly.
pub fn group_indices(
    a: &Automaton,
    weighting: &EdgeWeighting,
    analysis: &ComponentAnalysis,
    component: usize,
    budget: &LatticeBudget,
) -> Result<ComponentLattices, LatticeError> {
    let comp = &analysis.components[component];
    let period = comp
        .period
        .ok_or(LatticeError::TrivialComponent { component })?;
    let n = a.vertex_count();
    let dim = weighting.dim();

    let mut cutoff = 2 * n;
    let mut delta = delta_lattice_with_cutoff(a, weighting, analysis, component, cutoff, budget)?;
    let mut gamma = gamma_lattice_with_cutoff(a, weighting, analysis, component, cutoff, budget)?;
    let mut stabilized = false;
    while cutoff <= 8 * n {
        let next_cutoff = cutoff + n;
        let next_delta =
            delta_lattice_with_cutoff(a, weighting, analysis, component, next_cutoff, budget)?;
        let next_gamma =
            gamma_lattice_with_cutoff(a, weighting, analysis, component, next_cutoff, budget)?;
        if next_delta == delta && next_gamma == gamma {
            stabilized = true;
            break;
        }
        delta = next_delta;
        gamma = next_gamma;
        cutoff = next_cutoff;
    }
    if !stabilized {
        return Err(LatticeError::NotStabilized { cutoff });
    }

    if gamma.rank() < dim {
        return Err(LatticeError::RankDeficient {
            rank: gamma.rank(),
            ambient: dim,
        });
    }

    // Step class: lexicographically smallest pair of cycle weights whose
    // lengths differ by the period.
    let weights = all_cycle_weights(a, weighting, analysis, component, cutoff + period, budget)?;
    let mut step_class: Option<Vec<i128>> = None;
    for (&len, set) in &weights {
        if let Some(longer) = weights.get(&(len + period)) {
            let short_ref = to_i128(set.iter().next().unwrap());
            let long_ref = to_i128(longer.iter().next().unwrap());
            step_class = Some(
                long_ref
                    .iter()
                    .zip(short_ref.iter())
                    .map(|(x, y)| x - y)
                    .collect(),
            );
            break;
        }
    }
    let step_class = step_class.ok_or(LatticeError::NoStepPair {
        cutoff: cutoff + period,
    })?;

    // Order of the step class in Gamma/Delta.
    let mut index = None;
    let mut multiple = vec![0i128; dim];
    for k in 1..=budget.index_bound {
        for (m, s) in multiple.iter_mut().zip(step_class.iter()) {
            *m += s;
        }
        if delta.contains(&multiple) {
            index = Some(k);
            break;
        }
    }
    let index = index.ok_or(LatticeError::InfiniteIndex {
        bound: budget.index_bound,
    })?;

    Ok(ComponentLattices {
        component,
        period,
        gamma,
        delta,
        step_class,
        index,
        cutoff,
    })
}

/// Common period data aggregated over all maximal components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalPeriod {
    /// Least common multiple of lcm(p_j, D_j): the densest subsequence on
    /// which every phase in the spectral expansion is trivial.
    pub lcm: u64,
    /// Product of all p_j and D_j, reported alongside.
    pub product: u64,
}

pub fn global_period(pairs: &[(usize, u64)]) -> GlobalPeriod {
    let mut l: u64 = 1;
    let mut product: u64 = 1;
    for &(p, d) in pairs {
        l = l.lcm(&(p as u64).lcm(&d));
        product = product.saturating_mul(p as u64).saturating_mul(d);
    }
    GlobalPeriod { lcm: l, product }
}

/// Full lattice report over all maximal components.
#[derive(Clone, Debug)]
pub struct LatticeReport {
    pub per_component: Vec<ComponentLattices>,
    pub global: GlobalPeriod,
}

pub fn analyze_lattices(
    a: &Automaton,
    weighting: &EdgeWeighting,
    analysis: &ComponentAnalysis,
    budget: &LatticeBudget,
) -> Result<LatticeReport, LatticeError> {
    let mut per_component = Vec::new();
    for &comp in &analysis.maximal_indices {
        per_component.push(group_indices(a, weighting, analysis, comp, budget)?);
    }
    let pairs: Vec<(usize, u64)> = per_component.iter().map(|c| (c.period, c.index)).collect();
    Ok(LatticeReport {
        per_component,
        global: global_period(&pairs),
    })
}

/// All rational torus points pairing integrally with every lattice vector.
/// Requires full rank (otherwise the set is a positive-dimensional torus).
/// Solved through the triangular HNF structure, last coordinate first;
/// the result has exactly `[Z^nu : L]` points, sorted.
pub fn dual_points(lattice: &IntegerLattice) -> Result<Vec<TorusPoint>, LatticeError> {
    let nu = lattice.ambient();
    if lattice.rank() != nu {
        return Err(LatticeError::DualOfDeficientLattice {
            rank: lattice.rank(),
            ambient: nu,
        });
    }
    // Full-rank HNF: basis row i has its pivot at column i.
    let basis = lattice.basis();
    let mut points: Vec<TorusPoint> = Vec::new();
    let mut partial: Vec<Ratio<i128>> = vec![Ratio::zero(); nu];
    fn assign(
        basis: &[Vec<i128>],
        nu: usize,
        i: usize,
        partial: &mut Vec<Ratio<i128>>,
        points: &mut Vec<TorusPoint>,
    ) {
        let pivot = basis[i][i];
        // <t, row_i> = pivot * t_i + tail must be an integer.
        let tail: Ratio<i128> = (i + 1..nu)
            .map(|j| Ratio::from_integer(basis[i][j]) * partial[j])
            .sum();
        for z in 0..pivot {
            // t_i = (z - frac(tail)) / pivot reduced into [0, 1).
            let mut ti = (Ratio::from_integer(z) - tail) / Ratio::from_integer(pivot);
            // Reduce into [0, 1).
            let floor = ti.floor();
            ti -= floor;
            partial[i] = ti;
            if i == 0 {
                points.push(partial.clone());
            } else {
                assign(basis, nu, i - 1, partial, points);
            }
        }
    }
    assign(basis, nu, nu - 1, &mut partial, &mut points);
    points.sort();
    points.dedup();
    debug_assert_eq!(points.len() as u128, lattice.index_in_ambient().unwrap());
    Ok(points)
}

/// Outcome of the cocycle test at a rational torus point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CohomologyVerdict {
    /// `<t, f>` is cohomologous to this constant (mod 1).
    Constant(Ratio<i128>),
    /// Not cohomologous to any constant; the witness is a difference of
    /// equal-length cycle weights pairing non-integrally with t.
    NotCohomologous { witness: Vec<i128> },
}

/// `<t, f>` is cohomologous to a constant on the component if and only if
/// t pairs integrally with every difference of equal-length cycle weights;
/// the constant is then the common cycle average.
pub fn cohomology_test(
    t: &[Ratio<i128>],
    lattices: &ComponentLattices,
    a: &Automaton,
    weighting: &EdgeWeighting,
    analysis: &ComponentAnalysis,
    budget: &LatticeBudget,
) -> Result<CohomologyVerdict, LatticeError> {
    for row in lattices.delta.basis() {
        let pairing: Ratio<i128> = row
            .iter()
            .zip(t.iter())
            .map(|(&c, ti)| Ratio::from_integer(c) * ti)
            .sum();
        if !pairing.is_integer() {
            return Ok(CohomologyVerdict::NotCohomologous {
                witness: row.clone(),
            });
        }
    }
    // Reference cycle: shortest length class, lexicographically smallest
    // weight.
    let weights = all_cycle_weights(
        a,
        weighting,
        analysis,
        lattices.component,
        lattices.cutoff,
        budget,
    )?;
    let (&len, set) = weights
        .iter()
        .next()
        .ok_or(LatticeError::TrivialComponent {
            component: lattices.component,
        })?;
    let reference = to_i128(set.iter().next().unwrap());
    let mut value: Ratio<i128> = reference
        .iter()
        .zip(t.iter())
        .map(|(&c, ti)| Ratio::from_integer(c) * ti)
        .sum();
    value /= Ratio::from_integer(len as i128);
    let floor = value.floor();
    value -= floor;
    Ok(CohomologyVerdict::Constant(value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{fixtures, parse_automaton};
    use crate::components::decompose;

    fn setup(text: &str) -> (Automaton, EdgeWeighting, ComponentAnalysis) {
        let parsed = parse_automaton(text).unwrap();
        let a = parsed.automaton;
        let w = EdgeWeighting::new(&a, parsed.homomorphism.as_ref().unwrap()).unwrap();
        let analysis = decompose(&a).unwrap();
        (a, w, analysis)
    }

    fn wv(coords: &[i64]) -> WeightVec {
        WeightVec::from_slice(coords).unwrap()
    }

    #[test]
    fn cycle_weights_through_base_a() {
        let (a, w, analysis) = setup(fixtures::F2_ABELIAN);
        let comp = analysis.maximal_indices[0];
        let base = a.vertex_index("a").unwrap();
        let data =
            cycle_weight_data(&a, &w, &analysis, comp, base, 4, &LatticeBudget::default()).unwrap();
        // Length 1: only the self-loop at a.
        assert_eq!(data[&1], BTreeSet::from([wv(&[1, 0])]),);
        // Length 2: doubled self-loop plus the two detours through b, B.
        assert_eq!(
            data[&2],
            BTreeSet::from([wv(&[2, 0]), wv(&[1, 1]), wv(&[1, -1])]),
        );
        // Period-1 component: every length present.
        assert_eq!(data.keys().copied().collect::<Vec<_>>(), vec![1, 2, 3, 4]);
    }

    #[test]
    fn cycle_lengths_are_period_multiples() {
        let (a, w, analysis) = setup(fixtures::PERIOD2_RICH);
        let comp = analysis.maximal_indices[0];
        let (p, _) = analysis.cyclic_period(comp).unwrap();
        assert_eq!(p, 2);
        let base = analysis.components[comp].vertices[0];
        let data =
            cycle_weight_data(&a, &w, &analysis, comp, base, 8, &LatticeBudget::default()).unwrap();
        assert!(!data.is_empty());
        for len in data.keys() {
            assert_eq!(len % p, 0, "length {len} not a multiple of {p}");
        }
    }

    #[test]
    fn trivial_component_rejected() {
        let (a, w, analysis) = setup(fixtures::F2_ABELIAN);
        let star_comp = analysis.component_of[a.initial()];
        assert!(matches!(
            cycle_weight_data(
                &a,
                &w,
                &analysis,
                star_comp,
                a.initial(),
                4,
                &LatticeBudget::default()
            ),
            Err(LatticeError::TrivialComponent { .. })
        ));
    }

    #[test]
    fn delta_is_even_sum_lattice_for_abelianized_fixture() {
        let (a, w, analysis) = setup(fixtures::F2_ABELIAN);
        let comp = analysis.maximal_indices[0];
        let delta = delta_lattice(&a, &w, &analysis, comp, &LatticeBudget::default()).unwrap();
        assert_eq!(delta.basis(), &[vec![1, 1], vec![0, 2]]);
        assert!(delta.contains(&[3, 1]));
        assert!(delta.contains(&[-1, 1]));
        assert!(!delta.contains(&[1, 0]));
        assert_eq!(delta.index_in_ambient(), Some(2));
    }

    #[test]
    fn rank1_delta_is_full_line() {
        let (a, w, analysis) = setup(fixtures::F2_RANK1);
        let comp = analysis.maximal_indices[0];
        let delta = delta_lattice(&a, &w, &analysis, comp, &LatticeBudget::default()).unwrap();
        assert_eq!(delta.basis(), &[vec![1]]);
    }

    #[test]
    fn zero_weight_delta_is_zero_lattice() {
        let (a, w, analysis) = setup(fixtures::ZERO_WEIGHT);
        let comp = analysis.maximal_indices[0];
        let delta = delta_lattice(&a, &w, &analysis, comp, &LatticeBudget::default()).unwrap();
        assert_eq!(delta.rank(), 0);
        // Quotient data must refuse the degenerate input.
        assert!(matches!(
            group_indices(&a, &w, &analysis, comp, &LatticeBudget::default()),
            Err(LatticeError::RankDeficient { rank: 0, .. })
        ));
    }

    #[test]
    fn group_indices_on_both_free_group_fixtures() {
        let (a, w, analysis) = setup(fixtures::F2_ABELIAN);
        let comp = analysis.maximal_indices[0];
        let data = group_indices(&a, &w, &analysis, comp, &LatticeBudget::default()).unwrap();
        assert_eq!(data.period, 1);
        assert_eq!(data.gamma.basis(), &[vec![1, 0], vec![0, 1]]);
        assert_eq!(data.delta.index_in_ambient(), Some(2));
        assert_eq!(data.index, 2);
        // Step class has odd coordinate sum.
        let sum: i128 = data.step_class.iter().sum();
        assert_eq!(sum.rem_euclid(2), 1);
        // Delta is a sublattice of Gamma; generators pass membership.
        assert!(data.delta.is_sublattice_of(&data.gamma));
        // Cross-check D = [Z^2:Delta] / [Z^2:Gamma].
        assert_eq!(
            data.delta.index_in_ambient().unwrap() / data.gamma.index_in_ambient().unwrap(),
            data.index as u128
        );

        let (a1, w1, analysis1) = setup(fixtures::F2_RANK1);
        let comp1 = analysis1.maximal_indices[0];
        let data1 = group_indices(&a1, &w1, &analysis1, comp1, &LatticeBudget::default()).unwrap();
        assert_eq!(data1.period, 1);
        assert_eq!(data1.index, 1);
        assert_eq!(data1.gamma.basis(), &[vec![1]]);
        assert_eq!(data1.delta.basis(), &[vec![1]]);
    }

    #[test]
    fn step_class_coset_is_choice_independent() {
        let (a, w, analysis) = setup(fixtures::F2_ABELIAN);
        let comp = analysis.maximal_indices[0];
        let data = group_indices(&a, &w, &analysis, comp, &LatticeBudget::default()).unwrap();
        // A second qualifying pair: lengths (2, 3) instead of (1, 2).
        let weights =
            all_cycle_weights(&a, &w, &analysis, comp, 3, &LatticeBudget::default()).unwrap();
        let ref2 = to_i128(weights[&2].iter().next().unwrap());
        let ref3 = to_i128(weights[&3].iter().next().unwrap());
        let alt: Vec<i128> = ref3.iter().zip(ref2.iter()).map(|(x, y)| x - y).collect();
        let diff: Vec<i128> = alt
            .iter()
            .zip(data.step_class.iter())
            .map(|(x, y)| x - y)
            .collect();
        assert!(data.delta.contains(&diff), "cosets differ");
    }

    #[test]
    fn global_period_arithmetic() {
        assert_eq!(
            global_period(&[(1, 2)]),
            GlobalPeriod { lcm: 2, product: 2 }
        );
        assert_eq!(
            global_period(&[(1, 1)]),
            GlobalPeriod { lcm: 1, product: 1 }
        );
        assert_eq!(
            global_period(&[(2, 1), (1, 3)]),
            GlobalPeriod { lcm: 6, product: 6 }
        );
    }

    #[test]
    fn dual_points_of_known_lattices() {
        let even = IntegerLattice::from_generators(2, vec![vec![1, 1], vec![0, 2]]);
        let pts = dual_points(&even).unwrap();
        let half = Ratio::new(1i128, 2i128);
        let zero = Ratio::zero();
        assert_eq!(pts, vec![vec![zero, zero], vec![half, half]]);

        let z = IntegerLattice::from_generators(1, vec![vec![1]]);
        assert_eq!(dual_points(&z).unwrap(), vec![vec![zero]]);

        let stretched = IntegerLattice::from_generators(2, vec![vec![2, 0], vec![0, 1]]);
        assert_eq!(
            dual_points(&stretched).unwrap(),
            vec![vec![zero, zero], vec![half, zero]]
        );

        let deficient = IntegerLattice::from_generators(2, vec![vec![1, 1]]);
        assert!(matches!(
            dual_points(&deficient),
            Err(LatticeError::DualOfDeficientLattice { .. })
        ));
    }

    #[test]
    fn dual_count_equals_index() {
        // A few full-rank lattices in dimensions 2 and 3.
        let cases = vec![
            IntegerLattice::from_generators(2, vec![vec![2, 1], vec![-1, 3]]),
            IntegerLattice::from_generators(2, vec![vec![4, 0], vec![1, 2]]),
            IntegerLattice::from_generators(3, vec![vec![1, 0, 1], vec![0, 2, 1], vec![0, 0, 3]]),
        ];
        for lat in cases {
            let pts = dual_points(&lat).unwrap();
            assert_eq!(pts.len() as u128, lat.index_in_ambient().unwrap());
            // Every point pairs integrally with every basis vector.
            for p in &pts {
                for row in lat.basis() {
                    let pairing: Ratio<i128> = row
                        .iter()
                        .zip(p.iter())
                        .map(|(&c, ti)| Ratio::from_integer(c) * ti)
                        .sum();
                    assert!(pairing.is_integer());
                }
            }
        }
    }

    #[test]
    fn cohomology_verdicts_on_abelianized_fixture() {
        let (a, w, analysis) = setup(fixtures::F2_ABELIAN);
        let comp = analysis.maximal_indices[0];
        let data = group_indices(&a, &w, &analysis, comp, &LatticeBudget::default()).unwrap();
        let budget = LatticeBudget::default();

        let zero = vec![Ratio::zero(), Ratio::zero()];
        match cohomology_test(&zero, &data, &a, &w, &analysis, &budget).unwrap() {
            CohomologyVerdict::Constant(c) => assert!(c.is_zero()),
            other => panic!("{other:?}"),
        }

        let half = vec![Ratio::new(1, 2), Ratio::new(1, 2)];
        match cohomology_test(&half, &data, &a, &w, &analysis, &budget).unwrap() {
            CohomologyVerdict::Constant(c) => assert_eq!(c, Ratio::new(1, 2)),
            other => panic!("{other:?}"),
        }

        let third = vec![Ratio::new(1, 3), Ratio::zero()];
        match cohomology_test(&third, &data, &a, &w, &analysis, &budget).unwrap() {
            CohomologyVerdict::NotCohomologous { witness } => {
                let pairing: Ratio<i128> = witness
                    .iter()
                    .zip(third.iter())
                    .map(|(&c, ti)| Ratio::from_integer(c) * ti)
                    .sum();
                assert!(!pairing.is_integer());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn weighted_period_two_quotient_data() {
        let (a, w, analysis) = setup(fixtures::PERIOD2_WEIGHTED);
        let comp = analysis.maximal_indices[0];
        let (p, _) = analysis.cyclic_period(comp).unwrap();
        assert_eq!(p, 2);
        let base = a.vertex_index("x1").unwrap();
        let data =
            cycle_weight_data(&a, &w, &analysis, comp, base, 4, &LatticeBudget::default()).unwrap();
        assert_eq!(data[&2], BTreeSet::from([wv(&[0]), wv(&[2])]));
        let quotient = group_indices(&a, &w, &analysis, comp, &LatticeBudget::default()).unwrap();
        assert_eq!(quotient.delta.basis(), &[vec![2]]);
        assert_eq!(quotient.gamma.basis(), &[vec![2]]);
        // Step class from lengths (2, 4) is the zero vector: the quotient
        // is trivial even though the period is 2.
        assert_eq!(quotient.step_class, vec![0]);
        assert_eq!(quotient.index, 1);
        let global = global_period(&[(quotient.period, quotient.index)]);
        assert_eq!(global.lcm, 2);
        assert_eq!(global.product, 2);
        let duals = dual_points(&quotient.delta).unwrap();
        assert_eq!(duals, vec![vec![Ratio::zero()], vec![Ratio::new(1, 2)]]);
        // At t = 1/4 the twist is not cohomologous to a constant.
        let budget = LatticeBudget::default();
        let quarter = vec![Ratio::new(1i128, 4i128)];
        assert!(matches!(
            cohomology_test(&quarter, &quotient, &a, &w, &analysis, &budget).unwrap(),
            CohomologyVerdict::NotCohomologous { .. }
        ));
        let half = vec![Ratio::new(1i128, 2i128)];
        assert!(matches!(
            cohomology_test(&half, &quotient, &a, &w, &analysis, &budget).unwrap(),
            CohomologyVerdict::Constant(_)
        ));
    }

    #[test]
    fn hnf_idempotent_and_membership_sound() {
        // Deterministic pseudo-random bases; proptest covers more in the
        // integration suite.
        let mut seed = 0x12345678u64;
        let mut next = || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((seed >> 33) as i64 % 19) as i128 - 9
        };
        for _ in 0..200 {
            let dim = 1 + (next().unsigned_abs() as usize % 4);
            let rows = 1 + (next().unsigned_abs() as usize % 5);
            let gens: Vec<Vec<i128>> = (0..rows)
                .map(|_| (0..dim).map(|_| next()).collect())
                .collect();
            let lat = IntegerLattice::from_generators(dim, gens.clone());
            let again = IntegerLattice::from_generators(dim, lat.basis().to_vec());
            assert_eq!(lat, again, "HNF not idempotent for {gens:?}");
            for g in &gens {
                assert!(lat.contains(g), "generator {g:?} fails membership");
            }
        }
    }

    #[test]
    fn stabilization_holds_on_fixtures() {
        for text in [fixtures::F2_ABELIAN, fixtures::F2_RANK1] {
            let (a, w, analysis) = setup(text);
            let comp = analysis.maximal_indices[0];
            let budget = LatticeBudget::default();
            let stable = delta_lattice(&a, &w, &analysis, comp, &budget).unwrap();
            let n = a.vertex_count();
            let longer =
                delta_lattice_with_cutoff(&a, &w, &analysis, comp, 8 * n + n, &budget).unwrap();
            assert_eq!(stable, longer);
        }
    }
}
