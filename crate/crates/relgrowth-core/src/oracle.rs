//! Built-in free-group constructions and a brute-force oracle.
//!
//! Free groups on k >= 2 generators come with a canonical graph: one
//! vertex per signed generator plus the initial vertex, edges wherever the
//! next letter does not cancel the previous one. Paths from the initial
//! vertex are exactly the reduced words, so every count this crate
//! produces can be cross-checked against exhaustive enumeration, which is
//! what `oracle_counts` and `verify_strong_markov` do. The oracle is
//! deliberately independent of the dynamic-programming path: it walks
//! words, not (vertex, weight) states.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use hashbrown::HashMap;
use num_bigint::BigUint;
use num_traits::Zero;

use crate::automaton::{Automaton, Edge, GeneratorSet};
use crate::counting::CountTable;
use crate::weights::{Homomorphism, WeightVec};

/// A free group of rank k >= 2 with a homomorphism to `Z^dim` given on the
/// positive generators (inverses map to negations).
#[derive(Clone, Debug)]
pub struct FreeGroupSpec {
    rank: usize,
    dim: usize,
    images: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleError {
    RankTooSmall { rank: usize },
    RankTooLarge { rank: usize },
    ArityMismatch { expected: usize, got: usize },
    WordBudgetExceeded { budget: u64 },
    GeneratorMismatch { detail: String },
}

impl core::fmt::Display for OracleError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OracleError::RankTooSmall { rank } => {
                write!(f, "free group rank must be at least 2, got {rank}")
            }
            OracleError::RankTooLarge { rank } => {
                write!(f, "free group rank {rank} exceeds the naming range a..z")
            }
            OracleError::ArityMismatch { expected, got } => {
                write!(f, "expected {expected} generator images, got {got}")
            }
            OracleError::WordBudgetExceeded { budget } => {
                write!(f, "enumeration would exceed the word budget {budget}")
            }
            OracleError::GeneratorMismatch { detail } => {
                write!(
                    f,
                    "automaton generators do not match the group spec: {detail}"
                )
            }
        }
    }
}

impl core::error::Error for OracleError {}

impl FreeGroupSpec {
    pub fn new(rank: usize, images: Vec<Vec<i64>>) -> Result<Self, OracleError> {
        if rank < 2 {
            return Err(OracleError::RankTooSmall { rank });
        }
        if rank > 26 {
            return Err(OracleError::RankTooLarge { rank });
        }
        if images.len() != rank {
            return Err(OracleError::ArityMismatch {
                expected: rank,
                got: images.len(),
            });
        }
        let dim = images.first().map(|v| v.len()).unwrap_or(0);
        for img in &images {
            if img.len() != dim {
                return Err(OracleError::ArityMismatch {
                    expected: dim,
                    got: img.len(),
                });
            }
        }
        Ok(FreeGroupSpec { rank, dim, images })
    }

    /// Quotient by the commutator subgroup: rank-many coordinates, the
    /// i-th generator mapping to the i-th basis vector.
    pub fn abelianization(rank: usize) -> Result<Self, OracleError> {
        let images = (0..rank)
            .map(|i| (0..rank).map(|j| i64::from(i == j)).collect())
            .collect();
        FreeGroupSpec::new(rank, images)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Positive generator names a, b, c, ...; inverses are the uppercase
    /// forms.
    pub fn positive_name(&self, i: usize) -> String {
        ((b'a' + i as u8) as char).to_string()
    }

    pub fn inverse_name(&self, i: usize) -> String {
        ((b'A' + i as u8) as char).to_string()
    }

    /// Image of the signed generator 2i (positive) or 2i+1 (inverse).
    fn signed_image(&self, signed: usize) -> Vec<i64> {
        let img = &self.images[signed / 2];
        if signed.is_multiple_of(2) {
            img.clone()
        } else {
            img.iter().map(|c| -c).collect()
        }
    }

    fn signed_name(&self, signed: usize) -> String {
        if signed.is_multiple_of(2) {
            self.positive_name(signed / 2)
        } else {
            self.inverse_name(signed / 2)
        }
    }
}

/// The canonical reduced-word graph: initial vertex, one vertex per signed
/// generator, an edge `x -> y` whenever `y` is not the inverse of `x`,
/// labeled by `y`'s generator.
pub fn build_free_group_automaton(spec: &FreeGroupSpec) -> (Automaton, Homomorphism) {
    let k = spec.rank;
    let signed = 2 * k;
    let mut gen_names = Vec::with_capacity(signed);
    let mut pairs = Vec::with_capacity(k);
    for i in 0..k {
        gen_names.push(spec.positive_name(i));
        gen_names.push(spec.inverse_name(i));
        pairs.push((2 * i, 2 * i + 1));
    }
    let generators = GeneratorSet::new(gen_names, &pairs).expect("canonical involution");

    let mut vertex_names = vec!["*".to_string()];
    for s in 0..signed {
        vertex_names.push(spec.signed_name(s));
    }
    // Vertex s+1 hosts signed generator s.
    let mut edges = Vec::new();
    for s in 0..signed {
        edges.push(Edge {
            from: 0,
            to: s + 1,
            label: s,
        });
    }
    for x in 0..signed {
        for y in 0..signed {
            if y != (x ^ 1) {
                edges.push(Edge {
                    from: x + 1,
                    to: y + 1,
                    label: y,
                });
            }
        }
    }
    let automaton =
        Automaton::new(vertex_names, 0, edges, generators).expect("canonical graph is valid");
    let images = (0..signed).map(|s| spec.signed_image(s)).collect();
    let hom = Homomorphism::new(spec.dim.max(1), images).expect("consistent arity");
    (automaton, hom)
}

/// Exact per-weight counts of reduced words, by exhaustive enumeration.
#[derive(Clone, Debug)]
pub struct OracleBall {
    dim: usize,
    rows: Vec<HashMap<WeightVec, BigUint>>,
    totals: Vec<BigUint>,
}

impl OracleBall {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_max(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn count(&self, n: usize, w: &WeightVec) -> BigUint {
        self.rows[n].get(w).cloned().unwrap_or_else(BigUint::zero)
    }

    pub fn total(&self, n: usize) -> &BigUint {
        &self.totals[n]
    }

    pub fn sorted_row(&self, n: usize) -> Vec<(WeightVec, &BigUint)> {
        let mut row: Vec<(WeightVec, &BigUint)> =
            self.rows[n].iter().map(|(w, c)| (*w, c)).collect();
        row.sort_by_key(|(w, _)| *w);
        row
    }
}

/// Number of reduced words of length up to n_max: 1 + sum 2k (2k-1)^(i-1).
fn words_up_to(rank: usize, n_max: usize) -> u64 {
    let base = (2 * rank) as u64;
    let branch = (2 * rank - 1) as u64;
    let mut total = 1u64;
    let mut layer = 1u64;
    for i in 1..=n_max {
        layer = if i == 1 {
            base
        } else {
            layer.saturating_mul(branch)
        };
        total = total.saturating_add(layer);
    }
    total
}

pub fn oracle_counts(
    spec: &FreeGroupSpec,
    n_max: usize,
    word_budget: u64,
) -> Result<OracleBall, OracleError> {
    if words_up_to(spec.rank, n_max) > word_budget {
        return Err(OracleError::WordBudgetExceeded {
            budget: word_budget,
        });
    }
    let dim = spec.dim.max(1);
    let signed = 2 * spec.rank;
    let signed_weights: Vec<WeightVec> = (0..signed)
        .map(|s| WeightVec::from_slice(&spec.signed_image(s)).expect("desk-scale weights"))
        .collect();
    let mut rows: Vec<HashMap<WeightVec, BigUint>> = vec![HashMap::new(); n_max + 1];
    let mut totals = vec![BigUint::zero(); n_max + 1];
    let zero = WeightVec::zero(dim);
    *rows[0].entry(zero).or_insert_with(BigUint::zero) += 1u32;
    totals[0] += 1u32;
    // Depth-first over reduced words: stack of (last letter, depth, weight).
    let mut stack: Vec<(usize, usize, WeightVec)> = Vec::new();
    if n_max >= 1 {
        for s in 0..signed {
            stack.push((s, 1, signed_weights[s]));
        }
    }
    while let Some((last, depth, weight)) = stack.pop() {
        *rows[depth].entry(weight).or_insert_with(BigUint::zero) += 1u32;
        totals[depth] += 1u32;
        if depth < n_max {
            for s in 0..signed {
                if s != (last ^ 1) {
                    let w = weight
                        .checked_add(&signed_weights[s])
                        .expect("weights bounded by n * F");
                    stack.push((s, depth + 1, w));
                }
            }
        }
    }
    Ok(OracleBall { dim, rows, totals })
}

/// First mismatch between a count table and the oracle, if any.
pub fn compare_with_table(
    ball: &OracleBall,
    table: &CountTable,
    up_to: usize,
) -> Option<(usize, WeightVec)> {
    for n in 0..=up_to.min(ball.n_max()).min(table.n_max()) {
        let oracle_row = ball.sorted_row(n);
        let table_row = table.sorted_row(n);
        if oracle_row.len() != table_row.len() {
            // Some weight present on one side only; find it.
            for (w, c) in &oracle_row {
                if table.count(n, w) != **c {
                    return Some((n, *w));
                }
            }
            for (w, c) in &table_row {
                if ball.count(n, w) != **c {
                    return Some((n, *w));
                }
            }
        }
        for ((wo, co), (wt, ct)) in oracle_row.iter().zip(table_row.iter()) {
            if wo != wt || co != ct {
                return Some((n, *wo));
            }
        }
    }
    None
}

/// Witness for a failed path/word bijection check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MarkovIssue {
    /// Reduced word with no path (surjectivity broken).
    MissingWord { length: usize, word: String },
    /// Path spelling a word that is not reduced of that length (geodesic
    /// property broken).
    ExtraWord { length: usize, word: String },
    /// Two distinct paths spelling the same word (injectivity broken).
    DuplicateWord { length: usize, word: String },
}

#[derive(Clone, Debug)]
pub struct MarkovReport {
    pub checked_to: usize,
    pub issue: Option<MarkovIssue>,
}

impl MarkovReport {
    pub fn is_ok(&self) -> bool {
        self.issue.is_none()
    }
}

/// Compare the words spelled by paths from the initial vertex against the
/// oracle's reduced words, length by length. Checks the bijection and, by
/// set membership, that every path spells a geodesic word.
pub fn verify_strong_markov(
    a: &Automaton,
    spec: &FreeGroupSpec,
    n_max: usize,
    word_budget: u64,
) -> Result<MarkovReport, OracleError> {
    let signed = 2 * spec.rank;
    // Map automaton generator ids to the spec's signed ids by name.
    let gens = a.generators();
    if gens.len() != signed {
        return Err(OracleError::GeneratorMismatch {
            detail: alloc::format!("expected {signed} generators, found {}", gens.len()),
        });
    }
    let mut to_signed = vec![usize::MAX; gens.len()];
    for s in 0..signed {
        let name = spec.signed_name(s);
        match gens.index_of(&name) {
            Some(id) => to_signed[id] = s,
            None => {
                return Err(OracleError::GeneratorMismatch {
                    detail: alloc::format!("generator '{name}' not present"),
                })
            }
        }
    }

    if words_up_to(spec.rank, n_max).saturating_mul(2) > word_budget {
        return Err(OracleError::WordBudgetExceeded {
            budget: word_budget,
        });
    }

    // Words spelled by paths, grouped by length.
    let mut path_words: Vec<Vec<Vec<u16>>> = vec![Vec::new(); n_max + 1];
    let mut stack: Vec<(usize, Vec<u16>)> = vec![(a.initial(), Vec::new())];
    while let Some((v, word)) = stack.pop() {
        if word.len() == n_max {
            continue;
        }
        for e in a.out_edges(v) {
            let mut next = word.clone();
            next.push(to_signed[e.label] as u16);
            path_words[next.len()].push(next.clone());
            stack.push((e.to, next));
        }
    }

    // Reduced words by direct enumeration.
    let mut reduced_words: Vec<Vec<Vec<u16>>> = vec![Vec::new(); n_max + 1];
    let mut wstack: Vec<Vec<u16>> = (0..signed as u16).map(|s| vec![s]).collect();
    while let Some(word) = wstack.pop() {
        if word.len() > n_max {
            continue;
        }
        reduced_words[word.len()].push(word.clone());
        if word.len() < n_max {
            let last = *word.last().unwrap() as usize;
            for s in 0..signed {
                if s != (last ^ 1) {
                    let mut next = word.clone();
                    next.push(s as u16);
                    wstack.push(next);
                }
            }
        }
    }

    let render = |word: &[u16]| -> String {
        word.iter()
            .map(|&s| spec.signed_name(s as usize))
            .collect::<Vec<_>>()
            .join("")
    };

    for n in 1..=n_max {
        let mut from_paths = core::mem::take(&mut path_words[n]);
        let mut from_words = core::mem::take(&mut reduced_words[n]);
        from_paths.sort_unstable();
        from_words.sort_unstable();
        for pair in from_paths.windows(2) {
            if pair[0] == pair[1] {
                return Ok(MarkovReport {
                    checked_to: n,
                    issue: Some(MarkovIssue::DuplicateWord {
                        length: n,
                        word: render(&pair[0]),
                    }),
                });
            }
        }
        let path_set: alloc::collections::BTreeSet<&Vec<u16>> = from_paths.iter().collect();
        let word_set: alloc::collections::BTreeSet<&Vec<u16>> = from_words.iter().collect();
        for w in &from_words {
            if !path_set.contains(w) {
                return Ok(MarkovReport {
                    checked_to: n,
                    issue: Some(MarkovIssue::MissingWord {
                        length: n,
                        word: render(w),
                    }),
                });
            }
        }
        for w in &from_paths {
            if !word_set.contains(w) {
                return Ok(MarkovReport {
                    checked_to: n,
                    issue: Some(MarkovIssue::ExtraWord {
                        length: n,
                        word: render(w),
                    }),
                });
            }
        }
    }
    Ok(MarkovReport {
        checked_to: n_max,
        issue: None,
    })
}
