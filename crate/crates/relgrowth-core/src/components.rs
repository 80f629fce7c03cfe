//! Strongly connected components of the transition matrix, their spectral
//! radii and cyclic periods, and the masked matrices attached to each
//! maximal component (the full matrix with rows and columns of the other
//! maximal components zeroed).
//!
//! Components are listed so that every edge goes from a later component to
//! an earlier or equal one; concatenating them therefore reorders the
//! transition matrix into block lower-triangular form.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_integer::Integer;

use crate::automaton::Automaton;
use crate::eig::{self, EigError};
use crate::matrix::CMatrix;

/// Relative tolerance for classifying a component as maximal. Component
/// radii of 0/1 integer matrices are algebraic numbers, well separated at
/// desk scale, so anything within this of the global radius is the same
/// algebraic value computed with roundoff.
pub const MAXIMALITY_RTOL: f64 = 1e-9;

/// One strongly connected component.
#[derive(Clone, Debug)]
pub struct Component {
    /// Original vertex ids, ascending.
    pub vertices: Vec<usize>,
    /// Spectral radius of the component submatrix.
    pub spectral_radius: f64,
    /// Radius within tolerance of the global growth rate.
    pub maximal: bool,
    /// Gcd of cycle lengths, `None` for a single vertex without self-loop.
    pub period: Option<usize>,
    /// Cyclic class of each vertex (parallel to `vertices`), when a period
    /// exists. Every internal edge steps class k to class k+1 mod p.
    pub classes: Option<Vec<usize>>,
}

impl Component {
    pub fn is_trivial(&self) -> bool {
        self.period.is_none()
    }
}

/// Full component decomposition of an automaton.
#[derive(Clone, Debug)]
pub struct ComponentAnalysis {
    /// Components ordered so the reordered matrix is block lower-triangular.
    pub components: Vec<Component>,
    /// Component index of each vertex.
    pub component_of: Vec<usize>,
    /// Vertex permutation realizing the block order (concatenated
    /// component vertex lists).
    pub order: Vec<usize>,
    /// Growth rate: the largest component radius.
    pub lambda: f64,
    /// Indices into `components` of the maximal ones, ascending.
    pub maximal_indices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComponentError {
    /// Component has no cycle, so no period.
    TrivialComponent { component: usize },
    /// Maximal slot out of range.
    MaximalIndexOutOfRange { index: usize, count: usize },
}

impl core::fmt::Display for ComponentError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ComponentError::TrivialComponent { component } => {
                write!(f, "component {component} has no cycles, period undefined")
            }
            ComponentError::MaximalIndexOutOfRange { index, count } => {
                write!(
                    f,
                    "maximal component index {index} out of range ({count} maximal)"
                )
            }
        }
    }
}

impl core::error::Error for ComponentError {}

/// Tarjan's algorithm, iterative. Components come out with successors
/// first, which is exactly the block lower-triangular order.
fn tarjan_scc(a: &Automaton) -> (Vec<Vec<usize>>, Vec<usize>) {
    let n = a.vertex_count();
    let mut index = vec![usize::MAX; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut component_of = vec![usize::MAX; n];

    // Explicit DFS stack: (vertex, edge cursor).
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call_stack: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut cursor)) = call_stack.last_mut() {
            let succ: Vec<usize> = a.out_edges(v).map(|e| e.to).collect();
            if *cursor < succ.len() {
                let w = succ[*cursor];
                *cursor += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call_stack.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
            } else {
                call_stack.pop();
                if let Some(&(parent, _)) = call_stack.last() {
                    lowlink[parent] = lowlink[parent].min(lowlink[v]);
                }
                if lowlink[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        component_of[w] = components.len();
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    components.push(comp);
                }
            }
        }
    }
    (components, component_of)
}

/// Period and cyclic classes by BFS layering from the component's first
/// vertex: the gcd of `depth(u) + 1 - depth(v)` over internal edges
/// `u -> v` is the gcd of all cycle lengths.
fn period_and_classes(a: &Automaton, vertices: &[usize]) -> Option<(usize, Vec<usize>)> {
    let in_comp: hashbrown::HashSet<usize> = vertices.iter().copied().collect();
    let base = vertices[0];
    let mut depth: hashbrown::HashMap<usize, i64> = hashbrown::HashMap::new();
    depth.insert(base, 0);
    let mut queue = alloc::collections::VecDeque::new();
    queue.push_back(base);
    let mut g: i64 = 0;
    while let Some(v) = queue.pop_front() {
        let dv = depth[&v];
        for e in a.out_edges(v) {
            if !in_comp.contains(&e.to) {
                continue;
            }
            match depth.get(&e.to) {
                None => {
                    depth.insert(e.to, dv + 1);
                    queue.push_back(e.to);
                }
                Some(&dw) => {
                    g = g.gcd(&(dv + 1 - dw));
                }
            }
        }
    }
    if g == 0 {
        // No cycle through the component (single vertex, no self-loop).
        return None;
    }
    let p = g.unsigned_abs() as usize;
    let classes = vertices
        .iter()
        .map(|v| (depth[v].rem_euclid(g)) as usize)
        .collect();
    Some((p, classes))
}

/// Spectral radius of the 0/1 submatrix on `vertices`.
fn component_radius(a: &Automaton, vertices: &[usize]) -> Result<f64, EigError> {
    let k = vertices.len();
    if k == 1 {
        let v = vertices[0];
        let has_loop = a.out_edges(v).any(|e| e.to == v);
        return Ok(if has_loop { 1.0 } else { 0.0 });
    }
    let pos: hashbrown::HashMap<usize, usize> =
        vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut m = CMatrix::zeros(k);
    for &v in vertices {
        for e in a.out_edges(v) {
            if let Some(&j) = pos.get(&e.to) {
                m[(pos[&v], j)] = Complex64::new(1.0, 0.0);
            }
        }
    }
    eig::spectral_radius(&m)
}

/// Decompose into strongly connected components with spectral data.
pub fn decompose(a: &Automaton) -> Result<ComponentAnalysis, EigError> {
    let (component_vertices, component_of) = tarjan_scc(a);
    let mut components = Vec::with_capacity(component_vertices.len());
    let mut lambda = 0.0f64;
    let mut radii = Vec::with_capacity(component_vertices.len());
    for vertices in &component_vertices {
        let radius = component_radius(a, vertices)?;
        lambda = lambda.max(radius);
        radii.push(radius);
    }
    let mut maximal_indices = Vec::new();
    for (i, vertices) in component_vertices.iter().enumerate() {
        let radius = radii[i];
        let maximal = radius > 0.0 && radius >= lambda * (1.0 - MAXIMALITY_RTOL);
        if maximal {
            maximal_indices.push(i);
        }
        let pc = period_and_classes(a, vertices);
        components.push(Component {
            vertices: vertices.clone(),
            spectral_radius: radius,
            maximal,
            period: pc.as_ref().map(|(p, _)| *p),
            classes: pc.map(|(_, c)| c),
        });
    }
    let order: Vec<usize> = components
        .iter()
        .flat_map(|c| c.vertices.iter().copied())
        .collect();
    Ok(ComponentAnalysis {
        components,
        component_of,
        order,
        lambda,
        maximal_indices,
    })
}

impl ComponentAnalysis {
    /// Period of a nontrivial component, with its cyclic classes.
    pub fn cyclic_period(&self, component: usize) -> Result<(usize, &[usize]), ComponentError> {
        let c = &self.components[component];
        match (c.period, c.classes.as_ref()) {
            (Some(p), Some(cl)) => Ok((p, cl)),
            _ => Err(ComponentError::TrivialComponent { component }),
        }
    }

    /// Component index of the j-th maximal component.
    pub fn maximal_component(&self, j: usize) -> Result<usize, ComponentError> {
        self.maximal_indices
            .get(j)
            .copied()
            .ok_or(ComponentError::MaximalIndexOutOfRange {
                index: j,
                count: self.maximal_indices.len(),
            })
    }
}

/// The transition matrix with rows and columns of every maximal component
/// other than the selected one zeroed out.
#[derive(Clone, Debug)]
pub struct MaskedMatrix {
    dim: usize,
    entries: Vec<u8>,
    /// Vertices whose row/column survive.
    kept: Vec<bool>,
    /// Surviving edges as (from, to, index into the automaton edge list);
    /// the edge index is what ties a weighting to the mask.
    kept_edges: Vec<(usize, usize, usize)>,
    /// Index into `maximal_indices` this mask belongs to.
    pub maximal_slot: usize,
}

impl MaskedMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, u: usize, v: usize) -> u8 {
        self.entries[u * self.dim + v]
    }

    pub fn kept(&self, v: usize) -> bool {
        self.kept[v]
    }

    pub fn kept_edges(&self) -> &[(usize, usize, usize)] {
        &self.kept_edges
    }

    pub fn row_sum(&self, u: usize) -> u32 {
        (0..self.dim).map(|v| self.entry(u, v) as u32).sum()
    }
}

/// Build the masked matrix for the j-th maximal component.
pub fn build_masked(
    a: &Automaton,
    analysis: &ComponentAnalysis,
    j: usize,
) -> Result<MaskedMatrix, ComponentError> {
    let comp_index = analysis.maximal_component(j)?;
    let n = a.vertex_count();
    let mut kept = vec![true; n];
    for &other in &analysis.maximal_indices {
        if other != comp_index {
            for &v in &analysis.components[other].vertices {
                kept[v] = false;
            }
        }
    }
    let mut entries = vec![0u8; n * n];
    let mut kept_edges = Vec::new();
    for (i, e) in a.edges().iter().enumerate() {
        if kept[e.from] && kept[e.to] {
            entries[e.from * n + e.to] = 1;
            kept_edges.push((e.from, e.to, i));
        }
    }
    Ok(MaskedMatrix {
        dim: n,
        entries,
        kept,
        kept_edges,
        maximal_slot: j,
    })
}

/// Build the masked matrices for all maximal components.
pub fn build_all_masked(
    a: &Automaton,
    analysis: &ComponentAnalysis,
) -> Result<Vec<MaskedMatrix>, ComponentError> {
    (0..analysis.maximal_indices.len())
        .map(|j| build_masked(a, analysis, j))
        .collect()
}
