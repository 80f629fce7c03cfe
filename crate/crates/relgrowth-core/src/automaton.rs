//! Labeled directed graphs with a distinguished initial vertex, their text
//! format, and structural validation.
//!
//! The graphs this crate works with have three defining properties: no edge
//! ends at the initial vertex, at most one directed edge joins any ordered
//! pair of vertices, and every edge carries a label from a symmetric
//! generator set (each generator paired with its inverse, possibly itself).
//! Validation additionally checks reachability from the initial vertex and
//! that no path joins two distinct components of maximal spectral radius;
//! graphs arising from groups of purely exponential growth never have such
//! paths, so their presence means the input is malformed.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::components::{self, ComponentAnalysis};
use crate::eig::EigError;
use crate::weights::Homomorphism;

/// A symmetric generator set: names plus the inverse involution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    names: Vec<String>,
    inverse: Vec<usize>,
}

impl GeneratorSet {
    /// Build from names and inverse pairs. Every generator must occur in
    /// exactly one pair; a generator may be paired with itself.
    pub fn new(names: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self, ParseError> {
        let k = names.len();
        let mut inverse = vec![usize::MAX; k];
        for &(x, y) in pairs {
            if x >= k || y >= k {
                return Err(ParseError::InvolutionNotPairing {
                    detail: "pair index out of range".to_string(),
                });
            }
            if inverse[x] != usize::MAX || (x != y && inverse[y] != usize::MAX) {
                return Err(ParseError::InvolutionNotPairing {
                    detail: alloc::format!(
                        "generator '{}' appears in more than one involution pair",
                        names[if inverse[x] != usize::MAX { x } else { y }]
                    ),
                });
            }
            inverse[x] = y;
            inverse[y] = x;
        }
        if let Some(missing) = inverse.iter().position(|&i| i == usize::MAX) {
            return Err(ParseError::InvolutionNotPairing {
                detail: alloc::format!("generator '{}' has no involution pair", names[missing]),
            });
        }
        Ok(GeneratorSet { names, inverse })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: usize) -> &str {
        &self.names[id]
    }

    pub fn inverse(&self, id: usize) -> usize {
        self.inverse[id]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// A directed labeled edge, all fields indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: usize,
}

/// Finite labeled directed graph with initial vertex.
#[derive(Clone, Debug)]
pub struct Automaton {
    vertex_names: Vec<String>,
    initial: usize,
    edges: Vec<Edge>,
    out_adj: Vec<Vec<usize>>,
    generators: GeneratorSet,
}

impl Automaton {
    /// Construct from parts, enforcing index validity and at most one edge
    /// per ordered vertex pair. Edges into the initial vertex and
    /// unreachable vertices are representable here; `validate` reports
    /// them.
    pub fn new(
        vertex_names: Vec<String>,
        initial: usize,
        mut edges: Vec<Edge>,
        generators: GeneratorSet,
    ) -> Result<Self, ParseError> {
        let n = vertex_names.len();
        if initial >= n {
            return Err(ParseError::MissingInitialVertex);
        }
        edges.sort_by_key(|e| (e.from, e.to));
        for w in edges.windows(2) {
            if w[0].from == w[1].from && w[0].to == w[1].to {
                return Err(ParseError::DuplicateEdge {
                    from: vertex_names[w[0].from].clone(),
                    to: vertex_names[w[0].to].clone(),
                    line: None,
                });
            }
        }
        let mut out_adj = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            if e.from >= n || e.to >= n {
                return Err(ParseError::UnknownVertex {
                    name: alloc::format!("#{}", e.from.max(e.to)),
                    line: None,
                });
            }
            if e.label >= generators.len() {
                return Err(ParseError::UnknownGenerator {
                    name: alloc::format!("#{}", e.label),
                    line: None,
                });
            }
            out_adj[e.from].push(i);
        }
        Ok(Automaton {
            vertex_names,
            initial,
            edges,
            out_adj,
            generators,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertex_names[v]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertex_names.iter().position(|n| n == name)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = &Edge> {
        self.out_adj[v].iter().map(move |&i| &self.edges[i])
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.generators
    }

    /// Dense 0/1 adjacency matrix, row-major.
    pub fn adjacency(&self) -> Vec<u8> {
        let n = self.vertex_count();
        let mut a = vec![0u8; n * n];
        for e in &self.edges {
            a[e.from * n + e.to] = 1;
        }
        a
    }

    /// Structural validation: no in-edges at the initial vertex, all
    /// vertices reachable from it, and no path between distinct maximal
    /// components. The component analysis used for the last check is
    /// returned inside the report.
    pub fn validate(&self) -> Result<ValidationReport, EigError> {
        let mut violations = Vec::new();
        for e in &self.edges {
            if e.to == self.initial {
                violations.push(Violation::EdgeIntoInitial { from: e.from });
            }
        }
        // Reachability from the initial vertex.
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(v) = stack.pop() {
            for e in self.out_edges(v) {
                if !seen[e.to] {
                    seen[e.to] = true;
                    stack.push(e.to);
                }
            }
        }
        for (v, reached) in seen.iter().enumerate() {
            if !reached {
                violations.push(Violation::Unreachable { vertex: v });
            }
        }
        let analysis = components::decompose(self)?;
        if analysis.maximal_indices.is_empty() {
            violations.push(Violation::NoMaximalComponent);
        }
        // Paths between distinct maximal components.
        if let Some(path) = self.find_maximal_interplay(&analysis) {
            violations.push(Violation::MaximalInterplay { path });
        }
        Ok(ValidationReport {
            violations,
            analysis,
        })
    }

    /// BFS witness for a path from one maximal component to a different
    /// one, if any exists.
    fn find_maximal_interplay(&self, analysis: &ComponentAnalysis) -> Option<Vec<usize>> {
        let n = self.vertex_count();
        for &source_comp in &analysis.maximal_indices {
            let mut prev = vec![usize::MAX; n];
            let mut queue = alloc::collections::VecDeque::new();
            for &v in &analysis.components[source_comp].vertices {
                prev[v] = v;
                queue.push_back(v);
            }
            while let Some(v) = queue.pop_front() {
                let comp_v = analysis.component_of[v];
                if comp_v != source_comp && analysis.maximal_indices.contains(&comp_v) {
                    let mut path = vec![v];
                    let mut cur = v;
                    while prev[cur] != cur {
                        cur = prev[cur];
                        path.push(cur);
                    }
                    path.reverse();
                    return Some(path);
                }
                for e in self.out_edges(v) {
                    if prev[e.to] == usize::MAX {
                        prev[e.to] = v;
                        queue.push_back(e.to);
                    }
                }
            }
        }
        None
    }
}

/// A single failed validation check, with its witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EdgeIntoInitial { from: usize },
    Unreachable { vertex: usize },
    MaximalInterplay { path: Vec<usize> },
    NoMaximalComponent,
}

/// Outcome of `Automaton::validate`, carrying the component analysis it
/// computed along the way.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub analysis: ComponentAnalysis,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Render violations with vertex names resolved.
    pub fn describe(&self, a: &Automaton) -> Vec<String> {
        self.violations
            .iter()
            .map(|v| match v {
                Violation::EdgeIntoInitial { from } => {
                    alloc::format!("edge into initial vertex from '{}'", a.vertex_name(*from))
                }
                Violation::Unreachable { vertex } => alloc::format!(
                    "vertex '{}' unreachable from the initial vertex",
                    a.vertex_name(*vertex)
                ),
                Violation::MaximalInterplay { path } => {
                    let names: Vec<&str> = path.iter().map(|&v| a.vertex_name(v)).collect();
                    alloc::format!(
                        "path between distinct maximal components: {}",
                        names.join(" -> ")
                    )
                }
                Violation::NoMaximalComponent => {
                    "no component attains the spectral radius".to_string()
                }
            })
            .collect()
    }
}

/// Parse result: the graph plus the generator homomorphism if the file
/// declared one.
#[derive(Clone, Debug)]
pub struct ParsedAutomaton {
    pub automaton: Automaton,
    pub homomorphism: Option<Homomorphism>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseError {
    MissingSection(&'static str),
    MissingInitialVertex,
    DuplicateName {
        name: String,
        line: usize,
    },
    UnknownGenerator {
        name: String,
        line: Option<usize>,
    },
    UnknownVertex {
        name: String,
        line: Option<usize>,
    },
    DuplicateEdge {
        from: String,
        to: String,
        line: Option<usize>,
    },
    EdgeIntoInitial {
        from: String,
        line: usize,
    },
    InvolutionNotPairing {
        detail: String,
    },
    HomomorphismIncomplete {
        missing: String,
    },
    HomomorphismInconsistent {
        name: String,
        detail: String,
    },
    BadLine {
        line: usize,
        detail: String,
    },
}

impl core::fmt::Display for ParseError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ParseError::MissingSection(s) => write!(f, "missing '{s}' section"),
            ParseError::MissingInitialVertex => {
                write!(
                    f,
                    "missing initial vertex (need 'vertices: *' and 'initial: *')"
                )
            }
            ParseError::DuplicateName { name, line } => {
                write!(f, "line {line}: duplicate name '{name}'")
            }
            ParseError::UnknownGenerator { name, line } => match line {
                Some(l) => write!(f, "line {l}: unknown generator '{name}'"),
                None => write!(f, "unknown generator '{name}'"),
            },
            ParseError::UnknownVertex { name, line } => match line {
                Some(l) => write!(f, "line {l}: unknown vertex '{name}'"),
                None => write!(f, "unknown vertex '{name}'"),
            },
            ParseError::DuplicateEdge { from, to, line } => match line {
                Some(l) => write!(f, "line {l}: duplicate edge {from} -> {to}"),
                None => write!(f, "duplicate edge {from} -> {to}"),
            },
            ParseError::EdgeIntoInitial { from, line } => {
                write!(f, "line {line}: edge into initial vertex from '{from}'")
            }
            ParseError::InvolutionNotPairing { detail } => {
                write!(f, "involution is not a pairing: {detail}")
            }
            ParseError::HomomorphismIncomplete { missing } => {
                write!(
                    f,
                    "homomorphism incomplete: no image for generator '{missing}'"
                )
            }
            ParseError::HomomorphismInconsistent { name, detail } => {
                write!(
                    f,
                    "homomorphism inconsistent at generator '{name}': {detail}"
                )
            }
            ParseError::BadLine { line, detail } => write!(f, "line {line}: {detail}"),
        }
    }
}

impl core::error::Error for ParseError {}

fn is_valid_name(tok: &str) -> bool {
    tok == "*"
        || (!tok.is_empty()
            && tok.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            && !tok.chars().next().unwrap().is_ascii_digit())
}

/// Parse the line-oriented automaton format.
///
/// ```text
/// # comment
/// generators: a A b B
/// involution: a A
/// involution: b B
/// vertices: * a A b B
/// initial: *
/// edge: * a a
/// hom: a 1 0
/// ```
///
/// Generator images omitted from `hom:` lines are derived from the inverse
/// generator by negation; explicitly given images must agree with that
/// rule. A file with no `hom:` lines parses with `homomorphism: None`.
pub fn parse_automaton(text: &str) -> Result<ParsedAutomaton, ParseError> {
    let mut generator_names: Vec<String> = Vec::new();
    let mut involution_lines: Vec<(String, String, usize)> = Vec::new();
    let mut vertex_names: Vec<String> = Vec::new();
    let mut initial_name: Option<String> = None;
    let mut edge_lines: Vec<(String, String, String, usize)> = Vec::new();
    let mut hom_lines: Vec<(String, Vec<i64>, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let mut toks = line.split_whitespace();
        let Some(head) = toks.next() else { continue };
        let rest: Vec<&str> = toks.collect();
        match head {
            "generators:" => {
                for t in &rest {
                    if !is_valid_name(t) || *t == "*" {
                        return Err(ParseError::BadLine {
                            line: line_no,
                            detail: alloc::format!("invalid generator name '{t}'"),
                        });
                    }
                    if generator_names.iter().any(|n| n == t) {
                        return Err(ParseError::DuplicateName {
                            name: t.to_string(),
                            line: line_no,
                        });
                    }
                    generator_names.push(t.to_string());
                }
            }
            "involution:" => {
                if rest.len() != 2 {
                    return Err(ParseError::BadLine {
                        line: line_no,
                        detail: "involution line must name exactly two generators".to_string(),
                    });
                }
                involution_lines.push((rest[0].to_string(), rest[1].to_string(), line_no));
            }
            "vertices:" => {
                for t in &rest {
                    if !is_valid_name(t) {
                        return Err(ParseError::BadLine {
                            line: line_no,
                            detail: alloc::format!("invalid vertex name '{t}'"),
                        });
                    }
                    if vertex_names.iter().any(|n| n == t) {
                        return Err(ParseError::DuplicateName {
                            name: t.to_string(),
                            line: line_no,
                        });
                    }
                    vertex_names.push(t.to_string());
                }
            }
            "initial:" => {
                if rest.len() != 1 {
                    return Err(ParseError::BadLine {
                        line: line_no,
                        detail: "initial line must name exactly one vertex".to_string(),
                    });
                }
                initial_name = Some(rest[0].to_string());
            }
            "edge:" => {
                if rest.len() != 3 {
                    return Err(ParseError::BadLine {
                        line: line_no,
                        detail: "edge line must be 'edge: <from> <to> <generator>'".to_string(),
                    });
                }
                edge_lines.push((
                    rest[0].to_string(),
                    rest[1].to_string(),
                    rest[2].to_string(),
                    line_no,
                ));
            }
            "hom:" => {
                if rest.len() < 2 {
                    return Err(ParseError::BadLine {
                        line: line_no,
                        detail: "hom line must be 'hom: <generator> <int>...'".to_string(),
                    });
                }
                let mut coords = Vec::with_capacity(rest.len() - 1);
                for t in &rest[1..] {
                    let v: i64 = t.parse().map_err(|_| ParseError::BadLine {
                        line: line_no,
                        detail: alloc::format!("invalid integer '{t}'"),
                    })?;
                    coords.push(v);
                }
                hom_lines.push((rest[0].to_string(), coords, line_no));
            }
            _ => {
                return Err(ParseError::BadLine {
                    line: line_no,
                    detail: alloc::format!("unknown directive '{head}'"),
                });
            }
        }
    }

    if generator_names.is_empty() {
        return Err(ParseError::MissingSection("generators"));
    }
    if vertex_names.is_empty() {
        return Err(ParseError::MissingSection("vertices"));
    }
    let initial_name = initial_name.ok_or(ParseError::MissingSection("initial"))?;
    if initial_name != "*" || !vertex_names.iter().any(|n| n == "*") {
        return Err(ParseError::MissingInitialVertex);
    }

    let gen_index = |name: &str, line: usize| -> Result<usize, ParseError> {
        generator_names
            .iter()
            .position(|n| n == name)
            .ok_or(ParseError::UnknownGenerator {
                name: name.to_string(),
                line: Some(line),
            })
    };
    let mut pairs = Vec::new();
    for (x, y, line) in &involution_lines {
        pairs.push((gen_index(x, *line)?, gen_index(y, *line)?));
    }
    let generators = GeneratorSet::new(generator_names.clone(), &pairs)?;

    let initial = vertex_names.iter().position(|n| n == "*").unwrap();
    let vert_index = |name: &str, line: usize| -> Result<usize, ParseError> {
        vertex_names
            .iter()
            .position(|n| n == name)
            .ok_or(ParseError::UnknownVertex {
                name: name.to_string(),
                line: Some(line),
            })
    };
    let mut edges = Vec::with_capacity(edge_lines.len());
    let mut seen_pairs: alloc::collections::BTreeSet<(usize, usize)> =
        alloc::collections::BTreeSet::new();
    for (from, to, label, line) in &edge_lines {
        let f = vert_index(from, *line)?;
        let t = vert_index(to, *line)?;
        let l = gen_index(label, *line)?;
        if t == initial {
            return Err(ParseError::EdgeIntoInitial {
                from: from.clone(),
                line: *line,
            });
        }
        if !seen_pairs.insert((f, t)) {
            return Err(ParseError::DuplicateEdge {
                from: from.clone(),
                to: to.clone(),
                line: Some(*line),
            });
        }
        edges.push(Edge {
            from: f,
            to: t,
            label: l,
        });
    }

    let homomorphism = if hom_lines.is_empty() {
        None
    } else {
        Some(assemble_homomorphism(&generators, &hom_lines)?)
    };

    Ok(ParsedAutomaton {
        automaton: Automaton::new(vertex_names, initial, edges, generators)?,
        homomorphism,
    })
}

fn assemble_homomorphism(
    generators: &GeneratorSet,
    hom_lines: &[(String, Vec<i64>, usize)],
) -> Result<Homomorphism, ParseError> {
    let k = generators.len();
    let mut images: Vec<Option<Vec<i64>>> = vec![None; k];
    let mut dim: Option<usize> = None;
    for (name, coords, line) in hom_lines {
        let id = generators
            .index_of(name)
            .ok_or(ParseError::UnknownGenerator {
                name: name.clone(),
                line: Some(*line),
            })?;
        match dim {
            None => dim = Some(coords.len()),
            Some(d) if d != coords.len() => {
                return Err(ParseError::BadLine {
                    line: *line,
                    detail: alloc::format!(
                        "hom line has {} coordinates, earlier lines have {d}",
                        coords.len()
                    ),
                });
            }
            _ => {}
        }
        if let Some(existing) = &images[id] {
            if existing != coords {
                return Err(ParseError::HomomorphismInconsistent {
                    name: name.clone(),
                    detail: "two hom lines disagree".to_string(),
                });
            }
        }
        images[id] = Some(coords.clone());
    }
    // Derive missing images from inverses; check given ones for negation
    // consistency afterwards.
    for id in 0..k {
        if images[id].is_none() {
            if let Some(inv_img) = images[generators.inverse(id)].clone() {
                images[id] = Some(inv_img.iter().map(|c| -c).collect());
            }
        }
    }
    for id in 0..k {
        let inv = generators.inverse(id);
        if let (Some(a), Some(b)) = (&images[id], &images[inv]) {
            if a.iter().zip(b.iter()).any(|(x, y)| *x != -*y) {
                return Err(ParseError::HomomorphismInconsistent {
                    name: generators.name(id).to_string(),
                    detail: alloc::format!(
                        "image of '{}' is not the negation of the image of '{}'",
                        generators.name(id),
                        generators.name(inv)
                    ),
                });
            }
        }
    }
    let mut resolved = Vec::with_capacity(k);
    for (id, img) in images.into_iter().enumerate() {
        match img {
            Some(v) => resolved.push(v),
            None => {
                return Err(ParseError::HomomorphismIncomplete {
                    missing: generators.name(id).to_string(),
                });
            }
        }
    }
    Homomorphism::new(dim.unwrap_or(0), resolved).map_err(|e| ParseError::BadLine {
        line: 0,
        detail: alloc::format!("{e}"),
    })
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_free_group_fixture() {
        let parsed = parse_automaton(fixtures::F2_ABELIAN).unwrap();
        let a = &parsed.automaton;
        assert_eq!(a.vertex_count(), 5);
        assert_eq!(a.edge_count(), 16);
        assert_eq!(a.generators().len(), 4);
        let hom = parsed.homomorphism.unwrap();
        assert_eq!(hom.dim(), 2);
        let aid = a.generators().index_of("a").unwrap();
        let iid = a.generators().inverse(aid);
        assert_eq!(a.generators().name(iid), "A");
        assert_eq!(hom.image(aid), &[1, 0]);
        assert_eq!(hom.image(iid), &[-1, 0]);
    }

    #[test]
    fn rejects_edge_into_initial() {
        let text = "\
generators: a
involution: a a
vertices: * x
initial: *
edge: * x a
edge: x * a
";
        match parse_automaton(text) {
            Err(ParseError::EdgeIntoInitial { from, line }) => {
                assert_eq!(from, "x");
                assert_eq!(line, 6);
            }
            other => panic!("expected EdgeIntoInitial, got {other:?}"),
        }
    }

    #[test]
    fn rejects_incomplete_involution() {
        let text = "\
generators: a A b B
involution: a A
vertices: * x
initial: *
edge: * x a
";
        match parse_automaton(text) {
            Err(ParseError::InvolutionNotPairing { detail }) => {
                assert!(detail.contains('b'), "{detail}");
            }
            other => panic!("expected InvolutionNotPairing, got {other:?}"),
        }
    }

    #[test]
    fn rejects_duplicate_edge() {
        let text = "\
generators: a
involution: a a
vertices: * x
initial: *
edge: * x a
edge: * x a
";
        assert!(matches!(
            parse_automaton(text),
            Err(ParseError::DuplicateEdge { .. })
        ));
    }

    #[test]
    fn rejects_unknown_generator_label() {
        let text = "\
generators: a
involution: a a
vertices: * x
initial: *
edge: * x z
";
        assert!(matches!(
            parse_automaton(text),
            Err(ParseError::UnknownGenerator { .. })
        ));
    }

    #[test]
    fn hom_negation_rule_derives_and_rejects() {
        let derived = "\
generators: a A
involution: a A
vertices: * x
initial: *
edge: * x a
hom: a 2 -1
";
        let parsed = parse_automaton(derived).unwrap();
        let hom = parsed.homomorphism.unwrap();
        let id_inv = parsed.automaton.generators().index_of("A").unwrap();
        assert_eq!(hom.image(id_inv), &[-2, 1]);

        let inconsistent = "\
generators: a A
involution: a A
vertices: * x
initial: *
edge: * x a
hom: a 2
hom: A 2
";
        assert!(matches!(
            parse_automaton(inconsistent),
            Err(ParseError::HomomorphismInconsistent { .. })
        ));

        // A self-paired generator must map to zero.
        let self_paired = "\
generators: s
involution: s s
vertices: * x
initial: *
edge: * x s
hom: s 3
";
        assert!(matches!(
            parse_automaton(self_paired),
            Err(ParseError::HomomorphismInconsistent { .. })
        ));
    }

    #[test]
    fn hom_incomplete_is_reported() {
        let text = "\
generators: a A b B
involution: a A
involution: b B
vertices: * x
initial: *
edge: * x a
hom: a 1
";
        match parse_automaton(text) {
            Err(ParseError::HomomorphismIncomplete { missing }) => {
                assert_eq!(missing, "b");
            }
            other => panic!("expected HomomorphismIncomplete, got {other:?}"),
        }
    }

    #[test]
    fn validate_flags_unreachable_vertex() {
        let parsed = parse_automaton(fixtures::UNREACHABLE).unwrap();
        let report = parsed.automaton.validate().unwrap();
        assert!(!report.is_valid());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Unreachable { vertex } if parsed.automaton.vertex_name(*vertex) == "w")));
    }

    #[test]
    fn validate_flags_connected_maximal_components() {
        let parsed = parse_automaton(fixtures::TWO_MAX_CONNECTED).unwrap();
        let report = parsed.automaton.validate().unwrap();
        assert!(!report.is_valid());
        let witness = report
            .violations
            .iter()
            .find_map(|v| match v {
                Violation::MaximalInterplay { path } => Some(path),
                _ => None,
            })
            .expect("interplay violation");
        // Path starts in {u, v} and ends in {x, y}.
        let name = |i: &usize| parsed.automaton.vertex_name(*i);
        assert!(["u", "v"].contains(&name(witness.first().unwrap())));
        assert!(["x", "y"].contains(&name(witness.last().unwrap())));
    }

    #[test]
    fn validate_flags_acyclic_graph() {
        let text = "\
generators: a
involution: a a
vertices: * x
initial: *
edge: * x a
hom: a 0
";
        let parsed = parse_automaton(text).unwrap();
        let report = parsed.automaton.validate().unwrap();
        assert!(!report.is_valid());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NoMaximalComponent)));
    }

    #[test]
    fn validate_accepts_free_group_fixture() {
        let parsed = parse_automaton(fixtures::F2_ABELIAN).unwrap();
        let report = parsed.automaton.validate().unwrap();
        assert!(report.is_valid(), "{:?}", report.violations);
        assert_eq!(report.analysis.maximal_indices.len(), 1);
        let maximal = &report.analysis.components[report.analysis.maximal_indices[0]];
        assert_eq!(maximal.vertices.len(), 4);
    }
}
