//! Edge weights induced by a homomorphism to `Z^nu`: each edge inherits
//! the image of its label. Weight vectors are fixed-capacity so the
//! counting tables can use them as copyable hash keys.

use alloc::string::String;
use alloc::vec::Vec;

use crate::automaton::Automaton;

/// Largest supported quotient rank. The weight tables grow like
/// `(2 F n + 1)^dim`, so anything past this is not desk-scale anyway.
pub const MAX_DIM: usize = 4;

/// Integer vector in `Z^dim`, `dim <= MAX_DIM`. Unused coordinates are
/// zero, so derived ordering and equality are consistent across dims.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightVec {
    coords: [i32; MAX_DIM],
    dim: u8,
}

impl WeightVec {
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= MAX_DIM);
        WeightVec {
            coords: [0; MAX_DIM],
            dim: dim as u8,
        }
    }

    pub fn from_slice(values: &[i64]) -> Result<Self, WeightError> {
        if values.len() > MAX_DIM {
            return Err(WeightError::DimensionTooLarge { dim: values.len() });
        }
        let mut coords = [0i32; MAX_DIM];
        for (i, &v) in values.iter().enumerate() {
            coords[i] = i32::try_from(v).map_err(|_| WeightError::CoordinateOverflow)?;
        }
        Ok(WeightVec {
            coords,
            dim: values.len() as u8,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[i32] {
        &self.coords[..self.dim as usize]
    }

    pub fn checked_add(&self, other: &WeightVec) -> Result<WeightVec, WeightError> {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = *self;
        for i in 0..self.dim as usize {
            out.coords[i] = self.coords[i]
                .checked_add(other.coords[i])
                .ok_or(WeightError::CoordinateOverflow)?;
        }
        Ok(out)
    }

    pub fn negated(&self) -> WeightVec {
        let mut out = *self;
        for c in out.coords.iter_mut() {
            *c = -*c;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn max_abs(&self) -> i64 {
        self.coords()
            .iter()
            .map(|&c| (c as i64).abs())
            .max()
            .unwrap_or(0)
    }
}

impl core::fmt::Display for WeightVec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl core::fmt::Debug for WeightVec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        core::fmt::Display::fmt(self, f)
    }
}

/// Images of the generators in `Z^dim`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism {
    dim: usize,
    images: Vec<Vec<i64>>,
}

impl Homomorphism {
    pub fn new(dim: usize, images: Vec<Vec<i64>>) -> Result<Self, WeightError> {
        if dim == 0 {
            return Err(WeightError::ZeroDimension);
        }
        for img in &images {
            if img.len() != dim {
                return Err(WeightError::ArityMismatch {
                    expected: dim,
                    got: img.len(),
                });
            }
        }
        Ok(Homomorphism { dim, images })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generator_count(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, generator: usize) -> &[i64] {
        &self.images[generator]
    }
}

/// Per-edge weight vectors `f(u,v) = phi(label(u,v))`, plus the max-norm
/// bound `F` over all edges.
#[derive(Clone, Debug)]
pub struct EdgeWeighting {
    dim: usize,
    per_edge: Vec<WeightVec>,
    max_abs: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightError {
    ZeroDimension,
    DimensionTooLarge { dim: usize },
    ArityMismatch { expected: usize, got: usize },
    CoordinateOverflow,
    GeneratorCountMismatch { generators: usize, images: usize },
    NotNegationSymmetric { generator: String },
}

impl core::fmt::Display for WeightError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            WeightError::ZeroDimension => write!(f, "homomorphism must have dimension >= 1"),
            WeightError::DimensionTooLarge { dim } => {
                write!(f, "dimension {dim} exceeds the supported maximum {MAX_DIM}")
            }
            WeightError::ArityMismatch { expected, got } => {
                write!(f, "expected {expected} coordinates, got {got}")
            }
            WeightError::CoordinateOverflow => write!(f, "weight coordinate overflow"),
            WeightError::GeneratorCountMismatch { generators, images } => write!(
                f,
                "homomorphism lists {images} images for {generators} generators"
            ),
            WeightError::NotNegationSymmetric { generator } => write!(
                f,
                "image of inverse generator of '{generator}' is not the negated image"
            ),
        }
    }
}

impl core::error::Error for WeightError {}

impl EdgeWeighting {
    /// Derive edge weights from a homomorphism on the generators. Checks
    /// that images cover every generator and respect inversion (the image
    /// of an inverse generator is the negated image).
    pub fn new(a: &Automaton, hom: &Homomorphism) -> Result<Self, WeightError> {
        let dim = hom.dim();
        if dim > MAX_DIM {
            return Err(WeightError::DimensionTooLarge { dim });
        }
        let gens = a.generators();
        if hom.generator_count() != gens.len() {
            return Err(WeightError::GeneratorCountMismatch {
                generators: gens.len(),
                images: hom.generator_count(),
            });
        }
        for g in 0..gens.len() {
            let inv = gens.inverse(g);
            let img = hom.image(g);
            let inv_img = hom.image(inv);
            if img.iter().zip(inv_img.iter()).any(|(x, y)| *x != -*y) {
                return Err(WeightError::NotNegationSymmetric {
                    generator: alloc::string::ToString::to_string(&gens.name(g)),
                });
            }
        }
        let mut per_gen = Vec::with_capacity(gens.len());
        for g in 0..gens.len() {
            per_gen.push(WeightVec::from_slice(hom.image(g))?);
        }
        let mut per_edge = Vec::with_capacity(a.edge_count());
        let mut max_abs = 0i64;
        for e in a.edges() {
            let w = per_gen[e.label];
            max_abs = max_abs.max(w.max_abs());
            per_edge.push(w);
        }
        Ok(EdgeWeighting {
            dim,
            per_edge,
            max_abs,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Weight of the i-th edge in the automaton's edge order.
    pub fn weight(&self, edge_index: usize) -> WeightVec {
        self.per_edge[edge_index]
    }

    /// Max-norm bound `F` over all edge weights.
    pub fn max_abs(&self) -> i64 {
        self.max_abs
    }

    /// Inner product `<t, f(e)>` for a real torus point.
    pub fn pairing(&self, edge_index: usize, t: &[f64]) -> f64 {
        self.per_edge[edge_index]
            .coords()
            .iter()
            .zip(t.iter())
            .map(|(&c, &ti)| c as f64 * ti)
            .sum()
    }
}
