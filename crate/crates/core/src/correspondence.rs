//! The C*-correspondence `(C(G¹), φ)` over `C(G⁰)` and its internal tensor
//! powers, realized on explicit coordinate vectors.
//!
//! * right action: `(ξ·f)(e) = ξ(e) f(r(e))`
//! * inner product: `⟨ξ,η⟩(v) = Σ_{r(e)=v} conj(ξ(e)) η(e)`
//! * left action: `φ(f)ξ(e) = f(s(e)) ξ(e)`
//!
//! The level-`m` tensor power `E^(m)` has the composable paths `e₁…e_m`
//! (with `r(e_i) = s(e_{i+1})`) as an orthogonal basis, and level 0 is
//! `C(G⁰)` itself.

use std::ops::{Add, Mul, Sub};
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{ONE, ZERO};

macro_rules! coordinate_vector {
    ($name:ident) => {
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name(pub Vec<Complex64>);

        impl $name {
            pub fn zeros(len: usize) -> Self {
                $name(vec![ZERO; len])
            }

            pub fn ones(len: usize) -> Self {
                $name(vec![ONE; len])
            }

            pub fn delta(len: usize, i: usize) -> Self {
                let mut v = Self::zeros(len);
                v.0[i] = ONE;
                v
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn conj(&self) -> Self {
                $name(self.0.iter().map(|z| z.conj()).collect())
            }

            pub fn scale(&self, c: Complex64) -> Self {
                $name(self.0.iter().map(|z| z * c).collect())
            }

            /// Coordinatewise comparison within `tol`.
            pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
                self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| (a - b).norm() <= tol)
            }

            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                self.0.iter().zip(&other.0).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
            }
        }

        impl Add for &$name {
            type Output = $name;
            fn add(self, rhs: Self) -> $name {
                $name(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
            }
        }

        impl Sub for &$name {
            type Output = $name;
            fn sub(self, rhs: Self) -> $name {
                $name(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
            }
        }
    };
}

coordinate_vector!(VertexFunction);
coordinate_vector!(EdgeFunction);

/// Pointwise product in `C(G⁰)`.
impl Mul for &VertexFunction {
    type Output = VertexFunction;
    fn mul(self, rhs: Self) -> VertexFunction {
        VertexFunction(self.0.iter().zip(&rhs.0).map(|(a, b)| a * b).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Range,
    Source,
}

/// Enumerated basis of one tensor level. Level 0 has one empty path per
/// vertex.
#[derive(Debug, PartialEq, Eq)]
pub struct PathBasis {
    pub level: usize,
    /// Edge sequences; empty at level 0.
    pub paths: Vec<Vec<usize>>,
    /// Range vertex of each path (the vertex itself at level 0).
    pub ranges: Vec<usize>,
    pub sources: Vec<usize>,
}

impl PathBasis {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn index_of(&self, path: &[usize]) -> Option<usize> {
        self.paths.binary_search_by(|p| p.as_slice().cmp(path)).ok()
    }
}

/// Vector in `E^(m)` over the enumerated path basis of its level.
#[derive(Debug, Clone, PartialEq)]
pub struct PathVector {
    pub level: usize,
    pub coords: Vec<Complex64>,
}

/// A graph correspondence with memoized path bases.
#[derive(Debug)]
pub struct Correspondence<'g> {
    graph: &'g Graph,
    levels: Mutex<Vec<Arc<PathBasis>>>,
}

impl<'g> Correspondence<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        Correspondence { graph, levels: Mutex::new(Vec::new()) }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    fn check_vertex(&self, f: &VertexFunction) -> Result<()> {
        if f.len() != self.graph.vertex_count() {
            return Err(Error::DimensionMismatch { expected: self.graph.vertex_count(), found: f.len() });
        }
        Ok(())
    }

    fn check_edge(&self, xi: &EdgeFunction) -> Result<()> {
        if xi.len() != self.graph.edge_count() {
            return Err(Error::DimensionMismatch { expected: self.graph.edge_count(), found: xi.len() });
        }
        Ok(())
    }

    pub fn inner_product(&self, xi: &EdgeFunction, eta: &EdgeFunction) -> Result<VertexFunction> {
        self.check_edge(xi)?;
        self.check_edge(eta)?;
        let g = self.graph;
        let mut out = VertexFunction::zeros(g.vertex_count());
        for e in 0..g.edge_count() {
            out.0[g.range(e)] += xi.0[e].conj() * eta.0[e];
        }
        Ok(out)
    }

    pub fn right_act(&self, xi: &EdgeFunction, f: &VertexFunction) -> Result<EdgeFunction> {
        self.check_edge(xi)?;
        self.check_vertex(f)?;
        let g = self.graph;
        Ok(EdgeFunction((0..g.edge_count()).map(|e| xi.0[e] * f.0[g.range(e)]).collect()))
    }

    pub fn left_act(&self, f: &VertexFunction, xi: &EdgeFunction) -> Result<EdgeFunction> {
        self.check_edge(xi)?;
        self.check_vertex(f)?;
        let g = self.graph;
        Ok(EdgeFunction((0..g.edge_count()).map(|e| f.0[g.source(e)] * xi.0[e]).collect()))
    }

    /// `r_*` or `s_*`: `C(G⁰) → C(G¹)`.
    pub fn vertex_pullback(&self, which: Endpoint, f: &VertexFunction) -> Result<EdgeFunction> {
        self.check_vertex(f)?;
        let g = self.graph;
        let end = |e| match which {
            Endpoint::Range => g.range(e),
            Endpoint::Source => g.source(e),
        };
        Ok(EdgeFunction((0..g.edge_count()).map(|e| f.0[end(e)]).collect()))
    }

    /// Composable-path basis of level `m`, built once per level.
    pub fn basis(&self, m: usize) -> Arc<PathBasis> {
        let mut levels = self.levels.lock().expect("path basis cache poisoned");
        while levels.len() <= m {
            let next = match levels.last() {
                None => {
                    let n = self.graph.vertex_count();
                    PathBasis {
                        level: 0,
                        paths: vec![Vec::new(); n],
                        ranges: (0..n).collect(),
                        sources: (0..n).collect(),
                    }
                }
                Some(prev) => extend_basis(self.graph, prev),
            };
            levels.push(Arc::new(next));
        }
        levels[m].clone()
    }

    pub fn basis_vector(&self, path: &[usize]) -> Result<PathVector> {
        let basis = self.basis(path.len());
        let idx = basis.index_of(path).ok_or_else(|| Error::Invalid(format!("path {path:?} is not composable")))?;
        let mut coords = vec![ZERO; basis.len()];
        coords[idx] = ONE;
        Ok(PathVector { level: path.len(), coords })
    }

    /// Level-0 vector from a vertex function.
    pub fn level_zero(&self, f: &VertexFunction) -> Result<PathVector> {
        self.check_vertex(f)?;
        Ok(PathVector { level: 0, coords: f.0.clone() })
    }

    /// `ξ₁ ⊗ … ⊗ ξ_m`: coordinate at a path is the product of the
    /// coordinates of its edges.
    pub fn tensor(&self, factors: &[EdgeFunction]) -> Result<PathVector> {
        for xi in factors {
            self.check_edge(xi)?;
        }
        let basis = self.basis(factors.len());
        if factors.is_empty() {
            return Ok(PathVector { level: 0, coords: vec![ONE; basis.len()] });
        }
        let coords = basis.paths.iter().map(|p| p.iter().zip(factors).map(|(&e, xi)| xi.0[e]).product()).collect();
        Ok(PathVector { level: factors.len(), coords })
    }

    /// `⟨x, y⟩` on `E^(m)`: basis paths are orthogonal with
    /// `⟨δ_μ, δ_μ⟩ = δ_{r(μ)}`; at level 0 this is multiplication in `C(G⁰)`
    /// with the first argument conjugated.
    pub fn tensor_inner_product(&self, x: &PathVector, y: &PathVector) -> Result<VertexFunction> {
        if x.level != y.level {
            return Err(Error::LevelMismatch { left: x.level, right: y.level });
        }
        let basis = self.basis(x.level);
        if x.coords.len() != basis.len() || y.coords.len() != basis.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), found: x.coords.len() });
        }
        let mut out = VertexFunction::zeros(self.graph.vertex_count());
        for (i, &v) in basis.ranges.iter().enumerate() {
            out.0[v] += x.coords[i].conj() * y.coords[i];
        }
        Ok(out)
    }

    /// The recursive definition `⟨ξ⊗x', η⊗y'⟩ = ⟨x', φ(⟨ξ,η⟩) y'⟩` applied
    /// to elementary tensors. Independent of the path basis; used as an
    /// oracle for [`Self::tensor_inner_product`].
    pub fn recursive_inner_product(&self, xs: &[EdgeFunction], ys: &[EdgeFunction]) -> Result<VertexFunction> {
        if xs.len() != ys.len() {
            return Err(Error::LevelMismatch { left: xs.len(), right: ys.len() });
        }
        let mut acc = VertexFunction::ones(self.graph.vertex_count());
        for (xi, eta) in xs.iter().zip(ys) {
            // ⟨ξ, φ(a) η⟩ = ⟨ξ, η⟩ with η's coordinates weighted by a(s(e))
            let weighted = self.left_act(&acc, eta)?;
            acc = self.inner_product(xi, &weighted)?;
        }
        Ok(acc)
    }
}

fn extend_basis(g: &Graph, prev: &PathBasis) -> PathBasis {
    let mut paths = Vec::new();
    let mut ranges = Vec::new();
    let mut sources = Vec::new();
    for (i, p) in prev.paths.iter().enumerate() {
        let end = prev.ranges[i];
        for &e in g.out_edges(end) {
            let mut q = p.clone();
            q.push(e);
            sources.push(if p.is_empty() { g.source(e) } else { prev.sources[i] });
            ranges.push(g.range(e));
            paths.push(q);
        }
    }
    // level 1 from level 0 is grouped by source vertex; restore edge order
    let mut order: Vec<usize> = (0..paths.len()).collect();
    order.sort_by(|&a, &b| paths[a].cmp(&paths[b]));
    PathBasis {
        level: prev.level + 1,
        paths: order.iter().map(|&i| paths[i].clone()).collect(),
        ranges: order.iter().map(|&i| ranges[i]).collect(),
        sources: order.iter().map(|&i| sources[i]).collect(),
    }
}
