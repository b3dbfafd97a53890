//! Finite directed multigraphs `(G⁰, G¹, r, s)` with named vertices and edges.
//!
//! Vertices and edges are kept in lexicographic order of their identifiers so
//! that every matrix indexed by them is reproducible. An edge `e` runs from
//! its source `s(e)` (`src`) to its range `r(e)` (`dst`).

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub src: usize,
    pub dst: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    vertex_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
    /// Edges emitted by each vertex, in edge order.
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    id: String,
    src: String,
    dst: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraph {
    vertices: Vec<String>,
    edges: Vec<RawEdge>,
}

impl Graph {
    /// Builds a graph from vertex identifiers and `(edge id, src, dst)` triples.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        E: IntoIterator<Item = (String, String, String)>,
    {
        let mut names: Vec<String> = vertices.into_iter().map(Into::into).collect();
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateIdentifier(w[0].clone()));
        }
        let vertex_index: HashMap<String, usize> = names.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();

        let mut raw: Vec<(String, String, String)> = edges.into_iter().collect();
        raw.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = raw.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateIdentifier(w[0].0.clone()));
        }
        let mut edge_list = Vec::with_capacity(raw.len());
        for (id, src, dst) in raw {
            if vertex_index.contains_key(&id) {
                return Err(Error::DuplicateIdentifier(id));
            }
            let lookup = |name: &str| {
                vertex_index
                    .get(name)
                    .copied()
                    .ok_or_else(|| Error::DanglingEndpoint { edge: id.clone(), endpoint: name.to_string() })
            };
            let s = lookup(&src)?;
            let d = lookup(&dst)?;
            edge_list.push(Edge { id, src: s, dst: d });
        }
        Ok(Self::assemble(names, vertex_index, edge_list))
    }

    fn assemble(vertices: Vec<String>, vertex_index: HashMap<String, usize>, edges: Vec<Edge>) -> Self {
        let mut out_edges = vec![Vec::new(); vertices.len()];
        let mut in_edges = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            out_edges[e.src].push(i);
            in_edges[e.dst].push(i);
        }
        let edge_index = edges.iter().enumerate().map(|(i, e)| (e.id.clone(), i)).collect();
        Graph { vertices, edges, vertex_index, edge_index, out_edges, in_edges }
    }

    /// Parses the JSON graph document `{"vertices": [...], "edges": [{"id","src","dst"}]}`.
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawGraph = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        Graph::new(raw.vertices, raw.edges.into_iter().map(|e| (e.id, e.src, e.dst)))
    }

    /// Canonical JSON serialization (sorted vertices, edges sorted by id).
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_raw()).expect("graph serialization")
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_raw()).expect("graph serialization")
    }

    fn to_raw(&self) -> RawGraph {
        RawGraph {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| RawEdge {
                    id: e.id.clone(),
                    src: self.vertices[e.src].clone(),
                    dst: self.vertices[e.dst].clone(),
                })
                .collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex(&self, name: &str) -> Result<usize> {
        self.vertex_index.get(name).copied().ok_or_else(|| Error::UnknownIdentifier(name.to_string()))
    }

    pub fn edge(&self, id: &str) -> Result<usize> {
        self.edge_index.get(id).copied().ok_or_else(|| Error::UnknownIdentifier(id.to_string()))
    }

    #[inline]
    pub fn source(&self, e: usize) -> usize {
        self.edges[e].src
    }

    #[inline]
    pub fn range(&self, e: usize) -> usize {
        self.edges[e].dst
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    pub fn emits(&self, v: usize) -> bool {
        !self.out_edges[v].is_empty()
    }

    /// `D[v][w]` = number of edges with source `v` and range `w`.
    pub fn adjacency(&self) -> Vec<Vec<u64>> {
        let n = self.vertex_count();
        let mut d = vec![vec![0u64; n]; n];
        for e in &self.edges {
            d[e.src][e.dst] += 1;
        }
        d
    }

    /// Largest number of parallel edges between one ordered vertex pair.
    pub fn max_multiplicity(&self) -> usize {
        self.adjacency().iter().flatten().copied().max().unwrap_or(0) as usize
    }

    pub fn has_loops(&self) -> bool {
        self.edges.iter().any(|e| e.src == e.dst)
    }

    /// Edges running from `v` to `w`, in edge order.
    pub fn parallel_class(&self, v: usize, w: usize) -> Vec<usize> {
        self.out_edges[v].iter().copied().filter(|&e| self.edges[e].dst == w).collect()
    }

    // Convenience constructors. Identifiers are zero-padded so that the
    // lexicographic order agrees with the numeric one.

    /// One vertex `v` with `n` loops: the graph of the Cuntz algebra O_n.
    pub fn bouquet(n: usize) -> Self {
        Self::bouquet_union(n, 1)
    }

    /// `copies` disjoint copies of the `n`-loop bouquet.
    pub fn bouquet_union(n: usize, copies: usize) -> Self {
        let vw = digits(copies);
        let ew = digits(n);
        let vertices: Vec<String> = (1..=copies).map(|l| format!("v{l:0vw$}")).collect();
        let mut edges = Vec::new();
        for (l, v) in vertices.iter().enumerate() {
            for i in 1..=n {
                let id = if copies == 1 { format!("e{i:0ew$}") } else { format!("e{:0vw$}_{i:0ew$}", l + 1) };
                edges.push((id, v.clone(), v.clone()));
            }
        }
        Graph::new(vertices, edges).expect("well-formed bouquet")
    }

    /// Oriented `m`-gon `v1 → v2 → … → vm → v1`.
    pub fn cycle(m: usize) -> Self {
        Self::cycle_union(m, 1)
    }

    /// `copies` disjoint oriented `m`-gons.
    pub fn cycle_union(m: usize, copies: usize) -> Self {
        let w = digits(m * copies);
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        for c in 0..copies {
            for i in 0..m {
                vertices.push(format!("v{:0w$}", c * m + i + 1));
                let a = format!("v{:0w$}", c * m + i + 1);
                let b = format!("v{:0w$}", c * m + (i + 1) % m + 1);
                edges.push((format!("e{:0w$}", c * m + i + 1), a, b));
            }
        }
        Graph::new(vertices, edges).expect("well-formed cycle")
    }

    /// Builds a graph from `(src, dst)` pairs on vertices `v0..v{n-1}`.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let vw = digits(n);
        let ew = digits(pairs.len());
        let name = |i: usize| format!("v{i:0vw$}");
        Graph::new(
            (0..n).map(name),
            pairs.iter().enumerate().map(|(k, &(a, b))| (format!("e{k:0ew$}"), name(a), name(b))),
        )
    }

    /// Relabels vertices and edges through the given permutations (new index
    /// of old vertex `v` is `vertex_perm[v]`); identifiers are regenerated.
    pub fn relabel(&self, vertex_perm: &[usize]) -> Self {
        let n = self.vertex_count();
        let mut pairs: Vec<(usize, usize)> =
            self.edges.iter().map(|e| (vertex_perm[e.src], vertex_perm[e.dst])).collect();
        pairs.sort();
        Graph::from_pairs(n, &pairs).expect("relabel")
    }
}

fn digits(n: usize) -> usize {
    n.max(1).to_string().len()
}

/// Shape of a homogeneous disjoint union, when detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// `count` disjoint oriented `m`-gons (`m ≥ 2`).
    MGonUnion {
        m: usize,
        count: usize,
    },
    /// `copies` disjoint one-vertex bouquets of `loops` loops each.
    BouquetUnion {
        loops: usize,
        copies: usize,
    },
    Generic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructuralReport {
    pub no_sources: bool,
    pub no_sinks: bool,
    pub r_injective: bool,
    pub s_injective: bool,
    pub out_regular: Option<usize>,
    pub emitting_vertices: Vec<String>,
    /// Weakly connected components, each sorted, in order of first vertex.
    pub components: Vec<Vec<String>>,
    pub shape: Shape,
    pub has_loops: bool,
    pub max_multiplicity: usize,
}

fn components(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    for e in g.edges() {
        let a = find(&mut parent, e.src);
        let b = find(&mut parent, e.dst);
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        let root = find(&mut parent, v);
        groups.entry(root).or_default().push(v);
    }
    groups.into_values().collect()
}

fn component_shape(g: &Graph, comp: &[usize]) -> Shape {
    let edges: Vec<usize> = comp.iter().flat_map(|&v| g.out_edges(v).iter().copied()).collect();
    if comp.len() == 1 {
        let loops = edges.len();
        return if loops > 0 { Shape::BouquetUnion { loops, copies: 1 } } else { Shape::Generic };
    }
    let cycle =
        comp.len() == edges.len() && comp.iter().all(|&v| g.out_edges(v).len() == 1 && g.in_edges(v).len() == 1);
    if cycle {
        // connected + in/out degree one everywhere => one directed cycle
        Shape::MGonUnion { m: comp.len(), count: 1 }
    } else {
        Shape::Generic
    }
}

pub fn structural_report(g: &Graph) -> StructuralReport {
    let n = g.vertex_count();
    let no_sources = (0..n).all(|v| !g.in_edges(v).is_empty());
    let no_sinks = (0..n).all(|v| g.emits(v));
    let r_injective = (0..n).all(|v| g.in_edges(v).len() <= 1);
    let s_injective = (0..n).all(|v| g.out_edges(v).len() <= 1);
    let out_regular = match (0..n).map(|v| g.out_edges(v).len()).collect::<BTreeSet<_>>() {
        s if s.len() == 1 => s.into_iter().next(),
        _ => None,
    };
    let emitting_vertices = (0..n).filter(|&v| g.emits(v)).map(|v| g.vertices()[v].clone()).collect();
    let comps = components(g);
    let shapes: Vec<Shape> = comps.iter().map(|c| component_shape(g, c)).collect();
    let shape = match shapes.first() {
        Some(&first) if shapes.iter().all(|s| *s == first) => match first {
            Shape::MGonUnion { m, .. } => Shape::MGonUnion { m, count: comps.len() },
            Shape::BouquetUnion { loops, .. } => Shape::BouquetUnion { loops, copies: comps.len() },
            Shape::Generic => Shape::Generic,
        },
        _ => Shape::Generic,
    };
    StructuralReport {
        no_sources,
        no_sinks,
        r_injective,
        s_injective,
        out_regular,
        emitting_vertices,
        components: comps.iter().map(|c| c.iter().map(|&v| g.vertices()[v].clone()).collect()).collect(),
        shape,
        has_loops: g.has_loops(),
        max_multiplicity: g.max_multiplicity(),
    }
}

/// A pair of bijections on `G⁰` and `G¹` intertwining `s` and `r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphAutomorphism {
    /// `vertex_perm[v]` is the image of vertex `v`.
    pub vertex_perm: Vec<usize>,
    /// `edge_perm[e]` is the image of edge `e`.
    pub edge_perm: Vec<usize>,
}

impl GraphAutomorphism {
    pub fn identity(g: &Graph) -> Self {
        GraphAutomorphism { vertex_perm: (0..g.vertex_count()).collect(), edge_perm: (0..g.edge_count()).collect() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        GraphAutomorphism {
            vertex_perm: other.vertex_perm.iter().map(|&v| self.vertex_perm[v]).collect(),
            edge_perm: other.edge_perm.iter().map(|&e| self.edge_perm[e]).collect(),
        }
    }

    pub fn is_automorphism_of(&self, g: &Graph) -> bool {
        let bij = |p: &[usize], n: usize| {
            p.len() == n && {
                let mut seen = vec![false; n];
                p.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
            }
        };
        bij(&self.vertex_perm, g.vertex_count())
            && bij(&self.edge_perm, g.edge_count())
            && (0..g.edge_count()).all(|e| {
                let f = self.edge_perm[e];
                g.source(f) == self.vertex_perm[g.source(e)] && g.range(f) == self.vertex_perm[g.range(e)]
            })
    }

    pub fn is_identity(&self) -> bool {
        self.vertex_perm.iter().enumerate().all(|(i, &v)| i == v)
            && self.edge_perm.iter().enumerate().all(|(i, &e)| i == e)
    }
}

/// Upper bound on `|G⁰|` for [`classical_automorphisms`].
pub const AUTOMORPHISM_VERTEX_BOUND: usize = 10;

/// All classical automorphisms, identity first, in lexicographic order of
/// `(vertex_perm, edge_perm)`.
pub fn classical_automorphisms(g: &Graph) -> Result<Vec<GraphAutomorphism>> {
    let n = g.vertex_count();
    if n > AUTOMORPHISM_VERTEX_BOUND {
        return Err(Error::SizeBoundExceeded { vertices: n, bound: AUTOMORPHISM_VERTEX_BOUND });
    }
    let d = g.adjacency();
    let mut vertex_perms = Vec::new();
    let mut assign = vec![usize::MAX; n];
    let mut used = vec![false; n];
    search_vertex_perms(&d, 0, &mut assign, &mut used, &mut vertex_perms);

    let mut out = Vec::new();
    for vp in vertex_perms {
        extend_to_edges(g, &vp, &mut out);
    }
    out.sort();
    Ok(out)
}

fn search_vertex_perms(
    d: &[Vec<u64>],
    v: usize,
    assign: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<Vec<usize>>,
) {
    let n = d.len();
    if v == n {
        out.push(assign.clone());
        return;
    }
    for w in 0..n {
        if used[w] {
            continue;
        }
        // D[v][u] == D[σv][σu] and D[u][v] == D[σu][σv] for every assigned u (including v)
        assign[v] = w;
        let ok = (0..=v).all(|u| {
            let su = assign[u];
            d[v][u] == d[w][su] && d[u][v] == d[su][w]
        });
        if ok {
            used[w] = true;
            search_vertex_perms(d, v + 1, assign, used, out);
            used[w] = false;
        }
        assign[v] = usize::MAX;
    }
}

/// Every edge bijection over the vertex permutation, fiber by fiber.
fn extend_to_edges(g: &Graph, vp: &[usize], out: &mut Vec<GraphAutomorphism>) {
    let n = g.vertex_count();
    let mut fibers: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for v in 0..n {
        for w in 0..n {
            let from = g.parallel_class(v, w);
            if !from.is_empty() {
                fibers.push((from, g.parallel_class(vp[v], vp[w])));
            }
        }
    }
    let mut edge_perm = vec![usize::MAX; g.edge_count()];
    fn rec(
        fibers: &[(Vec<usize>, Vec<usize>)],
        idx: usize,
        edge_perm: &mut Vec<usize>,
        vp: &[usize],
        out: &mut Vec<GraphAutomorphism>,
    ) {
        if idx == fibers.len() {
            out.push(GraphAutomorphism { vertex_perm: vp.to_vec(), edge_perm: edge_perm.clone() });
            return;
        }
        let (from, to) = &fibers[idx];
        for perm in permutations(to.len()) {
            for (i, &e) in from.iter().enumerate() {
                edge_perm[e] = to[perm[i]];
            }
            rec(fibers, idx + 1, edge_perm, vp, out);
        }
    }
    rec(&fibers, 0, &mut edge_perm, vp, out);
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..k).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..k).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}
