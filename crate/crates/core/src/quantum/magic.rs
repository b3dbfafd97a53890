//! Matrix realizations of magic unitaries and their verification against a
//! presentation.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

use super::presentation::{Presentation, Realization};
use crate::error::{Error, Result};
use crate::graph::GraphAutomorphism;
use crate::linalg::{identity, op_norm, zeros, CMatrix, ONE, ZERO};
use crate::par::{self, Exec};

/// Threshold for a realization to pass.
pub const RELATION_TOL: f64 = 1e-8;

/// An `m × m` array of `k × k` complex matrices `q[v][w]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MagicUnitary {
    entries: Vec<Vec<CMatrix>>,
    block: usize,
}

impl MagicUnitary {
    /// Checks shape only; the magic relations are measured by
    /// [`MagicUnitary::magic_defect`] and [`verify_magic`].
    pub fn new(entries: Vec<Vec<CMatrix>>) -> Result<Self> {
        let m = entries.len();
        if m == 0 {
            return Err(Error::ShapeMismatch("empty array".into()));
        }
        let block = entries[0].first().map(|e| e.nrows()).unwrap_or(0);
        if block == 0 {
            return Err(Error::ShapeMismatch("empty entry".into()));
        }
        for (v, row) in entries.iter().enumerate() {
            if row.len() != m {
                return Err(Error::ShapeMismatch(format!("row {v} has {} entries, expected {m}", row.len())));
            }
            for (w, e) in row.iter().enumerate() {
                if e.nrows() != block || e.ncols() != block {
                    return Err(Error::ShapeMismatch(format!(
                        "entry [{v}][{w}] is {}x{}, expected {block}x{block}",
                        e.nrows(),
                        e.ncols()
                    )));
                }
            }
        }
        Ok(MagicUnitary { entries, block })
    }

    /// Scalar array (`k = 1`).
    pub fn scalar(rows: &[Vec<Complex64>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.iter().map(|&z| CMatrix::from_element(1, 1, z)).collect()).collect())
    }

    /// `q[v][w] = [v = σ(w)]`, the classical point of a permutation.
    pub fn permutation(perm: &[usize]) -> Self {
        let m = perm.len();
        let entries = (0..m)
            .map(|v| (0..m).map(|w| CMatrix::from_element(1, 1, if perm[w] == v { ONE } else { ZERO })).collect())
            .collect();
        MagicUnitary { entries, block: 1 }
    }

    pub fn from_automorphism(a: &GraphAutomorphism) -> Self {
        Self::permutation(&a.vertex_perm)
    }

    /// `q_vw = δ_vw 1_k`.
    pub fn identity(m: usize, k: usize) -> Self {
        let entries = (0..m).map(|v| (0..m).map(|w| if v == w { identity(k) } else { zeros(k) }).collect()).collect();
        MagicUnitary { entries, block: k }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn entry(&self, v: usize, w: usize) -> &CMatrix {
        &self.entries[v][w]
    }

    pub fn entries(&self) -> &[Vec<CMatrix>] {
        &self.entries
    }

    /// The array `q'[v][w] = q[w][v]` (entries are not transposed).
    pub fn transposed(&self) -> Self {
        let m = self.dim();
        MagicUnitary {
            entries: (0..m).map(|v| (0..m).map(|w| self.entries[w][v].clone()).collect()).collect(),
            block: self.block,
        }
    }

    /// Largest violation of projection and row/column-sum relations.
    pub fn magic_defect(&self) -> f64 {
        let m = self.dim();
        let one = identity(self.block);
        let mut worst: f64 = 0.0;
        for v in 0..m {
            let mut row = zeros(self.block);
            let mut col = zeros(self.block);
            for w in 0..m {
                let q = &self.entries[v][w];
                worst = worst.max(op_norm(&(q.adjoint() - q))).max(op_norm(&(q * q - q)));
                row += q;
                col += &self.entries[w][v];
            }
            worst = worst.max(op_norm(&(row - &one))).max(op_norm(&(col - &one)));
        }
        worst
    }

    /// Largest `‖q_a q_b − q_b q_a‖` over all pairs of entries.
    pub fn max_commutator(&self) -> f64 {
        let flat: Vec<&CMatrix> = self.entries.iter().flatten().collect();
        let mut worst: f64 = 0.0;
        for (i, a) in flat.iter().enumerate() {
            for b in &flat[i + 1..] {
                worst = worst.max(op_norm(&(*a * *b - *b * *a)));
            }
        }
        worst
    }

    /// Parses `{"entries": A}` or a bare `A`, where `A[v][w]` is a complex
    /// scalar (`[re, im]` or a number) or a `k × k` array of them.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        let arr = match &doc {
            Value::Object(map) => map.get("entries").ok_or_else(|| Error::Malformed("missing `entries`".into()))?,
            other => other,
        };
        let rows = arr.as_array().ok_or_else(|| Error::Malformed("entries must be an array".into()))?;
        let mut entries = Vec::with_capacity(rows.len());
        for (v, row) in rows.iter().enumerate() {
            let row = row.as_array().ok_or_else(|| Error::Malformed(format!("row {v} must be an array")))?;
            let parsed: Result<Vec<CMatrix>> =
                row.iter().enumerate().map(|(w, e)| parse_entry(e, &format!("[{v}][{w}]"))).collect();
            entries.push(parsed?);
        }
        Self::new(entries)
    }

    pub fn to_value(&self) -> Value {
        let entry = |m: &CMatrix| -> Value {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| serde_json::json!([m[(i, j)].re, m[(i, j)].im])).collect::<Value>())
                .collect()
        };
        self.entries.iter().map(|row| row.iter().map(entry).collect::<Value>()).collect()
    }
}

fn parse_scalar(v: &Value) -> Option<Complex64> {
    match v {
        Value::Number(x) => x.as_f64().map(|re| Complex64::new(re, 0.0)),
        Value::Array(p) if p.len() == 2 && p.iter().all(Value::is_number) => {
            Some(Complex64::new(p[0].as_f64()?, p[1].as_f64()?))
        }
        _ => None,
    }
}

fn parse_entry(v: &Value, at: &str) -> Result<CMatrix> {
    if let Some(z) = parse_scalar(v) {
        return Ok(CMatrix::from_element(1, 1, z));
    }
    let bad = || Error::Malformed(format!("entry {at} is neither a complex scalar nor a square matrix"));
    let rows = v.as_array().ok_or_else(bad)?;
    let k = rows.len();
    let mut m = CMatrix::zeros(k, k);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().filter(|r| r.len() == k).ok_or_else(bad)?;
        for (j, x) in row.iter().enumerate() {
            m[(i, j)] = parse_scalar(x).ok_or_else(bad)?;
        }
    }
    Ok(m)
}

/// Generator values for a presentation, in generator order.
pub fn generator_values(u: &MagicUnitary, p: &Presentation) -> Result<Vec<CMatrix>> {
    let expected = p.realization.dim();
    if u.dim() != expected {
        return Err(Error::DimensionMismatch { expected, found: u.dim() });
    }
    let k = u.block();
    Ok(p.generators
        .iter()
        .map(|g| match (p.realization, g.family.as_str()) {
            (Realization::Direct { .. }, _) => u.entry(g.index[0], g.index[1]).clone(),
            (Realization::WreathEdges { n, m }, "u") => {
                let (l, i, j) = (g.index[0], g.index[1], g.index[2]);
                (0..m).fold(zeros(k), |acc, c| acc + u.entry(l * n + i, c * n + j))
            }
            (Realization::WreathEdges { n, .. }, _) => {
                let (l, c) = (g.index[0], g.index[1]);
                (0..n).fold(zeros(k), |acc, j| acc + u.entry(l * n, c * n + j))
            }
        })
        .collect())
}

fn evaluate_relations(p: &Presentation, values: &[CMatrix], k: usize, exec: Exec) -> Vec<f64> {
    let one = identity(k);
    par::map(exec, &p.relations, |r| {
        let mut acc = zeros(k);
        for t in &r.poly.terms {
            let mut w = one.clone();
            for l in &t.word {
                let g = &values[l.generator];
                w = if l.star { w * g.adjoint() } else { w * g };
            }
            acc += w * t.coeff;
        }
        op_norm(&acc)
    })
}

/// `max ‖q_{l(i),k(j)} − u^(l)_ij v_lk‖`, with absent factors read as 1.
fn wreath_factorization(u: &MagicUnitary, n: usize, m: usize) -> f64 {
    let k = u.block();
    let mut worst: f64 = 0.0;
    for l in 0..m {
        for c in 0..m {
            let v: CMatrix = (0..n).fold(zeros(k), |acc, j| acc + u.entry(l * n, c * n + j));
            for i in 0..n {
                for j in 0..n {
                    let uij: CMatrix = (0..m).fold(zeros(k), |acc, d| acc + u.entry(l * n + i, d * n + j));
                    worst = worst.max(op_norm(&(u.entry(l * n + i, c * n + j) - uij * &v)));
                }
            }
        }
    }
    worst
}

#[derive(Debug, Clone, Serialize)]
pub struct MagicReport {
    pub label: String,
    pub dimension: usize,
    pub block_size: usize,
    pub relations_checked: usize,
    /// Max operator-norm residual per relation class.
    pub residuals: BTreeMap<String, f64>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// The transposed array also satisfies every relation.
    pub antipode_compatible: bool,
    pub max_commutator: f64,
}

impl MagicReport {
    pub fn residual(&self, class: &str) -> f64 {
        self.residuals.get(class).copied().unwrap_or(0.0)
    }
}

fn class_residuals(u: &MagicUnitary, p: &Presentation, exec: Exec) -> Result<BTreeMap<String, f64>> {
    let values = generator_values(u, p)?;
    let res = evaluate_relations(p, &values, u.block(), exec);
    let mut out = BTreeMap::new();
    for (r, x) in p.relations.iter().zip(res) {
        let e = out.entry(r.class.as_str().to_string()).or_insert(0.0f64);
        *e = e.max(x);
    }
    if let Realization::WreathEdges { n, m } = p.realization {
        out.insert("edge_magic".into(), u.magic_defect());
        out.insert("edge_factorization".into(), wreath_factorization(u, n, m));
    }
    Ok(out)
}

/// Substitutes the realization into every relation of `p`.
pub fn verify_magic(u: &MagicUnitary, p: &Presentation, tol: f64, exec: Exec) -> Result<MagicReport> {
    let residuals = class_residuals(u, p, exec)?;
    let max_residual = residuals.values().copied().fold(0.0, f64::max);
    let transposed = class_residuals(&u.transposed(), p, exec)?;
    let antipode_compatible = transposed.values().all(|&r| r <= tol);
    Ok(MagicReport {
        label: p.label.to_string(),
        dimension: u.dim(),
        block_size: u.block(),
        relations_checked: p.relations.len(),
        residuals,
        max_residual,
        tolerance: tol,
        passed: max_residual <= tol,
        antipode_compatible,
        max_commutator: u.max_commutator(),
    })
}

/// Edge-level array of a classical wreath element: copy `k` goes to
/// `π(k)` with its loops permuted by `σ_k`, i.e.
/// `Q[(l,j),(k,i)] = [l = π(k)] [j = σ_k(i)]`.
pub fn wreath_classical(sigmas: &[Vec<usize>], pi: &[usize]) -> Result<MagicUnitary> {
    let m = pi.len();
    if sigmas.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: sigmas.len() });
    }
    let n = sigmas.first().map(Vec::len).unwrap_or(0);
    let mut perm = vec![0; n * m];
    for k in 0..m {
        if sigmas[k].len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: sigmas[k].len() });
        }
        for i in 0..n {
            perm[k * n + i] = pi[k] * n + sigmas[k][i];
        }
    }
    Ok(MagicUnitary::permutation(&perm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{classical_automorphisms, permutations, Graph};
    use crate::linalg::line_projection;
    use crate::quantum::presentation::{emit_banica, emit_bichon, emit_wreath};

    fn two_projection(theta: f64) -> MagicUnitary {
        let p = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, ZERO]));
        let q = line_projection(theta);
        let one = identity(2);
        let z = zeros(2);
        MagicUnitary::new(vec![
            vec![p.clone(), &one - &p, z.clone(), z.clone()],
            vec![&one - &p, p.clone(), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), q.clone(), &one - &q],
            vec![z.clone(), z, &one - &q, q],
        ])
        .unwrap()
    }

    #[test]
    fn automorphisms_pass_exactly() {
        for g in [
            Graph::cycle(3),
            Graph::from_pairs(3, &[(0, 1), (1, 2), (2, 0), (0, 2)]).unwrap(),
            Graph::cycle_union(2, 2),
        ] {
            let ban = emit_banica(&g).unwrap();
            let bic = emit_bichon(&g).unwrap();
            for a in classical_automorphisms(&g).unwrap() {
                let u = MagicUnitary::from_automorphism(&a);
                for p in [&ban, &bic] {
                    let r = verify_magic(&u, p, RELATION_TOL, Exec::Sequential).unwrap();
                    assert_eq!(r.max_residual, 0.0);
                    assert!(r.antipode_compatible);
                }
            }
        }
    }

    #[test]
    fn only_rotations_pass_on_the_triangle() {
        let g = Graph::cycle(3);
        let ban = emit_banica(&g).unwrap();
        let mut passing = 0;
        for perm in permutations(3) {
            let r = verify_magic(&MagicUnitary::permutation(&perm), &ban, RELATION_TOL, Exec::Parallel).unwrap();
            if r.passed {
                passing += 1;
            } else {
                assert!(r.residual("ud_du") >= 1.0);
            }
        }
        assert_eq!(passing, 3);
    }

    #[test]
    fn two_projection_witness() {
        let u = two_projection(std::f64::consts::PI / 5.0);
        let p = emit_banica(&Graph::from_pairs(4, &[]).unwrap()).unwrap();
        let r = verify_magic(&u, &p, RELATION_TOL, Exec::default()).unwrap();
        assert!(r.max_residual <= 1e-10, "{r:?}");
        assert!(r.max_commutator > 0.1);
        assert!(r.antipode_compatible);
    }

    #[test]
    fn json_round_trip_and_errors() {
        let u = two_projection(0.3);
        let back = MagicUnitary::from_json(&u.to_value().to_string()).unwrap();
        assert_eq!(back, u);
        let s = MagicUnitary::from_json("[[1,0],[0,[1,0]]]").unwrap();
        assert_eq!(s, MagicUnitary::permutation(&[0, 1]));
        assert!(matches!(MagicUnitary::from_json("[[1,0]]"), Err(Error::ShapeMismatch(_))));
        assert!(matches!(MagicUnitary::from_json("{\"x\":1}"), Err(Error::Malformed(_))));
        let p = emit_banica(&Graph::cycle(3)).unwrap();
        assert_eq!(
            verify_magic(&s, &p, RELATION_TOL, Exec::default()).unwrap_err(),
            Error::DimensionMismatch { expected: 3, found: 2 }
        );
    }

    #[test]
    fn wreath_classical_points() {
        let g = Graph::bouquet_union(2, 2);
        let p = emit_wreath(&g).unwrap();
        let s2 = permutations(2);
        let mut count = 0;
        for s0 in &s2 {
            for s1 in &s2 {
                for pi in &s2 {
                    let u = wreath_classical(&[s0.clone(), s1.clone()], pi).unwrap();
                    let r = verify_magic(&u, &p, RELATION_TOL, Exec::default()).unwrap();
                    assert_eq!(r.max_residual, 0.0, "{r:?}");
                    count += 1;
                }
            }
        }
        assert_eq!(count, 8);
        // an edge permutation mixing copies without respecting them
        let bad = MagicUnitary::permutation(&[0, 2, 1, 3]);
        assert!(!verify_magic(&bad, &p, RELATION_TOL, Exec::default()).unwrap().passed);
    }

    #[test]
    fn wreath_classical_matches_graph_automorphisms() {
        let g = Graph::bouquet_union(2, 2);
        let autos: std::collections::BTreeSet<Vec<usize>> =
            classical_automorphisms(&g).unwrap().into_iter().map(|a| a.edge_perm).collect();
        let s2 = permutations(2);
        for s0 in &s2 {
            for s1 in &s2 {
                for pi in &s2 {
                    let u = wreath_classical(&[s0.clone(), s1.clone()], pi).unwrap();
                    let perm: Vec<usize> =
                        (0..4).map(|w| (0..4).find(|&v| u.entry(v, w)[(0, 0)] == ONE).unwrap()).collect();
                    assert!(autos.contains(&perm));
                }
            }
        }
    }
}
