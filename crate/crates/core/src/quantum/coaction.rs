//! Coactions induced by a magic unitary on `C(G⁰)`, on the correspondence
//! `C(G¹)` and on the graph algebra, with direct equivariance checks.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use super::magic::MagicUnitary;
use crate::algebra::element::{monomials_up_to, AlgebraElement, Monomial};
use crate::algebra::ring::MatrixCoeff;
use crate::algebra::state::{monomial_value, slice_state};
use crate::correspondence::Correspondence;
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphAutomorphism};
use crate::kms::KmsProfile;
use crate::linalg::{identity, op_norm, zeros, CMatrix, ONE, ZERO};
use crate::par::{self, Exec};

/// `α(δ_v) = Σ_w δ_w ⊗ alpha[w][v]` and `λ(δ_e) = Σ_f δ_f ⊗ lambda[f][e]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoactionMatrices {
    pub block: usize,
    pub alpha: Vec<Vec<CMatrix>>,
    pub lambda: Vec<Vec<CMatrix>>,
}

fn scalar(x: bool) -> CMatrix {
    CMatrix::from_element(1, 1, if x { ONE } else { ZERO })
}

/// Position of `e` among the edges parallel to it.
fn parallel_index(g: &Graph, e: usize) -> usize {
    g.parallel_class(g.source(e), g.range(e)).iter().position(|&f| f == e).expect("edge in its class")
}

/// `alpha[w][v] = q_wv` and `lambda[f][e] = q_{s(f)s(e)} q_{r(f)r(e)}`. On a
/// multigraph, parallel edges are matched by their position within the
/// class, so `lambda[f][e]` vanishes unless `f` and `e` sit at the same
/// position.
pub fn build_coactions(u: &MagicUnitary, g: &Graph) -> Result<CoactionMatrices> {
    let n = g.vertex_count();
    if u.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: u.dim() });
    }
    let k = u.block();
    let alpha = (0..n).map(|w| (0..n).map(|v| u.entry(w, v).clone()).collect()).collect();
    let positions: Vec<usize> = (0..g.edge_count()).map(|e| parallel_index(g, e)).collect();
    let lambda = (0..g.edge_count())
        .map(|f| {
            (0..g.edge_count())
                .map(|e| {
                    if positions[f] != positions[e] {
                        return zeros(k);
                    }
                    u.entry(g.source(f), g.source(e)) * u.entry(g.range(f), g.range(e))
                })
                .collect()
        })
        .collect();
    Ok(CoactionMatrices { block: k, alpha, lambda })
}

impl CoactionMatrices {
    /// Classical coaction of a graph automorphism, using its own edge
    /// permutation.
    pub fn from_automorphism(g: &Graph, a: &GraphAutomorphism) -> Result<Self> {
        if !a.is_automorphism_of(g) {
            return Err(Error::Invalid("not an automorphism of the graph".into()));
        }
        let n = g.vertex_count();
        let m = g.edge_count();
        Ok(CoactionMatrices {
            block: 1,
            alpha: (0..n).map(|w| (0..n).map(|v| scalar(a.vertex_perm[v] == w)).collect()).collect(),
            lambda: (0..m).map(|f| (0..m).map(|e| scalar(a.edge_perm[e] == f)).collect()).collect(),
        })
    }

    /// The trivial coaction with `k × k` blocks.
    pub fn identity(g: &Graph, k: usize) -> Self {
        let diag = |len: usize| -> Vec<Vec<CMatrix>> {
            (0..len).map(|i| (0..len).map(|j| if i == j { identity(k) } else { zeros(k) }).collect()).collect()
        };
        CoactionMatrices { block: k, alpha: diag(g.vertex_count()), lambda: diag(g.edge_count()) }
    }

    fn check_shape(&self, g: &Graph) -> Result<()> {
        let ok = |a: &[Vec<CMatrix>], len: usize| {
            a.len() == len
                && a.iter()
                    .all(|r| r.len() == len && r.iter().all(|x| x.nrows() == self.block && x.ncols() == self.block))
        };
        if !ok(&self.alpha, g.vertex_count()) {
            return Err(Error::DimensionMismatch { expected: g.vertex_count(), found: self.alpha.len() });
        }
        if !ok(&self.lambda, g.edge_count()) {
            return Err(Error::DimensionMismatch { expected: g.edge_count(), found: self.lambda.len() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivarianceReport {
    /// Keyed `a_…` through `g_…`.
    pub checks: BTreeMap<String, CheckEntry>,
    pub max_level: usize,
    pub tolerance: f64,
    /// Checks (a)–(e) and (g).
    pub passed: bool,
    /// Check (f), needed for the Bichon category.
    pub s_intertwining: bool,
}

impl EquivarianceReport {
    pub fn residual(&self, prefix: &str) -> f64 {
        self.checks.iter().find(|(k, _)| k.starts_with(prefix)).map(|(_, c)| c.residual).unwrap_or(f64::NAN)
    }

    pub fn all_passed(&self) -> bool {
        self.passed && self.s_intertwining
    }
}

fn norm_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    op_norm(&(a - b))
}

/// Checks, entrywise in `k × k` matrices:
/// (a) `α` is a unital *-homomorphism; (b) `λ(ξ·f) = λ(ξ)α(f)`;
/// (c) `⟨λξ, λη⟩ = α⟨ξ, η⟩`; (d) `λ(φ(f)ξ) = (φ⊗id)α(f) λ(ξ)`;
/// (e) `(r_*⊗id)α = λ r_*`; (f) the same for `s`; (g) (c) for the tensor
/// powers `λ_(m)`, `2 ≤ m ≤ max_level`.
pub fn verify_equivariance(
    c: &CoactionMatrices,
    g: &Graph,
    max_level: usize,
    tol: f64,
    exec: Exec,
) -> Result<EquivarianceReport> {
    c.check_shape(g)?;
    let n = g.vertex_count();
    let m = g.edge_count();
    let k = c.block;
    let one = identity(k);
    let z = zeros(k);
    let (alpha, lambda) = (&c.alpha, &c.lambda);

    // (a)
    let mut ra: f64 = 0.0;
    for w in 0..n {
        let row: CMatrix = (0..n).fold(zeros(k), |acc, v| acc + &alpha[w][v]);
        ra = ra.max(norm_diff(&row, &one));
        for v in 0..n {
            ra = ra.max(norm_diff(&alpha[w][v].adjoint(), &alpha[w][v]));
            for u in 0..n {
                let expected = if u == v { &alpha[w][v] } else { &z };
                ra = ra.max(norm_diff(&(&alpha[w][v] * &alpha[w][u]), expected));
            }
        }
    }

    let edges: Vec<usize> = (0..m).collect();
    let per_edge = par::map(exec, &edges, |&e| {
        let (mut rb, mut rc, mut rd): (f64, f64, f64) = (0.0, 0.0, 0.0);
        for v in 0..n {
            for f in 0..m {
                // (b) [r(e)=v] λ[f][e] = λ[f][e] α[r(f)][v]
                let lhs = if g.range(e) == v { lambda[f][e].clone() } else { z.clone() };
                rb = rb.max(norm_diff(&lhs, &(&lambda[f][e] * &alpha[g.range(f)][v])));
                // (d) [s(e)=v] λ[f][e] = α[s(f)][v] λ[f][e]
                let lhs = if g.source(e) == v { lambda[f][e].clone() } else { z.clone() };
                rd = rd.max(norm_diff(&lhs, &(&alpha[g.source(f)][v] * &lambda[f][e])));
            }
        }
        // (c) Σ_{r(h)=w} λ[h][e]* λ[h][e'] = δ_{ee'} α[w][r(e)]
        for e2 in 0..m {
            for w in 0..n {
                let lhs = g.in_edges(w).iter().fold(zeros(k), |acc, &h| acc + lambda[h][e].adjoint() * &lambda[h][e2]);
                let rhs = if e == e2 { &alpha[w][g.range(e)] } else { &z };
                rc = rc.max(norm_diff(&lhs, rhs));
            }
        }
        (rb, rc, rd)
    });
    let rb = per_edge.iter().map(|x| x.0).fold(0.0, f64::max);
    let rc = per_edge.iter().map(|x| x.1).fold(0.0, f64::max);
    let rd = per_edge.iter().map(|x| x.2).fold(0.0, f64::max);

    // (e), (f): α[r(h)][v] = Σ_{r(e)=v} λ[h][e], and likewise for s
    let (mut re, mut rf): (f64, f64) = (0.0, 0.0);
    for v in 0..n {
        for h in 0..m {
            let sum_r = g.in_edges(v).iter().fold(zeros(k), |acc, &e| acc + &lambda[h][e]);
            re = re.max(norm_diff(&alpha[g.range(h)][v], &sum_r));
            let sum_s = g.out_edges(v).iter().fold(zeros(k), |acc, &e| acc + &lambda[h][e]);
            rf = rf.max(norm_diff(&alpha[g.source(h)][v], &sum_s));
        }
    }

    let rg = tensor_level_residual(c, g, max_level, exec);

    let mut checks = BTreeMap::new();
    for (name, r) in [
        ("a_alpha_homomorphism", ra),
        ("b_right_action", rb),
        ("c_inner_product", rc),
        ("d_left_action", rd),
        ("e_r_intertwining", re),
        ("f_s_intertwining", rf),
        ("g_tensor_levels", rg),
    ] {
        checks.insert(name.to_string(), CheckEntry { residual: r, passed: r <= tol });
    }
    let passed = [ra, rb, rc, rd, re, rg].iter().all(|&r| r <= tol);
    Ok(EquivarianceReport { checks, max_level, tolerance: tol, passed, s_intertwining: rf <= tol })
}

/// `max_m max ‖⟨λ_(m)δ_μ, λ_(m)δ_ν⟩(w) − δ_{μν} α[w][r(μ)]‖` with
/// `λ_(m)(δ_μ) = Σ_γ δ_γ ⊗ λ[γ₁][μ₁]⋯λ[γ_m][μ_m]` over composable `γ`.
fn tensor_level_residual(c: &CoactionMatrices, g: &Graph, max_level: usize, exec: Exec) -> f64 {
    let corr = Correspondence::new(g);
    let k = c.block;
    let mut worst: f64 = 0.0;
    for level in 2..=max_level {
        let basis = corr.basis(level);
        let b = basis.len();
        let idx: Vec<usize> = (0..b).collect();
        // big[γ][μ]
        let big: Vec<Vec<CMatrix>> = par::map(exec, &idx, |&gi| {
            (0..b)
                .map(|mi| {
                    let (gam, mu) = (&basis.paths[gi], &basis.paths[mi]);
                    gam.iter().zip(mu).fold(identity(k), |acc, (&f, &e)| acc * &c.lambda[f][e])
                })
                .collect()
        });
        let rows = par::map(exec, &idx, |&mu| {
            let mut r: f64 = 0.0;
            for nu in 0..b {
                for w in 0..g.vertex_count() {
                    let mut lhs = zeros(k);
                    for gi in (0..b).filter(|&gi| basis.ranges[gi] == w) {
                        lhs += big[gi][mu].adjoint() * &big[gi][nu];
                    }
                    let rhs = if mu == nu { c.alpha[w][basis.ranges[mu]].clone() } else { zeros(k) };
                    r = r.max(norm_diff(&lhs, &rhs));
                }
            }
            r
        });
        worst = rows.into_iter().fold(worst, f64::max);
    }
    worst
}

#[derive(Debug, Clone, Serialize)]
pub struct StateEquivarianceReport {
    pub tau_residual: f64,
    pub tau_equivariant: bool,
    pub phi_residual: f64,
    pub phi_equivariant: bool,
    /// The two flags coincide, as they must.
    pub agree: bool,
    pub monomials_checked: usize,
    pub depth: usize,
    pub tolerance: f64,
}

type MatrixElement = AlgebraElement<MatrixCoeff>;

/// `ω` on generators: `ω(S_e) = Σ_f S_f ⊗ λ[f][e]`, `ω(p_v) = Σ_w p_w ⊗ α[w][v]`.
struct Omega {
    edges: Vec<MatrixElement>,
    edge_adjoints: Vec<MatrixElement>,
    vertices: Vec<MatrixElement>,
    block: usize,
}

impl Omega {
    fn new(c: &CoactionMatrices, g: &Graph) -> Self {
        let k = c.block;
        let nonzero = |x: &CMatrix| x.iter().any(|z| *z != ZERO);
        let edges: Vec<MatrixElement> = (0..g.edge_count())
            .map(|e| {
                let mut x = MatrixElement::zero();
                for f in (0..g.edge_count()).filter(|&f| nonzero(&c.lambda[f][e])) {
                    x = x.add(&MatrixElement::edge(g, f, MatrixCoeff(c.lambda[f][e].clone())));
                }
                x
            })
            .collect();
        let edge_adjoints = edges.iter().map(|x| x.adjoint()).collect();
        let vertices = (0..g.vertex_count())
            .map(|v| {
                let mut x = MatrixElement::zero();
                for w in (0..g.vertex_count()).filter(|&w| nonzero(&c.alpha[w][v])) {
                    x = x.add(&MatrixElement::vertex_projection(w, MatrixCoeff(c.alpha[w][v].clone())));
                }
                x
            })
            .collect();
        Omega { edges, edge_adjoints, vertices, block: k }
    }

    fn apply(&self, m: &Monomial) -> MatrixElement {
        if m.mu.is_empty() && m.nu.is_empty() {
            return self.vertices[m.range()].clone();
        }
        let mut factors =
            m.mu.edges.iter().map(|&e| &self.edges[e]).chain(m.nu.edges.iter().rev().map(|&e| &self.edge_adjoints[e]));
        let first = factors.next().expect("non-empty monomial").clone();
        factors.fold(first, |acc, x| acc.multiply(x))
    }
}

/// Compares `(τ⊗id)α(δ_v)` with `τ(δ_v) 1` and `(φ⊗id)ω(x)` with `φ(x) 1`
/// for every monomial of length `≤ depth`.
pub fn state_equivariance_check(
    c: &CoactionMatrices,
    profile: &KmsProfile,
    g: &Graph,
    depth: usize,
    tol: f64,
    exec: Exec,
) -> Result<StateEquivarianceReport> {
    if !profile.exists {
        return Err(Error::NoKmsState(profile.reason.clone().unwrap_or_default()));
    }
    if profile.mu.len() != g.vertex_count() {
        return Err(Error::DimensionMismatch { expected: g.vertex_count(), found: profile.mu.len() });
    }
    if !verify_equivariance(c, g, 1, tol, exec)?.passed {
        return Err(Error::Hypothesis("coactions fail verify_equivariance".into()));
    }
    let k = c.block;
    let one = identity(k);
    let n = g.vertex_count();
    let mut tau_residual: f64 = 0.0;
    for v in 0..n {
        let lhs = (0..n).fold(zeros(k), |acc, w| acc + &c.alpha[w][v] * Complex64::new(profile.mu[w], 0.0));
        tau_residual = tau_residual.max(norm_diff(&lhs, &(&one * Complex64::new(profile.mu[v], 0.0))));
    }

    let omega = Omega::new(c, g);
    let monos = monomials_up_to(g, depth);
    let res = par::map(exec, &monos, |m| -> Result<f64> {
        let image = omega.apply(m);
        let lhs = slice_state(&image, profile)?.map(|x| x.0).unwrap_or_else(|| zeros(omega.block));
        let expected = &one * Complex64::new(monomial_value(m, profile), 0.0);
        Ok(norm_diff(&lhs, &expected))
    });
    let mut phi_residual: f64 = 0.0;
    for r in res {
        phi_residual = phi_residual.max(r?);
    }
    let tau_equivariant = tau_residual <= tol;
    let phi_equivariant = phi_residual <= tol;
    Ok(StateEquivarianceReport {
        tau_residual,
        tau_equivariant,
        phi_residual,
        phi_equivariant,
        agree: tau_equivariant == phi_equivariant,
        monomials_checked: monos.len(),
        depth,
        tolerance: tol,
    })
}
