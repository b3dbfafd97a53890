//! KMS states at the critical inverse temperature `β = ln ρ(D)`.
//!
//! For the scalar dynamics `σ_t(S_e) = e^{it} S_e` a KMS state is pinned
//! down by a tracial state `τ(δ_v) = μ_v` on `C(G⁰)`, where `μ` is a
//! nonnegative right eigenvector of the adjacency matrix `D` (rows indexed by
//! source) at the spectral radius, normalized to sum one. The state itself is
//! `φ(S_μ S_ν*) = δ_{μ,ν} ρ^{-|μ|} μ_{r(μ)}`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::correspondence::{Correspondence, EdgeFunction, VertexFunction};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::ZERO;

/// Convergence threshold on the normalized power-iteration iterate.
const POWER_TOL: f64 = 1e-14;
const POWER_MAX_ITERS: usize = 1_000_000;
/// Relative tolerance for deciding that a class attains the spectral radius.
const RADIUS_RTOL: f64 = 1e-9;
/// Eigen-equation acceptance threshold.
const EIGEN_TOL: f64 = 1e-9;

/// Perron data of a nonnegative matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Perron {
    pub rho: f64,
    /// Nonnegative eigenvector for `rho`, summing to one.
    pub vector: Vec<f64>,
}

/// Why no Perron vector was returned.
#[derive(Debug, Clone, PartialEq)]
pub struct PerronAbsent {
    pub rho: f64,
    pub reason: String,
}

/// Strongly connected components in reverse topological order of the
/// condensation (Tarjan), each sorted.
fn strong_components(d: &[Vec<f64>]) -> Vec<Vec<usize>> {
    struct State<'a> {
        d: &'a [Vec<f64>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }
    fn visit(s: &mut State, v: usize) {
        s.index[v] = Some(s.next);
        s.low[v] = s.next;
        s.next += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for w in 0..s.d.len() {
            if s.d[v][w] <= 0.0 {
                continue;
            }
            match s.index[w] {
                None => {
                    visit(s, w);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on_stack[w] => s.low[v] = s.low[v].min(iw),
                _ => {}
            }
        }
        if Some(s.low[v]) == s.index[v] {
            let mut comp = Vec::new();
            while let Some(w) = s.stack.pop() {
                s.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            s.out.push(comp);
        }
    }
    let n = d.len();
    let mut s = State {
        d,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for v in 0..n {
        if s.index[v].is_none() {
            visit(&mut s, v);
        }
    }
    s.out
}

/// Perron root and positive eigenvector of an irreducible block by power
/// iteration on `B + I` (the shift removes periodicity).
fn irreducible_perron(d: &[Vec<f64>], class: &[usize]) -> (f64, Vec<f64>) {
    let k = class.len();
    let b = |i: usize, j: usize| d[class[i]][class[j]];
    if k == 1 && b(0, 0) == 0.0 {
        return (0.0, vec![1.0]);
    }
    let mut x = vec![1.0 / k as f64; k];
    for _ in 0..POWER_MAX_ITERS {
        let mut y: Vec<f64> = (0..k).map(|i| x[i] + (0..k).map(|j| b(i, j) * x[j]).sum::<f64>()).collect();
        let s: f64 = y.iter().sum();
        y.iter_mut().for_each(|v| *v /= s);
        let delta = y.iter().zip(&x).map(|(a, c)| (a - c).abs()).fold(0.0, f64::max);
        x = y;
        if delta < POWER_TOL {
            break;
        }
    }
    let bx: f64 = (0..k).map(|i| (0..k).map(|j| b(i, j) * x[j]).sum::<f64>()).sum();
    (bx / x.iter().sum::<f64>(), x)
}

/// Spectral radius and normalized nonnegative eigenvector of a nonnegative
/// square matrix.
///
/// When the all-ones vector is an eigenvector for the spectral radius the
/// uniform vector is returned. Otherwise one eigenvector is built for every
/// strongly connected class attaining the radius that has no such class
/// upstream of it (supported on the class and the vertices reaching it), and
/// their normalized sum is returned; the choice is invariant under
/// automorphisms.
pub fn perron(d: &[Vec<f64>]) -> std::result::Result<Perron, PerronAbsent> {
    let n = d.len();
    if n == 0 {
        return Err(PerronAbsent { rho: 0.0, reason: "empty matrix".into() });
    }
    assert!(d.iter().all(|row| row.len() == n), "adjacency must be square");
    assert!(d.iter().flatten().all(|&x| x >= 0.0), "adjacency must be nonnegative");

    let classes = strong_components(d);
    let radii: Vec<(f64, Vec<f64>)> = classes.iter().map(|c| irreducible_perron(d, c)).collect();
    let rho = radii.iter().map(|r| r.0).fold(0.0, f64::max);
    if rho <= 0.0 {
        return Err(PerronAbsent { rho: 0.0, reason: "beta undefined (ln 0)".into() });
    }

    let row_sums: Vec<f64> = d.iter().map(|row| row.iter().sum()).collect();
    if row_sums.iter().all(|&s| (s - rho).abs() <= EIGEN_TOL * rho.max(1.0)) {
        // exact sum-of-rows radius for out-regular matrices
        return Ok(Perron { rho: row_sums[0], vector: vec![1.0 / n as f64; n] });
    }

    let basic: Vec<bool> = radii.iter().map(|r| r.0 >= rho * (1.0 - RADIUS_RTOL)).collect();
    let mut class_of = vec![0; n];
    for (ci, c) in classes.iter().enumerate() {
        for &v in c {
            class_of[v] = ci;
        }
    }

    let mut total = vec![0.0; n];
    for (ci, class) in classes.iter().enumerate() {
        if !basic[ci] {
            continue;
        }
        // vertices with a path into the class
        let mut reaches = vec![false; n];
        for &v in class {
            reaches[v] = true;
        }
        let mut changed = true;
        while changed {
            changed = false;
            for v in 0..n {
                if !reaches[v] && (0..n).any(|w| reaches[w] && d[v][w] > 0.0) {
                    reaches[v] = true;
                    changed = true;
                }
            }
        }
        let ancestors: Vec<usize> = (0..n).filter(|&v| reaches[v] && class_of[v] != ci).collect();
        if ancestors.iter().any(|&v| basic[class_of[v]]) {
            continue;
        }
        let mut mu = vec![0.0; n];
        for (i, &v) in class.iter().enumerate() {
            mu[v] = radii[ci].1[i];
        }
        if !ancestors.is_empty() {
            // (ρI − D_AA) x = D_AC μ_C, with ρ(D_AA) < ρ
            let k = ancestors.len();
            let a = DMatrix::from_fn(k, k, |i, j| {
                let diag = if i == j { rho } else { 0.0 };
                diag - d[ancestors[i]][ancestors[j]]
            });
            let rhs = DVector::from_fn(k, |i, _| class.iter().map(|&w| d[ancestors[i]][w] * mu[w]).sum::<f64>());
            let Some(x) = a.lu().solve(&rhs) else {
                return Err(PerronAbsent { rho, reason: "singular upstream system".into() });
            };
            for (i, &v) in ancestors.iter().enumerate() {
                mu[v] = x[i].max(0.0);
            }
        }
        let s: f64 = mu.iter().sum();
        for v in 0..n {
            total[v] += mu[v] / s;
        }
    }
    let s: f64 = total.iter().sum();
    if s <= 0.0 {
        return Err(PerronAbsent { rho, reason: "no nonnegative eigenvector".into() });
    }
    let vector: Vec<f64> = total.iter().map(|x| x / s).collect();
    let residual =
        (0..n).map(|v| ((0..n).map(|w| d[v][w] * vector[w]).sum::<f64>() - rho * vector[v]).abs()).fold(0.0, f64::max);
    if residual > EIGEN_TOL {
        return Err(PerronAbsent { rho, reason: format!("eigen residual {residual:e}") });
    }
    Ok(Perron { rho, vector })
}

/// Adjacency as floating point.
pub fn adjacency_f64(g: &Graph) -> Vec<Vec<f64>> {
    g.adjacency().into_iter().map(|r| r.into_iter().map(|x| x as f64).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KmsProfile {
    pub exists: bool,
    pub rho: f64,
    /// `ln ρ`; absent when `ρ = 0`.
    pub beta: Option<f64>,
    /// Perron vector (trace weights `τ(δ_v)`); empty when no state exists.
    pub mu: Vec<f64>,
    pub distinguished: bool,
    /// Set when `β = 0`: the profile is a trace rather than a KMS state at
    /// positive temperature.
    pub beta_zero: bool,
    pub reason: Option<String>,
}

impl KmsProfile {
    /// Profile built from a caller-chosen eigenvector (another KMS state
    /// when the `ρ`-eigenspace is degenerate). Validated against `Dμ = ρμ`.
    pub fn from_vector(g: &Graph, mu: &[f64]) -> Result<Self> {
        let d = adjacency_f64(g);
        let n = d.len();
        if mu.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: mu.len() });
        }
        if mu.iter().any(|&x| x < -EIGEN_TOL) {
            return Err(Error::Invalid("eigenvector has negative entries".into()));
        }
        let s: f64 = mu.iter().sum();
        let mu: Vec<f64> = mu.iter().map(|x| x.max(0.0) / s).collect();
        let rho = perron(&d).map(|p| p.rho).map_err(|a| Error::NoKmsState(a.reason))?;
        let residual =
            (0..n).map(|v| ((0..n).map(|w| d[v][w] * mu[w]).sum::<f64>() - rho * mu[v]).abs()).fold(0.0, f64::max);
        if residual > EIGEN_TOL {
            return Err(Error::Invalid(format!("not a Perron eigenvector (residual {residual:e})")));
        }
        Ok(Self::assemble(rho, mu))
    }

    fn assemble(rho: f64, mu: Vec<f64>) -> Self {
        let n = mu.len() as f64;
        let distinguished = mu.iter().all(|&x| x == 1.0 / n);
        KmsProfile { exists: true, rho, beta: Some(rho.ln()), mu, distinguished, beta_zero: rho == 1.0, reason: None }
    }

    pub fn mu_function(&self) -> VertexFunction {
        VertexFunction(self.mu.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    fn require(&self) -> Result<()> {
        if self.exists {
            Ok(())
        } else {
            Err(Error::NoKmsState(self.reason.clone().unwrap_or_default()))
        }
    }
}

pub fn kms_profile(g: &Graph) -> KmsProfile {
    match perron(&adjacency_f64(g)) {
        Ok(p) => KmsProfile::assemble(p.rho, p.vector),
        Err(a) => KmsProfile {
            exists: false,
            rho: a.rho,
            beta: (a.rho > 0.0).then(|| a.rho.ln()),
            mu: Vec::new(),
            distinguished: false,
            beta_zero: false,
            reason: Some(a.reason),
        },
    }
}

/// `τ(f) = Σ_v f(v) μ_v`.
pub fn trace_eval(profile: &KmsProfile, f: &VertexFunction) -> Result<Complex64> {
    profile.require()?;
    if f.len() != profile.mu.len() {
        return Err(Error::DimensionMismatch { expected: profile.mu.len(), found: f.len() });
    }
    Ok(f.0.iter().zip(&profile.mu).map(|(z, &m)| z * m).sum())
}

/// `φ(k_E(ξ₁)…k_E(ξ_m) k_E(η_n)*…k_E(η₁)*)`: zero unless `m = n`, otherwise
/// `ρ^{-m} τ(⟨η₁⊗…⊗η_m, ξ₁⊗…⊗ξ_m⟩)`.
pub fn kms_eval_tensor(
    profile: &KmsProfile,
    corr: &Correspondence<'_>,
    xis: &[EdgeFunction],
    etas: &[EdgeFunction],
) -> Result<Complex64> {
    profile.require()?;
    if xis.len() != etas.len() {
        return Ok(ZERO);
    }
    let x = corr.tensor(xis)?;
    let y = corr.tensor(etas)?;
    let ip = corr.tensor_inner_product(&y, &x)?;
    Ok(trace_eval(profile, &ip)? * profile.rho.powi(-(xis.len() as i32)))
}
