//! Evaluation of the critical KMS state on graph-algebra elements and a
//! direct check of the KMS condition.

use num_complex::Complex64;
use serde::Serialize;

use super::element::{monomials_up_to, AlgebraElement, Monomial};
use super::ring::Coefficient;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::kms::KmsProfile;
use crate::linalg::ZERO;
use crate::par::{self, Exec};

fn require(profile: &KmsProfile) -> Result<()> {
    if profile.exists {
        Ok(())
    } else {
        Err(Error::NoKmsState(profile.reason.clone().unwrap_or_default()))
    }
}

/// `φ(S_μ S_ν*) = δ_{μ,ν} ρ^{-|μ|} μ_{r(μ)}`.
pub fn monomial_value(m: &Monomial, profile: &KmsProfile) -> f64 {
    if m.mu != m.nu {
        return 0.0;
    }
    profile.rho.powi(-(m.mu.len() as i32)) * profile.mu[m.range()]
}

/// `φ(x)` for a scalar element. Elements over other rings go through
/// [`slice_state`].
pub fn state_eval(x: &AlgebraElement<Complex64>, profile: &KmsProfile) -> Result<Complex64> {
    require(profile)?;
    Ok(x.terms().map(|(m, c)| c * monomial_value(m, profile)).fold(ZERO, |a, b| a + b))
}

/// The slice map `(φ ⊗ id)(x)` into the coefficient ring; `None` when every
/// term evaluates to zero.
pub fn slice_state<C: Coefficient>(x: &AlgebraElement<C>, profile: &KmsProfile) -> Result<Option<C>> {
    require(profile)?;
    let mut acc: Option<C> = None;
    for (m, c) in x.terms() {
        let w = monomial_value(m, profile);
        if w == 0.0 {
            continue;
        }
        let term = c.scale(Complex64::new(w, 0.0));
        acc = Some(match acc {
            Some(a) => a.add(&term),
            None => term,
        });
    }
    Ok(acc)
}

/// Evaluates `φ` on products of monomials from their shapes alone, both
/// as reduced and after Cuntz–Krieger expansion. Expansion keeps
/// off-diagonal monomials off-diagonal and sends `S_μ S_μ*` to
/// `ρ^{-|μ|}` times the expanded value of `p_{r(μ)}`, so one symbolic
/// expansion per vertex suffices.
struct Evaluator<'a> {
    profile: &'a KmsProfile,
    expanded: Vec<f64>,
}

impl<'a> Evaluator<'a> {
    fn new(g: &Graph, profile: &'a KmsProfile, depth: usize) -> Self {
        let expanded = (0..g.vertex_count())
            .map(|v| {
                AlgebraElement::<Complex64>::vertex_projection(v, Complex64::new(1.0, 0.0))
                    .expand(g, depth)
                    .terms()
                    .map(|(m, c)| c.re * monomial_value(m, profile))
                    .sum()
            })
            .collect();
        Evaluator { profile, expanded }
    }

    /// `(φ(ab), φ(E(ab)))`.
    fn pair(&self, a: &Monomial, b: &Monomial) -> (f64, f64) {
        match a.product_shape(b) {
            Some(s) if s.diagonal => {
                let w = self.profile.rho.powi(-(s.len as i32));
                (w * self.profile.mu[s.range], w * self.expanded[s.range])
            }
            _ => (0.0, 0.0),
        }
    }

    fn residual(&self, x: &AlgebraElement<Complex64>, y: &AlgebraElement<Complex64>) -> f64 {
        let mut values = [ZERO; 4];
        for (a, c) in x.terms() {
            let twist = c * self.profile.rho.powi(-a.degree());
            for (b, d) in y.terms() {
                let (l, le) = self.pair(a, b);
                let (r, re) = self.pair(b, a);
                values[0] += c * d * l;
                values[1] += d * twist * r;
                values[2] += c * d * le;
                values[3] += d * twist * re;
            }
        }
        spread(&values)
    }
}

fn spread(values: &[Complex64]) -> f64 {
    let mut worst: f64 = 0.0;
    for a in values {
        for b in values {
            worst = worst.max((a - b).norm());
        }
    }
    worst
}

/// Residual of the KMS condition `φ(xy) = φ(y σ_{iβ}(x))`.
///
/// Both sides are evaluated on the reduced products and again after `depth`
/// Cuntz–Krieger expansion rounds at emitting vertices; the residual is the
/// largest disagreement among the four values, so it also detects a trace
/// that is inconsistent with the Cuntz–Krieger relation.
pub fn kms_condition_check(
    g: &Graph,
    x: &AlgebraElement<Complex64>,
    y: &AlgebraElement<Complex64>,
    profile: &KmsProfile,
    depth: usize,
) -> Result<f64> {
    require(profile)?;
    Ok(Evaluator::new(g, profile, depth).residual(x, y))
}

#[derive(Debug, Clone, Serialize)]
pub struct KmsSweep {
    pub monomials: usize,
    pub pairs: usize,
    pub max_residual: f64,
    /// Pair attaining the maximum, as indices into the monomial list.
    pub worst_pair: Option<(usize, usize)>,
}

/// Runs the check of [`kms_condition_check`] on every ordered pair of monomials with
/// `|μ| + |ν| ≤ max_len`.
pub fn kms_oracle_sweep(g: &Graph, profile: &KmsProfile, max_len: usize, depth: usize, exec: Exec) -> Result<KmsSweep> {
    require(profile)?;
    let monos = monomials_up_to(g, max_len);
    let eval = Evaluator::new(g, profile, depth);
    let rows: Vec<usize> = (0..monos.len()).collect();
    let per_row = par::map(exec, &rows, |&i| {
        let x = &monos[i];
        let twist = profile.rho.powi(-x.degree());
        let mut best = (f64::NEG_INFINITY, (i, 0));
        for (j, y) in monos.iter().enumerate() {
            let (l, le) = eval.pair(x, y);
            let (r, re) = eval.pair(y, x);
            let (r, re) = (twist * r, twist * re);
            let lo = l.min(le).min(r).min(re);
            let hi = l.max(le).max(r).max(re);
            if hi - lo > best.0 {
                best = (hi - lo, (i, j));
            }
        }
        best
    });
    let worst = per_row.into_iter().fold(None, |acc: Option<(f64, (usize, usize))>, r| match acc {
        Some(a) if a.0 >= r.0 => Some(a),
        _ => Some(r),
    });
    let (max_residual, worst_pair) = match worst {
        Some((r, p)) => (r, Some(p)),
        None => (0.0, None),
    };
    Ok(KmsSweep { monomials: monos.len(), pairs: monos.len() * monos.len(), max_residual, worst_pair })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::element::Path;
    use crate::kms::kms_profile;
    use crate::linalg::ONE;

    type El = AlgebraElement<Complex64>;

    /// Direct symbolic evaluation: multiply, twist, expand, evaluate.
    fn symbolic_check(g: &Graph, x: &El, y: &El, prof: &KmsProfile, depth: usize) -> f64 {
        let lhs = x.multiply(y);
        let rhs = y.multiply(&x.sigma_imaginary_beta(prof.rho));
        let values = [
            state_eval(&lhs, prof).unwrap(),
            state_eval(&rhs, prof).unwrap(),
            state_eval(&lhs.expand(g, depth), prof).unwrap(),
            state_eval(&rhs.expand(g, depth), prof).unwrap(),
        ];
        spread(&values)
    }

    #[test]
    fn shape_evaluation_matches_symbolic() {
        let graphs = [
            Graph::from_pairs(2, &[(0, 1), (1, 1)]).unwrap(),
            Graph::from_pairs(3, &[(0, 1), (1, 2), (2, 0), (0, 0), (0, 2)]).unwrap(),
            Graph::from_pairs(3, &[(0, 1), (0, 2), (1, 1), (1, 1)]).unwrap(),
            Graph::bouquet(2),
        ];
        for g in &graphs {
            let good = kms_profile(g);
            let mut bad = good.clone();
            bad.mu.iter_mut().enumerate().for_each(|(i, m)| *m += 0.1 * i as f64);
            let monos = monomials_up_to(g, 3);
            let els: Vec<El> = monos.iter().map(|m| El::from_monomial(m.clone(), ONE)).collect();
            for prof in [&good, &bad] {
                for x in &els {
                    for y in &els {
                        let fast = kms_condition_check(g, x, y, prof, 2).unwrap();
                        let slow = symbolic_check(g, x, y, prof, 2);
                        assert!((fast - slow).abs() < 1e-12, "{fast} vs {slow}");
                    }
                }
                // sums of monomials with complex coefficients
                let z = Complex64::new(0.3, -0.7);
                for w in els.windows(3) {
                    let x = w[0].add(&w[1].scale(z));
                    let y = w[2].add(&w[0].scale(z.conj()));
                    let fast = kms_condition_check(g, &x, &y, prof, 2).unwrap();
                    assert!((fast - symbolic_check(g, &x, &y, prof, 2)).abs() < 1e-12);
                }
                let sweep = kms_oracle_sweep(g, prof, 3, 2, Exec::Sequential).unwrap();
                let worst = els
                    .iter()
                    .flat_map(|x| els.iter().map(move |y| (x, y)))
                    .map(|(x, y)| symbolic_check(g, x, y, prof, 2))
                    .fold(0.0f64, f64::max);
                assert!((sweep.max_residual - worst).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn vertex_values_are_perron_weights() {
        let g = Graph::from_pairs(3, &[(0, 1), (1, 0), (0, 2), (2, 0)]).unwrap();
        let prof = kms_profile(&g);
        for v in 0..3 {
            let val = state_eval(&El::vertex_projection(v, ONE), &prof).unwrap();
            assert_eq!(val.re, prof.mu[v]);
        }
    }

    #[test]
    fn cuntz_o2_values() {
        let g = Graph::bouquet(2);
        let prof = kms_profile(&g);
        for mu in crate::algebra::element::paths_up_to(&g, 4) {
            let x = El::monomial(mu.clone(), mu.clone(), ONE);
            let v = state_eval(&x, &prof).unwrap();
            assert_eq!(v.re, 0.5f64.powi(mu.len() as i32));
        }
        let off = El::monomial(Path::edge(&g, 0), Path::edge(&g, 1), ONE);
        assert_eq!(state_eval(&off, &prof).unwrap(), ZERO);
    }

    #[test]
    fn kms_condition_examples() {
        let g = Graph::bouquet(2);
        let prof = kms_profile(&g);
        let s1 = El::edge(&g, 0, ONE);
        let r = kms_condition_check(&g, &s1, &s1.adjoint(), &prof, 2).unwrap();
        assert!(r < 1e-15);
        let r = kms_condition_check(&g, &s1.adjoint(), &s1, &prof, 2).unwrap();
        assert!(r < 1e-15);
        let p = El::vertex_projection(0, ONE);
        assert_eq!(kms_condition_check(&g, &p, &p, &prof, 3).unwrap(), 0.0);
    }

    #[test]
    fn wrong_trace_is_detected() {
        // a→b, b→b: the uniform vector is the right Perron vector; the left
        // one, (0,1), breaks consistency with p_a = S_e S_e*
        let g = Graph::from_pairs(2, &[(0, 1), (1, 1)]).unwrap();
        let good = kms_profile(&g);
        assert_eq!(good.mu, vec![0.5, 0.5]);
        let sweep = kms_oracle_sweep(&g, &good, 3, 2, Exec::Sequential).unwrap();
        assert!(sweep.max_residual <= 1e-12);
        let mut bad = good.clone();
        bad.mu = vec![0.0, 1.0];
        let sweep = kms_oracle_sweep(&g, &bad, 3, 2, Exec::Sequential).unwrap();
        assert!(sweep.max_residual >= 0.5);
    }

    #[test]
    fn sweep_modes_agree() {
        let g = Graph::from_pairs(3, &[(0, 1), (1, 2), (2, 0), (0, 0)]).unwrap();
        let prof = kms_profile(&g);
        let a = kms_oracle_sweep(&g, &prof, 2, 1, Exec::Sequential).unwrap();
        let b = kms_oracle_sweep(&g, &prof, 2, 1, Exec::Parallel).unwrap();
        assert_eq!(a.max_residual, b.max_residual);
        assert!(a.max_residual < 1e-9);
    }

    #[test]
    fn slice_of_matrix_element() {
        use crate::algebra::ring::MatrixCoeff;
        use crate::linalg::identity;
        let g = Graph::bouquet(2);
        let prof = kms_profile(&g);
        let x: AlgebraElement<MatrixCoeff> = AlgebraElement::edge(&g, 1, MatrixCoeff(identity(2)))
            .multiply(&AlgebraElement::edge(&g, 1, MatrixCoeff(identity(2))).adjoint());
        let v = slice_state(&x, &prof).unwrap().unwrap();
        assert_eq!(v.0, identity(2) * Complex64::new(0.5, 0.0));
    }
}
