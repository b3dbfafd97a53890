//! Coefficient rings with involution for graph-algebra elements.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt::Debug;

use num_complex::Complex64;

use crate::linalg::{max_abs, CMatrix, ONE};

/// Magnitude below which a coefficient is dropped.
pub const COEFF_EPS: f64 = 1e-14;

pub trait Coefficient: Clone + Debug + Send + Sync {
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: Complex64) -> Self;
    fn adjoint(&self) -> Self;
    /// Size used for zero detection and residuals.
    fn magnitude(&self) -> f64;

    fn neg(&self) -> Self {
        self.scale(-ONE)
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

impl Coefficient for Complex64 {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: Complex64) -> Self {
        self * c
    }
    fn adjoint(&self) -> Self {
        self.conj()
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Laurent polynomial in `nvars` commuting unitaries `z₁ … z_n`; the
/// involution sends `z_k ↦ z_k^{-1}` and conjugates coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Laurent {
    nvars: usize,
    terms: BTreeMap<Vec<i32>, Complex64>,
}

impl Laurent {
    pub fn zero(nvars: usize) -> Self {
        Laurent { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        let mut l = Self::zero(nvars);
        if c.norm() > COEFF_EPS {
            l.terms.insert(vec![0; nvars], c);
        }
        l
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, ONE)
    }

    /// The generator `z_k` (0-based).
    pub fn var(nvars: usize, k: usize) -> Self {
        Self::monomial(nvars, (0..nvars).map(|i| (i == k) as i32).collect(), ONE)
    }

    pub fn monomial(nvars: usize, exponents: Vec<i32>, c: Complex64) -> Self {
        assert_eq!(exponents.len(), nvars);
        let mut l = Self::zero(nvars);
        if c.norm() > COEFF_EPS {
            l.terms.insert(exponents, c);
        }
        l
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &Complex64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Substitutes each exponent vector through `f` (which may change the
    /// number of variables to `nvars`).
    pub fn remap(&self, nvars: usize, f: impl Fn(&[i32]) -> Vec<i32>) -> Self {
        let mut out = Self::zero(nvars);
        for (e, c) in &self.terms {
            out.accumulate(f(e), *c);
        }
        out
    }

    fn accumulate(&mut self, e: Vec<i32>, c: Complex64) {
        match self.terms.entry(e) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().norm() <= COEFF_EPS {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                if c.norm() > COEFF_EPS {
                    v.insert(c);
                }
            }
        }
    }

    /// Evaluates at a point of the torus.
    pub fn evaluate(&self, point: &[Complex64]) -> Complex64 {
        self.terms.iter().map(|(e, c)| c * e.iter().zip(point).map(|(&k, z)| z.powi(k)).product::<Complex64>()).sum()
    }
}

impl Coefficient for Laurent {
    fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "Laurent variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.accumulate(e.clone(), *c);
        }
        out
    }

    fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "Laurent variable count mismatch");
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.accumulate(e1.iter().zip(e2).map(|(a, b)| a + b).collect(), c1 * c2);
            }
        }
        out
    }

    fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            out.accumulate(e.clone(), v * c);
        }
        out
    }

    fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.accumulate(e.iter().map(|x| -x).collect(), c.conj());
        }
        out
    }

    fn magnitude(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// `k×k` complex matrix coefficients; the involution is the conjugate
/// transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixCoeff(pub CMatrix);

impl MatrixCoeff {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

impl Coefficient for MatrixCoeff {
    fn add(&self, other: &Self) -> Self {
        MatrixCoeff(&self.0 + &other.0)
    }
    fn mul(&self, other: &Self) -> Self {
        MatrixCoeff(&self.0 * &other.0)
    }
    fn scale(&self, c: Complex64) -> Self {
        MatrixCoeff(&self.0 * c)
    }
    fn adjoint(&self) -> Self {
        MatrixCoeff(self.0.adjoint())
    }
    fn magnitude(&self) -> f64 {
        max_abs(&self.0)
    }
}
