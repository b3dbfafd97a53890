//! Generators-and-relations presentations of quantum automorphism groups.
//!
//! A relation is a noncommutative *-polynomial `p` read as `p = 0`. Each
//! symbol occurrence carries an involution bit.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{structural_report, Graph, Shape};
use crate::linalg::ONE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub generator: usize,
    pub star: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NcTerm {
    pub coeff: Complex64,
    /// Empty word is the unit.
    pub word: Vec<Letter>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NcPoly {
    pub terms: Vec<NcTerm>,
}

impl NcPoly {
    fn term(mut self, coeff: Complex64, word: &[usize]) -> Self {
        let word = word.iter().map(|&generator| Letter { generator, star: false }).collect();
        self.terms.push(NcTerm { coeff, word });
        self
    }

    fn plus(self, word: &[usize]) -> Self {
        self.term(ONE, word)
    }

    fn minus(self, word: &[usize]) -> Self {
        self.term(-ONE, word)
    }

    /// `a* − a`.
    fn self_adjoint(a: usize) -> Self {
        let mut p = NcPoly::default();
        p.terms.push(NcTerm { coeff: ONE, word: vec![Letter { generator: a, star: true }] });
        p.minus(&[a])
    }

    fn commutator(a: &[usize], b: &[usize]) -> Self {
        let ab: Vec<usize> = a.iter().chain(b).copied().collect();
        let ba: Vec<usize> = b.iter().chain(a).copied().collect();
        NcPoly::default().plus(&ab).minus(&ba)
    }

    pub fn generators(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.iter().flat_map(|t| t.word.iter().map(|l| l.generator))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationClass {
    /// `q* = q`
    R1SelfAdjoint,
    /// `q_vw q_vu = δ_wu q_vw`
    R1Row,
    /// `q_vw q_uw = δ_vu q_vw`
    R1Col,
    /// `Σ_w q_vw = 1`
    R2Row,
    /// `Σ_w q_wv = 1`
    R2Col,
    /// products across an edge and a non-edge vanish
    R3,
    /// entries of `UD − DU`
    UdDu,
    /// `q_{s(e)s(f)} q_{r(e)r(f)} = q_{r(e)r(f)} q_{s(e)s(f)}`
    R4,
    /// `ν_l(u_ij) v_lk = v_lk ν_l(u_ij)`
    WreathCommutation,
}

impl RelationClass {
    pub fn as_str(self) -> &'static str {
        match self {
            RelationClass::R1SelfAdjoint => "r1_selfadjoint",
            RelationClass::R1Row => "r1_row",
            RelationClass::R1Col => "r1_col",
            RelationClass::R2Row => "r2_row",
            RelationClass::R2Col => "r2_col",
            RelationClass::R3 => "r3",
            RelationClass::UdDu => "ud_du",
            RelationClass::R4 => "r4",
            RelationClass::WreathCommutation => "wreath_commutation",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub class: RelationClass,
    pub poly: NcPoly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub name: String,
    /// Family symbol: `q`, `u` or `v`.
    pub family: String,
    /// `[v, w]` for `q`, `[l, i, j]` for `u`, `[l, k]` for `v` (0-based).
    pub index: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Label {
    Banica,
    Bichon,
    WreathCyclic { m: usize, n: usize },
    WreathSnSm { n: usize, m: usize },
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Banica => write!(f, "banica"),
            Label::Bichon => write!(f, "bichon"),
            Label::WreathCyclic { m, n } => write!(f, "Z/{m}Z ≀_* S_{n}⁺"),
            Label::WreathSnSm { n, m } => write!(f, "S_{n}⁺ ≀_* S_{m}⁺"),
        }
    }
}

/// How a matrix array realizes the generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Realization {
    /// `q[v][w] ↦ U[v][w]` with `U` of size `dim`.
    Direct { dim: usize },
    /// `U` is the `nm × nm` edge-level array indexed by `(copy, loop)`;
    /// `u^(l)_ij = Σ_k q_{l(i),k(j)}` and `v_lk = Σ_j q_{l(1),k(j)}`.
    WreathEdges { n: usize, m: usize },
}

impl Realization {
    pub fn dim(&self) -> usize {
        match *self {
            Realization::Direct { dim } => dim,
            Realization::WreathEdges { n, m } => n * m,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Presentation {
    pub generators: Vec<Generator>,
    pub relations: Vec<Relation>,
    /// `Δ(g) = Σ a ⊗ b` with `a`, `b` words in the generators.
    pub coproduct: Coproduct,
    pub label: Label,
    pub realization: Realization,
    pub loops_present: bool,
}

impl Presentation {
    pub fn relation_count(&self, class: RelationClass) -> usize {
        self.relations.iter().filter(|r| r.class == class).count()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn check_well_formed(&self) -> Result<()> {
        let n = self.generators.len();
        for r in &self.relations {
            if r.poly.generators().any(|g| g >= n) {
                return Err(Error::Invalid(format!("undeclared generator in {}", r.class.as_str())));
            }
        }
        Ok(())
    }

    fn word_string(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "1".into();
        }
        word.iter()
            .map(|l| format!("{}{}", self.generators[l.generator].name, if l.star { "*" } else { "" }))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// JSON with generator names, relations as term lists and the coproduct.
    pub fn to_value(&self) -> Value {
        let relations: Vec<Value> = self
            .relations
            .iter()
            .map(|r| {
                let terms: Vec<Value> = r
                    .poly
                    .terms
                    .iter()
                    .map(|t| json!({"coeff": [t.coeff.re, t.coeff.im], "word": self.word_string(&t.word)}))
                    .collect();
                json!({"class": r.class.as_str(), "terms": terms})
            })
            .collect();
        let coproduct: Vec<Value> = self
            .coproduct
            .iter()
            .map(|(g, pairs)| {
                let word =
                    |w: &[usize]| w.iter().map(|&a| self.generators[a].name.as_str()).collect::<Vec<_>>().join(" ");
                let rhs: Vec<String> = pairs.iter().map(|(a, b)| format!("{} ⊗ {}", word(a), word(b))).collect();
                json!({"generator": self.generators[*g].name, "image": rhs.join(" + ")})
            })
            .collect();
        let mut counts = serde_json::Map::new();
        for r in &self.relations {
            let c = counts.entry(r.class.as_str()).or_insert(json!(0));
            *c = json!(c.as_u64().unwrap() + 1);
        }
        json!({
            "label": self.label.to_string(),
            "label_data": self.label,
            "generators": self.generators,
            "relations": relations,
            "relation_counts": counts,
            "coproduct": coproduct,
            "loops_present": self.loops_present,
        })
    }
}

/// Magic-unitary relations on an `dim × dim` block of generators
/// `idx(a, b)`.
fn magic_relations(dim: usize, idx: impl Fn(usize, usize) -> usize, out: &mut Vec<Relation>) {
    let mut push = |class, poly| out.push(Relation { class, poly });
    for a in 0..dim {
        for b in 0..dim {
            push(RelationClass::R1SelfAdjoint, NcPoly::self_adjoint(idx(a, b)));
        }
    }
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                let p = NcPoly::default().plus(&[idx(a, b), idx(a, c)]);
                push(RelationClass::R1Row, if b == c { p.minus(&[idx(a, b)]) } else { p });
                let p = NcPoly::default().plus(&[idx(b, a), idx(c, a)]);
                push(RelationClass::R1Col, if b == c { p.minus(&[idx(b, a)]) } else { p });
            }
        }
    }
    for a in 0..dim {
        let row = (0..dim).fold(NcPoly::default(), |p, b| p.plus(&[idx(a, b)]));
        push(RelationClass::R2Row, row.minus(&[]));
        let col = (0..dim).fold(NcPoly::default(), |p, b| p.plus(&[idx(b, a)]));
        push(RelationClass::R2Col, col.minus(&[]));
    }
}

type Coproduct = Vec<(usize, Vec<(Vec<usize>, Vec<usize>)>)>;

fn matrix_coproduct(dim: usize, idx: impl Fn(usize, usize) -> usize) -> Coproduct {
    let mut out = Vec::new();
    for a in 0..dim {
        for b in 0..dim {
            out.push((idx(a, b), (0..dim).map(|c| (vec![idx(a, c)], vec![idx(c, b)])).collect()));
        }
    }
    out
}

fn require_simple(g: &Graph) -> Result<()> {
    match g.max_multiplicity() {
        m if m > 1 => Err(Error::Multigraph(m)),
        _ => Ok(()),
    }
}

pub fn emit_banica(g: &Graph) -> Result<Presentation> {
    require_simple(g)?;
    let m = g.vertex_count();
    let names = g.vertices();
    let idx = |v: usize, w: usize| v * m + w;
    let mut generators = Vec::with_capacity(m * m);
    for v in 0..m {
        for w in 0..m {
            generators.push(Generator {
                name: format!("q[{}][{}]", names[v], names[w]),
                family: "q".into(),
                index: vec![v, w],
            });
        }
    }
    let mut relations = Vec::new();
    magic_relations(m, idx, &mut relations);

    let d = g.adjacency();
    for e in 0..g.edge_count() {
        let (s, r) = (g.source(e), g.range(e));
        for v in 0..m {
            for w in 0..m {
                if d[v][w] != 0 {
                    continue;
                }
                let forms =
                    [[idx(s, v), idx(r, w)], [idx(r, w), idx(s, v)], [idx(v, s), idx(w, r)], [idx(w, r), idx(v, s)]];
                for word in forms {
                    relations.push(Relation { class: RelationClass::R3, poly: NcPoly::default().plus(&word) });
                }
            }
        }
    }
    // (UD)_vw = Σ_u q_vu D_uw,  (DU)_vw = Σ_u D_vu q_uw
    for v in 0..m {
        for w in 0..m {
            let mut p = NcPoly::default();
            for u in 0..m {
                if d[u][w] != 0 {
                    p = p.term(Complex64::new(d[u][w] as f64, 0.0), &[idx(v, u)]);
                }
                if d[v][u] != 0 {
                    p = p.term(Complex64::new(-(d[v][u] as f64), 0.0), &[idx(u, w)]);
                }
            }
            relations.push(Relation { class: RelationClass::UdDu, poly: p });
        }
    }
    Ok(Presentation {
        generators,
        relations,
        coproduct: matrix_coproduct(m, idx),
        label: Label::Banica,
        realization: Realization::Direct { dim: m },
        loops_present: g.has_loops(),
    })
}

pub fn emit_bichon(g: &Graph) -> Result<Presentation> {
    let mut p = emit_banica(g)?;
    let m = g.vertex_count();
    let idx = |v: usize, w: usize| v * m + w;
    for e in 0..g.edge_count() {
        for f in 0..g.edge_count() {
            let a = idx(g.source(e), g.source(f));
            let b = idx(g.range(e), g.range(f));
            p.relations.push(Relation { class: RelationClass::R4, poly: NcPoly::commutator(&[a], &[b]) });
        }
    }
    p.label = Label::Bichon;
    Ok(p)
}

/// Free wreath product `S_n⁺ ≀_* S_m⁺` for `m` disjoint `n`-loop bouquets.
/// Trivial factors are dropped: for `n = 1` only the `S_m⁺` block remains
/// and for `m = 1` only `S_n⁺`.
pub fn emit_wreath(g: &Graph) -> Result<Presentation> {
    let (n, m) = match structural_report(g).shape {
        Shape::BouquetUnion { loops, copies } => (loops, copies),
        other => return Err(Error::ShapeMismatch(format!("expected a bouquet union, found {other:?}"))),
    };
    let with_u = n > 1;
    let with_v = m > 1;
    let mut generators = Vec::new();
    let u_base = 0;
    if with_u {
        for l in 0..m {
            for i in 0..n {
                for j in 0..n {
                    generators.push(Generator {
                        name: format!("u{}[{}][{}]", l + 1, i + 1, j + 1),
                        family: "u".into(),
                        index: vec![l, i, j],
                    });
                }
            }
        }
    }
    let v_base = generators.len();
    if with_v {
        for l in 0..m {
            for k in 0..m {
                generators.push(Generator {
                    name: format!("v[{}][{}]", l + 1, k + 1),
                    family: "v".into(),
                    index: vec![l, k],
                });
            }
        }
    }
    let u = |l: usize, i: usize, j: usize| u_base + (l * n + i) * n + j;
    let v = |l: usize, k: usize| v_base + l * m + k;

    let mut relations = Vec::new();
    let mut coproduct = Vec::new();
    if with_u {
        for l in 0..m {
            magic_relations(n, |i, j| u(l, i, j), &mut relations);
        }
    }
    if with_v {
        magic_relations(m, v, &mut relations);
        coproduct.extend(matrix_coproduct(m, v));
    }
    if with_u && with_v {
        for l in 0..m {
            for k in 0..m {
                for i in 0..n {
                    for j in 0..n {
                        relations.push(Relation {
                            class: RelationClass::WreathCommutation,
                            poly: NcPoly::commutator(&[u(l, i, j)], &[v(l, k)]),
                        });
                    }
                }
            }
        }
    }
    if with_u {
        // Δ(ν_l(u_ij)) = Σ_{k,t} ν_l(u_it) v_lk ⊗ ν_k(u_tj)
        for l in 0..m {
            for i in 0..n {
                for j in 0..n {
                    let mut terms = Vec::new();
                    for k in 0..m {
                        for t in 0..n {
                            let left = if with_v { vec![u(l, i, t), v(l, k)] } else { vec![u(l, i, t)] };
                            terms.push((left, vec![u(k, t, j)]));
                        }
                    }
                    coproduct.push((u(l, i, j), terms));
                }
            }
        }
    }
    Ok(Presentation {
        generators,
        relations,
        coproduct,
        label: Label::WreathSnSm { n, m },
        realization: Realization::WreathEdges { n, m },
        loops_present: true,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoincidenceVerdict {
    pub coincide_by_injectivity: bool,
    /// `"r"`, `"s"` or `"r_and_s"` when a map is injective.
    pub witness: Option<String>,
    pub shape_identification: Option<String>,
    pub loops_present: bool,
}

/// Sufficient condition for the Banica and Bichon quantum automorphism groups
/// to agree on a simple graph without sources.
pub fn coincidence_verdict(g: &Graph) -> Result<CoincidenceVerdict> {
    require_simple(g)?;
    let rep = structural_report(g);
    if !rep.no_sources {
        return Err(Error::Hypothesis("no sources".into()));
    }
    let witness = match (rep.r_injective, rep.s_injective) {
        (true, true) => Some("r_and_s"),
        (true, false) => Some("r"),
        (false, true) => Some("s"),
        (false, false) => None,
    };
    let shape_identification = match rep.shape {
        Shape::MGonUnion { m, count } => Some(Label::WreathCyclic { m, n: count }.to_string()),
        _ => None,
    };
    Ok(CoincidenceVerdict {
        coincide_by_injectivity: witness.is_some(),
        witness: witness.map(String::from),
        shape_identification,
        loops_present: rep.has_loops,
    })
}
