//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use graphstar_core::algebra::element::{monomials_up_to, paths_up_to, AlgebraElement, Monomial, Path};
use graphstar_core::algebra::nonlinear::nonlinear_coaction_demo;
use graphstar_core::algebra::state::{kms_oracle_sweep, state_eval};
use graphstar_core::correspondence::{Correspondence, EdgeFunction, VertexFunction};
use graphstar_core::graph::permutations;
use graphstar_core::kms::{kms_eval_tensor, trace_eval};
use graphstar_core::linalg::{identity, line_projection, op_norm, zeros, CMatrix, ONE, ZERO};
use graphstar_core::quantum::coaction::CoactionMatrices;
use graphstar_core::quantum::{
    build_coactions, coincidence_verdict, emit_banica, emit_bichon, emit_wreath, state_equivariance_check,
    verify_equivariance, verify_magic, wreath_classical, MagicUnitary, RELATION_TOL,
};
use graphstar_core::{classical_automorphisms, kms_profile, Exec, Graph};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn out_regular(g: &Graph) -> bool {
    let d = g.out_edges(0).len();
    (0..g.vertex_count()).all(|v| g.out_edges(v).len() == d)
}

fn test_graphs() -> Vec<(String, Graph)> {
    common::named_graphs().into_iter().map(|(n, g)| (n.to_string(), g)).collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let corpus = common::sinkless_corpus(4, 6);
    let mut worst = 0.0f64;
    let mut worst_graph = None;
    let (mut graphs, mut pairs) = (0, 0);
    for g in &corpus {
        let prof = kms_profile(g);
        if !prof.exists {
            continue;
        }
        let sweep = kms_oracle_sweep(g, &prof, 3, 2, Exec::default()).map_err(|e| e.to_string())?;
        graphs += 1;
        pairs += sweep.pairs;
        if sweep.max_residual > worst {
            worst = sweep.max_residual;
            worst_graph = Some(g.adjacency());
        }
    }
    let elapsed = start.elapsed();
    ensure(worst <= 1e-9, format!("residual {worst:e} on {worst_graph:?}"))?;
    ensure(elapsed < Duration::from_secs(10), format!("took {elapsed:?}"))?;
    Ok(format!("{graphs} graphs, {pairs} pairs, max residual {worst:e}, {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let mut checked = 0;
    let mut worst = 0.0f64;
    for (name, g) in test_graphs() {
        let prof = kms_profile(&g);
        if !prof.exists {
            continue;
        }
        let corr = Correspondence::new(&g);
        let delta = |e: usize| EdgeFunction::delta(g.edge_count(), e);
        let paths: Vec<Path> = paths_up_to(&g, 4).into_iter().filter(|p| !p.is_empty()).collect();
        for mu in &paths {
            for nu in &paths {
                if mu.end != nu.end {
                    continue;
                }
                let x = AlgebraElement::monomial(mu.clone(), nu.clone(), ONE);
                let closed = state_eval(&x, &prof).map_err(|e| e.to_string())?;
                let xis: Vec<_> = mu.edges.iter().map(|&e| delta(e)).collect();
                let etas: Vec<_> = nu.edges.iter().map(|&e| delta(e)).collect();
                let tensor = kms_eval_tensor(&prof, &corr, &xis, &etas).map_err(|e| e.to_string())?;
                worst = worst.max((closed - tensor).norm());
                checked += 1;
            }
        }
        for v in 0..g.vertex_count() {
            let closed = state_eval(&AlgebraElement::vertex_projection(v, ONE), &prof).map_err(|e| e.to_string())?;
            let tensor = trace_eval(&prof, &VertexFunction::delta(g.vertex_count(), v)).map_err(|e| e.to_string())?;
            worst = worst.max((closed - tensor).norm());
            checked += 1;
        }
        ensure(worst <= 1e-12, format!("{name}: disagreement {worst:e}"))?;
    }
    let o2 = Graph::bouquet(2);
    let prof = kms_profile(&o2);
    for mu in paths_up_to(&o2, 4) {
        let v = state_eval(&AlgebraElement::monomial(mu.clone(), mu.clone(), ONE), &prof).map_err(|e| e.to_string())?;
        let expected = 2f64.powi(-(mu.len() as i32));
        ensure((v.re - expected).abs() <= 1e-12 && v.im == 0.0, format!("O_2 value {v} for length {}", mu.len()))?;
    }
    Ok(format!("{checked} monomials agree within {worst:e}; O_2 values are 2^-|mu| with phi(p_v) = 1"))
}

fn criterion_3() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x6a09e667);
    let graphs = test_graphs();
    let pools: Vec<(Graph, Vec<Monomial>)> = graphs
        .into_iter()
        .map(|(_, g)| {
            let m = monomials_up_to(&g, 6);
            (g, m)
        })
        .collect();
    let mut zero_branch = 0;
    for i in 0..200 {
        let (g, pool) = &pools[rng.gen_range(0..pools.len())];
        let m = pool[rng.gen_range(0..pool.len())].clone();
        let z = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let prof = kms_profile(g);
        let x = AlgebraElement::from_monomial(m.clone(), c);
        let before = state_eval(&x, &prof).map_err(|e| e.to_string())?;
        let after = state_eval(&x.gauge_apply(z).map_err(|e| e.to_string())?, &prof).map_err(|e| e.to_string())?;
        ensure((before - after).norm() <= 1e-12, format!("sample {i}: {before} vs {after}"))?;
        if m.mu.len() != m.nu.len() {
            zero_branch += 1;
            ensure(before == ZERO && after == ZERO, format!("sample {i}: |mu| != |nu| but value {before}"))?;
        }
    }
    Ok(format!("200 samples gauge invariant, {zero_branch} with |mu| != |nu| evaluate to exactly 0"))
}

fn criterion_4() -> Outcome {
    let mut regular: Vec<Graph> = test_graphs().into_iter().map(|(_, g)| g).filter(out_regular).collect();
    regular.extend(common::sinkless_corpus(4, 6).into_iter().filter(out_regular));
    for g in &regular {
        let prof = kms_profile(g);
        let n = g.vertex_count() as f64;
        ensure(prof.distinguished, format!("{:?} not distinguished", g.adjacency()))?;
        ensure(prof.mu.iter().all(|&m| m == 1.0 / n), format!("{:?}: mu = {:?}", g.adjacency(), prof.mu))?;
    }
    let g = Graph::from_pairs(2, &[(0, 1), (1, 1)]).map_err(|e| e.to_string())?;
    let prof = kms_profile(&g);
    ensure(
        !prof.distinguished,
        format!(
            "{} out-regular graphs distinguished, but D=[[0,1],[0,1]] reports distinguished=true with mu = {:?}",
            regular.len(),
            prof.mu
        ),
    )?;
    Ok(format!("{} out-regular graphs distinguished; D=[[0,1],[0,1]] is not", regular.len()))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut total = 0;
    for n in [2, 3] {
        let rep = nonlinear_coaction_demo(n, 2, Exec::default()).map_err(|e| e.to_string())?;
        ensure(rep.checks.len() == 6, format!("n={n}: {} checks", rep.checks.len()))?;
        for c in &rep.checks {
            ensure(c.passed, format!("n={n}: {} failed ({:e})", c.name, c.residual))?;
        }
        total += rep.monomials_checked;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), format!("took {elapsed:?}"))?;
    Ok(format!("six checks pass for n = 2, 3 ({total} monomials, {elapsed:.2?})"))
}

fn criterion_6() -> Outcome {
    let g = Graph::cycle(3);
    let ban = emit_banica(&g).map_err(|e| e.to_string())?;
    let bic = emit_bichon(&g).map_err(|e| e.to_string())?;
    let rotations: Vec<Vec<usize>> = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]];
    for p in [&ban, &bic] {
        let mut passing = Vec::new();
        for perm in permutations(3) {
            let r = verify_magic(&MagicUnitary::permutation(&perm), p, RELATION_TOL, Exec::default())
                .map_err(|e| e.to_string())?;
            if r.passed {
                passing.push(perm);
            }
        }
        passing.sort();
        ensure(passing == rotations, format!("{}: passing {passing:?}", p.label))?;
    }
    let swap = verify_magic(&MagicUnitary::permutation(&[1, 0, 2]), &ban, RELATION_TOL, Exec::default())
        .map_err(|e| e.to_string())?;
    ensure(swap.residual("ud_du") >= 1.0, format!("transposition UD=DU residual {}", swap.residual("ud_du")))?;
    let v = coincidence_verdict(&g).map_err(|e| e.to_string())?;
    ensure(v.coincide_by_injectivity, "coincidence not established")?;
    let ident = v.shape_identification.unwrap_or_default();
    ensure(ident == "Z/3Z ≀_* S_1⁺", format!("identification {ident}"))?;
    Ok(format!(
        "3 rotations pass both presentations, transposition UD=DU residual {}, identified as {ident}",
        swap.residual("ud_du")
    ))
}

fn two_projection(theta: f64) -> MagicUnitary {
    let p = line_projection(0.0);
    let q = line_projection(theta);
    let one = identity(2);
    let z = zeros(2);
    MagicUnitary::new(vec![
        vec![p.clone(), &one - &p, z.clone(), z.clone()],
        vec![&one - &p, p.clone(), z.clone(), z.clone()],
        vec![z.clone(), z.clone(), q.clone(), &one - &q],
        vec![z.clone(), z, &one - &q, q],
    ])
    .expect("square array")
}

fn criterion_7() -> Outcome {
    let theta = std::f64::consts::PI / 5.0;
    let u = two_projection(theta);
    let p = emit_banica(&Graph::from_pairs(4, &[]).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let r = verify_magic(&u, &p, RELATION_TOL, Exec::default()).map_err(|e| e.to_string())?;
    let (pp, qq): (&CMatrix, &CMatrix) = (u.entry(0, 0), u.entry(2, 2));
    let comm = op_norm(&(pp * qq - qq * pp));
    ensure(r.max_residual <= 1e-10, format!("relation residual {:e}", r.max_residual))?;
    ensure(comm >= 0.1, format!("||pq - qp|| = {comm}"))?;
    Ok(format!("S_4+ residual {:e}, ||pq - qp|| = {comm:.4}", r.max_residual))
}

/// Every coaction the suite exercises on `g`: classical automorphisms, the
/// identity, and a few genuinely quantum ones where they apply.
fn coactions(name: &str, g: &Graph) -> Vec<(String, CoactionMatrices)> {
    let mut out = vec![("identity".to_string(), CoactionMatrices::identity(g, 1))];
    for (i, a) in classical_automorphisms(g).expect("automorphisms").iter().enumerate() {
        out.push((format!("automorphism {i}"), CoactionMatrices::from_automorphism(g, a).expect("coaction")));
    }
    let q = line_projection(std::f64::consts::PI / 5.0);
    let one = identity(2);
    match name {
        "cycle_union_2x2" => {
            out.push((
                "two-projection".into(),
                build_coactions(&two_projection(std::f64::consts::PI / 5.0), g).unwrap(),
            ));
        }
        "bouquet_union_1x2" | "bouquet_union_2x2" => {
            let u = MagicUnitary::new(vec![vec![q.clone(), &one - &q], vec![&one - &q, q]]).unwrap();
            out.push(("projection swap".into(), build_coactions(&u, g).unwrap()));
        }
        _ => {}
    }
    out
}

fn criterion_8() -> Outcome {
    let mut graphs = test_graphs();
    graphs.push(("bouquet_union_1x2".into(), Graph::bouquet_union(1, 2)));
    let mut checked = 0;
    let mut quantum = 0;
    for (name, g) in &graphs {
        let prof = kms_profile(g);
        if !prof.exists {
            continue;
        }
        for (label, c) in coactions(name, g) {
            let eq = verify_equivariance(&c, g, 1, RELATION_TOL, Exec::default()).map_err(|e| e.to_string())?;
            if !eq.passed {
                continue;
            }
            let r = state_equivariance_check(&c, &prof, g, 3, 1e-9, Exec::default())
                .map_err(|e| format!("{name}/{label}: {e}"))?;
            ensure(r.tau_equivariant == r.phi_equivariant, format!("{name}/{label}: flags disagree {r:?}"))?;
            if prof.distinguished {
                ensure(r.tau_equivariant && r.phi_equivariant, format!("{name}/{label}: not equivariant {r:?}"))?;
            }
            if c.block > 1 {
                quantum += 1;
            }
            checked += 1;
        }
    }
    let star = Graph::from_pairs(3, &[(0, 1), (1, 0), (0, 2), (2, 0)]).map_err(|e| e.to_string())?;
    ensure(!kms_profile(&star).distinguished, "star graph should carry a non-uniform state")?;
    Ok(format!("{checked} verified coactions ({quantum} quantum), tau and phi equivariance agree at depth 3"))
}

fn criterion_9() -> Outcome {
    let mut checked = 0;
    let mut worst = 0.0f64;
    for (name, g) in test_graphs() {
        let mut cs = vec![("identity".to_string(), CoactionMatrices::identity(&g, 1))];
        for (i, a) in classical_automorphisms(&g).map_err(|e| e.to_string())?.iter().enumerate() {
            cs.push((
                format!("automorphism {i}"),
                CoactionMatrices::from_automorphism(&g, a).map_err(|e| e.to_string())?,
            ));
        }
        for (label, c) in cs {
            let r = verify_equivariance(&c, &g, 3, RELATION_TOL, Exec::default()).map_err(|e| e.to_string())?;
            for (check, entry) in &r.checks {
                worst = worst.max(entry.residual);
                ensure(entry.residual <= 1e-8, format!("{name}/{label}: {check} residual {:e}", entry.residual))?;
            }
            ensure(r.all_passed(), format!("{name}/{label}: {r:?}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} coactions pass checks (a)-(g) up to level 3, max residual {worst:e}"))
}

fn criterion_10() -> Outcome {
    let g = Graph::bouquet_union(2, 2);
    let p = emit_wreath(&g).map_err(|e| e.to_string())?;
    let mut count = 0;
    for s0 in permutations(2) {
        for s1 in permutations(2) {
            for pi in permutations(2) {
                let u = wreath_classical(&[s0.clone(), s1.clone()], &pi).map_err(|e| e.to_string())?;
                let r = verify_magic(&u, &p, RELATION_TOL, Exec::default()).map_err(|e| e.to_string())?;
                ensure(
                    r.max_residual == 0.0,
                    format!("sigma=({s0:?},{s1:?}) pi={pi:?}: residual {:e}", r.max_residual),
                )?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} classical wreath elements satisfy {} with residual 0", p.label))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1", criterion_1),
        ("2", criterion_2),
        ("3", criterion_3),
        ("4", criterion_4),
        ("5", criterion_5),
        ("6", criterion_6),
        ("7", criterion_7),
        ("8", criterion_8),
        ("9", criterion_9),
        ("10", criterion_10),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, f) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {id}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {id}: {detail}");
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
