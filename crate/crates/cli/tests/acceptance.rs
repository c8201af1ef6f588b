//! Acceptance criteria, one line each. Runs without the libtest harness so the
//! lines always show up in `cargo test` output.

use std::process::Command;

use ncwb_cli::analysis::analyze_all;
use ncwb_cli::document::parse_document;
use ncwb_cli::workspace::load;
use ncwb_core::algebra::{bimodule_map_space, check_bimodule, right_dual, transpose_right};
use ncwb_core::builtins::{all_builtins, fixtures, ExampleBundle};
use ncwb_core::calculus::{check_leibniz, factor_through_universal, universal_calculus};
use ncwb_core::cartan::{
    calculus_from_pair, check_cartan, co_universal_factorization, co_universal_pair, pair_from_calculus,
    transpose_of_comparison, FactorizationStatus,
};
use ncwb_core::connections::{check_connection, check_contraction, check_covariant_axioms, contraction_matrix, trivial_connection};
use ncwb_core::diffops::{
    check_ccr, evaluate_mu, fock_check, generate_diffop_algebra, is_normal, left_mult_op, normal_form, FreeWord,
};
use ncwb_core::linalg::{rat, unit_vec};
use ncwb_core::{Algebra, Bimodule, BimoduleMap, CartanPair, Law, Matrix, Rational, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Rank by plain fraction-keeping Gaussian elimination, separate from the
/// library's echelon code.
fn oracle_rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let zero = rat(0);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c] != zero) else { continue };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for r in 0..m.len() {
            if r != rank && m[r][c] != zero {
                let f = m[r][c].clone() / pivot.clone();
                for k in c..cols {
                    let v = m[rank][k].clone() * f.clone();
                    m[r][k] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn mat_rows(m: &Matrix) -> Vec<Vec<Rational>> {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

fn builtins() -> Vec<ExampleBundle> {
    all_builtins()
}

fn pair_of(b: &ExampleBundle) -> &CartanPair {
    b.pair.as_ref().expect("every builtin carries a pair")
}

fn criterion_1() -> Outcome {
    for b in builtins() {
        let c = b.calculus.as_ref().unwrap();
        let derived = pair_from_calculus(c);
        let r = check_cartan(&derived.pair);
        ensure(r.is_empty(), || format!("{}: derived pair has {} violations", b.name, r.len()))?;
        let back = calculus_from_pair(pair_of(&b)).ok_or_else(|| format!("{}: no calculus from pair", b.name))?;
        let r = check_leibniz(&back.calculus);
        ensure(r.is_empty(), || format!("{}: recovered calculus has {} violations", b.name, r.len()))?;
    }
    Ok(format!("{} builtins, both directions, zero violations", builtins().len()))
}

fn criterion_2() -> Outcome {
    for b in builtins() {
        let a = &b.algebra;
        let n = a.dim();
        let reg = Bimodule::regular(a);
        let dual = right_dual(&reg);
        ensure(dual.dim() == n, || format!("{}: dim A* = {}, expected {n}", b.name, dual.dim()))?;
        // g -> (m -> g m) has inverse f -> f(1)
        let cols: Vec<Vector> = (0..n)
            .map(|g| dual.coordinates(a.left_mult_basis(g)).expect("left multiplication is right linear"))
            .collect();
        let iso = BimoduleMap::new(reg.clone(), dual.bimodule().clone(), Matrix::from_columns(n, &cols))
            .map_err(|e| e.to_string())?;
        ensure(iso.check().is_empty(), || format!("{}: identification is not a bimodule map", b.name))?;
        ensure(oracle_rank(&mat_rows(iso.matrix())) == n, || format!("{}: identification not bijective", b.name))?;
        for (g, coords) in cols.iter().enumerate() {
            let at_one = dual.evaluation(coords).mul_vec(a.unit());
            ensure(at_one == a.basis(g), || format!("{}: f(1) != f for basis {g}", b.name))?;
            for h in 0..n {
                let paired = dual.pair(coords, &a.basis(h)).map_err(|e| e.to_string())?;
                ensure(&paired == a.product_of_basis(g, h), || format!("{}: pair(e{g}, e{h}) != e{g}e{h}", b.name))?;
            }
        }
    }
    Ok("A* = A exactly for every builtin algebra".into())
}

fn criterion_3() -> Outcome {
    let mut dims = Vec::new();
    for b in builtins() {
        let a = &b.algebra;
        let n = a.dim();
        let u = universal_calculus(a);
        let expected = n * n - oracle_rank(&mat_rows(&a.multiplication_map()));
        ensure(u.dim() == expected, || format!("{}: dim = {}, expected {expected}", b.name, u.dim()))?;
        let c = b.calculus.as_ref().unwrap();
        let phi = factor_through_universal(c, &u).map_err(|e| e.to_string())?;
        ensure(phi.holds() && phi.solution_dim == 0, || format!("{}: phi not unique", b.name))?;
        let composed = phi.phi.matrix() * u.calculus().differential();
        ensure(&composed == c.differential(), || format!("{}: phi d_u != d", b.name))?;
        dims.push(format!("{}={}", b.name, u.dim()));
    }
    Ok(format!("universal dims {}", dims.join(" ")))
}

fn criterion_4() -> Outcome {
    for b in builtins() {
        let c = b.calculus.as_ref().unwrap();
        let derived = pair_from_calculus(c);
        let co = co_universal_pair(&b.algebra);
        let f = co_universal_factorization(&derived.pair, &co).map_err(|e| e.to_string())?;
        ensure(f.status == FactorizationStatus::Unique, || format!("{}: status {:?}", b.name, f.status))?;
        let map = f.map.unwrap();
        for x in 0..derived.pair.bimodule().dim() {
            let image = map.apply(&unit_vec(derived.pair.bimodule().dim(), x));
            ensure(derived.pair.basis_action(x) == &co.pair().action(&image), || {
                format!("{}: action differs at field {x}", b.name)
            })?;
        }
        let t = transpose_of_comparison(c, &derived, &co).map_err(|e| e.to_string())?;
        ensure(t == map, || format!("{}: Phi != transpose(phi)", b.name))?;
    }
    Ok("unique Phi, pointwise equal actions, Phi = transpose(phi)".into())
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut tested = 0;
    for b in builtins() {
        let c = b.calculus.as_ref().unwrap();
        let reg = Bimodule::regular(&b.algebra);
        let spaces = [(c.bimodule().clone(), reg.clone()), (reg.clone(), c.bimodule().clone()), (reg.clone(), reg)];
        for (m, n) in spaces {
            let space = bimodule_map_space(&m, &n).map_err(|e| e.to_string())?;
            if space.is_zero() {
                continue;
            }
            for _ in 0..2 {
                let coeffs: Vec<Rational> =
                    (0..space.dim()).map(|_| Rational::new(rng.gen_range(-5..=5).into(), rng.gen_range(1..=3).into())).collect();
                let flat = space.combine(&coeffs);
                let alpha = BimoduleMap::new(m.clone(), n.clone(), Matrix::from_vec(n.dim(), m.dim(), flat).unwrap())
                    .map_err(|e| e.to_string())?;
                ensure(alpha.check().is_empty(), || format!("{}: sampled map is not a bimodule map", b.name))?;
                let (t, src, tgt) = transpose_right(&alpha).map_err(|e| e.to_string())?;
                ensure(t.check().is_empty(), || format!("{}: transpose fails bimodule map laws", b.name))?;
                ensure(check_bimodule(t.source()).is_empty() && check_bimodule(t.target()).is_empty(), || {
                    format!("{}: dual bimodules invalid", b.name)
                })?;
                for k in 0..tgt.dim() {
                    let y = unit_vec(tgt.dim(), k);
                    for j in 0..m.dim() {
                        let mj = unit_vec(m.dim(), j);
                        let lhs = src.pair(&t.apply(&y), &mj).map_err(|e| e.to_string())?;
                        let rhs = tgt.pair(&y, &alpha.apply(&mj)).map_err(|e| e.to_string())?;
                        ensure(lhs == rhs, || format!("{}: <a^T Y, m> != <Y, a m>", b.name))?;
                    }
                }
                tested += 1;
            }
        }
    }
    ensure(tested >= 20, || format!("only {tested} maps sampled"))?;
    Ok(format!("{tested} random bimodule maps transposed exactly"))
}

fn letters(a: &Algebra, fields: usize) -> Vec<FreeWord> {
    let mut out: Vec<FreeWord> = (0..a.dim()).map(|i| FreeWord::algebra_letter(a, i)).collect();
    out.extend((0..fields).map(FreeWord::module_letter));
    out
}

fn letter_ops(p: &CartanPair) -> Vec<Matrix> {
    let a = p.algebra();
    let mut out: Vec<Matrix> = (0..a.dim()).map(|i| left_mult_op(a, &a.basis(i))).collect();
    out.extend(p.actions().iter().cloned());
    out
}

/// Words of exactly `len` letters, with their operator products.
fn words_of_len(a: &Algebra, p: &CartanPair, len: usize) -> Vec<(FreeWord, Matrix)> {
    let ls = letters(a, p.actions().len());
    let ops = letter_ops(p);
    let mut out = vec![(FreeWord::one(), Matrix::identity(a.dim()))];
    for _ in 0..len {
        out = out
            .iter()
            .flat_map(|(w, m)| ls.iter().zip(&ops).map(move |(l, o)| (w.mul(l, a), m * o)))
            .collect();
    }
    out
}

fn oracle_span_closure(gens: &[Matrix], n: usize) -> usize {
    let mut span: Vec<Matrix> = vec![Matrix::identity(n)];
    let mut frontier = span.clone();
    let flat = |ms: &[Matrix]| ms.iter().map(|m| m.as_slice().to_vec()).collect::<Vec<_>>();
    for _ in 0..n * n {
        let mut next = Vec::new();
        for f in &frontier {
            for g in gens {
                let candidate = g * f;
                let mut trial = flat(&span);
                trial.push(candidate.as_slice().to_vec());
                if oracle_rank(&trial) > span.len() {
                    span.push(candidate.clone());
                    next.push(candidate);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    span.len()
}

fn criterion_6() -> Outcome {
    let mut checked = 0usize;
    for b in builtins() {
        let a = &b.algebra;
        let p = pair_of(&b);
        let n = a.dim();
        for len in 0..=3 {
            for (w, m) in words_of_len(a, p, len) {
                ensure(evaluate_mu(p, &w) == m, || format!("{}: mu not multiplicative on {}", b.name, w.display(a)))?;
                checked += 1;
            }
        }
        for len in 0..=4 {
            for (w, m) in words_of_len(a, p, len) {
                let nf = normal_form(p, &w);
                ensure(is_normal(&nf), || format!("{}: normal form not normal", b.name))?;
                ensure(evaluate_mu(p, &nf) == m, || format!("{}: normal form changes mu", b.name))?;
                ensure(normal_form(p, &nf) == nf, || format!("{}: normal form not idempotent", b.name))?;
            }
        }
        let ops = generate_diffop_algebra(p);
        ensure(ops.dim() <= n * n, || format!("{}: dim exceeds n^2", b.name))?;
        let basis = ops.basis_matrices();
        for x in &basis {
            for y in &basis {
                ensure(ops.contains(&(x * y)), || format!("{}: basis not closed under composition", b.name))?;
            }
        }
        let gens = letter_ops(p);
        let oracle = oracle_span_closure(&gens, n);
        ensure(oracle == ops.dim(), || format!("{}: dim {} vs brute force {oracle}", b.name, ops.dim()))?;
    }
    let dn = ncwb_core::builtins::dual_numbers();
    let d = generate_diffop_algebra(pair_of(&dn)).dim();
    ensure(d == 3, || format!("dual numbers operator algebra has dim {d}, oracle 3"))?;
    Ok(format!("{checked} words multiplicative, normal form sound, dual numbers dim 3"))
}

fn criterion_7() -> Outcome {
    for b in builtins() {
        let report = check_ccr(pair_of(&b));
        let symmetric = ["dual_numbers", "truncated_poly", "group_algebra_z2"].contains(&b.name.as_str());
        if symmetric {
            ensure(report.all_hold(), || format!("{}: CCR violated", b.name))?;
        }
    }
    let qp = ncwb_core::builtins::quantum_plane_trunc(rat(2), 2).map_err(|e| e.to_string())?;
    let report = check_ccr(pair_of(&qp));
    let witness = report.violations().next().ok_or("no CCR violation on the quantum plane")?;
    ensure(witness.twisted_relation_holds, || "twisted relation fails on the witness".into())?;
    ensure(!witness.commutator_defect.is_zero(), || "witness without defect".into())?;

    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/builtins.json")).unwrap();
    let ws = load(&parse_document(&text).unwrap()).map_err(|e| e.to_string())?;
    let qp_pair = ws.position("qp.pair").ok_or("qp.pair missing from the fixture")?;
    let reports = analyze_all(&ws, &[qp_pair], true);
    let listed = reports[0].facts["ccr"]["violations"].as_array().map_or(0, |v| v.len());
    ensure(listed > 0, || "report lists no CCR witness".into())?;
    Ok(format!(
        "symmetric builtins clean; quantum plane witness (f={}, X{}), {listed} reported",
        qp.algebra.names()[witness.f],
        witness.x
    ))
}

fn criterion_8() -> Outcome {
    for b in builtins() {
        let a = &b.algebra;
        let p = pair_of(&b);
        ensure(fock_check(p).is_empty(), || format!("{}: fock check fails", b.name))?;
        for x in p.actions() {
            ensure(x.mul_vec(a.unit()).iter().all(|c| c == &rat(0)), || format!("{}: X(1) != 0", b.name))?;
        }
        for i in 0..a.dim() {
            ensure(left_mult_op(a, &a.basis(i)).mul_vec(a.unit()) == a.basis(i), || format!("{}: f(1) != f", b.name))?;
        }
    }
    let vac = fixtures::dual_numbers_vacuum_violation();
    let fock = fock_check(&vac);
    let cartan = check_cartan(&vac);
    ensure(fock.of_law(Law::FockAnnihilation).next().is_some(), || "vacuum fixture passes fock_check".into())?;
    ensure(!cartan.is_empty(), || "vacuum fixture passes check_cartan".into())?;
    Ok("vacuum annihilated everywhere; planted fixture rejected by both checks".into())
}

fn criterion_9() -> Outcome {
    for b in builtins() {
        let c = b.calculus.as_ref().unwrap();
        let pair = pair_from_calculus(c).pair;
        for rank in 1..=2 {
            let conn = trivial_connection(c, rank);
            ensure(check_connection(&conn).is_empty(), || format!("{}: trivial connection fails", b.name))?;
            let contraction = check_contraction(conn.dual(), conn.tensor(), conn.module());
            ensure(contraction.is_empty(), || format!("{}: contraction not balanced", b.name))?;
            for k in 0..conn.dual().dim() {
                let cm = contraction_matrix(conn.dual(), conn.module(), &unit_vec(conn.dual().dim(), k));
                for rel in conn.tensor().relations().basis() {
                    ensure(cm.mul_vec(rel).iter().all(|x| x == &rat(0)), || format!("{}: relation survives", b.name))?;
                }
            }
            let axioms = check_covariant_axioms(&conn, &pair).map_err(|e| e.to_string())?;
            ensure(axioms.is_empty(), || format!("{}: covariant axioms fail", b.name))?;
        }
        let own = b.connection.as_ref().unwrap();
        let axioms = check_covariant_axioms(own, &pair).map_err(|e| e.to_string())?;
        ensure(check_connection(own).is_empty() && axioms.is_empty(), || format!("{}: bundled connection fails", b.name))?;
    }
    let bad = fixtures::dual_numbers_zero_connection();
    let report = check_connection(&bad);
    let w = report.of_law(Law::ConnectionLeibniz).next().ok_or("zero connection accepted")?;
    Ok(format!("all builtin connections valid; zero connection rejected at witness {:?}", w.witness))
}

fn criterion_10() -> Outcome {
    for n in 2..=6usize {
        let p = fixtures::naive_derivative_pair(n).map_err(|e| e.to_string())?;
        let report = check_cartan(&p);
        let mut expected: Vec<Vec<usize>> = (1..n).map(|i| vec![0, i, n - i]).collect();
        expected.sort();
        let mut found: Vec<Vec<usize>> = report.violations().iter().map(|v| v.witness.clone()).collect();
        found.sort();
        ensure(found == expected, || format!("N={n}: witnesses {found:?}, expected {expected:?}"))?;
        ensure(report.violations().iter().all(|v| v.law == Law::CartanTwistedLeibniz), || "wrong law".into())?;
        // lhs - rhs = -N x^(N-1)
        let mut defect = vec![rat(0); n];
        defect[n - 1] = rat(-(n as i64));
        ensure(report.violations().iter().all(|v| v.defect == defect), || format!("N={n}: defect differs"))?;
    }
    Ok("witnesses exactly at total degree N, Leibniz defect N x^(N-1), N = 2..6".into())
}

fn criterion_11() -> Outcome {
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/builtins.json");
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_ncwb"))
            .args(["report", fixture])
            .output()
            .map_err(|e| e.to_string())
    };
    let first = run()?;
    let second = run()?;
    ensure(first.status.code() == Some(0), || format!("exit {:?}", first.status.code()))?;
    ensure(first.stdout == second.stdout, || "outputs differ".into())?;
    let a = Command::new(env!("CARGO_BIN_EXE_ncwb")).args(["report", fixture, "--format=json"]).output().map_err(|e| e.to_string())?;
    let b = Command::new(env!("CARGO_BIN_EXE_ncwb")).args(["report", fixture, "--format=json"]).output().map_err(|e| e.to_string())?;
    ensure(a.status.code() == Some(0) && a.stdout == b.stdout, || "json outputs differ".into())?;
    Ok(format!("exit 0, {} bytes identical across runs (text and json)", first.stdout.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("calculus <-> Cartan pair duality", criterion_1),
        ("A* of the regular bimodule", criterion_2),
        ("universal calculus", criterion_3),
        ("co-universal factorization", criterion_4),
        ("transpose of bimodule maps", criterion_5),
        ("differential operators", criterion_6),
        ("CCR degeneration", criterion_7),
        ("Fock vacuum", criterion_8),
        ("connections", criterion_9),
        ("naive derivative is rejected", criterion_10),
        ("CLI report determinism", criterion_11),
    ];
    let mut failed = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        match f() {
            Ok(detail) => println!("PASS {:>2} {title}: {detail} ({:.1?})", i + 1, start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {title}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
