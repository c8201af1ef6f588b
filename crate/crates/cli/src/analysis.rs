//! Per-object checks and diagnostics.

use std::sync::Arc;

use ncwb_core::algebra::{left_dual, right_dual};
use ncwb_core::calculus::{check_leibniz, factor_through_universal, is_spanned_by_differential};
use ncwb_core::cartan::{
    action_kernel, calculus_from_pair, check_cartan, co_universal_factorization, co_universal_pair,
    pair_from_calculus, reflexive_roundtrip, spanning_kernel_diagnostic, transpose_of_comparison,
    CoUniversalFactorization, CoUniversalPair, FactorizationStatus,
};
use ncwb_core::connections::{check_connection, check_covariant_axioms, check_tensor_structure};
use ncwb_core::diffops::{check_ccr, evaluate_mu, fock_check, generate_diffop_algebra, Generator};
use ncwb_core::linalg::{format_rational, Subspace};
use ncwb_core::{Algebra, Report, Slot};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::workspace::{letter_to_raw, matrix_to_raw, Item, Workspace};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Finding {
    pub law: String,
    pub witness: Vec<String>,
    pub defect: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub passed: bool,
    pub violations: Vec<Finding>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObjectReport {
    pub name: String,
    pub kind: String,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    pub facts: Map<String, Value>,
}

fn witness_labels(a: &Algebra, law: ncwb_core::Law, witness: &[usize]) -> Vec<String> {
    law.slots()
        .iter()
        .zip(witness)
        .map(|(slot, &i)| match slot {
            Slot::Algebra => a.names()[i].clone(),
            Slot::Field => format!("X{i}"),
            Slot::Module => format!("xi{i}"),
            Slot::Relation => format!("r{i}"),
        })
        .collect()
}

fn check_result(check: &str, a: &Algebra, report: &Report) -> CheckResult {
    let violations: Vec<Finding> = report
        .violations()
        .iter()
        .map(|v| Finding {
            law: v.law.key().to_string(),
            witness: witness_labels(a, v.law, &v.witness),
            defect: v.defect.iter().map(format_rational).collect(),
        })
        .collect();
    CheckResult { check: check.to_string(), passed: violations.is_empty(), violations }
}

fn plain_check(check: &str, violations: Vec<Finding>) -> CheckResult {
    CheckResult { check: check.to_string(), passed: violations.is_empty(), violations }
}

/// Co-universal pairs shared between the objects over the same algebra.
pub struct Cache {
    couniversal: Vec<(Arc<Algebra>, CoUniversalPair)>,
}

impl Cache {
    pub fn empty() -> Self {
        Cache { couniversal: Vec::new() }
    }

    pub fn build(ws: &Workspace, indices: &[usize]) -> Self {
        let mut algebras: Vec<Arc<Algebra>> = Vec::new();
        for &i in indices {
            let item = &ws.items[i].1;
            if !matches!(item, Item::Calculus { .. } | Item::Pair { .. } | Item::Algebra(_)) {
                continue;
            }
            let a = item.algebra();
            if !algebras.iter().any(|b| Arc::ptr_eq(a, b)) {
                algebras.push(a.clone());
            }
        }
        let couniversal = algebras.into_par_iter().map(|a| {
            let co = co_universal_pair(&a);
            (a, co)
        });
        Cache { couniversal: couniversal.collect() }
    }

    fn couniversal(&self, a: &Arc<Algebra>) -> CoUniversalPair {
        self.couniversal
            .iter()
            .find(|(b, _)| Arc::ptr_eq(a, b))
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| co_universal_pair(a))
    }
}

fn factorization_facts(f: &CoUniversalFactorization) -> Value {
    match f.status {
        FactorizationStatus::Unique => json!({"exists": true, "unique": true}),
        FactorizationStatus::Absent => json!({"exists": false, "unique": false}),
        FactorizationStatus::NotUnique(d) => json!({"exists": true, "unique": false, "homogeneous_dim": d}),
    }
}

/// Checks for one item; with `deep` also the diagnostics of the full pipeline.
pub fn analyze(ws: &Workspace, index: usize, deep: bool, cache: &Cache) -> ObjectReport {
    let (name, item) = &ws.items[index];
    let a = ws.algebra_of(item);
    let mut checks = Vec::new();
    let mut facts = Map::new();
    match item {
        Item::Algebra(alg) => {
            checks.push(check_result("algebra", alg, &ncwb_core::algebra::check_algebra(alg)));
            facts.insert("dim".into(), json!(alg.dim()));
            if deep {
                facts.insert("commutative".into(), json!(alg.is_commutative()));
                let co = cache.couniversal(alg);
                facts.insert("universal_dim".into(), json!(co.universal.dim()));
                facts.insert("mult_rank".into(), json!(co.universal.mult_rank()));
                facts.insert("couniversal_dim".into(), json!(co.dim()));
            }
        }
        Item::Bimodule { value, .. } => {
            checks.push(check_result("bimodule", &a, &ncwb_core::algebra::check_bimodule(value)));
            facts.insert("dim".into(), json!(value.dim()));
            if deep {
                facts.insert("symmetric".into(), json!(value.is_symmetric()));
                facts.insert("right_dual_dim".into(), json!(right_dual(value).dim()));
                facts.insert("left_dual_dim".into(), json!(left_dual(value).dim()));
            }
        }
        Item::LeftModule { value, .. } => {
            checks.push(check_result("left_module", &a, &ncwb_core::algebra::check_left_module(value)));
            facts.insert("dim".into(), json!(value.dim()));
        }
        Item::Calculus { value, .. } => {
            let leibniz = check_result("leibniz", &a, &check_leibniz(value));
            let valid = leibniz.passed;
            checks.push(leibniz);
            facts.insert("dim".into(), json!(value.bimodule().dim()));
            if deep && valid {
                let derived = pair_from_calculus(value);
                checks.push(check_result("derived_pair_cartan", &a, &check_cartan(&derived.pair)));
                match calculus_from_pair(&derived.pair) {
                    Some(back) => checks.push(check_result("recovered_calculus_leibniz", &a, &check_leibniz(&back.calculus))),
                    None => checks.push(plain_check(
                        "recovered_calculus_leibniz",
                        vec![Finding { law: "left_linear".into(), witness: vec![], defect: vec![] }],
                    )),
                }
                facts.insert("spanned_by_differential".into(), json!(is_spanned_by_differential(value)));
                let co = cache.couniversal(&a);
                if let Ok(phi) = factor_through_universal(value, &co.universal) {
                    facts.insert(
                        "universal_factorization".into(),
                        json!({
                            "commutes": phi.commutes,
                            "bimodule_map": phi.bimodule_report.is_empty(),
                            "unique": phi.is_unique(),
                        }),
                    );
                }
                let rt = reflexive_roundtrip(value);
                facts.insert(
                    "reflexive_roundtrip".into(),
                    json!({
                        "dual_dim": rt.dual_dim,
                        "double_dual_dim": rt.double_dual_dim,
                        "injective": rt.injective,
                        "surjective": rt.surjective,
                        "bimodule_map": rt.is_bimodule_map,
                        "intertwines_differentials": rt.intertwines_differentials,
                    }),
                );
                if let Ok(f) = co_universal_factorization(&derived.pair, &co) {
                    let mut v = factorization_facts(&f);
                    if let (Some(m), Ok(t)) = (&f.map, transpose_of_comparison(value, &derived, &co)) {
                        v["matches_transpose"] = json!(m == &t);
                    }
                    facts.insert("couniversal_factorization".into(), v);
                }
            }
        }
        Item::Pair { value, .. } => {
            let cartan = check_result("cartan", &a, &check_cartan(value));
            let valid = cartan.passed;
            checks.push(cartan);
            checks.push(check_result("fock", &a, &fock_check(value)));
            facts.insert("dim".into(), json!(value.bimodule().dim()));
            if deep && valid {
                facts.insert("action_kernel_dim".into(), json!(action_kernel(value).dim()));
                if let Some(s) = spanning_kernel_diagnostic(value) {
                    facts.insert(
                        "spanning".into(),
                        json!({"spanned": s.spanned, "trivial_kernel": s.trivial_kernel, "agree": s.agree()}),
                    );
                }
                let ccr = check_ccr(value);
                let violations: Vec<Value> = ccr
                    .violations()
                    .map(|e| {
                        json!({
                            "f": a.names()[e.f],
                            "x": format!("X{}", e.x),
                            "central": e.central,
                            "twisted_relation_holds": e.twisted_relation_holds,
                            "defect": matrix_to_raw(&e.commutator_defect),
                        })
                    })
                    .collect();
                facts.insert(
                    "ccr".into(),
                    json!({
                        "holds": ccr.all_hold(),
                        "pairs_checked": ccr.entries.len(),
                        "twisted_relation_holds": ccr.entries.iter().all(|e| e.twisted_relation_holds),
                        "violations": violations,
                    }),
                );
                let co = cache.couniversal(&a);
                if let Ok(f) = co_universal_factorization(value, &co) {
                    facts.insert("couniversal_factorization".into(), factorization_facts(&f));
                }
                facts.insert("diffops_dim".into(), json!(generate_diffop_algebra(value).dim()));
            }
        }
        Item::Connection { value, .. } => {
            checks.push(check_result("connection_leibniz", &a, &check_connection(value)));
            checks.push(check_result("tensor_structure", &a, &check_tensor_structure(value)));
            let pair = pair_from_calculus(value.calculus()).pair;
            let cov = check_covariant_axioms(value, &pair).expect("pair lives on the connection's dual");
            checks.push(check_result("covariant_axioms", &a, &cov));
            facts.insert("tensor_dim".into(), json!(value.tensor().dim()));
        }
        Item::BimoduleMap { value, .. } => {
            checks.push(check_result("bimodule_map", &a, &value.check()));
            facts.insert("rank".into(), json!(value.matrix().rank()));
        }
        Item::OperatorAlgebra { pair, basis, generators } => {
            let Some(Item::Pair { value: p, .. }) = ws.get(pair) else { unreachable!("resolved at load") };
            let computed = generate_diffop_algebra(p);
            let n = a.dim();
            let stored = Subspace::span(n * n, basis.iter().map(|m| m.as_slice().to_vec()));
            let mut violations = Vec::new();
            if stored != computed.basis || basis.len() != computed.dim() {
                violations.push(Finding { law: "generated_span".into(), witness: vec![], defect: vec![] });
            }
            if generators != &generator_names(&a, &computed.generator_log) {
                violations.push(Finding { law: "generator_log".into(), witness: vec![], defect: vec![] });
            }
            checks.push(plain_check("operator_algebra", violations));
            facts.insert("dim".into(), json!(basis.len()));
        }
        Item::Relations(r) => {
            let Some(Item::Pair { value: p, .. }) = ws.get(&r.pair) else { unreachable!("resolved at load") };
            let violations = r
                .relations
                .iter()
                .enumerate()
                .filter_map(|(k, w)| {
                    let m = evaluate_mu(p, w);
                    (!m.is_zero()).then(|| Finding {
                        law: "mu_vanishes".into(),
                        witness: vec![format!("r{k}")],
                        defect: m.as_slice().iter().map(format_rational).collect(),
                    })
                })
                .collect();
            checks.push(plain_check("relations", violations));
            facts.insert("kernel_dim".into(), json!(r.relations.len()));
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    ObjectReport { name: name.clone(), kind: item.kind().to_string(), passed, checks, facts }
}

pub fn generator_names(a: &Algebra, log: &[Generator]) -> Vec<String> {
    log.iter()
        .map(|g| match g {
            Generator::Identity => "id".to_string(),
            Generator::LeftMult(i) => letter_to_raw(a, ncwb_core::Letter::A(*i)),
            Generator::Action(k) => letter_to_raw(a, ncwb_core::Letter::M(*k)),
        })
        .collect()
}

/// Reports for the given items, computed in parallel and returned in item order.
pub fn analyze_all(ws: &Workspace, indices: &[usize], deep: bool) -> Vec<ObjectReport> {
    let cache = if deep { Cache::build(ws, indices) } else { Cache::empty() };
    indices.par_iter().map(|&i| analyze(ws, i, deep, &cache)).collect()
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(xs) if xs.iter().any(|x| x.is_object()) => {
            for (i, x) in xs.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::Array(xs) if xs.is_empty() => out.push(format!("{prefix} = []")),
        other => out.push(format!("{prefix} = {other}")),
    }
}

pub fn render_text(reports: &[ObjectReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let tag = if r.passed { "ok" } else { "FAIL" };
        out.push_str(&format!("[{tag}] {} ({})\n", r.name, r.kind));
        for c in &r.checks {
            if c.passed {
                out.push_str(&format!("    check {}: ok\n", c.check));
            } else {
                out.push_str(&format!("    check {}: {} violation(s)\n", c.check, c.violations.len()));
                for v in &c.violations {
                    out.push_str(&format!(
                        "      {} at ({}): defect [{}]\n",
                        v.law,
                        v.witness.join(", "),
                        v.defect.join(", ")
                    ));
                }
            }
        }
        let mut lines = Vec::new();
        flatten("", &Value::Object(r.facts.clone()), &mut lines);
        for l in lines {
            out.push_str(&format!("    {l}\n"));
        }
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    out.push_str(&format!("{} object(s), {} failed\n", reports.len(), failed));
    out
}

pub fn render_json(reports: &[ObjectReport]) -> String {
    let doc = json!({
        "schema": "ncwb-report/1",
        "passed": reports.iter().all(|r| r.passed),
        "objects": reports,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("reports serialize");
    s.push('\n');
    s
}
