//! `ncwb derive`: build new objects from existing ones.

use clap::ValueEnum;
use ncwb_core::algebra::{left_dual, right_dual};
use ncwb_core::calculus::{check_leibniz, factor_through_universal, is_spanned_by_differential, universal_calculus};
use ncwb_core::cartan::{
    action_kernel, calculus_from_pair, check_cartan, co_universal_factorization, co_universal_pair,
    pair_from_calculus, FactorizationStatus,
};
use ncwb_core::diffops::{find_relations, generate_diffop_algebra};
use serde_json::{json, Value};

use crate::analysis::generator_names;
use crate::document::Document;
use crate::error::CliError;
use crate::workspace::{Item, RelationsItem, Workspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum What {
    Dual,
    Pair,
    Calculus,
    Universal,
    Couniversal,
    Diffops,
    Relations,
    Factorization,
}

impl What {
    fn accepts(self, kind: &str) -> bool {
        let kinds: &[&str] = match self {
            What::Dual => &["bimodule"],
            What::Pair => &["calculus"],
            What::Calculus | What::Diffops | What::Relations => &["cartan_pair"],
            What::Universal | What::Couniversal => &["algebra"],
            What::Factorization => &["calculus", "cartan_pair"],
        };
        kinds.contains(&kind)
    }

    pub fn key(self) -> &'static str {
        match self {
            What::Dual => "dual",
            What::Pair => "pair",
            What::Calculus => "calculus",
            What::Universal => "universal",
            What::Couniversal => "couniversal",
            What::Diffops => "diffops",
            What::Relations => "relations",
            What::Factorization => "factorization",
        }
    }
}

/// Outcome of a derivation. `passed == false` means a mathematical failure
/// (exit code 1); the document may still carry a diagnostic summary.
pub struct Derived {
    pub document: Document,
    pub passed: bool,
}

fn usage(msg: String) -> CliError {
    CliError::Usage(msg)
}

/// The item `what` should act on. A builtin declaration picks its first
/// member of a suitable kind.
fn target(ws: &Workspace, name: &str, what: What) -> Result<usize, CliError> {
    let candidates = ws.select(name).ok_or_else(|| usage(format!("no object named {name:?}")))?;
    candidates
        .iter()
        .copied()
        .find(|&i| what.accepts(ws.items[i].1.kind()))
        .ok_or_else(|| {
            let kind = ws.items[candidates[0]].1.kind();
            usage(format!("cannot derive {} from {name:?} ({kind})", what.key()))
        })
}

fn algebra_item(ws: &Workspace, mut i: usize) -> usize {
    loop {
        let item = &ws.items[i].1;
        if let Item::Algebra(_) = item {
            return i;
        }
        i = ws.position(item.refs()[0]).expect("resolved");
    }
}

fn failure(ws: &Workspace, roots: &[usize], summary: Value) -> Derived {
    Derived { document: ws.export_items(roots, Some(summary)), passed: false }
}

pub fn derive(mut ws: Workspace, name: &str, what: What, max_len: usize) -> Result<Derived, CliError> {
    let t = target(&ws, name, what)?;
    let (tname, item) = ws.items[t].clone();
    let alg_index = algebra_item(&ws, t);
    let alg_name = ws.items[alg_index].0.clone();
    let a = ws.algebra_of(&item);
    let mut summary = json!({"source": tname, "derived": what.key()});
    let add = |ws: &mut Workspace, items: Vec<(String, Item)>| -> Result<Vec<usize>, CliError> {
        ws.add_items(items).map_err(|e| usage(e.to_string()))
    };

    let roots = match (what, &item) {
        (What::Dual, Item::Bimodule { value, .. }) => {
            let r = right_dual(value);
            let l = left_dual(value);
            summary["right_dual_dim"] = json!(r.dim());
            summary["left_dual_dim"] = json!(l.dim());
            add(
                &mut ws,
                vec![
                    (format!("{tname}.right_dual"), Item::Bimodule { algebra: alg_name.clone(), value: r.bimodule().clone() }),
                    (format!("{tname}.left_dual"), Item::Bimodule { algebra: alg_name, value: l.bimodule().clone() }),
                ],
            )?
        }
        (What::Pair, Item::Calculus { value, .. }) => {
            let report = check_leibniz(value);
            if !report.is_empty() {
                summary["leibniz_violations"] = json!(report.len());
                return Ok(failure(&ws, &[t], summary));
            }
            let derived = pair_from_calculus(value);
            let cartan = check_cartan(&derived.pair);
            summary["dim"] = json!(derived.pair.bimodule().dim());
            summary["action_kernel_dim"] = json!(action_kernel(&derived.pair).dim());
            summary["cartan_violations"] = json!(cartan.len());
            let fields = format!("{tname}.fields");
            let roots = add(
                &mut ws,
                vec![
                    (fields.clone(), Item::Bimodule { algebra: alg_name, value: derived.pair.bimodule().clone() }),
                    (format!("{tname}.pair"), Item::Pair { bimodule: fields, value: derived.pair }),
                ],
            )?;
            if !cartan.is_empty() {
                return Ok(failure(&ws, &roots, summary));
            }
            roots
        }
        (What::Calculus, Item::Pair { value, .. }) => {
            let report = check_cartan(value);
            if !report.is_empty() {
                summary["cartan_violations"] = json!(report.len());
                return Ok(failure(&ws, &[t], summary));
            }
            let Some(derived) = calculus_from_pair(value) else {
                summary["recovered"] = json!(false);
                return Ok(failure(&ws, &[t], summary));
            };
            summary["dim"] = json!(derived.calculus.bimodule().dim());
            summary["spanned_by_differential"] = json!(is_spanned_by_differential(&derived.calculus));
            let forms = format!("{tname}.forms");
            add(
                &mut ws,
                vec![
                    (forms.clone(), Item::Bimodule { algebra: alg_name, value: derived.calculus.bimodule().clone() }),
                    (format!("{tname}.calculus"), Item::Calculus { bimodule: forms, value: derived.calculus }),
                ],
            )?
        }
        (What::Universal, Item::Algebra(alg)) => {
            let u = universal_calculus(alg);
            summary["dim"] = json!(u.dim());
            summary["mult_rank"] = json!(u.mult_rank());
            let forms = format!("{tname}.universal_forms");
            add(
                &mut ws,
                vec![
                    (forms.clone(), Item::Bimodule { algebra: alg_name, value: u.bimodule().clone() }),
                    (format!("{tname}.universal"), Item::Calculus { bimodule: forms, value: u.calculus().clone() }),
                ],
            )?
        }
        (What::Couniversal, Item::Algebra(alg)) => {
            let co = co_universal_pair(alg);
            summary["dim"] = json!(co.dim());
            let fields = format!("{tname}.universal_fields");
            add(
                &mut ws,
                vec![
                    (fields.clone(), Item::Bimodule { algebra: alg_name, value: co.pair().bimodule().clone() }),
                    (format!("{tname}.couniversal"), Item::Pair { bimodule: fields, value: co.pair().clone() }),
                ],
            )?
        }
        (What::Diffops, Item::Pair { value, .. }) => {
            let ops = generate_diffop_algebra(value);
            summary["dim"] = json!(ops.dim());
            add(
                &mut ws,
                vec![(
                    format!("{tname}.diffops"),
                    Item::OperatorAlgebra {
                        pair: tname.clone(),
                        generators: generator_names(&a, &ops.generator_log),
                        basis: ops.basis_matrices(),
                    },
                )],
            )?
        }
        (What::Relations, Item::Pair { value, .. }) => {
            let rels = find_relations(value, max_len);
            summary["max_len"] = json!(max_len);
            summary["words"] = json!(rels.words.len());
            summary["image_dim"] = json!(rels.image_dim);
            summary["kernel_dim"] = json!(rels.kernel_dim());
            add(
                &mut ws,
                vec![(
                    format!("{tname}.relations"),
                    Item::Relations(RelationsItem {
                        pair: tname.clone(),
                        max_len,
                        words: rels.words.len(),
                        image_dim: rels.image_dim,
                        relations: rels.relations,
                    }),
                )],
            )?
        }
        (What::Factorization, Item::Calculus { value, .. }) => {
            let report = check_leibniz(value);
            if !report.is_empty() {
                summary["leibniz_violations"] = json!(report.len());
                return Ok(failure(&ws, &[t], summary));
            }
            let u = universal_calculus(&a);
            let phi = factor_through_universal(value, &u).map_err(|e| usage(e.to_string()))?;
            summary["commutes"] = json!(phi.commutes);
            summary["bimodule_map"] = json!(phi.bimodule_report.is_empty());
            summary["unique"] = json!(phi.is_unique());
            let passed = phi.holds() && phi.is_unique();
            let forms = format!("{alg_name}.universal_forms");
            let mut items = Vec::new();
            if ws.position(&forms).is_none() {
                items.push((forms.clone(), Item::Bimodule { algebra: alg_name, value: u.bimodule().clone() }));
            }
            let Item::Calculus { bimodule, .. } = &item else { unreachable!() };
            items.push((
                format!("{tname}.phi"),
                Item::BimoduleMap { source: forms, target: bimodule.clone(), value: phi.phi },
            ));
            let roots = add(&mut ws, items)?;
            if !passed {
                return Ok(failure(&ws, &roots, summary));
            }
            roots
        }
        (What::Factorization, Item::Pair { value, bimodule }) => {
            let report = check_cartan(value);
            if !report.is_empty() {
                summary["cartan_violations"] = json!(report.len());
                return Ok(failure(&ws, &[t], summary));
            }
            let co = co_universal_pair(&a);
            let f = co_universal_factorization(value, &co).map_err(|e| usage(e.to_string()))?;
            let (exists, unique) = match f.status {
                FactorizationStatus::Unique => (true, true),
                FactorizationStatus::Absent => (false, false),
                FactorizationStatus::NotUnique(d) => {
                    summary["homogeneous_dim"] = json!(d);
                    (true, false)
                }
            };
            summary["exists"] = json!(exists);
            summary["unique"] = json!(unique);
            let Some(map) = f.map.filter(|_| unique) else {
                return Ok(failure(&ws, &[t], summary));
            };
            let fields = format!("{alg_name}.universal_fields");
            let mut items = Vec::new();
            if ws.position(&fields).is_none() {
                items.push((fields.clone(), Item::Bimodule { algebra: alg_name, value: co.pair().bimodule().clone() }));
            }
            items.push((
                format!("{tname}.Phi"),
                Item::BimoduleMap { source: bimodule.clone(), target: fields, value: map },
            ));
            add(&mut ws, items)?
        }
        _ => unreachable!("target() filters by kind"),
    };
    Ok(Derived { document: ws.export_items(&roots, Some(summary)), passed: true })
}
