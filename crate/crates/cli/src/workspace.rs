//! Resolving documents into checked mathematical objects, and back.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use ncwb_core::builtins::{builtin, ExampleBundle};
use ncwb_core::diffops::{FreeWord, Letter};
use ncwb_core::linalg::{format_rational, parse_rational};
use ncwb_core::{
    Algebra, Bimodule, BimoduleMap, CartanPair, Connection, DifferentialCalculus, LeftModule, Matrix, Rational,
};
use serde_json::Value;

use crate::document::{Document, RawMatrix, RawObject, RawTerm, SCHEMA};
use crate::error::LoadError;

/// A resolved object. Cross-references are kept by name so the object can be
/// written back out.
#[derive(Clone, Debug)]
pub enum Item {
    Algebra(Arc<Algebra>),
    Bimodule { algebra: String, value: Bimodule },
    LeftModule { algebra: String, value: LeftModule },
    Calculus { bimodule: String, value: DifferentialCalculus },
    Pair { bimodule: String, value: CartanPair },
    Connection { calculus: String, module: String, value: Connection },
    BimoduleMap { source: String, target: String, value: BimoduleMap },
    OperatorAlgebra { pair: String, generators: Vec<String>, basis: Vec<Matrix> },
    Relations(RelationsItem),
}

#[derive(Clone, Debug)]
pub struct RelationsItem {
    pub pair: String,
    pub max_len: usize,
    pub words: usize,
    pub image_dim: usize,
    pub relations: Vec<FreeWord>,
}

impl Item {
    pub fn kind(&self) -> &'static str {
        match self {
            Item::Algebra(_) => "algebra",
            Item::Bimodule { .. } => "bimodule",
            Item::LeftModule { .. } => "left_module",
            Item::Calculus { .. } => "calculus",
            Item::Pair { .. } => "cartan_pair",
            Item::Connection { .. } => "connection",
            Item::BimoduleMap { .. } => "bimodule_map",
            Item::OperatorAlgebra { .. } => "operator_algebra",
            Item::Relations(_) => "relations",
        }
    }

    /// Names this item refers to.
    pub fn refs(&self) -> Vec<&str> {
        match self {
            Item::Algebra(_) => vec![],
            Item::Bimodule { algebra, .. } | Item::LeftModule { algebra, .. } => vec![algebra],
            Item::Calculus { bimodule, .. } | Item::Pair { bimodule, .. } => vec![bimodule],
            Item::Connection { calculus, module, .. } => vec![calculus, module],
            Item::BimoduleMap { source, target, .. } => vec![source, target],
            Item::OperatorAlgebra { pair, .. } => vec![pair],
            Item::Relations(r) => vec![&r.pair],
        }
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        match self {
            Item::Algebra(a) => a,
            Item::Bimodule { value, .. } => value.algebra(),
            Item::LeftModule { value, .. } => value.algebra(),
            Item::Calculus { value, .. } => value.algebra(),
            Item::Pair { value, .. } => value.algebra(),
            Item::Connection { value, .. } => value.calculus().algebra(),
            Item::BimoduleMap { value, .. } => value.source().algebra(),
            Item::OperatorAlgebra { .. } | Item::Relations(_) => {
                unreachable!("operator records are looked up through their pair")
            }
        }
    }
}

/// A top-level object as declared in the file. Builtins expand to several items.
#[derive(Clone, Debug)]
pub struct Declaration {
    pub name: String,
    pub builtin: Option<(String, Vec<Rational>)>,
    /// Indices into [`Workspace::items`].
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub items: Vec<(String, Item)>,
    pub declarations: Vec<Declaration>,
    pub summary: Option<Value>,
    index: HashMap<String, usize>,
}

impl Workspace {
    pub fn get(&self, name: &str) -> Option<&Item> {
        self.index.get(name).map(|&i| &self.items[i].1)
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Items selected by a declaration name, an item name or a name prefix.
    pub fn select(&self, name: &str) -> Option<Vec<usize>> {
        if let Some(d) = self.declarations.iter().find(|d| d.name == name) {
            return Some(d.members.clone());
        }
        if let Some(i) = self.position(name) {
            return Some(vec![i]);
        }
        // Exported builtins keep their member names, so `w` still selects `w.*`.
        let prefix = format!("{name}.");
        let members: Vec<usize> = (0..self.items.len()).filter(|&i| self.items[i].0.starts_with(&prefix)).collect();
        (!members.is_empty()).then_some(members)
    }

    fn push(&mut self, name: String, item: Item) -> Result<usize, LoadError> {
        if name.is_empty() {
            return Err(LoadError::new(&name, "object names must be non-empty"));
        }
        if self.index.contains_key(&name) {
            return Err(LoadError::new(&name, "duplicate object name"));
        }
        let i = self.items.len();
        self.index.insert(name.clone(), i);
        self.items.push((name, item));
        Ok(i)
    }

    fn algebra_ref(&self, owner: &str, name: &str) -> Result<Arc<Algebra>, LoadError> {
        match self.get(name) {
            Some(Item::Algebra(a)) => Ok(a.clone()),
            Some(other) => Err(LoadError::new(owner, format!("{name:?} is a {}, expected an algebra", other.kind()))),
            None => Err(LoadError::new(owner, format!("unknown algebra {name:?}"))),
        }
    }

    fn bimodule_ref(&self, owner: &str, name: &str) -> Result<Bimodule, LoadError> {
        match self.get(name) {
            Some(Item::Bimodule { value, .. }) => Ok(value.clone()),
            Some(other) => Err(LoadError::new(owner, format!("{name:?} is a {}, expected a bimodule", other.kind()))),
            None => Err(LoadError::new(owner, format!("unknown bimodule {name:?}"))),
        }
    }

    fn pair_ref(&self, owner: &str, name: &str) -> Result<CartanPair, LoadError> {
        match self.get(name) {
            Some(Item::Pair { value, .. }) => Ok(value.clone()),
            Some(other) => Err(LoadError::new(owner, format!("{name:?} is a {}, expected a cartan_pair", other.kind()))),
            None => Err(LoadError::new(owner, format!("unknown cartan_pair {name:?}"))),
        }
    }

    /// Adds derived items under fresh names.
    pub fn add_items(&mut self, items: Vec<(String, Item)>) -> Result<Vec<usize>, LoadError> {
        items.into_iter().map(|(n, it)| self.push(n, it)).collect()
    }

    /// The items with the given indices and everything they depend on, in
    /// workspace order.
    pub fn closure(&self, roots: &[usize]) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<usize> = roots.to_vec();
        while let Some(i) = stack.pop() {
            if seen.insert(i) {
                for r in self.items[i].1.refs() {
                    stack.push(self.index[r]);
                }
            }
        }
        seen.into_iter().collect()
    }
}

fn rational(owner: &str, at: &str, s: &str) -> Result<Rational, LoadError> {
    parse_rational(s).map_err(|_| LoadError::new(owner, format!("{at}: invalid rational {s:?}")))
}

fn vector(owner: &str, at: &str, raw: &[String], len: usize) -> Result<Vec<Rational>, LoadError> {
    if raw.len() != len {
        return Err(LoadError::new(owner, format!("{at}: expected {len} entries, got {}", raw.len())));
    }
    raw.iter().enumerate().map(|(k, s)| rational(owner, &format!("{at}[{k}]"), s)).collect()
}

fn matrix(owner: &str, at: &str, raw: &RawMatrix, rows: usize, cols: usize) -> Result<Matrix, LoadError> {
    if raw.len() != rows {
        return Err(LoadError::new(owner, format!("{at}: expected {rows} rows, got {}", raw.len())));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for (r, row) in raw.iter().enumerate() {
        data.extend(vector(owner, &format!("{at}[{r}]"), row, cols)?);
    }
    Ok(Matrix::from_vec(rows, cols, data).expect("checked shape"))
}

fn matrices(owner: &str, at: &str, raw: &[RawMatrix], count: usize, dim: usize) -> Result<Vec<Matrix>, LoadError> {
    if raw.len() != count {
        return Err(LoadError::new(owner, format!("{at}: expected {count} matrices, got {}", raw.len())));
    }
    raw.iter().enumerate().map(|(i, m)| matrix(owner, &format!("{at}[{i}]"), m, dim, dim)).collect()
}

pub fn matrix_to_raw(m: &Matrix) -> RawMatrix {
    (0..m.rows()).map(|r| m.row(r).iter().map(format_rational).collect()).collect()
}

fn parse_letter(owner: &str, a: &Algebra, fields: usize, s: &str) -> Result<Letter, LoadError> {
    if let Some(name) = s.strip_prefix("a:") {
        let i = a
            .names()
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| LoadError::new(owner, format!("unknown basis element in letter {s:?}")))?;
        return Ok(Letter::A(i));
    }
    if let Some(k) = s.strip_prefix("m:") {
        if let Ok(k) = k.parse::<usize>() {
            if k < fields && k.to_string() == s[2..] {
                return Ok(Letter::M(k));
            }
        }
    }
    Err(LoadError::new(owner, format!("invalid letter {s:?}")))
}

pub fn letter_to_raw(a: &Algebra, l: Letter) -> String {
    match l {
        Letter::A(i) => format!("a:{}", a.names()[i]),
        Letter::M(k) => format!("m:{k}"),
    }
}

pub fn word_to_raw(a: &Algebra, w: &FreeWord) -> Vec<RawTerm> {
    w.terms()
        .map(|(letters, c)| RawTerm {
            coeff: format_rational(c),
            word: letters.iter().map(|&l| letter_to_raw(a, l)).collect(),
        })
        .collect()
}

fn bundle_items(prefix: &str, b: &ExampleBundle) -> Vec<(String, Item)> {
    let alg = format!("{prefix}.algebra");
    let mut out = vec![(alg.clone(), Item::Algebra(b.algebra.clone()))];
    if let Some(c) = &b.calculus {
        let forms = format!("{prefix}.one_forms");
        out.push((forms.clone(), Item::Bimodule { algebra: alg.clone(), value: c.bimodule().clone() }));
        let calc = format!("{prefix}.calculus");
        out.push((calc.clone(), Item::Calculus { bimodule: forms, value: c.clone() }));
        if let Some(p) = &b.pair {
            let fields = format!("{prefix}.fields");
            out.push((fields.clone(), Item::Bimodule { algebra: alg.clone(), value: p.bimodule().clone() }));
            out.push((format!("{prefix}.pair"), Item::Pair { bimodule: fields, value: p.clone() }));
        }
        if let Some(conn) = &b.connection {
            let module = format!("{prefix}.module");
            out.push((module.clone(), Item::LeftModule { algebra: alg.clone(), value: conn.module().clone() }));
            out.push((
                format!("{prefix}.connection"),
                Item::Connection { calculus: calc, module, value: conn.clone() },
            ));
        }
    }
    out
}

/// Builtin parameters as they appear in a document.
pub fn format_params(params: &[Rational]) -> Vec<String> {
    params.iter().map(format_rational).collect()
}

pub fn load(doc: &Document) -> Result<Workspace, LoadError> {
    if doc.schema != SCHEMA {
        return Err(LoadError::new("", format!("unsupported schema {:?}, expected {SCHEMA:?}", doc.schema)));
    }
    let mut ws = Workspace { summary: doc.summary.clone(), ..Workspace::default() };
    for raw in &doc.objects {
        let name = raw.name().to_string();
        if ws.declarations.iter().any(|d| d.name == name) {
            return Err(LoadError::new(&name, "duplicate object name"));
        }
        let (builtin_ref, members) = match raw {
            RawObject::Builtin { builtin: b, params, .. } => {
                let params: Vec<Rational> = params
                    .iter()
                    .enumerate()
                    .map(|(k, p)| rational(&name, &format!("params[{k}]"), p))
                    .collect::<Result<_, _>>()?;
                let bundle = builtin(b, &params).map_err(|e| LoadError::new(&name, e.to_string()))?;
                let members = ws.add_items(bundle_items(&name, &bundle))?;
                (Some((b.clone(), params)), members)
            }
            _ => {
                let item = resolve(&ws, raw)?;
                (None, vec![ws.push(name.clone(), item)?])
            }
        };
        ws.declarations.push(Declaration { name, builtin: builtin_ref, members });
    }
    Ok(ws)
}

fn resolve(ws: &Workspace, raw: &RawObject) -> Result<Item, LoadError> {
    let owner = raw.name();
    let fail = |e: ncwb_core::Error| LoadError::new(owner, e.to_string());
    Ok(match raw {
        RawObject::Algebra { basis, unit, products, .. } => {
            let n = basis.len();
            if basis.iter().any(String::is_empty) || basis.iter().collect::<BTreeSet<_>>().len() != n {
                return Err(LoadError::new(owner, "basis names must be distinct and non-empty"));
            }
            if n == 0 {
                return Err(LoadError::new(owner, "an algebra needs at least one basis element"));
            }
            let unit = vector(owner, "unit", unit, n)?;
            if products.len() != n {
                return Err(LoadError::new(owner, format!("products: expected {n} rows, got {}", products.len())));
            }
            let mut flat = Vec::with_capacity(n * n);
            for (i, row) in products.iter().enumerate() {
                if row.len() != n {
                    return Err(LoadError::new(owner, format!("products[{i}]: expected {n} entries, got {}", row.len())));
                }
                for (j, v) in row.iter().enumerate() {
                    flat.push(vector(owner, &format!("products[{i}][{j}]"), v, n)?);
                }
            }
            Item::Algebra(Arc::new(Algebra::new(basis.clone(), flat, unit).map_err(fail)?))
        }
        RawObject::Bimodule { algebra, dim, left, right, .. } => {
            let a = ws.algebra_ref(owner, algebra)?;
            let n = a.dim();
            let left = matrices(owner, "left", left, n, *dim)?;
            let right = matrices(owner, "right", right, n, *dim)?;
            let value = Bimodule::new(a, *dim, left, right).map_err(fail)?;
            Item::Bimodule { algebra: algebra.clone(), value }
        }
        RawObject::LeftModule { algebra, dim, left, .. } => {
            let a = ws.algebra_ref(owner, algebra)?;
            let left = matrices(owner, "left", left, a.dim(), *dim)?;
            let value = LeftModule::new(a, *dim, left).map_err(fail)?;
            Item::LeftModule { algebra: algebra.clone(), value }
        }
        RawObject::Calculus { bimodule, differential, .. } => {
            let m = ws.bimodule_ref(owner, bimodule)?;
            let d = matrix(owner, "differential", differential, m.dim(), m.algebra().dim())?;
            Item::Calculus { bimodule: bimodule.clone(), value: DifferentialCalculus::new(m, d).map_err(fail)? }
        }
        RawObject::CartanPair { bimodule, actions, .. } => {
            let m = ws.bimodule_ref(owner, bimodule)?;
            let n = m.algebra().dim();
            let actions = matrices(owner, "actions", actions, m.dim(), n)?;
            Item::Pair { bimodule: bimodule.clone(), value: CartanPair::new(m, actions).map_err(fail)? }
        }
        RawObject::Connection { calculus, module, matrix: raw_matrix, .. } => {
            let c = match ws.get(calculus) {
                Some(Item::Calculus { value, .. }) => value.clone(),
                _ => return Err(LoadError::new(owner, format!("unknown calculus {calculus:?}"))),
            };
            let e = match ws.get(module) {
                Some(Item::LeftModule { value, .. }) => value.clone(),
                _ => return Err(LoadError::new(owner, format!("unknown left_module {module:?}"))),
            };
            let t = ncwb_core::algebra::tensor_over_a(c.bimodule(), &e).map_err(fail)?;
            let m = matrix(owner, "matrix", raw_matrix, t.dim(), e.dim())?;
            let value = Connection::new(c, e, m).map_err(fail)?;
            Item::Connection { calculus: calculus.clone(), module: module.clone(), value }
        }
        RawObject::BimoduleMap { source, target, matrix: raw_matrix, .. } => {
            let s = ws.bimodule_ref(owner, source)?;
            let t = ws.bimodule_ref(owner, target)?;
            let m = matrix(owner, "matrix", raw_matrix, t.dim(), s.dim())?;
            let value = BimoduleMap::new(s, t, m).map_err(fail)?;
            Item::BimoduleMap { source: source.clone(), target: target.clone(), value }
        }
        RawObject::OperatorAlgebra { pair, generators, basis, .. } => {
            let p = ws.pair_ref(owner, pair)?;
            let n = p.algebra().dim();
            let basis = matrices(owner, "basis", basis, basis.len(), n)?;
            Item::OperatorAlgebra { pair: pair.clone(), generators: generators.clone(), basis }
        }
        RawObject::Relations { pair, max_len, words, image_dim, relations, .. } => {
            let p = ws.pair_ref(owner, pair)?;
            let a = p.algebra();
            let fields = p.bimodule().dim();
            let mut parsed = Vec::with_capacity(relations.len());
            for (r, terms) in relations.iter().enumerate() {
                let mut w = FreeWord::zero();
                for (t, term) in terms.iter().enumerate() {
                    let c = rational(owner, &format!("relations[{r}][{t}].coeff"), &term.coeff)?;
                    let letters = term
                        .word
                        .iter()
                        .map(|s| parse_letter(owner, a, fields, s))
                        .collect::<Result<Vec<_>, _>>()?;
                    w = w.add(&FreeWord::from_letters(a, &letters).scale(&c));
                }
                parsed.push(w);
            }
            Item::Relations(RelationsItem {
                pair: pair.clone(),
                max_len: *max_len,
                words: *words,
                image_dim: *image_dim,
                relations: parsed,
            })
        }
        RawObject::Builtin { .. } => unreachable!("builtins are expanded by the loader"),
    })
}

pub fn item_to_raw(name: &str, item: &Item) -> RawObject {
    let name = name.to_string();
    match item {
        Item::Algebra(a) => {
            let n = a.dim();
            RawObject::Algebra {
                name,
                basis: a.names().to_vec(),
                unit: a.unit().iter().map(format_rational).collect(),
                products: (0..n)
                    .map(|i| (0..n).map(|j| a.product_of_basis(i, j).iter().map(format_rational).collect()).collect())
                    .collect(),
            }
        }
        Item::Bimodule { algebra, value } => RawObject::Bimodule {
            name,
            algebra: algebra.clone(),
            dim: value.dim(),
            left: value.left_matrices().iter().map(matrix_to_raw).collect(),
            right: value.right_matrices().iter().map(matrix_to_raw).collect(),
        },
        Item::LeftModule { algebra, value } => RawObject::LeftModule {
            name,
            algebra: algebra.clone(),
            dim: value.dim(),
            left: value.left_matrices().iter().map(matrix_to_raw).collect(),
        },
        Item::Calculus { bimodule, value } => RawObject::Calculus {
            name,
            bimodule: bimodule.clone(),
            differential: matrix_to_raw(value.differential()),
        },
        Item::Pair { bimodule, value } => RawObject::CartanPair {
            name,
            bimodule: bimodule.clone(),
            actions: value.actions().iter().map(matrix_to_raw).collect(),
        },
        Item::Connection { calculus, module, value } => RawObject::Connection {
            name,
            calculus: calculus.clone(),
            module: module.clone(),
            matrix: matrix_to_raw(value.matrix()),
        },
        Item::BimoduleMap { source, target, value } => RawObject::BimoduleMap {
            name,
            source: source.clone(),
            target: target.clone(),
            matrix: matrix_to_raw(value.matrix()),
        },
        Item::OperatorAlgebra { pair, generators, basis } => RawObject::OperatorAlgebra {
            name,
            pair: pair.clone(),
            generators: generators.clone(),
            basis: basis.iter().map(matrix_to_raw).collect(),
        },
        Item::Relations(r) => unreachable!("relations need their algebra; use relations_to_raw for {name} on {}", r.pair),
    }
}

pub fn relations_to_raw(name: &str, r: &RelationsItem, a: &Algebra) -> RawObject {
    RawObject::Relations {
        name: name.to_string(),
        pair: r.pair.clone(),
        max_len: r.max_len,
        words: r.words,
        image_dim: r.image_dim,
        relations: r.relations.iter().map(|w| word_to_raw(a, w)).collect(),
    }
}

impl Workspace {
    /// The algebra an item lives over, following references for operator records.
    pub fn algebra_of(&self, item: &Item) -> Arc<Algebra> {
        match item {
            Item::OperatorAlgebra { pair, .. } => self.get(pair).expect("resolved").algebra().clone(),
            Item::Relations(r) => self.get(&r.pair).expect("resolved").algebra().clone(),
            other => other.algebra().clone(),
        }
    }

    pub fn raw_item(&self, i: usize) -> RawObject {
        let (name, item) = &self.items[i];
        match item {
            Item::Relations(r) => relations_to_raw(name, r, &self.algebra_of(item)),
            other => item_to_raw(name, other),
        }
    }

    /// The canonical document for this workspace; builtins stay references.
    pub fn export(&self) -> Document {
        let objects = self
            .declarations
            .iter()
            .map(|d| match &d.builtin {
                Some((b, params)) => RawObject::Builtin {
                    name: d.name.clone(),
                    builtin: b.clone(),
                    params: format_params(params),
                },
                None => self.raw_item(d.members[0]),
            })
            .collect();
        Document { schema: SCHEMA.to_string(), objects, summary: self.summary.clone() }
    }

    /// A self-contained document holding the given items and their
    /// dependencies, all written out explicitly.
    pub fn export_items(&self, roots: &[usize], summary: Option<Value>) -> Document {
        let objects = self.closure(roots).into_iter().map(|i| self.raw_item(i)).collect();
        Document { schema: SCHEMA.to_string(), objects, summary }
    }
}
