//! Differential operators of a Cartan pair.
//!
//! The operators are generated inside `End(A)` by the left multiplications
//! `f^l` and the actions `X^d`. Formal words in the free product of `A` with
//! the tensor algebra of `N` map onto them by `mu`; the relations
//! `(f.X)^d = f^l X^d` and `X^d f^l = (X.f)^d + (X^d(f))^l` hold in the image.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::algebra::Algebra;
use crate::cartan::CartanPair;
use crate::linalg::{axpy, is_zero_vec, Matrix, Rational, RowEchelon, Subspace, Vector};
use crate::report::{Law, Report};

/// A basis letter: `A(i)` is `e_i` (never the unit pivot), `M(k)` is the field `X_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    A(usize),
    M(usize),
}

impl Letter {
    pub fn is_algebra(self) -> bool {
        matches!(self, Letter::A(_))
    }
}

/// A finite linear combination of words with no two adjacent algebra letters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeWord {
    terms: BTreeMap<Vec<Letter>, Rational>,
}

impl FreeWord {
    pub fn zero() -> Self {
        FreeWord::default()
    }

    /// The empty word, i.e. the shared unit.
    pub fn one() -> Self {
        FreeWord::monomial(Vec::new(), Rational::one())
    }

    fn monomial(word: Vec<Letter>, c: Rational) -> Self {
        let mut w = FreeWord::zero();
        w.add_term(word, c);
        w
    }

    /// `X` as a combination of module letters.
    pub fn module(x: &[Rational]) -> Self {
        let mut w = FreeWord::zero();
        for (k, c) in x.iter().enumerate() {
            w.add_term(vec![Letter::M(k)], c.clone());
        }
        w
    }

    pub fn module_letter(k: usize) -> Self {
        FreeWord::monomial(vec![Letter::M(k)], Rational::one())
    }

    /// `f` as a combination of the unit and non-unit algebra letters.
    pub fn algebra(a: &Algebra, f: &[Rational]) -> Self {
        let mut w = FreeWord::zero();
        for (word, c) in algebra_letters(a, f) {
            w.add_term(word, c);
        }
        w
    }

    pub fn algebra_letter(a: &Algebra, i: usize) -> Self {
        FreeWord::algebra(a, &a.basis(i))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Letter], &Rational)> {
        self.terms.iter().map(|(w, c)| (w.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, word: &[Letter]) -> Rational {
        self.terms.get(word).cloned().unwrap_or_else(Rational::zero)
    }

    /// Length of the longest word.
    pub fn max_len(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Adds `c` times an already canonical word.
    fn add_term(&mut self, word: Vec<Letter>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &FreeWord) -> FreeWord {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &FreeWord) -> FreeWord {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> FreeWord {
        let mut out = FreeWord::zero();
        for (w, x) in &self.terms {
            out.add_term(w.clone(), x * c);
        }
        out
    }

    /// The product `self * other` in the free product; adjacent algebra
    /// letters are multiplied out.
    pub fn mul(&self, other: &FreeWord, a: &Algebra) -> FreeWord {
        let mut out = FreeWord::zero();
        for (v, cv) in &other.terms {
            let mut acc = self.scale(cv);
            for &l in v {
                acc = append_letter(a, &acc, l);
            }
            out = out.add(&acc);
        }
        out
    }

    /// Canonicalizes an arbitrary letter sequence, merging adjacent algebra
    /// letters and rewriting the unit pivot.
    pub fn from_letters(a: &Algebra, letters: &[Letter]) -> FreeWord {
        let mut acc = FreeWord::one();
        for &l in letters {
            acc = append_letter(a, &acc, l);
        }
        acc
    }

    pub fn display<'a>(&'a self, a: &'a Algebra) -> impl fmt::Display + 'a {
        WordDisplay { word: self, algebra: a }
    }
}

struct WordDisplay<'a> {
    word: &'a FreeWord,
    algebra: &'a Algebra,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_zero() {
            return write!(f, "0");
        }
        for (t, (w, c)) in self.word.terms.iter().enumerate() {
            if t > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            if w.is_empty() {
                write!(f, "*1")?;
            }
            for l in w {
                write!(f, "*{}", letter_name(self.algebra, *l))?;
            }
        }
        Ok(())
    }
}

pub fn letter_name(a: &Algebra, l: Letter) -> String {
    match l {
        Letter::A(i) => a.names()[i].clone(),
        Letter::M(k) => format!("X{k}"),
    }
}

/// `f = lambda 1 + sum_{i != p} c_i e_i` with `p` the unit pivot.
fn algebra_letters(a: &Algebra, f: &[Rational]) -> Vec<(Vec<Letter>, Rational)> {
    let p = a.unit_pivot().expect("algebra with a unit");
    let u = a.unit();
    let lambda = &f[p] / &u[p];
    let mut out = vec![(Vec::new(), lambda.clone())];
    for i in 0..a.dim() {
        if i == p {
            continue;
        }
        let c = &f[i] - &lambda * &u[i];
        out.push((vec![Letter::A(i)], c));
    }
    out
}

fn append_letter(a: &Algebra, w: &FreeWord, l: Letter) -> FreeWord {
    match l {
        Letter::M(_) => {
            let mut out = FreeWord::zero();
            for (v, c) in &w.terms {
                let mut v = v.clone();
                v.push(l);
                out.add_term(v, c.clone());
            }
            out
        }
        Letter::A(i) => append_algebra(a, w, &a.basis(i)),
    }
}

fn append_algebra(a: &Algebra, w: &FreeWord, f: &[Rational]) -> FreeWord {
    let mut out = FreeWord::zero();
    for (v, c) in &w.terms {
        let (prefix, g) = match v.last() {
            Some(&Letter::A(j)) => (&v[..v.len() - 1], a.mul(&a.basis(j), f)),
            _ => (&v[..], f.to_vec()),
        };
        for (tail, x) in algebra_letters(a, &g) {
            if x.is_zero() {
                continue;
            }
            let mut word = prefix.to_vec();
            word.extend(tail);
            out.add_term(word, c * x);
        }
    }
    out
}

/// `g -> f g`.
pub fn left_mult_op(a: &Algebra, f: &[Rational]) -> Matrix {
    a.left_mult(f)
}

/// `X^d` for `X` in coordinates.
pub fn action_op(p: &CartanPair, x: &[Rational]) -> Matrix {
    p.action(x)
}

fn letter_op(p: &CartanPair, l: Letter) -> &Matrix {
    match l {
        Letter::A(i) => p.algebra().left_mult_basis(i),
        Letter::M(k) => p.basis_action(k),
    }
}

/// The representation `mu` of words by composition of operators.
pub fn evaluate_mu(p: &CartanPair, w: &FreeWord) -> Matrix {
    let n = p.algebra().dim();
    let mut out = Matrix::zeros(n, n);
    for (word, c) in &w.terms {
        let mut m = Matrix::identity(n);
        for &l in word {
            m = &m * letter_op(p, l);
        }
        out = &out + &m.scale(c);
    }
    out
}

/// What a generator of the operator algebra is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    Identity,
    LeftMult(usize),
    Action(usize),
}

/// A subalgebra of `End(A)`, with `End(A)` flattened row-major.
#[derive(Clone, Debug)]
pub struct OperatorSubalgebra {
    pub ambient: usize,
    pub basis: Subspace,
    /// Generators that enlarged the span when first added, in order.
    pub generator_log: Vec<Generator>,
}

impl OperatorSubalgebra {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        self.basis.contains(m.as_slice())
    }

    pub fn basis_matrices(&self) -> Vec<Matrix> {
        self.basis
            .basis()
            .iter()
            .map(|v| Matrix::from_vec(self.ambient, self.ambient, v.clone()).expect("square"))
            .collect()
    }
}

/// The algebra generated by `id`, every `e_i^l` and every `X_k^d`.
pub fn generate_diffop_algebra(p: &CartanPair) -> OperatorSubalgebra {
    let a = p.algebra();
    let n = a.dim();
    let mut gens: Vec<(Generator, &Matrix)> = (0..n).map(|i| (Generator::LeftMult(i), a.left_mult_basis(i))).collect();
    gens.extend(p.actions().iter().enumerate().map(|(k, m)| (Generator::Action(k), m)));

    let mut ech = RowEchelon::new(n * n);
    let mut queue: Vec<Matrix> = Vec::new();
    let mut log = Vec::new();
    let id = Matrix::identity(n);
    if ech.insert(id.as_slice().to_vec()) {
        log.push(Generator::Identity);
        queue.push(id);
    }
    for (g, m) in &gens {
        if ech.insert(m.as_slice().to_vec()) {
            log.push(*g);
            queue.push((*m).clone());
        }
    }
    while let Some(v) = queue.pop() {
        for (_, g) in &gens {
            let w = *g * &v;
            if ech.insert(w.as_slice().to_vec()) {
                queue.push(w);
            }
        }
    }
    OperatorSubalgebra { ambient: n, basis: ech.into_subspace(), generator_log: log }
}

/// Rewriting statistics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NormalFormStats {
    /// Applications of `X f -> (X.f) + X(f)`.
    pub steps: usize,
}

/// Position of the first module letter immediately followed by an algebra letter.
fn first_redex(word: &[Letter]) -> Option<usize> {
    word.windows(2).position(|w| matches!((w[0], w[1]), (Letter::M(_), Letter::A(_))))
}

pub fn is_normal(w: &FreeWord) -> bool {
    w.terms.keys().all(|word| first_redex(word).is_none())
}

/// Moves every algebra letter to the front with `X f -> (X.f) + X(f)`.
///
/// Terms end up as `f X_1 ... X_k` with at most one leading algebra letter.
pub fn normal_form(p: &CartanPair, w: &FreeWord) -> FreeWord {
    normal_form_with_stats(p, w).0
}

pub fn normal_form_with_stats(p: &CartanPair, w: &FreeWord) -> (FreeWord, NormalFormStats) {
    let a = p.algebra();
    let nb = p.bimodule();
    let mut stats = NormalFormStats::default();
    let mut done = FreeWord::zero();
    let mut pending = w.clone();
    while !pending.is_zero() {
        let mut next = FreeWord::zero();
        for (word, c) in &pending.terms {
            let Some(j) = first_redex(word) else {
                done.add_term(word.clone(), c.clone());
                continue;
            };
            stats.steps += 1;
            let (Letter::M(k), Letter::A(i)) = (word[j], word[j + 1]) else { unreachable!() };
            let prefix = FreeWord::monomial(word[..j].to_vec(), c.clone());
            let suffix = &word[j + 2..];
            // (X_k . e_i) as module letters
            let shifted = nb.right_basis(i).column(k);
            let mut t1 = FreeWord::zero();
            for (l, x) in shifted.iter().enumerate() {
                if !x.is_zero() {
                    t1 = t1.add(&append_letter(a, &prefix, Letter::M(l)).scale(x));
                }
            }
            // X_k(e_i) re-enters as an algebra element
            let t2 = append_algebra(a, &prefix, &p.basis_action(k).column(i));
            for mut t in [t1, t2] {
                for &l in suffix {
                    t = append_letter(a, &t, l);
                }
                next = next.add(&t);
            }
        }
        pending = next;
    }
    (done, stats)
}

/// Every normal-form word of length at most `max_len`, shortest first.
pub fn normal_words(a: &Algebra, fields: usize, max_len: usize) -> Vec<Vec<Letter>> {
    let p = a.unit_pivot().expect("algebra with a unit");
    let leads: Vec<Option<usize>> = std::iter::once(None).chain((0..a.dim()).filter(|&i| i != p).map(Some)).collect();
    let mut out = Vec::new();
    for len in 0..=max_len {
        for lead in &leads {
            if lead.is_some() && len == 0 {
                continue;
            }
            let tail = len - usize::from(lead.is_some());
            let mut tails: Vec<Vec<Letter>> = vec![Vec::new()];
            for _ in 0..tail {
                tails = tails
                    .into_iter()
                    .flat_map(|t| {
                        (0..fields).map(move |k| {
                            let mut t = t.clone();
                            t.push(Letter::M(k));
                            t
                        })
                    })
                    .collect();
            }
            for t in tails {
                let mut w: Vec<Letter> = lead.map(Letter::A).into_iter().collect();
                w.extend(t);
                out.push(w);
            }
        }
    }
    out
}

/// A basis of `ker mu` on the span of normal-form words up to a length.
#[derive(Clone, Debug)]
pub struct RelationSet {
    pub max_len: usize,
    pub words: Vec<Vec<Letter>>,
    /// Each relation is `w - (combination of earlier independent words)`.
    pub relations: Vec<FreeWord>,
    /// Dimension of `mu` of the word span.
    pub image_dim: usize,
    leaders: BTreeMap<Vec<Letter>, usize>,
    enumerated: BTreeMap<Vec<Letter>, ()>,
}

impl RelationSet {
    pub fn kernel_dim(&self) -> usize {
        self.relations.len()
    }

    /// Whether a combination of enumerated words lies in the span of the relations.
    pub fn contains(&self, w: &FreeWord) -> bool {
        let mut rest = w.clone();
        if rest.terms.keys().any(|word| !self.enumerated.contains_key(word)) {
            return false;
        }
        for (word, c) in w.terms.iter() {
            if let Some(&r) = self.leaders.get(word) {
                rest = rest.sub(&self.relations[r].scale(c));
            }
        }
        rest.is_zero()
    }
}

/// Relations among the operators of normal-form words of length `<= max_len`.
pub fn find_relations(p: &CartanPair, max_len: usize) -> RelationSet {
    let a = p.algebra();
    let n = a.dim();
    let words = normal_words(a, p.bimodule().dim(), max_len);
    // rows kept in insertion order: each is reduced against the earlier ones
    let mut rows: Vec<(usize, Vector, FreeWord)> = Vec::new();
    let mut relations = Vec::new();
    let mut leaders = BTreeMap::new();
    let mut cache: BTreeMap<Vec<Letter>, Matrix> = BTreeMap::new();
    cache.insert(Vec::new(), Matrix::identity(n));
    for word in &words {
        let m = match word.split_last() {
            None => Matrix::identity(n),
            Some((&last, init)) => &cache[init] * letter_op(p, last),
        };
        let mut v = m.as_slice().to_vec();
        if word.len() < max_len {
            cache.insert(word.clone(), m);
        }
        let mut combo = FreeWord::monomial(word.clone(), Rational::one());
        for (piv, row, row_combo) in &rows {
            if v[*piv].is_zero() {
                continue;
            }
            let f = v[*piv].clone();
            axpy(&mut v, &-f.clone(), row);
            combo = combo.sub(&row_combo.scale(&f));
        }
        match v.iter().position(|x| !x.is_zero()) {
            None => {
                leaders.insert(word.clone(), relations.len());
                relations.push(combo);
            }
            Some(piv) => {
                let inv = v[piv].recip();
                let v: Vector = v.iter().map(|x| x * &inv).collect();
                rows.push((piv, v, combo.scale(&inv)));
            }
        }
    }
    debug_assert!(rows.iter().all(|(_, v, _)| !is_zero_vec(v)));
    let enumerated = words.iter().map(|w| (w.clone(), ())).collect();
    RelationSet { max_len, image_dim: rows.len(), words, relations, leaders, enumerated }
}

/// The commutation data of one basis pair `(e_i, X_k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CcrEntry {
    pub f: usize,
    pub x: usize,
    /// `e_i.X_k = X_k.e_i`.
    pub central: bool,
    /// `[X_k^d, e_i^l] = (X_k(e_i))^l`.
    pub commutator_holds: bool,
    /// `X_k^d e_i^l = (X_k.e_i)^d + (X_k(e_i))^l`.
    pub twisted_relation_holds: bool,
    /// `[X_k^d, e_i^l] - (X_k(e_i))^l`.
    pub commutator_defect: Matrix,
}

#[derive(Clone, Debug, Default)]
pub struct CcrReport {
    pub entries: Vec<CcrEntry>,
}

impl CcrReport {
    pub fn all_hold(&self) -> bool {
        self.entries.iter().all(|e| e.commutator_holds)
    }

    pub fn violations(&self) -> impl Iterator<Item = &CcrEntry> {
        self.entries.iter().filter(|e| !e.commutator_holds)
    }
}

pub fn check_ccr(p: &CartanPair) -> CcrReport {
    let a = p.algebra();
    let nb = p.bimodule();
    let mut entries = Vec::new();
    for k in 0..nb.dim() {
        let xk = p.basis_action(k);
        for i in 0..a.dim() {
            let fl = a.left_mult_basis(i);
            let xf = a.left_mult(&xk.column(i));
            let commutator = &(xk * fl) - &(fl * xk);
            let defect = &commutator - &xf;
            let shifted = p.action(&nb.right_basis(i).column(k));
            let twisted = (xk * fl) == (&shifted + &xf);
            entries.push(CcrEntry {
                f: i,
                x: k,
                central: nb.left_basis(i).column(k) == nb.right_basis(i).column(k),
                commutator_holds: defect.is_zero(),
                twisted_relation_holds: twisted,
                commutator_defect: defect,
            });
        }
    }
    CcrReport { entries }
}

/// `X_k(1) = 0` and `e_i^l(1) = e_i`.
pub fn fock_check(p: &CartanPair) -> Report {
    let a = p.algebra();
    let n = a.dim();
    let mut report = Report::new();
    for k in 0..p.bimodule().dim() {
        let v = p.basis_action(k).mul_vec(a.unit());
        report.expect_eq(Law::FockAnnihilation, &[k], &v, &vec![Rational::zero(); n]);
    }
    for i in 0..n {
        let v = a.left_mult_basis(i).mul_vec(a.unit());
        report.expect_eq(Law::FockCreation, &[i], &v, &a.basis(i));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Bimodule;
    use crate::builtins::{self, fixtures};
    use crate::cartan::check_cartan;
    use crate::linalg::rat;

    fn dual() -> (std::sync::Arc<Algebra>, CartanPair) {
        let b = builtins::dual_numbers();
        (b.algebra.clone(), b.pair.unwrap())
    }

    #[test]
    fn left_multiplication_ops() {
        let (a, _) = dual();
        assert_eq!(left_mult_op(&a, a.unit()), Matrix::identity(2));
        let xl = left_mult_op(&a, &a.basis(1));
        assert_eq!(xl, Matrix::from_i64(2, 2, &[0, 0, 1, 0]));
        assert!((&xl * &xl).is_zero());
    }

    #[test]
    fn action_op_is_linear() {
        let (_, p) = dual();
        assert_eq!(action_op(&p, &[rat(0)]), Matrix::zeros(2, 2));
        assert_eq!(action_op(&p, &[rat(2)]), action_op(&p, &[rat(1)]).scale(&rat(2)));
    }

    #[test]
    fn words_merge_algebra_letters() {
        let (a, _) = dual();
        let x = FreeWord::algebra_letter(&a, 1);
        assert!(x.mul(&x, &a).is_zero());
        let one = FreeWord::algebra(&a, a.unit());
        assert_eq!(one, FreeWord::one());
        let w = FreeWord::from_letters(&a, &[Letter::M(0), Letter::A(0), Letter::M(0)]);
        assert_eq!(w, FreeWord::from_letters(&a, &[Letter::M(0), Letter::M(0)]));
    }

    #[test]
    fn mu_of_simple_words() {
        let (a, p) = dual();
        let x = FreeWord::algebra_letter(&a, 1);
        let xo = FreeWord::module_letter(0);
        assert_eq!(evaluate_mu(&p, &x), left_mult_op(&a, &a.basis(1)));
        let w = xo.mul(&x, &a);
        assert_eq!(evaluate_mu(&p, &w), &action_op(&p, &[rat(1)]) * &left_mult_op(&a, &a.basis(1)));
        let ccr = xo.mul(&x, &a).sub(&x.mul(&xo, &a));
        assert_eq!(evaluate_mu(&p, &ccr), left_mult_op(&a, &a.basis(1)));
    }

    #[test]
    fn diffop_algebra_dimensions() {
        let (a, p) = dual();
        let zero = generate_diffop_algebra(&CartanPair::zero(Bimodule::zero(&a)));
        assert_eq!(zero.dim(), 2);
        let full = generate_diffop_algebra(&p);
        assert_eq!(full.dim(), 3);
        assert_eq!(full.generator_log, vec![Generator::Identity, Generator::LeftMult(1), Generator::Action(0)]);
        let k = builtins::truncated_poly(1).unwrap();
        assert_eq!(generate_diffop_algebra(k.pair.as_ref().unwrap()).dim(), 1);
    }

    #[test]
    fn normal_form_examples() {
        let (a, p) = dual();
        let x = FreeWord::algebra_letter(&a, 1);
        let xo = FreeWord::module_letter(0);
        let (nf, stats) = normal_form_with_stats(&p, &xo.mul(&x, &a));
        assert_eq!(nf, x);
        assert_eq!(stats.steps, 1);
        let already = x.mul(&xo, &a).mul(&xo, &a);
        assert_eq!(normal_form(&p, &already), already);
    }

    #[test]
    fn relations_of_dual_numbers() {
        let (a, p) = dual();
        let rel = find_relations(&p, 2);
        let xo = FreeWord::module_letter(0);
        assert!(rel.contains(&xo.mul(&xo, &a).sub(&xo)));
        let x = FreeWord::algebra_letter(&a, 1);
        let ccr = x.mul(&xo, &a).sub(&xo.mul(&x, &a)).add(&x);
        assert!(evaluate_mu(&p, &ccr).is_zero());
        assert!(rel.contains(&normal_form(&p, &ccr)));
        assert!(!rel.contains(&xo));
    }

    #[test]
    fn zero_pair_fields_are_relations() {
        let (a, _) = dual();
        let nb = fixtures::dual_numbers_pair_with_null_field();
        let zero = CartanPair::zero(nb.bimodule().clone());
        let rel = find_relations(&zero, 1);
        assert!(rel.contains(&FreeWord::module_letter(0)));
        assert!(rel.contains(&FreeWord::module_letter(1)));
        assert!(!rel.contains(&FreeWord::algebra_letter(&a, 1)));
    }

    #[test]
    fn ccr_and_fock() {
        let (_, p) = dual();
        assert!(check_ccr(&p).all_hold());
        assert!(fock_check(&p).is_empty());
        let q = builtins::quantum_plane_trunc(rat(2), 2).unwrap();
        let report = check_ccr(q.pair.as_ref().unwrap());
        assert!(!report.all_hold());
        assert!(report.entries.iter().all(|e| e.twisted_relation_holds));
        let v = fixtures::dual_numbers_vacuum_violation();
        assert!(fock_check(&v).has(Law::FockAnnihilation, &[0]));
        assert!(!check_cartan(&v).is_empty());
    }
}
