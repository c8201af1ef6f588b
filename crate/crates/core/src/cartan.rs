//! Right Cartan pairs, their duality with first-order calculi, and the
//! co-universal pair.
//!
//! A right Cartan pair is a bimodule `N` with an action `X -> X^d` of `N` on
//! `A` by linear endomorphisms such that
//!
//! * `(f.X)^d(g) = f X^d(g)`, and
//! * `X^d(fg) = X^d(f) g + (X.f)^d(g)`.
//!
//! Every calculus `(M, d)` yields the pair `(M*, X -> <X, d(.)>)` on its right
//! dual; every pair yields a calculus valued in the left dual `*N`.

use std::sync::Arc;

use num_traits::Zero;

use crate::algebra::{
    bimodule_map_system, double_dual_map, left_dual, right_dual, transpose, Algebra, Bimodule,
    BimoduleMap, DualBimodule,
};
use crate::calculus::{
    factor_through_universal, is_spanned_by_differential, universal_calculus, DifferentialCalculus,
    UniversalCalculus,
};
use crate::error::{Error, Result};
use crate::linalg::{kernel, zero_vec, Matrix, Rational, Subspace, Vector};
use crate::report::{Law, Report};

/// A bimodule together with one `n x n` endomorphism of `A` per basis element.
///
/// The axioms are not enforced on construction; use [`check_cartan`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanPair {
    bimodule: Bimodule,
    actions: Vec<Matrix>,
}

impl CartanPair {
    pub fn new(bimodule: Bimodule, actions: Vec<Matrix>) -> Result<Self> {
        let n = bimodule.algebra().dim();
        if actions.len() != bimodule.dim() {
            return Err(Error::Dimension(format!(
                "{} action matrices for a {}-dimensional bimodule",
                actions.len(),
                bimodule.dim()
            )));
        }
        if actions.iter().any(|m| m.rows() != n || m.cols() != n) {
            return Err(Error::Dimension(format!("actions must be {n}x{n}")));
        }
        Ok(CartanPair { bimodule, actions })
    }

    pub fn zero(bimodule: Bimodule) -> Self {
        let n = bimodule.algebra().dim();
        let actions = vec![Matrix::zeros(n, n); bimodule.dim()];
        CartanPair { bimodule, actions }
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        self.bimodule.algebra()
    }

    pub fn bimodule(&self) -> &Bimodule {
        &self.bimodule
    }

    pub fn actions(&self) -> &[Matrix] {
        &self.actions
    }

    pub fn basis_action(&self, k: usize) -> &Matrix {
        &self.actions[k]
    }

    /// `X^d` for `X` given in coordinates; linear in `X`.
    pub fn action(&self, x: &[Rational]) -> Matrix {
        assert_eq!(x.len(), self.actions.len(), "field coordinates");
        let n = self.algebra().dim();
        let mut out = Matrix::zeros(n, n);
        for (c, m) in x.iter().zip(&self.actions) {
            if !c.is_zero() {
                out = &out + &m.scale(c);
            }
        }
        out
    }

    /// The map `N -> End(A)`, as an `n^2 x dim N` matrix of flattened actions.
    pub fn action_map(&self) -> Matrix {
        let n = self.algebra().dim();
        let cols: Vec<Vector> = self.actions.iter().map(|m| m.as_slice().to_vec()).collect();
        Matrix::from_columns(n * n, &cols)
    }
}

/// Every violated instance of the Cartan axioms and of `X^d(1) = 0`.
pub fn check_cartan(p: &CartanPair) -> Report {
    let a = p.algebra();
    let nb = p.bimodule();
    let n = a.dim();
    let mut report = Report::new();
    for i in 0..n {
        for k in 0..nb.dim() {
            // (e_i.X_k)^d versus e_i X_k^d, compared column by column
            let lhs = p.action(&nb.left_basis(i).column(k));
            let rhs = a.left_mult_basis(i) * &p.actions[k];
            for j in 0..n {
                report.expect_eq(Law::CartanLeftLinear, &[i, k, j], &lhs.column(j), &rhs.column(j));
            }
        }
    }
    for k in 0..nb.dim() {
        let xk = &p.actions[k];
        for i in 0..n {
            let xi = xk.column(i);
            let shifted = p.action(&nb.right_basis(i).column(k));
            for j in 0..n {
                let lhs = xk.mul_vec(a.product_of_basis(i, j));
                let first = a.right_mult_basis(j).mul_vec(&xi);
                let rhs: Vector = first.iter().zip(shifted.column(j)).map(|(x, y)| x + y).collect();
                report.expect_eq(Law::CartanTwistedLeibniz, &[k, i, j], &lhs, &rhs);
            }
        }
        let at_unit = xk.mul_vec(a.unit());
        report.expect_eq(Law::CartanUnit, &[k], &at_unit, &zero_vec(n));
    }
    report
}

/// A pair obtained from a calculus, remembering the right dual it lives on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedPair {
    pub pair: CartanPair,
    pub dual: DualBimodule,
}

/// The right partial derivatives `X^d(f) = <X, df>` on `M*`.
pub fn pair_from_calculus(c: &DifferentialCalculus) -> DerivedPair {
    let dual = right_dual(c.bimodule());
    let actions = (0..dual.dim())
        .map(|k| &dual.basis_evaluation(k) * c.differential())
        .collect();
    let pair = CartanPair::new(dual.bimodule().clone(), actions).expect("action shapes");
    DerivedPair { pair, dual }
}

/// A calculus obtained from a pair, remembering the left dual it is valued in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedCalculus {
    pub calculus: DifferentialCalculus,
    pub dual: DualBimodule,
}

/// `d f` is the element of `*N` evaluating to `X^d(f)` at each `X`.
///
/// Returns `None` when some `d f` is not left linear, which happens exactly
/// when the pair violates `(f.X)^d = f X^d`.
pub fn calculus_from_pair(p: &CartanPair) -> Option<DerivedCalculus> {
    let dual = left_dual(p.bimodule());
    let a = p.algebra();
    let n = a.dim();
    let cols = (0..n)
        .map(|j| {
            let evals: Vec<Vector> = p.actions.iter().map(|x| x.column(j)).collect();
            dual.coordinates(&Matrix::from_columns(n, &evals))
        })
        .collect::<Option<Vec<_>>>()?;
    let differential = Matrix::from_columns(dual.dim(), &cols);
    let calculus = DifferentialCalculus::new(dual.bimodule().clone(), differential).expect("shapes");
    Some(DerivedCalculus { calculus, dual })
}

/// Fields acting as zero.
pub fn action_kernel(p: &CartanPair) -> Subspace {
    kernel(&p.action_map())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpanningDiagnostic {
    /// `*N` is generated as a bimodule by the image of `d`.
    pub spanned: bool,
    pub trivial_kernel: bool,
}

impl SpanningDiagnostic {
    pub fn agree(&self) -> bool {
        self.spanned == self.trivial_kernel
    }
}

/// Both sides of the spanning/kernel criterion, reported without asserting
/// that they agree.
pub fn spanning_kernel_diagnostic(p: &CartanPair) -> Option<SpanningDiagnostic> {
    let derived = calculus_from_pair(p)?;
    Some(SpanningDiagnostic {
        spanned: is_spanned_by_differential(&derived.calculus),
        trivial_kernel: action_kernel(p).is_zero(),
    })
}

/// The pair dual to the universal calculus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoUniversalPair {
    pub universal: UniversalCalculus,
    pub derived: DerivedPair,
}

impl CoUniversalPair {
    pub fn pair(&self) -> &CartanPair {
        &self.derived.pair
    }

    pub fn dim(&self) -> usize {
        self.derived.dual.dim()
    }
}

pub fn co_universal_pair(a: &Arc<Algebra>) -> CoUniversalPair {
    let universal = universal_calculus(a);
    let derived = pair_from_calculus(universal.calculus());
    CoUniversalPair { universal, derived }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorizationStatus {
    Unique,
    /// No bimodule map intertwines the actions.
    Absent,
    /// The affine solution space has this positive dimension.
    NotUnique(usize),
}

#[derive(Clone, Debug)]
pub struct CoUniversalFactorization {
    pub status: FactorizationStatus,
    /// Present only when the solution is unique.
    pub map: Option<BimoduleMap>,
}

/// Solves for the bimodule map `Phi : N -> X_u(A)` with `d_u . Phi = d`.
///
/// The action `d_u : X_u(A) -> End(A)` is computed once. When it is injective
/// the action constraints alone pin `Phi` down column by column and the
/// bimodule-map laws are then verified on that single candidate; otherwise the
/// combined affine system is solved.
pub fn co_universal_factorization(p: &CartanPair, co: &CoUniversalPair) -> Result<CoUniversalFactorization> {
    if !p.bimodule().same_algebra(co.pair().bimodule()) {
        return Err(Error::AlgebraMismatch);
    }
    let target = co.pair().bimodule();
    let source = p.bimodule();
    let du = co.pair().action_map();
    if kernel(&du).is_zero() {
        let mut cols = Vec::with_capacity(source.dim());
        for x in p.actions() {
            match crate::linalg::solve(&du, x.as_slice())? {
                Some(y) => cols.push(y),
                None => return Ok(CoUniversalFactorization { status: FactorizationStatus::Absent, map: None }),
            }
        }
        let phi = BimoduleMap::new(source.clone(), target.clone(), Matrix::from_columns(target.dim(), &cols))?;
        if !phi.check().is_empty() {
            return Ok(CoUniversalFactorization { status: FactorizationStatus::Absent, map: None });
        }
        return Ok(CoUniversalFactorization { status: FactorizationStatus::Unique, map: Some(phi) });
    }
    Ok(factorization_by_solving(p, co))
}

pub(crate) fn factorization_by_solving(p: &CartanPair, co: &CoUniversalPair) -> CoUniversalFactorization {
    let target = co.pair().bimodule();
    let source = p.bimodule();
    let du = co.pair().action_map();
    let (rows, cols) = (target.dim(), source.dim());
    let mut system = bimodule_map_system(source, target);
    // du . Phi = action map of p
    let want = p.action_map();
    for r in 0..du.rows() {
        for k in 0..cols {
            let terms: Vec<(usize, Rational)> = (0..rows)
                .filter(|&j| !du.get(r, j).is_zero())
                .map(|j| (j * cols + k, du.get(r, j).clone()))
                .collect();
            system.sparse_equation(&terms, want.get(r, k).clone());
        }
    }
    match system.solve() {
        None => CoUniversalFactorization { status: FactorizationStatus::Absent, map: None },
        Some((x, space)) if space.is_zero() => {
            let m = Matrix::from_vec(rows, cols, x).expect("shape");
            let phi = BimoduleMap::new(source.clone(), target.clone(), m).expect("shape");
            CoUniversalFactorization { status: FactorizationStatus::Unique, map: Some(phi) }
        }
        Some((_, space)) => CoUniversalFactorization { status: FactorizationStatus::NotUnique(space.dim()), map: None },
    }
}

/// `Phi` for a calculus-derived pair, computed the other way: as the transpose
/// of the comparison map `Omega_u -> M`.
pub fn transpose_of_comparison(c: &DifferentialCalculus, derived: &DerivedPair, co: &CoUniversalPair) -> Result<BimoduleMap> {
    let f = factor_through_universal(c, &co.universal)?;
    transpose(&f.phi, &co.derived.dual, &derived.dual)
}

/// Outcome of going calculus -> pair -> calculus.
#[derive(Clone, Debug)]
pub struct RoundtripReport {
    pub dual_dim: usize,
    pub double_dual_dim: usize,
    /// The canonical map `M -> *(M*)`.
    pub canonical: BimoduleMap,
    pub injective: bool,
    pub surjective: bool,
    pub is_bimodule_map: bool,
    /// `canonical . d = d'` where `d'` is the differential recovered from the pair.
    pub intertwines_differentials: bool,
}

impl RoundtripReport {
    pub fn is_isomorphism(&self) -> bool {
        self.injective && self.surjective
    }
}

pub fn reflexive_roundtrip(c: &DifferentialCalculus) -> RoundtripReport {
    let derived = pair_from_calculus(c);
    let back = calculus_from_pair(&derived.pair).expect("pairs from calculi are left linear");
    let canonical = double_dual_map(&derived.dual, &back.dual).expect("left dual of the right dual");
    let rank = canonical.matrix().rank();
    let intertwines = &(canonical.matrix() * c.differential()) == back.calculus.differential();
    RoundtripReport {
        dual_dim: derived.dual.dim(),
        double_dual_dim: back.dual.dim(),
        injective: rank == c.bimodule().dim(),
        surjective: rank == back.dual.dim(),
        is_bimodule_map: canonical.check().is_empty(),
        canonical,
        intertwines_differentials: intertwines,
    }
}

/// `X^d(fg) - X^d(f) g - f X^d(g)` for all basis triples; all zero exactly
/// when every field acts by an ordinary derivation.
pub fn plain_leibniz_defects(p: &CartanPair) -> Vec<(usize, usize, usize, Vector)> {
    let a = p.algebra();
    let n = a.dim();
    let mut out = Vec::new();
    for (k, x) in p.actions.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                let lhs = x.mul_vec(a.product_of_basis(i, j));
                let t1 = a.right_mult_basis(j).mul_vec(&x.column(i));
                let t2 = a.left_mult_basis(i).mul_vec(&x.column(j));
                let d: Vector = lhs.iter().zip(t1.iter().zip(&t2)).map(|(l, (p, q))| l - p - q).collect();
                if d.iter().any(|v| !v.is_zero()) {
                    out.push((k, i, j, d));
                }
            }
        }
    }
    out
}
