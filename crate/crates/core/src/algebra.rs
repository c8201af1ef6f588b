//! Finite-dimensional unital associative algebras given by structure
//! constants, their bimodules and left modules, bimodule maps, right and left
//! duals, and tensor products over the algebra.
//!
//! Conventions used throughout the crate:
//!
//! * elements are coordinate vectors in the fixed basis `e_0 .. e_{n-1}`;
//! * a bimodule stores, per basis element `e_i`, the matrix `L_i` of
//!   `m -> e_i.m` and the matrix `R_i` of `m -> m.e_i`;
//! * a dual element is an explicit `n x m` evaluation matrix `X : M -> A`.

use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{
    add_intertwining_equations, unit_vec, zero_vec, LinearSystem, Matrix, Rational, Subspace,
    Vector,
};
use crate::report::{Law, Report};

/// Unital associative algebra with `e_i e_j = sum_k c[i][j][k] e_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    names: Vec<String>,
    /// `products[i * n + j]` holds the coordinates of `e_i e_j`.
    products: Vec<Vector>,
    unit: Vector,
    left_mult: Vec<Matrix>,
    right_mult: Vec<Matrix>,
}

impl Algebra {
    /// Validating constructor: rejects anything that is not unital and associative.
    pub fn new(names: Vec<String>, products: Vec<Vector>, unit: Vector) -> Result<Self> {
        let a = Algebra::new_unchecked(names, products, unit)?;
        let report = check_algebra(&a);
        if report.is_empty() {
            Ok(a)
        } else {
            Err(Error::InvalidAlgebra(report))
        }
    }

    /// Only shape checks. Used for planted failures and by [`check_algebra`].
    pub fn new_unchecked(names: Vec<String>, products: Vec<Vector>, unit: Vector) -> Result<Self> {
        let n = names.len();
        if products.len() != n * n {
            return Err(Error::Dimension(format!(
                "{} products for a {n}-dimensional algebra",
                products.len()
            )));
        }
        if products.iter().any(|p| p.len() != n) || unit.len() != n {
            return Err(Error::Dimension("product or unit coordinates of wrong length".into()));
        }
        let mut left_mult = Vec::with_capacity(n);
        let mut right_mult = Vec::with_capacity(n);
        for i in 0..n {
            let left: Vec<Vector> = (0..n).map(|j| products[i * n + j].clone()).collect();
            let right: Vec<Vector> = (0..n).map(|j| products[j * n + i].clone()).collect();
            left_mult.push(Matrix::from_columns(n, &left));
            right_mult.push(Matrix::from_columns(n, &right));
        }
        Ok(Algebra { names, products, unit, left_mult, right_mult })
    }

    /// Builds from a closure giving the product of basis elements.
    pub fn from_fn<F>(names: Vec<String>, unit: Vector, product: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Vector,
    {
        let n = names.len();
        let products = (0..n * n).map(|ij| product(ij / n, ij % n)).collect();
        Algebra::new(names, products, unit)
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn unit(&self) -> &Vector {
        &self.unit
    }

    pub fn basis(&self, i: usize) -> Vector {
        unit_vec(self.dim(), i)
    }

    pub fn product_of_basis(&self, i: usize, j: usize) -> &Vector {
        &self.products[i * self.dim() + j]
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.products[i * self.dim() + j][k]
    }

    /// Matrix of `g -> e_i g`.
    pub fn left_mult_basis(&self, i: usize) -> &Matrix {
        &self.left_mult[i]
    }

    /// Matrix of `g -> g e_i`.
    pub fn right_mult_basis(&self, i: usize) -> &Matrix {
        &self.right_mult[i]
    }

    /// Matrix of `g -> f g`.
    pub fn left_mult(&self, f: &[Rational]) -> Matrix {
        combine(self.dim(), self.dim(), f, &self.left_mult)
    }

    /// Matrix of `g -> g f`.
    pub fn right_mult(&self, f: &[Rational]) -> Matrix {
        combine(self.dim(), self.dim(), f, &self.right_mult)
    }

    pub fn multiply(&self, f: &[Rational], g: &[Rational]) -> Result<Vector> {
        if f.len() != self.dim() || g.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "multiplying elements of length {} and {} in a {}-dimensional algebra",
                f.len(),
                g.len(),
                self.dim()
            )));
        }
        Ok(self.left_mult(f).mul_vec(g))
    }

    pub(crate) fn mul(&self, f: &[Rational], g: &[Rational]) -> Vector {
        self.multiply(f, g).expect("element length")
    }

    /// The multiplication map `A (x) A -> A`, with `e_a (x) e_b` at column `a * n + b`.
    pub fn multiplication_map(&self) -> Matrix {
        let n = self.dim();
        Matrix::from_columns(n, &self.products)
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| self.product_of_basis(i, j) == self.product_of_basis(j, i)))
    }

    /// Index of a basis element that together with `1` and the remaining basis
    /// vectors still spans `A`. `None` only for the zero algebra.
    pub fn unit_pivot(&self) -> Option<usize> {
        self.unit.iter().position(|x| !x.is_zero())
    }
}

/// Every failed associativity or unit instance; empty means the constants are valid.
pub fn check_algebra(a: &Algebra) -> Report {
    let n = a.dim();
    let mut report = Report::new();
    for i in 0..n {
        for j in 0..n {
            let ij = a.product_of_basis(i, j);
            for l in 0..n {
                let lhs = a.right_mult_basis(l).mul_vec(ij);
                let rhs = a.left_mult_basis(i).mul_vec(a.product_of_basis(j, l));
                report.expect_eq(Law::Associativity, &[i, j, l], &lhs, &rhs);
            }
        }
    }
    for i in 0..n {
        let e = a.basis(i);
        report.expect_eq(Law::LeftUnit, &[i], &a.left_mult(&a.unit).mul_vec(&e), &e);
        report.expect_eq(Law::RightUnit, &[i], &a.right_mult(&a.unit).mul_vec(&e), &e);
    }
    report
}

fn combine(rows: usize, cols: usize, coeffs: &[Rational], mats: &[Matrix]) -> Matrix {
    assert_eq!(coeffs.len(), mats.len(), "coordinate length");
    let mut out = Matrix::zeros(rows, cols);
    for (c, m) in coeffs.iter().zip(mats) {
        if !c.is_zero() {
            out = &out + &m.scale(c);
        }
    }
    out
}

/// Two-sided module over an algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bimodule {
    algebra: Arc<Algebra>,
    dim: usize,
    left: Vec<Matrix>,
    right: Vec<Matrix>,
}

impl Bimodule {
    pub fn new(algebra: Arc<Algebra>, dim: usize, left: Vec<Matrix>, right: Vec<Matrix>) -> Result<Self> {
        let m = Bimodule::new_unchecked(algebra, dim, left, right)?;
        let report = check_bimodule(&m);
        if report.is_empty() {
            Ok(m)
        } else {
            Err(Error::InvalidBimodule(report))
        }
    }

    pub fn new_unchecked(
        algebra: Arc<Algebra>,
        dim: usize,
        left: Vec<Matrix>,
        right: Vec<Matrix>,
    ) -> Result<Self> {
        check_action_shapes(&algebra, dim, &left)?;
        check_action_shapes(&algebra, dim, &right)?;
        Ok(Bimodule { algebra, dim, left, right })
    }

    /// `A` acting on itself from both sides.
    pub fn regular(algebra: &Arc<Algebra>) -> Self {
        let n = algebra.dim();
        Bimodule {
            algebra: algebra.clone(),
            dim: n,
            left: (0..n).map(|i| algebra.left_mult_basis(i).clone()).collect(),
            right: (0..n).map(|i| algebra.right_mult_basis(i).clone()).collect(),
        }
    }

    pub fn zero(algebra: &Arc<Algebra>) -> Self {
        let n = algebra.dim();
        Bimodule {
            algebra: algebra.clone(),
            dim: 0,
            left: vec![Matrix::zeros(0, 0); n],
            right: vec![Matrix::zeros(0, 0); n],
        }
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn left_basis(&self, i: usize) -> &Matrix {
        &self.left[i]
    }

    pub fn right_basis(&self, i: usize) -> &Matrix {
        &self.right[i]
    }

    pub fn left_matrices(&self) -> &[Matrix] {
        &self.left
    }

    pub fn right_matrices(&self) -> &[Matrix] {
        &self.right
    }

    /// Matrix of `m -> f.m`.
    pub fn left_action(&self, f: &[Rational]) -> Matrix {
        combine(self.dim, self.dim, f, &self.left)
    }

    /// Matrix of `m -> m.f`.
    pub fn right_action(&self, f: &[Rational]) -> Matrix {
        combine(self.dim, self.dim, f, &self.right)
    }

    /// Both actions on one list, useful for sub-bimodule closures.
    pub fn all_action_matrices(&self) -> Vec<Matrix> {
        self.left.iter().chain(&self.right).cloned().collect()
    }

    /// Left and right actions coincide (`f.m = m.f`).
    pub fn is_symmetric(&self) -> bool {
        self.left == self.right
    }

    /// Same algebra, compared by value.
    pub fn same_algebra(&self, other: &Bimodule) -> bool {
        Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra == other.algebra
    }

    /// Sub-bimodule generated by `seed`.
    pub fn generated_by(&self, seed: &[Vector]) -> Subspace {
        crate::linalg::invariant_closure(self.dim, seed, &self.all_action_matrices())
    }
}

fn check_action_shapes(algebra: &Algebra, dim: usize, mats: &[Matrix]) -> Result<()> {
    if mats.len() != algebra.dim() {
        return Err(Error::Dimension(format!(
            "{} action matrices for a {}-dimensional algebra",
            mats.len(),
            algebra.dim()
        )));
    }
    if mats.iter().any(|m| m.rows() != dim || m.cols() != dim) {
        return Err(Error::Dimension(format!("action matrices must be {dim}x{dim}")));
    }
    Ok(())
}

fn check_left_action(a: &Algebra, left: &[Matrix], dim: usize, report: &mut Report) {
    let n = a.dim();
    for i in 0..n {
        for j in 0..n {
            let lhs = combine(dim, dim, a.product_of_basis(i, j), left);
            let rhs = &left[i] * &left[j];
            report.expect_eq(Law::LeftActionProduct, &[i, j], lhs.as_slice(), rhs.as_slice());
        }
    }
    let unit = combine(dim, dim, a.unit(), left);
    report.expect_eq(Law::LeftActionUnit, &[], unit.as_slice(), Matrix::identity(dim).as_slice());
}

/// Violations among the module laws; empty means `M` is a bimodule.
pub fn check_bimodule(m: &Bimodule) -> Report {
    let a = m.algebra();
    let n = a.dim();
    let dim = m.dim();
    let mut report = Report::new();
    check_left_action(a, &m.left, dim, &mut report);
    for i in 0..n {
        for j in 0..n {
            let lhs = m.right_action(a.product_of_basis(i, j));
            let rhs = &m.right[j] * &m.right[i];
            report.expect_eq(Law::RightActionProduct, &[i, j], lhs.as_slice(), rhs.as_slice());
        }
    }
    let unit = m.right_action(a.unit());
    report.expect_eq(Law::RightActionUnit, &[], unit.as_slice(), Matrix::identity(dim).as_slice());
    for i in 0..n {
        for j in 0..n {
            let lr = &m.left[i] * &m.right[j];
            let rl = &m.right[j] * &m.left[i];
            report.expect_eq(Law::ActionsCommute, &[i, j], lr.as_slice(), rl.as_slice());
        }
    }
    report
}

/// Left module over an algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeftModule {
    algebra: Arc<Algebra>,
    dim: usize,
    left: Vec<Matrix>,
}

impl LeftModule {
    pub fn new(algebra: Arc<Algebra>, dim: usize, left: Vec<Matrix>) -> Result<Self> {
        let e = LeftModule::new_unchecked(algebra, dim, left)?;
        let report = check_left_module(&e);
        if report.is_empty() {
            Ok(e)
        } else {
            Err(Error::InvalidLeftModule(report))
        }
    }

    pub fn new_unchecked(algebra: Arc<Algebra>, dim: usize, left: Vec<Matrix>) -> Result<Self> {
        check_action_shapes(&algebra, dim, &left)?;
        Ok(LeftModule { algebra, dim, left })
    }

    /// The free module `A^r` with basis `e_i` in slot `a` at index `a * n + i`.
    pub fn free(algebra: &Arc<Algebra>, rank: usize) -> Self {
        let n = algebra.dim();
        let left = (0..n)
            .map(|i| Matrix::identity(rank).kron(algebra.left_mult_basis(i)))
            .collect();
        LeftModule { algebra: algebra.clone(), dim: n * rank, left }
    }

    pub fn zero(algebra: &Arc<Algebra>) -> Self {
        LeftModule { algebra: algebra.clone(), dim: 0, left: vec![Matrix::zeros(0, 0); algebra.dim()] }
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn left_basis(&self, i: usize) -> &Matrix {
        &self.left[i]
    }

    pub fn left_matrices(&self) -> &[Matrix] {
        &self.left
    }

    pub fn left_action(&self, f: &[Rational]) -> Matrix {
        combine(self.dim, self.dim, f, &self.left)
    }
}

pub fn check_left_module(e: &LeftModule) -> Report {
    let mut report = Report::new();
    check_left_action(&e.algebra, &e.left, e.dim, &mut report);
    report
}

/// Linear map between bimodules, stored as a `target.dim x source.dim` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BimoduleMap {
    source: Bimodule,
    target: Bimodule,
    matrix: Matrix,
}

impl BimoduleMap {
    /// Shape checks only; see [`BimoduleMap::check`] for the intertwining laws.
    pub fn new(source: Bimodule, target: Bimodule, matrix: Matrix) -> Result<Self> {
        if !source.same_algebra(&target) {
            return Err(Error::AlgebraMismatch);
        }
        if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
            return Err(Error::Dimension(format!(
                "{}x{} matrix for a map from dimension {} to {}",
                matrix.rows(),
                matrix.cols(),
                source.dim(),
                target.dim()
            )));
        }
        Ok(BimoduleMap { source, target, matrix })
    }

    pub fn identity(m: &Bimodule) -> Self {
        BimoduleMap { source: m.clone(), target: m.clone(), matrix: Matrix::identity(m.dim()) }
    }

    pub fn zero(source: &Bimodule, target: &Bimodule) -> Self {
        BimoduleMap {
            source: source.clone(),
            target: target.clone(),
            matrix: Matrix::zeros(target.dim(), source.dim()),
        }
    }

    pub fn source(&self) -> &Bimodule {
        &self.source
    }

    pub fn target(&self) -> &Bimodule {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, m: &[Rational]) -> Vector {
        self.matrix.mul_vec(m)
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &BimoduleMap) -> Result<BimoduleMap> {
        if other.target.dim() != self.source.dim() {
            return Err(Error::Dimension("maps are not composable".into()));
        }
        BimoduleMap::new(other.source.clone(), self.target.clone(), self.matrix.try_mul(&other.matrix)?)
    }

    /// Failures of `T L_i = L'_i T` and `T R_i = R'_i T`.
    pub fn check(&self) -> Report {
        let mut report = Report::new();
        for i in 0..self.source.algebra().dim() {
            let lhs = &self.matrix * self.source.left_basis(i);
            let rhs = self.target.left_basis(i) * &self.matrix;
            report.expect_eq(Law::IntertwinesLeft, &[i], lhs.as_slice(), rhs.as_slice());
            let lhs = &self.matrix * self.source.right_basis(i);
            let rhs = self.target.right_basis(i) * &self.matrix;
            report.expect_eq(Law::IntertwinesRight, &[i], lhs.as_slice(), rhs.as_slice());
        }
        report
    }
}

/// Linear system whose unknowns are the entries of a `target.dim x source.dim`
/// matrix, preloaded with the equations for being a bimodule map.
pub(crate) fn bimodule_map_system(source: &Bimodule, target: &Bimodule) -> LinearSystem {
    let (rows, cols) = (target.dim(), source.dim());
    let mut system = LinearSystem::new(rows * cols);
    let n = source.algebra().dim();
    let pairs: Vec<(&Matrix, &Matrix)> = (0..n)
        .flat_map(|i| {
            [
                (source.left_basis(i), target.left_basis(i)),
                (source.right_basis(i), target.right_basis(i)),
            ]
        })
        .collect();
    add_intertwining_equations(&mut system, rows, cols, &pairs);
    system
}

/// All bimodule maps `M -> N`, as row-major flattened `N.dim x M.dim` matrices.
pub fn bimodule_map_space(m: &Bimodule, n: &Bimodule) -> Result<Subspace> {
    if !m.same_algebra(n) {
        return Err(Error::AlgebraMismatch);
    }
    let (_, space) = bimodule_map_system(m, n).solve().expect("homogeneous system");
    Ok(space)
}

/// Which kind of module maps a dual consists of.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// Right-module maps `X(m.g) = X(m) g`, with `(f.X.g)(m) = f X(g.m)`.
    Right,
    /// Left-module maps `X(f.m) = f X(m)`, with `(f.X.g)(m) = X(m.f) g`.
    Left,
}

/// A right or left dual, realized by explicit evaluation matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualBimodule {
    side: Side,
    source: Bimodule,
    /// Flattened `n x source.dim` evaluation matrices.
    space: Subspace,
    bimodule: Bimodule,
}

impl DualBimodule {
    pub fn side(&self) -> Side {
        self.side
    }

    /// The bimodule being dualized.
    pub fn source(&self) -> &Bimodule {
        &self.source
    }

    /// The dual itself, with actions in the echelon basis of evaluation matrices.
    pub fn bimodule(&self) -> &Bimodule {
        &self.bimodule
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    /// Evaluation matrix of the dual element with the given coordinates.
    pub fn evaluation(&self, x: &[Rational]) -> Matrix {
        let n = self.source.algebra().dim();
        Matrix::from_vec(n, self.source.dim(), self.space.combine(x)).expect("evaluation shape")
    }

    pub fn basis_evaluation(&self, k: usize) -> Matrix {
        let n = self.source.algebra().dim();
        Matrix::from_vec(n, self.source.dim(), self.space.basis()[k].clone()).expect("evaluation shape")
    }

    /// Coordinates of a map `M -> A`, if it belongs to the dual.
    pub fn coordinates(&self, evaluation: &Matrix) -> Option<Vector> {
        self.space.coordinates(evaluation.as_slice())
    }

    /// The pairing `<X, m> = X(m)`.
    pub fn pair(&self, x: &[Rational], m: &[Rational]) -> Result<Vector> {
        if x.len() != self.dim() || m.len() != self.source.dim() {
            return Err(Error::Dimension("pairing arguments of wrong length".into()));
        }
        Ok(self.evaluation(x).mul_vec(m))
    }
}

fn dual(m: &Bimodule, side: Side) -> DualBimodule {
    let a = m.algebra().clone();
    let n = a.dim();
    let dim = m.dim();
    let mut system = LinearSystem::new(n * dim);
    let pairs: Vec<(&Matrix, &Matrix)> = (0..n)
        .map(|i| match side {
            Side::Right => (m.right_basis(i), a.right_mult_basis(i)),
            Side::Left => (m.left_basis(i), a.left_mult_basis(i)),
        })
        .collect();
    add_intertwining_equations(&mut system, n, dim, &pairs);
    let (_, space) = system.solve().expect("homogeneous system");

    let evaluations: Vec<Matrix> = space
        .basis()
        .iter()
        .map(|b| Matrix::from_vec(n, dim, b.clone()).expect("evaluation shape"))
        .collect();
    let action = |op: &dyn Fn(&Matrix) -> Matrix| -> Matrix {
        let cols: Vec<Vector> = evaluations
            .iter()
            .map(|x| space.coordinates(op(x).as_slice()).expect("dual is closed under the actions"))
            .collect();
        Matrix::from_columns(space.dim(), &cols)
    };
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    for i in 0..n {
        match side {
            Side::Right => {
                left.push(action(&|x| a.left_mult_basis(i) * x));
                right.push(action(&|x| x * m.left_basis(i)));
            }
            Side::Left => {
                left.push(action(&|x| x * m.right_basis(i)));
                right.push(action(&|x| a.right_mult_basis(i) * x));
            }
        }
    }
    let bimodule = Bimodule::new_unchecked(a, space.dim(), left, right).expect("dual action shapes");
    DualBimodule { side, source: m.clone(), space, bimodule }
}

/// `Hom_(-,A)(M, A)` with `(f.X.g)(m) = f X(g.m)`.
pub fn right_dual(m: &Bimodule) -> DualBimodule {
    dual(m, Side::Right)
}

/// `Hom_(A,-)(M, A)` with `(f.X.g)(m) = X(m.f) g`.
pub fn left_dual(m: &Bimodule) -> DualBimodule {
    dual(m, Side::Left)
}

/// The pairing of a dual element with a module element.
pub fn pair(dual: &DualBimodule, x: &[Rational], m: &[Rational]) -> Result<Vector> {
    dual.pair(x, m)
}

/// The transpose `N* -> M*` of `alpha : M -> N` (or the left-dual analogue),
/// defined by `<alpha^T(Y), m> = <Y, alpha(m)>`.
pub fn transpose(alpha: &BimoduleMap, source_dual: &DualBimodule, target_dual: &DualBimodule) -> Result<BimoduleMap> {
    if source_dual.source() != alpha.source() || target_dual.source() != alpha.target() {
        return Err(Error::Dimension("duals do not match the map".into()));
    }
    if source_dual.side() != target_dual.side() {
        return Err(Error::Dimension("cannot transpose between a right and a left dual".into()));
    }
    let cols: Vec<Vector> = (0..target_dual.dim())
        .map(|k| {
            let composed = &target_dual.basis_evaluation(k) * alpha.matrix();
            source_dual
                .coordinates(&composed)
                .expect("transpose of a bimodule map lands in the dual")
        })
        .collect();
    let matrix = Matrix::from_columns(source_dual.dim(), &cols);
    BimoduleMap::new(target_dual.bimodule().clone(), source_dual.bimodule().clone(), matrix)
}

/// Transpose with right duals computed on the spot.
pub fn transpose_right(alpha: &BimoduleMap) -> Result<(BimoduleMap, DualBimodule, DualBimodule)> {
    let src = right_dual(alpha.source());
    let tgt = right_dual(alpha.target());
    let t = transpose(alpha, &src, &tgt)?;
    Ok((t, src, tgt))
}

/// The canonical map `M -> *(M*)`, `m -> (X -> X(m))`.
pub fn double_dual_map(right: &DualBimodule, left_of_right: &DualBimodule) -> Result<BimoduleMap> {
    if right.side() != Side::Right
        || left_of_right.side() != Side::Left
        || left_of_right.source() != right.bimodule()
    {
        return Err(Error::Dimension("expected the left dual of a right dual".into()));
    }
    let n = right.source().algebra().dim();
    let m = right.source();
    let cols: Vec<Vector> = (0..m.dim())
        .map(|c| {
            let evals: Vec<Vector> = (0..right.dim()).map(|k| right.basis_evaluation(k).column(c)).collect();
            let z = Matrix::from_columns(n, &evals);
            left_of_right.coordinates(&z).expect("evaluation at m is left linear")
        })
        .collect();
    BimoduleMap::new(m.clone(), left_of_right.bimodule().clone(), Matrix::from_columns(left_of_right.dim(), &cols))
}

/// `M (x)_A E` as the quotient of `M (x) E` by the balancing relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorOverA {
    /// Balancing relations inside `M (x) E`, with `m_a (x) xi_b` at `a * E.dim + b`.
    relations: Subspace,
    /// Columns of `M (x) E` kept as the quotient basis.
    kept: Vec<usize>,
    projection: Matrix,
    module: LeftModule,
    left_dim: usize,
    right_dim: usize,
}

impl TensorOverA {
    pub fn module(&self) -> &LeftModule {
        &self.module
    }

    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    pub fn relations(&self) -> &Subspace {
        &self.relations
    }

    /// `dim(M) * dim(E) -> dim(M (x)_A E)`.
    pub fn projection(&self) -> &Matrix {
        &self.projection
    }

    /// Section of the projection picking the kept basis tensors.
    pub fn lift(&self, t: &[Rational]) -> Vector {
        let mut v = zero_vec(self.left_dim * self.right_dim);
        for (x, &c) in t.iter().zip(&self.kept) {
            v[c] = x.clone();
        }
        v
    }

    /// Class of the pure tensor `m (x) xi`.
    pub fn tensor(&self, m: &[Rational], xi: &[Rational]) -> Vector {
        self.projection.mul_vec(&kron_vec(m, xi))
    }

    pub fn ambient_dim(&self) -> usize {
        self.left_dim * self.right_dim
    }
}

pub fn kron_vec(a: &[Rational], b: &[Rational]) -> Vector {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// `M (x)_A E` for a bimodule `M` and a left module `E`.
pub fn tensor_over_a(m: &Bimodule, e: &LeftModule) -> Result<TensorOverA> {
    if !(Arc::ptr_eq(m.algebra(), e.algebra()) || m.algebra() == e.algebra()) {
        return Err(Error::AlgebraMismatch);
    }
    let n = m.algebra().dim();
    let (dm, de) = (m.dim(), e.dim());
    let total = dm * de;
    let mut relations = Vec::new();
    for i in 0..n {
        for a in 0..dm {
            for b in 0..de {
                let mut v = zero_vec(total);
                let r = m.right_basis(i);
                for c in 0..dm {
                    v[c * de + b] += r.get(c, a);
                }
                let l = e.left_basis(i);
                for d in 0..de {
                    v[a * de + d] -= l.get(d, b);
                }
                relations.push(v);
            }
        }
    }
    let relations = Subspace::span(total, relations);
    let mut is_pivot = vec![false; total];
    for &p in relations.pivots() {
        is_pivot[p] = true;
    }
    let kept: Vec<usize> = (0..total).filter(|&c| !is_pivot[c]).collect();
    let q = kept.len();
    let mut projection = Matrix::zeros(q, total);
    for c in 0..total {
        let mut v = unit_vec(total, c);
        for (row, &p) in relations.basis().iter().zip(relations.pivots()) {
            if !v[p].is_zero() {
                let f = -v[p].clone();
                crate::linalg::axpy(&mut v, &f, row);
            }
        }
        for (j, &k) in kept.iter().enumerate() {
            projection.set(j, c, v[k].clone());
        }
    }
    let lift = Matrix::from_columns(total, &(0..q).map(|j| unit_vec(total, kept[j])).collect::<Vec<_>>());
    let id = Matrix::identity(de);
    let left = (0..n)
        .map(|i| &(&projection * &m.left_basis(i).kron(&id)) * &lift)
        .collect();
    let module = LeftModule::new_unchecked(m.algebra().clone(), q, left)?;
    Ok(TensorOverA { relations, kept, projection, module, left_dim: dm, right_dim: de })
}

/// Checks that the left action on `M (x) E` maps balancing relations to balancing relations.
pub fn check_tensor_action(t: &TensorOverA, m: &Bimodule) -> Report {
    let mut report = Report::new();
    let id = Matrix::identity(t.right_dim);
    for i in 0..m.algebra().dim() {
        let op = m.left_basis(i).kron(&id);
        for (r, rel) in t.relations.basis().iter().enumerate() {
            let image = op.mul_vec(rel);
            if !t.relations.contains(&image) {
                report.push(Law::TensorActionWellDefined, vec![i, r], t.projection.mul_vec(&image));
            }
        }
    }
    report
}
