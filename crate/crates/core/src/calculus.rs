//! First-order differential calculi and the universal calculus.

use std::sync::Arc;

use crate::algebra::{bimodule_map_system, kron_vec, Algebra, Bimodule, BimoduleMap};
use crate::error::{Error, Result};
use crate::linalg::{kernel, sub_vec, Matrix, Rational, Subspace, Vector};
use crate::report::{Law, Report};

/// A bimodule of one-forms with a linear differential `d : A -> M`.
///
/// The Leibniz rule is not enforced on construction; use [`check_leibniz`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferentialCalculus {
    bimodule: Bimodule,
    /// `dim M x n`; column `j` is `d(e_j)`.
    differential: Matrix,
}

impl DifferentialCalculus {
    pub fn new(bimodule: Bimodule, differential: Matrix) -> Result<Self> {
        let n = bimodule.algebra().dim();
        if differential.rows() != bimodule.dim() || differential.cols() != n {
            return Err(Error::Dimension(format!(
                "differential must be {}x{}, got {}x{}",
                bimodule.dim(),
                n,
                differential.rows(),
                differential.cols()
            )));
        }
        Ok(DifferentialCalculus { bimodule, differential })
    }

    /// `d = 0` into `M`.
    pub fn zero(bimodule: Bimodule) -> Self {
        let n = bimodule.algebra().dim();
        let differential = Matrix::zeros(bimodule.dim(), n);
        DifferentialCalculus { bimodule, differential }
    }

    /// `df = u f - f u` on the regular bimodule.
    pub fn inner(algebra: &Arc<Algebra>, u: &[Rational]) -> Result<Self> {
        if u.len() != algebra.dim() {
            return Err(Error::Dimension("inner element of wrong length".into()));
        }
        let d = &algebra.left_mult(u) - &algebra.right_mult(u);
        DifferentialCalculus::new(Bimodule::regular(algebra), d)
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        self.bimodule.algebra()
    }

    pub fn bimodule(&self) -> &Bimodule {
        &self.bimodule
    }

    pub fn differential(&self) -> &Matrix {
        &self.differential
    }

    pub fn d(&self, f: &[Rational]) -> Vector {
        self.differential.mul_vec(f)
    }
}

/// Basis pairs `(i, j)` where `d(e_i e_j) != d(e_i).e_j + e_i.d(e_j)`.
pub fn check_leibniz(c: &DifferentialCalculus) -> Report {
    let a = c.algebra();
    let m = c.bimodule();
    let n = a.dim();
    let mut report = Report::new();
    for i in 0..n {
        let di = c.differential.column(i);
        for j in 0..n {
            let lhs = c.d(a.product_of_basis(i, j));
            let dj = c.differential.column(j);
            let rhs: Vector = m
                .right_basis(j)
                .mul_vec(&di)
                .iter()
                .zip(m.left_basis(i).mul_vec(&dj))
                .map(|(x, y)| x + y)
                .collect();
            report.expect_eq(Law::Leibniz, &[i, j], &lhs, &rhs);
        }
    }
    report
}

/// The universal calculus, realized inside `A (x) A` as the kernel of multiplication.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalCalculus {
    calculus: DifferentialCalculus,
    /// Echelon basis of `ker(mult)`; `e_a (x) e_b` sits at `a * n + b`.
    kernel: Subspace,
    mult_rank: usize,
}

impl UniversalCalculus {
    pub fn calculus(&self) -> &DifferentialCalculus {
        &self.calculus
    }

    pub fn bimodule(&self) -> &Bimodule {
        self.calculus.bimodule()
    }

    pub fn kernel(&self) -> &Subspace {
        &self.kernel
    }

    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    pub fn mult_rank(&self) -> usize {
        self.mult_rank
    }

    /// Element of `A (x) A` with the given coordinates in the kernel basis.
    pub fn embed(&self, coords: &[Rational]) -> Vector {
        self.kernel.combine(coords)
    }

    /// Kernel coordinates of an element of `A (x) A`, if it lies in the kernel.
    pub fn coordinates(&self, tensor: &[Rational]) -> Option<Vector> {
        self.kernel.coordinates(tensor)
    }
}

/// Restriction of `op` to an invariant subspace, in the echelon basis.
fn restrict(space: &Subspace, op: &Matrix) -> Option<Matrix> {
    let cols = space
        .basis()
        .iter()
        .map(|v| space.coordinates(&op.mul_vec(v)))
        .collect::<Option<Vec<_>>>()?;
    Some(Matrix::from_columns(space.dim(), &cols))
}

/// `ker(mult : A (x) A -> A)` with `f.(a (x) b) = fa (x) b`, `(a (x) b).g = a (x) bg`
/// and `d_u f = 1 (x) f - f (x) 1`.
pub fn universal_calculus(a: &Arc<Algebra>) -> UniversalCalculus {
    let n = a.dim();
    let mult = a.multiplication_map();
    let mult_rank = mult.rank();
    let ker = kernel(&mult);
    let id = Matrix::identity(n);
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    for i in 0..n {
        let l = a.left_mult_basis(i).kron(&id);
        let r = id.kron(a.right_mult_basis(i));
        left.push(restrict(&ker, &l).expect("kernel of multiplication is a sub-bimodule"));
        right.push(restrict(&ker, &r).expect("kernel of multiplication is a sub-bimodule"));
    }
    let bimodule = Bimodule::new_unchecked(a.clone(), ker.dim(), left, right).expect("shapes");
    let cols: Vec<Vector> = (0..n)
        .map(|j| {
            let e = a.basis(j);
            let t = sub_vec(&kron_vec(a.unit(), &e), &kron_vec(&e, a.unit()));
            ker.coordinates(&t).expect("d_u lands in the kernel")
        })
        .collect();
    let differential = Matrix::from_columns(ker.dim(), &cols);
    UniversalCalculus {
        calculus: DifferentialCalculus { bimodule, differential },
        kernel: ker,
        mult_rank,
    }
}

/// The comparison map out of the universal calculus, with its certificates.
#[derive(Clone, Debug)]
pub struct UniversalFactorization {
    pub phi: BimoduleMap,
    /// `phi . d_u = d` entrywise.
    pub commutes: bool,
    /// Violations of the bimodule-map laws by `phi`.
    pub bimodule_report: Report,
    /// Dimension of the affine space of bimodule maps `psi` with `psi . d_u = d`.
    pub solution_dim: usize,
}

impl UniversalFactorization {
    pub fn is_unique(&self) -> bool {
        self.solution_dim == 0
    }

    pub fn holds(&self) -> bool {
        self.commutes && self.bimodule_report.is_empty() && self.is_unique()
    }
}

/// `phi(sum f_i (x) g_i) = sum f_i.d(g_i)` on `ker(mult)`, with existence and
/// uniqueness certified.
pub fn factor_through_universal(c: &DifferentialCalculus, u: &UniversalCalculus) -> Result<UniversalFactorization> {
    let a = c.algebra();
    if !(Arc::ptr_eq(a, u.calculus.algebra()) || **a == **u.calculus.algebra()) {
        return Err(Error::AlgebraMismatch);
    }
    let n = a.dim();
    let m = c.bimodule();
    // e_a (x) e_b -> e_a . d(e_b) on all of A (x) A
    let full_cols: Vec<Vector> = (0..n * n)
        .map(|ab| m.left_basis(ab / n).mul_vec(&c.differential.column(ab % n)))
        .collect();
    let full = Matrix::from_columns(m.dim(), &full_cols);
    let phi_matrix = &full * &u.kernel.inclusion();
    let phi = BimoduleMap::new(u.bimodule().clone(), m.clone(), phi_matrix)?;
    let commutes = &(phi.matrix() * u.calculus.differential()) == c.differential();
    let bimodule_report = phi.check();
    let solution_dim = homogeneous_dim(u, m);
    Ok(UniversalFactorization { phi, commutes, bimodule_report, solution_dim })
}

/// Dimension of `{psi : Omega_u -> M bimodule map, psi . d_u = 0}`.
///
/// Such a `psi` vanishes on the sub-bimodule generated by `d_u(A)`; when that
/// is everything the answer is 0 without solving anything. Otherwise the full
/// linear system is solved.
fn homogeneous_dim(u: &UniversalCalculus, m: &Bimodule) -> usize {
    let omega = u.bimodule();
    let generated = omega.generated_by(&u.calculus.differential.columns());
    if generated.dim() == omega.dim() {
        return 0;
    }
    homogeneous_dim_by_solving(u, m)
}

pub(crate) fn homogeneous_dim_by_solving(u: &UniversalCalculus, m: &Bimodule) -> usize {
    let omega = u.bimodule();
    let mut system = bimodule_map_system(omega, m);
    add_composition_constraints(&mut system, m.dim(), u.calculus.differential(), None);
    system.solve().map_or(0, |(_, space)| space.dim())
}

/// Adds `T . D = rhs` for an unknown row-major `rows x D.rows()` matrix `T`.
pub(crate) fn add_composition_constraints(
    system: &mut crate::linalg::LinearSystem,
    rows: usize,
    d: &Matrix,
    rhs: Option<&Matrix>,
) {
    let inner = d.rows();
    for r in 0..rows {
        for j in 0..d.cols() {
            let terms: Vec<(usize, Rational)> = (0..inner)
                .filter(|&k| !num_traits::Zero::is_zero(d.get(k, j)))
                .map(|k| (r * inner + k, d.get(k, j).clone()))
                .collect();
            let b = rhs.map_or_else(num_traits::Zero::zero, |m| m.get(r, j).clone());
            system.sparse_equation(&terms, b);
        }
    }
}

/// Whether the sub-bimodule generated by `d(A)` is all of `M`.
pub fn is_spanned_by_differential(c: &DifferentialCalculus) -> bool {
    let m = c.bimodule();
    m.generated_by(&c.differential.columns()).dim() == m.dim()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::linalg::{rat, Subspace};

    #[test]
    fn dual_numbers_kahler_is_leibniz() {
        let b = builtins::dual_numbers();
        assert!(check_leibniz(b.calculus.as_ref().unwrap()).is_empty());
    }

    #[test]
    fn nonzero_d_of_unit_violates_leibniz() {
        let c = builtins::fixtures::dual_numbers_bad_unit_differential();
        let report = check_leibniz(&c);
        assert!(report.has(Law::Leibniz, &[0, 0]));
    }

    #[test]
    fn zero_differential_is_leibniz() {
        let b = builtins::quantum_plane_trunc(rat(2), 2).unwrap();
        let c = DifferentialCalculus::zero(Bimodule::regular(&b.algebra));
        assert!(check_leibniz(&c).is_empty());
    }

    #[test]
    fn universal_calculus_of_dual_numbers() {
        let b = builtins::dual_numbers();
        let u = universal_calculus(&b.algebra);
        assert_eq!(u.dim(), 2);
        // basis {1(x)x - x(x)1, x(x)x} in A(x)A coordinates (1(x)1, 1(x)x, x(x)1, x(x)x)
        let expected = Subspace::span(
            4,
            [
                vec![rat(0), rat(1), rat(-1), rat(0)],
                vec![rat(0), rat(0), rat(0), rat(1)],
            ],
        );
        assert_eq!(u.kernel(), &expected);
        let dx = u.embed(&u.calculus().d(&b.algebra.basis(1)));
        assert_eq!(dx, vec![rat(0), rat(1), rat(-1), rat(0)]);
        assert!(check_leibniz(u.calculus()).is_empty());
    }

    #[test]
    fn universal_calculus_of_ground_field_is_zero() {
        let b = builtins::truncated_poly(1).unwrap();
        let u = universal_calculus(&b.algebra);
        assert_eq!(u.dim(), 0);
        assert!(u.calculus().differential().is_zero());
    }

    #[test]
    fn universal_calculus_of_matrices_has_dim_12() {
        let b = builtins::matrix_2();
        let u = universal_calculus(&b.algebra);
        assert_eq!(u.mult_rank(), 4);
        assert_eq!(u.dim(), 12);
    }

    #[test]
    fn factorization_of_universal_is_identity() {
        let b = builtins::dual_numbers();
        let u = universal_calculus(&b.algebra);
        let f = factor_through_universal(u.calculus(), &u).unwrap();
        assert_eq!(f.phi.matrix(), &Matrix::identity(2));
        assert!(f.holds());
    }

    #[test]
    fn factorization_of_kahler_calculus() {
        let b = builtins::dual_numbers();
        let c = b.calculus.as_ref().unwrap();
        let u = universal_calculus(&b.algebra);
        let f = factor_through_universal(c, &u).unwrap();
        assert!(f.holds());
        let du_x = vec![rat(0), rat(1), rat(-1), rat(0)];
        let x_x = vec![rat(0), rat(0), rat(0), rat(1)];
        assert_eq!(f.phi.apply(&u.coordinates(&du_x).unwrap()), vec![rat(1)]);
        assert_eq!(f.phi.apply(&u.coordinates(&x_x).unwrap()), vec![rat(0)]);
    }

    #[test]
    fn factorization_of_zero_calculus_is_zero() {
        let b = builtins::dual_numbers();
        let c = DifferentialCalculus::zero(Bimodule::zero(&b.algebra));
        let u = universal_calculus(&b.algebra);
        let f = factor_through_universal(&c, &u).unwrap();
        assert!(f.phi.matrix().is_zero());
        assert!(f.holds());
    }

    #[test]
    fn uniqueness_shortcut_agrees_with_full_solve() {
        for name in ["dual_numbers", "group_algebra_z2", "upper_triangular_2"] {
            let b = builtins::builtin(name, &[]).unwrap();
            let c = b.calculus.as_ref().unwrap();
            let u = universal_calculus(&b.algebra);
            assert_eq!(homogeneous_dim_by_solving(&u, c.bimodule()), 0, "{name}");
        }
    }

    #[test]
    fn spanned_by_differential() {
        let b = builtins::dual_numbers();
        let u = universal_calculus(&b.algebra);
        assert!(is_spanned_by_differential(u.calculus()));
        assert!(!is_spanned_by_differential(&builtins::fixtures::dual_numbers_kahler_plus_trivial()));
        assert!(is_spanned_by_differential(&DifferentialCalculus::zero(Bimodule::zero(&b.algebra))));
    }
}
