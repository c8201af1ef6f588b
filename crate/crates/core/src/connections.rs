//! Left connections and covariant derivatives along right vector fields.

use num_traits::Zero;

use crate::algebra::{check_tensor_action, right_dual, tensor_over_a, DualBimodule, TensorOverA};
pub use crate::algebra::LeftModule;
use crate::calculus::DifferentialCalculus;
use crate::cartan::CartanPair;
use crate::error::{Error, Result};
use crate::linalg::{add_vec, unit_vec, LinearSystem, Matrix, Rational, Subspace, Vector};
use crate::report::{Law, Report};

/// `nabla : E -> M (x)_A E`, stored against the quotient basis of the tensor product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    calculus: DifferentialCalculus,
    module: LeftModule,
    tensor: TensorOverA,
    dual: DualBimodule,
    /// `dim(M (x)_A E) x dim E`.
    matrix: Matrix,
}

impl Connection {
    pub fn new(calculus: DifferentialCalculus, module: LeftModule, matrix: Matrix) -> Result<Self> {
        let tensor = tensor_over_a(calculus.bimodule(), &module)?;
        if matrix.rows() != tensor.dim() || matrix.cols() != module.dim() {
            return Err(Error::Dimension(format!(
                "connection must be {}x{}, got {}x{}",
                tensor.dim(),
                module.dim(),
                matrix.rows(),
                matrix.cols()
            )));
        }
        let dual = right_dual(calculus.bimodule());
        Ok(Connection { calculus, module, tensor, dual, matrix })
    }

    pub fn calculus(&self) -> &DifferentialCalculus {
        &self.calculus
    }

    pub fn module(&self) -> &LeftModule {
        &self.module
    }

    pub fn tensor(&self) -> &TensorOverA {
        &self.tensor
    }

    /// The right dual `M*` that fields are taken from.
    pub fn dual(&self) -> &DualBimodule {
        &self.dual
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, xi: &[Rational]) -> Vector {
        self.matrix.mul_vec(xi)
    }
}

/// `m_a (x) xi_b -> <X, m_a>.xi_b` on `M (x) E`, before passing to the quotient.
pub fn contraction_matrix(dual: &DualBimodule, e: &LeftModule, x: &[Rational]) -> Matrix {
    let eval = dual.evaluation(x);
    let (dm, de) = (eval.cols(), e.dim());
    let mut cols = Vec::with_capacity(dm * de);
    for a in 0..dm {
        let act = e.left_action(&eval.column(a));
        for b in 0..de {
            cols.push(act.column(b));
        }
    }
    Matrix::from_columns(de, &cols)
}

/// `<<X, t>>` for a class `t` in `M (x)_A E`.
pub fn contract(dual: &DualBimodule, tensor: &TensorOverA, e: &LeftModule, x: &[Rational], t: &[Rational]) -> Vector {
    contraction_matrix(dual, e, x).mul_vec(&tensor.lift(t))
}

/// Every basis field whose contraction fails to kill a balancing relation.
pub fn check_contraction(dual: &DualBimodule, tensor: &TensorOverA, e: &LeftModule) -> Report {
    let mut report = Report::new();
    for k in 0..dual.dim() {
        let c = contraction_matrix(dual, e, &unit_vec(dual.dim(), k));
        for (r, rel) in tensor.relations().basis().iter().enumerate() {
            let v = c.mul_vec(rel);
            report.expect_eq(Law::ContractionBalanced, &[k, r], &v, &vec![Rational::zero(); v.len()]);
        }
    }
    report
}

/// `nabla_X = <<X, nabla(.)>>` as an endomorphism of `E`.
pub fn covariant_derivative(c: &Connection, x: &[Rational]) -> Matrix {
    let contraction = contraction_matrix(&c.dual, &c.module, x);
    let cols: Vec<Vector> = (0..c.module.dim())
        .map(|b| contraction.mul_vec(&c.tensor.lift(&c.matrix.column(b))))
        .collect();
    Matrix::from_columns(c.module.dim(), &cols)
}

/// Pairs `(i, b)` where `nabla(e_i.xi_b) != e_i.nabla(xi_b) + d(e_i) (x) xi_b`.
pub fn check_connection(c: &Connection) -> Report {
    let a = c.calculus.algebra();
    let e = &c.module;
    let tm = c.tensor.module();
    let mut report = Report::new();
    for i in 0..a.dim() {
        let di = c.calculus.d(&a.basis(i));
        for b in 0..e.dim() {
            let lhs = c.apply(&e.left_basis(i).column(b));
            let first = tm.left_basis(i).mul_vec(&c.matrix.column(b));
            let second = c.tensor.tensor(&di, &unit_vec(e.dim(), b));
            report.expect_eq(Law::ConnectionLeibniz, &[i, b], &lhs, &add_vec(&first, &second));
        }
    }
    report
}

/// The covariant-derivative axioms along the fields of `p`, which must live on
/// the connection's `M*`.
pub fn check_covariant_axioms(c: &Connection, p: &CartanPair) -> Result<Report> {
    if p.bimodule() != c.dual.bimodule() {
        return Err(Error::Dimension("pair is not defined on the right dual of the calculus".into()));
    }
    let a = c.calculus.algebra();
    let e = &c.module;
    let nb = p.bimodule();
    let derivs: Vec<Matrix> = (0..nb.dim()).map(|k| covariant_derivative(c, &unit_vec(nb.dim(), k))).collect();
    let mut report = Report::new();
    for i in 0..a.dim() {
        for k in 0..nb.dim() {
            let lhs = covariant_derivative(c, &nb.left_basis(i).column(k));
            let rhs = e.left_basis(i) * &derivs[k];
            for b in 0..e.dim() {
                report.expect_eq(Law::CovariantLeftLinear, &[i, k, b], &lhs.column(b), &rhs.column(b));
            }
        }
    }
    for k in 0..nb.dim() {
        for i in 0..a.dim() {
            let shifted = covariant_derivative(c, &nb.right_basis(i).column(k));
            let coeff = e.left_action(&p.basis_action(k).column(i));
            for b in 0..e.dim() {
                let lhs = derivs[k].mul_vec(&e.left_basis(i).column(b));
                let rhs = add_vec(&coeff.column(b), &shifted.column(b));
                report.expect_eq(Law::CovariantTwistedLeibniz, &[k, i, b], &lhs, &rhs);
            }
        }
    }
    Ok(report)
}

/// `nabla(f.eps_a) = df (x) eps_a` on the free module of rank `r`.
pub fn trivial_connection(c: &DifferentialCalculus, r: usize) -> Connection {
    let a = c.algebra();
    let n = a.dim();
    let e = LeftModule::free(a, r);
    let tensor = tensor_over_a(c.bimodule(), &e).expect("same algebra");
    let mut cols = Vec::with_capacity(n * r);
    for slot in 0..r {
        let mut eps = vec![Rational::zero(); n * r];
        eps[slot * n..(slot + 1) * n].clone_from_slice(a.unit());
        for j in 0..n {
            cols.push(tensor.tensor(&c.d(&a.basis(j)), &eps));
        }
    }
    let matrix = Matrix::from_columns(tensor.dim(), &cols);
    Connection::new(c.clone(), e, matrix).expect("shapes")
}

/// All connections on `E`, as an affine space.
#[derive(Clone, Debug)]
pub struct ConnectionSpace {
    pub particular: Option<Connection>,
    /// Flattened `dim(M (x)_A E) x dim E` matrices of left-module maps.
    pub homogeneous: Subspace,
}

impl ConnectionSpace {
    pub fn exists(&self) -> bool {
        self.particular.is_some()
    }
}

pub fn connection_space(c: &DifferentialCalculus, e: &LeftModule) -> Result<ConnectionSpace> {
    let tensor = tensor_over_a(c.bimodule(), e)?;
    let a = c.algebra();
    let (q, r) = (tensor.dim(), e.dim());
    let tm = tensor.module();
    let mut system = LinearSystem::new(q * r);
    for i in 0..a.dim() {
        let le = e.left_basis(i);
        let lt = tm.left_basis(i);
        let di = c.d(&a.basis(i));
        for b in 0..r {
            let rhs = tensor.tensor(&di, &unit_vec(r, b));
            for s in 0..q {
                let mut terms = Vec::new();
                for col in 0..r {
                    if !le.get(col, b).is_zero() {
                        terms.push((s * r + col, le.get(col, b).clone()));
                    }
                }
                for t in 0..q {
                    if !lt.get(s, t).is_zero() {
                        terms.push((t * r + b, -lt.get(s, t).clone()));
                    }
                }
                system.sparse_equation(&terms, rhs[s].clone());
            }
        }
    }
    match system.solve() {
        None => Ok(ConnectionSpace { particular: None, homogeneous: Subspace::zero(q * r) }),
        Some((x, homogeneous)) => {
            let m = Matrix::from_vec(q, r, x)?;
            let particular = Connection::new(c.clone(), e.clone(), m)?;
            Ok(ConnectionSpace { particular: Some(particular), homogeneous })
        }
    }
}

/// Checks the left action on the tensor product and the contraction together.
pub fn check_tensor_structure(c: &Connection) -> Report {
    let mut report = check_tensor_action(&c.tensor, c.calculus.bimodule());
    report.merge(check_contraction(&c.dual, &c.tensor, &c.module));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{self, fixtures};
    use crate::cartan::pair_from_calculus;
    use crate::linalg::rat;

    #[test]
    fn trivial_connection_on_dual_numbers() {
        let b = builtins::dual_numbers();
        let c = b.calculus.as_ref().unwrap();
        let conn = trivial_connection(c, 1);
        assert!(check_connection(&conn).is_empty());
        assert_eq!(conn.tensor().dim(), 1);
        assert!(conn.apply(b.algebra.unit()).iter().all(Zero::is_zero));
        // nabla(x) = omega (x) 1
        let omega_one = conn.tensor().tensor(&[rat(1)], b.algebra.unit());
        assert_eq!(conn.apply(&b.algebra.basis(1)), omega_one);
        let pair = pair_from_calculus(c).pair;
        assert!(check_covariant_axioms(&conn, &pair).unwrap().is_empty());
        // nabla_{X0} f = X0(f)
        assert_eq!(covariant_derivative(&conn, &[rat(1)]), pair.actions()[0].clone());
        assert!(covariant_derivative(&conn, &[rat(0)]).is_zero());
    }

    #[test]
    fn contraction_examples() {
        let b = builtins::dual_numbers();
        let conn = trivial_connection(b.calculus.as_ref().unwrap(), 1);
        let t = conn.tensor().tensor(&[rat(1)], b.algebra.unit());
        assert_eq!(contract(conn.dual(), conn.tensor(), conn.module(), &[rat(1)], &t), b.algebra.basis(1));
        assert!(contract(conn.dual(), conn.tensor(), conn.module(), &[rat(1)], &[rat(0)]).iter().all(Zero::is_zero));
        assert!(check_tensor_structure(&conn).is_empty());
    }

    #[test]
    fn rank_two_is_block_diagonal() {
        let b = builtins::dual_numbers();
        let c = b.calculus.as_ref().unwrap();
        let one = trivial_connection(c, 1);
        let two = trivial_connection(c, 2);
        assert!(check_connection(&two).is_empty());
        assert_eq!(two.matrix(), &Matrix::identity(2).kron(one.matrix()));
    }

    #[test]
    fn zero_connection_is_rejected() {
        let conn = fixtures::dual_numbers_zero_connection();
        let report = check_connection(&conn);
        assert!(report.has(Law::ConnectionLeibniz, &[1, 0]));
        let pair = pair_from_calculus(conn.calculus()).pair;
        let cov = check_covariant_axioms(&conn, &pair).unwrap();
        assert!(cov.has(Law::CovariantTwistedLeibniz, &[0, 1, 0]));
    }

    #[test]
    fn connections_on_zero_module() {
        let b = builtins::dual_numbers();
        let c = b.calculus.as_ref().unwrap();
        let e = LeftModule::zero(&b.algebra);
        let space = connection_space(c, &e).unwrap();
        assert!(space.exists());
        assert_eq!(space.homogeneous.dim(), 0);
        assert!(check_connection(space.particular.as_ref().unwrap()).is_empty());
    }

    #[test]
    fn connection_space_of_free_module() {
        let b = builtins::dual_numbers();
        let c = b.calculus.as_ref().unwrap();
        let space = connection_space(c, &LeftModule::free(&b.algebra, 1)).unwrap();
        let particular = space.particular.unwrap();
        assert!(check_connection(&particular).is_empty());
        let diff = particular.matrix() - trivial_connection(c, 1).matrix();
        assert!(space.homogeneous.contains(diff.as_slice()));
    }

    #[test]
    fn zero_calculus_admits_only_zero_connection() {
        let b = builtins::dual_numbers();
        let c = DifferentialCalculus::zero(crate::algebra::Bimodule::zero(&b.algebra));
        let space = connection_space(&c, &LeftModule::free(&b.algebra, 1)).unwrap();
        assert!(space.exists());
        assert_eq!(space.homogeneous.dim(), 0);
    }
}
