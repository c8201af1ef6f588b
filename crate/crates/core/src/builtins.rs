//! Small algebras with hand-checkable calculi, plus deliberately broken
//! structures for exercising the checkers.

use std::sync::Arc;

use num_traits::{One, ToPrimitive, Zero};

use crate::algebra::{Algebra, Bimodule};
use crate::calculus::DifferentialCalculus;
use crate::cartan::{pair_from_calculus, CartanPair};
use crate::connections::{trivial_connection, Connection};
use crate::error::{Error, Result};
use crate::linalg::{parse_rational, rat, unit_vec, zero_vec, Matrix, Rational};

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 6] = [
    "dual_numbers",
    "truncated_poly",
    "group_algebra_z2",
    "upper_triangular_2",
    "matrix_2",
    "quantum_plane_trunc",
];

const MAX_TRUNCATION: usize = 8;
const MAX_DEGREE: usize = 6;

#[derive(Clone, Debug)]
pub struct ExampleBundle {
    pub name: String,
    pub params: Vec<Rational>,
    pub algebra: Arc<Algebra>,
    pub calculus: Option<DifferentialCalculus>,
    /// The pair on the right dual of the calculus.
    pub pair: Option<CartanPair>,
    /// The trivial connection on `A` itself.
    pub connection: Option<Connection>,
    pub notes: String,
}

impl ExampleBundle {
    fn with_calculus(name: &str, params: Vec<Rational>, calculus: DifferentialCalculus, notes: &str) -> Self {
        let pair = pair_from_calculus(&calculus).pair;
        let connection = trivial_connection(&calculus, 1);
        ExampleBundle {
            name: name.to_string(),
            params,
            algebra: calculus.algebra().clone(),
            calculus: Some(calculus),
            pair: Some(pair),
            connection: Some(connection),
            notes: notes.to_string(),
        }
    }
}

/// Looks up a builtin by name; missing parameters take their defaults.
pub fn builtin(name: &str, params: &[Rational]) -> Result<ExampleBundle> {
    let no_params = |b: ExampleBundle| {
        if params.is_empty() {
            Ok(b)
        } else {
            Err(Error::Parameter(format!("{name} takes no parameters")))
        }
    };
    match name {
        "dual_numbers" => no_params(dual_numbers()),
        "group_algebra_z2" => no_params(group_algebra_z2()),
        "upper_triangular_2" => no_params(upper_triangular_2()),
        "matrix_2" => no_params(matrix_2()),
        "truncated_poly" => match params {
            [] => truncated_poly(3),
            [n] => truncated_poly(small_integer(n, "N")?),
            _ => Err(Error::Parameter("truncated_poly takes one parameter N".into())),
        },
        "quantum_plane_trunc" => match params {
            [] => quantum_plane_trunc(rat(2), 2),
            [q] => quantum_plane_trunc(q.clone(), 2),
            [q, d] => quantum_plane_trunc(q.clone(), small_integer(d, "D")?),
            _ => Err(Error::Parameter("quantum_plane_trunc takes parameters q and D".into())),
        },
        _ => Err(Error::UnknownBuiltin(name.to_string())),
    }
}

/// Every builtin with default parameters.
pub fn all_builtins() -> Vec<ExampleBundle> {
    BUILTIN_NAMES.iter().map(|n| builtin(n, &[]).expect("defaults are valid")).collect()
}

fn small_integer(r: &Rational, what: &str) -> Result<usize> {
    if !r.is_integer() {
        return Err(Error::Parameter(format!("{what} must be an integer, got {r}")));
    }
    r.to_integer()
        .to_usize()
        .ok_or_else(|| Error::Parameter(format!("{what} must be a small non-negative integer, got {r}")))
}

/// Parses `name` or `name(p1, p2, ...)` with rational parameters.
pub fn parse_builtin_spec(s: &str) -> Result<(String, Vec<Rational>)> {
    let s = s.trim();
    let (name, args) = match s.find('(') {
        None => (s, None),
        Some(open) => {
            let inner = s[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::Parameter(format!("unbalanced parentheses in {s:?}")))?;
            (&s[..open], Some(inner))
        }
    };
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(Error::UnknownBuiltin(name.to_string()));
    }
    let params = match args {
        None => Vec::new(),
        Some(a) if a.trim().is_empty() => Vec::new(),
        Some(a) => a.split(',').map(|p| parse_rational(p.trim())).collect::<Result<_>>()?,
    };
    Ok((name.to_string(), params))
}

fn names(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn action(dim: usize, entries: &[i64]) -> Matrix {
    Matrix::from_i64(dim, dim, entries)
}

fn dual_numbers_algebra() -> Arc<Algebra> {
    let a = Algebra::from_fn(names(&["1", "x"]), vec![rat(1), rat(0)], |i, j| match (i, j) {
        (0, k) | (k, 0) => unit_vec(2, k),
        _ => zero_vec(2),
    })
    .expect("dual numbers");
    Arc::new(a)
}

/// `span{w}` with `1` acting as the identity and `x` as zero on both sides.
fn dual_numbers_trivial_module(a: &Arc<Algebra>, dim: usize) -> Bimodule {
    let acts = vec![Matrix::identity(dim), Matrix::zeros(dim, dim)];
    Bimodule::new(a.clone(), dim, acts.clone(), acts).expect("x acts as zero")
}

/// `Q[x]/(x^2)` with `dx` spanning the one-forms.
pub fn dual_numbers() -> ExampleBundle {
    let a = dual_numbers_algebra();
    let m = dual_numbers_trivial_module(&a, 1);
    let c = DifferentialCalculus::new(m, Matrix::from_i64(1, 2, &[0, 1])).expect("shape");
    ExampleBundle::with_calculus("dual_numbers", Vec::new(), c, "x^2 = 0, one-forms spanned by dx with x.dx = dx.x = 0")
}

fn truncated_poly_algebra(n: usize) -> Arc<Algebra> {
    let names = (0..n)
        .map(|k| match k {
            0 => "1".to_string(),
            1 => "x".to_string(),
            _ => format!("x^{k}"),
        })
        .collect();
    let a = Algebra::from_fn(names, unit_vec(n, 0), |i, j| if i + j < n { unit_vec(n, i + j) } else { zero_vec(n) })
        .expect("truncated polynomials");
    Arc::new(a)
}

/// `Q[x]/(x^N)` with one-forms `A dx / (N x^(N-1) dx)`, basis `x^k dx` for `k < N - 1`.
pub fn truncated_poly(n: usize) -> Result<ExampleBundle> {
    if n == 0 || n > MAX_TRUNCATION {
        return Err(Error::Parameter(format!("truncated_poly needs 1 <= N <= {MAX_TRUNCATION}, got {n}")));
    }
    let a = truncated_poly_algebra(n);
    let dim = n - 1;
    let shift = |i: usize| {
        let mut m = Matrix::zeros(dim, dim);
        for k in 0..dim {
            if i + k < dim {
                m.set(i + k, k, rat(1));
            }
        }
        m
    };
    let acts: Vec<Matrix> = (0..n).map(shift).collect();
    let m = Bimodule::new(a, dim, acts.clone(), acts).expect("symmetric module");
    let mut d = Matrix::zeros(dim, n);
    for j in 1..n {
        d.set(j - 1, j, rat(j as i64));
    }
    let c = DifferentialCalculus::new(m, d).expect("shape");
    let params = vec![rat(n as i64)];
    Ok(ExampleBundle::with_calculus("truncated_poly", params, c, "x^N = 0, d(x^k) = k x^(k-1) dx"))
}

/// `Q[Z/2]` with the zero differential on the regular bimodule.
///
/// The algebra is commutative and semisimple, so it has no nonzero derivations
/// into symmetric bimodules.
pub fn group_algebra_z2() -> ExampleBundle {
    let a = Algebra::from_fn(names(&["1", "g"]), vec![rat(1), rat(0)], |i, j| unit_vec(2, (i + j) % 2))
        .expect("group algebra");
    let a = Arc::new(a);
    let c = DifferentialCalculus::zero(Bimodule::regular(&a));
    ExampleBundle::with_calculus("group_algebra_z2", Vec::new(), c, "g^2 = 1, zero differential")
}

/// Upper triangular 2x2 matrices with `df = [e12, f]`.
pub fn upper_triangular_2() -> ExampleBundle {
    // (row, col) of e11, e12, e22
    const IDX: [(usize, usize); 3] = [(0, 0), (0, 1), (1, 1)];
    let a = Algebra::from_fn(names(&["e11", "e12", "e22"]), vec![rat(1), rat(0), rat(1)], |i, j| {
        let ((r, c), (r2, c2)) = (IDX[i], IDX[j]);
        if c == r2 {
            unit_vec(3, IDX.iter().position(|&p| p == (r, c2)).expect("upper triangular"))
        } else {
            zero_vec(3)
        }
    })
    .expect("upper triangular matrices");
    let a = Arc::new(a);
    let c = DifferentialCalculus::inner(&a, &a.basis(1)).expect("shape");
    ExampleBundle::with_calculus("upper_triangular_2", Vec::new(), c, "inner calculus df = e12 f - f e12")
}

/// Full 2x2 matrices with `df = [e11, f]`.
pub fn matrix_2() -> ExampleBundle {
    let a = Algebra::from_fn(
        names(&["e11", "e12", "e21", "e22"]),
        vec![rat(1), rat(0), rat(0), rat(1)],
        |i, j| {
            let (r, c, r2, c2) = (i / 2, i % 2, j / 2, j % 2);
            if c == r2 {
                unit_vec(4, r * 2 + c2)
            } else {
                zero_vec(4)
            }
        },
    )
    .expect("matrix algebra");
    let a = Arc::new(a);
    let c = DifferentialCalculus::inner(&a, &a.basis(0)).expect("shape");
    ExampleBundle::with_calculus("matrix_2", Vec::new(), c, "inner calculus df = e11 f - f e11")
}

/// Exponents `(a, b)` of `x^a y^b` with `a + b <= d`, by degree and then by falling `a`.
pub fn quantum_plane_monomials(d: usize) -> Vec<(usize, usize)> {
    (0..=d).flat_map(|t| (0..=t).rev().map(move |a| (a, t - a))).collect()
}

fn monomial_name(a: usize, b: usize) -> String {
    let part = |v: &str, e: usize| match e {
        0 => String::new(),
        1 => v.to_string(),
        _ => format!("{v}^{e}"),
    };
    let s = format!("{}{}", part("x", a), part("y", b));
    if s.is_empty() {
        "1".to_string()
    } else {
        s
    }
}

fn pow(q: &Rational, e: usize) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * q)
}

/// `[a]_q = 1 + q + ... + q^(a-1)`.
fn q_integer(q: &Rational, a: usize) -> Rational {
    (0..a).fold(Rational::zero(), |acc, k| acc + pow(q, k))
}

/// `Q<x, y>/(yx - qxy)` truncated above degree `D`.
///
/// The one-forms are `A` with the right action twisted by `x^a y^b -> q^a x^a y^b`,
/// and `d(x^a y^b) = [a]_q x^a y^b`.
pub fn quantum_plane_trunc(q: Rational, d: usize) -> Result<ExampleBundle> {
    if q.is_zero() {
        return Err(Error::Parameter("quantum_plane_trunc needs q != 0".into()));
    }
    if d > MAX_DEGREE {
        return Err(Error::Parameter(format!("quantum_plane_trunc needs D <= {MAX_DEGREE}, got {d}")));
    }
    let monos = quantum_plane_monomials(d);
    let n = monos.len();
    let index = |a: usize, b: usize| monos.iter().position(|&m| m == (a, b));
    let names = monos.iter().map(|&(a, b)| monomial_name(a, b)).collect();
    let alg = Algebra::from_fn(names, unit_vec(n, 0), |i, j| {
        let ((a, b), (c, e)) = (monos[i], monos[j]);
        match index(a + c, b + e) {
            Some(k) => {
                let mut v = zero_vec(n);
                v[k] = pow(&q, b * c);
                v
            }
            None => zero_vec(n),
        }
    })?;
    let alg = Arc::new(alg);
    let left: Vec<Matrix> = (0..n).map(|i| alg.left_mult_basis(i).clone()).collect();
    let right: Vec<Matrix> = (0..n).map(|i| alg.right_mult_basis(i).scale(&pow(&q, monos[i].0))).collect();
    let m = Bimodule::new(alg.clone(), n, left, right)?;
    let mut diff = Matrix::zeros(n, n);
    for (k, &(a, _)) in monos.iter().enumerate() {
        diff.set(k, k, q_integer(&q, a));
    }
    let c = DifferentialCalculus::new(m, diff)?;
    let notes = "yx = q xy truncated above degree D, twisted right action, q-Euler differential";
    Ok(ExampleBundle::with_calculus("quantum_plane_trunc", vec![q, rat(d as i64)], c, notes))
}

/// Structures that fail their checks in known ways.
pub mod fixtures {
    use super::*;

    /// The dual-numbers one-forms with `d(1) = dx`.
    pub fn dual_numbers_bad_unit_differential() -> DifferentialCalculus {
        let a = dual_numbers_algebra();
        let m = dual_numbers_trivial_module(&a, 1);
        DifferentialCalculus::new(m, Matrix::from_i64(1, 2, &[1, 1])).expect("shape")
    }

    /// `span{dx, t}` with `d(x) = dx`; `t` is not reached by the differential.
    pub fn dual_numbers_kahler_plus_trivial() -> DifferentialCalculus {
        let a = dual_numbers_algebra();
        let m = dual_numbers_trivial_module(&a, 2);
        DifferentialCalculus::new(m, Matrix::from_i64(2, 2, &[0, 1, 0, 0])).expect("shape")
    }

    /// `X(1) = 0, X(x) = 1` on a field with `x.X = X.x = 0`.
    pub fn dual_numbers_plain_derivative_pair() -> CartanPair {
        let a = dual_numbers_algebra();
        CartanPair::new(dual_numbers_trivial_module(&a, 1), vec![action(2, &[0, 1, 0, 0])]).expect("shapes")
    }

    /// A field acting as the identity, so `X(1) != 0`.
    pub fn dual_numbers_vacuum_violation() -> CartanPair {
        let a = dual_numbers_algebra();
        CartanPair::new(dual_numbers_trivial_module(&a, 1), vec![Matrix::identity(2)]).expect("shapes")
    }

    /// The valid field `x d/dx` next to a field acting as zero.
    pub fn dual_numbers_pair_with_null_field() -> CartanPair {
        let a = dual_numbers_algebra();
        let m = dual_numbers_trivial_module(&a, 2);
        CartanPair::new(m, vec![action(2, &[0, 0, 0, 1]), Matrix::zeros(2, 2)]).expect("shapes")
    }

    /// `(x^k)(f) = x^k f'` on the regular bimodule of `Q[x]/(x^N)`.
    ///
    /// Fails the twisted Leibniz rule exactly on pairs of total degree `N`.
    pub fn naive_derivative_pair(n: usize) -> Result<CartanPair> {
        if !(2..=MAX_TRUNCATION).contains(&n) {
            return Err(Error::Parameter(format!("naive derivative needs 2 <= N <= {MAX_TRUNCATION}, got {n}")));
        }
        let a = truncated_poly_algebra(n);
        let actions = (0..n)
            .map(|k| {
                let mut m = Matrix::zeros(n, n);
                for j in 1..n {
                    if k + j - 1 < n {
                        m.set(k + j - 1, j, rat(j as i64));
                    }
                }
                m
            })
            .collect();
        CartanPair::new(Bimodule::regular(&a), actions)
    }

    /// `nabla = 0` on `A` over the dual-numbers calculus.
    pub fn dual_numbers_zero_connection() -> Connection {
        let b = dual_numbers();
        let c = b.calculus.expect("calculus");
        let e = crate::algebra::LeftModule::free(&b.algebra, 1);
        Connection::new(c, e, Matrix::zeros(1, 2)).expect("shapes")
    }

    /// Every planted failure, by name.
    pub fn names() -> &'static [&'static str] {
        &[
            "dual_numbers_bad_unit_differential",
            "dual_numbers_kahler_plus_trivial",
            "dual_numbers_plain_derivative_pair",
            "dual_numbers_vacuum_violation",
            "dual_numbers_pair_with_null_field",
            "naive_derivative_pair",
            "dual_numbers_zero_connection",
        ]
    }
}

/// Coordinates of `x^a y^b` in [`quantum_plane_trunc`] of degree `d`.
pub fn quantum_plane_index(d: usize, a: usize, b: usize) -> Option<usize> {
    quantum_plane_monomials(d).iter().position(|&m| m == (a, b))
}
