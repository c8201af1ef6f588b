//! Exact dense linear algebra over the rationals.
//!
//! Everything here is deliberately small and dense: ambient dimensions stay
//! around a hundred (endomorphisms of a ten-dimensional algebra), so plain
//! row-major storage with zero-skipping elimination is fast enough and keeps
//! every result exact.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact scalar. Always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Coordinate vector.
pub type Vector = Vec<Rational>;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero_vec(len: usize) -> Vector {
    vec![Rational::zero(); len]
}

pub fn unit_vec(len: usize, at: usize) -> Vector {
    let mut v = zero_vec(len);
    v[at] = Rational::one();
    v
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// `dst += factor * src`, skipping zero entries of `src`.
pub fn axpy(dst: &mut [Rational], factor: &Rational, src: &[Rational]) {
    debug_assert_eq!(dst.len(), src.len());
    if factor.is_zero() {
        return;
    }
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d += factor * s;
        }
    }
}

pub fn scale_vec(v: &[Rational], factor: &Rational) -> Vector {
    v.iter().map(|x| x * factor).collect()
}

pub fn add_vec(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vec(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Parses `p`, `-p` or `p/q` exactly. Whitespace, decimals and zero
/// denominators are rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::ParseRational(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let int = |t: &str, allow_sign: bool| -> Result<BigInt> {
        let digits = match t.strip_prefix('-') {
            Some(rest) if allow_sign => rest,
            _ => t,
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        BigInt::from_str(t).map_err(|_| bad())
    };
    let n = int(num, true)?;
    let d = match den {
        Some(d) => int(d, false)?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(r).iter().map(format_rational).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: zero_vec(rows * cols) }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vector>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Builds a matrix from its columns; `rows` is needed when there are none.
    pub fn from_columns(rows: usize, columns: &[Vector]) -> Self {
        let cols = columns.len();
        let mut m = Matrix::zeros(rows, cols);
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (r, x) in col.iter().enumerate() {
                m.data[r * cols + c] = x.clone();
            }
        }
        m
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        Matrix::from_vec(rows, cols, entries.iter().map(|&x| rat(x)).collect())
            .expect("entry count")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vector {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    /// Row-major entries; the coordinates of the matrix as a vector.
    pub fn as_slice(&self) -> &[Rational] {
        &self.data
    }

    pub fn into_vec(self) -> Vector {
        self.data
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.data)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c).clone();
            }
        }
        t
    }

    pub fn scale(&self, k: &Rational) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: scale_vec(&self.data, k) }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vector {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension");
        let mut out = zero_vec(self.rows);
        for (c, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (r, o) in out.iter_mut().enumerate() {
                let a = &self.data[r * self.cols + c];
                if !a.is_zero() {
                    *o += a * x;
                }
            }
        }
        out
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[r * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                axpy(dst, a, other.row(k));
            }
        }
        Ok(out)
    }

    /// Kronecker product, with `(i, j)` blocks `self[i][j] * other`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Matrix::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.get(k, l);
                        if !b.is_zero() {
                            out.data[(i * other.rows + k) * cols + j * other.cols + l] = a * b;
                        }
                    }
                }
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut ech = RowEchelon::new(self.cols);
        for r in 0..self.rows {
            ech.insert(self.row(r).to_vec());
        }
        ech.rank()
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.try_mul(rhs).expect("matrix product dimensions")
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum dimensions");
        Matrix { rows: self.rows, cols: self.cols, data: add_vec(&self.data, &rhs.data) }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference dimensions");
        Matrix { rows: self.rows, cols: self.cols, data: sub_vec(&self.data, &rhs.data) }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }
}

/// Incrementally maintained reduced row echelon form.
///
/// Every stored row has a leading 1 at its pivot and zeros in every other
/// pivot column, so reducing a vector is a single pass over the rows.
#[derive(Clone, Debug)]
pub struct RowEchelon {
    cols: usize,
    rows: Vec<Vector>,
    pivots: Vec<usize>,
}

impl RowEchelon {
    pub fn new(cols: usize) -> Self {
        RowEchelon { cols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Subtracts the pivot rows from `v`; afterwards `v` vanishes on every pivot column.
    pub fn reduce(&self, v: &mut [Rational]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = -v[p].clone();
            axpy(v, &f, row);
        }
    }

    /// Like [`reduce`](Self::reduce) but also returns the multipliers used per stored row.
    pub fn reduce_tracking(&self, v: &mut [Rational]) -> Vec<(usize, Rational)> {
        let mut used = Vec::new();
        for (i, (row, &p)) in self.rows.iter().zip(&self.pivots).enumerate() {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            axpy(v, &-f.clone(), row);
            used.push((i, f));
        }
        used
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        is_zero_vec(&w)
    }

    /// Adds `v` to the row space. Returns false when `v` was already in it.
    pub fn insert(&mut self, mut v: Vector) -> bool {
        assert_eq!(v.len(), self.cols, "echelon row length");
        self.reduce(&mut v);
        self.push_reduced(v).is_some()
    }

    /// Pushes an already reduced vector; returns the index of the new row.
    fn push_reduced(&mut self, mut v: Vector) -> Option<usize> {
        let p = v.iter().position(|x| !x.is_zero())?;
        let inv = v[p].recip();
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        for row in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = -row[p].clone();
            axpy(row, &f, &v);
        }
        self.rows.push(v);
        self.pivots.push(p);
        Some(self.rows.len() - 1)
    }

    /// Rows sorted by pivot column.
    pub fn sorted_rows(&self) -> Vec<Vector> {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&i| self.pivots[i]);
        order.into_iter().map(|i| self.rows[i].clone()).collect()
    }

    pub fn into_subspace(self) -> Subspace {
        Subspace::from_echelon(self)
    }

    /// Basis of the null space of the stored rows, in canonical form.
    pub fn null_space(&self) -> Subspace {
        let mut is_pivot = vec![None; self.cols];
        for (i, &p) in self.pivots.iter().enumerate() {
            is_pivot[p] = Some(i);
        }
        let mut out = RowEchelon::new(self.cols);
        for free in (0..self.cols).filter(|&c| is_pivot[c].is_none()) {
            let mut v = unit_vec(self.cols, free);
            for (row, &p) in self.rows.iter().zip(&self.pivots) {
                if !row[free].is_zero() {
                    v[p] = -row[free].clone();
                }
            }
            out.insert(v);
        }
        out.into_subspace()
    }
}

/// Linear subspace of `Q^ambient`, stored as a reduced echelon basis so that
/// equal subspaces have identical representations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vector>,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {})", self.dim(), self.ambient)
    }
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: (0..ambient).map(|i| unit_vec(ambient, i)).collect(),
            pivots: (0..ambient).collect(),
        }
    }

    pub fn span<I: IntoIterator<Item = Vector>>(ambient: usize, vectors: I) -> Self {
        let mut ech = RowEchelon::new(ambient);
        for v in vectors {
            ech.insert(v);
        }
        ech.into_subspace()
    }

    fn from_echelon(ech: RowEchelon) -> Self {
        let mut pairs: Vec<(usize, Vector)> = ech.pivots.into_iter().zip(ech.rows).collect();
        pairs.sort_by_key(|(p, _)| *p);
        let (pivots, basis) = pairs.into_iter().unzip();
        Subspace { ambient: ech.cols, basis, pivots }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn echelon(&self) -> RowEchelon {
        RowEchelon { cols: self.ambient, rows: self.basis.clone(), pivots: self.pivots.clone() }
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.coordinates(v).is_some()
    }

    /// Coordinates of `v` in the echelon basis, or `None` when `v` lies outside.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vector> {
        assert_eq!(v.len(), self.ambient, "subspace ambient dimension");
        let coords: Vector = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut rest = v.to_vec();
        for (c, b) in coords.iter().zip(&self.basis) {
            axpy(&mut rest, &-c.clone(), b);
        }
        is_zero_vec(&rest).then_some(coords)
    }

    /// Vector with the given coordinates in the echelon basis.
    pub fn combine(&self, coords: &[Rational]) -> Vector {
        assert_eq!(coords.len(), self.dim(), "subspace coordinates");
        let mut v = zero_vec(self.ambient);
        for (c, b) in coords.iter().zip(&self.basis) {
            axpy(&mut v, c, b);
        }
        v
    }

    /// `ambient x dim` matrix whose columns are the basis vectors.
    pub fn inclusion(&self) -> Matrix {
        Matrix::from_columns(self.ambient, &self.basis)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let mut ech = self.echelon();
        for v in &other.basis {
            ech.insert(v.clone());
        }
        Ok(ech.into_subspace())
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other)?;
        Ok(self.basis.iter().all(|v| other.contains(v)))
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::Dimension(format!(
                "subspaces of Q^{} and Q^{}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }
}

/// Equality of subspaces; syntactic on the canonical bases.
pub fn subspace_equal(u: &Subspace, v: &Subspace) -> Result<bool> {
    u.check_ambient(v)?;
    Ok(u == v)
}

/// Null space of `a`.
pub fn kernel(a: &Matrix) -> Subspace {
    let mut ech = RowEchelon::new(a.cols());
    for r in 0..a.rows() {
        ech.insert(a.row(r).to_vec());
    }
    ech.null_space()
}

/// Some `x` with `a x = b`, or `None` when the system is inconsistent.
/// Free variables are set to zero, so the answer is canonical.
pub fn solve(a: &Matrix, b: &[Rational]) -> Result<Option<Vector>> {
    Ok(solve_affine(a, b)?.map(|(x, _)| x))
}

/// Full solution set of `a x = b`: a particular solution and the kernel of `a`.
pub fn solve_affine(a: &Matrix, b: &[Rational]) -> Result<Option<(Vector, Subspace)>> {
    if b.len() != a.rows() {
        return Err(Error::Dimension(format!(
            "right-hand side of length {} for {} equations",
            b.len(),
            a.rows()
        )));
    }
    let mut system = LinearSystem::new(a.cols());
    for r in 0..a.rows() {
        system.equation(a.row(r).to_vec(), b[r].clone());
    }
    Ok(system.solve())
}

/// Accumulates equations `row . x = rhs` one at a time, echelonizing as it goes.
///
/// Useful for systems built from many structured constraints (intertwining
/// conditions and the like), where materializing the full matrix would be
/// wasteful.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    unknowns: usize,
    ech: RowEchelon,
    inconsistent: bool,
}

impl LinearSystem {
    pub fn new(unknowns: usize) -> Self {
        LinearSystem { unknowns, ech: RowEchelon::new(unknowns + 1), inconsistent: false }
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn equation(&mut self, mut coeffs: Vector, rhs: Rational) {
        assert_eq!(coeffs.len(), self.unknowns, "equation length");
        if self.inconsistent {
            return;
        }
        coeffs.push(rhs);
        self.ech.reduce(&mut coeffs);
        if let Some(i) = self.ech.push_reduced(coeffs) {
            if self.ech.pivots[i] == self.unknowns {
                self.inconsistent = true;
            }
        }
    }

    /// Adds a homogeneous equation given sparsely as `(unknown, coefficient)` pairs.
    pub fn sparse_equation(&mut self, terms: &[(usize, Rational)], rhs: Rational) {
        let mut row = zero_vec(self.unknowns);
        for (i, c) in terms {
            row[*i] += c;
        }
        if is_zero_vec(&row) && rhs.is_zero() {
            return;
        }
        self.equation(row, rhs);
    }

    pub fn is_consistent(&self) -> bool {
        !self.inconsistent
    }

    pub fn rank(&self) -> usize {
        self.ech.rank()
    }

    /// Particular solution (free variables zero) and homogeneous solution space.
    pub fn solve(&self) -> Option<(Vector, Subspace)> {
        if self.inconsistent {
            return None;
        }
        let n = self.unknowns;
        let mut x = zero_vec(n);
        for (row, &p) in self.ech.rows.iter().zip(&self.ech.pivots) {
            x[p] = row[n].clone();
        }
        let mut homogeneous = RowEchelon::new(n);
        for (row, &p) in self.ech.rows.iter().zip(&self.ech.pivots) {
            homogeneous.rows.push(row[..n].to_vec());
            homogeneous.pivots.push(p);
        }
        Some((x, homogeneous.null_space()))
    }
}

/// Smallest subspace containing `seed` and closed under the bilinear `step`.
///
/// Closure is checked on pairs of spanning vectors, which suffices because
/// `step` is bilinear. The dimension grows with every accepted vector and is
/// bounded by the ambient dimension, so the loop terminates.
pub fn span_closure<F>(ambient: usize, seed: &[Vector], step: F) -> Subspace
where
    F: Fn(&[Rational], &[Rational]) -> Vector,
{
    let mut ech = RowEchelon::new(ambient);
    let mut spanning: Vec<Vector> = Vec::new();
    for v in seed {
        if ech.insert(v.clone()) {
            spanning.push(v.clone());
        }
    }
    let mut next = 0;
    while next < spanning.len() {
        let v = spanning[next].clone();
        for j in 0..=next {
            let u = spanning[j].clone();
            for w in [step(&u, &v), step(&v, &u)] {
                if ech.insert(w.clone()) {
                    spanning.push(w);
                }
            }
        }
        next += 1;
    }
    ech.into_subspace()
}

/// Smallest subspace containing `seed` and invariant under every operator.
pub fn invariant_closure(ambient: usize, seed: &[Vector], operators: &[Matrix]) -> Subspace {
    let mut ech = RowEchelon::new(ambient);
    let mut queue: Vec<Vector> = Vec::new();
    for v in seed {
        if ech.insert(v.clone()) {
            queue.push(v.clone());
        }
    }
    while let Some(v) = queue.pop() {
        for op in operators {
            let w = op.mul_vec(&v);
            if ech.insert(w.clone()) {
                queue.push(w);
            }
        }
    }
    ech.into_subspace()
}

/// Equations for `T p_i = q_i T` over all pairs, with `T` a `rows x cols`
/// unknown matrix stored row-major (`T[r][c]` is unknown `r * cols + c`).
pub fn add_intertwining_equations(
    system: &mut LinearSystem,
    rows: usize,
    cols: usize,
    pairs: &[(&Matrix, &Matrix)],
) {
    for (p, q) in pairs {
        debug_assert_eq!((p.rows(), p.cols()), (cols, cols));
        debug_assert_eq!((q.rows(), q.cols()), (rows, rows));
        for r in 0..rows {
            for c in 0..cols {
                let mut terms = Vec::new();
                for k in 0..cols {
                    let x = p.get(k, c);
                    if !x.is_zero() {
                        terms.push((r * cols + k, x.clone()));
                    }
                }
                for k in 0..rows {
                    let x = q.get(r, k);
                    if !x.is_zero() {
                        terms.push((k * cols + c, -x.clone()));
                    }
                }
                system.sparse_equation(&terms, Rational::zero());
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vector {
        xs.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn solve_identity_returns_rhs() {
        let b = v(&[3, -1, 7]);
        assert_eq!(solve(&Matrix::identity(3), &b).unwrap(), Some(b));
    }

    #[test]
    fn solve_detects_inconsistent_row() {
        let a = Matrix::from_i64(2, 2, &[1, 1, 0, 0]);
        assert_eq!(solve(&a, &v(&[1, 1])).unwrap(), None);
    }

    #[test]
    fn solve_diagonal() {
        let a = Matrix::from_i64(2, 2, &[2, 0, 0, 3]);
        assert_eq!(solve(&a, &v(&[1, 1])).unwrap(), Some(vec![ratio(1, 2), ratio(1, 3)]));
    }

    #[test]
    fn solve_rejects_bad_rhs() {
        assert!(solve(&Matrix::identity(2), &v(&[1])).is_err());
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel(&Matrix::zeros(2, 2)), Subspace::full(2));
        assert!(kernel(&Matrix::identity(3)).is_zero());
        let k = kernel(&Matrix::from_i64(1, 2, &[1, 1]));
        assert_eq!(k.basis(), &[v(&[1, -1])]);
    }

    fn matmul_step(n: usize) -> impl Fn(&[Rational], &[Rational]) -> Vector {
        move |a, b| {
            let a = Matrix::from_vec(n, n, a.to_vec()).unwrap();
            let b = Matrix::from_vec(n, n, b.to_vec()).unwrap();
            (&a * &b).into_vec()
        }
    }

    #[test]
    fn closure_examples() {
        let id = Matrix::identity(2).into_vec();
        assert_eq!(span_closure(4, &[id.clone()], matmul_step(2)).dim(), 1);
        let e12 = v(&[0, 1, 0, 0]);
        let e21 = v(&[0, 0, 1, 0]);
        assert_eq!(span_closure(4, &[e12, e21], matmul_step(2)), Subspace::full(4));
        assert!(span_closure(4, &[], matmul_step(2)).is_zero());
    }

    #[test]
    fn subspace_equality() {
        let u = Subspace::span(2, [v(&[1, 0])]);
        assert!(subspace_equal(&u, &u).unwrap());
        assert!(subspace_equal(&u, &Subspace::span(2, [v(&[2, 0])])).unwrap());
        assert!(!subspace_equal(&u, &Subspace::span(2, [v(&[0, 1])])).unwrap());
        assert!(subspace_equal(&u, &Subspace::zero(3)).is_err());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3").unwrap(), rat(3));
        assert_eq!(parse_rational("-2/4").unwrap(), ratio(-1, 2));
        for bad in ["1/0", "", "1.5", " 1", "1/-2", "--1", "/3", "3/", "+1", "1/2/3"] {
            assert!(parse_rational(bad).is_err(), "{bad:?} should not parse");
        }
        assert_eq!(format_rational(&ratio(6, -4)), "-3/2");
        assert_eq!(format_rational(&rat(5)), "5");
    }

    #[test]
    fn kron_of_identities() {
        assert_eq!(Matrix::identity(2).kron(&Matrix::identity(3)), Matrix::identity(6));
    }

    #[test]
    fn affine_solution_space() {
        let a = Matrix::from_i64(1, 3, &[1, 1, 1]);
        let (x, k) = solve_affine(&a, &v(&[2])).unwrap().unwrap();
        assert_eq!(a.mul_vec(&x), v(&[2]));
        assert_eq!(k.dim(), 2);
    }
}
