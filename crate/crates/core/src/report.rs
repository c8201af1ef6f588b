//! Witness-carrying reports shared by every axiom checker.

use std::fmt;

use crate::linalg::{format_rational, Vector};

/// The identity a violation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Law {
    /// `(e_i e_j) e_l = e_i (e_j e_l)`, witness `(i, j, l)`.
    Associativity,
    /// `1 e_i = e_i`, witness `(i)`.
    LeftUnit,
    /// `e_i 1 = e_i`, witness `(i)`.
    RightUnit,
    /// `L(e_i e_j) = L(e_i) L(e_j)`, witness `(i, j)`.
    LeftActionProduct,
    /// `L(1) = id`.
    LeftActionUnit,
    /// `R(e_i e_j) = R(e_j) R(e_i)`, witness `(i, j)`.
    RightActionProduct,
    /// `R(1) = id`.
    RightActionUnit,
    /// `L(e_i) R(e_j) = R(e_j) L(e_i)`, witness `(i, j)`.
    ActionsCommute,
    /// `T L(e_i) = L'(e_i) T`, witness `(i)`.
    IntertwinesLeft,
    /// `T R(e_i) = R'(e_i) T`, witness `(i)`.
    IntertwinesRight,
    /// `d(e_i e_j) = d(e_i).e_j + e_i.d(e_j)`, witness `(i, j)`.
    Leibniz,
    /// `(e_i.X_k)(e_j) = e_i X_k(e_j)`, witness `(i, k, j)`.
    CartanLeftLinear,
    /// `X_k(e_i e_j) = X_k(e_i) e_j + (X_k.e_i)(e_j)`, witness `(k, i, j)`.
    CartanTwistedLeibniz,
    /// `X_k(1) = 0`, witness `(k)`.
    CartanUnit,
    /// Vacuum annihilation `X_k(1) = 0` in the operator representation, witness `(k)`.
    FockAnnihilation,
    /// Creation on the vacuum `e_i^l(1) = e_i`, witness `(i)`.
    FockCreation,
    /// `nabla(e_i.xi_b) = e_i.nabla(xi_b) + d(e_i) (x) xi_b`, witness `(i, b)`.
    ConnectionLeibniz,
    /// `nabla_{e_i.X_k} xi_b = e_i.nabla_{X_k} xi_b`, witness `(i, k, b)`.
    CovariantLeftLinear,
    /// `nabla_{X_k}(e_i.xi_b) = X_k(e_i).xi_b + nabla_{X_k.e_i} xi_b`, witness `(k, i, b)`.
    CovariantTwistedLeibniz,
    /// Contraction with `X_k` kills the balancing relation `r`, witness `(k, r)`.
    ContractionBalanced,
    /// Left action on `M (x)_A E` preserves the balancing relations, witness `(i, r)`.
    TensorActionWellDefined,
}

impl Law {
    pub fn key(self) -> &'static str {
        match self {
            Law::Associativity => "associativity",
            Law::LeftUnit => "left_unit",
            Law::RightUnit => "right_unit",
            Law::LeftActionProduct => "left_action_product",
            Law::LeftActionUnit => "left_action_unit",
            Law::RightActionProduct => "right_action_product",
            Law::RightActionUnit => "right_action_unit",
            Law::ActionsCommute => "actions_commute",
            Law::IntertwinesLeft => "intertwines_left",
            Law::IntertwinesRight => "intertwines_right",
            Law::Leibniz => "leibniz",
            Law::CartanLeftLinear => "cartan_left_linear",
            Law::CartanTwistedLeibniz => "cartan_twisted_leibniz",
            Law::CartanUnit => "cartan_unit",
            Law::FockAnnihilation => "fock_annihilation",
            Law::FockCreation => "fock_creation",
            Law::ConnectionLeibniz => "connection_leibniz",
            Law::CovariantLeftLinear => "covariant_left_linear",
            Law::CovariantTwistedLeibniz => "covariant_twisted_leibniz",
            Law::ContractionBalanced => "contraction_balanced",
            Law::TensorActionWellDefined => "tensor_action_well_defined",
        }
    }
}

/// What each witness index of a law ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    /// A basis element of the algebra.
    Algebra,
    /// A basis element of the bimodule of fields.
    Field,
    /// A basis element of a left module.
    Module,
    /// A basis vector of a relation subspace.
    Relation,
}

impl Law {
    pub fn slots(self) -> &'static [Slot] {
        use Slot::*;
        match self {
            Law::Associativity => &[Algebra, Algebra, Algebra],
            Law::LeftUnit | Law::RightUnit | Law::FockCreation => &[Algebra],
            Law::IntertwinesLeft | Law::IntertwinesRight => &[Algebra],
            Law::LeftActionUnit | Law::RightActionUnit => &[],
            Law::LeftActionProduct | Law::RightActionProduct | Law::ActionsCommute | Law::Leibniz => {
                &[Algebra, Algebra]
            }
            Law::CartanLeftLinear => &[Algebra, Field, Algebra],
            Law::CartanTwistedLeibniz => &[Field, Algebra, Algebra],
            Law::CartanUnit | Law::FockAnnihilation => &[Field],
            Law::ConnectionLeibniz => &[Algebra, Module],
            Law::CovariantLeftLinear => &[Algebra, Field, Module],
            Law::CovariantTwistedLeibniz => &[Field, Algebra, Module],
            Law::ContractionBalanced => &[Field, Relation],
            Law::TensorActionWellDefined => &[Algebra, Relation],
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// One failed instance of a law: the basis indices involved and the
/// coordinates of `lhs - rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub law: Law,
    pub witness: Vec<usize>,
    pub defect: Vector,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.witness.iter().map(usize::to_string).collect();
        let d: Vec<String> = self.defect.iter().map(format_rational).collect();
        write!(f, "{} at ({}): defect [{}]", self.law, w.join(", "), d.join(", "))
    }
}

/// Ordered list of violations; empty means every checked instance holds.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    violations: Vec<Violation>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn of_law(&self, law: Law) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(move |v| v.law == law)
    }

    pub fn has(&self, law: Law, witness: &[usize]) -> bool {
        self.of_law(law).any(|v| v.witness == witness)
    }

    pub fn push(&mut self, law: Law, witness: Vec<usize>, defect: Vector) {
        self.violations.push(Violation { law, witness, defect });
    }

    /// Records a violation when `lhs != rhs`.
    pub fn expect_eq(&mut self, law: Law, witness: &[usize], lhs: &[crate::linalg::Rational], rhs: &[crate::linalg::Rational]) {
        if lhs != rhs {
            self.push(law, witness.to_vec(), crate::linalg::sub_vec(lhs, rhs));
        }
    }

    pub fn merge(&mut self, other: Report) {
        self.violations.extend(other.violations);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "no violations");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}
