//! FQ operations: kind, per-component coefficient series, basis and truncation order.

mod builtins;
mod expr;
mod serial;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::bases::{basis_transform, transform_element, BasisTag};
use crate::coeff::Coeff;
use crate::ncalgebra::{AlgebraElement, CliffordPart};
use crate::rational::{fmt_rational, Rational};
use crate::word::Word;
use crate::Error;

pub use builtins::{
    builtin, builtin_names, clear_builtin_cache, floating_pair, floating_series, floating_series_conjugate, Builtin,
};
pub use expr::{
    evaluate_expression, evaluate_tree, extract_coordinates, generic_pair, parse_expression, pol, Expression,
};
pub use serial::{parse_operation, serialize_operation};

pub type Series<C> = BTreeMap<Word, C>;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum OperationKind {
    Scalar,
    Vectorial,
    Pseudoscalar,
}

impl OperationKind {
    pub fn labels(self) -> &'static [&'static str] {
        match self {
            OperationKind::Scalar => &["0"],
            OperationKind::Vectorial => &["1", "2"],
            OperationKind::Pseudoscalar => &["12"],
        }
    }

    pub fn tails(self) -> &'static [CliffordPart] {
        match self {
            OperationKind::Scalar => &[CliffordPart::One],
            OperationKind::Vectorial => &[CliffordPart::Q1, CliffordPart::Q2],
            OperationKind::Pseudoscalar => &[CliffordPart::Q1Q2],
        }
    }

    pub fn num_components(self) -> usize {
        self.tails().len()
    }

    /// `(−1)^{[s]}`: −1 only for the second vectorial component.
    pub fn sign(self, comp: usize) -> i8 {
        if self == OperationKind::Vectorial && comp == 1 {
            -1
        } else {
            1
        }
    }

    pub fn component_of_label(self, label: &str) -> Option<usize> {
        self.labels().iter().position(|l| *l == label)
    }

    pub fn name(self) -> &'static str {
        match self {
            OperationKind::Scalar => "scalar",
            OperationKind::Vectorial => "vectorial",
            OperationKind::Pseudoscalar => "pseudoscalar",
        }
    }
}

impl fmt::Display for OperationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OperationKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "scalar" | "s" => Ok(OperationKind::Scalar),
            "vectorial" | "vector" | "v" => Ok(OperationKind::Vectorial),
            "pseudoscalar" | "pseudo" | "ps" => Ok(OperationKind::Pseudoscalar),
            other => Err(Error::Parse(format!("unknown kind `{other}`"))),
        }
    }
}

/// A pointed expansion `f_s(r) · Q^{[s]}` per component.
#[derive(Clone, PartialEq)]
pub struct FQOperation<C: Coeff = Rational> {
    kind: OperationKind,
    basis: BasisTag,
    order: usize,
    components: Vec<Series<C>>,
}

impl<C: Coeff> FQOperation<C> {
    pub fn zero(kind: OperationKind, basis: BasisTag, order: usize) -> Self {
        FQOperation { kind, basis, order, components: vec![BTreeMap::new(); kind.num_components()] }
    }

    pub fn from_components(
        kind: OperationKind,
        basis: BasisTag,
        order: usize,
        components: Vec<Series<C>>,
    ) -> Result<Self, Error> {
        if components.len() != kind.num_components() {
            return Err(Error::Kind(format!(
                "{kind} operations carry {} components, got {}",
                kind.num_components(),
                components.len()
            )));
        }
        let mut op = Self::zero(kind, basis, order);
        for (i, s) in components.into_iter().enumerate() {
            for (w, c) in s {
                op.set(i, w, c);
            }
        }
        Ok(op)
    }

    /// Clifford conservative zero-perturbation operation: order-0 coefficients 1.
    pub fn constant_one(kind: OperationKind, basis: BasisTag, order: usize) -> Self {
        let mut op = Self::zero(kind, basis, order);
        for i in 0..kind.num_components() {
            op.set(i, Word::EMPTY, C::unit());
        }
        op
    }

    pub fn kind(&self) -> OperationKind {
        self.kind
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Series<C>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Series<C> {
        &self.components[i]
    }

    pub fn coeff(&self, i: usize, w: &Word) -> C {
        self.components[i].get(w).cloned().unwrap_or_else(C::nil)
    }

    pub fn set(&mut self, i: usize, w: Word, c: C) {
        if w.len() > self.order {
            return;
        }
        if c.is_nil() {
            self.components[i].remove(&w);
        } else {
            self.components[i].insert(w, c);
        }
    }

    pub fn add_to(&mut self, i: usize, w: Word, c: &C) {
        if w.len() > self.order || c.is_nil() {
            return;
        }
        let e = self.components[i].entry(w).or_insert_with(C::nil);
        e.add_assign_ref(c);
        if e.is_nil() {
            self.components[i].remove(&w);
        }
    }

    /// Number of stored coefficients.
    pub fn support_size(&self) -> usize {
        self.components.iter().map(BTreeMap::len).sum()
    }

    /// The series of component `i` without its Clifford tail.
    pub fn series_element(&self, i: usize) -> AlgebraElement<C> {
        AlgebraElement::from_series(self.basis, self.order, &self.components[i], CliffordPart::One)
    }

    /// Component `i` as `f_s(r) · Q^{[s]}`.
    pub fn element(&self, i: usize) -> AlgebraElement<C> {
        AlgebraElement::from_series(self.basis, self.order, &self.components[i], self.kind.tails()[i])
    }

    pub fn elements(&self) -> Vec<AlgebraElement<C>> {
        (0..self.num_components()).map(|i| self.element(i)).collect()
    }

    /// Reads the coefficient tables back from component values `X_s`, dividing by the tails.
    pub fn from_elements(kind: OperationKind, elements: &[AlgebraElement<C>]) -> Result<Self, Error> {
        if elements.len() != kind.num_components() {
            return Err(Error::Kind(format!("{kind} needs {} components", kind.num_components())));
        }
        let basis = elements[0].basis();
        let order = elements.iter().map(AlgebraElement::order).min().unwrap_or(0);
        let mut comps = Vec::new();
        for (x, tail) in elements.iter().zip(kind.tails()) {
            let inv = AlgebraElement::<C>::clifford(basis, order, *tail).neumann_inverse()?;
            let y = x.mul(&inv)?;
            if let Some(g) = y.parts().into_iter().find(|g| *g != CliffordPart::One) {
                return Err(Error::Kind(format!("residual Clifford part {} in a {kind} component", g.name())));
            }
            comps.push(y.clifford_component(CliffordPart::One));
        }
        Self::from_components(kind, basis, order, comps)
    }

    /// Rewrites the coefficient tables in another basis, keeping the represented operation.
    pub fn transform(&self, to: BasisTag) -> Self {
        if to == self.basis {
            return self.clone();
        }
        let comps = (0..self.num_components())
            .map(|i| transform_element(&self.series_element(i), to).clifford_component(CliffordPart::One))
            .collect();
        FQOperation { kind: self.kind, basis: to, order: self.order, components: comps }
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        let comps = self
            .components
            .iter()
            .map(|s| s.iter().filter(|(w, _)| w.len() <= order).map(|(w, c)| (*w, c.clone())).collect())
            .collect();
        FQOperation { kind: self.kind, basis: self.basis, order, components: comps }
    }

    /// Declares a different truncation order, dropping terms beyond it.
    pub fn with_order(&self, order: usize) -> Self {
        let mut op = self.truncate(order);
        op.order = order;
        op
    }

    /// Coefficients of word length exactly `r`.
    pub fn homogeneous(&self, r: usize) -> Self {
        self.filter(|w| w.len() == r)
    }

    pub fn filter(&self, keep: impl Fn(&Word) -> bool) -> Self {
        let comps = self
            .components
            .iter()
            .map(|s| s.iter().filter(|(w, _)| keep(w)).map(|(w, c)| (*w, c.clone())).collect())
            .collect();
        FQOperation { kind: self.kind, basis: self.basis, order: self.order, components: comps }
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> FQOperation<D> {
        let comps = self
            .components
            .iter()
            .map(|s| {
                s.iter()
                    .filter_map(|(w, c)| {
                        let v = f(c);
                        (!v.is_nil()).then_some((*w, v))
                    })
                    .collect()
            })
            .collect();
        FQOperation { kind: self.kind, basis: self.basis, order: self.order, components: comps }
    }

    fn check_compatible(&self, o: &Self) -> Result<(), Error> {
        if self.kind != o.kind {
            return Err(Error::Kind(format!("{} vs {}", self.kind, o.kind)));
        }
        if self.basis != o.basis {
            return Err(Error::BasisMismatch(self.basis, o.basis));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self, Error> {
        self.check_compatible(o)?;
        let mut out = self.truncate(o.order);
        for (i, s) in o.components.iter().enumerate() {
            for (w, c) in s {
                out.add_to(i, *w, c);
            }
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self, Error> {
        self.add(&o.map_coeffs(|c| c.neg_ref()))
    }

    pub fn scale(&self, q: &Rational) -> Self {
        self.map_coeffs(|c| c.scale_ref(q))
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(BTreeMap::is_empty)
    }

    /// Order-0 coefficients all equal to one.
    pub fn is_clifford_conservative(&self) -> bool {
        self.components.iter().all(|s| s.get(&Word::EMPTY).and_then(C::as_constant) == Some(Rational::one()))
    }
}

impl FQOperation<Rational> {
    /// Row-major table of the order-`r` coefficients of component `i`, words enumerated
    /// lexicographically over `1..=8`.
    pub fn table(&self, i: usize, r: usize) -> Vec<Rational> {
        Word::all_of_length(r, &[1, 2, 3, 4, 5, 6, 7, 8]).iter().map(|w| self.coeff(i, w)).collect()
    }

    pub fn lift<D: Coeff>(&self) -> FQOperation<D> {
        self.map_coeffs(D::from_rational)
    }
}

impl<C: Coeff> fmt::Display for FQOperation<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} operation, {} basis, order {}", self.kind, self.basis, self.order)?;
        for (i, s) in self.components.iter().enumerate() {
            let label = self.kind.labels()[i];
            for (w, c) in s {
                writeln!(f, "  p[{label}]_{w} = {c}")?;
            }
        }
        Ok(())
    }
}

impl<C: Coeff> fmt::Debug for FQOperation<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Four 2×2 blocks `[[p¹_k, p¹_{k+4}], [p²_k, p²_{k+4}]]` of split order-1 coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FirstDifferential {
    pub blocks: [[[Rational; 2]; 2]; 4],
}

impl FirstDifferential {
    pub fn from_blocks(blocks: [[[i64; 2]; 2]; 4]) -> Self {
        FirstDifferential { blocks: blocks.map(|b| b.map(|row| row.map(crate::rational::int))) }
    }

    pub fn from_rational_blocks(blocks: [[[Rational; 2]; 2]; 4]) -> Self {
        FirstDifferential { blocks }
    }

    pub fn identity() -> Self {
        Self::from_blocks([[[1, 0], [0, 1]]; 4])
    }

    pub fn zero() -> Self {
        Self::from_blocks([[[0, 0], [0, 0]]; 4])
    }

    /// Componentwise matrix product `self · o`.
    pub fn mul(&self, o: &FirstDifferential) -> FirstDifferential {
        let blocks = std::array::from_fn(|k| {
            let (a, b) = (&self.blocks[k], &o.blocks[k]);
            std::array::from_fn(|i| std::array::from_fn(|j| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j]))
        });
        FirstDifferential { blocks }
    }

    pub fn inverse(&self) -> Result<FirstDifferential, Error> {
        let mut blocks = self.blocks.clone();
        for (k, b) in self.blocks.iter().enumerate() {
            let det = &b[0][0] * &b[1][1] - &b[0][1] * &b[1][0];
            if det.is_zero() {
                return Err(Error::NotInvertible(format!("differential block {} is singular", k + 1)));
            }
            blocks[k] = [[&b[1][1] / &det, -&b[0][1] / &det], [-&b[1][0] / &det, &b[0][0] / &det]];
        }
        Ok(FirstDifferential { blocks })
    }

    pub fn is_invertible(&self) -> bool {
        self.inverse().is_ok()
    }

    /// `E + T(L)`: the order-1 vectorial operation with this differential, split basis.
    pub fn to_operation<C: Coeff>(&self, order: usize) -> FQOperation<C> {
        let mut op = FQOperation::constant_one(OperationKind::Vectorial, BasisTag::Split, order);
        for (k, b) in self.blocks.iter().enumerate() {
            let k = k as u8 + 1;
            op.set(0, Word::letter(k), C::from_rational(&b[0][0]));
            op.set(0, Word::letter(k + 4), C::from_rational(&b[0][1]));
            op.set(1, Word::letter(k), C::from_rational(&b[1][0]));
            op.set(1, Word::letter(k + 4), C::from_rational(&b[1][1]));
        }
        op
    }

    /// `T(L)` alone, without the order-0 part.
    pub fn linear_part<C: Coeff>(&self, order: usize) -> FQOperation<C> {
        let mut op = self.to_operation::<C>(order);
        op.set(0, Word::EMPTY, C::nil());
        op.set(1, Word::EMPTY, C::nil());
        op
    }
}

impl fmt::Display for FirstDifferential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                format!(
                    "[[{}, {}], [{}, {}]]",
                    fmt_rational(&b[0][0]),
                    fmt_rational(&b[0][1]),
                    fmt_rational(&b[1][0]),
                    fmt_rational(&b[1][1])
                )
            })
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Reads the split-basis order-1 coefficients into four 2×2 blocks.
pub fn first_differential(op: &FQOperation<Rational>) -> Result<FirstDifferential, Error> {
    if op.kind() != OperationKind::Vectorial {
        return Err(Error::Kind(format!("first differential of a {} operation", op.kind())));
    }
    let s = op.transform(BasisTag::Split);
    let blocks = std::array::from_fn(|k| {
        let k = k as u8 + 1;
        [
            [s.coeff(0, &Word::letter(k)), s.coeff(0, &Word::letter(k + 4))],
            [s.coeff(1, &Word::letter(k)), s.coeff(1, &Word::letter(k + 4))],
        ]
    });
    Ok(FirstDifferential { blocks })
}

/// Coefficient transform matrix between bases, exposed for audits.
pub fn coefficient_transform(from: BasisTag, to: BasisTag) -> crate::bases::BasisTransform {
    basis_transform(from, to)
}
