//! Composition, inversion and the Glob/Loc actions on vectorial operations.

mod layered;

use crate::bases::BasisTag;
use crate::coeff::Coeff;
use crate::fqop::{extract_coordinates, first_differential, FQOperation, FirstDifferential, OperationKind};
use crate::ncalgebra::{substitute_series, AlgebraElement, CliffordPart};
use crate::rational::Rational;
use crate::word::Word;
use crate::Error;

pub use layered::{
    conjugation_form, conjugation_product, layered_equations, layered_maps, ConjugationForm, Context, LayeredMaps,
    MapName, SliceMap, SlicePoint, SliceShape,
};

fn q_of(j: usize) -> CliffordPart {
    if j == 0 {
        CliffordPart::Q1
    } else {
        CliffordPart::Q2
    }
}

/// `outer` evaluated at the pair `inner`: each component `f_s(r′)·Q^{[s]}` with `r′` the
/// coordinates of `inner − (Q₁, Q₂)` in the outer basis.
pub fn compose_elements<C: Coeff>(
    outer: &FQOperation<C>,
    inner: &[AlgebraElement<C>; 2],
    order: usize,
) -> Result<Vec<AlgebraElement<C>>, Error> {
    let b = inner[0].basis();
    let mut r = Vec::with_capacity(2);
    for (j, x) in inner.iter().enumerate() {
        let x = x.truncate(order);
        let q = AlgebraElement::clifford(b, order, q_of(j));
        if x.coeff(&Word::EMPTY, q_of(j)).as_constant() != Some(num_traits::One::one()) {
            return Err(Error::Unsupported("inner pair is not Clifford conservative".into()));
        }
        r.push(x.sub(&q)?);
    }
    let coords = extract_coordinates(&r[0], &r[1], outer.basis())?;
    let mut out = Vec::with_capacity(outer.num_components());
    for (s, tail) in outer.kind().tails().iter().enumerate() {
        let f = substitute_series(outer.component(s), &coords, order)?;
        out.push(f.mul(&AlgebraElement::clifford(b, order, *tail))?);
    }
    Ok(out)
}

fn check_inner<C: Coeff>(inner: &FQOperation<C>) -> Result<(), Error> {
    if inner.kind() != OperationKind::Vectorial {
        return Err(Error::Kind("inner operation must be vectorial".into()));
    }
    if !inner.is_clifford_conservative() {
        return Err(Error::Unsupported("inner operation is not Clifford conservative".into()));
    }
    Ok(())
}

/// `outer ∘ inner`, in the outer basis, truncated to the smaller order.
pub fn compose<C: Coeff>(outer: &FQOperation<C>, inner: &FQOperation<C>) -> Result<FQOperation<C>, Error> {
    check_inner(inner)?;
    let order = outer.order().min(inner.order());
    let e = inner.transform(outer.basis()).truncate(order).elements();
    let vals = compose_elements(outer, &[e[0].clone(), e[1].clone()], order)?;
    FQOperation::from_elements(outer.kind(), &vals).map(|op| op.with_order(order))
}

/// `E`: the vectorial operation returning `(Q₁, Q₂)`.
pub fn base_operation<C: Coeff>(basis: BasisTag, order: usize) -> FQOperation<C> {
    FQOperation::constant_one(OperationKind::Vectorial, basis, order)
}

/// `Glob_L(Λ)`: `(E + T(L)) ∘ (E + Λ) = E + Glob_L(Λ)`.
pub fn glob<C: Coeff>(l: &FirstDifferential, lambda: &FQOperation<C>) -> Result<FQOperation<C>, Error> {
    let (b, order) = (lambda.basis(), lambda.order());
    let e = base_operation::<C>(b, order);
    let outer = l.to_operation::<C>(order).transform(b);
    compose(&outer, &e.add(lambda)?)?.sub(&e)
}

/// `Loc_L(Λ)`: `(E + Λ) ∘ (E + T(L)) = E + Loc_L(Λ)`.
pub fn loc<C: Coeff>(l: &FirstDifferential, lambda: &FQOperation<C>) -> Result<FQOperation<C>, Error> {
    let (b, order) = (lambda.basis(), lambda.order());
    let e = base_operation::<C>(b, order);
    let inner = l.to_operation::<C>(order).transform(b);
    compose(&e.add(lambda)?, &inner)?.sub(&e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Glob,
    Loc,
}

/// The Glob or Loc action on `op = E + Λ` with `Λ` homogeneous; returns `E` plus the image.
pub fn glob_loc(op: &FQOperation<Rational>, l: &FirstDifferential, side: Side) -> Result<FQOperation<Rational>, Error> {
    let e = base_operation::<Rational>(op.basis(), op.order());
    let lambda = op.sub(&e)?;
    let lens: std::collections::BTreeSet<usize> =
        lambda.components().iter().flat_map(|s| s.keys().map(Word::len)).collect();
    if lens.len() > 1 {
        return Err(Error::Unsupported("Λ is not homogeneous".into()));
    }
    let img = match side {
        Side::Glob => glob(l, &lambda)?,
        Side::Loc => loc(l, &lambda)?,
    };
    e.add(&img)
}

/// Inverse under composition by the fixed-point iteration `Φ ← Φ + Loc_{(DΨ)⁻¹}(Id − Φ∘Ψ)`.
pub fn invert(op: &FQOperation<Rational>) -> Result<FQOperation<Rational>, Error> {
    check_inner(op)?;
    let (b, order) = (op.basis(), op.order());
    let li = first_differential(op)?.inverse()?;
    let id = crate::fqop::builtin(crate::fqop::Builtin::Id, order, b)?;
    let mut phi = li.to_operation::<Rational>(order).transform(b);
    for _ in 0..=order {
        let err = id.sub(&compose(&phi, op)?)?;
        if err.is_zero() {
            return Ok(phi);
        }
        phi = phi.add(&loc(&li, &err)?)?;
    }
    let err = id.sub(&compose(&phi, op)?)?;
    if !err.is_zero() {
        return Err(Error::NotInvertible("inverse iteration did not converge".into()));
    }
    Ok(phi)
}

/// `(Ψ₁Ψ₁, Ψ₁Ψ₂ + Ψ₂Ψ₁, Ψ₂Ψ₂)` at the generic pair.
#[derive(Clone, Debug, PartialEq)]
pub struct OdotSquare<C: Coeff = Rational> {
    pub parts: [AlgebraElement<C>; 3],
}

impl<C: Coeff> OdotSquare<C> {
    /// Equal to `(−1, 0, −1)`.
    pub fn is_clifford(&self) -> bool {
        let b = self.parts[0].basis();
        let o = self.parts[0].order();
        let m1 = AlgebraElement::<C>::one(b, o).neg();
        self.parts[0] == m1 && self.parts[1].is_zero() && self.parts[2] == m1
    }
}

pub fn odot_square<C: Coeff>(op: &FQOperation<C>) -> Result<OdotSquare<C>, Error> {
    if op.kind() != OperationKind::Vectorial {
        return Err(Error::Kind("odot square of a non-vectorial operation".into()));
    }
    let e = op.elements();
    let a = e[0].mul(&e[0])?;
    let b = e[0].mul(&e[1])?.add(&e[1].mul(&e[0])?)?;
    let c = e[1].mul(&e[1])?;
    Ok(OdotSquare { parts: [a, b, c] })
}
