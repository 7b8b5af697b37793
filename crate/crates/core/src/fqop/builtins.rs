//! Named operations, computed on demand and memoized.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num_traits::Zero;

use super::expr::{evaluate_expression, pol, Expression};
use super::{FQOperation, OperationKind};
use crate::bases::BasisTag;
use crate::coeff::{Coeff, Poly};
use crate::invariance::{natural_extend, natural_unit, unknown, unknown_of, PropertySpec};
use crate::linsolve::{eliminate, solve_operation};
use crate::ncalgebra::{AlgebraElement, CliffordPart};
use crate::rational::{frac, int, Rational};
use crate::word::Word;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Builtin {
    One,
    Id,
    PseudoDet,
    OSy,
    FSy,
    OfSy,
    OafSy,
    AxisL,
    AxisR,
    AxisC,
}

impl Builtin {
    pub const ALL: [Builtin; 10] = [
        Builtin::One,
        Builtin::Id,
        Builtin::PseudoDet,
        Builtin::OSy,
        Builtin::FSy,
        Builtin::OfSy,
        Builtin::OafSy,
        Builtin::AxisL,
        Builtin::AxisR,
        Builtin::AxisC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::One => "One",
            Builtin::Id => "Id",
            Builtin::PseudoDet => "PseudoDet",
            Builtin::OSy => "OSy",
            Builtin::FSy => "FSy",
            Builtin::OfSy => "OfSy",
            Builtin::OafSy => "OafSy",
            Builtin::AxisL => "AxisL",
            Builtin::AxisR => "AxisR",
            Builtin::AxisC => "AxisC",
        }
    }

    pub fn kind(self) -> OperationKind {
        match self {
            Builtin::One => OperationKind::Scalar,
            Builtin::PseudoDet | Builtin::AxisL | Builtin::AxisR | Builtin::AxisC => OperationKind::Pseudoscalar,
            _ => OperationKind::Vectorial,
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("D") {
            return Ok(Builtin::PseudoDet);
        }
        Builtin::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::UnknownBuiltin(t.to_string()))
    }
}

pub fn builtin_names() -> Vec<&'static str> {
    Builtin::ALL.iter().map(|b| b.name()).collect()
}

type Cache = Mutex<HashMap<Builtin, FQOperation<Rational>>>;

fn cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

fn floating_cache() -> &'static Mutex<Option<FQOperation<Rational>>> {
    static C: OnceLock<Mutex<Option<FQOperation<Rational>>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(None))
}

pub fn clear_builtin_cache() {
    cache().lock().unwrap().clear();
    *floating_cache().lock().unwrap() = None;
}

/// The builtin expanded to `order` in `basis`.
pub fn builtin(b: Builtin, order: usize, basis: BasisTag) -> Result<FQOperation<Rational>, Error> {
    if let Some(op) = cache().lock().unwrap().get(&b) {
        if op.order() >= order {
            return Ok(op.truncate(order).transform(basis));
        }
    }
    let op = compute(b, order)?;
    cache().lock().unwrap().insert(b, op.clone());
    Ok(op.transform(basis))
}

fn solved(
    specs: &[PropertySpec],
    kind: OperationKind,
    order: usize,
    name: &str,
) -> Result<FQOperation<Rational>, Error> {
    let out = solve_operation(specs, kind, order)?;
    if !out.parameters.is_empty() {
        return Err(Error::Inconsistent(format!(
            "{name}: characterization leaves {} free coefficients",
            out.parameters.len()
        )));
    }
    if out.table.status != crate::linsolve::FiberStatus::Consistent {
        return Err(Error::Inconsistent(format!("{name}: characterization is inconsistent")));
    }
    Ok(out.operation.map_coeffs(|c| c.as_constant().expect("no parameters left")))
}

fn compute(b: Builtin, order: usize) -> Result<FQOperation<Rational>, Error> {
    use PropertySpec::*;
    let mixed = BasisTag::Mixed;
    Ok(match b {
        Builtin::One => FQOperation::constant_one(OperationKind::Scalar, mixed, order),
        Builtin::Id => {
            evaluate_expression(&[Expression::a(1), Expression::a(2)], OperationKind::Vectorial, mixed, order)?
        }
        Builtin::PseudoDet => {
            let e = Expression::scale(frac(1, 2), Expression::commutator(Expression::a(1), Expression::a(2)));
            evaluate_expression(&[e], OperationKind::Pseudoscalar, mixed, order)?
        }
        Builtin::OSy => natural_unit(OperationKind::Vectorial, mixed, order),
        Builtin::FSy => floating_symmetric(order)?,
        Builtin::OfSy => {
            let pin = Pin { basis: BasisTag::Circular, comp: 0, word: Word::letter(4), value: Rational::zero() };
            solved(
                &[Natural, CliffordConservative, Bivariant, Orthogonal, pin],
                OperationKind::Vectorial,
                order,
                "OfSy",
            )?
        }
        Builtin::OafSy => {
            solved(&[Natural, CliffordConservative, Antivariant, Orthogonal], OperationKind::Vectorial, order, "OafSy")?
        }
        Builtin::AxisL => solved(
            &[Natural, CliffordConservative, LeftVariant, Orthogonal],
            OperationKind::Pseudoscalar,
            order,
            "AxisL",
        )?,
        Builtin::AxisR => solved(
            &[Natural, CliffordConservative, RightVariant, Orthogonal],
            OperationKind::Pseudoscalar,
            order,
            "AxisR",
        )?,
        Builtin::AxisC => {
            let l = builtin(Builtin::AxisL, order, mixed)?.element(0);
            let r = builtin(Builtin::AxisR, order, mixed)?.element(0);
            let m = l.add(&r)?.scale(&frac(1, 2));
            FQOperation::from_elements(OperationKind::Pseudoscalar, &[pol(&m)?])?
        }
    })
}

/// The natural operation whose circular `{1..5}` data are `X₁ = 1 + r̃₁ + r̃₂ + r̃₃ + F̃₄` and
/// `X₂ = 1 − r̃₁ + r̃₂ + r̃₃ − F̃₄`.
fn floating_symmetric(order: usize) -> Result<FQOperation<Rational>, Error> {
    let f4 = floating_series(order)?;
    let mut red = FQOperation::zero(OperationKind::Vectorial, BasisTag::Circular, order);
    for s in 0..2 {
        let sg = if s == 0 { int(1) } else { int(-1) };
        red.set(s, Word::EMPTY, int(1));
        red.set(s, Word::letter(1), sg.clone());
        red.set(s, Word::letter(2), int(1));
        red.set(s, Word::letter(3), int(1));
        for (w, c) in f4.component(0) {
            red.add_to(s, *w, &(c * &sg));
        }
    }
    natural_extend(&red).map(|op| op.transform(BasisTag::Mixed))
}

fn pair_from<C: Coeff>(f: &AlgebraElement<C>, order: usize, left: bool) -> Result<[AlgebraElement<C>; 2], Error> {
    let b = BasisTag::Circular;
    let mut out = Vec::new();
    for (s, q) in [(1i64, CliffordPart::Q1), (-1, CliffordPart::Q2)] {
        let mut x = AlgebraElement::one(b, order);
        x.add_assign(&AlgebraElement::letter(b, order, 1).scale(&int(s)))?;
        x.add_assign(&AlgebraElement::letter(b, order, 2))?;
        x.add_assign(&AlgebraElement::letter(b, order, 3))?;
        x.add_assign(&f.scale(&int(s)))?;
        let q = AlgebraElement::clifford(b, order, q);
        out.push(if left { q.mul(&x)? } else { x.mul(&q)? });
    }
    Ok([out[0].clone(), out[1].clone()])
}

/// `F̃₅(r̃₁, r̃₂, r̃₃)`: the `Q₁`-conjugate of `F̃₄`, the `r̃₅` slot once the pair is written as
/// `Q_s(1 ± r̃₁ + r̃₂ + r̃₃ ± F̃₅)`.
pub fn floating_series_conjugate(order: usize) -> Result<FQOperation<Rational>, Error> {
    let f4 = floating_series(order)?;
    let e = f4.series_element(0).conjugate(CliffordPart::Q1);
    let mut out = FQOperation::zero(OperationKind::Scalar, BasisTag::Circular, order);
    for (w, c) in e.clifford_component(CliffordPart::One) {
        out.set(0, w, c);
    }
    Ok(out)
}

/// The floating Clifford system built from `F̃₄` as `((1 ± r̃₁ + r̃₂ + r̃₃ ± F̃₄)Q_s)`, or from
/// `F̃₅` as `Q_s(1 ± r̃₁ + r̃₂ + r̃₃ ± F̃₅)` when `left`.
pub fn floating_pair(order: usize, left: bool) -> Result<[AlgebraElement<Rational>; 2], Error> {
    let f = if left { floating_series_conjugate(order)? } else { floating_series(order)? };
    pair_from(&f.series_element(0), order, left)
}

/// `F̃₄(r̃₁, r̃₂, r̃₃)` as the single component of a scalar circular operation: the unique
/// `Q₁Q₂`-invariant series (even in `r̃₁, r̃₂`) making `((1 ± r̃₁ + r̃₂ + r̃₃ ± F̃₄)Q_s)` a floating Clifford system.
pub fn floating_series(order: usize) -> Result<FQOperation<Rational>, Error> {
    if let Some(op) = floating_cache().lock().unwrap().as_ref() {
        if op.order() >= order {
            return Ok(op.truncate(order));
        }
    }
    let b = BasisTag::Circular;
    let mut f: FQOperation<Rational> = FQOperation::zero(OperationKind::Scalar, b, order);
    for r in 1..=order {
        let words: Vec<Word> =
            Word::all_of_length(r, &[1, 2, 3]).into_iter().filter(|w| (w.count(1) + w.count(2)) % 2 == 0).collect();
        let mut x = f.with_order(r).lift::<Poly>();
        for w in &words {
            x.set(0, *w, Poly::var(unknown(0, w)));
        }
        let f4 = x.series_element(0);
        let [a1, a2] = pair_from(&f4, r, false)?;
        let a2i = a2.neumann_inverse()?;
        let one = AlgebraElement::<Poly>::one(b, r);
        let mut rows = Vec::new();
        for z in [a1.mul(&a2i)?, a2i.mul(&a1)?] {
            let sq = z.mul(&z)?.add(&one)?.homogeneous(r);
            for (_, p) in sq.terms() {
                let mut lhs = Vec::new();
                let mut rhs = Rational::zero();
                for (m, c) in p.terms() {
                    match m.factors() {
                        [] => rhs -= c,
                        [(v, 1)] => {
                            let (_, w) = unknown_of(*v);
                            lhs.push((words.binary_search(&w).expect("unknown word"), c.clone()));
                        }
                        _ => return Err(Error::Afp("floating equations are not linear at the top order".into())),
                    }
                }
                rows.push((lhs, rhs));
            }
        }
        let ech = eliminate(rows, words.len());
        if !ech.is_consistent() {
            return Err(Error::Inconsistent(format!("floating Clifford equations at order {r}")));
        }
        if ech.rank() != words.len() {
            return Err(Error::NotInvertible(format!("floating series not determined at order {r}")));
        }
        for (c, (_, v)) in ech.pivots {
            f.set(0, words[c], v);
        }
    }
    *floating_cache().lock().unwrap() = Some(f.clone());
    Ok(f)
}
