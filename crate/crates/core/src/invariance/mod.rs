//! Invariance properties of FQ operations and their exact coefficient constraints.

mod residual;
mod spec;

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::bases::{cmul, BasisTag};
use crate::coeff::{Coeff, Poly, Var};
use crate::fqop::{FQOperation, OperationKind};
use crate::linsolve::eliminate;
use crate::rational::{frac, int, Rational};
use crate::word::Word;
use crate::Error;

pub use residual::{
    check, generate_constraints, level_of, orthogonal_eigenvalue, residuals, split_row, unknown, unknown_of,
    unknown_operation, CheckReport, ConstraintRow, Evaluator, RowTag,
};
pub use spec::{parse_property_set, PropertySpec, ScalingIndex};

/// Hyperscaling type `(J, L, α, β)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperscalingType {
    pub j: Rational,
    pub l: Rational,
    pub alpha: Rational,
    pub beta: Rational,
}

impl HyperscalingType {
    pub fn new(j: Rational, l: Rational, alpha: Rational, beta: Rational) -> Self {
        HyperscalingType { j, l, alpha, beta }
    }
}

/// The hyperscaling types in `r̂₆, r̂₇, r̂₈` that together are equivalent to naturality.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperscalingProfile {
    pub kind: OperationKind,
    /// Indexed by component, then by `h - 6`.
    pub types: Vec<[HyperscalingType; 3]>,
}

impl HyperscalingProfile {
    pub fn natural(kind: OperationKind) -> Self {
        let jl = [(0, 0), (1, 0), (-1, 0)];
        let ab: Vec<[(Rational, Rational); 3]> = match kind {
            OperationKind::Scalar => vec![[(frac(1, 2), frac(-1, 2)), (int(1), int(-1)), (int(0), int(0))]],
            OperationKind::Vectorial => vec![
                [(frac(1, 2), frac(1, 2)), (int(1), int(0)), (int(0), int(1))],
                [(frac(1, 2), frac(1, 2)), (int(1), int(0)), (int(0), int(-1))],
            ],
            OperationKind::Pseudoscalar => {
                vec![[(frac(1, 2), frac(-1, 2)), (int(1), int(1)), (int(0), int(0))]]
            }
        };
        let types = ab
            .into_iter()
            .map(|row| {
                let mut it = row.into_iter().zip(jl);
                std::array::from_fn(|_| {
                    let ((a, b), (j, l)) = it.next().unwrap();
                    HyperscalingType::new(int(j), int(l), a, b)
                })
            })
            .collect();
        HyperscalingProfile { kind, types }
    }

    pub fn get(&self, comp: usize, h: u8) -> &HyperscalingType {
        &self.types[comp][(h - 6) as usize]
    }
}

/// Right-hand side of the decay identity for the letter at position `m` of `w`, which is `h`.
pub(crate) fn decay_rhs<C: Coeff>(get: &impl Fn(&Word) -> C, w: &Word, m: usize, t: &HyperscalingType) -> C {
    let h = w.get(m);
    let r = w.len();
    let half = frac(1, 2);
    let mut acc = C::nil();
    let mut add = |word: Word, q: Rational| {
        if !q.is_zero() {
            acc.add_assign_ref(&get(&word).scale_ref(&q));
        }
    };
    if r == 1 {
        add(Word::EMPTY, &t.alpha + &t.beta);
    } else if m == 0 {
        let j = w.get(1);
        let rest = w.remove(0);
        add(rest, t.alpha.clone());
        add(rest.replace(0, cmul(6, cmul(h, j))), -&half * &t.j);
        add(rest.replace(0, cmul(h, j)), -&half - &t.l);
    } else if m == r - 1 {
        let i = w.get(m - 1);
        let rest = w.remove(m);
        add(rest.replace(m - 1, cmul(cmul(i, h), 6)), &half * &t.j);
        add(rest.replace(m - 1, cmul(i, h)), -&half + &t.l);
        add(rest, t.beta.clone());
    } else {
        let i = w.get(m - 1);
        let j = w.get(m + 1);
        let rest = w.remove(m);
        add(rest.replace(m - 1, cmul(cmul(i, h), 6)), &half * &t.j);
        add(rest.replace(m - 1, cmul(i, h)), -&half + &t.l);
        add(rest.replace(m, cmul(6, cmul(h, j))), -&half * &t.j);
        add(rest.replace(m, cmul(h, j)), -&half - &t.l);
    }
    acc
}

/// Words over `{1..5}`: the coordinates that survive the naturality reduction.
pub fn is_pure(w: &Word) -> bool {
    w.all(|l| l <= 5)
}

/// Split-basis reduced coordinates.
pub fn is_split_pure(w: &Word) -> bool {
    w.all(|l| matches!(l, 1 | 2 | 5 | 7 | 8))
}

/// Fills every coefficient carrying an index in `{6,7,8}` from the `{1..5}` data by the decay
/// identities, eliminating the first such index. Mixed or circular input; split input is read
/// on `{1,2,5,7,8}`-words and solved order by order.
pub fn natural_extend<C: Coeff>(reduced: &FQOperation<C>) -> Result<FQOperation<C>, Error> {
    match reduced.basis() {
        BasisTag::Mixed => Ok(extend_mixed(&reduced.filter(is_pure))),
        BasisTag::Circular => {
            let m = reduced.filter(is_pure).transform(BasisTag::Mixed);
            Ok(extend_mixed(&m).transform(BasisTag::Circular))
        }
        BasisTag::Split => extend_split(reduced),
    }
}

pub(crate) fn extend_mixed_pub<C: Coeff>(red: &FQOperation<C>) -> FQOperation<C> {
    extend_mixed(red)
}

fn extend_mixed<C: Coeff>(red: &FQOperation<C>) -> FQOperation<C> {
    let kind = red.kind();
    let prof = HyperscalingProfile::natural(kind);
    let mut out = red.clone();
    let all: Vec<u8> = (1..=8).collect();
    for s in 0..kind.num_components() {
        let mut table: BTreeMap<Word, C> = red.component(s).clone();
        for r in 1..=red.order() {
            for w in Word::all_of_length(r, &all) {
                let Some(m) = (0..r).find(|&m| w.get(m) >= 6) else { continue };
                let get = |x: &Word| table.get(x).cloned().unwrap_or_else(C::nil);
                let v = decay_rhs(&get, &w, m, prof.get(s, w.get(m)));
                if !v.is_nil() {
                    table.insert(w, v);
                }
            }
        }
        for (w, c) in table {
            out.set(s, w, c);
        }
    }
    out
}

/// Split reduced data determines the mixed reduced data level by level through a
/// nonsingular linear system.
fn extend_split<C: Coeff>(reduced: &FQOperation<C>) -> Result<FQOperation<C>, Error> {
    let kind = reduced.kind();
    let order = reduced.order();
    let nc = kind.num_components();
    let pure: Vec<u8> = (1..=5).collect();
    let mut mixed = FQOperation::<C>::zero(kind, BasisTag::Mixed, order);
    for r in 0..=order {
        let words = Word::all_of_length(r, &pure);
        let mut probe = FQOperation::<Poly>::zero(kind, BasisTag::Mixed, r);
        for s in 0..nc {
            for w in &words {
                probe.set(s, *w, Poly::var(unknown(s, w)));
            }
        }
        let lin = probe.transform(BasisTag::Split);
        let base = extend_mixed(&mixed.with_order(r)).homogeneous(r).transform(BasisTag::Split);
        let col = |v: Var| {
            let (s, w) = unknown_of(v);
            s * words.len() + words.binary_search(&w).expect("pure word")
        };
        let mut rows = Vec::new();
        for s in 0..nc {
            for w in Word::all_of_length(r, &[1, 2, 5, 7, 8]) {
                let lhs = lin.coeff(s, &w).terms().map(|(m, c)| (col(m.factors()[0].0), c.clone())).collect();
                let mut v = reduced.coeff(s, &w);
                v.sub_assign_ref(&base.coeff(s, &w));
                rows.push((lhs, v));
            }
        }
        let ech = eliminate(rows, nc * words.len());
        if ech.rank() != nc * words.len() || !ech.is_consistent() {
            return Err(Error::NotInvertible(format!("split reduced data does not determine order {r}")));
        }
        for (c, (_, v)) in ech.pivots {
            mixed.set(c / words.len(), words[c % words.len()], v);
        }
    }
    Ok(extend_mixed(&mixed).transform(BasisTag::Split))
}

/// Keeps only the free coordinates of a natural operation, after verifying naturality.
pub fn natural_reduce(op: &FQOperation<Rational>) -> Result<FQOperation<Rational>, Error> {
    let report = check(op, &PropertySpec::Natural)?;
    if let CheckReport::Violated { .. } = report {
        return Err(Error::Unsupported(format!("operation is not natural: {report}")));
    }
    Ok(match op.basis() {
        BasisTag::Split => op.filter(is_split_pure),
        _ => op.filter(is_pure),
    })
}

/// Number of free coordinates per order for a natural operation of the given kind.
pub fn free_coefficient_count(kind: OperationKind, r: usize) -> usize {
    kind.num_components() * 5usize.pow(r as u32)
}

/// The Clifford conservative natural operation with vanishing free data above order 0.
pub fn natural_unit(kind: OperationKind, basis: BasisTag, order: usize) -> FQOperation<Rational> {
    let red = FQOperation::constant_one(kind, BasisTag::Mixed, order);
    extend_mixed(&red).transform(basis)
}
