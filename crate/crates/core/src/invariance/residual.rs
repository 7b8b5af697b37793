use std::fmt;
use std::sync::OnceLock;

use num_traits::Zero;

use super::spec::{PropertySpec, ScalingIndex};
use super::{decay_rhs, extend_mixed_pub, is_pure, HyperscalingProfile, HyperscalingType};
use crate::bases::{cmul, BasisTag};
use crate::calculus::compose_elements;
use crate::coeff::{Coeff, Poly, Var};
use crate::fqop::{builtin, floating_series, generic_pair, Builtin, FQOperation, OperationKind};
use crate::ncalgebra::{substitute_series, AlgebraElement, CliffordPart};
use crate::rational::{frac, int, Rational};
use crate::word::Word;
use crate::Error;

/// Locates a residual: the basis it is read in, the component or equation index, the word
/// and the Clifford part (`One` for coefficient-level rows).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowTag {
    pub basis: BasisTag,
    pub comp: u8,
    pub word: Word,
    pub part: CliffordPart,
}

impl RowTag {
    pub fn coeff(basis: BasisTag, comp: usize, word: Word) -> Self {
        RowTag { basis, comp: comp as u8, word, part: CliffordPart::One }
    }
}

impl fmt::Display for RowTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} s={} w={}", self.basis, self.comp, self.word)?;
        if self.part != CliffordPart::One {
            write!(f, " part={}", self.part.name())?;
        }
        Ok(())
    }
}

/// A well-layered row: linear form in the order-`r` unknowns equal to an affine right-hand
/// side in lower-order unknowns.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintRow {
    pub tag: RowTag,
    pub order: usize,
    pub lhs: Vec<(Var, Rational)>,
    pub rhs: Poly,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CheckReport {
    Holds { order: usize },
    Violated { order: usize, tag: RowTag, residual: Rational },
}

impl CheckReport {
    pub fn holds(&self) -> bool {
        matches!(self, CheckReport::Holds { .. })
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckReport::Holds { order } => write!(f, "holds up to order {order}"),
            CheckReport::Violated { order, tag, residual } => {
                write!(f, "violated at order {order}: {tag} residual {}", crate::rational::fmt_rational(residual))
            }
        }
    }
}

const SIGMA: [i8; 8] = [-1, 1, 1, -1, -1, 1, 1, -1];
const O2_C: [i64; 8] = [1, 0, 0, 1, -1, 0, 0, 1];
const O2_S: [i8; 8] = [-1, -1, 1, 1, 1, 1, -1, -1];

fn word_sign(w: &Word, table: &[i8; 8]) -> i8 {
    w.letters().map(|l| table[(l - 1) as usize]).product()
}

/// The `Δ₀` eigenvalue of the circular monomial `w`.
pub fn orthogonal_eigenvalue(w: &Word) -> i64 {
    let v = w.to_vec();
    let mut lam = 0i64;
    let mut tail = 1i64;
    for &l in v.iter().rev() {
        lam += O2_C[(l - 1) as usize] * tail;
        tail *= O2_S[(l - 1) as usize] as i64;
    }
    lam
}

/// Transposition data `(π, ε)` per basis and component label.
fn opp_table(basis: BasisTag, kind: OperationKind, comp: usize) -> ([u8; 8], [i8; 8]) {
    const ID: [u8; 8] = [1, 2, 3, 4, 5, 6, 7, 8];
    const SW: [u8; 8] = [2, 1, 3, 4, 5, 6, 8, 7];
    const C45: [u8; 8] = [1, 2, 3, 5, 4, 6, 7, 8];
    const P: [i8; 8] = [1; 8];
    let label = kind.labels()[comp];
    match (basis, label) {
        (BasisTag::Split, "0") => (ID, [1, 1, -1, -1, 1, -1, 1, -1]),
        (BasisTag::Split, "1") => (ID, [1, 1, 1, 1, 1, -1, -1, 1]),
        (BasisTag::Split, "2") => (ID, [1, -1, -1, 1, 1, 1, 1, 1]),
        (BasisTag::Split, _) => (ID, [1, -1, 1, -1, 1, 1, -1, -1]),
        (BasisTag::Mixed, "0") => (ID, [1, 1, 1, 1, -1, -1, -1, -1]),
        (BasisTag::Mixed, "1") => (SW, P),
        (BasisTag::Mixed, "2") => (SW, [-1, -1, 1, 1, 1, 1, -1, -1]),
        (BasisTag::Mixed, _) => (ID, [-1, -1, 1, 1, -1, -1, 1, 1]),
        (BasisTag::Circular, "0") => (C45, [1, 1, 1, 1, 1, -1, -1, -1]),
        (BasisTag::Circular, "1") => (SW, P),
        (BasisTag::Circular, "2") => (SW, [-1, -1, 1, 1, 1, 1, -1, -1]),
        (BasisTag::Circular, _) => (C45, [-1, -1, 1, 1, 1, -1, 1, 1]),
    }
}

/// Lazily derived views of one operation at a fixed truncation order.
pub struct Evaluator<C: Coeff> {
    /// Mixed-basis coefficients; in quotient mode only `{1..5}`-words are stored.
    op: FQOperation<C>,
    quotient: bool,
    full: OnceLock<FQOperation<C>>,
    circ: OnceLock<FQOperation<C>>,
    pair: OnceLock<[AlgebraElement<C>; 2]>,
    elems: OnceLock<Vec<AlgebraElement<C>>>,
}

impl<C: Coeff> Evaluator<C> {
    /// `quotient`: the operation is natural and given by its `{1..5}` data; elementwise
    /// properties are then evaluated on pairs with `r̂₆ = r̂₇ = r̂₈ = 0`.
    pub fn new(op: &FQOperation<C>, quotient: bool) -> Self {
        let mut op = op.transform(BasisTag::Mixed);
        if quotient {
            op = op.filter(is_pure);
        }
        Evaluator {
            op,
            quotient,
            full: OnceLock::new(),
            circ: OnceLock::new(),
            pair: OnceLock::new(),
            elems: OnceLock::new(),
        }
    }

    pub fn order(&self) -> usize {
        self.op.order()
    }

    pub fn kind(&self) -> OperationKind {
        self.op.kind()
    }

    pub fn is_quotient(&self) -> bool {
        self.quotient
    }

    /// All mixed coefficients.
    pub fn full(&self) -> &FQOperation<C> {
        self.full.get_or_init(|| if self.quotient { extend_mixed_pub(&self.op) } else { self.op.clone() })
    }

    /// The stored coordinates: pure mixed words in quotient mode, everything otherwise.
    pub fn stored(&self) -> &FQOperation<C> {
        &self.op
    }

    pub fn circular(&self) -> &FQOperation<C> {
        self.circ.get_or_init(|| self.op.transform(BasisTag::Circular))
    }

    /// Words carrying independent coordinates at length `r`.
    fn words(&self, r: usize) -> Vec<Word> {
        let alpha: Vec<u8> = if self.quotient { (1..=5).collect() } else { (1..=8).collect() };
        Word::all_of_length(r, &alpha)
    }

    /// Words of length `r` carrying a nonzero coefficient of `op` in some component, in word order.
    fn support(&self, op: &FQOperation<C>, r: usize) -> Vec<Word> {
        let words: std::collections::BTreeSet<Word> = op
            .components()
            .iter()
            .flat_map(|s| s.keys())
            .filter(|w| w.len() == r && (!self.quotient || is_pure(w)))
            .copied()
            .collect();
        words.into_iter().collect()
    }

    pub fn pair(&self) -> &[AlgebraElement<C>; 2] {
        self.pair.get_or_init(|| {
            let g = generic_pair::<C>(BasisTag::Mixed, self.order());
            if self.quotient {
                g.map(|x| x.filter_words(is_pure))
            } else {
                g
            }
        })
    }

    /// The operation's components evaluated at the (restricted) generic pair.
    pub fn elements(&self) -> &[AlgebraElement<C>] {
        self.elems.get_or_init(|| self.op.elements())
    }

    fn builtin_pair(&self, b: Builtin) -> Result<Vec<AlgebraElement<C>>, Error> {
        let op = builtin(b, self.order(), BasisTag::Mixed)?;
        let op = if self.quotient { op.filter(is_pure) } else { op };
        Ok(op.lift::<C>().elements())
    }
}

fn coeff_rows<C: Coeff>(basis: BasisTag, comp: usize, items: Vec<(Word, C)>) -> Vec<(RowTag, C)> {
    items.into_iter().filter(|(_, c)| !c.is_nil()).map(|(w, c)| (RowTag::coeff(basis, comp, w), c)).collect()
}

fn element_rows<C: Coeff>(eq: usize, x: &AlgebraElement<C>, r: usize) -> Vec<(RowTag, C)> {
    x.terms()
        .filter(|((w, _), c)| w.len() == r && !c.is_nil())
        .map(|((w, g), c)| (RowTag { basis: x.basis(), comp: eq as u8, word: *w, part: *g }, c.clone()))
        .collect()
}

fn zero_forcing<C: Coeff>(ev: &Evaluator<C>, r: usize) -> Vec<(RowTag, C)> {
    let mut out = Vec::new();
    for s in 0..ev.kind().num_components() {
        for w in ev.words(r) {
            out.push((RowTag::coeff(BasisTag::Mixed, s, w), ev.stored().coeff(s, &w)));
        }
    }
    out.retain(|(_, c)| !c.is_nil());
    out
}

fn natural_rows<C: Coeff>(ev: &Evaluator<C>, r: usize) -> Vec<(RowTag, C)> {
    if ev.is_quotient() {
        return Vec::new();
    }
    let op = ev.full();
    let prof = HyperscalingProfile::natural(op.kind());
    let mut out = Vec::new();
    for s in 0..op.num_components() {
        let get = |w: &Word| op.coeff(s, w);
        let mut rows = Vec::new();
        for w in Word::all_of_length(r, &[1, 2, 3, 4, 5, 6, 7, 8]) {
            let Some(m) = (0..r).find(|&m| w.get(m) >= 6) else { continue };
            let mut v = op.coeff(s, &w);
            v.sub_assign_ref(&decay_rhs(&get, &w, m, prof.get(s, w.get(m))));
            rows.push((w, v));
        }
        out.extend(coeff_rows(BasisTag::Mixed, s, rows));
    }
    out
}

fn opp_rows<C: Coeff>(ev: &Evaluator<C>, r: usize) -> Vec<(RowTag, C)> {
    let op = ev.stored();
    let mut out = Vec::new();
    for s in 0..op.num_components() {
        let (pi, eps) = opp_table(BasisTag::Mixed, op.kind(), s);
        let mut rows = Vec::new();
        for w in ev.words(r) {
            let v = w.reversed().map(|l| pi[(l - 1) as usize]);
            if v < w {
                continue;
            }
            let e = word_sign(&w, &eps);
            let mut c = op.coeff(s, &v);
            let pw = op.coeff(s, &w);
            if e > 0 {
                c.sub_assign_ref(&pw);
            } else {
                c.add_assign_ref(&pw);
            }
            rows.push((w, c));
        }
        out.extend(coeff_rows(BasisTag::Mixed, s, rows));
    }
    out
}

fn symmetry_rows<C: Coeff>(ev: &Evaluator<C>, r: usize) -> Vec<(RowTag, C)> {
    let op = ev.stored();
    let mut rows = Vec::new();
    match op.kind() {
        OperationKind::Vectorial => {
            for w in ev.words(r) {
                let mut c = op.coeff(1, &w);
                let p1 = op.coeff(0, &w);
                if word_sign(&w, &SIGMA) > 0 {
                    c.sub_assign_ref(&p1);
                } else {
                    c.add_assign_ref(&p1);
                }
                rows.push((w, c));
            }
            coeff_rows(BasisTag::Mixed, 1, rows)
        }
        _ => {
            for w in ev.words(r) {
                if word_sign(&w, &SIGMA) < 0 {
                    rows.push((w, op.coeff(0, &w).scale_ref(&int(2))));
                }
            }
            coeff_rows(BasisTag::Mixed, 0, rows)
        }
    }
}

fn orthogonal_rows<C: Coeff>(ev: &Evaluator<C>, r: usize) -> Vec<(RowTag, C)> {
    let op = ev.circular();
    let mut out = Vec::new();
    match op.kind() {
        OperationKind::Vectorial => {
            let (mut r1, mut r2) = (Vec::new(), Vec::new());
            for w in ev.support(op, r) {
                let sg = word_sign(&w, &SIGMA);
                let lam = Rational::from_integer(orthogonal_eigenvalue(&w).into()) - frac(1 - sg as i64, 2);
                if !lam.is_zero() {
                    r1.push((w, op.coeff(0, &w).scale_ref(&lam)));
                }
                let mut c = op.coeff(1, &w);
                let p1 = op.coeff(0, &w);
                if sg > 0 {
                    c.sub_assign_ref(&p1);
                } else {
                    c.add_assign_ref(&p1);
                }
                r2.push((w, c));
            }
            out.extend(coeff_rows(BasisTag::Circular, 0, r1));
            out.extend(coeff_rows(BasisTag::Circular, 1, r2));
        }
        _ => {
            let mut rows = Vec::new();
            for w in ev.support(op, r) {
                let lam = orthogonal_eigenvalue(&w);
                if lam != 0 {
                    rows.push((w, op.coeff(0, &w).scale_ref(&int(lam))));
                }
            }
            out.extend(coeff_rows(BasisTag::Circular, 0, rows));
        }
    }
    out
}

/// Row of the `r̂_i`-scaling relation for component `s` at the shorter word `k`.
fn scaling_row<C: Coeff>(op: &FQOperation<C>, s: usize, i: u8, alpha: &Rational, k: &Word) -> C {
    let n = k.len();
    let mut acc = C::nil();
    for pos in 0..=n {
        acc.add_assign_ref(&op.coeff(s, &k.insert(pos, i)));
    }
    let sgn = if matches!(i, 1 | 4 | 5 | 8) { op.kind().sign(s) } else { 1 };
    acc.sub_assign_ref(&op.coeff(s, k).scale_ref(&(alpha * int(sgn as i64))));
    for m in 0..n {
        acc.add_assign_ref(&op.coeff(s, &k.replace(m, cmul(i, k.get(m)))));
    }
    acc
}

fn scaling_rows_on<C: Coeff>(op: &FQOperation<C>, index: ScalingIndex, alpha: &Rational, r: usize) -> Vec<(RowTag, C)> {
    if r == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let all: Vec<u8> = (1..=8).collect();
    for s in 0..op.num_components() {
        let mut rows = Vec::new();
        for k in Word::all_of_length(r - 1, &all) {
            let c = match index {
                ScalingIndex::Mixed(i) => scaling_row(op, s, i, alpha, &k),
                ScalingIndex::Circular4 => {
                    let mut c = scaling_row(op, s, 4, alpha, &k);
                    c.add_assign_ref(&scaling_row(op, s, 5, alpha, &k));
                    c.scale_ref(&frac(1, 2))
                }
                ScalingIndex::Circular5 => {
                    let mut c = scaling_row(op, s, 4, alpha, &k);
                    c.sub_assign_ref(&scaling_row(op, s, 5, &-alpha, &k));
                    c.scale_ref(&frac(1, 2))
                }
            };
            rows.push((k, c));
        }
        out.extend(coeff_rows(BasisTag::Mixed, s, rows));
    }
    out
}

fn hyperscaling_rows<C: Coeff>(ev: &Evaluator<C>, h: u8, t: &HyperscalingType, r: usize) -> Vec<(RowTag, C)> {
    let op = ev.full();
    let mut out = Vec::new();
    for s in 0..op.num_components() {
        let get = |w: &Word| op.coeff(s, w);
        let mut rows = Vec::new();
        for w in Word::all_of_length(r, &[1, 2, 3, 4, 5, 6, 7, 8]) {
            for m in (0..r).filter(|&m| w.get(m) == h) {
                let mut v = op.coeff(s, &w);
                v.sub_assign_ref(&decay_rhs(&get, &w, m, t));
                rows.push((w, v));
            }
        }
        out.extend(coeff_rows(BasisTag::Mixed, s, rows));
    }
    out
}

fn degeneracy_rows<C: Coeff>(ev: &Evaluator<C>, eps: i8, r: usize) -> Vec<(RowTag, C)> {
    let op = ev.full();
    let mut out = Vec::new();
    for s in 0..op.num_components() {
        let mut rows = Vec::new();
        for w in Word::all_of_length(r, &[1, 2, 3, 4, 5, 6, 7, 8]) {
            for m in (0..r).filter(|&m| w.get(m) <= 4) {
                let mut v = op.coeff(s, &w);
                let o = op.coeff(s, &w.replace(m, cmul(w.get(m), 6)));
                if eps > 0 {
                    v.sub_assign_ref(&o);
                } else {
                    v.add_assign_ref(&o);
                }
                rows.push((w, v));
            }
        }
        out.extend(coeff_rows(BasisTag::Mixed, s, rows));
    }
    out
}

fn variance_rows<C: Coeff>(ev: &Evaluator<C>, vectorial: bool, eps: i8, r: usize) -> Vec<(RowTag, C)> {
    if (ev.kind() == OperationKind::Vectorial) != vectorial {
        return zero_forcing(ev, r);
    }
    let mut out = natural_rows(ev, r);
    out.extend(degeneracy_rows(ev, eps, r));
    out
}

fn floating_rows<C: Coeff>(ev: &Evaluator<C>, sign: i8, r: usize) -> Result<Vec<(RowTag, C)>, Error> {
    if ev.kind() != OperationKind::Vectorial {
        return Err(Error::Unsupported("floating conservativity needs a vectorial operation".into()));
    }
    let order = ev.order();
    let b = BasisTag::Circular;
    let f4: FQOperation<C> = floating_series(order)?.lift();
    let f4 = f4.series_element(0);
    let f5 = f4.filter_words(|_| true);
    let f5 = swap12(&f5);
    let mut images: [AlgebraElement<C>; 8] = std::array::from_fn(|_| AlgebraElement::zero(b, order));
    for l in 1..=3u8 {
        images[(l - 1) as usize] = AlgebraElement::letter(b, order, l);
    }
    images[3] = f4.clone();
    images[4] = f5;
    let op = ev.circular();
    let mut out = Vec::new();
    for s in 0..2 {
        let lhs = substitute_series(op.component(s), &images, order)?;
        let sg = if s == 0 { 1 } else { -1 };
        let mut x = AlgebraElement::one(b, order);
        x.add_assign(&AlgebraElement::letter(b, order, 1).scale(&int(sg)))?;
        x.add_assign(&AlgebraElement::letter(b, order, 2))?;
        x.add_assign(&AlgebraElement::letter(b, order, 3))?;
        x.add_assign(&f4.scale(&int(sg)))?;
        let rhs = if sign > 0 {
            x
        } else {
            let q = AlgebraElement::clifford(b, order, if s == 0 { CliffordPart::Q1 } else { CliffordPart::Q2 });
            let qi = q.neumann_inverse()?;
            x.mul(&q)?.neumann_inverse()?.mul(&qi)?.neg()
        };
        let res = lhs.sub(&rhs)?;
        out.extend(element_rows(s, &res, r));
    }
    Ok(out)
}

fn swap12<C: Coeff>(x: &AlgebraElement<C>) -> AlgebraElement<C> {
    let mut out = AlgebraElement::zero(x.basis(), x.order());
    for ((w, g), c) in x.terms() {
        let w2 = w.map(|l| match l {
            1 => 2,
            2 => 1,
            l => l,
        });
        out.add_term(w2, *g, c.clone());
    }
    out
}

fn productive_rows<C: Coeff>(ev: &Evaluator<C>, r: usize) -> Result<Vec<(RowTag, C)>, Error> {
    let e = ev.elements();
    let one = AlgebraElement::<C>::one(BasisTag::Mixed, ev.order());
    match ev.kind() {
        OperationKind::Vectorial => {
            let mut a = e[0].mul_homogeneous(&e[0], r)?;
            let mut b = e[0].mul_homogeneous(&e[1], r)?;
            b.add_assign(&e[1].mul_homogeneous(&e[0], r)?)?;
            let mut c = e[1].mul_homogeneous(&e[1], r)?;
            if r == 0 {
                a.add_assign(&one)?;
                c.add_assign(&one)?;
            }
            let mut out = element_rows(0, &a, r);
            out.extend(element_rows(1, &b, r));
            out.extend(element_rows(2, &c, r));
            Ok(out)
        }
        OperationKind::Pseudoscalar => {
            let mut a = e[0].mul_homogeneous(&e[0], r)?;
            if r == 0 {
                a.add_assign(&one)?;
            }
            Ok(element_rows(0, &a, r))
        }
        OperationKind::Scalar => Err(Error::Unsupported("Clifford productivity of a scalar operation".into())),
    }
}

fn floating_productive_rows<C: Coeff>(ev: &Evaluator<C>, r: usize) -> Result<Vec<(RowTag, C)>, Error> {
    if ev.kind() != OperationKind::Vectorial {
        return Err(Error::Unsupported("floating productivity needs a vectorial operation".into()));
    }
    let e = ev.elements();
    let one = AlgebraElement::<C>::one(BasisTag::Mixed, ev.order());
    let inv2 = e[1].neumann_inverse()?;
    let x = e[0].mul(&inv2)?;
    let y = inv2.mul(&e[0])?;
    let mut out = Vec::new();
    for (i, z) in [x, y].into_iter().enumerate() {
        let mut sq = z.mul_homogeneous(&z, r)?;
        if r == 0 {
            sq.add_assign(&one)?;
        }
        out.extend(element_rows(i, &sq, r));
    }
    Ok(out)
}

fn composite_rows<C: Coeff>(ev: &Evaluator<C>, spec: &PropertySpec, r: usize) -> Result<Vec<(RowTag, C)>, Error> {
    let kind = ev.kind();
    let need_vec = |what: &str| -> Result<(), Error> {
        if kind != OperationKind::Vectorial {
            Err(Error::Unsupported(format!("{what} needs a vectorial operation")))
        } else {
            Ok(())
        }
    };
    // With `Ψ` as the inner pair the level-0 content is Clifford conservativity itself.
    if r == 0 && !matches!(spec, PropertySpec::ComposeFixed(_) | PropertySpec::WeakMetricTrace) {
        return Ok(Vec::new());
    }
    let e = ev.elements();
    let pair = ev.pair();
    let full = ev.full();
    let order = ev.order();
    let inner: [AlgebraElement<C>; 2] = [e[0].clone(), e[1].clone()];
    let diff = |a: &[AlgebraElement<C>], b: &[AlgebraElement<C>]| -> Result<Vec<(RowTag, C)>, Error> {
        let mut out = Vec::new();
        for (i, (x, y)) in a.iter().zip(b).enumerate() {
            out.extend(element_rows(i, &x.sub(y)?.homogeneous(r), r));
        }
        Ok(out)
    };
    match spec {
        PropertySpec::Involutive => {
            need_vec("involutivity")?;
            let c = compose_elements(full, &inner, order)?;
            diff(&c, pair)
        }
        PropertySpec::Idempotent => {
            need_vec("idempotence")?;
            let c = compose_elements(full, &inner, order)?;
            diff(&c, e)
        }
        PropertySpec::ThreeIdempotent => {
            need_vec("3-idempotence")?;
            let c = compose_elements(full, &inner, order)?;
            let c = compose_elements(full, &[c[0].clone(), c[1].clone()], order)?;
            diff(&c, e)
        }
        PropertySpec::AxisEquals(name) => {
            need_vec("the axis condition")?;
            let b: Builtin = name.parse()?;
            let d = builtin(Builtin::PseudoDet, order, BasisTag::Mixed)?.lift::<C>();
            let c = compose_elements(&d, &inner, order)?;
            let target = ev.builtin_pair(b)?;
            diff(&c, &target)
        }
        PropertySpec::ComposeFixed(name) => {
            need_vec("compose-compatibility")?;
            let b: Builtin = name.parse()?;
            let t = ev.builtin_pair(b)?;
            let c = compose_elements(full, &[t[0].clone(), t[1].clone()], order)?;
            diff(&c, e)
        }
        PropertySpec::DScaling { index, alpha } => {
            need_vec("scaling of the axis")?;
            let d = builtin(Builtin::PseudoDet, order, BasisTag::Mixed)?.lift::<C>();
            let c = compose_elements(&d, &inner, order)?;
            let p = FQOperation::from_elements(OperationKind::Pseudoscalar, &c)?;
            let p = if ev.is_quotient() { extend_mixed_pub(&p.filter(is_pure)) } else { p };
            Ok(scaling_rows_on(&p, ScalingIndex::Mixed(*index), alpha, r))
        }
        PropertySpec::WeakMetricTrace => {
            need_vec("the weak metric trace condition")?;
            let j = ev.builtin_pair(Builtin::AxisC)?.remove(0);
            let jinv = j.neumann_inverse()?;
            let mut x = pair[0].commutator(&e[0])?;
            x.add_assign(&pair[1].commutator(&e[1])?)?;
            let mut y = jinv.mul(&x)?.mul(&j)?;
            y.add_assign(&x)?;
            Ok(element_rows(0, &y.homogeneous(r).scale(&frac(1, 2)), r))
        }
        _ => unreachable!("not a composite property"),
    }
}

fn pin_rows<C: Coeff>(
    ev: &Evaluator<C>,
    basis: BasisTag,
    comp: usize,
    word: &Word,
    value: &Rational,
    r: usize,
) -> Vec<(RowTag, C)> {
    if word.len() != r || comp >= ev.kind().num_components() {
        return Vec::new();
    }
    let op = match basis {
        BasisTag::Mixed => ev.full().clone(),
        BasisTag::Circular if ev.is_quotient() && is_pure(word) => ev.circular().clone(),
        b => ev.full().transform(b),
    };
    let mut c = op.coeff(comp, word);
    c.sub_assign_ref(&C::from_rational(value));
    coeff_rows(basis, comp, vec![(*word, c)])
}

/// Residuals of `spec` at expansion level `r`; each vanishes iff the property holds there.
pub fn residuals<C: Coeff>(ev: &Evaluator<C>, spec: &PropertySpec, r: usize) -> Result<Vec<(RowTag, C)>, Error> {
    use PropertySpec::*;
    Ok(match spec {
        CliffordConservative => {
            if r > 0 {
                return Ok(Vec::new());
            }
            let op = ev.stored();
            let rows = (0..op.num_components())
                .map(|s| {
                    let mut c = op.coeff(s, &Word::EMPTY);
                    c.sub_assign_ref(&C::unit());
                    (s, c)
                })
                .collect::<Vec<_>>();
            rows.into_iter()
                .filter(|(_, c)| !c.is_nil())
                .map(|(s, c)| (RowTag::coeff(BasisTag::Mixed, s, Word::EMPTY), c))
                .collect()
        }
        Natural => natural_rows(ev, r),
        Transposition => opp_rows(ev, r),
        Symmetry => symmetry_rows(ev, r),
        Orthogonal => orthogonal_rows(ev, r),
        Scaling { index, alpha } => scaling_rows_on(ev.full(), *index, alpha, r),
        Hyperscaling { h, j, l, alpha, beta } => {
            let t = HyperscalingType::new(j.clone(), l.clone(), alpha.clone(), beta.clone());
            hyperscaling_rows(ev, *h, &t, r)
        }
        CharacterDegeneracy(e) => degeneracy_rows(ev, *e, r),
        Bivariant => variance_rows(ev, true, 1, r),
        Antivariant => variance_rows(ev, true, -1, r),
        LeftVariant => variance_rows(ev, false, 1, r),
        RightVariant => variance_rows(ev, false, -1, r),
        FloatingConservative(s) => floating_rows(ev, *s, r)?,
        CliffordProductive => productive_rows(ev, r)?,
        FloatingProductive => floating_productive_rows(ev, r)?,
        Pin { basis, comp, word, value } => pin_rows(ev, *basis, *comp, word, value, r),
        _ => composite_rows(ev, spec, r)?,
    })
}

/// Checks `spec` on `op` order by order and reports the first violated row.
pub fn check(op: &FQOperation<Rational>, spec: &PropertySpec) -> Result<CheckReport, Error> {
    let ev = Evaluator::new(op, false);
    for r in 0..=op.order() {
        if let Some((tag, v)) = residuals(&ev, spec, r)?.into_iter().next() {
            return Ok(CheckReport::Violated { order: r, tag, residual: v });
        }
    }
    Ok(CheckReport::Holds { order: op.order() })
}

/// Unknown `p^{[s]}_w` encoded as a polynomial variable.
pub fn unknown(comp: usize, w: &Word) -> Var {
    assert!(w.len() <= 8 && comp < 4);
    ((w.len() as u32) << 26) | ((comp as u32) << 24) | w.code() as u32
}

pub fn unknown_of(v: Var) -> (usize, Word) {
    let len = ((v >> 26) & 0xf) as usize;
    (((v >> 24) & 3) as usize, Word::from_code(len, (v & 0xff_ffff) as u64))
}

/// Expansion level of an unknown.
pub fn level_of(v: Var) -> usize {
    ((v >> 26) & 0xf) as usize
}

/// The operation whose every coefficient up to `order` is an unknown.
pub fn unknown_operation(kind: OperationKind, basis: BasisTag, order: usize, alphabet: &[u8]) -> FQOperation<Poly> {
    let mut op = FQOperation::zero(kind, basis, order);
    for s in 0..kind.num_components() {
        for r in 0..=order {
            for w in Word::all_of_length(r, alphabet) {
                op.set(s, w, Poly::var(unknown(s, &w)));
            }
        }
    }
    op
}

/// Splits a residual into its linear part in the level-`r` unknowns and the remaining
/// right-hand side, or `None` if the level-`r` unknowns enter non-linearly or with
/// non-constant coefficients.
pub fn split_row(p: &Poly, r: usize) -> Option<(Vec<(Var, Rational)>, Poly)> {
    let mut lhs = Vec::new();
    let mut rhs = Poly::nil();
    for (m, c) in p.terms() {
        let top: Vec<_> = m.factors().iter().filter(|(v, _)| level_of(*v) == r && *v < (1 << 30)).collect();
        match top.as_slice() {
            [] => rhs.add_term(m.clone(), &-c),
            [(v, 1)] if m.factors().len() == 1 => lhs.push((*v, c.clone())),
            _ => return None,
        }
    }
    Some((lhs, rhs))
}

/// Well-layered constraint rows of `spec` at order `r` over the full coefficient space.
pub fn generate_constraints(
    spec: &PropertySpec,
    kind: OperationKind,
    basis: BasisTag,
    r: usize,
) -> Result<Vec<ConstraintRow>, Error> {
    let op = unknown_operation(kind, basis, r, &[1, 2, 3, 4, 5, 6, 7, 8]);
    let op = if basis == BasisTag::Mixed { op } else { op.transform(BasisTag::Mixed) };
    let ev = Evaluator::new(&op, false);
    let mut out = Vec::new();
    for (tag, p) in residuals(&ev, spec, r)? {
        let (lhs, rhs) = split_row(&p, r)
            .ok_or_else(|| Error::Afp(format!("{spec} row {tag} is not linear in the order-{r} unknowns: {p}")))?;
        out.push(ConstraintRow { tag, order: r, lhs, rhs });
    }
    Ok(out)
}
