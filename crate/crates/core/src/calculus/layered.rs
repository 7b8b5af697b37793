//! Amb/CoAmb splittings of order-`r` slices and the layered restrictive equations built on them.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::{compose, glob, invert, loc};
use crate::bases::BasisTag;
use crate::coeff::{Coeff, Poly};
use crate::fqop::{builtin, first_differential, Builtin, FQOperation, FirstDifferential, OperationKind};
use crate::invariance::{unknown, ConstraintRow, RowTag};
use crate::linsolve::eliminate;
use crate::ncalgebra::{AlgebraElement, CliffordPart};
use crate::rational::{frac, Rational};
use crate::word::Word;
use crate::Error;

/// Which property the splitting is adapted to.
#[derive(Clone, Debug, PartialEq)]
pub enum Context {
    /// Clifford productivity around the base system `(Q₁, Q₂)`.
    ProductivityAtQ,
    /// Involutivity with first differential `L`, `L² = 1`.
    InvolutiveAtL(FirstDifferential),
    /// Idempotence with `L² = L`.
    IdempotentAtL(FirstDifferential),
    /// 3-idempotence with `L³ = L`.
    ThreeIdempotentAtL(FirstDifferential),
}

impl Context {
    pub fn differential(&self) -> Option<&FirstDifferential> {
        match self {
            Context::ProductivityAtQ => None,
            Context::InvolutiveAtL(l) | Context::IdempotentAtL(l) | Context::ThreeIdempotentAtL(l) => Some(l),
        }
    }

    fn check(&self) -> Result<(), Error> {
        let Some(l) = self.differential() else { return Ok(()) };
        let l2 = l.mul(l);
        let ok = match self {
            Context::InvolutiveAtL(_) => l2 == FirstDifferential::identity(),
            Context::IdempotentAtL(_) => &l2 == l,
            _ => &l2.mul(l) == l,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Unsupported(format!("differential {l} does not fit the {self} context")))
        }
    }

    /// Lowest order carried by a modifier `U⟨r⟩` in the conjugation form.
    fn first_modifier_order(&self) -> usize {
        match self {
            Context::ProductivityAtQ => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Context::ProductivityAtQ => f.write_str("productivity"),
            Context::InvolutiveAtL(_) => f.write_str("involutive"),
            Context::IdempotentAtL(_) => f.write_str("idempotent"),
            Context::ThreeIdempotentAtL(_) => f.write_str("3-idempotent"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MapName {
    Eta,
    Lambda,
    Kappa,
    CoLambda,
    CoKappa,
    CoEta,
    Pi,
    CoPi,
}

impl MapName {
    pub const ALL: [MapName; 8] = [
        MapName::Eta,
        MapName::Lambda,
        MapName::Kappa,
        MapName::CoLambda,
        MapName::CoKappa,
        MapName::CoEta,
        MapName::Pi,
        MapName::CoPi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MapName::Eta => "eta",
            MapName::Lambda => "lambda",
            MapName::Kappa => "kappa",
            MapName::CoLambda => "colambda",
            MapName::CoKappa => "cokappa",
            MapName::CoEta => "coeta",
            MapName::Pi => "pi",
            MapName::CoPi => "copi",
        }
    }
}

/// Order-`r` slice spaces: scalar `sFQ`, vectorial `vFQ`, and `sFQ ⊕ psFQ ⊕ sFQ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SliceShape {
    Scalar,
    Vectorial,
    Triple,
}

impl SliceShape {
    pub fn tails(self) -> &'static [CliffordPart] {
        match self {
            SliceShape::Scalar => &[CliffordPart::One],
            SliceShape::Vectorial => &[CliffordPart::Q1, CliffordPart::Q2],
            SliceShape::Triple => &[CliffordPart::One, CliffordPart::Q1Q2, CliffordPart::One],
        }
    }
}

fn shapes(ctx: &Context, m: MapName) -> Result<(SliceShape, SliceShape), Error> {
    use SliceShape::*;
    Ok(match (ctx, m) {
        (Context::ProductivityAtQ, MapName::Eta) => (Scalar, Scalar),
        (Context::ProductivityAtQ, MapName::Lambda) => (Scalar, Vectorial),
        (Context::ProductivityAtQ, MapName::Kappa) => (Vectorial, Scalar),
        (Context::ProductivityAtQ, MapName::CoLambda) => (Vectorial, Triple),
        (Context::ProductivityAtQ, MapName::CoKappa) => (Triple, Vectorial),
        (Context::ProductivityAtQ, MapName::CoEta) => (Triple, Triple),
        (_, MapName::Eta | MapName::CoEta) => {
            return Err(Error::Unsupported(format!("{} is only defined for productivity", m.name())))
        }
        _ => (Vectorial, Vectorial),
    })
}

/// A slice point: one element per component of its shape, each `f · tail` with `f` homogeneous.
pub type SlicePoint<C> = Vec<AlgebraElement<C>>;

/// The structure maps of a context on the order-`r` slices over a basis.
pub struct LayeredMaps {
    pub context: Context,
    pub order: usize,
    pub basis: BasisTag,
    words: Vec<Word>,
}

/// Matrix of a structure map in the slice coordinates `(component, word)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceMap {
    pub name: MapName,
    pub domain: SliceShape,
    pub codomain: SliceShape,
    /// `columns[j]` is the image of the `j`-th domain coordinate vector.
    pub columns: Vec<BTreeMap<usize, Rational>>,
    pub rows: usize,
}

impl SliceMap {
    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn rank(&self) -> usize {
        let rows: Vec<_> =
            self.columns.iter().map(|c| (c.iter().map(|(i, q)| (*i, q.clone())).collect(), Rational::zero())).collect();
        eliminate(rows, self.rows).rank()
    }

    pub fn nullity(&self) -> usize {
        self.cols() - self.rank()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(BTreeMap::is_empty)
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &SliceMap) -> SliceMap {
        let columns = first
            .columns
            .iter()
            .map(|c| {
                let mut out: BTreeMap<usize, Rational> = BTreeMap::new();
                for (j, q) in c {
                    for (i, p) in &self.columns[*j] {
                        *out.entry(*i).or_insert_with(Rational::zero) += q * p;
                    }
                }
                out.retain(|_, q| !q.is_zero());
                out
            })
            .collect();
        SliceMap { name: self.name, domain: first.domain, codomain: self.codomain, columns, rows: self.rows }
    }

    pub fn sub(&self, o: &SliceMap) -> SliceMap {
        let columns = self
            .columns
            .iter()
            .zip(&o.columns)
            .map(|(a, b)| {
                let mut out = a.clone();
                for (i, q) in b {
                    *out.entry(*i).or_insert_with(Rational::zero) -= q;
                }
                out.retain(|_, q| !q.is_zero());
                out
            })
            .collect();
        SliceMap { columns, ..self.clone() }
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols()
            && self.columns.iter().enumerate().all(|(j, c)| c.len() == 1 && c.get(&j).is_some_and(|q| q.is_one()))
    }

    /// `rank(self ∘ first) = 0` and `rank(first) + rank(self) = dim`: `im first = ker self`.
    pub fn kernel_is_image_of(&self, first: &SliceMap) -> bool {
        self.after(first).is_zero() && first.rank() == self.nullity()
    }

    /// The image of a coordinate vector.
    pub fn apply<C: Coeff>(&self, x: &[C]) -> Vec<C> {
        let mut out = vec![C::nil(); self.rows];
        for (j, c) in self.columns.iter().enumerate() {
            if x[j].is_nil() {
                continue;
            }
            for (i, q) in c {
                out[*i].add_assign_ref(&x[j].scale_ref(q));
            }
        }
        out
    }
}

impl LayeredMaps {
    pub fn new(context: Context, order: usize, basis: BasisTag) -> Result<Self, Error> {
        context.check()?;
        if order == 0 {
            return Err(Error::Unsupported("layered maps start at order 1".into()));
        }
        Ok(LayeredMaps { context, order, basis, words: Word::all_of_length(order, &(1..=8).collect::<Vec<_>>()) })
    }

    pub fn dim(&self, shape: SliceShape) -> usize {
        shape.tails().len() * self.words.len()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// Coordinates of a slice point; errors if it has the wrong Clifford parts or degrees.
    pub fn coords<C: Coeff>(&self, shape: SliceShape, x: &[AlgebraElement<C>]) -> Result<Vec<C>, Error> {
        let n = self.words.len();
        let mut out = vec![C::nil(); shape.tails().len() * n];
        for (k, (e, tail)) in x.iter().zip(shape.tails()).enumerate() {
            let inv = AlgebraElement::<C>::clifford(self.basis, self.order, *tail).neumann_inverse()?;
            let y = e.mul(&inv)?;
            for ((w, g), c) in y.terms() {
                if *g != CliffordPart::One || w.len() != self.order {
                    return Err(Error::Kind(format!("slice point has a term {w:?}·{} off the slice", g.name())));
                }
                let i = self.words.binary_search(w).map_err(|_| Error::Index(format!("word {w:?}")))?;
                out[k * n + i] = c.clone();
            }
        }
        Ok(out)
    }

    pub fn point<C: Coeff>(&self, shape: SliceShape, coords: &[C]) -> SlicePoint<C> {
        let n = self.words.len();
        shape
            .tails()
            .iter()
            .enumerate()
            .map(|(k, tail)| {
                let mut e = AlgebraElement::zero(self.basis, self.order);
                for (i, w) in self.words.iter().enumerate() {
                    if !coords[k * n + i].is_nil() {
                        e.add_term(*w, CliffordPart::One, coords[k * n + i].clone());
                    }
                }
                e.mul(&AlgebraElement::clifford(self.basis, self.order, *tail)).expect("same basis")
            })
            .collect()
    }

    fn q<C: Coeff>(&self, g: CliffordPart) -> AlgebraElement<C> {
        AlgebraElement::clifford(self.basis, self.order, g)
    }

    fn as_op<C: Coeff>(&self, v: &[AlgebraElement<C>]) -> Result<FQOperation<C>, Error> {
        FQOperation::from_elements(OperationKind::Vectorial, v)
    }

    fn glob<C: Coeff>(&self, v: &[AlgebraElement<C>]) -> Result<SlicePoint<C>, Error> {
        let l = self.context.differential().expect("L context");
        Ok(glob(l, &self.as_op(v)?)?.homogeneous(self.order).elements())
    }

    fn loc<C: Coeff>(&self, v: &[AlgebraElement<C>]) -> Result<SlicePoint<C>, Error> {
        let l = self.context.differential().expect("L context");
        Ok(loc(l, &self.as_op(v)?)?.homogeneous(self.order).elements())
    }

    /// Applies a structure map to a slice point of its domain shape.
    pub fn apply<C: Coeff>(&self, m: MapName, x: &[AlgebraElement<C>]) -> Result<SlicePoint<C>, Error> {
        match self.context {
            Context::ProductivityAtQ => self.apply_q(m, x),
            _ => self.apply_l(m, x),
        }
    }

    fn apply_q<C: Coeff>(&self, m: MapName, x: &[AlgebraElement<C>]) -> Result<SlicePoint<C>, Error> {
        use CliffordPart::*;
        let (q1, q2, q12) = (self.q::<C>(Q1), self.q::<C>(Q2), self.q::<C>(Q1Q2));
        let (q1i, q2i) = (q1.neg(), q2.neg());
        Ok(match m {
            MapName::Eta => vec![x[0].split_project(0, 0)?],
            MapName::Lambda => vec![x[0].commutator(&q1)?, x[0].commutator(&q2)?],
            MapName::Kappa => {
                let a = x[0].mul(&q1i)?;
                let b = x[1].mul(&q2i)?;
                let mut u = a.split_project(1, 0)?.scale(&frac(1, 2));
                u.add_assign(&a.split_project(1, 1)?.scale(&frac(1, 4)))?;
                u.add_assign(&b.split_project(0, 1)?.scale(&frac(1, 2)))?;
                u.add_assign(&b.split_project(1, 1)?.scale(&frac(1, 4)))?;
                vec![u]
            }
            MapName::CoLambda => vec![
                x[0].anticommutator(&q1)?,
                x[1].anticommutator(&q1)?.add(&x[0].anticommutator(&q2)?)?,
                x[1].anticommutator(&q2)?,
            ],
            MapName::CoKappa => {
                let w12 = x[1].anticommutator(&q12)?.scale(&frac(1, 8));
                vec![
                    x[0].anticommutator(&q1)?.scale(&frac(-1, 4)).sub(&w12.mul(&q1)?)?,
                    x[2].anticommutator(&q2)?.scale(&frac(-1, 4)).add(&w12.mul(&q2)?)?,
                ]
            }
            MapName::CoEta => {
                let a = x[0].conj_project(Q1, 0)?.commutator(&q12)?.scale(&frac(1, 2));
                let b = x[2].conj_project(Q2, 0)?.commutator(&q12)?.scale(&frac(1, 2));
                let mid = a.add(&x[1].conj_project(Q1Q2, 1)?)?.sub(&b)?.add(&x[1].split_project(1, 1)?)?;
                vec![x[0].conj_project(Q1, 1)?, mid, x[2].conj_project(Q2, 1)?]
            }
            MapName::Pi => self.apply_q(MapName::Lambda, &self.apply_q(MapName::Kappa, x)?)?,
            MapName::CoPi => self.apply_q(MapName::CoKappa, &self.apply_q(MapName::CoLambda, x)?)?,
        })
    }

    fn apply_l<C: Coeff>(&self, m: MapName, x: &[AlgebraElement<C>]) -> Result<SlicePoint<C>, Error> {
        shapes(&self.context, m)?;
        // Each map is a polynomial in the commuting actions `Loc_L`, `Glob_L`.
        let terms: Vec<(Rational, usize, usize)> = match (&self.context, m) {
            (_, MapName::Lambda) => vec![(frac(1, 1), 1, 0), (frac(-1, 1), 0, 1)],
            (Context::InvolutiveAtL(_), MapName::CoLambda) => vec![(frac(1, 1), 1, 0), (frac(1, 1), 0, 1)],
            (Context::InvolutiveAtL(_), MapName::Kappa) => vec![(frac(1, 4), 1, 0), (frac(-1, 4), 0, 1)],
            (Context::InvolutiveAtL(_), MapName::CoKappa) => vec![(frac(1, 4), 1, 0), (frac(1, 4), 0, 1)],
            (Context::InvolutiveAtL(_), MapName::Pi) => vec![(frac(1, 2), 0, 0), (frac(-1, 2), 1, 1)],
            (Context::InvolutiveAtL(_), MapName::CoPi) => vec![(frac(1, 2), 0, 0), (frac(1, 2), 1, 1)],
            (Context::IdempotentAtL(_), MapName::Kappa) => vec![(frac(1, 1), 1, 0), (frac(-1, 1), 0, 1)],
            (Context::IdempotentAtL(_), MapName::CoLambda | MapName::CoKappa) => {
                vec![(frac(1, 1), 1, 0), (frac(1, 1), 0, 1), (frac(-1, 1), 0, 0)]
            }
            (Context::IdempotentAtL(_), MapName::CoPi) => {
                vec![(frac(1, 1), 0, 0), (frac(-1, 1), 1, 0), (frac(-1, 1), 0, 1), (frac(2, 1), 1, 1)]
            }
            (Context::ThreeIdempotentAtL(_), MapName::CoLambda) => {
                vec![(frac(1, 1), 2, 0), (frac(1, 1), 1, 1), (frac(1, 1), 0, 2), (frac(-1, 1), 0, 0)]
            }
            (Context::ThreeIdempotentAtL(_), MapName::Kappa) => {
                vec![(frac(1, 1), 1, 0), (frac(-1, 1), 0, 1), (frac(3, 4), 2, 1), (frac(-3, 4), 1, 2)]
            }
            (Context::ThreeIdempotentAtL(_), MapName::CoKappa) => vec![
                (frac(-3, 4), 2, 2),
                (frac(1, 4), 1, 1),
                (frac(1, 1), 0, 2),
                (frac(1, 1), 2, 0),
                (frac(-1, 1), 0, 0),
            ],
            (Context::ThreeIdempotentAtL(_), MapName::CoPi) => vec![
                (frac(1, 1), 0, 0),
                (frac(-1, 1), 2, 0),
                (frac(-1, 1), 0, 2),
                (frac(3, 2), 2, 2),
                (frac(1, 2), 1, 1),
            ],
            (_, MapName::Pi) => return self.apply_l(MapName::Lambda, &self.apply_l(MapName::Kappa, x)?),
            _ => unreachable!("shapes() rejects the rest"),
        };
        let mut out: SlicePoint<C> = vec![AlgebraElement::zero(self.basis, self.order); 2];
        let mut cache: BTreeMap<(usize, usize), SlicePoint<C>> = BTreeMap::new();
        for (c, a, b) in terms {
            let v = self.power(&mut cache, x, a, b)?;
            for (o, e) in out.iter_mut().zip(&v) {
                o.add_assign(&e.scale(&c))?;
            }
        }
        Ok(out)
    }

    /// `Loc_L^a Glob_L^b x`.
    fn power<C: Coeff>(
        &self,
        cache: &mut BTreeMap<(usize, usize), SlicePoint<C>>,
        x: &[AlgebraElement<C>],
        a: usize,
        b: usize,
    ) -> Result<SlicePoint<C>, Error> {
        if let Some(v) = cache.get(&(a, b)) {
            return Ok(v.clone());
        }
        let v = match (a, b) {
            (0, 0) => x.to_vec(),
            (0, _) => self.glob(&self.power(cache, x, 0, b - 1)?)?,
            _ => self.loc(&self.power(cache, x, a - 1, b)?)?,
        };
        cache.insert((a, b), v.clone());
        Ok(v)
    }

    /// The matrix of a structure map.
    pub fn matrix(&self, m: MapName) -> Result<SliceMap, Error> {
        let (dom, cod) = shapes(&self.context, m)?;
        let n = self.dim(dom);
        let mut columns = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![Rational::zero(); n];
            e[j] = Rational::one();
            let y = self.apply(m, &self.point(dom, &e))?;
            let c = self.coords(cod, &y)?;
            columns.push(c.into_iter().enumerate().filter(|(_, q)| !q.is_zero()).collect());
        }
        Ok(SliceMap { name: m, domain: dom, codomain: cod, columns, rows: self.dim(cod) })
    }
}

/// All structure maps of `ctx` at order `r` in `basis`.
pub fn layered_maps(
    ctx: &Context,
    r: usize,
    basis: BasisTag,
) -> Result<(LayeredMaps, BTreeMap<MapName, SliceMap>), Error> {
    let maps = LayeredMaps::new(ctx.clone(), r, basis)?;
    let mut out = BTreeMap::new();
    for m in MapName::ALL {
        if shapes(ctx, m).is_ok() {
            out.insert(m, maps.matrix(m)?);
        }
    }
    Ok((maps, out))
}

/// The lower-order term entering the layered equation: `Ψ⊙Ψ`, `Ψ∘Ψ` or `Ψ∘Ψ∘Ψ` of `Ψ^{≤r−1}`, at order `r`.
fn lower_term<C: Coeff>(ctx: &Context, lower: &FQOperation<C>, r: usize) -> Result<SlicePoint<C>, Error> {
    let psi = lower.with_order(r).filter(|w| w.len() < r);
    let out = match ctx {
        Context::ProductivityAtQ => {
            let e = psi.elements();
            vec![e[0].mul(&e[0])?, e[0].mul(&e[1])?.add(&e[1].mul(&e[0])?)?, e[1].mul(&e[1])?]
        }
        Context::InvolutiveAtL(_) | Context::IdempotentAtL(_) => compose(&psi, &psi)?.elements(),
        Context::ThreeIdempotentAtL(_) => compose(&psi, &compose(&psi, &psi)?)?.elements(),
    };
    Ok(out.iter().map(|e| e.homogeneous(r)).collect())
}

/// Rows `coπ Ψ⟨r⟩ + coϰ(X⟨r⟩) = 0` in the order-`r` unknowns `unknown(s, w)` of the maps' basis,
/// with `X` the lower-order product term built from `lower`.
pub fn layered_equations(maps: &LayeredMaps, lower: &FQOperation<Poly>) -> Result<Vec<ConstraintRow>, Error> {
    let r = maps.order;
    let lower = lower.transform(maps.basis);
    let copi = maps.matrix(MapName::CoPi)?;
    let x = lower_term(&maps.context, &lower, r)?;
    let rhs = maps.coords(SliceShape::Vectorial, &maps.apply(MapName::CoKappa, &x)?)?;
    let n = maps.words.len();
    let mut lhs: Vec<Vec<(crate::coeff::Var, Rational)>> = vec![Vec::new(); copi.rows];
    for (j, c) in copi.columns.iter().enumerate() {
        let v = unknown(j / n, &maps.words[j % n]);
        for (i, q) in c {
            lhs[*i].push((v, q.clone()));
        }
    }
    let mut rows = Vec::new();
    for (i, (l, b)) in lhs.into_iter().zip(rhs).enumerate() {
        if l.is_empty() && b.is_nil() {
            continue;
        }
        let mut l = l;
        l.sort_by_key(|(v, _)| *v);
        rows.push(ConstraintRow {
            tag: RowTag::coeff(maps.basis, i / n, maps.words[i % n]),
            order: r,
            lhs: l,
            rhs: b.neg_ref(),
        });
    }
    Ok(rows)
}

/// Modifiers `U⟨r⟩` of the economical conjugation form, scalar slices for productivity and
/// vectorial slices otherwise, with the differential `L` for the `L` contexts.
#[derive(Clone, Debug)]
pub struct ConjugationForm {
    pub context: Context,
    pub basis: BasisTag,
    pub order: usize,
    /// `(r, U⟨r⟩)` for `r` from the first modifier order up to `order`.
    pub modifiers: Vec<(usize, FQOperation<Rational>)>,
}

/// `…(1+U⟨2⟩)(1+U⟨1⟩)·(Q₁,Q₂)·(1+U⟨1⟩)⁻¹(1+U⟨2⟩)⁻¹…` or
/// `…(Id+U⟨2⟩)∘(E+T(L))∘(Id+U⟨2⟩)⁻¹…`, truncated at `order`.
pub fn conjugation_product(
    ctx: &Context,
    modifiers: &[(usize, FQOperation<Rational>)],
    basis: BasisTag,
    order: usize,
) -> Result<FQOperation<Rational>, Error> {
    match ctx {
        Context::ProductivityAtQ => {
            let mut p = AlgebraElement::<Rational>::one(basis, order);
            for (_, u) in modifiers {
                let u = u.transform(basis).with_order(order).element(0);
                p = AlgebraElement::one(basis, order).add(&u)?.mul(&p)?;
            }
            let pi = p.neumann_inverse()?;
            let out: Vec<_> = [CliffordPart::Q1, CliffordPart::Q2]
                .iter()
                .map(|g| p.mul(&AlgebraElement::clifford(basis, order, *g))?.mul(&pi))
                .collect::<Result<_, _>>()?;
            FQOperation::from_elements(OperationKind::Vectorial, &out)
        }
        _ => {
            ctx.check()?;
            let l = ctx.differential().expect("L context");
            let mut psi = l.to_operation::<Rational>(order).transform(basis);
            let id = builtin(Builtin::Id, order, basis)?;
            for (_, u) in modifiers {
                let g = id.add(&u.transform(basis).with_order(order))?;
                psi = compose(&compose(&g, &psi)?, &invert(&g)?)?;
            }
            Ok(psi)
        }
    }
}

/// Recovers the economical modifiers of `op`; errors at the first order where `op` violates the
/// context property.
pub fn conjugation_form(op: &FQOperation<Rational>, ctx: &Context) -> Result<ConjugationForm, Error> {
    if op.kind() != OperationKind::Vectorial || !op.is_clifford_conservative() {
        return Err(Error::Kind("conjugation form needs a Clifford conservative vectorial operation".into()));
    }
    ctx.check()?;
    if let Some(l) = ctx.differential() {
        if &first_differential(op)? != l {
            return Err(Error::Inconsistent("first differential differs from the context's L".into()));
        }
    }
    let (basis, order) = (op.basis(), op.order());
    let mut modifiers = Vec::new();
    for r in ctx.first_modifier_order()..=order {
        let current = conjugation_product(ctx, &modifiers, basis, r)?;
        let diff = op.truncate(r).sub(&current)?.homogeneous(r);
        let maps = LayeredMaps::new(ctx.clone(), r, basis)?;
        let u = maps.apply(MapName::Kappa, &diff.elements())?;
        let u = match ctx {
            Context::ProductivityAtQ => FQOperation::from_elements(OperationKind::Scalar, &u)?,
            _ => FQOperation::from_elements(OperationKind::Vectorial, &u)?,
        };
        modifiers.push((r, u.with_order(order)));
        let next = conjugation_product(ctx, &modifiers, basis, r)?;
        if next != op.truncate(r) {
            return Err(Error::Inconsistent(format!("the {ctx} property fails at order {r}")));
        }
    }
    Ok(ConjugationForm { context: ctx.clone(), basis, order, modifiers })
}
