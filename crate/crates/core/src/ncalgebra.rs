//! The truncated free algebra generated by `Q₁, Q₂` and the eight perturbation variables.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::bases::{conj_letter, conjugate_word, BasisTag};
use crate::coeff::Coeff;
use crate::rational::{half, Rational};
use crate::word::Word;
use crate::Error;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum CliffordPart {
    One,
    Q1,
    Q2,
    Q1Q2,
}

impl CliffordPart {
    pub const ALL: [CliffordPart; 4] = [CliffordPart::One, CliffordPart::Q1, CliffordPart::Q2, CliffordPart::Q1Q2];

    fn bits(self) -> (u8, u8) {
        match self {
            CliffordPart::One => (0, 0),
            CliffordPart::Q1 => (1, 0),
            CliffordPart::Q2 => (0, 1),
            CliffordPart::Q1Q2 => (1, 1),
        }
    }

    fn from_bits(a: u8, b: u8) -> Self {
        match (a, b) {
            (0, 0) => CliffordPart::One,
            (1, 0) => CliffordPart::Q1,
            (0, 1) => CliffordPart::Q2,
            _ => CliffordPart::Q1Q2,
        }
    }

    /// `Q₁^a Q₂^b · Q₁^c Q₂^d` as a signed part.
    pub fn mul(self, o: CliffordPart) -> (i8, CliffordPart) {
        let (a, b) = self.bits();
        let (c, d) = o.bits();
        let flips = b * c + a * c + b * d;
        let sign = if flips % 2 == 0 { 1 } else { -1 };
        (sign, CliffordPart::from_bits(a ^ c, b ^ d))
    }

    pub fn inverse(self) -> (i8, CliffordPart) {
        match self {
            CliffordPart::One => (1, self),
            _ => (-1, self),
        }
    }

    /// Sign of `g h g⁻¹` relative to `h`.
    pub fn conj_sign(g: CliffordPart, h: CliffordPart) -> i8 {
        if g == CliffordPart::One || h == CliffordPart::One || g == h {
            1
        } else {
            -1
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CliffordPart::One => "1",
            CliffordPart::Q1 => "Q1",
            CliffordPart::Q2 => "Q2",
            CliffordPart::Q1Q2 => "Q1Q2",
        }
    }
}

/// Sparse sum of `c · w · g` with every Clifford part `g` to the right of its word.
#[derive(Clone, PartialEq)]
pub struct AlgebraElement<C: Coeff = Rational> {
    basis: BasisTag,
    order: usize,
    terms: BTreeMap<(Word, CliffordPart), C>,
}

impl<C: Coeff> AlgebraElement<C> {
    pub fn zero(basis: BasisTag, order: usize) -> Self {
        AlgebraElement { basis, order, terms: BTreeMap::new() }
    }

    pub fn one(basis: BasisTag, order: usize) -> Self {
        Self::constant(basis, order, C::unit())
    }

    pub fn constant(basis: BasisTag, order: usize, c: C) -> Self {
        Self::monomial(basis, order, Word::EMPTY, CliffordPart::One, c)
    }

    pub fn clifford(basis: BasisTag, order: usize, g: CliffordPart) -> Self {
        Self::monomial(basis, order, Word::EMPTY, g, C::unit())
    }

    pub fn letter(basis: BasisTag, order: usize, l: u8) -> Self {
        Self::monomial(basis, order, Word::letter(l), CliffordPart::One, C::unit())
    }

    pub fn monomial(basis: BasisTag, order: usize, w: Word, g: CliffordPart, c: C) -> Self {
        let mut e = Self::zero(basis, order);
        e.add_term(w, g, c);
        e
    }

    /// Builds `Σ c_w · w · g` from a word series.
    pub fn from_series(basis: BasisTag, order: usize, series: &BTreeMap<Word, C>, g: CliffordPart) -> Self {
        let mut e = Self::zero(basis, order);
        for (w, c) in series {
            e.add_term(*w, g, c.clone());
        }
        e
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Word, CliffordPart), &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Word, g: CliffordPart) -> C {
        self.terms.get(&(*w, g)).cloned().unwrap_or_else(C::nil)
    }

    /// Adds a term, discarding it beyond the truncation order.
    pub fn add_term(&mut self, w: Word, g: CliffordPart, c: C) {
        if w.len() > self.order || c.is_nil() {
            return;
        }
        match self.terms.entry((w, g)) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign_ref(&c);
                if e.get().is_nil() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    fn check_basis(&self, o: &Self) -> Result<(), Error> {
        if self.basis != o.basis {
            return Err(Error::BasisMismatch(self.basis, o.basis));
        }
        Ok(())
    }

    pub fn add_assign(&mut self, o: &Self) -> Result<(), Error> {
        self.check_basis(o)?;
        if o.order < self.order {
            self.truncate_in_place(o.order);
        }
        for ((w, g), c) in &o.terms {
            self.add_term(*w, *g, c.clone());
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self, Error> {
        let mut x = self.clone();
        x.add_assign(o)?;
        Ok(x)
    }

    pub fn sub(&self, o: &Self) -> Result<Self, Error> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg_ref())
    }

    pub fn scale(&self, q: &Rational) -> Self {
        self.map(|c| c.scale_ref(q))
    }

    pub fn scale_coeff(&self, k: &C) -> Self {
        self.map(|c| c.mul_ref(k))
    }

    fn map(&self, f: impl Fn(&C) -> C) -> Self {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            let v = f(c);
            if !v.is_nil() {
                terms.insert(*k, v);
            }
        }
        AlgebraElement { basis: self.basis, order: self.order, terms }
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> AlgebraElement<D> {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            let v = f(c);
            if !v.is_nil() {
                terms.insert(*k, v);
            }
        }
        AlgebraElement { basis: self.basis, order: self.order, terms }
    }

    fn truncate_in_place(&mut self, order: usize) {
        if order < self.order {
            self.terms.retain(|(w, _), _| w.len() <= order);
            self.order = order;
        }
    }

    /// Truncates to `min(order, self.order)`.
    pub fn truncate(&self, order: usize) -> Self {
        let mut x = self.clone();
        x.truncate_in_place(order);
        x
    }

    /// Declares a higher truncation order; only sound when the missing terms are known to vanish.
    pub fn with_order(&self, order: usize) -> Self {
        let mut x = self.truncate(order);
        x.order = order;
        x
    }

    /// Terms whose word has length exactly `r`.
    pub fn homogeneous(&self, r: usize) -> Self {
        let mut x = Self::zero(self.basis, self.order);
        for ((w, g), c) in &self.terms {
            if w.len() == r {
                x.terms.insert((*w, *g), c.clone());
            }
        }
        x
    }

    /// Keeps terms whose word satisfies `keep`.
    pub fn filter_words(&self, keep: impl Fn(&Word) -> bool) -> Self {
        let mut x = self.clone();
        x.terms.retain(|(w, _), _| keep(w));
        x
    }

    pub fn min_word_len(&self) -> Option<usize> {
        self.terms.keys().map(|(w, _)| w.len()).min()
    }

    pub fn mul(&self, o: &Self) -> Result<Self, Error> {
        let order = self.order.min(o.order);
        self.mul_range(o, 0, order, order)
    }

    /// Product truncated at `order` (at most the operands' orders).
    pub fn mul_truncated(&self, o: &Self, order: usize) -> Result<Self, Error> {
        let order = order.min(self.order).min(o.order);
        self.mul_range(o, 0, order, order)
    }

    /// Only the terms of word length exactly `r` of the product.
    pub fn mul_homogeneous(&self, o: &Self, r: usize) -> Result<Self, Error> {
        let order = self.order.min(o.order);
        self.mul_range(o, r, r, order)
    }

    fn mul_range(&self, o: &Self, lo: usize, hi: usize, order: usize) -> Result<Self, Error> {
        self.check_basis(o)?;
        let hi = hi.min(order);
        let mut right: Vec<(&Word, CliffordPart, &C)> = o.terms.iter().map(|((w, g), c)| (w, *g, c)).collect();
        right.sort_by_key(|(w, _, _)| w.len());
        let mut acc: HashMap<(Word, CliffordPart), C> = HashMap::new();
        for g in CliffordPart::ALL {
            let left: Vec<_> = self.terms.iter().filter(|((_, h), _)| *h == g).collect();
            if left.is_empty() {
                continue;
            }
            let conj: Vec<(Word, CliffordPart, i8, &C)> = right
                .iter()
                .map(|(w, h, c)| {
                    let (s, w2) = conjugate_word(self.basis, g, w);
                    let (s2, gh) = g.mul(*h);
                    (w2, gh, s * s2, *c)
                })
                .collect();
            for ((w1, _), c1) in left {
                for (w2, gh, s, c2) in &conj {
                    let n = w1.len() + w2.len();
                    if n > hi {
                        break;
                    }
                    if n < lo {
                        continue;
                    }
                    let mut p = c1.mul_ref(c2);
                    if *s < 0 {
                        p = p.neg_ref();
                    }
                    if p.is_nil() {
                        continue;
                    }
                    match acc.entry((w1.concat(w2), *gh)) {
                        std::collections::hash_map::Entry::Occupied(mut e) => e.get_mut().add_assign_ref(&p),
                        std::collections::hash_map::Entry::Vacant(e) => {
                            e.insert(p);
                        }
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_nil()).collect();
        Ok(AlgebraElement { basis: self.basis, order, terms })
    }

    pub fn mul_all(factors: &[&Self]) -> Result<Self, Error> {
        let mut it = factors.iter();
        let mut acc = (*it.next().expect("at least one factor")).clone();
        for f in it {
            acc = acc.mul(f)?;
        }
        Ok(acc)
    }

    pub fn pow(&self, e: usize) -> Result<Self, Error> {
        let mut acc = Self::one(self.basis, self.order);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn commutator(&self, o: &Self) -> Result<Self, Error> {
        self.mul(o)?.sub(&o.mul(self)?)
    }

    pub fn anticommutator(&self, o: &Self) -> Result<Self, Error> {
        self.mul(o)?.add(&o.mul(self)?)
    }

    /// `g x g⁻¹`, which equals `g⁻¹ x g`.
    pub fn conjugate(&self, g: CliffordPart) -> Self {
        if g == CliffordPart::One {
            return self.clone();
        }
        let mut x = Self::zero(self.basis, self.order);
        for ((w, h), c) in &self.terms {
            let (s, w2) = conjugate_word(self.basis, g, w);
            let s = s * CliffordPart::conj_sign(g, *h);
            x.add_term(w2, *h, if s < 0 { c.neg_ref() } else { c.clone() });
        }
        x
    }

    /// `½(x + q⁻¹xq)` for parity 0, `½(x − q⁻¹xq)` for parity 1.
    pub fn conj_project(&self, q: CliffordPart, parity: u8) -> Result<Self, Error> {
        if q == CliffordPart::One {
            return Err(Error::Unsupported("projection along the unit".into()));
        }
        let c = self.conjugate(q);
        let s = if parity == 0 { self.add(&c)? } else { self.sub(&c)? };
        Ok(s.scale(&half()))
    }

    /// `(x)^{ι₁}_{Q₁}{}^{ι₂}_{Q₂}`.
    pub fn split_project(&self, i1: u8, i2: u8) -> Result<Self, Error> {
        self.conj_project(CliffordPart::Q1, i1)?.conj_project(CliffordPart::Q2, i2)
    }

    /// Truncated inverse via the geometric series around the invertible leading term.
    pub fn neumann_inverse(&self) -> Result<Self, Error> {
        let lead: Vec<_> = self.terms.iter().filter(|((w, _), _)| w.is_empty()).collect();
        if lead.len() != 1 {
            return Err(Error::NotInvertible(format!("leading part has {} terms, expected a single unit", lead.len())));
        }
        let ((_, g), u) = lead[0];
        let u = u.as_constant().ok_or_else(|| Error::NotInvertible("leading coefficient is not a constant".into()))?;
        let (s, gi) = g.inverse();
        let uinv = num_traits::Inv::inv(u) * crate::rational::int(s as i64);
        let lead_inv = Self::monomial(self.basis, self.order, Word::EMPTY, gi, C::from_rational(&uinv));
        let mut rest = self.clone();
        rest.terms.retain(|(w, _), _| !w.is_empty());
        let e = lead_inv.mul(&rest)?.neg();
        let mut sum = Self::one(self.basis, self.order);
        let mut term = Self::one(self.basis, self.order);
        for _ in 0..self.order {
            term = term.mul(&e)?;
            if term.is_zero() {
                break;
            }
            sum.add_assign(&term)?;
        }
        sum.mul(&lead_inv)
    }

    /// The word series of the terms carrying Clifford part `g`.
    pub fn clifford_component(&self, g: CliffordPart) -> BTreeMap<Word, C> {
        self.terms.iter().filter(|((_, h), _)| *h == g).map(|((w, _), c)| (*w, c.clone())).collect()
    }

    /// Clifford parts carrying at least one term.
    pub fn parts(&self) -> Vec<CliffordPart> {
        let mut v: Vec<_> = self.terms.keys().map(|(_, g)| *g).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Substitutes each letter by an element (an algebra homomorphism fixing `Q₁, Q₂`).
    /// The images must respect the conjugation rules of the letters they replace.
    pub fn substitute(&self, images: &[Self; 8], order: usize) -> Result<Self, Error> {
        let basis = images[0].basis;
        let mut out = Self::zero(basis, order);
        for g in self.parts() {
            let series = self.clifford_component(g);
            let x = substitute_series(&series, images, order)?;
            out.add_assign(&x.mul(&Self::clifford(basis, order, g))?)?;
        }
        Ok(out)
    }

    pub fn sign_letter(&self, g: CliffordPart, l: u8) -> (i8, u8) {
        conj_letter(self.basis, g, l)
    }
}

/// Evaluates `Σ p_w x_{w₁}⋯x_{w_n}` by Horner's rule over the prefix tree of the series.
pub fn substitute_series<C: Coeff>(
    series: &BTreeMap<Word, C>,
    images: &[AlgebraElement<C>; 8],
    order: usize,
) -> Result<AlgebraElement<C>, Error> {
    let basis = images[0].basis;
    let mut prefixes = std::collections::HashSet::new();
    for w in series.keys() {
        for k in 0..=w.len() {
            prefixes.insert(w.slice(0, k));
        }
    }
    let min_len: Vec<usize> = images.iter().map(|x| x.min_word_len().unwrap_or(usize::MAX)).collect();
    fn rec<C: Coeff>(
        u: Word,
        budget: usize,
        series: &BTreeMap<Word, C>,
        images: &[AlgebraElement<C>; 8],
        min_len: &[usize],
        prefixes: &std::collections::HashSet<Word>,
        basis: BasisTag,
    ) -> Result<AlgebraElement<C>, Error> {
        let mut acc = AlgebraElement::zero(basis, budget);
        if let Some(c) = series.get(&u) {
            acc.add_term(Word::EMPTY, CliffordPart::One, c.clone());
        }
        for l in 1..=8u8 {
            let m = min_len[(l - 1) as usize];
            if m > budget || u.len() >= crate::word::MAX_LEN {
                continue;
            }
            let v = u.push(l);
            if !prefixes.contains(&v) {
                continue;
            }
            let inner = rec(v, budget - m, series, images, min_len, prefixes, basis)?;
            if inner.is_zero() {
                continue;
            }
            let x = images[(l - 1) as usize].truncate(budget);
            acc.add_assign(&x.mul_truncated(&inner.with_order(budget), budget)?)?;
        }
        Ok(acc)
    }
    if !prefixes.contains(&Word::EMPTY) {
        return Ok(AlgebraElement::zero(basis, order));
    }
    rec(Word::EMPTY, order, series, images, &min_len, &prefixes, basis)
}

impl<C: Coeff> fmt::Display for AlgebraElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((w, g), c)| {
                let mut s = format!("({c})");
                if !w.is_empty() {
                    s.push_str(&format!("·r{w}"));
                }
                if *g != CliffordPart::One {
                    s.push_str(&format!("·{}", g.name()));
                }
                s
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl<C: Coeff> fmt::Debug for AlgebraElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} order {}] {}", self.basis, self.order, self)
    }
}
