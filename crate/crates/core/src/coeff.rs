//! Coefficient rings: exact rationals and sparse multivariate polynomials over them.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use crate::rational::{fmt_rational, Rational};

pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn nil() -> Self;
    fn unit() -> Self;
    fn is_nil(&self) -> bool;
    fn from_rational(q: &Rational) -> Self;
    fn add_assign_ref(&mut self, o: &Self);
    fn sub_assign_ref(&mut self, o: &Self);
    fn mul_ref(&self, o: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn scale_ref(&self, q: &Rational) -> Self;
    /// The value if this coefficient does not depend on any unknown.
    fn as_constant(&self) -> Option<Rational>;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&crate::rational::int(n))
    }
}

impl Coeff for Rational {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn add_assign_ref(&mut self, o: &Self) {
        *self += o;
    }
    fn sub_assign_ref(&mut self, o: &Self) {
        *self -= o;
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn scale_ref(&self, q: &Rational) -> Self {
        self * q
    }
    fn as_constant(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

pub type Var = u32;

/// Sorted list of (variable, exponent) pairs.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.0.iter().find(|&&(w, _)| w == v).map_or(0, |&(_, e)| e)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < o.0.len() {
            let (a, b) = (self.0[i], o.0[j]);
            if a.0 == b.0 {
                out.push((a.0, a.1 + b.1));
                i += 1;
                j += 1;
            } else if a.0 < b.0 {
                out.push(a);
                i += 1;
            } else {
                out.push(b);
                j += 1;
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&o.0[j..]);
        Monomial(out)
    }

    /// Removes `v` entirely.
    pub fn without(&self, v: Var) -> Monomial {
        Monomial(self.0.iter().copied().filter(|&(w, _)| w != v).collect())
    }

    /// Divides by `m` if `m` divides this monomial.
    pub fn div(&self, m: &Monomial) -> Option<Monomial> {
        let mut out = Vec::new();
        let mut j = 0;
        for &(v, e) in &self.0 {
            if j < m.0.len() && m.0[j].0 == v {
                let f = m.0[j].1;
                if f > e {
                    return None;
                }
                if e > f {
                    out.push((v, e - f));
                }
                j += 1;
            } else if j < m.0.len() && m.0[j].0 < v {
                return None;
            } else {
                out.push((v, e));
            }
        }
        if j < m.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    pub fn lcm(&self, o: &Monomial) -> Monomial {
        let mut map: BTreeMap<Var, u32> = BTreeMap::new();
        for &(v, e) in self.0.iter().chain(o.0.iter()) {
            let x = map.entry(v).or_insert(0);
            *x = (*x).max(e);
        }
        Monomial(map.into_iter().collect())
    }

    /// Lexicographic comparison with lower variable ids ranking higher.
    pub fn lex_cmp(&self, o: &Monomial) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        let mut i = 0;
        loop {
            match (self.0.get(i), o.0.get(i)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(a), Some(b)) => {
                    if a.0 != b.0 {
                        return if a.0 < b.0 { Ordering::Greater } else { Ordering::Less };
                    }
                    if a.1 != b.1 {
                        return a.1.cmp(&b.1);
                    }
                }
            }
            i += 1;
        }
    }
}

/// Sparse polynomial over the rationals in variables `x0, x1, ...`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn constant(q: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !Zero::is_zero(&q) {
            terms.insert(Monomial::one(), q);
        }
        Poly { terms }
    }

    pub fn var(v: Var) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(v), Rational::one());
        Poly { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Poly::default();
        for (m, c) in it {
            p.add_term(m, &c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: &Rational) {
        if Zero::is_zero(c) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if Zero::is_zero(e.get()) {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
        }
    }

    pub fn coeff_of(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff_of(&Monomial::one())
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.0.iter().map(|&(v, _)| v)).collect()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.degree_in(v)).max().unwrap_or(0)
    }

    /// Splits `self = a·v + b` where neither `a` nor `b` contains `v`; `None` if `v` occurs
    /// with exponent above one.
    pub fn linear_split(&self, v: Var) -> Option<(Poly, Poly)> {
        let mut a = Poly::default();
        let mut b = Poly::default();
        for (m, c) in &self.terms {
            match m.degree_in(v) {
                0 => b.add_term(m.clone(), c),
                1 => a.add_term(m.without(v), c),
                _ => return None,
            }
        }
        Some((a, b))
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.terms.is_empty() || o.terms.is_empty() {
            return Poly::default();
        }
        if let Some(q) = o.as_const_ref() {
            return self.scale(q);
        }
        if let Some(q) = self.as_const_ref() {
            return o.scale(q);
        }
        let mut out = Poly::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), &(c1 * c2));
            }
        }
        out
    }

    fn as_const_ref(&self) -> Option<&Rational> {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.is_one() {
                return Some(c);
            }
        }
        None
    }

    pub fn scale(&self, q: &Rational) -> Poly {
        if Zero::is_zero(q) {
            return Poly::default();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect() }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::constant(Rational::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitutes the mapped variables; unmapped variables are kept.
    pub fn substitute(&self, map: &HashMap<Var, Poly>) -> Poly {
        if !self.terms.keys().any(|m| m.0.iter().any(|(v, _)| map.contains_key(v))) {
            return self.clone();
        }
        let mut out = Poly::default();
        for (m, c) in &self.terms {
            let mut kept = Vec::new();
            let mut acc = Poly::constant(c.clone());
            for &(v, e) in &m.0 {
                match map.get(&v) {
                    Some(p) => acc = acc.mul(&p.pow(e)),
                    None => kept.push((v, e)),
                }
            }
            let km = Monomial(kept);
            for (m2, c2) in acc.terms {
                out.add_term(m2.mul(&km), &c2);
            }
        }
        out
    }

    pub fn eval(&self, vals: &HashMap<Var, Rational>) -> Option<Rational> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in &m.0 {
                let x = vals.get(&v)?;
                for _ in 0..e {
                    t *= x;
                }
            }
            acc += t;
        }
        Some(acc)
    }

    /// Leading term under [`Monomial::lex_cmp`].
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().max_by(|a, b| a.0.lex_cmp(b.0))
    }

    pub fn fmt_with(&self, name: &dyn Fn(Var) -> String) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = num_traits::Signed::is_negative(c);
            if i > 0 {
                s.push_str(if neg { " - " } else { " + " });
            } else if neg {
                s.push('-');
            }
            let a = num_traits::Signed::abs(c);
            let mut parts = Vec::new();
            if !a.is_one() || m.is_one() {
                parts.push(fmt_rational(&a));
            }
            for &(v, e) in &m.0 {
                if e == 1 {
                    parts.push(name(v));
                } else {
                    parts.push(format!("{}^{}", name(v), e));
                }
            }
            s.push_str(&parts.join("*"));
        }
        s
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(&|v| format!("x{v}")))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Coeff for Poly {
    fn nil() -> Self {
        Poly::default()
    }
    fn unit() -> Self {
        Poly::constant(Rational::one())
    }
    fn is_nil(&self) -> bool {
        self.terms.is_empty()
    }
    fn from_rational(q: &Rational) -> Self {
        Poly::constant(q.clone())
    }
    fn add_assign_ref(&mut self, o: &Self) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c);
        }
    }
    fn sub_assign_ref(&mut self, o: &Self) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), &-c);
        }
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn neg_ref(&self) -> Self {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
    fn scale_ref(&self, q: &Rational) -> Self {
        self.scale(q)
    }
    fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.as_const_ref().cloned(),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn poly_arithmetic() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let mut s = x.clone();
        s.add_assign_ref(&y);
        let sq = s.mul(&s);
        assert_eq!(sq.coeff_of(&Monomial::var(0).mul(&Monomial::var(1))), int(2));
        let mut map = HashMap::new();
        map.insert(1, Poly::constant(frac(1, 2)));
        let sub = sq.substitute(&map);
        assert_eq!(sub.constant_term(), frac(1, 4));
        assert_eq!(sub.degree_in(0), 2);
        assert!(sub.linear_split(0).is_none());
        let (a, b) = s.linear_split(0).unwrap();
        assert_eq!(a, Poly::constant(int(1)));
        assert_eq!(b, y);
    }

    #[test]
    fn monomial_division() {
        let m = Monomial::var(0).mul(&Monomial::var(0)).mul(&Monomial::var(3));
        assert_eq!(m.div(&Monomial::var(3)), Some(Monomial::var(0).mul(&Monomial::var(0))));
        assert_eq!(m.div(&Monomial::var(1)), None);
        assert_eq!(Monomial::var(0).lcm(&Monomial::var(1)).degree(), 2);
    }
}
