//! Closed-form expressions in `A₁, A₂, Q₁, Q₂` and their expansion into coefficient tables.

use num_traits::{One, Zero};

use super::{FQOperation, OperationKind};
use crate::bases::{basis_transform, transform_element, BasisTag};
use crate::coeff::Coeff;
use crate::ncalgebra::{AlgebraElement, CliffordPart};
use crate::rational::{parse_rational, rational_binomial, rational_sqrt, Rational};
use crate::word::Word;
use crate::Error;

#[derive(Clone, Debug, PartialEq)]
pub enum Expression {
    /// `A_i = Q_i + R_i` with generic `R_i`.
    A(u8),
    Q(CliffordPart),
    Const(Rational),
    Neg(Box<Expression>),
    Add(Box<Expression>, Box<Expression>),
    Sub(Box<Expression>, Box<Expression>),
    Mul(Box<Expression>, Box<Expression>),
    Scale(Rational, Box<Expression>),
    Inv(Box<Expression>),
    Commutator(Box<Expression>, Box<Expression>),
    Anticommutator(Box<Expression>, Box<Expression>),
    Project(CliffordPart, u8, Box<Expression>),
    /// Formal polar part `X(−X²)^{-1/2}`.
    Pol(Box<Expression>),
}

impl Expression {
    pub fn a(i: u8) -> Self {
        Expression::A(i)
    }

    pub fn mul(a: Expression, b: Expression) -> Self {
        Expression::Mul(Box::new(a), Box::new(b))
    }

    pub fn inv(a: Expression) -> Self {
        Expression::Inv(Box::new(a))
    }

    pub fn scale(q: Rational, a: Expression) -> Self {
        Expression::Scale(q, Box::new(a))
    }

    pub fn commutator(a: Expression, b: Expression) -> Self {
        Expression::Commutator(Box::new(a), Box::new(b))
    }

    pub fn pol(a: Expression) -> Self {
        Expression::Pol(Box::new(a))
    }
}

/// The generic perturbed pair `A_j = (1 + Σ split letters of j) Q_j`, written in `basis`.
pub fn generic_pair<C: Coeff>(basis: BasisTag, order: usize) -> [AlgebraElement<C>; 2] {
    std::array::from_fn(|j| {
        let mut x = AlgebraElement::<C>::zero(BasisTag::Split, order);
        let tail = if j == 0 { CliffordPart::Q1 } else { CliffordPart::Q2 };
        x.add_term(Word::EMPTY, tail, C::unit());
        for k in 1..=4u8 {
            x.add_term(Word::letter(4 * j as u8 + k), tail, C::unit());
        }
        transform_element(&x, basis)
    })
}

/// Evaluates with `A₁, A₂` bound to the given elements.
pub fn evaluate_tree<C: Coeff>(e: &Expression, a: &[AlgebraElement<C>; 2]) -> Result<AlgebraElement<C>, Error> {
    let (basis, order) = (a[0].basis(), a[0].order().min(a[1].order()));
    let ev = |x: &Expression| evaluate_tree(x, a);
    Ok(match e {
        Expression::A(i) => match i {
            1 | 2 => a[(*i - 1) as usize].truncate(order),
            _ => return Err(Error::Parse(format!("no input A{i}"))),
        },
        Expression::Q(g) => AlgebraElement::clifford(basis, order, *g),
        Expression::Const(q) => AlgebraElement::constant(basis, order, C::from_rational(q)),
        Expression::Neg(x) => ev(x)?.neg(),
        Expression::Add(x, y) => ev(x)?.add(&ev(y)?)?,
        Expression::Sub(x, y) => ev(x)?.sub(&ev(y)?)?,
        Expression::Mul(x, y) => ev(x)?.mul(&ev(y)?)?,
        Expression::Scale(q, x) => ev(x)?.scale(q),
        Expression::Inv(x) => ev(x)?.neumann_inverse()?,
        Expression::Commutator(x, y) => ev(x)?.commutator(&ev(y)?)?,
        Expression::Anticommutator(x, y) => ev(x)?.anticommutator(&ev(y)?)?,
        Expression::Project(q, p, x) => ev(x)?.conj_project(*q, *p)?,
        Expression::Pol(x) => pol(&ev(x)?)?,
    })
}

/// `X(−X²)^{-1/2}` as a truncated binomial series; needs the leading part of `−X²` to be a
/// rational square.
pub fn pol<C: Coeff>(x: &AlgebraElement<C>) -> Result<AlgebraElement<C>, Error> {
    let (basis, order) = (x.basis(), x.order());
    let m = x.mul(x)?.neg();
    let lead = m.coeff(&Word::EMPTY, CliffordPart::One);
    let lead = lead
        .as_constant()
        .filter(|c| !c.is_zero())
        .ok_or_else(|| Error::NotInvertible("pol: leading part of −X² is not a nonzero constant".into()))?;
    let lead_el = AlgebraElement::constant(basis, order, C::from_rational(&lead));
    let rest = m.sub(&lead_el)?;
    if rest.terms().any(|((w, _), _)| w.is_empty()) {
        return Err(Error::NotInvertible("pol: −X² is not a positive scalar at the base point".into()));
    }
    let root = rational_sqrt(&lead)
        .ok_or_else(|| Error::NotInvertible("pol: leading part of −X² is not a rational square".into()))?;
    let e = rest.scale(&(Rational::one() / &lead));
    let expo = -crate::rational::half();
    let mut sum = AlgebraElement::one(basis, order);
    let mut pw = AlgebraElement::one(basis, order);
    for k in 1..=order {
        pw = pw.mul(&e)?;
        if pw.is_zero() {
            break;
        }
        sum.add_assign(&pw.scale(&rational_binomial(&expo, k)))?;
    }
    Ok(x.mul(&sum)?.scale(&(Rational::one() / root)))
}

/// Expands closed-form component expressions into an operation of the given kind.
pub fn evaluate_expression(
    exprs: &[Expression],
    kind: OperationKind,
    basis: BasisTag,
    order: usize,
) -> Result<FQOperation<Rational>, Error> {
    if exprs.len() != kind.num_components() {
        return Err(Error::Kind(format!("{kind} needs {} component expressions", kind.num_components())));
    }
    let a = generic_pair::<Rational>(basis, order);
    let vals = exprs.iter().map(|e| evaluate_tree(e, &a)).collect::<Result<Vec<_>, _>>()?;
    FQOperation::from_elements(kind, &vals)
}

/// The eight coordinates of `(R₁, R₂)` relative to `(Q₁, Q₂)` in the requested basis,
/// expressed as elements over the letters of the inputs' basis.
pub fn extract_coordinates<C: Coeff>(
    r1: &AlgebraElement<C>,
    r2: &AlgebraElement<C>,
    basis: BasisTag,
) -> Result<[AlgebraElement<C>; 8], Error> {
    let b = r1.basis();
    let order = r1.order().min(r2.order());
    let mut split: Vec<AlgebraElement<C>> = Vec::with_capacity(8);
    for (j, r) in [r1, r2].into_iter().enumerate() {
        if r.terms().any(|((w, _), _)| w.is_empty()) {
            return Err(Error::Unsupported("perturbation has an order-0 term".into()));
        }
        let q = AlgebraElement::<C>::clifford(b, order, if j == 0 { CliffordPart::Q1 } else { CliffordPart::Q2 });
        let x = r.truncate(order).mul(&q.neumann_inverse()?)?;
        for (i1, i2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            split.push(x.split_project(i1, i2)?);
        }
    }
    let t = basis_transform(BasisTag::Split, basis).matrix;
    let mut out: [AlgebraElement<C>; 8] = std::array::from_fn(|_| AlgebraElement::zero(b, order));
    for (i, o) in out.iter_mut().enumerate() {
        for (k, s) in split.iter().enumerate() {
            if !t[i][k].is_zero() {
                o.add_assign(&s.scale(&t[i][k]))?;
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {}", self.pos))
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), Error> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn ident(&mut self) -> String {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).into_owned()
    }

    fn expr(&mut self) -> Result<Expression, Error> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expression::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expression::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expression, Error> {
        let mut lhs = self.factor()?;
        while self.eat(b'*') {
            let rhs = self.factor()?;
            lhs = match lhs {
                Expression::Const(q) => Expression::Scale(q, Box::new(rhs)),
                l => Expression::mul(l, rhs),
            };
        }
        Ok(lhs)
    }

    fn number(&mut self) -> Result<Rational, Error> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_digit() || self.s[self.pos] == b'/') {
            self.pos += 1;
        }
        let txt = String::from_utf8_lossy(&self.s[start..self.pos]).into_owned();
        parse_rational(&txt).ok_or_else(|| self.err("bad number"))
    }

    fn clifford(&mut self) -> Result<CliffordPart, Error> {
        match self.ident().as_str() {
            "Q1" => Ok(CliffordPart::Q1),
            "Q2" => Ok(CliffordPart::Q2),
            "Q12" | "Q1Q2" => Ok(CliffordPart::Q1Q2),
            _ => Err(self.err("expected Q1, Q2 or Q12")),
        }
    }

    fn factor(&mut self) -> Result<Expression, Error> {
        match self.peek() {
            None => Err(self.err("unexpected end")),
            Some(b'-') => {
                self.pos += 1;
                Ok(Expression::Neg(Box::new(self.factor()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'[') | Some(b'{') => {
                let anti = self.s[self.pos] == b'{';
                self.pos += 1;
                let a = self.expr()?;
                self.expect(b',')?;
                let b = self.expr()?;
                self.expect(if anti { b'}' } else { b']' })?;
                Ok(if anti {
                    Expression::Anticommutator(Box::new(a), Box::new(b))
                } else {
                    Expression::commutator(a, b)
                })
            }
            Some(c) if c.is_ascii_digit() => Ok(Expression::Const(self.number()?)),
            Some(_) => {
                let id = self.ident();
                match id.as_str() {
                    "A1" => Ok(Expression::A(1)),
                    "A2" => Ok(Expression::A(2)),
                    "Q1" => Ok(Expression::Q(CliffordPart::Q1)),
                    "Q2" => Ok(Expression::Q(CliffordPart::Q2)),
                    "Q12" | "Q1Q2" => Ok(Expression::Q(CliffordPart::Q1Q2)),
                    "inv" | "pol" => {
                        self.expect(b'(')?;
                        let e = self.expr()?;
                        self.expect(b')')?;
                        Ok(if id == "inv" { Expression::inv(e) } else { Expression::pol(e) })
                    }
                    "proj" => {
                        self.expect(b'(')?;
                        let q = self.clifford()?;
                        self.expect(b',')?;
                        let p = self.number()?;
                        let p = if p.is_zero() {
                            0
                        } else if p.is_one() {
                            1
                        } else {
                            return Err(self.err("parity must be 0 or 1"));
                        };
                        self.expect(b',')?;
                        let e = self.expr()?;
                        self.expect(b')')?;
                        Ok(Expression::Project(q, p, Box::new(e)))
                    }
                    "" => Err(self.err("unexpected character")),
                    other => Err(self.err(&format!("unknown symbol `{other}`"))),
                }
            }
        }
    }
}

/// Parses e.g. `1/2*[A1,A2]`, `pol(A2*inv(A1))`, `proj(Q1,0,A1*A2)`; `{x,y}` is the
/// anticommutator.
pub fn parse_expression(s: &str) -> Result<Expression, Error> {
    let mut p = Parser { s: s.as_bytes(), pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn identity_rows() {
        let op =
            evaluate_expression(&[Expression::a(1), Expression::a(2)], OperationKind::Vectorial, BasisTag::Circular, 1)
                .unwrap();
        assert_eq!(op.table(0, 1), ints(&[1, 1, 1, 1, 0, 1, 1, 1]));
        assert_eq!(op.table(1, 1), ints(&[-1, 1, 1, -1, 0, 1, 1, -1]));
        let op =
            evaluate_expression(&[Expression::a(1), Expression::a(2)], OperationKind::Vectorial, BasisTag::Mixed, 1)
                .unwrap();
        assert_eq!(op.table(0, 1), ints(&[1; 8]));
        assert_eq!(op.table(1, 1), ints(&[-1, 1, 1, -1, -1, 1, 1, -1]));
    }

    #[test]
    fn pseudodeterminant_rows() {
        let e = parse_expression("1/2*[A1,A2]").unwrap();
        let op = evaluate_expression(&[e], OperationKind::Pseudoscalar, BasisTag::Mixed, 3).unwrap();
        assert_eq!(op.table(0, 0), ints(&[1]));
        assert_eq!(op.table(0, 1), ints(&[0, 0, 2, 0, 0, 0, 2, 0]));
        let a = [1, 0, 0, -1, 1, 0, 0, -1];
        let b = [0, -1, 1, 0, 0, -1, 1, 0];
        let mut want = Vec::new();
        for row in [a, b, b, a, a, b, b, a] {
            want.extend(ints(&row));
        }
        assert_eq!(op.table(0, 2), want);
        assert!(op.homogeneous(3).is_zero());
    }

    #[test]
    fn kind_violation_is_rejected() {
        let r = evaluate_expression(&[Expression::a(1)], OperationKind::Scalar, BasisTag::Mixed, 1);
        assert!(matches!(r, Err(Error::Kind(_))));
    }

    #[test]
    fn coordinates_reconstruct() {
        let a = generic_pair::<Rational>(BasisTag::Mixed, 2);
        let q1 = AlgebraElement::clifford(BasisTag::Mixed, 2, CliffordPart::Q1);
        let q2 = AlgebraElement::clifford(BasisTag::Mixed, 2, CliffordPart::Q2);
        let r1 = a[0].sub(&q1).unwrap();
        let r2 = a[1].sub(&q2).unwrap();
        let c = extract_coordinates(&r1, &r2, BasisTag::Mixed).unwrap();
        for (i, x) in c.iter().enumerate() {
            assert_eq!(*x, AlgebraElement::letter(BasisTag::Mixed, 2, i as u8 + 1));
        }
        let z = AlgebraElement::zero(BasisTag::Mixed, 2);
        let c = extract_coordinates(&r1, &z, BasisTag::Split).unwrap();
        assert!(c[4..].iter().all(AlgebraElement::is_zero));
        assert!(extract_coordinates(&a[0], &r2, BasisTag::Split).is_err());
    }

    #[test]
    fn parser_rejects_garbage() {
        assert!(parse_expression("A3").is_err());
        assert!(parse_expression("[A1,").is_err());
        assert!(parse_expression("A1 A2").is_err());
        assert_eq!(
            parse_expression("-A1*inv(A2)").unwrap(),
            Expression::mul(Expression::Neg(Box::new(Expression::a(1))), Expression::inv(Expression::a(2)))
        );
    }
}
