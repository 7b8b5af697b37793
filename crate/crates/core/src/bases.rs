//! Split, mixed and circular coordinates, their conjugation tables, the character group and
//! the derivations on the perturbation variables.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_traits::{One, Zero};

use crate::coeff::Coeff;
use crate::ncalgebra::{AlgebraElement, CliffordPart};
use crate::rational::{frac, int, Rational};
use crate::word::Word;
use crate::Error;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum BasisTag {
    Split,
    Mixed,
    Circular,
}

impl BasisTag {
    pub const ALL: [BasisTag; 3] = [BasisTag::Split, BasisTag::Mixed, BasisTag::Circular];

    fn idx(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            BasisTag::Split => "split",
            BasisTag::Mixed => "mixed",
            BasisTag::Circular => "circular",
        }
    }
}

impl fmt::Display for BasisTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BasisTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "split" => Ok(BasisTag::Split),
            "mixed" | "mix" => Ok(BasisTag::Mixed),
            "circular" | "circ" => Ok(BasisTag::Circular),
            other => Err(Error::Parse(format!("unknown basis `{other}`"))),
        }
    }
}

/// Image of a letter: sign and target letter.
pub type SignedIndex = (i8, u8);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugationTable {
    pub basis: BasisTag,
    pub q1: [SignedIndex; 8],
    pub q2: [SignedIndex; 8],
    pub q1q2: [SignedIndex; 8],
}

impl ConjugationTable {
    pub fn action(&self, g: CliffordPart) -> Option<&[SignedIndex; 8]> {
        match g {
            CliffordPart::One => None,
            CliffordPart::Q1 => Some(&self.q1),
            CliffordPart::Q2 => Some(&self.q2),
            CliffordPart::Q1Q2 => Some(&self.q1q2),
        }
    }
}

const fn signs(s: [i8; 8]) -> [SignedIndex; 8] {
    let mut out = [(1i8, 0u8); 8];
    let mut i = 0;
    while i < 8 {
        out[i] = (s[i], i as u8 + 1);
        i += 1;
    }
    out
}

static TABLES: [ConjugationTable; 3] = [
    ConjugationTable {
        basis: BasisTag::Split,
        q1: signs([1, 1, -1, -1, 1, 1, -1, -1]),
        q2: signs([1, -1, 1, -1, 1, -1, 1, -1]),
        q1q2: signs([1, -1, -1, 1, 1, -1, -1, 1]),
    },
    ConjugationTable {
        basis: BasisTag::Mixed,
        q1: [(1, 2), (1, 1), (1, 3), (1, 4), (-1, 5), (-1, 6), (-1, 8), (-1, 7)],
        q2: [(-1, 2), (-1, 1), (1, 3), (1, 4), (-1, 5), (-1, 6), (1, 8), (1, 7)],
        q1q2: [(-1, 1), (-1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (-1, 7), (-1, 8)],
    },
    ConjugationTable {
        basis: BasisTag::Circular,
        q1: [(1, 2), (1, 1), (1, 3), (1, 5), (1, 4), (-1, 6), (-1, 8), (-1, 7)],
        q2: [(-1, 2), (-1, 1), (1, 3), (1, 5), (1, 4), (-1, 6), (1, 8), (1, 7)],
        q1q2: [(-1, 1), (-1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (-1, 7), (-1, 8)],
    },
];

pub fn conjugation_table(b: BasisTag) -> &'static ConjugationTable {
    &TABLES[b.idx()]
}

/// `g r_l g⁻¹` as a signed letter.
#[inline]
pub fn conj_letter(b: BasisTag, g: CliffordPart, l: u8) -> SignedIndex {
    match conjugation_table(b).action(g) {
        None => (1, l),
        Some(t) => t[(l - 1) as usize],
    }
}

/// `g w g⁻¹ = sign · w'`.
pub fn conjugate_word(b: BasisTag, g: CliffordPart, w: &Word) -> (i8, Word) {
    let Some(t) = conjugation_table(b).action(g) else {
        return (1, *w);
    };
    let mut sign = 1i8;
    let mut out = Word::EMPTY;
    for l in w.letters() {
        let (s, m) = t[(l - 1) as usize];
        sign *= s;
        out = out.push(m);
    }
    (sign, out)
}

pub type Matrix8 = [[Rational; 8]; 8];

fn zero8() -> Matrix8 {
    std::array::from_fn(|_| std::array::from_fn(|_| Rational::zero()))
}

fn identity8() -> Matrix8 {
    let mut m = zero8();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rational::one();
    }
    m
}

fn from_int_rows(rows: [[i64; 8]; 8], scale: Rational) -> Matrix8 {
    std::array::from_fn(|i| std::array::from_fn(|j| int(rows[i][j]) * &scale))
}

pub fn mat_mul(a: &Matrix8, b: &Matrix8) -> Matrix8 {
    let mut m = zero8();
    for i in 0..8 {
        for k in 0..8 {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..8 {
                m[i][j] += &a[i][k] * &b[k][j];
            }
        }
    }
    m
}

pub fn mat_inverse(a: &Matrix8) -> Option<Matrix8> {
    let mut m = a.clone();
    let mut inv = identity8();
    for col in 0..8 {
        let piv = (col..8).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        inv.swap(col, piv);
        let p = m[col][col].clone();
        for j in 0..8 {
            m[col][j] /= &p;
            inv[col][j] /= &p;
        }
        for r in 0..8 {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in 0..8 {
                    let a = &m[col][j] * &f;
                    m[r][j] -= a;
                    let b = &inv[col][j] * &f;
                    inv[r][j] -= b;
                }
            }
        }
    }
    Some(inv)
}

/// Split to mixed coordinates, `r̂ = M r`.
fn split_to_mixed() -> Matrix8 {
    from_int_rows(
        [
            [0, 1, 0, 0, 0, 0, -1, 0],
            [0, 1, 0, 0, 0, 0, 1, 0],
            [1, 0, 0, 0, 1, 0, 0, 0],
            [1, 0, 0, 0, -1, 0, 0, 0],
            [0, 0, 0, 1, 0, 0, 0, -1],
            [0, 0, 0, 1, 0, 0, 0, 1],
            [0, 0, 1, 0, 0, 1, 0, 0],
            [0, 0, 1, 0, 0, -1, 0, 0],
        ],
        frac(1, 2),
    )
}

/// Mixed to circular coordinates, `r̃ = N r̂`.
fn mixed_to_circular() -> Matrix8 {
    let mut m = identity8();
    m[3][4] = int(1);
    m[4][3] = int(1);
    m[4][4] = int(-1);
    m
}

/// A coordinate change: `to = matrix · from` on variable column vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisTransform {
    pub from: BasisTag,
    pub to: BasisTag,
    pub matrix: Matrix8,
}

fn transforms() -> &'static [[Matrix8; 3]; 3] {
    static CELL: OnceLock<[[Matrix8; 3]; 3]> = OnceLock::new();
    CELL.get_or_init(|| {
        let sm = split_to_mixed();
        let mc = mixed_to_circular();
        let ms = mat_inverse(&sm).expect("split/mixed transform is invertible");
        let cm = mat_inverse(&mc).expect("mixed/circular transform is invertible");
        let sc = mat_mul(&mc, &sm);
        let cs = mat_mul(&ms, &cm);
        let id = identity8();
        [[id.clone(), sm, sc], [ms, id.clone(), mc], [cs, cm, id]]
    })
}

pub fn basis_transform(from: BasisTag, to: BasisTag) -> BasisTransform {
    BasisTransform { from, to, matrix: transforms()[from.idx()][to.idx()].clone() }
}

/// Row `l` expresses letter `l` of `from` as a combination of letters of `to`.
pub fn express(from: BasisTag, to: BasisTag) -> &'static Matrix8 {
    &transforms()[to.idx()][from.idx()]
}

/// Rewrites every variable letter in the target basis.
pub fn transform_element<C: Coeff>(x: &AlgebraElement<C>, to: BasisTag) -> AlgebraElement<C> {
    let from = x.basis();
    if from == to {
        return x.clone();
    }
    let m = express(from, to);
    let images: Vec<Vec<(u8, Rational)>> = (0..8)
        .map(|l| (0..8).filter(|&k| !m[l][k].is_zero()).map(|k| (k as u8 + 1, m[l][k].clone())).collect())
        .collect();
    let mut out = AlgebraElement::zero(to, x.order());
    for ((w, g), c) in x.terms() {
        let mut partial: Vec<(Word, Rational)> = vec![(Word::EMPTY, Rational::one())];
        for l in w.letters() {
            let mut next = Vec::with_capacity(partial.len() * 2);
            for (pw, pc) in &partial {
                for (k, f) in &images[(l - 1) as usize] {
                    next.push((pw.push(*k), pc * f));
                }
            }
            partial = next;
        }
        for (pw, pc) in partial {
            out.add_term(pw, *g, c.scale_ref(&pc));
        }
    }
    out
}

static CHAR_TABLE: [[u8; 8]; 8] = [
    [3, 4, 1, 2, 7, 8, 5, 6],
    [4, 3, 2, 1, 8, 7, 6, 5],
    [1, 2, 3, 4, 5, 6, 7, 8],
    [2, 1, 4, 3, 6, 5, 8, 7],
    [7, 8, 5, 6, 3, 4, 1, 2],
    [8, 7, 6, 5, 4, 3, 2, 1],
    [5, 6, 7, 8, 1, 2, 3, 4],
    [6, 5, 8, 7, 2, 1, 4, 3],
];

/// The character group on mixed indices; `3` is the identity.
#[derive(Clone, Copy, Debug)]
pub struct CharGroup;

impl CharGroup {
    pub const IDENTITY: u8 = 3;

    pub fn table() -> &'static [[u8; 8]; 8] {
        &CHAR_TABLE
    }
}

pub fn char_mul(i: u8, j: u8) -> Result<u8, Error> {
    if !(1..=8).contains(&i) || !(1..=8).contains(&j) {
        return Err(Error::Index(format!("character indices ({i},{j}) out of range")));
    }
    Ok(cmul(i, j))
}

#[inline]
pub(crate) fn cmul(i: u8, j: u8) -> u8 {
    CHAR_TABLE[(i - 1) as usize][(j - 1) as usize]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Derivation {
    /// The rotation derivation `Δ₀ = −Δ/2`, circular basis.
    Delta0,
    /// The scaling derivation `Δ_i`, mixed basis.
    Delta(u8),
}

impl Derivation {
    pub fn basis(self) -> BasisTag {
        match self {
            Derivation::Delta0 => BasisTag::Circular,
            Derivation::Delta(_) => BasisTag::Mixed,
        }
    }

    /// Image of letter `j`.
    pub fn rule<C: Coeff>(self, j: u8, order: usize) -> AlgebraElement<C> {
        let b = self.basis();
        match self {
            Derivation::Delta0 => {
                let s = match j {
                    1 | 4 | 8 => 1,
                    5 => -1,
                    _ => 0,
                };
                let mut e = AlgebraElement::zero(b, order);
                if s != 0 {
                    e.add_term(Word::letter(j), CliffordPart::Q1Q2, C::from_int(s));
                }
                e
            }
            Derivation::Delta(i) => {
                let mut e = AlgebraElement::zero(b, order);
                if i == j {
                    e.add_term(Word::EMPTY, CliffordPart::One, C::unit());
                }
                e.add_term(Word::letter(cmul(i, j)), CliffordPart::One, C::unit());
                e
            }
        }
    }
}

/// Leibniz extension of the letter rules; Clifford parts are treated as constants.
pub fn apply_derivation<C: Coeff>(d: Derivation, x: &AlgebraElement<C>) -> Result<AlgebraElement<C>, Error> {
    if x.basis() != d.basis() {
        return Err(Error::BasisMismatch(x.basis(), d.basis()));
    }
    let order = x.order();
    let b = x.basis();
    let rules: Vec<AlgebraElement<C>> = (1..=8).map(|j| d.rule(j, order)).collect();
    let mut out = AlgebraElement::zero(b, order);
    for ((w, g), c) in x.terms() {
        for m in 0..w.len() {
            let prefix = AlgebraElement::monomial(b, order, w.slice(0, m), CliffordPart::One, c.clone());
            let suffix = AlgebraElement::monomial(b, order, w.slice(m + 1, w.len()), *g, C::unit());
            let t = prefix.mul(&rules[(w.get(m) - 1) as usize])?.mul(&suffix)?;
            out.add_assign(&t)?;
        }
    }
    Ok(out)
}

/// One line per rule: conjugation tables, transforms and the character table.
pub fn dump_tables() -> String {
    use std::fmt::Write;
    let mut s = String::new();
    for b in BasisTag::ALL {
        let t = conjugation_table(b);
        for (g, act) in [("Q1", &t.q1), ("Q2", &t.q2), ("Q1Q2", &t.q1q2)] {
            for (i, (sg, j)) in act.iter().enumerate() {
                let sign = if *sg < 0 { "-" } else { "" };
                let _ = writeln!(s, "conj {b} {g} r{} -> {sign}r{j}", i + 1);
            }
        }
    }
    for from in BasisTag::ALL {
        for to in BasisTag::ALL {
            if from == to {
                continue;
            }
            let m = &basis_transform(from, to).matrix;
            for (i, row) in m.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(crate::rational::fmt_rational).collect();
                let _ = writeln!(s, "transform {from}->{to} row {} [{}]", i + 1, cells.join(" "));
            }
        }
    }
    for i in 1..=8u8 {
        let row: Vec<String> = (1..=8u8).map(|j| cmul(i, j).to_string()).collect();
        let _ = writeln!(s, "char {i} * [1..8] = [{}]", row.join(" "));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::half;

    fn r(b: BasisTag, l: u8, order: usize) -> AlgebraElement<Rational> {
        AlgebraElement::monomial(b, order, Word::letter(l), CliffordPart::One, int(1))
    }

    #[test]
    fn character_group_examples() {
        assert_eq!(char_mul(1, 1).unwrap(), 3);
        assert_eq!(char_mul(3, 7).unwrap(), 7);
        assert_eq!(char_mul(5, 7).unwrap(), 1);
        assert!(char_mul(0, 1).is_err());
    }

    #[test]
    fn character_group_axioms() {
        for i in 1..=8u8 {
            assert_eq!(cmul(3, i), i);
            assert_eq!(cmul(i, i), 3);
            for j in 1..=8u8 {
                assert_eq!(cmul(i, j), cmul(j, i));
                for k in 1..=8u8 {
                    assert_eq!(cmul(cmul(i, j), k), cmul(i, cmul(j, k)));
                }
            }
        }
    }

    #[test]
    fn q1q2_table_is_composite() {
        for b in BasisTag::ALL {
            let t = conjugation_table(b);
            for i in 0..8 {
                let (s2, j) = t.q2[i];
                let (s1, k) = t.q1[(j - 1) as usize];
                assert_eq!(t.q1q2[i], (s1 * s2, k), "{b} letter {}", i + 1);
                let (sa, a) = t.q1[i];
                assert_eq!(t.q1[(a - 1) as usize].1, i as u8 + 1);
                assert_eq!(t.q1[(a - 1) as usize].0 * sa, 1);
            }
        }
    }

    #[test]
    fn conjugate_word_examples() {
        assert_eq!(conjugate_word(BasisTag::Mixed, CliffordPart::Q1, &Word::letter(7)), (-1, Word::letter(8)));
        assert_eq!(conjugate_word(BasisTag::Circular, CliffordPart::Q1Q2, &Word::letter(3)), (1, Word::letter(3)));
        assert_eq!(conjugate_word(BasisTag::Mixed, CliffordPart::Q2, &Word::new(&[1, 2])), (1, Word::new(&[2, 1])));
    }

    #[test]
    fn transform_examples() {
        let x = transform_element(&r(BasisTag::Mixed, 3, 2), BasisTag::Split);
        let mut want = AlgebraElement::zero(BasisTag::Split, 2);
        want.add_term(Word::letter(1), CliffordPart::One, half());
        want.add_term(Word::letter(5), CliffordPart::One, half());
        assert_eq!(x, want);

        let y = transform_element(&r(BasisTag::Split, 1, 2), BasisTag::Mixed);
        let mut want = AlgebraElement::zero(BasisTag::Mixed, 2);
        want.add_term(Word::letter(3), CliffordPart::One, int(1));
        want.add_term(Word::letter(4), CliffordPart::One, int(1));
        assert_eq!(y, want);

        let z = transform_element(&r(BasisTag::Circular, 4, 2), BasisTag::Mixed);
        let mut want = AlgebraElement::zero(BasisTag::Mixed, 2);
        want.add_term(Word::letter(4), CliffordPart::One, int(1));
        want.add_term(Word::letter(5), CliffordPart::One, int(1));
        assert_eq!(z, want);
    }

    #[test]
    fn transforms_compose() {
        for a in BasisTag::ALL {
            for b in BasisTag::ALL {
                let ab = basis_transform(a, b).matrix;
                let ba = basis_transform(b, a).matrix;
                assert_eq!(mat_mul(&ab, &ba), identity8());
                for c in BasisTag::ALL {
                    let bc = basis_transform(b, c).matrix;
                    assert_eq!(mat_mul(&bc, &ab), basis_transform(a, c).matrix);
                }
            }
        }
    }

    #[test]
    fn conjugation_commutes_with_transforms() {
        for from in BasisTag::ALL {
            for to in BasisTag::ALL {
                for g in [CliffordPart::Q1, CliffordPart::Q2, CliffordPart::Q1Q2] {
                    for l in 1..=8u8 {
                        let x = r(from, l, 1);
                        let a = transform_element(&x.conjugate(g), to);
                        let b = transform_element(&x, to).conjugate(g);
                        assert_eq!(a, b, "{from}->{to} {g:?} r{l}");
                    }
                }
            }
        }
    }

    #[test]
    fn derivation_examples() {
        let d4 = apply_derivation(Derivation::Delta(4), &r(BasisTag::Mixed, 1, 2)).unwrap();
        assert_eq!(d4, r(BasisTag::Mixed, 2, 2));
        let d3 = apply_derivation(Derivation::Delta(3), &r(BasisTag::Mixed, 3, 2)).unwrap();
        let mut want = r(BasisTag::Mixed, 3, 2);
        want.add_term(Word::EMPTY, CliffordPart::One, int(1));
        assert_eq!(d3, want);
        let x = AlgebraElement::monomial(BasisTag::Circular, 3, Word::new(&[4, 5]), CliffordPart::One, int(1));
        assert!(apply_derivation(Derivation::Delta0, &x).unwrap().is_zero());
        assert!(apply_derivation(Derivation::Delta0, &r(BasisTag::Mixed, 1, 1)).is_err());
    }

    #[test]
    fn derivations_on_known_examples() {
        let cases: [(u8, [u8; 8]); 3] =
            [(6, [8, 7, 6, 5, 4, 3, 2, 1]), (7, [5, 6, 7, 8, 1, 2, 3, 4]), (8, [6, 5, 8, 7, 2, 1, 4, 3])];
        for (i, imgs) in cases {
            for j in 1..=8u8 {
                let d = Derivation::Delta(i).rule::<Rational>(j, 1);
                let mut want = r(BasisTag::Mixed, imgs[(j - 1) as usize], 1);
                if i == j {
                    want.add_term(Word::EMPTY, CliffordPart::One, int(1));
                }
                assert_eq!(d, want, "Δ{i}(r̂{j})");
            }
        }
    }

    #[test]
    fn dump_is_line_per_rule() {
        let d = dump_tables();
        assert_eq!(d.lines().filter(|l| l.starts_with("conj")).count(), 72);
        assert_eq!(d.lines().filter(|l| l.starts_with("char")).count(), 8);
    }
}
