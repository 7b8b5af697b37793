use fqx::bases::BasisTag;
use fqx::calculus::{compose, glob, loc};
use fqx::fqop::{builtin, first_differential, parse_operation, serialize_operation, Builtin, FirstDifferential};
use fqx::invariance::{check, natural_extend, natural_reduce, PropertySpec};
use fqx::linsolve::{brute_force_dimensions, fiber_dimensions};
use fqx::ncalgebra::{AlgebraElement, CliffordPart};
use fqx::rational::{frac, Rational};
use fqx::{FQOperation, OperationKind, Word};
use proptest::prelude::*;

const BASES: [BasisTag; 3] = [BasisTag::Split, BasisTag::Mixed, BasisTag::Circular];
const KINDS: [OperationKind; 3] = [OperationKind::Scalar, OperationKind::Vectorial, OperationKind::Pseudoscalar];

fn coeff() -> impl Strategy<Value = Rational> {
    (-5i64..=5, 1i64..=4).prop_map(|(n, d)| frac(n, d))
}

fn word(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(1u8..=8, 1..=max_len).prop_map(|v| Word::new(&v))
}

/// Clifford conservative when `unit` is set, with a dense first order and sparse higher orders.
fn operation(kind: OperationKind, basis: BasisTag, order: usize, unit: bool) -> impl Strategy<Value = FQOperation> {
    let n = kind.num_components();
    (prop::collection::vec(coeff(), 8 * n), prop::collection::vec((0..n, word(order), coeff()), 0..12)).prop_map(
        move |(first, rest)| {
            let mut op = if unit {
                FQOperation::constant_one(kind, basis, order)
            } else {
                FQOperation::zero(kind, basis, order)
            };
            if order >= 1 {
                for (i, c) in first.into_iter().enumerate() {
                    op.set(i / 8, Word::letter((i % 8) as u8 + 1), c);
                }
            }
            for (s, w, c) in rest {
                op.set(s, w, c);
            }
            op
        },
    )
}

fn any_operation(order: usize) -> impl Strategy<Value = FQOperation> {
    (0..3usize, 0..3usize, any::<bool>()).prop_flat_map(move |(k, b, u)| operation(KINDS[k], BASES[b], order, u))
}

fn vectorial(order: usize) -> impl Strategy<Value = FQOperation> {
    (0..3usize).prop_flat_map(move |b| operation(OperationKind::Vectorial, BASES[b], order, true))
}

fn homogeneous(order: usize) -> impl Strategy<Value = FQOperation> {
    prop::collection::vec((0..2usize, prop::collection::vec(1u8..=8, order), coeff()), 1..10).prop_map(move |v| {
        let mut op = FQOperation::zero(OperationKind::Vectorial, BasisTag::Mixed, order);
        for (s, w, c) in v {
            op.set(s, Word::new(&w), c);
        }
        op
    })
}

fn differential() -> impl Strategy<Value = FirstDifferential> {
    prop::array::uniform4(prop::array::uniform2(prop::array::uniform2(-3i64..=3)))
        .prop_map(FirstDifferential::from_blocks)
        .prop_filter("invertible", FirstDifferential::is_invertible)
}

fn element(order: usize) -> impl Strategy<Value = AlgebraElement<Rational>> {
    let parts = [CliffordPart::One, CliffordPart::Q1, CliffordPart::Q2, CliffordPart::Q1Q2];
    prop::collection::vec((prop::collection::vec(1u8..=8, 0..=order), 0..4usize, coeff()), 0..8).prop_map(move |v| {
        let mut x = AlgebraElement::zero(BasisTag::Mixed, order);
        for (w, g, c) in v {
            x.add_term(Word::new(&w), parts[g], c);
        }
        x
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transforms_round_trip_and_commute(op in any_operation(2), b in 0..3usize, c in 0..3usize) {
        let (b, c) = (BASES[b], BASES[c]);
        prop_assert_eq!(op.transform(b).transform(op.basis()), op.clone());
        prop_assert_eq!(op.transform(b).transform(c), op.transform(c));
    }

    #[test]
    fn serialization_round_trips(op in any_operation(3)) {
        let text = serialize_operation(&op);
        let back = parse_operation(&text).unwrap();
        prop_assert_eq!(&back, &op);
        prop_assert_eq!(serialize_operation(&back), text);
    }

    #[test]
    fn multiplication_is_associative(x in element(3), y in element(3), z in element(3)) {
        let l = x.mul(&y).unwrap().mul(&z).unwrap();
        let r = x.mul(&y.mul(&z).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn first_differential_is_functorial(p1 in vectorial(2), p2 in vectorial(2)) {
        let lhs = first_differential(&compose(&p2, &p1).unwrap()).unwrap();
        let rhs = first_differential(&p2).unwrap().mul(&first_differential(&p1).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn glob_and_loc_commute(l1 in differential(), l2 in differential(), lambda in homogeneous(2)) {
        let a = glob(&l1, &loc(&l2, &lambda).unwrap()).unwrap();
        let b = loc(&l2, &glob(&l1, &lambda).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn natural_extension_is_natural(op in operation(OperationKind::Vectorial, BasisTag::Mixed, 2, true)) {
        let red = op.filter(|w| w.all(|l| l <= 5));
        let ext = natural_extend(&red).unwrap();
        prop_assert!(check(&ext, &PropertySpec::Natural).unwrap().holds());
        prop_assert_eq!(natural_extend(&natural_reduce(&ext).unwrap()).unwrap(), ext);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn composition_is_associative(a in vectorial(2), b in vectorial(2), c in vectorial(2)) {
        let l = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let r = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        let r = r.transform(l.basis());
        prop_assert_eq!(l, r);
    }

    #[test]
    fn fiber_tables_are_monotone_and_match_brute_force(mask in 1u32..64, k in 0..3usize) {
        let pool = [
            PropertySpec::Natural,
            PropertySpec::CliffordConservative,
            PropertySpec::Transposition,
            PropertySpec::Symmetry,
            PropertySpec::Orthogonal,
            PropertySpec::scaling(3, Rational::from_integer(1.into())),
        ];
        let specs: Vec<PropertySpec> = pool.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| p.clone()).collect();
        let t = fiber_dimensions(&specs, KINDS[k], 2).unwrap();
        prop_assert!(t.is_monotone());
        let brute = brute_force_dimensions(&specs, KINDS[k], 2).unwrap();
        if brute.consistent {
            prop_assert_eq!(&brute.free_per_level, &t.rows[2]);
        }
    }
}

#[test]
fn every_builtin_round_trips_through_text() {
    for b in Builtin::ALL {
        for order in 0..=3 {
            for basis in BASES {
                let op = builtin(b, order, basis).unwrap();
                let text = serialize_operation(&op);
                let back = parse_operation(&text).unwrap();
                assert_eq!(back, op, "{b} order {order} {basis}");
                assert_eq!(serialize_operation(&back), text);
            }
        }
    }
}
