//! Worked examples with known answers: coefficient matrices, multiplication rules, solved
//! property systems and fiber tables. Used by `fqx selftest` and the test suite.

use std::collections::BTreeMap;

use crate::bases::{apply_derivation, char_mul, conjugate_word, transform_element, BasisTag, Derivation};
use crate::calculus::{
    compose, conjugation_form, conjugation_product, glob, invert, layered_maps, loc, ConjugationForm, Context,
    LayeredMaps, MapName,
};
use crate::coeff::{Coeff, Poly};
use crate::fqop::{
    builtin, evaluate_expression, first_differential, parse_expression, Builtin, FQOperation, FirstDifferential,
    OperationKind,
};
use crate::invariance::{
    check, free_coefficient_count, natural_extend, natural_reduce, parse_property_set, residuals, split_row,
    unknown_operation, Evaluator, PropertySpec,
};
use crate::linsolve::{fiber_dimensions, rank_and_kernel, solve_operation, FiberTable, SolveOutcome};
use crate::ncalgebra::{AlgebraElement, CliffordPart};
use crate::rational::{frac, int, Rational};
use crate::word::Word;

type Check = Result<(), String>;

pub struct Case {
    pub name: &'static str,
    pub run: fn() -> Check,
    /// Takes seconds rather than milliseconds in a release build.
    pub slow: bool,
}

pub fn cases() -> Vec<Case> {
    let c = |name, run| Case { name, run, slow: false };
    let s = |name, run| Case { name, run, slow: true };
    vec![
        c("Clifford relations", clifford_relations),
        c("conjugation projections", conjugation_projections),
        c("character multiplication", character_multiplication),
        c("basis transforms of letters", letter_transforms),
        c("circular p4/p5 from mixed", circular_from_mixed),
        c("letter conjugation", letter_conjugation),
        c("scaling derivations", derivations),
        c("constant operation", constant_operation),
        c("identity operation", identity_operation),
        c("pseudodeterminant", pseudodeterminant),
        c("symmetric orthogonalization tables", osy_tables),
        c("first-order rows of OfSy and AxisL", first_order_rows),
        c("symmetry, orthogonal and transposition rows", order_one_rows),
        c("scaling with Clifford conservativity", scaling_row),
        c("invariance of OSy and AxisL", builtin_invariance),
        c("natural extension and reduction", natural_data),
        c("free coefficients of natural operations", natural_counts),
        c("first differential of compositions", differential_of_composition),
        c("Glob and Loc actions", glob_loc_actions),
        c("productivity and involutivity splittings", splittings),
        c("shape of Amb", amb_shape),
        c("productivity equation families", productive_families),
        c("involutivity equation families", involutive_families),
        c("conjugacy of involutions", conjugate_involutions),
        c("fiber table of the base system", table_base),
        s("fiber table with the scaled pseudodeterminant", table_scaled),
        c("fiber table with axis and weak metric trace", table_trace),
        s("fiber table with composition fixing", table_fixed),
    ]
}

/// Runs every case (or only the fast ones), in order.
pub fn run(include_slow: bool) -> Vec<(&'static str, Check)> {
    cases().into_iter().filter(|c| include_slow || !c.slow).map(|c| (c.name, (c.run)())).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e(x: impl std::fmt::Display) -> String {
    x.to_string()
}

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

fn row_eq(op: &FQOperation, comp: usize, r: usize, want: &[i64], what: &str) -> Check {
    ensure(op.table(comp, r) == ints(want), || format!("{what}: order-{r} table of component {comp} differs"))
}

fn zero_beyond(op: &FQOperation, from: usize, what: &str) -> Check {
    for s in 0..op.num_components() {
        for r in from..=op.order() {
            ensure(op.table(s, r).iter().all(|x| *x == int(0)), || format!("{what}: nonzero order-{r} coefficient"))?;
        }
    }
    Ok(())
}

fn clifford_relations() -> Check {
    let b = BasisTag::Mixed;
    let q1 = AlgebraElement::<Rational>::clifford(b, 2, CliffordPart::Q1);
    let q2 = AlgebraElement::<Rational>::clifford(b, 2, CliffordPart::Q2);
    let m1 = AlgebraElement::<Rational>::one(b, 2).neg();
    ensure(q1.mul(&q1).map_err(e)? == m1, || "Q1·Q1 ≠ −1".into())?;
    ensure(q2.mul(&q2).map_err(e)? == m1, || "Q2·Q2 ≠ −1".into())?;
    let r5 = AlgebraElement::<Rational>::letter(b, 2, 5);
    ensure(q1.mul(&r5).map_err(e)? == r5.mul(&q1).map_err(e)?.neg(), || "Q1·r5 ≠ −r5·Q1".into())?;
    let q12 = q1.mul(&q2).map_err(e)?;
    ensure(q12.mul(&q12).map_err(e)? == m1, || "(Q1Q2)² ≠ −1".into())
}

fn conjugation_projections() -> Check {
    let r = |l| AlgebraElement::<Rational>::letter(BasisTag::Mixed, 1, l);
    ensure(r(5).conj_project(CliffordPart::Q1, 0).map_err(e)?.is_zero(), || "r5 has a Q1-even part".into())?;
    ensure(r(3).conj_project(CliffordPart::Q1, 0).map_err(e)? == r(3), || "r3 is not Q1-even".into())
}

fn character_multiplication() -> Check {
    for (i, j, k) in [(1, 1, 3), (3, 7, 7), (5, 7, 1)] {
        let got = char_mul(i, j).map_err(e)?;
        ensure(got == k, || format!("{i}*{j} = {got}, want {k}"))?;
    }
    Ok(())
}

fn letter_transforms() -> Check {
    let r3 = AlgebraElement::<Rational>::letter(BasisTag::Mixed, 1, 3);
    let mut want = AlgebraElement::<Rational>::zero(BasisTag::Split, 1);
    want.add_term(Word::letter(1), CliffordPart::One, frac(1, 2));
    want.add_term(Word::letter(5), CliffordPart::One, frac(1, 2));
    ensure(transform_element(&r3, BasisTag::Split) == want, || "mixed r3 ≠ ½(r1 + r5) in the split basis".into())?;
    let r4 = AlgebraElement::<Rational>::letter(BasisTag::Circular, 1, 4);
    let mut want = AlgebraElement::<Rational>::zero(BasisTag::Mixed, 1);
    want.add_term(Word::letter(4), CliffordPart::One, int(1));
    want.add_term(Word::letter(5), CliffordPart::One, int(1));
    ensure(transform_element(&r4, BasisTag::Mixed) == want, || "circular r4 ≠ r4 + r5 in the mixed basis".into())
}

fn circular_from_mixed() -> Check {
    let mut op = FQOperation::constant_one(OperationKind::Vectorial, BasisTag::Mixed, 1);
    for (s, (p4, p5)) in [(3, 7), (-2, 5)].into_iter().enumerate() {
        op.set(s, Word::letter(4), int(p4));
        op.set(s, Word::letter(5), int(p5));
        let c = op.transform(BasisTag::Circular);
        ensure(c.coeff(s, &Word::letter(4)) == frac(p4 + p5, 2), || "p̃4 ≠ ½(p̂4 + p̂5)".into())?;
        ensure(c.coeff(s, &Word::letter(5)) == frac(p4 - p5, 2), || "p̃5 ≠ ½(p̂4 − p̂5)".into())?;
    }
    Ok(())
}

fn letter_conjugation() -> Check {
    let got = conjugate_word(BasisTag::Mixed, CliffordPart::Q1, &Word::letter(7));
    ensure(got == (-1, Word::letter(8)), || format!("Q1-conjugate of mixed r7 is {got:?}"))?;
    let got = conjugate_word(BasisTag::Circular, CliffordPart::Q1Q2, &Word::letter(3));
    ensure(got == (1, Word::letter(3)), || format!("Q1Q2-conjugate of circular r3 is {got:?}"))
}

fn derivations() -> Check {
    let r = |l| AlgebraElement::<Rational>::letter(BasisTag::Mixed, 1, l);
    ensure(apply_derivation(Derivation::Delta(4), &r(1)).map_err(e)? == r(2), || "Δ4(r1) ≠ r2".into())?;
    let want = r(3).add(&AlgebraElement::one(BasisTag::Mixed, 1)).map_err(e)?;
    ensure(apply_derivation(Derivation::Delta(3), &r(3)).map_err(e)? == want, || "Δ3(r3) ≠ r3 + 1".into())
}

fn constant_operation() -> Check {
    let one = evaluate_expression(&[parse_expression("1").map_err(e)?], OperationKind::Scalar, BasisTag::Mixed, 3)
        .map_err(e)?;
    row_eq(&one, 0, 0, &[1], "constant 1")?;
    zero_beyond(&one, 1, "constant 1")?;
    for b in [BasisTag::Split, BasisTag::Circular] {
        ensure(one.transform(b).transform(BasisTag::Mixed) == one, || format!("constant 1 changes in {b}"))?;
        ensure(builtin(Builtin::One, 3, b).map_err(e)?.table(0, 0) == ints(&[1]), || format!("One in {b}"))?;
        zero_beyond(&builtin(Builtin::One, 3, b).map_err(e)?, 1, "One")?;
    }
    Ok(())
}

fn identity_operation() -> Check {
    let exprs = [parse_expression("A1").map_err(e)?, parse_expression("A2").map_err(e)?];
    let op = evaluate_expression(&exprs, OperationKind::Vectorial, BasisTag::Circular, 2).map_err(e)?;
    row_eq(&op, 0, 1, &[1, 1, 1, 1, 0, 1, 1, 1], "identity")?;
    row_eq(&op, 1, 1, &[-1, 1, 1, -1, 0, 1, 1, -1], "identity")?;
    zero_beyond(&op, 2, "identity")?;
    let m = builtin(Builtin::Id, 2, BasisTag::Mixed).map_err(e)?;
    row_eq(&m, 0, 1, &[1; 8], "identity")?;
    row_eq(&m, 1, 1, &[-1, 1, 1, -1, -1, 1, 1, -1], "identity")?;
    ensure(m.transform(BasisTag::Circular) == op, || "mixed and circular identity differ".into())
}

fn pseudodeterminant() -> Check {
    let ex = parse_expression("1/2*[A1,A2]").map_err(e)?;
    let d = evaluate_expression(&[ex], OperationKind::Pseudoscalar, BasisTag::Mixed, 3).map_err(e)?;
    row_eq(&d, 0, 0, &[1], "½[A1,A2]")?;
    row_eq(&d, 0, 1, &[0, 0, 2, 0, 0, 0, 2, 0], "½[A1,A2]")?;
    let a = [1, 0, 0, -1, 1, 0, 0, -1];
    let b = [0, -1, 1, 0, 0, -1, 1, 0];
    let p2: Vec<i64> = [a, b, b, a, a, b, b, a].concat();
    row_eq(&d, 0, 2, &p2, "½[A1,A2]")?;
    zero_beyond(&d, 3, "½[A1,A2]")?;
    ensure(d == builtin(Builtin::PseudoDet, 3, BasisTag::Mixed).map_err(e)?, || "builtin D differs".into())
}

fn halves(rows: [[i64; 8]; 8]) -> Vec<Rational> {
    rows.iter().flatten().map(|&x| frac(x, 2)).collect()
}

fn osy_tables() -> Check {
    let osy = builtin(Builtin::OSy, 2, BasisTag::Circular).map_err(e)?;
    row_eq(&osy, 0, 1, &[0, 0, 0, 0, 0, 1, 1, 1], "OSy")?;
    row_eq(&osy, 1, 1, &[0, 0, 0, 0, 0, 1, 1, -1], "OSy")?;
    let p1 = halves([
        [0, 0, 0, 0, 0, -1, 0, -1],
        [0, 0, 0, 0, 0, -1, -1, 0],
        [0, 0, 0, 0, 0, -1, -1, -1],
        [0, 0, 0, 0, 0, 0, 0, -1],
        [0, 0, 0, 0, 0, 0, -1, 0],
        [-1, -1, -1, 0, 0, 1, 1, 1],
        [0, -1, -1, -1, 0, 1, 1, 2],
        [-1, 0, -1, 0, -1, 1, 0, 1],
    ]);
    let p2 = halves([
        [0, 0, 0, 0, 0, 1, 0, -1],
        [0, 0, 0, 0, 0, -1, -1, 0],
        [0, 0, 0, 0, 0, -1, -1, 1],
        [0, 0, 0, 0, 0, 0, 0, -1],
        [0, 0, 0, 0, 0, 0, 1, 0],
        [1, -1, -1, 0, 0, 1, 1, -1],
        [0, -1, -1, 1, 0, 1, 1, -2],
        [-1, 0, 1, 0, -1, -1, 0, 1],
    ]);
    ensure(osy.table(0, 2) == p1, || "OSy: order-2 table of component 0 differs".into())?;
    ensure(osy.table(1, 2) == p2, || "OSy: order-2 table of component 1 differs".into())?;
    for s in 0..2 {
        let t = osy.table(s, 2);
        ensure((0..5).all(|i| (0..5).all(|j| t[8 * i + j] == int(0))), || "OSy: nonzero pure entry".into())?;
    }
    Ok(())
}

fn first_order_rows() -> Check {
    let f = builtin(Builtin::OfSy, 1, BasisTag::Circular).map_err(e)?;
    row_eq(&f, 0, 1, &[1, 1, 1, 0, 0, 1, 1, 1], "OfSy")?;
    row_eq(&f, 1, 1, &[-1, 1, 1, 0, 0, 1, 1, -1], "OfSy")?;
    let a = builtin(Builtin::AxisL, 1, BasisTag::Circular).map_err(e)?;
    row_eq(&a, 0, 1, &[0, 2, 0, 0, 0, 0, 2, 0], "AxisL")
}

fn solved(specs: &str, kind: OperationKind, order: usize) -> Result<SolveOutcome, String> {
    solve_operation(&parse_property_set(specs).map_err(e)?, kind, order).map_err(e)
}

fn general(op: &FQOperation<Poly>, s: usize, l: u8) -> Poly {
    op.coeff(s, &Word::letter(l))
}

fn order_one_rows() -> Check {
    let sym = solved("S2", OperationKind::Scalar, 1)?.operation;
    for l in [1, 4, 5] {
        ensure(general(&sym, 0, l).is_nil(), || format!("symmetric scalar: p̂{l} ≠ 0"))?;
    }
    for l in [2, 3] {
        ensure(general(&sym, 0, l).as_constant().is_none(), || format!("symmetric scalar: p̂{l} is not free"))?;
    }
    let o2 = solved("O2", OperationKind::Vectorial, 1)?.operation;
    ensure(general(&o2, 0, 5) == general(&o2, 0, 4), || "orthogonal: p̂[1]5 ≠ p̂[1]4".into())?;
    for (l, sign, src) in [(1, -1, 1), (2, 1, 2), (3, 1, 3), (4, -1, 4), (5, -1, 4)] {
        let want = general(&o2, 0, src).scale(&int(sign));
        ensure(general(&o2, 1, l) == want, || format!("orthogonal: p̂[2]{l} ≠ {sign}·p̂[1]{src}"))?;
    }
    let opp = solved("Opp", OperationKind::Pseudoscalar, 1)?.operation;
    for l in [1, 2, 5] {
        ensure(general(&opp, 0, l).is_nil(), || format!("transposition: p̂[12]{l} ≠ 0"))?;
    }
    for l in [3, 4] {
        ensure(general(&opp, 0, l).as_constant().is_none(), || format!("transposition: p̂[12]{l} is not free"))?;
    }
    Ok(())
}

fn scaling_row() -> Check {
    for alpha in [int(2), frac(-1, 3)] {
        let op = solved(&format!("S(3,{alpha})+vC"), OperationKind::Vectorial, 1)?.operation;
        for s in 0..2 {
            let got = general(&op, s, 3).as_constant();
            ensure(got.as_ref() == Some(&alpha), || format!("p̂[{}]3 = {got:?}, want {alpha}", s + 1))?;
        }
    }
    Ok(())
}

fn builtin_invariance() -> Check {
    let osy = builtin(Builtin::OSy, 3, BasisTag::Mixed).map_err(e)?;
    ensure(check(&osy, &PropertySpec::Natural).map_err(e)?.holds(), || "OSy is not natural".into())?;
    let al = builtin(Builtin::AxisL, 3, BasisTag::Mixed).map_err(e)?;
    ensure(check(&al, &PropertySpec::Orthogonal).map_err(e)?.holds(), || "AxisL is not orthogonal invariant".into())
}

fn natural_data() -> Check {
    for order in 1..=3 {
        let unit = FQOperation::constant_one(OperationKind::Vectorial, BasisTag::Circular, order);
        let osy = builtin(Builtin::OSy, order, BasisTag::Circular).map_err(e)?;
        ensure(natural_extend(&unit).map_err(e)? == osy, || format!("order {order}: unit data do not give OSy"))?;
        let red = natural_reduce(&osy).map_err(e)?;
        ensure(red == unit, || format!("order {order}: reduced OSy has higher-order data"))?;
    }
    Ok(())
}

fn natural_counts() -> Check {
    for (kind, per) in [(OperationKind::Scalar, 1), (OperationKind::Vectorial, 2), (OperationKind::Pseudoscalar, 1)] {
        for r in 1..=3 {
            let n = free_coefficient_count(kind, r);
            ensure(n == per * 5usize.pow(r as u32), || format!("{kind}: {n} free at order {r}"))?;
        }
    }
    // Full order-1 naturality system over all eight letters, without the quotient shortcut.
    let op = unknown_operation(OperationKind::Vectorial, BasisTag::Mixed, 1, &[1, 2, 3, 4, 5, 6, 7, 8]);
    let ev = Evaluator::new(&op, false);
    let mut cols = BTreeMap::new();
    let mut rows = Vec::new();
    for (_, p) in residuals(&ev, &PropertySpec::Natural, 1).map_err(e)? {
        if p.is_nil() {
            continue;
        }
        let (lhs, _) = split_row(&p, 1).ok_or("naturality row is not linear")?;
        let mut row: Vec<(usize, Rational)> = Vec::new();
        for (v, q) in lhs {
            let n = cols.len();
            row.push((*cols.entry(v).or_insert(n), q));
        }
        row.sort_by_key(|x| x.0);
        rows.push((row, int(0)));
    }
    ensure(cols.len() <= 16, || "naturality rows involve order-0 unknowns".into())?;
    let sol = rank_and_kernel(&rows, 16);
    ensure(sol.kernel.len() == 10, || format!("order-1 naturality kernel has dimension {}", sol.kernel.len()))
}

fn blocks(b: [[[i64; 2]; 2]; 4]) -> FirstDifferential {
    FirstDifferential::from_blocks(b)
}

fn lcg_op(seed: u64, kind: OperationKind, order: usize, homogeneous: bool) -> FQOperation {
    let mut op = if homogeneous {
        FQOperation::zero(kind, BasisTag::Split, order)
    } else {
        FQOperation::constant_one(kind, BasisTag::Split, order)
    };
    let mut x = seed;
    let from = if homogeneous { order } else { 1 };
    for r in from..=order {
        for w in Word::all_of_length(r, &[1, 2, 3, 4, 5, 6, 7, 8]) {
            for s in 0..kind.num_components() {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let v = ((x >> 33) % 7) as i64 - 3;
                if r == 1 || (x >> 20).is_multiple_of(4) {
                    op.set(s, w, int(v));
                }
            }
        }
    }
    op
}

fn differential_of_composition() -> Check {
    let l1 = blocks([[[1, 2], [0, 1]], [[2, 0], [1, 1]], [[1, 0], [0, 3]], [[0, 1], [1, 0]]]);
    let l2 = blocks([[[3, 1], [1, 0]], [[1, 1], [0, 2]], [[1, -1], [1, 1]], [[2, 1], [1, 1]]]);
    let c = compose(&l2.to_operation::<Rational>(2), &l1.to_operation::<Rational>(2)).map_err(e)?;
    ensure(first_differential(&c).map_err(e)? == l2.mul(&l1), || "linear composition".into())?;
    for seed in 1..=3 {
        let p1 = lcg_op(seed, OperationKind::Vectorial, 3, false);
        let p2 = lcg_op(seed + 10, OperationKind::Vectorial, 3, false);
        let lhs = first_differential(&compose(&p2, &p1).map_err(e)?).map_err(e)?;
        let rhs = first_differential(&p2).map_err(e)?.mul(&first_differential(&p1).map_err(e)?);
        ensure(lhs == rhs, || format!("seed {seed}: D(Ψ2∘Ψ1) ≠ DΨ2·DΨ1"))?;
    }
    Ok(())
}

fn glob_loc_actions() -> Check {
    let l1 = blocks([[[1, 2], [0, 1]], [[2, 0], [1, 1]], [[1, 0], [0, 3]], [[0, 1], [1, 0]]]);
    let l2 = blocks([[[3, 1], [1, 0]], [[1, 1], [0, 2]], [[1, -1], [1, 1]], [[2, 1], [1, 1]]]);
    let a = lcg_op(5, OperationKind::Vectorial, 2, true);
    let b = lcg_op(6, OperationKind::Vectorial, 2, true);
    let lhs = glob(&l1, &loc(&l2, &a).map_err(e)?).map_err(e)?;
    let rhs = loc(&l2, &glob(&l1, &a).map_err(e)?).map_err(e)?;
    ensure(lhs == rhs, || "Glob and Loc do not commute".into())?;
    let (x, y) = (int(3), frac(-1, 2));
    let mix = a.scale(&x).add(&b.scale(&y)).map_err(e)?;
    for (name, f) in [("Loc", loc::<Rational> as fn(&_, &_) -> _), ("Glob", glob::<Rational>)] {
        let lin = f(&l1, &a).map_err(e)?.scale(&x).add(&f(&l1, &b).map_err(e)?.scale(&y)).map_err(e)?;
        ensure(f(&l1, &mix).map_err(e)? == lin, || format!("{name} is not linear"))?;
        let two = f(&l1, &f(&l2, &a).map_err(e)?).map_err(e)?;
        let prod = if name == "Loc" { l2.mul(&l1) } else { l1.mul(&l2) };
        ensure(two == f(&prod, &a).map_err(e)?, || format!("{name} is not an action"))?;
    }
    Ok(())
}

fn involution() -> FirstDifferential {
    blocks([[[1, 0], [0, 1]], [[-1, 0], [0, -1]], [[0, 1], [1, 0]], [[1, 0], [0, -1]]])
}

fn splittings() -> Check {
    let (_, m) = layered_maps(&Context::ProductivityAtQ, 2, BasisTag::Split).map_err(e)?;
    ensure(m[&MapName::Eta].kernel_is_image_of(&m[&MapName::Kappa]), || "im ϰ ≠ ker η".into())?;
    let idm = first_differential(&builtin(Builtin::OSy, 1, BasisTag::Mixed).map_err(e)?).map_err(e)?;
    for ctx in [Context::InvolutiveAtL(involution()), Context::IdempotentAtL(idm), Context::ProductivityAtQ] {
        let (_, m) = layered_maps(&ctx, 2, BasisTag::Split).map_err(e)?;
        let (pi, copi) = (&m[&MapName::Pi], &m[&MapName::CoPi]);
        ensure(pi.after(pi).sub(pi).is_zero() && copi.after(copi).sub(copi).is_zero(), || {
            format!("{ctx}: projections")
        })?;
        ensure(pi.after(copi).is_zero() && copi.after(pi).is_zero(), || format!("{ctx}: π·coπ ≠ 0"))?;
        ensure(pi.rank() + copi.rank() == pi.cols(), || format!("{ctx}: π + coπ ≠ id"))?;
    }
    Ok(())
}

fn amb_shape() -> Check {
    let maps = LayeredMaps::new(Context::ProductivityAtQ, 2, BasisTag::Split).map_err(e)?;
    for seed in [5, 9] {
        let v = lcg_op(seed, OperationKind::Vectorial, 2, true).elements();
        let p = maps.apply(MapName::Pi, &v).map_err(e)?;
        let mut pieces = Vec::new();
        for (x, g) in p.iter().zip([CliffordPart::Q1, CliffordPart::Q2]) {
            let y = x.mul(&AlgebraElement::clifford(maps.basis, maps.order, g).neg()).map_err(e)?;
            for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                pieces.push(y.split_project(a, b).map_err(e)?);
            }
        }
        for i in [0, 1, 4, 6] {
            ensure(pieces[i].is_zero(), || format!("Amb piece {} ≠ 0", i + 1))?;
        }
        ensure(pieces[3] == pieces[7], || "Amb pieces 4 and 8 differ".into())?;
    }
    Ok(())
}

const IND: [i64; 8] = [-1, -1, -1, -1, -1, 1, 1, 1];

fn ptw(l: u8) -> u8 {
    match l {
        1 => 2,
        2 => 1,
        7 => 8,
        8 => 7,
        x => x,
    }
}

/// Which order-`r` combinations the solved system fixes in terms of lower orders. `family`
/// returns 1 or 2 for a coefficient fixed on its own, `Some(c)` for a pair `p_w + c·p_ptw(w)`
/// and `None` for an unconstrained coefficient.
fn families(out: &SolveOutcome, r: usize, alphabet: &[u8], family: impl Fn(&Word, u8) -> Family) -> Check {
    use crate::invariance::level_of;
    let top = |p: &Poly| p.vars().iter().any(|v| level_of(*v) == r);
    let (mut free, mut paired) = (0, 0);
    for w in Word::all_of_length(r, alphabet) {
        let star = w.letters().try_fold(3u8, char_mul).map_err(e)?;
        let p = out.operation.coeff(0, &w);
        match family(&w, star) {
            Family::Fixed => ensure(!top(&p), || format!("r={r}: p̂{w} has an order-{r} parameter"))?,
            Family::Paired(c) => {
                let wp = Word::new(&w.letters().map(ptw).collect::<Vec<_>>());
                let mut q = p.clone();
                q.add_assign_ref(&out.operation.coeff(0, &wp).scale(&int(c)));
                ensure(!top(&q), || format!("r={r}: p̂{w} {c:+}·p̂{wp} has an order-{r} parameter"))?;
                paired += 1;
            }
            Family::Free => free += 1,
        }
    }
    let params = out.parameters.iter().filter(|(_, w)| w.len() == r).count();
    ensure(params == free + paired / 2, || format!("r={r}: {params} parameters, families leave {}", free + paired / 2))
}

enum Family {
    Fixed,
    Paired(i64),
    Free,
}

fn pins(row: &[i64; 8], letters: std::ops::RangeInclusive<u8>) -> String {
    letters.map(|l| format!("+Pin(mixed,1,{l},{})", row[(l - 1) as usize])).collect()
}

fn productive_families() -> Check {
    let order = 3;
    let specs = format!("Nat+S2+vC+CP{}", pins(&[0, 0, 0, 0, 0, 1, 1, 1], 1..=5));
    let out = solved(&specs, OperationKind::Vectorial, order)?;
    ensure(out.parameters.iter().all(|(_, w)| w.len() >= 2), || "order 1 is not determined".into())?;
    let osy = builtin(Builtin::OSy, 1, BasisTag::Mixed).map_err(e)?;
    let o1 = out.operation.truncate(1).map_coeffs(|c| c.as_constant().unwrap_or_else(|| int(99)));
    ensure(o1 == osy, || "order-1 data differ from OSy".into())?;
    for r in 2..=order {
        families(&out, r, &[1, 2, 3, 4, 5], |w, star| {
            let inside = w.letters().all(|l| (3..=5).contains(&l));
            if [4, 5].contains(&star) || (inside && star == 3) {
                Family::Fixed
            } else if !inside && [1, 2, 3, 6, 7, 8].contains(&star) {
                Family::Paired(-IND[(star - 1) as usize])
            } else {
                Family::Free
            }
        })?;
    }
    Ok(())
}

fn involutive_families() -> Check {
    let order = 3;
    let row = [-1, -1, -1, -1, -1, 1, 1, 1];
    let out = solved(&format!("S2+vC+Inv{}", pins(&row, 1..=8)), OperationKind::Vectorial, order)?;
    ensure(out.table.rows[1][1] == 0, || "order 1 is not determined".into())?;
    for r in 2..=order {
        families(&out, r, &[1, 2, 3, 4, 5, 6, 7, 8], |w, star| {
            let prod: i64 = w.letters().map(|l| IND[(l - 1) as usize]).product();
            let sign = IND[(star - 1) as usize] * prod;
            let inside = w.letters().all(|l| (3..=6).contains(&l));
            if ([4, 5].contains(&star) && prod == -1) || (inside && [3, 6].contains(&star) && sign == 1) {
                Family::Fixed
            } else if !inside && [1, 2, 3, 6, 7, 8].contains(&star) {
                Family::Paired(sign)
            } else {
                Family::Free
            }
        })?;
    }
    Ok(())
}

fn conjugator(form: &ConjugationForm) -> Result<FQOperation, String> {
    let id = builtin(Builtin::Id, form.order, form.basis).map_err(e)?;
    let mut c = id.clone();
    for (_, u) in &form.modifiers {
        c = compose(&id.add(&u.transform(form.basis)).map_err(e)?, &c).map_err(e)?;
    }
    Ok(c)
}

fn conjugate_involutions() -> Check {
    let order = 3;
    let l = involution();
    let m = blocks([[[1, 1], [0, 1]], [[2, 0], [0, 1]], [[1, 0], [1, 1]], [[1, 0], [0, 1]]]);
    let lm = m.mul(&l).mul(&m.inverse().map_err(e)?);
    let mods = |seed| -> Vec<(usize, FQOperation)> {
        (2..=order).map(|r| (r, lcg_op(seed + r as u64, OperationKind::Vectorial, r, true).with_order(order))).collect()
    };
    let psi1 = conjugation_product(&Context::InvolutiveAtL(l), &mods(20), BasisTag::Split, order).map_err(e)?;
    let psi2 =
        conjugation_product(&Context::InvolutiveAtL(lm.clone()), &mods(40), BasisTag::Split, order).map_err(e)?;
    let id = builtin(Builtin::Id, order, BasisTag::Split).map_err(e)?;
    for p in [&psi1, &psi2] {
        ensure(compose(p, p).map_err(e)? == id, || "constructed operation is not involutive".into())?;
    }
    let tm = m.to_operation::<Rational>(order).transform(BasisTag::Split);
    let moved = compose(&compose(&tm, &psi1).map_err(e)?, &invert(&tm).map_err(e)?).map_err(e)?;
    let ctx = Context::InvolutiveAtL(lm);
    let c1 = conjugator(&conjugation_form(&moved, &ctx).map_err(e)?)?;
    let c2 = conjugator(&conjugation_form(&psi2, &ctx).map_err(e)?)?;
    let phi = compose(&compose(&c2, &invert(&c1).map_err(e)?).map_err(e)?, &tm).map_err(e)?;
    ensure(phi.is_clifford_conservative(), || "conjugator is not Clifford conservative".into())?;
    ensure(compose(&phi, &psi1).map_err(e)? == compose(&psi2, &phi).map_err(e)?, || "Φ∘Ψ1 ≠ Ψ2∘Φ".into())
}

const BASE: &str = "Nat+vC+Opp+O2+CP";

fn table(extra: &str, order: usize) -> Result<FiberTable, String> {
    let specs = parse_property_set(&format!("{BASE}{extra}")).map_err(e)?;
    fiber_dimensions(&specs, OperationKind::Vectorial, order).map_err(e)
}

fn table_base() -> Check {
    let t = table("", 4)?;
    ensure(t.rows[4] == [0, 0, 2, 12, 56], || format!("row 4 = {:?}", t.rows[4]))
}

fn table_scaled() -> Check {
    let t = table("+DS(1,0)+DS(2,0)+DS(3,0)+DS(4,0)+DS(5,0)", 5)?;
    ensure(t.rows[4][4] == 22 && t.rows[5][4] == 16, || format!("d<4>: {} -> {}", t.rows[4][4], t.rows[5][4]))
}

fn table_trace() -> Check {
    let t = table("+Axis(AxisC)+WMT", 4)?;
    ensure(t.rows.iter().flatten().all(|&d| d == 0), || format!("nonzero entry in {:?}", t.rows))
}

fn table_fixed() -> Check {
    let t = table("+Axis(AxisC)+Fix(OfSy)+Fix(OafSy)", 5)?;
    ensure(t.rows[4] == [0, 0, 0, 0, 3] && t.rows[5] == [0, 0, 0, 0, 3, 0], || {
        format!("rows 4, 5 = {:?}, {:?}", t.rows[4], t.rows[5])
    })
}
