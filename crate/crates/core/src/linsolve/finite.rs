use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::solve_operation;
use crate::coeff::{Coeff, Poly, Var};
use crate::fqop::{FQOperation, OperationKind};
use crate::invariance::{residuals, Evaluator, PropertySpec};
use crate::rational::Rational;
use crate::Error;

/// All solutions of `specs` up to `order` when there are finitely many rational ones.
///
/// The linear properties are solved by the layered engine; the remaining polynomial system in
/// its free parameters is split by branching over rational roots of univariate members and by
/// substituting unknowns that occur linearly with a constant coefficient.
pub fn finite_solutions(
    specs: &[PropertySpec],
    kind: OperationKind,
    order: usize,
) -> Result<Vec<FQOperation<Rational>>, Error> {
    let (linear, rest): (Vec<PropertySpec>, Vec<PropertySpec>) =
        specs.iter().cloned().partition(PropertySpec::is_linear);
    let general = solve_operation(&linear, kind, order)?;
    let quotient = linear.contains(&PropertySpec::Natural);
    let ev = Evaluator::new(&general.operation, quotient);
    let mut polys = Vec::new();
    for r in 0..=order {
        for spec in &rest {
            polys.extend(residuals(&ev, spec, r)?.into_iter().map(|(_, p)| p));
        }
    }
    let params: Vec<Var> = general.parameters.iter().map(|(s, w)| crate::invariance::unknown(*s, w)).collect();
    let mut found = Vec::new();
    branch(polys, HashMap::new(), &params, &mut found)?;
    found.sort();
    found.dedup();
    Ok(found
        .into_iter()
        .map(|vals| {
            let map: HashMap<Var, Poly> = vals.iter().map(|(v, q)| (*v, Poly::constant(q.clone()))).collect();
            general.operation.map_coeffs(|c| c.substitute(&map).as_constant().expect("every parameter is fixed"))
        })
        .collect())
}

type Assignment = BTreeMap<Var, Rational>;

fn branch(
    polys: Vec<Poly>,
    fixed: HashMap<Var, Poly>,
    params: &[Var],
    found: &mut Vec<Assignment>,
) -> Result<(), Error> {
    let polys: Vec<Poly> = polys
        .iter()
        .map(|p| if fixed.is_empty() { p.clone() } else { p.substitute(&fixed) })
        .filter(|p| !p.is_nil())
        .collect();
    if polys.iter().any(|p| p.vars().is_empty()) {
        return Ok(());
    }
    if polys.is_empty() {
        let mut vals = Assignment::new();
        for v in params {
            let p = fixed.get(v).map(|p| p.substitute(&fixed)).unwrap_or_else(|| Poly::var(*v));
            let q = p
                .as_constant()
                .ok_or_else(|| Error::Unsupported("solution set is not finite: a parameter stays free".into()))?;
            vals.insert(*v, q);
        }
        found.push(vals);
        return Ok(());
    }
    if let Some(p) = polys.iter().find(|p| p.vars().len() == 1) {
        let v = *p.vars().iter().next().expect("one variable");
        for root in rational_roots(p, v)? {
            let mut next = fixed.clone();
            for val in next.values_mut() {
                *val = val.substitute(&[(v, Poly::constant(root.clone()))].into_iter().collect());
            }
            next.insert(v, Poly::constant(root));
            branch(polys.clone(), next, params, found)?;
        }
        return Ok(());
    }
    for p in &polys {
        for v in p.vars() {
            if let Some((a, b)) = p.linear_split(v) {
                if let Some(a) = a.as_constant() {
                    let val = b.scale(&-(Rational::one() / a));
                    let one: HashMap<Var, Poly> = [(v, val.clone())].into_iter().collect();
                    let mut next: HashMap<Var, Poly> = fixed.iter().map(|(k, x)| (*k, x.substitute(&one))).collect();
                    next.insert(v, val);
                    return branch(polys, next, params, found);
                }
            }
        }
    }
    Err(Error::Unsupported("polynomial system has no univariate or linearly solvable member".into()))
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>, Error> {
    let n = n.abs();
    if n.bits() > 48 {
        return Err(Error::Unsupported("coefficient too large for rational root search".into()));
    }
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            out.push(&n / &d);
        }
        d += 1;
    }
    Ok(out)
}

/// Rational roots of a univariate polynomial by the rational root theorem.
fn rational_roots(p: &Poly, v: Var) -> Result<Vec<Rational>, Error> {
    let deg = p.degree_in(v) as usize;
    let mut c = vec![Rational::zero(); deg + 1];
    for (m, q) in p.terms() {
        c[m.degree_in(v) as usize] += q;
    }
    let lcm = c.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
    let ints: Vec<BigInt> = c.iter().map(|q| (q * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let mut roots = Vec::new();
    let low = ints.iter().position(|a| !a.is_zero()).expect("nonzero polynomial");
    if low > 0 {
        roots.push(Rational::zero());
    }
    if low < deg {
        for num in divisors(&ints[low])? {
            for den in divisors(&ints[deg])? {
                for sign in [1, -1] {
                    let x = Rational::new(BigInt::from(sign) * &num, den.clone());
                    let mut acc = Rational::zero();
                    for a in ints.iter().rev() {
                        acc = acc * &x + Rational::from_integer(a.clone());
                    }
                    if acc.is_zero() && !roots.contains(&x) {
                        roots.push(x);
                    }
                }
            }
        }
    }
    roots.sort();
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_small_polynomials() {
        let x = Poly::var(1);
        let mut p = x.mul(&x);
        p.sub_assign_ref(&Poly::constant(Rational::one()));
        assert_eq!(rational_roots(&p, 1).unwrap(), vec![Rational::from_integer((-1).into()), Rational::one()]);
        let mut q = x.mul(&x).mul(&x);
        q.sub_assign_ref(&x);
        assert_eq!(rational_roots(&q, 1).unwrap().len(), 3);
        let mut h = x.scale(&Rational::from_integer(2.into()));
        h.sub_assign_ref(&Poly::constant(Rational::one()));
        assert_eq!(rational_roots(&h, 1).unwrap(), vec![Rational::new(1.into(), 2.into())]);
    }
}
