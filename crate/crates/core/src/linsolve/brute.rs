use std::collections::{BTreeSet, HashMap};

use crate::bases::BasisTag;
use crate::coeff::{Coeff, Poly, Var};
use crate::fqop::OperationKind;
use crate::invariance::{level_of, residuals, unknown_operation, Evaluator, PropertySpec};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteForceReport {
    /// Free unknowns left per level after solving the whole system at once.
    pub free_per_level: Vec<usize>,
    pub consistent: bool,
}

/// Solves all rows of all orders at once by repeated substitution, always eliminating the
/// highest unknown that occurs linearly with a constant coefficient. Independent of the
/// layered engine; meant for small orders.
pub fn brute_force_dimensions(
    specs: &[PropertySpec],
    kind: OperationKind,
    order: usize,
) -> Result<BruteForceReport, Error> {
    let quotient = specs.contains(&PropertySpec::Natural);
    let alphabet: Vec<u8> = if quotient { (1..=5).collect() } else { (1..=8).collect() };
    let op = unknown_operation(kind, BasisTag::Mixed, order, &alphabet);
    let mut all: BTreeSet<Var> = BTreeSet::new();
    for s in op.components() {
        for c in s.values() {
            all.extend(c.vars());
        }
    }
    let ev = Evaluator::new(&op, quotient);
    let mut polys = Vec::new();
    for r in 0..=order {
        for spec in specs {
            polys.extend(residuals(&ev, spec, r)?.into_iter().map(|(_, p)| p));
        }
    }
    let mut solved: HashMap<Var, Poly> = HashMap::new();
    loop {
        polys.retain(|p| !p.is_nil());
        if polys.iter().any(|p| p.vars().is_empty()) {
            return Ok(BruteForceReport { free_per_level: vec![0; order + 1], consistent: false });
        }
        if polys.is_empty() {
            break;
        }
        let mut best: Option<(Var, usize)> = None;
        for (i, p) in polys.iter().enumerate() {
            for v in p.vars() {
                if best.is_some_and(|(b, _)| b >= v) {
                    continue;
                }
                if let Some((a, _)) = p.linear_split(v) {
                    if a.as_constant().is_some_and(|q| !q.is_nil()) {
                        best = Some((v, i));
                    }
                }
            }
        }
        let (v, i) = best.ok_or_else(|| Error::Afp("no unknown occurs linearly with a constant coefficient".into()))?;
        let p = polys.swap_remove(i);
        let (a, b) = p.linear_split(v).expect("checked above");
        let val = b.scale_ref(&-(crate::rational::Rational::from_integer(1.into()) / a.as_constant().unwrap()));
        let map: HashMap<Var, Poly> = [(v, val)].into_iter().collect();
        for q in polys.iter_mut() {
            if q.vars().contains(&v) {
                *q = q.substitute(&map);
            }
        }
        for q in solved.values_mut() {
            if q.vars().contains(&v) {
                *q = q.substitute(&map);
            }
        }
        solved.extend(map);
    }
    let mut free = vec![0; order + 1];
    for v in all.iter().filter(|v| !solved.contains_key(v)) {
        free[level_of(*v)] += 1;
    }
    Ok(BruteForceReport { free_per_level: free, consistent: true })
}
