use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;

use super::eliminate;
use crate::bases::BasisTag;
use crate::coeff::{Coeff, Poly, Var};
use crate::fqop::{FQOperation, OperationKind};
use crate::invariance::{level_of, residuals, split_row, unknown, unknown_of, Evaluator, PropertySpec};
use crate::rational::Rational;
use crate::word::Word;
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiberStatus {
    Consistent,
    /// The constraints admit no solution once order `order` is imposed.
    Inconsistent {
        order: usize,
    },
}

/// `rows[r][j]` is the fiber dimension `d_r⟨j⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberTable {
    pub rows: Vec<Vec<usize>>,
    pub status: FiberStatus,
}

impl FiberTable {
    pub fn row(&self, r: usize) -> Option<&[usize]> {
        self.rows.get(r).map(Vec::as_slice)
    }

    /// Each column is non-increasing in `r`.
    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|p| p[0].iter().zip(&p[1]).all(|(a, b)| b <= a))
    }

    /// One `r j d` record per entry.
    pub fn records(&self) -> String {
        let mut s = String::new();
        for (r, row) in self.rows.iter().enumerate() {
            for (j, d) in row.iter().enumerate() {
                s.push_str(&format!("r={r} j={j} d={d}\n"));
            }
        }
        if let FiberStatus::Inconsistent { order } = self.status {
            s.push_str(&format!("inconsistent order={order}\n"));
        }
        s
    }
}

impl fmt::Display for FiberTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.rows.len();
        let w = self.rows.iter().flatten().map(|d| d.to_string().len()).max().unwrap_or(1).max(n.to_string().len());
        write!(f, "{:>w$} |", "")?;
        for j in 0..n {
            write!(f, " {j:>w$}")?;
        }
        writeln!(f)?;
        writeln!(f, "{}", "-".repeat((w + 1) * (n + 1) + 1))?;
        for (r, row) in self.rows.iter().enumerate() {
            write!(f, "{r:>w$} |")?;
            for d in row {
                write!(f, " {d:>w$}")?;
            }
            writeln!(f)?;
        }
        if let FiberStatus::Inconsistent { order } = self.status {
            writeln!(f, "inconsistent at order {order}")?;
        }
        Ok(())
    }
}

/// Layered solver: imposes the properties order by order, carrying the lower-order free
/// unknowns symbolically on right-hand sides.
pub struct LayeredSolver {
    specs: Vec<PropertySpec>,
    kind: OperationKind,
    quotient: bool,
    alphabet: Vec<u8>,
    subst: HashMap<Var, Poly>,
    free: Vec<BTreeSet<Var>>,
    rows: Vec<Vec<usize>>,
    status: FiberStatus,
}

fn apply(p: &Poly, map: &HashMap<Var, Poly>) -> Poly {
    if map.is_empty() || !p.vars().iter().any(|v| map.contains_key(v)) {
        p.clone()
    } else {
        p.substitute(map)
    }
}

impl LayeredSolver {
    /// Works on `{1..5}`-words whenever naturality is among the properties.
    pub fn new(specs: &[PropertySpec], kind: OperationKind) -> Self {
        let quotient = specs.contains(&PropertySpec::Natural);
        LayeredSolver {
            specs: specs.to_vec(),
            kind,
            quotient,
            alphabet: if quotient { (1..=5).collect() } else { (1..=8).collect() },
            subst: HashMap::new(),
            free: Vec::new(),
            rows: Vec::new(),
            status: FiberStatus::Consistent,
        }
    }

    pub fn order(&self) -> Option<usize> {
        self.free.len().checked_sub(1)
    }

    pub fn status(&self) -> &FiberStatus {
        &self.status
    }

    pub fn table(&self) -> FiberTable {
        FiberTable { rows: self.rows.clone(), status: self.status.clone() }
    }

    /// Current general solution, mixed basis; in quotient mode only the `{1..5}` data.
    pub fn operation(&self) -> FQOperation<Poly> {
        let order = self.order().unwrap_or(0);
        let mut op = FQOperation::zero(self.kind, BasisTag::Mixed, order);
        for (r, _) in self.free.iter().enumerate() {
            for s in 0..self.kind.num_components() {
                for w in Word::all_of_length(r, &self.alphabet) {
                    let v = unknown(s, &w);
                    op.set(s, w, self.subst.get(&v).cloned().unwrap_or_else(|| Poly::var(v)));
                }
            }
        }
        op
    }

    /// The solution if every fiber is a point.
    pub fn unique_solution(&self) -> Option<FQOperation<Rational>> {
        if self.status != FiberStatus::Consistent || self.free.iter().any(|f| !f.is_empty()) {
            return None;
        }
        let op = self.operation();
        let op = if self.quotient { crate::invariance::natural_extend(&op).ok()? } else { op };
        Some(op.map_coeffs(|c| c.as_constant().expect("all unknowns fixed")))
    }

    fn record(&mut self, map: HashMap<Var, Poly>) {
        if map.is_empty() {
            return;
        }
        for v in map.keys() {
            self.free[level_of(*v)].remove(v);
        }
        self.subst.par_iter_mut().for_each(|(_, val)| *val = apply(val, &map));
        self.subst.extend(map);
    }

    /// Eliminates solvability conditions top level first; they must be affine in their
    /// highest-level unknowns.
    fn resolve(&mut self, mut conds: Vec<Poly>, r: usize) -> Result<bool, Error> {
        loop {
            conds = conds.iter().map(|p| apply(p, &self.subst)).filter(|p| !p.is_nil()).collect();
            if conds.iter().any(|p| p.vars().is_empty()) {
                self.status = FiberStatus::Inconsistent { order: r };
                return Ok(false);
            }
            let Some(j) = conds.iter().flat_map(|p| p.vars()).map(level_of).max() else {
                return Ok(true);
            };
            let (top, rest): (Vec<Poly>, Vec<Poly>) =
                conds.into_iter().partition(|p| p.vars().iter().any(|v| level_of(*v) == j));
            let cols: Vec<Var> = self.free[j].iter().copied().collect();
            let mut rows = Vec::with_capacity(top.len());
            for p in &top {
                let (lhs, rhs) = split_row(p, j).ok_or_else(|| {
                    Error::Afp(format!("condition at order {r} is not affine in its level-{j} unknowns: {p}"))
                })?;
                let lhs = lhs.into_iter().map(|(v, c)| (cols.binary_search(&v).expect("free unknown"), c)).collect();
                rows.push((lhs, rhs));
            }
            let ech = eliminate(rows, cols.len());
            let map = pivot_map(&ech, &cols);
            self.record(map);
            conds = rest;
            conds.extend(ech.conditions);
        }
    }

    /// Imposes the properties at the next order.
    pub fn advance(&mut self) -> Result<(), Error> {
        if self.status != FiberStatus::Consistent {
            return Ok(());
        }
        let r = self.free.len();
        let mut fresh = BTreeSet::new();
        for s in 0..self.kind.num_components() {
            for w in Word::all_of_length(r, &self.alphabet) {
                fresh.insert(unknown(s, &w));
            }
        }
        self.free.push(fresh);
        let op = self.operation();
        let ev = Evaluator::new(&op, self.quotient);
        let per_spec: Vec<Vec<(_, Poly)>> =
            self.specs.par_iter().map(|spec| residuals(&ev, spec, r)).collect::<Result<_, _>>()?;
        let mut pending: Vec<Poly> = per_spec.into_iter().flatten().map(|(_, p)| p).collect();
        loop {
            let subst = &self.subst;
            let split: Vec<Result<_, Poly>> = pending
                .into_par_iter()
                .filter_map(|p| {
                    let p = apply(&p, subst);
                    (!p.is_nil()).then(|| split_row(&p, r).ok_or(p))
                })
                .collect();
            let mut lin = Vec::new();
            let mut deferred = Vec::new();
            for x in split {
                match x {
                    Ok(row) => lin.push(row),
                    Err(p) => deferred.push(p),
                }
            }
            if lin.is_empty() {
                if let Some(p) = deferred.first() {
                    return Err(Error::Afp(format!("row at order {r} is not linear in the order-{r} unknowns: {p}")));
                }
                break;
            }
            let cols: Vec<Var> = self.free[r].iter().copied().collect();
            let rows = lin
                .into_iter()
                .map(|(lhs, rhs)| {
                    (lhs.into_iter().map(|(v, c)| (cols.binary_search(&v).expect("free unknown"), c)).collect(), rhs)
                })
                .collect();
            let ech = eliminate(rows, cols.len());
            let map = pivot_map(&ech, &cols);
            self.record(map);
            if !self.resolve(ech.conditions, r)? {
                break;
            }
            pending = deferred;
        }
        self.rows.push(self.free.iter().map(BTreeSet::len).collect());
        Ok(())
    }
}

fn pivot_map(ech: &super::Echelon<Poly>, cols: &[Var]) -> HashMap<Var, Poly> {
    ech.pivots
        .iter()
        .map(|(c, (rest, rhs))| {
            let mut v = rhs.clone();
            for (f, q) in rest {
                v.sub_assign_ref(&Poly::var(cols[*f]).scale_ref(q));
            }
            (cols[*c], v)
        })
        .collect()
}

/// Fiber dimensions of the solution variety of `specs` up to `max_order`.
pub fn fiber_dimensions(specs: &[PropertySpec], kind: OperationKind, max_order: usize) -> Result<FiberTable, Error> {
    let mut s = LayeredSolver::new(specs, kind);
    for _ in 0..=max_order {
        s.advance()?;
        if s.status != FiberStatus::Consistent {
            break;
        }
    }
    Ok(s.table())
}

/// Outcome of solving a property system up to some order.
#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub table: FiberTable,
    /// General solution, mixed basis, coefficients polynomial in the remaining free unknowns.
    pub operation: FQOperation<Poly>,
    /// Remaining free unknowns as `(component, word)`.
    pub parameters: Vec<(usize, Word)>,
}

pub fn solve_operation(specs: &[PropertySpec], kind: OperationKind, order: usize) -> Result<SolveOutcome, Error> {
    let mut s = LayeredSolver::new(specs, kind);
    for _ in 0..=order {
        s.advance()?;
    }
    let op = s.operation();
    let op = if s.quotient { crate::invariance::natural_extend(&op)? } else { op };
    let parameters = s.free.iter().flatten().map(|v| unknown_of(*v)).collect();
    Ok(SolveOutcome { table: s.table(), operation: op, parameters })
}
