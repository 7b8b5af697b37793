//! Exact sparse linear algebra and the layered fiber-dimension engine.

mod brute;
mod fiber;
mod finite;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::coeff::Coeff;
use crate::rational::Rational;

pub use brute::{brute_force_dimensions, BruteForceReport};
pub use fiber::{fiber_dimensions, solve_operation, FiberStatus, FiberTable, LayeredSolver, SolveOutcome};
pub use finite::finite_solutions;

/// A sparse row: `Σ coeff · x_col`, columns strictly increasing.
pub type SparseRow = Vec<(usize, Rational)>;

#[derive(Clone, Debug)]
struct IntRow<C> {
    lhs: Vec<(usize, BigInt)>,
    rhs: C,
}

impl<C: Coeff> IntRow<C> {
    /// Clears denominators and strips the content of the left side.
    fn new(mut lhs: SparseRow, rhs: C) -> Self {
        lhs.sort_by_key(|(c, _)| *c);
        let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(lhs.len());
        for (c, q) in lhs {
            match merged.last_mut() {
                Some((lc, lq)) if *lc == c => *lq += q,
                _ => merged.push((c, q)),
            }
        }
        merged.retain(|(_, q)| !q.is_zero());
        let mut den = BigInt::one();
        for (_, q) in &merged {
            den = den.lcm(q.denom());
        }
        let lhs = merged.into_iter().map(|(c, q)| (c, (q * &den).to_integer())).collect();
        let mut row = IntRow { lhs, rhs: rhs.scale_ref(&Rational::from_integer(den)) };
        row.strip();
        row
    }

    fn strip(&mut self) {
        let mut g = BigInt::zero();
        for (_, a) in &self.lhs {
            g = g.gcd(a);
            if g.is_one() {
                break;
            }
        }
        if let Some((_, lead)) = self.lhs.first() {
            if lead.is_negative() {
                g = -g;
            }
        }
        if !g.is_zero() && !g.is_one() {
            for (_, a) in &mut self.lhs {
                *a = &*a / &g;
            }
            self.rhs = self.rhs.scale_ref(&Rational::new(BigInt::one(), g));
        }
    }

    fn lead(&self) -> Option<usize> {
        self.lhs.first().map(|(c, _)| *c)
    }

    fn coeff(&self, col: usize) -> Option<&BigInt> {
        self.lhs.binary_search_by_key(&col, |(c, _)| *c).ok().map(|i| &self.lhs[i].1)
    }

    /// `self ← p·self − a·other` with `p` the pivot of `other` at `col`, `a` this row's entry.
    fn eliminate(&mut self, other: &IntRow<C>, col: usize) {
        let Some(a) = self.coeff(col).cloned() else { return };
        let p = other.coeff(col).expect("pivot present").clone();
        let g = a.gcd(&p);
        let (p, a) = (&p / &g, &a / &g);
        let mut out = Vec::with_capacity(self.lhs.len() + other.lhs.len());
        let (mut i, mut j) = (0, 0);
        while i < self.lhs.len() || j < other.lhs.len() {
            let ci = self.lhs.get(i).map(|x| x.0).unwrap_or(usize::MAX);
            let cj = other.lhs.get(j).map(|x| x.0).unwrap_or(usize::MAX);
            let (c, v) = if ci < cj {
                i += 1;
                (ci, &p * &self.lhs[i - 1].1)
            } else if cj < ci {
                j += 1;
                (cj, -(&a * &other.lhs[j - 1].1))
            } else {
                i += 1;
                j += 1;
                (ci, &p * &self.lhs[i - 1].1 - &a * &other.lhs[j - 1].1)
            };
            if !v.is_zero() {
                out.push((c, v));
            }
        }
        self.lhs = out;
        let mut rhs = self.rhs.scale_ref(&Rational::from_integer(p));
        rhs.sub_assign_ref(&other.rhs.scale_ref(&Rational::from_integer(a)));
        self.rhs = rhs;
        self.strip();
    }
}

/// Reduced row echelon form of `A x = b` with right-hand sides in any coefficient ring.
#[derive(Clone, Debug)]
pub struct Echelon<C: Coeff> {
    pub ncols: usize,
    /// Pivot column → (free-column coefficients, rhs), meaning `x_col + Σ q·x_free = rhs`.
    pub pivots: BTreeMap<usize, (SparseRow, C)>,
    /// Right-hand sides of rows whose left side reduced to zero, nonzero only.
    pub conditions: Vec<C>,
}

impl<C: Coeff> Echelon<C> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn nullity(&self) -> usize {
        self.ncols - self.rank()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|c| !self.pivots.contains_key(c)).collect()
    }

    pub fn is_consistent(&self) -> bool {
        self.conditions.is_empty()
    }
}

/// Fraction-free sparse elimination. Columns are pivoted in ascending order; among the rows
/// led by a column the one with the smallest support becomes the pivot.
pub fn eliminate<C: Coeff>(rows: Vec<(SparseRow, C)>, ncols: usize) -> Echelon<C> {
    let mut buckets: BTreeMap<usize, Vec<IntRow<C>>> = BTreeMap::new();
    let mut conditions = Vec::new();
    let push = |row: IntRow<C>, buckets: &mut BTreeMap<usize, Vec<IntRow<C>>>, conds: &mut Vec<C>| match row.lead() {
        Some(c) => buckets.entry(c).or_default().push(row),
        None => {
            if !row.rhs.is_nil() {
                conds.push(row.rhs);
            }
        }
    };
    for (lhs, rhs) in rows {
        push(IntRow::new(lhs, rhs), &mut buckets, &mut conditions);
    }
    let mut pivots: Vec<(usize, IntRow<C>)> = Vec::new();
    while let Some((col, mut bucket)) = buckets.pop_first() {
        let best = (0..bucket.len()).min_by_key(|&i| (bucket[i].lhs.len(), i)).unwrap();
        let piv = bucket.swap_remove(best);
        for mut row in bucket {
            row.eliminate(&piv, col);
            push(row, &mut buckets, &mut conditions);
        }
        pivots.push((col, piv));
    }
    // Back substitution, last pivot first.
    let mut reduced: BTreeMap<usize, IntRow<C>> = BTreeMap::new();
    for (col, mut row) in pivots.into_iter().rev() {
        loop {
            let next = row.lhs.iter().skip(1).map(|(c, _)| *c).find(|c| reduced.contains_key(c));
            match next {
                Some(c) => {
                    let other = &reduced[&c];
                    row.eliminate(other, c);
                }
                None => break,
            }
        }
        reduced.insert(col, row);
    }
    let pivots = reduced
        .into_iter()
        .map(|(col, row)| {
            let p = Rational::from_integer(row.lhs[0].1.clone());
            let inv = Rational::one() / &p;
            let rest: SparseRow =
                row.lhs[1..].iter().map(|(c, a)| (*c, Rational::from_integer(a.clone()) * &inv)).collect();
            (col, (rest, row.rhs.scale_ref(&inv)))
        })
        .collect();
    Echelon { ncols, pivots, conditions }
}

/// Outcome of solving a rational system.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSolution {
    pub rank: usize,
    /// One basis vector per free column, in ascending column order.
    pub kernel: Vec<Vec<Rational>>,
    /// Particular solution with free columns set to zero, if consistent.
    pub particular: Option<Vec<Rational>>,
    /// A nonzero residual `0 = c` witnessing inconsistency.
    pub witness: Option<Rational>,
}

pub fn rank_and_kernel(rows: &[(SparseRow, Rational)], ncols: usize) -> LinearSolution {
    let ech = eliminate(rows.to_vec(), ncols);
    let free = ech.free_columns();
    let kernel = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (col, (rest, _)) in &ech.pivots {
                if let Some((_, q)) = rest.iter().find(|(c, _)| *c == f) {
                    v[*col] = -q;
                }
            }
            v
        })
        .collect();
    let witness = ech.conditions.first().cloned();
    let particular = witness.is_none().then(|| {
        let mut v = vec![Rational::zero(); ncols];
        for (col, (_, rhs)) in &ech.pivots {
            v[*col] = rhs.clone();
        }
        v
    });
    LinearSolution { rank: ech.rank(), kernel, particular, witness }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn row(v: &[(usize, i64)], b: i64) -> (SparseRow, Rational) {
        (v.iter().map(|&(c, a)| (c, int(a))).collect(), int(b))
    }

    #[test]
    fn empty_system_has_full_kernel() {
        let s = rank_and_kernel(&[], 4);
        assert_eq!(s.rank, 0);
        assert_eq!(s.kernel.len(), 4);
    }

    #[test]
    fn contradiction_is_reported() {
        let s = rank_and_kernel(&[row(&[(0, 1)], 1), row(&[(0, 1)], 2)], 1);
        assert!(s.particular.is_none());
        assert_eq!(s.witness.map(|w| w.abs()), Some(int(1)));
    }

    #[test]
    fn solves_small_system() {
        // x + 2y = 3, 3x - y = 2, z free
        let s = rank_and_kernel(&[row(&[(0, 1), (1, 2)], 3), row(&[(0, 3), (1, -1)], 2)], 3);
        assert_eq!(s.rank, 2);
        assert_eq!(s.particular.unwrap()[..2], [int(1), int(1)]);
        assert_eq!(s.kernel, vec![vec![int(0), int(0), int(1)]]);
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let rows = vec![
            row(&[(0, 2), (2, 4), (3, 1)], 0),
            row(&[(1, 3), (2, -1)], 0),
            row(&[(0, 4), (1, 3), (2, 7), (3, 2)], 0),
        ];
        let s = rank_and_kernel(&rows, 4);
        assert_eq!(s.rank, 2);
        for k in &s.kernel {
            for (r, _) in &rows {
                let v: Rational = r.iter().map(|(c, a)| a * &k[*c]).sum();
                assert!(v.is_zero());
            }
        }
    }
}
