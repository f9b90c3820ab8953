//! Dense two-phase simplex over arbitrary-precision rationals.
//!
//! Minimizes `c·x` subject to linear rows and `x >= 0`. Bland's rule picks
//! both the entering and the leaving variable, so the method terminates on
//! degenerate problems.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    /// Sparse `(variable, coefficient)` pairs.
    pub coeffs: Vec<(usize, BigRational)>,
    pub rel: Relation,
    pub rhs: BigRational,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<BigRational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Optimal { value: BigRational, x: Vec<BigRational> },
    Infeasible,
    Unbounded,
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

struct Tableau {
    /// `rows[i]` has `cols` coefficients followed by the right-hand side.
    rows: Vec<Vec<BigRational>>,
    /// Reduced costs followed by minus the objective value.
    obj: Vec<BigRational>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<BigRational>| {
            let f = row[c].clone();
            if !f.is_zero() {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    if !pv.is_zero() {
                        *v -= &f * pv;
                    }
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = c;
    }

    /// Loads a cost vector and prices out the current basis.
    fn set_objective(&mut self, cost: &[BigRational]) {
        let mut obj: Vec<BigRational> = cost.to_vec();
        obj.push(BigRational::zero());
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = cost[b].clone();
            if !cb.is_zero() {
                for (o, v) in obj.iter_mut().zip(&self.rows[r]) {
                    *o -= &cb * v;
                }
            }
        }
        self.obj = obj;
    }

    /// Returns false when unbounded.
    fn optimize(&mut self, allowed: &dyn Fn(usize) -> bool) -> bool {
        loop {
            let entering = (0..self.cols).find(|&j| allowed(j) && self.obj[j].is_negative());
            let Some(c) = entering else { return true };
            let mut best: Option<(BigRational, usize, usize)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[self.cols] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((br, _, bvar)) => {
                            ratio < *br || (ratio == *br && self.basis[r] < *bvar)
                        }
                    };
                    if better {
                        best = Some((ratio, r, self.basis[r]));
                    }
                }
            }
            match best {
                None => return false,
                Some((_, r, _)) => self.pivot(r, c),
            }
        }
    }

    fn value(&self) -> BigRational {
        -self.obj[self.cols].clone()
    }
}

pub fn solve(lp: &LinearProgram) -> Outcome {
    let n = lp.num_vars;
    assert_eq!(lp.objective.len(), n);

    // Normalize to nonnegative right-hand sides.
    let rows: Vec<(Vec<BigRational>, Relation, BigRational)> = lp
        .constraints
        .iter()
        .map(|c| {
            let mut dense = vec![BigRational::zero(); n];
            for (j, v) in &c.coeffs {
                dense[*j] += v;
            }
            if c.rhs.is_negative() {
                let rel = match c.rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (dense.into_iter().map(|v| -v).collect(), rel, -c.rhs.clone())
            } else {
                (dense, c.rel, c.rhs.clone())
            }
        })
        .collect();

    let m = rows.len();
    let slacks = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let artificials = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let cols = n + slacks + artificials;
    let art_start = n + slacks;

    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        obj: Vec::new(),
        basis: Vec::with_capacity(m),
        cols,
    };
    let (mut s, mut a) = (n, art_start);
    for (dense, rel, rhs) in rows {
        let mut row = dense;
        row.resize(cols + 1, BigRational::zero());
        row[cols] = rhs;
        match rel {
            Relation::Le => {
                row[s] = BigRational::one();
                tab.basis.push(s);
                s += 1;
            }
            Relation::Ge => {
                row[s] = -BigRational::one();
                s += 1;
                row[a] = BigRational::one();
                tab.basis.push(a);
                a += 1;
            }
            Relation::Eq => {
                row[a] = BigRational::one();
                tab.basis.push(a);
                a += 1;
            }
        }
        tab.rows.push(row);
    }

    // Phase 1: drive artificials to zero.
    if artificials > 0 {
        let mut cost = vec![BigRational::zero(); cols];
        for c in cost.iter_mut().skip(art_start) {
            *c = BigRational::one();
        }
        tab.set_objective(&cost);
        tab.optimize(&|_| true);
        if tab.value().is_positive() {
            return Outcome::Infeasible;
        }
        // Pivot remaining zero-level artificials out, dropping redundant rows.
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.basis[r] >= art_start {
                match (0..art_start).find(|&j| !tab.rows[r][j].is_zero()) {
                    Some(j) => {
                        tab.pivot(r, j);
                        r += 1;
                    }
                    None => {
                        tab.rows.remove(r);
                        tab.basis.remove(r);
                    }
                }
            } else {
                r += 1;
            }
        }
    }

    // Phase 2 on the original objective.
    let mut cost = lp.objective.clone();
    cost.resize(cols, BigRational::zero());
    tab.set_objective(&cost);
    if !tab.optimize(&|j| j < art_start) {
        return Outcome::Unbounded;
    }
    let mut x = vec![BigRational::zero(); n];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rows[r][cols].clone();
        }
    }
    Outcome::Optimal {
        value: tab.value(),
        x,
    }
}
