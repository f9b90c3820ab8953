//! Achievable loads for any `K` as an exact linear program.
//!
//! Files are split into subsystems by replication level `j`. Within a level
//! `2 <= j <= K−2`, coded exchange happens over *collections*: `K` distinct
//! `j`-subsets covering every node exactly `j` times. Variable `x_{j,q}`
//! counts files taken from each member of collection `q`. Level `K−1` uses
//! one variable per node `q`: an equation sent by node `q` that combines one
//! file from every `(K−1)`-subset containing `q`. Level 1 has no coding
//! opportunity and level `K` needs no shuffle.
//!
//! The model minimizes total load over the subset sizes `S_T` and the coding
//! variables, subject to capacity rows and the storage accounting equalities.
//! No coding across levels is attempted, so for `K > 3` the optimum is an
//! achievable load, not a proven minimum.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{FileAllocation, Load, NodeSet, Rational, SubsetProfile, SystemConfig};
use crate::simplex::{self, Constraint, LinearProgram, Outcome, Relation};

#[derive(Clone, Debug)]
pub struct LpOptions {
    pub k_max: usize,
    /// Upper bound on collections enumerated per level.
    pub collection_cap: usize,
    /// Include the level `K−1` coding variables.
    pub top_coding: bool,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            k_max: 6,
            collection_cap: 100_000,
            top_coding: true,
        }
    }
}

/// `K` distinct `j`-subsets in which every node appears exactly `j` times.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Collection {
    pub j: usize,
    pub members: Vec<NodeSet>,
}

impl fmt::Display for Collection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.members.iter().map(|t| t.to_string()).collect();
        write!(f, "{{{}}}", m.join(","))
    }
}

/// All `j`-subsets of `{0..k}` in lexicographic order.
pub fn subsets_of_size(k: usize, j: usize) -> Vec<NodeSet> {
    NodeSet::all_nonempty(k).into_iter().filter(|t| t.len() == j).collect()
}

pub fn enumerate_collections(k: usize, j: usize) -> Result<Vec<Collection>> {
    enumerate_collections_with(k, j, &LpOptions::default())
}

/// Backtracks over lexicographically ordered `j`-subsets.
pub fn enumerate_collections_with(k: usize, j: usize, opts: &LpOptions) -> Result<Vec<Collection>> {
    if k > opts.k_max {
        return Err(Error::TooLarge {
            what: "node count".into(),
            count: k as u128,
            cap: opts.k_max as u128,
        });
    }
    if j < 1 || j + 2 > k {
        return Err(Error::BadDimension(format!("collections need 1 <= j <= K-2, got K={k} j={j}")));
    }
    let pool = subsets_of_size(k, j);
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(k);
    let mut degree = vec![0usize; k];

    struct Search<'a> {
        pool: &'a [NodeSet],
        k: usize,
        j: usize,
        cap: usize,
    }

    fn go(
        s: &Search<'_>,
        start: usize,
        chosen: &mut Vec<usize>,
        degree: &mut [usize],
        out: &mut Vec<Collection>,
    ) -> Result<()> {
        if chosen.len() == s.k {
            if degree.iter().all(|&d| d == s.j) {
                if out.len() == s.cap {
                    return Err(Error::TooLarge {
                        what: format!("collections for K={} j={}", s.k, s.j),
                        count: s.cap as u128 + 1,
                        cap: s.cap as u128,
                    });
                }
                out.push(Collection {
                    j: s.j,
                    members: chosen.iter().map(|&i| s.pool[i]).collect(),
                });
            }
            return Ok(());
        }
        let remaining = s.k - chosen.len();
        for i in start..s.pool.len() {
            if s.pool.len() - i < remaining {
                break;
            }
            let t = s.pool[i];
            if t.nodes().any(|n| degree[n] == s.j) {
                continue;
            }
            for n in t.nodes() {
                degree[n] += 1;
            }
            chosen.push(i);
            go(s, i + 1, chosen, degree, out)?;
            chosen.pop();
            for n in t.nodes() {
                degree[n] -= 1;
            }
        }
        Ok(())
    }

    let search = Search {
        pool: &pool,
        k,
        j,
        cap: opts.collection_cap,
    };
    go(&search, 0, &mut chosen, &mut degree, &mut out)?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum VarKind {
    /// `S_T`: files stored by exactly the nodes in `T`.
    Subset(NodeSet),
    /// `x_{j,q}` for a level-`j` collection (`q` is 1-based).
    Collection { j: usize, q: usize, members: Vec<NodeSet> },
    /// `x_{K−1,q}`: equations sent by node `q` (1-based).
    TopLevel { q: usize, members: Vec<NodeSet> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LpVar {
    pub name: String,
    pub kind: VarKind,
}

impl LpVar {
    /// Subsets a coding variable draws files from.
    pub fn members(&self) -> &[NodeSet] {
        match &self.kind {
            VarKind::Subset(_) => &[],
            VarKind::Collection { members, .. } | VarKind::TopLevel { members, .. } => members,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RowKind {
    Capacity(NodeSet),
    FileTotal,
    StorageTotal,
    NodeStorage(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LpRow {
    pub kind: RowKind,
    pub coeffs: Vec<(usize, Rational)>,
    #[serde(skip)]
    pub rel: Relation,
    pub rhs: Rational,
}

impl LpRow {
    fn holds(&self, values: &[Rational]) -> bool {
        let lhs: Rational = self.coeffs.iter().map(|(i, c)| c * values[*i]).sum();
        match self.rel {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LpModel {
    pub config: SystemConfig,
    pub vars: Vec<LpVar>,
    pub objective: Vec<Rational>,
    pub rows: Vec<LpRow>,
    subset_index: BTreeMap<NodeSet, usize>,
}

/// Per-collection saving `K(K−j)(1 − 1/j)` at level `j`.
pub fn collection_saving(k: usize, j: usize) -> Rational {
    let (k, j) = (k as i64, j as i64);
    Rational::new(k * (k - j) * (j - 1), j)
}

pub fn build_model(cfg: &SystemConfig) -> Result<LpModel> {
    build_model_with(cfg, &LpOptions::default())
}

pub fn build_model_with(cfg: &SystemConfig, opts: &LpOptions) -> Result<LpModel> {
    let k = cfg.k();
    if k < 3 {
        return Err(Error::BadDimension(format!("LP model needs K >= 3, got {k}")));
    }
    if k > opts.k_max {
        return Err(Error::TooLarge {
            what: "node count".into(),
            count: k as u128,
            cap: opts.k_max as u128,
        });
    }
    let int = Rational::from_integer;
    let mut vars = Vec::new();
    let mut objective = Vec::new();
    let mut subset_index = BTreeMap::new();
    for t in NodeSet::all_nonempty(k) {
        subset_index.insert(t, vars.len());
        vars.push(LpVar {
            name: format!("S{t}"),
            kind: VarKind::Subset(t),
        });
        objective.push(int((k - t.len()) as i64));
    }

    // Coding variables draw from member subsets: Σ x ≤ S_T per subset.
    let mut users: BTreeMap<NodeSet, Vec<usize>> = BTreeMap::new();
    for j in 2..=k.saturating_sub(2) {
        let saving = collection_saving(k, j);
        for (q, c) in enumerate_collections_with(k, j, opts)?.into_iter().enumerate() {
            let idx = vars.len();
            for &t in &c.members {
                users.entry(t).or_default().push(idx);
            }
            vars.push(LpVar {
                name: format!("x{j}_{}", q + 1),
                kind: VarKind::Collection {
                    j,
                    q: q + 1,
                    members: c.members,
                },
            });
            objective.push(-saving);
        }
    }
    if opts.top_coding {
        let top = subsets_of_size(k, k - 1);
        for q in 0..k {
            let members: Vec<NodeSet> = top.iter().copied().filter(|t| t.contains(q)).collect();
            let idx = vars.len();
            for &t in &members {
                users.entry(t).or_default().push(idx);
            }
            vars.push(LpVar {
                name: format!("x{}_{}", k - 1, q + 1),
                kind: VarKind::TopLevel { q: q + 1, members },
            });
            objective.push(int(-(k as i64 - 2)));
        }
    }

    let mut rows = Vec::new();
    for (t, xs) in &users {
        let mut coeffs: Vec<(usize, Rational)> = xs.iter().map(|&i| (i, int(1))).collect();
        coeffs.push((subset_index[t], int(-1)));
        rows.push(LpRow {
            kind: RowKind::Capacity(*t),
            coeffs,
            rel: Relation::Le,
            rhs: int(0),
        });
    }
    let storage = cfg.effective_storage();
    rows.push(LpRow {
        kind: RowKind::FileTotal,
        coeffs: subset_index.values().map(|&i| (i, int(1))).collect(),
        rel: Relation::Eq,
        rhs: int(cfg.n() as i64),
    });
    rows.push(LpRow {
        kind: RowKind::StorageTotal,
        coeffs: subset_index.iter().map(|(t, &i)| (i, int(t.len() as i64))).collect(),
        rel: Relation::Eq,
        rhs: int(storage.iter().sum::<u64>() as i64),
    });
    for (node, &m) in storage.iter().enumerate() {
        rows.push(LpRow {
            kind: RowKind::NodeStorage(node),
            coeffs: subset_index
                .iter()
                .filter(|(t, _)| t.contains(node))
                .map(|(_, &i)| (i, int(1)))
                .collect(),
            rel: Relation::Eq,
            rhs: int(m as i64),
        });
    }

    Ok(LpModel {
        config: cfg.clone(),
        vars,
        objective,
        rows,
        subset_index,
    })
}

impl LpModel {
    pub fn subset_var(&self, t: NodeSet) -> usize {
        self.subset_index[&t]
    }

    pub fn subset_var_count(&self) -> usize {
        self.subset_index.len()
    }

    pub fn coding_vars(&self) -> impl Iterator<Item = (usize, &LpVar)> {
        self.vars
            .iter()
            .enumerate()
            .filter(|(_, v)| !matches!(v.kind, VarKind::Subset(_)))
    }

    pub fn inequality_count(&self) -> usize {
        self.rows.iter().filter(|r| r.rel != Relation::Eq).count()
    }

    pub fn equality_count(&self) -> usize {
        self.rows.iter().filter(|r| r.rel == Relation::Eq).count()
    }

    pub fn objective_at(&self, values: &[Rational]) -> Rational {
        self.objective.iter().zip(values).map(|(c, v)| c * v).sum()
    }

    /// Whether `values` are nonnegative and satisfy every row exactly.
    pub fn is_feasible(&self, values: &[Rational]) -> bool {
        values.len() == self.vars.len()
            && values.iter().all(|v| *v >= Rational::zero())
            && self.rows.iter().all(|r| r.holds(values))
    }

    /// Plain-text row/column listing.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let m: Vec<String> = self.config.storage().iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "# K={} N={} M={}", self.config.k(), self.config.n(), m.join(","));
        let _ = writeln!(out, "variables {}", self.vars.len());
        for (i, v) in self.vars.iter().enumerate() {
            let members: Vec<String> = v.members().iter().map(|t| format!("S{t}")).collect();
            if members.is_empty() {
                let _ = writeln!(out, "  {i} {}", v.name);
            } else {
                let _ = writeln!(out, "  {i} {} draws {}", v.name, members.join(" "));
            }
        }
        let term = |c: &Rational, name: &str| {
            if *c >= Rational::zero() {
                format!("+{c} {name}")
            } else {
                format!("{c} {name}")
            }
        };
        let obj: Vec<String> = self
            .objective
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| term(c, &self.vars[i].name))
            .collect();
        let _ = writeln!(out, "minimize\n  {}", obj.join(" "));
        let _ = writeln!(out, "subject to");
        for (r, row) in self.rows.iter().enumerate() {
            let lhs: Vec<String> = row.coeffs.iter().map(|(i, c)| term(c, &self.vars[*i].name)).collect();
            let rel = match row.rel {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            let _ = writeln!(out, "  r{r}: {} {rel} {}", lhs.join(" "), row.rhs);
        }
        let _ = writeln!(out, "bounds\n  all variables >= 0");
        out
    }

    fn to_program(&self) -> LinearProgram {
        let big = |r: &Rational| {
            BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
        };
        LinearProgram {
            num_vars: self.vars.len(),
            objective: self.objective.iter().map(big).collect(),
            constraints: self
                .rows
                .iter()
                .map(|r| Constraint {
                    coeffs: r.coeffs.iter().map(|(i, c)| (*i, big(c))).collect(),
                    rel: r.rel,
                    rhs: big(&r.rhs),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub optimum: Option<Load>,
    pub values: Vec<Rational>,
}

impl LpSolution {
    pub fn value_of(&self, model: &LpModel, name: &str) -> Option<Rational> {
        model.vars.iter().position(|v| v.name == name).map(|i| self.values[i])
    }

    /// Subset sizes of the solution as a profile, scaled by `factor`.
    pub fn profile(&self, model: &LpModel, factor: u64) -> Result<SubsetProfile> {
        let mut counts = Vec::new();
        for (t, &i) in &model.subset_index {
            let v = self.values[i] * factor as i64;
            if !v.is_integer() {
                return Err(Error::InternalContradiction(format!(
                    "S{t} = {} is not integral at scale {factor}",
                    self.values[i]
                )));
            }
            counts.push((*t, v.to_integer() as u64));
        }
        Ok(SubsetProfile::from_counts(model.config.k(), counts))
    }
}

fn small(v: &BigRational) -> Result<Rational> {
    match (v.numer().to_i64(), v.denom().to_i64()) {
        (Some(n), Some(d)) => Ok(Rational::new(n, d)),
        _ => Err(Error::InternalContradiction(format!("LP value {v} overflows i64"))),
    }
}

/// Exact optimum. `Unbounded` cannot occur on models from [`build_model`]
/// since their objective is bounded below by zero.
pub fn solve(model: &LpModel) -> Result<LpSolution> {
    match simplex::solve(&model.to_program()) {
        Outcome::Infeasible => Ok(LpSolution {
            status: LpStatus::Infeasible,
            optimum: None,
            values: Vec::new(),
        }),
        Outcome::Unbounded => Err(Error::Unbounded),
        Outcome::Optimal { value, x } => {
            let values = x.iter().map(small).collect::<Result<Vec<_>>>()?;
            let value = small(&value)?;
            if !model.is_feasible(&values) || model.objective_at(&values) != value {
                return Err(Error::InternalContradiction(
                    "simplex returned a point that violates the model".into(),
                ));
            }
            Ok(LpSolution {
                status: LpStatus::Optimal,
                optimum: Some(Load::new(value)),
                values,
            })
        }
    }
}

/// Files set aside in one member subset for one coding variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnitRange {
    pub subset: NodeSet,
    /// Inclusive 1-based file range on the scaled instance.
    pub first: u64,
    pub last: u64,
}

/// One coding variable's share of the allocation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodedUnit {
    pub var: String,
    pub j: usize,
    pub files_per_member: u64,
    pub ranges: Vec<UnitRange>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extraction {
    /// Allocation on the instance scaled by `scale`.
    pub allocation: FileAllocation,
    pub scale: u64,
    pub units: Vec<CodedUnit>,
    /// LP optimum in units of the original instance.
    pub load: Load,
}

/// Lays the solution out as contiguous file ranges, subsets in canonical
/// order (size, then lexicographic), after scaling by the LCM of all
/// solution denominators. Coding variables then claim consecutive
/// sub-ranges inside each member subset's range.
pub fn extract_allocation(cfg: &SystemConfig, model: &LpModel, sol: &LpSolution) -> Result<Extraction> {
    let optimum = sol
        .optimum
        .ok_or_else(|| Error::InternalContradiction("no optimal solution to extract".into()))?;
    let scale = sol.values.iter().fold(1i64, |acc, v| acc.lcm(v.denom())) as u64;
    let profile = sol.profile(model, scale)?;
    let allocation = profile.to_allocation(cfg.scaled(scale))?;

    let mut start: BTreeMap<NodeSet, u64> = BTreeMap::new();
    let mut next = 1u64;
    for (t, &c) in profile.counts() {
        start.insert(*t, next);
        next += c;
    }
    let mut units = Vec::new();
    for (i, var) in model.coding_vars() {
        let x = sol.values[i] * scale as i64;
        if x.is_zero() {
            continue;
        }
        let per = x.to_integer() as u64;
        let j = match &var.kind {
            VarKind::Collection { j, .. } => *j,
            _ => cfg.k() - 1,
        };
        let ranges = var
            .members()
            .iter()
            .map(|&t| {
                let s = start.get_mut(&t).expect("member subset");
                let r = UnitRange {
                    subset: t,
                    first: *s,
                    last: *s + per - 1,
                };
                *s += per;
                r
            })
            .collect();
        units.push(CodedUnit {
            var: var.name.clone(),
            j,
            files_per_member: per,
            ranges,
        });
    }
    Ok(Extraction {
        allocation,
        scale,
        units,
        load: optimum,
    })
}
