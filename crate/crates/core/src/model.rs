//! Instances, file allocations and subset profiles.
//!
//! Nodes are indexed from 0 internally and displayed 1-based. Files are
//! 1-based everywhere, matching the `[a:b]` interval notation used by the
//! placement recipes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul};

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Largest node count a [`NodeSet`] bitmask can hold.
pub const MAX_NODES: usize = 32;

/// A nonnegative exact communication load, in units of one intermediate value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Load(Rational);

impl Load {
    pub fn zero() -> Self {
        Load(Rational::zero())
    }

    pub fn from_int(v: i64) -> Self {
        Self::new(Rational::from_integer(v))
    }

    /// Panics on a negative value; loads are never negative.
    pub fn new(v: Rational) -> Self {
        assert!(!v.is_negative(), "negative load {v}");
        Load(v)
    }

    /// Clamps negative values to zero.
    pub fn clamped(v: Rational) -> Self {
        if v.is_negative() {
            Self::zero()
        } else {
            Load(v)
        }
    }

    pub fn frac(num: i64, den: i64) -> Self {
        Self::new(Rational::new(num, den))
    }

    pub fn value(self) -> Rational {
        self.0
    }

    pub fn numer(self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(self) -> i64 {
        *self.0.denom()
    }

    pub fn to_f64(self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// Divides by a subpacketization factor.
    pub fn unscale(self, factor: u64) -> Self {
        Load(self.0 / factor as i64)
    }

    /// `num/den` plus a decimal rendering, e.g. `3/2 (1.5)`.
    pub fn describe(self) -> String {
        if self.denom() == 1 {
            format!("{}", self.numer())
        } else {
            format!("{} ({})", self, self.to_f64())
        }
    }
}

impl fmt::Display for Load {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl Add for Load {
    type Output = Load;
    fn add(self, rhs: Load) -> Load {
        Load(self.0 + rhs.0)
    }
}

impl Mul<u64> for Load {
    type Output = Load;
    fn mul(self, rhs: u64) -> Load {
        Load(self.0 * rhs as i64)
    }
}

impl Sum for Load {
    fn sum<I: Iterator<Item = Load>>(iter: I) -> Load {
        iter.fold(Load::zero(), Add::add)
    }
}

impl From<u64> for Load {
    fn from(v: u64) -> Self {
        Load::from_int(v as i64)
    }
}

#[derive(Serialize, Deserialize)]
struct LoadRepr {
    num: i64,
    den: i64,
}

impl Serialize for Load {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LoadRepr {
            num: self.numer(),
            den: self.denom(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Load {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = LoadRepr::deserialize(d)?;
        if r.den == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        let v = Rational::new(r.num, r.den);
        if v.is_negative() {
            return Err(serde::de::Error::custom("negative load"));
        }
        Ok(Load(v))
    }
}

/// Which part of an intermediate value a packet carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Half {
    Whole,
    Lo,
    Hi,
}

impl Half {
    pub fn as_str(self) -> &'static str {
        match self {
            Half::Whole => "whole",
            Half::Lo => "lo",
            Half::Hi => "hi",
        }
    }

    /// Size in units of a full intermediate value.
    pub fn size(self) -> Rational {
        match self {
            Half::Whole => Rational::from_integer(1),
            Half::Lo | Half::Hi => Rational::new(1, 2),
        }
    }
}

/// A set of nodes as a bitmask over 0-based node indices.
///
/// Ordered by size, then lexicographically over the sorted members.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct NodeSet(pub u32);

impl Ord for NodeSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let d = self.0 ^ other.0;
            if d == 0 {
                std::cmp::Ordering::Equal
            } else if self.0 & d & d.wrapping_neg() != 0 {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        })
    }
}

impl PartialOrd for NodeSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl NodeSet {
    /// Builds a set from 1-based node ids.
    pub fn of(nodes: &[usize]) -> Self {
        NodeSet(nodes.iter().fold(0u32, |m, &k| {
            assert!((1..=MAX_NODES).contains(&k), "node id {k} out of range");
            m | (1 << (k - 1))
        }))
    }

    pub fn contains(self, node: usize) -> bool {
        self.0 & (1 << node) != 0
    }

    pub fn insert(&mut self, node: usize) {
        self.0 |= 1 << node;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// 0-based members in increasing order.
    pub fn nodes(self) -> impl Iterator<Item = usize> {
        (0..MAX_NODES).filter(move |&k| self.contains(k))
    }

    /// All nonempty subsets of `{0..k}` ordered by size, then lexicographically.
    pub fn all_nonempty(k: usize) -> Vec<NodeSet> {
        let mut v: Vec<NodeSet> = (1u32..(1u32 << k)).map(NodeSet).collect();
        v.sort();
        v
    }

    /// Applies a relabeling: node `i` becomes `perm[i]`.
    pub fn relabel(self, perm: &[usize]) -> NodeSet {
        let mut out = NodeSet::default();
        for i in self.nodes() {
            out.insert(perm[i]);
        }
        out
    }
}

impl Serialize for NodeSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<usize> = self.nodes().map(|k| k + 1).collect();
        if ids.iter().all(|&k| k < 10) {
            for k in ids {
                write!(f, "{k}")?;
            }
            Ok(())
        } else {
            let s: Vec<String> = ids.iter().map(|k| k.to_string()).collect();
            write!(f, "{{{}}}", s.join(","))
        }
    }
}

/// A validated instance: `K` nodes with storage `M_k` and `N` files.
///
/// Storage is kept in the caller's node order. `sort_permutation` records the
/// ascending order used by the three-node planning paths.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SystemConfig {
    storage: Vec<u64>,
    n: u64,
    sort_perm: Vec<usize>,
}

/// Checks a raw instance and records the ascending storage order.
pub fn validate_config(k: i64, storage: &[i64], n: i64) -> Result<SystemConfig> {
    if k < 2 {
        return Err(Error::BadDimension(format!("K must be at least 2, got {k}")));
    }
    if k as usize > MAX_NODES {
        return Err(Error::BadDimension(format!("K must be at most {MAX_NODES}, got {k}")));
    }
    if storage.len() != k as usize {
        return Err(Error::BadDimension(format!(
            "expected {k} storage sizes, got {}",
            storage.len()
        )));
    }
    if n <= 0 {
        return Err(Error::BadDimension(format!("N must be positive, got {n}")));
    }
    if let Some(bad) = storage.iter().position(|&m| m <= 0) {
        return Err(Error::BadDimension(format!(
            "storage of node {} must be positive, got {}",
            bad + 1,
            storage[bad]
        )));
    }
    let storage: Vec<u64> = storage.iter().map(|&m| m as u64).collect();
    let total: u64 = storage.iter().sum();
    if total < n as u64 {
        return Err(Error::FeasibilityViolation {
            total,
            n: n as u64,
        });
    }
    let mut sort_perm: Vec<usize> = (0..storage.len()).collect();
    sort_perm.sort_by_key(|&i| storage[i]);
    Ok(SystemConfig {
        storage,
        n: n as u64,
        sort_perm,
    })
}

impl SystemConfig {
    pub fn new(storage: Vec<u64>, n: u64) -> Result<Self> {
        let raw: Vec<i64> = storage.iter().map(|&m| m as i64).collect();
        validate_config(raw.len() as i64, &raw, n as i64)
    }

    pub fn k(&self) -> usize {
        self.storage.len()
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn storage(&self) -> &[u64] {
        &self.storage
    }

    /// `M = Σ M_k`.
    pub fn total_storage(&self) -> u64 {
        self.storage.iter().sum()
    }

    /// Storage with each entry capped at `N`; a node cannot hold more than
    /// every file.
    pub fn effective_storage(&self) -> Vec<u64> {
        self.storage.iter().map(|&m| m.min(self.n)).collect()
    }

    /// `sort_permutation()[i]` is the 0-based user index of the `i`-th
    /// smallest node (stable for ties).
    pub fn sort_permutation(&self) -> &[usize] {
        &self.sort_perm
    }

    pub fn is_sorted(&self) -> bool {
        self.sort_perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// The same instance relabeled so storage is ascending.
    pub fn sorted(&self) -> SystemConfig {
        let storage = self.sort_perm.iter().map(|&i| self.storage[i]).collect();
        SystemConfig {
            storage,
            n: self.n,
            sort_perm: (0..self.k()).collect(),
        }
    }

    /// Multiplies every storage size and the file count by `factor`.
    pub fn scaled(&self, factor: u64) -> SystemConfig {
        assert!(factor >= 1);
        SystemConfig {
            storage: self.storage.iter().map(|&m| m * factor).collect(),
            n: self.n * factor,
            sort_perm: self.sort_perm.clone(),
        }
    }

    /// Relabels nodes: user node `i` becomes node `perm[i]`.
    pub fn relabeled(&self, perm: &[usize]) -> SystemConfig {
        let mut storage = vec![0; self.k()];
        for (i, &m) in self.storage.iter().enumerate() {
            storage[perm[i]] = m;
        }
        SystemConfig::new(storage, self.n).expect("relabeling preserves validity")
    }

    pub(crate) fn require_k(&self, k: usize) -> Result<()> {
        if self.k() != k {
            return Err(Error::BadDimension(format!(
                "operation needs K={k}, instance has K={}",
                self.k()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for SystemConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.storage.iter().map(|m| m.to_string()).collect();
        write!(f, "K={} M=({}) N={}", self.k(), m.join(","), self.n)
    }
}

/// `(K, 2M, 2N)`: each file becomes two half-files so that every
/// half-integer segment length of the original becomes integral.
pub fn double_instance(cfg: &SystemConfig) -> SystemConfig {
    cfg.scaled(2)
}

/// Which files each node stores and maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FileAllocation {
    config: SystemConfig,
    sets: Vec<BTreeSet<u64>>,
}

impl FileAllocation {
    /// Validates coverage, file ranges and capacities.
    pub fn new(config: SystemConfig, sets: Vec<BTreeSet<u64>>) -> Result<Self> {
        if sets.len() != config.k() {
            return Err(Error::InvalidAllocation(format!(
                "{} node sets for K={}",
                sets.len(),
                config.k()
            )));
        }
        let n = config.n();
        let mut covered = vec![false; n as usize];
        for (k, set) in sets.iter().enumerate() {
            if set.len() as u64 > config.storage()[k] {
                return Err(Error::InvalidAllocation(format!(
                    "node {} stores {} files, capacity {}",
                    k + 1,
                    set.len(),
                    config.storage()[k]
                )));
            }
            for &f in set {
                if f == 0 || f > n {
                    return Err(Error::InvalidAllocation(format!(
                        "node {} stores file {f} outside 1..={n}",
                        k + 1
                    )));
                }
                covered[(f - 1) as usize] = true;
            }
        }
        if let Some(f) = covered.iter().position(|c| !c) {
            return Err(Error::InvalidAllocation(format!("file {} is stored nowhere", f + 1)));
        }
        Ok(FileAllocation { config, sets })
    }

    /// Convenience constructor from 1-based file lists.
    pub fn from_lists(config: SystemConfig, lists: &[Vec<u64>]) -> Result<Self> {
        Self::new(config, lists.iter().map(|l| l.iter().copied().collect()).collect())
    }

    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    pub fn sets(&self) -> &[BTreeSet<u64>] {
        &self.sets
    }

    /// 0-based node index.
    pub fn stores(&self, node: usize, file: u64) -> bool {
        self.sets[node].contains(&file)
    }

    /// Nodes that store `file`.
    pub fn holders(&self, file: u64) -> NodeSet {
        let mut s = NodeSet::default();
        for (k, set) in self.sets.iter().enumerate() {
            if set.contains(&file) {
                s.insert(k);
            }
        }
        s
    }

    /// Node `i` becomes node `perm[i]`; config follows.
    pub fn relabeled(&self, perm: &[usize]) -> FileAllocation {
        let mut sets = vec![BTreeSet::new(); self.sets.len()];
        for (i, s) in self.sets.iter().enumerate() {
            sets[perm[i]] = s.clone();
        }
        FileAllocation {
            config: self.config.relabeled(perm),
            sets,
        }
    }

    /// The same allocation with one extra file at one node, capacity grown
    /// if needed.
    pub fn with_extra_file(&self, node: usize, file: u64) -> FileAllocation {
        let mut sets = self.sets.clone();
        sets[node].insert(file);
        let mut storage = self.config.storage().to_vec();
        storage[node] = storage[node].max(sets[node].len() as u64);
        let config = SystemConfig::new(storage, self.config.n()).expect("still valid");
        FileAllocation { config, sets }
    }

    pub fn to_doc(&self, regime: Option<String>, load: Load, scale: u64) -> AllocationDoc {
        AllocationDoc {
            k: self.config.k(),
            n: self.config.n(),
            m: self.config.storage().to_vec(),
            allocation: self.sets.iter().map(|s| s.iter().copied().collect()).collect(),
            regime,
            load,
            scale,
        }
    }
}

/// Number of files stored by exactly each nonempty node subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetProfile {
    k: usize,
    counts: BTreeMap<NodeSet, u64>,
}

impl SubsetProfile {
    /// Profile with every nonempty subset present (zeros included).
    pub fn from_counts(k: usize, counts: impl IntoIterator<Item = (NodeSet, u64)>) -> Self {
        let mut map: BTreeMap<NodeSet, u64> =
            NodeSet::all_nonempty(k).into_iter().map(|t| (t, 0)).collect();
        for (t, c) in counts {
            assert!(!t.is_empty() && t.0 < (1 << k), "subset {t} outside K={k}");
            *map.get_mut(&t).unwrap() += c;
        }
        SubsetProfile { k, counts: map }
    }

    /// Three-node profile from `(S1,S2,S3,S12,S13,S23,S123)`.
    pub fn k3(s: [u64; 7]) -> Self {
        let keys = k3_keys();
        Self::from_counts(3, keys.into_iter().zip(s))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, t: NodeSet) -> u64 {
        self.counts.get(&t).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<NodeSet, u64> {
        &self.counts
    }

    /// Σ_T S_T.
    pub fn total_files(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Σ_T |T|·S_T.
    pub fn total_storage(&self) -> u64 {
        self.counts.iter().map(|(t, &c)| t.len() as u64 * c).sum()
    }

    /// Σ_{T∋k} S_T.
    pub fn node_storage(&self, node: usize) -> u64 {
        self.counts
            .iter()
            .filter(|(t, _)| t.contains(node))
            .map(|(_, &c)| c)
            .sum()
    }

    /// Files stored by exactly `j` nodes.
    pub fn level(&self, j: usize) -> u64 {
        self.counts.iter().filter(|(t, _)| t.len() == j).map(|(_, &c)| c).sum()
    }

    /// `(S1,S2,S3,S12,S13,S23,S123)` for a three-node profile.
    pub fn k3_tuple(&self) -> [u64; 7] {
        assert_eq!(self.k, 3);
        let keys = k3_keys();
        std::array::from_fn(|i| self.get(keys[i]))
    }

    /// Node `i` becomes node `perm[i]`.
    pub fn relabeled(&self, perm: &[usize]) -> SubsetProfile {
        Self::from_counts(self.k, self.counts.iter().map(|(t, &c)| (t.relabel(perm), c)))
    }

    /// Lays subsets out as contiguous file ranges in canonical subset order.
    pub fn to_allocation(&self, config: SystemConfig) -> Result<FileAllocation> {
        let mut sets = vec![BTreeSet::new(); self.k];
        let mut next = 1u64;
        for (t, &c) in &self.counts {
            for f in next..next + c {
                for k in t.nodes() {
                    sets[k].insert(f);
                }
            }
            next += c;
        }
        FileAllocation::new(config, sets)
    }
}

impl fmt::Display for SubsetProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .counts
            .iter()
            .map(|(t, c)| format!("S{t}={c}"))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// `{1},{2},{3},{1,2},{1,3},{2,3},{1,2,3}`.
pub fn k3_keys() -> [NodeSet; 7] {
    [
        NodeSet::of(&[1]),
        NodeSet::of(&[2]),
        NodeSet::of(&[3]),
        NodeSet::of(&[1, 2]),
        NodeSet::of(&[1, 3]),
        NodeSet::of(&[2, 3]),
        NodeSet::of(&[1, 2, 3]),
    ]
}

/// Counts files by the exact set of nodes that store them.
pub fn derive_profile(alloc: &FileAllocation) -> SubsetProfile {
    let mut counts: BTreeMap<NodeSet, u64> = BTreeMap::new();
    for f in 1..=alloc.config().n() {
        *counts.entry(alloc.holders(f)).or_default() += 1;
    }
    SubsetProfile::from_counts(alloc.config().k(), counts)
}

/// Serialized form of a placement.
///
/// `K`, `N` and `M` describe the instance the allocation lives on. When the
/// placement needed half-file granularity, that is the doubled instance and
/// `scale` is 2; `load` is then in units of the doubled instance too.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllocationDoc {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "M")]
    pub m: Vec<u64>,
    pub allocation: Vec<Vec<u64>>,
    pub regime: Option<String>,
    pub load: Load,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub scale: u64,
}

fn one() -> u64 {
    1
}

fn is_one(v: &u64) -> bool {
    *v == 1
}

impl AllocationDoc {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Rebuilds and validates the allocation.
    pub fn allocation(&self) -> Result<FileAllocation> {
        if self.m.len() != self.k {
            return Err(Error::BadDimension(format!(
                "K={} but {} storage sizes",
                self.k,
                self.m.len()
            )));
        }
        let raw: Vec<i64> = self.m.iter().map(|&m| m as i64).collect();
        let cfg = validate_config(self.k as i64, &raw, self.n as i64)?;
        FileAllocation::from_lists(cfg, &self.allocation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lopsided() -> FileAllocation {
        let cfg = SystemConfig::new(vec![6, 7, 7], 12).unwrap();
        FileAllocation::from_lists(
            cfg,
            &[
                (1..=6).collect(),
                vec![7, 8, 9, 10, 11, 12, 1],
                (2..=8).collect(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn validate_accepts_worked_example() {
        let cfg = validate_config(3, &[6, 7, 7], 12).unwrap();
        assert_eq!(cfg.total_storage(), 20);
    }

    #[test]
    fn validate_rejects_too_little_storage() {
        assert_eq!(
            validate_config(3, &[1, 1, 1], 4),
            Err(Error::FeasibilityViolation { total: 3, n: 4 })
        );
    }

    #[test]
    fn validate_rejects_bad_dimensions() {
        assert_eq!(validate_config(1, &[5], 3).unwrap_err().name(), "BadDimension");
        assert_eq!(validate_config(3, &[5, 0, 5], 3).unwrap_err().name(), "BadDimension");
        assert_eq!(validate_config(3, &[5, 5, 5], 0).unwrap_err().name(), "BadDimension");
        assert_eq!(validate_config(3, &[5, 5], 3).unwrap_err().name(), "BadDimension");
    }

    #[test]
    fn validate_records_sort_permutation() {
        let cfg = validate_config(3, &[7, 6, 7], 12).unwrap();
        assert_eq!(cfg.sorted().storage(), &[6, 7, 7]);
        let one_based: Vec<usize> = cfg.sort_permutation().iter().map(|i| i + 1).collect();
        assert_eq!(one_based, vec![2, 1, 3]);
        assert!(!cfg.is_sorted());
    }

    #[test]
    fn profile_of_lopsided_allocation() {
        let p = derive_profile(&lopsided());
        assert_eq!(p.k3_tuple(), [0, 4, 0, 1, 5, 2, 0]);
    }

    #[test]
    fn profile_of_balanced_allocation() {
        let cfg = SystemConfig::new(vec![6, 7, 7], 12).unwrap();
        let alloc = FileAllocation::from_lists(
            cfg,
            &[
                (1..=6).collect(),
                vec![7, 8, 9, 10, 11, 12, 1],
                vec![2, 4, 5, 6, 7, 8, 9],
            ],
        )
        .unwrap();
        assert_eq!(derive_profile(&alloc).k3_tuple(), [1, 3, 0, 1, 4, 3, 0]);
    }

    #[test]
    fn profile_of_full_replication() {
        let cfg = SystemConfig::new(vec![5, 5, 5], 5).unwrap();
        let all: Vec<u64> = (1..=5).collect();
        let alloc = FileAllocation::from_lists(cfg, &[all.clone(), all.clone(), all]).unwrap();
        assert_eq!(derive_profile(&alloc).k3_tuple(), [0, 0, 0, 0, 0, 0, 5]);
    }

    #[test]
    fn doubling_scales_storage_and_files() {
        let d = double_instance(&SystemConfig::new(vec![2, 2, 2], 3).unwrap());
        assert_eq!((d.storage(), d.n()), (&[4u64, 4, 4][..], 6));
        let d = double_instance(&SystemConfig::new(vec![6, 7, 7], 12).unwrap());
        assert_eq!((d.storage(), d.n()), (&[12u64, 14, 14][..], 24));
    }

    #[test]
    fn allocation_rejects_uncovered_and_overfull() {
        let cfg = SystemConfig::new(vec![2, 2, 2], 5).unwrap();
        let err = FileAllocation::from_lists(cfg.clone(), &[vec![1, 2], vec![3, 4], vec![1, 2]]);
        assert!(matches!(err, Err(Error::InvalidAllocation(_))));
        let err = FileAllocation::from_lists(cfg, &[vec![1, 2, 3], vec![4], vec![5]]);
        assert!(matches!(err, Err(Error::InvalidAllocation(_))));
    }

    #[test]
    fn doc_round_trips() {
        let alloc = lopsided();
        let doc = alloc.to_doc(Some("R2".into()), Load::from_int(13), 1);
        let json = doc.to_json();
        assert!(json.contains("\"load\""));
        assert!(!json.contains("scale"));
        let back = AllocationDoc::from_json(&json).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.allocation().unwrap(), alloc);
    }

    #[test]
    fn load_formatting() {
        assert_eq!(Load::frac(3, 2).to_string(), "3/2");
        assert_eq!(Load::from_int(12).to_string(), "12");
        assert_eq!(Load::clamped(Rational::from_integer(-4)), Load::zero());
    }

    #[test]
    fn node_set_display() {
        assert_eq!(NodeSet::of(&[1, 2, 3]).to_string(), "123");
        assert_eq!(NodeSet::of(&[2, 11]).to_string(), "{2,11}");
        let order: Vec<String> = NodeSet::all_nonempty(3).iter().map(|t| t.to_string()).collect();
        assert_eq!(order, ["1", "2", "3", "12", "13", "23", "123"]);
    }
}
