//! Brute-force minimum load for three nodes.
//!
//! The grouped XOR load depends on an allocation only through its subset
//! profile, so the main search runs over the seven cardinalities constrained
//! by the per-node and total accounting equations. A labeled search over raw
//! allocations is kept for cross-checking on tiny instances.
//!
//! Allocations are exact-capacity (`|M_k| = min(M_k, N)`): adding a file to a
//! node never raises the grouped XOR load, so nothing is lost.

use crate::coding_k3::g;
use crate::error::{Error, Result};
use crate::model::{double_instance, FileAllocation, Load, SubsetProfile, SystemConfig};
use crate::placement_k3::optimal_load;

pub const DEFAULT_BUDGET: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    /// Minimum over half-file granularity, in units of the original instance.
    pub min: Load,
    /// Argmin profile and allocation on the doubled instance.
    pub profile: SubsetProfile,
    pub witness: FileAllocation,
    pub scale: u64,
    /// Profiles that satisfied the accounting equations.
    pub feasible_profiles: u64,
}

fn profile_load(s: [u64; 7]) -> Load {
    Load::from(2 * (s[0] + s[1] + s[2])) + g(s[3], s[4], s[5])
}

/// Upper bound on loop iterations of [`min_load_profiles`].
pub fn profile_search_size(cfg: &SystemConfig) -> u128 {
    let c: Vec<u128> = cfg.effective_storage().iter().map(|&m| m as u128).collect();
    let m123 = c[0].min(c[1]).min(c[2]);
    (m123 + 1) * (c[0].min(c[1]) + 1) * (c[0].min(c[2]) + 1) * (c[1].min(c[2]) + 1)
}

/// Minimum grouped XOR load over all integral subset profiles of `cfg`
/// (whole-file granularity, no doubling).
pub fn min_load_profiles(cfg: &SystemConfig, budget: u128) -> Result<(Load, SubsetProfile, u64)> {
    cfg.require_k(3)?;
    let required = profile_search_size(cfg);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let c = cfg.effective_storage();
    let n = cfg.n();
    let mut best: Option<(Load, [u64; 7])> = None;
    let mut feasible = 0u64;
    for s123 in 0..=c[0].min(c[1]).min(c[2]) {
        for s12 in 0..=(c[0].min(c[1]) - s123) {
            for s13 in 0..=(c[0] - s123 - s12).min(c[2] - s123) {
                let (r1, r2, r3) = (c[0] - s123 - s12 - s13, c[1] - s123 - s12, c[2] - s123 - s13);
                for s23 in 0..=r2.min(r3) {
                    let s = [r1, r2 - s23, r3 - s23, s12, s13, s23, s123];
                    if s.iter().sum::<u64>() != n {
                        continue;
                    }
                    feasible += 1;
                    let load = profile_load(s);
                    if best.is_none_or(|(b, _)| load < b) {
                        best = Some((load, s));
                    }
                }
            }
        }
    }
    let (load, s) = best.ok_or_else(|| {
        Error::InternalContradiction(format!("no exact-capacity profile for {cfg}"))
    })?;
    Ok((load, SubsetProfile::k3(s), feasible))
}

/// Exact minimum at half-file granularity: profile search on the doubled
/// instance, halved.
pub fn min_load_bruteforce(cfg: &SystemConfig, budget: u128) -> Result<OracleResult> {
    let doubled = double_instance(cfg);
    let (load, profile, feasible_profiles) = min_load_profiles(&doubled, budget)?;
    let witness = profile.to_allocation(doubled)?;
    Ok(OracleResult {
        min: load.unscale(2),
        profile,
        witness,
        scale: 2,
        feasible_profiles,
    })
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Next bitmask with the same popcount (Gosper's hack).
fn next_combination(x: u64) -> u64 {
    let c = x & x.wrapping_neg();
    let r = x + c;
    (((r ^ x) >> 2) / c) | r
}

fn combinations(n: u64, k: u64) -> impl Iterator<Item = u64> {
    let first = if k == 0 { 0 } else { (1u64 << k) - 1 };
    let limit = 1u64 << n;
    std::iter::successors(Some(first), move |&x| {
        if x == 0 {
            return None;
        }
        let nx = next_combination(x);
        (nx < limit).then_some(nx)
    })
}

/// Minimum over all labeled exact-capacity allocations (whole files).
pub fn min_load_raw(cfg: &SystemConfig, budget: u128) -> Result<(Load, FileAllocation)> {
    cfg.require_k(3)?;
    let n = cfg.n();
    if n > 40 {
        return Err(Error::TooLarge {
            what: "labeled file count".into(),
            count: n as u128,
            cap: 40,
        });
    }
    let c = cfg.effective_storage();
    let required: u128 = c.iter().map(|&m| binomial(n, m)).product();
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let full = (1u64 << n) - 1;
    let mut best: Option<(Load, [u64; 3])> = None;
    for a in combinations(n, c[0]) {
        for b in combinations(n, c[1]) {
            for d in combinations(n, c[2]) {
                if a | b | d != full {
                    continue;
                }
                let pc = |x: u64| x.count_ones() as u64;
                let s = [
                    pc(a & !b & !d),
                    pc(b & !a & !d),
                    pc(d & !a & !b),
                    pc(a & b & !d),
                    pc(a & d & !b),
                    pc(b & d & !a),
                    pc(a & b & d),
                ];
                let load = profile_load(s);
                if best.is_none_or(|(l, _)| load < l) {
                    best = Some((load, [a, b, d]));
                }
            }
        }
    }
    let (load, masks) = best
        .ok_or_else(|| Error::InternalContradiction(format!("no covering allocation for {cfg}")))?;
    let lists: Vec<Vec<u64>> = masks
        .iter()
        .map(|&m| (1..=n).filter(|f| m & (1 << (f - 1)) != 0).collect())
        .collect();
    Ok((load, FileAllocation::from_lists(cfg.clone(), &lists)?))
}

/// Whether the brute-force minimum equals the closed-form optimum.
pub fn verify_theorem(cfg: &SystemConfig) -> Result<bool> {
    Ok(min_load_bruteforce(cfg, DEFAULT_BUDGET)?.min == optimal_load(cfg)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding_k3::achievable_load;
    use crate::model::derive_profile;

    fn cfg(m: [u64; 3], n: u64) -> SystemConfig {
        SystemConfig::new(m.to_vec(), n).unwrap()
    }

    #[test]
    fn worked_example_minimum() {
        let r = min_load_bruteforce(&cfg([6, 7, 7], 12), DEFAULT_BUDGET).unwrap();
        assert_eq!(r.min, Load::from_int(12));
        assert_eq!(achievable_load(&r.witness).unwrap(), Load::from_int(24));
        assert_eq!(derive_profile(&r.witness), r.profile);
    }

    #[test]
    fn half_integer_minimum() {
        let r = min_load_bruteforce(&cfg([2, 2, 2], 3), DEFAULT_BUDGET).unwrap();
        assert_eq!(r.min, Load::frac(3, 2));
    }

    #[test]
    fn forced_partition() {
        let r = min_load_bruteforce(&cfg([1, 1, 1], 3), DEFAULT_BUDGET).unwrap();
        assert_eq!(r.min, Load::from_int(6));
        assert_eq!(r.feasible_profiles, 1);
    }

    #[test]
    fn theorem_holds_on_examples() {
        assert!(verify_theorem(&cfg([6, 7, 7], 12)).unwrap());
        assert!(verify_theorem(&cfg([5, 5, 5], 6)).unwrap());
    }

    #[test]
    fn budget_is_enforced() {
        let err = min_load_bruteforce(&cfg([6, 7, 7], 12), 10).unwrap_err();
        match err {
            Error::BudgetExceeded { required, budget } => {
                assert_eq!(budget, 10);
                assert_eq!(required, profile_search_size(&cfg([12, 14, 14], 24)));
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn raw_and_profile_search_agree_small() {
        for n in 1..=5u64 {
            for m1 in 1..=n {
                for m2 in m1..=n {
                    for m3 in m2..=n {
                        if m1 + m2 + m3 < n {
                            continue;
                        }
                        let c = cfg([m1, m2, m3], n);
                        let (raw, _) = min_load_raw(&c, u128::MAX).unwrap();
                        let (prof, _, _) = min_load_profiles(&c, u128::MAX).unwrap();
                        assert_eq!(raw, prof, "{c}");
                    }
                }
            }
        }
    }

    #[test]
    fn raw_search_on_doubled_tiny_instance() {
        let c = cfg([2, 2, 2], 3);
        let (raw, _) = min_load_raw(&double_instance(&c), u128::MAX).unwrap();
        assert_eq!(raw.unscale(2), Load::frac(3, 2));
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).count(), 10);
        assert_eq!(combinations(4, 4).count(), 1);
        assert_eq!(binomial(12, 6), 924);
    }
}
