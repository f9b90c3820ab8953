//! Lower bounds on the three-node shuffle load.
//!
//! Only the closed-form consequences of the converse arguments are computed:
//! the per-allocation pairing bound and three instance-level bounds (pooled
//! storage, cut-set at the smallest node, and the genie-aided cut-set). Their
//! maximum meets the optimum of [`crate::placement_k3::optimal_load`].

use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::model::{derive_profile, Load, Rational, SubsetProfile, SystemConfig};
use crate::placement_k3::{build_placement, K3Params};

/// `2(S1+S2+S3) + ½(S12+S13+S23)`.
pub fn bound_corollary1(profile: &SubsetProfile) -> Load {
    let [s1, s2, s3, s12, s13, s23, _] = profile.k3_tuple();
    let direct = Rational::from_integer((2 * (s1 + s2 + s3)) as i64)
        + Rational::new((s12 + s13 + s23) as i64, 2);
    assert_eq!(direct, bound_corollary1_rewritten(profile), "pairing bound forms disagree");
    Load::new(direct)
}

/// The same bound written through the accounting identities as
/// `3N/2 − M/2 + (S1+S2+S3)`, with `N` and `M` read off the profile.
pub fn bound_corollary1_rewritten(profile: &SubsetProfile) -> Rational {
    let n = profile.total_files() as i64;
    let m = profile.total_storage() as i64;
    Rational::new(3 * n - m, 2) + Rational::from_integer(profile.level(1) as i64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum BoundKind {
    Pooled,
    Cutset,
    Genie,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Pooled => "pooled",
            BoundKind::Cutset => "cutset",
            BoundKind::Genie => "genie",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    /// Only present when the report was built for a concrete allocation.
    pub corollary1: Option<Load>,
    pub pooled: Load,
    pub cutset: Load,
    pub genie: Load,
    pub max_bound: Load,
    /// Instance-level bounds equal to `max_bound`.
    pub active: Vec<BoundKind>,
}

/// Instance-level bounds; negative values clamp to zero.
pub fn lower_bound(cfg: &SystemConfig) -> Result<BoundReport> {
    let p = K3Params::from_config(cfg)?;
    let (m1, n, m) = (p.m1, p.n, p.total());
    let pooled = Load::clamped(
        Rational::new(3 * n - m, 2) + Rational::from_integer((2 * n - m).max(0)),
    );
    let cutset = Load::clamped(Rational::from_integer(n - m1));
    let genie = Load::clamped(Rational::from_integer(3 * n - (m1 + m)));
    let max_bound = pooled.max(cutset).max(genie);
    let active = [
        (BoundKind::Pooled, pooled),
        (BoundKind::Cutset, cutset),
        (BoundKind::Genie, genie),
    ]
    .into_iter()
    .filter(|(_, v)| *v == max_bound)
    .map(|(k, _)| k)
    .collect();
    Ok(BoundReport {
        corollary1: None,
        pooled,
        cutset,
        genie,
        max_bound,
        active,
    })
}

/// Instance bounds plus the pairing bound of a specific allocation profile.
pub fn bound_report_for(cfg: &SystemConfig, profile: &SubsetProfile) -> Result<BoundReport> {
    let mut r = lower_bound(cfg)?;
    r.corollary1 = Some(bound_corollary1(profile));
    Ok(r)
}

/// Instance bounds plus the pairing bound of the regime placement, in units
/// of the original instance.
pub fn bound_report_at_placement(cfg: &SystemConfig) -> Result<BoundReport> {
    let placement = build_placement(cfg)?;
    let mut r = lower_bound(cfg)?;
    r.corollary1 = Some(bound_corollary1(&derive_profile(&placement.allocation)).unscale(placement.scale));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(m: [u64; 3], n: u64) -> SystemConfig {
        SystemConfig::new(m.to_vec(), n).unwrap()
    }

    #[test]
    fn pairing_bound_examples() {
        assert_eq!(bound_corollary1(&SubsetProfile::k3([1, 3, 0, 1, 4, 3, 0])), Load::from_int(12));
        assert_eq!(bound_corollary1(&SubsetProfile::k3([0, 4, 0, 1, 5, 2, 0])), Load::from_int(12));
        assert_eq!(bound_corollary1(&SubsetProfile::k3([0, 0, 0, 0, 0, 0, 9])), Load::zero());
    }

    #[test]
    fn worked_example_bounds() {
        let r = lower_bound(&cfg([6, 7, 7], 12)).unwrap();
        assert_eq!(r.pooled, Load::from_int(12));
        assert_eq!(r.cutset, Load::from_int(6));
        assert_eq!(r.genie, Load::from_int(10));
        assert_eq!(r.max_bound, Load::from_int(12));
        assert_eq!(r.active, vec![BoundKind::Pooled]);
    }

    #[test]
    fn cutset_active_example() {
        let r = lower_bound(&cfg([4, 5, 6], 6)).unwrap();
        assert_eq!(r.pooled, Load::frac(3, 2));
        assert_eq!(r.cutset, Load::from_int(2));
        assert_eq!(r.genie, Load::zero());
        assert_eq!(r.max_bound, Load::from_int(2));
    }

    #[test]
    fn genie_active_example() {
        let r = lower_bound(&cfg([1, 2, 6], 6)).unwrap();
        assert_eq!(r.pooled, Load::frac(15, 2));
        assert_eq!(r.cutset, Load::from_int(5));
        assert_eq!(r.genie, Load::from_int(8));
        assert_eq!(r.max_bound, Load::from_int(8));
        assert_eq!(r.active, vec![BoundKind::Genie]);
    }

    #[test]
    fn report_for_allocation_carries_pairing_bound() {
        let r = bound_report_for(&cfg([6, 7, 7], 12), &SubsetProfile::k3([0, 4, 0, 1, 5, 2, 0]))
            .unwrap();
        assert_eq!(r.corollary1, Some(Load::from_int(12)));
    }

    #[test]
    fn placement_report_in_original_units() {
        let r = bound_report_at_placement(&cfg([2, 2, 2], 3)).unwrap();
        assert_eq!(r.corollary1, Some(Load::frac(3, 2)));
        assert_eq!(r.max_bound, Load::frac(3, 2));
    }
}
