//! Optimal three-node placements.
//!
//! Every instance falls into one of seven regimes determined by
//! `M1+M2 ≶ N`, `M ≶ 2N` and `M3 ≶ N+M1−M2` (storage sorted ascending). Each
//! regime has a closed-form minimum load and an interval placement that
//! achieves it with the grouped XOR plan of [`crate::coding_k3`].
//!
//! Storage sizes above `N` are capped at `N` before any of this applies.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{double_instance, FileAllocation, Load, Rational, SubsetProfile, SystemConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RegimeId {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
}

impl RegimeId {
    pub const ALL: [RegimeId; 7] = [
        RegimeId::R1,
        RegimeId::R2,
        RegimeId::R3,
        RegimeId::R4,
        RegimeId::R5,
        RegimeId::R6,
        RegimeId::R7,
    ];
}

impl fmt::Display for RegimeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for RegimeId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        RegimeId::ALL
            .into_iter()
            .find(|r| r.to_string() == s)
            .ok_or_else(|| Error::Parse(format!("unknown regime {s:?}")))
    }
}

/// Sorted, capped three-node parameters as signed integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct K3Params {
    pub m1: i64,
    pub m2: i64,
    pub m3: i64,
    pub n: i64,
}

impl K3Params {
    pub fn from_config(cfg: &SystemConfig) -> Result<Self> {
        cfg.require_k(3)?;
        let mut m = cfg.effective_storage();
        m.sort_unstable();
        Ok(K3Params {
            m1: m[0] as i64,
            m2: m[1] as i64,
            m3: m[2] as i64,
            n: cfg.n() as i64,
        })
    }

    pub fn total(&self) -> i64 {
        self.m1 + self.m2 + self.m3
    }
}

fn classify_params(p: K3Params) -> RegimeId {
    let K3Params { m1, m2, m3, n } = p;
    let m = p.total();
    let unbalanced = m3 > n + m1 - m2;
    if m1 + m2 <= n {
        if unbalanced {
            RegimeId::R4
        } else {
            RegimeId::R1
        }
    } else if m <= 2 * n {
        if unbalanced {
            RegimeId::R5
        } else if m3 <= 3 * n - m1 - 3 * m2 {
            RegimeId::R2
        } else {
            RegimeId::R3
        }
    } else if unbalanced {
        RegimeId::R7
    } else {
        RegimeId::R6
    }
}

/// Membership predicate of each regime exactly as the set definitions read
/// (R2 without the placement threshold, so R2 and R3 may overlap).
pub fn regime_predicate(regime: RegimeId, p: K3Params) -> bool {
    let K3Params { m1, m2, m3, n } = p;
    let m = p.total();
    match regime {
        RegimeId::R1 => m1 + m2 <= n && m3 <= n + m1 - m2,
        RegimeId::R2 => m <= 2 * n && m1 + m2 > n && m3 <= n + m1 - m2,
        RegimeId::R3 => {
            m <= 2 * n && m1 + m2 > n && n + m1 - m2 >= m3 && m3 > 3 * n - m1 - 3 * m2
        }
        RegimeId::R4 => m1 + m2 <= n && m3 > n + m1 - m2,
        RegimeId::R5 => m <= 2 * n && m1 + m2 > n && m3 > n + m1 - m2,
        RegimeId::R6 => m > 2 * n && m3 <= n + m1 - m2,
        RegimeId::R7 => m > 2 * n && m3 > n + m1 - m2,
    }
}

/// Regime of a three-node instance. Overlapping R2/R3 instances go to R2
/// iff `M3 <= 3N − M1 − 3M2`.
pub fn classify_regime(cfg: &SystemConfig) -> Result<RegimeId> {
    Ok(classify_params(K3Params::from_config(cfg)?))
}

fn optimal_for(regime: RegimeId, p: K3Params) -> Rational {
    let K3Params { m1, n, .. } = p;
    let m = p.total();
    match regime {
        RegimeId::R1 | RegimeId::R2 | RegimeId::R3 => Rational::new(7 * n - 3 * m, 2),
        RegimeId::R4 | RegimeId::R5 => Rational::from_integer(3 * n - (m1 + m)),
        RegimeId::R6 => Rational::new(3 * n - m, 2),
        RegimeId::R7 => Rational::from_integer(n - m1),
    }
}

/// Minimum communication load of a three-node instance.
pub fn optimal_load(cfg: &SystemConfig) -> Result<Load> {
    let p = K3Params::from_config(cfg)?;
    Ok(Load::new(optimal_for(classify_params(p), p)))
}

/// Segment lengths of a regime's placement picture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SegmentLayout {
    pub regime: RegimeId,
    pub lengths: [u64; 4],
    /// True when the lengths refer to the doubled instance.
    pub doubled: bool,
}

fn lengths_for(regime: RegimeId, p: K3Params) -> [Rational; 4] {
    let K3Params { m1, m2, m3, n } = p;
    let m = p.total();
    let int = Rational::from_integer;
    let half = |v: i64| Rational::new(v, 2);
    match regime {
        RegimeId::R1 => [
            int(m1) - half(m - n),
            half(m - n),
            int(m2) - half(m - n),
            int(n - m1 - m2),
        ],
        RegimeId::R4 => [int(m1), int(m2 + m3 - n), int(n - m3), int(n - m1 - m2)],
        RegimeId::R2 => {
            let a = m1 + m2 - n;
            [
                int(a),
                int(m1 - 2 * a) - half(m3 - a),
                half(m3 - a),
                int(n - m1) - half(m3 - a),
            ]
        }
        RegimeId::R3 => {
            let l1 = half(m - n) - int(n - m2);
            [
                l1,
                half(m - n) - int(m2 + m3 - n),
                int(m2 + m3 - n) - l1,
                int(2 * n - m),
            ]
        }
        RegimeId::R5 => [
            int(m1 + m2 - n),
            int(n - m2),
            int(m2 + m3 - n - m1),
            int(2 * n - m),
        ],
        RegimeId::R6 | RegimeId::R7 => [int(m - 2 * n), int(n - m3), int(n - m2), int(n - m1)],
    }
}

fn to_lengths(regime: RegimeId, vals: [Rational; 4], doubled: bool) -> Result<SegmentLayout> {
    let mut lengths = [0u64; 4];
    for (i, v) in vals.iter().enumerate() {
        if *v < Rational::from_integer(0) {
            return Err(Error::InternalContradiction(format!(
                "{regime}: segment {} has negative length {v}",
                i + 1
            )));
        }
        lengths[i] = v.to_integer() as u64;
    }
    Ok(SegmentLayout {
        regime,
        lengths,
        doubled,
    })
}

/// Evaluates the regime's segment lengths, switching to the doubled
/// instance when any length is fractional.
pub fn segment_lengths(cfg: &SystemConfig, regime: RegimeId) -> Result<SegmentLayout> {
    let p = K3Params::from_config(cfg)?;
    let vals = lengths_for(regime, p);
    if vals.iter().all(|v| v.is_integer()) {
        return to_lengths(regime, vals, false);
    }
    let d = K3Params::from_config(&double_instance(cfg))?;
    let vals = lengths_for(regime, d);
    if !vals.iter().all(|v| v.is_integer()) {
        return Err(Error::InternalContradiction(format!(
            "{regime}: lengths still fractional after doubling"
        )));
    }
    to_lengths(regime, vals, true)
}

/// Inclusive 1-based interval `[a:b]`; empty when `b < a`.
fn iv(a: i64, b: i64) -> impl Iterator<Item = u64> {
    (a.max(1)..=b).map(|f| f as u64)
}

fn intervals_for(regime: RegimeId, p: K3Params) -> [BTreeSet<u64>; 3] {
    let K3Params { m1, m2, m3, n } = p;
    let m = p.total();
    let a = m1 + m2 - n;
    let node1: BTreeSet<u64> = iv(1, m1).collect();
    match regime {
        RegimeId::R1 => {
            let h = (m - n) / 2;
            [
                node1,
                iv(m1 + 1, m1 + m2).collect(),
                iv(m1 + m2 + 1, n).chain(iv(m1 - h + 1, m1 + h)).collect(),
            ]
        }
        RegimeId::R4 => [
            node1,
            iv(m1 + 1, m1 + m2).collect(),
            iv(m1 + m2 + 1, n).chain(iv(1, m - n)).collect(),
        ],
        RegimeId::R2 => {
            let h = (m3 - a) / 2;
            [
                node1,
                iv(m1 + 1, n).chain(iv(1, a)).collect(),
                iv(a + 1, 2 * a).chain(iv(m1 - h + 1, m1 + h)).collect(),
            ]
        }
        RegimeId::R3 | RegimeId::R5 => [
            node1,
            iv(m1 + 1, n).chain(iv(1, a)).collect(),
            iv(a + 1, m - n).collect(),
        ],
        RegimeId::R6 | RegimeId::R7 => [
            node1,
            iv(m1 + 1, n).chain(iv(1, a)).collect(),
            iv(a + 1, n).chain(iv(1, m - 2 * n)).collect(),
        ],
    }
}

/// The subset cardinalities each regime's placement is known to produce,
/// as `(S1,S2,S3,S12,S13,S23,S123)` on sorted labels.
pub fn published_profile(regime: RegimeId, p: K3Params) -> Option<[i64; 7]> {
    let K3Params { m1, m2, m3, n } = p;
    let m = p.total();
    let a = m1 + m2 - n;
    let v = match regime {
        RegimeId::R1 => {
            if (m - n) % 2 != 0 {
                return None;
            }
            let h = (m - n) / 2;
            [m1 - h, m2 - h, n - m1 - m2, 0, h, h, 0]
        }
        RegimeId::R4 => [0, n - m3, n - m1 - m2, 0, m1, m2 + m3 - n, 0],
        RegimeId::R2 => {
            if (m3 - a) % 2 != 0 {
                return None;
            }
            let h = (m3 - a) / 2;
            [m1 - 2 * a - h, n - m1 - h, 0, a, a + h, h, 0]
        }
        RegimeId::R3 | RegimeId::R5 => [0, 2 * n - m, 0, a, n - m2, m2 + m3 - n, 0],
        RegimeId::R6 | RegimeId::R7 => [0, 0, 0, n - m3, n - m2, n - m1, m - 2 * n],
    };
    Some(v)
}

/// A placement together with how it relates to the requested instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Placement {
    pub regime: RegimeId,
    pub layout: SegmentLayout,
    /// Allocation in the caller's node order; on the doubled instance when
    /// `scale` is 2.
    pub allocation: FileAllocation,
    pub scale: u64,
}

/// Builds the regime's interval placement. Node labels follow the caller's
/// order; internally the recipe runs on ascending storage.
pub fn build_placement(cfg: &SystemConfig) -> Result<Placement> {
    let regime = classify_regime(cfg)?;
    let layout = segment_lengths(cfg, regime)?;
    let scale = if layout.doubled { 2 } else { 1 };
    let work = cfg.scaled(scale);
    let p = K3Params::from_config(&work)?;
    let sorted_sets = intervals_for(regime, p);

    // Sorted position i is user node perm[i].
    let perm = cfg.sort_permutation();
    let mut sets = vec![BTreeSet::new(); 3];
    for (i, s) in sorted_sets.into_iter().enumerate() {
        sets[perm[i]] = s;
    }
    let allocation = FileAllocation::new(work, sets).map_err(|e| {
        Error::InternalContradiction(format!("{regime} placement is invalid: {e}"))
    })?;
    Ok(Placement {
        regime,
        layout,
        allocation,
        scale,
    })
}

/// Profile of a placement read back on sorted labels.
pub fn sorted_profile(placement: &Placement) -> SubsetProfile {
    let alloc = &placement.allocation;
    let perm = alloc.config().sort_permutation().to_vec();
    // user node perm[i] -> sorted position i
    let mut inv = vec![0; 3];
    for (i, &u) in perm.iter().enumerate() {
        inv[u] = i;
    }
    crate::model::derive_profile(alloc).relabeled(&inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding_k3::achievable_load;

    fn cfg(m: [u64; 3], n: u64) -> SystemConfig {
        SystemConfig::new(m.to_vec(), n).unwrap()
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_regime(&cfg([6, 7, 7], 12)).unwrap(), RegimeId::R2);
        assert_eq!(classify_regime(&cfg([4, 5, 6], 6)).unwrap(), RegimeId::R7);
        assert_eq!(classify_regime(&cfg([2, 2, 2], 6)).unwrap(), RegimeId::R1);
        assert_eq!(classify_regime(&cfg([1, 2, 6], 6)).unwrap(), RegimeId::R4);
    }

    #[test]
    fn optimal_load_examples() {
        assert_eq!(optimal_load(&cfg([6, 7, 7], 12)).unwrap(), Load::from_int(12));
        assert_eq!(optimal_load(&cfg([5, 5, 5], 6)).unwrap(), Load::frac(3, 2));
        assert_eq!(optimal_load(&cfg([4, 5, 6], 6)).unwrap(), Load::from_int(2));
        assert_eq!(optimal_load(&cfg([4, 4, 4], 6)).unwrap(), Load::from_int(3));
    }

    #[test]
    fn doubling_doubles_the_optimum() {
        let c = cfg([5, 5, 5], 6);
        let d = double_instance(&c);
        assert_eq!(optimal_load(&d).unwrap(), Load::from_int(3));
        assert_eq!(optimal_load(&d).unwrap(), optimal_load(&c).unwrap() * 2);
    }

    #[test]
    fn segment_examples() {
        let s = segment_lengths(&cfg([6, 7, 7], 12), RegimeId::R2).unwrap();
        assert_eq!((s.lengths, s.doubled), ([1, 1, 3, 3], false));
        let s = segment_lengths(&cfg([2, 2, 2], 6), RegimeId::R1).unwrap();
        assert_eq!((s.lengths, s.doubled), ([2, 0, 2, 2], false));
        let s = segment_lengths(&cfg([4, 5, 6], 6), RegimeId::R7).unwrap();
        assert_eq!((s.lengths, s.doubled), ([3, 0, 1, 2], false));
    }

    #[test]
    fn negative_segment_is_reported() {
        // R2 recipe applied outside its region.
        let err = segment_lengths(&cfg([4, 5, 6], 6), RegimeId::R2).unwrap_err();
        assert_eq!(err.name(), "InternalContradiction");
    }

    #[test]
    fn worked_example_placement() {
        let p = build_placement(&cfg([6, 7, 7], 12)).unwrap();
        assert_eq!(p.scale, 1);
        assert_eq!(sorted_profile(&p).k3_tuple(), [1, 3, 0, 1, 4, 3, 0]);
        assert_eq!(achievable_load(&p.allocation).unwrap(), Load::from_int(12));
    }

    #[test]
    fn r1_placement_without_pairs() {
        let p = build_placement(&cfg([2, 2, 2], 6)).unwrap();
        assert_eq!(sorted_profile(&p).k3_tuple(), [2, 2, 2, 0, 0, 0, 0]);
        assert_eq!(achievable_load(&p.allocation).unwrap(), Load::from_int(12));
    }

    #[test]
    fn placement_respects_user_order() {
        let c = cfg([7, 6, 7], 12);
        let p = build_placement(&c).unwrap();
        assert_eq!(p.allocation.sets()[0].len(), 7);
        assert_eq!(p.allocation.sets()[1].len(), 6);
        assert_eq!(achievable_load(&p.allocation).unwrap(), Load::from_int(12));
    }

    #[test]
    fn half_integer_instance_is_doubled() {
        let p = build_placement(&cfg([5, 5, 5], 6)).unwrap();
        assert_eq!(p.regime, RegimeId::R6);
        assert_eq!(p.scale, 1);
        let p = build_placement(&cfg([2, 2, 3], 6)).unwrap();
        assert_eq!(p.regime, RegimeId::R1);
        assert_eq!(p.scale, 2);
        assert_eq!(
            achievable_load(&p.allocation).unwrap(),
            optimal_load(&cfg([2, 2, 3], 6)).unwrap() * 2
        );
    }

    #[test]
    fn homogeneous_reduction() {
        for (r, want) in [(1, 24), (2, 6), (3, 0)] {
            let m = r * 12 / 3;
            assert_eq!(optimal_load(&cfg([m, m, m], 12)).unwrap(), Load::from_int(want));
        }
    }

    #[test]
    fn storage_beyond_n_is_capped() {
        assert_eq!(optimal_load(&cfg([2, 9, 30], 6)).unwrap(), optimal_load(&cfg([2, 6, 6], 6)).unwrap());
        build_placement(&cfg([2, 9, 30], 6)).unwrap();
    }

    #[test]
    fn regime_names_parse() {
        for r in RegimeId::ALL {
            assert_eq!(r.to_string().parse::<RegimeId>().unwrap(), r);
        }
        assert!("R8".parse::<RegimeId>().is_err());
    }
}
