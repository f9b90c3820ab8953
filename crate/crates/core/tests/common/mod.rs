#![allow(dead_code)]

use std::collections::BTreeSet;

use hetcdc::{FileAllocation, SystemConfig};
use rand::Rng;

/// Random three-node allocation: every file goes to a uniformly random
/// nonempty holder set, an empty node then receives one random file, and
/// storage sizes are read off the result.
pub fn random_allocation<R: Rng>(rng: &mut R, n: u64) -> FileAllocation {
    let mut sets = vec![BTreeSet::new(); 3];
    for f in 1..=n {
        let mask: u32 = rng.gen_range(1..8);
        for (k, set) in sets.iter_mut().enumerate() {
            if mask & (1 << k) != 0 {
                set.insert(f);
            }
        }
    }
    for set in sets.iter_mut() {
        if set.is_empty() {
            set.insert(rng.gen_range(1..=n));
        }
    }
    let m = sets.iter().map(|s| s.len() as u64).collect();
    FileAllocation::new(SystemConfig::new(m, n).unwrap(), sets).unwrap()
}

/// Sorted grid `1 <= M1 <= M2 <= M3 <= N <= n_max`, `M >= N`.
pub fn sorted_grid(n_max: u64) -> Vec<SystemConfig> {
    hetcdc::cli::sweep_grid(n_max)
        .into_iter()
        .map(|(m, n)| SystemConfig::new(m.to_vec(), n).unwrap())
        .collect()
}
