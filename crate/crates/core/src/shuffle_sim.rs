//! Byte-level Map / Shuffle / Reduce round.
//!
//! One reduce function per node (`Q = K`): node `k` wants `v_{k,n}` for every
//! file. Intermediate values are synthetic bytes derived from
//! `(seed, q, n)`. Packets are materialized as real XORs, broadcast, and
//! peeled at each node; the reduce step hashes the recovered values.

use std::collections::HashMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::coding_k3::{CodedPacket, ShufflePlan};
use crate::error::{Error, Result};
use crate::model::{FileAllocation, Half, Load, SystemConfig};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimConfig {
    pub cfg: SystemConfig,
    pub t_bytes: usize,
    pub seed: u64,
}

impl SimConfig {
    /// `t_bytes` must be even and at least 2 so halves are exact.
    pub fn new(cfg: SystemConfig, t_bytes: usize, seed: u64) -> Result<Self> {
        if t_bytes < 2 || !t_bytes.is_multiple_of(2) {
            return Err(Error::BadDimension(format!(
                "value size must be an even number of bytes >= 2, got {t_bytes}"
            )));
        }
        Ok(SimConfig { cfg, t_bytes, seed })
    }
}

/// Deterministic bytes of `v_{q,n}` (1-based `q` and `n`).
pub fn value_bytes(seed: u64, q: usize, n: u64, t_bytes: usize) -> Vec<u8> {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(q as u64).to_le_bytes());
    key[16..24].copy_from_slice(&n.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    let mut out = vec![0u8; t_bytes];
    rng.fill_bytes(&mut out);
    out
}

/// Values one node computed in the Map phase, keyed by `(q, n)`.
#[derive(Clone, Debug, Default)]
pub struct NodeStore {
    values: HashMap<(usize, u64), Vec<u8>>,
}

impl NodeStore {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, q: usize, n: u64) -> Option<&[u8]> {
        self.values.get(&(q, n)).map(Vec::as_slice)
    }
}

fn segment(bytes: &[u8], half: Half) -> &[u8] {
    let mid = bytes.len() / 2;
    match half {
        Half::Whole => bytes,
        Half::Lo => &bytes[..mid],
        Half::Hi => &bytes[mid..],
    }
}

fn xor_into(acc: &mut [u8], other: &[u8]) {
    for (a, b) in acc.iter_mut().zip(other) {
        *a ^= b;
    }
}

/// Map phase: node `k` computes all `K` values of each file it stores.
pub fn run_map(sim: &SimConfig, alloc: &FileAllocation) -> Vec<NodeStore> {
    let k = alloc.config().k();
    alloc
        .sets()
        .iter()
        .map(|files| {
            let mut store = NodeStore::default();
            for &n in files {
                for q in 1..=k {
                    store
                        .values
                        .insert((q, n), value_bytes(sim.seed, q, n, sim.t_bytes));
                }
            }
            store
        })
        .collect()
}

/// Builds each packet's payload from its sender's store.
pub fn encode_packets(sim: &SimConfig, stores: &[NodeStore], plan: &ShufflePlan) -> Result<Vec<Vec<u8>>> {
    plan.packets
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let len = if p.xor[0].half == Half::Whole {
                sim.t_bytes
            } else {
                sim.t_bytes / 2
            };
            let mut payload = vec![0u8; len];
            let store = stores.get(p.sender - 1).ok_or_else(|| {
                Error::InvalidAllocation(format!("packet {i}: unknown sender {}", p.sender))
            })?;
            for s in &p.xor {
                let v = store.get(s.target, s.file).ok_or_else(|| {
                    Error::InvalidAllocation(format!(
                        "packet {i}: sender {} lacks file {}",
                        p.sender, s.file
                    ))
                })?;
                let seg = segment(v, s.half);
                if seg.len() != len {
                    return Err(Error::InvalidAllocation(format!("packet {i} mixes sizes")));
                }
                xor_into(&mut payload, seg);
            }
            Ok(payload)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimReport {
    pub success: bool,
    pub measured_load: Load,
    /// Desired values each node holds byte-exactly after the round.
    pub per_node_recovered: Vec<u64>,
    pub bytes_on_wire: u64,
    pub t_bytes: usize,
    /// SHA-256 of each node's recovered `v_{k,1..N}`, in file order.
    pub reduce_digests: Vec<String>,
}

impl SimReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// Shuffle receive side and Reduce: every node peels the delivered packets
/// (in the given order, repeated until no progress) and checks its values.
pub fn reduce(
    sim: &SimConfig,
    alloc: &FileAllocation,
    stores: &[NodeStore],
    deliveries: &[(CodedPacket, Vec<u8>)],
) -> Result<SimReport> {
    let k = alloc.config().k();
    let n = alloc.config().n();
    let mut mismatches = Vec::new();
    let mut per_node_recovered = Vec::with_capacity(k);
    let mut reduce_digests = Vec::with_capacity(k);

    for (node, store) in stores.iter().enumerate().take(k) {
        let mut learned: HashMap<(usize, u64, Half), Vec<u8>> = HashMap::new();
        let lookup = |learned: &HashMap<(usize, u64, Half), Vec<u8>>, q: usize, f: u64, half: Half| -> Option<Vec<u8>> {
            if let Some(v) = store.get(q, f) {
                return Some(segment(v, half).to_vec());
            }
            match half {
                Half::Whole => {
                    let lo = learned.get(&(q, f, Half::Lo))?;
                    let hi = learned.get(&(q, f, Half::Hi))?;
                    Some([lo.as_slice(), hi.as_slice()].concat())
                }
                h => learned.get(&(q, f, h)).cloned(),
            }
        };

        let mut progress = true;
        while progress {
            progress = false;
            for (p, payload) in deliveries {
                let mut acc = payload.clone();
                let mut unknown = None;
                let mut unknown_count = 0;
                for s in &p.xor {
                    match lookup(&learned, s.target, s.file, s.half) {
                        Some(v) => xor_into(&mut acc, &v),
                        None => {
                            unknown_count += 1;
                            unknown = Some(*s);
                        }
                    }
                }
                if unknown_count == 1 {
                    let s = unknown.unwrap();
                    let mid = acc.len() / 2;
                    match s.half {
                        Half::Whole => {
                            learned.insert((s.target, s.file, Half::Lo), acc[..mid].to_vec());
                            learned.insert((s.target, s.file, Half::Hi), acc[mid..].to_vec());
                        }
                        h => {
                            learned.insert((s.target, s.file, h), acc);
                        }
                    }
                    progress = true;
                }
            }
        }

        let q = node + 1;
        let mut hasher = Sha256::new();
        let mut ok = 0u64;
        for f in 1..=n {
            let truth = value_bytes(sim.seed, q, f, sim.t_bytes);
            match lookup(&learned, q, f, Half::Whole) {
                Some(v) if v == truth => {
                    ok += 1;
                    hasher.update(&v);
                }
                _ => mismatches.push((q, f)),
            }
        }
        per_node_recovered.push(ok);
        let digest = hasher.finalize();
        reduce_digests.push(digest.iter().map(|b| format!("{b:02x}")).collect());
    }

    if !mismatches.is_empty() {
        return Err(Error::ReduceFailure { mismatches });
    }
    let bytes_on_wire: u64 = deliveries.iter().map(|(_, b)| b.len() as u64).sum();
    Ok(SimReport {
        success: true,
        measured_load: Load::frac(bytes_on_wire as i64, sim.t_bytes as i64),
        per_node_recovered,
        bytes_on_wire,
        t_bytes: sim.t_bytes,
        reduce_digests,
    })
}

/// Map, encode, broadcast and reduce in one call.
pub fn run_round(sim: &SimConfig, alloc: &FileAllocation, plan: &ShufflePlan) -> Result<SimReport> {
    let stores = run_map(sim, alloc);
    let payloads = encode_packets(sim, &stores, plan)?;
    let deliveries: Vec<(CodedPacket, Vec<u8>)> =
        plan.packets.iter().cloned().zip(payloads).collect();
    reduce(sim, alloc, &stores, &deliveries)
}

/// Expected reduce digest for node `q` (1-based): hash of the true values.
pub fn expected_digest(sim: &SimConfig, q: usize) -> String {
    let mut hasher = Sha256::new();
    for f in 1..=sim.cfg.n() {
        hasher.update(value_bytes(sim.seed, q, f, sim.t_bytes));
    }
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
