//! XOR shuffle planning for three nodes on a fixed allocation.
//!
//! Files stored at one node are sent uncoded to both other nodes. Files stored
//! at exactly two nodes are paired across the three pair-subsets so that each
//! broadcast serves two receivers; when the pair-subsets violate the triangle
//! inequality the surplus of the largest one goes out uncoded. Files stored at
//! all three nodes need nothing.

use std::collections::HashSet;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, MissingValue, Result};
use crate::model::{derive_profile, FileAllocation, Half, Load, Rational};

/// One XORed term: the value of `file` wanted by node `target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Summand {
    /// 1-based node id of the reducer that wants this value.
    pub target: usize,
    pub file: u64,
    pub half: Half,
}

/// A broadcast packet: the XOR of its summands, sent by `sender` (1-based).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodedPacket {
    pub sender: usize,
    pub xor: Vec<Summand>,
}

impl CodedPacket {
    pub fn uncoded(sender: usize, target: usize, file: u64, half: Half) -> Self {
        CodedPacket {
            sender,
            xor: vec![Summand { target, file, half }],
        }
    }

    pub fn is_coded(&self) -> bool {
        self.xor.len() > 1
    }

    /// Payload size in units of one intermediate value.
    pub fn size(&self) -> Rational {
        self.xor[0].half.size()
    }

    /// Nodes expected to peel this packet, ascending and 1-based.
    pub fn decoders(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.xor.iter().map(|s| s.target).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// Structural checks against an allocation: nonempty, same-size
    /// summands, the sender stores every summand file, and every decoder
    /// stores all summand files but the one addressed to it.
    pub fn validate(&self, alloc: &FileAllocation) -> Result<()> {
        let k = alloc.config().k();
        let bad = |msg: String| Err(Error::InvalidAllocation(msg));
        if self.xor.is_empty() {
            return bad("empty packet".into());
        }
        if self.sender == 0 || self.sender > k {
            return bad(format!("sender {} outside 1..={k}", self.sender));
        }
        let whole = self.xor[0].half == Half::Whole;
        for s in &self.xor {
            if (s.half == Half::Whole) != whole {
                return bad("packet mixes whole and half values".into());
            }
            if s.target == 0 || s.target > k {
                return bad(format!("target {} outside 1..={k}", s.target));
            }
            if !alloc.stores(self.sender - 1, s.file) {
                return bad(format!("sender {} does not store file {}", self.sender, s.file));
            }
        }
        for d in self.decoders() {
            let unknown = self
                .xor
                .iter()
                .filter(|s| !alloc.stores(d - 1, s.file))
                .collect::<Vec<_>>();
            if unknown.len() != 1 || unknown[0].target != d {
                return bad(format!("decoder {d} cannot peel packet from {}", self.sender));
            }
        }
        Ok(())
    }
}

/// An ordered list of broadcasts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShufflePlan {
    pub packets: Vec<CodedPacket>,
}

impl ShufflePlan {
    pub fn total_load(&self) -> Load {
        Load::new(self.packets.iter().map(CodedPacket::size).sum())
    }

    pub fn coded_count(&self) -> usize {
        self.packets.iter().filter(|p| p.is_coded()).count()
    }

    pub fn uncoded_count(&self) -> usize {
        self.packets.len() - self.coded_count()
    }

    /// Node `i` becomes node `perm[i]` (0-based permutation).
    pub fn relabeled(&self, perm: &[usize]) -> ShufflePlan {
        let packets = self
            .packets
            .iter()
            .map(|p| CodedPacket {
                sender: perm[p.sender - 1] + 1,
                xor: p
                    .xor
                    .iter()
                    .map(|s| Summand {
                        target: perm[s.target - 1] + 1,
                        ..*s
                    })
                    .collect(),
            })
            .collect();
        ShufflePlan { packets }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            packets: &'a [CodedPacket],
            total_load: Load,
        }
        serde_json::to_string_pretty(&Doc {
            packets: &self.packets,
            total_load: self.total_load(),
        })
        .expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// `max(max_k x_k, Σx_k / 2)`.
pub fn g(x1: u64, x2: u64, x3: u64) -> Load {
    let max = x1.max(x2).max(x3) as i64;
    let half_sum = Rational::new((x1 + x2 + x3) as i64, 2);
    let v = Rational::from_integer(max).max(half_sum);
    assert_eq!(v, g_abs_form(x1, x2, x3), "closed forms of g disagree");
    Load::new(v)
}

/// `½(|max + Σx/2| + |max − Σx/2|)`, the absolute-value form of [`g`].
pub fn g_abs_form(x1: u64, x2: u64, x3: u64) -> Rational {
    let max = Rational::from_integer(x1.max(x2).max(x3) as i64);
    let half_sum = Rational::new((x1 + x2 + x3) as i64, 2);
    ((max + half_sum).abs() + (max - half_sum).abs()) / 2
}

/// `2(S1+S2+S3) + g(S12, S13, S23)`.
pub fn achievable_load(alloc: &FileAllocation) -> Result<Load> {
    alloc.config().require_k(3)?;
    let [s1, s2, s3, s12, s13, s23, _] = derive_profile(alloc).k3_tuple();
    Ok(Load::from(2 * (s1 + s2 + s3)) + g(s12, s13, s23))
}

/// Builds the grouped XOR shuffle plan for a three-node allocation.
pub fn plan_shuffle(alloc: &FileAllocation) -> Result<ShufflePlan> {
    alloc.config().require_k(3)?;
    let n = alloc.config().n();

    let mut uncoded = Vec::new();
    // pair_files[e]: files held by exactly the two nodes other than e.
    let mut pair_files: [Vec<u64>; 3] = Default::default();
    for f in 1..=n {
        let holders = alloc.holders(f);
        match holders.len() {
            1 => {
                let sender = holders.nodes().next().unwrap();
                for target in (0..3).filter(|&t| t != sender) {
                    uncoded.push(CodedPacket::uncoded(sender + 1, target + 1, f, Half::Whole));
                }
            }
            2 => {
                let excluded = (0..3).find(|&e| !holders.contains(e)).unwrap();
                pair_files[excluded].push(f);
            }
            _ => {}
        }
    }

    // Relabel so that |S12| <= |S13| <= |S23|. Pair-subset key order is
    // {1,2} < {1,3} < {2,3}, i.e. descending excluded node.
    let mut order = [0usize, 1, 2];
    order.sort_by_key(|&e| (pair_files[e].len(), std::cmp::Reverse(e)));
    let [small, mid, large] = order;
    // Logical node 3 is excluded from S12, node 2 from S13, node 1 from S23.
    let (n1, n2, n3) = (large + 1, mid + 1, small + 1);
    let s12 = &pair_files[small];
    let s13 = &pair_files[mid];
    let s23 = &pair_files[large];
    let (a, b, c) = (s12.len(), s13.len(), s23.len());

    let mut coded = Vec::new();
    let xor2 = |sender: usize, t1: usize, u1: (u64, Half), t2: usize, u2: (u64, Half)| CodedPacket {
        sender,
        xor: vec![
            Summand { target: t1, file: u1.0, half: u1.1 },
            Summand { target: t2, file: u2.0, half: u2.1 },
        ],
    };

    if a + b >= c {
        let l1 = a + c - b;
        let l2 = a + b - c;
        let l3 = b + c - a;
        // The three group sizes share parity; odd sizes need half values.
        let halves = l1 % 2 == 1;
        let units = |files: &[u64]| -> Vec<(u64, Half)> {
            if halves {
                files.iter().flat_map(|&f| [(f, Half::Lo), (f, Half::Hi)]).collect()
            } else {
                files.iter().map(|&f| (f, Half::Whole)).collect()
            }
        };
        let (u12, u13, u23) = (units(s12), units(s13), units(s23));
        let (c1, c2, c3) = if halves { (l1, l2, l3) } else { (l1 / 2, l2 / 2, l3 / 2) };
        debug_assert_eq!(u12.len(), c1 + c2);
        debug_assert_eq!(u13.len(), c2 + c3);
        debug_assert_eq!(u23.len(), c1 + c3);
        // G1: S12 with S23, sent by node 2.
        for i in 0..c1 {
            coded.push(xor2(n2, n3, u12[i], n1, u23[i]));
        }
        // G2: S12 with S13, sent by node 1.
        for i in 0..c2 {
            coded.push(xor2(n1, n3, u12[c1 + i], n2, u13[i]));
        }
        // G3: S13 with S23, sent by node 3.
        for i in 0..c3 {
            coded.push(xor2(n3, n2, u13[c2 + i], n1, u23[c1 + i]));
        }
    } else {
        for i in 0..a {
            coded.push(xor2(n2, n3, (s12[i], Half::Whole), n1, (s23[i], Half::Whole)));
        }
        for i in 0..b {
            coded.push(xor2(n3, n2, (s13[i], Half::Whole), n1, (s23[a + i], Half::Whole)));
        }
        for &f in &s23[a + b..] {
            uncoded.push(CodedPacket::uncoded(n2, n1, f, Half::Whole));
        }
    }

    uncoded.sort_by_key(|p| (p.xor[0].target, p.xor[0].file));
    let mut packets = uncoded;
    packets.extend(coded);
    Ok(ShufflePlan { packets })
}

/// Sends every missing value uncoded from its lowest-indexed holder.
pub fn uncoded_plan(alloc: &FileAllocation) -> ShufflePlan {
    let k = alloc.config().k();
    let mut packets = Vec::new();
    for target in 0..k {
        for f in 1..=alloc.config().n() {
            if !alloc.stores(target, f) {
                let sender = alloc.holders(f).nodes().next().expect("covered");
                packets.push(CodedPacket::uncoded(sender + 1, target + 1, f, Half::Whole));
            }
        }
    }
    ShufflePlan { packets }
}

/// Per-node knowledge during peeling, at half-value resolution.
struct Knowledge<'a> {
    alloc: &'a FileAllocation,
    node: usize,
    learned: HashSet<(usize, u64, Half)>,
}

impl<'a> Knowledge<'a> {
    fn new(alloc: &'a FileAllocation, node: usize) -> Self {
        Knowledge {
            alloc,
            node,
            learned: HashSet::new(),
        }
    }

    fn knows_part(&self, target: usize, file: u64, half: Half) -> bool {
        self.alloc.stores(self.node, file) || self.learned.contains(&(target, file, half))
    }

    fn knows(&self, s: &Summand) -> bool {
        match s.half {
            Half::Whole => {
                self.knows_part(s.target, s.file, Half::Lo)
                    && self.knows_part(s.target, s.file, Half::Hi)
            }
            h => self.knows_part(s.target, s.file, h),
        }
    }

    fn learn(&mut self, s: &Summand) {
        match s.half {
            Half::Whole => {
                self.learned.insert((s.target, s.file, Half::Lo));
                self.learned.insert((s.target, s.file, Half::Hi));
            }
            h => {
                self.learned.insert((s.target, s.file, h));
            }
        }
    }
}

/// Runs the peeling decoder at every node. Fails with the list of
/// `(node, file, half)` values some node could not recover.
pub fn check_decodable(alloc: &FileAllocation, plan: &ShufflePlan) -> Result<()> {
    for (i, p) in plan.packets.iter().enumerate() {
        for s in &p.xor {
            if p.sender == 0
                || p.sender > alloc.config().k()
                || !alloc.stores(p.sender - 1, s.file)
            {
                return Err(Error::InvalidAllocation(format!(
                    "packet {i}: sender {} does not store file {}",
                    p.sender, s.file
                )));
            }
        }
    }
    let mut missing = Vec::new();
    for node in 0..alloc.config().k() {
        let mut know = Knowledge::new(alloc, node);
        let mut progress = true;
        while progress {
            progress = false;
            for p in &plan.packets {
                let mut unknown = p.xor.iter().filter(|s| !know.knows(s));
                if let (Some(s), None) = (unknown.next(), unknown.next()) {
                    know.learn(s);
                    progress = true;
                }
            }
        }
        let target = node + 1;
        for f in 1..=alloc.config().n() {
            let lo = know.knows_part(target, f, Half::Lo);
            let hi = know.knows_part(target, f, Half::Hi);
            let half = match (lo, hi) {
                (true, true) => continue,
                (false, false) => Half::Whole,
                (true, false) => Half::Hi,
                (false, true) => Half::Lo,
            };
            missing.push(MissingValue { node: target, file: f, half });
        }
    }
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::Undecodable { missing })
    }
}
