//! Block designs generated as orbits of a base block, λ computations, and
//! enumeration of k-subset orbit representatives.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::isomorph::{self, Certificate, IsomorphError};
use crate::permcore::{PermError, PermGroup, Permutation};

/// Largest point count a mask-based block can hold.
pub const MAX_POINTS: usize = 64;
/// Rank space for the orbit scan must fit a bitmap of this many bits.
pub const MAX_RANK_SPACE: u64 = 1 << 32;

#[derive(Debug, Error)]
pub enum DesignError {
    #[error("design has {0} points; at most {MAX_POINTS} are supported")]
    TooManyPoints(usize),
    #[error("point {point} out of range for {v} points")]
    PointOutOfRange { point: usize, v: usize },
    #[error("block size {k} must be positive and less than v = {v}")]
    BadBlockSize { k: usize, v: usize },
    #[error("strength t = {t} out of range 1..={k}")]
    BadStrength { t: usize, k: usize },
    #[error("C({v},{k}) = {count} exceeds the enumeration capacity")]
    Capacity { v: usize, k: usize, count: u128 },
    #[error("blocks must all have size {0}")]
    MixedBlockSizes(usize),
    #[error("repeated block")]
    RepeatedBlock,
    #[error("group does not preserve the block set")]
    NotInvariant,
    #[error("group degree {group} does not match v = {v}")]
    DegreeMismatch { group: usize, v: usize },
    #[error(transparent)]
    Isomorph(#[from] IsomorphError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// A set of at most 64 points stored as a bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Block(pub u64);

impl Block {
    pub fn from_points(points: &[usize]) -> Result<Block, DesignError> {
        let mut mask = 0u64;
        for &p in points {
            if p >= MAX_POINTS {
                return Err(DesignError::PointOutOfRange { point: p, v: MAX_POINTS });
            }
            if mask & (1 << p) != 0 {
                return Err(DesignError::RepeatedBlock);
            }
            mask |= 1 << p;
        }
        Ok(Block(mask))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, point: usize) -> bool {
        point < MAX_POINTS && self.0 & (1 << point) != 0
    }

    /// Points in ascending order.
    pub fn points(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let p = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(p)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.points().collect()
    }

    pub fn image(self, g: &Permutation) -> Block {
        Block(self.points().fold(0u64, |m, p| m | 1 << g.apply(p)))
    }

    /// 1-based, comma separated.
    pub fn to_one_based_string(self) -> String {
        self.points()
            .map(|p| (p + 1).to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Blocks of equal size compare lexicographically on their sorted points:
/// the smaller block is the one holding the least point of the symmetric
/// difference.
impl Ord for Block {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.reverse_bits().cmp(&self.0.reverse_bits())
    }
}

impl PartialOrd for Block {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.to_one_based_string())
    }
}

/// Where a design came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub group: String,
    pub base_block: Block,
}

/// `v` points, blocks of size `k`, blocks kept sorted and distinct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Design {
    v: usize,
    k: usize,
    blocks: Vec<Block>,
    provenance: Option<Provenance>,
}

impl Design {
    pub fn new(v: usize, blocks: Vec<Block>) -> Result<Design, DesignError> {
        if v > MAX_POINTS {
            return Err(DesignError::TooManyPoints(v));
        }
        let k = blocks.first().map_or(0, |b| b.len());
        let limit = if v == MAX_POINTS { u64::MAX } else { (1u64 << v) - 1 };
        for b in &blocks {
            if b.len() != k {
                return Err(DesignError::MixedBlockSizes(k));
            }
            if b.0 & !limit != 0 {
                let point = 63 - (b.0 & !limit).leading_zeros() as usize;
                return Err(DesignError::PointOutOfRange { point, v });
            }
        }
        let mut blocks = blocks;
        blocks.sort_unstable();
        if blocks.windows(2).any(|w| w[0] == w[1]) {
            return Err(DesignError::RepeatedBlock);
        }
        Ok(Design {
            v,
            k,
            blocks,
            provenance: None,
        })
    }

    pub fn with_provenance(mut self, group: impl Into<String>, base_block: Block) -> Design {
        self.provenance = Some(Provenance {
            group: group.into(),
            base_block,
        });
        self
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn b(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    /// Image of the design under a point permutation of degree `v`.
    pub fn relabel(&self, sigma: &Permutation) -> Design {
        assert_eq!(sigma.degree(), self.v);
        let blocks = self.blocks.iter().map(|b| b.image(sigma)).collect();
        Design::new(self.v, blocks).expect("relabelling keeps blocks distinct")
    }

    /// Non-trivial in the sense `t < k < v` with the block set not equal to
    /// every k-subset.
    pub fn is_nontrivial(&self, t: usize) -> bool {
        t < self.k && self.k < self.v && (self.b() as u128) < binomial(self.v, self.k)
    }

    /// Replication number of each point.
    pub fn replication(&self) -> Vec<usize> {
        let mut r = vec![0; self.v];
        for b in &self.blocks {
            for p in b.points() {
                r[p] += 1;
            }
        }
        r
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Binomial coefficients `C(n, j)` for `n <= 64`, `j <= 64`, saturating at
/// `u64::MAX`.
struct BinomialTable {
    t: Vec<[u64; 65]>,
}

impl BinomialTable {
    fn new() -> Self {
        let mut t = vec![[0u64; 65]; 65];
        for n in 0..=64 {
            t[n][0] = 1;
            for j in 1..=n {
                t[n][j] = t[n - 1][j - 1].saturating_add(t[n - 1][j]);
            }
        }
        BinomialTable { t }
    }

    /// Colexicographic rank of a mask: sum of C(c_i, i+1) over its sorted
    /// points c_0 < c_1 < ...
    #[inline]
    fn colex_rank(&self, mask: u64) -> u64 {
        let mut m = mask;
        let mut i = 1;
        let mut r = 0;
        while m != 0 {
            let c = m.trailing_zeros() as usize;
            r += self.t[c][i];
            i += 1;
            m &= m - 1;
        }
        r
    }

    fn colex_unrank(&self, mut rank: u64, k: usize) -> u64 {
        let mut mask = 0u64;
        for i in (1..=k).rev() {
            let mut c = i - 1;
            while self.t[c + 1][i] <= rank {
                c += 1;
            }
            rank -= self.t[c][i];
            mask |= 1 << c;
        }
        mask
    }
}

/// Next mask with the same popcount, in increasing integer (colex) order.
#[inline]
fn next_combination(x: u64) -> u64 {
    let c = x & x.wrapping_neg();
    let r = x.wrapping_add(c);
    (((r ^ x) >> 2) / c) | r
}

/// Per-generator byte tables for mapping masks quickly.
struct MaskAction {
    tables: Vec<Vec<[u64; 256]>>,
}

impl MaskAction {
    fn new(group: &PermGroup) -> Self {
        let n = group.degree();
        let chunks = n.div_ceil(8);
        let tables = group
            .generators()
            .iter()
            .map(|g| {
                (0..chunks)
                    .map(|c| {
                        let mut t = [0u64; 256];
                        for (byte, slot) in t.iter_mut().enumerate() {
                            let mut m = 0u64;
                            for bit in 0..8 {
                                let p = c * 8 + bit;
                                if byte & (1 << bit) != 0 && p < n {
                                    m |= 1 << g.apply(p);
                                }
                            }
                            *slot = m;
                        }
                        t
                    })
                    .collect()
            })
            .collect();
        MaskAction { tables }
    }

    #[inline]
    fn image(&self, gen: usize, mask: u64) -> u64 {
        let mut out = 0;
        let mut m = mask;
        for t in &self.tables[gen] {
            out |= t[(m & 0xff) as usize];
            m >>= 8;
            if m == 0 {
                break;
            }
        }
        out
    }

    /// Orbit of `mask`, in breadth-first order.
    fn orbit(&self, mask: u64) -> Vec<u64> {
        let mut seen = HashSet::with_capacity(64);
        seen.insert(mask);
        let mut orbit = vec![mask];
        let mut head = 0;
        while head < orbit.len() {
            let x = orbit[head];
            head += 1;
            for g in 0..self.tables.len() {
                let y = self.image(g, x);
                if seen.insert(y) {
                    orbit.push(y);
                }
            }
        }
        orbit
    }
}

fn check_group_points(group: &PermGroup) -> Result<usize, DesignError> {
    let v = group.degree();
    if v > MAX_POINTS {
        return Err(DesignError::TooManyPoints(v));
    }
    Ok(v)
}

/// The design whose blocks are the distinct images of `base` under `group`.
pub fn orbit_design(group: &PermGroup, base: Block) -> Result<Design, DesignError> {
    let v = check_group_points(group)?;
    let k = base.len();
    if k == 0 || k >= v {
        return Err(DesignError::BadBlockSize { k, v });
    }
    if let Some(p) = base.points().find(|&p| p >= v) {
        return Err(DesignError::PointOutOfRange { point: p, v });
    }
    let action = MaskAction::new(group);
    let blocks = action.orbit(base.0).into_iter().map(Block).collect();
    Design::new(v, blocks)
}

/// λ_t if every t-subset of points lies in the same number of blocks.
pub fn lambda_of(design: &Design, t: usize) -> Result<Option<u64>, DesignError> {
    let (v, k) = (design.v(), design.k());
    if t == 0 || t > k {
        return Err(DesignError::BadStrength { t, k });
    }
    let space = binomial(v, t);
    if space > MAX_RANK_SPACE as u128 {
        return Err(DesignError::Capacity {
            v,
            k: t,
            count: space,
        });
    }
    let table = BinomialTable::new();
    let mut counts = vec![0u64; space as usize];
    let mut sub = vec![0usize; t];
    for b in design.blocks() {
        let pts = b.to_vec();
        for_each_subset(&pts, t, &mut sub, &mut |s| {
            let mask = s.iter().fold(0u64, |m, &p| m | 1 << p);
            counts[table.colex_rank(mask) as usize] += 1;
        });
    }
    let first = counts[0];
    Ok(counts.iter().all(|&c| c == first).then_some(first))
}

fn for_each_subset(pts: &[usize], t: usize, buf: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    fn rec(pts: &[usize], start: usize, depth: usize, buf: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if depth == buf.len() {
            f(buf);
            return;
        }
        let remaining = buf.len() - depth;
        for i in start..=pts.len() - remaining {
            buf[depth] = pts[i];
            rec(pts, i + 1, depth + 1, buf, f);
        }
    }
    buf.resize(t, 0);
    rec(pts, 0, 0, buf, f);
}

/// λ_s for s = 0..=t, exact. Index 0 is the block count b, index 1 the
/// replication number r.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaVector {
    pub values: Vec<BigRational>,
}

impl LambdaVector {
    pub fn is_integral(&self) -> bool {
        self.values.iter().all(|x| x.is_integer())
    }

    /// First s whose λ_s is not an integer.
    pub fn first_non_integral(&self) -> Option<usize> {
        self.values.iter().position(|x| !x.is_integer())
    }

    /// Integer values, if all are integral.
    pub fn integral(&self) -> Option<Vec<BigUint>> {
        self.values
            .iter()
            .map(|x| {
                x.is_integer()
                    .then(|| x.to_integer().to_biguint())
                    .flatten()
            })
            .collect()
    }

    pub fn b(&self) -> &BigRational {
        &self.values[0]
    }

    pub fn r(&self) -> Option<&BigRational> {
        self.values.get(1)
    }
}

fn big_binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn lambda_vector(v: usize, k: usize, t: usize, lambda_t: u64) -> LambdaVector {
    assert!(t <= k && k <= v, "need t <= k <= v");
    let values = (0..=t)
        .map(|s| {
            BigRational::new(
                BigInt::from(lambda_t) * big_binomial(v - s, t - s),
                big_binomial(k - s, t - s),
            )
        })
        .collect();
    LambdaVector { values }
}

fn check_invariant(group: &PermGroup, design: &Design) -> Result<(), DesignError> {
    if group.degree() != design.v() {
        return Err(DesignError::DegreeMismatch {
            group: group.degree(),
            v: design.v(),
        });
    }
    let set: HashSet<u64> = design.blocks().iter().map(|b| b.0).collect();
    let action = MaskAction::new(group);
    for g in 0..group.generators().len() {
        if design.blocks().iter().any(|b| !set.contains(&action.image(g, b.0))) {
            return Err(DesignError::NotInvariant);
        }
    }
    Ok(())
}

/// True iff `group` is transitive on the blocks of `design`.
pub fn is_block_transitive(group: &PermGroup, design: &Design) -> Result<bool, DesignError> {
    check_invariant(group, design)?;
    match design.blocks().first() {
        None => Ok(true),
        Some(b) => Ok(MaskAction::new(group).orbit(b.0).len() == design.b()),
    }
}

/// True iff the orbit of one incident (point, block) pair has size `b*k`.
pub fn is_flag_transitive(group: &PermGroup, design: &Design) -> Result<bool, DesignError> {
    check_invariant(group, design)?;
    let Some(&first) = design.blocks().first() else {
        return Ok(false);
    };
    let point = first.points().next().expect("nonempty block");
    let action = MaskAction::new(group);
    let mut seen = HashSet::new();
    seen.insert((point, first.0));
    let mut queue = vec![(point, first.0)];
    while let Some((p, b)) = queue.pop() {
        for (gi, g) in group.generators().iter().enumerate() {
            let flag = (g.apply(p), action.image(gi, b));
            if seen.insert(flag) {
                queue.push(flag);
            }
        }
    }
    Ok(seen.len() == design.b() * design.k())
}

/// One orbit of k-subsets: its lexicographically least member and its size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbitRep {
    pub block: Block,
    pub orbit_size: usize,
}

/// Lexicographically least member of every orbit of `group` on k-subsets,
/// sorted lexicographically. The rank space is split into `workers`
/// contiguous chunks that share an atomic visited bitmap; the result does
/// not depend on `workers`.
pub fn representatives(group: &PermGroup, k: usize, workers: usize) -> Result<Vec<OrbitRep>, DesignError> {
    let v = check_group_points(group)?;
    if k == 0 || k > v {
        return Err(DesignError::BadBlockSize { k, v });
    }
    let count = binomial(v, k);
    if count > MAX_RANK_SPACE as u128 {
        return Err(DesignError::Capacity { v, k, count });
    }
    let total = count as u64;
    let table = BinomialTable::new();
    let action = MaskAction::new(group);
    let words = total.div_ceil(64) as usize;
    let visited: Vec<AtomicU64> = (0..words).map(|_| AtomicU64::new(0)).collect();
    let claimed: Vec<AtomicU64> = (0..words).map(|_| AtomicU64::new(0)).collect();
    let test_and_set = |bits: &[AtomicU64], r: u64| -> bool {
        let bit = 1u64 << (r % 64);
        bits[(r / 64) as usize].fetch_or(bit, AtomicOrdering::Relaxed) & bit != 0
    };

    let workers = workers.max(1);
    // More chunks than workers keeps the load even; orbits found in one
    // chunk mark members everywhere.
    let chunk_count = if workers == 1 { 1 } else { (workers * 16) as u64 };
    let chunk_len = total.div_ceil(chunk_count).max(1);
    let chunks: Vec<(u64, u64)> = (0..total)
        .step_by(chunk_len as usize)
        .map(|s| (s, (s + chunk_len).min(total)))
        .collect();

    let scan = |&(start, end): &(u64, u64)| -> Vec<OrbitRep> {
        let mut found = Vec::new();
        let mut mask = table.colex_unrank(start, k);
        for rank in start..end {
            if rank > start {
                mask = next_combination(mask);
            }
            debug_assert_eq!(table.colex_rank(mask), rank);
            if visited[(rank / 64) as usize].load(AtomicOrdering::Relaxed) & (1 << (rank % 64)) != 0 {
                continue;
            }
            let orbit = action.orbit(mask);
            let mut least = Block(orbit[0]);
            for &m in &orbit {
                test_and_set(&visited, table.colex_rank(m));
                least = least.min(Block(m));
            }
            if !test_and_set(&claimed, table.colex_rank(least.0)) {
                found.push(OrbitRep {
                    block: least,
                    orbit_size: orbit.len(),
                });
            }
        }
        found
    };

    let mut reps: Vec<OrbitRep> = if workers == 1 {
        chunks.iter().flat_map(scan).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool");
        pool.install(|| chunks.par_iter().flat_map_iter(scan).collect())
    };
    reps.sort_unstable_by(|a, b| a.block.cmp(&b.block));
    Ok(reps)
}

/// A class of isomorphic block-transitive t-designs.
#[derive(Clone, Debug)]
pub struct ClassifiedDesign {
    /// Least base block among the orbits in this class.
    pub base: Block,
    pub lambda: u64,
    pub b: usize,
    pub certificate: Certificate,
    /// How many distinct block orbits fall into this class.
    pub orbit_count: usize,
}

impl ClassifiedDesign {
    pub fn certificate_id(&self) -> String {
        self.certificate.digest()
    }
}

/// All non-trivial t-designs arising as a single block orbit of `group` on
/// k-subsets, merged by isomorphism. Sorted by λ, then base block.
pub fn classify(group: &PermGroup, k: usize, t: usize, workers: usize) -> Result<Vec<ClassifiedDesign>, DesignError> {
    if t == 0 || t > k {
        return Err(DesignError::BadStrength { t, k });
    }
    let reps = representatives(group, k, workers)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    let found: Vec<(Block, u64, usize, Certificate)> = pool.install(|| {
        reps.par_iter()
            .map(|rep| -> Result<Option<(Block, u64, usize, Certificate)>, DesignError> {
                let design = orbit_design(group, rep.block)?;
                if !design.is_nontrivial(t) {
                    return Ok(None);
                }
                match lambda_of(&design, t)? {
                    Some(l) if l > 0 => {
                        let cert = isomorph::certificate(&design)?;
                        Ok(Some((rep.block, l, design.b(), cert)))
                    }
                    _ => Ok(None),
                }
            })
            .filter_map(|r| r.transpose())
            .collect::<Result<Vec<_>, _>>()
    })?;

    let mut classes: HashMap<Certificate, ClassifiedDesign> = HashMap::new();
    for (base, lambda, b, cert) in found {
        classes
            .entry(cert.clone())
            .and_modify(|c| {
                c.orbit_count += 1;
                c.base = c.base.min(base);
            })
            .or_insert(ClassifiedDesign {
                base,
                lambda,
                b,
                certificate: cert,
                orbit_count: 1,
            });
    }
    let mut out: Vec<ClassifiedDesign> = classes.into_values().collect();
    out.sort_by(|a, b| a.lambda.cmp(&b.lambda).then(a.base.cmp(&b.base)));
    Ok(out)
}

/// Number of k-subsets fixed by a permutation with the given cycle lengths:
/// the coefficient of x^k in the product of (1 + x^len).
pub fn fixed_k_subsets(cycle_lengths: &[usize], k: usize) -> u128 {
    let mut poly = vec![0u128; k + 1];
    poly[0] = 1;
    for &len in cycle_lengths {
        for d in (len..=k).rev() {
            poly[d] += poly[d - len];
        }
    }
    poly[k]
}

/// Orbit count on k-subsets by Burnside's lemma.
pub fn burnside_orbit_count(group: &PermGroup, k: usize) -> Result<u128, DesignError> {
    let order = group.order_u64().expect("small group") as u128;
    let elements = group.elements()?;
    let total: u128 = elements
        .map(|g| fixed_k_subsets(&g.cycle_lengths(), k))
        .sum();
    assert_eq!(total % order, 0, "Burnside sum must be divisible by |G|");
    Ok(total / order)
}

/// Integer value of a λ entry, when it is integral and fits in u64.
pub fn as_u64(x: &BigRational) -> Option<u64> {
    x.is_integer().then(|| x.to_integer().to_u64()).flatten()
}
