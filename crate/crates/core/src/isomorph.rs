//! Design isomorphism through canonical labelling of the point-block
//! incidence graph.
//!
//! The incidence graph has the `v` points as vertices of one colour and the
//! `b` blocks as vertices of another. A canonical vertex order is found by
//! individualisation-refinement: colour refinement to an equitable
//! partition, then branching on the vertices of the smallest non-singleton
//! cell. Every leaf yields an adjacency bitmap; the lexicographically least
//! one is the certificate. Automorphisms discovered as coinciding leaves are
//! used to skip children that lie in the same orbit as an explored sibling.

use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::design::{Block, Design};
use crate::permcore::{PermError, Permutation, UnionFind};

/// Default limit on `v + b`.
pub const DEFAULT_VERTEX_BOUND: usize = 5000;
/// Largest `v` accepted by [`brute_force_isomorphic`].
pub const BRUTE_FORCE_MAX_POINTS: usize = 9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IsomorphError {
    #[error("incidence graph has {vertices} vertices, above the bound {bound}")]
    TooLarge { vertices: usize, bound: usize },
    #[error("brute force isomorphism needs v <= {BRUTE_FORCE_MAX_POINTS}, got {0}")]
    TooManyPoints(usize),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// Canonical byte string of a design: `v`, `b`, `k` as little-endian u32,
/// followed by the point-by-block incidence bitmap in canonical order, row
/// major, each row padded to whole bytes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Certificate(Vec<u8>);

impl Certificate {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn hex(&self) -> String {
        hex::encode(&self.0)
    }

    /// SHA-256 of the certificate bytes, lowercase hex.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(&self.0))
    }
}

impl fmt::Debug for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Certificate({})", &self.digest()[..16])
    }
}

/// Certificate together with the canonical order that produced it.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub certificate: Certificate,
    /// `points[i]` is the original point placed at canonical position `i`.
    pub points: Vec<usize>,
    /// `blocks[j]` is the index (into `design.blocks()`) at canonical block
    /// position `j`.
    pub blocks: Vec<usize>,
    /// Number of search-tree leaves visited.
    pub leaves: usize,
}

/// Incidence graph in adjacency-list form. Vertices `0..v` are points and
/// `v..v+b` are blocks.
pub struct IncidenceGraph {
    v: usize,
    b: usize,
    k: usize,
    offsets: Vec<usize>,
    adj: Vec<u32>,
}

impl IncidenceGraph {
    pub fn new(design: &Design) -> IncidenceGraph {
        let (v, b) = (design.v(), design.b());
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); v + b];
        for (j, blk) in design.blocks().iter().enumerate() {
            for p in blk.points() {
                lists[p].push((v + j) as u32);
                lists[v + j].push(p as u32);
            }
        }
        let mut offsets = Vec::with_capacity(v + b + 1);
        let mut adj = Vec::new();
        offsets.push(0);
        for l in lists {
            adj.extend(l);
            offsets.push(adj.len());
        }
        IncidenceGraph {
            v,
            b,
            k: design.k(),
            offsets,
            adj,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.v + self.b
    }

    #[inline]
    pub fn neighbors(&self, x: usize) -> &[u32] {
        &self.adj[self.offsets[x]..self.offsets[x + 1]]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.offsets[x + 1] - self.offsets[x]
    }

    /// Initial colouring: points and blocks in separate cells, points first.
    fn initial_colors(&self) -> Vec<u32> {
        (0..self.vertex_count())
            .map(|x| if x < self.v { 0 } else { self.v as u32 })
            .collect()
    }
}

/// Colours are cell start positions: a vertex's colour is the number of
/// vertices in strictly earlier cells.
struct Refiner<'g> {
    graph: &'g IncidenceGraph,
    scratch: Vec<u32>,
    sig: Vec<Vec<u32>>,
}

impl<'g> Refiner<'g> {
    fn new(graph: &'g IncidenceGraph) -> Self {
        let n = graph.vertex_count();
        Refiner {
            graph,
            scratch: Vec::new(),
            sig: vec![Vec::new(); n],
        }
    }

    /// Refines `colors` to the coarsest equitable partition finer than it.
    /// Every step depends only on colours and adjacency, never on vertex
    /// names, so the result commutes with relabelling.
    fn refine(&mut self, colors: &mut [u32]) {
        let n = colors.len();
        let mut cells = count_cells(colors);
        loop {
            if cells == n {
                return;
            }
            // Signature of a vertex: sorted multiset of neighbour colours.
            for x in 0..n {
                self.scratch.clear();
                self.scratch
                    .extend(self.graph.neighbors(x).iter().map(|&y| colors[y as usize]));
                self.scratch.sort_unstable();
                let s = &mut self.sig[x];
                s.clear();
                s.extend_from_slice(&self.scratch);
            }
            // Rank distinct signatures within each old cell.
            let mut order: Vec<u32> = (0..n as u32).collect();
            let sig = &self.sig;
            order.sort_unstable_by(|&a, &b| {
                colors[a as usize]
                    .cmp(&colors[b as usize])
                    .then_with(|| sig[a as usize].cmp(&sig[b as usize]))
            });
            let mut next = vec![0u32; n];
            let mut start = 0u32;
            for (i, &x) in order.iter().enumerate() {
                if i > 0 {
                    let prev = order[i - 1] as usize;
                    let xu = x as usize;
                    if colors[prev] != colors[xu] || sig[prev] != sig[xu] {
                        start = i as u32;
                    }
                }
                next[x as usize] = start;
            }
            let new_cells = count_cells(&next);
            colors.copy_from_slice(&next);
            if new_cells == cells {
                return;
            }
            cells = new_cells;
        }
    }
}

fn count_cells(colors: &[u32]) -> usize {
    let mut seen = vec![false; colors.len()];
    let mut c = 0;
    for &x in colors {
        if !seen[x as usize] {
            seen[x as usize] = true;
            c += 1;
        }
    }
    c
}

struct Leaf {
    cert: Vec<u8>,
    /// position -> vertex
    order: Vec<u32>,
}

struct Search<'g> {
    graph: &'g IncidenceGraph,
    refiner: Refiner<'g>,
    first: Option<Leaf>,
    best: Option<Leaf>,
    /// Automorphisms as vertex images.
    autos: Vec<Vec<u32>>,
    leaves: usize,
}

impl<'g> Search<'g> {
    fn leaf(&mut self, colors: &[u32]) {
        self.leaves += 1;
        let g = self.graph;
        let n = g.vertex_count();
        let mut order = vec![0u32; n];
        for (x, &c) in colors.iter().enumerate() {
            order[c as usize] = x as u32;
        }
        let cert = leaf_certificate(g, colors, &order);
        let leaf = Leaf { cert, order };
        let Some(first) = &self.first else {
            self.first = Some(Leaf {
                cert: leaf.cert.clone(),
                order: leaf.order.clone(),
            });
            self.best = Some(leaf);
            return;
        };
        if leaf.cert == first.cert {
            self.record_automorphism(&first.order.clone(), &leaf.order);
            return;
        }
        let best = self.best.as_ref().unwrap();
        match leaf.cert.cmp(&best.cert) {
            std::cmp::Ordering::Equal => {
                let from = best.order.clone();
                self.record_automorphism(&from, &leaf.order);
            }
            std::cmp::Ordering::Less => self.best = Some(leaf),
            std::cmp::Ordering::Greater => {}
        }
    }

    fn record_automorphism(&mut self, from: &[u32], to: &[u32]) {
        let mut gamma = vec![0u32; from.len()];
        for (&a, &b) in from.iter().zip(to) {
            gamma[a as usize] = b;
        }
        if gamma.iter().enumerate().all(|(i, &x)| i as u32 == x) {
            return;
        }
        debug_assert!(is_automorphism(self.graph, &gamma));
        self.autos.push(gamma);
    }

    // Union-find over vertices using only automorphisms that fix `prefix`.
    fn orbits_fixing(&self, prefix: &[u32]) -> UnionFind {
        let mut uf = UnionFind::new(self.graph.vertex_count());
        for a in &self.autos {
            if prefix.iter().all(|&p| a[p as usize] == p) {
                for (x, &y) in a.iter().enumerate() {
                    uf.union(x, y as usize);
                }
            }
        }
        uf
    }

    fn descend(&mut self, mut colors: Vec<u32>, prefix: &mut Vec<u32>) {
        self.refiner.refine(&mut colors);
        let n = colors.len();
        // Cell sizes indexed by start position.
        let mut size = vec![0u32; n];
        for &c in &colors {
            size[c as usize] += 1;
        }
        let target = (0..n)
            .filter(|&c| size[c] > 1)
            .min_by_key(|&c| (size[c], c));
        let Some(target) = target else {
            self.leaf(&colors);
            return;
        };
        let members: Vec<u32> = (0..n as u32).filter(|&x| colors[x as usize] as usize == target).collect();
        let mut explored: Vec<u32> = Vec::new();
        let mut uf_autos = usize::MAX;
        let mut uf = UnionFind::new(0);
        for &x in &members {
            if !explored.is_empty() {
                if uf_autos != self.autos.len() {
                    uf = self.orbits_fixing(prefix);
                    uf_autos = self.autos.len();
                }
                let rx = uf.find(x as usize);
                if explored.iter().any(|&e| uf.find(e as usize) == rx) {
                    continue;
                }
            }
            explored.push(x);
            let mut child = colors.clone();
            for &y in &members {
                if y != x {
                    child[y as usize] = target as u32 + 1;
                }
            }
            prefix.push(x);
            self.descend(child, prefix);
            prefix.pop();
        }
    }
}

fn leaf_certificate(g: &IncidenceGraph, colors: &[u32], order: &[u32]) -> Vec<u8> {
    let row_bytes = g.b.div_ceil(8);
    let mut out = Vec::with_capacity(12 + g.v * row_bytes);
    out.extend_from_slice(&(g.v as u32).to_le_bytes());
    out.extend_from_slice(&(g.b as u32).to_le_bytes());
    out.extend_from_slice(&(g.k as u32).to_le_bytes());
    let mut row = vec![0u8; row_bytes];
    for &p in &order[..g.v] {
        row.iter_mut().for_each(|x| *x = 0);
        for &blk in g.neighbors(p as usize) {
            let j = colors[blk as usize] as usize - g.v;
            row[j / 8] |= 0x80 >> (j % 8);
        }
        out.extend_from_slice(&row);
    }
    out
}

fn is_automorphism(g: &IncidenceGraph, gamma: &[u32]) -> bool {
    (0..g.vertex_count()).all(|x| {
        let mut a: Vec<u32> = g.neighbors(x).iter().map(|&y| gamma[y as usize]).collect();
        let mut b: Vec<u32> = g.neighbors(gamma[x] as usize).to_vec();
        a.sort_unstable();
        b.sort_unstable();
        a == b && ((x < g.v) == ((gamma[x] as usize) < g.v))
    })
}

pub fn canonical_form(design: &Design) -> Result<CanonicalForm, IsomorphError> {
    canonical_form_bounded(design, DEFAULT_VERTEX_BOUND)
}

pub fn canonical_form_bounded(design: &Design, bound: usize) -> Result<CanonicalForm, IsomorphError> {
    let vertices = design.v() + design.b();
    if vertices > bound {
        return Err(IsomorphError::TooLarge { vertices, bound });
    }
    let graph = IncidenceGraph::new(design);
    let mut search = Search {
        graph: &graph,
        refiner: Refiner::new(&graph),
        first: None,
        best: None,
        autos: Vec::new(),
        leaves: 0,
    };
    let colors = graph.initial_colors();
    search.descend(colors, &mut Vec::new());
    let best = search.best.expect("search reaches at least one leaf");
    let v = design.v();
    Ok(CanonicalForm {
        certificate: Certificate(best.cert),
        points: best.order[..v].iter().map(|&x| x as usize).collect(),
        blocks: best.order[v..].iter().map(|&x| x as usize - v).collect(),
        leaves: search.leaves,
    })
}

pub fn certificate(design: &Design) -> Result<Certificate, IsomorphError> {
    Ok(canonical_form(design)?.certificate)
}

/// Designs with different `(v, k, b)` are never isomorphic.
pub fn are_isomorphic(a: &Design, b: &Design) -> Result<bool, IsomorphError> {
    if (a.v(), a.k(), a.b()) != (b.v(), b.k(), b.b()) {
        return Ok(false);
    }
    Ok(certificate(a)? == certificate(b)?)
}

/// A point permutation taking the blocks of `a` onto the blocks of `b`,
/// read off the two canonical orders and checked before it is returned.
pub fn isomorphism(a: &Design, b: &Design) -> Result<Option<Permutation>, IsomorphError> {
    if (a.v(), a.k(), a.b()) != (b.v(), b.k(), b.b()) {
        return Ok(None);
    }
    let (ca, cb) = (canonical_form(a)?, canonical_form(b)?);
    if ca.certificate != cb.certificate {
        return Ok(None);
    }
    let mut images = vec![0usize; a.v()];
    for (&pa, &pb) in ca.points.iter().zip(&cb.points) {
        images[pa] = pb;
    }
    let sigma = Permutation::from_images(images)?;
    let mapped = a.relabel(&sigma);
    Ok((mapped.blocks() == b.blocks()).then_some(sigma))
}

/// Tries every point permutation. Only for tiny designs.
pub fn brute_force_isomorphic(a: &Design, b: &Design) -> Result<bool, IsomorphError> {
    let v = a.v();
    if v > BRUTE_FORCE_MAX_POINTS || b.v() > BRUTE_FORCE_MAX_POINTS {
        return Err(IsomorphError::TooManyPoints(v.max(b.v())));
    }
    if (v, a.k(), a.b()) != (b.v(), b.k(), b.b()) {
        return Ok(false);
    }
    let target: std::collections::HashSet<u64> = b.blocks().iter().map(|x| x.0).collect();
    let mut perm: Vec<usize> = (0..v).collect();
    let maps = |perm: &[usize]| {
        a.blocks().iter().all(|blk| {
            let img = blk.points().fold(0u64, |m, p| m | 1 << perm[p]);
            target.contains(&img)
        })
    };
    if maps(&perm) {
        return Ok(true);
    }
    // Heap's algorithm, iterative.
    let mut c = vec![0usize; v];
    let mut i = 0;
    while i < v {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            if maps(&perm) {
                return Ok(true);
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(false)
}

/// Sorted multiset of pairwise block intersection sizes; an isomorphism
/// invariant, handy as a cheap pre-filter in tests.
pub fn intersection_profile(design: &Design) -> Vec<(u32, usize)> {
    let blocks: &[Block] = design.blocks();
    let mut counts = vec![0usize; design.k() + 1];
    for (i, a) in blocks.iter().enumerate() {
        for b in &blocks[i + 1..] {
            counts[(a.0 & b.0).count_ones() as usize] += 1;
        }
    }
    counts
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(s, c)| (s as u32, c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn design1(v: usize, blocks: &[&[usize]]) -> Design {
        Design::new(
            v,
            blocks
                .iter()
                .map(|b| Block::from_points(&b.iter().map(|p| p - 1).collect::<Vec<_>>()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn fano() -> Design {
        design1(7, &[&[1, 2, 3], &[1, 4, 5], &[1, 6, 7], &[2, 4, 6], &[2, 5, 7], &[3, 4, 7], &[3, 5, 6]])
    }

    fn complement(d: &Design) -> Design {
        let full = (1u64 << d.v()) - 1;
        Design::new(d.v(), d.blocks().iter().map(|b| Block(full & !b.0)).collect()).unwrap()
    }

    fn random_perm(n: usize, rng: &mut ChaCha8Rng) -> Permutation {
        let mut v: Vec<usize> = (0..n).collect();
        v.shuffle(rng);
        Permutation::from_images(v).unwrap()
    }

    #[test]
    fn certificate_is_relabel_invariant() {
        let d = fano();
        let c = certificate(&d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let s = random_perm(7, &mut rng);
            assert_eq!(certificate(&d.relabel(&s)).unwrap(), c);
        }
    }

    #[test]
    fn fano_and_complement_differ() {
        let d = fano();
        let dc = complement(&d);
        assert_eq!(dc.k(), 4);
        assert_ne!(certificate(&d).unwrap(), certificate(&dc).unwrap());
        assert!(!are_isomorphic(&d, &dc).unwrap());
    }

    #[test]
    fn self_isomorphism_and_witness() {
        let d = fano();
        assert!(are_isomorphic(&d, &d).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = random_perm(7, &mut rng);
        let e = d.relabel(&s);
        let w = isomorphism(&d, &e).unwrap().expect("isomorphic");
        assert_eq!(d.relabel(&w).blocks(), e.blocks());
    }

    #[test]
    fn brute_force_basics() {
        let d = fano();
        assert!(brute_force_isomorphic(&d, &d).unwrap());
        let small = design1(7, &[&[1, 2, 3]]);
        assert!(!brute_force_isomorphic(&d, &small).unwrap());
        let big = Design::new(10, vec![Block(0b111)]).unwrap();
        assert_eq!(
            brute_force_isomorphic(&big, &big).unwrap_err(),
            IsomorphError::TooManyPoints(10)
        );
    }

    #[test]
    fn vertex_bound() {
        let d = fano();
        assert!(matches!(
            canonical_form_bounded(&d, 10),
            Err(IsomorphError::TooLarge { vertices: 14, bound: 10 })
        ));
    }

    #[test]
    fn hex_and_digest() {
        let c = certificate(&fano()).unwrap();
        assert_eq!(c.hex().len(), 2 * c.as_bytes().len());
        assert_eq!(c.digest().len(), 64);
        assert!(c.hex().chars().all(|ch| ch.is_ascii_hexdigit() && !ch.is_ascii_uppercase()));
        // header: v, b, k
        assert_eq!(&c.as_bytes()[..12], &[7, 0, 0, 0, 7, 0, 0, 0, 3, 0, 0, 0]);
    }

    #[test]
    fn regular_graph_needs_branching() {
        // Two non-isomorphic 2-regular structures on 6 points with the same
        // degree sequences: a hexagon versus two triangles.
        let hex = design1(6, &[&[1, 2], &[2, 3], &[3, 4], &[4, 5], &[5, 6], &[6, 1]]);
        let tri = design1(6, &[&[1, 2], &[2, 3], &[3, 1], &[4, 5], &[5, 6], &[6, 4]]);
        assert!(!are_isomorphic(&hex, &tri).unwrap());
        assert!(!brute_force_isomorphic(&hex, &tri).unwrap());
        assert_eq!(intersection_profile(&hex), intersection_profile(&tri));
    }
}
