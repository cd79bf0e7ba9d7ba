//! Permutations and permutation groups given by generators.
//!
//! Composition is left to right: `a.compose(&b)` applies `a` first, then `b`,
//! so `a.compose(&b).apply(i) == b.apply(a.apply(i))`. This matches the
//! exponential notation `i^(ab)` used for permutation groups in the literature.
//!
//! Points are 0-based internally. Cycle notation is read and written 1-based
//! by default so generator lists can be pasted as printed.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

/// Default cap on the number of elements `elements()` will enumerate.
pub const DEFAULT_ELEMENT_BOUND: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("malformed cycle notation at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("point {point} out of range for degree {degree}")]
    OutOfRange { point: usize, degree: usize },
    #[error("point {0} appears more than once")]
    RepeatedPoint(usize),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("a group needs at least one generator")]
    NoGenerators,
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("group is not transitive")]
    NotTransitive,
    #[error("group order {order} exceeds the enumeration bound {bound}")]
    TooLarge { order: BigUint, bound: u64 },
    #[error("image table is not a bijection")]
    NotBijection,
}

/// A bijection on `0..degree`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(PermError::NotBijection);
            }
            seen[x] = true;
        }
        Ok(Permutation {
            images: images.into_iter().map(|x| x as u32).collect(),
        })
    }

    /// Parses a product of disjoint cycles such as `(1,2,3)(4,5)`.
    ///
    /// Whitespace and newlines are ignored anywhere. Points missing from the
    /// text are fixed. `index_base` is 1 for the usual printed form, 0 for
    /// 0-based input.
    pub fn parse_cycles(text: &str, degree: usize, index_base: usize) -> Result<Self, PermError> {
        if degree == 0 {
            return Err(PermError::ZeroDegree);
        }
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut used = vec![false; degree];
        let bytes = text.as_bytes();
        let mut pos = 0;
        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        loop {
            skip_ws(&mut pos);
            if pos == bytes.len() {
                break;
            }
            if bytes[pos] != b'(' {
                return Err(PermError::Syntax {
                    pos,
                    msg: format!("expected '(' but found {:?}", bytes[pos] as char),
                });
            }
            pos += 1;
            let mut cycle = Vec::new();
            loop {
                skip_ws(&mut pos);
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if start == pos {
                    return Err(PermError::Syntax {
                        pos,
                        msg: "expected a point number".into(),
                    });
                }
                let raw: usize = text[start..pos].parse().map_err(|_| PermError::Syntax {
                    pos: start,
                    msg: "point number does not fit".into(),
                })?;
                if raw < index_base || raw - index_base >= degree {
                    return Err(PermError::OutOfRange {
                        point: raw,
                        degree,
                    });
                }
                let point = raw - index_base;
                if used[point] {
                    return Err(PermError::RepeatedPoint(raw));
                }
                used[point] = true;
                cycle.push(point);
                skip_ws(&mut pos);
                match bytes.get(pos) {
                    Some(b',') => pos += 1,
                    Some(b')') => {
                        pos += 1;
                        break;
                    }
                    Some(&c) => {
                        return Err(PermError::Syntax {
                            pos,
                            msg: format!("unexpected {:?} inside cycle", c as char),
                        })
                    }
                    None => {
                        return Err(PermError::Syntax {
                            pos,
                            msg: "unterminated cycle".into(),
                        })
                    }
                }
            }
            for (i, &p) in cycle.iter().enumerate() {
                images[p] = cycle[(i + 1) % cycle.len()] as u32;
            }
        }
        Ok(Permutation { images })
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.images.iter().map(|&x| x as usize)
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self` first, then `other`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(self.then(other))
    }

    // Unchecked composition for callers that already know the degrees agree.
    #[inline]
    pub(crate) fn then(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: self
                .images
                .iter()
                .map(|&x| other.images[x as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u32; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x as usize] = i as u32;
        }
        Permutation { images }
    }

    /// Smallest point not fixed, if any.
    pub fn first_moved(&self) -> Option<usize> {
        self.images
            .iter()
            .enumerate()
            .find(|&(i, &x)| i as u32 != x)
            .map(|(i, _)| i)
    }

    /// Lengths of all cycles, fixed points included, in order of their
    /// smallest element.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        self.cycles().into_iter().map(|c| c.len()).collect()
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.apply(start);
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            out.push(cycle);
        }
        out
    }

    pub fn order(&self) -> u64 {
        self.cycle_lengths()
            .into_iter()
            .fold(1u64, |acc, l| num_integer::lcm(acc, l as u64))
    }

    /// Cycle notation with the given index base; fixed points are omitted and
    /// the identity prints as `()`.
    pub fn to_cycle_string(&self, index_base: usize) -> String {
        let mut s = String::new();
        for c in self.cycles() {
            if c.len() < 2 {
                continue;
            }
            s.push('(');
            for (i, p) in c.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                s.push_str(&(p + index_base).to_string());
            }
            s.push(')');
        }
        if s.is_empty() {
            s.push_str("()");
        }
        s
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_cycle_string(1))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_cycle_string(1))
    }
}

/// One level of a stabilizer chain.
#[derive(Clone, Debug)]
struct Level {
    base: usize,
    /// Strong generators that fix every earlier base point.
    gens: Vec<Permutation>,
    /// Orbit of `base` under `gens`, in breadth-first discovery order.
    orbit: Vec<usize>,
    /// `transversal[beta]` maps `base` to `beta`.
    transversal: Vec<Option<Permutation>>,
}

impl Level {
    fn new(base: usize, degree: usize) -> Self {
        let mut transversal = vec![None; degree];
        transversal[base] = Some(Permutation::identity(degree));
        Level {
            base,
            gens: Vec::new(),
            orbit: vec![base],
            transversal,
        }
    }

    fn rebuild_orbit(&mut self) {
        let degree = self.transversal.len();
        let mut transversal: Vec<Option<Permutation>> = vec![None; degree];
        transversal[self.base] = Some(Permutation::identity(degree));
        let mut orbit = vec![self.base];
        let mut head = 0;
        while head < orbit.len() {
            let beta = orbit[head];
            head += 1;
            for g in &self.gens {
                let gamma = g.apply(beta);
                if transversal[gamma].is_none() {
                    let u = transversal[beta].as_ref().unwrap().then(g);
                    transversal[gamma] = Some(u);
                    orbit.push(gamma);
                }
            }
        }
        self.orbit = orbit;
        self.transversal = transversal;
    }
}

/// A permutation group with a deterministic stabilizer chain, built eagerly
/// at construction and never mutated afterwards.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    levels: Vec<Level>,
}

impl PermGroup {
    pub fn new(generators: Vec<Permutation>) -> Result<Self, PermError> {
        Self::with_base_prefix(generators, &[])
    }

    /// Builds the chain with the given points forced to the front of the
    /// base. Further base points are the smallest points moved by the
    /// generator that needs them.
    pub fn with_base_prefix(generators: Vec<Permutation>, prefix: &[usize]) -> Result<Self, PermError> {
        let first = generators.first().ok_or(PermError::NoGenerators)?;
        let degree = first.degree();
        if degree == 0 {
            return Err(PermError::ZeroDegree);
        }
        if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
            return Err(PermError::DegreeMismatch(degree, g.degree()));
        }
        if let Some(&p) = prefix.iter().find(|&&p| p >= degree) {
            return Err(PermError::OutOfRange { point: p, degree });
        }
        let mut group = PermGroup {
            degree,
            generators,
            levels: Vec::new(),
        };
        for &p in prefix {
            group.levels.push(Level::new(p, degree));
        }
        for g in group.generators.clone() {
            if !g.is_identity() && !group.sifts_from(0, &g) {
                group.add_generator(0, g);
            }
        }
        // Forced levels beyond the last nontrivial one carry no information.
        while group.levels.last().is_some_and(|l| l.orbit.len() == 1 && l.gens.is_empty()) {
            group.levels.pop();
        }
        Ok(group)
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup::new(vec![Permutation::identity(degree)]).expect("identity generator")
    }

    /// Strips `g` through levels `start..`. Returns the residue and the level
    /// at which stripping stopped (`levels.len()` when it got through).
    fn sift(&self, start: usize, g: &Permutation) -> (Permutation, usize) {
        let mut h = g.clone();
        for (i, level) in self.levels.iter().enumerate().skip(start) {
            let beta = h.apply(level.base);
            match &level.transversal[beta] {
                Some(u) => h = h.then(&u.inverse()),
                None => return (h, i),
            }
        }
        (h, self.levels.len())
    }

    fn sifts_from(&self, start: usize, g: &Permutation) -> bool {
        let (h, j) = self.sift(start, g);
        j == self.levels.len() && h.is_identity()
    }

    // Adds `g` (which fixes the first `i` base points) to level `i` and
    // restores closure of every Schreier generator at that level.
    fn add_generator(&mut self, i: usize, g: Permutation) {
        if i == self.levels.len() {
            let base = g.first_moved().expect("nontrivial residue");
            self.levels.push(Level::new(base, self.degree));
        }
        self.levels[i].gens.push(g);
        self.levels[i].rebuild_orbit();

        let mut k = 0;
        while k < self.levels[i].orbit.len() {
            let beta = self.levels[i].orbit[k];
            k += 1;
            let mut s_idx = 0;
            while s_idx < self.levels[i].gens.len() {
                let level = &self.levels[i];
                let s = &level.gens[s_idx];
                s_idx += 1;
                let u_beta = level.transversal[beta].as_ref().unwrap();
                let gamma = s.apply(beta);
                let u_gamma = level.transversal[gamma].as_ref().unwrap();
                let schreier = u_beta.then(s).then(&u_gamma.inverse());
                if schreier.is_identity() {
                    continue;
                }
                let (residue, _) = self.sift(i + 1, &schreier);
                if !residue.is_identity() {
                    self.add_generator(i + 1, residue);
                }
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    /// Orbit lengths of the chain, one per base point.
    pub fn transversal_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    /// Group order as a `u64`, if it fits.
    pub fn order_u64(&self) -> Option<u64> {
        self.levels
            .iter()
            .try_fold(1u64, |acc, l| acc.checked_mul(l.orbit.len() as u64))
    }

    pub fn contains(&self, p: &Permutation) -> Result<bool, PermError> {
        if p.degree() != self.degree {
            return Err(PermError::DegreeMismatch(self.degree, p.degree()));
        }
        Ok(self.sifts_from(0, p))
    }

    fn check_point(&self, point: usize) -> Result<(), PermError> {
        if point >= self.degree {
            return Err(PermError::OutOfRange {
                point,
                degree: self.degree,
            });
        }
        Ok(())
    }

    /// The orbit of `point`, sorted ascending.
    pub fn orbit(&self, point: usize) -> Result<Vec<usize>, PermError> {
        self.check_point(point)?;
        let mut orbit = orbit_bfs(&self.generators, point, self.degree);
        orbit.sort_unstable();
        Ok(orbit)
    }

    /// All orbits, each sorted, ordered by smallest element.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for p in 0..self.degree {
            if seen[p] {
                continue;
            }
            let mut orb = orbit_bfs(&self.generators, p, self.degree);
            orb.sort_unstable();
            for &x in &orb {
                seen[x] = true;
            }
            out.push(orb);
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        orbit_bfs(&self.generators, 0, self.degree).len() == self.degree
    }

    pub fn point_stabilizer(&self, point: usize) -> Result<PermGroup, PermError> {
        self.check_point(point)?;
        let chain = PermGroup::with_base_prefix(self.generators.clone(), &[point])?;
        let gens = match chain.levels.first() {
            Some(l) if l.base == point => chain
                .levels
                .get(1)
                .map(|l| l.gens.clone())
                .unwrap_or_default(),
            // Every generator fixes `point`; the stabilizer is the whole group.
            _ => return Ok(self.clone()),
        };
        if gens.is_empty() {
            return Ok(PermGroup::trivial(self.degree));
        }
        // The strong generators below the first level already form a chain.
        let levels = chain.levels[1..].to_vec();
        Ok(PermGroup {
            degree: self.degree,
            generators: gens,
            levels,
        })
    }

    /// Orbit lengths of the stabilizer of `point`, sorted ascending.
    pub fn subdegrees(&self, point: usize) -> Result<Vec<usize>, PermError> {
        self.check_point(point)?;
        if !self.is_transitive() {
            return Err(PermError::NotTransitive);
        }
        let stab = self.point_stabilizer(point)?;
        let mut lens: Vec<usize> = stab.orbits().iter().map(|o| o.len()).collect();
        lens.sort_unstable();
        Ok(lens)
    }

    /// Minimal block containing `a` and `b`, as a partition labelling
    /// (`labels[x]` is the smallest point in the block of `x`).
    pub fn minimal_block_partition(&self, a: usize, b: usize) -> Result<Vec<usize>, PermError> {
        self.check_point(a)?;
        self.check_point(b)?;
        let mut uf = UnionFind::new(self.degree);
        let mut queue = VecDeque::new();
        if uf.union(a, b) {
            queue.push_back((a, b));
        }
        while let Some((x, y)) = queue.pop_front() {
            for g in &self.generators {
                let (gx, gy) = (g.apply(x), g.apply(y));
                if uf.union(gx, gy) {
                    queue.push_back((gx, gy));
                }
            }
        }
        let mut smallest = vec![usize::MAX; self.degree];
        for x in 0..self.degree {
            let r = uf.find(x);
            smallest[r] = smallest[r].min(x);
        }
        Ok((0..self.degree).map(|x| smallest[uf.find(x)]).collect())
    }

    pub fn is_primitive(&self) -> Result<bool, PermError> {
        if !self.is_transitive() {
            return Err(PermError::NotTransitive);
        }
        for delta in 1..self.degree {
            let labels = self.minimal_block_partition(0, delta)?;
            if labels.iter().any(|&l| l != 0) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The commutator subgroup, as the normal closure of the commutators of
    /// the generators.
    pub fn derived_subgroup(&self) -> PermGroup {
        let mut gens = Vec::new();
        for (i, a) in self.generators.iter().enumerate() {
            for b in &self.generators[i + 1..] {
                let c = a.inverse().then(&b.inverse()).then(a).then(b);
                if !c.is_identity() {
                    gens.push(c);
                }
            }
        }
        if gens.is_empty() {
            return PermGroup::trivial(self.degree);
        }
        let mut closure = PermGroup::new(gens.clone()).expect("same degree");
        let mut k = 0;
        while k < gens.len() {
            let h = gens[k].clone();
            k += 1;
            for g in &self.generators {
                let conj = g.inverse().then(&h).then(g);
                if !closure.contains(&conj).expect("same degree") {
                    gens.push(conj);
                    closure = PermGroup::new(gens.clone()).expect("same degree");
                }
            }
        }
        closure
    }

    pub fn elements(&self) -> Result<Elements<'_>, PermError> {
        self.elements_bounded(DEFAULT_ELEMENT_BOUND)
    }

    /// Walks coset-representative words of the chain. Level 0 varies
    /// slowest; within a level representatives follow orbit discovery order.
    pub fn elements_bounded(&self, bound: u64) -> Result<Elements<'_>, PermError> {
        match self.order_u64() {
            Some(o) if o <= bound => {}
            _ => {
                return Err(PermError::TooLarge {
                    order: self.order(),
                    bound,
                })
            }
        }
        Ok(Elements {
            group: self,
            counters: vec![0; self.levels.len()],
            done: false,
        })
    }
}

/// Iterator over every element of a `PermGroup`, each exactly once.
pub struct Elements<'a> {
    group: &'a PermGroup,
    counters: Vec<usize>,
    done: bool,
}

impl Iterator for Elements<'_> {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.done {
            return None;
        }
        let levels = &self.group.levels;
        // Element = u_{k-1} ... u_1 u_0 (deepest level applied first).
        let mut g = Permutation::identity(self.group.degree);
        for (level, &c) in levels.iter().zip(&self.counters).rev() {
            let u = level.transversal[level.orbit[c]].as_ref().unwrap();
            g = g.then(u);
        }
        // Advance the odometer, last level fastest.
        let mut i = levels.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.counters[i] += 1;
            if self.counters[i] < levels[i].orbit.len() {
                break;
            }
            self.counters[i] = 0;
        }
        Some(g)
    }
}

pub(crate) fn orbit_bfs(gens: &[Permutation], point: usize, degree: usize) -> Vec<usize> {
    let mut seen = vec![false; degree];
    seen[point] = true;
    let mut orbit = vec![point];
    let mut head = 0;
    while head < orbit.len() {
        let x = orbit[head];
        head += 1;
        for g in gens {
            let y = g.apply(x);
            if !seen[y] {
                seen[y] = true;
                orbit.push(y);
            }
        }
    }
    orbit
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true if `a` and `b` were in different classes.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}
