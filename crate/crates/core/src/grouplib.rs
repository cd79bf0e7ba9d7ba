//! Finite fields GF(p^f), the projective line over them, PSL(2,q) and its
//! extension by field automorphisms as permutation groups, the induced action
//! on unordered pairs, and the two fixed degree-36 groups used for design
//! construction.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use thiserror::Error;

use crate::permcore::{PermError, PermGroup, Permutation};

pub const MAX_FIELD_ORDER: u32 = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupLibError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("field order {0} is outside the supported range 2..={MAX_FIELD_ORDER}")]
    OutOfRange(u32),
    #[error("pair action needs degree at least 3, got {0}")]
    DegreeTooSmall(usize),
    #[error("unknown built-in group {0:?}")]
    UnknownGroup(String),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// Monic primitive polynomials over GF(p), lowest coefficient first with the
/// leading 1 omitted. For each (p, f) the entry is the least such polynomial
/// when the coefficient vector is read as a base-p number.
const PRIMITIVE_POLYS: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1]),
    (2, 3, &[1, 1, 0]),
    (2, 4, &[1, 1, 0, 0]),
    (2, 5, &[1, 0, 1, 0, 0]),
    (2, 6, &[1, 1, 0, 0, 0, 0]),
    (2, 7, &[1, 1, 0, 0, 0, 0, 0]),
    (2, 8, &[1, 0, 1, 1, 1, 0, 0, 0]),
    (2, 9, &[1, 0, 0, 0, 1, 0, 0, 0, 0]),
    (2, 10, &[1, 0, 0, 1, 0, 0, 0, 0, 0, 0]),
    (3, 2, &[2, 1]),
    (3, 3, &[1, 2, 0]),
    (3, 4, &[2, 1, 0, 0]),
    (3, 5, &[1, 2, 0, 0, 0]),
    (3, 6, &[2, 1, 0, 0, 0, 0]),
    (5, 2, &[2, 1]),
    (5, 3, &[2, 3, 0]),
    (5, 4, &[2, 2, 1, 0]),
    (7, 2, &[3, 1]),
    (7, 3, &[2, 3, 0]),
    (11, 2, &[7, 1]),
    (13, 2, &[2, 1]),
    (17, 2, &[3, 1]),
    (19, 2, &[2, 1]),
    (23, 2, &[7, 1]),
    (29, 2, &[3, 1]),
    (31, 2, &[12, 1]),
];

/// Splits `q` as `p^f` with `p` prime, if possible.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut f = 0;
    while rest % p == 0 {
        rest /= p;
        f += 1;
    }
    (rest == 1).then_some((p, f))
}

/// An element of GF(p^f), stored as its coefficient vector read as a base-p
/// integer (lowest coefficient is the least significant digit).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FieldElem(pub u32);

/// GF(q) with log/antilog tables. The polynomial basis uses a primitive
/// polynomial, so the class of `x` generates the multiplicative group.
#[derive(Clone)]
pub struct FiniteField {
    p: u32,
    f: u32,
    q: u32,
    poly: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    add_table: Option<Vec<u32>>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.f)
    }
}

impl FiniteField {
    pub fn new(q: u32) -> Result<Self, GroupLibError> {
        if !(2..=MAX_FIELD_ORDER).contains(&q) {
            return Err(GroupLibError::OutOfRange(q));
        }
        let (p, f) = prime_power(q).ok_or(GroupLibError::NotPrimePower(q))?;
        let poly: Vec<u32> = if f == 1 {
            Vec::new()
        } else {
            PRIMITIVE_POLYS
                .iter()
                .find(|&&(pp, ff, _)| pp == p && ff == f)
                .map(|&(_, _, c)| c.to_vec())
                .expect("polynomial table covers every q <= 1024")
        };
        let mut field = FiniteField {
            p,
            f,
            q,
            poly,
            exp: Vec::new(),
            log: Vec::new(),
            add_table: None,
        };
        field.build_tables();
        Ok(field)
    }

    fn digits(&self, x: u32) -> Vec<u32> {
        let mut d = Vec::with_capacity(self.f as usize);
        let mut x = x;
        for _ in 0..self.f {
            d.push(x % self.p);
            x /= self.p;
        }
        d
    }

    fn from_digits(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn add_slow(&self, a: u32, b: u32) -> u32 {
        let (da, db) = (self.digits(a), self.digits(b));
        let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.from_digits(&s)
    }

    // Multiplication by the generator: x for f > 1, the least primitive root
    // for prime fields.
    fn times_generator(&self, a: u32, g: u32) -> u32 {
        if self.f == 1 {
            return (a as u64 * g as u64 % self.p as u64) as u32;
        }
        let p = self.p;
        let mut d = self.digits(a);
        let top = d.pop().unwrap();
        d.insert(0, 0);
        for (c, &m) in d.iter_mut().zip(&self.poly) {
            *c = (*c + p * p - top * m % p) % p;
        }
        self.from_digits(&d)
    }

    fn build_tables(&mut self) {
        let q = self.q;
        let g = if self.f == 1 {
            (1..q)
                .find(|&g| {
                    let mut x = 1u64;
                    (1..q - 1).all(|_| {
                        x = x * g as u64 % q as u64;
                        x != 1
                    })
                })
                .unwrap_or(1)
        } else {
            self.p
        };
        let mut exp = vec![0u32; (q - 1) as usize];
        let mut log = vec![u32::MAX; q as usize];
        let mut x = 1u32;
        for (e, slot) in exp.iter_mut().enumerate() {
            *slot = x;
            log[x as usize] = e as u32;
            x = self.times_generator(x, g);
        }
        debug_assert_eq!(x, 1, "generator order must be q-1");
        self.exp = exp;
        self.log = log;
        if q <= 64 {
            let mut t = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = self.add_slow(a, b);
                }
            }
            self.add_table = Some(t);
        }
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.f
    }

    /// Coefficients of the defining polynomial, lowest first, leading 1
    /// included. Prime fields report `x`.
    pub fn modulus(&self) -> Vec<u32> {
        if self.f == 1 {
            return vec![0, 1];
        }
        let mut m = self.poly.clone();
        m.push(1);
        m
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q).map(FieldElem)
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem(0)
    }

    pub fn one(&self) -> FieldElem {
        FieldElem(1)
    }

    /// A generator of the multiplicative group.
    pub fn primitive_element(&self) -> FieldElem {
        FieldElem(self.exp[1 % self.exp.len()])
    }

    pub fn coefficients(&self, a: FieldElem) -> Vec<u32> {
        self.digits(a.0)
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        match &self.add_table {
            Some(t) => FieldElem(t[(a.0 * self.q + b.0) as usize]),
            None => FieldElem(self.add_slow(a.0, b.0)),
        }
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        let d: Vec<u32> = self
            .digits(a.0)
            .iter()
            .map(|&c| (self.p - c) % self.p)
            .collect();
        FieldElem(self.from_digits(&d))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem(0);
        }
        let n = self.q - 1;
        let e = (self.log[a.0 as usize] + self.log[b.0 as usize]) % n;
        FieldElem(self.exp[e as usize])
    }

    pub fn inv(&self, a: FieldElem) -> Option<FieldElem> {
        if a.0 == 0 {
            return None;
        }
        let n = self.q - 1;
        let e = (n - self.log[a.0 as usize]) % n;
        Some(FieldElem(self.exp[e as usize]))
    }

    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        if e == 0 {
            return self.one();
        }
        if a.0 == 0 {
            return self.zero();
        }
        let n = (self.q - 1) as u64;
        let k = (self.log[a.0 as usize] as u64 * (e % n)) % n;
        FieldElem(self.exp[k as usize])
    }

    /// The Frobenius automorphism `a -> a^p`.
    pub fn frobenius(&self, a: FieldElem) -> FieldElem {
        self.pow(a, self.p as u64)
    }
}

/// A point of the projective line: `Finite(x)` stands for `(x : 1)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum ProjectivePoint {
    Finite(FieldElem),
    Infinity,
}

/// Dense indices for a structured point set.
#[derive(Clone, Debug)]
pub struct ActionLabeling<T: Clone + Eq + Hash> {
    points: Vec<T>,
    index: HashMap<T, usize>,
}

impl<T: Clone + Eq + Hash> ActionLabeling<T> {
    pub fn new(points: Vec<T>) -> Self {
        let index = points
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect::<HashMap<_, _>>();
        assert_eq!(index.len(), points.len(), "labelled points must be distinct");
        ActionLabeling { points, index }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, p: &T) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn point(&self, i: usize) -> &T {
        &self.points[i]
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// PSL(2,q).
    Socle,
    /// PSL(2,q) extended by the Frobenius automorphism, order `|PSL(2,q)| * f`.
    /// For even q this is PGammaL(2,q).
    Full,
}

fn mobius_perm<F>(labeling: &ActionLabeling<ProjectivePoint>, map: F) -> Permutation
where
    F: Fn(ProjectivePoint) -> ProjectivePoint,
{
    let images = labeling
        .points()
        .iter()
        .map(|&pt| labeling.index_of(&map(pt)).expect("image on the line"))
        .collect();
    Permutation::from_images(images).expect("Mobius maps are bijective")
}

/// PSL(2,q) (or its extension by field automorphisms) acting on the `q+1`
/// points of the projective line. Index `i < q` is the field element with
/// encoding `i`; index `q` is the point at infinity.
pub fn projective_group(
    q: u32,
    variant: Variant,
) -> Result<(PermGroup, ActionLabeling<ProjectivePoint>), GroupLibError> {
    let field = FiniteField::new(q)?;
    let mut points: Vec<ProjectivePoint> = field.elements().map(ProjectivePoint::Finite).collect();
    points.push(ProjectivePoint::Infinity);
    let labeling = ActionLabeling::new(points);
    let one = field.one();
    let c = field.primitive_element();
    let odd = field.characteristic() != 2;
    let scale = if odd { field.mul(c, c) } else { c };

    let translate = mobius_perm(&labeling, |pt| match pt {
        ProjectivePoint::Finite(x) => ProjectivePoint::Finite(field.add(x, one)),
        ProjectivePoint::Infinity => ProjectivePoint::Infinity,
    });
    let dilate = mobius_perm(&labeling, |pt| match pt {
        ProjectivePoint::Finite(x) => ProjectivePoint::Finite(field.mul(scale, x)),
        ProjectivePoint::Infinity => ProjectivePoint::Infinity,
    });
    // x -> -1/x (which is 1/x in characteristic 2)
    let invert = mobius_perm(&labeling, |pt| match pt {
        ProjectivePoint::Finite(x) if x == field.zero() => ProjectivePoint::Infinity,
        ProjectivePoint::Finite(x) => {
            ProjectivePoint::Finite(field.neg(field.inv(x).expect("nonzero")))
        }
        ProjectivePoint::Infinity => ProjectivePoint::Finite(field.zero()),
    });
    let mut gens = vec![translate, dilate, invert];
    if variant == Variant::Full && field.degree() > 1 {
        gens.push(mobius_perm(&labeling, |pt| match pt {
            ProjectivePoint::Finite(x) => ProjectivePoint::Finite(field.frobenius(x)),
            ProjectivePoint::Infinity => ProjectivePoint::Infinity,
        }));
    }
    Ok((PermGroup::new(gens)?, labeling))
}

/// Induced action on unordered pairs of points. Pairs are indexed in
/// lexicographic order of `(min, max)` over the input indices.
pub fn pair_action<T: Clone + Eq + Hash>(
    group: &PermGroup,
    labeling: &ActionLabeling<T>,
) -> Result<(PermGroup, ActionLabeling<(T, T)>), GroupLibError> {
    let n = group.degree();
    if n < 3 {
        return Err(GroupLibError::DegreeTooSmall(n));
    }
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            pairs.push((a, b));
        }
    }
    let index_of = |a: usize, b: usize| -> usize {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        // pairs before row a, then offset within the row
        a * (2 * n - a - 1) / 2 + (b - a - 1)
    };
    let gens = group
        .generators()
        .iter()
        .map(|g| {
            let images = pairs
                .iter()
                .map(|&(a, b)| index_of(g.apply(a), g.apply(b)))
                .collect();
            Permutation::from_images(images).map_err(GroupLibError::from)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let labels = pairs
        .iter()
        .map(|&(a, b)| (labeling.point(a).clone(), labeling.point(b).clone()))
        .collect();
    Ok((PermGroup::new(gens)?, ActionLabeling::new(labels)))
}

pub const PSL28_PAPER36: &str = "psl28_paper36";
pub const PGAMMAL28_PAPER36: &str = "pgammal28_paper36";

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &[PSL28_PAPER36, PGAMMAL28_PAPER36];

/// Generators of PSL(2,8) on 36 points, 1-based cycle notation.
pub const PSL28_GENERATORS: [&str; 2] = [
    "(2, 3, 5, 8, 13, 20, 29)(4, 7, 12, 19, 11, 18, 23)(6, 10, 16, 25, 28, 14, 22)(9, 15, 24, 33, 26, 17, 27)
     (21, 31, 32,34, 36, 35, 30)",
    "(1, 2, 4)(3, 6, 11)(5, 9, 7)(8, 14, 23)(10, 17, 28)(12, 13, 21)(15, 24, 34)(16, 26, 31)(18, 29, 33)
     (19, 20, 30)(22, 32, 36)(25, 35, 27)",
];

/// Generators of PGammaL(2,8) on 36 points, 1-based cycle notation.
pub const PGAMMAL28_GENERATORS: [&str; 3] = [
    "(1, 2, 4, 9, 16, 24, 10)(3, 7, 6, 13, 11, 19, 18)(5, 12, 20, 8, 15, 14, 23)(17, 25, 22, 28, 21, 29, 27)
     (26, 33, 30, 34, 36, 35, 31)",
    "(1, 3, 8)(2, 5, 6)(4, 10, 7)(9, 17, 26)(11, 19, 14)(12, 21, 30)(13, 22, 31)(15, 23, 16)(18, 27, 34)
     (20, 28, 33)(24, 29, 35)(25, 32, 36)",
    "(1, 3, 8)(2, 6, 5)(4, 11, 15)(7, 14, 16)(9, 18, 12)(10, 19, 23)(13, 20, 24)(17, 27, 21)(22, 28, 29)
     (26, 34, 30)(31, 33, 35)",
];

pub fn builtin_generators(name: &str) -> Result<Vec<Permutation>, GroupLibError> {
    let texts: &[&str] = match name {
        PSL28_PAPER36 => &PSL28_GENERATORS,
        PGAMMAL28_PAPER36 => &PGAMMAL28_GENERATORS,
        other => return Err(GroupLibError::UnknownGroup(other.to_string())),
    };
    texts
        .iter()
        .map(|t| Permutation::parse_cycles(t, 36, 1).map_err(GroupLibError::from))
        .collect()
}

pub fn builtin(name: &str) -> Result<PermGroup, GroupLibError> {
    Ok(PermGroup::new(builtin_generators(name)?)?)
}
