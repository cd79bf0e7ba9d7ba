//! Arithmetic sieve over the primitive actions of almost simple groups with
//! socle X = PSL(2,q).
//!
//! For every prime power q and every maximal subgroup class of X (or of an
//! overgroup, for the novelty pairs that are not maximal in X) the number of
//! points `v = |X : X_α|` is computed exactly. A block-transitive
//! t-(k²,k,λ) design with t ≥ 2 on those points needs, in order:
//!
//! 1. `v = k²` for an integer `k`, with `k ≥ 3` so that `t < k` is possible;
//! 2. the block count of a 2-design, `v(v-1)/(k(k-1)) = k(k+1)`, divides
//!    `|G|` (taken as `|Aut(X)|` unless the pair fixes G);
//! 3. `k+1` divides every non-trivial subdegree, where the subdegrees are
//!    known;
//! 4. `k+1` divides `gcd(v-1, |X_α| |Out(X)|)`.
//!
//! All arithmetic is in `u128` with overflow checks.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::{Integer, Roots};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// Largest q accepted by [`case_catalog`]; keeps every product below 2^128.
pub const MAX_Q: u64 = 1 << 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SieveError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("q = {0} is outside the supported range 4..={MAX_Q}")]
    OutOfRange(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    /// `v` is not a perfect square.
    PerfectSquare,
    /// `v = k²` with `k < 3`, leaving no room for `2 ≤ t < k`.
    BlockSize,
    /// `k(k+1)` does not divide the ambient group order.
    BlockCount,
    /// `k+1` misses some non-trivial subdegree.
    Subdegree,
    /// `k+1` does not divide `gcd(v-1, |X_α||Out(X)|)`.
    StabilizerOrder,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Constraint::PerfectSquare => "perfect-square",
            Constraint::BlockSize => "block-size",
            Constraint::BlockCount => "block-count",
            Constraint::Subdegree => "subdegree",
            Constraint::StabilizerOrder => "stabilizer-order",
        };
        f.write_str(s)
    }
}

/// One maximal-subgroup case at a specific q.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseSpec {
    /// `odd-1`..`odd-8`, `even-1`..`even-4`, `table1-line-1`..`table1-line-10`.
    pub id: String,
    /// The point stabilizer, e.g. `D_{2(q-1)}`.
    pub stabilizer: String,
    pub q: u64,
    pub p: u64,
    pub f: u32,
    /// `(q0, r)` with `q = q0^r` for subfield cases.
    pub subfield: Option<(u64, u32)>,
    pub v: u128,
    /// `|X ∩ G_α|`.
    pub x_alpha_order: u128,
    pub out_order: u128,
    /// Order of the largest admissible G: `|Aut(X)|`, or the specific G of a
    /// novelty pair.
    pub group_order: u128,
    /// Subdegrees of the action as (length, multiplicity), when known.
    pub subdegrees: Option<Vec<(u128, u128)>>,
    /// Degree of transitivity of X on the points (1 if unknown).
    pub transitivity: u32,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SieveVerdict {
    pub case_id: String,
    pub stabilizer: String,
    pub q: u64,
    pub v: u128,
    pub square: bool,
    pub k: Option<u128>,
    pub failed: Option<Constraint>,
    pub detail: Option<String>,
    pub survivor: bool,
    /// Survives the arithmetic, but the action is k-transitive so the only
    /// orbit design is the complete one.
    pub trivial: bool,
    pub notes: Vec<String>,
}

impl SieveVerdict {
    pub fn is_nontrivial_survivor(&self) -> bool {
        self.survivor && !self.trivial
    }
}

pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let (mut rest, mut f) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        f += 1;
    }
    (rest == 1).then_some((p, f))
}

/// `r` with `r² = n`, certified by `r² ≤ n < (r+1)²`.
pub fn exact_sqrt(n: u128) -> Option<u128> {
    let r = n.sqrt();
    assert!(r * r <= n && (r + 1).checked_mul(r + 1).map_or(true, |s| n < s));
    (r * r == n).then_some(r)
}

fn is_prime(n: u64) -> bool {
    prime_power(n).is_some_and(|(_, f)| f == 1)
}

/// Lengths with multiplicities; zero multiplicities are dropped.
fn degs(list: &[(u128, u128)]) -> Option<Vec<(u128, u128)>> {
    Some(list.iter().copied().filter(|&(_, m)| m > 0).collect())
}

struct Ctx {
    q: u128,
    p: u64,
    f: u32,
    x_order: u128,
    out_order: u128,
}

impl Ctx {
    fn case(&self, id: &str, stabilizer: &str, x_alpha: u128) -> CaseSpec {
        assert_eq!(self.x_order % x_alpha, 0, "{id}: |X_α| must divide |X|");
        CaseSpec {
            id: id.to_string(),
            stabilizer: stabilizer.to_string(),
            q: self.q as u64,
            p: self.p,
            f: self.f,
            subfield: None,
            v: self.x_order / x_alpha,
            x_alpha_order: x_alpha,
            out_order: self.out_order,
            group_order: self.x_order * self.out_order,
            subdegrees: None,
            transitivity: 1,
            notes: Vec::new(),
        }
    }
}

/// Proper subfield decompositions `q = q0^r` with `r` prime.
fn subfields(p: u64, f: u32) -> Vec<(u64, u32)> {
    (2..=f)
        .filter(|&r| f % r == 0 && is_prime(r as u64))
        .map(|r| (p.pow(f / r), r))
        .collect()
}

/// Every applicable case at `q`, with congruence conditions applied.
pub fn case_catalog(q: u64) -> Result<Vec<CaseSpec>, SieveError> {
    if !(4..=MAX_Q).contains(&q) {
        return Err(SieveError::OutOfRange(q));
    }
    let (p, f) = prime_power(q).ok_or(SieveError::NotPrimePower(q))?;
    let qq = q as u128;
    let odd = p != 2;
    let x_order = if odd { qq * (qq * qq - 1) / 2 } else { qq * (qq * qq - 1) };
    let ctx = Ctx {
        q: qq,
        p,
        f,
        x_order,
        out_order: if odd { 2 * f as u128 } else { f as u128 },
    };
    let mut cases = Vec::new();

    if odd && q >= 5 {
        let mut c = ctx.case("odd-1", "C_p^f:C_{(q-1)/2}", qq * (qq - 1) / 2);
        c.subdegrees = degs(&[(1, 1), (qq, 1)]);
        c.transitivity = 2;
        cases.push(c);
        if q >= 13 {
            let mut c = ctx.case("odd-2", "D_{q-1}", qq - 1);
            c.subdegrees = degs(&[(1, 1), ((qq - 1) / 2, 1), (2 * (qq - 1), 1), (qq - 1, (qq - 3) / 2)]);
            cases.push(c);
        }
        if q != 7 && q != 9 {
            let mut c = ctx.case("odd-3", "D_{q+1}", qq + 1);
            c.subdegrees = degs(&[(1, 1), ((qq + 1) / 2, 1), (qq + 1, (qq - 3) / 2)]);
            if f > 1 {
                c.notes.push("subdegree data stated for prime q, applied with f > 1".into());
            }
            cases.push(c);
        }
        for (q0, r) in subfields(p, f) {
            let q0w = q0 as u128;
            if r == 2 {
                let mut c = ctx.case("odd-4", "PGL(2,q0)", q0w * (q0w * q0w - 1));
                c.subfield = Some((q0, r));
                cases.push(c);
            } else {
                let mut c = ctx.case("odd-5", "PSL(2,q0)", q0w * (q0w * q0w - 1) / 2);
                c.subfield = Some((q0, r));
                cases.push(c);
            }
        }
        let pm1_10 = q % 10 == 1 || q % 10 == 9;
        let p_pm3_10 = p % 10 == 3 || p % 10 == 7;
        if pm1_10 && (f == 1 || (f == 2 && p_pm3_10)) {
            cases.push(ctx.case("odd-6", "A_5", 60));
        }
        if f == 1 && (q % 8 == 3 || q % 8 == 5) && !pm1_10 {
            cases.push(ctx.case("odd-7", "A_4", 12));
        }
        if f == 1 && (q % 8 == 1 || q % 8 == 7) {
            cases.push(ctx.case("odd-8", "S_4", 24));
        }
    }

    if !odd {
        let mut c = ctx.case("even-1", "C_2^f:C_{q-1}", qq * (qq - 1));
        c.subdegrees = degs(&[(1, 1), (qq, 1)]);
        c.transitivity = 3;
        cases.push(c);
        let mut c = ctx.case("even-2", "D_{2(q+1)}", 2 * (qq + 1));
        c.subdegrees = degs(&[(1, 1), (qq + 1, (qq - 2) / 2)]);
        cases.push(c);
        let mut c = ctx.case("even-3", "D_{2(q-1)}", 2 * (qq - 1));
        c.subdegrees = degs(&[(1, 1), (2 * (qq - 1), 1), (qq - 1, (qq - 2) / 2)]);
        cases.push(c);
        for (q0, r) in subfields(p, f) {
            if q0 == 2 {
                continue;
            }
            let q0w = q0 as u128;
            let mut c = ctx.case("even-4", "PGL(2,q0)", q0w * (q0w * q0w - 1));
            c.subfield = Some((q0, r));
            cases.push(c);
        }
    }

    // Novelty pairs: M maximal in G but M ∩ X not maximal in X.
    let novelty: &[(u32, u64, &str, &str, u128, u128)] = &[
        // (line, q, G, M, |G|, |M|)
        (1, 7, "PGL(2,7)", "N_G(D_6) = D_12", 336, 12),
        (2, 7, "PGL(2,7)", "N_G(D_8) = D_16", 336, 16),
        (3, 9, "PGL(2,9)", "N_G(D_10) = D_20", 720, 20),
        (4, 9, "PGL(2,9)", "N_G(D_8) = D_16", 720, 16),
        (5, 9, "M_10", "N_G(D_10) = C_5:C_4", 720, 20),
        (6, 9, "M_10", "N_G(D_8) = C_8:C_2", 720, 16),
        (7, 9, "PGammaL(2,9)", "N_G(D_10) = C_10:C_4", 1440, 40),
        (8, 9, "PGammaL(2,9)", "N_G(D_8) = C_8.Aut(C_8)", 1440, 32),
        (9, 11, "PGL(2,11)", "N_G(D_10) = D_20", 1320, 20),
    ];
    for &(line, lq, g, m, g_order, m_order) in novelty {
        if lq == q {
            cases.push(novelty_case(&ctx, line, g, m, g_order, m_order));
        }
    }
    let r40 = q % 40;
    if f == 1 && matches!(r40, 11 | 29 | 19 | 21) {
        cases.push(novelty_case(&ctx, 10, "PGL(2,q)", "N_G(A_4) = S_4", 2 * x_order, 24));
    }
    Ok(cases)
}

fn novelty_case(ctx: &Ctx, line: u32, g: &str, m: &str, g_order: u128, m_order: u128) -> CaseSpec {
    // G = X M, so |X ∩ M| = |M| |X| / |G|.
    let x_alpha = m_order * ctx.x_order / g_order;
    let mut c = ctx.case(&format!("table1-line-{line}"), m, x_alpha);
    c.group_order = g_order;
    c.notes.push(format!("G = {g}"));
    debug_assert_eq!(c.v, g_order / m_order);
    c
}

/// Applies the constraints in order and reports the first failure.
pub fn evaluate(case: &CaseSpec) -> SieveVerdict {
    let mut verdict = SieveVerdict {
        case_id: case.id.clone(),
        stabilizer: case.stabilizer.clone(),
        q: case.q,
        v: case.v,
        square: false,
        k: None,
        failed: None,
        detail: None,
        survivor: false,
        trivial: false,
        notes: case.notes.clone(),
    };
    let fail = |mut v: SieveVerdict, c: Constraint, detail: String| {
        v.failed = Some(c);
        v.detail = Some(detail);
        v
    };
    let Some(k) = exact_sqrt(case.v) else {
        return fail(verdict, Constraint::PerfectSquare, format!("v = {} is not a square", case.v));
    };
    verdict.square = true;
    verdict.k = Some(k);
    if k < 3 {
        return fail(verdict, Constraint::BlockSize, format!("k = {k} leaves no t with 2 <= t < k"));
    }
    let m = k * (k + 1);
    if case.group_order % m != 0 {
        return fail(
            verdict,
            Constraint::BlockCount,
            format!("b/lambda = {m} does not divide |G| = {}", case.group_order),
        );
    }
    if let Some(subdegrees) = &case.subdegrees {
        if let Some(&(n, _)) = subdegrees.iter().find(|&&(n, _)| n > 1 && n % (k + 1) != 0) {
            return fail(
                verdict,
                Constraint::Subdegree,
                format!("k+1 = {} does not divide subdegree {n}", k + 1),
            );
        }
    }
    let bound = (case.v - 1).gcd(&(case.x_alpha_order * case.out_order));
    if bound % (k + 1) != 0 {
        return fail(
            verdict,
            Constraint::StabilizerOrder,
            format!("k+1 = {} does not divide gcd(v-1, |X_a||Out(X)|) = {bound}", k + 1),
        );
    }
    verdict.survivor = true;
    // A k-transitive point action has the complete design as its only
    // block orbit.
    verdict.trivial = (case.transitivity as u128) >= k;
    if verdict.trivial {
        verdict.notes.push(format!("action is {}-transitive, design is complete", case.transitivity));
    }
    verdict
}

#[derive(Clone, Debug, Serialize)]
pub struct SieveReport {
    pub q_max: u64,
    pub prime_powers: usize,
    pub cases: usize,
    pub eliminated: BTreeMap<String, usize>,
    /// Every verdict that passed all constraints, trivial ones included.
    pub survivors: Vec<SieveVerdict>,
}

impl SieveReport {
    pub fn nontrivial_survivors(&self) -> impl Iterator<Item = &SieveVerdict> {
        self.survivors.iter().filter(|v| v.is_nontrivial_survivor())
    }
}

/// All verdicts for prime powers `4 ≤ q ≤ q_max`, ordered by q and then by
/// catalog order.
pub fn all_verdicts(q_max: u64) -> Vec<SieveVerdict> {
    let q_max = q_max.min(MAX_Q);
    let qs: Vec<u64> = (4..=q_max).filter(|&q| prime_power(q).is_some()).collect();
    qs.par_iter()
        .flat_map_iter(|&q| {
            case_catalog(q)
                .expect("prime power in range")
                .iter()
                .map(evaluate)
                .collect::<Vec<_>>()
        })
        .collect()
}

pub fn run(q_max: u64) -> SieveReport {
    let verdicts = all_verdicts(q_max);
    let mut eliminated = BTreeMap::new();
    let mut survivors = Vec::new();
    let mut qs = std::collections::BTreeSet::new();
    for v in &verdicts {
        qs.insert(v.q);
        match v.failed {
            Some(c) => *eliminated.entry(c.to_string()).or_insert(0) += 1,
            None => survivors.push(v.clone()),
        }
    }
    SieveReport {
        q_max,
        prime_powers: qs.len(),
        cases: verdicts.len(),
        eliminated,
        survivors,
    }
}
