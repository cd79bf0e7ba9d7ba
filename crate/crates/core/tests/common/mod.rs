#![allow(dead_code)]

use std::collections::HashSet;

use k2design::design::{Block, Design};
use k2design::grouplib::{self, PGAMMAL28_PAPER36};
use k2design::permcore::{PermGroup, Permutation};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Permutation {
    let mut images: Vec<usize> = (0..n).collect();
    images.shuffle(rng);
    Permutation::from_images(images).unwrap()
}

pub fn random_word(rng: &mut ChaCha8Rng, gens: &[Permutation], len: usize) -> Permutation {
    let mut w = Permutation::identity(gens[0].degree());
    for _ in 0..len {
        w = w.compose(&gens[rng.gen_range(0..gens.len())]).unwrap();
    }
    w
}

/// Subgroups of PGammaL(2,8) generated by random words for even seeds, of
/// S_n by random permutations for odd ones.
pub fn random_subgroup(seed: u64) -> PermGroup {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.gen_range(1..=3);
    if seed % 2 == 0 {
        let pgl = grouplib::builtin(PGAMMAL28_PAPER36).unwrap();
        let gens: Vec<_> = (0..count).map(|_| random_word(&mut rng, pgl.generators(), 12)).collect();
        PermGroup::new(gens).unwrap()
    } else {
        let n = rng.gen_range(2..=10);
        let gens: Vec<_> = (0..count).map(|_| random_perm(&mut rng, n)).collect();
        PermGroup::new(gens).unwrap()
    }
}

/// Group order by breadth-first multiplication, independent of the chain.
pub fn closure_size(gens: &[Permutation]) -> usize {
    let n = gens[0].degree();
    let mut seen = HashSet::from([Permutation::identity(n)]);
    let mut stack = vec![Permutation::identity(n)];
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = x.compose(g).unwrap();
            if seen.insert(y.clone()) {
                stack.push(y);
            }
        }
    }
    seen.len()
}

pub fn random_design(rng: &mut ChaCha8Rng, v: usize, k: usize, b: usize) -> Design {
    let mut blocks = HashSet::new();
    while blocks.len() < b {
        let mut pts: Vec<usize> = (0..v).collect();
        pts.shuffle(rng);
        blocks.insert(Block::from_points(&pts[..k]).unwrap());
    }
    Design::new(v, blocks.into_iter().collect()).unwrap()
}

/// A random design on at most 8 points and a second design that is a
/// relabelling, an unrelated design, or a relabelled near miss.
pub fn random_design_pair(seed: u64) -> (Design, Design) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = rng.gen_range(3..=8);
    let k = rng.gen_range(1..v);
    let b = rng.gen_range(1..=k2design::design::binomial(v, k).min(12) as usize);
    let a = random_design(&mut rng, v, k, b);
    let other = match rng.gen_range(0..3) {
        0 => a.relabel(&random_perm(&mut rng, v)),
        1 => random_design(&mut rng, v, k, b),
        _ => {
            let mut blocks = a.blocks().to_vec();
            let fresh = random_design(&mut rng, v, k, 1).blocks()[0];
            if !blocks.contains(&fresh) {
                blocks[0] = fresh;
            }
            Design::new(v, blocks).unwrap().relabel(&random_perm(&mut rng, v))
        }
    };
    (a, other)
}

/// Checks r(k-1) = λ(v-1), bk = vr and constant replication on a 2-design.
pub fn integrality_holds(d: &Design, lambda: u64) -> bool {
    let (v, k, b) = (d.v() as u64, d.k() as u64, d.b() as u64);
    let reps = d.replication();
    let r = reps[0] as u64;
    reps.iter().all(|&x| x as u64 == r) && r * (k - 1) == lambda * (v - 1) && b * k == v * r
}
