//! Brute-force reference implementations, written straight from the
//! definitions and sharing no code with the library.

use std::collections::{BTreeSet, HashMap};

use rand::Rng;

/// Grouping of units as a sorted list of sorted blocks.
pub type Blocks = Vec<Vec<usize>>;

/// Units `u` and `v` share a block iff they agree on every column in `subset`.
pub fn blocks_of(columns: &[Vec<String>], subset: &[usize]) -> Blocks {
    let n = columns.first().map_or(0, Vec::len);
    let mut seen: Vec<usize> = Vec::new();
    let mut blocks: Blocks = Vec::new();
    for u in 0..n {
        let pos = seen
            .iter()
            .position(|&rep| subset.iter().all(|&f| columns[f][rep] == columns[f][u]));
        match pos {
            Some(b) => blocks[b].push(u),
            None => {
                seen.push(u);
                blocks.push(vec![u]);
            }
        }
    }
    blocks.sort();
    blocks
}

pub fn blocks_from_classes(class_of: &[u32]) -> Blocks {
    let mut map: HashMap<u32, Vec<usize>> = HashMap::new();
    for (u, &c) in class_of.iter().enumerate() {
        map.entry(c).or_default().push(u);
    }
    let mut blocks: Blocks = map.into_values().collect();
    blocks.sort();
    blocks
}

/// Every distinct grouping induced by a subset of the columns, the empty
/// subset included.
pub fn distinct_groupings(columns: &[Vec<String>]) -> BTreeSet<Blocks> {
    let k = columns.len();
    (0..1usize << k)
        .map(|mask| {
            let subset: Vec<usize> = (0..k).filter(|f| mask >> f & 1 == 1).collect();
            blocks_of(columns, &subset)
        })
        .collect()
}

fn class_index(blocks: &Blocks, n: usize) -> Vec<usize> {
    let mut class = vec![0; n];
    for (b, members) in blocks.iter().enumerate() {
        for &u in members {
            class[u] = b;
        }
    }
    class
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Equivalent,
    NestedIn,
    Nests,
    FullyCrossed,
    PartiallyCrossed,
}

/// Each level of `a` meets exactly one level of `b`.
fn each_level_meets_one(a: &Blocks, b: &Blocks, n: usize) -> bool {
    let cb = class_index(b, n);
    a.iter()
        .all(|members| members.iter().map(|&u| cb[u]).collect::<BTreeSet<_>>().len() == 1)
}

pub fn relation(a: &Blocks, b: &Blocks) -> Relation {
    let n: usize = a.iter().map(Vec::len).sum();
    if a == b {
        return Relation::Equivalent;
    }
    if each_level_meets_one(a, b, n) {
        return Relation::NestedIn;
    }
    if each_level_meets_one(b, a, n) {
        return Relation::Nests;
    }
    let (ca, cb) = (class_index(a, n), class_index(b, n));
    let pairs: BTreeSet<(usize, usize)> = (0..n).map(|u| (ca[u], cb[u])).collect();
    if pairs.len() == a.len() * b.len() {
        Relation::FullyCrossed
    } else {
        Relation::PartiallyCrossed
    }
}

/// `coarser[a][b]`: `a` is strictly coarser than `b`.
pub fn coarser_matrix(groupings: &[Blocks]) -> Vec<Vec<bool>> {
    groupings
        .iter()
        .map(|a| groupings.iter().map(|b| relation(b, a) == Relation::NestedIn).collect())
        .collect()
}

/// Pairs `(a, b)` with `a` strictly coarser than `b` and nothing in between.
pub fn cover_edges(coarser: &[Vec<bool>]) -> Vec<(usize, usize)> {
    let m = coarser.len();
    let mut edges = Vec::new();
    for a in 0..m {
        for b in 0..m {
            if coarser[a][b] && !(0..m).any(|c| coarser[a][c] && coarser[c][b]) {
                edges.push((a, b));
            }
        }
    }
    edges.sort();
    edges
}

/// Levels minus the degrees of freedom of everything strictly coarser.
pub fn subtraction_df(levels: &[usize], coarser: &[Vec<bool>]) -> Vec<i64> {
    fn df(v: usize, levels: &[usize], coarser: &[Vec<bool>], memo: &mut Vec<Option<i64>>) -> i64 {
        if let Some(d) = memo[v] {
            return d;
        }
        let mut d = levels[v] as i64;
        for u in 0..levels.len() {
            if coarser[u][v] {
                d -= df(u, levels, coarser, memo);
            }
        }
        memo[v] = Some(d);
        d
    }
    let mut memo = vec![None; levels.len()];
    (0..levels.len()).map(|v| df(v, levels, coarser, &mut memo)).collect()
}

const PRIME: u64 = 2_147_483_647;

fn pow_mod(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % PRIME;
        }
        base = base * base % PRIME;
        exp >>= 1;
    }
    acc
}

/// Rank of the 0/1 indicator columns of all blocks in `groupings`, by
/// Gaussian elimination modulo a large prime.
pub fn indicator_rank(groupings: &[&Blocks], n: usize) -> usize {
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for g in groupings {
        for members in g.iter() {
            let mut row = vec![0u64; n];
            for &u in members {
                row[u] = 1;
            }
            rows.push(row);
        }
    }
    let mut rank = 0;
    for col in 0..n {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = pow_mod(rows[rank][col], PRIME - 2);
        for x in rows[rank].iter_mut() {
            *x = *x * inv % PRIME;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let f = row[col];
                for (x, &p) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x + PRIME - f * p % PRIME) % PRIME;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// A small random design: a mix of free labellings, coarsenings, products,
/// blockings and unit indices, so that nesting and crossing both occur.
pub fn random_design(rng: &mut impl Rng) -> (Vec<String>, Vec<Vec<String>>) {
    let n = rng.gen_range(2..=40);
    let k = rng.gen_range(1..=6);
    let mut columns: Vec<Vec<usize>> = Vec::new();
    for _ in 0..k {
        let kind = if columns.is_empty() {
            rng.gen_range(0..3)
        } else {
            rng.gen_range(0..6)
        };
        let col: Vec<usize> = match kind {
            0 => {
                let levels = rng.gen_range(1..=n.min(6));
                (0..n).map(|_| rng.gen_range(0..levels)).collect()
            }
            1 => {
                let size = rng.gen_range(1..=n.min(8));
                (0..n).map(|u| u / size).collect()
            }
            2 => {
                let m = rng.gen_range(1..=n.min(5));
                (0..n).map(|u| u % m).collect()
            }
            3 => {
                let src = &columns[rng.gen_range(0..columns.len())];
                let target = rng.gen_range(1..=4);
                let map: Vec<usize> = (0..=n).map(|_| rng.gen_range(0..target)).collect();
                src.iter().map(|&l| map[l % map.len()]).collect()
            }
            4 => {
                let a = &columns[rng.gen_range(0..columns.len())];
                let b = &columns[rng.gen_range(0..columns.len())];
                a.iter().zip(b).map(|(&x, &y)| x * (n + 1) + y).collect()
            }
            _ => (0..n).collect(),
        };
        columns.push(col);
    }
    let names = (0..k).map(|f| format!("F{f}")).collect();
    let columns = columns
        .into_iter()
        .map(|c| c.into_iter().map(|l| format!("L{l}")).collect())
        .collect();
    (names, columns)
}
