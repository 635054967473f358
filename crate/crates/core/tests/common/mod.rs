//! Shared helpers for the integration suites: fixture paths and seeded
//! random instances (games, valuations, quasi fields).

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kimpl::auction::{Bundle, BundleFamily, CompletionMode, Valuation};
use kimpl::rat::{rat, ratio, Rat};
use kimpl::Game;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).expect("fixture readable")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_game(
    rng: &mut ChaCha8Rng,
    players: usize,
    strategy_range: std::ops::RangeInclusive<usize>,
    lo: i64,
    hi: i64,
) -> Game {
    let shape: Vec<usize> = (0..players)
        .map(|_| rng.random_range(strategy_range.clone()))
        .collect();
    let strategies: Vec<Vec<String>> = shape
        .iter()
        .map(|&n| (0..n).map(|i| format!("s{i}")).collect())
        .collect();
    let cells: usize = shape.iter().product();
    let payoffs: Vec<Vec<Rat>> = (0..cells)
        .map(|_| {
            (0..players)
                .map(|_| rat(rng.random_range(lo..=hi)))
                .collect()
        })
        .collect();
    Game::new(strategies, payoffs).unwrap()
}

/// Random monotone valuation with half-integer values in [0, 3].
pub fn random_valuation(rng: &mut ChaCha8Rng, goods: usize) -> Valuation {
    let cells = 1usize << goods;
    let mut entries: Vec<(Bundle, Rat)> = (0..cells as Bundle)
        .map(|b| (b, ratio(rng.random_range(0..=6), 2)))
        .collect();
    entries[0].1 = rat(0);
    Valuation::from_entries(goods, &entries, CompletionMode::MonotoneClosure).unwrap()
}

/// Random quasi field: a couple of seed bundles closed under complement and
/// disjoint union.
pub fn random_quasi_field(rng: &mut ChaCha8Rng, goods: usize) -> BundleFamily {
    let full: Bundle = ((1usize << goods) - 1) as Bundle;
    let mut members: BTreeSet<Bundle> = BTreeSet::new();
    members.insert(0);
    for _ in 0..2 {
        members.insert(rng.random_range(0..=full));
    }
    loop {
        let mut grew = false;
        let snapshot: Vec<Bundle> = members.iter().copied().collect();
        for &b in &snapshot {
            if members.insert(full & !b) {
                grew = true;
            }
            for &c in &snapshot {
                if b & c == 0 && members.insert(b | c) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    BundleFamily::new(goods, members.into_iter().collect()).unwrap()
}

/// Every monotone valuation over `goods` goods with values drawn from `grid`.
pub fn all_grid_valuations(goods: usize, grid: &[Rat]) -> Vec<Valuation> {
    let cells = 1usize << goods;
    let mut out = Vec::new();
    let mut stack = vec![vec![rat(0)]];
    while let Some(prefix) = stack.pop() {
        if prefix.len() == cells {
            if let Ok(v) = Valuation::new(goods, prefix) {
                out.push(v);
            }
            continue;
        }
        for value in grid {
            let mut next = prefix.clone();
            next.push(value.clone());
            stack.push(next);
        }
    }
    out.sort_by(|a, b| a.values().cmp(b.values()));
    out
}
