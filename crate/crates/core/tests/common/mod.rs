#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trasdim::covers::ColoredCover;
use trasdim::spaces::{Metric, Window, WindowSpec};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random sub-window of a small lattice or tower window, at most
/// `max_points` points.
pub fn random_window(rng: &mut ChaCha8Rng, max_points: usize) -> Window {
    let spec = match rng.gen_range(0..4) {
        0 => WindowSpec::Zn { dims: 1, side: 9 },
        1 => WindowSpec::Zn { dims: 2, side: 3 },
        2 => WindowSpec::Kzn { dims: 2, scale: 2, side: 6 },
        _ => WindowSpec::Lomega { side: 4, level_cap: 2 },
    };
    let full = Window::from_spec(&spec).unwrap();
    let mut idx: Vec<usize> = (0..full.len()).collect();
    idx.shuffle(rng);
    idx.truncate(rng.gen_range(1..=max_points.min(full.len())));
    idx.sort_unstable();
    full.restrict(&idx).unwrap()
}

pub fn diameter(w: &Window) -> u64 {
    let all: Vec<usize> = (0..w.len()).collect();
    w.diameter(&all)
}

/// `(window, radii, D)` with `|W| ≤ max_points`, `m ≤ max_colors`,
/// `D ≤ diam W`.
pub fn random_instance(
    rng: &mut ChaCha8Rng,
    max_points: usize,
    max_colors: usize,
) -> (Window, Vec<u64>, u64) {
    let w = random_window(rng, max_points);
    let m = rng.gen_range(1..=max_colors);
    let radii: Vec<u64> = (0..m).map(|_| rng.gen_range(1..=4)).collect();
    let d = rng.gen_range(0..=diameter(&w));
    (w, radii, d)
}

/// Color of each window point: the index of the entry holding it.
pub fn coloring_of(w: &Window, cover: &ColoredCover) -> Vec<u8> {
    let mut c = vec![u8::MAX; w.len()];
    for (k, e) in cover.entries.iter().enumerate() {
        for b in e.family.blocks() {
            for p in b {
                c[w.index_of(p).expect("witness point in window")] = k as u8;
            }
        }
    }
    c
}

/// Direct pairwise check of a colored cover, independent of the library
/// validator: coverage, per-family separation, block diameters.
pub fn pairwise_valid(w: &Window, cover: &ColoredCover, d: u64) -> bool {
    let metric = w.metric();
    let dist = |a, b| Metric::distance(metric, a, b).unwrap();
    let mut seen = vec![false; w.len()];
    for e in &cover.entries {
        let blocks = e.family.blocks();
        for (i, a) in blocks.iter().enumerate() {
            for p in a {
                match w.index_of(p) {
                    Some(k) => seen[k] = true,
                    None => return false,
                }
                for q in a {
                    if dist(p, q) > d {
                        return false;
                    }
                }
            }
            for b in &blocks[i + 1..] {
                for p in a {
                    for q in b {
                        if dist(p, q) < e.radius {
                            return false;
                        }
                    }
                }
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// Tower distance spelled out: zero padding, sup, then the sum of the
/// skipped level indices.
pub fn tower_reference(a: &[i64], b: &[i64]) -> u64 {
    let (lo, hi) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut padded = lo.to_vec();
    padded.resize(hi.len(), 0);
    let sup = padded
        .iter()
        .zip(hi)
        .map(|(x, y)| (x - y).unsigned_abs())
        .max()
        .unwrap_or(0);
    let c: u64 = (lo.len()..hi.len()).map(|k| k as u64).sum();
    sup.max(c)
}
