//! Exhaustive reference decision procedure.

use crate::covers::{ColoredCover, CoverEntry, Family};
use crate::error::{Error, Result};
use crate::spaces::Window;

use super::components_of_coloring;

/// Largest `m^N` the enumeration accepts.
pub const BRUTE_FORCE_LIMIT: u128 = 1 << 28;

/// Tries every coloring in lexicographic order (point 0 most significant)
/// and returns the first valid one as a cover, or `None` if there is none.
pub fn brute_force_decide(
    window: &Window,
    radii: &[u64],
    diameter: u64,
) -> Result<Option<ColoredCover>> {
    let Some(coloring) = brute_force_coloring(window, radii, diameter)? else {
        return Ok(None);
    };
    let blocks = components_of_coloring(window, radii, &coloring);
    let entries = radii
        .iter()
        .zip(&blocks)
        .map(|(&radius, bs)| {
            Ok(CoverEntry {
                radius,
                family: Family::from_indices(window, bs)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(ColoredCover { entries }))
}

/// The lexicographically first valid coloring, by enumeration.
pub fn brute_force_coloring(
    window: &Window,
    radii: &[u64],
    diameter: u64,
) -> Result<Option<Vec<u8>>> {
    if radii.is_empty() || radii.contains(&0) {
        return Err(Error::Instance("radii must be non-empty and positive".into()));
    }
    let n = window.len();
    let m = radii.len();
    let space = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if space > BRUTE_FORCE_LIMIT {
        return Err(Error::BruteForceGuard { colors: m, points: n });
    }
    Ok(if n <= 64 {
        first_valid_small(window, radii, diameter)
    } else {
        first_valid(window, radii, diameter)
    })
}

/// Advances `coloring` to the next one in lexicographic order.
fn step(coloring: &mut [u8], m: usize) -> bool {
    for k in (0..coloring.len()).rev() {
        coloring[k] += 1;
        if (coloring[k] as usize) < m {
            return true;
        }
        coloring[k] = 0;
    }
    false
}

fn first_valid(window: &Window, radii: &[u64], diameter: u64) -> Option<Vec<u8>> {
    let n = window.len();
    let dist: Vec<u64> = (0..n * n).map(|k| window.dist(k / n, k % n)).collect();
    let mut coloring = vec![0u8; n];
    loop {
        if valid(&dist, n, radii, diameter, &coloring) {
            return Some(coloring);
        }
        if !step(&mut coloring, radii.len()) {
            return None;
        }
    }
}

fn valid(dist: &[u64], n: usize, radii: &[u64], diameter: u64, coloring: &[u8]) -> bool {
    let mut seen = vec![false; n];
    let mut comp = Vec::with_capacity(n);
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let c = coloring[start];
        let r = radii[c as usize];
        comp.clear();
        comp.push(start);
        seen[start] = true;
        let mut k = 0;
        while k < comp.len() {
            let p = comp[k];
            k += 1;
            for q in 0..n {
                if !seen[q] && coloring[q] == c && dist[p * n + q] < r {
                    seen[q] = true;
                    comp.push(q);
                }
            }
        }
        for (a, &p) in comp.iter().enumerate() {
            for &q in &comp[a + 1..] {
                if dist[p * n + q] > diameter {
                    return false;
                }
            }
        }
    }
    true
}

/// Same enumeration with point sets as 64-bit masks.
fn first_valid_small(window: &Window, radii: &[u64], diameter: u64) -> Option<Vec<u8>> {
    let n = window.len();
    let m = radii.len();
    let mut close = vec![vec![0u64; n]; m];
    let mut far = vec![0u64; n];
    for p in 0..n {
        for q in 0..n {
            let d = window.dist(p, q);
            if d > diameter {
                far[p] |= 1 << q;
            }
            for c in 0..m {
                if d < radii[c] {
                    close[c][p] |= 1 << q;
                }
            }
        }
    }
    let ok = |class: u64, c: usize| -> bool {
        let mut rest = class;
        while rest != 0 {
            let mut comp = rest & rest.wrapping_neg();
            let mut frontier = comp;
            while frontier != 0 {
                let mut grow = 0u64;
                let mut f = frontier;
                while f != 0 {
                    let p = f.trailing_zeros() as usize;
                    f &= f - 1;
                    grow |= close[c][p];
                }
                frontier = grow & class & !comp;
                comp |= frontier;
            }
            let mut f = comp;
            while f != 0 {
                let p = f.trailing_zeros() as usize;
                f &= f - 1;
                if far[p] & comp != 0 {
                    return false;
                }
            }
            rest &= !comp;
        }
        true
    };
    let mut coloring = vec![0u8; n];
    let mut classes = vec![0u64; m];
    loop {
        classes.iter_mut().for_each(|x| *x = 0);
        for (p, &c) in coloring.iter().enumerate() {
            classes[c as usize] |= 1 << p;
        }
        if (0..m).all(|c| ok(classes[c], c)) {
            return Some(coloring);
        }
        if !step(&mut coloring, m) {
            return None;
        }
    }
}
