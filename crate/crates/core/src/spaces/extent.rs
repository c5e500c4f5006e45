//! Per-coordinate bounding boxes that determine diameters exactly.
//!
//! Under the sup-metric the diameter of a set equals its largest coordinate
//! spread. Under the tower metric the same holds per level, and across two
//! levels `l < k` the diameter is `max(gap(l,k), spread of padded coords)`.
//! Both reduce to min/max bookkeeping, so components can be merged in
//! `O(width)` during search.

use super::{level_gap, Metric};

const EMPTY_MIN: i64 = i64::MAX;
const EMPTY_MAX: i64 = i64::MIN;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtentLayout {
    Sup { dims: usize },
    Tower { max_level: usize },
}

impl ExtentLayout {
    pub fn metric(self) -> Metric {
        match self {
            ExtentLayout::Sup { .. } => Metric::Sup,
            ExtentLayout::Tower { .. } => Metric::Tower,
        }
    }

    /// Number of `(min, max)` slots.
    pub fn width(self) -> usize {
        match self {
            ExtentLayout::Sup { dims } => dims,
            ExtentLayout::Tower { max_level } => max_level * (max_level + 1) / 2,
        }
    }

    /// Length of the backing `i64` slice.
    pub fn stride(self) -> usize {
        2 * self.width()
    }

    #[inline]
    fn level_offset(level: usize) -> usize {
        (level - 1) * level / 2
    }

    pub fn clear(self, slot: &mut [i64]) {
        for pair in slot.chunks_exact_mut(2) {
            pair[0] = EMPTY_MIN;
            pair[1] = EMPTY_MAX;
        }
    }

    pub fn add_point(self, slot: &mut [i64], coords: &[i64]) {
        let base = match self {
            ExtentLayout::Sup { .. } => 0,
            ExtentLayout::Tower { .. } => Self::level_offset(coords.len()),
        };
        for (j, &x) in coords.iter().enumerate() {
            let p = 2 * (base + j);
            slot[p] = slot[p].min(x);
            slot[p + 1] = slot[p + 1].max(x);
        }
    }

    pub fn merge_into(self, dst: &mut [i64], src: &[i64]) {
        for (d, s) in dst.chunks_exact_mut(2).zip(src.chunks_exact(2)) {
            d[0] = d[0].min(s[0]);
            d[1] = d[1].max(s[1]);
        }
    }

    /// Exact diameter of the summarized set; zero for the empty set.
    pub fn diameter(self, slot: &[i64]) -> u64 {
        match self {
            ExtentLayout::Sup { .. } => spread(slot),
            ExtentLayout::Tower { max_level } => {
                let present = |l: usize| {
                    let o = 2 * Self::level_offset(l);
                    slot[o] <= slot[o + 1]
                };
                let mut best = 0u64;
                for l in (1..=max_level).filter(|&l| present(l)) {
                    let ol = 2 * Self::level_offset(l);
                    best = best.max(spread(&slot[ol..ol + 2 * l]));
                    for k in (l + 1..=max_level).filter(|&k| present(k)) {
                        let ok = 2 * Self::level_offset(k);
                        let mut d = level_gap(l, k);
                        for j in 0..k {
                            let (bmin, bmax) = (slot[ok + 2 * j], slot[ok + 2 * j + 1]);
                            // coordinates past the lower level are padded with 0
                            let (amin, amax) = if j < l {
                                (slot[ol + 2 * j], slot[ol + 2 * j + 1])
                            } else {
                                (0, 0)
                            };
                            d = d.max(amax.abs_diff(bmin)).max(bmax.abs_diff(amin));
                        }
                        best = best.max(d);
                    }
                }
                best
            }
        }
    }
}

fn spread(slot: &[i64]) -> u64 {
    slot.chunks_exact(2)
        .filter(|p| p[0] <= p[1])
        .map(|p| p[1].abs_diff(p[0]))
        .max()
        .unwrap_or(0)
}

/// Owned extent, convenient outside hot loops.
#[derive(Clone, Debug)]
pub struct Extent {
    layout: ExtentLayout,
    slot: Vec<i64>,
}

impl Extent {
    pub fn new(layout: ExtentLayout) -> Self {
        let mut slot = vec![0; layout.stride()];
        layout.clear(&mut slot);
        Extent { layout, slot }
    }

    pub fn add(&mut self, coords: &[i64]) {
        self.layout.add_point(&mut self.slot, coords);
    }

    pub fn merge(&mut self, other: &Extent) {
        self.layout.merge_into(&mut self.slot, &other.slot);
    }

    pub fn diameter(&self) -> u64 {
        self.layout.diameter(&self.slot)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pairwise(metric: Metric, pts: &[Vec<i64>]) -> u64 {
        let mut d = 0;
        for a in pts {
            for b in pts {
                d = d.max(metric.raw_distance(a, b));
            }
        }
        d
    }

    #[test]
    fn tower_extent_matches_pairwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let layout = ExtentLayout::Tower { max_level: 5 };
            let mut ext = Extent::new(layout);
            let n = rng.gen_range(1..8);
            let pts: Vec<Vec<i64>> = (0..n)
                .map(|_| {
                    let l = rng.gen_range(1..=5);
                    (0..l).map(|_| rng.gen_range(-12..=12)).collect()
                })
                .collect();
            for p in &pts {
                ext.add(p);
            }
            assert_eq!(ext.diameter(), pairwise(Metric::Tower, &pts), "{pts:?}");
        }
    }

    #[test]
    fn sup_extent_matches_pairwise_and_merges() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..500 {
            let layout = ExtentLayout::Sup { dims: 3 };
            let pts: Vec<Vec<i64>> = (0..rng.gen_range(1..8))
                .map(|_| (0..3).map(|_| rng.gen_range(-20..=20)).collect())
                .collect();
            let (left, right) = pts.split_at(pts.len() / 2);
            let mut a = Extent::new(layout);
            let mut b = Extent::new(layout);
            left.iter().for_each(|p| a.add(p));
            right.iter().for_each(|p| b.add(p));
            a.merge(&b);
            assert_eq!(a.diameter(), pairwise(Metric::Sup, &pts));
        }
    }

    #[test]
    fn empty_and_singleton() {
        let layout = ExtentLayout::Tower { max_level: 3 };
        let mut e = Extent::new(layout);
        assert_eq!(e.diameter(), 0);
        e.add(&[4, -2]);
        assert_eq!(e.diameter(), 0);
    }
}
