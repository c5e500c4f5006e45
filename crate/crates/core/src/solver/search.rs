//! Backtracking over point colorings.
//!
//! A coloring is valid when, for every color `i`, each connected component
//! of the graph on color-`i` points with edges `d(x, y) < rᵢ` has diameter
//! `≤ D`. Components only grow as points are added, so a component that is
//! too wide can never recover; that is the pruning rule.
//!
//! State per color lives in one union-find over all points (edges only join
//! equal colors) with union by size and no path compression, so every union
//! can be undone from the trail. Each root carries an [`ExtentLayout`] slot,
//! which gives the exact component diameter after a merge in `O(width)`.
//! Members of a component form a circular list so that merges and their
//! undo are a single pointer swap.
//!
//! After each assignment the unassigned neighbours of the grown component
//! are re-checked for that color (forward checking). A point left with one
//! feasible color is assigned immediately; one with none is a conflict.
//! Colors with equal radii are interchangeable, and a branch only tries the
//! lowest unused color of each such class.
//!
//! Branching takes the point with the fewest remaining colors, ties going to
//! the point closest to the first one, so the assigned region grows as a
//! ball. Row-by-row order leaves long open fronts and is far slower on
//! lattice windows.
//!
//! Every assigned point and every removed color carries the set of branching
//! depths it depends on. A failed subtree returns the union of those sets and
//! the search jumps back to the deepest depth in it, skipping branches that
//! took no part in the failure.
//!
//! Failed subtrees are also remembered by their frontier: the unassigned
//! set, the color and component of every assigned point that can still gain
//! a neighbour, and the extents of those components. Nothing else influences
//! which completions exist, so a later state with the same key is pruned.
//! Under the sup-metric an extent bound too far inside the window to ever
//! span more than `D` is stored as a fixed sentinel, so such states share
//! a key.

use std::collections::HashSet;

use crate::spaces::{ExtentLayout, Window};

use super::SearchStats;

const NONE: u8 = u8::MAX;
/// Total key length (in words) kept in the nogood table.
const MEMO_WORDS: usize = 1 << 23;

pub(crate) enum Outcome {
    Sat(Vec<u8>),
    Unsat,
    Unknown,
}

enum Undo {
    Assign(u32),
    Union { child: u32, root: u32, saved: usize },
    Domain { point: u32, old: u32 },
}

struct Frame {
    point: u32,
    next_color: u8,
    mark: usize,
    saved_mark: usize,
    key: Option<Box<[i64]>>,
    conflict: Vec<u64>,
    /// A color was passed over by symmetry, which depends on every earlier
    /// branch.
    skipped: bool,
}

fn or_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d |= s;
    }
}

fn highest_bit(bits: &[u64]) -> Option<usize> {
    bits.iter()
        .enumerate()
        .rev()
        .find(|(_, &w)| w != 0)
        .map(|(k, &w)| k * 64 + 63 - w.leading_zeros() as usize)
}

pub(crate) struct Engine<'a> {
    window: &'a Window,
    diameter: u64,
    colors: usize,
    /// `class_of[c]` is the smallest color with the same radius as `c`.
    class_of: Vec<u8>,
    layout: ExtentLayout,
    stride: usize,
    /// Neighbours at distance `< r` for each distinct radius.
    nbrs: Vec<Vec<Vec<u32>>>,
    nbr_slot: Vec<usize>,

    color: Vec<u8>,
    parent: Vec<u32>,
    size: Vec<u32>,
    next: Vec<u32>,
    ext: Vec<i64>,
    domain: Vec<u32>,
    used: Vec<u32>,

    /// Words per depth set.
    words: usize,
    /// Depth set of each assigned point.
    dep: Vec<u64>,
    /// Depth set behind each removed (point, color).
    removal: Vec<u64>,
    conflict: Vec<u64>,
    depth: usize,

    trail: Vec<Undo>,
    saved_ext: Vec<i64>,
    queue: Vec<u32>,
    stamp: Vec<u32>,
    epoch: u32,
    scratch: Vec<i64>,
    roots: Vec<u32>,
    nogoods: HashSet<Box<[i64]>>,
    memo_words: usize,
    labels: Vec<u32>,
    /// Per extent slot, the `(min, max)` values past which the exact value no
    /// longer matters (sup layout only).
    clamp: Option<Vec<(i64, i64)>>,

    /// Branching rank of each point.
    rank: Vec<u32>,
    budget: u64,
    pub(crate) stats: SearchStats,
}

impl<'a> Engine<'a> {
    pub(crate) fn new(
        window: &'a Window,
        radii: &[u64],
        diameter: u64,
        budget: u64,
    ) -> Self {
        let n = window.len();
        let colors = radii.len();
        assert!((1..=32).contains(&colors), "1..=32 colors supported");
        let layout = window.extent_layout();
        let stride = layout.stride();

        let mut distinct: Vec<u64> = radii.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let nbrs: Vec<Vec<Vec<u32>>> = distinct
            .iter()
            .map(|&r| {
                (0..n)
                    .map(|i| {
                        let mut v = Vec::new();
                        if r > 1 {
                            window.for_each_within(i, r - 1, |j| {
                                if j != i {
                                    v.push(j as u32)
                                }
                            });
                        }
                        v.sort_unstable();
                        v
                    })
                    .collect()
            })
            .collect();
        let nbr_slot = radii
            .iter()
            .map(|r| distinct.binary_search(r).expect("radius listed"))
            .collect();
        let class_of = radii
            .iter()
            .map(|r| radii.iter().position(|x| x == r).expect("present") as u8)
            .collect();

        let mut ext = vec![0; n * stride];
        for i in 0..n {
            layout.clear(&mut ext[i * stride..(i + 1) * stride]);
        }
        let full = if colors == 32 {
            u32::MAX
        } else {
            (1u32 << colors) - 1
        };
        let words = n / 64 + 1;
        // grow the assigned region as a ball around the first point
        let mut order: Vec<u32> = (0..n as u32).collect();
        if n > 0 {
            order.sort_by_key(|&i| (window.dist(0, i as usize), i));
        }
        // a min at or above `hi - D` can never be part of a spread over `D`
        let clamp = matches!(layout, ExtentLayout::Sup { .. }).then(|| {
            let d = diameter.min(i64::MAX as u64 / 4) as i64;
            (0..layout.width())
                .map(|j| {
                    let xs = (0..n).map(|i| window.coords(i)[j]);
                    let lo = xs.clone().min().unwrap_or(0);
                    let hi = xs.max().unwrap_or(0);
                    (hi - d, lo + d)
                })
                .collect()
        });
        let mut rank = vec![0u32; n];
        for (k, &i) in order.iter().enumerate() {
            rank[i as usize] = k as u32;
        }
        Engine {
            window,
            diameter,
            colors,
            class_of,
            layout,
            stride,
            nbrs,
            nbr_slot,
            color: vec![NONE; n],
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            next: (0..n as u32).collect(),
            ext,
            domain: vec![full; n],
            used: vec![0; colors],
            words,
            dep: vec![0; n * words],
            removal: vec![0; n * colors * words],
            conflict: vec![0; words],
            depth: 0,
            trail: Vec::new(),
            saved_ext: Vec::new(),
            queue: Vec::new(),
            stamp: vec![0; n],
            epoch: 0,
            scratch: vec![0; stride],
            roots: Vec::new(),
            nogoods: HashSet::new(),
            memo_words: 0,
            labels: vec![u32::MAX; n],
            clamp,
            rank,
            budget,
            stats: SearchStats::default(),
        }
    }

    #[inline]
    fn find(&self, mut p: u32) -> u32 {
        while self.parent[p as usize] != p {
            p = self.parent[p as usize];
        }
        p
    }

    #[inline]
    fn nbrs_of(&self, color: usize, p: u32) -> &[u32] {
        &self.nbrs[self.nbr_slot[color]][p as usize]
    }

    fn dep_of(&self, p: usize) -> &[u64] {
        &self.dep[p * self.words..(p + 1) * self.words]
    }

    fn removal_slot(&self, p: usize, c: usize) -> std::ops::Range<usize> {
        let base = (p * self.colors + c) * self.words;
        base..base + self.words
    }

    /// ORs the depth sets of all members of the component rooted at `root`.
    fn or_component(&self, root: u32, out: &mut [u64]) {
        let mut q = root;
        loop {
            or_into(out, self.dep_of(q as usize));
            q = self.next[q as usize];
            if q == root {
                break;
            }
        }
    }

    /// Would giving `u` color `c` keep its component within the bound?
    /// Adjacent roots are left in `self.roots`.
    fn feasible(&mut self, u: u32, c: usize) -> bool {
        let stride = self.stride;
        let mut scratch = std::mem::take(&mut self.scratch);
        let mut roots = std::mem::take(&mut self.roots);
        self.layout.clear(&mut scratch);
        self.layout
            .add_point(&mut scratch, self.window.coords(u as usize));
        roots.clear();
        for &q in self.nbrs_of(c, u) {
            if self.color[q as usize] as usize == c {
                let r = self.find(q);
                if !roots.contains(&r) {
                    roots.push(r);
                    let r = r as usize;
                    self.layout
                        .merge_into(&mut scratch, &self.ext[r * stride..(r + 1) * stride]);
                }
            }
        }
        let ok = self.layout.diameter(&scratch) <= self.diameter;
        self.scratch = scratch;
        self.roots = roots;
        ok
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut root, mut child) = (a, b);
        if self.size[root as usize] < self.size[child as usize] {
            std::mem::swap(&mut root, &mut child);
        }
        let s = self.stride;
        let (r, c) = (root as usize, child as usize);
        let saved = self.saved_ext.len();
        self.saved_ext.extend_from_slice(&self.ext[r * s..(r + 1) * s]);
        let (lo, hi) = if r < c {
            let (x, y) = self.ext.split_at_mut(c * s);
            (&mut x[r * s..(r + 1) * s], &y[..s])
        } else {
            let (x, y) = self.ext.split_at_mut(r * s);
            (&mut y[..s], &x[c * s..(c + 1) * s])
        };
        self.layout.merge_into(lo, hi);
        self.parent[c] = root;
        self.size[r] += self.size[c];
        self.next.swap(r, c);
        self.trail.push(Undo::Union { child, root, saved });
    }

    /// Assigns `p` color `c` with the depth set currently in
    /// `self.conflict`, and merges with equal-colored neighbours. On failure
    /// `self.conflict` holds the reason.
    fn assign(&mut self, p: u32, c: usize) -> bool {
        let pi = p as usize;
        let w = self.words;
        self.dep[pi * w..(pi + 1) * w].copy_from_slice(&self.conflict);
        self.color[pi] = c as u8;
        self.used[c] += 1;
        self.trail.push(Undo::Assign(p));
        let s = self.stride;
        self.layout.clear(&mut self.ext[pi * s..(pi + 1) * s]);
        self.layout
            .add_point(&mut self.ext[pi * s..(pi + 1) * s], self.window.coords(pi));
        let slot = self.nbr_slot[c];
        for k in 0..self.nbrs[slot][pi].len() {
            let q = self.nbrs[slot][pi][k];
            if self.color[q as usize] as usize == c {
                let (rq, rp) = (self.find(q), self.find(p));
                if rq != rp {
                    self.union(rp, rq);
                }
            }
        }
        let root = self.find(p);
        let r = root as usize;
        if self.layout.diameter(&self.ext[r * s..(r + 1) * s]) <= self.diameter {
            return true;
        }
        let mut out = std::mem::take(&mut self.conflict);
        out.iter_mut().for_each(|x| *x = 0);
        self.or_component(root, &mut out);
        self.conflict = out;
        false
    }

    fn undo_to(&mut self, mark: usize, saved_mark: usize) {
        let s = self.stride;
        while self.trail.len() > mark {
            match self.trail.pop().expect("len > mark") {
                Undo::Assign(p) => {
                    let p = p as usize;
                    self.used[self.color[p] as usize] -= 1;
                    self.color[p] = NONE;
                }
                Undo::Union { child, root, saved } => {
                    let (r, c) = (root as usize, child as usize);
                    self.next.swap(r, c);
                    self.size[r] -= self.size[c];
                    self.parent[c] = child;
                    self.ext[r * s..(r + 1) * s]
                        .copy_from_slice(&self.saved_ext[saved..saved + s]);
                }
                Undo::Domain { point, old } => self.domain[point as usize] = old,
            }
        }
        self.saved_ext.truncate(saved_mark);
    }

    /// Removes color `c` from `u`, blaming the components in `self.roots`.
    fn remove_color(&mut self, u: u32, c: usize) -> u32 {
        let old = self.domain[u as usize];
        self.trail.push(Undo::Domain { point: u, old });
        let d = old & !(1 << c);
        self.domain[u as usize] = d;
        let range = self.removal_slot(u as usize, c);
        let mut out = std::mem::take(&mut self.removal);
        out[range.clone()].iter_mut().for_each(|x| *x = 0);
        let roots = std::mem::take(&mut self.roots);
        for &r in &roots {
            self.or_component(r, &mut out[range.clone()]);
        }
        self.roots = roots;
        self.removal = out;
        d
    }

    /// Loads into `self.conflict` the reasons for every color missing from
    /// `u`'s domain.
    fn removal_reasons(&mut self, u: usize) {
        let mut out = std::mem::take(&mut self.conflict);
        out.iter_mut().for_each(|x| *x = 0);
        for c in 0..self.colors {
            if self.domain[u] & (1 << c) == 0 {
                or_into(&mut out, &self.removal[self.removal_slot(u, c)]);
            }
        }
        self.conflict = out;
    }

    /// Re-checks color `c` for unassigned points next to the component of
    /// `p`. Returns `false` on a wipe-out.
    fn recheck_around(&mut self, p: u32, c: usize) -> bool {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        let bit = 1u32 << c;
        let root = self.find(p);
        let mut q = root;
        loop {
            let slot = self.nbr_slot[c];
            for k in 0..self.nbrs[slot][q as usize].len() {
                let u = self.nbrs[slot][q as usize][k];
                let ui = u as usize;
                if self.color[ui] != NONE || self.stamp[ui] == self.epoch {
                    continue;
                }
                self.stamp[ui] = self.epoch;
                if self.domain[ui] & bit == 0 || self.feasible(u, c) {
                    continue;
                }
                match self.remove_color(u, c).count_ones() {
                    0 => {
                        self.removal_reasons(ui);
                        return false;
                    }
                    1 => self.queue.push(u),
                    _ => {}
                }
            }
            q = self.next[q as usize];
            if q == root {
                break;
            }
        }
        true
    }

    /// Assigns `p := c` with the depth set in `self.conflict`, then runs
    /// forced assignments to a fixpoint. On failure `self.conflict` holds the
    /// depths responsible.
    fn propagate(&mut self, p: u32, c: usize) -> bool {
        self.queue.clear();
        if !self.assign(p, c) || !self.recheck_around(p, c) {
            return false;
        }
        while let Some(u) = self.queue.pop() {
            let ui = u as usize;
            if self.color[ui] != NONE {
                continue;
            }
            let forced = self.domain[ui].trailing_zeros() as usize;
            self.removal_reasons(ui);
            if !self.assign(u, forced) || !self.recheck_around(u, forced) {
                return false;
            }
        }
        true
    }

    /// Branches `p := c` at the current depth.
    fn decide(&mut self, p: u32, c: usize) -> bool {
        self.conflict.iter_mut().for_each(|x| *x = 0);
        self.conflict[self.depth / 64] |= 1 << (self.depth % 64);
        self.propagate(p, c)
    }

    /// Fewest remaining colors first, then closest to the first point.
    fn pick(&self) -> Option<usize> {
        (0..self.color.len())
            .filter(|&i| self.color[i] == NONE)
            .min_by_key(|&i| (self.domain[i].count_ones(), self.rank[i]))
    }

    /// Fixes colors before the search starts. Consequences of these carry an
    /// empty depth set. Returns `false` if they already conflict.
    pub(crate) fn fix(&mut self, assignments: &[(usize, u8)]) -> bool {
        for &(p, c) in assignments {
            let c = c as usize;
            if self.color[p] != NONE {
                if self.color[p] as usize != c {
                    return false;
                }
                continue;
            }
            self.conflict.iter_mut().for_each(|x| *x = 0);
            if self.domain[p] & (1 << c) == 0 || !self.propagate(p as u32, c) {
                return false;
            }
        }
        true
    }

    /// Is color `c` passed over because a lower color of the same class is
    /// still unused?
    fn symmetric(&self, c: usize) -> bool {
        if self.used[c] > 0 {
            return false;
        }
        let class = self.class_of[c];
        (0..c).any(|d| self.class_of[d] == class && self.used[d] == 0)
    }

    /// Canonical description of the remaining subproblem.
    fn frontier_key(&mut self) -> Box<[i64]> {
        let n = self.color.len();
        let mut key: Vec<i64> = Vec::with_capacity(n / 64 + 32);
        let mut word = 0i64;
        for i in 0..n {
            if self.color[i] == NONE {
                word |= 1 << (i % 64);
            }
            if i % 64 == 63 || i + 1 == n {
                key.push(word);
                word = 0;
            }
        }
        let mut roots = std::mem::take(&mut self.roots);
        roots.clear();
        for p in 0..n {
            let c = self.color[p];
            if c == NONE {
                continue;
            }
            let live = self
                .nbrs_of(c as usize, p as u32)
                .iter()
                .any(|&q| self.color[q as usize] == NONE);
            if !live {
                continue;
            }
            let r = self.find(p as u32);
            if self.labels[r as usize] == u32::MAX {
                self.labels[r as usize] = roots.len() as u32;
                roots.push(r);
            }
            key.push(p as i64);
            key.push(((self.labels[r as usize] as i64) << 8) | c as i64);
        }
        key.push(-1);
        let s = self.stride;
        for &r in &roots {
            let r = r as usize;
            let ext = &self.ext[r * s..(r + 1) * s];
            match &self.clamp {
                Some(clamp) => {
                    for (pair, &(lo, hi)) in ext.chunks_exact(2).zip(clamp) {
                        key.push(pair[0].max(lo));
                        key.push(pair[1].min(hi));
                    }
                }
                None => key.extend_from_slice(ext),
            }
            self.labels[r] = u32::MAX;
        }
        self.roots = roots;
        key.into_boxed_slice()
    }

    fn remember(&mut self, key: Option<Box<[i64]>>) {
        if let Some(key) = key {
            if self.memo_words + key.len() <= MEMO_WORDS {
                self.memo_words += key.len();
                self.nogoods.insert(key);
            }
        }
    }

    fn all_below(&self, depth: usize) -> Vec<u64> {
        let mut v = vec![0u64; self.words];
        for k in 0..depth {
            v[k / 64] |= 1 << (k % 64);
        }
        v
    }

    pub(crate) fn run(&mut self) -> Outcome {
        let mut frames: Vec<Frame> = Vec::new();
        let mut descend = true;
        loop {
            if descend {
                let Some(p) = self.pick() else {
                    return Outcome::Sat(self.color.clone());
                };
                let mut key = None;
                if !frames.is_empty() {
                    let k = self.frontier_key();
                    if self.nogoods.contains(&k) {
                        self.stats.prunes += 1;
                        let depth = frames.len();
                        let all = self.all_below(depth);
                        let parent = frames.last_mut().expect("non-empty");
                        or_into(&mut parent.conflict, &all);
                        let (m, s) = (parent.mark, parent.saved_mark);
                        self.undo_to(m, s);
                        descend = false;
                        continue;
                    }
                    key = Some(k);
                }
                frames.push(Frame {
                    point: p as u32,
                    next_color: 0,
                    mark: self.trail.len(),
                    saved_mark: self.saved_ext.len(),
                    key,
                    conflict: vec![0; self.words],
                    skipped: false,
                });
            }
            let depth = frames.len() - 1;
            let frame = frames.last_mut().expect("non-empty");
            let (p, mark, saved_mark) = (frame.point as usize, frame.mark, frame.saved_mark);
            let mut chosen = None;
            while (frame.next_color as usize) < self.colors {
                let c = frame.next_color as usize;
                frame.next_color += 1;
                if self.domain[p] & (1 << c) == 0 {
                    or_into(&mut frame.conflict, &self.removal[self.removal_slot(p, c)]);
                } else if self.symmetric(c) {
                    frame.skipped = true;
                } else {
                    chosen = Some(c);
                    break;
                }
            }
            match chosen {
                Some(c) => {
                    self.stats.nodes += 1;
                    if self.stats.nodes > self.budget {
                        return Outcome::Unknown;
                    }
                    self.depth = depth;
                    if self.decide(p as u32, c) {
                        descend = true;
                    } else {
                        self.stats.prunes += 1;
                        let frame = frames.last_mut().expect("non-empty");
                        or_into(&mut frame.conflict, &self.conflict);
                        self.undo_to(mark, saved_mark);
                        descend = false;
                    }
                }
                None => {
                    let done = frames.pop().expect("non-empty");
                    let mut cs = done.conflict;
                    cs[depth / 64] &= !(1 << (depth % 64));
                    if done.skipped {
                        or_into(&mut cs, &self.all_below(depth));
                    }
                    self.remember(done.key);
                    let Some(target) = highest_bit(&cs) else {
                        return Outcome::Unsat;
                    };
                    while frames.len() > target + 1 {
                        let f = frames.pop().expect("above target");
                        self.remember(f.key);
                    }
                    let parent = frames.last_mut().expect("target frame");
                    or_into(&mut parent.conflict, &cs);
                    let (m, s) = (parent.mark, parent.saved_mark);
                    self.undo_to(m, s);
                    descend = false;
                }
            }
        }
    }
}
