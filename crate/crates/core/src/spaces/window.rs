//! Finite windows: origin-centred sup-norm balls of the example spaces, or
//! arbitrary explicit point lists.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{level_gap, ExtentLayout, Metric, Point};
use crate::error::{Error, Result};

/// How to truncate one of the infinite spaces. Serialized with a `family`
/// tag, e.g. `{"family":"lomega","side":6,"level_cap":3}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum WindowSpec {
    /// `ℤⁿ ∩ [-side, side]ⁿ`.
    Zn { dims: usize, side: i64 },
    /// `(kℤ)ⁿ ∩ [-side, side]ⁿ`.
    Kzn { dims: usize, scale: i64, side: i64 },
    /// Levels `1..=level_cap` of `L_ω`: level `k` is `(kℤ)ᵏ ∩ [-side, side]ᵏ`.
    Lomega { side: i64, level_cap: usize },
    /// Levels `1..=level_cap` of `L_∞`: level `k` is `ℤᵏ ∩ [-side, side]ᵏ`.
    Linf { side: i64, level_cap: usize },
}

impl WindowSpec {
    pub fn side(&self) -> i64 {
        match *self {
            WindowSpec::Zn { side, .. }
            | WindowSpec::Kzn { side, .. }
            | WindowSpec::Lomega { side, .. }
            | WindowSpec::Linf { side, .. } => side,
        }
    }

    /// Same family and parameters with a different side bound.
    pub fn with_side(&self, side: i64) -> WindowSpec {
        let mut s = self.clone();
        match &mut s {
            WindowSpec::Zn { side: x, .. }
            | WindowSpec::Kzn { side: x, .. }
            | WindowSpec::Lomega { side: x, .. }
            | WindowSpec::Linf { side: x, .. } => *x = side,
        }
        s
    }
}

/// A full grid `(scale·ℤ)^dim ∩ [-side, side]^dim` stored contiguously in
/// lexicographic order starting at window index `start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sheet {
    pub start: usize,
    pub dim: usize,
    pub scale: i64,
    /// Steps on each side of the origin: `⌊side / scale⌋`.
    pub half: i64,
}

impl Sheet {
    fn edge(&self) -> usize {
        (2 * self.half + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.edge().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn stride(&self, axis: usize) -> usize {
        self.edge().pow((self.dim - 1 - axis) as u32)
    }

    /// Local index of a coordinate vector, if it lies on the grid.
    fn local_index(&self, coords: &[i64]) -> Option<usize> {
        if coords.len() != self.dim {
            return None;
        }
        let mut idx = 0usize;
        for &x in coords {
            if x % self.scale != 0 {
                return None;
            }
            let step = x / self.scale;
            if step.abs() > self.half {
                return None;
            }
            idx = idx * self.edge() + (step + self.half) as usize;
        }
        Some(idx)
    }

    /// Visits every grid point whose coordinates lie in the per-axis closed
    /// intervals `bounds`.
    fn for_each_in_box(&self, bounds: &[(i64, i64)], mut f: impl FnMut(usize)) {
        debug_assert_eq!(bounds.len(), self.dim);
        let mut lo = Vec::with_capacity(self.dim);
        let mut hi = Vec::with_capacity(self.dim);
        for &(a, b) in bounds {
            let a = a.max(-self.half * self.scale);
            let b = b.min(self.half * self.scale);
            if a > b {
                return;
            }
            // smallest multiple of scale ≥ a, largest ≤ b, as step counts
            let s_lo = a.div_euclid(self.scale) + i64::from(a.rem_euclid(self.scale) != 0);
            let s_hi = b.div_euclid(self.scale);
            if s_lo > s_hi {
                return;
            }
            lo.push(s_lo + self.half);
            hi.push(s_hi + self.half);
        }
        let mut cur = lo.clone();
        loop {
            let idx = cur
                .iter()
                .fold(0usize, |acc, &c| acc * self.edge() + c as usize);
            f(self.start + idx);
            let mut axis = self.dim;
            loop {
                if axis == 0 {
                    return;
                }
                axis -= 1;
                if cur[axis] < hi[axis] {
                    cur[axis] += 1;
                    break;
                }
                cur[axis] = lo[axis];
            }
        }
    }
}

/// A finite point set with an exact integer metric.
#[derive(Debug)]
pub struct Window {
    metric: Metric,
    flat: Vec<i64>,
    offsets: Vec<usize>,
    sheets: Vec<Sheet>,
    lookup: HashMap<Vec<i64>, usize>,
    spec: Option<WindowSpec>,
    matrix: OnceLock<Vec<u64>>,
}

impl Clone for Window {
    fn clone(&self) -> Self {
        Window {
            metric: self.metric,
            flat: self.flat.clone(),
            offsets: self.offsets.clone(),
            sheets: self.sheets.clone(),
            lookup: self.lookup.clone(),
            spec: self.spec.clone(),
            matrix: OnceLock::new(),
        }
    }
}

impl PartialEq for Window {
    fn eq(&self, other: &Self) -> bool {
        self.metric == other.metric && self.flat == other.flat && self.offsets == other.offsets
    }
}

impl Eq for Window {}

/// Explicit serialized form.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WindowDoc {
    pub metric: Metric,
    pub points: Vec<Point>,
}

impl Window {
    /// Enumerates the window described by `spec` in level-major,
    /// lexicographic order.
    pub fn from_spec(spec: &WindowSpec) -> Result<Window> {
        let side = spec.side();
        if side < 0 {
            return Err(Error::Window(format!("side bound {side} leaves no points")));
        }
        let (metric, layers): (Metric, Vec<(usize, i64)>) = match *spec {
            WindowSpec::Zn { dims, .. } => (Metric::Sup, vec![(dims, 1)]),
            WindowSpec::Kzn { dims, scale, .. } => {
                if scale < 1 {
                    return Err(Error::Window("scale must be at least 1".into()));
                }
                (Metric::Sup, vec![(dims, scale)])
            }
            WindowSpec::Lomega { level_cap, .. } => {
                (Metric::Tower, (1..=level_cap).map(|k| (k, k as i64)).collect())
            }
            WindowSpec::Linf { level_cap, .. } => {
                (Metric::Tower, (1..=level_cap).map(|k| (k, 1)).collect())
            }
        };
        if layers.is_empty() {
            return Err(Error::Window("level cap must be at least 1".into()));
        }
        if layers.iter().any(|&(d, _)| d == 0) {
            return Err(Error::Window("dimension must be at least 1".into()));
        }
        let mut sheets = Vec::new();
        let mut start = 0;
        for (dim, scale) in layers {
            let sheet = Sheet {
                start,
                dim,
                scale,
                half: side / scale,
            };
            start += sheet.len();
            sheets.push(sheet);
        }
        let total = start;
        let mut flat = Vec::new();
        let mut offsets = Vec::with_capacity(total + 1);
        offsets.push(0);
        for sheet in &sheets {
            let edge = sheet.edge();
            for local in 0..sheet.len() {
                let base = flat.len();
                flat.resize(base + sheet.dim, 0);
                let mut rem = local;
                for axis in (0..sheet.dim).rev() {
                    let step = (rem % edge) as i64 - sheet.half;
                    flat[base + axis] = step * sheet.scale;
                    rem /= edge;
                }
                offsets.push(flat.len());
            }
        }
        Ok(Window {
            metric,
            flat,
            offsets,
            sheets,
            lookup: HashMap::new(),
            spec: Some(spec.clone()),
            matrix: OnceLock::new(),
        })
    }

    /// A window over explicitly listed points, kept in the given order.
    pub fn from_points(metric: Metric, points: &[Point]) -> Result<Window> {
        if points.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut flat = Vec::new();
        let mut offsets = vec![0];
        let mut lookup = HashMap::with_capacity(points.len());
        let dim0 = points[0].coords().len();
        for (i, p) in points.iter().enumerate() {
            match (metric, p) {
                (Metric::Sup, Point::Lattice(lp)) if lp.dim() != dim0 => {
                    return Err(Error::DimensionMismatch {
                        left: dim0,
                        right: lp.dim(),
                    })
                }
                (Metric::Sup, Point::Lattice(_)) | (Metric::Tower, Point::Tower(_)) => {}
                _ => {
                    return Err(Error::Window(format!(
                        "point {p} does not belong to a {metric:?} space"
                    )))
                }
            }
            if lookup.insert(p.coords().to_vec(), i).is_some() {
                return Err(Error::Window(format!("duplicate point {p}")));
            }
            flat.extend_from_slice(p.coords());
            offsets.push(flat.len());
        }
        Ok(Window {
            metric,
            flat,
            offsets,
            sheets: Vec::new(),
            lookup,
            spec: None,
            matrix: OnceLock::new(),
        })
    }

    pub fn from_doc(doc: &WindowDoc) -> Result<Window> {
        Self::from_points(doc.metric, &doc.points)
    }

    /// Accepts either a [`WindowSpec`] (has a `family` key) or a
    /// [`WindowDoc`].
    pub fn from_json(value: &serde_json::Value) -> Result<Window> {
        if value.get("family").is_some() {
            let spec: WindowSpec = serde_json::from_value(value.clone())?;
            Self::from_spec(&spec)
        } else {
            let doc: WindowDoc = serde_json::from_value(value.clone())?;
            Self::from_doc(&doc)
        }
    }

    pub fn to_doc(&self) -> WindowDoc {
        WindowDoc {
            metric: self.metric,
            points: self.points(),
        }
    }

    /// The sub-window on the given indices, in the given order.
    pub fn restrict(&self, keep: &[usize]) -> Result<Window> {
        let pts: Vec<Point> = keep.iter().map(|&i| self.point(i)).collect();
        Self::from_points(self.metric, &pts)
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn spec(&self) -> Option<&WindowSpec> {
        self.spec.as_ref()
    }

    pub fn sheets(&self) -> &[Sheet] {
        &self.sheets
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn coords(&self, i: usize) -> &[i64] {
        &self.flat[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Tower level (or lattice dimension) of point `i`.
    pub fn level(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn point(&self, i: usize) -> Point {
        let c = self.coords(i).to_vec();
        match self.metric {
            Metric::Sup => Point::lattice(c),
            Metric::Tower => Point::tower(c).expect("tower points have level ≥ 1"),
        }
    }

    pub fn points(&self) -> Vec<Point> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    pub fn index_of(&self, p: &Point) -> Option<usize> {
        match (self.metric, p) {
            (Metric::Sup, Point::Lattice(_)) | (Metric::Tower, Point::Tower(_)) => {}
            _ => return None,
        }
        self.index_of_coords(p.coords())
    }

    pub fn index_of_coords(&self, coords: &[i64]) -> Option<usize> {
        if self.sheets.is_empty() {
            return self.lookup.get(coords).copied();
        }
        self.sheets
            .iter()
            .find(|s| s.dim == coords.len())
            .and_then(|s| s.local_index(coords).map(|l| s.start + l))
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> u64 {
        if let Some(m) = self.matrix.get() {
            return m[i * self.len() + j];
        }
        self.metric.raw_distance(self.coords(i), self.coords(j))
    }

    /// Full distance matrix, computed once and reused by [`Window::dist`].
    pub fn distance_matrix(&self) -> &[u64] {
        self.matrix.get_or_init(|| {
            let n = self.len();
            let mut m = vec![0; n * n];
            for i in 0..n {
                for j in i + 1..n {
                    let d = self.metric.raw_distance(self.coords(i), self.coords(j));
                    m[i * n + j] = d;
                    m[j * n + i] = d;
                }
            }
            m
        })
    }

    pub fn extent_layout(&self) -> ExtentLayout {
        let widest = (0..self.len()).map(|i| self.level(i)).max().unwrap_or(0);
        match self.metric {
            Metric::Sup => ExtentLayout::Sup { dims: widest },
            Metric::Tower => ExtentLayout::Tower { max_level: widest },
        }
    }

    /// Exact diameter of a set of window indices (zero when empty).
    pub fn diameter(&self, set: &[usize]) -> u64 {
        let layout = self.extent_layout();
        let mut slot = vec![0; layout.stride()];
        layout.clear(&mut slot);
        for &i in set {
            layout.add_point(&mut slot, self.coords(i));
        }
        layout.diameter(&slot)
    }

    /// `(d(A, B), diam A)` with `d` the minimum pairwise distance.
    pub fn set_metrics(&self, a: &[usize], b: &[usize]) -> Result<(u64, u64)> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut distance = u64::MAX;
        for &x in a {
            for &y in b {
                distance = distance.min(self.dist(x, y));
            }
        }
        Ok((distance, self.diameter(a)))
    }

    /// Calls `f(j)` for every window point `j` with `d(i, j) ≤ radius`,
    /// including `i` itself.
    pub fn for_each_within(&self, i: usize, radius: u64, mut f: impl FnMut(usize)) {
        if self.sheets.is_empty() {
            for j in 0..self.len() {
                if self.dist(i, j) <= radius {
                    f(j);
                }
            }
            return;
        }
        let r = i64::try_from(radius).unwrap_or(i64::MAX / 4);
        let a = self.coords(i);
        let l = a.len();
        for sheet in &self.sheets {
            let k = sheet.dim;
            if self.metric == Metric::Tower && level_gap(l, k) > radius {
                continue;
            }
            if self.metric == Metric::Sup && k != l {
                continue;
            }
            // coordinates of `a` beyond level k are compared against padding zeros
            if a.iter().skip(k).any(|&x| x.unsigned_abs() > radius) {
                continue;
            }
            let bounds: Vec<(i64, i64)> = (0..k)
                .map(|j| {
                    let c = a.get(j).copied().unwrap_or(0);
                    (c.saturating_sub(r), c.saturating_add(r))
                })
                .collect();
            sheet.for_each_in_box(&bounds, &mut f);
        }
    }

    pub fn within(&self, i: usize, radius: u64) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_within(i, radius, |j| out.push(j));
        out
    }

    /// `N_R(A)`: every window point at distance `≤ radius` from `set`,
    /// sorted by index.
    pub fn neighborhood(&self, set: &[usize], radius: u64) -> Vec<usize> {
        let mut mark = vec![false; self.len()];
        for &i in set {
            self.for_each_within(i, radius, |j| mark[j] = true);
        }
        mark.iter()
            .enumerate()
            .filter_map(|(j, &m)| m.then_some(j))
            .collect()
    }

    /// Finds two points with distinct non-zero labels at distance `< r`.
    ///
    /// `labels[i] == 0` means "unlabelled". Full-grid sheets are scanned with
    /// a separable min/max box filter, which is exact for the sup-metric.
    pub fn find_close_pair(&self, labels: &[u32], r: u64) -> Option<(usize, usize)> {
        assert_eq!(labels.len(), self.len());
        if r <= 1 {
            return None;
        }
        let reach = r - 1;
        if self.sheets.is_empty() {
            let labelled: Vec<usize> = (0..self.len()).filter(|&i| labels[i] != 0).collect();
            for (n, &i) in labelled.iter().enumerate() {
                for &j in &labelled[n + 1..] {
                    if labels[i] != labels[j] && self.dist(i, j) <= reach {
                        return Some((i, j));
                    }
                }
            }
            return None;
        }
        let partner = |i: usize| {
            let mut hit = None;
            self.for_each_within(i, reach, |j| {
                if hit.is_none() && labels[j] != 0 && labels[j] != labels[i] {
                    hit = Some(j);
                }
            });
            hit.map(|j| (i.min(j), i.max(j)))
        };
        for sheet in &self.sheets {
            let w = i64::try_from(reach).unwrap_or(i64::MAX) / sheet.scale;
            if w == 0 {
                continue;
            }
            let slice = &labels[sheet.start..sheet.start + sheet.len()];
            let (lo, hi) = box_min_max(sheet, slice, w.min(2 * sheet.half) as usize);
            for (local, &lab) in slice.iter().enumerate() {
                if lab != 0 && (lo[local] != lab || hi[local] != lab) {
                    if let Some(p) = partner(sheet.start + local) {
                        return Some(p);
                    }
                }
            }
        }
        if self.metric == Metric::Tower {
            for (si, lower) in self.sheets.iter().enumerate() {
                for upper in &self.sheets[si + 1..] {
                    if level_gap(lower.dim, upper.dim) > reach {
                        continue;
                    }
                    for i in lower.start..lower.start + lower.len() {
                        if labels[i] == 0 {
                            continue;
                        }
                        let a = self.coords(i);
                        let r = reach as i64;
                        let bounds: Vec<(i64, i64)> = (0..upper.dim)
                            .map(|j| {
                                let c = a.get(j).copied().unwrap_or(0);
                                (c - r, c + r)
                            })
                            .collect();
                        let mut hit = None;
                        upper.for_each_in_box(&bounds, |j| {
                            if hit.is_none() && labels[j] != 0 && labels[j] != labels[i] {
                                hit = Some(j);
                            }
                        });
                        if let Some(j) = hit {
                            return Some((i, j));
                        }
                    }
                }
            }
        }
        None
    }

    /// One CSV row per point: `index,level,c1,c2,...`.
    pub fn points_csv(&self) -> String {
        let mut out = String::from("index,level,coords\n");
        for i in 0..self.len() {
            let coords: Vec<String> = self.coords(i).iter().map(|c| c.to_string()).collect();
            let _ = writeln!(out, "{},{},{}", i, self.level(i), coords.join(" "));
        }
        out
    }

    pub fn distance_matrix_csv(&self) -> String {
        let n = self.len();
        let m = self.distance_matrix();
        let mut out = String::new();
        for i in 0..n {
            let row: Vec<String> = m[i * n..(i + 1) * n].iter().map(|d| d.to_string()).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Min and max of non-zero labels over the box of half-width `w` (in grid
/// steps) around each grid point. Zero entries are ignored; a box with no
/// labels yields `(u32::MAX, 0)`.
fn box_min_max(sheet: &Sheet, labels: &[u32], w: usize) -> (Vec<u32>, Vec<u32>) {
    let mut lo: Vec<u32> = labels
        .iter()
        .map(|&l| if l == 0 { u32::MAX } else { l })
        .collect();
    let mut hi: Vec<u32> = labels.to_vec();
    let edge = sheet.edge();
    let mut buf_lo = vec![0u32; edge];
    let mut buf_hi = vec![0u32; edge];
    for axis in 0..sheet.dim {
        let stride = sheet.stride(axis);
        let block = stride * edge;
        for base in (0..labels.len()).step_by(block) {
            for off in 0..stride {
                let at = |t: usize| base + off + t * stride;
                for t in 0..edge {
                    let (a, b) = (t.saturating_sub(w), (t + w).min(edge - 1));
                    let mut mn = u32::MAX;
                    let mut mx = 0;
                    for u in a..=b {
                        mn = mn.min(lo[at(u)]);
                        mx = mx.max(hi[at(u)]);
                    }
                    buf_lo[t] = mn;
                    buf_hi[t] = mx;
                }
                for t in 0..edge {
                    lo[at(t)] = buf_lo[t];
                    hi[at(t)] = buf_hi[t];
                }
            }
        }
    }
    (lo, hi)
}
