//! Integer metric spaces: `ℤⁿ` and `(kℤ)ⁿ` under the sup-metric, and the
//! tower spaces `L_∞ = ⋃ ℤᵏ`, `L_ω = ⋃ (kℤ)ᵏ` under the level-gap metric.
//!
//! Everything is exact integer arithmetic. Finite truncations live in
//! [`Window`].

mod extent;
mod window;

pub use extent::{Extent, ExtentLayout};
pub use window::{Sheet, Window, WindowSpec};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of `ℤⁿ` (or of a scaled sublattice).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl From<Vec<i64>> for LatticePoint {
    fn from(v: Vec<i64>) -> Self {
        LatticePoint(v)
    }
}

/// A point on level `k` of a tower space; it has exactly `k` coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawTowerPoint")]
pub struct TowerPoint {
    level: usize,
    coords: Vec<i64>,
}

#[derive(Deserialize)]
struct RawTowerPoint {
    level: usize,
    coords: Vec<i64>,
}

impl TryFrom<RawTowerPoint> for TowerPoint {
    type Error = Error;

    fn try_from(raw: RawTowerPoint) -> Result<Self> {
        TowerPoint::new(raw.level, raw.coords)
    }
}

impl TowerPoint {
    pub fn new(level: usize, coords: Vec<i64>) -> Result<Self> {
        if level == 0 {
            return Err(Error::Window("tower levels start at 1".into()));
        }
        if coords.len() != level {
            return Err(Error::DimensionMismatch {
                left: level,
                right: coords.len(),
            });
        }
        Ok(TowerPoint { level, coords })
    }

    /// Shorthand: the level is the number of coordinates.
    pub fn from_coords(coords: Vec<i64>) -> Result<Self> {
        Self::new(coords.len(), coords)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }
}

/// A window point. Serializes as a bare integer array (lattice) or as
/// `{"level":k,"coords":[..]}` (tower).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Lattice(LatticePoint),
    Tower(TowerPoint),
}

impl Point {
    pub fn coords(&self) -> &[i64] {
        match self {
            Point::Lattice(p) => &p.0,
            Point::Tower(p) => &p.coords,
        }
    }

    pub fn lattice(coords: Vec<i64>) -> Self {
        Point::Lattice(LatticePoint(coords))
    }

    pub fn tower(coords: Vec<i64>) -> Result<Self> {
        TowerPoint::from_coords(coords).map(Point::Tower)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Lattice(p) => write!(f, "{:?}", p.0),
            Point::Tower(p) => write!(f, "L{}{:?}", p.level, p.coords),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Sup-metric on a single lattice `ℤⁿ`.
    Sup,
    /// The zero-padding tower metric with level gaps.
    Tower,
}

impl Metric {
    pub fn distance(self, a: &Point, b: &Point) -> Result<u64> {
        match (self, a, b) {
            (Metric::Sup, Point::Lattice(a), Point::Lattice(b)) => sup_dist(a, b),
            (Metric::Tower, Point::Tower(a), Point::Tower(b)) => Ok(tower_dist(a, b)),
            _ => Err(Error::Window(format!(
                "points {a} and {b} do not belong to a {self:?} space"
            ))),
        }
    }

    /// Distance on raw coordinate slices; the tower level is the slice length.
    #[inline]
    pub(crate) fn raw_distance(self, a: &[i64], b: &[i64]) -> u64 {
        match self {
            Metric::Sup => sup_raw(a, b),
            Metric::Tower => tower_raw(a, b),
        }
    }
}

/// `max |aᵢ - bᵢ|`.
pub fn sup_dist(a: &LatticePoint, b: &LatticePoint) -> Result<u64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(sup_raw(&a.0, &b.0))
}

#[inline]
fn sup_raw(a: &[i64], b: &[i64]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.abs_diff(*y))
        .max()
        .unwrap_or(0)
}

/// Gap `l + (l+1) + … + (k-1)` between levels `l ≤ k`; zero when `l == k`.
#[inline]
pub fn level_gap(l: usize, k: usize) -> u64 {
    let (l, k) = if l <= k { (l, k) } else { (k, l) };
    let tri = |m: usize| (m as u64) * (m as u64 - 1) / 2;
    tri(k) - tri(l)
}

/// Tower distance: pad the lower-level point with zeros, take the sup-metric,
/// then the maximum with the level gap.
pub fn tower_dist(a: &TowerPoint, b: &TowerPoint) -> u64 {
    tower_raw(&a.coords, &b.coords)
}

#[inline]
fn tower_raw(a: &[i64], b: &[i64]) -> u64 {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut d = level_gap(short.len(), long.len());
    for (i, y) in long.iter().enumerate() {
        let x = short.get(i).copied().unwrap_or(0);
        d = d.max(x.abs_diff(*y));
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(v: &[i64]) -> LatticePoint {
        LatticePoint(v.to_vec())
    }

    fn tp(v: &[i64]) -> TowerPoint {
        TowerPoint::from_coords(v.to_vec()).unwrap()
    }

    #[test]
    fn sup_dist_examples() {
        assert_eq!(sup_dist(&lp(&[0, 0]), &lp(&[0, 0])).unwrap(), 0);
        assert_eq!(sup_dist(&lp(&[3, 4]), &lp(&[5, 1])).unwrap(), 3);
        assert_eq!(sup_dist(&lp(&[-2, 7, 0]), &lp(&[4, 7, -1])).unwrap(), 6);
        assert!(matches!(
            sup_dist(&lp(&[1]), &lp(&[1, 2])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn level_gap_values() {
        assert_eq!(level_gap(2, 2), 0);
        assert_eq!(level_gap(1, 2), 1);
        assert_eq!(level_gap(1, 3), 3);
        assert_eq!(level_gap(3, 1), 3);
        assert_eq!(level_gap(2, 5), 2 + 3 + 4);
    }

    #[test]
    fn tower_dist_examples() {
        assert_eq!(tower_dist(&tp(&[3, 4]), &tp(&[5, 1])), 3);
        assert_eq!(tower_dist(&tp(&[0]), &tp(&[0, 0, 0])), 3);
        assert_eq!(tower_dist(&tp(&[6]), &tp(&[1, 7, 0])), 7);
        assert_eq!(tower_dist(&tp(&[1, 7, 0]), &tp(&[6])), 7);
    }

    #[test]
    fn tower_point_validation() {
        assert!(TowerPoint::new(0, vec![]).is_err());
        assert!(TowerPoint::new(2, vec![1]).is_err());
        let p: Point = serde_json::from_str(r#"{"level":2,"coords":[1,2]}"#).unwrap();
        assert_eq!(p, Point::tower(vec![1, 2]).unwrap());
        assert!(serde_json::from_str::<Point>(r#"{"level":3,"coords":[1,2]}"#).is_err());
        let q: Point = serde_json::from_str("[4,5]").unwrap();
        assert_eq!(q, Point::lattice(vec![4, 5]));
    }

    #[test]
    fn metric_rejects_mixed_kinds() {
        let a = Point::lattice(vec![0]);
        let b = Point::tower(vec![0]).unwrap();
        assert!(Metric::Sup.distance(&a, &b).is_err());
        assert!(Metric::Tower.distance(&a, &a).is_err());
    }
}
