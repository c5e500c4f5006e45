//! Families of blocks, colored covers and their validator.
//!
//! A colored cover is a list of `(radius, family)` entries. It is valid for a
//! window `W` and bound `D` when the blocks jointly cover `W`, each family's
//! distinct blocks are at set-distance `≥ radius`, and every block has
//! diameter `≤ D`.

mod construct;

pub use construct::{build_lomega_cover, build_zn_cover, containment_radius, LomegaCover};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{Point, Window};

/// A set of non-empty, pairwise disjoint blocks.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFamily")]
pub struct Family {
    blocks: Vec<Vec<Point>>,
}

#[derive(Deserialize)]
struct RawFamily {
    blocks: Vec<Vec<Point>>,
}

impl TryFrom<RawFamily> for Family {
    type Error = Error;

    fn try_from(raw: RawFamily) -> Result<Self> {
        Family::new(raw.blocks)
    }
}

impl Family {
    pub fn new(blocks: Vec<Vec<Point>>) -> Result<Family> {
        let mut seen = std::collections::HashSet::new();
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::Cover("empty block".into()));
            }
            for p in b {
                if !seen.insert(p) {
                    return Err(Error::Cover(format!("point {p} lies in two blocks")));
                }
            }
        }
        Ok(Family { blocks })
    }

    /// Builds a family from blocks of window indices.
    pub fn from_indices(window: &Window, blocks: &[Vec<usize>]) -> Result<Family> {
        Family::new(
            blocks
                .iter()
                .map(|b| b.iter().map(|&i| window.point(i)).collect())
                .collect(),
        )
    }

    pub fn blocks(&self) -> &[Vec<Point>] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<Vec<Point>> {
        self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Resolves blocks to window indices; points outside the window are
    /// returned separately.
    fn resolve(&self, window: &Window) -> (Vec<Vec<usize>>, Vec<Point>) {
        let mut outside = Vec::new();
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                b.iter()
                    .filter_map(|p| {
                        let idx = window.index_of(p);
                        if idx.is_none() {
                            outside.push(p.clone());
                        }
                        idx
                    })
                    .collect()
            })
            .collect();
        (blocks, outside)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverEntry {
    pub radius: u64,
    #[serde(flatten)]
    pub family: Family,
}

/// JSON: `{"entries":[{"radius":r,"blocks":[[point,...],...]},...]}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoredCover {
    pub entries: Vec<CoverEntry>,
}

impl ColoredCover {
    pub fn radii(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.radius).collect()
    }

    /// Largest block diameter in `window` (points outside are ignored).
    pub fn max_diameter(&self, window: &Window) -> u64 {
        self.entries
            .iter()
            .flat_map(|e| e.family.resolve(window).0)
            .map(|b| window.diameter(&b))
            .max()
            .unwrap_or(0)
    }

    /// Intersects every block with `sub`, dropping blocks that become empty.
    pub fn restrict_to(&self, sub: &Window) -> ColoredCover {
        ColoredCover {
            entries: self
                .entries
                .iter()
                .map(|e| CoverEntry {
                    radius: e.radius,
                    family: Family {
                        blocks: e
                            .family
                            .blocks
                            .iter()
                            .map(|b| {
                                b.iter()
                                    .filter(|p| sub.index_of(p).is_some())
                                    .cloned()
                                    .collect::<Vec<_>>()
                            })
                            .filter(|b| !b.is_empty())
                            .collect(),
                    },
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    pub radius: u64,
    pub disjoint: bool,
    /// Two points from distinct blocks closer than `radius`, with their
    /// distance.
    pub violation: Option<(Point, Point, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverReport {
    pub covered: bool,
    pub uncovered: usize,
    pub first_uncovered: Option<Point>,
    pub families: Vec<FamilyReport>,
    pub bounded: bool,
    pub max_block_diameter: u64,
    pub oversized_blocks: usize,
    pub outside_points: Vec<Point>,
}

impl CoverReport {
    pub fn accepted(&self) -> bool {
        self.covered
            && self.bounded
            && self.outside_points.is_empty()
            && self.families.iter().all(|f| f.disjoint)
    }
}

/// Checks coverage, per-family separation and the diameter bound
/// independently of one another.
pub fn validate_cover(cover: &ColoredCover, window: &Window, diameter: u64) -> CoverReport {
    let n = window.len();
    let mut covered = vec![false; n];
    let mut outside_points = Vec::new();
    let mut families = Vec::with_capacity(cover.entries.len());
    let mut max_block_diameter = 0;
    let mut oversized_blocks = 0;
    let mut labels = vec![0u32; n];

    for entry in &cover.entries {
        let (blocks, outside) = entry.family.resolve(window);
        outside_points.extend(outside);
        labels.iter_mut().for_each(|l| *l = 0);
        let mut violation = None;
        for (b, block) in blocks.iter().enumerate() {
            let d = window.diameter(block);
            max_block_diameter = max_block_diameter.max(d);
            if d > diameter {
                oversized_blocks += 1;
            }
            for &i in block {
                covered[i] = true;
                if labels[i] != 0 && violation.is_none() {
                    violation = Some((window.point(i), window.point(i), 0));
                }
                labels[i] = b as u32 + 1;
            }
        }
        if violation.is_none() {
            violation = window
                .find_close_pair(&labels, entry.radius)
                .map(|(i, j)| (window.point(i), window.point(j), window.dist(i, j)));
        }
        families.push(FamilyReport {
            radius: entry.radius,
            disjoint: violation.is_none() && entry.radius >= 1,
            violation,
        });
    }

    let uncovered = covered.iter().filter(|c| !**c).count();
    CoverReport {
        covered: uncovered == 0,
        uncovered,
        first_uncovered: covered.iter().position(|c| !c).map(|i| window.point(i)),
        families,
        bounded: oversized_blocks == 0,
        max_block_diameter,
        oversized_blocks,
        outside_points,
    }
}

/// `r`-disjointness of a single family on its own.
pub fn is_r_disjoint(family: &Family, r: u64, window: &Window) -> bool {
    let cover = ColoredCover {
        entries: vec![CoverEntry {
            radius: r,
            family: family.clone(),
        }],
    };
    let rep = validate_cover(&cover, window, u64::MAX);
    rep.outside_points.is_empty() && rep.families[0].disjoint
}

/// Replaces each block `V` by `N_m(V)` computed in `ambient`.
///
/// If the family was `(k + 2m)`-disjoint the result is `k`-disjoint, and
/// diameters grow by at most `2m`.
pub fn expand_family(family: &Family, m: u64, ambient: &Window) -> Result<Family> {
    expand_family_where(family, m, ambient, |_| true)
}

pub(crate) fn expand_family_where(
    family: &Family,
    m: u64,
    ambient: &Window,
    keep: impl Fn(usize) -> bool,
) -> Result<Family> {
    let (blocks, outside) = family.resolve(ambient);
    if let Some(p) = outside.first() {
        return Err(Error::Cover(format!("point {p} is not in the ambient window")));
    }
    let expanded: Vec<Vec<usize>> = blocks
        .iter()
        .map(|b| {
            ambient
                .neighborhood(b, m)
                .into_iter()
                .filter(|&j| keep(j))
                .collect()
        })
        .collect();
    Family::from_indices(ambient, &expanded)
}

/// Expands every family by `m` and lowers each radius by `2m`.
pub fn expand_cover(cover: &ColoredCover, m: u64, ambient: &Window) -> Result<ColoredCover> {
    let entries = cover
        .entries
        .iter()
        .map(|e| {
            let radius = e
                .radius
                .checked_sub(2 * m)
                .filter(|r| *r >= 1)
                .ok_or_else(|| {
                    Error::Cover(format!("radius {} cannot absorb expansion by {m}", e.radius))
                })?;
            Ok(CoverEntry {
                radius,
                family: expand_family(&e.family, m, ambient)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ColoredCover { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{Metric, WindowSpec};

    fn line(lo: i64, hi: i64) -> Window {
        let pts: Vec<Point> = (lo..=hi).map(|x| Point::lattice(vec![x])).collect();
        Window::from_points(Metric::Sup, &pts).unwrap()
    }

    fn fam(blocks: &[&[i64]]) -> Family {
        Family::new(
            blocks
                .iter()
                .map(|b| b.iter().map(|&x| Point::lattice(vec![x])).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn r_disjoint_examples() {
        let w = line(0, 9);
        assert!(is_r_disjoint(&fam(&[&[0, 1], &[4, 5]]), 3, &w));
        assert!(!is_r_disjoint(&fam(&[&[0, 1], &[3]]), 3, &w));
        assert!(is_r_disjoint(&fam(&[&[0, 1, 2, 3]]), 100, &w));
    }

    #[test]
    fn family_invariants() {
        assert!(Family::new(vec![vec![]]).is_err());
        let p = Point::lattice(vec![1]);
        assert!(Family::new(vec![vec![p.clone()], vec![p]]).is_err());
        let json = r#"{"radius":2,"blocks":[[[1]],[[1]]]}"#;
        assert!(serde_json::from_str::<CoverEntry>(json).is_err());
    }

    fn two_color_witness() -> ColoredCover {
        ColoredCover {
            entries: vec![
                CoverEntry {
                    radius: 3,
                    family: fam(&[&[0, 1], &[4, 5], &[8, 9]]),
                },
                CoverEntry {
                    radius: 3,
                    family: fam(&[&[2, 3], &[6, 7]]),
                },
            ],
        }
    }

    #[test]
    fn validate_accepts_witness_and_flags_each_failure() {
        let w = line(0, 9);
        let good = two_color_witness();
        assert!(validate_cover(&good, &w, 1).accepted());

        let mut missing = good.clone();
        missing.entries[1].family = fam(&[&[2, 3], &[6]]);
        let rep = validate_cover(&missing, &w, 1);
        assert!(!rep.covered && rep.bounded && rep.families.iter().all(|f| f.disjoint));
        assert_eq!(rep.first_uncovered, Some(Point::lattice(vec![7])));

        let rep = validate_cover(&good, &w, 0);
        assert!(!rep.bounded && rep.covered);
        assert_eq!(rep.max_block_diameter, 1);

        let mut outside = good.clone();
        outside.entries[0].family = fam(&[&[0, 1], &[4, 5], &[8, 9], &[20]]);
        let rep = validate_cover(&outside, &w, 1);
        assert_eq!(rep.outside_points, vec![Point::lattice(vec![20])]);
        assert!(!rep.accepted());

        let mut close = good;
        close.entries[0].radius = 4;
        let rep = validate_cover(&close, &w, 1);
        assert!(!rep.families[0].disjoint);
        assert_eq!(rep.families[0].violation.as_ref().unwrap().2, 3);
    }

    #[test]
    fn expand_family_examples() {
        let w = line(-6, 6);
        let f = fam(&[&[0], &[5]]);
        assert_eq!(expand_family(&f, 0, &w).unwrap(), f);
        assert_eq!(
            expand_family(&f, 1, &w).unwrap(),
            fam(&[&[-1, 0, 1], &[4, 5, 6]])
        );
    }

    #[test]
    fn expand_cover_lowers_radii() {
        let w = Window::from_spec(&WindowSpec::Zn { dims: 1, side: 20 }).unwrap();
        let cover = ColoredCover {
            entries: vec![CoverEntry {
                radius: 5,
                family: fam(&[&[0], &[6]]),
            }],
        };
        let e = expand_cover(&cover, 1, &w).unwrap();
        assert_eq!(e.entries[0].radius, 3);
        assert_eq!(expand_cover(&cover, 2, &w).unwrap().entries[0].radius, 1);
        assert!(expand_cover(&cover, 3, &w).is_err());
    }

    #[test]
    fn cover_json_shape() {
        let c = ColoredCover {
            entries: vec![CoverEntry {
                radius: 2,
                family: Family::new(vec![vec![Point::tower(vec![1, 2]).unwrap()]]).unwrap(),
            }],
        };
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(
            s,
            r#"{"entries":[{"radius":2,"blocks":[[{"level":2,"coords":[1,2]}]]}]}"#
        );
        assert_eq!(serde_json::from_str::<ColoredCover>(&s).unwrap(), c);
    }

    #[test]
    fn restriction_drops_empty_blocks() {
        let good = two_color_witness();
        let sub = line(0, 4);
        let r = good.restrict_to(&sub);
        assert_eq!(r.entries[0].family, fam(&[&[0, 1], &[4]]));
        assert_eq!(r.entries[1].family, fam(&[&[2, 3]]));
        assert!(validate_cover(&r, &sub, 1).accepted());
    }
}
