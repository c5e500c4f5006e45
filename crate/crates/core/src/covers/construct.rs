//! Explicit covers: `n+1` shifted shrunk grids for `ℤⁿ`, and the tower cover
//! that certifies `τ ∪ {n}` is coverable on `L_ω` windows.

use std::collections::HashMap;

use super::{expand_family_where, ColoredCover, CoverEntry, Family};
use crate::error::{Error, Result};
use crate::spaces::{level_gap, Metric, Window, WindowSpec};

/// `n+1` families covering a sup-metric window of dimension `n`, each
/// `r`-disjoint, with block diameter at most `(n+1)(r+1)`.
///
/// Family `j` tiles space by cubes of side `L = (n+1)(r+1)` offset by
/// `j(r+1)` on every axis and keeps the part of each cube at least `⌈r/2⌉`
/// away from its faces. A coordinate is too close to a face for at most one
/// offset class, so some family keeps every point.
pub fn build_zn_cover(n: usize, r: u64, window: &Window) -> Result<ColoredCover> {
    if r == 0 {
        return Err(Error::Cover("radius must be at least 1".into()));
    }
    if window.metric() != Metric::Sup {
        return Err(Error::Cover("lattice cover needs a sup-metric window".into()));
    }
    if let Some(i) = (0..window.len()).find(|&i| window.level(i) != n) {
        return Err(Error::DimensionMismatch {
            left: n,
            right: window.level(i),
        });
    }
    let r = r as i64;
    let step = r + 1;
    let side = (n as i64 + 1) * step;
    let margin = (r + 1) / 2;

    let mut entries = Vec::with_capacity(n + 1);
    for j in 0..=n as i64 {
        let shift = j * step;
        let mut cubes: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for i in 0..window.len() {
            let c = window.coords(i);
            let inside = c.iter().all(|&x| {
                let t = (x - shift).rem_euclid(side);
                t >= margin && t <= side - 1 - margin
            });
            if !inside {
                continue;
            }
            let key: Vec<i64> = c.iter().map(|&x| (x - shift).div_euclid(side)).collect();
            let b = *cubes.entry(key).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(i);
        }
        entries.push(CoverEntry {
            radius: r as u64,
            family: Family::from_indices(window, &blocks)?,
        });
    }
    Ok(ColoredCover { entries })
}

/// Largest distance from a point of level `≤ n` to the level-`n` sheet.
pub fn containment_radius(window: &Window, n: usize) -> Result<u64> {
    let target: Vec<usize> = (0..window.len()).filter(|&i| window.level(i) == n).collect();
    if target.is_empty() {
        return Err(Error::Cover(format!("window has no level-{n} points")));
    }
    let mut worst = 0;
    for i in (0..window.len()).filter(|&i| window.level(i) <= n) {
        let mut radius = level_gap(window.level(i), n);
        loop {
            let mut hit = false;
            window.for_each_within(i, radius, |j| hit |= window.level(j) == n);
            if hit {
                break;
            }
            radius += 1;
        }
        worst = worst.max(radius);
    }
    Ok(worst)
}

#[derive(Clone, Debug)]
pub struct LomegaCover {
    pub cover: ColoredCover,
    /// Measured radius `c` with every level-`≤ n` point within `c` of the
    /// level-`n` sheet.
    pub containment_radius: u64,
    /// The displayed bound `1 + 2 + … + (n-1)`.
    pub nominal_containment: u64,
    /// Separation used for the inner lattice cover.
    pub inner_radius: u64,
    /// Largest block diameter achieved.
    pub diameter: u64,
}

/// Covers an `L_ω` window by `n+1` families: family `i ≤ n` is
/// `τᵢ`-disjoint, the last one is `n`-disjoint.
///
/// Levels `≤ n` are covered by an `(n+1)`-family lattice cover of the
/// level-`n` sheet at separation `max(τ ∪ {n}) + 2c`, expanded by the
/// containment radius `c`. Points above level `n` become singletons of the
/// last family; they are at least `n` away from everything else.
pub fn build_lomega_cover(tau: &[u64], n: usize, window: &Window) -> Result<LomegaCover> {
    let mut tau = tau.to_vec();
    tau.sort_unstable();
    if n == 0 {
        return Err(Error::Cover("n must be at least 1".into()));
    }
    if tau.len() != n {
        return Err(Error::Cover(format!("|tau| = {} but n = {n}", tau.len())));
    }
    if tau.windows(2).any(|w| w[0] == w[1]) || tau.contains(&0) {
        return Err(Error::Cover("tau must be distinct positive labels".into()));
    }
    if tau.contains(&(n as u64)) {
        return Err(Error::Cover(format!("n = {n} must not lie in tau")));
    }
    if window.metric() != Metric::Tower {
        return Err(Error::Cover("tower cover needs a tower window".into()));
    }
    let cap = (0..window.len()).map(|i| window.level(i)).max().unwrap_or(0);
    if cap <= n {
        return Err(Error::Cover(format!("level cap {cap} must exceed n = {n}")));
    }
    let lomega = match window.spec() {
        Some(spec) => matches!(spec, WindowSpec::Lomega { .. }),
        None => (0..window.len()).all(|i| {
            let k = window.level(i) as i64;
            window.coords(i).iter().all(|x| x % k == 0)
        }),
    };
    if !lomega {
        return Err(Error::Cover("window is not part of L_omega".into()));
    }

    let c = containment_radius(window, n)?;
    let inner_radius = tau.iter().copied().max().unwrap_or(0).max(n as u64) + 2 * c;

    let sheet: Vec<usize> = (0..window.len()).filter(|&i| window.level(i) == n).collect();
    let lattice = Window::from_points(
        Metric::Sup,
        &sheet
            .iter()
            .map(|&i| crate::spaces::Point::lattice(window.coords(i).to_vec()))
            .collect::<Vec<_>>(),
    )?;
    let inner = build_zn_cover(n, inner_radius, &lattice)?;

    let mut entries = Vec::with_capacity(n + 1);
    for (f, entry) in inner.entries.iter().enumerate() {
        let on_tower: Vec<Vec<usize>> = entry
            .family
            .blocks()
            .iter()
            .map(|b| {
                b.iter()
                    .map(|p| sheet[lattice.index_of(p).expect("block of own window")])
                    .collect()
            })
            .collect();
        let family = Family::from_indices(window, &on_tower)?;
        let expanded = expand_family_where(&family, c, window, |j| window.level(j) <= n)?;
        let radius = if f < n { tau[f] } else { n as u64 };
        entries.push(CoverEntry {
            radius,
            family: expanded,
        });
    }
    let mut last = entries.pop().expect("n+1 families").family.into_blocks();
    last.extend(
        (0..window.len())
            .filter(|&i| window.level(i) > n)
            .map(|i| vec![window.point(i)]),
    );
    entries.push(CoverEntry {
        radius: n as u64,
        family: Family::new(last)?,
    });

    let cover = ColoredCover { entries };
    let diameter = cover.max_diameter(window);
    Ok(LomegaCover {
        cover,
        containment_radius: c,
        nominal_containment: level_gap(1, n),
        inner_radius,
        diameter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::validate_cover;

    fn zn(dims: usize, side: i64) -> Window {
        Window::from_spec(&WindowSpec::Zn { dims, side }).unwrap()
    }

    fn lomega(side: i64, level_cap: usize) -> Window {
        Window::from_spec(&WindowSpec::Lomega { side, level_cap }).unwrap()
    }

    #[test]
    fn zn_cover_examples() {
        for (n, r, side, bound) in [(1, 2, 30, 6), (2, 3, 40, 12), (1, 1, 3, 4)] {
            let w = zn(n, side);
            let c = build_zn_cover(n, r, &w).unwrap();
            assert_eq!(c.entries.len(), n + 1);
            let rep = validate_cover(&c, &w, bound);
            assert!(rep.accepted(), "n={n} r={r}: {rep:?}");
        }
    }

    #[test]
    fn zn_cover_rejects_bad_input() {
        assert!(build_zn_cover(2, 3, &zn(1, 5)).is_err());
        assert!(build_zn_cover(1, 0, &zn(1, 5)).is_err());
        assert!(build_zn_cover(1, 1, &lomega(3, 2)).is_err());
    }

    #[test]
    fn zn_cover_on_scaled_lattice() {
        let w = Window::from_spec(&WindowSpec::Kzn {
            dims: 2,
            scale: 3,
            side: 60,
        })
        .unwrap();
        let c = build_zn_cover(2, 7, &w).unwrap();
        assert!(validate_cover(&c, &w, 3 * 8).accepted());
    }

    #[test]
    fn lomega_cover_examples() {
        let w = lomega(12, 2);
        let lc = build_lomega_cover(&[3], 1, &w).unwrap();
        assert_eq!(lc.cover.radii(), vec![3, 1]);
        assert!(validate_cover(&lc.cover, &w, lc.diameter).accepted());
        // every level-2 point sits alone in the 1-disjoint family
        let singles = lc.cover.entries[1]
            .family
            .blocks()
            .iter()
            .filter(|b| b.len() == 1)
            .count();
        assert!(singles >= 13 * 13);

        let w = lomega(30, 3);
        let lc = build_lomega_cover(&[3, 5], 2, &w).unwrap();
        assert_eq!(lc.cover.radii(), vec![3, 5, 2]);
        assert_eq!(lc.containment_radius, 1);
        assert_eq!(lc.inner_radius, 7);
        assert!(validate_cover(&lc.cover, &w, lc.diameter).accepted());
        assert!(!validate_cover(&lc.cover, &w, lc.diameter - 1).accepted());
    }

    #[test]
    fn lomega_cover_preconditions() {
        let w = lomega(12, 3);
        assert!(build_lomega_cover(&[2, 3], 2, &w).is_err());
        assert!(build_lomega_cover(&[3], 2, &w).is_err());
        assert!(build_lomega_cover(&[3, 4, 5], 3, &w).is_err());
        let linf = Window::from_spec(&WindowSpec::Linf {
            side: 4,
            level_cap: 2,
        })
        .unwrap();
        assert!(build_lomega_cover(&[3], 1, &linf).is_err());
    }

    #[test]
    fn containment_matches_displayed_sum_on_aligned_windows() {
        for n in 1..=4usize {
            let side = 12;
            let w = lomega(side, n);
            assert_eq!(containment_radius(&w, n).unwrap(), level_gap(1, n), "n={n}");
        }
        // misaligned side: boundary rounding can cost more than the gap
        let w = lomega(7, 2);
        assert!(containment_radius(&w, 2).unwrap() >= level_gap(1, 2));
    }
}
