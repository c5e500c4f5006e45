//! Set systems over finite label universes, their derivatives and the rank
//! `Ord`.
//!
//! For `M ⊆ Fin L` and `σ ⊆ L`, the derivative is
//! `M^σ = {τ ≠ ∅ : σ ∪ τ ∈ M, σ ∩ τ = ∅}`. `Ord M = 0` iff `M` is empty,
//! otherwise `Ord M = sup_a (Ord M^a + 1)`. On a finite universe every
//! chain of derivatives is finite, so the recursion always ends on a natural
//! number; the value equals the largest member cardinality.
//!
//! [`TruncatedA`] is the finite shadow of the collection of radius sets that
//! admit no bounded cover: `σ` is a member iff the solver proves the window
//! has no cover with radii `σ` and block diameter `≤ D`.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ordinal::Ordinal;
use crate::solver::{decide_cached, DecisionInstance, ResultCache, SearchMode, SolverConfig, Verdict};
use crate::spaces::{Window, WindowSpec};

pub type Label = u32;

/// Largest universe handled; members are stored as bit masks.
pub const MAX_UNIVERSE: usize = 64;

fn normalize(set: &[Label]) -> Vec<Label> {
    let mut v = set.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSystem", into = "RawSystem")]
pub struct SetSystem {
    universe: Vec<Label>,
    members: BTreeSet<u64>,
}

#[derive(Serialize, Deserialize)]
struct RawSystem {
    universe: Vec<Label>,
    members: Vec<Vec<Label>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    inclusive: bool,
}

impl TryFrom<RawSystem> for SetSystem {
    type Error = Error;

    fn try_from(raw: RawSystem) -> Result<SetSystem> {
        let s = SetSystem::new(&raw.universe, &raw.members)?;
        if raw.inclusive && !s.is_inclusive() {
            return Err(Error::SetSystem(
                "flagged inclusive but not closed under non-empty subsets".into(),
            ));
        }
        Ok(s)
    }
}

impl From<SetSystem> for RawSystem {
    fn from(s: SetSystem) -> RawSystem {
        let inclusive = s.is_inclusive() && !s.members.is_empty();
        RawSystem {
            members: s.members(),
            universe: s.universe,
            inclusive,
        }
    }
}

impl SetSystem {
    pub fn new(universe: &[Label], members: &[Vec<Label>]) -> Result<SetSystem> {
        let universe = normalize(universe);
        if universe.len() > MAX_UNIVERSE {
            return Err(Error::SetSystem(format!(
                "universe of {} labels exceeds {MAX_UNIVERSE}",
                universe.len()
            )));
        }
        let mut s = SetSystem {
            universe,
            members: BTreeSet::new(),
        };
        for m in members {
            if m.is_empty() {
                return Err(Error::SetSystem("members must be non-empty".into()));
            }
            let mask = s.mask(m)?;
            s.members.insert(mask);
        }
        Ok(s)
    }

    pub fn empty(universe: &[Label]) -> Result<SetSystem> {
        SetSystem::new(universe, &[])
    }

    /// Closure of `members` under non-empty subsets.
    pub fn inclusive_closure(universe: &[Label], members: &[Vec<Label>]) -> Result<SetSystem> {
        let base = SetSystem::new(universe, members)?;
        let mut out = BTreeSet::new();
        for &m in &base.members {
            let mut sub = m;
            while sub != 0 {
                out.insert(sub);
                sub = (sub - 1) & m;
            }
        }
        Ok(SetSystem {
            universe: base.universe,
            members: out,
        })
    }

    pub fn from_masks(universe: &[Label], masks: impl IntoIterator<Item = u64>) -> Result<SetSystem> {
        let universe = normalize(universe);
        let full = full_mask(universe.len());
        let mut members = BTreeSet::new();
        for m in masks {
            if m == 0 || m & !full != 0 {
                return Err(Error::SetSystem(format!("mask {m:#x} is not a member")));
            }
            members.insert(m);
        }
        Ok(SetSystem { universe, members })
    }

    pub fn universe(&self) -> &[Label] {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members as sorted label lists, in mask order.
    pub fn members(&self) -> Vec<Vec<Label>> {
        self.members.iter().map(|&m| self.labels(m)).collect()
    }

    pub fn masks(&self) -> impl Iterator<Item = u64> + '_ {
        self.members.iter().copied()
    }

    pub fn contains(&self, set: &[Label]) -> bool {
        self.mask(set).is_ok_and(|m| self.members.contains(&m))
    }

    pub fn mask(&self, set: &[Label]) -> Result<u64> {
        let mut mask = 0u64;
        for x in set {
            let k = self
                .universe
                .binary_search(x)
                .map_err(|_| Error::SetSystem(format!("label {x} is not in the universe")))?;
            mask |= 1 << k;
        }
        Ok(mask)
    }

    pub fn labels(&self, mask: u64) -> Vec<Label> {
        (0..self.universe.len())
            .filter(|k| mask >> k & 1 == 1)
            .map(|k| self.universe[k])
            .collect()
    }

    pub fn is_inclusive(&self) -> bool {
        self.members.iter().all(|&m| {
            (0..64)
                .filter(|k| m >> k & 1 == 1)
                .all(|k| m == 1 << k || self.members.contains(&(m & !(1 << k))))
        })
    }

    /// `M^σ`, over the same universe.
    pub fn derivative(&self, sigma: &[Label]) -> Result<SetSystem> {
        let s = self.mask(sigma)?;
        Ok(self.derivative_mask(s))
    }

    pub fn derivative_mask(&self, s: u64) -> SetSystem {
        SetSystem {
            universe: self.universe.clone(),
            members: self
                .members
                .iter()
                .filter(|&&m| m & s == s && m != s)
                .map(|&m| m & !s)
                .collect(),
        }
    }

    /// Image under the label map `phi`, which must be injective on the
    /// universe.
    pub fn relabel(&self, phi: impl Fn(Label) -> Label) -> Result<SetSystem> {
        let image: Vec<Label> = self.universe.iter().map(|&x| phi(x)).collect();
        if normalize(&image).len() != image.len() {
            return Err(Error::SetSystem("relabeling is not injective".into()));
        }
        let members: Vec<Vec<Label>> = self
            .members()
            .iter()
            .map(|m| m.iter().map(|&x| phi(x)).collect())
            .collect();
        SetSystem::new(&image, &members)
    }

    /// Largest member cardinality; equals [`ord`](Self::ord) on finite
    /// universes.
    pub fn max_cardinality(&self) -> u64 {
        self.members
            .iter()
            .map(|m| m.count_ones() as u64)
            .max()
            .unwrap_or(0)
    }

    /// `Ord M` by the defining recursion, memoized on the derivative index.
    pub fn ord(&self) -> Ordinal {
        let mut memo = HashMap::new();
        self.ord_rec(0, &mut memo)
    }

    fn ord_rec(&self, sigma: u64, memo: &mut HashMap<u64, Ordinal>) -> Ordinal {
        if let Some(v) = memo.get(&sigma) {
            return v.clone();
        }
        let ext: Vec<u64> = self
            .members
            .iter()
            .filter(|&&m| m & sigma == sigma && m != sigma)
            .copied()
            .collect();
        let value = if ext.is_empty() {
            Ordinal::zero()
        } else {
            // labels outside every extension give an empty derivative: 0 + 1
            let live = ext.iter().fold(0u64, |acc, m| acc | m) & !sigma;
            let mut best = Ordinal::natural(1);
            for k in (0..64).filter(|k| live >> k & 1 == 1) {
                let v = self
                    .ord_rec(sigma | 1 << k, memo)
                    .succ()
                    .expect("finite recursion");
                if v > best {
                    best = v;
                }
            }
            best
        };
        memo.insert(sigma, value.clone());
        value
    }
}

fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    In,
    Out,
    Unknown,
}

/// `Ord` known up to an interval; exact when both ends agree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdInterval {
    pub lower: Ordinal,
    pub upper: Ordinal,
}

impl OrdInterval {
    pub fn exact(v: Ordinal) -> OrdInterval {
        OrdInterval {
            lower: v.clone(),
            upper: v,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn value(&self) -> Option<&Ordinal> {
        self.is_exact().then_some(&self.lower)
    }
}

impl std::fmt::Display for OrdInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.lower)
        } else {
            write!(f, "[{}, {}]", self.lower, self.upper)
        }
    }
}

/// Radius sets with no cover of the window at block diameter `≤ D`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedA {
    pub window: WindowSpec,
    pub diameter: u64,
    pub r_max: Label,
}

#[derive(Clone, Debug, Serialize)]
pub struct TruncatedOrd {
    /// Combined bounds from both paths.
    pub ord: OrdInterval,
    /// Recursion over the materialized system.
    pub recursion: OrdInterval,
    /// Largest `j` with `{r_max-j+1, …, r_max}` a member.
    pub top_scan: OrdInterval,
    pub members: Vec<Vec<Label>>,
    pub unknown: Vec<Vec<Label>>,
    pub solver_calls: u64,
    pub nodes: u64,
}

/// Solver-backed membership with per-query memo.
pub struct TruncatedOracle<'c> {
    pub spec: TruncatedA,
    window: Window,
    config: SolverConfig,
    cache: Option<&'c mut ResultCache>,
    memo: HashMap<Vec<Label>, Membership>,
    pub solver_calls: u64,
    pub nodes: u64,
}

impl<'c> TruncatedOracle<'c> {
    pub fn new(
        spec: TruncatedA,
        node_budget: u64,
        cache: Option<&'c mut ResultCache>,
    ) -> Result<TruncatedOracle<'c>> {
        if spec.r_max == 0 || spec.r_max as usize > MAX_UNIVERSE {
            return Err(Error::SetSystem(format!(
                "r_max must lie in 1..={MAX_UNIVERSE}"
            )));
        }
        let window = Window::from_spec(&spec.window)?;
        Ok(TruncatedOracle {
            spec,
            window,
            config: SolverConfig {
                mode: SearchMode::Fast,
                node_budget,
            },
            cache,
            memo: HashMap::new(),
            solver_calls: 0,
            nodes: 0,
        })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// Is `σ` a member? UNKNOWN solver verdicts stay unknown.
    pub fn membership(&mut self, sigma: &[Label]) -> Result<Membership> {
        let sigma = normalize(sigma);
        if sigma.is_empty() {
            return Err(Error::SetSystem("membership needs a non-empty set".into()));
        }
        if sigma[0] == 0 || *sigma.last().expect("non-empty") > self.spec.r_max {
            return Err(Error::SetSystem(format!(
                "labels must lie in 1..={}",
                self.spec.r_max
            )));
        }
        if let Some(&m) = self.memo.get(&sigma) {
            return Ok(m);
        }
        let inst = DecisionInstance::new(
            self.window.clone(),
            sigma.iter().map(|&x| x as u64).collect(),
            self.spec.diameter,
        )?;
        let cert = decide_cached(&inst, &self.config, self.cache.as_deref_mut())?;
        self.solver_calls += 1;
        self.nodes += cert.stats.nodes;
        let m = match cert.verdict {
            Verdict::Unsat => Membership::In,
            Verdict::Sat { .. } => Membership::Out,
            Verdict::Unknown => Membership::Unknown,
        };
        self.memo.insert(sigma, m);
        Ok(m)
    }
}

/// Membership of `σ` in the truncated collection.
pub fn membership_a(
    spec: &TruncatedA,
    sigma: &[Label],
    node_budget: u64,
    cache: Option<&mut ResultCache>,
) -> Result<Membership> {
    TruncatedOracle::new(spec.clone(), node_budget, cache)?.membership(sigma)
}

/// `Ord` of the truncated collection, computed twice: by the recursion over
/// the materialized system and by the top-`j` scan. The two must agree when
/// all memberships are decided.
///
/// Materialization goes by size. A set with a non-member subset is not a
/// member either (an empty family extends any cover), so it needs no solver
/// call.
pub fn ord_truncated_a(
    spec: &TruncatedA,
    node_budget: u64,
    cache: Option<&mut ResultCache>,
) -> Result<TruncatedOrd> {
    let mut oracle = TruncatedOracle::new(spec.clone(), node_budget, cache)?;
    let r = spec.r_max as usize;
    let universe: Vec<Label> = (1..=spec.r_max).collect();
    let mut status: HashMap<u64, Membership> = HashMap::new();
    let mut by_size: Vec<u64> = (1..=full_mask(r)).collect();
    by_size.sort_by_key(|m| (m.count_ones(), *m));
    for mask in by_size {
        let implied_out = (0..r)
            .filter(|k| mask >> k & 1 == 1)
            .map(|k| mask & !(1 << k))
            .any(|sub| sub != 0 && status[&sub] == Membership::Out);
        let m = if implied_out {
            Membership::Out
        } else {
            let labels: Vec<Label> = (0..r)
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| k as Label + 1)
                .collect();
            oracle.membership(&labels)?
        };
        status.insert(mask, m);
    }
    let lower_sys = SetSystem::from_masks(
        &universe,
        status
            .iter()
            .filter(|(_, &m)| m == Membership::In)
            .map(|(&k, _)| k),
    )?;
    let upper_sys = SetSystem::from_masks(
        &universe,
        status
            .iter()
            .filter(|(_, &m)| m != Membership::Out)
            .map(|(&k, _)| k),
    )?;
    let recursion = OrdInterval {
        lower: lower_sys.ord(),
        upper: upper_sys.ord(),
    };

    let top = |j: usize| -> u64 { full_mask(r) & !full_mask(r - j) };
    let mut scan_lo = 0u64;
    while (scan_lo as usize) < r && status[&top(scan_lo as usize + 1)] == Membership::In {
        scan_lo += 1;
    }
    let mut scan_hi = 0u64;
    while (scan_hi as usize) < r && status[&top(scan_hi as usize + 1)] != Membership::Out {
        scan_hi += 1;
    }
    let top_scan = OrdInterval {
        lower: Ordinal::natural(scan_lo),
        upper: Ordinal::natural(scan_hi),
    };
    if recursion.is_exact() && top_scan.is_exact() && recursion != top_scan {
        return Err(Error::SetSystem(format!(
            "recursion gives {recursion} but the top-j scan gives {top_scan}"
        )));
    }
    let ord = OrdInterval {
        lower: recursion.lower.clone().max(top_scan.lower.clone()),
        upper: recursion.upper.clone().min(top_scan.upper.clone()),
    };
    let unknown = status
        .iter()
        .filter(|(_, &m)| m == Membership::Unknown)
        .map(|(&k, _)| lower_sys.labels(k))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    Ok(TruncatedOrd {
        ord,
        recursion,
        top_scan,
        members: lower_sys.members(),
        unknown,
        solver_calls: oracle.solver_calls,
        nodes: oracle.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(members: &[&[Label]]) -> SetSystem {
        let universe: Vec<Label> = members.iter().flat_map(|m| m.iter().copied()).collect();
        let members: Vec<Vec<Label>> = members.iter().map(|m| m.to_vec()).collect();
        SetSystem::new(&universe, &members).unwrap()
    }

    #[test]
    fn derivative_examples() {
        let m = sys(&[&[1], &[2], &[1, 2]]);
        assert_eq!(m.derivative(&[1]).unwrap().members(), vec![vec![2]]);
        assert_eq!(m.derivative(&[]).unwrap(), m);
        let m = sys(&[&[1, 2, 3]]);
        assert_eq!(m.derivative(&[2]).unwrap().members(), vec![vec![1, 3]]);
    }

    #[test]
    fn ord_examples() {
        assert_eq!(SetSystem::empty(&[1, 2]).unwrap().ord(), Ordinal::zero());
        assert_eq!(sys(&[&[1], &[2]]).ord(), Ordinal::natural(1));
        assert_eq!(sys(&[&[1, 2], &[3]]).ord(), Ordinal::natural(2));
    }

    #[test]
    fn json_shape() {
        let m: SetSystem =
            serde_json::from_str(r#"{"universe":[1,2,3],"members":[[1],[1,2]]}"#).unwrap();
        assert_eq!(m.members(), vec![vec![1], vec![1, 2]]);
        assert!(!m.is_inclusive());
        assert!(serde_json::from_str::<SetSystem>(
            r#"{"universe":[1,2,3],"members":[[1],[1,2]],"inclusive":true}"#
        )
        .is_err());
        assert!(serde_json::from_str::<SetSystem>(r#"{"universe":[1],"members":[[2]]}"#).is_err());
        assert!(serde_json::from_str::<SetSystem>(r#"{"universe":[1],"members":[[]]}"#).is_err());
        let c = SetSystem::inclusive_closure(&[1, 2, 3], &[vec![1, 2]]).unwrap();
        assert!(c.is_inclusive());
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn relabel_must_be_injective() {
        let m = sys(&[&[1, 2]]);
        assert!(m.relabel(|_| 7).is_err());
        let r = m.relabel(|x| x + 10).unwrap();
        assert_eq!(r.members(), vec![vec![11, 12]]);
    }

    #[test]
    fn truncated_membership_examples() {
        let spec = TruncatedA {
            window: WindowSpec::Zn { dims: 2, side: 3 },
            diameter: 0,
            r_max: 4,
        };
        assert_eq!(membership_a(&spec, &[1], 10_000, None).unwrap(), Membership::Out);
        let big = TruncatedA {
            diameter: 12,
            ..spec.clone()
        };
        assert_eq!(
            membership_a(&big, &[2, 3, 4], 10_000, None).unwrap(),
            Membership::Out
        );
        assert!(membership_a(&spec, &[5], 10_000, None).is_err());
        assert!(membership_a(&spec, &[], 10_000, None).is_err());
    }

    #[test]
    fn bounded_window_has_empty_truncation() {
        let spec = TruncatedA {
            window: WindowSpec::Zn { dims: 2, side: 2 },
            diameter: 4,
            r_max: 4,
        };
        let t = ord_truncated_a(&spec, 1_000_000, None).unwrap();
        assert_eq!(t.ord, OrdInterval::exact(Ordinal::zero()));
        assert!(t.members.is_empty());
    }

    #[test]
    fn truncated_ord_matches_brute_force() {
        let spec = TruncatedA {
            window: WindowSpec::Zn { dims: 1, side: 4 },
            diameter: 1,
            r_max: 4,
        };
        let t = ord_truncated_a(&spec, 1_000_000, None).unwrap();
        assert_eq!(t.recursion, t.top_scan);
        let w = Window::from_spec(&spec.window).unwrap();
        let mut largest = 0;
        for mask in 1u32..16 {
            let radii: Vec<u64> = (0..4).filter(|k| mask >> k & 1 == 1).map(|k| k + 1).collect();
            let coverable = crate::solver::brute_force_decide(&w, &radii, 1).unwrap().is_some();
            if !coverable {
                largest = largest.max(radii.len() as u64);
            }
        }
        assert_eq!(t.ord, OrdInterval::exact(Ordinal::natural(largest)));
    }
}
