//! Exact decision of colored-cover existence on finite windows.
//!
//! An instance `(W, r₁..r_m, D)` asks whether `W` admits families
//! `V₁..V_m` covering it, `Vᵢ` being `rᵢ`-disjoint and every block of
//! diameter `≤ D`. Such a cover exists iff some coloring `c: W → {1..m}` has
//! all components of `{x, y : c(x) = c(y) = i, d(x, y) < rᵢ}` of diameter
//! `≤ D`:
//!
//! * a valid cover induces a coloring (pick any family containing each
//!   point); a chain of `< rᵢ` steps never leaves a block because distinct
//!   blocks are `≥ rᵢ` apart, so every component sits inside one block;
//! * conversely, the components of a coloring are pairwise `≥ rᵢ` apart by
//!   maximality and can serve as blocks.
//!
//! The search therefore ranges over colorings instead of block structures.
//! `UNSAT` is only reported after the search space is exhausted; running out
//! of budget yields `UNKNOWN`.

mod brute;
mod cache;
mod search;

pub use brute::{brute_force_coloring, brute_force_decide, BRUTE_FORCE_LIMIT};
pub use cache::{ResultCache, CACHE_ENV};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::covers::{validate_cover, ColoredCover, CoverEntry, Family};
use crate::error::{Error, Result};
use crate::spaces::{Metric, Point, Window};
use search::{Engine, Outcome};

pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

#[derive(Clone, Debug)]
pub struct DecisionInstance {
    pub window: Window,
    pub radii: Vec<u64>,
    pub diameter: u64,
}

#[derive(Serialize)]
struct CanonicalInstance<'a> {
    metric: Metric,
    points: &'a [Point],
    radii: &'a [u64],
    diameter: u64,
}

impl DecisionInstance {
    pub fn new(window: Window, radii: Vec<u64>, diameter: u64) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::Instance("at least one radius is required".into()));
        }
        if radii.contains(&0) {
            return Err(Error::Instance("radii must be at least 1".into()));
        }
        if radii.len() > 32 {
            return Err(Error::Instance("at most 32 families are supported".into()));
        }
        Ok(DecisionInstance {
            window,
            radii,
            diameter,
        })
    }

    /// SHA-256 of the canonical JSON serialization, hex encoded.
    pub fn hash(&self) -> String {
        let points = self.window.points();
        let doc = CanonicalInstance {
            metric: self.window.metric(),
            points: &points,
            radii: &self.radii,
            diameter: self.diameter,
        };
        let bytes = serde_json::to_vec(&doc).expect("instance serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    /// Static point order; the witness is the lexicographically first valid
    /// coloring.
    #[default]
    Canonical,
    /// Most-constrained point first; any valid witness.
    Fast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub mode: SearchMode,
    pub node_budget: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: SearchMode::Canonical,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

impl SolverConfig {
    pub fn id(&self) -> String {
        let mode = match self.mode {
            SearchMode::Canonical => "canonical",
            SearchMode::Fast => "fast",
        };
        format!("backtrack-v1/{mode}/budget={}", self.node_budget)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub prunes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    #[serde(rename = "SAT")]
    Sat { witness: ColoredCover },
    #[serde(rename = "UNSAT")]
    Unsat,
    #[serde(rename = "UNKNOWN")]
    Unknown,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Sat { .. } => "SAT",
            Verdict::Unsat => "UNSAT",
            Verdict::Unknown => "UNKNOWN",
        }
    }

    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat { .. })
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, Verdict::Unsat)
    }

    pub fn witness(&self) -> Option<&ColoredCover> {
        match self {
            Verdict::Sat { witness } => Some(witness),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub instance_hash: String,
    pub config: String,
    pub mode: SearchMode,
    pub radii: Vec<u64>,
    pub diameter: u64,
    #[serde(flatten)]
    pub verdict: Verdict,
    /// Whether a SAT witness is the lexicographically first coloring.
    #[serde(default)]
    pub canonical: bool,
    pub stats: SearchStats,
}

fn witness_from_blocks(window: &Window, radii: &[u64], blocks: &[Vec<Vec<usize>>]) -> ColoredCover {
    let entries = radii
        .iter()
        .zip(blocks)
        .map(|(&radius, bs)| CoverEntry {
            radius,
            family: Family::from_indices(window, bs).expect("components are disjoint"),
        })
        .collect();
    ColoredCover { entries }
}

/// Components of each color class of a complete coloring, ordered by
/// smallest member. Used to turn colorings into witness covers.
pub(crate) fn components_of_coloring(
    window: &Window,
    radii: &[u64],
    coloring: &[u8],
) -> Vec<Vec<Vec<usize>>> {
    let n = window.len();
    let mut seen = vec![false; n];
    let mut out = vec![Vec::new(); radii.len()];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let c = coloring[start] as usize;
        let mut comp = vec![start];
        seen[start] = true;
        let mut k = 0;
        while k < comp.len() {
            let p = comp[k];
            k += 1;
            if radii[c] > 1 {
                window.for_each_within(p, radii[c] - 1, |q| {
                    if !seen[q] && coloring[q] as usize == c {
                        seen[q] = true;
                        comp.push(q);
                    }
                });
            }
        }
        comp.sort_unstable();
        out[c].push(comp);
    }
    out
}

/// Decides an instance by complete backtracking search.
///
/// In canonical mode a SAT witness is then improved to the lexicographically
/// first coloring (points in window order): for each point in turn, smaller
/// colors are probed with the prefix fixed, and a SAT probe replaces the
/// current coloring. If the probes run out of budget the best coloring so
/// far is returned with `canonical: false`.
pub fn decide_cover(inst: &DecisionInstance, cfg: &SolverConfig) -> Certificate {
    let mut stats = SearchStats::default();
    let run = |fixed: &[(usize, u8)], stats: &mut SearchStats| {
        let budget = cfg.node_budget.saturating_sub(stats.nodes);
        let mut engine = Engine::new(&inst.window, &inst.radii, inst.diameter, budget);
        if !engine.fix(fixed) {
            return Outcome::Unsat;
        }
        let outcome = engine.run();
        stats.nodes += engine.stats.nodes;
        stats.prunes += engine.stats.prunes;
        outcome
    };
    let mut canonical = false;
    let verdict = match run(&[], &mut stats) {
        Outcome::Unknown => Verdict::Unknown,
        Outcome::Unsat => Verdict::Unsat,
        Outcome::Sat(mut best) => {
            if cfg.mode == SearchMode::Canonical {
                canonical = lex_first(&inst.radii, &mut best, |fixed| run(fixed, &mut stats));
                if !canonical {
                    log::warn!("canonical witness search ran out of budget");
                }
            }
            let blocks = components_of_coloring(&inst.window, &inst.radii, &best);
            let witness = witness_from_blocks(&inst.window, &inst.radii, &blocks);
            debug_assert!(validate_cover(&witness, &inst.window, inst.diameter).accepted());
            Verdict::Sat { witness }
        }
    };
    Certificate {
        instance_hash: inst.hash(),
        config: cfg.id(),
        mode: cfg.mode,
        radii: inst.radii.clone(),
        diameter: inst.diameter,
        verdict,
        canonical,
        stats,
    }
}

/// Lowers `best` to the lexicographically first valid coloring. Returns
/// `false` if a probe came back UNKNOWN.
fn lex_first(
    radii: &[u64],
    best: &mut Vec<u8>,
    mut probe: impl FnMut(&[(usize, u8)]) -> Outcome,
) -> bool {
    let mut prefix: Vec<(usize, u8)> = Vec::with_capacity(best.len());
    let mut used = vec![false; radii.len()];
    for i in 0..best.len() {
        for c in 0..best[i] {
            // a later color of an equal-radius class never comes first
            let skip = !used[c as usize]
                && (0..c).any(|d| radii[d as usize] == radii[c as usize] && !used[d as usize]);
            if skip {
                continue;
            }
            prefix.push((i, c));
            let outcome = probe(&prefix);
            prefix.pop();
            match outcome {
                Outcome::Sat(coloring) => {
                    *best = coloring;
                    break;
                }
                Outcome::Unsat => {}
                Outcome::Unknown => return false,
            }
        }
        prefix.push((i, best[i]));
        used[best[i] as usize] = true;
    }
    true
}

/// [`decide_cover`] behind a persistent cache. `UNKNOWN` results are not
/// stored.
pub fn decide_cached(
    inst: &DecisionInstance,
    cfg: &SolverConfig,
    cache: Option<&mut ResultCache>,
) -> Result<Certificate> {
    let Some(cache) = cache else {
        return Ok(decide_cover(inst, cfg));
    };
    let hash = inst.hash();
    if let Some(hit) = cache.get(&hash, cfg.mode) {
        return Ok(hit.clone());
    }
    let cert = decide_cover(inst, cfg);
    if !matches!(cert.verdict, Verdict::Unknown) {
        cache.put(&cert)?;
    }
    Ok(cert)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinDiameter {
    /// Least `D` with a valid cover; `None` only for degenerate input.
    pub diameter: Option<u64>,
    /// Certificate for the reported `D` (SAT), if any.
    pub witness: Option<ColoredCover>,
    pub nodes: u64,
}

/// Least `D` in `0..=cap` admitting a cover, by binary search. SAT is
/// monotone in `D`. Returns `Ok(diameter: None)` if `cap` itself is UNSAT.
pub fn min_diameter_capped(
    window: &Window,
    radii: &[u64],
    cap: u64,
    cfg: &SolverConfig,
    mut cache: Option<&mut ResultCache>,
) -> Result<MinDiameter> {
    min_diameter_by(cap, cfg.node_budget, |d| {
        let inst = DecisionInstance::new(window.clone(), radii.to_vec(), d)?;
        decide_cached(&inst, cfg, cache.as_deref_mut())
    })
}

/// The binary search behind [`min_diameter_capped`], with the decision at
/// each `D` supplied by the caller.
pub fn min_diameter_by(
    cap: u64,
    budget: u64,
    mut decide: impl FnMut(u64) -> Result<Certificate>,
) -> Result<MinDiameter> {
    let mut nodes = 0;
    let mut decide = |d: u64| -> Result<Certificate> {
        let cert = decide(d)?;
        nodes += cert.stats.nodes;
        match cert.verdict {
            Verdict::Unknown => Err(Error::BudgetExhausted { budget }),
            _ => Ok(cert),
        }
    };
    let top = decide(cap)?;
    let Verdict::Sat { witness } = top.verdict else {
        return Ok(MinDiameter {
            diameter: None,
            witness: None,
            nodes,
        });
    };
    let (mut lo, mut hi, mut best) = (0u64, cap, witness);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match decide(mid)?.verdict {
            Verdict::Sat { witness } => {
                hi = mid;
                best = witness;
            }
            _ => lo = mid + 1,
        }
    }
    Ok(MinDiameter {
        diameter: Some(hi),
        witness: Some(best),
        nodes,
    })
}

/// Least `D` admitting a cover; `D = diam(W)` always works for `m ≥ 1`.
pub fn min_diameter(window: &Window, radii: &[u64], cfg: &SolverConfig) -> Result<MinDiameter> {
    let all: Vec<usize> = (0..window.len()).collect();
    min_diameter_capped(window, radii, window.diameter(&all), cfg, None)
}

/// Single greedy pass in window order: each point takes the first color
/// that keeps its component within `D`. Never evidence of UNSAT.
pub fn greedy_upper(window: &Window, radii: &[u64], diameter: u64) -> Option<ColoredCover> {
    if radii.is_empty() || radii.contains(&0) || radii.len() > 32 {
        return None;
    }
    let mut coloring = vec![u8::MAX; window.len()];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); window.len()];
    let mut comp_of: Vec<usize> = (0..window.len()).collect();
    for p in 0..window.len() {
        let mut placed = false;
        for (c, &r) in radii.iter().enumerate() {
            let mut comps: Vec<usize> = Vec::new();
            if r > 1 {
                window.for_each_within(p, r - 1, |q| {
                    if coloring[q] as usize == c && !comps.contains(&comp_of[q]) {
                        comps.push(comp_of[q]);
                    }
                });
            }
            let mut merged: Vec<usize> = vec![p];
            for &k in &comps {
                merged.extend_from_slice(&members[k]);
            }
            if window.diameter(&merged) <= diameter {
                coloring[p] = c as u8;
                for &k in &comps {
                    members[k].clear();
                }
                for &q in &merged {
                    comp_of[q] = p;
                }
                members[p] = merged;
                placed = true;
                break;
            }
        }
        if !placed {
            return None;
        }
    }
    let blocks = components_of_coloring(window, radii, &coloring);
    let cover = witness_from_blocks(window, radii, &blocks);
    validate_cover(&cover, window, diameter)
        .accepted()
        .then_some(cover)
}
