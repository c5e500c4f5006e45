//! Seeded verification suites: metric axioms, the set-system lemmas, the
//! lattice and tower constructions, and the exhaustive desk-scale checks.
//!
//! Every suite returns a [`SuiteReport`] with one [`CheckResult`] per named
//! check. Reports contain no timings, so equal options give equal JSON.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::borst::{Label, SetSystem};
use crate::covers::{
    build_lomega_cover, build_zn_cover, expand_cover, validate_cover, ColoredCover, CoverEntry,
    Family,
};
use crate::error::{Error, Result};
use crate::ordinal::Ordinal;
use crate::solver::{
    brute_force_decide, components_of_coloring, decide_cover, DecisionInstance, SearchMode,
    SolverConfig, Verdict, BRUTE_FORCE_LIMIT, DEFAULT_NODE_BUDGET,
};
use crate::spaces::{level_gap, sup_dist, tower_dist, LatticePoint, TowerPoint, Window, WindowSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Suite {
    #[serde(rename = "all")]
    All,
    #[serde(rename = "metric")]
    Metric,
    #[serde(rename = "lemmaD")]
    LemmaD,
    #[serde(rename = "lemmaF")]
    LemmaF,
    #[serde(rename = "lemma5")]
    Lemma5,
    #[serde(rename = "lemma3")]
    Lemma3,
    #[serde(rename = "lemma4")]
    Lemma4,
    #[serde(rename = "thm2")]
    Thm2,
    #[serde(rename = "thm3")]
    Thm3,
}

impl Suite {
    pub const NAMES: [&'static str; 9] = [
        "all", "metric", "lemmaD", "lemmaF", "lemma5", "lemma3", "lemma4", "thm2", "thm3",
    ];

    /// The individual suites, in the order `all` runs them.
    pub const EACH: [Suite; 8] = [
        Suite::Metric,
        Suite::LemmaD,
        Suite::LemmaF,
        Suite::Lemma5,
        Suite::Lemma3,
        Suite::Lemma4,
        Suite::Thm2,
        Suite::Thm3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Metric => "metric",
            Suite::LemmaD => "lemmaD",
            Suite::LemmaF => "lemmaF",
            Suite::Lemma5 => "lemma5",
            Suite::Lemma3 => "lemma3",
            Suite::Lemma4 => "lemma4",
            Suite::Thm2 => "thm2",
            Suite::Thm3 => "thm3",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        std::iter::once(Suite::All)
            .chain(Suite::EACH)
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                Error::Instance(format!(
                    "unknown suite {s:?}; expected one of {}",
                    Suite::NAMES.join(", ")
                ))
            })
    }
}

/// Suite parameters. `None` picks the per-suite default.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyOptions {
    pub trials: Option<u64>,
    pub seed: u64,
    /// Scale `k` for `lemma3`, dimension for `thm3`.
    pub k: Option<usize>,
    /// Dimension `n` for `lemma3`.
    pub dims: Option<usize>,
    pub diam_cap: Option<u64>,
    pub node_budget: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            trials: None,
            seed: 7,
            k: None,
            dims: None,
            diam_cap: None,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub trials: u64,
    pub failures: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    fn new(suite: Suite, seed: u64, checks: Vec<CheckResult>) -> SuiteReport {
        SuiteReport {
            suite,
            seed,
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Counts trials and keeps the first failure message.
struct Tally {
    name: String,
    trials: u64,
    failures: u64,
    detail: Option<String>,
}

impl Tally {
    fn new(name: &str) -> Tally {
        Tally {
            name: name.into(),
            trials: 0,
            failures: 0,
            detail: None,
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
            if self.detail.is_none() {
                self.detail = Some(what());
            }
        }
    }

    fn note(mut self, detail: String) -> Tally {
        if self.detail.is_none() {
            self.detail = Some(detail);
        }
        self
    }

    fn done(self) -> CheckResult {
        CheckResult {
            passed: self.failures == 0 && self.trials > 0,
            name: self.name,
            trials: self.trials,
            failures: self.failures,
            detail: self.detail,
        }
    }
}

fn failed(name: &str, err: &Error) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed: false,
        trials: 1,
        failures: 1,
        detail: Some(err.to_string()),
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Vec<SuiteReport> {
    match suite {
        Suite::All => Suite::EACH.iter().flat_map(|&s| run_suite(s, opts)).collect(),
        s => vec![run_one(s, opts)],
    }
}

fn run_one(suite: Suite, opts: &VerifyOptions) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let checks = match suite {
        Suite::Metric => metric_suite(&mut rng, opts.trials.unwrap_or(10_000)),
        Suite::LemmaD => lemma_d_suite(&mut rng, opts.trials.unwrap_or(200)),
        Suite::LemmaF => lemma_f_suite(&mut rng, opts.trials.unwrap_or(100)),
        Suite::Lemma5 => lemma5_suite(&mut rng, opts.trials.unwrap_or(100)),
        Suite::Lemma3 => lemma3_suite(
            opts.k.unwrap_or(1),
            opts.dims.unwrap_or(2),
            opts.diam_cap.unwrap_or(4),
            opts.node_budget,
        ),
        Suite::Lemma4 => lemma4_suite(&mut rng, opts.trials.unwrap_or(100)),
        Suite::Thm2 => thm2_suite(),
        Suite::Thm3 => thm3_suite(opts.k.unwrap_or(2), opts.diam_cap.unwrap_or(4), opts.node_budget),
        Suite::All => unreachable!("expanded by run_suite"),
    };
    SuiteReport::new(suite, opts.seed, checks)
}

// ---- metric ----

/// Tower distance straight from the definition: pad with zeros, sup-metric,
/// then the level gap as an explicit sum.
fn tower_reference(a: &TowerPoint, b: &TowerPoint) -> u64 {
    let n = a.level().max(b.level());
    let pad = |p: &TowerPoint| {
        let mut v = p.coords().to_vec();
        v.resize(n, 0);
        v
    };
    let (pa, pb) = (pad(a), pad(b));
    let sup = pa.iter().zip(&pb).map(|(x, y)| (x - y).unsigned_abs()).max().unwrap_or(0);
    let (lo, hi) = (a.level().min(b.level()), n);
    let gap: u64 = (lo..hi).map(|j| j as u64).sum();
    sup.max(gap)
}

fn random_tower(rng: &mut ChaCha8Rng) -> TowerPoint {
    let level = rng.gen_range(1..=6);
    let coords = (0..level).map(|_| rng.gen_range(-100..=100)).collect();
    TowerPoint::new(level, coords).expect("level matches coordinates")
}

fn metric_suite(rng: &mut ChaCha8Rng, trials: u64) -> Vec<CheckResult> {
    let mut identity = Tally::new("identity");
    let mut symmetry = Tally::new("symmetry");
    let mut triangle = Tally::new("triangle");
    let mut reference = Tally::new("matches_definition");
    for _ in 0..trials {
        let (a, b, c) = (random_tower(rng), random_tower(rng), random_tower(rng));
        let ab = tower_dist(&a, &b);
        identity.record(tower_dist(&a, &a) == 0 && (ab == 0) == (a == b), || {
            format!("{a:?} {b:?}")
        });
        symmetry.record(ab == tower_dist(&b, &a), || format!("{a:?} {b:?}"));
        let (bc, ac) = (tower_dist(&b, &c), tower_dist(&a, &c));
        triangle.record(ac <= ab + bc, || format!("{a:?} {b:?} {c:?}: {ac} > {ab} + {bc}"));
        reference.record(ab == tower_reference(&a, &b), || format!("{a:?} {b:?}"));
    }
    // small points make coincidences and near-equalities likely
    for _ in 0..trials / 10 {
        let mut small = || {
            let level = rng.gen_range(1..=3);
            TowerPoint::new(level, (0..level).map(|_| rng.gen_range(-1..=1)).collect())
                .expect("level matches coordinates")
        };
        let (a, b, c) = (small(), small(), small());
        let ab = tower_dist(&a, &b);
        identity.record((ab == 0) == (a == b), || format!("{a:?} {b:?}"));
        triangle.record(tower_dist(&a, &c) <= ab + tower_dist(&b, &c), || {
            format!("{a:?} {b:?} {c:?}")
        });
    }

    let mut single = Tally::new("single_level_is_sup");
    let w = Window::from_spec(&WindowSpec::Linf { side: 2, level_cap: 3 }).expect("valid spec");
    for i in 0..w.len() {
        for j in 0..w.len() {
            if w.level(i) != w.level(j) {
                continue;
            }
            let lat = |k: usize| LatticePoint(w.coords(k).to_vec());
            let sup = sup_dist(&lat(i), &lat(j)).expect("same dimension");
            single.record(w.dist(i, j) == sup, || format!("points {i} and {j}"));
        }
    }

    let mut gaps = Tally::new("level_gap");
    for l in 1..=8usize {
        for k in 1..=8usize {
            let expect: u64 = (l.min(k)..l.max(k)).map(|j| j as u64).sum();
            gaps.record(level_gap(l, k) == expect, || format!("levels {l}, {k}"));
        }
    }
    vec![
        identity.done(),
        symmetry.done(),
        triangle.done(),
        reference.done(),
        single.done(),
        gaps.done(),
    ]
}

// ---- set systems ----

fn random_universe(rng: &mut ChaCha8Rng, max_len: usize, pool: Label) -> Vec<Label> {
    let len = rng.gen_range(1..=max_len);
    let mut all: Vec<Label> = (1..=pool).collect();
    all.shuffle(rng);
    let mut u = all[..len].to_vec();
    u.sort_unstable();
    u
}

fn random_system(rng: &mut ChaCha8Rng, max_len: usize, max_members: usize) -> SetSystem {
    let universe = random_universe(rng, max_len, 20);
    let full = (1u64 << universe.len()) - 1;
    let count = rng.gen_range(0..=max_members);
    let masks: Vec<u64> = (0..count).map(|_| rng.gen_range(1..=full)).collect();
    SetSystem::from_masks(&universe, masks).expect("masks inside the universe")
}

fn random_subset(rng: &mut ChaCha8Rng, of: u64) -> u64 {
    (0..64)
        .filter(|k| of >> k & 1 == 1 && rng.gen_bool(0.5))
        .fold(0, |acc, k| acc | 1 << k)
}

fn lemma_d_suite(rng: &mut ChaCha8Rng, trials: u64) -> Vec<CheckResult> {
    let mut eq = Tally::new("ord_equals_max_cardinality");
    let mut compose = Tally::new("derivative_composition");
    let mut finite = Tally::new("finite_systems_are_finite");
    for _ in 0..trials {
        let m = random_system(rng, 8, 40);
        let ord = m.ord();
        let expect = m.masks().map(|x| x.count_ones() as u64).max().unwrap_or(0);
        eq.record(ord == Ordinal::natural(expect), || {
            format!("{:?}: ord {ord}, max cardinality {expect}", m.members())
        });
        finite.record(!ord.is_infinity(), || format!("{:?}", m.members()));

        let full = (1u64 << m.universe().len()) - 1;
        let sigma = random_subset(rng, full);
        let tau = random_subset(rng, full & !sigma);
        let lhs = m.derivative_mask(sigma).derivative_mask(tau);
        let rhs = m.derivative_mask(sigma | tau);
        compose.record(lhs == rhs, || {
            format!("{:?} at {sigma:#x}, {tau:#x}", m.members())
        });
    }
    vec![eq.done(), compose.done(), finite.done()]
}

fn lemma_f_suite(rng: &mut ChaCha8Rng, trials: u64) -> Vec<CheckResult> {
    let mut injective = Tally::new("injective_relabel_preserves_ord");
    let mut superset = Tally::new("relabel_into_larger_system");
    let mut general = Tally::new("cardinality_preserving_map");
    for _ in 0..trials {
        let m = random_system(rng, 8, 40);
        let mut targets: Vec<Label> = (1..=100).collect();
        targets.shuffle(rng);
        let phi: std::collections::HashMap<Label, Label> = m
            .universe()
            .iter()
            .zip(&targets)
            .map(|(&a, &b)| (a, b))
            .collect();
        let image = m.relabel(|x| phi[&x]).expect("injective by construction");
        injective.record(m.ord() == image.ord(), || format!("{:?}", m.members()));

        let mut bigger = image.members();
        for _ in 0..rng.gen_range(0..=5) {
            let k = rng.gen_range(1..=image.universe().len());
            bigger.push(image.universe().choose_multiple(rng, k).copied().collect());
        }
        let bigger = SetSystem::new(image.universe(), &bigger).expect("labels from the universe");
        superset.record(m.ord() <= bigger.ord(), || format!("{:?}", m.members()));

        // φ into a small range: only members it keeps apart are carried over
        let range = rng.gen_range(1..=m.universe().len() as Label);
        let psi: std::collections::HashMap<Label, Label> = m
            .universe()
            .iter()
            .map(|&a| (a, rng.gen_range(1..=range)))
            .collect();
        let kept: Vec<Vec<Label>> = m
            .members()
            .into_iter()
            .filter(|s| s.iter().map(|x| psi[x]).collect::<BTreeSet<_>>().len() == s.len())
            .collect();
        let images: Vec<Vec<Label>> = kept
            .iter()
            .map(|s| s.iter().map(|x| psi[x]).collect())
            .collect();
        let domain = SetSystem::new(m.universe(), &kept).expect("subset of members");
        let target_universe: Vec<Label> = (1..=range).collect();
        let target = SetSystem::new(&target_universe, &images).expect("labels in range");
        general.record(domain.ord() <= target.ord(), || {
            format!("{:?} under {psi:?}", kept)
        });
    }
    vec![injective.done(), superset.done(), general.done()]
}

fn lemma5_suite(rng: &mut ChaCha8Rng, trials: u64) -> Vec<CheckResult> {
    let mut ivt = Tally::new("intermediate_values");
    for _ in 0..trials {
        let m = random_system(rng, 5, 31);
        let full = (1u64 << m.universe().len()) - 1;
        for tau in 0..=full {
            let top = m.derivative_mask(tau).ord().as_natural().expect("finite");
            let reached: BTreeSet<u64> = (0..=full)
                .filter(|s| s & tau == 0)
                .map(|s| m.derivative_mask(tau | s).ord().as_natural().expect("finite"))
                .collect();
            let ok = (0..=top).all(|xi| reached.contains(&xi));
            ivt.record(ok, || {
                format!("{:?} at {tau:#x}: ord {top}, reached {reached:?}", m.members())
            });
        }
    }
    vec![ivt.done()]
}

// ---- covers ----

fn lemma4_suite(rng: &mut ChaCha8Rng, trials: u64) -> Vec<CheckResult> {
    let ambients = [
        WindowSpec::Zn { dims: 1, side: 15 },
        WindowSpec::Zn { dims: 2, side: 6 },
        WindowSpec::Kzn { dims: 2, scale: 2, side: 10 },
        WindowSpec::Lomega { side: 6, level_cap: 2 },
    ]
    .map(|s| Window::from_spec(&s).expect("valid spec"));
    let mut source = Tally::new("source_cover_valid");
    let mut expanded = Tally::new("expanded_cover_valid");
    for t in 0..trials {
        let w = &ambients[t as usize % ambients.len()];
        let size = rng.gen_range(1..=20.min(w.len()));
        let mut x: Vec<usize> = (0..w.len()).collect();
        x.shuffle(rng);
        x.truncate(size);
        x.sort_unstable();
        let sub = w.restrict(&x).expect("points of the window");

        let m = rng.gen_range(0..=2u64);
        let families = rng.gen_range(1..=3usize);
        let radii: Vec<u64> = (0..families).map(|_| rng.gen_range(1..=3) + 2 * m).collect();
        let coloring: Vec<u8> = (0..sub.len()).map(|_| rng.gen_range(0..families) as u8).collect();
        let blocks = components_of_coloring(&sub, &radii, &coloring);
        let cover = ColoredCover {
            entries: radii
                .iter()
                .zip(&blocks)
                .map(|(&radius, b)| CoverEntry {
                    radius,
                    family: Family::from_indices(&sub, b).expect("disjoint components"),
                })
                .collect(),
        };
        let d = cover.max_diameter(&sub);
        source.record(validate_cover(&cover, &sub, d).accepted(), || {
            format!("trial {t}: radii {radii:?}")
        });

        let grown = w.restrict(&w.neighborhood(&x, m)).expect("points of the window");
        let ok = match expand_cover(&cover, m, w) {
            Ok(e) => {
                let rep = validate_cover(&e, &grown, d + 2 * m);
                rep.accepted() && e.radii().iter().zip(&radii).all(|(a, b)| a + 2 * m == *b)
            }
            Err(_) => false,
        };
        expanded.record(ok, || format!("trial {t}: radii {radii:?}, m = {m}"));
    }
    vec![source.done(), expanded.done()]
}

fn thm2_suite() -> Vec<CheckResult> {
    let mut builds = Tally::new("lomega_cover_valid");
    let mut bound = Tally::new("derivative_ord_bound");
    let mut details = Vec::new();
    for n in 1..=2usize {
        let w = match Window::from_spec(&WindowSpec::Lomega {
            side: 24,
            level_cap: n + 1,
        }) {
            Ok(w) => w,
            Err(e) => return vec![failed("lomega_cover_valid", &e)],
        };
        let labels: Vec<Label> = (2..=6).filter(|&x| x != n as Label).collect();
        let mut refuted: Vec<u64> = Vec::new();
        let mut worst = 0;
        for mask in 1u64..1 << labels.len() {
            if mask.count_ones() as usize != n {
                continue;
            }
            let tau: Vec<u64> = (0..labels.len())
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| labels[k] as u64)
                .collect();
            let ok = match build_lomega_cover(&tau, n, &w) {
                Ok(lc) => {
                    worst = worst.max(lc.diameter);
                    lc.cover.entries.len() == n + 1
                        && validate_cover(&lc.cover, &w, lc.diameter).accepted()
                }
                Err(_) => false,
            };
            builds.record(ok, || format!("n = {n}, tau = {tau:?}"));
            if ok {
                refuted.push(mask);
            }
        }
        details.push(format!("n={n}: D={worst}"));
        // σ with σ ∪ {n} possibly a member: σ contains no refuted τ
        let candidates =
            (1u64..1 << labels.len()).filter(|s| refuted.iter().all(|t| s & t != *t));
        let sys = SetSystem::from_masks(&labels, candidates).expect("masks inside the universe");
        let ord = sys.ord();
        bound.record(ord <= Ordinal::natural(n as u64 - 1), || {
            format!("n = {n}: derivative ord {ord}")
        });
    }
    vec![builds.note(details.join(", ")).done(), bound.done()]
}

// ---- exhaustive desk checks ----

fn decide(window: &Window, radii: &[u64], d: u64, budget: u64) -> Result<Verdict> {
    let inst = DecisionInstance::new(window.clone(), radii.to_vec(), d)?;
    let cfg = SolverConfig {
        mode: SearchMode::Fast,
        node_budget: budget,
    };
    Ok(decide_cover(&inst, &cfg).verdict)
}

fn guarded(points: usize, colors: usize) -> bool {
    (colors as f64).powi(points as i32) <= BRUTE_FORCE_LIMIT as f64
}

/// `n` families, each `2k`-disjoint, on `(kℤ)ⁿ ∩ [-D, D]ⁿ` for `D` from `2k`
/// to `cap`: all UNSAT. The smallest `D` is repeated by brute force when
/// feasible.
fn lemma3_suite(k: usize, n: usize, cap: u64, budget: u64) -> Vec<CheckResult> {
    let mut unsat = Tally::new("unsat_per_diameter");
    let mut brute = Tally::new("brute_force_agrees");
    let radii = vec![2 * k as u64; n];
    let first = 2 * k as u64;
    for d in first..=cap {
        let spec = WindowSpec::Kzn {
            dims: n,
            scale: k as i64,
            side: d as i64,
        };
        let w = match Window::from_spec(&spec) {
            Ok(w) => w,
            Err(e) => return vec![failed("unsat_per_diameter", &e)],
        };
        match decide(&w, &radii, d, budget) {
            Ok(v) => unsat.record(v.is_unsat(), || format!("D = {d}: {}", v.name())),
            Err(e) => unsat.record(false, || format!("D = {d}: {e}")),
        }
        if d == first && guarded(w.len(), n) {
            match brute_force_decide(&w, &radii, d) {
                Ok(c) => brute.record(c.is_none(), || format!("D = {d}: brute force found a cover")),
                Err(e) => brute.record(false, || format!("D = {d}: {e}")),
            }
        }
    }
    let mut out = vec![unsat.done()];
    if brute.trials > 0 {
        out.push(brute.done());
    }
    out
}

/// `σ = {2, …, k+1}` on `ℤᵏ ∩ [-cap, cap]ᵏ`: UNSAT for every `D ≤ cap`,
/// with brute force on the side-2 window for `D ≤ 2` when feasible.
fn thm3_suite(k: usize, cap: u64, budget: u64) -> Vec<CheckResult> {
    let mut unsat = Tally::new("unsat_per_diameter");
    let mut brute = Tally::new("brute_force_agrees");
    let radii: Vec<u64> = (2..=k as u64 + 1).collect();
    let window = |side| Window::from_spec(&WindowSpec::Zn { dims: k, side });
    let w = match window(cap.max(1) as i64) {
        Ok(w) => w,
        Err(e) => return vec![failed("unsat_per_diameter", &e)],
    };
    for d in 0..=cap {
        match decide(&w, &radii, d, budget) {
            Ok(v) => unsat.record(v.is_unsat(), || format!("D = {d}: {}", v.name())),
            Err(e) => unsat.record(false, || format!("D = {d}: {e}")),
        }
    }
    let small = match window(2) {
        Ok(w) => w,
        Err(e) => return vec![unsat.done(), failed("brute_force_agrees", &e)],
    };
    if guarded(small.len(), k) {
        for d in 0..=cap.min(2) {
            let fast = decide(&small, &radii, d, budget).map(|v| v.is_sat());
            let slow = brute_force_decide(&small, &radii, d).map(|c| c.is_some());
            match (fast, slow) {
                (Ok(a), Ok(b)) => brute.record(a == b, || format!("D = {d}: solver {a}, brute force {b}")),
                (Err(e), _) | (_, Err(e)) => brute.record(false, || format!("D = {d}: {e}")),
            }
        }
    }
    let mut out = vec![unsat.done()];
    if brute.trials > 0 {
        out.push(brute.done());
    }
    out
}

/// Lattice covers for `n ∈ dims`, `r ∈ radii`: `n+1` families, each
/// `r`-disjoint, block diameter `≤ (n+1)(r+1)`.
pub fn zn_cover_check(dims: &[usize], radii: &[u64]) -> CheckResult {
    let mut t = Tally::new("zn_cover_valid");
    for &n in dims {
        for &r in radii {
            // a full period per axis suffices; n = 3 keeps only that
            let period = (n as i64 + 1) * (r as i64 + 1);
            let side = if n <= 2 { 5 * period } else { 2 * (r as i64 + 1) };
            let ok = Window::from_spec(&WindowSpec::Zn { dims: n, side })
                .and_then(|w| {
                    let c = build_zn_cover(n, r, &w)?;
                    let bound = (n as u64 + 1) * (r + 1);
                    Ok(c.entries.len() == n + 1 && validate_cover(&c, &w, bound).accepted())
                })
                .unwrap_or(false);
            t.record(ok, || format!("n = {n}, r = {r}"));
        }
    }
    t.done()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for name in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap().name(), name);
        }
        assert!("lemma9".parse::<Suite>().is_err());
        assert!("LEMMAD".parse::<Suite>().is_err());
    }

    #[test]
    fn cheap_suites_pass() {
        let opts = VerifyOptions {
            trials: Some(40),
            ..VerifyOptions::default()
        };
        for s in [Suite::Metric, Suite::LemmaD, Suite::LemmaF, Suite::Lemma5, Suite::Lemma4] {
            let r = run_suite(s, &opts);
            assert!(r[0].passed, "{}", serde_json::to_string_pretty(&r).unwrap());
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let opts = VerifyOptions {
            trials: Some(25),
            seed: 11,
            ..VerifyOptions::default()
        };
        let a = serde_json::to_string(&run_suite(Suite::LemmaF, &opts)).unwrap();
        let b = serde_json::to_string(&run_suite(Suite::LemmaF, &opts)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tower_reference_agrees_on_examples() {
        let p = |v: &[i64]| TowerPoint::from_coords(v.to_vec()).unwrap();
        assert_eq!(tower_reference(&p(&[0]), &p(&[0, 0, 0])), 3);
        assert_eq!(tower_reference(&p(&[5]), &p(&[0, 1])), 5);
    }

    #[test]
    fn small_thm3_and_lemma3() {
        let r = thm3_suite(2, 2, 1_000_000);
        assert!(r.iter().all(|c| c.passed), "{r:?}");
        let r = lemma3_suite(1, 2, 2, 1_000_000);
        assert!(r.iter().all(|c| c.passed), "{r:?}");
        assert_eq!(r.len(), 2);
    }
}
