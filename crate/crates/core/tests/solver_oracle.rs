mod common;

use rand::seq::SliceRandom;
use rand::Rng;
use trasdim::covers::validate_cover;
use trasdim::solver::{
    brute_force_coloring, brute_force_decide, decide_cover, min_diameter, DecisionInstance,
    SearchMode, SolverConfig, Verdict,
};
use trasdim::spaces::{Window, WindowSpec};

use common::{coloring_of, pairwise_valid, random_instance};

fn decide(w: &Window, radii: &[u64], d: u64, mode: SearchMode) -> trasdim::solver::Certificate {
    let inst = DecisionInstance::new(w.clone(), radii.to_vec(), d).unwrap();
    decide_cover(
        &inst,
        &SolverConfig {
            mode,
            node_budget: 10_000_000,
        },
    )
}

fn line(n: i64) -> Window {
    let pts: Vec<_> = (0..n).map(|x| trasdim::spaces::Point::lattice(vec![x])).collect();
    Window::from_points(trasdim::spaces::Metric::Sup, &pts).unwrap()
}

#[test]
fn canonical_witness_is_the_first_brute_force_coloring() {
    let mut rng = common::rng(2024);
    let mut sat = 0;
    for t in 0..100 {
        let (w, radii, d) = random_instance(&mut rng, 14, 2);
        let cert = decide(&w, &radii, d, SearchMode::Canonical);
        let oracle = brute_force_coloring(&w, &radii, d).unwrap();
        match (&cert.verdict, &oracle) {
            (Verdict::Sat { witness }, Some(first)) => {
                sat += 1;
                assert!(cert.canonical, "trial {t}");
                assert_eq!(&coloring_of(&w, witness), first, "trial {t}: {radii:?} D={d}");
                assert!(pairwise_valid(&w, witness, d), "trial {t}");
            }
            (Verdict::Unsat, None) => assert!(cert.stats.nodes > 0, "trial {t}"),
            (v, o) => panic!("trial {t}: solver {} but brute force {:?}", v.name(), o.is_some()),
        }
    }
    assert!(sat > 10 && sat < 95, "degenerate sample: {sat} SAT");
}

#[test]
fn fast_mode_agrees_with_brute_force() {
    let mut rng = common::rng(99);
    for t in 0..100 {
        let (w, radii, d) = random_instance(&mut rng, 14, 2);
        let cert = decide(&w, &radii, d, SearchMode::Fast);
        let oracle = brute_force_decide(&w, &radii, d).unwrap();
        assert_eq!(cert.verdict.is_sat(), oracle.is_some(), "trial {t}");
        if let Verdict::Sat { witness } = &cert.verdict {
            assert!(validate_cover(witness, &w, d).accepted());
        }
    }
}

#[test]
fn worked_examples() {
    let w = line(10);
    assert!(decide(&w, &[3], 9, SearchMode::Canonical).verdict.is_sat());
    assert!(decide(&w, &[3], 2, SearchMode::Canonical).verdict.is_unsat());
    assert!(brute_force_decide(&w, &[3], 2).unwrap().is_none());
    let cert = decide(&w, &[3, 3], 1, SearchMode::Canonical);
    let Verdict::Sat { witness } = &cert.verdict else {
        panic!("expected SAT")
    };
    let blocks = |k: usize| -> Vec<Vec<i64>> {
        witness.entries[k]
            .family
            .blocks()
            .iter()
            .map(|b| b.iter().map(|p| p.coords()[0]).collect())
            .collect()
    };
    assert_eq!(blocks(0), vec![vec![0, 1], vec![4, 5], vec![8, 9]]);
    assert_eq!(blocks(1), vec![vec![2, 3], vec![6, 7]]);

    let cfg = SolverConfig::default();
    assert_eq!(min_diameter(&w, &[2, 2], &cfg).unwrap().diameter, Some(0));
    assert_eq!(min_diameter(&w, &[3, 3], &cfg).unwrap().diameter, Some(1));
    assert_eq!(min_diameter(&w, &[3], &cfg).unwrap().diameter, Some(9));

    let single = line(1);
    assert!(decide(&single, &[5, 2], 0, SearchMode::Canonical).verdict.is_sat());
}

#[test]
fn sat_is_monotone_in_diameter() {
    let mut rng = common::rng(5);
    for _ in 0..40 {
        let (w, radii, d) = random_instance(&mut rng, 12, 2);
        if decide(&w, &radii, d, SearchMode::Fast).verdict.is_sat() {
            for d2 in d..=d + 3 {
                assert!(decide(&w, &radii, d2, SearchMode::Fast).verdict.is_sat());
            }
        }
    }
}

#[test]
fn smaller_radii_preserve_sat() {
    let mut rng = common::rng(6);
    for _ in 0..40 {
        let (w, radii, d) = random_instance(&mut rng, 12, 2);
        if !decide(&w, &radii, d, SearchMode::Fast).verdict.is_sat() {
            continue;
        }
        for k in 0..radii.len() {
            for r in 1..radii[k] {
                let mut smaller = radii.clone();
                smaller[k] = r;
                assert!(decide(&w, &smaller, d, SearchMode::Fast).verdict.is_sat());
            }
        }
    }
}

#[test]
fn witnesses_restrict_to_sub_windows() {
    let mut rng = common::rng(7);
    let mut checked = 0;
    while checked < 30 {
        let (w, radii, d) = random_instance(&mut rng, 14, 2);
        let Verdict::Sat { witness } = decide(&w, &radii, d, SearchMode::Fast).verdict else {
            continue;
        };
        let mut keep: Vec<usize> = (0..w.len()).collect();
        keep.shuffle(&mut rng);
        keep.truncate(rng.gen_range(1..=w.len()));
        let sub = w.restrict(&keep).unwrap();
        assert!(validate_cover(&witness.restrict_to(&sub), &sub, d).accepted());
        checked += 1;
    }
}

#[test]
fn unsat_counts_nodes() {
    let w = Window::from_spec(&WindowSpec::Zn { dims: 2, side: 2 }).unwrap();
    let cert = decide(&w, &[2, 2], 2, SearchMode::Canonical);
    assert!(cert.verdict.is_unsat());
    assert!(cert.stats.nodes > 0);
}

#[test]
fn canonical_output_is_reproducible() {
    let w = Window::from_spec(&WindowSpec::Zn { dims: 2, side: 2 }).unwrap();
    let a = serde_json::to_string(&decide(&w, &[2, 3], 3, SearchMode::Canonical)).unwrap();
    let b = serde_json::to_string(&decide(&w, &[2, 3], 3, SearchMode::Canonical)).unwrap();
    assert_eq!(a, b);
}
