mod common;

use rand::seq::SliceRandom;
use rand::Rng;
use trasdim::covers::{expand_family, is_r_disjoint, validate_cover, ColoredCover, CoverEntry, Family};
use trasdim::spaces::{Point, Window, WindowSpec};
use trasdim::verify::{run_suite, Suite, VerifyOptions};

use common::{pairwise_valid, random_window};

/// Random partition-like cover: points dealt into random blocks of random
/// families, with some points possibly left out.
fn random_cover(rng: &mut rand_chacha::ChaCha8Rng, w: &Window) -> ColoredCover {
    let families = rng.gen_range(1..=3);
    let mut blocks: Vec<Vec<Vec<usize>>> = (0..families)
        .map(|_| vec![Vec::new(); rng.gen_range(1..=4)])
        .collect();
    for i in 0..w.len() {
        if rng.gen_bool(0.05) {
            continue;
        }
        let f = rng.gen_range(0..families);
        let b = rng.gen_range(0..blocks[f].len());
        blocks[f][b].push(i);
    }
    ColoredCover {
        entries: blocks
            .into_iter()
            .map(|bs| {
                let bs: Vec<Vec<usize>> = bs.into_iter().filter(|b| !b.is_empty()).collect();
                CoverEntry {
                    radius: rng.gen_range(1..=3),
                    family: Family::from_indices(w, &bs).unwrap(),
                }
            })
            .collect(),
    }
}

#[test]
fn validator_matches_pairwise_recomputation() {
    let mut rng = common::rng(31);
    let mut accepted = 0;
    for t in 0..100 {
        let w = random_window(&mut rng, 10);
        let cover = random_cover(&mut rng, &w);
        let d = rng.gen_range(0..=common::diameter(&w));
        let ok = validate_cover(&cover, &w, d).accepted();
        accepted += ok as usize;
        assert_eq!(ok, pairwise_valid(&w, &cover, d), "trial {t}");
    }
    assert!(accepted > 0);
}

#[test]
fn rejections_are_reported_separately() {
    let w = Window::from_spec(&WindowSpec::Zn { dims: 1, side: 4 }).unwrap();
    let all: Vec<usize> = (0..w.len()).collect();
    let cover = ColoredCover {
        entries: vec![CoverEntry {
            radius: 1,
            family: Family::from_indices(&w, &[all[..8].to_vec()]).unwrap(),
        }],
    };
    let rep = validate_cover(&cover, &w, 8);
    assert!(!rep.covered && rep.bounded);
    let rep = validate_cover(
        &ColoredCover {
            entries: vec![CoverEntry {
                radius: 1,
                family: Family::from_indices(&w, std::slice::from_ref(&all)).unwrap(),
            }],
        },
        &w,
        7,
    );
    assert!(rep.covered && !rep.bounded && rep.oversized_blocks == 1);
    let outside = ColoredCover {
        entries: vec![CoverEntry {
            radius: 1,
            family: Family::new(vec![vec![Point::lattice(vec![99])]]).unwrap(),
        }],
    };
    assert_eq!(validate_cover(&outside, &w, 0).outside_points.len(), 1);
}

#[test]
fn disjointness_examples() {
    let w = Window::from_spec(&WindowSpec::Zn { dims: 1, side: 6 }).unwrap();
    let fam = |bs: &[&[i64]]| {
        Family::new(
            bs.iter()
                .map(|b| b.iter().map(|&x| Point::lattice(vec![x])).collect())
                .collect(),
        )
        .unwrap()
    };
    assert!(is_r_disjoint(&fam(&[&[0, 1], &[4, 5]]), 3, &w));
    assert!(!is_r_disjoint(&fam(&[&[0, 1], &[3]]), 3, &w));
    assert!(is_r_disjoint(&fam(&[&[0, 1, 2]]), 100, &w));

    let f = fam(&[&[0], &[5]]);
    assert_eq!(expand_family(&f, 0, &w).unwrap(), f);
    assert_eq!(
        expand_family(&f, 1, &w).unwrap(),
        fam(&[&[-1, 0, 1], &[4, 5, 6]])
    );
}

#[test]
fn expansion_invariant_holds() {
    let opts = VerifyOptions {
        trials: Some(100),
        seed: 4,
        ..VerifyOptions::default()
    };
    let r = run_suite(Suite::Lemma4, &opts);
    assert!(r[0].passed, "{r:?}");
    assert_eq!(r[0].checks[1].trials, 100);
}

#[test]
fn restricted_covers_stay_valid() {
    let mut rng = common::rng(8);
    let w = Window::from_spec(&WindowSpec::Zn { dims: 2, side: 12 }).unwrap();
    let cover = trasdim::covers::build_zn_cover(2, 3, &w).unwrap();
    for _ in 0..10 {
        let mut keep: Vec<usize> = (0..w.len()).collect();
        keep.shuffle(&mut rng);
        keep.truncate(rng.gen_range(1..=60));
        let sub = w.restrict(&keep).unwrap();
        assert!(validate_cover(&cover.restrict_to(&sub), &sub, 12).accepted());
    }
}
