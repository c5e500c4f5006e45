mod common;

use proptest::prelude::*;
use trasdim::spaces::{sup_dist, tower_dist, LatticePoint, Metric, Point, TowerPoint, Window, WindowSpec};

fn tower() -> impl Strategy<Value = TowerPoint> {
    (1usize..=6)
        .prop_flat_map(|l| prop::collection::vec(-100i64..=100, l))
        .prop_map(|c| TowerPoint::from_coords(c).unwrap())
}

fn reference(a: &TowerPoint, b: &TowerPoint) -> u64 {
    common::tower_reference(a.coords(), b.coords())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn tower_metric_axioms(a in tower(), b in tower(), c in tower()) {
        let ab = tower_dist(&a, &b);
        prop_assert_eq!(ab == 0, a == b);
        prop_assert_eq!(ab, tower_dist(&b, &a));
        prop_assert!(tower_dist(&a, &c) <= ab + tower_dist(&b, &c));
        prop_assert_eq!(ab, reference(&a, &b));
    }

    #[test]
    fn one_level_is_the_sup_metric(l in 1usize..=5, seed in prop::collection::vec(-50i64..=50, 10)) {
        let a = seed[..l].to_vec();
        let b = seed[5..5 + l].to_vec();
        let t = tower_dist(&TowerPoint::from_coords(a.clone()).unwrap(), &TowerPoint::from_coords(b.clone()).unwrap());
        prop_assert_eq!(t, sup_dist(&LatticePoint(a), &LatticePoint(b)).unwrap());
    }

    #[test]
    fn neighborhoods_grow_with_radius(side in 1i64..=4, cap in 1usize..=3, r in 0u64..=6, extra in 0u64..=4, picks in prop::collection::vec(any::<prop::sample::Index>(), 1..4)) {
        let w = Window::from_spec(&WindowSpec::Lomega { side, level_cap: cap }).unwrap();
        let set: Vec<usize> = picks.iter().map(|i| i.index(w.len())).collect();
        let small = w.neighborhood(&set, r);
        let big = w.neighborhood(&set, r + extra);
        prop_assert!(small.iter().all(|i| big.contains(i)));
        prop_assert!(set.iter().all(|i| small.contains(i)));
        for &i in &big {
            let d = set.iter().map(|&j| w.dist(i, j)).min().unwrap();
            prop_assert!(d <= r + extra);
        }
    }
}

#[test]
fn worked_distances() {
    let lp = |v: &[i64]| LatticePoint(v.to_vec());
    let tp = |v: &[i64]| TowerPoint::from_coords(v.to_vec()).unwrap();
    assert_eq!(sup_dist(&lp(&[0, 0]), &lp(&[0, 0])).unwrap(), 0);
    assert_eq!(sup_dist(&lp(&[3, 4]), &lp(&[5, 1])).unwrap(), 3);
    assert_eq!(sup_dist(&lp(&[-2, 7, 0]), &lp(&[4, 7, -1])).unwrap(), 6);
    assert!(sup_dist(&lp(&[1]), &lp(&[1, 2])).is_err());
    assert_eq!(tower_dist(&tp(&[3, 4]), &tp(&[5, 1])), 3);
    assert_eq!(tower_dist(&tp(&[0]), &tp(&[0, 0, 0])), 3);
    assert_eq!(tower_dist(&tp(&[6]), &tp(&[1, 7, 0])), reference(&tp(&[6]), &tp(&[1, 7, 0])));
    assert_eq!(tower_dist(&tp(&[6]), &tp(&[1, 7, 0])), 7);
}

#[test]
fn windows_are_deterministic_and_enumerated() {
    let spec = WindowSpec::Lomega { side: 2, level_cap: 2 };
    let a = Window::from_spec(&spec).unwrap();
    let b = Window::from_spec(&spec).unwrap();
    assert_eq!(a.points(), b.points());
    assert_eq!(a.len(), 14);
    let mut expect: Vec<Point> = (-2..=2).map(|x| Point::tower(vec![x]).unwrap()).collect();
    for x in [-2, 0, 2] {
        for y in [-2, 0, 2] {
            expect.push(Point::tower(vec![x, y]).unwrap());
        }
    }
    assert_eq!(a.points(), expect);
    let k = Window::from_spec(&WindowSpec::Kzn { dims: 2, scale: 2, side: 2 }).unwrap();
    assert_eq!(k.len(), 9);
    let origin = a.index_of(&Point::tower(vec![0]).unwrap()).unwrap();
    let o2 = a.index_of(&Point::tower(vec![0, 0]).unwrap()).unwrap();
    assert!(a.neighborhood(&[origin], 3).contains(&o2));
    assert_eq!(a.metric(), Metric::Tower);
}
