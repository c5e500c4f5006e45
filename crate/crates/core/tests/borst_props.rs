use proptest::prelude::*;
use trasdim::borst::{membership_a, Label, Membership, SetSystem, TruncatedA};
use trasdim::ordinal::Ordinal;
use trasdim::spaces::WindowSpec;

fn system(max_len: usize, max_members: usize) -> impl Strategy<Value = SetSystem> {
    (1..=max_len).prop_flat_map(move |n| {
        let full = (1u64 << n) - 1;
        prop::collection::vec(1..=full, 0..=max_members).prop_map(move |masks| {
            let universe: Vec<Label> = (1..=n as Label).map(|x| 3 * x).collect();
            SetSystem::from_masks(&universe, masks).unwrap()
        })
    })
}

fn largest_member(m: &SetSystem) -> u64 {
    m.members().iter().map(|s| s.len() as u64).max().unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn ord_is_the_largest_member(m in system(8, 40)) {
        let ord = m.ord();
        prop_assert!(!ord.is_infinity());
        prop_assert_eq!(ord, Ordinal::natural(largest_member(&m)));
    }

    #[test]
    fn derivatives_compose(m in system(7, 30), a in any::<u64>(), b in any::<u64>()) {
        let full = (1u64 << m.universe().len()) - 1;
        let sigma = a & full;
        let tau = b & full & !sigma;
        prop_assert_eq!(
            m.derivative_mask(sigma).derivative_mask(tau),
            m.derivative_mask(sigma | tau)
        );
        prop_assert_eq!(m.derivative_mask(0), m.clone());
    }

    #[test]
    fn injective_relabels_keep_ord(m in system(6, 20), shift in 1u32..50) {
        let image = m.relabel(|x| 7 * x + shift).unwrap();
        prop_assert_eq!(image.ord(), m.ord());
    }

    #[test]
    fn intermediate_values(m in system(5, 31)) {
        let full = (1u64 << m.universe().len()) - 1;
        for tau in 0..=full {
            let top = m.derivative_mask(tau).ord().as_natural().unwrap();
            for xi in 0..=top {
                let hit = (0..=full)
                    .filter(|s| s & tau == 0)
                    .any(|s| m.derivative_mask(tau | s).ord() == Ordinal::natural(xi));
                prop_assert!(hit, "tau {:#x}, xi {}", tau, xi);
            }
        }
    }

    #[test]
    fn inclusive_closure_is_inclusive(m in system(6, 10)) {
        let c = SetSystem::inclusive_closure(m.universe(), &m.members()).unwrap();
        prop_assert!(c.is_inclusive());
        prop_assert_eq!(c.ord(), m.ord());
    }
}

#[test]
fn truncation_is_inclusive() {
    let spec = TruncatedA {
        window: WindowSpec::Zn { dims: 2, side: 3 },
        diameter: 3,
        r_max: 4,
    };
    let sets: [&[Label]; 4] = [&[2, 3], &[2, 4], &[3, 4], &[2, 3, 4]];
    for sigma in sets {
        if membership_a(&spec, sigma, 10_000_000, None).unwrap() != Membership::In {
            continue;
        }
        for k in 0..sigma.len() {
            let mut sub = sigma.to_vec();
            sub.remove(k);
            assert_eq!(
                membership_a(&spec, &sub, 10_000_000, None).unwrap(),
                Membership::In,
                "{sigma:?} without {}",
                sigma[k]
            );
        }
    }
    // a point-set distance of at least 1 separates any two lattice points
    assert_eq!(membership_a(&spec, &[1], 10_000, None).unwrap(), Membership::Out);
}

#[test]
fn system_examples() {
    let m = SetSystem::new(&[1, 2, 3], &[vec![1, 2], vec![3]]).unwrap();
    assert_eq!(m.ord(), Ordinal::natural(2));
    assert_eq!(SetSystem::empty(&[1]).unwrap().ord(), Ordinal::zero());
}
