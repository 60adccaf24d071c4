use normtori::group::{is_hall, p_part, prime_divisors, SUBGROUP_CLASS_BOUND};
use normtori::{FiniteGroup, Permutation};

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

#[test]
fn sylow_orders_match_factorials() {
    for n in 2..=12 {
        let s = FiniteGroup::symmetric(n).unwrap();
        for p in prime_divisors(factorial(n)) {
            let syl = s.sylow_subgroup(p).unwrap();
            assert_eq!(syl.order(), p_part(factorial(n), p), "S_{n} p={p}");
            assert!(syl.is_subgroup_of(&s));
        }
    }
    for n in 4..=12 {
        let a = FiniteGroup::alternating(n).unwrap();
        let syl = a.sylow_subgroup(2).unwrap();
        assert_eq!(syl.order(), p_part(factorial(n) / 2, 2), "A_{n}");
        assert!(syl.generators().iter().all(Permutation::is_even));
    }
}

#[test]
fn subgroup_classes_of_small_groups() {
    // numbers of conjugacy classes of subgroups
    let cases = [(FiniteGroup::symmetric(3), 4), (FiniteGroup::symmetric(4), 11), (FiniteGroup::alternating(5), 9), (FiniteGroup::symmetric(5), 19)];
    for (g, count) in cases {
        let g = g.unwrap();
        let classes = g.subgroup_classes(SUBGROUP_CLASS_BOUND).unwrap();
        assert_eq!(classes.len(), count, "{g}");
        assert!(classes.windows(2).all(|w| w[0].order() <= w[1].order()));
        assert!(classes.iter().all(|k| g.order() % k.order() == 0));
    }
}

#[test]
fn hall_subgroups() {
    let a4 = FiniteGroup::alternating(4).unwrap();
    assert!(is_hall(&a4, &a4.point_stabilizer(4).unwrap()).unwrap());
    let s4 = FiniteGroup::symmetric(4).unwrap();
    assert!(!is_hall(&s4, &s4.point_stabilizer(4).unwrap()).unwrap());
    let s5 = FiniteGroup::symmetric(5).unwrap();
    assert!(is_hall(&s5, &s5.point_stabilizer(5).unwrap()).unwrap());
}

#[test]
fn large_family_membership_without_enumeration() {
    let s12 = FiniteGroup::symmetric(12).unwrap();
    assert!(!s12.is_enumerated());
    let x = Permutation::parse_cycles(12, "(1 12)(3 7 9)").unwrap();
    assert!(s12.contains(&x));
    let a12 = FiniteGroup::alternating(12).unwrap();
    assert!(!a12.contains(&x));
    let h = s12.point_stabilizer(12).unwrap();
    assert_eq!(h.index_in(&s12).unwrap(), 12);
}
