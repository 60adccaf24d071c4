use normtori::classify::{classify_general, family_pair, retract_summary, Rationality};
use normtori::group::SUBGROUP_CLASS_BOUND;
use normtori::invertibility::{
    build_certificate, certify, decide_for_set, decide_p_invertibility, paper_instance, reduce_to_sylow,
    rule_coprime_index, rule_cyclic_sylow, rule_hall_necessity, verify_splitting_prime_to_p, Criterion, Verdict,
};
use normtori::lattice::{norm_one_lattice, permutation_lattice};
use normtori::{Error, Family, FiniteGroup, Permutation};

fn perm(n: usize, s: &str) -> Permutation {
    Permutation::parse_cycles(n, s).unwrap()
}

#[test]
fn rule_examples() {
    let (s5, s4) = family_pair(Family::Symmetric, 5).unwrap();
    assert_eq!(rule_coprime_index(&s5, &s4, 2).unwrap().unwrap().verdict, Verdict::PInvertible);
    let (s6, s5h) = family_pair(Family::Symmetric, 6).unwrap();
    assert!(rule_coprime_index(&s6, &s5h, 5).unwrap().is_some());
    assert!(rule_coprime_index(&s6, &s5h, 2).unwrap().is_none());
    assert!(rule_cyclic_sylow(&FiniteGroup::symmetric(3).unwrap(), 3).unwrap().is_some());
    assert!(rule_cyclic_sylow(&s5, 5).unwrap().is_some());
    assert!(rule_cyclic_sylow(&FiniteGroup::symmetric(4).unwrap(), 2).unwrap().is_none());
    assert!(rule_hall_necessity(&s5, &s4, 5).unwrap().is_none());
    let (g4, h4) = family_pair(Family::Symmetric, 4).unwrap();
    assert!(rule_hall_necessity(&g4, &h4, 2).unwrap().is_none());
}

#[test]
fn hall_rule_fires_for_a4() {
    let (a4, a3) = family_pair(Family::Alternating, 4).unwrap();
    let d = rule_hall_necessity(&a4, &a3, 2).unwrap().unwrap();
    assert_eq!(d.verdict, Verdict::NotPInvertible);
    let c = d.certificate.unwrap();
    assert_eq!(c.criterion, Criterion::HallFreeJp);
    assert_eq!(c.free_rank, Some(1));
}

#[test]
fn sylow_reduction_orders() {
    for (n, p, order) in [(6usize, 3u64, 9u128), (4, 2, 8), (5, 7, 1)] {
        let (g, h) = family_pair(Family::Symmetric, n).unwrap();
        let j = norm_one_lattice(&g, &h).unwrap();
        let (gp, jp) = reduce_to_sylow(&g, &j, p).unwrap();
        assert_eq!(gp.order(), order);
        assert_eq!(jp.rank(), n - 1);
    }
}

#[test]
fn splitting_prime_to_p() {
    for (family, n, p) in [(Family::Symmetric, 5, 2), (Family::Alternating, 5, 3), (Family::Symmetric, 12, 5)] {
        let (g, h) = family_pair(family, n).unwrap();
        let proof = verify_splitting_prime_to_p(&g, &h, p).unwrap();
        assert_eq!(proof.denominator, n as u64);
    }
    let (g, h) = family_pair(Family::Symmetric, 4).unwrap();
    assert!(matches!(verify_splitting_prime_to_p(&g, &h, 2), Err(Error::Argument(_))));
}

#[test]
fn certificate_examples() {
    let c = build_certificate(Family::Symmetric, 9, 3).unwrap();
    assert_eq!(c.witness_generators, vec![perm(9, "(1 2 3)"), perm(9, "(4 5 6)"), perm(9, "(7 8 9)")]);
    assert_eq!(c.decomposition.len(), 3);
    let c = build_certificate(Family::Symmetric, 8, 2).unwrap();
    assert_eq!(c.criterion, Criterion::EvenSHyperplanes);
    assert_eq!(c.witness_subgroup.order(), 16);
    assert_eq!(c.decomposition.len(), 4);
    let c = build_certificate(Family::Alternating, 10, 2).unwrap();
    assert_eq!(c.criterion, Criterion::KleinThreeLines);
    let rho1 = perm(10, "(1 2)(3 4)");
    let line = c.decomposition.iter().find(|d| d.stabilizer.contains(&rho1)).unwrap();
    assert_eq!(line.multiplicity, 10 / 2 - 2);
    for (family, n, p) in [(Family::Symmetric, 6, 5), (Family::Symmetric, 7, 7), (Family::Alternating, 2, 2)] {
        assert!(build_certificate(family, n, p).is_err());
    }
}

#[test]
fn perturbed_decomposition_is_rejected() {
    let mut inst = paper_instance(Family::Alternating, 10, 2).unwrap();
    inst.stated.as_mut().unwrap()[0].multiplicity += 1;
    match certify(&inst) {
        Err(Error::Internal(msg)) => assert!(msg.contains("Prop evenA2")),
        other => panic!("expected a mismatch, got {other:?}"),
    }
}

#[test]
fn decisions_cite_propositions() {
    let (g, h) = family_pair(Family::Symmetric, 6).unwrap();
    let d = decide_p_invertibility(&g, &h, 2).unwrap();
    assert_eq!(d.verdict, Verdict::NotPInvertible);
    assert_eq!(d.certificate.as_ref().unwrap().criterion, Criterion::EvenSHyperplanes);
    let json = serde_json::to_value(&d).unwrap();
    assert!(json["rules"].as_array().unwrap().iter().any(|r| r["paper_ref"] == "Prop evenS"));
    let (g, h) = family_pair(Family::Symmetric, 7).unwrap();
    for p in [2, 3, 5, 7, 11, 13] {
        assert_eq!(decide_p_invertibility(&g, &h, p).unwrap().verdict, Verdict::PInvertible);
    }
}

#[test]
fn unknown_outside_rules() {
    // S_6 on the cosets of <(1 2)(3 4)>: 2 divides the index, the Sylow 2-subgroup
    // is dihedral-by-two, and no witness shape is found.
    let s4 = FiniteGroup::symmetric(4).unwrap();
    let h = s4.subgroup(vec![perm(4, "(1 2)")], None).unwrap();
    let d = decide_p_invertibility(&s4, &h, 2).unwrap();
    assert_ne!(d.verdict, Verdict::PInvertible);
    if d.verdict == Verdict::NotPInvertible {
        assert!(d.certificate.is_some());
    }
}

/// Lemma 2.1: a positive verdict never turns negative on a subgroup; Lemma 2.2:
/// verdicts before and after restricting to a Sylow subgroup agree when both are
/// decided.
#[test]
fn restriction_coherence() {
    for n in 3..=5 {
        for family in [Family::Symmetric, Family::Alternating] {
            if family == Family::Alternating && n < 4 {
                continue;
            }
            let (g, h) = family_pair(family, n).unwrap();
            let perm_lattice = permutation_lattice(&g, &h).unwrap();
            let classes = g.subgroup_classes(SUBGROUP_CLASS_BOUND).unwrap();
            for p in [2u64, 3, 5] {
                let top = decide_p_invertibility(&g, &h, p).unwrap();
                for k in &classes {
                    let restricted = perm_lattice.restrict(k).unwrap();
                    let sub = decide_for_set(k, &restricted, p).unwrap();
                    if top.verdict == Verdict::PInvertible {
                        assert_ne!(sub.verdict, Verdict::NotPInvertible, "{family}_{n} p={p} on {k}");
                    }
                }
                let sylow = g.sylow_subgroup(p).unwrap();
                let reduced = decide_for_set(&sylow, &perm_lattice.restrict(&sylow).unwrap(), p).unwrap();
                if top.verdict != Verdict::Unknown && reduced.verdict != Verdict::Unknown {
                    assert_eq!(top.verdict, reduced.verdict, "{family}_{n} p={p}");
                }
            }
        }
    }
}

#[test]
fn galois_cases() {
    // G/H ≅ C_6 via the regular action of C_6
    let c6 = FiniteGroup::from_generators(6, vec![perm(6, "(1 2 3 4 5 6)")], None).unwrap();
    let one = FiniteGroup::trivial(6).unwrap();
    assert_eq!(classify_general(&c6, &one, 2).unwrap().verdict, Rationality::PRetractRational);
    let v4 = FiniteGroup::from_generators(4, vec![perm(4, "(1 2)(3 4)"), perm(4, "(1 3)(2 4)")], None).unwrap();
    assert_eq!(classify_general(&v4, &FiniteGroup::trivial(4).unwrap(), 2).unwrap().verdict, Rationality::NotPRetractRational);
    // S_3 / A_3 ≅ C_2
    let s3 = FiniteGroup::symmetric(3).unwrap();
    let a3 = s3.subgroup(vec![perm(3, "(1 2 3)")], None).unwrap();
    assert_eq!(classify_general(&s3, &a3, 2).unwrap().verdict, Rationality::PRetractRational);
}

#[test]
fn retract_summaries() {
    let expected = [(Family::Symmetric, 5, true), (Family::Symmetric, 6, false), (Family::Alternating, 7, true)];
    for (family, n, rational) in expected {
        let (g, h) = family_pair(family, n).unwrap();
        let v = retract_summary(&g, &h).unwrap();
        let want = if rational { Rationality::RetractRational } else { Rationality::NotRetractRational };
        assert_eq!(v.verdict, want, "{family}_{n}");
    }
}

#[test]
fn j_rank_for_set_engine() {
    let s4 = FiniteGroup::symmetric(4).unwrap();
    let m = permutation_lattice(&s4, &s4.point_stabilizer(4).unwrap()).unwrap();
    assert!(decide_for_set(&s4, &norm_one_lattice(&s4, &s4.point_stabilizer(4).unwrap()).unwrap(), 2).is_err());
    assert_eq!(decide_for_set(&s4, &m, 3).unwrap().verdict, Verdict::PInvertible);
}
