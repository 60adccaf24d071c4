use normtori::cohomology::{is_coflasque, is_flasque, sweep, tate, TateGroup};
use normtori::group::SUBGROUP_CLASS_BOUND;
use normtori::lattice::{norm_one_lattice, orbit_decomposition, permutation_lattice};
use normtori::{FiniteGroup, GLattice, IntMatrix, Permutation, Subgroup};
use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn cyclic(n: usize) -> FiniteGroup {
    let c = Permutation::from_cycles(n, &[(1..=n).collect()]).unwrap();
    FiniteGroup::from_generators(n, vec![c], None).unwrap()
}

fn sign() -> GLattice {
    GLattice::new(FiniteGroup::symmetric(2).unwrap(), vec![IntMatrix::from_rows(&[[-1]])]).unwrap()
}

fn divisors(values: &[u64]) -> Vec<BigInt> {
    values.iter().map(|&v| BigInt::from(v)).collect()
}

#[test]
fn small_oracles() {
    for p in [2usize, 3, 5] {
        let c = cyclic(p);
        let z = GLattice::trivial(c.clone(), 1);
        assert_eq!(tate(0, &c, &z).unwrap().invariants, divisors(&[p as u64]));
        assert!(tate(-1, &c, &z).unwrap().is_trivial());
        assert!(tate(1, &c, &z).unwrap().is_trivial());
        let regular = permutation_lattice(&c, &FiniteGroup::trivial(p).unwrap()).unwrap();
        for d in [-1, 0, 1] {
            assert!(tate(d, &c, &regular).unwrap().is_trivial());
        }
    }
    let s = sign();
    let c2 = s.group().clone();
    assert_eq!(tate(-1, &c2, &s).unwrap().invariants, divisors(&[2]));
    assert!(tate(0, &c2, &s).unwrap().is_trivial());
    assert_eq!(tate(1, &c2, &s).unwrap().invariants, divisors(&[2]));
    assert!(!is_flasque(&c2, &s).unwrap());
    let zero = GLattice::trivial(c2.clone(), 0);
    assert!(is_flasque(&c2, &zero).unwrap() && is_coflasque(&c2, &zero).unwrap());
}

#[test]
fn display_format() {
    let t = TateGroup { degree: 0, invariants: divisors(&[2, 2]) };
    assert_eq!(t.to_string(), "[2,2]");
    assert_eq!(serde_json::to_string(&t).unwrap(), "[2,2]");
}

/// Ĥ^i(K, Z[G/H]) against the sum of Ĥ^i(K, Z[K/S]) over the orbit stabilizers,
/// and Ĥ^i(K, Z[K/S]) against Ĥ^i(S, Z).
fn shapiro(g: &FiniteGroup, h: &Subgroup, k: &Subgroup) {
    let m = permutation_lattice(g, h).unwrap();
    let parts = orbit_decomposition(&m, k).unwrap();
    for d in [-1i8, 0, 1] {
        let direct = tate(d, k, &m).unwrap();
        let mut summed = TateGroup { degree: d, invariants: vec![] };
        for c in &parts {
            let piece = tate(d, k, &permutation_lattice(k, &c.stabilizer).unwrap()).unwrap();
            let induced = if c.stabilizer.order() == 1 {
                TateGroup { degree: d, invariants: vec![] }
            } else {
                tate(d, &c.stabilizer, &GLattice::trivial(c.stabilizer.clone(), 1)).unwrap()
            };
            assert_eq!(piece.invariants, induced.invariants, "Shapiro for {} in {k}", c.stabilizer);
            for _ in 0..c.multiplicity {
                summed = summed.merge(&piece);
            }
        }
        assert_eq!(direct.invariants, summed.invariants, "degree {d}, {h} over {k}");
        // every elementary divisor divides |K|
        assert!(direct.invariants.iter().all(|x| BigInt::from(k.order()) % x == BigInt::from(0)));
    }
}

#[test]
fn shapiro_and_additivity_over_s4() {
    let g = FiniteGroup::symmetric(4).unwrap();
    let classes = g.subgroup_classes(SUBGROUP_CLASS_BOUND).unwrap();
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..25 {
        let h = &classes[rng.gen_range(0..classes.len())];
        let k = &classes[rng.gen_range(1..classes.len())];
        shapiro(&g, h, k);
        let h2 = &classes[rng.gen_range(0..classes.len())];
        let a = permutation_lattice(&g, h).unwrap();
        let b = norm_one_lattice(&g, h2).unwrap();
        let sum = a.direct_sum(&b).unwrap();
        for d in [-1i8, 0, 1] {
            let lhs = tate(d, k, &sum).unwrap();
            let rhs = tate(d, k, &a).unwrap().merge(&tate(d, k, &b).unwrap());
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn cyclic_duality() {
    let g = FiniteGroup::symmetric(4).unwrap();
    let classes = g.subgroup_classes(SUBGROUP_CLASS_BOUND).unwrap();
    let lattices: Vec<GLattice> = classes.iter().flat_map(|h| [permutation_lattice(&g, h).unwrap(), norm_one_lattice(&g, h).unwrap()]).collect();
    for k in classes.iter().filter(|k| k.is_cyclic() && k.order() > 1) {
        for m in &lattices {
            let a = tate(-1, k, m).unwrap();
            let b = tate(1, k, m).unwrap();
            assert_eq!(a.invariants, b.invariants, "{k}");
        }
    }
}

#[test]
fn permutation_lattices_are_flasque_and_coflasque() {
    let g = FiniteGroup::symmetric(4).unwrap();
    for h in g.subgroup_classes(SUBGROUP_CLASS_BOUND).unwrap() {
        let m = permutation_lattice(&g, &h).unwrap();
        assert!(sweep(&g, &m, -1).unwrap().iter().all(|(_, t)| t.is_trivial()));
        assert!(is_coflasque(&g, &m).unwrap());
    }
}

/// From `0 -> Z -> Z[P] -> J_P -> 0` and the vanishing of Tate cohomology of
/// `Z[P]`: `Ĥ^{-1}(P, J_P) = Ĥ^0(P, Z) = Z/|P|`, `Ĥ^0(P, J_P) = Ĥ^1(P, Z) = 0` and
/// `Ĥ^1(P, J_P) = Ĥ^2(P, Z) = Hom(P, Q/Z)`.
#[test]
fn norm_one_lattice_of_klein_group() {
    let v4 = FiniteGroup::from_generators(
        4,
        vec![Permutation::parse_cycles(4, "(1 2)(3 4)").unwrap(), Permutation::parse_cycles(4, "(1 3)(2 4)").unwrap()],
        None,
    )
    .unwrap();
    let j = norm_one_lattice(&v4, &FiniteGroup::trivial(4).unwrap()).unwrap();
    assert_eq!(tate(-1, &v4, &j).unwrap().invariants, divisors(&[4]));
    assert!(tate(0, &v4, &j).unwrap().is_trivial());
    assert_eq!(tate(1, &v4, &j).unwrap().invariants, divisors(&[2, 2]));
    assert!(!is_flasque(&v4, &j).unwrap());
}
