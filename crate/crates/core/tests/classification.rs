use normtori::classify::{classify_norm_one_family, classify_norm_one_family_all, closed_form, Rationality};
use normtori::Family;

const PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

fn grid() -> Vec<(Family, usize)> {
    let s = (2..=12).map(|n| (Family::Symmetric, n));
    let a = (4..=12).map(|n| (Family::Alternating, n));
    s.chain(a).collect()
}

#[test]
fn family_grid_matches_closed_form() {
    for (family, n) in grid() {
        for p in PRIMES {
            let v = classify_norm_one_family(family, n, p).unwrap();
            assert!(v.engine_decided(), "{family}_{n} p={p} undecided");
            assert_eq!(v.verdict.as_bool(), Some(closed_form(n, p)), "{family}_{n} p={p}");
            if v.verdict == Rationality::NotPRetractRational {
                let cites = v.trace[0].cites.clone().unwrap();
                let ok = ["Prop oddprimeS", "Prop oddprimeA", "Prop evenS", "Prop evenA1", "Prop evenA2", "Theorem mainS (n = 4"]
                    .iter()
                    .any(|c| cites.starts_with(c));
                assert!(ok, "{family}_{n} p={p} cites {cites}");
            }
        }
    }
}

#[test]
fn retract_rational_iff_prime() {
    for (family, n) in grid() {
        let v = classify_norm_one_family_all(family, n).unwrap();
        let expected = if normtori::group::is_prime(n as u64) { Rationality::RetractRational } else { Rationality::NotRetractRational };
        assert_eq!(v.verdict, expected, "{family}_{n}");
    }
}
