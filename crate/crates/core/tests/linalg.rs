use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use normtori::linalg::{
    cokernel_invariants, invariant_factors, is_unimodular, kernel_basis, left_inverse, rank, smith_normal_form,
    solvable_at_p,
};
use normtori::IntMatrix;

/// Textbook Smith form: move the smallest nonzero entry of the remaining block to
/// the pivot, clear its row and column by division with remainder, repeat until
/// the pivot divides everything left. The pivot strictly shrinks on every retry.
fn naive_invariants(rows: usize, cols: usize, mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let mut out = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            let pivot = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| !a[i][j].is_zero())
                .min_by_key(|&(i, j)| a[i][j].abs());
            let Some((pi, pj)) = pivot else { return out };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..rows {
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..cols {
                    let v = &a[i][j] - &q * &a[t][j];
                    a[i][j] = v;
                }
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..cols {
                let q = a[t][j].div_floor(&a[t][t]);
                for i in t..rows {
                    let v = &a[i][j] - &q * &a[i][t];
                    a[i][j] = v;
                }
                clean &= a[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&a[i][j] % &a[t][t]).is_zero()));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        let v = &a[t][j] + &a[i][j];
                        a[t][j] = v;
                    }
                }
                None => break,
            }
        }
        out.push(a[t][t].abs());
    }
    out
}

fn to_matrix(rows: usize, cols: usize, data: &[i64]) -> IntMatrix {
    IntMatrix::from_vec(rows, cols, data.iter().map(|&x| BigInt::from(x)).collect()).unwrap()
}

fn matrix_strategy() -> impl Strategy<Value = (usize, usize, Vec<i64>)> {
    (1usize..=8, 1usize..=8).prop_flat_map(|(r, c)| (Just(r), Just(c), prop::collection::vec(-50i64..=50, r * c)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn smith_reconstructs((r, c, data) in matrix_strategy()) {
        let a = to_matrix(r, c, &data);
        let s = smith_normal_form(&a);
        prop_assert_eq!(s.u.mul(&a).unwrap().mul(&s.v).unwrap(), s.d.clone());
        prop_assert!(is_unimodular(&s.u) && is_unimodular(&s.v));
        let f = s.invariant_factors();
        for w in f.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
        prop_assert!(f.iter().all(|x| x.is_positive()));
    }

    #[test]
    fn smith_matches_naive((r, c, data) in matrix_strategy()) {
        let a = to_matrix(r, c, &data);
        let rows: Vec<Vec<BigInt>> = data.chunks(c).map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect();
        prop_assert_eq!(invariant_factors(&a), naive_invariants(r, c, rows));
    }

    #[test]
    fn kernel_is_saturated((r, c, data) in matrix_strategy()) {
        let a = to_matrix(r, c, &data);
        let k = kernel_basis(&a);
        prop_assert_eq!(k.cols() + rank(&a), c);
        prop_assert!(a.mul(&k).unwrap().is_zero());
        if k.cols() > 0 {
            // a left inverse exists exactly for saturated bases
            prop_assert!(left_inverse(&k).is_ok());
        }
    }
}

#[test]
fn cokernel_of_diagonal() {
    let a = IntMatrix::from_rows(&[[2, 0, 0], [0, 6, 0]]);
    let c = cokernel_invariants(&a);
    assert_eq!(c.free_rank, 0);
    assert_eq!(c.torsion, vec![BigInt::from(2), BigInt::from(6)]);
}

#[test]
fn local_solvability() {
    let a = IntMatrix::from_rows(&[[5]]);
    let one = [BigInt::from(1)];
    assert!(solvable_at_p(&a, &one, 2).unwrap());
    assert!(!solvable_at_p(&a, &one, 5).unwrap());
}

#[test]
fn bigint_fallback() {
    let big = i64::MAX / 3;
    let a = IntMatrix::from_rows(&[[big, big - 1], [big - 2, big]]);
    let s = smith_normal_form(&a);
    assert_eq!(s.u.mul(&a).unwrap().mul(&s.v).unwrap(), s.d);
}
