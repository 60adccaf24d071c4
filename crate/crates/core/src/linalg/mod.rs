//! Exact integer linear algebra: Smith form, kernels, images, integral and
//! `p`-local solvability.

mod matrix;
mod scalar;
mod smith;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use matrix::IntMatrix;
pub(crate) use matrix::{Dense, JsonInt, JsonIntIn};
pub(crate) use scalar::Scalar;

use crate::error::{Error, Result};
use crate::group::is_prime;

/// Runs `f` over `i64` when every entry fits and no intermediate overflows,
/// otherwise over `BigInt`.
fn fast_or_big<R>(
    a: &IntMatrix,
    fast: impl FnOnce(&Dense<i64>) -> Option<R>,
    big: impl FnOnce(&Dense<BigInt>) -> Option<R>,
) -> R {
    if let Some(d) = a.to_dense_i64() {
        if let Some(r) = fast(&d) {
            return r;
        }
    }
    big(&a.to_dense_big()).expect("bigint arithmetic is total")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub rank: usize,
}

impl SmithForm {
    /// The nonzero diagonal entries `d_1 | d_2 | ... | d_rank`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d.get(i, i).clone()).collect()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    fast_or_big(
        a,
        |d| {
            let s = smith::smith(d, true)?;
            Some(SmithForm { u: s.u?.to_int(), d: s.d.to_int(), v: s.v?.to_int(), rank: s.rank })
        },
        |d| {
            let s = smith::smith(d, true)?;
            Some(SmithForm { u: s.u?.to_int(), d: s.d.to_int(), v: s.v?.to_int(), rank: s.rank })
        },
    )
}

/// Nonzero invariant factors only (no transforms).
pub fn invariant_factors(a: &IntMatrix) -> Vec<BigInt> {
    fn diag<T: Scalar>(d: &Dense<T>) -> Option<Vec<BigInt>> {
        let s = smith::smith(d, false)?;
        Some((0..s.rank).map(|i| s.d.at(i, i).to_bigint()).collect())
    }
    fast_or_big(a, diag, diag)
}

pub fn rank(a: &IntMatrix) -> usize {
    fn r<T: Scalar>(d: &Dense<T>) -> Option<usize> {
        Some(smith::column_echelon(d, false)?.2)
    }
    fast_or_big(a, r, r)
}

/// Finite abelian group `Z^free_rank ⊕ ⊕ Z/torsion_i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CokernelInvariants {
    #[serde(with = "bigint_list")]
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
}

impl CokernelInvariants {
    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }
}

pub(crate) mod bigint_list {
    use super::{JsonInt, JsonIntIn};
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(JsonInt).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<JsonIntIn>::deserialize(d)?.into_iter().map(JsonIntIn::into_bigint).collect()
    }
}

/// Cokernel of the column map `Z^cols -> Z^rows`.
pub fn cokernel_invariants(a: &IntMatrix) -> CokernelInvariants {
    let factors = invariant_factors(a);
    CokernelInvariants {
        free_rank: a.rows() - factors.len(),
        torsion: factors.into_iter().filter(|d| !d.is_one()).collect(),
    }
}

/// Columns form a Z-basis of `{x : A x = 0}`.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    fn k<T: Scalar>(d: &Dense<T>) -> Option<IntMatrix> {
        let (_, v, rank) = smith::column_echelon(d, true)?;
        let v = v?;
        let cols: Vec<usize> = (rank..d.cols).collect();
        Some(v.to_int().select_columns(&cols))
    }
    fast_or_big(a, k, k)
}

/// Columns form a Z-basis of the column span of `A`.
pub fn image_basis(a: &IntMatrix) -> IntMatrix {
    fn im<T: Scalar>(d: &Dense<T>) -> Option<IntMatrix> {
        let (h, _, rank) = smith::column_echelon(d, false)?;
        let cols: Vec<usize> = (0..rank).collect();
        Some(h.to_int().select_columns(&cols))
    }
    fast_or_big(a, im, im)
}

/// Saturation of the column span: `Q·span(A) ∩ Z^rows`, as a column basis.
pub fn saturation_basis(a: &IntMatrix) -> IntMatrix {
    // The kernel of the kernel of A^T.
    let left = kernel_basis(&a.transpose());
    kernel_basis(&left.transpose())
}

/// Left inverse `L` with `L K = I` for a full-column-rank `K` whose column span is
/// saturated (all invariant factors 1).
pub fn left_inverse(k: &IntMatrix) -> Result<IntMatrix> {
    let s = smith_normal_form(k);
    if s.rank != k.cols() || s.invariant_factors().iter().any(|d| !d.is_one()) {
        return Err(Error::Argument("matrix has no integral left inverse".into()));
    }
    // U K V = [I; 0]  =>  (V [I 0] U) K = I.
    let rows: Vec<usize> = (0..k.cols()).collect();
    s.v.mul(&s.u.select_rows(&rows))
}

pub fn is_unimodular(a: &IntMatrix) -> bool {
    a.rows() == a.cols() && {
        let f = invariant_factors(a);
        f.len() == a.rows() && f.iter().all(|d| d.is_one())
    }
}

/// Integral solution of `A x = b`, if one exists.
pub fn solve_integral(a: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if b.len() != a.rows() {
        return Err(Error::Shape(format!("right-hand side of length {} for {} rows", b.len(), a.rows())));
    }
    let s = smith_normal_form(a);
    let ub = s.u.mul_vec(b)?;
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, c) in ub.iter().enumerate() {
        if i < s.rank {
            let d = s.d.get(i, i);
            if !(c % d).is_zero() {
                return Ok(None);
            }
            y[i] = c / d;
        } else if !c.is_zero() {
            return Ok(None);
        }
    }
    Ok(Some(s.v.mul_vec(&y)?))
}

/// Whether `A x = b` has a solution over the localization `Z_(p)`.
///
/// Over the local PID `Z_(p)` the system is solvable iff `A` and `[A | b]` have
/// the same rank and the same `p`-parts of their invariant factors.
pub fn solvable_at_p(a: &IntMatrix, b: &[BigInt], p: u64) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::Argument(format!("{p} is not prime")));
    }
    if b.len() != a.rows() {
        return Err(Error::Shape(format!("right-hand side of length {} for {} rows", b.len(), a.rows())));
    }
    let fa = invariant_factors(a);
    let fab = invariant_factors(&a.hstack(&IntMatrix::column_vector(b))?);
    if fa.len() != fab.len() {
        return Ok(false);
    }
    let p = BigInt::from(p);
    Ok(fa.iter().zip(&fab).all(|(x, y)| p_valuation(x, &p) == p_valuation(y, &p)))
}

pub(crate) fn p_valuation(x: &BigInt, p: &BigInt) -> u32 {
    let mut x = x.abs();
    let mut v = 0;
    while !x.is_zero() && x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn smith_examples() {
        let s = smith_normal_form(&IntMatrix::identity(3));
        assert_eq!(s.d, IntMatrix::identity(3));
        let a = IntMatrix::from_rows(&[[2, 4], [6, 8]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.invariant_factors(), big(&[2, 4]));
        assert_eq!(s.u.mul(&a).unwrap().mul(&s.v).unwrap(), s.d);
        let z = IntMatrix::zeros(2, 3);
        let s = smith_normal_form(&z);
        assert!(s.d.is_zero());
        assert_eq!(s.rank, 0);
    }

    #[test]
    fn cokernel_examples() {
        let c = cokernel_invariants(&IntMatrix::from_rows(&[[2]]));
        assert_eq!((c.torsion, c.free_rank), (big(&[2]), 0));
        let c = cokernel_invariants(&IntMatrix::from_rows(&[[1, 0], [0, 6], [0, 0]]));
        assert_eq!((c.torsion, c.free_rank), (big(&[6]), 1));
        let c = cokernel_invariants(&IntMatrix::zeros(2, 0));
        assert_eq!((c.torsion.len(), c.free_rank), (0, 2));
    }

    #[test]
    fn local_solvability_examples() {
        let a = IntMatrix::from_rows(&[[3]]);
        assert!(solvable_at_p(&a, &big(&[1]), 2).unwrap());
        let a = IntMatrix::from_rows(&[[2]]);
        assert!(!solvable_at_p(&a, &big(&[1]), 2).unwrap());
        let a = IntMatrix::from_rows(&[[2, 0], [0, 3]]);
        assert!(solvable_at_p(&a, &big(&[1, 1]), 5).unwrap());
        assert!(!solvable_at_p(&a, &big(&[1, 1]), 3).unwrap());
        assert!(solvable_at_p(&a, &big(&[1, 1]), 4).is_err());
        // Inconsistent over Q.
        let a = IntMatrix::from_rows(&[[1], [1]]);
        assert!(!solvable_at_p(&a, &big(&[1, 2]), 7).unwrap());
    }

    #[test]
    fn kernel_image_and_inverse() {
        let a = IntMatrix::from_rows(&[[1, 1, 1, 1]]);
        let k = kernel_basis(&a);
        assert_eq!(k.shape(), (4, 3));
        assert!(a.mul(&k).unwrap().is_zero());
        let l = left_inverse(&k).unwrap();
        assert!(l.mul(&k).unwrap().is_identity());
        let im = image_basis(&IntMatrix::from_rows(&[[2, 4], [0, 0]]));
        assert_eq!(im.shape(), (2, 1));
        assert_eq!(im.get(0, 0).abs(), BigInt::from(2));
        assert!(left_inverse(&IntMatrix::from_rows(&[[2], [0]])).is_err());
        let sat = saturation_basis(&IntMatrix::from_rows(&[[2], [4]]));
        assert_eq!(invariant_factors(&sat), big(&[1]));
    }

    #[test]
    fn integral_solve() {
        let a = IntMatrix::from_rows(&[[2, 0], [0, 3]]);
        assert_eq!(solve_integral(&a, &big(&[4, 9])).unwrap(), Some(big(&[2, 3])));
        assert_eq!(solve_integral(&a, &big(&[1, 0])).unwrap(), None);
    }

    #[test]
    fn invariant_list_serialization() {
        let c = CokernelInvariants { torsion: big(&[2, 6]), free_rank: 1 };
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"torsion":[2,6],"free_rank":1}"#);
        let back: CokernelInvariants = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
