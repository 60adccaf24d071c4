//! Smith normal form and column echelon reduction over a generic [`Scalar`].
//!
//! All routines return `None` when an `i64` intermediate overflows; callers then
//! rerun over `BigInt`.

use super::matrix::Dense;
use super::scalar::{ext_gcd, Scalar};

pub(crate) struct SmithParts<T> {
    pub u: Option<Dense<T>>,
    pub d: Dense<T>,
    pub v: Option<Dense<T>>,
    pub rank: usize,
}

/// Smallest nonzero |entry| in the trailing submatrix, ties broken by lowest
/// row-major index.
fn find_pivot<T: Scalar>(a: &Dense<T>, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows {
        for j in t..a.cols {
            let x = a.at(i, j);
            if x.is_nil() {
                continue;
            }
            match best {
                None => best = Some((i, j)),
                Some((bi, bj)) => {
                    if x.abs_cmp(a.at(bi, bj)) == std::cmp::Ordering::Less {
                        best = Some((i, j));
                    }
                }
            }
        }
    }
    best
}

/// `U A V = D` with `D` diagonal, `d_1 | d_2 | ...`, `d_i >= 0`.
pub(crate) fn smith<T: Scalar>(a: &Dense<T>, transforms: bool) -> Option<SmithParts<T>> {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = transforms.then(|| Dense::<T>::identity(m));
    let mut v = transforms.then(|| Dense::<T>::identity(n));
    let mut t = 0;
    while t < m.min(n) {
        let Some((pi, pj)) = find_pivot(&d, t) else { break };
        d.swap_rows(t, pi);
        if let Some(u) = u.as_mut() {
            u.swap_rows(t, pi);
        }
        d.swap_cols(t, pj);
        if let Some(v) = v.as_mut() {
            v.swap_cols(t, pj);
        }
        loop {
            let mut clean = true;
            let p = d.at(t, t).clone();
            for i in t + 1..m {
                if d.at(i, t).is_nil() {
                    continue;
                }
                let q = d.at(i, t).try_div_floor(&p)?.try_neg()?;
                d.add_row(i, t, &q)?;
                if let Some(u) = u.as_mut() {
                    u.add_row(i, t, &q)?;
                }
                if !d.at(i, t).is_nil() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if d.at(t, j).is_nil() {
                    continue;
                }
                let q = d.at(t, j).try_div_floor(&p)?.try_neg()?;
                d.add_col(j, t, &q)?;
                if let Some(v) = v.as_mut() {
                    v.add_col(j, t, &q)?;
                }
                if !d.at(t, j).is_nil() {
                    clean = false;
                }
            }
            if !clean {
                // Move the smallest nonzero remainder of row/column t into the pivot.
                let mut best = (t, t);
                for i in t + 1..m {
                    let x = d.at(i, t);
                    if !x.is_nil() && x.abs_cmp(d.at(best.0, best.1)).is_lt() {
                        best = (i, t);
                    }
                }
                for j in t + 1..n {
                    let x = d.at(t, j);
                    if !x.is_nil() && x.abs_cmp(d.at(best.0, best.1)).is_lt() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    d.swap_rows(t, best.0);
                    if let Some(u) = u.as_mut() {
                        u.swap_rows(t, best.0);
                    }
                } else if best.1 != t {
                    d.swap_cols(t, best.1);
                    if let Some(v) = v.as_mut() {
                        v.swap_cols(t, best.1);
                    }
                }
                continue;
            }
            // Divisibility: fold an offending row into row t and repeat.
            let mut offending = None;
            'scan: for i in t + 1..m {
                for j in t + 1..n {
                    if !p.try_divides(d.at(i, j))? {
                        offending = Some(i);
                        break 'scan;
                    }
                }
            }
            match offending {
                Some(i) => {
                    d.add_row(t, i, &T::unit())?;
                    if let Some(u) = u.as_mut() {
                        u.add_row(t, i, &T::unit())?;
                    }
                }
                None => break,
            }
        }
        if d.at(t, t).is_neg() {
            d.negate_row(t)?;
            if let Some(u) = u.as_mut() {
                u.negate_row(t)?;
            }
        }
        t += 1;
    }
    Some(SmithParts { u, d, v, rank: t })
}

/// Unimodular column reduction `A V = [H | 0]` where the first `rank` columns of
/// `H` are linearly independent. Returns `(A V, V, rank)`.
pub(crate) fn column_echelon<T: Scalar>(a: &Dense<T>, track: bool) -> Option<(Dense<T>, Option<Dense<T>>, usize)> {
    let mut h = a.clone();
    let mut v = track.then(|| Dense::<T>::identity(a.cols));
    let mut k = 0;
    for r in 0..h.rows {
        if k >= h.cols {
            break;
        }
        for c in k + 1..h.cols {
            let b = h.at(r, c).clone();
            if b.is_nil() {
                continue;
            }
            let a0 = h.at(r, k).clone();
            if a0.is_nil() {
                h.swap_cols(k, c);
                if let Some(v) = v.as_mut() {
                    v.swap_cols(k, c);
                }
                continue;
            }
            if a0.try_divides(&b)? {
                let q = b.try_div_floor(&a0)?.try_neg()?;
                h.add_col(c, k, &q)?;
                if let Some(v) = v.as_mut() {
                    v.add_col(c, k, &q)?;
                }
                continue;
            }
            let (g, x, y) = ext_gcd(&a0, &b)?;
            let (ag, bg) = (a0.try_div_floor(&g)?, b.try_div_floor(&g)?);
            // [col_k, col_c] <- [x col_k + y col_c, -bg col_k + ag col_c], det = 1.
            let nbg = bg.try_neg()?;
            h.combine_cols(k, c, &x, &y, &nbg, &ag)?;
            if let Some(v) = v.as_mut() {
                v.combine_cols(k, c, &x, &y, &nbg, &ag)?;
            }
        }
        if !h.at(r, k).is_nil() {
            k += 1;
        }
    }
    Some((h, v, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: &[&[i64]]) -> Dense<i64> {
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        Dense { rows: rows.len(), cols, data: rows.iter().flat_map(|r| r.iter().copied()).collect() }
    }

    #[test]
    fn smith_small() {
        let a = dense(&[&[2, 4], &[6, 8]]);
        let s = smith(&a, true).unwrap();
        assert_eq!((*s.d.at(0, 0), *s.d.at(1, 1)), (2, 4));
        let uav = s.u.unwrap().matmul(&a).unwrap().matmul(&s.v.unwrap()).unwrap();
        assert_eq!(uav, s.d);
    }

    #[test]
    fn echelon_kernel_columns() {
        let a = dense(&[&[1, 2, 3], &[2, 4, 6]]);
        let (h, v, rank) = column_echelon(&a, true).unwrap();
        assert_eq!(rank, 1);
        let v = v.unwrap();
        assert_eq!(a.matmul(&v).unwrap(), h);
        for j in rank..3 {
            assert_eq!(*h.at(0, j), 0);
            assert_eq!(*h.at(1, j), 0);
        }
    }
}
