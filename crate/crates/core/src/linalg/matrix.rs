use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Dense row-major matrix over a generic scalar, used inside the kernels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Dense<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Dense<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Dense { rows, cols, data: vec![T::nil(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::unit();
        }
        m
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += c * row[src]
    pub fn add_row(&mut self, dst: usize, src: usize, c: &T) -> Option<()> {
        if c.is_nil() {
            return Some(());
        }
        for j in 0..self.cols {
            let s = self.at(src, j).clone();
            if !s.is_nil() {
                let v = self.at(dst, j).try_add_mul(c, &s)?;
                self.set(dst, j, v);
            }
        }
        Some(())
    }

    /// col[dst] += c * col[src]
    pub fn add_col(&mut self, dst: usize, src: usize, c: &T) -> Option<()> {
        if c.is_nil() {
            return Some(());
        }
        for i in 0..self.rows {
            let s = self.at(i, src).clone();
            if !s.is_nil() {
                let v = self.at(i, dst).try_add_mul(c, &s)?;
                self.set(i, dst, v);
            }
        }
        Some(())
    }

    pub fn negate_row(&mut self, r: usize) -> Option<()> {
        for j in 0..self.cols {
            let v = self.at(r, j).try_neg()?;
            self.set(r, j, v);
        }
        Some(())
    }

    /// Replaces columns (a, b) by (x a + y b, z a + w b).
    pub fn combine_cols(&mut self, a: usize, b: usize, x: &T, y: &T, z: &T, w: &T) -> Option<()> {
        for i in 0..self.rows {
            let (va, vb) = (self.at(i, a).clone(), self.at(i, b).clone());
            if va.is_nil() && vb.is_nil() {
                continue;
            }
            let na = x.try_mul(&va)?.try_add(&y.try_mul(&vb)?)?;
            let nb = z.try_mul(&va)?.try_add(&w.try_mul(&vb)?)?;
            self.set(i, a, na);
            self.set(i, b, nb);
        }
        Some(())
    }

    pub fn matmul(&self, o: &Dense<T>) -> Option<Dense<T>> {
        debug_assert_eq!(self.cols, o.rows);
        let mut out = Dense::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_nil() {
                    continue;
                }
                let row = &o.data[k * o.cols..(k + 1) * o.cols];
                let dst: &mut [T] = &mut out.data[i * o.cols..(i + 1) * o.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    if !b.is_nil() {
                        *d = d.try_add_mul(a, b)?;
                    }
                }
            }
        }
        Some(out)
    }

    pub fn transpose(&self) -> Dense<T> {
        let mut out = Dense::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.at(i, j).clone());
            }
        }
        out
    }

    pub fn to_int(&self) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.to_bigint()).collect() }
    }
}

/// Dense integer matrix with arbitrary-precision entries.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    /// From rows of `i64`. All rows must have the same length; `cols` is taken from
    /// the first row (zero when there are no rows).
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            data.extend(r.as_ref().iter().map(|&x| BigInt::from(x)));
        }
        IntMatrix { rows: rows.len(), cols, data }
    }

    pub fn column_vector(v: &[BigInt]) -> Self {
        IntMatrix { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in entries.iter().enumerate() {
            m.data[i * n + i] = d.clone();
        }
        m
    }

    /// Permutation matrix sending basis vector `j` to basis vector `images[j]`.
    pub fn permutation(images: &[usize]) -> Self {
        let n = images.len();
        let mut m = Self::zeros(n, n);
        for (j, &i) in images.iter().enumerate() {
            m.data[i * n + j] = BigInt::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| *self.get(i, j) == BigInt::from((i == j) as i64)))
    }

    /// Entries as `i64` rows when they all fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|x| x.to_i64()).collect()).collect()
    }

    pub(crate) fn to_dense_i64(&self) -> Option<Dense<i64>> {
        // Entries are bounded well below i64::MAX so that a first product cannot overflow
        // silently; checked arithmetic guards the rest.
        let data = self.data.iter().map(|x| x.to_i64()).collect::<Option<Vec<_>>>()?;
        Some(Dense { rows: self.rows, cols: self.cols, data })
    }

    pub(crate) fn to_dense_big(&self) -> Dense<BigInt> {
        Dense { rows: self.rows, cols: self.cols, data: self.data.clone() }
    }

    pub fn transpose(&self) -> IntMatrix {
        self.to_dense_big().transpose().to_int()
    }

    pub fn mul(&self, o: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != o.rows {
            return Err(Error::Shape(format!("{}x{} times {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        if let (Some(a), Some(b)) = (self.to_dense_i64(), o.to_dense_i64()) {
            if let Some(c) = a.matmul(&b) {
                return Ok(c.to_int());
            }
        }
        Ok(self.to_dense_big().matmul(&o.to_dense_big()).expect("bigint arithmetic is total").to_int())
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if self.cols != v.len() {
            return Err(Error::Shape(format!("{}x{} times vector of length {}", self.rows, self.cols, v.len())));
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    pub fn add(&self, o: &IntMatrix) -> Result<IntMatrix> {
        self.zip_with(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &IntMatrix) -> Result<IntMatrix> {
        self.zip_with(o, |a, b| a - b)
    }

    fn zip_with(&self, o: &IntMatrix, f: impl Fn(&BigInt, &BigInt) -> BigInt) -> Result<IntMatrix> {
        if self.shape() != o.shape() {
            return Err(Error::Shape(format!("{:?} vs {:?}", self.shape(), o.shape())));
        }
        Ok(IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| f(a, b)).collect() })
    }

    pub fn scale(&self, c: &BigInt) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    /// `[self | o]`
    pub fn hstack(&self, o: &IntMatrix) -> Result<IntMatrix> {
        if self.rows != o.rows {
            return Err(Error::Shape(format!("hstack of {} and {} rows", self.rows, o.rows)));
        }
        let cols = self.cols + o.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(o.row(i));
        }
        Ok(IntMatrix { rows: self.rows, cols, data })
    }

    /// `[self; o]`
    pub fn vstack(&self, o: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != o.cols {
            return Err(Error::Shape(format!("vstack of {} and {} columns", self.cols, o.cols)));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&o.data);
        Ok(IntMatrix { rows: self.rows + o.rows, cols: self.cols, data })
    }

    pub fn block_diag(&self, o: &IntMatrix) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows + o.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..o.rows {
            for j in 0..o.cols {
                m.set(self.rows + i, self.cols + j, o.get(i, j).clone());
            }
        }
        m
    }

    pub fn select_columns(&self, cols: &[usize]) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &j) in cols.iter().enumerate() {
                m.set(i, k, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> IntMatrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &i in rows {
            data.extend_from_slice(self.row(i));
        }
        IntMatrix { rows: rows.len(), cols: self.cols, data }
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_default()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            let r: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", r.join(", "))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// JSON integer: a number when it fits in `i64`, otherwise a decimal string.
pub(crate) struct JsonInt<'a>(pub &'a BigInt);

impl Serialize for JsonInt<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
pub(crate) enum JsonIntIn {
    Int(i64),
    Str(String),
}

impl JsonIntIn {
    pub(crate) fn into_bigint<E: de::Error>(self) -> std::result::Result<BigInt, E> {
        match self {
            JsonIntIn::Int(v) => Ok(BigInt::from(v)),
            JsonIntIn::Str(s) => s.trim().parse::<BigInt>().map_err(|e| E::custom(format!("integer {s:?}: {e}"))),
        }
    }
}

/// Serialized as a JSON array of integer rows (row-major).
impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            let row: Vec<JsonInt<'_>> = self.row(i).iter().map(JsonInt).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<JsonIntIn>>::deserialize(d)?;
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for r in rows {
            if r.len() != cols {
                return Err(de::Error::custom("ragged matrix rows"));
            }
            for x in r {
                data.push(x.into_bigint()?);
            }
        }
        Ok(IntMatrix { rows: nrows, cols, data })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_shapes() {
        let a = IntMatrix::from_rows(&[[1, 2], [3, 4]]);
        let b = IntMatrix::from_rows(&[[0, 1], [1, 0]]);
        assert_eq!(a.mul(&b).unwrap(), IntMatrix::from_rows(&[[2, 1], [4, 3]]));
        assert!(a.mul(&IntMatrix::zeros(3, 1)).is_err());
        assert_eq!(a.hstack(&b).unwrap().shape(), (2, 4));
        assert_eq!(a.block_diag(&b).shape(), (4, 4));
        assert_eq!(a.transpose(), IntMatrix::from_rows(&[[1, 3], [2, 4]]));
    }

    #[test]
    fn product_falls_back_to_bigint() {
        let big = IntMatrix::from_rows(&[[i64::MAX / 2]]);
        let sq = big.mul(&big).unwrap();
        let expected = BigInt::from(i64::MAX / 2) * BigInt::from(i64::MAX / 2);
        assert_eq!(sq.get(0, 0), &expected);
    }

    #[test]
    fn json_round_trip_with_huge_entries() {
        let mut m = IntMatrix::from_rows(&[[1, -2, 3], [4, 5, 6]]);
        m.set(1, 1, "123456789012345678901234567890".parse().unwrap());
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"[[1,-2,3],[4,"123456789012345678901234567890",6]]"#);
        let back: IntMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<IntMatrix>("[[1,2],[3]]").is_err());
    }
}
