//! Permutations of `{1, ..., n}` stored as one-line image arrays.
//!
//! Letters are 1-based at every public boundary; internally the image of
//! letter `i + 1` is stored at index `i` as a 0-based value.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest degree accepted anywhere in the crate.
pub const MAX_DEGREE: usize = 16;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation { images: (0..degree as u8).collect() }
    }

    /// Builds a permutation from 1-based images: `images[i - 1]` is the image of `i`.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        if n > MAX_DEGREE {
            return Err(Error::Size(format!("degree {n} exceeds {MAX_DEGREE}")));
        }
        let mut seen = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for &img in images {
            if img == 0 || img > n || seen[img - 1] {
                return Err(Error::Argument(format!("{images:?} is not a bijection of 1..={n}")));
            }
            seen[img - 1] = true;
            out.push((img - 1) as u8);
        }
        Ok(Permutation { images: out })
    }

    /// Builds a permutation of the given degree from disjoint or overlapping cycles
    /// (1-based letters). Cycles are composed right to left.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::Size(format!("degree {degree} exceeds {MAX_DEGREE}")));
        }
        let mut acc = Permutation::identity(degree);
        for cycle in cycles.iter().rev() {
            let mut c = Permutation::identity(degree);
            let mut seen = std::collections::HashSet::new();
            for &x in cycle {
                if x == 0 || x > degree {
                    return Err(Error::Argument(format!("letter {x} outside 1..={degree}")));
                }
                if !seen.insert(x) {
                    return Err(Error::Argument(format!("letter {x} repeated in cycle")));
                }
            }
            for (k, &x) in cycle.iter().enumerate() {
                let y = cycle[(k + 1) % cycle.len()];
                c.images[x - 1] = (y - 1) as u8;
            }
            acc = c.compose(&acc);
        }
        Ok(acc)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of a 1-based letter.
    pub fn apply(&self, letter: usize) -> usize {
        self.images[letter - 1] as usize + 1
    }

    /// 0-based image, for internal index arithmetic.
    #[inline]
    pub(crate) fn apply0(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    /// 1-based one-line notation.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x as usize + 1).collect()
    }

    /// `(self * other)(x) = self(other(x))`: `other` is applied first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation { images: other.images.iter().map(|&x| self.images[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u8;
        }
        Permutation { images: inv }
    }

    pub fn pow(&self, mut e: u64) -> Permutation {
        let mut base = self.clone();
        let mut acc = Permutation::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// Disjoint cycles of length at least two, each starting at its smallest letter.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start + 1];
            seen[start] = true;
            let mut x = self.apply0(start);
            while x != start {
                seen[x] = true;
                cycle.push(x + 1);
                x = self.apply0(x);
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    pub fn order(&self) -> u64 {
        self.cycles().iter().fold(1u64, |acc, c| num_integer::lcm(acc, c.len() as u64))
    }

    pub fn is_even(&self) -> bool {
        self.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 0
    }

    pub fn fixes(&self, letter: usize) -> bool {
        self.apply(letter) == letter
    }

    /// Letters moved by the permutation.
    pub fn support(&self) -> Vec<usize> {
        (1..=self.degree()).filter(|&x| !self.fixes(x)).collect()
    }

    /// Cycle notation, `"()"` for the identity.
    pub fn to_cycle_string(&self) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "()".to_string();
        }
        cycles
            .iter()
            .map(|c| format!("({})", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")))
            .collect()
    }

    /// Parses cycle notation such as `"(1 2 3)(4 5)"` for a given degree.
    pub fn parse_cycles(degree: usize, s: &str) -> Result<Self> {
        let s = s.trim();
        let mut cycles = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let open = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("expected '(' in cycle string {s:?}")))?;
            let close = open
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced parenthesis in {s:?}")))?;
            let body = &open[..close];
            let letters = body
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            if !letters.is_empty() {
                cycles.push(letters);
            }
            rest = open[close + 1..].trim_start();
        }
        Permutation::from_cycles(degree, &cycles)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cycle_string())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_cycle_string())
    }
}

/// Lexicographic order on the one-line notation.
impl Ord for Permutation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.images.cmp(&other.images)
    }
}

impl PartialOrd for Permutation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Parses either cycle notation `"(1 2)(3 4)"` with the degree inferred from the
/// largest letter, or a JSON image array `"[2, 1, 4, 3]"`.
impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.starts_with('[') {
            let images: Vec<usize> =
                serde_json::from_str(t).map_err(|e| Error::Parse(e.to_string()))?;
            return Permutation::from_images(&images);
        }
        let degree = t
            .split(|c: char| !c.is_ascii_digit())
            .filter_map(|x| x.parse::<usize>().ok())
            .max()
            .unwrap_or(1);
        Permutation::parse_cycles(degree, t)
    }
}

/// Serialized as the JSON array of 1-based images.
impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.images().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let images = Vec::<usize>::deserialize(deserializer)?;
        Permutation::from_images(&images).map_err(serde::de::Error::custom)
    }
}
