//! Finite permutation groups inside `S_n`.
//!
//! Groups of order at most [`ENUMERATION_BOUND`] carry their full element list.
//! The symmetric and alternating groups on a set of letters are recognized as
//! families: membership and words in the generators are computed directly, so
//! they stay usable beyond the enumeration bound.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::perm::{Permutation, MAX_DEGREE};

pub const ENUMERATION_BOUND: u128 = 50_000;

/// Default bound for subgroup-up-to-conjugacy enumeration.
pub const SUBGROUP_CLASS_BOUND: u128 = 1_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Family {
    #[serde(rename = "S")]
    Symmetric,
    #[serde(rename = "A")]
    Alternating,
}

impl Family {
    pub fn letter(self) -> &'static str {
        match self {
            Family::Symmetric => "S",
            Family::Alternating => "A",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.letter())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "S" | "s" | "Sym" | "symmetric" => Ok(Family::Symmetric),
            "A" | "a" | "Alt" | "alternating" => Ok(Family::Alternating),
            other => Err(Error::Parse(format!("unknown family {other:?}, expected S or A"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Kind {
    /// Full symmetric or alternating group on `support` (sorted, 1-based).
    Family { family: Family, support: Vec<usize> },
    Generic,
}

/// Element list plus a breadth-first spanning tree over the generators.
#[derive(Debug)]
struct Enumeration {
    /// Elements in breadth-first order; index 0 is the identity.
    elements: Vec<Permutation>,
    index: HashMap<Permutation, u32>,
    /// `elements[i] = generators[parent[i].1] * elements[parent[i].0]`.
    parent: Vec<(u32, u16)>,
}

#[derive(Clone)]
pub struct FiniteGroup {
    degree: usize,
    generators: Vec<Permutation>,
    label: Option<String>,
    order: u128,
    kind: Kind,
    enumeration: Option<Arc<Enumeration>>,
}

/// A subgroup is represented by its own group value; containment in a parent is
/// checked where an operation needs it.
pub type Subgroup = FiniteGroup;

/// One step of a word in the generators: `(generator index, inverted)`.
pub type Letter = (usize, bool);

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn check_degree(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DEGREE {
        return Err(Error::Size(format!("degree {n} outside 1..={MAX_DEGREE}")));
    }
    Ok(())
}

impl FiniteGroup {
    /// `S_n` generated by the adjacent transpositions `(i i+1)`.
    pub fn symmetric(n: usize) -> Result<Self> {
        check_degree(n)?;
        Ok(Self::family_group(n, Family::Symmetric, (1..=n).collect(), Some(format!("S_{n}"))))
    }

    /// `A_n` generated by `(1 2)(i i+1)` for `2 <= i < n`.
    pub fn alternating(n: usize) -> Result<Self> {
        check_degree(n)?;
        Ok(Self::family_group(n, Family::Alternating, (1..=n).collect(), Some(format!("A_{n}"))))
    }

    fn family_group(degree: usize, family: Family, support: Vec<usize>, label: Option<String>) -> Self {
        let m = support.len();
        let adjacent = |k: usize| {
            Permutation::from_cycles(degree, &[vec![support[k], support[k + 1]]]).expect("valid letters")
        };
        let (generators, order) = match family {
            Family::Symmetric => ((0..m.saturating_sub(1)).map(adjacent).collect(), factorial(m)),
            Family::Alternating => {
                let gens = (1..m.saturating_sub(1)).map(|k| adjacent(0).compose(&adjacent(k))).collect();
                (gens, if m >= 2 { factorial(m) / 2 } else { 1 })
            }
        };
        let mut g = FiniteGroup {
            degree,
            generators,
            label,
            order,
            kind: Kind::Family { family, support },
            enumeration: None,
        };
        if order <= ENUMERATION_BOUND {
            g.enumeration = Some(Arc::new(enumerate(degree, &g.generators, None).expect("bounded by order")));
        }
        g
    }

    /// Closure of explicit generators. Fails if the group exceeds the enumeration bound.
    pub fn from_generators(degree: usize, generators: Vec<Permutation>, label: Option<String>) -> Result<Self> {
        check_degree(degree)?;
        if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
            return Err(Error::Argument(format!("generator {g} has degree {}, expected {degree}", g.degree())));
        }
        let generators: Vec<_> = generators.into_iter().filter(|g| !g.is_identity()).collect();
        let e = enumerate(degree, &generators, Some(ENUMERATION_BOUND as usize))?;
        Ok(FiniteGroup {
            degree,
            order: e.elements.len() as u128,
            generators,
            label,
            kind: Kind::Generic,
            enumeration: Some(Arc::new(e)),
        })
    }

    pub fn trivial(degree: usize) -> Result<Self> {
        Self::from_generators(degree, vec![], Some("1".into()))
    }

    /// Subgroup of `self` generated by `generators`; every generator must lie in `self`.
    pub fn subgroup(&self, generators: Vec<Permutation>, label: Option<String>) -> Result<Subgroup> {
        for g in &generators {
            if !self.contains(g) {
                return Err(Error::NotSubgroup(format!("{g} is not an element of {self}")));
            }
        }
        Self::from_generators(self.degree, generators, label)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> u128 {
        self.order
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// `Some((family, support))` when this is the full symmetric or alternating group
    /// on a set of letters.
    pub fn family(&self) -> Option<(Family, &[usize])> {
        match &self.kind {
            Kind::Family { family, support } => Some((*family, support)),
            Kind::Generic => None,
        }
    }

    /// `Some((family, n))` when this is `S_n` or `A_n` on all `n` letters.
    pub fn full_family(&self) -> Option<(Family, usize)> {
        match self.family() {
            Some((f, support)) if support.len() == self.degree => Some((f, self.degree)),
            _ => None,
        }
    }

    pub fn identity(&self) -> Permutation {
        Permutation::identity(self.degree)
    }

    pub fn is_enumerated(&self) -> bool {
        self.enumeration.is_some()
    }

    /// All elements in breadth-first order from the identity.
    pub fn elements(&self) -> Result<&[Permutation]> {
        self.enumeration
            .as_ref()
            .map(|e| e.elements.as_slice())
            .ok_or(Error::TooLarge { order: self.order, bound: ENUMERATION_BOUND })
    }

    /// All elements in lexicographic order of their one-line notation.
    pub fn sorted_elements(&self) -> Result<Vec<Permutation>> {
        let mut v = self.elements()?.to_vec();
        v.sort();
        Ok(v)
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        match &self.kind {
            Kind::Family { family, support } => {
                let inside = (1..=self.degree).all(|x| g.fixes(x) || support.binary_search(&x).is_ok());
                inside && (*family == Family::Symmetric || g.is_even())
            }
            Kind::Generic => self.enumeration.as_ref().expect("generic groups are enumerated").index.contains_key(g),
        }
    }

    pub fn is_subgroup_of(&self, parent: &FiniteGroup) -> bool {
        self.degree == parent.degree && self.generators.iter().all(|g| parent.contains(g))
    }

    /// Element-set equality.
    pub fn same_elements(&self, other: &FiniteGroup) -> bool {
        self.order == other.order && self.is_subgroup_of(other)
    }

    pub fn index_in(&self, parent: &FiniteGroup) -> Result<u128> {
        if !self.is_subgroup_of(parent) {
            return Err(Error::NotSubgroup(format!("{self} is not contained in {parent}")));
        }
        Ok(parent.order / self.order)
    }

    /// A word `w` with `g = w[0] * w[1] * ... * w[k-1]` (rightmost applied first).
    pub fn word(&self, g: &Permutation) -> Result<Vec<Letter>> {
        if !self.contains(g) {
            return Err(Error::NotSubgroup(format!("{g} is not an element of {self}")));
        }
        match &self.kind {
            Kind::Family { family, support } => Ok(family_word(*family, support, g)),
            Kind::Generic => {
                let e = self.enumeration.as_ref().expect("generic groups are enumerated");
                let mut i = e.index[g] as usize;
                let mut w = Vec::new();
                while i != 0 {
                    let (parent, gen) = e.parent[i];
                    w.push((gen as usize, false));
                    i = parent as usize;
                }
                Ok(w)
            }
        }
    }

    /// Breadth-first spanning tree: for each element index `i > 0`, `(parent, generator)`
    /// with `elements[i] = generators[generator] * elements[parent]`.
    pub fn spanning_tree(&self) -> Result<Vec<(usize, usize)>> {
        let e = self
            .enumeration
            .as_ref()
            .ok_or(Error::TooLarge { order: self.order, bound: ENUMERATION_BOUND })?;
        Ok(e.parent.iter().map(|&(p, g)| (p as usize, g as usize)).collect())
    }

    pub fn element_index(&self, g: &Permutation) -> Option<usize> {
        self.enumeration.as_ref()?.index.get(g).map(|&i| i as usize)
    }

    pub fn is_abelian(&self) -> bool {
        let gens = &self.generators;
        gens.iter().all(|a| gens.iter().all(|b| a.compose(b) == b.compose(a)))
    }

    pub fn is_cyclic(&self) -> bool {
        if self.order <= 1 {
            return true;
        }
        match &self.kind {
            Kind::Family { family: Family::Symmetric, support } => support.len() <= 2,
            Kind::Family { family: Family::Alternating, support } => support.len() <= 3,
            Kind::Generic => self
                .elements()
                .map(|els| els.iter().any(|g| g.order() as u128 == self.order))
                .unwrap_or(false),
        }
    }

    /// Order is a power of `p` (the trivial group included).
    pub fn is_p_group(&self, p: u64) -> bool {
        is_power_of(self.order, p)
    }

    /// Abelian and every non-identity element has order `p`.
    pub fn is_elementary_abelian(&self, p: u64) -> bool {
        self.is_abelian() && self.generators.iter().all(|g| g.order() == p)
    }

    /// `p`-rank of an elementary abelian `p`-group (its order is `p^rank`).
    pub fn p_rank(&self, p: u64) -> Option<u32> {
        let mut o = self.order;
        let mut r = 0;
        while o > 1 {
            if o % p as u128 != 0 {
                return None;
            }
            o /= p as u128;
            r += 1;
        }
        Some(r)
    }

    pub fn is_normal_in(&self, parent: &FiniteGroup) -> bool {
        self.is_subgroup_of(parent)
            && parent.generators.iter().all(|g| {
                let gi = g.inverse();
                self.generators.iter().all(|h| self.contains(&g.compose(h).compose(&gi)))
            })
    }

    /// Orbit of a 1-based letter under the group, sorted.
    pub fn orbit(&self, letter: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree + 1];
        seen[letter] = true;
        let mut queue = vec![letter];
        let mut out = vec![letter];
        while let Some(x) = queue.pop() {
            for g in &self.generators {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    queue.push(y);
                    out.push(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// All elements fixing `letter`.
    pub fn point_stabilizer(&self, letter: usize) -> Result<Subgroup> {
        if letter == 0 || letter > self.degree {
            return Err(Error::Argument(format!("letter {letter} outside 1..={}", self.degree)));
        }
        let label = self.label.as_ref().map(|l| format!("Stab_{l}({letter})"));
        if let Kind::Family { family, support } = &self.kind {
            let rest: Vec<usize> = support.iter().copied().filter(|&x| x != letter).collect();
            let label = match (self.full_family(), letter == self.degree) {
                (Some((f, n)), true) => Some(format!("{}_{}", f.letter(), n - 1)),
                _ => label,
            };
            return Ok(Self::family_group(self.degree, *family, rest, label));
        }
        let elements: Vec<Permutation> =
            self.sorted_elements()?.into_iter().filter(|g| g.fixes(letter)).collect();
        self.subgroup_from_elements(&elements, label)
    }

    /// Subgroup whose element set is `elements` (assumed closed), with a greedy
    /// generating set chosen in the given order.
    pub(crate) fn subgroup_from_elements(&self, elements: &[Permutation], label: Option<String>) -> Result<Subgroup> {
        let mut gens: Vec<Permutation> = Vec::new();
        let mut span: HashSet<Permutation> = HashSet::from([self.identity()]);
        for g in elements {
            if !span.contains(g) {
                gens.push(g.clone());
                span = enumerate(self.degree, &gens, None)?.elements.into_iter().collect();
            }
            if span.len() == elements.len() {
                break;
            }
        }
        let h = Self::from_generators(self.degree, gens, label)?;
        if h.order != elements.len() as u128 {
            return Err(Error::Internal("element set is not closed".into()));
        }
        Ok(h)
    }

    /// A Sylow `p`-subgroup. For `p` not dividing the order the trivial subgroup is returned.
    pub fn sylow_subgroup(&self, p: u64) -> Result<Subgroup> {
        if !is_prime(p) {
            return Err(Error::Argument(format!("{p} is not prime")));
        }
        let target = p_part(self.order, p);
        let label = Some(format!("Syl_{p}({self})"));
        if target == 1 {
            return Ok(Self::trivial(self.degree)?.with_label("1"));
        }
        if let Kind::Family { family, support } = &self.kind {
            let gens = symmetric_sylow_generators(self.degree, support, p);
            let ps = Self::from_generators(self.degree, gens, None)?;
            let ps = match family {
                Family::Symmetric => ps,
                Family::Alternating if p != 2 => ps,
                Family::Alternating => {
                    let even: Vec<Permutation> =
                        ps.sorted_elements()?.into_iter().filter(|g| g.is_even()).collect();
                    ps.subgroup_from_elements(&even, None)?
                }
            };
            if ps.order != target {
                return Err(Error::Internal(format!("Sylow construction gave order {}, expected {target}", ps.order)));
            }
            return Ok(ps.with_label(format!("Syl_{p}({self})")));
        }
        // Greedy extension: any p-subgroup that is not Sylow is properly contained in a
        // larger p-subgroup generated by one more element of p-power order.
        let candidates: Vec<Permutation> = self
            .sorted_elements()?
            .into_iter()
            .filter(|g| !g.is_identity() && is_power_of(g.order() as u128, p))
            .collect();
        let mut gens: Vec<Permutation> = Vec::new();
        let mut current: HashSet<Permutation> = HashSet::from([self.identity()]);
        while (current.len() as u128) < target {
            let mut extended = false;
            for x in &candidates {
                if current.contains(x) {
                    continue;
                }
                let mut trial = gens.clone();
                trial.push(x.clone());
                if let Ok(e) = enumerate(self.degree, &trial, Some(target as usize)) {
                    if is_power_of(e.elements.len() as u128, p) {
                        gens = trial;
                        current = e.elements.into_iter().collect();
                        extended = true;
                        break;
                    }
                }
            }
            if !extended {
                return Err(Error::Internal("Sylow extension stalled".into()));
            }
        }
        Self::from_generators(self.degree, gens, label)
    }

    /// Whether `a` and `b` are conjugate by an element of `self`.
    pub fn are_conjugate(&self, a: &Subgroup, b: &Subgroup) -> Result<bool> {
        if a.order != b.order || a.degree != b.degree {
            return Ok(false);
        }
        for g in self.elements()? {
            let gi = g.inverse();
            if a.generators.iter().all(|x| b.contains(&g.compose(x).compose(&gi))) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Subgroups up to conjugacy, sorted by increasing order. Requires `|G| <= bound`.
    pub fn subgroup_classes(&self, bound: u128) -> Result<Vec<Subgroup>> {
        if self.order > bound {
            return Err(Error::TooLarge { order: self.order, bound });
        }
        SubgroupLattice::new(self)?.classes()
    }
}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            Some(l) => f.write_str(l),
            None => {
                let gens: Vec<String> = self.generators.iter().map(|g| g.to_string()).collect();
                write!(f, "<{}>", gens.join(", "))
            }
        }
    }
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (order {})", self.order)
    }
}

/// Element-set equality.
impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.same_elements(other)
    }
}

impl Eq for FiniteGroup {}

fn enumerate(degree: usize, generators: &[Permutation], bound: Option<usize>) -> Result<Enumeration> {
    let id = Permutation::identity(degree);
    let mut elements = vec![id.clone()];
    let mut index = HashMap::from([(id, 0u32)]);
    let mut parent = vec![(0u32, 0u16)];
    let mut head = 0;
    while head < elements.len() {
        let x = elements[head].clone();
        for (gi, s) in generators.iter().enumerate() {
            let y = s.compose(&x);
            if !index.contains_key(&y) {
                if let Some(b) = bound {
                    if elements.len() >= b {
                        return Err(Error::TooLarge { order: elements.len() as u128 + 1, bound: b as u128 });
                    }
                }
                index.insert(y.clone(), elements.len() as u32);
                elements.push(y);
                parent.push((head as u32, gi as u16));
            }
        }
        head += 1;
    }
    Ok(Enumeration { elements, index, parent })
}

/// Word for `g` in the family generators of `S` or `A` on `support`.
fn family_word(family: Family, support: &[usize], g: &Permutation) -> Vec<Letter> {
    // Positions of the support letters; pi(i) = position of g(support[i]).
    let m = support.len();
    let pos: HashMap<usize, usize> = support.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut pi: Vec<usize> = support.iter().map(|&x| pos[&g.apply(x)]).collect();
    // Bubble sort pi by right multiplications with adjacent transpositions s_j:
    // pi * s_j1 * ... * s_jL = id, hence pi = s_jL * ... * s_j1.
    let mut swaps = Vec::new();
    for pass in 0..m {
        let mut done = true;
        for j in 0..m.saturating_sub(1 + pass) {
            if pi[j] > pi[j + 1] {
                pi.swap(j, j + 1);
                swaps.push(j);
                done = false;
            }
        }
        if done {
            break;
        }
    }
    swaps.reverse();
    match family {
        Family::Symmetric => swaps.into_iter().map(|j| (j, false)).collect(),
        Family::Alternating => {
            // s_a s_b = (s_0 s_a)^{-1} (s_0 s_b) = u_a^{-1} u_b with u_0 = e and
            // generator index a - 1 for u_a.
            let mut w = Vec::new();
            for pair in swaps.chunks(2) {
                let (a, b) = (pair[0], pair[1]);
                if a != 0 {
                    w.push((a - 1, true));
                }
                if b != 0 {
                    w.push((b - 1, false));
                }
            }
            w
        }
    }
}

/// Generators of a Sylow `p`-subgroup of the symmetric group on `support`:
/// the support is cut into blocks of sizes `p^k` following the base-`p` digits of
/// its size, and each block carries the iterated wreath product `C_p wr ... wr C_p`.
fn symmetric_sylow_generators(degree: usize, support: &[usize], p: u64) -> Vec<Permutation> {
    let p = p as usize;
    let mut gens = Vec::new();
    let mut offset = 0;
    let mut remaining = support.len();
    let mut digits = Vec::new();
    while remaining > 0 {
        digits.push(remaining % p);
        remaining /= p;
    }
    for (k, &d) in digits.iter().enumerate().rev() {
        let block = p.pow(k as u32);
        for _ in 0..d {
            for level in 0..k {
                let step = p.pow(level as u32);
                let span = step * p;
                let mut images: Vec<usize> = (1..=degree).collect();
                for x in 0..span {
                    let y = (x + step) % span;
                    images[support[offset + x] - 1] = support[offset + y];
                }
                gens.push(Permutation::from_images(&images).expect("block shift is a bijection"));
            }
            offset += block;
        }
    }
    gens
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime divisors in increasing order.
pub fn prime_divisors(mut n: u128) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u128;
    while d * d <= n {
        if n % d == 0 {
            out.push(d as u64);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n as u64);
    }
    out
}

/// Largest power of `p` dividing `n`.
pub fn p_part(mut n: u128, p: u64) -> u128 {
    let p = p as u128;
    let mut out = 1;
    while n > 0 && n % p == 0 {
        n /= p;
        out *= p;
    }
    out
}

fn is_power_of(mut n: u128, p: u64) -> bool {
    while n > 1 && n % p as u128 == 0 {
        n /= p as u128;
    }
    n == 1
}

/// `gcd(|H|, [G:H]) = 1`.
pub fn is_hall(g: &FiniteGroup, h: &FiniteGroup) -> Result<bool> {
    let index = h.index_in(g)?;
    Ok(h.order().gcd(&index) == 1)
}

/// Subgroup enumeration on a multiplication table with bitset element sets.
struct SubgroupLattice<'a> {
    group: &'a FiniteGroup,
    n: usize,
    table: Vec<u16>,
    inverse: Vec<u16>,
}

type Bits = Vec<u64>;

impl<'a> SubgroupLattice<'a> {
    fn new(group: &'a FiniteGroup) -> Result<Self> {
        let els = group.elements()?;
        let n = els.len();
        let mut table = vec![0u16; n * n];
        let mut inverse = vec![0u16; n];
        for (i, a) in els.iter().enumerate() {
            inverse[i] = group.element_index(&a.inverse()).expect("closed") as u16;
            for (j, b) in els.iter().enumerate() {
                table[i * n + j] = group.element_index(&a.compose(b)).expect("closed") as u16;
            }
        }
        Ok(SubgroupLattice { group, n, table, inverse })
    }

    fn empty(&self) -> Bits {
        vec![0; self.n.div_ceil(64)]
    }

    fn closure(&self, gens: &[u16]) -> Bits {
        let mut bits = self.empty();
        bits[0] |= 1;
        let mut list = vec![0u16];
        let mut head = 0;
        while head < list.len() {
            let x = list[head] as usize;
            for &s in gens {
                let y = self.table[s as usize * self.n + x] as usize;
                if bits[y / 64] >> (y % 64) & 1 == 0 {
                    bits[y / 64] |= 1 << (y % 64);
                    list.push(y as u16);
                }
            }
            head += 1;
        }
        bits
    }

    fn members(&self, bits: &Bits) -> Vec<usize> {
        (0..self.n).filter(|&i| bits[i / 64] >> (i % 64) & 1 == 1).collect()
    }

    fn conjugate(&self, bits: &Bits, g: usize) -> Bits {
        let gi = self.inverse[g] as usize;
        let mut out = self.empty();
        for x in self.members(bits) {
            let y = self.table[self.table[g * self.n + x] as usize * self.n + gi] as usize;
            out[y / 64] |= 1 << (y % 64);
        }
        out
    }

    fn classes(&self) -> Result<Vec<Subgroup>> {
        let gen_idx: Vec<usize> =
            self.group.generators().iter().map(|g| self.group.element_index(g).expect("closed")).collect();
        // Distinct cyclic subgroups, each with a generator.
        let mut cyclic: Vec<u16> = Vec::new();
        let mut seen_cyclic: HashSet<Bits> = HashSet::new();
        for x in 1..self.n {
            let b = self.closure(&[x as u16]);
            if seen_cyclic.insert(b) {
                cyclic.push(x as u16);
            }
        }
        let mut seen: HashSet<Bits> = HashSet::new();
        let mut reps: Vec<(Bits, Vec<u16>)> = Vec::new();
        let push_class = |bits: Bits, gens: Vec<u16>, seen: &mut HashSet<Bits>, reps: &mut Vec<(Bits, Vec<u16>)>| {
            if seen.contains(&bits) {
                return;
            }
            // Conjugacy orbit under the group generators.
            let mut stack = vec![bits.clone()];
            seen.insert(bits.clone());
            while let Some(b) = stack.pop() {
                for &g in &gen_idx {
                    let c = self.conjugate(&b, g);
                    if seen.insert(c.clone()) {
                        stack.push(c);
                    }
                }
            }
            reps.push((bits, gens));
        };
        push_class(self.closure(&[]), vec![], &mut seen, &mut reps);
        let mut head = 0;
        while head < reps.len() {
            let (bits, gens) = reps[head].clone();
            for &c in &cyclic {
                let c = c as usize;
                if bits[c / 64] >> (c % 64) & 1 == 1 {
                    continue;
                }
                let mut g2 = gens.clone();
                g2.push(c as u16);
                let joined = self.closure(&g2);
                push_class(joined, g2, &mut seen, &mut reps);
            }
            head += 1;
        }
        let els = self.group.elements()?;
        let mut out = Vec::with_capacity(reps.len());
        for (_, gens) in reps {
            let gens: Vec<Permutation> = gens.iter().map(|&i| els[i as usize].clone()).collect();
            out.push(FiniteGroup::from_generators(self.group.degree, gens, None)?);
        }
        out.sort_by_key(|h| h.order());
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(n: usize, s: &str) -> Permutation {
        Permutation::parse_cycles(n, s).unwrap()
    }

    #[test]
    fn family_orders() {
        assert_eq!(FiniteGroup::symmetric(2).unwrap().order(), 2);
        assert_eq!(FiniteGroup::symmetric(4).unwrap().order(), 24);
        assert_eq!(FiniteGroup::symmetric(6).unwrap().order(), 720);
        assert_eq!(FiniteGroup::alternating(3).unwrap().order(), 3);
        assert_eq!(FiniteGroup::alternating(4).unwrap().order(), 12);
        assert_eq!(FiniteGroup::symmetric(12).unwrap().order(), 479_001_600);
        assert!(FiniteGroup::symmetric(17).is_err());
        assert!(FiniteGroup::symmetric(0).is_err());
    }

    #[test]
    fn enumerated_family_matches_order() {
        for n in 1..=7 {
            let s = FiniteGroup::symmetric(n).unwrap();
            assert_eq!(s.elements().unwrap().len() as u128, s.order());
            let a = FiniteGroup::alternating(n).unwrap();
            assert_eq!(a.elements().unwrap().len() as u128, a.order());
            assert!(a.elements().unwrap().iter().all(|g| g.is_even()));
        }
        assert!(!FiniteGroup::symmetric(9).unwrap().is_enumerated());
    }

    #[test]
    fn alternating_membership() {
        let a5 = FiniteGroup::alternating(5).unwrap();
        assert!(a5.contains(&perm(5, "(1 2 3 4 5)")));
        assert!(a5.contains(&perm(5, "(1 2 3)")));
        assert!(!a5.contains(&perm(5, "(1 2)")));
    }

    #[test]
    fn family_words_evaluate_back() {
        for n in [5usize, 9, 12] {
            for g in [FiniteGroup::symmetric(n).unwrap(), FiniteGroup::alternating(n).unwrap()] {
                let x = if n > 7 { perm(n, "(1 3 5)(2 4)(6 8)") } else { perm(n, "(1 3 5)(2 4)") };
                let x = if g.contains(&x) { x } else { x.compose(&perm(n, "(1 2)")) };
                let w = g.word(&x).unwrap();
                let mut acc = g.identity();
                for &(i, inv) in &w {
                    let s = if inv { g.generators()[i].inverse() } else { g.generators()[i].clone() };
                    acc = acc.compose(&s);
                }
                assert_eq!(acc, x, "{g}");
            }
        }
    }

    #[test]
    fn point_stabilizers() {
        let s4 = FiniteGroup::symmetric(4).unwrap();
        let h = s4.point_stabilizer(4).unwrap();
        assert_eq!((h.order(), h.index_in(&s4).unwrap()), (6, 4));
        let a5 = FiniteGroup::alternating(5).unwrap();
        let h = a5.point_stabilizer(5).unwrap();
        assert_eq!((h.order(), h.index_in(&a5).unwrap()), (12, 5));
        assert_eq!(FiniteGroup::symmetric(2).unwrap().point_stabilizer(2).unwrap().order(), 1);
        let c = FiniteGroup::from_generators(4, vec![perm(4, "(1 2)(3 4)"), perm(4, "(1 2)")], None).unwrap();
        assert_eq!(c.point_stabilizer(4).unwrap().order(), 2);
        assert!(s4.point_stabilizer(5).is_err());
    }

    /// Largest p-power order among all subgroups generated by at most three elements,
    /// by exhaustive closure.
    fn brute_force_max_p_subgroup(g: &FiniteGroup, p: u64) -> u128 {
        let els = g.elements().unwrap();
        let mut best = 1u128;
        for a in els {
            for b in els {
                for c in els.iter().step_by(3) {
                    let h = FiniteGroup::from_generators(g.degree(), vec![a.clone(), b.clone(), c.clone()], None).unwrap();
                    if is_power_of(h.order(), p) {
                        best = best.max(h.order());
                    }
                }
            }
        }
        best
    }

    #[test]
    fn sylow_orders() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        assert_eq!(s3.sylow_subgroup(3).unwrap().order(), 3);
        let s4 = FiniteGroup::symmetric(4).unwrap();
        let p = s4.sylow_subgroup(2).unwrap();
        assert_eq!(p.order(), brute_force_max_p_subgroup(&s4, 2));
        assert_eq!(p.order(), 8);
        assert!(p.is_subgroup_of(&s4));
        assert_eq!(FiniteGroup::symmetric(5).unwrap().sylow_subgroup(7).unwrap().order(), 1);
        assert!(s4.sylow_subgroup(4).is_err());
        for n in 2..=12 {
            for p in [2u64, 3, 5, 7, 11] {
                for g in [FiniteGroup::symmetric(n).unwrap(), FiniteGroup::alternating(n).unwrap()] {
                    let sp = g.sylow_subgroup(p).unwrap();
                    assert_eq!(sp.order(), p_part(g.order(), p), "{g} p={p}");
                    assert!(sp.is_subgroup_of(&g));
                }
            }
        }
    }

    #[test]
    fn generic_sylow_greedy() {
        // S_4 given by arbitrary generators is a generic group.
        let g = FiniteGroup::from_generators(4, vec![perm(4, "(1 2 3 4)"), perm(4, "(1 2)")], None).unwrap();
        assert_eq!(g.sylow_subgroup(2).unwrap().order(), 8);
        assert_eq!(g.sylow_subgroup(3).unwrap().order(), 3);
    }

    #[test]
    fn cyclic_and_hall() {
        let c3 = FiniteGroup::from_generators(3, vec![perm(3, "(1 2 3)")], None).unwrap();
        assert!(c3.is_cyclic());
        let s5 = FiniteGroup::symmetric(5).unwrap();
        let s4 = s5.point_stabilizer(5).unwrap();
        assert!(is_hall(&s5, &s4).unwrap());
        for n in [4usize, 6, 8, 9, 10, 12] {
            let s = FiniteGroup::symmetric(n).unwrap();
            assert!(!is_hall(&s, &s.point_stabilizer(n).unwrap()).unwrap());
        }
        assert!(!FiniteGroup::symmetric(4).unwrap().sylow_subgroup(2).unwrap().is_cyclic());
        assert!(s5.sylow_subgroup(5).unwrap().is_cyclic());
    }

    #[test]
    fn subgroup_class_counts() {
        // S_4: 11 classes, S_5: 19 classes, A_5: 9 classes, C_2^3: 16 subgroups.
        assert_eq!(FiniteGroup::symmetric(4).unwrap().subgroup_classes(1000).unwrap().len(), 11);
        assert_eq!(FiniteGroup::symmetric(5).unwrap().subgroup_classes(1000).unwrap().len(), 19);
        assert_eq!(FiniteGroup::alternating(5).unwrap().subgroup_classes(1000).unwrap().len(), 9);
        let e = FiniteGroup::from_generators(6, vec![perm(6, "(1 2)"), perm(6, "(3 4)"), perm(6, "(5 6)")], None)
            .unwrap();
        assert_eq!(e.subgroup_classes(1000).unwrap().len(), 16);
        assert!(FiniteGroup::symmetric(7).unwrap().subgroup_classes(1000).is_err());
    }

    #[test]
    fn closure_invariants() {
        for g in [FiniteGroup::symmetric(4).unwrap(), FiniteGroup::alternating(5).unwrap()] {
            let els = g.elements().unwrap();
            for a in els {
                assert!(g.contains(&a.inverse()));
                for b in els.iter().take(10) {
                    assert!(g.contains(&a.compose(b)));
                }
            }
            assert_eq!(720u128 % g.order() == 0 || 120u128 % g.order() == 0, true);
        }
    }

    #[test]
    fn normality() {
        let s4 = FiniteGroup::symmetric(4).unwrap();
        let v4 = s4.subgroup(vec![perm(4, "(1 2)(3 4)"), perm(4, "(1 3)(2 4)")], None).unwrap();
        assert!(v4.is_normal_in(&s4));
        assert!(!s4.point_stabilizer(4).unwrap().is_normal_in(&s4));
    }
}
