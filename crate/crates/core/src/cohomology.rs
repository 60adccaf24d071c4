//! Tate cohomology in degrees -1, 0 and 1 of finite groups acting on lattices,
//! and the flasque and coflasque predicates.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Subgroup, SUBGROUP_CLASS_BOUND};
use crate::lattice::GLattice;
use crate::linalg::{cokernel_invariants, kernel_basis, left_inverse, rank, IntMatrix};

/// A finite abelian group `Ĥ^degree`, stored as its sorted list of elementary
/// divisors (prime powers).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TateGroup {
    pub degree: i8,
    pub invariants: Vec<BigInt>,
}

impl TateGroup {
    fn from_torsion(degree: i8, torsion: &[BigInt]) -> Result<Self> {
        let mut invariants = Vec::new();
        for d in torsion {
            let n = d
                .to_u128()
                .ok_or_else(|| Error::Internal(format!("torsion coefficient {d} out of range")))?;
            invariants.extend(prime_power_parts(n).into_iter().map(BigInt::from));
        }
        invariants.sort();
        Ok(TateGroup { degree, invariants })
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants.is_empty()
    }

    pub fn order(&self) -> BigInt {
        self.invariants.iter().product()
    }

    /// Direct sum: the elementary divisor multisets merge.
    pub fn merge(&self, other: &TateGroup) -> TateGroup {
        let mut invariants = self.invariants.clone();
        invariants.extend(other.invariants.iter().cloned());
        invariants.sort();
        TateGroup { degree: self.degree, invariants }
    }
}

fn prime_power_parts(mut n: u128) -> Vec<u128> {
    let mut out = Vec::new();
    let mut p = 2u128;
    while p * p <= n {
        if n % p == 0 {
            let mut q = 1;
            while n % p == 0 {
                n /= p;
                q *= p;
            }
            out.push(q);
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `[2,2]` for `(Z/2)^2`, `[]` for the trivial group.
impl fmt::Display for TateGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.invariants.iter().map(|d| d.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl Serialize for TateGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.invariants.iter().map(|d| d.to_u64().unwrap_or(0)).collect::<Vec<u64>>().serialize(s)
    }
}

/// The lattice viewed over `h`, reusing it when it already acts through `h`'s generators.
fn over(h: &Subgroup, m: &GLattice) -> Result<GLattice> {
    h.elements()?;
    if m.group().generators() == h.generators() {
        Ok(m.clone())
    } else {
        m.restrict(h)
    }
}

/// `N_H = Σ_{h ∈ H} action(h)`.
pub fn norm_matrix(m: &GLattice) -> Result<IntMatrix> {
    let r = m.rank();
    if m.is_tagged_permutation() {
        let mut counts = vec![0i64; r * r];
        for images in m.element_basis_permutations()? {
            for (b, &i) in images.iter().enumerate() {
                counts[i * r + b] += 1;
            }
        }
        return IntMatrix::from_vec(r, r, counts.into_iter().map(BigInt::from).collect());
    }
    if let Some(n) = product_norm(m)? {
        return Ok(n);
    }
    let mut n = IntMatrix::zeros(r, r);
    for a in m.element_matrices()? {
        n = n.add(&a)?;
    }
    Ok(n)
}

/// When every element is uniquely `g_1^{a_1} ... g_k^{a_k}` in the generators,
/// `N_H` factors as the product of the cyclic norms `Σ_j action(g_i)^j`.
fn product_norm(m: &GLattice) -> Result<Option<IntMatrix>> {
    let group = m.group();
    let gens = group.generators();
    let orders: Vec<u64> = gens.iter().map(|g| g.order()).collect();
    let product: u128 = orders.iter().map(|&o| o as u128).product();
    if product != group.order() {
        return Ok(None);
    }
    let mut seen = std::collections::HashSet::new();
    let mut current = vec![group.identity()];
    for g in gens.iter().rev() {
        let mut next = Vec::with_capacity(current.len() * g.order() as usize);
        let mut power = group.identity();
        for _ in 0..g.order() {
            next.extend(current.iter().map(|x| power.compose(x)));
            power = power.compose(g);
        }
        current = next;
    }
    if !current.into_iter().all(|x| seen.insert(x)) {
        return Ok(None);
    }
    let r = m.rank();
    let mut n = IntMatrix::identity(r);
    for (a, &o) in m.action().iter().zip(&orders) {
        let mut power = IntMatrix::identity(r);
        let mut cyclic = IntMatrix::identity(r);
        for _ in 1..o {
            power = power.mul(a)?;
            cyclic = cyclic.add(&power)?;
        }
        n = n.mul(&cyclic)?;
    }
    Ok(Some(n))
}

/// Stacked `action(s) - I` over the generators, as a `(k r) x r` matrix.
fn stacked_differences(m: &GLattice) -> Result<IntMatrix> {
    let r = m.rank();
    let id = IntMatrix::identity(r);
    let mut out = IntMatrix::zeros(0, r);
    for a in m.action() {
        out = out.vstack(&a.sub(&id)?)?;
    }
    Ok(out)
}

/// Basis of `M^H` as columns.
pub fn fixed_basis(m: &GLattice) -> Result<IntMatrix> {
    if m.action().is_empty() {
        return Ok(IntMatrix::identity(m.rank()));
    }
    Ok(kernel_basis(&stacked_differences(m)?))
}

fn finite_quotient(degree: i8, coords: &IntMatrix) -> Result<TateGroup> {
    let c = cokernel_invariants(coords);
    if c.free_rank != 0 {
        return Err(Error::Internal(format!("Tate group in degree {degree} has free rank {}", c.free_rank)));
    }
    TateGroup::from_torsion(degree, &c.torsion)
}

/// `Ĥ^0(H, M) = M^H / N_H M`.
pub fn tate_h0(h: &Subgroup, m: &GLattice) -> Result<TateGroup> {
    let m = over(h, m)?;
    let f = fixed_basis(&m)?;
    if f.cols() == 0 {
        return Ok(TateGroup { degree: 0, invariants: vec![] });
    }
    let coords = left_inverse(&f)?.mul(&norm_matrix(&m)?)?;
    finite_quotient(0, &coords)
}

/// `Ĥ^{-1}(H, M) = ker N_H / I_H M`, where `I_H M` is spanned by `(s - 1) M` over
/// the generators `s`.
pub fn tate_h_minus1(h: &Subgroup, m: &GLattice) -> Result<TateGroup> {
    let m = over(h, m)?;
    let k = kernel_basis(&norm_matrix(&m)?);
    if k.cols() == 0 {
        return Ok(TateGroup { degree: -1, invariants: vec![] });
    }
    let r = m.rank();
    let id = IntMatrix::identity(r);
    let mut span = IntMatrix::zeros(r, 0);
    for a in m.action() {
        span = span.hstack(&a.sub(&id)?)?;
    }
    let coords = left_inverse(&k)?.mul(&span)?;
    finite_quotient(-1, &coords)
}

/// `Ĥ^1(H, M) = Z^1 / B^1`. A cocycle is determined by its values on the
/// generators; the cocycle identity is imposed along every edge of the Cayley
/// graph. Rows are added until the system reaches its known rank, which fixes its
/// rational kernel and hence its integral kernel.
pub fn tate_h1(h: &Subgroup, m: &GLattice) -> Result<TateGroup> {
    let m = over(h, m)?;
    let r = m.rank();
    let k = m.action().len();
    if r == 0 || k == 0 {
        return Ok(TateGroup { degree: 1, invariants: vec![] });
    }
    let n = k * r;
    let f = fixed_basis(&m)?.cols();
    let target = n - (r - f);
    let group = m.group();
    let els = group.elements()?;
    let tree = group.spanning_tree()?;
    let select = |j: usize| -> IntMatrix {
        let mut e = IntMatrix::zeros(r, n);
        for i in 0..r {
            e.set(i, j * r + i, BigInt::one());
        }
        e
    };
    let selectors: Vec<IntMatrix> = (0..k).map(select).collect();
    // phi[g] maps the generator values to f(g).
    let mut phi: Vec<IntMatrix> = Vec::with_capacity(els.len());
    phi.push(IntMatrix::zeros(r, n));
    for &(parent, gen) in tree.iter().skip(1) {
        let next = selectors[gen].add(&m.action()[gen].mul(&phi[parent])?)?;
        phi.push(next);
    }
    let mut system = IntMatrix::zeros(0, n);
    let mut pending = IntMatrix::zeros(0, n);
    let mut current_rank = 0;
    'edges: for (gi, g) in els.iter().enumerate() {
        for (j, s) in group.generators().iter().enumerate() {
            let sg = group.element_index(&s.compose(g)).expect("closed");
            if tree[sg] == (gi, j) && sg != 0 {
                continue;
            }
            let rows = phi[sg].sub(&selectors[j])?.sub(&m.action()[j].mul(&phi[gi])?)?;
            if rows.is_zero() {
                continue;
            }
            pending = pending.vstack(&rows)?;
            if pending.rows() >= n.max(r) {
                system = system.vstack(&pending)?;
                pending = IntMatrix::zeros(0, n);
                current_rank = rank(&system);
                if current_rank == target {
                    break 'edges;
                }
            }
        }
    }
    if current_rank != target {
        system = system.vstack(&pending)?;
        current_rank = rank(&system);
    }
    if current_rank != target {
        return Err(Error::Internal(format!("cocycle system has rank {current_rank}, expected {target}")));
    }
    let z1 = if system.rows() == 0 { IntMatrix::identity(n) } else { kernel_basis(&system) };
    if z1.cols() == 0 {
        return Ok(TateGroup { degree: 1, invariants: vec![] });
    }
    let coboundaries = stacked_differences(&m)?;
    let coords = left_inverse(&z1)?.mul(&coboundaries)?;
    finite_quotient(1, &coords)
}

/// Tate cohomology in the given degree.
pub fn tate(degree: i8, h: &Subgroup, m: &GLattice) -> Result<TateGroup> {
    match degree {
        -1 => tate_h_minus1(h, m),
        0 => tate_h0(h, m),
        1 => tate_h1(h, m),
        _ => Err(Error::Argument(format!("Tate degree {degree} outside -1..=1"))),
    }
}

/// `Ĥ^degree(K, M)` for every subgroup class representative `K` of `G`.
pub fn sweep(g: &FiniteGroup, m: &GLattice, degree: i8) -> Result<Vec<(Subgroup, TateGroup)>> {
    sweep_with(g, m, degree, SUBGROUP_CLASS_BOUND)
}

/// [`sweep`] with an explicit bound on `|G|` for the subgroup enumeration.
pub fn sweep_with(g: &FiniteGroup, m: &GLattice, degree: i8, bound: u128) -> Result<Vec<(Subgroup, TateGroup)>> {
    let classes = g.subgroup_classes(bound)?;
    classes
        .into_par_iter()
        .map(|k| {
            let t = if k.order() == 1 { TateGroup { degree, invariants: vec![] } } else { tate(degree, &k, m)? };
            Ok((k, t))
        })
        .collect()
}

/// `Ĥ^{-1}(K, M) = 0` for every subgroup `K`.
pub fn is_flasque(g: &FiniteGroup, m: &GLattice) -> Result<bool> {
    Ok(sweep(g, m, -1)?.iter().all(|(_, t)| t.is_trivial()))
}

/// `Ĥ^1(K, M) = 0` for every subgroup `K`.
pub fn is_coflasque(g: &FiniteGroup, m: &GLattice) -> Result<bool> {
    Ok(sweep(g, m, 1)?.iter().all(|(_, t)| t.is_trivial()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2_sign() -> GLattice {
        GLattice::new(FiniteGroup::symmetric(2).unwrap(), vec![IntMatrix::from_rows(&[[-1]])]).unwrap()
    }

    #[test]
    fn cyclic_trivial_module() {
        for p in [2usize, 3, 5] {
            let cycle: Vec<usize> = (1..=p).collect();
            let g = FiniteGroup::from_generators(
                p,
                vec![crate::Permutation::from_cycles(p, &[cycle]).unwrap()],
                None,
            )
            .unwrap();
            let z = GLattice::trivial(g.clone(), 1);
            assert_eq!(tate_h0(&g, &z).unwrap().invariants, vec![BigInt::from(p)]);
            assert!(tate_h_minus1(&g, &z).unwrap().is_trivial());
            assert!(tate_h1(&g, &z).unwrap().is_trivial());
        }
    }

    #[test]
    fn sign_lattice() {
        let m = c2_sign();
        let g = m.group().clone();
        assert_eq!(tate_h_minus1(&g, &m).unwrap().to_string(), "[2]");
        assert!(tate_h0(&g, &m).unwrap().is_trivial());
        assert_eq!(tate_h1(&g, &m).unwrap().to_string(), "[2]");
        assert!(!is_flasque(&g, &m).unwrap());
    }

    #[test]
    fn elementary_divisors() {
        assert_eq!(prime_power_parts(12), vec![4, 3]);
        let t = TateGroup::from_torsion(0, &[BigInt::from(6)]).unwrap();
        assert_eq!(t.to_string(), "[2,3]");
    }
}
