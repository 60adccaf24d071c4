//! Coflasque covers `0 -> C -> Q -> M -> 0` and flasque resolutions
//! `0 -> M -> P -> F -> 0`, the latter obtained by dualizing a cover of the dual.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::cohomology::{fixed_basis, sweep, TateGroup};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Subgroup, SUBGROUP_CLASS_BOUND};
use crate::lattice::{permutation_lattice_with_base, GLattice};
use crate::linalg::{cokernel_invariants, invariant_factors, kernel_basis, left_inverse, smith_normal_form, IntMatrix};

/// How the generators of the fixed sublattices `M^K` are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CoverStrategy {
    /// Subgroups are visited from the largest down; for each, only generators of the
    /// cokernel of the current image in `M^K` are added.
    #[default]
    Greedy,
    /// Every subgroup class contributes one copy of `Z[G/K]` per basis vector of `M^K`.
    FullBasis,
}

/// One summand `Z[G/K]` of the cover, mapping the coset `K` to `generator ∈ M^K`.
#[derive(Clone, Debug)]
pub struct CoverSummand {
    pub subgroup: Subgroup,
    pub generator: Vec<BigInt>,
}

#[derive(Clone, Debug)]
pub struct CoflasqueCover {
    pub summands: Vec<CoverSummand>,
    /// `Q`, a permutation lattice.
    pub cover: GLattice,
    /// `C = ker(Q -> M)`.
    pub kernel: GLattice,
    /// `Q -> M`, a `rank(M) x rank(Q)` matrix.
    pub projection: IntMatrix,
    /// `C -> Q`, a `rank(Q) x rank(C)` matrix.
    pub inclusion: IntMatrix,
}

#[derive(Clone, Debug)]
pub struct FlasqueResolution {
    pub m: GLattice,
    pub p: GLattice,
    pub f: GLattice,
    /// `M -> P`.
    pub inject: IntMatrix,
    /// `P -> F`.
    pub project: IntMatrix,
    pub summands: Vec<CoverSummand>,
}

/// Images `g v` of a generator `v ∈ M^K` over the cosets `gK`, as columns.
fn coset_images(m: &GLattice, q: &GLattice, base: usize, v: &[BigInt]) -> Result<IntMatrix> {
    let r = m.rank();
    let n = q.rank();
    let tag = q.tag().expect("coset lattices are tagged");
    let mut cols: Vec<Option<Vec<BigInt>>> = vec![None; n];
    cols[base] = Some(v.to_vec());
    let mut queue = vec![base];
    while let Some(c) = queue.pop() {
        let vc = cols[c].clone().expect("visited");
        for (a, images) in m.action().iter().zip(&tag.generator_images) {
            let d = images[c];
            if cols[d].is_none() {
                cols[d] = Some(a.mul_vec(&vc)?);
                queue.push(d);
            }
        }
    }
    let mut out = IntMatrix::zeros(r, n);
    for (j, col) in cols.into_iter().enumerate() {
        let col = col.ok_or_else(|| Error::Internal("coset action is not transitive".into()))?;
        for (i, x) in col.into_iter().enumerate() {
            out.set(i, j, x);
        }
    }
    Ok(out)
}

struct Piece {
    subgroup: Subgroup,
    generator: Vec<BigInt>,
    lattice: GLattice,
    images: IntMatrix,
}

/// Image of `Q^K -> M^K`: sums of the images over each `K`-orbit of cosets.
fn fixed_image(pieces: &[Piece], k: &Subgroup, r: usize) -> Result<IntMatrix> {
    let mut out = IntMatrix::zeros(r, 0);
    for piece in pieces {
        let orbits = piece.lattice.restrict(k)?.basis_orbit_points()?;
        let mut block = IntMatrix::zeros(r, orbits.len());
        for (j, orbit) in orbits.iter().enumerate() {
            for i in 0..r {
                let s: BigInt = orbit.iter().map(|&c| piece.images.get(i, c)).sum();
                block.set(i, j, s);
            }
        }
        out = out.hstack(&block)?;
    }
    Ok(out)
}

/// A surjection from a permutation lattice onto `M` that stays surjective on
/// `K`-fixed points for every subgroup `K`; its kernel is therefore coflasque.
pub fn coflasque_cover(g: &FiniteGroup, m: &GLattice, strategy: CoverStrategy) -> Result<CoflasqueCover> {
    let m = if m.group().generators() == g.generators() { m.clone() } else { m.restrict(g)? };
    let r = m.rank();
    if m.is_tagged_permutation() {
        return identity_cover(g, &m);
    }
    let mut classes = g.subgroup_classes(SUBGROUP_CLASS_BOUND)?;
    classes.reverse();
    let mut pieces: Vec<Piece> = Vec::new();
    for k in classes {
        let fixed = fixed_basis(&m.restrict(&k)?)?;
        if fixed.cols() == 0 {
            continue;
        }
        let new_generators: Vec<Vec<BigInt>> = match strategy {
            CoverStrategy::FullBasis => (0..fixed.cols()).map(|j| fixed.column(j)).collect(),
            CoverStrategy::Greedy => {
                let image = fixed_image(&pieces, &k, r)?;
                let coords = left_inverse(&fixed)?.mul(&image)?;
                let snf = smith_normal_form(&coords);
                let d = snf.invariant_factors();
                // Columns of U^{-1} beyond the unit invariant factors generate the cokernel.
                let u_inv = left_inverse(&snf.u)?;
                (0..fixed.cols())
                    .filter(|&i| i >= d.len() || !d[i].is_one())
                    .map(|i| fixed.mul_vec(&u_inv.column(i)))
                    .collect::<Result<_>>()?
            }
        };
        if new_generators.is_empty() {
            continue;
        }
        let (lattice, base) = permutation_lattice_with_base(g, &k)?;
        for v in new_generators {
            let images = coset_images(&m, &lattice, base, &v)?;
            pieces.push(Piece { subgroup: k.clone(), generator: v, lattice: lattice.clone(), images });
        }
    }
    let mut cover: Option<GLattice> = None;
    let mut projection = IntMatrix::zeros(r, 0);
    for piece in &pieces {
        cover = Some(match cover {
            None => piece.lattice.clone(),
            Some(c) => c.direct_sum(&piece.lattice)?,
        });
        projection = projection.hstack(&piece.images)?;
    }
    let cover = match cover {
        Some(c) => c,
        None => GLattice::trivial(g.clone(), 0),
    };
    if !cokernel_invariants(&projection).is_trivial() {
        return Err(Error::Internal("cover does not surject onto the lattice".into()));
    }
    for (a_q, a_m) in cover.action().iter().zip(m.action()) {
        if projection.mul(a_q)? != a_m.mul(&projection)? {
            return Err(Error::Internal("cover map is not equivariant".into()));
        }
    }
    let inclusion = kernel_basis(&projection);
    let left = left_inverse(&inclusion)?;
    let action = cover.action().iter().map(|a| left.mul(&a.mul(&inclusion)?)).collect::<Result<Vec<_>>>()?;
    let kernel = GLattice::unchecked(g.clone(), action)?;
    let kernel = if inclusion.cols() == 0 { GLattice::trivial(g.clone(), 0) } else { kernel };
    let summands =
        pieces.into_iter().map(|p| CoverSummand { subgroup: p.subgroup, generator: p.generator }).collect();
    Ok(CoflasqueCover { summands, cover, kernel, projection, inclusion })
}

/// A permutation lattice covers itself with zero kernel.
fn identity_cover(g: &FiniteGroup, m: &GLattice) -> Result<CoflasqueCover> {
    let r = m.rank();
    let summands = if g.is_enumerated() {
        m.basis_orbits()?
            .into_iter()
            .map(|o| {
                let mut v = vec![BigInt::from(0); r];
                v[o.points[0]] = BigInt::one();
                CoverSummand { subgroup: o.stabilizer, generator: v }
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(CoflasqueCover {
        summands,
        cover: m.clone(),
        kernel: GLattice::trivial(g.clone(), 0),
        projection: IntMatrix::identity(r),
        inclusion: IntMatrix::zeros(r, 0),
    })
}

/// Flasque resolution as the dual of a coflasque cover of the dual lattice. The
/// flasque property of `F` is checked by computing `Ĥ^{-1}` on every subgroup class.
pub fn flasque_resolution(g: &FiniteGroup, m: &GLattice) -> Result<FlasqueResolution> {
    flasque_resolution_with(g, m, CoverStrategy::Greedy)
}

pub fn flasque_resolution_with(g: &FiniteGroup, m: &GLattice, strategy: CoverStrategy) -> Result<FlasqueResolution> {
    let m = if m.group().generators() == g.generators() { m.clone() } else { m.restrict(g)? };
    let cover = coflasque_cover(g, &m.dual()?, strategy)?;
    let inject = cover.projection.transpose();
    let project = cover.inclusion.transpose();
    let f = cover.kernel.dual()?;
    let res = FlasqueResolution { m, p: cover.cover, f, inject, project, summands: cover.summands };
    res.check_exact()?;
    if !res.flasque_report()?.iter().all(|(_, t)| t.is_trivial()) {
        return Err(Error::Internal("constructed F is not flasque".into()));
    }
    Ok(res)
}

/// Representative `F` of the flasque class `ρ_G(M)`.
pub fn rho(g: &FiniteGroup, m: &GLattice) -> Result<GLattice> {
    Ok(flasque_resolution(g, m)?.f)
}

impl FlasqueResolution {
    /// Ranks add up, `inject` is injective with torsion-free cokernel, `project` is
    /// surjective, the composite vanishes, and both maps are equivariant.
    pub fn check_exact(&self) -> Result<()> {
        let (rm, rp, rf) = (self.m.rank(), self.p.rank(), self.f.rank());
        if rm + rf != rp {
            return Err(Error::Internal(format!("ranks {rm} + {rf} != {rp}")));
        }
        if rm > 0 {
            let d = invariant_factors(&self.inject);
            if d.len() != rm || d.iter().any(|x| !x.is_one()) {
                return Err(Error::Internal("M -> P is not a saturated injection".into()));
            }
        }
        if rf > 0 && !cokernel_invariants(&self.project).is_trivial() {
            return Err(Error::Internal("P -> F is not surjective".into()));
        }
        if rm > 0 && rf > 0 && !self.project.mul(&self.inject)?.is_zero() {
            return Err(Error::Internal("composite M -> P -> F is nonzero".into()));
        }
        for ((a_m, a_p), a_f) in self.m.action().iter().zip(self.p.action()).zip(self.f.action()) {
            if a_p.mul(&self.inject)? != self.inject.mul(a_m)? || a_f.mul(&self.project)? != self.project.mul(a_p)? {
                return Err(Error::Internal("resolution maps are not equivariant".into()));
            }
        }
        Ok(())
    }

    /// `Ĥ^{-1}(K, F)` for every subgroup class `K`.
    pub fn flasque_report(&self) -> Result<Vec<(Subgroup, TateGroup)>> {
        sweep(self.m.group(), &self.f, -1)
    }

    pub fn to_json(&self) -> ResolutionJson {
        ResolutionJson {
            m: self.m.to_json(),
            p: self.p.to_json(),
            f: self.f.to_json(),
            inject: self.inject.clone(),
            project: self.project.clone(),
            summands: self
                .summands
                .iter()
                .map(|s| SummandJson {
                    subgroup: s.subgroup.generators().iter().map(|g| g.to_cycle_string()).collect(),
                    order: s.subgroup.order() as u64,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SummandJson {
    pub subgroup: Vec<String>,
    pub order: u64,
}

/// JSON bundle of the three lattices and the two maps.
#[derive(Clone, Debug, Serialize)]
pub struct ResolutionJson {
    #[serde(rename = "M")]
    pub m: crate::lattice::LatticeJson,
    #[serde(rename = "P")]
    pub p: crate::lattice::LatticeJson,
    #[serde(rename = "F")]
    pub f: crate::lattice::LatticeJson,
    pub inject: IntMatrix,
    pub project: IntMatrix,
    pub summands: Vec<SummandJson>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{norm_one_lattice, permutation_lattice};

    #[test]
    fn sign_lattice_resolution() {
        let g = FiniteGroup::symmetric(2).unwrap();
        let sign = GLattice::new(g.clone(), vec![IntMatrix::from_rows(&[[-1]])]).unwrap();
        let res = flasque_resolution(&g, &sign).unwrap();
        assert_eq!((res.m.rank(), res.p.rank(), res.f.rank()), (1, 2, 1));
        assert!(res.f.action()[0].is_identity());
    }

    #[test]
    fn permutation_lattice_has_zero_class() {
        let g = FiniteGroup::symmetric(3).unwrap();
        let m = permutation_lattice(&g, &g.point_stabilizer(3).unwrap()).unwrap();
        let res = flasque_resolution(&g, &m).unwrap();
        assert_eq!(res.f.rank(), 0);
    }

    #[test]
    fn j_s3_resolution_is_flasque() {
        let g = FiniteGroup::symmetric(3).unwrap();
        let j = norm_one_lattice(&g, &g.point_stabilizer(3).unwrap()).unwrap();
        let res = flasque_resolution(&g, &j).unwrap();
        res.check_exact().unwrap();
    }
}
