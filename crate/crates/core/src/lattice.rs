//! G-lattices: free Z-modules of finite rank with a group acting through integer
//! matrices attached to the group generators.
//!
//! Matrices act on column vectors from the left, so `action(g h) = action(g) action(h)`
//! with the composition convention of [`Permutation::compose`].

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Family, FiniteGroup, Subgroup};
use crate::linalg::{is_unimodular, left_inverse, IntMatrix};
use crate::perm::Permutation;

/// Basis of a permutation lattice: a label per basis vector and the permutation of
/// basis indices induced by each group generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationBasisTag {
    pub labels: Vec<String>,
    pub generator_images: Vec<Vec<usize>>,
}

#[derive(Clone)]
pub struct GLattice {
    group: FiniteGroup,
    action: Vec<IntMatrix>,
    rank: usize,
    tag: Option<PermutationBasisTag>,
}

/// One orbit of a group on the basis of a permutation lattice.
#[derive(Clone, Debug)]
pub struct BasisOrbit {
    pub points: Vec<usize>,
    /// Stabilizer of the first point.
    pub stabilizer: Subgroup,
}

/// `Z[P/stabilizer]` occurring `multiplicity` times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitClass {
    pub stabilizer: Subgroup,
    pub multiplicity: usize,
}

/// `0 -> I_{G/H} -> Z[G/H] -> Z -> 0`.
#[derive(Clone, Debug)]
pub struct AugmentationSequence {
    pub ambient: GLattice,
    pub epsilon: IntMatrix,
    pub kernel: GLattice,
    pub inclusion: IntMatrix,
}

/// `J_{G/H}|_P ≅ J_P ⊕ Z[P]^{t-1}` with an explicit basis change.
#[derive(Clone, Debug)]
pub struct FreeRestriction {
    /// Number of free `P`-orbits on `G/H`.
    pub t: usize,
    /// Columns: the images of the standard bases of `J_P` and the `t - 1` copies of
    /// `Z[P]`, in coordinates of `J_{G/H}`.
    pub basis_change: IntMatrix,
    pub j_p: GLattice,
    pub regular: GLattice,
}

fn invert_images(images: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; images.len()];
    for (i, &j) in images.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

impl GLattice {
    /// Lattice with explicit generator matrices. The matrices must be unimodular and
    /// define a homomorphism; this is verified on all elements when the group is
    /// enumerated and through the Coxeter presentation for large symmetric groups.
    pub fn new(group: FiniteGroup, action: Vec<IntMatrix>) -> Result<Self> {
        let lattice = Self::unchecked(group, action)?;
        lattice.check_homomorphism()?;
        Ok(lattice)
    }

    pub(crate) fn unchecked(group: FiniteGroup, action: Vec<IntMatrix>) -> Result<Self> {
        if action.len() != group.generators().len() {
            return Err(Error::Shape(format!(
                "{} action matrices for {} generators",
                action.len(),
                group.generators().len()
            )));
        }
        let rank = match action.first() {
            Some(m) => m.rows(),
            None => 0,
        };
        if let Some(m) = action.iter().find(|m| m.shape() != (rank, rank)) {
            return Err(Error::Shape(format!("action matrix of shape {:?}, expected {rank}x{rank}", m.shape())));
        }
        Ok(GLattice { group, action, rank, tag: None })
    }

    /// `Z^rank` with every element acting as the identity.
    pub fn trivial(group: FiniteGroup, rank: usize) -> Self {
        let action = vec![IntMatrix::identity(rank); group.generators().len()];
        GLattice { group, action, rank, tag: None }
    }

    fn from_basis_permutations(group: FiniteGroup, tag: PermutationBasisTag) -> Self {
        let rank = tag.labels.len();
        let action = tag.generator_images.iter().map(|im| IntMatrix::permutation(im)).collect();
        GLattice { group, action, rank, tag: Some(tag) }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn action(&self) -> &[IntMatrix] {
        &self.action
    }

    pub fn tag(&self) -> Option<&PermutationBasisTag> {
        self.tag.as_ref()
    }

    pub fn is_tagged_permutation(&self) -> bool {
        self.tag.is_some()
    }

    fn generator_inverses(&self) -> Result<Vec<IntMatrix>> {
        self.action.iter().map(left_inverse).collect()
    }

    /// Matrix of an arbitrary group element, through a word in the generators.
    pub fn matrix_of(&self, g: &Permutation) -> Result<IntMatrix> {
        if let Some(images) = self.basis_permutation_of(g)? {
            return Ok(IntMatrix::permutation(&images));
        }
        let word = self.group.word(g)?;
        let inverses = if word.iter().any(|&(_, inv)| inv) { Some(self.generator_inverses()?) } else { None };
        let mut m = IntMatrix::identity(self.rank);
        for &(i, inv) in &word {
            let a = if inv { &inverses.as_ref().expect("computed above")[i] } else { &self.action[i] };
            m = m.mul(a)?;
        }
        Ok(m)
    }

    /// Basis permutation of `g` when the lattice is a tagged permutation lattice.
    fn basis_permutation_of(&self, g: &Permutation) -> Result<Option<Vec<usize>>> {
        let Some(tag) = &self.tag else { return Ok(None) };
        let word = self.group.word(g)?;
        let mut images: Vec<usize> = (0..self.rank).collect();
        // g = w[0] * ... * w[k-1]; apply the rightmost letter first.
        for &(i, inv) in word.iter().rev() {
            let step = if inv { invert_images(&tag.generator_images[i]) } else { tag.generator_images[i].clone() };
            images = images.iter().map(|&b| step[b]).collect();
        }
        Ok(Some(images))
    }

    /// Matrices of all elements, aligned with `group().elements()`.
    pub fn element_matrices(&self) -> Result<Vec<IntMatrix>> {
        let tree = self.group.spanning_tree()?;
        let mut out = Vec::with_capacity(tree.len());
        out.push(IntMatrix::identity(self.rank));
        for &(parent, gen) in tree.iter().skip(1) {
            let m = self.action[gen].mul(&out[parent])?;
            out.push(m);
        }
        Ok(out)
    }

    /// Basis permutations of all elements of a tagged lattice, aligned with
    /// `group().elements()`.
    pub(crate) fn element_basis_permutations(&self) -> Result<Vec<Vec<usize>>> {
        let tag = self.tag.as_ref().ok_or_else(|| Error::Unsupported("lattice carries no permutation basis".into()))?;
        let tree = self.group.spanning_tree()?;
        let mut out: Vec<Vec<usize>> = Vec::with_capacity(tree.len());
        out.push((0..self.rank).collect());
        for &(parent, gen) in tree.iter().skip(1) {
            let step = &tag.generator_images[gen];
            let images = out[parent].iter().map(|&b| step[b]).collect();
            out.push(images);
        }
        Ok(out)
    }

    /// Verifies unimodularity of the generator matrices and the homomorphism property.
    pub fn check_homomorphism(&self) -> Result<()> {
        for (g, m) in self.group.generators().iter().zip(&self.action) {
            if !is_unimodular(m) {
                return Err(Error::Argument(format!("action matrix of {g} is not unimodular")));
            }
        }
        if self.group.is_enumerated() {
            // M(s g) = A(s) M(g) for every generator s and element g characterizes a
            // homomorphism once M(e) = I.
            let els = self.group.elements()?;
            let mats = self.element_matrices()?;
            for (s, a) in self.group.generators().iter().zip(&self.action) {
                for (g, m) in els.iter().zip(&mats) {
                    let sg = self.group.element_index(&s.compose(g)).expect("closed");
                    if a.mul(m)? != mats[sg] {
                        return Err(Error::Argument(format!("action does not respect the product {s} * {g}")));
                    }
                }
            }
            return Ok(());
        }
        match self.group.full_family() {
            Some((Family::Symmetric, n)) => self.check_coxeter(n),
            _ => Err(Error::Unsupported(format!(
                "cannot verify the action of {} without enumerating it",
                self.group
            ))),
        }
    }

    fn check_coxeter(&self, n: usize) -> Result<()> {
        let id = IntMatrix::identity(self.rank);
        let pow = |m: &IntMatrix, e: u32| -> Result<IntMatrix> {
            let mut out = id.clone();
            for _ in 0..e {
                out = out.mul(m)?;
            }
            Ok(out)
        };
        let s = &self.action;
        for i in 0..n.saturating_sub(1) {
            for j in i..n - 1 {
                let e = match j - i {
                    0 => 1,
                    1 => 3,
                    _ => 2,
                };
                if pow(&s[i].mul(&s[j])?, e)? != id {
                    return Err(Error::Argument(format!("Coxeter relation fails for generators {i}, {j}")));
                }
            }
        }
        Ok(())
    }

    /// Dual lattice: `g` acts by the transpose of the action of `g^{-1}`. A tagged
    /// permutation lattice is its own dual.
    pub fn dual(&self) -> Result<GLattice> {
        if self.tag.is_some() {
            return Ok(self.clone());
        }
        let action = self.generator_inverses()?.iter().map(IntMatrix::transpose).collect();
        Ok(GLattice { group: self.group.clone(), action, rank: self.rank, tag: None })
    }

    /// Same group and generators, block-diagonal action.
    pub fn direct_sum(&self, other: &GLattice) -> Result<GLattice> {
        if self.group.generators() != other.group.generators() {
            return Err(Error::Argument("direct sum of lattices over different generating sets".into()));
        }
        let action = self.action.iter().zip(&other.action).map(|(a, b)| a.block_diag(b)).collect();
        let tag = match (&self.tag, &other.tag) {
            (Some(a), Some(b)) => {
                let mut labels = a.labels.clone();
                labels.extend(b.labels.iter().cloned());
                let generator_images = a
                    .generator_images
                    .iter()
                    .zip(&b.generator_images)
                    .map(|(x, y)| x.iter().copied().chain(y.iter().map(|&j| j + self.rank)).collect())
                    .collect();
                Some(PermutationBasisTag { labels, generator_images })
            }
            _ => None,
        };
        Ok(GLattice { group: self.group.clone(), action, rank: self.rank + other.rank, tag })
    }

    /// The restriction to a subgroup, acting through the subgroup's own generators.
    pub fn restrict(&self, p: &Subgroup) -> Result<GLattice> {
        if !p.is_subgroup_of(&self.group) {
            return Err(Error::NotSubgroup(format!("{p} is not a subgroup of {}", self.group)));
        }
        if let Some(tag) = &self.tag {
            let mut generator_images = Vec::with_capacity(p.generators().len());
            for x in p.generators() {
                generator_images.push(self.basis_permutation_of(x)?.expect("tagged"));
            }
            let tag = PermutationBasisTag { labels: tag.labels.clone(), generator_images };
            return Ok(Self::from_basis_permutations(p.clone(), tag));
        }
        let action = p.generators().iter().map(|x| self.matrix_of(x)).collect::<Result<Vec<_>>>()?;
        Ok(GLattice { group: p.clone(), action, rank: self.rank, tag: None })
    }

    /// Orbits of the lattice's group on a permutation basis, each with the
    /// stabilizer of its first point. Orbits are listed by their smallest point.
    pub fn basis_orbits(&self) -> Result<Vec<BasisOrbit>> {
        let perms = self.element_basis_permutations()?;
        let els = self.group.elements()?;
        let mut orbit_of = vec![usize::MAX; self.rank];
        let mut out = Vec::new();
        for b in 0..self.rank {
            if orbit_of[b] != usize::MAX {
                continue;
            }
            let mut points: Vec<usize> = perms.iter().map(|pi| pi[b]).collect();
            points.sort_unstable();
            points.dedup();
            for &x in &points {
                orbit_of[x] = out.len();
            }
            let mut fixing: Vec<Permutation> =
                els.iter().zip(&perms).filter(|(_, pi)| pi[b] == b).map(|(g, _)| g.clone()).collect();
            fixing.sort();
            let stabilizer = self.group.subgroup_from_elements(&fixing, None)?;
            out.push(BasisOrbit { points, stabilizer });
        }
        Ok(out)
    }

    /// Orbits of the generators on a permutation basis, without stabilizers; does
    /// not need the group to be enumerated.
    pub fn basis_orbit_points(&self) -> Result<Vec<Vec<usize>>> {
        let tag = self.tag.as_ref().ok_or_else(|| Error::Unsupported("lattice carries no permutation basis".into()))?;
        let mut orbit_of = vec![usize::MAX; self.rank];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for b in 0..self.rank {
            if orbit_of[b] != usize::MAX {
                continue;
            }
            let id = out.len();
            orbit_of[b] = id;
            let mut points = vec![b];
            let mut head = 0;
            while head < points.len() {
                let x = points[head];
                for images in &tag.generator_images {
                    let y = images[x];
                    if orbit_of[y] == usize::MAX {
                        orbit_of[y] = id;
                        points.push(y);
                    }
                }
                head += 1;
            }
            points.sort_unstable();
            out.push(points);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> LatticeJson {
        LatticeJson {
            group: self.group.to_string(),
            degree: self.group.degree(),
            generators: self.group.generators().iter().map(|g| g.to_cycle_string()).collect(),
            rank: self.rank,
            action: self.action.clone(),
            basis_labels: self.tag.as_ref().map(|t| t.labels.clone()),
        }
    }

    pub fn from_json(doc: &LatticeJson) -> Result<GLattice> {
        if doc.generators.len() != doc.action.len() {
            return Err(Error::Parse(format!(
                "{} generators but {} action matrices",
                doc.generators.len(),
                doc.action.len()
            )));
        }
        let mut gens = Vec::new();
        let mut action = Vec::new();
        for (s, m) in doc.generators.iter().zip(&doc.action) {
            let g = Permutation::parse_cycles(doc.degree, s)?;
            if m.shape() != (doc.rank, doc.rank) {
                return Err(Error::Parse(format!("matrix for {s} has shape {:?}, rank is {}", m.shape(), doc.rank)));
            }
            if g.is_identity() {
                if !m.is_identity() {
                    return Err(Error::Parse("identity generator with a non-identity matrix".into()));
                }
                continue;
            }
            gens.push(g);
            action.push(m.clone());
        }
        let group = named_group(&doc.group, doc.degree, &gens)?;
        let mut lattice = GLattice::new(group, action)?;
        lattice.rank = doc.rank;
        if let Some(labels) = &doc.basis_labels {
            if labels.len() != doc.rank {
                return Err(Error::Parse("basis label count differs from the rank".into()));
            }
            let generator_images =
                lattice.action.iter().map(permutation_images).collect::<Option<Vec<_>>>().ok_or_else(|| {
                    Error::Parse("basis labels given but an action matrix is not a permutation matrix".into())
                })?;
            lattice.tag = Some(PermutationBasisTag { labels: labels.clone(), generator_images });
        }
        Ok(lattice)
    }
}

/// The group named by a label when the generators are the standard ones for that
/// label, otherwise the closure of the generators.
fn named_group(label: &str, degree: usize, gens: &[Permutation]) -> Result<FiniteGroup> {
    let standard = label.split_once('_').and_then(|(f, n)| {
        let family: Family = f.parse().ok()?;
        let n: usize = n.parse().ok()?;
        (n == degree).then_some(family)
    });
    if let Some(family) = standard {
        let g = match family {
            Family::Symmetric => FiniteGroup::symmetric(degree)?,
            Family::Alternating => FiniteGroup::alternating(degree)?,
        };
        if g.generators() == gens {
            return Ok(g);
        }
    }
    Ok(FiniteGroup::from_generators(degree, gens.to_vec(), Some(label.to_string()))?)
}

fn permutation_images(m: &IntMatrix) -> Option<Vec<usize>> {
    let n = m.rows();
    let mut images = vec![usize::MAX; n];
    for j in 0..n {
        for i in 0..n {
            let x = m.get(i, j);
            if x.is_one() {
                if images[j] != usize::MAX {
                    return None;
                }
                images[j] = i;
            } else if !x.is_zero() {
                return None;
            }
        }
        if images[j] == usize::MAX {
            return None;
        }
    }
    let mut seen = vec![false; n];
    for &i in &images {
        if std::mem::replace(&mut seen[i], true) {
            return None;
        }
    }
    Some(images)
}

impl fmt::Debug for GLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GLattice(rank {} over {})", self.rank, self.group)
    }
}

/// JSON form of a lattice: group label, degree, generators in cycle notation, rank,
/// and one action matrix per generator.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeJson {
    pub group: String,
    pub degree: usize,
    pub generators: Vec<String>,
    pub rank: usize,
    pub action: Vec<IntMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_labels: Option<Vec<String>>,
}

impl Serialize for GLattice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// Coset action of `G` on `G/H`.
struct CosetAction {
    labels: Vec<String>,
    generator_images: Vec<Vec<usize>>,
    /// Index of the coset `H` itself.
    base: usize,
}

/// When `H` is the stabilizer of a letter `x` in a full symmetric or alternating group
/// on a support, the coset `gH` is identified with the letter `g(x)`; cosets are
/// ordered by that letter. This avoids enumerating `G`.
fn point_coset_action(g: &FiniteGroup, h: &Subgroup) -> Option<CosetAction> {
    let (fg, sg) = g.family()?;
    let (fh, sh) = h.family()?;
    if fg != fh || sh.len() + 1 != sg.len() || !sh.iter().all(|x| sg.binary_search(x).is_ok()) {
        return None;
    }
    if g.order() / h.order() != sg.len() as u128 || g.order() % h.order() != 0 {
        return None;
    }
    let pos: HashMap<usize, usize> = sg.iter().enumerate().map(|(i, &y)| (y, i)).collect();
    let labels = sg.iter().map(|y| y.to_string()).collect();
    let generator_images = g.generators().iter().map(|s| sg.iter().map(|&y| pos[&s.apply(y)]).collect()).collect();
    let x = *sg.iter().find(|y| sh.binary_search(y).is_err())?;
    Some(CosetAction { labels, generator_images, base: pos[&x] })
}

fn coset_action(g: &FiniteGroup, h: &Subgroup) -> Result<CosetAction> {
    if let Some(a) = point_coset_action(g, h) {
        return Ok(a);
    }
    let elements = g.sorted_elements()?;
    let h_elements = h.elements()?;
    let mut coset_of: HashMap<&Permutation, usize> = HashMap::with_capacity(elements.len());
    let mut reps: Vec<&Permutation> = Vec::new();
    let products: Vec<Permutation> =
        elements.iter().flat_map(|x| h_elements.iter().map(move |y| x.compose(y))).collect();
    let lookup: HashMap<&Permutation, usize> = elements.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let mut coset_idx = vec![usize::MAX; elements.len()];
    for (i, x) in elements.iter().enumerate() {
        if coset_idx[i] != usize::MAX {
            continue;
        }
        let c = reps.len();
        for y in &products[i * h_elements.len()..(i + 1) * h_elements.len()] {
            coset_idx[lookup[y]] = c;
        }
        reps.push(x);
    }
    for (i, x) in elements.iter().enumerate() {
        coset_of.insert(x, coset_idx[i]);
    }
    let labels = reps.iter().map(|r| format!("{}H", r.to_cycle_string())).collect();
    let generator_images =
        g.generators().iter().map(|s| reps.iter().map(|r| coset_of[&s.compose(r)]).collect()).collect();
    Ok(CosetAction { labels, generator_images, base: 0 })
}

/// `Z[G/H]` with its coset basis. Cosets are ordered by their lexicographically
/// smallest representative, or by letter for point stabilizers of `S_n` and `A_n`.
pub fn permutation_lattice(g: &FiniteGroup, h: &Subgroup) -> Result<GLattice> {
    Ok(permutation_lattice_with_base(g, h)?.0)
}

/// `Z[G/H]` together with the basis index of the coset `H`.
pub(crate) fn permutation_lattice_with_base(g: &FiniteGroup, h: &Subgroup) -> Result<(GLattice, usize)> {
    if !h.is_subgroup_of(g) {
        return Err(Error::NotSubgroup(format!("{h} is not a subgroup of {g}")));
    }
    let a = coset_action(g, h)?;
    let tag = PermutationBasisTag { labels: a.labels, generator_images: a.generator_images };
    Ok((GLattice::from_basis_permutations(g.clone(), tag), a.base))
}

/// Kernel of `M -> M'` given by a matrix, with the induced action, when the
/// kernel basis is `columns` of `inclusion` and `left` is a left inverse.
fn sublattice(m: &GLattice, inclusion: &IntMatrix, left: &IntMatrix) -> Result<GLattice> {
    let action = m.action.iter().map(|a| left.mul(&a.mul(inclusion)?)).collect::<Result<Vec<_>>>()?;
    Ok(GLattice { group: m.group.clone(), action, rank: inclusion.cols(), tag: None })
}

/// `0 -> I_{G/H} -> Z[G/H] -> Z -> 0` with kernel basis `e_i - e_r`.
pub fn augmentation_sequence(g: &FiniteGroup, h: &Subgroup) -> Result<AugmentationSequence> {
    augmentation_of(permutation_lattice(g, h)?)
}

/// The augmentation sequence of any permutation lattice, sending every basis
/// vector to 1.
pub fn augmentation_of(ambient: GLattice) -> Result<AugmentationSequence> {
    if ambient.tag.is_none() {
        return Err(Error::Unsupported("augmentation needs a permutation basis".into()));
    }
    let r = ambient.rank();
    if r == 0 {
        return Err(Error::Argument("augmentation of the zero lattice".into()));
    }
    let epsilon = IntMatrix::from_vec(1, r, vec![BigInt::one(); r])?;
    let mut inclusion = IntMatrix::zeros(r, r - 1);
    let mut left = IntMatrix::zeros(r - 1, r);
    for i in 0..r - 1 {
        inclusion.set(i, i, BigInt::one());
        inclusion.set(r - 1, i, -BigInt::one());
        left.set(i, i, BigInt::one());
    }
    let kernel = sublattice(&ambient, &inclusion, &left)?;
    Ok(AugmentationSequence { ambient, epsilon, kernel, inclusion })
}

/// `J_{G/H}`: the dual of the augmentation kernel.
pub fn norm_one_lattice(g: &FiniteGroup, h: &Subgroup) -> Result<GLattice> {
    augmentation_sequence(g, h)?.kernel.dual()
}

/// `J_X` for the permutation lattice `Z[X]` of a finite `G`-set.
pub fn norm_one_of(perm: &GLattice) -> Result<GLattice> {
    augmentation_of(perm.clone())?.kernel.dual()
}

/// Orbit decomposition of a tagged permutation lattice restricted to `p`:
/// distinct stabilizers (as element sets) with multiplicities, in order of first
/// appearance.
pub fn orbit_decomposition(m: &GLattice, p: &Subgroup) -> Result<Vec<OrbitClass>> {
    if m.tag.is_none() {
        return Err(Error::Unsupported("orbit decomposition needs a permutation basis".into()));
    }
    let restricted = m.restrict(p)?;
    let mut out: Vec<OrbitClass> = Vec::new();
    for orbit in restricted.basis_orbits()? {
        match out.iter_mut().find(|c| c.stabilizer == orbit.stabilizer) {
            Some(c) => c.multiplicity += 1,
            None => out.push(OrbitClass { stabilizer: orbit.stabilizer, multiplicity: 1 }),
        }
    }
    Ok(out)
}

/// Isomorphism of tagged permutation lattices over the same group: equal
/// multisets of orbit stabilizers up to conjugacy.
pub fn is_perm_isomorphic(a: &GLattice, b: &GLattice) -> Result<bool> {
    if a.tag.is_none() || b.tag.is_none() {
        return Err(Error::Unsupported("permutation isomorphism needs permutation bases".into()));
    }
    if a.group != b.group {
        return Err(Error::Argument("lattices over different groups".into()));
    }
    if a.rank != b.rank {
        return Ok(false);
    }
    let g = &a.group;
    let sa: Vec<Subgroup> = a.basis_orbits()?.into_iter().map(|o| o.stabilizer).collect();
    let mut sb: Vec<Option<Subgroup>> = b.basis_orbits()?.into_iter().map(|o| Some(o.stabilizer)).collect();
    if sa.len() != sb.len() {
        return Ok(false);
    }
    for x in &sa {
        let mut matched = false;
        for slot in sb.iter_mut() {
            if let Some(y) = slot {
                if g.are_conjugate(x, y)? {
                    *slot = None;
                    matched = true;
                    break;
                }
            }
        }
        if !matched {
            return Ok(false);
        }
    }
    Ok(true)
}

/// When `Z[G/H]` restricted to `p` is free of rank `t`, exhibits
/// `J_{G/H}|_P ≅ J_P ⊕ Z[P]^{t-1}` by an explicit unimodular basis change that
/// intertwines the actions of all generators of `p`.
pub fn free_restriction_decomposition(g: &FiniteGroup, h: &Subgroup, p: &Subgroup) -> Result<FreeRestriction> {
    free_decomposition(&permutation_lattice(g, h)?, p)
}

/// [`free_restriction_decomposition`] for the permutation lattice of any finite
/// `G`-set on which `p` acts freely.
pub fn free_decomposition(ambient: &GLattice, p: &Subgroup) -> Result<FreeRestriction> {
    let perm = ambient.restrict(p)?;
    let orbits = perm.basis_orbits()?;
    if let Some(o) = orbits.iter().find(|o| o.stabilizer.order() != 1) {
        return Err(Error::Unsupported(format!(
            "restriction is not free: an orbit has stabilizer {} of order {}",
            o.stabilizer,
            o.stabilizer.order()
        )));
    }
    let t = orbits.len();
    let r = perm.rank();
    let sorted = p.sorted_elements()?;
    let order = sorted.len();
    // Basis index of x·b_k, where b_k is the first point of orbit k.
    let mut index = vec![vec![0usize; order]; t];
    for (j, x) in sorted.iter().enumerate() {
        let images = perm.basis_permutation_of(x)?.expect("tagged");
        for (k, o) in orbits.iter().enumerate() {
            index[k][j] = images[o.points[0]];
        }
    }
    // Columns in Z[G/H]-coordinates: first I_P inside the last orbit, then the
    // differences of the other orbits with the last one.
    let mut columns: Vec<Vec<i64>> = Vec::with_capacity(r - 1);
    let unit = |i: usize| {
        let mut v = vec![0i64; r];
        v[i] = 1;
        v
    };
    let last = t - 1;
    for j in 0..order - 1 {
        let mut v = unit(index[last][j]);
        v[index[last][order - 1]] -= 1;
        columns.push(v);
    }
    for k in 0..last {
        for j in 0..order {
            let mut v = unit(index[k][j]);
            v[index[last][j]] -= 1;
            columns.push(v);
        }
    }
    // Coordinates in the kernel basis e_i - e_{r-1} are the first r - 1 entries.
    let mut b = IntMatrix::zeros(r - 1, r - 1);
    for (c, v) in columns.iter().enumerate() {
        for i in 0..r - 1 {
            b.set(i, c, BigInt::from(v[i]));
        }
    }
    if !is_unimodular(&b) {
        return Err(Error::Internal("free decomposition basis is not unimodular".into()));
    }
    // Dual basis change for J = I°: C = (B^T)^{-1}.
    let c = left_inverse(&b.transpose())?;
    let trivial = FiniteGroup::trivial(p.degree())?;
    let j_p = norm_one_lattice(p, &trivial)?;
    let regular_one = permutation_lattice(p, &trivial)?;
    let mut regular = GLattice::trivial(p.clone(), 0);
    regular.tag = Some(PermutationBasisTag { labels: vec![], generator_images: vec![vec![]; p.generators().len()] });
    for _ in 0..last {
        regular = regular.direct_sum(&regular_one)?;
    }
    let j = norm_one_of(ambient)?.restrict(p)?;
    let target = j_p.direct_sum(&regular)?;
    for ((x, a), d) in p.generators().iter().zip(j.action()).zip(target.action()) {
        if a.mul(&c)? != c.mul(d)? {
            return Err(Error::Internal(format!("basis change does not intertwine the action of {x}")));
        }
    }
    Ok(FreeRestriction { t, basis_change: c, j_p, regular })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(n: usize, s: &str) -> Permutation {
        Permutation::parse_cycles(n, s).unwrap()
    }

    #[test]
    fn coset_lattices() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let h = s3.point_stabilizer(3).unwrap();
        let m = permutation_lattice(&s3, &h).unwrap();
        assert_eq!(m.rank(), 3);
        let c = m.matrix_of(&perm(3, "(1 2 3)")).unwrap();
        assert_eq!(c, IntMatrix::permutation(&[1, 2, 0]));
        let whole = permutation_lattice(&s3, &s3).unwrap();
        assert_eq!(whole.rank(), 1);
        assert!(whole.action().iter().all(|a| a.is_identity()));
        let a4 = FiniteGroup::alternating(4).unwrap();
        let reg = permutation_lattice(&a4, &FiniteGroup::trivial(4).unwrap()).unwrap();
        assert_eq!(reg.rank(), 12);
        reg.check_homomorphism().unwrap();
    }

    #[test]
    fn norm_one_ranks_and_signs() {
        let s2 = FiniteGroup::symmetric(2).unwrap();
        let j = norm_one_lattice(&s2, &FiniteGroup::trivial(2).unwrap()).unwrap();
        assert_eq!(j.rank(), 1);
        assert_eq!(j.action()[0], IntMatrix::from_rows(&[[-1]]));
        let s5 = FiniteGroup::symmetric(5).unwrap();
        assert_eq!(norm_one_lattice(&s5, &s5.point_stabilizer(5).unwrap()).unwrap().rank(), 4);
    }

    #[test]
    fn dual_is_involution() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let h = s3.subgroup(vec![perm(3, "(1 2)")], None).unwrap();
        let j = norm_one_lattice(&s3, &h).unwrap();
        let back = j.dual().unwrap().dual().unwrap();
        assert_eq!(back.action(), j.action());
        j.check_homomorphism().unwrap();
    }
}
