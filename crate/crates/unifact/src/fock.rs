//! Discrete Fock spaces and classification onto Fock form.
//!
//! The space is graded by subsets F of the atom set: block F carries
//! `⊗_{f∈F} F_f` with the inner product scaled by `∏_{f∈F} ν({f})`. In the
//! orthonormal coordinates used here the scale is folded into the block
//! embeddings, so a vector with unweighted block components `x_F` has
//! coordinates `√w_F · x_F`. Blocks are ordered by (popcount, bitmask) and
//! multi-indices lexicographically with the first atom most significant.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorization::{FactorizationSpec, SiteSpec};
use crate::mat::{self, MatrixC, Tolerance};
use crate::spectrum::{self, SpectralResolution};
use crate::unital::{verdict_tol, UnitalSpec};

/// Maximum number of atoms for a Fock space.
pub const MAX_ATOMS: usize = 5;

/// One subset-indexed block of the grading.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub subset: u32,
    pub offset: usize,
    pub dim: usize,
    /// `∏_{f∈subset} ν({f})`.
    pub weight: f64,
}

/// Subset-graded Fock space over per-atom legs with positive masses.
#[derive(Debug, Clone, PartialEq)]
pub struct FockSpace {
    leg_dims: Vec<usize>,
    masses: Vec<f64>,
    blocks: Vec<Block>,
    total_dim: usize,
}

#[derive(Serialize, Deserialize)]
struct FockSpaceRepr {
    legs: Vec<usize>,
    masses: Vec<f64>,
    block_order: String,
}

impl Serialize for FockSpace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FockSpaceRepr {
            legs: self.leg_dims.clone(),
            masses: self.masses.clone(),
            block_order: "popcount-lex".into(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FockSpace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = FockSpaceRepr::deserialize(d)?;
        if r.block_order != "popcount-lex" {
            return Err(serde::de::Error::custom("unsupported block order"));
        }
        FockSpace::new(r.legs, r.masses).map_err(serde::de::Error::custom)
    }
}

impl FockSpace {
    pub fn new(leg_dims: Vec<usize>, masses: Vec<f64>) -> Result<Self> {
        if leg_dims.is_empty() || leg_dims.len() > MAX_ATOMS {
            return Err(Error::Capacity(format!(
                "atom count {} outside 1..={MAX_ATOMS}",
                leg_dims.len()
            )));
        }
        if leg_dims.len() != masses.len() {
            return Err(Error::Contract("one mass per atom required".into()));
        }
        if leg_dims.iter().any(|&l| l == 0) {
            return Err(Error::Contract("every leg must have dimension at least 1".into()));
        }
        if masses.iter().any(|&m| !m.is_finite() || m <= 0.0) {
            return Err(Error::Contract("masses must be strictly positive".into()));
        }
        let n = leg_dims.len();
        let mut subsets: Vec<u32> = (0..(1u32 << n)).collect();
        subsets.sort_by_key(|s| (s.count_ones(), *s));
        let mut blocks = Vec::with_capacity(subsets.len());
        let mut offset = 0usize;
        for subset in subsets {
            let mut dim = 1usize;
            let mut weight = 1.0f64;
            for (f, (&l, &m)) in leg_dims.iter().zip(&masses).enumerate() {
                if subset & (1 << f) != 0 {
                    dim *= l;
                    weight *= m;
                }
            }
            blocks.push(Block { subset, offset, dim, weight });
            offset += dim;
        }
        if offset > mat::DIM_CAP {
            return Err(Error::Capacity(format!(
                "Fock dimension {offset} exceeds the {} cap",
                mat::DIM_CAP
            )));
        }
        Ok(FockSpace { leg_dims, masses, blocks, total_dim: offset })
    }

    pub fn n_atoms(&self) -> usize {
        self.leg_dims.len()
    }

    pub fn leg_dims(&self) -> &[usize] {
        &self.leg_dims
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, subset: u32) -> &Block {
        self.blocks.iter().find(|b| b.subset == subset).expect("subset in range")
    }

    /// The vacuum: unit vector of the ∅ block.
    pub fn vacuum(&self) -> MatrixC {
        let mut v = MatrixC::zeros(self.total_dim, 1);
        v[(self.block(0).offset, 0)] = Complex64::ONE;
        v
    }

    /// Global coordinate of a block entry given per-atom leg indices for
    /// the atoms in the subset (ascending atom order, first atom most
    /// significant).
    pub fn index_of(&self, subset: u32, multi: &[usize]) -> usize {
        let block = self.block(subset);
        let mut idx = 0usize;
        let mut it = multi.iter();
        for (f, &l) in self.leg_dims.iter().enumerate() {
            if subset & (1 << f) != 0 {
                let m = *it.next().expect("one index per subset atom");
                debug_assert!(m < l);
                idx = idx * l + m;
            }
        }
        block.offset + idx
    }

    fn check_leg_shapes(&self, legs: &[MatrixC]) -> Result<()> {
        if legs.len() != self.n_atoms() {
            return Err(Error::Contract("one leg vector per atom required".into()));
        }
        for (v, &l) in legs.iter().zip(&self.leg_dims) {
            if v.rows() != l || v.cols() != 1 {
                return Err(Error::Contract("leg vector dimension mismatch".into()));
            }
        }
        Ok(())
    }

    /// Exponential vector `e(u) = ⊕_F ⊗_{f∈F} u_f` in the weighted
    /// orthonormal coordinates.
    pub fn exponential_vector(&self, legs: &[MatrixC]) -> Result<MatrixC> {
        self.check_leg_shapes(legs)?;
        let mut out = MatrixC::zeros(self.total_dim, 1);
        for block in &self.blocks {
            let mut component = MatrixC::identity(1);
            for (f, leg) in legs.iter().enumerate() {
                if block.subset & (1 << f) != 0 {
                    component = component.kron(leg)?;
                }
            }
            let scale = Complex64::new(block.weight.sqrt(), 0.0);
            for i in 0..block.dim {
                out[(block.offset + i, 0)] = component[(i, 0)] * scale;
            }
        }
        Ok(out)
    }

    /// First-chaos vector with the given per-atom components: the
    /// singleton blocks carry `√ν_p · u_p`, everything else is zero.
    pub fn first_chaos_vector(&self, legs: &[MatrixC]) -> Result<MatrixC> {
        self.check_leg_shapes(legs)?;
        let mut out = MatrixC::zeros(self.total_dim, 1);
        for (p, leg) in legs.iter().enumerate() {
            let block = self.block(1 << p);
            let scale = Complex64::new(block.weight.sqrt(), 0.0);
            for i in 0..block.dim {
                out[(block.offset + i, 0)] = leg[(i, 0)] * scale;
            }
        }
        Ok(out)
    }

    /// Closed-form exponential inner product `∏_α (1 + ν({α})⟨u_α,v_α⟩)`,
    /// asserted against the direct inner product of the assembled vectors.
    pub fn exp_inner_product(&self, u: &[MatrixC], v: &[MatrixC]) -> Result<Complex64> {
        self.check_leg_shapes(u)?;
        self.check_leg_shapes(v)?;
        let mut closed = Complex64::ONE;
        for ((uu, vv), &m) in u.iter().zip(v).zip(&self.masses) {
            closed *= Complex64::ONE + uu.dot(vv) * Complex64::new(m, 0.0);
        }
        let direct = self.exponential_vector(u)?.dot(&self.exponential_vector(v)?);
        let scale = 1.0 + closed.norm();
        if (closed - direct).norm() > 1e-8 * scale {
            return Err(Error::Inconsistency(format!(
                "exponential inner product closed form {closed} vs direct {direct}"
            )));
        }
        debug_assert!((closed - direct).norm() <= 1e-10 * scale);
        Ok(closed)
    }
}

/// Build a discrete Fock space together with its factorization view and
/// vacuum. The factorization acts on the Fock coordinates through the
/// bracket-opening permutation from the site picture with per-site
/// dimension `1 + leg_dim`.
pub fn build_dfock(
    leg_dims: Vec<usize>,
    masses: Vec<f64>,
) -> Result<(FockSpace, FactorizationSpec, MatrixC)> {
    let fock = FockSpace::new(leg_dims, masses)?;
    let perm = bracket_permutation(&fock);
    let sites = SiteSpec::new(fock.leg_dims.iter().map(|&l| l + 1).collect())?;
    let view = FactorizationSpec::from_sites_conjugated(sites, perm)?;
    let vacuum = fock.vacuum();
    Ok((fock, view, vacuum))
}

/// Permutation sending site coordinates (per-site index 0 = vacuum slot,
/// k>0 = leg basis vector k−1) to Fock coordinates.
fn bracket_permutation(fock: &FockSpace) -> MatrixC {
    let n = fock.n_atoms();
    let d = fock.total_dim;
    let mut perm = MatrixC::zeros(d, d);
    let site_dims: Vec<usize> = fock.leg_dims.iter().map(|&l| l + 1).collect();
    let mut site_index = vec![0usize; n];
    loop {
        let mut subset = 0u32;
        let mut multi = Vec::new();
        for (p, &i) in site_index.iter().enumerate() {
            if i > 0 {
                subset |= 1 << p;
                multi.push(i - 1);
            }
        }
        let fock_idx = fock.index_of(subset, &multi);
        let mut flat = 0usize;
        for (p, &i) in site_index.iter().enumerate() {
            flat = flat * site_dims[p] + i;
        }
        perm[(fock_idx, flat)] = Complex64::ONE;
        // odometer
        let mut pos = n;
        loop {
            if pos == 0 {
                return perm;
            }
            pos -= 1;
            site_index[pos] += 1;
            if site_index[pos] < site_dims[pos] {
                break;
            }
            site_index[pos] = 0;
            if pos == 0 {
                return perm;
            }
        }
    }
}

/// Exponential map on the first chaos: through the full-partition split,
/// `Exp(g) = ⊗_p (Ω_p + g_p)` with `g_p` the leg component of `φ_p(g)`.
///
/// The input must lie in the K=1 eigenspace sum; the output is certified
/// multiplicative.
pub fn exp_map(
    u: &UnitalSpec,
    r: &SpectralResolution,
    g: &MatrixC,
    tol: &Tolerance,
) -> Result<MatrixC> {
    let f = u.factorization();
    if g.rows() != f.ambient_dim() || g.cols() != 1 {
        return Err(Error::Contract("exp_map input has wrong shape".into()));
    }
    // First-chaos membership via the spectral support of μ_g. A
    // numerically zero input is in the chaos (Exp(0) = Ω).
    let g2 = g.norm() * g.norm();
    if g2 > tol.eq_tol * tol.eq_tol {
        let measure = spectrum::vector_measure(r, g, g)?;
        let off_mass: f64 = r
            .points()
            .iter()
            .zip(&measure)
            .filter(|(p, _)| p.label.count_ones() != 1)
            .map(|(_, m)| m.re)
            .sum();
        if off_mass > 1e-10 * g2 {
            return Err(Error::Contract(format!(
                "exp_map input is not in the first chaos (off-mass {off_mass:.3e})"
            )));
        }
    }
    let ps = u.partition_split(tol)?;
    let mut legs = Vec::with_capacity(ps.leg_dims.len());
    for (p, &dim) in ps.leg_dims.iter().enumerate() {
        let phi_g = u.phi_apply(f.atom_masks()[p], g)?;
        let (comp, off) = ps.leg_component(p, &phi_g);
        if off > verdict_tol(tol) * (1.0 + g.norm()) {
            return Err(Error::Inconsistency(format!(
                "φ_p(g) does not sit on leg {p} (off-component {off:.3e})"
            )));
        }
        let mut leg = MatrixC::zeros(dim, 1);
        leg[(0, 0)] = Complex64::ONE; // Ω_p
        let exp_leg = leg.add(&comp);
        legs.push(exp_leg);
    }
    let out = ps.assemble(&legs)?;
    if g.norm() <= tol.eq_tol {
        let dev = out.sub(u.omega()).norm();
        if dev > verdict_tol(tol) {
            return Err(Error::Inconsistency(format!("Exp(0) deviates from Ω by {dev:.3e}")));
        }
    }
    if !u.is_multiplicative(&out, tol)? {
        return Err(Error::Inconsistency("Exp output is not multiplicative".into()));
    }
    Ok(out)
}

/// Classification certificate: the discrete Fock space, the unitary
/// `Fock → H`, and the worst deviations observed while certifying it.
#[derive(Debug)]
pub struct Classification {
    pub fock: FockSpace,
    /// Maps Fock coordinates to the ambient space; vacuum ↦ Ω.
    pub unitary: MatrixC,
    pub vacuum_deviation: f64,
    /// Worst `‖U e(u) − Exp(g)‖` over the sampled spanning set.
    pub exp_deviation: f64,
    /// Worst span deviation of `U* F_A U` against the Fock factor.
    pub conjugation_deviation: f64,
}

/// Classify a unital factorization onto discrete Fock form: legs
/// `dim H_p − 1` with unit masses, the unitary assembled from the
/// full-partition split and the bracket-opening permutation. Certifies
/// vacuum ↦ Ω, `e(g) ↦ Exp(g)` on a seeded spanning set, and the factor
/// conjugation `U* F_A U =` Fock factor for every subset.
pub fn classify_to_fock(
    u: &UnitalSpec,
    r: &SpectralResolution,
    seed: u64,
    tol: &Tolerance,
) -> Result<Classification> {
    use rand::SeedableRng;
    let f = u.factorization();
    let d = f.ambient_dim();
    let ps = u.partition_split(tol)?;
    let leg_dims: Vec<usize> = ps.leg_dims.iter().map(|&g| g - 1).collect();
    if leg_dims.iter().any(|&l| l == 0) {
        return Err(Error::Contract("classification needs every leg at least 2-dimensional".into()));
    }
    let fock = FockSpace::new(leg_dims.clone(), vec![1.0; leg_dims.len()])?;
    if fock.total_dim() != d {
        return Err(Error::Inconsistency("Fock dimension does not match the ambient".into()));
    }
    // U column at a Fock index = partition-split column at the matching
    // site multi-index (0 = local unit slot).
    let mut unitary = MatrixC::zeros(d, d);
    let mut site_index = vec![0usize; fock.n_atoms()];
    'outer: loop {
        let mut subset = 0u32;
        let mut multi = Vec::new();
        let mut flat = 0usize;
        for (p, &i) in site_index.iter().enumerate() {
            if i > 0 {
                subset |= 1 << p;
                multi.push(i - 1);
            }
            flat = flat * ps.leg_dims[p] + i;
        }
        let fock_idx = fock.index_of(subset, &multi);
        for row in 0..d {
            unitary[(row, fock_idx)] = ps.unitary[(row, flat)];
        }
        let mut pos = fock.n_atoms();
        loop {
            if pos == 0 {
                break 'outer;
            }
            pos -= 1;
            site_index[pos] += 1;
            if site_index[pos] < ps.leg_dims[pos] {
                break;
            }
            site_index[pos] = 0;
            if pos == 0 {
                break 'outer;
            }
        }
    }

    let band = verdict_tol(tol);
    let vacuum_deviation = unitary.mul(&fock.vacuum()).sub(u.omega()).norm();
    if vacuum_deviation > band {
        return Err(Error::Inconsistency(format!(
            "classification does not send the vacuum to Ω (deviation {vacuum_deviation:.3e})"
        )));
    }

    // e(g) ↦ Exp(g) on a seeded sample of first-chaos directions.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut exp_deviation = 0.0f64;
    for _ in 0..5 {
        let legs: Vec<MatrixC> = fock
            .leg_dims()
            .iter()
            .map(|&l| mat::random_gaussian(l, 1, &mut rng).scale(Complex64::new(0.5, 0.0)))
            .collect();
        let e_fock = fock.exponential_vector(&legs)?;
        let lhs = unitary.mul(&e_fock);
        let g = unitary.mul(&fock.first_chaos_vector(&legs)?);
        let rhs = exp_map(u, r, &g, tol)?;
        exp_deviation = exp_deviation.max(lhs.sub(&rhs).norm());
    }
    if exp_deviation > band {
        return Err(Error::Inconsistency(format!(
            "classification does not intertwine e(g) with Exp(g) (deviation {exp_deviation:.3e})"
        )));
    }

    // Factor conjugation: U* F_A U spans the Fock-side factor.
    let perm = bracket_permutation(&fock);
    let site_view = FactorizationSpec::from_sites_conjugated(
        SiteSpec::new(fock.leg_dims().iter().map(|&l| l + 1).collect())?,
        perm,
    )?;
    let mut conjugation_deviation = 0.0f64;
    let _ = tol;
    for mask in f.all_masks() {
        let ours = f.factor_of(mask)?;
        // Unitary conjugation is a Hilbert–Schmidt isometry, so the
        // conjugated basis is still orthonormal; no re-orthonormalization.
        let conj: Vec<MatrixC> = ours
            .basis()
            .iter()
            .map(|b| unitary.adjoint().mul(&b.mul(&unitary)).vec())
            .collect();
        let target = site_view.factor_of(mask)?;
        let dev = mat::span_deviation(&MatrixC::from_columns(&conj), &target.span_matrix());
        conjugation_deviation = conjugation_deviation.max(dev);
    }
    if conjugation_deviation > band {
        return Err(Error::Inconsistency(format!(
            "classification does not conjugate the factors onto Fock form \
             (deviation {conjugation_deviation:.3e})"
        )));
    }

    Ok(Classification { fock, unitary, vacuum_deviation, exp_deviation, conjugation_deviation })
}
