//! Boolean algebras of factors from site decompositions `H = ⊗_p H_p`.
//!
//! A subset `A` of the sites indexes the factor `F_A` acting as the full
//! matrix algebra on the legs in `A` and as scalars elsewhere. Subsets are
//! bitmasks, bit i = site i (0-indexed, little-endian). An optional global
//! unitary frame conjugates the whole family, which is how scrambled test
//! instances are produced.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{self, AlgebraBasis};
use crate::error::{Error, Result};
use crate::mat::{self, MatrixC, Tolerance};

/// Maximum number of tensor sites.
pub const MAX_SITES: usize = 6;

/// Per-site dimensions of a tensor decomposition, in canonical leg order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteSpec {
    dims: Vec<usize>,
}

impl SiteSpec {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.len() > MAX_SITES {
            return Err(Error::Capacity(format!(
                "site count {} outside 1..={MAX_SITES}",
                dims.len()
            )));
        }
        if dims.iter().any(|&d| d < 2) {
            return Err(Error::Contract("every site dimension must be at least 2".into()));
        }
        let ambient: usize = dims.iter().product();
        if ambient > mat::DIM_CAP {
            return Err(Error::Capacity(format!(
                "ambient dimension {ambient} exceeds the {} cap",
                mat::DIM_CAP
            )));
        }
        Ok(SiteSpec { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_sites(&self) -> usize {
        self.dims.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dims.iter().product()
    }
}

/// The Boolean-indexed family of factors generated by a site decomposition,
/// materialized lazily per subset and cached.
#[derive(Debug)]
pub struct FactorizationSpec {
    sites: SiteSpec,
    frame: Option<MatrixC>,
    cache: RwLock<HashMap<u32, Arc<AlgebraBasis>>>,
}

impl FactorizationSpec {
    /// The factorization attached to `H = ⊗_p H_p`.
    pub fn from_sites(sites: SiteSpec) -> Self {
        FactorizationSpec { sites, frame: None, cache: RwLock::new(HashMap::new()) }
    }

    /// Same family conjugated by a global unitary.
    pub fn from_sites_conjugated(sites: SiteSpec, frame: MatrixC) -> Result<Self> {
        let d = sites.ambient_dim();
        if frame.rows() != d || frame.cols() != d {
            return Err(Error::Contract("frame unitary has wrong shape".into()));
        }
        let gram = frame.adjoint().mul(&frame);
        if gram.sub(&MatrixC::identity(d)).norm() > 1e-9 * d as f64 {
            return Err(Error::Contract("frame matrix is not unitary".into()));
        }
        Ok(FactorizationSpec { sites, frame: Some(frame), cache: RwLock::new(HashMap::new()) })
    }

    /// Scramble with a seeded Haar-like unitary.
    pub fn from_sites_scrambled(sites: SiteSpec, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = mat::random_unitary(sites.ambient_dim(), &mut rng);
        FactorizationSpec { sites, frame: Some(u), cache: RwLock::new(HashMap::new()) }
    }

    pub fn sites(&self) -> &SiteSpec {
        &self.sites
    }

    pub fn frame(&self) -> Option<&MatrixC> {
        self.frame.as_ref()
    }

    pub fn ambient_dim(&self) -> usize {
        self.sites.ambient_dim()
    }

    pub fn n_sites(&self) -> usize {
        self.sites.n_sites()
    }

    /// Bitmask of the full atom set.
    pub fn full_mask(&self) -> u32 {
        (1u32 << self.n_sites()) - 1
    }

    pub fn complement(&self, mask: u32) -> u32 {
        self.full_mask() & !mask
    }

    /// All subset masks in increasing numeric order.
    pub fn all_masks(&self) -> Vec<u32> {
        (0..=self.full_mask()).collect()
    }

    /// Singleton masks, one per site.
    pub fn atom_masks(&self) -> Vec<u32> {
        (0..self.n_sites()).map(|i| 1u32 << i).collect()
    }

    /// The factor indexed by a subset of sites.
    pub fn factor_of(&self, mask: u32) -> Result<Arc<AlgebraBasis>> {
        if mask > self.full_mask() {
            return Err(Error::Contract(format!("subset mask {mask:#b} out of range")));
        }
        if let Some(hit) = self.cache.read().expect("cache lock").get(&mask) {
            return Ok(Arc::clone(hit));
        }
        let built = Arc::new(self.build_factor(mask)?);
        let mut w = self.cache.write().expect("cache lock");
        Ok(Arc::clone(w.entry(mask).or_insert(built)))
    }

    fn build_factor(&self, mask: u32) -> Result<AlgebraBasis> {
        let d = self.ambient_dim();
        // Tensor the per-site HS-orthonormal bases in site order: matrix
        // units on sites in the subset, normalized identity elsewhere.
        let mut elements: Vec<MatrixC> = vec![MatrixC::identity(1)];
        for (p, &dp) in self.sites.dims().iter().enumerate() {
            let site_basis: Vec<MatrixC> = if mask & (1 << p) != 0 {
                AlgebraBasis::full(dp).basis().to_vec()
            } else {
                vec![MatrixC::identity(dp).scale(Complex64::new(1.0 / (dp as f64).sqrt(), 0.0))]
            };
            let mut next = Vec::with_capacity(elements.len() * site_basis.len());
            for e in &elements {
                for s in &site_basis {
                    next.push(e.kron(s)?);
                }
            }
            elements = next;
        }
        if let Some(u) = &self.frame {
            let uh = u.adjoint();
            elements = elements.iter().map(|b| u.mul(b).mul(&uh)).collect();
        }
        debug_assert!(elements.iter().all(|b| b.rows() == d));
        AlgebraBasis::from_parts(d, elements)
    }
}

/// One verified law with its worst observed deviation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LawCheck {
    pub law: String,
    pub max_deviation: f64,
    pub pass: bool,
}

/// Outcome of [`verify_factorization`]; violations are entries, never
/// exceptions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LawReport {
    pub checks: Vec<LawCheck>,
}

impl LawReport {
    pub fn new() -> Self {
        LawReport { checks: Vec::new() }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn push(&mut self, law: &str, max_deviation: f64, threshold: f64) {
        self.checks.push(LawCheck {
            law: law.to_string(),
            max_deviation,
            pass: max_deviation <= threshold,
        });
    }
}

impl Default for LawReport {
    fn default() -> Self {
        Self::new()
    }
}

/// Check the defining laws of a factorization on the given family:
/// every element a factor, involution (commutant = complement), closure of
/// meet/join within the family, and distributivity as span equalities.
///
/// With at most 16 index elements every triple is checked; beyond that a
/// seeded random sample of 50 triples drives the whole bundle (factor and
/// involution on the masks the triples touch, closure on their pairs,
/// distributivity on the triples).
pub fn verify_factorization(f: &FactorizationSpec, tol: &Tolerance) -> Result<LawReport> {
    verify_factorization_seeded(f, tol, algebra::DEFAULT_SEED)
}

pub fn verify_factorization_seeded(
    f: &FactorizationSpec,
    tol: &Tolerance,
    seed: u64,
) -> Result<LawReport> {
    let threshold = 10.0 * tol.eq_tol;
    let masks = f.all_masks();
    let mut report = LawReport::new();

    let key = |a: u32, b: u32| if a <= b { (a, b) } else { (b, a) };
    let triples: Vec<(u32, u32, u32)> = if masks.len() <= 16 {
        let mut all = Vec::new();
        for &x in &masks {
            for &y in &masks {
                for &z in &masks {
                    if y <= z {
                        all.push((x, y, z));
                    }
                }
            }
        }
        all
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..50)
            .map(|_| {
                let mut pick = || masks[rng.random_range(0..masks.len())];
                let x = pick();
                let (y, z) = (pick(), pick());
                if y <= z {
                    (x, y, z)
                } else {
                    (x, z, y)
                }
            })
            .collect()
    };
    // Masks and pairs the triple sample touches (everything, in the
    // exhaustive case). Complements come along for the involution law.
    let mut touched: Vec<u32> = Vec::new();
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for &(x, y, z) in &triples {
        for m in [x, y, z, f.complement(x), f.complement(y), f.complement(z)] {
            if !touched.contains(&m) {
                touched.push(m);
            }
        }
        for p in [key(y, z), key(x, y), key(x, z)] {
            if !pairs.contains(&p) {
                pairs.push(p);
            }
        }
    }
    touched.sort_unstable();
    pairs.sort_unstable();

    // Factor property; the deviation counts excess center dimensions.
    let mut worst_center = 0.0f64;
    for &m in &touched {
        let x = f.factor_of(m)?;
        let cert = algebra::is_factor(&x, tol)?;
        worst_center = worst_center.max((cert.center_dim as f64) - 1.0);
    }
    report.push("factor", worst_center, 0.5);

    // Involution: commutant(F_A) = F_{A^c}.
    let mut worst_inv = 0.0f64;
    for &m in &touched {
        let x = f.factor_of(m)?;
        let xp = algebra::commutant(&x, tol)?;
        let target = f.factor_of(f.complement(m))?;
        worst_inv = worst_inv.max(mat::span_deviation(&xp.span_matrix(), &target.span_matrix()));
    }
    report.push("involution", worst_inv, threshold);

    // Closure of meets and joins within the family, computed numerically
    // per pair and compared against the canonical member.
    let mut meets: HashMap<(u32, u32), AlgebraBasis> = HashMap::new();
    let mut joins: HashMap<(u32, u32), AlgebraBasis> = HashMap::new();
    let mut worst_meet = 0.0f64;
    let mut worst_join = 0.0f64;
    for &(a, b) in &pairs {
        let x = f.factor_of(a)?;
        let y = f.factor_of(b)?;
        let m = algebra::meet_algebras(&x, &y, tol)?;
        let j = algebra::join_algebras(&x, &y, tol)?;
        worst_meet = worst_meet
            .max(mat::span_deviation(&m.span_matrix(), &f.factor_of(a & b)?.span_matrix()));
        worst_join = worst_join
            .max(mat::span_deviation(&j.span_matrix(), &f.factor_of(a | b)?.span_matrix()));
        meets.insert((a, b), m);
        joins.insert((a, b), j);
    }
    report.push("meet-closure", worst_meet, threshold);
    report.push("join-closure", worst_join, threshold);

    // Distributivity x∧(y∨z) = (x∧y)∨(x∧z) on the computed objects.
    let mut worst_dist = 0.0f64;
    for &(x, y, z) in &triples {
        let fx = f.factor_of(x)?;
        let lhs = algebra::meet_algebras(&fx, &joins[&key(y, z)], tol)?;
        let rhs = algebra::join_algebras(&meets[&key(x, y)], &meets[&key(x, z)], tol)?;
        worst_dist = worst_dist.max(mat::span_deviation(&lhs.span_matrix(), &rhs.span_matrix()));
    }
    report.push("distributivity", worst_dist, threshold);

    Ok(report)
}

/// Product of two factorizations: sites concatenated, index the disjoint
/// union, factors respecting the Kronecker block structure.
pub fn product_factorization(
    f1: &FactorizationSpec,
    f2: &FactorizationSpec,
) -> Result<FactorizationSpec> {
    let mut dims = f1.sites().dims().to_vec();
    dims.extend_from_slice(f2.sites().dims());
    let sites = SiteSpec::new(dims)?;
    match (&f1.frame, &f2.frame) {
        (None, None) => Ok(FactorizationSpec::from_sites(sites)),
        (a, b) => {
            let ua = a.clone().unwrap_or_else(|| MatrixC::identity(f1.ambient_dim()));
            let ub = b.clone().unwrap_or_else(|| MatrixC::identity(f2.ambient_dim()));
            FactorizationSpec::from_sites_conjugated(sites, ua.kron(&ub)?)
        }
    }
}

/// Sites and unit vector of the `L²` space of a finite product probability.
///
/// Site `p` gets one dimension per outcome; in the orthonormal basis
/// `e_ω = 1_ω/√p(ω)` the constant-one function reads `(√p(ω))_ω`, and the
/// global unit is the tensor product of those site vectors.
pub fn build_from_product_probability(
    outcome_probs: &[Vec<f64>],
) -> Result<(FactorizationSpec, MatrixC)> {
    if outcome_probs.is_empty() {
        return Err(Error::Contract("at least one probability vector required".into()));
    }
    for probs in outcome_probs {
        if probs.len() < 2 {
            return Err(Error::Contract(
                "each site needs at least two outcomes with positive probability".into(),
            ));
        }
        if probs.iter().any(|&p| p <= 0.0) {
            return Err(Error::Contract("outcome probabilities must be strictly positive".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Contract(format!("outcome probabilities sum to {total}, expected 1")));
        }
    }
    let sites = SiteSpec::new(outcome_probs.iter().map(|p| p.len()).collect())?;
    let mut omega = MatrixC::identity(1);
    for probs in outcome_probs {
        let site_unit = MatrixC::col_vec_real(&probs.iter().map(|p| p.sqrt()).collect::<Vec<_>>());
        omega = omega.kron(&site_unit)?;
    }
    Ok((FactorizationSpec::from_sites(sites), omega))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::span_deviation;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn single_site_family() {
        let f = FactorizationSpec::from_sites(SiteSpec::new(vec![2]).unwrap());
        assert_eq!(f.factor_of(0b0).unwrap().dim(), 1);
        assert_eq!(f.factor_of(0b1).unwrap().dim(), 4);
        let report = verify_factorization(&f, &tol()).unwrap();
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn two_sites_leg_factor() {
        let f = FactorizationSpec::from_sites(SiteSpec::new(vec![2, 2]).unwrap());
        // F_{site 0} = M₂⊗I₂
        let x = f.factor_of(0b01).unwrap();
        assert_eq!(x.dim(), 4);
        let mut gens = Vec::new();
        for b in AlgebraBasis::full(2).basis() {
            gens.push(b.kron(&MatrixC::identity(2)).unwrap());
        }
        let expected = algebra::generate_algebra(4, &gens, &tol()).unwrap();
        assert!(span_deviation(&x.span_matrix(), &expected.span_matrix()) < 1e-10);
    }

    #[test]
    fn mixed_dims_second_leg() {
        let f = FactorizationSpec::from_sites(SiteSpec::new(vec![2, 3]).unwrap());
        let y = f.factor_of(0b10).unwrap();
        assert_eq!(y.dim(), 9);
        // brute-force: commutant of I₂⊗M₃ is M₂⊗I₃
        let yp = algebra::commutant(&y, &tol()).unwrap();
        assert_eq!(yp.dim(), 4);
        assert!(
            span_deviation(&yp.span_matrix(), &f.factor_of(0b01).unwrap().span_matrix()) < 1e-9
        );
    }

    #[test]
    fn verify_passes_on_sites_22() {
        let f = FactorizationSpec::from_sites(SiteSpec::new(vec![2, 2]).unwrap());
        let report = verify_factorization(&f, &tol()).unwrap();
        assert!(report.all_pass(), "{report:?}");
        for check in &report.checks {
            assert!(check.max_deviation < 1e-9, "{check:?}");
        }
    }

    #[test]
    fn non_factor_family_detected() {
        // The diagonal algebra on dim 2 has a two-dimensional center, so a
        // family containing it fails "consisting of factors".
        let diag = algebra::generate_algebra(
            2,
            &[MatrixC::from_fn(2, 2, |i, j| {
                if i == j {
                    Complex64::new((i + 1) as f64, 0.0)
                } else {
                    Complex64::ZERO
                }
            })],
            &tol(),
        )
        .unwrap();
        let cert = algebra::is_factor(&diag, &tol()).unwrap();
        assert!(!cert.is_factor);
        assert_eq!(cert.center_dim, 2);
    }

    #[test]
    fn product_matches_from_sites() {
        let f1 = FactorizationSpec::from_sites(SiteSpec::new(vec![2]).unwrap());
        let f2 = FactorizationSpec::from_sites(SiteSpec::new(vec![2]).unwrap());
        let prod = product_factorization(&f1, &f2).unwrap();
        assert_eq!(prod.sites().dims(), &[2, 2]);
        let direct = FactorizationSpec::from_sites(SiteSpec::new(vec![2, 2]).unwrap());
        for mask in prod.all_masks() {
            let dev = span_deviation(
                &prod.factor_of(mask).unwrap().span_matrix(),
                &direct.factor_of(mask).unwrap().span_matrix(),
            );
            assert!(dev < 1e-12);
        }
    }

    #[test]
    fn product_counts_factors() {
        let f1 = FactorizationSpec::from_sites(SiteSpec::new(vec![2, 2]).unwrap());
        let f2 = FactorizationSpec::from_sites(SiteSpec::new(vec![3]).unwrap());
        let prod = product_factorization(&f1, &f2).unwrap();
        assert_eq!(prod.ambient_dim(), 12);
        assert_eq!(prod.all_masks().len(), 8);
    }

    #[test]
    fn rejects_degenerate_sites() {
        assert!(SiteSpec::new(vec![2, 1]).is_err());
        assert!(SiteSpec::new(vec![]).is_err());
        assert!(SiteSpec::new(vec![2; 7]).is_err());
    }

    #[test]
    fn product_probability_fair_coin() {
        let (f, omega) = build_from_product_probability(&[vec![0.5, 0.5]]).unwrap();
        assert_eq!(f.sites().dims(), &[2]);
        let s = 0.5f64.sqrt();
        assert!((omega[(0, 0)].re - s).abs() < 1e-15);
        assert!((omega[(1, 0)].re - s).abs() < 1e-15);
    }

    #[test]
    fn product_probability_two_fair_coins() {
        let (f, omega) = build_from_product_probability(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert_eq!(f.ambient_dim(), 4);
        for i in 0..4 {
            assert!((omega[(i, 0)].re - 0.5).abs() < 1e-15);
        }
        assert!((omega.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_probability_rejects_degenerate() {
        assert!(build_from_product_probability(&[vec![1.0, 0.0]]).is_err());
        assert!(build_from_product_probability(&[vec![0.7, 0.2]]).is_err());
    }

    #[test]
    fn boolean_isomorphism_on_masks() {
        let f = FactorizationSpec::from_sites(SiteSpec::new(vec![2, 2]).unwrap());
        for &a in &f.all_masks() {
            for &b in &f.all_masks() {
                let x = f.factor_of(a).unwrap();
                let y = f.factor_of(b).unwrap();
                let m = algebra::meet_algebras(&x, &y, &tol()).unwrap();
                assert!(
                    span_deviation(&m.span_matrix(), &f.factor_of(a & b).unwrap().span_matrix())
                        < 1e-8
                );
            }
        }
    }

    #[test]
    fn scrambled_family_still_verifies() {
        let f = FactorizationSpec::from_sites_scrambled(SiteSpec::new(vec![2, 2]).unwrap(), 99);
        let report = verify_factorization(&f, &tol()).unwrap();
        assert!(report.all_pass(), "{report:?}");
    }
}
