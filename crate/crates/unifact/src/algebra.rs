//! Finite-dimensional von Neumann algebras.
//!
//! An algebra is stored as a Hilbert–Schmidt-orthonormal spanning set of
//! d×d matrices whose span contains the identity and is closed under
//! adjoints and products. Meets and joins are then pure subspace
//! operations on the vectorized spans; the commutant is a structured
//! nullspace computation.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::{self, MatrixC, SubspaceMode, Tolerance};

/// Default seed for the randomized certificate searches.
pub const DEFAULT_SEED: u64 = 0xF0CC;

/// A *-subalgebra of the operators on a finite-dimensional Hilbert space,
/// represented by an HS-orthonormal basis.
#[derive(Debug, Clone, Serialize)]
pub struct AlgebraBasis {
    ambient_dim: usize,
    basis: Vec<MatrixC>,
}

impl<'de> Deserialize<'de> for AlgebraBasis {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            ambient_dim: usize,
            basis: Vec<MatrixC>,
        }
        let r = Repr::deserialize(deserializer)?;
        AlgebraBasis::from_parts(r.ambient_dim, r.basis).map_err(serde::de::Error::custom)
    }
}

/// Outcome of the factor tests, optionally with a minimal projection and a
/// tensor-split certificate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorCertificate {
    pub is_factor: bool,
    pub center_dim: usize,
    pub minimal_projection: Option<MatrixC>,
    pub split: Option<SplitCertificate>,
}

/// Unitary realizing the ambient space as `ℂ^g ⊗ ℂ^{g'}` with the algebra
/// acting on the first leg.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitCertificate {
    pub unitary: MatrixC,
    pub dim_g: usize,
    pub dim_g_prime: usize,
}

impl AlgebraBasis {
    /// Light-validation constructor for deserialized or hand-built bases.
    /// Shape and orthonormality are checked; closure is the caller's
    /// responsibility (see [`certify`](Self::certify)).
    pub fn from_parts(ambient_dim: usize, basis: Vec<MatrixC>) -> Result<Self> {
        let tol = Tolerance::default();
        for b in &basis {
            if b.rows() != ambient_dim || b.cols() != ambient_dim {
                return Err(Error::Contract("algebra basis element has wrong shape".into()));
            }
        }
        let alg = AlgebraBasis { ambient_dim, basis };
        for i in 0..alg.basis.len() {
            for j in i..alg.basis.len() {
                let g = alg.basis[i].dot(&alg.basis[j]);
                let expected = if i == j { Complex64::ONE } else { Complex64::ZERO };
                if (g - expected).norm() > 100.0 * tol.eq_tol {
                    return Err(Error::Contract("algebra basis is not HS-orthonormal".into()));
                }
            }
        }
        Ok(alg)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Linear dimension of the algebra.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[MatrixC] {
        &self.basis
    }

    /// Scalar multiples of the identity.
    pub fn scalars(ambient_dim: usize) -> Self {
        let scale = Complex64::new(1.0 / (ambient_dim as f64).sqrt(), 0.0);
        AlgebraBasis { ambient_dim, basis: vec![MatrixC::identity(ambient_dim).scale(scale)] }
    }

    /// All bounded operators, spanned by the matrix units.
    pub fn full(ambient_dim: usize) -> Self {
        let mut basis = Vec::with_capacity(ambient_dim * ambient_dim);
        for i in 0..ambient_dim {
            for j in 0..ambient_dim {
                let mut e = MatrixC::zeros(ambient_dim, ambient_dim);
                e[(i, j)] = Complex64::ONE;
                basis.push(e);
            }
        }
        AlgebraBasis { ambient_dim, basis }
    }

    /// d²×k matrix whose columns are the vectorized basis elements.
    pub fn span_matrix(&self) -> MatrixC {
        let cols: Vec<MatrixC> = self.basis.iter().map(|b| b.vec()).collect();
        MatrixC::from_columns(&cols)
    }

    /// Residual of `m` against the span, relative to `1+‖m‖`.
    pub fn membership_residual(&self, m: &MatrixC) -> f64 {
        let mut r = m.clone();
        for b in &self.basis {
            let c = b.dot(&r);
            r = r.sub(&b.scale(c));
        }
        r.norm() / (1.0 + m.norm())
    }

    pub fn contains(&self, m: &MatrixC, tol: &Tolerance) -> bool {
        self.membership_residual(m) <= tol.eq_tol
    }

    /// Orthogonal projection of `m` onto the span.
    pub fn project(&self, m: &MatrixC) -> MatrixC {
        let mut out = MatrixC::zeros(self.ambient_dim, self.ambient_dim);
        for b in &self.basis {
            out = out.add(&b.scale(b.dot(m)));
        }
        out
    }

    /// Full invariant check: identity in span, adjoint and product closure,
    /// orthonormal Gram. Quadratic in the basis size; meant for tests and
    /// spot checks, not hot paths.
    pub fn certify(&self, tol: &Tolerance) -> Result<()> {
        let id = MatrixC::identity(self.ambient_dim);
        if self.membership_residual(&id) > tol.eq_tol {
            return Err(Error::Contract("identity not in algebra span".into()));
        }
        for b in &self.basis {
            if self.membership_residual(&b.adjoint()) > tol.eq_tol {
                return Err(Error::Contract("algebra span not closed under adjoints".into()));
            }
        }
        for bi in &self.basis {
            for bj in &self.basis {
                if self.membership_residual(&bi.mul(bj)) > 10.0 * tol.eq_tol {
                    return Err(Error::Contract("algebra span not closed under products".into()));
                }
            }
        }
        for i in 0..self.basis.len() {
            for j in i..self.basis.len() {
                let g = self.basis[i].dot(&self.basis[j]);
                let expected = if i == j { Complex64::ONE } else { Complex64::ZERO };
                if (g - expected).norm() > tol.eq_tol {
                    return Err(Error::Contract("algebra basis Gram is not the identity".into()));
                }
            }
        }
        Ok(())
    }
}

/// Smallest *-algebra containing the identity and the given generators,
/// computed by alternating product expansion and re-orthonormalization
/// until the dimension stabilizes.
pub fn generate_algebra(
    ambient_dim: usize,
    generators: &[MatrixC],
    tol: &Tolerance,
) -> Result<AlgebraBasis> {
    if ambient_dim == 0 || ambient_dim > mat::DIM_CAP {
        return Err(Error::Capacity(format!("ambient dimension {ambient_dim} out of range")));
    }
    for g in generators {
        if g.rows() != ambient_dim || g.cols() != ambient_dim {
            return Err(Error::Contract("generator has wrong shape".into()));
        }
    }
    let full_dim = ambient_dim * ambient_dim;
    let mut seedset: Vec<MatrixC> = vec![MatrixC::identity(ambient_dim)];
    for g in generators {
        seedset.push(g.clone());
        seedset.push(g.adjoint());
    }
    let mut basis: Vec<MatrixC> = Vec::new();
    mat::extend_orthonormal(&mut basis, &seedset, tol);

    let mut frontier_start = 0;
    let max_iters = 2 * full_dim;
    for _ in 0..max_iters {
        if basis.len() == full_dim {
            break;
        }
        // Products involving at least one element new since the last round.
        let mut products = Vec::new();
        let old_len = basis.len();
        for i in 0..old_len {
            for j in 0..old_len {
                if i < frontier_start && j < frontier_start {
                    continue;
                }
                products.push(basis[i].mul(&basis[j]));
            }
        }
        mat::extend_orthonormal_capped(&mut basis, &products, tol, full_dim);
        if basis.len() == old_len {
            return Ok(AlgebraBasis { ambient_dim, basis });
        }
        frontier_start = old_len;
    }
    if basis.len() == full_dim {
        return Ok(AlgebraBasis { ambient_dim, basis });
    }
    Err(Error::Internal("algebra closure failed to stabilize".into()))
}

/// Commutant `{Y : YB = BY for every basis element B}`.
///
/// The working set starts from the commutant of a single Hermitian
/// element of the algebra — its eigencluster block spaces, obtained from a
/// d×d eigensolve — which contains the commutant of the whole algebra.
/// The commutation constraints are then applied one basis element at a
/// time, restricting the set through the nullspace of the commutator
/// action. This computes the same space as the one-shot stacked
/// nullspace, with far smaller intermediates.
pub fn commutant(x: &AlgebraBasis, tol: &Tolerance) -> Result<AlgebraBasis> {
    let d = x.ambient_dim();
    let mut work: Vec<MatrixC> = hermitian_seed_blocks(x, tol)?;
    let id = MatrixC::identity(d);
    for b in x.basis() {
        // Multiples of the identity impose no constraint.
        let tr = b.trace() / Complex64::new(d as f64, 0.0);
        if b.sub(&id.scale(tr)).norm() <= tol.eq_tol * (1.0 + b.norm()) {
            continue;
        }
        let action: Vec<MatrixC> = work.iter().map(|y| b.mul(y).sub(&y.mul(b)).vec()).collect();
        let a = MatrixC::from_columns(&action);
        if a.norm() <= tol.rank_tol {
            continue;
        }
        let null = a.nullspace_basis(tol)?;
        work = combine(&work, &null);
        if work.is_empty() {
            return Err(Error::Internal("commutant lost the identity".into()));
        }
    }
    Ok(AlgebraBasis { ambient_dim: d, basis: work })
}

/// Orthonormal basis of the commutant of one Hermitian element of the
/// algebra: with eigenclusters `V_c`, the blocks `(V_c e_a)(V_c e_b)*`.
/// Always a superset of the algebra's commutant; degenerate draws only
/// make the seed larger, never wrong.
fn hermitian_seed_blocks(x: &AlgebraBasis, tol: &Tolerance) -> Result<Vec<MatrixC>> {
    let d = x.ambient_dim();
    // fixed quasi-random weights keep the result deterministic
    let mut state = 0x5851f42d4c957f2du64;
    let mut h = MatrixC::zeros(d, d);
    for b in x.basis() {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let w = ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5;
        h = h.add(&b.scale(Complex64::new(w, 0.0)));
    }
    let h = h.add(&h.adjoint()).scale(Complex64::new(0.5, 0.0));
    if h.norm() <= tol.eq_tol {
        return Ok(AlgebraBasis::full(d).basis);
    }
    let clusters = h.hermitian_eig(tol)?;
    let mut blocks = Vec::new();
    for (_, v) in &clusters {
        for a in 0..v.cols() {
            let va = v.col(a);
            for b in 0..v.cols() {
                blocks.push(va.mul(&v.col(b).adjoint()));
            }
        }
    }
    Ok(blocks)
}

/// Linear combinations `Σ_j coeffs[j,l]·mats[j]` for each column l.
fn combine(mats: &[MatrixC], coeffs: &MatrixC) -> Vec<MatrixC> {
    let mut out = Vec::with_capacity(coeffs.cols());
    for l in 0..coeffs.cols() {
        let mut m = MatrixC::zeros(mats[0].rows(), mats[0].cols());
        for (j, y) in mats.iter().enumerate() {
            m = m.add(&y.scale(coeffs[(j, l)]));
        }
        out.push(m);
    }
    out
}

/// Von Neumann algebra generated by the union.
pub fn join_algebras(x: &AlgebraBasis, y: &AlgebraBasis, tol: &Tolerance) -> Result<AlgebraBasis> {
    if x.ambient_dim() != y.ambient_dim() {
        return Err(Error::Contract("join of algebras on different spaces".into()));
    }
    let mut gens: Vec<MatrixC> = x.basis().to_vec();
    gens.extend_from_slice(y.basis());
    generate_algebra(x.ambient_dim(), &gens, tol)
}

/// Intersection, as a subspace meet of the vectorized spans.
pub fn meet_algebras(x: &AlgebraBasis, y: &AlgebraBasis, tol: &Tolerance) -> Result<AlgebraBasis> {
    if x.ambient_dim() != y.ambient_dim() {
        return Err(Error::Contract("meet of algebras on different spaces".into()));
    }
    let d = x.ambient_dim();
    let inter =
        mat::subspace_ops(&x.span_matrix(), &y.span_matrix(), SubspaceMode::Intersect, tol)?;
    let basis: Vec<MatrixC> = inter.columns().map(|c| c.unvec(d, d)).collect();
    let alg = AlgebraBasis { ambient_dim: d, basis };
    // The intersection of *-algebras is a *-algebra; make sure the identity
    // survived the numerics.
    if alg.membership_residual(&MatrixC::identity(d)) > 10.0 * tol.eq_tol {
        return Err(Error::Inconsistency("algebra meet lost the identity".into()));
    }
    Ok(alg)
}

/// Factor test via the center, cross-checked against `dim(x ∨ x') = d²`.
pub fn is_factor(x: &AlgebraBasis, tol: &Tolerance) -> Result<FactorCertificate> {
    let xp = commutant(x, tol)?;
    let center = meet_algebras(x, &xp, tol)?;
    let center_dim = center.dim();
    let by_center = center_dim == 1;
    let join_dim = join_algebras(x, &xp, tol)?.dim();
    let by_join = join_dim == x.ambient_dim() * x.ambient_dim();
    if by_center != by_join {
        return Err(Error::Inconsistency(format!(
            "factor criteria disagree: center_dim={center_dim}, dim(x∨x')={join_dim}"
        )));
    }
    Ok(FactorCertificate { is_factor: by_center, center_dim, minimal_projection: None, split: None })
}

/// A non-zero projection `P ∈ x` whose compression `PxP` restricted to
/// `range(P)` is the scalars.
///
/// Requires `x` to be a factor. A seeded random Hermitian element of the
/// algebra is eigendecomposed; the smallest-rank eigenprojection lying in
/// the span is compressed and the search recurses until minimality
/// certifies.
pub fn minimal_projection(x: &AlgebraBasis, seed: u64, tol: &Tolerance) -> Result<MatrixC> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    minimal_projection_inner(x.basis(), x.ambient_dim(), &mut rng, tol, x.ambient_dim())
}

fn minimal_projection_inner(
    basis: &[MatrixC],
    dim: usize,
    rng: &mut ChaCha8Rng,
    tol: &Tolerance,
    depth_left: usize,
) -> Result<MatrixC> {
    if depth_left == 0 {
        return Err(Error::Internal("minimal projection search exceeded depth bound".into()));
    }
    if basis.len() == 1 {
        // Scalars: the identity is the only non-zero projection.
        return Ok(MatrixC::identity(dim));
    }
    let mut h = MatrixC::zeros(dim, dim);
    for b in basis {
        let c: f64 = rng.random_range(-1.0..1.0);
        h = h.add(&b.scale(Complex64::new(c, 0.0)));
    }
    let h = h.add(&h.adjoint()).scale(Complex64::new(0.5, 0.0));
    let mut clusters = h.hermitian_eig(tol)?;
    clusters.sort_by_key(|(_, v)| v.cols());

    let residual = |m: &MatrixC| {
        let mut r = m.clone();
        for b in basis {
            let c = b.dot(&r);
            r = r.sub(&b.scale(c));
        }
        r.norm() / (1.0 + m.norm())
    };

    for (_, v) in &clusters {
        if v.cols() == dim {
            continue; // full-rank cluster can only be a multiple of I
        }
        let p = v.projector();
        if residual(&p) > 10.0 * tol.eq_tol {
            continue;
        }
        // Compress the algebra onto range(P) and test minimality there.
        let candidates: Vec<MatrixC> =
            basis.iter().map(|b| v.adjoint().mul(&b.mul(v))).collect();
        let mut compressed = Vec::new();
        mat::extend_orthonormal(&mut compressed, &candidates, tol);
        if compressed.len() == 1 {
            return Ok(p);
        }
        let w = minimal_projection_inner(&compressed, v.cols(), rng, tol, depth_left - 1)?;
        return Ok(v.mul(&w).mul(&v.adjoint()));
    }
    // Fully degenerate draw; retry with fresh randomness.
    minimal_projection_inner(basis, dim, rng, tol, depth_left - 1)
}

/// Tensor-split certificate: a unitary `U : ℂ^g ⊗ ℂ^{g'} → H` with
/// `U(A⊗I)U*` spanning `x` and `U(I⊗B)U*` spanning `x'`.
///
/// Minimal projections `E ∈ x`, `E' ∈ x'` meet in a rank-one product; a
/// unit vector ω of its range is fixed by both, and the unitary extends
/// `X X'ω ↦ (Xω)⊗(X'ω)`.
pub fn tensor_split(x: &AlgebraBasis, seed: u64, tol: &Tolerance) -> Result<FactorCertificate> {
    let d = x.ambient_dim();
    let xp = commutant(x, tol)?;
    let e = minimal_projection(x, seed, tol)?;
    let ep = minimal_projection(&xp, seed.wrapping_add(1), tol)?;
    let prod = e.mul(&ep);
    if prod.norm() <= 10.0 * tol.eq_tol {
        return Err(Error::Internal("minimal projections of x and x' have zero product".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let omega = loop {
        let r = mat::random_gaussian(d, 1, &mut rng);
        let w = prod.mul(&r);
        if w.norm() > 1e-6 * r.norm() {
            break w.normalized()?;
        }
    };

    let orbit = |alg: &AlgebraBasis| -> (MatrixC, MatrixC) {
        let cols: Vec<MatrixC> = alg.basis().iter().map(|b| b.mul(&omega)).collect();
        let m = MatrixC::from_columns(&cols);
        let v = m.orthonormal_columns(tol);
        (m, v)
    };
    let (mx, v) = orbit(x);
    let (_, vp) = orbit(&xp);
    let g = v.cols();
    let gp = vp.cols();
    if g * gp != d {
        return Err(Error::Inconsistency(format!(
            "tensor split dimensions {g}x{gp} do not multiply to ambient {d}"
        )));
    }

    // Solve for algebra elements sending ω to each orbit basis vector.
    let cx = mx.solve_lstsq(&v, tol);
    let mut columns = Vec::with_capacity(d);
    for a in 0..g {
        let mut op = MatrixC::zeros(d, d);
        for (i, b) in x.basis().iter().enumerate() {
            op = op.add(&b.scale(cx[(i, a)]));
        }
        for b in 0..gp {
            columns.push(op.mul(&vp.col(b)));
        }
    }
    let u = MatrixC::from_columns(&columns);
    let gram_dev = u.adjoint().mul(&u).sub(&MatrixC::identity(d)).norm();
    if gram_dev > 10.0 * tol.eq_tol * d as f64 {
        return Err(Error::Inconsistency(format!(
            "tensor split produced a non-unitary map (deviation {gram_dev:.3e})"
        )));
    }
    // Conjugation certificate: U*BU must act on the first leg only for
    // B ∈ x and on the second leg only for B ∈ x'.
    let (_, dev_x) = conjugated_leg_residual(&u, x.basis(), g, gp, true);
    let (_, dev_xp) = conjugated_leg_residual(&u, xp.basis(), g, gp, false);
    let worst = dev_x.max(dev_xp);
    if worst > 100.0 * tol.eq_tol {
        return Err(Error::Inconsistency(format!(
            "tensor split conjugation certificate failed (deviation {worst:.3e})"
        )));
    }

    Ok(FactorCertificate {
        is_factor: true,
        center_dim: 1,
        minimal_projection: Some(e),
        split: Some(SplitCertificate { unitary: u, dim_g: g, dim_g_prime: gp }),
    })
}

/// For each `B` compute `W = U*BU`, extract the single-leg component by a
/// normalized partial trace over the other leg, and report the worst
/// residual `‖W − A⊗I‖/(1+‖B‖)` (resp. `‖W − I⊗A‖`). Returns the extracted
/// leg operators too.
pub fn conjugated_leg_residual(
    u: &MatrixC,
    basis: &[MatrixC],
    g: usize,
    gp: usize,
    first_leg: bool,
) -> (Vec<MatrixC>, f64) {
    let mut worst = 0.0f64;
    let mut legs = Vec::with_capacity(basis.len());
    for b in basis {
        let w = u.adjoint().mul(&b.mul(u));
        let (a, rebuilt) = if first_leg {
            let mut a = MatrixC::zeros(g, g);
            for i in 0..g {
                for j in 0..g {
                    let mut s = Complex64::ZERO;
                    for k in 0..gp {
                        s += w[(i * gp + k, j * gp + k)];
                    }
                    a[(i, j)] = s / Complex64::new(gp as f64, 0.0);
                }
            }
            let rebuilt = a.kron(&MatrixC::identity(gp)).expect("within cap");
            (a, rebuilt)
        } else {
            let mut a = MatrixC::zeros(gp, gp);
            for i in 0..gp {
                for j in 0..gp {
                    let mut s = Complex64::ZERO;
                    for k in 0..g {
                        s += w[(k * gp + i, k * gp + j)];
                    }
                    a[(i, j)] = s / Complex64::new(g as f64, 0.0);
                }
            }
            let rebuilt = MatrixC::identity(g).kron(&a).expect("within cap");
            (a, rebuilt)
        };
        worst = worst.max(w.sub(&rebuilt).norm() / (1.0 + b.norm()));
        legs.push(a);
    }
    (legs, worst)
}
