//! Units and vector states.
//!
//! A unital spec pairs a factorization with a norm-one vector Ω that is
//! independent across every complementary pair of the family. On top of it
//! live the φ-projections onto `span(F_x Ω)`, the factorizable /
//! multiplicative / additive vector tests, local tensor splits anchored at
//! Ω, and unit discovery for a bare factorization.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{self, AlgebraBasis};
use crate::error::{Error, Result};
use crate::factorization::FactorizationSpec;
use crate::mat::{self, MatrixC, Tolerance};

/// Threshold for yes/no verdicts derived from deviations. Honest instances
/// sit many orders of magnitude below it and genuine violations many above;
/// the band exists so scrambled frames with accumulated rounding do not flip
/// verdicts.
pub fn verdict_tol(tol: &Tolerance) -> f64 {
    1e3 * tol.eq_tol
}

/// Result of an independence test between two algebras under a vector
/// state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndependenceCheck {
    pub independent: bool,
    /// Worst deviation of `⟨Ω,XYΩ⟩ − ⟨Ω,XΩ⟩⟨Ω,YΩ⟩` over basis pairs.
    pub product_rule_deviation: f64,
    /// Worst norm of a restricted commutator on `span((x∨y)Ω)`.
    pub commutation_deviation: f64,
}

/// Checks Def-style independence of `x` and `y` under Ω: the product rule
/// over all basis pairs plus commutation restricted to `span((x∨y)Ω)`.
pub fn is_independent_under(
    x: &AlgebraBasis,
    y: &AlgebraBasis,
    omega: &MatrixC,
    tol: &Tolerance,
) -> Result<IndependenceCheck> {
    if x.ambient_dim() != y.ambient_dim() || omega.rows() != x.ambient_dim() || omega.cols() != 1 {
        return Err(Error::Contract("independence check dimension mismatch".into()));
    }
    if (omega.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Contract("independence requires a norm-one vector".into()));
    }
    let join = algebra::join_algebras(x, y, tol)?;
    let orbit: Vec<MatrixC> = join.basis().iter().map(|b| b.mul(omega)).collect();
    let w = MatrixC::from_columns(&orbit).orthonormal_columns(tol);

    let x_omega: Vec<MatrixC> = x.basis().iter().map(|b| b.mul(omega)).collect();
    let y_omega: Vec<MatrixC> = y.basis().iter().map(|b| b.mul(omega)).collect();
    let mut product_dev = 0.0f64;
    let mut comm_dev = 0.0f64;
    for (bx, bxo) in x.basis().iter().zip(&x_omega) {
        let ex = omega.dot(bxo);
        for (by, byo) in y.basis().iter().zip(&y_omega) {
            let ey = omega.dot(byo);
            let joint = omega.dot(&bx.mul(byo));
            product_dev = product_dev.max((joint - ex * ey).norm());
            let commutator = bx.mul(by).sub(&by.mul(bx));
            comm_dev = comm_dev.max(commutator.mul(&w).op_norm());
        }
    }
    let band = verdict_tol(tol);
    Ok(IndependenceCheck {
        independent: product_dev <= band && comm_dev <= band,
        product_rule_deviation: product_dev,
        commutation_deviation: comm_dev,
    })
}

/// Outcome of [`verify_raised_independence`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RaisedIndependence {
    /// Worst deviation of the hypothesis (`XYΩ = YXΩ` and the product rule)
    /// over generator pairs.
    pub hypothesis_deviation: f64,
    pub precondition_ok: bool,
    /// Deviations for the generated algebras; absent when the hypothesis
    /// failed.
    pub conclusion: Option<IndependenceCheck>,
}

/// Raise independence from self-adjoint multiplicative generator sets to
/// the algebras they generate. A failed hypothesis is reported, not thrown;
/// the conclusion is then not asserted.
pub fn verify_raised_independence(
    x_gens: &[MatrixC],
    y_gens: &[MatrixC],
    omega: &MatrixC,
    tol: &Tolerance,
) -> Result<RaisedIndependence> {
    let band = verdict_tol(tol);
    let closed = |gens: &[MatrixC]| -> bool {
        let member = |m: &MatrixC| {
            let scale = 1.0 + m.norm();
            let mut best = m.norm() / scale; // 0 counts as a member
            for g in gens {
                best = best.min(m.sub(g).norm() / scale);
            }
            best <= band
        };
        gens.iter().all(|g| member(&g.adjoint()))
            && gens.iter().all(|a| gens.iter().all(|b| member(&a.mul(b))))
    };
    if !closed(x_gens) || !closed(y_gens) {
        return Err(Error::Contract(
            "generator lists must be closed under adjoints and products".into(),
        ));
    }

    let mut hyp = 0.0f64;
    for gx in x_gens {
        let exo = gx.mul(omega);
        let ex = omega.dot(&exo);
        for gy in y_gens {
            let eyo = gy.mul(omega);
            let ey = omega.dot(&eyo);
            hyp = hyp.max(gx.mul(&eyo).sub(&gy.mul(&exo)).norm());
            hyp = hyp.max((omega.dot(&gx.mul(&eyo)) - ex * ey).norm());
        }
    }
    if hyp > band {
        return Ok(RaisedIndependence {
            hypothesis_deviation: hyp,
            precondition_ok: false,
            conclusion: None,
        });
    }
    let d = omega.rows();
    let x = algebra::generate_algebra(d, x_gens, tol)?;
    let y = algebra::generate_algebra(d, y_gens, tol)?;
    let check = is_independent_under(&x, &y, omega, tol)?;
    Ok(RaisedIndependence {
        hypothesis_deviation: hyp,
        precondition_ok: true,
        conclusion: Some(check),
    })
}

/// Per-index record of the three factorizability tests.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndexWitness {
    pub mask: u32,
    /// Product-rule deviation (test i).
    pub product_deviation: f64,
    /// `|Ξ⟩⟨Ξ| = [x'Ξ][xΞ]` deviation (test ii).
    pub projection_deviation: f64,
    /// Minimal-projection deviation (test vii).
    pub minimal_deviation: f64,
    /// Minimal projection of the factor fixing Ξ, when factorizable.
    pub min_proj: Option<MatrixC>,
    /// Minimal projection of the commutant fixing Ξ, when factorizable.
    pub min_proj_commutant: Option<MatrixC>,
}

/// Aggregate classification of a vector against a factorization (and,
/// where applicable, its unit).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorClassification {
    pub is_factorizable: bool,
    pub is_multiplicative: bool,
    pub is_additive: bool,
    pub witnesses: Vec<IndexWitness>,
}

/// Runs three of the equivalent factorizability characterizations on the
/// normalization of `xi` for every index of the family and demands that
/// they agree: the product rule (i), the projection identity (ii) and the
/// minimal-projections-fixing-Ξ form (vii). Disagreement beyond the
/// tolerance band is a numerical-inconsistency error.
pub fn is_factorizable(
    xi: &MatrixC,
    f: &FactorizationSpec,
    tol: &Tolerance,
) -> Result<VectorClassification> {
    let d = f.ambient_dim();
    if xi.rows() != d || xi.cols() != 1 {
        return Err(Error::Contract("vector has wrong shape".into()));
    }
    if xi.norm() <= tol.eq_tol {
        return Err(Error::Contract("only non-zero vectors can be factorizable".into()));
    }
    let nxi = xi.normalized()?;
    let band = verdict_tol(tol);
    let mut witnesses = Vec::new();
    let mut all_pass = true;
    for mask in f.all_masks() {
        let x = f.factor_of(mask)?;
        let xc = f.factor_of(f.complement(mask))?;

        let vx = orbit_basis(&x, &nxi, tol);
        let vxc = orbit_basis(&xc, &nxi, tol);
        let px = vx.projector();
        let pxc = vxc.projector();

        // (ii): |Ξ⟩⟨Ξ| = [span(x'Ξ)]·[span(xΞ)]
        let rank_one = nxi.mul(&nxi.adjoint());
        let dev_proj = pxc.mul(&px).sub(&rank_one).norm();

        // (i): product rule for x against x' under Ξ
        let mut dev_prod = 0.0f64;
        for bx in x.basis() {
            let bxo = bx.mul(&nxi);
            let ex = nxi.dot(&bxo);
            for by in xc.basis() {
                let byo = by.mul(&nxi);
                let ey = nxi.dot(&byo);
                dev_prod = dev_prod.max((nxi.dot(&bx.mul(&byo)) - ex * ey).norm());
            }
        }

        // (vii): P := [span(x'Ξ)] is a minimal projection of x fixing Ξ,
        // dually for x'.
        let dev_min = minimality_deviation(&x, &vxc, &nxi, tol)
            .max(minimality_deviation(&xc, &vx, &nxi, tol));

        let verdicts = [dev_prod <= band, dev_proj <= band, dev_min <= band];
        let devs = [dev_prod, dev_proj, dev_min];
        let here = if verdicts.iter().all(|&v| v) {
            true
        } else if verdicts.iter().all(|&v| !v) {
            false
        } else if devs.iter().cloned().fold(0.0f64, f64::max) <= 10.0 * band {
            // borderline band: count as factorizable at this index
            true
        } else {
            return Err(Error::Inconsistency(format!(
                "factorizability tests disagree at mask {mask:#b}: \
                 product {dev_prod:.3e}, projection {dev_proj:.3e}, minimal {dev_min:.3e}"
            )));
        };
        all_pass &= here;
        witnesses.push(IndexWitness {
            mask,
            product_deviation: dev_prod,
            projection_deviation: dev_proj,
            minimal_deviation: dev_min,
            min_proj: here.then(|| pxc.clone()),
            min_proj_commutant: here.then(|| px.clone()),
        });
    }
    Ok(VectorClassification {
        is_factorizable: all_pass,
        is_multiplicative: false,
        is_additive: false,
        witnesses,
    })
}

/// Orthonormal basis of `span{BΞ : B in the algebra basis}`. Incremental
/// Gram–Schmidt: the range dimension is at most the ambient dimension, far
/// below the number of basis elements.
fn orbit_basis(alg: &AlgebraBasis, xi: &MatrixC, tol: &Tolerance) -> MatrixC {
    let cols: Vec<MatrixC> = alg.basis().iter().map(|b| b.mul(xi)).collect();
    let mut onb = Vec::new();
    mat::extend_orthonormal_capped(&mut onb, &cols, tol, alg.ambient_dim());
    MatrixC::from_columns(&onb)
}

/// How far `P := V V*` is from being a minimal projection of `alg` that
/// fixes Ξ: membership residual, `‖PΞ − Ξ‖`, and the excess dimension of
/// the compressed algebra.
fn minimality_deviation(alg: &AlgebraBasis, v: &MatrixC, xi: &MatrixC, tol: &Tolerance) -> f64 {
    let p = v.projector();
    let mut dev = alg.membership_residual(&p);
    dev = dev.max(p.mul(xi).sub(xi).norm());
    let compressed: Vec<MatrixC> =
        alg.basis().iter().map(|b| v.adjoint().mul(&b.mul(v))).collect();
    let mut onb = Vec::new();
    mat::extend_orthonormal(&mut onb, &compressed, tol);
    if onb.len() > 1 {
        dev = dev.max(1.0);
    }
    dev
}

/// Anchored tensor split of the ambient space along one index of a unital
/// factorization.
#[derive(Debug, Clone)]
pub struct LocalSplit {
    /// Unitary `H → ℂ^{g} ⊗ ℂ^{g'}` (rows indexed leg-major); sends Ω to
    /// `e₀⊗e₀`, i.e. to Ω⊗Ω in the anchored leg bases.
    pub iso: MatrixC,
    /// Orthonormal basis of `H_x` whose first column is Ω.
    pub basis_x: MatrixC,
    /// Orthonormal basis of `H_{x'}` whose first column is Ω.
    pub basis_xc: MatrixC,
    pub dim_x: usize,
    pub dim_xc: usize,
}

/// A factorization carrying a certified unit vector.
pub struct UnitalSpec {
    f: Arc<FactorizationSpec>,
    omega: MatrixC,
    /// Worst independence deviation observed at construction.
    certification_deviation: f64,
    phi_cache: RwLock<HashMap<u32, Arc<MatrixC>>>,
    split_cache: RwLock<HashMap<u32, Arc<LocalSplit>>>,
    partition_cache: RwLock<Option<Arc<PartitionSplit>>>,
}

impl std::fmt::Debug for UnitalSpec {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("UnitalSpec")
            .field("sites", self.f.sites())
            .field("certification_deviation", &self.certification_deviation)
            .finish()
    }
}

impl UnitalSpec {
    /// Certify Ω as a unit for the family: norm one, and for every index
    /// the product rule plus commutation between `F_x` and `F_{x'}`. A
    /// failing Ω is a contract violation, never a silent downgrade.
    pub fn new(f: Arc<FactorizationSpec>, omega: MatrixC, tol: &Tolerance) -> Result<Self> {
        let d = f.ambient_dim();
        if omega.rows() != d || omega.cols() != 1 {
            return Err(Error::Contract("unit vector has wrong shape".into()));
        }
        if (omega.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Contract("unit vector must have norm one".into()));
        }
        let band = verdict_tol(tol);
        let mut worst = 0.0f64;
        for mask in f.all_masks() {
            let x = f.factor_of(mask)?;
            let xc = f.factor_of(f.complement(mask))?;
            let mut dev = 0.0f64;
            let y_omega: Vec<MatrixC> = xc.basis().iter().map(|b| b.mul(&omega)).collect();
            for bx in x.basis() {
                let exo = bx.mul(&omega);
                let ex = omega.dot(&exo);
                for (by, byo) in xc.basis().iter().zip(&y_omega) {
                    let ey = omega.dot(byo);
                    dev = dev.max((omega.dot(&bx.mul(byo)) - ex * ey).norm());
                    dev = dev.max(bx.mul(byo).sub(&by.mul(&exo)).norm());
                }
            }
            worst = worst.max(dev);
            if dev > band {
                return Err(Error::Contract(format!(
                    "vector is not a unit: independence fails at mask {mask:#b} \
                     (deviation {dev:.3e})"
                )));
            }
        }
        let spec = UnitalSpec {
            f,
            omega,
            certification_deviation: worst,
            phi_cache: RwLock::new(HashMap::new()),
            split_cache: RwLock::new(HashMap::new()),
            partition_cache: RwLock::new(None),
        };
        // φ at the Boolean ends.
        let phi_bottom = spec.phi_projection(0)?;
        let rank_one = spec.omega.mul(&spec.omega.adjoint());
        if phi_bottom.sub(&rank_one).norm() > band {
            return Err(Error::Inconsistency("φ_∅ is not |Ω⟩⟨Ω|".into()));
        }
        let phi_top = spec.phi_projection(spec.f.full_mask())?;
        if phi_top.sub(&MatrixC::identity(d)).norm() > band {
            return Err(Error::Inconsistency("φ_full is not the identity".into()));
        }
        Ok(spec)
    }

    pub fn factorization(&self) -> &Arc<FactorizationSpec> {
        &self.f
    }

    pub fn omega(&self) -> &MatrixC {
        &self.omega
    }

    pub fn certification_deviation(&self) -> f64 {
        self.certification_deviation
    }

    /// Orthogonal projection onto `H_x = span(F_x Ω)`, cached per mask.
    pub fn phi_projection(&self, mask: u32) -> Result<Arc<MatrixC>> {
        if let Some(hit) = self.phi_cache.read().expect("phi lock").get(&mask) {
            return Ok(Arc::clone(hit));
        }
        let tol = Tolerance::default();
        let x = self.f.factor_of(mask)?;
        let v = orbit_basis(&x, &self.omega, &tol);
        let p = Arc::new(v.projector());
        let mut w = self.phi_cache.write().expect("phi lock");
        Ok(Arc::clone(w.entry(mask).or_insert(p)))
    }

    pub fn phi_apply(&self, mask: u32, xi: &MatrixC) -> Result<MatrixC> {
        Ok(self.phi_projection(mask)?.mul(xi))
    }

    /// Anchored local split along one index, cached per mask.
    ///
    /// The split sends Ω to Ω⊗Ω, carries `XX'` to `X|_{H_x} ⊗ X'|_{H_{x'}}`
    /// and maps `H_x` onto `H_x ⊗ ℂΩ`; each property is certified here.
    pub fn local_split(&self, mask: u32, tol: &Tolerance) -> Result<Arc<LocalSplit>> {
        if let Some(hit) = self.split_cache.read().expect("split lock").get(&mask) {
            return Ok(Arc::clone(hit));
        }
        let split = Arc::new(self.build_local_split(mask, tol)?);
        let mut w = self.split_cache.write().expect("split lock");
        Ok(Arc::clone(w.entry(mask).or_insert(split)))
    }

    fn build_local_split(&self, mask: u32, tol: &Tolerance) -> Result<LocalSplit> {
        let d = self.f.ambient_dim();
        let x = self.f.factor_of(mask)?;
        let xc = self.f.factor_of(self.f.complement(mask))?;
        let vx = anchored_orbit_basis(&x, &self.omega, tol);
        let vxc = anchored_orbit_basis(&xc, &self.omega, tol);
        let g = vx.cols();
        let gp = vxc.cols();
        if g * gp != d {
            return Err(Error::Inconsistency(format!(
                "local split dims {g}x{gp} do not multiply to ambient {d}"
            )));
        }
        // Algebra elements mapping Ω to each anchored basis vector.
        let mx = MatrixC::from_columns(
            &x.basis().iter().map(|b| b.mul(&self.omega)).collect::<Vec<_>>(),
        );
        let coeff = mx.solve_lstsq(&vx, tol);
        let mut columns = Vec::with_capacity(d);
        for a in 0..g {
            let mut op = MatrixC::zeros(d, d);
            for (i, b) in x.basis().iter().enumerate() {
                op = op.add(&b.scale(coeff[(i, a)]));
            }
            for b in 0..gp {
                columns.push(op.mul(&vxc.col(b)));
            }
        }
        let u = MatrixC::from_columns(&columns); // legs → H
        let band = verdict_tol(tol);
        let gram_dev = u.adjoint().mul(&u).sub(&MatrixC::identity(d)).norm();
        if gram_dev > band * d as f64 {
            return Err(Error::Inconsistency(format!(
                "local split is not unitary (deviation {gram_dev:.3e})"
            )));
        }
        // Ω ↦ Ω⊗Ω, i.e. the (0,0) column is Ω.
        let omega_dev = u.col(0).sub(&self.omega).norm();
        if omega_dev > band {
            return Err(Error::Inconsistency(format!(
                "local split does not send Ω to Ω⊗Ω (deviation {omega_dev:.3e})"
            )));
        }
        // XX' ↦ X|⊗X'| at the span level of each side.
        let (_, dev_x) = algebra::conjugated_leg_residual(&u, x.basis(), g, gp, true);
        let (_, dev_xc) = algebra::conjugated_leg_residual(&u, xc.basis(), g, gp, false);
        let worst = dev_x.max(dev_xc);
        if worst > band {
            return Err(Error::Inconsistency(format!(
                "local split mapping property failed (deviation {worst:.3e})"
            )));
        }
        Ok(LocalSplit { iso: u.adjoint(), basis_x: vx, basis_xc: vxc, dim_x: g, dim_xc: gp })
    }

    /// Direct definition test `ξ = φ_x(ξ) ⊗ φ_{x'}(ξ)` for every index with
    /// `⟨Ω,ξ⟩ = 1`, cross-checked against factorizable ∧ pairing-one.
    pub fn is_multiplicative(&self, xi: &MatrixC, tol: &Tolerance) -> Result<bool> {
        let band = verdict_tol(tol);
        let pairing = self.omega.dot(xi);
        let pairing_ok = (pairing - Complex64::ONE).norm() <= band;

        let mut definition_ok = true;
        if pairing_ok {
            for mask in self.f.all_masks() {
                let split = self.local_split(mask, tol)?;
                let a = split.basis_x.adjoint().mul(xi);
                let b = split.basis_xc.adjoint().mul(xi);
                let candidate = split.iso.adjoint().mul(&a.kron(&b)?);
                if candidate.sub(xi).norm() > band * (1.0 + xi.norm()) {
                    definition_ok = false;
                    break;
                }
            }
        } else {
            definition_ok = false;
        }

        let by_factorizable = match is_factorizable(xi, &self.f, tol) {
            Ok(c) => c.is_factorizable && pairing_ok,
            Err(Error::Contract(_)) => false, // zero vector
            Err(e) => return Err(e),
        };
        if definition_ok != by_factorizable {
            return Err(Error::Inconsistency(format!(
                "multiplicative-vector routes disagree: definition {definition_ok}, \
                 factorizable∧pairing {by_factorizable}"
            )));
        }
        Ok(definition_ok)
    }

    /// Definition test `ξ = φ_x(ξ) + φ_{x'}(ξ)` for every index.
    pub fn is_additive(&self, xi: &MatrixC, tol: &Tolerance) -> Result<bool> {
        let band = verdict_tol(tol);
        for mask in self.f.all_masks() {
            let px = self.phi_projection(mask)?;
            let pxc = self.phi_projection(self.f.complement(mask))?;
            let rebuilt = px.mul(xi).add(&pxc.mul(xi));
            if rebuilt.sub(xi).norm() > band * (1.0 + xi.norm()) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Joint classification of a vector.
    pub fn classify_vector(&self, xi: &MatrixC, tol: &Tolerance) -> Result<VectorClassification> {
        let mut cls = is_factorizable(xi, &self.f, tol)?;
        cls.is_multiplicative = self.is_multiplicative(xi, tol)?;
        cls.is_additive = self.is_additive(xi, tol)?;
        Ok(cls)
    }

    /// Full-partition split `H ≅ ⊗_p H_p` anchored at Ω: the unitary sends
    /// `⊗_p e_{a_p}` to `∏_p A^{(p)}_{a_p} Ω` and Ω corresponds to the
    /// all-zeros tensor index. Cached after the first call.
    pub fn partition_split(&self, tol: &Tolerance) -> Result<Arc<PartitionSplit>> {
        if let Some(hit) = self.partition_cache.read().expect("partition lock").as_ref() {
            return Ok(Arc::clone(hit));
        }
        let built = Arc::new(self.build_partition_split(tol)?);
        let mut w = self.partition_cache.write().expect("partition lock");
        Ok(Arc::clone(w.get_or_insert(built)))
    }

    fn build_partition_split(&self, tol: &Tolerance) -> Result<PartitionSplit> {
        let d = self.f.ambient_dim();
        let mut leg_dims = Vec::new();
        let mut leg_ops: Vec<Vec<MatrixC>> = Vec::new();
        for mask in self.f.atom_masks() {
            let x = self.f.factor_of(mask)?;
            let v = anchored_orbit_basis(&x, &self.omega, tol);
            let mx = MatrixC::from_columns(
                &x.basis().iter().map(|b| b.mul(&self.omega)).collect::<Vec<_>>(),
            );
            let coeff = mx.solve_lstsq(&v, tol);
            let mut ops = Vec::with_capacity(v.cols());
            for a in 0..v.cols() {
                let mut op = MatrixC::zeros(d, d);
                for (i, b) in x.basis().iter().enumerate() {
                    op = op.add(&b.scale(coeff[(i, a)]));
                }
                ops.push(op);
            }
            leg_dims.push(v.cols());
            leg_ops.push(ops);
        }
        let total: usize = leg_dims.iter().product();
        if total != d {
            return Err(Error::Inconsistency(format!(
                "partition split leg dims {leg_dims:?} do not multiply to ambient {d}"
            )));
        }
        let mut columns = Vec::with_capacity(total);
        let mut index = vec![0usize; leg_dims.len()];
        loop {
            let mut col = self.omega.clone();
            for (p, &a) in index.iter().enumerate().rev() {
                if a > 0 {
                    col = leg_ops[p][a].mul(&col);
                }
            }
            columns.push(col);
            // odometer over leg indices, last leg fastest
            let mut pos = leg_dims.len();
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                index[pos] += 1;
                if index[pos] < leg_dims[pos] {
                    break;
                }
                index[pos] = 0;
                if pos == 0 {
                    pos = usize::MAX;
                    break;
                }
            }
            if pos == usize::MAX {
                break;
            }
        }
        let u = MatrixC::from_columns(&columns); // legs → H
        let band = verdict_tol(tol);
        let gram_dev = u.adjoint().mul(&u).sub(&MatrixC::identity(d)).norm();
        if gram_dev > band * d as f64 {
            return Err(Error::Inconsistency(format!(
                "partition split is not unitary (deviation {gram_dev:.3e})"
            )));
        }
        Ok(PartitionSplit { unitary: u, leg_dims })
    }
}

/// Full-partition tensor split anchored at the unit.
#[derive(Debug, Clone)]
pub struct PartitionSplit {
    /// Unitary `⊗_p ℂ^{g_p} → H` (columns indexed leg-major, leg 0
    /// slowest); the all-zeros column is Ω and leg index 0 plays the role
    /// of the local unit Ω_p.
    pub unitary: MatrixC,
    pub leg_dims: Vec<usize>,
}

impl PartitionSplit {
    /// Leg-p component of a vector `ξ ∈ H_p`: the slice of `U*ξ` along leg
    /// p with all other legs at their unit index. The returned pair is
    /// (component, residual off the slice).
    pub fn leg_component(&self, p: usize, xi: &MatrixC) -> (MatrixC, f64) {
        let coords = self.unitary.adjoint().mul(xi);
        let g = self.leg_dims[p];
        let stride: usize = self.leg_dims[p + 1..].iter().product();
        let mut comp = MatrixC::zeros(g, 1);
        for a in 0..g {
            comp[(a, 0)] = coords[(a * stride, 0)];
        }
        let mut off = 0.0f64;
        for i in 0..coords.rows() {
            let a = (i / stride) % g;
            if i != a * stride {
                off += coords[(i, 0)].norm_sqr();
            }
        }
        (comp, off.sqrt())
    }

    /// Assemble a vector from per-leg components `⊗_p v_p` back in `H`.
    pub fn assemble(&self, legs: &[MatrixC]) -> Result<MatrixC> {
        if legs.len() != self.leg_dims.len() {
            return Err(Error::Contract("leg count mismatch".into()));
        }
        let mut tensor = MatrixC::identity(1);
        for (v, &g) in legs.iter().zip(&self.leg_dims) {
            if v.rows() != g || v.cols() != 1 {
                return Err(Error::Contract("leg component has wrong shape".into()));
            }
            tensor = tensor.kron(v)?;
        }
        Ok(self.unitary.mul(&tensor))
    }
}

/// Orthonormal basis of `span{BΩ}` whose first column is Ω itself.
fn anchored_orbit_basis(alg: &AlgebraBasis, omega: &MatrixC, tol: &Tolerance) -> MatrixC {
    let mut basis = vec![omega.clone()];
    let cols: Vec<MatrixC> = alg.basis().iter().map(|b| b.mul(omega)).collect();
    mat::extend_orthonormal(&mut basis, &cols, tol);
    MatrixC::from_columns(&basis)
}

/// Constructive unit discovery for a bare factorization: split off each
/// atom in turn with [`algebra::tensor_split`], exhibit `H ≅ ⊗_p H_p`, and
/// return the image of a seeded random elementary tensor. The output is
/// checked to be factorizable.
pub fn find_factorizable_vector(
    f: &FactorizationSpec,
    seed: u64,
    tol: &Tolerance,
) -> Result<MatrixC> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Remaining-atom algebras on the current rest space.
    let mut rest: Vec<AlgebraBasis> =
        f.atom_masks().iter().map(|&m| f.factor_of(m).map(|a| (*a).clone())).collect::<Result<_>>()?;
    let mut leg_dims: Vec<usize> = Vec::new();
    let mut total: Option<MatrixC> = None; // legs-so-far ⊗ rest → H
    let mut prefix_dim = 1usize;
    let mut step_seed = seed;
    while !rest.is_empty() {
        let x = rest.remove(0);
        let cert = algebra::tensor_split(&x, step_seed, tol)?;
        step_seed = step_seed.wrapping_add(97);
        let split = cert.split.expect("tensor_split always returns a split");
        let (g, r) = (split.dim_g, split.dim_g_prime);
        let u = split.unitary; // ℂ^g ⊗ ℂ^r → current rest space
        // Restrict the remaining atoms to the new rest space.
        let mut next_rest = Vec::with_capacity(rest.len());
        for alg in &rest {
            let (legs, dev) = algebra::conjugated_leg_residual(&u, alg.basis(), g, r, false);
            if dev > verdict_tol(tol) {
                return Err(Error::Inconsistency(format!(
                    "remaining atom does not act on the split complement (deviation {dev:.3e})"
                )));
            }
            let mut onb = Vec::new();
            mat::extend_orthonormal(&mut onb, &legs, tol);
            next_rest.push(AlgebraBasis::from_parts(r, onb)?);
        }
        rest = next_rest;
        total = Some(match total {
            None => u,
            Some(t) => t.mul(&MatrixC::identity(prefix_dim).kron(&u)?),
        });
        prefix_dim *= g;
        leg_dims.push(g);
    }
    let t = total.expect("at least one site");
    let mut tensor = MatrixC::identity(1);
    for &g in &leg_dims {
        tensor = tensor.kron(&mat::random_unit_vector(g, &mut rng))?;
    }
    let xi = t.mul(&tensor);
    let cls = is_factorizable(&xi, f, tol)?;
    if !cls.is_factorizable {
        return Err(Error::Inconsistency(
            "constructed vector failed the factorizability tests".into(),
        ));
    }
    Ok(xi)
}
