//! Instance files: a site list, a unit recipe and the seeds that make a
//! run reproducible.

use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use unifact::factorization::{FactorizationSpec, SiteSpec};
use unifact::mat::{self, MatrixC};
use unifact::unital::UnitalSpec;
use unifact::{Error, Result, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitMode {
    Product,
    RandomMultiplicative,
    Explicit,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub sites: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_mode: Option<UnitMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<MatrixC>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjugate_seed: Option<u64>,
    pub seed: u64,
}

impl Instance {
    /// Materialize the factor family (optionally frame-scrambled).
    pub fn build_factorization(&self) -> Result<Arc<FactorizationSpec>> {
        let sites = SiteSpec::new(self.sites.clone())?;
        let f = match self.conjugate_seed {
            None => FactorizationSpec::from_sites(sites),
            Some(seed) => FactorizationSpec::from_sites_scrambled(sites, seed),
        };
        Ok(Arc::new(f))
    }

    /// Resolve the unit recipe; `None` means the unit is withheld and must
    /// be discovered.
    pub fn resolve_unit(&self, f: &FactorizationSpec) -> Result<Option<MatrixC>> {
        let omega = match self.unit_mode {
            None => return Ok(None),
            Some(UnitMode::Product) => product_unit(&self.sites),
            Some(UnitMode::RandomMultiplicative) => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let mut omega = MatrixC::identity(1);
                for &d in &self.sites {
                    // Ω_p plus an orthogonal perturbation, normalized
                    let base = mat::random_unit_vector(d, &mut rng);
                    let mut g = mat::random_gaussian(d, 1, &mut rng).scale(Complex64::new(0.4, 0.0));
                    let overlap = base.dot(&g);
                    g = g.sub(&base.scale(overlap));
                    let leg = base.add(&g).normalized()?;
                    omega = omega.kron(&leg)?;
                }
                omega
            }
            Some(UnitMode::Explicit) => self
                .unit
                .clone()
                .ok_or_else(|| Error::Contract("explicit unit mode requires a unit matrix".into()))?,
        };
        // Explicit units are taken verbatim; generated ones follow the frame.
        let omega = match (&self.unit_mode, f.frame()) {
            (Some(UnitMode::Explicit), _) | (_, None) => omega,
            (_, Some(frame)) => frame.mul(&omega),
        };
        Ok(Some(omega))
    }

    /// Build the certified unital spec, discovering a unit when none is
    /// given.
    pub fn build_unital(&self, tol: &Tolerance) -> Result<(Arc<FactorizationSpec>, UnitalSpec)> {
        let f = self.build_factorization()?;
        let omega = match self.resolve_unit(&f)? {
            Some(omega) => omega,
            None => unifact::unital::find_factorizable_vector(&f, self.seed, tol)?,
        };
        let u = UnitalSpec::new(Arc::clone(&f), omega, tol)?;
        Ok((f, u))
    }
}

pub fn product_unit(dims: &[usize]) -> MatrixC {
    let mut omega = MatrixC::identity(1);
    for &d in dims {
        let v = MatrixC::col_vec_real(&vec![1.0 / (d as f64).sqrt(); d]);
        omega = omega.kron(&v).expect("within capacity");
    }
    omega
}
