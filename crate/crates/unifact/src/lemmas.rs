//! Standalone numeric lemmas.
//!
//! These are self-contained: a complex-measure product limit over dyadic
//! dissections of `[0,1]`, an elementary remainder inequality, exact
//! Poisson-binomial distributions with a first-order stochastic dominance
//! check, and the classicality limit formula.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A complex measure on `[0,1]` with finitely many atoms and an optional
/// piecewise-constant density on a uniform grid standing in for the
/// atomless part.
///
/// Serialized with complex values as `[re, im]` pairs:
/// `{"atoms": [[x, [re, im]], ...], "density": [[re, im], ...] | null}`.
#[derive(Debug, Clone)]
pub struct DiscreteComplexMeasure {
    /// Atom locations (strictly increasing, inside `[0,1]`) with values.
    atoms: Vec<(f64, Complex64)>,
    /// Piecewise-constant density values on a uniform grid over [0,1].
    density: Option<Vec<Complex64>>,
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    atoms: Vec<(f64, [f64; 2])>,
    density: Option<Vec<[f64; 2]>>,
}

impl Serialize for DiscreteComplexMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureRepr {
            atoms: self.atoms.iter().map(|&(x, v)| (x, [v.re, v.im])).collect(),
            density: self
                .density
                .as_ref()
                .map(|d| d.iter().map(|v| [v.re, v.im]).collect()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiscreteComplexMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MeasureRepr::deserialize(d)?;
        DiscreteComplexMeasure::new(
            r.atoms.iter().map(|&(x, [re, im])| (x, Complex64::new(re, im))).collect(),
            r.density
                .map(|d| d.iter().map(|&[re, im]| Complex64::new(re, im)).collect()),
        )
        .map_err(serde::de::Error::custom)
    }
}

impl DiscreteComplexMeasure {
    pub fn new(
        atoms: Vec<(f64, Complex64)>,
        density: Option<Vec<Complex64>>,
    ) -> Result<Self> {
        for w in atoms.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::Contract("atom locations must be strictly increasing".into()));
            }
        }
        if atoms.iter().any(|&(x, _)| !(0.0..=1.0).contains(&x)) {
            return Err(Error::Contract("atom locations must lie in [0,1]".into()));
        }
        if let Some(d) = &density {
            if d.is_empty() {
                return Err(Error::Contract("density grid must be non-empty".into()));
            }
        }
        Ok(DiscreteComplexMeasure { atoms, density })
    }

    pub fn zero() -> Self {
        DiscreteComplexMeasure { atoms: Vec::new(), density: None }
    }

    /// Total variation `Σ|atoms| + ∫|density|`.
    pub fn total_variation(&self) -> f64 {
        let atom_part: f64 = self.atoms.iter().map(|(_, v)| v.norm()).sum();
        let density_part = match &self.density {
            Some(d) => d.iter().map(|v| v.norm()).sum::<f64>() / d.len() as f64,
            None => 0.0,
        };
        atom_part + density_part
    }

    /// Integral of the density over `[0, t]`.
    fn density_integral(&self, t: f64) -> Complex64 {
        let Some(d) = &self.density else { return Complex64::ZERO };
        let g = d.len() as f64;
        let mut total = Complex64::ZERO;
        for (i, &v) in d.iter().enumerate() {
            let lo = i as f64 / g;
            let hi = (i + 1) as f64 / g;
            let overlap = (t.min(hi) - lo).max(0.0);
            total += v * Complex64::new(overlap, 0.0);
        }
        total
    }

}

/// Outcome of [`dissecting_product_limit`]: the partial products per dyadic
/// depth, the closed-form limit, and any notes about nudged atoms.
#[derive(Debug, Clone)]
pub struct DissectingLimit {
    /// `∏_{cells at depth k} (1 + ν(cell))` for k = 1..=max_depth.
    pub products: Vec<Complex64>,
    /// `e^{ν_c([0,1])} · ∏_atoms (1 + ν({x}))`.
    pub rhs: Complex64,
    pub notes: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct DissectingLimitRepr {
    products: Vec<[f64; 2]>,
    rhs: [f64; 2],
    notes: Vec<String>,
}

impl Serialize for DissectingLimit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DissectingLimitRepr {
            products: self.products.iter().map(|v| [v.re, v.im]).collect(),
            rhs: [self.rhs.re, self.rhs.im],
            notes: self.notes.clone(),
        }
        .serialize(s)
    }
}

/// Partial products of `1 + ν(cell)` over dyadic dissections of `[0,1]`,
/// together with the closed-form limit. Convergence is the caller's
/// assertion. Atoms landing exactly on a dyadic boundary are nudged by
/// 2⁻⁴⁰ so they stay interior to cells at every tested depth.
pub fn dissecting_product_limit(
    nu: &DiscreteComplexMeasure,
    max_depth: u32,
) -> Result<DissectingLimit> {
    if max_depth == 0 || max_depth > 22 {
        return Err(Error::Capacity("dissection depth must lie in 1..=22".into()));
    }
    let mut notes = Vec::new();
    let scale = (1u64 << max_depth) as f64;
    let atoms: Vec<(f64, Complex64)> = nu
        .atoms
        .iter()
        .map(|&(x, v)| {
            if (x * scale).fract() == 0.0 && x < 1.0 {
                let nudged = x + 2.0f64.powi(-40);
                notes.push(format!("atom at {x} sits on a dyadic boundary; nudged to {nudged}"));
                (nudged, v)
            } else {
                (x, v)
            }
        })
        .collect();

    let mut products = Vec::with_capacity(max_depth as usize);
    for depth in 1..=max_depth {
        let cells = 1u64 << depth;
        let width = 1.0 / cells as f64;
        // Atom mass per cell; the last cell is closed at 1.
        let mut cell_mass = vec![Complex64::ZERO; cells as usize];
        for &(x, v) in &atoms {
            let idx = ((x / width) as u64).min(cells - 1) as usize;
            cell_mass[idx] += v;
        }
        let mut product = Complex64::ONE;
        let mut prev_integral = Complex64::ZERO;
        for (j, &mass) in cell_mass.iter().enumerate() {
            let hi = (j + 1) as f64 * width;
            let integral = nu.density_integral(hi);
            product *= Complex64::ONE + mass + (integral - prev_integral);
            prev_integral = integral;
        }
        products.push(product);
    }
    let atom_product: Complex64 =
        atoms.iter().map(|&(_, v)| Complex64::ONE + v).product();
    let rhs = nu.density_integral(1.0).exp() * atom_product;
    Ok(DissectingLimit { products, rhs, notes })
}

/// Both sides of the remainder inequality
/// `Σ_{|A|≥2} ∏_{i∈A} x_i ≤ (min_j Σ_{i≠j} x_i)·(Σ x_i)·e^{Σ x_i}`.
/// The left side is computed as `∏(1+x_i) − 1 − Σx_i`, not by subset
/// enumeration.
pub fn remainder_inequality_check(x: &[f64]) -> Result<(f64, f64, bool)> {
    if x.is_empty() || x.len() > 20 {
        return Err(Error::Capacity("vector length must lie in 1..=20".into()));
    }
    if x.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::Contract("entries must be finite and nonnegative".into()));
    }
    let sum: f64 = x.iter().sum();
    let max = x.iter().cloned().fold(0.0f64, f64::max);
    let lhs = x.iter().map(|v| 1.0 + v).product::<f64>() - 1.0 - sum;
    let rhs = (sum - max) * sum * sum.exp();
    let holds = lhs <= rhs + 1e-12 * (1.0 + rhs);
    Ok((lhs, rhs, holds))
}

/// Per-element exclusion probabilities of a random subset of `[n]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExclusionVector {
    q: Vec<f64>,
}

impl ExclusionVector {
    pub fn new(q: Vec<f64>) -> Result<Self> {
        if q.is_empty() || q.len() > 64 {
            return Err(Error::Capacity("exclusion vector length must lie in 1..=64".into()));
        }
        if q.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::Contract("exclusion probabilities must lie in [0,1]".into()));
        }
        Ok(ExclusionVector { q })
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.q
    }

    /// Geometric mean of the exclusion probabilities (zero when any entry
    /// is zero).
    pub fn geometric_mean(&self) -> f64 {
        if self.q.iter().any(|&v| v == 0.0) {
            return 0.0;
        }
        (self.q.iter().map(|v| v.ln()).sum::<f64>() / self.q.len() as f64).exp()
    }
}

/// Exact pmf of the inclusion count `|Γ|` (element i included with
/// probability `1 − q_i`), by dynamic-programming convolution.
pub fn poisson_binomial_pmf(q: &ExclusionVector) -> Vec<f64> {
    let mut pmf = vec![1.0f64];
    for &qi in &q.q {
        let inc = 1.0 - qi;
        let mut next = vec![0.0; pmf.len() + 1];
        for (k, &p) in pmf.iter().enumerate() {
            next[k] += p * qi;
            next[k + 1] += p * inc;
        }
        pmf = next;
    }
    debug_assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    pmf
}

/// CDF of `|Γ|` over {0..n}.
pub fn poisson_binomial_cdf(q: &ExclusionVector) -> Vec<f64> {
    let mut cdf = poisson_binomial_pmf(q);
    for k in 1..cdf.len() {
        cdf[k] += cdf[k - 1];
    }
    cdf
}

/// Outcome of [`dominance_check`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DominanceCheck {
    pub holds: bool,
    pub cdf: Vec<f64>,
    pub cdf_uniform: Vec<f64>,
}

/// First-order stochastic dominance `|Γ| ≤ |Γ̃|`, where Γ̃ excludes each
/// element with the geometric-mean probability: pointwise
/// `CDF_Γ(m) ≥ CDF_Γ̃(m)` with slack −1e-12.
pub fn dominance_check(q: &ExclusionVector) -> DominanceCheck {
    let cdf = poisson_binomial_cdf(q);
    let uniform = ExclusionVector::new(vec![q.geometric_mean(); q.len()])
        .expect("geometric mean stays in [0,1]");
    let cdf_uniform = poisson_binomial_cdf(&uniform);
    let holds = cdf.iter().zip(&cdf_uniform).all(|(a, b)| *a >= *b - 1e-12);
    DominanceCheck { holds, cdf, cdf_uniform }
}

/// The binomial tail `Σ_{l≤m} C(k,l)(1−p₀^{1/k})^l p₀^{(k−l)/k}` and its
/// k→∞ limit `p₀ Σ_{l≤m} (−ln p₀)^l / l!`, evaluated in log space.
pub fn classicality_limit(p0: f64, m: usize, k: u64) -> Result<(f64, f64)> {
    if !(p0 > 0.0 && p0 <= 1.0) {
        return Err(Error::Contract("p0 must lie in (0,1]".into()));
    }
    if k == 0 || k > 1_000_000 {
        return Err(Error::Capacity("k must lie in 1..=10^6".into()));
    }
    let ln_p = p0.ln();
    // 1 − p0^{1/k} without cancellation
    let one_minus_root = -(ln_p / k as f64).exp_m1();
    let ln_one_minus_root = one_minus_root.ln(); // −inf when p0 = 1
    let mut exact = 0.0f64;
    let mut ln_choose = 0.0f64;
    for l in 0..=m.min(k as usize) {
        if l > 0 {
            ln_choose += ((k as f64 - l as f64 + 1.0) / l as f64).ln();
        }
        let ln_term = if l == 0 {
            ((k as f64 - l as f64) / k as f64) * ln_p
        } else {
            ln_choose + l as f64 * ln_one_minus_root + ((k as f64 - l as f64) / k as f64) * ln_p
        };
        exact += ln_term.exp();
    }
    let mut limit = 0.0f64;
    let mut term = 1.0f64;
    for l in 0..=m {
        if l > 0 {
            term *= -ln_p / l as f64;
        }
        limit += term;
    }
    limit *= p0;
    Ok((exact, limit))
}
