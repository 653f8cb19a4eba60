//! Spectral resolution of the commuting projection family Φ.
//!
//! The abelian algebra generated by the φ-projections of a unital spec is
//! resolved into joint eigenspaces. Each eigenspace is a spectral point
//! labeled by the subset A of atoms on which it is "excited": φ_x acts as
//! the identity on points with label ⊆ x and as zero otherwise. The
//! counting map, spectral sets and spectral projections are then exact
//! label-level combinatorics; only the eigenspaces themselves are numeric.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::{MatrixC, Tolerance};
use crate::unital::{verdict_tol, UnitalSpec};

/// One joint eigenspace with its subset label and reference mass.
#[derive(Debug, Clone)]
pub struct SpectralPoint {
    /// Subset of atoms, bit i = atom i.
    pub label: u32,
    /// Orthonormal columns spanning the eigenspace.
    pub basis: MatrixC,
    /// Reference measure of the point (the eigenspace dimension).
    pub mu: f64,
}

impl SpectralPoint {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }
}

/// Label/dimension/mass summary, the serialized form of a point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointSummary {
    pub label: u32,
    pub dim: usize,
    pub mu: f64,
}

/// Joint-eigenspace decomposition of Φ with labeled points.
#[derive(Debug, Clone)]
pub struct SpectralResolution {
    points: Vec<SpectralPoint>,
    n_atoms: usize,
    ambient_dim: usize,
    empty_point: usize,
}

impl SpectralResolution {
    pub fn points(&self) -> &[SpectralPoint] {
        &self.points
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Index of the point labeled ∅.
    pub fn empty_point(&self) -> usize {
        self.empty_point
    }

    pub fn point_by_label(&self, label: u32) -> Option<usize> {
        self.points.iter().position(|p| p.label == label)
    }

    pub fn summaries(&self) -> Vec<PointSummary> {
        self.points
            .iter()
            .map(|p| PointSummary { label: p.label, dim: p.dim(), mu: p.mu })
            .collect()
    }
}

/// Resolve the joint eigenspaces of `{φ_x}` by iterated range/kernel
/// refinement: for each atom q in index order, every current block is split
/// by φ of the complement of {q}, whose kernel part is exactly "q belongs
/// to the label".
pub fn spectral_resolution(u: &UnitalSpec, tol: &Tolerance) -> Result<SpectralResolution> {
    let f = u.factorization();
    let d = f.ambient_dim();
    let band = verdict_tol(tol);
    let mut blocks: Vec<(u32, MatrixC)> = vec![(0, MatrixC::identity(d))];
    for (q, &atom) in f.atom_masks().iter().enumerate() {
        let phi = u.phi_projection(f.complement(atom))?;
        let mut next = Vec::with_capacity(blocks.len() * 2);
        for (label, basis) in &blocks {
            let in_range = phi.mul(basis).orthonormal_columns(tol);
            let residual = basis.sub(&phi.mul(basis)).orthonormal_columns(tol);
            if in_range.cols() + residual.cols() != basis.cols() {
                return Err(Error::Inconsistency(format!(
                    "refinement by atom {q} split a {}-dim block into {} + {}",
                    basis.cols(),
                    in_range.cols(),
                    residual.cols()
                )));
            }
            if in_range.cols() > 0 {
                next.push((*label, in_range));
            }
            if residual.cols() > 0 {
                next.push((label | atom, residual));
            }
        }
        blocks = next;
    }
    // Deterministic point order: popcount, then numeric label.
    blocks.sort_by_key(|(label, _)| (label.count_ones(), *label));
    let total: usize = blocks.iter().map(|(_, b)| b.cols()).sum();
    if total != d {
        return Err(Error::Inconsistency(format!(
            "eigenspace dimensions sum to {total}, ambient is {d}"
        )));
    }

    // Every φ_x must act as 0 or 1 on every block, matching label
    // inclusion; a mixed action means the family does not commute cleanly.
    for mask in f.all_masks() {
        let phi = u.phi_projection(mask)?;
        for (label, basis) in &blocks {
            let image = phi.mul(basis);
            let dev = if label & !mask == 0 {
                image.sub(basis).norm()
            } else {
                image.norm()
            };
            if dev > band {
                return Err(Error::Inconsistency(format!(
                    "φ at mask {mask:#b} is not 0/1 on the block labeled {label:#b} \
                     (deviation {dev:.3e})"
                )));
            }
        }
    }

    let empty_point = blocks
        .iter()
        .position(|(label, _)| *label == 0)
        .ok_or_else(|| Error::Inconsistency("no spectral point labeled ∅".into()))?;
    let omega_dev = blocks[empty_point]
        .1
        .projector()
        .mul(u.omega())
        .sub(u.omega())
        .norm()
        .max((blocks[empty_point].1.cols() as f64 - 1.0).abs());
    if omega_dev > band {
        return Err(Error::Inconsistency("the ∅ eigenspace is not ℂΩ".into()));
    }

    let points = blocks
        .into_iter()
        .map(|(label, basis)| SpectralPoint { label, mu: basis.cols() as f64, basis })
        .collect();
    Ok(SpectralResolution { points, n_atoms: f.n_sites(), ambient_dim: d, empty_point })
}

/// Spectral set `S_x`: indices of the points whose label is contained in x.
/// Exact at the label level; satisfies `S_{x∧y} = S_x ∩ S_y`.
pub fn spectral_set(r: &SpectralResolution, mask: u32) -> Vec<usize> {
    r.points
        .iter()
        .enumerate()
        .filter(|(_, p)| p.label & !mask == 0)
        .map(|(i, _)| i)
        .collect()
}

/// Counting map: per point, the number of atoms whose complemented spectral
/// set misses it. Asserts agreement with the label size.
pub fn counting_map(r: &SpectralResolution) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(r.points.len());
    for (i, p) in r.points.iter().enumerate() {
        let mut k = 0usize;
        for q in 0..r.n_atoms {
            let atom = 1u32 << q;
            let complement = ((1u32 << r.n_atoms) - 1) & !atom;
            let in_s_xprime = spectral_set(r, complement).contains(&i);
            if !in_s_xprime {
                k += 1;
            }
        }
        if k != p.label.count_ones() as usize {
            return Err(Error::Inconsistency(format!(
                "counting map gives {k} at the point labeled {:#b}",
                p.label
            )));
        }
        out.push(k);
    }
    Ok(out)
}

/// Spectral projection `pr_x` as a point-index map: label A is sent to
/// label A∩x. Asserts the defining preimage identity
/// `pr_x⁻¹(S_y) = S_{y∨x'}` and the composition law at the label level.
pub fn spectral_projection(r: &SpectralResolution, mask: u32) -> Result<Vec<usize>> {
    let full = (1u32 << r.n_atoms) - 1;
    let map: Vec<usize> = r
        .points
        .iter()
        .map(|p| {
            r.point_by_label(p.label & mask).ok_or_else(|| {
                Error::Inconsistency(format!(
                    "projected label {:#b} is not a spectral point",
                    p.label & mask
                ))
            })
        })
        .collect::<Result<_>>()?;
    // Preimage identity for every y, exactly.
    for y in 0..=full {
        let target: Vec<bool> =
            (0..r.points.len()).map(|i| r.points[i].label & !(y | (full & !mask)) == 0).collect();
        for (i, &img) in map.iter().enumerate() {
            let in_preimage = r.points[img].label & !y == 0;
            if in_preimage != target[i] {
                return Err(Error::Inconsistency(
                    "spectral projection preimage identity failed".into(),
                ));
            }
        }
    }
    Ok(map)
}

/// Composition law `pr_y ∘ pr_x = pr_{x∧y}`, exact on indices.
pub fn check_projection_composition(r: &SpectralResolution, x: u32, y: u32) -> Result<bool> {
    let px = spectral_projection(r, x)?;
    let py = spectral_projection(r, y)?;
    let pxy = spectral_projection(r, x & y)?;
    Ok((0..r.points.len()).all(|i| py[px[i]] == pxy[i]))
}

/// Complex vector measure `μ_{h,g}`: per point, `⟨E_s h, E_s g⟩` with
/// `E_s` the eigenspace projection. With `h = g` this is `μ_g`, total
/// `‖g‖²`.
pub fn vector_measure(r: &SpectralResolution, h: &MatrixC, g: &MatrixC) -> Result<Vec<Complex64>> {
    if h.rows() != r.ambient_dim || g.rows() != r.ambient_dim || h.cols() != 1 || g.cols() != 1 {
        return Err(Error::Contract("vector measure needs ambient column vectors".into()));
    }
    Ok(r.points
        .iter()
        .map(|p| {
            let hh = p.basis.adjoint().mul(h);
            let gg = p.basis.adjoint().mul(g);
            hh.dot(&gg)
        })
        .collect())
}

/// A probability on the spectral points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralProbability {
    weights: Vec<f64>,
}

impl SpectralProbability {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::Contract("probability weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Contract(format!("weights sum to {total}, expected 1")));
        }
        Ok(SpectralProbability { weights })
    }

    /// Point mass at the ∅ point.
    pub fn dirac_empty(r: &SpectralResolution) -> Self {
        let mut weights = vec![0.0; r.points.len()];
        weights[r.empty_point] = 1.0;
        SpectralProbability { weights }
    }

    /// Normalized vector measure `μ_ξ / ‖ξ‖²`.
    pub fn from_vector(r: &SpectralResolution, xi: &MatrixC) -> Result<Self> {
        let m = vector_measure(r, xi, xi)?;
        let total: f64 = m.iter().map(|z| z.re).sum();
        if total <= 0.0 {
            return Err(Error::Contract("zero vector has no normalized measure".into()));
        }
        SpectralProbability::new(m.iter().map(|z| (z.re / total).max(0.0)).collect())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Spectral independence test: ν charges ∅, and for every index x the
/// pushforward of ν under `A ↦ (A∩x, A∩x')` is a product measure.
pub fn is_spectral_independence_probability(
    r: &SpectralResolution,
    nu: &SpectralProbability,
    tol: &Tolerance,
) -> Result<(bool, f64)> {
    if nu.weights.len() != r.points.len() {
        return Err(Error::Contract("weights do not match the spectral points".into()));
    }
    let band = verdict_tol(tol);
    if nu.weights[r.empty_point] <= band {
        return Ok((false, 1.0));
    }
    let full = (1u32 << r.n_atoms) - 1;
    let mut worst = 0.0f64;
    for x in 0..=full {
        let xc = full & !x;
        use std::collections::HashMap;
        let mut joint: HashMap<(u32, u32), f64> = HashMap::new();
        let mut m1: HashMap<u32, f64> = HashMap::new();
        let mut m2: HashMap<u32, f64> = HashMap::new();
        for (p, &w) in r.points.iter().zip(&nu.weights) {
            *joint.entry((p.label & x, p.label & xc)).or_default() += w;
            *m1.entry(p.label & x).or_default() += w;
            *m2.entry(p.label & xc).or_default() += w;
        }
        for (&b, &wb) in &m1 {
            for (&c, &wc) in &m2 {
                let j = joint.get(&(b, c)).copied().unwrap_or(0.0);
                worst = worst.max((j - wb * wc).abs());
            }
        }
    }
    Ok((worst <= band, worst))
}
