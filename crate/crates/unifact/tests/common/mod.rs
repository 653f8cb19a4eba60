//! Shared helpers for the acceptance suite.

use num_complex::Complex64;
use rand::Rng;
use unifact::MatrixC;

/// Product unit vector `⊗_p (1,…,1)/√d_p`.
pub fn product_unit(dims: &[usize]) -> MatrixC {
    let mut omega = MatrixC::identity(1);
    for &d in dims {
        let v = MatrixC::col_vec_real(&vec![1.0 / (d as f64).sqrt(); d]);
        omega = omega.kron(&v).unwrap();
    }
    omega
}

/// Fold a vector on `⊗_p ℂ^{d_p}` into the `d_A × d_B` matrix of the
/// bipartition given by `mask` (sites in the mask index rows).
pub fn fold_by_mask(xi: &MatrixC, dims: &[usize], mask: u32) -> MatrixC {
    let rows: usize =
        dims.iter().enumerate().filter(|(p, _)| mask & (1 << p) != 0).map(|(_, &d)| d).product();
    let cols: usize =
        dims.iter().enumerate().filter(|(p, _)| mask & (1 << p) == 0).map(|(_, &d)| d).product();
    let mut out = MatrixC::zeros(rows, cols);
    let n = dims.len();
    for flat in 0..xi.rows() {
        // decode site multi-index (site 0 most significant)
        let mut rem = flat;
        let mut multi = vec![0usize; n];
        for p in (0..n).rev() {
            multi[p] = rem % dims[p];
            rem /= dims[p];
        }
        let mut r = 0usize;
        let mut c = 0usize;
        for p in 0..n {
            if mask & (1 << p) != 0 {
                r = r * dims[p] + multi[p];
            } else {
                c = c * dims[p] + multi[p];
            }
        }
        out[(r, c)] = xi[(flat, 0)];
    }
    out
}

/// Independent brute-force factorizability oracle: a vector is
/// factorizable for a site family iff it folds to a rank-one matrix across
/// every nontrivial bipartition. Rank one is tested through the 2×2
/// minors, with no shared linear-algebra machinery.
pub fn schmidt_oracle(xi: &MatrixC, dims: &[usize]) -> bool {
    let full: u32 = (1 << dims.len()) - 1;
    for mask in 1..full {
        let m = fold_by_mask(xi, dims, mask);
        let scale = m.norm() * m.norm();
        if scale == 0.0 {
            return false;
        }
        for i in 0..m.rows() {
            for k in (i + 1)..m.rows() {
                for j in 0..m.cols() {
                    for l in (j + 1)..m.cols() {
                        let minor = m[(i, j)] * m[(k, l)] - m[(i, l)] * m[(k, j)];
                        if minor.norm() > 1e-10 * scale {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

/// Random elementary tensor across the site legs.
pub fn random_product_vector(dims: &[usize], rng: &mut impl Rng) -> MatrixC {
    let mut v = MatrixC::identity(1);
    for &d in dims {
        v = v.kron(&unifact::mat::random_unit_vector(d, rng)).unwrap();
    }
    v
}

/// Random vector entangled across the first two sites: a two-term Schmidt
/// combination on sites (0,1) tensored with a random vector elsewhere.
pub fn random_entangled_vector(dims: &[usize], rng: &mut impl Rng) -> MatrixC {
    assert!(dims.len() >= 2 || dims[0] >= 4);
    if dims.len() == 1 {
        // single site: entanglement is vacuous; return a random vector
        return unifact::mat::random_unit_vector(dims[0], rng);
    }
    let a1 = unifact::mat::random_unit_vector(dims[0], rng);
    let mut a2 = unifact::mat::random_unit_vector(dims[0], rng);
    // orthogonalize the second Schmidt vector
    let c = a1.dot(&a2);
    a2 = a2.sub(&a1.scale(c)).normalized().unwrap();
    let b1 = unifact::mat::random_unit_vector(dims[1], rng);
    let mut b2 = unifact::mat::random_unit_vector(dims[1], rng);
    let c = b1.dot(&b2);
    b2 = b2.sub(&b1.scale(c)).normalized().unwrap();
    let s = 0.5f64.sqrt();
    let pair = a1
        .kron(&b1)
        .unwrap()
        .scale(Complex64::new(s, 0.0))
        .add(&a2.kron(&b2).unwrap().scale(Complex64::new(s, 0.0)));
    let mut v = pair;
    for &d in &dims[2..] {
        v = v.kron(&unifact::mat::random_unit_vector(d, rng)).unwrap();
    }
    v
}

/// The standard acceptance site lists.
pub fn standard_site_lists() -> Vec<Vec<usize>> {
    vec![vec![2, 2], vec![2, 3], vec![3, 3], vec![2, 2, 2], vec![2, 2, 3]]
}

pub fn report(criterion: &str, pass: bool, detail: &str) {
    println!("criterion {criterion}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {criterion} failed: {detail}");
}
