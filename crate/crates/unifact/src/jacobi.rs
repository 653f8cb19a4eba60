//! Jacobi eigensolver and one-sided Jacobi SVD for complex matrices.
//!
//! Both are cyclic Jacobi iterations with explicit complex rotations.
//! They are slower than blocked LAPACK-style solvers but backward stable
//! with high relative accuracy, which is what the rank decisions here
//! live on. All inputs are desk scale (a few hundred on a side).

use num_complex::Complex64;

use crate::mat::MatrixC;

const MAX_SWEEPS: usize = 60;
const OFF_TOL: f64 = 1e-30; // on squared magnitudes

/// 2×2 Hermitian rotation zeroing the off-diagonal entry `beta` of
/// `[[alpha, beta], [conj(beta), gamma]]`. Returns `(c, s, phase)` for the
/// unitary `[[c, -s·e^{iφ}], [s·e^{-iφ}, c]]`.
fn rotation(alpha: f64, gamma: f64, beta: Complex64) -> (f64, f64, Complex64) {
    let abs_b = beta.norm();
    let phase = beta / abs_b;
    let tau = (gamma - alpha) / (2.0 * abs_b);
    let t = if tau >= 0.0 {
        -1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, phase)
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi.
///
/// Returns eigenvalues ascending with the matching orthonormal
/// eigenvector columns.
pub fn hermitian_eigen(a: &MatrixC) -> (Vec<f64>, MatrixC) {
    let n = a.rows();
    assert!(a.is_square(), "hermitian_eigen needs a square matrix");
    let mut h: Vec<Vec<Complex64>> =
        (0..n).map(|i| (0..n).map(|j| a[(i, j)]).collect()).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Complex64::ONE } else { Complex64::ZERO }).collect())
        .collect();
    let scale: f64 = h.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().max(1e-300);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| h[p][q].norm_sqr())
            .sum();
        if off <= OFF_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let beta = h[p][q];
                if beta.norm_sqr() <= OFF_TOL * scale / (n * n) as f64 {
                    continue;
                }
                let (c, s, phase) = rotation(h[p][p].re, h[q][q].re, beta);
                let cs = Complex64::new(c, 0.0);
                let s_ph = phase * s;
                // H ← U* H U, acting on rows/cols p and q.
                for r in 0..n {
                    let (hp, hq) = (h[r][p], h[r][q]);
                    h[r][p] = cs * hp + s_ph.conj() * hq;
                    h[r][q] = -s_ph * hp + cs * hq;
                }
                for r in 0..n {
                    let (hp, hq) = (h[p][r], h[q][r]);
                    h[p][r] = cs * hp + s_ph * hq;
                    h[q][r] = -s_ph.conj() * hp + cs * hq;
                }
                for r in 0..n {
                    let (vp, vq) = (v[r][p], v[r][q]);
                    v[r][p] = cs * vp + s_ph.conj() * vq;
                    v[r][q] = -s_ph * vp + cs * vq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| h[i][i].re.total_cmp(&h[j][j].re));
    let values: Vec<f64> = order.iter().map(|&i| h[i][i].re).collect();
    let vectors = MatrixC::from_fn(n, n, |i, j| v[i][order[j]]);
    (values, vectors)
}

/// One-sided Jacobi SVD.
pub struct Svd {
    /// Left singular vectors for the non-negligible singular values,
    /// matching `singular_values` order (descending).
    pub u: MatrixC,
    /// All `n` singular values, descending.
    pub singular_values: Vec<f64>,
    /// Full right singular vector matrix (n×n), columns in the same order.
    pub v: MatrixC,
}

/// SVD of an m×n matrix by orthogonalizing column pairs. Columns whose
/// norm vanishes get no left vector; `u` carries exactly the columns with
/// σ > 0, padded into the order of `singular_values`.
pub fn svd(a: &MatrixC) -> Svd {
    let m = a.rows();
    let n = a.cols();
    let mut w: Vec<Vec<Complex64>> =
        (0..n).map(|j| (0..m).map(|i| a[(i, j)]).collect()).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { Complex64::ONE } else { Complex64::ZERO }).collect())
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut app = 0.0f64;
                let mut aqq = 0.0f64;
                let mut apq = Complex64::ZERO;
                for i in 0..m {
                    app += w[p][i].norm_sqr();
                    aqq += w[q][i].norm_sqr();
                    apq += w[p][i].conj() * w[q][i];
                }
                if app == 0.0 || aqq == 0.0 {
                    continue;
                }
                if apq.norm_sqr() <= 1e-30 * app * aqq {
                    continue;
                }
                rotated = true;
                let (c, s, phase) = rotation(app, aqq, apq);
                let cs = Complex64::new(c, 0.0);
                let s_ph = phase * s;
                for i in 0..m {
                    let (wp, wq) = (w[p][i], w[q][i]);
                    w[p][i] = cs * wp + s_ph.conj() * wq;
                    w[q][i] = -s_ph * wp + cs * wq;
                }
                for i in 0..n {
                    let (vp, vq) = (v[p][i], v[q][i]);
                    v[p][i] = cs * vp + s_ph.conj() * vq;
                    v[q][i] = -s_ph * vp + cs * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut norms: Vec<f64> =
        w.iter().map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    norms.sort_by(|x, y| y.total_cmp(x));

    let u = MatrixC::from_fn(m, n, |i, j| {
        let col = order[j];
        let s = norms[j];
        if s > 0.0 {
            w[col][i] / Complex64::new(s, 0.0)
        } else {
            Complex64::ZERO
        }
    });
    let vm = MatrixC::from_fn(n, n, |i, j| v[order[j]][i]);
    Svd { u, singular_values: norms, v: vm }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigen_of_pauli_y() {
        let sy = MatrixC::from_vec(2, 2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap();
        let (vals, vecs) = hermitian_eigen(&sy);
        assert!((vals[0] + 1.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);
        let gram = vecs.adjoint().mul(&vecs);
        assert!(gram.sub(&MatrixC::identity(2)).norm() < 1e-12);
        // reconstruct
        let mut rec = MatrixC::zeros(2, 2);
        for j in 0..2 {
            let v = vecs.col(j);
            rec = rec.add(&v.mul(&v.adjoint()).scale(c(vals[j], 0.0)));
        }
        assert!(rec.sub(&sy).norm() < 1e-12);
    }

    #[test]
    fn eigen_random_hermitian_reconstructs() {
        let mut rng = crate::mat::test_rng(3);
        let g = crate::mat::random_gaussian(9, 9, &mut rng);
        let h = g.add(&g.adjoint());
        let (vals, vecs) = hermitian_eigen(&h);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let mut rec = MatrixC::zeros(9, 9);
        for j in 0..9 {
            let v = vecs.col(j);
            rec = rec.add(&v.mul(&v.adjoint()).scale(c(vals[j], 0.0)));
        }
        assert!(rec.sub(&h).norm() < 1e-11 * (1.0 + h.norm()));
    }

    #[test]
    fn svd_rank_one_sign_pattern() {
        // the case that broke the previous backend: all columns parallel
        // to the ones vector, with mixed signs
        let a = 0.23570226039551584;
        let m = MatrixC::from_fn(6, 3, |_i, j| c(if j == 0 { -a } else { a }, 0.0));
        let s = svd(&m);
        assert!((s.singular_values[0] - 1.0).abs() < 1e-12, "{:?}", s.singular_values);
        assert!(s.singular_values[1] < 1e-12);
        let u0 = s.u.col(0);
        for i in 0..6 {
            assert!((u0[(i, 0)].norm() - 1.0 / 6.0f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn svd_random_reconstructs() {
        let mut rng = crate::mat::test_rng(11);
        for (m, n) in [(7, 4), (4, 7), (5, 5)] {
            let a = crate::mat::random_gaussian(m, n, &mut rng);
            let s = svd(&a);
            // A = U Σ V^H
            let mut rec = MatrixC::zeros(m, n);
            for j in 0..n {
                let u = s.u.col(j);
                let v = s.v.col(j);
                rec = rec.add(&u.mul(&v.adjoint()).scale(c(s.singular_values[j], 0.0)));
            }
            assert!(rec.sub(&a).norm() < 1e-11 * (1.0 + a.norm()), "shape {m}x{n}");
            let gram_v = s.v.adjoint().mul(&s.v);
            assert!(gram_v.sub(&MatrixC::identity(n)).norm() < 1e-11);
        }
    }

    #[test]
    fn svd_wide_kernel() {
        // [[1, 1]] has kernel (1,-1)/√2
        let a = MatrixC::from_vec(1, 2, vec![c(1., 0.), c(1., 0.)]).unwrap();
        let s = svd(&a);
        assert!((s.singular_values[0] - 2.0f64.sqrt()).abs() < 1e-14);
        assert!(s.singular_values[1].abs() < 1e-14);
        let k = s.v.col(1);
        assert!((k[(0, 0)] + k[(1, 0)]).norm() < 1e-12);
    }
}
