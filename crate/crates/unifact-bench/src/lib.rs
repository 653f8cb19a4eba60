//! Shared fixtures for the benchmarks.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use unifact::MatrixC;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_hermitian(d: usize, seed: u64) -> MatrixC {
    let g = unifact::mat::random_gaussian(d, d, &mut rng(seed));
    g.add(&g.adjoint()).scale(Complex64::new(0.5, 0.0))
}

pub fn product_unit(dims: &[usize]) -> MatrixC {
    let mut omega = MatrixC::identity(1);
    for &d in dims {
        let v = MatrixC::col_vec_real(&vec![1.0 / (d as f64).sqrt(); d]);
        omega = omega.kron(&v).unwrap();
    }
    omega
}
