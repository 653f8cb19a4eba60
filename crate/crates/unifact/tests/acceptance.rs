//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `--nocapture` to see them).

mod common;

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unifact::algebra::{self, AlgebraBasis};
use unifact::factorization::{self, FactorizationSpec, SiteSpec};
use unifact::fock;
use unifact::lemmas;
use unifact::mat::{self, span_deviation, MatrixC};
use unifact::spectrum::{self, SpectralProbability};
use unifact::unital::{self, UnitalSpec};
use unifact::Tolerance;

use common::*;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn plain_instance(dims: &[usize]) -> (Arc<FactorizationSpec>, MatrixC) {
    let f = Arc::new(FactorizationSpec::from_sites(SiteSpec::new(dims.to_vec()).unwrap()));
    let omega = product_unit(dims);
    (f, omega)
}

fn scrambled_instance(dims: &[usize], seed: u64) -> (Arc<FactorizationSpec>, MatrixC) {
    let f = Arc::new(FactorizationSpec::from_sites_scrambled(
        SiteSpec::new(dims.to_vec()).unwrap(),
        seed,
    ));
    let omega = f.frame().unwrap().mul(&product_unit(dims));
    (f, omega)
}

/// A varied family of generated algebras for the lattice-law checks.
fn random_algebra(d: usize, kind: u8, rng: &mut ChaCha8Rng) -> AlgebraBasis {
    let t = tol();
    match kind % 4 {
        0 => {
            // conjugated block algebra M_g ⊗ I on a divisor split
            let g = (2..d).find(|g| d % g == 0).unwrap_or(d);
            let u = mat::random_unitary(d, rng);
            let gens: Vec<MatrixC> = AlgebraBasis::full(g)
                .basis()
                .iter()
                .map(|b| {
                    let lifted = b.kron(&MatrixC::identity(d / g)).unwrap();
                    u.mul(&lifted).mul(&u.adjoint())
                })
                .collect();
            algebra::generate_algebra(d, &gens, &t).unwrap()
        }
        1 => {
            // conjugated maximal commutative algebra
            let u = mat::random_unitary(d, rng);
            let diag = MatrixC::from_fn(d, d, |i, j| {
                if i == j {
                    Complex64::new(1.0 + i as f64, 0.0)
                } else {
                    Complex64::ZERO
                }
            });
            algebra::generate_algebra(d, &[u.mul(&diag).mul(&u.adjoint())], &t).unwrap()
        }
        2 => {
            // spectral algebra of a single random Hermitian element
            let g = mat::random_gaussian(d, d, rng);
            let h = g.add(&g.adjoint()).scale(Complex64::new(0.5, 0.0));
            algebra::generate_algebra(d, &[h], &t).unwrap()
        }
        _ => {
            let g1 = mat::random_gaussian(d, d, rng);
            let g2 = mat::random_gaussian(d, d, rng);
            algebra::generate_algebra(d, &[g1, g2], &t).unwrap()
        }
    }
}

#[test]
fn criterion_1_algebra_laws() {
    let started = std::time::Instant::now();
    let t = tol();
    let dims = [2usize, 3, 4, 6, 8, 9, 12];
    let mut worst_dc = 0.0f64;
    let mut worst_dm = 0.0f64;
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let d = dims[seed as usize % dims.len()];
        let x = random_algebra(d, seed as u8, &mut rng);
        let y = random_algebra(d, (seed as u8).wrapping_add(1), &mut rng);

        let xp = algebra::commutant(&x, &t).unwrap();
        let xpp = algebra::commutant(&xp, &t).unwrap();
        worst_dc = worst_dc.max(span_deviation(&x.span_matrix(), &xpp.span_matrix()));

        let yp = algebra::commutant(&y, &t).unwrap();
        let join = algebra::join_algebras(&x, &y, &t).unwrap();
        let lhs = algebra::commutant(&join, &t).unwrap();
        let rhs = algebra::meet_algebras(&xp, &yp, &t).unwrap();
        worst_dm = worst_dm.max(span_deviation(&lhs.span_matrix(), &rhs.span_matrix()));
    }
    let elapsed = started.elapsed();
    let pass = worst_dc <= 1e-8 && worst_dm <= 1e-8 && elapsed.as_secs() < 30;
    report(
        "1 (algebra laws)",
        pass,
        &format!(
            "double commutant {worst_dc:.2e}, De Morgan {worst_dm:.2e}, {elapsed:.1?} of 30s"
        ),
    );
}

#[test]
fn criterion_2_factorization_laws() {
    let started = std::time::Instant::now();
    let t = tol();
    let mut worst = 0.0f64;
    let mut all_pass = true;
    for dims in standard_site_lists() {
        let f = FactorizationSpec::from_sites(SiteSpec::new(dims.clone()).unwrap());
        let rep = factorization::verify_factorization(&f, &t).unwrap();
        for check in &rep.checks {
            if check.law != "factor" {
                worst = worst.max(check.max_deviation);
                all_pass &= check.max_deviation <= 1e-8;
            } else {
                all_pass &= check.pass;
            }
        }
    }
    let elapsed = started.elapsed();
    report(
        "2 (factorization laws)",
        all_pass && elapsed.as_secs() < 60,
        &format!("worst law deviation {worst:.2e}, {elapsed:.1?} of 60s"),
    );
}

#[test]
fn criterion_3_factorizability_equivalence() {
    let t = tol();
    let mut checked = 0usize;
    for (inst, dims) in standard_site_lists().iter().enumerate() {
        let (f, _) = plain_instance(dims);
        let d = f.ambient_dim();
        let mut rng = ChaCha8Rng::seed_from_u64(3000 + inst as u64);
        for k in 0..200usize {
            let xi = match k {
                0..=49 => random_product_vector(dims, &mut rng),
                50..=99 => random_entangled_vector(dims, &mut rng),
                _ => mat::random_unit_vector(d, &mut rng),
            };
            // is_factorizable runs the three characterizations internally
            // and returns Err(Inconsistency) on any disagreement.
            let cls = unital::is_factorizable(&xi, &f, &t)
                .expect("the three factorizability tests must agree");
            let oracle = schmidt_oracle(&xi, dims);
            assert_eq!(
                cls.is_factorizable, oracle,
                "oracle mismatch on instance {dims:?}, vector {k}"
            );
            if k < 50 {
                assert!(cls.is_factorizable, "constructed product vector must pass");
            }
            if (50..100).contains(&k) {
                assert!(!cls.is_factorizable, "constructed entangled vector must fail");
            }
            checked += 1;
        }
    }
    report(
        "3 (factorizability equivalence)",
        checked == 1000,
        &format!("{checked} vectors, zero disagreements, oracle concurs"),
    );
}

#[test]
fn criterion_4_phi_calculus() {
    let t = tol();
    let mut worst_inter = 0.0f64;
    let mut worst_comm = 0.0f64;
    let mut min_inject = f64::INFINITY;
    let mut worst_orth = 0.0f64;
    let mut worst_partition = 0.0f64;
    for (inst, dims) in standard_site_lists().iter().enumerate() {
        let (f, omega) = plain_instance(dims);
        let u = UnitalSpec::new(Arc::clone(&f), omega, &t).unwrap();
        let masks = f.all_masks();
        for &a in &masks {
            let pa = u.phi_projection(a).unwrap();
            for &b in &masks {
                let pb = u.phi_projection(b).unwrap();
                let pab = u.phi_projection(a & b).unwrap();
                worst_inter = worst_inter.max(pa.mul(&pb).sub(&pab).norm());
                worst_comm = worst_comm.max(pa.mul(&pb).sub(&pb.mul(&pa)).norm());
                if a != b {
                    min_inject = min_inject.min(pa.sub(&pb).op_norm());
                }
                if a & b == 0 {
                    let p0 = u.phi_projection(0).unwrap();
                    worst_orth = worst_orth.max(pa.mul(&pb.sub(&p0)).norm());
                }
            }
        }
        // partition product rule over 20 seeded random choice functions
        let mut rng = ChaCha8Rng::seed_from_u64(4000 + inst as u64);
        for _ in 0..20 {
            let mut product = MatrixC::identity(f.ambient_dim());
            let mut expectations = Complex64::ONE;
            for &atom in &f.atom_masks() {
                let alg = f.factor_of(atom).unwrap();
                let mut op = MatrixC::zeros(f.ambient_dim(), f.ambient_dim());
                for b in alg.basis() {
                    let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    op = op.add(&b.scale(c));
                }
                expectations *= u.omega().dot(&op.mul(u.omega()));
                product = product.mul(&op);
            }
            let joint = u.omega().dot(&product.mul(u.omega()));
            worst_partition = worst_partition.max((joint - expectations).norm());
        }
    }
    let pass = worst_inter <= 1e-9
        && worst_comm <= 1e-9
        && min_inject > 0.5
        && worst_orth <= 1e-9
        && worst_partition <= 1e-9;
    report(
        "4 (phi calculus)",
        pass,
        &format!(
            "phi-intersection {worst_inter:.2e}, commutation {worst_comm:.2e}, \
             injectivity gap {min_inject:.2}, orthogonality {worst_orth:.2e}, \
             partition rule {worst_partition:.2e}"
        ),
    );
}

#[test]
fn criterion_5_spectrum() {
    let t = tol();
    let mut worst_subspace = 0.0f64;
    for dims in standard_site_lists() {
        let (f, omega) = plain_instance(&dims);
        let u = UnitalSpec::new(Arc::clone(&f), omega, &t).unwrap();
        let r = spectrum::spectral_resolution(&u, &t).unwrap();

        // dimensions partition the ambient space
        let total: usize = r.points().iter().map(|p| p.dim()).sum();
        assert_eq!(total, f.ambient_dim());

        // label-level identities, exact
        let full = f.full_mask();
        for x in 0..=full {
            for y in 0..=full {
                let sx = spectrum::spectral_set(&r, x);
                let sy = spectrum::spectral_set(&r, y);
                let sxy = spectrum::spectral_set(&r, x & y);
                let inter: Vec<usize> = sx.iter().copied().filter(|i| sy.contains(i)).collect();
                assert_eq!(inter, sxy, "S_xy meet law at ({x:#b},{y:#b})");
                assert!(spectrum::check_projection_composition(&r, x, y).unwrap());
            }
        }
        let k = spectrum::counting_map(&r).unwrap();
        for (i, p) in r.points().iter().enumerate() {
            assert_eq!(k[i], p.label.count_ones() as usize, "K = |A|");
            // K-additivity over the atom partition
            let parts: u32 =
                f.atom_masks().iter().map(|&a| (p.label & a).count_ones()).sum();
            assert_eq!(parts, p.label.count_ones());
        }

        // eigenspace product rule across per-atom label events
        let ps = u.partition_split(&t).unwrap();
        let n = f.n_sites();
        let mut event = vec![1u8; n]; // 1 = unit slot, 2 = excited, 3 = both
        'events: loop {
            // LHS: eigenspaces whose label matches the event at every atom
            let mut lhs_cols: Vec<MatrixC> = Vec::new();
            for p in r.points() {
                let ok = (0..n).all(|q| {
                    let excited = p.label & (1 << q) != 0;
                    (event[q] & if excited { 2 } else { 1 }) != 0
                });
                if ok {
                    for j in 0..p.basis.cols() {
                        lhs_cols.push(p.basis.col(j));
                    }
                }
            }
            // RHS: tensor product of per-leg subspaces through the split
            let mut leg_basis = MatrixC::identity(1);
            for (q, &g) in ps.leg_dims.iter().enumerate() {
                let cols: Vec<usize> = match event[q] {
                    1 => vec![0],
                    2 => (1..g).collect(),
                    _ => (0..g).collect(),
                };
                let sel = MatrixC::from_fn(g, cols.len(), |i, j| {
                    if i == cols[j] {
                        Complex64::ONE
                    } else {
                        Complex64::ZERO
                    }
                });
                leg_basis = leg_basis.kron(&sel).unwrap();
            }
            let rhs = ps.unitary.mul(&leg_basis);
            let lhs = MatrixC::from_columns(&lhs_cols);
            worst_subspace = worst_subspace.max(span_deviation(&lhs, &rhs));
            // advance the ternary odometer
            for q in 0..n {
                event[q] += 1;
                if event[q] <= 3 {
                    continue 'events;
                }
                event[q] = 1;
            }
            break;
        }
    }
    let pass = worst_subspace <= 1e-8;
    report(
        "5 (spectrum)",
        pass,
        &format!("label laws exact, subspace product rule {worst_subspace:.2e}"),
    );
}

#[test]
fn criterion_6_fock_classification() {
    let t = tol();
    let mut worst_conj = 0.0f64;
    let mut worst_exp_inner = 0.0f64;
    let mut worst_additive = 0.0f64;
    let mut all_total = true;
    for (inst, dims) in standard_site_lists().iter().enumerate() {
        for scramble in [None, Some(6600 + inst as u64)] {
            let (f, omega) = match scramble {
                None => plain_instance(dims),
                Some(seed) => scrambled_instance(dims, seed),
            };
            let d = f.ambient_dim();
            let u = UnitalSpec::new(Arc::clone(&f), omega, &t).unwrap();
            let r = spectrum::spectral_resolution(&u, &t).unwrap();
            let cls = fock::classify_to_fock(&u, &r, 77, &t).unwrap();
            worst_conj = worst_conj.max(cls.conjugation_deviation);
            let expected_legs: Vec<usize> = dims.iter().map(|&dp| dp - 1).collect();
            assert_eq!(cls.fock.leg_dims(), &expected_legs[..]);

            // multiplicative totality: 50 random Exp vectors span everything
            let mut rng = ChaCha8Rng::seed_from_u64(6000 + inst as u64);
            let chaos: Vec<&unifact::spectrum::SpectralPoint> =
                r.points().iter().filter(|p| p.label.count_ones() == 1).collect();
            let sample_chaos = |rng: &mut ChaCha8Rng| {
                let mut v = MatrixC::zeros(d, 1);
                for p in &chaos {
                    let coeff = mat::random_gaussian(p.basis.cols(), 1, rng)
                        .scale(Complex64::new(0.4, 0.0));
                    v = v.add(&p.basis.mul(&coeff));
                }
                v
            };
            let mut exp_cols = Vec::with_capacity(50);
            for _ in 0..50 {
                let g = sample_chaos(&mut rng);
                exp_cols.push(fock::exp_map(&u, &r, &g, &t).unwrap());
            }
            let span = MatrixC::from_columns(&exp_cols);
            all_total &= span.rank(&t) == d;

            // Exp inner products against the atomic spectral formula
            for _ in 0..10 {
                let g = sample_chaos(&mut rng);
                let h = sample_chaos(&mut rng);
                let eg = fock::exp_map(&u, &r, &g, &t).unwrap();
                let eh = fock::exp_map(&u, &r, &h, &t).unwrap();
                let direct = eh.dot(&eg);
                let measure = spectrum::vector_measure(&r, &h, &g).unwrap();
                let mut closed = Complex64::ONE;
                for (p, m) in r.points().iter().zip(&measure) {
                    if p.label.count_ones() == 1 {
                        closed *= Complex64::ONE + m;
                    }
                }
                worst_exp_inner = worst_exp_inner.max((direct - closed).norm());
            }

            // additive vectors = K=1 eigenspace sum
            let mut rows: Vec<MatrixC> = Vec::new();
            let id = MatrixC::identity(d);
            for mask in f.all_masks() {
                let px = u.phi_projection(mask).unwrap();
                let pxc = u.phi_projection(f.complement(mask)).unwrap();
                rows.push(id.sub(&px).sub(&(*pxc).clone()));
            }
            let mut stacked = rows[0].clone();
            for row in &rows[1..] {
                stacked = stacked.vstack(row);
            }
            let additive = stacked.nullspace_basis(&t).unwrap();
            let chaos_cols: Vec<MatrixC> = chaos
                .iter()
                .flat_map(|p| (0..p.basis.cols()).map(|j| p.basis.col(j)).collect::<Vec<_>>())
                .collect();
            let chaos_basis = MatrixC::from_columns(&chaos_cols);
            worst_additive = worst_additive.max(span_deviation(&additive, &chaos_basis));
        }
    }
    let pass =
        worst_conj <= 1e-7 && all_total && worst_exp_inner <= 1e-8 && worst_additive <= 1e-8;
    report(
        "6 (Fock classification)",
        pass,
        &format!(
            "conjugation {worst_conj:.2e}, totality {all_total}, \
             exp inner {worst_exp_inner:.2e}, additive-chaos {worst_additive:.2e}"
        ),
    );
}

#[test]
fn criterion_7_unit_discovery_pipeline() {
    let started = std::time::Instant::now();
    let t = tol();
    let mut count = 0usize;
    for (inst, dims) in standard_site_lists().iter().enumerate() {
        for scramble in [None, Some(7700 + inst as u64)] {
            let f = match scramble {
                None => Arc::new(FactorizationSpec::from_sites(
                    SiteSpec::new(dims.to_vec()).unwrap(),
                )),
                Some(seed) => Arc::new(FactorizationSpec::from_sites_scrambled(
                    SiteSpec::new(dims.to_vec()).unwrap(),
                    seed,
                )),
            };
            let xi = unital::find_factorizable_vector(&f, 7000 + inst as u64, &t).unwrap();
            let u = UnitalSpec::new(Arc::clone(&f), xi, &t).unwrap();
            let r = spectrum::spectral_resolution(&u, &t).unwrap();
            let cls = fock::classify_to_fock(&u, &r, 78, &t).unwrap();
            let expected: Vec<usize> = dims.iter().map(|&dp| dp - 1).collect();
            assert_eq!(cls.fock.leg_dims(), &expected[..], "legs on {dims:?} {scramble:?}");
            count += 1;
        }
    }
    let elapsed = started.elapsed();
    report(
        "7 (unit discovery pipeline)",
        count == 10 && elapsed.as_secs() < 120,
        &format!("{count}/10 instances classified, {elapsed:.1?} of 120s"),
    );
}

#[test]
fn criterion_8_lemmas() {
    let started = std::time::Instant::now();
    // remainder inequality on 10^4 random vectors
    let mut rng = ChaCha8Rng::seed_from_u64(8001);
    for _ in 0..10_000 {
        let n = rng.random_range(1..=20);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=3.0)).collect();
        let (_, _, holds) = lemmas::remainder_inequality_check(&x).unwrap();
        assert!(holds);
    }

    // dominance on 500 random exclusion vectors via the exact DP
    let mut rng = ChaCha8Rng::seed_from_u64(8002);
    for _ in 0..500 {
        let n = rng.random_range(1..=12);
        let q: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
        let out = lemmas::dominance_check(&lemmas::ExclusionVector::new(q).unwrap());
        assert!(out.holds);
    }

    // dissecting product limit: 1e-4 at depth 16 for TV ≤ 2, exact to
    // 1e-9 for purely atomic measures
    let mut rng = ChaCha8Rng::seed_from_u64(8003);
    let mut worst_mixed = 0.0f64;
    let mut worst_atomic = 0.0f64;
    for case in 0..20 {
        let n_atoms = rng.random_range(0..=4);
        let mut locations: Vec<f64> = (0..n_atoms).map(|_| rng.random_range(0.0..1.0)).collect();
        locations.sort_by(f64::total_cmp);
        locations.dedup();
        let atoms: Vec<(f64, Complex64)> = locations
            .iter()
            .map(|&x| {
                (x, Complex64::new(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3)))
            })
            .collect();
        let atomic_only = case % 2 == 0;
        let density: Option<Vec<Complex64>> = if atomic_only {
            None
        } else {
            Some(
                (0..16)
                    .map(|_| {
                        Complex64::new(rng.random_range(-0.4..0.4), rng.random_range(-0.4..0.4))
                    })
                    .collect(),
            )
        };
        // keep the draw inside the total-variation budget of the bound
        let tv_draw = atoms.iter().map(|(_, v)| v.norm()).sum::<f64>()
            + density
                .as_ref()
                .map(|d| d.iter().map(|v| v.norm()).sum::<f64>() / d.len() as f64)
                .unwrap_or(0.0);
        let shrink = if tv_draw > 2.0 { 1.9 / tv_draw } else { 1.0 };
        let atoms: Vec<(f64, Complex64)> =
            atoms.into_iter().map(|(x, v)| (x, v * shrink)).collect();
        let density = density.map(|d| d.into_iter().map(|v| v * shrink).collect());
        let nu = lemmas::DiscreteComplexMeasure::new(atoms, density).unwrap();
        assert!(nu.total_variation() <= 2.0);
        let out = lemmas::dissecting_product_limit(&nu, 16).unwrap();
        let err = (out.products.last().unwrap() - out.rhs).norm();
        if atomic_only {
            worst_atomic = worst_atomic.max(err);
        } else {
            worst_mixed = worst_mixed.max(err);
        }
    }
    assert!(worst_atomic <= 1e-9, "atomic convergence {worst_atomic:.2e}");
    assert!(worst_mixed <= 1e-4, "mixed convergence {worst_mixed:.2e}");

    // classicality limit
    let mut worst_cls = 0.0f64;
    for p0 in [0.1, (-1.0f64).exp(), 0.5, 0.9] {
        for m in 0..=5 {
            let (exact, limit) = lemmas::classicality_limit(p0, m, 100_000).unwrap();
            worst_cls = worst_cls.max((exact - limit).abs());
        }
        let (_, full) = lemmas::classicality_limit(p0, 200, 1000).unwrap();
        assert!((full - 1.0).abs() < 1e-12, "terminal identity at p0={p0}");
    }
    assert!(worst_cls <= 1e-3, "classicality limit {worst_cls:.2e}");

    let elapsed = started.elapsed();
    report(
        "8 (lemmas)",
        elapsed.as_secs() < 60,
        &format!(
            "dominance 500/500, remainder 10000/10000, dissecting atomic {worst_atomic:.2e} \
             mixed {worst_mixed:.2e}, classicality {worst_cls:.2e}, {elapsed:.1?} of 60s"
        ),
    );
}

#[test]
fn criterion_9_commutative_bridge() {
    let t = tol();
    let (f, omega) =
        factorization::build_from_product_probability(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
    let f = Arc::new(f);
    let u = UnitalSpec::new(Arc::clone(&f), omega, &t).unwrap();

    // multiplicative ⟺ factorizable ∧ ⟨Ω,ξ⟩ = 1, on constructed positives
    // and negatives (is_multiplicative cross-checks the two routes and
    // fails loudly if they ever disagree)
    let mut rng = ChaCha8Rng::seed_from_u64(9001);
    let mut positives = 0;
    for k in 0..200 {
        let raw = if k % 2 == 0 {
            random_product_vector(&[2, 2], &mut rng)
        } else {
            random_entangled_vector(&[2, 2], &mut rng)
        };
        let pairing = u.omega().dot(&raw);
        if pairing.norm() < 0.05 {
            continue;
        }
        let xi = raw.scale(Complex64::ONE / pairing);
        let is_mult = u.is_multiplicative(&xi, &t).unwrap();
        let expected = unital::is_factorizable(&xi, &f, &t).unwrap().is_factorizable;
        assert_eq!(is_mult, expected);
        if is_mult {
            positives += 1;
        }
    }
    assert!(positives >= 50, "need constructed positives, got {positives}");

    let r = spectrum::spectral_resolution(&u, &t).unwrap();
    let cls = fock::classify_to_fock(&u, &r, 91, &t).unwrap();
    assert_eq!(cls.fock.leg_dims(), &[1, 1]);

    // the unit's spectral measure is a nontrivial independence probability
    let nu = SpectralProbability::from_vector(&r, u.omega()).unwrap();
    let (ok, dev) = spectrum::is_spectral_independence_probability(&r, &nu, &t).unwrap();
    assert!(ok, "independence deviation {dev:.2e}");

    report(
        "9 (commutative bridge)",
        true,
        &format!("certified, {positives} multiplicative positives, Fock legs (1,1)"),
    );
}

/// Blackness conditions (I)–(IV) must all fail simultaneously on every
/// sites instance: finite counting maps leave no room for black behavior.
#[test]
fn black_conditions_all_fail_at_finite_scale() {
    let t = tol();
    for dims in standard_site_lists() {
        let (f, omega) = plain_instance(&dims);
        let u = UnitalSpec::new(Arc::clone(&f), omega, &t).unwrap();
        let r = spectrum::spectral_resolution(&u, &t).unwrap();

        // (IV) K is finite everywhere — trivially, labels are finite sets.
        let k = spectrum::counting_map(&r).unwrap();
        assert!(k.iter().all(|&v| v <= f.n_sites()));

        // (II) fails: a non-zero additive vector exists.
        let chaos_point =
            r.points().iter().find(|p| p.label.count_ones() == 1).expect("first chaos");
        let additive = chaos_point.basis.col(0);
        assert!(u.is_additive(&additive, &t).unwrap());
        assert!(additive.norm() > 0.5);

        // (I) fails: Exp of that vector is multiplicative and differs
        // from Ω.
        let g = additive.scale(Complex64::new(0.5, 0.0));
        let exp = fock::exp_map(&u, &r, &g, &t).unwrap();
        assert!(u.is_multiplicative(&exp, &t).unwrap());
        assert!(exp.sub(u.omega()).norm() > 0.1);

        // (III) fails: μ_Exp normalized is a non-Dirac independence
        // probability.
        let nu = SpectralProbability::from_vector(&r, &exp.normalized().unwrap()).unwrap();
        let (ok, _) = spectrum::is_spectral_independence_probability(&r, &nu, &t).unwrap();
        assert!(ok);
        assert!(nu.weights()[r.empty_point()] < 1.0 - 1e-3);
    }
}
