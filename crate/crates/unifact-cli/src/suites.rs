//! Law suites driven by `verify`. Each suite emits one check per law with
//! the worst observed deviation; thresholds are pinned here.


use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unifact::algebra::{self, AlgebraBasis};
use unifact::factorization::{self};
use unifact::mat::{self, span_deviation, MatrixC};
use unifact::spectrum::{self, SpectralProbability};
use unifact::unital::{self};
use unifact::{fock, lemmas, Result, Tolerance};

use crate::instance::Instance;
use crate::report::Suite;

pub const ALL_SUITES: [&str; 6] =
    ["algebra", "factorization", "unital", "spectrum", "fock", "lemmas"];

pub fn run_suite(
    name: &str,
    instance: &Instance,
    tol: &Tolerance,
) -> Result<Suite> {
    match name {
        "algebra" => algebra_suite(instance, tol),
        "factorization" => factorization_suite(instance, tol),
        "unital" => unital_suite(instance, tol),
        "spectrum" => spectrum_suite(instance, tol),
        "fock" => fock_suite(instance, tol),
        "lemmas" => lemmas_suite(instance, tol),
        other => Err(unifact::Error::Contract(format!("unknown suite '{other}'"))),
    }
}

fn algebra_suite(instance: &Instance, tol: &Tolerance) -> Result<Suite> {
    let f = instance.build_factorization()?;
    let mut suite = Suite::new("algebra");
    let mut worst_dc = 0.0f64;
    let mut worst_dm = 0.0f64;
    let masks = f.all_masks();
    for &m in &masks {
        let x = f.factor_of(m)?;
        let xp = algebra::commutant(&x, tol)?;
        let xpp = algebra::commutant(&xp, tol)?;
        worst_dc = worst_dc.max(span_deviation(&x.span_matrix(), &xpp.span_matrix()));
    }
    for &a in &masks {
        for &b in &masks {
            if b < a {
                continue;
            }
            let x = f.factor_of(a)?;
            let y = f.factor_of(b)?;
            let join = algebra::join_algebras(&x, &y, tol)?;
            let lhs = algebra::commutant(&join, tol)?;
            let rhs = algebra::meet_algebras(
                &algebra::commutant(&x, tol)?,
                &algebra::commutant(&y, tol)?,
                tol,
            )?;
            worst_dm = worst_dm.max(span_deviation(&lhs.span_matrix(), &rhs.span_matrix()));
        }
    }
    suite.push("double-commutant", worst_dc, 1e-8);
    suite.push("de-morgan", worst_dm, 1e-8);
    Ok(suite)
}

fn factorization_suite(instance: &Instance, tol: &Tolerance) -> Result<Suite> {
    let f = instance.build_factorization()?;
    let report = factorization::verify_factorization_seeded(&f, tol, instance.seed)?;
    Ok(Suite { name: "factorization".into(), checks: report.checks })
}

fn unital_suite(instance: &Instance, tol: &Tolerance) -> Result<Suite> {
    let (f, u) = instance.build_unital(tol)?;
    let mut suite = Suite::new("unital");
    suite.push("unit-independence", u.certification_deviation(), 1e-9);

    let masks = f.all_masks();
    let mut worst_inter = 0.0f64;
    let mut worst_comm = 0.0f64;
    let mut inject_ok = true;
    let mut worst_orth = 0.0f64;
    for &a in &masks {
        let pa = u.phi_projection(a)?;
        for &b in &masks {
            let pb = u.phi_projection(b)?;
            let pab = u.phi_projection(a & b)?;
            worst_inter = worst_inter.max(pa.mul(&pb).sub(&pab).norm());
            worst_comm = worst_comm.max(pa.mul(&pb).sub(&pb.mul(&pa)).norm());
            if a != b && pa.sub(&pb).op_norm() <= 0.5 {
                inject_ok = false;
            }
            if a & b == 0 {
                let p0 = u.phi_projection(0)?;
                worst_orth = worst_orth.max(pa.mul(&pb.sub(&p0)).norm());
            }
        }
    }
    suite.push("phi-intersection", worst_inter, 1e-9);
    suite.push("phi-commutation", worst_comm, 1e-9);
    suite.push("phi-injectivity", if inject_ok { 0.0 } else { 1.0 }, 0.5);
    suite.push("phi-orthogonality", worst_orth, 1e-9);

    // partition product rule over seeded random choice functions
    let mut rng = ChaCha8Rng::seed_from_u64(instance.seed.wrapping_add(41));
    let mut worst_partition = 0.0f64;
    for _ in 0..20 {
        let mut product = MatrixC::identity(f.ambient_dim());
        let mut expectations = Complex64::ONE;
        for &atom in &f.atom_masks() {
            let alg = f.factor_of(atom)?;
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
    suite.push("partition-product", worst_partition, 1e-9);

    // multiplicative ⟺ factorizable ∧ ⟨Ω,ξ⟩ = 1 on seeded samples; the
    // two routes are cross-checked inside is_multiplicative, which turns
    // any disagreement into an error.
    let mut rng = ChaCha8Rng::seed_from_u64(instance.seed.wrapping_add(42));
    let mut disagreements = 0usize;
    let mut samples = 0usize;
    while samples < 200 {
        let raw = if samples % 2 == 0 {
            // положительные candidates: vectors in the multiplicative family
            let mut v = MatrixC::identity(1);
            for &g in &u.partition_split(tol)?.leg_dims {
                v = v.kron(&mat::random_unit_vector(g, &mut rng))?;
            }
            u.partition_split(tol)?.unitary.mul(&v)
        } else {
            mat::random_unit_vector(f.ambient_dim(), &mut rng)
        };
        let pairing = u.omega().dot(&raw);
        if pairing.norm() < 0.05 {
            continue;
        }
        let xi = raw.scale(Complex64::ONE / pairing);
        let mult = u.is_multiplicative(&xi, tol)?;
        let fact = unital::is_factorizable(&xi, &f, tol)?.is_factorizable;
        if mult != fact {
            disagreements += 1;
        }
        samples += 1;
    }
    suite.push(
        "multiplicative-equivalence",
        disagreements as f64 / samples as f64,
        0.0,
    );

    // restriction homomorphism through the local splits
    let mut worst_restriction = 0.0f64;
    for &x in &masks {
        if x == 0 || x == f.full_mask() {
            continue;
        }
        let split = u.local_split(x, tol)?;
        let restrict = |y: u32| -> Result<AlgebraBasis> {
            let alg = f.factor_of(y & x)?;
            let (legs, _) = algebra::conjugated_leg_residual(
                &split.iso.adjoint(),
                alg.basis(),
                split.dim_x,
                split.dim_xc,
                true,
            );
            let mut onb = Vec::new();
            mat::extend_orthonormal(&mut onb, &legs, tol);
            AlgebraBasis::from_parts(split.dim_x, onb)
        };
        for &y in &masks {
            let ry = restrict(y)?;
            let ryc = restrict(f.complement(y))?;
            let comm = algebra::commutant(&ry, tol)?;
            worst_restriction = worst_restriction
                .max(span_deviation(&comm.span_matrix(), &ryc.span_matrix()));
            for &z in &masks {
                if z < y {
                    continue;
                }
                let rz = restrict(z)?;
                let meet = algebra::meet_algebras(&ry, &rz, tol)?;
                let target = restrict(y & z)?;
                worst_restriction =
                    worst_restriction.max(span_deviation(&meet.span_matrix(), &target.span_matrix()));
                let join = algebra::join_algebras(&ry, &rz, tol)?;
                let target = restrict(y | z)?;
                worst_restriction =
                    worst_restriction.max(span_deviation(&join.span_matrix(), &target.span_matrix()));
            }
        }
    }
    suite.push("restriction-homomorphism", worst_restriction, 1e-8);
    Ok(suite)
}

fn spectrum_suite(instance: &Instance, tol: &Tolerance) -> Result<Suite> {
    let (f, u) = instance.build_unital(tol)?;
    let r = spectrum::spectral_resolution(&u, tol)?;
    let mut suite = Suite::new("spectrum");

    let total: usize = r.points().iter().map(|p| p.dim()).sum();
    suite.push(
        "eigenspace-dimensions",
        (total as f64 - f.ambient_dim() as f64).abs(),
        0.0,
    );

    let full = f.full_mask();
    let mut sets_exact = true;
    let mut compose_exact = true;
    for x in 0..=full {
        for y in 0..=full {
            let sx = spectrum::spectral_set(&r, x);
            let sy = spectrum::spectral_set(&r, y);
            let sxy = spectrum::spectral_set(&r, x & y);
            let inter: Vec<usize> = sx.iter().copied().filter(|i| sy.contains(i)).collect();
            sets_exact &= inter == sxy;
            compose_exact &= spectrum::check_projection_composition(&r, x, y)?;
        }
    }
    suite.push("spectral-sets", if sets_exact { 0.0 } else { 1.0 }, 0.0);
    suite.push("projections-composition", if compose_exact { 0.0 } else { 1.0 }, 0.0);

    let k = spectrum::counting_map(&r)?;
    let mut k_ok = true;
    for (i, p) in r.points().iter().enumerate() {
        k_ok &= k[i] == p.label.count_ones() as usize;
        let parts: u32 = f.atom_masks().iter().map(|&a| (p.label & a).count_ones()).sum();
        k_ok &= parts == p.label.count_ones();
    }
    suite.push("counting-map", if k_ok { 0.0 } else { 1.0 }, 0.0);

    // eigenspace product rule over per-atom label events
    let ps = u.partition_split(tol)?;
    let n = f.n_sites();
    let mut worst_subspace = 0.0f64;
    let mut event = vec![1u8; n];
    'events: loop {
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
            leg_basis = leg_basis.kron(&sel)?;
        }
        let rhs = ps.unitary.mul(&leg_basis);
        worst_subspace = worst_subspace.max(span_deviation(&MatrixC::from_columns(&lhs_cols), &rhs));
        for q in 0..n {
            event[q] += 1;
            if event[q] <= 3 {
                continue 'events;
            }
            event[q] = 1;
        }
        break;
    }
    suite.push("projections-and-subspaces", worst_subspace, 1e-8);

    // spectral independence probabilities: the Dirac mass at ∅ and μ_Ω
    // pass, a measure with no mass at ∅ fails
    let dirac = SpectralProbability::dirac_empty(&r);
    let (ok_dirac, _) = spectrum::is_spectral_independence_probability(&r, &dirac, tol)?;
    let mu_omega = SpectralProbability::from_vector(&r, u.omega())?;
    let (ok_omega, _) = spectrum::is_spectral_independence_probability(&r, &mu_omega, tol)?;
    let mut no_empty = vec![0.0; r.points().len()];
    let off = (0..r.points().len()).find(|&i| i != r.empty_point()).unwrap();
    no_empty[off] = 1.0;
    let (ok_bad, _) = spectrum::is_spectral_independence_probability(
        &r,
        &SpectralProbability::new(no_empty)?,
        tol,
    )?;
    let independence_ok = ok_dirac && ok_omega && !ok_bad;
    suite.push("spectral-independence", if independence_ok { 0.0 } else { 1.0 }, 0.0);
    Ok(suite)
}

fn fock_suite(instance: &Instance, tol: &Tolerance) -> Result<Suite> {
    let (f, u) = instance.build_unital(tol)?;
    let r = spectrum::spectral_resolution(&u, tol)?;
    let mut suite = Suite::new("fock");
    let d = f.ambient_dim();

    let cls = fock::classify_to_fock(&u, &r, instance.seed.wrapping_add(43), tol)?;
    suite.push("vacuum-to-unit", cls.vacuum_deviation, 1e-8);
    suite.push("exp-intertwine", cls.exp_deviation, 1e-8);
    suite.push("fock-conjugation", cls.conjugation_deviation, 1e-7);

    let chaos: Vec<&spectrum::SpectralPoint> =
        r.points().iter().filter(|p| p.label.count_ones() == 1).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(instance.seed.wrapping_add(44));
    let sample_chaos = |rng: &mut ChaCha8Rng| {
        let mut v = MatrixC::zeros(d, 1);
        for p in &chaos {
            let coeff =
                mat::random_gaussian(p.basis.cols(), 1, rng).scale(Complex64::new(0.4, 0.0));
            v = v.add(&p.basis.mul(&coeff));
        }
        v
    };

    let mut exp_cols = Vec::with_capacity(50);
    for _ in 0..50 {
        let g = sample_chaos(&mut rng);
        exp_cols.push(fock::exp_map(&u, &r, &g, tol)?);
    }
    let rank = MatrixC::from_columns(&exp_cols).rank(tol);
    suite.push("multiplicative-totality", (d as f64 - rank as f64).abs(), 0.0);

    let mut worst_inner = 0.0f64;
    for _ in 0..10 {
        let g = sample_chaos(&mut rng);
        let h = sample_chaos(&mut rng);
        let eg = fock::exp_map(&u, &r, &g, tol)?;
        let eh = fock::exp_map(&u, &r, &h, tol)?;
        let direct = eh.dot(&eg);
        let measure = spectrum::vector_measure(&r, &h, &g)?;
        let mut closed = Complex64::ONE;
        for (p, m) in r.points().iter().zip(&measure) {
            if p.label.count_ones() == 1 {
                closed *= Complex64::ONE + m;
            }
        }
        worst_inner = worst_inner.max((direct - closed).norm());
    }
    suite.push("exp-inner-product", worst_inner, 1e-8);

    // φ_x(Exp(g)) = Exp(φ_x(g)) for every index
    let mut worst_phi_exp = 0.0f64;
    for _ in 0..5 {
        let g = sample_chaos(&mut rng);
        let eg = fock::exp_map(&u, &r, &g, tol)?;
        for mask in f.all_masks() {
            let lhs = u.phi_apply(mask, &eg)?;
            let rhs = fock::exp_map(&u, &r, &u.phi_apply(mask, &g)?, tol)?;
            worst_phi_exp = worst_phi_exp.max(lhs.sub(&rhs).norm());
        }
    }
    suite.push("exp-phi-compatibility", worst_phi_exp, 1e-8);

    // elementary tensors of per-leg vectors are total
    let ps = u.partition_split(tol)?;
    let mut product_cols = Vec::with_capacity(50);
    for _ in 0..50 {
        let mut v = MatrixC::identity(1);
        for &g in &ps.leg_dims {
            v = v.kron(&mat::random_unit_vector(g, &mut rng))?;
        }
        product_cols.push(ps.unitary.mul(&v));
    }
    let rank = MatrixC::from_columns(&product_cols).rank(tol);
    suite.push("products-total", (d as f64 - rank as f64).abs(), 0.0);

    // first chaos = additive vectors
    let id = MatrixC::identity(d);
    let mut stacked: Option<MatrixC> = None;
    for mask in f.all_masks() {
        let px = u.phi_projection(mask)?;
        let pxc = u.phi_projection(f.complement(mask))?;
        let row = id.sub(&px).sub(&pxc);
        stacked = Some(match stacked {
            None => row,
            Some(s) => s.vstack(&row),
        });
    }
    let additive = stacked.unwrap().nullspace_basis(tol)?;
    let chaos_cols: Vec<MatrixC> = chaos
        .iter()
        .flat_map(|p| (0..p.basis.cols()).map(|j| p.basis.col(j)).collect::<Vec<_>>())
        .collect();
    suite.push(
        "first-chaos-additive",
        span_deviation(&additive, &MatrixC::from_columns(&chaos_cols)),
        1e-8,
    );
    Ok(suite)
}

fn lemmas_suite(instance: &Instance, _tol: &Tolerance) -> Result<Suite> {
    let mut suite = Suite::new("lemmas");
    let mut rng = ChaCha8Rng::seed_from_u64(instance.seed.wrapping_add(45));

    let mut remainder_failures = 0usize;
    for _ in 0..2000 {
        let n = rng.random_range(1..=20);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=3.0)).collect();
        let (_, _, holds) = lemmas::remainder_inequality_check(&x)?;
        if !holds {
            remainder_failures += 1;
        }
    }
    suite.push("elementary-inequality", remainder_failures as f64, 0.0);

    let mut dominance_failures = 0usize;
    for _ in 0..200 {
        let n = rng.random_range(1..=12);
        let q: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
        if !lemmas::dominance_check(&lemmas::ExclusionVector::new(q)?).holds {
            dominance_failures += 1;
        }
    }
    suite.push("random-set-dominance", dominance_failures as f64, 0.0);

    let mut worst_atomic = 0.0f64;
    let mut worst_mixed = 0.0f64;
    for case in 0..10 {
        let n_atoms = rng.random_range(0..=4);
        let mut locations: Vec<f64> = (0..n_atoms).map(|_| rng.random_range(0.0..1.0)).collect();
        locations.sort_by(f64::total_cmp);
        locations.dedup();
        let atoms: Vec<(f64, Complex64)> = locations
            .iter()
            .map(|&x| (x, Complex64::new(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3))))
            .collect();
        let density: Option<Vec<Complex64>> = if case % 2 == 0 {
            None
        } else {
            Some(
                (0..16)
                    .map(|_| Complex64::new(rng.random_range(-0.4..0.4), rng.random_range(-0.4..0.4)))
                    .collect(),
            )
        };
        let atomic = density.is_none();
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
        let nu = lemmas::DiscreteComplexMeasure::new(atoms, density)?;
        let out = lemmas::dissecting_product_limit(&nu, 16)?;
        let err = (out.products.last().unwrap() - out.rhs).norm();
        if atomic {
            worst_atomic = worst_atomic.max(err);
        } else {
            worst_mixed = worst_mixed.max(err);
        }
    }
    suite.push("limit-involving-complex-measure-atomic", worst_atomic, 1e-9);
    suite.push("limit-involving-complex-measure", worst_mixed, 1e-4);

    let mut worst_cls = 0.0f64;
    for p0 in [0.1, (-1.0f64).exp(), 0.5, 0.9] {
        for m in 0..=5 {
            let (exact, limit) = lemmas::classicality_limit(p0, m, 100_000)?;
            worst_cls = worst_cls.max((exact - limit).abs());
        }
        let (_, full) = lemmas::classicality_limit(p0, 200, 1000)?;
        worst_cls = worst_cls.max((full - 1.0).abs());
    }
    suite.push("new-condition-for-classicality", worst_cls, 1e-3);
    Ok(suite)
}
