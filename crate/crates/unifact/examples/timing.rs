use std::time::Instant;
use unifact::*;
use unifact::factorization::*;
fn main() {
    let tol = Tolerance::default();
    let mut total = std::time::Duration::ZERO;
    for dims in [vec![2,2], vec![2,3], vec![3,3], vec![2,2,2], vec![2,2,3]] {
        let t = Instant::now();
        let f = FactorizationSpec::from_sites(SiteSpec::new(dims.clone()).unwrap());
        let report = verify_factorization(&f, &tol).unwrap();
        let el = t.elapsed();
        total += el;
        let worst = report.checks.iter().map(|c| c.max_deviation).fold(0.0f64, f64::max);
        println!("{dims:?}: all_pass={} worst={:.2e} in {:.2?}", report.all_pass(), worst, el);
    }
    println!("total {total:.2?}");
}
