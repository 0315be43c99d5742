// First-order predictions for λ_n and κ_n, their remainders and decay fits.

use stark_spectrum::asymptotics::build_report;
use stark_spectrum::potential::Potential;
use stark_spectrum::spectrum::eigenvalues;

fn main() {
    let q = Potential::exp(0.3, 1.0, 2.0).unwrap();
    let recs = eigenvalues(&q, 2..=40).unwrap();
    let lambdas: Vec<f64> = recs.iter().map(|r| r.lambda).collect();
    let kappas: Vec<f64> = recs.iter().map(|r| r.kappa).collect();
    let rep = build_report(&q, 2, &lambdas, &kappas, 1e-11, 2).unwrap();
    for (i, n) in (2..=40).enumerate().step_by(6) {
        println!(
            "n = {n:>2}: lambda resid {:>10.3e}, kappa resid {:>10.3e}",
            rep.lambda_resid[i], rep.kappa_resid[i]
        );
    }
    let l = rep.fitted_slope_lambda.unwrap();
    let k = rep.fitted_slope_kappa.unwrap();
    println!("lambda remainder ~ n^{:.3} (± {:.3})", l.slope, l.half_width);
    println!("kappa remainder  ~ n^{:.3} (± {:.3})", k.slope, k.half_width);
    assert!(l.slope < -0.8 && k.slope < -0.8);
}
