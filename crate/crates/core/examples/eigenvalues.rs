// Dirichlet eigenvalues of -d² + x + q by shooting, next to the unperturbed -a_n.

use stark_spectrum::airy::airy_zero;
use stark_spectrum::potential::Potential;
use stark_spectrum::spectrum::{eigenvalues, negative_eigenvalues};

fn main() {
    let q = Potential::exp(0.3, 1.0, 2.0).unwrap();
    println!("{:>3} {:>22} {:>22} {:>10}", "n", "lambda_n(q)", "-a_n", "residual");
    for rec in eigenvalues(&q, 1..=10).unwrap() {
        let a = airy_zero(rec.n).unwrap().a_n;
        println!(
            "{:>3} {:>22.15} {:>22.15} {:>10.1e}",
            rec.n, rec.lambda, -a, rec.shoot_residual
        );
        assert!(rec.lambda > -a);
    }

    // a deep well pulls eigenvalues below zero
    let well = Potential::bump(-8.0, 1.5, 1.0, 2.0).unwrap();
    let neg = negative_eigenvalues(&well).unwrap();
    println!("bump(-8, 1.5, 1): {} negative eigenvalue(s)", neg.len());
    for rec in &neg {
        println!("  lambda_{} = {:.12}", rec.n, rec.lambda);
    }
    assert!(!neg.is_empty());
}
