// Norming constants κ_n = log(-ψ'/ψ̇) and the norm identity ‖ψ‖² = -ψ'ψ̇.

use stark_spectrum::potential::Potential;
use stark_spectrum::spectrum::{eigenvalues, norm_sq_psi};

fn main() {
    let q = Potential::alg(0.5, 3.0, 2.0).unwrap();
    println!(
        "{:>3} {:>20} {:>20} {:>10} {:>12}",
        "n", "kappa", "kappa (norm)", "gap", "norm ratio"
    );
    for rec in eigenvalues(&q, 1..=12).unwrap() {
        let check = norm_sq_psi(&q, &rec).unwrap();
        let ratio = rec.norm_sq * (1.5 * std::f64::consts::PI * rec.n as f64).powf(-1.0 / 3.0);
        println!(
            "{:>3} {:>20.14} {:>20.14} {:>10.1e} {:>12.6}",
            rec.n, rec.kappa, rec.kappa_alt, check.gap, ratio
        );
        assert!((rec.kappa - rec.kappa_alt).abs() < 1e-6);
    }
}
