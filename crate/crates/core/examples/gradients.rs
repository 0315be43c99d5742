// Directional derivatives of λ_n and κ_n against central differences.

use stark_spectrum::experiment::{compare_gradient, relative_gap};
use stark_spectrum::potential::Potential;

fn main() {
    let q = Potential::exp(-0.3, 1.0, 2.0).unwrap();
    let v = Potential::bump(1.0, 2.0, 1.0, 2.0).unwrap();
    for n in [1, 4, 9] {
        let c = compare_gradient(&q, n, &v).unwrap();
        println!(
            "n = {n}: dlambda {:.10} (fd {:.10}), dkappa {:.10} (fd {:.10})",
            c.d_lambda, c.fd_lambda, c.d_kappa, c.fd_kappa
        );
        assert!(relative_gap(c.d_lambda, c.fd_lambda) < 1e-4);
        assert!(relative_gap(c.d_kappa, c.fd_kappa) < 1e-3);
    }
}
