// Shooting against the Richardson-extrapolated finite-difference oracle.

use stark_spectrum::oracle::{oracle_extrapolated, DEFAULT_MESHES};
use stark_spectrum::potential::Potential;
use stark_spectrum::spectrum::eigenvalues;

fn main() {
    let q = Potential::bump(0.4, 2.0, 1.0, 2.0).unwrap();
    let n_max = 8;
    let shoot = eigenvalues(&q, 1..=n_max).unwrap();
    let oracle = oracle_extrapolated(&q, n_max, &DEFAULT_MESHES).unwrap();
    println!("{:>3} {:>12} {:>12} {:>12}", "n", "dlambda", "dkappa", "oracle err");
    for (s, o) in shoot.iter().zip(&oracle) {
        let dl = s.lambda - o.lambda.value;
        let dk = s.kappa - o.kappa.value;
        println!("{:>3} {:>12.2e} {:>12.2e} {:>12.2e}", s.n, dl, dk, o.lambda.error);
        assert!(dl.abs() < 1e-6 && dk.abs() < 1e-4);
    }
}
