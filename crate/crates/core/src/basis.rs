//! Solutions of the unperturbed equation -f'' + x f = z f.
//!
//! ψ₀(z,x) = √π Ai(x - z) and θ₀(z,x) = √π Bi(x - z) have unit Wronskian;
//! s₀ and c₀ are the combinations fixed by the boundary data at x = 0.

use std::f64::consts::PI;

use crate::airy::{airy_eval, airy_eval_scaled};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisValues {
    pub z: f64,
    pub x: f64,
    pub psi0: f64,
    pub psi0_prime: f64,
    pub theta0: f64,
    pub theta0_prime: f64,
    pub s0: f64,
    pub s0_prime: f64,
    pub c0: f64,
    pub c0_prime: f64,
    /// ∂_z s₀ = c₀ - s₀'
    pub s0_dot: f64,
}

impl BasisValues {
    /// ψ₀ θ₀' - ψ₀' θ₀; identically 1.
    pub fn wronskian(&self) -> f64 {
        self.psi0 * self.theta0_prime - self.psi0_prime * self.theta0
    }
}

/// (ψ₀, ψ₀', θ₀, θ₀') at (z, x).
pub fn psi_theta(z: f64, x: f64) -> Result<[f64; 4]> {
    let v = airy_eval(x - z).map_err(|e| match e {
        Error::Overflow { w } => Error::Domain(format!("theta0(z = {z}, x = {x}) overflows: Bi({w}) exceeds f64")),
        other => other,
    })?;
    let k = PI.sqrt();
    Ok([k * v.ai, k * v.ai_prime, k * v.bi, k * v.bi_prime])
}

pub fn basis_eval(z: f64, x: f64) -> Result<BasisValues> {
    if !z.is_finite() || !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("basis at z = {z}, x = {x}")));
    }
    let [p, pp, t, tp] = psi_theta(z, x)?;
    let [p0, pp0, t0, tp0] = psi_theta(z, 0.0)?;
    let s0 = -t0 * p + p0 * t;
    let s0_prime = -t0 * pp + p0 * tp;
    let c0 = tp0 * p - pp0 * t;
    let c0_prime = tp0 * pp - pp0 * tp;
    Ok(BasisValues {
        z,
        x,
        psi0: p,
        psi0_prime: pp,
        theta0: t,
        theta0_prime: tp,
        s0,
        s0_prime,
        c0,
        c0_prime,
        s0_dot: c0 - s0_prime,
    })
}

/// Green kernel J₀(z,x,y) = θ₀(z,x) ψ₀(z,y) - ψ₀(z,x) θ₀(z,y).
///
/// The exponential factors of Ai and Bi are combined in the exponent, so
/// the kernel stays finite wherever its value does.
pub fn green0(z: f64, x: f64, y: f64) -> Result<f64> {
    if !(z.is_finite() && x.is_finite() && y.is_finite()) {
        return Err(Error::Domain(format!("green0 at ({z}, {x}, {y})")));
    }
    if x == y {
        return Ok(0.0);
    }
    let a = airy_eval_scaled(x - z)?;
    let b = airy_eval_scaled(y - z)?;
    let first = a.bi * b.ai * (a.zeta - b.zeta).exp();
    let second = a.ai * b.bi * (b.zeta - a.zeta).exp();
    Ok(PI * (first - second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airy::{airy_zero, AI0};

    #[test]
    fn boundary_values_exact() {
        for &z in &[-3.0, 0.0, 2.5, 17.0] {
            let b = basis_eval(z, 0.0).unwrap();
            assert!(b.s0.abs() < 1e-14);
            assert!((b.s0_prime - 1.0).abs() < 1e-12);
            assert!((b.c0 - 1.0).abs() < 1e-12);
            assert!(b.c0_prime.abs() < 1e-12);
            assert!(b.s0_dot.abs() < 1e-12);
        }
    }

    #[test]
    fn psi0_at_zero_and_first_zero() {
        let b = basis_eval(0.0, 0.0).unwrap();
        assert!((b.psi0 - PI.sqrt() * AI0).abs() < 1e-15);
        let a1 = airy_zero(1).unwrap().a_n;
        let b = basis_eval(-a1, 0.0).unwrap();
        assert!(b.psi0.abs() < 1e-12);
    }

    #[test]
    fn unit_wronskian() {
        for i in 0..40 {
            let z = -5.0 + 0.9 * i as f64;
            for j in 0..30 {
                let x = 0.7 * j as f64;
                let b = basis_eval(z, x).unwrap();
                assert!((b.wronskian() - 1.0).abs() < 1e-9, "z={z} x={x}: {}", b.wronskian());
            }
        }
    }

    #[test]
    fn z_derivative_identities() {
        let h = 1e-5;
        for &(z, x) in &[(3.0, 1.0), (10.0, 2.5), (0.5, 4.0), (20.0, 0.0)] {
            let fd = (psi_theta(z + h, x).unwrap()[0] - psi_theta(z - h, x).unwrap()[0]) / (2.0 * h);
            let pp = psi_theta(z, x).unwrap()[1];
            assert!((fd + pp).abs() < 1e-6 * pp.abs().max(1.0));
            let fd_s = (basis_eval(z + h, x).unwrap().s0 - basis_eval(z - h, x).unwrap().s0) / (2.0 * h);
            let b = basis_eval(z, x).unwrap();
            assert!((fd_s - b.s0_dot).abs() < 1e-6 * b.s0_dot.abs().max(1.0));
        }
    }

    #[test]
    fn ode_residual() {
        let h = 1e-3;
        for &(z, x) in &[(5.0, 1.0), (12.0, 3.3), (1.0, 2.0)] {
            for idx in [0usize, 2] {
                let f = |x: f64| psi_theta(z, x).unwrap()[idx];
                let d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
                let scale = f(x).abs().max(psi_theta(z, x).unwrap()[idx + 1].abs());
                assert!((-d2 + (x - z) * f(x)).abs() < 1e-5 * scale * (1.0 + (x - z).abs()));
            }
        }
    }

    #[test]
    fn green_kernel_properties() {
        assert_eq!(green0(4.0, 1.3, 1.3).unwrap(), 0.0);
        let h = 1e-5;
        for &(z, x) in &[(4.0, 1.3), (0.0, 2.0), (25.0, 10.0), (-2.0, 3.0)] {
            let d = (green0(z, x, x + h).unwrap() - green0(z, x, x - h).unwrap()) / (2.0 * h);
            assert!((d + 1.0).abs() < 1e-6, "z={z} x={x}: {d}");
        }
        // second-identity form against the s0/c0 form
        for &(z, x, y) in &[(3.0, 0.5, 2.0), (9.0, 4.0, 1.0), (1.0, 6.0, 3.0)] {
            let bx = basis_eval(z, x).unwrap();
            let by = basis_eval(z, y).unwrap();
            let alt = bx.s0 * by.c0 - bx.c0 * by.s0;
            let j = green0(z, x, y).unwrap();
            assert!((j - alt).abs() < 1e-9 * j.abs().max(1.0), "{j} vs {alt}");
        }
        // far apart: plain products would overflow Bi, the kernel does not
        let j = green0(0.0, 150.0, 149.0).unwrap();
        assert!(j.is_finite());
    }

    #[test]
    fn envelope_bounds_hold_on_grid() {
        use crate::airy::{envelope, envelope_margin};
        let grid: Vec<f64> = (0..=6000).map(|i| -30.0 + i as f64 * 0.01).collect();
        let c0 = envelope_margin(&grid).unwrap();
        let k = PI.sqrt();
        for i in 0..30 {
            let z = -3.0 + i as f64;
            for j in 0..25 {
                let x = 0.4 * j as f64;
                let [p, _, t, _] = psi_theta(z, x).unwrap();
                let e = envelope(x - z).unwrap();
                assert!(p.abs() * e.sigma / e.g_a <= c0 * k * (1.0 + 1e-12));
                assert!(t.abs() * e.sigma / e.g_b <= 2.0 * c0 * k);
            }
        }
    }

    use proptest::prelude::*;
    proptest! {
        #[test]
        fn green_antisymmetric(z in -5.0f64..30.0, x in 0.0f64..20.0, y in 0.0f64..20.0) {
            let a = green0(z, x, y).unwrap();
            let b = green0(z, y, x).unwrap();
            prop_assert_eq!(a, -b);
        }
    }
}
