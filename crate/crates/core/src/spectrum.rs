//! Eigenvalues, norming constants and their gradients.
//!
//! λ_n is the n-th zero of λ ↦ ψ(q,λ,0) and κ_n = log(-ψ'_n / ψ̇_n), where
//! ψ'_n = ψ'(q,λ_n,0) and ψ̇_n = ∂_z ψ(q,λ_n,0). Labels are certified by
//! Sturm oscillation: ψ(q,λ,·) has as many zeros on (0,∞) as there are
//! eigenvalues below λ.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::airy::airy_zero;
use crate::asymptotics::lambda_prediction;
use crate::basis::psi_theta;
use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::volterra::{Grid, SolutionProfile, VolterraSystem, DEFAULT_TAIL_TOL};

const MAX_DOUBLINGS: usize = 6;
const BRENT_MAX_ITER: usize = 200;
const NORM_GAP_LIMIT: f64 = 1e-5;
/// Largest x_max - λ for grids carrying the forward solutions s, c.
const FORWARD_REACH: f64 = 58.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Shooting,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenRecord {
    pub n: usize,
    pub lambda: f64,
    pub kappa: f64,
    pub bracket: (f64, f64),
    /// |ψ(q,λ,0)|
    pub shoot_residual: f64,
    /// ‖ψ(q,λ_n,·)‖² by quadrature
    pub norm_sq: f64,
    /// log(ψ'_n² / norm_sq)
    pub kappa_alt: f64,
    pub psi_prime: f64,
    pub psi_dot: f64,
    /// relative gap between norm_sq and -ψ'_n ψ̇_n
    pub norm_gap: f64,
    pub method: Method,
}

/// ψ(q,λ,·) on its own grid, values and derivatives only.
fn shoot(q: &Potential, lambda: f64) -> Result<(Grid, Vec<f64>, Vec<f64>)> {
    let grid = Grid::for_problem(q, lambda, DEFAULT_TAIL_TOL)?;
    let (v, d) = VolterraSystem::new(q, lambda, &grid)?.psi_values()?;
    Ok((grid, v, d))
}

fn sign_changes(values: &[f64]) -> usize {
    let mut count = 0;
    let mut last = 0.0f64;
    for &v in values {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

/// Zeros of ψ(q,λ,·) on (0,∞): the number of eigenvalues below λ.
pub fn eigenvalue_count(q: &Potential, lambda: f64) -> Result<usize> {
    let (_, v, _) = shoot(q, lambda)?;
    Ok(sign_changes(&v))
}

/// Zeros of a sampled eigenfunction on (0, x_max).
pub fn oscillation_count(profile: &SolutionProfile) -> usize {
    sign_changes(&profile.values[1..])
}

/// Crude localization radius 4 (3πn/2)^{-2/3 + 0.05}.
pub fn localization_radius(n: usize) -> f64 {
    4.0 * (1.5 * PI * n as f64).powf(-2.0 / 3.0 + 0.05)
}

fn brent<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    xtol: f64,
) -> Result<f64> {
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..BRENT_MAX_ITER {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut qq);
            if a == c {
                p = 2.0 * m * s;
                qq = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                qq = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                qq = -qq;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * qq - (tol * qq).abs()).min((e * qq).abs()) {
                e = d;
                d = p / qq;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::NoConvergence {
        method: "brent",
        iterations: BRENT_MAX_ITER,
        detail: format!("root in [{a}, {b}] not resolved"),
    })
}

/// Bracket the n-th eigenvalue so that exactly one eigenvalue lies inside.
fn bracket(q: &Potential, n: usize) -> Result<(f64, f64)> {
    let center = -airy_zero(n)?.a_n;
    let first_order = lambda_prediction(q, n)? - center;
    let mut delta = localization_radius(n).max(2.0 * first_order.abs());
    // H_q >= inf q, so nothing lies below the floor
    let floor = -q.sup_norm() - 1.0;
    let (mut lo, mut hi) = ((center - delta).max(floor), center + delta);
    let (mut n_lo, mut n_hi) = (eigenvalue_count(q, lo)?, eigenvalue_count(q, hi)?);
    let mut doublings = 0;
    while !(n_lo < n && n_hi >= n) {
        if doublings == MAX_DOUBLINGS {
            return Err(Error::Bracket {
                n,
                detail: format!(
                    "[{lo:.6}, {hi:.6}] holds eigenvalues {}..{} after {MAX_DOUBLINGS} doublings; \
                     a neighbouring eigenvalue or a large potential displaced the labels",
                    n_lo + 1,
                    n_hi
                ),
            });
        }
        delta *= 2.0;
        if n_lo >= n {
            lo = (center - delta).max(floor);
            n_lo = eigenvalue_count(q, lo)?;
        }
        if n_hi < n {
            hi = center + delta;
            n_hi = eigenvalue_count(q, hi)?;
        }
        doublings += 1;
    }
    // shrink until only the n-th eigenvalue is inside
    for _ in 0..80 {
        if n_lo == n - 1 && n_hi == n {
            return Ok((lo, hi));
        }
        let mid = 0.5 * (lo + hi);
        let k = eigenvalue_count(q, mid)?;
        if k >= n {
            hi = mid;
            n_hi = k;
        } else {
            lo = mid;
            n_lo = k;
        }
    }
    Err(Error::Bracket {
        n,
        detail: format!("could not isolate eigenvalue in [{lo}, {hi}]"),
    })
}

/// The n-th Dirichlet eigenvalue with its norming constant.
pub fn locate_eigenvalue(q: &Potential, n: usize) -> Result<EigenRecord> {
    if n == 0 {
        return Err(Error::Domain("eigenvalues are indexed from 1".into()));
    }
    let (lo, hi) = bracket(q, n)?;
    let f = |z: f64| shoot(q, z).map(|(_, v, _)| v[0]);
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    if f_lo != 0.0 && f_hi != 0.0 && (f_lo > 0.0) == (f_hi > 0.0) {
        return Err(Error::Bracket {
            n,
            detail: format!("no sign change of psi(0) on [{lo}, {hi}]"),
        });
    }
    let scale = 1.0 + lo.abs().max(hi.abs());
    let lambda = brent(f, lo, hi, f_lo, f_hi, 1e-13 * scale)?;
    record_at(q, n, lambda, (lo, hi))
}

fn record_at(q: &Potential, n: usize, lambda: f64, bracket: (f64, f64)) -> Result<EigenRecord> {
    let grid = Grid::for_problem(q, lambda, DEFAULT_TAIL_TOL)?;
    let psi = VolterraSystem::new(q, lambda, &grid)?.psi()?;
    let (psi_zero, psi_prime, psi_dot, _) = psi.at_origin();
    if psi_dot == 0.0 || !psi_dot.is_finite() {
        return Err(Error::Degenerate { n, value: psi_dot });
    }
    let norm_sq = profile_norm_sq(&grid, &psi);
    let identity = -psi_prime * psi_dot;
    let norm_gap = (norm_sq - identity).abs() / norm_sq;
    let ratio = -psi_prime / psi_dot;
    if ratio <= 0.0 {
        return Err(Error::Inconsistent(format!(
            "n = {n}: -psi'/psi_dot = {ratio} is not positive at lambda = {lambda}"
        )));
    }
    Ok(EigenRecord {
        n,
        lambda,
        kappa: ratio.ln(),
        bracket,
        shoot_residual: psi_zero.abs(),
        norm_sq,
        kappa_alt: (psi_prime * psi_prime / norm_sq).ln(),
        psi_prime,
        psi_dot,
        norm_gap,
        method: Method::Shooting,
    })
}

fn profile_norm_sq(grid: &Grid, psi: &SolutionProfile) -> f64 {
    let sq: Vec<f64> = psi.values.iter().map(|v| v * v).collect();
    let last = *psi.values.last().unwrap();
    // ψ ≈ ψ₀-like decay beyond x_max: ∫ ψ² ≈ ψ(x_max)² / (2 sqrt(x_max - z))
    let tail = last * last / (2.0 * (grid.x_max - psi.z).max(1.0).sqrt());
    grid.integrate(&sq) + tail
}

/// Eigen-records for a range of indices, solved in parallel.
pub fn eigenvalues(q: &Potential, ns: RangeInclusive<usize>) -> Result<Vec<EigenRecord>> {
    let ns: Vec<usize> = ns.collect();
    ns.par_iter().map(|&n| locate_eigenvalue(q, n)).collect()
}

/// ‖ψ‖² by quadrature and by -ψ'_n ψ̇_n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormCheck {
    pub quadrature: f64,
    pub identity: f64,
    pub gap: f64,
}

pub fn norm_sq_psi(q: &Potential, record: &EigenRecord) -> Result<NormCheck> {
    let grid = Grid::for_problem(q, record.lambda, DEFAULT_TAIL_TOL)?;
    let psi = VolterraSystem::new(q, record.lambda, &grid)?.psi()?;
    let (_, pp, pd, _) = psi.at_origin();
    let quadrature = profile_norm_sq(&grid, &psi);
    let identity = -pp * pd;
    let gap = (quadrature - identity).abs() / quadrature;
    if gap > NORM_GAP_LIMIT {
        return Err(Error::Inconsistent(format!(
            "n = {}: norm by quadrature {quadrature} vs -psi'*psi_dot {identity}",
            record.n
        )));
    }
    Ok(NormCheck {
        quadrature,
        identity,
        gap,
    })
}

/// Directional derivatives of λ_n and κ_n along v.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gradient {
    pub n: usize,
    pub d_lambda: f64,
    pub d_kappa: f64,
    /// ψ̈_n(0) from the finer centered difference
    pub psi_ddot: f64,
}

/// Grid reaching far enough that both ψ and v are negligible beyond it.
fn gradient_grid(q: &Potential, v: &Potential, lambda: f64) -> Result<Grid> {
    let base = crate::volterra::truncation_point(q, lambda, DEFAULT_TAIL_TOL)?;
    let reach = v.decay_point(1e-15).min(lambda.max(0.0) + FORWARD_REACH);
    Grid::new(lambda, base.max(reach))
}

fn psi_dot_at_origin(q: &Potential, z: f64, grid: &Grid) -> Result<f64> {
    Ok(VolterraSystem::new(q, z, grid)?.psi()?.z_derivs[0])
}

/// dλ_n[v] and dκ_n[v] at an already located eigenvalue.
pub fn gradient(q: &Potential, record: &EigenRecord, v: &Potential) -> Result<Gradient> {
    let lambda = record.lambda;
    let grid = gradient_grid(q, v, lambda)?;
    let sys = VolterraSystem::new(q, lambda, &grid)?;
    let psi = sys.psi()?;
    let vv: Vec<f64> = grid.nodes.iter().map(|&x| v.value(x)).collect();
    let sq: Vec<f64> = psi.values.iter().map(|p| p * p).collect();
    let norm = grid.integrate(&sq);
    let weighted: Vec<f64> = sq.iter().zip(&vv).map(|(a, b)| a * b).collect();
    let d_lambda = grid.integrate(&weighted) / norm;

    let (s, c) = sys.sc()?;
    let n_nodes = grid.len();
    let cpv: Vec<f64> = (0..n_nodes).map(|i| c.values[i] * psi.values[i] * vv[i]).collect();
    let dot: Vec<f64> = (0..n_nodes)
        .map(|i| (s.z_derivs[i] * psi.values[i] + s.values[i] * psi.z_derivs[i]) * vv[i])
        .collect();
    let d_psi_prime = -grid.integrate(&cpv);
    let d_psi_dot = grid.integrate(&dot);

    let (_, pp, pd, pdp) = psi.at_origin();
    let h = 1e-4 * (1.0 + lambda.abs());
    let second = |h: f64| -> Result<f64> {
        Ok((psi_dot_at_origin(q, lambda + h, &grid)? - psi_dot_at_origin(q, lambda - h, &grid)?) / (2.0 * h))
    };
    let coarse = second(h)?;
    let psi_ddot = second(0.5 * h)?;
    if (coarse - psi_ddot).abs() > 1e-3 * psi_ddot.abs().max(pd.abs()) {
        return Err(Error::NoConvergence {
            method: "kappa_directional_derivative",
            iterations: 2,
            detail: format!("second z-derivative unstable under step halving: {coarse} vs {psi_ddot}"),
        });
    }
    let d_kappa = (d_psi_prime + pdp * d_lambda) / pp - (d_psi_dot + psi_ddot * d_lambda) / pd;
    Ok(Gradient {
        n: record.n,
        d_lambda,
        d_kappa,
        psi_ddot,
    })
}

pub fn lambda_directional_derivative(q: &Potential, n: usize, v: &Potential) -> Result<f64> {
    if v.is_zero() {
        return Ok(0.0);
    }
    let rec = locate_eigenvalue(q, n)?;
    let grid = gradient_grid(q, v, rec.lambda)?;
    let psi = VolterraSystem::new(q, rec.lambda, &grid)?.psi_values()?.0;
    let sq: Vec<f64> = psi.iter().map(|p| p * p).collect();
    let weighted: Vec<f64> = grid.nodes.iter().zip(&sq).map(|(&x, s)| s * v.value(x)).collect();
    Ok(grid.integrate(&weighted) / grid.integrate(&sq))
}

pub fn kappa_directional_derivative(q: &Potential, n: usize, v: &Potential) -> Result<f64> {
    if v.is_zero() {
        return Ok(0.0);
    }
    let rec = locate_eigenvalue(q, n)?;
    Ok(gradient(q, &rec, v)?.d_kappa)
}

/// Eigenvalues below zero, found from the oscillation count at λ = 0.
/// None lie below -‖q‖_∞ since x + q >= inf q on the half-line.
pub fn negative_eigenvalues(q: &Potential) -> Result<Vec<EigenRecord>> {
    let k = eigenvalue_count(q, 0.0)?;
    (1..=k).map(|n| locate_eigenvalue(q, n)).collect()
}

/// (ψ₀(λ,0), ψ₀'(λ,0)·(-1)^{n+1}(3πn/2)^{-1/6}).
pub fn boundary_diagnostics(n: usize, lambda: f64) -> Result<(f64, f64)> {
    let [p, pp, _, _] = psi_theta(lambda, 0.0)?;
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    Ok((p, pp * sign * (1.5 * PI * n as f64).powf(-1.0 / 6.0)))
}
