//! Finite-difference reference spectrum.
//!
//! H_q on [0, L] with Dirichlet ends becomes the symmetric tridiagonal
//! matrix with diagonal 2/h² + x_i + q(x_i) and off-diagonal -1/h².
//! Eigenvalues come from Sturm-count bisection, eigenvectors from inverse
//! iteration, and both are extrapolated in h.

use rayon::prelude::*;
use serde::Serialize;

use crate::airy::airy_zero;
use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::volterra::truncation_point;

/// Mesh widths used for extrapolation.
pub const DEFAULT_MESHES: [f64; 3] = [0.02, 0.01, 0.005];
const BISECTION_TOL: f64 = 1e-11;
const TAIL_FRACTION: f64 = 0.1;
const TAIL_MASS_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub length: f64,
    pub h: f64,
    pub nodes: Vec<f64>,
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl DiscreteOperator {
    pub fn new(q: &Potential, length: f64, h: f64) -> Result<Self> {
        if !(h > 0.0 && length > 4.0 * h && length.is_finite()) {
            return Err(Error::Domain(format!("mesh h = {h} on [0, {length}]")));
        }
        let cells = (length / h).round() as usize;
        let dim = cells - 1;
        let inv = 1.0 / (h * h);
        let nodes: Vec<f64> = (1..=dim).map(|i| i as f64 * h).collect();
        let diag = nodes.iter().map(|&x| 2.0 * inv + x + q.value(x)).collect();
        Ok(DiscreteOperator {
            length: cells as f64 * h,
            h,
            nodes,
            diag,
            offdiag: vec![-inv; dim - 1],
        })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues below `sigma` (negative pivots of LDLᵀ).
    pub fn count_below(&self, sigma: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.dim() {
            let b2 = if i == 0 {
                0.0
            } else {
                self.offdiag[i - 1] * self.offdiag[i - 1]
            };
            d = self.diag[i] - sigma - if i == 0 { 0.0 } else { b2 / d };
            if d == 0.0 {
                d = -f64::EPSILON * (self.diag[i].abs() + sigma.abs());
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// k-th smallest eigenvalue (k from 1).
    pub fn eigenvalue(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.dim() {
            return Err(Error::Domain(format!("eigenvalue index {k} of {}", self.dim())));
        }
        let spread = 2.0 * self.offdiag.first().map_or(0.0, |b| b.abs());
        let mut lo = self.diag.iter().cloned().fold(f64::INFINITY, f64::min) - spread;
        let mut hi = self.diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + spread;
        while hi - lo > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) >= k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Unit eigenvector for an eigenvalue `lambda`, sign fixed by v_1 > 0.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.dim();
        let mut v = vec![1.0; n];
        for _ in 0..3 {
            v = self.solve_shifted(lambda, &v);
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            v.iter_mut().for_each(|a| *a /= norm);
        }
        if v[0] < 0.0 {
            v.iter_mut().for_each(|a| *a = -*a);
        }
        v
    }

    /// Thomas solve of (A - σ) x = b.
    fn solve_shifted(&self, sigma: f64, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let tiny = f64::EPSILON * (self.diag[0].abs() + sigma.abs());
        let mut c = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut piv = self.diag[0] - sigma;
        if piv.abs() < tiny {
            piv = tiny;
        }
        y[0] = b[0] / piv;
        for i in 1..n {
            c[i - 1] = self.offdiag[i - 1] / piv;
            piv = self.diag[i] - sigma - self.offdiag[i - 1] * c[i - 1];
            if piv.abs() < tiny {
                piv = tiny;
            }
            y[i] = (b[i] - self.offdiag[i - 1] * y[i - 1]) / piv;
        }
        for i in (0..n - 1).rev() {
            y[i] -= c[i] * y[i + 1];
        }
        y
    }

    /// Fraction of Σv² carried by the last 10% of the interval.
    pub fn tail_mass(&self, v: &[f64]) -> f64 {
        let start = ((1.0 - TAIL_FRACTION) * v.len() as f64) as usize;
        let total: f64 = v.iter().map(|a| a * a).sum();
        v[start..].iter().map(|a| a * a).sum::<f64>() / total
    }

    /// log(|v_1/h|² / (h Σ v²)) for a unit eigenvector.
    pub fn kappa(&self, v: &[f64]) -> f64 {
        let slope = v[0] / self.h;
        let norm: f64 = self.h * v.iter().map(|a| a * a).sum::<f64>();
        (slope * slope / norm).ln()
    }

    fn check_truncation(&self, v: &[f64], n: usize) -> Result<()> {
        let mass = self.tail_mass(v);
        if mass > TAIL_MASS_LIMIT {
            return Err(Error::Truncation(format!(
                "eigenvector {n} keeps {mass:e} of its mass in the last tenth of [0, {}]",
                self.length
            )));
        }
        Ok(())
    }
}

/// Domain length that keeps the `count`-th eigenfunction clear of x = L.
pub fn oracle_length(q: &Potential, count: usize) -> Result<f64> {
    let estimate = -airy_zero(count.max(1))?.a_n + q.sup_norm();
    Ok(truncation_point(q, estimate, 1e-12)? + 5.0)
}

/// Lowest `count` eigenvalues at a single mesh width.
pub fn oracle_spectrum(q: &Potential, length: f64, h: f64, count: usize) -> Result<Vec<f64>> {
    let op = DiscreteOperator::new(q, length, h)?;
    let values: Vec<f64> = (1..=count)
        .into_par_iter()
        .map(|k| op.eigenvalue(k))
        .collect::<Result<_>>()?;
    if let Some(&last) = values.last() {
        op.check_truncation(&op.eigenvector(last), count)?;
    }
    Ok(values)
}

/// Discrete norming constant of the n-th eigenpair at a single mesh width.
pub fn oracle_norming(q: &Potential, length: f64, h: f64, n: usize) -> Result<f64> {
    let op = DiscreteOperator::new(q, length, h)?;
    let v = op.eigenvector(op.eigenvalue(n)?);
    op.check_truncation(&v, n)?;
    Ok(op.kappa(&v))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extrapolation {
    pub value: f64,
    /// size of the last Romberg correction
    pub error: f64,
    pub observed_order: f64,
    pub warning: Option<String>,
}

/// Romberg extrapolation over meshes halving at each level, removing
/// h^order, h^(order+2), ... in turn.
pub fn richardson(values: &[(f64, f64)], order: u32) -> Result<Extrapolation> {
    if values.len() < 3 {
        return Err(Error::InsufficientData(format!("{} mesh levels; need 3", values.len())));
    }
    for w in values.windows(2) {
        if ((w[0].0 / w[1].0) - 2.0).abs() > 1e-9 {
            return Err(Error::InsufficientData(format!(
                "mesh ratio {} is not 2",
                w[0].0 / w[1].0
            )));
        }
    }
    let mut table: Vec<Vec<f64>> = vec![values.iter().map(|v| v.1).collect()];
    for j in 1..values.len() {
        let factor = 2f64.powi((order + 2 * (j as u32 - 1)) as i32);
        let prev = &table[j - 1];
        let col: Vec<f64> = (1..prev.len())
            .map(|i| prev[i] + (prev[i] - prev[i - 1]) / (factor - 1.0))
            .collect();
        table.push(col);
    }
    let value = table.last().unwrap()[0];
    let penultimate = &table[table.len() - 2];
    let error = (value - penultimate[penultimate.len() - 1]).abs();
    let k = values.len();
    let (a, b, c) = (values[k - 3].1, values[k - 2].1, values[k - 1].1);
    let observed_order = ((a - b) / (b - c)).abs().log2();
    let warning =
        if (observed_order - order as f64).abs() > 0.3 * order as f64 && (a - b).abs() > 1e-12 * a.abs().max(1.0) {
            Some(format!("observed order {observed_order:.3} differs from {order}"))
        } else {
            None
        };
    Ok(Extrapolation {
        value,
        error,
        observed_order,
        warning,
    })
}

/// Extrapolated eigenvalue and norming constant of one index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleEigen {
    pub n: usize,
    pub lambda: Extrapolation,
    pub kappa: Extrapolation,
}

/// Richardson-extrapolated (λ_n, κ_n) for n = 1..=n_max over `meshes`.
pub fn oracle_extrapolated(q: &Potential, n_max: usize, meshes: &[f64]) -> Result<Vec<OracleEigen>> {
    let length = oracle_length(q, n_max)?;
    let levels: Vec<Vec<(f64, f64)>> = meshes
        .par_iter()
        .map(|&h| -> Result<Vec<(f64, f64)>> {
            let op = DiscreteOperator::new(q, length, h)?;
            (1..=n_max)
                .into_par_iter()
                .map(|n| {
                    let lambda = op.eigenvalue(n)?;
                    let v = op.eigenvector(lambda);
                    if n == n_max {
                        op.check_truncation(&v, n)?;
                    }
                    Ok((lambda, op.kappa(&v)))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    (1..=n_max)
        .map(|n| {
            let lam: Vec<(f64, f64)> = meshes.iter().zip(&levels).map(|(&h, l)| (h, l[n - 1].0)).collect();
            let kap: Vec<(f64, f64)> = meshes.iter().zip(&levels).map(|(&h, l)| (h, l[n - 1].1)).collect();
            Ok(OracleEigen {
                n,
                lambda: richardson(&lam, 2)?,
                kappa: richardson(&kap, 2)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_ground_state() {
        let q = Potential::zero(2.0).unwrap();
        let levels: Vec<(f64, f64)> = DEFAULT_MESHES
            .iter()
            .map(|&h| (h, oracle_spectrum(&q, 40.0, h, 1).unwrap()[0]))
            .collect();
        let ex = richardson(&levels, 2).unwrap();
        assert!((ex.value - 2.338_107_410_459_767).abs() < 1e-6, "{}", ex.value);
        assert!((ex.observed_order - 2.0).abs() < 0.2);
        assert!(ex.warning.is_none());
    }

    #[test]
    fn constant_shift_is_exact() {
        let q = Potential::exp(0.3, 1.0, 2.0).unwrap();
        let a = DiscreteOperator::new(&q, 20.0, 0.02).unwrap();
        let mut b = a.clone();
        b.diag.iter_mut().for_each(|d| *d += 0.75);
        for k in [1, 4, 9] {
            let (la, lb) = (a.eigenvalue(k).unwrap(), b.eigenvalue(k).unwrap());
            assert!((lb - la - 0.75).abs() < 3e-11);
        }
    }

    #[test]
    fn free_norming_constants_vanish() {
        let q = Potential::zero(2.0).unwrap();
        let ex = oracle_extrapolated(&q, 5, &DEFAULT_MESHES).unwrap();
        for e in &ex {
            assert!(e.kappa.value.abs() < 1e-4, "n={} {}", e.n, e.kappa.value);
            let a = airy_zero(e.n).unwrap().a_n;
            assert!((e.lambda.value + a).abs() < 1e-6);
        }
    }

    #[test]
    fn kappa_ignores_eigenvector_sign() {
        let q = Potential::bump(0.4, 2.0, 1.0, 2.0).unwrap();
        let op = DiscreteOperator::new(&q, 20.0, 0.02).unwrap();
        let v = op.eigenvector(op.eigenvalue(2).unwrap());
        let w: Vec<f64> = v.iter().map(|a| -a).collect();
        assert_eq!(op.kappa(&v), op.kappa(&w));
    }

    #[test]
    fn short_domain_is_flagged() {
        let q = Potential::zero(2.0).unwrap();
        assert!(matches!(oracle_spectrum(&q, 8.0, 0.02, 3), Err(Error::Truncation(_))));
    }

    #[test]
    fn richardson_cases() {
        let f = |h: f64| 1.5 + 2.0 * h * h;
        let v: Vec<(f64, f64)> = [0.1, 0.05, 0.025].iter().map(|&h| (h, f(h))).collect();
        assert!((richardson(&v, 2).unwrap().value - 1.5).abs() < 1e-14);
        let g = |h: f64| 1.5 + 2.0 * h * h + 30.0 * h.powi(4);
        let v: Vec<(f64, f64)> = [0.1, 0.05, 0.025].iter().map(|&h| (h, g(h))).collect();
        let r = richardson(&v, 2).unwrap();
        assert!((r.value - 1.5).abs() < 1e-13);
        // last correction is of size c h⁴ at the middle mesh
        assert!(r.error > 0.1 * 30.0 * 0.05f64.powi(4) && r.error < 10.0 * 30.0 * 0.05f64.powi(4));
        assert!(richardson(&v[..2], 2).is_err());
        let odd: Vec<(f64, f64)> = [0.1, 0.05, 0.025].iter().map(|&h| (h, 1.0 + h)).collect();
        assert!(richardson(&odd, 2).unwrap().warning.is_some());
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn second_order_convergence() {
        let q = Potential::exp(-0.3, 1.0, 2.0).unwrap();
        let length = oracle_length(&q, 6).unwrap();
        let vals: Vec<Vec<f64>> = DEFAULT_MESHES
            .iter()
            .map(|&h| oracle_spectrum(&q, length, h, 6).unwrap())
            .collect();
        for k in 0..6 {
            let ratio = (vals[0][k] - vals[1][k]) / (vals[1][k] - vals[2][k]);
            assert!((ratio.log2() - 2.0).abs() < 0.2);
        }
    }
}
