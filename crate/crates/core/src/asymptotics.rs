//! First-order eigenvalue and norming-constant predictions and remainder fits.
//!
//! λ_n ≈ -a_n + π (-a_n)^{-1/2} ∫ Ai²(x + a_n) q(x) dx
//! κ_n ≈ -2π (-a_n)^{-1/2} ∫ Ai(x + a_n) Ai'(x + a_n) q(x) dx

use std::f64::consts::PI;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::airy::{airy_eval_scaled, airy_zero};
use crate::error::{Error, Result};
use crate::potential::{omega_r, Potential};
use crate::quad::integrate_half_line;

const PRED_TOL: f64 = 1e-10;
/// Fewest points a decay fit accepts.
pub const MIN_FIT_POINTS: usize = 8;

/// (Ai(w), Ai'(w)), flushing to zero far on the right.
fn ai_pair(w: f64) -> (f64, f64) {
    if w > 150.0 {
        return (0.0, 0.0);
    }
    match airy_eval_scaled(w) {
        Ok(s) => {
            let e = (-s.zeta).exp();
            (s.ai * e, s.ai_prime * e)
        }
        Err(_) => (0.0, 0.0),
    }
}

fn breaks_for(q: &Potential, a_n: f64) -> Vec<f64> {
    let mut b = q.breakpoints();
    b.push(-a_n);
    b.push(-a_n + 8.0);
    b
}

fn correction(q: &Potential, n: usize, kernel: impl Fn(f64, f64) -> f64, with_derivative: bool) -> Result<f64> {
    let a_n = airy_zero(n)?.a_n;
    if q.is_zero() {
        return Ok(0.0);
    }
    let integral = integrate_half_line(
        |x| {
            let (a, ap) = ai_pair(x + a_n);
            let qv = if with_derivative { q.derivative(x) } else { q.value(x) };
            kernel(a, ap) * qv
        },
        &breaks_for(q, a_n),
        PRED_TOL,
    )?;
    Ok(PI * integral / (-a_n).sqrt())
}

/// First-order eigenvalue prediction.
pub fn lambda_prediction(q: &Potential, n: usize) -> Result<f64> {
    let a_n = airy_zero(n)?.a_n;
    Ok(-a_n + correction(q, n, |a, _| a * a, false)?)
}

/// First-order norming-constant prediction.
pub fn kappa_prediction(q: &Potential, n: usize) -> Result<f64> {
    correction(q, n, |a, ap| -2.0 * a * ap, false)
}

/// The same prediction after integrating by parts: π (-a_n)^{-1/2} ∫ Ai² q'.
pub fn kappa_prediction_by_parts(q: &Potential, n: usize) -> Result<f64> {
    correction(q, n, |a, _| a * a, true)
}

/// Least-squares slope of log|resid| against log n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// 95% confidence half-width of the slope.
    pub half_width: f64,
    pub points: usize,
}

/// Fit log|resid_n| = b + slope·log n, dropping residuals below `floor`.
pub fn decay_rate_fit(resid: &[f64], ns: &[usize], floor: f64) -> Result<DecayFit> {
    if resid.len() != ns.len() {
        return Err(Error::InsufficientData(format!(
            "{} residuals for {} indices",
            resid.len(),
            ns.len()
        )));
    }
    let pts: Vec<(f64, f64)> = resid
        .iter()
        .zip(ns)
        .filter(|(r, &n)| r.is_finite() && r.abs() > floor && n >= 1)
        .map(|(r, &n)| ((n as f64).ln(), r.abs().ln()))
        .collect();
    let m = pts.len();
    if m < MIN_FIT_POINTS {
        return Err(Error::InsufficientData(format!(
            "{m} residuals above the floor {floor:e}; need {MIN_FIT_POINTS}"
        )));
    }
    let mf = m as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / mf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / mf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let dof = mf - 2.0;
    let se = (sse / dof / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| Error::InsufficientData(format!("t distribution: {e}")))?
        .inverse_cdf(0.975);
    Ok(DecayFit {
        slope,
        intercept,
        half_width: t * se,
        points: m,
    })
}

/// Predictions, remainders and fits over a range of indices.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticsReport {
    pub n_range: (usize, usize),
    pub lambda_pred: Vec<f64>,
    pub kappa_pred: Vec<f64>,
    pub lambda_resid: Vec<f64>,
    pub kappa_resid: Vec<f64>,
    pub fitted_slope_lambda: Option<DecayFit>,
    pub fitted_slope_kappa: Option<DecayFit>,
    pub omega_r_values: Vec<f64>,
}

/// Compare computed (λ_n, κ_n) for n = n_lo.. with the predictions.
///
/// `fit_from` excludes small indices from the fits; fits with too few
/// usable points are left as `None`.
pub fn build_report(
    q: &Potential,
    n_lo: usize,
    lambdas: &[f64],
    kappas: &[f64],
    floor: f64,
    fit_from: usize,
) -> Result<AsymptoticsReport> {
    if lambdas.len() != kappas.len() || lambdas.is_empty() {
        return Err(Error::InsufficientData("mismatched or empty eigen-data".into()));
    }
    let n_hi = n_lo + lambdas.len() - 1;
    let ns: Vec<usize> = (n_lo..=n_hi).collect();
    let mut report = AsymptoticsReport {
        n_range: (n_lo, n_hi),
        lambda_pred: Vec::with_capacity(ns.len()),
        kappa_pred: Vec::with_capacity(ns.len()),
        lambda_resid: Vec::with_capacity(ns.len()),
        kappa_resid: Vec::with_capacity(ns.len()),
        fitted_slope_lambda: None,
        fitted_slope_kappa: None,
        omega_r_values: ns.iter().map(|&n| omega_r(q.r(), n)).collect(),
    };
    for (i, &n) in ns.iter().enumerate() {
        let lp = lambda_prediction(q, n)?;
        let kp = kappa_prediction(q, n)?;
        report.lambda_pred.push(lp);
        report.kappa_pred.push(kp);
        report.lambda_resid.push(lambdas[i] - lp);
        report.kappa_resid.push(kappas[i] - kp);
    }
    let start = ns.iter().position(|&n| n >= fit_from).unwrap_or(ns.len());
    report.fitted_slope_lambda = decay_rate_fit(&report.lambda_resid[start..], &ns[start..], floor).ok();
    report.fitted_slope_kappa = decay_rate_fit(&report.kappa_resid[start..], &ns[start..], floor).ok();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;

    #[test]
    fn zero_potential_predictions() {
        let q = Potential::zero(2.0).unwrap();
        for n in [1, 5, 30] {
            assert_eq!(lambda_prediction(&q, n).unwrap(), -airy_zero(n).unwrap().a_n);
            assert_eq!(kappa_prediction(&q, n).unwrap(), 0.0);
        }
    }

    #[test]
    fn prediction_is_linear_in_q() {
        let q = Potential::bump(0.4, 2.0, 1.0, 2.0).unwrap();
        for n in [1, 7, 20] {
            let a = -airy_zero(n).unwrap().a_n;
            let l1 = lambda_prediction(&q, n).unwrap() - a;
            let l3 = lambda_prediction(&q.scaled(-3.0), n).unwrap() - a;
            assert!((l3 + 3.0 * l1).abs() < 1e-12 * l1.abs().max(1e-3));
        }
    }

    #[test]
    fn exp_prediction_against_plain_quadrature() {
        // independent scheme: fixed Gauss–Kronrod on [0, 40] with absolute tolerance
        let q = Potential::exp(0.3, 1.0, 2.0).unwrap();
        let a1 = airy_zero(1).unwrap().a_n;
        let f = |x: f64| {
            let (a, _) = ai_pair(x + a1);
            a * a * 0.3 * (-x).exp()
        };
        let (v, _) = integrate(f, 0.0, 40.0, 1e-15, 1e-13).unwrap();
        let expect = -a1 + PI * v / (-a1).sqrt();
        assert!((lambda_prediction(&q, 1).unwrap() - expect).abs() < 1e-8);
    }

    #[test]
    fn kappa_forms_agree() {
        for q in [
            Potential::exp(0.3, 1.0, 2.0).unwrap(),
            Potential::alg(0.5, 3.0, 2.0).unwrap(),
            Potential::bump(0.4, 2.0, 1.0, 2.0).unwrap(),
        ] {
            for n in [1, 4, 13, 30] {
                let a = kappa_prediction(&q, n).unwrap();
                let b = kappa_prediction_by_parts(&q, n).unwrap();
                assert!((a - b).abs() < 1e-8, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn kappa_sign_for_decreasing_positive_q() {
        let q = Potential::exp(0.3, 1.0, 2.0).unwrap();
        for n in 1..10 {
            assert!(kappa_prediction(&q, n).unwrap() < 0.0);
        }
    }

    #[test]
    fn fit_on_exact_power() {
        let ns: Vec<usize> = (2..=40).collect();
        let r: Vec<f64> = ns.iter().map(|&n| 1.0 / n as f64).collect();
        let f = decay_rate_fit(&r, &ns, 1e-12).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-12 && f.half_width < 1e-10);
    }

    #[test]
    fn fit_on_perturbed_power() {
        let ns: Vec<usize> = (2..=40).collect();
        let r: Vec<f64> = ns
            .iter()
            .map(|&n| (1.0 + 0.1 * if n % 2 == 0 { 1.0 } else { -1.0 }) / n as f64)
            .collect();
        let f = decay_rate_fit(&r, &ns, 1e-12).unwrap();
        assert!((-1.1..=-0.9).contains(&f.slope), "{}", f.slope);
        assert!(f.half_width > 0.0);
    }

    #[test]
    fn fit_needs_data_above_floor() {
        let ns: Vec<usize> = (2..=40).collect();
        let r = vec![1e-14; ns.len()];
        assert!(matches!(
            decay_rate_fit(&r, &ns, 1e-12),
            Err(Error::InsufficientData(_))
        ));
        assert!(decay_rate_fit(&r[..5], &ns[..5], 0.0).is_err());
    }
}
