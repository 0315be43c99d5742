//! Quadrature: adaptive Gauss–Kronrod on finite intervals, a half-line
//! driver with an exponential tail map, fixed Gauss–Legendre rules, and
//! spectral (Chebyshev–Lobatto) panel integration used by the Volterra
//! solvers.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let (f1, f2) = (f(c - dx), f(c + dx));
        resk += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    (resk * h, ((resk - resg) * h).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Adaptive Gauss–Kronrod (7/15) integration of `f` over `[a, b]`.
///
/// Returns `(value, error_estimate)`; bisects the worst segment until the
/// summed error estimate drops below `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<(f64, f64)> {
    integrate_with_breaks(&f, &[a, b], abs_tol, rel_tol)
}

/// Like [`integrate`] but starts from the segments delimited by `points`
/// (sorted, at least two entries).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: &F,
    points: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    const MAX_SEGMENTS: usize = 20_000;
    let mut heap = BinaryHeap::new();
    let (mut total, mut total_err) = (0.0, 0.0);
    for pair in points.windows(2) {
        if pair[1] <= pair[0] {
            continue;
        }
        let (v, e) = gk15(f, pair[0], pair[1]);
        total += v;
        total_err += e;
        heap.push(Segment {
            a: pair[0],
            b: pair[1],
            value: v,
            err: e,
        });
    }
    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if heap.len() >= MAX_SEGMENTS {
            return Err(Error::Quadrature(format!(
                "{MAX_SEGMENTS} segments exhausted; value {total:e}, error estimate {total_err:e}"
            )));
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval at machine resolution; accept what we have
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(f, worst.a, mid);
        let (v2, e2) = gk15(f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
    }
    // re-sum to shed accumulated cancellation in the running totals
    let (mut value, mut err) = (0.0, 0.0);
    for s in heap.iter() {
        value += s.value;
        err += s.err;
    }
    Ok((value, err))
}

/// ∫_0^∞ f(x) dx to relative tolerance `rel_tol`.
///
/// `breaks` are interior points where `f` has kinks or changes character;
/// the finite part runs up to `max(breaks, 1)`, the rest is mapped through
/// x = X e^s and integrated chunk by chunk until contributions vanish.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, breaks: &[f64], rel_tol: f64) -> Result<f64> {
    let mut points: Vec<f64> = std::iter::once(0.0)
        .chain(breaks.iter().copied().filter(|&b| b > 0.0 && b.is_finite()))
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let last = *points.last().unwrap();
    let x_split = if last < 1.0 { 1.0 } else { last };
    if last < x_split {
        points.push(x_split);
    }
    // unit-length pieces resolve oscillations before adaptivity kicks in
    let mut fine = Vec::new();
    for pair in points.windows(2) {
        let pieces = ((pair[1] - pair[0]).ceil() as usize).max(1);
        for k in 0..pieces {
            fine.push(pair[0] + (pair[1] - pair[0]) * k as f64 / pieces as f64);
        }
    }
    fine.push(x_split);
    let (head, _) = integrate_with_breaks(&f, &fine, 1e-300, rel_tol * 0.1)?;

    let g = |s: f64| {
        let e = s.exp();
        f(x_split * e) * x_split * e
    };
    const CHUNK: f64 = 4.0;
    const S_MAX: f64 = 300.0;
    let mut tail = 0.0;
    let mut s = 0.0;
    let mut quiet = 0;
    while s < S_MAX {
        let scale = (head + tail).abs();
        let (v, _) = integrate(g, s, s + CHUNK, 1e-300, rel_tol * 0.1)?;
        tail += v;
        s += CHUNK;
        if v.abs() <= 0.01 * rel_tol * (head + tail).abs().max(scale) || v == 0.0 {
            quiet += 1;
            if quiet >= 2 {
                return Ok(head + tail);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Quadrature(format!(
        "half-line tail did not settle by x = {:e}",
        x_split * S_MAX.exp()
    )))
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 {
                1.0
            } else if n == 1 {
                x
            } else {
                p1
            };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Chebyshev–Lobatto collocation on a reference panel [-1, 1].
///
/// `integration[i][j]` maps nodal values to ∫_{-1}^{t_i}; it is exact for
/// polynomials of degree below the node count.
#[derive(Debug, Clone)]
pub struct ChebPanel {
    pub nodes: Vec<f64>,
    pub integration: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl ChebPanel {
    pub fn new(points: usize) -> Self {
        assert!(points >= 3, "need at least three nodes per panel");
        let n = points - 1;
        let nf = n as f64;
        let pi = std::f64::consts::PI;
        // ascending nodes t_j = -cos(pi j / n)
        let nodes: Vec<f64> = (0..=n).map(|j| -(pi * j as f64 / nf).cos()).collect();
        // coefficient matrix: a_k = sum_j coef[k][j] f_j
        let mut coef = vec![vec![0.0; n + 1]; n + 1];
        for (k, row) in coef.iter_mut().enumerate() {
            for (j, c) in row.iter_mut().enumerate() {
                // T_k(t_j) with t_j = cos(pi (n - j) / n)
                let tk = (pi * (k * (n - j)) as f64 / nf).cos();
                let end = if j == 0 || j == n { 0.5 } else { 1.0 };
                let kend = if k == 0 || k == n { 0.5 } else { 1.0 };
                *c = 2.0 / nf * end * kend * tk;
            }
        }
        // antiderivative coefficients b (degree n + 1), b = D a
        let mut anti = vec![vec![0.0; n + 1]; n + 2];
        for k in 0..=n {
            match k {
                0 => anti[1][0] += 1.0,
                1 => anti[2][1] += 0.25,
                _ => {
                    anti[k + 1][k] += 1.0 / (2.0 * (k as f64 + 1.0));
                    anti[k - 1][k] -= 1.0 / (2.0 * (k as f64 - 1.0));
                }
            }
        }
        let mut integration = vec![vec![0.0; n + 1]; n + 1];
        for (i, row) in integration.iter_mut().enumerate() {
            let t = nodes[i];
            // T_m(t) - T_m(-1)
            let theta = t.clamp(-1.0, 1.0).acos();
            let basis: Vec<f64> = (0..=n + 1)
                .map(|m| {
                    let at_minus_one = if m % 2 == 0 { 1.0 } else { -1.0 };
                    (m as f64 * theta).cos() - at_minus_one
                })
                .collect();
            for (j, out) in row.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (m, b) in basis.iter().enumerate() {
                    let mut dm = 0.0;
                    for k in 0..=n {
                        dm += anti[m][k] * coef[k][j];
                    }
                    acc += b * dm;
                }
                *out = acc;
            }
        }
        let weights = integration[n].clone();
        ChebPanel {
            nodes,
            integration,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_polynomial_and_exp() {
        let (v, _) = integrate(|x| x * x, 0.0, 3.0, 1e-14, 1e-14).unwrap();
        assert!((v - 9.0).abs() < 1e-12);
        let (v, _) = integrate(|x: f64| (-x).exp(), 0.0, 50.0, 1e-15, 1e-13).unwrap();
        assert!((v - (1.0 - (-50f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn half_line_weighted_exponential() {
        // ∫ e^{-2x}(1+x)^2 = 1/2 + 2/4 + 2/8 by parts
        let v = integrate_half_line(|x: f64| (-2.0 * x).exp() * (1.0 + x).powi(2), &[], 1e-10).unwrap();
        assert!((v - 1.25).abs() < 1e-10, "{v}");
    }

    #[test]
    fn half_line_algebraic_tail() {
        // ∫ (1+x)^{-1.3} dx = 1/0.3
        let v = integrate_half_line(|x: f64| (1.0 + x).powf(-1.3), &[], 1e-9).unwrap();
        assert!((v - 1.0 / 0.3).abs() < 1e-7, "{v}");
    }

    #[test]
    fn legendre_rule() {
        let (x, w) = gauss_legendre(20);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(38)).sum();
        assert!((m - 2.0 / 39.0).abs() < 1e-14);
    }

    #[test]
    fn cheb_panel_exact_for_polynomials() {
        let p = ChebPanel::new(17);
        for deg in 0..=16 {
            for (i, &t) in p.nodes.iter().enumerate() {
                let got: f64 = p.integration[i]
                    .iter()
                    .zip(&p.nodes)
                    .map(|(s, x)| s * x.powi(deg))
                    .sum();
                let d = deg as f64 + 1.0;
                let want = (t.powi(deg + 1) - (-1f64).powi(deg + 1)) / d;
                assert!((got - want).abs() < 1e-13, "deg {deg} node {i}: {got} vs {want}");
            }
        }
    }
}
