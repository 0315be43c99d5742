//! Airy functions Ai, Bi and their derivatives on the real line.
//!
//! For |w| <= 12 values come from short Taylor expansions around anchor
//! points spaced 0.25 apart. The anchors are filled once by propagating the
//! Airy equation y'' = w y with Taylor steps: Ai and Bi start from their
//! closed-form values at the origin, except Ai on the positive axis, which
//! is seeded by the asymptotic series at w = 12 and propagated backwards
//! (the only stable direction for the recessive solution). Beyond |w| = 12
//! the classical asymptotic expansions are summed; for w < -12 they are
//! written in modulus/phase form.
//!
//! Bi overflows f64 for w > ~104, so [`airy_eval_scaled`] returns the
//! exponentially scaled values used by the rest of the crate.

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Ai(0).
pub const AI0: f64 = 0.355_028_053_887_817_24;
/// Ai'(0).
pub const AIP0: f64 = -0.258_819_403_792_806_8;
/// Bi(0).
pub const BI0: f64 = 0.614_926_627_446_000_7;
/// Bi'(0).
pub const BIP0: f64 = 0.448_288_357_353_826_36;

const ANCHOR_STEP: f64 = 0.25;
const TABLE_LIMIT: f64 = 12.0;
const ANCHORS_PER_SIDE: usize = 48;
const MAX_ARG: f64 = 200.0;
/// Past this argument e^{2/3 w^{3/2}} overflows f64.
const BI_OVERFLOW_ARG: f64 = 104.0;

/// Ai, Ai', Bi, Bi' at a real argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryValues {
    pub w: f64,
    pub ai: f64,
    pub ai_prime: f64,
    pub bi: f64,
    pub bi_prime: f64,
}

impl AiryValues {
    /// Ai Bi' - Ai' Bi, which equals 1/π.
    pub fn wronskian(&self) -> f64 {
        self.ai * self.bi_prime - self.ai_prime * self.bi
    }
}

/// Exponentially scaled Airy values.
///
/// With `zeta = 2/3 w^{3/2}` for `w > 0` (and `0` otherwise) the true values
/// are `ai * exp(-zeta)`, `ai_prime * exp(-zeta)`, `bi * exp(zeta)` and
/// `bi_prime * exp(zeta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledAiry {
    pub w: f64,
    pub zeta: f64,
    pub ai: f64,
    pub ai_prime: f64,
    pub bi: f64,
    pub bi_prime: f64,
}

impl ScaledAiry {
    /// Undo the scaling. Bi may be infinite and Ai may underflow to zero.
    pub fn unscaled(&self) -> AiryValues {
        let down = (-self.zeta).exp();
        let up = self.zeta.exp();
        AiryValues {
            w: self.w,
            ai: self.ai * down,
            ai_prime: self.ai_prime * down,
            bi: self.bi * up,
            bi_prime: self.bi_prime * up,
        }
    }
}

/// The weights σ(w) = 1 + |w|^{1/4}, g_A(w) = exp(-2/3 Re w^{3/2}) and g_B = 1/g_A.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub w: f64,
    pub sigma: f64,
    pub g_a: f64,
    pub g_b: f64,
    /// ln g_A(w); finite even where g_A underflows.
    pub log_g_a: f64,
}

/// The n-th zero of Ai.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryZero {
    pub n: usize,
    pub a_n: f64,
    /// |Ai(a_n)| after refinement.
    pub refinement_residual: f64,
}

/// 2/3 w^{3/2} for w > 0, zero otherwise.
pub fn zeta(w: f64) -> f64 {
    if w > 0.0 {
        2.0 / 3.0 * w * w.sqrt()
    } else {
        0.0
    }
}

pub fn envelope(w: f64) -> Result<Envelope> {
    if !w.is_finite() {
        return Err(Error::Domain(format!("envelope argument {w}")));
    }
    let log_g_a = -zeta(w);
    let g_a = log_g_a.exp();
    Ok(Envelope {
        w,
        sigma: 1.0 + w.abs().powf(0.25),
        g_a,
        g_b: 1.0 / g_a,
        log_g_a,
    })
}

/// Ai, Ai', Bi, Bi' at `w`, without scaling.
///
/// Fails with [`Error::Overflow`] where Bi exceeds the f64 range.
pub fn airy_eval(w: f64) -> Result<AiryValues> {
    let s = airy_eval_scaled(w)?;
    if w > BI_OVERFLOW_ARG {
        return Err(Error::Overflow { w });
    }
    Ok(s.unscaled())
}

/// Exponentially scaled Ai, Ai', Bi, Bi' at `w`, valid for |w| <= 200.
pub fn airy_eval_scaled(w: f64) -> Result<ScaledAiry> {
    if w.is_nan() {
        return Err(Error::Domain("Airy argument is NaN".into()));
    }
    if w.abs() > MAX_ARG {
        return Err(Error::Domain(format!(
            "Airy argument {w} outside [-{MAX_ARG}, {MAX_ARG}]"
        )));
    }
    if w.abs() <= TABLE_LIMIT {
        let v = table_eval(w);
        let z = zeta(w);
        let (down, up) = ((-z).exp(), z.exp());
        Ok(ScaledAiry {
            w,
            zeta: z,
            ai: v[0] * up,
            ai_prime: v[1] * up,
            bi: v[2] * down,
            bi_prime: v[3] * down,
        })
    } else if w > 0.0 {
        Ok(asymptotic_positive(w))
    } else {
        Ok(asymptotic_negative(w))
    }
}

/// Ai(w) alone; convenience for root-finding and quadrature.
pub fn ai(w: f64) -> f64 {
    airy_eval_scaled(w).map(|s| s.ai * (-s.zeta).exp()).unwrap_or(f64::NAN)
}

/// Ai'(w) alone.
pub fn ai_prime(w: f64) -> f64 {
    airy_eval_scaled(w)
        .map(|s| s.ai_prime * (-s.zeta).exp())
        .unwrap_or(f64::NAN)
}

/// Leading term of the zero asymptotics, -(3π/2 (n - 1/4))^{2/3}.
pub fn airy_zero_seed(n: usize) -> f64 {
    -(1.5 * PI * (n as f64 - 0.25)).powf(2.0 / 3.0)
}

/// The n-th (n >= 1) zero of Ai, refined by Newton's method with a bisection
/// safeguard inside a bracket around the asymptotic seed.
pub fn airy_zero(n: usize) -> Result<AiryZero> {
    if n == 0 {
        return Err(Error::Domain("Airy zeros are indexed from 1".into()));
    }
    let seed = airy_zero_seed(n);
    let nf = n as f64;
    // remainder scale of the seed, capped below half the local zero spacing
    let half = (5.0 * nf.powf(-4.0 / 3.0)).min(0.4 * PI / (-seed).sqrt());
    let (mut lo, mut hi) = (seed - half, seed + half);
    let (mut f_lo, f_hi) = (ai(lo), ai(hi));
    if f_lo * f_hi > 0.0 {
        return Err(Error::NoConvergence {
            method: "airy_zero",
            iterations: 0,
            detail: format!("no sign change of Ai on [{lo}, {hi}]"),
        });
    }
    let mut w = seed;
    for it in 0..100 {
        let v = airy_eval_scaled(w)?;
        let (f, df) = (v.ai, v.ai_prime); // zeta = 0 for negative w
        if f == 0.0 {
            return Ok(AiryZero {
                n,
                a_n: w,
                refinement_residual: 0.0,
            });
        }
        if f * f_lo > 0.0 {
            lo = w;
            f_lo = f;
        } else {
            hi = w;
        }
        let mut next = w - f / df;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - w).abs();
        w = next;
        if step <= 4.0 * f64::EPSILON * w.abs() {
            let residual = ai(w).abs();
            if residual <= 1e-12 {
                return Ok(AiryZero {
                    n,
                    a_n: w,
                    refinement_residual: residual,
                });
            }
            return Err(Error::NoConvergence {
                method: "airy_zero",
                iterations: it + 1,
                detail: format!("stalled at {w} with |Ai| = {residual:e}"),
            });
        }
    }
    Err(Error::NoConvergence {
        method: "airy_zero",
        iterations: 100,
        detail: format!("last iterate {w}, bracket [{lo}, {hi}]"),
    })
}

/// Empirical constant in the envelope bounds |Ai| <= C σ^{-1} g_A and
/// |Ai'| <= C σ g_A: the maximum of both ratios over `grid`.
pub fn envelope_margin(grid: &[f64]) -> Result<f64> {
    let mut best: f64 = 0.0;
    for &w in grid {
        let s = airy_eval_scaled(w)?;
        let sigma = 1.0 + w.abs().powf(0.25);
        best = best.max(s.ai.abs() * sigma).max(s.ai_prime.abs() / sigma);
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Taylor table
// ---------------------------------------------------------------------------

/// One Taylor step of the Airy equation from `w0` by `d` for a solution with
/// value `y` and slope `yp` at `w0`.
fn taylor_step(w0: f64, d: f64, y: f64, yp: f64) -> (f64, f64) {
    // c_{k+2} (k+2)(k+1) = w0 c_k + c_{k-1}
    let mut c = [0.0f64; 3]; // c_{k-1}, c_k, c_{k+1}
    c[1] = y;
    c[2] = yp;
    let mut value = y + yp * d;
    let mut slope = yp;
    let mut dk = d; // d^{k+1} after each update
    let mut small = 0;
    for k in 0..120usize {
        let kf = k as f64;
        let next = (w0 * c[1] + c[0]) / ((kf + 2.0) * (kf + 1.0));
        // next is c_{k+2}
        let term_slope = (kf + 2.0) * next * dk;
        dk *= d;
        let term_value = next * dk;
        value += term_value;
        slope += term_slope;
        c = [c[1], c[2], next];
        let scale = value.abs().max(slope.abs()).max(f64::MIN_POSITIVE);
        if term_value.abs() < 1e-18 * scale && term_slope.abs() < 1e-18 * scale {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
    (value, slope)
}

struct Table {
    /// (ai, ai', bi, bi') at w = (i - ANCHORS_PER_SIDE) * ANCHOR_STEP.
    anchors: Vec<[f64; 4]>,
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(build_table)
}

fn build_table() -> Table {
    let m = ANCHORS_PER_SIDE;
    let mut anchors = vec![[0.0; 4]; 2 * m + 1];
    anchors[m] = [AI0, AIP0, BI0, BIP0];

    // negative axis: both solutions oscillate, march down from the origin
    for i in (0..m).rev() {
        let w0 = (i as f64 + 1.0 - m as f64) * ANCHOR_STEP;
        let prev = anchors[i + 1];
        let (a, ap) = taylor_step(w0, -ANCHOR_STEP, prev[0], prev[1]);
        let (b, bp) = taylor_step(w0, -ANCHOR_STEP, prev[2], prev[3]);
        anchors[i] = [a, ap, b, bp];
    }
    // positive axis: Bi is dominant, march up
    for i in m + 1..=2 * m {
        let w0 = (i as f64 - 1.0 - m as f64) * ANCHOR_STEP;
        let prev = anchors[i - 1];
        let (b, bp) = taylor_step(w0, ANCHOR_STEP, prev[2], prev[3]);
        anchors[i][2] = b;
        anchors[i][3] = bp;
    }
    // positive axis: Ai is recessive, seed at the far end and march down
    let far = asymptotic_positive(TABLE_LIMIT).unscaled();
    anchors[2 * m][0] = far.ai;
    anchors[2 * m][1] = far.ai_prime;
    for i in (m + 1..2 * m).rev() {
        let w0 = (i as f64 + 1.0 - m as f64) * ANCHOR_STEP;
        let prev = anchors[i + 1];
        let (a, ap) = taylor_step(w0, -ANCHOR_STEP, prev[0], prev[1]);
        anchors[i][0] = a;
        anchors[i][1] = ap;
    }
    Table { anchors }
}

fn table_eval(w: f64) -> [f64; 4] {
    let m = ANCHORS_PER_SIDE as f64;
    let idx = ((w / ANCHOR_STEP).round() + m).clamp(0.0, 2.0 * m) as usize;
    let w0 = (idx as f64 - m) * ANCHOR_STEP;
    let a = table().anchors[idx];
    let d = w - w0;
    if d == 0.0 {
        return a;
    }
    let (ai, aip) = taylor_step(w0, d, a[0], a[1]);
    let (bi, bip) = taylor_step(w0, d, a[2], a[3]);
    [ai, aip, bi, bip]
}

// ---------------------------------------------------------------------------
// Asymptotic expansions
// ---------------------------------------------------------------------------

/// Coefficients u_k, v_k of the Airy asymptotic series, k = 0..N.
fn series_coefficients() -> &'static ([f64; 64], [f64; 64]) {
    static COEFFS: OnceLock<([f64; 64], [f64; 64])> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut u = [0.0; 64];
        let mut v = [0.0; 64];
        u[0] = 1.0;
        v[0] = 1.0;
        for k in 1..64 {
            let kf = k as f64;
            u[k] = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
            v[k] = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u[k];
        }
        (u, v)
    })
}

/// Sums Σ sign_k c_k ζ^{-k}, stopping once terms stop shrinking or are negligible.
fn asymptotic_sum(c: &[f64; 64], zeta: f64, alternating: bool, start: usize, stride: usize) -> f64 {
    let mut total = 0.0;
    let mut last = f64::INFINITY;
    let mut sign = 1.0;
    let mut k = start;
    while k < 64 {
        let term = sign * c[k] * zeta.powi(-(k as i32));
        if term.abs() > last {
            break;
        }
        total += term;
        if term.abs() <= 1e-18 * total.abs() {
            break;
        }
        last = term.abs();
        if alternating {
            sign = -sign;
        }
        k += stride;
    }
    total
}

fn asymptotic_positive(w: f64) -> ScaledAiry {
    let (u, v) = series_coefficients();
    let z = zeta(w);
    let w4 = w.powf(0.25);
    let sqrt_pi = PI.sqrt();
    // Ai uses alternating signs (-1)^k, Bi uses all plus
    let su_alt = asymptotic_sum(u, z, true, 0, 1);
    let sv_alt = asymptotic_sum(v, z, true, 0, 1);
    let su = asymptotic_sum(u, z, false, 0, 1);
    let sv = asymptotic_sum(v, z, false, 0, 1);
    ScaledAiry {
        w,
        zeta: z,
        ai: su_alt / (2.0 * sqrt_pi * w4),
        ai_prime: -w4 * sv_alt / (2.0 * sqrt_pi),
        bi: su / (sqrt_pi * w4),
        bi_prime: w4 * sv / sqrt_pi,
    }
}

fn asymptotic_negative(w: f64) -> ScaledAiry {
    let (u, v) = series_coefficients();
    let x = -w;
    let z = 2.0 / 3.0 * x * x.sqrt();
    let x4 = x.powf(0.25);
    let sqrt_pi = PI.sqrt();
    // even and odd parts, each with alternating sign in its own index
    let u_even = asymptotic_sum(u, z, true, 0, 2);
    let u_odd = asymptotic_sum(u, z, true, 1, 2);
    let v_even = asymptotic_sum(v, z, true, 0, 2);
    let v_odd = asymptotic_sum(v, z, true, 1, 2);
    let phase = reduced_phase(x) - FRAC_PI_4;
    let (s, c) = phase.sin_cos();
    ScaledAiry {
        w,
        zeta: 0.0,
        ai: (c * u_even + s * u_odd) / (sqrt_pi * x4),
        ai_prime: x4 * (s * v_even - c * v_odd) / sqrt_pi,
        bi: (-s * u_even + c * u_odd) / (sqrt_pi * x4),
        bi_prime: x4 * (c * v_even + s * v_odd) / sqrt_pi,
    }
}

/// 2/3 x^{3/2} reduced modulo 2π.
fn reduced_phase(x: f64) -> f64 {
    let z = 2.0 / 3.0 * x * x.sqrt();
    z.rem_euclid(2.0 * PI)
}
