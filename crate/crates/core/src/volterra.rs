//! Volterra integral equations for solutions of -f'' + (x + q - z) f = 0.
//!
//! With the unperturbed kernel J₀(z,x,y) = θ₀(x)ψ₀(y) - ψ₀(x)θ₀(y):
//!
//! * ψ = ψ₀ - ∫_x^∞ J₀ q ψ dy          (decaying solution, backward)
//! * θ = θ₀ + ∫_0^x J₀ q θ dy           (growing solution, forward)
//! * s, c: the same forward equation seeded with s₀, c₀
//!
//! and the z-derivatives obtained by differentiating each equation in z,
//! using ∂_z J₀ = -∂_x J₀ - ∂_y J₀. Every equation is solved by summing
//! its Picard series. The kernel is separable, so each Picard term costs
//! two cumulative integrals, done panel by panel with Chebyshev–Lobatto
//! spectral integration on a graded grid.

use std::sync::OnceLock;

use std::f64::consts::PI;

use crate::airy::{airy_eval_scaled, envelope, zeta};
use crate::basis::psi_theta;
use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::quad::{integrate_half_line, ChebPanel};

/// Nodes per panel (polynomial degree + 1).
const PANEL_POINTS: usize = 17;
/// Baseline panel width at z = 0; scaled by (1 + |z|)^{-1/4}.
const PANEL_BASE: f64 = 0.8;
/// Half-width of the refined zone around the turning point.
const TURNING_ZONE: f64 = 2.0;
/// Extra length beyond the g_A inversion point.
const TAIL_MARGIN: f64 = 1.0;
/// How far past the g_A point the grid may be stretched to let q decay.
const Q_TAIL_CAP: f64 = 40.0;
const MAX_ITERATIONS: usize = 50;
const SERIES_TOL: f64 = 1e-13;

/// Default tail tolerance used by the eigenvalue solver.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

fn panel_rule() -> &'static ChebPanel {
    static RULE: OnceLock<ChebPanel> = OnceLock::new();
    RULE.get_or_init(|| ChebPanel::new(PANEL_POINTS))
}

/// Graded composite grid on [0, x_max].
#[derive(Debug, Clone)]
pub struct Grid {
    pub nodes: Vec<f64>,
    pub x_max: f64,
    /// Quadrature weights: Σ w_i f(x_i) ≈ ∫_0^{x_max} f.
    pub weights: Vec<f64>,
    /// Panel endpoints; panel k spans nodes k*(PANEL_POINTS-1) ..= (k+1)*(PANEL_POINTS-1).
    pub panels: Vec<(f64, f64)>,
}

impl Grid {
    /// Panels refined by 4x within |x - z| <= 2, widening geometrically
    /// (ratio 1.25) to the baseline and narrowing again in the decaying tail.
    pub fn new(z: f64, x_max: f64) -> Result<Self> {
        if !(x_max > 0.0 && x_max.is_finite() && z.is_finite()) {
            return Err(Error::Domain(format!("grid for z = {z}, x_max = {x_max}")));
        }
        let base = PANEL_BASE * (1.0 + z.abs()).powf(-0.25);
        let mut edges = vec![0.0];
        let mut x: f64 = 0.0;
        while x < x_max {
            let dist = if x < z - TURNING_ZONE {
                z - TURNING_ZONE - x
            } else if x > z + TURNING_ZONE {
                x - z - TURNING_ZONE
            } else {
                0.0
            };
            let decay = 2.0 / (1.0 + (x - z).max(0.0)).sqrt();
            let mut width = base.min((base + dist) / 4.0).min(decay);
            if x < z - TURNING_ZONE && x + width > z - TURNING_ZONE {
                width = (z - TURNING_ZONE - x).max(base / 4.0);
            }
            x = (x + width).min(x_max);
            if x_max - x < 0.25 * width {
                x = x_max;
            }
            edges.push(x);
        }
        let rule = panel_rule();
        let m = rule.len();
        let mut nodes = Vec::with_capacity((edges.len() - 1) * (m - 1) + 1);
        let mut weights = vec![0.0; (edges.len() - 1) * (m - 1) + 1];
        let mut panels = Vec::with_capacity(edges.len() - 1);
        for (k, pair) in edges.windows(2).enumerate() {
            let (a, b) = (pair[0], pair[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            let start = if k == 0 { 0 } else { 1 };
            for t in &rule.nodes[start..] {
                nodes.push(mid + half * t);
            }
            // pin endpoints exactly
            let last = nodes.len() - 1;
            nodes[last] = b;
            for (j, w) in rule.weights.iter().enumerate() {
                weights[k * (m - 1) + j] += half * w;
            }
            panels.push((a, b));
        }
        nodes[0] = 0.0;
        Ok(Grid {
            nodes,
            x_max,
            weights,
            panels,
        })
    }

    /// Grid for the problem at spectral parameter z with tail tolerance `tail_tol`.
    pub fn for_problem(q: &Potential, z: f64, tail_tol: f64) -> Result<Self> {
        Grid::new(z, truncation_point(q, z, tail_tol)?)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// ∫_0^{x_max} of sampled values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Cumulative ∫_0^{x_i} g for every node.
    pub fn cumulative_forward(&self, g: &[f64]) -> Vec<f64> {
        let rule = panel_rule();
        let m = rule.len();
        let mut out = vec![0.0; g.len()];
        for (k, &(a, b)) in self.panels.iter().enumerate() {
            let half = 0.5 * (b - a);
            let i0 = k * (m - 1);
            let base = out[i0];
            let seg = &g[i0..i0 + m];
            for i in 1..m {
                let row = &rule.integration[i];
                let s: f64 = row.iter().zip(seg).map(|(w, v)| w * v).sum();
                out[i0 + i] = base + half * s;
            }
        }
        out
    }

    /// Cumulative ∫_{x_i}^{x_max} g for every node, accumulated from the right.
    pub fn cumulative_backward(&self, g: &[f64]) -> Vec<f64> {
        let rule = panel_rule();
        let m = rule.len();
        let n = g.len();
        let mut out = vec![0.0; n];
        let last_row = &rule.integration[m - 1];
        for (k, &(a, b)) in self.panels.iter().enumerate().rev() {
            let half = 0.5 * (b - a);
            let i0 = k * (m - 1);
            let base = out[i0 + m - 1];
            let seg = &g[i0..i0 + m];
            for i in 0..m - 1 {
                let row = &rule.integration[i];
                let s: f64 = last_row.iter().zip(row).zip(seg).map(|((l, r), v)| (l - r) * v).sum();
                out[i0 + i] = base + half * s;
            }
        }
        out
    }
}

/// Truncation point: x_max = z + (1.5 ln(1/tol))^{2/3} + margin (at least 1), so
/// g_A(x_max - z) <= tol, pushed further (by at most `Q_TAIL_CAP`) until
/// |q(x_max)| <= tol.
pub fn truncation_point(q: &Potential, z: f64, tail_tol: f64) -> Result<f64> {
    if !(tail_tol > 0.0 && tail_tol <= 1e-6) {
        return Err(Error::Domain(format!("tail tolerance {tail_tol} outside (0, 1e-6]")));
    }
    if !z.is_finite() {
        return Err(Error::Domain(format!("truncation point at z = {z}")));
    }
    let offset = (1.5 * (1.0 / tail_tol).ln()).powf(2.0 / 3.0);
    let airy_point = z + offset + TAIL_MARGIN;
    let q_point = q.decay_point(tail_tol);
    let x_max = airy_point.max(q_point.min(airy_point + Q_TAIL_CAP)).max(1.0);
    if x_max - z > 100.0 {
        return Err(Error::Domain(format!(
            "z = {z} is too far below the spectrum for theta0 on [0, {x_max}]"
        )));
    }
    Ok(x_max)
}

/// Sampled solution with its x- and z-derivatives.
#[derive(Debug, Clone)]
pub struct SolutionProfile {
    pub z: f64,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
    /// ∂_z of the solution.
    pub z_derivs: Vec<f64>,
    /// ∂_x ∂_z of the solution.
    pub z_derivs_prime: Vec<f64>,
    /// g_A(x_max - z): size of the neglected tail relative to the envelope.
    pub tail_bound: f64,
    /// Picard terms summed for the value equation.
    pub iterations: usize,
    /// Relative weighted max-norm defect of the value equation.
    pub residual: f64,
}

impl SolutionProfile {
    pub fn at_origin(&self) -> (f64, f64, f64, f64) {
        (self.values[0], self.derivs[0], self.z_derivs[0], self.z_derivs_prime[0])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    /// ∫_x^∞
    Backward,
    /// ∫_0^x
    Forward,
}

/// Free term of a Volterra equation, with x-, z- and mixed derivatives.
struct Source {
    f: Vec<f64>,
    fp: Vec<f64>,
    fdot: Vec<f64>,
    fdotp: Vec<f64>,
}

/// The kernel data at one spectral parameter: ψ₀, θ₀ and q on the grid.
pub struct VolterraSystem<'a> {
    grid: &'a Grid,
    z: f64,
    psi0: Vec<f64>,
    psi0p: Vec<f64>,
    theta0: Vec<f64>,
    theta0p: Vec<f64>,
    q: Vec<f64>,
    /// envelope weights σ/g_A (decaying) and σ g_A (growing)
    w_decay: Vec<f64>,
    w_grow: Vec<f64>,
    at0: [f64; 4],
    /// ∫_{x_max}^∞ θ₀ψ₀ q and its z-derivative.
    far: FarField,
}

impl<'a> VolterraSystem<'a> {
    pub fn new(q: &Potential, z: f64, grid: &'a Grid) -> Result<Self> {
        let n = grid.len();
        let mut sys = VolterraSystem {
            grid,
            z,
            psi0: Vec::with_capacity(n),
            psi0p: Vec::with_capacity(n),
            theta0: Vec::with_capacity(n),
            theta0p: Vec::with_capacity(n),
            q: Vec::with_capacity(n),
            w_decay: Vec::with_capacity(n),
            w_grow: Vec::with_capacity(n),
            at0: psi_theta(z, 0.0)?,
            far: far_field(q, z, grid.x_max)?,
        };
        for &x in &grid.nodes {
            let [p, pp, t, tp] = psi_theta(z, x)?;
            sys.psi0.push(p);
            sys.psi0p.push(pp);
            sys.theta0.push(t);
            sys.theta0p.push(tp);
            sys.q.push(q.value(x));
            let e = envelope(x - z)?;
            sys.w_decay.push(e.sigma * (-e.log_g_a).exp());
            sys.w_grow.push(e.sigma * e.g_a);
        }
        Ok(sys)
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// (K u, (K u)') for K u = ∓∫ J₀ q u.
    fn apply(&self, dir: Direction, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let qu: Vec<f64> = self.q.iter().zip(u).map(|(q, u)| q * u).collect();
        let a_int: Vec<f64> = self.psi0.iter().zip(&qu).map(|(p, v)| p * v).collect();
        let b_int: Vec<f64> = self.theta0.iter().zip(&qu).map(|(t, v)| t * v).collect();
        let (a, b, sign) = match dir {
            Direction::Backward => (
                self.grid.cumulative_backward(&a_int),
                self.grid.cumulative_backward(&b_int),
                -1.0,
            ),
            Direction::Forward => (
                self.grid.cumulative_forward(&a_int),
                self.grid.cumulative_forward(&b_int),
                1.0,
            ),
        };
        let n = u.len();
        let mut val = Vec::with_capacity(n);
        let mut der = Vec::with_capacity(n);
        for i in 0..n {
            val.push(sign * (self.theta0[i] * a[i] - self.psi0[i] * b[i]));
            der.push(sign * (self.theta0p[i] * a[i] - self.psi0p[i] * b[i]));
        }
        (val, der)
    }

    /// The term ∓∫ ∂_z J₀ q u of the z-differentiated equation, and its x-derivative.
    fn z_source(&self, dir: Direction, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let qu: Vec<f64> = self.q.iter().zip(u).map(|(q, u)| q * u).collect();
        let mul = |f: &[f64]| -> Vec<f64> { f.iter().zip(&qu).map(|(a, b)| a * b).collect() };
        let cum = |g: Vec<f64>| match dir {
            Direction::Backward => self.grid.cumulative_backward(&g),
            Direction::Forward => self.grid.cumulative_forward(&g),
        };
        let a = cum(mul(&self.psi0));
        let b = cum(mul(&self.theta0));
        let c = cum(mul(&self.psi0p));
        let d = cum(mul(&self.theta0p));
        let sign = match dir {
            Direction::Backward => 1.0,
            Direction::Forward => -1.0,
        };
        let n = u.len();
        let mut val = Vec::with_capacity(n);
        let mut der = Vec::with_capacity(n);
        for i in 0..n {
            let wx = self.grid.nodes[i] - self.z;
            val.push(
                sign * (self.theta0p[i] * a[i] - self.psi0p[i] * b[i] + self.theta0[i] * c[i] - self.psi0[i] * d[i]),
            );
            der.push(
                sign * (wx * self.theta0[i] * a[i] - wx * self.psi0[i] * b[i] + self.theta0p[i] * c[i]
                    - self.psi0p[i] * d[i]),
            );
        }
        (val, der)
    }

    fn weighted_max(&self, dir: Direction, v: &[f64]) -> f64 {
        let w = match dir {
            Direction::Backward => &self.w_decay,
            Direction::Forward => &self.w_grow,
        };
        v.iter().zip(w).map(|(a, w)| (a * w).abs()).fold(0.0, f64::max)
    }

    /// Sum the Picard series u = Σ Kⁿ f. Returns (u, u', terms used).
    fn picard(&self, dir: Direction, f: &[f64], fp: &[f64], what: &'static str) -> Result<(Vec<f64>, Vec<f64>, usize)> {
        let mut sum = f.to_vec();
        let mut sum_p = fp.to_vec();
        let mut term = f.to_vec();
        let scale = self.weighted_max(dir, f).max(f64::MIN_POSITIVE);
        for it in 1..=MAX_ITERATIONS {
            let (t, tp) = self.apply(dir, &term);
            for i in 0..sum.len() {
                sum[i] += t[i];
                sum_p[i] += tp[i];
            }
            let size = self.weighted_max(dir, &t);
            term = t;
            if size <= SERIES_TOL * scale.max(self.weighted_max(dir, &sum)) {
                return Ok((sum, sum_p, it));
            }
            if !size.is_finite() {
                break;
            }
        }
        Err(Error::NoConvergence {
            method: what,
            iterations: MAX_ITERATIONS,
            detail: format!(
                "Picard series at z = {} did not settle; check grid and truncation",
                self.z
            ),
        })
    }

    fn solve(&self, dir: Direction, src: Source, what: &'static str) -> Result<SolutionProfile> {
        let (u, up, iterations) = self.picard(dir, &src.f, &src.fp, what)?;
        // defect of u = f + K u
        let (ku, _) = self.apply(dir, &u);
        let defect: Vec<f64> = (0..u.len()).map(|i| u[i] - src.f[i] - ku[i]).collect();
        let residual = self.weighted_max(dir, &defect) / self.weighted_max(dir, &u).max(f64::MIN_POSITIVE);

        let (zs, zsp) = self.z_source(dir, &u);
        let g: Vec<f64> = src.fdot.iter().zip(&zs).map(|(a, b)| a + b).collect();
        let gp: Vec<f64> = src.fdotp.iter().zip(&zsp).map(|(a, b)| a + b).collect();
        let (ud, udp, _) = self.picard(dir, &g, &gp, what)?;
        let b = self.far.b;
        let tail_bound = envelope(self.grid.x_max - self.z)?.g_a + b * b + b.abs() / (self.grid.x_max - self.z);
        Ok(SolutionProfile {
            z: self.z,
            nodes: self.grid.nodes.clone(),
            values: u,
            derivs: up,
            z_derivs: ud,
            z_derivs_prime: udp,
            tail_bound,
            iterations,
            residual,
        })
    }

    pub fn psi(&self) -> Result<SolutionProfile> {
        // the part of q beyond x_max enters through the far-field constants
        let ff = &self.far;
        let (k, kdot) = ff.psi_coefficient();
        let n = self.grid.len();
        let mut src = Source {
            f: Vec::with_capacity(n),
            fp: Vec::with_capacity(n),
            fdot: Vec::with_capacity(n),
            fdotp: Vec::with_capacity(n),
        };
        for i in 0..n {
            let wx = self.grid.nodes[i] - self.z;
            let (p, pp) = (self.psi0[i], self.psi0p[i]);
            let (t, tp) = (self.theta0[i], self.theta0p[i]);
            let (a, adot) = ff.theta_coefficient(t);
            let (ap, adotp) = ff.theta_coefficient(tp);
            src.f.push(k * p - a);
            src.fp.push(k * pp - ap);
            src.fdot.push(-k * pp + kdot * p - adot + ap);
            src.fdotp.push(-k * wx * p + kdot * pp - adotp + wx * a);
        }
        self.solve(Direction::Backward, src, "solve_psi")
    }

    /// 1 + ∫ θ₀ ψ q: the value of W(ψ, θ), constant in x.
    ///
    /// Beyond x_max, ψ ≈ (1 + B(y)) ψ₀ with B(y) the far-field integral from y,
    /// so the tail contributes B + B²/2.
    pub fn wronskian_constant(&self, psi: &SolutionProfile) -> f64 {
        let g: Vec<f64> = (0..self.grid.len())
            .map(|i| self.theta0[i] * psi.values[i] * self.q[i])
            .collect();
        1.0 + self.grid.integrate(&g) + self.far.psi_coefficient().0 - 1.0
    }

    /// max |ψ₀θ₀' - ψ₀'θ₀ - 1| over the grid.
    pub fn basis_wronskian_deviation(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| (self.psi0[i] * self.theta0p[i] - self.psi0p[i] * self.theta0[i] - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// ψ and ψ' only, skipping the z-derivative.
    pub fn psi_values(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let k = self.far.psi_coefficient().0;
        let f: Vec<f64> = self
            .psi0
            .iter()
            .zip(&self.theta0)
            .map(|(p, t)| k * p - self.far.theta_coefficient(*t).0)
            .collect();
        let fp: Vec<f64> = self
            .psi0p
            .iter()
            .zip(&self.theta0p)
            .map(|(p, t)| k * p - self.far.theta_coefficient(*t).0)
            .collect();
        let (u, up, _) = self.picard(Direction::Backward, &f, &fp, "solve_psi")?;
        Ok((u, up))
    }

    pub fn theta(&self) -> Result<SolutionProfile> {
        let n = self.grid.len();
        let mut fdotp = Vec::with_capacity(n);
        for i in 0..n {
            fdotp.push(-(self.grid.nodes[i] - self.z) * self.theta0[i]);
        }
        let src = Source {
            f: self.theta0.clone(),
            fp: self.theta0p.clone(),
            fdot: self.theta0p.iter().map(|v| -v).collect(),
            fdotp,
        };
        self.solve(Direction::Forward, src, "solve_theta")
    }

    pub fn sc(&self) -> Result<(SolutionProfile, SolutionProfile)> {
        let [p0, pp0, t0, tp0] = self.at0;
        let z = self.z;
        let n = self.grid.len();
        let (mut s, mut sp, mut sd, mut sdp) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        let (mut c, mut cp, mut cd, mut cdp) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for i in 0..n {
            let wx = self.grid.nodes[i] - z;
            let (p, pp, t, tp) = (self.psi0[i], self.psi0p[i], self.theta0[i], self.theta0p[i]);
            s[i] = -t0 * p + p0 * t;
            sp[i] = -t0 * pp + p0 * tp;
            c[i] = tp0 * p - pp0 * t;
            cp[i] = tp0 * pp - pp0 * tp;
            // ṡ₀ = c₀ - s₀', and its x-derivative c₀' - (x - z) s₀
            sd[i] = c[i] - sp[i];
            sdp[i] = cp[i] - wx * s[i];
            // ċ₀ from ∂_z of θ₀'(0)ψ₀ - ψ₀'(0)θ₀, using ∂_z ψ₀ = -ψ₀', ∂_z ψ₀'(0) = z ψ₀(0)
            cd[i] = z * t0 * p - tp0 * pp - z * p0 * t + pp0 * tp;
            cdp[i] = z * t0 * pp - tp0 * wx * p - z * p0 * tp + pp0 * wx * t;
        }
        let s_prof = self.solve(
            Direction::Forward,
            Source {
                f: s,
                fp: sp,
                fdot: sd,
                fdotp: sdp,
            },
            "solve_sc",
        )?;
        let c_prof = self.solve(
            Direction::Forward,
            Source {
                f: c,
                fp: cp,
                fdot: cd,
                fdotp: cdp,
            },
            "solve_sc",
        )?;
        Ok((s_prof, c_prof))
    }
}

/// Effect of q on (x_max, ∞). Past the cutoff ψ ≈ (1 + B(y)) ψ₀ with
/// B(y) = ∫_y^∞ θ₀ψ₀ q, so on the grid
/// ψ ≈ (1 + B + B²/2) ψ₀ - A θ₀ - ∫_x^{x_max} J₀ q ψ with A = ∫_{x_max}^∞ ψ₀² q.
#[derive(Debug, Clone, Copy, Default)]
struct FarField {
    b: f64,
    bdot: f64,
    /// A and ∂_z A, both times e^{2ζ(x_max - z)}
    a_scaled: f64,
    adot_scaled: f64,
    zeta_max: f64,
}

impl FarField {
    /// (1 + B + B²/2, its z-derivative)
    fn psi_coefficient(&self) -> (f64, f64) {
        (1.0 + self.b + 0.5 * self.b * self.b, self.bdot * (1.0 + self.b))
    }

    /// (A·t, Ȧ·t) for a value t of θ₀ or θ₀'.
    fn theta_coefficient(&self, t: f64) -> (f64, f64) {
        if self.a_scaled == 0.0 && self.adot_scaled == 0.0 {
            return (0.0, 0.0);
        }
        let e = (-self.zeta_max).exp();
        let te = t * e * e;
        (te * self.a_scaled, te * self.adot_scaled)
    }
}

fn far_field(q: &Potential, z: f64, x_max: f64) -> Result<FarField> {
    if q.is_zero() || q.decay_point(1e-18) <= x_max {
        return Ok(FarField::default());
    }
    let zeta_max = zeta(x_max - z);
    // (θ₀ψ₀, (θ₀ψ₀)', ψ₀² e^{2ζmax}, (ψ₀²)' e^{2ζmax}) at w = y - z
    let products = |w: f64| -> [f64; 4] {
        match airy_eval_scaled(w) {
            Ok(a) if w <= 200.0 => {
                let d = (-2.0 * (a.zeta - zeta_max)).exp();
                [
                    PI * a.ai * a.bi,
                    PI * (a.ai_prime * a.bi + a.ai * a.bi_prime),
                    PI * a.ai * a.ai * d,
                    2.0 * PI * a.ai * a.ai_prime * d,
                ]
            }
            _ => [0.5 / w.sqrt(), -0.25 / w.powf(1.5), 0.0, 0.0],
        }
    };
    let part = |k: usize| integrate_half_line(|t| products(x_max + t - z)[k] * q.value(x_max + t), &[], 1e-10);
    Ok(FarField {
        b: part(0)?,
        bdot: -part(1)?,
        a_scaled: part(2)?,
        adot_scaled: -part(3)?,
        zeta_max,
    })
}

/// ψ(q,z,·), ψ', ψ̇ and ψ̇' on `grid`.
pub fn solve_psi(q: &Potential, z: f64, grid: &Grid) -> Result<SolutionProfile> {
    VolterraSystem::new(q, z, grid)?.psi()
}

/// θ(q,z,·), θ', θ̇ and θ̇' on `grid`.
pub fn solve_theta(q: &Potential, z: f64, grid: &Grid) -> Result<SolutionProfile> {
    VolterraSystem::new(q, z, grid)?.theta()
}

/// The fundamental pair (s, c) with s(0) = 0, s'(0) = 1, c(0) = 1, c'(0) = 0.
pub fn solve_sc(q: &Potential, z: f64, grid: &Grid) -> Result<(SolutionProfile, SolutionProfile)> {
    VolterraSystem::new(q, z, grid)?.sc()
}
