//! Admissible perturbations q: r-weighted L² functions, absolutely continuous,
//! with q' also in the weighted space. Each family carries a closed-form
//! derivative (tabulated data uses a natural cubic spline and its exact
//! derivative).

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::quad;

/// Natural cubic spline through `(x_i, y_i)`, zero beyond the last node.
#[derive(Debug, Clone, PartialEq)]
pub struct Spline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// second derivatives at the nodes
    m: Vec<f64>,
}

impl Spline {
    fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n < 3 || ys.len() != n {
            return Err(Error::InvalidPotential(
                "table needs matching x and y arrays with at least 3 samples".into(),
            ));
        }
        if xs[0] != 0.0 {
            return Err(Error::InvalidPotential("table must start at x = 0".into()));
        }
        if xs.windows(2).any(|p| p[1] <= p[0]) || xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::InvalidPotential(
                "table x must be strictly increasing and all samples finite".into(),
            ));
        }
        let peak = ys.iter().fold(0.0f64, |a, y| a.max(y.abs()));
        if ys[n - 1].abs() > 1e-12 * peak.max(1e-300) && ys[n - 1] != 0.0 {
            return Err(Error::InvalidPotential(
                "table samples must decay to 0 at the last node".into(),
            ));
        }
        // tridiagonal system for interior second derivatives (Thomas algorithm)
        let mut m = vec![0.0; n];
        let k = n - 2;
        let mut diag = vec![0.0; k];
        let mut upper = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            diag[i - 1] = 2.0 * (h0 + h1);
            upper[i - 1] = h1;
            rhs[i - 1] = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
        }
        for i in 1..k {
            let lower = xs[i + 1] - xs[i];
            let w = lower / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        for i in (0..k).rev() {
            let next = if i + 1 < k { m[i + 2] } else { 0.0 };
            m[i + 1] = (rhs[i] - upper[i] * next) / diag[i];
        }
        Ok(Spline { xs, ys, m })
    }

    fn locate(&self, x: f64) -> Option<usize> {
        let n = self.xs.len();
        if x < 0.0 || x > self.xs[n - 1] {
            return None;
        }
        let i = self.xs.partition_point(|&t| t <= x);
        Some(i.clamp(1, n - 1) - 1)
    }

    fn value(&self, x: f64) -> f64 {
        let Some(i) = self.locate(x) else { return 0.0 };
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    fn derivative(&self, x: f64) -> f64 {
        let Some(i) = self.locate(x) else { return 0.0 };
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        (self.ys[i + 1] - self.ys[i]) / h
            + ((1.0 - 3.0 * a * a) * self.m[i] + (3.0 * b * b - 1.0) * self.m[i + 1]) * h / 6.0
    }

    fn scaled(&self, c: f64) -> Spline {
        Spline {
            xs: self.xs.clone(),
            ys: self.ys.iter().map(|y| c * y).collect(),
            m: self.m.iter().map(|v| c * v).collect(),
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.xs
    }
}

/// Functional form of a perturbation.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// c e^{-a x}
    Exp {
        c: f64,
        a: f64,
    },
    /// c (1 + x)^{-p}
    Alg {
        c: f64,
        p: f64,
    },
    /// c exp(1 - 1/(1 - t²)), t = (x - center)/width, zero for |t| >= 1
    Bump {
        c: f64,
        center: f64,
        width: f64,
    },
    Table(Spline),
    /// Pointwise sum, used for q + h v.
    Sum(Vec<Shape>),
}

impl Shape {
    fn value(&self, x: f64) -> f64 {
        match self {
            Shape::Exp { c, a } => c * (-a * x).exp(),
            Shape::Alg { c, p } => c * (1.0 + x).powf(-p),
            Shape::Bump { c, center, width } => {
                let t = (x - center) / width;
                if t.abs() >= 1.0 || *c == 0.0 {
                    0.0
                } else {
                    c * (1.0 - 1.0 / (1.0 - t * t)).exp()
                }
            }
            Shape::Table(s) => s.value(x),
            Shape::Sum(parts) => parts.iter().map(|p| p.value(x)).sum(),
        }
    }

    fn derivative(&self, x: f64) -> f64 {
        match self {
            Shape::Exp { c, a } => -a * c * (-a * x).exp(),
            Shape::Alg { c, p } => -p * c * (1.0 + x).powf(-p - 1.0),
            Shape::Bump { c, center, width } => {
                let t = (x - center) / width;
                if t.abs() >= 1.0 || *c == 0.0 {
                    0.0
                } else {
                    let u = 1.0 - t * t;
                    let q = c * (1.0 - 1.0 / u).exp();
                    -2.0 * t / (u * u) * q / width
                }
            }
            Shape::Table(s) => s.derivative(x),
            Shape::Sum(parts) => parts.iter().map(|p| p.derivative(x)).sum(),
        }
    }

    fn scaled(&self, k: f64) -> Shape {
        match self {
            Shape::Exp { c, a } => Shape::Exp { c: k * c, a: *a },
            Shape::Alg { c, p } => Shape::Alg { c: k * c, p: *p },
            Shape::Bump { c, center, width } => Shape::Bump {
                c: k * c,
                center: *center,
                width: *width,
            },
            Shape::Table(s) => Shape::Table(s.scaled(k)),
            Shape::Sum(parts) => Shape::Sum(parts.iter().map(|p| p.scaled(k)).collect()),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Shape::Exp { c, .. } | Shape::Alg { c, .. } | Shape::Bump { c, .. } => *c == 0.0,
            Shape::Table(s) => s.ys.iter().all(|&y| y == 0.0),
            Shape::Sum(parts) => parts.iter().all(Shape::is_zero),
        }
    }

    fn sup_norm(&self) -> f64 {
        match self {
            Shape::Exp { c, .. } | Shape::Alg { c, .. } | Shape::Bump { c, .. } => c.abs(),
            Shape::Table(s) => {
                let end = *s.xs.last().unwrap();
                (0..=4000)
                    .map(|i| s.value(end * i as f64 / 4000.0).abs())
                    .fold(0.0, f64::max)
            }
            Shape::Sum(parts) => parts.iter().map(Shape::sup_norm).sum(),
        }
    }

    fn decay_point(&self, tol: f64) -> f64 {
        match self {
            _ if self.is_zero() => 0.0,
            Shape::Exp { c, a } => ((c.abs() / tol).ln() / a).max(0.0),
            Shape::Alg { c, p } => ((c.abs() / tol).powf(1.0 / p) - 1.0).max(0.0),
            Shape::Bump { center, width, .. } => (center + width).max(0.0),
            Shape::Table(s) => *s.xs.last().unwrap(),
            Shape::Sum(parts) => {
                let k = parts.len().max(1) as f64;
                parts.iter().map(|p| p.decay_point(tol / k)).fold(0.0, f64::max)
            }
        }
    }

    fn breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            Shape::Bump { center, width, .. } => {
                out.push(center - width);
                out.push(*center);
                out.push(center + width);
            }
            Shape::Table(s) => out.extend_from_slice(&s.xs),
            Shape::Sum(parts) => parts.iter().for_each(|p| p.breakpoints(out)),
            _ => {}
        }
    }
}

/// A validated perturbation together with its weight exponent r > 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    shape: Shape,
    r: f64,
}

impl Potential {
    pub fn new(shape: Shape, r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 1.0) {
            return Err(Error::InvalidPotential(format!(
                "weight exponent r = {r} must exceed 1"
            )));
        }
        validate_shape(&shape, r)?;
        Ok(Potential { shape, r })
    }

    pub fn zero(r: f64) -> Result<Self> {
        Self::new(Shape::Exp { c: 0.0, a: 1.0 }, r)
    }

    pub fn exp(c: f64, a: f64, r: f64) -> Result<Self> {
        Self::new(Shape::Exp { c, a }, r)
    }

    pub fn alg(c: f64, p: f64, r: f64) -> Result<Self> {
        Self::new(Shape::Alg { c, p }, r)
    }

    pub fn bump(c: f64, center: f64, width: f64, r: f64) -> Result<Self> {
        Self::new(Shape::Bump { c, center, width }, r)
    }

    pub fn table(xs: Vec<f64>, ys: Vec<f64>, r: f64) -> Result<Self> {
        Self::new(Shape::Table(Spline::new(xs, ys)?), r)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn value(&self, x: f64) -> f64 {
        self.shape.value(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.shape.derivative(x)
    }

    pub fn is_zero(&self) -> bool {
        self.shape.is_zero()
    }

    /// sup |q| (exact for the analytic families, sampled for tables).
    pub fn sup_norm(&self) -> f64 {
        self.shape.sup_norm()
    }

    /// A point beyond which |q| <= tol.
    pub fn decay_point(&self, tol: f64) -> f64 {
        self.shape.decay_point(tol)
    }

    /// Points where q has kinks or its support starts/ends.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.shape.breakpoints(&mut out);
        out.retain(|&b| b > 0.0);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// k q, keeping r.
    pub fn scaled(&self, k: f64) -> Potential {
        Potential {
            shape: self.shape.scaled(k),
            r: self.r,
        }
    }

    /// q + k v, with the smaller of the two weight exponents.
    pub fn plus(&self, other: &Potential, k: f64) -> Potential {
        let mut parts = match &self.shape {
            Shape::Sum(p) => p.clone(),
            s => vec![s.clone()],
        };
        match other.shape.scaled(k) {
            Shape::Sum(p) => parts.extend(p),
            s => parts.push(s),
        }
        Potential {
            shape: Shape::Sum(parts),
            r: self.r.min(other.r),
        }
    }
}

fn validate_shape(shape: &Shape, r: f64) -> Result<()> {
    let finite = |name: &str, v: f64| {
        if v.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidPotential(format!("{name} must be finite")))
        }
    };
    match shape {
        Shape::Exp { c, a } => {
            finite("c", *c)?;
            finite("a", *a)?;
            if *a <= 0.0 {
                return Err(Error::InvalidPotential(format!(
                    "exp decay rate a = {a} must be positive"
                )));
            }
        }
        Shape::Alg { c, p } => {
            finite("c", *c)?;
            finite("p", *p)?;
            // ∫ (1+x)^{r - 2p} dx < ∞
            if *p <= (r + 1.0) / 2.0 && *c != 0.0 {
                return Err(Error::InvalidPotential(format!(
                    "alg exponent p = {p} must exceed (r + 1)/2 = {} for the weighted norm to be finite",
                    (r + 1.0) / 2.0
                )));
            }
        }
        Shape::Bump { c, center, width } => {
            finite("c", *c)?;
            finite("x0", *center)?;
            finite("w", *width)?;
            if *width <= 0.0 {
                return Err(Error::InvalidPotential(format!("bump width {width} must be positive")));
            }
        }
        Shape::Table(_) => {}
        Shape::Sum(parts) => {
            for p in parts {
                validate_shape(p, r)?;
            }
        }
    }
    Ok(())
}

/// Norms of q used throughout: the weighted L² norm, the norm including q',
/// the L¹ norm and the L¹ norm including q'.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormBundle {
    pub ar_norm: f64,
    pub derivative_ar_norm: f64,
    pub afr_norm: f64,
    pub l1_norm: f64,
    pub l1_bar: f64,
}

const NORM_TOL: f64 = 1e-10;

pub fn norms(q: &Potential) -> Result<NormBundle> {
    if q.is_zero() {
        return Ok(NormBundle {
            ar_norm: 0.0,
            derivative_ar_norm: 0.0,
            afr_norm: 0.0,
            l1_norm: 0.0,
            l1_bar: 0.0,
        });
    }
    let r = q.r();
    let breaks = q.breakpoints();
    let ar2 = quad::integrate_half_line(|x| q.value(x).powi(2) * (1.0 + x).powf(r), &breaks, NORM_TOL)?;
    let dar2 = quad::integrate_half_line(|x| q.derivative(x).powi(2) * (1.0 + x).powf(r), &breaks, NORM_TOL)?;
    let l1 = quad::integrate_half_line(|x| q.value(x).abs(), &breaks, NORM_TOL)?;
    let dl1 = quad::integrate_half_line(|x| q.derivative(x).abs(), &breaks, NORM_TOL)?;
    Ok(NormBundle {
        ar_norm: ar2.sqrt(),
        derivative_ar_norm: dar2.sqrt(),
        afr_norm: (ar2 + dar2).sqrt(),
        l1_norm: l1,
        l1_bar: l1 + dl1,
    })
}

/// ω(q, z) = ∫ |q(x)| / sqrt(1 + |x - z|) dx, plus ω(q', z) when
/// `with_derivative` is set.
pub fn omega(q: &Potential, z: f64, with_derivative: bool) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::Domain(format!("omega at z = {z}")));
    }
    if q.is_zero() {
        return Ok(0.0);
    }
    let mut breaks = q.breakpoints();
    if z > 0.0 {
        breaks.push(z);
    }
    let kernel = |x: f64| 1.0 / (1.0 + (x - z).abs()).sqrt();
    let mut total = quad::integrate_half_line(|x| q.value(x).abs() * kernel(x), &breaks, NORM_TOL)?;
    if with_derivative {
        total += quad::integrate_half_line(|x| q.derivative(x).abs() * kernel(x), &breaks, NORM_TOL)?;
    }
    Ok(total)
}

/// Rate function: n^{-1/3} sqrt(log n) for r in (1, 2), n^{-1/3} for r >= 2.
/// At n = 1 with r < 2 this is 0.
pub fn omega_r(r: f64, n: usize) -> f64 {
    let nf = n as f64;
    let base = nf.powf(-1.0 / 3.0);
    if r < 2.0 {
        base * nf.ln().sqrt()
    } else {
        base
    }
}

/// JSON form: `{"family": "exp"|"alg"|"bump"|"table", "params": {...}, "r": number}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialDescriptor {
    pub family: String,
    #[serde(default)]
    pub params: serde_json::Map<String, Value>,
    #[serde(default = "default_r")]
    pub r: f64,
}

fn default_r() -> f64 {
    2.0
}

impl Default for PotentialDescriptor {
    fn default() -> Self {
        PotentialDescriptor {
            family: "exp".into(),
            params: Default::default(),
            r: 2.0,
        }
    }
}

impl PotentialDescriptor {
    /// The zero perturbation.
    pub fn zero() -> Self {
        let mut params = serde_json::Map::new();
        params.insert("c".into(), 0.0.into());
        params.insert("a".into(), 1.0.into());
        PotentialDescriptor {
            family: "exp".into(),
            params,
            r: 2.0,
        }
    }
}

fn param(params: &serde_json::Map<String, Value>, family: &str, key: &str, default: Option<f64>) -> Result<f64> {
    match params.get(key) {
        Some(v) => v.as_f64().ok_or_else(|| {
            Error::InvalidPotential(format!("potential.params.{key} for family '{family}' must be a number"))
        }),
        None => default.ok_or_else(|| {
            Error::InvalidPotential(format!("potential.params.{key} is required for family '{family}'"))
        }),
    }
}

fn array(params: &serde_json::Map<String, Value>, key: &str) -> Result<Vec<f64>> {
    let arr = params
        .get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidPotential(format!("potential.params.{key} must be an array of numbers")))?;
    arr.iter()
        .map(|v| {
            v.as_f64()
                .ok_or_else(|| Error::InvalidPotential(format!("potential.params.{key} must contain only numbers")))
        })
        .collect()
}

/// Build and validate a potential from its descriptor.
pub fn make_potential(desc: &PotentialDescriptor) -> Result<Potential> {
    let p = &desc.params;
    let fam = desc.family.as_str();
    let known: &[&str] = match fam {
        "exp" => &["c", "a"],
        "alg" => &["c", "p"],
        "bump" => &["c", "x0", "w"],
        "table" => &["x", "y"],
        other => {
            return Err(Error::InvalidPotential(format!(
                "potential.family '{other}' is not one of exp, alg, bump, table"
            )))
        }
    };
    if let Some(k) = p.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(Error::InvalidPotential(format!(
            "unknown parameter potential.params.{k} for family '{fam}'"
        )));
    }
    match fam {
        "exp" => Potential::exp(param(p, fam, "c", None)?, param(p, fam, "a", Some(1.0))?, desc.r),
        "alg" => Potential::alg(param(p, fam, "c", None)?, param(p, fam, "p", None)?, desc.r),
        "bump" => Potential::bump(
            param(p, fam, "c", None)?,
            param(p, fam, "x0", None)?,
            param(p, fam, "w", None)?,
            desc.r,
        ),
        _ => Potential::table(array(p, "x")?, array(p, "y")?, desc.r),
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn norms_homogeneous(c in -2.0f64..2.0, a in 0.5f64..3.0, k in -3.0f64..3.0) {
            prop_assume!(c.abs() > 1e-3 && k.abs() > 1e-3);
            let q = Potential::exp(c, a, 2.0).unwrap();
            let n1 = norms(&q).unwrap();
            let n2 = norms(&q.scaled(k)).unwrap();
            prop_assert!((n2.ar_norm - k.abs() * n1.ar_norm).abs() <= 1e-8 * n2.ar_norm);
            prop_assert!((n2.l1_bar - k.abs() * n1.l1_bar).abs() <= 1e-8 * n2.l1_bar);
            let w1 = omega(&q, 5.0, true).unwrap();
            let w2 = omega(&q.scaled(k), 5.0, true).unwrap();
            prop_assert!((w2 - k.abs() * w1).abs() <= 1e-8 * w2);
        }

        #[test]
        fn norm_consistency_and_inclusion(c in 0.05f64..1.0, p in 1.8f64..4.0, r in 1.1f64..2.5) {
            prop_assume!(p > (r + 1.0) / 2.0 + 0.05);
            let q = Potential::alg(c, p, r).unwrap();
            let n = norms(&q).unwrap();
            let gap = n.afr_norm.powi(2) - n.ar_norm.powi(2) - n.derivative_ar_norm.powi(2);
            prop_assert!(gap.abs() <= 1e-6 * n.afr_norm.powi(2));
            prop_assert!(n.l1_norm <= n.ar_norm / (r - 1.0).sqrt());
        }
    }
}
