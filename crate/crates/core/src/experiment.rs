//! Verification campaigns: configuration, orchestration and reports.
//!
//! A campaign solves the spectrum with the shooting solver and/or the
//! finite-difference oracle, compares both with the first-order
//! predictions, runs the enabled checks and writes `results.csv`,
//! `summary.json` and `log.txt`. Output is byte-for-byte deterministic.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::airy::{self, airy_eval_scaled, airy_zero, airy_zero_seed, envelope, envelope_margin};
use crate::asymptotics::{build_report, AsymptoticsReport, DecayFit};
use crate::error::{Error, Result};
use crate::oracle::{oracle_extrapolated, OracleEigen, DEFAULT_MESHES};
use crate::potential::{make_potential, Potential, PotentialDescriptor};
use crate::quad::integrate_half_line;
use crate::spectrum::{eigenvalues, gradient, locate_eigenvalue, oscillation_count, EigenRecord, Method};
use crate::volterra::{Grid, VolterraSystem, DEFAULT_TAIL_TOL};

pub const CSV_HEADER: &str =
    "n,lambda_shoot,lambda_oracle,lambda_pred,lambda_resid,kappa_shoot,kappa_oracle,kappa_pred,kappa_resid,omega_r";
/// Largest index a campaign accepts.
pub const MAX_INDEX: usize = 200;
/// W(s,c) is checked up to this distance past the turning point.
pub const SC_REACH: f64 = 2.0;
/// Step of the finite-difference gradient oracle.
pub const GRADIENT_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    EigenAsym,
    KappaAsym,
    Gradients,
    Invariants,
}

impl CheckName {
    pub const ALL: [CheckName; 4] = [
        CheckName::EigenAsym,
        CheckName::KappaAsym,
        CheckName::Gradients,
        CheckName::Invariants,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::EigenAsym => "eigen_asym",
            CheckName::KappaAsym => "kappa_asym",
            CheckName::Gradients => "gradients",
            CheckName::Invariants => "invariants",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    pub lambda_cross: f64,
    pub kappa_cross: f64,
    /// eigen/kappa remainder slopes must be <= -slope (r >= 2)
    pub slope: f64,
    /// the same for r < 2
    pub slope_log: f64,
    pub gradient_lambda: f64,
    pub gradient_kappa: f64,
    pub wronskian: f64,
    pub norm_gap: f64,
    /// allowed |‖ψ‖²(3πn/2)^{-1/3} - 1| for n >= 10
    pub norm_ratio: f64,
    pub airy_identity: f64,
    /// residuals below this are noise and excluded from fits
    pub fit_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            lambda_cross: 1e-6,
            kappa_cross: 1e-4,
            slope: 0.8,
            slope_log: 0.75,
            gradient_lambda: 1e-4,
            gradient_kappa: 1e-3,
            wronskian: 1e-8,
            norm_gap: 1e-6,
            norm_ratio: 0.1,
            airy_identity: 1e-8,
            fit_floor: 1e-11,
        }
    }
}

impl Tolerances {
    fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::Config(format!(
                "tolerances.{key}: must be positive, got {value}"
            )));
        }
        let slot = match key {
            "lambda_cross" => &mut self.lambda_cross,
            "kappa_cross" => &mut self.kappa_cross,
            "slope" => &mut self.slope,
            "slope_log" => &mut self.slope_log,
            "gradient_lambda" => &mut self.gradient_lambda,
            "gradient_kappa" => &mut self.gradient_kappa,
            "wronskian" => &mut self.wronskian,
            "norm_gap" => &mut self.norm_gap,
            "norm_ratio" => &mut self.norm_ratio,
            "airy_identity" => &mut self.airy_identity,
            "fit_floor" => &mut self.fit_floor,
            other => return Err(Error::Config(format!("tolerances.{other}: unknown tolerance"))),
        };
        *slot = value;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub potential: PotentialDescriptor,
    pub n_min: usize,
    pub n_max: usize,
    pub methods: Vec<Method>,
    pub checks: Vec<CheckName>,
    pub tolerances: Tolerances,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            potential: PotentialDescriptor::zero(),
            n_min: 1,
            n_max: 30,
            methods: vec![Method::Shooting, Method::Oracle],
            checks: CheckName::ALL.to_vec(),
            tolerances: Tolerances::default(),
            output_dir: PathBuf::from("out"),
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn build_potential(&self) -> Result<Potential> {
        make_potential(&self.potential)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_min < 1 {
            return Err(Error::Config("n_min: must be at least 1".into()));
        }
        if self.n_max < self.n_min {
            return Err(Error::Config(format!(
                "n_max: {} is below n_min = {}",
                self.n_max, self.n_min
            )));
        }
        if self.n_max > MAX_INDEX {
            return Err(Error::Config(format!("n_max: {} exceeds {MAX_INDEX}", self.n_max)));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("methods: at least one of shooting, oracle".into()));
        }
        self.build_potential().map(|_| ())
    }

    fn has(&self, m: Method) -> bool {
        self.methods.contains(&m)
    }

    fn enabled(&self, c: CheckName) -> bool {
        self.checks.contains(&c)
    }
}

fn field<T: DeserializeOwned>(name: &str, v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Config(format!("{name}: {e}")))
}

/// Parse and validate a JSON configuration, filling defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Config(format!("malformed JSON: {e}")))?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Config("configuration must be a JSON object".into()))?;
    let mut cfg = ExperimentConfig::default();
    for (key, val) in obj {
        match key.as_str() {
            "potential" => cfg.potential = field(key, val)?,
            "n_min" => cfg.n_min = field(key, val)?,
            "n_max" => cfg.n_max = field(key, val)?,
            "methods" => {
                let mut m: Vec<Method> = field(key, val)?;
                m.sort_by_key(|x| *x as u8);
                m.dedup();
                cfg.methods = m;
            }
            "checks" => {
                let mut c: Vec<CheckName> = field(key, val)?;
                c.sort();
                c.dedup();
                cfg.checks = c;
            }
            "tolerances" => {
                let map: BTreeMap<String, f64> = field(key, val)?;
                for (k, x) in map {
                    cfg.tolerances.set(&k, x)?;
                }
            }
            "output_dir" => cfg.output_dir = field(key, val)?,
            "seed" => cfg.seed = field(key, val)?,
            other => return Err(Error::Config(format!("{other}: unknown field"))),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub metrics: BTreeMap<String, f64>,
}

impl CheckResult {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            passed,
            detail: detail.into(),
            metrics: BTreeMap::new(),
        }
    }

    fn metric(mut self, k: &str, v: f64) -> Self {
        self.metrics.insert(k.into(), v);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fits {
    pub lambda: Option<DecayFit>,
    pub kappa: Option<DecayFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    /// "pass", "fail" or "error"
    pub status: String,
    pub failing_check: Option<String>,
    pub error: Option<String>,
    pub potential: PotentialDescriptor,
    pub n_min: usize,
    pub n_max: usize,
    pub methods: Vec<Method>,
    pub fits: Fits,
    pub empirical_constants: BTreeMap<String, f64>,
    /// indices whose eigenvalue is negative (excluded from fits)
    pub negative_eigenvalues: Vec<usize>,
    pub checks: Vec<CheckResult>,
}

impl Summary {
    fn errored(cfg: &ExperimentConfig, stage: &str, e: &Error) -> Self {
        Summary {
            status: "error".into(),
            failing_check: Some(stage.into()),
            error: Some(e.to_string()),
            potential: cfg.potential.clone(),
            n_min: cfg.n_min,
            n_max: cfg.n_max,
            methods: cfg.methods.clone(),
            fits: Fits {
                lambda: None,
                kappa: None,
            },
            empirical_constants: BTreeMap::new(),
            negative_eigenvalues: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

/// Eigen-data of a campaign before checks.
#[derive(Debug, Clone)]
pub struct Campaign {
    pub q: Potential,
    pub shooting: Option<Vec<EigenRecord>>,
    pub oracle: Option<Vec<OracleEigen>>,
    pub report: AsymptoticsReport,
    pub fit_from: usize,
}

impl Campaign {
    pub fn lambdas(&self) -> Vec<f64> {
        match (&self.shooting, &self.oracle) {
            (Some(s), _) => s.iter().map(|r| r.lambda).collect(),
            (None, Some(o)) => o.iter().map(|r| r.lambda.value).collect(),
            _ => Vec::new(),
        }
    }

    pub fn kappas(&self) -> Vec<f64> {
        match (&self.shooting, &self.oracle) {
            (Some(s), _) => s.iter().map(|r| r.kappa).collect(),
            (None, Some(o)) => o.iter().map(|r| r.kappa.value).collect(),
            _ => Vec::new(),
        }
    }
}

type Staged<T> = std::result::Result<T, (&'static str, Error)>;

fn stage<T>(name: &'static str, r: Result<T>) -> Staged<T> {
    r.map_err(|e| (name, e))
}

/// Solve the spectrum with the configured methods and build predictions.
pub fn run_campaign(cfg: &ExperimentConfig) -> Result<Campaign> {
    campaign(cfg).map_err(|(_, e)| e)
}

fn campaign(cfg: &ExperimentConfig) -> Staged<Campaign> {
    let q = stage("config", cfg.build_potential())?;
    let shooting = if cfg.has(Method::Shooting) {
        Some(stage("shooting", eigenvalues(&q, cfg.n_min..=cfg.n_max))?)
    } else {
        None
    };
    let oracle = if cfg.has(Method::Oracle) {
        let all = stage("oracle", oracle_extrapolated(&q, cfg.n_max, &DEFAULT_MESHES))?;
        Some(all.into_iter().skip(cfg.n_min - 1).collect::<Vec<_>>())
    } else {
        None
    };
    let mut c = Campaign {
        q,
        shooting,
        oracle,
        report: AsymptoticsReport {
            n_range: (cfg.n_min, cfg.n_max),
            lambda_pred: vec![],
            kappa_pred: vec![],
            lambda_resid: vec![],
            kappa_resid: vec![],
            fitted_slope_lambda: None,
            fitted_slope_kappa: None,
            omega_r_values: vec![],
        },
        fit_from: 2,
    };
    let lambdas = c.lambdas();
    // negative eigenvalues are reported but kept out of the fits
    let first_positive = lambdas
        .iter()
        .position(|&l| l > 0.0)
        .map_or(cfg.n_max + 1, |i| cfg.n_min + i);
    c.fit_from = first_positive.max(2);
    c.report = stage(
        "predictions",
        build_report(
            &c.q,
            cfg.n_min,
            &lambdas,
            &c.kappas(),
            cfg.tolerances.fit_floor,
            c.fit_from,
        ),
    )?;
    Ok(c)
}

fn asym_check(
    name: &str,
    fit: Option<DecayFit>,
    resid: &[f64],
    ns: &[usize],
    fit_from: usize,
    floor: f64,
    threshold: f64,
) -> CheckResult {
    let usable: Vec<f64> = resid
        .iter()
        .zip(ns)
        .filter(|(_, &n)| n >= fit_from)
        .map(|(r, _)| *r)
        .collect();
    match fit {
        Some(f) => CheckResult::new(
            name,
            f.slope <= -threshold,
            format!(
                "slope {:.4} ± {:.4} over {} points, required <= {:.2}",
                f.slope, f.half_width, f.points, -threshold
            ),
        )
        .metric("slope", f.slope)
        .metric("half_width", f.half_width)
        .metric("threshold", -threshold),
        None if !usable.is_empty() && usable.iter().all(|r| r.abs() <= floor) => {
            CheckResult::new(name, true, format!("all residuals below the noise floor {floor:e}"))
                .metric("max_abs_resid", usable.iter().fold(0.0f64, |a, r| a.max(r.abs())))
        }
        None => CheckResult::new(name, false, "too few residuals above the noise floor for a fit"),
    }
}

fn cross_check(c: &Campaign, tol: &Tolerances) -> Option<CheckResult> {
    let (s, o) = (c.shooting.as_ref()?, c.oracle.as_ref()?);
    let dl = s
        .iter()
        .zip(o)
        .map(|(a, b)| (a.lambda - b.lambda.value).abs())
        .fold(0.0, f64::max);
    let dk = s
        .iter()
        .zip(o)
        .map(|(a, b)| (a.kappa - b.kappa.value).abs())
        .fold(0.0, f64::max);
    let passed = dl <= tol.lambda_cross && dk <= tol.kappa_cross;
    Some(
        CheckResult::new(
            "cross_method",
            passed,
            format!("max |dlambda| = {dl:.3e}, max |dkappa| = {dk:.3e}"),
        )
        .metric("max_lambda_diff", dl)
        .metric("max_kappa_diff", dk),
    )
}

/// Relative gap with the denominator floored at 1e-3.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-3)
}

/// Analytic against finite-difference directional derivatives at index n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientComparison {
    pub n: usize,
    pub d_lambda: f64,
    pub fd_lambda: f64,
    pub d_kappa: f64,
    pub fd_kappa: f64,
}

pub fn compare_gradient(q: &Potential, n: usize, v: &Potential) -> Result<GradientComparison> {
    let rec = locate_eigenvalue(q, n)?;
    let g = gradient(q, &rec, v)?;
    let up = locate_eigenvalue(&q.plus(v, GRADIENT_STEP), n)?;
    let dn = locate_eigenvalue(&q.plus(v, -GRADIENT_STEP), n)?;
    Ok(GradientComparison {
        n,
        d_lambda: g.d_lambda,
        fd_lambda: (up.lambda - dn.lambda) / (2.0 * GRADIENT_STEP),
        d_kappa: g.d_kappa,
        fd_kappa: (up.kappa - dn.kappa) / (2.0 * GRADIENT_STEP),
    })
}

fn gradient_check(cfg: &ExperimentConfig, q: &Potential) -> Result<CheckResult> {
    let r = q.r();
    let dirs = [Potential::exp(1.0, 1.0, r)?, Potential::bump(1.0, 2.0, 1.0, r)?];
    let mut ns = vec![cfg.n_min];
    if cfg.n_min + 2 <= cfg.n_max {
        ns.push(cfg.n_min + 2);
    }
    let (mut worst_l, mut worst_k) = (0.0f64, 0.0f64);
    for v in &dirs {
        for &n in &ns {
            let c = compare_gradient(q, n, v)?;
            worst_l = worst_l.max(relative_gap(c.d_lambda, c.fd_lambda));
            worst_k = worst_k.max(relative_gap(c.d_kappa, c.fd_kappa));
        }
    }
    let tol = &cfg.tolerances;
    let passed = worst_l <= tol.gradient_lambda && worst_k <= tol.gradient_kappa;
    Ok(CheckResult::new(
        "gradients",
        passed,
        format!(
            "{} pairs; worst relative gap lambda {worst_l:.3e}, kappa {worst_k:.3e}",
            dirs.len() * ns.len()
        ),
    )
    .metric("max_rel_lambda", worst_l)
    .metric("max_rel_kappa", worst_k))
}

/// Structural quantities at one eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvariantSample {
    pub n: usize,
    /// max |W(ψ₀,θ₀) - 1|
    pub basis_wronskian: f64,
    /// max relative deviation of W(ψ,θ) from 1 + ∫θ₀ψq
    pub psi_theta_wronskian: f64,
    /// 1 + ∫θ₀ψq - 1: how far W(ψ,θ) sits from 1
    pub psi_theta_offset: f64,
    /// max relative deviation of W(s,c) from -1 on x <= λ + 2, where
    /// neither s nor c is subdominant
    pub sc_wronskian: f64,
    pub norm_gap: f64,
    pub oscillations: usize,
    /// ‖ψ‖² (3πn/2)^{-1/3}
    pub norm_ratio: f64,
}

pub fn invariant_sample(q: &Potential, rec: &EigenRecord) -> Result<InvariantSample> {
    let grid = Grid::for_problem(q, rec.lambda, DEFAULT_TAIL_TOL)?;
    let sys = VolterraSystem::new(q, rec.lambda, &grid)?;
    let psi = sys.psi()?;
    let theta = sys.theta()?;
    let (s, c) = sys.sc()?;
    let k = sys.wronskian_constant(&psi);
    let mut w_pt = 0.0f64;
    let mut w_sc = 0.0f64;
    for i in 0..grid.len() {
        let w = psi.values[i] * theta.derivs[i] - psi.derivs[i] * theta.values[i];
        w_pt = w_pt.max((w - k).abs() / k.abs().max(1.0));
        if grid.nodes[i] <= rec.lambda + SC_REACH {
            let a = s.values[i] * c.derivs[i];
            let b = s.derivs[i] * c.values[i];
            w_sc = w_sc.max((a - b + 1.0).abs() / a.abs().max(b.abs()).max(1.0));
        }
    }
    let n = rec.n;
    Ok(InvariantSample {
        n,
        basis_wronskian: sys.basis_wronskian_deviation(),
        psi_theta_wronskian: w_pt,
        psi_theta_offset: k - 1.0,
        sc_wronskian: w_sc,
        norm_gap: rec.norm_gap,
        oscillations: oscillation_count(&psi),
        norm_ratio: rec.norm_sq * (1.5 * std::f64::consts::PI * n as f64).powf(-1.0 / 3.0),
    })
}

/// Relative gap in ∫_{a_n}^∞ Ai² = Ai'(a_n)².
pub fn airy_identity_gap(n: usize) -> Result<f64> {
    let a = airy_zero(n)?.a_n;
    let ai2 = |t: f64| {
        let w = t + a;
        if w > 150.0 {
            return 0.0;
        }
        let s = airy_eval_scaled(w).map(|s| s.ai * (-s.zeta).exp()).unwrap_or(0.0);
        s * s
    };
    let lhs = integrate_half_line(ai2, &[-a, -a + 6.0], 1e-13)?;
    let d = airy::ai_prime(a);
    Ok((lhs - d * d).abs() / (d * d))
}

fn invariants_check(cfg: &ExperimentConfig, q: &Potential, records: &[EigenRecord]) -> Result<CheckResult> {
    let tol = &cfg.tolerances;
    let mut worst = InvariantSample {
        n: 0,
        basis_wronskian: 0.0,
        psi_theta_wronskian: 0.0,
        psi_theta_offset: 0.0,
        sc_wronskian: 0.0,
        norm_gap: 0.0,
        oscillations: 0,
        norm_ratio: 1.0,
    };
    let mut bad_counts = Vec::new();
    let mut worst_ratio = 0.0f64;
    for rec in records {
        let s = invariant_sample(q, rec)?;
        worst.basis_wronskian = worst.basis_wronskian.max(s.basis_wronskian);
        worst.psi_theta_wronskian = worst.psi_theta_wronskian.max(s.psi_theta_wronskian);
        worst.psi_theta_offset = worst.psi_theta_offset.max(s.psi_theta_offset.abs());
        worst.sc_wronskian = worst.sc_wronskian.max(s.sc_wronskian);
        worst.norm_gap = worst.norm_gap.max(s.norm_gap);
        if s.oscillations != rec.n - 1 {
            bad_counts.push(rec.n);
        }
        if rec.n >= 10 {
            worst_ratio = worst_ratio.max((s.norm_ratio - 1.0).abs());
        }
    }
    let mut airy_gap = 0.0f64;
    for n in 1..=cfg.n_max.min(10) {
        airy_gap = airy_gap.max(airy_identity_gap(n)?);
    }
    let wronskians = worst
        .basis_wronskian
        .max(worst.psi_theta_wronskian)
        .max(worst.sc_wronskian);
    let passed = wronskians <= tol.wronskian
        && worst.norm_gap <= tol.norm_gap
        && bad_counts.is_empty()
        && worst_ratio <= tol.norm_ratio
        && airy_gap <= tol.airy_identity;
    let mut detail = format!(
        "wronskians {wronskians:.2e}, norm gap {:.2e}, norm ratio deviation {worst_ratio:.3}, airy identity {airy_gap:.2e}",
        worst.norm_gap
    );
    if !bad_counts.is_empty() {
        let _ = write!(detail, ", wrong oscillation counts at n = {bad_counts:?}");
    }
    Ok(CheckResult::new("invariants", passed, detail)
        .metric("basis_wronskian", worst.basis_wronskian)
        .metric("psi_theta_wronskian", worst.psi_theta_wronskian)
        .metric("psi_theta_offset", worst.psi_theta_offset)
        .metric("sc_wronskian", worst.sc_wronskian)
        .metric("norm_gap", worst.norm_gap)
        .metric("norm_ratio_deviation", worst_ratio)
        .metric("airy_identity", airy_gap)
        .metric("oscillation_mismatches", bad_counts.len() as f64))
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// results.csv content.
pub fn render_csv(cfg: &ExperimentConfig, c: &Campaign) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (i, n) in (cfg.n_min..=cfg.n_max).enumerate() {
        let s = c.shooting.as_ref().map(|v| &v[i]);
        let o = c.oracle.as_ref().map(|v| &v[i]);
        let r = &c.report;
        let cells = [
            n.to_string(),
            opt(s.map(|x| x.lambda)),
            opt(o.map(|x| x.lambda.value)),
            num(r.lambda_pred[i]),
            num(r.lambda_resid[i]),
            opt(s.map(|x| x.kappa)),
            opt(o.map(|x| x.kappa.value)),
            num(r.kappa_pred[i]),
            num(r.kappa_resid[i]),
            num(r.omega_r_values[i]),
        ];
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn empirical_constants(c: &Campaign) -> BTreeMap<String, f64> {
    let (lo, _) = c.report.n_range;
    let mut m = BTreeMap::new();
    let scaled = |resid: &[f64]| {
        resid
            .iter()
            .enumerate()
            .filter(|(i, _)| lo + i >= c.fit_from)
            .map(|(i, r)| r.abs() * (lo + i) as f64)
            .fold(0.0, f64::max)
    };
    m.insert("lambda_resid_times_n".into(), scaled(&c.report.lambda_resid));
    m.insert("kappa_resid_times_n".into(), scaled(&c.report.kappa_resid));
    m
}

/// Everything a verify run produces, before it is written.
#[derive(Debug, Clone)]
pub struct VerifyOutput {
    pub summary: Summary,
    pub csv: String,
    pub log: String,
}

fn evaluate(cfg: &ExperimentConfig) -> Staged<VerifyOutput> {
    let c = campaign(cfg)?;
    let tol = &cfg.tolerances;
    let ns: Vec<usize> = (cfg.n_min..=cfg.n_max).collect();
    let threshold = if c.q.r() >= 2.0 { tol.slope } else { tol.slope_log };
    let mut checks = Vec::new();
    if let Some(x) = cross_check(&c, tol) {
        checks.push(x);
    }
    if cfg.enabled(CheckName::EigenAsym) {
        checks.push(asym_check(
            "eigen_asym",
            c.report.fitted_slope_lambda,
            &c.report.lambda_resid,
            &ns,
            c.fit_from,
            tol.fit_floor,
            threshold,
        ));
    }
    if cfg.enabled(CheckName::KappaAsym) {
        checks.push(asym_check(
            "kappa_asym",
            c.report.fitted_slope_kappa,
            &c.report.kappa_resid,
            &ns,
            c.fit_from,
            tol.fit_floor,
            threshold,
        ));
    }
    if cfg.enabled(CheckName::Gradients) {
        checks.push(stage("gradients", gradient_check(cfg, &c.q))?);
    }
    if cfg.enabled(CheckName::Invariants) {
        let records = match &c.shooting {
            Some(s) => s.clone(),
            None => stage("invariants", eigenvalues(&c.q, cfg.n_min..=cfg.n_max))?,
        };
        checks.push(stage("invariants", invariants_check(cfg, &c.q, &records))?);
    }
    let failing = checks.iter().find(|x| !x.passed).map(|x| x.name.clone());
    let negative: Vec<usize> = c
        .lambdas()
        .iter()
        .zip(&ns)
        .filter(|(l, _)| **l < 0.0)
        .map(|(_, &n)| n)
        .collect();
    let summary = Summary {
        status: if failing.is_none() { "pass" } else { "fail" }.into(),
        failing_check: failing,
        error: None,
        potential: cfg.potential.clone(),
        n_min: cfg.n_min,
        n_max: cfg.n_max,
        methods: cfg.methods.clone(),
        fits: Fits {
            lambda: c.report.fitted_slope_lambda,
            kappa: c.report.fitted_slope_kappa,
        },
        empirical_constants: empirical_constants(&c),
        negative_eigenvalues: negative,
        checks,
    };
    let mut log = String::new();
    let _ = writeln!(
        log,
        "potential {}",
        serde_json::to_string(&cfg.potential).unwrap_or_default()
    );
    let _ = writeln!(log, "indices {}..={}", cfg.n_min, cfg.n_max);
    if let Some(s) = &c.shooting {
        let worst = s
            .iter()
            .map(|r| r.shoot_residual / r.psi_prime.abs())
            .fold(0.0, f64::max);
        let _ = writeln!(
            log,
            "shooting: {} eigenvalues, max relative shoot residual {worst:.3e}",
            s.len()
        );
    }
    if let Some(o) = &c.oracle {
        let warnings = o
            .iter()
            .filter(|e| e.lambda.warning.is_some() || e.kappa.warning.is_some())
            .count();
        let err = o.iter().map(|e| e.lambda.error).fold(0.0, f64::max);
        let _ = writeln!(
            log,
            "oracle: meshes {DEFAULT_MESHES:?}, max extrapolation error {err:.3e}, {warnings} order warnings"
        );
    }
    let _ = writeln!(log, "fits start at n = {}", c.fit_from);
    for x in &summary.checks {
        let _ = writeln!(
            log,
            "check {}: {} ({})",
            x.name,
            if x.passed { "PASS" } else { "FAIL" },
            x.detail
        );
    }
    let _ = writeln!(log, "status {}", summary.status);
    Ok(VerifyOutput {
        summary,
        csv: render_csv(cfg, &c),
        log,
    })
}

/// Write files via temporaries so a failure leaves nothing half-written.
pub fn write_outputs(dir: &Path, files: &[(&str, &str)]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut staged = Vec::new();
    for (name, content) in files {
        let tmp = dir.join(format!(".{name}.tmp"));
        if let Err(e) = fs::write(&tmp, content) {
            for t in &staged {
                let _ = fs::remove_file(t);
            }
            return Err(Error::Io(format!("{}: {e}", tmp.display())));
        }
        staged.push(tmp);
    }
    for ((name, _), tmp) in files.iter().zip(&staged) {
        fs::rename(tmp, dir.join(name)).map_err(|e| Error::Io(format!("{}: {e}", dir.join(name).display())))?;
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

/// Run a full verification campaign and write its reports.
///
/// On a numerical failure only `summary.json` is written, naming the stage.
pub fn run_verify(cfg: &ExperimentConfig) -> Result<Summary> {
    cfg.validate()?;
    match evaluate(cfg) {
        Ok(out) => {
            let json = to_json(&out.summary);
            write_outputs(
                &cfg.output_dir,
                &[
                    ("results.csv", &out.csv),
                    ("log.txt", &out.log),
                    ("summary.json", &json),
                ],
            )?;
            Ok(out.summary)
        }
        Err((stage_name, e)) => {
            let json = to_json(&Summary::errored(cfg, stage_name, &e));
            write_outputs(&cfg.output_dir, &[("summary.json", &json)])?;
            Err(e)
        }
    }
}

/// Self-test of the Airy layer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub passed: bool,
    pub envelope_margin: f64,
    pub checks: Vec<CheckResult>,
}

/// (w, Ai, Ai', Bi, Bi') from a 25-digit reference evaluation.
const AIRY_REFERENCE: [(f64, f64, f64, f64, f64); 6] = [
    (
        0.0,
        0.355028053887817239,
        -0.258819403792806798,
        0.614926627446000735,
        0.448288357353826358,
    ),
    (
        1.0,
        0.135292416312881416,
        -0.159147441296793213,
        1.20742359495287126,
        0.932435933392775633,
    ),
    (
        -5.0,
        0.35076100902411432,
        0.327192818554443137,
        -0.138369134901600577,
        0.778411773001899246,
    ),
    (
        3.7,
        0.00174557200060997852,
        -0.00346694074902762707,
        47.5607474995894585,
        87.8907272628334421,
    ),
    (
        -12.5,
        -0.276274561381160248,
        -0.419331330419505164,
        0.117033367257392777,
        -0.974516536167174072,
    ),
    (
        8.0,
        4.69220761609923163e-8,
        -1.34143929790678657e-7,
        1199586.00412445993,
        3354342.31274453888,
    ),
];

const AIRY_ZEROS: [f64; 10] = [
    -2.33810741045976704,
    -4.08794944413097062,
    -5.52055982809555106,
    -6.786708090071759,
    -7.94413358712085312,
    -9.02265085334098038,
    -10.0401743415580859,
    -11.0085243037332629,
    -11.9360155632362625,
    -12.8287767528657572,
];

pub fn airy_selftest() -> Result<SelftestReport> {
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    for &(w, ai, aip, bi, bip) in &AIRY_REFERENCE {
        let v = airy::airy_eval(w)?;
        for (got, want) in [(v.ai, ai), (v.ai_prime, aip), (v.bi, bi), (v.bi_prime, bip)] {
            worst = worst.max((got - want).abs() / want.abs());
        }
    }
    checks.push(
        CheckResult::new(
            "reference_values",
            worst <= 1e-10,
            format!("max relative error {worst:.2e}"),
        )
        .metric("max_rel", worst),
    );

    let mut w_dev = 0.0f64;
    for i in 0..=3000 {
        let w = -20.0 + 0.01 * i as f64;
        let v = airy::airy_eval(w)?;
        w_dev = w_dev.max((v.wronskian() * std::f64::consts::PI - 1.0).abs());
    }
    checks.push(
        CheckResult::new(
            "wronskian",
            w_dev <= 1e-10,
            format!("max relative deviation on [-20, 10]: {w_dev:.2e}"),
        )
        .metric("max_rel", w_dev),
    );

    let mut z_dev = 0.0f64;
    for (i, &want) in AIRY_ZEROS.iter().enumerate() {
        z_dev = z_dev.max((airy_zero(i + 1)?.a_n - want).abs());
    }
    checks.push(
        CheckResult::new(
            "zeros",
            z_dev <= 1e-10,
            format!("max error over n = 1..10: {z_dev:.2e}"),
        )
        .metric("max_abs", z_dev),
    );

    let mut id = 0.0f64;
    for n in 1..=10 {
        id = id.max(airy_identity_gap(n)?);
    }
    checks.push(
        CheckResult::new("zero_identity", id <= 1e-8, format!("max relative gap {id:.2e}")).metric("max_rel", id),
    );

    let mut monotone = true;
    let mut prev = f64::INFINITY;
    for i in 0..=4000 {
        let g = envelope(-20.0 + 0.01 * i as f64)?.g_a;
        monotone &= g <= prev;
        prev = g;
    }
    checks.push(CheckResult::new(
        "envelope_monotone",
        monotone,
        "g_A non-increasing on [-20, 20]",
    ));

    let ns: Vec<usize> = (5..=50).collect();
    let errs: Vec<f64> = ns
        .iter()
        .map(|&n| airy_zero(n).map(|z| (z.a_n - airy_zero_seed(n)).abs()))
        .collect::<Result<_>>()?;
    let fit = crate::asymptotics::decay_rate_fit(&errs, &ns, 0.0)?;
    let ok = (fit.slope + 4.0 / 3.0).abs() <= 0.05;
    checks.push(
        CheckResult::new(
            "seed_accuracy",
            ok,
            format!("|a_n - seed| ~ n^{:.4} for n = 5..50, expected n^-1.3333", fit.slope),
        )
        .metric("slope", fit.slope),
    );

    let coarse: Vec<f64> = (0..=6000).map(|i| -30.0 + 0.01 * i as f64).collect();
    let fine: Vec<f64> = (0..=60000).map(|i| -30.0 + 0.001 * i as f64).collect();
    let (c0, c1) = (envelope_margin(&coarse)?, envelope_margin(&fine)?);
    let stable = (c0 - c1).abs() <= 0.01 * c1;
    checks.push(
        CheckResult::new(
            "envelope_margin",
            stable && c1.is_finite(),
            format!("C0 = {c0:.6} (step 0.01), {c1:.6} (step 0.001)"),
        )
        .metric("c0", c1),
    );

    Ok(SelftestReport {
        passed: checks.iter().all(|c| c.passed),
        envelope_margin: c1,
        checks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Eig,
    Norming,
    Asympt,
    Verify,
    AirySelftest,
}

/// Command-line overrides applied on top of the configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n_max: Option<usize>,
    pub method: Option<String>,
    pub out: Option<PathBuf>,
}

pub fn load_config(path: Option<&Path>, ov: &Overrides) -> Result<ExperimentConfig> {
    let mut cfg = match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            parse_config(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(n) = ov.n_max {
        cfg.n_max = n;
    }
    if let Some(m) = &ov.method {
        cfg.methods = match m.as_str() {
            "shooting" => vec![Method::Shooting],
            "oracle" => vec![Method::Oracle],
            "both" => vec![Method::Shooting, Method::Oracle],
            other => {
                return Err(Error::Config(format!(
                    "--method: '{other}' is not shooting, oracle or both"
                )))
            }
        };
    }
    if let Some(o) = &ov.out {
        cfg.output_dir = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Process exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidPotential(_) | Error::Io(_) => 2,
        _ => 3,
    }
}

fn eig_table(cfg: &ExperimentConfig, c: &Campaign) -> String {
    let mut out =
        String::from("n,lambda_shoot,lambda_oracle,lambda_oracle_error,bracket_lo,bracket_hi,shoot_residual\n");
    for (i, n) in (cfg.n_min..=cfg.n_max).enumerate() {
        let s = c.shooting.as_ref().map(|v| &v[i]);
        let o = c.oracle.as_ref().map(|v| &v[i]);
        let cells = [
            n.to_string(),
            opt(s.map(|x| x.lambda)),
            opt(o.map(|x| x.lambda.value)),
            opt(o.map(|x| x.lambda.error)),
            opt(s.map(|x| x.bracket.0)),
            opt(s.map(|x| x.bracket.1)),
            opt(s.map(|x| x.shoot_residual)),
        ];
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn norming_table(cfg: &ExperimentConfig, c: &Campaign) -> String {
    let mut out = String::from("n,kappa_shoot,kappa_alt,kappa_oracle,kappa_oracle_error,norm_sq,norm_gap\n");
    for (i, n) in (cfg.n_min..=cfg.n_max).enumerate() {
        let s = c.shooting.as_ref().map(|v| &v[i]);
        let o = c.oracle.as_ref().map(|v| &v[i]);
        let cells = [
            n.to_string(),
            opt(s.map(|x| x.kappa)),
            opt(s.map(|x| x.kappa_alt)),
            opt(o.map(|x| x.kappa.value)),
            opt(o.map(|x| x.kappa.error)),
            opt(s.map(|x| x.norm_sq)),
            opt(s.map(|x| x.norm_gap)),
        ];
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Run one subcommand; returns the process exit status.
pub fn run_command(cmd: Command, config: Option<&Path>, ov: &Overrides) -> i32 {
    match dispatch(cmd, config, ov) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command, config: Option<&Path>, ov: &Overrides) -> Result<i32> {
    let cfg = load_config(config, ov)?;
    let dir = cfg.output_dir.clone();
    match cmd {
        Command::AirySelftest => {
            let r = airy_selftest()?;
            write_outputs(&dir, &[("airy_selftest.json", &to_json(&r))])?;
            for c in &r.checks {
                println!(
                    "{:<18} {}  {}",
                    c.name,
                    if c.passed { "PASS" } else { "FAIL" },
                    c.detail
                );
            }
            Ok(if r.passed { 0 } else { 4 })
        }
        Command::Eig => {
            let c = run_campaign(&cfg)?;
            let table = eig_table(&cfg, &c);
            write_outputs(&dir, &[("eigenvalues.csv", &table)])?;
            print!("{table}");
            Ok(0)
        }
        Command::Norming => {
            let c = run_campaign(&cfg)?;
            let table = norming_table(&cfg, &c);
            write_outputs(&dir, &[("norming.csv", &table)])?;
            print!("{table}");
            Ok(0)
        }
        Command::Asympt => {
            let c = run_campaign(&cfg)?;
            write_outputs(&dir, &[("asymptotics.json", &to_json(&c.report))])?;
            let show =
                |f: Option<DecayFit>| f.map_or("n/a".to_string(), |f| format!("{:.4} ± {:.4}", f.slope, f.half_width));
            println!("lambda remainder slope {}", show(c.report.fitted_slope_lambda));
            println!("kappa remainder slope  {}", show(c.report.fitted_slope_kappa));
            Ok(0)
        }
        Command::Verify => {
            let s = run_verify(&cfg)?;
            for c in &s.checks {
                println!(
                    "{:<13} {}  {}",
                    c.name,
                    if c.passed { "PASS" } else { "FAIL" },
                    c.detail
                );
            }
            println!("status {}", s.status);
            Ok(if s.passed() { 0 } else { 4 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_defaults() {
        let c = parse_config("{}").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert_eq!((c.n_min, c.n_max), (1, 30));
        assert_eq!(c.methods.len(), 2);
        assert_eq!(c.checks.len(), 4);
    }

    #[test]
    fn config_errors_name_the_field() {
        let ok = parse_config(r#"{"potential":{"family":"exp","params":{"c":0.3,"a":1},"r":2}}"#).unwrap();
        assert_eq!(ok.potential.family, "exp");
        let bad = parse_config(r#"{"potential":{"family":"alg","params":{"c":1,"p":1},"r":2}}"#).unwrap_err();
        assert!(matches!(bad, Error::InvalidPotential(_)));
        for (text, needle) in [
            (r#"{"n_max": "ten"}"#, "n_max"),
            (r#"{"bogus": 1}"#, "bogus"),
            (r#"{"tolerances": {"wronskian": -1}}"#, "tolerances.wronskian"),
            (r#"{"tolerances": {"nope": 1}}"#, "tolerances.nope"),
            (r#"{"checks": ["eigen_asym", "x"]}"#, "checks"),
            (r#"{"n_min": 5, "n_max": 3}"#, "n_max"),
            (r#"{"methods": []}"#, "methods"),
            ("[1]", "object"),
        ] {
            let e = parse_config(text).unwrap_err();
            assert!(e.to_string().contains(needle), "{text}: {e}");
            assert_eq!(exit_code(&e), 2);
        }
    }

    #[test]
    fn overrides_apply() {
        let ov = Overrides {
            n_max: Some(7),
            method: Some("oracle".into()),
            out: Some("elsewhere".into()),
        };
        let c = load_config(None, &ov).unwrap();
        assert_eq!(
            (c.n_max, c.methods.clone(), c.output_dir.clone()),
            (7, vec![Method::Oracle], PathBuf::from("elsewhere"))
        );
        let bad = Overrides {
            method: Some("magic".into()),
            ..Default::default()
        };
        assert!(load_config(None, &bad).is_err());
    }

    #[test]
    fn csv_number_format() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-2.5), "-2.5000000000000000e0");
    }

    #[test]
    fn selftest_passes() {
        let r = airy_selftest().unwrap();
        assert!(r.passed, "{:?}", r.checks);
    }
}
