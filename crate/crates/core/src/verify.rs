//! Registry of closed-form checks. Each formula id runs its evaluator over a
//! fixed grid against brute-force traces, spectra or series and returns a
//! [`ClosedFormReport`] with the worst point as witness.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{CONJECTURE_TOL, GAUSS_HERMITE_NODES};
use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::models::{build_local, LocalOperator, ModelSpec, TensorFactors};
use crate::operator::{GlobalOperator, TraceSequence};
use crate::scalar::{c, C};
use crate::special::chebyshev_t;
use crate::zeta::{
    binomial_zeta_qca1, binomial_zeta_qca1_coefficient, clt_limit_zeta_converged, conjecture_test_rule90,
    qca2_c1_closed_form, qca2_x1_recurrence, qca2_x2_recurrence, rule90_trace_general_r, tensor_model_cr,
    zeta_closed_form_qca2, zeta_log_series, ClosedFormReport, ErrorTracker, Qca2Variant, RootCase,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormulaId {
    /// `C_r` of a tensor model from the 2×2 eigenvalues of its factors.
    TensorTrace,
    /// `C_r = 1` for the identity local operator.
    TrivialModel,
    /// `C_r = T_r(cos ξ)^{N-1}` for `QCA1(ξ, ξ)`.
    Chebyshev,
    /// Binomial sum of logarithms for `QCA1(ξ, ξ)`.
    BinomialZeta,
    /// Gaussian limit of the binomial zeta under `ξ -> ξ/√N`.
    GaussianLimit,
    /// `tr Q` of `QCA2(0, ξ)`: recurrence and both root cases.
    Qca2FirstTrace,
    /// `tr Q^2` of `QCA2(0, ξ)` by the third-order recurrence.
    Qca2SecondTrace,
    /// Period 2 at `ξ = π/2`, period `2^m` for Rule 90.
    Period,
    /// Arctanh form of the zeta function at `ξ = π/2`.
    PiHalfZeta,
    /// Traces of all powers of Rule 90 for `N <= 4`.
    Rule90Traces,
    /// Zeta function of Rule 90 for `N <= 4`.
    Rule90Zeta,
    /// The same formula for `N >= 5`, which is only conjectured.
    Rule90Conjecture,
}

impl FormulaId {
    pub const ALL: [FormulaId; 12] = [
        FormulaId::TensorTrace,
        FormulaId::TrivialModel,
        FormulaId::Chebyshev,
        FormulaId::BinomialZeta,
        FormulaId::GaussianLimit,
        FormulaId::Qca2FirstTrace,
        FormulaId::Qca2SecondTrace,
        FormulaId::Period,
        FormulaId::PiHalfZeta,
        FormulaId::Rule90Traces,
        FormulaId::Rule90Zeta,
        FormulaId::Rule90Conjecture,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FormulaId::TensorTrace => "tensor-trace",
            FormulaId::TrivialModel => "trivial-model",
            FormulaId::Chebyshev => "chebyshev",
            FormulaId::BinomialZeta => "binomial-zeta",
            FormulaId::GaussianLimit => "gaussian-limit",
            FormulaId::Qca2FirstTrace => "qca2-first-trace",
            FormulaId::Qca2SecondTrace => "qca2-second-trace",
            FormulaId::Period => "period",
            FormulaId::PiHalfZeta => "pi-half-zeta",
            FormulaId::Rule90Traces => "rule90-traces",
            FormulaId::Rule90Zeta => "rule90-zeta",
            FormulaId::Rule90Conjecture => "rule90-conjecture",
        }
    }

    fn default_tolerance(self) -> f64 {
        match self {
            FormulaId::TrivialModel => 1e-12,
            FormulaId::TensorTrace | FormulaId::Chebyshev | FormulaId::BinomialZeta | FormulaId::Rule90Traces => 1e-9,
            FormulaId::GaussianLimit => 1e-2,
            FormulaId::Period => 1e-10,
            FormulaId::Qca2FirstTrace
            | FormulaId::Qca2SecondTrace
            | FormulaId::PiHalfZeta
            | FormulaId::Rule90Zeta => 1e-8,
            FormulaId::Rule90Conjecture => CONJECTURE_TOL,
        }
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FormulaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        FormulaId::ALL.into_iter().find(|id| id.as_str() == key).ok_or_else(|| {
            let known: Vec<_> = FormulaId::ALL.iter().map(|id| id.as_str()).collect();
            Error::Parse(format!("unknown formula id '{s}', expected one of {}", known.join(", ")))
        })
    }
}

/// Overrides for the default grids. `None` keeps the formula's own choice.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub r_max: Option<usize>,
    pub u_samples: Option<Vec<C<f64>>>,
    pub tolerance: Option<f64>,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { n_min: None, n_max: None, r_max: None, u_samples: None, tolerance: None, seed: 0x5eed_2024 }
    }
}

impl VerifyOptions {
    fn sites(&self, lo: usize, hi: usize) -> Result<Vec<usize>> {
        let (a, b) = (self.n_min.unwrap_or(lo), self.n_max.unwrap_or(hi));
        if a == 0 || a > b {
            return Err(Error::DomainError(format!("empty or invalid site range {a}..={b}")));
        }
        Ok((a..=b).collect())
    }

    fn r(&self, default: usize) -> usize {
        self.r_max.unwrap_or(default)
    }

    fn u(&self) -> Vec<C<f64>> {
        self.u_samples.clone().unwrap_or_else(default_u_samples)
    }
}

/// `0.1, 0.3, 0.5, 0.4i`.
pub fn default_u_samples() -> Vec<C<f64>> {
    vec![c(0.1, 0.0), c(0.3, 0.0), c(0.5, 0.0), c(0.0, 0.4)]
}

/// Angles used by the `QCA1` grids.
pub fn qca1_angle_grid() -> Vec<f64> {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6};
    vec![0.0, FRAC_PI_6, FRAC_PI_4, 1.0, 2.0, FRAC_PI_2]
}

/// Angles used by the `QCA2(0, ξ)` grids, including both double-root points.
pub fn qca2_angle_grid() -> Vec<f64> {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI};
    let double = (3.0 - 2.0 * 2f64.sqrt()).asin();
    vec![0.0, FRAC_PI_6, FRAC_PI_4, FRAC_PI_2, 1.0, 2.0, 4.0, 5.5, double, PI - double]
}

fn u_json(u: &[C<f64>]) -> Value {
    json!(u.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
}

fn op(spec: ModelSpec<f64>, n: usize) -> Result<GlobalOperator<f64>> {
    GlobalOperator::new(build_local(&spec)?, n)
}

fn qca2(xi: f64, n: usize) -> Result<GlobalOperator<f64>> {
    op(ModelSpec::Qca2 { xi1: 0.0, xi2: xi }, n)
}

fn traces(g: &GlobalOperator<f64>, r_max: usize) -> Result<TraceSequence<f64>> {
    g.trace_powers(r_max)
}

/// Runs one formula check.
pub fn run_formula(id: FormulaId, opts: &VerifyOptions) -> Result<ClosedFormReport> {
    let tol = opts.tolerance.unwrap_or(id.default_tolerance());
    let mut report = match id {
        FormulaId::TensorTrace => tensor_trace(opts, tol),
        FormulaId::TrivialModel => trivial_model(opts, tol),
        FormulaId::Chebyshev => chebyshev(opts, tol),
        FormulaId::BinomialZeta => binomial_zeta(opts, tol),
        FormulaId::GaussianLimit => gaussian_limit(opts, tol),
        FormulaId::Qca2FirstTrace => first_trace(opts, tol),
        FormulaId::Qca2SecondTrace => second_trace(opts, tol),
        FormulaId::Period => period(opts, tol),
        FormulaId::PiHalfZeta => pi_half_zeta(opts, tol),
        FormulaId::Rule90Traces => rule90_traces(opts, tol),
        FormulaId::Rule90Zeta => rule90_zeta(opts, tol),
        FormulaId::Rule90Conjecture => rule90_conjecture(opts, tol),
    }?;
    report.formula_id = id.as_str().into();
    Ok(report)
}

/// Runs every formula in registry order.
pub fn run_all(opts: &VerifyOptions) -> Result<Vec<ClosedFormReport>> {
    FormulaId::ALL.iter().map(|&id| run_formula(id, opts)).collect()
}

/// Random `left ⊗ diag(e, h)` factors with entries uniform in the square `[-1, 1]²`.
pub fn random_tensor_factors(rng: &mut impl Rng) -> TensorFactors<f64> {
    let mut z = || c(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
    let left = CMatrix::from_row_major(2, 2, vec![z(), z(), z(), z()]).expect("2x2");
    let right = CMatrix::from_row_major(2, 2, vec![z(), c(0.0, 0.0), c(0.0, 0.0), z()]).expect("2x2");
    TensorFactors::new(left, right).expect("random factors are nonzero")
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_error(a: C<f64>, b: C<f64>) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

fn tensor_trace(opts: &VerifyOptions, tol: f64) -> Result<ClosedFormReport> {
    const PAIRS: usize = 20;
    let sites = opts.sites(2, 8)?;
    let r_max = opts.r(12);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut t = ErrorTracker::default();
    for pair in 0..PAIRS {
        let f = random_tensor_factors(&mut rng);
        let local = LocalOperator::new(f.compose())?;
        for &n in &sites {
            let brute = traces(&GlobalOperator::new(local.clone(), n)?, r_max)?;
            for r in 1..=r_max {
                let closed = tensor_model_cr(&f, n, r as u32)?;
                t.record(relative_error(closed, brute.c(r)), json!({"pair": pair, "n": n, "r": r}));
            }
        }
    }
    let grid = json!({"pairs": PAIRS, "seed": opts.seed, "n": sites, "r_max": r_max, "error": "relative"});
    Ok(t.finish("", "theorem", grid, tol))
}

fn trivial_model(opts: &VerifyOptions, tol: f64) -> Result<ClosedFormReport> {
    let sites = opts.sites(1, 10)?;
    let r_max = opts.r(20);
    let mut t = ErrorTracker::default();
    for &n in &sites {
        let tr = traces(&GlobalOperator::new(LocalOperator::identity(), n)?, r_max)?;
        for r in 1..=r_max {
            t.record((tr.c(r) - c(1.0, 0.0)).norm(), json!({"n": n, "r": r}));
        }
    }
    Ok(t.finish("", "corollary", json!({"n": sites, "r_max": r_max}), tol))
}

fn chebyshev(opts: &VerifyOptions, tol: f64) -> Result<ClosedFormReport> {
    let sites = opts.sites(1, 8)?;
    let r_max = opts.r(16);
    let xis = qca1_angle_grid();
    let mut t = ErrorTracker::default();
    for &xi in &xis {
        for &n in &sites {
            let tr = traces(&op(ModelSpec::Qca1 { xi1: xi, xi2: xi }, n)?, r_max)?;
            for r in 1..=r_max {
                let expected = chebyshev_t(r as u32, xi.cos()).powi(n as i32 - 1);
                t.record((tr.c(r) - c(expected, 0.0)).norm(), json!({"xi": xi, "n": n, "r": r}));
            }
        }
    }
    Ok(t.finish("", "corollary", json!({"xi": xis, "n": sites, "r_max": r_max}), tol))
}

fn binomial_zeta(opts: &VerifyOptions, tol: f64) -> Result<ClosedFormReport> {
    let sites = opts.sites(1, 8)?;
    let r_max = opts.r(16);
    let xis = qca1_angle_grid();
    let us = opts.u();
    let mut t = ErrorTracker::default();
    for &xi in &xis {
        for &n in &sites {
            let g = op(ModelSpec::Qca1 { xi1: xi, xi2: xi }, n)?;
            let series = zeta_log_series(&g, r_max)?;
            for r in 1..=r_max {
                let closed = binomial_zeta_qca1_coefficient(n, xi, r as u32);
                t.record((closed - series.coefficient(r)).norm(), json!({"xi": xi, "n": n, "r": r}));
            }
            for &u in &us {
                let closed = binomial_zeta_qca1(n, xi, u)?;
                let spectral = g.log_det_factor(u)?;
                t.record((closed - spectral).norm(), json!({"xi": xi, "n": n, "u": [u.re, u.im], "against": "spectrum"}));
            }
        }
    }
    let grid = json!({"xi": xis, "n": sites, "r_max": r_max, "u": u_json(&us)});
    Ok(t.finish("", "theorem", grid, tol))
}

/// Gaps `|E[Log(1 - e^{iξZ}u)] - binomial(N, ξ/√N, u)|` at the given `N`.
pub fn gaussian_limit_gaps(xi: f64, u: C<f64>, sites: &[usize]) -> Result<(Vec<f64>, usize)> {
    let (limit, nodes) = clt_limit_zeta_converged(xi, u, GAUSS_HERMITE_NODES)?;
    let gaps = sites
        .iter()
        .map(|&n| Ok((limit - binomial_zeta_qca1(n, xi / (n as f64).sqrt(), u)?).norm()))
        .collect::<Result<Vec<_>>>()?;
    Ok((gaps, nodes))
}

/// Whether every gap is at most 10% above the previous one.
pub fn roughly_decreasing(gaps: &[f64]) -> bool {
    gaps.windows(2).all(|w| w[1] <= 1.1 * w[0])
}

fn gaussian_limit(opts: &VerifyOptions, tol: f64) -> Result<ClosedFormReport> {
    let xi = 0.8;
    let u = opts.u_samples.as_ref().and_then(|v| v.first().copied()).unwrap_or(c(0.3, 0.0));
    let sites: Vec<usize> = match (opts.n_min, opts.n_max) {
        (None, None) => vec![16, 64, 256, 1024],
        _ => {
            let (lo, hi) = (opts.n_min.unwrap_or(16), opts.n_max.unwrap_or(1024));
            let mut v = vec![lo.max(1)];
            while v[v.len() - 1] * 4 <= hi {
                v.push(v[v.len() - 1] * 4);
            }
            v
        }
    };
    let (gaps, nodes) = gaussian_limit_gaps(xi, u, &sites)?;
    let last = *gaps.last().expect("nonempty");
    let monotone = roughly_decreasing(&gaps);
    let mut t = ErrorTracker::default();
    t.record(last, json!({"n": sites[sites.len() - 1], "gaps": gaps}));
    let grid = json!({"xi": xi, "u": [u.re, u.im], "n": sites, "quadrature_nodes": nodes});
    let mut report = t.finish("", "corollary", grid, tol);
    if !monotone {
        report.passed = false;
        report.notes.push("gaps are not decreasing within 10% slack".into());
    }
    report.notes.push("error is the gap at the largest N; the limit statement gives no rate".into());
    Ok(report)
}

fn first_trace(opts: &VerifyOptions, tol: f64) -> Result<ClosedFormReport> {
    const SPECIAL_TOL: f64 = 1e-10;
    let sites = opts.sites(1, 10)?;
    let xis = qca2_angle_grid();
    let mut t = ErrorTracker::default();
    let mut special = ErrorTracker::default();
    let mut double_hits = 0;
    for &xi in &xis {
        for &n in &sites {
            let brute = traces(&qca2(xi, n)?, 1)?.trace(1);
            let closed = qca2_c1_closed_form(n, xi)?;
            if closed.case == RootCase::Double {
                double_hits += 1;
            }
            let rec = qca2_x1_recurrence(n, xi)?;
            let point = |what: &str| json!({"xi": xi, "n": n, "against": what});
            t.record((closed.trace - brute).norm(), point("closed form"));
            t.record((c(rec, 0.0) - brute).norm(), point("recurrence"));
            t.record((closed.c1 * 2f64.powi(n as i32) - closed.trace).norm(), point("c1 scaling"));
        }
    }
    for &n in &sites {
        let at0 = traces(&qca2(0.0, n)?, 1)?.trace(1);
        special.record((at0 - c(2.0, 0.0)).norm(), json!({"xi": 0.0, "n": n}));
        let expected = crate::scalar::cpowi(c(1.0, 1.0), n as u32 - 1) + crate::scalar::cpowi(c(1.0, -1.0), n as u32 - 1);
        let at = traces(&qca2(std::f64::consts::FRAC_PI_2, n)?, 1)?.trace(1);
        special.record((at - expected).norm(), json!({"xi": "pi/2", "n": n}));
    }
    let special_max = special.max();
    let grid = json!({"xi": xis, "n": sites, "double_root_evaluations": double_hits});
    let mut report = t.finish("", "proposition", grid, tol);
    if !(special_max <= SPECIAL_TOL) {
        report.passed = false;
    }
    report.notes.push(format!("special values at xi = 0 and pi/2: max error {special_max:e} (tolerance {SPECIAL_TOL:e})"));
    Ok(report)
}

fn second_trace(opts: &VerifyOptions, tol: f64) -> Result<ClosedFormReport> {
    let sites = opts.sites(1, 10)?;
    let xis = qca2_angle_grid();
    let mut t = ErrorTracker::default();
    for &xi in &xis {
        for &n in &sites {
            let brute = traces(&qca2(xi, n)?, 2)?.trace(2);
            let rec = qca2_x2_recurrence(n, xi)?;
            t.record((c(rec, 0.0) - brute).norm(), json!({"xi": xi, "n": n}));
            if xi == 0.0 && n >= 2 {
                t.record((brute - c(4.0, 0.0)).norm(), json!({"xi": 0.0, "n": n, "against": 4}));
            }
            if xi == std::f64::consts::FRAC_PI_2 {
                t.record((brute - c(2f64.powi(n as i32), 0.0)).norm(), json!({"xi": "pi/2", "n": n, "against": "2^N"}));
            }
        }
    }
    Ok(t.finish("", "proposition", json!({"xi": xis, "n": sites}), tol))
}

fn period(opts: &VerifyOptions, tol: f64) -> Result<ClosedFormReport> {
    let sites = opts.sites(1, 10)?;
    let mut t = ErrorTracker::default();
    for &n in &sites {
        let dev = qca2(std::f64::consts::FRAC_PI_2, n)?.power_identity_deviation(2);
        t.record(dev, json!({"model": "qca2(0, pi/2)", "n": n, "r": 2}));
    }
    let mut not_shorter = Vec::new();
    for n in 2..=4usize {
        let m = crate::zeta::rule90_block_exponent(n);
        let g = GlobalOperator::new(LocalOperator::rule90(), n)?;
        t.record(g.power_identity_deviation(1 << m), json!({"model": "rule90", "n": n, "r": 1 << m}));
        let half = g.power_identity_deviation(1 << (m - 1));
        if half <= tol {
            not_shorter.push(json!({"n": n, "r": 1 << (m - 1), "deviation": half}));
        }
    }
    let grid = json!({"pi_half_n": sites, "rule90_n": [2, 3, 4]});
    let mut report = t.finish("", "proposition", grid, tol);
    if !not_shorter.is_empty() {
        report.passed = false;
        report.notes.push(format!("Rule 90 period shorter than claimed at {}", Value::from(not_shorter)));
    } else {
        report.notes.push("Rule 90: Q^(2^(m-1)) differs from the identity for N = 2, 3, 4".into());
    }
    Ok(report)
}

fn zeta_against_series(
    variant: Qca2Variant,
    sites: &[usize],
    us: &[C<f64>],
    r_max: usize,
    t: &mut ErrorTracker,
) -> Result<()> {
    for &n in sites {
        let g = match variant {
            Qca2Variant::PiHalf => qca2(std::f64::consts::FRAC_PI_2, n)?,
            Qca2Variant::Rule90 => GlobalOperator::new(LocalOperator::rule90(), n)?,
        };
        let series = zeta_log_series(&g, r_max)?;
        for &u in us {
            let closed = zeta_closed_form_qca2(n, variant, u)?;
            t.record((closed - series.evaluate(u)).norm(), json!({"n": n, "u": [u.re, u.im]}));
        }
    }
    Ok(())
}

fn pi_half_zeta(opts: &VerifyOptions, tol: f64) -> Result<ClosedFormReport> {
    let sites = opts.sites(1, 8)?;
    let r_max = opts.r(60);
    let us = opts.u();
    let mut t = ErrorTracker::default();
    zeta_against_series(Qca2Variant::PiHalf, &sites, &us, r_max, &mut t)?;
    Ok(t.finish("", "theorem", json!({"n": sites, "r_max": r_max, "u": u_json(&us)}), tol))
}

fn rule90_traces(opts: &VerifyOptions, tol: f64) -> Result<ClosedFormReport> {
    let sites = opts.sites(2, 4)?;
    let mut t = ErrorTracker::default();
    let r_of = |k: u32, s: u32| (1usize << k) * (2 * s as usize - 1);
    for &n in &sites {
        let tr = traces(&GlobalOperator::new(LocalOperator::rule90(), n)?, r_of(3, 4))?;
        for k in 0..=3u32 {
            for s in 1..=4u32 {
                let r = r_of(k, s);
                let expected = rule90_trace_general_r(n, k, s)?;
                t.record((tr.trace(r) - c(expected, 0.0)).norm(), json!({"n": n, "k": k, "s": s, "r": r}));
            }
        }
    }
    Ok(t.finish("", "proposition", json!({"n": sites, "k": [0, 3], "s": [1, 4]}), tol))
}

fn rule90_zeta(opts: &VerifyOptions, tol: f64) -> Result<ClosedFormReport> {
    let sites = opts.sites(1, 4)?;
    let r_max = opts.r(60);
    let us = opts.u();
    let mut t = ErrorTracker::default();
    zeta_against_series(Qca2Variant::Rule90, &sites, &us, r_max, &mut t)?;
    Ok(t.finish("", "theorem", json!({"n": sites, "r_max": r_max, "u": u_json(&us)}), tol))
}

fn rule90_conjecture(opts: &VerifyOptions, tol: f64) -> Result<ClosedFormReport> {
    let sites = opts.sites(5, 8)?;
    let r_max = opts.r(64);
    let us = opts.u_samples.clone().unwrap_or_else(|| {
        let mut v = default_u_samples();
        v.push(c(0.0, 0.5));
        v
    });
    let mut t = ErrorTracker::default();
    let mut per_n = Vec::new();
    for &n in &sites {
        let r = conjecture_test_rule90(n, r_max, &us)?;
        per_n.push(json!({"n": n, "max_abs_error": r.max_abs_error}));
        t.record(r.max_abs_error, r.witness);
    }
    let grid = json!({"n": sites, "r_max": r_max, "u": u_json(&us), "per_n": per_n});
    let mut report = t.finish("", "conjecture", grid, tol);
    report.notes.push(if report.passed {
        "conjecture supported on this grid; this is evidence, not proof".to_string()
    } else {
        "conjecture not supported at the witness point".to_string()
    });
    Ok(report)
}
