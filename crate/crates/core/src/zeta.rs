//! IPS-type zeta functions: the truncated log series built from traces of
//! powers, and closed-form evaluators for the tensor model, the rotation
//! model `QCA1(ξ, ξ)` and the reflection family `QCA2(0, ξ)`.
//!
//! Sign convention: every value returned here is `log ζ̄^{-1}(u)`, i.e.
//! `(1/2^N) Σ_j Log(1 - u λ_j) = -Σ_r C_r u^r / r`.

use serde::{Deserialize, Serialize};

use crate::config::{DOUBLE_ROOT_TOL, GAUSS_HERMITE_CONVERGENCE, SINGULAR_TOL};
use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::models::TensorFactors;
use crate::operator::GlobalOperator;
use crate::scalar::{c, cone, cpowi, cr, czero, pow2, Real, C};
use crate::special::{atanh, chebyshev_t, gaussian_expectation, log_binomial_half_pmf};

pub use crate::operator::TraceSequence;

/// Coefficients of `log ζ̄^{-1}(u) ≈ Σ_{r=1}^{R} coeff_r u^r`, `coeff_r = -C_r / r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaLogSeries<T: Real> {
    /// `coefficients[r - 1]` multiplies `u^r`.
    pub coefficients: Vec<C<T>>,
    pub truncation_order: usize,
}

impl<T: Real> ZetaLogSeries<T> {
    pub fn from_traces(traces: &TraceSequence<T>) -> Self {
        let coefficients = traces
            .c_values
            .iter()
            .enumerate()
            .map(|(k, &cv)| -cv / T::from_usize_lossy(k + 1))
            .collect();
        Self { coefficients, truncation_order: traces.r_max() }
    }

    /// Coefficient of `u^r`, 1-based.
    pub fn coefficient(&self, r: usize) -> C<T> {
        self.coefficients[r - 1]
    }

    /// Truncated sum at `u` (Horner).
    pub fn evaluate(&self, u: C<T>) -> C<T> {
        self.coefficients.iter().rev().fold(czero::<T>(), |acc, &a| (acc + a) * u)
    }

    /// CSV with header `r,coeff_re,coeff_im`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,coeff_re,coeff_im\n");
        for (k, z) in self.coefficients.iter().enumerate() {
            s.push_str(&format!("{},{:e},{:e}\n", k + 1, z.re, z.im));
        }
        s
    }
}

/// Log series of the inverse zeta function up to order `r_max`.
pub fn zeta_log_series<T: Real>(op: &GlobalOperator<T>, r_max: usize) -> Result<ZetaLogSeries<T>> {
    Ok(ZetaLogSeries::from_traces(&op.trace_powers(r_max)?))
}

fn check_singular<T: Real>(factor: C<T>, u: C<T>) -> Result<()> {
    let d = factor.norm();
    if d < T::lit(SINGULAR_TOL) {
        Err(Error::SingularAtU { u: format!("{u}"), distance: d.to_f64_lossy() })
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Tensor model

/// Eigenvalues of a 2x2 matrix from its characteristic polynomial.
pub fn eigenvalues_2x2<T: Real>(m: &CMatrix<T>) -> (C<T>, C<T>) {
    let tr = m[(0, 0)] + m[(1, 1)];
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let half = T::lit(0.5);
    let disc = (tr * tr - det * T::lit(4.0)).sqrt();
    let plus = (tr + disc) * half;
    let minus = (tr - disc) * half;
    // recover the smaller root from det to avoid cancellation
    if plus.norm() >= minus.norm() {
        if plus.norm() > T::zero() {
            (plus, det / plus)
        } else {
            (plus, minus)
        }
    } else {
        (det / minus, minus)
    }
}

/// `C_r` of the tensor model `left ⊗ diag(e, h)` on `N >= 2` sites:
/// `(λ+^r + λ-^r)(λ̃+^r + λ̃-^r)^(N-2)(e^r + h^r) / 2^N`, with `λ±` the
/// eigenvalues of `left` and `λ̃±` those of `left · right`.
pub fn tensor_model_cr<T: Real>(factors: &TensorFactors<T>, n_sites: usize, r: u32) -> Result<C<T>> {
    if n_sites < 2 {
        return Err(Error::DomainError(format!("the tensor-model formula needs N >= 2, got {n_sites}")));
    }
    if !factors.right_is_diagonal() {
        return Err(Error::DomainError("right tensor factor must be diagonal".into()));
    }
    let (lp, lm) = eigenvalues_2x2(factors.left());
    let (tp, tm) = eigenvalues_2x2(&factors.left().matmul(factors.right()));
    let e = factors.right()[(0, 0)];
    let h = factors.right()[(1, 1)];
    let a = cpowi(lp, r) + cpowi(lm, r);
    let b = cpowi(tp, r) + cpowi(tm, r);
    let d = cpowi(e, r) + cpowi(h, r);
    Ok(a * cpowi(b, (n_sites - 2) as u32) * d * pow2::<T>(-(n_sites as i32)))
}

// ---------------------------------------------------------------------------
// QCA1(ξ, ξ): binomial closed form and its Gaussian limit

/// Phase factors `e^{i(2k-(N-1))ξ}` and probabilities `binom(N-1, k) / 2^(N-1)`.
fn binomial_terms<T: Real>(n_sites: usize, xi: T) -> impl Iterator<Item = (C<T>, T)> {
    let steps = n_sites - 1;
    log_binomial_half_pmf(steps).into_iter().enumerate().map(move |(k, lp)| {
        let shift = T::from_usize_lossy(2 * k) - T::from_usize_lossy(steps);
        let (s, co) = (shift * xi).sin_cos();
        (c(co, s), T::lit(lp.exp()))
    })
}

/// `log ζ̄^{-1}(u)` of `QCA1(ξ, ξ)` on `N` sites:
/// `2^{-(N-1)} Σ_k binom(N-1, k) Log(1 - e^{i(2k-(N-1))ξ} u)`.
pub fn binomial_zeta_qca1<T: Real>(n_sites: usize, xi: T, u: C<T>) -> Result<C<T>> {
    if n_sites == 0 {
        return Err(Error::DomainError("N must be at least 1".into()));
    }
    let mut acc = czero::<T>();
    for (phase, prob) in binomial_terms(n_sites, xi) {
        let f = cone::<T>() - phase * u;
        check_singular(f, u)?;
        acc += f.ln() * prob;
    }
    Ok(acc)
}

/// Coefficient of `u^r` in the expansion of [`binomial_zeta_qca1`], read off
/// its logarithmic factors: `-(1/r) Σ_k p_k e^{i r (2k-(N-1)) ξ}`.
pub fn binomial_zeta_qca1_coefficient<T: Real>(n_sites: usize, xi: T, r: u32) -> C<T> {
    let mut acc = czero::<T>();
    for (phase, prob) in binomial_terms(n_sites, xi) {
        acc += cpowi(phase, r) * prob;
    }
    -acc / T::from_u32(r).expect("r representable")
}

/// `E[Log(1 - e^{iξZ} u)]` for standard normal `Z`, by `quad_nodes`-point
/// Gauss-Hermite quadrature.
pub fn clt_limit_zeta<T: Real>(xi: T, u: C<T>, quad_nodes: usize) -> Result<C<T>> {
    if u.norm() >= T::one() {
        return Err(Error::DomainError(format!("the Gaussian limit needs |u| < 1, got |u| = {}", u.norm())));
    }
    if quad_nodes < 8 {
        return Err(Error::DomainError(format!("at least 8 quadrature nodes required, got {quad_nodes}")));
    }
    Ok(gaussian_expectation(quad_nodes, |z: T| {
        let (s, co) = (xi * z).sin_cos();
        (cone::<T>() - c(co, s) * u).ln()
    }))
}

/// [`clt_limit_zeta`] with the node count doubled from `start_nodes` until
/// successive values differ by less than `1e-10` (at most 1024 nodes).
/// Returns the value and the node count used.
pub fn clt_limit_zeta_converged<T: Real>(xi: T, u: C<T>, start_nodes: usize) -> Result<(C<T>, usize)> {
    const MAX_NODES: usize = 1024;
    let mut n = start_nodes.max(8);
    let mut prev = clt_limit_zeta(xi, u, n)?;
    while n < MAX_NODES {
        let next = clt_limit_zeta(xi, u, 2 * n)?;
        n *= 2;
        if (next - prev).norm() < T::lit(GAUSS_HERMITE_CONVERGENCE) {
            return Ok((next, n));
        }
        prev = next;
    }
    Ok((prev, n))
}

// ---------------------------------------------------------------------------
// QCA2(0, ξ): traces of the first and second power

/// Root structure of `λ² - (1 + sin ξ) λ + 2 sin ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootCase {
    Distinct,
    Double,
}

/// Closed-form `tr(Q_N(ξ))` and `C_1` of `QCA2(0, ξ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstTraceClosedForm<T: Real> {
    pub trace: C<T>,
    pub c1: C<T>,
    pub case: RootCase,
    pub roots: (C<T>, C<T>),
}

/// Evaluates the explicit root formula for `tr(Q_N(ξ))`. The double-root
/// branch is taken when the discriminant `(1 + sin ξ)² - 8 sin ξ` is below
/// `1e-12` in modulus.
pub fn qca2_c1_closed_form<T: Real>(n_sites: usize, xi: T) -> Result<FirstTraceClosedForm<T>> {
    if n_sites == 0 {
        return Err(Error::DomainError("N must be at least 1".into()));
    }
    let s = xi.sin();
    let one = T::one();
    let two = T::lit(2.0);
    let b = one + s;
    let disc = b * b - T::lit(8.0) * s;
    let root = cr(disc).sqrt();
    let l1 = (cr(b) - root) * T::lit(0.5);
    let l2 = (cr(b) + root) * T::lit(0.5);
    let e = (n_sites - 1) as u32;
    let scale = pow2::<T>(-(n_sites as i32));
    if disc.abs() < T::lit(DOUBLE_ROOT_TOL) {
        let sqrt2 = two.sqrt();
        let lam = two - sqrt2;
        let trace = cr((sqrt2 * T::from_usize_lossy(n_sites - 1) + two) * lam.powi(e as i32));
        return Ok(FirstTraceClosedForm { trace, c1: trace * scale, case: RootCase::Double, roots: (cr(lam), cr(lam)) });
    }
    let one_c = cone::<T>();
    let trace = ((l2 - one_c) * cpowi(l1, e) - (l1 - one_c) * cpowi(l2, e)) * two / (l2 - l1);
    Ok(FirstTraceClosedForm { trace, c1: trace * scale, case: RootCase::Distinct, roots: (l1, l2) })
}

/// `x^(1)_N = tr(Q_N(ξ))` by `x_{N+2} = (1 + sin ξ) x_{N+1} - 2 sin ξ x_N`, `x_1 = x_2 = 2`.
pub fn qca2_x1_recurrence<T: Real>(n_sites: usize, xi: T) -> Result<T> {
    if n_sites == 0 {
        return Err(Error::DomainError("N must be at least 1".into()));
    }
    let s = xi.sin();
    let two = T::lit(2.0);
    let (mut a, mut b) = (two, two);
    for _ in 2..n_sites {
        let next = (T::one() + s) * b - two * s * a;
        a = b;
        b = next;
    }
    Ok(if n_sites == 1 { a } else { b })
}

/// `x^(2)_N = tr(Q_N(ξ)²)` from the third-order recurrence
/// `x_{N+3} = (1 + sin²ξ) x_{N+2} + 2 sin ξ cos²ξ x_{N+1} - 4 sin ξ cos²ξ x_N`
/// with `x_1 = 2, x_2 = 4, x_3 = 4(1 + sin²ξ)`.
pub fn qca2_x2_recurrence<T: Real>(n_sites: usize, xi: T) -> Result<T> {
    if n_sites == 0 {
        return Err(Error::DomainError("N must be at least 1".into()));
    }
    let (s, co) = xi.sin_cos();
    let s2 = s * s;
    let sc2 = s * co * co;
    let mut x = [T::lit(2.0), T::lit(4.0), T::lit(4.0) * (T::one() + s2)];
    if n_sites <= 3 {
        return Ok(x[n_sites - 1]);
    }
    for _ in 3..n_sites {
        let next = (T::one() + s2) * x[2] + T::lit(2.0) * sc2 * x[1] - T::lit(4.0) * sc2 * x[0];
        x = [x[1], x[2], next];
    }
    Ok(x[2])
}

/// `tr(Q_N(π/2)^r)`: `2^((N+1)/2) T_{N-1}(√2/2)` for odd `r`, `2^N` for even `r`.
pub fn qca2_pi_half_trace<T: Real>(n_sites: usize, r: u32) -> Result<T> {
    if n_sites == 0 || r == 0 {
        return Err(Error::DomainError("N and r must be positive".into()));
    }
    if r.is_multiple_of(2) {
        return Ok(pow2(n_sites as i32));
    }
    let x = T::lit(0.5).sqrt();
    Ok(T::lit(2.0).powf(T::from_usize_lossy(n_sites + 1) / T::lit(2.0)) * chebyshev_t((n_sites - 1) as u32, x))
}

// ---------------------------------------------------------------------------
// Rule 90: traces of general powers and closed-form zeta

/// `tr(Q_N(0)^r)` for `r = 2^k (2s - 1)` on the proved range `N ∈ {2, 3, 4}`:
/// `2^(2^k)` when `2^k < N`, otherwise `2^N`.
pub fn rule90_trace_general_r<T: Real>(n_sites: usize, k: u32, s: u32) -> Result<T> {
    if !(2..=4).contains(&n_sites) {
        return Err(Error::DomainError(format!("Rule 90 trace law is established for N in 2..=4, got {n_sites}")));
    }
    if s == 0 {
        return Err(Error::DomainError("s must be positive".into()));
    }
    // k < log2 N  <=>  2^k < N
    if k < 3 && (1usize << k) < n_sites {
        Ok(pow2(1 << k))
    } else {
        Ok(pow2(n_sites as i32))
    }
}

/// Which `QCA2(0, ξ)` closed form to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Qca2Variant {
    /// `ξ = π/2`.
    PiHalf,
    /// `ξ = 0`.
    Rule90,
}

fn check_unit_disk<T: Real>(u: C<T>) -> Result<()> {
    if u.norm() >= T::one() {
        return Err(Error::SingularAtU { u: format!("{u}"), distance: (T::one() - u.norm()).to_f64_lossy() });
    }
    Ok(())
}

/// `m = ceil(log2 N)`, the exponent of the Rule 90 period `2^m` on `N` sites.
pub fn rule90_block_exponent(n_sites: usize) -> u32 {
    if n_sites <= 1 {
        0
    } else {
        usize::BITS - (n_sites - 1).leading_zeros()
    }
}

/// Rule 90 zeta formula with block exponent `m`:
/// `2^{-m} Log(1 - u^(2^m)) - Σ_{k<m} 2^{-(N - (2^k - k))} artanh(u^(2^k))`.
/// Proved for `m ∈ {1, 2}`; evaluated for any `m` by the conjecture check.
pub fn rule90_zeta_formula<T: Real>(n_sites: usize, m: u32, u: C<T>) -> Result<C<T>> {
    check_unit_disk(u)?;
    let period = 1u32 << m;
    let mut acc = (cone::<T>() - cpowi(u, period)).ln() * pow2::<T>(-(m as i32));
    for k in 0..m {
        let exp = n_sites as i32 - ((1i32 << k) - k as i32);
        acc -= atanh(cpowi(u, 1 << k)) * pow2::<T>(-exp);
    }
    Ok(acc)
}

/// Closed-form `log ζ̄^{-1}(u)` for `QCA2(0, π/2)` (any `N >= 1`) or Rule 90
/// (`N ∈ {1, 2, 3, 4}`).
pub fn zeta_closed_form_qca2<T: Real>(n_sites: usize, variant: Qca2Variant, u: C<T>) -> Result<C<T>> {
    if n_sites == 0 {
        return Err(Error::DomainError("N must be at least 1".into()));
    }
    check_unit_disk(u)?;
    match variant {
        Qca2Variant::PiHalf => {
            let one = cone::<T>();
            let coef = T::lit(2.0).powf(-T::from_usize_lossy(n_sites - 1) / T::lit(2.0))
                * chebyshev_t((n_sites - 1) as u32, T::lit(0.5).sqrt());
            Ok((one - u * u).ln() * T::lit(0.5) - atanh(u) * coef)
        }
        Qca2Variant::Rule90 => {
            if n_sites > 4 {
                return Err(Error::DomainError(format!(
                    "Rule 90 zeta formula is established for N <= 4, got {n_sites}; use the conjecture check"
                )));
            }
            if n_sites == 1 {
                return Ok((cone::<T>() - u).ln());
            }
            rule90_zeta_formula(n_sites, rule90_block_exponent(n_sites), u)
        }
    }
}

/// Limit `N → ∞` of the `π/2` zeta: `½ Log(1 - u) + ½ Log(1 + u)`.
pub fn pi_half_zeta_limit<T: Real>(u: C<T>) -> C<T> {
    let one = cone::<T>();
    ((one - u).ln() + (one + u).ln()) * T::lit(0.5)
}

// ---------------------------------------------------------------------------
// Reports

/// Outcome of comparing a closed form against brute-force linear algebra on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormReport {
    pub formula_id: String,
    /// `theorem`, `proposition`, `corollary`, `lemma` or `conjecture`.
    pub label: String,
    pub grid: serde_json::Value,
    pub max_abs_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub witness: serde_json::Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Running maximum over grid points visited in a fixed order; ties keep the
/// earliest point.
#[derive(Debug, Clone)]
pub struct ErrorTracker {
    max: f64,
    witness: serde_json::Value,
    count: usize,
}

impl Default for ErrorTracker {
    fn default() -> Self {
        Self { max: 0.0, witness: serde_json::Value::Null, count: 0 }
    }
}

impl ErrorTracker {
    pub fn record(&mut self, error: f64, point: serde_json::Value) {
        if self.count == 0 || error > self.max || (error.is_nan() && !self.max.is_nan()) {
            self.max = error;
            self.witness = point;
        }
        self.count += 1;
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn finish(
        self,
        formula_id: &str,
        label: &str,
        grid: serde_json::Value,
        tolerance: f64,
    ) -> ClosedFormReport {
        ClosedFormReport {
            formula_id: formula_id.into(),
            label: label.into(),
            grid,
            max_abs_error: self.max,
            tolerance,
            passed: self.count > 0 && self.max <= tolerance,
            witness: self.witness,
            notes: Vec::new(),
        }
    }
}

/// Compares the Rule 90 zeta formula with `m = ceil(log2 N)` against the
/// truncated trace series on `N >= 5` sites. This is an experiment: the
/// formula is only established for `N <= 4`.
pub fn conjecture_test_rule90(n_sites: usize, r_max: usize, u_samples: &[C<f64>]) -> Result<ClosedFormReport> {
    if n_sites < 5 {
        return Err(Error::DomainError(format!(
            "N = {n_sites} is in the proved range; the conjecture check starts at N = 5"
        )));
    }
    let op = GlobalOperator::new(crate::models::LocalOperator::<f64>::rule90(), n_sites)?;
    let series = zeta_log_series(&op, r_max)?;
    let m = rule90_block_exponent(n_sites);
    let mut tracker = ErrorTracker::default();
    for &u in u_samples {
        let formula = rule90_zeta_formula(n_sites, m, u)?;
        let err = (formula - series.evaluate(u)).norm();
        tracker.record(err, serde_json::json!({"n": n_sites, "u": [u.re, u.im]}));
    }
    let grid = serde_json::json!({
        "n": [n_sites],
        "m": m,
        "r_max": r_max,
        "u": u_samples.iter().map(|u| [u.re, u.im]).collect::<Vec<_>>(),
    });
    let mut report = tracker.finish("rule90-conjecture", "conjecture", grid, crate::config::CONJECTURE_TOL);
    report.notes.push("conjecture check: agreement is evidence, not proof".into());
    Ok(report)
}
