//! Local two-site operators: construction of the named model families,
//! validation of the nearest-neighbour zero pattern, and classification.
//!
//! Index convention: the column of a local operator is the input pair
//! `(i, j)` encoded `2i + j`, the row is the output pair `(k, l)` encoded
//! `2k + l`. Entry `(2k+l, 2i+j)` is the transition weight from `(i, j)` to
//! `(k, l)`; it must vanish whenever `j != l` (the right site never changes).

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, MatrixPairs};
use crate::scalar::{c, cone, cr, czero, Real, C};

/// 4x4 local operator satisfying the nearest-neighbour constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperator<T: Real> {
    entries: CMatrix<T>,
}

/// `(row, col)` positions forced to zero: right-site input `j` differs from output `l`.
pub fn forbidden_positions() -> impl Iterator<Item = (usize, usize)> {
    (0..4).flat_map(|row| (0..4).map(move |col| (row, col))).filter(|&(row, col)| (row & 1) != (col & 1))
}

impl<T: Real> LocalOperator<T> {
    /// Validates a 4x4 matrix against the zero pattern and finiteness.
    pub fn new(entries: CMatrix<T>) -> Result<Self> {
        if entries.rows() != 4 || entries.cols() != 4 {
            return Err(Error::DimensionMismatch { expected: 16, actual: entries.rows() * entries.cols() });
        }
        if !entries.is_finite() {
            return Err(Error::DomainError("local operator has non-finite entries".into()));
        }
        for (row, col) in forbidden_positions() {
            let v = entries[(row, col)];
            if v.re != T::zero() || v.im != T::zero() {
                return Err(Error::ConstraintViolation { row, col, value: format!("{v}") });
            }
        }
        Ok(Self { entries })
    }

    pub fn identity() -> Self {
        Self { entries: CMatrix::identity(4) }
    }

    /// Wolfram Rule 90: `00->00, 01->11, 10->10, 11->01`.
    pub fn rule90() -> Self {
        Self {
            entries: CMatrix::from_real_rows([
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
            ]),
        }
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.entries
    }

    /// Transition weight from `(i, j)` to `(k, l)`.
    #[inline]
    pub fn weight(&self, i: usize, j: usize, k: usize, l: usize) -> C<T> {
        self.entries[(2 * k + l, 2 * i + j)]
    }

    /// Block acting when the right site is `0` (rows/cols `2k`, `2i`).
    pub fn even_block(&self) -> CMatrix<T> {
        CMatrix::from_fn(2, 2, |k, i| self.entries[(2 * k, 2 * i)])
    }

    /// Block acting when the right site is `1`.
    pub fn odd_block(&self) -> CMatrix<T> {
        CMatrix::from_fn(2, 2, |k, i| self.entries[(2 * k + 1, 2 * i + 1)])
    }
}

/// Named model families.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec<T: Real> {
    /// Domany-Kinzel PCA with probabilities `p`, `q`.
    Dk { p: T, q: T },
    /// Generalized DK model with four angles.
    GeneralizedDk { xi: [T; 4] },
    Qca1 { xi1: T, xi2: T },
    Qca2 { xi1: T, xi2: T },
    /// `left ⊗ right`; the right factor must be diagonal.
    Tensor { left: CMatrix<T>, right: CMatrix<T> },
    Custom(CMatrix<T>),
}

fn reduce_angle<T: Real>(x: T) -> Result<T> {
    if !x.is_finite() {
        return Err(Error::DomainError(format!("angle {x} is not finite")));
    }
    let two_pi = T::TAU();
    if x >= T::zero() && x < two_pi {
        return Ok(x);
    }
    let r = x - two_pi * (x / two_pi).floor();
    Ok(if r >= two_pi { r - two_pi } else { r })
}

fn check_probability<T: Real>(name: &str, x: T) -> Result<()> {
    if x.is_finite() && x >= T::zero() && x <= T::one() {
        Ok(())
    } else {
        Err(Error::DomainError(format!("{name} = {x} is not a probability in [0, 1]")))
    }
}

fn real4<T: Real>(rows: [[T; 4]; 4]) -> CMatrix<T> {
    CMatrix::from_fn(4, 4, |i, j| cr(rows[i][j]))
}

/// Builds the local operator of a model.
pub fn build_local<T: Real>(spec: &ModelSpec<T>) -> Result<LocalOperator<T>> {
    let z = T::zero();
    let o = T::one();
    match spec {
        ModelSpec::Dk { p, q } => {
            check_probability("p", *p)?;
            check_probability("q", *q)?;
            let (p, q) = (*p, *q);
            Ok(LocalOperator {
                entries: real4([
                    [o, z, o - p, z],
                    [z, o - p, z, o - q],
                    [z, z, p, z],
                    [z, p, z, q],
                ]),
            })
        }
        ModelSpec::GeneralizedDk { xi } => {
            let mut s2 = [z; 4];
            let mut c2 = [z; 4];
            for (n, &x) in xi.iter().enumerate() {
                let x = reduce_angle(x)?;
                let (s, cc) = x.sin_cos();
                s2[n] = s * s;
                c2[n] = cc * cc;
            }
            Ok(LocalOperator {
                entries: real4([
                    [c2[0], z, s2[2], z],
                    [z, s2[1], z, c2[3]],
                    [s2[0], z, c2[2], z],
                    [z, c2[1], z, s2[3]],
                ]),
            })
        }
        ModelSpec::Qca1 { xi1, xi2 } => {
            let (s1, c1) = reduce_angle(*xi1)?.sin_cos();
            let (s2, c2) = reduce_angle(*xi2)?.sin_cos();
            Ok(LocalOperator {
                entries: real4([
                    [c1, z, -s1, z],
                    [z, c2, z, -s2],
                    [s1, z, c1, z],
                    [z, s2, z, c2],
                ]),
            })
        }
        ModelSpec::Qca2 { xi1, xi2 } => {
            let (s1, c1) = reduce_angle(*xi1)?.sin_cos();
            let (s2, c2) = reduce_angle(*xi2)?.sin_cos();
            Ok(LocalOperator {
                entries: real4([
                    [c1, z, -s1, z],
                    [z, -s2, z, c2],
                    [s1, z, c1, z],
                    [z, c2, z, s2],
                ]),
            })
        }
        ModelSpec::Tensor { left, right } => {
            let factors = TensorFactors::new(left.clone(), right.clone())?;
            LocalOperator::new(factors.compose())
        }
        ModelSpec::Custom(m) => LocalOperator::new(m.clone()),
    }
}

/// Factors of a tensor-model local operator `left ⊗ right`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorFactors<T: Real> {
    left: CMatrix<T>,
    right: CMatrix<T>,
}

impl<T: Real> TensorFactors<T> {
    pub fn new(left: CMatrix<T>, right: CMatrix<T>) -> Result<Self> {
        for (name, m) in [("left", &left), ("right", &right)] {
            if m.rows() != 2 || m.cols() != 2 {
                return Err(Error::DimensionMismatch { expected: 4, actual: m.rows() * m.cols() });
            }
            if !m.is_finite() {
                return Err(Error::DomainError(format!("{name} factor has non-finite entries")));
            }
            if m.max_abs() == T::zero() {
                return Err(Error::DomainError(format!("{name} factor is the zero matrix")));
            }
        }
        Ok(Self { left, right })
    }

    pub fn left(&self) -> &CMatrix<T> {
        &self.left
    }

    pub fn right(&self) -> &CMatrix<T> {
        &self.right
    }

    pub fn right_is_diagonal(&self) -> bool {
        let z = czero::<T>();
        self.right[(0, 1)] == z && self.right[(1, 0)] == z
    }

    pub fn compose(&self) -> CMatrix<T> {
        self.left.kron(&self.right)
    }
}

/// Classification flags of a local operator.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelClass<T: Real> {
    pub is_pca: bool,
    pub is_qca: bool,
    pub is_ca: bool,
    pub tensor_factorizable: bool,
    pub factors: Option<TensorFactors<T>>,
}

/// Serializable view of a [`ModelClass`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelClassReport {
    pub is_pca: bool,
    pub is_qca: bool,
    pub is_ca: bool,
    pub tensor_factorizable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factors: Option<FactorsReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorsReport {
    pub left: MatrixPairs,
    pub right: MatrixPairs,
}

impl<T: Real> ModelClass<T> {
    pub fn report(&self) -> ModelClassReport {
        ModelClassReport {
            is_pca: self.is_pca,
            is_qca: self.is_qca,
            is_ca: self.is_ca,
            tensor_factorizable: self.tensor_factorizable,
            factors: self
                .factors
                .as_ref()
                .map(|f| FactorsReport { left: f.left.to_pairs(), right: f.right.to_pairs() }),
        }
    }
}

/// Column-stochastic test with entries in `[0, 1]` up to `tol`.
pub fn is_column_stochastic<T: Real>(m: &CMatrix<T>, tol: T) -> bool {
    for j in 0..m.cols() {
        let mut sum = czero::<T>();
        for i in 0..m.rows() {
            let v = m[(i, j)];
            if v.im.abs() > tol || v.re < -tol || v.re > T::one() + tol {
                return false;
            }
            sum += v;
        }
        if (sum - cone::<T>()).norm() > tol {
            return false;
        }
    }
    true
}

/// `m† m = I` up to `tol` entrywise.
pub fn is_unitary<T: Real>(m: &CMatrix<T>, tol: T) -> bool {
    m.adjoint().matmul(m).max_abs_diff(&CMatrix::identity(m.rows())) <= tol
}

pub fn classify<T: Real>(op: &LocalOperator<T>, tol: T) -> ModelClass<T> {
    let m = op.matrix();
    let is_pca = is_column_stochastic(m, tol);
    let is_qca = is_unitary(m, tol);
    let is_ca = m.as_slice().iter().all(|z| z.norm() <= tol || (*z - cone::<T>()).norm() <= tol);
    let factors = factor_tensor(op, tol);
    ModelClass { is_pca, is_qca, is_ca, tensor_factorizable: factors.is_some(), factors }
}

/// Splits `op = left ⊗ diag(e, h)` when possible.
///
/// The even block of `op` equals `e * left` and the odd block `h * left`, so a
/// factorization exists iff the two blocks are proportional. The scale is
/// fixed by `e = 1`, or `h = 1` when the even block vanishes.
pub fn factor_tensor<T: Real>(op: &LocalOperator<T>, tol: T) -> Option<TensorFactors<T>> {
    let even = op.even_block();
    let odd = op.odd_block();
    let z = czero::<T>();
    let diag = |d0: C<T>, d1: C<T>| CMatrix::from_fn(2, 2, |i, j| if i != j { z } else if i == 0 { d0 } else { d1 });

    let (left, right) = if even.max_abs() > tol {
        let pivot = even
            .as_slice()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
            .map(|(i, _)| i)?;
        let h = odd.as_slice()[pivot] / even.as_slice()[pivot];
        (even, diag(cone(), h))
    } else if odd.max_abs() > tol {
        (odd, diag(z, cone()))
    } else {
        return None;
    };
    let factors = TensorFactors { left, right };
    if factors.compose().max_abs_diff(op.matrix()) <= tol {
        Some(factors)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// JSON wire format

/// Parses an angle given in radians (`0.5`, `-1e-3`) or as a multiple of pi
/// (`pi`, `-pi/2`, `3pi/4`, `3*pi/4`, `2.5*pi`).
pub fn parse_angle(s: &str) -> Result<f64> {
    let t: String = s.trim().chars().filter(|ch| !ch.is_whitespace()).collect::<String>().to_lowercase();
    let bad = || Error::Parse(format!("cannot parse angle '{s}'"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(pos) = t.find("pi").or_else(|| t.find('π')) else {
        return t.parse::<f64>().map_err(|_| bad());
    };
    let plen = if t[pos..].starts_with("pi") { 2 } else { 'π'.len_utf8() };
    let coeff_str = t[..pos].trim_end_matches('*');
    let coeff = match coeff_str {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().map_err(|_| bad())?,
    };
    let rest = &t[pos + plen..];
    let denom = if rest.is_empty() {
        1.0
    } else if let Some(d) = rest.strip_prefix('/') {
        d.parse::<f64>().map_err(|_| bad())?
    } else {
        return Err(bad());
    };
    if denom == 0.0 {
        return Err(bad());
    }
    Ok(coeff * std::f64::consts::PI / denom)
}

fn value_to_angle(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::Parse(format!("bad number {n}"))),
        Value::String(s) => parse_angle(s),
        other => Err(Error::Parse(format!("expected an angle, got {other}"))),
    }
}

fn value_to_pairs(v: &Value, expected: usize) -> Result<Vec<[f64; 2]>> {
    let arr = v.as_array().ok_or_else(|| Error::Parse("matrix must be an array of [re, im] pairs".into()))?;
    if arr.len() != expected {
        return Err(Error::DimensionMismatch { expected, actual: arr.len() });
    }
    arr.iter()
        .map(|p| match p.as_array().map(|a| a.as_slice()) {
            Some([re, im]) => match (re.as_f64(), im.as_f64()) {
                (Some(re), Some(im)) => Ok([re, im]),
                _ => Err(Error::Parse(format!("bad complex pair {p}"))),
            },
            _ => Err(Error::Parse(format!("expected [re, im], got {p}"))),
        })
        .collect()
}

fn pairs_to_json<T: Real>(m: &CMatrix<T>) -> Value {
    Value::Array(m.to_pairs().data.into_iter().map(|[re, im]| serde_json::json!([re, im])).collect())
}

impl<T: Real> ModelSpec<T> {
    /// Parses `{"model": "dk"|"gdk"|"qca1"|"qca2"|"tensor"|"custom", "params": [...]}`.
    pub fn from_json_value(v: &Value) -> Result<Self> {
        let model = v
            .get("model")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("missing string field 'model'".into()))?;
        let params = v.get("params").cloned().unwrap_or(Value::Array(vec![]));
        let params = params.as_array().ok_or_else(|| Error::Parse("'params' must be an array".into()))?;
        Self::from_name_and_params(model, params)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_value(&v)
    }

    pub(crate) fn from_name_and_params(model: &str, params: &[Value]) -> Result<Self> {
        let need = |n: usize| {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::Parse(format!("model '{model}' takes {n} parameters, got {}", params.len())))
            }
        };
        let angles = |n: usize| -> Result<Vec<T>> {
            need(n)?;
            params.iter().map(|p| value_to_angle(p).map(T::lit)).collect()
        };
        match model.to_ascii_lowercase().as_str() {
            "dk" => {
                need(2)?;
                let p = params[0].as_f64().ok_or_else(|| Error::Parse("p must be a number".into()))?;
                let q = params[1].as_f64().ok_or_else(|| Error::Parse("q must be a number".into()))?;
                Ok(Self::Dk { p: T::lit(p), q: T::lit(q) })
            }
            "gdk" => {
                let a = angles(4)?;
                Ok(Self::GeneralizedDk { xi: [a[0], a[1], a[2], a[3]] })
            }
            "qca1" => {
                let a = angles(2)?;
                Ok(Self::Qca1 { xi1: a[0], xi2: a[1] })
            }
            "qca2" => {
                let a = angles(2)?;
                Ok(Self::Qca2 { xi1: a[0], xi2: a[1] })
            }
            "tensor" => {
                need(2)?;
                let left = CMatrix::from_pairs(2, 2, &value_to_pairs(&params[0], 4)?)?;
                let right = CMatrix::from_pairs(2, 2, &value_to_pairs(&params[1], 4)?)?;
                Ok(Self::Tensor { left, right })
            }
            "custom" => {
                // either a flat array of 16 pairs or a single nested matrix
                let flat = if params.len() == 1 && params[0].as_array().is_some_and(|a| a.len() == 16) {
                    value_to_pairs(&params[0], 16)?
                } else {
                    value_to_pairs(&Value::Array(params.to_vec()), 16)?
                };
                Ok(Self::Custom(CMatrix::from_pairs(4, 4, &flat)?))
            }
            other => Err(Error::Parse(format!("unknown model '{other}'"))),
        }
    }

    pub fn to_json_value(&self) -> Value {
        use serde_json::json;
        let f = |x: T| x.to_f64_lossy();
        match self {
            Self::Dk { p, q } => json!({"model": "dk", "params": [f(*p), f(*q)]}),
            Self::GeneralizedDk { xi } => json!({"model": "gdk", "params": xi.map(f)}),
            Self::Qca1 { xi1, xi2 } => json!({"model": "qca1", "params": [f(*xi1), f(*xi2)]}),
            Self::Qca2 { xi1, xi2 } => json!({"model": "qca2", "params": [f(*xi1), f(*xi2)]}),
            Self::Tensor { left, right } => {
                json!({"model": "tensor", "params": [pairs_to_json(left), pairs_to_json(right)]})
            }
            Self::Custom(m) => json!({"model": "custom", "params": pairs_to_json(m)}),
        }
    }
}

/// 2x2 rotation `[[cos, -sin], [sin, cos]]`.
pub fn rotation<T: Real>(xi: T) -> CMatrix<T> {
    let (s, cc) = xi.sin_cos();
    CMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) | (1, 1) => cr(cc),
        (0, 1) => cr(-s),
        _ => cr(s),
    })
}

/// Diagonal 2x2 matrix with unit-modulus phases, the right factor of the
/// unitary tensor models.
pub fn phase_diag<T: Real>(theta1: T, theta2: T) -> CMatrix<T> {
    let (s1, c1) = theta1.sin_cos();
    let (s2, c2) = theta2.sin_cos();
    CMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => c(c1, s1),
        (1, 1) => c(c2, s2),
        _ => czero(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    type Spec = ModelSpec<f64>;

    fn assert_zero_pattern(op: &LocalOperator<f64>) {
        for (r, cc) in forbidden_positions() {
            assert_eq!(op.matrix()[(r, cc)], czero());
        }
    }

    #[test]
    fn every_builtin_family_respects_the_zero_pattern() {
        let specs = [
            ModelSpec::Dk { p: 0.2, q: 0.9 },
            ModelSpec::GeneralizedDk { xi: [0.1, 0.7, 1.9, 2.5] },
            ModelSpec::Qca1 { xi1: 0.4, xi2: -1.2 },
            ModelSpec::Qca2 { xi1: 2.0, xi2: 0.3 },
        ];
        for s in &specs {
            assert_zero_pattern(&build_local(s).unwrap());
        }
        assert_zero_pattern(&LocalOperator::rule90());
        assert_zero_pattern(&LocalOperator::identity());
    }

    #[test]
    fn forbidden_positions_are_the_eight_dots() {
        let v: Vec<_> = forbidden_positions().collect();
        assert_eq!(v.len(), 8);
        assert!(v.contains(&(0, 1)) && v.contains(&(1, 0)) && v.contains(&(3, 2)));
    }

    #[test]
    fn gdk_zero_angles_is_rule90() {
        let op = build_local(&Spec::GeneralizedDk { xi: [0.0; 4] }).unwrap();
        assert_eq!(op, LocalOperator::rule90());
        // 01 -> 11 and 11 -> 01
        assert_eq!(op.weight(0, 1, 1, 1), cone());
        assert_eq!(op.weight(1, 1, 0, 1), cone());
    }

    #[test]
    fn gdk_trivial_point_is_identity() {
        let op = build_local(&Spec::GeneralizedDk { xi: [0.0, FRAC_PI_2, 0.0, FRAC_PI_2] }).unwrap();
        assert!(op.matrix().max_abs_diff(&CMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn qca2_origin_is_rule90() {
        let op = build_local(&Spec::Qca2 { xi1: 0.0, xi2: 0.0 }).unwrap();
        assert_eq!(op, LocalOperator::rule90());
        let op1 = build_local(&Spec::Qca1 { xi1: 0.0, xi2: 0.0 }).unwrap();
        assert_eq!(op1, LocalOperator::identity());
    }

    #[test]
    fn dk_is_original_gdk_slice() {
        // DK(p, q) corresponds to GDK(0, a, a, b) with p = cos^2 a, q = sin^2 b
        let (a, b) = (0.7_f64, 1.3_f64);
        let gdk = build_local(&Spec::GeneralizedDk { xi: [0.0, a, a, b] }).unwrap();
        let dk = build_local(&Spec::Dk { p: a.cos().powi(2), q: b.sin().powi(2) }).unwrap();
        assert!(gdk.matrix().max_abs_diff(dk.matrix()) < 1e-15);
    }

    #[test]
    fn custom_violation_is_rejected() {
        let mut m = CMatrix::<f64>::identity(4);
        m[(1, 0)] = c(0.25, 0.0);
        match build_local(&Spec::Custom(m)) {
            Err(Error::ConstraintViolation { row: 1, col: 0, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dk_out_of_range_is_domain_error() {
        assert!(matches!(build_local(&Spec::Dk { p: 1.2, q: 0.0 }), Err(Error::DomainError(_))));
        assert!(matches!(build_local(&Spec::Dk { p: 0.2, q: f64::NAN }), Err(Error::DomainError(_))));
        assert!(matches!(build_local(&Spec::Qca1 { xi1: f64::INFINITY, xi2: 0.0 }), Err(Error::DomainError(_))));
    }

    #[test]
    fn angles_outside_the_period_are_reduced() {
        let a = build_local(&Spec::Qca1 { xi1: 0.4 + 2.0 * PI, xi2: -1.1 }).unwrap();
        let b = build_local(&Spec::Qca1 { xi1: 0.4, xi2: 2.0 * PI - 1.1 }).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-14);
    }

    #[test]
    fn tensor_with_offdiagonal_right_factor_violates_constraint() {
        let left = rotation(0.3);
        let right = CMatrix::from_real_rows([[1.0, 0.5], [0.0, 1.0]]);
        assert!(matches!(build_local(&Spec::Tensor { left, right }), Err(Error::ConstraintViolation { .. })));
        let zero = CMatrix::zeros(2, 2);
        assert!(matches!(
            build_local(&Spec::Tensor { left: rotation(0.3), right: zero }),
            Err(Error::DomainError(_))
        ));
    }

    #[test]
    fn classify_examples() {
        let dk = classify(&build_local(&Spec::Dk { p: 0.3, q: 0.7 }).unwrap(), 1e-9);
        assert!(dk.is_pca && !dk.is_qca && !dk.is_ca);

        let q1 = classify(&build_local(&Spec::Qca1 { xi1: 0.4, xi2: 1.1 }).unwrap(), 1e-9);
        assert!(q1.is_qca && !q1.is_pca);

        let r90 = classify(&LocalOperator::<f64>::rule90(), 1e-9);
        assert!(r90.is_pca && r90.is_qca && r90.is_ca);
        assert!(!r90.tensor_factorizable && r90.factors.is_none());
    }

    #[test]
    fn factor_tensor_examples() {
        let xi = 0.7;
        let op = build_local(&Spec::Qca1 { xi1: xi, xi2: xi }).unwrap();
        let f = factor_tensor(&op, 1e-12).expect("QCA1(xi, xi) factorizes");
        assert!(f.left().max_abs_diff(&rotation(xi)) < 1e-15);
        assert!(f.right().max_abs_diff(&CMatrix::identity(2)) < 1e-15);

        let id = factor_tensor(&LocalOperator::<f64>::identity(), 1e-12).unwrap();
        assert_eq!(id.left(), &CMatrix::identity(2));
        assert_eq!(id.right(), &CMatrix::identity(2));

        assert!(factor_tensor(&LocalOperator::<f64>::rule90(), 1e-12).is_none());
        // QCA1 with distinct angles has non-proportional blocks
        assert!(factor_tensor(&build_local(&Spec::Qca1 { xi1: 0.2, xi2: 0.9 }).unwrap(), 1e-12).is_none());
    }

    #[test]
    fn factor_tensor_with_vanishing_even_block() {
        let left = CMatrix::from_fn(2, 2, |i, j| c(1.0 + i as f64, j as f64 - 0.5));
        let right = CMatrix::from_fn(2, 2, |i, j| if i == 1 && j == 1 { c(0.0, 2.0) } else { czero() });
        let op = build_local(&Spec::Tensor { left, right }).unwrap();
        let f = factor_tensor(&op, 1e-12).unwrap();
        assert_eq!(f.right()[(0, 0)], czero());
        assert_eq!(f.right()[(1, 1)], cone());
        assert!(f.compose().max_abs_diff(op.matrix()) < 1e-12);
    }

    #[test]
    fn rule90_rejected_by_exhaustive_diagonal_fit() {
        // least-squares fit of left ⊗ diag(e, h) over a grid of (e, h) never gets close
        let op = LocalOperator::<f64>::rule90();
        let even = op.even_block();
        let odd = op.odd_block();
        let mut best = f64::INFINITY;
        for a in -20..=20 {
            for b in -20..=20 {
                let (e, h) = (a as f64 / 10.0, b as f64 / 10.0);
                if e == 0.0 && h == 0.0 {
                    continue;
                }
                // optimal left for fixed (e, h): (e*E + h*H)/(e^2 + h^2)
                let denom = e * e + h * h;
                let left = even.scale(cr(e / denom)).add(&odd.scale(cr(h / denom)));
                let resid = left.scale(cr(e)).max_abs_diff(&even).max(left.scale(cr(h)).max_abs_diff(&odd));
                best = best.min(resid);
            }
        }
        assert!(best > 0.4, "best residual {best}");
    }

    #[test]
    fn parse_angle_forms() {
        assert_eq!(parse_angle("0.5").unwrap(), 0.5);
        assert!((parse_angle("pi/6").unwrap() - PI / 6.0).abs() < 1e-16);
        assert!((parse_angle("-pi/2").unwrap() + FRAC_PI_2).abs() < 1e-16);
        assert!((parse_angle("3pi/4").unwrap() - 0.75 * PI).abs() < 1e-15);
        assert!((parse_angle("3*pi/4").unwrap() - 0.75 * PI).abs() < 1e-15);
        assert!((parse_angle("PI").unwrap() - PI).abs() < 1e-16);
        assert!((parse_angle("π/3").unwrap() - PI / 3.0).abs() < 1e-16);
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("two").is_err());
        assert!(parse_angle("pi6").is_err());
    }

    #[test]
    fn json_model_specs() {
        let s = Spec::from_json(r#"{"model": "qca1", "params": [0.4, "pi/3"]}"#).unwrap();
        assert_eq!(s, Spec::Qca1 { xi1: 0.4, xi2: PI / 3.0 });
        let t = Spec::from_json(
            r#"{"model":"tensor","params":[[[1,0],[0,0],[0,0],[1,0]],[[0,1],[0,0],[0,0],[1,0]]]}"#,
        )
        .unwrap();
        let op = build_local(&t).unwrap();
        assert_eq!(op.matrix()[(0, 0)], c(0.0, 1.0));
        let back = Spec::from_json_value(&t.to_json_value()).unwrap();
        assert_eq!(back, t);
        assert!(Spec::from_json(r#"{"model":"gdk","params":[0,0]}"#).is_err());
        assert!(Spec::from_json(r#"{"model":"nope","params":[]}"#).is_err());
    }
}
