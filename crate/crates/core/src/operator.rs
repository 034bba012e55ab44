//! The global operator on an `N`-site path: matrix-free application, dense
//! materialization, traces of powers, spectrum and the log-determinant factor.
//!
//! Basis ordering: site 0 is the most significant bit of a configuration
//! index, so Kronecker products read left to right in site order. The global
//! operator is the product of the local operator embedded on the site pairs
//! `(N-2, N-1) ... (1, 2) (0, 1)`; the pair `(0, 1)` acts first.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::config::{DENSE_CAP, MATRIX_FREE_WARN, SINGULAR_TOL};
use crate::eigen;
use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::models::LocalOperator;
use crate::scalar::{cone, cr, czero, pow2, Real, C};

/// A configuration `(η(0), ..., η(N-1))` of the path.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    bits: Vec<u8>,
}

impl Configuration {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::DomainError("configuration needs at least one site".into()));
        }
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::DomainError(format!("site state {b} is not 0 or 1")));
        }
        if bits.len() >= usize::BITS as usize {
            return Err(Error::DomainError("too many sites".into()));
        }
        Ok(Self { bits })
    }

    pub fn from_index(n_sites: usize, index: usize) -> Result<Self> {
        if n_sites == 0 || n_sites >= usize::BITS as usize || index >> n_sites != 0 {
            return Err(Error::DomainError(format!("index {index} out of range for N = {n_sites}")));
        }
        Ok(Self { bits: (0..n_sites).map(|x| ((index >> (n_sites - 1 - x)) & 1) as u8).collect() })
    }

    /// Parses `0,0,1`, `0 0 1` or `001`.
    pub fn parse(s: &str) -> Result<Self> {
        let bits: Result<Vec<u8>> = s
            .chars()
            .filter(|ch| !matches!(ch, ',' | ' ' | '(' | ')' | '[' | ']'))
            .map(|ch| match ch {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Parse(format!("bad site state '{other}' in '{s}'"))),
            })
            .collect();
        Self::new(bits?)
    }

    pub fn n_sites(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// `Σ η(x) 2^(N-1-x)`.
    pub fn index(&self) -> usize {
        self.bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)
    }
}

/// The 2x2 constants `E00, E01, E10, E11` and the reflection `σ(ξ)`.
pub struct PauliProjectors;

impl PauliProjectors {
    fn unit<T: Real>(i: usize, j: usize) -> CMatrix<T> {
        CMatrix::from_fn(2, 2, |a, b| if (a, b) == (i, j) { cone() } else { czero() })
    }

    pub fn e00<T: Real>() -> CMatrix<T> {
        Self::unit(0, 0)
    }

    pub fn e01<T: Real>() -> CMatrix<T> {
        Self::unit(0, 1)
    }

    pub fn e10<T: Real>() -> CMatrix<T> {
        Self::unit(1, 0)
    }

    pub fn e11<T: Real>() -> CMatrix<T> {
        Self::unit(1, 1)
    }

    /// `[[-sin ξ, cos ξ], [cos ξ, sin ξ]]`, an involution.
    pub fn sigma<T: Real>(xi: T) -> CMatrix<T> {
        let (s, c) = xi.sin_cos();
        CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => cr(-s),
            (1, 1) => cr(s),
            _ => cr(c),
        })
    }
}

/// `tr(Q^r)` for `r = 1..=R` together with `C_r = tr(Q^r) / 2^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSequence<T: Real> {
    pub n_sites: usize,
    /// `values[r - 1] = tr(Q^r)`.
    pub values: Vec<C<T>>,
    pub c_values: Vec<C<T>>,
}

impl<T: Real> TraceSequence<T> {
    pub fn from_traces(n_sites: usize, values: Vec<C<T>>) -> Self {
        let inv = pow2::<T>(-(n_sites as i32));
        let c_values = values.iter().map(|&t| t * inv).collect();
        Self { n_sites, values, c_values }
    }

    pub fn r_max(&self) -> usize {
        self.values.len()
    }

    /// `tr(Q^r)`, 1-based.
    pub fn trace(&self, r: usize) -> C<T> {
        self.values[r - 1]
    }

    /// `C_r`, 1-based.
    pub fn c(&self, r: usize) -> C<T> {
        self.c_values[r - 1]
    }

    /// CSV with header `r,trace_re,trace_im,c_r_re,c_r_im`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,trace_re,trace_im,c_r_re,c_r_im\n");
        for (k, (t, cv)) in self.values.iter().zip(&self.c_values).enumerate() {
            s.push_str(&format!("{},{:e},{:e},{:e},{:e}\n", k + 1, t.re, t.im, cv.re, cv.im));
        }
        s
    }
}

/// How [`GlobalOperator::trace_powers_with`] forms the powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceStrategy {
    /// Dense for `N <= 7`, matrix-free above.
    #[default]
    Auto,
    /// Repeated dense multiplication of the materialized matrix.
    Dense,
    /// Per-basis-vector sweeps of the local updates.
    MatrixFree,
}

/// Largest N for which [`TraceStrategy::Auto`] multiplies dense matrices.
pub const AUTO_DENSE_TRACE_MAX: usize = 7;

/// The `2^N x 2^N` global operator, applied matrix-free or materialized on demand.
#[derive(Debug)]
pub struct GlobalOperator<T: Real> {
    n_sites: usize,
    local: LocalOperator<T>,
    weights: [C<T>; 16],
    dense_cap: usize,
    dense: OnceLock<CMatrix<T>>,
    spectrum: OnceLock<Vec<C<T>>>,
}

impl<T: Real> Clone for GlobalOperator<T> {
    fn clone(&self) -> Self {
        Self {
            n_sites: self.n_sites,
            local: self.local.clone(),
            weights: self.weights,
            dense_cap: self.dense_cap,
            dense: self.dense.clone(),
            spectrum: self.spectrum.clone(),
        }
    }
}

impl<T: Real> GlobalOperator<T> {
    pub fn new(local: LocalOperator<T>, n_sites: usize) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::DomainError("the path needs N >= 1 sites".into()));
        }
        if n_sites >= 40 {
            return Err(Error::DomainError(format!("N = {n_sites} is beyond addressable state vectors")));
        }
        let mut weights = [czero(); 16];
        for row in 0..4 {
            for col in 0..4 {
                weights[row * 4 + col] = local.matrix()[(row, col)];
            }
        }
        Ok(Self {
            n_sites,
            local,
            weights,
            dense_cap: DENSE_CAP,
            dense: OnceLock::new(),
            spectrum: OnceLock::new(),
        })
    }

    pub fn with_dense_cap(mut self, cap: usize) -> Self {
        self.dense_cap = cap;
        self
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_sites
    }

    pub fn local(&self) -> &LocalOperator<T> {
        &self.local
    }

    pub fn dense_cap(&self) -> usize {
        self.dense_cap
    }

    /// Applies the local update on sites `(x, x+1)` in place.
    fn apply_pair(&self, v: &mut [C<T>], x: usize) {
        let n = self.n_sites;
        let hi = 1usize << (n - 1 - x);
        let lo = 1usize << (n - 2 - x);
        let w = &self.weights;
        for base in 0..v.len() {
            if base & (hi | lo) != 0 {
                continue;
            }
            let idx = [base, base | lo, base | hi, base | hi | lo];
            let input = [v[idx[0]], v[idx[1]], v[idx[2]], v[idx[3]]];
            for (row, &target) in idx.iter().enumerate() {
                let r = &w[row * 4..row * 4 + 4];
                v[target] = r[0] * input[0] + r[1] * input[1] + r[2] * input[2] + r[3] * input[3];
            }
        }
    }

    /// `v <- Q v` in place.
    pub fn apply_in_place(&self, v: &mut [C<T>]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: v.len() });
        }
        for x in 0..self.n_sites.saturating_sub(1) {
            self.apply_pair(v, x);
        }
        Ok(())
    }

    /// `Q v`, computed as `N - 1` two-site updates, pair `(0, 1)` first.
    pub fn apply_global(&self, v: &[C<T>]) -> Result<Vec<C<T>>> {
        let mut out = v.to_vec();
        self.apply_in_place(&mut out)?;
        Ok(out)
    }

    fn check_dense(&self) -> Result<()> {
        if self.n_sites > self.dense_cap {
            Err(Error::SizeExceeded { n_sites: self.n_sites, cap: self.dense_cap })
        } else {
            Ok(())
        }
    }

    /// The dense matrix, column `j` being `Q e_j`; cached after the first call.
    pub fn materialize(&self) -> Result<&CMatrix<T>> {
        self.check_dense()?;
        if let Some(m) = self.dense.get() {
            return Ok(m);
        }
        let dim = self.dim();
        let columns: Vec<Vec<C<T>>> = (0..dim)
            .into_par_iter()
            .map(|j| {
                let mut e = vec![czero(); dim];
                e[j] = cone();
                self.apply_in_place(&mut e).expect("length matches");
                e
            })
            .collect();
        let mut m = CMatrix::zeros(dim, dim);
        for (j, col) in columns.iter().enumerate() {
            m.set_column(j, col);
        }
        Ok(self.dense.get_or_init(|| m))
    }

    pub fn trace_powers(&self, r_max: usize) -> Result<TraceSequence<T>> {
        self.trace_powers_with(r_max, TraceStrategy::Auto)
    }

    pub fn trace_powers_with(&self, r_max: usize, strategy: TraceStrategy) -> Result<TraceSequence<T>> {
        if r_max == 0 {
            return Err(Error::DomainError("r_max must be at least 1".into()));
        }
        let dense = match strategy {
            TraceStrategy::Dense => true,
            TraceStrategy::MatrixFree => false,
            TraceStrategy::Auto => self.n_sites <= AUTO_DENSE_TRACE_MAX.min(self.dense_cap),
        };
        let values = if dense { self.dense_traces(r_max)? } else { self.matrix_free_traces(r_max) };
        Ok(TraceSequence::from_traces(self.n_sites, values))
    }

    fn dense_traces(&self, r_max: usize) -> Result<Vec<C<T>>> {
        let q = self.materialize()?;
        let mut p = q.clone();
        let mut out = Vec::with_capacity(r_max);
        out.push(p.trace());
        for _ in 1..r_max {
            p = p.matmul(q);
            out.push(p.trace());
        }
        Ok(out)
    }

    fn matrix_free_traces(&self, r_max: usize) -> Vec<C<T>> {
        if self.n_sites > MATRIX_FREE_WARN {
            log::warn!(
                "matrix-free trace sweep at N = {} costs O(r_max * N * 4^N) = {} local updates",
                self.n_sites,
                r_max as f64 * self.n_sites as f64 * (self.dim() as f64).powi(2)
            );
        }
        let dim = self.dim();
        const CHUNK: usize = 64;
        // fixed chunking keeps the summation order deterministic
        let partials: Vec<Vec<C<T>>> = (0..dim)
            .collect::<Vec<_>>()
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut acc = vec![czero::<T>(); r_max];
                let mut v = vec![czero::<T>(); dim];
                for &j in chunk {
                    v.iter_mut().for_each(|z| *z = czero());
                    v[j] = cone();
                    for slot in acc.iter_mut() {
                        self.apply_in_place(&mut v).expect("length matches");
                        *slot += v[j];
                    }
                }
                acc
            })
            .collect();
        let mut out = vec![czero::<T>(); r_max];
        for part in partials {
            for (o, p) in out.iter_mut().zip(part) {
                *o += p;
            }
        }
        out
    }

    /// All `2^N` eigenvalues of the dense operator; cached.
    pub fn eigenvalues(&self) -> Result<&[C<T>]> {
        if let Some(ev) = self.spectrum.get() {
            return Ok(ev);
        }
        let ev = eigen::eigenvalues(self.materialize()?)?;
        Ok(self.spectrum.get_or_init(|| ev))
    }

    /// Largest eigenvalue modulus.
    pub fn spectral_radius(&self) -> Result<T> {
        Ok(self.eigenvalues()?.iter().map(|z| z.norm()).fold(T::zero(), T::max))
    }

    /// `(1/2^N) Σ_j Log(1 - u λ_j)`, the logarithm of the inverse zeta function.
    pub fn log_det_factor(&self, u: C<T>) -> Result<C<T>> {
        let ev = self.eigenvalues()?;
        let tol = T::lit(SINGULAR_TOL);
        let mut acc = czero::<T>();
        for &lam in ev {
            let f = cone::<T>() - u * lam;
            if f.norm() < tol {
                return Err(Error::SingularAtU { u: format!("{u}"), distance: f.norm().to_f64_lossy() });
            }
            acc += f.ln();
        }
        Ok(acc * pow2::<T>(-(self.n_sites as i32)))
    }

    /// `max |(Q^r - I)_{ij}|`, computed column by column without materializing.
    pub fn power_identity_deviation(&self, r: usize) -> T {
        let dim = self.dim();
        (0..dim)
            .into_par_iter()
            .map(|j| {
                let mut v = vec![czero::<T>(); dim];
                v[j] = cone();
                for _ in 0..r {
                    self.apply_in_place(&mut v).expect("length matches");
                }
                v[j] -= cone::<T>();
                v.iter().map(|z| z.norm()).fold(T::zero(), |a, b| if b > a || b.is_nan() { b } else { a })
            })
            .reduce(T::zero, |a, b| if b > a || b.is_nan() { b } else { a })
    }

    /// Whether `Q^r = I` entrywise within `tol`.
    pub fn matrix_power_equals_identity(&self, r: usize, tol: T) -> bool {
        self.power_identity_deviation(r) <= tol
    }
}

/// `I_2^{⊗ left} ⊗ m ⊗ I_2^{⊗ right}`.
pub fn embed<T: Real>(m: &CMatrix<T>, left: usize, right: usize) -> CMatrix<T> {
    CMatrix::<T>::identity(1 << left).kron(m).kron(&CMatrix::identity(1 << right))
}

/// Dense global operator assembled directly from Kronecker products; the
/// reference the matrix-free path is checked against.
pub fn kronecker_global<T: Real>(local: &LocalOperator<T>, n_sites: usize) -> CMatrix<T> {
    let dim = 1usize << n_sites;
    let mut g = CMatrix::identity(dim);
    for x in 0..n_sites.saturating_sub(1) {
        let factor = embed(local.matrix(), x, n_sites - 2 - x);
        g = factor.matmul(&g);
    }
    g
}
