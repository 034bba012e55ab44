//! Exact time evolution `η_n = Q^n η_0` of probability (PCA) or amplitude
//! (QCA) vectors, with configuration probabilities and site marginals.

use serde::{Deserialize, Serialize};

use crate::config::{CLASSIFY_TOL, DRIFT_TOL};
use crate::error::{Error, Result};
use crate::models::{is_column_stochastic, is_unitary};
use crate::operator::{Configuration, GlobalOperator};
use crate::scalar::{cone, czero, Real, C};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    PcaProbability,
    QcaAmplitude,
}

/// Snapshot of the state vector at a given time step.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    n_sites: usize,
    kind: StateKind,
    components: Vec<C<T>>,
    time_step: usize,
}

impl<T: Real> StateVector<T> {
    /// Wraps raw components after checking the kind's normalization.
    pub fn new(n_sites: usize, kind: StateKind, components: Vec<C<T>>) -> Result<Self> {
        if components.len() != 1usize << n_sites {
            return Err(Error::DimensionMismatch { expected: 1 << n_sites, actual: components.len() });
        }
        let s = Self { n_sites, kind, components, time_step: 0 };
        s.check(T::lit(DRIFT_TOL))?;
        Ok(s)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn components(&self) -> &[C<T>] {
        &self.components
    }

    pub fn time_step(&self) -> usize {
        self.time_step
    }

    /// Normalization error: `|Σ p - 1|` (PCA) or `|‖ψ‖ - 1|` (QCA).
    pub fn normalization_error(&self) -> T {
        match self.kind {
            StateKind::PcaProbability => {
                let sum = self.components.iter().fold(czero::<T>(), |a, &b| a + b);
                (sum - cone::<T>()).norm()
            }
            StateKind::QcaAmplitude => {
                let n2: T = self.components.iter().map(|z| z.norm_sqr()).sum();
                (n2.sqrt() - T::one()).abs()
            }
        }
    }

    fn check(&self, threshold: T) -> Result<()> {
        let err = self.normalization_error();
        if !(err <= threshold) {
            return Err(Error::InvariantDrift {
                what: "normalization".into(),
                error: err.to_f64_lossy(),
                threshold: threshold.to_f64_lossy(),
            });
        }
        if self.kind == StateKind::PcaProbability {
            let worst = self
                .components
                .iter()
                .map(|z| z.im.abs().max(-z.re))
                .fold(T::zero(), T::max);
            if worst > threshold {
                return Err(Error::InvariantDrift {
                    what: "probability sign or reality".into(),
                    error: worst.to_f64_lossy(),
                    threshold: threshold.to_f64_lossy(),
                });
            }
        }
        Ok(())
    }

    /// Probability of observing `config`.
    pub fn configuration_probability(&self, config: &Configuration) -> Result<T> {
        if config.n_sites() != self.n_sites {
            return Err(Error::DimensionMismatch { expected: self.n_sites, actual: config.n_sites() });
        }
        Ok(self.probability_at(config.index()))
    }

    fn probability_at(&self, index: usize) -> T {
        let z = self.components[index];
        match self.kind {
            StateKind::PcaProbability => z.re,
            StateKind::QcaAmplitude => z.norm_sqr(),
        }
    }

    /// `P(η(x) = 1)` for every site `x`.
    pub fn site_marginals(&self) -> Vec<T> {
        let n = self.n_sites;
        let mut out = vec![T::zero(); n];
        for idx in 0..self.components.len() {
            let p = self.probability_at(idx);
            for (x, slot) in out.iter_mut().enumerate() {
                if (idx >> (n - 1 - x)) & 1 == 1 {
                    *slot += p;
                }
            }
        }
        out
    }
}

/// Basis state at a configuration, time step 0.
pub fn initial_state<T: Real>(config: &Configuration, kind: StateKind) -> StateVector<T> {
    let n = config.n_sites();
    let mut components = vec![czero::<T>(); 1 << n];
    components[config.index()] = cone();
    StateVector { n_sites: n, kind, components, time_step: 0 }
}

fn check_kind<T: Real>(kind: StateKind, op: &GlobalOperator<T>) -> Result<()> {
    let tol = T::lit(CLASSIFY_TOL);
    let m = op.local().matrix();
    match kind {
        StateKind::PcaProbability if !is_column_stochastic(m, tol) => {
            Err(Error::KindMismatch("probability evolution needs a column-stochastic local operator".into()))
        }
        StateKind::QcaAmplitude if !is_unitary(m, tol) => {
            Err(Error::KindMismatch("amplitude evolution needs a unitary local operator".into()))
        }
        _ => Ok(()),
    }
}

/// Applies the global operator `steps` times, re-checking normalization
/// after every step. Drift beyond `1e-8` is an error, never renormalized.
pub fn evolve<T: Real>(state: &StateVector<T>, op: &GlobalOperator<T>, steps: usize) -> Result<StateVector<T>> {
    Ok(trajectory(state, op, steps)?.pop().expect("trajectory includes the start"))
}

/// States at times `t, t+1, ..., t+steps`.
pub fn trajectory<T: Real>(state: &StateVector<T>, op: &GlobalOperator<T>, steps: usize) -> Result<Vec<StateVector<T>>> {
    if op.n_sites() != state.n_sites {
        return Err(Error::DimensionMismatch { expected: state.n_sites, actual: op.n_sites() });
    }
    check_kind(state.kind, op)?;
    let threshold = T::lit(DRIFT_TOL);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(state.clone());
    let mut cur = state.clone();
    for _ in 0..steps {
        op.apply_in_place(&mut cur.components)?;
        cur.time_step += 1;
        cur.check(threshold)?;
        out.push(cur.clone());
    }
    Ok(out)
}

/// CSV `step,site_0,...,site_{N-1}` of marginals along a trajectory.
pub fn marginals_csv<T: Real>(states: &[StateVector<T>]) -> String {
    let n = states.first().map_or(0, |s| s.n_sites);
    let mut s = String::from("step");
    for x in 0..n {
        s.push_str(&format!(",site_{x}"));
    }
    s.push('\n');
    for st in states {
        s.push_str(&st.time_step.to_string());
        for m in st.site_marginals() {
            s.push_str(&format!(",{m}"));
        }
        s.push('\n');
    }
    s
}

/// JSON dump of a state: `{"n_sites", "kind", "time_step", "components": [[re, im], ...]}`.
pub fn state_json<T: Real>(state: &StateVector<T>) -> serde_json::Value {
    serde_json::json!({
        "n_sites": state.n_sites,
        "kind": state.kind,
        "time_step": state.time_step,
        "components": state.components.iter().map(|z| [z.re.to_f64_lossy(), z.im.to_f64_lossy()]).collect::<Vec<_>>(),
    })
}
