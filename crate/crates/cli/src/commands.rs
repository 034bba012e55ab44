use clap::ValueEnum;
use ips_zeta::config::{CLASSIFY_TOL, SERIES_ORDER};
use ips_zeta::dynamics::{marginals_csv, state_json, trajectory, StateKind};
use ips_zeta::models::{build_local, classify, is_column_stochastic, is_unitary};
use ips_zeta::operator::{Configuration, GlobalOperator};
use ips_zeta::verify::{run_all, run_formula, FormulaId, VerifyOptions};
use ips_zeta::zeta::{zeta_log_series, ClosedFormReport};
use serde_json::{json, Value};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, EXIT_VERIFY_FAILED};
use crate::parse::format_complex;

/// Rendered output plus the exit code it implies.
pub struct Output {
    pub text: String,
    pub code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn pair(z: num_complex::Complex64) -> Value {
    json!([z.re, z.im])
}

fn operator(cfg: &RunConfig) -> Result<GlobalOperator<f64>, CliError> {
    let local = build_local(cfg.require_model()?)?;
    Ok(GlobalOperator::new(local, cfg.require_single_n()?)?)
}

pub fn validate(cfg: &RunConfig) -> Result<Output, CliError> {
    let spec = cfg.require_model()?;
    let local = build_local(spec)?;
    let tol = cfg.tol.unwrap_or(CLASSIFY_TOL);
    let report = classify(&local, tol).report();
    let mut v = serde_json::to_value(&report).expect("report serializes");
    v["model"] = spec.to_json_value();
    v["local_operator"] = json!(local.matrix().to_pairs().data);
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => Ok(Output::ok(pretty(&v))),
        Format::Csv => {
            let mut s = String::from("property,value\n");
            for key in ["is_pca", "is_qca", "is_ca", "tensor_factorizable"] {
                s.push_str(&format!("{key},{}\n", v[key]));
            }
            Ok(Output::ok(s))
        }
    }
}

pub fn zeta(cfg: &RunConfig) -> Result<Output, CliError> {
    let g = operator(cfg)?;
    let r_max = cfg.r_max.unwrap_or(SERIES_ORDER);
    let traces = g.trace_powers(r_max)?;
    let series = zeta_log_series(&g, r_max)?;
    let points = cfg.u_points.clone().unwrap_or_default();

    let mut evaluations = Vec::new();
    let mut eigen_note = None;
    for &u in &points {
        let s = series.evaluate(u);
        let (e, diff) = match g.log_det_factor(u) {
            Ok(e) => (Some(e), Some((s - e).norm())),
            Err(err @ ips_zeta::Error::SizeExceeded { .. }) => {
                eigen_note = Some(err.to_string());
                (None, None)
            }
            Err(err) => return Err(err.into()),
        };
        evaluations.push((u, s, e, diff));
    }

    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("r,trace_re,c_r_re,coeff_re,trace_im,c_r_im,coeff_im\n");
            for r in 1..=r_max {
                let (t, cr, a) = (traces.trace(r), traces.c(r), series.coefficient(r));
                s.push_str(&format!("{r},{:e},{:e},{:e},{:e},{:e},{:e}\n", t.re, cr.re, a.re, t.im, cr.im, a.im));
            }
            if !evaluations.is_empty() {
                s.push_str("\nu,series_re,series_im,eigen_re,eigen_im,abs_diff\n");
                for (u, sv, e, d) in &evaluations {
                    let cell = |x: Option<f64>| x.map_or_else(|| "nan".to_string(), |x| format!("{x:e}"));
                    s.push_str(&format!(
                        "{},{:e},{:e},{},{},{}\n",
                        format_complex(*u),
                        sv.re,
                        sv.im,
                        cell(e.map(|z| z.re)),
                        cell(e.map(|z| z.im)),
                        cell(*d)
                    ));
                }
            }
            Ok(Output::ok(s))
        }
        Format::Json => {
            let rows: Vec<Value> = (1..=r_max)
                .map(|r| {
                    json!({"r": r, "trace": pair(traces.trace(r)), "c_r": pair(traces.c(r)), "coeff": pair(series.coefficient(r))})
                })
                .collect();
            let evals: Vec<Value> = evaluations
                .iter()
                .map(|(u, s, e, d)| json!({"u": pair(*u), "series": pair(*s), "eigen": e.map(pair), "abs_diff": d}))
                .collect();
            let mut v = json!({
                "model": cfg.require_model()?.to_json_value(),
                "n_sites": g.n_sites(),
                "r_max": r_max,
                "traces": rows,
                "evaluations": evals,
            });
            if let Some(note) = eigen_note {
                v["note"] = json!(note);
            }
            Ok(Output::ok(pretty(&v)))
        }
    }
}

pub fn spectrum(cfg: &RunConfig) -> Result<Output, CliError> {
    let g = operator(cfg)?;
    let ev = g.eigenvalues()?;
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("idx,re,im,abs\n");
            for (k, z) in ev.iter().enumerate() {
                s.push_str(&format!("{k},{:e},{:e},{:e}\n", z.re, z.im, z.norm()));
            }
            Ok(Output::ok(s))
        }
        Format::Json => {
            let v = json!({
                "n_sites": g.n_sites(),
                "spectral_radius": g.spectral_radius()?,
                "eigenvalues": ev.iter().map(|&z| pair(z)).collect::<Vec<_>>(),
            });
            Ok(Output::ok(pretty(&v)))
        }
    }
}

fn report_rows(reports: &[ClosedFormReport]) -> String {
    let mut s = String::from("formula_id,label,max_abs_error,tolerance,passed\n");
    for r in reports {
        s.push_str(&format!("{},{},{:e},{:e},{}\n", r.formula_id, r.label, r.max_abs_error, r.tolerance, r.passed));
    }
    s
}

pub fn verify(cfg: &RunConfig, formula: &str) -> Result<Output, CliError> {
    let opts = VerifyOptions {
        n_min: cfg.sites.map(|s| s.lo),
        n_max: cfg.sites.map(|s| s.hi),
        r_max: cfg.r_max,
        u_samples: cfg.u_points.clone(),
        tolerance: cfg.tol,
        ..Default::default()
    };
    let reports = if formula.eq_ignore_ascii_case("all") {
        run_all(&opts)?
    } else {
        vec![run_formula(formula.parse::<FormulaId>()?, &opts)?]
    };
    let code = if reports.iter().all(|r| r.passed) { 0 } else { EXIT_VERIFY_FAILED };
    let text = match cfg.format.unwrap_or(Format::Json) {
        Format::Csv => report_rows(&reports),
        Format::Json if reports.len() == 1 => pretty(&serde_json::to_value(&reports[0]).expect("serializes")),
        Format::Json => pretty(&serde_json::to_value(&reports).expect("serializes")),
    };
    Ok(Output { text, code })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Pca,
    Qca,
}

pub struct EvolveArgs<'a> {
    pub init: &'a str,
    pub steps: usize,
    pub kind: Option<KindArg>,
    pub full: bool,
}

pub fn evolve(cfg: &RunConfig, args: &EvolveArgs<'_>) -> Result<Output, CliError> {
    let g = operator(cfg)?;
    let start = Configuration::parse(args.init)?;
    let kind = match args.kind {
        Some(KindArg::Pca) => StateKind::PcaProbability,
        Some(KindArg::Qca) => StateKind::QcaAmplitude,
        None => {
            let m = g.local().matrix();
            if is_column_stochastic(m, CLASSIFY_TOL) {
                StateKind::PcaProbability
            } else if is_unitary(m, CLASSIFY_TOL) {
                StateKind::QcaAmplitude
            } else {
                return Err(CliError::invalid("model is neither a PCA nor a QCA; nothing to evolve"));
            }
        }
    };
    let states = trajectory(&ips_zeta::dynamics::initial_state(&start, kind), &g, args.steps)?;
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => Ok(Output::ok(marginals_csv(&states))),
        Format::Json => {
            let steps: Vec<Value> = states
                .iter()
                .map(|s| {
                    let mut v = json!({"step": s.time_step(), "marginals": s.site_marginals()});
                    if args.full {
                        v["state"] = state_json(s);
                    }
                    v
                })
                .collect();
            let v = json!({"n_sites": g.n_sites(), "kind": kind, "initial": args.init, "trajectory": steps});
            Ok(Output::ok(pretty(&v)))
        }
    }
}
