//! Run configuration: command-line flags layered over an optional JSON file.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use ips_zeta::models::ModelSpec;
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::parse::{parse_complex, parse_complex_list, parse_sites, SiteRange};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Flags shared by every subcommand, all optional so the file can fill gaps.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct GlobalArgs {
    /// Model name: dk, gdk, qca1, qca2, tensor, custom, rule90 or identity
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Comma-separated model parameters; angles as radians or `pi/6` style
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub params: Option<String>,
    /// Comma-separated complex entries `re+imj`, row-major: 16 for custom,
    /// 8 for tensor (left then right factor)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub matrix: Option<String>,
    /// Number of sites, or an inclusive range `lo..hi` for verify
    #[arg(long, global = true)]
    pub n: Option<String>,
    /// Highest power r in trace sequences and series
    #[arg(long, global = true)]
    pub rmax: Option<usize>,
    /// Comma-separated evaluation points `re+imj`, e.g. `0.1,0.3,0.4j`
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub u: Option<String>,
    /// Tolerance override (classification for validate, verdict for verify)
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output format; each command has its own default
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON file with any of the fields above; flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    model: Option<Value>,
    params: Option<Value>,
    matrix: Option<Value>,
    n: Option<Value>,
    rmax: Option<usize>,
    u: Option<Value>,
    tol: Option<f64>,
    format: Option<Format>,
    out: Option<PathBuf>,
}

/// Fully merged configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: Option<ModelSpec<f64>>,
    pub sites: Option<SiteRange>,
    pub r_max: Option<usize>,
    pub u_points: Option<Vec<Complex64>>,
    pub tol: Option<f64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(args: &GlobalArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let model = resolve_model(args, &file)?;
        let sites = match (&args.n, &file.n) {
            (Some(s), _) => Some(parse_sites(s).map_err(CliError::invalid)?),
            (None, Some(Value::Number(k))) => {
                let k = k.as_u64().ok_or_else(|| CliError::invalid("'n' must be a positive integer"))? as usize;
                Some(parse_sites(&k.to_string()).map_err(CliError::invalid)?)
            }
            (None, Some(Value::String(s))) => Some(parse_sites(s).map_err(CliError::invalid)?),
            (None, Some(_)) => return Err(CliError::invalid("'n' must be an integer or a 'lo..hi' string")),
            (None, None) => None,
        };
        let u_points = match (&args.u, &file.u) {
            (Some(s), _) => Some(parse_complex_list(s).map_err(CliError::invalid)?),
            (None, Some(v)) => Some(complex_values(v)?),
            (None, None) => None,
        };
        if args.rmax == Some(0) || file.rmax == Some(0) {
            return Err(CliError::invalid("rmax must be at least 1"));
        }
        Ok(Self {
            model,
            sites,
            r_max: args.rmax.or(file.rmax),
            u_points,
            tol: args.tol.or(file.tol),
            format: args.format.or(file.format),
            out: args.out.clone().or(file.out),
        })
    }

    pub fn require_model(&self) -> Result<&ModelSpec<f64>, CliError> {
        self.model.as_ref().ok_or_else(|| CliError::invalid("a model is required (--model or config file)"))
    }

    /// A single site count, required by everything except verify.
    pub fn require_single_n(&self) -> Result<usize, CliError> {
        let r = self.sites.ok_or_else(|| CliError::invalid("the number of sites is required (--n)"))?;
        r.single().ok_or_else(|| CliError::invalid("a single site count is expected here, not a range"))
    }
}

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("cannot read config file {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("bad config file {}: {e}", path.display())))
}

/// `[re, im]` pairs, numbers or `re+imj` strings; a single string is split on commas.
fn complex_values(v: &Value) -> Result<Vec<Complex64>, CliError> {
    let one = |x: &Value| -> Result<Complex64, CliError> {
        match x {
            Value::Number(n) => Ok(Complex64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
            Value::String(s) => parse_complex(s).map_err(CliError::invalid),
            Value::Array(a) if a.len() == 2 => match (a[0].as_f64(), a[1].as_f64()) {
                (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                _ => Err(CliError::invalid(format!("complex pair must be two numbers, got {x}"))),
            },
            _ => Err(CliError::invalid(format!("cannot read complex number from {x}"))),
        }
    };
    match v {
        Value::String(s) => parse_complex_list(s).map_err(CliError::invalid),
        Value::Array(items) => items.iter().map(one).collect(),
        other => Err(CliError::invalid(format!("expected a list of complex numbers, got {other}"))),
    }
}

fn param_values(v: &Value) -> Result<Vec<Value>, CliError> {
    match v {
        Value::String(s) => Ok(split_params(s)),
        Value::Array(a) => Ok(a.clone()),
        other => Err(CliError::invalid(format!("'params' must be a list or a string, got {other}"))),
    }
}

fn split_params(s: &str) -> Vec<Value> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<f64>() {
            Ok(x) => json!(x),
            Err(_) => json!(t),
        })
        .collect()
}

fn resolve_model(args: &GlobalArgs, file: &FileConfig) -> Result<Option<ModelSpec<f64>>, CliError> {
    // a full model object in the file is used as is unless a flag names the model
    let (name, file_params) = match (&args.model, &file.model) {
        (Some(n), _) => (n.clone(), file.params.clone()),
        (None, Some(Value::Object(_))) if args.params.is_none() && args.matrix.is_none() => {
            let spec = ModelSpec::from_json_value(file.model.as_ref().expect("checked")).map_err(CliError::from)?;
            return Ok(Some(spec));
        }
        (None, Some(Value::Object(o))) => {
            let n = o.get("model").and_then(Value::as_str).unwrap_or_default().to_string();
            (n, o.get("params").cloned())
        }
        (None, Some(Value::String(n))) => (n.clone(), file.params.clone()),
        (None, Some(other)) => return Err(CliError::invalid(format!("'model' must be a name or an object, got {other}"))),
        (None, None) => return Ok(None),
    };
    let name = name.to_ascii_lowercase();
    let params = match (&args.params, &file_params) {
        (Some(s), _) => split_params(s),
        (None, Some(v)) => param_values(v)?,
        (None, None) => Vec::new(),
    };
    let matrix = match (&args.matrix, &file.matrix) {
        (Some(s), _) => Some(parse_complex_list(s).map_err(CliError::invalid)?),
        (None, Some(v)) => Some(complex_values(v)?),
        (None, None) => None,
    };
    let pairs = |m: &[Complex64]| -> Value { json!(m.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()) };
    let value = match name.as_str() {
        "rule90" => json!({"model": "qca2", "params": [0.0, 0.0]}),
        "identity" | "trivial" => {
            let id: Vec<Complex64> = (0..16).map(|k| Complex64::new(if k % 5 == 0 { 1.0 } else { 0.0 }, 0.0)).collect();
            json!({"model": "custom", "params": [pairs(&id)]})
        }
        "custom" | "tensor" if matrix.is_some() || params.is_empty() => {
            let m = matrix.ok_or_else(|| CliError::invalid(format!("model '{name}' needs --matrix")))?;
            let want = if name == "custom" { 16 } else { 8 };
            if m.len() != want {
                return Err(CliError::invalid(format!("model '{name}' needs {want} matrix entries, got {}", m.len())));
            }
            if name == "custom" {
                json!({"model": "custom", "params": [pairs(&m)]})
            } else {
                json!({"model": "tensor", "params": [pairs(&m[..4]), pairs(&m[4..])]})
            }
        }
        _ => json!({"model": name, "params": params}),
    };
    ModelSpec::from_json_value(&value).map(Some).map_err(CliError::from)
}
