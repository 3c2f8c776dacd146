//! Run manifests: plain `key = value` lines with `#` comments.
//!
//! ```text
//! # geodesics on a gentle sinusoid
//! manifold = sinusoid:a=1
//! speed = const:c=1
//! dim = 2
//! goal = 1,1
//! start = -1,-1
//! start = 0.5,-0.2
//! count = 20          # batch only: random starts in the box
//! box_lo = -1
//! box_hi = 1
//! dt = 0.1
//! seed = 7
//! ```
//!
//! `start` may repeat; every other key may appear once. Solver keys mirror
//! the fields of [`SolverConfig`].

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use geopath_core::{DescentStart, ManifoldModel, SolverConfig, SpeedModel};
use nalgebra::DVector;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: invalid value for `{key}`: {message}")]
    Value { line: usize, key: String, message: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("`{key}` has {found} components but the problem dimension is {expected}")]
    Dimension { key: String, expected: usize, found: usize },
    #[error("cannot read manifest {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

const KNOWN_KEYS: &[&str] = &[
    "manifold", "speed", "dim", "start", "goal", "horizon", "horizon_factor", "count", "box_lo", "box_hi",
    "dims", "trials", "amplitude", "out", "dt", "sigma", "tau", "tau_safety", "kappa", "max_iters", "tol",
    "stage_switch", "eta0", "sharpness0", "sharpness_step", "sharpness_max", "anneal_period", "gd_steps",
    "descent_start", "seed", "noise_std",
];

#[derive(Clone, Debug)]
struct Entry {
    line: usize,
    value: String,
}

/// Raw key/value pairs with their source line numbers.
#[derive(Clone, Debug, Default)]
pub struct RawManifest {
    entries: HashMap<String, Vec<Entry>>,
}

impl RawManifest {
    pub fn parse(text: &str) -> Result<Self, ManifestError> {
        let mut entries: HashMap<String, Vec<Entry>> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ManifestError::Syntax { line, message: format!("expected `key = value`, found `{content}`") });
            };
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(ManifestError::Syntax { line, message: format!("unknown key `{key}`") });
            }
            let slot = entries.entry(key.clone()).or_default();
            if !slot.is_empty() && key != "start" {
                return Err(ManifestError::Syntax { line, message: format!("duplicate key `{key}`") });
            }
            slot.push(Entry { line, value: value.trim().to_string() });
        }
        Ok(RawManifest { entries })
    }

    pub fn read(path: &Path) -> Result<Self, ManifestError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ManifestError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), vec![Entry { line: 0, value: value.to_string() }]);
    }

    fn first(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key).and_then(|v| v.first())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ManifestError>
    where
        T::Err: std::fmt::Display,
    {
        match self.first(key) {
            None => Ok(None),
            Some(e) => e.value.parse::<T>().map(Some).map_err(|err| ManifestError::Value {
                line: e.line,
                key: key.to_string(),
                message: err.to_string(),
            }),
        }
    }

    fn vectors(&self, key: &str) -> Result<Vec<(usize, Vec<f64>)>, ManifestError> {
        let Some(list) = self.entries.get(key) else {
            return Ok(Vec::new());
        };
        list.iter()
            .map(|e| {
                parse_floats(&e.value).map(|v| (e.line, v)).map_err(|message| ManifestError::Value {
                    line: e.line,
                    key: key.to_string(),
                    message,
                })
            })
            .collect()
    }
}

pub fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("`{}` is not a number", t.trim())))
        .collect()
}

/// A validated manifest.
#[derive(Clone, Debug)]
pub struct RunManifest {
    pub dim: usize,
    pub manifold: ManifoldModel,
    pub manifold_text: String,
    pub speed: SpeedModel,
    pub goal: Option<DVector<f64>>,
    pub starts: Vec<DVector<f64>>,
    pub horizon: Option<f64>,
    pub horizon_factor: f64,
    pub count: Option<usize>,
    pub box_lo: Option<DVector<f64>>,
    pub box_hi: Option<DVector<f64>>,
    pub dims: Option<Vec<usize>>,
    pub trials: Option<usize>,
    pub amplitude: Option<f64>,
    pub out: Option<PathBuf>,
    pub config: SolverConfig,
}

impl RunManifest {
    pub fn from_raw(raw: &RawManifest) -> Result<Self, ManifestError> {
        let goal_raw = raw.vectors("goal")?;
        let start_raw = raw.vectors("start")?;
        let dim = match raw.get::<usize>("dim")? {
            Some(d) => d,
            None => goal_raw
                .first()
                .or(start_raw.first())
                .map(|(_, v)| v.len())
                .unwrap_or(2),
        };
        if dim == 0 {
            return Err(value_err(raw, "dim", "dimension must be positive"));
        }
        let manifold_text = raw.first("manifold").map(|e| e.value.clone()).unwrap_or_else(|| "flat".into());
        let manifold = ManifoldModel::parse(&manifold_text, dim)
            .map_err(|e| value_err(raw, "manifold", &e.to_string()))?;
        let speed = match raw.first("speed") {
            Some(e) => SpeedModel::parse(&e.value).map_err(|err| value_err(raw, "speed", &err.to_string()))?,
            None => SpeedModel::unit(),
        };

        let check = |key: &str, v: Vec<f64>| -> Result<DVector<f64>, ManifestError> {
            if v.len() != dim {
                return Err(ManifestError::Dimension { key: key.to_string(), expected: dim, found: v.len() });
            }
            Ok(DVector::from_vec(v))
        };
        let goal = goal_raw.into_iter().next().map(|(_, v)| check("goal", v)).transpose()?;
        let starts = start_raw.into_iter().map(|(_, v)| check("start", v)).collect::<Result<Vec<_>, _>>()?;
        let bound = |key: &str| -> Result<Option<DVector<f64>>, ManifestError> {
            match raw.vectors(key)?.into_iter().next() {
                None => Ok(None),
                Some((_, v)) if v.len() == 1 => Ok(Some(DVector::from_element(dim, v[0]))),
                Some((_, v)) => check(key, v).map(Some),
            }
        };
        let box_lo = bound("box_lo")?;
        let box_hi = bound("box_hi")?;
        if let (Some(lo), Some(hi)) = (&box_lo, &box_hi) {
            if lo.iter().zip(hi.iter()).any(|(a, b)| !(a < b)) {
                return Err(value_err(raw, "box_hi", "every upper bound must exceed the lower bound"));
            }
        }

        let horizon = raw.get::<f64>("horizon")?;
        if let Some(h) = horizon {
            if !(h > 0.0 && h.is_finite()) {
                return Err(value_err(raw, "horizon", "horizon must be positive"));
            }
        }
        let horizon_factor = raw.get::<f64>("horizon_factor")?.unwrap_or(geopath_core::solver::DEFAULT_HORIZON_FACTOR);
        if !(horizon_factor > 0.0) {
            return Err(value_err(raw, "horizon_factor", "factor must be positive"));
        }
        let count = raw.get::<usize>("count")?;
        if count == Some(0) {
            return Err(value_err(raw, "count", "count must be at least 1"));
        }
        let dims = match raw.first("dims") {
            None => None,
            Some(e) => Some(parse_dims(&e.value).map_err(|m| value_err(raw, "dims", &m))?),
        };

        let mut config = SolverConfig::default();
        macro_rules! field {
            ($key:literal, $field:ident) => {
                if let Some(v) = raw.get($key)? {
                    config.$field = v;
                }
            };
        }
        field!("dt", dt);
        field!("sigma", sigma);
        field!("tau_safety", tau_safety);
        field!("kappa", kappa);
        field!("max_iters", max_iters);
        field!("tol", tol);
        field!("stage_switch", stage_switch);
        field!("eta0", eta0);
        field!("sharpness0", sharpness0);
        field!("sharpness_step", sharpness_step);
        field!("sharpness_max", sharpness_max);
        field!("anneal_period", anneal_period);
        field!("gd_steps", gd_steps);
        field!("seed", seed);
        field!("noise_std", noise_std);
        config.tau = raw.get::<f64>("tau")?;
        if let Some(e) = raw.first("descent_start") {
            config.descent_start = match e.value.as_str() {
                "previous" => DescentStart::Previous,
                "nu" => DescentStart::Nu,
                _ => return Err(value_err(raw, "descent_start", "expected `previous` or `nu`")),
            };
        }
        config.validate().map_err(|e| ManifestError::Value {
            line: 0,
            key: "solver".into(),
            message: e.to_string(),
        })?;

        Ok(RunManifest {
            dim,
            manifold,
            manifold_text,
            speed,
            goal,
            starts,
            horizon,
            horizon_factor,
            count,
            box_lo,
            box_hi,
            dims,
            trials: raw.get::<usize>("trials")?,
            amplitude: raw.get::<f64>("amplitude")?,
            out: raw.first("out").map(|e| PathBuf::from(&e.value)),
            config,
        })
    }

    pub fn require_goal(&self) -> Result<&DVector<f64>, ManifestError> {
        self.goal.as_ref().ok_or(ManifestError::Missing("goal"))
    }
}

fn value_err(raw: &RawManifest, key: &str, message: &str) -> ManifestError {
    ManifestError::Value {
        line: raw.first(key).map(|e| e.line).unwrap_or(0),
        key: key.to_string(),
        message: message.to_string(),
    }
}

/// Parses `10,15,20` or an inclusive range `10..30` (optionally `10..30:5`).
pub fn parse_dims(s: &str) -> Result<Vec<usize>, String> {
    let s = s.trim();
    if let Some((lo, rest)) = s.split_once("..") {
        let (hi, step) = match rest.split_once(':') {
            Some((h, st)) => (h, st.trim().parse::<usize>().map_err(|_| format!("bad step `{st}`"))?),
            None => (rest, 1),
        };
        let lo = lo.trim().parse::<usize>().map_err(|_| format!("bad range start `{lo}`"))?;
        let hi = hi.trim().parse::<usize>().map_err(|_| format!("bad range end `{hi}`"))?;
        if lo == 0 || hi < lo || step == 0 {
            return Err(format!("empty or invalid range `{s}`"));
        }
        return Ok((lo..=hi).step_by(step).collect());
    }
    let dims = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("`{}` is not a dimension", t.trim())))
        .collect::<Result<Vec<_>, _>>()?;
    if dims.is_empty() || dims.contains(&0) {
        return Err("dimensions must be positive".into());
    }
    Ok(dims)
}
