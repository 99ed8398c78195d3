//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # reference design
//! u = 10
//! c = 15
//! sigma = 2
//! lambda = 5
//! mu = 0.5
//! r = 0.2
//! T = 100
//! h_list = 1, 0.1, 0.01
//! alpha_list = 10, 100, 1000
//! B = 100
//! grid = 10, 20, 0.05      # lo, hi[, step]
//! master_seed = 1
//! output_dir = out
//! ```
//!
//! Required: `u c sigma lambda mu r T h_list alpha_list`. Defaults: `B = 100`,
//! `grid = u, u + 10, 0.05`, `master_seed = 1`, `output_dir = out`,
//! `refine = false`, `value_curves = 5`. `#` starts a comment.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::estimator::{BarrierGrid, DEFAULT_GRID_STEP};
use crate::model::{validate_params, ModelParams, RawParams, SamplingScheme};

pub const DEFAULT_REPLICATIONS: usize = 100;
pub const DEFAULT_GRID_WIDTH: f64 = 10.0;
pub const DEFAULT_MASTER_SEED: u64 = 1;
pub const DEFAULT_VALUE_CURVES: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelParams,
    pub r: f64,
    pub horizon: f64,
    pub h_list: Vec<f64>,
    pub alpha_list: Vec<usize>,
    pub replications: usize,
    pub grid: BarrierGrid,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    /// Breakpoint refinement of each estimate.
    pub refine: bool,
    /// Number of per-permutation curves in the value-curve figure.
    pub value_curves: usize,
}

const KEYS: &[&str] = &[
    "u",
    "c",
    "sigma",
    "lambda",
    "mu",
    "r",
    "T",
    "h_list",
    "alpha_list",
    "B",
    "grid",
    "master_seed",
    "output_dir",
    "refine",
    "value_curves",
];

struct Entries(BTreeMap<String, (usize, String)>);

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: Some(line_no),
                field: line.to_string(),
                message: "expected `key = value`".into(),
            })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(Error::Parse {
                    line: Some(line_no),
                    field: key.to_string(),
                    message: "unknown key".into(),
                });
            }
            if map
                .insert(key.to_string(), (line_no, value.trim().to_string()))
                .is_some()
            {
                return Err(Error::Parse {
                    line: Some(line_no),
                    field: key.to_string(),
                    message: "duplicate key".into(),
                });
            }
        }
        Ok(Self(map))
    }

    fn raw(&self, key: &str) -> Option<&(usize, String)> {
        self.0.get(key)
    }

    fn required(&self, key: &str) -> Result<&(usize, String)> {
        self.raw(key).ok_or_else(|| Error::Parse {
            line: None,
            field: key.to_string(),
            message: "missing required key".into(),
        })
    }

    fn value<T: std::str::FromStr>(line: usize, key: &str, text: &str) -> Result<T> {
        text.trim().parse().map_err(|_| Error::Parse {
            line: Some(line),
            field: key.to_string(),
            message: format!("cannot parse {text:?}"),
        })
    }

    fn list<T: std::str::FromStr>(line: usize, key: &str, text: &str) -> Result<Vec<T>> {
        let items: Vec<T> = text
            .split(',')
            .map(|item| Self::value(line, key, item))
            .collect::<Result<_>>()?;
        Ok(items)
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let (line, text) = self.required(key)?;
        Self::value(*line, key, text)
    }

    fn get_or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.raw(key) {
            Some((line, text)) => Self::value(*line, key, text),
            None => Ok(default),
        }
    }

    fn get_list<T: std::str::FromStr>(&self, key: &str) -> Result<Vec<T>> {
        let (line, text) = self.required(key)?;
        Self::list(*line, key, text)
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let e = Entries::parse(text)?;
    let raw = RawParams {
        u: e.get("u")?,
        c: e.get("c")?,
        sigma: e.get("sigma")?,
        lambda: e.get("lambda")?,
        mu: e.get("mu")?,
    };
    let r: f64 = e.get("r")?;
    let horizon: f64 = e.get("T")?;
    let h_list: Vec<f64> = e.get_list("h_list")?;
    let alpha_list: Vec<usize> = e.get_list("alpha_list")?;
    let replications = e.get_or("B", DEFAULT_REPLICATIONS)?;
    let master_seed = e.get_or("master_seed", DEFAULT_MASTER_SEED)?;
    let output_dir: String = e.get_or("output_dir", "out".to_string())?;
    let refine = e.get_or("refine", false)?;
    let value_curves = e.get_or("value_curves", DEFAULT_VALUE_CURVES)?;

    let grid = match e.raw("grid") {
        Some((line, text)) => {
            let parts: Vec<f64> = Entries::list(*line, "grid", text)?;
            match parts.as_slice() {
                [lo, hi] => (*lo, *hi, DEFAULT_GRID_STEP),
                [lo, hi, step] => (*lo, *hi, *step),
                _ => {
                    return Err(Error::Parse {
                        line: Some(*line),
                        field: "grid".into(),
                        message: "expected `lo, hi` or `lo, hi, step`".into(),
                    })
                }
            }
        }
        None => (raw.u, raw.u + DEFAULT_GRID_WIDTH, DEFAULT_GRID_STEP),
    };

    let model = validate_params(raw).map_err(|err| Error::Validation(err.to_string()))?;
    let grid = BarrierGrid::new(grid.0, grid.1, grid.2)
        .map_err(|err| Error::Validation(err.to_string()))?;
    ExperimentConfig {
        model,
        r,
        horizon,
        h_list,
        alpha_list,
        replications,
        grid,
        master_seed,
        output_dir: PathBuf::from(output_dir),
        refine,
        value_curves,
    }
    .validated()
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        parse_config(&std::fs::read_to_string(path)?)
    }

    /// The reference design with the default grid `[10, 20]`.
    pub fn reference() -> Self {
        let model = ModelParams::reference();
        Self {
            model,
            r: 0.2,
            horizon: 100.0,
            h_list: vec![1.0, 0.1, 0.01],
            alpha_list: vec![10, 100, 1000],
            replications: DEFAULT_REPLICATIONS,
            grid: BarrierGrid::new(model.u(), model.u() + DEFAULT_GRID_WIDTH, DEFAULT_GRID_STEP)
                .expect("valid default grid"),
            master_seed: DEFAULT_MASTER_SEED,
            output_dir: PathBuf::from("out"),
            refine: false,
            value_curves: DEFAULT_VALUE_CURVES,
        }
    }

    /// Checks the cross-field invariants.
    pub fn validated(self) -> Result<Self> {
        if !(self.r.is_finite() && self.r > 0.0) {
            return Err(Error::Validation(format!("r must be positive, got {}", self.r)));
        }
        if self.h_list.is_empty() || self.alpha_list.is_empty() {
            return Err(Error::Validation("h_list and alpha_list must be non-empty".into()));
        }
        for &h in &self.h_list {
            SamplingScheme::from_horizon(self.horizon, h)
                .map_err(|err| Error::Validation(format!("h = {h}: {err}")))?;
        }
        if self.alpha_list.contains(&0) {
            return Err(Error::Validation("alpha values must be >= 1".into()));
        }
        if self.replications == 0 {
            return Err(Error::Validation("B must be >= 1".into()));
        }
        if self.grid.lo() < self.model.u() {
            return Err(Error::Validation(format!(
                "grid starts at {}, below u = {}",
                self.grid.lo(),
                self.model.u()
            )));
        }
        Ok(self)
    }

    pub fn scheme(&self, h: f64) -> SamplingScheme {
        SamplingScheme::from_horizon(self.horizon, h).expect("validated horizon")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE: &str = "u=10\nc=15\nsigma=2\nlambda=5\nmu=0.5\nr=0.2\nT=100\n\
                             h_list=1,0.1,0.01\nalpha_list=10,100,1000\nB=100\n";

    #[test]
    fn reference_config_parses() {
        let cfg = parse_config(REFERENCE).unwrap();
        assert_eq!(cfg, ExperimentConfig::reference());
        assert_eq!(cfg.grid.points().len(), 201);
    }

    #[test]
    fn comments_spacing_and_overrides() {
        let text = format!(
            "# header\n{REFERENCE}grid = 10, 15   # coarse\nmaster_seed = 42\nrefine = true\noutput_dir = /tmp/x\n"
        );
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.grid, BarrierGrid::new(10.0, 15.0, 0.05).unwrap());
        assert_eq!(cfg.master_seed, 42);
        assert!(cfg.refine);
        assert_eq!(cfg.output_dir, PathBuf::from("/tmp/x"));
    }

    #[test]
    fn non_integral_step_count_is_a_validation_error() {
        let text = REFERENCE.replace("h_list=1,0.1,0.01", "h_list=0.3");
        assert!(matches!(parse_config(&text), Err(Error::Validation(_))));
    }

    #[test]
    fn missing_key_is_named() {
        let text = REFERENCE.replace("mu=0.5\n", "");
        match parse_config(&text) {
            Err(Error::Parse { field, .. }) => assert_eq!(field, "mu"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_values_report_their_line() {
        let text = REFERENCE.replace("c=15", "c=fifteen");
        match parse_config(&text) {
            Err(Error::Parse { line, field, .. }) => {
                assert_eq!((line, field.as_str()), (Some(2), "c"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_config(&format!("{REFERENCE}bogus = 1\n")),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_config(&format!("{REFERENCE}B = 3\n")),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_config(&format!("{REFERENCE}just words\n")),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn invariant_violations() {
        let cases = [
            REFERENCE.replace("B=100", "B=0"),
            REFERENCE.replace("c=15", "c=9"),
            REFERENCE.replace("alpha_list=10,100,1000", "alpha_list=0"),
            format!("{REFERENCE}grid = 5, 20\n"),
            REFERENCE.replace("r=0.2", "r=0"),
        ];
        for text in cases {
            assert!(matches!(parse_config(&text), Err(Error::Validation(_))), "{text}");
        }
    }
}
