//! Flat key-value run configuration: a text file of `key = value` lines with
//! `#` comments, merged with command-line `--set key=value` overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

#[derive(Debug)]
pub struct ConfigError {
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError {
        message: message.into(),
    })
}

/// Parsed configuration; keys are unique, later assignments win.
#[derive(Clone, Debug, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return err(format!("cannot read {}: {e}", path.display())),
        };
        let mut cfg = Config::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(format!(
                    "{}:{}: expected `key = value`, got `{raw}`",
                    path.display(),
                    lineno + 1
                ));
            };
            cfg.values
                .insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(cfg)
    }

    pub fn apply_overrides(&mut self, sets: &[String]) -> Result<(), ConfigError> {
        for s in sets {
            let Some((key, value)) = s.split_once('=') else {
                return err(format!("--set expects key=value, got `{s}`"));
            };
            self.values
                .insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.get(key).unwrap_or(default)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<f64>()
                .map_err(|_| ConfigError {
                    message: format!("field `{key}`: `{v}` is not a number"),
                })
                .and_then(|x| {
                    if x.is_finite() {
                        Ok(x)
                    } else {
                        err(format!("field `{key}` must be finite"))
                    }
                }),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse::<u64>().map_err(|_| ConfigError {
                message: format!("field `{key}`: `{v}` is not a non-negative integer"),
            }),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        Ok(self.u64_or(key, default as u64)? as usize)
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some("true") | Some("1") | Some("yes") => Ok(true),
            Some("false") | Some("0") | Some("no") => Ok(false),
            Some(v) => err(format!("field `{key}`: `{v}` is not a boolean")),
        }
    }

    /// Comma-separated float list.
    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(v) = self.get(key) else {
            return Ok(None);
        };
        let mut out = Vec::new();
        for part in v.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            match part.parse::<f64>() {
                Ok(x) if x.is_finite() => out.push(x),
                _ => return err(format!("field `{key}`: `{part}` is not a number")),
            }
        }
        Ok(Some(out))
    }
}

/// The state/number/grid block shared by `criteria` and `estimate`.
pub struct RunSetup {
    pub spec: pqslab::SweepSpec,
}

pub fn parse_setup(cfg: &Config) -> Result<RunSetup, ConfigError> {
    let state = match cfg.str_or("state", "ground") {
        "ground" => pqslab::StateKind::Ground,
        "pqs-optimal" => pqslab::StateKind::PqsOptimal {
            tol: cfg.f64_or("pqs_tol", 1e-10)?,
            max_iters: cfg.u64_or("pqs_max_iters", 500)? as u32,
        },
        "pqs-gaussian" => pqslab::StateKind::PqsGaussian {
            sigma_m: match cfg.get("pqs_sigma_m") {
                None | Some("auto") => None,
                Some(_) => Some(cfg.f64_or("pqs_sigma_m", 0.0)?),
            },
            theta: cfg.f64_or("pqs_theta", 0.0)?,
        },
        "phase" => pqslab::StateKind::Phase {
            theta: cfg.f64_or("phase_theta", 0.0)?,
        },
        "coherent" => pqslab::StateKind::Coherent {
            rel_phase: cfg.f64_or("coherent_rel_phase", 0.0)?,
        },
        other => return err(format!("field `state`: unknown kind `{other}`")),
    };

    let number = match cfg.str_or("number", "poisson") {
        "fixed" => pqslab::NumberModel::Fixed(cfg.u64_or("n", 100)?),
        "poisson" => pqslab::NumberModel::Poisson {
            mean: cfg.f64_or("mean_n", 100.0)?,
            tail_mass: cfg.f64_or("tail_mass", 1e-12)?,
        },
        other => return err(format!("field `number`: unknown model `{other}`")),
    };

    let couplings = if let Some(c) = cfg.f64_list("couplings")? {
        if c.is_empty() {
            return err("field `couplings` is empty");
        }
        c
    } else {
        let lo = cfg.f64_or("coupling_min", -10.0)?;
        let hi = cfg.f64_or("coupling_max", -0.002)?;
        let points = cfg.usize_or("coupling_points", 25)?;
        if points == 0 {
            return err("field `coupling_points` must be positive");
        }
        match cfg.str_or("coupling_scale", "log") {
            "log" => {
                if lo == 0.0 || hi == 0.0 || (lo > 0.0) != (hi > 0.0) {
                    return err(
                        "log coupling grid needs nonzero endpoints of one sign \
                         (use coupling_scale = linear or `couplings = ...` otherwise)",
                    );
                }
                pqslab::log_grid(lo, hi, points)
            }
            "linear" => {
                if points == 1 {
                    vec![lo]
                } else {
                    (0..points)
                        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
                        .collect()
                }
            }
            other => return err(format!("field `coupling_scale`: `{other}`")),
        }
    };

    let mz_input_phase = match cfg.get("mz_input_phase") {
        None | Some("auto") => None,
        Some(_) => Some(cfg.f64_or("mz_input_phase", 0.0)?),
    };

    Ok(RunSetup {
        spec: pqslab::SweepSpec {
            state,
            number,
            couplings,
            mz_prepare: cfg.bool_or("mz_prepare", false)?,
            mz_input_phase,
            offsets: cfg.f64_list("offsets")?.unwrap_or_default(),
            exact_covariance: cfg.bool_or("exact_covariance", false)?,
        },
    })
}
