//! `key=value` config files. Keys are the flag names without dashes;
//! blank lines and `#` comments are ignored, unknown keys are errors.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use splitquat::pairing::QuadratureSpec;
use splitquat::suites::BoundsCfg;
use thiserror::Error;

use crate::CommonFlags;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Syntax { path: String, line: usize, message: String },
}

/// Resolved settings: flags over config file over suite defaults.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Settings {
    pub min_twol: Option<i32>,
    pub max_absk: Option<i32>,
    pub mn_offset: Option<i32>,
    pub tol: Option<f64>,
    pub t_max: Option<f64>,
    pub nt: Option<usize>,
    pub nang: Option<usize>,
    pub radius: Option<f64>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub json: Option<PathBuf>,
    pub verbose: bool,
}

fn parse_value<T: FromStr>(v: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| format!("bad value {v:?}: {e}"))
}

pub fn parse(text: &str, path: &str) -> Result<Settings, ConfigError> {
    let mut s = Settings::default();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| ConfigError::Syntax { path: path.to_string(), line: n + 1, message };
        let (k, v) = line.split_once('=').ok_or_else(|| err("expected key=value".to_string()))?;
        let (k, v) = (k.trim().replace('_', "-"), v.trim());
        let r: Result<(), String> = match k.as_str() {
            "min-twol" => parse_value(v).map(|x| s.min_twol = Some(x)),
            "max-absk" => parse_value(v).map(|x| s.max_absk = Some(x)),
            "mn-offset" => parse_value(v).map(|x| s.mn_offset = Some(x)),
            "tol" => parse_value(v).map(|x| s.tol = Some(x)),
            "T" => parse_value(v).map(|x| s.t_max = Some(x)),
            "nt" => parse_value(v).map(|x| s.nt = Some(x)),
            "nang" => parse_value(v).map(|x| s.nang = Some(x)),
            "R" => parse_value(v).map(|x| s.radius = Some(x)),
            "seed" => parse_value(v).map(|x| s.seed = Some(x)),
            "jobs" => parse_value(v).map(|x| s.jobs = Some(x)),
            "json" => {
                s.json = Some(PathBuf::from(v));
                Ok(())
            }
            "verbose" => parse_value(v).map(|x| s.verbose = x),
            other => Err(format!("unknown key {other:?}")),
        };
        r.map_err(err)?;
    }
    Ok(s)
}

pub fn read(path: &Path) -> Result<Settings, ConfigError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: shown.clone(), source })?;
    parse(&text, &shown)
}

impl Settings {
    /// Command-line flags take precedence over `self`.
    pub fn overlay(&self, f: &CommonFlags) -> Settings {
        Settings {
            min_twol: f.min_twol.or(self.min_twol),
            max_absk: f.max_absk.or(self.max_absk),
            mn_offset: f.mn_offset.or(self.mn_offset),
            tol: f.tol.or(self.tol),
            t_max: f.t_max.or(self.t_max),
            nt: f.nt.or(self.nt),
            nang: f.nang.or(self.nang),
            radius: f.radius.or(self.radius),
            seed: f.seed.or(self.seed),
            jobs: f.jobs.or(self.jobs),
            json: f.json.clone().or_else(|| self.json.clone()),
            verbose: f.verbose || self.verbose,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(format!("--tol must be positive, got {t}"));
            }
        }
        if let Some(r) = self.radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(format!("--R must be positive, got {r}"));
            }
        }
        if let Some(t) = self.t_max {
            if !(t > 0.0 && t.is_finite()) {
                return Err(format!("--T must be positive, got {t}"));
            }
        }
        if let Some(m) = self.min_twol {
            if m > -2 {
                return Err(format!("--min-twol must be at most -2, got {m}"));
            }
        }
        if self.max_absk.is_some_and(|k| k < 0) || self.mn_offset.is_some_and(|m| m < 0) {
            return Err("--max-absk and --mn-offset must be nonnegative".to_string());
        }
        if self.jobs == Some(0) {
            return Err("--jobs must be at least 1".to_string());
        }
        Ok(())
    }

    pub fn bounds(&self, d: BoundsCfg) -> BoundsCfg {
        BoundsCfg {
            min_twol: self.min_twol.unwrap_or(d.min_twol),
            max_absk: self.max_absk.unwrap_or(d.max_absk),
            mn_offset: self.mn_offset.unwrap_or(d.mn_offset),
        }
    }

    pub fn spec(&self, d: QuadratureSpec) -> QuadratureSpec {
        QuadratureSpec {
            t_max: self.t_max.unwrap_or(d.t_max),
            n_t: self.nt.unwrap_or(d.n_t),
            n_ang: self.nang.unwrap_or(d.n_ang),
            radius: self.radius.unwrap_or(d.radius),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_comments_and_rejects_unknown() {
        let s = parse("# sweep\nmin-twol = -4\nmax_absk=2\nT=20 # short\nR=1.5\n\nseed=7\n", "c").unwrap();
        assert_eq!(s.min_twol, Some(-4));
        assert_eq!(s.max_absk, Some(2));
        assert_eq!(s.t_max, Some(20.0));
        assert_eq!(s.radius, Some(1.5));
        assert_eq!(s.seed, Some(7));
        let e = parse("colour=red\n", "c").unwrap_err().to_string();
        assert!(e.contains("c:1") && e.contains("unknown key"), "{e}");
        assert!(parse("tol\n", "c").is_err());
        assert!(parse("nt=abc\n", "c").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = parse("tol=1e-3\nseed=1\n", "c").unwrap();
        let flags = CommonFlags { seed: Some(9), ..Default::default() };
        let s = file.overlay(&flags);
        assert_eq!((s.tol, s.seed), (Some(1e-3), Some(9)));
        assert!(Settings { tol: Some(-1.0), ..Default::default() }.validate().is_err());
        assert!(Settings { min_twol: Some(0), ..Default::default() }.validate().is_err());
    }
}
