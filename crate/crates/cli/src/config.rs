//! Run configuration: command-line flags layered over an optional
//! `key=value` config file, layered over defaults.

use crate::CliError;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

/// Hard cap on the enumeration scale.
pub const MAX_N: i64 = 100_000;
pub const DEFAULT_N: i64 = 1000;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_CACHE_DIR: &str = "geolab-cache";

/// Report encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Values given on the command line, all optional so that a config file
/// can fill the gaps.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct Flags {
    /// Enumeration scale N (traces and denominators up to N).
    #[arg(long = "N", global = true)]
    pub n: Option<i64>,
    /// Form: delta, maass, eisenstein or eisenstein:<t>.
    #[arg(long, global = true)]
    pub form: Option<String>,
    /// Maass coefficient file (implies --form maass).
    #[arg(long = "maass-file", global = true)]
    pub maass_file: Option<PathBuf>,
    /// Absolute tolerance of each period, in [1e-14, 1e-3].
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Enumeration cache directory.
    #[arg(long = "cache-dir", env = "GEOLAB_CACHE", global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Output directory; reports go to standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Random seed for sampling.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Report format.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Config file of key=value lines (flags take precedence).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// The resolved configuration of one run.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct RunConfig {
    #[serde(rename = "N")]
    pub n: i64,
    pub form: String,
    pub maass_file: Option<PathBuf>,
    pub tol: f64,
    pub threads: Option<usize>,
    pub cache_dir: PathBuf,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub format: Format,
    /// `N` was given by flag or config file rather than defaulted.
    #[serde(skip)]
    pub n_explicit: bool,
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| CliError::Usage(format!("config key {key}: cannot parse {v:?}")))
}

impl RunConfig {
    /// Layers flags over the config file (if any) over defaults, then validates.
    pub fn resolve(flags: &Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(p) => parse_config_file(&read(p)?)?,
            None => BTreeMap::new(),
        };
        const KEYS: [&str; 9] = ["N", "form", "maass-file", "tol", "threads", "cache-dir", "out", "seed", "format"];
        if let Some(k) = file.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(CliError::Usage(format!("unknown config key {k:?}")));
        }
        let get = |k: &str| file.get(k).map(String::as_str);
        let n_explicit = flags.n.is_some() || get("N").is_some();
        let n = match flags.n {
            Some(n) => n,
            None => get("N").map(|v| parse_value("N", v)).transpose()?.unwrap_or(DEFAULT_N),
        };
        let maass_file = flags.maass_file.clone().or_else(|| get("maass-file").map(PathBuf::from));
        let form = flags
            .form
            .clone()
            .or_else(|| get("form").map(String::from))
            .unwrap_or_else(|| if maass_file.is_some() { "maass".into() } else { "delta".into() });
        let tol = match flags.tol {
            Some(t) => t,
            None => get("tol").map(|v| parse_value("tol", v)).transpose()?.unwrap_or(DEFAULT_TOL),
        };
        let threads = match flags.threads {
            Some(t) => Some(t),
            None => get("threads").map(|v| parse_value("threads", v)).transpose()?,
        };
        let cache_dir = flags
            .cache_dir
            .clone()
            .or_else(|| get("cache-dir").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR));
        let out = flags.out.clone().or_else(|| get("out").map(PathBuf::from));
        let seed = match flags.seed {
            Some(s) => s,
            None => get("seed").map(|v| parse_value("seed", v)).transpose()?.unwrap_or(DEFAULT_SEED),
        };
        let format = match flags.format {
            Some(f) => f,
            None => match get("format") {
                None | Some("csv") => Format::Csv,
                Some("json") => Format::Json,
                Some(v) => return Err(CliError::Usage(format!("config key format: {v:?} is not csv or json"))),
            },
        };
        let cfg = RunConfig { n, form, maass_file, tol, threads, cache_dir, out, seed, format, n_explicit };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(1..=MAX_N).contains(&self.n) {
            return Err(CliError::Usage(format!("N = {} outside [1, {MAX_N}]", self.n)));
        }
        if !(1e-14..=1e-3).contains(&self.tol) {
            return Err(CliError::Usage(format!("tolerance {:e} outside [1e-14, 1e-3]", self.tol)));
        }
        if self.threads == Some(0) {
            return Err(CliError::Usage("thread count must be positive".into()));
        }
        Ok(())
    }
}

fn read(p: &Path) -> Result<String, CliError> {
    fs::read_to_string(p).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_parsing() {
        let m = parse_config_file("# comment\nN = 200\n\ntol=1e-9\n").unwrap();
        assert_eq!(m["N"], "200");
        assert_eq!(m["tol"], "1e-9");
        assert!(parse_config_file("N 200").is_err());
    }

    #[test]
    fn validation_bounds() {
        let flags = Flags { n: Some(MAX_N + 1), ..Flags::default() };
        assert!(matches!(RunConfig::resolve(&flags), Err(CliError::Usage(_))));
        let flags = Flags { tol: Some(1e-2), ..Flags::default() };
        assert!(matches!(RunConfig::resolve(&flags), Err(CliError::Usage(_))));
    }
}
