//! Run configuration: defaults, INI-style `key = value` files, overrides.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::CorpusFormat;
use crate::textpipe::MatchMode;
use crate::turbulence::{Denominator, StabilityRule, TurbulenceParams};

/// Environment variable naming a config file to load before flags.
pub const CONFIG_ENV: &str = "POLIS_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub format: Option<CorpusFormat>,
    pub years: Option<(i32, i32)>,
    pub lexicon: Option<PathBuf>,
    pub negation: Option<PathBuf>,
    pub denominator: Denominator,
    pub match_mode: MatchMode,
    pub wildcard_negation: bool,
    pub turbulence: TurbulenceParams,
    pub alpha: f64,
    pub seed: u64,
    pub sample: usize,
    pub louvain_runs: usize,
    pub weighted_q: bool,
    /// Minimum corpus count for a word to enter the topic/complexity model.
    pub min_count: u64,
    pub skip_bad: bool,
    #[serde(skip)]
    pub out: PathBuf,
    /// Record stage timings in the run report (makes reports run-dependent).
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            inputs: Vec::new(),
            format: None,
            years: None,
            lexicon: None,
            negation: None,
            denominator: Denominator::Full,
            match_mode: MatchMode::Single,
            wildcard_negation: false,
            turbulence: TurbulenceParams::default(),
            alpha: 0.05,
            seed: 42,
            sample: 2800,
            louvain_runs: 10,
            weighted_q: true,
            min_count: 1,
            skip_bad: false,
            out: PathBuf::from("polis-out"),
            timings: false,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::InvalidArgument(format!("{key} = {value:?}: {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(Error::InvalidArgument(format!("{key} = {value:?}: expected a boolean"))),
    }
}

/// `A:B` (inclusive) or a single year.
pub fn parse_years(value: &str) -> Result<(i32, i32)> {
    let bad = || Error::InvalidArgument(format!("year range {value:?}: expected A:B or A"));
    let (a, b) = match value.split_once(':') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (value.trim(), value.trim()),
    };
    let a: i32 = a.parse().map_err(|_| bad())?;
    let b: i32 = b.parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

impl RunConfig {
    /// Set one key. Keys match the long flag names, with `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        let t = &mut self.turbulence;
        match key.as_str() {
            "input" => self.inputs = value.split(',').map(|p| PathBuf::from(p.trim())).collect(),
            "format" => self.format = Some(parse(&key, value)?),
            "years" => self.years = Some(parse_years(value)?),
            "lexicon" => self.lexicon = Some(PathBuf::from(value)),
            "negation" => self.negation = Some(PathBuf::from(value)),
            "denominator" => self.denominator = parse(&key, value)?,
            "match" => self.match_mode = parse(&key, value)?,
            "wildcard-negation" => self.wildcard_negation = parse_bool(&key, value)?,
            "window-years" => t.window_years = parse(&key, value)?,
            "factor" => t.factor = parse(&key, value)?,
            "drop" => t.drop = parse(&key, value)?,
            "span-years" => t.span_years = parse(&key, value)?,
            "tolerance" => t.tolerance = parse(&key, value)?,
            "min-support" => t.min_support = parse(&key, value)?,
            "min-count-emerge" => t.min_count_emerge = parse(&key, value)?,
            "stability" => t.stability = parse::<StabilityRule>(&key, value)?,
            "alpha" => self.alpha = parse(&key, value)?,
            "seed" => self.seed = parse(&key, value)?,
            "sample" => self.sample = parse(&key, value)?,
            "runs" => self.louvain_runs = parse(&key, value)?,
            "unweighted-q" => self.weighted_q = !parse_bool(&key, value)?,
            "min-count" => self.min_count = parse(&key, value)?,
            "skip-bad" => self.skip_bad = parse_bool(&key, value)?,
            "out" => self.out = PathBuf::from(value),
            "timings" => self.timings = parse_bool(&key, value)?,
            _ => return Err(Error::InvalidArgument(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Apply `key = value` lines. `#` and `;` start comments; `[section]`
    /// headers are accepted and ignored.
    pub fn apply_ini(&mut self, text: &str, source: &Path) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with(['#', ';']) || (line.starts_with('[') && line.ends_with(']')) {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Record {
                path: source.to_path_buf(),
                line: n + 1,
                message: "expected key = value".into(),
            })?;
            self.set(k, v).map_err(|e| Error::Record {
                path: source.to_path_buf(),
                line: n + 1,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        cfg.apply_ini(&text, path)?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::default();
        let t = c.turbulence;
        assert_eq!((t.window_years, t.factor, t.drop, t.tolerance), (7, 10.0, 0.15, 0.02));
        assert_eq!((t.min_support, t.min_count_emerge), (100, 20));
        assert_eq!((c.alpha, c.seed, c.sample), (0.05, 42, 2800));
    }

    #[test]
    fn ini_overrides() {
        let mut c = RunConfig::default();
        let text = "# thresholds\n[turbulence]\nfactor = 5\nmin_support=10\n\nyears = 1997:2019\nmatch = phrase\n";
        c.apply_ini(text, Path::new("x.ini")).unwrap();
        assert_eq!(c.turbulence.factor, 5.0);
        assert_eq!(c.turbulence.min_support, 10);
        assert_eq!(c.years, Some((1997, 2019)));
        assert_eq!(c.match_mode, MatchMode::Phrase);
    }

    #[test]
    fn bad_lines_name_the_line() {
        let mut c = RunConfig::default();
        let err = c.apply_ini("seed = 1\nbogus = 2\n", Path::new("x.ini")).unwrap_err();
        assert!(matches!(err, Error::Record { line: 2, .. }));
        assert!(c.apply_ini("seed\n", Path::new("x.ini")).is_err());
    }

    #[test]
    fn year_ranges() {
        assert_eq!(parse_years("2019").unwrap(), (2019, 2019));
        assert_eq!(parse_years("1997:2001").unwrap(), (1997, 2001));
        assert!(parse_years("2001:1997").is_err());
        assert!(parse_years("x").is_err());
    }
}
