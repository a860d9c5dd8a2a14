//! Run settings from a plain `key = value` file and command-line overrides.
//!
//! Lines starting with `#` and blank lines are ignored. Recognised keys:
//! `scenario`, `scheme`, `order`, `cells`, `cfl`, `safety`, `tend`, `delta`,
//! `gas_constant`, `out`, `snapshots`, `max_steps`.

use std::path::{Path, PathBuf};

use mprk_euler::Scheme;
use thiserror::Error;

use crate::run::RunConfig;
use crate::scenario::{Scenario, ScenarioKind};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    Value { key: String, value: String, reason: String },
    #[error("missing setting `{0}`")]
    Missing(&'static str),
    #[error("scheme {scheme} has order {actual}, but order {requested} was requested")]
    OrderMismatch { scheme: Scheme, requested: u32, actual: u32 },
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ConfigError {
    fn value(key: &str, value: &str, reason: impl ToString) -> Self {
        ConfigError::Value { key: key.into(), value: value.into(), reason: reason.to_string() }
    }
}

/// Partially specified run settings; `None` means "not given here".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub scenario: Option<ScenarioKind>,
    pub scheme: Option<Scheme>,
    pub order: Option<u32>,
    pub cells: Option<usize>,
    pub cfl: Option<f64>,
    pub safety: Option<f64>,
    pub t_end: Option<f64>,
    pub delta: Option<f64>,
    pub gas_constant: Option<f64>,
    pub output: Option<PathBuf>,
    pub snapshot_every: Option<usize>,
    pub max_steps: Option<usize>,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| ConfigError::value(key, value, e))
}

impl Settings {
    pub const DEFAULT_CELLS: usize = 1000;
    pub const DEFAULT_CFL: f64 = 0.5;

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut s = Settings::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: idx + 1 })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "scenario" => s.scenario = Some(parse(key, value)?),
                "scheme" => s.scheme = Some(parse(key, value)?),
                "order" => s.order = Some(parse(key, value)?),
                "cells" => s.cells = Some(parse(key, value)?),
                "cfl" => s.cfl = Some(parse(key, value)?),
                "safety" => s.safety = Some(parse(key, value)?),
                "tend" => s.t_end = Some(parse(key, value)?),
                "delta" => s.delta = Some(parse(key, value)?),
                "gas_constant" => s.gas_constant = Some(parse(key, value)?),
                "out" => s.output = Some(PathBuf::from(value)),
                "snapshots" => s.snapshot_every = Some(parse(key, value)?),
                "max_steps" => s.max_steps = Some(parse(key, value)?),
                _ => return Err(ConfigError::UnknownKey { line: idx + 1, key: key.into() }),
            }
        }
        Ok(s)
    }

    pub fn read(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        Self::parse(&text)
    }

    /// Settings of `over` take precedence.
    pub fn merge(self, over: Settings) -> Settings {
        Settings {
            scenario: over.scenario.or(self.scenario),
            scheme: over.scheme.or(self.scheme),
            order: over.order.or(self.order),
            cells: over.cells.or(self.cells),
            cfl: over.cfl.or(self.cfl),
            safety: over.safety.or(self.safety),
            t_end: over.t_end.or(self.t_end),
            delta: over.delta.or(self.delta),
            gas_constant: over.gas_constant.or(self.gas_constant),
            output: over.output.or(self.output),
            snapshot_every: over.snapshot_every.or(self.snapshot_every),
            max_steps: over.max_steps.or(self.max_steps),
        }
    }

    /// Scenario with `tend`, `delta` and `gas_constant` applied.
    pub fn scenario(&self) -> Result<Scenario, ConfigError> {
        let mut scenario = Scenario::new(self.scenario.ok_or(ConfigError::Missing("scenario"))?);
        if let Some(t) = self.t_end {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(ConfigError::value("tend", &t.to_string(), "must be finite and non-negative"));
            }
            scenario.t_end = t;
        }
        if let Some(d) = self.delta {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(ConfigError::value("delta", &d.to_string(), "must be finite and non-negative"));
            }
            scenario.delta = d;
        }
        if let Some(r) = self.gas_constant {
            if !(r > 0.0 && r.is_finite()) {
                return Err(ConfigError::value("gas_constant", &r.to_string(), "must be positive"));
            }
            scenario.gas_constant = r;
        }
        Ok(scenario)
    }

    /// Scheme, checked against `order` when both are given.
    pub fn scheme(&self) -> Result<Scheme, ConfigError> {
        let scheme = self.scheme.ok_or(ConfigError::Missing("scheme"))?;
        match self.order {
            Some(order) if order != scheme.order() => {
                Err(ConfigError::OrderMismatch { scheme, requested: order, actual: scheme.order() })
            }
            _ => Ok(scheme),
        }
    }

    pub fn run_config(&self) -> Result<RunConfig, ConfigError> {
        let cells = self.cells.unwrap_or(Self::DEFAULT_CELLS);
        if cells < 2 {
            return Err(ConfigError::value("cells", &cells.to_string(), "need at least 2 cells"));
        }
        let cfl = self.cfl.unwrap_or(Self::DEFAULT_CFL);
        let safety = self.safety.unwrap_or(1.0);
        for (key, v) in [("cfl", cfl), ("safety", safety)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::value(key, &v.to_string(), "must be positive"));
            }
        }
        let mut config = RunConfig::new(self.scenario()?, self.scheme()?, cells, cfl).with_safety(safety);
        config.output = self.output.clone();
        config.snapshot_every = self.snapshot_every.unwrap_or(0);
        config.max_steps = self.max_steps;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_with_comments() {
        let s =
            Settings::parse("# contact run\nscenario = contact\nscheme=MPE-s\n\ncells = 200\nsafety = 0.7\n").unwrap();
        assert_eq!(s.scenario, Some(ScenarioKind::Contact));
        assert_eq!(s.scheme, Some(Scheme::MpeS));
        assert_eq!(s.cells, Some(200));
        assert_eq!(s.safety, Some(0.7));
        assert_eq!(s.cfl, None);
    }

    #[test]
    fn reports_bad_lines() {
        assert!(matches!(Settings::parse("scenario contact"), Err(ConfigError::Syntax { line: 1 })));
        assert!(matches!(Settings::parse("\ncolour = red"), Err(ConfigError::UnknownKey { line: 2, .. })));
        assert!(matches!(Settings::parse("cells = many"), Err(ConfigError::Value { .. })));
    }

    #[test]
    fn overrides_win() {
        let file = Settings::parse("scenario = vacuum\nscheme = FE\ncfl = 0.3").unwrap();
        let cli = Settings { cfl: Some(0.9), ..Settings::default() };
        let merged = file.merge(cli);
        assert_eq!(merged.cfl, Some(0.9));
        assert_eq!(merged.scheme, Some(Scheme::ForwardEuler));
    }

    #[test]
    fn order_must_match_scheme() {
        let s = Settings {
            scenario: Some(ScenarioKind::Smooth),
            scheme: Some(Scheme::Mpe),
            order: Some(2),
            ..Settings::default()
        };
        assert!(matches!(s.run_config(), Err(ConfigError::OrderMismatch { requested: 2, actual: 1, .. })));
        let ok = Settings { order: Some(1), ..s };
        assert_eq!(ok.run_config().unwrap().scheme, Scheme::Mpe);
    }

    #[test]
    fn scenario_parameters_are_applied() {
        let s =
            Settings::parse("scenario = reactive\nscheme = MPE\ntend = 1e-6\ndelta = 0\ngas_constant = 8.314").unwrap();
        let c = s.run_config().unwrap();
        assert_eq!(c.scenario.t_end, 1e-6);
        assert_eq!(c.scenario.delta, 0.0);
        assert_eq!(c.scenario.gas_constant, 8.314);
        assert_eq!(c.cells, Settings::DEFAULT_CELLS);
    }

    #[test]
    fn missing_and_invalid_values() {
        assert!(matches!(Settings::default().run_config(), Err(ConfigError::Missing("scenario"))));
        let s = Settings { scenario: Some(ScenarioKind::Smooth), scheme: Some(Scheme::Heun), ..Settings::default() };
        assert!(Settings { cfl: Some(-1.0), ..s.clone() }.run_config().is_err());
        assert!(Settings { t_end: Some(f64::NAN), ..s.clone() }.run_config().is_err());
        assert!(Settings { cells: Some(1), ..s }.run_config().is_err());
    }
}
