use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Evenly spaced values, linear or logarithmic, written `kind:start:end:count`
/// (e.g. `log:1e-3:1:20`, `linear:0:0.95:96`). Both endpoints are included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Grid {
    Linear { start: f64, end: f64, count: usize },
    Log { start: f64, end: f64, count: usize },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Grid::Linear { start, end, count } => linspace(start, end, count),
            Grid::Log { start, end, count } => linspace(start.log10(), end.log10(), count)
                .into_iter()
                .map(|e| 10f64.powf(e))
                .collect(),
        }
    }

    fn validate(self) -> Result<Self> {
        let (start, end, count) = match self {
            Grid::Linear { start, end, count } | Grid::Log { start, end, count } => (start, end, count),
        };
        if count == 0 || !start.is_finite() || !end.is_finite() {
            return Err(Error::Config(format!("invalid grid {self}")));
        }
        if count > 1 && start == end {
            return Err(Error::Config(format!("grid {self} repeats one value")));
        }
        if matches!(self, Grid::Log { .. }) && (start <= 0.0 || end <= 0.0) {
            return Err(Error::Config(format!("log grid {self} needs positive endpoints")));
        }
        Ok(self)
    }
}

fn linspace(start: f64, end: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    let last = (count - 1) as f64;
    (0..count)
        .map(|k| if k + 1 == count { end } else { start + (end - start) * k as f64 / last })
        .collect()
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Config(format!("grid `{s}` is not kind:start:end:count"));
        if parts.len() != 4 {
            return Err(bad());
        }
        let start: f64 = parts[1].parse().map_err(|_| bad())?;
        let end: f64 = parts[2].parse().map_err(|_| bad())?;
        let count: usize = parts[3].parse().map_err(|_| bad())?;
        match parts[0] {
            "linear" | "lin" => Grid::Linear { start, end, count },
            "log" => Grid::Log { start, end, count },
            _ => return Err(bad()),
        }
        .validate()
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grid::Linear { start, end, count } => write!(f, "linear:{start}:{end}:{count}"),
            Grid::Log { start, end, count } => write!(f, "log:{start}:{end}:{count}"),
        }
    }
}
