//! The serializable description of one run. JSON output echoes it under
//! `inputs`, and `--input` replays it.

use iftr::model::IftrParams;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub gamma_bar: f64,
    pub m1: f64,
    pub m2: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub delta: f64,
}

impl ParamSet {
    pub fn build(&self) -> iftr::Result<IftrParams> {
        IftrParams::new(self.gamma_bar, self.m1, self.m2, self.k, self.delta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVar {
    GammaBar,
    K,
    Delta,
    M1,
    M2,
    GammaTh,
    RTh,
}

impl SweepVar {
    pub fn column(self) -> &'static str {
        match self {
            SweepVar::GammaBar => "gamma_bar",
            SweepVar::K => "K",
            SweepVar::Delta => "delta",
            SweepVar::M1 => "m1",
            SweepVar::M2 => "m2",
            SweepVar::GammaTh => "gamma_th",
            SweepVar::RTh => "R_th",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "gamma_bar" | "gamma-bar" => SweepVar::GammaBar,
            "K" | "k" => SweepVar::K,
            "delta" => SweepVar::Delta,
            "m1" => SweepVar::M1,
            "m2" => SweepVar::M2,
            "gamma_th" | "gamma-th" => SweepVar::GammaTh,
            "R_th" | "r_th" | "r-th" => SweepVar::RTh,
            _ => return None,
        })
    }
}

/// `var:start:stop:points[:db]`. With `db` the end points are in dB and the
/// points are evenly spaced in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub var: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub db: bool,
}

#[derive(Debug)]
pub struct SweepParseError(pub String);

impl fmt::Display for SweepParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SweepParseError {}

impl std::str::FromStr for Sweep {
    type Err = SweepParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |m: &str| SweepParseError(format!("sweep '{s}': {m}"));
        let parts: Vec<&str> = s.split(':').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(err("expected var:start:stop:points[:db]"));
        }
        let var = SweepVar::parse(parts[0]).ok_or_else(|| {
            err("variable must be one of gamma_bar, K, delta, m1, m2, gamma_th, R_th")
        })?;
        let num = |t: &str| t.parse::<f64>().map_err(|_| err(&format!("'{t}' is not a number")));
        let start = num(parts[1])?;
        let stop = num(parts[2])?;
        let points: usize = parts[3]
            .parse()
            .map_err(|_| err(&format!("'{}' is not a point count", parts[3])))?;
        if points < 2 {
            return Err(err("points must be >= 2"));
        }
        let db = match parts.get(4) {
            None => false,
            Some(&"db") | Some(&"dB") => true,
            Some(other) => return Err(err(&format!("unknown scale '{other}', expected db"))),
        };
        Ok(Sweep {
            var,
            start,
            stop,
            points,
            db,
        })
    }
}

impl Sweep {
    /// Linear values of the swept variable.
    pub fn values(&self) -> Vec<f64> {
        (0..self.points)
            .map(|i| {
                let t = self.start + (self.stop - self.start) * i as f64 / (self.points - 1) as f64;
                if self.db {
                    db_to_linear(t)
                } else {
                    t
                }
            })
            .collect()
    }
}

pub fn db_to_linear(v: f64) -> f64 {
    10f64.powf(v / 10.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    Coeffs,
    Pdf {
        x_max: Option<f64>,
        points: usize,
    },
    Cdf {
        x_max: Option<f64>,
        points: usize,
    },
    Gmgf {
        n: f64,
        s: f64,
    },
    Moments {
        max_order: u32,
    },
    Aof,
    Capacity,
    Outage {
        gamma_th: f64,
    },
    OutageCci {
        antennas: usize,
        interferers: usize,
        interference_power: f64,
        sir_threshold: f64,
    },
    Ber {
        modulation: Vec<(f64, f64)>,
    },
    KsTable {
        orders: Vec<usize>,
        reference: usize,
        grid_points: usize,
        /// Use the run's own shape parameters instead of the Table I rows.
        #[serde(default)]
        custom: bool,
    },
    Simulate {
        gamma_th: f64,
    },
    Figure {
        number: u8,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Coeffs => "coeffs",
            Command::Pdf { .. } => "pdf",
            Command::Cdf { .. } => "cdf",
            Command::Gmgf { .. } => "gmgf",
            Command::Moments { .. } => "moments",
            Command::Aof => "aof",
            Command::Capacity => "capacity",
            Command::Outage { .. } => "outage",
            Command::OutageCci { .. } => "outage-cci",
            Command::Ber { .. } => "ber",
            Command::KsTable { .. } => "ks-table",
            Command::Simulate { .. } => "simulate",
            Command::Figure { .. } => "figure",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub command: Command,
    pub params: ParamSet,
    #[serde(rename = "J")]
    pub terms: usize,
    pub seed: u64,
    pub samples: usize,
    pub monte_carlo: bool,
    pub sweep: Option<Sweep>,
    pub format: Format,
}

impl RunSpec {
    /// The spec with the swept variable set to `value`.
    pub fn with_var(&self, var: SweepVar, value: f64) -> Result<RunSpec, String> {
        let mut out = self.clone();
        match (var, &mut out.command) {
            (SweepVar::GammaBar, _) => out.params.gamma_bar = value,
            (SweepVar::K, _) => out.params.k = value,
            (SweepVar::Delta, _) => out.params.delta = value,
            (SweepVar::M1, _) => out.params.m1 = value,
            (SweepVar::M2, _) => out.params.m2 = value,
            (SweepVar::GammaTh, Command::Outage { gamma_th })
            | (SweepVar::GammaTh, Command::Simulate { gamma_th }) => *gamma_th = value,
            (SweepVar::RTh, Command::OutageCci { sir_threshold, .. }) => *sir_threshold = value,
            (v, c) => {
                return Err(format!(
                    "sweep variable {} does not apply to {}",
                    v.column(),
                    c.name()
                ))
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sweeps() {
        let s: Sweep = "gamma_bar:0:20:3:db".parse().unwrap();
        assert_eq!(s.var, SweepVar::GammaBar);
        let v = s.values();
        assert!((v[0] - 1.0).abs() < 1e-15 && (v[1] - 10.0).abs() < 1e-12 && (v[2] - 100.0).abs() < 1e-12);
        let s: Sweep = "delta:0:1:5".parse().unwrap();
        assert_eq!(s.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!("delta:0:1:1".parse::<Sweep>().is_err());
        assert!("phase:0:1:3".parse::<Sweep>().is_err());
        assert!("delta:0:x:3".parse::<Sweep>().is_err());
        assert!("delta:0:1:3:log".parse::<Sweep>().is_err());
    }
}
