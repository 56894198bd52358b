//! Sweep axes written as `min:max:points[:log]`.

use std::str::FromStr;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

/// Evenly spaced sweep axis, inclusive of both ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub scale: Scale,
}

impl Axis {
    pub fn new(min: f64, max: f64, points: usize, scale: Scale) -> Result<Self, CliError> {
        if !(min.is_finite() && max.is_finite()) || !(min < max) {
            return Err(CliError::Invalid(format!("axis needs min < max, got {min}:{max}")));
        }
        if points < 2 {
            return Err(CliError::Invalid(format!("axis needs at least 2 points, got {points}")));
        }
        if scale == Scale::Log && !(min > 0.0) {
            return Err(CliError::Invalid(format!("log axis needs min > 0, got {min}")));
        }
        Ok(Axis { min, max, points, scale })
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k == 0 {
                    return self.min;
                }
                if k + 1 == self.points {
                    return self.max;
                }
                let u = k as f64 / last;
                match self.scale {
                    Scale::Linear => self.min + u * (self.max - self.min),
                    Scale::Log => (self.min.ln() + u * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }
}

impl FromStr for Axis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(CliError::Invalid(format!("expected min:max:points[:log], got '{s}'")));
        }
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| CliError::Invalid(format!("bad number '{t}' in '{s}'")));
        let points = parts[2].trim().parse::<usize>().map_err(|_| CliError::Invalid(format!("bad point count in '{s}'")))?;
        let scale = match parts.get(3).map(|t| t.trim()) {
            None | Some("lin") | Some("linear") => Scale::Linear,
            Some("log") => Scale::Log,
            Some(other) => return Err(CliError::Invalid(format!("unknown axis scale '{other}'"))),
        };
        Axis::new(num(parts[0])?, num(parts[1])?, points, scale)
    }
}
