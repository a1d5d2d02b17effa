//! Sweep ranges: `start:stop:step` (inclusive) or a comma-separated list.

use crate::error::{CliError, Result};

/// Largest number of points a range may expand to.
pub const MAX_POINTS: usize = 100_000;

/// Expands `start:stop:step`. `stop` is included when it lies on the grid
/// (within a millionth of a step).
pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(CliError::Config(format!(
            "range `{spec}` must be start:stop:step"
        )));
    };
    let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
    if step.is_nan() || step <= 0.0 {
        return Err(CliError::Config(format!(
            "range step must be positive, got {step}"
        )));
    }
    if stop < start {
        return Err(CliError::Config(format!("range {spec} is empty")));
    }
    let span = (stop - start) / step;
    if span >= MAX_POINTS as f64 {
        return Err(CliError::Config(format!(
            "range {spec} has more than {MAX_POINTS} points"
        )));
    }
    let count = (span + 1e-6).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// Parses `a,b,c`.
pub fn parse_values(spec: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = spec
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(number)
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(CliError::Config("value list is empty".into()));
    }
    if values.len() > MAX_POINTS {
        return Err(CliError::Config(format!("more than {MAX_POINTS} values")));
    }
    Ok(values)
}

fn number(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("`{s}` is not a number")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("`{s}` is not finite")))
    }
}
