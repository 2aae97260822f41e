//! Parameter-grid syntax: a single value, a comma list, or an inclusive
//! `start:stop:step` range. The stop value is included exactly when the
//! step divides the range.

use std::fmt::Display;
use std::str::FromStr;

fn parse_one<T: FromStr>(text: &str, what: &str) -> Result<T, String>
where
    T::Err: Display,
{
    text.trim()
        .parse()
        .map_err(|e| format!("invalid {what} '{}': {e}", text.trim()))
}

/// Parses a floating-point grid.
pub fn parse_f64(text: &str) -> Result<Vec<f64>, String> {
    if let Some((start, stop, step)) = split_range(text)? {
        let start: f64 = parse_one(start, "grid start")?;
        let stop: f64 = parse_one(stop, "grid stop")?;
        let step: f64 = parse_one(step, "grid step")?;
        if step <= 0.0 || step.is_nan() {
            return Err(format!("grid step must be positive, got {step}"));
        }
        if stop < start {
            return Err(format!("grid stop {stop} lies before start {start}"));
        }
        let exact = (stop - start) / step;
        let rounded = exact.round();
        let divides = (exact - rounded).abs() < 1e-6;
        let count = if divides { rounded } else { exact.floor() } as usize + 1;
        let mut values: Vec<f64> = (0..count).map(|i| start + i as f64 * step).collect();
        if divides {
            *values.last_mut().expect("count is at least 1") = stop;
        }
        Ok(values)
    } else {
        text.split(',').map(|v| parse_one(v, "grid value")).collect()
    }
}

/// Parses an integer grid.
pub fn parse_u32(text: &str) -> Result<Vec<u32>, String> {
    if let Some((start, stop, step)) = split_range(text)? {
        let start: u32 = parse_one(start, "grid start")?;
        let stop: u32 = parse_one(stop, "grid stop")?;
        let step: u32 = parse_one(step, "grid step")?;
        if step == 0 {
            return Err("grid step must be positive, got 0".into());
        }
        if stop < start {
            return Err(format!("grid stop {stop} lies before start {start}"));
        }
        Ok((start..=stop).step_by(step as usize).collect())
    } else {
        text.split(',').map(|v| parse_one(v, "grid value")).collect()
    }
}

fn split_range(text: &str) -> Result<Option<(&str, &str, &str)>, String> {
    if !text.contains(':') {
        return Ok(None);
    }
    let parts: Vec<&str> = text.split(':').collect();
    match parts[..] {
        [start, stop, step] => Ok(Some((start, stop, step))),
        _ => Err(format!("grid '{text}' is not of the form start:stop:step")),
    }
}
