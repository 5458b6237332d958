use serde::Serialize;

use crate::CliError;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn csv_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Parses `start,end,count` into `count` equally spaced points, endpoints included.
pub fn parse_grid(flag: &str, text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Input(format!("{flag} '{text}': {why}"));
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(bad("expected start,end,count"));
    };
    let a: f64 = a.parse().map_err(|_| bad("start is not a number"))?;
    let b: f64 = b.parse().map_err(|_| bad("end is not a number"))?;
    let n: usize = n
        .parse()
        .map_err(|_| bad("count is not a non-negative integer"))?;
    if !a.is_finite() || !b.is_finite() {
        return Err(bad("bounds must be finite"));
    }
    if a >= b {
        return Err(bad("start must be below end"));
    }
    if n < 2 {
        return Err(bad("count must be at least 2"));
    }
    let last = (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                b
            } else {
                a + (b - a) * i as f64 / last
            }
        })
        .collect())
}
