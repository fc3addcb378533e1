//! Angles given as radians or as multiples of pi: `pi`, `-pi/2`, `3pi/4`,
//! `0.25*pi`, `1.5`.

use std::f64::consts::PI;

use crate::error::CliError;

pub fn parse_angle(s: &str) -> Result<f64, CliError> {
    let bad = || CliError::Usage(format!("cannot parse angle {s:?}"));
    let t = s.trim().to_ascii_lowercase().replace('π', "pi");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(at) = t.find("pi") else {
        return t.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(bad);
    };
    let (head, tail) = (&t[..at], &t[at + 2..]);
    let head = head.strip_suffix('*').unwrap_or(head);
    let coef = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let den = match tail {
        "" => 1.0,
        d => d
            .strip_prefix('/')
            .and_then(|d| d.parse::<f64>().ok())
            .filter(|&d| d != 0.0)
            .ok_or_else(bad)?,
    };
    let v = coef * PI / den;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

/// Comma-separated angles, e.g. `pi,-pi/2`.
pub fn parse_angles(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').map(parse_angle).collect()
}
