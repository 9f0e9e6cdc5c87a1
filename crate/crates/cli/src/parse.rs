//! Angle, range and config-file parsing.

use std::f64::consts::PI;
use std::path::Path;

use serde::Serialize;

/// Radians, or a multiple of π: `2pi`, `pi/2`, `-0.5pi`, `3pi/4`.
pub fn angle(s: &str) -> Result<f64, String> {
    let t: String = s.trim().to_ascii_lowercase().chars().filter(|c| !c.is_whitespace()).collect();
    let Some(at) = t.find("pi") else {
        return number(&t);
    };
    let coef = match t[..at].trim_end_matches('*') {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => number(c)?,
    };
    let rest = &t[at + 2..];
    let den = match rest.strip_prefix('/') {
        Some(d) => number(d)?,
        None if rest.is_empty() => 1.0,
        None => return Err(format!("cannot parse angle '{s}'")),
    };
    if den == 0.0 {
        return Err(format!("zero denominator in angle '{s}'"));
    }
    Ok(coef * PI / den)
}

fn number(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("cannot parse number '{s}'"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("non-finite value '{s}'"))
    }
}

/// Closed interval `a..b` of angles; a single angle gives `a..a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleRange {
    pub start: f64,
    pub end: f64,
}

pub fn angle_range(s: &str) -> Result<AngleRange, String> {
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (angle(a)?, angle(b.trim_start_matches('='))?),
        None => {
            let a = angle(s)?;
            (a, a)
        }
    };
    Ok(AngleRange { start: a, end: b })
}

/// Inclusive integer range `a..b`; a single integer gives `a..a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IntRange {
    pub start: usize,
    pub end: usize,
}

impl IntRange {
    pub fn values(self, step: usize) -> Vec<usize> {
        (self.start..=self.end).step_by(step.max(1)).collect()
    }
}

pub fn int_range(s: &str) -> Result<IntRange, String> {
    let int = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("cannot parse integer '{x}'"));
    let r = match s.split_once("..") {
        Some((a, b)) => IntRange {
            start: int(a)?,
            end: int(b.trim_start_matches('='))?,
        },
        None => {
            let a = int(s)?;
            IntRange { start: a, end: a }
        }
    };
    if r.start > r.end {
        return Err(format!("empty range '{s}'"));
    }
    Ok(r)
}

/// Comma-separated angles.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct AngleList(pub Vec<f64>);

pub fn angle_list(s: &str) -> Result<AngleList, String> {
    s.split(',').map(angle).collect::<Result<_, _>>().map(AngleList)
}

/// `key = value` lines; `#` starts a comment. Keys use `_` or `-` freely.
pub fn config_file(path: &Path) -> Result<Vec<(String, String)>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
    config_text(&text)
}

pub fn config_text(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key = value", i + 1))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(format!("config line {}: empty key", i + 1));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}
