//! Unit-tagged quantities in configuration files, e.g. `"0.99 MHz"`.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    /// Ordinary frequency, stored in Hz.
    Frequency,
    /// Stored in seconds.
    Time,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::Frequency => "frequency",
            Dimension::Time => "time",
        })
    }
}

const UNITS: &[(&str, Dimension, f64)] = &[
    ("Hz", Dimension::Frequency, 1.0),
    ("kHz", Dimension::Frequency, 1e3),
    ("MHz", Dimension::Frequency, 1e6),
    ("s", Dimension::Time, 1.0),
    ("ms", Dimension::Time, 1e-3),
    ("us", Dimension::Time, 1e-6),
    ("µs", Dimension::Time, 1e-6),
    ("ns", Dimension::Time, 1e-9),
];

/// Parses `"<number> <unit>"` into the base unit of `dim`.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64, String> {
    let text = text.trim();
    let split = text
        .char_indices()
        .rev()
        .take_while(|(_, c)| c.is_alphabetic())
        .last()
        .map(|(i, _)| i)
        .ok_or_else(|| format!("`{text}` has no unit; expected a {dim}"))?;
    let (num, unit) = text.split_at(split);
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| format!("`{}` is not a number", num.trim()))?;
    if !value.is_finite() {
        return Err(format!("`{text}` is not finite"));
    }
    let unit = unit.trim();
    match UNITS.iter().find(|(u, _, _)| *u == unit) {
        Some((_, d, scale)) if *d == dim => Ok(value * scale),
        Some((_, d, _)) => Err(format!("`{unit}` is a {d} unit; expected a {dim}")),
        None => Err(format!("unknown unit `{unit}`")),
    }
}

/// Canonical text of a value in the base unit.
pub fn format_quantity(value: f64, dim: Dimension) -> String {
    match dim {
        Dimension::Frequency => format!("{value:?} Hz"),
        Dimension::Time => format!("{value:?} s"),
    }
}
