//! Numeric arguments: plain decimals, multiples of `pi` or `sqrt2`, and
//! `start:stop:count` grids.
//!
//! Accepted forms: `0.25`, `pi`, `-pi`, `pi/4`, `3pi/8`, `0.09275644pi`,
//! `2*pi`, `8sqrt2`, `sqrt2/2`, `7/6`.

use std::f64::consts::{PI, SQRT_2};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot read `{input}`: {reason}")]
pub struct ValueError {
    pub input: String,
    pub reason: String,
}

fn fail(input: &str, reason: &str) -> ValueError {
    ValueError { input: input.to_string(), reason: reason.to_string() }
}

fn number(s: &str, input: &str) -> Result<f64, ValueError> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| fail(input, &format!("`{s}` is not a number")))
}

/// `[coefficient][*](pi|sqrt2)[/denominator]` or `number[/denominator]`.
pub fn parse_value(input: &str) -> Result<f64, ValueError> {
    let s = input.trim();
    if s.is_empty() {
        return Err(fail(input, "empty value"));
    }
    let (head, denom) = match s.split_once('/') {
        Some((h, d)) => {
            let d = number(d.trim(), input)?;
            if d == 0.0 {
                return Err(fail(input, "division by zero"));
            }
            (h.trim(), d)
        }
        None => (s, 1.0),
    };
    let (coef, unit) = if let Some(c) = head.strip_suffix("pi") {
        (c, PI)
    } else if let Some(c) = head.strip_suffix("sqrt2") {
        (c, SQRT_2)
    } else {
        (head, 1.0)
    };
    let coef = coef.strip_suffix('*').unwrap_or(coef).trim();
    let c = match coef {
        "" if unit != 1.0 => 1.0,
        "-" if unit != 1.0 => -1.0,
        "+" if unit != 1.0 => 1.0,
        other => number(other, input)?,
    };
    Ok(c * unit / denom)
}

/// `start:stop:count`, endpoints included.
pub fn parse_grid(input: &str) -> Result<Vec<f64>, ValueError> {
    let parts: Vec<&str> = input.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(fail(input, "expected start:stop:count"));
    };
    let a = parse_value(a)?;
    let b = parse_value(b)?;
    let n: usize = n.trim().parse().map_err(|_| fail(input, "count must be a positive integer"))?;
    if n == 0 {
        return Err(fail(input, "count must be a positive integer"));
    }
    Ok(selftest_core::synth::linspace(a, b, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        let close = |s: &str, v: f64| assert!((parse_value(s).unwrap() - v).abs() < 1e-15, "{s}");
        close("0.25", 0.25);
        close("pi", PI);
        close("-pi", -PI);
        close("pi/4", PI / 4.0);
        close("3pi/8", 3.0 * PI / 8.0);
        close("2*pi", 2.0 * PI);
        close("0.09275644pi", 0.09275644 * PI);
        close("8sqrt2", 8.0 * SQRT_2);
        close("7/6", 7.0 / 6.0);
        for bad in ["", "pi/0", "x", "1/pi", "nan"] {
            assert!(parse_value(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn grids() {
        let g = parse_grid("0:pi/4:512").unwrap();
        assert_eq!(g.len(), 512);
        assert_eq!(g[0], 0.0);
        assert!((g[511] - PI / 4.0).abs() < 1e-15);
        assert_eq!(parse_grid("3.4:3.4:1").unwrap(), vec![3.4]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
    }
}
