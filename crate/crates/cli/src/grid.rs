//! Grid specifications: `v1,v2,...`, `lin:a:b:step` or `log:a:b:per_decade`.
//! Values may be written as `10^x`.

use crate::error::CliError;

/// Parses one number, accepting `10^x` as well as plain floats.
pub fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    let v = match s.strip_prefix("10^") {
        Some(e) => 10f64.powf(e.trim().parse().ok()?),
        None => s.parse().ok()?,
    };
    v.is_finite().then_some(v)
}

/// Expands a grid specification into increasing values. `key` names the
/// configuration entry in error messages.
pub fn parse_grid(key: &str, spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |reason: &str| CliError::invalid(key, spec, reason);
    let num = |s: &str| parse_number(s).ok_or_else(|| bad("not a number"));
    let values = if let Some(rest) = spec.strip_prefix("lin:") {
        let p: Vec<&str> = rest.split(':').collect();
        let [a, b, step] = p[..] else {
            return Err(bad("expected lin:start:stop:step"));
        };
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if !(step > 0.0) || b < a {
            return Err(bad("need step > 0 and stop ≥ start"));
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        (0..=n).map(|i| a + i as f64 * step).collect()
    } else if let Some(rest) = spec.strip_prefix("log:") {
        let p: Vec<&str> = rest.split(':').collect();
        let [a, b, per] = p[..] else {
            return Err(bad("expected log:start:stop:points_per_decade"));
        };
        let (a, b, per) = (num(a)?, num(b)?, num(per)?);
        if !(a > 0.0 && b >= a && per >= 1.0 && per.fract() == 0.0) {
            return Err(bad(
                "need 0 < start ≤ stop and a whole number of points per decade",
            ));
        }
        let n = ((b / a).log10() * per + 1e-9).floor() as usize;
        (0..=n).map(|i| a * 10f64.powf(i as f64 / per)).collect()
    } else {
        spec.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() {
        return Err(bad("empty grid"));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad("grid values must be strictly increasing"));
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_grid() {
        let g = parse_grid("grid", "lin:-10:20:1").unwrap();
        assert_eq!(g.len(), 31);
        assert_eq!(g[0], -10.0);
        assert_eq!(g[30], 20.0);
    }

    #[test]
    fn log_grid() {
        let g = parse_grid("grid", "log:1:10^3.5:10").unwrap();
        assert_eq!(g.len(), 36);
        assert!((g[35] - 10f64.powf(3.5)).abs() < 1e-9);
        assert!((g[10] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn list_grid() {
        assert_eq!(
            parse_grid("grid", "1, 2.5,10^2").unwrap(),
            vec![1.0, 2.5, 100.0]
        );
        assert!(parse_grid("grid", "3,2").is_err());
        assert!(parse_grid("grid", "").is_err());
        assert!(parse_grid("grid", "lin:0:1").is_err());
        assert!(parse_grid("grid", "log:0:1:10").is_err());
    }
}
