//! Sample specifications `start:stop:count:log` and `start:stop:count:lin`.

use semiflat_core::fit::{lin_spaced, log_spaced};

use crate::error::{LabError, Result};

/// Parses a sample specification into a strictly monotone list.
pub fn parse_radii(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let bad = |why: &str| LabError::input(format!("radii {spec:?}: {why}"));
    if parts.len() != 4 {
        return Err(bad("expected start:stop:count:log|lin"));
    }
    let num = |s: &str| s.parse::<f64>().ok().filter(|x| x.is_finite());
    let (a, b) = (num(parts[0]).ok_or_else(|| bad("bad start"))?, num(parts[1]).ok_or_else(|| bad("bad stop"))?);
    let n: usize = parts[2].parse().map_err(|_| bad("bad count"))?;
    if n < 2 {
        return Err(bad("count must be at least 2"));
    }
    if a == b {
        return Err(bad("start and stop coincide"));
    }
    let v = match parts[3] {
        "log" => {
            if a <= 0.0 || b <= 0.0 {
                return Err(bad("log spacing needs positive endpoints"));
            }
            log_spaced(a, b, n)
        }
        "lin" => lin_spaced(a, b, n),
        _ => return Err(bad("spacing must be log or lin")),
    };
    let up = b > a;
    if !v.windows(2).all(|w| if up { w[1] > w[0] } else { w[1] < w[0] }) {
        return Err(bad("samples are not strictly monotone"));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specs() {
        let v = parse_radii("1e-4:1e-12:5:log").unwrap();
        assert_eq!(v.len(), 5);
        assert!((v[2] / 1e-8 - 1.0).abs() < 1e-12);
        assert_eq!(parse_radii("0:1:3:lin").unwrap(), vec![0.0, 0.5, 1.0]);
        for bad in ["1:2:1:log", "1:1:4:log", "0:1:4:log", "1:2:3", "1:2:3:cubic", "a:2:3:lin", "1:2:x:lin"] {
            assert_eq!(parse_radii(bad).unwrap_err().exit_code(), 2, "{bad}");
        }
    }
}
