//! Value lists for `--theta`, `--q0` and friends.

use std::str::FromStr;

/// `v`, `a,b,c`, or `start:stop:step` (half-open: stop is excluded).
#[derive(Debug, Clone, PartialEq)]
pub struct Values(pub Vec<f64>);

fn num(s: &str) -> Result<f64, String> {
    let t = s.trim();
    match t {
        "pi" => Ok(std::f64::consts::PI),
        _ => t.parse::<f64>().map_err(|_| format!("not a number: {t:?}")),
    }
}

impl FromStr for Values {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let out = match parts.as_slice() {
            [one] => one.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
            [a, b, st] => {
                let (a, b, st) = (num(a)?, num(b)?, num(st)?);
                if !(st > 0.0) || !st.is_finite() {
                    return Err(format!("step must be positive, got {st}"));
                }
                // tolerate rounding in (b - a)/step so that stop stays excluded
                let n = ((b - a) / st - 1e-9).ceil().max(0.0) as usize;
                (0..n).map(|i| a + i as f64 * st).collect()
            }
            _ => return Err(format!("expected value, list or start:stop:step, got {s:?}")),
        };
        if out.is_empty() {
            return Err(format!("empty range {s:?}"));
        }
        if out.iter().any(|v| !v.is_finite()) {
            return Err(format!("non-finite value in {s:?}"));
        }
        Ok(Values(out))
    }
}
