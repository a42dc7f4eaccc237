//! Shared JSON helpers.

use num_rational::Rational64;
use serde_json::Value;

/// Parses an integer, a float with integral value, or a `"p/q"` string.
pub fn rational_from_value(v: &Value) -> Result<Rational64, String> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational64::from_integer(i))
            } else {
                let f = n.as_f64().ok_or("number out of range")?;
                Rational64::approximate_float(f).ok_or_else(|| format!("cannot represent {f}"))
            }
        }
        Value::String(s) => {
            let s = s.trim();
            let parsed = match s.split_once('/') {
                Some((p, q)) => {
                    let p: i64 = p.trim().parse().map_err(|_| format!("bad rational `{s}`"))?;
                    let q: i64 = q.trim().parse().map_err(|_| format!("bad rational `{s}`"))?;
                    if q == 0 {
                        return Err(format!("zero denominator in `{s}`"));
                    }
                    Rational64::new(p, q)
                }
                None => Rational64::from_integer(s.parse().map_err(|_| format!("bad rational `{s}`"))?),
            };
            Ok(parsed)
        }
        other => Err(format!("expected a number or \"p/q\" string, got {other}")),
    }
}

pub fn rational_to_value(q: &Rational64) -> Value {
    if q.is_integer() {
        Value::from(q.to_integer())
    } else {
        Value::from(q.to_string())
    }
}
