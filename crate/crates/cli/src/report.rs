use std::io;

use fuchsian_pick::linalg::{CMatrix, PsdReport};
use fuchsian_pick::Complex64;
use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{json, Value};

/// Compact JSON with every float written as `{:.16e}` (17 significant
/// digits), so equal values always print the same bytes.
struct FixedFloats;

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }
}

pub fn render(v: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloats);
    v.serialize(&mut ser).expect("serializing a JSON value");
    String::from_utf8(out).expect("JSON output is UTF-8")
}

pub fn cx(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn matrix(m: &CMatrix) -> Value {
    Value::Array(m.rows().into_iter().map(|r| Value::Array(r.into_iter().map(cx).collect())).collect())
}

pub fn psd(r: &PsdReport) -> Value {
    json!({
        "psd": r.is_psd,
        "min_eigenvalue": r.min_eigenvalue,
        "tolerance": r.tolerance_used,
    })
}

pub fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, |v| json!(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(render(&json!([0.1, 1.0, -2.5e-300])), "[1.0000000000000001e-1,1.0000000000000000e0,-2.5000000000000000e-300]");
    }

    #[test]
    fn non_finite_values_become_null() {
        assert_eq!(render(&json!({"x": f64::NAN})), r#"{"x":null}"#);
    }

    #[test]
    fn output_parses_back_to_the_same_values() {
        let v = json!({"a": [std::f64::consts::PI, -0.0, 1e300], "n": 3});
        let back: Value = serde_json::from_str(&render(&v)).unwrap();
        assert_eq!(back, v);
    }
}
