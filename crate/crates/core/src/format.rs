//! Decimal output with 17 significant digits, which round-trips every
//! finite `f64` exactly.

use std::io;

/// Formats `v` like C's `%.17g`.
pub fn g17(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "NaN".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, v))
    } else {
        let m = trim_zeros(mantissa.to_string());
        format!("{}e{}{:02}", m, if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

/// `serde_json` formatter that writes floats through [`g17`].
#[derive(Clone, Copy, Debug, Default)]
pub struct G17Formatter;

impl serde_json::ser::Formatter for G17Formatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            writer.write_all(g17(value).as_bytes())
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` as compact JSON with 17-digit floats.
pub fn to_json<T: serde::Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, G17Formatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("json is utf-8"))
}

/// Pretty-printed variant of [`to_json`].
pub fn to_json_pretty<T: serde::Serialize>(value: &T) -> serde_json::Result<String> {
    let value = serde_json::to_value(value)?;
    let mut out = Vec::new();
    pretty_write(&value, 0, &mut out);
    Ok(String::from_utf8(out).expect("json is utf-8"))
}

fn pretty_write(value: &serde_json::Value, indent: usize, out: &mut Vec<u8>) {
    use serde_json::Value;
    let pad = |out: &mut Vec<u8>, level: usize| out.extend(std::iter::repeat_n(b' ', 2 * level));
    match value {
        Value::Number(num) => {
            if num.is_f64() {
                out.extend(g17(num.as_f64().unwrap()).as_bytes());
            } else {
                out.extend(num.to_string().as_bytes());
            }
        }
        Value::Array(items) if items.is_empty() => out.extend(b"[]"),
        Value::Array(items) if items.iter().all(|v| v.is_number()) => {
            out.push(b'[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.extend(b", ");
                }
                pretty_write(item, indent, out);
            }
            out.push(b']');
        }
        Value::Array(items) => {
            out.extend(b"[\n");
            for (i, item) in items.iter().enumerate() {
                pad(out, indent + 1);
                pretty_write(item, indent + 1, out);
                if i + 1 < items.len() {
                    out.push(b',');
                }
                out.push(b'\n');
            }
            pad(out, indent);
            out.push(b']');
        }
        Value::Object(map) if map.is_empty() => out.extend(b"{}"),
        Value::Object(map) => {
            out.extend(b"{\n");
            for (i, (key, item)) in map.iter().enumerate() {
                pad(out, indent + 1);
                out.extend(serde_json::to_string(key).unwrap().as_bytes());
                out.extend(b": ");
                pretty_write(item, indent + 1, out);
                if i + 1 < map.len() {
                    out.push(b',');
                }
                out.push(b'\n');
            }
            pad(out, indent);
            out.push(b'}');
        }
        other => out.extend(other.to_string().as_bytes()),
    }
}
