//! Serialization helpers shared by the CLI.
//!
//! Every float is written with 17 significant digits (`{:.16e}`), which is
//! enough to round-trip an `f64` exactly.

use std::io;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, Serializer};

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON formatter that writes floats via [`fmt_f64`]. Non-finite values
/// become `null`.
#[derive(Debug, Default, Clone, Copy)]
pub struct SigDigitsFormatter;

impl Formatter for SigDigitsFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            writer.write_all(fmt_f64(value).as_bytes())
        } else {
            CompactFormatter.write_null(writer)
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes `value` as one line of JSON with full-precision floats.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, SigDigitsFormatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// Parses JSON, reporting the path of the offending field on failure
/// (e.g. ``coins[2].theta: invalid type: string "x", expected f64``).
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        if path.is_empty() || path == "." {
            inner.to_string()
        } else {
            format!("{path}: {inner}")
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::ScheduleDocument;
    use proptest::prelude::*;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(fmt_f64(0.2), "2.0000000000000001e-1");
        assert_eq!(to_json(&[1.0, -0.5]).unwrap(), "[1.0000000000000000e0,-5.0000000000000000e-1]");
        assert_eq!(to_json(&f64::NAN).unwrap(), "null");
    }

    #[test]
    fn parse_errors_name_the_field() {
        let err = parse_json::<ScheduleDocument>(r#"{"n": 3, "coins": [{"theta": 0, "phi": 0, "lambda": 0}, {"theta": "x", "phi": 0, "lambda": 0}]}"#)
            .unwrap_err();
        assert!(err.starts_with("coins[1].theta"), "{err}");

        let err = parse_json::<ScheduleDocument>(r#"{"n": 3, "coins": [{"theta": 0, "phi": 0}]}"#).unwrap_err();
        assert!(err.contains("lambda"), "{err}");
    }

    proptest! {
        #[test]
        fn json_floats_roundtrip_exactly(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
            let back: f64 = serde_json::from_str(&to_json(&x).unwrap()).unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
