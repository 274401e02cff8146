//! JSON output with 17 significant digits, and the series file format.
//!
//! A series file is an object
//! `{"label": str, "order": int, "coeffs": [[re_mantissa, im_mantissa, exp2], ...]}`
//! with exactly `order + 1` coefficient triples.

use std::io;

use serde::{Deserialize, Serialize};

use crate::scaled::ScaledComplex;
use crate::series::PowerSeries;
use crate::{Error, Result};

/// Compact JSON formatter that writes every float as `d.dddddddddddddddde±x`.
/// Non-finite floats become `null`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SigDigits17;

impl serde_json::ser::Formatter for SigDigits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes with [`SigDigits17`].
pub fn to_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits17);
    value.serialize(&mut ser).expect("serialization into memory cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// Formats one float the way [`SigDigits17`] does.
pub fn format_f64(value: f64) -> String {
    if value.is_finite() {
        format!("{value:.16e}")
    } else {
        format!("{value}")
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SeriesFile {
    label: String,
    order: usize,
    coeffs: Vec<(f64, f64, i64)>,
}

pub fn series_to_json(series: &PowerSeries) -> String {
    let file = SeriesFile {
        label: series.label().to_string(),
        order: series.order(),
        coeffs: series
            .coeffs()
            .iter()
            .map(|c| (c.re_mantissa(), c.im_mantissa(), c.exp2()))
            .collect(),
    };
    to_string(&file)
}

pub fn series_from_json(text: &str) -> Result<PowerSeries> {
    let file: SeriesFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    if file.coeffs.len() != file.order + 1 {
        return Err(Error::Format(format!(
            "order {} requires {} coefficients, found {}",
            file.order,
            file.order + 1,
            file.coeffs.len()
        )));
    }
    let coeffs = file
        .coeffs
        .iter()
        .map(|&(re, im, e)| {
            ScaledComplex::from_parts(re, im, e)
                .ok_or_else(|| Error::Format("non-finite mantissa".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PowerSeries::new(file.label, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(to_string(&0.1f64), "1.0000000000000001e-1");
        assert_eq!(to_string(&vec![1.0f64, -2.5]), "[1.0000000000000000e0,-2.5000000000000000e0]");
        assert_eq!(to_string(&f64::INFINITY), "null");
    }

    #[test]
    fn series_file_shape() {
        let f = PowerSeries::from_real("g", &[1.0, 3.0]);
        let text = series_to_json(&f);
        assert_eq!(
            text,
            r#"{"label":"g","order":1,"coeffs":[[1.0000000000000000e0,0.0000000000000000e0,0],[1.5000000000000000e0,0.0000000000000000e0,1]]}"#
        );
    }

    #[test]
    fn rejects_bad_length() {
        let err = series_from_json(r#"{"label":"x","order":2,"coeffs":[[1,0,0]]}"#).unwrap_err();
        assert!(matches!(err, Error::Format(_)));
        assert!(series_from_json("not json").is_err());
    }

    proptest! {
        #[test]
        fn file_roundtrip(v in prop::collection::vec((-1e10f64..1e10, -1e10f64..1e10, -3000i64..3000), 1..40)) {
            let coeffs = v.iter().map(|&(re, im, e)| ScaledComplex::from_parts(re, im, e).unwrap()).collect();
            let f = PowerSeries::new("rt", coeffs);
            let back = series_from_json(&series_to_json(&f)).unwrap();
            prop_assert_eq!(back, f);
        }
    }

    #[test]
    fn unnormalized_input_is_normalized() {
        let f = series_from_json(r#"{"label":"x","order":0,"coeffs":[[6.0,8.0,0]]}"#).unwrap();
        assert!(f.coeff(0).is_normalized());
        assert_eq!(f.coeff(0).to_complex(), Complex64::new(6.0, 8.0));
    }
}
