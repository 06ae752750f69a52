//! Plain CSV emission: UTF-8, LF line ends, a header row and reals printed
//! with 17 significant digits, which round-trips every f64.

use std::io::Write;

use crate::error::Result;

/// 17 significant digits (`{:.16e}`); `inf`, `-inf` and `nan` spelled out.
pub fn real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

/// Parses what [`real`] prints.
pub fn parse_real(s: &str) -> Option<f64> {
    match s {
        "nan" => Some(f64::NAN),
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

pub fn write_table<W: Write + ?Sized>(
    out: &mut W,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Serde adapter for reals that may be non-finite: finite values stay JSON
/// numbers, the rest become the strings [`real`] prints.
pub mod json_real {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(&super::real(*x))
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(x) => Ok(x),
            Repr::Text(t) => super::parse_real(&t).ok_or_else(|| de::Error::custom(format!("not a real: {t}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, f64::MIN_POSITIVE, f64::INFINITY] {
            assert_eq!(parse_real(&real(x)), Some(x));
        }
        assert!(parse_real(&real(f64::NAN)).unwrap().is_nan());
        assert_eq!(real(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn json_reals_round_trip() {
        #[derive(serde::Serialize, serde::Deserialize)]
        struct R(#[serde(with = "json_real")] f64);
        for x in [0.1, f64::INFINITY, f64::NEG_INFINITY] {
            let j = serde_json::to_string(&R(x)).unwrap();
            assert_eq!(serde_json::from_str::<R>(&j).unwrap().0, x);
        }
        let j = serde_json::to_string(&R(f64::NAN)).unwrap();
        assert_eq!(j, "\"nan\"");
        assert!(serde_json::from_str::<R>(&j).unwrap().0.is_nan());
    }

    #[test]
    fn table_uses_lf() {
        let mut buf = Vec::new();
        write_table(&mut buf, &["a", "b"], vec![vec!["1".into(), "2".into()]]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1,2\n");
    }
}
