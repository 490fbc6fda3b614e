//! Number formatting shared by the JSON and CSV writers.

/// Decimal string with 17 significant digits.
pub fn sig17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for v in [0.1, -2.0 / 3.0, 1e-300, 12345.678] {
            let s = sig17(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(sig17(1.0), "1.0000000000000000e0");
    }
}
