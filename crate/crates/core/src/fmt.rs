//! Text formatting helpers shared by the file writers.

/// Formats `x` the way C's `printf("%.17g", x)` does.
///
/// Seventeen significant digits round-trip every finite `f64`. Trailing
/// zeros are stripped, and scientific notation is used when the decimal
/// exponent is below -4 or at least 17.
pub fn format_g17(x: f64) -> String {
    const PRECISION: i32 = 17;
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..PRECISION).contains(&exp) {
        let decimals = (PRECISION - 1 - exp) as usize;
        strip_zeros(format!("{:.*}", decimals, x))
    } else {
        let mantissa = strip_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    }
}

fn strip_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    trimmed.to_string()
}

#[cfg(test)]
mod tests {
    use super::format_g17;

    #[test]
    fn matches_printf() {
        // Expected strings taken from glibc printf("%.17g").
        assert_eq!(format_g17(1.0), "1");
        assert_eq!(format_g17(2.5), "2.5");
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(100.0), "100");
        assert_eq!(format_g17(1e17), "1e+17");
        assert_eq!(format_g17(1.5e-5), "1.5e-05");
        assert_eq!(format_g17(1.0 / 3.0 * 1e-7), "3.3333333333333327e-08");
        assert_eq!(format_g17(0.0001), "0.0001");
        assert_eq!(format_g17(-3.25), "-3.25");
        assert_eq!(format_g17(123456789012345678.0), "1.2345678901234568e+17");
    }

    #[test]
    fn round_trips() {
        for &x in &[
            0.1,
            1.0 / 3.0,
            2.0f64.sqrt(),
            1e-300,
            6.02214076e23,
            0.9999999999999999,
        ] {
            let s = format_g17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }
}
