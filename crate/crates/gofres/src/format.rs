//! C-style `%.12e` number formatting.

/// Formats like C's `printf("%.12e", x)`: twelve fraction digits and a
/// signed exponent of at least two digits. Negative zero is printed as
/// zero so that output does not depend on the sign of a vanishing value.
pub fn fmt_e(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{:.12e}", x + 0.0);
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_c_printf() {
        assert_eq!(fmt_e(1.0), "1.000000000000e+00");
        assert_eq!(fmt_e(-0.5), "-5.000000000000e-01");
        assert_eq!(fmt_e(0.0), "0.000000000000e+00");
        assert_eq!(fmt_e(-0.0), "0.000000000000e+00");
        assert_eq!(fmt_e(1.4142135623730951), "1.414213562373e+00");
        assert_eq!(fmt_e(6.02214076e123), "6.022140760000e+123");
        assert_eq!(fmt_e(1e-300), "1.000000000000e-300");
        assert_eq!(fmt_e(f64::NAN), "nan");
        assert_eq!(fmt_e(f64::NEG_INFINITY), "-inf");
        // round half to even on the printed digit, as glibc does
        assert_eq!(fmt_e(0.70710678118654757), "7.071067811865e-01");
    }
}
