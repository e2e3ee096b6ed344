//! Decimal formatting shared by every text format this crate writes.
//!
//! All floating-point values leave the tool with nine significant
//! digits, mirroring `printf("%.9g")`: plain decimal notation in the
//! exponent range `[-4, 9)`, scientific notation outside it, trailing
//! zeros trimmed. Nine digits quantizes below any tolerance used by the
//! pipeline while keeping files diffable and byte-stable across runs.

/// Significant digits carried by every serialized float.
pub const SIG_DIGITS: usize = 9;

/// Formats a finite value with [`SIG_DIGITS`] significant digits.
pub fn fmt_f64(x: f64) -> String {
    debug_assert!(x.is_finite(), "formatting a non-finite value");
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.*e}", SIG_DIGITS - 1);
    let (mantissa, exp) = sci.split_once('e').expect("scientific form");
    let exp: i32 = exp.parse().expect("scientific exponent");
    if (-4..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_fraction(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp:+03}", trim_fraction(mantissa.to_string()))
    }
}

/// Formats three coordinates separated by single spaces.
pub fn fmt_triple(x: f64, y: f64, z: f64) -> String {
    format!("{} {} {}", fmt_f64(x), fmt_f64(y), fmt_f64(z))
}

fn trim_fraction(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn plain_decimals() {
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(-0.0), "0");
        assert_eq!(fmt_f64(0.05), "0.05");
        assert_eq!(fmt_f64(-0.05), "-0.05");
        assert_eq!(fmt_f64(1.0), "1");
        assert_eq!(fmt_f64(0.0001), "0.0001");
        assert_eq!(fmt_f64(123456789.0), "123456789");
    }

    #[test]
    fn nine_digit_rounding() {
        assert_eq!(fmt_f64(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_f64(2.0 / 3.0), "0.666666667");
        assert_eq!(fmt_f64(0.999999999999), "1");
    }

    #[test]
    fn scientific_range() {
        assert_eq!(fmt_f64(1e-7), "1e-07");
        assert_eq!(fmt_f64(-2.5e-7), "-2.5e-07");
        assert_eq!(fmt_f64(1234567891.0), "1.23456789e+09");
        assert_eq!(fmt_f64(1e300), "1e+300");
        assert_eq!(fmt_f64(999999999.5), "1e+09");
    }

    #[test]
    fn triple_joins_with_spaces() {
        assert_eq!(fmt_triple(1.0, -0.5, 0.0), "1 -0.5 0");
    }

    proptest! {
        #[test]
        fn roundtrip_within_nine_digits(x in -1e9f64..1e9) {
            let back: f64 = fmt_f64(x).parse().unwrap();
            let tol = 1e-8 * x.abs().max(1e-300);
            prop_assert!((back - x).abs() <= tol);
        }

        #[test]
        fn output_reparses(x in prop::num::f64::NORMAL) {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            prop_assert_eq!(back.signum(), x.signum());
        }
    }
}
