//! Locale-independent number formatting with 12 significant digits.

const SIG: usize = 12;

/// Formats `x` like C's `%.12g`.
pub fn fmt12(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIG as i32).contains(&exp) {
        let decimals = (SIG as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x)).to_string()
    } else {
        format!("{}e{}{:02}", trim(mant), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds to the printed precision, so JSON and CSV agree digit for digit.
pub fn round12(x: f64) -> f64 {
    if x.is_finite() {
        fmt12(x).parse().expect("round trip")
    } else {
        x
    }
}
