//! Exact text form of `f64` values in C99 `%a` notation, e.g. `0x1.8p+1`.

/// Formats `v` as a normalized hexadecimal float (`inf`, `-inf`, `nan` for
/// non-finite values).
pub fn format(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    let sign = if v.is_sign_negative() { "-" } else { "" };
    if v.is_infinite() {
        return format!("{sign}inf");
    }
    let bits = v.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 && frac == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if exp_bits == 0 { (0, -1022) } else { (1, exp_bits - 1023) };
    let digits = format!("{frac:013x}");
    let digits = digits.trim_end_matches('0');
    let dot = if digits.is_empty() { "" } else { "." };
    let esign = if exp >= 0 { "+" } else { "-" };
    format!("{sign}0x{lead}{dot}{digits}p{esign}{}", exp.abs())
}

/// Parses the output of [`format`]; returns `None` for anything else.
pub fn parse(s: &str) -> Option<f64> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let apply = |v: f64| if neg { -v } else { v };
    match body {
        "inf" => return Some(apply(f64::INFINITY)),
        "nan" if !neg => return Some(f64::NAN),
        _ => {}
    }
    let body = body.strip_prefix("0x")?;
    let (mant, exp) = body.split_once('p')?;
    let exp: i32 = exp.parse().ok()?;
    let (lead, digits) = match mant.split_once('.') {
        Some((l, d)) if !d.is_empty() => (l, d),
        Some(_) => return None,
        None => (mant, ""),
    };
    if digits.len() > 13 || !digits.chars().all(|c| c.is_ascii_hexdigit()) {
        return None;
    }
    let frac = if digits.is_empty() { 0 } else { u64::from_str_radix(digits, 16).ok()? };
    let frac = frac << (4 * (13 - digits.len()));
    let bits = match lead {
        "1" if (-1022..=1023).contains(&exp) => (((exp + 1023) as u64) << 52) | frac,
        "0" if frac == 0 && exp == 0 => 0,
        "0" if exp == -1022 => frac,
        _ => return None,
    };
    Some(apply(f64::from_bits(bits)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_forms() {
        assert_eq!(format(3.0), "0x1.8p+1");
        assert_eq!(format(1.0), "0x1p+0");
        assert_eq!(format(-0.5), "-0x1p-1");
        assert_eq!(format(0.0), "0x0p+0");
        assert_eq!(format(-0.0), "-0x0p+0");
        assert_eq!(format(f64::MIN_POSITIVE / 2.0), "0x0.8p-1022");
        assert_eq!(format(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn round_trip() {
        let vals = [
            0.1,
            -1e-300,
            f64::MAX,
            f64::MIN_POSITIVE,
            5e-324,
            std::f64::consts::PI,
            -0.0,
            f64::INFINITY,
            123456.789e10,
        ];
        for v in vals {
            let back = parse(&format(v)).unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v}");
        }
        assert!(parse(&format(f64::NAN)).unwrap().is_nan());
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "1.5", "0x1.p+0", "0x2p+0", "0x1.gp+0", "0x1p+1024", "0x0.1p+3"] {
            assert!(parse(s).is_none(), "{s}");
        }
    }
}
