//! Parsing of complex literals of the form `[-]a[.b](+|-)c[.d]i`.

use num_complex::Complex64;

use crate::error::{invalid, Result};

fn take_unsigned(s: &str) -> Option<(f64, &str)> {
    let int_len = s.bytes().take_while(u8::is_ascii_digit).count();
    if int_len == 0 {
        return None;
    }
    let mut end = int_len;
    let rest = &s[int_len..];
    if let Some(frac) = rest.strip_prefix('.') {
        let frac_len = frac.bytes().take_while(u8::is_ascii_digit).count();
        if frac_len == 0 {
            return None;
        }
        end += 1 + frac_len;
    }
    let value = s[..end].parse().ok()?;
    Some((value, &s[end..]))
}

/// Parses `a+bi` / `a-bi` with an optional leading minus. No whitespace,
/// exponents or bare imaginary units are accepted.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let bad = || {
        invalid(format!(
            "malformed complex literal '{text}', expected e.g. 0+1i or -2.5-0.75i"
        ))
    };
    let (re_sign, s) = match text.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, text),
    };
    let (re, s) = take_unsigned(s).ok_or_else(bad)?;
    let (im_sign, s) = if let Some(rest) = s.strip_prefix('+') {
        (1.0, rest)
    } else if let Some(rest) = s.strip_prefix('-') {
        (-1.0, rest)
    } else {
        return Err(bad());
    };
    let (im, s) = take_unsigned(s).ok_or_else(bad)?;
    if s != "i" {
        return Err(bad());
    }
    Ok(Complex64::new(re_sign * re, im_sign * im))
}

/// Formats a complex number in the grammar accepted by [`parse_complex`].
pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}
