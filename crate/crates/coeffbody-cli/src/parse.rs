//! Complex-number parsing for command-line arguments.

use num::complex::Complex;

type C64 = Complex<f64>;

/// Parses one complex literal: `1.5`, `-2i`, `0.5+0.25i`, `1-3i`, `i`.
pub fn complex(text: &str) -> Result<C64, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty complex literal".to_string());
    }
    // pure imaginary or pure real fast paths
    if let Some(im) = s.strip_suffix('i') {
        // could still be of the form a+bi; look for a +/- separator after
        // the first character
        if let Some(pos) = split_point(im) {
            let (re, imag) = im.split_at(pos);
            let re: f64 = re
                .parse()
                .map_err(|_| format!("bad real part in `{s}`"))?;
            let imag = match imag {
                "+" => 1.0,
                "-" => -1.0,
                _ => imag
                    .parse()
                    .map_err(|_| format!("bad imaginary part in `{s}`"))?,
            };
            return Ok(C64::new(re, imag));
        }
        let imag = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            _ => im
                .parse()
                .map_err(|_| format!("bad imaginary literal `{s}`"))?,
        };
        return Ok(C64::new(0.0, imag));
    }
    let re: f64 = s.parse().map_err(|_| format!("bad real literal `{s}`"))?;
    Ok(C64::new(re, 0.0))
}

/// Index of the `+`/`-` separating real and imaginary parts, skipping a
/// leading sign and exponent signs like `1e-3`.
fn split_point(s: &str) -> Option<usize> {
    let bytes = s.as_bytes();
    for i in (1..bytes.len()).rev() {
        let b = bytes[i];
        if (b == b'+' || b == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            return Some(i);
        }
    }
    None
}

/// Parses a comma-separated list of complex literals.
pub fn complex_list(text: &str) -> Result<Vec<C64>, String> {
    text.split(',').map(complex).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_reals_and_imaginaries() {
        assert_eq!(complex("2.5").unwrap(), C64::new(2.5, 0.0));
        assert_eq!(complex("-3").unwrap(), C64::new(-3.0, 0.0));
        assert_eq!(complex("2i").unwrap(), C64::new(0.0, 2.0));
        assert_eq!(complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(complex("i").unwrap(), C64::new(0.0, 1.0));
    }

    #[test]
    fn parses_full_literals() {
        assert_eq!(complex("1+2i").unwrap(), C64::new(1.0, 2.0));
        assert_eq!(complex("0.5-0.25i").unwrap(), C64::new(0.5, -0.25));
        assert_eq!(complex("-1.5+i").unwrap(), C64::new(-1.5, 1.0));
        assert_eq!(complex("1e-3+2e-2i").unwrap(), C64::new(1e-3, 2e-2));
    }

    #[test]
    fn parses_lists() {
        let v = complex_list("4").unwrap();
        assert_eq!(v, vec![C64::new(4.0, 0.0)]);
        let v = complex_list("0.2+0.1i,-0.3,0.5i").unwrap();
        assert_eq!(
            v,
            vec![
                C64::new(0.2, 0.1),
                C64::new(-0.3, 0.0),
                C64::new(0.0, 0.5)
            ]
        );
    }

    #[test]
    fn rejects_garbage() {
        assert!(complex("abc").is_err());
        assert!(complex("").is_err());
        assert!(complex_list("1,,2").is_err());
    }
}
