//! Text formats accepted on the command line.

use num_complex::Complex64;

/// Parses `re+imj` style complex numbers: `0.3`, `-2j`, `0.1-0.4j`, `1e-3+2e-2j`, `j`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|ch| !ch.is_whitespace()).collect();
    let bad = || format!("cannot parse complex number '{s}' (expected re+imj)");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix(['j', 'i']) else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is neither leading nor part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re.parse::<f64>().map_err(|_| bad())?, im))
}

/// Comma-separated list of complex numbers.
pub fn parse_complex_list(s: &str) -> Result<Vec<Complex64>, String> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(parse_complex).collect()
}

/// Canonical text form, the inverse of [`parse_complex`].
pub fn format_complex(z: Complex64) -> String {
    format!("{}{:+}j", z.re, z.im)
}

/// An inclusive range of site counts, `5` or `5..8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SiteRange {
    pub lo: usize,
    pub hi: usize,
}

impl SiteRange {
    pub fn single(&self) -> Option<usize> {
        (self.lo == self.hi).then_some(self.lo)
    }
}

pub fn parse_sites(s: &str) -> Result<SiteRange, String> {
    let t = s.trim();
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("cannot parse site count '{s}'"));
    let (lo, hi) = match t.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => {
            let n = num(t)?;
            (n, n)
        }
    };
    if lo == 0 || lo > hi {
        return Err(format!("invalid site range '{s}'"));
    }
    Ok(SiteRange { lo, hi })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let c = Complex64::new;
        assert_eq!(parse_complex("0.3").unwrap(), c(0.3, 0.0));
        assert_eq!(parse_complex("0.4j").unwrap(), c(0.0, 0.4));
        assert_eq!(parse_complex("-0.5+0.1j").unwrap(), c(-0.5, 0.1));
        assert_eq!(parse_complex("1-2j").unwrap(), c(1.0, -2.0));
        assert_eq!(parse_complex("1e-3+2e-2j").unwrap(), c(1e-3, 2e-2));
        assert_eq!(parse_complex("-1e-3j").unwrap(), c(0.0, -1e-3));
        assert_eq!(parse_complex("j").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("2-j").unwrap(), c(2.0, -1.0));
        assert!(parse_complex("").is_err());
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("1+2").is_err());
    }

    #[test]
    fn complex_round_trip() {
        for z in [Complex64::new(0.1, -0.25), Complex64::new(-3.0, 0.0), Complex64::new(1e-9, 4.5)] {
            assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        }
    }

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_complex_list("0.1, 0.3,0.4j").unwrap().len(), 3);
        assert_eq!(parse_sites("5..8").unwrap(), SiteRange { lo: 5, hi: 8 });
        assert_eq!(parse_sites("5..=8").unwrap(), SiteRange { lo: 5, hi: 8 });
        assert_eq!(parse_sites("6").unwrap().single(), Some(6));
        assert!(parse_sites("8..5").is_err());
        assert!(parse_sites("0").is_err());
    }
}
