use super::string::PauliString;
use super::sum::PauliSum;
use crate::error::{Error, Result};

impl PauliSum {
    /// One `<coefficient> <letters>` line per term, 17 significant digits.
    pub fn to_text(&self) -> Result<String> {
        let mut out = String::new();
        for (p, c) in self.real_terms()? {
            out.push_str(&format!("{:.16e} {}\n", c, p.letters()));
        }
        Ok(out)
    }

    /// Inverse of [`PauliSum::to_text`]. Blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<PauliSum> {
        let mut terms = Vec::new();
        let mut num_sites = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: idx + 1,
                message,
            };
            let mut parts = line.split_whitespace();
            let coef: f64 = parts
                .next()
                .unwrap()
                .parse()
                .map_err(|e| parse_err(format!("bad coefficient: {e}")))?;
            let letters = parts
                .next()
                .ok_or_else(|| parse_err("missing Pauli letters".into()))?;
            if parts.next().is_some() {
                return Err(parse_err("trailing tokens".into()));
            }
            let p = PauliString::from_letters(letters).map_err(|e| parse_err(e.to_string()))?;
            match num_sites {
                None => num_sites = Some(p.num_sites()),
                Some(n) if n != p.num_sites() => {
                    return Err(parse_err(format!(
                        "string has {} sites, expected {n}",
                        p.num_sites()
                    )))
                }
                _ => {}
            }
            terms.push((p, coef));
        }
        let n = num_sites.ok_or(Error::Parse {
            line: 0,
            message: "no terms".into(),
        })?;
        PauliSum::from_real_terms(n, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let text = "# cluster\n-1.0 XZXII\n0.1 IIZII\n\n3.3333333333333331e-1 IIIXX\n";
        let s = PauliSum::from_text(text).unwrap();
        let again = PauliSum::from_text(&s.to_text().unwrap()).unwrap();
        assert_eq!(s, again);
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(
            PauliSum::from_text("1.0 XZ\n2.0 XZZ\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(PauliSum::from_text("abc XZ").is_err());
        assert!(PauliSum::from_text("1.0 XQ").is_err());
    }
}
