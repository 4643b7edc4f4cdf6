//! One-line text form: passages in base order as `O1+ U2- ...`, crossing
//! ids numbered from 1 by first appearance. The empty diagram is `""`.

use std::fmt;
use std::str::FromStr;

use super::{GaussDiagram, GaussEntry, GaussError};

impl fmt::Display for GaussDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tokens: Vec<String> = self
            .entries()
            .iter()
            .map(|e| format!("{}{}{}", if e.over { 'O' } else { 'U' }, e.crossing + 1, if e.sign > 0 { '+' } else { '-' }))
            .collect();
        write!(f, "{}", tokens.join(" "))
    }
}

impl FromStr for GaussDiagram {
    type Err = GaussError;

    /// Parameters are placed evenly on `[0, 1)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let tokens: Vec<&str> = s.split_whitespace().collect();
        let n = tokens.len();
        let mut entries = Vec::with_capacity(n);
        for (i, tok) in tokens.iter().enumerate() {
            let bad = || GaussError::Invalid(format!("bad token `{tok}`"));
            let mut chars = tok.chars();
            let over = match chars.next() {
                Some('O') => true,
                Some('U') => false,
                _ => return Err(bad()),
            };
            let rest = chars.as_str();
            let (id, sign) = match rest.strip_suffix('+') {
                Some(id) => (id, 1),
                None => (rest.strip_suffix('-').ok_or_else(bad)?, -1),
            };
            if id.is_empty() || !id.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let id: usize = id.parse().map_err(|_| bad())?;
            if id == 0 {
                return Err(bad());
            }
            entries.push(GaussEntry { t: i as f64 / n as f64, crossing: id, over, sign });
        }
        GaussDiagram::new(entries)
    }
}
