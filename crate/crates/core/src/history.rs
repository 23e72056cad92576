//! Finite outcome strings and the cylinders they name.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const DIGITS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyz";

/// Largest supported alphabet; symbols print as a single base-36 digit.
pub const MAX_ALPHABET: usize = DIGITS.len();

/// Finite outcome alphabet `{0, .., size-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Alphabet(usize);

impl Alphabet {
    pub const BINARY: Alphabet = Alphabet(2);

    pub fn new(size: usize) -> Result<Self> {
        if !(2..=MAX_ALPHABET).contains(&size) {
            return Err(Error::Precondition(format!("alphabet size must lie in 2..={MAX_ALPHABET}, got {size}")));
        }
        Ok(Alphabet(size))
    }

    pub fn size(self) -> usize {
        self.0
    }

    pub fn symbols(self) -> impl Iterator<Item = u8> {
        0..self.0 as u8
    }
}

impl TryFrom<usize> for Alphabet {
    type Error = Error;

    fn try_from(size: usize) -> Result<Self> {
        Alphabet::new(size)
    }
}

impl From<Alphabet> for usize {
    fn from(a: Alphabet) -> usize {
        a.0
    }
}

/// A finite outcome string, period 1 first. The empty history is the
/// cylinder of length 0, i.e. the whole path space.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct History(Vec<u8>);

impl History {
    pub fn empty() -> Self {
        History(Vec::new())
    }

    pub fn from_symbols(symbols: Vec<u8>) -> Self {
        History(symbols)
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, symbol: u8) {
        self.0.push(symbol);
    }

    pub fn child(&self, symbol: u8) -> History {
        let mut h = self.0.clone();
        h.push(symbol);
        History(h)
    }

    pub fn concat(&self, suffix: &History) -> History {
        let mut h = self.0.clone();
        h.extend_from_slice(&suffix.0);
        History(h)
    }

    pub fn prefix(&self, len: usize) -> History {
        History(self.0[..len.min(self.0.len())].to_vec())
    }

    /// True when `self` is a (not necessarily proper) prefix of `other`,
    /// i.e. the cylinder of `other` lies inside the cylinder of `self`.
    pub fn is_prefix_of(&self, other: &History) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn validate(&self, alphabet: Alphabet) -> Result<()> {
        match self.0.iter().find(|&&s| s as usize >= alphabet.size()) {
            Some(s) => {
                Err(Error::InvalidHistory(format!("symbol {s} out of range for alphabet of size {}", alphabet.size())))
            }
            None => Ok(()),
        }
    }

    /// Position of this history in the lexicographic listing of all
    /// histories of the same length.
    pub fn index(&self, alphabet: Alphabet) -> usize {
        self.0.iter().fold(0, |acc, &s| acc * alphabet.size() + s as usize)
    }

    pub fn from_index(mut index: usize, depth: usize, alphabet: Alphabet) -> History {
        let m = alphabet.size();
        let mut symbols = vec![0u8; depth];
        for slot in symbols.iter_mut().rev() {
            *slot = (index % m) as u8;
            index /= m;
        }
        History(symbols)
    }

    pub fn parse(s: &str, alphabet: Alphabet) -> Result<History> {
        let h: History = s.parse()?;
        h.validate(alphabet)?;
        Ok(h)
    }
}

impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            write!(f, "{}", DIGITS[s as usize] as char)?;
        }
        Ok(())
    }
}

impl FromStr for History {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| {
                c.to_digit(36)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::InvalidHistory(format!("bad symbol {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(History)
    }
}

impl Serialize for History {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for History {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All histories of length `depth` in lexicographic order.
pub fn all_histories(alphabet: Alphabet, depth: usize) -> impl Iterator<Item = History> {
    let count = alphabet.size().checked_pow(depth as u32).unwrap_or(usize::MAX);
    (0..count).map(move |i| History::from_index(i, depth, alphabet))
}

/// An eventually periodic infinite path: `prefix` followed by `cycle`
/// repeated forever.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathPattern {
    pub prefix: History,
    pub cycle: History,
}

impl PathPattern {
    pub fn new(prefix: History, cycle: History, alphabet: Alphabet) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidHistory("path pattern needs a non-empty cycle".into()));
        }
        prefix.validate(alphabet)?;
        cycle.validate(alphabet)?;
        Ok(PathPattern { prefix, cycle })
    }

    /// Parses `"prefix(cycle)"`, or a bare string taken as the cycle.
    /// `"(01)"` and `"01"` both denote `0101...`.
    pub fn parse(s: &str, alphabet: Alphabet) -> Result<Self> {
        let s = s.trim().trim_end_matches("...");
        match s.find('(') {
            Some(open) => {
                let close =
                    s.strip_suffix(')').ok_or_else(|| Error::InvalidHistory(format!("unbalanced pattern {s:?}")))?;
                let prefix = close[..open].parse()?;
                let cycle = close[open + 1..].parse()?;
                PathPattern::new(prefix, cycle, alphabet)
            }
            None => PathPattern::new(History::empty(), s.parse()?, alphabet),
        }
    }

    pub fn symbol_at(&self, position: usize) -> u8 {
        let p = self.prefix.len();
        if position < p {
            self.prefix.symbols()[position]
        } else {
            self.cycle.symbols()[(position - p) % self.cycle.len()]
        }
    }

    /// The cylinder `ω^t` of this path.
    pub fn truncate(&self, t: usize) -> History {
        History((0..t).map(|i| self.symbol_at(i)).collect())
    }
}

impl fmt::Display for PathPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.prefix, self.cycle)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip_is_lexicographic() {
        let a = Alphabet::new(3).unwrap();
        let listed: Vec<String> = all_histories(a, 2).map(|h| h.to_string()).collect();
        assert_eq!(listed, ["00", "01", "02", "10", "11", "12", "20", "21", "22"]);
        for (i, h) in all_histories(a, 2).enumerate() {
            assert_eq!(h.index(a), i);
        }
    }

    #[test]
    fn prefix_relation() {
        let a: History = "01".parse().unwrap();
        let b: History = "010".parse().unwrap();
        assert!(a.is_prefix_of(&b));
        assert!(!b.is_prefix_of(&a));
        assert!(History::empty().is_prefix_of(&a));
    }

    #[test]
    fn validation_rejects_out_of_range_symbols() {
        assert!(History::parse("012", Alphabet::BINARY).is_err());
        assert!(History::parse("010", Alphabet::BINARY).is_ok());
        assert!(Alphabet::new(1).is_err());
        assert!(Alphabet::new(37).is_err());
    }

    #[test]
    fn patterns() {
        let p = PathPattern::parse("01", Alphabet::BINARY).unwrap();
        assert_eq!(p.truncate(5).to_string(), "01010");
        let q = PathPattern::parse("1(0)", Alphabet::BINARY).unwrap();
        assert_eq!(q.truncate(4).to_string(), "1000");
        assert!(PathPattern::parse("()", Alphabet::BINARY).is_err());
    }
}
