use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stability index `alpha = l/m` kept in lowest terms.
///
/// The pair `(l, m)` fixes the orders of the kernel PDE
/// `(d^2/ds^2)^l p + (-1)^(l+1) d^(2m)/dt^(2m) p = 0`, so the index is carried
/// as a rational rather than a float.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AlphaIndex {
    l: u32,
    m: u32,
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

impl AlphaIndex {
    pub const CAUCHY: AlphaIndex = AlphaIndex { l: 1, m: 1 };
    pub const BROWNIAN: AlphaIndex = AlphaIndex { l: 2, m: 1 };
    pub const HALF: AlphaIndex = AlphaIndex { l: 1, m: 2 };
    pub const THIRD: AlphaIndex = AlphaIndex { l: 1, m: 3 };
    pub const THREE_HALVES: AlphaIndex = AlphaIndex { l: 3, m: 2 };

    /// Builds `l/m`, reducing to lowest terms. Rejects values outside `(0, 2]`.
    pub fn new(l: u32, m: u32) -> Result<Self> {
        if l == 0 || m == 0 {
            return Err(Error::invalid(format!("alpha = {l}/{m}: l and m must be positive")));
        }
        let g = gcd(l, m);
        let (l, m) = (l / g, m / g);
        if l > 2 * m {
            return Err(Error::invalid(format!("alpha = {l}/{m} exceeds 2")));
        }
        Ok(AlphaIndex { l, m })
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn value(&self) -> f64 {
        f64::from(self.l) / f64::from(self.m)
    }

    /// Index of the subordinator that generates this stable law from Brownian
    /// motion, `alpha/2`, returned as `(numerator, denominator)` in lowest terms.
    pub fn half(&self) -> (u32, u32) {
        let (n, d) = (self.l, 2 * self.m);
        let g = gcd(n, d);
        (n / g, d / g)
    }

    pub fn is_cauchy(&self) -> bool {
        *self == Self::CAUCHY
    }

    pub fn is_brownian(&self) -> bool {
        *self == Self::BROWNIAN
    }
}

impl fmt::Display for AlphaIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m == 1 {
            write!(f, "{}", self.l)
        } else {
            write!(f, "{}/{}", self.l, self.m)
        }
    }
}

impl FromStr for AlphaIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |part: &str| {
            part.trim()
                .parse::<u32>()
                .map_err(|_| Error::invalid(format!("cannot parse alpha `{s}`; expected `l/m` or an integer")))
        };
        match s.split_once('/') {
            Some((l, m)) => AlphaIndex::new(parse(l)?, parse(m)?),
            None => AlphaIndex::new(parse(s)?, 1),
        }
    }
}

impl TryFrom<String> for AlphaIndex {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<AlphaIndex> for String {
    fn from(a: AlphaIndex) -> String {
        a.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_to_lowest_terms() {
        let a = AlphaIndex::new(2, 4).unwrap();
        assert_eq!((a.l(), a.m()), (1, 2));
        assert_eq!(AlphaIndex::new(4, 2).unwrap(), AlphaIndex::BROWNIAN);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(AlphaIndex::new(0, 1).is_err());
        assert!(AlphaIndex::new(1, 0).is_err());
        assert!(AlphaIndex::new(5, 2).is_err());
        assert!(AlphaIndex::new(2, 1).is_ok());
    }

    #[test]
    fn parses_and_displays() {
        assert_eq!("1/2".parse::<AlphaIndex>().unwrap(), AlphaIndex::HALF);
        assert_eq!(" 3 / 2 ".parse::<AlphaIndex>().unwrap(), AlphaIndex::THREE_HALVES);
        assert_eq!("1".parse::<AlphaIndex>().unwrap(), AlphaIndex::CAUCHY);
        assert_eq!(AlphaIndex::THIRD.to_string(), "1/3");
        assert_eq!(AlphaIndex::BROWNIAN.to_string(), "2");
        assert!("x/2".parse::<AlphaIndex>().is_err());
    }

    #[test]
    fn subordinator_index() {
        assert_eq!(AlphaIndex::CAUCHY.half(), (1, 2));
        assert_eq!(AlphaIndex::HALF.half(), (1, 4));
        assert_eq!(AlphaIndex::BROWNIAN.half(), (1, 1));
    }
}
