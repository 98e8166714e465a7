//! Formal products of theta constants with an exact root-of-unity prefactor.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::chars::ThetaChar;
use crate::error::{Error, Result};

/// `exp(2 pi i prefactor) * prod theta[char]^exp` with canonically reduced
/// characteristics, so that equality is a pure data comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaProduct {
    prefactor: BigRational,
    factors: BTreeMap<ThetaChar, i64>,
}

/// Representative of `q` in `[0, 1)`.
fn frac(q: &BigRational) -> BigRational {
    q - q.floor()
}

impl ThetaProduct {
    /// Builds a product, reducing every characteristic into `[0, den)` and
    /// absorbing the reduction phases into the prefactor.
    ///
    /// All characteristics must share `g` and the denominator.
    pub fn new(
        prefactor: BigRational,
        factors: impl IntoIterator<Item = (ThetaChar, i64)>,
    ) -> ThetaProduct {
        let mut pre = prefactor;
        let mut map: BTreeMap<ThetaChar, i64> = BTreeMap::new();
        for (ch, e) in factors {
            if e == 0 {
                continue;
            }
            let (red, phase) = ch.reduce();
            pre += phase * BigRational::from_integer(BigInt::from(e));
            if let Some((first, _)) = map.iter().next() {
                assert_eq!(first.g(), red.g(), "mixed genus in one theta product");
                assert_eq!(first.den(), red.den(), "mixed denominators in one theta product");
            }
            let slot = map.entry(red).or_insert(0);
            *slot += e;
            if *slot == 0 {
                let dead: Vec<ThetaChar> =
                    map.iter().filter(|(_, &v)| v == 0).map(|(k, _)| k.clone()).collect();
                for k in dead {
                    map.remove(&k);
                }
            }
        }
        ThetaProduct { prefactor: frac(&pre), factors: map }
    }

    pub fn one() -> ThetaProduct {
        ThetaProduct { prefactor: BigRational::zero(), factors: BTreeMap::new() }
    }

    pub fn from_factor(ch: ThetaChar, exp: i64) -> ThetaProduct {
        ThetaProduct::new(BigRational::zero(), [(ch, exp)])
    }

    /// The product `zeta_8^j * self`.
    pub fn with_zeta8(&self, j: i64) -> ThetaProduct {
        let mut out = self.clone();
        out.prefactor = frac(&(&out.prefactor + BigRational::new(BigInt::from(j), BigInt::from(8))));
        out
    }

    pub fn prefactor(&self) -> &BigRational {
        &self.prefactor
    }

    pub fn factors(&self) -> impl Iterator<Item = (&ThetaChar, i64)> {
        self.factors.iter().map(|(k, &v)| (k, v))
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn mul(&self, other: &ThetaProduct) -> ThetaProduct {
        ThetaProduct::new(
            &self.prefactor + &other.prefactor,
            self.factors
                .iter()
                .map(|(k, &v)| (k.clone(), v))
                .chain(other.factors.iter().map(|(k, &v)| (k.clone(), v))),
        )
    }

    pub fn inv(&self) -> ThetaProduct {
        ThetaProduct::new(
            -&self.prefactor,
            self.factors.iter().map(|(k, &v)| (k.clone(), -v)),
        )
    }

    pub fn pow(&self, n: i64) -> ThetaProduct {
        ThetaProduct::new(
            &self.prefactor * BigRational::from_integer(BigInt::from(n)),
            self.factors.iter().map(|(k, &v)| (k.clone(), v * n)),
        )
    }

    /// Sum of all exponents; zero for the quotients covered by the
    /// transformation theorem.
    pub fn total_exponent(&self) -> i64 {
        self.factors.values().sum()
    }

    pub fn is_balanced(&self) -> bool {
        self.total_exponent() == 0
    }

    /// Sum of the positive exponents (the numerator degree).
    pub fn numerator_degree(&self) -> i64 {
        self.factors.values().filter(|&&v| v > 0).sum()
    }

    /// The level `N = 2 D^2` at which the full matrix action is defined;
    /// `None` for the empty product.
    pub fn level(&self) -> Option<BigInt> {
        self.factors.keys().next().map(|ch| BigInt::from(2) * ch.den() * ch.den())
    }
}

impl fmt::Display for ThetaProduct {
    /// `zeta8^j * t12^6 / (t8^2 * t9^2 * t15^2)` when all characteristics
    /// carry Dupont indices; otherwise factors print as
    /// `[n11,n12;n21,n22]/den^exp`. The prefactor prints as `zeta8^j` when
    /// its denominator divides 8 and as `e(p/q)` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut head: Vec<String> = Vec::new();
        if !self.prefactor.is_zero() {
            let eighth = &self.prefactor * BigRational::from_integer(BigInt::from(8));
            if eighth.is_integer() {
                head.push(format!("zeta8^{}", eighth.to_integer()));
            } else {
                head.push(format!("e({})", self.prefactor));
            }
        }
        let fmt_factor = |ch: &ThetaChar, e: i64| -> String {
            let base = match ch.dupont_index() {
                Some(idx) => format!("t{idx}"),
                None => {
                    let join = |v: &[BigInt]| {
                        v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
                    };
                    format!("[{};{}]/{}", join(ch.num1()), join(ch.num2()), ch.den())
                }
            };
            if e == 1 {
                base
            } else {
                format!("{base}^{e}")
            }
        };
        let mut den: Vec<String> = Vec::new();
        for (ch, &e) in &self.factors {
            if e > 0 {
                head.push(fmt_factor(ch, e));
            } else {
                den.push(fmt_factor(ch, -e));
            }
        }
        if head.is_empty() {
            head.push("1".into());
        }
        write!(f, "{}", head.join(" * "))?;
        if !den.is_empty() {
            write!(f, " / ({})", den.join(" * "))?;
        }
        Ok(())
    }
}

fn parse_exponent(s: &str) -> Result<(String, i64)> {
    match s.split_once('^') {
        None => Ok((s.trim().to_string(), 1)),
        Some((base, e)) => {
            let e: i64 = e
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in `{s}`")))?;
            if e < 0 {
                return Err(Error::Parse(
                    "negative exponents belong on the denominator side".into(),
                ));
            }
            Ok((base.trim().to_string(), e))
        }
    }
}

fn parse_term(term: &str, sign: i64, pre: &mut BigRational, out: &mut Vec<(ThetaChar, i64)>) -> Result<()> {
    let term = term.trim();
    if term == "1" {
        return Ok(());
    }
    if let Some(rest) = term.strip_prefix("zeta8") {
        let j: i64 = if rest.is_empty() {
            1
        } else {
            rest.strip_prefix('^')
                .ok_or_else(|| Error::Parse(format!("malformed `{term}`")))?
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad zeta8 exponent in `{term}`")))?
        };
        *pre += BigRational::new(BigInt::from(sign * j), BigInt::from(8));
        return Ok(());
    }
    if let Some(rest) = term.strip_prefix("e(") {
        let inner = rest
            .strip_suffix(')')
            .ok_or_else(|| Error::Parse(format!("unclosed phase in `{term}`")))?;
        let q = BigRational::from_str(inner.trim())
            .map_err(|_| Error::Parse(format!("bad phase `{inner}`")))?;
        *pre += q * BigRational::from_integer(BigInt::from(sign));
        return Ok(());
    }
    if let Some(rest) = term.strip_prefix('t') {
        let (idx, e) = parse_exponent(rest)?;
        let idx: u8 = idx
            .parse()
            .map_err(|_| Error::Parse(format!("bad theta index in `{term}`")))?;
        out.push((ThetaChar::from_dupont(idx)?, sign * e));
        return Ok(());
    }
    if let Some(rest) = term.strip_prefix('[') {
        let (body, tail) = rest
            .split_once(']')
            .ok_or_else(|| Error::Parse(format!("unclosed characteristic in `{term}`")))?;
        let (n1, n2) = body
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("characteristic needs two halves: `{term}`")))?;
        let parse_vec = |s: &str| -> Result<Vec<BigInt>> {
            s.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<BigInt>()
                        .map_err(|_| Error::Parse(format!("bad numerator `{x}`")))
                })
                .collect()
        };
        let den_part = tail
            .strip_prefix('/')
            .ok_or_else(|| Error::Parse(format!("characteristic needs `/den`: `{term}`")))?;
        let (den, e) = parse_exponent(den_part)?;
        let den: BigInt = den
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in `{term}`")))?;
        out.push((ThetaChar::new(den, parse_vec(n1)?, parse_vec(n2)?)?, sign * e));
        return Ok(());
    }
    Err(Error::Parse(format!("unrecognized factor `{term}`")))
}

impl FromStr for ThetaProduct {
    type Err = Error;

    /// Inverse of `Display`. The top-level `/` separating numerator from
    /// denominator is the one not immediately following `]` (which would be
    /// part of a `[..]/den` characteristic); the denominator is
    /// parenthesized.
    fn from_str(s: &str) -> Result<ThetaProduct> {
        let bytes = s.as_bytes();
        let mut split_at = None;
        for (i, &b) in bytes.iter().enumerate() {
            if b == b'/' {
                let prev = s[..i].trim_end().chars().last();
                if prev != Some(']') {
                    split_at = Some(i);
                    break;
                }
            }
        }
        let (num_part, den_part) = match split_at {
            None => (s.trim(), None),
            Some(i) => {
                let den = s[i + 1..].trim();
                let den = den
                    .strip_prefix('(')
                    .and_then(|d| d.strip_suffix(')'))
                    .ok_or_else(|| Error::Parse("denominator must be parenthesized".into()))?;
                (s[..i].trim(), Some(den))
            }
        };
        let mut pre = BigRational::zero();
        let mut factors = Vec::new();
        for term in num_part.split('*') {
            parse_term(term, 1, &mut pre, &mut factors)?;
        }
        if let Some(den) = den_part {
            for term in den.split('*') {
                parse_term(term, -1, &mut pre, &mut factors)?;
            }
        }
        Ok(ThetaProduct::new(pre, factors))
    }
}
