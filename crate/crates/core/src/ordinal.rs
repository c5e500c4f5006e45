//! Ordinals below ω^ω in Cantor normal form, plus a distinguished `∞`.
//!
//! Values are the range of the Borst rank computed in [`crate::borst`]. Every
//! finite set system yields a natural number; ω and friends only appear when a
//! caller constructs them explicitly (for instance to state that the rank of
//! the tower space is ω).
//!
//! Text form: `w^2*3 + w*1 + 4`, `0`, `inf`. Dimension values additionally
//! render the bounded case as `-1`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// One `ω^exponent · coefficient` summand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub exponent: u32,
    pub coefficient: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    /// Strictly decreasing exponents, coefficients ≥ 1. Empty means zero.
    Cnf(Vec<Term>),
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ordinal(Repr);

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal(Repr::Cnf(Vec::new()))
    }

    pub fn natural(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Ordinal(Repr::Cnf(vec![Term {
                exponent: 0,
                coefficient: n,
            }]))
        }
    }

    pub fn omega() -> Self {
        Ordinal(Repr::Cnf(vec![Term {
            exponent: 1,
            coefficient: 1,
        }]))
    }

    pub fn infinity() -> Self {
        Ordinal(Repr::Infinity)
    }

    /// Builds a value from `(exponent, coefficient)` pairs. The pairs must
    /// already be in normal form.
    pub fn from_terms<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u64)>,
    {
        let terms: Vec<Term> = terms
            .into_iter()
            .map(|(exponent, coefficient)| Term {
                exponent,
                coefficient,
            })
            .collect();
        for t in &terms {
            if t.coefficient == 0 {
                return Err(Error::Ordinal("coefficient must be at least 1".into()));
            }
        }
        for w in terms.windows(2) {
            if w[0].exponent <= w[1].exponent {
                return Err(Error::Ordinal(
                    "exponents must be strictly decreasing".into(),
                ));
            }
        }
        Ok(Ordinal(Repr::Cnf(terms)))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self.0, Repr::Infinity)
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.0, Repr::Cnf(t) if t.is_empty())
    }

    /// The CNF terms; `None` for `∞`.
    pub fn terms(&self) -> Option<&[Term]> {
        match &self.0 {
            Repr::Cnf(t) => Some(t),
            Repr::Infinity => None,
        }
    }

    /// `Some(n)` when the value is a natural number.
    pub fn as_natural(&self) -> Option<u64> {
        match &self.0 {
            Repr::Cnf(t) if t.is_empty() => Some(0),
            Repr::Cnf(t) if t.len() == 1 && t[0].exponent == 0 => Some(t[0].coefficient),
            _ => None,
        }
    }

    pub fn succ(&self) -> Result<Self> {
        match &self.0 {
            Repr::Infinity => Err(Error::Ordinal("successor of inf is undefined".into())),
            Repr::Cnf(terms) => {
                let mut terms = terms.clone();
                match terms.last_mut() {
                    Some(last) if last.exponent == 0 => {
                        last.coefficient = last
                            .coefficient
                            .checked_add(1)
                            .ok_or_else(|| Error::Ordinal("coefficient overflow".into()))?;
                    }
                    _ => terms.push(Term {
                        exponent: 0,
                        coefficient: 1,
                    }),
                }
                Ok(Ordinal(Repr::Cnf(terms)))
            }
        }
    }

    /// Maximum of a non-empty finite collection.
    pub fn sup<'a, I>(values: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Ordinal>,
    {
        values
            .into_iter()
            .max()
            .cloned()
            .ok_or_else(|| Error::Ordinal("sup of an empty set".into()))
    }
}

impl Default for Ordinal {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Self::natural(n)
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Infinity, Repr::Infinity) => Ordering::Equal,
            (Repr::Infinity, _) => Ordering::Greater,
            (_, Repr::Infinity) => Ordering::Less,
            (Repr::Cnf(a), Repr::Cnf(b)) => {
                for (x, y) in a.iter().zip(b.iter()) {
                    let ord = x
                        .exponent
                        .cmp(&y.exponent)
                        .then(x.coefficient.cmp(&y.coefficient));
                    if ord != Ordering::Equal {
                        return ord;
                    }
                }
                a.len().cmp(&b.len())
            }
        }
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = match &self.0 {
            Repr::Infinity => return f.write_str("inf"),
            Repr::Cnf(t) if t.is_empty() => return f.write_str("0"),
            Repr::Cnf(t) => t,
        };
        for (i, t) in terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            match t.exponent {
                0 => write!(f, "{}", t.coefficient)?,
                1 => write!(f, "w*{}", t.coefficient)?,
                e => write!(f, "w^{}*{}", e, t.coefficient)?,
            }
        }
        Ok(())
    }
}

fn parse_term(s: &str) -> Result<Term> {
    let bad = || Error::Ordinal(format!("malformed term `{s}`"));
    let s = s.trim();
    let Some(rest) = s.strip_prefix('w') else {
        let coefficient: u64 = s.parse().map_err(|_| bad())?;
        return Ok(Term {
            exponent: 0,
            coefficient,
        });
    };
    let (exp_part, coef_part) = match rest.split_once('*') {
        Some((e, c)) => (e, Some(c)),
        None => (rest, None),
    };
    let exponent = match exp_part.strip_prefix('^') {
        Some(e) => e.trim().parse().map_err(|_| bad())?,
        None if exp_part.trim().is_empty() => 1,
        None => return Err(bad()),
    };
    let coefficient = match coef_part {
        Some(c) => c.trim().parse().map_err(|_| bad())?,
        None => 1,
    };
    Ok(Term {
        exponent,
        coefficient,
    })
}

impl FromStr for Ordinal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "inf" | "∞" => return Ok(Self::infinity()),
            "0" => return Ok(Self::zero()),
            _ => {}
        }
        let terms = s
            .split('+')
            .map(parse_term)
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(terms.into_iter().map(|t| (t.exponent, t.coefficient)))
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The value of a dimension function: `-1` for bounded spaces, an ordinal,
/// or `∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DimensionValue {
    MinusOne,
    Dim(Ordinal),
    Infinity,
}

impl DimensionValue {
    /// Folds an `∞` ordinal into the `Infinity` variant.
    pub fn from_ordinal(o: Ordinal) -> Self {
        if o.is_infinity() {
            DimensionValue::Infinity
        } else {
            DimensionValue::Dim(o)
        }
    }
}

impl PartialOrd for DimensionValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DimensionValue {
    fn cmp(&self, other: &Self) -> Ordering {
        use DimensionValue::*;
        match (self, other) {
            (MinusOne, MinusOne) | (Infinity, Infinity) => Ordering::Equal,
            (MinusOne, _) | (_, Infinity) => Ordering::Less,
            (_, MinusOne) | (Infinity, _) => Ordering::Greater,
            (Dim(a), Dim(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for DimensionValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DimensionValue::MinusOne => f.write_str("-1"),
            DimensionValue::Dim(o) => o.fmt(f),
            DimensionValue::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for DimensionValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "-1" {
            Ok(DimensionValue::MinusOne)
        } else {
            Ok(Self::from_ordinal(s.parse()?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w_plus(n: u64) -> Ordinal {
        let mut terms = vec![(1, 1)];
        if n > 0 {
            terms.push((0, n));
        }
        Ordinal::from_terms(terms).unwrap()
    }

    #[test]
    fn cmp_examples() {
        assert_eq!(Ordinal::natural(3).cmp(&Ordinal::natural(3)), Ordering::Equal);
        for n in 0..1000 {
            assert!(Ordinal::omega() > Ordinal::natural(n));
        }
        assert!(w_plus(2) > w_plus(1));
        assert!(Ordinal::infinity() > w_plus(7));
    }

    #[test]
    fn succ_and_sup_examples() {
        assert_eq!(Ordinal::zero().succ().unwrap(), Ordinal::natural(1));
        assert_eq!(Ordinal::omega().succ().unwrap(), w_plus(1));
        let s = [2, 5, 3].map(Ordinal::natural);
        assert_eq!(Ordinal::sup(&s).unwrap(), Ordinal::natural(5));
        assert!(Ordinal::infinity().succ().is_err());
        assert!(Ordinal::sup(&[]).is_err());
    }

    #[test]
    fn natural_order_agrees_with_u64() {
        for a in 0..=100u64 {
            for b in 0..=100u64 {
                assert_eq!(Ordinal::natural(a).cmp(&Ordinal::natural(b)), a.cmp(&b));
            }
            assert_eq!(Ordinal::natural(a).succ().unwrap(), Ordinal::natural(a + 1));
        }
    }

    #[test]
    fn rendering() {
        let o = Ordinal::from_terms([(2, 3), (1, 1), (0, 4)]).unwrap();
        assert_eq!(o.to_string(), "w^2*3 + w*1 + 4");
        assert_eq!(Ordinal::zero().to_string(), "0");
        assert_eq!(Ordinal::infinity().to_string(), "inf");
        assert_eq!(DimensionValue::MinusOne.to_string(), "-1");
        assert_eq!("w".parse::<Ordinal>().unwrap(), Ordinal::omega());
        assert_eq!(
            "-1".parse::<DimensionValue>().unwrap(),
            DimensionValue::MinusOne
        );
        assert_eq!(
            "inf".parse::<DimensionValue>().unwrap(),
            DimensionValue::Infinity
        );
    }

    #[test]
    fn rejects_non_normal_forms() {
        assert!(Ordinal::from_terms([(0, 1), (1, 1)]).is_err());
        assert!(Ordinal::from_terms([(1, 0)]).is_err());
        assert!(Ordinal::from_terms([(1, 1), (1, 2)]).is_err());
        assert!("w^x*2".parse::<Ordinal>().is_err());
    }

    #[test]
    fn dimension_value_order() {
        let vals = [
            DimensionValue::MinusOne,
            DimensionValue::Dim(Ordinal::zero()),
            DimensionValue::Dim(Ordinal::omega()),
            DimensionValue::Infinity,
        ];
        for w in vals.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert_eq!(
            DimensionValue::from_ordinal(Ordinal::infinity()),
            DimensionValue::Infinity
        );
    }

    fn arb_ordinal() -> impl Strategy<Value = Ordinal> {
        prop_oneof![
            1 => Just(Ordinal::infinity()),
            9 => proptest::collection::btree_map(0u32..4, 1u64..4, 0..4).prop_map(|m| {
                Ordinal::from_terms(m.into_iter().rev()).unwrap()
            }),
        ]
    }

    proptest! {
        #[test]
        fn cmp_is_a_total_order(a in arb_ordinal(), b in arb_ordinal(), c in arb_ordinal()) {
            prop_assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
            if a <= b && b <= c {
                prop_assert!(a <= c);
            }
            if a.cmp(&b) == Ordering::Equal {
                prop_assert_eq!(&a, &b);
            }
        }

        #[test]
        fn succ_is_strictly_greater(a in arb_ordinal()) {
            if !a.is_infinity() {
                let s = a.succ().unwrap();
                prop_assert!(s > a);
            }
        }

        #[test]
        fn render_parse_round_trip(a in arb_ordinal()) {
            let back: Ordinal = a.to_string().parse().unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
