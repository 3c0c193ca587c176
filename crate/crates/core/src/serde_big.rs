//! Decimal-string serialization for big numbers. JSON consumers that parse
//! numbers as doubles would otherwise silently round primorials.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serializer};

pub mod uint {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub mod int {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub mod opt_int {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.serialize_some(&v.to_str_radix(10)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Rationals as `"numer/denom"` in lowest terms (`"n"` when integral).
pub mod ratio {
    use super::*;

    pub fn to_string(v: &BigRational) -> String {
        if v.denom() == &BigInt::from(1) {
            v.numer().to_string()
        } else {
            format!("{}/{}", v.numer(), v.denom())
        }
    }

    pub fn parse(s: &str) -> Result<BigRational, String> {
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let n: BigInt = n.trim().parse().map_err(|e| format!("{e}"))?;
        let d: BigInt = d.trim().parse().map_err(|e| format!("{e}"))?;
        if d == BigInt::from(0) {
            return Err("zero denominator".into());
        }
        Ok(BigRational::new(n, d))
    }

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_string(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}
