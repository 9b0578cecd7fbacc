use std::fmt::Debug;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::arith::{parse_rational, rational_to_string, CyclotomicNumber, PadicApprox, Rational};
use crate::error::{Error, Result};

/// Which of the three admitted coefficient rings a series lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RingTag {
    Rational,
    Cyclotomic { conductor: u32 },
    Padic { p: u64, relprec: u32 },
}

/// Context of the p-adic coefficient ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PadicRing {
    pub p: u64,
    pub relprec: u32,
}

/// The ring interface shared by every coefficient type.
pub trait Coefficient: Clone + Debug + PartialEq + Send + Sync {
    /// Data needed to build constants (conductor, prime and precision, ...).
    type Ring: Clone + Debug + PartialEq + Send + Sync;

    fn zero(ring: &Self::Ring) -> Self;
    fn one(ring: &Self::Ring) -> Self;
    fn try_add(&self, other: &Self) -> Result<Self>;
    fn try_mul(&self, other: &Self) -> Result<Self>;
    fn neg(&self) -> Self;
    /// True only for an exact zero; a p-adic O(p^a) is not skipped.
    fn is_zero(&self) -> bool;
    fn inverse(&self) -> Result<Self>;

    fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    fn tag(ring: &Self::Ring) -> RingTag;
    fn ring_from_tag(tag: &RingTag) -> Result<Self::Ring>;
    fn to_json(&self) -> Value;
    fn from_json(v: &Value, ring: &Self::Ring) -> Result<Self>;
}

impl Coefficient for Rational {
    type Ring = ();

    fn zero(_: &()) -> Self {
        <Rational as Zero>::zero()
    }
    fn one(_: &()) -> Self {
        <Rational as One>::one()
    }
    fn try_add(&self, other: &Self) -> Result<Self> {
        Ok(self + other)
    }
    fn try_mul(&self, other: &Self) -> Result<Self> {
        Ok(self * other)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        <Rational as Zero>::is_zero(self)
    }
    fn inverse(&self) -> Result<Self> {
        if <Rational as Zero>::is_zero(self) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.recip())
    }
    fn tag(_: &()) -> RingTag {
        RingTag::Rational
    }
    fn ring_from_tag(tag: &RingTag) -> Result<()> {
        match tag {
            RingTag::Rational => Ok(()),
            other => Err(Error::RingMismatch(format!("expected rational, got {other:?}"))),
        }
    }
    fn to_json(&self) -> Value {
        Value::String(rational_to_string(self))
    }
    fn from_json(v: &Value, _: &()) -> Result<Self> {
        v.as_str()
            .ok_or_else(|| Error::Parse(format!("expected rational string, got {v}")))
            .and_then(parse_rational)
    }
}

impl Coefficient for CyclotomicNumber {
    type Ring = u32;

    fn zero(ring: &u32) -> Self {
        CyclotomicNumber::zero(*ring)
    }
    fn one(ring: &u32) -> Self {
        CyclotomicNumber::one(*ring)
    }
    fn try_add(&self, other: &Self) -> Result<Self> {
        CyclotomicNumber::try_add(self, other)
    }
    fn try_mul(&self, other: &Self) -> Result<Self> {
        CyclotomicNumber::try_mul(self, other)
    }
    fn neg(&self) -> Self {
        CyclotomicNumber::neg(self)
    }
    fn is_zero(&self) -> bool {
        CyclotomicNumber::is_zero(self)
    }
    fn inverse(&self) -> Result<Self> {
        CyclotomicNumber::inverse(self)
    }
    fn tag(ring: &u32) -> RingTag {
        RingTag::Cyclotomic { conductor: *ring }
    }
    fn ring_from_tag(tag: &RingTag) -> Result<u32> {
        match tag {
            RingTag::Cyclotomic { conductor } => Ok(*conductor),
            other => Err(Error::RingMismatch(format!(
                "expected cyclotomic, got {other:?}"
            ))),
        }
    }
    fn to_json(&self) -> Value {
        Value::Array(
            self.coeffs()
                .iter()
                .map(|c| Value::String(rational_to_string(c)))
                .collect(),
        )
    }
    fn from_json(v: &Value, ring: &u32) -> Result<Self> {
        let items = v
            .as_array()
            .ok_or_else(|| Error::Parse(format!("expected coefficient list, got {v}")))?;
        let coeffs = items
            .iter()
            .map(|c| Rational::from_json(c, &()))
            .collect::<Result<Vec<_>>>()?;
        if coeffs.len() > CyclotomicNumber::degree_of(*ring) {
            return Err(Error::Parse(format!(
                "too many coefficients for conductor {ring}"
            )));
        }
        Ok(CyclotomicNumber::from_coeffs(*ring, coeffs))
    }
}

impl Coefficient for PadicApprox {
    type Ring = PadicRing;

    fn zero(ring: &PadicRing) -> Self {
        PadicApprox::exact_zero(ring.p)
    }
    fn one(ring: &PadicRing) -> Self {
        PadicApprox::one(ring.p, ring.relprec)
    }
    fn try_add(&self, other: &Self) -> Result<Self> {
        PadicApprox::try_add(self, other)
    }
    fn try_mul(&self, other: &Self) -> Result<Self> {
        PadicApprox::try_mul(self, other)
    }
    fn neg(&self) -> Self {
        PadicApprox::neg(self)
    }
    fn is_zero(&self) -> bool {
        self.is_exact_zero()
    }
    fn inverse(&self) -> Result<Self> {
        PadicApprox::inverse(self)
    }
    fn tag(ring: &PadicRing) -> RingTag {
        RingTag::Padic {
            p: ring.p,
            relprec: ring.relprec,
        }
    }
    fn ring_from_tag(tag: &RingTag) -> Result<PadicRing> {
        match tag {
            RingTag::Padic { p, relprec } => Ok(PadicRing {
                p: *p,
                relprec: *relprec,
            }),
            other => Err(Error::RingMismatch(format!("expected p-adic, got {other:?}"))),
        }
    }
    fn to_json(&self) -> Value {
        PadicApprox::to_json(self)
    }
    fn from_json(v: &Value, ring: &PadicRing) -> Result<Self> {
        PadicApprox::from_json(ring.p, v)
    }
}
