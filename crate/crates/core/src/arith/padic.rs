use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

use super::ntheory::{mod_inverse, valuation};
use super::rational::Rational;
use super::zmod::ZmodPk;

/// What is known about v_p of a p-adic approximation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    /// The valuation is known exactly.
    Exact(i64),
    /// The value is zero to the stated absolute precision.
    AtLeast(i64),
    /// The value is exactly zero.
    Infinite,
}

impl Valuation {
    pub fn lower_bound(&self) -> Option<i64> {
        match *self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    fn key(&self) -> (i64, u8) {
        match *self {
            Valuation::Exact(v) => (v, 0),
            Valuation::AtLeast(v) => (v, 1),
            Valuation::Infinite => (i64::MAX, 2),
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    ExactZero,
    /// O(p^a): zero to absolute precision a.
    ZeroTo(i64),
    /// p^valuation · unit + O(p^{valuation+relprec}), p ∤ unit, 0 < unit < p^relprec.
    Unit {
        valuation: i64,
        unit: BigInt,
        relprec: u32,
    },
}

/// Element of Q_p known to finite precision, in (valuation, unit, relative precision) form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicApprox {
    p: u64,
    repr: Repr,
}

fn pk(p: u64, k: i64) -> BigInt {
    BigInt::from(p).pow(k.max(0) as u32)
}

impl PadicApprox {
    pub fn exact_zero(p: u64) -> Self {
        Self {
            p,
            repr: Repr::ExactZero,
        }
    }

    pub fn zero_to(p: u64, absprec: i64) -> Self {
        Self {
            p,
            repr: Repr::ZeroTo(absprec),
        }
    }

    /// p^valuation · unit + O(p^{valuation+relprec}); `unit` may carry extra factors of p.
    pub fn from_parts(p: u64, valuation: i64, unit: &BigInt, relprec: u32) -> Self {
        let absprec = valuation + relprec as i64;
        match self::valuation(unit, p) {
            None => Self::zero_to(p, absprec),
            Some(w) => {
                let w = w as i64;
                if w >= relprec as i64 {
                    return Self::zero_to(p, absprec);
                }
                let rel = relprec - w as u32;
                let u = (unit / pk(p, w)).mod_floor(&pk(p, rel as i64));
                Self {
                    p,
                    repr: Repr::Unit {
                        valuation: valuation + w,
                        unit: u,
                        relprec: rel,
                    },
                }
            }
        }
    }

    /// The image of an exact rational, to relative precision `relprec`.
    pub fn from_rational(q: &Rational, p: u64, relprec: u32) -> Self {
        if q.is_zero() {
            return Self::exact_zero(p);
        }
        let a = valuation(q.numer(), p).unwrap() as i64;
        let den = q.denom().abs();
        let b = valuation(&den, p).unwrap() as i64;
        let sign = if q.numer().is_negative() { -1 } else { 1 };
        let modulus = pk(p, relprec as i64);
        let nu: BigInt = q.numer().abs() / pk(p, a) * sign;
        let du = den / pk(p, b);
        let inv = mod_inverse(&du, &modulus).expect("unit denominator");
        Self {
            p,
            repr: Repr::Unit {
                valuation: a - b,
                unit: (nu * inv).mod_floor(&modulus),
                relprec,
            },
        }
    }

    pub fn from_integer(n: &BigInt, p: u64, relprec: u32) -> Self {
        Self::from_rational(&Rational::from_integer(n.clone()), p, relprec)
    }

    pub fn one(p: u64, relprec: u32) -> Self {
        Self::from_integer(&BigInt::one(), p, relprec)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn valuation(&self) -> Valuation {
        match &self.repr {
            Repr::ExactZero => Valuation::Infinite,
            Repr::ZeroTo(a) => Valuation::AtLeast(*a),
            Repr::Unit { valuation, .. } => Valuation::Exact(*valuation),
        }
    }

    /// The unit part; zero for (approximate) zeros.
    pub fn unit(&self) -> BigInt {
        match &self.repr {
            Repr::Unit { unit, .. } => unit.clone(),
            _ => BigInt::zero(),
        }
    }

    pub fn relprec(&self) -> u32 {
        match &self.repr {
            Repr::Unit { relprec, .. } => *relprec,
            _ => 0,
        }
    }

    /// Absolute precision; `None` for the exact zero.
    pub fn absprec(&self) -> Option<i64> {
        match &self.repr {
            Repr::ExactZero => None,
            Repr::ZeroTo(a) => Some(*a),
            Repr::Unit {
                valuation, relprec, ..
            } => Some(valuation + *relprec as i64),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::ExactZero)
    }

    pub fn is_zero_to_precision(&self) -> bool {
        matches!(self.repr, Repr::ZeroTo(_))
    }

    pub fn is_zero(&self) -> bool {
        !matches!(self.repr, Repr::Unit { .. })
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        Ok(())
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Unit {
                valuation,
                unit,
                relprec,
            } => Self::from_parts(self.p, *valuation, &-unit, *relprec),
            _ => self.clone(),
        }
    }

    /// Sum, with absolute precision the minimum of the inputs' absolute precisions.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.is_exact_zero() {
            return Ok(other.clone());
        }
        if other.is_exact_zero() {
            return Ok(self.clone());
        }
        let absprec = self.absprec().unwrap().min(other.absprec().unwrap());
        let terms: Vec<(i64, &BigInt)> = [self, other]
            .iter()
            .filter_map(|x| match &x.repr {
                Repr::Unit {
                    valuation, unit, ..
                } if *valuation < absprec => Some((*valuation, unit)),
                _ => None,
            })
            .collect();
        let Some(v0) = terms.iter().map(|t| t.0).min() else {
            return Ok(Self::zero_to(self.p, absprec));
        };
        let sum: BigInt = terms
            .iter()
            .map(|(v, u)| *u * pk(self.p, v - v0))
            .sum();
        Ok(Self::from_parts(
            self.p,
            v0,
            &sum,
            (absprec - v0) as u32,
        ))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    /// Product; relative precision is the minimum of the inputs'.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let p = self.p;
        Ok(match (&self.repr, &other.repr) {
            (Repr::ExactZero, _) | (_, Repr::ExactZero) => Self::exact_zero(p),
            (Repr::ZeroTo(a), Repr::ZeroTo(b)) => Self::zero_to(p, a + b),
            (Repr::ZeroTo(a), Repr::Unit { valuation, .. })
            | (Repr::Unit { valuation, .. }, Repr::ZeroTo(a)) => Self::zero_to(p, a + valuation),
            (
                Repr::Unit {
                    valuation: v1,
                    unit: u1,
                    relprec: r1,
                },
                Repr::Unit {
                    valuation: v2,
                    unit: u2,
                    relprec: r2,
                },
            ) => {
                let rel = (*r1).min(*r2);
                Self {
                    p,
                    repr: Repr::Unit {
                        valuation: v1 + v2,
                        unit: (u1 * u2).mod_floor(&pk(p, rel as i64)),
                        relprec: rel,
                    },
                }
            }
        })
    }

    pub fn inverse(&self) -> Result<Self> {
        match &self.repr {
            Repr::ExactZero => Err(Error::DivisionByZero),
            Repr::ZeroTo(a) => Err(Error::PrecisionLoss(format!(
                "inverse of O({}^{a})",
                self.p
            ))),
            Repr::Unit {
                valuation,
                unit,
                relprec,
            } => {
                let inv = mod_inverse(unit, &pk(self.p, *relprec as i64))
                    .expect("unit is prime to p");
                Ok(Self {
                    p: self.p,
                    repr: Repr::Unit {
                        valuation: -valuation,
                        unit: inv,
                        relprec: *relprec,
                    },
                })
            }
        }
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        self.try_mul(&other.inverse()?)
    }

    /// Caps the relative precision at `relprec`.
    pub fn truncate_relprec(&self, relprec: u32) -> Self {
        match &self.repr {
            Repr::Unit {
                valuation,
                unit,
                relprec: r,
            } if *r > relprec => Self::from_parts(self.p, *valuation, unit, relprec),
            _ => self.clone(),
        }
    }

    /// The value mod p^k, when it is p-integral and known to absolute precision k.
    pub fn residue_mod(&self, k: u32) -> Option<ZmodPk> {
        match &self.repr {
            Repr::ExactZero => Some(ZmodPk::from_i64(self.p, k, 0)),
            Repr::ZeroTo(a) if *a >= k as i64 => Some(ZmodPk::from_i64(self.p, k, 0)),
            Repr::Unit {
                valuation,
                unit,
                relprec,
            } if *valuation >= 0 && valuation + *relprec as i64 >= k as i64 => {
                Some(ZmodPk::new(self.p, k, &(unit * pk(self.p, *valuation))))
            }
            _ => None,
        }
    }

    /// Wire encoding `{"v": int|"inf", "unit": "int", "relprec": int}`.
    pub fn to_json(&self) -> Value {
        match &self.repr {
            Repr::ExactZero => json!({"v": "inf", "unit": "0", "relprec": 0}),
            Repr::ZeroTo(a) => json!({"v": a, "unit": "0", "relprec": 0}),
            Repr::Unit {
                valuation,
                unit,
                relprec,
            } => json!({"v": valuation, "unit": unit.to_string(), "relprec": relprec}),
        }
    }

    pub fn from_json(p: u64, v: &Value) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid p-adic encoding {v}"));
        let unit: BigInt = v
            .get("unit")
            .and_then(Value::as_str)
            .ok_or_else(bad)?
            .parse()
            .map_err(|_| bad())?;
        let relprec = v.get("relprec").and_then(Value::as_u64).ok_or_else(bad)? as u32;
        match v.get("v").ok_or_else(bad)? {
            Value::String(s) if s == "inf" => Ok(Self::exact_zero(p)),
            Value::Number(n) => {
                let val = n.as_i64().ok_or_else(bad)?;
                if relprec == 0 {
                    if !unit.is_zero() {
                        return Err(bad());
                    }
                    Ok(Self::zero_to(p, val))
                } else {
                    let x = Self::from_parts(p, val, &unit, relprec);
                    if x.valuation() != Valuation::Exact(val) {
                        return Err(bad());
                    }
                    Ok(x)
                }
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for PadicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::ExactZero => write!(f, "0"),
            Repr::ZeroTo(a) => write!(f, "O({}^{a})", self.p),
            Repr::Unit {
                valuation,
                unit,
                relprec,
            } => write!(
                f,
                "{p}^{valuation}*{unit} + O({p}^{})",
                valuation + *relprec as i64,
                p = self.p
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn multiplication_adds_valuations() {
        let x = PadicApprox::from_parts(5, 0, &big(2), 12);
        let y = PadicApprox::from_parts(5, 1, &big(3), 12);
        let z = x.try_mul(&y).unwrap();
        assert_eq!(z.valuation(), Valuation::Exact(1));
        assert_eq!(z.unit(), big(6));
        assert_eq!(z.relprec(), 12);
    }

    #[test]
    fn cancellation_to_precision() {
        let one = PadicApprox::from_parts(5, 0, &big(1), 4);
        let minus_one = PadicApprox::from_parts(5, 0, &big(624), 4);
        let s = one.try_add(&minus_one).unwrap();
        assert!(s.is_zero_to_precision());
        assert!(!s.is_exact_zero());
        assert_eq!(s.valuation(), Valuation::AtLeast(4));
    }

    #[test]
    fn inverse_of_negative_valuation() {
        let x = PadicApprox::from_parts(5, -2, &big(3), 10);
        let y = PadicApprox::one(5, 10).try_div(&x).unwrap();
        assert_eq!(y.valuation(), Valuation::Exact(2));
        // modular inverse oracle: 3 * u ≡ 1 mod 5^10
        let m = big(5).pow(10);
        assert_eq!((big(3) * y.unit()).mod_floor(&m), big(1));
        assert_eq!(
            PadicApprox::one(5, 3).try_div(&PadicApprox::exact_zero(5)),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn rational_images() {
        let x = PadicApprox::from_rational(&rat(10, 3), 5, 12);
        assert_eq!(x.valuation(), Valuation::Exact(1));
        let m = big(5).pow(12);
        assert_eq!((x.unit() * big(3)).mod_floor(&m), big(2));
        let b12 = PadicApprox::from_rational(&rat(-691, 2730), 5, 12);
        assert_eq!(b12.valuation(), Valuation::Exact(-1));
        assert!(PadicApprox::from_rational(&rat(0, 1), 5, 12).is_exact_zero());
    }

    #[test]
    fn addition_precision_is_pessimistic() {
        let a = PadicApprox::from_parts(5, 0, &big(1), 3);
        let b = PadicApprox::from_parts(5, 2, &big(1), 10);
        let s = a.try_add(&b).unwrap();
        assert_eq!(s.absprec(), Some(3));
        assert_eq!(s.unit(), big(26));
        let c = PadicApprox::from_parts(5, 5, &big(1), 10);
        // c lies below a's precision and vanishes from the sum
        assert_eq!(a.try_add(&c).unwrap(), a);
        assert!(a.try_add(&PadicApprox::one(7, 3)).is_err());
    }

    #[test]
    fn json_round_trip() {
        for x in [
            PadicApprox::exact_zero(5),
            PadicApprox::zero_to(5, 7),
            PadicApprox::from_rational(&rat(-691, 2730), 5, 12),
        ] {
            assert_eq!(PadicApprox::from_json(5, &x.to_json()).unwrap(), x);
        }
        assert!(PadicApprox::from_json(5, &json!({"v": 0, "unit": "5", "relprec": 3})).is_err());
    }

    #[test]
    fn valuation_ordering() {
        assert!(Valuation::Exact(3) < Valuation::AtLeast(3));
        assert!(Valuation::AtLeast(100) < Valuation::Infinite);
        assert!(Valuation::Exact(-2) < Valuation::Exact(1));
    }
}
