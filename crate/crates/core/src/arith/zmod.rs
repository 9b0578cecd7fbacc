use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

use super::ntheory::mod_inverse;

/// Residue class modulo p^k.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ZmodPk {
    p: u64,
    k: u32,
    residue: BigInt,
}

impl ZmodPk {
    pub fn new(p: u64, k: u32, value: &BigInt) -> Self {
        let m = BigInt::from(p).pow(k);
        Self {
            p,
            k,
            residue: value.mod_floor(&m),
        }
    }

    pub fn from_i64(p: u64, k: u32, value: i64) -> Self {
        Self::new(p, k, &BigInt::from(value))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn residue(&self) -> &BigInt {
        &self.residue
    }

    pub fn modulus(&self) -> BigInt {
        BigInt::from(self.p).pow(self.k)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        if self.k != other.k {
            return Err(Error::Precondition(format!(
                "mixed moduli p^{} and p^{}",
                self.k, other.k
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::new(self.p, self.k, &(&self.residue + &other.residue)))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::new(self.p, self.k, &(&self.residue * &other.residue)))
    }

    pub fn pow(&self, e: u64) -> Self {
        Self {
            p: self.p,
            k: self.k,
            residue: self.residue.modpow(&BigInt::from(e), &self.modulus()),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        mod_inverse(&self.residue, &self.modulus())
            .map(|r| Self::new(self.p, self.k, &r))
            .ok_or(Error::DivisionByZero)
    }

    pub fn is_one(&self) -> bool {
        self.residue.is_one() || (self.k == 0 && self.residue.is_zero())
    }

    /// Reduction to a smaller modulus p^j, j <= k.
    pub fn reduce_to(&self, j: u32) -> Self {
        assert!(j <= self.k);
        Self::new(self.p, j, &self.residue)
    }
}

impl fmt::Debug for ZmodPk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.residue, self.p, self.k)
    }
}

impl fmt::Display for ZmodPk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.residue)
    }
}
