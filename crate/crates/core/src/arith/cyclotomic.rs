use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;

use crate::error::{Error, Result};

use super::ntheory::divisors;
use super::rational::{parse_rational, rational_to_string, Rational};

static CYCLOTOMIC_CACHE: Lazy<Mutex<HashMap<u32, Arc<Vec<i64>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Coefficients of Φ_m, constant term first.
pub fn cyclotomic_polynomial(m: u32) -> Arc<Vec<i64>> {
    assert!(m >= 1, "cyclotomic polynomial needs m >= 1");
    if let Some(phi) = CYCLOTOMIC_CACHE.lock().unwrap().get(&m) {
        return phi.clone();
    }
    // X^m - 1 divided by Φ_d for every proper divisor d.
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in divisors(m as u64) {
        if d as u32 == m {
            continue;
        }
        let den = cyclotomic_polynomial(d as u32);
        num = exact_monic_div(&num, &den);
    }
    let phi = Arc::new(num);
    CYCLOTOMIC_CACHE.lock().unwrap().insert(m, phi.clone());
    phi
}

fn exact_monic_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let qlen = rem.len() - dn;
    let mut q = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn];
        q[i] = c;
        for (j, &dj) in den.iter().enumerate() {
            rem[i + j] -= c * dj;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    q
}

/// Element of Q(ζ_m) stored as its residue modulo Φ_m, with integer numerators over one
/// positive denominator coprime to their content.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicNumber {
    conductor: u32,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CyclotomicNumber {
    pub fn degree_of(conductor: u32) -> usize {
        cyclotomic_polynomial(conductor).len() - 1
    }

    pub fn zero(conductor: u32) -> Self {
        Self {
            conductor,
            num: vec![BigInt::zero(); Self::degree_of(conductor)],
            den: BigInt::one(),
        }
    }

    pub fn one(conductor: u32) -> Self {
        Self::from_integer(conductor, 1)
    }

    pub fn from_rational(conductor: u32, q: Rational) -> Self {
        let mut x = Self::zero(conductor);
        let (n, d) = q.into();
        x.num[0] = n;
        x.den = d;
        x.normalized()
    }

    pub fn from_integer(conductor: u32, n: impl Into<BigInt>) -> Self {
        let mut x = Self::zero(conductor);
        x.num[0] = n.into();
        x
    }

    /// Builds an element from any polynomial representative, reducing mod Φ_m.
    pub fn from_coeffs(conductor: u32, coeffs: Vec<Rational>) -> Self {
        let den = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        Self::from_integer_poly(conductor, num, den)
    }

    /// (Σ num_j X^j) / den reduced mod Φ_m; `den` must be nonzero.
    pub fn from_integer_poly(conductor: u32, num: Vec<BigInt>, den: BigInt) -> Self {
        Self {
            conductor,
            num: reduce(conductor, num),
            den,
        }
        .normalized()
    }

    fn normalized(mut self) -> Self {
        if self.den.is_negative() {
            self.den = -self.den;
            for c in &mut self.num {
                *c = -std::mem::take(c);
            }
        }
        if self.num.iter().all(Zero::is_zero) {
            self.den = BigInt::one();
            return self;
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if !g.is_one() {
            self.den /= &g;
            for c in &mut self.num {
                *c /= &g;
            }
        }
        self
    }

    /// ζ_m^e for any integer e.
    pub fn zeta_power(conductor: u32, e: i64) -> Self {
        let e = e.rem_euclid(conductor as i64) as usize;
        let mut c = vec![BigInt::zero(); e + 1];
        c[e] = BigInt::one();
        Self::from_integer_poly(conductor, c, BigInt::one())
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    /// Coefficients in the power basis 1, ζ, ..., ζ^{φ(m)-1}.
    pub fn coeffs(&self) -> Vec<Rational> {
        self.num
            .iter()
            .map(|n| Rational::new(n.clone(), self.den.clone()))
            .collect()
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(Zero::is_zero)
    }

    /// The rational value, if this element lies in Q.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.num[1..].iter().all(Zero::is_zero) {
            Some(Rational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.conductor != other.conductor {
            return Err(Error::ConductorMismatch(self.conductor, other.conductor));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        let g = self.den.gcd(&other.den);
        let fa = &other.den / &g;
        let fb = &self.den / &g;
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| a * &fa + b * &fb)
            .collect();
        Ok(Self {
            conductor: self.conductor,
            num,
            den: &self.den * fa,
        }
        .normalized())
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            conductor: self.conductor,
            num: self.num.iter().map(|a| -a).collect(),
            den: self.den.clone(),
        }
    }

    /// Product reduced mod Φ_m.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.conductor));
        }
        let n = self.num.len();
        let mut prod = vec![BigInt::zero(); 2 * n - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        Ok(Self::from_integer_poly(self.conductor, prod, &self.den * &other.den))
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self {
            conductor: self.conductor,
            num: self.num.iter().map(|a| a * q.numer()).collect(),
            den: &self.den * q.denom(),
        }
        .normalized()
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.conductor);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&base).expect("same conductor");
            }
            base = base.try_mul(&base).expect("same conductor");
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in Q[X] against Φ_m.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(Self::from_rational(self.conductor, q.recip()));
        }
        let phi: Vec<Rational> = cyclotomic_polynomial(self.conductor)
            .iter()
            .map(|&c| Rational::from_integer(c.into()))
            .collect();
        // work with the integer numerator; the denominator multiplies back at the end
        let numer: Vec<Rational> = self.num.iter().cloned().map(Rational::from_integer).collect();
        // invariant: s_i * numer ≡ r_i (mod Φ)
        let mut r0 = phi;
        let mut r1 = trim(numer);
        let mut s0: Vec<Rational> = vec![];
        let mut s1: Vec<Rational> = vec![Rational::one()];
        while r1.len() > 1 {
            let (q, r) = poly_divrem(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r1 is a nonzero constant because Φ_m is irreducible
        let c = r1[0].recip() * Rational::from_integer(self.den.clone());
        let inv: Vec<Rational> = s1.into_iter().map(|a| a * &c).collect();
        Ok(Self::from_coeffs(self.conductor, inv))
    }

    /// Canonical text encoding `[c0, c1, ...]`.
    pub fn encode(&self) -> String {
        let parts: Vec<String> = self.coeffs().iter().map(rational_to_string).collect();
        format!("[{}]", parts.join(", "))
    }

    pub fn parse(conductor: u32, s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("invalid cyclotomic literal {s:?}")))?;
        let coeffs = if inner.trim().is_empty() {
            vec![]
        } else {
            inner
                .split(',')
                .map(|t| parse_rational(t.trim().trim_matches('"')))
                .collect::<Result<Vec<_>>>()?
        };
        if coeffs.len() > Self::degree_of(conductor) {
            return Err(Error::Parse(format!(
                "too many coefficients for conductor {conductor}: {s:?}"
            )));
        }
        Ok(Self::from_coeffs(conductor, coeffs))
    }
}

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(z{}){}", self.conductor, self.encode())
    }
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

fn reduce(conductor: u32, mut c: Vec<BigInt>) -> Vec<BigInt> {
    let phi = cyclotomic_polynomial(conductor);
    let deg = phi.len() - 1;
    for i in (deg..c.len()).rev() {
        let lead = std::mem::take(&mut c[i]);
        if lead.is_zero() {
            continue;
        }
        for (j, &pj) in phi[..deg].iter().enumerate() {
            if pj != 0 {
                c[i - deg + j] -= &lead * pj;
            }
        }
    }
    c.resize(deg, BigInt::zero());
    c
}

fn trim(mut a: Vec<Rational>) -> Vec<Rational> {
    while a.last().is_some_and(Zero::is_zero) {
        a.pop();
    }
    a
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(Rational::zero);
            let y = b.get(i).cloned().unwrap_or_else(Rational::zero);
            x - y
        })
        .collect();
    trim(out)
}

fn poly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (vec![], r);
    }
    let lead = b.last().unwrap().clone();
    let mut q = vec![Rational::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lead;
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] -= &c * bj;
        }
        q[shift] = c;
        r = trim(r);
    }
    (trim(q), r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn cy(m: u32, c: &[(i64, i64)]) -> CyclotomicNumber {
        CyclotomicNumber::from_coeffs(m, c.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_polynomial(10), vec![1, -1, 1, -1, 1]);
        assert_eq!(*cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(2), vec![1, 1]);
    }

    #[test]
    fn multiplication_examples() {
        let i = CyclotomicNumber::zeta_power(4, 1);
        assert_eq!(i.try_mul(&i).unwrap(), cy(4, &[(-1, 1)]));
        let a = cy(4, &[(3, 1), (1, 1)]);
        let b = cy(4, &[(3, 1), (-1, 1)]);
        assert_eq!(a.try_mul(&b).unwrap(), cy(4, &[(10, 1)]));
        let z6 = CyclotomicNumber::zeta_power(6, 1);
        assert_eq!(z6.try_mul(&z6).unwrap(), cy(6, &[(-1, 1), (1, 1)]));
        assert_eq!(z6.pow(6), CyclotomicNumber::one(6));
        assert!(matches!(
            i.try_mul(&z6),
            Err(Error::ConductorMismatch(4, 6))
        ));
    }

    #[test]
    fn inverse_examples() {
        let i = CyclotomicNumber::zeta_power(4, 1);
        assert_eq!(i.inverse().unwrap(), cy(4, &[(0, 1), (-1, 1)]));
        let a = cy(4, &[(3, 1), (1, 1)]);
        // (3 - i)/10, checked by multiplying back
        let inv = a.inverse().unwrap();
        assert_eq!(inv, cy(4, &[(3, 10), (-1, 10)]));
        assert!(a.try_mul(&inv).unwrap().is_one());
        // ζ_6^{-1} = ζ_6^5 = 1 - ζ_6
        let z6 = CyclotomicNumber::zeta_power(6, 1);
        let inv6 = z6.inverse().unwrap();
        assert_eq!(inv6, cy(6, &[(1, 1), (-1, 1)]));
        assert_eq!(inv6, CyclotomicNumber::zeta_power(6, -1));
        assert_eq!(
            CyclotomicNumber::zero(4).inverse(),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn text_encoding() {
        let a = cy(4, &[(-3, 5), (-1, 5)]);
        assert_eq!(a.encode(), "[-3/5, -1/5]");
        assert_eq!(CyclotomicNumber::parse(4, &a.encode()).unwrap(), a);
        assert_eq!(
            CyclotomicNumber::parse(4, r#"["1/2", "3"]"#).unwrap(),
            cy(4, &[(1, 2), (3, 1)])
        );
    }
}
