//! Elementary number theory on machine and big integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// v_p(n) for nonzero n; `None` when n = 0.
pub fn valuation(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

pub fn valuation_u64(mut n: u64, p: u64) -> u32 {
    assert!(n != 0, "valuation of zero");
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn require_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    Ok(())
}

/// Trial-division factorization, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Positive divisors of n > 0 in ascending order.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n > 0);
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn moebius(n: u64) -> i32 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (q, _)| acc / q * (q - 1))
}

/// σ_k(n) = Σ_{d|n} d^k.
pub fn divisor_power_sum(n: u64, k: u32) -> BigInt {
    divisors(n)
        .into_iter()
        .map(|d| BigInt::from(d).pow(k))
        .fold(BigInt::zero(), |a, b| a + b)
}

fn mod_pow_u64(base: u64, mut e: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut b = (base % m) as u128;
    let mut acc = 1u128 % m128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        e >>= 1;
    }
    acc as u64
}

/// Multiplicative order of a modulo n (gcd(a, n) = 1).
pub fn multiplicative_order(a: u64, n: u64) -> u64 {
    let mut x = a % n;
    let mut k = 1;
    while x != 1 {
        x = x * a % n;
        k += 1;
        assert!(k <= n, "{a} is not a unit mod {n}");
    }
    k
}

/// a^{-1} mod m, if it exists; the result lies in [0, m).
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

/// Smallest g >= 2 generating (Z/p)^x.
pub fn primitive_root(p: u64) -> Result<u64> {
    require_odd_prime(p)?;
    let qs: Vec<u64> = factorize(p - 1).into_iter().map(|(q, _)| q).collect();
    (2..p)
        .find(|&g| qs.iter().all(|&q| mod_pow_u64(g, (p - 1) / q, p) != 1))
        .ok_or(Error::NotOddPrime(p))
}

/// The exponent e in [0, p-2] with g^e = x mod p.
pub fn discrete_log(p: u64, g: u64, x: i64) -> Result<u64> {
    let x = x.rem_euclid(p as i64) as u64;
    if x == 0 {
        return Err(Error::DivisibleByP(x as i64, p));
    }
    let mut acc = 1u64;
    for e in 0..p - 1 {
        if acc == x {
            return Ok(e);
        }
        acc = acc * g % p;
    }
    Err(Error::Precondition(format!("{g} is not a primitive root mod {p}")))
}

fn jacobi_symbol(a: i64, n: u64) -> i32 {
    debug_assert!(n % 2 == 1);
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut s = 1;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                s = -s;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            s = -s;
        }
        a %= n;
    }
    if n == 1 {
        s
    } else {
        0
    }
}

/// Kronecker symbol (D/n) for n >= 1.
pub fn kronecker_symbol(d: i64, n: u64) -> i32 {
    assert!(n > 0, "kronecker symbol needs n >= 1");
    let mut n = n;
    let mut s = 1;
    while n.is_multiple_of(2) {
        n /= 2;
        s *= match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => return 0,
        };
    }
    if n == 1 {
        s
    } else {
        s * jacobi_symbol(d, n)
    }
}
