use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::Zero;
use once_cell::sync::Lazy;

use crate::arith::{divisor_power_sum, divisors, factorize, kronecker_symbol, moebius, Rational};
use crate::error::Result;

use super::{bernoulli, kronecker_l_neg};

static MEMO: Lazy<Mutex<HashMap<(usize, u64), Rational>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Writes a nonzero discriminant d0 ≡ 0, 1 mod 4 as D·f² with D fundamental (or D = 1).
pub fn fundamental_decomposition(d0: i64) -> (i64, u64) {
    assert!(d0 != 0 && matches!(d0.rem_euclid(4), 0 | 1));
    let mut core: i64 = d0.signum();
    let mut square: u64 = 1;
    for (q, e) in factorize(d0.unsigned_abs()) {
        if e % 2 == 1 {
            core *= q as i64;
        }
        square *= q.pow(e / 2);
    }
    if core.rem_euclid(4) == 1 {
        (core, square)
    } else {
        debug_assert!(square.is_multiple_of(2));
        (4 * core, square / 2)
    }
}

/// Cohen's H(r, N); H(1, N) is the Hurwitz class number for N > 0.
pub fn cohen_h(r: usize, n: u64) -> Result<Rational> {
    assert!(r >= 1, "cohen_h needs r >= 1");
    if let Some(v) = MEMO.lock().unwrap().get(&(r, n)) {
        return Ok(v.clone());
    }
    let value = if n == 0 {
        -bernoulli(2 * r) / Rational::from_integer(BigInt::from(2 * r))
    } else {
        let d0 = if r.is_multiple_of(2) { n as i64 } else { -(n as i64) };
        if matches!(d0.rem_euclid(4), 2 | 3) {
            Rational::zero()
        } else {
            let (d, f) = fundamental_decomposition(d0);
            let l = kronecker_l_neg(r, d)?;
            let mut s = BigInt::zero();
            for e in divisors(f) {
                let mu = moebius(e);
                if mu == 0 {
                    continue;
                }
                let chi = kronecker_symbol(d, e);
                if chi == 0 {
                    continue;
                }
                let term = BigInt::from(e).pow(r as u32 - 1)
                    * divisor_power_sum(f / e, 2 * r as u32 - 1);
                if mu * chi > 0 {
                    s += term;
                } else {
                    s -= term;
                }
            }
            l * Rational::from_integer(s)
        }
    };
    MEMO.lock().unwrap().insert((r, n), value.clone());
    Ok(value)
}

pub fn cohen_memo() -> Vec<((usize, u64), Rational)> {
    let mut v: Vec<_> = MEMO
        .lock()
        .unwrap()
        .iter()
        .map(|(k, v)| (*k, v.clone()))
        .collect();
    v.sort_by_key(|e| e.0);
    v
}

pub fn seed_cohen(key: (usize, u64), value: Rational) {
    MEMO.lock().unwrap().insert(key, value);
}
