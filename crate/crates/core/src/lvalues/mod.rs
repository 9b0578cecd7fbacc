//! Bernoulli numbers, generalized Bernoulli numbers, L(1-k, χ), Cohen's H and the
//! valuation / congruence checks built on them.

mod bernoulli;
mod cohen;

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;

use crate::arith::{
    kronecker_symbol, rational_valuation, require_odd_prime, valuation_u64, CyclotomicNumber,
    PadicApprox, Rational, ZmodPk,
};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};

pub use bernoulli::{bernoulli, bernoulli_poly_at, global_bernoulli_cache, BernoulliCache};
pub use cohen::{cohen_h, cohen_memo, fundamental_decomposition, seed_cohen};

type GenBernoulliKey = (usize, u64, u64);

static GEN_BERNOULLI_MEMO: Lazy<Mutex<HashMap<GenBernoulliKey, CyclotomicNumber>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Memoized B_{k,χ} values, keyed by (k, p, t).
pub fn gen_bernoulli_memo() -> Vec<(GenBernoulliKey, CyclotomicNumber)> {
    let mut v: Vec<_> = GEN_BERNOULLI_MEMO
        .lock()
        .unwrap()
        .iter()
        .map(|(k, v)| (*k, v.clone()))
        .collect();
    v.sort_by_key(|e| e.0);
    v
}

pub fn seed_gen_bernoulli(key: GenBernoulliKey, value: CyclotomicNumber) {
    GEN_BERNOULLI_MEMO.lock().unwrap().insert(key, value);
}

/// f^{k-1} Σ_{a=0}^{f-1} w(a) B_k(a/f), grouped by weight class.
///
/// `classes[e]` lists the residues a with weight class e; the result is one rational per
/// class. Expanding B_k(a/f) gives Σ_j C(k,j) B_j f^{j-1} Σ_a a^{k-j}.
fn bernoulli_class_sums(k: usize, f: u64, classes: &[Vec<u64>]) -> Vec<Rational> {
    global_bernoulli_cache().ensure(k);
    let row = bernoulli::binomial_row(k);
    let f_big = BigInt::from(f);
    // the j >= 1 weights C(k,j) B_j f^{j-1} over one common denominator
    let terms: Vec<(usize, Rational)> = (1..=k)
        .map(|j| (j, bernoulli(j)))
        .filter(|(_, b)| !b.is_zero())
        .collect();
    let common = terms
        .iter()
        .fold(BigInt::one(), |acc, (_, b)| acc.lcm(b.denom()));
    let mut f_pow = BigInt::one();
    let mut weights = Vec::with_capacity(terms.len());
    let mut next = 1;
    for (j, b) in &terms {
        while next < *j {
            f_pow *= &f_big;
            next += 1;
        }
        weights.push((*j, &common / b.denom() * b.numer() * &row[*j] * &f_pow));
    }
    classes
        .iter()
        .map(|members| {
            if members.is_empty() {
                return Rational::zero();
            }
            // power sums Σ_a a^i for i = 0..=k
            let mut power_sums = vec![BigInt::zero(); k + 1];
            for &a in members {
                let a = BigInt::from(a);
                let mut pw = BigInt::one();
                for s in power_sums.iter_mut() {
                    *s += &pw;
                    pw *= &a;
                }
            }
            let mut acc = BigInt::zero();
            for (j, w) in &weights {
                acc += w * &power_sums[k - j];
            }
            Rational::new(acc, common.clone()) + Rational::new(power_sums[k].clone(), f_big.clone())
        })
        .collect()
}

/// B_{k,χ} = p^{k-1} Σ_a χ(a) B_k(a/p) in Q(ζ_{p-1}).
pub fn generalized_bernoulli(k: usize, chi: &DirichletCharacter) -> CyclotomicNumber {
    let key = (k, chi.p(), chi.exponent());
    if let Some(v) = GEN_BERNOULLI_MEMO.lock().unwrap().get(&key) {
        return v.clone();
    }
    let m = chi.value_conductor();
    let mut classes = vec![Vec::new(); m as usize];
    for a in 1..chi.p() {
        let e = chi.value_exponent(a as i64).expect("a is a unit");
        classes[e as usize].push(a);
    }
    let sums = bernoulli_class_sums(k, chi.p(), &classes);
    let value = sums
        .into_iter()
        .enumerate()
        .filter(|(_, s)| !s.is_zero())
        .fold(CyclotomicNumber::zero(m), |acc, (e, s)| {
            let term = CyclotomicNumber::zeta_power(m, e as i64).scale(&s);
            acc.try_add(&term).expect("same conductor")
        });
    GEN_BERNOULLI_MEMO
        .lock()
        .unwrap()
        .insert(key, value.clone());
    value
}

/// B_{k,χ_D} for the Kronecker character χ_D = (D/·) of modulus |D| (D ≡ 0, 1 mod 4).
///
/// For D = 1 the modulus is 1 and the sum runs over a = 0 only, so B_{k,χ_1} = B_k with
/// B_1 = -1/2.
pub fn generalized_bernoulli_kronecker(k: usize, d: i64) -> Result<Rational> {
    if d == 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(Error::Precondition(format!(
            "{d} is not a discriminant (≡ 0, 1 mod 4)"
        )));
    }
    let f = d.unsigned_abs();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for a in 0..f {
        let w = if f == 1 {
            1
        } else if a == 0 {
            0
        } else {
            kronecker_symbol(d, a)
        };
        match w {
            1 => plus.push(a),
            -1 => minus.push(a),
            _ => {}
        }
    }
    let sums = bernoulli_class_sums(k, f, &[plus, minus]);
    Ok(&sums[0] - &sums[1])
}

/// L(1-k, χ) = -B_{k,χ}/k, with a flag when χ(-1) ≠ (-1)^k forces it to vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LValue {
    pub k: usize,
    pub chi: DirichletCharacter,
    pub value: CyclotomicNumber,
    pub parity_mismatch: bool,
}

pub fn dirichlet_l_neg(k: usize, chi: &DirichletCharacter) -> Result<LValue> {
    if k == 0 {
        return Err(Error::InvalidWeight(0, "L(1-k, χ) needs k >= 1"));
    }
    let weight_sign = if k.is_multiple_of(2) { 1 } else { -1 };
    let b = generalized_bernoulli(k, chi);
    Ok(LValue {
        k,
        chi: chi.clone(),
        value: b.scale(&Rational::new((-1).into(), BigInt::from(k))),
        parity_mismatch: chi.parity() != weight_sign,
    })
}

/// L(1-k, χ_D) = -B_{k,χ_D}/k.
pub fn kronecker_l_neg(k: usize, d: i64) -> Result<Rational> {
    Ok(-generalized_bernoulli_kronecker(k, d)? / Rational::from_integer(BigInt::from(k)))
}

/// v_p(B_l / 2l).
pub fn constant_term_valuation(l: usize, p: u64) -> Result<i64> {
    if l < 2 || l % 2 == 1 {
        return Err(Error::Precondition(format!("l = {l} must be even >= 2")));
    }
    let b = bernoulli(l);
    let vb = rational_valuation(&b, p).expect("B_l ≠ 0 for even l");
    Ok(vb - valuation_u64(2 * l as u64, p) as i64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KummerCheck {
    pub holds: bool,
    pub left: ZmodPk,
    pub right: ZmodPk,
}

/// (1 - p^{k-1})(-B_k/k) mod p^M, which is p-integral when (p-1) ∤ k.
fn kummer_value(k: usize, p: u64, precision: u32) -> Result<ZmodPk> {
    let euler = Rational::one() - Rational::from_integer(BigInt::from(p).pow(k as u32 - 1));
    let q = euler * (-bernoulli(k) / Rational::from_integer(BigInt::from(k)));
    PadicApprox::from_rational(&q, p, precision)
        .residue_mod(precision)
        .ok_or_else(|| Error::Consistency(format!("(1-p^(k-1))ζ(1-k) not integral at k={k}")))
}

/// Kummer congruence between k ≡ k' mod (p-1)p^{M-1}, away from the pole branch.
pub fn kummer_check(k: usize, k_prime: usize, p: u64, precision: u32) -> Result<KummerCheck> {
    require_odd_prime(p)?;
    if precision == 0 {
        return Err(Error::Precondition("M must be >= 1".into()));
    }
    for w in [k, k_prime] {
        if w < 2 || w % 2 == 1 {
            return Err(Error::Precondition(format!("weight {w} must be even >= 2")));
        }
        if (w as u64).is_multiple_of(p - 1) {
            return Err(Error::Precondition(format!(
                "weight {w} ≡ 0 mod p-1 lies on the pole branch"
            )));
        }
    }
    let modulus = BigInt::from(p - 1) * BigInt::from(p).pow(precision - 1);
    if (BigInt::from(k) - BigInt::from(k_prime)) % &modulus != BigInt::zero() {
        return Err(Error::Precondition(format!(
            "{k} ≢ {k_prime} mod {modulus}"
        )));
    }
    let left = kummer_value(k, p, precision)?;
    let right = kummer_value(k_prime, p, precision)?;
    Ok(KummerCheck {
        holds: left == right,
        left,
        right,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{factorize, rat};

    fn chi(p: u64, t: u64) -> DirichletCharacter {
        DirichletCharacter::new(p, t).unwrap()
    }

    #[test]
    fn generalized_bernoulli_examples() {
        // direct sum (1·1 + i·2 + (-i)·3 + (-1)·4)/5 - (1/2)(1 + i - i - 1) = (-3-i)/5
        let b = generalized_bernoulli(1, &chi(5, 1));
        assert_eq!(
            b,
            CyclotomicNumber::from_coeffs(4, vec![rat(-3, 5), rat(-1, 5)])
        );
        assert_eq!(generalized_bernoulli_kronecker(3, -3).unwrap(), rat(2, 3));
        assert_eq!(generalized_bernoulli_kronecker(3, -4).unwrap(), rat(3, 2));
        assert_eq!(generalized_bernoulli_kronecker(1, -3).unwrap(), rat(-1, 3));
        assert!(generalized_bernoulli_kronecker(3, 2).is_err());
    }

    #[test]
    fn trivial_modulus_one_is_ordinary_bernoulli() {
        for k in 0..30 {
            assert_eq!(generalized_bernoulli_kronecker(k, 1).unwrap(), bernoulli(k));
        }
        assert_eq!(generalized_bernoulli_kronecker(1, 1).unwrap(), rat(-1, 2));
    }

    #[test]
    fn principal_character_mod_p_removes_euler_factor() {
        for k in 1..15usize {
            let expected = (Rational::one() - Rational::from_integer(BigInt::from(5).pow(k as u32 - 1)))
                * bernoulli(k);
            let b = generalized_bernoulli(k, &chi(5, 0));
            assert_eq!(b.as_rational().unwrap(), expected, "k={k}");
        }
    }

    #[test]
    fn l_values() {
        let l = dirichlet_l_neg(1, &chi(5, 1)).unwrap();
        assert_eq!(
            l.value,
            CyclotomicNumber::from_coeffs(4, vec![rat(3, 5), rat(1, 5)])
        );
        assert!(!l.parity_mismatch);
        assert_eq!(kronecker_l_neg(4, 1).unwrap(), rat(1, 120));
        let l2 = dirichlet_l_neg(2, &chi(5, 1)).unwrap();
        assert!(l2.parity_mismatch);
        assert!(l2.value.is_zero());
    }

    #[test]
    fn parity_vanishing() {
        for p in [5u64, 7] {
            for t in 0..p - 1 {
                for k in 1..=12usize {
                    let l = dirichlet_l_neg(k, &chi(p, t)).unwrap();
                    if l.parity_mismatch {
                        assert!(l.value.is_zero(), "p={p} t={t} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn von_staudt_clausen() {
        for k in (2..=400).step_by(2) {
            let expected: u64 = (2..=k as u64 + 1)
                .filter(|&q| factorize(q).len() == 1 && factorize(q)[0].1 == 1)
                .filter(|&q| (k as u64).is_multiple_of(q - 1))
                .product();
            assert_eq!(bernoulli(k).denom(), &BigInt::from(expected), "k={k}");
        }
    }

    #[test]
    fn constant_term_valuations() {
        assert_eq!(constant_term_valuation(60, 5).unwrap(), -2);
        assert_eq!(constant_term_valuation(360, 5).unwrap(), -2);
        assert_eq!(constant_term_valuation(12, 7).unwrap(), -1);
        assert_eq!(rational_valuation(&bernoulli(60), 5), Some(-1));
        for (p, a) in [(5u64, 3usize), (7, 4)] {
            for m in [2u32, 3] {
                let l = a * p as usize * (p.pow(m - 1) as usize - 1);
                assert_eq!(constant_term_valuation(l, p).unwrap(), -2, "p={p} l={l}");
            }
        }
        assert!(constant_term_valuation(7, 5).is_err());
    }

    #[test]
    fn kummer_congruences() {
        assert!(kummer_check(2, 6, 5, 1).unwrap().holds);
        assert!(kummer_check(2, 8, 7, 1).unwrap().holds);
        assert!(kummer_check(2, 22, 5, 2).unwrap().holds);
        assert!(matches!(
            kummer_check(4, 8, 5, 1),
            Err(Error::Precondition(_))
        ));
        assert!(kummer_check(2, 4, 5, 1).is_err());
    }
}
