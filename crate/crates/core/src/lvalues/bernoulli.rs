use std::sync::RwLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;

use crate::arith::Rational;

/// Append-only table of Bernoulli numbers B_0, B_1, ... (B_1 = -1/2).
///
/// Readers take the shared lock; extension computes outside the lock and publishes
/// the longer table in one write.
pub struct BernoulliCache {
    table: RwLock<Vec<Rational>>,
}

impl Default for BernoulliCache {
    fn default() -> Self {
        Self::new()
    }
}

impl BernoulliCache {
    pub fn new() -> Self {
        Self {
            table: RwLock::new(Vec::new()),
        }
    }

    pub fn len(&self) -> usize {
        self.table.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, k: usize) -> Rational {
        if let Some(b) = self.table.read().unwrap().get(k) {
            return b.clone();
        }
        self.ensure(k);
        self.table.read().unwrap()[k].clone()
    }

    /// Makes B_0..=B_k available.
    pub fn ensure(&self, k: usize) {
        let have = self.len();
        if k < have {
            return;
        }
        let target = (k + 1).max(have + have / 4).max(16);
        let fresh = bernoulli_table(target);
        let mut w = self.table.write().unwrap();
        if fresh.len() > w.len() {
            *w = fresh;
        }
    }

    /// Installs a precomputed prefix B_0..B_{n-1} (e.g. from the disk cache).
    pub fn seed(&self, values: Vec<Rational>) {
        let mut w = self.table.write().unwrap();
        if values.len() > w.len() {
            *w = values;
        }
    }

    pub fn snapshot(&self) -> Vec<Rational> {
        self.table.read().unwrap().clone()
    }
}

static GLOBAL: Lazy<BernoulliCache> = Lazy::new(BernoulliCache::new);

pub fn global_bernoulli_cache() -> &'static BernoulliCache {
    &GLOBAL
}

/// B_k with the convention B_1 = -1/2.
pub fn bernoulli(k: usize) -> Rational {
    GLOBAL.get(k)
}

/// B_0..B_{len-1} from the tangent numbers T_n:
/// B_{2n} = (-1)^{n-1} 2n T_n / (4^n (4^n - 1)).
fn bernoulli_table(len: usize) -> Vec<Rational> {
    let n_max = len / 2;
    let mut t = vec![BigInt::zero(); n_max + 1];
    if n_max >= 1 {
        t[1] = BigInt::one();
    }
    for k in 2..=n_max {
        t[k] = &t[k - 1] * (k - 1);
    }
    for k in 2..=n_max {
        for j in k..=n_max {
            t[j] = &t[j - 1] * (j - k) + &t[j] * (j - k + 2);
        }
    }
    let mut out = vec![Rational::zero(); len];
    out[0] = Rational::one();
    if len > 1 {
        out[1] = Rational::new((-1).into(), 2.into());
    }
    for n in 1..=n_max {
        if 2 * n >= len {
            break;
        }
        let four_n = BigInt::one() << (2 * n);
        let num = &t[n] * (2 * n);
        let den = &four_n * (&four_n - 1u32);
        let b = Rational::new(num, den);
        out[2 * n] = if n % 2 == 1 { b } else { -b };
    }
    out
}

/// C(n, k) for all k, as a row.
pub(crate) fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 1..=n {
        c = c * (n + 1 - k) / k;
        row.push(c.clone());
    }
    row
}

/// B_k(x) = Σ_j C(k,j) B_j x^{k-j}.
pub fn bernoulli_poly_at(k: usize, x: &Rational) -> Rational {
    GLOBAL.ensure(k);
    let row = binomial_row(k);
    // Horner in x over j = 0..k
    let mut acc = Rational::zero();
    for j in 0..=k {
        acc = acc * x + Rational::from_integer(row[j].clone()) * bernoulli(j);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    /// Akiyama–Tanigawa, independent of the tangent-number route (gives B_1 = +1/2).
    fn akiyama_tanigawa(n: usize) -> Vec<Rational> {
        let mut a: Vec<Rational> = Vec::new();
        let mut out = Vec::new();
        for m in 0..=n {
            a.push(rat(1, (m + 1) as i64));
            for j in (1..=m).rev() {
                a[j - 1] = Rational::from_integer(BigInt::from(j)) * (&a[j - 1] - &a[j]);
            }
            out.push(a[0].clone());
        }
        out
    }

    /// Convolution recurrence Σ_{j<=k} C(k+1,j) B_j = 0.
    fn convolution(n: usize) -> Vec<Rational> {
        let mut b = vec![Rational::one()];
        for k in 1..=n {
            let row = binomial_row(k + 1);
            let s: Rational = (0..k)
                .map(|j| Rational::from_integer(row[j].clone()) * &b[j])
                .sum();
            b.push(-s / Rational::from_integer(row[k].clone()));
        }
        b
    }

    #[test]
    fn matches_independent_oracles() {
        let at = akiyama_tanigawa(60);
        let conv = convolution(60);
        for k in 0..=60 {
            let b = bernoulli(k);
            assert_eq!(b, conv[k], "k={k}");
            if k != 1 {
                assert_eq!(b, at[k], "k={k}");
            }
        }
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(12), rat(-691, 2730));
        assert_eq!(bernoulli(3), rat(0, 1));
    }

    #[test]
    fn poly_values() {
        assert_eq!(bernoulli_poly_at(3, &rat(1, 3)), rat(1, 27));
        assert_eq!(bernoulli_poly_at(3, &rat(2, 3)), rat(-1, 27));
        for k in 0..20 {
            assert_eq!(bernoulli_poly_at(k, &rat(0, 1)), bernoulli(k));
        }
        // B_3(x) = x^3 - 3x^2/2 + x/2 directly
        let x = rat(5, 7);
        let direct = &x * &x * &x - rat(3, 2) * &x * &x + rat(1, 2) * &x;
        assert_eq!(bernoulli_poly_at(3, &x), direct);
    }

    #[test]
    fn cache_extends_and_seeds() {
        let cache = BernoulliCache::new();
        assert!(cache.is_empty());
        assert_eq!(cache.get(20), rat(-174611, 330));
        let n = cache.len();
        assert!(n > 20);
        let other = BernoulliCache::new();
        other.seed(cache.snapshot());
        assert_eq!(other.len(), n);
        assert_eq!(other.get(10), rat(5, 66));
    }
}
