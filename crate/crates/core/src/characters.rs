//! Dirichlet characters mod p, the Teichmüller character and the embeddings
//! Q(ζ_{p-1}) → Q_p attached to the roots of Φ_{p-1} mod p.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{
    cyclotomic_polynomial, discrete_log, euler_phi, primitive_root,
    require_odd_prime, valuation, CyclotomicNumber, PadicApprox, ZmodPk,
};
use crate::error::{Error, Result};

/// A character mod p, stored as the exponent t with χ(g) = ζ_{p-1}^t on the smallest
/// primitive root g.
#[derive(Clone)]
pub struct DirichletCharacter {
    p: u64,
    g: u64,
    t: u64,
    // dlog[x] = log_g(x) for 1 <= x < p
    dlog: Vec<u64>,
}

impl DirichletCharacter {
    pub fn new(p: u64, t: u64) -> Result<Self> {
        require_odd_prime(p)?;
        let g = primitive_root(p)?;
        let mut dlog = vec![0u64; p as usize];
        let mut x = 1u64;
        for e in 0..p - 1 {
            dlog[x as usize] = e;
            x = x * g % p;
        }
        Ok(Self {
            p,
            g,
            t: t % (p - 1),
            dlog,
        })
    }

    pub fn trivial(p: u64) -> Result<Self> {
        Self::new(p, 0)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn generator(&self) -> u64 {
        self.g
    }

    pub fn exponent(&self) -> u64 {
        self.t
    }

    /// Conductor of the value field Q(ζ_{p-1}).
    pub fn value_conductor(&self) -> u32 {
        (self.p - 1) as u32
    }

    pub fn is_trivial(&self) -> bool {
        self.t == 0
    }

    pub fn order(&self) -> u64 {
        let m = self.p - 1;
        if self.t == 0 {
            1
        } else {
            m / num_integer::gcd(m, self.t)
        }
    }

    /// log_g(d) mod p-1, or `None` when p | d.
    pub fn log(&self, d: i64) -> Option<u64> {
        let r = d.rem_euclid(self.p as i64) as usize;
        (r != 0).then(|| self.dlog[r])
    }

    /// The exponent e with χ(d) = ζ_{p-1}^e, or `None` when p | d.
    pub fn value_exponent(&self, d: i64) -> Option<u64> {
        self.log(d).map(|l| l * self.t % (self.p - 1))
    }

    /// χ(d) in Q(ζ_{p-1}); zero when p | d.
    pub fn value(&self, d: i64) -> CyclotomicNumber {
        match self.value_exponent(d) {
            Some(e) => CyclotomicNumber::zeta_power(self.value_conductor(), e as i64),
            None => CyclotomicNumber::zero(self.value_conductor()),
        }
    }

    /// χ(-1) = (-1)^t.
    pub fn parity(&self) -> i32 {
        if self.t.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn inverse(&self) -> Self {
        let mut c = self.clone();
        c.t = (self.p - 1 - self.t) % (self.p - 1);
        c
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::CharacterMismatch(format!(
                "moduli {} and {}",
                self.p, other.p
            )));
        }
        let mut c = self.clone();
        c.t = (self.t + other.t) % (self.p - 1);
        Ok(c)
    }

    /// Character spec string `p:t`.
    pub fn spec(&self) -> String {
        format!("{}:{}", self.p, self.t)
    }
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.t == other.t
    }
}

impl Eq for DirichletCharacter {}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi[{}; chi({})=z^{}]", self.spec(), self.g, self.t)
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec())
    }
}

fn parse_pair(s: &str, what: &str) -> Result<(u64, u64)> {
    let bad = || Error::Parse(format!("invalid {what} spec {s:?}, expected p:n"));
    let (a, b) = s.trim().split_once(':').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

impl FromStr for DirichletCharacter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (p, t) = parse_pair(s, "character")?;
        require_odd_prime(p)?;
        if t >= p - 1 {
            return Err(Error::Parse(format!("exponent {t} out of range [0, {}]", p - 2)));
        }
        Self::new(p, t)
    }
}

/// ω(d): the (p-1)-th root of unity ≡ d mod p, returned mod p^M.
pub fn teichmuller(d: i64, p: u64, precision: u32) -> Result<ZmodPk> {
    require_odd_prime(p)?;
    if d.rem_euclid(p as i64) == 0 {
        return Err(Error::DivisibleByP(d, p));
    }
    let mut x = ZmodPk::from_i64(p, precision, d);
    // d ↦ d^p converges to ω(d) after at most M-1 steps
    for _ in 0..precision {
        let next = x.pow(p);
        if next == x {
            return Ok(x);
        }
        x = next;
    }
    Ok(x)
}

/// Roots of Φ_{p-1} mod p in ascending order: the primitive (p-1)-th roots of unity mod p.
pub fn factor_cyclotomic_mod_p(p: u64) -> Result<Vec<u64>> {
    require_odd_prime(p)?;
    let phi = cyclotomic_polynomial((p - 1) as u32);
    let pi = p as i128;
    let roots: Vec<u64> = (0..p)
        .filter(|&x| {
            let v = phi
                .iter()
                .rev()
                .fold(0i128, |acc, &c| (acc * x as i128 + c as i128).rem_euclid(pi));
            v == 0
        })
        .collect();
    debug_assert_eq!(roots.len() as u64, euler_phi(p - 1));
    Ok(roots)
}

/// The embedding σ_i: ζ_{p-1} ↦ ω(d_i), for the i-th root (1-based, ascending).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingSigma {
    p: u64,
    index: usize,
    root: u64,
    precision: u32,
}

impl EmbeddingSigma {
    pub fn new(p: u64, index: usize, precision: u32) -> Result<Self> {
        let roots = factor_cyclotomic_mod_p(p)?;
        if index == 0 || index > roots.len() {
            return Err(Error::Precondition(format!(
                "embedding index {index} out of range 1..={} for p={p}",
                roots.len()
            )));
        }
        if precision == 0 {
            return Err(Error::Precondition("precision must be positive".into()));
        }
        Ok(Self {
            p,
            index,
            root: roots[index - 1],
            precision,
        })
    }

    /// Parses `p:i`.
    pub fn parse(s: &str, precision: u32) -> Result<Self> {
        let (p, i) = parse_pair(s, "embedding")?;
        Self::new(p, i as usize, precision)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn with_precision(&self, precision: u32) -> Self {
        Self {
            precision,
            ..self.clone()
        }
    }

    /// σ(ζ_{p-1}) = ω(d_i) mod p^M.
    pub fn image_of_zeta(&self) -> ZmodPk {
        teichmuller(self.root as i64, self.p, self.precision).expect("root is a unit")
    }

    pub fn spec(&self) -> String {
        format!("{}:{}", self.p, self.index)
    }
}

// Working precision is raised until the image is known to relative precision M.
const MAX_WORKING_PRECISION: u32 = 4096;

/// σ(x) in Q_p to relative precision M.
pub fn embed(x: &CyclotomicNumber, sigma: &EmbeddingSigma) -> Result<PadicApprox> {
    let p = sigma.p;
    if x.conductor() as u64 != p - 1 {
        return Err(Error::ConductorMismatch(x.conductor(), (p - 1) as u32));
    }
    if x.is_zero() {
        return Ok(PadicApprox::exact_zero(p));
    }
    let m = sigma.precision;
    if let Some(q) = x.as_rational() {
        return Ok(PadicApprox::from_rational(&q, p, m));
    }
    // x = (Σ n_j ζ^j) / den
    let den = x.denominator();
    let nums = x.numerators();
    let den_val = valuation(den, p).unwrap_or(0);
    let mut work = m + den_val + 2;
    loop {
        let omega = teichmuller(sigma.root as i64, p, work)?;
        let modulus = omega.modulus();
        let mut acc = BigInt::zero();
        let mut power = BigInt::one();
        for n in nums {
            acc += n * &power;
            power = (&power * omega.residue()) % &modulus;
        }
        let acc = ((acc % &modulus) + &modulus) % &modulus;
        let s = valuation(&acc, p);
        match s {
            Some(s) if work - s >= m => {
                let num_part = PadicApprox::from_parts(p, s as i64, &(&acc / BigInt::from(p).pow(s)), m);
                let den_part = PadicApprox::from_integer(den, p, m);
                return num_part.try_div(&den_part);
            }
            _ => {
                let next = match s {
                    Some(s) => s + m + 1,
                    None => work * 2,
                };
                if next > MAX_WORKING_PRECISION {
                    return Err(Error::PrecisionLoss(format!(
                        "image of {x} not resolved below p^{MAX_WORKING_PRECISION}"
                    )));
                }
                work = next.max(work + 1);
            }
        }
    }
}

/// α mod p-1 with χ^σ = ω^α; the identity is verified mod p^M at every d.
pub fn find_alpha(chi: &DirichletCharacter, sigma: &EmbeddingSigma) -> Result<u64> {
    if chi.p() != sigma.p() {
        return Err(Error::CharacterMismatch(format!(
            "character mod {} with embedding for p={}",
            chi.p(),
            sigma.p()
        )));
    }
    let p = chi.p();
    let image_g = embed(&chi.value(chi.generator() as i64), sigma)?;
    let residue = image_g
        .residue_mod(1)
        .ok_or_else(|| Error::Consistency("χ(g) is not a p-adic unit".into()))?;
    let r: i64 = residue.residue().try_into().expect("small residue");
    let alpha = discrete_log(p, chi.generator(), r)?;
    for d in 1..p as i64 {
        let lhs = embed(&chi.value(d), sigma)?
            .residue_mod(sigma.precision())
            .ok_or_else(|| Error::Consistency(format!("χ({d})^σ not integral")))?;
        let rhs = teichmuller(d, p, sigma.precision())?.pow(alpha);
        if lhs != rhs {
            return Err(Error::Consistency(format!(
                "χ({d})^σ ≠ ω({d})^{alpha} mod {p}^{}",
                sigma.precision()
            )));
        }
    }
    Ok(alpha)
}

/// Smallest a >= 2 with a ≡ -α mod p-1; validates (-1)^a = χ(-1).
pub fn select_a(alpha: u64, p: u64, parity: i32) -> Result<u64> {
    require_odd_prime(p)?;
    let m = p - 1;
    let mut a = (m - alpha % m) % m;
    while a < 2 {
        a += m;
    }
    let sign = if a.is_multiple_of(2) { 1 } else { -1 };
    if sign != parity {
        return Err(Error::ParityMismatch {
            weight: a as i64,
            chi_sign: parity,
            weight_sign: sign,
        });
    }
    Ok(a)
}

/// A weight in X = Z_p × Z/(p-1)Z, with the Z_p part known mod p^M.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightX {
    pub s_component: ZmodPk,
    pub class_component: u64,
}

impl WeightX {
    pub fn of_integer(k: &BigInt, p: u64, precision: u32) -> Self {
        let m = BigInt::from(p - 1);
        let class: BigInt = ((k % &m) + &m) % &m;
        Self {
            s_component: ZmodPk::new(p, precision, k),
            class_component: class.try_into().expect("class < p-1"),
        }
    }

    /// v_p of the Z_p component, capped at the known precision.
    pub fn s_valuation(&self) -> u32 {
        valuation(self.s_component.residue(), self.s_component.p())
            .unwrap_or(self.s_component.k())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn teichmuller_examples() {
        assert_eq!(teichmuller(2, 5, 2).unwrap().residue(), &BigInt::from(7));
        assert!(teichmuller(2, 5, 2).unwrap().pow(4).is_one());
        assert!(teichmuller(1, 5, 9).unwrap().is_one());
        assert_eq!(teichmuller(6, 7, 2).unwrap().residue(), &BigInt::from(48));
        assert_eq!(teichmuller(10, 5, 3), Err(Error::DivisibleByP(10, 5)));
    }

    #[test]
    fn roots_of_cyclotomic_polynomial() {
        assert_eq!(factor_cyclotomic_mod_p(5).unwrap(), vec![2, 3]);
        assert_eq!(factor_cyclotomic_mod_p(7).unwrap(), vec![3, 5]);
        assert_eq!(factor_cyclotomic_mod_p(11).unwrap(), vec![2, 6, 7, 8]);
    }

    #[test]
    fn character_values() {
        let chi: DirichletCharacter = "5:1".parse().unwrap();
        assert_eq!(chi.value(2), CyclotomicNumber::zeta_power(4, 1));
        assert_eq!(chi.value(4), CyclotomicNumber::from_integer(4, -1));
        assert!(chi.value(10).is_zero());
        assert_eq!(chi.parity(), -1);
        assert_eq!(chi.inverse().spec(), "5:3");
        assert!(chi.try_mul(&chi.inverse()).unwrap().is_trivial());
        assert_eq!(chi.order(), 4);
        assert_eq!(DirichletCharacter::new(7, 2).unwrap().order(), 3);
        assert_eq!(DirichletCharacter::new(7, 0).unwrap().order(), 1);
        assert!("5:4".parse::<DirichletCharacter>().is_err());
        assert!("4:1".parse::<DirichletCharacter>().is_err());
    }

    #[test]
    fn embedding_examples() {
        let s1 = EmbeddingSigma::new(5, 1, 2).unwrap();
        let i = CyclotomicNumber::zeta_power(4, 1);
        let e = embed(&i, &s1).unwrap();
        assert_eq!(e.residue_mod(2).unwrap().residue(), &BigInt::from(7));
        let q = CyclotomicNumber::from_rational(4, rat(7, 3));
        assert_eq!(
            embed(&q, &s1).unwrap(),
            PadicApprox::from_rational(&rat(7, 3), 5, 2)
        );
        // (3+i)/5 ↦ (3 + ω(2))/5 where 3 + ω(2) ≡ 10 mod 25
        let x = CyclotomicNumber::from_coeffs(4, vec![rat(3, 5), rat(1, 5)]);
        let ex = embed(&x, &s1).unwrap();
        assert_eq!(ex.valuation(), crate::arith::Valuation::Exact(0));
        assert_eq!(ex.relprec(), 2);
        assert!(EmbeddingSigma::new(5, 3, 2).is_err());
    }

    #[test]
    fn alpha_and_a() {
        let chi: DirichletCharacter = "5:1".parse().unwrap();
        let s1 = EmbeddingSigma::new(5, 1, 10).unwrap();
        let s2 = EmbeddingSigma::new(5, 2, 10).unwrap();
        assert_eq!(find_alpha(&chi, &s1).unwrap(), 1);
        assert_eq!(find_alpha(&chi, &s2).unwrap(), 3);
        assert_eq!(
            find_alpha(&DirichletCharacter::trivial(5).unwrap(), &s1).unwrap(),
            0
        );
        assert_eq!(select_a(1, 5, -1).unwrap(), 3);
        assert_eq!(select_a(3, 5, -1).unwrap(), 5);
        assert_eq!(select_a(0, 5, 1).unwrap(), 4);
        assert!(select_a(1, 5, 1).is_err());
    }

    #[test]
    fn weight_space_coordinates() {
        let w = WeightX::of_integer(&BigInt::from(3 * 125), 5, 10);
        assert_eq!(w.class_component, 3);
        assert_eq!(w.s_valuation(), 3);
    }
}
