//! Eisenstein series used as building blocks: level-1 E_k, the Hecke series
//! E_{k,χ} on Γ_0(p), and the index-1 Jacobi Eisenstein series.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{divisor_power_sum, divisors, CyclotomicNumber, Rational};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::lvalues::{bernoulli, cohen_h, dirichlet_l_neg};
use crate::qseries::{EllipticSeries, FormMeta, JacobiSeries, SeriesKind};

/// E_k = 1 - (2k/B_k) Σ σ_{k-1}(n) q^n, with E_0 = 1.
pub fn eisenstein_level1(k: usize, trunc: usize) -> Result<EllipticSeries<Rational>> {
    let meta = FormMeta::new(SeriesKind::Elliptic, k as i64, None);
    if k == 0 {
        return Ok(EllipticSeries::constant((), meta, Rational::from_integer(1.into()), trunc));
    }
    if k % 2 == 1 || k < 4 {
        return Err(Error::InvalidWeight(k as i64, "level-1 Eisenstein weight must be 0 or even >= 4"));
    }
    let factor = -Rational::from_integer(BigInt::from(2 * k)) / bernoulli(k);
    EllipticSeries::from_fn((), meta, trunc, |n| {
        Ok(if n == 0 {
            Rational::from_integer(1.into())
        } else {
            &factor * Rational::from_integer(divisor_power_sum(n as u64, (k - 1) as u32))
        })
    })
}

/// Σ_{0<d|n} χ(d) d^{k-1}; divisors with p | d drop out.
pub fn twisted_divisor_sum(n: u64, k: usize, chi: &DirichletCharacter) -> CyclotomicNumber {
    let m = chi.value_conductor();
    let mut by_power = vec![BigInt::zero(); m as usize];
    for d in divisors(n) {
        if let Some(e) = chi.value_exponent(d as i64) {
            by_power[e as usize] += BigInt::from(d).pow((k - 1) as u32);
        }
    }
    CyclotomicNumber::from_coeffs(m, by_power.into_iter().map(Rational::from_integer).collect())
}

fn check_parity(k: usize, chi: &DirichletCharacter) -> Result<()> {
    let weight_sign = if k.is_multiple_of(2) { 1 } else { -1 };
    if chi.parity() != weight_sign {
        return Err(Error::ParityMismatch {
            weight: k as i64,
            chi_sign: chi.parity(),
            weight_sign,
        });
    }
    Ok(())
}

/// E_{k,χ} = 1 + 2 L(1-k,χ)^{-1} Σ_n (Σ_{d|n} χ(d) d^{k-1}) q^n for nontrivial χ mod p.
pub fn hecke_eisenstein_chi(
    k: usize,
    chi: &DirichletCharacter,
    trunc: usize,
) -> Result<EllipticSeries<CyclotomicNumber>> {
    if k == 0 {
        return Err(Error::InvalidWeight(0, "Hecke Eisenstein weight must be >= 1"));
    }
    if chi.is_trivial() {
        return Err(Error::Precondition("E_{k,χ} needs a nontrivial character".into()));
    }
    check_parity(k, chi)?;
    let m = chi.value_conductor();
    let l = dirichlet_l_neg(k, chi)?.value;
    let factor = l.inverse()?.scale(&Rational::from_integer(2.into()));
    let meta = FormMeta::new(SeriesKind::Elliptic, k as i64, Some(chi.clone()));
    EllipticSeries::from_fn(m, meta, trunc, |n| {
        if n == 0 {
            Ok(CyclotomicNumber::one(m))
        } else {
            factor.try_mul(&twisted_divisor_sum(n as u64, k, chi))
        }
    })
}

/// Elliptic order a Jacobi input needs for a lift truncated at n, l <= N.
pub fn jacobi_order_for_lift(siegel_trunc: usize) -> usize {
    siegel_trunc * siegel_trunc
}

/// Index-1 Jacobi Eisenstein series: c(n,r) = H(k-1, 4n-r^2) / H(k-1, 0).
pub fn jacobi_eisenstein(k: usize, order: usize) -> Result<JacobiSeries<Rational>> {
    if k % 2 == 1 || k < 4 {
        return Err(Error::InvalidWeight(k as i64, "Jacobi Eisenstein weight must be even >= 4"));
    }
    let h0 = cohen_h(k - 1, 0)?;
    let meta = FormMeta::new(SeriesKind::JacobiIndex1, k as i64, None);
    JacobiSeries::from_fn((), meta, order, |n, r| {
        Ok(cohen_h(k - 1, (4 * n - r * r) as u64)? / &h0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn level_one_values() {
        let e4 = eisenstein_level1(4, 3).unwrap();
        assert_eq!(e4.coeff(1).unwrap(), &rat(240, 1));
        let e6 = eisenstein_level1(6, 3).unwrap();
        assert_eq!(e6.coeff(2).unwrap(), &rat(-16632, 1));
        let e0 = eisenstein_level1(0, 3).unwrap();
        assert_eq!(e0.coeffs(), &[rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1)]);
        assert!(eisenstein_level1(2, 3).is_err());
        assert!(eisenstein_level1(5, 3).is_err());
        // E_4^2 = E_8
        let sq = e4.try_mul(&e4).unwrap();
        assert_eq!(sq.coeff(1).unwrap(), &rat(480, 1));
        let e8 = eisenstein_level1(8, 3).unwrap();
        assert_eq!(sq.coeffs(), e8.coeffs());
    }

    #[test]
    fn level_one_divisor_ratios() {
        for k in [4usize, 6, 8] {
            let e = eisenstein_level1(k, 20).unwrap();
            let a1 = e.coeff(1).unwrap().clone();
            for n in 1..=20u64 {
                let naive: u64 = (1..=n).filter(|d| n % d == 0).map(|d| d.pow(k as u32 - 1)).sum();
                assert_eq!(e.coeff(n as usize).unwrap() / &a1, rat(naive as i64, 1));
            }
        }
    }

    #[test]
    fn hecke_values() {
        let chi = DirichletCharacter::new(5, 1).unwrap();
        let e = hecke_eisenstein_chi(1, &chi, 10).unwrap();
        let three_minus_i = CyclotomicNumber::from_coeffs(4, vec![rat(3, 1), rat(-1, 1)]);
        assert_eq!(e.coeff(1).unwrap(), &three_minus_i);
        assert_eq!(e.coeff(5).unwrap(), e.coeff(1).unwrap());
        assert!(e.coeff(0).unwrap().is_one());
        assert!(matches!(
            hecke_eisenstein_chi(2, &chi, 3),
            Err(Error::ParityMismatch { .. })
        ));
        let trivial = DirichletCharacter::trivial(5).unwrap();
        assert!(hecke_eisenstein_chi(4, &trivial, 3).is_err());
    }

    #[test]
    fn hecke_multiplicative() {
        for (p, t, k) in [(5u64, 1u64, 3usize), (7, 1, 5), (7, 2, 4), (5, 3, 9)] {
            let chi = DirichletCharacter::new(p, t).unwrap();
            let e = hecke_eisenstein_chi(k, &chi, 100).unwrap();
            let a1 = e.coeff(1).unwrap();
            for m in 1..=10usize {
                for n in 1..=10usize {
                    if num_integer::gcd(m, n) != 1 {
                        continue;
                    }
                    let lhs = e.coeff(m * n).unwrap().try_mul(a1).unwrap();
                    let rhs = e.coeff(m).unwrap().try_mul(e.coeff(n).unwrap()).unwrap();
                    assert_eq!(lhs, rhs, "p={p} t={t} k={k} m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn jacobi_values() {
        let e = jacobi_eisenstein(4, 4).unwrap();
        assert_eq!(e.coeff(0, 0).unwrap(), rat(1, 1));
        assert_eq!(e.coeff(1, 0).unwrap(), rat(126, 1));
        assert_eq!(e.coeff(1, 1).unwrap(), rat(56, 1));
        assert_eq!(e.coeff(1, -1).unwrap(), rat(56, 1));
        assert_eq!(e.coeff(1, 2).unwrap(), rat(1, 1));
        assert_eq!(e.coeff(1, -2).unwrap(), rat(1, 1));
        for k in [4usize, 6, 8, 10] {
            let e = jacobi_eisenstein(k, 6).unwrap();
            assert!(e.discriminant_violation().is_none());
            assert!(e.iter().all(|(_, c)| !c.is_zero()));
        }
        assert!(jacobi_eisenstein(5, 2).is_err());
        assert!(jacobi_eisenstein(2, 2).is_err());
    }

    #[test]
    fn product_weight_bookkeeping() {
        // p = 5, a = 3, m = 2: E_{9,χ} · E_60 · E^J_6 has weight 75
        let chi = DirichletCharacter::new(5, 1).unwrap();
        let (p, a, m) = (5usize, 3usize, 2u32);
        let e1 = hecke_eisenstein_chi(a * (p - 2), &chi, 2).unwrap();
        let e2 = eisenstein_level1(a * p * (p.pow(m - 1) - 1), 2).unwrap();
        let ej = jacobi_eisenstein(2 * a, 2).unwrap();
        let w = e1.meta().weight + e2.meta().weight + ej.meta().weight;
        assert_eq!(w, (a * p.pow(m)) as i64);
    }
}
