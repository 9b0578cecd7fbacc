//! Maass lift of index-1 Jacobi expansions with character to degree-2 Siegel expansions.

use num_bigint::BigInt;
use num_integer::Integer;

use crate::arith::{divisors, CyclotomicNumber, Rational};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::lvalues::dirichlet_l_neg;
use crate::qseries::{Coefficient, FormMeta, JacobiSeries, SeriesKind, SiegelSeries};

/// The lift over any coefficient ring.
///
/// `constant` is the value placed in front of c(0,0) at the origin and `twist(d)`
/// returns χ(d) d^{k-1}, which must be an exact zero when p | d.
pub fn lift_with<C: Coefficient>(
    phi: &JacobiSeries<C>,
    meta: FormMeta,
    trunc: usize,
    constant: &C,
    twist: impl Fn(u64) -> Result<C>,
) -> Result<SiegelSeries<C>> {
    let needed = trunc * trunc;
    if phi.trunc() < needed {
        return Err(Error::Truncation(format!(
            "lift to n, l <= {trunc} needs Jacobi order {needed}, got {}",
            phi.trunc()
        )));
    }
    let ring = phi.ring().clone();
    let c = |n: i64, r: i64| phi.coeff(n, r).expect("index within checked order");
    let c00 = c(0, 0);
    SiegelSeries::from_fn(ring.clone(), meta, trunc, |n, r, l| {
        if n == 0 && l == 0 {
            return constant.try_mul(&c00);
        }
        // the l = 0 row is handled by symmetry of the divisor sum
        let (n, l) = if l == 0 { (l, n) } else { (n, l) };
        let g = n.gcd(&r.abs()).gcd(&l) as u64;
        let mut acc = C::zero(&ring);
        for d in divisors(g) {
            let t = twist(d)?;
            if t.is_zero() {
                continue;
            }
            let d = d as i64;
            acc = acc.try_add(&t.try_mul(&c(n * l / (d * d), r / d))?)?;
        }
        Ok(acc)
    })
}

/// χ(d) d^{k-1} in Q(ζ_{p-1}).
pub fn character_twist(chi: &DirichletCharacter, k: usize, d: u64) -> CyclotomicNumber {
    chi.value(d as i64)
        .scale(&Rational::from_integer(BigInt::from(d).pow((k - 1) as u32)))
}

fn check_lift_input(k: usize, chi: &DirichletCharacter, p: u64) -> Result<()> {
    if chi.p() != p {
        return Err(Error::PrimeMismatch(chi.p(), p));
    }
    if k == 0 {
        return Err(Error::InvalidWeight(0, "lift weight must be >= 1"));
    }
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

/// Lift with a(0,0,0) = ½ L(1-k,χ) c(0,0) stored exactly.
pub fn maass_lift(
    phi: &JacobiSeries<CyclotomicNumber>,
    k: usize,
    chi: &DirichletCharacter,
    p: u64,
    trunc: usize,
) -> Result<SiegelSeries<CyclotomicNumber>> {
    check_lift_input(k, chi, p)?;
    if *phi.ring() != chi.value_conductor() {
        return Err(Error::RingMismatch(format!(
            "Jacobi coefficients in conductor {}, character needs {}",
            phi.ring(),
            chi.value_conductor()
        )));
    }
    let half_l = dirichlet_l_neg(k, chi)?
        .value
        .scale(&Rational::new(1.into(), 2.into()));
    let meta = FormMeta::new(SeriesKind::Siegel2, k as i64, Some(chi.clone()));
    lift_with(phi, meta, trunc, &half_l, |d| Ok(character_twist(chi, k, d)))
}

/// Indices where `lifted` differs from a fresh lift of `phi`.
pub fn maass_defect(
    lifted: &SiegelSeries<CyclotomicNumber>,
    phi: &JacobiSeries<CyclotomicNumber>,
    k: usize,
    chi: &DirichletCharacter,
    p: u64,
) -> Result<Vec<(i64, i64, i64)>> {
    let fresh = maass_lift(phi, k, chi, p, lifted.trunc())?;
    Ok(fresh
        .iter()
        .filter(|(idx, c)| lifted.coeff(idx.0, idx.1, idx.2) != Some(*c))
        .map(|(idx, _)| *idx)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, PadicApprox};
    use crate::characters::{embed, EmbeddingSigma};
    use crate::eisenstein::{hecke_eisenstein_chi, jacobi_eisenstein};
    use crate::qseries::{series_distance, PadicRing};

    fn cyclo_phi(k: usize, order: usize, m: u32) -> JacobiSeries<CyclotomicNumber> {
        jacobi_eisenstein(k, order)
            .unwrap()
            .map_coefficients(m, |q| Ok(CyclotomicNumber::from_rational(m, q.clone())))
            .unwrap()
    }

    /// A Jacobi-shaped input with a nonzero imaginary part in every coefficient.
    fn skewed_phi(order: usize) -> JacobiSeries<CyclotomicNumber> {
        let meta = FormMeta::new(SeriesKind::JacobiIndex1, 3, None);
        JacobiSeries::from_fn(4, meta, order, |n, r| {
            let d = 4 * n - r * r;
            Ok(CyclotomicNumber::from_coeffs(4, vec![rat(d + 1, 1), rat(d * d - 2, 3)]))
        })
        .unwrap()
    }

    #[test]
    fn rows_and_instances() {
        let chi = DirichletCharacter::new(5, 1).unwrap();
        let k = 3;
        let phi = skewed_phi(9);
        let f = maass_lift(&phi, k, &chi, 5, 3).unwrap();
        assert!(f.symmetry_violation().is_none());
        let row1 = f.row_one().unwrap();
        for (&(n, r), c) in row1.iter() {
            assert_eq!(Some(c.clone()), phi.coeff(n, r));
        }
        // a(2,2,2) = c(4,2) + χ(2) 2^{k-1} c(1,1)
        let expect = phi
            .coeff(4, 2)
            .unwrap()
            .try_add(&character_twist(&chi, k, 2).try_mul(&phi.coeff(1, 1).unwrap()).unwrap())
            .unwrap();
        assert_eq!(f.coeff(2, 2, 2).unwrap(), &expect);
        // origin: ½ L(1-k, χ) c(0,0)
        let half_l = dirichlet_l_neg(k, &chi).unwrap().value.scale(&rat(1, 2));
        assert_eq!(f.coeff(0, 0, 0).unwrap(), &half_l.try_mul(&phi.coeff(0, 0).unwrap()).unwrap());
    }

    #[test]
    fn row_zero_is_hecke_series() {
        let chi = DirichletCharacter::new(7, 1).unwrap();
        let k = 5;
        let phi = cyclo_phi(4, 16, 6);
        let f = maass_lift(&phi, k, &chi, 7, 4).unwrap();
        let half_l = dirichlet_l_neg(k, &chi).unwrap().value.scale(&rat(1, 2));
        let hecke = hecke_eisenstein_chi(k, &chi, 4).unwrap();
        let row0 = f.row_zero().unwrap();
        for n in 0..=4 {
            assert_eq!(row0.coeff(n).unwrap(), &hecke.coeff(n).unwrap().try_mul(&half_l).unwrap());
        }
    }

    #[test]
    fn p_divisible_divisors_drop_out() {
        let chi = DirichletCharacter::new(5, 1).unwrap();
        let phi = skewed_phi(25 * 25);
        let f = maass_lift(&phi, 3, &chi, 5, 25).unwrap();
        for (n, r, l) in [(5, 0, 5), (5, 5, 5), (25, 0, 5), (5, 10, 10), (0, 0, 25)] {
            let g = { n }.gcd(&{ r }).gcd(&{ l });
            if g.is_power_of_p(5) {
                assert_eq!(f.coeff(n, r, l).unwrap(), &phi.coeff(n * l, r).unwrap());
            }
        }
        // gcd 10 keeps d = 1, 2 only
        let expect = phi
            .coeff(100, 10)
            .unwrap()
            .try_add(&character_twist(&chi, 3, 2).try_mul(&phi.coeff(25, 5).unwrap()).unwrap())
            .unwrap();
        assert_eq!(f.coeff(10, 10, 10).unwrap(), &expect);
    }

    trait PowerOf {
        fn is_power_of_p(self, p: i64) -> bool;
    }
    impl PowerOf for i64 {
        fn is_power_of_p(mut self, p: i64) -> bool {
            while self % p == 0 && self > 1 {
                self /= p;
            }
            self == 1
        }
    }

    #[test]
    fn errors() {
        let chi = DirichletCharacter::new(5, 1).unwrap();
        let phi = skewed_phi(3);
        assert!(matches!(maass_lift(&phi, 3, &chi, 5, 2), Err(Error::Truncation(_))));
        assert!(matches!(maass_lift(&phi, 4, &chi, 5, 1), Err(Error::ParityMismatch { .. })));
        assert!(matches!(maass_lift(&phi, 3, &chi, 7, 1), Err(Error::PrimeMismatch(5, 7))));
    }

    #[test]
    fn defect_detects_perturbation() {
        let chi = DirichletCharacter::new(5, 1).unwrap();
        let phi = skewed_phi(4);
        let f = maass_lift(&phi, 3, &chi, 5, 2).unwrap();
        assert!(maass_defect(&f, &phi, 3, &chi, 5).unwrap().is_empty());
        let bumped = SiegelSeries::from_fn(4, f.meta().clone(), 2, |n, r, l| {
            let c = f.coeff(n, r, l).unwrap().clone();
            Ok(if (n, r, l) == (1, -1, 2) {
                c.try_add(&CyclotomicNumber::one(4)).unwrap()
            } else {
                c
            })
        })
        .unwrap();
        assert_eq!(maass_defect(&bumped, &phi, 3, &chi, 5).unwrap(), vec![(1, -1, 2)]);
    }

    #[test]
    fn lift_commutes_with_embedding() {
        let chi = DirichletCharacter::new(5, 1).unwrap();
        let k = 3;
        let prec = 12;
        let sigma = EmbeddingSigma::new(5, 1, prec).unwrap();
        let ring = PadicRing { p: 5, relprec: prec };
        let phi = skewed_phi(9);
        let f = maass_lift(&phi, k, &chi, 5, 3).unwrap();
        let f_sigma = f.map_coefficients(ring, |c| embed(c, &sigma)).unwrap();

        let phi_sigma = phi.map_coefficients(ring, |c| embed(c, &sigma)).unwrap();
        let half_l = dirichlet_l_neg(k, &chi).unwrap().value.scale(&rat(1, 2));
        let constant = embed(&half_l, &sigma).unwrap();
        let meta = f.meta().clone();
        let lifted_sigma = lift_with(&phi_sigma, meta, 3, &constant, |d| {
            if d % 5 == 0 {
                Ok(PadicApprox::exact_zero(5))
            } else {
                embed(&character_twist(&chi, k, d), &sigma)
            }
        })
        .unwrap();
        let dist = series_distance(&f_sigma, &lifted_sigma).unwrap();
        assert!(dist.min.lower_bound().is_none_or(|v| v >= prec as i64 - 2), "{dist:?}");
    }
}
