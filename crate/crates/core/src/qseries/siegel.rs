use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};

use super::jacobi::isqrt;
use super::{
    header_from_json, index_from_json, Coefficient, EllipticSeries, FormMeta, IndexedSeries,
    JacobiSeries, SeriesKind,
};

/// Half-integral semidefinite T = (n, r, l), i.e. [[n, r/2], [r/2, l]], with n, l <= N.
pub fn siegel_support(trunc: usize) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    let t = trunc as i64;
    for n in 0..=t {
        for l in 0..=t {
            let b = isqrt(4 * n * l);
            for r in -b..=b {
                out.push((n, r, l));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Coefficients of a fixed l: Σ_{n,r} a(n,r,l) q^n ζ^r.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierJacobiRow<C> {
    pub l: i64,
    pub coeffs: BTreeMap<(i64, i64), C>,
}

/// Degree-2 Siegel expansion Σ a(T) e(tr(TZ)) truncated at n, l <= N.
#[derive(Clone, Debug, PartialEq)]
pub struct SiegelSeries<C: Coefficient> {
    coeffs: BTreeMap<(i64, i64, i64), C>,
    trunc: usize,
    meta: FormMeta,
    ring: C::Ring,
}

impl<C: Coefficient> SiegelSeries<C> {
    pub fn from_fn(
        ring: C::Ring,
        meta: FormMeta,
        trunc: usize,
        mut f: impl FnMut(i64, i64, i64) -> Result<C>,
    ) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (n, r, l) in siegel_support(trunc) {
            coeffs.insert((n, r, l), f(n, r, l)?);
        }
        Ok(Self {
            coeffs,
            trunc,
            meta,
            ring,
        })
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn meta(&self) -> &FormMeta {
        &self.meta
    }

    pub fn ring(&self) -> &C::Ring {
        &self.ring
    }

    pub fn coeff(&self, n: i64, r: i64, l: i64) -> Option<&C> {
        self.coeffs.get(&(n, r, l))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(i64, i64, i64), &C)> {
        self.coeffs.iter()
    }

    fn check_ring(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(format!(
                "{:?} vs {:?}",
                self.ring, other.ring
            )));
        }
        Ok(())
    }

    pub fn fourier_jacobi_row(&self, l: i64) -> Result<FourierJacobiRow<C>> {
        if l < 0 || l > self.trunc as i64 {
            return Err(Error::Truncation(format!(
                "row l = {l} is beyond the truncation {}",
                self.trunc
            )));
        }
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(k, _)| k.2 == l)
            .map(|(&(n, r, _), c)| ((n, r), c.clone()))
            .collect();
        Ok(FourierJacobiRow { l, coeffs })
    }

    /// The l = 0 row as an elliptic series in q.
    pub fn row_zero(&self) -> Result<EllipticSeries<C>> {
        let meta = FormMeta {
            kind: SeriesKind::Elliptic,
            ..self.meta.clone()
        };
        EllipticSeries::from_fn(self.ring.clone(), meta, self.trunc, |n| {
            Ok(self.coeffs[&(n as i64, 0, 0)].clone())
        })
    }

    /// The l = 1 row as an index-1 Jacobi series.
    pub fn row_one(&self) -> Result<JacobiSeries<C>> {
        if self.trunc < 1 {
            return Err(Error::Truncation("no l = 1 row below truncation 1".into()));
        }
        let meta = FormMeta {
            kind: SeriesKind::JacobiIndex1,
            ..self.meta.clone()
        };
        JacobiSeries::from_fn(self.ring.clone(), meta, self.trunc, |n, r| {
            Ok(self.coeffs[&(n, r, 1)].clone())
        })
    }

    /// Reassembles a series from rows l = 0..=N.
    pub fn from_rows(ring: C::Ring, meta: FormMeta, rows: Vec<FourierJacobiRow<C>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Truncation("no rows".into()));
        }
        let trunc = rows.len() - 1;
        let mut coeffs = BTreeMap::new();
        for (i, row) in rows.into_iter().enumerate() {
            if row.l != i as i64 {
                return Err(Error::SupportMismatch(format!("row {} in position {i}", row.l)));
            }
            for ((n, r), c) in row.coeffs {
                coeffs.insert((n, r, row.l), c);
            }
        }
        Self::check_support(&coeffs, trunc)?;
        Ok(Self {
            coeffs,
            trunc,
            meta,
            ring,
        })
    }

    fn check_support(coeffs: &BTreeMap<(i64, i64, i64), C>, trunc: usize) -> Result<()> {
        let support = siegel_support(trunc);
        if support.len() != coeffs.len() || support.iter().any(|k| !coeffs.contains_key(k)) {
            return Err(Error::SupportMismatch(format!(
                "Siegel coefficients do not fill the support up to {trunc}"
            )));
        }
        Ok(())
    }

    /// Cauchy product over T1 + T2 = T with both summands semidefinite.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let trunc = self.trunc.min(other.trunc);
        let meta = self.meta.combine(&other.meta, SeriesKind::Siegel2)?;
        let left: Vec<_> = self
            .coeffs
            .iter()
            .filter(|(k, c)| k.0 <= trunc as i64 && k.2 <= trunc as i64 && !c.is_zero())
            .collect();
        Self::from_fn(self.ring.clone(), meta, trunc, |n, r, l| {
            let mut acc = C::zero(&self.ring);
            for (&(n1, r1, l1), a) in &left {
                if n1 > n || l1 > l {
                    continue;
                }
                if let Some(b) = other.coeffs.get(&(n - n1, r - r1, l - l1)) {
                    if !b.is_zero() {
                        acc = acc.try_add(&a.try_mul(b)?)?;
                    }
                }
            }
            Ok(acc)
        })
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&C, &C) -> Result<C>) -> Result<Self> {
        self.check_ring(other)?;
        let trunc = self.trunc.min(other.trunc);
        Self::from_fn(self.ring.clone(), self.meta.clone(), trunc, |n, r, l| {
            f(&self.coeffs[&(n, r, l)], &other.coeffs[&(n, r, l)])
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.try_add(b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.try_sub(b))
    }

    pub fn scale(&self, c: &C) -> Result<Self> {
        Self::from_fn(self.ring.clone(), self.meta.clone(), self.trunc, |n, r, l| {
            self.coeffs[&(n, r, l)].try_mul(c)
        })
    }

    pub fn truncate(&self, trunc: usize) -> Self {
        let trunc = trunc.min(self.trunc);
        let t = trunc as i64;
        Self {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(k, _)| k.0 <= t && k.2 <= t)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
            trunc,
            meta: self.meta.clone(),
            ring: self.ring.clone(),
        }
    }

    pub fn with_meta(mut self, meta: FormMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn map_coefficients<D: Coefficient>(
        &self,
        ring: D::Ring,
        mut f: impl FnMut(&C) -> Result<D>,
    ) -> Result<SiegelSeries<D>> {
        SiegelSeries::from_fn(ring, self.meta.clone(), self.trunc, |n, r, l| {
            f(&self.coeffs[&(n, r, l)]).map_err(|e| Error::Morphism {
                index: format!("({n}, {r}, {l})"),
                source: Box::new(e),
            })
        })
    }

    /// First index where a(n,r,l) differs from a(l,r,n) or a(n,-r,l).
    pub fn symmetry_violation(&self) -> Option<(i64, i64, i64)> {
        self.coeffs.iter().find_map(|(&(n, r, l), c)| {
            let swapped = &self.coeffs[&(l, r, n)];
            let flipped = &self.coeffs[&(n, -r, l)];
            (swapped != c || flipped != c).then_some((n, r, l))
        })
    }

    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .coeffs
            .iter()
            .map(|(&(n, r, l), c)| json!([n, r, l, c.to_json()]))
            .collect();
        json!({
            "meta": self.meta.to_json(C::tag(&self.ring)),
            "trunc": self.trunc,
            "coeffs": coeffs,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let (meta, tag, trunc, rows) = header_from_json(v, SeriesKind::Siegel2)?;
        let ring = C::ring_from_tag(&tag)?;
        let mut coeffs = BTreeMap::new();
        for row in rows {
            let (idx, val) = index_from_json(row, 3)?;
            coeffs.insert((idx[0], idx[1], idx[2]), C::from_json(val, &ring)?);
        }
        Self::check_support(&coeffs, trunc)?;
        Ok(Self {
            coeffs,
            trunc,
            meta,
            ring,
        })
    }
}

impl<C: Coefficient> IndexedSeries<C> for SiegelSeries<C> {
    fn entries(&self) -> Vec<(Vec<i64>, &C)> {
        self.coeffs
            .iter()
            .map(|(&(n, r, l), c)| (vec![n, r, l], c))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, Rational};

    fn meta(w: i64) -> FormMeta {
        FormMeta::new(SeriesKind::Siegel2, w, None)
    }

    #[test]
    fn support_sizes() {
        assert_eq!(siegel_support(0).len(), 1);
        // (0,0,0),(1,0,0),(0,0,1), five at (1,*,1)
        assert_eq!(siegel_support(1).len(), 8);
        assert_eq!(siegel_support(2).len(), 29);
    }

    #[test]
    fn rows_reassemble() {
        let s = SiegelSeries::<Rational>::from_fn((), meta(4), 2, |n, r, l| {
            Ok(rat(n * 100 + r * 10 + l, 1))
        })
        .unwrap();
        let rows = (0..=2).map(|l| s.fourier_jacobi_row(l).unwrap()).collect();
        assert_eq!(SiegelSeries::from_rows((), meta(4), rows).unwrap(), s);
        assert!(matches!(s.fourier_jacobi_row(3), Err(Error::Truncation(_))));
        assert_eq!(s.row_one().unwrap().coeff(2, -2).unwrap(), rat(181, 1));
        assert_eq!(s.row_zero().unwrap().coeff(2).unwrap(), &rat(200, 1));
    }

    #[test]
    fn product_of_constants_and_symmetry() {
        let one = SiegelSeries::<Rational>::from_fn((), meta(0), 2, |n, r, l| {
            Ok(rat((n == 0 && r == 0 && l == 0) as i64, 1))
        })
        .unwrap();
        let s = SiegelSeries::<Rational>::from_fn((), meta(4), 2, |n, r, l| {
            Ok(rat(n * l + r * r + n + l, 1))
        })
        .unwrap();
        assert_eq!(one.try_mul(&s).unwrap().with_meta(meta(4)), s);
        assert!(s.symmetry_violation().is_none());
        let sq = s.try_mul(&s).unwrap();
        assert!(sq.symmetry_violation().is_none());
        // (1,0,0) splits as (1,0,0)+(0,0,0) twice; a(0,0,0) = 0
        assert_eq!(sq.coeff(1, 0, 0).unwrap(), &rat(0, 1));
        // (1,0,1) = (1,0,0)+(0,0,1) in both orders: 2·1·1
        assert_eq!(sq.coeff(1, 0, 1).unwrap(), &rat(2, 1));
        let asym = SiegelSeries::<Rational>::from_fn((), meta(4), 1, |n, r, l| Ok(rat(n + 2 * l + r, 1)))
            .unwrap();
        assert!(asym.symmetry_violation().is_some());
    }

    #[test]
    fn json_round_trip() {
        let s = SiegelSeries::<Rational>::from_fn((), meta(4), 2, |n, r, l| Ok(rat(n - r, l + 1)))
            .unwrap();
        assert_eq!(SiegelSeries::<Rational>::from_json(&s.to_json()).unwrap(), s);
    }
}
