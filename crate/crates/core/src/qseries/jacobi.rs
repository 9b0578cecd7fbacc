use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};

use super::{
    header_from_json, index_from_json, Coefficient, EllipticSeries, FormMeta, IndexedSeries,
    SeriesKind,
};

/// Indices (n, r) with 0 <= n <= N and r^2 <= 4n, ordered lexicographically.
pub fn jacobi_support(trunc: usize) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for n in 0..=trunc as i64 {
        let b = isqrt(4 * n);
        for r in -b..=b {
            out.push((n, r));
        }
    }
    out
}

pub(crate) fn isqrt(x: i64) -> i64 {
    if x <= 0 {
        return 0;
    }
    let mut r = (x as f64).sqrt() as i64;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

/// Index-1 Jacobi expansion Σ c(n,r) q^n ζ^r over r^2 <= 4n, n <= N.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiSeries<C: Coefficient> {
    coeffs: BTreeMap<(i64, i64), C>,
    trunc: usize,
    meta: FormMeta,
    ring: C::Ring,
}

impl<C: Coefficient> JacobiSeries<C> {
    pub fn from_fn(
        ring: C::Ring,
        meta: FormMeta,
        trunc: usize,
        mut f: impl FnMut(i64, i64) -> Result<C>,
    ) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (n, r) in jacobi_support(trunc) {
            coeffs.insert((n, r), f(n, r)?);
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

    /// `None` outside the stored range; zero for r^2 > 4n with n in range.
    pub fn coeff(&self, n: i64, r: i64) -> Option<C> {
        if n < 0 || n > self.trunc as i64 {
            return None;
        }
        Some(
            self.coeffs
                .get(&(n, r))
                .cloned()
                .unwrap_or_else(|| C::zero(&self.ring)),
        )
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(i64, i64), &C)> {
        self.coeffs.iter()
    }

    /// Product with an elliptic series: c'(n,r) = Σ_j f(j) c(n-j, r).
    /// The result is known to the smaller of the two truncations.
    pub fn mul_elliptic(&self, f: &EllipticSeries<C>) -> Result<Self> {
        if &self.ring != f.ring() {
            return Err(Error::RingMismatch(format!(
                "{:?} vs {:?}",
                self.ring,
                f.ring()
            )));
        }
        let trunc = self.trunc.min(f.trunc());
        let meta = f.meta().combine(&self.meta, SeriesKind::JacobiIndex1)?;
        let fc = f.coeffs();
        Self::from_fn(self.ring.clone(), meta, trunc, |n, r| {
            let mut acc = C::zero(&self.ring);
            for j in 0..=n {
                let a = &fc[j as usize];
                if a.is_zero() {
                    continue;
                }
                if let Some(c) = self.coeffs.get(&(n - j, r)) {
                    if !c.is_zero() {
                        acc = acc.try_add(&a.try_mul(c)?)?;
                    }
                }
            }
            Ok(acc)
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(format!(
                "{:?} vs {:?}",
                self.ring, other.ring
            )));
        }
        let trunc = self.trunc.min(other.trunc);
        Self::from_fn(self.ring.clone(), self.meta.clone(), trunc, |n, r| {
            self.coeffs[&(n, r)].try_add(&other.coeffs[&(n, r)])
        })
    }

    pub fn scale(&self, c: &C) -> Result<Self> {
        Self::from_fn(self.ring.clone(), self.meta.clone(), self.trunc, |n, r| {
            self.coeffs[&(n, r)].try_mul(c)
        })
    }

    pub fn map_coefficients<D: Coefficient>(
        &self,
        ring: D::Ring,
        mut f: impl FnMut(&C) -> Result<D>,
    ) -> Result<JacobiSeries<D>> {
        JacobiSeries::from_fn(ring, self.meta.clone(), self.trunc, |n, r| {
            f(&self.coeffs[&(n, r)]).map_err(|e| Error::Morphism {
                index: format!("({n}, {r})"),
                source: Box::new(e),
            })
        })
    }

    /// Checks that c(n,r) is a function of 4n - r^2 alone; returns the
    /// first violating pair of indices.
    pub fn discriminant_violation(&self) -> Option<((i64, i64), (i64, i64))> {
        let mut seen: BTreeMap<i64, ((i64, i64), &C)> = BTreeMap::new();
        for (&(n, r), c) in &self.coeffs {
            let d = 4 * n - r * r;
            match seen.get(&d) {
                Some((idx, c0)) if *c0 != c => return Some((*idx, (n, r))),
                Some(_) => {}
                None => {
                    seen.insert(d, ((n, r), c));
                }
            }
        }
        None
    }

    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .coeffs
            .iter()
            .map(|(&(n, r), c)| json!([n, r, c.to_json()]))
            .collect();
        json!({
            "meta": self.meta.to_json(C::tag(&self.ring)),
            "trunc": self.trunc,
            "coeffs": coeffs,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let (meta, tag, trunc, rows) = header_from_json(v, SeriesKind::JacobiIndex1)?;
        let ring = C::ring_from_tag(&tag)?;
        let mut coeffs = BTreeMap::new();
        for row in rows {
            let (idx, val) = index_from_json(row, 2)?;
            coeffs.insert((idx[0], idx[1]), C::from_json(val, &ring)?);
        }
        let support = jacobi_support(trunc);
        if support.len() != coeffs.len() || support.iter().any(|k| !coeffs.contains_key(k)) {
            return Err(Error::SupportMismatch(format!(
                "Jacobi coefficients do not fill the support up to n = {trunc}"
            )));
        }
        Ok(Self {
            coeffs,
            trunc,
            meta,
            ring,
        })
    }
}

impl<C: Coefficient> IndexedSeries<C> for JacobiSeries<C> {
    fn entries(&self) -> Vec<(Vec<i64>, &C)> {
        self.coeffs
            .iter()
            .map(|(&(n, r), c)| (vec![n, r], c))
            .collect()
    }
}
