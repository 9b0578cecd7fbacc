use serde_json::{json, Value};

use crate::error::{Error, Result};

use super::{header_from_json, index_from_json, Coefficient, FormMeta, IndexedSeries, SeriesKind};

/// Σ_{n<=N} a(n) q^n + O(q^{N+1}).
#[derive(Clone, Debug, PartialEq)]
pub struct EllipticSeries<C: Coefficient> {
    coeffs: Vec<C>,
    meta: FormMeta,
    ring: C::Ring,
}

impl<C: Coefficient> EllipticSeries<C> {
    pub fn new(ring: C::Ring, meta: FormMeta, coeffs: Vec<C>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Truncation("an elliptic series needs a(0)".into()));
        }
        Ok(Self { coeffs, meta, ring })
    }

    pub fn from_fn(
        ring: C::Ring,
        meta: FormMeta,
        trunc: usize,
        f: impl FnMut(usize) -> Result<C>,
    ) -> Result<Self> {
        let coeffs = (0..=trunc).map(f).collect::<Result<Vec<_>>>()?;
        Self::new(ring, meta, coeffs)
    }

    /// The constant series c + O(q^{N+1}).
    pub fn constant(ring: C::Ring, meta: FormMeta, value: C, trunc: usize) -> Self {
        let mut coeffs = vec![C::zero(&ring); trunc + 1];
        coeffs[0] = value;
        Self { coeffs, meta, ring }
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn meta(&self) -> &FormMeta {
        &self.meta
    }

    pub fn ring(&self) -> &C::Ring {
        &self.ring
    }

    pub fn coeff(&self, n: usize) -> Option<&C> {
        self.coeffs.get(n)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
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

    /// Cauchy product truncated at the smaller order; metadata combined.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let n = self.trunc().min(other.trunc());
        let mut out = vec![C::zero(&self.ring); n + 1];
        for (i, a) in self.coeffs[..=n].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = out[i + j].try_add(&a.try_mul(b)?)?;
                }
            }
        }
        Ok(Self {
            coeffs: out,
            meta: self.meta.combine(&other.meta, SeriesKind::Elliptic)?,
            ring: self.ring.clone(),
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let n = self.trunc().min(other.trunc());
        let coeffs = (0..=n)
            .map(|i| self.coeffs[i].try_add(&other.coeffs[i]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            coeffs,
            meta: self.meta.clone(),
            ring: self.ring.clone(),
        })
    }

    pub fn scale(&self, c: &C) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| a.try_mul(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            coeffs,
            meta: self.meta.clone(),
            ring: self.ring.clone(),
        })
    }

    pub fn truncate(&self, trunc: usize) -> Self {
        let mut s = self.clone();
        s.coeffs.truncate(trunc.min(self.trunc()) + 1);
        s
    }

    pub fn map_coefficients<D: Coefficient>(
        &self,
        ring: D::Ring,
        mut f: impl FnMut(&C) -> Result<D>,
    ) -> Result<EllipticSeries<D>> {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| {
                f(c).map_err(|e| Error::Morphism {
                    index: format!("[{n}]"),
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EllipticSeries {
            coeffs,
            meta: self.meta.clone(),
            ring,
        })
    }

    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| json!([n, c.to_json()]))
            .collect();
        json!({
            "meta": self.meta.to_json(C::tag(&self.ring)),
            "trunc": self.trunc(),
            "coeffs": coeffs,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let (meta, tag, trunc, rows) = header_from_json(v, SeriesKind::Elliptic)?;
        let ring = C::ring_from_tag(&tag)?;
        let mut coeffs: Vec<Option<C>> = vec![None; trunc + 1];
        for row in rows {
            let (idx, val) = index_from_json(row, 1)?;
            let slot = usize::try_from(idx[0])
                .ok()
                .and_then(|n| coeffs.get_mut(n))
                .ok_or_else(|| Error::Parse(format!("index {idx:?} outside truncation")))?;
            *slot = Some(C::from_json(val, &ring)?);
        }
        let coeffs = coeffs
            .into_iter()
            .enumerate()
            .map(|(n, c)| c.ok_or_else(|| Error::Parse(format!("missing coefficient {n}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ring, meta, coeffs)
    }
}

impl<C: Coefficient> IndexedSeries<C> for EllipticSeries<C> {
    fn entries(&self) -> Vec<(Vec<i64>, &C)> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| (vec![n as i64], c))
            .collect()
    }
}
