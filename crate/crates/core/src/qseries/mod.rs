//! Truncated Fourier expansions: elliptic q-series, index-1 Jacobi series and degree-2
//! Siegel series, generic over the coefficient ring.

mod elliptic;
mod jacobi;
mod ring;
mod siegel;

use serde_json::{json, Value};

use crate::arith::{PadicApprox, Valuation};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};

pub use elliptic::EllipticSeries;
pub use jacobi::{jacobi_support, JacobiSeries};
pub use ring::{Coefficient, PadicRing, RingTag};
pub use siegel::{siegel_support, FourierJacobiRow, SiegelSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    Elliptic,
    JacobiIndex1,
    Siegel2,
}

impl SeriesKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SeriesKind::Elliptic => "elliptic",
            SeriesKind::JacobiIndex1 => "jacobi-index-1",
            SeriesKind::Siegel2 => "siegel-2",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "elliptic" => Ok(SeriesKind::Elliptic),
            "jacobi-index-1" => Ok(SeriesKind::JacobiIndex1),
            "siegel-2" => Ok(SeriesKind::Siegel2),
            _ => Err(Error::Parse(format!("unknown series kind {s:?}"))),
        }
    }
}

/// Weight, character and level bookkeeping carried by every series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormMeta {
    pub weight: i64,
    /// `None` is the trivial character.
    pub character: Option<DirichletCharacter>,
    pub level: u64,
    pub kind: SeriesKind,
}

impl FormMeta {
    pub fn new(kind: SeriesKind, weight: i64, character: Option<DirichletCharacter>) -> Self {
        let level = character.as_ref().map_or(1, |c| c.p());
        Self {
            weight,
            character,
            level,
            kind,
        }
    }

    pub fn has_trivial_character(&self) -> bool {
        self.character.as_ref().is_none_or(|c| c.is_trivial())
    }

    /// Metadata of a product: weights add, characters multiply, levels take the lcm.
    pub fn combine(&self, other: &FormMeta, kind: SeriesKind) -> Result<FormMeta> {
        let character = match (&self.character, &other.character) {
            (None, c) | (c, None) => c.clone(),
            (Some(a), Some(b)) => Some(a.try_mul(b)?),
        };
        Ok(FormMeta {
            weight: self.weight + other.weight,
            character,
            level: num_integer::lcm(self.level, other.level),
            kind,
        })
    }

    fn to_json(&self, ring: RingTag) -> Value {
        json!({
            "weight": self.weight,
            "character": self.character.as_ref().map(|c| c.spec()),
            "level": self.level,
            "kind": self.kind.as_str(),
            "ring": ring,
        })
    }

    fn from_json(v: &Value) -> Result<(FormMeta, RingTag)> {
        let bad = |what: &str| Error::Parse(format!("meta: missing or invalid {what}"));
        let weight = v.get("weight").and_then(Value::as_i64).ok_or_else(|| bad("weight"))?;
        let character = match v.get("character") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.parse::<DirichletCharacter>()?),
            Some(_) => return Err(bad("character")),
        };
        let level = v.get("level").and_then(Value::as_u64).ok_or_else(|| bad("level"))?;
        let kind = SeriesKind::parse(v.get("kind").and_then(Value::as_str).ok_or_else(|| bad("kind"))?)?;
        let ring: RingTag = serde_json::from_value(v.get("ring").cloned().ok_or_else(|| bad("ring"))?)?;
        Ok((
            FormMeta {
                weight,
                character,
                level,
                kind,
            },
            ring,
        ))
    }
}

/// Anything with integer-tuple indices: used for distances and report tables.
pub trait IndexedSeries<C> {
    fn entries(&self) -> Vec<(Vec<i64>, &C)>;
}

/// Minimum valuation of s1 - s2 over the stored support, with its argmin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesDistance {
    pub min: Valuation,
    pub argmin: Option<Vec<i64>>,
}

pub fn series_distance<S: IndexedSeries<PadicApprox>>(s1: &S, s2: &S) -> Result<SeriesDistance> {
    let a = s1.entries();
    let b = s2.entries();
    if a.len() != b.len() || a.iter().zip(&b).any(|(x, y)| x.0 != y.0) {
        return Err(Error::SupportMismatch("series have different index sets".into()));
    }
    let mut best = SeriesDistance {
        min: Valuation::Infinite,
        argmin: None,
    };
    for ((idx, x), (_, y)) in a.into_iter().zip(b) {
        let v = x.try_sub(y)?.valuation();
        if v < best.min {
            best = SeriesDistance {
                min: v,
                argmin: Some(idx),
            };
        }
    }
    Ok(best)
}

fn index_from_json(v: &Value, arity: usize) -> Result<(Vec<i64>, &Value)> {
    let row = v
        .as_array()
        .filter(|r| r.len() == arity + 1)
        .ok_or_else(|| Error::Parse(format!("bad coefficient row {v}")))?;
    let idx = row[..arity]
        .iter()
        .map(|x| x.as_i64().ok_or_else(|| Error::Parse(format!("bad index in {v}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok((idx, &row[arity]))
}

fn header_from_json(v: &Value, kind: SeriesKind) -> Result<(FormMeta, RingTag, usize, &Vec<Value>)> {
    let (meta, ring) = FormMeta::from_json(v.get("meta").ok_or_else(|| Error::Parse("missing meta".into()))?)?;
    if meta.kind != kind {
        return Err(Error::Parse(format!(
            "expected a {} series, found {}",
            kind.as_str(),
            meta.kind.as_str()
        )));
    }
    let trunc = v
        .get("trunc")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("missing trunc".into()))? as usize;
    let coeffs = v
        .get("coeffs")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing coeffs".into()))?;
    Ok((meta, ring, trunc, coeffs))
}
