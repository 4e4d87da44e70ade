use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::metric::{PointId, PointedMetricSpace};
use crate::rational::Rational;

/// Anything that assigns exact values to (some of) the points of a space.
pub trait PointFunction {
    fn value_at(&self, p: PointId) -> Option<&Rational>;
    /// Points where the function is defined, in increasing order.
    fn domain(&self) -> Vec<PointId>;
}

/// A total function on a space that vanishes at the base point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LipschitzFunction {
    values: Vec<Rational>,
}

impl LipschitzFunction {
    pub fn new(space: &PointedMetricSpace, values: Vec<Rational>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::DimensionMismatch {
                row: 0,
                expected: space.len(),
                found: values.len(),
            });
        }
        let at_base = &values[space.base().0];
        if !at_base.is_zero() {
            return Err(Error::NonzeroAtBase(at_base.clone()));
        }
        Ok(LipschitzFunction { values })
    }

    pub fn from_fn<F>(space: &PointedMetricSpace, mut f: F) -> Result<Self>
    where
        F: FnMut(PointId) -> Rational,
    {
        Self::new(space, space.points().map(&mut f).collect())
    }

    pub fn zero(space: &PointedMetricSpace) -> Self {
        LipschitzFunction {
            values: vec![Rational::zero(); space.len()],
        }
    }

    /// `d(·, base)`.
    pub fn distance_to_base(space: &PointedMetricSpace) -> Self {
        let base = space.base();
        LipschitzFunction {
            values: space.points().map(|p| space.d(p, base).clone()).collect(),
        }
    }

    pub fn value(&self, p: PointId) -> &Rational {
        &self.values[p.0]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn scaled(&self, t: &Rational) -> Self {
        LipschitzFunction {
            values: self.values.iter().map(|x| x * t).collect(),
        }
    }

    pub fn plus(&self, other: &LipschitzFunction) -> Self {
        LipschitzFunction {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn minus(&self, other: &LipschitzFunction) -> Self {
        LipschitzFunction {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        }
    }

    /// Pointwise absolute value (still zero at the base).
    pub fn abs(&self) -> Self {
        LipschitzFunction {
            values: self.values.iter().map(Rational::abs).collect(),
        }
    }

    pub fn restrict(&self, domain: impl IntoIterator<Item = PointId>) -> PartialFunction {
        PartialFunction::from_iter(domain.into_iter().map(|p| (p, self.values[p.0].clone())))
    }
}

impl PointFunction for LipschitzFunction {
    fn value_at(&self, p: PointId) -> Option<&Rational> {
        self.values.get(p.0)
    }

    fn domain(&self) -> Vec<PointId> {
        (0..self.values.len()).map(PointId).collect()
    }
}

/// A function known only on a subset of the points.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialFunction {
    values: BTreeMap<PointId, Rational>,
}

impl PartialFunction {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, p: PointId, value: Rational) {
        self.values.insert(p, value);
    }

    pub fn get(&self, p: PointId) -> Option<&Rational> {
        self.values.get(&p)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (PointId, &Rational)> {
        self.values.iter().map(|(&p, v)| (p, v))
    }

    /// Pointwise combination on the common domain.
    pub fn zip_with<F>(&self, other: &PartialFunction, mut f: F) -> PartialFunction
    where
        F: FnMut(&Rational, &Rational) -> Rational,
    {
        self.iter()
            .filter_map(|(p, a)| other.get(p).map(|b| (p, f(a, b))))
            .collect()
    }

    pub fn abs(&self) -> PartialFunction {
        self.iter().map(|(p, v)| (p, v.abs())).collect()
    }
}

impl FromIterator<(PointId, Rational)> for PartialFunction {
    fn from_iter<I: IntoIterator<Item = (PointId, Rational)>>(iter: I) -> Self {
        PartialFunction {
            values: iter.into_iter().collect(),
        }
    }
}

impl PointFunction for PartialFunction {
    fn value_at(&self, p: PointId) -> Option<&Rational> {
        self.values.get(&p)
    }

    fn domain(&self) -> Vec<PointId> {
        self.values.keys().copied().collect()
    }
}

/// Best Lipschitz constant together with the first pair attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LipNorm {
    pub value: Rational,
    pub pair: Option<(PointId, PointId)>,
}

/// `max |f(p) − f(q)| / d(p,q)` over pairs `p < q` of the function's domain.
///
/// A domain with fewer than two points has norm zero.
pub fn lip_norm<F: PointFunction + ?Sized>(space: &PointedMetricSpace, f: &F) -> LipNorm {
    let dom = f.domain();
    let mut best = LipNorm {
        value: Rational::zero(),
        pair: None,
    };
    for (i, &p) in dom.iter().enumerate() {
        let fp = f.value_at(p).expect("domain point");
        for &r in &dom[i + 1..] {
            let fr = f.value_at(r).expect("domain point");
            let quotient = (fp - fr).abs() / space.d(p, r);
            if best.pair.is_none() || quotient > best.value {
                best = LipNorm {
                    value: quotient,
                    pair: Some((p, r)),
                };
            }
        }
    }
    best
}

/// True when `|f(p) − f(q)| ≤ d(p,q)` on the whole domain.
pub fn is_one_lipschitz<F: PointFunction + ?Sized>(space: &PointedMetricSpace, f: &F) -> bool {
    let dom = f.domain();
    dom.iter().enumerate().all(|(i, &p)| {
        let fp = f.value_at(p).expect("domain point");
        dom[i + 1..]
            .iter()
            .all(|&r| (fp - f.value_at(r).expect("domain point")).abs() <= *space.d(p, r))
    })
}

/// Extends `f` from its domain `L` to the whole space by
/// `F(y) = max_{x∈L} (f(x) + |w(x)| − d(x,y))` for `y ∉ L`.
///
/// Requires `dom f = dom w = L`, `base ∈ L`, `f(base) = 0`, and `f + |w|`
/// 1-Lipschitz on `L`. With `w ≡ 0` this is the McShane-type extension: it is
/// 1-Lipschitz and, when `L` is a proper subset, its constant is exactly 1.
pub fn sup_extend(
    space: &PointedMetricSpace,
    f: &PartialFunction,
    weight: &PartialFunction,
) -> Result<LipschitzFunction> {
    if f.domain() != weight.domain() {
        return Err(Error::Precondition("function and weight must share a domain".into()));
    }
    if f.get(space.base()).is_none() {
        return Err(Error::Precondition(
            "extension domain must contain the base point".into(),
        ));
    }
    let lifted = f.zip_with(weight, |a, b| a + b.abs());
    if !is_one_lipschitz(space, &lifted) {
        return Err(Error::Precondition(
            "f + |weight| is not 1-Lipschitz on the extension domain".into(),
        ));
    }
    let values = space
        .points()
        .map(|y| match f.get(y) {
            Some(v) => v.clone(),
            None => lifted
                .iter()
                .map(|(x, v)| v - space.d(x, y))
                .max()
                .expect("domain contains the base"),
        })
        .collect();
    LipschitzFunction::new(space, values)
}
