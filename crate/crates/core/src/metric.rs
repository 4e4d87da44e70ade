//! Finite pointed metric spaces with exact distances.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::FamilySpec;
use crate::rational::Rational;

/// Position of a point inside its [`PointedMetricSpace`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub usize);

impl PointId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Debug for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A finite point set with a full distance matrix and a base point.
///
/// Construction checks only the shape of the input. Whether the matrix is a
/// metric is decided separately by [`validate_metric`], so broken inputs can
/// still be loaded and inspected.
#[derive(Clone, Debug, PartialEq)]
pub struct PointedMetricSpace {
    names: Vec<String>,
    lookup: HashMap<String, PointId>,
    dist: Vec<Vec<Rational>>,
    base: PointId,
    coordinates: Option<Vec<Vec<Rational>>>,
    family: Option<FamilySpec>,
    /// `dist · L` as row-major integers for the least common denominator `L`,
    /// when every entry stays below [`INTEGER_DISTANCE_BOUND`] in magnitude.
    integer_dist: Option<Vec<i64>>,
}

/// Bound on integer-scaled distances, leaving headroom for `i128` sums of products.
pub(crate) const INTEGER_DISTANCE_BOUND: i64 = 1 << 40;

fn integer_matrix(dist: &[Vec<Rational>]) -> Option<Vec<i64>> {
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    let lcm = dist
        .iter()
        .flatten()
        .fold(num_bigint::BigInt::from(1), |acc, x| acc.lcm(x.denom()));
    dist.iter()
        .flatten()
        .map(|x| {
            let scaled = (x.numer() * &lcm / x.denom()).to_i64()?;
            (scaled.abs() < INTEGER_DISTANCE_BOUND).then_some(scaled)
        })
        .collect()
}

impl PointedMetricSpace {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn base(&self) -> PointId {
        self.base
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = PointId> + Clone {
        (0..self.names.len()).map(PointId)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, p: PointId) -> &str {
        &self.names[p.0]
    }

    pub fn id(&self, name: &str) -> Result<PointId> {
        self.lookup
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownPoint(name.to_string()))
    }

    /// Resolves a list of names, keeping the order given and dropping repeats.
    pub fn ids<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<PointId>> {
        let mut out = Vec::with_capacity(names.len());
        for n in names {
            let id = self.id(n.as_ref())?;
            if !out.contains(&id) {
                out.push(id);
            }
        }
        Ok(out)
    }

    #[inline]
    pub fn d(&self, p: PointId, q: PointId) -> &Rational {
        &self.dist[p.0][q.0]
    }

    /// Distances times a common positive scale, as integers, when small enough.
    pub(crate) fn integer_distances(&self) -> Option<&[i64]> {
        self.integer_dist.as_deref()
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    pub fn diameter(&self) -> Rational {
        self.dist.iter().flatten().max().cloned().unwrap_or_default()
    }

    /// Smallest distance between distinct points, if there are at least two.
    pub fn separation(&self) -> Option<Rational> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| self.dist[i][j].clone())
            .min()
    }

    /// ℓ₁ coordinates, when the space was built from vectors.
    pub fn coordinates(&self) -> Option<&[Vec<Rational>]> {
        self.coordinates.as_deref()
    }

    /// Generator that produced this space, when known.
    pub fn family(&self) -> Option<&FamilySpec> {
        self.family.as_ref()
    }

    pub fn with_family(mut self, family: FamilySpec) -> Self {
        self.family = Some(family);
        self
    }

    pub fn with_base(mut self, base: PointId) -> Self {
        assert!(base.0 < self.len(), "base out of range");
        self.base = base;
        self
    }

    /// Same space with every distance multiplied by `t`.
    pub fn scaled(&self, t: &Rational) -> Self {
        let mut out = self.clone();
        for row in &mut out.dist {
            for x in row.iter_mut() {
                *x = &*x * t;
            }
        }
        out.coordinates = None;
        out.integer_dist = integer_matrix(&out.dist);
        out
    }

    /// Same space with points listed in `order` (a permutation of all ids).
    pub fn reordered(&self, order: &[PointId]) -> Self {
        assert_eq!(order.len(), self.len(), "order must be a permutation");
        let names: Vec<String> = order.iter().map(|p| self.names[p.0].clone()).collect();
        let dist: Vec<Vec<Rational>> = order
            .iter()
            .map(|p| order.iter().map(|q| self.dist[p.0][q.0].clone()).collect())
            .collect();
        let base = PointId(order.iter().position(|&p| p == self.base).expect("permutation"));
        let coordinates = self
            .coordinates
            .as_ref()
            .map(|c| order.iter().map(|p| c[p.0].clone()).collect());
        let lookup = index_names(&names).expect("names stay unique");
        PointedMetricSpace {
            names,
            lookup,
            integer_dist: integer_matrix(&dist),
            dist,
            base,
            coordinates,
            family: self.family.clone(),
        }
    }
}

fn index_names(names: &[String]) -> Result<HashMap<String, PointId>> {
    let mut lookup = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if lookup.insert(n.clone(), PointId(i)).is_some() {
            return Err(Error::DuplicateName(n.clone()));
        }
    }
    Ok(lookup)
}

/// Builds a space from a square distance matrix. No metric axioms are checked.
pub fn build_from_matrix<S: AsRef<str>>(
    names: &[S],
    base: &str,
    dist: Vec<Vec<Rational>>,
) -> Result<PointedMetricSpace> {
    let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
    let lookup = index_names(&names)?;
    let n = names.len();
    if dist.len() != n {
        return Err(Error::DimensionMismatch {
            row: dist.len().min(n),
            expected: n,
            found: 0,
        });
    }
    for (row, entries) in dist.iter().enumerate() {
        if entries.len() != n {
            return Err(Error::DimensionMismatch {
                row,
                expected: n,
                found: entries.len(),
            });
        }
    }
    let base = *lookup.get(base).ok_or_else(|| Error::UnknownPoint(base.to_string()))?;
    Ok(PointedMetricSpace {
        names,
        lookup,
        integer_dist: integer_matrix(&dist),
        dist,
        base,
        coordinates: None,
        family: None,
    })
}

/// Builds the subspace of ℓ₁ spanned by finitely many finitely supported vectors.
///
/// Shorter coordinate lists are padded with zeros.
pub fn build_from_l1_vectors<S: AsRef<str>>(vectors: &[(S, Vec<Rational>)], base: &str) -> Result<PointedMetricSpace> {
    if vectors.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: vectors.len(),
        });
    }
    let names: Vec<String> = vectors.iter().map(|(s, _)| s.as_ref().to_string()).collect();
    let dim = vectors.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
    let coords: Vec<Vec<Rational>> = vectors
        .iter()
        .map(|(_, v)| {
            let mut v = v.clone();
            v.resize(dim, Rational::zero());
            v
        })
        .collect();
    let n = coords.len();
    let mut dist = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d: Rational = coords[i].iter().zip(&coords[j]).map(|(a, b)| (a - b).abs()).sum();
            if d.is_zero() {
                return Err(Error::DuplicateVector(names[i].clone(), names[j].clone()));
            }
            dist[i][j] = d.clone();
            dist[j][i] = d;
        }
    }
    let mut space = build_from_matrix(&names, base, dist)?;
    space.coordinates = Some(coords);
    Ok(space)
}

/// Which metric axiom an entry violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    /// `d(p,p) = 0`
    ZeroDiagonal,
    /// `d(p,q) ≥ 0`
    Nonnegativity,
    /// `d(p,q) > 0` for `p ≠ q`
    Separation,
    /// `d(p,q) = d(q,p)`
    Symmetry,
    /// `d(a,c) ≤ d(a,b) + d(b,c)`; points are reported as `(a, c, b)`.
    Triangle,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom: Axiom,
    pub points: Vec<PointId>,
    pub lhs: Rational,
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Lists every metric-axiom violation of the space's distance matrix.
pub fn validate_metric(space: &PointedMetricSpace) -> ValidationReport {
    let n = space.len();
    let d = &space.dist;
    let zero = Rational::zero();
    let mut violations = Vec::new();
    let mut push = |axiom, points: Vec<usize>, lhs: &Rational, rhs: &Rational| {
        violations.push(Violation {
            axiom,
            points: points.into_iter().map(PointId).collect(),
            lhs: lhs.clone(),
            rhs: rhs.clone(),
        })
    };
    for i in 0..n {
        if !d[i][i].is_zero() {
            push(Axiom::ZeroDiagonal, vec![i], &d[i][i], &zero);
        }
        for j in 0..n {
            if i == j {
                continue;
            }
            if d[i][j].is_negative() {
                push(Axiom::Nonnegativity, vec![i, j], &d[i][j], &zero);
            } else if d[i][j].is_zero() && i < j {
                push(Axiom::Separation, vec![i, j], &d[i][j], &zero);
            }
            if i < j && d[i][j] != d[j][i] {
                push(Axiom::Symmetry, vec![i, j], &d[i][j], &d[j][i]);
            }
        }
    }
    for a in 0..n {
        for c in a + 1..n {
            for b in 0..n {
                if b == a || b == c {
                    continue;
                }
                let rhs = &d[a][b] + &d[b][c];
                if d[a][c] > rhs {
                    push(Axiom::Triangle, vec![a, c, b], &d[a][c], &rhs);
                }
            }
        }
    }
    ValidationReport {
        ok: violations.is_empty(),
        violations,
    }
}

/// `{ p : d(p, center) < radius }`.
pub fn open_ball(space: &PointedMetricSpace, center: PointId, radius: &Rational) -> BTreeSet<PointId> {
    space.points().filter(|&p| space.d(p, center) < radius).collect()
}
