//! JSON documents for spaces and slice lists.
//!
//! A space document names its points and base and gives distances in exactly
//! one of three forms:
//!
//! ```json
//! {"points": ["0", "p"], "base": "0", "matrix": [["0", "2"], ["2", "0"]]}
//! {"points": ["0", "p"], "base": "0", "edges": [{"a": "0", "b": "p", "d": "2"}]}
//! {"points": ["0", "p"], "base": "0", "l1": {"0": [], "p": ["3/2", "1/2"]}}
//! ```
//!
//! Rationals are strings (`"3/2"`, `"0.25"`, `"4"`) or JSON integers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::FamilySpec;
use crate::freespace::{pair_molecule, Molecule, WeakStarSlice};
use crate::metric::{build_from_l1_vectors, build_from_matrix, PointedMetricSpace};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub a: String,
    pub b: String,
    pub d: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDocument {
    pub points: Vec<String>,
    pub base: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<Rational>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<Edge>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l1: Option<BTreeMap<String, Vec<Rational>>>,
    /// Generator that produced the space, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
}

impl SpaceDocument {
    /// Coordinates when the space carries them, the distance matrix otherwise.
    pub fn from_space(space: &PointedMetricSpace) -> Self {
        let mut doc = SpaceDocument {
            points: space.names().to_vec(),
            base: space.name(space.base()).to_string(),
            matrix: None,
            edges: None,
            l1: None,
            family: space.family().cloned(),
        };
        match space.coordinates() {
            Some(coords) => {
                doc.l1 = Some(space.names().iter().cloned().zip(coords.iter().cloned()).collect());
            }
            None => doc.matrix = Some(space.matrix().to_vec()),
        }
        doc
    }

    pub fn into_space(self) -> Result<PointedMetricSpace> {
        let space = match (self.matrix, self.edges, self.l1) {
            (Some(matrix), None, None) => build_from_matrix(&self.points, &self.base, matrix)?,
            (None, Some(edges), None) => {
                build_from_matrix(&self.points, &self.base, complete_edges(&self.points, &edges)?)?
            }
            (None, None, Some(mut l1)) => {
                let vectors = self
                    .points
                    .iter()
                    .map(|p| {
                        l1.remove(p)
                            .map(|v| (p.clone(), v))
                            .ok_or_else(|| Error::OutOfRange(format!("no coordinates for point {p:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if let Some(extra) = l1.keys().next() {
                    return Err(Error::UnknownPoint(extra.clone()));
                }
                build_from_l1_vectors(&vectors, &self.base)?
            }
            _ => return Err(Error::AmbiguousSpaceSource),
        };
        Ok(match self.family {
            Some(f) => space.with_family(f),
            None => space,
        })
    }
}

/// Fills a full matrix from an edge list; every off-diagonal pair must be given.
fn complete_edges(points: &[String], edges: &[Edge]) -> Result<Vec<Vec<Rational>>> {
    let index: BTreeMap<&str, usize> = points.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
    let n = points.len();
    let mut dist: Vec<Vec<Option<Rational>>> = vec![vec![None; n]; n];
    for e in edges {
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownPoint(name.to_string()))
        };
        let (i, j) = (lookup(&e.a)?, lookup(&e.b)?);
        for (x, y) in [(i, j), (j, i)] {
            match &dist[x][y] {
                Some(old) if *old != e.d => return Err(Error::ConflictingEdge(e.a.clone(), e.b.clone())),
                _ => dist[x][y] = Some(e.d.clone()),
            }
        }
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match dist[i][j].take() {
                    Some(d) => Ok(d),
                    None if i == j => Ok(Rational::zero()),
                    None => Err(Error::MissingEdge(points[i].clone(), points[j].clone())),
                })
                .collect()
        })
        .collect()
}

pub fn parse_space(text: &str) -> Result<PointedMetricSpace> {
    serde_json::from_str::<SpaceDocument>(text)?.into_space()
}

pub fn space_to_json(space: &PointedMetricSpace) -> String {
    serde_json::to_string_pretty(&SpaceDocument::from_space(space)).expect("documents serialize")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermEntry {
    pub point: String,
    pub coeff: Rational,
}

/// A molecule given by its terms, or the elementary molecule of an ordered pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoleculeEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<TermEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<[String; 2]>,
    /// Slice width; required only where slices are expected.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Rational>,
}

impl MoleculeEntry {
    pub fn to_molecule(&self, space: &PointedMetricSpace) -> Result<Molecule> {
        match (&self.terms, &self.pair) {
            (Some(terms), None) => {
                let named: Vec<(&str, Rational)> = terms.iter().map(|t| (t.point.as_str(), t.coeff.clone())).collect();
                Molecule::from_named(space, &named)
            }
            (None, Some([x, y])) => pair_molecule(space, space.id(x)?, space.id(y)?),
            _ => Err(Error::OutOfRange(
                "a molecule entry needs exactly one of `terms`, `pair`".into(),
            )),
        }
    }

    /// `default_alpha` applies when the entry has no width of its own.
    pub fn to_slice(&self, space: &PointedMetricSpace, default_alpha: Option<&Rational>) -> Result<WeakStarSlice> {
        let alpha = self
            .alpha
            .as_ref()
            .or(default_alpha)
            .ok_or_else(|| Error::OutOfRange("slice entry has no alpha".into()))?;
        WeakStarSlice::new(space, self.to_molecule(space)?, alpha.clone())
    }
}

pub fn parse_molecule_entries(text: &str) -> Result<Vec<MoleculeEntry>> {
    Ok(serde_json::from_str(text)?)
}
