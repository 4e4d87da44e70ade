//! Deterministic generators for the worked example families and random test spaces.
//!
//! Point order is part of the contract: witness searches break ties by point
//! index, so regression values depend on it.
//!
//! * `ex1(k)`: `a1, a2, b1, b2, u1, v1, …, uk, vk` (base `a1`)
//! * `ex2(k)`: `a, b, u1, v1, …, uk, vk` (base `a`)
//! * `l1_basis(m)`: `0, e1, …, em` (base `0`)
//! * `random_graph_metric(n, seed)`: `p0 … p{n-1}` (base `p0`)
//! * `l1_cloud(m, seed)`: `x0 … x{m-1}` (base `x0`)

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{build_from_l1_vectors, build_from_matrix, PointId, PointedMetricSpace};
use crate::rational::{q, Rational};

/// A named instance of one of the generator families.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum FamilySpec {
    Ex1 { k: usize },
    Ex2 { k: usize },
    L1Basis { m: usize },
    RandomGraphMetric { n: usize, seed: u64 },
    L1Cloud { m: usize, seed: u64 },
}

impl FamilySpec {
    pub fn generate(&self) -> Result<PointedMetricSpace> {
        match *self {
            FamilySpec::Ex1 { k } => gen_ex1(k),
            FamilySpec::Ex2 { k } => gen_ex2(k),
            FamilySpec::L1Basis { m } => gen_l1_basis(m),
            FamilySpec::RandomGraphMetric { n, seed } => gen_random_graph_metric(n, seed),
            FamilySpec::L1Cloud { m, seed } => gen_l1_cloud(m, seed),
        }
    }

    /// Index `i` of a fresh pair point `u_i`/`v_i`, for the two parametrized families.
    pub fn fresh_index(&self, p: PointId) -> Option<usize> {
        let offset = match self {
            FamilySpec::Ex1 { .. } => 4,
            FamilySpec::Ex2 { .. } => 2,
            _ => return None,
        };
        p.0.checked_sub(offset).map(|j| j / 2 + 1)
    }

    /// Number of fresh pairs in the truncation, for the parametrized families.
    pub fn fresh_pairs(&self) -> Option<usize> {
        match *self {
            FamilySpec::Ex1 { k } | FamilySpec::Ex2 { k } => Some(k),
            _ => None,
        }
    }
}

fn fresh_names(k: usize) -> impl Iterator<Item = String> {
    (1..=k).flat_map(|i| [format!("u{i}"), format!("v{i}")])
}

fn table<F>(names: Vec<String>, base: &str, spec: FamilySpec, mut d: F) -> Result<PointedMetricSpace>
where
    F: FnMut(usize, usize) -> i64,
{
    let n = names.len();
    let dist = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Rational::from_integer(if i == j { 0 } else { d(i, j) }))
                .collect()
        })
        .collect();
    Ok(build_from_matrix(&names, base, dist)?.with_family(spec))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ex1Point {
    A,
    B,
    U(usize),
    V(usize),
}

/// The space with the long trapezoid property that fails the strong one.
pub fn gen_ex1(k: usize) -> Result<PointedMetricSpace> {
    if k < 1 {
        return Err(Error::OutOfRange("ex1 needs k >= 1".into()));
    }
    let names: Vec<String> = ["a1", "a2", "b1", "b2"]
        .into_iter()
        .map(String::from)
        .chain(fresh_names(k))
        .collect();
    let kind = |i: usize| match i {
        0 | 1 => Ex1Point::A,
        2 | 3 => Ex1Point::B,
        j => {
            let idx = (j - 4) / 2;
            if (j - 4) % 2 == 0 {
                Ex1Point::U(idx)
            } else {
                Ex1Point::V(idx)
            }
        }
    };
    table(names, "a1", FamilySpec::Ex1 { k }, |i, j| {
        use Ex1Point::*;
        match (kind(i), kind(j)) {
            (A, B) | (B, A) | (A, U(_)) | (U(_), A) | (B, V(_)) | (V(_), B) => 1,
            (U(s), V(t)) | (V(t), U(s)) if s == t => 1,
            _ => 2,
        }
    })
}

/// The space where the four-point inequality always holds but the long
/// trapezoid property fails.
pub fn gen_ex2(k: usize) -> Result<PointedMetricSpace> {
    if k < 1 {
        return Err(Error::OutOfRange("ex2 needs k >= 1".into()));
    }
    let names: Vec<String> = ["a", "b"].into_iter().map(String::from).chain(fresh_names(k)).collect();
    // 0 = a, 1 = b, then (u_i, v_i) interleaved.
    let one = |i: usize, j: usize| {
        let (i, j) = (i.min(j), i.max(j));
        let is_u = |p: usize| p >= 2 && (p - 2).is_multiple_of(2);
        let is_v = |p: usize| p >= 2 && (p - 2) % 2 == 1;
        (i == 0 && is_u(j)) || (i == 1 && is_v(j)) || (is_u(i) && j == i + 1)
    };
    table(names, "a", FamilySpec::Ex2 { k }, |i, j| if one(i, j) { 1 } else { 2 })
}

/// `{0, e1, …, em}` inside ℓ₁.
pub fn gen_l1_basis(m: usize) -> Result<PointedMetricSpace> {
    if m < 2 {
        return Err(Error::OutOfRange("l1_basis needs m >= 2".into()));
    }
    let vectors: Vec<(String, Vec<Rational>)> = std::iter::once(("0".to_string(), vec![]))
        .chain((1..=m).map(|i| {
            let mut v = vec![Rational::zero(); i];
            v[i - 1] = Rational::one();
            (format!("e{i}"), v)
        }))
        .collect();
    Ok(build_from_l1_vectors(&vectors, "0")?.with_family(FamilySpec::L1Basis { m }))
}

/// Shortest-path metric of a random connected graph with rational edge weights.
pub fn gen_random_graph_metric(n: usize, seed: u64) -> Result<PointedMetricSpace> {
    if n < 2 {
        return Err(Error::OutOfRange("random_graph_metric needs n >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weight = |rng: &mut ChaCha8Rng| q(rng.random_range(1..=12), rng.random_range(1..=4));
    let mut edges: Vec<Vec<Option<Rational>>> = vec![vec![None; n]; n];
    for i in 1..n {
        let j = rng.random_range(0..i);
        let w = weight(&mut rng);
        edges[i][j] = Some(w.clone());
        edges[j][i] = Some(w);
    }
    for i in 0..n {
        for j in i + 1..n {
            if edges[i][j].is_none() && rng.random_bool(0.4) {
                let w = weight(&mut rng);
                edges[i][j] = Some(w.clone());
                edges[j][i] = Some(w);
            }
        }
    }
    let dist = shortest_path_closure(&edges);
    let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    Ok(build_from_matrix(&names, "p0", dist)?.with_family(FamilySpec::RandomGraphMetric { n, seed }))
}

/// Floyd–Warshall over exact weights; the graph must be connected.
fn shortest_path_closure(edges: &[Vec<Option<Rational>>]) -> Vec<Vec<Rational>> {
    let n = edges.len();
    let mut d: Vec<Vec<Option<Rational>>> = edges.to_vec();
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(Rational::zero());
    }
    for k in 0..n {
        for i in 0..n {
            let Some(dik) = d[i][k].clone() else { continue };
            for j in 0..n {
                if let Some(dkj) = &d[k][j] {
                    let via = &dik + dkj;
                    if d[i][j].as_ref().is_none_or(|cur| via < *cur) {
                        d[i][j] = Some(via);
                    }
                }
            }
        }
    }
    d.into_iter()
        .map(|row| row.into_iter().map(|x| x.expect("graph is connected")).collect())
        .collect()
}

/// Head dimension of [`gen_l1_cloud`] points.
pub const CLOUD_HEAD_DIM: usize = 3;

/// A bounded, uniformly discrete cloud in ℓ₁.
///
/// Every point is `head + c·e_{3+j}`: the head lives in the first
/// [`CLOUD_HEAD_DIM`] coordinates and is a cluster centre (at most four
/// clusters) moved by at most `1/100` in ℓ₁ norm, and `c ∈ [1, 2]` sits on a
/// coordinate private to the point. Distances therefore lie in `[2, 16]`.
pub fn gen_l1_cloud(m: usize, seed: u64) -> Result<PointedMetricSpace> {
    if m < 2 {
        return Err(Error::OutOfRange("l1_cloud needs m >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clusters = rng.random_range(1..=4usize);
    let centres: Vec<Vec<Rational>> = (0..clusters)
        .map(|_| (0..CLOUD_HEAD_DIM).map(|_| q(rng.random_range(0..=8), 4)).collect())
        .collect();
    let vectors: Vec<(String, Vec<Rational>)> = (0..m)
        .map(|j| {
            let centre = &centres[rng.random_range(0..clusters)];
            let mut v: Vec<Rational> = centre.iter().map(|c| c + q(rng.random_range(0..=1), 300)).collect();
            v.resize(CLOUD_HEAD_DIM + m, Rational::zero());
            v[CLOUD_HEAD_DIM + j] = q(8 + rng.random_range(0..=8), 8);
            (format!("x{j}"), v)
        })
        .collect();
    Ok(build_from_l1_vectors(&vectors, "x0")?.with_family(FamilySpec::L1Cloud { m, seed }))
}

/// Random rational vectors in `[-2, 2]^dim` with quarter-integer coordinates,
/// deduplicated. Points are `y0 … y{m-1}`, base `y0`.
pub fn gen_random_l1_vectors(m: usize, dim: usize, seed: u64) -> Result<PointedMetricSpace> {
    if m < 2 || dim == 0 {
        return Err(Error::OutOfRange("random l1 vectors need m >= 2 and dim >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut attempts = 0;
    while seen.len() < m {
        attempts += 1;
        if attempts > 1000 * m {
            return Err(Error::OutOfRange("too many points for the coordinate grid".into()));
        }
        let v: Vec<Rational> = (0..dim).map(|_| q(rng.random_range(-8..=8), 4)).collect();
        if !seen.contains(&v) {
            seen.push(v);
        }
    }
    let vectors: Vec<(String, Vec<Rational>)> = seen
        .into_iter()
        .enumerate()
        .map(|(j, v)| (format!("y{j}"), v))
        .collect();
    build_from_l1_vectors(&vectors, "y0")
}

/// Candidate witness pairs ordered by the tail-splitting argument for ℓ₁.
#[derive(Clone, Debug, PartialEq)]
pub struct TailSplit {
    /// `δ = ε·r/6`, with `r` the smallest distance in the space.
    pub delta: Rational,
    /// Coordinates `>= cutoff` of every point of `N` have ℓ₁ mass at most `δ`.
    pub cutoff: usize,
    /// All pairs `u < v`, sorted by ℓ₁ distance on the first `cutoff` coordinates.
    pub candidates: Vec<(PointId, PointId)>,
    /// The first `certified` candidates have head distance at most `δ`; for
    /// them both trapezoid inequalities hold at `ε`.
    pub certified: usize,
}

/// Orders candidate pairs so that pairs agreeing (up to `δ`) on the
/// coordinates where `N` carries its mass come first.
pub fn l1_tail_split_candidates(
    space: &PointedMetricSpace,
    subset: &[PointId],
    epsilon: &Rational,
) -> Result<TailSplit> {
    let coords = space
        .coordinates()
        .ok_or_else(|| Error::Precondition("space has no l1 coordinates".into()))?;
    let r = space.separation().ok_or_else(|| Error::TooFewPoints {
        needed: 2,
        got: space.len(),
    })?;
    let delta = epsilon * &r / Rational::from_integer(6);
    let dim = coords.first().map_or(0, Vec::len);
    let tail = |p: PointId, from: usize| -> Rational { coords[p.0][from..].iter().map(Rational::abs).sum() };
    let cutoff = (0..=dim)
        .find(|&n| subset.iter().all(|&x| tail(x, n) <= delta))
        .unwrap_or(dim);
    let head = |u: PointId, v: PointId| -> Rational {
        coords[u.0][..cutoff]
            .iter()
            .zip(&coords[v.0][..cutoff])
            .map(|(a, b)| (a - b).abs())
            .sum()
    };
    let mut scored: Vec<(Rational, PointId, PointId)> = space
        .points()
        .flat_map(|u| space.points().filter(move |&v| u < v).map(move |v| (u, v)))
        .map(|(u, v)| (head(u, v), u, v))
        .collect();
    scored.sort();
    let certified = scored.iter().take_while(|(h, _, _)| *h <= delta).count();
    Ok(TailSplit {
        delta,
        cutoff,
        candidates: scored.into_iter().map(|(_, u, v)| (u, v)).collect(),
        certified,
    })
}
