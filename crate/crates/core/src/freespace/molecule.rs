use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::freespace::lipschitz::{lip_norm, LipschitzFunction, PointFunction};
use crate::freespace::transport;
use crate::metric::{PointId, PointedMetricSpace};
use crate::rational::Rational;

/// A finitely supported element `Σ λⱼ δ_{xⱼ}` of the free space.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Molecule {
    terms: Vec<(PointId, Rational)>,
}

impl Molecule {
    /// Terms must name distinct points with nonzero coefficients.
    pub fn new(terms: Vec<(PointId, Rational)>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(terms.len());
        for (p, c) in &terms {
            if !seen.insert(*p) {
                return Err(Error::DuplicateTerm(format!("{p:?}")));
            }
            if c.is_zero() {
                return Err(Error::ZeroCoefficient(format!("{p:?}")));
            }
        }
        Ok(Molecule { terms })
    }

    /// Like [`Molecule::new`], with points given by name.
    pub fn from_named<S: AsRef<str>>(space: &PointedMetricSpace, terms: &[(S, Rational)]) -> Result<Self> {
        let mut resolved = Vec::with_capacity(terms.len());
        for (name, c) in terms {
            let p = space.id(name.as_ref())?;
            if resolved.iter().any(|(r, _)| *r == p) {
                return Err(Error::DuplicateTerm(name.as_ref().to_string()));
            }
            if c.is_zero() {
                return Err(Error::ZeroCoefficient(name.as_ref().to_string()));
            }
            resolved.push((p, c.clone()));
        }
        Ok(Molecule { terms: resolved })
    }

    /// The evaluation functional `δ_p`.
    pub fn dirac(p: PointId) -> Self {
        Molecule {
            terms: vec![(p, Rational::one())],
        }
    }

    pub fn terms(&self) -> &[(PointId, Rational)] {
        &self.terms
    }

    pub fn support(&self) -> impl Iterator<Item = PointId> + '_ {
        self.terms.iter().map(|(p, _)| *p)
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `t·μ`; scaling by zero gives the empty molecule.
    pub fn scaled(&self, t: &Rational) -> Self {
        if t.is_zero() {
            return Molecule::default();
        }
        Molecule {
            terms: self.terms.iter().map(|(p, c)| (*p, c * t)).collect(),
        }
    }

    pub fn total_mass(&self) -> Rational {
        self.terms.iter().map(|(_, c)| c).sum()
    }
}

/// The elementary molecule `(δ_x − δ_y) / d(x,y)`.
pub fn pair_molecule(space: &PointedMetricSpace, x: PointId, y: PointId) -> Result<Molecule> {
    if x == y {
        return Err(Error::SamePoint(space.name(x).to_string()));
    }
    let w = Rational::one() / space.d(x, y);
    Ok(Molecule {
        terms: vec![(x, w.clone()), (y, -w)],
    })
}

/// `⟨f, μ⟩ = Σ λⱼ f(xⱼ)`.
pub fn evaluate_pairing<F: PointFunction + ?Sized>(f: &F, mu: &Molecule) -> Result<Rational> {
    mu.terms
        .iter()
        .map(|(p, c)| {
            f.value_at(*p)
                .map(|v| v * c)
                .ok_or_else(|| Error::OutsideDomain(format!("{p:?}")))
        })
        .sum()
}

/// Free-space norm of a molecule together with a norm-attaining 1-Lipschitz function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoleculeNorm {
    pub norm: Rational,
    /// `‖dual‖ ≤ 1` and `⟨dual, μ⟩ = norm`.
    pub dual: LipschitzFunction,
    /// Optimal transport plan `(from, to, mass)`.
    pub plan: Vec<(PointId, PointId, Rational)>,
}

/// `‖μ‖` computed as the cheapest transport of the positive part of
/// `μ − (Σλⱼ)·δ_base` onto its negative part, with ground cost `d`.
///
/// The space must be a valid metric.
pub fn molecule_norm(space: &PointedMetricSpace, mu: &Molecule) -> Result<MoleculeNorm> {
    let mut supply = vec![Rational::zero(); space.len()];
    for (p, c) in &mu.terms {
        supply[p.0] += c;
    }
    supply[space.base().0] -= &mu.total_mass();
    let sol = transport::solve(space.matrix(), &supply)?;
    let at_base = sol.potential[space.base().0].clone();
    let dual = LipschitzFunction::new(space, sol.potential.iter().map(|p| p - &at_base).collect())?;
    let pairing = evaluate_pairing(&dual, mu)?;
    if pairing != sol.cost {
        return Err(Error::Invariant(format!(
            "transport cost {} differs from dual pairing {}",
            sol.cost, pairing
        )));
    }
    Ok(MoleculeNorm {
        norm: sol.cost,
        dual,
        plan: sol
            .flows
            .into_iter()
            .map(|(i, j, x)| (PointId(i), PointId(j), x))
            .collect(),
    })
}

/// `S(B_{Lip₀}, μ/‖μ‖, α) = { f : ‖f‖ ≤ 1, ⟨f, μ⟩/‖μ‖ > 1 − α }`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakStarSlice {
    pub functional: Molecule,
    pub norm_of_functional: Rational,
    pub alpha: Rational,
}

impl WeakStarSlice {
    /// Computes and caches `‖μ‖`; requires `μ ≠ 0` and `0 < α ≤ 1`.
    pub fn new(space: &PointedMetricSpace, functional: Molecule, alpha: Rational) -> Result<Self> {
        if !alpha.is_positive() || alpha > Rational::one() {
            return Err(Error::OutOfRange(format!(
                "slice width must lie in (0, 1], got {alpha}"
            )));
        }
        let norm = molecule_norm(space, &functional)?.norm;
        if !norm.is_positive() {
            return Err(Error::OutOfRange("slice functional has norm zero".into()));
        }
        Ok(WeakStarSlice {
            functional,
            norm_of_functional: norm,
            alpha,
        })
    }

    /// `⟨f, μ⟩ / ‖μ‖`.
    pub fn normalized_pairing<F: PointFunction + ?Sized>(&self, f: &F) -> Result<Rational> {
        Ok(evaluate_pairing(f, &self.functional)? / &self.norm_of_functional)
    }

    pub fn threshold(&self) -> Rational {
        Rational::one() - &self.alpha
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceMembership {
    InSlice,
    /// In the unit ball, but the pairing does not exceed `1 − α`.
    BelowThreshold,
    /// Lipschitz constant above 1.
    OutsideBall,
}

impl SliceMembership {
    pub fn is_member(self) -> bool {
        self == SliceMembership::InSlice
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceCheck {
    pub membership: SliceMembership,
    pub lip_norm: Rational,
    pub pairing: Rational,
}

pub fn slice_contains(space: &PointedMetricSpace, slice: &WeakStarSlice, f: &LipschitzFunction) -> Result<SliceCheck> {
    let norm = lip_norm(space, f).value;
    let pairing = slice.normalized_pairing(f)?;
    let membership = if norm > Rational::one() {
        SliceMembership::OutsideBall
    } else if pairing > slice.threshold() {
        SliceMembership::InSlice
    } else {
        SliceMembership::BelowThreshold
    };
    Ok(SliceCheck {
        membership,
        lip_norm: norm,
        pairing,
    })
}
