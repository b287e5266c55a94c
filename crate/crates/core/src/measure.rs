//! Finite-support measures on ℝᵈ.
//!
//! A [`DiscreteMeasure`] is stored in canonical form: atoms sorted by point
//! (lexicographically), duplicate points merged, zero-mass atoms dropped.
//! Masses are exact rationals, so total mass, mixtures, coarsening and the
//! quantile round trip are exact.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::num::{block_mean, compensated_sum, rational, to_f64, Rational};
use crate::quantile::StepQuantile;
use crate::{Error, Result};

/// A point of ℝᵈ with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomePoint(Vec<f64>);

impl OutcomePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Invalid { what: "outcome point", reason: "dimension must be at least 1" });
        }
        if let Some(index) = coords.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what: "coordinate", index });
        }
        // -0.0 and 0.0 are the same outcome
        Ok(Self(coords.into_iter().map(|x| x + 0.0).collect()))
    }

    /// One-dimensional outcome. Panics on a non-finite value.
    pub fn scalar(x: f64) -> Self {
        Self::new(alloc::vec![x]).expect("finite scalar outcome")
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// The single coordinate of a one-dimensional point.
    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// Componentwise `self >= other`.
    pub fn dominates(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }
}

impl Eq for OutcomePoint {}

impl PartialOrd for OutcomePoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OutcomePoint {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    Probability,
    /// Nonzero masses of either sign; only produced as differences of
    /// probability measures inside elicitation.
    Signed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub point: OutcomePoint,
    pub mass: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteMeasure {
    kind: MeasureKind,
    dim: usize,
    atoms: Vec<Atom>,
}

/// Sorts, merges duplicate points and drops zero masses.
fn canonical_atoms(mut atoms: Vec<Atom>) -> Vec<Atom> {
    atoms.sort_by(|a, b| a.point.cmp(&b.point));
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for atom in atoms {
        match out.last_mut() {
            Some(last) if last.point == atom.point => last.mass += atom.mass,
            _ => out.push(atom),
        }
    }
    out.retain(|a| !a.mass.is_zero());
    out
}

fn check_dims(atoms: &[Atom]) -> Result<usize> {
    let dim = atoms.first().map(|a| a.point.dim()).ok_or(Error::Empty)?;
    for a in atoms {
        if a.point.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: a.point.dim() });
        }
    }
    Ok(dim)
}

impl DiscreteMeasure {
    /// Builds a probability measure, normalizing the masses to sum to one.
    ///
    /// Masses must be nonnegative with a positive total.
    pub fn probability<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (OutcomePoint, Rational)>,
    {
        let atoms: Vec<Atom> = atoms.into_iter().map(|(point, mass)| Atom { point, mass }).collect();
        let dim = check_dims(&atoms)?;
        if let Some(i) = atoms.iter().position(|a| a.mass.is_negative()) {
            return Err(Error::NegativeMass(i));
        }
        let mut atoms = canonical_atoms(atoms);
        if atoms.is_empty() {
            return Err(Error::Empty);
        }
        let total: Rational = atoms.iter().map(|a| &a.mass).sum();
        if !total.is_one() {
            for a in &mut atoms {
                a.mass = &a.mass / &total;
            }
        }
        Ok(Self { kind: MeasureKind::Probability, dim, atoms })
    }

    /// One-dimensional probability measure from `(point, mass)` pairs of floats.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let mut atoms = Vec::with_capacity(pairs.len());
        for (i, &(x, m)) in pairs.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFinite { what: "point", index: i });
            }
            let m = rational(m).ok_or(Error::NonFinite { what: "mass", index: i })?;
            atoms.push((OutcomePoint::scalar(x), m));
        }
        Self::probability(atoms)
    }

    pub fn point_mass(point: OutcomePoint) -> Self {
        let dim = point.dim();
        Self { kind: MeasureKind::Probability, dim, atoms: alloc::vec![Atom { point, mass: Rational::one() }] }
    }

    /// Builds a signed measure. Zero masses in the input are rejected; masses
    /// that cancel after merging are dropped, so the result may be empty.
    pub fn signed<I>(dim: usize, atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (OutcomePoint, Rational)>,
    {
        let atoms: Vec<Atom> = atoms.into_iter().map(|(point, mass)| Atom { point, mass }).collect();
        for (i, a) in atoms.iter().enumerate() {
            if a.point.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: a.point.dim() });
            }
            if a.mass.is_zero() {
                return Err(Error::ZeroMass(i));
            }
        }
        Ok(Self { kind: MeasureKind::Signed, dim, atoms: canonical_atoms(atoms) })
    }

    /// The signed measure `self − other`.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let atoms = self
            .atoms
            .iter()
            .cloned()
            .chain(other.atoms.iter().map(|a| Atom { point: a.point.clone(), mass: -a.mass.clone() }))
            .collect();
        Ok(Self { kind: MeasureKind::Signed, dim: self.dim, atoms: canonical_atoms(atoms) })
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> Rational {
        self.atoms.iter().map(|a| &a.mass).sum()
    }

    /// Mass carried by `point`, zero when it is not an atom.
    pub fn mass_at(&self, point: &OutcomePoint) -> Rational {
        self.atoms
            .binary_search_by(|a| a.point.cmp(point))
            .map(|i| self.atoms[i].mass.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    fn require_probability(&self) -> Result<()> {
        match self.kind {
            MeasureKind::Probability => Ok(()),
            MeasureKind::Signed => Err(Error::UnsupportedKind),
        }
    }

    fn require_scalar(&self) -> Result<()> {
        self.require_probability()?;
        if self.dim != 1 {
            return Err(Error::RequiresScalar(self.dim));
        }
        Ok(())
    }

    /// `F(t) = μ((−∞, t])`.
    pub fn cdf(&self, t: f64) -> Result<Rational> {
        self.require_scalar()?;
        Ok(self.atoms.iter().take_while(|a| a.point.value() <= t).map(|a| &a.mass).sum())
    }

    /// The left-continuous quantile function `p ↦ inf{t : F(t) ≥ p}`.
    pub fn quantile(&self) -> Result<StepQuantile> {
        self.require_scalar()?;
        let mut cumulative = Rational::zero();
        let mut levels = Vec::with_capacity(self.atoms.len());
        let mut values = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            cumulative += &a.mass;
            levels.push(cumulative.clone());
            values.push(a.point.value());
        }
        StepQuantile::new(levels, values)
    }

    /// `α·μ + (1−α)·ν` with merged supports.
    pub fn mix(alpha: f64, mu: &Self, nu: &Self) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::WeightOutOfRange(alpha));
        }
        Self::mix_exact(&rational(alpha).expect("finite weight"), mu, nu)
    }

    /// [`mix`](Self::mix) with an exact rational weight.
    pub fn mix_exact(alpha: &Rational, mu: &Self, nu: &Self) -> Result<Self> {
        mu.require_probability()?;
        nu.require_probability()?;
        if mu.dim != nu.dim {
            return Err(Error::DimensionMismatch { expected: mu.dim, found: nu.dim });
        }
        if alpha.is_negative() || *alpha > Rational::one() {
            return Err(Error::WeightOutOfRange(to_f64(alpha)));
        }
        let beta = Rational::one() - alpha;
        let atoms = mu
            .atoms
            .iter()
            .map(|a| Atom { point: a.point.clone(), mass: &a.mass * alpha })
            .chain(nu.atoms.iter().map(|a| Atom { point: a.point.clone(), mass: &a.mass * &beta }))
            .collect();
        Ok(Self { kind: MeasureKind::Probability, dim: mu.dim, atoms: canonical_atoms(atoms) })
    }

    /// Mass-weighted mean of the atom points.
    pub fn expectation(&self) -> Result<OutcomePoint> {
        self.require_probability()?;
        let coords = (0..self.dim)
            .map(|k| compensated_sum(self.atoms.iter().map(|a| a.point.coords()[k] * to_f64(&a.mass))))
            .collect();
        Ok(OutcomePoint(coords))
    }

    /// Conditional-expectation coarsening on an interval partition: the atoms
    /// of each cell collapse to their conditional mean, carrying the cell mass.
    pub fn coarsen(&self, partition: &IntervalPartition) -> Result<Self> {
        self.require_scalar()?;
        let mut atoms = Vec::new();
        let mut start = 0;
        while start < self.atoms.len() {
            let cell = partition.cell_of(self.atoms[start].point.value());
            let end = start
                + self.atoms[start..]
                    .iter()
                    .take_while(|a| partition.cell_of(a.point.value()) == cell)
                    .count();
            let (mean, mass) = block_mean(self.atoms[start..end].iter().map(|a| (a.point.value(), &a.mass)));
            atoms.push(Atom { point: OutcomePoint::scalar(mean), mass });
            start = end;
        }
        Ok(Self { kind: MeasureKind::Probability, dim: 1, atoms: canonical_atoms(atoms) })
    }
}

/// Cells `(−∞,c₁], (c₁,c₂], …, (c_k,∞)` generated by strictly increasing cuts.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalPartition {
    cuts: Vec<f64>,
}

impl IntervalPartition {
    pub fn new(cuts: Vec<f64>) -> Result<Self> {
        if let Some(index) = cuts.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { what: "cut", index });
        }
        if let Some(i) = cuts.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::NotIncreasing { what: "cuts", index: i + 1 });
        }
        Ok(Self { cuts })
    }

    /// The partition `{ℝ}`.
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    pub fn cell_count(&self) -> usize {
        self.cuts.len() + 1
    }

    /// Index of the cell containing `x`.
    pub fn cell_of(&self, x: f64) -> usize {
        self.cuts.partition_point(|&c| c < x)
    }
}

/// A random variable on a finite sample space.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteRandomVariable {
    weights: Vec<Rational>,
    values: Vec<f64>,
}

impl FiniteRandomVariable {
    /// Weights must be positive; they are normalized to sum to one.
    pub fn new(weights: Vec<Rational>, values: Vec<f64>) -> Result<Self> {
        if weights.len() != values.len() {
            return Err(Error::LengthMismatch { expected: weights.len(), found: values.len() });
        }
        if weights.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(i) = weights.iter().position(|w| !w.is_positive()) {
            return Err(Error::NegativeMass(i));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "value", index });
        }
        let total: Rational = weights.iter().sum();
        let weights = weights.into_iter().map(|w| w / &total).collect();
        Ok(Self { weights, values })
    }

    /// Uniform weights over the sample points.
    pub fn uniform(values: Vec<f64>) -> Result<Self> {
        let weights = values.iter().map(|_| Rational::one()).collect();
        Self::new(weights, values)
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The distribution `P ∘ Z⁻¹`.
    pub fn law(&self) -> DiscreteMeasure {
        DiscreteMeasure::probability(
            self.values.iter().zip(&self.weights).map(|(&v, w)| (OutcomePoint::scalar(v), w.clone())),
        )
        .expect("positive weights give a valid law")
    }
}

/// Whether the variables are pairwise comonotonic on their shared sample space.
///
/// Sorting the sample points lexicographically by the value tuple yields an
/// order along which every variable is nondecreasing iff the family is
/// comonotonic, so this runs in `O(k·n log n)`.
pub fn are_comonotonic(vars: &[FiniteRandomVariable]) -> Result<bool> {
    let Some(first) = vars.first() else {
        return Ok(true);
    };
    let n = first.len();
    for v in vars {
        if v.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: v.len() });
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        vars.iter()
            .map(|v| v.values[a].total_cmp(&v.values[b]))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    });
    Ok(vars.iter().all(|v| order.windows(2).all(|w| v.values[w[0]] <= v.values[w[1]])))
}
