//! Systems, states, effects, measurements, transformations and tests.
//!
//! A system is given by the extremal normalized states generating its state
//! cone, generators of its effect cone, and the unit (deterministic) effect.
//! States, effects and channels are plain coordinate data; the operations
//! here check them against the system they are meant to live on.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{GptError, Result};
use crate::exactmath::{
    conic_combination, format_rational, ConeV, Rational, RationalMatrix, RationalVector,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GptSystem {
    name: String,
    dim: usize,
    states: Vec<RationalVector>,
    effects: Vec<RationalVector>,
    unit: RationalVector,
    exhaustive: bool,
}

impl GptSystem {
    /// Assemble a system. Only shapes are checked here; the physical
    /// invariants are checked by [`validate_system`].
    pub fn new(
        name: impl Into<String>,
        states: Vec<RationalVector>,
        effects: Vec<RationalVector>,
        unit: RationalVector,
    ) -> Result<Self> {
        let dim = unit.dim();
        if dim == 0 {
            return Err(GptError::Empty("unit effect"));
        }
        if states.is_empty() {
            return Err(GptError::Empty("state generator list"));
        }
        if effects.is_empty() {
            return Err(GptError::Empty("effect generator list"));
        }
        for v in states.iter().chain(&effects) {
            if v.dim() != dim {
                return Err(GptError::DimensionMismatch {
                    expected: dim,
                    found: v.dim(),
                });
            }
        }
        Ok(Self {
            name: name.into(),
            dim,
            states,
            effects,
            unit,
            exhaustive: true,
        })
    }

    /// Declare whether the state generator list is the complete set of pure
    /// states. Maximality-dependent verdicts are conditional on it.
    pub fn with_exhaustive(mut self, exhaustive: bool) -> Self {
        self.exhaustive = exhaustive;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn states(&self) -> &[RationalVector] {
        &self.states
    }

    pub fn effects(&self) -> &[RationalVector] {
        &self.effects
    }

    pub fn unit(&self) -> &RationalVector {
        &self.unit
    }

    pub fn exhaustive(&self) -> bool {
        self.exhaustive
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: usize) -> Result<&RationalVector> {
        self.states.get(i).ok_or(GptError::IndexOutOfRange {
            index: i,
            len: self.states.len(),
        })
    }

    pub fn pure_state(&self, i: usize) -> Result<GptState> {
        Ok(GptState {
            vector: self.state(i)?.clone(),
            norm: Rational::one(),
        })
    }

    pub fn state_cone(&self) -> ConeV {
        ConeV::new(self.dim, self.states.clone()).expect("state generators are nonzero")
    }

    pub fn effect_cone(&self) -> ConeV {
        ConeV::new(
            self.dim,
            self.effects
                .iter()
                .filter(|e| !e.is_zero())
                .cloned()
                .collect(),
        )
        .expect("shape checked at construction")
    }

    pub fn in_state_cone(&self, v: &RationalVector) -> Result<bool> {
        self.check_dim(v)?;
        Ok(conic_combination(v, &self.states)?.is_some())
    }

    pub fn in_effect_cone(&self, v: &RationalVector) -> Result<bool> {
        self.check_dim(v)?;
        Ok(conic_combination(v, &self.effects)?.is_some())
    }

    pub fn check_dim(&self, v: &RationalVector) -> Result<()> {
        if v.dim() != self.dim {
            return Err(GptError::DimensionMismatch {
                expected: self.dim,
                found: v.dim(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Invariant {
    /// `(u | g) = 1` on every state generator.
    Normalization,
    /// `0 <= (e | g) <= 1` for every effect and state generator.
    EffectBounds,
    /// The unit effect lies in the effect cone.
    UnitInEffectCone,
    /// No state generator is a conic combination of the others.
    StateExtremality,
}

impl Invariant {
    pub const ALL: [Invariant; 4] = [
        Invariant::Normalization,
        Invariant::EffectBounds,
        Invariant::UnitInEffectCone,
        Invariant::StateExtremality,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Self::Normalization => "normalization",
            Self::EffectBounds => "effect-bounds",
            Self::UnitInEffectCone => "unit-in-effect-cone",
            Self::StateExtremality => "state-extremality",
        }
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantCheck {
    pub invariant: Invariant,
    pub holds: bool,
    /// First offending generator: a state index, or for effect bounds the
    /// effect index.
    pub offending: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<InvariantCheck>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn first_violation(&self) -> Option<&InvariantCheck> {
        self.checks.iter().find(|c| !c.holds)
    }
}

pub fn validate_system(sys: &GptSystem) -> Result<ValidationReport> {
    let mut checks = Vec::with_capacity(4);

    let bad_norm = sys
        .states
        .iter()
        .position(|g| sys.unit.dot(g) != Rational::one());
    checks.push(InvariantCheck {
        invariant: Invariant::Normalization,
        holds: bad_norm.is_none(),
        offending: bad_norm,
    });

    let bad_bound = sys.effects.iter().position(|e| {
        sys.states.iter().any(|g| {
            let p = e.dot(g);
            p.is_negative() || p > Rational::one()
        })
    });
    checks.push(InvariantCheck {
        invariant: Invariant::EffectBounds,
        holds: bad_bound.is_none(),
        offending: bad_bound,
    });

    let unit_ok = sys.in_effect_cone(&sys.unit)?;
    checks.push(InvariantCheck {
        invariant: Invariant::UnitInEffectCone,
        holds: unit_ok,
        offending: None,
    });

    let mut non_extremal = None;
    for i in 0..sys.states.len() {
        if !is_extremal_generator(&sys.states, i)? {
            non_extremal = Some(i);
            break;
        }
    }
    checks.push(InvariantCheck {
        invariant: Invariant::StateExtremality,
        holds: non_extremal.is_none(),
        offending: non_extremal,
    });

    Ok(ValidationReport { checks })
}

/// `generators[i]` is not a nonnegative combination of the other generators.
pub fn is_extremal_generator(generators: &[RationalVector], i: usize) -> Result<bool> {
    let others: Vec<RationalVector> = generators
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, g)| g.clone())
        .collect();
    Ok(conic_combination(&generators[i], &others)?.is_none())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EffectValidity {
    Valid,
    OutsideEffectCone,
    ComplementOutsideEffectCone,
}

impl EffectValidity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Self::Valid)
    }
}

/// An effect must be in the effect cone and so must its complement
/// `u - e`, since every effect belongs to some measurement.
pub fn is_valid_effect(sys: &GptSystem, v: &RationalVector) -> Result<EffectValidity> {
    sys.check_dim(v)?;
    if !sys.in_effect_cone(v)? {
        return Ok(EffectValidity::OutsideEffectCone);
    }
    if !sys.in_effect_cone(&(&sys.unit - v))? {
        return Ok(EffectValidity::ComplementOutsideEffectCone);
    }
    Ok(EffectValidity::Valid)
}

/// A state vector with its normalization `(u | vector)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GptState {
    vector: RationalVector,
    norm: Rational,
}

impl GptState {
    /// Checks cone membership and `0 < norm <= 1`.
    pub fn new(sys: &GptSystem, vector: RationalVector) -> Result<Self> {
        sys.check_dim(&vector)?;
        let norm = sys.unit.dot(&vector);
        if !norm.is_positive() || norm > Rational::one() {
            return Err(GptError::BadNorm(format_rational(&norm)));
        }
        if !sys.in_state_cone(&vector)? {
            return Err(GptError::NotAState);
        }
        Ok(Self { vector, norm })
    }

    /// Convex (or sub-normalized) mixture of pure states.
    pub fn mixture(sys: &GptSystem, weights: &[(Rational, usize)]) -> Result<Self> {
        let mut v = RationalVector::zeros(sys.dim);
        for (w, i) in weights {
            if w.is_negative() {
                return Err(GptError::BadProbabilities(format!(
                    "negative weight {}",
                    format_rational(w)
                )));
            }
            v = &v + &sys.state(*i)?.scale(w);
        }
        Self::new(sys, v)
    }

    pub(crate) fn from_parts(vector: RationalVector, norm: Rational) -> Self {
        Self { vector, norm }
    }

    pub fn vector(&self) -> &RationalVector {
        &self.vector
    }

    pub fn norm(&self) -> &Rational {
        &self.norm
    }

    pub fn is_normalized(&self) -> bool {
        self.norm.is_one()
    }

    /// Rescale to unit norm. `None` for the zero state.
    pub fn renormalized(&self) -> Option<Self> {
        if self.norm.is_zero() {
            return None;
        }
        Some(Self {
            vector: self.vector.scale(&self.norm.recip()),
            norm: Rational::one(),
        })
    }
}

/// A list of effects summing to the unit effect.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measurement {
    effects: Vec<RationalVector>,
}

impl Measurement {
    /// Every effect must lie in the effect cone and the effects must sum to
    /// the unit; each complement is then the sum of the others.
    pub fn new(sys: &GptSystem, effects: Vec<RationalVector>) -> Result<Self> {
        if effects.is_empty() {
            return Err(GptError::Empty("measurement"));
        }
        for (i, e) in effects.iter().enumerate() {
            sys.check_dim(e)?;
            if !sys.in_effect_cone(e)? {
                return Err(GptError::InvalidEffect {
                    index: i,
                    reason: "outside the effect cone".into(),
                });
            }
        }
        let m = Self { effects };
        m.check_sums_to(sys.unit())?;
        Ok(m)
    }

    /// For effects already known to be conic combinations of generators.
    pub(crate) fn from_effects_unchecked(effects: Vec<RationalVector>) -> Self {
        Self { effects }
    }

    pub fn effects(&self) -> &[RationalVector] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn total(&self) -> RationalVector {
        RationalVector::sum(self.effects[0].dim(), &self.effects)
    }

    pub fn check_sums_to(&self, unit: &RationalVector) -> Result<()> {
        let total = self.total();
        if &total != unit {
            return Err(GptError::NotNormalized {
                found: total.to_string(),
            });
        }
        Ok(())
    }

    pub fn probabilities(&self, state: &RationalVector) -> Vec<Rational> {
        self.effects.iter().map(|e| e.dot(state)).collect()
    }

    /// `(a_i | states[j]) = delta_ij` for all `i, j`, with as many effects as
    /// states.
    pub fn distinguishes(&self, states: &[RationalVector]) -> bool {
        self.effects.len() == states.len()
            && self.effects.iter().enumerate().all(|(i, e)| {
                states.iter().enumerate().all(|(j, s)| {
                    let p = e.dot(s);
                    if i == j {
                        p.is_one()
                    } else {
                        p.is_zero()
                    }
                })
            })
    }
}

/// A linear map between state spaces, `out_dim x in_dim`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChannelMatrix {
    matrix: RationalMatrix,
}

impl ChannelMatrix {
    pub fn new(matrix: RationalMatrix) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(RationalMatrix::identity(dim))
    }

    pub fn zero(out_dim: usize, in_dim: usize) -> Self {
        Self::new(RationalMatrix::zeros(out_dim, in_dim))
    }

    /// `|state)(effect|`.
    pub fn measure_prepare(state: &RationalVector, effect: &RationalVector) -> Self {
        Self::new(RationalMatrix::outer(state, effect))
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.matrix
    }

    pub fn in_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply_vector(&self, v: &RationalVector) -> RationalVector {
        self.matrix.mul_vec(v)
    }

    /// The effect `e` precomposed with this channel: `e C`.
    pub fn pull_back(&self, effect: &RationalVector) -> RationalVector {
        self.matrix.vec_mul(effect)
    }

    /// `self` after `first`.
    pub fn after(&self, first: &ChannelMatrix) -> Self {
        Self::new(self.matrix.mul(&first.matrix))
    }

    pub fn add(&self, other: &ChannelMatrix) -> Self {
        Self::new(self.matrix.add(&other.matrix))
    }

    pub fn kron(&self, other: &ChannelMatrix) -> Self {
        Self::new(self.matrix.kron(&other.matrix))
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    fn check_shape(&self, input: &GptSystem, output: &GptSystem) -> Result<()> {
        if self.in_dim() != input.dim() {
            return Err(GptError::DimensionMismatch {
                expected: input.dim(),
                found: self.in_dim(),
            });
        }
        if self.out_dim() != output.dim() {
            return Err(GptError::DimensionMismatch {
                expected: output.dim(),
                found: self.out_dim(),
            });
        }
        Ok(())
    }

    /// Maps every input state generator into the output state cone.
    pub fn is_positive(&self, input: &GptSystem, output: &GptSystem) -> Result<bool> {
        self.check_shape(input, output)?;
        for g in input.states() {
            if !output.in_state_cone(&self.apply_vector(g))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `u_out C = u_in`.
    pub fn is_deterministic(&self, input: &GptSystem, output: &GptSystem) -> Result<bool> {
        self.check_shape(input, output)?;
        Ok(&self.pull_back(output.unit()) == input.unit())
    }
}

/// A collection of transformations whose coarse-graining is a channel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GptTest {
    branches: Vec<ChannelMatrix>,
}

impl GptTest {
    pub fn new(
        input: &GptSystem,
        output: &GptSystem,
        branches: Vec<ChannelMatrix>,
    ) -> Result<Self> {
        if branches.is_empty() {
            return Err(GptError::Empty("test"));
        }
        for (i, b) in branches.iter().enumerate() {
            if !b.is_positive(input, output)? {
                return Err(GptError::NotPositive(i));
            }
        }
        let test = Self { branches };
        if !test.coarse_grained().is_deterministic(input, output)? {
            return Err(GptError::NotDeterministic);
        }
        Ok(test)
    }

    /// For branches known to be positive and to sum to a channel.
    pub(crate) fn from_branches_unchecked(branches: Vec<ChannelMatrix>) -> Self {
        Self { branches }
    }

    pub fn branches(&self) -> &[ChannelMatrix] {
        &self.branches
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// Sum of all branches.
    pub fn coarse_grained(&self) -> ChannelMatrix {
        let first = &self.branches[0];
        self.branches[1..]
            .iter()
            .fold(first.clone(), |acc, b| acc.add(b))
    }
}

/// Lump branches together: output branch `j` is the sum over `partition[j]`.
pub fn coarse_grain(test: &GptTest, partition: &[Vec<usize>]) -> Result<GptTest> {
    let n = test.len();
    let mut seen = vec![false; n];
    for block in partition {
        if block.is_empty() {
            return Err(GptError::BadPartition("empty block".into()));
        }
        for &i in block {
            if i >= n {
                return Err(GptError::BadPartition(format!(
                    "index {i} out of range ({n} branches)"
                )));
            }
            if seen[i] {
                return Err(GptError::BadPartition(format!("index {i} appears twice")));
            }
            seen[i] = true;
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(GptError::BadPartition(format!(
            "index {missing} not covered"
        )));
    }
    let branches = partition
        .iter()
        .map(|block| {
            block[1..]
                .iter()
                .fold(test.branches[block[0]].clone(), |acc, &i| {
                    acc.add(&test.branches[i])
                })
        })
        .collect();
    Ok(GptTest::from_branches_unchecked(branches))
}

/// The test with branches `|rho_i)(a_i|`.
pub fn measure_and_prepare(
    input: &GptSystem,
    output: &GptSystem,
    measurement: &Measurement,
    prepared: &[GptState],
) -> Result<GptTest> {
    if measurement.len() != prepared.len() {
        return Err(GptError::LengthMismatch {
            what: "effects vs prepared states",
            left: measurement.len(),
            right: prepared.len(),
        });
    }
    for e in measurement.effects() {
        input.check_dim(e)?;
    }
    measurement.check_sums_to(input.unit())?;
    for rho in prepared {
        output.check_dim(rho.vector())?;
        if !rho.is_normalized() {
            return Err(GptError::BadNorm(format_rational(rho.norm())));
        }
    }
    let branches = prepared
        .iter()
        .zip(measurement.effects())
        .map(|(rho, a)| ChannelMatrix::measure_prepare(rho.vector(), a))
        .collect();
    Ok(GptTest::from_branches_unchecked(branches))
}

/// Sequential composition of a preparation with a transformation.
pub fn apply(channel: &ChannelMatrix, state: &GptState, output: &GptSystem) -> Result<GptState> {
    if channel.in_dim() != state.vector().dim() {
        return Err(GptError::DimensionMismatch {
            expected: channel.in_dim(),
            found: state.vector().dim(),
        });
    }
    if channel.out_dim() != output.dim() {
        return Err(GptError::DimensionMismatch {
            expected: output.dim(),
            found: channel.out_dim(),
        });
    }
    let v = channel.apply_vector(state.vector());
    let norm = output.unit().dot(&v);
    Ok(GptState::from_parts(v, norm))
}

/// Equal statistics on every effect generator (hence on every effect).
pub fn tomographically_equal_states(
    sys: &GptSystem,
    rho: &RationalVector,
    sigma: &RationalVector,
) -> Result<bool> {
    sys.check_dim(rho)?;
    sys.check_dim(sigma)?;
    Ok(sys.effects().iter().all(|e| e.dot(rho) == e.dot(sigma)))
}
