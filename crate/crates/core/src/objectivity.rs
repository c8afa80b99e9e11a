//! Sharply repeatable measurements, spectrum broadcast structure (SBS), and
//! the objectivity game.
//!
//! Joint systems are composites `S (x) E_1 (x) ... (x) E_n` with the system
//! `S` as factor 0 and one fragment per remaining factor.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::classicality::{distinguishing_measurement, ClassicalSet};
use crate::composition::{kron_all, min_tensor_many, partial_contract, CompositeSystem};
use crate::error::{GptError, Result};
use crate::exactmath::{format_rational, rat, Rational, RationalMatrix, RationalVector};
use crate::gpt::{measure_and_prepare, ChannelMatrix, GptState, GptSystem, GptTest, Measurement};

/// `P_i P_j = delta_ij P_i` for every ordered pair of branches.
pub fn is_srm(test: &GptTest) -> bool {
    let b = test.branches();
    let dim = b[0].in_dim();
    if b.iter().any(|p| p.in_dim() != dim || p.out_dim() != dim) {
        return false;
    }
    b.iter().enumerate().all(|(i, p)| {
        b.iter().enumerate().all(|(j, q)| {
            let prod = p.after(q);
            if i == j {
                prod == *p
            } else {
                prod.is_zero()
            }
        })
    })
}

/// A test on one system whose branches are orthogonal idempotents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SrmTest {
    test: GptTest,
}

impl SrmTest {
    pub fn new(sys: &GptSystem, branches: Vec<ChannelMatrix>) -> Result<Self> {
        Self::from_test(GptTest::new(sys, sys, branches)?)
    }

    pub fn from_test(test: GptTest) -> Result<Self> {
        if !is_srm(&test) {
            return Err(GptError::NotSharplyRepeatable);
        }
        Ok(Self { test })
    }

    /// Branches `|rho_i)(a_i|` for a measurement distinguishing the `rho_i`.
    pub fn measure_prepare(
        sys: &GptSystem,
        measurement: &Measurement,
        prepared: &[GptState],
    ) -> Result<Self> {
        Self::from_test(measure_and_prepare(sys, sys, measurement, prepared)?)
    }

    pub fn test(&self) -> &GptTest {
        &self.test
    }

    pub fn branches(&self) -> &[ChannelMatrix] {
        self.test.branches()
    }

    pub fn len(&self) -> usize {
        self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.test.is_empty()
    }
}

/// The measure-and-prepare test of a classical set, the referee's move.
pub fn referee_test(sys: &GptSystem, cs: &ClassicalSet) -> Result<SrmTest> {
    let prepared = cs
        .pure_states()
        .iter()
        .map(|&i| sys.pure_state(i))
        .collect::<Result<Vec<_>>>()?;
    SrmTest::measure_prepare(sys, cs.measurement(), &prepared)
}

/// Branches `P_i (x) Q_j`, A-major.
pub fn srm_product(p: &SrmTest, q: &SrmTest) -> SrmTest {
    let branches = p
        .branches()
        .iter()
        .flat_map(|a| q.branches().iter().map(move |b| a.kron(b)))
        .collect();
    let test = GptTest::from_branches_unchecked(branches);
    debug_assert!(is_srm(&test));
    SrmTest { test }
}

/// The renormalized nonvanishing branch outputs of an SRM on a state, and a
/// measurement distinguishing them when there is more than one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SrmLemma {
    pub branch_indices: Vec<usize>,
    pub states: Vec<GptState>,
    pub measurement: Option<Measurement>,
}

/// Build `a_i = u P_i` on the nonvanishing branches, folding the vanishing
/// ones into the first nonvanishing index, and verify `delta_ij` on the
/// renormalized outputs.
pub fn srm_distinguishability_lemma(
    sys: &GptSystem,
    srm: &SrmTest,
    rho: &GptState,
) -> Result<SrmLemma> {
    sys.check_dim(rho.vector())?;
    if !rho.is_normalized() {
        return Err(GptError::BadNorm(format_rational(rho.norm())));
    }
    let outputs: Vec<RationalVector> = srm
        .branches()
        .iter()
        .map(|p| p.apply_vector(rho.vector()))
        .collect();
    let live: Vec<usize> = (0..outputs.len())
        .filter(|&i| !outputs[i].is_zero())
        .collect();
    let mut states = Vec::with_capacity(live.len());
    for &i in &live {
        let norm = sys.unit().dot(&outputs[i]);
        if !norm.is_positive() {
            return Err(GptError::BadNorm(format_rational(&norm)));
        }
        states.push(GptState::from_parts(
            outputs[i].scale(&norm.recip()),
            Rational::one(),
        ));
    }
    let Some(&first) = live.first() else {
        return Err(GptError::AxiomFailure(
            "every branch annihilates a normalized state".into(),
        ));
    };
    if live.len() == 1 {
        return Ok(SrmLemma {
            branch_indices: live,
            states,
            measurement: None,
        });
    }
    let pulled: Vec<RationalVector> = srm
        .branches()
        .iter()
        .map(|p| p.pull_back(sys.unit()))
        .collect();
    let residual = (0..pulled.len())
        .filter(|i| !live.contains(i))
        .fold(RationalVector::zeros(sys.dim()), |acc, i| &acc + &pulled[i]);
    let effects: Vec<RationalVector> = live
        .iter()
        .map(|&i| {
            if i == first {
                &pulled[i] + &residual
            } else {
                pulled[i].clone()
            }
        })
        .collect();
    let measurement = Measurement::from_effects_unchecked(effects);
    measurement.check_sums_to(sys.unit())?;
    let vectors: Vec<RationalVector> = states.iter().map(|s| s.vector().clone()).collect();
    if !measurement.distinguishes(&vectors) {
        return Err(GptError::NotDistinguishable(
            "branch outputs of a sharply repeatable test".into(),
        ));
    }
    Ok(SrmLemma {
        branch_indices: live,
        states,
        measurement: Some(measurement),
    })
}

/// A decomposition `sum_i p_i alpha_i (x) rho_{i,1} (x) ... (x) rho_{i,n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SbsWitness {
    pub probs: Vec<Rational>,
    /// Positions within the classical set on the system.
    pub pointers: Vec<usize>,
    /// `fragment_states[i][k]` is the conditional state of fragment `k`.
    pub fragment_states: Vec<Vec<GptState>>,
    /// One distinguishing measurement per fragment; `None` when there is a
    /// single branch.
    pub fragment_measurements: Vec<Option<Measurement>>,
}

impl SbsWitness {
    pub fn branches(&self) -> usize {
        self.probs.len()
    }

    pub fn fragments(&self) -> usize {
        self.fragment_measurements.len()
    }

    /// The joint state the decomposition describes.
    pub fn state(&self, composite: &CompositeSystem, cs: &ClassicalSet) -> RationalVector {
        let sys_s = &composite.factors()[0];
        let mut total = RationalVector::zeros(composite.system().dim());
        for (b, p) in self.probs.iter().enumerate() {
            let alpha = &sys_s.states()[cs.pure_states()[self.pointers[b]]];
            let mut parts = vec![alpha];
            parts.extend(self.fragment_states[b].iter().map(GptState::vector));
            total = &total + &kron_all(&parts).scale(p);
        }
        total
    }
}

fn check_joint(composite: &CompositeSystem) -> Result<usize> {
    let n = composite.factors().len();
    if n < 2 {
        return Err(GptError::Shape(
            "a joint system needs the system and at least one fragment".into(),
        ));
    }
    Ok(n - 1)
}

/// The ingredients of an SBS state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SbsSpec {
    pub probs: Vec<Rational>,
    /// Positions within the classical set; distinct.
    pub pointers: Vec<usize>,
    /// `fragment_states[i][k]`, normalized states on fragment `k`.
    pub fragment_states: Vec<Vec<RationalVector>>,
    /// Per fragment; `None` asks for one to be found when there is more than
    /// one branch.
    pub fragment_measurements: Vec<Option<Measurement>>,
}

/// Assemble an SBS state and its witness, checking every ingredient.
pub fn build_sbs(
    composite: &CompositeSystem,
    cs: &ClassicalSet,
    spec: &SbsSpec,
) -> Result<(GptState, SbsWitness)> {
    let n = check_joint(composite)?;
    let r = spec.probs.len();
    if r == 0 {
        return Err(GptError::Empty("SBS branch list"));
    }
    if spec.pointers.len() != r || spec.fragment_states.len() != r {
        return Err(GptError::LengthMismatch {
            what: "pointers and fragment states per branch",
            left: spec.pointers.len().min(spec.fragment_states.len()),
            right: r,
        });
    }
    if spec.fragment_measurements.len() != n {
        return Err(GptError::LengthMismatch {
            what: "one measurement slot per fragment",
            left: spec.fragment_measurements.len(),
            right: n,
        });
    }
    if let Some(p) = spec.probs.iter().find(|p| !p.is_positive()) {
        return Err(GptError::BadProbabilities(format!(
            "probability {} is not positive",
            format_rational(p)
        )));
    }
    let total: Rational = spec.probs.iter().sum();
    if !total.is_one() {
        return Err(GptError::BadProbabilities(format!(
            "probabilities sum to {}",
            format_rational(&total)
        )));
    }
    let distinct: BTreeSet<usize> = spec.pointers.iter().copied().collect();
    if distinct.len() != r {
        return Err(GptError::BadProbabilities("pointer states repeat".into()));
    }
    if let Some(&bad) = spec.pointers.iter().find(|&&p| p >= cs.len()) {
        return Err(GptError::IndexOutOfRange {
            index: bad,
            len: cs.len(),
        });
    }
    let mut fragment_states = Vec::with_capacity(r);
    for row in &spec.fragment_states {
        if row.len() != n {
            return Err(GptError::LengthMismatch {
                what: "one state per fragment",
                left: row.len(),
                right: n,
            });
        }
        let mut states = Vec::with_capacity(n);
        for (k, v) in row.iter().enumerate() {
            let s = GptState::new(&composite.factors()[k + 1], v.clone())?;
            if !s.is_normalized() {
                return Err(GptError::BadNorm(format_rational(s.norm())));
            }
            states.push(s);
        }
        fragment_states.push(states);
    }
    let mut fragment_measurements = Vec::with_capacity(n);
    for k in 0..n {
        let fragment = &composite.factors()[k + 1];
        let column: Vec<RationalVector> = spec
            .fragment_states
            .iter()
            .map(|row| row[k].clone())
            .collect();
        if r == 1 {
            fragment_measurements.push(None);
            continue;
        }
        let m = match &spec.fragment_measurements[k] {
            Some(m) => {
                let m = Measurement::new(fragment, m.effects().to_vec())?;
                if !m.distinguishes(&column) {
                    return Err(GptError::NotDistinguishable(format!(
                        "fragment {} conditional states fail the delta_ij check",
                        k + 1
                    )));
                }
                m
            }
            None => distinguishing_measurement(fragment, &column)?.ok_or_else(|| {
                GptError::NotDistinguishable(format!("fragment {} conditional states", k + 1))
            })?,
        };
        fragment_measurements.push(Some(m));
    }
    let witness = SbsWitness {
        probs: spec.probs.clone(),
        pointers: spec.pointers.clone(),
        fragment_states,
        fragment_measurements,
    };
    let state = witness.state(composite, cs);
    debug_assert!(composite.system().unit().dot(&state).is_one());
    Ok((GptState::from_parts(state, Rational::one()), witness))
}

/// The step of SBS detection that failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SbsStep {
    PointerProbabilities = 1,
    Conditionals = 2,
    Reconstruction = 3,
    Factorization = 4,
    Distinguishability = 5,
}

impl SbsStep {
    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::PointerProbabilities => "pointer-probabilities",
            Self::Conditionals => "conditional-states",
            Self::Reconstruction => "reconstruction",
            Self::Factorization => "fragment-factorization",
            Self::Distinguishability => "fragment-distinguishability",
        }
    }
}

impl fmt::Display for SbsStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {} ({})", self.number(), self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SbsVerdict {
    Witness(SbsWitness),
    No { step: SbsStep, reason: String },
}

impl SbsVerdict {
    pub fn is_sbs(&self) -> bool {
        matches!(self, Self::Witness(_))
    }

    pub fn witness(&self) -> Option<&SbsWitness> {
        match self {
            Self::Witness(w) => Some(w),
            Self::No { .. } => None,
        }
    }

    pub fn failed_step(&self) -> Option<SbsStep> {
        match self {
            Self::Witness(_) => None,
            Self::No { step, .. } => Some(*step),
        }
    }
}

fn environment(composite: &CompositeSystem) -> Result<CompositeSystem> {
    min_tensor_many(&composite.factors()[1..])
}

/// Decide whether `rho` has spectrum broadcast structure with pointer
/// states in `cs`, returning the decomposition or the first failing step.
pub fn is_sbs(
    composite: &CompositeSystem,
    rho: &GptState,
    cs: &ClassicalSet,
) -> Result<SbsVerdict> {
    let n = check_joint(composite)?;
    let sys_s = &composite.factors()[0];
    composite.system().check_dim(rho.vector())?;
    if !rho.is_normalized() {
        return Err(GptError::BadNorm(format_rational(rho.norm())));
    }
    let env = environment(composite)?;
    let env_unit = env.system().unit();
    let no = |step, reason: String| Ok(SbsVerdict::No { step, reason });

    // 1. pointer probabilities
    let mut probs = Vec::new();
    let mut pointers = Vec::new();
    for (pos, a) in cs.measurement().effects().iter().enumerate() {
        let p = a.kron(env_unit).dot(rho.vector());
        if p.is_negative() {
            return no(
                SbsStep::PointerProbabilities,
                format!("outcome {pos} has probability {}", format_rational(&p)),
            );
        }
        if p.is_positive() {
            probs.push(p);
            pointers.push(pos);
        }
    }

    // 2. conditional environment states
    let mut conditionals = Vec::with_capacity(pointers.len());
    for (&pos, p) in pointers.iter().zip(&probs) {
        let a = &cs.measurement().effects()[pos];
        let mut slots: Vec<Option<&RationalVector>> = vec![None; n + 1];
        slots[0] = Some(a);
        let sigma = partial_contract(composite, rho.vector(), &slots)?.scale(&p.recip());
        if !env.system().in_state_cone(&sigma)? {
            return no(
                SbsStep::Conditionals,
                format!("conditional state for outcome {pos} is not a state"),
            );
        }
        conditionals.push(sigma);
    }

    // 3. reconstruction
    let rebuilt = pointers.iter().zip(&probs).zip(&conditionals).fold(
        RationalVector::zeros(composite.system().dim()),
        |acc, ((&pos, p), sigma)| {
            let alpha = &sys_s.states()[cs.pure_states()[pos]];
            &acc + &alpha.kron(sigma).scale(p)
        },
    );
    if &rebuilt != rho.vector() {
        return no(
            SbsStep::Reconstruction,
            "state has coherences outside the pointer decomposition".into(),
        );
    }

    // 4. every conditional is the product of its fragment marginals
    let mut fragment_states = Vec::with_capacity(pointers.len());
    for (b, sigma) in conditionals.iter().enumerate() {
        let marginals = (0..n)
            .map(|k| crate::composition::marginal(&env, sigma, &[k]))
            .collect::<Result<Vec<_>>>()?;
        let product = kron_all(&marginals.iter().map(GptState::vector).collect::<Vec<_>>());
        if &product != sigma {
            return no(
                SbsStep::Factorization,
                format!(
                    "conditional state for outcome {} is correlated across fragments",
                    pointers[b]
                ),
            );
        }
        fragment_states.push(marginals);
    }

    // 5. per-fragment distinguishability
    let mut fragment_measurements = Vec::with_capacity(n);
    for k in 0..n {
        if pointers.len() == 1 {
            fragment_measurements.push(None);
            continue;
        }
        let column: Vec<RationalVector> = fragment_states
            .iter()
            .map(|row: &Vec<GptState>| row[k].vector().clone())
            .collect();
        match distinguishing_measurement(&composite.factors()[k + 1], &column)? {
            Some(m) => fragment_measurements.push(Some(m)),
            None => {
                return no(
                    SbsStep::Distinguishability,
                    format!(
                        "fragment {} conditional states are not distinguishable",
                        k + 1
                    ),
                )
            }
        }
    }

    Ok(SbsVerdict::Witness(SbsWitness {
        probs,
        pointers,
        fragment_states,
        fragment_measurements,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointEntry {
    /// Referee outcome first, then one outcome per player.
    pub outcomes: Vec<usize>,
    pub probability: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameOutcome {
    /// Every outcome tuple in lexicographic order, zeros included.
    pub joint_probs: Vec<JointEntry>,
    pub agreement: bool,
    pub non_disturbing: bool,
    pub win: bool,
}

fn check_referee(sys_s: &GptSystem, cs: &ClassicalSet, referee: &SrmTest) -> Result<()> {
    if !cs.maximal() {
        return Err(GptError::RefereeForm(
            "the classical set is not maximal".into(),
        ));
    }
    let expected = referee_test(sys_s, cs)?;
    if referee.branches() != expected.branches() {
        return Err(GptError::RefereeForm(
            "branches differ from |alpha_i)(a_i|".into(),
        ));
    }
    Ok(())
}

fn check_players(composite: &CompositeSystem, players: &[SrmTest], r: usize) -> Result<()> {
    let n = check_joint(composite)?;
    if players.len() != n {
        return Err(GptError::LengthMismatch {
            what: "one player per fragment",
            left: players.len(),
            right: n,
        });
    }
    for (k, p) in players.iter().enumerate() {
        let fragment = &composite.factors()[k + 1];
        if p.len() != r {
            return Err(GptError::LengthMismatch {
                what: "player outcomes vs referee outcomes",
                left: p.len(),
                right: r,
            });
        }
        if p.branches()[0].in_dim() != fragment.dim() {
            return Err(GptError::DimensionMismatch {
                expected: fragment.dim(),
                found: p.branches()[0].in_dim(),
            });
        }
    }
    Ok(())
}

/// `T = sum_i R_i (x) P_{i,1} (x) ... (x) P_{i,n}`.
pub fn diagonal_game_channel(referee: &SrmTest, players: &[SrmTest]) -> ChannelMatrix {
    (0..referee.len())
        .map(|i| {
            players
                .iter()
                .fold(referee.branches()[i].clone(), |acc, p| {
                    acc.kron(&p.branches()[i])
                })
        })
        .reduce(|a, b| a.add(&b))
        .expect("referee has branches")
}

/// Evaluate the game exactly: the full outcome table, agreement (every
/// off-diagonal entry is 0) and non-disturbance (`T rho = rho`).
pub fn play_game(
    composite: &CompositeSystem,
    rho: &GptState,
    cs: &ClassicalSet,
    referee: &SrmTest,
    players: &[SrmTest],
) -> Result<GameOutcome> {
    let sys_s = &composite.factors()[0];
    composite.system().check_dim(rho.vector())?;
    check_referee(sys_s, cs, referee)?;
    let r = referee.len();
    check_players(composite, players, r)?;

    let mut factor_effects: Vec<Vec<RationalVector>> = vec![referee
        .branches()
        .iter()
        .map(|b| b.pull_back(sys_s.unit()))
        .collect()];
    for (k, p) in players.iter().enumerate() {
        let u = composite.factors()[k + 1].unit();
        factor_effects.push(p.branches().iter().map(|b| b.pull_back(u)).collect());
    }
    let slots = factor_effects.len();
    let total = r.pow(slots as u32);
    let mut joint_probs = Vec::with_capacity(total);
    for flat in 0..total {
        let mut outcomes = vec![0; slots];
        let mut rest = flat;
        for slot in outcomes.iter_mut().rev() {
            *slot = rest % r;
            rest /= r;
        }
        let parts: Vec<&RationalVector> = outcomes
            .iter()
            .enumerate()
            .map(|(k, &j)| &factor_effects[k][j])
            .collect();
        let probability = kron_all(&parts).dot(rho.vector());
        joint_probs.push(JointEntry {
            outcomes,
            probability,
        });
    }
    let sum: Rational = joint_probs.iter().map(|e| &e.probability).sum();
    if &sum != rho.norm() {
        return Err(GptError::BadProbabilities(format!(
            "joint table sums to {}",
            format_rational(&sum)
        )));
    }
    let agreement = joint_probs
        .iter()
        .filter(|e| e.outcomes.iter().any(|&j| j != e.outcomes[0]))
        .all(|e| e.probability.is_zero());
    let channel = diagonal_game_channel(referee, players);
    let non_disturbing = &channel.apply_vector(rho.vector()) == rho.vector();
    Ok(GameOutcome {
        joint_probs,
        agreement,
        non_disturbing,
        win: agreement && non_disturbing,
    })
}

/// One measure-and-prepare SRM per fragment, branch `i` preparing the
/// conditional state of pointer `i`. Pointers that never occur get a zero
/// branch.
pub fn synthesize_winning_strategy(
    composite: &CompositeSystem,
    rho: &GptState,
    cs: &ClassicalSet,
) -> Result<Option<Vec<SrmTest>>> {
    let SbsVerdict::Witness(w) = is_sbs(composite, rho, cs)? else {
        return Ok(None);
    };
    let mut players = Vec::with_capacity(w.fragments());
    for k in 0..w.fragments() {
        let fragment = &composite.factors()[k + 1];
        let effects: Vec<RationalVector> = match &w.fragment_measurements[k] {
            Some(m) => m.effects().to_vec(),
            None => vec![fragment.unit().clone()],
        };
        let mut branches = vec![ChannelMatrix::zero(fragment.dim(), fragment.dim()); cs.len()];
        for (b, &pos) in w.pointers.iter().enumerate() {
            branches[pos] =
                ChannelMatrix::measure_prepare(w.fragment_states[b][k].vector(), &effects[b]);
        }
        players.push(SrmTest::new(fragment, branches)?);
    }
    Ok(Some(players))
}

/// Every measure-and-prepare SRM on `fragment` with `slots` branches that
/// prepares the members of a distinguishable set of pure states (or a single
/// pure state with the unit effect) on distinct branches, all other branches
/// being zero.
pub fn canonical_strategy_family(fragment: &GptSystem, slots: usize) -> Result<Vec<SrmTest>> {
    let g = fragment.num_states();
    let mut family = Vec::new();
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    for mask in 1u64..(1u64 << g) {
        let s: Vec<usize> = (0..g).filter(|i| mask & (1 << i) != 0).collect();
        if s.len() <= slots {
            subsets.push(s);
        }
    }
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    for subset in subsets {
        let vectors: Vec<RationalVector> = subset
            .iter()
            .map(|&i| fragment.states()[i].clone())
            .collect();
        let Some(m) = distinguishing_measurement(fragment, &vectors)? else {
            continue;
        };
        for labels in injections(subset.len(), slots) {
            let mut branches = vec![ChannelMatrix::zero(fragment.dim(), fragment.dim()); slots];
            for (member, &label) in labels.iter().enumerate() {
                branches[label] =
                    ChannelMatrix::measure_prepare(&vectors[member], &m.effects()[member]);
            }
            family.push(SrmTest::new(fragment, branches)?);
        }
    }
    Ok(family)
}

/// All injective maps `0..k -> 0..n`, lexicographic.
fn injections(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(k: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in 0..n {
            if !cur.contains(&j) {
                cur.push(j);
                rec(k, n, cur, out);
                cur.pop();
            }
        }
    }
    rec(k, n, &mut cur, &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyScan {
    pub strategies_tried: usize,
    pub wins: usize,
    /// Strategy indices per player for the first win, if any.
    pub first_win: Option<Vec<usize>>,
}

/// Play every combination of canonical strategies, one per fragment.
pub fn scan_canonical_strategies(
    composite: &CompositeSystem,
    rho: &GptState,
    cs: &ClassicalSet,
) -> Result<StrategyScan> {
    let n = check_joint(composite)?;
    let referee = referee_test(&composite.factors()[0], cs)?;
    let families = (0..n)
        .map(|k| canonical_strategy_family(&composite.factors()[k + 1], cs.len()))
        .collect::<Result<Vec<_>>>()?;
    let total: usize = families.iter().map(Vec::len).product();
    let results: Vec<bool> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let choice = split(flat, &families);
            let players: Vec<SrmTest> = choice
                .iter()
                .enumerate()
                .map(|(k, &c)| families[k][c].clone())
                .collect();
            play_game(composite, rho, cs, &referee, &players).map(|o| o.win)
        })
        .collect::<Result<_>>()?;
    let first_win = results
        .iter()
        .position(|&w| w)
        .map(|flat| split(flat, &families));
    Ok(StrategyScan {
        strategies_tried: total,
        wins: results.iter().filter(|&&w| w).count(),
        first_win,
    })
}

fn split(mut flat: usize, families: &[Vec<SrmTest>]) -> Vec<usize> {
    let mut choice = vec![0; families.len()];
    for (slot, f) in choice.iter_mut().zip(families).rev() {
        *slot = flat % f.len();
        flat /= f.len();
    }
    choice
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPointReport {
    pub kernel_dim: usize,
    pub candidates_examined: usize,
    /// Normalized fixed states found in the state cone, sorted.
    pub fixed_states: Vec<RationalVector>,
    /// Indices into `fixed_states` that fail SBS detection.
    pub failures: Vec<usize>,
}

impl FixedPointReport {
    pub fn all_sbs(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Largest denominator in the sampling schedule for convex weights.
pub const SAMPLE_DENOMINATOR: usize = 4;

/// Fixed states of the diagonal game channel and their SBS status.
///
/// The fixed space is `ker(T - I)`. Each state generator is projected
/// orthogonally onto it and normalized; the candidates are all convex
/// combinations of those projections with weights `k/q`, `q <= 4`, and only
/// the ones inside the state cone are kept.
pub fn fixed_point_sbs_check(
    composite: &CompositeSystem,
    cs: &ClassicalSet,
    players: &[SrmTest],
) -> Result<FixedPointReport> {
    let sys = composite.system();
    let referee = referee_test(&composite.factors()[0], cs)?;
    check_players(composite, players, referee.len())?;
    let t = diagonal_game_channel(&referee, players);
    let shifted = t.matrix().sub(&RationalMatrix::identity(sys.dim()));
    let kernel = shifted.kernel_basis();
    if kernel.is_empty() {
        return Ok(FixedPointReport {
            kernel_dim: 0,
            candidates_examined: 0,
            fixed_states: Vec::new(),
            failures: Vec::new(),
        });
    }
    let k = RationalMatrix::from_rows(&kernel)?.transpose();
    let gram = k.transpose().mul(&k);
    let projector = k
        .mul(&gram.inverse().expect("kernel basis is independent"))
        .mul(&k.transpose());

    let mut points: BTreeSet<RationalVector> = BTreeSet::new();
    for g in sys.states() {
        let x = projector.mul_vec(g);
        let norm = sys.unit().dot(&x);
        if norm.is_positive() {
            points.insert(x.scale(&norm.recip()));
        }
    }
    let points: Vec<RationalVector> = points.into_iter().collect();
    let mut candidates: BTreeSet<RationalVector> = BTreeSet::new();
    for q in 1..=SAMPLE_DENOMINATOR {
        for weights in compositions(q, points.len()) {
            let v = points
                .iter()
                .zip(&weights)
                .filter(|(_, &w)| w > 0)
                .fold(RationalVector::zeros(sys.dim()), |acc, (p, &w)| {
                    &acc + &p.scale(&rat(w as i64, q as i64))
                });
            candidates.insert(v);
        }
    }
    let candidates: Vec<RationalVector> = candidates.into_iter().collect();
    let kept: Vec<Option<RationalVector>> = candidates
        .par_iter()
        .map(|v| {
            Ok(if sys.in_state_cone(v)? && &t.apply_vector(v) == v {
                Some(v.clone())
            } else {
                None
            })
        })
        .collect::<Result<_>>()?;
    let fixed_states: Vec<RationalVector> = kept.into_iter().flatten().collect();
    let verdicts: Vec<bool> = fixed_states
        .par_iter()
        .map(|v| {
            let rho = GptState::from_parts(v.clone(), Rational::one());
            is_sbs(composite, &rho, cs).map(|s| s.is_sbs())
        })
        .collect::<Result<_>>()?;
    let failures = verdicts
        .iter()
        .enumerate()
        .filter(|(_, &ok)| !ok)
        .map(|(i, _)| i)
        .collect();
    Ok(FixedPointReport {
        kernel_dim: kernel.len(),
        candidates_examined: candidates.len(),
        fixed_states,
        failures,
    })
}

/// All ways to write `total` as an ordered sum of `parts` nonnegative
/// integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; parts];
    fn rec(i: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[i] = v;
            rec(i + 1, left - v, cur, out);
        }
    }
    if parts > 0 {
        rec(0, total, &mut cur, &mut out);
    }
    out
}
