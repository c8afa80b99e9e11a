//! Distinguishability, maximal and classical sets, the classical effect
//! quotient, and the classical-theory check.
//!
//! Every distinguishability question is one exact feasibility problem: find
//! effects `a_i = sum_k l_ik e_k` with `l_ik >= 0`, `sum_i a_i = u` and
//! `(a_i | rho_j) = delta_ij`. Each `a_i` is then a valid effect because its
//! complement is the sum of the others.

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{GptError, Result};
use crate::exactmath::{
    rank_of, solve_feasibility, Feasibility, LinearConstraint, Rational, RationalVector,
};
use crate::gpt::{GptState, GptSystem, Measurement};
use crate::zoo;

/// Largest generator count for which exhaustive subset searches are allowed.
pub const EXHAUSTIVE_LIMIT: usize = 12;

/// A maximal-or-not set of jointly distinguishable pure states together
/// with the measurement that distinguishes them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalSet {
    pure_states: Vec<usize>,
    measurement: Measurement,
    maximal: bool,
}

impl ClassicalSet {
    /// Wrap an explicit measurement, checking `delta_ij` exactly. The
    /// maximal flag is taken on trust.
    pub fn with_measurement(
        sys: &GptSystem,
        pure_states: Vec<usize>,
        measurement: Measurement,
        maximal: bool,
    ) -> Result<Self> {
        let vectors = gather(sys, &pure_states)?;
        measurement.check_sums_to(sys.unit())?;
        if !measurement.distinguishes(&vectors) {
            return Err(GptError::NotDistinguishable(
                "measurement fails the delta_ij check".into(),
            ));
        }
        Ok(Self {
            pure_states,
            measurement,
            maximal,
        })
    }

    /// Decide distinguishability of the listed generators and their
    /// maximality. `None` when they are not distinguishable.
    pub fn from_indices(sys: &GptSystem, pure_states: &[usize]) -> Result<Option<Self>> {
        let vectors = gather(sys, pure_states)?;
        let Some(measurement) = distinguishing_measurement(sys, &vectors)? else {
            return Ok(None);
        };
        let mut cs = Self {
            pure_states: pure_states.to_vec(),
            measurement,
            maximal: false,
        };
        cs.maximal = is_maximal(sys, &cs)?;
        Ok(Some(cs))
    }

    pub fn pure_states(&self) -> &[usize] {
        &self.pure_states
    }

    pub fn measurement(&self) -> &Measurement {
        &self.measurement
    }

    pub fn maximal(&self) -> bool {
        self.maximal
    }

    pub fn len(&self) -> usize {
        self.pure_states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pure_states.is_empty()
    }

    pub fn vectors(&self, sys: &GptSystem) -> Vec<RationalVector> {
        self.pure_states
            .iter()
            .map(|&i| sys.states()[i].clone())
            .collect()
    }
}

fn gather(sys: &GptSystem, indices: &[usize]) -> Result<Vec<RationalVector>> {
    indices.iter().map(|&i| sys.state(i).cloned()).collect()
}

/// The distinguishability feasibility problem for a list of states:
/// variables `l_ik` for effect `i` and nonzero effect generator `k`.
pub(crate) struct DistinguishingLp {
    gens: Vec<RationalVector>,
    n: usize,
    dim: usize,
    pub(crate) constraints: Vec<LinearConstraint>,
}

impl DistinguishingLp {
    pub(crate) fn new(sys: &GptSystem, states: &[RationalVector]) -> Result<Self> {
        for s in states {
            sys.check_dim(s)?;
        }
        let n = states.len();
        if n == 0 {
            return Err(GptError::Empty("state list"));
        }
        let gens: Vec<RationalVector> = sys
            .effects()
            .iter()
            .filter(|e| !e.is_zero())
            .cloned()
            .collect();
        let k = gens.len();
        let num_vars = n * k;
        let mut constraints = Vec::with_capacity(sys.dim() + n * n);
        for c in 0..sys.dim() {
            let mut coeffs = vec![Rational::zero(); num_vars];
            for i in 0..n {
                for (j, g) in gens.iter().enumerate() {
                    coeffs[i * k + j] = g[c].clone();
                }
            }
            constraints.push(LinearConstraint::new(coeffs, sys.unit()[c].clone()));
        }
        let pairings: Vec<Vec<Rational>> = states
            .iter()
            .map(|s| gens.iter().map(|g| g.dot(s)).collect())
            .collect();
        for i in 0..n {
            for (j, pairing) in pairings.iter().enumerate() {
                let mut coeffs = vec![Rational::zero(); num_vars];
                coeffs[i * k..(i + 1) * k].clone_from_slice(pairing);
                let rhs = if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                };
                constraints.push(LinearConstraint::new(coeffs, rhs));
            }
        }
        Ok(Self {
            gens,
            n,
            dim: sys.dim(),
            constraints,
        })
    }

    pub(crate) fn num_vars(&self) -> usize {
        self.n * self.gens.len()
    }

    /// Objective picking out coordinate `c` of effect `i`.
    pub(crate) fn coordinate_objective(
        &self,
        i: usize,
        c: usize,
        sign: &Rational,
    ) -> Vec<Rational> {
        let k = self.gens.len();
        let mut obj = vec![Rational::zero(); self.num_vars()];
        for (j, g) in self.gens.iter().enumerate() {
            obj[i * k + j] = &g[c] * sign;
        }
        obj
    }

    pub(crate) fn measurement(&self, x: &[Rational]) -> Measurement {
        let k = self.gens.len();
        let effects = (0..self.n)
            .map(|i| {
                self.gens
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| !x[i * k + j].is_zero())
                    .fold(RationalVector::zeros(self.dim), |acc, (j, g)| {
                        &acc + &g.scale(&x[i * k + j])
                    })
            })
            .collect();
        Measurement::from_effects_unchecked(effects)
    }
}

/// The feasibility core shared by every distinguishability question. Works
/// for any number of states, including one (answered by `{u}` when the
/// state is normalized).
pub fn distinguishing_measurement(
    sys: &GptSystem,
    states: &[RationalVector],
) -> Result<Option<Measurement>> {
    let lp = DistinguishingLp::new(sys, states)?;
    match solve_feasibility(lp.num_vars(), &lp.constraints)? {
        Feasibility::Feasible(x) => {
            let m = lp.measurement(&x);
            debug_assert!(m.distinguishes(states));
            Ok(Some(m))
        }
        Feasibility::Infeasible => Ok(None),
    }
}

/// A measurement with `(a_i | rho_j) = delta_ij`, if one exists.
pub fn is_distinguishable(sys: &GptSystem, states: &[GptState]) -> Result<Option<Measurement>> {
    if states.len() < 2 {
        return Err(GptError::LengthMismatch {
            what: "distinguishability needs at least 2 states",
            left: states.len(),
            right: 2,
        });
    }
    for s in states {
        sys.check_dim(s.vector())?;
        if !s.is_normalized() {
            return Err(GptError::BadNorm(crate::exactmath::format_rational(
                s.norm(),
            )));
        }
    }
    let vectors: Vec<RationalVector> = states.iter().map(|s| s.vector().clone()).collect();
    distinguishing_measurement(sys, &vectors)
}

/// Convenience wrapper over pure-state indices.
pub fn is_distinguishable_indices(
    sys: &GptSystem,
    indices: &[usize],
) -> Result<Option<Measurement>> {
    let states = indices
        .iter()
        .map(|&i| sys.pure_state(i))
        .collect::<Result<Vec<_>>>()?;
    is_distinguishable(sys, &states)
}

/// No state generator outside the set can be added distinguishably.
///
/// Only generators are tried: if a mixed state could be added, each of its
/// pure components scores 1 on the added effect and 0 on the others, so a
/// pure one could be added too.
pub fn is_maximal(sys: &GptSystem, cs: &ClassicalSet) -> Result<bool> {
    let base = cs.vectors(sys);
    for i in 0..sys.num_states() {
        if cs.pure_states.contains(&i) {
            continue;
        }
        let mut trial = base.clone();
        trial.push(sys.states()[i].clone());
        if distinguishing_measurement(sys, &trial)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Greedy extension in ascending generator order. Returns `None` when the
/// result has fewer than two states: a single state is not a classical set.
pub fn extend_to_maximal(sys: &GptSystem, seed: &[usize]) -> Result<Option<ClassicalSet>> {
    let mut chosen: Vec<usize> = seed.to_vec();
    let mut vectors = gather(sys, &chosen)?;
    if !vectors.is_empty() && distinguishing_measurement(sys, &vectors)?.is_none() {
        return Err(GptError::NotDistinguishable("seed".into()));
    }
    for i in 0..sys.num_states() {
        if chosen.contains(&i) {
            continue;
        }
        vectors.push(sys.states()[i].clone());
        if distinguishing_measurement(sys, &vectors)?.is_some() {
            chosen.push(i);
        } else {
            vectors.pop();
        }
    }
    if chosen.len() < 2 {
        return Ok(None);
    }
    let measurement =
        distinguishing_measurement(sys, &vectors)?.expect("greedy set stays distinguishable");
    Ok(Some(ClassicalSet {
        pure_states: chosen,
        measurement,
        maximal: true,
    }))
}

fn check_exhaustive_limit(sys: &GptSystem) -> Result<()> {
    if sys.num_states() > EXHAUSTIVE_LIMIT {
        return Err(GptError::Shape(format!(
            "exhaustive search limited to {EXHAUSTIVE_LIMIT} generators, system has {}",
            sys.num_states()
        )));
    }
    Ok(())
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Exhaustive mode: a classical set of maximum size, first in lexicographic
/// order among those.
pub fn largest_classical_set(sys: &GptSystem) -> Result<Option<ClassicalSet>> {
    check_exhaustive_limit(sys)?;
    for k in (2..=sys.num_states()).rev() {
        for subset in subsets_of_size(sys.num_states(), k) {
            if let Some(cs) = ClassicalSet::from_indices(sys, &subset)? {
                return Ok(Some(cs));
            }
        }
    }
    Ok(None)
}

/// Every maximal classical set, in lexicographic order of index lists.
pub fn all_maximal_classical_sets(sys: &GptSystem) -> Result<Vec<ClassicalSet>> {
    check_exhaustive_limit(sys)?;
    let mut candidates = Vec::new();
    for k in 2..=sys.num_states() {
        candidates.extend(subsets_of_size(sys.num_states(), k));
    }
    let found: Vec<Option<ClassicalSet>> = candidates
        .par_iter()
        .map(|s| ClassicalSet::from_indices(sys, s))
        .collect::<Result<_>>()?;
    let mut sets: Vec<ClassicalSet> = found.into_iter().flatten().filter(|c| c.maximal).collect();
    sets.sort_by(|a, b| a.pure_states.cmp(&b.pure_states));
    Ok(sets)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairVerdict {
    pub first: usize,
    pub second: usize,
    pub witness: Option<Measurement>,
}

/// Distinguishability of every unordered pair of pure states, `(i, j)` with
/// `i < j` in lexicographic order.
pub fn pair_table(sys: &GptSystem) -> Result<Vec<PairVerdict>> {
    let n = sys.num_states();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    pairs
        .par_iter()
        .map(|&(i, j)| {
            let witness = distinguishing_measurement(
                sys,
                &[sys.states()[i].clone(), sys.states()[j].clone()],
            )?;
            Ok(PairVerdict {
                first: i,
                second: j,
                witness,
            })
        })
        .collect()
}

pub fn exists_distinguishable_pair(sys: &GptSystem) -> Result<bool> {
    let n = sys.num_states();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let hits: Vec<bool> = pairs
        .par_iter()
        .map(|&(i, j)| {
            distinguishing_measurement(sys, &[sys.states()[i].clone(), sys.states()[j].clone()])
                .map(|m| m.is_some())
        })
        .collect::<Result<_>>()?;
    Ok(hits.into_iter().any(|h| h))
}

/// The representative `sum_i (xi | alpha_i) a_i` of the class of `xi`
/// under equality on the classical set.
pub fn classical_effect_quotient(
    sys: &GptSystem,
    cs: &ClassicalSet,
    xi: &RationalVector,
) -> Result<RationalVector> {
    sys.check_dim(xi)?;
    if !sys.in_effect_cone(xi)? {
        return Err(GptError::NotInEffectCone);
    }
    Ok(quotient_unchecked(sys, cs, xi))
}

pub(crate) fn quotient_unchecked(
    sys: &GptSystem,
    cs: &ClassicalSet,
    xi: &RationalVector,
) -> RationalVector {
    cs.pure_states
        .iter()
        .zip(cs.measurement.effects())
        .fold(RationalVector::zeros(sys.dim()), |acc, (&i, a)| {
            &acc + &a.scale(&xi.dot(&sys.states()[i]))
        })
}

/// Whether every pure state of `sys` is jointly distinguishable, with the
/// consequences that must then hold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalTheoryReport {
    pub classical: bool,
    pub measurement: Option<Measurement>,
    /// Pure states linearly independent.
    pub linearly_independent: bool,
    pub unrestricted: bool,
    /// The effect cone is generated by the distinguishing effects.
    pub effect_cone_from_measurement: bool,
    /// False when the generator list is not declared exhaustive; the verdict
    /// is then about the listed sub-theory only.
    pub generators_exhaustive: bool,
}

pub fn classical_theory_report(sys: &GptSystem) -> Result<ClassicalTheoryReport> {
    let measurement = distinguishing_measurement(sys, sys.states())?;
    let classical = sys.num_states() >= 2 && measurement.is_some();
    let linearly_independent = rank_of(sys.states()) == sys.num_states();
    let unrestricted = zoo::is_unrestricted(sys)?;
    let effect_cone_from_measurement = match &measurement {
        Some(m) => {
            let nonzero: Vec<RationalVector> = m
                .effects()
                .iter()
                .filter(|e| !e.is_zero())
                .cloned()
                .collect();
            let cone = crate::exactmath::ConeV::new(sys.dim(), nonzero)?;
            cone.same_cone(&sys.effect_cone())?
        }
        None => false,
    };
    Ok(ClassicalTheoryReport {
        classical,
        measurement,
        linearly_independent,
        unrestricted,
        effect_cone_from_measurement,
        generators_exhaustive: sys.exhaustive(),
    })
}

pub fn is_classical_theory(sys: &GptSystem) -> Result<bool> {
    Ok(classical_theory_report(sys)?.classical)
}
