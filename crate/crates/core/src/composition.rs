//! Minimal tensor products, marginals, the local-classicality axioms and
//! composite classical sets.
//!
//! Coordinates of a product are A-major: the index of `e_i (x) f_j` is
//! `i * dim_B + j`, and the same rule orders state and effect generators.

use rayon::prelude::*;

use crate::classicality::{distinguishing_measurement, ClassicalSet};
use crate::decoherence;
use crate::error::{GptError, Result};
use crate::exactmath::{rank_of, RationalVector};
use crate::gpt::{is_extremal_generator, ChannelMatrix, GptState, GptSystem, Measurement};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositeSystem {
    system: GptSystem,
    factors: Vec<GptSystem>,
}

impl CompositeSystem {
    /// A one-factor "composite", the neutral element for [`min_tensor`].
    pub fn single(system: GptSystem) -> Self {
        Self {
            factors: vec![system.clone()],
            system,
        }
    }

    pub(crate) fn from_parts(system: GptSystem, factors: Vec<GptSystem>) -> Self {
        Self { system, factors }
    }

    pub fn system(&self) -> &GptSystem {
        &self.system
    }

    pub fn into_system(self) -> GptSystem {
        self.system
    }

    pub fn factors(&self) -> &[GptSystem] {
        &self.factors
    }

    pub fn factor_dims(&self) -> Vec<usize> {
        self.factors.iter().map(GptSystem::dim).collect()
    }

    pub fn rename(&mut self, name: impl Into<String>) {
        self.system = self.system.clone().with_name(name);
    }

    /// Composite state-generator index of the product of the given factor
    /// generators.
    pub fn state_index(&self, parts: &[usize]) -> Result<usize> {
        let counts: Vec<usize> = self.factors.iter().map(GptSystem::num_states).collect();
        flat_index(&counts, parts)
    }

    /// Inverse of [`Self::state_index`].
    pub fn split_state_index(&self, index: usize) -> Vec<usize> {
        let counts: Vec<usize> = self.factors.iter().map(GptSystem::num_states).collect();
        split_index(&counts, index)
    }

    /// Product of one vector per factor, A-major.
    pub fn product_vector(&self, parts: &[&RationalVector]) -> Result<RationalVector> {
        if parts.len() != self.factors.len() {
            return Err(GptError::LengthMismatch {
                what: "one vector per factor",
                left: parts.len(),
                right: self.factors.len(),
            });
        }
        for (f, v) in self.factors.iter().zip(parts) {
            f.check_dim(v)?;
        }
        Ok(kron_all(parts))
    }

    /// The product of the factor systems listed in `keep`, in order.
    pub fn sub_system(&self, keep: &[usize]) -> Result<GptSystem> {
        check_keep(self.factors.len(), keep)?;
        let picked: Vec<GptSystem> = keep.iter().map(|&k| self.factors[k].clone()).collect();
        Ok(min_tensor_many(&picked)?.into_system())
    }
}

fn flat_index(counts: &[usize], parts: &[usize]) -> Result<usize> {
    if parts.len() != counts.len() {
        return Err(GptError::LengthMismatch {
            what: "one index per factor",
            left: parts.len(),
            right: counts.len(),
        });
    }
    let mut idx = 0;
    for (&n, &p) in counts.iter().zip(parts) {
        if p >= n {
            return Err(GptError::IndexOutOfRange { index: p, len: n });
        }
        idx = idx * n + p;
    }
    Ok(idx)
}

fn split_index(counts: &[usize], mut index: usize) -> Vec<usize> {
    let mut parts = vec![0; counts.len()];
    for (slot, &n) in parts.iter_mut().zip(counts).rev() {
        *slot = index % n;
        index /= n;
    }
    parts
}

pub(crate) fn kron_all(parts: &[&RationalVector]) -> RationalVector {
    parts[1..]
        .iter()
        .fold(parts[0].clone(), |acc, v| acc.kron(v))
}

fn products(a: &[RationalVector], b: &[RationalVector]) -> Vec<RationalVector> {
    a.par_iter()
        .flat_map_iter(|x| b.iter().map(move |y| x.kron(y)))
        .collect()
}

/// States are mixtures of products of factor states, effects are conic
/// combinations of products of factor effects.
pub fn min_tensor(a: &GptSystem, b: &GptSystem) -> CompositeSystem {
    let system = GptSystem::new(
        format!("{} x {}", a.name(), b.name()),
        products(a.states(), b.states()),
        products(a.effects(), b.effects()),
        a.unit().kron(b.unit()),
    )
    .expect("products of well-shaped systems are well shaped")
    .with_exhaustive(a.exhaustive() && b.exhaustive());
    CompositeSystem {
        system,
        factors: vec![a.clone(), b.clone()],
    }
}

/// Left-associated product of all factors, with the factor list flattened.
pub fn min_tensor_many(factors: &[GptSystem]) -> Result<CompositeSystem> {
    let (first, rest) = factors
        .split_first()
        .ok_or(GptError::Empty("factor list"))?;
    let mut acc = CompositeSystem::single(first.clone());
    for f in rest {
        let step = min_tensor(&acc.system, f);
        acc.factors.push(f.clone());
        acc.system = step.system;
    }
    Ok(acc)
}

fn check_keep(n: usize, keep: &[usize]) -> Result<()> {
    if keep.is_empty() {
        return Err(GptError::BadPartition("keep at least one factor".into()));
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(GptError::BadPartition(
            "factor indices must be strictly increasing".into(),
        ));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= n) {
        return Err(GptError::BadPartition(format!(
            "factor {bad} out of range ({n} factors)"
        )));
    }
    Ok(())
}

/// Contract the factors that have `Some(functional)`; keep the others in
/// order. The result lives on the product of the kept factors.
pub fn partial_contract(
    composite: &CompositeSystem,
    vector: &RationalVector,
    functionals: &[Option<&RationalVector>],
) -> Result<RationalVector> {
    composite.system.check_dim(vector)?;
    let dims = composite.factor_dims();
    if functionals.len() != dims.len() {
        return Err(GptError::LengthMismatch {
            what: "one slot per factor",
            left: functionals.len(),
            right: dims.len(),
        });
    }
    for (f, d) in functionals.iter().zip(&dims) {
        if let Some(f) = f {
            if f.dim() != *d {
                return Err(GptError::DimensionMismatch {
                    expected: *d,
                    found: f.dim(),
                });
            }
        }
    }
    let out_dim: usize = dims
        .iter()
        .zip(functionals)
        .filter(|(_, f)| f.is_none())
        .map(|(d, _)| d)
        .product();
    let mut out = vec![crate::exactmath::Rational::default(); out_dim];
    for (flat, x) in vector.iter().enumerate() {
        if num_traits::Zero::is_zero(x) {
            continue;
        }
        let parts = split_index(&dims, flat);
        let mut weight = x.clone();
        let mut target = 0;
        for ((&p, &d), f) in parts.iter().zip(&dims).zip(functionals) {
            match f {
                Some(f) => weight *= &f[p],
                None => target = target * d + p,
            }
        }
        out[target] += weight;
    }
    Ok(RationalVector::new(out))
}

/// Discard every factor not in `keep` by contracting it with its unit.
pub fn marginal(
    composite: &CompositeSystem,
    state: &RationalVector,
    keep: &[usize],
) -> Result<GptState> {
    check_keep(composite.factors.len(), keep)?;
    let slots: Vec<Option<&RationalVector>> = composite
        .factors
        .iter()
        .enumerate()
        .map(|(k, f)| {
            if keep.contains(&k) {
                None
            } else {
                Some(f.unit())
            }
        })
        .collect();
    let v = partial_contract(composite, state, &slots)?;
    let kept_unit = kron_all(
        &keep
            .iter()
            .map(|&k| composite.factors[k].unit())
            .collect::<Vec<_>>(),
    );
    let norm = kept_unit.dot(&v);
    Ok(GptState::from_parts(v, norm))
}

/// Every product of factor pure states is extremal in the composite state
/// cone.
pub fn check_axiom_product_pure(composite: &CompositeSystem) -> Result<bool> {
    let states = composite.system.states();
    let verdicts: Vec<bool> = (0..states.len())
        .into_par_iter()
        .map(|i| is_extremal_generator(states, i))
        .collect::<Result<_>>()?;
    Ok(verdicts.into_iter().all(|v| v))
}

/// Rank of the effect generators equals their number.
pub fn effects_linearly_independent(sys: &GptSystem) -> bool {
    rank_of(sys.effects()) == sys.effects().len()
}

fn check_set_per_factor(composite: &CompositeSystem, sets: &[ClassicalSet]) -> Result<()> {
    if sets.len() != composite.factors.len() {
        return Err(GptError::LengthMismatch {
            what: "one classical set per factor",
            left: sets.len(),
            right: composite.factors.len(),
        });
    }
    Ok(())
}

/// Composite indices and product measurement of a family of factor sets.
fn product_family(
    composite: &CompositeSystem,
    sets: &[ClassicalSet],
) -> Result<(Vec<usize>, Measurement)> {
    check_set_per_factor(composite, sets)?;
    let mut indices = vec![Vec::new()];
    let mut effects: Vec<RationalVector> = Vec::new();
    for (k, cs) in sets.iter().enumerate() {
        if k == 0 {
            indices = cs.pure_states().iter().map(|&i| vec![i]).collect();
            effects = cs.measurement().effects().to_vec();
            continue;
        }
        indices = indices
            .iter()
            .flat_map(|prefix| {
                cs.pure_states().iter().map(move |&i| {
                    let mut p = prefix.clone();
                    p.push(i);
                    p
                })
            })
            .collect();
        effects = products(&effects, cs.measurement().effects());
    }
    let flat = indices
        .iter()
        .map(|p| composite.state_index(p))
        .collect::<Result<Vec<_>>>()?;
    Ok((flat, Measurement::from_effects_unchecked(effects)))
}

/// The products of the factor sets are jointly distinguishable on the
/// composite and no composite generator extends them.
pub fn check_information_locality(
    composite: &CompositeSystem,
    sets: &[ClassicalSet],
) -> Result<bool> {
    let (indices, measurement) = product_family(composite, sets)?;
    let sys = &composite.system;
    let vectors: Vec<RationalVector> = indices.iter().map(|&i| sys.states()[i].clone()).collect();
    if !measurement.distinguishes(&vectors) && distinguishing_measurement(sys, &vectors)?.is_none()
    {
        return Ok(false);
    }
    let outside: Vec<usize> = (0..sys.num_states())
        .filter(|i| !indices.contains(i))
        .collect();
    let extends: Vec<bool> = outside
        .par_iter()
        .map(|&g| {
            let mut trial = vectors.clone();
            trial.push(sys.states()[g].clone());
            distinguishing_measurement(sys, &trial).map(|m| m.is_some())
        })
        .collect::<Result<_>>()?;
    Ok(!extends.into_iter().any(|e| e))
}

/// The classical set of products with the product measurement. Fails with
/// [`GptError::AxiomFailure`] when either local-classicality axiom fails.
pub fn composite_classical_set(
    composite: &CompositeSystem,
    sets: &[ClassicalSet],
) -> Result<ClassicalSet> {
    check_set_per_factor(composite, sets)?;
    if !check_axiom_product_pure(composite)? {
        return Err(GptError::AxiomFailure(
            "a product of pure states is not pure".into(),
        ));
    }
    if !check_information_locality(composite, sets)? {
        return Err(GptError::AxiomFailure(
            "products of maximal sets are not a maximal set".into(),
        ));
    }
    let (indices, measurement) = product_family(composite, sets)?;
    ClassicalSet::with_measurement(&composite.system, indices, measurement, true)
}

/// The MID of the composite set equals the tensor product of the factor
/// MIDs.
pub fn check_mid_factorization(composite: &CompositeSystem, sets: &[ClassicalSet]) -> Result<bool> {
    let joint = composite_classical_set(composite, sets)?;
    let whole = decoherence::mid(&composite.system, &joint)?;
    let parts = composite
        .factors
        .iter()
        .zip(sets)
        .map(|(f, cs)| decoherence::mid(f, cs))
        .collect::<Result<Vec<ChannelMatrix>>>()?;
    let product = parts[1..]
        .iter()
        .fold(parts[0].clone(), |acc, p| acc.kron(p));
    Ok(whole == product)
}
