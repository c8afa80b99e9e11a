//! Complete decoherence and the measurement-induced decoherence (MID)
//! `D = sum_i |alpha_i)(a_i|` of a maximal classical set.

use num_traits::{One, Signed};

use crate::classicality::{quotient_unchecked, ClassicalSet, DistinguishingLp};
use crate::error::{GptError, Result};
use crate::exactmath::{int, minimize, LpOutcome, RationalVector};
use crate::gpt::{ChannelMatrix, GptSystem, Measurement};

/// The MID of a maximal classical set. Non-maximal sets are refused because
/// their branches need not sum to a channel.
pub fn mid(sys: &GptSystem, cs: &ClassicalSet) -> Result<ChannelMatrix> {
    if !cs.maximal() {
        return Err(GptError::NotMaximal);
    }
    Ok(channel_from_measurement(sys, cs, cs.measurement()))
}

fn channel_from_measurement(sys: &GptSystem, cs: &ClassicalSet, m: &Measurement) -> ChannelMatrix {
    cs.pure_states()
        .iter()
        .zip(m.effects())
        .map(|(&i, a)| ChannelMatrix::measure_prepare(&sys.states()[i], a))
        .reduce(|acc, b| acc.add(&b))
        .unwrap_or_else(|| ChannelMatrix::zero(sys.dim(), sys.dim()))
}

/// Both defining clauses, checked on generators: every state generator is
/// sent into the simplex of the set with its norm preserved, and every
/// state of the set is fixed.
pub fn is_complete_decoherence(
    sys: &GptSystem,
    channel: &ChannelMatrix,
    cs: &ClassicalSet,
) -> Result<bool> {
    if channel.in_dim() != sys.dim() || channel.out_dim() != sys.dim() {
        return Err(GptError::DimensionMismatch {
            expected: sys.dim(),
            found: channel.in_dim().max(channel.out_dim()),
        });
    }
    let alphas = cs.vectors(sys);
    let effects = cs.measurement().effects();
    for g in sys.states() {
        let image = channel.apply_vector(g);
        // the alphas are linearly independent, so the coefficients are
        // read off by the distinguishing effects
        let coeffs: Vec<_> = effects.iter().map(|a| a.dot(&image)).collect();
        if coeffs.iter().any(Signed::is_negative) {
            return Ok(false);
        }
        let rebuilt = alphas
            .iter()
            .zip(&coeffs)
            .fold(RationalVector::zeros(sys.dim()), |acc, (alpha, c)| {
                &acc + &alpha.scale(c)
            });
        if rebuilt != image || sys.unit().dot(&image) != sys.unit().dot(g) {
            return Ok(false);
        }
    }
    Ok(alphas.iter().all(|a| &channel.apply_vector(a) == a))
}

/// `(1/2) alpha_i + (1/2) psi` sent to the pure `alpha_i` by the MID.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PurityIncrease {
    pub classical_index: usize,
    pub outside_state: usize,
    pub input: RationalVector,
    pub output: RationalVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoherenceReport {
    pub channel: ChannelMatrix,
    pub classical_set: ClassicalSet,
    pub is_complete: bool,
    /// `D^2 = D` as matrices.
    pub idempotent: bool,
    /// `a_i D = a_i` for every distinguishing effect.
    pub fixes_classical_effects: bool,
    pub purity_increasing_inputs: Vec<PurityIncrease>,
}

pub fn mid_property_suite(sys: &GptSystem, cs: &ClassicalSet) -> Result<DecoherenceReport> {
    let channel = mid(sys, cs)?;
    let is_complete = is_complete_decoherence(sys, &channel, cs)?;
    let idempotent = channel.after(&channel) == channel;
    let fixes_classical_effects = cs
        .measurement()
        .effects()
        .iter()
        .all(|a| &channel.pull_back(a) == a);
    let purity_increasing_inputs = purity_increase_scan(sys, cs)?;
    Ok(DecoherenceReport {
        channel,
        classical_set: cs.clone(),
        is_complete,
        idempotent,
        fixes_classical_effects,
        purity_increasing_inputs,
    })
}

/// `e D` for every effect generator `e`. Each equals the classical quotient
/// representative of `e`.
pub fn decohered_effect_set(sys: &GptSystem, cs: &ClassicalSet) -> Result<Vec<RationalVector>> {
    let channel = mid(sys, cs)?;
    let out: Vec<RationalVector> = sys.effects().iter().map(|e| channel.pull_back(e)).collect();
    for (e, d) in sys.effects().iter().zip(&out) {
        if *d != quotient_unchecked(sys, cs, e) {
            return Err(GptError::Shape(format!(
                "decohered effect {d} differs from the quotient of {e}"
            )));
        }
    }
    Ok(out)
}

/// Mixed states that the MID makes pure: for every distinguishing effect
/// `a_i` scoring 1 on a generator `psi` outside the set.
pub fn purity_increase_scan(sys: &GptSystem, cs: &ClassicalSet) -> Result<Vec<PurityIncrease>> {
    let channel = mid(sys, cs)?;
    let half = crate::exactmath::rat(1, 2);
    let mut out = Vec::new();
    for (&i, a) in cs.pure_states().iter().zip(cs.measurement().effects()) {
        let alpha = &sys.states()[i];
        for (p, psi) in sys.states().iter().enumerate() {
            if cs.pure_states().contains(&p) || !a.dot(psi).is_one() {
                continue;
            }
            let input = &alpha.scale(&half) + &psi.scale(&half);
            let output = channel.apply_vector(&input);
            if &output != alpha {
                return Err(GptError::Shape(format!(
                    "mixture of states {i} and {p} is sent to {output}, not to state {i}"
                )));
            }
            out.push(PurityIncrease {
                classical_index: i,
                outside_state: p,
                input,
                output,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Uniqueness {
    /// Every distinguishing measurement of the set coincides with the MID's,
    /// so no other decoherence of the form `sum_i |alpha_i)(f_i|` exists.
    Unique,
    Alternative {
        channel: ChannelMatrix,
        /// A state generator on which the two channels differ.
        separating_state: usize,
    },
}

/// Search for a complete decoherence other than the MID among channels
/// `sum_i |alpha_i)(f_i|` built from another distinguishing measurement
/// `{f_i}`. Each coordinate of each `f_i` is minimized and maximized over
/// the distinguishing-measurement polytope.
pub fn alternative_complete_decoherence(sys: &GptSystem, cs: &ClassicalSet) -> Result<Uniqueness> {
    let reference = mid(sys, cs)?;
    let alphas = cs.vectors(sys);
    let lp = DistinguishingLp::new(sys, &alphas)?;
    for (i, a) in cs.measurement().effects().iter().enumerate() {
        for c in 0..sys.dim() {
            for sign in [int(1), int(-1)] {
                let objective = lp.coordinate_objective(i, c, &sign);
                let LpOutcome::Optimal { value, assignment } =
                    minimize(lp.num_vars(), &lp.constraints, &objective)?
                else {
                    continue;
                };
                if value == &a[c] * &sign {
                    continue;
                }
                let alt = lp.measurement(&assignment);
                let channel = channel_from_measurement(sys, cs, &alt);
                debug_assert!(is_complete_decoherence(sys, &channel, cs)?);
                let separating_state = sys
                    .states()
                    .iter()
                    .position(|g| channel.apply_vector(g) != reference.apply_vector(g))
                    .expect("different effects differ on some generator");
                return Ok(Uniqueness::Alternative {
                    channel,
                    separating_state,
                });
            }
        }
    }
    Ok(Uniqueness::Unique)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classicality::extend_to_maximal;
    use crate::exactmath::RationalMatrix;
    use crate::zoo::{classical_simplex, square_bit};

    fn sq_set(indices: &[usize]) -> (GptSystem, ClassicalSet) {
        let sq = square_bit();
        let cs = ClassicalSet::from_indices(&sq, indices).unwrap().unwrap();
        (sq, cs)
    }

    #[test]
    fn classical_mid_is_identity() {
        let trit = classical_simplex(3).unwrap();
        let cs = extend_to_maximal(&trit, &[]).unwrap().unwrap();
        assert_eq!(mid(&trit, &cs).unwrap(), ChannelMatrix::identity(3));
        assert!(purity_increase_scan(&trit, &cs).unwrap().is_empty());
    }

    #[test]
    fn square_bit_mid_projects_horizontally() {
        let (sq, cs) = sq_set(&[0, 1]);
        let d = mid(&sq, &cs).unwrap();
        let expected = RationalMatrix::from_int_rows(&[&[0, 0, -1], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(d.matrix(), &expected);
        assert!(is_complete_decoherence(&sq, &d, &cs).unwrap());
    }

    #[test]
    fn identity_and_constant_channels_are_not_decoherences() {
        let (sq, cs) = sq_set(&[0, 1]);
        assert!(!is_complete_decoherence(&sq, &ChannelMatrix::identity(3), &cs).unwrap());
        let constant = ChannelMatrix::measure_prepare(&sq.states()[0], sq.unit());
        assert!(!is_complete_decoherence(&sq, &constant, &cs).unwrap());
    }

    #[test]
    fn property_suite_on_square_bit() {
        let (sq, cs) = sq_set(&[0, 1]);
        let r = mid_property_suite(&sq, &cs).unwrap();
        assert!(r.is_complete && r.idempotent && r.fixes_classical_effects);
        let pairs: Vec<_> = r
            .purity_increasing_inputs
            .iter()
            .map(|p| (p.classical_index, p.outside_state))
            .collect();
        assert_eq!(pairs, vec![(0, 3), (1, 2)]);
    }

    #[test]
    fn decohered_unit_is_unit() {
        let (sq, cs) = sq_set(&[0, 1]);
        let d = mid(&sq, &cs).unwrap();
        assert_eq!(&d.pull_back(sq.unit()), sq.unit());
        let set = decohered_effect_set(&sq, &cs).unwrap();
        assert_eq!(set[0], sq.effects()[0]);
        assert_eq!(set[1], sq.effects()[1]);
        // (1/2)(1, 0, 1) vanishes on both alphas, (1/2)(-1, 0, 1) is 1 on both
        assert!(set[2].is_zero());
        assert_eq!(set[3], sq.unit().clone());
    }

    #[test]
    fn adjacent_pair_decoherence_is_unique() {
        let (sq, cs) = sq_set(&[0, 1]);
        assert_eq!(
            alternative_complete_decoherence(&sq, &cs).unwrap(),
            Uniqueness::Unique
        );
    }

    #[test]
    fn diagonal_pair_has_another_decoherence() {
        let (sq, cs) = sq_set(&[0, 2]);
        match alternative_complete_decoherence(&sq, &cs).unwrap() {
            Uniqueness::Alternative {
                channel,
                separating_state,
            } => {
                assert!(is_complete_decoherence(&sq, &channel, &cs).unwrap());
                assert_ne!(channel, mid(&sq, &cs).unwrap());
                assert!([1, 3].contains(&separating_state));
            }
            Uniqueness::Unique => panic!("expected an alternative"),
        }
    }

    #[test]
    fn non_maximal_set_is_refused() {
        let trit = classical_simplex(3).unwrap();
        let cs = ClassicalSet::from_indices(&trit, &[0, 1]).unwrap().unwrap();
        assert!(!cs.maximal());
        assert!(matches!(mid(&trit, &cs), Err(GptError::NotMaximal)));
    }
}
