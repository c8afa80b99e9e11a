//! Built-in theories, recipe strings, and the no-restriction completion.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::composition::{self, CompositeSystem};
use crate::error::{GptError, Result};
use crate::exactmath::{dual_cone, rat, Rational, RationalVector};
use crate::gpt::{GptSystem, Measurement};

/// Default cap on composite dimension; `GPTFORGE_MAX_DIM` overrides it in
/// the CLI.
pub const DEFAULT_MAX_DIM: usize = 256;

/// The classical system with `d` perfectly distinguishable pure states.
pub fn classical_simplex(d: usize) -> Result<GptSystem> {
    if d < 2 {
        return Err(GptError::BadRecipe {
            recipe: format!("classical:{d}"),
            reason: "a classical simplex needs at least 2 vertices".into(),
        });
    }
    let basis: Vec<RationalVector> = (0..d).map(|i| RationalVector::basis(d, i)).collect();
    let unit = RationalVector::new(vec![Rational::one(); d]);
    GptSystem::new(format!("classical:{d}"), basis.clone(), basis, unit)
}

/// Classical trit states with only the pairwise-average effects
/// `e_ij = (a_i + a_j) / 2` allowed.
pub fn restricted_trit() -> GptSystem {
    let h = rat(1, 2);
    let z = Rational::zero();
    let effects = vec![
        RationalVector::new(vec![h.clone(), h.clone(), z.clone()]),
        RationalVector::new(vec![h.clone(), z.clone(), h.clone()]),
        RationalVector::new(vec![z, h.clone(), h]),
    ];
    let states = (0..3).map(|i| RationalVector::basis(3, i)).collect();
    GptSystem::new(
        "rtrit",
        states,
        effects,
        RationalVector::from_ints(&[1, 1, 1]),
    )
    .expect("restricted trit is well formed")
}

/// The square bit: four pure states at `(+-1, +-1, 1)`, unit `(0, 0, 1)`,
/// and the four extremal rays of the dual cone scaled to touch 1. The list
/// is closed under complements (`u - a1 = a2`, `u - a3 = a4`).
pub fn square_bit() -> GptSystem {
    let states = vec![
        RationalVector::from_ints(&[-1, 1, 1]),
        RationalVector::from_ints(&[-1, -1, 1]),
        RationalVector::from_ints(&[1, -1, 1]),
        RationalVector::from_ints(&[1, 1, 1]),
    ];
    let half = |v: &[i64]| RationalVector::from_ints(v).scale(&rat(1, 2));
    let effects = vec![
        half(&[0, 1, 1]),
        half(&[0, -1, 1]),
        half(&[1, 0, 1]),
        half(&[-1, 0, 1]),
    ];
    GptSystem::new(
        "sqbit",
        states,
        effects,
        RationalVector::from_ints(&[0, 0, 1]),
    )
    .expect("square bit is well formed")
}

/// Replace the effect generators by the extremal rays of the dual of the
/// state cone, each scaled so its maximum on the pure states is 1.
pub fn unrestricted_completion(sys: &GptSystem) -> Result<GptSystem> {
    let dual = dual_cone(&sys.state_cone())?;
    let effects = dual
        .generators()
        .iter()
        .map(|f| scale_to_unit_max(sys, f))
        .collect();
    Ok(GptSystem::new(
        sys.name().to_string(),
        sys.states().to_vec(),
        effects,
        sys.unit().clone(),
    )?
    .with_exhaustive(sys.exhaustive()))
}

fn scale_to_unit_max(sys: &GptSystem, f: &RationalVector) -> RationalVector {
    let max = sys
        .states()
        .iter()
        .map(|g| f.dot(g))
        .max()
        .expect("systems have states");
    if max.is_zero() {
        f.clone()
    } else {
        f.scale(&max.recip())
    }
}

/// The effect cone and the dual of the state cone coincide.
pub fn is_unrestricted(sys: &GptSystem) -> Result<bool> {
    let dual = dual_cone(&sys.state_cone())?;
    Ok(sys.effect_cone().same_cone(&dual)?)
}

/// A pure state distinguishable from `psi` together with the two-outcome
/// measurement `{u - a, a}` separating them (`psi` first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistinguishablePartner {
    pub partner: usize,
    pub functional: RationalVector,
    pub measurement: Measurement,
}

/// Constructive partner search in an unrestricted system: a dual functional
/// `f` vanishing on `psi`, its maximum `lambda*` over pure states, and
/// `a = f / lambda*`.
pub fn find_distinguishable_partner(sys: &GptSystem, psi: usize) -> Result<DistinguishablePartner> {
    let target = sys.state(psi)?.clone();
    if !is_unrestricted(sys)? {
        return Err(GptError::Restricted);
    }
    let dual = dual_cone(&sys.state_cone())?;
    for f in dual.generators() {
        if !f.dot(&target).is_zero() {
            continue;
        }
        let values: Vec<Rational> = sys.states().iter().map(|g| f.dot(g)).collect();
        let lambda = values.iter().max().expect("nonempty").clone();
        if lambda.is_zero() {
            // vanishes on the whole state space
            continue;
        }
        let partner = values
            .iter()
            .position(|v| *v == lambda)
            .expect("max is attained");
        let a = f.scale(&lambda.recip());
        let measurement = Measurement::from_effects_unchecked(vec![sys.unit() - &a, a.clone()]);
        debug_assert!(measurement.distinguishes(&[target.clone(), sys.states()[partner].clone()]));
        return Ok(DistinguishablePartner {
            partner,
            functional: f.clone(),
            measurement,
        });
    }
    Err(GptError::NoSupportingFunctional(psi))
}

/// Cone equality of both state and effect cones plus equal units.
pub fn same_theory(a: &GptSystem, b: &GptSystem) -> Result<bool> {
    Ok(a.dim() == b.dim()
        && a.unit() == b.unit()
        && a.state_cone().same_cone(&b.state_cone())?
        && a.effect_cone().same_cone(&b.effect_cone())?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TheoryRecipe {
    ClassicalSimplex(usize),
    RestrictedTrit,
    SquareBit,
    /// Left-associated minimal tensor product of the listed factors.
    Composite(Vec<TheoryRecipe>),
}

impl TheoryRecipe {
    /// Single-factor recipes are returned as a one-element list.
    pub fn factors(&self) -> Vec<TheoryRecipe> {
        match self {
            Self::Composite(parts) => parts.clone(),
            atom => vec![atom.clone()],
        }
    }

    fn build_atom(&self) -> Result<GptSystem> {
        match self {
            Self::ClassicalSimplex(d) => classical_simplex(*d),
            Self::RestrictedTrit => Ok(restricted_trit()),
            Self::SquareBit => Ok(square_bit()),
            Self::Composite(_) => unreachable!("composites are flattened"),
        }
    }

    /// Build the product system, keeping the factor structure.
    pub fn build_composite(&self, max_dim: usize) -> Result<CompositeSystem> {
        let factors = self
            .factors()
            .iter()
            .map(TheoryRecipe::build_atom)
            .collect::<Result<Vec<_>>>()?;
        let dim: usize = factors.iter().map(GptSystem::dim).product();
        if dim > max_dim {
            return Err(GptError::DimensionLimit {
                dim,
                limit: max_dim,
            });
        }
        let mut composite = composition::min_tensor_many(&factors)?;
        composite.rename(self.to_string());
        Ok(composite)
    }

    pub fn build(&self) -> Result<GptSystem> {
        Ok(self.build_composite(DEFAULT_MAX_DIM)?.into_system())
    }
}

fn parse_atom(s: &str, whole: &str) -> Result<TheoryRecipe> {
    let bad = |reason: &str| GptError::BadRecipe {
        recipe: whole.to_string(),
        reason: reason.to_string(),
    };
    match s {
        "rtrit" => Ok(TheoryRecipe::RestrictedTrit),
        "sqbit" => Ok(TheoryRecipe::SquareBit),
        "bit" => Ok(TheoryRecipe::ClassicalSimplex(2)),
        "trit" => Ok(TheoryRecipe::ClassicalSimplex(3)),
        _ => {
            let d = s
                .strip_prefix("classical:")
                .ok_or_else(|| bad(&format!("unknown theory {s:?}")))?;
            let d: usize = d
                .parse()
                .map_err(|_| bad("classical:d needs an integer d"))?;
            if d < 2 {
                return Err(bad("classical:d needs d >= 2"));
            }
            Ok(TheoryRecipe::ClassicalSimplex(d))
        }
    }
}

impl FromStr for TheoryRecipe {
    type Err = GptError;

    /// `classical:d`, `rtrit`, `sqbit` (aliases `bit`, `trit`), `X^N`, and
    /// products spelled `A x B`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| GptError::BadRecipe {
            recipe: s.to_string(),
            reason: reason.to_string(),
        };
        let mut factors = Vec::new();
        for term in s.split(" x ") {
            let term = term.trim();
            if term.is_empty() {
                return Err(bad("empty factor"));
            }
            let (atom, power) = match term.split_once('^') {
                Some((a, n)) => {
                    let n: usize = n.parse().map_err(|_| bad("exponent must be an integer"))?;
                    if n == 0 {
                        return Err(bad("exponent must be at least 1"));
                    }
                    (a, n)
                }
                None => (term, 1),
            };
            let atom = parse_atom(atom, s)?;
            factors.extend(std::iter::repeat_n(atom, power));
        }
        Ok(if factors.len() == 1 {
            factors.pop().expect("one factor")
        } else {
            TheoryRecipe::Composite(factors)
        })
    }
}

impl fmt::Display for TheoryRecipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ClassicalSimplex(d) => write!(f, "classical:{d}"),
            Self::RestrictedTrit => f.write_str("rtrit"),
            Self::SquareBit => f.write_str("sqbit"),
            Self::Composite(parts) => {
                let mut i = 0;
                let mut first = true;
                while i < parts.len() {
                    let run = parts[i..].iter().take_while(|p| **p == parts[i]).count();
                    if !first {
                        f.write_str(" x ")?;
                    }
                    first = false;
                    write!(f, "{}", parts[i])?;
                    if run > 1 {
                        write!(f, "^{run}")?;
                    }
                    i += run;
                }
                Ok(())
            }
        }
    }
}

/// `(u - e)` for the unit of `sys`; handy when writing two-outcome
/// measurements by hand.
pub fn complement(sys: &GptSystem, e: &RationalVector) -> RationalVector {
    sys.unit() - e
}

/// The dual basis `a_i` of a classical simplex as a measurement.
pub fn simplex_measurement(sys: &GptSystem) -> Measurement {
    Measurement::from_effects_unchecked(sys.effects().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::int;
    use crate::gpt::{is_valid_effect, validate_system};

    #[test]
    fn classical_simplex_needs_two_vertices() {
        assert!(classical_simplex(1).is_err());
        let bit = classical_simplex(2).unwrap();
        assert_eq!(bit.num_states(), 2);
        assert_eq!(bit.effects().len(), 2);
        assert!(validate_system(&classical_simplex(4).unwrap())
            .unwrap()
            .is_ok());
    }

    #[test]
    fn restricted_trit_is_valid_but_restricted() {
        let rt = restricted_trit();
        assert!(validate_system(&rt).unwrap().is_ok());
        assert!(!is_unrestricted(&rt).unwrap());
        let sum = RationalVector::sum(3, rt.effects());
        assert_eq!(&sum, rt.unit());
        let twice_e13 = rt.effects()[1].scale(&int(2));
        assert!(!is_valid_effect(&rt, &twice_e13).unwrap().is_valid());
    }

    #[test]
    fn square_bit_values_from_its_construction() {
        let sq = square_bit();
        assert!(validate_system(&sq).unwrap().is_ok());
        let a1 = &sq.effects()[0];
        assert_eq!(a1.dot(sq.state(0).unwrap()), int(1));
        assert_eq!(a1.dot(sq.state(1).unwrap()), int(0));
        assert_eq!(a1.dot(sq.state(3).unwrap()), int(1));
        assert!(is_unrestricted(&sq).unwrap());
    }

    #[test]
    fn completion_of_restricted_trit_is_classical_trit() {
        let done = unrestricted_completion(&restricted_trit()).unwrap();
        assert!(same_theory(&done, &classical_simplex(3).unwrap()).unwrap());
        assert!(is_unrestricted(&done).unwrap());
    }

    #[test]
    fn completion_fixes_unrestricted_theories() {
        for sys in [classical_simplex(3).unwrap(), square_bit()] {
            let done = unrestricted_completion(&sys).unwrap();
            assert!(same_theory(&done, &sys).unwrap());
            let twice = unrestricted_completion(&done).unwrap();
            assert_eq!(twice, done);
        }
    }

    #[test]
    fn partner_in_square_bit_for_alpha2() {
        let sq = square_bit();
        let p = find_distinguishable_partner(&sq, 1).unwrap();
        assert!([0, 3].contains(&p.partner), "partner {}", p.partner);
        assert_eq!(p.partner, 0);
        assert!(p
            .measurement
            .distinguishes(&[sq.states()[1].clone(), sq.states()[p.partner].clone()]));
        Measurement::new(&sq, p.measurement.effects().to_vec()).unwrap();
    }

    #[test]
    fn partner_in_classical_trit() {
        let trit = classical_simplex(3).unwrap();
        let p = find_distinguishable_partner(&trit, 0).unwrap();
        assert!([1, 2].contains(&p.partner));
    }

    #[test]
    fn partner_search_refuses_restricted_trit() {
        assert!(matches!(
            find_distinguishable_partner(&restricted_trit(), 0),
            Err(GptError::Restricted)
        ));
    }

    #[test]
    fn recipes_parse_and_print() {
        for (text, canonical) in [
            ("rtrit", "rtrit"),
            ("classical:4", "classical:4"),
            ("rtrit^3", "rtrit^3"),
            ("sqbit x classical:2", "sqbit x classical:2"),
            ("bit x bit", "classical:2^2"),
            ("rtrit x rtrit x sqbit", "rtrit^2 x sqbit"),
        ] {
            let r: TheoryRecipe = text.parse().unwrap();
            assert_eq!(r.to_string(), canonical);
        }
        for bad in [
            "",
            "qubit",
            "classical:1",
            "classical:x",
            "rtrit^0",
            "rtrit x ",
            "rtrit^a",
        ] {
            assert!(bad.parse::<TheoryRecipe>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn dimension_limit_is_enforced() {
        let r: TheoryRecipe = "rtrit^3".parse().unwrap();
        assert!(matches!(
            r.build_composite(26),
            Err(GptError::DimensionLimit { dim: 27, limit: 26 })
        ));
        assert_eq!(r.build_composite(27).unwrap().system().dim(), 27);
    }
}
