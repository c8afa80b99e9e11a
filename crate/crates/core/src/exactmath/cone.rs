//! Finitely generated cones and their duals.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use super::matrix::{rank_of, RationalMatrix};
use super::rational::Rational;
use super::simplex::{solve_feasibility, Feasibility, LinearConstraint};
use super::vector::RationalVector;
use super::MathError;

/// A cone in V-representation: all nonnegative combinations of its
/// generators. Generators are stored as canonical rays (first nonzero
/// coordinate of magnitude one), deduplicated, in first-seen order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeV {
    ambient_dim: usize,
    generators: Vec<RationalVector>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// Nonnegative coefficients, one per generator, reproducing the vector.
    Inside(Vec<Rational>),
    Outside,
}

impl Membership {
    pub fn is_inside(&self) -> bool {
        matches!(self, Self::Inside(_))
    }
}

impl ConeV {
    pub fn new(ambient_dim: usize, generators: Vec<RationalVector>) -> Result<Self, MathError> {
        let mut seen = BTreeSet::new();
        let mut canon = Vec::with_capacity(generators.len());
        for (i, g) in generators.into_iter().enumerate() {
            if g.dim() != ambient_dim {
                return Err(MathError::DimensionMismatch {
                    expected: ambient_dim,
                    found: g.dim(),
                });
            }
            if g.is_zero() {
                return Err(MathError::ZeroGenerator(i));
            }
            let ray = g.canonical_ray();
            if seen.insert(ray.clone()) {
                canon.push(ray);
            }
        }
        Ok(Self {
            ambient_dim,
            generators: canon,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn generators(&self) -> &[RationalVector] {
        &self.generators
    }

    pub fn canonical_set(&self) -> BTreeSet<RationalVector> {
        self.generators.iter().cloned().collect()
    }

    pub fn contains(&self, v: &RationalVector) -> Result<bool, MathError> {
        Ok(cone_membership(v, self)?.is_inside())
    }

    /// Every generator of `other` lies in `self`.
    pub fn contains_cone(&self, other: &ConeV) -> Result<bool, MathError> {
        for g in other.generators() {
            if !self.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Mutual containment.
    pub fn same_cone(&self, other: &ConeV) -> Result<bool, MathError> {
        if self.canonical_set() == other.canonical_set() {
            return Ok(true);
        }
        Ok(self.contains_cone(other)? && other.contains_cone(self)?)
    }
}

/// Certify `v` as a nonnegative combination of the generators of `cone`.
pub fn cone_membership(v: &RationalVector, cone: &ConeV) -> Result<Membership, MathError> {
    conic_combination(v, &cone.generators).map(|c| match c {
        Some(coeffs) => Membership::Inside(coeffs),
        None => Membership::Outside,
    })
}

/// Nonnegative coefficients expressing `v` over an arbitrary generator list
/// (zero vectors and repeats allowed), or `None`.
pub fn conic_combination(
    v: &RationalVector,
    generators: &[RationalVector],
) -> Result<Option<Vec<Rational>>, MathError> {
    for g in generators {
        if g.dim() != v.dim() {
            return Err(MathError::DimensionMismatch {
                expected: v.dim(),
                found: g.dim(),
            });
        }
    }
    if v.is_zero() {
        return Ok(Some(vec![Rational::zero(); generators.len()]));
    }
    let constraints: Vec<LinearConstraint> = (0..v.dim())
        .map(|i| {
            LinearConstraint::new(
                generators.iter().map(|g| g[i].clone()).collect(),
                v[i].clone(),
            )
        })
        .collect();
    Ok(match solve_feasibility(generators.len(), &constraints)? {
        Feasibility::Feasible(x) => Some(x),
        Feasibility::Infeasible => None,
    })
}

struct Ray {
    vector: RationalVector,
    /// Indices of processed constraints that vanish on this ray.
    tight: BTreeSet<usize>,
}

/// The dual cone `{f : f . g >= 0 for every generator g}`, by the double
/// description method.
///
/// Constraints are inserted in generator order; adjacency of a positive and
/// a negative ray is decided by the rank of their common tight constraints.
/// When the generators do not span the ambient space the dual has a
/// lineality space, which is returned as `+l` and `-l` pairs. The output is
/// sorted.
pub fn dual_cone(cone: &ConeV) -> Result<ConeV, MathError> {
    let d = cone.ambient_dim;
    let gens = &cone.generators;
    if gens.is_empty() || d == 0 {
        return Err(MathError::EmptyCone);
    }
    let g_mat = RationalMatrix::from_rows(gens)?;
    let lineality = g_mat.kernel_basis();

    // Greedy basis of the row space, in input order.
    let mut basis_idx: Vec<usize> = Vec::new();
    let mut basis_rows: Vec<RationalVector> = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        basis_rows.push(g.clone());
        if rank_of(&basis_rows) > basis_idx.len() {
            basis_idx.push(i);
        } else {
            basis_rows.pop();
        }
    }
    let rank = basis_idx.len();

    // Initial simplicial cone: rays f_j in the row space with g_{i_k} . f_j = delta_kj.
    let b = RationalMatrix::from_rows(&basis_rows)?;
    let gram_inv = b
        .mul(&b.transpose())
        .inverse()
        .expect("gram matrix of independent rows is invertible");
    let initial = b.transpose().mul(&gram_inv);
    let mut rays: Vec<Ray> = (0..rank)
        .map(|j| Ray {
            vector: initial.col(j),
            tight: basis_idx
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .map(|(_, &i)| i)
                .collect(),
        })
        .collect();

    for (h_idx, h) in gens.iter().enumerate() {
        if basis_idx.contains(&h_idx) {
            continue;
        }
        let values: Vec<Rational> = rays.iter().map(|r| h.dot(&r.vector)).collect();
        let mut next: Vec<Ray> = Vec::new();
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for (k, val) in values.iter().enumerate() {
            if val.is_positive() {
                pos.push(k);
            } else if val.is_negative() {
                neg.push(k);
            }
        }
        for &p in &pos {
            for &n in &neg {
                let common: BTreeSet<usize> = rays[p]
                    .tight
                    .intersection(&rays[n].tight)
                    .copied()
                    .collect();
                if common.len() + 2 < rank {
                    continue;
                }
                let tight_rows: Vec<RationalVector> =
                    common.iter().map(|&i| gens[i].clone()).collect();
                if rank_of(&tight_rows) + 2 != rank {
                    continue;
                }
                let v = &rays[n].vector.scale(&values[p]) - &rays[p].vector.scale(&values[n]);
                let mut tight = common;
                tight.insert(h_idx);
                next.push(Ray {
                    vector: v.canonical_ray(),
                    tight,
                });
            }
        }
        for (k, ray) in rays.into_iter().enumerate() {
            let val = &values[k];
            if val.is_negative() {
                continue;
            }
            let mut ray = ray;
            if val.is_zero() {
                ray.tight.insert(h_idx);
            }
            next.push(ray);
        }
        rays = next;
    }

    let mut out: BTreeSet<RationalVector> =
        rays.into_iter().map(|r| r.vector.canonical_ray()).collect();
    for l in &lineality {
        out.insert(l.canonical_ray());
        out.insert((-l).canonical_ray());
    }
    ConeV::new(d, out.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::{int, rat};

    fn cone(rows: &[&[i64]]) -> ConeV {
        let gens = rows.iter().map(|r| RationalVector::from_ints(r)).collect();
        ConeV::new(rows[0].len(), gens).unwrap()
    }

    #[test]
    fn zero_generators_rejected() {
        assert!(matches!(
            ConeV::new(2, vec![RationalVector::zeros(2)]),
            Err(MathError::ZeroGenerator(0))
        ));
    }

    #[test]
    fn generators_deduplicate_up_to_scaling() {
        let c = ConeV::new(
            2,
            vec![
                RationalVector::from_ints(&[2, 4]),
                RationalVector::new(vec![rat(1, 3), rat(2, 3)]),
            ],
        )
        .unwrap();
        assert_eq!(c.generators(), &[RationalVector::from_ints(&[1, 2])]);
    }

    #[test]
    fn zero_vector_is_inside_everything() {
        let c = cone(&[&[1, 1, 0]]);
        assert_eq!(
            cone_membership(&RationalVector::zeros(3), &c).unwrap(),
            Membership::Inside(vec![int(0)])
        );
    }

    #[test]
    fn orthant_is_self_dual() {
        let orthant = cone(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(
            dual_cone(&orthant).unwrap().canonical_set(),
            orthant.canonical_set()
        );
    }

    #[test]
    fn dual_of_half_plane_has_lineality() {
        // a single ray in R^2: dual is a half-plane = ray + line
        let c = cone(&[&[1, 0]]);
        let dual = dual_cone(&c).unwrap();
        let expected: BTreeSet<_> = [[1, 0], [0, 1], [0, -1]]
            .iter()
            .map(|r| RationalVector::from_ints(r))
            .collect();
        assert_eq!(dual.canonical_set(), expected);
    }

    #[test]
    fn membership_dimension_mismatch() {
        let c = cone(&[&[1, 0]]);
        assert!(cone_membership(&RationalVector::zeros(3), &c).is_err());
    }
}
