//! Exact two-phase simplex over rationals.
//!
//! Problems are in standard equality form: `A x = b`, `x >= 0`. Pivoting
//! uses Bland's rule throughout, so degenerate problems terminate.

use num_traits::{Signed, Zero};

use super::rational::Rational;
use super::MathError;

/// One equality row `coeffs . x = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Self { coeffs, rhs }
    }

    pub fn evaluate(&self, x: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .zip(x)
            .filter(|(a, _)| !a.is_zero())
            .map(|(a, v)| a * v)
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible(_))
    }

    pub fn assignment(&self) -> Option<&[Rational]> {
        match self {
            Self::Feasible(x) => Some(x),
            Self::Infeasible => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        value: Rational,
        assignment: Vec<Rational>,
    },
    Infeasible,
    Unbounded,
}

/// Decide whether `{x >= 0 : every constraint holds}` is nonempty, returning
/// an exact witness if so.
pub fn solve_feasibility(
    num_vars: usize,
    constraints: &[LinearConstraint],
) -> Result<Feasibility, MathError> {
    check_shape(num_vars, constraints)?;
    let Some(reduced) = Presolved::new(num_vars, constraints) else {
        return Ok(Feasibility::Infeasible);
    };
    let mut tab = Tableau::phase_one(&reduced);
    if !tab.run_phase_one() {
        return Ok(Feasibility::Infeasible);
    }
    Ok(Feasibility::Feasible(reduced.expand(&tab.solution())))
}

/// Minimize `objective . x` subject to the constraints and `x >= 0`.
pub fn minimize(
    num_vars: usize,
    constraints: &[LinearConstraint],
    objective: &[Rational],
) -> Result<LpOutcome, MathError> {
    check_shape(num_vars, constraints)?;
    if objective.len() != num_vars {
        return Err(MathError::DimensionMismatch {
            expected: num_vars,
            found: objective.len(),
        });
    }
    let Some(reduced) = Presolved::new(num_vars, constraints) else {
        return Ok(LpOutcome::Infeasible);
    };
    let mut tab = Tableau::phase_one(&reduced);
    if !tab.run_phase_one() {
        return Ok(LpOutcome::Infeasible);
    }
    let cost: Vec<Rational> = reduced
        .active
        .iter()
        .map(|&j| objective[j].clone())
        .collect();
    if !tab.run_phase_two(&cost) {
        return Ok(LpOutcome::Unbounded);
    }
    let assignment = reduced.expand(&tab.solution());
    let value = objective.iter().zip(&assignment).map(|(c, x)| c * x).sum();
    Ok(LpOutcome::Optimal { value, assignment })
}

fn check_shape(num_vars: usize, constraints: &[LinearConstraint]) -> Result<(), MathError> {
    for c in constraints {
        if c.coeffs.len() != num_vars {
            return Err(MathError::DimensionMismatch {
                expected: num_vars,
                found: c.coeffs.len(),
            });
        }
    }
    Ok(())
}

/// The problem after fixing variables that a sign-definite zero row forces
/// to vanish, and dropping empty rows.
struct Presolved {
    num_vars: usize,
    active: Vec<usize>,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
}

impl Presolved {
    fn new(num_vars: usize, constraints: &[LinearConstraint]) -> Option<Self> {
        let mut fixed = vec![false; num_vars];
        loop {
            let mut changed = false;
            for c in constraints.iter().filter(|c| c.rhs.is_zero()) {
                let live = || {
                    c.coeffs
                        .iter()
                        .enumerate()
                        .filter(|(j, a)| !fixed[*j] && !a.is_zero())
                };
                let nonneg = live().all(|(_, a)| a.is_positive());
                let nonpos = live().all(|(_, a)| a.is_negative());
                if nonneg || nonpos {
                    let forced: Vec<usize> = live().map(|(j, _)| j).collect();
                    for j in forced {
                        fixed[j] = true;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let active: Vec<usize> = (0..num_vars).filter(|&j| !fixed[j]).collect();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for c in constraints {
            let row: Vec<Rational> = active.iter().map(|&j| c.coeffs[j].clone()).collect();
            if row.iter().all(Zero::is_zero) {
                if !c.rhs.is_zero() {
                    return None;
                }
                continue;
            }
            if c.rhs.is_negative() {
                rows.push(row.into_iter().map(|a| -a).collect());
                rhs.push(-c.rhs.clone());
            } else {
                rows.push(row);
                rhs.push(c.rhs.clone());
            }
        }
        Some(Self {
            num_vars,
            active,
            rows,
            rhs,
        })
    }

    fn expand(&self, reduced: &[Rational]) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.num_vars];
        for (k, &j) in self.active.iter().enumerate() {
            x[j] = reduced[k].clone();
        }
        x
    }
}

struct Tableau {
    /// Structural variables; columns `n..n+m0` are artificials.
    n: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    reduced_cost: Vec<Rational>,
    value: Rational,
    allowed: Vec<bool>,
}

impl Tableau {
    fn phase_one(p: &Presolved) -> Self {
        let n = p.active.len();
        let m = p.rows.len();
        let width = n + m;
        let mut rows = Vec::with_capacity(m);
        for (r, row) in p.rows.iter().enumerate() {
            let mut full = row.clone();
            full.resize(width, Rational::zero());
            full[n + r] = Rational::from_integer(1.into());
            rows.push(full);
        }
        let mut reduced_cost = vec![Rational::zero(); width];
        for row in &p.rows {
            for (j, a) in row.iter().enumerate() {
                if !a.is_zero() {
                    reduced_cost[j] -= a;
                }
            }
        }
        Self {
            n,
            rows,
            rhs: p.rhs.clone(),
            basis: (n..n + m).collect(),
            reduced_cost,
            value: p.rhs.iter().sum(),
            allowed: vec![true; width],
        }
    }

    fn width(&self) -> usize {
        self.allowed.len()
    }

    /// Returns false when the phase-one optimum is positive (infeasible).
    fn run_phase_one(&mut self) -> bool {
        let bounded = self.iterate();
        debug_assert!(bounded, "phase one is always bounded");
        self.value.is_zero()
    }

    /// Returns false when the objective is unbounded below.
    fn run_phase_two(&mut self, cost: &[Rational]) -> bool {
        self.expel_artificials();
        for j in self.n..self.width() {
            self.allowed[j] = false;
        }
        let mut reduced_cost: Vec<Rational> = (0..self.width())
            .map(|j| cost.get(j).cloned().unwrap_or_else(Rational::zero))
            .collect();
        let mut value = Rational::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = reduced_cost[b].clone();
            if cb.is_zero() {
                continue;
            }
            value += &cb * &self.rhs[r];
            for (j, a) in self.rows[r].iter().enumerate() {
                if !a.is_zero() {
                    reduced_cost[j] -= &cb * a;
                }
            }
        }
        self.reduced_cost = reduced_cost;
        self.value = value;
        self.iterate()
    }

    /// Pivot artificial variables (all at level zero) out of the basis;
    /// rows where that is impossible are redundant and get dropped.
    fn expel_artificials(&mut self) {
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= self.n {
                match (0..self.n).find(|&j| !self.rows[r][j].is_zero()) {
                    Some(j) => self.pivot(r, j),
                    None => {
                        self.rows.remove(r);
                        self.rhs.remove(r);
                        self.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    fn iterate(&mut self) -> bool {
        loop {
            let entering =
                (0..self.width()).find(|&j| self.allowed[j] && self.reduced_cost[j].is_negative());
            let Some(col) = entering else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &best {
                    None => true,
                    Some((br, bratio)) => {
                        ratio < *bratio || (ratio == *bratio && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                Some((row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let inv = self.rows[pr][pc].recip();
        for a in self.rows[pr].iter_mut() {
            if !a.is_zero() {
                *a *= &inv;
            }
        }
        self.rhs[pr] *= &inv;
        let support: Vec<usize> = (0..self.width())
            .filter(|&j| !self.rows[pr][j].is_zero())
            .collect();
        let pivot_row = self.rows[pr].clone();
        let pivot_rhs = self.rhs[pr].clone();
        for r in 0..self.rows.len() {
            if r == pr || self.rows[r][pc].is_zero() {
                continue;
            }
            let f = self.rows[r][pc].clone();
            for &j in &support {
                let delta = &f * &pivot_row[j];
                self.rows[r][j] -= delta;
            }
            if !pivot_rhs.is_zero() {
                self.rhs[r] -= &f * &pivot_rhs;
            }
        }
        let d = self.reduced_cost[pc].clone();
        if !d.is_zero() {
            for &j in &support {
                let delta = &d * &pivot_row[j];
                self.reduced_cost[j] -= delta;
            }
            self.value += &d * &pivot_rhs;
        }
        self.basis[pr] = pc;
    }

    fn solution(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.n];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                x[b] = self.rhs[r].clone();
            }
        }
        x
    }
}
