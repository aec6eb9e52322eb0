//! Exact integer feasibility by branch-and-bound with bound propagation.
//!
//! Constraints are affine expressions over bounded integer variables that
//! must land in a rational interval. Each constraint is scaled to integer
//! coefficients, so all search arithmetic is exact `i128`.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::num::{self, Rational};
use crate::rint::{Ext, RationalInterval};

pub const DEFAULT_NODE_LIMIT: u64 = 5_000_000;

/// Propagation passes per node before branching.
const PROPAGATION_ROUNDS: usize = 64;

/// Memory budget, in 64-bit words, for remembered infeasible nodes.
const SEEN_WORDS: usize = 1 << 24;

/// `constant + sum(coef * x[var])` must lie in `bounds`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub terms: Vec<(usize, Rational)>,
    pub constant: Rational,
    pub bounds: RationalInterval,
}

impl LinearConstraint {
    pub fn value(&self, x: &[i64]) -> Rational {
        self.terms
            .iter()
            .fold(self.constant.clone(), |acc, (j, a)| acc + a * Rational::from_integer(x[*j].into()))
    }

    pub fn holds(&self, x: &[i64]) -> bool {
        self.bounds.contains(&self.value(x))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntegerProgram {
    pub lower: Vec<i64>,
    pub upper: Vec<i64>,
    pub constraints: Vec<LinearConstraint>,
}

impl IntegerProgram {
    pub fn add_variable(&mut self, lo: i64, hi: i64) -> usize {
        self.lower.push(lo);
        self.upper.push(hi);
        self.lower.len() - 1
    }

    pub fn num_variables(&self) -> usize {
        self.lower.len()
    }

    pub fn is_satisfied_by(&self, x: &[i64]) -> bool {
        x.len() == self.num_variables()
            && x.iter()
                .enumerate()
                .all(|(j, v)| (self.lower[j]..=self.upper[j]).contains(v))
            && self.constraints.iter().all(|c| c.holds(x))
    }
}

/// Feasibility oracle over integer programs.
pub trait FeasibilitySolver {
    /// A feasible point, or `None` when none exists.
    fn solve(&self, program: &IntegerProgram) -> Result<Option<Vec<i64>>>;
}

/// Depth-first branch-and-bound. Branches on the variable with the widest
/// domain (lowest index on ties) and explores the lower half first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchAndBound {
    pub node_limit: u64,
}

impl Default for BranchAndBound {
    fn default() -> Self {
        Self {
            node_limit: DEFAULT_NODE_LIMIT,
        }
    }
}

#[derive(Debug, Clone)]
struct Scaled {
    terms: Vec<(usize, i128)>,
    lo: Option<i128>,
    hi: Option<i128>,
}

fn to_i128(v: &BigInt) -> Result<i128> {
    v.to_i128().ok_or(Error::Overflow)
}

fn scale(c: &LinearConstraint, lower: &[i64], upper: &[i64]) -> Result<Option<Scaled>> {
    let (lo, hi) = match &c.bounds {
        RationalInterval::Empty => return Ok(None),
        RationalInterval::Range { lo, hi } => (lo, hi),
    };
    let mut den = BigInt::one();
    for (_, a) in &c.terms {
        den = den.lcm(a.denom());
    }
    let den_q = Rational::from_integer(den.clone());
    let mut terms = Vec::new();
    let mut activity = BigInt::zero();
    for (j, a) in &c.terms {
        if a.is_zero() {
            continue;
        }
        let s = (a * &den_q).to_integer();
        let reach = BigInt::from(lower[*j].unsigned_abs().max(upper[*j].unsigned_abs()));
        activity += s.abs() * reach;
        terms.push((*j, to_i128(&s)?));
    }
    if activity > BigInt::from(i128::MAX / 8) {
        return Err(Error::Overflow);
    }
    let end = |e: &Ext, up: bool| -> Result<Option<i128>> {
        match e.finite() {
            None => Ok(None),
            Some(q) => {
                let shifted = (q - &c.constant) * &den_q;
                let v = if up { num::floor(&shifted) } else { num::ceil(&shifted) };
                // clamp far-away bounds into the representable range
                let cap = BigInt::from(i128::MAX / 4);
                Ok(Some(to_i128(&v.clamp(-cap.clone(), cap))?))
            }
        }
    };
    let lo = end(lo, false)?;
    let hi = end(hi, true)?;
    if let (Some(l), Some(h)) = (lo, hi) {
        if l > h {
            return Ok(None);
        }
    }
    Ok(Some(Scaled { terms, lo, hi }))
}

fn div_floor(a: i128, b: i128) -> i128 {
    Integer::div_floor(&a, &b)
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -Integer::div_floor(&-a, &b)
}

fn contribution(a: i128, lo: i64, hi: i64) -> (i128, i128) {
    let (x, y) = (a * lo as i128, a * hi as i128);
    if a > 0 {
        (x, y)
    } else {
        (y, x)
    }
}

/// Tightens bounds in place; false when infeasibility is detected.
fn propagate(cons: &[Scaled], lo: &mut [i64], hi: &mut [i64]) -> bool {
    for _ in 0..PROPAGATION_ROUNDS {
        let mut changed = false;
        for c in cons {
            let (mut min, mut max) = (0i128, 0i128);
            for &(j, a) in &c.terms {
                let (cmin, cmax) = contribution(a, lo[j], hi[j]);
                min += cmin;
                max += cmax;
            }
            if c.lo.is_some_and(|l| max < l) || c.hi.is_some_and(|h| min > h) {
                return false;
            }
            for &(j, a) in &c.terms {
                let (cmin, cmax) = contribution(a, lo[j], hi[j]);
                let (mut new_lo, mut new_hi) = (lo[j] as i128, hi[j] as i128);
                if let Some(h) = c.hi {
                    // a * x_j <= h - (min - cmin)
                    let bound = h - (min - cmin);
                    if a > 0 {
                        new_hi = new_hi.min(div_floor(bound, a));
                    } else {
                        new_lo = new_lo.max(div_ceil(bound, a));
                    }
                }
                if let Some(l) = c.lo {
                    // a * x_j >= l - (max - cmax)
                    let bound = l - (max - cmax);
                    if a > 0 {
                        new_lo = new_lo.max(div_ceil(bound, a));
                    } else {
                        new_hi = new_hi.min(div_floor(bound, a));
                    }
                }
                if new_lo > new_hi {
                    return false;
                }
                if new_lo != lo[j] as i128 || new_hi != hi[j] as i128 {
                    lo[j] = new_lo as i64;
                    hi[j] = new_hi as i64;
                    let (nmin, nmax) = contribution(a, lo[j], hi[j]);
                    min += nmin - cmin;
                    max += nmax - cmax;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    cons.iter().all(|c| congruent(c, lo, hi))
}

/// The free part of the sum is a multiple of the gcd of free coefficients,
/// so some value `fixed + m * g` must fall inside the bounds.
fn congruent(c: &Scaled, lo: &[i64], hi: &[i64]) -> bool {
    let (mut g, mut fixed, mut min, mut max) = (0i128, 0i128, 0i128, 0i128);
    for &(j, a) in &c.terms {
        if lo[j] == hi[j] {
            fixed += a * lo[j] as i128;
        } else {
            g = g.gcd(&a);
            let (cmin, cmax) = contribution(a, lo[j], hi[j]);
            min += cmin;
            max += cmax;
        }
    }
    if g <= 1 {
        return true;
    }
    let from = c.lo.map_or(fixed + min, |l| l.max(fixed + min));
    let to = c.hi.map_or(fixed + max, |h| h.min(fixed + max));
    let first = from + (fixed - from).rem_euclid(g);
    first <= to
}

/// Node state with fixed variables folded into per-constraint sums. Equal
/// keys describe the same remaining subproblem.
fn node_key(cons: &[Scaled], lo: &[i64], hi: &[i64]) -> Vec<i64> {
    let mut key = Vec::with_capacity(2 * lo.len() + 2 * cons.len());
    for (l, h) in lo.iter().zip(hi) {
        if l == h {
            key.extend([i64::MIN, i64::MIN]);
        } else {
            key.extend([*l, *h]);
        }
    }
    for c in cons {
        let fixed: i128 = c
            .terms
            .iter()
            .filter(|&&(j, _)| lo[j] == hi[j])
            .map(|&(j, a)| a * lo[j] as i128)
            .sum();
        key.extend([(fixed >> 64) as i64, fixed as i64]);
    }
    key
}

impl FeasibilitySolver for BranchAndBound {
    fn solve(&self, program: &IntegerProgram) -> Result<Option<Vec<i64>>> {
        let nvars = program.num_variables();
        let (lower, mut upper) = (program.lower.clone(), program.upper.clone());
        if lower.iter().zip(&upper).any(|(l, h)| l > h) {
            return Ok(None);
        }
        let mut cons = Vec::with_capacity(program.constraints.len());
        for c in &program.constraints {
            match scale(c, &lower, &upper)? {
                Some(s) => cons.push(s),
                None => return Ok(None),
            }
        }
        // variables absent from every constraint are fixed at their lower bound
        let mut used = vec![false; nvars];
        for c in &cons {
            for &(j, _) in &c.terms {
                used[j] = true;
            }
        }
        for j in 0..nvars {
            if !used[j] {
                upper[j] = lower[j];
            }
        }

        // Every expanded node that is not an ancestor of the current one has
        // had its subtree searched without success.
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let mut seen_words = 0usize;
        let mut stack = vec![(lower, upper)];
        let mut nodes = 0u64;
        while let Some((mut lo, mut hi)) = stack.pop() {
            nodes += 1;
            if nodes > self.node_limit {
                return Err(Error::SearchLimitExceeded {
                    nodes: self.node_limit,
                });
            }
            if !propagate(&cons, &mut lo, &mut hi) {
                continue;
            }
            let mut branch = None;
            let mut widest = 0i128;
            for j in 0..nvars {
                let w = hi[j] as i128 - lo[j] as i128;
                if w > widest {
                    widest = w;
                    branch = Some(j);
                }
            }
            let Some(j) = branch else {
                debug_assert!(program.is_satisfied_by(&lo));
                return Ok(Some(lo));
            };
            let key = node_key(&cons, &lo, &hi);
            if seen.contains(&key) {
                continue;
            }
            if seen_words + key.len() <= SEEN_WORDS {
                seen_words += key.len();
                seen.insert(key);
            }
            let mid = lo[j] + ((hi[j] as i128 - lo[j] as i128) / 2) as i64;
            let (mut up_lo, up_hi) = (lo.clone(), hi.clone());
            up_lo[j] = mid + 1;
            let mut low_hi = hi;
            low_hi[j] = mid;
            stack.push((up_lo, up_hi));
            stack.push((lo, low_hi));
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, ratio};
    use proptest::prelude::*;

    fn constraint(terms: &[(usize, Rational)], lo: Rational, hi: Rational) -> LinearConstraint {
        LinearConstraint {
            terms: terms.to_vec(),
            constant: Rational::zero(),
            bounds: RationalInterval::new(lo, hi),
        }
    }

    #[test]
    fn mean_sensitivity_example() {
        // (tp1/2 + tp2/2) / 2 in [0.74, 0.76]
        let mut prog = IntegerProgram::default();
        let a = prog.add_variable(0, 2);
        let b = prog.add_variable(0, 2);
        prog.constraints.push(constraint(&[(a, ratio(1, 4)), (b, ratio(1, 4))], ratio(74, 100), ratio(76, 100)));
        let x = BranchAndBound::default().solve(&prog).unwrap().unwrap();
        assert_eq!(x.iter().sum::<i64>(), 3);
        prog.constraints[0].bounds = RationalInterval::new(ratio(29, 100), ratio(31, 100));
        assert_eq!(BranchAndBound::default().solve(&prog).unwrap(), None);
    }

    #[test]
    fn equality_and_parity() {
        // 2x + 2y = 7 has no integer solution
        let mut prog = IntegerProgram::default();
        let x = prog.add_variable(-10, 10);
        let y = prog.add_variable(-10, 10);
        prog.constraints.push(constraint(&[(x, int(2)), (y, int(2))], int(7), int(7)));
        assert_eq!(BranchAndBound::default().solve(&prog).unwrap(), None);
        prog.constraints[0].bounds = RationalInterval::new(int(8), int(8));
        let sol = BranchAndBound::default().solve(&prog).unwrap().unwrap();
        assert_eq!(2 * sol[0] + 2 * sol[1], 8);
    }

    #[test]
    fn node_limit() {
        // feasible, but fixing both variables takes about 40 bisections
        let mut prog = IntegerProgram::default();
        let x = prog.add_variable(0, 1 << 20);
        let y = prog.add_variable(0, 1 << 20);
        prog.constraints.push(constraint(&[(x, int(1)), (y, int(1))], int(1), int(1 << 20)));
        let solver = BranchAndBound { node_limit: 10 };
        assert!(matches!(solver.solve(&prog), Err(Error::SearchLimitExceeded { nodes: 10 })));
        assert!(BranchAndBound::default().solve(&prog).unwrap().is_some());
    }

    #[test]
    fn congruence_refutes_thin_bands() {
        // 3x - 3y in [1, 2]: no multiple of 3 in range
        let mut prog = IntegerProgram::default();
        let x = prog.add_variable(0, 1 << 20);
        let y = prog.add_variable(0, 1 << 20);
        prog.constraints.push(constraint(&[(x, int(3)), (y, int(-3))], int(1), int(2)));
        let solver = BranchAndBound { node_limit: 1 };
        assert_eq!(solver.solve(&prog).unwrap(), None);
    }

    #[test]
    fn unconstrained_variables_fixed_low() {
        let mut prog = IntegerProgram::default();
        prog.add_variable(3, 9);
        let y = prog.add_variable(0, 5);
        prog.constraints.push(constraint(&[(y, int(1))], int(4), int(4)));
        assert_eq!(BranchAndBound::default().solve(&prog).unwrap(), Some(vec![3, 4]));
    }

    fn brute(prog: &IntegerProgram) -> bool {
        fn rec(prog: &IntegerProgram, x: &mut Vec<i64>) -> bool {
            let j = x.len();
            if j == prog.num_variables() {
                return prog.is_satisfied_by(x);
            }
            for v in prog.lower[j]..=prog.upper[j] {
                x.push(v);
                if rec(prog, x) {
                    return true;
                }
                x.pop();
            }
            false
        }
        rec(prog, &mut Vec::new())
    }

    proptest! {
        #[test]
        fn agrees_with_enumeration(
            bounds in prop::collection::vec((-3i64..3, 0i64..4), 1..4),
            cons in prop::collection::vec(
                (prop::collection::vec((-4i64..5, 1i64..4), 4), -6i64..6, 0i64..5, 1i64..4, -3i64..3),
                1..3),
        ) {
            let mut prog = IntegerProgram::default();
            for (lo, w) in &bounds {
                prog.add_variable(*lo, lo + w);
            }
            let nv = prog.num_variables();
            for (coefs, lo, width, den, constant) in cons {
                let terms = coefs.iter().take(nv).enumerate().map(|(j, (a, d))| (j, ratio(*a, *d))).collect::<Vec<_>>();
                let lo = ratio(lo, den);
                let hi = &lo + ratio(width, den);
                prog.constraints.push(LinearConstraint { terms, constant: int(constant), bounds: RationalInterval::new(lo, hi) });
            }
            let got = BranchAndBound::default().solve(&prog).unwrap();
            if let Some(x) = &got {
                prop_assert!(prog.is_satisfied_by(x));
            }
            prop_assert_eq!(got.is_some(), brute(&prog));
        }
    }
}
