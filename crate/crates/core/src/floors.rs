//! Feasible expected-payment sets per action and payment reconstruction.
//!
//! For an action `a` and relaxation `eps`, the set of expected payments the
//! provider can be incentivized (up to `eps`) to accept while playing `a` is
//! an upward-closed interval `[floor, +inf)`. The floor is computed by an
//! exact LP. `reconstruct_payment` inverts an expected payment back into a
//! concrete payment vector, canonicalized by minimizing its sup norm.

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::instance::DelegationInstance;
use crate::rational::{format_rat, Rat};
use crate::solvers::{solve_lp, LinearProgram, LpOutcome, Relation};
use crate::Result;

/// The exact lower end of a relaxed expected-payment set.
///
/// `floor == None` means the set is empty: no payment vector makes the
/// provider (eps-approximately) prefer `action` over every deviation in
/// `action_set`. This happens only for dominated actions, e.g. an action
/// sharing its outcome distribution with a strictly cheaper one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriceFloor {
    pub action: usize,
    pub epsilon: Rat,
    /// Deviation set as action indices; `None` means all actions.
    pub action_set: Option<Vec<usize>>,
    pub floor: Option<Rat>,
}

fn check_eps(eps: &Rat) -> Result<()> {
    if eps.is_negative() {
        return Err(Error::Precondition(format!(
            "relaxation level {} is negative",
            format_rat(eps)
        )));
    }
    Ok(())
}

/// Computes the floor of `Q_a^eps(action_set)` exactly.
pub fn compute_floor(
    inst: &DelegationInstance,
    action: usize,
    eps: &Rat,
    action_set: Option<&[usize]>,
) -> Result<PriceFloor> {
    check_eps(eps)?;
    if action >= inst.num_actions() {
        return Err(Error::Precondition(format!(
            "action index {action} out of range"
        )));
    }
    if let Some(set) = action_set {
        if let Some(&bad) = set.iter().find(|&&a| a >= inst.num_actions()) {
            return Err(Error::Precondition(format!(
                "action set entry {bad} out of range"
            )));
        }
        if !set.contains(&action) {
            return Err(Error::Precondition(format!(
                "action {:?} not contained in its deviation set",
                inst.actions[action]
            )));
        }
    }
    let deviations: Vec<usize> = match action_set {
        Some(set) => set.iter().copied().filter(|&a| a != action).collect(),
        None => (0..inst.num_actions()).filter(|&a| a != action).collect(),
    };
    let result = PriceFloor {
        action,
        epsilon: eps.clone(),
        action_set: action_set.map(|s| s.to_vec()),
        floor: None,
    };
    if deviations.is_empty() {
        return Ok(PriceFloor {
            floor: Some(Rat::zero()),
            ..result
        });
    }

    let m = inst.num_outcomes();
    let fa = &inst.outcome_dists[action];
    let mut lp = LinearProgram::new(fa.iter().map(|x| -x.clone()).collect());
    for &dev in &deviations {
        let coeffs: Vec<Rat> = (0..m)
            .map(|w| &fa[w] - &inst.outcome_dists[dev][w])
            .collect();
        let rhs = &(&inst.costs[action] - &inst.costs[dev]) - eps;
        lp.constrain(coeffs, Relation::Ge, rhs);
    }
    match solve_lp(&lp)? {
        LpOutcome::Optimal { value, .. } => Ok(PriceFloor {
            floor: Some(-value),
            ..result
        }),
        LpOutcome::Infeasible => Ok(result),
        LpOutcome::Unbounded => Err(Error::UnexpectedUnbounded),
    }
}

/// All floors of an instance at a fixed relaxation level and deviation set.
/// Computed eagerly once so solvers can look floors up without re-running
/// LPs; the table is immutable afterwards and safe to share across threads.
#[derive(Debug, Clone)]
pub struct FloorTable {
    pub epsilon: Rat,
    pub action_set: Option<Vec<usize>>,
    pub floors: Vec<Option<Rat>>,
}

impl FloorTable {
    pub fn new(
        inst: &DelegationInstance,
        eps: &Rat,
        action_set: Option<&[usize]>,
    ) -> Result<Self> {
        let mut floors = vec![None; inst.num_actions()];
        let in_set = |a: usize| action_set.is_none_or(|s| s.contains(&a));
        for a in 0..inst.num_actions() {
            if in_set(a) {
                floors[a] = compute_floor(inst, a, eps, action_set)?.floor;
            }
        }
        Ok(FloorTable {
            epsilon: eps.clone(),
            action_set: action_set.map(|s| s.to_vec()),
            floors,
        })
    }

    pub fn floor(&self, action: usize) -> Option<&Rat> {
        self.floors[action].as_ref()
    }
}

/// Recovers a concrete payment vector with expected payment exactly `q`
/// under action `a`, eps-incentive-compatible against all deviations.
/// Canonicalized lexicographically: minimal sup norm first, then minimal
/// total payment among sup-norm minimizers.
pub fn reconstruct_payment(
    inst: &DelegationInstance,
    action: usize,
    q: &Rat,
    eps: &Rat,
) -> Result<Vec<Rat>> {
    check_eps(eps)?;
    if q.is_negative() {
        return Err(Error::Precondition(format!(
            "expected payment {} is negative",
            format_rat(q)
        )));
    }
    let m = inst.num_outcomes();
    let fa = &inst.outcome_dists[action];
    let ic_rows: Vec<(Vec<Rat>, Rat)> = (0..inst.num_actions())
        .filter(|&dev| dev != action)
        .map(|dev| {
            let coeffs: Vec<Rat> = (0..m)
                .map(|w| &fa[w] - &inst.outcome_dists[dev][w])
                .collect();
            let rhs = &(&inst.costs[action] - &inst.costs[dev]) - eps;
            (coeffs, rhs)
        })
        .collect();

    // Stage 1: find the minimal sup norm t*. Variables: p_0..p_{m-1}, t.
    let mut obj = vec![Rat::zero(); m + 1];
    obj[m] = -Rat::one();
    let mut lp = LinearProgram::new(obj);
    let mut eq = fa.clone();
    eq.push(Rat::zero());
    lp.constrain(eq, Relation::Eq, q.clone());
    for (coeffs, rhs) in &ic_rows {
        let mut coeffs = coeffs.clone();
        coeffs.push(Rat::zero());
        lp.constrain(coeffs, Relation::Ge, rhs.clone());
    }
    for w in 0..m {
        let mut coeffs = vec![Rat::zero(); m + 1];
        coeffs[w] = Rat::one();
        coeffs[m] = -Rat::one();
        lp.constrain(coeffs, Relation::Le, Rat::zero());
    }
    let bound = match solve_lp(&lp)? {
        LpOutcome::Optimal { value, .. } => -value,
        LpOutcome::Infeasible => {
            return Err(Error::InfeasibleProgram(format!(
                "expected payment {} lies below the floor of action {:?} at eps {}",
                format_rat(q),
                inst.actions[action],
                format_rat(eps)
            )))
        }
        LpOutcome::Unbounded => return Err(Error::UnexpectedUnbounded),
    };

    // Stage 2: fix the norm bound and minimize the total payment.
    let mut lp = LinearProgram::new(vec![-Rat::one(); m]);
    lp.constrain(fa.clone(), Relation::Eq, q.clone());
    for (coeffs, rhs) in ic_rows {
        lp.constrain(coeffs, Relation::Ge, rhs);
    }
    for w in 0..m {
        let mut coeffs = vec![Rat::zero(); m];
        coeffs[w] = Rat::one();
        lp.constrain(coeffs, Relation::Le, bound.clone());
    }
    let (_, point) = solve_lp(&lp)?.optimal()?;
    Ok(point)
}

/// Checks that shifting an achievable expected payment down by `eps_shift`
/// stays achievable once the relaxation is widened by the same amount.
pub fn check_q_shift(
    inst: &DelegationInstance,
    action: usize,
    q: &Rat,
    eps: &Rat,
    eps_shift: &Rat,
) -> Result<bool> {
    check_eps(eps)?;
    if eps_shift.is_negative() || eps_shift > q {
        return Err(Error::Precondition(format!(
            "shift {} outside [0, q] for q = {}",
            format_rat(eps_shift),
            format_rat(q)
        )));
    }
    let base = compute_floor(inst, action, eps, None)?;
    match base.floor {
        Some(floor) if *q >= floor => {}
        _ => {
            return Err(Error::Precondition(format!(
                "q = {} is not an achievable expected payment for action {:?} at eps {}",
                format_rat(q),
                inst.actions[action],
                format_rat(eps)
            )))
        }
    }
    let shifted = compute_floor(inst, action, &(eps + eps_shift), None)?;
    let Some(shifted_floor) = shifted.floor else {
        return Ok(false);
    };
    Ok((q - eps_shift) >= shifted_floor)
}
