//! Optimal menus of randomized payment schemes.
//!
//! Randomizing over payment schemes can beat every deterministic menu by a
//! factor growing linearly in the number of types. The quadratic program
//! over (distribution, payment) pairs becomes linear in the variables
//! `x[t][a][w] = phi[t][a] * p[t][a][w]`; its optimum is recovered as an
//! actual menu by dividing back, which is possible once the solution is
//! *regular* — no payment mass on actions a type never induces. Irregular
//! optima do occur, so [`regularize`] moves the stray mass onto a supported
//! action as a constant per-outcome addition, preserving every constraint
//! and each type's expected payment exactly.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::instance::{parse_doc, parse_field_vec, DelegationInstance, SCHEMA_VERSION};
use crate::rational::{format_rat, format_rat_vec, Rat};
use crate::solvers::{solve_lp, LinearProgram, Relation};
use crate::Result;

/// A feasible point of the linearized program: per-type distributions over
/// actions (plus opt-out mass) and the products `x = phi * payment`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelaxedSolution {
    /// `phi[t][a]`: probability type `t`'s scheme plays action `a`.
    pub phi: Vec<Vec<Rat>>,
    /// Per-type probability of opting out.
    pub opt_out: Vec<Rat>,
    /// `x[t][a][w]`: distribution-weighted payment on outcome `w`.
    pub x: Vec<Vec<Vec<Rat>>>,
    pub value: Rat,
}

impl RelaxedSolution {
    /// No payment mass sits on an action the type's distribution never
    /// plays; only regular solutions divide back into menus.
    pub fn is_regular(&self) -> bool {
        self.phi.iter().zip(&self.x).all(|(phi_t, x_t)| {
            phi_t
                .iter()
                .zip(x_t)
                .all(|(p, row)| p.is_positive() || row.iter().all(|v| v.is_zero()))
        })
    }

    /// Expected payment of type `t`: sum of `F_a(w) * x[t][a][w]`.
    pub fn expected_payment(&self, inst: &DelegationInstance, t: usize) -> Rat {
        let mut total = Rat::zero();
        for (a, row) in self.x[t].iter().enumerate() {
            for (w, v) in row.iter().enumerate() {
                total = &total + &(&inst.outcome_dists[a][w] * v);
            }
        }
        total
    }

    fn surplus(&self, inst: &DelegationInstance, t: usize, reported: usize) -> Rat {
        let mut u = Rat::zero();
        for a in 0..inst.num_actions() {
            u = &u + &(&self.phi[reported][a] * &inst.expected_value(t, a));
        }
        &u - &self.expected_payment(inst, reported)
    }

    /// Largest violation across all constraint families (zero when
    /// feasible): normalization, nonnegativity, provider incentives, user
    /// incentives, participation.
    pub fn max_violation(&self, inst: &DelegationInstance) -> Rat {
        let n = inst.num_types();
        let l = inst.num_actions();
        let m = inst.num_outcomes();
        let mut worst = Rat::zero();
        let mut bump = |v: Rat| {
            if v > worst {
                worst = v;
            }
        };
        for t in 0..n {
            let mut mass = self.opt_out[t].clone();
            bump(-self.opt_out[t].clone());
            for a in 0..l {
                mass = &mass + &self.phi[t][a];
                bump(-self.phi[t][a].clone());
                for w in 0..m {
                    bump(-self.x[t][a][w].clone());
                }
            }
            let gap = &mass - &Rat::one();
            bump(gap.clone());
            bump(-gap);
        }
        for t in 0..n {
            for a in 0..l {
                let own = &dot_outcomes(&inst.outcome_dists[a], &self.x[t][a])
                    - &(&self.phi[t][a] * &inst.costs[a]);
                for dev in 0..l {
                    let other = &dot_outcomes(&inst.outcome_dists[dev], &self.x[t][a])
                        - &(&self.phi[t][a] * &inst.costs[dev]);
                    bump(&other - &own);
                }
            }
        }
        for t in 0..n {
            let own = self.surplus(inst, t, t);
            bump(-own.clone());
            for reported in 0..n {
                bump(&self.surplus(inst, t, reported) - &own);
            }
        }
        worst
    }
}

fn dot_outcomes(f: &[Rat], x: &[Rat]) -> Rat {
    f.iter()
        .zip(x)
        .fold(Rat::zero(), |acc, (fw, xw)| &acc + &(fw * xw))
}

fn objective_value(inst: &DelegationInstance, phi: &[Vec<Rat>], x: &[Vec<Vec<Rat>>]) -> Rat {
    let mut total = Rat::zero();
    for t in 0..inst.num_types() {
        for a in 0..inst.num_actions() {
            let margin =
                &dot_outcomes(&inst.outcome_dists[a], &x[t][a]) - &(&phi[t][a] * &inst.costs[a]);
            total = &total + &(&inst.type_dist[t] * &margin);
        }
    }
    total
}

/// A `>= rhs` row over nonnegative variables that can never bind.
fn trivially_satisfied(coeffs: &[Rat], rhs: &Rat) -> bool {
    !rhs.is_positive() && coeffs.iter().all(|c| !c.is_negative())
}

/// Solves the linearized menu program exactly.
///
/// Variables are per-type action distributions and payment masses `x`; `x`
/// variables exist only on each action's outcome support (off-support mass
/// helps nothing and is fixed to zero). Always feasible — everyone opting
/// out is a solution of value zero.
pub fn solve_randomized_lp(inst: &DelegationInstance) -> Result<RelaxedSolution> {
    let n = inst.num_types();
    let l = inst.num_actions();
    let m = inst.num_outcomes();
    let phi_var = |t: usize, a: usize| t * (l + 1) + a; // a == l is opt-out
    let mut x_var = vec![vec![vec![None; m]; l]; n];
    let mut nv = n * (l + 1);
    for t in 0..n {
        for a in 0..l {
            for w in 0..m {
                if inst.outcome_dists[a][w].is_positive() {
                    x_var[t][a][w] = Some(nv);
                    nv += 1;
                }
            }
        }
    }

    let mut objective = vec![Rat::zero(); nv];
    for t in 0..n {
        for a in 0..l {
            objective[phi_var(t, a)] = -(&inst.type_dist[t] * &inst.costs[a]);
            for w in 0..m {
                if let Some(v) = x_var[t][a][w] {
                    objective[v] = &inst.type_dist[t] * &inst.outcome_dists[a][w];
                }
            }
        }
    }
    let mut lp = LinearProgram::new(objective);
    let add_ge = |coeffs: Vec<Rat>, rhs: Rat, lp: &mut LinearProgram| {
        if !trivially_satisfied(&coeffs, &rhs) {
            lp.constrain(coeffs, Relation::Ge, rhs);
        }
    };

    for t in 0..n {
        let mut coeffs = vec![Rat::zero(); nv];
        for a in 0..=l {
            coeffs[phi_var(t, a)] = Rat::one();
        }
        lp.constrain(coeffs, Relation::Eq, Rat::one());
    }
    // Provider incentives: inducing `a` with `t`'s payment mass beats any
    // deviation.
    for t in 0..n {
        for a in 0..l {
            for dev in 0..l {
                if dev == a {
                    continue;
                }
                let mut coeffs = vec![Rat::zero(); nv];
                for w in 0..m {
                    if let Some(v) = x_var[t][a][w] {
                        coeffs[v] = &inst.outcome_dists[a][w] - &inst.outcome_dists[dev][w];
                    }
                }
                coeffs[phi_var(t, a)] = &inst.costs[dev] - &inst.costs[a];
                add_ge(coeffs, Rat::zero(), &mut lp);
            }
        }
    }
    // User incentives and participation: truthful surplus beats reporting
    // another type, and is nonnegative.
    let surplus_terms = |t: usize, reported: usize, sign: i8, coeffs: &mut Vec<Rat>| {
        for a in 0..l {
            let v = inst.expected_value(t, a);
            let signed = if sign > 0 { v } else { -v };
            coeffs[phi_var(reported, a)] = &coeffs[phi_var(reported, a)] + &signed;
            for w in 0..m {
                if let Some(var) = x_var[reported][a][w] {
                    let f = &inst.outcome_dists[a][w];
                    coeffs[var] = if sign > 0 {
                        &coeffs[var] - f
                    } else {
                        &coeffs[var] + f
                    };
                }
            }
        }
    };
    for t in 0..n {
        for reported in 0..n {
            if reported == t {
                continue;
            }
            let mut coeffs = vec![Rat::zero(); nv];
            surplus_terms(t, t, 1, &mut coeffs);
            surplus_terms(t, reported, -1, &mut coeffs);
            add_ge(coeffs, Rat::zero(), &mut lp);
        }
        let mut coeffs = vec![Rat::zero(); nv];
        surplus_terms(t, t, 1, &mut coeffs);
        add_ge(coeffs, Rat::zero(), &mut lp);
    }

    let (value, point) = solve_lp(&lp)?.optimal()?;
    let mut phi = vec![vec![Rat::zero(); l]; n];
    let mut opt_out = vec![Rat::zero(); n];
    let mut x = vec![vec![vec![Rat::zero(); m]; l]; n];
    for t in 0..n {
        opt_out[t] = point[phi_var(t, l)].clone();
        for a in 0..l {
            phi[t][a] = point[phi_var(t, a)].clone();
            for w in 0..m {
                if let Some(v) = x_var[t][a][w] {
                    x[t][a][w] = point[v].clone();
                }
            }
        }
    }
    let sol = RelaxedSolution {
        phi,
        opt_out,
        x,
        value,
    };
    debug_assert!(sol.max_violation(inst).is_zero());
    debug_assert_eq!(sol.value, objective_value(inst, &sol.phi, &sol.x));
    Ok(sol)
}

/// Rewrites a feasible solution into a regular one with the same value.
///
/// For each type, payment mass on unplayed actions is removed; its
/// expected-payment total is re-added as a constant to every outcome of the
/// lowest-index action the type does play. Constant addition leaves every
/// constraint difference unchanged (outcome distributions sum to one), so
/// feasibility, the objective, and each type's expected payment are
/// preserved exactly.
pub fn regularize(inst: &DelegationInstance, sol: &RelaxedSolution) -> Result<RelaxedSolution> {
    let worst = sol.max_violation(inst);
    if worst.is_positive() {
        return Err(Error::Precondition(format!(
            "input solution is infeasible: largest constraint violation {worst}"
        )));
    }
    let mut out = sol.clone();
    for t in 0..inst.num_types() {
        let mut moved = Rat::zero();
        let mut any = false;
        for a in 0..inst.num_actions() {
            if out.phi[t][a].is_zero() && out.x[t][a].iter().any(|v| !v.is_zero()) {
                moved = &moved + &dot_outcomes(&inst.outcome_dists[a], &out.x[t][a]);
                out.x[t][a].iter_mut().for_each(|v| *v = Rat::zero());
                any = true;
            }
        }
        if any && moved.is_positive() {
            // Participation forces all payment mass to zero when the type
            // always opts out, so a played action exists here.
            let target = (0..inst.num_actions())
                .find(|&a| out.phi[t][a].is_positive())
                .expect("positive moved mass implies a played action");
            out.x[t][target]
                .iter_mut()
                .for_each(|v| *v = &*v + &moved);
        }
    }
    debug_assert!(out.is_regular());
    debug_assert!(out.max_violation(inst).is_zero());
    debug_assert_eq!(objective_value(inst, &out.phi, &out.x), sol.value);
    Ok(out)
}

/// A menu of randomized payment schemes: type `t`'s scheme plays action
/// `a` with probability `phi[t][a]` (opting out with probability
/// `opt_out[t]`) and then pays by `payments[t][a]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomizedMenu {
    pub phi: Vec<Vec<Rat>>,
    pub opt_out: Vec<Rat>,
    /// `payments[t][a][w]`: payment on outcome `w` when `t`'s scheme drew
    /// action `a`.
    pub payments: Vec<Vec<Vec<Rat>>>,
}

impl RandomizedMenu {
    pub fn validate(&self, inst: &DelegationInstance) -> Result<()> {
        let n = inst.num_types();
        let l = inst.num_actions();
        let m = inst.num_outcomes();
        if self.phi.len() != n || self.opt_out.len() != n || self.payments.len() != n {
            return Err(Error::Invalid(
                "randomized menu: wrong number of types".into(),
            ));
        }
        for t in 0..n {
            if self.phi[t].len() != l || self.payments[t].len() != l {
                return Err(Error::Invalid(format!(
                    "randomized menu: type {t} has wrong number of actions"
                )));
            }
            let mut mass = self.opt_out[t].clone();
            if self.opt_out[t].is_negative() {
                return Err(Error::Invalid(format!(
                    "randomized menu: type {t} has negative opt-out mass"
                )));
            }
            for a in 0..l {
                if self.phi[t][a].is_negative() {
                    return Err(Error::Invalid(format!(
                        "randomized menu: phi[{t}][{a}] is negative"
                    )));
                }
                mass = &mass + &self.phi[t][a];
                if self.payments[t][a].len() != m {
                    return Err(Error::Invalid(format!(
                        "randomized menu: payments[{t}][{a}] has wrong length"
                    )));
                }
                if self.payments[t][a].iter().any(|p| p.is_negative()) {
                    return Err(Error::Invalid(format!(
                        "randomized menu: payments[{t}][{a}] has a negative entry"
                    )));
                }
            }
            if !mass.is_one() {
                return Err(Error::Invalid(format!(
                    "randomized menu: type {t}'s distribution sums to {mass}, not 1"
                )));
            }
        }
        Ok(())
    }

    /// Expected provider utility under truthful selection.
    pub fn value(&self, inst: &DelegationInstance) -> Rat {
        let mut total = Rat::zero();
        for t in 0..inst.num_types() {
            for a in 0..inst.num_actions() {
                let margin = &dot_outcomes(&inst.outcome_dists[a], &self.payments[t][a])
                    - &inst.costs[a];
                total = &total + &(&inst.type_dist[t] * &(&self.phi[t][a] * &margin));
            }
        }
        total
    }

    pub fn to_json_string(&self, inst: &DelegationInstance) -> String {
        let doc = RandomizedMenuJson {
            version: SCHEMA_VERSION,
            kind: "randomized".to_string(),
            types: (0..inst.num_types())
                .map(|t| RandTypeJson {
                    type_id: inst.types[t].clone(),
                    opt_out: format_rat(&self.opt_out[t]),
                    schemes: (0..inst.num_actions())
                        .map(|a| RandSchemeJson {
                            action: inst.actions[a].clone(),
                            phi: format_rat(&self.phi[t][a]),
                            payments: format_rat_vec(&self.payments[t][a]),
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("menu serialization cannot fail")
    }

    pub fn from_json_str(text: &str, inst: &DelegationInstance) -> Result<Self> {
        let doc: RandomizedMenuJson = parse_doc(text)?;
        if doc.version != SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                expected: SCHEMA_VERSION,
                found: doc.version,
            });
        }
        if doc.kind != "randomized" {
            return Err(Error::json(
                "kind",
                format!("expected \"randomized\", found {:?}", doc.kind),
            ));
        }
        let n = inst.num_types();
        let l = inst.num_actions();
        let m = inst.num_outcomes();
        if doc.types.len() != n {
            return Err(Error::json(
                "types",
                format!("expected {n} entries, found {}", doc.types.len()),
            ));
        }
        let mut menu = RandomizedMenu {
            phi: vec![vec![Rat::zero(); l]; n],
            opt_out: vec![Rat::zero(); n],
            payments: vec![vec![vec![Rat::zero(); m]; l]; n],
        };
        let mut seen_type = vec![false; n];
        for entry in &doc.types {
            let t = inst.type_index(&entry.type_id)?;
            if seen_type[t] {
                return Err(Error::json(
                    "types",
                    format!("duplicate entry for type {:?}", entry.type_id),
                ));
            }
            seen_type[t] = true;
            menu.opt_out[t] =
                parse_field_vec(&format!("types[{t}].opt_out"), std::slice::from_ref(&entry.opt_out))?
                    .pop()
                    .expect("one element");
            let mut seen_action = vec![false; l];
            for scheme in &entry.schemes {
                let a = inst.action_index(&scheme.action)?;
                if seen_action[a] {
                    return Err(Error::json(
                        "schemes",
                        format!("duplicate scheme for action {:?}", scheme.action),
                    ));
                }
                seen_action[a] = true;
                menu.phi[t][a] =
                    parse_field_vec(&format!("types[{t}].schemes.phi"), std::slice::from_ref(&scheme.phi))?
                        .pop()
                        .expect("one element");
                menu.payments[t][a] = parse_field_vec(
                    &format!("types[{t}].schemes.payments"),
                    &scheme.payments,
                )?;
            }
        }
        menu.validate(inst)?;
        Ok(menu)
    }
}

#[derive(Serialize, Deserialize)]
struct RandomizedMenuJson {
    version: u32,
    kind: String,
    types: Vec<RandTypeJson>,
}

#[derive(Serialize, Deserialize)]
struct RandTypeJson {
    #[serde(rename = "type")]
    type_id: String,
    opt_out: String,
    schemes: Vec<RandSchemeJson>,
}

#[derive(Serialize, Deserialize)]
struct RandSchemeJson {
    action: String,
    phi: String,
    payments: Vec<String>,
}

/// Divides the payment mass back out of a regular solution:
/// `p = x / phi` where `phi > 0`, zero elsewhere. The menu's value equals
/// the solution's.
pub fn recover_menu(inst: &DelegationInstance, sol: &RelaxedSolution) -> Result<RandomizedMenu> {
    if !sol.is_regular() {
        return Err(Error::Precondition(
            "cannot recover a menu from an irregular solution (payment mass on an unplayed action)"
                .into(),
        ));
    }
    let menu = RandomizedMenu {
        phi: sol.phi.clone(),
        opt_out: sol.opt_out.clone(),
        payments: sol
            .x
            .iter()
            .zip(&sol.phi)
            .map(|(x_t, phi_t)| {
                x_t.iter()
                    .zip(phi_t)
                    .map(|(row, p)| {
                        if p.is_positive() {
                            row.iter().map(|v| v / p).collect()
                        } else {
                            vec![Rat::zero(); inst.num_outcomes()]
                        }
                    })
                    .collect()
            })
            .collect(),
    };
    debug_assert_eq!(menu.value(inst), sol.value);
    Ok(menu)
}

/// Exact verification of a randomized menu: worst violation in each
/// constraint family and the menu's value.
#[derive(Debug, Clone)]
pub struct RandVerifyReport {
    pub provider_ic_slack: Rat,
    pub user_ic_slack: Rat,
    pub user_ir_slack: Rat,
    pub value: Rat,
    pub ok: bool,
}

pub fn verify_randomized(inst: &DelegationInstance, menu: &RandomizedMenu) -> RandVerifyReport {
    let n = inst.num_types();
    let l = inst.num_actions();
    let mut provider_ic_slack = Rat::zero();
    for t in 0..n {
        for a in 0..l {
            let own = &dot_outcomes(&inst.outcome_dists[a], &menu.payments[t][a]) - &inst.costs[a];
            for dev in 0..l {
                let other = &dot_outcomes(&inst.outcome_dists[dev], &menu.payments[t][a])
                    - &inst.costs[dev];
                let gap = &menu.phi[t][a] * &(&other - &own);
                if gap > provider_ic_slack {
                    provider_ic_slack = gap;
                }
            }
        }
    }
    let surplus = |t: usize, reported: usize| -> Rat {
        let mut u = Rat::zero();
        for a in 0..l {
            let net = &inst.expected_value(t, a)
                - &dot_outcomes(&inst.outcome_dists[a], &menu.payments[reported][a]);
            u = &u + &(&menu.phi[reported][a] * &net);
        }
        u
    };
    let mut user_ic_slack = Rat::zero();
    let mut user_ir_slack = Rat::zero();
    for t in 0..n {
        let own = surplus(t, t);
        for reported in 0..n {
            let gap = &surplus(t, reported) - &own;
            if gap > user_ic_slack {
                user_ic_slack = gap;
            }
        }
        let shortfall = -own;
        if shortfall > user_ir_slack {
            user_ir_slack = shortfall;
        }
    }
    let value = menu.value(inst);
    let ok =
        provider_ic_slack.is_zero() && user_ic_slack.is_zero() && user_ir_slack.is_zero();
    RandVerifyReport {
        provider_ic_slack,
        user_ic_slack,
        user_ir_slack,
        value,
        ok,
    }
}
