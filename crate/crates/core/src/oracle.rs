//! Brute-force reference optimizer and exact menu verifier.
//!
//! The optimizer enumerates who-buys-what outright: every action multiset of
//! size `k` paired with every assignment of types to slots (or to opting
//! out), solving one small LP per pair for the best prices consistent with
//! that assignment. It shares no search logic with the vertex-enumeration
//! solver, so agreement between the two is a meaningful cross-check. A
//! second LP pass per pair pushes unassigned types strictly off their
//! indifference boundaries whenever the optimal face allows it, so boundary
//! ties cannot hide the optimum; every candidate is then re-scored under the
//! exact selection rule, keeping reported values sound.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::Error;
use crate::floors::FloorTable;
use crate::instance::{DelegationInstance, DeterministicMenu, MenuKind};
use crate::pricing::{evaluate, selection, PricingItem, PricingSolution, SelectionEntry};
use crate::rational::Rat;
use crate::solvers::{solve_lp, LinearProgram, LpOutcome, Relation};
use crate::Result;

/// Upper bound on the number of (action multiset, assignment) pairs a
/// single oracle run may enumerate.
pub const MAX_ORACLE_PAIRS: u128 = 1_000_000;

/// The optimal menu found by enumeration: item actions (`None` = opt-out
/// item), the induced assignment of types to items, and the item prices.
#[derive(Debug, Clone)]
pub struct OracleWitness {
    pub actions: Vec<Option<usize>>,
    pub assignment: Vec<Option<usize>>,
    pub prices: Vec<Rat>,
}

impl OracleWitness {
    /// The witness as a pricing solution.
    pub fn solution(&self) -> PricingSolution {
        PricingSolution::new(
            self.actions
                .iter()
                .zip(&self.prices)
                .map(|(&action, q)| match action {
                    Some(a) => PricingItem::new(a, q.clone()),
                    None => PricingItem::opt_out(),
                })
                .collect(),
        )
    }
}

/// Result of [`brute_force_opt_k`].
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub value: Rat,
    pub witness: OracleWitness,
    pub pairs: u64,
}

struct Candidate {
    value: Rat,
    actions: Vec<Option<usize>>,
    prices: Vec<Rat>,
}

/// Exact optimum over menus of `k` priced items, by exhaustive enumeration.
///
/// Enumerates action multisets (menu value is order-independent) paired
/// with assignments of types to menu slots; when `k >= n` it instead
/// enumerates one action-or-opt-out choice per type, which is equivalent
/// because no menu needs more items than types. Each pair is scored by an
/// LP for the best supporting prices, then re-evaluated under the exact
/// selection rule. The returned witness assignment is the selection the
/// witness prices actually induce.
pub fn brute_force_opt_k(inst: &DelegationInstance, k: usize) -> Result<OracleResult> {
    if k < 1 {
        return Err(Error::Precondition("menu size k must be at least 1".into()));
    }
    let n = inst.num_types();
    let l = inst.num_actions();
    let floors = FloorTable::new(inst, &Rat::zero(), None)?;
    let values: Vec<Vec<Rat>> = (0..n)
        .map(|t| (0..l).map(|a| inst.expected_value(t, a)).collect())
        .collect();

    let (pairs, best) = if k >= n {
        let pairs = checked_pow(l as u128 + 1, n)?;
        guard_pairs("per-type action assignments", pairs)?;
        let best = (0..pairs as u64)
            .into_par_iter()
            .map(|g| solve_direct_pair(inst, k, g, &floors, &values))
            .reduce(|| None, merge_preferring_left);
        (pairs, best)
    } else {
        let sets = multisets(l, k);
        let assignments = checked_pow(k as u128 + 1, n)?;
        let pairs = (sets.len() as u128).saturating_mul(assignments);
        guard_pairs("(action multiset, assignment) pairs", pairs)?;
        let best = sets
            .par_iter()
            .map(|tuple| solve_multiset(inst, tuple, assignments as u64, &floors, &values))
            .reduce(|| None, merge_preferring_left);
        (pairs, best)
    };

    let (value, actions, prices) = match best {
        Some(c) if !c.value.is_negative() => (c.value, c.actions, c.prices),
        _ => (Rat::zero(), vec![None; k], vec![Rat::zero(); k]),
    };
    let witness_sol = PricingSolution::new(
        actions
            .iter()
            .zip(&prices)
            .map(|(&a, q)| match a {
                Some(a) => PricingItem::new(a, q.clone()),
                None => PricingItem::opt_out(),
            })
            .collect(),
    );
    debug_assert_eq!(value, evaluate(inst, &witness_sol));
    let assignment = selection(inst, &witness_sol)
        .into_iter()
        .map(|e| e.item)
        .collect();
    Ok(OracleResult {
        value,
        witness: OracleWitness {
            actions,
            assignment,
            prices,
        },
        pairs: pairs as u64,
    })
}

fn guard_pairs(detail: &str, pairs: u128) -> Result<()> {
    if pairs > MAX_ORACLE_PAIRS {
        return Err(Error::SizeGuard {
            detail: detail.into(),
            estimate: pairs,
            limit: MAX_ORACLE_PAIRS,
        });
    }
    Ok(())
}

fn checked_pow(base: u128, exp: usize) -> Result<u128> {
    let mut out: u128 = 1;
    for _ in 0..exp {
        out = out.checked_mul(base).ok_or(Error::SizeGuard {
            detail: "enumeration count overflows".into(),
            estimate: u128::MAX,
            limit: MAX_ORACLE_PAIRS,
        })?;
    }
    Ok(out)
}

/// Keeps the candidate from the earlier pair on value ties, so parallel
/// merges are deterministic.
fn merge_preferring_left(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (Some(x), Some(y)) => {
            if y.value > x.value {
                Some(y)
            } else {
                Some(x)
            }
        }
        (x, None) => x,
        (None, y) => y,
    }
}

/// All non-decreasing sequences of length `k` over `0..l`, in lexicographic
/// order.
fn multisets(l: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; k];
    'outer: loop {
        out.push(cur.clone());
        for i in (0..k).rev() {
            if cur[i] + 1 < l {
                let v = cur[i] + 1;
                for slot in cur.iter_mut().skip(i) {
                    *slot = v;
                }
                continue 'outer;
            }
        }
        return out;
    }
}

/// Best prices for a fixed item list and assignment, or `None` when the
/// assignment is unsupportable. `item_actions[i]` is the action of slot i;
/// `assigned[t]` the slot of type t. Returns the phase-2 refined prices.
fn solve_pair(
    inst: &DelegationInstance,
    item_actions: &[usize],
    assigned: &[Option<usize>],
    floors: &FloorTable,
    values: &[Vec<Rat>],
) -> Option<Vec<Rat>> {
    let items = item_actions.len();
    let mut obj = vec![Rat::zero(); items];
    for (t, slot) in assigned.iter().enumerate() {
        if let Some(i) = slot {
            obj[*i] = &obj[*i] + &inst.type_dist[t];
        }
    }
    let mut lp = LinearProgram::new(obj.clone());
    let unit = |i: usize, sign: i8| -> Vec<Rat> {
        let mut c = vec![Rat::zero(); items];
        c[i] = if sign > 0 { Rat::one() } else { -Rat::one() };
        c
    };
    for (t, slot) in assigned.iter().enumerate() {
        match slot {
            Some(i) => {
                // The assigned slot is affordable and weakly preferred.
                lp.constrain(unit(*i, 1), Relation::Le, values[t][item_actions[*i]].clone());
                for j in 0..items {
                    if j == *i {
                        continue;
                    }
                    let mut c = vec![Rat::zero(); items];
                    c[*i] = Rat::one();
                    c[j] = -Rat::one();
                    let rhs = &values[t][item_actions[*i]] - &values[t][item_actions[j]];
                    lp.constrain(c, Relation::Le, rhs);
                }
            }
            None => {
                // An opting-out type affords nothing.
                for j in 0..items {
                    lp.constrain(unit(j, 1), Relation::Ge, values[t][item_actions[j]].clone());
                }
            }
        }
    }
    for (i, &a) in item_actions.iter().enumerate() {
        lp.constrain(unit(i, 1), Relation::Ge, floors.floor(a).expect("caller checked").clone());
    }
    let LpOutcome::Optimal { value: v1, point: q1 } = solve_lp(&lp).ok()? else {
        return None;
    };

    let any_unassigned = assigned.iter().any(|s| s.is_none());
    if !any_unassigned || items == 0 {
        return Some(q1);
    }
    // Phase 2: among price vectors attaining v1, push unassigned types as
    // far off their affordability boundaries as possible; a positive slack
    // means no spurious boundary purchases survive in the witness.
    let mut obj2 = vec![Rat::zero(); items + 1];
    obj2[items] = Rat::one();
    let mut lp2 = LinearProgram::new(obj2);
    let extend = |c: &[Rat]| -> Vec<Rat> {
        let mut c = c.to_vec();
        c.push(Rat::zero());
        c
    };
    for con in &lp.constraints {
        lp2.constrain(extend(&con.coeffs), con.rel, con.rhs.clone());
    }
    for (t, slot) in assigned.iter().enumerate() {
        if slot.is_some() {
            continue;
        }
        for j in 0..items {
            let mut c = vec![Rat::zero(); items + 1];
            c[j] = Rat::one();
            c[items] = -Rat::one();
            lp2.constrain(c, Relation::Ge, values[t][item_actions[j]].clone());
        }
    }
    let mut cap = vec![Rat::zero(); items + 1];
    cap[items] = Rat::one();
    lp2.constrain(cap, Relation::Le, Rat::one());
    lp2.constrain(extend(&obj), Relation::Eq, v1);
    match solve_lp(&lp2) {
        Ok(LpOutcome::Optimal { point, .. }) => Some(point[..items].to_vec()),
        _ => Some(q1),
    }
}

fn candidate_from(
    inst: &DelegationInstance,
    actions: Vec<Option<usize>>,
    prices: Vec<Rat>,
) -> Candidate {
    let sol = PricingSolution::new(
        actions
            .iter()
            .zip(&prices)
            .map(|(&a, q)| match a {
                Some(a) => PricingItem::new(a, q.clone()),
                None => PricingItem::opt_out(),
            })
            .collect(),
    );
    Candidate {
        value: evaluate(inst, &sol),
        actions,
        prices,
    }
}

/// One per-type assignment `g` (digit 0 = opt out, d = action d-1) on the
/// `k >= n` path, where every item is some type's item.
fn solve_direct_pair(
    inst: &DelegationInstance,
    k: usize,
    g: u64,
    floors: &FloorTable,
    values: &[Vec<Rat>],
) -> Option<Candidate> {
    let n = inst.num_types();
    let l = inst.num_actions() as u64;
    let mut digits = Vec::with_capacity(n);
    let mut rest = g;
    for _ in 0..n {
        digits.push((rest % (l + 1)) as usize);
        rest /= l + 1;
    }
    let mut item_actions = Vec::new();
    let mut assigned: Vec<Option<usize>> = vec![None; n];
    for (t, &d) in digits.iter().enumerate() {
        if d > 0 {
            let a = d - 1;
            floors.floor(a)?;
            assigned[t] = Some(item_actions.len());
            item_actions.push(a);
        }
    }
    let q = if item_actions.is_empty() {
        Vec::new()
    } else {
        solve_pair(inst, &item_actions, &assigned, floors, values)?
    };
    let mut actions: Vec<Option<usize>> = item_actions.iter().map(|&a| Some(a)).collect();
    let mut prices = q;
    actions.resize(k, None);
    prices.resize(k, Rat::zero());
    Some(candidate_from(inst, actions, prices))
}

/// Best candidate over all assignments for one action multiset.
fn solve_multiset(
    inst: &DelegationInstance,
    tuple: &[usize],
    assignments: u64,
    floors: &FloorTable,
    values: &[Vec<Rat>],
) -> Option<Candidate> {
    let n = inst.num_types();
    let k = tuple.len();
    if tuple.iter().any(|&a| floors.floor(a).is_none()) {
        return None;
    }
    let max_values: Vec<Rat> = tuple
        .iter()
        .map(|&a| {
            (0..n)
                .map(|t| values[t][a].clone())
                .max()
                .expect("at least one type")
        })
        .collect();
    let mut best: Option<Candidate> = None;
    for f in 0..assignments {
        let mut assigned: Vec<Option<usize>> = Vec::with_capacity(n);
        let mut rest = f;
        for _ in 0..n {
            let d = (rest % (k as u64 + 1)) as usize;
            rest /= k as u64 + 1;
            assigned.push(if d == 0 { None } else { Some(d - 1) });
        }
        let Some(mut q) = solve_pair(inst, tuple, &assigned, floors, values) else {
            continue;
        };
        // Price items nobody was assigned strictly above every valuation so
        // they cannot be bought; this never breaks the assigned constraints.
        for i in 0..k {
            if !assigned.contains(&Some(i)) {
                let unreachable_price = &max_values[i] + &Rat::one();
                if q[i] < unreachable_price {
                    q[i] = unreachable_price;
                }
            }
        }
        let cand = candidate_from(inst, tuple.iter().map(|&a| Some(a)).collect(), q);
        best = merge_preferring_left(best, Some(cand));
    }
    best
}

/// One scheme's provider-side check: is its action a best response to its
/// payments? On failure, `better` carries the most profitable deviation.
#[derive(Debug, Clone)]
pub struct SchemeCheck {
    pub scheme: usize,
    pub provider_ok: bool,
    pub better: Option<usize>,
    pub gain: Option<Rat>,
}

/// Exact verification report for a deterministic menu.
#[derive(Debug, Clone)]
pub struct VerifyMenuReport {
    pub scheme_checks: Vec<SchemeCheck>,
    /// Direct menus only: (type, scheme it strictly prefers to its own).
    pub user_ic_violations: Vec<(usize, usize)>,
    /// Direct menus only: types whose own scheme has negative utility.
    pub user_ir_violations: Vec<usize>,
    /// Schemes some type selects whose margin is negative.
    pub provider_ir_violations: Vec<usize>,
    pub selection: Vec<SelectionEntry>,
    pub value: Rat,
    pub ok: bool,
}

/// Checks a menu exactly: provider incentive compatibility per scheme, user
/// incentive compatibility and participation for direct menus, provider
/// participation on selected schemes, and the menu's value under the
/// selection rule.
pub fn verify_menu(inst: &DelegationInstance, menu: &DeterministicMenu) -> VerifyMenuReport {
    let mut scheme_checks = Vec::with_capacity(menu.schemes.len());
    for (s, scheme) in menu.schemes.iter().enumerate() {
        let mut check = SchemeCheck {
            scheme: s,
            provider_ok: true,
            better: None,
            gain: None,
        };
        if let Some(a) = scheme.action {
            let own = &inst.expected_payment(a, &scheme.payments) - &inst.costs[a];
            for dev in (0..inst.num_actions()).filter(|&d| d != a) {
                let gain =
                    &(&inst.expected_payment(dev, &scheme.payments) - &inst.costs[dev]) - &own;
                if gain.is_positive() && check.gain.as_ref().is_none_or(|g| gain > *g) {
                    check.provider_ok = false;
                    check.better = Some(dev);
                    check.gain = Some(gain);
                }
            }
        }
        scheme_checks.push(check);
    }

    let utility = |t: usize, s: usize| -> Rat {
        match menu.schemes[s].action {
            None => Rat::zero(),
            Some(a) => {
                &inst.expected_value(t, a) - &inst.expected_payment(a, &menu.schemes[s].payments)
            }
        }
    };
    let mut user_ic_violations = Vec::new();
    let mut user_ir_violations = Vec::new();
    if menu.kind == MenuKind::Direct {
        for t in 0..inst.num_types() {
            let own = utility(t, t);
            if own.is_negative() {
                user_ir_violations.push(t);
            }
            for s in 0..menu.schemes.len() {
                if s != t && utility(t, s) > own {
                    user_ic_violations.push((t, s));
                }
            }
        }
    }

    let sol = PricingSolution::new(
        menu.schemes
            .iter()
            .map(|scheme| match scheme.action {
                None => PricingItem::opt_out(),
                Some(a) => PricingItem::new(a, inst.expected_payment(a, &scheme.payments)),
            })
            .collect(),
    );
    let selection = selection(inst, &sol);
    let mut provider_ir_violations: Vec<usize> = selection
        .iter()
        .filter(|e| e.item.is_some() && e.margin.is_negative())
        .map(|e| e.item.expect("filtered"))
        .collect();
    provider_ir_violations.sort_unstable();
    provider_ir_violations.dedup();
    let value = evaluate(inst, &sol);
    let ok = scheme_checks.iter().all(|c| c.provider_ok)
        && user_ic_violations.is_empty()
        && user_ir_violations.is_empty()
        && provider_ir_violations.is_empty();
    VerifyMenuReport {
        scheme_checks,
        user_ic_violations,
        user_ir_violations,
        provider_ir_violations,
        selection,
        value,
        ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_random, gen_single_bad, gen_soundness_menu, gen_hardness, GraphSpec};
    use crate::instance::{testutil::diag2, PaymentScheme};
    use crate::pricing::{pricing_to_menu, solve_menu_k, SolveOptions};
    use crate::rational::{int, rat};

    #[test]
    fn diagonal_family_values() {
        let inst = diag2();
        assert_eq!(brute_force_opt_k(&inst, 1).unwrap().value, rat(1, 2));
        assert_eq!(brute_force_opt_k(&inst, 2).unwrap().value, int(1));
        // k beyond min(n, l) adds nothing; this also exercises the k >= n path.
        assert_eq!(brute_force_opt_k(&inst, 3).unwrap().value, int(1));

        let three = gen_single_bad(3).unwrap();
        assert_eq!(brute_force_opt_k(&three, 1).unwrap().value, rat(1, 3));
        assert_eq!(brute_force_opt_k(&three, 2).unwrap().value, rat(2, 3));
        assert_eq!(brute_force_opt_k(&three, 3).unwrap().value, int(1));
    }

    #[test]
    fn witness_is_selection_consistent_and_verifiable() {
        for (inst, k) in [(diag2(), 2), (gen_single_bad(3).unwrap(), 2)] {
            let r = brute_force_opt_k(&inst, k).unwrap();
            let sol = r.witness.solution();
            assert_eq!(evaluate(&inst, &sol), r.value);
            let induced: Vec<Option<usize>> =
                selection(&inst, &sol).into_iter().map(|e| e.item).collect();
            assert_eq!(induced, r.witness.assignment);
            let menu = pricing_to_menu(&inst, &sol, MenuKind::Indirect).unwrap();
            assert!(verify_menu(&inst, &menu).ok);
        }
    }

    #[test]
    fn boundary_ties_resolve_provider_favorably() {
        // Two types value the single zero-cost action at 1 and 1/2. Selling
        // only to the first at q = 1 and to both at q = 1/2 both earn 1/2;
        // the oracle must not lose value to the q = 1/2 boundary tie where
        // the second type is nominally unassigned yet buys.
        let inst = DelegationInstance {
            types: vec!["t1".into(), "t2".into()],
            type_dist: vec![rat(1, 2), rat(1, 2)],
            outcomes: vec!["w1".into()],
            actions: vec!["a1".into()],
            outcome_dists: vec![vec![int(1)]],
            rewards: vec![vec![int(1)], vec![rat(1, 2)]],
            costs: vec![int(0)],
        };
        inst.validate().unwrap();
        let r = brute_force_opt_k(&inst, 1).unwrap();
        assert_eq!(r.value, rat(1, 2));
        let s = solve_menu_k(&inst, 1, &SolveOptions::default()).unwrap();
        assert_eq!(s.value, r.value);
    }

    #[test]
    fn agrees_with_the_solver_on_random_instances() {
        for seed in 0..12 {
            let inst = gen_random(2, 2, 2, seed).unwrap();
            for k in 1..=2 {
                let o = brute_force_opt_k(&inst, k).unwrap();
                let s = solve_menu_k(&inst, k, &SolveOptions::default()).unwrap();
                assert_eq!(o.value, s.value, "seed {seed} k {k}");
            }
        }
    }

    #[test]
    fn oracle_is_monotone_in_k() {
        let inst = gen_random(3, 2, 3, 42).unwrap();
        let v: Vec<Rat> = (1..=4)
            .map(|k| brute_force_opt_k(&inst, k).unwrap().value)
            .collect();
        assert!(v[0] <= v[1] && v[1] <= v[2]);
        // Constant once k reaches min(n, l) = 3.
        assert_eq!(v[2], v[3]);
    }

    #[test]
    fn size_guard_trips() {
        let inst = gen_random(6, 2, 5, 0).unwrap();
        assert!(matches!(
            brute_force_opt_k(&inst, 4),
            Err(Error::SizeGuard { .. })
        ));
    }

    #[test]
    fn verify_accepts_the_diagonal_optimum() {
        let inst = diag2();
        let sol = solve_menu_k(&inst, 2, &SolveOptions::default())
            .unwrap()
            .solution;
        let menu = pricing_to_menu(&inst, &sol, MenuKind::Direct).unwrap();
        let report = verify_menu(&inst, &menu);
        assert!(report.ok);
        assert_eq!(report.value, int(1));
        assert!(report.scheme_checks.iter().all(|c| c.provider_ok));
    }

    #[test]
    fn verify_flags_below_floor_payments() {
        // Action 1 costs 1/2 but pays 2/5 on its own outcome: deviating to
        // the free action 2 gains 1/10, so the scheme is not implementable.
        let inst = DelegationInstance {
            types: vec!["t1".into()],
            type_dist: vec![int(1)],
            outcomes: vec!["w1".into(), "w2".into()],
            actions: vec!["a1".into(), "a2".into()],
            outcome_dists: vec![vec![int(1), int(0)], vec![int(0), int(1)]],
            rewards: vec![vec![int(1), int(0)]],
            costs: vec![rat(1, 2), int(0)],
        };
        inst.validate().unwrap();
        let menu = DeterministicMenu::new(
            MenuKind::Indirect,
            vec![PaymentScheme {
                action: Some(0),
                payments: vec![rat(2, 5), int(0)],
            }],
            &inst,
        )
        .unwrap();
        let report = verify_menu(&inst, &menu);
        assert!(!report.ok);
        assert!(!report.scheme_checks[0].provider_ok);
        assert_eq!(report.scheme_checks[0].better, Some(1));
        assert_eq!(report.scheme_checks[0].gain, Some(rat(1, 10)));
    }

    #[test]
    fn verify_accepts_the_soundness_menu() {
        let graph = GraphSpec::new(2, vec![]).unwrap();
        let (inst, beta) = gen_hardness(&graph).unwrap();
        let menu = gen_soundness_menu(&inst, &[1, 2]).unwrap();
        let report = verify_menu(&inst, &menu);
        assert!(report.ok);
        assert_eq!(report.value, &beta * &int(4));
        assert_eq!(report.value, rat(1, 30));
    }

    #[test]
    fn verify_reports_user_side_violations() {
        let inst = diag2();
        // Type 2's scheme is cheaper for the same action: type 1 defects.
        let menu = DeterministicMenu::new(
            MenuKind::Direct,
            vec![
                PaymentScheme {
                    action: Some(0),
                    payments: vec![int(1), int(0)],
                },
                PaymentScheme {
                    action: Some(0),
                    payments: vec![rat(1, 2), int(0)],
                },
            ],
            &inst,
        )
        .unwrap();
        let report = verify_menu(&inst, &menu);
        assert!(!report.ok);
        assert_eq!(report.user_ic_violations, vec![(0, 1)]);
        assert_eq!(report.user_ir_violations, vec![1]);
    }
}
