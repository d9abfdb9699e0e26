//! Menus in unit-demand pricing form: the buyer-selection rule, seller-value
//! evaluation, the exact vertex-enumeration solver over priced action
//! tuples, and conversions between pricing solutions and full payment menus.
//!
//! An item is an action offered at an expected price. Each buyer type picks
//! the item maximizing its utility (value minus price), opting out only when
//! every item has strictly negative utility; utility ties resolve toward the
//! higher seller margin, then the lowest item index. The solver enumerates,
//! per action tuple, all vertices of the arrangement spanned by indifference,
//! floor, and participation hyperplanes, and keeps the best feasible one.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::floors::{reconstruct_payment, FloorTable};
use crate::instance::{
    parse_doc, parse_field_vec, DelegationInstance, DeterministicMenu, MenuKind, PaymentScheme,
    SCHEMA_VERSION,
};
use crate::rational::{format_rat, parse_rat, Rat};
use crate::solvers::intersect_hyperplanes;
use crate::Result;

/// Upper bound on the number of action tuples a single solve may enumerate.
pub const MAX_TUPLES: u128 = 2_000_000;

/// Tuple count above which per-tuple statistics are omitted from the report.
const STATS_CAP: u64 = 4096;

/// One priced menu entry: an action offered at expected price `q`, or the
/// explicit opt-out entry (no action, price zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PricingItem {
    pub action: Option<usize>,
    pub q: Rat,
}

impl PricingItem {
    pub fn new(action: usize, q: Rat) -> Self {
        PricingItem {
            action: Some(action),
            q,
        }
    }

    pub fn opt_out() -> Self {
        PricingItem {
            action: None,
            q: Rat::zero(),
        }
    }
}

/// A menu in pricing form together with the valuation model used to rank it.
///
/// `w_own[t][a]` is the value type `t` places on an item with action `a`;
/// `w_other[t][a]` is the value used on the comparison side of incentive
/// constraints. Both default to the instance's expected rewards
/// (`w_other` falls back to `w_own`); overriding them runs the same
/// machinery on inflated or deflated value estimates. `eps` is the
/// relaxation level the item prices are floored at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PricingSolution {
    pub items: Vec<PricingItem>,
    pub eps: Rat,
    pub w_own: Option<Vec<Vec<Rat>>>,
    pub w_other: Option<Vec<Vec<Rat>>>,
}

impl PricingSolution {
    pub fn new(items: Vec<PricingItem>) -> Self {
        PricingSolution {
            items,
            eps: Rat::zero(),
            w_own: None,
            w_other: None,
        }
    }

    /// Value type `t` places on buying `item`.
    pub fn item_value(&self, inst: &DelegationInstance, t: usize, item: &PricingItem) -> Rat {
        match item.action {
            None => Rat::zero(),
            Some(a) => match &self.w_own {
                Some(w) => w[t][a].clone(),
                None => inst.expected_value(t, a),
            },
        }
    }

    /// Seller margin of `item`: price minus production cost.
    pub fn item_margin(&self, inst: &DelegationInstance, item: &PricingItem) -> Rat {
        match item.action {
            None => Rat::zero(),
            Some(a) => &item.q - &inst.costs[a],
        }
    }

    pub fn validate(&self, inst: &DelegationInstance) -> Result<()> {
        if self.eps.is_negative() {
            return Err(Error::Invalid("pricing solution: negative eps".into()));
        }
        for (i, item) in self.items.iter().enumerate() {
            match item.action {
                Some(a) if a >= inst.num_actions() => {
                    return Err(Error::Invalid(format!(
                        "item {i}: action index {a} out of range"
                    )));
                }
                None if !item.q.is_zero() => {
                    return Err(Error::Invalid(format!(
                        "item {i}: opt-out item must be priced at 0, found {}",
                        format_rat(&item.q)
                    )));
                }
                _ => {}
            }
            if item.q.is_negative() {
                return Err(Error::Invalid(format!("item {i}: negative price")));
            }
        }
        check_value_matrix(inst, "w_own", &self.w_own)?;
        check_value_matrix(inst, "w_other", &self.w_other)?;
        Ok(())
    }
}

fn check_value_matrix(
    inst: &DelegationInstance,
    name: &str,
    w: &Option<Vec<Vec<Rat>>>,
) -> Result<()> {
    let Some(w) = w else { return Ok(()) };
    if w.len() != inst.num_types() || w.iter().any(|row| row.len() != inst.num_actions()) {
        return Err(Error::Dimension(format!(
            "{name}: expected {} x {} value matrix",
            inst.num_types(),
            inst.num_actions()
        )));
    }
    Ok(())
}

/// The choice of one buyer type: the picked item index (or opt-out), the
/// buyer's utility, and the seller's margin from the sale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionEntry {
    pub item: Option<usize>,
    pub utility: Rat,
    pub margin: Rat,
}

impl SelectionEntry {
    fn opt_out() -> Self {
        SelectionEntry {
            item: None,
            utility: Rat::zero(),
            margin: Rat::zero(),
        }
    }
}

/// Best response of type `t` to the priced items: the utility-maximizing
/// item, opting out only when every item has strictly negative utility.
/// Utility ties resolve toward the higher seller margin, final ties toward
/// the lowest item index. Explicit opt-out items stand for the outside
/// option and are never reported as purchases.
pub fn select(inst: &DelegationInstance, sol: &PricingSolution, t: usize) -> SelectionEntry {
    let mut best: Option<(usize, Rat, Rat)> = None;
    for (i, item) in sol.items.iter().enumerate() {
        if item.action.is_none() {
            continue;
        }
        let u = &sol.item_value(inst, t, item) - &item.q;
        let m = sol.item_margin(inst, item);
        let better = match &best {
            None => true,
            Some((_, bu, bm)) => u > *bu || (u == *bu && m > *bm),
        };
        if better {
            best = Some((i, u, m));
        }
    }
    match best {
        Some((i, u, m)) if !u.is_negative() => SelectionEntry {
            item: Some(i),
            utility: u,
            margin: m,
        },
        _ => SelectionEntry::opt_out(),
    }
}

/// Best responses of all types.
pub fn selection(inst: &DelegationInstance, sol: &PricingSolution) -> Vec<SelectionEntry> {
    (0..inst.num_types()).map(|t| select(inst, sol, t)).collect()
}

/// Expected seller utility of the solution under the selection rule;
/// opting-out types contribute zero.
pub fn evaluate(inst: &DelegationInstance, sol: &PricingSolution) -> Rat {
    let mut total = Rat::zero();
    for t in 0..inst.num_types() {
        let entry = select(inst, sol, t);
        if entry.item.is_some() {
            total += &inst.type_dist[t] * &entry.margin;
        }
    }
    total
}

/// Knobs for [`solve_menu_k`]: the floor relaxation level and optional
/// overriding value matrices (before defaulting, see [`PricingSolution`]).
#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub eps: Rat,
    pub w_own: Option<Vec<Vec<Rat>>>,
    pub w_other: Option<Vec<Vec<Rat>>>,
}

/// Enumeration counters for one action tuple.
#[derive(Debug, Clone)]
pub struct TupleStats {
    pub actions: Vec<usize>,
    pub hyperplanes: usize,
    pub feasible: u64,
}

/// Result of [`solve_menu_k`]: the optimal solution, its value and induced
/// selection, and enumeration statistics.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: PricingSolution,
    pub value: Rat,
    pub selection: Vec<SelectionEntry>,
    pub tuples: u64,
    pub candidates: u64,
    /// Per-tuple counters; omitted when more than a few thousand tuples ran.
    pub per_tuple: Vec<TupleStats>,
}

struct TupleOutcome {
    stats: TupleStats,
    best: Option<(Rat, Vec<Rat>)>,
}

/// Finds an exactly optimal menu of `k` priced items.
///
/// For every action tuple of length `k` the candidate prices are the
/// intersections of `k` hyperplanes drawn from: buyer indifference between
/// two slots, a slot priced at its floor, and a slot priced at a buyer's
/// full value. Candidates violating nonnegativity or a floor are discarded;
/// the all-opt-out solution is always a candidate. Ties break toward the
/// lowest tuple index, then lexicographically smallest prices, so parallel
/// and serial runs return identical solutions.
pub fn solve_menu_k(
    inst: &DelegationInstance,
    k: usize,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    if k < 1 {
        return Err(Error::Precondition("menu size k must be at least 1".into()));
    }
    check_value_matrix(inst, "w_own", &opts.w_own)?;
    check_value_matrix(inst, "w_other", &opts.w_other)?;
    let n = inst.num_types();
    let l = inst.num_actions();
    let tuple_count = (l as u128).pow(k as u32);
    if tuple_count > MAX_TUPLES {
        return Err(Error::SizeGuard {
            detail: format!("{l}^{k} action tuples"),
            estimate: tuple_count,
            limit: MAX_TUPLES,
        });
    }
    let tuple_count = tuple_count as u64;
    let floors = FloorTable::new(inst, &opts.eps, None)?;
    let w_own: Vec<Vec<Rat>> = match &opts.w_own {
        Some(w) => w.clone(),
        None => (0..n)
            .map(|t| (0..l).map(|a| inst.expected_value(t, a)).collect())
            .collect(),
    };
    let w_other: Vec<Vec<Rat>> = match &opts.w_other {
        Some(w) => w.clone(),
        None => w_own.clone(),
    };

    let outcomes: Vec<TupleOutcome> = (0..tuple_count)
        .into_par_iter()
        .map(|idx| solve_tuple(inst, k, idx, &floors, &w_own, &w_other))
        .collect();

    let mut candidates: u64 = 1; // the all-opt-out candidate
    let mut best: Option<(Rat, Vec<usize>, Vec<Rat>)> = None;
    let mut per_tuple = Vec::new();
    for outcome in outcomes {
        candidates += outcome.stats.feasible;
        if let Some((value, q)) = outcome.best {
            // Tuples arrive in index order and earlier tuples win ties, so
            // only a strictly better value replaces the incumbent.
            let better = match &best {
                None => true,
                Some((bv, _, _)) => value > *bv,
            };
            if better {
                best = Some((value, outcome.stats.actions.clone(), q));
            }
        }
        if tuple_count <= STATS_CAP {
            per_tuple.push(outcome.stats);
        }
    }

    let solution = match &best {
        Some((value, actions, q)) if !value.is_negative() => PricingSolution {
            items: actions
                .iter()
                .zip(q)
                .map(|(&a, qi)| PricingItem::new(a, qi.clone()))
                .collect(),
            eps: opts.eps.clone(),
            w_own: opts.w_own.clone(),
            w_other: opts.w_other.clone(),
        },
        _ => PricingSolution {
            items: vec![PricingItem::opt_out(); k],
            eps: opts.eps.clone(),
            w_own: opts.w_own.clone(),
            w_other: opts.w_other.clone(),
        },
    };
    let value = evaluate(inst, &solution);
    debug_assert_eq!(
        value,
        best.as_ref()
            .map(|(v, _, _)| v.clone())
            .filter(|v| !v.is_negative())
            .unwrap_or_else(Rat::zero)
    );
    Ok(SolveReport {
        selection: selection(inst, &solution),
        solution,
        value,
        tuples: tuple_count,
        candidates,
        per_tuple,
    })
}

fn decode_tuple(mut idx: u64, l: u64, k: usize) -> Vec<usize> {
    let mut out = vec![0usize; k];
    for slot in (0..k).rev() {
        out[slot] = (idx % l) as usize;
        idx /= l;
    }
    out
}

fn canonical_plane(mut normal: Vec<Rat>, mut offset: Rat) -> (Vec<Rat>, Rat) {
    if let Some(first) = normal.iter().find(|c| !c.is_zero()) {
        if first.is_negative() {
            for c in &mut normal {
                *c = -c.clone();
            }
            offset = -offset;
        }
    }
    (normal, offset)
}

fn solve_tuple(
    inst: &DelegationInstance,
    k: usize,
    idx: u64,
    floors: &FloorTable,
    w_own: &[Vec<Rat>],
    w_other: &[Vec<Rat>],
) -> TupleOutcome {
    let n = inst.num_types();
    let tuple = decode_tuple(idx, inst.num_actions() as u64, k);
    let mut stats = TupleStats {
        actions: tuple.clone(),
        hyperplanes: 0,
        feasible: 0,
    };
    // A slot whose action admits no incentivizable price kills the tuple.
    let tuple_floors: Option<Vec<&Rat>> = tuple.iter().map(|&a| floors.floor(a)).collect();
    let Some(tuple_floors) = tuple_floors else {
        return TupleOutcome { stats, best: None };
    };

    let mut planes: BTreeSet<(Vec<Rat>, Rat)> = BTreeSet::new();
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            for t in 0..n {
                let mut normal = vec![Rat::zero(); k];
                normal[i] = Rat::one();
                normal[j] = -Rat::one();
                let offset = &w_own[t][tuple[i]] - &w_other[t][tuple[j]];
                planes.insert(canonical_plane(normal, offset));
            }
        }
    }
    for i in 0..k {
        let mut normal = vec![Rat::zero(); k];
        normal[i] = Rat::one();
        planes.insert((normal.clone(), tuple_floors[i].clone()));
        for t in 0..n {
            planes.insert((normal.clone(), w_own[t][tuple[i]].clone()));
        }
    }
    let planes: Vec<(Vec<Rat>, Rat)> = planes.into_iter().collect();
    stats.hyperplanes = planes.len();

    let mut best: Option<(Rat, Vec<Rat>)> = None;
    for_each_combination(planes.len(), k, |chosen| {
        let normals: Vec<Vec<Rat>> = chosen.iter().map(|&p| planes[p].0.clone()).collect();
        let offsets: Vec<Rat> = chosen.iter().map(|&p| planes[p].1.clone()).collect();
        let Ok(Some(q)) = intersect_hyperplanes(&normals, &offsets) else {
            return;
        };
        let feasible = q
            .iter()
            .zip(&tuple_floors)
            .all(|(qi, &fl)| !qi.is_negative() && qi >= fl);
        if !feasible {
            return;
        }
        stats.feasible += 1;
        let value = assignment_value(inst, w_own, &tuple, &q);
        let better = match &best {
            None => true,
            Some((bv, bq)) => value > *bv || (value == *bv && q < *bq),
        };
        if better {
            best = Some((value, q));
        }
    });
    TupleOutcome { stats, best }
}

/// Seller value of offering `tuple` at prices `q`, mirroring [`select`].
fn assignment_value(
    inst: &DelegationInstance,
    w_own: &[Vec<Rat>],
    tuple: &[usize],
    q: &[Rat],
) -> Rat {
    let mut total = Rat::zero();
    for t in 0..inst.num_types() {
        let mut best: Option<(Rat, Rat)> = None;
        for (i, &a) in tuple.iter().enumerate() {
            let u = &w_own[t][a] - &q[i];
            let m = &q[i] - &inst.costs[a];
            let better = match &best {
                None => true,
                Some((bu, bm)) => u > *bu || (u == *bu && m > *bm),
            };
            if better {
                best = Some((u, m));
            }
        }
        if let Some((u, m)) = best {
            if !u.is_negative() {
                total += &inst.type_dist[t] * &m;
            }
        }
    }
    total
}

fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        f(&c);
        let mut i = k as isize - 1;
        while i >= 0 && c[i as usize] == i as usize + n - k {
            i -= 1;
        }
        if i < 0 {
            return;
        }
        let i = i as usize;
        c[i] += 1;
        for j in i + 1..k {
            c[j] = c[j - 1] + 1;
        }
    }
}

/// Converts a pricing solution into a full menu by reconstructing concrete
/// payment vectors. A direct menu carries one scheme per type (the type's
/// selected item); an indirect menu carries one scheme per item.
pub fn pricing_to_menu(
    inst: &DelegationInstance,
    sol: &PricingSolution,
    kind: MenuKind,
) -> Result<DeterministicMenu> {
    sol.validate(inst)?;
    let scheme_for = |item: &PricingItem| -> Result<PaymentScheme> {
        match item.action {
            None => Ok(PaymentScheme::opt_out()),
            Some(a) => Ok(PaymentScheme {
                action: Some(a),
                payments: reconstruct_payment(inst, a, &item.q, &sol.eps)?,
            }),
        }
    };
    let schemes = match kind {
        MenuKind::Indirect => sol
            .items
            .iter()
            .map(scheme_for)
            .collect::<Result<Vec<_>>>()?,
        MenuKind::Direct => (0..inst.num_types())
            .map(|t| match select(inst, sol, t).item {
                None => Ok(PaymentScheme::opt_out()),
                Some(i) => scheme_for(&sol.items[i]),
            })
            .collect::<Result<Vec<_>>>()?,
    };
    DeterministicMenu::new(kind, schemes, inst)
}

/// Converts a full menu into pricing form, replacing each payment vector by
/// its expected payment. Fails unless every scheme's action is a best
/// response for the provider among all deviations.
pub fn menu_to_pricing(
    inst: &DelegationInstance,
    menu: &DeterministicMenu,
) -> Result<PricingSolution> {
    menu.validate(inst)?;
    let mut items = Vec::with_capacity(menu.schemes.len());
    for (i, scheme) in menu.schemes.iter().enumerate() {
        let Some(a) = scheme.action else {
            items.push(PricingItem::opt_out());
            continue;
        };
        let own = &inst.expected_payment(a, &scheme.payments) - &inst.costs[a];
        let mut worst: Option<(usize, Rat)> = None;
        for dev in (0..inst.num_actions()).filter(|&d| d != a) {
            let gain = &(&inst.expected_payment(dev, &scheme.payments) - &inst.costs[dev]) - &own;
            if gain.is_positive() && worst.as_ref().is_none_or(|(_, g)| gain > *g) {
                worst = Some((dev, gain));
            }
        }
        if let Some((dev, gain)) = worst {
            return Err(Error::NotIc {
                scheme: i,
                action: inst.actions[a].clone(),
                better: inst.actions[dev].clone(),
                gain: format_rat(&gain),
            });
        }
        items.push(PricingItem::new(a, inst.expected_payment(a, &scheme.payments)));
    }
    Ok(PricingSolution::new(items))
}

/// Compresses a direct menu down to at most one scheme per used action,
/// keeping for each action the cheapest payment vector assigned to it.
/// Requires the input to be incentive compatible on both sides and
/// individually rational for the user.
pub fn compress_menu(
    inst: &DelegationInstance,
    menu: &DeterministicMenu,
) -> Result<DeterministicMenu> {
    menu.validate(inst)?;
    if menu.kind != MenuKind::Direct {
        return Err(Error::Precondition("compression requires a direct menu".into()));
    }
    // Provider-side incentive compatibility.
    menu_to_pricing(inst, menu)?;
    // User-side incentive compatibility and participation.
    let utility = |t: usize, s: &PaymentScheme| -> Rat {
        match s.action {
            None => Rat::zero(),
            Some(a) => &inst.expected_value(t, a) - &inst.expected_payment(a, &s.payments),
        }
    };
    let n = inst.num_types();
    for t in 0..n {
        let own = utility(t, &menu.schemes[t]);
        if own.is_negative() {
            return Err(Error::Precondition(format!(
                "type {:?} has negative utility {}",
                inst.types[t],
                format_rat(&own)
            )));
        }
        for other in 0..n {
            let alt = utility(t, &menu.schemes[other]);
            if alt > own {
                return Err(Error::Precondition(format!(
                    "type {:?} prefers the scheme of type {:?} ({} > {})",
                    inst.types[t],
                    inst.types[other],
                    format_rat(&alt),
                    format_rat(&own)
                )));
            }
        }
    }

    // Cheapest assigned payment vector per used action, earliest type wins
    // ties so the output is deterministic.
    let mut cheapest: Vec<Option<(usize, Rat)>> = vec![None; inst.num_actions()];
    for (t, scheme) in menu.schemes.iter().enumerate() {
        let Some(a) = scheme.action else { continue };
        let q = inst.expected_payment(a, &scheme.payments);
        if cheapest[a].as_ref().is_none_or(|(_, best)| q < *best) {
            cheapest[a] = Some((t, q));
        }
    }
    let mut schemes: Vec<PaymentScheme> = cheapest
        .iter()
        .enumerate()
        .filter_map(|(a, slot)| {
            slot.as_ref().map(|(t, _)| PaymentScheme {
                action: Some(a),
                payments: menu.schemes[*t].payments.clone(),
            })
        })
        .collect();
    if schemes.is_empty() {
        schemes.push(PaymentScheme::opt_out());
    }
    DeterministicMenu::new(MenuKind::Indirect, schemes, inst)
}

/// Drops every item no type selects, preserving the valuation model.
pub fn restrict_to_selected(inst: &DelegationInstance, sol: &PricingSolution) -> PricingSolution {
    let mut keep = vec![false; sol.items.len()];
    for entry in selection(inst, sol) {
        if let Some(i) = entry.item {
            keep[i] = true;
        }
    }
    PricingSolution {
        items: sol
            .items
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(item, _)| item.clone())
            .collect(),
        eps: sol.eps.clone(),
        w_own: sol.w_own.clone(),
        w_other: sol.w_other.clone(),
    }
}

#[derive(Serialize, Deserialize)]
struct SolutionJson {
    version: u32,
    kind: String,
    eps: String,
    items: Vec<ItemJson>,
    selection: Vec<SelectionJson>,
    value: String,
}

#[derive(Serialize, Deserialize)]
struct ItemJson {
    action: Option<String>,
    q: String,
}

#[derive(Serialize, Deserialize)]
struct SelectionJson {
    #[serde(rename = "type")]
    type_id: String,
    item: Option<usize>,
    utility: String,
    margin: String,
}

/// Serializes a pricing solution with its induced selection and value.
/// Value matrices are not part of the wire format: a deserialized solution
/// is evaluated with the instance's own expected rewards.
pub fn solution_to_json_string(inst: &DelegationInstance, sol: &PricingSolution) -> String {
    let doc = SolutionJson {
        version: SCHEMA_VERSION,
        kind: "pricing".to_string(),
        eps: format_rat(&sol.eps),
        items: sol
            .items
            .iter()
            .map(|item| ItemJson {
                action: item.action.map(|a| inst.actions[a].clone()),
                q: format_rat(&item.q),
            })
            .collect(),
        selection: selection(inst, sol)
            .iter()
            .enumerate()
            .map(|(t, e)| SelectionJson {
                type_id: inst.types[t].clone(),
                item: e.item,
                utility: format_rat(&e.utility),
                margin: format_rat(&e.margin),
            })
            .collect(),
        value: format_rat(&evaluate(inst, sol)),
    };
    serde_json::to_string_pretty(&doc).expect("solution serialization cannot fail")
}

pub fn solution_from_json_str(text: &str, inst: &DelegationInstance) -> Result<PricingSolution> {
    let doc: SolutionJson = parse_doc(text)?;
    if doc.version != SCHEMA_VERSION {
        return Err(Error::SchemaVersion {
            expected: SCHEMA_VERSION,
            found: doc.version,
        });
    }
    if doc.kind != "pricing" {
        return Err(Error::json(
            "kind",
            format!("expected \"pricing\", found {:?}", doc.kind),
        ));
    }
    let mut items = Vec::with_capacity(doc.items.len());
    for (i, item) in doc.items.iter().enumerate() {
        let action = match &item.action {
            Some(id) => Some(inst.action_index(id)?),
            None => None,
        };
        let q = parse_rat(&item.q)
            .map_err(|e| Error::json(format!("items[{i}].q"), e.to_string()))?;
        items.push(PricingItem { action, q });
    }
    let eps = parse_field_vec("eps", &[doc.eps])?.pop().expect("one entry");
    let sol = PricingSolution {
        items,
        eps,
        w_own: None,
        w_other: None,
    };
    sol.validate(inst)?;
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::testutil::diag2;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn single_type() -> DelegationInstance {
        let inst = DelegationInstance {
            types: vec!["t1".into()],
            type_dist: vec![int(1)],
            outcomes: vec!["w1".into(), "w2".into()],
            actions: vec!["a1".into(), "a2".into()],
            outcome_dists: vec![vec![int(1), int(0)], vec![int(0), int(1)]],
            rewards: vec![vec![int(1), int(0)]],
            costs: vec![int(0), int(0)],
        };
        inst.validate().unwrap();
        inst
    }

    #[test]
    fn select_follows_the_rule() {
        let inst = diag2();
        let sol = PricingSolution::new(vec![PricingItem::new(0, int(1))]);
        let e = select(&inst, &sol, 0);
        assert_eq!(e.item, Some(0));
        assert_eq!(e.utility, int(0));
        assert_eq!(e.margin, int(1));
        let e = select(&inst, &sol, 1);
        assert_eq!(e.item, None);

        // Equal utility, unequal margin: pick the larger margin.
        let mut costed = single_type();
        costed.outcome_dists[1] = costed.outcome_dists[0].clone();
        costed.costs = vec![rat(3, 10), int(0)];
        let sol = PricingSolution::new(vec![
            PricingItem::new(0, rat(1, 2)),
            PricingItem::new(1, rat(1, 2)),
        ]);
        let e = select(&costed, &sol, 0);
        assert_eq!(e.item, Some(1));
        assert_eq!(e.margin, rat(1, 2));

        // Full tie: lowest index.
        let sol = PricingSolution::new(vec![
            PricingItem::new(1, rat(1, 2)),
            PricingItem::new(1, rat(1, 2)),
        ]);
        assert_eq!(select(&costed, &sol, 0).item, Some(0));

        // All overpriced: opt out.
        let sol = PricingSolution::new(vec![PricingItem::new(0, int(2))]);
        assert_eq!(select(&costed, &sol, 0).item, None);
    }

    #[test]
    fn evaluate_examples() {
        let inst = diag2();
        let both = PricingSolution::new(vec![
            PricingItem::new(0, int(1)),
            PricingItem::new(1, int(1)),
        ]);
        assert_eq!(evaluate(&inst, &both), int(1));
        let one = PricingSolution::new(vec![PricingItem::new(0, int(1))]);
        assert_eq!(evaluate(&inst, &one), rat(1, 2));
        let overpriced = PricingSolution::new(vec![
            PricingItem::new(0, int(2)),
            PricingItem::new(1, int(2)),
        ]);
        assert_eq!(evaluate(&inst, &overpriced), int(0));
    }

    #[test]
    fn solve_diag2() {
        let inst = diag2();
        let r1 = solve_menu_k(&inst, 1, &SolveOptions::default()).unwrap();
        assert_eq!(r1.value, rat(1, 2));
        assert_eq!(r1.solution.items[0].q, int(1));
        let r2 = solve_menu_k(&inst, 2, &SolveOptions::default()).unwrap();
        assert_eq!(r2.value, int(1));
        assert_eq!(r2.solution.items[0].q, int(1));
        assert_eq!(r2.solution.items[1].q, int(1));
        assert_eq!(r2.tuples, 4);
        assert_eq!(r2.per_tuple.len(), 4);
    }

    #[test]
    fn solve_single_type_extracts_surplus() {
        let inst = single_type();
        let r = solve_menu_k(&inst, 1, &SolveOptions::default()).unwrap();
        assert_eq!(r.value, int(1));
        assert_eq!(r.solution.items[0], PricingItem::new(0, int(1)));
        assert_eq!(r.selection[0].item, Some(0));
    }

    #[test]
    fn solve_prefers_opt_out_to_forced_losses() {
        // One costly action, value 1/4 < cost 1/2: any sale loses money, so
        // the optimal menu prices the single item out of the market.
        let inst = DelegationInstance {
            types: vec!["t1".into()],
            type_dist: vec![int(1)],
            outcomes: vec!["w1".into(), "w2".into()],
            actions: vec!["a1".into()],
            outcome_dists: vec![vec![rat(1, 4), rat(3, 4)]],
            rewards: vec![vec![int(1), int(0)]],
            costs: vec![rat(1, 2)],
        };
        inst.validate().unwrap();
        let r = solve_menu_k(&inst, 1, &SolveOptions::default()).unwrap();
        assert_eq!(r.value, int(0));
        assert_eq!(r.solution.items, vec![PricingItem::opt_out()]);
        assert_eq!(r.selection[0].item, None);
    }

    #[test]
    fn solution_prices_respect_relaxed_floors() {
        // Action 2 costs 3/10, so its floors are 3/10 at eps = 0 and 1/5 at
        // eps = 1/10. The solver must keep every sold item at or above the
        // floor for the eps it was asked to solve at.
        let inst = DelegationInstance {
            types: vec!["t1".into()],
            type_dist: vec![int(1)],
            outcomes: vec!["w1".into(), "w2".into()],
            actions: vec!["a1".into(), "a2".into()],
            outcome_dists: vec![vec![int(1), int(0)], vec![int(0), int(1)]],
            rewards: vec![vec![rat(1, 8), int(1)]],
            costs: vec![int(0), rat(3, 10)],
        };
        inst.validate().unwrap();
        for eps in [int(0), rat(1, 10)] {
            let opts = SolveOptions {
                eps: eps.clone(),
                ..Default::default()
            };
            let report = solve_menu_k(&inst, 1, &opts).unwrap();
            // Full extraction of the valuable action is floor-feasible.
            assert_eq!(report.value, int(1) - rat(3, 10));
            let floors = FloorTable::new(&inst, &eps, None).unwrap();
            for item in &report.solution.items {
                if let Some(a) = item.action {
                    assert!(item.q >= *floors.floor(a).unwrap());
                }
            }
        }
    }

    #[test]
    fn value_overrides_change_the_arrangement() {
        let inst = diag2();
        let bump = rat(1, 8);
        let w: Vec<Vec<Rat>> = (0..2)
            .map(|t| (0..2).map(|a| inst.expected_value(t, a) + &bump).collect())
            .collect();
        let opts = SolveOptions {
            eps: int(0),
            w_own: Some(w.clone()),
            w_other: Some(w),
        };
        let r = solve_menu_k(&inst, 2, &opts).unwrap();
        // Full extraction against the inflated values: each type pays its
        // bumped valuation 9/8 for its matching action.
        assert_eq!(r.value, int(1) + rat(1, 8));
        // The reported value prices by w_own; the instance's own rewards
        // value this same menu lower because buyers overpay by the bump.
        let plain = PricingSolution::new(r.solution.items.clone());
        assert_eq!(evaluate(&inst, &plain), int(0));
    }

    #[test]
    fn menu_conversions_round_trip() {
        let inst = diag2();
        let sol = solve_menu_k(&inst, 2, &SolveOptions::default())
            .unwrap()
            .solution;
        let direct = pricing_to_menu(&inst, &sol, MenuKind::Direct).unwrap();
        // Canonical payments pay only on the matching outcome.
        assert_eq!(direct.schemes[0].payments, vec![int(1), int(0)]);
        assert_eq!(direct.schemes[1].payments, vec![int(0), int(1)]);
        let back = menu_to_pricing(&inst, &direct).unwrap();
        assert_eq!(evaluate(&inst, &back), int(1));

        let all_out = PricingSolution::new(vec![PricingItem::opt_out(); 2]);
        let menu = pricing_to_menu(&inst, &all_out, MenuKind::Indirect).unwrap();
        assert!(menu.schemes.iter().all(|s| s.action.is_none()));
        assert_eq!(evaluate(&inst, &menu_to_pricing(&inst, &menu).unwrap()), int(0));
    }

    #[test]
    fn non_ic_menu_is_rejected_with_witness() {
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
        match menu_to_pricing(&inst, &menu) {
            Err(Error::NotIc {
                scheme: 0,
                action,
                better,
                gain,
            }) => {
                assert_eq!(action, "a1");
                assert_eq!(better, "a2");
                assert_eq!(gain, "1/10");
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn compress_merges_shared_schemes() {
        // Three types; the third mirrors the first, so a direct menu with a
        // duplicated scheme compresses to two items of unchanged value.
        let inst = DelegationInstance {
            types: vec!["t1".into(), "t2".into(), "t3".into()],
            type_dist: vec![rat(1, 3), rat(1, 3), rat(1, 3)],
            outcomes: vec!["w1".into(), "w2".into()],
            actions: vec!["a1".into(), "a2".into()],
            outcome_dists: vec![vec![int(1), int(0)], vec![int(0), int(1)]],
            rewards: vec![
                vec![int(1), int(0)],
                vec![int(0), int(1)],
                vec![int(1), int(0)],
            ],
            costs: vec![int(0), int(0)],
        };
        inst.validate().unwrap();
        let menu = DeterministicMenu::new(
            MenuKind::Direct,
            vec![
                PaymentScheme {
                    action: Some(0),
                    payments: vec![int(1), int(0)],
                },
                PaymentScheme {
                    action: Some(1),
                    payments: vec![int(0), int(1)],
                },
                PaymentScheme {
                    action: Some(0),
                    payments: vec![int(1), int(0)],
                },
            ],
            &inst,
        )
        .unwrap();
        let before = evaluate(&inst, &menu_to_pricing(&inst, &menu).unwrap());
        let compressed = compress_menu(&inst, &menu).unwrap();
        assert_eq!(compressed.kind, MenuKind::Indirect);
        assert_eq!(compressed.schemes.len(), 2);
        let after = evaluate(&inst, &menu_to_pricing(&inst, &compressed).unwrap());
        assert_eq!(before, after);
        assert_eq!(before, int(1));
    }

    #[test]
    fn compress_rejects_violated_preconditions() {
        let inst = diag2();
        // Type 2's scheme undercuts type 1: user IC fails.
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
        match compress_menu(&inst, &menu) {
            Err(Error::Precondition(msg)) => assert!(msg.contains("prefers")),
            other => panic!("unexpected: {other:?}"),
        }

        // All-opt-out compresses to a single opt-out scheme.
        let menu = DeterministicMenu::new(
            MenuKind::Direct,
            vec![PaymentScheme::opt_out(), PaymentScheme::opt_out()],
            &inst,
        )
        .unwrap();
        let compressed = compress_menu(&inst, &menu).unwrap();
        assert_eq!(compressed.schemes.len(), 1);
        assert!(compressed.schemes[0].action.is_none());
    }

    #[test]
    fn restriction_drops_unselected_items() {
        let inst = diag2();
        let sol = PricingSolution::new(vec![
            PricingItem::new(0, int(1)),
            PricingItem::new(1, int(2)),
            PricingItem::new(1, int(1)),
        ]);
        let restricted = restrict_to_selected(&inst, &sol);
        assert_eq!(
            restricted.items,
            vec![PricingItem::new(0, int(1)), PricingItem::new(1, int(1))]
        );
        assert_eq!(evaluate(&inst, &sol), evaluate(&inst, &restricted));
    }

    #[test]
    fn solution_json_round_trip() {
        let inst = diag2();
        let sol = solve_menu_k(&inst, 2, &SolveOptions::default())
            .unwrap()
            .solution;
        let text = solution_to_json_string(&inst, &sol);
        let back = solution_from_json_str(&text, &inst).unwrap();
        assert_eq!(sol.items, back.items);
        assert_eq!(sol.eps, back.eps);
        assert!(text.contains("\"value\": \"1\""));
    }

    prop_compose! {
        fn arb_instance(max: usize)(
            n in 1..=max, m in 1..=max, l in 1..=max,
        )(
            weights in proptest::collection::vec(1u32..=4, n),
            f in proptest::collection::vec(
                proptest::collection::vec(0u32..=3, m)
                    .prop_filter("column must have mass", |col| col.iter().sum::<u32>() > 0),
                l,
            ),
            r in proptest::collection::vec(proptest::collection::vec(0i64..=4, m), n),
            costs in proptest::collection::vec(0i64..=2, l),
        ) -> DelegationInstance {
            let total: u32 = weights.iter().sum();
            let inst = DelegationInstance {
                types: (0..weights.len()).map(|t| format!("t{}", t + 1)).collect(),
                type_dist: weights.iter().map(|&w| rat(w as i64, total as i64)).collect(),
                outcomes: (0..f[0].len()).map(|w| format!("w{}", w + 1)).collect(),
                actions: (0..f.len()).map(|a| format!("a{}", a + 1)).collect(),
                outcome_dists: f
                    .iter()
                    .map(|col| {
                        let sum: u32 = col.iter().sum();
                        col.iter().map(|&x| rat(x as i64, sum as i64)).collect()
                    })
                    .collect(),
                rewards: r
                    .iter()
                    .map(|col| col.iter().map(|&x| rat(x, 4)).collect())
                    .collect(),
                costs: costs.iter().map(|&c| rat(c, 4)).collect(),
            };
            inst.validate().unwrap();
            inst
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn solve_reports_consistent_values(inst in arb_instance(3)) {
            let r = solve_menu_k(&inst, 2, &SolveOptions::default()).unwrap();
            prop_assert_eq!(r.value.clone(), evaluate(&inst, &r.solution));
            prop_assert!(!r.value.is_negative());
            r.solution.validate(&inst).unwrap();
        }

        #[test]
        fn solve_value_monotone_in_k(inst in arb_instance(3)) {
            let v1 = solve_menu_k(&inst, 1, &SolveOptions::default()).unwrap().value;
            let v2 = solve_menu_k(&inst, 2, &SolveOptions::default()).unwrap().value;
            prop_assert!(v1 <= v2);
        }

        #[test]
        fn solve_value_monotone_in_eps(inst in arb_instance(3)) {
            let tight = solve_menu_k(&inst, 1, &SolveOptions::default()).unwrap().value;
            let opts = SolveOptions { eps: rat(1, 4), ..Default::default() };
            let relaxed = solve_menu_k(&inst, 1, &opts).unwrap().value;
            prop_assert!(tight <= relaxed);
        }
    }
}
