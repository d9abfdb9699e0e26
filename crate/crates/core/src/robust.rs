//! Robustification of menus against reward misspecification.
//!
//! A menu priced for an estimated reward matrix can lose its buyers when
//! the true rewards differ: a type expected to buy may find its item just
//! barely unaffordable. The transform here reimburses part of each scheme's
//! margin — lowering price `q` to `q - alpha * (q - c)` with
//! `alpha = sqrt(delta)` — and drops schemes whose margin is below
//! `sqrt(2 * delta)`, where `delta` bounds the entrywise reward error. The
//! surviving menu's realized value under *any* true rewards within `delta`
//! is at least the assumed value minus `2*sqrt(delta) + sqrt(2*delta)`.

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::floors::FloorTable;
use crate::instance::DelegationInstance;
use crate::pricing::{evaluate, selection, PricingItem, PricingSolution};
use crate::rational::{sqrt_upper, Rat};
use crate::Result;

/// Slack parameters of a robustification run: `delta` bounds the entrywise
/// reward misspecification (and the user-side slack of the input menu),
/// `eps` is the provider-side slack of the input menu's prices.
#[derive(Debug, Clone)]
pub struct RobustnessParams {
    pub delta: Rat,
    pub eps: Rat,
}

impl RobustnessParams {
    pub fn new(delta: Rat, eps: Rat) -> Result<Self> {
        if delta.is_negative() || eps.is_negative() {
            return Err(Error::Precondition(
                "robustness slacks delta and eps must be nonnegative".into(),
            ));
        }
        Ok(RobustnessParams { delta, eps })
    }

    /// Price-reduction rate: a rational upper bound on `sqrt(delta)`.
    pub fn alpha(&self) -> Result<Rat> {
        sqrt_upper(&self.delta)
    }

    /// Drop threshold for margins: a rational upper bound on `sqrt(2*delta)`.
    pub fn threshold(&self) -> Result<Rat> {
        sqrt_upper(&(&self.delta + &self.delta))
    }
}

/// Exact worst-case violations of the approximate incentive notions:
/// how far some type's assigned item falls short of its favorite
/// (`user_ic_slack`), how negative some assigned utility is
/// (`user_ir_slack`), and how far some price sits below its action's
/// unrelaxed floor (`provider_slack`). Items whose action admits no
/// incentive-compatible payment at all are listed in `unpriceable` and
/// excluded from `provider_slack`.
#[derive(Debug, Clone)]
pub struct ApproxICReport {
    pub user_ic_slack: Rat,
    pub user_ir_slack: Rat,
    pub provider_slack: Rat,
    pub unpriceable: Vec<usize>,
}

impl ApproxICReport {
    /// Do the measured slacks fit within user slack `delta` and provider
    /// slack `eps`?
    pub fn within(&self, delta: &Rat, eps: &Rat) -> bool {
        self.unpriceable.is_empty()
            && self.user_ic_slack <= *delta
            && self.user_ir_slack <= *delta
            && self.provider_slack <= *eps
    }
}

/// Measures a menu's approximate incentive compatibility against `inst`'s
/// actual rewards, ignoring any value overrides the solution carries.
///
/// `assumed[t]` is the item type `t` is supposed to take (`None` =
/// opt out), typically the selection computed on the instance the menu was
/// designed for; when absent, the selection induced by `inst` itself is
/// used, which zeroes the user-side slacks by construction.
pub fn verify_approx(
    inst: &DelegationInstance,
    sol: &PricingSolution,
    assumed: Option<&[Option<usize>]>,
) -> Result<ApproxICReport> {
    let n = inst.num_types();
    let plain = strip_overrides(sol);
    let own: Vec<Option<usize>> = match assumed {
        Some(a) => {
            if a.len() != n {
                return Err(Error::Precondition(format!(
                    "assumed selection covers {} types, instance has {n}",
                    a.len()
                )));
            }
            a.to_vec()
        }
        None => selection(inst, &plain).into_iter().map(|e| e.item).collect(),
    };
    let utility = |t: usize, item: Option<usize>| -> Rat {
        match item.map(|i| &sol.items[i]) {
            None => Rat::zero(),
            Some(it) => match it.action {
                None => Rat::zero(),
                Some(a) => &inst.expected_value(t, a) - &it.q,
            },
        }
    };
    let mut user_ic_slack = Rat::zero();
    let mut user_ir_slack = Rat::zero();
    for t in 0..n {
        if let Some(i) = own[t] {
            if i >= sol.items.len() {
                return Err(Error::Precondition(format!(
                    "assumed item {i} for type {t} is out of range"
                )));
            }
        }
        let u_own = utility(t, own[t]);
        for i in 0..sol.items.len() {
            let gap = &utility(t, Some(i)) - &u_own;
            if gap > user_ic_slack {
                user_ic_slack = gap;
            }
        }
        let shortfall = -u_own;
        if shortfall > user_ir_slack {
            user_ir_slack = shortfall;
        }
    }

    let floors = FloorTable::new(inst, &Rat::zero(), None)?;
    let mut provider_slack = Rat::zero();
    let mut unpriceable = Vec::new();
    for (i, item) in sol.items.iter().enumerate() {
        let Some(a) = item.action else { continue };
        match floors.floor(a) {
            Some(f) => {
                let below = f - &item.q;
                if below > provider_slack {
                    provider_slack = below;
                }
            }
            None => unpriceable.push(i),
        }
    }
    Ok(ApproxICReport {
        user_ic_slack,
        user_ir_slack,
        provider_slack,
        unpriceable,
    })
}

/// The provider's realized value when users best-respond to `inst`'s actual
/// rewards, discarding any design-time value overrides the menu carries.
pub fn true_response_value(inst: &DelegationInstance, sol: &PricingSolution) -> Rat {
    evaluate(inst, &strip_overrides(sol))
}

fn strip_overrides(sol: &PricingSolution) -> PricingSolution {
    let mut plain = sol.clone();
    plain.w_own = None;
    plain.w_other = None;
    plain
}

/// Result of [`robustify`]: the transformed indirect menu plus the
/// constants used and the value guarantee they imply.
#[derive(Debug, Clone)]
pub struct RobustifyOutput {
    /// Kept schemes with reimbursed prices; `eps` set to `eps + alpha`.
    pub solution: PricingSolution,
    pub alpha: Rat,
    pub threshold: Rat,
    pub eps_out: Rat,
    /// Input item indices carried over.
    pub kept: Vec<usize>,
    /// Input item indices not carried over (low margin or opt-out items).
    pub dropped: Vec<usize>,
    /// Value of the input menu on the instance it was designed for.
    pub assumed_value: Rat,
    /// Lower bound on the realized value under any rewards within `delta`:
    /// `assumed_value - 2*alpha - threshold`.
    pub guarantee: Rat,
    pub warnings: Vec<String>,
}

/// Reimburses margins and drops thin schemes so the menu survives reward
/// misspecification up to `params.delta`.
///
/// The input must already be within the stated slacks on `inst` (the
/// estimated instance): its prices at least the floors relaxed by
/// `params.eps`, and its own induced selection within `params.delta` of
/// user incentive compatibility and participation. Each kept price is
/// reduced by `alpha` times its margin, which keeps it above the floor
/// relaxed by `eps + alpha`. The output never reads any true reward
/// matrix, so it is identical whatever the misspecification turns out
/// to be.
pub fn robustify(
    inst: &DelegationInstance,
    menu_in: &PricingSolution,
    params: &RobustnessParams,
) -> Result<RobustifyOutput> {
    menu_in.validate(inst)?;
    let alpha = params.alpha()?;
    let threshold = params.threshold()?;

    let assumed: Vec<Option<usize>> = selection(inst, menu_in)
        .into_iter()
        .map(|e| e.item)
        .collect();
    let report = verify_approx(inst, menu_in, Some(&assumed))?;
    if report.user_ic_slack > params.delta || report.user_ir_slack > params.delta {
        return Err(Error::Precondition(format!(
            "input menu exceeds the user slack {}: IC slack {}, IR slack {}",
            params.delta, report.user_ic_slack, report.user_ir_slack
        )));
    }
    let floors = FloorTable::new(inst, &params.eps, None)?;
    for (i, item) in menu_in.items.iter().enumerate() {
        let Some(a) = item.action else { continue };
        match floors.floor(a) {
            Some(f) if item.q >= *f => {}
            Some(f) => {
                return Err(Error::Precondition(format!(
                    "item {i} is priced {} below its floor relaxed by {}",
                    f - &item.q,
                    params.eps
                )));
            }
            None => {
                return Err(Error::Precondition(format!(
                    "item {i} uses an action with no incentive-compatible payment"
                )));
            }
        }
    }

    let assumed_value = evaluate(inst, menu_in);
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    let mut items = Vec::new();
    let mut warnings = Vec::new();
    for (i, item) in menu_in.items.iter().enumerate() {
        let Some(a) = item.action else {
            dropped.push(i);
            continue;
        };
        let margin = &item.q - &inst.costs[a];
        if margin < threshold {
            dropped.push(i);
            continue;
        }
        if assumed.contains(&Some(i)) && item.q > Rat::one() {
            warnings.push(format!(
                "item {i} is selected at price {} > 1; the reimbursement bound assumes prices at most 1",
                item.q
            ));
        }
        kept.push(i);
        items.push(PricingItem::new(a, &item.q - &(&alpha * &margin)));
    }
    if items.is_empty() {
        items.push(PricingItem::opt_out());
    }
    let eps_out = &params.eps + &alpha;
    let mut solution = PricingSolution::new(items);
    solution.eps = eps_out.clone();
    let guarantee = &(&assumed_value - &(&alpha + &alpha)) - &threshold;
    Ok(RobustifyOutput {
        solution,
        alpha,
        threshold,
        eps_out,
        kept,
        dropped,
        assumed_value,
        guarantee,
        warnings,
    })
}
