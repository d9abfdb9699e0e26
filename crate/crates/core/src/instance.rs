//! Problem instances and deterministic menus, with JSON serialization.
//!
//! An instance bundles a finite type space with its prior, a finite outcome
//! space, a finite action space with per-action outcome distributions and
//! costs, and per-type reward vectors. All numbers are exact rationals; on
//! the wire they are `"num/den"` strings.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rational::{format_rat, parse_rat, Rat};
use crate::solvers::dot;
use crate::Result;

/// Wire format version for every JSON document this crate emits.
pub const SCHEMA_VERSION: u32 = 1;

/// A delegation instance.
///
/// `outcome_dists[a]` is the outcome distribution of action `a` (length `m`),
/// `rewards[t]` is the reward vector of type `t` (length `m`, entries in
/// `[0, 1]`), and `costs[a]` is the provider's cost of action `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelegationInstance {
    pub types: Vec<String>,
    pub type_dist: Vec<Rat>,
    pub outcomes: Vec<String>,
    pub actions: Vec<String>,
    pub outcome_dists: Vec<Vec<Rat>>,
    pub rewards: Vec<Vec<Rat>>,
    pub costs: Vec<Rat>,
}

impl DelegationInstance {
    pub fn num_types(&self) -> usize {
        self.types.len()
    }

    pub fn num_outcomes(&self) -> usize {
        self.outcomes.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn type_index(&self, id: &str) -> Result<usize> {
        self.types
            .iter()
            .position(|t| t == id)
            .ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    pub fn action_index(&self, id: &str) -> Result<usize> {
        self.actions
            .iter()
            .position(|a| a == id)
            .ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    /// Expected reward of type `t` under action `a`.
    pub fn expected_value(&self, t: usize, a: usize) -> Rat {
        dot(&self.outcome_dists[a], &self.rewards[t])
    }

    /// Expected payment of a payment vector under action `a`.
    pub fn expected_payment(&self, a: usize, payments: &[Rat]) -> Rat {
        dot(&self.outcome_dists[a], payments)
    }

    /// Checks every structural invariant, collecting all violations.
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        let (n, m, l) = (self.num_types(), self.num_outcomes(), self.num_actions());
        if n == 0 {
            bad.push("types: must be nonempty".to_string());
        }
        if m == 0 {
            bad.push("outcomes: must be nonempty".to_string());
        }
        if l == 0 {
            bad.push("actions: must be nonempty".to_string());
        }
        for (name, ids) in [
            ("types", &self.types),
            ("outcomes", &self.outcomes),
            ("actions", &self.actions),
        ] {
            for (i, id) in ids.iter().enumerate() {
                if id.is_empty() {
                    bad.push(format!("{name}[{i}]: empty identifier"));
                }
                if ids[..i].contains(id) {
                    bad.push(format!("{name}[{i}]: duplicate identifier {id:?}"));
                }
            }
        }
        if self.type_dist.len() != n {
            bad.push(format!(
                "type_dist: {} entries for {} types",
                self.type_dist.len(),
                n
            ));
        } else {
            let mut sum = Rat::zero();
            for (i, p) in self.type_dist.iter().enumerate() {
                if p.is_negative() {
                    bad.push(format!("type_dist[{i}]: negative probability"));
                }
                sum = &sum + p;
            }
            if !sum.is_one() {
                bad.push(format!("type_dist: sums to {}, not 1", format_rat(&sum)));
            }
        }
        if self.outcome_dists.len() != l {
            bad.push(format!(
                "F: {} columns for {} actions",
                self.outcome_dists.len(),
                l
            ));
        } else {
            for (a, col) in self.outcome_dists.iter().enumerate() {
                if col.len() != m {
                    bad.push(format!("F[{a}]: {} entries for {} outcomes", col.len(), m));
                    continue;
                }
                let mut sum = Rat::zero();
                for (w, p) in col.iter().enumerate() {
                    if p.is_negative() {
                        bad.push(format!("F[{a}][{w}]: negative probability"));
                    }
                    sum = &sum + p;
                }
                if !sum.is_one() {
                    bad.push(format!("F[{a}]: column sums to {}, not 1", format_rat(&sum)));
                }
            }
        }
        if self.rewards.len() != n {
            bad.push(format!("R: {} columns for {} types", self.rewards.len(), n));
        } else {
            for (t, col) in self.rewards.iter().enumerate() {
                if col.len() != m {
                    bad.push(format!("R[{t}]: {} entries for {} outcomes", col.len(), m));
                    continue;
                }
                for (w, x) in col.iter().enumerate() {
                    if x.is_negative() || *x > Rat::one() {
                        bad.push(format!(
                            "R[{t}][{w}]: {} outside [0, 1]",
                            format_rat(x)
                        ));
                    }
                }
            }
        }
        if self.costs.len() != l {
            bad.push(format!(
                "costs: {} entries for {} actions",
                self.costs.len(),
                l
            ));
        } else {
            for (a, c) in self.costs.iter().enumerate() {
                if c.is_negative() {
                    bad.push(format!("costs[{a}]: negative cost"));
                }
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInstance(bad))
        }
    }

    pub fn to_json_string(&self) -> String {
        let doc = InstanceJson {
            version: SCHEMA_VERSION,
            types: self.types.clone(),
            type_dist: self.type_dist.iter().map(format_rat).collect(),
            outcomes: self.outcomes.clone(),
            actions: self.actions.clone(),
            f: self
                .outcome_dists
                .iter()
                .map(|col| col.iter().map(format_rat).collect())
                .collect(),
            r: self
                .rewards
                .iter()
                .map(|col| col.iter().map(format_rat).collect())
                .collect(),
            costs: self.costs.iter().map(format_rat).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("instance serialization cannot fail")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: InstanceJson = parse_doc(text)?;
        if doc.version != SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                expected: SCHEMA_VERSION,
                found: doc.version,
            });
        }
        let inst = DelegationInstance {
            types: doc.types,
            type_dist: parse_field_vec("type_dist", &doc.type_dist)?,
            outcomes: doc.outcomes,
            actions: doc.actions,
            outcome_dists: parse_field_mat("F", &doc.f)?,
            rewards: parse_field_mat("R", &doc.r)?,
            costs: parse_field_vec("costs", &doc.costs)?,
        };
        inst.validate()?;
        Ok(inst)
    }
}

/// Parses a JSON document, reporting the syntax location on failure.
pub(crate) fn parse_doc<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        Error::json(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })
}

pub(crate) fn parse_field_vec(field: &str, items: &[String]) -> Result<Vec<Rat>> {
    items
        .iter()
        .enumerate()
        .map(|(i, s)| parse_rat(s).map_err(|e| Error::json(format!("{field}[{i}]"), e.to_string())))
        .collect()
}

fn parse_field_mat(field: &str, cols: &[Vec<String>]) -> Result<Vec<Vec<Rat>>> {
    cols.iter()
        .enumerate()
        .map(|(i, col)| parse_field_vec(&format!("{field}[{i}]"), col))
        .collect()
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    version: u32,
    types: Vec<String>,
    type_dist: Vec<String>,
    outcomes: Vec<String>,
    actions: Vec<String>,
    #[serde(rename = "F")]
    f: Vec<Vec<String>>,
    #[serde(rename = "R")]
    r: Vec<Vec<String>>,
    costs: Vec<String>,
}

/// Whether a deterministic menu indexes schemes by type or anonymously.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MenuKind {
    /// One scheme per type, scheme `i` intended for type `i`.
    Direct,
    /// Anonymous menu of `k` schemes; every type picks freely.
    Indirect,
}

/// One menu entry: a recommended action with an outcome-contingent payment
/// vector, or an explicit opt-out entry (no action, no payments).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaymentScheme {
    pub action: Option<usize>,
    pub payments: Vec<Rat>,
}

impl PaymentScheme {
    pub fn opt_out() -> Self {
        PaymentScheme {
            action: None,
            payments: Vec::new(),
        }
    }
}

/// A deterministic menu of payment schemes over a fixed instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterministicMenu {
    pub kind: MenuKind,
    pub schemes: Vec<PaymentScheme>,
}

impl DeterministicMenu {
    pub fn new(kind: MenuKind, schemes: Vec<PaymentScheme>, inst: &DelegationInstance) -> Result<Self> {
        let menu = DeterministicMenu { kind, schemes };
        menu.validate(inst)?;
        Ok(menu)
    }

    pub fn validate(&self, inst: &DelegationInstance) -> Result<()> {
        if self.schemes.is_empty() {
            return Err(Error::Invalid("menu must contain at least one scheme".into()));
        }
        if self.kind == MenuKind::Direct && self.schemes.len() != inst.num_types() {
            return Err(Error::Invalid(format!(
                "direct menu has {} schemes for {} types",
                self.schemes.len(),
                inst.num_types()
            )));
        }
        for (i, s) in self.schemes.iter().enumerate() {
            match s.action {
                Some(a) => {
                    if a >= inst.num_actions() {
                        return Err(Error::Invalid(format!(
                            "scheme {i}: action index {a} out of range"
                        )));
                    }
                    if s.payments.len() != inst.num_outcomes() {
                        return Err(Error::Invalid(format!(
                            "scheme {i}: {} payments for {} outcomes",
                            s.payments.len(),
                            inst.num_outcomes()
                        )));
                    }
                    if s.payments.iter().any(|p| p.is_negative()) {
                        return Err(Error::Invalid(format!("scheme {i}: negative payment")));
                    }
                }
                None => {
                    if !s.payments.is_empty() {
                        return Err(Error::Invalid(format!(
                            "scheme {i}: opt-out scheme must not carry payments"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json_string(&self, inst: &DelegationInstance) -> String {
        let doc = MenuJson {
            version: SCHEMA_VERSION,
            kind: "deterministic".to_string(),
            menu_kind: self.kind,
            schemes: self
                .schemes
                .iter()
                .map(|s| SchemeJson {
                    action: s.action.map(|a| inst.actions[a].clone()),
                    payments: s.payments.iter().map(format_rat).collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("menu serialization cannot fail")
    }

    pub fn from_json_str(text: &str, inst: &DelegationInstance) -> Result<Self> {
        let doc: MenuJson = parse_doc(text)?;
        if doc.version != SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                expected: SCHEMA_VERSION,
                found: doc.version,
            });
        }
        if doc.kind != "deterministic" {
            return Err(Error::json("kind", format!("expected \"deterministic\", found {:?}", doc.kind)));
        }
        let mut schemes = Vec::with_capacity(doc.schemes.len());
        for (i, s) in doc.schemes.iter().enumerate() {
            let action = match &s.action {
                Some(id) => Some(inst.action_index(id)?),
                None => None,
            };
            schemes.push(PaymentScheme {
                action,
                payments: parse_field_vec(&format!("schemes[{i}].payments"), &s.payments)?,
            });
        }
        DeterministicMenu::new(doc.menu_kind, schemes, inst)
    }
}

#[derive(Serialize, Deserialize)]
struct MenuJson {
    version: u32,
    kind: String,
    menu_kind: MenuKind,
    schemes: Vec<SchemeJson>,
}

#[derive(Serialize, Deserialize)]
struct SchemeJson {
    action: Option<String>,
    payments: Vec<String>,
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use crate::rational::rat;

    /// Two types, two outcomes, two deterministic actions, zero costs,
    /// uniform prior, type `i` rewarding only outcome `i`.
    pub fn diag2() -> DelegationInstance {
        let inst = DelegationInstance {
            types: vec!["t1".into(), "t2".into()],
            type_dist: vec![rat(1, 2), rat(1, 2)],
            outcomes: vec!["w1".into(), "w2".into()],
            actions: vec!["a1".into(), "a2".into()],
            outcome_dists: vec![
                vec![rat(1, 1), rat(0, 1)],
                vec![rat(0, 1), rat(1, 1)],
            ],
            rewards: vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]],
            costs: vec![rat(0, 1), rat(0, 1)],
        };
        inst.validate().unwrap();
        inst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn round_trip_is_identity() {
        let inst = testutil::diag2();
        let text = inst.to_json_string();
        let back = DelegationInstance::from_json_str(&text).unwrap();
        assert_eq!(inst, back);
    }

    #[test]
    fn validation_collects_all_violations() {
        let mut inst = testutil::diag2();
        inst.type_dist[0] = rat(1, 3);
        inst.outcome_dists[1][0] = rat(1, 2);
        inst.rewards[0][1] = int(2);
        inst.costs[1] = int(-1);
        let err = inst.validate().unwrap_err();
        let Error::InvalidInstance(violations) = err else {
            panic!("wrong error kind");
        };
        let text = violations.join("\n");
        assert!(text.contains("type_dist: sums to 5/6"));
        assert!(text.contains("F[1]: column sums to 3/2"));
        assert!(text.contains("R[0][1]: 2 outside [0, 1]"));
        assert!(text.contains("costs[1]: negative cost"));
        assert_eq!(violations.len(), 4);
    }

    #[test]
    fn schema_version_is_checked() {
        let inst = testutil::diag2();
        let text = inst.to_json_string().replace("\"version\": 1", "\"version\": 9");
        match DelegationInstance::from_json_str(&text) {
            Err(Error::SchemaVersion { expected: 1, found: 9 }) => {}
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = DelegationInstance::from_json_str("{\"version\": 1,").unwrap_err();
        match err {
            Error::Json { location, .. } => assert!(location.contains("line 1")),
            other => panic!("unexpected: {other:?}"),
        }
        let inst = testutil::diag2();
        let text = inst.to_json_string().replace("\"1/2\"", "\"1/x\"");
        match DelegationInstance::from_json_str(&text) {
            Err(Error::Json { location, .. }) => assert_eq!(location, "type_dist[0]"),
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn menu_round_trip_and_invariants() {
        let inst = testutil::diag2();
        let menu = DeterministicMenu::new(
            MenuKind::Direct,
            vec![
                PaymentScheme {
                    action: Some(0),
                    payments: vec![int(1), int(0)],
                },
                PaymentScheme::opt_out(),
            ],
            &inst,
        )
        .unwrap();
        let text = menu.to_json_string(&inst);
        let back = DeterministicMenu::from_json_str(&text, &inst).unwrap();
        assert_eq!(menu, back);

        let bad = DeterministicMenu::new(
            MenuKind::Direct,
            vec![PaymentScheme::opt_out()],
            &inst,
        );
        assert!(bad.is_err(), "direct menu with wrong arity accepted");
    }

    #[test]
    fn expected_value_and_payment() {
        let inst = testutil::diag2();
        assert_eq!(inst.expected_value(0, 0), int(1));
        assert_eq!(inst.expected_value(0, 1), int(0));
        assert_eq!(inst.expected_payment(1, &[int(3), rat(1, 2)]), rat(1, 2));
    }
}
