//! Continuous action spaces by discretize-and-relax.
//!
//! Actions live on `[0, 1]` with Lipschitz outcome distributions and costs.
//! A uniform grid of spacing `delta` turns the problem finite; each type's
//! item values are widened to `[V - delta, V + delta]` so that any
//! off-grid action a user might compare against is covered, and price
//! floors are relaxed by `delta * (1 + 2/c)` (with `c` the smoothness
//! level) so every nearly-optimal continuous price stays feasible on the
//! grid. Solving the relaxed program and robustifying the result yields a
//! menu whose realized value under true, un-widened values trails the
//! continuous optimum only by explicit `O(sqrt(delta))` terms.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::floors::FloorTable;
use crate::instance::{parse_doc, parse_field_vec, DelegationInstance, SCHEMA_VERSION};
use crate::pricing::{restrict_to_selected, solve_menu_k, PricingSolution, SolveOptions};
use crate::rational::{format_rat, format_rat_vec, rat, Rat};
use crate::robust::{robustify, RobustifyOutput, RobustnessParams};
use crate::Result;

/// A family of actions indexed by `a` in `[0, 1]`, with declared Lipschitz
/// constants for the outcome distribution and cost maps and a declared
/// smoothness level `c` (every outcome is reachable with probability at
/// least `c` by some action). Declarations are spot-checked on each grid
/// used; global validity is the caller's responsibility.
#[derive(Debug, Clone)]
pub struct ContinuousActionFamily {
    pub name: String,
    pub types: Vec<String>,
    pub type_dist: Vec<Rat>,
    pub outcomes: Vec<String>,
    /// `rewards[t][w]`: type `t`'s reward on outcome `w`.
    pub rewards: Vec<Vec<Rat>>,
    pub lipschitz_f: Rat,
    pub lipschitz_c: Rat,
    pub smoothness: Rat,
    kind: FamilyKind,
}

#[derive(Debug, Clone)]
enum FamilyKind {
    /// Two outcomes: `F_a = (1/2 + a/2, 1/2 - a/2)`, cost `a/2`.
    Toy,
    /// Piecewise-linear interpolation of tabulated sample points.
    Tabulated {
        grid: Vec<Rat>,
        dists: Vec<Vec<Rat>>,
        costs: Vec<Rat>,
    },
}

impl ContinuousActionFamily {
    /// The two-outcome family `F_a = (1/2 + a/2, 1/2 - a/2)`, `c_a = a/2`,
    /// with a single type rewarding only the first outcome. Every action
    /// nets surplus exactly `1/2`, so the continuous optimum is `1/2`.
    pub fn toy() -> Self {
        ContinuousActionFamily {
            name: "toy".into(),
            types: vec!["t1".into()],
            type_dist: vec![Rat::one()],
            outcomes: vec!["w1".into(), "w2".into()],
            rewards: vec![vec![Rat::one(), Rat::zero()]],
            lipschitz_f: Rat::one(),
            lipschitz_c: Rat::one(),
            smoothness: rat(1, 2),
            kind: FamilyKind::Toy,
        }
    }

    /// A family given by sample points `(a, F_a, c_a)` covering `[0, 1]`,
    /// evaluated between samples by linear interpolation (which keeps
    /// distributions valid and arithmetic exact).
    #[allow(clippy::too_many_arguments)]
    pub fn tabulated(
        name: String,
        types: Vec<String>,
        type_dist: Vec<Rat>,
        outcomes: Vec<String>,
        rewards: Vec<Vec<Rat>>,
        samples: Vec<(Rat, Vec<Rat>, Rat)>,
        lipschitz_f: Rat,
        lipschitz_c: Rat,
        smoothness: Rat,
    ) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Precondition(
                "a tabulated family needs at least two sample points".into(),
            ));
        }
        if !samples[0].0.is_zero() || !samples[samples.len() - 1].0.is_one() {
            return Err(Error::Precondition(
                "tabulated samples must start at a = 0 and end at a = 1".into(),
            ));
        }
        let m = outcomes.len();
        let mut grid = Vec::with_capacity(samples.len());
        let mut dists = Vec::with_capacity(samples.len());
        let mut costs = Vec::with_capacity(samples.len());
        for (i, (a, dist, cost)) in samples.into_iter().enumerate() {
            if i > 0 && a <= grid[i - 1] {
                return Err(Error::Precondition(format!(
                    "tabulated sample actions must strictly increase (sample {i})"
                )));
            }
            if dist.len() != m {
                return Err(Error::Precondition(format!(
                    "sample {i}: distribution over {} outcomes, expected {m}",
                    dist.len()
                )));
            }
            let total = dist.iter().fold(Rat::zero(), |acc, p| &acc + p);
            if dist.iter().any(|p| p.is_negative()) || !total.is_one() {
                return Err(Error::Precondition(format!(
                    "sample {i}: not a probability distribution"
                )));
            }
            if cost.is_negative() {
                return Err(Error::Precondition(format!("sample {i}: negative cost")));
            }
            grid.push(a);
            dists.push(dist);
            costs.push(cost);
        }
        if !smoothness.is_positive() {
            return Err(Error::Precondition(
                "smoothness level must be positive".into(),
            ));
        }
        let family = ContinuousActionFamily {
            name,
            types,
            type_dist,
            outcomes,
            rewards,
            lipschitz_f,
            lipschitz_c,
            smoothness,
            kind: FamilyKind::Tabulated { grid, dists, costs },
        };
        Ok(family)
    }

    /// Outcome distribution and cost of action `a`.
    pub fn eval(&self, a: &Rat) -> Result<(Vec<Rat>, Rat)> {
        if a.is_negative() || *a > Rat::one() {
            return Err(Error::Precondition(format!(
                "action {a} lies outside [0, 1]"
            )));
        }
        match &self.kind {
            FamilyKind::Toy => {
                let half = rat(1, 2);
                let lean = a / &Rat::from_integer(2.into());
                Ok((vec![&half + &lean, &half - &lean], lean))
            }
            FamilyKind::Tabulated { grid, dists, costs } => {
                let hi = grid.partition_point(|g| g < a);
                if hi < grid.len() && grid[hi] == *a {
                    return Ok((dists[hi].clone(), costs[hi].clone()));
                }
                let lo = hi - 1;
                let lambda = &(a - &grid[lo]) / &(&grid[hi] - &grid[lo]);
                let keep = &Rat::one() - &lambda;
                let dist = dists[lo]
                    .iter()
                    .zip(&dists[hi])
                    .map(|(x, y)| &(&keep * x) + &(&lambda * y))
                    .collect();
                let cost = &(&keep * &costs[lo]) + &(&lambda * &costs[hi]);
                Ok((dist, cost))
            }
        }
    }

    pub fn to_json_string(&self) -> Result<String> {
        let FamilyKind::Tabulated { grid, dists, costs } = &self.kind else {
            return Err(Error::Precondition(
                "only tabulated families serialize; built-in families are selected by name".into(),
            ));
        };
        let doc = FamilyJson {
            version: SCHEMA_VERSION,
            kind: "continuous_family".into(),
            name: self.name.clone(),
            types: self.types.clone(),
            type_dist: format_rat_vec(&self.type_dist),
            outcomes: self.outcomes.clone(),
            rewards: self.rewards.iter().map(|r| format_rat_vec(r)).collect(),
            lipschitz_f: format_rat(&self.lipschitz_f),
            lipschitz_c: format_rat(&self.lipschitz_c),
            smoothness: format_rat(&self.smoothness),
            samples: grid
                .iter()
                .zip(dists)
                .zip(costs)
                .map(|((a, dist), cost)| SampleJson {
                    action: format_rat(a),
                    dist: format_rat_vec(dist),
                    cost: format_rat(cost),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&doc).expect("family serialization cannot fail"))
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: FamilyJson = parse_doc(text)?;
        if doc.version != SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                expected: SCHEMA_VERSION,
                found: doc.version,
            });
        }
        if doc.kind != "continuous_family" {
            return Err(Error::json(
                "kind",
                format!("expected \"continuous_family\", found {:?}", doc.kind),
            ));
        }
        let mut rewards = Vec::with_capacity(doc.rewards.len());
        for (t, row) in doc.rewards.iter().enumerate() {
            rewards.push(parse_field_vec(&format!("rewards[{t}]"), row)?);
        }
        let mut samples = Vec::with_capacity(doc.samples.len());
        for (i, s) in doc.samples.iter().enumerate() {
            samples.push((
                parse_field_vec(&format!("samples[{i}].action"), std::slice::from_ref(&s.action))?
                    .pop()
                    .expect("one element"),
                parse_field_vec(&format!("samples[{i}].dist"), &s.dist)?,
                parse_field_vec(&format!("samples[{i}].cost"), std::slice::from_ref(&s.cost))?
                    .pop()
                    .expect("one element"),
            ));
        }
        ContinuousActionFamily::tabulated(
            doc.name,
            doc.types,
            parse_field_vec("type_dist", &doc.type_dist)?,
            doc.outcomes,
            rewards,
            samples,
            parse_field_vec("lipschitz_f", &[doc.lipschitz_f])?
                .pop()
                .expect("one element"),
            parse_field_vec("lipschitz_c", &[doc.lipschitz_c])?
                .pop()
                .expect("one element"),
            parse_field_vec("smoothness", &[doc.smoothness])?
                .pop()
                .expect("one element"),
        )
    }
}

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    version: u32,
    kind: String,
    name: String,
    types: Vec<String>,
    type_dist: Vec<String>,
    outcomes: Vec<String>,
    rewards: Vec<Vec<String>>,
    lipschitz_f: String,
    lipschitz_c: String,
    smoothness: String,
    samples: Vec<SampleJson>,
}

#[derive(Serialize, Deserialize)]
struct SampleJson {
    action: String,
    dist: Vec<String>,
    cost: String,
}

/// A family snapped to the grid `{0, delta, 2*delta, ..., 1}`: a finite
/// instance whose actions are the grid points, widened item values on each
/// side, and the relaxed floor level for pricing.
#[derive(Debug, Clone)]
pub struct DiscretizedProgram {
    pub delta: Rat,
    pub grid: Vec<Rat>,
    pub instance: DelegationInstance,
    /// `V(t, a) + delta` per type and grid action.
    pub w_own: Vec<Vec<Rat>>,
    /// `V(t, a) - delta` per type and grid action.
    pub w_other: Vec<Vec<Rat>>,
    /// Floor relaxation level `delta * (1 + 2/c)`.
    pub floor_eps: Rat,
    pub floors: FloorTable,
}

/// Snaps `family` to the uniform grid of spacing `delta`, spot-checking
/// the declared Lipschitz constants between neighbors and the declared
/// smoothness on the grid.
pub fn discretize(family: &ContinuousActionFamily, delta: &Rat) -> Result<DiscretizedProgram> {
    if !delta.is_positive() || *delta > Rat::one() {
        return Err(Error::Precondition(format!(
            "grid spacing {delta} must lie in (0, 1]"
        )));
    }
    let mut grid = Vec::new();
    let mut a = Rat::zero();
    while a < Rat::one() {
        grid.push(a.clone());
        a = &a + delta;
    }
    grid.push(Rat::one());

    let mut dists = Vec::with_capacity(grid.len());
    let mut costs = Vec::with_capacity(grid.len());
    for a in &grid {
        let (dist, cost) = family.eval(a)?;
        dists.push(dist);
        costs.push(cost);
    }
    for j in 1..grid.len() {
        let step = &grid[j] - &grid[j - 1];
        let f_dist: Rat = dists[j]
            .iter()
            .zip(&dists[j - 1])
            .fold(Rat::zero(), |acc, (x, y)| &acc + &(x - y).abs());
        if f_dist > &family.lipschitz_f * &step {
            return Err(Error::Precondition(format!(
                "outcome distributions move {f_dist} over a step of {step}, violating the declared Lipschitz constant {}",
                family.lipschitz_f
            )));
        }
        let c_dist = (&costs[j] - &costs[j - 1]).abs();
        if c_dist > &family.lipschitz_c * &step {
            return Err(Error::Precondition(format!(
                "costs move {c_dist} over a step of {step}, violating the declared Lipschitz constant {}",
                family.lipschitz_c
            )));
        }
    }
    for (w, name) in family.outcomes.iter().enumerate() {
        if dists.iter().all(|d| d[w] < family.smoothness) {
            return Err(Error::Precondition(format!(
                "no grid action reaches outcome {name:?} with probability at least the declared smoothness {}",
                family.smoothness
            )));
        }
    }

    let instance = DelegationInstance {
        types: family.types.clone(),
        type_dist: family.type_dist.clone(),
        outcomes: family.outcomes.clone(),
        actions: grid.iter().map(|a| format!("a={}", format_rat(a))).collect(),
        outcome_dists: dists,
        rewards: family.rewards.clone(),
        costs,
    };
    instance.validate()?;

    let n = instance.num_types();
    let mut w_own = vec![Vec::with_capacity(grid.len()); n];
    let mut w_other = vec![Vec::with_capacity(grid.len()); n];
    for t in 0..n {
        for j in 0..grid.len() {
            let v = instance.expected_value(t, j);
            w_own[t].push(&v + delta);
            w_other[t].push(&v - delta);
        }
    }
    // delta * (1 + 2/c): how much floor slack projecting a continuous
    // action onto the grid can cost.
    let floor_eps = delta * &(&Rat::one() + &(&rat(2, 1) / &family.smoothness));
    let floors = FloorTable::new(&instance, &floor_eps, None)?;
    Ok(DiscretizedProgram {
        delta: delta.clone(),
        grid,
        instance,
        w_own,
        w_other,
        floor_eps,
        floors,
    })
}

/// Everything the continuous pipeline produces: the discretization, the
/// relaxed optimum it solved, and the robustified menu with its guarantees.
#[derive(Debug, Clone)]
pub struct ContinuousReport {
    pub program: DiscretizedProgram,
    /// Value of the relaxed grid optimum (under widened values).
    pub relaxed_value: Rat,
    pub robust: RobustifyOutput,
    /// Provider-side slack of the final menu against the full continuous
    /// action set: `2*delta*(1 + 2/c) + sqrt(2*delta)`.
    pub provider_slack: Rat,
}

impl ContinuousReport {
    /// The final indirect menu.
    pub fn solution(&self) -> &PricingSolution {
        &self.robust.solution
    }

    /// Lower bound on realized value under true values:
    /// `relaxed_value - 2*sqrt(2*delta) - sqrt(4*delta)`.
    pub fn guarantee(&self) -> &Rat {
        &self.robust.guarantee
    }
}

/// Runs the whole pipeline: discretize, solve the relaxed program as a
/// direct menu over the grid (one item per type, widened own-values,
/// shrunk comparison values, relaxed floors), drop unsold items, and
/// robustify against the `2*delta` value error the widening introduced.
pub fn solve_continuous(
    family: &ContinuousActionFamily,
    delta: &Rat,
) -> Result<ContinuousReport> {
    let program = discretize(family, delta)?;
    let n = program.instance.num_types();
    let opts = SolveOptions {
        eps: program.floor_eps.clone(),
        w_own: Some(program.w_own.clone()),
        w_other: Some(program.w_other.clone()),
    };
    let report = solve_menu_k(&program.instance, n, &opts)?;
    let menu = restrict_to_selected(&program.instance, &report.solution);
    // A grid solution is within 2*delta of user incentive compatibility
    // under true values, and its floor slack doubles when deviations range
    // over the whole interval instead of the grid.
    let two_delta = delta + delta;
    let params = RobustnessParams::new(
        two_delta.clone(),
        &program.floor_eps + &program.floor_eps,
    )?;
    let robust = robustify(&program.instance, &menu, &params)?;
    let provider_slack = &robust.eps_out;
    debug_assert_eq!(robust.assumed_value, report.value);
    Ok(ContinuousReport {
        provider_slack: provider_slack.clone(),
        relaxed_value: report.value,
        robust,
        program,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pricing::evaluate;
    use crate::rational::{int, sqrt_upper};
    use crate::robust::true_response_value;

    fn constant_family() -> ContinuousActionFamily {
        ContinuousActionFamily::tabulated(
            "flat".into(),
            vec!["t1".into()],
            vec![int(1)],
            vec!["w1".into(), "w2".into()],
            vec![vec![int(1), rat(1, 2)]],
            vec![
                (int(0), vec![rat(1, 2), rat(1, 2)], int(0)),
                (int(1), vec![rat(1, 2), rat(1, 2)], int(0)),
            ],
            int(1),
            int(1),
            rat(1, 2),
        )
        .unwrap()
    }

    #[test]
    fn toy_discretization_matches_hand_values() {
        let fam = ContinuousActionFamily::toy();
        let disc = discretize(&fam, &rat(1, 4)).unwrap();
        assert_eq!(
            disc.grid,
            vec![int(0), rat(1, 4), rat(1, 2), rat(3, 4), int(1)]
        );
        for (j, a) in disc.grid.iter().enumerate() {
            let v = &rat(1, 2) + &(a / &int(2));
            assert_eq!(disc.w_own[0][j], &v + &rat(1, 4));
            assert_eq!(disc.w_other[0][j], &v - &rat(1, 4));
            assert_eq!(&disc.w_own[0][j] - &disc.w_other[0][j], rat(1, 2));
            assert_eq!(disc.instance.costs[j], a / &int(2));
        }
        // 1 + 2/c with c = 1/2 is 5.
        assert_eq!(disc.floor_eps, rat(5, 4));
    }

    #[test]
    fn coarse_and_ragged_grids() {
        let fam = ContinuousActionFamily::toy();
        assert_eq!(discretize(&fam, &int(1)).unwrap().grid, vec![int(0), int(1)]);
        assert_eq!(
            discretize(&fam, &rat(2, 5)).unwrap().grid,
            vec![int(0), rat(2, 5), rat(4, 5), int(1)]
        );
        assert!(discretize(&fam, &int(0)).is_err());
        assert!(discretize(&fam, &int(2)).is_err());
    }

    #[test]
    fn undeliverable_smoothness_is_reported() {
        let fam = ContinuousActionFamily::tabulated(
            "skewed".into(),
            vec!["t1".into()],
            vec![int(1)],
            vec!["w1".into(), "w2".into()],
            vec![vec![int(1), int(0)]],
            vec![
                (int(0), vec![int(1), int(0)], int(0)),
                (int(1), vec![int(1), int(0)], int(0)),
            ],
            int(1),
            int(1),
            rat(1, 2),
        )
        .unwrap();
        let err = discretize(&fam, &rat(1, 2)).unwrap_err();
        assert!(err.to_string().contains("smoothness"));
    }

    #[test]
    fn lipschitz_declarations_are_spot_checked() {
        let fam = ContinuousActionFamily::tabulated(
            "jumpy".into(),
            vec!["t1".into()],
            vec![int(1)],
            vec!["w1".into(), "w2".into()],
            vec![vec![int(1), int(0)]],
            vec![
                (int(0), vec![int(1), int(0)], int(0)),
                (rat(1, 2), vec![int(0), int(1)], int(0)),
                (int(1), vec![int(0), int(1)], int(0)),
            ],
            int(1),
            int(1),
            rat(1, 2),
        )
        .unwrap();
        // The distribution moves total-variation 1 over a quarter step.
        let err = discretize(&fam, &rat(1, 4)).unwrap_err();
        assert!(err.to_string().contains("Lipschitz"));
    }

    #[test]
    fn midpoints_stay_inside_the_widened_values() {
        let fam = ContinuousActionFamily::toy();
        let delta = rat(1, 8);
        let disc = discretize(&fam, &delta).unwrap();
        for (j, a) in disc.grid.iter().enumerate() {
            for offset in [-&(&delta / &int(2)), (&delta / &int(2))] {
                let probe = a + &offset;
                if probe.is_negative() || probe > int(1) {
                    continue;
                }
                let (dist, _) = fam.eval(&probe).unwrap();
                let v = crate::solvers::dot(&dist, &fam.rewards[0]);
                assert!(v <= disc.w_own[0][j], "probe {probe} vs grid {a}");
                assert!(v >= disc.w_other[0][j], "probe {probe} vs grid {a}");
            }
        }
    }

    #[test]
    fn nearby_grid_floors_cover_unrelaxed_prices() {
        // Any implementable price (at most 1) of a grid action stays
        // feasible at its neighbor once floors relax by delta * (1 + 2/c).
        let fam = ContinuousActionFamily::toy();
        let delta = rat(1, 8);
        let disc = discretize(&fam, &delta).unwrap();
        let strict = FloorTable::new(&disc.instance, &Rat::zero(), None).unwrap();
        for j in 0..disc.grid.len() {
            let Some(f) = strict.floor(j) else { continue };
            if *f > int(1) {
                continue;
            }
            for adj in [j.wrapping_sub(1), j + 1] {
                if adj >= disc.grid.len() {
                    continue;
                }
                let relaxed = disc.floors.floor(adj).expect("relaxed floors exist");
                assert!(
                    relaxed <= f,
                    "floor({adj}, relaxed) = {relaxed} > floor({j}, 0) = {f}"
                );
            }
        }
    }

    #[test]
    fn toy_pipeline_meets_its_guarantee() {
        let fam = ContinuousActionFamily::toy();
        for delta in [rat(1, 16), rat(1, 64)] {
            let report = solve_continuous(&fam, &delta).unwrap();
            // Every grid action nets 1/2, widened by delta.
            assert_eq!(report.relaxed_value, &rat(1, 2) + &delta);
            let two_delta = &delta + &delta;
            let expected_slack =
                &(&two_delta * &int(5)) + &sqrt_upper(&two_delta).unwrap();
            assert_eq!(report.provider_slack, expected_slack);
            let expected_guarantee = &(&report.relaxed_value
                - &(&sqrt_upper(&two_delta).unwrap() * &int(2)))
                - &sqrt_upper(&(&two_delta + &two_delta)).unwrap();
            assert_eq!(*report.guarantee(), expected_guarantee);

            let realized = true_response_value(&report.program.instance, report.solution());
            assert!(realized >= *report.guarantee());
            assert!(realized.is_positive());
        }
    }

    #[test]
    fn constant_families_reduce_to_one_action() {
        let fam = constant_family();
        let delta = rat(1, 4);
        let report = solve_continuous(&fam, &delta).unwrap();
        // One real action in disguise: compare against the single-action
        // instance solved without any widening.
        let single = DelegationInstance {
            types: vec!["t1".into()],
            type_dist: vec![int(1)],
            outcomes: vec!["w1".into(), "w2".into()],
            actions: vec!["a".into()],
            outcome_dists: vec![vec![rat(1, 2), rat(1, 2)]],
            rewards: vec![vec![int(1), rat(1, 2)]],
            costs: vec![int(0)],
        };
        single.validate().unwrap();
        let plain = solve_menu_k(&single, 1, &SolveOptions::default()).unwrap();
        assert_eq!(report.relaxed_value, &plain.value + &delta);
        let realized = true_response_value(&report.program.instance, report.solution());
        assert!(realized >= *report.guarantee());
    }

    #[test]
    fn relaxed_optimum_dominates_projected_menus() {
        // Projecting any continuous menu onto the grid loses at most delta:
        // here, the hand optimum (price 1/2 at a = 0) projects exactly, so
        // the relaxed value must reach 1/2 + delta... and a fortiori 1/2.
        let fam = ContinuousActionFamily::toy();
        let delta = rat(1, 8);
        let report = solve_continuous(&fam, &delta).unwrap();
        let hand_optimum = rat(1, 2);
        assert!(report.relaxed_value >= &hand_optimum - &delta);
        assert!(report.relaxed_value >= hand_optimum);
    }

    #[test]
    fn pipeline_value_is_checkable_without_overrides() {
        let fam = ContinuousActionFamily::toy();
        let delta = rat(1, 16);
        let report = solve_continuous(&fam, &delta).unwrap();
        // The final menu carries no widened values; plain evaluation and
        // the true-response view agree.
        assert!(report.solution().w_own.is_none());
        assert_eq!(
            evaluate(&report.program.instance, report.solution()),
            true_response_value(&report.program.instance, report.solution())
        );
    }

    #[test]
    fn family_json_round_trips() {
        let fam = constant_family();
        let text = fam.to_json_string().unwrap();
        let back = ContinuousActionFamily::from_json_str(&text).unwrap();
        assert_eq!(back.name, fam.name);
        assert_eq!(back.smoothness, fam.smoothness);
        let (d1, c1) = fam.eval(&rat(1, 3)).unwrap();
        let (d2, c2) = back.eval(&rat(1, 3)).unwrap();
        assert_eq!(d1, d2);
        assert_eq!(c1, c2);

        assert!(ContinuousActionFamily::toy().to_json_string().is_err());
    }

    #[test]
    fn interpolation_is_exact() {
        let fam = ContinuousActionFamily::tabulated(
            "ramp".into(),
            vec!["t1".into()],
            vec![int(1)],
            vec!["w1".into(), "w2".into()],
            vec![vec![int(1), int(0)]],
            vec![
                (int(0), vec![int(1), int(0)], int(0)),
                (int(1), vec![rat(1, 2), rat(1, 2)], rat(1, 2)),
            ],
            int(1),
            int(1),
            rat(1, 2),
        )
        .unwrap();
        let (dist, cost) = fam.eval(&rat(1, 3)).unwrap();
        assert_eq!(dist, vec![rat(5, 6), rat(1, 6)]);
        assert_eq!(cost, rat(1, 6));
        assert!(fam.eval(&rat(3, 2)).is_err());
        assert!(fam.eval(&rat(-1, 2)).is_err());
    }
}
