//! Instance families with known optimal values, plus seeded random
//! instances. The structured families pin down solver behavior exactly: a
//! diagonal family whose optimum grows linearly with menu size, a family
//! separating randomized from deterministic menus, and a graph reduction
//! whose menu value counts independent sets.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::instance::{DelegationInstance, DeterministicMenu, MenuKind, PaymentScheme};
use crate::rational::{rat, Rat};
use crate::Result;

/// Largest vertex count accepted by [`gen_hardness`]: the construction's
/// magnitudes grow like M^(M·M), which exact rationals handle but LP pivots
/// on them do not enjoy.
pub const MAX_HARDNESS_VERTICES: usize = 4;

/// An undirected graph with vertices labeled `1..=vertices`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSpec {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl GraphSpec {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for &(v, w) in &edges {
            if v == w {
                return Err(Error::Invalid(format!("graph has a self-loop at {v}")));
            }
            if v < 1 || v > vertices || w < 1 || w > vertices {
                return Err(Error::Invalid(format!(
                    "edge ({v}, {w}) out of range for {vertices} vertices"
                )));
            }
        }
        Ok(GraphSpec { vertices, edges })
    }

    pub fn has_edge(&self, v: usize, w: usize) -> bool {
        self.edges
            .iter()
            .any(|&(a, b)| (a, b) == (v, w) || (b, a) == (v, w))
    }
}

fn index_names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// The diagonal family: `n` types, actions, and outcomes; action `i`
/// deterministically produces outcome `i`, which only type `i` values (at 1).
/// Types are uniform and costs zero, so a menu of `k` items earns exactly
/// `k/n` and the full menu earns 1.
pub fn gen_single_bad(n: usize) -> Result<DelegationInstance> {
    if n < 1 {
        return Err(Error::Precondition("family size must be at least 1".into()));
    }
    let indicator = |i: usize| -> Vec<Rat> {
        (0..n)
            .map(|w| if w == i { Rat::one() } else { Rat::zero() })
            .collect()
    };
    let inst = DelegationInstance {
        types: index_names("t", n),
        type_dist: vec![rat(1, n as i64); n],
        outcomes: index_names("w", n),
        actions: index_names("a", n),
        outcome_dists: (0..n).map(indicator).collect(),
        rewards: (0..n).map(indicator).collect(),
        costs: vec![Rat::zero(); n],
    };
    inst.validate()?;
    Ok(inst)
}

/// The family separating randomized from deterministic menus. Types,
/// actions, and outcomes are indexed by pairs (i, j) with i ∈ 1..=n/2 and
/// j ∈ {1, 2}; action (i, j) deterministically produces outcome (i, j);
/// type (i, j) has weight 2^i (normalized) and reward 2^-i on every outcome
/// (k, z) except those with both k ≠ i and z ≠ j. Costs are zero.
pub fn gen_randomized_gap(n: usize) -> Result<DelegationInstance> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Precondition(
            "the separation family needs an even size of at least 2".into(),
        ));
    }
    let half = n / 2;
    let pairs: Vec<(usize, usize)> = (1..=half)
        .flat_map(|i| [(i, 1), (i, 2)])
        .collect();
    let names = |prefix: &str| -> Vec<String> {
        pairs
            .iter()
            .map(|(i, j)| format!("{prefix}{i}_{j}"))
            .collect()
    };
    let denom: BigInt = (1..=half).map(|k| BigInt::from(2).pow(k as u32 + 1)).sum();
    let inst = DelegationInstance {
        types: names("t"),
        type_dist: pairs
            .iter()
            .map(|(i, _)| Rat::new(BigInt::from(2).pow(*i as u32), denom.clone()))
            .collect(),
        outcomes: names("w"),
        actions: names("a"),
        outcome_dists: (0..n)
            .map(|p| {
                (0..n)
                    .map(|w| if w == p { Rat::one() } else { Rat::zero() })
                    .collect()
            })
            .collect(),
        rewards: pairs
            .iter()
            .map(|&(i, j)| {
                pairs
                    .iter()
                    .map(|&(k, z)| {
                        if k != i && z != j {
                            Rat::zero()
                        } else {
                            Rat::new(BigInt::one(), BigInt::from(2).pow(i as u32))
                        }
                    })
                    .collect()
            })
            .collect(),
        costs: vec![Rat::zero(); n],
    };
    inst.validate()?;
    Ok(inst)
}

fn hardness_power(m: usize, v: usize, i: usize) -> BigInt {
    BigInt::from(m).pow((m * v + i) as u32)
}

/// The graph reduction: one type, action, and outcome per pair (v, i) with
/// v a vertex and i ∈ 1..=N, N = M = vertex count. Action (v, i)
/// deterministically produces outcome (v, i); type (v, i) has weight
/// proportional to M^(Mv+i) and reward M^-(Mv+i) on its own outcome and on
/// every outcome of a smaller-labeled neighbor. Returns the instance and
/// the normalizer β = 1/Σ M^(Mv+i).
pub fn gen_hardness(graph: &GraphSpec) -> Result<(DelegationInstance, Rat)> {
    let m = graph.vertices;
    if m < 1 {
        return Err(Error::Precondition("graph must have a vertex".into()));
    }
    if m > MAX_HARDNESS_VERTICES {
        return Err(Error::SizeGuard {
            detail: "hardness construction vertex count".into(),
            estimate: m as u128,
            limit: MAX_HARDNESS_VERTICES as u128,
        });
    }
    let pairs: Vec<(usize, usize)> = (1..=m)
        .flat_map(|v| (1..=m).map(move |i| (v, i)))
        .collect();
    let n = pairs.len();
    let names = |prefix: &str| -> Vec<String> {
        pairs
            .iter()
            .map(|(v, i)| format!("{prefix}{v}_{i}"))
            .collect()
    };
    let beta_inv: BigInt = pairs.iter().map(|&(v, i)| hardness_power(m, v, i)).sum();
    let beta = Rat::new(BigInt::one(), beta_inv.clone());
    let inst = DelegationInstance {
        types: names("t"),
        type_dist: pairs
            .iter()
            .map(|&(v, i)| Rat::new(hardness_power(m, v, i), beta_inv.clone()))
            .collect(),
        outcomes: names("w"),
        actions: names("a"),
        outcome_dists: (0..n)
            .map(|p| {
                (0..n)
                    .map(|w| if w == p { Rat::one() } else { Rat::zero() })
                    .collect()
            })
            .collect(),
        rewards: pairs
            .iter()
            .map(|&(v, i)| {
                pairs
                    .iter()
                    .map(|&(w, j)| {
                        let own = w == v && j == i;
                        let neighbor = w < v && graph.has_edge(v, w);
                        if own || neighbor {
                            Rat::new(BigInt::one(), hardness_power(m, v, i))
                        } else {
                            Rat::zero()
                        }
                    })
                    .collect()
            })
            .collect(),
        costs: vec![Rat::zero(); n],
    };
    inst.validate()?;
    Ok((inst, beta))
}

/// Recovers the source graph of a [`gen_hardness`] instance from its reward
/// matrix: an edge {v, w} with w < v shows up as a positive reward of type
/// (v, 1) on outcome (w, 1).
fn hardness_graph(inst: &DelegationInstance) -> Result<GraphSpec> {
    let n = inst.num_types();
    let m = (1..=n).find(|&m| m * m == n).ok_or_else(|| {
        Error::Precondition(format!(
            "instance with {n} types is not a graph reduction (not a perfect square)"
        ))
    })?;
    let pair_index = |v: usize, i: usize| (v - 1) * m + (i - 1);
    let mut edges = Vec::new();
    for v in 2..=m {
        for w in 1..v {
            if !inst.rewards[pair_index(v, 1)][pair_index(w, 1)].is_zero() {
                edges.push((v, w));
            }
        }
    }
    GraphSpec::new(m, edges)
}

/// Builds the direct menu certifying an independent set on a
/// [`gen_hardness`] instance: each type of an independent-set vertex gets
/// its own action priced at its full reward; every other type gets the
/// candidate scheme maximizing its utility, with ties broken toward opting
/// out and then toward the lowest-indexed scheme. The menu's value is
/// exactly β · |independent set| · N.
pub fn gen_soundness_menu(
    inst: &DelegationInstance,
    independent_set: &[usize],
) -> Result<DeterministicMenu> {
    let graph = hardness_graph(inst)?;
    let m = graph.vertices;
    let mut chosen = vec![false; m + 1];
    for &v in independent_set {
        if v < 1 || v > m {
            return Err(Error::Precondition(format!(
                "vertex {v} out of range for {m} vertices"
            )));
        }
        chosen[v] = true;
    }
    for &v in independent_set {
        for &w in independent_set {
            if v != w && graph.has_edge(v, w) {
                return Err(Error::Precondition(format!(
                    "vertices {v} and {w} share an edge: the set is not independent"
                )));
            }
        }
    }

    let n = inst.num_types();
    let pair_of = |p: usize| (p / m + 1, p % m + 1);
    // Schemes for independent-set types: action (v, i) paid its full reward
    // on its own outcome.
    let star_schemes: Vec<(usize, PaymentScheme)> = (0..n)
        .filter(|&p| chosen[pair_of(p).0])
        .map(|p| {
            let mut payments = vec![Rat::zero(); inst.num_outcomes()];
            payments[p] = inst.rewards[p][p].clone();
            (
                p,
                PaymentScheme {
                    action: Some(p),
                    payments,
                },
            )
        })
        .collect();

    let schemes = (0..n)
        .map(|p| {
            if chosen[pair_of(p).0] {
                return star_schemes
                    .iter()
                    .find(|(q, _)| *q == p)
                    .expect("scheme built above")
                    .1
                    .clone();
            }
            // Best candidate for an outside type: opt-out wins ties.
            let mut best = (PaymentScheme::opt_out(), Rat::zero());
            for (_, scheme) in &star_schemes {
                let a = scheme.action.expect("star schemes act");
                let u = &inst.expected_value(p, a) - &inst.expected_payment(a, &scheme.payments);
                if u > best.1 {
                    best = (scheme.clone(), u);
                }
            }
            best.0
        })
        .collect();
    DeterministicMenu::new(MenuKind::Direct, schemes, inst)
}

/// A seeded random instance on the rational grid with denominator 12:
/// outcome distributions are normalized positive integer columns, rewards
/// and costs uniform grid points in [0, 1].
pub fn gen_random(n: usize, m: usize, l: usize, seed: u64) -> Result<DelegationInstance> {
    if n < 1 || m < 1 || l < 1 {
        return Err(Error::Precondition("sizes must be positive".into()));
    }
    const GRID: i64 = 12;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid_point = |rng: &mut ChaCha8Rng| rat(rng.random_range(0..=GRID), GRID);

    let type_weights: Vec<i64> = (0..n).map(|_| rng.random_range(1..=GRID)).collect();
    let type_total: i64 = type_weights.iter().sum();
    let outcome_dists: Vec<Vec<Rat>> = (0..l)
        .map(|_| {
            let mut col: Vec<i64> = (0..m).map(|_| rng.random_range(0..=GRID)).collect();
            if col.iter().all(|&x| x == 0) {
                col[rng.random_range(0..m)] = 1;
            }
            let total: i64 = col.iter().sum();
            col.into_iter().map(|x| rat(x, total)).collect()
        })
        .collect();
    let rewards: Vec<Vec<Rat>> = (0..n)
        .map(|_| (0..m).map(|_| grid_point(&mut rng)).collect())
        .collect();
    let costs: Vec<Rat> = (0..l).map(|_| grid_point(&mut rng)).collect();

    let inst = DelegationInstance {
        types: index_names("t", n),
        type_dist: type_weights.iter().map(|&w| rat(w, type_total)).collect(),
        outcomes: index_names("w", m),
        actions: index_names("a", l),
        outcome_dists,
        rewards,
        costs,
    };
    inst.validate()?;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::testutil::diag2;
    use crate::pricing::{evaluate, menu_to_pricing};
    use crate::rational::int;

    #[test]
    fn single_bad_2_is_the_diagonal_pair() {
        assert_eq!(gen_single_bad(2).unwrap(), diag2());
    }

    #[test]
    fn single_bad_structure() {
        let inst = gen_single_bad(3).unwrap();
        assert_eq!(inst.num_types(), 3);
        assert_eq!(inst.expected_value(0, 0), int(1));
        assert_eq!(inst.expected_value(0, 1), int(0));
        assert_eq!(inst.type_dist, vec![rat(1, 3); 3]);
        assert!(inst.costs.iter().all(|c| c.is_zero()));
    }

    #[test]
    fn randomized_gap_matches_the_formulas() {
        let inst = gen_randomized_gap(4).unwrap();
        assert_eq!(
            inst.type_dist,
            vec![rat(2, 12), rat(2, 12), rat(4, 12), rat(4, 12)]
        );
        // Pair order: (1,1), (1,2), (2,1), (2,2).
        assert_eq!(inst.rewards[0][3], int(0)); // both indices differ
        assert_eq!(inst.rewards[0][2], rat(1, 2)); // shared second index
        assert_eq!(inst.rewards[0][0], rat(1, 2)); // own outcome
        assert_eq!(inst.rewards[2][0], rat(1, 4)); // type (2,1) shares z = 1
        assert_eq!(inst.rewards[2][1], int(0)); // both indices differ
        let inst8 = gen_randomized_gap(8).unwrap();
        assert_eq!(inst8.num_types(), 8);
        assert_eq!(inst8.type_dist[0], rat(2, 60));

        assert!(gen_randomized_gap(3).is_err());
    }

    #[test]
    fn hardness_magnitudes_and_edges() {
        let edgeless = GraphSpec::new(2, vec![]).unwrap();
        let (inst, beta) = gen_hardness(&edgeless).unwrap();
        assert_eq!(beta, rat(1, 120));
        assert_eq!(inst.num_types(), 4);
        assert_eq!(inst.rewards[0][0], rat(1, 8)); // type (1,1) on own outcome
        assert_eq!(inst.rewards[2][0], int(0)); // no edge, no reward

        let edge = GraphSpec::new(2, vec![(1, 2)]).unwrap();
        let (inst, _) = gen_hardness(&edge).unwrap();
        // Type (2,1) values every outcome of its smaller neighbor at 2^-5.
        assert_eq!(inst.rewards[2][0], rat(1, 32));
        assert_eq!(inst.rewards[2][1], rat(1, 32));
        // The smaller endpoint gains nothing on the larger one's outcomes.
        assert_eq!(inst.rewards[0][2], int(0));

        let big = GraphSpec::new(5, vec![]).unwrap();
        assert!(matches!(
            gen_hardness(&big),
            Err(Error::SizeGuard { .. })
        ));
        assert!(GraphSpec::new(2, vec![(1, 1)]).is_err());
        assert!(GraphSpec::new(2, vec![(1, 3)]).is_err());
    }

    #[test]
    fn soundness_menu_counts_the_independent_set() {
        let edgeless = GraphSpec::new(2, vec![]).unwrap();
        let (inst, beta) = gen_hardness(&edgeless).unwrap();
        for (set, size) in [(vec![1, 2], 2), (vec![1], 1), (vec![], 0)] {
            let menu = gen_soundness_menu(&inst, &set).unwrap();
            let value = evaluate(&inst, &menu_to_pricing(&inst, &menu).unwrap());
            assert_eq!(value, &beta * &rat(size * 2, 1), "set {set:?}");
        }
        let menu = gen_soundness_menu(&inst, &[]).unwrap();
        assert!(menu.schemes.iter().all(|s| s.action.is_none()));

        let edge = GraphSpec::new(2, vec![(1, 2)]).unwrap();
        let (inst, beta) = gen_hardness(&edge).unwrap();
        assert!(matches!(
            gen_soundness_menu(&inst, &[1, 2]),
            Err(Error::Precondition(_))
        ));
        let menu = gen_soundness_menu(&inst, &[2]).unwrap();
        let value = evaluate(&inst, &menu_to_pricing(&inst, &menu).unwrap());
        assert_eq!(value, &beta * &int(2));
    }

    #[test]
    fn random_instances_are_reproducible_and_valid() {
        let a = gen_random(3, 2, 4, 7).unwrap();
        let b = gen_random(3, 2, 4, 7).unwrap();
        assert_eq!(a, b);
        let c = gen_random(3, 2, 4, 8).unwrap();
        assert_ne!(a, c);
        for seed in 0..20 {
            gen_random(2, 3, 2, seed).unwrap();
        }
    }
}
