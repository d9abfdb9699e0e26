//! Python bindings for the delegation solvers.
//!
//! Exposes instances, priced menus, and the main solve/verify entry points.
//! All numbers cross the boundary as exact rational strings ("3/4", "2"),
//! so nothing is lost to floating point; reports come back as dicts.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use delegation::continuous::{solve_continuous, ContinuousActionFamily};
use delegation::generators;
use delegation::oracle::brute_force_opt_k;
use delegation::pricing::{
    evaluate, restrict_to_selected, selection, solution_from_json_str, solution_to_json_string,
    solve_menu_k, PricingSolution, SolveOptions,
};
use delegation::randomized;
use delegation::rational::{format_rat, parse_rat};
use delegation::robust::{robustify as robustify_impl, verify_approx, RobustnessParams};
use delegation::{DelegationInstance, Rat};

fn err(e: delegation::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rational(flag: &str, text: &str) -> PyResult<Rat> {
    parse_rat(text).map_err(|e| PyValueError::new_err(format!("{flag}: {e}")))
}

/// A delegation instance: types with a prior, actions with costs and
/// outcome distributions, and per-type rewards over outcomes.
#[pyclass(frozen)]
struct Instance {
    inner: DelegationInstance,
}

#[pymethods]
impl Instance {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Instance {
            inner: DelegationInstance::from_json_str(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }

    /// Diagonal family: action i yields outcome i, valued only by type i.
    #[staticmethod]
    fn single_bad(n: usize) -> PyResult<Self> {
        Ok(Instance {
            inner: generators::gen_single_bad(n).map_err(err)?,
        })
    }

    /// Weighted family separating randomized from deterministic menus.
    #[staticmethod]
    fn gap(n: usize) -> PyResult<Self> {
        Ok(Instance {
            inner: generators::gen_randomized_gap(n).map_err(err)?,
        })
    }

    /// Seeded random instance on a coarse rational grid.
    #[staticmethod]
    fn random(n: usize, m: usize, l: usize, seed: u64) -> PyResult<Self> {
        Ok(Instance {
            inner: generators::gen_random(n, m, l, seed).map_err(err)?,
        })
    }

    /// Independent-set reduction: returns the instance and the scale beta.
    #[staticmethod]
    fn hardness(vertices: usize, edges: Vec<(usize, usize)>) -> PyResult<(Self, String)> {
        let graph = generators::GraphSpec::new(vertices, edges).map_err(err)?;
        let (inner, beta) = generators::gen_hardness(&graph).map_err(err)?;
        Ok((Instance { inner }, format_rat(&beta)))
    }

    #[getter]
    fn num_types(&self) -> usize {
        self.inner.num_types()
    }

    #[getter]
    fn num_outcomes(&self) -> usize {
        self.inner.num_outcomes()
    }

    #[getter]
    fn num_actions(&self) -> usize {
        self.inner.num_actions()
    }

    #[getter]
    fn types(&self) -> Vec<String> {
        self.inner.types.clone()
    }

    #[getter]
    fn actions(&self) -> Vec<String> {
        self.inner.actions.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance({} types, {} outcomes, {} actions)",
            self.inner.num_types(),
            self.inner.num_outcomes(),
            self.inner.num_actions()
        )
    }
}

/// A priced menu: items (action index, expected price) the user picks from.
#[pyclass(frozen)]
struct Menu {
    inner: PricingSolution,
}

#[pymethods]
impl Menu {
    #[staticmethod]
    fn from_json(text: &str, inst: &Instance) -> PyResult<Self> {
        Ok(Menu {
            inner: solution_from_json_str(text, &inst.inner).map_err(err)?,
        })
    }

    fn to_json(&self, inst: &Instance) -> String {
        solution_to_json_string(&inst.inner, &self.inner)
    }

    /// `(action index or None, price)` per item, prices as rational strings.
    fn items(&self) -> Vec<(Option<usize>, String)> {
        self.inner
            .items
            .iter()
            .map(|item| (item.action, format_rat(&item.q)))
            .collect()
    }

    #[getter]
    fn eps(&self) -> String {
        format_rat(&self.inner.eps)
    }

    /// Expected provider value under exact user best response.
    fn value(&self, inst: &Instance) -> String {
        format_rat(&evaluate(&inst.inner, &self.inner))
    }

    /// Item index each type picks (None = opts out).
    fn selection(&self, inst: &Instance) -> Vec<Option<usize>> {
        selection(&inst.inner, &self.inner)
            .into_iter()
            .map(|e| e.item)
            .collect()
    }

    /// Drops items no type picks.
    fn restrict(&self, inst: &Instance) -> Menu {
        Menu {
            inner: restrict_to_selected(&inst.inner, &self.inner),
        }
    }

    fn __repr__(&self) -> String {
        format!("Menu({} items, eps {})", self.inner.items.len(), self.eps())
    }
}

/// Exactly optimal menu of `k` priced items; returns `(value, Menu)`.
#[pyfunction]
#[pyo3(signature = (inst, k, eps = "0"))]
fn solve_det(inst: &Instance, k: usize, eps: &str) -> PyResult<(String, Menu)> {
    let opts = SolveOptions {
        eps: rational("eps", eps)?,
        ..SolveOptions::default()
    };
    let report = solve_menu_k(&inst.inner, k, &opts).map_err(err)?;
    Ok((
        format_rat(&report.value),
        Menu {
            inner: report.solution,
        },
    ))
}

/// Brute-force reference optimum; returns `(value, pairs searched, Menu)`.
#[pyfunction]
fn oracle(inst: &Instance, k: usize) -> PyResult<(String, u64, Menu)> {
    let result = brute_force_opt_k(&inst.inner, k).map_err(err)?;
    Ok((
        format_rat(&result.value),
        result.pairs,
        Menu {
            inner: result.witness.solution(),
        },
    ))
}

/// Randomized relaxation, regularized and recovered into an exact
/// randomized menu; returns `(value, menu JSON)`.
#[pyfunction]
fn solve_rand(inst: &Instance) -> PyResult<(String, String)> {
    let relaxed = randomized::solve_randomized_lp(&inst.inner).map_err(err)?;
    let regular = randomized::regularize(&inst.inner, &relaxed).map_err(err)?;
    let menu = randomized::recover_menu(&inst.inner, &regular).map_err(err)?;
    Ok((format_rat(&relaxed.value), menu.to_json_string(&inst.inner)))
}

/// Discounts and prunes a menu so it survives estimation error `delta`.
#[pyfunction]
#[pyo3(signature = (inst, menu, delta, eps = None))]
fn robustify<'py>(
    py: Python<'py>,
    inst: &Instance,
    menu: &Menu,
    delta: &str,
    eps: Option<&str>,
) -> PyResult<Bound<'py, PyDict>> {
    let eps = match eps {
        Some(text) => rational("eps", text)?,
        None => menu.inner.eps.clone(),
    };
    let params = RobustnessParams::new(rational("delta", delta)?, eps).map_err(err)?;
    let out = robustify_impl(&inst.inner, &menu.inner, &params).map_err(err)?;
    let report = PyDict::new(py);
    report.set_item("assumed_value", format_rat(&out.assumed_value))?;
    report.set_item("guarantee", format_rat(&out.guarantee))?;
    report.set_item("alpha", format_rat(&out.alpha))?;
    report.set_item("threshold", format_rat(&out.threshold))?;
    report.set_item("eps_out", format_rat(&out.eps_out))?;
    report.set_item("kept", out.kept.clone())?;
    report.set_item("dropped", out.dropped.clone())?;
    report.set_item("warnings", out.warnings.clone())?;
    report.set_item(
        "menu",
        Menu {
            inner: out.solution,
        }
        .into_pyobject(py)?,
    )?;
    Ok(report)
}

/// Measures a priced menu's exact slacks against an instance.
#[pyfunction]
fn verify<'py>(py: Python<'py>, inst: &Instance, menu: &Menu) -> PyResult<Bound<'py, PyDict>> {
    let report = verify_approx(&inst.inner, &menu.inner, None).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("user_ic_slack", format_rat(&report.user_ic_slack))?;
    out.set_item("user_ir_slack", format_rat(&report.user_ir_slack))?;
    out.set_item("provider_slack", format_rat(&report.provider_slack))?;
    out.set_item("unpriceable_items", report.unpriceable.clone())?;
    Ok(out)
}

/// Discretizes a continuous family (built-in "toy" or tabulated JSON) and
/// runs the full solve-and-robustify pipeline.
#[pyfunction]
#[pyo3(signature = (delta, family = "toy", family_json = None))]
fn solve_cont<'py>(
    py: Python<'py>,
    delta: &str,
    family: &str,
    family_json: Option<&str>,
) -> PyResult<Bound<'py, PyDict>> {
    let fam = match family_json {
        Some(text) => ContinuousActionFamily::from_json_str(text).map_err(err)?,
        None => match family {
            "toy" => ContinuousActionFamily::toy(),
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown family {other:?} (built-in: toy; or pass family_json)"
                )))
            }
        },
    };
    let report = solve_continuous(&fam, &rational("delta", delta)?).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("relaxed_value", format_rat(&report.relaxed_value))?;
    out.set_item("guarantee", format_rat(report.guarantee()))?;
    out.set_item("provider_slack", format_rat(&report.provider_slack))?;
    out.set_item("grid_size", report.program.grid.len())?;
    out.set_item(
        "instance",
        Instance {
            inner: report.program.instance.clone(),
        }
        .into_pyobject(py)?,
    )?;
    out.set_item(
        "menu",
        Menu {
            inner: report.robust.solution.clone(),
        }
        .into_pyobject(py)?,
    )?;
    Ok(out)
}

#[pymodule]
fn delegation_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Instance>()?;
    m.add_class::<Menu>()?;
    m.add_function(wrap_pyfunction!(solve_det, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(solve_rand, m)?)?;
    m.add_function(wrap_pyfunction!(robustify, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(solve_cont, m)?)?;
    Ok(())
}
