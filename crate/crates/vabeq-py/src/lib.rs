//! Python bindings: groups, equation systems, EDT0L systems and the growth
//! pipeline, all driven by the same structured text formats as the CLI.

use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use std::collections::BTreeMap;
use vabeq::edt0l;
use vabeq::equations;
use vabeq::format;
use vabeq::growth;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// A virtually abelian group with its weighted generating set, parsed from
/// the `vabeq group v1` text format.
#[pyclass]
struct Group {
    file: format::GroupFile,
}

#[pymethods]
impl Group {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Group { file: format::parse_group(text).map_err(value_err)? })
    }

    #[getter]
    fn rank(&self) -> usize {
        self.file.spec.rank()
    }

    #[getter]
    fn cosets(&self) -> usize {
        self.file.spec.coset_count()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.file.spec.labels().to_vec()
    }

    #[getter]
    fn generators(&self) -> Vec<(String, Vec<BigInt>, usize, u64)> {
        let gens = &self.file.generators;
        gens.names
            .iter()
            .zip(&gens.elements)
            .zip(&gens.weights)
            .map(|((n, g), &w)| (n.clone(), g.vector.clone(), g.coset, w))
            .collect()
    }

    /// Canonical serialization (bit-exact round trip).
    fn dump(&self) -> String {
        format::write_group(&self.file.spec, &self.file.generators)
    }

    /// Geodesic ball: elements of weight at most `max_weight` with weights.
    fn ball(&self, max_weight: u64) -> PyResult<Vec<(Vec<BigInt>, usize, u64)>> {
        let ball = self
            .file
            .spec
            .ball(&self.file.generators, max_weight)
            .map_err(runtime_err)?;
        Ok(ball.into_iter().map(|(g, w)| (g.vector, g.coset, w)).collect())
    }

    fn __repr__(&self) -> String {
        format!("Group(rank={}, cosets={})", self.file.spec.rank(), self.file.spec.coset_count())
    }
}

/// A system of equations, parsed from the `vabeq system v1` text format.
#[pyclass]
struct EquationSystem {
    system: equations::GroupEquationSystem,
}

#[pymethods]
impl EquationSystem {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(EquationSystem { system: format::parse_system(text).map_err(value_err)? })
    }

    #[getter]
    fn variables(&self) -> usize {
        self.system.variables
    }

    #[getter]
    fn equations(&self) -> usize {
        self.system.equations.len()
    }

    fn dump(&self) -> String {
        format::write_system(&self.system)
    }

    fn __repr__(&self) -> String {
        format!(
            "EquationSystem(variables={}, equations={})",
            self.system.variables,
            self.system.equations.len()
        )
    }
}

/// An EDT0L system with automaton-shaped rational control.
#[pyclass]
struct Edt0l {
    system: edt0l::Edt0lSystem,
}

#[pymethods]
impl Edt0l {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Edt0l { system: format::parse_edt0l(text).map_err(value_err)? })
    }

    #[getter]
    fn states(&self) -> usize {
        self.system.control.states
    }

    #[getter]
    fn letters(&self) -> Vec<String> {
        self.system.alphabet.names().to_vec()
    }

    #[getter]
    fn terminals(&self) -> Vec<String> {
        self.system
            .terminals
            .iter()
            .map(|&t| self.system.alphabet.name(t).to_string())
            .collect()
    }

    fn dump(&self) -> String {
        format::write_edt0l(&self.system)
    }

    fn dot(&self) -> String {
        format::control_dot(&self.system)
    }

    /// Words of the language up to `max_len`, with a completeness flag.
    #[pyo3(signature = (max_len, max_steps=4000))]
    fn enumerate(&self, max_len: usize, max_steps: usize) -> (Vec<String>, bool) {
        let (words, saturated) = self.system.enumerate_strings(max_len, max_steps);
        (words.into_iter().collect(), !saturated)
    }

    fn union(&self, other: &Edt0l) -> Edt0l {
        Edt0l { system: edt0l::union(&self.system, &other.system) }
    }

    fn concat(&self, other: &Edt0l) -> Edt0l {
        Edt0l { system: edt0l::concat(&self.system, &other.system) }
    }

    fn star(&self) -> Edt0l {
        Edt0l { system: edt0l::star(&self.system) }
    }

    /// Image under a terminal-letter homomorphism given as a dict of letter
    /// name to list of target letter names.
    fn hom_image(&self, mapping: BTreeMap<String, Vec<String>>, targets: Vec<String>) -> PyResult<Edt0l> {
        Ok(Edt0l {
            system: edt0l::hom_image(&self.system, &mapping, &targets).map_err(runtime_err)?,
        })
    }

    /// Intersection with the regular language of a `vabeq automaton v1` file.
    fn intersect_regular(&self, automaton_text: &str) -> PyResult<Edt0l> {
        let automaton = format::parse_automaton(automaton_text).map_err(value_err)?;
        Ok(Edt0l {
            system: edt0l::intersect_regular(&self.system, &automaton).map_err(runtime_err)?,
        })
    }

    /// Replace the `#` separators of an n-block language by positional ones.
    fn separate_hashes(&self, blocks: usize) -> PyResult<Edt0l> {
        Ok(Edt0l {
            system: edt0l::separate_hashes(&self.system, blocks).map_err(runtime_err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Edt0l(states={}, endos={}, letters={})",
            self.system.control.states,
            self.system.endos.len(),
            self.system.alphabet.len()
        )
    }
}

/// A group element as seen from Python: integer vector plus coset index.
type PyElement = (Vec<BigInt>, usize);

/// All solution tuples with every coordinate in the weight ball; each tuple
/// entry is `(vector, coset_index)`.
#[pyfunction]
fn solve(
    group: &Group,
    system: &EquationSystem,
    max_weight: u64,
) -> PyResult<Vec<Vec<PyElement>>> {
    let solutions = equations::brute_force_group_solutions(
        &system.system,
        &group.file.spec,
        &group.file.generators,
        max_weight,
    )
    .map_err(runtime_err)?;
    Ok(solutions
        .into_iter()
        .map(|tuple| tuple.into_iter().map(|g| (g.vector, g.coset)).collect())
        .collect())
}

/// The coset reduction as canonical structured text.
#[pyfunction]
fn reduce(group: &Group, system: &EquationSystem) -> PyResult<String> {
    let dec =
        equations::reduce_to_twisted(&system.system, &group.file.spec).map_err(runtime_err)?;
    Ok(format::write_reduction(&dec))
}

/// Build the EDT0L system accepting the solution language in normal form.
#[pyfunction]
fn build_edt0l(group: &Group, system: &EquationSystem) -> PyResult<Edt0l> {
    let dec =
        equations::reduce_to_twisted(&system.system, &group.file.spec).map_err(runtime_err)?;
    let built =
        edt0l::assemble_group_solution_language(&dec, &group.file.spec).map_err(runtime_err)?;
    Ok(Edt0l { system: built })
}

fn report_to_dict<'py>(py: Python<'py>, report: &growth::GrowthReport) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    dict.set_item("status", report.status.as_str())?;
    dict.set_item("coefficients", report.coefficients.clone())?;
    dict.set_item("fit_len", report.fit_len)?;
    dict.set_item("verify_len", report.verify_len)?;
    let recurrence: Option<Vec<(BigInt, BigInt)>> = report
        .recurrence
        .as_ref()
        .map(|r| r.iter().map(|c| (c.numer().clone(), c.denom().clone())).collect());
    dict.set_item("recurrence", recurrence)?;
    dict.set_item("numerator", report.numerator.clone())?;
    dict.set_item("denominator", report.denominator.clone())?;
    Ok(dict)
}

/// Relative growth of the solution set up to `max_weight`, with the fitted
/// rational series. Keys: status, coefficients, fit_len, verify_len,
/// recurrence (list of (numer, denom)), numerator, denominator.
#[pyfunction]
#[pyo3(signature = (group, system, max_weight, fit_len=None, verify_len=None))]
fn relative_growth<'py>(
    py: Python<'py>,
    group: &Group,
    system: &EquationSystem,
    max_weight: u64,
    fit_len: Option<usize>,
    verify_len: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let solutions = equations::brute_force_group_solutions(
        &system.system,
        &group.file.spec,
        &group.file.generators,
        max_weight,
    )
    .map_err(runtime_err)?;
    let ball = group
        .file
        .spec
        .ball(&group.file.generators, max_weight)
        .map_err(runtime_err)?;
    let windows = match (fit_len, verify_len) {
        (Some(f), Some(v)) => Some(growth::FitWindows { fit_len: f, verify_len: v }),
        (Some(f), None) => Some(growth::FitWindows {
            fit_len: f,
            verify_len: (max_weight as usize + 1).saturating_sub(f),
        }),
        (None, Some(_)) => return Err(PyValueError::new_err("verify_len requires fit_len")),
        (None, None) => None,
    };
    let report =
        growth::relative_growth(&solutions, &ball, max_weight, windows).map_err(value_err)?;
    report_to_dict(py, &report)
}

/// Growth of an EDT0L language by word weight (unit letter weights).
#[pyfunction]
#[pyo3(signature = (system, max_weight, max_steps=8000, fit_len=None, verify_len=None))]
fn language_growth<'py>(
    py: Python<'py>,
    system: &Edt0l,
    max_weight: u64,
    max_steps: usize,
    fit_len: Option<usize>,
    verify_len: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let windows = match (fit_len, verify_len) {
        (Some(f), Some(v)) => Some(growth::FitWindows { fit_len: f, verify_len: v }),
        (Some(f), None) => Some(growth::FitWindows {
            fit_len: f,
            verify_len: (max_weight as usize + 1).saturating_sub(f),
        }),
        (None, Some(_)) => return Err(PyValueError::new_err("verify_len requires fit_len")),
        (None, None) => None,
    };
    let report = growth::language_growth(
        &system.system,
        &BTreeMap::new(),
        max_weight,
        max_steps,
        windows,
    )
    .map_err(value_err)?;
    report_to_dict(py, &report)
}

/// Multivariate weight table of the solution set: dict mapping per-variable
/// weight tuples to counts, complete for total weight <= cap.
#[pyfunction]
fn multivariate_growth<'py>(
    py: Python<'py>,
    group: &Group,
    system: &EquationSystem,
    cap: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let solutions = equations::brute_force_group_solutions(
        &system.system,
        &group.file.spec,
        &group.file.generators,
        cap,
    )
    .map_err(runtime_err)?;
    let ball = group.file.spec.ball(&group.file.generators, cap).map_err(runtime_err)?;
    let table = growth::multivariate_growth(&solutions, &ball, cap);
    let dict = PyDict::new(py);
    for (weights, count) in &table.entries {
        dict.set_item(pyo3::types::PyTuple::new(py, weights.clone())?, count)?;
    }
    Ok(dict)
}

#[pymodule]
fn vabeq_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Group>()?;
    m.add_class::<EquationSystem>()?;
    m.add_class::<Edt0l>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(build_edt0l, m)?)?;
    m.add_function(wrap_pyfunction!(relative_growth, m)?)?;
    m.add_function(wrap_pyfunction!(language_growth, m)?)?;
    m.add_function(wrap_pyfunction!(multivariate_growth, m)?)?;
    Ok(())
}
