//! Python bindings. Structured results (reports, limits, τ values) are
//! returned as plain dicts decoded from the library's JSON reports.

use std::collections::BTreeMap;
use std::sync::Arc;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use serde_json::{json, Value};

use commacat::constructions::{arrow_category, comma, slice, CommaCategory};
use commacat::induced::{check_assumptions, dyn_images, InducedSetup};
use commacat::instances::{finite_set_category, inclusion_iota, mono_subcategory, powerset_preorder, universe_from_arg, DynSystemData};
use commacat::io::{to_canonical_json, CategoryFile, FunctorFile};
use commacat::limits::{equalizer, limit, Diagram};
use commacat::limpre::orbit_functor;
use commacat::{FinCategory, FunctorData, Ob};

create_exception!(commacat, CommacatError, PyException, "A validation, verification or input error.");

fn err(e: commacat::Error) -> PyErr {
    CommacatError::new_err(format!("{}: {e}", e.kind()))
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (to_canonical_json(v),))
}

#[pyclass(frozen, name = "Category", module = "commacat")]
struct PyCategory {
    inner: Arc<FinCategory>,
}

#[pymethods]
impl PyCategory {
    /// Parses and validates a category file.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<PyCategory> {
        let c = CategoryFile::parse(text).and_then(|f| f.build()).map_err(err)?;
        Ok(PyCategory { inner: Arc::new(c) })
    }

    fn to_json(&self) -> String {
        CategoryFile::from_category(&self.inner).to_json()
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn objects(&self) -> Vec<String> {
        self.inner.object_ids().to_vec()
    }

    #[getter]
    fn morphisms(&self) -> Vec<String> {
        self.inner.morphisms().map(|f| self.inner.mor_name(f).to_string()).collect()
    }

    fn hom(&self, x: &str, y: &str) -> PyResult<Vec<String>> {
        let c = &self.inner;
        let (x, y) = (c.ob(x).map_err(err)?, c.ob(y).map_err(err)?);
        Ok(c.hom(x, y).iter().map(|&f| c.mor_name(f).to_string()).collect())
    }

    fn compose(&self, g: &str, f: &str) -> PyResult<String> {
        let c = &self.inner;
        let (g, f) = (c.mor(g).map_err(err)?, c.mor(f).map_err(err)?);
        c.try_compose(g, f)
            .map(|h| c.mor_name(h).to_string())
            .ok_or_else(|| CommacatError::new_err("not composable"))
    }

    fn is_mono(&self, f: &str) -> PyResult<bool> {
        Ok(self.inner.is_mono(self.inner.mor(f).map_err(err)?))
    }

    fn is_epi(&self, f: &str) -> PyResult<bool> {
        Ok(self.inner.is_epi(self.inner.mor(f).map_err(err)?))
    }

    fn is_iso(&self, f: &str) -> PyResult<bool> {
        Ok(self.inner.is_iso(self.inner.mor(f).map_err(err)?))
    }

    fn is_balanced(&self) -> bool {
        self.inner.is_balanced()
    }

    fn find_initial(&self) -> Option<String> {
        self.inner.find_initial().map(|x| self.inner.ob_name(x).to_string())
    }

    fn find_terminal(&self) -> Option<String> {
        self.inner.find_terminal().map(|x| self.inner.ob_name(x).to_string())
    }

    /// Equalizer apex and leg, or None.
    fn equalizer<'py>(&self, py: Python<'py>, f: &str, g: &str) -> PyResult<Option<Bound<'py, PyAny>>> {
        let c = &self.inner;
        let (f, g) = (c.mor(f).map_err(err)?, c.mor(g).map_err(err)?);
        match equalizer(c, f, g).map_err(err)? {
            Some(e) => Ok(Some(to_py(
                py,
                &json!({ "apex": c.ob_name(e.limit.cone.apex), "leg": c.mor_name(e.leg), "leg_is_mono": e.leg_is_mono }),
            )?)),
            None => Ok(None),
        }
    }

    fn slice(&self, x: &str) -> PyResult<PyComma> {
        let x = self.inner.ob(x).map_err(err)?;
        Ok(PyComma { inner: Arc::new(slice(&self.inner, x).map_err(err)?) })
    }

    fn arrow(&self) -> PyResult<PyComma> {
        Ok(PyComma { inner: Arc::new(arrow_category(&self.inner).map_err(err)?) })
    }

    fn __len__(&self) -> usize {
        self.inner.morphism_count()
    }

    fn __eq__(&self, other: &PyCategory) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Category({:?}, {} objects, {} morphisms)", self.inner.name(), self.inner.object_count(), self.inner.morphism_count())
    }
}

#[pyclass(frozen, name = "Functor", module = "commacat")]
struct PyFunctor {
    inner: FunctorData,
}

#[pymethods]
impl PyFunctor {
    /// Validates maps given by id between two categories.
    #[new]
    fn new(
        name: &str,
        source: &PyCategory,
        target: &PyCategory,
        object_map: BTreeMap<String, String>,
        morphism_map: BTreeMap<String, String>,
    ) -> PyResult<PyFunctor> {
        let f = FunctorData::from_names(name, source.inner.clone(), target.inner.clone(), &object_map, &morphism_map)
            .map_err(err)?;
        Ok(PyFunctor { inner: f })
    }

    #[staticmethod]
    fn identity(cat: &PyCategory) -> PyFunctor {
        PyFunctor { inner: FunctorData::identity(&cat.inner) }
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn source(&self) -> PyCategory {
        PyCategory { inner: self.inner.source().clone() }
    }

    #[getter]
    fn target(&self) -> PyCategory {
        PyCategory { inner: self.inner.target().clone() }
    }

    fn object_map(&self) -> BTreeMap<String, String> {
        self.inner.object_map_names()
    }

    fn morphism_map(&self) -> BTreeMap<String, String> {
        self.inner.morphism_map_names()
    }

    fn flags<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &serde_json::to_value(self.inner.flags()).expect("serializable"))
    }

    /// self ∘ first.
    fn after(&self, first: &PyFunctor) -> PyResult<PyFunctor> {
        Ok(PyFunctor { inner: self.inner.after(&first.inner).map_err(err)? })
    }

    /// Limit of this functor viewed as a diagram, or None.
    fn limit<'py>(&self, py: Python<'py>) -> PyResult<Option<Bound<'py, PyAny>>> {
        let d = Diagram::new(self.inner.clone()).map_err(err)?;
        let c = self.inner.target();
        match limit(&d).map_err(err)? {
            Some(l) => {
                let legs: BTreeMap<&str, &str> = d
                    .index()
                    .objects()
                    .map(|j| (d.index().ob_name(j), c.mor_name(l.cone.legs[j.ix()])))
                    .collect();
                Ok(Some(to_py(py, &json!({ "apex": c.ob_name(l.cone.apex), "legs": legs, "ties": l.ties.len() }))?))
            }
            None => Ok(None),
        }
    }

    fn to_json(&self) -> String {
        FunctorFile::from_functor(&self.inner, true).to_json()
    }

    fn __repr__(&self) -> String {
        format!("Functor({:?}: {} → {})", self.inner.name(), self.inner.source().name(), self.inner.target().name())
    }
}

#[pyclass(frozen, name = "CommaCategory", module = "commacat")]
struct PyComma {
    inner: Arc<CommaCategory>,
}

#[pymethods]
impl PyComma {
    #[new]
    fn new(left: &PyFunctor, right: &PyFunctor) -> PyResult<PyComma> {
        Ok(PyComma { inner: Arc::new(comma(&left.inner, &right.inner).map_err(err)?) })
    }

    #[getter]
    fn category(&self) -> PyCategory {
        PyCategory { inner: self.inner.base.clone() }
    }

    #[getter]
    fn forget1(&self) -> PyFunctor {
        PyFunctor { inner: self.inner.forget1.clone() }
    }

    #[getter]
    fn forget2(&self) -> PyFunctor {
        PyFunctor { inner: self.inner.forget2.clone() }
    }

    /// (a, b, φ) of a comma object.
    fn provenance(&self, x: &str) -> PyResult<(String, String, String)> {
        let cc = &self.inner;
        let p = cc.provenance(cc.base.ob(x).map_err(err)?);
        Ok((
            cc.a_cat().ob_name(p.a).to_string(),
            cc.b_cat().ob_name(p.b).to_string(),
            cc.c_cat().mor_name(p.phi).to_string(),
        ))
    }

    fn assumptions<'py>(&self, py: Python<'py>, probe: usize) -> PyResult<Bound<'py, PyAny>> {
        let r = check_assumptions(&self.inner, probe).map_err(err)?;
        to_py(py, &serde_json::to_value(r).expect("serializable"))
    }

    /// The induced setup at comma object `x`.
    fn setup(&self, x: &str) -> PyResult<PySetup> {
        let s = InducedSetup::by_name(self.inner.clone(), x).map_err(err)?;
        Ok(PySetup { inner: s })
    }

    fn to_json(&self) -> String {
        CategoryFile::from_comma(&self.inner).to_json()
    }

    fn __repr__(&self) -> String {
        format!("CommaCategory({:?}, {} objects)", self.inner.base.name(), self.inner.base.object_count())
    }
}

#[pyclass(frozen, name = "Setup", module = "commacat")]
struct PySetup {
    inner: InducedSetup,
}

impl PySetup {
    fn slice_object(&self, text: &str) -> PyResult<Ob> {
        let s = &self.inner;
        if let Ok(f) = s.slice_a.base.ob(text) {
            return Ok(f);
        }
        let ca = s.comma.a_cat();
        let x = ca.ob(text).map_err(err)?;
        match ca.hom(x, s.a) {
            [m] => Ok(s.slice_a.object_of(x, Ob(0), *m).expect("slice object")),
            _ => Err(CommacatError::new_err(format!("{text} has no unique arrow into {}", ca.ob_name(s.a)))),
        }
    }
}

#[pymethods]
impl PySetup {
    #[getter]
    fn slice_objects(&self) -> Vec<String> {
        self.inner.slice_a.base.object_ids().to_vec()
    }

    /// τ_F at a slice object (or an object of A with one arrow into a).
    fn tau<'py>(&self, py: Python<'py>, f: &str) -> PyResult<Bound<'py, PyAny>> {
        let f = self.slice_object(f)?;
        let t = self.inner.tau(f).map_err(err)?;
        let cc = &self.inner.comma;
        to_py(
            py,
            &json!({
                "tau": cc.base.ob_name(t.comma_object),
                "psi": cc.c_cat().mor_name(t.psi),
                "b_prime": cc.b_cat().ob_name(t.b_prime),
                "g": cc.b_cat().mor_name(t.g),
            }),
        )
    }

    /// Dyn_F on objects: slice object of A ↦ B-object of its image.
    fn dyn_map(&self) -> PyResult<BTreeMap<String, String>> {
        let s = &self.inner;
        let bt = s.bar_tau_and_dyn(None).map_err(err)?;
        let (ca, cb) = (s.comma.a_cat(), s.comma.b_cat());
        Ok(dyn_images(&bt)
            .into_iter()
            .enumerate()
            .map(|(f, y)| (ca.ob_name(s.slice_a.provenance(Ob(f as u32)).a).to_string(), cb.ob_name(y).to_string()))
            .collect())
    }

    /// Mediators for the square (b'', g'', F~) over slice object `f`.
    fn verify_universal<'py>(&self, py: Python<'py>, f: &str, b: &str, g: &str, ftilde: &str) -> PyResult<Bound<'py, PyAny>> {
        let f = self.slice_object(f)?;
        let (cb, c) = (self.inner.comma.b_cat(), self.inner.comma.c_cat());
        let r = self
            .inner
            .verify_universal_square(f, cb.ob(b).map_err(err)?, cb.mor(g).map_err(err)?, c.mor(ftilde).map_err(err)?)
            .map_err(err)?;
        to_py(py, &serde_json::to_value(r).expect("serializable"))
    }
}

#[pyfunction]
fn powerset(universe: &str) -> PyResult<PyCategory> {
    Ok(PyCategory { inner: Arc::new(powerset_preorder(&universe_from_arg(universe)).map_err(err)?) })
}

#[pyfunction]
fn finset(universe: &str) -> PyResult<PyCategory> {
    Ok(PyCategory { inner: finite_set_category(&universe_from_arg(universe)).map_err(err)?.cat })
}

#[pyfunction]
fn mono(cat: &PyCategory) -> PyResult<PyCategory> {
    Ok(PyCategory { inner: Arc::new(mono_subcategory(&cat.inner).map_err(err)?) })
}

#[pyfunction]
fn iota(universe: &str) -> PyResult<PyFunctor> {
    Ok(PyFunctor { inner: inclusion_iota(&universe_from_arg(universe)).map_err(err)?.functor })
}

/// Orbit of `subset` (state indices) under generators given as index lists.
#[pyfunction]
#[pyo3(signature = (n, generators, subset, truncation = 2))]
fn orbit(n: usize, generators: Vec<Vec<usize>>, subset: Vec<usize>, truncation: usize) -> PyResult<Vec<usize>> {
    let omega: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let sys = DynSystemData::new(omega, generators, truncation).map_err(err)?;
    let mask = subset.iter().try_fold(0u32, |m, &i| {
        if i < n {
            Ok(m | 1 << i)
        } else {
            Err(CommacatError::new_err(format!("state {i} out of range")))
        }
    })?;
    let o = orbit_functor(&sys).map_err(err)?.orbit(mask);
    Ok((0..n).filter(|i| o >> i & 1 == 1).collect())
}

/// Runs the command line; returns (exit code, stdout, stderr).
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut errb = Vec::new();
    let argv = std::iter::once("commacat".to_string()).chain(args);
    let code = commacat::cli::run(argv, &mut out, &mut errb);
    (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&errb).into_owned())
}

#[pymodule]
#[pyo3(name = "commacat")]
fn commacat_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CommacatError", m.py().get_type::<CommacatError>())?;
    m.add_class::<PyCategory>()?;
    m.add_class::<PyFunctor>()?;
    m.add_class::<PyComma>()?;
    m.add_class::<PySetup>()?;
    m.add_function(wrap_pyfunction!(powerset, m)?)?;
    m.add_function(wrap_pyfunction!(finset, m)?)?;
    m.add_function(wrap_pyfunction!(mono, m)?)?;
    m.add_function(wrap_pyfunction!(iota, m)?)?;
    m.add_function(wrap_pyfunction!(orbit, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
