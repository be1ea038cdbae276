//! Python bindings. `Word` and `Pattern` are classes; reports come back as
//! plain dicts with the same field names as the Rust structs.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

use patavoid::certify;
use patavoid::patterns;
use patavoid::series::{self, SeriesSpec, Term};
use patavoid::spectral;
use patavoid::words::{self, Rational};

fn err(e: patavoid::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn value_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.into_pyobject(py)?.into_any(),
            (None, Some(i)) => i.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(value_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, value_to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    value_to_py(py, &v)
}

fn parse_alpha(alpha: &str) -> PyResult<Rational> {
    alpha.parse().map_err(err)
}

/// A finite word over the letters `0..alphabet_size`.
#[pyclass(name = "Word", module = "patavoid", frozen, eq, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PyWord(words::Word);

#[pymethods]
impl PyWord {
    #[new]
    #[pyo3(signature = (letters, alphabet_size = None))]
    fn new(letters: &str, alphabet_size: Option<u32>) -> PyResult<Self> {
        match alphabet_size {
            Some(m) => words::Word::parse(letters, m),
            None => letters.parse(),
        }
        .map(PyWord)
        .map_err(err)
    }

    #[getter]
    fn alphabet_size(&self) -> u32 {
        self.0.alphabet_size()
    }

    #[getter]
    fn letters(&self) -> Vec<u8> {
        self.0.symbols().to_vec()
    }

    fn smallest_period(&self) -> PyResult<usize> {
        words::smallest_period(&self.0).map_err(err)
    }

    /// Exponent `|w| / period` as `(numerator, denominator)`.
    fn exponent(&self) -> PyResult<(u64, u64)> {
        let r = words::exponent(&self.0).map_err(err)?;
        Ok((r.numerator(), r.denominator()))
    }

    #[pyo3(signature = (alpha = "5/4"))]
    fn is_alpha_plus_free(&self, alpha: &str) -> PyResult<bool> {
        words::is_alpha_plus_free(&self.0, parse_alpha(alpha)?).map_err(err)
    }

    fn reversed(&self) -> Self {
        PyWord(self.0.reversed())
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Word('{}', {})", self.0, self.0.alphabet_size())
    }
}

/// A pattern over the variables `A..Z`, kept in canonical form.
#[pyclass(name = "Pattern", module = "patavoid", frozen, eq, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PyPattern(patterns::Pattern);

#[pymethods]
impl PyPattern {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        text.parse().map(PyPattern).map_err(err)
    }

    #[getter]
    fn var_count(&self) -> usize {
        self.0.var_count()
    }

    fn counts(&self) -> Vec<usize> {
        self.0.counts()
    }

    fn is_doubled(&self) -> bool {
        self.0.is_doubled()
    }

    fn reverse(&self) -> Self {
        PyPattern(self.0.reverse())
    }

    fn distinct_prefix_len(&self) -> usize {
        self.0.distinct_prefix_len()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Pattern('{}')", self.0)
    }
}

#[derive(FromPyObject)]
enum PatternArg {
    Obj(PyPattern),
    Text(String),
}

impl PatternArg {
    fn get(self) -> PyResult<patterns::Pattern> {
        match self {
            PatternArg::Obj(p) => Ok(p.0),
            PatternArg::Text(s) => s.parse().map_err(err),
        }
    }
}

#[derive(FromPyObject)]
enum WordArg {
    Obj(PyWord),
    Text(String),
}

impl WordArg {
    fn get(self) -> PyResult<words::Word> {
        match self {
            WordArg::Obj(w) => Ok(w.0),
            WordArg::Text(s) => s.parse().map_err(err),
        }
    }
}

/// Least occurrence of `pattern` in `word`, or `None`.
#[pyfunction]
#[pyo3(signature = (pattern, word, cap = None))]
fn find_occurrence<'py>(
    py: Python<'py>,
    pattern: PatternArg,
    word: WordArg,
    cap: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let (p, w) = (pattern.get()?, word.get()?);
    let occ = py.detach(|| patterns::find_occurrence(&p, &w, cap));
    to_py(py, &occ)
}

#[pyfunction]
fn enumerate_remaining(py: Python<'_>, vars: usize) -> PyResult<Vec<PyPattern>> {
    let found = py.detach(|| patterns::enumerate_remaining(vars)).map_err(err)?;
    Ok(found.into_iter().map(PyPattern).collect())
}

#[pyfunction]
fn avoidability_exponent(py: Python<'_>, pattern: PatternArg) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &spectral::avoidability_exponent(&pattern.get()?).map_err(err)?)
}

/// Root of `1 - m x + sum c x^w / (1 - c x^w)` for explicit `(c, w)` terms.
#[pyfunction]
fn smallest_positive_root(py: Python<'_>, m: u32, terms: Vec<(u32, u32)>) -> PyResult<Bound<'_, PyAny>> {
    let spec = SeriesSpec::new(m, terms.into_iter().map(|(c, w)| Term::new(c, w)).collect()).map_err(err)?;
    to_py(py, &series::smallest_positive_root(&spec))
}

#[pyfunction]
#[pyo3(signature = (pattern, alphabet = 3))]
fn certify_avoidable(py: Python<'_>, pattern: PatternArg, alphabet: u32) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &series::certify_avoidable(&pattern.get()?, alphabet).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (word, alpha = "5/4"))]
fn is_alpha_plus_free(word: WordArg, alpha: &str) -> PyResult<bool> {
    words::is_alpha_plus_free(&word.get()?, parse_alpha(alpha)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (k, max_len, alpha = "5/4"))]
fn count_free_words(py: Python<'_>, k: u32, max_len: usize, alpha: &str) -> PyResult<Vec<u64>> {
    let a = parse_alpha(alpha)?;
    py.detach(|| words::count_free_words(k, a, max_len)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (pattern, up_to, alphabet = 3))]
fn count_avoiding(py: Python<'_>, pattern: PatternArg, up_to: usize, alphabet: u32) -> PyResult<Vec<u64>> {
    let p = pattern.get()?;
    py.detach(|| certify::count_avoiding(&p, alphabet, up_to)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (pattern, up_to, alphabet = 3))]
fn cross_check(py: Python<'_>, pattern: PatternArg, up_to: usize, alphabet: u32) -> PyResult<Bound<'_, PyAny>> {
    let p = pattern.get()?;
    let c = py.detach(|| certify::cross_check(&p, alphabet, up_to)).map_err(err)?;
    to_py(py, &c)
}

#[pyfunction]
fn corpus(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &certify::corpus())
}

/// Bounded check of a corpus entry, looked up by number or pattern.
#[pyfunction]
#[pyo3(signature = (key, max_preimage_len = certify::DEFAULT_MAX_PREIMAGE_LEN, image_cap = None))]
fn verify_entry<'py>(
    py: Python<'py>,
    key: &str,
    max_preimage_len: usize,
    image_cap: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let entry = certify::corpus_entry(key).map_err(err)?;
    let cap = image_cap.unwrap_or(2 * entry.morphism.uniform_len);
    let report = py.detach(|| certify::verify_entry(&entry, max_preimage_len, cap)).map_err(err)?;
    to_py(py, &report)
}

#[pyfunction]
fn find_splitted_factor(py: Python<'_>, word: WordArg, n: usize) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &patterns::find_splitted_factor(&word.get()?, n).map_err(err)?)
}

#[pymodule(name = "patavoid")]
fn patavoid_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWord>()?;
    m.add_class::<PyPattern>()?;
    m.add_function(wrap_pyfunction!(find_occurrence, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_remaining, m)?)?;
    m.add_function(wrap_pyfunction!(avoidability_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(smallest_positive_root, m)?)?;
    m.add_function(wrap_pyfunction!(certify_avoidable, m)?)?;
    m.add_function(wrap_pyfunction!(is_alpha_plus_free, m)?)?;
    m.add_function(wrap_pyfunction!(count_free_words, m)?)?;
    m.add_function(wrap_pyfunction!(count_avoiding, m)?)?;
    m.add_function(wrap_pyfunction!(cross_check, m)?)?;
    m.add_function(wrap_pyfunction!(corpus, m)?)?;
    m.add_function(wrap_pyfunction!(verify_entry, m)?)?;
    m.add_function(wrap_pyfunction!(find_splitted_factor, m)?)?;
    Ok(())
}
