//! Python bindings: sequences, sentences, evaluation, overguessers, guessers
//! and adversaries. Prefixes are plain lists of ints and infinity is `None`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use guessability::adversary::{self as adv, ContainsZero, ExtensionOracles, FlipTrace, InfinitelyManyZeros};
use guessability::lang::{self, Registry};
use guessability::semantics::{self, AttemptOutcome};
use guessability::synth::{self, GuessTrace};
use guessability::{Assignment, FinitePrefix, PairingCodec, SequenceOracle, SequenceSpec, Term};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// An infinite sequence given by a spec such as `id`, `const:3`,
/// `prefix:[3,0,2]:pad0`, `plantzero:5` or `cycle:[1,2]`.
#[pyclass(name = "Oracle", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyOracle {
    inner: SequenceOracle,
}

#[pymethods]
impl PyOracle {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        let spec: SequenceSpec = spec.parse().map_err(err)?;
        Ok(PyOracle { inner: spec.to_oracle() })
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    fn value(&self, index: u64) -> u64 {
        self.inner.value(index)
    }

    /// The first `length` values.
    fn prefix(&self, length: u64) -> Vec<u64> {
        (0..length).map(|i| self.inner.value(i)).collect()
    }

    fn __repr__(&self) -> String {
        format!("Oracle({:?})", self.inner.label())
    }
}

/// Symbols available to sentences; starts from the standard set.
#[pyclass(name = "Signature", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PySignature {
    inner: lang::Signature,
}

#[pymethods]
impl PySignature {
    /// `declarations` uses the signature file format
    /// (`fn NAME ARITY KEY`, `pred NAME ARITY KEY`, `seqfn NAME KEY`).
    #[new]
    #[pyo3(signature = (declarations = None))]
    fn new(declarations: Option<&str>) -> PyResult<Self> {
        let mut inner = lang::Signature::standard();
        if let Some(text) = declarations {
            inner.apply_declarations(text, &Registry::builtin()).map_err(err)?;
        }
        Ok(PySignature { inner })
    }

    fn symbols(&self) -> Vec<String> {
        self.inner.symbols().into_iter().map(|(name, _)| name).collect()
    }
}

fn sig_or_standard(sig: Option<&PySignature>) -> lang::Signature {
    sig.map_or_else(lang::Signature::standard, |s| s.inner.clone())
}

#[pyclass(name = "Formula", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyFormula {
    inner: lang::Formula,
}

#[pymethods]
impl PyFormula {
    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Formula({:?})", self.inner.to_string())
    }

    fn free_vars(&self) -> Vec<String> {
        self.inner.free_vars().into_iter().collect()
    }

    fn is_closed(&self) -> bool {
        self.inner.is_closed()
    }

    /// `quantifier_free`, `sigma2`, `pi2` or `nested_other`.
    fn classify(&self) -> PyResult<&'static str> {
        Ok(match lang::classify_sentence(&self.inner).map_err(err)? {
            lang::SentenceClass::QuantifierFree => "quantifier_free",
            lang::SentenceClass::Sigma2 => "sigma2",
            lang::SentenceClass::Pi2 => "pi2",
            lang::SentenceClass::NestedOther => "nested_other",
        })
    }

    /// Replaces free occurrences of `var` by the numeral `value`.
    fn substitute(&self, var: &str, value: u64) -> PyResult<PyFormula> {
        let inner = self.inner.substitute(var, &Term::num(value)).map_err(err)?;
        Ok(PyFormula { inner })
    }
}

/// Parses a sentence; symbols are checked against `sig` when given.
#[pyfunction]
#[pyo3(signature = (text, sig = None))]
fn parse(text: &str, sig: Option<&PySignature>) -> PyResult<PyFormula> {
    let inner = match sig {
        Some(s) => lang::parse(text, &s.inner).map_err(err)?,
        None => lang::parse_formula(text).map_err(err)?,
    };
    Ok(PyFormula { inner })
}

fn assignment(values: Option<Vec<(String, u64)>>) -> Assignment {
    values.unwrap_or_default().into_iter().collect()
}

/// Truth value of a quantifier-free formula and the sorted indices it read.
#[pyfunction]
#[pyo3(signature = (formula, oracle, assign = None, sig = None))]
fn eval_qf(
    formula: &PyFormula,
    oracle: &PyOracle,
    assign: Option<Vec<(String, u64)>>,
    sig: Option<&PySignature>,
) -> PyResult<(bool, Vec<u64>)> {
    let r = semantics::eval_qf(&formula.inner, &oracle.inner, &assignment(assign), &sig_or_standard(sig)).map_err(err)?;
    Ok((r.value, r.queries.queried().iter().copied().collect()))
}

/// `("succeeded", value)` or `("failed", index)` for a closed
/// quantifier-free sentence evaluated over `prefix`.
#[pyfunction]
#[pyo3(signature = (formula, prefix, sig = None))]
fn attempt(formula: &PyFormula, prefix: Vec<u64>, sig: Option<&PySignature>) -> PyResult<(&'static str, u64)> {
    let out = semantics::attempt(&formula.inner, &FinitePrefix::new(prefix), &sig_or_standard(sig)).map_err(err)?;
    Ok(match out {
        AttemptOutcome::Succeeded(v) => ("succeeded", u64::from(v)),
        AttemptOutcome::Failed { index } => ("failed", index),
    })
}

/// Overguesser value of an `exists x. forall y.` sentence on `prefix`;
/// `None` stands for infinity.
#[pyfunction]
#[pyo3(signature = (sigma2, prefix, sig = None))]
fn mu(sigma2: &PyFormula, prefix: Vec<u64>, sig: Option<&PySignature>) -> PyResult<Option<u64>> {
    let s = lang::Sigma2Sentence::from_formula(&sigma2.inner).map_err(err)?;
    let v = synth::mu_from_sigma2(&s, &FinitePrefix::new(prefix), &sig_or_standard(sig)).map_err(err)?;
    Ok(v.finite())
}

/// `(pi2, sigma2)` sentences for the sequence symbol `name`.
#[pyfunction]
#[pyo3(signature = (name, sig = None))]
fn sentences_from_guesser(name: &str, sig: Option<&PySignature>) -> PyResult<(PyFormula, PyFormula)> {
    let spec = synth::sentences_from_guesser(name, &sig_or_standard(sig)).map_err(err)?;
    Ok((
        PyFormula { inner: spec.pi2.to_formula() },
        PyFormula { inner: spec.sigma2.to_formula() },
    ))
}

#[pyclass(name = "Trace", frozen, get_all)]
pub struct PyTrace {
    guesses: Vec<u8>,
    stable_from: Option<usize>,
    final_guess: Option<u8>,
}

#[pyclass(name = "Guesser", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyGuesser {
    inner: synth::Guesser,
}

#[pymethods]
impl PyGuesser {
    /// One of `contains-zero`, `parity`, `initial-segment`, `last-is-5`,
    /// `const-0`, `const-1`.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        let inner = match name {
            "contains-zero" => synth::contains_zero_guesser(),
            "parity" => synth::Guesser::even_length(),
            "initial-segment" => synth::Guesser::initial_segment(),
            "last-is-5" => synth::Guesser::last_entry_is(5),
            "const-0" => synth::Guesser::constant(false),
            "const-1" => synth::Guesser::constant(true),
            other => return Err(PyValueError::new_err(format!("unknown guesser `{other}`"))),
        };
        Ok(PyGuesser { inner })
    }

    /// Guesser of a set given by a `forall exists` and an `exists forall`
    /// sentence.
    #[staticmethod]
    #[pyo3(signature = (pi2, sigma2, sig = None))]
    fn from_delta2(pi2: &PyFormula, sigma2: &PyFormula, sig: Option<&PySignature>) -> PyResult<Self> {
        let spec = synth::Delta2Spec {
            pi2: lang::Pi2Sentence::from_formula(&pi2.inner).map_err(err)?,
            sigma2: lang::Sigma2Sentence::from_formula(&sigma2.inner).map_err(err)?,
        };
        let inner = synth::guesser_from_delta2(&spec, &sig_or_standard(sig)).map_err(err)?;
        Ok(PyGuesser { inner })
    }

    #[getter]
    fn provenance(&self) -> String {
        self.inner.provenance().to_string()
    }

    fn guess(&self, prefix: Vec<u64>) -> PyResult<u8> {
        Ok(u8::from(self.inner.guess(&FinitePrefix::new(prefix)).map_err(err)?))
    }

    fn trace(&self, oracle: &PyOracle, horizon: usize) -> PyResult<PyTrace> {
        let t = GuessTrace::run(&self.inner, &oracle.inner, horizon).map_err(err)?;
        Ok(PyTrace {
            guesses: t.guesses.iter().map(|g| u8::from(*g)).collect(),
            stable_from: t.stable_from,
            final_guess: t.final_guess().map(u8::from),
        })
    }

    fn negate(&self) -> Self {
        PyGuesser { inner: synth::guesser_not(&self.inner) }
    }

    fn both(&self, other: &PyGuesser) -> Self {
        PyGuesser { inner: synth::guesser_and(&self.inner, &other.inner) }
    }

    fn either(&self, other: &PyGuesser) -> Self {
        PyGuesser { inner: synth::guesser_or(&self.inner, &other.inner) }
    }
}

#[pyclass(name = "FlipResult", frozen, get_all)]
pub struct PyFlipResult {
    prefix: Vec<u64>,
    flips: Vec<u64>,
    guesses: Vec<u8>,
    completed: bool,
    status: String,
}

fn flip_result(out: Result<(FinitePrefix, FlipTrace), adv::AdversaryError>) -> PyResult<PyFlipResult> {
    let (prefix, trace) = out.map_err(err)?;
    Ok(PyFlipResult {
        prefix: prefix.into_vec(),
        completed: trace.is_completed(),
        status: trace.status.to_string(),
        guesses: trace.guesses.iter().map(|g| u8::from(*g)).collect(),
        flips: trace.flips,
    })
}

/// Diagonal adversary with extenders `inf-zeros` or `contains-zero`.
#[pyfunction]
#[pyo3(signature = (guesser, flips, budget, ext = "inf-zeros"))]
fn diagonalize(guesser: &PyGuesser, flips: usize, budget: u64, ext: &str) -> PyResult<PyFlipResult> {
    let ext: &dyn ExtensionOracles = match ext {
        "inf-zeros" => &InfinitelyManyZeros,
        "contains-zero" => &ContainsZero,
        other => return Err(PyValueError::new_err(format!("unknown extenders `{other}`"))),
    };
    flip_result(adv::diagonalize(&guesser.inner, ext, flips, budget))
}

#[pyfunction]
fn permutation_adversary(guesser: &PyGuesser, flips: usize, budget: u64) -> PyResult<PyFlipResult> {
    flip_result(adv::permutation_adversary(&guesser.inner, flips, budget))
}

#[pyfunction]
fn cantor_adversary(guesser: &PyGuesser, flips: usize, budget: u64) -> PyResult<PyFlipResult> {
    flip_result(adv::cantor_adversary(&guesser.inner, flips, budget))
}

/// Diagonal pairing `n -> (a, b)`.
#[pyfunction]
fn unpair(n: u64) -> (u64, u64) {
    PairingCodec::diagonal().decode(n)
}

#[pyfunction]
fn pair(a: u64, b: u64) -> PyResult<u64> {
    PairingCodec::diagonal()
        .encode(a, b)
        .ok_or_else(|| PyValueError::new_err("pair code overflows u64"))
}

#[pymodule]
fn pyguess(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOracle>()?;
    m.add_class::<PySignature>()?;
    m.add_class::<PyFormula>()?;
    m.add_class::<PyGuesser>()?;
    m.add_class::<PyTrace>()?;
    m.add_class::<PyFlipResult>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(eval_qf, m)?)?;
    m.add_function(wrap_pyfunction!(attempt, m)?)?;
    m.add_function(wrap_pyfunction!(mu, m)?)?;
    m.add_function(wrap_pyfunction!(sentences_from_guesser, m)?)?;
    m.add_function(wrap_pyfunction!(diagonalize, m)?)?;
    m.add_function(wrap_pyfunction!(permutation_adversary, m)?)?;
    m.add_function(wrap_pyfunction!(cantor_adversary, m)?)?;
    m.add_function(wrap_pyfunction!(unpair, m)?)?;
    m.add_function(wrap_pyfunction!(pair, m)?)?;
    Ok(())
}
